//! Versioned JSON documents ("schema": 1) for reports, certificates, and
//! the group catalog, plus reconstruction of certificates from files so
//! they can be replayed offline. Serialization uses fixed struct field
//! order, so identical invocations are byte-identical.

use serde::{Deserialize, Serialize};

use smithcalc_core::bundles::{LemmaReport, VirtualBundle};
use smithcalc_core::ranks_les::{
    CatalogEntry, FgAbelianGroup, ForcedIsoReport, RankEqualityReport, RanksError,
};
use smithcalc_core::rewriter::{
    Certificate, FiberSequence, MainTheoremReport, Phase, SpectrumExpr, SpectrumName,
    SpincSpinhReport, Step, Witness, RULE_CRUSH_SPLIT, RULE_EXT_SUM, RULE_PULLBACK_ISO,
    RULE_REL_THOM, RULE_SHEAR, RULE_TRIV_SUSP,
};

use crate::dsl;

pub const SCHEMA: u32 = 1;

// ---------------------------------------------------------------------------
// Bundles and spectrum expressions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleDoc {
    pub base: String,
    pub rank: i64,
    pub total_sw: String,
    pub truncation: u32,
}

pub fn bundle_to_doc(b: &VirtualBundle) -> BundleDoc {
    BundleDoc {
        base: b.base().to_string(),
        rank: b.rank(),
        total_sw: b.total_sw().total().to_string(),
        truncation: b.truncation(),
    }
}

pub fn doc_to_bundle(doc: &BundleDoc) -> Result<VirtualBundle, String> {
    dsl::bundle_from_parts(&doc.base, doc.rank, &doc.total_sw, doc.truncation)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumDoc {
    Named { name: String },
    Thom { bundle: BundleDoc },
    SmashMtspin { inner: Box<SpectrumDoc> },
    Smash { left: Box<SpectrumDoc>, right: Box<SpectrumDoc> },
    Suspend { shift: i64, inner: Box<SpectrumDoc> },
    Sphere,
    PlusPoint { space: String },
    Reduced { space: String },
}

pub fn expr_to_doc(e: &SpectrumExpr) -> SpectrumDoc {
    match e {
        SpectrumExpr::Named(n) => SpectrumDoc::Named {
            name: n.name().to_string(),
        },
        SpectrumExpr::Thom(_, b) => SpectrumDoc::Thom {
            bundle: bundle_to_doc(b),
        },
        SpectrumExpr::SmashMTSpin(inner) => SpectrumDoc::SmashMtspin {
            inner: Box::new(expr_to_doc(inner)),
        },
        SpectrumExpr::Smash(a, b) => SpectrumDoc::Smash {
            left: Box::new(expr_to_doc(a)),
            right: Box::new(expr_to_doc(b)),
        },
        SpectrumExpr::Suspend(k, inner) => SpectrumDoc::Suspend {
            shift: *k,
            inner: Box::new(expr_to_doc(inner)),
        },
        SpectrumExpr::Sphere => SpectrumDoc::Sphere,
        SpectrumExpr::PlusPoint(space) => SpectrumDoc::PlusPoint {
            space: space.to_string(),
        },
        SpectrumExpr::Reduced(space) => SpectrumDoc::Reduced {
            space: space.to_string(),
        },
    }
}

pub fn doc_to_expr(doc: &SpectrumDoc) -> Result<SpectrumExpr, String> {
    Ok(match doc {
        SpectrumDoc::Named { name } => SpectrumExpr::Named(
            SpectrumName::parse(name).ok_or_else(|| format!("unknown spectrum `{name}`"))?,
        ),
        SpectrumDoc::Thom { bundle } => {
            let b = doc_to_bundle(bundle)?;
            SpectrumExpr::Thom(b.base().clone(), b)
        }
        SpectrumDoc::SmashMtspin { inner } => {
            SpectrumExpr::SmashMTSpin(Box::new(doc_to_expr(inner)?))
        }
        SpectrumDoc::Smash { left, right } => {
            SpectrumExpr::smash(doc_to_expr(left)?, doc_to_expr(right)?)
        }
        SpectrumDoc::Suspend { shift, inner } => {
            SpectrumExpr::suspend(*shift, doc_to_expr(inner)?)
        }
        SpectrumDoc::Sphere => SpectrumExpr::Sphere,
        SpectrumDoc::PlusPoint { space } => {
            SpectrumExpr::PlusPoint(dsl::parse_space(space).map_err(|e| e.to_string())?)
        }
        SpectrumDoc::Reduced { space } => {
            SpectrumExpr::Reduced(dsl::parse_space(space).map_err(|e| e.to_string())?)
        }
    })
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessDoc {
    None,
    Bundle(BundleDoc),
    Shift { amount: i64 },
    Map { name: String },
    Position { index: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepDoc {
    pub phase: String,
    pub rule: String,
    pub position: usize,
    pub witness: WitnessDoc,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub schema: u32,
    pub start: SpectrumDoc,
    pub end: SpectrumDoc,
    pub steps: Vec<StepDoc>,
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::NormalizeStart => "normalize_start",
        Phase::Rewrite => "rewrite",
        Phase::NormalizeEnd => "normalize_end",
    }
}

fn parse_phase(s: &str) -> Result<Phase, String> {
    match s {
        "normalize_start" => Ok(Phase::NormalizeStart),
        "rewrite" => Ok(Phase::Rewrite),
        "normalize_end" => Ok(Phase::NormalizeEnd),
        other => Err(format!("unknown phase `{other}`")),
    }
}

fn parse_rule(s: &str) -> Result<&'static str, String> {
    [
        RULE_SHEAR,
        RULE_TRIV_SUSP,
        RULE_REL_THOM,
        RULE_EXT_SUM,
        RULE_PULLBACK_ISO,
        RULE_CRUSH_SPLIT,
    ]
    .into_iter()
    .find(|r| *r == s)
    .ok_or_else(|| format!("unknown rewrite rule `{s}`"))
}

pub fn witness_to_doc(w: &Witness) -> WitnessDoc {
    match w {
        Witness::None => WitnessDoc::None,
        Witness::Bundle(b) => WitnessDoc::Bundle(bundle_to_doc(b)),
        Witness::Shift(k) => WitnessDoc::Shift { amount: *k },
        Witness::Map(name) => WitnessDoc::Map { name: name.clone() },
        Witness::Position(i) => WitnessDoc::Position { index: *i },
    }
}

pub fn doc_to_witness(doc: &WitnessDoc) -> Result<Witness, String> {
    Ok(match doc {
        WitnessDoc::None => Witness::None,
        WitnessDoc::Bundle(b) => Witness::Bundle(doc_to_bundle(b)?),
        WitnessDoc::Shift { amount } => Witness::Shift(*amount),
        WitnessDoc::Map { name } => Witness::Map(name.clone()),
        WitnessDoc::Position { index } => Witness::Position(*index),
    })
}

pub fn step_to_doc(s: &Step) -> StepDoc {
    StepDoc {
        phase: phase_name(s.phase).to_string(),
        rule: s.rule.to_string(),
        position: s.position,
        witness: witness_to_doc(&s.witness),
        note: s.note.clone(),
    }
}

pub fn cert_to_doc(cert: &Certificate) -> CertificateDoc {
    CertificateDoc {
        schema: SCHEMA,
        start: expr_to_doc(&cert.start),
        end: expr_to_doc(&cert.end),
        steps: cert.steps.iter().map(step_to_doc).collect(),
    }
}

pub fn doc_to_cert(doc: &CertificateDoc) -> Result<Certificate, String> {
    if doc.schema != SCHEMA {
        return Err(format!("unsupported schema {}", doc.schema));
    }
    let mut steps = Vec::with_capacity(doc.steps.len());
    for s in &doc.steps {
        steps.push(Step {
            phase: parse_phase(&s.phase)?,
            rule: parse_rule(&s.rule)?,
            position: s.position,
            witness: doc_to_witness(&s.witness)?,
            note: s.note.clone(),
        });
    }
    Ok(Certificate {
        start: doc_to_expr(&doc.start)?,
        end: doc_to_expr(&doc.end)?,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct LemmaStepDoc {
    pub label: String,
    pub class: String,
    pub value: String,
}

#[derive(Serialize)]
pub struct LemmaDoc {
    pub schema: u32,
    pub lemma: String,
    pub pass: bool,
    pub steps: Vec<LemmaStepDoc>,
}

pub fn lemma_to_doc(report: &LemmaReport) -> LemmaDoc {
    LemmaDoc {
        schema: SCHEMA,
        lemma: report.lemma.to_string(),
        pass: report.pass,
        steps: report
            .steps
            .iter()
            .map(|s| LemmaStepDoc {
                label: s.label.clone(),
                class: s.class.clone(),
                value: s.value.clone(),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct StructureMatchDoc {
    pub structure: String,
    pub difference_rank: i64,
    pub difference_sw: String,
}

#[derive(Serialize)]
pub struct ClassifyDoc {
    pub schema: u32,
    pub expression: String,
    pub base: String,
    pub rank: i64,
    pub total_sw: String,
    pub w1: String,
    pub w2: String,
    pub w2_plus_w1_sq: String,
    pub tags: Vec<String>,
    pub structure: Option<StructureMatchDoc>,
    pub truncation: u32,
}

#[derive(Serialize)]
pub struct EquivDoc {
    pub schema: u32,
    pub found: bool,
    pub depth: i64,
    pub certificate: Option<CertificateDoc>,
}

#[derive(Serialize)]
pub struct RewriteDoc {
    pub schema: u32,
    pub input: String,
    pub normal_form: String,
    pub shift: i64,
    pub steps: Vec<StepDoc>,
}

#[derive(Serialize)]
pub struct ReplayDoc {
    pub schema: u32,
    pub accepted: bool,
    pub normal_form: Option<String>,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct FiberSequenceBody {
    pub fiber: String,
    pub total: String,
    pub base: String,
    pub provenance: String,
}

pub fn fibseq_body(fs: &FiberSequence) -> FiberSequenceBody {
    FiberSequenceBody {
        fiber: fs.fiber.to_string(),
        total: fs.total.to_string(),
        base: fs.base.to_string(),
        provenance: fs.provenance.clone(),
    }
}

#[derive(Serialize)]
pub struct FibseqDoc {
    pub schema: u32,
    pub fiber: String,
    pub total: String,
    pub base: String,
    pub provenance: String,
}

#[derive(Serialize)]
pub struct MainThmDoc {
    pub schema: u32,
    pub pass: bool,
    pub rule_applications: usize,
    pub certificate: CertificateDoc,
    pub crush_certificate: CertificateDoc,
    pub fiber_sequence: FiberSequenceBody,
    pub splitting_note: String,
    pub conclusion: String,
}

pub fn main_thm_to_doc(report: &MainTheoremReport) -> MainThmDoc {
    MainThmDoc {
        schema: SCHEMA,
        pass: report.pass,
        rule_applications: report.rule_applications,
        certificate: cert_to_doc(&report.certificate),
        crush_certificate: cert_to_doc(&report.crush_certificate),
        fiber_sequence: fibseq_body(&report.fiber_sequence),
        splitting_note: report.splitting_note.clone(),
        conclusion: report.conclusion.clone(),
    }
}

#[derive(Serialize)]
pub struct SpincSpinhDoc {
    pub schema: u32,
    pub pass: bool,
    pub shifts: [i64; 3],
    pub net_shift: i64,
    pub base_witness: BundleDoc,
    pub base_witness_spin: bool,
    pub fiber_witness: BundleDoc,
    pub fiber_witness_spin: bool,
    pub fiber_sequence: FiberSequenceBody,
    pub fiber_certificate: CertificateDoc,
    pub total_certificate: CertificateDoc,
    pub base_certificate: CertificateDoc,
}

pub fn spinc_spinh_to_doc(report: &SpincSpinhReport) -> SpincSpinhDoc {
    SpincSpinhDoc {
        schema: SCHEMA,
        pass: report.pass,
        shifts: [report.shifts.0, report.shifts.1, report.shifts.2],
        net_shift: report.net_shift,
        base_witness: bundle_to_doc(&report.base_witness),
        base_witness_spin: report.base_witness_spin,
        fiber_witness: bundle_to_doc(&report.fiber_witness),
        fiber_witness_spin: report.fiber_witness_spin,
        fiber_sequence: fibseq_body(&report.fiber_sequence),
        fiber_certificate: cert_to_doc(&report.fiber_certificate),
        total_certificate: cert_to_doc(&report.total_certificate),
        base_certificate: cert_to_doc(&report.base_certificate),
    }
}

#[derive(Serialize)]
pub struct RanksDoc {
    pub schema: u32,
    pub theory: String,
    pub degrees: Vec<usize>,
    pub ranks: Vec<u64>,
}

#[derive(Serialize)]
pub struct RankEqualityDoc {
    pub schema: u32,
    pub k_max: usize,
    pub degrees: Vec<usize>,
    pub ranks: Vec<u64>,
    pub series_agree: bool,
    pub random_trials: usize,
    pub random_trials_pass: bool,
    pub pass: bool,
}

pub fn rank_equality_to_doc(report: &RankEqualityReport) -> RankEqualityDoc {
    RankEqualityDoc {
        schema: SCHEMA,
        k_max: report.k_max,
        degrees: (0..=report.k_max).map(|k| 4 * k).collect(),
        ranks: report.ranks.clone(),
        series_agree: report.series_agree,
        random_trials: report.random_trials,
        random_trials_pass: report.random_trials_pass,
        pass: report.pass,
    }
}

#[derive(Serialize)]
pub struct LesCheckDoc {
    pub schema: u32,
    pub shift: usize,
    pub labels: [String; 3],
    pub forced: Vec<usize>,
    pub withheld: Vec<usize>,
    pub statements: Vec<String>,
    pub all_forced: bool,
}

pub fn les_check_to_doc(report: &ForcedIsoReport, labels: &(String, String, String)) -> LesCheckDoc {
    LesCheckDoc {
        schema: SCHEMA,
        shift: report.shift,
        labels: [labels.0.clone(), labels.1.clone(), labels.2.clone()],
        forced: report.forced.clone(),
        withheld: report.withheld.clone(),
        statements: report.statements.clone(),
        all_forced: report.all_forced,
    }
}

// ---------------------------------------------------------------------------
// LES spec files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
pub struct SeriesFile {
    pub label: String,
    pub coefficients: Vec<u64>,
}

/// The on-disk shape accepted by `les-check --spec`. `modulus`/`residue`
/// restrict the checked degrees (defaults check every degree).
#[derive(Deserialize)]
pub struct LesSpecFile {
    pub schema: u32,
    pub shift: usize,
    pub a: SeriesFile,
    pub b: SeriesFile,
    pub c: SeriesFile,
    #[serde(default = "default_modulus")]
    pub modulus: usize,
    #[serde(default)]
    pub residue: usize,
}

fn default_modulus() -> usize {
    1
}

// ---------------------------------------------------------------------------
// Group catalog
// ---------------------------------------------------------------------------

/// One catalog line, in the documented file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntryDoc {
    pub name: String,
    pub degree: u32,
    pub free_rank: u64,
    pub torsion: Vec<u64>,
    pub citation: String,
}

#[derive(Serialize)]
pub struct CatalogDoc {
    pub schema: u32,
    pub entries: Vec<CatalogEntryDoc>,
    pub verdicts: Vec<String>,
}

pub fn catalog_entry_to_doc(e: &CatalogEntry) -> CatalogEntryDoc {
    CatalogEntryDoc {
        name: e.name.clone(),
        degree: e.degree,
        free_rank: e.group.free_rank(),
        torsion: e.group.torsion().to_vec(),
        citation: e.citation.clone(),
    }
}

pub fn doc_to_catalog_entry(doc: &CatalogEntryDoc) -> Result<CatalogEntry, RanksError> {
    Ok(CatalogEntry {
        name: doc.name.clone(),
        description: doc.name.clone(),
        degree: doc.degree,
        group: FgAbelianGroup::new(doc.free_rank, doc.torsion.clone())?,
        citation: doc.citation.clone(),
    })
}

pub fn to_json_string<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("report serialization");
    out.push('\n');
    out
}
