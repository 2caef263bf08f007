//! Plain-text report rendering. Certificates print as numbered proof
//! steps in the order they replay: start-side normalization, the rewrite
//! chain with its witnesses, then end-side normalization.

use std::fmt::Write as _;

use smithcalc_core::bundles::{LemmaReport, StructureTag, VirtualBundle};
use smithcalc_core::ranks_les::{CatalogEntry, ForcedIsoReport, PoincareSeries, RankEqualityReport};
use smithcalc_core::rewriter::{
    Certificate, FiberSequence, MainTheoremReport, Phase, SpincSpinhReport, Step, Witness,
};

fn phase_label(p: Phase) -> &'static str {
    match p {
        Phase::NormalizeStart => "normalize start",
        Phase::Rewrite => "rewrite",
        Phase::NormalizeEnd => "normalize end",
    }
}

fn witness_text(w: &Witness) -> Option<String> {
    match w {
        Witness::None => None,
        Witness::Bundle(b) => Some(format!("bundle {b}")),
        Witness::Shift(k) => Some(format!("shift {k}")),
        Witness::Map(name) => Some(format!("map {name}")),
        Witness::Position(i) => Some(format!("position {i}")),
    }
}

fn step_line(index: usize, step: &Step) -> String {
    let mut line = format!(
        "{index:3}. ({}) {} @ factor {}",
        phase_label(step.phase),
        step.rule,
        step.position
    );
    if !step.note.is_empty() {
        let _ = write!(line, ": {}", step.note);
    }
    if let Some(w) = witness_text(&step.witness) {
        let _ = write!(line, " [witness: {w}]");
    }
    line
}

pub fn render_steps(steps: &[Step], out: &mut String) {
    if steps.is_empty() {
        out.push_str("  (no steps)\n");
        return;
    }
    for (i, step) in steps.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&step_line(i + 1, step));
        out.push('\n');
    }
}

pub fn render_certificate(cert: &Certificate, out: &mut String) {
    let _ = writeln!(out, "  start: {}", cert.start);
    let _ = writeln!(out, "  end:   {}", cert.end);
    render_steps(&cert.steps, out);
}

fn pass_line(pass: bool) -> &'static str {
    if pass {
        "result: PASS"
    } else {
        "result: FAIL"
    }
}

pub fn render_classify(
    expression: &str,
    bundle: &VirtualBundle,
    tag: &StructureTag,
    structure: Option<&(String, VirtualBundle)>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "expression: {expression}");
    let _ = writeln!(out, "base: {}", bundle.base());
    let _ = writeln!(out, "rank: {}", bundle.rank());
    let _ = writeln!(out, "w: {}", bundle.total_sw().total());
    let _ = writeln!(out, "w1: {}", tag.w1);
    let _ = writeln!(out, "w2: {}", tag.w2);
    let _ = writeln!(out, "w2 + w1^2: {}", tag.w2_plus_w1_sq);
    let _ = writeln!(out, "tags: {}", tag.tags().join(", "));
    match structure {
        Some((name, difference)) => {
            let _ = writeln!(
                out,
                "twist dictionary: {name} (difference from defining twist: {difference})"
            );
        }
        None => {
            let _ = writeln!(out, "twist dictionary: no match");
        }
    }
    out
}

pub fn render_lemma(report: &LemmaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lemma: {}", report.lemma);
    for (i, step) in report.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:3}. {}: {} = {}",
            i + 1,
            step.label,
            step.class,
            step.value
        );
    }
    let _ = writeln!(out, "{}", pass_line(report.pass));
    out
}

pub fn render_equiv(depth: i64, certificate: Option<&Certificate>) -> String {
    let mut out = String::new();
    match certificate {
        Some(cert) => {
            let _ = writeln!(out, "equivalence: found (search depth {depth})");
            render_certificate(cert, &mut out);
        }
        None => {
            let _ = writeln!(out, "equivalence: not found within depth {depth}");
        }
    }
    out
}

pub fn render_rewrite(input: &str, normal_form: &str, shift: i64, steps: &[Step]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input: {input}");
    let _ = writeln!(out, "normal form: {normal_form}");
    let _ = writeln!(out, "shift: {shift}");
    let _ = writeln!(out, "normalization steps:");
    render_steps(steps, &mut out);
    out
}

pub fn render_replay(accepted: bool, detail: &str) -> String {
    let mut out = String::new();
    if accepted {
        let _ = writeln!(out, "replay: accepted");
        let _ = writeln!(out, "normal form: {detail}");
    } else {
        let _ = writeln!(out, "replay: rejected");
        let _ = writeln!(out, "error: {detail}");
    }
    out
}

pub fn render_fibseq_body(fs: &FiberSequence, out: &mut String) {
    let _ = writeln!(out, "  fiber: {}", fs.fiber);
    let _ = writeln!(out, "  total: {}", fs.total);
    let _ = writeln!(out, "  base:  {}", fs.base);
    let _ = writeln!(out, "  provenance: {}", fs.provenance);
}

pub fn render_fibseq(fs: &FiberSequence) -> String {
    let mut out = String::from("fiber sequence:\n");
    render_fibseq_body(fs, &mut out);
    out
}

pub fn render_main_thm(report: &MainTheoremReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "main theorem: MTPinHminus is equivalent to MTSpinH smashed with the Thom spectrum of sigma - 1 over BZ2"
    );
    out.push('\n');
    let _ = writeln!(out, "smith fiber sequence:");
    render_fibseq_body(&report.fiber_sequence, &mut out);
    out.push('\n');
    let _ = writeln!(out, "equivalence certificate:");
    render_certificate(&report.certificate, &mut out);
    out.push('\n');
    let _ = writeln!(out, "crushed-form certificate:");
    render_certificate(&report.crush_certificate, &mut out);
    out.push('\n');
    let _ = writeln!(out, "splitting note: {}", report.splitting_note);
    let _ = writeln!(out, "conclusion: {}", report.conclusion);
    let _ = writeln!(out, "rewrite rule applications: {}", report.rule_applications);
    let _ = writeln!(out, "{}", pass_line(report.pass));
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_spinc_spinh(report: &SpincSpinhReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "spin^c / spin^h comparison via the smith fiber sequence over BSO3"
    );
    out.push('\n');
    let _ = writeln!(out, "smith fiber sequence:");
    render_fibseq_body(&report.fiber_sequence, &mut out);
    out.push('\n');
    let _ = writeln!(out, "fiber identification (Susp(3, MTSpinC)):");
    render_certificate(&report.fiber_certificate, &mut out);
    out.push('\n');
    let _ = writeln!(out, "total identification (Susp(3, MTSpinH)):");
    render_certificate(&report.total_certificate, &mut out);
    out.push('\n');
    let _ = writeln!(out, "base identification (Susp(6, MTSpin ^ Plus(BSO3))):");
    render_certificate(&report.base_certificate, &mut out);
    out.push('\n');
    let _ = writeln!(
        out,
        "base witness: {} (spin: {})",
        report.base_witness,
        yes_no(report.base_witness_spin)
    );
    let _ = writeln!(
        out,
        "fiber witness: {} (spin: {})",
        report.fiber_witness,
        yes_no(report.fiber_witness_spin)
    );
    let (f, t, b) = report.shifts;
    let _ = writeln!(out, "suspension shifts: fiber {f}, total {t}, base {b}");
    let _ = writeln!(out, "net shift after desuspension: {}", report.net_shift);
    let _ = writeln!(out, "{}", pass_line(report.pass));
    out
}

pub fn render_ranks(series: &PoincareSeries, theory_tag: &str, max_degree: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "theory: {theory_tag} (free ranks after inverting 2)");
    for d in 0..=max_degree.min(series.cutoff()) {
        let _ = writeln!(out, "deg {d:4}: {}", series.coefficient(d));
    }
    out
}

pub fn render_rank_equality(report: &RankEqualityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rank equality: spin^c vs spin^h bordism after inverting 2"
    );
    let _ = writeln!(
        out,
        "k_max: {} (degrees 4k up to {})",
        report.k_max,
        4 * report.k_max
    );
    for (k, r) in report.ranks.iter().enumerate() {
        let _ = writeln!(out, "deg {:4}: {r}", 4 * k);
    }
    let _ = writeln!(
        out,
        "series agree in every degree divisible by 4: {}",
        yes_no(report.series_agree)
    );
    let _ = writeln!(
        out,
        "random 4Z-supported series trials: {} (all pass: {})",
        report.random_trials,
        yes_no(report.random_trials_pass)
    );
    let _ = writeln!(out, "{}", pass_line(report.pass));
    out
}

pub fn render_les_check(report: &ForcedIsoReport, labels: &(String, String, String)) -> String {
    let mut out = String::new();
    let (a, b, c) = labels;
    let _ = writeln!(
        out,
        "long exact sequence ... -> A_n -> B_n -> C_(n-{s}) -> A_(n-1) -> ... with A = {a}, B = {b}, C = {c}",
        s = report.shift
    );
    let _ = writeln!(out, "forced isomorphisms:");
    if report.statements.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for (i, statement) in report.statements.iter().enumerate() {
        let _ = writeln!(out, "{:3}. {statement}", i + 1);
    }
    if report.withheld.is_empty() {
        let _ = writeln!(out, "withheld degrees: (none)");
    } else {
        let list = report
            .withheld
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "withheld degrees: {list}");
    }
    let _ = writeln!(
        out,
        "all requested degrees forced: {}",
        yes_no(report.all_forced)
    );
    out
}

pub fn render_catalog(entries: &[CatalogEntry], verdicts: &[String]) -> String {
    let mut out = String::from("group catalog:\n");
    for e in entries {
        let _ = writeln!(
            out,
            "  {} (degree {}): {} — {}",
            e.name, e.degree, e.group, e.description
        );
        let _ = writeln!(out, "      [{}]", e.citation);
    }
    let _ = writeln!(out, "verdicts:");
    if verdicts.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for v in verdicts {
        let _ = writeln!(out, "  - {v}");
    }
    out
}
