//! Degree-truncated graded polynomial rings over the field with two elements.
//!
//! An element is a finite set of monomials, each with coefficient 1; addition
//! is symmetric difference of the sets, so x + x = 0 holds structurally and no
//! coefficient bookkeeping exists anywhere. Every ring carries a truncation
//! degree; products drop monomials above it, and all graded pieces below it
//! are exact.
//!
//! The module also provides unit power series (total characteristic classes),
//! their formal inverses, substitution homomorphisms (pullbacks on
//! cohomology), and Künneth products of rings.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// Recoverable errors from ring arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    /// Operands belong to different rings.
    IncompatibleRings,
    /// The degree-0 term of a would-be unit series is not 1.
    NotAUnit,
    /// A substitution image is missing, inhomogeneous, or of the wrong degree,
    /// or the target ring truncates below the source.
    HomDegreeMismatch,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::IncompatibleRings => f.write_str("incompatible rings"),
            AlgebraError::NotAUnit => f.write_str("not a unit"),
            AlgebraError::HomDegreeMismatch => f.write_str("degree mismatch in homomorphism"),
        }
    }
}

/// A graded polynomial ring over F2: named generators with positive degrees,
/// plus the truncation degree above which monomials are discarded.
///
/// Rings are shared behind [`Ring`] (an `Arc`); equality and ordering compare
/// contents, not pointers, so two independently built copies of the same ring
/// are interchangeable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RingSpec {
    generators: Vec<(String, u32)>,
    truncation: u32,
}

pub type Ring = Arc<RingSpec>;

impl RingSpec {
    /// Build a ring. Panics if names repeat, any degree is 0, or the
    /// truncation is 0: rings come from the built-in catalog or from Künneth
    /// products of it, so a violation is a caller bug, not runtime input.
    pub fn new(generators: &[(&str, u32)], truncation: u32) -> Ring {
        assert!(truncation >= 1, "truncation must be at least 1");
        let mut seen = BTreeSet::new();
        for (name, degree) in generators {
            assert!(*degree >= 1, "generator degree must be at least 1");
            assert!(!name.is_empty(), "generator names must be nonempty");
            assert!(seen.insert(*name), "duplicate generator name {name:?}");
        }
        Arc::new(RingSpec {
            generators: generators
                .iter()
                .map(|(n, d)| ((*n).to_owned(), *d))
                .collect(),
            truncation,
        })
    }

    pub(crate) fn from_owned(generators: Vec<(String, u32)>, truncation: u32) -> Ring {
        let borrowed: Vec<(&str, u32)> = generators
            .iter()
            .map(|(n, d)| (n.as_str(), *d))
            .collect();
        RingSpec::new(&borrowed, truncation)
    }

    /// The ring with no generators (cohomology of a point).
    pub fn trivial(truncation: u32) -> Ring {
        RingSpec::new(&[], truncation)
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, u32)> {
        self.generators.iter().map(|(n, d)| (n.as_str(), *d))
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|(n, _)| n == name)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("F2[")?;
        for (i, (name, _)) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(name)?;
        }
        write!(f, "] (deg <= {})", self.truncation)
    }
}

/// Sparse exponent vector: (generator index, exponent > 0), sorted by index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    fn one() -> Monomial {
        Monomial(Vec::new())
    }

    fn degree(&self, ring: &RingSpec) -> u32 {
        self.0
            .iter()
            .map(|&(i, e)| ring.generators[i].1 * e)
            .sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ia, ea)), Some(&&(ib, eb))) => {
                    if ia < ib {
                        out.push((ia, ea));
                        a.next();
                    } else if ib < ia {
                        out.push((ib, eb));
                        b.next();
                    } else {
                        out.push((ia, ea + eb));
                        a.next();
                        b.next();
                    }
                }
                (Some(_), None) => {
                    out.extend(a.by_ref().copied());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b.by_ref().copied());
                    break;
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// Dense exponent row used only for the display ordering.
    fn dense(&self, n: usize) -> Vec<u32> {
        let mut row = alloc::vec![0u32; n];
        for &(i, e) in &self.0 {
            row[i] = e;
        }
        row
    }
}

/// A polynomial over F2: a set of monomials with coefficient 1 in a fixed
/// ring. The empty set is zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct F2Element {
    ring: Ring,
    monomials: BTreeSet<Monomial>,
}

impl F2Element {
    pub fn zero(ring: &Ring) -> F2Element {
        F2Element {
            ring: ring.clone(),
            monomials: BTreeSet::new(),
        }
    }

    pub fn one(ring: &Ring) -> F2Element {
        let mut monomials = BTreeSet::new();
        monomials.insert(Monomial::one());
        F2Element {
            ring: ring.clone(),
            monomials,
        }
    }

    /// The named generator, or `None` if the ring has no such generator.
    pub fn generator(ring: &Ring, name: &str) -> Option<F2Element> {
        F2Element::monomial(ring, &[(name, 1)])
    }

    /// A single monomial from (name, exponent) pairs. `None` on unknown
    /// names; monomials beyond the truncation degree collapse to zero.
    pub fn monomial(ring: &Ring, powers: &[(&str, u32)]) -> Option<F2Element> {
        let mut exps: Vec<(usize, u32)> = Vec::new();
        for (name, e) in powers {
            if *e == 0 {
                continue;
            }
            let i = ring.index_of(name)?;
            match exps.iter_mut().find(|(j, _)| *j == i) {
                Some((_, acc)) => *acc += e,
                None => exps.push((i, *e)),
            }
        }
        exps.sort_unstable();
        let m = Monomial(exps);
        let mut out = F2Element::zero(ring);
        if m.degree(ring) <= ring.truncation {
            out.monomials.insert(m);
        }
        Some(out)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.monomials.len() == 1 && self.monomials.contains(&Monomial::one())
    }

    pub fn term_count(&self) -> usize {
        self.monomials.len()
    }

    /// Degrees in which this element has at least one monomial.
    pub fn support_degrees(&self) -> BTreeSet<u32> {
        self.monomials.iter().map(|m| m.degree(&self.ring)).collect()
    }

    /// Zero is homogeneous of every degree; otherwise all monomials must sit
    /// in degree `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.monomials.iter().all(|m| m.degree(&self.ring) == d)
    }

    /// The sum of the monomials of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> F2Element {
        F2Element {
            ring: self.ring.clone(),
            monomials: self
                .monomials
                .iter()
                .filter(|m| m.degree(&self.ring) == d)
                .cloned()
                .collect(),
        }
    }

    fn toggle(&mut self, m: Monomial) {
        // Symmetric-difference insert: coefficients live in F2.
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    pub fn add(&self, other: &F2Element) -> Result<F2Element, AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::IncompatibleRings);
        }
        let mut out = self.clone();
        for m in &other.monomials {
            out.toggle(m.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &F2Element) -> Result<F2Element, AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::IncompatibleRings);
        }
        let trunc = self.ring.truncation;
        let mut out = F2Element::zero(&self.ring);
        for a in &self.monomials {
            let da = a.degree(&self.ring);
            for b in &other.monomials {
                if da + b.degree(&self.ring) > trunc {
                    continue;
                }
                // Distinct (a, b) pairs can land on the same product
                // monomial, so this must toggle, not insert.
                out.toggle(a.mul(b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> F2Element {
        let mut out = F2Element::one(&self.ring);
        for _ in 0..k {
            out = out.mul(self).expect("same ring");
        }
        out
    }

    /// Monomials in display order: degree ascending, then descending
    /// lexicographic on the dense exponent vector (powers of earlier
    /// generators first), so e.g. `a^2 + w2bar`.
    fn display_order(&self) -> Vec<&Monomial> {
        let n = self.ring.generator_count();
        let mut ms: Vec<&Monomial> = self.monomials.iter().collect();
        ms.sort_by(|x, y| {
            let (dx, dy) = (x.degree(&self.ring), y.degree(&self.ring));
            dx.cmp(&dy).then_with(|| y.dense(n).cmp(&x.dense(n)))
        });
        ms
    }
}

impl fmt::Display for F2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, m) in self.display_order().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.0.is_empty() {
                f.write_str("1")?;
                continue;
            }
            for (j, &(gi, e)) in m.0.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                f.write_str(&self.ring.generators[gi].0)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Invert an element whose degree-0 term is 1, degree by degree:
/// v_0 = 1 and v_d = sum_{i=1..d} u_i * v_{d-i} (signs are trivial over F2).
pub fn invert_unit(u: &F2Element) -> Result<F2Element, AlgebraError> {
    if !u.homogeneous_part(0).is_one() {
        return Err(AlgebraError::NotAUnit);
    }
    let ring = u.ring.clone();
    let trunc = ring.truncation;
    let mut v_parts: Vec<F2Element> = alloc::vec![F2Element::one(&ring)];
    for d in 1..=trunc {
        let mut vd = F2Element::zero(&ring);
        for i in 1..=d {
            let term = u
                .homogeneous_part(i)
                .mul(&v_parts[(d - i) as usize])
                .expect("same ring");
            vd = vd.add(&term).expect("same ring");
        }
        v_parts.push(vd);
    }
    let mut out = F2Element::zero(&ring);
    for part in v_parts {
        out = out.add(&part).expect("same ring");
    }
    Ok(out)
}

/// A unit power series: total element with degree-0 term 1. Total
/// Stiefel-Whitney classes live here.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnitSeries {
    total: F2Element,
}

impl UnitSeries {
    pub fn one(ring: &Ring) -> UnitSeries {
        UnitSeries {
            total: F2Element::one(ring),
        }
    }

    pub fn from_total(total: F2Element) -> Result<UnitSeries, AlgebraError> {
        if !total.homogeneous_part(0).is_one() {
            return Err(AlgebraError::NotAUnit);
        }
        Ok(UnitSeries { total })
    }

    pub fn total(&self) -> &F2Element {
        &self.total
    }

    pub fn ring(&self) -> &Ring {
        self.total.ring()
    }

    /// The homogeneous component in degree `d` (the degree-`d` class).
    pub fn component(&self, d: u32) -> F2Element {
        self.total.homogeneous_part(d)
    }

    pub fn mul(&self, other: &UnitSeries) -> Result<UnitSeries, AlgebraError> {
        Ok(UnitSeries {
            total: self.total.mul(&other.total)?,
        })
    }

    /// Formal inverse; exact in every degree up to the truncation.
    pub fn invert(&self) -> UnitSeries {
        UnitSeries {
            total: invert_unit(&self.total).expect("degree-0 term is 1 by construction"),
        }
    }
}

impl fmt::Display for UnitSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.total, f)
    }
}

/// A ring homomorphism given by generator substitution. Contravariant data
/// for maps of spaces: `source` is the domain ring of the substitution.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RingHom {
    source: Ring,
    target: Ring,
    images: Vec<F2Element>,
}

impl RingHom {
    /// Every generator of `source` must get an image in `target`,
    /// homogeneous of the generator's degree (zero counts, being homogeneous
    /// of every degree), and `target` must not truncate below `source`.
    pub fn new(
        source: &Ring,
        target: &Ring,
        images: &[(&str, F2Element)],
    ) -> Result<RingHom, AlgebraError> {
        if target.truncation() < source.truncation() {
            return Err(AlgebraError::HomDegreeMismatch);
        }
        let mut by_index: Vec<Option<F2Element>> =
            alloc::vec![None; source.generator_count()];
        for (name, image) in images {
            let i = source
                .index_of(name)
                .ok_or(AlgebraError::HomDegreeMismatch)?;
            if image.ring() != target {
                return Err(AlgebraError::IncompatibleRings);
            }
            by_index[i] = Some(image.clone());
        }
        let mut resolved = Vec::with_capacity(by_index.len());
        for (slot, (_, degree)) in by_index.into_iter().zip(source.generators()) {
            let image = slot.ok_or(AlgebraError::HomDegreeMismatch)?;
            if !image.is_homogeneous_of(degree) {
                return Err(AlgebraError::HomDegreeMismatch);
            }
            resolved.push(image);
        }
        Ok(RingHom {
            source: source.clone(),
            target: target.clone(),
            images: resolved,
        })
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn image_of(&self, name: &str) -> Option<&F2Element> {
        self.source.index_of(name).map(|i| &self.images[i])
    }

    /// Substitution applied monomial-wise; additive and multiplicative.
    pub fn apply(&self, x: &F2Element) -> Result<F2Element, AlgebraError> {
        if x.ring() != &self.source {
            return Err(AlgebraError::IncompatibleRings);
        }
        let mut out = F2Element::zero(&self.target);
        for m in &x.monomials {
            let mut term = F2Element::one(&self.target);
            for &(i, e) in &m.0 {
                term = term.mul(&self.images[i].pow(e)).expect("same ring");
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term).expect("same ring");
        }
        Ok(out)
    }
}

/// Deterministic name allocation: keep the requested name, appending `'`
/// while it collides with one already taken.
pub(crate) fn allocate_names(requested: &[(String, u32)]) -> Vec<(String, u32)> {
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::with_capacity(requested.len());
    for (name, degree) in requested {
        let mut candidate = name.clone();
        while used.contains(&candidate) {
            candidate.push('\'');
        }
        used.insert(candidate.clone());
        out.push((candidate, *degree));
    }
    out
}

/// Künneth product of rings: union of the generators (right-hand names get a
/// `'` suffix on collision), truncation the minimum of the two.
pub fn kunneth(r1: &Ring, r2: &Ring) -> Ring {
    let requested: Vec<(String, u32)> = r1
        .generators()
        .chain(r2.generators())
        .map(|(n, d)| (n.to_owned(), d))
        .collect();
    RingSpec::from_owned(
        allocate_names(&requested),
        r1.truncation().min(r2.truncation()),
    )
}
