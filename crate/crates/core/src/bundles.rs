//! Virtual vector bundles over a catalog of classifying spaces.
//!
//! The space catalog is small and fixed: BZ/2, BU_1, BSU_2 (with HP-infinity
//! as an alias carrying the same cohomology), BSO_n, BO_n, the point, and
//! finite products of these. Each space knows its mod-2 cohomology ring; a
//! bundle is a base space, an integer virtual rank, and a total
//! Stiefel-Whitney class. Whitney sums multiply total classes, formal
//! negatives invert them, pullbacks substitute generators.
//!
//! On top of the arithmetic sit the structure classifiers: vanishing of w_1,
//! w_2, and w_2 + w_1^2 decides orientability, spin, and the two pin flavors,
//! and the twist dictionary recognizes which named tangential structure a
//! given (base, twist) pair presents, up to spin difference.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::f2algebra::{
    allocate_names, AlgebraError, F2Element, Ring, RingHom, RingSpec, UnitSeries,
};

/// Default truncation degree. Every verification in this crate needs degree
/// at most 6; 16 leaves room for property tests.
pub const DEFAULT_TRUNCATION: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleError {
    Algebra(AlgebraError),
    /// The operation needs its operands over one base (or a map whose target
    /// matches the bundle's base).
    BaseMismatch,
    /// tensor_line was fed a virtual bundle of negative rank, or a non-line
    /// second argument.
    NotGenuine,
}

impl From<AlgebraError> for BundleError {
    fn from(e: AlgebraError) -> BundleError {
        BundleError::Algebra(e)
    }
}

impl fmt::Display for BundleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleError::Algebra(e) => fmt::Display::fmt(e, f),
            BundleError::BaseMismatch => f.write_str("base mismatch"),
            BundleError::NotGenuine => f.write_str("tensor_line requires a genuine bundle"),
        }
    }
}

/// One indecomposable catalog space. The variant order is the canonical
/// factor order inside products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpaceFactor {
    BZ2,
    BU1,
    BSU2,
    /// Same cohomology as BSU2 in the range we model; kept distinct so
    /// reports can say "HP^inf".
    HPInf,
    BSO(u8),
    BO(u8),
}

impl SpaceFactor {
    fn is_valid(self) -> bool {
        match self {
            SpaceFactor::BSO(n) => n >= 2,
            SpaceFactor::BO(n) => n >= 1,
            _ => true,
        }
    }

    /// Preferred generator names for this factor's cohomology, before any
    /// collision renaming: F2[a], F2[c] with |c|=2, F2[e] with |e|=4,
    /// F2[w2bar..wnbar], F2[w1..wn].
    fn base_generators(self) -> Vec<(String, u32)> {
        match self {
            SpaceFactor::BZ2 => vec![("a".to_string(), 1)],
            SpaceFactor::BU1 => vec![("c".to_string(), 2)],
            SpaceFactor::BSU2 | SpaceFactor::HPInf => vec![("e".to_string(), 4)],
            SpaceFactor::BSO(n) => (2..=u32::from(n)).map(|i| (format!("w{i}bar"), i)).collect(),
            SpaceFactor::BO(n) => (1..=u32::from(n)).map(|i| (format!("w{i}"), i)).collect(),
        }
    }

    pub fn name(self) -> String {
        match self {
            SpaceFactor::BZ2 => "BZ2".to_string(),
            SpaceFactor::BU1 => "BU1".to_string(),
            SpaceFactor::BSU2 => "BSU2".to_string(),
            SpaceFactor::HPInf => "HPinf".to_string(),
            SpaceFactor::BSO(n) => format!("BSO{n}"),
            SpaceFactor::BO(n) => format!("BO{n}"),
        }
    }
}

/// A finite product of catalog factors in canonical order; the empty product
/// is the point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Space {
    factors: Vec<SpaceFactor>,
}

impl Space {
    pub fn from_factors(mut factors: Vec<SpaceFactor>) -> Space {
        assert!(
            factors.iter().all(|f| f.is_valid()),
            "BSO_n needs n >= 2, BO_n needs n >= 1"
        );
        factors.sort(); // stable, so equal factors keep their relative order
        Space { factors }
    }

    pub fn point() -> Space {
        Space { factors: vec![] }
    }

    pub fn bz2() -> Space {
        Space::from_factors(vec![SpaceFactor::BZ2])
    }

    pub fn bu1() -> Space {
        Space::from_factors(vec![SpaceFactor::BU1])
    }

    pub fn bsu2() -> Space {
        Space::from_factors(vec![SpaceFactor::BSU2])
    }

    pub fn hpinf() -> Space {
        Space::from_factors(vec![SpaceFactor::HPInf])
    }

    pub fn bso(n: u8) -> Space {
        Space::from_factors(vec![SpaceFactor::BSO(n)])
    }

    pub fn bo(n: u8) -> Space {
        Space::from_factors(vec![SpaceFactor::BO(n)])
    }

    pub fn product(&self, other: &Space) -> Space {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().copied());
        Space::from_factors(factors)
    }

    pub fn factors(&self) -> &[SpaceFactor] {
        &self.factors
    }

    pub fn is_point(&self) -> bool {
        self.factors.is_empty()
    }

    /// Mod-2 cohomology: the Künneth product of the factors' rings, with
    /// deterministic `'`-suffix renaming on generator collisions.
    pub fn cohomology(&self, truncation: u32) -> Ring {
        self.layout(truncation).ring
    }

    /// The cohomology ring together with its generator names grouped by
    /// factor occurrence (the data needed to build inclusions/projections).
    pub(crate) fn layout(&self, truncation: u32) -> Layout {
        let requested: Vec<(String, u32)> = self
            .factors
            .iter()
            .flat_map(|f| f.base_generators())
            .collect();
        let allocated = allocate_names(&requested);
        let ring = RingSpec::from_owned(allocated.clone(), truncation);
        let mut per_factor = Vec::with_capacity(self.factors.len());
        let mut cursor = allocated.into_iter().map(|(n, _)| n);
        for f in &self.factors {
            per_factor.push(cursor.by_ref().take(f.base_generators().len()).collect());
        }
        Layout { ring, per_factor }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("Point");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            f.write_str(&factor.name())?;
        }
        Ok(())
    }
}

pub(crate) struct Layout {
    pub ring: Ring,
    /// Final generator names per factor occurrence, in factor order.
    pub per_factor: Vec<Vec<String>>,
}

/// A virtual vector bundle: base, integer rank (possibly negative), total
/// Stiefel-Whitney class. Rank-0 bundles with nontrivial classes are allowed;
/// nothing here assumes geometric realizability.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct VirtualBundle {
    base: Space,
    rank: i64,
    total_sw: UnitSeries,
}

impl VirtualBundle {
    /// Assemble from parts; the class must live in the base's cohomology at
    /// its own truncation.
    pub fn from_parts(
        base: Space,
        rank: i64,
        total_sw: UnitSeries,
    ) -> Result<VirtualBundle, BundleError> {
        let trunc = total_sw.ring().truncation();
        if **total_sw.ring() != *base.cohomology(trunc) {
            return Err(BundleError::BaseMismatch);
        }
        Ok(VirtualBundle {
            base,
            rank,
            total_sw,
        })
    }

    /// R^rank: trivial class.
    pub fn trivial(base: &Space, rank: i64, truncation: u32) -> VirtualBundle {
        VirtualBundle {
            base: base.clone(),
            rank,
            total_sw: UnitSeries::one(&base.cohomology(truncation)),
        }
    }

    pub fn zero(base: &Space, truncation: u32) -> VirtualBundle {
        VirtualBundle::trivial(base, 0, truncation)
    }

    pub fn base(&self) -> &Space {
        &self.base
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn total_sw(&self) -> &UnitSeries {
        &self.total_sw
    }

    pub fn truncation(&self) -> u32 {
        self.total_sw.ring().truncation()
    }

    /// w_i of this bundle.
    pub fn w(&self, i: u32) -> F2Element {
        self.total_sw.component(i)
    }

    /// Whitney sum. Same base: ranks add, classes multiply. Different bases:
    /// both lift to the product base first (the external sum).
    pub fn sum(&self, other: &VirtualBundle) -> Result<VirtualBundle, BundleError> {
        if self.base == other.base {
            if self.truncation() != other.truncation() {
                return Err(AlgebraError::IncompatibleRings.into());
            }
            Ok(VirtualBundle {
                base: self.base.clone(),
                rank: self.rank + other.rank,
                total_sw: self.total_sw.mul(&other.total_sw)?,
            })
        } else {
            self.external_sum(other)
        }
    }

    /// External sum: always over the product base, even when both operands
    /// share a base (sigma [+] sigma lives over BZ2 x BZ2).
    pub fn external_sum(&self, other: &VirtualBundle) -> Result<VirtualBundle, BundleError> {
        let (a, b) = lift_to_product(self, other)?;
        a.sum(&b)
    }

    /// Formal negative: rank flips sign, the total class is the formal
    /// inverse. In particular w_1(-E) = w_1(E) and w_2(-E) = w_2(E) + w_1(E)^2.
    pub fn negate(&self) -> VirtualBundle {
        let inv = self.total_sw.invert();
        // The stated closed forms in degrees 1 and 2 are how the inverse is
        // consumed downstream; keep them checked.
        let w1 = self.w(1);
        let w2 = self.w(2);
        debug_assert_eq!(inv.component(1), w1);
        debug_assert_eq!(
            inv.component(2),
            w2.add(&w1.mul(&w1).expect("same ring")).expect("same ring")
        );
        VirtualBundle {
            base: self.base.clone(),
            rank: -self.rank,
            total_sw: inv,
        }
    }
}

impl fmt::Display for VirtualBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank {} over {}, w = {}",
            self.rank, self.base, self.total_sw
        )
    }
}

/// sigma -> BZ2: the tautological line, w = 1 + a.
pub fn sigma(truncation: u32) -> VirtualBundle {
    let base = Space::bz2();
    let ring = base.cohomology(truncation);
    let total = F2Element::one(&ring)
        .add(&F2Element::generator(&ring, "a").expect("catalog generator"))
        .expect("same ring");
    VirtualBundle {
        base,
        rank: 1,
        total_sw: UnitSeries::from_total(total).expect("unit"),
    }
}

/// V_{O_n} -> BO_n: tautological, w = 1 + w1 + ... + wn.
pub fn v_o(n: u8, truncation: u32) -> VirtualBundle {
    let base = Space::bo(n);
    let ring = base.cohomology(truncation);
    let mut total = F2Element::one(&ring);
    for i in 1..=u32::from(n) {
        let gen = F2Element::generator(&ring, &format!("w{i}")).expect("catalog generator");
        total = total.add(&gen).expect("same ring");
    }
    VirtualBundle {
        base,
        rank: i64::from(n),
        total_sw: UnitSeries::from_total(total).expect("unit"),
    }
}

/// V_{SO_n} -> BSO_n: tautological oriented, w = 1 + w2bar + ... + wnbar.
pub fn v_so(n: u8, truncation: u32) -> VirtualBundle {
    let base = Space::bso(n);
    let ring = base.cohomology(truncation);
    let mut total = F2Element::one(&ring);
    for i in 2..=u32::from(n) {
        let gen = F2Element::generator(&ring, &format!("w{i}bar")).expect("catalog generator");
        total = total.add(&gen).expect("same ring");
    }
    VirtualBundle {
        base,
        rank: i64::from(n),
        total_sw: UnitSeries::from_total(total).expect("unit"),
    }
}

/// V_{U_1} -> BU_1: the tautological complex line as a rank-2 real bundle,
/// w = 1 + c (c is the mod-2 reduction of c_1).
pub fn v_u1(truncation: u32) -> VirtualBundle {
    let base = Space::bu1();
    let ring = base.cohomology(truncation);
    let total = F2Element::one(&ring)
        .add(&F2Element::generator(&ring, "c").expect("catalog generator"))
        .expect("same ring");
    VirtualBundle {
        base,
        rank: 2,
        total_sw: UnitSeries::from_total(total).expect("unit"),
    }
}

/// V_{SU_2} -> BSU_2: the tautological quaternionic line as a rank-4 real
/// bundle, w = 1 + e.
pub fn v_su2(truncation: u32) -> VirtualBundle {
    let base = Space::bsu2();
    let ring = base.cohomology(truncation);
    let total = F2Element::one(&ring)
        .add(&F2Element::generator(&ring, "e").expect("catalog generator"))
        .expect("same ring");
    VirtualBundle {
        base,
        rank: 4,
        total_sw: UnitSeries::from_total(total).expect("unit"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Lift two bundles to their product base. The merged factor list is the
/// stable sort of (left factors, then right factors), so the result's base
/// equals `a.base().product(b.base())` and generator naming matches
/// `Space::cohomology` exactly.
fn lift_to_product(
    a: &VirtualBundle,
    b: &VirtualBundle,
) -> Result<(VirtualBundle, VirtualBundle), BundleError> {
    let trunc = a.truncation();
    if trunc != b.truncation() {
        return Err(AlgebraError::IncompatibleRings.into());
    }
    let mut items: Vec<(SpaceFactor, Side, usize)> = a
        .base
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| (*f, Side::Left, i))
        .chain(
            b.base
                .factors
                .iter()
                .enumerate()
                .map(|(i, f)| (*f, Side::Right, i)),
        )
        .collect();
    items.sort_by_key(|(f, _, _)| *f);
    let product = Space {
        factors: items.iter().map(|(f, _, _)| *f).collect(),
    };
    let layout = product.layout(trunc);

    let lift_one = |bundle: &VirtualBundle, side: Side| -> Result<VirtualBundle, BundleError> {
        let src_layout = bundle.base.layout(trunc);
        let mut images: Vec<(&str, F2Element)> = Vec::new();
        for (k, (_, s, i)) in items.iter().enumerate() {
            if *s != side {
                continue;
            }
            for (src_name, prod_name) in src_layout.per_factor[*i]
                .iter()
                .zip(layout.per_factor[k].iter())
            {
                let image =
                    F2Element::generator(&layout.ring, prod_name).expect("product generator");
                images.push((src_name.as_str(), image));
            }
        }
        let hom = RingHom::new(&src_layout.ring, &layout.ring, &images)?;
        Ok(VirtualBundle {
            base: product.clone(),
            rank: bundle.rank,
            total_sw: UnitSeries::from_total(hom.apply(bundle.total_sw.total())?)
                .expect("units map to units"),
        })
    };

    Ok((lift_one(a, Side::Left)?, lift_one(b, Side::Right)?))
}

/// Split a bundle over a product base into (first factor, remaining product)
/// pieces by killing the other side's generators. Returns `None` when the
/// base has fewer than two factors or the class is not a product of
/// factor-wise classes. The first piece takes rank 0, the second the whole
/// rank; callers in normal form only ever split rank-0 twists.
pub fn split_first_factor(
    bundle: &VirtualBundle,
) -> Option<(VirtualBundle, VirtualBundle)> {
    let (left, right) = split_pieces(bundle)?;
    // Side condition: the external sum of the pieces must reproduce the
    // original class exactly.
    let recombined = left.external_sum(&right).ok()?;
    if recombined.total_sw == bundle.total_sw {
        Some((left, right))
    } else {
        None
    }
}

/// The projection half of `split_first_factor`: kill the complementary
/// generators to get candidate factor-wise pieces, without checking that
/// they recombine to the original class.
pub(crate) fn split_pieces(bundle: &VirtualBundle) -> Option<(VirtualBundle, VirtualBundle)> {
    if bundle.base.factors.len() < 2 {
        return None;
    }
    let trunc = bundle.truncation();
    let left_space = Space {
        factors: vec![bundle.base.factors[0]],
    };
    let right_space = Space {
        factors: bundle.base.factors[1..].to_vec(),
    };
    let layout = bundle.base.layout(trunc);
    let left_layout = left_space.layout(trunc);
    let right_layout = right_space.layout(trunc);

    let project = |keep_first: bool, dst: &Layout| -> Option<F2Element> {
        let mut images: Vec<(&str, F2Element)> = Vec::new();
        for (k, names) in layout.per_factor.iter().enumerate() {
            let kept = if keep_first { k == 0 } else { k > 0 };
            for (j, name) in names.iter().enumerate() {
                let image = if kept {
                    let dst_names = if keep_first {
                        &dst.per_factor[0]
                    } else {
                        &dst.per_factor[k - 1]
                    };
                    F2Element::generator(&dst.ring, &dst_names[j]).expect("factor generator")
                } else {
                    F2Element::zero(&dst.ring)
                };
                images.push((name.as_str(), image));
            }
        }
        let hom = RingHom::new(&layout.ring, &dst.ring, &images).ok()?;
        hom.apply(bundle.total_sw.total()).ok()
    };

    let left_total = project(true, &left_layout)?;
    let right_total = project(false, &right_layout)?;
    let left = VirtualBundle {
        base: left_space,
        rank: 0,
        total_sw: UnitSeries::from_total(left_total).ok()?,
    };
    let right = VirtualBundle {
        base: right_space,
        rank: bundle.rank,
        total_sw: UnitSeries::from_total(right_total).ok()?,
    };
    Some((left, right))
}

/// A map of catalog spaces, carried contravariantly as the substitution
/// H^*(target) -> H^*(source).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NamedMap {
    name: String,
    source: Space,
    target: Space,
    hom: RingHom,
}

impl NamedMap {
    pub fn new(
        name: &str,
        source: Space,
        target: Space,
        truncation: u32,
        images: &[(&str, F2Element)],
    ) -> Result<NamedMap, BundleError> {
        let hom = RingHom::new(
            &target.cohomology(truncation),
            &source.cohomology(truncation),
            images,
        )?;
        Ok(NamedMap {
            name: name.to_string(),
            source,
            target,
            hom,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn hom(&self) -> &RingHom {
        &self.hom
    }
}

/// Pull a bundle over `map.target` back along the map.
pub fn pullback(map: &NamedMap, e: &VirtualBundle) -> Result<VirtualBundle, BundleError> {
    if e.base != map.target || e.total_sw.ring() != map.hom.source() {
        return Err(BundleError::BaseMismatch);
    }
    Ok(VirtualBundle {
        base: map.source.clone(),
        rank: e.rank,
        total_sw: UnitSeries::from_total(map.hom.apply(e.total_sw.total())?)
            .expect("units map to units"),
    })
}

/// The catalog maps.
pub mod maps {
    use super::*;

    /// phi: BZ2 x BSO3 -> BO3, the isomorphism O3 = SO3 x Z/2 on classifying
    /// spaces. phi^*(w1) = a, phi^*(w2) = a^2 + w2bar,
    /// phi^*(w3) = w3bar + a*w2bar + a^3.
    pub fn phi(truncation: u32) -> NamedMap {
        let source = Space::bz2().product(&Space::bso(3));
        let ring = source.cohomology(truncation);
        let a = F2Element::generator(&ring, "a").expect("a");
        let w2bar = F2Element::generator(&ring, "w2bar").expect("w2bar");
        let w3bar = F2Element::generator(&ring, "w3bar").expect("w3bar");
        let w2_img = a.pow(2).add(&w2bar).expect("same ring");
        let w3_img = w3bar
            .add(&a.mul(&w2bar).expect("same ring"))
            .expect("same ring")
            .add(&a.pow(3))
            .expect("same ring");
        NamedMap::new(
            "phi",
            source,
            Space::bo(3),
            truncation,
            &[("w1", a), ("w2", w2_img), ("w3", w3_img)],
        )
        .expect("catalog map is well-formed")
    }

    /// phi^{-1}: BO3 -> BZ2 x BSO3. Inverse substitution of `phi`:
    /// a -> w1, w2bar -> w2 + w1^2, w3bar -> w3 + w1*w2.
    pub fn phi_inverse(truncation: u32) -> NamedMap {
        let target = Space::bz2().product(&Space::bso(3));
        let ring = Space::bo(3).cohomology(truncation);
        let w1 = F2Element::generator(&ring, "w1").expect("w1");
        let w2 = F2Element::generator(&ring, "w2").expect("w2");
        let w3 = F2Element::generator(&ring, "w3").expect("w3");
        let w2bar_img = w2.add(&w1.pow(2)).expect("same ring");
        let w3bar_img = w3.add(&w1.mul(&w2).expect("same ring")).expect("same ring");
        NamedMap::new(
            "phi^{-1}",
            Space::bo(3),
            target,
            truncation,
            &[("a", w1), ("w2bar", w2bar_img), ("w3bar", w3bar_img)],
        )
        .expect("catalog map is well-formed")
    }

    /// i1: BSO3 -> BO3 from SO3 into O3: w1 -> 0, w2 -> w2bar, w3 -> w3bar.
    pub fn i1(truncation: u32) -> NamedMap {
        let source = Space::bso(3);
        let ring = source.cohomology(truncation);
        NamedMap::new(
            "i1",
            source.clone(),
            Space::bo(3),
            truncation,
            &[
                ("w1", F2Element::zero(&ring)),
                ("w2", F2Element::generator(&ring, "w2bar").expect("w2bar")),
                ("w3", F2Element::generator(&ring, "w3bar").expect("w3bar")),
            ],
        )
        .expect("catalog map is well-formed")
    }

    /// i2: BZ2 -> BO3 from the inversion Z/2 in O3; i2^* V_O3 = 3 sigma, so
    /// w_k maps to the elementary symmetric polynomial e_k(a, a, a):
    /// w1 -> a, w2 -> a^2, w3 -> a^3.
    pub fn i2(truncation: u32) -> NamedMap {
        let source = Space::bz2();
        let ring = source.cohomology(truncation);
        let a = F2Element::generator(&ring, "a").expect("a");
        NamedMap::new(
            "i2",
            source.clone(),
            Space::bo(3),
            truncation,
            &[("w1", a.clone()), ("w2", a.pow(2)), ("w3", a.pow(3))],
        )
        .expect("catalog map is well-formed")
    }

    /// p: BU1 -> BSO3 from U1 = SO2 inside SO3: w2bar -> c, w3bar -> 0.
    pub fn p(truncation: u32) -> NamedMap {
        let source = Space::bu1();
        let ring = source.cohomology(truncation);
        NamedMap::new(
            "p",
            source.clone(),
            Space::bso(3),
            truncation,
            &[
                ("w2bar", F2Element::generator(&ring, "c").expect("c")),
                ("w3bar", F2Element::zero(&ring)),
            ],
        )
        .expect("catalog map is well-formed")
    }

    /// The identity map of any catalog space.
    pub fn identity(space: &Space, truncation: u32) -> NamedMap {
        let ring = space.cohomology(truncation);
        let images: Vec<(&str, F2Element)> = ring
            .generators()
            .map(|(n, _)| (n, F2Element::generator(&ring, n).expect("generator")))
            .collect();
        NamedMap::new("id", space.clone(), space.clone(), truncation, &images)
            .expect("catalog map is well-formed")
    }
}

/// C(m, j) mod 2 by Lucas: odd exactly when j is a submask of m.
fn binom_odd(m: u32, j: u32) -> bool {
    j <= m && (m & j) == j
}

/// Tensor a genuine bundle with a line bundle, by the splitting principle:
/// w_k(E (x) L) = sum_i C(n-i, k-i) l^{k-i} w_i(E), binomials mod 2, where n
/// is the rank of E and l = w_1(L). Operands over different bases lift to the
/// product base first.
pub fn tensor_line(
    e: &VirtualBundle,
    line: &VirtualBundle,
) -> Result<VirtualBundle, BundleError> {
    if e.rank < 0 || line.rank != 1 {
        return Err(BundleError::NotGenuine);
    }
    let (e, line) = if e.base == line.base {
        (e.clone(), line.clone())
    } else {
        lift_to_product(e, line)?
    };
    let ring = e.total_sw.ring().clone();
    let trunc = ring.truncation();
    let n = u32::try_from(e.rank).expect("rank checked non-negative");
    let ell = line.w(1);
    let mut total = F2Element::zero(&ring);
    for k in 0..=trunc {
        for i in 0..=k.min(n) {
            if !binom_odd(n - i, k - i) {
                continue;
            }
            let term = ell.pow(k - i).mul(&e.w(i))?;
            total = total.add(&term)?;
        }
    }
    Ok(VirtualBundle {
        base: e.base,
        rank: i64::from(n),
        total_sw: UnitSeries::from_total(total).expect("unit: k=0 term is 1"),
    })
}

/// Which structures a bundle admits, decided by vanishing of w_1, w_2, and
/// w_2 + w_1^2; the witness classes ride along. Several flags may hold at
/// once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTag {
    pub orientable: bool,
    pub spin: bool,
    pub pin_plus: bool,
    pub pin_minus: bool,
    /// Spin x_{±1} Z/4: the bundle differs from 2 sigma over BZ2 by a spin
    /// bundle (up to trivial summands).
    pub spin_z4: bool,
    pub w1: F2Element,
    pub w2: F2Element,
    pub w2_plus_w1_sq: F2Element,
}

impl StructureTag {
    pub fn none_of_catalog(&self) -> bool {
        !(self.orientable || self.spin || self.pin_plus || self.pin_minus || self.spin_z4)
    }

    /// All tags that hold, or NONE_OF_CATALOG.
    pub fn tags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.orientable {
            out.push("ORIENTABLE");
        }
        if self.spin {
            out.push("SPIN");
        }
        if self.pin_plus {
            out.push("PIN_PLUS");
        }
        if self.pin_minus {
            out.push("PIN_MINUS");
        }
        if self.spin_z4 {
            out.push("SPIN_Z4");
        }
        if out.is_empty() {
            out.push("NONE_OF_CATALOG");
        }
        out
    }
}

pub fn classify(e: &VirtualBundle) -> StructureTag {
    let w1 = e.w(1);
    let w2 = e.w(2);
    let w1_sq = w1.mul(&w1).expect("same ring");
    let w2_plus_w1_sq = w2.add(&w1_sq).expect("same ring");
    let orientable = w1.is_zero();
    let spin_z4 = *e.base() == Space::bz2() && {
        let two_sigma = sigma(e.truncation()).pow_sum(2);
        let d = e.sum(&two_sigma.negate()).expect("same base");
        d.w(1).is_zero() && d.w(2).is_zero()
    };
    StructureTag {
        orientable,
        spin: orientable && w2.is_zero(),
        pin_plus: w2.is_zero(),
        pin_minus: w2_plus_w1_sq.is_zero(),
        spin_z4,
        w1,
        w2,
        w2_plus_w1_sq,
    }
}

impl VirtualBundle {
    /// k-fold Whitney sum of the bundle with itself.
    pub fn pow_sum(&self, k: u32) -> VirtualBundle {
        let mut out = VirtualBundle::trivial(&self.base, 0, self.truncation());
        for _ in 0..k {
            out = out.sum(self).expect("same base");
        }
        out
    }
}

/// The named tangential structures of the twist dictionary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Structure {
    PinMinus,
    PinPlus,
    SpinZ4,
    SpinC,
    PinC,
    SpinH,
    PinHPlus,
    PinHMinus,
}

impl Structure {
    pub const ALL: [Structure; 8] = [
        Structure::PinMinus,
        Structure::PinPlus,
        Structure::SpinZ4,
        Structure::SpinC,
        Structure::PinC,
        Structure::SpinH,
        Structure::PinHPlus,
        Structure::PinHMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Structure::PinMinus => "Pin^-",
            Structure::PinPlus => "Pin^+",
            Structure::SpinZ4 => "Spin-Z/4",
            Structure::SpinC => "Spin^c",
            Structure::PinC => "Pin^c",
            Structure::SpinH => "Spin^h",
            Structure::PinHPlus => "Pin^h+",
            Structure::PinHMinus => "Pin^h-",
        }
    }

    /// The defining twist: (base, V) such that this structure is an
    /// (base, V)-twisted spin structure.
    pub fn twist(self, truncation: u32) -> VirtualBundle {
        match self {
            Structure::PinMinus => sigma(truncation),
            Structure::PinPlus => sigma(truncation).negate(),
            Structure::SpinZ4 => sigma(truncation).pow_sum(2),
            Structure::SpinC => v_u1(truncation),
            Structure::PinC => sigma(truncation)
                .external_sum(&v_u1(truncation))
                .expect("catalog twist"),
            Structure::SpinH => v_so(3, truncation),
            Structure::PinHPlus => v_o(3, truncation),
            Structure::PinHMinus => v_o(3, truncation).negate(),
        }
    }
}

/// Match (base, E) against the twist dictionary, up to spin difference and
/// trivial summands. Returns the structure and the witness difference
/// E - twist (whose w_1 and w_2 vanish). At most one entry can match: the
/// catalog twists over a common base pairwise differ by non-spin bundles.
pub fn twist_dictionary(e: &VirtualBundle) -> Option<(Structure, VirtualBundle)> {
    for s in Structure::ALL {
        let t = s.twist(e.truncation());
        if t.base() != e.base() {
            continue;
        }
        let d = e.sum(&t.negate()).expect("same base");
        if d.w(1).is_zero() && d.w(2).is_zero() {
            return Some((s, d));
        }
    }
    None
}

/// Equivalence of twists over one base: the difference must have rank 0 and
/// be spin. The report carries the difference bundle and its obstructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistEquivalence {
    pub equivalent: bool,
    pub difference: VirtualBundle,
    pub w1: F2Element,
    pub w2: F2Element,
}

pub fn twist_equivalent(
    e: &VirtualBundle,
    f: &VirtualBundle,
) -> Result<TwistEquivalence, BundleError> {
    if e.base() != f.base() {
        return Err(BundleError::BaseMismatch);
    }
    let difference = e.sum(&f.negate())?;
    let w1 = difference.w(1);
    let w2 = difference.w(2);
    let equivalent = difference.rank() == 0 && w1.is_zero() && w2.is_zero();
    Ok(TwistEquivalence {
        equivalent,
        difference,
        w1,
        w2,
    })
}

/// The named verifications: each reruns its computation from scratch and
/// reports every intermediate class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaName {
    Pullchar,
    DifferenceSpinPlus,
    DifferenceSpinMinus,
    FourSigmaSpin,
    TwoVso3Spin,
}

impl LemmaName {
    pub const ALL: [LemmaName; 5] = [
        LemmaName::Pullchar,
        LemmaName::DifferenceSpinPlus,
        LemmaName::DifferenceSpinMinus,
        LemmaName::FourSigmaSpin,
        LemmaName::TwoVso3Spin,
    ];

    pub fn key(self) -> &'static str {
        match self {
            LemmaName::Pullchar => "pullchar",
            LemmaName::DifferenceSpinPlus => "difference_spin_plus",
            LemmaName::DifferenceSpinMinus => "difference_spin_minus",
            LemmaName::FourSigmaSpin => "four_sigma_spin",
            LemmaName::TwoVso3Spin => "two_vso3_spin",
        }
    }

    pub fn parse(s: &str) -> Option<LemmaName> {
        LemmaName::ALL.into_iter().find(|l| l.key() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaStep {
    /// What is being computed, e.g. "w2(E+)".
    pub label: String,
    /// Which characteristic class the value is, e.g. "w2".
    pub class: String,
    /// The computed value, printed.
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub pass: bool,
    pub steps: Vec<LemmaStep>,
}

impl LemmaReport {
    fn step(&mut self, label: impl Into<String>, class: impl Into<String>, value: &F2Element) {
        self.steps.push(LemmaStep {
            label: label.into(),
            class: class.into(),
            value: value.to_string(),
        });
    }
}

pub fn verify_lemma(name: LemmaName, truncation: u32) -> LemmaReport {
    let mut report = LemmaReport {
        lemma: name.key(),
        pass: false,
        steps: Vec::new(),
    };
    match name {
        LemmaName::Pullchar => {
            // Two independent computations of the classes of phi^* V_O3: the
            // catalog substitution, and the splitting-principle oracle
            // (phi^* V_O3 = V_SO3 (x) sigma since Z/2 acts as -1).
            let phi = maps::phi(truncation);
            let from_hom = pullback(&phi, &v_o(3, truncation)).expect("catalog pullback");
            let oracle = tensor_line(&v_so(3, truncation), &sigma(truncation))
                .expect("genuine bundle and line");
            let ring = from_hom.total_sw().ring().clone();
            let a = F2Element::generator(&ring, "a").expect("a");
            let expected_w2 = a
                .pow(2)
                .add(&F2Element::generator(&ring, "w2bar").expect("w2bar"))
                .expect("same ring");
            for k in 1..=3 {
                report.step(
                    format!("phi^*(w{k}) via substitution"),
                    format!("w{k}"),
                    &from_hom.w(k),
                );
                report.step(
                    format!("w{k}(V_SO3 (x) sigma) via splitting principle"),
                    format!("w{k}"),
                    &oracle.w(k),
                );
            }
            report.pass = from_hom.w(1) == a
                && from_hom.w(2) == expected_w2
                && from_hom.total_sw() == oracle.total_sw()
                && from_hom.rank() == oracle.rank();
        }
        LemmaName::DifferenceSpinPlus | LemmaName::DifferenceSpinMinus => {
            // E± = phi^*(±(V_O3 - 3)) - (±((3 sigma - 3) [+] (V_SO3 - 3))),
            // assembled from raw Whitney sums and inversions.
            let plus = name == LemmaName::DifferenceSpinPlus;
            let sign: &str = if plus { "+" } else { "-" };
            let phi = maps::phi(truncation);
            let three_sigma = sigma(truncation).pow_sum(3);
            let vso3 = v_so(3, truncation);
            let vo3_m3 = v_o(3, truncation)
                .sum(&VirtualBundle::trivial(&Space::bo(3), -3, truncation))
                .expect("same base");
            let left_inner = if plus { vo3_m3.clone() } else { vo3_m3.negate() };
            let left = pullback(&phi, &left_inner).expect("catalog pullback");
            let ext = three_sigma
                .sum(&VirtualBundle::trivial(&Space::bz2(), -3, truncation))
                .expect("same base")
                .external_sum(
                    &vso3
                        .sum(&VirtualBundle::trivial(&Space::bso(3), -3, truncation))
                        .expect("same base"),
                )
                .expect("product base");
            let right = if plus { ext } else { ext.negate() };
            let e_pm = left.sum(&right.negate()).expect("same base");

            // The intermediate lines of the direct computation.
            report.step("w2(3 sigma)", "w2", &three_sigma.w(2));
            report.step("w1(3 sigma)^2", "w1^2", &{
                let w1 = three_sigma.w(1);
                w1.mul(&w1).expect("same ring")
            });
            report.step("w2(-3 sigma)", "w2", &three_sigma.negate().w(2));
            report.step("w2(-V_SO3)", "w2", &vso3.negate().w(2));
            report.step(
                format!("w1(phi^*({sign}(V_O3 - 3)))"),
                "w1",
                &left.w(1),
            );
            report.step(
                format!("w2(phi^*({sign}(V_O3 - 3)))"),
                "w2",
                &left.w(2),
            );
            report.step(format!("rank(E{sign})"), "rank", &{
                let ring = e_pm.total_sw().ring().clone();
                if e_pm.rank() == 0 {
                    F2Element::zero(&ring)
                } else {
                    F2Element::one(&ring)
                }
            });
            report.step(format!("w1(E{sign})"), "w1", &e_pm.w(1));
            report.step(format!("w2(E{sign})"), "w2", &e_pm.w(2));
            report.pass = e_pm.rank() == 0 && e_pm.w(1).is_zero() && e_pm.w(2).is_zero();
        }
        LemmaName::FourSigmaSpin => {
            let four_sigma = sigma(truncation).pow_sum(4);
            report.step("w(4 sigma)", "w", four_sigma.total_sw().total());
            report.step("w1(4 sigma)", "w1", &four_sigma.w(1));
            report.step("w2(4 sigma)", "w2", &four_sigma.w(2));
            report.pass = classify(&four_sigma).spin;
        }
        LemmaName::TwoVso3Spin => {
            let two_vso3 = v_so(3, truncation).pow_sum(2);
            report.step("w(2 V_SO3)", "w", two_vso3.total_sw().total());
            report.step("w1(2 V_SO3)", "w1", &two_vso3.w(1));
            report.step("w2(2 V_SO3)", "w2", &two_vso3.w(2));
            report.pass = classify(&two_vso3).spin;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    const T: u32 = DEFAULT_TRUNCATION;

    #[test]
    fn space_cohomology_rings() {
        let bz2 = Space::bz2().cohomology(T);
        assert_eq!(bz2.to_string(), "F2[a] (deg <= 16)");
        let bso3 = Space::bso(3).cohomology(T);
        assert_eq!(bso3.to_string(), "F2[w2bar, w3bar] (deg <= 16)");
        let bo3 = Space::bo(3).cohomology(T);
        assert_eq!(bo3.to_string(), "F2[w1, w2, w3] (deg <= 16)");
        assert_eq!(Space::point().cohomology(T).generator_count(), 0);

        // Canonical factor order puts BZ2 before BSO3 regardless of input.
        let prod = Space::bso(3).product(&Space::bz2());
        assert_eq!(prod, Space::bz2().product(&Space::bso(3)));
        assert_eq!(
            prod.cohomology(T).to_string(),
            "F2[a, w2bar, w3bar] (deg <= 16)"
        );

        // Collisions get primes.
        let double = Space::bz2().product(&Space::bz2());
        let double_ring = double.cohomology(T);
        let names: Vec<&str> = double_ring.generators().map(|(n, _)| n).collect();
        assert_eq!(names, ["a", "a'"]);
    }

    #[test]
    fn whitney_sum_examples() {
        let s = sigma(T);
        let three = s.pow_sum(3);
        assert_eq!(three.rank(), 3);
        assert_eq!(three.total_sw().total().to_string(), "1 + a + a^2 + a^3");

        // E + R^0 = E.
        let zero = VirtualBundle::zero(&Space::bz2(), T);
        assert_eq!(s.sum(&zero).unwrap(), s);

        // External sum over distinct bases lands on the product.
        let left = three
            .sum(&VirtualBundle::trivial(&Space::bz2(), -3, T))
            .unwrap();
        let right = v_so(3, T)
            .sum(&VirtualBundle::trivial(&Space::bso(3), -3, T))
            .unwrap();
        let ext = left.external_sum(&right).unwrap();
        assert_eq!(ext.rank(), 0);
        assert_eq!(*ext.base(), Space::bz2().product(&Space::bso(3)));
        assert_eq!(
            ext.total_sw().total().to_string(),
            "1 + a + a^2 + w2bar + a^3 + a*w2bar + w3bar + a^2*w2bar + a*w3bar + a^3*w2bar + a^2*w3bar + a^3*w3bar"
        );

        // sigma [+] sigma deliberately lives over BZ2 x BZ2.
        let sq = s.external_sum(&s).unwrap();
        assert_eq!(*sq.base(), Space::bz2().product(&Space::bz2()));
        assert_eq!(sq.total_sw().total().to_string(), "1 + a + a' + a*a'");
    }

    #[test]
    fn negation_examples() {
        let three_sigma = sigma(T).pow_sum(3);
        let neg = three_sigma.negate();
        assert_eq!(neg.rank(), -3);
        assert_eq!(neg.w(1).to_string(), "a");
        assert!(neg.w(2).is_zero(), "w2(3s) + w1(3s)^2 = a^2 + a^2 = 0");

        let neg_vso3 = v_so(3, T).negate();
        assert_eq!(neg_vso3.w(2).to_string(), "w2bar");

        let triv = VirtualBundle::trivial(&Space::bo(3), 5, T);
        let neg_triv = triv.negate();
        assert_eq!(neg_triv.rank(), -5);
        assert!(neg_triv.total_sw().total().is_one());

        // Involution, and E - E has trivial total class.
        let e = v_o(3, T);
        assert_eq!(e.negate().negate(), e);
        assert!(e.sum(&e.negate()).unwrap().total_sw().total().is_one());
    }

    #[test]
    fn pullback_examples() {
        let phi = maps::phi(T);
        let pulled = pullback(&phi, &v_o(3, T)).unwrap();
        assert_eq!(pulled.w(1).to_string(), "a");
        assert_eq!(pulled.w(2).to_string(), "a^2 + w2bar");
        assert_eq!(pulled.w(3).to_string(), "a^3 + a*w2bar + w3bar");

        // i2^*(w2) = w2(3 sigma) = a^2.
        let i2 = maps::i2(T);
        let pulled2 = pullback(&i2, &v_o(3, T)).unwrap();
        assert_eq!(pulled2.w(2).to_string(), "a^2");
        assert_eq!(pulled2.total_sw(), sigma(T).pow_sum(3).total_sw());

        let id = maps::identity(&Space::bo(3), T);
        assert_eq!(pullback(&id, &v_o(3, T)).unwrap(), v_o(3, T));

        // Base mismatch is an error.
        assert_eq!(
            pullback(&phi, &v_so(3, T)).unwrap_err(),
            BundleError::BaseMismatch
        );
    }

    #[test]
    fn phi_inverse_is_inverse() {
        let phi = maps::phi(T);
        let phi_inv = maps::phi_inverse(T);
        let bo3 = Space::bo(3).cohomology(T);
        let prod = Space::bz2().product(&Space::bso(3)).cohomology(T);
        for (name, _) in bo3.generators() {
            let x = F2Element::generator(&bo3, name).unwrap();
            let roundtrip = phi_inv.hom().apply(&phi.hom().apply(&x).unwrap()).unwrap();
            assert_eq!(roundtrip, x);
        }
        for (name, _) in prod.generators() {
            let x = F2Element::generator(&prod, name).unwrap();
            let roundtrip = phi.hom().apply(&phi_inv.hom().apply(&x).unwrap()).unwrap();
            assert_eq!(roundtrip, x);
        }
    }

    #[test]
    fn tensor_line_matches_pullchar() {
        let got = tensor_line(&v_so(3, T), &sigma(T)).unwrap();
        assert_eq!(got.rank(), 3);
        assert_eq!(got.w(1).to_string(), "a");
        assert_eq!(got.w(2).to_string(), "a^2 + w2bar");
        // Derived by expanding (x1+a)(x2+a)(x3+a) with e1 = 0:
        // w3 = w3bar + a*w2bar + a^3.
        assert_eq!(got.w(3).to_string(), "a^3 + a*w2bar + w3bar");

        // Tensoring with the trivial line changes nothing.
        let triv_line = VirtualBundle::trivial(&Space::bso(3), 1, T);
        assert_eq!(tensor_line(&v_so(3, T), &triv_line).unwrap(), v_so(3, T));

        // Negative rank rejected.
        let err = tensor_line(&v_so(3, T).negate(), &triv_line).unwrap_err();
        assert_eq!(err, BundleError::NotGenuine);
        assert_eq!(err.to_string(), "tensor_line requires a genuine bundle");
    }

    #[test]
    fn classification_examples() {
        let four_sigma_m4 = sigma(T)
            .pow_sum(4)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -4, T))
            .unwrap();
        let tag = classify(&four_sigma_m4);
        assert!(tag.spin && tag.orientable && tag.pin_plus && tag.pin_minus);

        let two_vso3 = v_so(3, T).pow_sum(2);
        assert!(classify(&two_vso3).spin);

        // sigma itself: w1 = a (not orientable), w2 = 0 (pin+ holds),
        // w2 + w1^2 = a^2 (no pin-).
        let tag = classify(&sigma(T));
        assert!(!tag.orientable && !tag.spin && !tag.pin_minus && !tag.spin_z4);
        assert!(tag.pin_plus);
        assert_eq!(tag.w2_plus_w1_sq.to_string(), "a^2");

        // 2 sigma carries the Spin-Z/4 tag but is neither spin nor pin+.
        let tag = classify(&sigma(T).pow_sum(2));
        assert!(tag.spin_z4 && tag.orientable && !tag.spin && !tag.pin_plus);
        assert!(!tag.pin_minus, "w2 + w1^2 = a^2 for 2 sigma");
        assert_eq!(tag.tags(), ["ORIENTABLE", "SPIN_Z4"]);

        let none = classify(&v_o(3, T));
        assert!(none.none_of_catalog());
        assert_eq!(none.tags(), ["NONE_OF_CATALOG"]);
    }

    #[test]
    fn twist_dictionary_examples() {
        let spinh = v_so(3, T)
            .sum(&VirtualBundle::trivial(&Space::bso(3), -3, T))
            .unwrap();
        assert_eq!(twist_dictionary(&spinh).unwrap().0, Structure::SpinH);

        let sigma_m1 = sigma(T)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -1, T))
            .unwrap();
        assert_eq!(twist_dictionary(&sigma_m1).unwrap().0, Structure::PinMinus);

        // -(3 sigma - 3) is a pin- twist: the difference from sigma is
        // 4 sigma - 4 up to trivial summands, which is spin.
        let m3s3 = sigma(T)
            .pow_sum(3)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -3, T))
            .unwrap()
            .negate();
        assert_eq!(twist_dictionary(&m3s3).unwrap().0, Structure::PinMinus);

        assert_eq!(
            twist_dictionary(&sigma(T).negate()).unwrap().0,
            Structure::PinPlus
        );
        assert_eq!(
            twist_dictionary(&sigma(T).pow_sum(2)).unwrap().0,
            Structure::SpinZ4
        );
        assert_eq!(twist_dictionary(&v_u1(T)).unwrap().0, Structure::SpinC);
        assert_eq!(
            twist_dictionary(&sigma(T).external_sum(&v_u1(T)).unwrap())
                .unwrap()
                .0,
            Structure::PinC
        );
        assert_eq!(twist_dictionary(&v_o(3, T)).unwrap().0, Structure::PinHPlus);
        assert_eq!(
            twist_dictionary(&v_o(3, T).negate()).unwrap().0,
            Structure::PinHMinus
        );

        // The zero twist is plain spin: no dictionary entry.
        assert!(twist_dictionary(&VirtualBundle::zero(&Space::bz2(), T)).is_none());
    }

    #[test]
    fn twist_equivalence_examples() {
        let e = v_so(3, T);
        let refl = twist_equivalent(&e, &e).unwrap();
        assert!(refl.equivalent);
        assert_eq!(refl.difference.rank(), 0);

        // -(3 sigma - 3) and (sigma - 1) differ by ±(4 sigma - 4).
        let m3s3 = sigma(T)
            .pow_sum(3)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -3, T))
            .unwrap()
            .negate();
        let sigma_m1 = sigma(T)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -1, T))
            .unwrap();
        let eq = twist_equivalent(&m3s3, &sigma_m1).unwrap();
        assert!(eq.equivalent);
        assert!(eq.w1.is_zero() && eq.w2.is_zero());
        // Orientation check: (sigma - 1) - (3 - 3 sigma) is exactly
        // 4 sigma - 4.
        let diff = sigma_m1.sum(&m3s3.negate()).unwrap();
        let four_sigma_m4 = sigma(T)
            .pow_sum(4)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -4, T))
            .unwrap();
        assert_eq!(diff, four_sigma_m4);

        // phi^*(V_O3 - 3) vs (3 sigma - 3) [+] (V_SO3 - 3): the witness E+.
        let phi = maps::phi(T);
        let left = pullback(
            &phi,
            &v_o(3, T)
                .sum(&VirtualBundle::trivial(&Space::bo(3), -3, T))
                .unwrap(),
        )
        .unwrap();
        let right = sigma(T)
            .pow_sum(3)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -3, T))
            .unwrap()
            .external_sum(
                &v_so(3, T)
                    .sum(&VirtualBundle::trivial(&Space::bso(3), -3, T))
                    .unwrap(),
            )
            .unwrap();
        let eq = twist_equivalent(&left, &right).unwrap();
        assert!(eq.equivalent, "E+ is rank-0 spin");
        assert!(eq.w1.is_zero() && eq.w2.is_zero());

        // Perturbing one side by sigma (non-spin difference) blocks it. The
        // perturbation is sigma lifted to the product base, so the bases
        // still agree.
        let prod_ring = left.base().cohomology(T);
        let one_plus_a = F2Element::one(&prod_ring)
            .add(&F2Element::generator(&prod_ring, "a").unwrap())
            .unwrap();
        let sigma_lift = VirtualBundle::from_parts(
            left.base().clone(),
            1,
            UnitSeries::from_total(one_plus_a).unwrap(),
        )
        .unwrap();
        let bad = twist_equivalent(&left.sum(&sigma_lift).unwrap(), &right).unwrap();
        assert!(!bad.equivalent);

        let err = twist_equivalent(&sigma(T), &v_so(3, T)).unwrap_err();
        assert_eq!(err, BundleError::BaseMismatch);
    }

    #[test]
    fn split_first_factor_roundtrip() {
        let left = sigma(T)
            .pow_sum(3)
            .sum(&VirtualBundle::trivial(&Space::bz2(), -3, T))
            .unwrap();
        let right = v_so(3, T)
            .sum(&VirtualBundle::trivial(&Space::bso(3), -3, T))
            .unwrap();
        let ext = left.external_sum(&right).unwrap();
        let (l, r) = split_first_factor(&ext).unwrap();
        assert_eq!(l.total_sw(), left.total_sw());
        assert_eq!(r.total_sw(), right.total_sw());
        assert_eq!(l.rank() + r.rank(), ext.rank());

        // A class that is not factor-wise does not split: over BZ2 x BZ2,
        // 1 + a*a' has no product decomposition.
        let double = Space::bz2().product(&Space::bz2());
        let ring = double.cohomology(T);
        let cross = F2Element::one(&ring)
            .add(&F2Element::monomial(&ring, &[("a", 1), ("a'", 1)]).unwrap())
            .unwrap();
        let vb =
            VirtualBundle::from_parts(double, 0, UnitSeries::from_total(cross).unwrap()).unwrap();
        assert!(split_first_factor(&vb).is_none());

        // Single-factor bases cannot split.
        assert!(split_first_factor(&sigma(T)).is_none());
    }

    #[test]
    fn lemma_reports_pass() {
        for name in LemmaName::ALL {
            let report = verify_lemma(name, T);
            assert!(report.pass, "{} failed", report.lemma);
            assert!(!report.steps.is_empty());
        }
    }

    #[test]
    fn lemma_pullchar_details() {
        let report = verify_lemma(LemmaName::Pullchar, T);
        assert!(report
            .steps
            .iter()
            .any(|s| s.label == "phi^*(w2) via substitution" && s.value == "a^2 + w2bar"));
        assert!(report
            .steps
            .iter()
            .any(|s| s.label == "w2(V_SO3 (x) sigma) via splitting principle"
                && s.value == "a^2 + w2bar"));
    }

    #[test]
    fn lemma_difference_spin_details() {
        let report = verify_lemma(LemmaName::DifferenceSpinPlus, T);
        let find = |label: &str| {
            report
                .steps
                .iter()
                .find(|s| s.label == label)
                .unwrap_or_else(|| panic!("missing step {label}"))
                .value
                .clone()
        };
        assert_eq!(find("w2(3 sigma)"), "a^2");
        assert_eq!(find("w1(3 sigma)^2"), "a^2");
        assert_eq!(find("w2(-3 sigma)"), "0");
        assert_eq!(find("w2(-V_SO3)"), "w2bar");
        assert_eq!(find("w1(E+)"), "0");
        assert_eq!(find("w2(E+)"), "0");

        let minus = verify_lemma(LemmaName::DifferenceSpinMinus, T);
        assert!(minus.pass);
        assert!(minus.steps.iter().any(|s| s.label == "w2(E-)" && s.value == "0"));
    }
}
