//! Finite subgroups of GL₂(ℤ/nℤ): closure from generators, membership,
//! projections, kernels of CRT components, commutator subgroups and levels.
//!
//! A [`SubgroupSpec`] is a cheap description (a generating set). Most of the
//! certification pipeline only ever needs generators; a [`GroupTable`] is the
//! fully enumerated group and is built only where membership or element
//! iteration is required.

mod base;
mod kernel;

use std::collections::HashMap;
use std::hash::BuildHasherDefault;
use std::sync::OnceLock;

use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modarith::{
    mul_keys, pack, reduce_raw, ArithError, CrtPair, Mat2, Modulus, Reduce,
};

pub use base::base_order;
pub use kernel::{fiber_kernels, reduction_kernel, subgroup_order, FiberKernels, ReductionKernel};

pub(crate) type KeyMap<V> = HashMap<u64, V, BuildHasherDefault<FxHasher>>;

/// Default enumeration ceiling, 2²⁴ elements.
pub const DEFAULT_MAX_GROUP: usize = 1 << 24;

/// Environment variable overriding [`DEFAULT_MAX_GROUP`].
pub const MAX_GROUP_ENV: &str = "PPCERT_MAX_GROUP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("generator {index} has determinant {det}, not a unit mod {n}")]
    NonInvertibleGenerator { index: usize, det: u32, n: u32 },
    #[error("group at level {n} exceeds the enumeration ceiling of {limit} elements")]
    TooLarge { n: u32, limit: usize },
    #[error("{0} is not an element of the ambient group")]
    NotMember(String),
}

pub type Result<T, E = GroupError> = std::result::Result<T, E>;

/// The enumeration ceiling in effect, read once from `PPCERT_MAX_GROUP`.
pub fn max_group_size() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(MAX_GROUP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(DEFAULT_MAX_GROUP)
    })
}

/// Anything that names a subgroup through a generating set.
pub trait Generated {
    fn modulus(&self) -> Modulus;
    fn generators(&self) -> &[Mat2];
}

/// Which CRT component of GL₂(ℤ/aℤ) × GL₂(ℤ/bℤ) is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Generators of a subgroup of GL₂(ℤ/nℤ). An empty list is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    modulus: Modulus,
    generators: Vec<Mat2>,
}

impl Generated for SubgroupSpec {
    fn modulus(&self) -> Modulus {
        self.modulus
    }

    fn generators(&self) -> &[Mat2] {
        &self.generators
    }
}

impl SubgroupSpec {
    pub fn new(modulus: Modulus, generators: Vec<Mat2>) -> Result<Self> {
        for (index, g) in generators.iter().enumerate() {
            if g.modulus() != modulus {
                return Err(ArithError::ModulusMismatch {
                    left: modulus.n(),
                    right: g.modulus().n(),
                }
                .into());
            }
            if !g.is_invertible() {
                return Err(GroupError::NonInvertibleGenerator {
                    index,
                    det: g.det(),
                    n: modulus.n(),
                });
            }
        }
        Ok(SubgroupSpec {
            modulus,
            generators,
        })
    }

    pub fn trivial(modulus: Modulus) -> Self {
        SubgroupSpec {
            modulus,
            generators: Vec::new(),
        }
    }

    /// SL₂(ℤ/nℤ), generated by the two elementary transvections.
    pub fn sl2(modulus: Modulus) -> Self {
        SubgroupSpec {
            modulus,
            generators: vec![
                Mat2::new(modulus, [[1, 1], [0, 1]]),
                Mat2::new(modulus, [[1, 0], [1, 1]]),
            ],
        }
    }

    /// GL₂(ℤ/nℤ) = SL₂ ⋊ {diag(u, 1)}, with a small generating set of units.
    pub fn full_gl2(modulus: Modulus) -> Self {
        let mut spec = SubgroupSpec::sl2(modulus);
        for u in unit_generators(modulus) {
            spec.generators.push(Mat2::new(modulus, [[u as i64, 0], [0, 1]]));
        }
        spec
    }

    pub fn with_generator(&self, g: Mat2) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push(g);
        SubgroupSpec::new(self.modulus, gens)
    }

    /// ⟨G, −I⟩ as a generating set (−I is appended only when distinct from I).
    pub fn with_neg_identity(&self) -> Self {
        let neg = Mat2::neg_identity(self.modulus);
        let mut gens = self.generators.clone();
        if !neg.is_identity() && !gens.contains(&neg) {
            gens.push(neg);
        }
        SubgroupSpec {
            modulus: self.modulus,
            generators: gens,
        }
    }

    /// Generators reduced to level d; they generate the image of the group.
    pub fn project(&self, d: u32) -> Result<SubgroupSpec> {
        let target = self.modulus.divisor(d)?;
        let generators = self
            .generators
            .iter()
            .map(|g| g.reduce_level(d))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SubgroupSpec {
            modulus: target,
            generators,
        })
    }

    pub fn close(&self) -> Result<GroupTable> {
        close(self)
    }

    /// Exact order, computed from the base (e₁, e₂) without enumerating
    /// the group.
    pub fn order(&self) -> Result<u64> {
        Ok(base_order(self))
    }

    pub fn index_in_gl2(&self) -> Result<u64> {
        Ok(gl2_order(self.modulus.n()) / self.order()?)
    }
}

/// A minimal-ish generating set of (ℤ/nℤ)^×, picked greedily by ascending value.
fn unit_generators(modulus: Modulus) -> Vec<u32> {
    let n = modulus.n();
    let units = modulus.units();
    let mut reached = vec![false; n as usize];
    reached[1 % n as usize] = true;
    let mut members = vec![1 % n];
    let mut gens = Vec::new();
    for u in units {
        if reached[u as usize] {
            continue;
        }
        gens.push(u);
        let mut i = 0;
        while i < members.len() {
            let y = (members[i] as u64 * u as u64 % n as u64) as u32;
            if !reached[y as usize] {
                reached[y as usize] = true;
                members.push(y);
            }
            i += 1;
        }
    }
    gens
}

/// |GL₂(ℤ/nℤ)| = ∏ p^{4k−3}(p−1)(p²−1) over pᵏ ∥ n.
pub fn gl2_order(n: u32) -> u64 {
    let m = Modulus::new(n).expect("level within the supported range");
    m.prime_powers()
        .map(|(p, k)| {
            let p = p as u64;
            p.pow(4 * k - 3) * (p - 1) * (p * p - 1)
        })
        .product()
}

/// A fully enumerated subgroup, elements stored as packed keys in BFS order.
#[derive(Debug, Clone)]
pub struct GroupTable {
    spec: SubgroupSpec,
    elements: Vec<u64>,
    index: KeyMap<u32>,
}

impl Generated for GroupTable {
    fn modulus(&self) -> Modulus {
        self.spec.modulus
    }

    fn generators(&self) -> &[Mat2] {
        &self.spec.generators
    }
}

impl PartialEq for GroupTable {
    /// Equality as subsets of GL₂(ℤ/nℤ), independent of generators.
    fn eq(&self, other: &Self) -> bool {
        self.spec.modulus == other.spec.modulus
            && self.elements.len() == other.elements.len()
            && self.elements.iter().all(|k| other.index.contains_key(k))
    }
}

impl Eq for GroupTable {}

/// Closure of the generators under multiplication, with the process-wide ceiling.
pub fn close(spec: &SubgroupSpec) -> Result<GroupTable> {
    close_with_limit(spec, max_group_size())
}

/// Breadth-first closure from I, applying generators in ascending key order.
pub fn close_with_limit(spec: &SubgroupSpec, limit: usize) -> Result<GroupTable> {
    let n = spec.modulus.n();
    let mut gens: Vec<u64> = spec.generators.iter().map(Mat2::key).collect();
    gens.sort_unstable();
    gens.dedup();
    let identity = Mat2::identity(spec.modulus).key();
    let mut elements = vec![identity];
    let mut index = KeyMap::default();
    index.insert(identity, 0u32);
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head];
        head += 1;
        for &s in &gens {
            let y = mul_keys(n, x, s);
            if !index.contains_key(&y) {
                if elements.len() >= limit {
                    return Err(GroupError::TooLarge { n, limit });
                }
                index.insert(y, elements.len() as u32);
                elements.push(y);
            }
        }
    }
    Ok(GroupTable {
        spec: spec.clone(),
        elements,
        index,
    })
}

impl GroupTable {
    pub fn spec(&self) -> &SubgroupSpec {
        &self.spec
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: &Mat2) -> bool {
        x.modulus() == self.spec.modulus && self.index.contains_key(&x.key())
    }

    #[inline]
    pub(crate) fn contains_key(&self, key: u64) -> bool {
        self.index.contains_key(&key)
    }

    pub(crate) fn keys(&self) -> &[u64] {
        &self.elements
    }

    /// Elements in deterministic BFS order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = Mat2> + '_ {
        let m = self.spec.modulus;
        self.elements.iter().map(move |&k| Mat2::from_key(m, k))
    }

    pub fn index_in_gl2(&self) -> u64 {
        index_in_gl2(self)
    }

    pub fn is_full(&self) -> bool {
        self.order() == gl2_order(self.spec.modulus.n())
    }

    pub fn adjoin_neg_identity(&self) -> Result<GroupTable> {
        adjoin_neg_identity(self)
    }

    pub fn project(&self, d: u32) -> Result<GroupTable> {
        project(self, d)
    }

    /// Builds the table of a group given as an explicit element set, choosing
    /// generators greedily in ascending key order.
    ///
    /// The input must already be a subgroup; only its closure is returned.
    pub fn from_elements<I>(modulus: Modulus, elements: I) -> Result<GroupTable>
    where
        I: IntoIterator<Item = Mat2>,
    {
        let mut keys: Vec<u64> = elements.into_iter().map(|m| m.key()).collect();
        keys.sort_unstable();
        keys.dedup();
        let candidates: Vec<Mat2> = keys.iter().map(|&k| Mat2::from_key(modulus, k)).collect();
        grow(&SubgroupSpec::trivial(modulus).close()?, &candidates, None)
    }
}

/// Extends `base` by each candidate not already present, re-closing as needed.
/// Stops early once `target` elements are reached.
pub(crate) fn grow(base: &GroupTable, candidates: &[Mat2], target: Option<u64>) -> Result<GroupTable> {
    let mut table = base.clone();
    for c in candidates {
        if target.is_some_and(|t| table.order() >= t) {
            break;
        }
        if !table.contains(c) {
            table = table.spec.with_generator(*c)?.close()?;
        }
    }
    Ok(table)
}

/// [GL₂(ℤ/nℤ) : g], exact by Lagrange.
pub fn index_in_gl2(g: &GroupTable) -> u64 {
    gl2_order(g.spec.modulus.n()) / g.order()
}

/// H = ⟨g, −I⟩.
pub fn adjoin_neg_identity(g: &GroupTable) -> Result<GroupTable> {
    let neg = Mat2::neg_identity(g.spec.modulus);
    if g.contains(&neg) {
        return Ok(g.clone());
    }
    g.spec.with_generator(neg)?.close()
}

/// Image of g at level d, generated by the reduced generators.
pub fn project(g: &GroupTable, d: u32) -> Result<GroupTable> {
    if d == g.spec.modulus.n() {
        return Ok(g.clone());
    }
    g.spec.project(d)?.close()
}

/// The mod-a (side A) or mod-b (side B) components of elements of `gamma`
/// whose other component is the identity, enumerated from the full table.
pub fn kernel_fiber(gamma: &GroupTable, side: Side, a: u32, b: u32) -> Result<GroupTable> {
    let pair = CrtPair::new(a, b)?;
    if pair.ab() != gamma.spec.modulus {
        return Err(ArithError::ModulusMismatch {
            left: pair.ab().n(),
            right: gamma.spec.modulus.n(),
        }
        .into());
    }
    let (keep, other) = match side {
        Side::A => (pair.a(), pair.b()),
        Side::B => (pair.b(), pair.a()),
    };
    let other_identity = Mat2::identity(other).raw();
    let members = gamma.keys().iter().filter_map(|&k| {
        let e = crate::modarith::unpack(k);
        (reduce_raw(other.n(), e) == other_identity)
            .then(|| Mat2::from_key(keep, pack(reduce_raw(keep.n(), e))))
    });
    GroupTable::from_elements(keep, members.collect::<Vec<_>>())
}

/// True iff ⟨subset ∪ extra⟩ = g. Every input element must lie in g.
pub fn generates_whole(g: &GroupTable, subset: &[Mat2], extra: &GroupTable) -> Result<bool> {
    for x in subset.iter().chain(extra.generators()) {
        if !g.contains(x) {
            return Err(GroupError::NotMember(format!("{x:?}")));
        }
    }
    if extra.spec.modulus != g.spec.modulus {
        return Err(ArithError::ModulusMismatch {
            left: g.spec.modulus.n(),
            right: extra.spec.modulus.n(),
        }
        .into());
    }
    let closed = grow(extra, subset, Some(g.order()))?;
    Ok(closed.order() == g.order())
}

/// [GL₂(ℤ/nℤ), GL₂(ℤ/nℤ)].
pub fn commutator_subgroup(n: u32) -> Result<GroupTable> {
    let modulus = Modulus::new(n)?;
    commutator_subgroup_of(&SubgroupSpec::full_gl2(modulus))
}

/// [G, G] as the normal closure of the commutators of a generating set.
///
/// Commutators of generators alone do not generate [G, G] in general; the
/// conjugation loop below closes them up under G.
pub fn commutator_subgroup_of<G: Generated + ?Sized>(g: &G) -> Result<GroupTable> {
    let modulus = g.modulus();
    let gens = g.generators();
    let inverses = gens
        .iter()
        .map(Mat2::inv)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut seeds = Vec::new();
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i + 1..] {
            let c = x.commutator(y)?;
            if !c.is_identity() {
                seeds.push(c);
            }
        }
    }
    let mut table = GroupTable::from_elements(modulus, Vec::new())?;
    table = grow(&table, &seeds, None)?;
    loop {
        let mut added = false;
        let current: Vec<Mat2> = table.generators().to_vec();
        for (s, s_inv) in gens.iter().zip(&inverses) {
            for h in &current {
                let conj = s.mul(h)?.mul(s_inv)?;
                if !table.contains(&conj) {
                    table = table.spec.with_generator(conj)?.close()?;
                    added = true;
                }
            }
        }
        if !added {
            return Ok(table);
        }
    }
}

/// [G, G] straight from the definition: closure of every pairwise commutator.
/// Quadratic in |G|; intended as a cross-check at small levels.
pub fn commutator_subgroup_all_pairs(g: &GroupTable) -> Result<GroupTable> {
    let elems: Vec<Mat2> = g.elements().collect();
    let mut table = GroupTable::from_elements(g.modulus(), Vec::new())?;
    for x in &elems {
        for y in &elems {
            let c = x.commutator(y)?;
            if !table.contains(&c) {
                table = table.spec.with_generator(c)?.close()?;
            }
        }
    }
    Ok(table)
}

/// Smallest d | n with ker(GL₂(ℤ/nℤ) → GL₂(ℤ/dℤ)) ⊆ g.
///
/// Uses the order identity |g| = |g mod d| · |K(d)| which holds exactly when
/// g is the full preimage of its reduction mod d.
pub fn subgroup_level<G: Generated + ?Sized>(g: &G) -> Result<u32> {
    let modulus = g.modulus();
    let n = modulus.n();
    let spec = SubgroupSpec::new(modulus, g.generators().to_vec())?;
    let order = spec.order()?;
    for d in modulus.divisors() {
        if d == n {
            return Ok(n);
        }
        let kernel_size = gl2_order(n) / gl2_order(d);
        if order % kernel_size != 0 {
            continue;
        }
        if spec.project(d)?.order()? * kernel_size == order {
            return Ok(d);
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u32) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn mat(n: u32, rows: [[i64; 2]; 2]) -> Mat2 {
        Mat2::new(m(n), rows)
    }

    fn spec(n: u32, gens: &[[[i64; 2]; 2]]) -> SubgroupSpec {
        SubgroupSpec::new(m(n), gens.iter().map(|&r| mat(n, r)).collect()).unwrap()
    }

    fn brute_invertible(n: u32) -> Vec<Mat2> {
        let n64 = n as i64;
        (0..n64.pow(4))
            .map(|k| mat(n, [[k % n64, k / n64 % n64], [k / n64.pow(2) % n64, k / n64.pow(3)]]))
            .filter(Mat2::is_invertible)
            .collect()
    }

    #[test]
    fn closure_examples() {
        assert_eq!(SubgroupSpec::trivial(m(12)).close().unwrap().order(), 1);
        let gl2_f2 = spec(2, &[[[0, 1], [1, 0]], [[1, 1], [0, 1]]]).close().unwrap();
        assert_eq!(gl2_f2.order(), brute_invertible(2).len() as u64);
        assert_eq!(gl2_f2.order(), 6);
        let sl2_f3 = spec(3, &[[[1, 1], [0, 1]], [[1, 0], [1, 1]]]).close().unwrap();
        let brute_sl2 = brute_invertible(3).into_iter().filter(|x| x.det() == 1).count();
        assert_eq!(sl2_f3.order(), brute_sl2 as u64);
        assert_eq!(sl2_f3.order(), 24);
    }

    #[test]
    fn closure_rejects_bad_generators() {
        let err = SubgroupSpec::new(m(4), vec![mat(4, [[2, 0], [0, 1]])]).unwrap_err();
        assert_eq!(err, GroupError::NonInvertibleGenerator { index: 0, det: 2, n: 4 });
    }

    #[test]
    fn ceiling_is_enforced() {
        let err = close_with_limit(&SubgroupSpec::full_gl2(m(5)), 100).unwrap_err();
        assert_eq!(err, GroupError::TooLarge { n: 5, limit: 100 });
    }

    #[test]
    fn gl2_orders() {
        assert_eq!(gl2_order(1), 1);
        assert_eq!(gl2_order(2), brute_invertible(2).len() as u64);
        assert_eq!(gl2_order(3), brute_invertible(3).len() as u64);
        assert_eq!(gl2_order(3), 48);
        let at8 = brute_invertible(8).len() as u64;
        assert_eq!(gl2_order(24), at8 * 48);
        assert_eq!(gl2_order(24), 73728);
    }

    #[test]
    fn full_and_special_generators() {
        for n in 1..=12 {
            let full = SubgroupSpec::full_gl2(m(n)).close().unwrap();
            assert_eq!(full.order(), gl2_order(n), "GL2 at {n}");
            let sl2 = SubgroupSpec::sl2(m(n)).close().unwrap();
            let phi = m(n).units().len() as u64;
            assert_eq!(sl2.order() * phi, gl2_order(n), "SL2 at {n}");
        }
    }

    #[test]
    fn index_examples() {
        assert_eq!(SubgroupSpec::full_gl2(m(5)).close().unwrap().index_in_gl2(), 1);
        assert_eq!(SubgroupSpec::sl2(m(5)).close().unwrap().index_in_gl2(), 4);
        assert_eq!(SubgroupSpec::trivial(m(2)).close().unwrap().index_in_gl2(), 6);
    }

    #[test]
    fn neg_identity_examples() {
        let g2 = spec(2, &[[[1, 1], [0, 1]]]).close().unwrap();
        assert_eq!(g2.adjoin_neg_identity().unwrap(), g2);
        let h3 = SubgroupSpec::trivial(m(3)).close().unwrap().adjoin_neg_identity().unwrap();
        assert_eq!(h3.order(), 2);
        assert!(h3.contains(&Mat2::neg_identity(m(3))));
        let with_neg = SubgroupSpec::sl2(m(7)).close().unwrap();
        assert_eq!(with_neg.adjoin_neg_identity().unwrap().order(), with_neg.order());
    }

    #[test]
    fn projection_examples() {
        let full4 = SubgroupSpec::full_gl2(m(4)).close().unwrap();
        assert!(full4.project(2).unwrap().is_full());
        let triv = SubgroupSpec::trivial(m(12)).close().unwrap();
        assert_eq!(triv.project(6).unwrap().order(), 1);
        assert!(matches!(
            triv.project(5),
            Err(GroupError::Arith(ArithError::NotDivisor { d: 5, n: 12 }))
        ));
    }

    // sgn on GL2(F2) via its permutation action on the three nonzero vectors
    fn sign_f2(x: &Mat2) -> i32 {
        let vs = [(1u32, 0u32), (0, 1), (1, 1)];
        let image: Vec<usize> = vs
            .iter()
            .map(|&(a, b)| {
                let r = x.rows();
                let w = ((r[0][0] * a + r[0][1] * b) % 2, (r[1][0] * a + r[1][1] * b) % 2);
                vs.iter().position(|&v| v == w).unwrap()
            })
            .collect();
        let inversions = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| image[i] > image[j])
            .count();
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn chi_f3(det: u32) -> i32 {
        if det == 1 {
            1
        } else {
            -1
        }
    }

    fn sign_det_gamma() -> GroupTable {
        let pair = CrtPair::new(2, 3).unwrap();
        let mut elems = Vec::new();
        for g in brute_invertible(2) {
            for h in brute_invertible(3) {
                if sign_f2(&g) == chi_f3(h.det()) {
                    elems.push(pair.join(&g, &h).unwrap());
                }
            }
        }
        assert_eq!(elems.len(), 144);
        GroupTable::from_elements(m(6), elems).unwrap()
    }

    #[test]
    fn kernel_fiber_examples() {
        let full6 = SubgroupSpec::full_gl2(m(6)).close().unwrap();
        assert!(kernel_fiber(&full6, Side::A, 2, 3).unwrap().is_full());
        let gamma = sign_det_gamma();
        assert_eq!(gamma.order(), 144);
        let n_a = kernel_fiber(&gamma, Side::A, 2, 3).unwrap();
        assert_eq!(n_a.order(), 3);
        assert!(n_a.elements().all(|x| sign_f2(&x) == 1));
        let n_b = kernel_fiber(&gamma, Side::B, 2, 3).unwrap();
        assert_eq!(n_b.order(), 24);
        let trivial = SubgroupSpec::trivial(m(6)).close().unwrap();
        assert_eq!(kernel_fiber(&trivial, Side::A, 2, 3).unwrap().order(), 1);
        assert!(kernel_fiber(&trivial, Side::A, 2, 4).is_err());
    }

    #[test]
    fn generation_examples() {
        let g = spec(2, &[[[0, 1], [1, 0]], [[1, 1], [0, 1]]]).close().unwrap();
        let none = SubgroupSpec::trivial(m(2)).close().unwrap();
        assert!(generates_whole(&g, g.generators(), &none).unwrap());
        let a3 = spec(2, &[[[0, 1], [1, 1]]]).close().unwrap();
        assert_eq!(a3.order(), 3);
        let stab = [Mat2::identity(m(2)), mat(2, [[1, 1], [0, 1]])];
        assert!(generates_whole(&g, &stab, &a3).unwrap());
        assert!(!generates_whole(&g, &[Mat2::identity(m(2))], &a3).unwrap());
        let outsider = spec(2, &[[[1, 1], [0, 1]]]).close().unwrap();
        assert!(generates_whole(&a3, outsider.generators(), &none).is_err());
    }

    #[test]
    fn commutator_examples() {
        let c2 = commutator_subgroup(2).unwrap();
        assert_eq!(c2.order(), 3);
        let c3 = commutator_subgroup(3).unwrap();
        assert_eq!(c3, SubgroupSpec::sl2(m(3)).close().unwrap());
        let c4 = commutator_subgroup(4).unwrap();
        assert!(c4.contains(&mat(4, [[1, 2], [0, 1]])));
        assert!(c4.contains(&mat(4, [[1, 0], [2, 1]])));
    }

    #[test]
    fn commutator_routes_agree() {
        for n in [2u32, 3, 4, 5, 6] {
            let full = SubgroupSpec::full_gl2(m(n)).close().unwrap();
            assert_eq!(
                commutator_subgroup_all_pairs(&full).unwrap(),
                commutator_subgroup(n).unwrap(),
                "n = {n}"
            );
        }
        let borel = spec(5, &[[[2, 1], [0, 1]], [[1, 0], [0, 3]]]).close().unwrap();
        assert_eq!(
            commutator_subgroup_all_pairs(&borel).unwrap(),
            commutator_subgroup_of(&borel).unwrap()
        );
    }

    // direct route: enumerate K(d) and test membership
    fn level_by_kernel_containment(g: &GroupTable) -> u32 {
        let modulus = g.modulus();
        let n = modulus.n();
        let full = SubgroupSpec::full_gl2(modulus).close().unwrap();
        for d in modulus.divisors() {
            let contained = full
                .elements()
                .filter(|x| x.reduce_level(d).unwrap().is_identity())
                .all(|x| g.contains(&x));
            if contained {
                return d;
            }
        }
        n
    }

    #[test]
    fn level_examples() {
        let full12 = SubgroupSpec::full_gl2(m(12));
        assert_eq!(subgroup_level(&full12).unwrap(), 1);
        // full preimage in GL2(Z/4) of the trivial group mod 2
        let k2: Vec<Mat2> = SubgroupSpec::full_gl2(m(4))
            .close()
            .unwrap()
            .elements()
            .filter(|x| x.reduce_level(2).unwrap().is_identity())
            .collect();
        let k2 = GroupTable::from_elements(m(4), k2).unwrap();
        assert_eq!(subgroup_level(&k2).unwrap(), 2);
        assert_eq!(level_by_kernel_containment(&k2), 2);
    }

    #[test]
    fn index_two_subgroup_at_four_has_level_four() {
        // kernel of a character GL2(Z/4) -> {±1} not factoring through level 2
        let full = SubgroupSpec::full_gl2(m(4)).close().unwrap();
        let even: Vec<Mat2> = full.elements().filter(|x| x.det() == 1).collect();
        let sl = GroupTable::from_elements(m(4), even).unwrap();
        assert_eq!(sl.index_in_gl2(), 2);
        assert_eq!(level_by_kernel_containment(&sl), 4);
        assert_eq!(subgroup_level(&sl).unwrap(), 4);
    }
}
