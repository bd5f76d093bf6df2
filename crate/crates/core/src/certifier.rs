//! Local transitivity (LT), stabilizer-surjectivity (EF), the stricter
//! trivial-entanglement check (EF*), and the certification pipeline.
//!
//! LT and EF act on the image G(n) itself. The direct uniqueness oracle
//! adjoins −I first, since closed points correspond to ⟨G(n), −I⟩-orbits.

use std::time::Instant;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grouptab::{
    fiber_kernels, generates_whole, FiberKernels, GroupError, Generated, Side, SubgroupSpec,
};
use crate::modarith::{count_exact_order, ArithError, Modulus, Vec2};
use crate::orbitcalc::{is_transitive, orbit_decomposition, orbit_of, stabilizer, OrbitError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(
        "Goursat audit failed at ({a},{b}): [A:N_A] = {index_a} but [B:N_B] = {index_b}"
    )]
    InternalInvariantViolation {
        a: u32,
        b: u32,
        index_a: u64,
        index_b: u64,
    },
}

impl From<ArithError> for CertifyError {
    fn from(e: ArithError) -> Self {
        CertifyError::Group(e.into())
    }
}

pub type Result<T, E = CertifyError> = std::result::Result<T, E>;

/// Which prime powers the LT check visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LtMode {
    /// Only ℓᵏ ∥ m₀.
    #[default]
    Top,
    /// Every ℓᵏ | m₀.
    All,
}

/// A prime power where G(ℓᵏ) is not transitive on V_{ℓᵏ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtWitness {
    pub ell: u32,
    pub k: u32,
    pub orbit_size: u64,
    pub expected: u64,
}

/// A coprime pair and side where ⟨Stab(v), N⟩ is a proper subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfWitness {
    pub a: u32,
    pub b: u32,
    pub side: Side,
    pub orbit_rep: Vec2Repr,
}

/// Plain (a, b) pair for serialization of orbit representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vec2Repr(pub u32, pub u32);

impl From<Vec2> for Vec2Repr {
    fn from(v: Vec2) -> Self {
        Vec2Repr(v.a(), v.b())
    }
}

/// A coprime pair where Γ is a proper subgroup of A × B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfStarWitness {
    pub a: u32,
    pub b: u32,
    pub gamma_order: u64,
    pub product_order: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Witness {
    #[serde(rename = "LT")]
    Lt(LtWitness),
    #[serde(rename = "EF")]
    Ef(EfWitness),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailStage {
    #[serde(rename = "LT")]
    Lt,
    #[serde(rename = "EF")]
    Ef,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub lt_ms: f64,
    pub ef_ms: f64,
}

/// Outcome of the LT-then-EF pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub fail_stage: Option<FailStage>,
    pub witness: Option<Witness>,
    /// Set when m₀ = 1, where the only closed point is the one on X₁(1).
    pub trivial_level: bool,
    pub timings: StageTimings,
}

impl Certificate {
    fn pass(timings: StageTimings) -> Self {
        Certificate {
            verdict: Verdict::Pass,
            fail_stage: None,
            witness: None,
            trivial_level: false,
            timings,
        }
    }

    fn fail(witness: Witness, timings: StageTimings) -> Self {
        let stage = match witness {
            Witness::Lt(_) => FailStage::Lt,
            Witness::Ef(_) => FailStage::Ef,
        };
        Certificate {
            verdict: Verdict::Fail,
            fail_stage: Some(stage),
            witness: Some(witness),
            trivial_level: false,
            timings,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// The prime powers visited by LT, ascending in (ℓ, k).
pub fn lt_levels(modulus: Modulus, mode: LtMode) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for (p, e) in modulus.prime_powers() {
        match mode {
            LtMode::Top => out.push((p, e)),
            LtMode::All => out.extend((1..=e).map(|k| (p, k))),
        }
    }
    out
}

/// Transitivity of G(ℓᵏ) on V_{ℓᵏ} at each visited prime power.
pub fn check_lt<G: Generated + ?Sized>(g: &G, mode: LtMode) -> Result<Option<LtWitness>> {
    let spec = as_spec(g)?;
    for (ell, k) in lt_levels(spec.modulus(), mode) {
        let q = ell.pow(k);
        let local = spec.project(q)?;
        let orbit = orbit_of(&local, &Vec2::e1(local.modulus()))?;
        let expected = count_exact_order(q);
        if orbit.size() != expected {
            return Ok(Some(LtWitness {
                ell,
                k,
                orbit_size: orbit.size(),
                expected,
            }));
        }
    }
    Ok(None)
}

/// Unordered coprime pairs (a, b), 1 < a < b, ab | m₀, ascending in (ab, a).
pub fn coprime_pairs(modulus: Modulus) -> Vec<(u32, u32)> {
    let divisors = modulus.divisors();
    let mut pairs = Vec::new();
    for &a in &divisors {
        for &b in &divisors {
            if 1 < a && a < b && a.gcd(&b) == 1 && modulus.divides(a * b) {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_by_key(|&(a, b)| (a * b, a));
    pairs
}

fn as_spec<G: Generated + ?Sized>(g: &G) -> Result<SubgroupSpec> {
    Ok(SubgroupSpec::new(g.modulus(), g.generators().to_vec())?)
}

/// Orbit representatives on one side where ⟨Stab(v), N⟩ ≠ the side group.
fn failing_reps(fk: &FiberKernels, side: Side) -> Result<Vec<Vec2>> {
    let (group, kernel) = match side {
        Side::A => (&fk.a_group, &fk.n_a),
        Side::B => (&fk.b_group, &fk.n_b),
    };
    // N = whole group makes the condition vacuous
    if kernel.order() == group.order() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for orbit in orbit_decomposition(group).orbits() {
        let stab = stabilizer(group, &orbit.representative)?;
        if !generates_whole(group, &stab, kernel)? {
            out.push(orbit.representative);
        }
    }
    Ok(out)
}

fn pair_data<G: Generated + ?Sized>(g: &G, a: u32, b: u32) -> Result<FiberKernels> {
    let spec = as_spec(g)?;
    let fk = fiber_kernels(&spec, a, b)?;
    if !fk.goursat_holds() {
        return Err(CertifyError::InternalInvariantViolation {
            a,
            b,
            index_a: fk.index_a(),
            index_b: fk.index_b(),
        });
    }
    Ok(fk)
}

/// First EF failure in (ab, a, side, orbit representative) order.
pub fn check_ef<G: Generated + ?Sized>(g: &G) -> Result<Option<EfWitness>> {
    for (a, b) in coprime_pairs(g.modulus()) {
        let fk = pair_data(g, a, b)?;
        for side in [Side::A, Side::B] {
            if let Some(v) = failing_reps(&fk, side)?.first() {
                return Ok(Some(EfWitness {
                    a,
                    b,
                    side,
                    orbit_rep: (*v).into(),
                }));
            }
        }
    }
    Ok(None)
}

/// Every EF failure: one witness per failing (pair, side, orbit), same order
/// as [`check_ef`].
pub fn ef_failures<G: Generated + ?Sized>(g: &G) -> Result<Vec<EfWitness>> {
    let mut out = Vec::new();
    for (a, b) in coprime_pairs(g.modulus()) {
        let fk = pair_data(g, a, b)?;
        for side in [Side::A, Side::B] {
            for v in failing_reps(&fk, side)? {
                out.push(EfWitness {
                    a,
                    b,
                    side,
                    orbit_rep: v.into(),
                });
            }
        }
    }
    Ok(out)
}

/// Trivial entanglement: Γ = A × B for every coprime pair.
pub fn check_ef_star<G: Generated + ?Sized>(g: &G) -> Result<Option<EfStarWitness>> {
    for (a, b) in coprime_pairs(g.modulus()) {
        let fk = pair_data(g, a, b)?;
        if !fk.is_full_product() {
            return Ok(Some(EfStarWitness {
                a,
                b,
                gamma_order: fk.gamma_order(),
                product_order: fk.a_group.order() * fk.b_group.order(),
            }));
        }
    }
    Ok(None)
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// LT at the top prime powers, then EF only if LT passed.
pub fn certify_unique<G: Generated + ?Sized>(g: &G) -> Result<Certificate> {
    certify_unique_with(g, LtMode::Top)
}

pub fn certify_unique_with<G: Generated + ?Sized>(g: &G, mode: LtMode) -> Result<Certificate> {
    let mut timings = StageTimings::default();
    if g.modulus().n() == 1 {
        let mut cert = Certificate::pass(timings);
        cert.trivial_level = true;
        return Ok(cert);
    }
    let start = Instant::now();
    let lt = check_lt(g, mode)?;
    timings.lt_ms = millis(start);
    if let Some(w) = lt {
        return Ok(Certificate::fail(Witness::Lt(w), timings));
    }
    let start = Instant::now();
    let ef = check_ef(g)?;
    timings.ef_ms = millis(start);
    Ok(match ef {
        Some(w) => Certificate::fail(Witness::Ef(w), timings),
        None => Certificate::pass(timings),
    })
}

/// Exact test for a unique primitive point: ⟨G(m₀), −I⟩ transitive on V_{m₀}.
pub fn unique_primitive_direct<G: Generated + ?Sized>(g: &G) -> Result<bool> {
    Ok(is_transitive(&as_spec(g)?.with_neg_identity()))
}
