//! Closed points above j(E) on X₁(n) for n | m₀, natural-map degrees,
//! the primitive-point set, and the counting bounds.
//!
//! A closed point at level n is an orbit of H(n) = ⟨G(n), −I⟩ on V_n. The
//! natural map X₁(n) → X₁(a) sends [E, P] to [E, (n/a)P]; in coordinates
//! induced from the level-n basis this is v ↦ v mod a.

use serde::{Deserialize, Serialize};

use crate::certifier::{CertifyError, Vec2Repr};
use crate::grouptab::{commutator_subgroup, gl2_order, subgroup_level, Generated, SubgroupSpec};
use crate::modarith::{count_exact_order, Modulus, Reduce, Vec2};
use crate::orbitcalc::{is_transitive, orbit_decomposition, orbit_of, point_degree, OrbitDecomposition};

pub type Result<T, E = CertifyError> = std::result::Result<T, E>;

/// deg(X₁(ab) → X₁(a)) = c · b² ∏_{p | b, p ∤ a} (1 − 1/p²),
/// with c = ½ when a ≤ 2 < ab and c = 1 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalMapDegree {
    pub source: u32,
    pub target: u32,
    pub b: u32,
    pub halved: bool,
    pub degree: u64,
}

pub fn deg_natural_map(a: u32, b: u32) -> NaturalMapDegree {
    assert!(a >= 1 && b >= 1, "levels are positive");
    let source = a * b;
    let halved = a <= 2 && source > 2;
    let mut numer = (b as u64).pow(2);
    let b_mod = Modulus::new(b).expect("b within the modulus range");
    for p in b_mod.primes().filter(|&p| a % p != 0) {
        let p2 = (p as u64).pow(2);
        numer = numer / p2 * (p2 - 1);
    }
    let degree = if halved {
        debug_assert!(numer % 2 == 0);
        numer / 2
    } else {
        numer
    };
    NaturalMapDegree {
        source,
        target: a,
        b,
        halved,
        degree,
    }
}

/// A closed point above j(E) at level n, named by its least orbit member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPoint {
    pub level: u32,
    pub representative: Vec2Repr,
    pub orbit_size: u64,
    pub degree: u64,
}

fn h_at(g: &SubgroupSpec, n: u32) -> Result<SubgroupSpec> {
    Ok(g.project(n)?.with_neg_identity())
}

fn points_of(decomp: &OrbitDecomposition, n: u32) -> Result<Vec<ClosedPoint>> {
    decomp
        .orbits()
        .iter()
        .map(|o| {
            Ok(ClosedPoint {
                level: n,
                representative: o.representative.into(),
                orbit_size: o.size(),
                degree: point_degree(o.size(), n)?,
            })
        })
        .collect()
}

fn spec_of<G: Generated + ?Sized>(g: &G) -> Result<SubgroupSpec> {
    Ok(SubgroupSpec::new(g.modulus(), g.generators().to_vec())?)
}

/// One closed point per H(n)-orbit on V_n.
pub fn closed_points_above_j<G: Generated + ?Sized>(g: &G, n: u32) -> Result<Vec<ClosedPoint>> {
    let h = h_at(&spec_of(g)?, n)?;
    points_of(&orbit_decomposition(&h), n)
}

/// Image of a closed point at level n under X₁(n) → X₁(a).
pub fn natural_map_image<G: Generated + ?Sized>(
    g: &G,
    point: &ClosedPoint,
    a: u32,
) -> Result<ClosedPoint> {
    let spec = spec_of(g)?;
    let level = Modulus::new(point.level)?;
    let rep = Vec2::new(level, point.representative.0 as i64, point.representative.1 as i64);
    let image = rep.reduce_level(a)?;
    let h_a = h_at(&spec, a)?;
    let orbit = orbit_of(&h_a, &image)?;
    Ok(ClosedPoint {
        level: a,
        representative: orbit.representative.into(),
        orbit_size: orbit.size(),
        degree: point_degree(orbit.size(), a)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEntry {
    #[serde(flatten)]
    pub point: ClosedPoint,
    pub primitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub n: u32,
    /// r_n, the number of closed points above j(E) at this level.
    pub r: usize,
    pub points: Vec<PointEntry>,
}

/// Exhaustive primitive-point data for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveReport {
    pub m0: u32,
    pub adelic_index: Option<u64>,
    pub levels: Vec<LevelEntry>,
    pub primitive_count: usize,
    pub bounds: BoundRecord,
}

impl PrimitiveReport {
    pub fn primitive_points(&self) -> impl Iterator<Item = &ClosedPoint> {
        self.levels
            .iter()
            .flat_map(|l| l.points.iter())
            .filter(|p| p.primitive)
            .map(|p| &p.point)
    }

    pub fn orbit_sum(&self) -> usize {
        self.levels.iter().map(|l| l.r).sum()
    }
}

/// Marks x at level n primitive iff deg(x) < deg(f)·deg(f(x)) for every
/// proper divisor a of n.
pub fn enumerate_primitive_points<G: Generated + ?Sized>(
    g: &G,
    adelic_index: Option<u64>,
) -> Result<PrimitiveReport> {
    let spec = spec_of(g)?;
    let modulus = spec.modulus();
    let divisors = modulus.divisors();
    let decomps: Vec<OrbitDecomposition> = divisors
        .iter()
        .map(|&n| Ok(orbit_decomposition(&h_at(&spec, n)?)))
        .collect::<Result<_>>()?;

    let mut levels = Vec::with_capacity(divisors.len());
    for (i, &n) in divisors.iter().enumerate() {
        let points = points_of(&decomps[i], n)?;
        let mut entries = Vec::with_capacity(points.len());
        for point in points {
            let rep = Vec2::new(
                decomps[i].modulus(),
                point.representative.0 as i64,
                point.representative.1 as i64,
            );
            let mut primitive = true;
            for (j, &a) in divisors[..i].iter().enumerate() {
                if n % a != 0 {
                    continue;
                }
                let image = rep.reduce_level(a)?;
                let orbit = decomps[j]
                    .orbit_containing(&image)
                    .expect("reduction maps V_n onto V_a");
                let image_degree = point_degree(orbit.size(), a)?;
                let map = deg_natural_map(a, n / a);
                if point.degree >= map.degree * image_degree {
                    primitive = false;
                    break;
                }
            }
            entries.push(PointEntry { point, primitive });
        }
        levels.push(LevelEntry {
            n,
            r: entries.len(),
            points: entries,
        });
    }
    let primitive_count = levels
        .iter()
        .flat_map(|l| &l.points)
        .filter(|p| p.primitive)
        .count();
    let bounds = bounds_with_orbits(modulus.n(), adelic_index, Some((&spec, &decomps)))?;
    Ok(PrimitiveReport {
        m0: modulus.n(),
        adelic_index,
        levels,
        primitive_count,
        bounds,
    })
}

/// Per-level orbit counts against their index bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelBound {
    pub n: u32,
    pub r: usize,
    /// |V_n|, the trivial per-level bound.
    pub exact_order_count: u64,
    /// [GL₂(ℤ/nℤ) : H(n)].
    pub h_index: u64,
    /// ⌊[GL₂(ℤ/m₀ℤ) : G(m₀)] / 2⌋, valid for n < m₀ when the image has level m₀.
    pub half_index_bound: Option<u64>,
}

/// Bounds computed from the finite-level image (standing in for I(E)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteLevelBounds {
    pub level_of_image: u32,
    pub finite_index: u64,
    pub finite_index_bound: u64,
    pub orbit_sum: usize,
    pub per_level: Vec<LevelBound>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub m0: u32,
    pub sigma0: u32,
    /// m₀² = Σ_{n | m₀} |V_n|.
    pub crude: u64,
    /// ⌊1 + I·σ₀(m₀)/2⌋ for the supplied adelic index I.
    pub index_bound: Option<u64>,
    pub adelic_index: Option<u64>,
    pub finite: Option<FiniteLevelBounds>,
}

impl BoundRecord {
    /// min{m₀², 1 + I·σ₀/2}, or m₀² when no index is known.
    pub fn best(&self) -> u64 {
        self.index_bound.map_or(self.crude, |b| b.min(self.crude))
    }

    /// Tab-separated `m0, m0^2, 1+I*sigma0/2, min` row.
    pub fn table_row(&self) -> String {
        let index = self
            .index_bound
            .map_or_else(|| "-".to_string(), |b| b.to_string());
        format!("{}\t{}\t{}\t{}", self.m0, self.crude, index, self.best())
    }

    pub const TABLE_HEADER: &'static str = "m0\tm0^2\t1+I*sigma0/2\tmin";
}

// The count is an integer, so rounding the half-integer bound down is exact.
fn half_index_bound(sigma0: u32, index: u64) -> u64 {
    1 + index * sigma0 as u64 / 2
}

/// Bounds on |𝒫(E)| from m₀ alone, from a supplied adelic index, and, when
/// the image is given, level by level from its finite-level indices.
pub fn bounds(m0: u32, adelic_index: Option<u64>, g: Option<&SubgroupSpec>) -> Result<BoundRecord> {
    match g {
        None => bounds_with_orbits(m0, adelic_index, None),
        Some(spec) => {
            let decomps: Vec<OrbitDecomposition> = spec
                .modulus()
                .divisors()
                .into_iter()
                .map(|n| Ok(orbit_decomposition(&h_at(spec, n)?)))
                .collect::<Result<_>>()?;
            bounds_with_orbits(m0, adelic_index, Some((spec, &decomps)))
        }
    }
}

fn bounds_with_orbits(
    m0: u32,
    adelic_index: Option<u64>,
    image: Option<(&SubgroupSpec, &[OrbitDecomposition])>,
) -> Result<BoundRecord> {
    let modulus = Modulus::new(m0)?;
    let sigma0 = modulus.sigma0();
    let finite = match image {
        None => None,
        Some((spec, decomps)) => {
            let level_of_image = subgroup_level(spec)?;
            let finite_index = spec.index_in_gl2()?;
            let mut per_level = Vec::new();
            for (n, decomp) in modulus.divisors().into_iter().zip(decomps) {
                let h_index = gl2_order(n) / h_at(spec, n)?.order()?;
                let half = (level_of_image == m0 && n < m0).then_some(finite_index / 2);
                per_level.push(LevelBound {
                    n,
                    r: decomp.count(),
                    exact_order_count: count_exact_order(n),
                    h_index,
                    half_index_bound: half,
                });
            }
            Some(FiniteLevelBounds {
                level_of_image,
                finite_index,
                finite_index_bound: half_index_bound(sigma0, finite_index),
                orbit_sum: per_level.iter().map(|l| l.r).sum(),
                per_level,
            })
        }
    };
    Ok(BoundRecord {
        m0,
        sigma0,
        crude: (m0 as u64).pow(2),
        index_bound: adelic_index.map(|i| half_index_bound(sigma0, i)),
        adelic_index,
        finite,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SerreVerdict {
    /// Index 2: the commutator subgroup is transitive, so H(m₀) is too.
    Unique,
    /// The commutator witness unexpectedly failed.
    WitnessFailed,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreCertificate {
    pub m0: u32,
    pub adelic_index: u64,
    pub verdict: SerreVerdict,
    pub commutator_order: Option<u64>,
    pub commutator_transitive: Option<bool>,
    pub warning: Option<String>,
}

/// Index-2 shortcut: [GL₂, GL₂] ⊆ G(n) ⊆ H(n), so transitivity of the
/// commutator subgroup on V_{m₀} certifies a unique primitive point.
pub fn serre_certificate(m0: u32, adelic_index: u64) -> Result<SerreCertificate> {
    let modulus = Modulus::new(m0)?;
    if adelic_index != 2 {
        return Ok(SerreCertificate {
            m0,
            adelic_index,
            verdict: SerreVerdict::NotApplicable,
            commutator_order: None,
            commutator_transitive: None,
            warning: None,
        });
    }
    let warning =
        (24 % m0 != 0).then(|| format!("m0 = {m0} does not divide 24, unexpected for index 2"));
    let commutator = commutator_subgroup(modulus.n())?;
    let transitive = is_transitive(&commutator);
    Ok(SerreCertificate {
        m0,
        adelic_index,
        verdict: if transitive {
            SerreVerdict::Unique
        } else {
            SerreVerdict::WitnessFailed
        },
        commutator_order: Some(commutator.order()),
        commutator_transitive: Some(transitive),
        warning,
    })
}
