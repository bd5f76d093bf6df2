//! Seeded random subgroups and a few fiber-product constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grouptab::{Generated, SubgroupSpec};
use crate::modarith::{CrtPair, Mat2, Modulus};

use super::schema::CurveRecord;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, modulus: Modulus) -> Mat2 {
    let n = modulus.n() as i64;
    loop {
        let e: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..n));
        let m = Mat2::new(modulus, [[e[0], e[1]], [e[2], e[3]]]);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Subgroup generated by `count` uniform elements of GL₂(ℤ/nℤ).
pub fn random_subgroup<R: Rng + ?Sized>(rng: &mut R, modulus: Modulus, count: usize) -> SubgroupSpec {
    let gens = (0..count).map(|_| random_invertible(rng, modulus)).collect();
    SubgroupSpec::new(modulus, gens).expect("generators are invertible")
}

/// `count` records at level `m0`, each with 1 to 4 random generators.
pub fn random_corpus(seed: u64, m0: u32, count: usize) -> Vec<CurveRecord> {
    let modulus = Modulus::new(m0).expect("valid level");
    let mut rng = rng(seed ^ (m0 as u64) << 32);
    (0..count)
        .map(|i| {
            let k = rng.gen_range(1..=4);
            let spec = random_subgroup(&mut rng, modulus, k);
            CurveRecord::from_spec(format!("rand-{m0}-{i}"), &spec, None)
        })
        .collect()
}

/// Records at levels drawn uniformly from `1..=max_m0`.
pub fn mixed_corpus(seed: u64, max_m0: u32, count: usize) -> Vec<CurveRecord> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let m0 = rng.gen_range(1..=max_m0);
            let modulus = Modulus::new(m0).expect("valid level");
            let k = rng.gen_range(1..=4);
            let spec = random_subgroup(&mut rng, modulus, k);
            CurveRecord::from_spec(format!("mix-{i}"), &spec, None)
        })
        .collect()
}

fn join_all(pair: &CrtPair, pairs: &[(Mat2, Mat2)]) -> SubgroupSpec {
    let gens = pairs
        .iter()
        .map(|(x, y)| pair.join(x, y).expect("components at the pair's levels"))
        .collect();
    SubgroupSpec::new(pair.ab(), gens).expect("joins of units are units")
}

/// {(x, y) ∈ GL₂(𝔽₂) × GL₂(𝔽₃) : sgn(x) = χ(det y)} at level 6, with
/// GL₂(𝔽₂) ≅ S₃ and χ the quadratic character of 𝔽₃ˣ.
pub fn sign_det_fiber_product() -> SubgroupSpec {
    let pair = CrtPair::new(2, 3).expect("coprime");
    let (m2, m3) = (pair.a(), pair.b());
    let i2 = Mat2::identity(m2);
    let i3 = Mat2::identity(m3);
    let three_cycle = Mat2::new(m2, [[0, 1], [1, 1]]);
    let transposition = Mat2::new(m2, [[0, 1], [1, 0]]);
    join_all(
        &pair,
        &[
            (three_cycle, i3),
            (i2, Mat2::new(m3, [[1, 1], [0, 1]])),
            (i2, Mat2::new(m3, [[1, 0], [1, 1]])),
            (transposition, Mat2::new(m3, [[2, 0], [0, 1]])),
        ],
    )
}

/// The graph {(π(y), y)} of a surjection π : B → GL₂(ℤ/aℤ) at level a·|B's level|,
/// found by search over images of B's generators. `None` if no surjection exists.
pub fn graph_of_surjection(b: &SubgroupSpec, a: u32) -> Option<SubgroupSpec> {
    let pair = CrtPair::new(a, b.modulus().n()).ok()?;
    let targets: Vec<Mat2> = SubgroupSpec::full_gl2(pair.a()).close().ok()?.elements().collect();
    let b_order = b.order().ok()?;
    let full_a = crate::grouptab::gl2_order(a);
    let k = b.generators().len();
    let mut choice = vec![0usize; k];
    loop {
        let pairs: Vec<(Mat2, Mat2)> = choice
            .iter()
            .zip(b.generators())
            .map(|(&i, y)| (targets[i], *y))
            .collect();
        let gamma = join_all(&pair, &pairs);
        if gamma.order().ok()? == b_order && gamma.project(a).ok()?.order().ok()? == full_a {
            return Some(gamma);
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return None;
            }
            choice[pos] += 1;
            if choice[pos] < targets.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// GL₂(𝔽₃) at level 6 glued to GL₂(𝔽₂) ≅ S₃ along GL₂(𝔽₃) → PGL₂(𝔽₃) ≅ S₄ → S₃.
/// Stabilizers on the mod-2 side miss the entanglement quotient, yet
/// ⟨G, −I⟩ is transitive on V₆.
pub fn s3_graph_at_six() -> SubgroupSpec {
    let b = SubgroupSpec::full_gl2(Modulus::new(3).expect("valid"));
    graph_of_surjection(&b, 2).expect("GL2(F3) surjects onto S3")
}

/// Hand-built subgroups that exercise specific certifier outcomes.
pub fn constructions() -> Vec<(&'static str, SubgroupSpec)> {
    vec![
        ("sign-det-6", sign_det_fiber_product()),
        ("s3-graph-6", s3_graph_at_six()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::{certify_unique, check_ef_star, unique_primitive_direct, Verdict};
    use crate::grouptab::fiber_kernels;

    #[test]
    fn corpora_are_seeded() {
        assert_eq!(random_corpus(7, 12, 20), random_corpus(7, 12, 20));
        assert_ne!(random_corpus(7, 12, 20), random_corpus(8, 12, 20));
        let c = mixed_corpus(1, 24, 50);
        assert!(c.iter().all(|r| (1..=24).contains(&r.m0)));
    }

    #[test]
    fn sign_det_product_structure() {
        let g = sign_det_fiber_product();
        assert_eq!(g.order().unwrap(), 144);
        let fk = fiber_kernels(&g, 2, 3).unwrap();
        assert_eq!((fk.n_a.order(), fk.n_b.order()), (3, 24));
        assert!(certify_unique(&g).unwrap().passed());
        assert!(check_ef_star(&g).unwrap().is_some());
    }

    #[test]
    fn s3_graph_is_an_incompleteness_witness() {
        let g = s3_graph_at_six();
        assert_eq!(g.order().unwrap(), 48);
        let cert = certify_unique(&g).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(unique_primitive_direct(&g).unwrap());
    }
}
