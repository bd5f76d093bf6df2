//! Kernels of reduction maps via Schreier generators.
//!
//! For g ≤ GL₂(ℤ/nℤ) and d | n, the kernel of g → g mod d is generated by
//! t_x · s · t_{xs}⁻¹ where t is a transversal indexed by the image. Only the
//! image (at the smaller level d) is enumerated; the kernel lives inside
//! K(d) and is small. This gives exact orders and CRT fiber kernels without
//! materializing the group at the top level.

use crate::modarith::{mat_inv, mul_keys, reduce_raw, unpack, CrtPair, Mat2, Reduce};

use super::{
    close, gl2_order, max_group_size, GroupError, GroupTable, KeyMap, Result, SubgroupSpec,
};

/// The image of a subgroup at level d together with its reduction kernel.
#[derive(Debug, Clone)]
pub struct ReductionKernel {
    /// g mod d, enumerated.
    pub image: GroupTable,
    /// {x ∈ g : x ≡ I mod d}, at the original level.
    pub kernel: GroupTable,
}

impl ReductionKernel {
    pub fn group_order(&self) -> u64 {
        self.image.order() * self.kernel.order()
    }
}

pub fn reduction_kernel(spec: &SubgroupSpec, d: u32) -> Result<ReductionKernel> {
    let modulus = spec.modulus;
    let n = modulus.n();
    let target = modulus.divisor(d)?;
    let limit = max_group_size();

    let mut gens: Vec<Mat2> = spec.generators.clone();
    gens.sort_unstable_by_key(Mat2::key);
    gens.dedup();
    let lifted: Vec<u64> = gens.iter().map(Mat2::key).collect();
    let reduced: Vec<u64> = gens
        .iter()
        .map(|g| g.reduce_level(d).map(|r| r.key()))
        .collect::<std::result::Result<_, _>>()?;

    let identity_d = Mat2::identity(target).key();
    let identity_n = Mat2::identity(modulus).key();
    let mut image = vec![identity_d];
    let mut lifts = vec![identity_n];
    let mut index = KeyMap::default();
    index.insert(identity_d, 0u32);

    let mut kernel = close(&SubgroupSpec::trivial(modulus))?;
    let mut inverse_cache: KeyMap<u64> = KeyMap::default();

    let mut head = 0;
    while head < image.len() {
        let x = image[head];
        let t = lifts[head];
        head += 1;
        for (&s, &r) in lifted.iter().zip(&reduced) {
            let y = mul_keys(d, x, r);
            let lift = mul_keys(n, t, s);
            match index.get(&y) {
                None => {
                    if image.len() >= limit {
                        return Err(GroupError::TooLarge { n: d, limit });
                    }
                    index.insert(y, image.len() as u32);
                    image.push(y);
                    lifts.push(lift);
                }
                Some(&j) => {
                    let tj = lifts[j as usize];
                    let tj_inv = *inverse_cache.entry(tj).or_insert_with(|| {
                        mat_inv(&Mat2::from_key(modulus, tj))
                            .expect("transversal elements are invertible")
                            .key()
                    });
                    let schreier = mul_keys(n, lift, tj_inv);
                    if !kernel.contains_key(schreier) {
                        let g = Mat2::from_key(modulus, schreier);
                        kernel = close(&kernel.spec.with_generator(g)?)?;
                    }
                }
            }
        }
    }

    let image_spec = SubgroupSpec {
        modulus: target,
        generators: gens.iter().map(|g| g.reduce_level(d)).collect::<std::result::Result<_, _>>()?,
    };
    let image = GroupTable::from_bfs(image_spec, image);
    Ok(ReductionKernel { image, kernel })
}

impl GroupTable {
    fn from_bfs(spec: SubgroupSpec, elements: Vec<u64>) -> GroupTable {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, i as u32))
            .collect();
        GroupTable {
            spec,
            elements,
            index,
        }
    }
}

/// Exact |g| without enumerating g at its own level.
///
/// Reduces along the prime whose removal leaves the largest kernel, so the
/// enumerated image is as small as possible.
pub fn subgroup_order(spec: &SubgroupSpec) -> Result<u64> {
    let n = spec.modulus.n();
    if n == 1 || spec.generators.is_empty() {
        return Ok(1);
    }
    let best = spec
        .modulus
        .prime_powers()
        .map(|(p, k)| {
            let kernel_bound = if k >= 2 {
                (p as u64).pow(4)
            } else {
                gl2_order(p)
            };
            (kernel_bound, p)
        })
        .max();
    let Some((_, p)) = best else {
        return Ok(1);
    };
    let d = n / p;
    if d == 1 {
        return Ok(close(spec)?.order());
    }
    Ok(reduction_kernel(spec, d)?.group_order())
}

/// The CRT fiber data of g mod ab for coprime a, b > 1: the components
/// A = g mod a and B = g mod b, and the fiber kernels
/// N_A = {x ∈ A : (x, I) ∈ Γ}, N_B = {y ∈ B : (I, y) ∈ Γ}.
#[derive(Debug, Clone)]
pub struct FiberKernels {
    pub pair: CrtPair,
    pub a_group: GroupTable,
    pub b_group: GroupTable,
    pub n_a: GroupTable,
    pub n_b: GroupTable,
}

impl FiberKernels {
    /// |Γ| = |A| · |N_B|.
    pub fn gamma_order(&self) -> u64 {
        self.a_group.order() * self.n_b.order()
    }

    pub fn index_a(&self) -> u64 {
        self.a_group.order() / self.n_a.order()
    }

    pub fn index_b(&self) -> u64 {
        self.b_group.order() / self.n_b.order()
    }

    /// [A : N_A] = [B : N_B], which every fiber product satisfies.
    pub fn goursat_holds(&self) -> bool {
        self.index_a() == self.index_b()
    }

    /// Γ = A × B.
    pub fn is_full_product(&self) -> bool {
        self.n_a.order() == self.a_group.order() && self.n_b.order() == self.b_group.order()
    }
}

/// Fiber kernels of the image of `spec` at level ab (ab must divide its level).
pub fn fiber_kernels(spec: &SubgroupSpec, a: u32, b: u32) -> Result<FiberKernels> {
    let pair = CrtPair::new(a, b)?;
    let at_ab = spec.project(pair.ab().n())?;
    let ker_to_a = reduction_kernel(&at_ab, a)?;
    let ker_to_b = reduction_kernel(&at_ab, b)?;
    let n_b = transport(&ker_to_a.kernel, b)?;
    let n_a = transport(&ker_to_b.kernel, a)?;
    Ok(FiberKernels {
        pair,
        a_group: ker_to_a.image,
        b_group: ker_to_b.image,
        n_a,
        n_b,
    })
}

// Reduction is injective on a CRT kernel, so reducing generators is enough.
fn transport(kernel: &GroupTable, level: u32) -> Result<GroupTable> {
    let target = kernel.spec.modulus.divisor(level)?;
    let gens: Vec<Mat2> = kernel
        .spec
        .generators
        .iter()
        .map(|g| Mat2::from_raw(target, reduce_raw(level, unpack(g.key()))))
        .collect();
    close(&SubgroupSpec::new(target, gens)?)
}
