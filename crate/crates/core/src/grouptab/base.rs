//! Group orders from the base (e₁, e₂).
//!
//! Only the identity fixes both e₁ and e₂, so |g| = |g·e₁| · |Stab(e₁)·e₂|.
//! Stab(e₁) is generated by the Schreier generators t_{sx}⁻¹ s t_x, and a
//! Schreier generator that preserves the current e₂-orbit is not needed to
//! grow it.

use crate::modarith::{act_raw, mul_raw, Modulus};

use super::SubgroupSpec;

fn inverse_raw(modulus: Modulus, m: [u32; 4]) -> [u32; 4] {
    let n = modulus.n() as u64;
    let [a, b, c, d] = m.map(u64::from);
    let det = ((a * d % n + n - b * c % n) % n) as u32;
    let inv = modulus.inverse(det).expect("group elements are invertible") as u64;
    [
        (d * inv % n) as u32,
        ((n - b) % n * inv % n) as u32,
        ((n - c) % n * inv % n) as u32,
        (a * inv % n) as u32,
    ]
}

struct Orbit {
    n: u32,
    slot: Vec<bool>,
    points: Vec<(u32, u32)>,
}

impl Orbit {
    fn new(n: u32) -> Self {
        Orbit {
            n,
            slot: vec![false; (n as usize).pow(2)],
            points: Vec::new(),
        }
    }

    fn insert(&mut self, p: (u32, u32)) -> bool {
        let i = (p.0 * self.n + p.1) as usize;
        !std::mem::replace(&mut self.slot[i], true) && {
            self.points.push(p);
            true
        }
    }

    fn contains(&self, p: (u32, u32)) -> bool {
        self.slot[(p.0 * self.n + p.1) as usize]
    }

    fn close(&mut self, gens: &[[u32; 4]]) {
        let mut head = 0;
        while head < self.points.len() {
            let (a, b) = self.points[head];
            head += 1;
            for &g in gens {
                self.insert(act_raw(self.n, g, a, b));
            }
        }
    }
}

/// Exact |g|, in time roughly |g·e₁| · #gens · |Stab(e₁)·e₂|.
pub fn base_order(spec: &SubgroupSpec) -> u64 {
    let modulus = spec.modulus;
    let n = modulus.n();
    if n == 1 {
        return 1;
    }
    let gens: Vec<[u32; 4]> = spec.generators.iter().map(|g| g.raw()).collect();
    let identity = [1, 0, 0, 1];

    // e₁-orbit with transversal t_x · e₁ = x
    let mut first = Orbit::new(n);
    let mut transversal: Vec<[u32; 4]> = vec![identity];
    let mut index = vec![u32::MAX; (n as usize).pow(2)];
    first.insert((1, 0));
    index[n as usize] = 0;
    let mut head = 0;
    while head < first.points.len() {
        let (a, b) = first.points[head];
        let t = transversal[head];
        head += 1;
        for &g in &gens {
            let y = act_raw(n, g, a, b);
            if first.insert(y) {
                index[(y.0 * n + y.1) as usize] = transversal.len() as u32;
                transversal.push(mul_raw(n, g, t));
            }
        }
    }

    let mut inverses: Vec<Option<[u32; 4]>> = vec![None; transversal.len()];
    let mut schreier: Vec<[u32; 4]> = Vec::new();
    for (i, &(a, b)) in first.points.iter().enumerate() {
        let t = transversal[i];
        for &g in &gens {
            let y = act_raw(n, g, a, b);
            let j = index[(y.0 * n + y.1) as usize] as usize;
            let t_inv = *inverses[j].get_or_insert_with(|| inverse_raw(modulus, transversal[j]));
            let h = mul_raw(n, t_inv, mul_raw(n, g, t));
            if h != identity {
                schreier.push(h);
            }
        }
    }
    schreier.sort_unstable();
    schreier.dedup();

    // A generator skipped early may move points added later, hence the
    // repeat until a full pass keeps the orbit fixed.
    let mut kept: Vec<[u32; 4]> = Vec::new();
    let mut second = Orbit::new(n);
    second.insert((0, 1));
    loop {
        let before = second.points.len();
        for &h in &schreier {
            let preserves = second
                .points
                .iter()
                .all(|&(c, d)| second.contains(act_raw(n, h, c, d)));
            if !preserves {
                kept.push(h);
                second.close(&kept);
            }
        }
        if second.points.len() == before {
            break;
        }
    }
    first.points.len() as u64 * second.points.len() as u64
}
