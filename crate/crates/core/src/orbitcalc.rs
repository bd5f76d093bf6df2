//! Orbits of subgroups of GL₂(ℤ/nℤ) on V_n, the vectors of exact order n.

use num_integer::Integer;
use thiserror::Error;

use crate::grouptab::{Generated, GroupTable};
use crate::modarith::{act_raw, count_exact_order, ArithError, Mat2, Modulus, Vec2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("orbit of odd size {orbit_size} at level {n} > 2; -I was not adjoined")]
    OddOrbit { orbit_size: u64, n: u32 },
}

/// V_n in lexicographic order.
#[derive(Debug, Clone)]
pub struct ExactOrderSet {
    modulus: Modulus,
    vectors: Vec<Vec2>,
}

impl ExactOrderSet {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn vectors(&self) -> &[Vec2] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn exact_order_vectors(modulus: Modulus) -> ExactOrderSet {
    let n = modulus.n();
    let vectors = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| n.gcd(&a).gcd(&b) == 1)
        .map(|(a, b)| Vec2::new(modulus, a as i64, b as i64))
        .collect();
    ExactOrderSet { modulus, vectors }
}

/// One orbit: its lexicographically least member, and all members sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub representative: Vec2,
    pub members: Vec<Vec2>,
}

impl Orbit {
    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn contains(&self, v: &Vec2) -> bool {
        self.members.binary_search(v).is_ok()
    }
}

/// Partition of V_n into orbits, with a dense vector → orbit lookup.
#[derive(Debug, Clone)]
pub struct OrbitDecomposition {
    modulus: Modulus,
    orbits: Vec<Orbit>,
    // grid index a·n + b → orbit number, u32::MAX off V_n
    label: Vec<u32>,
}

impl OrbitDecomposition {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// r, the number of orbits.
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.orbits.iter().map(Orbit::size).collect()
    }

    /// Position of the orbit containing `v`, if v ∈ V_n.
    pub fn orbit_index(&self, v: &Vec2) -> Option<usize> {
        if v.modulus() != self.modulus {
            return None;
        }
        match self.label[v.grid_index()] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub fn orbit_containing(&self, v: &Vec2) -> Option<&Orbit> {
        self.orbit_index(v).map(|i| &self.orbits[i])
    }
}

fn raw_generators(gens: &[Mat2]) -> Vec<[u32; 4]> {
    let mut raw: Vec<[u32; 4]> = gens.iter().map(Mat2::raw).collect();
    raw.sort_unstable();
    raw.dedup();
    raw
}

// BFS under the generator action, marking visited cells in `seen`.
fn bfs(n: u32, gens: &[[u32; 4]], start: (u32, u32), seen: &mut [bool]) -> Vec<(u32, u32)> {
    let idx = |(a, b): (u32, u32)| a as usize * n as usize + b as usize;
    let mut out = vec![start];
    seen[idx(start)] = true;
    let mut head = 0;
    while head < out.len() {
        let (a, b) = out[head];
        head += 1;
        for g in gens {
            let w = act_raw(n, *g, a, b);
            if !seen[idx(w)] {
                seen[idx(w)] = true;
                out.push(w);
            }
        }
    }
    out
}

/// The orbit of v under the group generated by `g`.
pub fn orbit_of<G: Generated + ?Sized>(g: &G, v: &Vec2) -> Result<Orbit, OrbitError> {
    let modulus = g.modulus();
    if v.modulus() != modulus {
        return Err(ArithError::ModulusMismatch {
            left: modulus.n(),
            right: v.modulus().n(),
        }
        .into());
    }
    let n = modulus.n();
    let gens = raw_generators(g.generators());
    let mut seen = vec![false; (n as usize).pow(2)];
    let mut members: Vec<Vec2> = bfs(n, &gens, (v.a(), v.b()), &mut seen)
        .into_iter()
        .map(|(a, b)| Vec2::new(modulus, a as i64, b as i64))
        .collect();
    members.sort_unstable();
    Ok(Orbit {
        representative: members[0],
        members,
    })
}

/// Orbits of the group on V_n, scanned in lexicographic order so each
/// representative is the least member of its orbit.
pub fn orbit_decomposition<G: Generated + ?Sized>(g: &G) -> OrbitDecomposition {
    let modulus = g.modulus();
    let n = modulus.n();
    let gens = raw_generators(g.generators());
    let cells = (n as usize).pow(2);
    let mut seen = vec![false; cells];
    let mut label = vec![u32::MAX; cells];
    let mut orbits = Vec::new();
    for v in exact_order_vectors(modulus).vectors {
        if seen[v.grid_index()] {
            continue;
        }
        let id = orbits.len() as u32;
        let mut members: Vec<Vec2> = bfs(n, &gens, (v.a(), v.b()), &mut seen)
            .into_iter()
            .map(|(a, b)| Vec2::new(modulus, a as i64, b as i64))
            .collect();
        members.sort_unstable();
        for w in &members {
            label[w.grid_index()] = id;
        }
        orbits.push(Orbit {
            representative: members[0],
            members,
        });
    }
    OrbitDecomposition {
        modulus,
        orbits,
        label,
    }
}

/// {x ∈ g : x·v = v}, in the table's element order.
pub fn stabilizer(g: &GroupTable, v: &Vec2) -> Result<Vec<Mat2>, OrbitError> {
    if v.modulus() != g.modulus() {
        return Err(ArithError::ModulusMismatch {
            left: g.modulus().n(),
            right: v.modulus().n(),
        }
        .into());
    }
    let n = g.modulus().n();
    Ok(g
        .elements()
        .filter(|x| act_raw(n, x.raw(), v.a(), v.b()) == (v.a(), v.b()))
        .collect())
}

/// Transitivity on V_n, decided from the single seed e₁ ∈ V_n.
pub fn is_transitive<G: Generated + ?Sized>(g: &G) -> bool {
    let modulus = g.modulus();
    let n = modulus.n();
    let gens = raw_generators(g.generators());
    let mut seen = vec![false; (n as usize).pow(2)];
    let seed = (1 % n, 0);
    bfs(n, &gens, seed, &mut seen).len() as u64 == count_exact_order(n)
}

/// Degree of the closed point attached to an orbit of ⟨G(n), −I⟩ on V_n.
pub fn point_degree(orbit_size: u64, n: u32) -> Result<u64, OrbitError> {
    match n {
        1 => Ok(1),
        2 => Ok(orbit_size),
        _ if orbit_size % 2 == 1 => Err(OrbitError::OddOrbit { orbit_size, n }),
        _ => Ok(orbit_size / 2),
    }
}
