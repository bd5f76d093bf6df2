//! Residues, 2×2 matrices and vectors over ℤ/nℤ.
//!
//! Every [`Vec2`] and [`Mat2`] carries its [`Modulus`]; mixing moduli is an
//! error, never a silent coercion. Moduli are capped at [`MAX_MODULUS`] so that
//! entry products fit comfortably in 64-bit intermediates and four residues
//! pack into a single `u64` key.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

/// Largest supported level. Four residues below 2¹⁶ pack into one `u64`.
pub const MAX_MODULUS: u32 = 1 << 15;

/// At most six distinct primes divide a number below 2¹⁵ (2·3·5·7·11·13 = 30030).
const MAX_PRIMES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("modulus must lie in 1..={max}, got {0}", max = MAX_MODULUS)]
    InvalidModulus(i64),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("matrix with determinant {det} is not invertible mod {n}")]
    NotInvertible { det: u32, n: u32 },
    #[error("{d} does not divide {n}")]
    NotDivisor { d: u32, n: u32 },
    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u32, b: u32 },
}

pub type Result<T, E = ArithError> = std::result::Result<T, E>;

/// The level n ≥ 1, with its factorization computed once at construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    n: u32,
    primes: [u16; MAX_PRIMES],
    exps: [u8; MAX_PRIMES],
    len: u8,
}

impl Modulus {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_MODULUS {
            return Err(ArithError::InvalidModulus(n as i64));
        }
        let mut primes = [0u16; MAX_PRIMES];
        let mut exps = [0u8; MAX_PRIMES];
        let mut len = 0usize;
        let mut rest = n;
        let mut p = 2u32;
        while p * p <= rest {
            if rest % p == 0 {
                let mut k = 0u8;
                while rest % p == 0 {
                    rest /= p;
                    k += 1;
                }
                primes[len] = p as u16;
                exps[len] = k;
                len += 1;
            }
            p += 1;
        }
        if rest > 1 {
            primes[len] = rest as u16;
            exps[len] = 1;
            len += 1;
        }
        Ok(Modulus {
            n,
            primes,
            exps,
            len: len as u8,
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `(p, k)` for each prime power pᵏ ∥ n, ascending in p.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len as usize).map(move |i| (self.primes[i] as u32, self.exps[i] as u32))
    }

    pub fn primes(&self) -> impl Iterator<Item = u32> + '_ {
        self.prime_powers().map(|(p, _)| p)
    }

    /// All positive divisors of n in ascending order.
    pub fn divisors(&self) -> Vec<u32> {
        let mut out = vec![1u32];
        for (p, k) in self.prime_powers() {
            let current = out.len();
            let mut pk = 1u32;
            for _ in 0..k {
                pk *= p;
                for i in 0..current {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of positive divisors, σ₀(n).
    pub fn sigma0(&self) -> u32 {
        self.prime_powers().map(|(_, k)| k + 1).product()
    }

    pub fn divides(&self, d: u32) -> bool {
        d != 0 && self.n % d == 0
    }

    /// The modulus of a divisor, or `NotDivisor`.
    pub fn divisor(&self, d: u32) -> Result<Modulus> {
        if !self.divides(d) {
            return Err(ArithError::NotDivisor { d, n: self.n });
        }
        Modulus::new(d)
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.n as i64) as u32
    }

    pub fn is_unit(&self, x: u32) -> bool {
        (x as u64).gcd(&(self.n as u64)) == 1
    }

    /// Multiplicative inverse of a unit residue.
    pub fn inverse(&self, x: u32) -> Option<u32> {
        let eg = (x as i64).extended_gcd(&(self.n as i64));
        if eg.gcd != 1 {
            return None;
        }
        Some(self.reduce(eg.x))
    }

    /// The units of ℤ/nℤ, ascending.
    pub fn units(&self) -> Vec<u32> {
        (0..self.n).filter(|&x| self.is_unit(x)).collect()
    }

    fn check_same(&self, other: &Modulus) -> Result<()> {
        if self.n != other.n {
            return Err(ArithError::ModulusMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.n)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// A vector (a, b) ∈ (ℤ/nℤ)².
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vec2 {
    modulus: Modulus,
    a: u32,
    b: u32,
}

impl Vec2 {
    pub fn new(modulus: Modulus, a: i64, b: i64) -> Self {
        Vec2 {
            modulus,
            a: modulus.reduce(a),
            b: modulus.reduce(b),
        }
    }

    /// e₁ = (1, 0); at level 1 this is the zero vector.
    pub fn e1(modulus: Modulus) -> Self {
        Vec2::new(modulus, 1, 0)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn a(&self) -> u32 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> u32 {
        self.b
    }

    /// Additive order n / gcd(a, b, n).
    pub fn order(&self) -> u32 {
        vec_order(self)
    }

    pub fn scale(&self, k: i64) -> Vec2 {
        let n = self.modulus.n as i64;
        Vec2::new(self.modulus, (self.a as i64 * k) % n, (self.b as i64 * k) % n)
    }

    /// Row-major position in the n×n grid, used as a dense index.
    #[inline]
    pub(crate) fn grid_index(&self) -> usize {
        self.a as usize * self.modulus.n as usize + self.b as usize
    }
}

impl PartialOrd for Vec2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Vec2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.modulus.n, self.a, self.b).cmp(&(other.modulus.n, other.a, other.b))
    }
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}) mod {}", self.a, self.b, self.modulus.n)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// A 2×2 matrix over ℤ/nℤ, entries row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    modulus: Modulus,
    e: [u32; 4],
}

impl Mat2 {
    pub fn new(modulus: Modulus, rows: [[i64; 2]; 2]) -> Self {
        Mat2 {
            modulus,
            e: [
                modulus.reduce(rows[0][0]),
                modulus.reduce(rows[0][1]),
                modulus.reduce(rows[1][0]),
                modulus.reduce(rows[1][1]),
            ],
        }
    }

    pub fn identity(modulus: Modulus) -> Self {
        Mat2::new(modulus, [[1, 0], [0, 1]])
    }

    pub fn neg_identity(modulus: Modulus) -> Self {
        Mat2::new(modulus, [[-1, 0], [0, -1]])
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn rows(&self) -> [[u32; 2]; 2] {
        [[self.e[0], self.e[1]], [self.e[2], self.e[3]]]
    }

    #[inline]
    pub(crate) fn raw(&self) -> [u32; 4] {
        self.e
    }

    pub fn det(&self) -> u32 {
        let n = self.modulus.n as u64;
        let [a, b, c, d] = self.e.map(u64::from);
        ((a * d % n + n - b * c % n) % n) as u32
    }

    pub fn is_invertible(&self) -> bool {
        self.modulus.is_unit(self.det())
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity(self.modulus)
    }

    pub fn mul(&self, other: &Mat2) -> Result<Mat2> {
        mat_mul(self, other)
    }

    pub fn inv(&self) -> Result<Mat2> {
        mat_inv(self)
    }

    pub fn act(&self, v: &Vec2) -> Result<Vec2> {
        vec_act(self, v)
    }

    /// Group commutator x y x⁻¹ y⁻¹.
    pub fn commutator(&self, other: &Mat2) -> Result<Mat2> {
        let xy = self.mul(other)?;
        xy.mul(&self.inv()?)?.mul(&other.inv()?)
    }

    /// Canonical packed encoding: four 16-bit residues.
    #[inline]
    pub fn key(&self) -> u64 {
        pack(self.e)
    }

    #[inline]
    pub fn from_key(modulus: Modulus, key: u64) -> Mat2 {
        Mat2 {
            modulus,
            e: unpack(key),
        }
    }

    #[inline]
    pub(crate) fn from_raw(modulus: Modulus, e: [u32; 4]) -> Mat2 {
        Mat2 { modulus, e }
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]] mod {}",
            self.e[0], self.e[1], self.e[2], self.e[3], self.modulus.n
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

#[inline]
pub(crate) fn pack(e: [u32; 4]) -> u64 {
    e[0] as u64 | (e[1] as u64) << 16 | (e[2] as u64) << 32 | (e[3] as u64) << 48
}

#[inline]
pub(crate) fn unpack(key: u64) -> [u32; 4] {
    [
        (key & 0xffff) as u32,
        (key >> 16 & 0xffff) as u32,
        (key >> 32 & 0xffff) as u32,
        (key >> 48 & 0xffff) as u32,
    ]
}

#[inline]
pub(crate) fn mul_raw(n: u32, x: [u32; 4], y: [u32; 4]) -> [u32; 4] {
    let n = n as u64;
    let [a, b, c, d] = x.map(u64::from);
    let [e, f, g, h] = y.map(u64::from);
    [
        ((a * e + b * g) % n) as u32,
        ((a * f + b * h) % n) as u32,
        ((c * e + d * g) % n) as u32,
        ((c * f + d * h) % n) as u32,
    ]
}

#[inline]
pub(crate) fn mul_keys(n: u32, x: u64, y: u64) -> u64 {
    pack(mul_raw(n, unpack(x), unpack(y)))
}

#[inline]
pub(crate) fn act_raw(n: u32, m: [u32; 4], a: u32, b: u32) -> (u32, u32) {
    let n = n as u64;
    let (a, b) = (a as u64, b as u64);
    let [p, q, r, s] = m.map(u64::from);
    (((p * a + q * b) % n) as u32, ((r * a + s * b) % n) as u32)
}

#[inline]
pub(crate) fn reduce_raw(d: u32, e: [u32; 4]) -> [u32; 4] {
    e.map(|x| x % d)
}

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    x.modulus.check_same(&y.modulus)?;
    Ok(Mat2::from_raw(x.modulus, mul_raw(x.modulus.n, x.e, y.e)))
}

pub fn mat_inv(x: &Mat2) -> Result<Mat2> {
    let m = x.modulus;
    let det = x.det();
    let inv_det = m
        .inverse(det)
        .ok_or(ArithError::NotInvertible { det, n: m.n })?;
    let n = m.n as u64;
    let t = inv_det as u64;
    let [a, b, c, d] = x.e.map(u64::from);
    Ok(Mat2::from_raw(
        m,
        [
            (d * t % n) as u32,
            ((n - b) % n * t % n) as u32,
            ((n - c) % n * t % n) as u32,
            (a * t % n) as u32,
        ],
    ))
}

pub fn vec_act(m: &Mat2, v: &Vec2) -> Result<Vec2> {
    m.modulus.check_same(&v.modulus)?;
    let (a, b) = act_raw(m.modulus.n, m.e, v.a, v.b);
    Ok(Vec2 {
        modulus: v.modulus,
        a,
        b,
    })
}

/// ord(v) = n / gcd(a, b, n).
pub fn vec_order(v: &Vec2) -> u32 {
    let n = v.modulus.n;
    n / n.gcd(&v.a).gcd(&v.b)
}

/// Entrywise reduction to a divisor level.
pub trait Reduce: Sized {
    fn reduce_level(&self, d: u32) -> Result<Self>;
}

impl Reduce for Mat2 {
    fn reduce_level(&self, d: u32) -> Result<Mat2> {
        let target = self.modulus.divisor(d)?;
        Ok(Mat2::from_raw(target, reduce_raw(d, self.e)))
    }
}

impl Reduce for Vec2 {
    fn reduce_level(&self, d: u32) -> Result<Vec2> {
        let target = self.modulus.divisor(d)?;
        Ok(Vec2 {
            modulus: target,
            a: self.a % d,
            b: self.b % d,
        })
    }
}

/// Free-function form of [`Reduce::reduce_level`].
pub fn reduce_level<T: Reduce>(x: &T, d: u32) -> Result<T> {
    x.reduce_level(d)
}

/// CRT identification GL₂(ℤ/abℤ) ≅ GL₂(ℤ/aℤ) × GL₂(ℤ/bℤ) for coprime a, b.
#[derive(Debug, Clone, Copy)]
pub struct CrtPair {
    a: Modulus,
    b: Modulus,
    ab: Modulus,
    // idempotents: e_a ≡ 1 (a), 0 (b); e_b ≡ 0 (a), 1 (b)
    e_a: u64,
    e_b: u64,
}

impl CrtPair {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a == 0 || b == 0 || a.gcd(&b) != 1 {
            return Err(ArithError::NotCoprime { a, b });
        }
        let ab = a
            .checked_mul(b)
            .ok_or(ArithError::InvalidModulus(a as i64 * b as i64))?;
        let ab_mod = Modulus::new(ab)?;
        // u·a + v·b = 1
        let eg = (a as i64).extended_gcd(&(b as i64));
        let e_b = ab_mod.reduce(eg.x * a as i64) as u64;
        let e_a = ab_mod.reduce(eg.y * b as i64) as u64;
        Ok(CrtPair {
            a: Modulus::new(a)?,
            b: Modulus::new(b)?,
            ab: ab_mod,
            e_a,
            e_b,
        })
    }

    pub fn a(&self) -> Modulus {
        self.a
    }

    pub fn b(&self) -> Modulus {
        self.b
    }

    pub fn ab(&self) -> Modulus {
        self.ab
    }

    pub fn split(&self, x: &Mat2) -> Result<(Mat2, Mat2)> {
        self.ab.check_same(&x.modulus)?;
        Ok((
            Mat2::from_raw(self.a, reduce_raw(self.a.n, x.e)),
            Mat2::from_raw(self.b, reduce_raw(self.b.n, x.e)),
        ))
    }

    pub fn join(&self, xa: &Mat2, xb: &Mat2) -> Result<Mat2> {
        self.a.check_same(&xa.modulus)?;
        self.b.check_same(&xb.modulus)?;
        let n = self.ab.n as u64;
        let mut e = [0u32; 4];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = ((xa.e[i] as u64 * self.e_a + xb.e[i] as u64 * self.e_b) % n) as u32;
        }
        Ok(Mat2::from_raw(self.ab, e))
    }
}

/// Split a matrix at level ab into its level-a and level-b components.
pub fn crt_split(x: &Mat2, a: u32, b: u32) -> Result<(Mat2, Mat2)> {
    let pair = CrtPair::new(a, b)?;
    pair.split(x)
}

pub fn crt_join(xa: &Mat2, xb: &Mat2) -> Result<Mat2> {
    let pair = CrtPair::new(xa.modulus.n, xb.modulus.n)?;
    pair.join(xa, xb)
}

/// |V_n| = n² ∏_{p | n} (1 − 1/p²), computed prime power by prime power.
pub fn count_exact_order(n: u32) -> u64 {
    let m = match Modulus::new(n) {
        Ok(m) => m,
        Err(_) => return count_exact_order_slow(n),
    };
    m.prime_powers()
        .map(|(p, k)| {
            let p = p as u64;
            let q = p.pow(2 * k - 2);
            q * p * p - q
        })
        .product()
}

// Only reached for levels beyond the modulus ceiling.
fn count_exact_order_slow(n: u32) -> u64 {
    let mut rest = n as u64;
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            let q = p.pow(2 * k - 2);
            out *= q * p * p - q;
        }
        p += 1;
    }
    if rest > 1 {
        out *= rest * rest - 1;
    }
    out
}
