//! Exact arithmetic over `Z_m` and roots of unity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// A root of unity `exp(2πi k/L)` stored as the reduced fraction `k/L`.
///
/// The pair is always kept in lowest terms with `0 <= k < L`, so the unit
/// is `(0, 1)` and structural equality is equality of the complex values.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[u64; 2]")]
pub struct Phase {
    num: u64,
    order: u64,
}

impl Phase {
    pub const ONE: Phase = Phase { num: 0, order: 1 };

    /// `exp(2πi k/L)`. Panics if `order == 0`.
    pub fn new(k: i64, order: u64) -> Self {
        assert!(order >= 1, "phase order must be positive");
        let k = k.rem_euclid(order as i64) as u64;
        let g = gcd(k, order);
        Phase {
            num: k / g,
            order: order / g,
        }
    }

    /// `ω_m^k`, the `k`-th power of the primitive `m`-th root of unity.
    pub fn omega(m: u32, k: i64) -> Self {
        Phase::new(k, m as u64)
    }

    /// `i = exp(2πi/4)`.
    pub fn i() -> Self {
        Phase::new(1, 4)
    }

    pub fn minus_one() -> Self {
        Phase::new(1, 2)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn order(self) -> u64 {
        self.order
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    pub fn inverse(self) -> Self {
        Phase::new(-(self.num as i64), self.order)
    }

    pub fn pow(self, e: i64) -> Self {
        let k = (self.num as i128 * e as i128).rem_euclid(self.order as i128);
        Phase::new(k as i64, self.order)
    }

    /// Exponent of this phase as a power of `ω_L`, i.e. `k` with `self = ω_L^k`.
    /// Returns `None` if `L` is not a multiple of the phase order.
    pub fn exponent_in(self, order: u64) -> Option<u64> {
        if !order.is_multiple_of(self.order) {
            return None;
        }
        Some(self.num * (order / self.order))
    }

    pub fn to_complex(self) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * self.num as f64 / self.order as f64;
        Complex64::new(theta.cos(), theta.sin())
    }

    /// Nearest phase of order dividing `order` to the complex number `z`, if
    /// `z` lies within `tol` of one.
    pub fn from_complex(z: Complex64, order: u64, tol: f64) -> Option<Self> {
        let turns = z.arg() / (2.0 * std::f64::consts::PI);
        let k = (turns * order as f64).round() as i64;
        let p = Phase::new(k, order);
        ((p.to_complex() - z).norm() <= tol).then_some(p)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        let order = lcm(self.order, rhs.order);
        let k = self.num * (order / self.order) + rhs.num * (order / rhs.order);
        Phase::new((k % order) as i64, order)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ONE
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({}/{})", self.num, self.order)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.order) {
            (0, _) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (k, l) => write!(f, "w[{k}/{l}]"),
        }
    }
}

impl TryFrom<[i64; 2]> for Phase {
    type Error = String;

    fn try_from(v: [i64; 2]) -> std::result::Result<Self, String> {
        if v[1] < 1 {
            return Err(format!("phase order must be positive, got {}", v[1]));
        }
        Ok(Phase::new(v[0], v[1] as u64))
    }
}

impl From<Phase> for [u64; 2] {
    fn from(p: Phase) -> Self {
        [p.num, p.order]
    }
}

/// A vector over `Z_m` with entries kept reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModVec {
    modulus: u32,
    entries: Vec<u32>,
}

impl ModVec {
    pub fn zeros(modulus: u32, len: usize) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        ModVec {
            modulus,
            entries: vec![0; len],
        }
    }

    /// Builds a vector, reducing every entry modulo `modulus`.
    pub fn new(modulus: u32, entries: impl IntoIterator<Item = i64>) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        let m = modulus as i64;
        ModVec {
            modulus,
            entries: entries
                .into_iter()
                .map(|e| e.rem_euclid(m) as u32)
                .collect(),
        }
    }

    /// Unit vector `e_i` (0-based).
    pub fn unit(modulus: u32, len: usize, i: usize) -> Self {
        let mut v = ModVec::zeros(modulus, len);
        v.entries[i] = 1;
        v
    }

    /// Parses a digit string such as `"100100"`. Digits must already be
    /// reduced; a comma-separated form is accepted for moduli above 10.
    pub fn parse(modulus: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        let digits: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("bad vector {s:?}: {e}")))?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        if let Some(d) = digits.iter().find(|&&d| d >= modulus) {
            return Err(Error::Parse(format!(
                "entry {d} of {s:?} is not reduced mod {modulus}"
            )));
        }
        Ok(ModVec {
            modulus,
            entries: digits,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: i64) {
        self.entries[i] = value.rem_euclid(self.modulus as i64) as u32;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Indices (0-based) of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, &e)| (e != 0).then_some(i))
            .collect()
    }

    fn check_compatible(&self, other: &ModVec) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    /// `Σ u_i v_i mod m`.
    pub fn dot(&self, other: &ModVec) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &ModVec) -> u32 {
        let m = self.modulus as u64;
        let s = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a as u64 * b as u64 % m)
            .sum::<u64>();
        (s % m) as u32
    }

    pub fn scale(&self, k: i64) -> ModVec {
        let m = self.modulus as i64;
        ModVec {
            modulus: self.modulus,
            entries: self
                .entries
                .iter()
                .map(|&e| (e as i64 * k).rem_euclid(m) as u32)
                .collect(),
        }
    }

    pub fn try_add(&self, other: &ModVec) -> Result<ModVec> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &ModVec) -> Result<ModVec> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + self.modulus - b))
    }

    fn zip_with(&self, other: &ModVec, f: impl Fn(u32, u32) -> u32) -> ModVec {
        ModVec {
            modulus: self.modulus,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b) % self.modulus)
                .collect(),
        }
    }

    /// Digit string form; comma separated when the modulus exceeds 10.
    pub fn to_digits(&self) -> String {
        if self.modulus <= 10 {
            self.entries
                .iter()
                .map(|d| char::from_digit(*d, 10).unwrap())
                .collect()
        } else {
            self.entries
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Additive order of the vector in `Z_m^n`.
    pub fn order(&self) -> u64 {
        let m = self.modulus as u64;
        self.entries
            .iter()
            .map(|&e| m / gcd(e as u64, m))
            .fold(1, lcm)
    }
}

impl fmt::Debug for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(mod {})", self.to_digits(), self.modulus)
    }
}

impl fmt::Display for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digits())
    }
}

// Operator forms panic on mismatched operands; use the `try_*` methods when
// the operands come from untrusted input.
impl Add for &ModVec {
    type Output = ModVec;

    fn add(self, rhs: &ModVec) -> ModVec {
        self.try_add(rhs).expect("incompatible ModVec operands")
    }
}

impl Sub for &ModVec {
    type Output = ModVec;

    fn sub(self, rhs: &ModVec) -> ModVec {
        self.try_sub(rhs).expect("incompatible ModVec operands")
    }
}

impl Neg for &ModVec {
    type Output = ModVec;

    fn neg(self) -> ModVec {
        self.scale(-1)
    }
}
