//! Quantum Singleton and Hamming bounds over mixed alphabets.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A bound on the code dimension `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite(u128),
    /// `n < 2(d−1)`: no code with `K > 1` is admitted.
    Vacuous,
}

impl Bound {
    pub fn admits(self, k: u128) -> bool {
        match self {
            Bound::Finite(b) => k <= b,
            Bound::Vacuous => k <= 1,
        }
    }

    pub fn value(self) -> Option<u128> {
        match self {
            Bound::Finite(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(b) => write!(f, "{b}"),
            Bound::Vacuous => f.write_str("vacuous"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(b) if *b <= u64::MAX as u128 => s.serialize_u64(*b as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

fn check_dims(dims: &[u64]) -> Result<()> {
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidSystem(format!("particle dimension {d} < 2")));
    }
    Ok(())
}

fn product(dims: &[u64]) -> Result<u128> {
    dims.iter().try_fold(1u128, |acc, &d| {
        acc.checked_mul(d as u128)
            .ok_or_else(|| Error::InvalidSystem("dimension overflows u128".into()))
    })
}

/// Product of the `n − 2(d−1)` smallest dimensions.
pub fn singleton_bound(dims: &[u64], d: usize) -> Result<Bound> {
    check_dims(dims)?;
    if d == 0 {
        return Err(Error::Precondition("distance must be at least 1".into()));
    }
    let remove = 2 * (d - 1);
    if dims.len() < remove {
        return Ok(Bound::Vacuous);
    }
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    Ok(Bound::Finite(product(&sorted[..dims.len() - remove])?))
}

/// `⌊Π dims / Σ_{k≤t} e_k(dims² − 1)⌋` with `t = ⌊(d−1)/2⌋`.
pub fn hamming_bound(dims: &[u64], d: usize) -> Result<Bound> {
    check_dims(dims)?;
    if d == 0 {
        return Err(Error::Precondition("distance must be at least 1".into()));
    }
    let t = (d - 1) / 2;
    let total = product(dims)?;
    let mut e = vec![0u128; t + 1];
    e[0] = 1;
    for &q in dims {
        let c = (q as u128) * (q as u128) - 1;
        for k in (1..=t).rev() {
            e[k] = e[k].saturating_add(e[k - 1].saturating_mul(c));
        }
    }
    let sphere = e.iter().fold(0u128, |a, &b| a.saturating_add(b));
    Ok(Bound::Finite(total / sphere))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Optimal,
    Suboptimal,
    Violates,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Optimal => "optimal",
            Classification::Suboptimal => "suboptimal",
            Classification::Violates => "violates",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub singleton: Bound,
    pub hamming: Bound,
    /// The Hamming form is the standard sphere-packing count.
    pub hamming_form: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Classification>,
}

pub fn bound_report(dims: &[u64], d: usize, k: Option<u128>) -> Result<BoundReport> {
    let singleton = singleton_bound(dims, d)?;
    let hamming = hamming_bound(dims, d)?;
    Ok(BoundReport {
        singleton,
        hamming,
        hamming_form: "sphere-packing",
        verdict: k.map(|k| verdict(singleton, hamming, k)),
    })
}

fn verdict(singleton: Bound, hamming: Bound, k: u128) -> Classification {
    if !singleton.admits(k) || !hamming.admits(k) {
        Classification::Violates
    } else if singleton == Bound::Finite(k) {
        Classification::Optimal
    } else {
        Classification::Suboptimal
    }
}

/// "violates" above either bound, "optimal" when `K` meets Singleton.
pub fn classify(dims: &[u64], k: u128, d: usize) -> Result<Classification> {
    Ok(verdict(singleton_bound(dims, d)?, hamming_bound(dims, d)?, k))
}
