use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use crate::error::{KernelError, Result};

/// Largest supported number of odd generators (bitmask width).
pub const MAX_ODD: usize = 62;

/// ℤ₂-degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_weight(w: u32) -> Parity {
        if w.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Parity> {
        match v {
            0 => Some(Parity::Even),
            1 => Some(Parity::Odd),
            _ => None,
        }
    }

    /// `(-1)^(self * other)` as ±1.
    pub fn sign_with(self, other: Parity) -> i64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1
        } else {
            1
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Dimension `p|q` together with generator names.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgebraSignature {
    p: usize,
    q: usize,
    even_names: Vec<String>,
    odd_names: Vec<String>,
}

pub type Signature = Arc<AlgebraSignature>;

impl AlgebraSignature {
    /// Generators named `x1..xp` and `t1..tq`.
    pub fn new(p: usize, q: usize) -> Result<Signature> {
        Self::with_names(
            (1..=p).map(|i| format!("x{i}")).collect(),
            (1..=q).map(|i| format!("t{i}")).collect(),
        )
    }

    pub fn with_names(even_names: Vec<String>, odd_names: Vec<String>) -> Result<Signature> {
        if odd_names.len() > MAX_ODD {
            return Err(KernelError::argument(format!(
                "at most {MAX_ODD} odd generators are supported, got {}",
                odd_names.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for n in even_names.iter().chain(&odd_names) {
            if !seen.insert(n.as_str()) {
                return Err(KernelError::argument(format!("generator name `{n}` is used twice")));
            }
        }
        Ok(Arc::new(AlgebraSignature {
            p: even_names.len(),
            q: odd_names.len(),
            even_names,
            odd_names,
        }))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn even_names(&self) -> &[String] {
        &self.even_names
    }

    pub fn odd_names(&self) -> &[String] {
        &self.odd_names
    }

    /// Mask with all `q` odd generators set.
    pub fn full_mask(&self) -> u64 {
        if self.q == 0 {
            0
        } else {
            u64::MAX >> (64 - self.q)
        }
    }

    /// Same dimensions (names are cosmetic).
    pub fn same_shape(&self, other: &AlgebraSignature) -> bool {
        self.p == other.p && self.q == other.q
    }

    /// Looks a generator up by name: `Ok(i)` for even `x_i`, `Err(j)` for odd `θ_j`.
    pub fn generator(&self, name: &str) -> Option<std::result::Result<usize, usize>> {
        if let Some(i) = self.even_names.iter().position(|n| n == name) {
            return Some(Ok(i));
        }
        self.odd_names.iter().position(|n| n == name).map(Err)
    }
}

impl fmt::Display for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.p, self.q)
    }
}
