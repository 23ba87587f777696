use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generating polynomial of Betti numbers; coefficients indexed by degree,
/// trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize, PartialOrd, Ord)]
pub struct PoincarePolynomial {
    coefficients: Vec<u64>,
}

impl PoincarePolynomial {
    pub fn new(mut coefficients: Vec<u64>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        PoincarePolynomial { coefficients }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The monomial `c t^k`.
    pub fn monomial(k: usize, c: u64) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coefficients.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    /// Sum of all coefficients (total dimension).
    pub fn total(&self) -> u64 {
        self.coefficients.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    /// `t^dim P(1/t)`; requires `dim` at least the degree.
    pub fn reflect(&self, dim: usize) -> Option<Self> {
        if self.degree().is_some_and(|d| d > dim) {
            return None;
        }
        Some(Self::new((0..=dim).map(|k| self.coeff(dim - k)).collect()))
    }

    pub fn to_int(&self) -> IntPoly {
        IntPoly::new(self.coefficients.iter().map(|&c| c as i64).collect())
    }

    /// Alternating sum of coefficients.
    pub fn euler(&self) -> i64 {
        self.to_int().eval_minus_one()
    }
}

impl fmt::Display for PoincarePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_int(), f)
    }
}

/// Integer polynomial used for exact inequality arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IntPoly {
    coefficients: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coefficients: Vec<i64>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        IntPoly { coefficients }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coefficients.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coefficients.len().max(o.coefficients.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coefficients.len().max(o.coefficients.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    /// Multiplication by `(1 + t)`.
    pub fn times_one_plus_t(&self) -> Self {
        let n = self.coefficients.len() + 1;
        Self::new((0..n).map(|k| self.coeff(k) + if k > 0 { self.coeff(k - 1) } else { 0 }).collect())
    }

    /// Exact division by `(1 + t)`; errors when a remainder is left.
    pub fn div_one_plus_t(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::default());
        }
        let n = self.coefficients.len();
        let mut q = vec![0i64; n.saturating_sub(1)];
        let mut rem = self.coefficients.clone();
        for k in (1..n).rev() {
            q[k - 1] = rem[k];
            rem[k - 1] -= rem[k];
            rem[k] = 0;
        }
        if rem[0] != 0 {
            return Err(Error::Invariant(format!(
                "{self} is not divisible by 1+t (remainder {})",
                rem[0]
            )));
        }
        Ok(Self::new(q))
    }

    pub fn eval_minus_one(&self) -> i64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
            .sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefficients.iter().all(|&c| c >= 0)
    }

    /// `t^dim P(1/t)`; requires `dim` at least the degree.
    pub fn reflect(&self, dim: usize) -> Option<Self> {
        if self.coefficients.len() > dim + 1 {
            return None;
        }
        Some(Self::new((0..=dim).map(|k| self.coeff(dim - k)).collect()))
    }

    pub fn to_poincare(&self) -> Option<PoincarePolynomial> {
        self.is_nonnegative()
            .then(|| PoincarePolynomial::new(self.coefficients.iter().map(|&c| c as u64).collect()))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let a = c.unsigned_abs();
            let body = match (k, a) {
                (0, _) => a.to_string(),
                (1, 1) => "t".to_string(),
                (1, _) => format!("{a}t"),
                (_, 1) => format!("t^{k}"),
                _ => format!("{a}t^{k}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_displays() {
        let p = PoincarePolynomial::new(vec![1, 2, 1, 0, 0]);
        assert_eq!(p.coefficients(), &[1, 2, 1]);
        assert_eq!(p.to_string(), "1 + 2t + t^2");
        assert_eq!(p.euler(), 0);
        assert_eq!(PoincarePolynomial::zero().to_string(), "0");
    }

    #[test]
    fn division_by_one_plus_t() {
        let p = IntPoly::new(vec![1, 2, 1]);
        assert_eq!(p.div_one_plus_t().unwrap(), IntPoly::new(vec![1, 1]));
        assert!(IntPoly::new(vec![1, 1, 1]).div_one_plus_t().is_err());
        let r = IntPoly::new(vec![0, 1]);
        assert_eq!(r.times_one_plus_t().div_one_plus_t().unwrap(), r);
    }

    #[test]
    fn reflection() {
        let p = PoincarePolynomial::new(vec![0, 2]);
        assert_eq!(p.reflect(2).unwrap(), p);
        assert_eq!(PoincarePolynomial::new(vec![1]).reflect(2).unwrap().coefficients(), &[0, 0, 1]);
        assert!(PoincarePolynomial::new(vec![0, 0, 0, 1]).reflect(2).is_none());
    }
}
