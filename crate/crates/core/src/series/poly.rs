use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Polynomial with arbitrary-precision integer coefficients, lowest degree first.
/// Trailing zeros are never stored, so the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Poly(Vec<BigInt>);

impl Poly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: i64) -> Self {
        Self::from_i64(&[c])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has degree 0 here.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Sign of p(m / 2^k), computed exactly.
    pub fn sign_at_dyadic(&self, m: &BigInt, k: u32) -> Sign {
        // 2^{k d} p(m / 2^k) = sum_i c_i m^i 2^{k (d - i)}
        let d = self.degree();
        let mut acc = BigInt::zero();
        let mut mpow = BigInt::one();
        for (i, c) in self.0.iter().enumerate() {
            acc += (c * &mpow) << (k as usize * (d - i));
            mpow *= m;
        }
        acc.sign()
    }

    pub fn content(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        Poly(self.0.iter().map(|x| x / &c).collect())
    }

    /// Pseudo-remainder of `self` by `d`: lc(d)^(deg self - deg d + 1) * self mod d.
    fn pseudo_rem(&self, d: &Poly) -> Poly {
        let mut r = self.0.clone();
        let dl = d.leading();
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let rl = r.last().cloned().expect("non-empty");
            for x in r.iter_mut() {
                *x *= &dl;
            }
            for (i, c) in d.0.iter().enumerate() {
                r[k + i] -= &rl * c;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Poly(r)
    }

    /// Primitive greatest common divisor, positive leading coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a
    }

    /// Exact quotient; panics if `d` does not divide `self` over the integers.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.0.clone();
        let dd = d.degree();
        if r.len() <= dd {
            assert!(self.is_zero(), "inexact polynomial division");
            return Poly::default();
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        let dl = d.leading();
        for k in (0..q.len()).rev() {
            let top = &r[k + dd];
            assert!((top % &dl).is_zero(), "inexact polynomial division");
            let c = top / &dl;
            for (i, x) in d.0.iter().enumerate() {
                r[k + i] -= &c * x;
            }
            q[k] = c;
        }
        assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
        Poly::new(q)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{a}z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{a}z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_products() {
        let a = Poly::from_i64(&[1, 1]);
        let b = Poly::from_i64(&[1, -1, -1]);
        let c = Poly::from_i64(&[2, 3]);
        let g = (&a * &b).gcd(&(&a * &c));
        assert_eq!(g, a);
        assert_eq!((&a * &b).div_exact(&a), b);
    }

    #[test]
    fn dyadic_sign() {
        // 1 - 3z changes sign at 1/3.
        let p = Poly::from_i64(&[1, -3]);
        assert_eq!(p.sign_at_dyadic(&BigInt::from(1), 2), Sign::Plus);
        assert_eq!(p.sign_at_dyadic(&BigInt::from(1), 1), Sign::Minus);
        let q = Poly::from_i64(&[1, -2]);
        assert_eq!(q.sign_at_dyadic(&BigInt::from(1), 1), Sign::NoSign);
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_i64(&[1, -2, 0, -1]).to_string(), "1 - 2z - z^3");
    }
}
