//! Growth series as rational functions with integer coefficients.

mod poly;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use poly::Poly;

use crate::error::{Error, Result};
use crate::group::{Factor, GroupSpec};

/// Bisection stops once the bracket is at most 2^-BISECT_BITS wide.
const BISECT_BITS: u32 = 50;
/// The sign scan uses steps of 2^-SCAN_BITS.
const SCAN_BITS: u32 = 14;

pub const POLYNOMIAL_FLAG: &str = "polynomial growth data insufficient";

/// N(z)/D(z) with D(0) = 1, reduced by the polynomial gcd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSeries {
    num: Poly,
    den: Poly,
}

impl RationalSeries {
    /// Builds and reduces N/D. Fails unless D(0) = ±1 after reduction.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidSpec("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() > 0 {
            (num.div_exact(&g), den.div_exact(&g))
        } else {
            (num, den)
        };
        let d0 = den.coeff(0);
        if !d0.abs().is_one() {
            return Err(Error::InvalidSpec(format!(
                "denominator constant term {d0} is not a unit"
            )));
        }
        if d0.is_negative() {
            num = -&num;
            den = -&den;
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Taylor coefficients c_0..c_{n-1} by the linear recurrence
    /// c_k = N_k - sum_{j>=1} D_j c_{k-j}.
    pub fn coefficients(&self, n: usize) -> Vec<BigInt> {
        let mut c: Vec<BigInt> = Vec::with_capacity(n);
        for k in 0..n {
            let mut v = self.num.coeff(k);
            for j in 1..=self.den.degree().min(k) {
                v -= self.den.coeff(j) * &c[k - j];
            }
            c.push(v);
        }
        c
    }

    /// Taylor coefficients by inverting D as a power series and multiplying by N.
    pub fn coefficients_by_division(&self, n: usize) -> Vec<BigInt> {
        let mut inv = vec![BigInt::zero(); n];
        if n > 0 {
            inv[0] = BigInt::one();
        }
        for k in 1..n {
            let mut v = BigInt::zero();
            for j in 1..=k {
                v -= self.den.coeff(j) * &inv[k - j];
            }
            inv[k] = v;
        }
        (0..n)
            .map(|k| (0..=k).map(|i| self.num.coeff(i) * &inv[k - i]).sum())
            .collect()
    }

    /// The first `n` sphere counts as unsigned integers. Fails if a coefficient
    /// is negative.
    pub fn sphere_counts(&self, n: usize) -> Result<Vec<BigUint>> {
        self.coefficients(n)
            .into_iter()
            .map(|c| {
                c.to_biguint()
                    .ok_or_else(|| Error::InvalidSpec("series has a negative coefficient".into()))
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den)
            .expect("product of unit-constant denominators")
    }

    /// Growth series of a free product:
    /// F = F1 F2 / (1 - (F1 - 1)(F2 - 1)), which over N_i/D_i reads
    /// N1 N2 / (D1 D2 - (N1 - D1)(N2 - D2)).
    pub fn free_product(&self, other: &Self) -> Self {
        let num = &self.num * &other.num;
        let a = &self.num - &self.den;
        let b = &other.num - &other.den;
        let den = &(&self.den * &other.den) - &(&a * &b);
        Self::new(num, den).expect("free product denominator has constant term 1")
    }

    /// Growth data: smallest positive root z* of D in (0, 1] and v = -log z*.
    ///
    /// The sign of D is evaluated exactly at dyadic points: a scan of step
    /// 2^-14 finds the first sign change, then bisection narrows the bracket to
    /// width 2^-50. Polynomial series report v = 0 with a flag.
    pub fn growth_rate(&self) -> Result<GrowthRate> {
        if self.is_polynomial() {
            return Ok(GrowthRate {
                v: 0.0,
                z_star: 1.0,
                bracket: (1.0, 1.0),
                flag: Some(POLYNOMIAL_FLAG.to_string()),
            });
        }
        let den = &self.den;
        let step = 1u64 << SCAN_BITS;
        let mut lo = BigInt::zero();
        let mut hi = None;
        for m in 1..=step {
            let m = BigInt::from(m);
            match den.sign_at_dyadic(&m, SCAN_BITS) {
                Sign::Plus => lo = m,
                Sign::NoSign => {
                    let z = m.to_f64().unwrap() / step as f64;
                    return Ok(GrowthRate {
                        v: neg_ln(z),
                        z_star: z,
                        bracket: (z, z),
                        flag: None,
                    });
                }
                Sign::Minus => {
                    hi = Some(m);
                    break;
                }
            }
        }
        let Some(hi) = hi else {
            return Err(Error::NoRoot(format!("denominator {den}")));
        };
        let shift = BISECT_BITS - SCAN_BITS;
        let mut lo = lo << shift;
        let mut hi = hi << shift;
        let one = BigInt::one();
        while &hi - &lo > one {
            let mid: BigInt = (&lo + &hi) >> 1;
            match den.sign_at_dyadic(&mid, BISECT_BITS) {
                Sign::Plus => lo = mid,
                Sign::Minus => hi = mid,
                Sign::NoSign => {
                    lo = mid.clone();
                    hi = mid;
                }
            }
        }
        let scale = (BISECT_BITS as f64).exp2();
        let lo = lo.to_f64().unwrap() / scale;
        let hi = hi.to_f64().unwrap() / scale;
        let z = 0.5 * (lo + hi);
        Ok(GrowthRate {
            v: neg_ln(z),
            z_star: z,
            bracket: (lo, hi),
            flag: None,
        })
    }
}

impl std::fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRate {
    /// Exponential growth rate in nats per unit length.
    pub v: f64,
    /// e^{-v}, the smallest positive root of the denominator.
    pub z_star: f64,
    /// Bracket (lo, hi) with D(lo) > 0 >= D(hi), or a degenerate bracket at an exact root.
    pub bracket: (f64, f64),
    pub flag: Option<String>,
}

/// One row of a growth table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: usize,
    pub sphere: BigUint,
    pub ball: BigUint,
    /// log Card B_n / n, undefined at n = 0.
    pub log_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub series: RationalSeries,
    pub rate: GrowthRate,
    pub table: Vec<CountRow>,
}

/// Growth series of a free or finite factor: (1+z)/(1-(2k-1)z) for F_k, the
/// sphere-size polynomial for a finite group.
pub fn factor_series(factor: &Factor) -> RationalSeries {
    match factor {
        Factor::Free { rank } => RationalSeries::new(
            Poly::from_i64(&[1, 1]),
            Poly::from_i64(&[1, -(2 * *rank as i64 - 1)]),
        )
        .expect("free group series"),
        Factor::Finite(g) => RationalSeries::polynomial(Poly::from_i64(
            &g.sphere_sizes().iter().map(|&c| c as i64).collect::<Vec<_>>(),
        )),
    }
}

pub fn free_product_series(f1: &RationalSeries, f2: &RationalSeries) -> RationalSeries {
    f1.free_product(f2)
}

/// Word length adds over the union generating set, so the series multiply.
pub fn direct_with_finite_series(finite: &RationalSeries, base: &RationalSeries) -> RationalSeries {
    finite.mul(base)
}

/// Growth series of any supported group model. Products with three or more
/// factors are composed pairwise from the left.
pub fn group_series(group: &GroupSpec) -> RationalSeries {
    match group {
        GroupSpec::Free { rank } => factor_series(&Factor::Free { rank: *rank }),
        GroupSpec::Finite(g) => factor_series(&Factor::Finite(g.clone())),
        GroupSpec::FreeProduct(factors) => {
            let mut it = factors.iter().map(factor_series);
            let first = it.next().expect("at least two factors");
            it.fold(first, |acc, f| acc.free_product(&f))
        }
        GroupSpec::DirectWithFinite { finite, base } => direct_with_finite_series(
            &factor_series(&Factor::Finite(finite.clone())),
            &group_series(base),
        ),
    }
}

/// -ln z without producing a negative zero at z = 1.
fn neg_ln(z: f64) -> f64 {
    0.0 - z.ln()
}

fn log_rate(ball: &BigUint, n: usize) -> Option<f64> {
    (n > 0).then(|| big_ln(ball) / n as f64)
}

/// Natural log of a big unsigned integer, accurate for values beyond f64 range.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Series, growth rate and count table up to `n_max`.
pub fn growth_report(group: &GroupSpec, n_max: usize) -> Result<GrowthReport> {
    let series = group_series(group);
    let rate = series.growth_rate()?;
    let spheres = series.sphere_counts(n_max + 1)?;
    let mut ball = BigUint::zero();
    let table = spheres
        .into_iter()
        .enumerate()
        .map(|(n, sphere)| {
            ball += &sphere;
            CountRow {
                n,
                log_rate: log_rate(&ball, n),
                sphere,
                ball: ball.clone(),
            }
        })
        .collect();
    Ok(GrowthReport {
        series,
        rate,
        table,
    })
}

/// Counts obtained by enumerating spheres, with log Card B_n / n.
pub fn empirical_growth(group: &GroupSpec, n_max: usize, cap: usize) -> Result<Vec<CountRow>> {
    let mut ball = BigUint::zero();
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let remaining = cap.saturating_sub(ball.to_usize().unwrap_or(usize::MAX));
        let sphere = group.enumerate_sphere(n, remaining).map_err(|e| match e {
            Error::CapExceeded { required, .. } => Error::CapExceeded {
                what: "ball enumeration",
                cap,
                required: required.saturating_add(ball.to_usize().unwrap_or(usize::MAX)),
                lower_bound: false,
            },
            e => e,
        })?;
        let sphere = BigUint::from(sphere.len());
        ball += &sphere;
        rows.push(CountRow {
            n,
            log_rate: log_rate(&ball, n),
            sphere,
            ball: ball.clone(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    fn prod(a: usize, b: usize) -> GroupSpec {
        GroupSpec::free_product(vec![cyc(a), cyc(b)]).unwrap()
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn factor_series_examples() {
        assert_eq!(group_series(&cyc(2)).numerator(), &Poly::from_i64(&[1, 1]));
        assert_eq!(group_series(&cyc(4)).numerator(), &Poly::from_i64(&[1, 2, 1]));
        let f2 = group_series(&GroupSpec::free(2).unwrap());
        assert_eq!(ints(&f2.coefficients(4)), [1, 4, 12, 36]);
    }

    #[test]
    fn free_product_examples() {
        let s = group_series(&prod(2, 4));
        assert_eq!(ints(&s.coefficients(5)), [1, 3, 5, 8, 13]);
        // Equivalent to (1+z)^3 / (1 - 2z^2 - z^3) after cancelling (1+z).
        let unreduced = RationalSeries {
            num: Poly::from_i64(&[1, 3, 3, 1]),
            den: Poly::from_i64(&[1, 0, -2, -1]),
        };
        assert_eq!(s.coefficients(30), unreduced.coefficients(30));
        assert_eq!(s.denominator(), &Poly::from_i64(&[1, -1, -1]));

        let s = group_series(&prod(2, 3));
        assert_eq!(s.coefficients(3)[2], BigInt::from(4));
        let s = group_series(&prod(2, 2));
        assert_eq!(s.numerator(), &Poly::from_i64(&[1, 1]));
        assert_eq!(s.denominator(), &Poly::from_i64(&[1, -1]));
    }

    #[test]
    fn direct_product_examples() {
        let z2 = group_series(&cyc(2));
        let f2 = group_series(&GroupSpec::free(2).unwrap());
        let d = direct_with_finite_series(&z2, &f2);
        assert_eq!(d.numerator(), &Poly::from_i64(&[1, 2, 1]));
        assert_eq!(d.denominator(), &Poly::from_i64(&[1, -3]));
        let trivial = RationalSeries::polynomial(Poly::one());
        assert_eq!(direct_with_finite_series(&trivial, &f2), f2);
        assert_eq!(direct_with_finite_series(&z2, &z2).numerator(), &Poly::from_i64(&[1, 2, 1]));
    }

    #[test]
    fn growth_rates() {
        let r = group_series(&GroupSpec::free(2).unwrap()).growth_rate().unwrap();
        assert!((r.v - 3f64.ln()).abs() < 1e-10);
        let r = group_series(&prod(2, 4)).growth_rate().unwrap();
        assert!((r.z_star - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
        assert!((r.v - 0.4812118).abs() < 1e-7);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-12);
        let r = group_series(&prod(2, 2)).growth_rate().unwrap();
        assert_eq!((r.v, r.z_star), (0.0, 1.0));
        let r = group_series(&cyc(5)).growth_rate().unwrap();
        assert_eq!(r.flag.as_deref(), Some(POLYNOMIAL_FLAG));
    }

    #[test]
    fn no_root_is_an_error() {
        let s = RationalSeries::new(Poly::one(), Poly::from_i64(&[1, 1])).unwrap();
        assert!(matches!(s.growth_rate(), Err(Error::NoRoot(_))));
    }

    #[test]
    fn recurrence_matches_division() {
        for g in [prod(2, 4), prod(3, 5), GroupSpec::free(3).unwrap()] {
            let s = group_series(&g);
            assert_eq!(s.coefficients(50), s.coefficients_by_division(50));
        }
    }

    #[test]
    fn empirical_counts() {
        let rows = empirical_growth(&GroupSpec::free(2).unwrap(), 10, 200_000).unwrap();
        assert_eq!(rows[10].ball, BigUint::from(118_097u32));
        assert!((rows[10].log_rate.unwrap() - 1.168).abs() < 1e-3);
        let rows = empirical_growth(&prod(2, 4), 3, 100).unwrap();
        assert_eq!(rows[3].ball, BigUint::from(17u32));
        assert_eq!(rows[0].ball, BigUint::one());
    }
}
