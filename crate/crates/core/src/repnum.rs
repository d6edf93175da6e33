//! Representation numbers r_n(m): the divisor-sum formulas for
//! n = 2, 4, 6, 8, 10, the n = 12 formula that needs eta^12(2z), the
//! Eisenstein coefficients c_m for odd m, and a brute-force lattice count.

use std::borrow::Cow;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    bernoulli, chi4, divisor_power_sum, euler_number, factorize, factorize_u64, DivisorFilter, Factorization, Rational,
};
use crate::error::{Error, Result};
use crate::gaussian::norm_power_sum;
use crate::qseries::{eta12_2z, TruncatedSeries};

/// The even `n` for which r_n(m) has a log-polynomial formula.
pub const ELEMENTARY_N: [u32; 5] = [2, 4, 6, 8, 10];

/// A pair `(n, m)` together with an optional known factorization of `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepQuery {
    pub n: u32,
    pub m: BigInt,
    factorization: Option<Factorization>,
}

impl RepQuery {
    pub fn new(n: u32, m: impl Into<BigInt>) -> Self {
        Self {
            n,
            m: m.into(),
            factorization: None,
        }
    }

    /// Attaches a factorization, which must reconstruct `m`.
    pub fn with_factorization(n: u32, m: impl Into<BigInt>, f: Factorization) -> Result<Self> {
        let m = m.into();
        if f.value() != m {
            return Err(Error::InvalidFactorization(format!("{f} does not multiply out to {m}")));
        }
        Ok(Self {
            n,
            m,
            factorization: Some(f),
        })
    }

    pub fn factorization(&self) -> Option<&Factorization> {
        self.factorization.as_ref()
    }

    fn resolved_factorization(&self) -> Result<Cow<'_, Factorization>> {
        match &self.factorization {
            Some(f) => Ok(Cow::Borrowed(f)),
            None => factorize(&self.m).map(Cow::Owned),
        }
    }
}

/// Divisor power sum of `m / 2^e`, zero when `2^e` does not divide `m`.
fn sum_over_cofactor(f: &Factorization, two_power: u32, t: u32, filter: DivisorFilter) -> BigInt {
    f.divide_prime_power(2, two_power)
        .map_or_else(BigInt::zero, |g| divisor_power_sum(&g, t, filter))
}

/// The three terms `(4/5) A + (64/5) B + (8/5) S` of the r_10 formula, where
/// `A = sum chi4(d) d^4`, `B = sum chi4(m/d) d^4` and `S = sum_{Nm(d) = m} d^4`.
pub fn r10_terms(f: &Factorization) -> Result<[Rational; 3]> {
    let fifth = |c: i64, v: BigInt| Rational::new(v * c, BigInt::from(5));
    Ok([
        fifth(4, divisor_power_sum(f, 4, DivisorFilter::Chi4AtDivisor)),
        fifth(64, divisor_power_sum(f, 4, DivisorFilter::Chi4AtCofactor)),
        fifth(8, norm_power_sum(f, 4)?),
    ])
}

/// r_n(m) for n in {2, 4, 6, 8, 10} from the classical divisor-sum formulas.
///
/// Only the factorization of `m` is used (computed when absent), so the cost
/// is polynomial in `log m`. Sums over divisors of `m/2` or `m/4` are empty
/// when that quotient is not an integer.
pub fn r_elementary(q: &RepQuery) -> Result<BigInt> {
    if !ELEMENTARY_N.contains(&q.n) {
        return Err(Error::InvalidParameter(format!(
            "no elementary formula for r_{}; use r12 for n = 12 or the brute-force count",
            q.n
        )));
    }
    if q.m.is_negative() {
        return Err(Error::InvalidParameter(format!("m must be non-negative, got {}", q.m)));
    }
    if q.m.is_zero() {
        return Ok(BigInt::one());
    }
    let f = q.resolved_factorization()?;
    let f = f.as_ref();
    use DivisorFilter::*;
    let value = match q.n {
        2 => divisor_power_sum(f, 0, Chi4AtDivisor) * 4,
        4 => divisor_power_sum(f, 1, Odd) * 8 + sum_over_cofactor(f, 1, 1, Odd) * 16,
        6 => divisor_power_sum(f, 2, Chi4AtCofactor) * 16 - divisor_power_sum(f, 2, Chi4AtDivisor) * 4,
        8 => {
            divisor_power_sum(f, 3, All) * 16 - sum_over_cofactor(f, 1, 3, All) * 32
                + sum_over_cofactor(f, 2, 3, All) * 256
        }
        10 => {
            let total: Rational = r10_terms(f)?.into_iter().sum();
            if !total.is_integer() {
                return Err(Error::CertificateCheck(format!("r_10({}) summed to {total}", q.m)));
            }
            total.to_integer()
        }
        _ => unreachable!(),
    };
    Ok(value)
}

/// Precomputed eta^12(2z) coefficients for the n = 12 formula.
///
/// Building this table is quadratic in its order; it is the part of r_12
/// that no divisor sum replaces.
#[derive(Clone, Debug)]
pub struct R12Context {
    eta: TruncatedSeries,
}

impl R12Context {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self {
            eta: eta12_2z(order.max(1))?,
        })
    }

    pub fn order(&self) -> usize {
        self.eta.order()
    }

    pub fn eta(&self) -> &TruncatedSeries {
        &self.eta
    }
}

/// `r_12(m) = 8 sigma_5(m) - 512 sigma_5(m/4) + 16 [q^m] eta^12(2z)`.
pub fn r12(m: &BigInt, ctx: &R12Context) -> Result<BigInt> {
    if m.is_negative() {
        return Err(Error::InvalidParameter(format!("m must be non-negative, got {m}")));
    }
    if m.is_zero() {
        return Ok(BigInt::one());
    }
    let index = m.to_usize().filter(|&i| i <= ctx.order()).ok_or(Error::BeyondOrder {
        index: m.to_usize().unwrap_or(usize::MAX),
        order: ctx.order(),
    })?;
    let f = factorize_u64(index as u64);
    let cusp = ctx
        .eta
        .integer_coeff(index)?
        .expect("eta^12(2z) has integer coefficients");
    Ok(
        divisor_power_sum(&f, 5, DivisorFilter::All) * 8 - sum_over_cofactor(&f, 2, 5, DivisorFilter::All) * 512
            + cusp * 16,
    )
}

/// Size limits for the brute-force count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteGuard {
    pub max_n: u32,
    pub max_m: u64,
}

impl Default for BruteGuard {
    fn default() -> Self {
        Self {
            max_n: 16,
            max_m: 10_000,
        }
    }
}

/// Table of r_j(t) for all `j <= n_max`, `t <= m_max`, filled by
/// `r_j(t) = sum_{x in Z, x^2 <= t} r_{j-1}(t - x^2)` from `r_0 = [1, 0, 0, ...]`.
#[derive(Clone, Debug)]
pub struct BruteForceTable {
    rows: Vec<Vec<BigInt>>,
}

impl BruteForceTable {
    pub fn new(n_max: u32, m_max: u64, guard: BruteGuard) -> Result<Self> {
        if n_max > guard.max_n || m_max > guard.max_m {
            return Err(Error::Guard(format!(
                "brute force limited to n <= {}, m <= {} (asked n = {n_max}, m = {m_max})",
                guard.max_n, guard.max_m
            )));
        }
        let size = m_max as usize + 1;
        let root = (m_max as usize).sqrt();
        let mut rows = Vec::with_capacity(n_max as usize + 1);
        let mut base = vec![BigInt::zero(); size];
        base[0] = BigInt::one();
        rows.push(base);
        for j in 1..=n_max as usize {
            let prev = &rows[j - 1];
            let mut row = prev.clone();
            for x in 1..=root {
                let sq = x * x;
                for t in sq..size {
                    if !prev[t - sq].is_zero() {
                        row[t] += &prev[t - sq] * 2;
                    }
                }
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn n_max(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn m_max(&self) -> u64 {
        (self.rows[0].len() - 1) as u64
    }

    pub fn get(&self, n: u32, m: u64) -> Result<&BigInt> {
        self.rows
            .get(n as usize)
            .and_then(|row| row.get(m as usize))
            .ok_or_else(|| Error::Guard(format!("r_{n}({m}) is outside the table")))
    }
}

/// Direct lattice-point count r_n(m) under the default guard.
pub fn r_bruteforce(n: u32, m: &BigInt) -> Result<BigInt> {
    r_bruteforce_with(n, m, BruteGuard::default())
}

pub fn r_bruteforce_with(n: u32, m: &BigInt, guard: BruteGuard) -> Result<BigInt> {
    let m = m
        .to_u64()
        .ok_or_else(|| Error::Guard(format!("brute force needs 0 <= m <= {}, got {m}", guard.max_m)))?;
    let table = BruteForceTable::new(n, m, guard)?;
    table.get(n, m).cloned()
}

/// Coefficient c_m of the Eisenstein part of theta_n at odd `m`:
///
/// * `n = 2 mod 4`: `4 / |e_{n/2-1}| (chi4(m) 2^{n/2-1} + chi4(n/2)) sum_{d|m} chi4(d) d^{n/2-1}`
/// * `n = 0 mod 4`: `n / ((2^{n/2} - 1) |b_{n/2}|) sum_{d|m} d^{n/2-1}`
pub fn eisenstein_c(n: u32, m: &BigInt, f: Option<&Factorization>) -> Result<Rational> {
    if n <= 2 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "c_m is defined here for even n > 2, got {n}"
        )));
    }
    if !m.is_positive() || (m % 2u32).is_zero() {
        return Err(Error::InvalidParameter(format!(
            "c_m is only given for odd positive m, got {m}"
        )));
    }
    let owned;
    let f = match f {
        Some(f) => f,
        None => {
            owned = factorize(m)?;
            &owned
        }
    };
    let k = n / 2;
    let int = |v: BigInt| Rational::from_integer(v);
    if n % 4 == 2 {
        let e = euler_number(k - 1).abs();
        let twist = BigInt::from(chi4(m)) * BigInt::from(2).pow(k - 1) + chi4(&BigInt::from(k));
        let sum = divisor_power_sum(f, k - 1, DivisorFilter::Chi4AtDivisor);
        Ok(Rational::new(BigInt::from(4), e) * int(twist) * int(sum))
    } else {
        let denom = int(BigInt::from(2).pow(k) - 1) * bernoulli(k).abs();
        let sum = divisor_power_sum(f, k - 1, DivisorFilter::All);
        Ok(int(BigInt::from(n)) / denom * int(sum))
    }
}
