//! Exact truncated power series in `q` and the concrete q-expansions used
//! throughout: theta series, eta^12(2z), the Eisenstein series of level 4
//! and the CM cusp form attached to the Hecke characters of Q(i).
//!
//! A series of order `N` stores the coefficients of `q^0 ..= q^N`. Binary
//! operations truncate to the smaller order and asking for a coefficient past
//! the order is an error rather than an implicit zero.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli, divisor_power_sum, factorizations_up_to, gen_bernoulli_chi4, DivisorFilter, Rational};
use crate::error::{Error, Result};
use crate::gaussian::norm_power_sum;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// # Panics
    /// If `coeffs` is empty; a series always has at least its constant term.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_integers(coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        Self::new(coeffs.into_iter().map(Rational::from_integer).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Result<&Rational> {
        self.coeffs.get(m).ok_or(Error::BeyondOrder {
            index: m,
            order: self.order(),
        })
    }

    /// Coefficient `m` as an integer; `None` if it is not integral.
    pub fn integer_coeff(&self, m: usize) -> Result<Option<BigInt>> {
        let c = self.coeff(m)?;
        Ok(c.is_integer().then(|| c.to_integer()))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(Rational::is_integer)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        Self {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        if self.is_integral() && other.is_integral() {
            let a = integer_coeffs(self, order);
            let b = integer_coeffs(other, order);
            return Self::from_integers(convolve(&a, &b, order));
        }
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    /// `self^n` by binary exponentiation; `n = 0` gives the unit series.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse; requires a non-zero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv_c0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv_c0.clone());
        for m in 1..self.coeffs.len() {
            let mut acc = Rational::zero();
            for j in 1..=m {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[m - j];
                }
            }
            out.push(-acc * &inv_c0);
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// `f(q^r)`, kept at the same order.
    pub fn dilate(&self, r: usize) -> Self {
        assert!(r > 0, "dilation factor must be positive");
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = i * r;
            if j >= out.len() {
                break;
            }
            out[j] = c.clone();
        }
        Self { coeffs: out }
    }

    /// Plain-text form `c0 + c1*q + c2*q^2 + ...`, zero terms omitted.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let unit = mag.is_one();
            match i {
                0 => write!(out, "{mag}").unwrap(),
                _ => {
                    if !unit {
                        write!(out, "{mag}*").unwrap();
                    }
                    out.push('q');
                    if i > 1 {
                        write!(out, "^{i}").unwrap();
                    }
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        write!(out, " + O(q^{})", self.order() + 1).unwrap();
        out
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            order: self.order(),
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        if json.coeffs.len() != json.order + 1 {
            return Err(Error::Parse(format!(
                "series of order {} needs {} coefficients, got {}",
                json.order,
                json.order + 1,
                json.coeffs.len()
            )));
        }
        let coeffs = json
            .coeffs
            .iter()
            .map(|c| {
                c.parse::<Rational>()
                    .map_err(|_| Error::Parse(format!("bad rational {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeffs })
    }
}

/// Wire form of a series: coefficients as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub order: usize,
    pub coeffs: Vec<String>,
}

fn integer_coeffs(s: &TruncatedSeries, order: usize) -> Vec<BigInt> {
    s.coeffs[..=order].iter().map(Rational::to_integer).collect()
}

fn convolve(a: &[BigInt], b: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn zip_with(a: &TruncatedSeries, b: &TruncatedSeries, f: impl Fn(&Rational, &Rational) -> Rational) -> TruncatedSeries {
    let order = a.order().min(b.order());
    TruncatedSeries {
        coeffs: a.coeffs[..=order]
            .iter()
            .zip(&b.coeffs[..=order])
            .map(|(x, y)| f(x, y))
            .collect(),
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Integer coefficients of theta_1 = 1 + 2 sum q^{j^2}.
fn theta_one_coeffs(order: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); order + 1];
    c[0] = BigInt::one();
    let mut j = 1usize;
    while j * j <= order {
        c[j * j] = BigInt::from(2);
        j += 1;
    }
    c
}

pub fn theta_one(order: usize) -> TruncatedSeries {
    TruncatedSeries::from_integers(theta_one_coeffs(order))
}

/// theta_n = theta_1^n; the coefficient of `q^m` is r_n(m).
///
/// Built by `n` successive multiplications with the sparse theta_1, which
/// costs `O(n N sqrt(N))` instead of dense squaring.
pub fn theta_series(n: u32, order: usize) -> Result<TruncatedSeries> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "theta_n needs a positive even n, got {n}"
        )));
    }
    let squares: Vec<usize> = (1..).map(|j: usize| j * j).take_while(|&s| s <= order).collect();
    let mut acc = vec![BigInt::zero(); order + 1];
    acc[0] = BigInt::one();
    for _ in 0..n {
        let mut next = acc.clone();
        for (m, slot) in next.iter_mut().enumerate() {
            let mut extra = BigInt::zero();
            for &s in squares.iter().take_while(|&&s| s <= m) {
                extra += &acc[m - s];
            }
            *slot += extra * 2;
        }
        acc = next;
    }
    Ok(TruncatedSeries::from_integers(acc))
}

/// eta^12(2z) = q prod_{j >= 1} (1 - q^{2j})^12.
///
/// Each block `(1 - x^j)^12` (with `x = q^2`) is formed by binary powering
/// and multiplied into the running product; only factors that can reach the
/// truncation order are used.
pub fn eta12_2z(order: usize) -> Result<TruncatedSeries> {
    if order == 0 {
        return Err(Error::InvalidParameter("eta^12(2z) needs order >= 1".into()));
    }
    let top = (order - 1) / 2;
    let mut acc = vec![BigInt::zero(); top + 1];
    acc[0] = BigInt::one();
    for j in 1..=top {
        let block = sparse_binomial_block(j, 12, top);
        let mut next = vec![BigInt::zero(); top + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (shift, c) in &block {
                if i + shift > top {
                    break;
                }
                next[i + shift] += a * *c;
            }
        }
        acc = next;
    }
    let mut coeffs = vec![BigInt::zero(); order + 1];
    for (i, c) in acc.into_iter().enumerate() {
        coeffs[2 * i + 1] = c;
    }
    Ok(TruncatedSeries::from_integers(coeffs))
}

/// `(1 - x^j)^e` as sorted `(exponent, coefficient)` pairs, truncated at `top`.
fn sparse_binomial_block(j: usize, e: u32, top: usize) -> Vec<(usize, i64)> {
    fn mul(a: &[(usize, i64)], b: &[(usize, i64)], top: usize) -> Vec<(usize, i64)> {
        let mut dense: std::collections::BTreeMap<usize, i64> = Default::default();
        for (x, c) in a {
            for (y, d) in b {
                if x + y <= top {
                    *dense.entry(x + y).or_default() += c * d;
                }
            }
        }
        dense.into_iter().filter(|(_, c)| *c != 0).collect()
    }
    let mut result = vec![(0usize, 1i64)];
    let mut base = vec![(0usize, 1i64), (j, -1i64)];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base, top);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base, top);
        }
    }
    result
}

/// Coefficients `f(m)` for `m = 1..=order` with the given constant term.
fn arithmetic_series(
    constant: Rational,
    order: usize,
    f: impl Fn(&crate::arith::Factorization) -> Result<BigInt>,
) -> Result<TruncatedSeries> {
    let factorizations = factorizations_up_to(order);
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(constant);
    for fm in factorizations.iter().skip(1) {
        coeffs.push(Rational::from_integer(f(fm)?));
    }
    Ok(TruncatedSeries::new(coeffs))
}

/// Level-one Eisenstein series `-b_k/(2k) + sum sigma_{k-1}(m) q^m` for even
/// `k`. At `k = 2` the series is only quasi-modular; it is admitted because
/// the weight-2 basis is built from `E(q) - 2E(q^2)` and `E(q^2) - 2E(q^4)`.
pub fn eisenstein_e(k: u32, order: usize) -> Result<TruncatedSeries> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidParameter(format!("E needs an even weight >= 2, got {k}")));
    }
    let constant = -bernoulli(k) / Rational::from_integer(BigInt::from(2 * k));
    arithmetic_series(constant, order, |f| Ok(divisor_power_sum(f, k - 1, DivisorFilter::All)))
}

fn check_odd_weight(k: u32, name: &str) -> Result<()> {
    if k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("{name} needs an odd weight, got {k}")));
    }
    Ok(())
}

/// Constant term `-b_k^chi / (2k)` of the Eisenstein series with
/// coefficients `sum chi4(d) d^{k-1}`.
fn chi4_eisenstein_constant(k: u32) -> Rational {
    -gen_bernoulli_chi4(k) / Rational::from_integer(BigInt::from(2 * k))
}

/// `E_1 = a + sum_m (sum_{d|m} chi4(m/d) d^{k-1}) q^m` for odd `k`.
///
/// For `k >= 3` this series vanishes at the cusp at infinity, so `a = 0`.
/// At `k = 1` it coincides with `E_2` and both carry the constant `1/4`.
pub fn eisenstein_e1(k: u32, order: usize) -> Result<TruncatedSeries> {
    check_odd_weight(k, "E1")?;
    let constant = if k == 1 {
        chi4_eisenstein_constant(1)
    } else {
        Rational::zero()
    };
    arithmetic_series(constant, order, |f| {
        Ok(divisor_power_sum(f, k - 1, DivisorFilter::Chi4AtCofactor))
    })
}

/// `E_2 = -b_k^chi/(2k) + sum_m (sum_{d|m} chi4(d) d^{k-1}) q^m` for odd `k`.
pub fn eisenstein_e2(k: u32, order: usize) -> Result<TruncatedSeries> {
    check_odd_weight(k, "E2")?;
    arithmetic_series(chi4_eisenstein_constant(k), order, |f| {
        Ok(divisor_power_sum(f, k - 1, DivisorFilter::Chi4AtDivisor))
    })
}

/// The normalized CM eigenform of weight `k` on Gamma_1(4):
/// `C(q) = (1/4) sum_m (sum_{Nm(d) = m} d^{k-1}) q^m`.
///
/// The space of CM forms is one-dimensional for `k = 1 mod 4, k >= 5` and
/// zero otherwise, so other weights are rejected. The coefficient of `q^2`
/// is `(1+i)^{k-1} = (-4)^{(k-1)/4}`.
pub fn cm_form(k: u32, order: usize) -> Result<TruncatedSeries> {
    if k < 5 || k % 4 != 1 {
        return Err(Error::InvalidParameter(format!(
            "no CM cusp form of weight {k} on Gamma_1(4): the CM subspace is non-zero only for k = 1 mod 4, k >= 5"
        )));
    }
    let four = BigInt::from(4);
    arithmetic_series(Rational::zero(), order, |f| {
        let s = norm_power_sum(f, k - 1)?;
        debug_assert!((&s % &four).is_zero());
        Ok(s / &four)
    })
}
