//! Exact integer and rational arithmetic plus the classical arithmetic
//! functions used by the representation-number formulas: factorization,
//! the character chi_4, twisted divisor power sums and the Bernoulli / Euler
//! numbers.
//!
//! Integers are `num_bigint::BigInt` and rationals `num_rational::BigRational`;
//! the latter is normalized after every operation (lowest terms, positive
//! denominator), which the determinant and decomposition code relies on when
//! comparing values with `==`.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_prime::nt_funcs::{factorize64, is_prime, is_prime64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::qseries::TruncatedSeries;

pub type Integer = BigInt;
pub type Rational = num_rational::BigRational;

/// Shorthand for an integral rational.
pub fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `num / den` in lowest terms.
pub fn frac(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn is_prime_integer(p: &BigInt) -> bool {
    if p.sign() != Sign::Plus {
        return false;
    }
    match p.to_u64() {
        Some(small) => is_prime64(small),
        None => is_prime(&p.magnitude().clone(), None).probably(),
    }
}

/// Prime factorization of a positive integer: strictly increasing primes
/// with positive exponents. The empty list factors 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Factorization {
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from arbitrary `(p, e)` pairs. Pairs are sorted
    /// and repeated primes merged; every `p` must pass a primality check and
    /// every `e` must be positive.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (BigInt, u32)>) -> Result<Self> {
        let mut pairs: Vec<(BigInt, u32)> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut factors: Vec<(BigInt, u32)> = Vec::with_capacity(pairs.len());
        for (p, e) in pairs {
            if e == 0 {
                return Err(Error::InvalidFactorization(format!("zero exponent on {p}")));
            }
            if !is_prime_integer(&p) {
                return Err(Error::InvalidFactorization(format!("{p} is not prime")));
            }
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer this factorization represents.
    pub fn value(&self) -> BigInt {
        self.factors.iter().map(|(p, e)| p.pow(*e)).product()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        let p = BigInt::from(p);
        self.factors.iter().find(|(q, _)| *q == p).map_or(0, |(_, e)| *e)
    }

    /// Factorization of `m / p^e`, or `None` when `p^e` does not divide `m`.
    pub fn divide_prime_power(&self, p: u64, e: u32) -> Option<Self> {
        if e == 0 {
            return Some(self.clone());
        }
        let p = BigInt::from(p);
        let mut factors = Vec::with_capacity(self.factors.len());
        let mut found = false;
        for (q, f) in &self.factors {
            if *q == p {
                found = true;
                if *f < e {
                    return None;
                }
                if *f > e {
                    factors.push((q.clone(), f - e));
                }
            } else {
                factors.push((q.clone(), *f));
            }
        }
        found.then_some(Self { factors })
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}

/// Parses `"p1^e1 * p2^e2"` or the CLI form `"p1^e1,p2^e2"`; a bare `p`
/// means exponent 1 and `"1"` is the empty factorization.
impl FromStr for Factorization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        let mut pairs = Vec::new();
        for token in s.split(['*', ',']) {
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::Parse(format!("empty factor in {s:?}")));
            }
            let (p, e) = match token.split_once('^') {
                Some((p, e)) => (p.trim(), e.trim()),
                None => (token, "1"),
            };
            let p = BigInt::from_str(p).map_err(|_| Error::Parse(format!("bad prime {p:?}")))?;
            let e = e
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
            pairs.push((p, e));
        }
        Self::from_pairs(pairs)
    }
}

/// Factors `m >= 1`. Inputs up to 2^64 are handled by trial division and
/// Pollard rho with a deterministic Miller-Rabin test; larger inputs must
/// come with a caller-supplied factorization.
pub fn factorize(m: &BigInt) -> Result<Factorization> {
    if !m.is_positive() {
        return Err(Error::NonPositive(m.to_string()));
    }
    let small = m.to_u64().ok_or_else(|| Error::FactorizationRequired(m.to_string()))?;
    Ok(factorize_u64(small))
}

/// Factorization of a machine-word integer; `0` is treated as `1`'s empty
/// product only by never being passed here (callers check positivity).
pub fn factorize_u64(m: u64) -> Factorization {
    debug_assert!(m > 0);
    if m <= 1 {
        return Factorization::one();
    }
    let factors = factorize64(m)
        .into_iter()
        .map(|(p, e)| (BigInt::from(p), e as u32))
        .collect();
    Factorization { factors }
}

/// Factorizations of every `m` in `1..=limit` from a smallest-prime-factor
/// sieve; index 0 holds the empty factorization as a placeholder.
pub fn factorizations_up_to(limit: usize) -> Vec<Factorization> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut out = Vec::with_capacity(limit + 1);
    out.push(Factorization::one());
    for m in 1..=limit {
        let mut rest = m;
        let mut factors: Vec<(BigInt, u32)> = Vec::new();
        while rest > 1 {
            let p = spf[rest] as usize;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((BigInt::from(p), e));
        }
        out.push(Factorization { factors });
    }
    out
}

/// The non-trivial Dirichlet character of conductor 4.
pub fn chi4(a: &BigInt) -> i32 {
    match a.mod_floor(&BigInt::from(4)).to_u32() {
        Some(1) => 1,
        Some(3) => -1,
        _ => 0,
    }
}

pub fn chi4_u64(a: u64) -> i32 {
    match a % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Which divisors enter a divisor power sum, and with what weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DivisorFilter {
    /// sum over d | m of d^t
    All,
    /// sum over odd d | m of d^t
    Odd,
    /// sum over d | m of chi4(d) d^t
    Chi4AtDivisor,
    /// sum over d | m of chi4(m/d) d^t
    Chi4AtCofactor,
}

impl DivisorFilter {
    pub const ALL: [DivisorFilter; 4] = [
        DivisorFilter::All,
        DivisorFilter::Odd,
        DivisorFilter::Chi4AtDivisor,
        DivisorFilter::Chi4AtCofactor,
    ];
}

/// Divisor power sum evaluated prime by prime, so the cost is polynomial in
/// `log m` once the factorization is known. All four selectors are
/// multiplicative functions of `m`.
pub fn divisor_power_sum(f: &Factorization, t: u32, filter: DivisorFilter) -> BigInt {
    f.factors()
        .iter()
        .map(|(p, e)| local_factor(p, *e, t, filter))
        .product()
}

fn local_factor(p: &BigInt, e: u32, t: u32, filter: DivisorFilter) -> BigInt {
    let chi = chi4(p);
    // weight attached to the divisor p^j
    let weight = |j: u32| -> i32 {
        match filter {
            DivisorFilter::All => 1,
            DivisorFilter::Odd => i32::from(j == 0 || chi != 0),
            DivisorFilter::Chi4AtDivisor => int_pow(chi, j),
            DivisorFilter::Chi4AtCofactor => int_pow(chi, e - j),
        }
    };
    let pt = p.pow(t);
    let mut power = BigInt::one();
    let mut sum = BigInt::zero();
    for j in 0..=e {
        match weight(j) {
            0 => {}
            1 => sum += &power,
            w => sum += &power * w,
        }
        if j < e {
            power *= &pt;
        }
    }
    sum
}

fn int_pow(base: i32, exp: u32) -> i32 {
    if exp == 0 {
        1
    } else {
        base.pow(exp)
    }
}

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());
static EULER: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

/// Row `n` of Pascal's triangle.
fn binomial_row(n: u32) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for j in 1..=n {
        c = c * (n - j + 1) / j;
        row.push(c.clone());
    }
    row
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (1..=k).fold(BigInt::one(), |acc, j| acc * (n - k + j) / j)
}

/// Bernoulli number b_k with the `t / (e^t - 1)` convention (b_1 = -1/2),
/// from `sum_{j<=k} C(k+1, j) b_j = 0`. Values are memoized.
pub fn bernoulli(k: u32) -> Rational {
    let mut table = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= k as usize {
        let j = table.len() as u32;
        if j == 0 {
            table.push(Rational::one());
            continue;
        }
        let row = binomial_row(j + 1);
        let acc: Rational = table
            .iter()
            .zip(&row)
            .map(|(b, c)| b * Rational::from_integer(c.clone()))
            .sum();
        table.push(-acc / Rational::from_integer(BigInt::from(j + 1)));
    }
    table[k as usize].clone()
}

/// Euler number e_k of `2 / (e^t + e^-t)` (e_2 = -1, e_6 = -61), from
/// `sum_{j even <= k} C(k, j) e_j = 0` for even `k >= 2`. Memoized.
pub fn euler_number(k: u32) -> BigInt {
    let mut table = EULER.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= k as usize {
        let j = table.len() as u32;
        let value = if j == 0 {
            BigInt::one()
        } else if j % 2 == 1 {
            BigInt::zero()
        } else {
            let row = binomial_row(j);
            let acc: BigInt = (0..j).step_by(2).map(|i| &row[i as usize] * &table[i as usize]).sum();
            -acc
        };
        table.push(value);
    }
    table[k as usize].clone()
}

/// Generalized Bernoulli number attached to chi_4, read off
/// `(t e^t - t e^{3t}) / (e^{4t} - 1) = sum b_k^chi t^k / k!` by exact
/// truncated division in the formal variable `t`.
pub fn gen_bernoulli_chi4(k: u32) -> Rational {
    let order = k as usize;
    // both sides carry a factor of t, cancelled here
    let mut num = Vec::with_capacity(order + 1);
    let mut den = Vec::with_capacity(order + 1);
    let mut fact = BigInt::one();
    for j in 0..=k {
        if j > 0 {
            fact *= j;
        }
        let three = BigInt::from(3).pow(j);
        num.push(Rational::new(BigInt::one() - three, fact.clone()));
        let four = BigInt::from(4).pow(j + 1);
        den.push(Rational::new(four, &fact * (j + 1)));
    }
    let quotient = TruncatedSeries::new(num)
        .div(&TruncatedSeries::new(den))
        .expect("e^{4t} - 1 over t has constant term 4");
    quotient.coeffs()[order].clone() * Rational::from_integer(fact)
}

/// Exact `|x|` as `f64`, rounded toward zero.
pub fn abs_to_f64_down(x: &Rational) -> f64 {
    let v = x.abs().to_f64().unwrap_or(f64::INFINITY);
    v * (1.0 - 4.0 * f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_divisor_sum(m: u64, t: u32, filter: DivisorFilter) -> BigInt {
        let mut divisors = Vec::new();
        let mut d = 1;
        while d * d <= m {
            if m.is_multiple_of(d) {
                divisors.push(d);
                if d * d != m {
                    divisors.push(m / d);
                }
            }
            d += 1;
        }
        let mut s = BigInt::zero();
        for d in divisors {
            let w = match filter {
                DivisorFilter::All => 1,
                DivisorFilter::Odd => i32::from(d % 2 == 1),
                DivisorFilter::Chi4AtDivisor => chi4_u64(d),
                DivisorFilter::Chi4AtCofactor => chi4_u64(m / d),
            };
            s += BigInt::from(d).pow(t) * w;
        }
        s
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(&BigInt::from(1)).unwrap().is_one());
        let f = factorize(&BigInt::from(12)).unwrap();
        assert_eq!(f.factors(), &[(BigInt::from(2), 2), (BigInt::from(3), 1)]);
        let p = BigInt::from(1_000_000_007u64);
        assert!(is_prime_integer(&p));
        assert_eq!(factorize(&p).unwrap().factors(), &[(p.clone(), 1)]);
    }

    #[test]
    fn factorize_rejects_non_positive() {
        assert!(matches!(factorize(&BigInt::from(0)), Err(Error::NonPositive(_))));
        assert!(matches!(factorize(&BigInt::from(-5)), Err(Error::NonPositive(_))));
        let huge = BigInt::from(u64::MAX) + 2;
        assert!(matches!(factorize(&huge), Err(Error::FactorizationRequired(_))));
    }

    #[test]
    fn factorization_round_trip_small() {
        for m in 1..=100_000u64 {
            let f = factorize_u64(m);
            assert_eq!(f.value(), BigInt::from(m));
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn sieve_matches_factorize() {
        let all = factorizations_up_to(3000);
        for m in 1..=3000u64 {
            assert_eq!(all[m as usize], factorize_u64(m));
        }
    }

    #[test]
    fn factorization_text_format() {
        let f = factorize_u64(360);
        assert_eq!(f.to_string(), "2^3 * 3^2 * 5^1");
        assert_eq!(f.to_string().parse::<Factorization>().unwrap(), f);
        assert_eq!("2^3,3^2,5".parse::<Factorization>().unwrap(), f);
        assert_eq!(Factorization::one().to_string(), "1");
        assert!("4^1".parse::<Factorization>().is_err());
        assert!("2^0".parse::<Factorization>().is_err());
        assert!("2^x".parse::<Factorization>().is_err());
    }

    #[test]
    fn user_supplied_large_prime() {
        // 2^89 - 1 is a Mersenne prime
        let p: BigInt = BigInt::from(2).pow(89) - 1;
        let f = Factorization::from_pairs([(p.clone(), 2)]).unwrap();
        assert_eq!(f.value(), &p * &p);
    }

    #[test]
    fn divide_prime_power() {
        let f = factorize_u64(12);
        assert_eq!(f.divide_prime_power(2, 1).unwrap().value(), BigInt::from(6));
        assert_eq!(f.divide_prime_power(2, 2).unwrap().value(), BigInt::from(3));
        assert!(f.divide_prime_power(2, 3).is_none());
        assert!(factorize_u64(9).divide_prime_power(2, 1).is_none());
    }

    #[test]
    fn chi4_values() {
        assert_eq!(chi4(&BigInt::from(1)), 1);
        assert_eq!(chi4(&BigInt::from(2)), 0);
        assert_eq!(chi4(&BigInt::from(7)), -1);
        assert_eq!(chi4(&BigInt::from(-1)), -1);
        for a in 0..200u64 {
            for b in 0..200u64 {
                if a % 2 == 1 && b % 2 == 1 {
                    assert_eq!(chi4_u64(a * b), chi4_u64(a) * chi4_u64(b));
                }
            }
        }
    }

    #[test]
    fn divisor_sum_examples() {
        let three = factorize_u64(3);
        assert_eq!(divisor_power_sum(&three, 5, DivisorFilter::All), BigInt::from(244));
        for filter in DivisorFilter::ALL {
            for t in 0..6 {
                assert_eq!(divisor_power_sum(&Factorization::one(), t, filter), BigInt::one());
            }
        }
        assert_eq!(
            divisor_power_sum(&factorize_u64(6), 1, DivisorFilter::Odd),
            BigInt::from(4)
        );
    }

    #[test]
    fn divisor_sums_match_naive_loop() {
        let all = factorizations_up_to(10_000);
        for m in 1..=10_000u64 {
            for filter in DivisorFilter::ALL {
                for t in [0, 1, 2] {
                    assert_eq!(
                        divisor_power_sum(&all[m as usize], t, filter),
                        naive_divisor_sum(m, t, filter),
                        "m={m} t={t} {filter:?}"
                    );
                }
            }
        }
        for m in 1..=600u64 {
            for filter in DivisorFilter::ALL {
                for t in [3, 4, 5, 8] {
                    assert_eq!(
                        divisor_power_sum(&all[m as usize], t, filter),
                        naive_divisor_sum(m, t, filter)
                    );
                }
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat(1));
        assert_eq!(bernoulli(1), frac(-1, 2));
        assert_eq!(bernoulli(2), frac(1, 6));
        assert_eq!(bernoulli(3), rat(0));
        assert_eq!(bernoulli(4), frac(-1, 30));
        assert_eq!(bernoulli(6), frac(1, 42));
        assert_eq!(bernoulli(12), frac(-691, 2730));
        for k in (3..60).step_by(2) {
            assert!(bernoulli(k).is_zero());
        }
    }

    #[test]
    fn euler_values() {
        let expected = [1, 0, -1, 0, 5, 0, -61, 0, 1385, 0, -50521];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(euler_number(k as u32), BigInt::from(*e));
        }
        for k in (1..60).step_by(2) {
            assert!(euler_number(k).is_zero());
        }
    }

    /// Closed form B_{k,chi} = 4^{k-1} (B_k(1/4) - B_k(3/4)) with Bernoulli
    /// polynomials expanded from the ordinary Bernoulli numbers.
    fn gen_bernoulli_closed_form(k: u32) -> Rational {
        let bernoulli_poly = |x: &Rational| -> Rational {
            (0..=k)
                .map(|j| Rational::from_integer(binomial(k, j)) * bernoulli(j) * x.pow((k - j) as i32))
                .sum()
        };
        let quarter = frac(1, 4);
        let three_quarters = frac(3, 4);
        rat(BigInt::from(4).pow(k.saturating_sub(1))) * (bernoulli_poly(&quarter) - bernoulli_poly(&three_quarters))
    }

    #[test]
    fn gen_bernoulli_chi4_values() {
        assert_eq!(gen_bernoulli_chi4(0), rat(0));
        assert_eq!(gen_bernoulli_chi4(1), frac(-1, 2));
        assert_eq!(gen_bernoulli_chi4(2), rat(0));
        assert_eq!(gen_bernoulli_chi4(3), frac(3, 2));
        assert_eq!(gen_bernoulli_chi4(5), frac(-25, 2));
        for k in (2..30).step_by(2) {
            assert!(gen_bernoulli_chi4(k).is_zero());
        }
        for k in 1..30 {
            assert_eq!(gen_bernoulli_chi4(k), gen_bernoulli_closed_form(k), "k={k}");
        }
    }

    #[test]
    fn gen_bernoulli_matches_euler_numbers() {
        // b_{k+1}^chi = -(k+1) e_k / 2 for even k
        for k in (0..30).step_by(2) {
            let lhs = gen_bernoulli_chi4(k + 1);
            let rhs = frac(-(BigInt::from(k + 1) * euler_number(k)), 2);
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn magnitude_lower_bounds() {
        use std::f64::consts::{E, PI};
        for j in (2..=40u32).step_by(2) {
            let jf = f64::from(j);
            let bound = 4.0 * (PI * jf / 2.0).sqrt() * (jf / (2.0 * PI * E)).powf(jf);
            assert!(bound < abs_to_f64_down(&bernoulli(j)), "b_{j}");
            let euler = rat(euler_number(j));
            let bound = 8.0 * (jf / (2.0 * PI)).sqrt() * (2.0 * jf / (PI * E)).powf(jf);
            assert!(bound < abs_to_f64_down(&euler), "e_{j}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn factorize_random_u64(m in 1u64..) {
                let f = factorize_u64(m);
                prop_assert_eq!(f.value(), BigInt::from(m));
                for (p, e) in f.factors() {
                    prop_assert!(*e > 0);
                    prop_assert!(is_prime_integer(p));
                }
                prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            }

            #[test]
            fn divisor_sums_multiplicative(a in 1u64..3000, b in 1u64..3000, t in 0u32..6) {
                prop_assume!(num_integer::gcd(a, b) == 1);
                for filter in DivisorFilter::ALL {
                    let lhs = divisor_power_sum(&factorize_u64(a * b), t, filter);
                    let rhs = divisor_power_sum(&factorize_u64(a), t, filter)
                        * divisor_power_sum(&factorize_u64(b), t, filter);
                    prop_assert_eq!(lhs, rhs);
                }
            }

            #[test]
            fn rational_text_round_trip(n in any::<i64>(), d in 1i64..) {
                let q = frac(n, d);
                let back: Rational = q.to_string().parse().unwrap();
                prop_assert_eq!(&back, &q);
                prop_assert_eq!(num_integer::gcd(q.numer().clone(), q.denom().clone()), BigInt::one());
            }
        }
    }
}
