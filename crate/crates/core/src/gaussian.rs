//! Arithmetic in Z[i]: splitting of rational primes, the norm-power sums
//! `sum_{Nm(d) = m} d^t` that give the coefficients of CM forms, and a
//! brute-force norm enumeration used as the independent check.

use std::fmt;
use std::ops::{Add, Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer as _, Roots};
use num_traits::{One, Signed, Zero};

use crate::arith::{is_prime_integer, Factorization};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: Self) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: Self) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl std::iter::Sum for GaussianInt {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| &acc + &x)
    }
}

/// `a+bi` / `a-bi`, always with an explicit imaginary coefficient.
impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a+bi, got {s:?}"));
        let body = s.trim().strip_suffix('i').ok_or_else(bad)?;
        // split at the sign that starts the imaginary part (skip a leading sign)
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let (re, im) = body.split_at(split);
        let re = BigInt::from_str(re).map_err(|_| bad())?;
        let im = BigInt::from_str(im.strip_prefix('+').unwrap_or(im)).map_err(|_| bad())?;
        Ok(Self { re, im })
    }
}

/// A square root of -1 modulo a prime `p = 1 mod 4`, normalized to the
/// smaller of the two roots.
///
/// For a non-residue `c`, `c^((p-1)/4)` squares to `c^((p-1)/2) = -1`; the
/// candidates `c = 2, 3, ...` are tried in turn.
pub fn sqrt_minus_one_mod(p: &BigInt) -> Result<BigInt> {
    let four = BigInt::from(4);
    if !p.is_positive() || p.mod_floor(&four) != BigInt::one() {
        return Err(Error::InvalidParameter(format!("{p} is not congruent to 1 mod 4")));
    }
    if !is_prime_integer(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let exp = (p - 1u32) / &four;
    let minus_one = p - 1u32;
    let mut c = BigInt::from(2);
    loop {
        let x = c.modpow(&exp, p);
        if (&x * &x).mod_floor(p) == minus_one {
            let other = p - &x;
            return Ok(x.min(other));
        }
        c += 1;
    }
}

/// A Gaussian prime above the rational prime `p`.
///
/// `2` gives `1+i`; a prime `p = 1 mod 4` gives the associate `a+bi` of norm
/// `p` with `a > b > 0`, found by Cornacchia's reduction of `(p, sqrt(-1))`.
pub fn split_prime(p: &BigInt) -> Result<GaussianInt> {
    if *p == BigInt::from(2) {
        return Ok(GaussianInt::new(1, 1));
    }
    if !is_prime_integer(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if p.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        return Err(Error::InertPrime(p.to_string()));
    }
    let mut r0 = p.clone();
    let mut r1 = sqrt_minus_one_mod(p)?;
    while &r1 * &r1 > *p {
        let r2 = r0.mod_floor(&r1);
        r0 = r1;
        r1 = r2;
    }
    let rest = p - &r1 * &r1;
    let b = rest.sqrt();
    debug_assert_eq!(&b * &b, rest);
    let (re, im) = if r1 > b { (r1, b) } else { (b, r1) };
    Ok(GaussianInt { re, im })
}

/// `S_t(m) = sum_{d in Z[i], Nm(d) = m} d^t` for `4 | t`.
///
/// Since `i^t = 1`, `d^t` only depends on the ideal `(d)` and `S_t(m) = 4 a_m`
/// with `a_m` multiplicative:
/// `a_{2^e} = (1+i)^{te}`; `a_{p^e} = p^{te/2}` or `0` (e odd) for inert `p`;
/// `a_{p^e} = sum_j pi^{tj} conj(pi)^{t(e-j)}` for split `p = pi conj(pi)`.
pub fn norm_power_sum(f: &Factorization, t: u32) -> Result<BigInt> {
    if t == 0 || !t.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!(
            "the character d -> d^t is well defined on ideals of Z[i] only for 4 | t, got t = {t}"
        )));
    }
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    let mut acc = GaussianInt::one();
    for (p, e) in f.factors() {
        let local = if *p == two {
            GaussianInt::new(1, 1).pow(t * e)
        } else if p.mod_floor(&four) == BigInt::from(3) {
            if e % 2 == 1 {
                return Ok(BigInt::zero());
            }
            GaussianInt {
                re: p.pow(t * e / 2),
                im: BigInt::zero(),
            }
        } else {
            let pi_t = split_prime(p)?.pow(t);
            let bar_t = pi_t.conj();
            (0..=*e).map(|j| &pi_t.pow(j) * &bar_t.pow(e - j)).sum()
        };
        acc = &acc * &local;
    }
    debug_assert!(acc.is_real(), "norm power sum must be rational for 4 | t");
    Ok(acc.re * 4)
}

/// Every `a+bi` with `a^2 + b^2 = m`, by scanning `a` over `[-sqrt(m), sqrt(m)]`.
pub fn enumerate_norm(m: u64) -> Vec<GaussianInt> {
    let bound = m.sqrt() as i64;
    let mut out = Vec::new();
    for a in -bound..=bound {
        let rest = m - (a * a) as u64;
        let b = rest.sqrt();
        if b * b != rest {
            continue;
        }
        out.push(GaussianInt::new(a, b as i64));
        if b != 0 {
            out.push(GaussianInt::new(a, -(b as i64)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorizations_up_to, factorize_u64};
    use num_traits::ToPrimitive;

    #[test]
    fn sqrt_minus_one_examples() {
        for (p, roots) in [(5u32, [2u32, 3]), (13, [5, 8]), (17, [4, 13])] {
            let x = sqrt_minus_one_mod(&BigInt::from(p)).unwrap();
            assert!(roots.iter().any(|r| BigInt::from(*r) == x), "p={p} x={x}");
        }
        assert!(sqrt_minus_one_mod(&BigInt::from(7)).is_err());
        assert!(sqrt_minus_one_mod(&BigInt::from(2)).is_err());
    }

    #[test]
    fn sqrt_minus_one_exhaustive() {
        for p in (5..5000u64).filter(|p| p % 4 == 1 && is_prime_integer(&BigInt::from(*p))) {
            let x = sqrt_minus_one_mod(&BigInt::from(p)).unwrap().to_u64().unwrap();
            assert!(0 < x && x < p);
            assert_eq!((x * x) % p, p - 1);
        }
    }

    #[test]
    fn split_prime_examples() {
        assert_eq!(split_prime(&BigInt::from(2)).unwrap(), GaussianInt::new(1, 1));
        assert_eq!(split_prime(&BigInt::from(5)).unwrap(), GaussianInt::new(2, 1));
        assert_eq!(split_prime(&BigInt::from(13)).unwrap(), GaussianInt::new(3, 2));
        assert!(matches!(split_prime(&BigInt::from(7)), Err(Error::InertPrime(_))));
        assert!(split_prime(&BigInt::from(9)).is_err());
        let big = BigInt::from(1_000_000_009u64);
        let pi = split_prime(&big).unwrap();
        assert_eq!(pi.norm(), big);
        assert!(pi.re > pi.im && pi.im > BigInt::zero());
    }

    #[test]
    fn norm_power_sum_examples() {
        assert_eq!(norm_power_sum(&factorize_u64(1), 4).unwrap(), BigInt::from(4));
        assert_eq!(norm_power_sum(&factorize_u64(3), 4).unwrap(), BigInt::zero());
        assert_eq!(norm_power_sum(&factorize_u64(2), 4).unwrap(), BigInt::from(-16));
        assert!(norm_power_sum(&factorize_u64(5), 6).is_err());
        assert!(norm_power_sum(&factorize_u64(5), 0).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let units = enumerate_norm(1);
        assert_eq!(units.len(), 4);
        for u in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            assert!(units.contains(&GaussianInt::new(u.0, u.1)));
        }
        assert!(enumerate_norm(3).is_empty());
        assert_eq!(enumerate_norm(25).len(), 12);
    }

    #[test]
    fn norm_power_sum_matches_enumeration() {
        let fs = factorizations_up_to(1500);
        for m in 1..=1500u64 {
            for t in [4u32, 8, 12] {
                let brute: GaussianInt = enumerate_norm(m).iter().map(|d| d.pow(t)).sum();
                assert!(brute.is_real(), "m={m} t={t}");
                assert_eq!(norm_power_sum(&fs[m as usize], t).unwrap(), brute.re, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn inert_primes_vanish() {
        for p in (3..3000u64).filter(|p| p % 4 == 3 && is_prime_integer(&BigInt::from(*p))) {
            for t in [4u32, 8, 12, 16] {
                assert!(norm_power_sum(&factorize_u64(p), t).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn two_adic_coefficient() {
        // a_2 = (1+i)^t = (-4)^{t/4}
        for t in [4u32, 8, 12, 16, 20] {
            let s = norm_power_sum(&factorize_u64(2), t).unwrap();
            assert_eq!(s, BigInt::from(-4).pow(t / 4) * 4);
        }
    }

    #[test]
    fn display_format() {
        assert_eq!(GaussianInt::new(2, 1).to_string(), "2+1i");
        assert_eq!(GaussianInt::new(-3, -2).to_string(), "-3-2i");
        assert_eq!(GaussianInt::new(0, 0).to_string(), "0+0i");
        assert!("3".parse::<GaussianInt>().is_err());
        assert!("i".parse::<GaussianInt>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn norm_is_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000,
                                      c in -10_000i64..10_000, d in -10_000i64..10_000) {
                let x = GaussianInt::new(a, b);
                let y = GaussianInt::new(c, d);
                prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            }

            #[test]
            fn text_round_trip(a in any::<i64>(), b in any::<i64>()) {
                let x = GaussianInt::new(a, b);
                prop_assert_eq!(x.to_string().parse::<GaussianInt>().unwrap(), x);
            }
        }
    }
}
