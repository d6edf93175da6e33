//! Dimension counts, determinant tests, the a_3 table, basis decomposition
//! of theta_n, and elementarity certificates.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, rat, Rational};
use crate::error::{Error, Result};
use crate::matrix::{cofactor_determinant, solve, CoefficientMatrix, EchelonBasis};
use crate::qseries::{cm_form, eisenstein_e, eisenstein_e1, eisenstein_e2, eta12_2z, theta_series, TruncatedSeries};
use crate::repnum::eisenstein_c;

pub const DEFAULT_CHECK_ORDER: usize = 200;

fn check_weight(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("weight must be at least 1".into()));
    }
    Ok(())
}

pub fn dim_modular(k: u32) -> Result<u32> {
    check_weight(k)?;
    Ok(if k.is_multiple_of(2) {
        (k + 2) / 2
    } else {
        k.div_ceil(2)
    })
}

pub fn dim_cusp(k: u32) -> Result<u32> {
    check_weight(k)?;
    Ok(if k.is_multiple_of(2) {
        k.saturating_sub(4) / 2
    } else {
        k.saturating_sub(3) / 2
    })
}

pub fn dim_cm(k: u32) -> Result<u32> {
    check_weight(k)?;
    Ok(u32::from(k >= 5 && k % 4 == 1))
}

pub fn dim_eisenstein(k: u32) -> Result<u32> {
    Ok(dim_modular(k)? - dim_cusp(k)?)
}

/// Candidate forms of one weight, with display labels.
#[derive(Clone, Debug)]
pub struct Basis {
    pub weight: u32,
    pub labels: Vec<String>,
    pub series: Vec<TruncatedSeries>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn combine(&self, coefficients: &[Rational]) -> TruncatedSeries {
        let order = self.series.iter().map(TruncatedSeries::order).min().unwrap_or(0);
        self.series
            .iter()
            .zip(coefficients)
            .fold(TruncatedSeries::zero(order), |acc, (s, c)| {
                &acc + &s.truncate(order).scale(c)
            })
    }
}

/// Eisenstein series plus the CM form (when there is one) of weight `k`.
///
/// Weight 1 uses `E1` alone. Weight 2 uses the two combinations of
/// `E(q), E(q^2), E(q^4)` that cancel the quasi-modular part.
pub fn elementary_basis(k: u32, order: usize) -> Result<Basis> {
    check_weight(k)?;
    let (labels, series): (Vec<&str>, Vec<TruncatedSeries>) = if k == 1 {
        (vec!["E1(q)"], vec![eisenstein_e1(1, order)?])
    } else if k == 2 {
        let e = eisenstein_e(2, order)?;
        let (e2, e4) = (e.dilate(2), e.dilate(4));
        let two = rat(2);
        (
            vec!["E(q) - 2E(q^2)", "E(q^2) - 2E(q^4)"],
            vec![&e - &e2.scale(&two), &e2 - &e4.scale(&two)],
        )
    } else if k.is_multiple_of(2) {
        let e = eisenstein_e(k, order)?;
        let (e2, e4) = (e.dilate(2), e.dilate(4));
        (vec!["E(q)", "E(q^2)", "E(q^4)"], vec![e, e2, e4])
    } else {
        let mut labels = vec!["E1(q)", "E2(q)"];
        let mut series = vec![eisenstein_e1(k, order)?, eisenstein_e2(k, order)?];
        if k % 4 == 1 {
            labels.push("C(q)");
            series.push(cm_form(k, order)?);
        }
        (labels, series)
    };
    Ok(Basis {
        weight: k,
        labels: labels.into_iter().map(String::from).collect(),
        series,
    })
}

/// The weight-6 basis with `eta^12(2z)` appended.
pub fn theta12_extended_basis(order: usize) -> Result<Basis> {
    let mut b = elementary_basis(6, order)?;
    b.labels.push("eta^12(2z)".into());
    b.series.push(eta12_2z(order)?);
    Ok(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionOutcome {
    Consistent {
        coefficients: Vec<Rational>,
    },
    /// `coefficients` solve the first independent equations; `first_failure`
    /// is the lowest power of q they get wrong.
    Inconsistent {
        coefficients: Vec<Rational>,
        first_failure: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub labels: Vec<String>,
    pub checked_order: usize,
    pub outcome: DecompositionOutcome,
}

impl Decomposition {
    pub fn coefficients(&self) -> Option<&[Rational]> {
        match &self.outcome {
            DecompositionOutcome::Consistent { coefficients } => Some(coefficients),
            DecompositionOutcome::Inconsistent { .. } => None,
        }
    }
}

/// Matches `target` against `basis` on the coefficients of q^0..q^N, where
/// N is the smaller of the two truncation orders.
pub fn decompose(target: &TruncatedSeries, basis: &Basis) -> Result<Decomposition> {
    let s = basis.len();
    let order = basis
        .series
        .iter()
        .map(TruncatedSeries::order)
        .fold(target.order(), usize::min);
    if order < s + 2 {
        return Err(Error::InvalidParameter(format!(
            "order {order} too small for {s} unknowns; need at least {}",
            s + 2
        )));
    }
    let row = |m: usize| -> Vec<Rational> { basis.series.iter().map(|b| b.coeffs()[m].clone()).collect() };
    let mut echelon = EchelonBasis::default();
    let mut picked = Vec::with_capacity(s);
    for m in 0..=order {
        if echelon.insert(&row(m)) {
            picked.push(m);
            if picked.len() == s {
                break;
            }
        }
    }
    if picked.len() < s {
        return Err(Error::Underdetermined {
            rank: picked.len(),
            unknowns: s,
        });
    }
    let a: Vec<Vec<Rational>> = picked.iter().map(|&m| row(m)).collect();
    let b: Vec<Rational> = picked.iter().map(|&m| target.coeffs()[m].clone()).collect();
    let coefficients = solve(&a, &b).expect("independent rows give a nonsingular system");
    let first_failure = (0..=order).find(|&m| {
        let fitted: Rational = row(m).iter().zip(&coefficients).map(|(x, c)| x * c).sum();
        fitted != target.coeffs()[m]
    });
    let outcome = match first_failure {
        None => DecompositionOutcome::Consistent { coefficients },
        Some(first_failure) => DecompositionOutcome::Inconsistent {
            coefficients,
            first_failure,
        },
    };
    Ok(Decomposition {
        labels: basis.labels.clone(),
        checked_order: order,
        outcome,
    })
}

fn check_even(n: u32, min: u32) -> Result<()> {
    if n % 2 == 1 || n < min {
        return Err(Error::InvalidParameter(format!(
            "n must be even and at least {min}, got {n}"
        )));
    }
    Ok(())
}

/// theta_n against the elementary basis of weight n/2.
pub fn decompose_theta(n: u32, order: usize) -> Result<Decomposition> {
    check_even(n, 2)?;
    decompose(&theta_series(n, order)?, &elementary_basis(n / 2, order)?)
}

/// theta_12 against `E(q), E(q^2), E(q^4), eta^12(2z)`.
pub fn decompose_theta12_extended(order: usize) -> Result<Decomposition> {
    decompose(&theta_series(12, order)?, &theta12_extended_basis(order)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetMatrixKind {
    M,
    MPrime,
    MDoublePrime,
}

impl DetMatrixKind {
    pub fn for_n(n: u32) -> Result<Self> {
        check_even(n, 4)?;
        Ok(match n % 8 {
            0 | 4 => DetMatrixKind::M,
            6 => DetMatrixKind::MPrime,
            _ if n >= 10 => DetMatrixKind::MDoublePrime,
            _ => return Err(Error::InvalidParameter(format!("no determinant test for n = {n}"))),
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            DetMatrixKind::M => "M",
            DetMatrixKind::MPrime => "M'",
            DetMatrixKind::MDoublePrime => "M''",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetTest {
    pub n: u32,
    pub kind: DetMatrixKind,
    pub matrix: CoefficientMatrix,
    pub value: Rational,
    /// Polynomial closed form in n, for M and M'.
    pub closed_form: Option<Rational>,
    /// Determinant of the matrix written with divisor-sum entries, by cofactor expansion.
    pub entry_formula: Rational,
}

fn pow_int(b: i64, e: u32) -> BigInt {
    BigInt::from(b).pow(e)
}

/// Closed form of det(M) (n = 0 mod 4) or det(M') (n = 6 mod 8).
pub fn det_closed_form(n: u32) -> Result<Option<Rational>> {
    let kind = DetMatrixKind::for_n(n)?;
    let k = n / 2;
    let nn = BigInt::from(n);
    let c3 = binomial(n, 3);
    Ok(match kind {
        DetMatrixKind::M => Some(rat(-&nn * 2 - &nn * 2 * pow_int(3, k - 1) + c3 * 8)),
        DetMatrixKind::MPrime => {
            let n = rat(nn);
            let n2 = &n * &n;
            let n3 = &n2 * &n;
            let third = |x: i64| Rational::new(BigInt::from(x), BigInt::from(3));
            let v = (&n2 * rat(-4) + &n * rat(6))
                + rat(pow_int(2, k - 1)) * (&n3 * third(-4) + &n2 * rat(4) - &n * third(2))
                + rat(pow_int(3, k - 1)) * (&n2 * rat(4) - &n * rat(6))
                + rat(pow_int(6, k - 1)) * (&n * rat(-2))
                + rat(c3 * 8);
            Some(v)
        }
        DetMatrixKind::MDoublePrime => None,
    })
}

/// The matrix with every entry written as its divisor-sum value.
fn entry_formula_matrix(n: u32, kind: DetMatrixKind) -> Vec<Vec<Rational>> {
    let k = n / 2;
    let p = |b: i64| pow_int(b, k - 1);
    let one = BigInt::one;
    let theta = vec![
        BigInt::from(2 * n),
        binomial(n, 2) * 4,
        binomial(n, 3) * 8,
        binomial(n, 4) * 16 + 2 * n,
    ];
    let rows: Vec<Vec<BigInt>> = match kind {
        DetMatrixKind::M => vec![
            theta,
            vec![one(), p(2) + 1, p(3) + 1, p(2) + p(4) + 1],
            vec![BigInt::zero(), one(), BigInt::zero(), p(2) + 1],
            vec![BigInt::zero(), BigInt::zero(), BigInt::zero(), one()],
        ],
        DetMatrixKind::MPrime => vec![
            theta[..3].to_vec(),
            vec![one(), p(2), p(3) - 1],
            vec![one(), one(), 1 - p(3)],
        ],
        DetMatrixKind::MDoublePrime => vec![
            theta,
            vec![one(), p(2), p(3) - 1, p(4)],
            vec![one(), one(), 1 - p(3), one()],
            vec![one(), pow_int(-4, (n - 2) / 8), BigInt::zero(), pow_int(2, (n - 2) / 2)],
        ],
    };
    rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect()
}

/// Builds the coefficient matrix from the series themselves and checks its
/// determinant against the closed form and the entry-formula matrix.
pub fn det_test(n: u32) -> Result<DetTest> {
    let kind = DetMatrixKind::for_n(n)?;
    let k = n / 2;
    let size = if kind == DetMatrixKind::MPrime { 3 } else { 4 };
    let order = size;
    let theta = theta_series(n, order)?;
    let (labels, forms): (Vec<String>, Vec<TruncatedSeries>) = match kind {
        DetMatrixKind::M => {
            let e = eisenstein_e(k, order)?;
            (
                vec!["E(q)".into(), "E(q^2)".into(), "E(q^4)".into()],
                vec![e.clone(), e.dilate(2), e.dilate(4)],
            )
        }
        _ => {
            let mut labels = vec!["E1(q)".to_string(), "E2(q)".to_string()];
            let mut forms = vec![eisenstein_e1(k, order)?, eisenstein_e2(k, order)?];
            if kind == DetMatrixKind::MDoublePrime {
                labels.push("C(q)".into());
                forms.push(cm_form(k, order)?);
            }
            (labels, forms)
        }
    };
    let rows: Vec<Vec<Rational>> = std::iter::once(&theta)
        .chain(&forms)
        .map(|s| s.coeffs()[1..=size].to_vec())
        .collect();
    let mut row_labels = vec![format!("theta_{n}")];
    row_labels.extend(labels);
    let col_labels = (1..=size)
        .map(|j| if j == 1 { "q".to_string() } else { format!("q^{j}") })
        .collect();
    let matrix = CoefficientMatrix::new(rows, row_labels, col_labels)?;
    let value = matrix.determinant();
    let closed_form = det_closed_form(n)?;
    let entry_formula = cofactor_determinant(&entry_formula_matrix(n, kind));
    if entry_formula != value || closed_form.as_ref().is_some_and(|c| *c != value) {
        return Err(Error::CertificateCheck(format!(
            "det({}) for n = {n}: series {value}, entry formula {entry_formula}, closed form {}",
            kind.label(),
            closed_form.map_or("n/a".to_string(), |c| c.to_string())
        )));
    }
    Ok(DetTest {
        n,
        kind,
        matrix,
        value,
        closed_form,
        entry_formula,
    })
}

/// One row of the a_3 table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A3Row {
    pub n: u32,
    pub c3: Rational,
    pub r3: BigInt,
    pub a3: Rational,
}

pub fn a3_row(n: u32) -> Result<A3Row> {
    check_even(n, 4)?;
    let r3 = theta_series(n, 3)?
        .integer_coeff(3)?
        .expect("theta has integer coefficients");
    let c3 = eisenstein_c(n, &BigInt::from(3), None)?;
    let a3 = rat(r3.clone()) - &c3;
    Ok(A3Row { n, c3, r3, a3 })
}

/// `a_3 = r_n(3) - c_3(n)`, the q^3 coefficient of the cuspidal part of theta_n.
pub fn a3(n: u32) -> Result<Rational> {
    Ok(a3_row(n)?.a3)
}

/// Rows for the even n in `[lo, hi]`; odd n are skipped.
pub fn a3_table(lo: u32, hi: u32) -> Result<Vec<A3Row>> {
    (lo..=hi).filter(|n| n % 2 == 0).map(a3_row).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Elementary,
    NotElementary,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Elementary => "elementary",
            Verdict::NotElementary => "not_elementary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Decomposition {
        labels: Vec<String>,
        coefficients: Vec<Rational>,
    },
    Determinant(DetTest),
    A3(A3Row),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementarityCertificate {
    pub n: u32,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub checked_order: usize,
}

/// Serialized certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub n: u32,
    pub verdict: Verdict,
    pub witness_kind: String,
    pub values: Vec<String>,
    pub labels: Vec<String>,
    pub checked_order: usize,
}

impl ElementarityCertificate {
    /// Recomputes every witness from scratch and checks it supports the verdict.
    pub fn recheck(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::CertificateCheck(format!("n = {}: {msg}", self.n)));
        let mut has_decomposition = false;
        let mut det_nonzero = None;
        let mut a3_nonzero = None;
        for w in &self.witnesses {
            match w {
                Witness::Decomposition { labels, coefficients } => {
                    let basis = elementary_basis(self.n / 2, self.checked_order)?;
                    if *labels != basis.labels || coefficients.len() != basis.len() {
                        return fail("decomposition labels do not match the basis".into());
                    }
                    if basis.combine(coefficients) != theta_series(self.n, self.checked_order)? {
                        return fail(format!(
                            "decomposition does not reproduce theta to q^{}",
                            self.checked_order
                        ));
                    }
                    has_decomposition = true;
                }
                Witness::Determinant(d) => {
                    if d.n != self.n || d.matrix.determinant() != d.value || det_test(self.n)? != *d {
                        return fail("determinant witness does not recompute".into());
                    }
                    det_nonzero = Some(!d.value.is_zero());
                }
                Witness::A3(row) => {
                    if row.n != self.n || rat(row.r3.clone()) - &row.c3 != row.a3 || a3_row(self.n)? != *row {
                        return fail("a_3 witness does not recompute".into());
                    }
                    a3_nonzero = Some(!row.a3.is_zero());
                }
            }
        }
        match self.verdict {
            Verdict::Elementary if !has_decomposition => fail("elementary verdict without a decomposition".into()),
            Verdict::Elementary if det_nonzero == Some(true) || a3_nonzero == Some(true) => {
                fail("elementary verdict contradicted by a nonzero witness".into())
            }
            Verdict::NotElementary if det_nonzero != Some(true) || a3_nonzero != Some(true) => {
                fail("not_elementary needs nonzero determinant and a_3 witnesses".into())
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> CertificateJson {
        let mut kinds = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for w in &self.witnesses {
            match w {
                Witness::Decomposition {
                    labels: l,
                    coefficients,
                } => {
                    kinds.push("decomposition");
                    values.extend(coefficients.iter().map(ToString::to_string));
                    labels.extend(l.iter().cloned());
                }
                Witness::Determinant(d) => {
                    kinds.push("determinant");
                    values.push(d.value.to_string());
                    labels.push(format!("det({})", d.kind.label()));
                }
                Witness::A3(row) => {
                    kinds.push("a3");
                    values.push(row.a3.to_string());
                    labels.push("a3".into());
                }
            }
        }
        CertificateJson {
            n: self.n,
            verdict: self.verdict,
            witness_kind: kinds.join("+"),
            values,
            labels,
            checked_order: self.checked_order,
        }
    }
}

pub fn elementarity(n: u32) -> Result<ElementarityCertificate> {
    elementarity_with_order(n, DEFAULT_CHECK_ORDER)
}

/// Decides whether theta_n is elementary and returns a rechecked certificate.
///
/// When the decomposition succeeds and n >= 4 the determinant and a_3 are
/// still computed and must both vanish; otherwise both must be nonzero.
pub fn elementarity_with_order(n: u32, order: usize) -> Result<ElementarityCertificate> {
    check_even(n, 2)?;
    let decomposition = decompose_theta(n, order)?;
    let checked_order = decomposition.checked_order;
    let cert = match decomposition.outcome {
        DecompositionOutcome::Consistent { coefficients } => {
            if n >= 4 && (!det_test(n)?.value.is_zero() || !a3(n)?.is_zero()) {
                return Err(Error::CertificateCheck(format!(
                    "n = {n}: theta decomposes but the determinant or a_3 is nonzero"
                )));
            }
            ElementarityCertificate {
                n,
                verdict: Verdict::Elementary,
                witnesses: vec![Witness::Decomposition {
                    labels: decomposition.labels,
                    coefficients,
                }],
                checked_order,
            }
        }
        DecompositionOutcome::Inconsistent { .. } => ElementarityCertificate {
            n,
            verdict: Verdict::NotElementary,
            witnesses: vec![Witness::Determinant(det_test(n)?), Witness::A3(a3_row(n)?)],
            checked_order,
        },
    };
    cert.recheck()?;
    Ok(cert)
}

/// Certificates for every even n in `[lo, hi]`, computed in parallel.
pub fn verify_range(lo: u32, hi: u32, order: usize) -> Vec<(u32, Result<ElementarityCertificate>)> {
    let ns: Vec<u32> = (lo.max(2)..=hi).filter(|n| n % 2 == 0).collect();
    ns.into_par_iter()
        .map(|n| (n, elementarity_with_order(n, order)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{bernoulli, frac};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_modular(5).unwrap(), 3);
        assert_eq!(dim_cusp(5).unwrap(), 1);
        assert_eq!(dim_cusp(4).unwrap(), 0);
        assert_eq!(dim_cusp(1).unwrap(), 0);
        assert_eq!(dim_cm(6).unwrap(), 0);
        assert_eq!(dim_cm(9).unwrap(), 1);
        assert_eq!(dim_cm(1).unwrap(), 0);
        assert_eq!(dim_modular(6).unwrap(), 4);
        assert!(dim_modular(0).is_err());
        assert!(dim_cusp(0).is_err());
    }

    #[test]
    fn basis_size_and_rank() {
        for k in 1..=30 {
            let b = elementary_basis(k, 40).unwrap();
            assert_eq!(b.len() as u32, dim_eisenstein(k).unwrap() + dim_cm(k).unwrap(), "k={k}");
            let mut e = EchelonBasis::default();
            for m in 0..=40 {
                e.insert(&b.series.iter().map(|s| s.coeffs()[m].clone()).collect::<Vec<_>>());
            }
            assert_eq!(e.rank(), b.len(), "k={k}");
        }
    }

    #[test]
    fn elementary_decompositions() {
        let cases: Vec<(u32, Vec<Rational>)> = vec![
            (2, ints(&[4])),
            (4, ints(&[8, 16])),
            (6, ints(&[16, -4])),
            (8, ints(&[16, -32, 256])),
            (10, vec![frac(64, 5), frac(4, 5), frac(32, 5)]),
        ];
        for (n, expected) in cases {
            let d = decompose_theta(n, 200).unwrap();
            assert_eq!(d.coefficients().unwrap(), &expected[..], "n={n}");
        }
    }

    #[test]
    fn theta12_needs_eta() {
        let d = decompose_theta(12, 100).unwrap();
        assert!(matches!(d.outcome, DecompositionOutcome::Inconsistent { .. }));
        let d = decompose_theta12_extended(200).unwrap();
        assert_eq!(d.coefficients().unwrap(), &ints(&[8, 0, -512, 16])[..]);
        assert_eq!(rat(8 - 512) * (-bernoulli(6) / rat(12)), rat(1));
    }

    #[test]
    fn decompose_rejects_short_orders() {
        assert!(decompose_theta(10, 4).is_err());
        assert!(decompose_theta(3, 50).is_err());
        // E(q^8) and E(q^16) agree below q^8
        let e = eisenstein_e(4, 30).unwrap();
        let basis = Basis {
            weight: 4,
            labels: vec!["a".into(), "b".into()],
            series: vec![e.dilate(8), e.dilate(16)],
        };
        assert!(matches!(
            decompose(&theta_series(8, 5).unwrap(), &basis),
            Err(Error::Underdetermined { rank: 1, unknowns: 2 })
        ));
    }

    #[test]
    fn det_anchors() {
        for n in [4, 6, 8, 10] {
            assert!(det_test(n).unwrap().value.is_zero(), "n={n}");
        }
        assert_eq!(det_test(12).unwrap().value, rat(-4096));
        assert_eq!(det_test(12).unwrap().closed_form, Some(rat(-24 - 24 * 243 + 1760)));
        assert_eq!(det_test(18).unwrap().value, rat(49_351_680_000i64));
        assert!(det_test(2).is_err());
        assert!(det_test(7).is_err());
    }

    #[test]
    fn det18_with_negated_c_q2_entry() {
        // -439038812160 is what M'' gives at n = 18 if C's q^2 entry is -16
        // instead of (1+i)^8 = 16
        let mut rows = entry_formula_matrix(18, DetMatrixKind::MDoublePrime);
        assert_eq!(rows[3][1], rat(16));
        assert_eq!(cm_form(9, 2).unwrap().coeffs()[2], rat(16));
        rows[3][1] = rat(-16);
        assert_eq!(cofactor_determinant(&rows), rat(-439_038_812_160i64));
    }

    #[test]
    fn cm_form_nine_lies_in_weight_nine_cusp_space() {
        // S_9(Gamma_1(4)) is spanned by C_5 times E_4(q), E_4(q^2), E_4(q^4)
        let order = 120;
        let c5 = cm_form(5, order).unwrap();
        let e4 = eisenstein_e(4, order).unwrap();
        let basis = Basis {
            weight: 9,
            labels: vec!["a".into(), "b".into(), "c".into()],
            series: vec![c5.mul(&e4), c5.mul(&e4.dilate(2)), c5.mul(&e4.dilate(4))],
        };
        let d = decompose(&cm_form(9, order).unwrap(), &basis).unwrap();
        assert!(d.coefficients().is_some());
    }

    #[test]
    fn det_routes_agree_to_sixty() {
        for n in (4..=60).step_by(2) {
            let d = det_test(n).unwrap();
            assert_eq!(d.value.is_zero(), n <= 10, "n={n}");
        }
    }

    #[test]
    fn a3_values() {
        assert!(a3(10).unwrap().is_zero());
        assert_eq!(a3(12).unwrap(), rat(-192));
        assert_eq!(a3(14).unwrap(), frac(-11648, 61));
        assert_eq!(a3(20).unwrap(), frac(125248, 31));
        let table = a3_table(3, 21).unwrap();
        assert_eq!(table.len(), 9);
        assert_eq!(table[0].n, 4);
        for n in (4..=60).step_by(2) {
            assert_eq!(a3(n).unwrap().is_zero(), n <= 10);
        }
    }

    #[test]
    fn certificates() {
        let c = elementarity(6).unwrap();
        assert_eq!(c.verdict, Verdict::Elementary);
        assert_eq!(c.to_json().values, vec!["16", "-4"]);
        let c = elementarity(12).unwrap();
        assert_eq!(c.verdict, Verdict::NotElementary);
        assert_eq!(c.to_json().values, vec!["-4096", "-192"]);
        assert_eq!(c.to_json().witness_kind, "determinant+a3");
        assert!(elementarity(7).is_err());
    }

    #[test]
    fn tampered_certificates_fail() {
        let mut c = elementarity(8).unwrap();
        if let Witness::Decomposition { coefficients, .. } = &mut c.witnesses[0] {
            coefficients[1] = rat(-31);
        }
        assert!(c.recheck().is_err());
        let mut c = elementarity(14).unwrap();
        c.witnesses.pop();
        assert!(c.recheck().is_err());
        let mut c = elementarity(16).unwrap();
        c.verdict = Verdict::Elementary;
        assert!(c.recheck().is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let json = elementarity(10).unwrap().to_json();
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"verdict\":\"elementary\""));
        assert_eq!(serde_json::from_str::<CertificateJson>(&text).unwrap(), json);
    }
}
