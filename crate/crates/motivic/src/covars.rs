//! The change-of-variables engine for the two-dimensional toy case: the
//! twisted-jet space of the plane with its (m, n)-leveled cylinder measures,
//! the fiber-dimension formula of the projection to ordinary jets, and exact
//! summation of the stratum series to L^2.
//!
//! Strata are indexed by the order of the classifying series f (nonnegative,
//! or -(pd+e) with e in 1..p-1) together with the offset i of ord(a) above
//! its minimum s_f. Every integral in scope is a finite combination of
//! geometric series over these indices.

use thiserror::Error;

use crate::lring::{geom_sum, LringError, MotivicValue};
use crate::moduli::Order;
use crate::stringy::{sht_prime_at_f, DimSeq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CovarsError {
    #[error("negative order {0} must be coprime to {1}")]
    InvalidOrder(i64, u32),
    #[error("residue {0} must lie in 1..={1}")]
    InvalidResidue(u64, u32),
    #[error("target level ({0}, {1}) is not above the source level")]
    LevelOrder(u64, u64),
    #[error("weighted sum diverges: ratio exponent {0} >= 0")]
    Divergent(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad stratum spec `{0}`")]
    BadStratumSpec(String),
}

fn check_prime(p: u32) -> Result<(), CovarsError> {
    if crate::is_prime(p as u64) {
        Ok(())
    } else {
        Err(CovarsError::NotPrime(p as u64))
    }
}

/// `s_f = max(0, ceil(-ord(f)/p))`: the minimal order of the first jet
/// coordinate over the series f. Zero for nonnegative or infinite order.
pub fn s_f(p: u32, ord_f: Order) -> Result<i64, CovarsError> {
    check_prime(p)?;
    match ord_f {
        Order::Infinite => Ok(0),
        Order::Finite(o) if o >= 0 => Ok(0),
        Order::Finite(o) => {
            if o.rem_euclid(p as i64) == 0 {
                return Err(CovarsError::InvalidOrder(o, p));
            }
            let j = -o;
            Ok((j + p as i64 - 1) / p as i64) // ceil(j/p)
        }
    }
}

/// Outcome of the exhaustive check that `s_f = sht' + 2` for the length-2
/// block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfReport {
    pub prime: u32,
    pub checked: u64,
    pub pass: bool,
    /// (j, s_f, sht') of the first violation, if any
    pub first_violation: Option<(u64, i64, i64)>,
}

impl std::fmt::Display for SfReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.first_violation {
            None => write!(
                f,
                "pass: s_f = sht' + 2 for all {} orders checked at p = {}",
                self.checked, self.prime
            ),
            Some((j, s, sp)) => write!(
                f,
                "fail at j = {}: s_f = {} but sht' + 2 = {}",
                j,
                s,
                sp + 2
            ),
        }
    }
}

/// Verifies `s_f(p, -j) = sht'(-j) + 2` for the length-2 block, for every
/// j <= jmax coprime to p, plus the zero-stratum case `0 = -2 + 2`.
pub fn s_equals_shtprime_plus_two(p: u32, jmax: u64) -> Result<SfReport, CovarsError> {
    check_prime(p)?;
    let d2 = DimSeq::new(vec![2], p).expect("2 <= p for every prime");
    let mut checked = 0;
    // f = 0 and nonnegative orders
    let zero_sp = sht_prime_at_f(&d2, Order::Infinite).expect("valid");
    if s_f(p, Order::Infinite)? != zero_sp + 2 {
        return Ok(SfReport {
            prime: p,
            checked,
            pass: false,
            first_violation: Some((0, s_f(p, Order::Infinite)?, zero_sp)),
        });
    }
    checked += 1;
    for j in 1..=jmax {
        if j % p as u64 == 0 {
            continue;
        }
        let s = s_f(p, Order::Finite(-(j as i64)))?;
        let sp = sht_prime_at_f(&d2, Order::Finite(-(j as i64))).expect("coprime");
        checked += 1;
        if s != sp + 2 {
            return Ok(SfReport {
                prime: p,
                checked,
                pass: false,
                first_violation: Some((j, s, sp)),
            });
        }
    }
    Ok(SfReport {
        prime: p,
        checked,
        pass: true,
        first_violation: None,
    })
}

/// The displayed dimension count of the jet-projection fiber:
/// `s_f + (p-1) n + (p-1) ord(a)`, in the regime of the computation
/// (nonzero first coordinate, level a multiple of p at or above its order).
pub fn fiber_dim(p: u32, s_f: i64, n: i64, ord_a: i64) -> i64 {
    s_f + (p as i64 - 1) * n + (p as i64 - 1) * ord_a
}

/// Order class of the series underlying a twisted-jet stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FPart {
    /// ord(f) >= 0 (including f = 0)
    Nonneg,
    /// ord(f) = -(pd + e) with e in 1..p-1
    Neg { d: u64, e: u64 },
}

/// A stratum of the twisted-jet space: the order class of f together with
/// the offset i >= 0 so that ord(a) = s_f + i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistedJetStratum {
    prime: u32,
    f_part: FPart,
    i: u64,
}

impl TwistedJetStratum {
    pub fn nonneg(prime: u32, i: u64) -> Result<Self, CovarsError> {
        check_prime(prime)?;
        Ok(TwistedJetStratum {
            prime,
            f_part: FPart::Nonneg,
            i,
        })
    }

    pub fn neg(prime: u32, d: u64, e: u64, i: u64) -> Result<Self, CovarsError> {
        check_prime(prime)?;
        if e < 1 || e > prime as u64 - 1 {
            return Err(CovarsError::InvalidResidue(e, prime));
        }
        Ok(TwistedJetStratum {
            prime,
            f_part: FPart::Neg { d, e },
            i,
        })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn f_part(&self) -> FPart {
        self.f_part
    }

    pub fn offset(&self) -> u64 {
        self.i
    }

    /// Parses the CLI grammar "nonneg:i=K" or "neg:d=A,e=B,i=K".
    pub fn parse(spec: &str, prime: u32) -> Result<Self, CovarsError> {
        let bad = || CovarsError::BadStratumSpec(spec.to_string());
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        let mut fields = std::collections::BTreeMap::new();
        for part in rest.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value: u64 = value.trim().parse().map_err(|_| bad())?;
            fields.insert(key.trim().to_string(), value);
        }
        match kind.trim() {
            "nonneg" if fields.len() == 1 => {
                TwistedJetStratum::nonneg(prime, *fields.get("i").ok_or_else(bad)?)
            }
            "neg" if fields.len() == 3 => TwistedJetStratum::neg(
                prime,
                *fields.get("d").ok_or_else(bad)?,
                *fields.get("e").ok_or_else(bad)?,
                *fields.get("i").ok_or_else(bad)?,
            ),
            _ => Err(bad()),
        }
    }
}

/// Measure of the stratum: `(L-1) L^(1-i)` over nonnegative orders, and
/// `(L-1)^2 L^(-i + d(p-1) + e)` over order -(pd+e).
pub fn cyl_measure(s: &TwistedJetStratum) -> MotivicValue {
    let i = s.i as i64;
    match s.f_part {
        FPart::Nonneg => {
            // (L-1) * L^(1-i)
            MotivicValue::from_terms(&[(2 - i, 1), (1 - i, -1)])
        }
        FPart::Neg { d, e } => {
            let base = -i + d as i64 * (s.prime as i64 - 1) + e as i64;
            // (L-1)^2 * L^base
            MotivicValue::from_terms(&[(base + 2, 1), (base + 1, -2), (base, 1)])
        }
    }
}

/// Class of the stratum image at its base level (i, 0): the free
/// coefficients of f, the unit leading coefficient(s), and the i+1 free
/// coefficients of b.
fn base_level_class(s: &TwistedJetStratum) -> MotivicValue {
    let i = s.i as i64;
    match s.f_part {
        FPart::Nonneg => {
            // G_m x A^(i+1)
            MotivicValue::from_terms(&[(i + 2, 1), (i + 1, -1)])
        }
        FPart::Neg { d, e } => {
            let dim = d as i64 * (s.prime as i64 - 1) + e as i64 + i;
            // G_m^2 x A^dim
            MotivicValue::from_terms(&[(dim + 2, 1), (dim + 1, -2), (dim, 1)])
        }
    }
}

/// Jet levels (m, n): order m of the coordinate truncation and level n of
/// the series truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetLevel {
    pub m: u64,
    pub n: u64,
}

/// Fiber dimension of the transition between jet levels:
/// `2(m' - m) + (p-1)(n' - n)`.
pub fn jet_transition_dim(p: u32, from: JetLevel, to: JetLevel) -> Result<i64, CovarsError> {
    if to.m < from.m || to.n < from.n {
        return Err(CovarsError::LevelOrder(to.m, to.n));
    }
    Ok(2 * (to.m - from.m) as i64 + (p as i64 - 1) * (to.n - from.n) as i64)
}

/// Recomputes the stratum measure from its truncated class at any level
/// `(m, n)` at or above the base level (i, 0): the class gains the
/// transition fiber dimension and the normalization removes it again.
pub fn cyl_measure_at_level(
    s: &TwistedJetStratum,
    m: u64,
    n: u64,
) -> Result<MotivicValue, CovarsError> {
    let base = JetLevel { m: s.i, n: 0 };
    let gain = jet_transition_dim(s.prime, base, JetLevel { m, n })?;
    let class = base_level_class(s)
        .mul(&MotivicValue::lefschetz_pow(gain))
        .expect("finite");
    let norm = -2 * m as i64 - (s.prime as i64 - 1) * n as i64;
    Ok(class.mul(&MotivicValue::lefschetz_pow(norm)).expect("finite"))
}

/// Which strata to sum in the change-of-variables integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Nonneg,
    Neg,
    All,
}

/// Integrand exponent on a stratum: `-s - (p-1) ord(a)` with `s = s_f` and
/// `ord(a) = s_f + i` on the negative part, `s = 0`, `ord(a) = i` on the
/// nonnegative part.
fn integrand_exponent(s: &TwistedJetStratum) -> i64 {
    let p = s.prime as i64;
    let i = s.i as i64;
    match s.f_part {
        FPart::Nonneg => -(p - 1) * i,
        FPart::Neg { d, .. } => {
            let sf = d as i64 + 1;
            -sf - (p - 1) * (sf + i)
        }
    }
}

/// Exact value of the change-of-variables integral over the requested part:
/// `(L^2 - L)/(1 - L^-p)` over nonnegative orders,
/// `(L - L^(2-p))/(1 - L^-p)` over negative orders, and L^2 in total.
pub fn cov_integral(p: u32, part: Part) -> Result<MotivicValue, CovarsError> {
    check_prime(p)?;
    let weight = StratumWeight::zero(p);
    match part {
        Part::Nonneg => weighted_nonneg(p, &weight),
        Part::Neg => Ok(weighted_neg(p, &weight)?.reduced()),
        Part::All => {
            Ok(weighted_nonneg(p, &weight)?
                .add(&weighted_neg(p, &weight)?)
                .reduced())
        }
    }
}

/// Affine weight on the nonnegative strata: `w(i) = i_coeff * i + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineNonneg {
    pub i_coeff: i64,
    pub constant: i64,
}

/// Affine weight on a negative residue class: `w(d, i) = i_coeff * i +
/// d_coeff * d + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineNeg {
    pub i_coeff: i64,
    pub d_coeff: i64,
    pub constant: i64,
}

/// An affine stratum functional: one affine form on the nonnegative strata
/// and one per residue class e in 1..p-1. Every weighted integral over such
/// a functional is a finite combination of geometric series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumWeight {
    pub nonneg: AffineNonneg,
    /// indexed by e - 1 for e in 1..p-1
    pub neg: Vec<AffineNeg>,
}

impl StratumWeight {
    pub fn zero(p: u32) -> Self {
        Self::constant(p, 0)
    }

    /// The constant weight `w = c` on every stratum.
    pub fn constant(p: u32, c: i64) -> Self {
        StratumWeight {
            nonneg: AffineNonneg {
                i_coeff: 0,
                constant: c,
            },
            neg: vec![
                AffineNeg {
                    i_coeff: 0,
                    d_coeff: 0,
                    constant: c,
                };
                p as usize - 1
            ],
        }
    }

    /// Value of the weight on a stratum; used by the summation oracle.
    pub fn eval(&self, s: &TwistedJetStratum) -> i64 {
        match s.f_part {
            FPart::Nonneg => self.nonneg.i_coeff * s.i as i64 + self.nonneg.constant,
            FPart::Neg { d, e } => {
                let w = &self.neg[e as usize - 1];
                w.i_coeff * s.i as i64 + w.d_coeff * d as i64 + w.constant
            }
        }
    }
}

fn lift_divergent(err: LringError) -> CovarsError {
    match err {
        LringError::Divergent(r) => CovarsError::Divergent(r),
        other => panic!("unexpected arithmetic error: {other}"),
    }
}

fn weighted_nonneg(p: u32, w: &StratumWeight) -> Result<MotivicValue, CovarsError> {
    // term(i) = (L-1) L^(1-i) * L^(-(p-1)i + w(i))
    let ratio = w.nonneg.i_coeff - p as i64;
    let base_exp = 1 + w.nonneg.constant;
    let base = MotivicValue::from_terms(&[(base_exp + 1, 1), (base_exp, -1)]);
    geom_sum(base, ratio).map_err(lift_divergent)
}

fn weighted_neg(p: u32, w: &StratumWeight) -> Result<MotivicValue, CovarsError> {
    let mut total = MotivicValue::zero();
    for e in 1..p as u64 {
        let form = &w.neg[e as usize - 1];
        let i_ratio = form.i_coeff - p as i64;
        let d_ratio = form.d_coeff - 1;
        let base_exp = e as i64 - p as i64 + form.constant;
        // (L-1)^2 L^base_exp, summed over d then i
        let base = MotivicValue::from_terms(&[(base_exp + 2, 1), (base_exp + 1, -2), (base_exp, 1)]);
        let over_d = geom_sum(base, d_ratio).map_err(lift_divergent)?;
        let over_i = geom_sum(over_d, i_ratio).map_err(lift_divergent)?;
        total = total.add(&over_i);
    }
    Ok(total)
}

/// Closed form of the integral weighted by L^w for an affine stratum
/// functional w; with the zero weight this is `cov_integral(p, All)`.
/// Errors with `Divergent` when some geometric ratio is nonnegative.
pub fn cov_weighted_integral(p: u32, w: &StratumWeight) -> Result<MotivicValue, CovarsError> {
    check_prime(p)?;
    assert_eq!(w.neg.len(), p as usize - 1, "one affine form per residue class");
    Ok(weighted_nonneg(p, w)?.add(&weighted_neg(p, w)?).reduced())
}

/// One term of the stratum summation: measure times integrand times weight.
/// Public so the series oracle in the test suite can sum strata directly.
pub fn stratum_term(s: &TwistedJetStratum, w: &StratumWeight) -> MotivicValue {
    let exp = integrand_exponent(s) + w.eval(s);
    cyl_measure(s)
        .mul(&MotivicValue::lefschetz_pow(exp))
        .expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_f_values() {
        assert_eq!(s_f(3, Order::Infinite).unwrap(), 0);
        assert_eq!(s_f(3, Order::Finite(5)).unwrap(), 0);
        assert_eq!(s_f(3, Order::Finite(-4)).unwrap(), 2);
        assert_eq!(s_f(2, Order::Finite(-7)).unwrap(), 4);
        assert_eq!(s_f(5, Order::Finite(-1)).unwrap(), 1);
        assert_eq!(
            s_f(3, Order::Finite(-6)),
            Err(CovarsError::InvalidOrder(-6, 3))
        );
    }

    #[test]
    fn sf_identity_reports() {
        for p in [2, 3, 5] {
            let report = s_equals_shtprime_plus_two(p, 1000).unwrap();
            assert!(report.pass, "{}", report);
        }
        let report = s_equals_shtprime_plus_two(5, 1).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn fiber_dim_formula() {
        assert_eq!(fiber_dim(3, 1, 2, 1), 7);
        assert_eq!(fiber_dim(3, 1, 2, 2), 9);
        assert_eq!(fiber_dim(7, 0, 0, 0), 0);
        assert_eq!(fiber_dim(2, 4, 3, 5), 12);
    }

    #[test]
    fn stratum_measures() {
        let s = TwistedJetStratum::nonneg(3, 0).unwrap();
        // (L-1) * L
        assert!(cyl_measure(&s).equals(&MotivicValue::from_terms(&[(2, 1), (1, -1)])));
        let s = TwistedJetStratum::neg(3, 0, 1, 0).unwrap();
        // (L-1)^2 * L
        assert!(cyl_measure(&s).equals(&MotivicValue::from_terms(&[(3, 1), (2, -2), (1, 1)])));
        let s = TwistedJetStratum::nonneg(5, 3).unwrap();
        // (L-1) * L^-2
        assert!(cyl_measure(&s).equals(&MotivicValue::from_terms(&[(-1, 1), (-2, -1)])));
    }

    #[test]
    fn stratum_validation_and_parsing() {
        assert!(TwistedJetStratum::neg(3, 1, 3, 0).is_err());
        assert!(TwistedJetStratum::neg(3, 1, 0, 0).is_err());
        let s = TwistedJetStratum::parse("nonneg:i=4", 3).unwrap();
        assert_eq!(s, TwistedJetStratum::nonneg(3, 4).unwrap());
        let s = TwistedJetStratum::parse("neg:d=2,e=1,i=5", 3).unwrap();
        assert_eq!(s, TwistedJetStratum::neg(3, 2, 1, 5).unwrap());
        assert!(TwistedJetStratum::parse("neg:d=2", 3).is_err());
        assert!(TwistedJetStratum::parse("junk", 3).is_err());
    }

    #[test]
    fn measures_are_level_consistent() {
        for s in [
            TwistedJetStratum::nonneg(3, 2).unwrap(),
            TwistedJetStratum::neg(3, 1, 2, 3).unwrap(),
            TwistedJetStratum::neg(2, 0, 1, 0).unwrap(),
        ] {
            let expected = cyl_measure(&s);
            for m in s.offset()..s.offset() + 4 {
                for n in 0..4 {
                    let recomputed = cyl_measure_at_level(&s, m, n).unwrap();
                    assert!(recomputed.equals(&expected), "level ({}, {})", m, n);
                }
            }
        }
    }

    #[test]
    fn level_transitions() {
        assert_eq!(
            jet_transition_dim(3, JetLevel { m: 0, n: 0 }, JetLevel { m: 1, n: 1 }).unwrap(),
            4
        );
        assert_eq!(
            jet_transition_dim(5, JetLevel { m: 2, n: 3 }, JetLevel { m: 2, n: 3 }).unwrap(),
            0
        );
        assert_eq!(
            jet_transition_dim(2, JetLevel { m: 1, n: 2 }, JetLevel { m: 3, n: 5 }).unwrap(),
            7
        );
        assert!(jet_transition_dim(3, JetLevel { m: 2, n: 0 }, JetLevel { m: 1, n: 5 }).is_err());
    }

    #[test]
    fn parts_match_paper_forms() {
        let nonneg = cov_integral(3, Part::Nonneg).unwrap();
        let expected = MotivicValue::from_terms(&[(2, 1), (1, -1)]).with_denominator_factors(&[3]);
        assert!(nonneg.equals(&expected));
        let neg = cov_integral(3, Part::Neg).unwrap();
        let expected = MotivicValue::from_terms(&[(1, 1), (-1, -1)]).with_denominator_factors(&[3]);
        assert!(neg.equals(&expected));
    }

    #[test]
    fn total_is_l_squared() {
        for p in [2, 3, 5, 7, 11, 13] {
            let total = cov_integral(p, Part::All).unwrap();
            assert!(
                total.equals(&MotivicValue::lefschetz_pow(2)),
                "total at p = {} is {}",
                p,
                total
            );
        }
    }

    #[test]
    fn weighted_specializations() {
        // zero weight reproduces the total
        for p in [2, 3, 5] {
            let w = StratumWeight::zero(p);
            assert!(cov_weighted_integral(p, &w)
                .unwrap()
                .equals(&MotivicValue::lefschetz_pow(2)));
        }
        // constant weight -1 factors out: L^2 * L^-1 = L
        let w = StratumWeight::constant(3, -1);
        assert!(cov_weighted_integral(3, &w)
            .unwrap()
            .equals(&MotivicValue::lefschetz_pow(1)));
    }

    #[test]
    fn weighted_divergence_detected() {
        // w = p * i on the nonnegative strata kills the ratio
        let mut w = StratumWeight::zero(3);
        w.nonneg.i_coeff = 3;
        assert_eq!(cov_weighted_integral(3, &w), Err(CovarsError::Divergent(0)));
        let mut w = StratumWeight::zero(3);
        w.neg[0].d_coeff = 2;
        assert_eq!(cov_weighted_integral(3, &w), Err(CovarsError::Divergent(1)));
    }

    #[test]
    fn negative_part_term_exponents_match_rewriting() {
        // measure exponent plus integrand exponent equals -pi + e - d - p
        for p in [2u32, 3, 5] {
            for e in 1..p as u64 {
                for d in 0..4u64 {
                    for i in 0..4u64 {
                        let s = TwistedJetStratum::neg(p, d, e, i).unwrap();
                        let term = stratum_term(&s, &StratumWeight::zero(p));
                        let expected_exp =
                            -(p as i64) * i as i64 + e as i64 - d as i64 - p as i64;
                        // term = (L-1)^2 L^expected_exp
                        let expected = MotivicValue::from_terms(&[
                            (expected_exp + 2, 1),
                            (expected_exp + 1, -2),
                            (expected_exp, 1),
                        ]);
                        assert!(term.equals(&expected));
                    }
                }
            }
        }
    }
}
