//! Shift functions on the torsor moduli, the convergence invariant D_d, and
//! exact evaluation of the stringy motivic integrals, both in closed form and
//! as truncated partial sums with a guaranteed series window.
//!
//! The closed form groups the order strata by residue class mod p: the shift
//! function grows by exactly D_d per period, so each residue class sums to a
//! geometric series with ratio exponent `p - 1 - D_d`. The integrals are
//! finite exactly when that exponent is negative, i.e. when `D_d >= p`.

use thiserror::Error;

use crate::lring::{geom_sum, MotivicValue, TruncatedSeries};
use crate::moduli::{cylinder_measure_g, stratum_class_h, CylinderG, Order, StratumH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringyError {
    #[error("j = {0} must be a positive integer coprime to {1}")]
    InvalidJ(i64, u32),
    #[error("entries of a dimension sequence must lie in 1..=p and be nonincreasing")]
    InvalidDimSeq,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the integral diverges (D_d < p); no finite series window exists")]
    DivergentTruncation,
}

/// A nonincreasing sequence (d_1, ..., d_l) with 1 <= d_i <= p, classifying
/// both a G-representation and an H-representation of dimension |d|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimSeq {
    entries: Vec<u32>,
    prime: u32,
}

impl DimSeq {
    pub fn new(entries: Vec<u32>, prime: u32) -> Result<Self, StringyError> {
        if !crate::is_prime(prime as u64) {
            return Err(StringyError::NotPrime(prime as u64));
        }
        if entries.is_empty()
            || entries.iter().any(|&d| d < 1 || d > prime)
            || entries.windows(2).any(|w| w[0] < w[1])
        {
            return Err(StringyError::InvalidDimSeq);
        }
        Ok(DimSeq { entries, prime })
    }

    /// Parses a comma-separated list such as "2,2".
    pub fn parse(s: &str, prime: u32) -> Result<Self, StringyError> {
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| StringyError::InvalidDimSeq))
            .collect::<Result<Vec<_>, _>>()?;
        DimSeq::new(entries, prime)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// l, the number of indecomposable summands.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Never true; the constructor rejects empty sequences.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// |d|, the dimension of the representation.
    pub fn total(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// The invariant `D_d = sum (d_i - 1) d_i / 2`.
    pub fn dd(&self) -> i64 {
        self.entries
            .iter()
            .map(|&d| (d as i64 - 1) * d as i64 / 2)
            .sum()
    }

    /// The integrals converge, and the quotient singularity is canonical,
    /// exactly when `D_d >= p`.
    pub fn integrals_converge(&self) -> bool {
        self.dd() >= self.prime as i64
    }
}

/// Which shift function weights the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Sht,
    ShtPrime,
}

/// Which moduli space the integral is taken over. Both give equal values;
/// the G route goes through level-zero cylinder measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    G,
    H,
}

/// The shift number `sht(j) = sum_i sum_{k=1}^{d_i - 1} floor(k j / p)` for
/// positive j coprime to p.
pub fn sht(d: &DimSeq, j: u64) -> Result<i64, StringyError> {
    if j == 0 || j.is_multiple_of(d.prime as u64) {
        return Err(StringyError::InvalidJ(j as i64, d.prime));
    }
    let p = d.prime as i64;
    let j = j as i64;
    Ok(d
        .entries
        .iter()
        .map(|&di| (1..di as i64).map(|k| k * j / p).sum::<i64>())
        .sum())
}

/// sht extended to series: `sht(-ord(f))` for negative order, 0 on the
/// zero stratum (`ord(f) >= 0` or `f = 0`).
pub fn sht_at_f(d: &DimSeq, order: Order) -> Result<i64, StringyError> {
    match order {
        Order::Infinite => Ok(0),
        Order::Finite(o) if o >= 0 => Ok(0),
        Order::Finite(o) => sht(d, o.unsigned_abs()),
    }
}

/// `sht'(f) = sht(f) - l` off the zero stratum, `-|d|` on it.
pub fn sht_prime_at_f(d: &DimSeq, order: Order) -> Result<i64, StringyError> {
    match order {
        Order::Infinite => Ok(-(d.total() as i64)),
        Order::Finite(o) if o >= 0 => Ok(-(d.total() as i64)),
        Order::Finite(o) => Ok(sht(d, o.unsigned_abs())? - d.len() as i64),
    }
}

/// Integrand value `u(j)` on the order-(-j) stratum.
fn shift_on_stratum(d: &DimSeq, v: Variant, j: u64) -> i64 {
    let base = sht(d, j).expect("strata are coprime to p");
    match v {
        Variant::Sht => base,
        Variant::ShtPrime => base - d.len() as i64,
    }
}

/// Integrand value on the zero stratum.
fn shift_on_zero_stratum(d: &DimSeq, v: Variant) -> i64 {
    match v {
        Variant::Sht => 0,
        Variant::ShtPrime => -(d.total() as i64),
    }
}

/// Exponent of the L-power contributed by the order-(-j) stratum:
/// stratum dimension minus one, minus the integrand value.
fn stratum_exponent(d: &DimSeq, v: Variant, j: u64) -> i64 {
    let dim = crate::moduli::dim_delta_h_geq(d.prime, j) as i64;
    dim - 1 - shift_on_stratum(d, v, j)
}

/// Measure of the order-(-j) stratum, routed per domain: the H side takes
/// the constructible class directly, the G side pulls back to a cylinder at
/// a sufficient truncation level and applies the cylinder measure.
fn stratum_measure(d: &DimSeq, domain: Domain, j: u64) -> MotivicValue {
    let stratum = StratumH::new(d.prime, j).expect("valid stratum");
    let class = stratum_class_h(&stratum);
    match domain {
        Domain::H => class,
        Domain::G => {
            let level = (j as i64 + d.prime as i64 - 1) / d.prime as i64;
            let fiber = MotivicValue::lefschetz_pow(level * (d.prime as i64 - 1));
            let truncated = class.mul(&fiber).expect("finite class");
            let cyl = CylinderG::new(d.prime, level, truncated).expect("valid cylinder");
            cylinder_measure_g(&cyl)
        }
    }
}

fn zero_stratum_measure(d: &DimSeq, domain: Domain) -> MotivicValue {
    match domain {
        Domain::H => MotivicValue::one(),
        Domain::G => {
            let cyl = CylinderG::new(d.prime, 0, MotivicValue::one()).expect("valid cylinder");
            cylinder_measure_g(&cyl)
        }
    }
}

/// Exact closed form of the stringy integral, or the infinite value when
/// `D_d < p`.
pub fn stringy_integral(d: &DimSeq, v: Variant, domain: Domain) -> MotivicValue {
    stringy_integral_impl(d, v, domain, 0)
}

/// Test hook: adds `offset` to the shift value on every nonzero stratum, so
/// golden checks can demonstrate sensitivity to an off-by-one corruption.
#[doc(hidden)]
pub fn stringy_integral_with_sht_offset(
    d: &DimSeq,
    v: Variant,
    domain: Domain,
    offset: i64,
) -> MotivicValue {
    stringy_integral_impl(d, v, domain, offset)
}

fn stringy_integral_impl(d: &DimSeq, v: Variant, domain: Domain, offset: i64) -> MotivicValue {
    if !d.integrals_converge() {
        return MotivicValue::infinity();
    }
    let p = d.prime;
    let ratio = p as i64 - 1 - d.dd();
    let zero_term = zero_stratum_measure(d, domain)
        .mul(&MotivicValue::lefschetz_pow(-shift_on_zero_stratum(d, v)))
        .expect("finite");
    let mut total = zero_term;
    for e in 1..p as u64 {
        let weight = MotivicValue::lefschetz_pow(-shift_on_stratum(d, v, e) - offset);
        let base = stratum_measure(d, domain, e).mul(&weight).expect("finite");
        let series = geom_sum(base, ratio).expect("ratio is negative when D_d >= p");
        total = total.add(&series);
    }
    total.reduced()
}

/// Partial sum of the integral over the zero stratum and all strata with
/// `j <= j_max`, expanded as a Laurent series. The window low end is the
/// provable tail bound: every stratum beyond `j_max` contributes only below
/// it. Errors when `D_d < p`, where no finite window exists.
pub fn stringy_integral_truncated(
    d: &DimSeq,
    v: Variant,
    j_max: u64,
) -> Result<TruncatedSeries, StringyError> {
    if !d.integrals_converge() {
        return Err(StringyError::DivergentTruncation);
    }
    let p = d.prime as u64;
    let mut partial = MotivicValue::lefschetz_pow(-shift_on_zero_stratum(d, v));
    for j in 1..=j_max {
        if j % p == 0 {
            continue;
        }
        let g = stratum_exponent(d, v, j);
        partial = partial.add(&MotivicValue::from_terms(&[(g + 1, 1), (g, -1)]));
    }
    // Largest exponent any omitted stratum can contribute: within each
    // residue class the exponent strictly decreases (by D_d - (p-1) >= 1 per
    // period), so the first stratum past j_max dominates its class; its
    // top term sits one above the stratum exponent.
    let mut omitted_max = i64::MIN;
    for e in 1..p {
        let mut j = e;
        while j <= j_max {
            j += p;
        }
        omitted_max = omitted_max.max(stratum_exponent(d, v, j) + 1);
    }
    let window_low = omitted_max + 1;
    let high = partial
        .numerator_terms()
        .map(|(e, _)| e)
        .max()
        .unwrap_or(window_low)
        .max(window_low);
    let coeffs = partial
        .numerator_terms()
        .filter(|&(e, _)| e >= window_low)
        .map(|(e, c)| (e, c.clone()))
        .collect();
    Ok(TruncatedSeries::new(window_low, high, coeffs))
}

/// All dimension sequences with entries `<= p` and total dimension in
/// `1..=max_total`, in a deterministic order.
pub fn dim_seqs_up_to(prime: u32, max_total: u32) -> Vec<DimSeq> {
    fn extend(
        prime: u32,
        max_total: u32,
        prefix: &mut Vec<u32>,
        sum: u32,
        out: &mut Vec<DimSeq>,
    ) {
        if !prefix.is_empty() {
            out.push(DimSeq::new(prefix.clone(), prime).expect("valid by construction"));
        }
        let cap = prefix.last().copied().unwrap_or(prime).min(max_total - sum);
        for d in (1..=cap).rev() {
            prefix.push(d);
            extend(prime, max_total, prefix, sum + d, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(prime, max_total, &mut Vec::new(), 0, &mut out);
    out.sort_by(|a, b| (a.total(), a.entries()).cmp(&(b.total(), b.entries())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(entries: &[u32], p: u32) -> DimSeq {
        DimSeq::new(entries.to_vec(), p).unwrap()
    }

    #[test]
    fn dimseq_validation() {
        assert!(DimSeq::new(vec![3], 3).is_ok());
        assert!(DimSeq::new(vec![4], 3).is_err());
        assert!(DimSeq::new(vec![1, 2], 3).is_err());
        assert!(DimSeq::new(vec![], 3).is_err());
        assert!(DimSeq::new(vec![2], 4).is_err());
        assert_eq!(DimSeq::parse("2,2", 2).unwrap(), d(&[2, 2], 2));
    }

    #[test]
    fn sht_values() {
        assert_eq!(sht(&d(&[3], 3), 1).unwrap(), 0);
        assert_eq!(sht(&d(&[3], 3), 4).unwrap(), 3); // floor(4/3) + floor(8/3)
        assert_eq!(sht(&d(&[2, 2], 2), 5).unwrap(), 4); // 2 * floor(5/2)
        assert_eq!(sht(&d(&[3], 3), 3), Err(StringyError::InvalidJ(3, 3)));
        assert_eq!(sht(&d(&[3], 3), 0), Err(StringyError::InvalidJ(0, 3)));
    }

    #[test]
    fn sht_extensions() {
        let d3 = d(&[3], 3);
        assert_eq!(sht_at_f(&d3, Order::Infinite).unwrap(), 0);
        assert_eq!(sht_prime_at_f(&d3, Order::Infinite).unwrap(), -3);
        assert_eq!(sht_at_f(&d3, Order::Finite(-4)).unwrap(), 3);
        assert_eq!(sht_prime_at_f(&d3, Order::Finite(-4)).unwrap(), 2);
        let d2 = d(&[2], 3);
        assert_eq!(sht_at_f(&d2, Order::Finite(-7)).unwrap(), 2);
        assert_eq!(sht_prime_at_f(&d2, Order::Finite(-7)).unwrap(), 1);
        // the G-side extension sends nonnegative orders to the zero stratum
        assert_eq!(sht_at_f(&d3, Order::Finite(2)).unwrap(), 0);
        assert_eq!(sht_prime_at_f(&d3, Order::Finite(2)).unwrap(), -3);
    }

    #[test]
    fn dd_values() {
        assert_eq!(d(&[3], 3).dd(), 3);
        assert_eq!(d(&[2, 2], 2).dd(), 2);
        assert_eq!(d(&[2, 1, 1], 2).dd(), 1);
        assert!(d(&[3], 3).integrals_converge());
        assert!(!d(&[3], 5).integrals_converge());
    }

    #[test]
    fn periodicity_and_monotonicity() {
        for (entries, p) in [(vec![3u32], 3u32), (vec![2, 2], 2), (vec![4, 2], 5), (vec![5], 5)] {
            let ds = DimSeq::new(entries, p).unwrap();
            let dd = ds.dd();
            let mut prev = None;
            for j in 1..=10 * p as u64 {
                if j % p as u64 == 0 {
                    continue;
                }
                let s = sht(&ds, j).unwrap();
                assert_eq!(sht(&ds, j + p as u64).unwrap(), s + dd);
                if let Some(q) = prev {
                    assert!(s >= q);
                }
                prev = Some(s);
            }
        }
    }

    #[test]
    fn golden_integrals() {
        let d3p3 = d(&[3], 3);
        let i = stringy_integral(&d3p3, Variant::Sht, Domain::H);
        assert!(i.equals(&MotivicValue::from_terms(&[(1, 2), (0, 1)])));
        let i = stringy_integral(&d3p3, Variant::ShtPrime, Domain::H);
        assert!(i.equals(&MotivicValue::from_terms(&[(3, 1), (2, 2)])));
        let d22 = d(&[2, 2], 2);
        let i = stringy_integral(&d22, Variant::Sht, Domain::H);
        assert!(i.equals(&MotivicValue::from_terms(&[(1, 1), (0, 1)])));
        let i = stringy_integral(&d22, Variant::ShtPrime, Domain::H);
        assert!(i.equals(&MotivicValue::from_terms(&[(4, 1), (3, 1)])));
        assert!(stringy_integral(&d(&[3], 5), Variant::Sht, Domain::H).is_infinite());
        assert!(stringy_integral(&d(&[3], 7), Variant::ShtPrime, Domain::G).is_infinite());
    }

    #[test]
    fn variant_relation() {
        // sht' form = L^|d| + L^l (sht form - 1), exactly
        for (entries, p) in [(vec![3u32], 3u32), (vec![2, 2], 2), (vec![4], 5), (vec![3, 3], 3)] {
            let ds = DimSeq::new(entries, p).unwrap();
            if !ds.integrals_converge() {
                continue;
            }
            let s = stringy_integral(&ds, Variant::Sht, Domain::H);
            let sp = stringy_integral(&ds, Variant::ShtPrime, Domain::H);
            let rhs = MotivicValue::lefschetz_pow(ds.total() as i64).add(
                &MotivicValue::lefschetz_pow(ds.len() as i64)
                    .mul(&s.sub(&MotivicValue::one()))
                    .unwrap(),
            );
            assert!(sp.equals(&rhs));
        }
    }

    #[test]
    fn truncated_matches_golden_windows() {
        let d3p3 = d(&[3], 3);
        let series = stringy_integral_truncated(&d3p3, Variant::Sht, 30).unwrap();
        let closed = stringy_integral(&d3p3, Variant::Sht, Domain::H);
        assert!(series.agrees_with(&closed.expand(series.window_low())));
        let d22 = d(&[2, 2], 2);
        let series = stringy_integral_truncated(&d22, Variant::ShtPrime, 40).unwrap();
        let closed = stringy_integral(&d22, Variant::ShtPrime, Domain::H);
        assert!(series.agrees_with(&closed.expand(series.window_low())));
        // a case with no crepant-resolution value in sight
        let d4p5 = d(&[4], 5);
        let series = stringy_integral_truncated(&d4p5, Variant::Sht, 50).unwrap();
        let closed = stringy_integral(&d4p5, Variant::Sht, Domain::H);
        assert!(series.agrees_with(&closed.expand(series.window_low())));
    }

    #[test]
    fn truncation_of_divergent_integral_errors() {
        assert_eq!(
            stringy_integral_truncated(&d(&[3], 5), Variant::Sht, 30),
            Err(StringyError::DivergentTruncation)
        );
    }

    #[test]
    fn corrupted_sht_changes_goldens() {
        let d3p3 = d(&[3], 3);
        let good = stringy_integral(&d3p3, Variant::Sht, Domain::H);
        let bad = stringy_integral_with_sht_offset(&d3p3, Variant::Sht, Domain::H, 1);
        assert!(!bad.equals(&good));
    }

    #[test]
    fn enumeration_of_dim_seqs() {
        let seqs = dim_seqs_up_to(2, 4);
        // partitions of 1..=4 with parts <= 2
        assert_eq!(seqs.len(), 1 + 2 + 2 + 3);
        assert!(seqs.iter().all(|s| s.total() <= 4));
        let seqs = dim_seqs_up_to(7, 6);
        assert!(seqs.iter().any(|s| s.entries() == [6]));
        assert!(seqs.iter().any(|s| s.entries() == [2, 2, 1, 1]));
    }
}
