//! Exact arithmetic in the fragment of the completed Grothendieck ring used
//! here: rational functions in the Lefschetz class `L` whose denominators are
//! products of factors `(1 - L^-a)` with `a >= 1`, together with truncated
//! Laurent expansion and specialization `L -> q`.
//!
//! Values are kept in factored, non-reduced form. Equality is decided by
//! cross-multiplying into Z[L, L^-1] and comparing Laurent polynomials, so no
//! gcd machinery over Laurent polynomials is ever needed. Divergence is the
//! distinguished `infinity` value, which add absorbs and mul propagates.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LringError {
    /// `infinity * 0` has no consistent value in the completion.
    #[error("indeterminate product infinity * 0")]
    IndeterminateProduct,
    /// A denominator factor `(1 - q^-a)` vanishes at the evaluation point.
    #[error("denominator factor (1 - L^-{0}) vanishes at the given q")]
    PoleAtQ(u32),
    /// A geometric series with ratio exponent `>= 0` has no finite closed form.
    #[error("geometric series with ratio exponent {0} >= 0 diverges")]
    Divergent(i64),
    /// The operation is only defined for finite values.
    #[error("operation requires a finite value")]
    InfiniteOperand,
    /// Specialization at q = 0 is undefined (negative powers of L occur).
    #[error("cannot specialize at q = 0")]
    ZeroBase,
}

/// Laurent polynomial in `L`: exponent -> nonzero integer coefficient.
type Laurent = BTreeMap<i64, BigInt>;

fn laurent_add_assign(into: &mut Laurent, other: &Laurent) {
    for (&e, c) in other {
        let entry = into.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            into.remove(&e);
        }
    }
}

fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (&ea, ca) in a {
        for (&eb, cb) in b {
            let e = ea + eb;
            let entry = out.entry(e).or_insert_with(BigInt::zero);
            *entry += ca * cb;
            if entry.is_zero() {
                out.remove(&e);
            }
        }
    }
    out
}

/// The Laurent polynomial `1 - L^-a`.
fn denominator_factor(a: u32) -> Laurent {
    let mut f = Laurent::new();
    f.insert(0, BigInt::one());
    f.insert(-(a as i64), -BigInt::one());
    f
}

/// An element of Z[L, L^-1] localized at the factors `(1 - L^-a)`, or the
/// distinguished infinite value used for divergent integrals.
///
/// Invariants: the infinite value has empty numerator and denominator; zero
/// is represented with empty numerator and empty denominator; denominator
/// entries are `>= 1` and kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotivicValue {
    num: Laurent,
    den: Vec<u32>,
    infinite: bool,
}

impl MotivicValue {
    pub fn zero() -> Self {
        MotivicValue {
            num: Laurent::new(),
            den: Vec::new(),
            infinite: false,
        }
    }

    pub fn one() -> Self {
        Self::from_terms(&[(0, 1)])
    }

    pub fn infinity() -> Self {
        MotivicValue {
            num: Laurent::new(),
            den: Vec::new(),
            infinite: true,
        }
    }

    /// Builds a Laurent polynomial from `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut num = Laurent::new();
        for &(e, c) in terms {
            let entry = num.entry(e).or_insert_with(BigInt::zero);
            *entry += BigInt::from(c);
            if entry.is_zero() {
                num.remove(&e);
            }
        }
        MotivicValue {
            num,
            den: Vec::new(),
            infinite: false,
        }
    }

    /// The monomial `L^e`.
    pub fn lefschetz_pow(e: i64) -> Self {
        Self::from_terms(&[(e, 1)])
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_terms(&[(0, n)])
    }

    /// Divides by `(1 - L^-a)` for each listed `a`; every `a` must be `>= 1`.
    pub fn with_denominator_factors(mut self, factors: &[u32]) -> Self {
        assert!(
            factors.iter().all(|&a| a >= 1),
            "denominator exponents must be >= 1"
        );
        if self.infinite || self.num.is_empty() {
            return self;
        }
        self.den.extend_from_slice(factors);
        self.den.sort_unstable();
        self
    }

    pub fn is_infinite(&self) -> bool {
        self.infinite
    }

    pub fn is_zero(&self) -> bool {
        !self.infinite && self.num.is_empty()
    }

    pub fn numerator_terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.num.iter().map(|(&e, c)| (e, c))
    }

    pub fn denominator_factors(&self) -> &[u32] {
        &self.den
    }

    fn normalize(mut self) -> Self {
        if self.num.is_empty() {
            self.den.clear();
        }
        self
    }

    /// Exact sum over a common denominator; infinity absorbs.
    pub fn add(&self, other: &MotivicValue) -> MotivicValue {
        if self.infinite || other.infinite {
            return MotivicValue::infinity();
        }
        // lcm of the two factored denominators: max multiplicity per a.
        let mut common: BTreeMap<u32, usize> = BTreeMap::new();
        for &a in &self.den {
            *common.entry(a).or_insert(0) += 1;
        }
        for (a, count) in multiplicities(&other.den) {
            let entry = common.entry(a).or_insert(0);
            *entry = (*entry).max(count);
        }
        let scale = |v: &MotivicValue| -> Laurent {
            let own = multiplicities(&v.den);
            let mut num = v.num.clone();
            for (&a, &m) in &common {
                let have = own.get(&a).copied().unwrap_or(0);
                for _ in have..m {
                    num = laurent_mul(&num, &denominator_factor(a));
                }
            }
            num
        };
        let mut num = scale(self);
        laurent_add_assign(&mut num, &scale(other));
        let den = common
            .iter()
            .flat_map(|(&a, &m)| std::iter::repeat_n(a, m))
            .collect();
        MotivicValue {
            num,
            den,
            infinite: false,
        }
        .normalize()
    }

    pub fn neg(&self) -> MotivicValue {
        if self.infinite {
            return MotivicValue::infinity();
        }
        MotivicValue {
            num: self.num.iter().map(|(&e, c)| (e, -c)).collect(),
            den: self.den.clone(),
            infinite: false,
        }
    }

    pub fn sub(&self, other: &MotivicValue) -> MotivicValue {
        self.add(&other.neg())
    }

    /// Exact product; denominators concatenate. `infinity * 0` is an error.
    pub fn mul(&self, other: &MotivicValue) -> Result<MotivicValue, LringError> {
        if self.infinite || other.infinite {
            if self.is_zero() || other.is_zero() {
                return Err(LringError::IndeterminateProduct);
            }
            return Ok(MotivicValue::infinity());
        }
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        den.sort_unstable();
        Ok(MotivicValue {
            num: laurent_mul(&self.num, &other.num),
            den,
            infinite: false,
        }
        .normalize())
    }

    /// Equality as rational functions, by cross-multiplication in Z[L, L^-1].
    /// The infinite value equals only itself.
    pub fn equals(&self, other: &MotivicValue) -> bool {
        if self.infinite || other.infinite {
            return self.infinite == other.infinite;
        }
        // Cancel the shared part of the denominators first.
        let mine = multiplicities(&self.den);
        let theirs = multiplicities(&other.den);
        let mut lhs = self.num.clone();
        let mut rhs = other.num.clone();
        for (&a, &m) in &theirs {
            let shared = mine.get(&a).copied().unwrap_or(0).min(m);
            for _ in shared..m {
                lhs = laurent_mul(&lhs, &denominator_factor(a));
            }
        }
        for (&a, &m) in &mine {
            let shared = theirs.get(&a).copied().unwrap_or(0).min(m);
            for _ in shared..m {
                rhs = laurent_mul(&rhs, &denominator_factor(a));
            }
        }
        lhs == rhs
    }

    /// Strips every denominator factor that divides the numerator exactly.
    /// The result is `equals`-equal to the input; integrals that sum to a
    /// Laurent polynomial come out as one.
    pub fn reduced(&self) -> MotivicValue {
        if self.infinite || self.num.is_empty() {
            return self.clone();
        }
        let mut num = self.num.clone();
        let mut den = Vec::new();
        for &a in &self.den {
            match divide_exact(&num, a) {
                Some(quotient) => num = quotient,
                None => den.push(a),
            }
        }
        MotivicValue {
            num,
            den,
            infinite: false,
        }
    }

    /// Truncated Laurent expansion: every factor `1/(1 - L^-a)` becomes the
    /// geometric series `sum_m L^-am`, multiplied out keeping exponents
    /// `>= lo`. All factors only lower exponents, so truncation at `lo` loses
    /// nothing above `lo`.
    ///
    /// Panics if the value is infinite.
    pub fn expand(&self, lo: i64) -> TruncatedSeries {
        assert!(!self.infinite, "cannot expand the infinite value");
        let mut coeffs: Laurent = self
            .num
            .iter()
            .filter(|(&e, _)| e >= lo)
            .map(|(&e, c)| (e, c.clone()))
            .collect();
        let hi = self.num.keys().next_back().copied().unwrap_or(lo).max(lo);
        for &a in &self.den {
            let prev = coeffs;
            let mut next = Laurent::new();
            for e in lo..=hi {
                // coefficient of L^e in prev * sum_m L^-am
                let mut acc = BigInt::zero();
                let mut src = e;
                while src <= hi {
                    if let Some(c) = prev.get(&src) {
                        acc += c;
                    }
                    src += a as i64;
                }
                if !acc.is_zero() {
                    next.insert(e, acc);
                }
            }
            coeffs = next;
        }
        TruncatedSeries::new(lo, hi, coeffs)
    }

    /// Exact value at `L = q` for rational `q`; errors if `q = 0` or some
    /// denominator factor vanishes (`q^a = 1`).
    pub fn specialize(&self, q: &BigRational) -> Result<BigRational, LringError> {
        if self.infinite {
            return Err(LringError::InfiniteOperand);
        }
        if q.is_zero() {
            return Err(LringError::ZeroBase);
        }
        let mut value = BigRational::zero();
        for (&e, c) in &self.num {
            value += BigRational::from(c.clone()) * rational_pow(q, e);
        }
        for &a in &self.den {
            let factor = BigRational::one() - rational_pow(q, -(a as i64));
            if factor.is_zero() {
                return Err(LringError::PoleAtQ(a));
            }
            value /= factor;
        }
        Ok(value)
    }

    /// JSON per the documented schema:
    /// `{"infinite": bool, "num": [[exp, coeff], ...] descending, "den": [a, ...] ascending}`.
    /// Coefficients that fit in an i64 are emitted as numbers, larger ones as
    /// decimal strings.
    pub fn to_json(&self) -> Value {
        let num: Vec<Value> = self
            .num
            .iter()
            .rev()
            .map(|(&e, c)| {
                let coeff = match i64::try_from(c.clone()) {
                    Ok(small) => json!(small),
                    Err(_) => json!(c.to_string()),
                };
                json!([e, coeff])
            })
            .collect();
        json!({
            "infinite": self.infinite,
            "num": num,
            "den": self.den,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let obj = v.as_object().ok_or("expected a JSON object")?;
        let infinite = obj
            .get("infinite")
            .and_then(Value::as_bool)
            .ok_or("missing boolean field `infinite`")?;
        if infinite {
            return Ok(MotivicValue::infinity());
        }
        let mut num = Laurent::new();
        for pair in obj
            .get("num")
            .and_then(Value::as_array)
            .ok_or("missing array field `num`")?
        {
            let pair = pair.as_array().filter(|p| p.len() == 2).ok_or("num entries must be [exp, coeff] pairs")?;
            let e = pair[0].as_i64().ok_or("exponent must be an integer")?;
            let c: BigInt = match &pair[1] {
                Value::Number(n) => BigInt::from(n.as_i64().ok_or("coefficient out of range")?),
                Value::String(s) => s.parse().map_err(|_| "bad coefficient string")?,
                _ => return Err("coefficient must be a number or string".into()),
            };
            if !c.is_zero() {
                let entry = num.entry(e).or_insert_with(BigInt::zero);
                *entry += c;
                if entry.is_zero() {
                    num.remove(&e);
                }
            }
        }
        let mut den = Vec::new();
        for a in obj
            .get("den")
            .and_then(Value::as_array)
            .ok_or("missing array field `den`")?
        {
            let a = a.as_u64().filter(|&a| a >= 1).ok_or("den entries must be integers >= 1")?;
            den.push(u32::try_from(a).map_err(|_| "den entry too large")?);
        }
        den.sort_unstable();
        Ok(MotivicValue {
            num,
            den,
            infinite: false,
        }
        .normalize())
    }
}

fn multiplicities(den: &[u32]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &a in den {
        *m.entry(a).or_insert(0) += 1;
    }
    m
}

/// Exact quotient `num / (1 - L^-a)` as a Laurent polynomial, or None when
/// the division leaves a remainder. Descending division against the monic
/// top term; an exact quotient never needs exponents below `min(num) + a`,
/// so dipping under that bound proves indivisibility.
fn divide_exact(num: &Laurent, a: u32) -> Option<Laurent> {
    let min_exp = *num.keys().next()?;
    let floor = min_exp + a as i64;
    let mut quotient = Laurent::new();
    let mut rem = num.clone();
    while let Some((&e, c)) = rem.iter().next_back() {
        if e < floor {
            return None;
        }
        let c = c.clone();
        quotient.insert(e, c.clone());
        rem.remove(&e);
        let lower = rem.entry(e - a as i64).or_insert_with(BigInt::zero);
        *lower += &c;
        if lower.is_zero() {
            rem.remove(&(e - a as i64));
        }
    }
    Some(quotient)
}

fn rational_pow(q: &BigRational, e: i64) -> BigRational {
    let mut base = if e >= 0 { q.clone() } else { q.recip() };
    let mut exp = e.unsigned_abs();
    let mut acc = BigRational::one();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base.clone();
        }
        base = base.clone() * base;
        exp >>= 1;
    }
    acc
}

/// Closed form of the geometric series `sum_{m>=0} term * L^(r*m)`, namely
/// `term / (1 - L^r)`; requires `r < 0` for convergence.
pub fn geom_sum(term: MotivicValue, r: i64) -> Result<MotivicValue, LringError> {
    if r >= 0 {
        return Err(LringError::Divergent(r));
    }
    let a = u32::try_from(-r).map_err(|_| LringError::Divergent(r))?;
    Ok(term.with_denominator_factors(&[a]))
}

fn fmt_laurent(num: &Laurent, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (idx, (&e, c)) in num.iter().rev().enumerate() {
        let mag = c.abs();
        if idx == 0 {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        if e == 0 {
            write!(f, "{}", mag)?;
        } else {
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            if e == 1 {
                write!(f, "L")?;
            } else {
                write!(f, "L^{}", e)?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for MotivicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.infinite {
            return write!(f, "infinity");
        }
        if self.num.is_empty() {
            return write!(f, "0");
        }
        if self.den.is_empty() {
            return fmt_laurent(&self.num, f);
        }
        if self.num.len() > 1 {
            write!(f, "(")?;
            fmt_laurent(&self.num, f)?;
            write!(f, ")")?;
        } else {
            fmt_laurent(&self.num, f)?;
        }
        write!(f, "/")?;
        if self.den.len() > 1 {
            write!(f, "(")?;
        }
        for (i, &a) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "(1 - L^-{})", a)?;
        }
        if self.den.len() > 1 {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A finite window `[window_low, window_high]` of a Laurent series in
/// descending powers of `L`.
///
/// Contract: the abbreviated series has no terms of exponent above
/// `window_high`, and every omitted term has exponent below `window_low`.
/// Coefficients inside the window are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    window_low: i64,
    window_high: i64,
    coefficients: Laurent,
}

impl TruncatedSeries {
    pub fn new(window_low: i64, window_high: i64, coefficients: Laurent) -> Self {
        assert!(window_low <= window_high, "empty series window");
        debug_assert!(coefficients
            .keys()
            .all(|&e| e >= window_low && e <= window_high));
        debug_assert!(coefficients.values().all(|c| !c.is_zero()));
        TruncatedSeries {
            window_low,
            window_high,
            coefficients,
        }
    }

    pub fn window_low(&self) -> i64 {
        self.window_low
    }

    pub fn window_high(&self) -> i64 {
        self.window_high
    }

    /// Exact coefficient of `L^e`, or `None` when `e` is below the window
    /// (where the series is not determined).
    pub fn coeff(&self, e: i64) -> Option<BigInt> {
        if e < self.window_low {
            return None;
        }
        Some(self.coefficients.get(&e).cloned().unwrap_or_else(BigInt::zero))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coefficients.iter().rev().map(|(&e, c)| (e, c))
    }

    /// True when both windows describe the same series wherever both are
    /// determined: exact coefficient match on `[max(lows), max(highs)]`.
    pub fn agrees_with(&self, other: &TruncatedSeries) -> bool {
        let lo = self.window_low.max(other.window_low);
        let hi = self.window_high.max(other.window_high);
        (lo..=hi).all(|e| self.coeff(e) == other.coeff(e))
    }

    /// Evaluates the windowed part at `L = q`.
    pub fn eval(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&e, c) in &self.coefficients {
            acc += BigRational::from(c.clone()) * rational_pow(q, e);
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coefficients
            .iter()
            .rev()
            .map(|(&e, c)| {
                let coeff = match i64::try_from(c.clone()) {
                    Ok(small) => json!(small),
                    Err(_) => json!(c.to_string()),
                };
                json!([e, coeff])
            })
            .collect();
        json!({
            "window_low": self.window_low,
            "window_high": self.window_high,
            "coefficients": coeffs,
        })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            write!(f, "0")?;
        } else {
            fmt_laurent(&self.coefficients, f)?;
        }
        write!(f, " + O(L^{})", self.window_low - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l() -> MotivicValue {
        MotivicValue::lefschetz_pow(1)
    }

    #[test]
    fn add_cancels() {
        // (L - 1) + 1 = L
        let a = MotivicValue::from_terms(&[(1, 1), (0, -1)]);
        let sum = a.add(&MotivicValue::one());
        assert!(sum.equals(&l()));
    }

    #[test]
    fn add_absorbs_infinity() {
        let sum = MotivicValue::infinity().add(&MotivicValue::lefschetz_pow(2));
        assert!(sum.is_infinite());
    }

    #[test]
    fn add_section_six_fractions() {
        // (L^2 - L)/(1 - L^-3) + (L - L^-1)/(1 - L^-3) = L^2 for p = 3
        let a = MotivicValue::from_terms(&[(2, 1), (1, -1)]).with_denominator_factors(&[3]);
        let b = MotivicValue::from_terms(&[(1, 1), (-1, -1)]).with_denominator_factors(&[3]);
        assert!(a.add(&b).equals(&MotivicValue::lefschetz_pow(2)));
    }

    #[test]
    fn mul_basics() {
        // (L - 1)(L + 1) = L^2 - 1
        let a = MotivicValue::from_terms(&[(1, 1), (0, -1)]);
        let b = MotivicValue::from_terms(&[(1, 1), (0, 1)]);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod, MotivicValue::from_terms(&[(2, 1), (0, -1)]));
        // 1 * v = v
        let v = MotivicValue::from_terms(&[(3, 2), (-1, 5)]).with_denominator_factors(&[2]);
        assert_eq!(MotivicValue::one().mul(&v).unwrap(), v);
        // (L - 1) * L^-1 = 1 - L^-1
        let shifted = a.mul(&MotivicValue::lefschetz_pow(-1)).unwrap();
        assert_eq!(shifted, MotivicValue::from_terms(&[(0, 1), (-1, -1)]));
    }

    #[test]
    fn mul_infinity_rules() {
        let inf = MotivicValue::infinity();
        assert!(inf.mul(&l()).unwrap().is_infinite());
        assert_eq!(
            inf.mul(&MotivicValue::zero()),
            Err(LringError::IndeterminateProduct)
        );
    }

    #[test]
    fn equality_by_cross_multiplication() {
        // (L - 1)/(1 - L^-1) = L
        let a = MotivicValue::from_terms(&[(1, 1), (0, -1)]).with_denominator_factors(&[1]);
        assert!(a.equals(&l()));
        assert!(!MotivicValue::from_terms(&[(1, 1), (0, 1)])
            .equals(&MotivicValue::from_terms(&[(1, 1), (0, -1)])));
        // 1 + 2(L - 1)/(1 - L^-1) = 2L + 1
        let two_units = MotivicValue::from_terms(&[(1, 2), (0, -2)]).with_denominator_factors(&[1]);
        let v = MotivicValue::one().add(&two_units);
        assert!(v.equals(&MotivicValue::from_terms(&[(1, 2), (0, 1)])));
        // infinity equals only infinity
        assert!(MotivicValue::infinity().equals(&MotivicValue::infinity()));
        assert!(!MotivicValue::infinity().equals(&l()));
    }

    #[test]
    fn expand_geometric() {
        // 1/(1 - L^-2) down to L^-4
        let v = MotivicValue::one().with_denominator_factors(&[2]);
        let s = v.expand(-4);
        assert_eq!(s.coeff(0), Some(BigInt::one()));
        assert_eq!(s.coeff(-1), Some(BigInt::zero()));
        assert_eq!(s.coeff(-2), Some(BigInt::one()));
        assert_eq!(s.coeff(-4), Some(BigInt::one()));
        assert_eq!(s.coeff(-5), None);
    }

    #[test]
    fn expand_polynomial() {
        let v = MotivicValue::from_terms(&[(1, 2), (0, 1)]);
        let s = v.expand(0);
        assert_eq!(s.coeff(1), Some(BigInt::from(2)));
        assert_eq!(s.coeff(0), Some(BigInt::one()));
        assert_eq!(s.window_high(), 1);
    }

    #[test]
    fn expand_telescopes() {
        // (L - 1)/(1 - L^-1) expands to exactly L on any window
        let v = MotivicValue::from_terms(&[(1, 1), (0, -1)]).with_denominator_factors(&[1]);
        let s = v.expand(-6);
        assert_eq!(s.coeff(1), Some(BigInt::one()));
        for e in -6..=0 {
            assert_eq!(s.coeff(e), Some(BigInt::zero()));
        }
    }

    #[test]
    fn specialize_values() {
        let q3 = BigRational::from(BigInt::from(3));
        let v = MotivicValue::from_terms(&[(1, 2), (0, 1)]);
        assert_eq!(v.specialize(&q3).unwrap(), BigRational::from(BigInt::from(7)));
        let q2 = BigRational::from(BigInt::from(2));
        let w = MotivicValue::from_terms(&[(4, 1), (3, 1)]);
        assert_eq!(w.specialize(&q2).unwrap(), BigRational::from(BigInt::from(24)));
        let q9 = BigRational::from(BigInt::from(9));
        assert_eq!(
            MotivicValue::lefschetz_pow(2).specialize(&q9).unwrap(),
            BigRational::from(BigInt::from(81))
        );
    }

    #[test]
    fn specialize_pole_detection() {
        let v = MotivicValue::one().with_denominator_factors(&[2]);
        let q1 = BigRational::from(BigInt::from(1));
        assert_eq!(v.specialize(&q1), Err(LringError::PoleAtQ(2)));
        let q0 = BigRational::zero();
        assert_eq!(v.specialize(&q0), Err(LringError::ZeroBase));
    }

    #[test]
    fn geom_sum_closed_forms() {
        // sum (L-1) L^-m = (L-1)/(1 - L^-1) = L
        let t = MotivicValue::from_terms(&[(1, 1), (0, -1)]);
        assert!(geom_sum(t, -1).unwrap().equals(&l()));
        let g = geom_sum(MotivicValue::one(), -3).unwrap();
        assert_eq!(g.denominator_factors(), &[3]);
        assert_eq!(
            geom_sum(MotivicValue::from_terms(&[(1, 1), (0, -1)]), 0),
            Err(LringError::Divergent(0))
        );
    }

    #[test]
    fn reduction_strips_exact_factors() {
        // (L - 1)/(1 - L^-1) reduces to L
        let v = MotivicValue::from_terms(&[(1, 1), (0, -1)]).with_denominator_factors(&[1]);
        let r = v.reduced();
        assert_eq!(r, l());
        // (L^2 - L)/(1 - L^-2) does not reduce
        let v = MotivicValue::from_terms(&[(2, 1), (1, -1)]).with_denominator_factors(&[2]);
        let r = v.reduced();
        assert_eq!(r.denominator_factors(), &[2]);
        assert!(r.equals(&v));
        // (L^2 - L^-1)/(1 - L^-3) reduces to L^2
        let v = MotivicValue::from_terms(&[(2, 1), (-1, -1)]).with_denominator_factors(&[3]);
        assert_eq!(v.reduced(), MotivicValue::lefschetz_pow(2));
        assert_eq!(MotivicValue::infinity().reduced(), MotivicValue::infinity());
        assert_eq!(MotivicValue::zero().reduced(), MotivicValue::zero());
    }

    #[test]
    fn zero_stays_canonical() {
        let a = MotivicValue::from_terms(&[(2, 1)]).with_denominator_factors(&[3]);
        let diff = a.sub(&a);
        assert!(diff.is_zero());
        assert!(diff.denominator_factors().is_empty());
    }

    #[test]
    fn rendering() {
        assert_eq!(MotivicValue::from_terms(&[(3, 1), (2, 2)]).to_string(), "L^3 + 2*L^2");
        assert_eq!(
            MotivicValue::from_terms(&[(2, 1), (1, -1)])
                .with_denominator_factors(&[3])
                .to_string(),
            "(L^2 - L)/(1 - L^-3)"
        );
        assert_eq!(MotivicValue::infinity().to_string(), "infinity");
        assert_eq!(MotivicValue::zero().to_string(), "0");
        assert_eq!(MotivicValue::from_terms(&[(1, 2), (0, 1)]).to_string(), "2*L + 1");
        assert_eq!(
            MotivicValue::from_terms(&[(0, 1), (-3, -1)]).to_string(),
            "1 - L^-3"
        );
    }

    #[test]
    fn json_round_trip() {
        let v = MotivicValue::from_terms(&[(2, 1), (-1, -3)]).with_denominator_factors(&[3, 1]);
        let back = MotivicValue::from_json(&v.to_json()).unwrap();
        assert_eq!(v, back);
        let inf = MotivicValue::infinity();
        assert_eq!(MotivicValue::from_json(&inf.to_json()).unwrap(), inf);
        assert!(MotivicValue::from_json(&json!({"num": []})).is_err());
    }
}
