//! The explicit quotient-variety presentations of the two worked examples,
//! verified by exact symbolic substitution, plus brute-force point counting
//! over F_q as an independent specialization oracle.
//!
//! Point counting enumerates presentation-variable tuples, never ambient
//! tuples, so the counts corroborate the inseparable-bijection argument
//! instead of assuming it.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use thiserror::Error;

use crate::lring::MotivicValue;
use crate::repnil::{derivation_apply, jordan_nilpotent, FpPolynomial};
use crate::stringy::DimSeq;

/// Default cap on enumerated tuples; the CLI can override it through the
/// MOTIVIC_BUDGET environment variable.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("example `{0}` requires p {1}, got {2}")]
    WrongPrime(String, String, u32),
    #[error("q = {0} is not a power of the example's characteristic {1}")]
    WrongCharacteristic(u64, u32),
    #[error("enumeration of {0} tuples exceeds the budget of {1}")]
    BudgetExceeded(u64, u64),
    #[error("specialization failed: {0}")]
    Specialization(String),
}

/// The finite field F_q for q = p^k: elements are integers below q whose
/// base-p digits are the coefficients in a fixed basis, with multiplication
/// reduced by the lexicographically first irreducible monic polynomial.
#[derive(Debug, Clone)]
pub struct Gf {
    p: u64,
    k: u32,
    q: u64,
    /// low coefficients of the monic modulus: alpha^k = -(sum c_i alpha^i)
    modulus: Vec<u64>,
}

impl Gf {
    pub fn new(p: u64, k: u32) -> Gf {
        assert!(crate::is_prime(p) && k >= 1);
        let q = p.pow(k);
        let modulus = if k == 1 {
            vec![0]
        } else {
            first_irreducible(p, k)
        };
        Gf { p, k, q, modulus }
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    fn digits(&self, mut e: u64) -> Vec<u64> {
        let mut d = vec![0; self.k as usize];
        for slot in d.iter_mut() {
            *slot = e % self.p;
            e /= self.p;
        }
        d
    }

    fn pack_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let da = self.digits(a);
        let db = self.digits(b);
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.pack_digits(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let d: Vec<u64> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.pack_digits(&d)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut conv = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                conv[i + j] = (conv[i + j] + x * y) % self.p;
            }
        }
        // reduce by alpha^k = -(sum c_i alpha^i)
        for i in (k..conv.len()).rev() {
            let coeff = conv[i];
            if coeff == 0 {
                continue;
            }
            conv[i] = 0;
            for (j, &c) in self.modulus.iter().enumerate() {
                conv[i - k + j] = (conv[i - k + j] + coeff * ((self.p - c) % self.p)) % self.p;
            }
        }
        self.pack_digits(&conv[..k])
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The image of a prime-field scalar.
    pub fn embed(&self, c: u64) -> u64 {
        c % self.p
    }
}

/// Lexicographically first irreducible monic polynomial of degree k over
/// F_p, found by trial division against every lower-degree monic polynomial.
fn first_irreducible(p: u64, k: u32) -> Vec<u64> {
    let total = p.pow(k);
    'candidates: for v in 0..total {
        let mut coeffs = Vec::with_capacity(k as usize + 1);
        let mut rest = v;
        for _ in 0..k {
            coeffs.push(rest % p);
            rest /= p;
        }
        coeffs.push(1); // monic
        for deg in 1..=(k / 2).max(1) {
            for w in 0..p.pow(deg) {
                let mut div = Vec::with_capacity(deg as usize + 1);
                let mut rest = w;
                for _ in 0..deg {
                    div.push(rest % p);
                    rest /= p;
                }
                div.push(1);
                if poly_divides(&div, &coeffs, p) {
                    continue 'candidates;
                }
            }
        }
        return coeffs[..k as usize].to_vec();
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn poly_divides(divisor: &[u64], dividend: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = dividend.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for (j, &c) in divisor.iter().enumerate() {
                rem[shift + j] = (rem[shift + j] + (p - c % p) * lead) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

/// How the invariance of the generators is certified: annihilation by the
/// derivation of a dimension sequence, or fixedness under a linear
/// substitution of the ambient variables.
#[derive(Debug, Clone)]
pub enum InvarianceCheck {
    Derivation(DimSeq),
    Substitution(Vec<FpPolynomial>),
}

/// One of the worked quotient presentations: invariant generators of the
/// ambient polynomial ring, presentation variables, and the single relation
/// among them (if any).
#[derive(Debug, Clone)]
pub struct QuotientExample {
    id: String,
    p: u32,
    ambient_vars: Vec<String>,
    generators: Vec<FpPolynomial>,
    pres_vars: Vec<String>,
    relation: Option<FpPolynomial>,
    invariance: InvarianceCheck,
}

impl QuotientExample {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn ambient_vars(&self) -> &[String] {
        &self.ambient_vars
    }

    pub fn generators(&self) -> &[FpPolynomial] {
        &self.generators
    }

    pub fn pres_vars(&self) -> &[String] {
        &self.pres_vars
    }

    pub fn relation(&self) -> Option<&FpPolynomial> {
        self.relation.as_ref()
    }

    /// Dimension of the quotient variety (= the ambient dimension, the
    /// quotient map being a homeomorphism).
    pub fn dimension(&self) -> usize {
        self.ambient_vars.len()
    }
}

/// The quotient of 3-space by the length-3 indecomposable action, p >= 3:
/// generators 2x, y^p, z^p, y^2 - 2xz with relation Y^2 - W^p - X^p Z.
pub fn ex_d3(p: u32) -> Result<QuotientExample, QuotientError> {
    if !crate::is_prime(p as u64) || p < 3 {
        return Err(QuotientError::WrongPrime(
            "ex_d3".into(),
            ">= 3".into(),
            p,
        ));
    }
    let names = ["x", "y", "z"];
    let gens = vec![
        FpPolynomial::parse("2*x", p, &names).unwrap(),
        FpPolynomial::parse(&format!("y^{}", p), p, &names).unwrap(),
        FpPolynomial::parse(&format!("z^{}", p), p, &names).unwrap(),
        FpPolynomial::parse("y^2 - 2*x*z", p, &names).unwrap(),
    ];
    let pres = ["X", "Y", "Z", "W"];
    let relation = FpPolynomial::parse(&format!("Y^2 - W^{} - X^{}*Z", p, p), p, &pres).unwrap();
    Ok(QuotientExample {
        id: "ex_d3".into(),
        p,
        ambient_vars: names.iter().map(|s| s.to_string()).collect(),
        generators: gens,
        pres_vars: pres.iter().map(|s| s.to_string()).collect(),
        relation: Some(relation),
        invariance: InvarianceCheck::Derivation(DimSeq::new(vec![3], p).expect("3 <= p")),
    })
}

/// The quotient of 4-space by two length-2 blocks at p = 2: generators
/// x0, y0^2, x1, y1^2, x0 y1 + x1 y0 with relation Z^2 + V^2 Y + X^2 W.
pub fn ex_d22_p2() -> QuotientExample {
    let p = 2;
    let names = ["x0", "y0", "x1", "y1"];
    let gens = vec![
        FpPolynomial::parse("x0", p, &names).unwrap(),
        FpPolynomial::parse("y0^2", p, &names).unwrap(),
        FpPolynomial::parse("x1", p, &names).unwrap(),
        FpPolynomial::parse("y1^2", p, &names).unwrap(),
        FpPolynomial::parse("x0*y1 + x1*y0", p, &names).unwrap(),
    ];
    let pres = ["V", "W", "X", "Y", "Z"];
    let relation = FpPolynomial::parse("Z^2 + V^2*Y + X^2*W", p, &pres).unwrap();
    QuotientExample {
        id: "ex_d22_p2".into(),
        p,
        ambient_vars: names.iter().map(|s| s.to_string()).collect(),
        generators: gens,
        pres_vars: pres.iter().map(|s| s.to_string()).collect(),
        relation: Some(relation),
        invariance: InvarianceCheck::Derivation(DimSeq::new(vec![2, 2], p).expect("2 <= p")),
    }
}

/// The cyclic-side quotient plane for the length-2 block: generators
/// x^p - x y^(p-1) and y, with no relation; the quotient is an affine plane.
/// Invariance here is under the group generator x -> x + y, y -> y.
pub fn ex_d2_h(p: u32) -> Result<QuotientExample, QuotientError> {
    if !crate::is_prime(p as u64) {
        return Err(QuotientError::WrongPrime(
            "ex_d2_H".into(),
            "prime".into(),
            p,
        ));
    }
    let names = ["x", "y"];
    let gens = vec![
        FpPolynomial::parse(&format!("x^{} - x*y^{}", p, p - 1), p, &names).unwrap(),
        FpPolynomial::parse("y", p, &names).unwrap(),
    ];
    let sigma = vec![
        FpPolynomial::parse("x + y", p, &names).unwrap(),
        FpPolynomial::parse("y", p, &names).unwrap(),
    ];
    Ok(QuotientExample {
        id: "ex_d2_H".into(),
        p,
        ambient_vars: names.iter().map(|s| s.to_string()).collect(),
        generators: gens,
        pres_vars: vec!["X".into(), "Y".into()],
        relation: None,
        invariance: InvarianceCheck::Substitution(sigma),
    })
}

/// The three built-in examples at their default primes.
pub fn builtin_examples() -> Vec<QuotientExample> {
    vec![
        ex_d3(3).expect("3 is prime"),
        ex_d22_p2(),
        ex_d2_h(2).expect("2 is prime"),
    ]
}

/// Looks up a built-in example by identifier at the requested prime.
pub fn example_by_id(id: &str, p: u32) -> Result<QuotientExample, QuotientError> {
    match id {
        "ex_d3" => ex_d3(p),
        "ex_d22_p2" => {
            if p != 2 {
                return Err(QuotientError::WrongPrime("ex_d22_p2".into(), "= 2".into(), p));
            }
            Ok(ex_d22_p2())
        }
        "ex_d2_H" | "ex_d2_h" => ex_d2_h(p),
        other => Err(QuotientError::UnknownExample(other.into())),
    }
}

/// Substitutes the generators into the relation and returns the residual
/// polynomial in the ambient variables; a correct presentation yields the
/// zero polynomial. Examples without a relation return zero directly.
pub fn verify_presentation(e: &QuotientExample) -> FpPolynomial {
    match &e.relation {
        None => FpPolynomial::zero(e.p, e.ambient_vars.len()),
        Some(rel) => rel.substitute(&e.generators),
    }
}

/// Checks that every generator is invariant, each under the example's own
/// certificate (derivation annihilation or substitution fixedness).
pub fn check_generators_invariant(e: &QuotientExample) -> Vec<(String, bool)> {
    let names: Vec<&str> = e.ambient_vars.iter().map(String::as_str).collect();
    e.generators
        .iter()
        .map(|g| {
            let ok = match &e.invariance {
                InvarianceCheck::Derivation(d) => {
                    let xi = jordan_nilpotent(d);
                    derivation_apply(&xi, g).map(|r| r.is_zero()).unwrap_or(false)
                }
                InvarianceCheck::Substitution(images) => &g.substitute(images) == g,
            };
            (g.render(&names), ok)
        })
        .collect()
}

fn eval_over_gf(f: &FpPolynomial, gf: &Gf, point: &[u64]) -> u64 {
    let mut acc = 0u64;
    for (exps, c) in f.terms() {
        let mut term = gf.embed(c);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                term = gf.mul(term, gf.pow(point[i], e as u64));
            }
        }
        acc = gf.add(acc, term);
    }
    acc
}

/// A variable that occurs in exactly one monomial of the relation, alone in
/// it; solving for it turns the count into a root-count table lookup.
fn eliminable_variable(rel: &FpPolynomial) -> Option<(usize, u32, u64)> {
    let nvars = rel.nvars();
    'vars: for v in 0..nvars {
        let mut solo: Option<(u32, u64)> = None;
        for (exps, c) in rel.terms() {
            if exps[v] == 0 {
                continue;
            }
            let alone = exps.iter().enumerate().all(|(i, &e)| i == v || e == 0);
            if !alone || solo.is_some() {
                continue 'vars;
            }
            solo = Some((exps[v], c));
        }
        if let Some((m, c)) = solo {
            return Some((v, m, c));
        }
    }
    None
}

/// Exact number of F_q-points of the presented affine scheme, by exhaustive
/// enumeration of presentation-variable tuples. When the relation has a
/// variable occurring alone in a single monomial (monic-linear or pure-power
/// forms), that variable is counted through a precomputed root table and the
/// enumeration drops one dimension.
pub fn count_points(e: &QuotientExample, q: u64, budget: u64) -> Result<u64, QuotientError> {
    let Some((p, k)) = crate::prime_power(q) else {
        return Err(QuotientError::WrongCharacteristic(q, e.p));
    };
    if p != e.p as u64 {
        return Err(QuotientError::WrongCharacteristic(q, e.p));
    }
    let gf = Gf::new(p, k);
    let nvars = e.pres_vars.len();
    let Some(rel) = &e.relation else {
        // no relation: every tuple is a point
        let tuples = checked_power(q, nvars as u32, budget)?;
        let mut count = 0u64;
        let mut point = vec![0u64; nvars];
        loop {
            count += 1;
            if !increment(&mut point, q) {
                break;
            }
        }
        debug_assert_eq!(count, tuples);
        return Ok(count);
    };

    if let Some((v, m, c)) = eliminable_variable(rel) {
        // root-count table: how many t solve t^m = u
        let mut roots = vec![0u64; q as usize];
        for t in 0..q {
            roots[gf.pow(t, m as u64) as usize] += 1;
        }
        // the relation without the solo term
        let solo = {
            let mut exps = vec![0u32; nvars];
            exps[v] = m;
            FpPolynomial::monomial(e.p, &exps, c)
        };
        let rest = rel.sub(&solo);
        let c_inv = gf.pow(gf.embed(c), p.pow(k) - 2); // multiplicative inverse
        checked_power(q, nvars as u32 - 1, budget)?;
        let mut count = 0u64;
        let mut point = vec![0u64; nvars]; // slot v stays 0, never read by `rest`
        let mut free: Vec<usize> = (0..nvars).filter(|&i| i != v).collect();
        free.sort_unstable();
        let mut odometer = vec![0u64; free.len()];
        loop {
            for (slot, &var) in odometer.iter().zip(&free) {
                point[var] = *slot;
            }
            let r = eval_over_gf(&rest, &gf, &point);
            // c * t^m + r = 0  =>  t^m = -r / c
            let target = gf.mul(gf.neg(r), c_inv);
            count += roots[target as usize];
            if !increment(&mut odometer, q) {
                break;
            }
        }
        return Ok(count);
    }

    checked_power(q, nvars as u32, budget)?;
    let mut count = 0u64;
    let mut point = vec![0u64; nvars];
    loop {
        if eval_over_gf(rel, &gf, &point) == 0 {
            count += 1;
        }
        if !increment(&mut point, q) {
            break;
        }
    }
    Ok(count)
}

fn checked_power(q: u64, e: u32, budget: u64) -> Result<u64, QuotientError> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc
            .checked_mul(q)
            .filter(|&t| t <= budget)
            .ok_or(QuotientError::BudgetExceeded(u64::MAX, budget))?;
    }
    if acc > budget {
        return Err(QuotientError::BudgetExceeded(acc, budget));
    }
    Ok(acc)
}

fn increment(point: &mut [u64], q: u64) -> bool {
    for slot in point.iter_mut() {
        *slot += 1;
        if *slot < q {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Result of comparing a motivic value specialized at L = q against the
/// enumerated point count.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecializationReport {
    pub q: u64,
    pub specialized: BigRational,
    pub counted: u64,
    pub equal: bool,
}

impl fmt::Display for SpecializationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equal {
            write!(
                f,
                "equal at q = {}: specialization {} matches the count",
                self.q, self.specialized
            )
        } else {
            write!(
                f,
                "MISMATCH at q = {}: specialization {} vs count {}",
                self.q, self.specialized, self.counted
            )
        }
    }
}

/// Compares `mv_specialize(v, q)` with the enumerated point count of the
/// example.
pub fn specialization_check(
    v: &MotivicValue,
    e: &QuotientExample,
    q: u64,
    budget: u64,
) -> Result<SpecializationReport, QuotientError> {
    let rational_q = BigRational::from(BigInt::from(q));
    let specialized = v
        .specialize(&rational_q)
        .map_err(|err| QuotientError::Specialization(err.to_string()))?;
    let counted = count_points(e, q, budget)?;
    let equal = specialized == BigRational::from(BigInt::from(counted));
    Ok(SpecializationReport {
        q,
        specialized,
        counted,
        equal,
    })
}
