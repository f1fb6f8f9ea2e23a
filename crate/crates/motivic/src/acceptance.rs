//! The acceptance suite: ten self-contained criteria covering the golden
//! integral values, the convergence dichotomy, the series oracles, the
//! change-of-variables identity, the presentation and point-count checks,
//! the representation-theory properties, and the measure normalizations.
//!
//! Both the `acceptance` integration-test target and the CLI `selftest`
//! subcommand run these; each criterion reports pass/fail, a detail line,
//! and its elapsed time against the budget it must meet.

use std::time::{Duration, Instant};

use num::bigint::BigInt;
use num::rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::covars::{self, Part, TwistedJetStratum};
use crate::lring::MotivicValue;
use crate::moduli::{cylinder_measure_g, stratum_class_h, CylinderG, StratumH};
use crate::quotients::{self, DEFAULT_BUDGET};
use crate::repnil::{
    check_coaction_axioms, derivation_apply, h_generator, jordan_nilpotent, monomials_of_degree,
    FpMatrix, FpPolynomial,
};
use crate::stringy::{
    dim_seqs_up_to, stringy_integral, stringy_integral_truncated, DimSeq, Domain, Variant,
};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionResult {
    pub fn within_limit(&self) -> bool {
        self.limit.is_none_or(|l| self.elapsed < l)
    }

    /// The criterion as a whole: assertions hold and the runtime budget is
    /// met.
    pub fn ok(&self) -> bool {
        self.passed && self.within_limit()
    }

    pub fn status_line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {} ({:.3}s{}) {}",
            self.id,
            self.name,
            if self.ok() { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.limit
                .map(|l| format!(" / limit {:.0}s", l.as_secs_f64()))
                .unwrap_or_default(),
            self.detail,
        )
    }
}

fn timed<F: FnOnce() -> (bool, String)>(
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    body: F,
) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = body();
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
        limit,
    }
}

fn seq(entries: &[u32], p: u32) -> DimSeq {
    DimSeq::new(entries.to_vec(), p).expect("valid test sequence")
}

fn golden_cases() -> Vec<(DimSeq, Variant, MotivicValue)> {
    vec![
        (
            seq(&[3], 3),
            Variant::Sht,
            MotivicValue::from_terms(&[(1, 2), (0, 1)]),
        ),
        (
            seq(&[3], 3),
            Variant::ShtPrime,
            MotivicValue::from_terms(&[(3, 1), (2, 2)]),
        ),
        (
            seq(&[2, 2], 2),
            Variant::Sht,
            MotivicValue::from_terms(&[(1, 1), (0, 1)]),
        ),
        (
            seq(&[2, 2], 2),
            Variant::ShtPrime,
            MotivicValue::from_terms(&[(4, 1), (3, 1)]),
        ),
        (seq(&[3], 5), Variant::Sht, MotivicValue::infinity()),
        (seq(&[3], 5), Variant::ShtPrime, MotivicValue::infinity()),
        (seq(&[3], 7), Variant::Sht, MotivicValue::infinity()),
        (seq(&[3], 7), Variant::ShtPrime, MotivicValue::infinity()),
    ]
}

/// Criterion 1: the eight golden integral values, each evaluated in under a
/// second.
pub fn criterion_1(_quick: bool) -> CriterionResult {
    timed(1, "golden-integrals", Some(Duration::from_secs(1)), || {
        criterion_1_body(0)
    })
}

fn criterion_1_body(sht_offset: i64) -> (bool, String) {
    let mut failures = Vec::new();
    for (d, v, expected) in golden_cases() {
        let start = Instant::now();
        let got = crate::stringy::stringy_integral_with_sht_offset(&d, v, Domain::H, sht_offset);
        let elapsed = start.elapsed();
        if !got.equals(&expected) {
            failures.push(format!(
                "d={:?} p={} {:?}: got {}, want {}",
                d.entries(),
                d.prime(),
                v,
                got,
                expected
            ));
        }
        if elapsed >= Duration::from_secs(1) {
            failures.push(format!("d={:?} {:?}: took {:?}", d.entries(), v, elapsed));
        }
    }
    if failures.is_empty() {
        (true, "8 golden values reproduced".into())
    } else {
        (false, failures.join("; "))
    }
}

/// Negative control: the same golden checks with an off-by-one corruption of
/// the shift function must fail.
pub fn criterion_1_with_corrupted_sht() -> CriterionResult {
    timed(1, "golden-integrals-corrupted", Some(Duration::from_secs(1)), || {
        criterion_1_body(1)
    })
}

fn grid(quick: bool) -> Vec<DimSeq> {
    let (primes, max_total): (&[u32], u32) = if quick {
        (&[2, 3], 4)
    } else {
        (&[2, 3, 5, 7], 6)
    };
    primes
        .iter()
        .flat_map(|&p| dim_seqs_up_to(p, max_total))
        .collect()
}

/// Criterion 2: the integral is finite exactly when `D_d >= p`, over the
/// whole grid.
pub fn criterion_2(quick: bool) -> CriterionResult {
    timed(2, "convergence-dichotomy", Some(Duration::from_secs(10)), move || {
        let mut checked = 0;
        for d in grid(quick) {
            for v in [Variant::Sht, Variant::ShtPrime] {
                let finite = !stringy_integral(&d, v, Domain::H).is_infinite();
                if finite != d.integrals_converge() {
                    return (
                        false,
                        format!(
                            "dichotomy fails for d={:?}, p={}, {:?}",
                            d.entries(),
                            d.prime(),
                            v
                        ),
                    );
                }
                checked += 1;
            }
        }
        (true, format!("{} integrals classified", checked))
    })
}

/// Criterion 3: the G-side and H-side integrals agree over the grid, for
/// both variants.
pub fn criterion_3(quick: bool) -> CriterionResult {
    timed(3, "g-h-agreement", None, move || {
        let mut checked = 0;
        for d in grid(quick) {
            for v in [Variant::Sht, Variant::ShtPrime] {
                let h = stringy_integral(&d, v, Domain::H);
                let g = stringy_integral(&d, v, Domain::G);
                if !g.equals(&h) {
                    return (
                        false,
                        format!(
                            "domains disagree for d={:?}, p={}, {:?}: G={}, H={}",
                            d.entries(),
                            d.prime(),
                            v,
                            g,
                            h
                        ),
                    );
                }
                checked += 1;
            }
        }
        (true, format!("{} integral pairs equal", checked))
    })
}

/// Criterion 4: the truncated partial sums match the expansions of every
/// finite closed form on the guaranteed window.
pub fn criterion_4(quick: bool) -> CriterionResult {
    timed(4, "series-oracle", None, move || {
        let j_max = 60;
        let mut checked = 0;
        for d in grid(quick) {
            if !d.integrals_converge() {
                continue;
            }
            for v in [Variant::Sht, Variant::ShtPrime] {
                let series = match stringy_integral_truncated(&d, v, j_max) {
                    Ok(s) => s,
                    Err(e) => return (false, format!("truncation failed: {e}")),
                };
                let closed = stringy_integral(&d, v, Domain::H);
                let expanded = closed.expand(series.window_low());
                if !series.agrees_with(&expanded) {
                    return (
                        false,
                        format!(
                            "series mismatch for d={:?}, p={}, {:?}",
                            d.entries(),
                            d.prime(),
                            v
                        ),
                    );
                }
                checked += 1;
            }
        }
        (true, format!("{} series windows match", checked))
    })
}

/// Criterion 5: the change-of-variables identity and its two parts.
pub fn criterion_5(_quick: bool) -> CriterionResult {
    timed(5, "cov-identity", Some(Duration::from_secs(1)), || {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let total = match covars::cov_integral(p, Part::All) {
                Ok(v) => v,
                Err(e) => return (false, format!("p={}: {}", p, e)),
            };
            if !total.equals(&MotivicValue::lefschetz_pow(2)) {
                return (false, format!("total at p={} is {}", p, total));
            }
            let nonneg = covars::cov_integral(p, Part::Nonneg).expect("p prime");
            let expected =
                MotivicValue::from_terms(&[(2, 1), (1, -1)]).with_denominator_factors(&[p]);
            if !nonneg.equals(&expected) {
                return (false, format!("nonneg part at p={} is {}", p, nonneg));
            }
            let neg = covars::cov_integral(p, Part::Neg).expect("p prime");
            let expected = MotivicValue::from_terms(&[(1, 1), (2 - p as i64, -1)])
                .with_denominator_factors(&[p]);
            if !neg.equals(&expected) {
                return (false, format!("neg part at p={} is {}", p, neg));
            }
        }
        (true, "identity and both parts hold for p up to 13".into())
    })
}

/// Criterion 6: `s_f = sht' + 2` exhaustively.
pub fn criterion_6(quick: bool) -> CriterionResult {
    timed(6, "s-f-identity", Some(Duration::from_secs(1)), move || {
        let jmax = if quick { 100 } else { 1000 };
        let mut checked = 0;
        for p in [2u32, 3, 5, 7] {
            let report = match covars::s_equals_shtprime_plus_two(p, jmax) {
                Ok(r) => r,
                Err(e) => return (false, format!("p={}: {}", p, e)),
            };
            if !report.pass {
                return (false, report.to_string());
            }
            checked += report.checked;
        }
        (true, format!("{} orders checked", checked))
    })
}

/// Criterion 7: the presentation residuals vanish and all generators are
/// invariant.
pub fn criterion_7(_quick: bool) -> CriterionResult {
    timed(7, "presentations", Some(Duration::from_secs(1)), || {
        let mut examples = vec![quotients::ex_d22_p2(), quotients::ex_d2_h(2).expect("prime")];
        for p in [3, 5, 7] {
            examples.push(quotients::ex_d3(p).expect("prime"));
        }
        for e in &examples {
            let residual = quotients::verify_presentation(e);
            if !residual.is_zero() {
                return (
                    false,
                    format!("{} (p={}): residual {}", e.id(), e.prime(), residual),
                );
            }
            for (name, ok) in quotients::check_generators_invariant(e) {
                if !ok {
                    return (
                        false,
                        format!("{} (p={}): generator {} not invariant", e.id(), e.prime(), name),
                    );
                }
            }
        }
        (true, format!("{} presentations verified", examples.len()))
    })
}

/// Criterion 8: enumerated point counts equal the specialized affine-space
/// classes.
pub fn criterion_8(quick: bool) -> CriterionResult {
    timed(8, "point-counts", Some(Duration::from_secs(60)), move || {
        let mut cases: Vec<(quotients::QuotientExample, Vec<u64>)> = Vec::new();
        if quick {
            cases.push((quotients::ex_d3(3).expect("prime"), vec![3]));
            cases.push((quotients::ex_d22_p2(), vec![2]));
            cases.push((quotients::ex_d2_h(2).expect("prime"), vec![2]));
        } else {
            cases.push((quotients::ex_d3(3).expect("prime"), vec![3, 9, 27]));
            cases.push((quotients::ex_d22_p2(), vec![2, 4]));
            cases.push((quotients::ex_d2_h(2).expect("prime"), vec![2, 4, 8]));
        }
        let mut checked = 0;
        for (e, qs) in &cases {
            let class = MotivicValue::lefschetz_pow(e.dimension() as i64);
            for &q in qs {
                match quotients::specialization_check(&class, e, q, DEFAULT_BUDGET) {
                    Ok(report) if report.equal => checked += 1,
                    Ok(report) => return (false, format!("{}: {}", e.id(), report)),
                    Err(err) => return (false, format!("{} at q={}: {}", e.id(), q, err)),
                }
            }
        }
        (true, format!("{} counts match specializations", checked))
    })
}

fn random_polynomial(rng: &mut StdRng, p: u32, nvars: usize) -> FpPolynomial {
    let mut f = FpPolynomial::zero(p, nvars);
    let terms = rng.random_range(1..=4);
    for _ in 0..terms {
        let exps: Vec<u32> = (0..nvars).map(|_| rng.random_range(0..=2)).collect();
        let coeff = rng.random_range(1..p as u64);
        f = f.add(&FpPolynomial::monomial(p, &exps, coeff));
    }
    f
}

/// Criterion 9: the representation-theory property suite over the grid of
/// sequences with |d| <= 5 and p in {2, 3, 5}.
pub fn criterion_9(quick: bool) -> CriterionResult {
    timed(9, "representation-suite", Some(Duration::from_secs(30)), move || {
        let (primes, max_total, pairs, max_dpow_deg): (&[u32], u32, usize, u32) = if quick {
            (&[2, 3], 3, 10, 4)
        } else {
            (&[2, 3, 5], 5, 100, 6)
        };
        let mut checked = 0;
        for &p in primes {
            for d in dim_seqs_up_to(p, max_total) {
                let xi = jordan_nilpotent(&d);
                let n = xi.dim();
                if !xi.pow(p).is_zero() {
                    return (false, format!("xi^p != 0 for d={:?}, p={}", d.entries(), p));
                }
                let sigma = h_generator(&d);
                if sigma.pow(p) != FpMatrix::identity(p, n) {
                    return (false, format!("sigma^p != I for d={:?}, p={}", d.entries(), p));
                }
                match check_coaction_axioms(&xi) {
                    Ok(report) if report.pass() => {}
                    Ok(report) => {
                        return (false, format!("axioms fail for d={:?}, p={}: {}", d.entries(), p, report))
                    }
                    Err(e) => return (false, e.to_string()),
                }
                // Leibniz on random sparse pairs, seeded per sequence
                let seed = 0x5eed ^ (p as u64) << 32 ^ d.total() as u64 ^ (d.len() as u64) << 16;
                let mut rng = StdRng::seed_from_u64(seed);
                for _ in 0..pairs {
                    let f = random_polynomial(&mut rng, p, n);
                    let g = random_polynomial(&mut rng, p, n);
                    let lhs = derivation_apply(&xi, &f.mul(&g)).expect("dims match");
                    let rhs = derivation_apply(&xi, &f)
                        .expect("dims match")
                        .mul(&g)
                        .add(&f.mul(&derivation_apply(&xi, &g).expect("dims match")));
                    if lhs != rhs {
                        return (
                            false,
                            format!("Leibniz fails for d={:?}, p={}: f={}, g={}", d.entries(), p, f, g),
                        );
                    }
                }
                // D^p = 0 on every monomial up to the degree bound
                for deg in 1..=max_dpow_deg {
                    for m in monomials_of_degree(n, deg) {
                        let mut g = FpPolynomial::monomial(p, &m, 1);
                        for _ in 0..p {
                            g = derivation_apply(&xi, &g).expect("dims match");
                        }
                        if !g.is_zero() {
                            return (
                                false,
                                format!("D^p != 0 on degree-{} monomial for d={:?}, p={}", deg, d.entries(), p),
                            );
                        }
                    }
                }
                // kernel elements are annihilated
                for f in crate::repnil::invariant_basis(&xi, 4) {
                    if !derivation_apply(&xi, &f).expect("dims match").is_zero() {
                        return (
                            false,
                            format!("kernel element not annihilated for d={:?}, p={}", d.entries(), p),
                        );
                    }
                }
                checked += 1;
            }
        }
        (true, format!("{} sequences verified", checked))
    })
}

/// Criterion 10: measure normalizations: the nonnegative locus has measure
/// one, the stratum classes partition the truncation spaces, and cylinder
/// measures are level-stable.
pub fn criterion_10(_quick: bool) -> CriterionResult {
    timed(10, "measure-normalizations", Some(Duration::from_secs(1)), || {
        for p in [2u32, 3, 5, 7] {
            // mu_G of the order >= 0 locus is [1 pt] = 1
            let cyl = CylinderG::new(p, 0, MotivicValue::one()).expect("prime");
            if !cylinder_measure_g(&cyl).equals(&MotivicValue::one()) {
                return (false, format!("nonnegative locus measure != 1 at p={}", p));
            }
            // partition: sum of stratum classes up to J plus the origin point
            // equals the class of the ambient affine space, for J coprime
            for j_top in 1..=50u64 {
                if j_top % p as u64 == 0 {
                    continue;
                }
                let mut total = MotivicValue::one();
                for j in 1..=j_top {
                    if j % p as u64 == 0 {
                        continue;
                    }
                    let s = StratumH::new(p, j).expect("coprime");
                    total = total.add(&stratum_class_h(&s));
                }
                let dim = crate::moduli::dim_delta_h_geq(p, j_top) as i64;
                if !total.equals(&MotivicValue::lefschetz_pow(dim)) {
                    return (false, format!("partition fails at p={}, J={}", p, j_top));
                }
            }
            // level stability along refinements
            let class = stratum_class_h(&StratumH::new(p, 1).expect("coprime"));
            let mut cyl = CylinderG::new(p, 0, class).expect("prime");
            let expected = cylinder_measure_g(&cyl);
            for _ in 0..3 {
                cyl = cyl.refine();
                if !cylinder_measure_g(&cyl).equals(&expected) {
                    return (false, format!("level instability at p={}", p));
                }
            }
            // and the twisted-jet measures agree across levels too
            let s = TwistedJetStratum::neg(p, 1, 1, 2).expect("valid");
            let expected = covars::cyl_measure(&s);
            for m in 2..5 {
                for n in 0..3 {
                    let v = covars::cyl_measure_at_level(&s, m, n).expect("level above base");
                    if !v.equals(&expected) {
                        return (false, format!("twisted level instability at p={}", p));
                    }
                }
            }
        }
        (true, "normalization, partition, and stability hold".into())
    })
}

/// Runs the whole suite in order.
pub fn run_all(quick: bool) -> Vec<CriterionResult> {
    vec![
        criterion_1(quick),
        criterion_2(quick),
        criterion_3(quick),
        criterion_4(quick),
        criterion_5(quick),
        criterion_6(quick),
        criterion_7(quick),
        criterion_8(quick),
        criterion_9(quick),
        criterion_10(quick),
    ]
}

/// Rational value of q as needed by the specialization helpers.
pub fn rational(q: u64) -> BigRational {
    BigRational::from(BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for result in run_all(true) {
            assert!(result.ok(), "{}", result.status_line());
        }
    }

    #[test]
    fn corrupted_sht_fails_goldens() {
        let result = criterion_1_with_corrupted_sht();
        assert!(!result.passed, "corrupted shift must fail the golden checks");
    }
}
