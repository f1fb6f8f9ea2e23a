//! Representation theory of the infinitesimal group scheme in characteristic
//! p: p-nilpotent Jordan matrices, the coaction exp(xi*eps) and its Hopf
//! axioms, the derivation extending a nilpotent endomorphism to a polynomial
//! ring, and degree-bounded invariant kernels computed by exact linear
//! algebra over F_p.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::stringy::DimSeq;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("matrix is not p-nilpotent (xi^p != 0)")]
    NotPNilpotent,
    #[error("expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Jordan block of size {0} exceeds the prime {1}")]
    BlockTooLarge(u32, u32),
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p
    debug_assert!(!a.is_multiple_of(p));
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Binomial coefficient mod p by Pascal's rule, so no overflow for any p.
fn binom_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut row = vec![0u64; n as usize + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..row.len()).rev() {
            row[j] = (row[j] + row[j - 1]) % p;
        }
    }
    row[k as usize]
}

/// Dense square matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    n: usize,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(p: u32, n: usize) -> Self {
        FpMatrix {
            p,
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zero(p, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(p: u32, rows: &[&[u64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| x % p as u64))
            .collect();
        FpMatrix { p, n, entries }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.n + c] = v % self.p as u64;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.p, self.n), (other.p, other.n));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + b) % self.p as u64)
            .collect();
        FpMatrix {
            p: self.p,
            n: self.n,
            entries,
        }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.p, self.n), (other.p, other.n));
        let p = self.p as u64;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        FpMatrix {
            p: self.p,
            n: self.n,
            entries,
        }
    }

    pub fn scale(&self, c: u64) -> FpMatrix {
        let c = c % self.p as u64;
        FpMatrix {
            p: self.p,
            n: self.n,
            entries: self.entries.iter().map(|&x| x * c % self.p as u64).collect(),
        }
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.p, self.n), (other.p, other.n));
        let n = self.n;
        let p = self.p as u64;
        let mut out = Self::zero(self.p, n);
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] =
                        (out.entries[r * n + c] + a * other.entries[k * n + c]) % p;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> FpMatrix {
        let mut acc = Self::identity(self.p, self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Rank over F_p by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let p = self.p as u64;
        let mut m = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| m[r * n + col] != 0);
            let Some(pr) = pivot else { continue };
            for c in 0..n {
                m.swap(rank * n + c, pr * n + c);
            }
            let inv = inv_mod(m[rank * n + col], p);
            for c in 0..n {
                m[rank * n + c] = m[rank * n + c] * inv % p;
            }
            for r in 0..n {
                if r != rank && m[r * n + col] != 0 {
                    let f = m[r * n + col];
                    for c in 0..n {
                        m[r * n + c] = (m[r * n + c] + (p - f) * m[rank * n + c]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Block-diagonal direct sum; both summands must share the prime.
    pub fn direct_sum(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.p, other.p);
        let n = self.n + other.n;
        let mut out = Self::zero(self.p, n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.entries[r * n + c] = self.get(r, c);
            }
        }
        for r in 0..other.n {
            for c in 0..other.n {
                out.entries[(self.n + r) * n + (self.n + c)] = other.get(r, c);
            }
        }
        out
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            write!(f, "[")?;
            for c in 0..self.n {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Block-diagonal nilpotent matrix with superdiagonal-1 Jordan blocks of the
/// given sizes; satisfies `xi^p = 0` because every block size is at most p.
pub fn jordan_nilpotent(d: &DimSeq) -> FpMatrix {
    let p = d.prime();
    assert!(
        d.entries().iter().all(|&s| s <= p),
        "{}",
        RepError::BlockTooLarge(*d.entries().iter().max().unwrap(), p)
    );
    let n = d.total() as usize;
    let mut m = FpMatrix::zero(p, n);
    let mut offset = 0;
    for &size in d.entries() {
        for i in 0..size as usize - 1 {
            m.set(offset + i, offset + i + 1, 1);
        }
        offset += size as usize;
    }
    m
}

/// Unipotent generator of the cyclic-group action: Jordan blocks with
/// diagonal entries 1, i.e. `I + jordan_nilpotent(d)`; satisfies sigma^p = I.
pub fn h_generator(d: &DimSeq) -> FpMatrix {
    let nil = jordan_nilpotent(d);
    FpMatrix::identity(d.prime(), nil.dim()).add(&nil)
}

/// Square matrix whose entries are polynomials in eps of degree < p over F_p;
/// realizes the comodule map exp(xi*eps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoactionMatrix {
    p: u32,
    n: usize,
    /// components[k] is the matrix coefficient of eps^k
    components: Vec<FpMatrix>,
}

impl CoactionMatrix {
    /// Assembles a coaction candidate from its eps-components; used directly
    /// only to build negative controls for the axiom checker.
    pub fn from_components(components: Vec<FpMatrix>) -> Self {
        let p = components.len() as u32;
        let n = components[0].dim();
        assert!(components.iter().all(|m| m.dim() == n && m.prime() == p));
        CoactionMatrix { p, n, components }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn component(&self, k: usize) -> &FpMatrix {
        &self.components[k]
    }

    /// Entry (r, c) as eps-coefficients `[c_0, ..., c_{p-1}]`.
    pub fn entry(&self, r: usize, c: usize) -> Vec<u64> {
        self.components.iter().map(|m| m.get(r, c)).collect()
    }

    /// Evaluation at eps = 1: the sum of all components.
    pub fn eval_at_one(&self) -> FpMatrix {
        let mut acc = FpMatrix::zero(self.p, self.n);
        for m in &self.components {
            acc = acc.add(m);
        }
        acc
    }
}

impl fmt::Display for CoactionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            write!(f, "[")?;
            for c in 0..self.n {
                if c > 0 {
                    write!(f, ", ")?;
                }
                let coeffs = self.entry(r, c);
                let mut parts = Vec::new();
                for (k, &v) in coeffs.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let part = match (k, v) {
                        (0, _) => format!("{}", v),
                        (1, 1) => "eps".to_string(),
                        (1, _) => format!("{}*eps", v),
                        (_, 1) => format!("eps^{}", k),
                        (_, _) => format!("{}*eps^{}", v, k),
                    };
                    parts.push(part);
                }
                if parts.is_empty() {
                    write!(f, "0")?;
                } else {
                    write!(f, "{}", parts.join(" + "))?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// The coaction `exp(xi*eps) = sum_{k<p} xi^k eps^k / k!`, with `1/k!` the
/// modular inverse of the factorial; requires `xi^p = 0`.
pub fn coaction(xi: &FpMatrix) -> Result<CoactionMatrix, RepError> {
    let p = xi.prime();
    if !xi.pow(p).is_zero() {
        return Err(RepError::NotPNilpotent);
    }
    let mut components = Vec::with_capacity(p as usize);
    let mut power = FpMatrix::identity(p, xi.dim());
    let mut factorial = 1u64;
    for k in 0..p as u64 {
        if k > 0 {
            power = power.mul(xi);
            factorial = factorial * k % p as u64;
        }
        components.push(power.scale(inv_mod(factorial, p as u64)));
    }
    Ok(CoactionMatrix {
        p,
        n: xi.dim(),
        components,
    })
}

/// Outcome of the Hopf-axiom verification of a coaction candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub counit_ok: bool,
    pub coassociative: bool,
    pub first_failure: Option<String>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.counit_ok && self.coassociative
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass() {
            write!(f, "pass: counit and coassociativity hold")
        } else {
            write!(
                f,
                "fail: {}",
                self.first_failure.as_deref().unwrap_or("unknown")
            )
        }
    }
}

/// Verifies the comodule axioms for the coaction attached to `xi`:
/// setting eps = 0 gives the identity, and the two ways of iterating the
/// coaction agree in the truncated two-variable ring.
pub fn check_coaction_axioms(xi: &FpMatrix) -> Result<AxiomReport, RepError> {
    Ok(check_coaction_matrix(&coaction(xi)?))
}

/// Same verification for an arbitrary candidate `phi = sum phi_k eps^k`:
/// counit `phi_0 = I` and the componentwise coassociativity identity
/// `phi_a * phi_b = binom(a+b, a) phi_{a+b}` (with `phi_k = 0` for k >= p),
/// which is the coefficient of `eps1^a eps2^b` on both sides of
/// `(id (x) Delta) phi = (phi (x) id) phi`.
pub fn check_coaction_matrix(phi: &CoactionMatrix) -> AxiomReport {
    let p = phi.p as u64;
    let n = phi.n;
    let identity = FpMatrix::identity(phi.p, n);
    if phi.components[0] != identity {
        let witness = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .find(|&(r, c)| phi.components[0].get(r, c) != identity.get(r, c))
            .expect("some entry differs");
        return AxiomReport {
            counit_ok: false,
            coassociative: false,
            first_failure: Some(format!(
                "counit violated: component of eps^0 differs from the identity at entry ({}, {})",
                witness.0, witness.1
            )),
        };
    }
    for a in 0..p {
        for b in 0..p {
            let lhs = if a + b < p {
                phi.components[(a + b) as usize].scale(binom_mod(a + b, a, p))
            } else {
                FpMatrix::zero(phi.p, n)
            };
            let rhs = phi.components[a as usize].mul(&phi.components[b as usize]);
            if lhs != rhs {
                let witness = (0..n)
                    .flat_map(|r| (0..n).map(move |c| (r, c)))
                    .find(|&(r, c)| lhs.get(r, c) != rhs.get(r, c))
                    .expect("some entry differs");
                return AxiomReport {
                    counit_ok: true,
                    coassociative: false,
                    first_failure: Some(format!(
                        "coassociativity violated at eps1^{} eps2^{}, entry ({}, {})",
                        a, b, witness.0, witness.1
                    )),
                };
            }
        }
    }
    AxiomReport {
        counit_ok: true,
        coassociative: true,
        first_failure: None,
    }
}

/// Sparse multivariate polynomial over F_p: exponent vector -> coefficient
/// in 1..p-1. No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPolynomial {
    p: u32,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, u64>,
}

impl FpPolynomial {
    pub fn zero(p: u32, nvars: usize) -> Self {
        FpPolynomial {
            p,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u32, nvars: usize, c: u64) -> Self {
        let mut f = Self::zero(p, nvars);
        f.add_term(&vec![0; nvars], c);
        f
    }

    pub fn variable(p: u32, nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars);
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        let mut f = Self::zero(p, nvars);
        f.add_term(&exps, 1);
        f
    }

    pub fn monomial(p: u32, exps: &[u32], c: u64) -> Self {
        let mut f = Self::zero(p, exps.len());
        f.add_term(&exps.to_vec(), c);
        f
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, exps: &Vec<u32>, c: u64) {
        let c = c % self.p as u64;
        if c == 0 {
            return;
        }
        debug_assert_eq!(exps.len(), self.nvars);
        let entry = self.terms.entry(exps.clone()).or_insert(0);
        *entry = (*entry + c) % self.p as u64;
        if *entry == 0 {
            self.terms.remove(exps);
        }
    }

    pub fn add(&self, other: &FpPolynomial) -> FpPolynomial {
        assert_eq!((self.p, self.nvars), (other.p, other.nvars));
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e, *c);
        }
        out
    }

    pub fn neg(&self) -> FpPolynomial {
        let p = self.p as u64;
        let mut out = Self::zero(self.p, self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e, p - c);
        }
        out
    }

    pub fn sub(&self, other: &FpPolynomial) -> FpPolynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> FpPolynomial {
        let mut out = Self::zero(self.p, self.nvars);
        for (e, k) in &self.terms {
            out.add_term(e, k * (c % self.p as u64));
        }
        out
    }

    pub fn mul(&self, other: &FpPolynomial) -> FpPolynomial {
        assert_eq!((self.p, self.nvars), (other.p, other.nvars));
        let mut out = Self::zero(self.p, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(&exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> FpPolynomial {
        let mut acc = Self::constant(self.p, self.nvars, 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `images[i]` for variable i; the ring-map extension of an
    /// assignment of the variables.
    pub fn substitute(&self, images: &[FpPolynomial]) -> FpPolynomial {
        assert_eq!(images.len(), self.nvars);
        let nvars_out = images.first().map(|f| f.nvars).unwrap_or(self.nvars);
        let mut out = FpPolynomial::zero(self.p, nvars_out);
        for (exps, c) in &self.terms {
            let mut term = FpPolynomial::constant(self.p, nvars_out, *c);
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Renders with the given variable names, terms in descending graded-lex
    /// order, coefficients reduced to 0..p-1.
    pub fn render(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| grlex_key(b).cmp(&grlex_key(a)));
        let mut parts = Vec::new();
        for exps in keys {
            let c = self.terms[exps];
            let mut factors = Vec::new();
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            let body = factors.join("*");
            parts.push(match (c, body.is_empty()) {
                (_, true) => format!("{}", c),
                (1, false) => body,
                (_, false) => format!("{}*{}", c, body),
            });
        }
        parts.join(" + ")
    }

    /// Parses a sum of terms such as "y^2 + 2*x*z" against the given variable
    /// names. Accepts optional integer coefficients, `*` between factors,
    /// `^` for powers, and leading or infix `-`.
    pub fn parse(input: &str, p: u32, names: &[&str]) -> Result<Self, String> {
        let nvars = names.len();
        let mut out = Self::zero(p, nvars);
        let cleaned = input.replace(' ', "");
        if cleaned.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut started = false;
        for ch in cleaned.chars() {
            match ch {
                '+' | '-' if started => {
                    terms.push((negative, std::mem::take(&mut current)));
                    negative = ch == '-';
                }
                '-' => {
                    negative = true;
                    started = true;
                }
                _ => {
                    current.push(ch);
                    started = true;
                }
            }
        }
        terms.push((negative, current));
        for (neg, term) in terms {
            if term.is_empty() {
                return Err("empty term".into());
            }
            let mut coeff: u64 = 1;
            let mut exps = vec![0u32; nvars];
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err("empty factor".into());
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    let v: u64 = factor.parse().map_err(|_| "bad integer")?;
                    coeff = coeff * (v % p as u64) % p as u64;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| "bad exponent")?),
                    None => (factor, 1),
                };
                let idx = names
                    .iter()
                    .position(|&v| v == name)
                    .ok_or_else(|| format!("unknown variable `{}`", name))?;
                exps[idx] += exp;
            }
            if neg {
                coeff = (p as u64 - coeff % p as u64) % p as u64;
            }
            out.add_term(&exps, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for FpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.render(&refs))
    }
}

fn grlex_key(exps: &[u32]) -> (u32, &[u32]) {
    (exps.iter().sum(), exps)
}

/// Applies to `f` the derivation extending the linear endomorphism `xi`
/// (acting on the span of the variables by `x_j -> sum_i xi[i][j] x_i`)
/// through the Leibniz rule.
pub fn derivation_apply(xi: &FpMatrix, f: &FpPolynomial) -> Result<FpPolynomial, RepError> {
    if xi.dim() != f.nvars() {
        return Err(RepError::DimensionMismatch {
            expected: xi.dim(),
            got: f.nvars(),
        });
    }
    let p = f.prime() as u64;
    let mut out = FpPolynomial::zero(f.prime(), f.nvars());
    for (exps, c) in f.terms() {
        for j in 0..f.nvars() {
            let e = exps[j];
            if e == 0 {
                continue;
            }
            let factor = c * (e as u64 % p) % p;
            if factor == 0 {
                continue;
            }
            for i in 0..f.nvars() {
                let entry = xi.get(i, j);
                if entry == 0 {
                    continue;
                }
                let mut new_exps = exps.clone();
                new_exps[j] -= 1;
                new_exps[i] += 1;
                out.add_term(&new_exps, factor * entry);
            }
        }
    }
    Ok(out)
}

/// All monomial exponent vectors of the given total degree, in descending
/// graded-lex order (the pivoting order of `invariant_basis`).
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn build(nvars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == nvars - 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            build(nvars, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    build(nvars, degree, &mut Vec::new(), &mut out);
    out
}

/// For each degree `1..=maxdeg`, a basis of the kernel of the derivation on
/// the homogeneous piece of that degree, by Gaussian elimination over F_p
/// with graded-lex pivoting. The list is deterministic and every element is
/// annihilated by the derivation.
pub fn invariant_basis(xi: &FpMatrix, maxdeg: u32) -> Vec<FpPolynomial> {
    let p = xi.prime() as u64;
    let nvars = xi.dim();
    let mut basis = Vec::new();
    for degree in 1..=maxdeg {
        let monos = monomials_of_degree(nvars, degree);
        let index: BTreeMap<&Vec<u32>, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // matrix of the derivation on this graded piece, columns indexed by
        // source monomials in graded-lex order
        let mut mat = vec![vec![0u64; monos.len()]; monos.len()];
        for (col, m) in monos.iter().enumerate() {
            let image = derivation_apply(xi, &FpPolynomial::monomial(xi.prime(), m, 1))
                .expect("dimensions match");
            for (exps, c) in image.terms() {
                mat[index[exps]][col] = c;
            }
        }
        for v in kernel_basis(&mut mat, p) {
            let mut f = FpPolynomial::zero(xi.prime(), nvars);
            for (i, &c) in v.iter().enumerate() {
                if c != 0 {
                    f.add_term(&monos[i], c);
                }
            }
            basis.push(f);
        }
    }
    basis
}

/// Kernel of the matrix (columns = unknowns) via reduced row echelon form.
/// Basis vectors are indexed by free columns in ascending order, each with a
/// 1 in its free position.
fn kernel_basis(mat: &mut [Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rank, pr);
        let inv = inv_mod(mat[rank][col], p);
        for entry in mat[rank].iter_mut() {
            *entry = *entry * inv % p;
        }
        for r in 0..rows {
            if r != rank && mat[r][col] != 0 {
                let f = mat[r][col];
                let pivot_row = mat[rank].clone();
                for (entry, &pivot) in mat[r].iter_mut().zip(&pivot_row) {
                    *entry = (*entry + (p - f) * pivot) % p;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for col in 0..cols {
            if let Some(r) = pivot_of_col[col] {
                let c = mat[r][free];
                if c != 0 {
                    v[col] = p - c;
                }
            }
        }
        kernel.push(v);
    }
    kernel
}
