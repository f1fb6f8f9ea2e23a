//! Exact arithmetic for motivic measures on moduli of torsors over the
//! punctured formal disk, stringy motivic integrals, and the mod-p
//! representation theory that backs them.
//!
//! Everything is computed symbolically: values live in the ring of Laurent
//! polynomials in the Lefschetz class `L`, localized at the factors
//! `(1 - L^-a)`. Divergent integrals are a first-class `infinity` value,
//! not an error.

pub mod acceptance;
pub mod covars;
pub mod lring;
pub mod moduli;
pub mod quotients;
pub mod repnil;
pub mod stringy;

pub use lring::{LringError, MotivicValue, TruncatedSeries};
pub use moduli::Order;
pub use stringy::{DimSeq, Domain, Variant};

/// Trial-division primality check; all primes in scope are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Decomposes `q` as `p^k` for a prime `p`, if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            return if rest == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_checks() {
        assert!(is_prime(2));
        assert!(is_prime(13));
        assert!(!is_prime(1));
        assert!(!is_prime(27));
    }

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(5), Some((5, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
