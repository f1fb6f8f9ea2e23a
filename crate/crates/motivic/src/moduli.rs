//! Combinatorics of the moduli of torsors over the punctured formal disk:
//! the order stratification of the Z/p-side space, truncation levels and
//! cylinder measures on the alpha_p-side space, and the torsor algebra
//! presentations.
//!
//! Strata are indexed by the order alone; every integrand in scope factors
//! through the order of the classifying series, so nothing finer is needed.

use std::fmt;

use thiserror::Error;

use crate::lring::MotivicValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("order {0} is divisible by the prime {1}")]
    OrderNotCoprime(i64, u32),
    #[error("the Z/p-side classifying series has order +infinity or a negative order, got {0}")]
    OrderNotNegative(i64),
    #[error("stratum index {0} must be coprime to {1}")]
    InvalidStratum(u64, u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("a cylinder class must be finite")]
    InfiniteClass,
}

fn check_prime(p: u32) -> Result<(), ModuliError> {
    if crate::is_prime(p as u64) {
        Ok(())
    } else {
        Err(ModuliError::NotPrime(p as u64))
    }
}

/// Order of a classifying Laurent series, with `ord(0) = +infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Infinite,
    Finite(i64),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinite => write!(f, "+infinity"),
            Order::Finite(o) => write!(f, "{}", o),
        }
    }
}

/// Which of the two groups a torsor class belongs to: the infinitesimal
/// group scheme (G) or the cyclic group of order p (H).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    G,
    H,
}

/// A torsor over the punctured disk, identified by the order of its
/// classifying series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsorClass {
    group: GroupKind,
    prime: u32,
    order: Order,
}

impl TorsorClass {
    /// For H the order must be `+infinity` or negative and coprime to p;
    /// for G any integer order coprime to p is allowed.
    pub fn new(group: GroupKind, prime: u32, order: Order) -> Result<Self, ModuliError> {
        check_prime(prime)?;
        if let Order::Finite(o) = order {
            if o.rem_euclid(prime as i64) == 0 {
                return Err(ModuliError::OrderNotCoprime(o, prime));
            }
            if group == GroupKind::H && o >= 0 {
                return Err(ModuliError::OrderNotNegative(o));
            }
        }
        Ok(TorsorClass {
            group,
            prime,
            order,
        })
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn order(&self) -> Order {
        self.order
    }
}

/// Human-readable presentation of the torsor algebra and its group action.
pub fn torsor_presentation(t: &TorsorClass) -> String {
    let p = t.prime;
    match (t.group, t.order) {
        (GroupKind::G, Order::Finite(o)) => format!(
            "k((t))[z]/(z^{p} - f), f with ord(f) = {o}, action z -> z + eps"
        ),
        (GroupKind::G, Order::Infinite) => format!(
            "k[[t]][z]/(z^{p}) (non-reduced degenerate algebra), f = 0, action z -> z + eps"
        ),
        (GroupKind::H, Order::Finite(o)) => format!(
            "k((t))[z]/(z^{p} - z - f), f with ord(f) = {o}, action z -> z + 1"
        ),
        (GroupKind::H, Order::Infinite) => format!(
            "k((t))[z]/(z^{p} - z), f = 0 (trivial torsor), action z -> z + 1"
        ),
    }
}

/// A stratum of the H-side moduli space: the locus of series of order `-j`
/// for `j` coprime to p, or the single point `f = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StratumH {
    prime: u32,
    j: Option<u64>,
}

impl StratumH {
    pub fn new(prime: u32, j: u64) -> Result<Self, ModuliError> {
        check_prime(prime)?;
        if j == 0 || j.is_multiple_of(prime as u64) {
            return Err(ModuliError::InvalidStratum(j, prime));
        }
        Ok(StratumH { prime, j: Some(j) })
    }

    pub fn zero(prime: u32) -> Result<Self, ModuliError> {
        check_prime(prime)?;
        Ok(StratumH { prime, j: None })
    }

    pub fn j(&self) -> Option<u64> {
        self.j
    }
}

/// Dimension of the space of series with order `>= -j`: the number of
/// coefficient slots at exponents `-j..-1` coprime to p.
pub fn dim_delta_h_geq(p: u32, j: u64) -> u64 {
    debug_assert!(j >= 1);
    j - j / p as u64
}

/// Class of the order stratum: one point for `f = 0`, otherwise a nonzero
/// leading coefficient and free lower slots, `(L-1) * L^(dim-1)`.
pub fn stratum_class_h(s: &StratumH) -> MotivicValue {
    match s.j {
        None => MotivicValue::one(),
        Some(j) => {
            let dim = dim_delta_h_geq(s.prime, j) as i64;
            MotivicValue::from_terms(&[(dim, 1), (dim - 1, -1)])
        }
    }
}

/// A cylinder in the G-side moduli space, recorded at a truncation level at
/// which its class has stabilized.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderG {
    prime: u32,
    level: i64,
    truncated_class: MotivicValue,
}

impl CylinderG {
    pub fn new(prime: u32, level: i64, truncated_class: MotivicValue) -> Result<Self, ModuliError> {
        check_prime(prime)?;
        if truncated_class.is_infinite() {
            return Err(ModuliError::InfiniteClass);
        }
        Ok(CylinderG {
            prime,
            level,
            truncated_class,
        })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn truncated_class(&self) -> &MotivicValue {
        &self.truncated_class
    }

    /// The same cylinder recorded one level higher: the truncation fibers are
    /// affine spaces of dimension p-1, so the class gains a factor L^(p-1).
    pub fn refine(&self) -> CylinderG {
        let fiber = MotivicValue::lefschetz_pow(self.prime as i64 - 1);
        CylinderG {
            prime: self.prime,
            level: self.level + 1,
            truncated_class: self.truncated_class.mul(&fiber).expect("finite class"),
        }
    }
}

/// Measure of a level-n cylinder: `[class] * L^(-n(p-1))`.
pub fn cylinder_measure_g(c: &CylinderG) -> MotivicValue {
    let shift = MotivicValue::lefschetz_pow(-c.level * (c.prime as i64 - 1));
    c.truncated_class.mul(&shift).expect("finite class")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_count_coprime_slots() {
        // oracle: count i in 1..=j with p not dividing i
        let count = |p: u64, j: u64| (1..=j).filter(|i| i % p != 0).count() as u64;
        assert_eq!(dim_delta_h_geq(3, 4), 3);
        assert_eq!(dim_delta_h_geq(2, 5), 3);
        for p in [2u32, 3, 5, 7] {
            for j in 1..=60 {
                assert_eq!(dim_delta_h_geq(p, j), count(p as u64, j));
            }
        }
        assert_eq!(dim_delta_h_geq(11, 1), 1);
    }

    #[test]
    fn stratum_classes() {
        let zero = StratumH::zero(3).unwrap();
        assert!(stratum_class_h(&zero).equals(&MotivicValue::one()));
        let s = StratumH::new(3, 4).unwrap();
        // (L-1) * L^2
        assert!(stratum_class_h(&s).equals(&MotivicValue::from_terms(&[(3, 1), (2, -1)])));
        let s = StratumH::new(2, 1).unwrap();
        assert!(stratum_class_h(&s).equals(&MotivicValue::from_terms(&[(1, 1), (0, -1)])));
    }

    #[test]
    fn stratum_rejects_multiples_of_p() {
        assert_eq!(StratumH::new(3, 6), Err(ModuliError::InvalidStratum(6, 3)));
        assert_eq!(StratumH::new(3, 0), Err(ModuliError::InvalidStratum(0, 3)));
        assert!(StratumH::new(4, 1).is_err());
    }

    #[test]
    fn measure_of_nonnegative_locus_is_one() {
        // level 0, class a single point
        let c = CylinderG::new(3, 0, MotivicValue::one()).unwrap();
        assert!(cylinder_measure_g(&c).equals(&MotivicValue::one()));
        // full fiber over a point at level 1
        let c = CylinderG::new(3, 1, MotivicValue::lefschetz_pow(2)).unwrap();
        assert!(cylinder_measure_g(&c).equals(&MotivicValue::one()));
    }

    #[test]
    fn measure_is_level_stable() {
        // level 2 cylinder over the j=1 stratum at p=2: class (L-1)*L^2
        let class = MotivicValue::from_terms(&[(3, 1), (2, -1)]);
        let c = CylinderG::new(2, 2, class).unwrap();
        let expected = MotivicValue::from_terms(&[(1, 1), (0, -1)]);
        assert!(cylinder_measure_g(&c).equals(&expected));
        assert!(cylinder_measure_g(&c.refine()).equals(&expected));
        assert!(cylinder_measure_g(&c.refine().refine()).equals(&expected));
    }

    #[test]
    fn torsor_constraints() {
        assert!(TorsorClass::new(GroupKind::H, 3, Order::Finite(-4)).is_ok());
        assert!(TorsorClass::new(GroupKind::H, 3, Order::Finite(2)).is_err());
        assert!(TorsorClass::new(GroupKind::H, 3, Order::Finite(-3)).is_err());
        assert!(TorsorClass::new(GroupKind::G, 3, Order::Finite(2)).is_ok());
        assert!(TorsorClass::new(GroupKind::G, 3, Order::Infinite).is_ok());
    }

    #[test]
    fn presentations() {
        let t = TorsorClass::new(GroupKind::G, 3, Order::Finite(-1)).unwrap();
        assert_eq!(
            torsor_presentation(&t),
            "k((t))[z]/(z^3 - f), f with ord(f) = -1, action z -> z + eps"
        );
        let t = TorsorClass::new(GroupKind::H, 2, Order::Infinite).unwrap();
        assert_eq!(
            torsor_presentation(&t),
            "k((t))[z]/(z^2 - z), f = 0 (trivial torsor), action z -> z + 1"
        );
        let t = TorsorClass::new(GroupKind::G, 5, Order::Infinite).unwrap();
        assert!(torsor_presentation(&t).contains("k[[t]][z]/(z^5)"));
    }
}
