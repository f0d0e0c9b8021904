//! Closed-form count of commuting pairs of `d x d` matrices over GF(q):
//!
//! ```text
//! P(d) = q^(d^2) f(d) sum over partitions pi of d of q^k(pi) / (f(b_1) .. f(b_d))
//! f(t) = prod_{i=1..t} (1 - q^-i),  f(0) = 1
//! ```
//!
//! where `pi = 1^b_1 2^b_2 .. d^b_d` and `k(pi) = b_1 + .. + b_d`.

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::gf::prime_power;
use crate::rational::ExactRational;

/// A partition of `d` by multiplicities: `b[i-1]` parts of size `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionPowerNotation {
    pub b: Vec<u32>,
}

impl PartitionPowerNotation {
    /// Number of parts.
    pub fn k_pi(&self) -> u32 {
        self.b.iter().sum()
    }

    /// The partitioned integer, `sum i * b_i`.
    pub fn total(&self) -> u32 {
        self.b.iter().enumerate().map(|(i, &bi)| (i as u32 + 1) * bi).sum()
    }
}

/// All partitions of `d`, ascending lexicographically on `(b_1, .., b_d)`.
pub fn partitions(d: u32) -> Vec<PartitionPowerNotation> {
    fn rec(i: u32, d: u32, remaining: u32, b: &mut Vec<u32>, out: &mut Vec<PartitionPowerNotation>) {
        if i > d {
            if remaining == 0 {
                out.push(PartitionPowerNotation { b: b.clone() });
            }
            return;
        }
        for bi in 0..=remaining / i {
            b.push(bi);
            rec(i + 1, d, remaining - bi * i, b, out);
            b.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, d, d, &mut Vec::with_capacity(d as usize), &mut out);
    out
}

/// `f(t) = prod_{i=1..t} (1 - 1/q^i)`.
pub fn f(t: u32, q: u64) -> ExactRational {
    (1..=t)
        .map(|i| {
            let qi = BigInt::from(q).pow(i);
            ExactRational::new(&qi - 1, qi)
        })
        .fold(ExactRational::one(), |acc, x| acc * x)
}

/// `P(d)` evaluated exactly; fails if the sum is not a nonnegative integer.
pub fn feit_fine_pairs(d: u32, q: u64) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    if prime_power(q).is_none() {
        return Err(Error::InvalidInput(format!("{q} is not a prime power")));
    }
    let qr = |e: u32| ExactRational::from_integer(BigInt::from(q).pow(e));
    let sum: ExactRational = partitions(d)
        .iter()
        .map(|pi| {
            let den = pi.b.iter().fold(ExactRational::one(), |acc, &bi| acc * f(bi, q));
            qr(pi.k_pi()) / den
        })
        .sum();
    let p = qr(d * d) * f(d, q) * sum;
    if !p.is_integer() || p.numer().is_negative() {
        return Err(Error::Internal(format!("P({d}) at q={q} evaluated to {p}")));
    }
    Ok(p.numer().magnitude().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{commuting_pairs_matrix_algebra, Budget};
    use proptest::prelude::*;

    #[test]
    fn partition_lists() {
        assert_eq!(partitions(0), vec![PartitionPowerNotation { b: vec![] }]);
        assert_eq!(partitions(2), vec![PartitionPowerNotation { b: vec![0, 1] }, PartitionPowerNotation { b: vec![2, 0] }]);
        assert_eq!(partitions(5).len(), 7);
        let p10 = partitions(10);
        assert_eq!(p10.len(), 42);
        assert!(p10.windows(2).all(|w| w[0] < w[1]));
        assert!(p10.iter().all(|p| p.total() == 10));
    }

    #[test]
    fn f_values() {
        assert_eq!(f(0, 7), ExactRational::one());
        assert_eq!(f(1, 2).to_string(), "1/2");
        assert_eq!(f(2, 2).to_string(), "3/8");
    }

    #[test]
    fn pinned_values() {
        assert_eq!(feit_fine_pairs(2, 2).unwrap(), BigUint::from(88u32));
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            assert_eq!(feit_fine_pairs(1, q).unwrap(), BigUint::from(q * q));
        }
        for q in [2u64, 3, 4, 5] {
            assert_eq!(feit_fine_pairs(2, q).unwrap(), BigUint::from(q.pow(6) + q.pow(5) - q.pow(3)));
        }
        assert!(feit_fine_pairs(0, 2).is_err());
        assert!(feit_fine_pairs(2, 6).is_err());
    }

    #[test]
    fn matches_brute_force() {
        let b = Budget::default();
        for (d, q) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
            assert_eq!(feit_fine_pairs(d, q).unwrap(), commuting_pairs_matrix_algebra(d, q, &b).unwrap(), "d={d} q={q}");
        }
    }

    proptest! {
        #[test]
        fn always_integral(d in 1u32..7, qi in 0usize..6) {
            let q = [2u64, 3, 4, 5, 7, 9][qi];
            let p = feit_fine_pairs(d, q).unwrap();
            // Scalar pairs always commute, and at most every pair does.
            prop_assert!(p >= BigUint::from(q) * q);
            prop_assert!(p <= BigUint::from(q).pow(2 * d * d));
        }
    }
}
