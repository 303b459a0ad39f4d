//! Two-sided Fisher exact test on a pair of boolean sequences.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{BenchError, ErrorKind, Outcome};

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The 2x2 counts `[[a, b], [c, d]]` where `a` counts positions true in
/// both sequences and rows follow `x`.
pub fn contingency(x: &[bool], y: &[bool]) -> [[u64; 2]; 2] {
    let mut t = [[0u64; 2]; 2];
    for (&a, &b) in x.iter().zip(y) {
        t[usize::from(!a)][usize::from(!b)] += 1;
    }
    t
}

/// Exact two-sided p-value for a 2x2 table: the total probability of all
/// tables with the same margins that are no more likely than the observed
/// one.
pub fn fisher_exact_table(t: [[u64; 2]; 2]) -> BigRational {
    let row1 = t[0][0] + t[0][1];
    let col1 = t[0][0] + t[1][0];
    let n = row1 + t[1][0] + t[1][1];
    let weight = |k: u64| binomial(row1, k) * binomial(n - row1, col1 - k);
    let observed = weight(t[0][0]);
    let lo = col1.saturating_sub(n - row1);
    let hi = row1.min(col1);
    let mut total = BigUint::zero();
    for k in lo..=hi {
        let w = weight(k);
        if w <= observed {
            total += w;
        }
    }
    BigRational::new(total.into(), binomial(n, col1).into())
}

pub fn fisher_exact(x: &[bool], y: &[bool]) -> Outcome<BigRational> {
    if x.len() != y.len() {
        return Err(BenchError::contract(
            "fisherTest",
            ErrorKind::LengthMismatch {
                expected: x.len(),
                actual: y.len(),
            },
        ));
    }
    if x.is_empty() {
        return Err(BenchError::contract("fisherTest", ErrorKind::EmptyInput));
    }
    Ok(fisher_exact_table(contingency(x, y)))
}

/// [`fisher_exact`] converted to a float at the very end.
pub fn fisher_test(x: &[bool], y: &[bool]) -> Outcome<f64> {
    let p = fisher_exact(x, y)?;
    Ok(p.to_f64().expect("p-values are finite"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn balanced_three_of_four() {
        let p = fisher_exact_table([[3, 1], [1, 3]]);
        assert_eq!(p, BigRational::new(BigInt::from(34), BigInt::from(70)));
    }

    #[test]
    fn constant_sequence_gives_one() {
        let p = fisher_test(&[true; 5], &[true, false, true, false, false]).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn most_likely_table_sums_everything_no_more_likely() {
        // Margins (2,2)/(2,2): weights 1, 4, 1 over 6.
        let p = fisher_exact_table([[1, 1], [1, 1]]);
        assert_eq!(p, BigRational::one());
        let p = fisher_exact_table([[2, 0], [0, 2]]);
        assert_eq!(p, BigRational::new(BigInt::from(2), BigInt::from(6)));
    }

    #[test]
    fn errors() {
        assert!(fisher_test(&[], &[]).is_err());
        assert!(fisher_test(&[true], &[true, false]).is_err());
    }
}
