//! Published closed forms for the linear-weight family in the plain
//! generating-function convention, kept as cross-references.
//!
//! These take the N-th coefficient of S(x)^K itself, without the 1/K! that
//! the conditional-distribution normalization carries, so they differ from
//! [`CnkTable`](super::table::CnkTable) entries by exactly K! (and the
//! derived mean by a factor K). They are retained to document that
//! relationship and are not used as oracles anywhere.

use num_rational::BigRational;
use crate::numeric::Weight as _;

use crate::numeric::binomial;

/// a^K · binom(N+K-1, N-K): the plain N-th coefficient of
/// (a x / (1-x)²)^K for 1 <= K <= N. Equals K! · C_{N,K} of the linear
/// kernel.
pub fn linear_cnk_plain(n: usize, k: usize, a: &BigRational) -> BigRational {
    assert!(k >= 1 && k <= n, "requires 1 <= K <= N");
    let mut pw = BigRational::one();
    for _ in 0..k {
        pw *= a;
    }
    pw * BigRational::from_integer(binomial(n + k - 1, n - k))
}

/// i · binom(N-i+K-2, N-K-i+1) / binom(N+K-1, N-K) for 2 <= K and
/// 1 <= i <= N-K+1: the mean cluster count of size i in the plain
/// convention. The self-consistent Theorem value is K times this.
pub fn linear_mean_plain(i: usize, n: usize, k: usize) -> BigRational {
    assert!(k >= 2 && i >= 1 && i + k <= n + 1, "requires 2 <= K, i <= N-K+1");
    BigRational::from_integer(num_bigint::BigInt::from(i) * binomial(n - i + k - 2, n + 1 - k - i))
        / BigRational::from_integer(binomial(n + k - 1, n - k))
}
