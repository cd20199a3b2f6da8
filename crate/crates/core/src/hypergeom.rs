//! Closed-form analytics for the constant kernel in terms of terminating
//! Kummer functions.
//!
//! Everything reduces to ₁F₁(-m; b; z) with m a non-negative integer, a
//! finite sum of m+1 terms. At z = -2a < 0 every term of the sum is
//! positive, so the only numerical hazard is overflow, handled by summing
//! in log space. The central ratio is
//!
//! ```text
//! G_n(a, N) = ₁F₁(-N+1+n; 2+n; -2a) / ₁F₁(-N+1; 2; -2a),
//! ```
//!
//! which equals the colocalization probability ⟨P₂⟩ for n = 1 and feeds the
//! cluster-count moments μ_n and the per-size means.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::ClusterCountDistribution;
use crate::numeric::{log_add_exp, CompensatedSum, LogFloat, Weight};

/// A terminating Kummer evaluation together with its parameters.
#[derive(Clone, Copy, Debug)]
pub struct KummerValue {
    /// Series terminates after m+1 terms (first parameter is -m).
    pub m: usize,
    pub b: usize,
    pub z: f64,
    pub value: f64,
}

/// ₁F₁(-m; b; z) as an exact finite sum with compensated accumulation.
pub fn kummer_terminating(m: usize, b: usize, z: f64) -> f64 {
    assert!(b >= 1, "b must be a positive integer");
    let mut term = 1.0f64;
    let mut acc = CompensatedSum::new();
    acc.add(term);
    for k in 0..m {
        // t_{k+1}/t_k = (-m+k) z / ((b+k)(k+1))
        term *= (k as f64 - m as f64) * z / ((b + k) as f64 * (k + 1) as f64);
        acc.add(term);
    }
    acc.total()
}

/// [`kummer_terminating`] packaged with its parameters.
pub fn kummer_value(m: usize, b: usize, z: f64) -> KummerValue {
    KummerValue {
        m,
        b,
        z,
        value: kummer_terminating(m, b, z),
    }
}

/// Exact rational evaluation of ₁F₁(-m; b; z).
pub fn kummer_terminating_rational(m: usize, b: usize, z: &BigRational) -> BigRational {
    let mut term = BigRational::one();
    let mut acc = BigRational::one();
    for k in 0..m {
        let num = BigRational::from_integer(BigInt::from(k as i64 - m as i64)) * z;
        let den = BigRational::from_integer(BigInt::from(((b + k) * (k + 1)) as u64));
        term = term * num / den;
        acc += &term;
    }
    acc
}

/// ln ₁F₁(-m; b; -x) for x >= 0, where all series terms are positive.
fn ln_kummer_neg(m: usize, b: usize, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let mut ln_term = 0.0f64;
    let mut acc = 0.0f64; // ln of running sum; first term is 1
    for k in 0..m {
        // t_{k+1}/t_k = (m-k) x / ((b+k)(k+1)), positive.
        ln_term += ((m - k) as f64 * x).ln() - (((b + k) * (k + 1)) as f64).ln();
        acc = log_add_exp(acc, ln_term);
    }
    acc
}

/// Evaluation routes for G_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GMethod {
    /// Ratio of the two terminating sums. The reference route.
    Exact,
    /// Large-N approximation G̃_n = (n+1)!/(2aN)^{n/2} · exp(-n√(a/2N)).
    Asymptotic,
    /// Finite continued fraction, n = 1 only.
    ContinuedFraction,
    /// Small-a cubic expansion, n = 1 only.
    Taylor,
}

/// A G_n evaluation: `order` is the subscript n, `n` the particle count N.
#[derive(Clone, Copy, Debug)]
pub struct GValue {
    pub order: usize,
    pub a: f64,
    pub n: usize,
    pub value: f64,
    pub method: GMethod,
}

fn check_g_args(order: usize, a: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("G_n needs N >= 2".into()));
    }
    if order == 0 || order > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "G_n order must satisfy 1 <= n <= N-1, got n = {order}, N = {n}"
        )));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("G_n needs a > 0".into()));
    }
    Ok(())
}

/// ln G_n by the exact route.
fn ln_g_exact(order: usize, a: f64, n: usize) -> f64 {
    ln_kummer_neg(n - 1 - order, 2 + order, 2.0 * a) - ln_kummer_neg(n - 1, 2, 2.0 * a)
}

/// Continued-fraction level coefficients: f_m = num_m / T_{m+1} with
/// triangular denominators T_{m+1} = (m+1)(m+2)/2 and numerators
/// alternating N + (m+1)/2 (m odd) and N - 1 - m/2 (m even). The fraction
/// terminates at depth 2N-3, where the next coefficient vanishes.
fn cf_coefficient(level: usize, n: usize) -> f64 {
    let numerator = if level % 2 == 1 {
        (n + (level + 1) / 2) as f64
    } else {
        (n - 1 - level / 2) as f64
    };
    let denominator = ((level + 1) * (level + 2) / 2) as f64;
    numerator / denominator
}

fn g1_continued_fraction(a: f64, n: usize) -> f64 {
    let depth = 2 * n - 3;
    let mut v = 1.0 + cf_coefficient(depth, n) * a;
    for level in (1..depth).rev() {
        v = 1.0 + cf_coefficient(level, n) * a / v;
    }
    1.0 / v
}

fn g1_taylor(a: f64, n: usize) -> f64 {
    // Expansion of the continued fraction through a³:
    // G₁ = 1 - f₁a + (f₁² + f₁f₂)a²
    //        - (f₁³ + 2f₁²f₂ + f₁f₂² + f₁f₂f₃)a³ + O(a⁴).
    let f1 = (n + 1) as f64 / 3.0;
    let f2 = (n as f64 - 2.0) / 6.0;
    let f3 = (n + 2) as f64 / 10.0;
    1.0 - f1 * a + (f1 * f1 + f1 * f2) * a * a
        - (f1 * f1 * f1 + 2.0 * f1 * f1 * f2 + f1 * f2 * f2 + f1 * f2 * f3) * a * a * a
}

/// G_n(a, N) by the requested method.
pub fn g_n(order: usize, a: f64, n: usize, method: GMethod) -> Result<GValue> {
    check_g_args(order, a, n)?;
    let value = match method {
        GMethod::Exact => ln_g_exact(order, a, n).exp(),
        GMethod::Asymptotic => {
            let mut fact = 1.0f64;
            for i in 2..=(order + 1) {
                fact *= i as f64;
            }
            fact / (2.0 * a * n as f64).powf(order as f64 / 2.0)
                * (-(order as f64) * (a / (2.0 * n as f64)).sqrt()).exp()
        }
        GMethod::ContinuedFraction => {
            if order != 1 {
                return Err(Error::InvalidArgument(
                    "continued-fraction evaluation is defined for G₁ only".into(),
                ));
            }
            g1_continued_fraction(a, n)
        }
        GMethod::Taylor => {
            if order != 1 {
                return Err(Error::InvalidArgument(
                    "the small-a expansion is defined for G₁ only".into(),
                ));
            }
            g1_taylor(a, n)
        }
    };
    Ok(GValue {
        order,
        a,
        n,
        value,
        method,
    })
}

/// Exact rational G_n for validation at small sizes.
pub fn g_n_rational(order: usize, a: &BigRational, n: usize) -> Result<BigRational> {
    if n < 2 || order == 0 || order > n - 1 {
        return Err(Error::InvalidArgument("requires N >= 2 and 1 <= n <= N-1".into()));
    }
    let z = BigRational::from_integer(BigInt::from(-2)) * a;
    let num = kummer_terminating_rational(n - 1 - order, 2 + order, &z);
    let den = kummer_terminating_rational(n - 1, 2, &z);
    if den.is_zero() {
        return Err(Error::DegenerateChain("denominator Kummer sum vanishes".into()));
    }
    Ok(num / den)
}

/// Cluster-count distribution of the constant kernel via the closed ladder
/// Π_{K+1}/Π_K = 2a(N-K)/(K(K+1)), in log space.
pub fn pi_constant(n: usize, a: f64) -> Result<ClusterCountDistribution<LogFloat>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("a must be positive".into()));
    }
    let mut ln_w = vec![0.0f64; n];
    for k in 1..n {
        let ratio = 2.0 * a * (n - k) as f64 / (k * (k + 1)) as f64;
        ln_w[k] = ln_w[k - 1] + ratio.ln();
    }
    let ln_total = ln_w.iter().copied().fold(f64::NEG_INFINITY, log_add_exp);
    let pi = ln_w
        .into_iter()
        .map(|lw| LogFloat::from_ln(lw - ln_total))
        .collect();
    ClusterCountDistribution::from_probabilities(pi)
}

/// Stirling-style coefficients α_k^n of the moment expansion
/// μ_n = Σ_k α_k^n (N-1)!/((k+1)!(N-1-k)!) (2a)^k G_k, produced by the
/// parity-split factorial sum
///
/// ```text
/// α_k^n = Σ_{j=0}^{⌊k/2⌋} (-1)^j w_j ((k+1-j)^n ± (j+1)^n) / (j!(k-j)!),
/// ```
///
/// with `+` and a half-weight middle term (w_{k/2} = 1/2) for even k, `-`
/// and unit weights for odd k. The boundary values are α_0^n = α_n^n = 1.
pub fn alpha_coefficients(n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = BigRational::zero();
        let even = k % 2 == 0;
        for j in 0..=(k / 2) {
            let lead = BigInt::from(k + 1 - j).pow(n as u32);
            let tail = BigInt::from(j + 1).pow(n as u32);
            let combined = if even { lead + tail } else { lead - tail };
            let mut term = BigRational::new(
                combined,
                crate::numeric::factorial(j) * crate::numeric::factorial(k - j),
            );
            if even && j == k / 2 {
                term /= BigRational::from_integer(2.into());
            }
            if j % 2 == 1 {
                term = -term;
            }
            acc += term;
        }
        debug_assert!(acc.is_integer(), "α_{k}^{n} is not an integer: {acc}");
        out.push(acc.to_integer());
    }
    out
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// n-th moment μ_n = Σ_K K^n Π_K of the cluster count, constant kernel.
///
/// n = 1 uses the closed form μ₁ = 1 + a(N-1)G₁; higher orders use the
/// α-coefficient expansion over G_k.
pub fn mu_n(order: usize, a: f64, n: usize) -> Result<f64> {
    if order == 0 {
        return Ok(1.0);
    }
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if n == 1 {
        return Ok(1.0);
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("a must be positive".into()));
    }
    if order == 1 {
        return Ok(1.0 + a * (n - 1) as f64 * ln_g_exact(1, a, n).exp());
    }
    let alphas = alpha_coefficients(order);
    let ln_nm1_fact = ln_factorial(n - 1);
    let mut acc = f64::NEG_INFINITY;
    for (k, alpha) in alphas.iter().enumerate().take(n) {
        debug_assert!(alpha.sign() != Sign::Minus);
        let ln_alpha = crate::numeric::ln_big(alpha);
        let ln_g = if k == 0 { 0.0 } else { ln_g_exact(k, a, n) };
        let ln_term = ln_alpha
            + k as f64 * (2.0 * a).ln()
            + ln_nm1_fact
            - ln_factorial(k + 1)
            - ln_factorial(n - 1 - k)
            + ln_g;
        acc = log_add_exp(acc, ln_term);
    }
    Ok(acc.exp())
}

/// Large-N approximation μ₁ ≈ 1 + √(2aN) exp(-√(a/2N)).
pub fn mu1_asymptotic(a: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("a must be positive".into()));
    }
    Ok(1.0 + (2.0 * a * n as f64).sqrt() * (-(a / (2.0 * n as f64)).sqrt()).exp())
}

/// Closed-form variance of the cluster count,
/// a(N-1)G₁ + (2/3)a²(N-1)(N-2)G₂ - a²(N-1)²G₁².
pub fn variance_constant(a: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    let nf = (n - 1) as f64;
    let g1 = ln_g_exact(1, a, n).exp();
    let g2 = if n >= 3 { ln_g_exact(2, a, n).exp() } else { 0.0 };
    Ok(a * nf * g1 + 2.0 / 3.0 * a * a * nf * (n as f64 - 2.0) * g2 - a * a * nf * nf * g1 * g1)
}

/// Mean number of clusters of size `size` for the constant kernel:
/// 2a·₁F₁(-N+1+n;2;-2a)/₁F₁(-N+1;2;-2a) for n < N, and Π₁ for n = N.
pub fn mean_counts_constant(size: usize, a: f64, n: usize) -> Result<f64> {
    if size == 0 || size > n {
        return Err(Error::InvalidArgument(format!("size must be in 1..={n}")));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("a must be positive".into()));
    }
    let ln_den = ln_kummer_neg(n - 1, 2, 2.0 * a);
    if size == n {
        return Ok((-ln_den).exp());
    }
    Ok(2.0 * a * (ln_kummer_neg(n - 1 - size, 2, 2.0 * a) - ln_den).exp())
}

/// ⟨P₂⟩ for the constant kernel: G₁ exactly, or the large-N tail √(2/(aN)).
pub fn p2_constant(a: f64, n: usize, asymptotic: bool) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("⟨P₂⟩ requires N >= 2".into()));
    }
    if asymptotic {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument("a must be positive".into()));
        }
        return Ok((2.0 / (a * n as f64)).sqrt());
    }
    Ok(g_n(1, a, n, GMethod::Exact)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{compute_cnk, rate_schedule, steady_state_pi, CnkMethod};
    use crate::kernels::Kernel;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn kummer_small_cases() {
        assert_eq!(kummer_terminating(0, 3, 4.2), 1.0);
        for a in [0.3, 1.0, 7.0] {
            // m=1, b=2, z=-2a → 1 + a
            assert!((kummer_terminating(1, 2, -2.0 * a) - (1.0 + a)).abs() < 1e-14);
        }
        // m=2, b=2, z=-2 → 11/3
        assert!((kummer_terminating(2, 2, -2.0) - 11.0 / 3.0).abs() < 1e-14);
        assert_eq!(
            kummer_terminating_rational(2, 2, &rat(-2, 1)),
            rat(11, 3)
        );
    }

    #[test]
    fn kummer_float_tracks_rational_widely() {
        // The operative domain is z = -2a <= 0, where the terms are all
        // positive. Positive z alternates: well-conditioned only while the
        // sum is not much smaller than its largest term, so the sweep keeps
        // m·z modest there.
        for m in [1usize, 5, 17, 40, 60] {
            for b in [1usize, 2, 5] {
                for z in [-200.0, -101.0, -13.5, -0.25, 0.2, 1.0 / (m as f64)] {
                    let exact = kummer_terminating_rational(
                        m,
                        b,
                        &BigRational::from_float(z).unwrap(),
                    );
                    let approx = kummer_terminating(m, b, z);
                    let reference = Weight::to_f64(&exact);
                    let scale = reference.abs().max(1e-300);
                    // Negative z has all-positive terms; positive z
                    // alternates and the error is condition-limited.
                    let tol = if z <= 0.0 { 1e-13 } else { 1e-9 };
                    assert!(
                        ((approx - reference) / scale).abs() < tol,
                        "m={m} b={b} z={z}: {approx} vs {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn ln_kummer_matches_direct_sum() {
        for (m, b, a) in [(4usize, 2usize, 0.7), (30, 3, 12.0), (59, 2, 50.0)] {
            let direct = kummer_terminating(m, b, -2.0 * a);
            let vialn = ln_kummer_neg(m, b, 2.0 * a).exp();
            assert!(((direct - vialn) / direct).abs() < 1e-12);
        }
    }

    #[test]
    fn g1_exact_examples() {
        for a in [0.2, 1.0, 3.0] {
            let g = g_n(1, a, 2, GMethod::Exact).unwrap().value;
            assert!((g - 1.0 / (1.0 + a)).abs() < 1e-14);
        }
        let g13 = g_n(1, 1.0, 3, GMethod::Exact).unwrap().value;
        assert!((g13 - 5.0 / 11.0).abs() < 1e-14);
        assert_eq!(g_n_rational(1, &rat(1, 1), 3).unwrap(), rat(5, 11));
    }

    #[test]
    fn g_argument_validation() {
        assert!(g_n(0, 1.0, 5, GMethod::Exact).is_err());
        assert!(g_n(5, 1.0, 5, GMethod::Exact).is_err());
        assert!(g_n(2, 1.0, 9, GMethod::ContinuedFraction).is_err());
        assert!(g_n(2, 1.0, 9, GMethod::Taylor).is_err());
    }

    #[test]
    fn asymptotic_g1_has_the_closed_form() {
        let a = 2.5;
        let n = 40;
        let g = g_n(1, a, n, GMethod::Asymptotic).unwrap().value;
        let expected = (2.0 / (a * n as f64)).sqrt() * (-(a / (2.0 * n as f64)).sqrt()).exp();
        assert!((g - expected).abs() < 1e-15);
    }

    #[test]
    fn continued_fraction_matches_exact() {
        for n in [2usize, 3, 5, 10, 40, 100] {
            for a in [0.01, 0.2, 0.5, 1.0] {
                let exact = g_n(1, a, n, GMethod::Exact).unwrap().value;
                let cf = g_n(1, a, n, GMethod::ContinuedFraction).unwrap().value;
                assert!(
                    ((exact - cf) / exact).abs() < 1e-10,
                    "N={n}, a={a}: {exact} vs {cf}"
                );
            }
        }
    }

    #[test]
    fn taylor_error_is_fourth_order() {
        for n in [5usize, 10, 20] {
            let bound = (n as f64).powi(4);
            for a in [0.01, 0.005, 0.0025, 0.001] {
                let exact = g_n(1, a, n, GMethod::Exact).unwrap().value;
                let taylor = g_n(1, a, n, GMethod::Taylor).unwrap().value;
                assert!(
                    (exact - taylor).abs() / a.powi(4) < bound,
                    "N={n}, a={a}"
                );
            }
        }
    }

    #[test]
    fn pi_constant_examples() {
        let pi = pi_constant(1, 2.0).unwrap();
        assert_eq!(pi.pi(1).to_f64(), 1.0);

        let pi = pi_constant(3, 1.0).unwrap();
        let expected = [3.0 / 11.0, 6.0 / 11.0, 2.0 / 11.0];
        for k in 1..=3 {
            assert!((pi.pi(k).to_f64() - expected[k - 1]).abs() < 1e-14);
        }

        for a in [0.5, 2.0] {
            let pi = pi_constant(2, a).unwrap();
            assert!((pi.pi(1).to_f64() - 1.0 / (1.0 + a)).abs() < 1e-14);
        }
    }

    #[test]
    fn pi_constant_matches_birth_death_solver() {
        for n in [2usize, 7, 20, 45, 60] {
            for a in [1e-3, 0.5, 5.0, 1e3] {
                let closed = pi_constant(n, a).unwrap();
                let kernel = Kernel::constant(BigRational::from_float(a).unwrap()).unwrap();
                let t = compute_cnk::<LogFloat>(&kernel, n, CnkMethod::Recurrence).unwrap();
                let solved = steady_state_pi(&rate_schedule(&kernel, &t).unwrap()).unwrap();
                for k in 1..=n {
                    let c = closed.pi(k).to_f64();
                    let s = solved.pi(k).to_f64();
                    let scale = c.abs().max(1e-300);
                    assert!(
                        ((c - s) / scale).abs() < 1e-12,
                        "N={n}, a={a}, K={k}: {c} vs {s}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_boundaries_and_oracles() {
        for n in 1..=8usize {
            let alphas = alpha_coefficients(n);
            assert_eq!(alphas[0], BigInt::from(1), "α_0^{n}");
            assert_eq!(alphas[n], BigInt::from(1), "α_{n}^{n}");
        }
        // Independent oracle 1: the triangular recurrence
        // α_k^{n+1} = (k+1)·α_k^n + α_{k-1}^n.
        for n in 1..=8usize {
            let prev = alpha_coefficients(n);
            let next = alpha_coefficients(n + 1);
            for k in 1..=n {
                let expected = BigInt::from(k as u32 + 1) * &prev[k] + &prev[k - 1];
                assert_eq!(next[k], expected, "n={n}, k={k}");
            }
        }
        // Independent oracle 2: apply H^n(f) = (d/dz · z)^n to monomials.
        // H^n(z^m) = (m+1)^n z^m while Σ_k α_k^n z^k D^k picks up falling
        // factorials, so Σ_k α_k^n · m!/(m-k)! must equal (m+1)^n.
        for n in 1..=6usize {
            let alphas = alpha_coefficients(n);
            for m in 0..=10usize {
                let mut acc = BigInt::from(0);
                for (k, alpha) in alphas.iter().enumerate().take(m + 1) {
                    let falling: BigInt =
                        crate::numeric::factorial(m) / crate::numeric::factorial(m - k);
                    acc += alpha * falling;
                }
                assert_eq!(acc, BigInt::from(m as u32 + 1).pow(n as u32), "n={n}, m={m}");
            }
        }
    }

    #[test]
    fn mu1_closed_form_and_cross_check() {
        let mu = mu_n(1, 1.0, 3).unwrap();
        assert!((mu - 21.0 / 11.0).abs() < 1e-14);
        for n in [2usize, 5, 17, 40, 60] {
            for a in [0.05, 0.7, 4.0] {
                let mu = mu_n(1, a, n).unwrap();
                let pi = pi_constant(n, a).unwrap();
                let direct: f64 = (1..=n).map(|k| k as f64 * pi.pi(k).to_f64()).sum();
                assert!(((mu - direct) / direct).abs() < 1e-12, "N={n}, a={a}");
            }
        }
    }

    #[test]
    fn higher_moments_cross_check() {
        for order in 2..=4usize {
            for n in [3usize, 8, 21, 40] {
                for a in [0.1, 1.0, 6.0] {
                    let mu = mu_n(order, a, n).unwrap();
                    let pi = pi_constant(n, a).unwrap();
                    let direct: f64 = (1..=n)
                        .map(|k| (k as f64).powi(order as i32) * pi.pi(k).to_f64())
                        .sum();
                    assert!(
                        ((mu - direct) / direct).abs() < 1e-10,
                        "order={order}, N={n}, a={a}: {mu} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn variance_closed_form_agrees_with_moments() {
        for n in [2usize, 3, 9, 30, 60] {
            for a in [0.05, 0.9, 8.0] {
                let var = variance_constant(a, n).unwrap();
                let mu1 = mu_n(1, a, n).unwrap();
                let mu2 = mu_n(2, a, n).unwrap();
                let direct = mu2 - mu1 * mu1;
                let scale = direct.abs().max(1e-12);
                assert!(
                    ((var - direct) / scale).abs() < 1e-10,
                    "N={n}, a={a}: {var} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn mu1_asymptotic_quality() {
        let exact = mu_n(1, 1.0, 1000).unwrap();
        let approx = mu1_asymptotic(1.0, 1000).unwrap();
        assert!(((exact - approx) / exact).abs() < 0.05);
        // → 1 as a → 0 with N fixed.
        assert!((mu1_asymptotic(1e-12, 50).unwrap() - 1.0).abs() < 1e-5);
        // Monotone increasing in N at fixed a.
        let mut last = mu1_asymptotic(1.0, 2).unwrap();
        for n in 3..=10_000usize {
            let next = mu1_asymptotic(1.0, n).unwrap();
            assert!(next >= last, "N = {n}");
            last = next;
        }
    }

    #[test]
    fn mean_counts_constant_examples() {
        for a in [0.4, 1.0, 2.5] {
            let m1 = mean_counts_constant(1, a, 2).unwrap();
            let m2 = mean_counts_constant(2, a, 2).unwrap();
            assert!((m1 - 2.0 * a / (1.0 + a)).abs() < 1e-14);
            assert!((m2 - 1.0 / (1.0 + a)).abs() < 1e-14);
            assert!((m1 + 2.0 * m2 - 2.0).abs() < 1e-14);
        }
        // Conservation Σ n⟨M_n⟩ = N.
        for n in [5usize, 12, 40] {
            for a in [0.05, 0.5, 5.0] {
                let total: f64 = (1..=n)
                    .map(|s| s as f64 * mean_counts_constant(s, a, n).unwrap())
                    .sum();
                assert!(
                    ((total - n as f64) / n as f64).abs() < 1e-10,
                    "N={n}, a={a}: {total}"
                );
            }
        }
    }

    #[test]
    fn mean_counts_are_pi1_ratios() {
        // ⟨M_n⟩ = 2a·Π₁(N)/Π₁(N-n) for n < N.
        let a = 0.8;
        let n = 12;
        for size in 1..n {
            let lhs = mean_counts_constant(size, a, n).unwrap();
            let pi_n = pi_constant(n, a).unwrap().pi(1).to_f64();
            let pi_rest = pi_constant(n - size, a).unwrap().pi(1).to_f64();
            assert!(((lhs - 2.0 * a * pi_n / pi_rest) / lhs).abs() < 1e-11, "size {size}");
        }
        // ⟨M_N⟩ = Π₁(N).
        let pi1 = pi_constant(n, a).unwrap().pi(1).to_f64();
        assert!((mean_counts_constant(n, a, n).unwrap() - pi1).abs() < 1e-14);
    }

    #[test]
    fn p2_constant_routes() {
        for a in [0.3, 1.0, 4.0] {
            assert!((p2_constant(a, 2, false).unwrap() - 1.0 / (1.0 + a)).abs() < 1e-14);
        }
        assert!((p2_constant(1.0, 3, false).unwrap() - 5.0 / 11.0).abs() < 1e-14);
        let tail = p2_constant(2.0, 500, true).unwrap();
        assert!((tail - (2.0_f64 / (2.0 * 500.0)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_error_structure() {
        // Relative error of G̃₁ at a = 1 decays with N once N is large, and
        // the signed error G₁ - G̃₁ changes sign in N at a = 10.
        let rel_err = |a: f64, n: usize| {
            let exact = g_n(1, a, n, GMethod::Exact).unwrap().value;
            let approx = g_n(1, a, n, GMethod::Asymptotic).unwrap().value;
            (exact - approx).abs() / exact
        };
        assert!(rel_err(1.0, 1000) < rel_err(1.0, 100));
        assert!(rel_err(1.0, 100) < 0.1);

        let signed = |n: usize| {
            let exact = g_n(1, 10.0, n, GMethod::Exact).unwrap().value;
            let approx = g_n(1, 10.0, n, GMethod::Asymptotic).unwrap().value;
            exact - approx
        };
        let mut saw_flip = false;
        let mut last = signed(2);
        for n in 3..=1000usize {
            let next = signed(n);
            if last.signum() != next.signum() {
                saw_flip = true;
            }
            last = next;
        }
        assert!(saw_flip, "signed error never changed sign at a = 10");
    }
}
