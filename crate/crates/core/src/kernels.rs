//! Coagulation/fragmentation kernels and their detailed-balance structure.
//!
//! A kernel is the triple (a_i, C(i,j), F(i,j)): per-size weights, the rate
//! at which an unordered pair of clusters of sizes i and j merges, and the
//! rate at which a cluster of size i+j splits into (i, j). Detailed balance,
//!
//! ```text
//! C(i,j) · a_i · a_j = F(i,j) · a_{i+j},
//! ```
//!
//! is what makes the product-form conditional distribution over
//! configurations exact, so every built-in family is constructed to satisfy
//! it identically in rational arithmetic.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;

/// Built-in kernel families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// a_i = a, C = 1, F = a.
    Constant,
    /// Constant weights truncated at a maximum cluster size M.
    Bounded,
    /// a_i = a·i, C = 1, F = a·ij/(i+j).
    Linear,
    /// Explicit per-size weight and rate tables.
    Tabulated,
}

/// Explicit rate tables for the tabulated family. `a[i-1]` is the weight of
/// size i; `c[i-1][j-1]` and `f[i-1][j-1]` are the symmetric coagulation and
/// fragmentation rates for the size pair (i, j).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelTables {
    pub a: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
}

/// Serializable kernel configuration. This is the single kernel surface of
/// the CLI: `{"family": "...", "a": 1.0, "M": 4, "tables": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<KernelTables>,
}

#[derive(Clone, Debug)]
enum Kind {
    Constant {
        a: BigRational,
    },
    Bounded {
        a: BigRational,
        m: usize,
    },
    Linear {
        a: BigRational,
    },
    Tabulated {
        a: Vec<BigRational>,
        c: Vec<Vec<BigRational>>,
        f: Vec<Vec<BigRational>>,
    },
}

/// An immutable kernel. Rational values are authoritative; the f64 accessors
/// are derived views. Rates are evaluated lazily — consumers that hammer
/// them (jump chains, the simulator) build their own memo tables.
#[derive(Clone, Debug)]
pub struct Kernel {
    kind: Kind,
}

fn require_non_negative(a: &BigRational, what: &str) -> Result<()> {
    // a = 0 is allowed: it is the frozen-fragmentation endpoint the
    // simulator must be able to reach. Negative rates are not.
    if a.is_negative() {
        return Err(Error::InvalidArgument(format!("{what} must be non-negative")));
    }
    Ok(())
}

impl Kernel {
    pub fn constant(a: BigRational) -> Result<Self> {
        require_non_negative(&a, "constant kernel parameter a")?;
        Ok(Kernel {
            kind: Kind::Constant { a },
        })
    }

    pub fn bounded(a: BigRational, m: usize) -> Result<Self> {
        require_non_negative(&a, "bounded kernel parameter a")?;
        if m == 0 {
            return Err(Error::InvalidArgument(
                "bounded kernel requires max size M >= 1".into(),
            ));
        }
        Ok(Kernel {
            kind: Kind::Bounded { a, m },
        })
    }

    pub fn linear(a: BigRational) -> Result<Self> {
        require_non_negative(&a, "linear kernel parameter a")?;
        Ok(Kernel {
            kind: Kind::Linear { a },
        })
    }

    /// Builds a tabulated kernel from complete symmetric rate tables.
    pub fn tabulated(
        a: Vec<BigRational>,
        c: Vec<Vec<BigRational>>,
        f: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidArgument("tabulated kernel has empty weight list".into()));
        }
        for (label, t) in [("C", &c), ("F", &f)] {
            if t.len() != n || t.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidArgument(format!(
                    "tabulated kernel table {label} must be {n}x{n}"
                )));
            }
            for i in 0..n {
                for j in 0..n {
                    if t[i][j].is_negative() {
                        return Err(Error::InvalidArgument(format!(
                            "tabulated kernel table {label} has a negative entry at ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                    if t[i][j] != t[j][i] {
                        return Err(Error::InvalidArgument(format!(
                            "tabulated kernel table {label} is not symmetric at ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        for w in &a {
            if w.is_negative() {
                return Err(Error::InvalidArgument(
                    "tabulated kernel weights must be non-negative".into(),
                ));
            }
        }
        // F(i,j) must vanish when the merged size has zero weight: such a
        // cluster can never exist, so it cannot fragment.
        for i in 1..=n {
            for j in 1..=n {
                let merged_weight_zero = i + j > n || a[i + j - 1].is_zero();
                if merged_weight_zero && !f[i - 1][j - 1].is_zero() {
                    return Err(Error::InvalidArgument(format!(
                        "tabulated kernel has F({i},{j}) > 0 but zero weight for size {}",
                        i + j
                    )));
                }
            }
        }
        Ok(Kernel {
            kind: Kind::Tabulated { a, c, f },
        })
    }

    pub fn family(&self) -> KernelFamily {
        match self.kind {
            Kind::Constant { .. } => KernelFamily::Constant,
            Kind::Bounded { .. } => KernelFamily::Bounded,
            Kind::Linear { .. } => KernelFamily::Linear,
            Kind::Tabulated { .. } => KernelFamily::Tabulated,
        }
    }

    /// Maximum cluster size with non-zero weight, when bounded.
    pub fn max_size(&self) -> Option<usize> {
        match &self.kind {
            Kind::Bounded { m, .. } => Some(*m),
            Kind::Tabulated { a, .. } => Some(a.len()),
            _ => None,
        }
    }

    /// True when C(i,j) = 1 on every reachable pair with no size bound, the
    /// case where the pair-formation rate has the closed form K(K-1)/2.
    pub fn unit_coagulation_unbounded(&self) -> bool {
        matches!(self.kind, Kind::Constant { .. } | Kind::Linear { .. })
    }

    /// Detailed-balance weight a_i.
    pub fn weight_rat(&self, i: usize) -> BigRational {
        if i == 0 {
            return BigRational::zero();
        }
        match &self.kind {
            Kind::Constant { a } => a.clone(),
            Kind::Bounded { a, m } => {
                if i <= *m {
                    a.clone()
                } else {
                    BigRational::zero()
                }
            }
            Kind::Linear { a } => a * BigRational::from_integer(i.into()),
            Kind::Tabulated { a, .. } => a.get(i - 1).cloned().unwrap_or_else(BigRational::zero),
        }
    }

    /// Coagulation rate C(i,j) of an unordered pair of clusters.
    pub fn coag_rat(&self, i: usize, j: usize) -> BigRational {
        if i == 0 || j == 0 {
            return BigRational::zero();
        }
        match &self.kind {
            Kind::Constant { .. } | Kind::Linear { .. } => BigRational::one(),
            Kind::Bounded { m, .. } => {
                if i + j <= *m {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            Kind::Tabulated { c, .. } => c
                .get(i - 1)
                .and_then(|row| row.get(j - 1))
                .cloned()
                .unwrap_or_else(BigRational::zero),
        }
    }

    /// Fragmentation rate F(i,j) of a cluster of size i+j into (i, j).
    pub fn frag_rat(&self, i: usize, j: usize) -> BigRational {
        if i == 0 || j == 0 {
            return BigRational::zero();
        }
        match &self.kind {
            Kind::Constant { a } => a.clone(),
            Kind::Bounded { a, m } => {
                if i + j <= *m {
                    a.clone()
                } else {
                    BigRational::zero()
                }
            }
            Kind::Linear { a } => {
                // F = a·ij/(i+j)
                a * BigRational::new((i * j).into(), (i + j).into())
            }
            Kind::Tabulated { f, .. } => f
                .get(i - 1)
                .and_then(|row| row.get(j - 1))
                .cloned()
                .unwrap_or_else(BigRational::zero),
        }
    }

    /// Total dissociation rate d(n) = Σ_{i=1}^{n-1} F(i, n-i); d(1) = 0.
    pub fn dissociation_rat(&self, n: usize) -> BigRational {
        let mut total = BigRational::zero();
        for i in 1..n {
            total += self.frag_rat(i, n - i);
        }
        total
    }

    pub fn weight(&self, i: usize) -> f64 {
        rational_to_f64(&self.weight_rat(i))
    }

    pub fn coag(&self, i: usize, j: usize) -> f64 {
        rational_to_f64(&self.coag_rat(i, j))
    }

    pub fn frag(&self, i: usize, j: usize) -> f64 {
        rational_to_f64(&self.frag_rat(i, j))
    }

    pub fn dissociation(&self, n: usize) -> f64 {
        rational_to_f64(&self.dissociation_rat(n))
    }

    /// Weight a_i in the requested numeric backend.
    pub fn weight_w<W: crate::numeric::Weight>(&self, i: usize) -> W {
        W::from_rational(&self.weight_rat(i))
    }

    /// Canonical spec for manifests and hashing. Tabulated entries are
    /// rendered through f64, matching how they entered.
    pub fn spec(&self) -> KernelSpec {
        match &self.kind {
            Kind::Constant { a } => KernelSpec {
                family: KernelFamily::Constant,
                a: Some(rational_to_f64(a)),
                max_size: None,
                tables: None,
            },
            Kind::Bounded { a, m } => KernelSpec {
                family: KernelFamily::Bounded,
                a: Some(rational_to_f64(a)),
                max_size: Some(*m),
                tables: None,
            },
            Kind::Linear { a } => KernelSpec {
                family: KernelFamily::Linear,
                a: Some(rational_to_f64(a)),
                max_size: None,
                tables: None,
            },
            Kind::Tabulated { a, c, f } => KernelSpec {
                family: KernelFamily::Tabulated,
                a: None,
                max_size: None,
                tables: Some(KernelTables {
                    a: a.iter().map(rational_to_f64).collect(),
                    c: c.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect(),
                    f: f.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect(),
                }),
            },
        }
    }
}

fn rational_from_f64(x: f64, what: &str) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("{what} is not finite")));
    }
    Ok(BigRational::from_float(x).expect("finite"))
}

/// Builds a kernel from its serialized spec.
pub fn build_kernel(spec: &KernelSpec) -> Result<Kernel> {
    match spec.family {
        KernelFamily::Constant | KernelFamily::Bounded | KernelFamily::Linear => {
            let a = spec
                .a
                .ok_or_else(|| Error::InvalidArgument("kernel spec is missing parameter a".into()))?;
            let a = rational_from_f64(a, "kernel parameter a")?;
            match spec.family {
                KernelFamily::Constant => Kernel::constant(a),
                KernelFamily::Linear => Kernel::linear(a),
                KernelFamily::Bounded => {
                    let m = spec.max_size.ok_or_else(|| {
                        Error::InvalidArgument("bounded kernel spec requires M".into())
                    })?;
                    Kernel::bounded(a, m)
                }
                KernelFamily::Tabulated => unreachable!(),
            }
        }
        KernelFamily::Tabulated => {
            let tables = spec.tables.as_ref().ok_or_else(|| {
                Error::InvalidArgument("tabulated kernel spec requires tables".into())
            })?;
            let conv_vec = |v: &[f64], what: &str| -> Result<Vec<BigRational>> {
                v.iter().map(|&x| rational_from_f64(x, what)).collect()
            };
            let conv_mat = |m: &[Vec<f64>], what: &str| -> Result<Vec<Vec<BigRational>>> {
                m.iter().map(|row| conv_vec(row, what)).collect()
            };
            Kernel::tabulated(
                conv_vec(&tables.a, "tabulated weight")?,
                conv_mat(&tables.c, "tabulated C entry")?,
                conv_mat(&tables.f, "tabulated F entry")?,
            )
        }
    }
}

/// Default relative tolerance for floating-mode balance checks (the
/// double-precision roundoff ceiling); exact mode expects zero.
pub const DEFAULT_BALANCE_TOLERANCE: f64 = 1e-12;

/// Outcome of a detailed-balance scan.
#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    /// Worst relative violation |C·a_i·a_j - F·a_{i+j}| / max(1, |F·a_{i+j}|).
    pub max_violation: f64,
    /// Pair (i, j) attaining the worst violation, when any violation exists.
    pub worst_pair: Option<(usize, usize)>,
    pub tolerance: f64,
    pub passed: bool,
    /// True when every residual is exactly zero in rational arithmetic.
    pub exact_zero: bool,
}

/// Scans all pairs 1 <= i <= j with i + j <= n for detailed-balance
/// violations. Residuals are computed in exact rational arithmetic, so a
/// kernel that satisfies the condition identically reports exactly zero.
pub fn verify_detailed_balance(kernel: &Kernel, n: usize, tol: f64) -> Result<BalanceReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("detailed-balance check needs N >= 2".into()));
    }
    let one = BigRational::one();
    let mut worst = BigRational::zero();
    let mut worst_pair = None;
    for i in 1..=n {
        for j in i..=n {
            if i + j > n {
                break;
            }
            let lhs = kernel.coag_rat(i, j) * kernel.weight_rat(i) * kernel.weight_rat(j);
            let rhs = kernel.frag_rat(i, j) * kernel.weight_rat(i + j);
            let scale = if rhs.abs() > one { rhs.abs() } else { one.clone() };
            let violation = (lhs - rhs).abs() / scale;
            if violation > worst {
                worst = violation;
                worst_pair = Some((i, j));
            }
        }
    }
    let exact_zero = worst.is_zero();
    let max_violation = rational_to_f64(&worst);
    Ok(BalanceReport {
        max_violation,
        worst_pair: if exact_zero { None } else { worst_pair },
        tolerance: tol,
        passed: max_violation <= tol,
        exact_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn constant_family_rates() {
        let k = Kernel::constant(rat(1, 1)).unwrap();
        assert_eq!(k.frag(3, 5), 1.0);
        assert_eq!(k.coag(3, 5), 1.0);
        assert_eq!(k.weight(8), 1.0);
    }

    #[test]
    fn linear_family_rates() {
        let k = Kernel::linear(rat(2, 1)).unwrap();
        assert_eq!(k.frag_rat(2, 3), rat(12, 5)); // 2 · 6/5
        assert_eq!(k.weight(5), 10.0);
    }

    #[test]
    fn bounded_family_cuts_off_merges() {
        let k = Kernel::bounded(rat(1, 1), 4).unwrap();
        assert_eq!(k.coag(3, 2), 0.0);
        assert_eq!(k.coag(2, 2), 1.0);
        assert_eq!(k.weight(5), 0.0);
        assert_eq!(k.frag(4, 1), 0.0);
    }

    #[test]
    fn dissociation_totals() {
        let a = rat(3, 4);
        let constant = Kernel::constant(a.clone()).unwrap();
        for n in 1..=40 {
            assert_eq!(
                constant.dissociation_rat(n),
                &a * BigRational::from_integer((n as i64 - 1).into())
            );
        }
        let linear = Kernel::linear(rat(5, 3)).unwrap();
        for n in 1..=200usize {
            // Closed form a(n²-1)/6 against the defining sum.
            let expected = rat(5, 3) * BigRational::new(((n * n - 1) as i64).into(), 6.into());
            assert_eq!(linear.dissociation_rat(n), expected, "n = {n}");
        }
        assert!(constant.dissociation_rat(1).is_zero());
    }

    #[test]
    fn brute_force_split_sum_matches_for_all_families() {
        let kernels = [
            Kernel::constant(rat(2, 7)).unwrap(),
            Kernel::linear(rat(1, 3)).unwrap(),
            Kernel::bounded(rat(1, 2), 9).unwrap(),
        ];
        for k in &kernels {
            for n in 1..=60 {
                let mut sum = BigRational::zero();
                for i in 1..n {
                    sum += k.frag_rat(i, n - i);
                }
                assert_eq!(sum, k.dissociation_rat(n));
            }
        }
    }

    #[test]
    fn detailed_balance_exact_for_builtin_families() {
        for k in [
            Kernel::constant(rat(1, 2)).unwrap(),
            Kernel::linear(rat(1, 1)).unwrap(),
            Kernel::bounded(rat(7, 5), 11).unwrap(),
        ] {
            let report = verify_detailed_balance(&k, 40, 0.0).unwrap();
            assert!(report.exact_zero, "{:?}", k.family());
            assert_eq!(report.max_violation, 0.0);
            assert!(report.passed);
        }
    }

    #[test]
    fn perturbed_tabulated_kernel_is_flagged() {
        let n = 4;
        let base = Kernel::bounded(rat(1, 1), n).unwrap();
        let a: Vec<_> = (1..=n).map(|i| base.weight_rat(i)).collect();
        let c: Vec<Vec<_>> = (1..=n)
            .map(|i| (1..=n).map(|j| base.coag_rat(i, j)).collect())
            .collect();
        let mut f: Vec<Vec<_>> = (1..=n)
            .map(|i| (1..=n).map(|j| base.frag_rat(i, j)).collect())
            .collect();
        f[0][0] = &f[0][0] * rat(11, 10); // +10% on F(1,1)
        let k = Kernel::tabulated(a, c, f).unwrap();
        let report = verify_detailed_balance(&k, n, 1e-12).unwrap();
        assert!(!report.passed);
        assert_eq!(report.worst_pair, Some((1, 1)));
        // |1 - 11/10| relative to max(1, 11/10): exactly 1/11 ≈ 0.09.
        assert!((report.max_violation - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn bounded_with_m_equal_n_matches_constant() {
        let n = 12;
        let a = rat(3, 2);
        let constant = Kernel::constant(a.clone()).unwrap();
        let bounded = Kernel::bounded(a, n).unwrap();
        for i in 1..=n {
            assert_eq!(constant.weight_rat(i), bounded.weight_rat(i));
            for j in 1..=n - i {
                assert_eq!(constant.coag_rat(i, j), bounded.coag_rat(i, j));
                assert_eq!(constant.frag_rat(i, j), bounded.frag_rat(i, j));
            }
        }
    }

    #[test]
    fn build_kernel_validates_specs() {
        let missing_m = KernelSpec {
            family: KernelFamily::Bounded,
            a: Some(1.0),
            max_size: None,
            tables: None,
        };
        assert!(build_kernel(&missing_m).is_err());

        let negative = KernelSpec {
            family: KernelFamily::Constant,
            a: Some(-1.0),
            max_size: None,
            tables: None,
        };
        assert!(build_kernel(&negative).is_err());

        let json = r#"{"family":"bounded","a":0.5,"M":4}"#;
        let spec: KernelSpec = serde_json::from_str(json).unwrap();
        let k = build_kernel(&spec).unwrap();
        assert_eq!(k.family(), KernelFamily::Bounded);
        assert_eq!(k.max_size(), Some(4));

        let bad_tables = KernelSpec {
            family: KernelFamily::Tabulated,
            a: None,
            max_size: None,
            tables: Some(KernelTables {
                a: vec![1.0, 1.0],
                c: vec![vec![1.0, 1.0]], // wrong shape
                f: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            }),
        };
        assert!(build_kernel(&bad_tables).is_err());
    }

    #[test]
    fn zero_rate_kernel_is_allowed_as_frozen_endpoint() {
        let k = Kernel::bounded(rat(0, 1), 4).unwrap();
        assert_eq!(k.frag(1, 1), 0.0);
        assert_eq!(k.coag(2, 2), 1.0);
    }
}
