//! Frequency-dependence diagnostics of the Lagrange scheme: diagonal
//! dominance of the Gram matrix with the Gershgorin eigenvalue floor, the
//! uniform coefficient bound, and the derivative stability scan.

use crate::analysis::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::kernel::{kernel_coefficients, profile_tail_threshold, KernelParams};
use crate::spline1d::{build_gram, interpolate, solve_lagrange, KnotSet};

/// Gershgorin diagnostics for one `(p, τ, ξ)`.
#[derive(Debug, Clone)]
pub struct DiagDominanceReport {
    /// Largest off-diagonal row sum of the Gram matrix.
    pub rho: f64,
    /// Gershgorin floor `c_0 − rho` (meaningful when dominant).
    pub bound: f64,
    /// `rho ≤ c_0 / 2`.
    pub dominant: bool,
    /// Smallest eigenvalue from the dense symmetric eigensolve.
    pub lambda_min: f64,
    /// Profile threshold: `ψ(u) ≤ c_0/(2N)` for all `u ≥ delta`.
    pub delta: f64,
    /// `delta / min_gap`: dominance is guaranteed for `|ξ| ≥ mu`.
    pub mu: f64,
}

pub fn diag_dominance_report(params: &KernelParams, knots: &KnotSet) -> DiagDominanceReport {
    let coeffs = kernel_coefficients(params.p).expect("validated order");
    let gram = build_gram(params, knots);
    let n = knots.len();
    let mut rho: f64 = 0.0;
    for j in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            if k != j {
                row += gram.entries[(j, k)];
            }
        }
        rho = rho.max(row);
    }
    let c0 = coeffs.c0_diag;
    let eigen = symmetric_eigenvalues(&gram.entries);
    let target = c0 / (2.0 * knots.intervals() as f64);
    let delta = profile_tail_threshold(&coeffs, target);
    DiagDominanceReport {
        rho,
        bound: c0 - rho,
        dominant: rho <= c0 / 2.0,
        lambda_min: eigen[0],
        delta,
        mu: delta / knots.min_gap(),
    }
}

/// One scanned supremum: `sup_t |L_{ξ,j}^{(m)}(t)| / (1 + |ξ|^m)`, maximized
/// over `j`.
#[derive(Debug, Clone)]
pub struct StabilityEntry {
    pub xi: f64,
    pub m: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub entries: Vec<StabilityEntry>,
    /// Largest ratio over the whole scan: the empirical stability constant.
    pub max_ratio: f64,
}

impl StabilityReport {
    pub fn ratio(&self, xi: f64, m: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.xi == xi && e.m == m)
            .map(|e| e.ratio)
    }
}

/// Scan the normalized derivative suprema of every Lagrange function over a
/// dense grid on `[t_0 − 3, t_N + 3]`. Boundary layers have width `1/|ξ|`,
/// so the grid density scales with `|ξ| · gap`.
pub fn stability_scan(
    p: usize,
    knots: &KnotSet,
    xi_list: &[f64],
    m_list: &[usize],
) -> Result<StabilityReport> {
    for &xi in xi_list {
        if xi < 0.5 {
            return Err(Error::XiBelowHalf(xi));
        }
    }
    let mut entries = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for &xi in xi_list {
        let params = KernelParams::new(p, xi)?;
        let basis = solve_lagrange(&params, knots)?;
        let n = knots.len();
        let splines: Vec<_> = (0..n)
            .map(|j| {
                let e_j: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
                interpolate(&basis, &e_j)
            })
            .collect();
        for &m in m_list {
            if m > 2 * p - 2 {
                return Err(Error::DerivativeOrderTooHigh { m, max: 2 * p - 2 });
            }
            let norm = 1.0 + xi.powi(m as i32);
            let mut sup: f64 = 0.0;
            for spline in &splines {
                let pieces = spline.derivative_pieces(m);
                for piece in &pieces {
                    let lo = piece.interval.0.max(knots.first() - 3.0);
                    let hi = piece.interval.1.min(knots.last() + 3.0);
                    if lo >= hi {
                        continue;
                    }
                    let pts = (48.0 + 24.0 * xi * (hi - lo)).min(1600.0) as usize;
                    for i in 0..=pts {
                        let t = lo + (hi - lo) * i as f64 / pts as f64;
                        sup = sup.max(piece.eval_derivative(t, 0).abs());
                    }
                }
            }
            let ratio = sup / norm;
            max_ratio = max_ratio.max(ratio);
            entries.push(StabilityEntry { xi, m, ratio });
        }
    }
    Ok(StabilityReport { entries, max_ratio })
}

/// Largest Lagrange coefficient magnitude per frequency: the empirical
/// version of the uniform bound on the kernel-combination coefficients.
pub fn coefficient_bound_scan(p: usize, knots: &KnotSet, xi_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(xi_list.len());
    for &xi in xi_list {
        let params = KernelParams::new(p, xi)?;
        let basis = solve_lagrange(&params, knots)?;
        let max_a = basis.a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        out.push((xi, max_a));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_kicks_in_at_mu() {
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        let probe = KernelParams::new(2, 1.0).unwrap();
        let mu = diag_dominance_report(&probe, &knots).mu;
        for factor in [1.0, 2.0, 4.0] {
            let params = KernelParams::new(2, mu * factor).unwrap();
            let report = diag_dominance_report(&params, &knots);
            assert!(report.dominant, "xi = {}", mu * factor);
            let c0 = 2.0;
            assert!(report.lambda_min >= c0 / 2.0);
            assert!(report.lambda_min >= report.bound - 1e-12);
        }
    }

    #[test]
    fn single_gap_rho_decays() {
        let knots = KnotSet::new(vec![0.0, 30.0]).unwrap();
        let params = KernelParams::new(2, 1.0).unwrap();
        let report = diag_dominance_report(&params, &knots);
        assert!(report.rho < 1e-9);
        assert!((report.bound - 2.0).abs() < 1e-9);
    }

    #[test]
    fn scan_rejects_small_xi() {
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            stability_scan(2, &knots, &[0.25], &[0]),
            Err(Error::XiBelowHalf(_))
        ));
    }

    #[test]
    fn lagrange_sup_at_least_cardinal_value() {
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        let report = stability_scan(2, &knots, &[2.0], &[0]).unwrap();
        // L_j(t_j) = 1, so the normalized sup is at least 1/(1+1).
        assert!(report.ratio(2.0, 0).unwrap() >= 0.5);
    }

    #[test]
    fn ratios_do_not_grow_with_frequency() {
        let knots = KnotSet::new(vec![0.0, 0.9, 1.7, 2.8]).unwrap();
        for p in [2usize, 3] {
            let ms: Vec<usize> = (0..=2 * p - 2).collect();
            let report = stability_scan(p, &knots, &[2.0, 32.0], &ms).unwrap();
            for &m in &ms {
                let low = report.ratio(2.0, m).unwrap();
                let high = report.ratio(32.0, m).unwrap();
                assert!(
                    high <= 2.0 * low,
                    "p={p} m={m}: ratio grew {low:.4e} -> {high:.4e}"
                );
            }
        }
    }

    #[test]
    fn coefficients_uniformly_bounded() {
        let knots = KnotSet::new(vec![0.0, 0.8, 1.9, 2.5]).unwrap();
        let scan =
            coefficient_bound_scan(2, &knots, &[0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0])
                .unwrap();
        assert!(scan.iter().all(|&(_, a)| a.is_finite() && a > 0.0));
        // no growth trend toward high frequency: the bound is uniform in ξ,
        // and for ξ → ∞ the Gram matrix tends to c_0 I, so max|a| → 1/c_0.
        let at = |xi: f64| scan.iter().find(|&&(x, _)| x == xi).unwrap().1;
        assert!(at(64.0) <= 2.0 * at(2.0), "growth at high frequency");
        for w in scan.windows(2) {
            if w[0].0 >= 4.0 {
                assert!(w[1].1 <= 1.5 * w[0].1, "bound grew past xi={}", w[0].0);
            }
        }
        assert!((at(64.0) - 0.5).abs() <= 1e-5, "limit should be 1/c_0");
    }
}
