//! The fundamental solution of `L_ξ = (d²/dt² − |ξ|²)^p` and its algebra.
//!
//! For `ξ ≠ 0` the unique integrable fundamental solution is, up to the
//! normalizer `(−1)^p γ_p |ξ|^{2p−1}`, the positive definite radial kernel
//!
//! ```text
//! φ̃_ξ(t) = e^{−|ξ||t|} Σ_{l<p} c_l (|ξ||t|)^l,
//! c_l = (2p−2−l)! 2^l / (l! (p−1−l)!),   γ_p = (p−1)! 2^{2p−1}.
//! ```
//!
//! Everything downstream (Gram matrices, Lagrange bases, stability scans)
//! consumes this kernel through the operations here: exact coefficients,
//! Horner evaluation of the profile `ψ(u) = e^{−u} Σ c_l u^l`, a derivative
//! table valid for `t > 0` extended by parity, the Fourier transform
//! `(−1)^p (u² + |ξ|²)^{−p}`, and the Euler tail moments used in closed-form
//! tail integrals.

use crate::error::{Error, Result};

/// Hard cap on the spline order: factorial growth exhausts exact integer
/// arithmetic soon after, and the numerics are untested beyond it.
pub const MAX_ORDER: usize = 20;

/// Order `p` and frequency magnitude `|ξ|` of one 1D spline problem.
///
/// `xi_norm == 0` routes to the polynomial-spline path everywhere; the
/// kernel operations themselves require `xi_norm > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub p: usize,
    pub xi_norm: f64,
}

impl KernelParams {
    pub fn new(p: usize, xi_norm: f64) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&p) {
            return Err(Error::OrderOutOfRange(p));
        }
        assert!(
            xi_norm.is_finite() && xi_norm >= 0.0,
            "frequency magnitude must be finite and nonnegative"
        );
        Ok(Self { p, xi_norm })
    }

    /// Largest derivative order that exists two-sided: the kernel and every
    /// natural spline built on it are exactly `C^{2p-2}`.
    pub fn smoothness(&self) -> usize {
        2 * self.p - 2
    }
}

/// Exact kernel coefficients for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    /// `c_0 … c_{p−1}`, all strictly positive.
    pub c: Vec<f64>,
    /// `γ_p = (p−1)! 2^{2p−1}`.
    pub gamma_p: f64,
    /// `(2p−2)!/(p−1)!`, the kernel value at the origin and the constant
    /// diagonal of every Gram matrix.
    pub c0_diag: f64,
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Coefficients of the fundamental solution for order `p`.
///
/// Computed in exact integer arithmetic:
/// `c_l = [Π_{k=p−l}^{2p−2−l} k] · 2^l / l!`, which stays inside `u128` for
/// every admissible `p` (the raw `(2p−2)!` would not).
pub fn kernel_coefficients(p: usize) -> Result<KernelCoefficients> {
    if !(2..=MAX_ORDER).contains(&p) {
        return Err(Error::OrderOutOfRange(p));
    }
    let mut c = Vec::with_capacity(p);
    for l in 0..p {
        // (2p−2−l)!/(p−1−l)! as a product of p−1 consecutive integers.
        let mut num: u128 = 1;
        for k in (p - l)..=(2 * p - 2 - l) {
            num *= k as u128;
        }
        num <<= l; // times 2^l
        let den = factorial_u128(l);
        debug_assert_eq!(num % den, 0, "kernel coefficients are integers");
        c.push((num / den) as f64);
    }
    let gamma_p = (factorial_u128(p - 1) << (2 * p - 1)) as f64;
    let c0_diag = c[0];
    Ok(KernelCoefficients { c, gamma_p, c0_diag })
}

/// The radial profile `ψ(u) = e^{−u} Σ_l c_l u^l`, so that
/// `φ̃_ξ(t) = ψ(|ξ||t|)`.
pub fn radial_profile(coeffs: &KernelCoefficients, u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    let mut horner = 0.0;
    for &cl in coeffs.c.iter().rev() {
        horner = horner * u + cl;
    }
    (-u).exp() * horner
}

/// Normalized kernel `φ̃_ξ(t)`; strictly positive, even in `t`, equal to
/// `c0_diag` at the origin. Requires `xi_norm > 0`.
pub fn eval_kernel(params: &KernelParams, t: f64) -> f64 {
    assert!(params.xi_norm > 0.0, "eval_kernel requires |xi| > 0");
    let coeffs = kernel_coefficients(params.p).expect("validated order");
    radial_profile(&coeffs, params.xi_norm * t.abs())
}

/// Coefficient table for kernel derivatives: row `m` holds `c_{m,l}` with
///
/// ```text
/// φ̃_ξ^{(m)}(t) = |ξ|^m e^{−|ξ|t} Σ_l c_{m,l} (|ξ|t)^l,   t > 0.
/// ```
#[derive(Debug, Clone)]
pub struct DerivTable {
    pub p: usize,
    /// Rows `m = 0 ..= 2p−2`, each of width `p`.
    pub rows: Vec<Vec<f64>>,
}

/// Derivative coefficients by the row recurrence
/// `c_{m+1,l} = (l+1) c_{m,l+1} − c_{m,l}` (with `c_{m,p} = 0`), which is
/// term-by-term differentiation of `e^{−u} Σ c_{m,l} u^l` in `u = |ξ|t`.
/// Negative `t` follows by parity: the kernel is even.
pub fn deriv_table(p: usize) -> Result<DerivTable> {
    let coeffs = kernel_coefficients(p)?;
    let mut rows = Vec::with_capacity(2 * p - 1);
    rows.push(coeffs.c.clone());
    for _m in 0..(2 * p - 2) {
        let prev: &Vec<f64> = rows.last().unwrap();
        let row: Vec<f64> = (0..p)
            .map(|l| {
                let up = if l + 1 < p { prev[l + 1] } else { 0.0 };
                (l as f64 + 1.0) * up - prev[l]
            })
            .collect();
        rows.push(row);
    }
    Ok(DerivTable { p, rows })
}

impl DerivTable {
    /// One more application of the recurrence, beyond the stored rows.
    /// Used to probe the `2p−1` derivative jump at the origin.
    pub fn next_row(&self) -> Vec<f64> {
        let prev = self.rows.last().unwrap();
        (0..self.p)
            .map(|l| {
                let up = if l + 1 < self.p { prev[l + 1] } else { 0.0 };
                (l as f64 + 1.0) * up - prev[l]
            })
            .collect()
    }
}

/// `m`-th derivative of the normalized kernel at `t`.
///
/// Away from the origin the derivative table applies directly (with the
/// parity factor `(−1)^m` for `t < 0`). At `t = 0` the two-sided derivative
/// exists for `m ≤ 2p−2`: odd orders vanish by parity, even orders take the
/// one-sided value.
pub fn eval_kernel_derivative(params: &KernelParams, m: usize, t: f64) -> Result<f64> {
    assert!(params.xi_norm > 0.0, "kernel derivatives require |xi| > 0");
    let max = params.smoothness();
    if m > max {
        return Err(Error::DerivativeOrderTooHigh { m, max });
    }
    let table = deriv_table(params.p)?;
    let xi = params.xi_norm;
    if t == 0.0 && m % 2 == 1 {
        return Ok(0.0);
    }
    let u = xi * t.abs();
    let mut horner = 0.0;
    for &cml in table.rows[m].iter().rev() {
        horner = horner * u + cml;
    }
    let sign = if t < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sign * xi.powi(m as i32) * (-u).exp() * horner)
}

/// Fourier transform `(−1)^p (u² + |ξ|²)^{−p}` of the un-normalized
/// fundamental solution.
pub fn kernel_fourier_transform(params: &KernelParams, u: f64) -> f64 {
    assert!(params.xi_norm > 0.0);
    let sign = if params.p.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / (u * u + params.xi_norm * params.xi_norm).powi(params.p as i32)
}

/// Quadrature oracle: numerically invert the Fourier transform,
///
/// ```text
/// (γ_p |ξ|^{2p−1} / 2π) ∫_R e^{itu} (u² + |ξ|²)^{−p} du
///   = (γ_p |ξ|^{2p−1} / π) ∫_0^∞ cos(tu) (u² + |ξ|²)^{−p} du,
/// ```
///
/// which must reproduce `eval_kernel`. Deliberately integrates the stated
/// integrand directly (no rescaling substitution) so it stays an independent
/// check of both the closed form and the scaling law.
pub fn invert_fourier_transform(params: &KernelParams, t: f64) -> f64 {
    assert!(params.xi_norm > 0.0);
    let coeffs = kernel_coefficients(params.p).expect("validated order");
    let xi = params.xi_norm;
    let p = params.p as i32;
    // Integrand decays like u^{-2p}; truncation tail bounded by
    // U^{1-2p}/(2p-1) times the prefactor.
    let cut = 400.0 * xi.max(1.0);
    // Panels must resolve both the cos(tu) oscillation and the |ξ|-scale
    // variation of the rational factor.
    let width = (0.5 * xi.max(1.0)).min(std::f64::consts::PI / (2.0 * (t.abs() + 0.25)));
    let quad = crate::analysis::PanelQuadrature::new(16);
    let integral = quad.integrate(0.0, cut, width, |u| {
        (t * u).cos() / (u * u + xi * xi).powi(p)
    });
    coeffs.gamma_p * xi.powi(2 * p - 1) / std::f64::consts::PI * integral
}

/// Euler integral `∫_0^∞ u^{2l} e^{−2|ξ|u} du = (2l)!/(2|ξ|)^{2l+1}`.
pub fn tail_moment(l: usize, xi_norm: f64) -> f64 {
    assert!(xi_norm > 0.0);
    factorial_u128(2 * l) as f64 / (2.0 * xi_norm).powi(2 * l as i32 + 1)
}

/// Smallest `u*` with `ψ(u) ≤ target` for all `u ≥ u*`.
///
/// The profile is strictly decreasing beyond `u = p − 1` (each term of
/// `Σ c_l l u^{l−1}` is dominated there), so a coarse scan for the last
/// crossing followed by bisection on the decreasing branch is exact enough.
pub fn profile_tail_threshold(coeffs: &KernelCoefficients, target: f64) -> f64 {
    assert!(target > 0.0 && target < coeffs.c0_diag);
    let p = coeffs.c.len();
    let hi = p as f64 + 80.0;
    let step = 1e-3;
    let mut last_above = 0.0;
    let mut u = 0.0;
    while u <= hi {
        if radial_profile(coeffs, u) > target {
            last_above = u;
        }
        u += step;
    }
    let (mut lo, mut hi) = (last_above, last_above + step);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if radial_profile(coeffs, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // return the side where the profile is already at or below target
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::finite_difference;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn coefficients_p2() {
        let k = kernel_coefficients(2).unwrap();
        assert_eq!(k.c, vec![2.0, 2.0]);
        assert_eq!(k.gamma_p, 8.0);
        assert_eq!(k.c0_diag, 2.0);
    }

    #[test]
    fn coefficients_p3() {
        let k = kernel_coefficients(3).unwrap();
        assert_eq!(k.c, vec![12.0, 12.0, 4.0]);
        assert_eq!(k.gamma_p, 64.0);
        assert_eq!(k.c0_diag, 12.0);
    }

    #[test]
    fn c0_equals_factorial_ratio() {
        for p in 2..=MAX_ORDER {
            let k = kernel_coefficients(p).unwrap();
            let mut want = 1.0;
            for j in p..=(2 * p - 2) {
                want *= j as f64;
            }
            assert_relative_eq!(k.c[0], want, max_relative = 1e-14);
            assert!(k.c.iter().all(|&cl| cl > 0.0));
            // c_1 = c_0 makes the profile flat at the origin.
            assert_relative_eq!(k.c[1], k.c[0], max_relative = 1e-14);
        }
    }

    #[test]
    fn order_bounds_rejected() {
        assert!(matches!(
            kernel_coefficients(1),
            Err(Error::OrderOutOfRange(1))
        ));
        assert!(matches!(
            kernel_coefficients(21),
            Err(Error::OrderOutOfRange(21))
        ));
    }

    #[test]
    fn kernel_values_p2() {
        let params = KernelParams::new(2, 1.0).unwrap();
        assert_abs_diff_eq!(eval_kernel(&params, 0.0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            eval_kernel(&params, 1.0),
            4.0 * (-1.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kernel_depends_on_product_only() {
        let a = KernelParams::new(2, 2.0).unwrap();
        let b = KernelParams::new(2, 1.0).unwrap();
        assert_abs_diff_eq!(
            eval_kernel(&a, 1.0),
            eval_kernel(&b, 2.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            eval_kernel(&a, 1.0),
            6.0 * (-2.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kernel_even_positive_bounded() {
        for p in [2, 3, 5] {
            let coeffs = kernel_coefficients(p).unwrap();
            let params = KernelParams::new(p, 1.7).unwrap();
            for i in 0..200 {
                let t = -4.0 + 8.0 * i as f64 / 199.0;
                let v = eval_kernel(&params, t);
                assert!(v > 0.0);
                assert_abs_diff_eq!(v, eval_kernel(&params, -t), epsilon = 1e-15);
                assert!(v <= coeffs.c0_diag * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn deriv_table_p2() {
        let table = deriv_table(2).unwrap();
        assert_eq!(table.rows[0], vec![2.0, 2.0]);
        assert_eq!(table.rows[1], vec![0.0, -2.0]);
        assert_eq!(table.rows[2], vec![-2.0, 2.0]);
    }

    #[test]
    fn derivative_values_at_origin() {
        let params = KernelParams::new(2, 1.0).unwrap();
        assert_eq!(eval_kernel_derivative(&params, 1, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            eval_kernel_derivative(&params, 2, 0.0).unwrap(),
            -2.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            eval_kernel_derivative(&params, 3, 0.0),
            Err(Error::DerivativeOrderTooHigh { m: 3, max: 2 })
        ));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (p, xi) in [(2usize, 1.0), (2, 4.0), (3, 0.5), (3, 2.0)] {
            let params = KernelParams::new(p, xi).unwrap();
            for m in 1..=params.smoothness() {
                for &t in &[0.5, 1.3, -0.8] {
                    // Differentiate the (m-1)-th derivative once: keeps the
                    // stencil inside the smoothness class.
                    let lower = m - 1;
                    let fd = finite_difference(
                        |x| eval_kernel_derivative(&params, lower, x).unwrap(),
                        t,
                        1,
                        1e-5 / xi.max(1.0),
                    );
                    let exact = eval_kernel_derivative(&params, m, t).unwrap();
                    let scale = exact.abs().max(xi.powi(m as i32));
                    assert!(
                        (fd - exact).abs() <= 1e-6 * scale,
                        "p={p} xi={xi} m={m} t={t}: fd={fd:.12e} exact={exact:.12e}"
                    );
                }
            }
        }
    }

    #[test]
    fn smoothness_class_is_exact() {
        // One-sided derivatives agree through order 2p-2 and differ at 2p-1.
        for p in [2usize, 3] {
            let table = deriv_table(p).unwrap();
            for m in 0..=(2 * p - 2) {
                let at_zero = table.rows[m][0];
                // parity: odd-order rows must vanish at the origin for the
                // two-sided derivative to exist.
                if m % 2 == 1 {
                    assert_eq!(at_zero, 0.0, "p={p} m={m}");
                }
            }
            let jump_row = table.next_row();
            assert!(
                jump_row[0].abs() > 0.5,
                "order 2p-1 must jump at the origin, got {}",
                jump_row[0]
            );
        }
    }

    #[test]
    fn fourier_transform_values() {
        let p2 = KernelParams::new(2, 1.0).unwrap();
        assert_eq!(kernel_fourier_transform(&p2, 0.0), 1.0);
        let p3 = KernelParams::new(3, 1.0).unwrap();
        assert_eq!(kernel_fourier_transform(&p3, 0.0), -1.0);
    }

    #[test]
    fn fourier_inversion_reproduces_kernel() {
        let params = KernelParams::new(2, 1.0).unwrap();
        let got = invert_fourier_transform(&params, 1.0);
        assert_relative_eq!(got, 4.0 * (-1.0f64).exp(), max_relative = 1e-6);
    }

    #[test]
    fn fourier_inversion_grid() {
        for p in [2usize, 3] {
            for xi in [0.5, 1.0, 4.0] {
                let params = KernelParams::new(p, xi).unwrap();
                for i in 0..7 {
                    let t = -3.0 + i as f64;
                    let want = eval_kernel(&params, t);
                    let got = invert_fourier_transform(&params, t);
                    assert_relative_eq!(got, want, max_relative = 1e-6);
                }
            }
        }
    }

    #[test]
    fn tail_moment_values() {
        assert_abs_diff_eq!(tail_moment(1, 1.0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(tail_moment(0, 0.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tail_moment(2, 1.0), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn tail_moment_matches_quadrature() {
        let quad = crate::analysis::PanelQuadrature::new(24);
        for (l, xi) in [(0usize, 1.0), (1, 1.0), (2, 1.0), (3, 0.5), (2, 2.5)] {
            let got = quad.integrate(0.0, 50.0 / xi, 0.5 / xi, |u| {
                u.powi(2 * l as i32) * (-2.0 * xi * u).exp()
            });
            assert_relative_eq!(got, tail_moment(l, xi), max_relative = 1e-10);
        }
    }

    #[test]
    fn profile_maximum_is_at_origin() {
        for p in [2usize, 3, 4, 6] {
            let coeffs = kernel_coefficients(p).unwrap();
            let mut sup: f64 = 0.0;
            for i in 0..=4000 {
                let u = i as f64 * 1e-2;
                sup = sup.max(radial_profile(&coeffs, u));
            }
            assert_relative_eq!(sup, coeffs.c0_diag, max_relative = 1e-12);
        }
    }

    #[test]
    fn tail_threshold_is_a_threshold() {
        let coeffs = kernel_coefficients(2).unwrap();
        let target = coeffs.c0_diag / 4.0;
        let delta = profile_tail_threshold(&coeffs, target);
        assert_relative_eq!(radial_profile(&coeffs, delta), target, max_relative = 1e-9);
        for i in 1..200 {
            let u = delta + i as f64 * 0.1;
            assert!(radial_profile(&coeffs, u) <= target * (1.0 + 1e-12));
        }
        // p=2, target c0/4: e^{-u}(2+2u) = 0.5 lies between 2.5 and 3.
        assert!(delta > 2.5 && delta < 3.0, "delta = {delta}");
    }
}
