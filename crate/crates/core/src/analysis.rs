//! Shared numerical infrastructure: Gauss-Legendre quadrature,
//! finite-difference stencils, a dense symmetric eigensolver for small
//! matrices, and the iterated-Laplacian residual used to probe
//! polyharmonicity.

use nalgebra::DMatrix;

/// Gauss-Legendre rule mapped to an interval `(a, b)`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Nodes and weights of the `n`-point Legendre rule on `[-1, 1]`.
///
/// Newton iteration on `P_n` from the Chebyshev-like initial guess; the
/// weights are `2 / ((1 - x^2) P_n'(x)^2)`.
fn legendre_base(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // P_n and P_n' by the three-term recurrence.
    let eval = |x: f64| -> (f64, f64) {
        let mut p0 = 1.0;
        let mut p1 = x;
        for j in 2..=n {
            let jf = j as f64;
            let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
            p0 = p1;
            p1 = p2;
        }
        let dp = if n == 1 {
            1.0
        } else {
            n as f64 * (x * p1 - p0) / (x * x - 1.0)
        };
        (p1, dp)
    };
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (pn, dp) = eval(x);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = eval(x);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // The recurrence produces nodes in descending order; flip for readability.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Gauss-Legendre rule with `n` nodes on `(a, b)`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> QuadratureRule {
    assert!(n >= 1 && a < b, "need n >= 1 and a < b");
    let (base_nodes, base_weights) = legendre_base(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes = base_nodes.iter().map(|&x| mid + half * x).collect();
    let weights = base_weights.iter().map(|&w| half * w).collect();
    QuadratureRule {
        nodes,
        weights,
        a,
        b,
    }
}

/// Composite Gauss-Legendre integrator: a fixed base rule mapped panel by
/// panel. Building the base nodes once keeps repeated integrals cheap.
#[derive(Debug, Clone)]
pub struct PanelQuadrature {
    base_nodes: Vec<f64>,
    base_weights: Vec<f64>,
}

impl PanelQuadrature {
    pub fn new(nodes_per_panel: usize) -> Self {
        let (base_nodes, base_weights) = legendre_base(nodes_per_panel);
        Self {
            base_nodes,
            base_weights,
        }
    }

    /// Integrate `f` over `(a, b)` split into panels of width at most
    /// `max_width`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, max_width: f64, mut f: F) -> f64 {
        assert!(max_width > 0.0);
        if a >= b {
            return 0.0;
        }
        let panels = ((b - a) / max_width).ceil() as usize;
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        for i in 0..panels {
            let lo = a + i as f64 * width;
            let mid = lo + 0.5 * width;
            let half = 0.5 * width;
            for (&x, &w) in self.base_nodes.iter().zip(&self.base_weights) {
                total += half * w * f(mid + half * x);
            }
        }
        total
    }
}

/// Finite-difference weights by Fornberg's algorithm.
///
/// Returns `weights[m][i]`: the coefficient of `f(grid[i])` in the order-`m`
/// derivative approximation at `x0`, for every `m <= max_order`.
pub fn fd_weights(x0: f64, grid: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = grid.len();
    assert!(n > max_order, "stencil too short for requested order");
    // Fornberg (1988): w[m][j] updated point by point.
    let mut w = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = grid[0] - x0;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = grid[i] - x0;
        for j in 0..i {
            let c3 = grid[i] - grid[j];
            c2 *= c3;
            if j == i - 1 {
                for m in (1..=mn).rev() {
                    w[m][i] = c1 * (m as f64 * w[m - 1][i - 1] - c5 * w[m][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for m in (1..=mn).rev() {
                w[m][j] = (c4 * w[m][j] - m as f64 * w[m - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// A central finite-difference stencil on a unit-spaced grid.
#[derive(Debug, Clone)]
pub struct FDStencil {
    pub order: usize,
    pub accuracy: usize,
    pub offsets: Vec<f64>,
    pub coefficients: Vec<f64>,
}

/// Central stencil for the order-`m` derivative with the requested (even)
/// accuracy, on integer offsets.
pub fn central_stencil(m: usize, accuracy: usize) -> FDStencil {
    assert!(accuracy.is_multiple_of(2) && accuracy >= 2);
    // Symmetric integer grid wide enough for order m at this accuracy.
    let npoints = 2 * m.div_ceil(2) - 1 + accuracy;
    let r = (npoints - 1) / 2;
    let offsets: Vec<f64> = (-(r as i64)..=r as i64).map(|k| k as f64).collect();
    let w = fd_weights(0.0, &offsets, m);
    FDStencil {
        order: m,
        accuracy,
        coefficients: w[m].clone(),
        offsets,
    }
}

/// Order-4 central finite-difference estimate of `f^{(m)}(t)`.
pub fn finite_difference<F: FnMut(f64) -> f64>(mut f: F, t: f64, m: usize, h: f64) -> f64 {
    assert!(m <= 6 && h > 0.0, "m <= 6 and h > 0 required");
    if m == 0 {
        return f(t);
    }
    let stencil = central_stencil(m, 4);
    let scale = h.powi(m as i32);
    stencil
        .offsets
        .iter()
        .zip(&stencil.coefficients)
        .map(|(&o, &c)| c * f(t + o * h))
        .sum::<f64>()
        / scale
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(mat: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = mat
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

// 5-point, order-4 second-derivative weights used by the Laplacian probe.
const LAP5: [f64; 5] = [
    -1.0 / 12.0,
    16.0 / 12.0,
    -30.0 / 12.0,
    16.0 / 12.0,
    -1.0 / 12.0,
];

fn laplacian_rec<F: Fn(&[f64]) -> f64>(f: &F, point: &[f64], h: f64, power: usize) -> f64 {
    if power == 0 {
        return f(point);
    }
    let mut total = 0.0;
    let mut x = point.to_vec();
    for d in 0..point.len() {
        let x0 = x[d];
        for (k, &w) in LAP5.iter().enumerate() {
            x[d] = x0 + (k as f64 - 2.0) * h;
            total += w * laplacian_rec(f, &x, h, power - 1);
        }
        x[d] = x0;
    }
    total / (h * h)
}

/// Finite-difference estimate of `Δ^power F` at `point`, by `power`
/// applications of the 5-point-per-dimension Laplacian stencil.
///
/// `point` must be at least `2 * power * h` away from any surface where `F`
/// loses smoothness, or the stencil straddles the kink and the estimate is
/// meaningless.
pub fn laplacian_power_residual<F: Fn(&[f64]) -> f64>(
    f: &F,
    point: &[f64],
    power: usize,
    h: f64,
) -> f64 {
    assert!(power >= 1 && h > 0.0);
    laplacian_rec(f, point, h, power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_rule() {
        let q = gauss_legendre(1, 0.0, 2.0);
        assert_abs_diff_eq!(q.nodes[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.weights[0], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn degree_exactness() {
        // n = 5 integrates t^9 on (0, 1) exactly.
        let q = gauss_legendre(5, 0.0, 1.0);
        let got = q.integrate(|t| t.powi(9));
        assert_abs_diff_eq!(got, 0.1, epsilon = 1e-13);
    }

    #[test]
    fn weights_sum_to_length() {
        for n in [1, 2, 7, 20, 40, 64] {
            let q = gauss_legendre(n, -0.5, 2.5);
            let s: f64 = q.weights.iter().sum();
            assert_abs_diff_eq!(s, 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exp_poly_integral() {
        // int_0^3 e^{-2t} (2 + 2t)^2 dt, closed form via integration by parts.
        // (2+2t)^2 = 4 + 8t + 4t^2; int t^k e^{-2t} has elementary closed form.
        let exact = {
            let f = |t: f64| {
                // antiderivative of e^{-2t}(4 + 8t + 4t^2)
                -(2.0 * t * t + 6.0 * t + 5.0) * (-2.0 * t).exp()
            };
            f(3.0) - f(0.0)
        };
        let q = gauss_legendre(40, 0.0, 3.0);
        let got = q.integrate(|t| (-2.0 * t).exp() * (2.0 + 2.0 * t).powi(2));
        assert_abs_diff_eq!(got, exact, epsilon = 1e-12);
    }

    #[test]
    fn panels_match_single_rule() {
        let pq = PanelQuadrature::new(16);
        let got = pq.integrate(0.0, 3.0, 0.4, |t| (t).sin() * (-t).exp());
        let q = gauss_legendre(60, 0.0, 3.0);
        let want = q.integrate(|t| (t).sin() * (-t).exp());
        assert_abs_diff_eq!(got, want, epsilon = 1e-13);
    }

    #[test]
    fn stencil_reproduces_monomials() {
        for m in 1..=6usize {
            let st = central_stencil(m, 4);
            let deg_max = st.offsets.len() - 1;
            for deg in 0..=deg_max {
                let s: f64 = st
                    .offsets
                    .iter()
                    .zip(&st.coefficients)
                    .map(|(&o, &c)| c * o.powi(deg as i32))
                    .sum();
                let expect = if deg == m {
                    (1..=m).product::<usize>() as f64
                } else {
                    0.0
                };
                assert_abs_diff_eq!(s, expect, epsilon = 1e-8 * (1.0 + expect.abs()));
            }
        }
    }

    #[test]
    fn fd_polynomial_exact() {
        let got = finite_difference(|t| t * t * t, 1.7, 2, 1e-2);
        assert_abs_diff_eq!(got, 6.0 * 1.7, epsilon = 1e-10);
    }

    #[test]
    fn fd_sine() {
        let got = finite_difference(|t| t.sin(), 0.0, 1, 1e-3);
        assert_abs_diff_eq!(got, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn fd_richardson_order() {
        // Halving h should reduce the error by at least 2^(4 - 0.5).
        let f = |t: f64| (1.3 * t).exp() * (0.7 * t).sin();
        let exact = |t: f64| {
            // third derivative of e^{1.3 t} sin(0.7 t)
            let (a, b) = (1.3f64, 0.7f64);
            let e = (a * t).exp();
            // (a + i b)^3 applied к e^{at} e^{ibt}: imaginary part.
            let re = a * a * a - 3.0 * a * b * b;
            let im = 3.0 * a * a * b - b * b * b;
            e * (re * (b * t).sin() + im * (b * t).cos())
        };
        let t = 0.4;
        let e1 = (finite_difference(f, t, 3, 2e-2) - exact(t)).abs();
        let e2 = (finite_difference(f, t, 3, 1e-2) - exact(t)).abs();
        assert!(e2 * 2f64.powf(3.5) <= e1 * 1.05, "e1={e1:.3e} e2={e2:.3e}");
    }

    #[test]
    fn laplacian_of_harmonic_function() {
        // e^t cos(y) is harmonic in (t, y).
        let f = |x: &[f64]| x[0].exp() * x[1].cos();
        let r = laplacian_power_residual(&f, &[0.3, 0.9], 1, 1e-2);
        assert!(r.abs() <= 1e-4, "residual {r:.3e}");
    }

    #[test]
    fn bilaplacian_of_biharmonic_function() {
        // F = t e^t cos(y): ΔF = 2 e^t cos(y) which is harmonic, so Δ²F = 0.
        let f = |x: &[f64]| x[0] * x[0].exp() * x[1].cos();
        let r = laplacian_power_residual(&f, &[0.2, 0.5], 2, 2e-2);
        assert!(r.abs() <= 1e-3, "residual {r:.3e}");
    }

    #[test]
    fn bilaplacian_of_quartic() {
        let f = |x: &[f64]| x[0].powi(4);
        let r = laplacian_power_residual(&f, &[0.1, 0.2], 2, 1e-2);
        assert!((r - 24.0).abs() <= 0.24, "got {r}");
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let ev = symmetric_eigenvalues(&m);
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 3.0, epsilon = 1e-12);
    }
}
