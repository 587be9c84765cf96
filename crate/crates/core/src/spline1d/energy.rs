//! The 1D energy `∫ |(d/dt − |ξ|)^p s|² dt`, the fundamental identity, its
//! binomial expansion, and the variational optimality check.
//!
//! Splines are integrated exactly (their brackets are exponential
//! polynomials piece by piece); everything touching a test function goes
//! through panel quadrature on a window outside of which the Gaussian factor
//! is below round-off.

use crate::analysis::PanelQuadrature;
use crate::error::{Error, Result};
use crate::exppoly::Piece;
use crate::spline1d::NaturalSpline1D;
use crate::testfn::TestFunction;

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn eval_pieces(pieces: &[Piece], knots: &[f64], t: f64) -> f64 {
    let idx = match knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
        Ok(j) => j + 1,
        Err(j) => j,
    }
    .min(pieces.len() - 1);
    pieces[idx].eval(t)
}

/// Panel integration split at the knots: spline brackets lose smoothness
/// there and a panel straddling a knot would wreck the Gauss convergence.
fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    quad: &PanelQuadrature,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    width: f64,
    mut f: F,
) -> f64 {
    let mut cuts = vec![lo];
    cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += quad.integrate(w[0], w[1], width, &mut f);
    }
    total
}

/// Exact 1D energy by piecewise integration: zero on the left tail by the
/// natural condition, closed-form exponential moments on the right.
pub fn energy_1d(s: &NaturalSpline1D) -> f64 {
    s.bracket_pieces(1.0)
        .iter()
        .map(|piece| piece.square_integral())
        .sum()
}

fn quad_width(s: &NaturalSpline1D) -> f64 {
    let xi = s.params.xi_norm;
    0.5 * s.knots.min_gap().min(1.0 / (1.0 + xi))
}

/// Dual-path energy: panel quadrature of the same bracket.
pub fn energy_1d_quadrature(s: &NaturalSpline1D) -> f64 {
    let bracket = s.bracket_pieces(1.0);
    let knots = s.knots.knots();
    let xi = s.params.xi_norm;
    let hi = if xi > 0.0 {
        s.knots.last() + 45.0 / xi
    } else {
        s.knots.last()
    };
    let quad = PanelQuadrature::new(32);
    integrate_with_breaks(&quad, s.knots.first(), hi, knots, quad_width(s), |t| {
        eval_pieces(&bracket, knots, t).powi(2)
    })
}

fn check_vanishes(psi: &TestFunction, knots: &[f64]) -> Result<()> {
    let scale = psi.sup_scan().max(1e-300);
    for &tj in knots {
        if psi.eval(tj).abs() > 1e-8 * scale {
            return Err(Error::NotVanishingAtKnots(tj));
        }
    }
    Ok(())
}

/// Integration window covering both the spline bracket and the test
/// function (the Gaussian is below 1e-30 of its scale outside).
fn window(s: &NaturalSpline1D, psi: &TestFunction) -> (f64, f64) {
    let scale = psi.sup_scan().max(1e-300);
    let (wlo, whi) = psi.window(1e-30 * scale);
    let xi = s.params.xi_norm;
    let pad = if xi > 0.0 { 45.0 / xi } else { 5.0 };
    (
        wlo.min(s.knots.first()) - 1.0,
        whi.max(s.knots.last() + pad),
    )
}

/// `J_ξ = ∫ (d/dt − |ξ|)^p s · (d/dt − |ξ|)^p ψ dt` for a test function
/// vanishing at the knots. Vanishes for every natural spline; the returned
/// magnitude is the numerical certificate.
pub fn fundamental_identity_residual(s: &NaturalSpline1D, psi: &TestFunction) -> Result<f64> {
    check_vanishes(psi, s.knots.knots())?;
    Ok(identity_integral(s, psi, 1.0))
}

/// Same integral with the adjoint factor `(d/dt + |ξ|)^p` on both sides.
pub fn adjoint_identity_residual(s: &NaturalSpline1D, psi: &TestFunction) -> Result<f64> {
    check_vanishes(psi, s.knots.knots())?;
    Ok(identity_integral(s, psi, -1.0))
}

/// The common integrand of the identity checks; `sign` picks
/// `(d/dt − sign·|ξ|)^p`.
pub fn identity_integral(s: &NaturalSpline1D, psi: &TestFunction, sign: f64) -> f64 {
    let bracket_s = s.bracket_pieces(sign);
    let bracket_psi = psi.bracket(sign * s.params.xi_norm, s.params.p);
    let knots = s.knots.knots();
    let (lo, hi) = window(s, psi);
    // Left of t_0 the minus-bracket of s vanishes identically; the plus
    // variant vanishes right of t_N instead. Integrate the full window: the
    // annihilated side contributes exact zeros.
    let quad = PanelQuadrature::new(32);
    integrate_with_breaks(&quad, lo, hi, knots, quad_width(s), |t| {
        eval_pieces(&bracket_s, knots, t) * bracket_psi.eval(t)
    })
}

/// Both sides of the binomial expansion of the bracket inner product:
/// `lhs = ∫ (d−|ξ|)^p s (d−|ξ|)^p ψ`,
/// `rhs = Σ_m (p¦m) |ξ|^{2(p−m)} ∫ s^{(m)} ψ^{(m)}`.
/// ψ need not vanish at the knots.
pub fn binomial_identity_check(s: &NaturalSpline1D, psi: &TestFunction) -> (f64, f64) {
    let lhs = identity_integral(s, psi, 1.0);
    let p = s.params.p;
    let xi = s.params.xi_norm;
    let knots = s.knots.knots();
    let (lo, hi) = window(s, psi);
    let quad = PanelQuadrature::new(32);
    let mut rhs = 0.0;
    for m in 0..=p {
        let s_m = s.derivative_pieces(m);
        let psi_m = psi.derivative_n(m);
        let integral = integrate_with_breaks(&quad, lo, hi, knots, quad_width(s), |t| {
            eval_pieces(&s_m, knots, t) * psi_m.eval(t)
        });
        rhs += binomial(p, m) * xi.powi(2 * (p - m) as i32) * integral;
    }
    (lhs, rhs)
}

/// Outcome of one competitor comparison in the variational check.
#[derive(Debug, Clone)]
pub struct VariationalMargin {
    pub energy_spline: f64,
    pub energy_competitor: f64,
    /// `E(s + ψ) − E(s)`, strictly positive for admissible ψ ≢ 0.
    pub margin: f64,
    /// `∫ |(d−|ξ|)^p ψ|²`: what the margin must equal (Pythagoras).
    pub bump_energy: f64,
}

/// Energy comparison against competitors `f = s + ψ` interpolating the same
/// values (ψ must vanish at every knot). All three energies come from the
/// same quadrature so the comparison is internally consistent.
pub fn variational_check_1d(
    s: &NaturalSpline1D,
    perturbations: &[TestFunction],
) -> Result<Vec<VariationalMargin>> {
    let p = s.params.p;
    let xi = s.params.xi_norm;
    let bracket_s = s.bracket_pieces(1.0);
    let knots = s.knots.knots();
    let quad = PanelQuadrature::new(32);
    let mut out = Vec::with_capacity(perturbations.len());
    for psi in perturbations {
        check_vanishes(psi, knots).map_err(|_| {
            // the competitor misses the data wherever psi fails to vanish
            let bad = knots
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    psi.eval(a).abs().partial_cmp(&psi.eval(b).abs()).unwrap()
                })
                .unwrap();
            Error::CompetitorMismatch(bad)
        })?;
        let bracket_psi = psi.bracket(xi, p);
        let (lo, hi) = window(s, psi);
        let width = quad_width(s);
        let e_s = integrate_with_breaks(&quad, lo, hi, knots, width, |t| {
            eval_pieces(&bracket_s, knots, t).powi(2)
        });
        let e_f = integrate_with_breaks(&quad, lo, hi, knots, width, |t| {
            (eval_pieces(&bracket_s, knots, t) + bracket_psi.eval(t)).powi(2)
        });
        let e_psi = integrate_with_breaks(&quad, lo, hi, knots, width, |t| {
            bracket_psi.eval(t).powi(2)
        });
        out.push(VariationalMargin {
            energy_spline: e_s,
            energy_competitor: e_f,
            margin: e_f - e_s,
            bump_energy: e_psi,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelParams;
    use crate::spline1d::{interpolate, solve_lagrange, KnotSet};
    use approx::assert_relative_eq;

    fn sample_spline(p: usize, xi: f64) -> NaturalSpline1D {
        let params = KernelParams::new(p, xi).unwrap();
        let knots = KnotSet::new(vec![0.0, 0.8, 1.5, 2.4]).unwrap();
        let basis = solve_lagrange(&params, &knots).unwrap();
        interpolate(&basis, &[0.7, -0.4, 1.2, 0.3])
    }

    #[test]
    fn energy_dual_path() {
        for (p, xi) in [(2usize, 0.7), (2, 3.0), (3, 1.0)] {
            let s = sample_spline(p, xi);
            let exact = energy_1d(&s);
            let quad = energy_1d_quadrature(&s);
            assert!(exact > 0.0);
            assert_relative_eq!(exact, quad, max_relative = 1e-8);
        }
    }

    #[test]
    fn energy_of_zero_data() {
        let params = KernelParams::new(2, 1.0).unwrap();
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        let basis = solve_lagrange(&params, &knots).unwrap();
        let s = interpolate(&basis, &[0.0, 0.0, 0.0]);
        assert_eq!(energy_1d(&s), 0.0);
    }

    #[test]
    fn fundamental_identity_vanishes() {
        let s = sample_spline(2, 1.0);
        let scale_s = energy_1d(&s);
        for (center, width) in [(0.5, 0.8), (1.2, 1.5), (2.0, 0.6)] {
            let psi = TestFunction::vanishing_at(s.knots.knots(), center, width);
            let j = fundamental_identity_residual(&s, &psi).unwrap();
            let psi_b = psi.bracket(s.params.xi_norm, s.params.p);
            let quad = PanelQuadrature::new(32);
            let (lo, hi) = psi.window(1e-300);
            let scale_psi = quad.integrate(lo, hi, 0.3, |t| psi_b.eval(t).powi(2));
            let scale = (scale_s * scale_psi).sqrt();
            assert!(j.abs() <= 1e-7 * scale, "J = {j:.3e}, scale = {scale:.3e}");
        }
    }

    #[test]
    fn identity_rejects_non_vanishing_psi() {
        let s = sample_spline(2, 1.0);
        let psi = TestFunction::bump(0.5, 1.0);
        assert!(matches!(
            fundamental_identity_residual(&s, &psi),
            Err(Error::NotVanishingAtKnots(_))
        ));
    }

    #[test]
    fn zero_psi_gives_exact_zero() {
        let s = sample_spline(2, 1.0);
        let psi = TestFunction::new(1.0, 1.0, vec![0.0]);
        assert_eq!(fundamental_identity_residual(&s, &psi).unwrap(), 0.0);
    }

    #[test]
    fn adjoint_variant_agrees() {
        // Without the knot-vanishing hypothesis, the plus and minus brackets
        // integrate to the same (generally nonzero) value.
        let s = sample_spline(3, 1.3);
        let psi = TestFunction::new(1.1, 1.4, vec![0.4, -0.2, 0.1]);
        let minus = identity_integral(&s, &psi, 1.0);
        let plus = identity_integral(&s, &psi, -1.0);
        assert!(minus.abs() > 1e-6, "test should exercise a nonzero value");
        assert_relative_eq!(minus, plus, max_relative = 1e-9);
    }

    #[test]
    fn binomial_identity_holds() {
        for (p, xi) in [(2usize, 0.8), (3, 1.6)] {
            let s = sample_spline(p, xi);
            let psi = TestFunction::new(1.3, 1.2, vec![0.5, 0.3, -0.15]);
            let (lhs, rhs) = binomial_identity_check(&s, &psi);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-7);
        }
    }

    #[test]
    fn binomial_identity_p2_brute_force() {
        // p = 2: the bracket is s'' - 2|ξ|s' + |ξ|²s; expand by hand.
        let s = sample_spline(2, 1.1);
        let xi = s.params.xi_norm;
        let psi = TestFunction::new(1.0, 1.0, vec![1.0, 0.2]);
        let (lhs, _) = binomial_identity_check(&s, &psi);
        let knots = s.knots.knots();
        let quad = PanelQuadrature::new(32);
        let (lo, hi) = window(&s, &psi);
        let pieces: Vec<Vec<Piece>> = (0..=2).map(|m| s.derivative_pieces(m)).collect();
        let brute = integrate_with_breaks(&quad, lo, hi, knots, 0.2, |t| {
            let sb = eval_pieces(&pieces[2], knots, t) - 2.0 * xi * eval_pieces(&pieces[1], knots, t)
                + xi * xi * eval_pieces(&pieces[0], knots, t);
            let pb = psi.eval_derivative(t, 2) - 2.0 * xi * psi.eval_derivative(t, 1)
                + xi * xi * psi.eval(t);
            sb * pb
        });
        assert_relative_eq!(lhs, brute, max_relative = 1e-9);
    }

    #[test]
    fn variational_margins_positive_and_pythagorean() {
        let s = sample_spline(2, 1.0);
        let bumps: Vec<TestFunction> = [(0.4, 0.7), (1.1, 1.0), (1.9, 0.5)]
            .iter()
            .map(|&(c, w)| TestFunction::vanishing_at(s.knots.knots(), c, w))
            .collect();
        let margins = variational_check_1d(&s, &bumps).unwrap();
        for m in &margins {
            assert!(m.margin > 0.0);
            assert!(m.energy_competitor > m.energy_spline);
            assert_relative_eq!(m.margin, m.bump_energy, max_relative = 1e-7);
        }
    }

    #[test]
    fn variational_rejects_non_interpolating_competitor() {
        let s = sample_spline(2, 1.0);
        let bad = TestFunction::bump(1.0, 1.0);
        assert!(matches!(
            variational_check_1d(&s, &[bad]),
            Err(Error::CompetitorMismatch(_))
        ));
    }
}
