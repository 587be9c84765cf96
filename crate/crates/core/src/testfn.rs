//! Smooth admissible test functions for the identity, orthogonality and
//! variational checks: polynomials times a Gaussian window,
//!
//! ```text
//! ψ(t) = P(t − c) · e^{−(t−c)²/w}.
//! ```
//!
//! The family is closed under differentiation and linear combination (with a
//! shared window), every derivative is square-integrable, and choosing
//! `P(s) = Π_j (s − (t_j − c))` makes ψ vanish at all knots. That covers the
//! admissibility hypotheses of every check that consumes one of these.

use crate::exppoly::{poly_derivative, poly_eval};

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
    /// Polynomial coefficients in the centered variable `s = t − c`.
    pub poly: Vec<f64>,
}

impl TestFunction {
    pub fn new(center: f64, width: f64, poly: Vec<f64>) -> Self {
        assert!(width > 0.0);
        Self {
            center,
            width,
            poly,
        }
    }

    /// Gaussian bump `e^{−(t−c)²/w}` with no polynomial factor.
    pub fn bump(center: f64, width: f64) -> Self {
        Self::new(center, width, vec![1.0])
    }

    /// Bump times `Π_j (t − knots[j])`: vanishes at every knot and stays
    /// admissible (all derivatives in L²).
    pub fn vanishing_at(knots: &[f64], center: f64, width: f64) -> Self {
        let mut poly = vec![1.0];
        for &k in knots {
            // multiply by (s - (k - center))
            let root = k - center;
            let mut next = vec![0.0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= root * c;
            }
            poly = next;
        }
        Self::new(center, width, poly)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = t - self.center;
        poly_eval(&self.poly, s) * (-s * s / self.width).exp()
    }

    /// d/dt, staying in the family: `P ↦ P' − (2s/w) P`.
    pub fn derivative(&self) -> Self {
        let mut coeffs = poly_derivative(&self.poly);
        coeffs.resize(self.poly.len() + 1, 0.0);
        for (l, &c) in self.poly.iter().enumerate() {
            coeffs[l + 1] -= 2.0 / self.width * c;
        }
        Self {
            center: self.center,
            width: self.width,
            poly: coeffs,
        }
    }

    pub fn derivative_n(&self, m: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..m {
            out = out.derivative();
        }
        out
    }

    pub fn eval_derivative(&self, t: f64, m: usize) -> f64 {
        self.derivative_n(m).eval(t)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            center: self.center,
            width: self.width,
            poly: self.poly.iter().map(|&c| a * c).collect(),
        }
    }

    /// Sum of two members with the same window.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.center, other.center);
        assert_eq!(self.width, other.width);
        let n = self.poly.len().max(other.poly.len());
        let mut poly = vec![0.0; n];
        for (i, &c) in self.poly.iter().enumerate() {
            poly[i] += c;
        }
        for (i, &c) in other.poly.iter().enumerate() {
            poly[i] += c;
        }
        Self {
            center: self.center,
            width: self.width,
            poly,
        }
    }

    /// `(d/dt − a)^p` applied symbolically.
    pub fn bracket(&self, a: f64, p: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..p {
            out = out.derivative().add(&out.scaled(-a));
        }
        out
    }

    /// Interval outside of which `|ψ| ≤ eps` (conservative bound from
    /// `e^{−R²/w} · Σ|p_l| R^l`).
    pub fn window(&self, eps: f64) -> (f64, f64) {
        let mut r = 3.0 * self.width.sqrt();
        loop {
            let poly_bound: f64 = self
                .poly
                .iter()
                .enumerate()
                .map(|(l, &c)| c.abs() * r.powi(l as i32))
                .sum();
            if poly_bound * (-r * r / self.width).exp() <= eps || r > 60.0 * self.width.sqrt() + 60.0
            {
                return (self.center - r, self.center + r);
            }
            r += self.width.sqrt();
        }
    }

    /// Scan estimate of `sup |ψ|`, for scale normalization.
    pub fn sup_scan(&self) -> f64 {
        let (lo, hi) = self.window(1e-300);
        let n = 2000;
        let mut sup: f64 = 0.0;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            sup = sup.max(self.eval(t).abs());
        }
        sup
    }
}
