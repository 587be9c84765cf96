//! Exponential-polynomial algebra.
//!
//! The null space of `(d²/dt² − |ξ|²)^p` is spanned by `t^l e^{±|ξ|t}`, so
//! every spline piece, every factored bracket `(d/dt ∓ |ξ|)^p s`, and every
//! integrand in the energy computations is a finite sum of terms
//! `e^{σu} Σ_l b_l u^l`. These are closed under differentiation, products,
//! translation and interval integration, all implemented here in closed form.
//!
//! Pieces carry a local coordinate `u = t − anchor` chosen so that decaying
//! exponentials are evaluated with nonpositive exponents wherever the
//! coefficients are large; this is what keeps `|ξ| · span ≫ 1` stable.

use crate::error::{Error, Result};

/// `e^{σu} · Σ_l coeffs[l] u^l` on a support interval (±∞ allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolynomial {
    pub sigma: f64,
    pub coeffs: Vec<f64>,
    pub support: (f64, f64),
}

pub(crate) fn poly_eval(coeffs: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

pub(crate) fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    if coeffs.len() <= 1 {
        return vec![];
    }
    coeffs[1..]
        .iter()
        .enumerate()
        .map(|(i, &c)| (i as f64 + 1.0) * c)
        .collect()
}

/// Coefficients of `P(u + d)` given those of `P(u)`.
pub(crate) fn poly_shift(coeffs: &[f64], d: f64) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    for (l, &b) in coeffs.iter().enumerate() {
        // binomial expansion of b (u + d)^l
        let mut binom = 1.0;
        let mut dpow = 1.0;
        for r in (0..=l).rev() {
            out[r] += b * binom * dpow;
            // step binom from C(l, r) to C(l, r-1), dpow from d^{l-r} up
            if r > 0 {
                binom = binom * r as f64 / (l - r + 1) as f64;
                dpow *= d;
            }
        }
    }
    out
}

impl ExpPolynomial {
    pub fn new(sigma: f64, coeffs: Vec<f64>, support: (f64, f64)) -> Self {
        Self {
            sigma,
            coeffs,
            support,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.sigma * u).exp() * poly_eval(&self.coeffs, u)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            sigma: self.sigma,
            coeffs: self.coeffs.iter().map(|&c| a * c).collect(),
            support: self.support,
        }
    }

    /// `d/du` applied once: `e^{σu}(σ B + B')`.
    pub fn derivative(&self) -> Self {
        let mut coeffs = poly_derivative(&self.coeffs);
        coeffs.resize(self.coeffs.len(), 0.0);
        for (l, &b) in self.coeffs.iter().enumerate() {
            coeffs[l] += self.sigma * b;
        }
        trim_zeros(&mut coeffs);
        Self {
            sigma: self.sigma,
            coeffs,
            support: self.support,
        }
    }

    /// Product; supports intersect.
    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self {
            sigma: self.sigma + other.sigma,
            coeffs,
            support: (
                self.support.0.max(other.support.0),
                self.support.1.min(other.support.1),
            ),
        }
    }

    /// Antiderivative with the same exponential rate (requires `σ ≠ 0`):
    /// solve `σ g_r + (r+1) g_{r+1} = b_r` from the top degree down.
    fn antiderivative_coeffs(&self) -> Vec<f64> {
        let sigma = self.sigma;
        assert!(sigma != 0.0);
        let n = self.coeffs.len();
        let mut g = vec![0.0; n];
        for r in (0..n).rev() {
            let upper = if r + 1 < n {
                (r as f64 + 1.0) * g[r + 1]
            } else {
                0.0
            };
            g[r] = (self.coeffs[r] - upper) / sigma;
        }
        g
    }

    /// Definite integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if self.is_zero() || a >= b {
            return 0.0;
        }
        if self.sigma == 0.0 {
            // plain polynomial
            let mut total = 0.0;
            for (l, &c) in self.coeffs.iter().enumerate() {
                let k = l as f64 + 1.0;
                total += c / k * (b.powi(l as i32 + 1) - a.powi(l as i32 + 1));
            }
            return total;
        }
        let g = self.antiderivative_coeffs();
        let f = |u: f64| (self.sigma * u).exp() * poly_eval(&g, u);
        f(b) - f(a)
    }

    /// `∫_a^∞`, requires `σ < 0`.
    pub fn integral_to_inf(&self, a: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        assert!(self.sigma < 0.0, "divergent tail integral");
        let g = self.antiderivative_coeffs();
        -(self.sigma * a).exp() * poly_eval(&g, a)
    }

    /// `∫_{−∞}^b`, requires `σ > 0`.
    pub fn integral_from_neg_inf(&self, b: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        assert!(self.sigma > 0.0, "divergent tail integral");
        let g = self.antiderivative_coeffs();
        (self.sigma * b).exp() * poly_eval(&g, b)
    }

    /// Translation without the overflow guard. Safe whenever
    /// `σ · shift ≥ 0` (the prefactor `e^{−σ·shift}` then shrinks).
    pub(crate) fn translate_unguarded(&self, shift: f64) -> Self {
        let scale = (-self.sigma * shift).exp();
        let mut coeffs = poly_shift(&self.coeffs, -shift);
        for c in &mut coeffs {
            *c *= scale;
        }
        Self {
            sigma: self.sigma,
            coeffs,
            support: (self.support.0 + shift, self.support.1 + shift),
        }
    }
}

fn trim_zeros(coeffs: &mut Vec<f64>) {
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
}

/// Re-expand `(t − shift)^l e^{σ(t−shift)}` in the basis `t^r e^{σt}`:
/// the output evaluates at `t` to the input's value at `t − shift`.
///
/// Errors with an overflow-risk flag when `|σ · shift| > 30`; past that the
/// prefactor `e^{−σ·shift}` can amplify cancellation beyond recovery and the
/// caller should work in piecewise-local coordinates instead.
pub fn translate_exp_poly(e: &ExpPolynomial, shift: f64) -> Result<ExpPolynomial> {
    let exponent = e.sigma * shift;
    if exponent.abs() > 30.0 {
        return Err(Error::TranslationOverflow(exponent.abs()));
    }
    Ok(e.translate_unguarded(shift))
}

/// One polynomial piece of a spline: the sum of `terms` in the local
/// coordinate `u = t − anchor`, valid on `interval` (global coordinates,
/// ±∞ for the two tails).
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub interval: (f64, f64),
    pub anchor: f64,
    pub terms: Vec<ExpPolynomial>,
}

impl Piece {
    pub fn new(interval: (f64, f64), anchor: f64, terms: Vec<ExpPolynomial>) -> Self {
        Self {
            interval,
            anchor,
            terms,
        }
    }

    pub fn zero(interval: (f64, f64), anchor: f64) -> Self {
        Self {
            interval,
            anchor,
            terms: vec![],
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.interval.0 && t <= self.interval.1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = t - self.anchor;
        self.terms.iter().map(|term| term.eval(u)).sum()
    }

    pub fn derivative(&self) -> Self {
        Self {
            interval: self.interval,
            anchor: self.anchor,
            terms: self.terms.iter().map(|t| t.derivative()).collect(),
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

    /// `(d/dt − a)` applied once, term by term:
    /// `e^{σu}((σ − a)B + B')`. Exact for `a == σ` (the rate term cancels
    /// bitwise), which is what makes natural tails annihilate exactly.
    pub fn apply_operator(&self, a: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let mut coeffs = poly_derivative(&term.coeffs);
                coeffs.resize(term.coeffs.len(), 0.0);
                let shift_rate = term.sigma - a;
                for (l, &b) in term.coeffs.iter().enumerate() {
                    coeffs[l] += shift_rate * b;
                }
                trim_zeros(&mut coeffs);
                ExpPolynomial {
                    sigma: term.sigma,
                    coeffs,
                    support: term.support,
                }
            })
            .collect();
        Self {
            interval: self.interval,
            anchor: self.anchor,
            terms,
        }
    }

    /// `(d/dt − a)^p`.
    pub fn apply_operator_power(&self, a: f64, p: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..p {
            out = out.apply_operator(a);
        }
        out
    }

    /// Exact integral of the piece over its interval.
    pub fn integrate(&self) -> f64 {
        let (lo, hi) = self.local_bounds();
        self.terms
            .iter()
            .map(|term| integrate_term(term, lo, hi))
            .sum()
    }

    /// Exact integral of the square of the piece over its interval.
    pub fn square_integral(&self) -> f64 {
        let (lo, hi) = self.local_bounds();
        let mut total = 0.0;
        for (i, a) in self.terms.iter().enumerate() {
            for (j, b) in self.terms.iter().enumerate() {
                if j < i {
                    continue;
                }
                let factor = if i == j { 1.0 } else { 2.0 };
                let prod = a.mul(b);
                total += factor * integrate_term(&prod, lo, hi);
            }
        }
        total
    }

    /// Exact integral of `self * other` over the intersection of intervals;
    /// both pieces must share the anchor.
    pub fn product_integral(&self, other: &Piece) -> f64 {
        assert_eq!(self.anchor, other.anchor, "pieces must share an anchor");
        let lo = self.interval.0.max(other.interval.0) - self.anchor;
        let hi = self.interval.1.min(other.interval.1) - self.anchor;
        let mut total = 0.0;
        for a in &self.terms {
            for b in &other.terms {
                total += integrate_term(&a.mul(b), lo, hi);
            }
        }
        total
    }

    fn local_bounds(&self) -> (f64, f64) {
        (self.interval.0 - self.anchor, self.interval.1 - self.anchor)
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.coeffs.iter())
            .fold(0.0f64, |acc, &c| acc.max(c.abs()))
    }
}

fn integrate_term(term: &ExpPolynomial, lo: f64, hi: f64) -> f64 {
    if term.is_zero() {
        return 0.0;
    }
    match (lo.is_infinite(), hi.is_infinite()) {
        (false, false) => term.integral(lo, hi),
        (true, false) => term.integral_from_neg_inf(hi),
        (false, true) => term.integral_to_inf(lo),
        (true, true) => {
            assert!(
                term.sigma != 0.0,
                "doubly infinite integral of a polynomial"
            );
            // decaying on one side only; split at 0 is impossible for a
            // single rate, so this must never be reached by construction.
            unreachable!("no piece spans the whole line")
        }
    }
}
