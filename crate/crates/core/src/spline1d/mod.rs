//! Natural spline interpolation on a knot set for one frequency magnitude.
//!
//! Two independent solvers produce the same (unique) interpolant:
//!
//! 1. the radial-basis route: solve the positive definite Gram system built
//!    from kernel translates and split the result into exponential-polynomial
//!    pieces ([`solve_lagrange`] / [`interpolate`]);
//! 2. the piecewise collocation route: assemble the `2pN × 2pN` system of
//!    null-space coefficients, continuity, endpoint and interpolation
//!    conditions ([`collocation::collocation_solve`]).
//!
//! The zero frequency degenerates to natural polynomial splines of degree
//! `2p−1` ([`collocation::natural_spline_zero`]).

pub mod collocation;
pub mod energy;
pub mod stability;

use nalgebra::DMatrix;

use crate::analysis::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::exppoly::{poly_shift, ExpPolynomial, Piece};
use crate::kernel::{
    deriv_table, eval_kernel, kernel_coefficients, KernelParams,
};

/// Strictly increasing knots `t_0 < … < t_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet {
    knots: Vec<f64>,
    min_gap: f64,
}

impl KnotSet {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.iter().any(|t| !t.is_finite()) {
            return Err(Error::KnotsNotIncreasing);
        }
        let mut min_gap = f64::INFINITY;
        for w in knots.windows(2) {
            let gap = w[1] - w[0];
            if gap <= 0.0 {
                return Err(Error::KnotsNotIncreasing);
            }
            min_gap = min_gap.min(gap);
        }
        Ok(Self { knots, min_gap })
    }

    /// `N + 1 ≥ p` must hold for any order the set is paired with.
    pub fn validate_for_order(&self, p: usize) -> Result<()> {
        if self.knots.len() < p {
            return Err(Error::InsufficientKnots {
                p,
                got: self.knots.len(),
            });
        }
        Ok(())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of bounded intervals, `N`.
    pub fn intervals(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn span(&self) -> f64 {
        self.last() - self.first()
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }
}

/// Symmetric kernel matrix `φ̃_ξ(t_j − t_k)` with constant diagonal.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub entries: DMatrix<f64>,
    pub params: KernelParams,
}

/// Assemble the Gram matrix of kernel translates. Requires `|ξ| > 0`.
pub fn build_gram(params: &KernelParams, knots: &KnotSet) -> GramMatrix {
    assert!(params.xi_norm > 0.0);
    let n = knots.len();
    let t = knots.knots();
    let mut entries = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..=j {
            let v = eval_kernel(params, t[j] - t[k]);
            entries[(j, k)] = v;
            entries[(k, j)] = v;
        }
    }
    GramMatrix { entries, params: *params }
}

/// Plain Cholesky, kept separate from the LU used by the collocation oracle
/// so the two solve routes share no factorization code.
fn cholesky_lower(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = m[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return None;
        }
        let dj = diag.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / dj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &DMatrix<f64>, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Cardinal interpolation data: row `j` of `a` holds the kernel-combination
/// coefficients of the Lagrange function `L_{ξ,j}`, i.e. `a = M_ξ^{-1}`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub params: KernelParams,
    pub knots: KnotSet,
    pub a: DMatrix<f64>,
    pub cond_estimate: f64,
    /// `max |M a − I|` after refinement.
    pub residual: f64,
}

/// Solve the Gram system for the full Lagrange basis (Cholesky, one step of
/// iterative refinement). Fails loudly on loss of positive definiteness
/// rather than regularizing: regularization would break interpolation.
pub fn solve_lagrange(params: &KernelParams, knots: &KnotSet) -> Result<LagrangeBasis> {
    knots.validate_for_order(params.p)?;
    let gram = build_gram(params, knots);
    let m = &gram.entries;
    let n = knots.len();
    let eigen = symmetric_eigenvalues(m);
    let cond = eigen[n - 1] / eigen[0].max(f64::MIN_POSITIVE);
    let l = cholesky_lower(m).ok_or(Error::NotPositiveDefinite { cond })?;

    let mut a = DMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for j in 0..n {
        rhs.iter_mut().for_each(|v| *v = 0.0);
        rhs[j] = 1.0;
        let mut col = cholesky_solve(&l, &rhs);
        // one refinement pass tightens the residual to near round-off
        let mut defect = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += m[(i, k)] * col[k];
            }
            defect[i] = rhs[i] - acc;
        }
        let corr = cholesky_solve(&l, &defect);
        for i in 0..n {
            col[i] += corr[i];
        }
        for i in 0..n {
            a[(i, j)] = col[i];
        }
    }
    let residual = (m * &a - DMatrix::identity(n, n))
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    Ok(LagrangeBasis {
        params: *params,
        knots: knots.clone(),
        a,
        cond_estimate: cond,
        residual,
    })
}

/// One natural spline, carried in both representations: the kernel
/// combination (`rbf_coeffs`, plus a global polynomial for `ξ = 0`) and the
/// piecewise exponential-polynomial form used for evaluation and exact
/// integration.
#[derive(Debug, Clone)]
pub struct NaturalSpline1D {
    pub params: KernelParams,
    pub knots: KnotSet,
    pub values: Vec<f64>,
    /// Kernel-combination coefficients; `None` for splines produced by the
    /// collocation oracle, which never forms them.
    pub rbf_coeffs: Option<Vec<f64>>,
    /// Degree `< p` polynomial part of the zero-frequency representation
    /// (coefficients in `t`); empty when `ξ ≠ 0`.
    pub poly_part: Vec<f64>,
    /// `N + 2` pieces: left tail, `N` bounded intervals, right tail.
    pub pieces: Vec<Piece>,
}

/// Interpolate `values` at the basis knots: coefficients `λ = M^{-1} y`,
/// pieces by splitting `|t − t_k|` per interval.
pub fn interpolate(basis: &LagrangeBasis, values: &[f64]) -> NaturalSpline1D {
    let n = basis.knots.len();
    assert_eq!(values.len(), n, "value count must match knots");
    assert!(values.iter().all(|v| v.is_finite()));
    let mut lambda = vec![0.0; n];
    for (k, lk) in lambda.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &yj) in values.iter().enumerate() {
            acc += basis.a[(k, j)] * yj;
        }
        *lk = acc;
    }
    let pieces = pieces_from_rbf(&basis.params, &basis.knots, &lambda);
    NaturalSpline1D {
        params: basis.params,
        knots: basis.knots.clone(),
        values: values.to_vec(),
        rbf_coeffs: Some(lambda),
        poly_part: vec![],
        pieces,
    }
}

/// Split `Σ_k λ_k φ̃_ξ(t − t_k)` into per-interval exponential polynomials.
///
/// Each piece is anchored at its left knot (the left tail at `t_0`), so the
/// exponential prefactors `e^{−|ξ| d_k}` of far knots always shrink and the
/// two rates `±|ξ|` stay separated; this is the local-coordinate form that
/// survives `|ξ| · span ≫ 1`.
pub(crate) fn pieces_from_rbf(
    params: &KernelParams,
    knots: &KnotSet,
    lambda: &[f64],
) -> Vec<Piece> {
    let coeffs = kernel_coefficients(params.p).expect("validated order");
    let xi = params.xi_norm;
    let t = knots.knots();
    let n = knots.len();
    let p = params.p;
    // a_l = c_l |ξ|^l: the kernel polynomial in the raw distance variable.
    let kernel_poly: Vec<f64> = coeffs
        .c
        .iter()
        .enumerate()
        .map(|(l, &cl)| cl * xi.powi(l as i32))
        .collect();

    // Contribution of the knot at (signed) distance d >= 0 on the given side.
    // side = -1: evaluation points right of the knot (u + d >= 0), rate -ξ.
    // side = +1: evaluation points left of the knot (d - u >= 0), rate +ξ.
    let knot_term = |d: f64, weight: f64, side: f64| -> ExpPolynomial {
        let damp = (-xi * d).exp();
        let shifted = poly_shift(&kernel_poly, d);
        let coeffs: Vec<f64> = shifted
            .iter()
            .enumerate()
            .map(|(r, &q)| {
                let parity = if side > 0.0 && r % 2 == 1 { -1.0 } else { 1.0 };
                weight * damp * parity * q
            })
            .collect();
        ExpPolynomial::new(side * xi, coeffs, (f64::NEG_INFINITY, f64::INFINITY))
    };

    let sum_terms = |terms: Vec<ExpPolynomial>, rate: f64| -> ExpPolynomial {
        let mut acc = vec![0.0; p];
        for term in &terms {
            for (l, &c) in term.coeffs.iter().enumerate() {
                acc[l] += c;
            }
        }
        ExpPolynomial::new(rate, acc, (f64::NEG_INFINITY, f64::INFINITY))
    };

    let mut pieces = Vec::with_capacity(n + 1);
    // Left tail: every knot lies right of the evaluation point.
    {
        let anchor = t[0];
        let terms: Vec<ExpPolynomial> = (0..n)
            .map(|k| knot_term(t[k] - anchor, lambda[k], 1.0))
            .collect();
        pieces.push(Piece::new(
            (f64::NEG_INFINITY, t[0]),
            anchor,
            vec![sum_terms(terms, xi)],
        ));
    }
    // Bounded intervals (t_{j-1}, t_j), anchored at t_{j-1}.
    for j in 1..n {
        let anchor = t[j - 1];
        let mut minus = Vec::new();
        let mut plus = Vec::new();
        for k in 0..n {
            if t[k] <= anchor {
                minus.push(knot_term(anchor - t[k], lambda[k], -1.0));
            } else {
                plus.push(knot_term(t[k] - anchor, lambda[k], 1.0));
            }
        }
        pieces.push(Piece::new(
            (t[j - 1], t[j]),
            anchor,
            vec![sum_terms(minus, -xi), sum_terms(plus, xi)],
        ));
    }
    // Right tail: every knot lies left.
    {
        let anchor = t[n - 1];
        let terms: Vec<ExpPolynomial> = (0..n)
            .map(|k| knot_term(anchor - t[k], lambda[k], -1.0))
            .collect();
        pieces.push(Piece::new(
            (t[n - 1], f64::INFINITY),
            anchor,
            vec![sum_terms(terms, -xi)],
        ));
    }
    pieces
}

/// Which side of a knot to take a one-sided limit from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl NaturalSpline1D {
    /// Index into `pieces` for the piece owning `t` (ties at a knot go to
    /// the right piece; irrelevant below the smoothness order).
    fn piece_index(&self, t: f64) -> usize {
        let knots = self.knots.knots();
        if t < knots[0] {
            return 0;
        }
        match knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(j) => j + 1,
            Err(j) => j, // t between knots[j-1] and knots[j]
        }
        .min(self.pieces.len() - 1)
    }

    /// m-th derivative at `t`, `m ≤ 2p−2`.
    pub fn evaluate(&self, t: f64, m: usize) -> Result<f64> {
        let max = self.params.smoothness();
        if m > max {
            return Err(Error::DerivativeOrderTooHigh { m, max });
        }
        Ok(self.pieces[self.piece_index(t)].eval_derivative(t, m))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.pieces[self.piece_index(t)].eval_derivative(t, 0)
    }

    /// One-sided m-th derivative at knot `j`; `m` may go up to `2p−1` to
    /// expose the jump that certifies the exact smoothness class.
    pub fn one_sided_derivative(&self, knot_index: usize, m: usize, side: Side) -> f64 {
        let t = self.knots.knots()[knot_index];
        let piece = match side {
            Side::Left => &self.pieces[knot_index],
            Side::Right => &self.pieces[knot_index + 1],
        };
        piece.eval_derivative(t, m)
    }

    /// All pieces differentiated `m` times (cache for grid sweeps).
    pub fn derivative_pieces(&self, m: usize) -> Vec<Piece> {
        self.pieces.iter().map(|p| p.derivative_n(m)).collect()
    }

    /// `(d/dt − sign·|ξ|)^p` applied piecewise; for `ξ = 0` this is the
    /// plain `p`-th derivative either way.
    pub fn bracket_pieces(&self, sign: f64) -> Vec<Piece> {
        let a = sign * self.params.xi_norm;
        self.pieces
            .iter()
            .map(|piece| piece.apply_operator_power(a, self.params.p))
            .collect()
    }

    /// Evaluate through the kernel-combination representation (derivative
    /// table route), independent of the piecewise form. `ξ ≠ 0` only.
    pub fn eval_rbf_form(&self, t: f64, m: usize) -> Result<f64> {
        let lambda = self
            .rbf_coeffs
            .as_ref()
            .expect("no kernel-combination coefficients on this spline");
        if self.params.xi_norm == 0.0 {
            return self.eval_zero_rbf_form(t, m, lambda);
        }
        let table = deriv_table(self.params.p)?;
        let max = self.params.smoothness();
        if m > max {
            return Err(Error::DerivativeOrderTooHigh { m, max });
        }
        let xi = self.params.xi_norm;
        let mut acc = 0.0;
        for (k, &tk) in self.knots.knots().iter().enumerate() {
            let d = t - tk;
            let u = xi * d.abs();
            let mut horner = 0.0;
            for &c in table.rows[m].iter().rev() {
                horner = horner * u + c;
            }
            let sign = if d < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
            acc += lambda[k] * sign * xi.powi(m as i32) * (-u).exp() * horner;
        }
        Ok(acc)
    }

    fn eval_zero_rbf_form(&self, t: f64, m: usize, lambda: &[f64]) -> Result<f64> {
        let p = self.params.p;
        let max = self.params.smoothness();
        if m > max {
            return Err(Error::DerivativeOrderTooHigh { m, max });
        }
        let q = 2 * p - 1;
        // d^m/dt^m |d|^q = q!/(q-m)! |d|^{q-m} sign(d)^m
        let mut fall = 1.0;
        for i in 0..m {
            fall *= (q - i) as f64;
        }
        let mut acc = 0.0;
        for (k, &tk) in self.knots.knots().iter().enumerate() {
            let d = t - tk;
            let sign = if d < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
            acc += lambda[k] * sign * fall * d.abs().powi((q - m) as i32);
        }
        // polynomial part
        let mut dm = self.poly_part.clone();
        for _ in 0..m {
            dm = crate::exppoly::poly_derivative(&dm);
        }
        acc += crate::exppoly::poly_eval(&dm, t);
        Ok(acc)
    }

    /// Largest interpolation defect `max_j |s(t_j) − y_j|`.
    pub fn interpolation_residual(&self) -> f64 {
        self.knots
            .knots()
            .iter()
            .zip(&self.values)
            .map(|(&tj, &yj)| (self.eval(tj) - yj).abs())
            .fold(0.0, f64::max)
    }
}
