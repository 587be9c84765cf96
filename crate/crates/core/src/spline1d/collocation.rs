//! Piecewise collocation solver: the independent oracle for the natural
//! spline, assembled directly from the definition rather than from kernel
//! translates.
//!
//! Unknowns are `2p` null-space coefficients per bounded interval. On each
//! interval the basis pairs `p` functions decaying rightward from the left
//! knot with `p` decaying leftward from the right knot, so every basis value
//! stays O(1) no matter how large `|ξ| · gap` gets. Conditions: `C^{2p−2}`
//! continuity at interior knots, the natural endpoint conditions
//! `d^m (d/dt ∓ |ξ|)^p s = 0` (`m ≤ p−2`) at `t_0` / `t_N`, and the `N+1`
//! interpolation equations — `(2p−1)(N−1) + 2(p−1) + (N+1) = 2pN` equations
//! for as many coefficients. Tails are then the unique null-space extensions
//! matching `p` derivatives at the boundary knots.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exppoly::{poly_shift, ExpPolynomial, Piece};
use crate::kernel::KernelParams;
use crate::spline1d::{KnotSet, NaturalSpline1D};

/// Number of unknowns in the interior collocation system.
pub fn collocation_dimension(p: usize, n_intervals: usize) -> usize {
    2 * p * n_intervals
}

const WHOLE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

/// One basis function: an exponential polynomial in `t − anchor`.
#[derive(Clone)]
struct BasisFn {
    anchor: f64,
    term: ExpPolynomial,
}

impl BasisFn {
    fn eval_deriv(&self, t: f64, m: usize) -> f64 {
        let mut term = self.term.clone();
        for _ in 0..m {
            term = term.derivative();
        }
        term.eval(t - self.anchor)
    }

    /// `d^m (d/dt − a)^p` at `t`.
    fn eval_bracket_deriv(&self, t: f64, a: f64, p: usize, m: usize) -> f64 {
        let mut term = self.term.clone();
        for _ in 0..p {
            // (d/dt - a) e^{σu} B = e^{σu}((σ-a)B + B')
            let mut coeffs = crate::exppoly::poly_derivative(&term.coeffs);
            coeffs.resize(term.coeffs.len(), 0.0);
            for (l, &b) in term.coeffs.iter().enumerate() {
                coeffs[l] += (term.sigma - a) * b;
            }
            term = ExpPolynomial::new(term.sigma, coeffs, term.support);
        }
        for _ in 0..m {
            term = term.derivative();
        }
        term.eval(t - self.anchor)
    }
}

fn monomial(r: usize) -> Vec<f64> {
    let mut c = vec![0.0; r + 1];
    c[r] = 1.0;
    c
}

/// The `2p` basis functions of one interval `(t_left, t_right)`.
fn interval_basis(params: &KernelParams, t_left: f64, t_right: f64) -> Vec<BasisFn> {
    let p = params.p;
    let xi = params.xi_norm;
    let mut basis = Vec::with_capacity(2 * p);
    if xi == 0.0 {
        for r in 0..(2 * p) {
            basis.push(BasisFn {
                anchor: t_left,
                term: ExpPolynomial::new(0.0, monomial(r), WHOLE),
            });
        }
    } else {
        for r in 0..p {
            basis.push(BasisFn {
                anchor: t_left,
                term: ExpPolynomial::new(-xi, monomial(r), WHOLE),
            });
        }
        for r in 0..p {
            basis.push(BasisFn {
                anchor: t_right,
                term: ExpPolynomial::new(xi, monomial(r), WHOLE),
            });
        }
    }
    basis
}

/// Null-space tail matching `p` derivatives of the adjacent piece at the
/// boundary knot. `rate` is `+|ξ|` on the left tail, `−|ξ|` on the right
/// (0 for the polynomial path): the system
/// `Σ_r coef_r · C(m,r) r! rate^{m−r} = s^{(m)}(knot)` is lower triangular.
fn solve_tail(rate: f64, derivs: &[f64]) -> Vec<f64> {
    let p = derivs.len();
    let mut coef = vec![0.0; p];
    let mut factorial = vec![1.0; p + 1];
    for i in 1..=p {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    for m in 0..p {
        let mut rhs = derivs[m];
        for r in 0..m {
            let binom = factorial[m] / (factorial[r] * factorial[m - r]);
            rhs -= coef[r] * binom * factorial[r] * rate.powi((m - r) as i32);
        }
        coef[m] = rhs / factorial[m];
    }
    coef
}

/// Assemble and solve the full collocation system, then extend by the
/// natural tails. Independent of the Gram-matrix route end to end.
pub fn collocation_solve(
    params: &KernelParams,
    knots: &KnotSet,
    values: &[f64],
) -> Result<NaturalSpline1D> {
    knots.validate_for_order(params.p)?;
    let t = knots.knots();
    let n_int = knots.intervals();
    let p = params.p;
    let xi = params.xi_norm;
    assert_eq!(values.len(), knots.len());

    let dim = collocation_dimension(p, n_int);
    let per = 2 * p;
    let basis: Vec<Vec<BasisFn>> = (1..=n_int)
        .map(|j| interval_basis(params, t[j - 1], t[j]))
        .collect();

    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    let mut row = 0;

    // C^{2p-2} continuity at interior knots.
    for j in 1..n_int {
        for m in 0..=(2 * p - 2) {
            let scale = 1.0 / (1.0 + xi).powi(m as i32);
            for (i, bf) in basis[j - 1].iter().enumerate() {
                a[(row, (j - 1) * per + i)] += scale * bf.eval_deriv(t[j], m);
            }
            for (i, bf) in basis[j].iter().enumerate() {
                a[(row, j * per + i)] -= scale * bf.eval_deriv(t[j], m);
            }
            row += 1;
        }
    }
    // Natural endpoint conditions (p >= 2 always holds here).
    for m in 0..=(p - 2) {
        let scale = 1.0 / (1.0 + 2.0 * xi).powi((p + m) as i32);
        for (i, bf) in basis[0].iter().enumerate() {
            a[(row, i)] += scale * bf.eval_bracket_deriv(t[0], xi, p, m);
        }
        row += 1;
        for (i, bf) in basis[n_int - 1].iter().enumerate() {
            a[(row, (n_int - 1) * per + i)] += scale * bf.eval_bracket_deriv(t[n_int], -xi, p, m);
        }
        row += 1;
    }
    // Interpolation.
    for (i, bf) in basis[0].iter().enumerate() {
        a[(row, i)] += bf.eval_deriv(t[0], 0);
    }
    b[row] = values[0];
    row += 1;
    for j in 1..=n_int {
        for (i, bf) in basis[j - 1].iter().enumerate() {
            a[(row, (j - 1) * per + i)] += bf.eval_deriv(t[j], 0);
        }
        b[row] = values[j];
        row += 1;
    }
    assert_eq!(row, dim, "condition count must match the unknown count");

    let lu = a.clone().lu();
    let x = lu.solve(&b).ok_or(Error::SingularSystem)?;
    let residual = (&a * &x - &b).amax();
    let bscale = b.amax().max(1.0);
    if !residual.is_finite() || residual > 1e-7 * bscale {
        return Err(Error::SingularSystem);
    }

    // Interior pieces in left-anchored coordinates.
    let mut pieces = Vec::with_capacity(n_int + 2);
    let mut interior: Vec<Piece> = Vec::with_capacity(n_int);
    for j in 1..=n_int {
        let anchor = t[j - 1];
        let gap = t[j] - t[j - 1];
        let mut terms: Vec<ExpPolynomial> = Vec::new();
        for (i, bf) in basis[j - 1].iter().enumerate() {
            let c = x[(j - 1) * per + i];
            if c == 0.0 {
                continue;
            }
            let mut term = bf.term.scaled(c);
            if bf.anchor != anchor {
                // right-anchored basis: re-expand around the left knot; the
                // prefactor e^{-|ξ| gap} shrinks, so this is the safe side.
                term = term.translate_unguarded(gap);
            }
            terms.push(term);
        }
        // merge equal rates to keep the 2-term (1-term for ξ=0) normal form
        let merged = merge_rates(terms, p, xi);
        interior.push(Piece::new((t[j - 1], t[j]), anchor, merged));
    }

    // Tails from p-jet matching.
    let left_derivs: Vec<f64> = (0..p).map(|m| interior[0].eval_derivative(t[0], m)).collect();
    let left_coef = solve_tail(xi, &left_derivs);
    let left = Piece::new(
        (f64::NEG_INFINITY, t[0]),
        t[0],
        vec![ExpPolynomial::new(xi, left_coef, WHOLE)],
    );
    let right_derivs: Vec<f64> = (0..p)
        .map(|m| interior[n_int - 1].eval_derivative(t[n_int], m))
        .collect();
    let right_coef = solve_tail(-xi, &right_derivs);
    let right = Piece::new(
        (t[n_int], f64::INFINITY),
        t[n_int],
        vec![ExpPolynomial::new(-xi, right_coef, WHOLE)],
    );

    pieces.push(left);
    pieces.extend(interior);
    pieces.push(right);

    Ok(NaturalSpline1D {
        params: *params,
        knots: knots.clone(),
        values: values.to_vec(),
        rbf_coeffs: None,
        poly_part: vec![],
        pieces,
    })
}

fn merge_rates(terms: Vec<ExpPolynomial>, p: usize, xi: f64) -> Vec<ExpPolynomial> {
    if xi == 0.0 {
        let mut acc = vec![0.0; 2 * p];
        for t in &terms {
            for (l, &c) in t.coeffs.iter().enumerate() {
                acc[l] += c;
            }
        }
        return vec![ExpPolynomial::new(0.0, acc, WHOLE)];
    }
    let mut minus = vec![0.0; p];
    let mut plus = vec![0.0; p];
    for t in terms {
        let dst = if t.sigma < 0.0 { &mut minus } else { &mut plus };
        for (l, &c) in t.coeffs.iter().enumerate() {
            dst[l] += c;
        }
    }
    vec![
        ExpPolynomial::new(-xi, minus, WHOLE),
        ExpPolynomial::new(xi, plus, WHOLE),
    ]
}

/// Natural polynomial spline of degree `2p−1` (the `ξ = 0` path), through
/// the 1D polyharmonic representation
///
/// ```text
/// s(t) = Σ_k λ_k |t − t_k|^{2p−1} + Σ_{r<p} d_r t^r,
/// Σ_k λ_k t_k^r = 0  for r < p,
/// ```
///
/// whose moment conditions force polynomial tails of degree `≤ p−1`.
pub fn natural_spline_zero(p: usize, knots: &KnotSet, values: &[f64]) -> Result<NaturalSpline1D> {
    if !(2..=crate::kernel::MAX_ORDER).contains(&p) {
        return Err(Error::OrderOutOfRange(p));
    }
    knots.validate_for_order(p)?;
    assert_eq!(values.len(), knots.len());
    let t = knots.knots();
    let n = knots.len();
    let q = 2 * p - 1;

    let dim = n + p;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    for j in 0..n {
        for k in 0..n {
            a[(j, k)] = (t[j] - t[k]).abs().powi(q as i32);
        }
        for r in 0..p {
            a[(j, n + r)] = t[j].powi(r as i32);
            a[(n + r, j)] = t[j].powi(r as i32);
        }
        b[j] = values[j];
    }
    let x = a.clone().lu().solve(&b).ok_or(Error::SingularSystem)?;
    let lambda: Vec<f64> = (0..n).map(|k| x[k]).collect();
    let poly: Vec<f64> = (0..p).map(|r| x[n + r]).collect();

    let mono = monomial(q);
    let scale = lambda
        .iter()
        .enumerate()
        .map(|(k, &l)| l.abs() * knots.span().max(1.0).powi(q as i32) * (1.0 + t[k].abs()))
        .fold(1e-300, f64::max)
        .max(values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())));

    let mut pieces = Vec::with_capacity(n + 1);
    let make_poly_piece = |interval: (f64, f64), anchor: f64, tail: bool| -> Piece {
        // a representative point strictly inside the interval decides the
        // sign of |t - t_k| for every knot, including one at the anchor
        let rep = match (interval.0.is_finite(), interval.1.is_finite()) {
            (true, true) => 0.5 * (interval.0 + interval.1),
            (false, true) => interval.1 - 1.0,
            (true, false) => interval.0 + 1.0,
            _ => unreachable!(),
        };
        let mut acc = vec![0.0; q + 1];
        for (k, &lk) in lambda.iter().enumerate() {
            // |t - t_k|^{q} = ± (t - t_k)^{q}; in u-coordinates the offset is
            // anchor - t_k.
            let sign = if rep >= t[k] { 1.0 } else { -1.0 };
            let shifted = poly_shift(&mono, anchor - t[k]);
            for (l, &c) in shifted.iter().enumerate() {
                acc[l] += sign * lk * c;
            }
        }
        let shifted_poly = poly_shift_global(&poly, anchor);
        for (l, &c) in shifted_poly.iter().enumerate() {
            acc[l] += c;
        }
        if tail {
            // Degrees >= p cancel exactly in theory (moment conditions);
            // drop the numerical residue so tails stay genuinely polynomial
            // of degree < p.
            for (l, c) in acc.iter_mut().enumerate() {
                if l >= p {
                    debug_assert!(
                        c.abs() <= 1e-8 * scale,
                        "tail coefficient residue {c:.3e} at degree {l}"
                    );
                    *c = 0.0;
                }
            }
        }
        Piece::new(interval, anchor, vec![ExpPolynomial::new(0.0, acc, WHOLE)])
    };

    pieces.push(make_poly_piece((f64::NEG_INFINITY, t[0]), t[0], true));
    for j in 1..n {
        pieces.push(make_poly_piece((t[j - 1], t[j]), t[j - 1], false));
    }
    pieces.push(make_poly_piece((t[n - 1], f64::INFINITY), t[n - 1], true));

    Ok(NaturalSpline1D {
        params: KernelParams { p, xi_norm: 0.0 },
        knots: knots.clone(),
        values: values.to_vec(),
        rbf_coeffs: Some(lambda),
        poly_part: poly,
        pieces,
    })
}

/// Coefficients in `u = t − anchor` of a polynomial given in `t`.
fn poly_shift_global(poly_in_t: &[f64], anchor: f64) -> Vec<f64> {
    // P(t) = P(u + anchor)
    poly_shift(poly_in_t, anchor)
}
