//! The transfinite engine: Fourier analysis of hyperplane data, one natural
//! spline solve per retained frequency, and synthesis of the interpolating
//! surface
//!
//! ```text
//! S(t, y) = Σ_{‖ξ‖∞ ≤ K} Ŝ_ξ(t) e^{i⟨ξ,y⟩},
//! ```
//!
//! where `Ŝ_ξ` interpolates the mode-`ξ` Fourier coefficients of the data
//! slices at the knots. Analysis coefficients are synthesis-normalized
//! (`f = Σ f̂_ξ e^{i⟨ξ,y⟩}` holds literally for band-limited input); every
//! Parseval-type sum therefore carries one explicit `(2π)^n` factor for the
//! surface measure of the torus.

pub mod model_io;
pub mod seminorm;

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exppoly::Piece;
use crate::kernel::{kernel_coefficients, KernelParams};
use crate::spline1d::collocation::natural_spline_zero;
use crate::spline1d::{interpolate, solve_lagrange, KnotSet, NaturalSpline1D};

/// Problem geometry: order, knots, number of periodic variables, retained
/// frequency box and analysis grid resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyConfig {
    pub p: usize,
    pub knots: KnotSet,
    /// Number of periodic variables `n ≥ 1`.
    pub n: usize,
    /// Retain frequencies with `‖ξ‖∞ ≤ trunc_radius`.
    pub trunc_radius: usize,
    /// Samples per periodic axis; `≥ 2·trunc_radius + 1` keeps the retained
    /// band alias-free.
    pub grid_m: usize,
}

impl PolyConfig {
    pub fn new(
        p: usize,
        knots: KnotSet,
        n: usize,
        trunc_radius: usize,
        grid_m: usize,
    ) -> Result<Self> {
        kernel_coefficients(p)?;
        knots.validate_for_order(p)?;
        assert!(n >= 1, "need at least one periodic variable");
        let required = 2 * trunc_radius + 1;
        if grid_m < required {
            return Err(Error::GridTooCoarse {
                grid_m,
                k: trunc_radius,
                required,
            });
        }
        Ok(Self {
            p,
            knots,
            n,
            trunc_radius,
            grid_m,
        })
    }

    /// Retained frequencies, lexicographically ordered (deterministic).
    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        let k = self.trunc_radius as i64;
        let mut out = Vec::new();
        let mut cur = vec![-k; self.n];
        loop {
            out.push(cur.clone());
            let mut axis = self.n;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if cur[axis] < k {
                    cur[axis] += 1;
                    for c in cur.iter_mut().skip(axis + 1) {
                        *c = -k;
                    }
                    break;
                }
            }
        }
    }

    /// Uniform sample positions along one periodic axis.
    pub fn grid_axis(&self) -> Vec<f64> {
        (0..self.grid_m)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / self.grid_m as f64)
            .collect()
    }

    pub fn grid_size(&self) -> usize {
        self.grid_m.pow(self.n as u32)
    }

    /// Decode a row-major flat grid index into per-axis indices.
    pub fn decode_grid_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for a in (0..self.n).rev() {
            out[a] = idx % self.grid_m;
            idx /= self.grid_m;
        }
        out
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.trunc_radius + 1).pow(self.n as u32)
    }
}

/// Euclidean norm of an integer frequency.
pub fn xi_norm(xi: &[i64]) -> f64 {
    (xi.iter().map(|&a| (a * a) as u64).sum::<u64>() as f64).sqrt()
}

fn xi_norm_sq(xi: &[i64]) -> i64 {
    xi.iter().map(|&a| a * a).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Sampled,
    SyntheticFourier,
}

/// Periodic samples of the data functions, one slice per hyperplane,
/// row-major over the `grid_m^n` tensor grid.
#[derive(Debug, Clone)]
pub struct HyperplaneData {
    pub slices: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl HyperplaneData {
    pub fn new(slices: Vec<Vec<f64>>, config: &PolyConfig, provenance: Provenance) -> Result<Self> {
        if slices.len() != config.knots.len() {
            return Err(Error::DataShape(format!(
                "expected {} slices (one per hyperplane), got {}",
                config.knots.len(),
                slices.len()
            )));
        }
        let want = config.grid_size();
        for (j, s) in slices.iter().enumerate() {
            if s.len() != want {
                return Err(Error::DataShape(format!(
                    "slice {j}: expected {want} grid samples, got {}",
                    s.len()
                )));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::DataShape(format!("slice {j}: non-finite sample")));
            }
        }
        Ok(Self { slices, provenance })
    }
}

/// Per-mode Fourier coefficients of the data, synthesis-normalized.
#[derive(Debug, Clone)]
pub struct FourierData {
    /// `ξ → (f̂_{0,ξ}, …, f̂_{N,ξ})` for `‖ξ‖∞ ≤ K`.
    pub coeffs: BTreeMap<Vec<i64>, Vec<Complex64>>,
    /// Per-slice truncated Wiener norms `Σ |f̂_ξ| (1 + |ξ|)^{2p−2}`.
    pub wiener_norms: Vec<f64>,
    /// Per-slice fraction of squared-coefficient mass outside the retained
    /// band (0 for band-limited input).
    pub discarded_energy: Vec<f64>,
    pub n: usize,
    pub grid_m: usize,
}

/// Discrete Fourier analysis of every slice. Exact for band-limited input
/// on an alias-free grid; the out-of-band energy is reported, not silently
/// dropped.
pub fn analyze(config: &PolyConfig, data: &HyperplaneData) -> Result<FourierData> {
    let m = config.grid_m;
    let size = config.grid_size();
    // phase table: e^{-2πi q k / m}
    let phase = |q: i64, k: usize| -> Complex64 {
        let angle = -2.0 * std::f64::consts::PI * q as f64 * k as f64 / m as f64;
        Complex64::from_polar(1.0, angle)
    };
    // all lattice representatives, for the energy split
    let half = m as i64 / 2;
    let lattice: Vec<i64> = (-half..=(m as i64 - 1 - half)).collect();
    let retained = config.frequencies();

    let mut coeffs: BTreeMap<Vec<i64>, Vec<Complex64>> =
        retained.iter().map(|xi| (xi.clone(), Vec::new())).collect();
    let mut wiener = Vec::with_capacity(data.slices.len());
    let mut discarded = Vec::with_capacity(data.slices.len());
    let k_band = config.trunc_radius as i64;

    for slice in &data.slices {
        let mut in_band = 0.0;
        let mut total = 0.0;
        let mut wnorm = 0.0;
        // iterate all lattice frequencies of the grid
        let mut freq = vec![0usize; config.n];
        loop {
            let xi: Vec<i64> = freq.iter().map(|&i| lattice[i]).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, &v) in slice.iter().enumerate() {
                let gi = config.decode_grid_index(idx);
                let mut ph = Complex64::new(1.0, 0.0);
                for a in 0..config.n {
                    ph *= phase(xi[a], gi[a]);
                }
                acc += v * ph;
            }
            acc /= size as f64;
            let e = acc.norm_sqr();
            total += e;
            if xi.iter().all(|&q| q.abs() <= k_band) {
                in_band += e;
                wnorm += acc.norm() * (1.0 + xi_norm(&xi)).powi(2 * config.p as i32 - 2);
                coeffs.get_mut(&xi).unwrap().push(acc);
            }
            // advance multi-index over lattice
            let mut axis = config.n;
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                if freq[axis] + 1 < lattice.len() {
                    freq[axis] += 1;
                    for f in freq.iter_mut().skip(axis + 1) {
                        *f = 0;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
        wiener.push(wnorm);
        discarded.push(if total > 0.0 {
            ((total - in_band) / total).max(0.0)
        } else {
            0.0
        });
    }
    Ok(FourierData {
        coeffs,
        wiener_norms: wiener,
        discarded_energy: discarded,
        n: config.n,
        grid_m: config.grid_m,
    })
}

/// Synthesize the retained band at a point of the torus:
/// `Σ_ξ c_ξ e^{i⟨ξ,y⟩}`.
pub fn synthesize(coeffs: &BTreeMap<Vec<i64>, Complex64>, y: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, &c) in coeffs {
        let angle: f64 = xi.iter().zip(y).map(|(&q, &yv)| q as f64 * yv).sum();
        acc += c * Complex64::from_polar(1.0, angle);
    }
    acc
}

/// A complex-valued natural spline: real and imaginary parts solved
/// separately against the same real operator.
#[derive(Debug, Clone)]
pub struct ComplexSpline1D {
    pub re: NaturalSpline1D,
    pub im: NaturalSpline1D,
}

impl ComplexSpline1D {
    pub fn eval_deriv(&self, t: f64, m: usize) -> Result<Complex64> {
        Ok(Complex64::new(
            self.re.evaluate(t, m)?,
            self.im.evaluate(t, m)?,
        ))
    }

    pub fn eval_pieces(&self, re_pieces: &[Piece], im_pieces: &[Piece], t: f64) -> Complex64 {
        let idx = piece_index(&self.re, t);
        Complex64::new(re_pieces[idx].eval(t), im_pieces[idx].eval(t))
    }

    pub fn data(&self) -> Vec<Complex64> {
        self.re
            .values
            .iter()
            .zip(&self.im.values)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    }

    /// `Σ_j |f̂_{j,ξ}|` of the interpolated data.
    pub fn data_l1(&self) -> f64 {
        self.data().iter().map(|c| c.norm()).sum()
    }
}

fn piece_index(s: &NaturalSpline1D, t: f64) -> usize {
    let knots = s.knots.knots();
    match knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
        Ok(j) => j + 1,
        Err(j) => j,
    }
    .min(s.pieces.len() - 1)
}

/// The fitted surface: one 1D natural spline per retained frequency.
#[derive(Debug, Clone)]
pub struct PolysplineModel {
    pub config: PolyConfig,
    pub modes: BTreeMap<Vec<i64>, ComplexSpline1D>,
    /// Input slices were real (conjugate-symmetric coefficients).
    pub real_data: bool,
}

/// Solve diagnostics kept out of the model itself.
#[derive(Debug, Clone, Default)]
pub struct FitDiagnostics {
    /// Gram condition estimate per mode (`ξ = 0` has no Gram system).
    pub cond_by_mode: BTreeMap<Vec<i64>, f64>,
}

/// Solve one natural spline per retained mode. Deterministic: modes are
/// ordered, and Lagrange bases are cached per distinct `|ξ|²` (an integer).
pub fn fit(config: &PolyConfig, fdata: &FourierData) -> Result<PolysplineModel> {
    fit_with_diagnostics(config, fdata).map(|(model, _)| model)
}

pub fn fit_with_diagnostics(
    config: &PolyConfig,
    fdata: &FourierData,
) -> Result<(PolysplineModel, FitDiagnostics)> {
    let frequencies = config.frequencies();
    for xi in &frequencies {
        if !fdata.coeffs.contains_key(xi) {
            return Err(Error::ModeNotCovered(xi.clone()));
        }
    }
    let mut diagnostics = FitDiagnostics::default();
    let mut basis_cache = BTreeMap::new();
    let mut modes = BTreeMap::new();
    for xi in frequencies {
        let data = &fdata.coeffs[&xi];
        let re: Vec<f64> = data.iter().map(|c| c.re).collect();
        let im: Vec<f64> = data.iter().map(|c| c.im).collect();
        let nsq = xi_norm_sq(&xi);
        let solved = if nsq == 0 {
            let re_s = natural_spline_zero(config.p, &config.knots, &re);
            let im_s = natural_spline_zero(config.p, &config.knots, &im);
            re_s.and_then(|r| im_s.map(|i| ComplexSpline1D { re: r, im: i }))
        } else {
            if let std::collections::btree_map::Entry::Vacant(e) = basis_cache.entry(nsq) {
                let params = KernelParams::new(config.p, (nsq as f64).sqrt())?;
                let basis = solve_lagrange(&params, &config.knots).map_err(|e| {
                    Error::ModeSolve {
                        xi: xi.clone(),
                        source: Box::new(e),
                    }
                })?;
                e.insert(basis);
            }
            let basis = &basis_cache[&nsq];
            diagnostics
                .cond_by_mode
                .insert(xi.clone(), basis.cond_estimate);
            Ok(ComplexSpline1D {
                re: interpolate(basis, &re),
                im: interpolate(basis, &im),
            })
        };
        let spline = solved.map_err(|e| match e {
            err @ Error::ModeSolve { .. } => err,
            other => Error::ModeSolve {
                xi: xi.clone(),
                source: Box::new(other),
            },
        })?;
        modes.insert(xi, spline);
    }
    // conjugate symmetry of the input decides whether the surface is real
    let mut real_data = true;
    'outer: for (xi, vals) in &fdata.coeffs {
        let neg: Vec<i64> = xi.iter().map(|&q| -q).collect();
        if let Some(nvals) = fdata.coeffs.get(&neg) {
            for (a, b) in vals.iter().zip(nvals) {
                let scale = a.norm().max(b.norm()).max(1e-300);
                if (a - b.conj()).norm() > 1e-10 * scale.max(1.0) {
                    real_data = false;
                    break 'outer;
                }
            }
        }
    }
    Ok((
        PolysplineModel {
            config: config.clone(),
            modes,
            real_data,
        },
        diagnostics,
    ))
}

impl PolysplineModel {
    /// Truncated synthesis of `∂_t^m ∂_y^β S` at `(t, y)`.
    pub fn evaluate(&self, t: f64, y: &[f64], m: usize, beta: &[usize]) -> Result<Complex64> {
        self.check_deriv(m, beta)?;
        assert_eq!(y.len(), self.config.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (xi, spline) in &self.modes {
            let base = spline.eval_deriv(t, m)?;
            acc += base * mode_phase_factor(xi, y, beta);
        }
        Ok(acc)
    }

    pub fn evaluate_value(&self, t: f64, y: &[f64]) -> Result<Complex64> {
        let beta = vec![0usize; self.config.n];
        self.evaluate(t, y, 0, &beta)
    }

    /// Real part, for real input data (the imaginary part is round-off).
    pub fn evaluate_real(&self, t: f64, y: &[f64], m: usize, beta: &[usize]) -> Result<f64> {
        Ok(self.evaluate(t, y, m, beta)?.re)
    }

    fn check_deriv(&self, m: usize, beta: &[usize]) -> Result<()> {
        let total = m + beta.iter().sum::<usize>();
        let max = 2 * self.config.p - 2;
        if total > max {
            return Err(Error::DerivativeOrderTooHigh { m: total, max });
        }
        Ok(())
    }

    /// Batched evaluation over the tensor grid `t_grid × y_axes`, row-major
    /// with `t` outermost, then the `y` axes in order. One derivative-pieces
    /// pass per mode, shared across all grid points.
    pub fn evaluate_grid(
        &self,
        t_grid: &[f64],
        y_axes: &[Vec<f64>],
        m: usize,
        beta: &[usize],
    ) -> Result<Vec<Complex64>> {
        self.check_deriv(m, beta)?;
        assert_eq!(y_axes.len(), self.config.n);
        let y_sizes: Vec<usize> = y_axes.iter().map(|a| a.len()).collect();
        let y_total: usize = y_sizes.iter().product();
        let mut out = vec![Complex64::new(0.0, 0.0); t_grid.len() * y_total];

        for (xi, spline) in &self.modes {
            let re_pieces = spline.re.derivative_pieces(m);
            let im_pieces = spline.im.derivative_pieces(m);
            // per-axis phase tables for this mode
            let phases: Vec<Vec<Complex64>> = (0..self.config.n)
                .map(|a| {
                    y_axes[a]
                        .iter()
                        .map(|&yv| Complex64::from_polar(1.0, xi[a] as f64 * yv))
                        .collect()
                })
                .collect();
            let deriv_factor = beta_factor(xi, beta);
            for (ti, &t) in t_grid.iter().enumerate() {
                let base = spline.eval_pieces(&re_pieces, &im_pieces, t) * deriv_factor;
                if base.norm_sqr() == 0.0 {
                    continue;
                }
                for yflat in 0..y_total {
                    let mut idx = yflat;
                    let mut ph = Complex64::new(1.0, 0.0);
                    for a in (0..self.config.n).rev() {
                        ph *= phases[a][idx % y_sizes[a]];
                        idx /= y_sizes[a];
                    }
                    out[ti * y_total + yflat] += base * ph;
                }
            }
        }
        Ok(out)
    }

    /// Largest interpolation defect over all hyperplanes and grid nodes,
    /// relative to the data sup-norm.
    pub fn hyperplane_residual(&self, data: &HyperplaneData) -> Result<f64> {
        let axis = self.config.grid_axis();
        let axes: Vec<Vec<f64>> = (0..self.config.n).map(|_| axis.clone()).collect();
        let scale = data
            .slices
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
            .max(1e-300);
        let beta = vec![0usize; self.config.n];
        let mut worst: f64 = 0.0;
        for (j, &tj) in self.config.knots.knots().iter().enumerate() {
            let values = self.evaluate_grid(&[tj], &axes, 0, &beta)?;
            for (idx, &got) in values.iter().enumerate() {
                worst = worst.max((got.re - data.slices[j][idx]).abs().max(got.im.abs()));
            }
        }
        Ok(worst / scale)
    }
}

fn beta_factor(xi: &[i64], beta: &[usize]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (a, &b) in beta.iter().enumerate() {
        for _ in 0..b {
            acc *= Complex64::new(0.0, xi[a] as f64);
        }
    }
    acc
}

fn mode_phase_factor(xi: &[i64], y: &[f64], beta: &[usize]) -> Complex64 {
    let angle: f64 = xi.iter().zip(y).map(|(&q, &yv)| q as f64 * yv).sum();
    beta_factor(xi, beta) * Complex64::from_polar(1.0, angle)
}

impl ComplexSpline1D {
    /// Flat list of defining coefficients, for reproducibility comparisons.
    pub fn rbf_or_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(r) = &self.re.rbf_coeffs {
            out.extend_from_slice(r);
        }
        if let Some(i) = &self.im.rbf_coeffs {
            out.extend_from_slice(i);
        }
        out.extend_from_slice(&self.re.poly_part);
        out.extend_from_slice(&self.im.poly_part);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn config_n1() -> PolyConfig {
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        PolyConfig::new(2, knots, 1, 2, 8).unwrap()
    }

    /// Band-limited random slices via synthesis from random coefficients.
    fn random_data(config: &PolyConfig, seed: u64) -> HyperplaneData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axis = config.grid_axis();
        let mut slices = Vec::new();
        for _ in 0..config.knots.len() {
            // conjugate-symmetric coefficients -> real slice
            let mut coeffs: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
            for xi in config.frequencies() {
                let neg: Vec<i64> = xi.iter().map(|&q| -q).collect();
                if coeffs.contains_key(&neg) {
                    let c = coeffs[&neg].conj();
                    coeffs.insert(xi, c);
                } else if xi.iter().all(|&q| q == 0) {
                    coeffs.insert(xi, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
                } else {
                    coeffs.insert(
                        xi,
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    );
                }
            }
            let mut slice = Vec::with_capacity(config.grid_size());
            for idx in 0..config.grid_size() {
                let gi = config.decode_grid_index(idx);
                let y: Vec<f64> = gi.iter().map(|&i| axis[i]).collect();
                slice.push(synthesize(&coeffs, &y).re);
            }
            slices.push(slice);
        }
        HyperplaneData::new(slices, config, Provenance::SyntheticFourier).unwrap()
    }

    #[test]
    fn frequency_enumeration() {
        let config = config_n1();
        let freqs = config.frequencies();
        assert_eq!(freqs.len(), 5);
        assert_eq!(freqs[0], vec![-2]);
        assert_eq!(freqs[4], vec![2]);
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        let c2 = PolyConfig::new(2, knots, 2, 1, 4).unwrap();
        assert_eq!(c2.frequencies().len(), 9);
        assert_eq!(c2.mode_count(), 9);
    }

    #[test]
    fn grid_too_coarse_rejected() {
        let knots = KnotSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            PolyConfig::new(2, knots, 1, 4, 8),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn analyze_single_cosine() {
        let config = config_n1();
        let axis = config.grid_axis();
        let slices: Vec<Vec<f64>> = (0..3)
            .map(|_| axis.iter().map(|&y| y.cos()).collect())
            .collect();
        let data = HyperplaneData::new(slices, &config, Provenance::Sampled).unwrap();
        let fd = analyze(&config, &data).unwrap();
        for (xi, vals) in &fd.coeffs {
            let want = if xi[0].abs() == 1 { 0.5 } else { 0.0 };
            for v in vals {
                assert_abs_diff_eq!(v.re, want, epsilon = 1e-13);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-13);
            }
        }
        assert!(fd.discarded_energy.iter().all(|&e| e <= 1e-26));
    }

    #[test]
    fn analyze_constant_slice() {
        let config = config_n1();
        let slices: Vec<Vec<f64>> = (0..3).map(|_| vec![2.5; config.grid_size()]).collect();
        let data = HyperplaneData::new(slices, &config, Provenance::Sampled).unwrap();
        let fd = analyze(&config, &data).unwrap();
        for (xi, vals) in &fd.coeffs {
            let want = if xi[0] == 0 { 2.5 } else { 0.0 };
            for v in vals {
                assert_abs_diff_eq!(v.re, want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn analyze_roundtrip_band_limited() {
        let config = config_n1();
        let data = random_data(&config, 11);
        let fd = analyze(&config, &data).unwrap();
        let axis = config.grid_axis();
        for (j, slice) in data.slices.iter().enumerate() {
            let per_slice: BTreeMap<Vec<i64>, Complex64> = fd
                .coeffs
                .iter()
                .map(|(xi, vals)| (xi.clone(), vals[j]))
                .collect();
            for (idx, &v) in slice.iter().enumerate() {
                let gi = config.decode_grid_index(idx);
                let y: Vec<f64> = gi.iter().map(|&i| axis[i]).collect();
                let back = synthesize(&per_slice, &y);
                assert_abs_diff_eq!(back.re, v, epsilon = 1e-12);
                assert_abs_diff_eq!(back.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fit_zero_data_gives_zero_model() {
        let config = config_n1();
        let slices: Vec<Vec<f64>> = (0..3).map(|_| vec![0.0; config.grid_size()]).collect();
        let data = HyperplaneData::new(slices, &config, Provenance::Sampled).unwrap();
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        assert_eq!(model.modes.len(), 5);
        let v = model.evaluate_value(0.7, &[1.1]).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn single_mode_data_stays_single_mode() {
        let config = config_n1();
        let axis = config.grid_axis();
        // f_j(y) = c_j e^{i 1·y} + conjugate -> real single-|ξ| data
        let c = [0.3, -0.8, 0.5];
        let slices: Vec<Vec<f64>> = c
            .iter()
            .map(|&cj| axis.iter().map(|&y| 2.0 * cj * y.cos()).collect())
            .collect();
        let data = HyperplaneData::new(slices, &config, Provenance::Sampled).unwrap();
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        for (xi, spline) in &model.modes {
            let energy = spline.data_l1();
            if xi[0].abs() == 1 {
                assert!(energy > 0.1);
            } else {
                assert!(energy <= 1e-13, "leak into mode {xi:?}: {energy}");
            }
        }
    }

    #[test]
    fn model_reproduces_slices_at_hyperplanes() {
        let config = config_n1();
        let data = random_data(&config, 23);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        assert!(model.real_data);
        let res = model.hyperplane_residual(&data).unwrap();
        assert!(res <= 1e-9, "residual {res:.3e}");
    }

    #[test]
    fn y_average_is_zero_mode() {
        let config = config_n1();
        let data = random_data(&config, 5);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        let t = 0.37;
        let mgrid = 64usize;
        let mut avg = Complex64::new(0.0, 0.0);
        for k in 0..mgrid {
            let y = 2.0 * std::f64::consts::PI * k as f64 / mgrid as f64;
            avg += model.evaluate_value(t, &[y]).unwrap();
        }
        avg /= mgrid as f64;
        let zero = model.modes[&vec![0i64]].eval_deriv(t, 0).unwrap();
        assert_abs_diff_eq!(avg.re, zero.re, epsilon = 1e-12);
        assert_abs_diff_eq!(avg.im, zero.im, epsilon = 1e-12);
    }

    #[test]
    fn deep_tail_reduces_to_zero_mode() {
        let config = config_n1();
        let data = random_data(&config, 9);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        let t = config.knots.last() + 40.0;
        let zero = model.modes[&vec![0i64]].eval_deriv(t, 0).unwrap();
        for &y in &[0.0, 1.0, 2.2] {
            let v = model.evaluate_value(t, &[y]).unwrap();
            assert!((v - zero).norm() <= 1e-10);
        }
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let config = config_n1();
        let data = random_data(&config, 31);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        let t_grid = [0.2, 1.5];
        let y_grid = vec![vec![0.0, 1.0, 4.0]];
        for (m, beta) in [(0usize, vec![0usize]), (1, vec![1]), (0, vec![2])] {
            let batch = model.evaluate_grid(&t_grid, &y_grid, m, &beta).unwrap();
            for (ti, &t) in t_grid.iter().enumerate() {
                for (yi, &y) in y_grid[0].iter().enumerate() {
                    let single = model.evaluate(t, &[y], m, &beta).unwrap();
                    let b = batch[ti * 3 + yi];
                    assert!((single - b).norm() <= 1e-12 * (1.0 + single.norm()));
                }
            }
        }
    }

    #[test]
    fn derivative_order_capped() {
        let config = config_n1();
        let data = random_data(&config, 2);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        assert!(matches!(
            model.evaluate(0.5, &[0.1], 2, &[1]),
            Err(Error::DerivativeOrderTooHigh { .. })
        ));
    }

    #[test]
    fn real_data_has_small_imaginary_part() {
        let config = config_n1();
        let data = random_data(&config, 77);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        let scale = data
            .slices
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()));
        for i in 0..40 {
            let t = -1.0 + 4.0 * i as f64 / 39.0;
            let y = std::f64::consts::TAU * (i as f64 * 0.618).fract();
            let v = model.evaluate_value(t, &[y]).unwrap();
            assert!(v.im.abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn fit_is_idempotent_on_its_range() {
        // evaluate a fitted model on the hyperplane grid, re-analyze, re-fit:
        // the per-mode splines must reproduce.
        let config = config_n1();
        let data = random_data(&config, 41);
        let model = fit(&config, &analyze(&config, &data).unwrap()).unwrap();
        let axis = config.grid_axis();
        let axes: Vec<Vec<f64>> = vec![axis.clone()];
        let beta = vec![0usize];
        let mut slices = Vec::new();
        for &tj in config.knots.knots() {
            let vals = model.evaluate_grid(&[tj], &axes, 0, &beta).unwrap();
            slices.push(vals.iter().map(|c| c.re).collect::<Vec<f64>>());
        }
        let data2 = HyperplaneData::new(slices, &config, Provenance::Sampled).unwrap();
        let model2 = fit(&config, &analyze(&config, &data2).unwrap()).unwrap();
        for (xi, s1) in &model.modes {
            let s2 = &model2.modes[xi];
            let a = s1.rbf_or_values();
            let b = s2.rbf_or_values();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
        }
    }
}
