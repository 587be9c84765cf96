//! Surface-level analysis of a fitted model: the Duchon seminorm with its
//! dual-path per-mode computation, the orthogonality and variational checks,
//! Parseval identities, square-integrable tails, and the finite-difference
//! polyharmonicity probe.
//!
//! Per mode `ξ`, the seminorm contribution collapses multinomially to
//!
//! ```text
//! J_ξ = Σ_{m≤p} (p¦m) |ξ|^{2(p−m)} ∫ |Ŝ_ξ^{(m)}(t)|² dt
//!     = ∫ |(d/dt − |ξ|)^p Ŝ_ξ(t)|² dt,
//! ```
//!
//! and the total is `(2π)^n Σ_ξ J_ξ` with the torus surface factor written
//! once, here.

use num_complex::Complex64;

use crate::analysis::{laplacian_power_residual, PanelQuadrature};
use crate::error::{Error, Result};
use crate::exppoly::Piece;
use crate::spline1d::energy::energy_1d;
use crate::spline1d::NaturalSpline1D;
use crate::testfn::TestFunction;
use crate::transfinite::{xi_norm, ComplexSpline1D, PolysplineModel};

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn surface_factor(n: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powi(n as i32)
}

/// `∫_R |s^{(m)}|² dt` by exact piecewise integration (only called where the
/// integral converges: `ξ ≠ 0`, or `m ≥ p` on the polynomial path).
fn derivative_square_integral(s: &NaturalSpline1D, m: usize) -> f64 {
    s.derivative_pieces(m)
        .iter()
        .map(|piece| piece.square_integral())
        .sum()
}

/// Per-mode seminorm contributions, both routes.
#[derive(Debug, Clone)]
pub struct ModeSeminorm {
    pub xi: Vec<i64>,
    /// `(p¦m) |ξ|^{2(p−m)} ∫|Ŝ^{(m)}|²` for `m = 0..=p` (surface factor
    /// included).
    pub per_m: Vec<f64>,
    /// Binomial-sum route: `Σ per_m`.
    pub binomial: f64,
    /// Factored route: `(2π)^n ∫ |(d/dt − |ξ|)^p Ŝ_ξ|²`.
    pub factored: f64,
}

#[derive(Debug, Clone)]
pub struct SeminormReport {
    /// `‖S‖²` in the Duchon seminorm (binomial route).
    pub total: f64,
    pub modes: Vec<ModeSeminorm>,
}

impl SeminormReport {
    /// Largest relative disagreement between the two routes.
    pub fn max_route_gap(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let scale = m.binomial.abs().max(m.factored.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (m.binomial - m.factored).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Squared Duchon seminorm of the fitted surface, mode by mode with the
/// factored cross-check.
pub fn duchon_seminorm(model: &PolysplineModel) -> SeminormReport {
    let p = model.config.p;
    let sf = surface_factor(model.config.n);
    let mut modes = Vec::with_capacity(model.modes.len());
    let mut total = 0.0;
    for (xi, spline) in &model.modes {
        let norm = xi_norm(xi);
        let mut per_m = vec![0.0; p + 1];
        for (m, slot) in per_m.iter_mut().enumerate() {
            if norm == 0.0 && m < p {
                continue; // |ξ|^{2(p-m)} = 0 kills the divergent integrals
            }
            let weight = binomial(p, m) * norm.powi(2 * (p - m) as i32);
            let integral = derivative_square_integral(&spline.re, m)
                + derivative_square_integral(&spline.im, m);
            *slot = sf * weight * integral;
        }
        let binomial_total: f64 = per_m.iter().sum();
        let factored = sf * (energy_1d(&spline.re) + energy_1d(&spline.im));
        total += binomial_total;
        modes.push(ModeSeminorm {
            xi: xi.clone(),
            per_m,
            binomial: binomial_total,
            factored,
        });
    }
    SeminormReport { total, modes }
}

/// One mode of an admissible competitor perturbation
/// `G(t,y) = Σ_k amp_k · profile_k(t) · e^{i⟨ξ_k, y⟩}`.
#[derive(Debug, Clone)]
pub struct CompetitorMode {
    pub xi: Vec<i64>,
    pub amp: Complex64,
    pub profile: TestFunction,
}

fn check_competitor(modes: &[CompetitorMode], knots: &[f64]) -> Result<()> {
    for mode in modes {
        let scale = mode.profile.sup_scan().max(1e-300);
        for &tj in knots {
            if mode.profile.eval(tj).abs() > 1e-8 * scale {
                return Err(Error::NotVanishingAtKnots(tj));
            }
        }
    }
    for (i, a) in modes.iter().enumerate() {
        for b in modes.iter().skip(i + 1) {
            assert!(a.xi != b.xi, "competitor modes must have distinct ξ");
        }
    }
    Ok(())
}

fn quad_breaks(knots: &[f64], quad: &PanelQuadrature, lo: f64, hi: f64, width: f64) -> Quadrator {
    Quadrator {
        knots: knots.to_vec(),
        quad: quad.clone(),
        lo,
        hi,
        width,
    }
}

struct Quadrator {
    knots: Vec<f64>,
    quad: PanelQuadrature,
    lo: f64,
    hi: f64,
    width: f64,
}

impl Quadrator {
    fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut cuts = vec![self.lo];
        cuts.extend(
            self.knots
                .iter()
                .copied()
                .filter(|&b| b > self.lo && b < self.hi),
        );
        cuts.push(self.hi);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += self.quad.integrate(w[0], w[1], self.width, &mut f);
        }
        total
    }
}

fn mode_window(spline: Option<&ComplexSpline1D>, profile: &TestFunction, knots: &[f64]) -> (f64, f64) {
    let scale = profile.sup_scan().max(1e-300);
    let (wlo, whi) = profile.window(1e-30 * scale);
    let first = knots[0];
    let last = *knots.last().unwrap();
    let pad = match spline {
        Some(s) if s.re.params.xi_norm > 0.0 => 45.0 / s.re.params.xi_norm,
        _ => 5.0,
    };
    (wlo.min(first) - 1.0, whi.max(last + pad))
}

/// `|⟨S, G⟩|` for an admissible competitor vanishing on the hyperplanes.
/// Reduces per mode; modes of `G` outside the model support contribute
/// exactly zero.
pub fn orthogonality_check(model: &PolysplineModel, g: &[CompetitorMode]) -> Result<f64> {
    Ok(inner_product(model, g)?.norm())
}

fn inner_product(model: &PolysplineModel, g: &[CompetitorMode]) -> Result<Complex64> {
    let knots = model.config.knots.knots();
    check_competitor(g, knots)?;
    let p = model.config.p;
    let sf = surface_factor(model.config.n);
    let quad = PanelQuadrature::new(32);
    let mut acc = Complex64::new(0.0, 0.0);
    for gm in g {
        let Some(spline) = model.modes.get(&gm.xi) else {
            continue;
        };
        let norm = xi_norm(&gm.xi);
        let (lo, hi) = mode_window(Some(spline), &gm.profile, knots);
        let width = 0.5 * model.config.knots.min_gap().min(1.0 / (1.0 + norm));
        let q = quad_breaks(knots, &quad, lo, hi, width);
        for m in 0..=p {
            if norm == 0.0 && m < p {
                continue;
            }
            let weight = binomial(p, m) * norm.powi(2 * (p - m) as i32);
            let re_pieces = spline.re.derivative_pieces(m);
            let im_pieces = spline.im.derivative_pieces(m);
            let gprof = gm.profile.derivative_n(m);
            let re_int = q.integrate(|t| {
                spline.eval_pieces(&re_pieces, &im_pieces, t).re * gprof.eval(t)
            });
            let im_int = q.integrate(|t| {
                spline.eval_pieces(&re_pieces, &im_pieces, t).im * gprof.eval(t)
            });
            // ∫ Ŝ^{(m)} conj(amp · g^{(m)}) dt, g real
            acc += sf * weight * Complex64::new(re_int, im_int) * gm.amp.conj();
        }
    }
    Ok(acc)
}

/// Squared seminorm of the competitor perturbation alone.
pub fn competitor_seminorm(model_config_n: usize, p: usize, knots: &[f64], g: &[CompetitorMode]) -> f64 {
    let sf = surface_factor(model_config_n);
    let quad = PanelQuadrature::new(32);
    let mut total = 0.0;
    for gm in g {
        let norm = xi_norm(&gm.xi);
        let (lo, hi) = mode_window(None, &gm.profile, knots);
        let q = quad_breaks(knots, &quad, lo, hi, 0.4);
        for m in 0..=p {
            if norm == 0.0 && m < p {
                continue;
            }
            let weight = binomial(p, m) * norm.powi(2 * (p - m) as i32);
            let gprof = gm.profile.derivative_n(m);
            let integral = q.integrate(|t| gprof.eval(t).powi(2));
            total += sf * weight * gm.amp.norm_sqr() * integral;
        }
    }
    total
}

/// One competitor comparison in the surface variational check.
#[derive(Debug, Clone)]
pub struct SurfaceMargin {
    pub seminorm_spline: f64,
    pub seminorm_competitor: f64,
    /// `‖S+G‖² − ‖S‖²`, strictly positive for admissible G ≢ 0.
    pub margin: f64,
    /// `‖G‖²`: the expected margin (orthogonality makes the cross term
    /// vanish).
    pub competitor_energy: f64,
    pub cross_term: f64,
}

/// `‖S + G‖²` versus `‖S‖²` for admissible perturbations. The affected
/// modes are integrated by one shared quadrature on both sides so the margin
/// measures the mathematics, not the quadrature bias.
pub fn variational_check(
    model: &PolysplineModel,
    competitors: &[Vec<CompetitorMode>],
) -> Result<Vec<SurfaceMargin>> {
    let knots = model.config.knots.knots();
    let p = model.config.p;
    let sf = surface_factor(model.config.n);
    let base = duchon_seminorm(model);
    let quad = PanelQuadrature::new(32);
    let mut out = Vec::with_capacity(competitors.len());
    for g in competitors {
        check_competitor(g, knots)?;
        let mut margin = 0.0;
        for gm in g {
            let norm = xi_norm(&gm.xi);
            let (lo, hi) = mode_window(model.modes.get(&gm.xi), &gm.profile, knots);
            let width = 0.5 * model.config.knots.min_gap().min(1.0 / (1.0 + norm));
            let q = quad_breaks(knots, &quad, lo, hi, width);
            for m in 0..=p {
                if norm == 0.0 && m < p {
                    continue;
                }
                let weight = binomial(p, m) * norm.powi(2 * (p - m) as i32);
                let gprof = gm.profile.derivative_n(m);
                let (e_f, e_s) = match model.modes.get(&gm.xi) {
                    Some(spline) => {
                        let re_pieces = spline.re.derivative_pieces(m);
                        let im_pieces = spline.im.derivative_pieces(m);
                        let e_f = q.integrate(|t| {
                            let s = spline.eval_pieces(&re_pieces, &im_pieces, t);
                            (s + gm.amp * gprof.eval(t)).norm_sqr()
                        });
                        let e_s = q.integrate(|t| {
                            spline.eval_pieces(&re_pieces, &im_pieces, t).norm_sqr()
                        });
                        (e_f, e_s)
                    }
                    None => (
                        q.integrate(|t| (gm.amp * gprof.eval(t)).norm_sqr()),
                        0.0,
                    ),
                };
                margin += sf * weight * (e_f - e_s);
            }
        }
        let competitor_energy = competitor_seminorm(model.config.n, p, knots, g);
        let cross = inner_product(model, g)?;
        out.push(SurfaceMargin {
            seminorm_spline: base.total,
            seminorm_competitor: base.total + margin,
            margin,
            competitor_energy,
            cross_term: 2.0 * cross.re,
        });
    }
    Ok(out)
}

/// Both sides of the Parseval identity for a band-limited test surface
/// `F = Σ_k amp_k profile_k(t) e^{i⟨ξ_k,y⟩}` and a derivative `(m, β)` with
/// `m + |β| = p`: direct `(t, y)` quadrature against the per-mode series.
pub fn parseval_check(
    n: usize,
    p: usize,
    f_modes: &[CompetitorMode],
    m: usize,
    beta: &[usize],
) -> (f64, f64) {
    assert_eq!(beta.len(), n);
    assert_eq!(
        m + beta.iter().sum::<usize>(),
        p,
        "check requires a derivative of total order p"
    );
    for (i, a) in f_modes.iter().enumerate() {
        for b in f_modes.iter().skip(i + 1) {
            assert!(a.xi != b.xi, "modes must be distinct");
        }
    }
    let sf = surface_factor(n);
    let quad = PanelQuadrature::new(32);

    // common t-window
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for fm in f_modes {
        let scale = fm.profile.sup_scan().max(1e-300);
        let (a, b) = fm.profile.window(1e-30 * scale);
        lo = lo.min(a);
        hi = hi.max(b);
    }

    // rhs: per-mode series
    let mut rhs = 0.0;
    for fm in f_modes {
        let xb: f64 = fm
            .xi
            .iter()
            .zip(beta)
            .map(|(&q, &b)| (q as f64).powi(2 * b as i32))
            .product();
        let prof_m = fm.profile.derivative_n(m);
        let integral = quad.integrate(lo, hi, 0.4, |t| prof_m.eval(t).powi(2));
        rhs += sf * xb * fm.amp.norm_sqr() * integral;
    }

    // lhs: direct quadrature; the y-grid integrates the squared band-limited
    // integrand exactly once it resolves twice the bandwidth.
    let k_max = f_modes
        .iter()
        .flat_map(|fm| fm.xi.iter().map(|q| q.unsigned_abs() as usize))
        .max()
        .unwrap_or(0);
    let grid = 4 * k_max + 1;
    let y_axis: Vec<f64> = (0..grid)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / grid as f64)
        .collect();
    let y_weight = (2.0 * std::f64::consts::PI / grid as f64).powi(n as i32);
    let profs: Vec<TestFunction> = f_modes.iter().map(|fm| fm.profile.derivative_n(m)).collect();
    let factors: Vec<Complex64> = f_modes
        .iter()
        .map(|fm| {
            let mut acc = fm.amp;
            for (a, &b) in beta.iter().enumerate() {
                for _ in 0..b {
                    acc *= Complex64::new(0.0, fm.xi[a] as f64);
                }
            }
            acc
        })
        .collect();

    let y_total = grid.pow(n as u32);
    let mut lhs = 0.0;
    for flat in 0..y_total {
        let mut idx = flat;
        let mut y = vec![0.0; n];
        for a in (0..n).rev() {
            y[a] = y_axis[idx % grid];
            idx /= grid;
        }
        let t_int = quad.integrate(lo, hi, 0.4, |t| {
            let mut v = Complex64::new(0.0, 0.0);
            for (k, fm) in f_modes.iter().enumerate() {
                let angle: f64 = fm.xi.iter().zip(&y).map(|(&q, &yv)| q as f64 * yv).sum();
                v += factors[k] * profs[k].eval(t) * Complex64::from_polar(1.0, angle);
            }
            v.norm_sqr()
        });
        lhs += y_weight * t_int;
    }
    (lhs, rhs)
}

/// Square-integrability of order-`p` derivatives over the two unbounded
/// strips, with the per-mode decay-law diagnostics.
#[derive(Debug, Clone)]
pub struct TailReport {
    /// `(ξ, tail seminorm, tail seminorm / (|ξ|^{p-1/2} Σ_j |f̂_{j,ξ}|))`
    /// for modes with nonzero data.
    pub per_mode: Vec<(Vec<i64>, f64, f64)>,
    /// Exact tail energy of the zero mode (must vanish by the natural
    /// conditions).
    pub zero_mode_tail: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub q_median: f64,
    /// Worst deviation from the decay law with the best-fitting constant:
    /// `sqrt(q_max / q_min)`. "Within a factor F of the law" means
    /// `law_factor ≤ F`.
    pub law_factor: f64,
}

fn tail_square_integral(pieces: &[Piece], m: usize) -> f64 {
    let first = pieces[0].derivative_n(m);
    let last = pieces[pieces.len() - 1].derivative_n(m);
    first.square_integral() + last.square_integral()
}

/// Exact per-mode tail energies `Σ_m (p¦m)|ξ|^{2(p−m)} ∫_{tails}|Ŝ^{(m)}|²`
/// and their ratios against the `|ξ|^{p−1/2}` law.
pub fn beppo_levi_tail_check(model: &PolysplineModel) -> TailReport {
    let p = model.config.p;
    let sf = surface_factor(model.config.n);
    let mut per_mode = Vec::new();
    let mut zero_mode_tail = 0.0;
    let mut qs: Vec<f64> = Vec::new();
    let data_scale: f64 = model
        .modes
        .values()
        .map(|s| s.data_l1())
        .fold(0.0, f64::max)
        .max(1e-300);
    for (xi, spline) in &model.modes {
        let norm = xi_norm(xi);
        if norm == 0.0 {
            // only the m = p term enters; natural conditions make it 0
            zero_mode_tail = sf
                * (tail_square_integral(&spline.re.pieces, p)
                    + tail_square_integral(&spline.im.pieces, p));
            continue;
        }
        let mut tail_energy = 0.0;
        for m in 0..=p {
            let weight = binomial(p, m) * norm.powi(2 * (p - m) as i32);
            tail_energy += sf
                * weight
                * (tail_square_integral(&spline.re.pieces, m)
                    + tail_square_integral(&spline.im.pieces, m));
        }
        let tail_norm = tail_energy.sqrt();
        let data_l1 = spline.data_l1();
        if data_l1 >= 1e-9 * data_scale {
            let q = tail_norm / (norm.powf(p as f64 - 0.5) * data_l1);
            qs.push(q);
            per_mode.push((xi.clone(), tail_norm, q));
        }
    }
    qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (q_min, q_max, q_median) = if qs.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (qs[0], qs[qs.len() - 1], qs[qs.len() / 2])
    };
    let law_factor = if q_min > 0.0 {
        (q_max / q_min).sqrt()
    } else {
        f64::INFINITY
    };
    TailReport {
        per_mode,
        zero_mode_tail,
        q_min,
        q_max,
        q_median,
        law_factor,
    }
}

/// Step size for the iterated-Laplacian probe, balancing stencil truncation
/// against the `h^{-2p}` round-off amplification at double precision.
pub fn polyharmonic_step(p: usize) -> f64 {
    match p {
        2 => 2e-2,
        3 => 5e-2,
        _ => 8e-2,
    }
}

#[derive(Debug, Clone)]
pub struct StripResiduals {
    pub strip: (f64, f64),
    /// `max |Δ^p S| / scale` over the sampled points.
    pub residual: f64,
    /// `max |Δ^{p−1} S| / scale`: must stay away from zero for generic
    /// models (the order is exactly p).
    pub lower_power: f64,
}

#[derive(Debug, Clone)]
pub struct PolyharmonicReport {
    pub strips: Vec<StripResiduals>,
    pub h: f64,
    pub residual_max: f64,
    pub lower_power_min: f64,
}

/// Finite-difference certificate of piecewise polyharmonicity: `Δ^p S ≈ 0`
/// inside every strip, while `Δ^{p−1} S` is generically not small.
///
/// Residuals are normalized by `Σ_ξ (1 + |ξ|²)^{p+1} sup |Ŝ_ξ|`, the natural
/// size of the cancelling terms (the extra power absorbs the stencil's
/// truncation factor).
pub fn polyharmonicity_check(
    model: &PolysplineModel,
    points_per_strip: usize,
) -> Result<PolyharmonicReport> {
    let p = model.config.p;
    let n = model.config.n;
    let h = polyharmonic_step(p);
    let clearance = 2.0 * p as f64 * h + 1e-3;
    let knots = model.config.knots.knots();

    let mut strips = vec![(knots[0] - 1.2, knots[0])];
    for w in knots.windows(2) {
        strips.push((w[0], w[1]));
    }
    strips.push((*knots.last().unwrap(), knots.last().unwrap() + 1.2));

    let beta0 = vec![0usize; n];
    let eval_re = |x: &[f64]| -> f64 {
        model
            .evaluate(x[0], &x[1..], 0, &beta0)
            .map(|c| c.re)
            .unwrap_or(f64::NAN)
    };

    let mut out = Vec::with_capacity(strips.len());
    let mut residual_max: f64 = 0.0;
    let mut lower_power_min = f64::INFINITY;
    for &(lo_s, hi_s) in &strips {
        let lo = lo_s + clearance;
        let hi = hi_s - clearance;
        if lo >= hi {
            return Err(Error::PointTooCloseToHyperplane {
                t: 0.5 * (lo_s + hi_s),
                knot: hi_s,
            });
        }
        // mode-magnitude scale over the strip
        let mut scale = 0.0;
        for (xi, spline) in &model.modes {
            let norm2 = xi.iter().map(|&q| (q * q) as f64).sum::<f64>();
            let mut sup: f64 = 0.0;
            for i in 0..=16 {
                let t = lo + (hi - lo) * i as f64 / 16.0;
                sup = sup.max(spline.eval_deriv(t, 0).unwrap().norm());
            }
            scale += (1.0 + norm2).powi(p as i32 + 1) * sup;
        }
        let scale = scale.max(1e-300);

        let golden = 0.618_033_988_749_894_9_f64;
        let mut residual: f64 = 0.0;
        let mut lower: f64 = 0.0;
        for i in 0..points_per_strip {
            let frac = (i as f64 + 0.5) / points_per_strip as f64;
            let t = lo + (hi - lo) * frac;
            let mut point = vec![t];
            for a in 0..n {
                point.push(2.0 * std::f64::consts::PI * ((i + a + 1) as f64 * golden).fract());
            }
            let r = laplacian_power_residual(&eval_re, &point, p, h);
            residual = residual.max(r.abs() / scale);
            let rl = laplacian_power_residual(&eval_re, &point, p - 1, h);
            lower = lower.max(rl.abs() / scale);
        }
        residual_max = residual_max.max(residual);
        lower_power_min = lower_power_min.min(lower);
        out.push(StripResiduals {
            strip: (lo_s, hi_s),
            residual,
            lower_power: lower,
        });
    }
    Ok(PolyharmonicReport {
        strips: out,
        h,
        residual_max,
        lower_power_min,
    })
}
