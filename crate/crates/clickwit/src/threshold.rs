//! Witness maximization over classical light, threshold-curve tracing,
//! power-law fits, and classification of click statistics.
//!
//! For each penalty `a <= 0` the witness `W_a = P_s + a P_e` is maximized
//! over phase-randomized coherent inputs with a deterministic coarse grid
//! followed by golden-section refinement. Each maximum contributes both a
//! boundary point `(P_e*, P_s*)` and the affine bound
//! `P_s <= W_max(a) - a P_e`, valid for every classical state. Verdicts
//! interpolate with the lower envelope of those bounds, which upper-bounds
//! the classical region everywhere and so never flags classical light.

use rayon::prelude::*;
use serde::Serialize;

use crate::click::{ClickStats, DetectorModel, PatternEvaluator, Provenance};
use crate::error::{Error, Result};
use crate::layout::{LayoutKind, LayoutSpec};
use crate::source::{single_copy_click_stats, two_copy_click_stats, SourceParams};

/// Upper bound on optimized coherent magnitudes. Click probabilities saturate
/// well inside the cap, where the witness landscape goes flat; optima are
/// required to stay interior.
pub const MAGNITUDE_CAP: f64 = 8.0;
/// Distance to the cap below which an optimum counts as cap-bound.
const CAP_GUARD: f64 = 1e-6;
/// Coarse grid points per magnitude axis.
const COARSE_POINTS: usize = 64;
/// Golden-section parameter tolerance.
const PARAM_TOL: f64 = 1e-10;

/// Log-spaced sweep of the witness penalty magnitude `|a|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ASweep {
    pub min_abs: f64,
    pub max_abs: f64,
    pub points: usize,
}

impl Default for ASweep {
    fn default() -> Self {
        ASweep {
            min_abs: 1e-2,
            max_abs: 1e6,
            points: 200,
        }
    }
}

impl ASweep {
    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = (self.min_abs.ln(), self.max_abs.ln());
        (0..self.points)
            .map(|i| {
                let t = if self.points == 1 {
                    0.0
                } else {
                    i as f64 / (self.points - 1) as f64
                };
                -(lo + t * (hi - lo)).exp()
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points < 50 {
            return Err(Error::Domain(format!(
                "a-sweep needs at least 50 points, got {}",
                self.points
            )));
        }
        if !(self.min_abs > 0.0 && self.max_abs > self.min_abs) {
            return Err(Error::Domain("a-sweep bounds must satisfy 0 < min < max".into()));
        }
        if self.min_abs > 1e-2 * (1.0 + 1e-9) || self.max_abs < 1e6 * (1.0 - 1e-9) {
            return Err(Error::Domain(format!(
                "a-sweep must cover at least [1e-2, 1e6] in |a|, got [{:.3e}, {:.3e}]",
                self.min_abs, self.max_abs
            )));
        }
        Ok(())
    }
}

/// Result of one witness maximization.
#[derive(Clone, Debug)]
pub struct WitnessOptimum {
    pub a: f64,
    pub w_max: f64,
    pub magnitudes: Vec<f64>,
    pub stats: ClickStats,
}

/// One boundary point of a threshold curve.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub a: f64,
    pub p_error: f64,
    pub p_success: f64,
    pub magnitudes: Vec<f64>,
}

impl CurvePoint {
    /// Witness value reconstructed from the stored boundary point.
    pub fn w_max(&self) -> f64 {
        self.p_success + self.a * self.p_error
    }

    /// The affine classical bound this point certifies at a given `p_error`.
    pub fn line_at(&self, p_error: f64) -> f64 {
        self.w_max() - self.a * p_error
    }
}

/// Classical threshold curve of a layout: boundary points sorted by error
/// probability, concave and nondecreasing.
#[derive(Clone, Debug)]
pub struct ThresholdCurve {
    pub layout: LayoutSpec,
    pub points: Vec<CurvePoint>,
}

/// Verdict of a nonclassicality test.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Verdict {
    pub nonclassical: bool,
    /// `P_s - P_s_max(P_e)`; positive margins certify nonclassicality.
    pub margin: f64,
    pub threshold: f64,
    /// Set when `P_e` fell outside the sampled curve support.
    pub extrapolated: bool,
}

/// Power-law fit `P_s = prefactor * P_e^exponent` over a window.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    /// Largest relative deviation of the fit inside the window.
    pub residual: f64,
    pub points: usize,
}

/// Critical signal-to-noise ratio located by bisection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalRatio {
    pub eta: f64,
    pub nbar_critical: f64,
    pub ratio: f64,
}

/// Golden-section maximization on `[lo, hi]`; ties prefer the left (smaller)
/// argument, so plateaus resolve to the smallest magnitude.
fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > PARAM_TOL {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = (lo, f(lo));
    for (x, fx) in [(x1, f1), (x2, f2), (hi, f(hi))] {
        if fx > best.1 + 1e-18 || (fx >= best.1 - 1e-18 && x < best.0 && fx >= best.1) {
            best = (x, fx);
        }
    }
    best
}

fn coarse_grid() -> Vec<f64> {
    (0..COARSE_POINTS)
        .map(|i| MAGNITUDE_CAP * i as f64 / (COARSE_POINTS - 1) as f64)
        .collect()
}

fn maximize_1d(f: &impl Fn(f64) -> f64) -> (f64, f64) {
    let grid = coarse_grid();
    let mut best_i = 0;
    let mut best_w = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let w = f(x);
        if w > best_w + 1e-18 {
            best_w = w;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { 0.0 } else { grid[best_i - 1] };
    let hi = if best_i + 1 == grid.len() {
        MAGNITUDE_CAP
    } else {
        grid[best_i + 1]
    };
    let (x, w) = golden_max(f, lo, hi);
    if w > best_w || (w == best_w && x <= grid[best_i]) {
        (x, w)
    } else {
        (grid[best_i], best_w)
    }
}

/// 2-D maximization: coarse grid (on a cheap surrogate sharing the optimum
/// basin), then coordinate descent with golden sections and a line search
/// along each sweep's displacement, which removes the zigzag on correlated
/// landscapes. Brackets shrink with the observed movement.
fn maximize_2d(
    f_coarse: &impl Fn(f64, f64) -> f64,
    f: &impl Fn(f64, f64) -> f64,
) -> (f64, f64, f64) {
    let grid = coarse_grid();
    let step = MAGNITUDE_CAP / (COARSE_POINTS - 1) as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for &x in &grid {
        for &y in &grid {
            let w = f_coarse(x, y);
            if w > best.2 + 1e-18 {
                best = (x, y, w);
            }
        }
    }
    let clamp = |v: f64| v.clamp(0.0, MAGNITUDE_CAP);
    let (mut x, mut y) = (best.0, best.1);
    let mut h = 2.0 * step;
    for _ in 0..80 {
        let (x0, y0) = (x, y);
        let (nx, _) = golden_max(&|t| f(t, y), clamp(x - h), clamp(x + h));
        x = nx;
        let (ny, _) = golden_max(&|t| f(x, t), clamp(y - h), clamp(y + h));
        y = ny;
        let (dx, dy) = (x - x0, y - y0);
        if dx.abs() + dy.abs() > 0.0 {
            let g = |t: f64| f(clamp(x0 + t * dx), clamp(y0 + t * dy));
            let (t, _) = golden_max(&g, 0.0, 3.0);
            x = clamp(x0 + t * dx);
            y = clamp(y0 + t * dy);
        }
        let moved = (x - x0).abs() + (y - y0).abs();
        h = (4.0 * moved).clamp(1e3 * PARAM_TOL, 2.0 * step);
        if moved < PARAM_TOL {
            break;
        }
    }
    (x, y, f(x, y))
}

/// Maximizes `W_a = P_s + a P_e` over phase-randomized coherent inputs on the
/// layout (1-D in `|alpha|` for single-input layouts, 2-D in
/// `(|alpha|, |beta|)` for two-copy layouts).
///
/// The search runs a coarse grid with golden-section refinement inside
/// `[0, MAGNITUDE_CAP]` per axis. Click probabilities saturate beyond the
/// cap, so the remaining tail is searched exactly in the reciprocal
/// coordinate `u = 1/|alpha|^2`, whose endpoint `u = 0` is the bright-light
/// limit where every coupled detector clicks almost surely. Optima in the
/// tail are reported with their actual (possibly infinite) magnitudes.
///
/// The Mach-Zehnder is maximized at the phase stored in the layout; the
/// classical optimum over phases sits at zero, which [`threshold_curve`]
/// uses.
pub fn maximize_witness(
    layout: &LayoutSpec,
    a: f64,
    det: &DetectorModel,
    quad_nodes: usize,
) -> Result<WitnessOptimum> {
    if !a.is_finite() || a > 0.0 {
        return Err(Error::Domain(format!(
            "witness penalty must satisfy a <= 0, got {a}"
        )));
    }
    let eval = PatternEvaluator::new(layout, det, quad_nodes)?;
    let witness = |stats: (f64, f64)| stats.0 + a * stats.1;

    // magnitudes as Option: None encodes the exact bright-light limit
    let stats_of = |mags: &[Option<f64>]| -> (f64, f64) {
        if mags.iter().all(|m| m.is_some()) {
            let v: Vec<f64> = mags.iter().map(|m| m.unwrap()).collect();
            eval.stats_randomized(&v)
        } else {
            eval.stats_limit(mags)
        }
    };
    let mag_of = |u: f64| -> Option<f64> {
        if u == 0.0 {
            None
        } else {
            Some(1.0 / u.sqrt())
        }
    };
    let u_max = 1.0 / (MAGNITUDE_CAP * MAGNITUDE_CAP);

    let mut candidates: Vec<(Vec<Option<f64>>, f64)> = Vec::new();

    // search inside the box [0, cap]^n
    if layout.is_single_copy() {
        let f = |r: f64| witness(eval.stats_randomized(&[r]));
        let (r, w) = maximize_1d(&f);
        candidates.push((vec![Some(r)], w));
        // saturation tail in the reciprocal coordinate u = 1/r^2, with u = 0
        // the exact limit; captures optima beyond the box
        let tail = |u: f64| witness(stats_of(&[mag_of(u)]));
        let (u, w) = golden_max(&tail, 0.0, u_max);
        candidates.push((vec![mag_of(u)], w));
    } else {
        // the coarse scan only has to land in the right basin, so it runs on
        // a reduced phase grid; refinement uses the full one
        let coarse_eval = PatternEvaluator::new(layout, det, quad_nodes.clamp(16, 64))?;
        let fc = |r1: f64, r2: f64| witness(coarse_eval.stats_randomized(&[r1, r2]));
        let f = |r1: f64, r2: f64| witness(eval.stats_randomized(&[r1, r2]));
        let (r1, r2, w) = maximize_2d(&fc, &f);
        candidates.push((vec![Some(r1), Some(r2)], w));

        // tail searches: one or both coordinates in the reciprocal chart.
        // Only competitive when the box optimum presses the cap or the
        // saturation shelf value 1 + a comes close; skipped otherwise.
        let near_cap = r1 > MAGNITUDE_CAP - CAP_GUARD || r2 > MAGNITUDE_CAP - CAP_GUARD;
        if near_cap || 1.0 + a > w - 0.1 {
            let descend = |swap: bool| -> (Vec<Option<f64>>, f64) {
                let g = |u: f64, r: f64| {
                    let mags = if swap {
                        [Some(r), mag_of(u)]
                    } else {
                        [mag_of(u), Some(r)]
                    };
                    witness(stats_of(&mags))
                };
                let mut u = 0.0;
                let mut r = if swap { r1 } else { r2 };
                for _ in 0..4 {
                    u = golden_max(&|t| g(t, r), 0.0, u_max).0;
                    r = golden_max(&|t| g(u, t), 0.0, MAGNITUDE_CAP).0;
                }
                let w = g(u, r);
                let mags = if swap {
                    vec![Some(r), mag_of(u)]
                } else {
                    vec![mag_of(u), Some(r)]
                };
                (mags, w)
            };
            candidates.push(descend(false));
            candidates.push(descend(true));
            let g = |u1: f64, u2: f64| witness(stats_of(&[mag_of(u1), mag_of(u2)]));
            let (mut u1, mut u2) = (0.0, 0.0);
            for _ in 0..4 {
                u1 = golden_max(&|t| g(t, u2), 0.0, u_max).0;
                u2 = golden_max(&|t| g(u1, t), 0.0, u_max).0;
            }
            candidates.push((vec![mag_of(u1), mag_of(u2)], g(u1, u2)));
        }
    }

    let (best_mags, w_max) = candidates
        .into_iter()
        .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        .expect("candidate list is never empty");
    let stats = stats_of(&best_mags);
    let magnitudes = best_mags
        .iter()
        .map(|m| m.unwrap_or(f64::INFINITY))
        .collect();
    Ok(WitnessOptimum {
        a,
        w_max,
        magnitudes,
        stats: ClickStats::new(stats.0, stats.1, Provenance::Classical)?,
    })
}

/// Drops points that break monotonicity or concavity, keeping the upper
/// concave chain of the boundary sample.
fn concave_chain(mut points: Vec<CurvePoint>) -> Vec<CurvePoint> {
    points.sort_by(|p, q| {
        p.p_error
            .partial_cmp(&q.p_error)
            .unwrap()
            .then(p.p_success.partial_cmp(&q.p_success).unwrap())
    });
    // near-duplicate abscissae keep the highest success probability
    let mut dedup: Vec<CurvePoint> = Vec::with_capacity(points.len());
    for p in points {
        match dedup.last_mut() {
            Some(last) if (p.p_error - last.p_error).abs() <= 1e-15 * (1.0 + last.p_error) => {
                if p.p_success > last.p_success {
                    *last = p;
                }
            }
            _ => dedup.push(p),
        }
    }
    // success must be nondecreasing in error
    let mut mono: Vec<CurvePoint> = Vec::with_capacity(dedup.len());
    for p in dedup {
        if mono.last().map_or(true, |l| p.p_success >= l.p_success) {
            mono.push(p);
        }
    }
    // upper concave hull: slopes nonincreasing left to right
    let mut hull: Vec<CurvePoint> = Vec::with_capacity(mono.len());
    for p in mono {
        while hull.len() >= 2 {
            let b = &hull[hull.len() - 1];
            let a = &hull[hull.len() - 2];
            let cross = (b.p_success - a.p_success) * (p.p_error - a.p_error)
                - (p.p_success - a.p_success) * (b.p_error - a.p_error);
            if cross < 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Traces the classical threshold curve by sweeping the witness penalty.
/// Boundary points are sorted by `P_e`, deduplicated, and pruned to a concave
/// nondecreasing chain. Mach-Zehnder layouts are maximized at the optimal
/// internal phase zero, so one curve bounds every path difference.
pub fn threshold_curve(
    layout: &LayoutSpec,
    sweep: &ASweep,
    det: &DetectorModel,
    quad_nodes: usize,
) -> Result<ThresholdCurve> {
    sweep.validate()?;
    let canonical = if layout.kind == LayoutKind::MachZehnder {
        layout.with_phase(0.0)
    } else {
        layout.clone()
    };
    let results: Vec<Result<WitnessOptimum>> = sweep
        .values()
        .into_par_iter()
        .map(|a| maximize_witness(&canonical, a, det, quad_nodes))
        .collect();
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        let opt = r?;
        points.push(CurvePoint {
            a: opt.a,
            p_error: opt.stats.p_error,
            p_success: opt.stats.p_success,
            magnitudes: opt.magnitudes,
        });
    }
    Ok(ThresholdCurve {
        layout: canonical,
        points: concave_chain(points),
    })
}

/// Threshold value `P_s_max(p_error)` from the stored affine bounds: the
/// lower envelope of `W_max(a) - a P_e` over the sweep, clamped into [0, 1].
/// Sound by construction (each line bounds every classical state), tight at
/// the sampled boundary points, and between samples at least as large as the
/// chord through them.
pub fn threshold_at(points: &[CurvePoint], p_error: f64) -> (f64, bool) {
    assert!(!points.is_empty(), "threshold curves cannot be empty");
    let mut t = f64::INFINITY;
    for p in points {
        let line = p.line_at(p_error);
        if line < t {
            t = line;
        }
    }
    let t = t.clamp(0.0, 1.0);
    let lo = points.first().unwrap().p_error;
    let hi = points.last().unwrap().p_error;
    let extrapolated = p_error < lo * (1.0 - 1e-12) || p_error > hi * (1.0 + 1e-12);
    (t, extrapolated)
}

/// Margins below this are treated as ties: the envelope itself is only exact
/// to the optimizer tolerance, and classical states may sit exactly on it.
const VERDICT_TOL: f64 = 1e-12;

/// Classifies click statistics against curve points.
pub fn classify_points(points: &[CurvePoint], stats: &ClickStats) -> Verdict {
    let (threshold, extrapolated) = threshold_at(points, stats.p_error);
    let margin = stats.p_success - threshold;
    Verdict {
        nonclassical: margin > VERDICT_TOL,
        margin,
        threshold,
        extrapolated,
    }
}

/// True when the statistics exceed the classical threshold curve.
pub fn is_nonclassical(stats: &ClickStats, curve: &ThresholdCurve) -> Verdict {
    curve.classify(stats)
}

impl ThresholdCurve {
    pub fn classify(&self, stats: &ClickStats) -> Verdict {
        classify_points(&self.points, stats)
    }

    pub fn threshold_at(&self, p_error: f64) -> (f64, bool) {
        threshold_at(&self.points, p_error)
    }
}

/// Checks the stored-point invariants: `P_e` strictly increasing, `P_s`
/// nondecreasing, and every interior point on or above the chord of its
/// neighbours (within `1e-10`).
pub fn validate_curve_points(points: &[CurvePoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::MalformedCurve("curve holds no points".into()));
    }
    for w in points.windows(2) {
        if w[1].p_error < w[0].p_error {
            return Err(Error::MalformedCurve(format!(
                "p_error not sorted: {} after {}",
                w[1].p_error, w[0].p_error
            )));
        }
        if w[1].p_success + 1e-12 < w[0].p_success {
            return Err(Error::MalformedCurve(format!(
                "p_success decreases: {} after {}",
                w[1].p_success, w[0].p_success
            )));
        }
    }
    for w in points.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let span = c.p_error - a.p_error;
        if span <= 0.0 {
            continue;
        }
        let t = (b.p_error - a.p_error) / span;
        let chord = a.p_success + t * (c.p_success - a.p_success);
        if b.p_success < chord - 1e-10 {
            return Err(Error::MalformedCurve(format!(
                "concavity violated near p_error = {:.6e}",
                b.p_error
            )));
        }
    }
    Ok(())
}

/// Least-squares power law in log-log coordinates over a `P_e` window.
pub fn power_law_fit(points: &[CurvePoint], window: (f64, f64)) -> Result<PowerLawFit> {
    const MIN_POINTS: usize = 5;
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!(
            "fit window must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let selected: Vec<&CurvePoint> = points
        .iter()
        .filter(|p| p.p_error >= lo && p.p_error <= hi && p.p_error > 0.0 && p.p_success > 0.0)
        .collect();
    if selected.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints {
            lo,
            hi,
            count: selected.len(),
            min: MIN_POINTS,
        });
    }
    let n = selected.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in &selected {
        let x = p.p_error.ln();
        let y = p.p_success.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::Domain("degenerate fit window".into()));
    }
    let exponent = (n * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / n;
    let prefactor = intercept.exp();
    let residual = selected
        .iter()
        .map(|p| {
            let fit = prefactor * p.p_error.powf(exponent);
            (fit / p.p_success - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(PowerLawFit {
        exponent,
        prefactor,
        window,
        residual,
        points: selected.len(),
    })
}

fn source_stats(p: &SourceParams, layout: &LayoutSpec, det: &DetectorModel) -> Result<ClickStats> {
    if layout.is_single_copy() {
        single_copy_click_stats(p, layout, det)
    } else {
        two_copy_click_stats(p, layout, det)
    }
}

/// Locates the noise level where the verdict flips for a source of fixed
/// `eta`, by log-space bisection on `nbar` inside `[nbar_lo, nbar_hi]`, and
/// reports `eta / nbar` at the flip. The bracket must straddle the flip:
/// nonclassical at the low end, classical at the high end.
pub fn critical_noise_ratio(
    curve: &ThresholdCurve,
    layout: &LayoutSpec,
    base: &SourceParams,
    nbar_lo: f64,
    nbar_hi: f64,
    det: &DetectorModel,
) -> Result<CriticalRatio> {
    if !(nbar_lo > 0.0 && nbar_hi > nbar_lo) {
        return Err(Error::Domain(format!(
            "need 0 < nbar_lo < nbar_hi, got [{nbar_lo}, {nbar_hi}]"
        )));
    }
    let verdict_at = |nbar: f64| -> Result<bool> {
        let mut p = *base;
        p.nbar = nbar;
        let stats = source_stats(&p, layout, det)?;
        Ok(curve.classify(&stats).nonclassical)
    };
    if !verdict_at(nbar_lo)? || verdict_at(nbar_hi)? {
        return Err(Error::NoFlip {
            lo: nbar_lo,
            hi: nbar_hi,
        });
    }
    let (mut lo, mut hi) = (nbar_lo, nbar_hi);
    while hi / lo > 1.0 + 1e-9 {
        let mid = (lo.ln() + hi.ln()).mul_add(0.5, 0.0).exp();
        if verdict_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nbar_critical = (lo * hi).sqrt();
    Ok(CriticalRatio {
        eta: base.eta,
        nbar_critical,
        ratio: base.eta / nbar_critical,
    })
}
