//! Canonical figure-style data sets: threshold-curve families, their
//! small-error power-law approximations, source trajectories, and critical
//! signal-to-noise ratio tables. The CLI `reproduce` subcommand serializes
//! these; the acceptance suite checks their orderings.

use serde::Serialize;

use crate::click::DetectorModel;
use crate::error::Result;
use crate::layout::LayoutSpec;
use crate::source::{single_copy_click_stats, two_copy_click_stats, SourceParams};
use crate::threshold::{
    critical_noise_ratio, power_law_fit, threshold_curve, ASweep, ThresholdCurve,
};

/// Fixed first-splitter transmission of the interferometer family.
pub const FIG3_T1: f64 = 0.5;
/// Second-splitter transmissions of the interferometer family.
pub const FIG3_T2: [f64; 3] = [0.55, 0.6, 0.7];
/// Diagonal transmissions of the two-copy family.
pub const FIG4_T: [f64; 3] = [0.3, 0.5, 0.7];
/// Transmission grid for the two-copy ratio table.
pub const FIG4C_T: [f64; 4] = [0.6, 0.7, 0.8, 0.9];
/// Source efficiency used for state trajectories and ratio tables.
pub const STATE_ETA: f64 = 1e-3;

/// One source-trajectory sample classified against a curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StateRow {
    pub eta: f64,
    pub nbar: f64,
    pub p_success: f64,
    pub p_error: f64,
    pub nonclassical: bool,
    pub margin: f64,
}

/// Approximate-threshold ratio entry for the interferometer family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MzRatioRow {
    pub t2: f64,
    pub delta: f64,
    pub ratio_coherent: f64,
    pub ratio_polychromatic: f64,
}

/// Measured critical-ratio entry for the two-copy family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TwoCopyRatioRow {
    pub t: f64,
    pub ratio_indistinguishable: f64,
    pub ratio_distinguishable: f64,
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

/// Interferometer threshold curves for `t2` in [`FIG3_T2`] at `t1 = 1/2`.
pub fn mz_threshold_family(quad_nodes: usize) -> Result<Vec<(f64, ThresholdCurve)>> {
    FIG3_T2
        .iter()
        .map(|&t2| {
            let layout = LayoutSpec::mach_zehnder(FIG3_T1, t2, 0.0)?;
            let det = DetectorModel::ideal(2);
            let curve = threshold_curve(&layout, &ASweep::default(), &det, quad_nodes)?;
            Ok((t2, curve))
        })
        .collect()
}

/// Small-error approximation `P_s = 2 sqrt(T (1-T)) / |Delta| * sqrt(P_e)`
/// sampled on a log grid.
pub fn mz_approx_line(t1: f64, t2: f64, pe_lo: f64, pe_hi: f64, points: usize) -> Vec<(f64, f64)> {
    let delta = t1 + t2 - 1.0;
    let f = 2.0 * (t1 * (1.0 - t1)).sqrt() / delta.abs();
    log_grid(pe_lo, pe_hi, points)
        .into_iter()
        .map(|pe| (pe, f * pe.sqrt()))
        .collect()
}

/// Interferometer source trajectory: `nbar` swept at fixed `eta`, classified
/// against `curve`. `coherent` toggles full versus zero signal visibility;
/// the noise always propagates incoherently.
pub fn mz_state_line(
    t2: f64,
    coherent: bool,
    curve: &ThresholdCurve,
) -> Result<Vec<StateRow>> {
    let layout = LayoutSpec::mach_zehnder(FIG3_T1, t2, 0.0)?;
    let det = DetectorModel::ideal(2);
    let mut rows = Vec::new();
    for nbar in log_grid(1e-7, 1e-2, 40) {
        let p = SourceParams::new(STATE_ETA, nbar)?
            .with_signal_coherence(if coherent { 1.0 } else { 0.0 })?;
        let stats = single_copy_click_stats(&p, &layout, &det)?;
        let v = curve.classify(&stats);
        rows.push(StateRow {
            eta: STATE_ETA,
            nbar,
            p_success: stats.p_success,
            p_error: stats.p_error,
            nonclassical: v.nonclassical,
            margin: v.margin,
        });
    }
    Ok(rows)
}

/// Approximate critical ratio `eta / nbar = 8 T^2 (1-T)^2 C / Delta^2` with
/// `C = 1` for a fully coherent signal and `C = 2 / (1 - 2T + 2T^2)` for a
/// polychromatic one.
pub fn mz_ratio_table(t1: f64) -> Vec<MzRatioRow> {
    let base = 8.0 * t1 * t1 * (1.0 - t1) * (1.0 - t1);
    let c_poly = 2.0 / (1.0 - 2.0 * t1 + 2.0 * t1 * t1);
    (1..=30)
        .map(|i| {
            let delta = 0.01 * i as f64;
            MzRatioRow {
                t2: 1.0 - t1 + delta,
                delta,
                ratio_coherent: base / (delta * delta),
                ratio_polychromatic: base * c_poly / (delta * delta),
            }
        })
        .filter(|row| row.t2 <= 1.0)
        .collect()
}

/// Two-copy threshold curves for `t = t1 = t2` in [`FIG4_T`].
pub fn two_copy_threshold_family(quad_nodes: usize) -> Result<Vec<(f64, ThresholdCurve)>> {
    FIG4_T
        .iter()
        .map(|&t| {
            let layout = LayoutSpec::two_copy(t, t)?;
            let det = DetectorModel::ideal(3);
            let curve = threshold_curve(&layout, &ASweep::default(), &det, quad_nodes)?;
            Ok((t, curve))
        })
        .collect()
}

/// Fitted small-error approximation `P_s = f P_e^(2/3)` of a two-copy curve,
/// sampled on a log grid.
pub fn two_copy_approx_line(
    curve: &ThresholdCurve,
    pe_lo: f64,
    pe_hi: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    let fit = power_law_fit(&curve.points, (1e-8, 1e-4))?;
    Ok(log_grid(pe_lo, pe_hi, points)
        .into_iter()
        .map(|pe| (pe, fit.prefactor * pe.powf(fit.exponent)))
        .collect())
}

/// Two-copy source trajectory at fixed `eta`, swept over `nbar`.
pub fn two_copy_state_line(
    t: f64,
    indistinguishability: f64,
    curve: &ThresholdCurve,
) -> Result<Vec<StateRow>> {
    let layout = LayoutSpec::two_copy(t, t)?;
    let det = DetectorModel::ideal(3);
    let mut rows = Vec::new();
    for nbar in log_grid(1e-7, 1e-2, 40) {
        let p = SourceParams::new(STATE_ETA, nbar)?
            .with_indistinguishability(indistinguishability)?;
        let stats = two_copy_click_stats(&p, &layout, &det)?;
        let v = curve.classify(&stats);
        rows.push(StateRow {
            eta: STATE_ETA,
            nbar,
            p_success: stats.p_success,
            p_error: stats.p_error,
            nonclassical: v.nonclassical,
            margin: v.margin,
        });
    }
    Ok(rows)
}

/// Critical ratio of a two-copy layout at diagonal transmission `t`, measured
/// by bisection.
pub fn two_copy_critical_ratio(
    t: f64,
    indistinguishability: f64,
    eta: f64,
    quad_nodes: usize,
) -> Result<f64> {
    let layout = LayoutSpec::two_copy(t, t)?;
    let det = DetectorModel::ideal(3);
    let curve = threshold_curve(&layout, &ASweep::default(), &det, quad_nodes)?;
    let base = SourceParams::new(eta, 0.0)?.with_indistinguishability(indistinguishability)?;
    let r = critical_noise_ratio(&curve, &layout, &base, 1e-9, 1e-2, &det)?;
    Ok(r.ratio)
}

/// Measured critical-ratio table of the two-copy family over [`FIG4C_T`],
/// for indistinguishable and distinguishable copies.
pub fn two_copy_ratio_table(quad_nodes: usize) -> Result<Vec<TwoCopyRatioRow>> {
    FIG4C_T
        .iter()
        .map(|&t| {
            let layout = LayoutSpec::two_copy(t, t)?;
            let det = DetectorModel::ideal(3);
            let curve = threshold_curve(&layout, &ASweep::default(), &det, quad_nodes)?;
            let mut ratios = [0.0; 2];
            for (slot, indist) in ratios.iter_mut().zip([1.0, 0.0]) {
                let base =
                    SourceParams::new(STATE_ETA, 0.0)?.with_indistinguishability(indist)?;
                *slot = critical_noise_ratio(&curve, &layout, &base, 1e-9, 1e-2, &det)?.ratio;
            }
            Ok(TwoCopyRatioRow {
                t,
                ratio_indistinguishable: ratios[0],
                ratio_distinguishable: ratios[1],
            })
        })
        .collect()
}
