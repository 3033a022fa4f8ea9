//! Click statistics of realistic single-photon sources.
//!
//! A source copy is a lossy single photon (emission/collection efficiency
//! `eta`) accompanied by independent Poissonian background noise of mean
//! `nbar` in separate modes, so signal and noise click contributions
//! factorize. Single copies feed the two-detector layouts; two copies feed
//! the three-detector layouts, where two-photon interference is weighted by
//! the indistinguishability overlap.
//!
//! Partial first-order coherence in the Mach-Zehnder is a convex blend
//! between the interfering and the phase-averaged detector intensities;
//! background noise is routed with its own blend weight and never interferes
//! with the signal.

use serde::Serialize;

use crate::click::{ClickStats, DetectorModel, Provenance};
use crate::error::{Error, Result};
use crate::layout::{LayoutKind, LayoutSpec};

/// Parameters of one source copy (and the pair overlap for two-copy tests).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SourceParams {
    /// Probability that the copy delivers its single photon.
    pub eta: f64,
    /// Mean background photons per copy.
    pub nbar: f64,
    /// First-order coherence of the photon in an interferometer:
    /// 1 = monochromatic (full visibility), 0 = polychromatic.
    pub signal_coherence: f64,
    /// Same for the background noise; 0 keeps the noise non-interfering.
    pub noise_coherence: f64,
    /// Mode overlap of the two copies at a shared splitter (two-copy only).
    pub indistinguishability: f64,
}

fn check_range(x: f64, lo: f64, hi: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x < lo || x > hi {
        return Err(Error::Domain(format!(
            "{name} must lie in [{lo}, {hi}], got {x}"
        )));
    }
    Ok(())
}

impl SourceParams {
    /// Monochromatic signal, non-interfering noise, fully indistinguishable
    /// copies.
    pub fn new(eta: f64, nbar: f64) -> Result<Self> {
        check_range(eta, 0.0, 1.0, "eta")?;
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::Domain(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok(SourceParams {
            eta,
            nbar,
            signal_coherence: 1.0,
            noise_coherence: 0.0,
            indistinguishability: 1.0,
        })
    }

    pub fn with_signal_coherence(mut self, v: f64) -> Result<Self> {
        check_range(v, 0.0, 1.0, "signal_coherence")?;
        self.signal_coherence = v;
        Ok(self)
    }

    pub fn with_noise_coherence(mut self, v: f64) -> Result<Self> {
        check_range(v, 0.0, 1.0, "noise_coherence")?;
        self.noise_coherence = v;
        Ok(self)
    }

    pub fn with_indistinguishability(mut self, v: f64) -> Result<Self> {
        check_range(v, 0.0, 1.0, "indistinguishability")?;
        self.indistinguishability = v;
        Ok(self)
    }
}

/// Per-detector arrival probabilities of a single emitted photon.
#[derive(Clone, Debug, Serialize)]
pub struct PhotonPlacement {
    pub probs: Vec<f64>,
}

/// Mach-Zehnder detector intensities per unit input, at internal phase `phi`.
fn mz_coherent_split(t1: f64, t2: f64, phi: f64) -> [f64; 2] {
    let (r1, r2) = (1.0 - t1, 1.0 - t2);
    let cross = 2.0 * phi.cos() * (t1 * t2 * r1 * r2).sqrt();
    [t1 * r2 + t2 * r1 + cross, t1 * t2 + r1 * r2 - cross]
}

/// Phase-averaged Mach-Zehnder split (the interference term drops out).
fn mz_incoherent_split(t1: f64, t2: f64) -> [f64; 2] {
    let (r1, r2) = (1.0 - t1, 1.0 - t2);
    [t1 * r2 + t2 * r1, t1 * t2 + r1 * r2]
}

/// Arrival probabilities of the signal photon behind the Mach-Zehnder,
/// blending the interfering and phase-averaged splits with the signal
/// coherence.
pub fn mz_photon_placement(p: &SourceParams, layout: &LayoutSpec) -> Result<PhotonPlacement> {
    if layout.kind != LayoutKind::MachZehnder {
        return Err(Error::WrongLayout {
            expected: "mach-zehnder",
            got: layout.kind.name().into(),
        });
    }
    let v = p.signal_coherence;
    let coh = mz_coherent_split(layout.t1, layout.t2, layout.phase);
    let inc = mz_incoherent_split(layout.t1, layout.t2);
    let probs: Vec<f64> = (0..2).map(|i| v * coh[i] + (1.0 - v) * inc[i]).collect();
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    Ok(PhotonPlacement { probs })
}

/// Arrival probabilities of a photon entering `port`, ignoring interference
/// (valid whenever only that port feeds the photon's mode).
fn port_placement(layout: &LayoutSpec, port: usize) -> Vec<f64> {
    layout
        .transfer()
        .column(port)
        .iter()
        .map(|a| a.norm_sqr())
        .collect()
}

/// Mean background photons arriving at each detector.
///
/// The Mach-Zehnder blends interfering and averaged routing with the noise
/// coherence; the remaining layouts route each copy's noise through the
/// intensity pattern of its own input port (single-port routing is
/// phase-insensitive, so the noise never interferes there). The means always
/// sum to the total injected noise.
pub fn noise_detector_means(p: &SourceParams, layout: &LayoutSpec) -> Result<Vec<f64>> {
    let means = match layout.kind {
        LayoutKind::MachZehnder => {
            let w = p.noise_coherence;
            let coh = mz_coherent_split(layout.t1, layout.t2, layout.phase);
            let inc = mz_incoherent_split(layout.t1, layout.t2);
            (0..2)
                .map(|i| p.nbar * (w * coh[i] + (1.0 - w) * inc[i]))
                .collect()
        }
        LayoutKind::UnbalancedBs => {
            let split = port_placement(layout, layout.input_ports[0]);
            split.iter().map(|q| p.nbar * q).collect()
        }
        LayoutKind::HomExtended | LayoutKind::TwoCopyVariant => {
            let mut means = vec![0.0; layout.dim()];
            for &port in &layout.input_ports {
                for (i, q) in port_placement(layout, port).iter().enumerate() {
                    means[i] += p.nbar * q;
                }
            }
            means
        }
    };
    Ok(means)
}

/// `1 - exp(-nu_i m_i)` per detector: the probability that background noise
/// alone fires detector `i`.
fn noise_click_probs(means: &[f64], det: &DetectorModel) -> Vec<f64> {
    means
        .iter()
        .enumerate()
        .map(|(i, m)| -(-det.efficiency(i) * m).exp_m1())
        .collect()
}

/// Success/error statistics of a single copy on a two-detector layout.
///
/// Conditioning on where the signal photon was seen keeps the assembly in
/// product form: detectors that did not see the photon must click via noise.
pub fn single_copy_click_stats(
    p: &SourceParams,
    layout: &LayoutSpec,
    det: &DetectorModel,
) -> Result<ClickStats> {
    let placement = match layout.kind {
        LayoutKind::UnbalancedBs => PhotonPlacement {
            probs: port_placement(layout, layout.input_ports[0]),
        },
        LayoutKind::MachZehnder => mz_photon_placement(p, layout)?,
        _ => {
            return Err(Error::WrongLayout {
                expected: "unbalanced-bs or mach-zehnder",
                got: layout.kind.name().into(),
            })
        }
    };
    if det.dim() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            got: det.dim(),
        });
    }
    let means = noise_detector_means(p, layout)?;
    let noise = noise_click_probs(&means, det);

    let all_click = |k: &[usize]| -> f64 {
        // photon seen at j in K, rest of K clicks via noise
        let mut total = 0.0;
        let mut p_seen_in_k = 0.0;
        for &j in k {
            let seen = p.eta * det.efficiency(j) * placement.probs[j];
            p_seen_in_k += seen;
            let mut term = seen;
            for &i in k {
                if i != j {
                    term *= noise[i];
                }
            }
            total += term;
        }
        // photon seen nowhere in K: every detector in K clicks via noise
        let mut term = 1.0 - p_seen_in_k;
        for &i in k {
            term *= noise[i];
        }
        total + term
    };

    let ps = all_click(&layout.success_pattern);
    let pe = all_click(&layout.error_pattern);
    ClickStats::new(ps, pe, Provenance::Source)
}

/// Joint arrival distribution of the two signal photons over detector pairs,
/// flattened as `[i * dim + j]` for `i <= j`.
///
/// `boson`: exchange paths add in amplitude (with the bunching enhancement
/// on the diagonal). `independent`: each photon routes on its own.
struct PairDistribution {
    boson: Vec<f64>,
    independent: Vec<f64>,
}

fn pair_distribution(layout: &LayoutSpec) -> PairDistribution {
    let m = layout.transfer();
    let a = m.column(layout.input_ports[0]);
    let b = m.column(layout.input_ports[1]);
    let dim = layout.dim();
    let mut boson = vec![0.0; dim * dim];
    let mut independent = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                boson[i * dim + j] = 2.0 * (a[i] * b[i]).norm_sqr();
                independent[i * dim + j] = a[i].norm_sqr() * b[i].norm_sqr();
            } else {
                boson[i * dim + j] = (a[i] * b[j] + a[j] * b[i]).norm_sqr();
                independent[i * dim + j] =
                    a[i].norm_sqr() * b[j].norm_sqr() + a[j].norm_sqr() * b[i].norm_sqr();
            }
        }
    }
    debug_assert!((boson.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    debug_assert!((independent.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    PairDistribution { boson, independent }
}

/// Success/error statistics of two source copies on a three-detector layout.
///
/// Enumerates the signal configuration (no photon, one photon from either
/// copy, or the interference-weighted pair), applies binomial detector
/// efficiency, and lets background noise fire the remaining detectors of each
/// pattern independently.
pub fn two_copy_click_stats(
    p: &SourceParams,
    layout: &LayoutSpec,
    det: &DetectorModel,
) -> Result<ClickStats> {
    if !matches!(
        layout.kind,
        LayoutKind::HomExtended | LayoutKind::TwoCopyVariant
    ) {
        return Err(Error::WrongLayout {
            expected: "hom-extended or two-copy",
            got: layout.kind.name().into(),
        });
    }
    if det.dim() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            got: det.dim(),
        });
    }
    let dim = layout.dim();
    let m = layout.transfer();
    let q_a: Vec<f64> = m
        .column(layout.input_ports[0])
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    let q_b: Vec<f64> = m
        .column(layout.input_ports[1])
        .iter()
        .map(|z| z.norm_sqr())
        .collect();

    // distribution over the set of detectors that saw a signal photon,
    // indexed by bitmask
    let mut seen = vec![0.0; 1 << dim];
    let eta = p.eta;

    // no signal photon
    seen[0] += (1.0 - eta) * (1.0 - eta);

    // exactly one photon (from either copy)
    for (w, q) in [(eta * (1.0 - eta), &q_a), ((1.0 - eta) * eta, &q_b)] {
        let mut unseen = w;
        for i in 0..dim {
            let s = w * q[i] * det.efficiency(i);
            seen[1 << i] += s;
            unseen -= s;
        }
        seen[0] += unseen;
    }

    // both photons, with the indistinguishability-weighted pair distribution
    let pair = pair_distribution(layout);
    let w_pair = eta * eta;
    let i_w = p.indistinguishability;
    for i in 0..dim {
        for j in i..dim {
            let prob =
                i_w * pair.boson[i * dim + j] + (1.0 - i_w) * pair.independent[i * dim + j];
            if prob == 0.0 {
                continue;
            }
            let w = w_pair * prob;
            let (ni, nj) = (det.efficiency(i), det.efficiency(j));
            seen[(1 << i) | (1 << j)] += w * ni * nj;
            seen[1 << i] += w * ni * (1.0 - nj);
            seen[1 << j] += w * (1.0 - ni) * nj;
            seen[0] += w * (1.0 - ni) * (1.0 - nj);
        }
    }
    debug_assert!((seen.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let means = noise_detector_means(p, layout)?;
    let noise = noise_click_probs(&means, det);
    let all_click = |k: &[usize]| -> f64 {
        let mut total = 0.0;
        for (mask, w) in seen.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let mut term = *w;
            for &i in k {
                if mask & (1 << i) == 0 {
                    term *= noise[i];
                }
            }
            total += term;
        }
        total
    };

    let ps = all_click(&layout.success_pattern);
    let pe = all_click(&layout.error_pattern);
    ClickStats::new(ps, pe, Provenance::Source)
}

/// Signal-to-noise ratio recovered from a balanced two-detector measurement.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HbtRatio {
    /// The `>= 1` branch; infinite when no error events were seen.
    pub ratio: f64,
    /// Both roots of the quadratic (large, small).
    pub roots: (f64, f64),
}

/// Inverts the small-probability balanced-splitter approximations
/// `P_s ~ (eta + nbar) / 2` and `P_e ~ eta nbar / 2` for the ratio
/// `x = eta / nbar`, which solves `x^2 - (2 P_s^2 / P_e - 2) x + 1 = 0`.
pub fn hbt_ratio_estimate(stats: &ClickStats) -> Result<HbtRatio> {
    let (ps, pe) = (stats.p_success, stats.p_error);
    if !(0.0..=1.0).contains(&ps) || !(0.0..=1.0).contains(&pe) || ps <= 0.0 {
        return Err(Error::Domain(format!(
            "need 0 < P_s <= 1 and 0 <= P_e <= 1, got ({ps}, {pe})"
        )));
    }
    if pe == 0.0 {
        return Ok(HbtRatio {
            ratio: f64::INFINITY,
            roots: (f64::INFINITY, 0.0),
        });
    }
    let b = 2.0 * ps * ps / pe - 2.0;
    if b < 2.0 {
        return Err(Error::Domain(format!(
            "no real solution: P_s^2 = {:.3e} is below 2 P_e = {:.3e}",
            ps * ps,
            2.0 * pe
        )));
    }
    let disc = (b * b - 4.0).sqrt();
    let large = 0.5 * (b + disc);
    let small = if large > 0.0 { 1.0 / large } else { 0.0 };
    Ok(HbtRatio {
        ratio: large,
        roots: (large, small),
    })
}
