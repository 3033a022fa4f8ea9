//! Brute-force truncated photon-number simulator.
//!
//! Every analytic click probability in this crate can be cross-checked here:
//! sources are expanded into a mixture of photon-number branches, each branch
//! is propagated through the network amplitude by amplitude (exchange terms
//! included for photons sharing a mode label), and detectors respond
//! binomially. Only photons inside the same [`PhotonGroup`] interfere; groups
//! are independent, which models distinguishable labels and the
//! never-interfering background noise.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::click::{ClassicalInput, ClickStats, DetectorModel, Provenance};
use crate::error::{Error, Result};
use crate::layout::{LayoutKind, LayoutSpec};
use crate::network::TransferMatrix;

/// Tail mass allowed beyond the Poisson truncation.
pub const TAIL_LIMIT: f64 = 1e-12;
/// Default per-mode photon cutoff.
pub const DEFAULT_CUTOFF: usize = 8;

/// Photons sharing one mode label: counts per input port. Photons in one
/// group interfere; different groups never do. `phase_averaged` marks groups
/// that see a uniformly random interferometer phase (Mach-Zehnder only).
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonGroup {
    pub photons: Vec<(usize, u32)>,
    pub phase_averaged: bool,
}

impl PhotonGroup {
    pub fn total_photons(&self) -> u32 {
        self.photons.iter().map(|(_, n)| n).sum()
    }
}

/// One branch of the photon-number mixture.
#[derive(Clone, Debug)]
pub struct SourceBranch {
    pub weight: f64,
    pub groups: Vec<PhotonGroup>,
}

/// Mixture of photon-number branches for a source on a layout.
#[derive(Clone, Debug)]
pub struct JointPhotonDist {
    pub dim: usize,
    pub cutoff: usize,
    pub branches: Vec<SourceBranch>,
}

/// Truncated Poisson weights `e^{-mean} mean^n / n!` for `n = 0..=cutoff`,
/// erroring when the discarded tail exceeds [`TAIL_LIMIT`].
fn truncated_poisson(mean: f64, cutoff: usize) -> Result<Vec<f64>> {
    let mut weights = Vec::with_capacity(cutoff + 1);
    let mut term = (-mean).exp();
    let mut cumulative = 0.0;
    for n in 0..=cutoff {
        if n > 0 {
            term *= mean / n as f64;
        }
        weights.push(term);
        cumulative += term;
    }
    let tail = (1.0 - cumulative).max(0.0);
    if tail > TAIL_LIMIT {
        return Err(Error::TailMass {
            cutoff,
            tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(weights)
}

fn binomial_weights(n: u32, p: f64) -> Vec<f64> {
    let mut w = vec![0.0; n as usize + 1];
    for (k, slot) in w.iter_mut().enumerate() {
        let mut c = 1.0;
        for i in 0..k {
            c *= (n as usize - i) as f64 / (i + 1) as f64;
        }
        *slot = c * p.powi(k as i32) * (1.0 - p).powi((n as usize - k) as i32);
    }
    w
}

/// Expands `eta`/`nbar` source copies into photon-number branches.
///
/// Each copy contributes at most one signal photon (probability `eta`) plus
/// truncated-Poisson background noise in its own label. Two-copy signals are
/// split between a shared label (weight = indistinguishability) and separate
/// labels; Mach-Zehnder branches split signal and noise photons between
/// phase-stable and phase-averaged labels according to the coherence weights.
pub fn build_source_dist(
    p: &crate::source::SourceParams,
    layout: &LayoutSpec,
    copies: usize,
    cutoff: usize,
) -> Result<JointPhotonDist> {
    if cutoff < 4 {
        return Err(Error::Domain(format!(
            "cutoff must be at least 4, got {cutoff}"
        )));
    }
    if copies != layout.n_inputs() {
        return Err(Error::Domain(format!(
            "{} copies do not fit a layout with {} input ports",
            copies,
            layout.n_inputs()
        )));
    }
    let poisson = truncated_poisson(p.nbar, cutoff)?;
    let is_mz = layout.kind == LayoutKind::MachZehnder;

    // signal configurations: (weight, groups)
    let mut signal: Vec<(f64, Vec<PhotonGroup>)> = Vec::new();
    match copies {
        1 => {
            let port = layout.input_ports[0];
            let absent = 1.0 - p.eta;
            signal.push((absent, vec![]));
            if is_mz && p.signal_coherence < 1.0 {
                signal.push((
                    p.eta * p.signal_coherence,
                    vec![PhotonGroup {
                        photons: vec![(port, 1)],
                        phase_averaged: false,
                    }],
                ));
                signal.push((
                    p.eta * (1.0 - p.signal_coherence),
                    vec![PhotonGroup {
                        photons: vec![(port, 1)],
                        phase_averaged: true,
                    }],
                ));
            } else {
                signal.push((
                    p.eta,
                    vec![PhotonGroup {
                        photons: vec![(port, 1)],
                        phase_averaged: false,
                    }],
                ));
            }
        }
        2 => {
            let (pa, pb) = (layout.input_ports[0], layout.input_ports[1]);
            let one = |port| PhotonGroup {
                photons: vec![(port, 1)],
                phase_averaged: false,
            };
            signal.push(((1.0 - p.eta) * (1.0 - p.eta), vec![]));
            signal.push((p.eta * (1.0 - p.eta), vec![one(pa)]));
            signal.push(((1.0 - p.eta) * p.eta, vec![one(pb)]));
            let both = p.eta * p.eta;
            signal.push((
                both * p.indistinguishability,
                vec![PhotonGroup {
                    photons: vec![(pa, 1), (pb, 1)],
                    phase_averaged: false,
                }],
            ));
            signal.push((
                both * (1.0 - p.indistinguishability),
                vec![one(pa), one(pb)],
            ));
        }
        n => {
            return Err(Error::Domain(format!(
                "only 1 or 2 copies are supported, got {n}"
            )))
        }
    }

    // noise configurations per copy: (weight, Option<group>) expanded over
    // counts, with the Mach-Zehnder coherence split applied per photon
    let mut noise_per_copy: Vec<Vec<(f64, Vec<PhotonGroup>)>> = Vec::new();
    for &port in &layout.input_ports {
        let mut configs: Vec<(f64, Vec<PhotonGroup>)> = Vec::new();
        for (n, &w_n) in poisson.iter().enumerate() {
            if w_n == 0.0 {
                continue;
            }
            let n = n as u32;
            if n == 0 {
                configs.push((w_n, vec![]));
                continue;
            }
            if is_mz && p.noise_coherence < 1.0 {
                // broadband photons occupy separate frequency modes, so each
                // phase-averaged photon forms its own one-photon group
                let incoherent_groups = |count: u32| -> Vec<PhotonGroup> {
                    (0..count)
                        .map(|_| PhotonGroup {
                            photons: vec![(port, 1)],
                            phase_averaged: true,
                        })
                        .collect()
                };
                if p.noise_coherence == 0.0 {
                    configs.push((w_n, incoherent_groups(n)));
                } else {
                    for (k, w_k) in binomial_weights(n, p.noise_coherence).iter().enumerate() {
                        let mut groups = Vec::new();
                        if k > 0 {
                            groups.push(PhotonGroup {
                                photons: vec![(port, k as u32)],
                                phase_averaged: false,
                            });
                        }
                        groups.extend(incoherent_groups(n - k as u32));
                        configs.push((w_n * w_k, groups));
                    }
                }
            } else {
                configs.push((
                    w_n,
                    vec![PhotonGroup {
                        photons: vec![(port, n)],
                        phase_averaged: false,
                    }],
                ));
            }
        }
        noise_per_copy.push(configs);
    }

    let mut branches = Vec::new();
    for (w_sig, sig_groups) in &signal {
        if *w_sig == 0.0 {
            continue;
        }
        let mut stack: Vec<(f64, Vec<PhotonGroup>)> = vec![(*w_sig, sig_groups.clone())];
        for configs in &noise_per_copy {
            let mut next = Vec::new();
            for (w, groups) in &stack {
                for (w_n, noise_groups) in configs {
                    let mut g = groups.clone();
                    g.extend(noise_groups.iter().cloned());
                    next.push((w * w_n, g));
                }
            }
            stack = next;
        }
        for (w, groups) in stack {
            branches.push(SourceBranch { weight: w, groups });
        }
    }

    Ok(JointPhotonDist {
        dim: layout.dim(),
        cutoff,
        branches,
    })
}

/// Output amplitudes of `prod_p (sum_i A_{i p} a_i^dagger)^{n_p} / sqrt(n_p!)`
/// applied to the vacuum: the propagated Fock state of one same-label group.
fn amplitude_table(matrix: &TransferMatrix, photons: &[(usize, u32)]) -> Vec<(Vec<u8>, Complex64)> {
    let dim = matrix.dim();
    let mut state: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
    state.insert(vec![0u8; dim], Complex64::new(1.0, 0.0));
    let mut norm = 1.0;
    for &(port, count) in photons {
        let col = matrix.column(port);
        for _ in 0..count {
            let mut next: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            for (counts, amp) in &state {
                for (i, a) in col.iter().enumerate() {
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    let mut c = counts.clone();
                    c[i] += 1;
                    let contrib = amp * a * (c[i] as f64).sqrt();
                    *next.entry(c).or_insert(Complex64::new(0.0, 0.0)) += contrib;
                }
            }
            state = next;
        }
        for k in 2..=count as u64 {
            norm *= k as f64;
        }
    }
    let scale = 1.0 / norm.sqrt();
    state
        .into_iter()
        .map(|(counts, amp)| (counts, amp * scale))
        .collect()
}

/// Output photon-number distribution of one same-label group.
fn group_output_distribution(
    matrix: &TransferMatrix,
    photons: &[(usize, u32)],
) -> Vec<(Vec<u8>, f64)> {
    amplitude_table(matrix, photons)
        .into_iter()
        .map(|(counts, amp)| (counts, amp.norm_sqr()))
        .collect()
}

/// Click-pattern distribution (bitmask-indexed) of a photon-number
/// distribution under binomial detector response.
fn pattern_dist_from_counts(dist: &[(Vec<u8>, f64)], det: &DetectorModel) -> Vec<f64> {
    let dim = det.dim();
    let mut patterns = vec![0.0; 1 << dim];
    for (counts, prob) in dist {
        if *prob == 0.0 {
            continue;
        }
        // silence probability per detector: every photon missed
        let silent: Vec<f64> = (0..dim)
            .map(|i| (1.0 - det.efficiency(i)).powi(counts[i] as i32))
            .collect();
        for (mask, slot) in patterns.iter_mut().enumerate() {
            let mut term = *prob;
            for (i, s) in silent.iter().enumerate() {
                term *= if mask & (1 << i) != 0 { 1.0 - s } else { *s };
            }
            *slot += term;
        }
    }
    patterns
}

/// Combines the click patterns of independent groups: detectors fire if any
/// group fires them.
fn or_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (ma, wa) in a.iter().enumerate() {
        if *wa == 0.0 {
            continue;
        }
        for (mb, wb) in b.iter().enumerate() {
            if *wb == 0.0 {
                continue;
            }
            out[ma | mb] += wa * wb;
        }
    }
    out
}

/// Nodes for averaging a group over the internal interferometer phase; exact
/// for the trigonometric polynomials these intensities produce at small
/// photon numbers.
const PHASE_NODES: usize = 64;

fn group_pattern(
    layout: &LayoutSpec,
    det: &DetectorModel,
    group: &PhotonGroup,
) -> Vec<f64> {
    if group.phase_averaged && layout.kind == LayoutKind::MachZehnder {
        let mut acc = vec![0.0; 1 << layout.dim()];
        for k in 0..PHASE_NODES {
            let phi = std::f64::consts::TAU * k as f64 / PHASE_NODES as f64;
            let m = layout.transfer_at_phase(phi);
            let dist = group_output_distribution(&m, &group.photons);
            for (slot, x) in acc.iter_mut().zip(pattern_dist_from_counts(&dist, det)) {
                *slot += x;
            }
        }
        for slot in &mut acc {
            *slot /= PHASE_NODES as f64;
        }
        acc
    } else {
        let dist = group_output_distribution(&layout.transfer(), &group.photons);
        pattern_dist_from_counts(&dist, det)
    }
}

/// Click-pattern probabilities (bitmask-indexed, summing to one) of a photon
/// mixture on a layout.
pub fn propagate_and_click(
    dist: &JointPhotonDist,
    layout: &LayoutSpec,
    det: &DetectorModel,
) -> Result<Vec<f64>> {
    if dist.dim != layout.dim() || det.dim() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            got: dist.dim.max(det.dim()),
        });
    }
    for branch in &dist.branches {
        for group in &branch.groups {
            for &(port, count) in &group.photons {
                if port >= layout.dim() {
                    return Err(Error::IndexOutOfRange {
                        index: port,
                        dim: layout.dim(),
                    });
                }
                if count as usize > dist.cutoff {
                    return Err(Error::Domain(format!(
                        "photon count {count} exceeds cutoff {}",
                        dist.cutoff
                    )));
                }
            }
        }
    }
    let dim = layout.dim();
    let mut total = vec![0.0; 1 << dim];
    let mut cache: Vec<(PhotonGroup, Vec<f64>)> = Vec::new();
    for branch in &dist.branches {
        let mut pattern = vec![0.0; 1 << dim];
        pattern[0] = 1.0;
        for group in &branch.groups {
            let cached = cache.iter().find(|(g, _)| g == group).map(|(_, p)| p.clone());
            let gp = match cached {
                Some(p) => p,
                None => {
                    let p = group_pattern(layout, det, group);
                    cache.push((group.clone(), p.clone()));
                    p
                }
            };
            pattern = or_convolve(&pattern, &gp);
        }
        for (slot, x) in total.iter_mut().zip(pattern) {
            *slot += branch.weight * x;
        }
    }
    Ok(total)
}

/// Probability that every detector in `pattern` clicks (others free).
pub fn prob_all_click(patterns: &[f64], pattern: &[usize]) -> f64 {
    let need: usize = pattern.iter().map(|&i| 1 << i).sum();
    patterns
        .iter()
        .enumerate()
        .filter(|(mask, _)| mask & need == need)
        .map(|(_, p)| p)
        .sum()
}

/// Success/error statistics of a source by brute-force enumeration.
pub fn source_click_stats(
    p: &crate::source::SourceParams,
    layout: &LayoutSpec,
    det: &DetectorModel,
    cutoff: usize,
) -> Result<ClickStats> {
    let dist = build_source_dist(p, layout, layout.n_inputs(), cutoff)?;
    let patterns = propagate_and_click(&dist, layout, det)?;
    ClickStats::new(
        prob_all_click(&patterns, &layout.success_pattern),
        prob_all_click(&patterns, &layout.error_pattern),
        Provenance::Source,
    )
}

/// Smallest cutoff whose Poisson tail stays below [`TAIL_LIMIT`].
fn cutoff_for_mean(mean: f64) -> usize {
    let mut cutoff = 4;
    while truncated_poisson(mean, cutoff).is_err() {
        cutoff += 1;
        if cutoff > 200 {
            break;
        }
    }
    cutoff
}

/// Success/error statistics of a (phase-randomized) coherent input computed
/// entirely in the truncated photon-number picture: both port amplitudes
/// share one label, every photon-number branch is propagated coherently, and
/// the relative phase is averaged on a trapezoid grid.
pub fn classical_click_stats_fock(
    input: &ClassicalInput,
    layout: &LayoutSpec,
    det: &DetectorModel,
    quad_nodes: usize,
) -> Result<ClickStats> {
    if input.magnitudes.len() != layout.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: layout.n_inputs(),
            got: input.magnitudes.len(),
        });
    }
    let matrix = layout.transfer();
    let mags = &input.magnitudes;
    let cutoffs: Vec<usize> = mags.iter().map(|r| cutoff_for_mean(r * r)).collect();

    // transition amplitudes per photon-number branch, phase-independent
    let ports = &layout.input_ports;
    let mut tables: Vec<((u32, u32), Vec<(Vec<u8>, Complex64)>)> = Vec::new();
    let n1_max = cutoffs[0] as u32;
    let n2_max = if mags.len() > 1 { cutoffs[1] as u32 } else { 0 };
    for n1 in 0..=n1_max {
        for n2 in 0..=n2_max {
            let mut photons = vec![(ports[0], n1)];
            if mags.len() > 1 {
                photons.push((ports[1], n2));
            }
            tables.push(((n1, n2), amplitude_table(&matrix, &photons)));
        }
    }

    // coherent-state coefficient magnitudes alpha^n / sqrt(n!)
    let coeff = |r: f64, n: u32| -> f64 {
        let mut c = 1.0;
        for k in 1..=n {
            c *= r / (k as f64).sqrt();
        }
        c
    };
    let weight = (-0.5 * mags.iter().map(|r| r * r).sum::<f64>()).exp();

    let nodes = if mags.len() > 1 && input.phase_randomized {
        quad_nodes
    } else {
        1
    };
    let mut ps_acc = 0.0;
    let mut pe_acc = 0.0;
    for node in 0..nodes {
        let theta = if nodes == 1 {
            if input.phase_randomized {
                0.0
            } else {
                input.fixed_phases.get(1).copied().unwrap_or(0.0)
                    - input.fixed_phases.first().copied().unwrap_or(0.0)
            }
        } else {
            std::f64::consts::TAU * node as f64 / nodes as f64
        };
        let mut amps: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        for ((n1, n2), table) in &tables {
            let phase = Complex64::from_polar(1.0, theta * *n2 as f64);
            let c = weight * coeff(mags[0], *n1)
                * if mags.len() > 1 { coeff(mags[1], *n2) } else { 1.0 };
            let c = phase * c;
            for (counts, amp) in table {
                *amps.entry(counts.clone()).or_insert(Complex64::new(0.0, 0.0)) += c * amp;
            }
        }
        let dist: Vec<(Vec<u8>, f64)> = amps
            .into_iter()
            .map(|(c, a)| (c, a.norm_sqr()))
            .collect();
        let patterns = pattern_dist_from_counts(&dist, det);
        ps_acc += prob_all_click(&patterns, &layout.success_pattern);
        pe_acc += prob_all_click(&patterns, &layout.error_pattern);
    }
    ClickStats::new(
        ps_acc / nodes as f64,
        pe_acc / nodes as f64,
        Provenance::Classical,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::SourceParams;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poisson_weights_match_the_formula() {
        let w = truncated_poisson(0.01, 6).unwrap();
        let mut factorial = 1.0;
        for (n, weight) in w.iter().enumerate() {
            if n > 0 {
                factorial *= n as f64;
            }
            let expect = (-0.01_f64).exp() * 0.01_f64.powi(n as i32) / factorial;
            assert_abs_diff_eq!(*weight, expect, epsilon = 1e-16);
        }
    }

    #[test]
    fn tail_mass_violation_is_reported() {
        assert!(matches!(
            truncated_poisson(3.0, 4),
            Err(Error::TailMass { .. })
        ));
        let layout = LayoutSpec::unbalanced_bs(0.5).unwrap();
        let p = SourceParams::new(0.5, 3.0).unwrap();
        assert!(build_source_dist(&p, &layout, 1, 4).is_err());
    }

    #[test]
    fn cutoff_below_four_is_rejected() {
        let layout = LayoutSpec::unbalanced_bs(0.5).unwrap();
        let p = SourceParams::new(0.5, 0.0).unwrap();
        assert!(build_source_dist(&p, &layout, 1, 3).is_err());
    }

    #[test]
    fn ideal_source_is_a_deterministic_single_photon() {
        let layout = LayoutSpec::unbalanced_bs(0.5).unwrap();
        let p = SourceParams::new(1.0, 0.0).unwrap();
        let dist = build_source_dist(&p, &layout, 1, 6).unwrap();
        let with_photon: f64 = dist
            .branches
            .iter()
            .filter(|b| b.groups.iter().any(|g| g.total_photons() == 1))
            .map(|b| b.weight)
            .sum();
        assert_abs_diff_eq!(with_photon, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_half_efficient_copies_split_into_equal_presence_branches() {
        let layout = LayoutSpec::two_copy(0.7, 0.7).unwrap();
        let p = SourceParams::new(0.5, 0.0).unwrap();
        let dist = build_source_dist(&p, &layout, 2, 6).unwrap();
        let mut by_count = [0.0; 3];
        for b in &dist.branches {
            let n: u32 = b.groups.iter().map(|g| g.total_photons()).sum();
            by_count[n as usize] += b.weight;
        }
        assert_abs_diff_eq!(by_count[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(by_count[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(by_count[2], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn single_photon_on_balanced_splitter_never_coincides() {
        let layout = LayoutSpec::unbalanced_bs(0.5).unwrap();
        let det = DetectorModel::ideal(2);
        let p = SourceParams::new(1.0, 0.0).unwrap();
        let dist = build_source_dist(&p, &layout, 1, 6).unwrap();
        let patterns = propagate_and_click(&dist, &layout, &det).unwrap();
        assert_abs_diff_eq!(patterns[0b01], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(patterns[0b10], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(patterns[0b11], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn indistinguishable_pair_on_balanced_splitter_shows_the_dip() {
        let m = crate::network::bs_matrix(0.5).unwrap();
        let dist = group_output_distribution(&m, &[(0, 1), (1, 1)]);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let coincidence = dist
            .iter()
            .find(|(c, _)| c == &vec![1, 1])
            .map(|(_, p)| *p)
            .unwrap_or(0.0);
        assert_abs_diff_eq!(coincidence, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pattern_probabilities_sum_to_one() {
        let layout = LayoutSpec::hom_extended(0.4, 0.6).unwrap();
        let det = DetectorModel::new(vec![0.9, 0.8, 0.95]).unwrap();
        let p = SourceParams::new(0.6, 0.12)
            .unwrap()
            .with_indistinguishability(0.4)
            .unwrap();
        let dist = build_source_dist(&p, &layout, 2, 9).unwrap();
        let patterns = propagate_and_click(&dist, &layout, &det).unwrap();
        assert_abs_diff_eq!(patterns.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn oracle_runs_at_desk_scale() {
        let layout = LayoutSpec::two_copy(0.7, 0.7).unwrap();
        let det = DetectorModel::ideal(3);
        let p = SourceParams::new(0.5, 0.15)
            .unwrap()
            .with_indistinguishability(0.5)
            .unwrap();
        let start = std::time::Instant::now();
        source_click_stats(&p, &layout, &det, 8).unwrap();
        assert!(start.elapsed().as_secs_f64() < 1.0);
    }

    #[test]
    fn coherent_oracle_matches_closed_form_on_the_splitter() {
        let layout = LayoutSpec::unbalanced_bs(0.5).unwrap();
        let det = DetectorModel::ideal(2);
        let input = ClassicalInput::randomized(vec![1.0]).unwrap();
        let fock = classical_click_stats_fock(&input, &layout, &det, 64).unwrap();
        let analytic = crate::click::classical_click_stats(&layout, &input, &det, 64).unwrap();
        assert!((fock.p_success - analytic.p_success).abs() < 1e-8);
        assert!((fock.p_error - analytic.p_error).abs() < 1e-8);
    }
}
