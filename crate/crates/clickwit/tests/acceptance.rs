//! Acceptance suite: every numbered check prints its own pass/fail line
//! (`cargo test -p clickwit --test acceptance`). Tolerances are pinned in
//! the assertions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clickwit::*;

const QUAD: usize = 256;

fn curve_cache() -> &'static Mutex<HashMap<String, Arc<ThresholdCurve>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<ThresholdCurve>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_curve(key: &str, build: impl FnOnce() -> ThresholdCurve) -> Arc<ThresholdCurve> {
    let mut cache = curve_cache().lock().unwrap();
    if let Some(c) = cache.get(key) {
        return c.clone();
    }
    let c = Arc::new(build());
    cache.insert(key.to_string(), c.clone());
    c
}

fn default_curve(layout: &LayoutSpec) -> Arc<ThresholdCurve> {
    let key = format!(
        "{:?}-{}-{}-{}",
        layout.kind, layout.t1, layout.t2, layout.phase
    );
    let det = DetectorModel::ideal(layout.dim());
    cached_curve(&key, || {
        threshold_curve(layout, &ASweep::default(), &det, QUAD).unwrap()
    })
}

fn bs(t: f64) -> LayoutSpec {
    LayoutSpec::unbalanced_bs(t).unwrap()
}

fn mz(t1: f64, t2: f64) -> LayoutSpec {
    LayoutSpec::mach_zehnder(t1, t2, 0.0).unwrap()
}

#[test]
fn criterion_01_hbt_square_root_law_under_ten_seconds() {
    let start = Instant::now();
    let layout = bs(0.5);
    let det = DetectorModel::ideal(2);
    let curve = threshold_curve(&layout, &ASweep::default(), &det, 64).unwrap();
    let mut checked = 0;
    for p in &curve.points {
        if p.p_error > 0.0 && p.p_error < 1e-4 {
            let ratio = p.p_success / p.p_error.sqrt();
            assert!(
                (0.99..=1.01).contains(&ratio),
                "P_s / sqrt(P_e) = {ratio} at P_e = {}",
                p.p_error
            );
            checked += 1;
        }
    }
    assert!(checked >= 10, "only {checked} boundary points below 1e-4");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "took {elapsed:.1} s");
}

#[test]
fn criterion_02_splitter_prefactor_tracks_transmission() {
    for t in [0.1, 0.3, 0.7, 0.9] {
        let curve = default_curve(&bs(t));
        let fit = power_law_fit(&curve.points, (1e-8, 1e-4)).unwrap();
        let predicted = (t / (1.0 - t)).sqrt();
        let rel = (fit.prefactor / predicted - 1.0).abs();
        assert!(
            rel <= 0.02,
            "t = {t}: prefactor {} vs {predicted} ({:.2}% off)",
            fit.prefactor,
            rel * 100.0
        );
    }
}

#[test]
fn criterion_03_interferometer_exponent_and_prefactor() {
    for delta in [0.05, 0.1, 0.2] {
        let curve = default_curve(&mz(0.5, 0.5 + delta));
        let fit = power_law_fit(&curve.points, (1e-8, 1e-4)).unwrap();
        assert!(
            (fit.exponent - 0.5).abs() <= 0.02,
            "delta = {delta}: exponent {}",
            fit.exponent
        );
        let predicted = 2.0 * (0.5_f64 * 0.5).sqrt() / delta;
        let rel = (fit.prefactor / predicted - 1.0).abs();
        assert!(
            rel <= 0.10,
            "delta = {delta}: prefactor {} vs {predicted} ({:.2}% off)",
            fit.prefactor,
            rel * 100.0
        );
    }
}

#[test]
fn criterion_04_interferometer_critical_ratio() {
    let det = DetectorModel::ideal(2);
    for delta in [0.1, 0.2] {
        let layout = mz(0.5, 0.5 + delta);
        let curve = default_curve(&layout);
        for polychromatic in [false, true] {
            let base = SourceParams::new(1e-3, 0.0)
                .unwrap()
                .with_signal_coherence(if polychromatic { 0.0 } else { 1.0 })
                .unwrap();
            let measured = critical_noise_ratio(&curve, &layout, &base, 1e-9, 1e-2, &det)
                .unwrap()
                .ratio;
            let c = if polychromatic {
                2.0 / (1.0 - 2.0 * 0.5 + 2.0 * 0.5 * 0.5)
            } else {
                1.0
            };
            let predicted = 8.0 * 0.5_f64.powi(2) * 0.5_f64.powi(2) * c / (delta * delta);
            let rel = (measured / predicted - 1.0).abs();
            assert!(
                rel <= 0.15,
                "delta = {delta}, poly = {polychromatic}: ratio {measured} vs {predicted} ({:.1}% off)",
                rel * 100.0
            );
        }
    }
}

#[test]
fn criterion_05_two_copy_exponent_two_thirds() {
    for t in [0.3, 0.5, 0.7] {
        for layout in [
            LayoutSpec::two_copy(t, t).unwrap(),
            LayoutSpec::hom_extended(t, t).unwrap(),
        ] {
            let curve = default_curve(&layout);
            let fit = power_law_fit(&curve.points, (1e-8, 1e-4)).unwrap();
            assert!(
                (fit.exponent - 2.0 / 3.0).abs() <= 0.02,
                "{} t = {t}: exponent {}",
                layout.kind.name(),
                fit.exponent
            );
        }
    }
}

#[test]
fn criterion_06_two_copy_tolerant_limit() {
    let det = DetectorModel::ideal(3);
    let sweep = ASweep {
        min_abs: 1e-2,
        max_abs: 1e7,
        points: 300,
    };
    for t in [0.99, 0.999] {
        let layout = LayoutSpec::two_copy(t, t).unwrap();
        let key = format!("eq11-{t}");
        let curve = cached_curve(&key, || {
            threshold_curve(&layout, &sweep, &det, QUAD).unwrap()
        });
        let predicted = (1.0 - t).sqrt();
        let mut measured = [0.0; 2];
        for (slot, indist) in measured.iter_mut().zip([1.0, 0.0]) {
            let base = SourceParams::new(3e-4, 0.0)
                .unwrap()
                .with_indistinguishability(indist)
                .unwrap();
            *slot = critical_noise_ratio(&curve, &layout, &base, 1e-7, 1e-2, &det)
                .unwrap()
                .ratio;
            let rel = (*slot / predicted - 1.0).abs();
            assert!(
                rel <= 0.20,
                "t = {t}, I = {indist}: ratio {slot} vs {predicted} ({:.1}% off)",
                rel * 100.0
            );
        }
        let spread = (measured[0] / measured[1] - 1.0).abs();
        assert!(
            spread <= 0.05,
            "t = {t}: indistinguishable {} vs distinguishable {} differ by {:.1}%",
            measured[0],
            measured[1],
            spread * 100.0
        );
    }
}

#[test]
fn criterion_07_degenerate_reductions() {
    // a second splitter at 0 or 1 reduces the interferometer to the bare
    // splitter criterion of the remaining transmission
    for (t1, t2, t_equiv) in [(0.3, 1.0, 0.7), (0.3, 0.0, 0.3), (0.5, 1.0, 0.5)] {
        let reduced = default_curve(&mz(t1, t2));
        let reference = default_curve(&bs(t_equiv));
        for k in 0..60 {
            let pe = 10f64.powf(-9.0 + 7.0 * k as f64 / 59.0);
            let (a, _) = reduced.threshold_at(pe);
            let (b, _) = reference.threshold_at(pe);
            assert!(
                (a / b - 1.0).abs() <= 0.01,
                "t2 = {t2}: thresholds {a} vs {b} at P_e = {pe}"
            );
        }
    }
    // factorized extremes of the pair-interference layout reject nothing,
    // including perfect sources with P_e = 0 and P_s > 0
    let det = DetectorModel::ideal(3);
    for t1 in [0.0, 1.0] {
        let layout = LayoutSpec::hom_extended(t1, 0.5).unwrap();
        let curve = default_curve(&layout);
        for eta in [1e-3, 1e-2, 0.1, 0.5, 1.0] {
            for nbar in [0.0, 1e-4, 1e-3, 1e-2] {
                let p = SourceParams::new(eta, nbar).unwrap();
                let stats = two_copy_click_stats(&p, &layout, &det).unwrap();
                let v = curve.classify(&stats);
                assert!(
                    !v.nonclassical,
                    "t1 = {t1}, eta = {eta}, nbar = {nbar} flagged (margin {})",
                    v.margin
                );
            }
        }
    }
}

#[test]
fn criterion_08_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c11c8);
    for trial in 0..200 {
        let t1 = rng.gen_range(0.05..0.95);
        let t2 = rng.gen_range(0.05..0.95);
        let layout = match trial % 4 {
            0 => LayoutSpec::unbalanced_bs(t1).unwrap(),
            1 => LayoutSpec::mach_zehnder(t1, t2, rng.gen_range(0.0..std::f64::consts::TAU))
                .unwrap(),
            2 => LayoutSpec::hom_extended(t1, t2).unwrap(),
            _ => LayoutSpec::two_copy(t1, t2).unwrap(),
        };
        let p = SourceParams::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..0.25))
            .unwrap()
            .with_signal_coherence(rng.gen_range(0.0..1.0))
            .unwrap()
            .with_noise_coherence(rng.gen_range(0.0..1.0))
            .unwrap()
            .with_indistinguishability(rng.gen_range(0.0..1.0))
            .unwrap();
        let det = DetectorModel::new(
            (0..layout.dim()).map(|_| rng.gen_range(0.5..1.0)).collect(),
        )
        .unwrap();
        let analytic = if layout.is_single_copy() {
            single_copy_click_stats(&p, &layout, &det).unwrap()
        } else {
            two_copy_click_stats(&p, &layout, &det).unwrap()
        };
        let oracle = fock::source_click_stats(&p, &layout, &det, 12).unwrap();
        assert!(
            (analytic.p_success - oracle.p_success).abs() <= 1e-9,
            "trial {trial} ({}): P_s {} vs {}",
            layout.kind.name(),
            analytic.p_success,
            oracle.p_success
        );
        assert!(
            (analytic.p_error - oracle.p_error).abs() <= 1e-9,
            "trial {trial} ({}): P_e {} vs {}",
            layout.kind.name(),
            analytic.p_error,
            oracle.p_error
        );
    }
}

#[test]
fn criterion_09_soundness_and_completeness() {
    let layouts = [
        bs(0.3),
        bs(0.5),
        mz(0.5, 0.6),
        mz(0.5, 0.7),
        LayoutSpec::hom_extended(0.45, 0.6).unwrap(),
        LayoutSpec::two_copy(0.7, 0.7).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x50f7);
    for layout in &layouts {
        let det = DetectorModel::ideal(layout.dim());
        let curve = default_curve(layout);
        // soundness: phase-randomized classical light never exceeds the curve
        for _ in 0..1000 {
            let mags: Vec<f64> = (0..layout.n_inputs())
                .map(|_| rng.gen_range(0.0..9.0))
                .collect();
            let input = ClassicalInput::randomized(mags.clone()).unwrap();
            let stats = classical_click_stats(layout, &input, &det, QUAD).unwrap();
            let v = curve.classify(&stats);
            assert!(
                !v.nonclassical,
                "{} flagged classical input {mags:?} (margin {})",
                layout.kind.name(),
                v.margin
            );
        }
        // completeness: every noiseless source is flagged
        for eta in [1e-3, 1e-2, 0.1, 0.5, 1.0] {
            let p = SourceParams::new(eta, 0.0).unwrap();
            let stats = if layout.is_single_copy() {
                single_copy_click_stats(&p, layout, &det).unwrap()
            } else {
                two_copy_click_stats(&p, layout, &det).unwrap()
            };
            let v = curve.classify(&stats);
            assert!(
                v.nonclassical,
                "{} missed eta = {eta} (margin {})",
                layout.kind.name(),
                v.margin
            );
        }
    }
}

#[test]
fn criterion_10_interferometer_optimal_phase() {
    let det = DetectorModel::ideal(2);
    for a in [-1.0, -1e2, -1e4] {
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut at_zero = f64::NEG_INFINITY;
        for k in 0..=16 {
            let phi = std::f64::consts::TAU * k as f64 / 16.0;
            let layout = LayoutSpec::mach_zehnder(0.5, 0.6, phi).unwrap();
            let w = maximize_witness(&layout, a, &det, 64).unwrap().w_max;
            if k == 0 {
                at_zero = w;
            }
            if w > best.0 {
                best = (w, phi);
            }
        }
        // the maximum over the grid sits at phase zero (2 pi aliases allowed)
        assert!(
            best.0 <= at_zero * (1.0 + 1e-9) + 1e-15,
            "a = {a}: W_max {} at phase {} exceeds the zero-phase value {}",
            best.0,
            best.1,
            at_zero
        );
    }
}

#[test]
fn criterion_11_figure_orderings() {
    // interferometer family: smaller |Delta| sits strictly above
    let curves: Vec<_> = figures::FIG3_T2
        .iter()
        .map(|&t2| default_curve(&mz(figures::FIG3_T1, t2)))
        .collect();
    for k in 0..40 {
        let pe = 10f64.powf(-7.0 + 4.0 * k as f64 / 39.0);
        let t: Vec<f64> = curves.iter().map(|c| c.threshold_at(pe).0).collect();
        assert!(
            t[0] > t[1] && t[1] > t[2],
            "interferometer thresholds not nested at P_e = {pe}: {t:?}"
        );
    }
    // approximate interferometer ratios: the polychromatic limit is stricter
    for row in figures::mz_ratio_table(0.5) {
        assert!(row.ratio_polychromatic > row.ratio_coherent);
    }
    // two-copy family: the required signal-to-noise ratio grows strictly as
    // the transmission shrinks
    let det = DetectorModel::ideal(3);
    let mut ratios = Vec::new();
    for &t in &figures::FIG4_T {
        let layout = LayoutSpec::two_copy(t, t).unwrap();
        let curve = default_curve(&layout);
        let base = SourceParams::new(1e-3, 0.0).unwrap();
        ratios.push(
            critical_noise_ratio(&curve, &layout, &base, 1e-9, 1e-2, &det)
                .unwrap()
                .ratio,
        );
    }
    assert!(
        ratios[0] > ratios[1] && ratios[1] > ratios[2],
        "two-copy thresholds not nested: {ratios:?}"
    );
    // two-copy ratio table: distinguishable copies face the stricter test
    for row in two_copy_ratio_rows() {
        assert!(
            row.ratio_distinguishable > row.ratio_indistinguishable,
            "t = {}: distinguishable {} vs indistinguishable {}",
            row.t,
            row.ratio_distinguishable,
            row.ratio_indistinguishable
        );
    }
}

fn two_copy_ratio_rows() -> Vec<figures::TwoCopyRatioRow> {
    let det = DetectorModel::ideal(3);
    figures::FIG4C_T
        .iter()
        .map(|&t| {
            let layout = LayoutSpec::two_copy(t, t).unwrap();
            let curve = default_curve(&layout);
            let mut ratios = [0.0; 2];
            for (slot, indist) in ratios.iter_mut().zip([1.0, 0.0]) {
                let base = SourceParams::new(figures::STATE_ETA, 0.0)
                    .unwrap()
                    .with_indistinguishability(indist)
                    .unwrap();
                *slot = critical_noise_ratio(&curve, &layout, &base, 1e-9, 1e-2, &det)
                    .unwrap()
                    .ratio;
            }
            figures::TwoCopyRatioRow {
                t,
                ratio_indistinguishable: ratios[0],
                ratio_distinguishable: ratios[1],
            }
        })
        .collect()
}
