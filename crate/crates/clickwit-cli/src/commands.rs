//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use clickwit::io::{curve_to_csv, fmt_num, read_curve_csv};
use clickwit::threshold::classify_points;
use clickwit::{
    figures, power_law_fit, single_copy_click_stats, threshold_curve, two_copy_click_stats,
    ASweep, ClickStats, DetectorModel, LayoutSpec, Provenance, SourceParams, Verdict,
};

use crate::config::{self, ConfigFile};
use crate::{
    ClassifyArgs, CliError, FigureId, FitArgs, LayoutArg, LayoutOpts, ReproduceArgs, SimulateArgs,
    SourceOpts, SweepVar, ThresholdArgs,
};

fn require<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required parameter: {what}")))
}

fn build_layout(opts: &LayoutOpts) -> Result<LayoutSpec, CliError> {
    let kind = require(opts.layout, "--layout")?;
    let t1 = opts.t1.or(opts.t);
    match kind {
        LayoutArg::Bs => Ok(LayoutSpec::unbalanced_bs(require(t1, "--t (or --t1)")?)?),
        LayoutArg::Mz => Ok(LayoutSpec::mach_zehnder(
            require(t1, "--t1")?,
            require(opts.t2, "--t2")?,
            opts.phase.unwrap_or(0.0),
        )?),
        LayoutArg::Hom => Ok(LayoutSpec::hom_extended(
            require(t1, "--t1")?,
            require(opts.t2.or(t1), "--t2")?,
        )?),
        LayoutArg::Twocopy => Ok(LayoutSpec::two_copy(
            require(t1, "--t1")?,
            require(opts.t2.or(t1), "--t2")?,
        )?),
    }
}

fn build_source(opts: &SourceOpts, eta: f64, nbar: f64) -> Result<SourceParams, CliError> {
    let mut p = SourceParams::new(eta, nbar)?;
    if let Some(v) = opts.coherence {
        p = p.with_signal_coherence(v)?;
    }
    if let Some(v) = opts.noise_coherence {
        p = p.with_noise_coherence(v)?;
    }
    if let Some(v) = opts.indist {
        p = p.with_indistinguishability(v)?;
    }
    Ok(p)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn write_sidecar(out: &Path, value: serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| CliError::Numerical(format!("sidecar serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(sidecar_path(out), text)?;
    Ok(())
}

fn layout_json(layout: &LayoutSpec) -> serde_json::Value {
    json!({
        "kind": layout.kind.name(),
        "t1": layout.t1,
        "t2": layout.t2,
        "phase": layout.phase,
    })
}

pub fn threshold(mut args: ThresholdArgs) -> Result<(), CliError> {
    let keys: Vec<&str> = config::layout_keys()
        .iter()
        .chain(&["a_min", "a_max", "a_points", "quad_nodes", "out"])
        .copied()
        .collect();
    let cfg = match &args.config {
        Some(path) => ConfigFile::load(path, &keys)?,
        None => ConfigFile::empty(),
    };
    config::merge_layout(&mut args.layout, &cfg)?;
    let defaults = ASweep::default();
    let sweep = ASweep {
        min_abs: args.a_min.or(cfg.f64("a_min")?).unwrap_or(defaults.min_abs),
        max_abs: args.a_max.or(cfg.f64("a_max")?).unwrap_or(defaults.max_abs),
        points: args
            .a_points
            .or(cfg.usize("a_points")?)
            .unwrap_or(defaults.points),
    };
    let quad = args
        .quad_nodes
        .or(cfg.usize("quad_nodes")?)
        .unwrap_or(clickwit::DEFAULT_QUAD_NODES);
    let out = require(
        args.out.or(cfg.string("out").map(PathBuf::from)),
        "--out",
    )?;
    let layout = build_layout(&args.layout)?;
    let det = DetectorModel::ideal(layout.dim());
    let curve = threshold_curve(&layout, &sweep, &det, quad)?;
    std::fs::write(&out, curve_to_csv(&curve.points))?;
    write_sidecar(
        &out,
        json!({
            "command": "threshold",
            "layout": layout_json(&curve.layout),
            "a_min": sweep.min_abs,
            "a_max": sweep.max_abs,
            "a_points": sweep.points,
            "quad_nodes": quad,
            "points_kept": curve.points.len(),
            "out": out.display().to_string(),
        }),
    )?;
    println!(
        "wrote {} boundary points to {}",
        curve.points.len(),
        out.display()
    );
    Ok(())
}

fn verdict_label(v: &Verdict) -> String {
    let mut label = if v.nonclassical {
        "nonclassical".to_string()
    } else {
        "classical".to_string()
    };
    if v.extrapolated {
        label.push_str("-extrapolated");
    }
    label
}

fn state_rows_csv(rows: &[(f64, f64, ClickStats, Verdict)]) -> String {
    let mut out = String::from("eta,nbar,p_success,p_error,verdict,margin\n");
    for (eta, nbar, stats, v) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(*eta),
            fmt_num(*nbar),
            fmt_num(stats.p_success),
            fmt_num(stats.p_error),
            verdict_label(v),
            fmt_num(v.margin)
        );
    }
    out
}

fn source_stats(
    p: &SourceParams,
    layout: &LayoutSpec,
    det: &DetectorModel,
) -> Result<ClickStats, CliError> {
    Ok(if layout.is_single_copy() {
        single_copy_click_stats(p, layout, det)?
    } else {
        two_copy_click_stats(p, layout, det)?
    })
}

pub fn simulate(mut args: SimulateArgs) -> Result<(), CliError> {
    let keys: Vec<&str> = config::layout_keys()
        .iter()
        .chain(config::source_keys())
        .chain(&["curve", "sweep", "sweep_min", "sweep_max", "sweep_points", "out"])
        .copied()
        .collect();
    let cfg = match &args.config {
        Some(path) => ConfigFile::load(path, &keys)?,
        None => ConfigFile::empty(),
    };
    config::merge_layout(&mut args.layout, &cfg)?;
    config::merge_source(&mut args.source, &cfg)?;
    let sweep_var = require(
        args.sweep.or(config::sweep_var_from(&cfg)?),
        "--sweep (eta or nbar)",
    )?;
    let sweep_min = args.sweep_min.or(cfg.f64("sweep_min")?).unwrap_or(1e-6);
    let sweep_max = args.sweep_max.or(cfg.f64("sweep_max")?).unwrap_or(1e-2);
    let sweep_points = args
        .sweep_points
        .or(cfg.usize("sweep_points")?)
        .unwrap_or(40);
    if !(sweep_min > 0.0 && sweep_max > sweep_min && sweep_points >= 2) {
        return Err(CliError::Usage(
            "sweep needs 0 < sweep_min < sweep_max and at least 2 points".into(),
        ));
    }
    let curve_path = require(
        args.curve.clone().or(cfg.string("curve").map(PathBuf::from)),
        "--curve",
    )?;
    let out = require(
        args.out.clone().or(cfg.string("out").map(PathBuf::from)),
        "--out",
    )?;
    let points = read_curve_csv(&curve_path)?;
    let layout = build_layout(&args.layout)?;
    let det = DetectorModel::ideal(layout.dim());

    let fixed_eta = args.source.eta;
    let fixed_nbar = args.source.nbar;
    let mut rows = Vec::with_capacity(sweep_points);
    for i in 0..sweep_points {
        let t = i as f64 / (sweep_points - 1) as f64;
        let value = (sweep_min.ln() + t * (sweep_max.ln() - sweep_min.ln())).exp();
        let (eta, nbar) = match sweep_var {
            SweepVar::Eta => (value, fixed_nbar.unwrap_or(0.0)),
            SweepVar::Nbar => (require(fixed_eta, "--eta (fixed while nbar sweeps)")?, value),
        };
        let p = build_source(&args.source, eta, nbar)?;
        let stats = source_stats(&p, &layout, &det)?;
        let verdict = classify_points(&points, &stats);
        rows.push((eta, nbar, stats, verdict));
    }
    std::fs::write(&out, state_rows_csv(&rows))?;
    write_sidecar(
        &out,
        json!({
            "command": "simulate",
            "layout": layout_json(&layout),
            "curve": curve_path.display().to_string(),
            "sweep": match sweep_var { SweepVar::Eta => "eta", SweepVar::Nbar => "nbar" },
            "sweep_min": sweep_min,
            "sweep_max": sweep_max,
            "sweep_points": sweep_points,
            "eta": fixed_eta,
            "nbar": fixed_nbar,
            "coherence": args.source.coherence,
            "noise_coherence": args.source.noise_coherence,
            "indist": args.source.indist,
            "out": out.display().to_string(),
        }),
    )?;
    let flips = rows
        .windows(2)
        .filter(|w| w[0].3.nonclassical != w[1].3.nonclassical)
        .count();
    println!(
        "wrote {} rows to {} ({} verdict flip{})",
        rows.len(),
        out.display(),
        flips,
        if flips == 1 { "" } else { "s" }
    );
    Ok(())
}

pub fn fit(args: FitArgs) -> Result<(), CliError> {
    let points = read_curve_csv(&args.curve)?;
    let fit = power_law_fit(&points, (args.pe_min, args.pe_max))?;
    println!("exponent: {}", fmt_num(fit.exponent));
    println!("prefactor: {}", fmt_num(fit.prefactor));
    println!("residual: {}", fmt_num(fit.residual));
    println!("points: {}", fit.points);
    if fit.residual > args.max_residual {
        return Err(CliError::Numerical(format!(
            "fit residual {} exceeds the {} bound",
            fit.residual, args.max_residual
        )));
    }
    Ok(())
}

pub fn classify(args: ClassifyArgs) -> Result<(), CliError> {
    let points = read_curve_csv(&args.curve)?;
    let stats = ClickStats::new(args.ps, args.pe, Provenance::Ingested)?;
    let verdict = classify_points(&points, &stats);
    println!("verdict: {}", verdict_label(&verdict));
    println!("threshold: {}", fmt_num(verdict.threshold));
    println!("margin: {}", fmt_num(verdict.margin));
    Ok(())
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<String, CliError> {
    std::fs::write(dir.join(name), text)?;
    Ok(name.to_string())
}

fn xy_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in rows {
        let _ = writeln!(out, "{},{}", fmt_num(*x), fmt_num(*y));
    }
    out
}

fn state_line_csv(rows: &[figures::StateRow]) -> String {
    let mut out = String::from("eta,nbar,p_success,p_error,verdict,margin\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(r.eta),
            fmt_num(r.nbar),
            fmt_num(r.p_success),
            fmt_num(r.p_error),
            if r.nonclassical { "nonclassical" } else { "classical" },
            fmt_num(r.margin)
        );
    }
    out
}

fn mz_family_files(
    dir: &Path,
    quad: usize,
    coherent: bool,
) -> Result<Vec<String>, CliError> {
    let mut files = Vec::new();
    for (t2, curve) in figures::mz_threshold_family(quad)? {
        files.push(write_file(
            dir,
            &format!("mz_threshold_t2_{t2}.csv"),
            &curve_to_csv(&curve.points),
        )?);
        let approx = figures::mz_approx_line(figures::FIG3_T1, t2, 1e-9, 1e-2, 60);
        files.push(write_file(
            dir,
            &format!("mz_approx_t2_{t2}.csv"),
            &xy_csv("p_error,p_success_approx", &approx),
        )?);
        let states = figures::mz_state_line(t2, coherent, &curve)?;
        files.push(write_file(
            dir,
            &format!("mz_states_t2_{t2}.csv"),
            &state_line_csv(&states),
        )?);
    }
    Ok(files)
}

fn two_copy_family_files(
    dir: &Path,
    quad: usize,
    indistinguishability: f64,
) -> Result<Vec<String>, CliError> {
    let mut files = Vec::new();
    for (t, curve) in figures::two_copy_threshold_family(quad)? {
        files.push(write_file(
            dir,
            &format!("two_copy_threshold_t_{t}.csv"),
            &curve_to_csv(&curve.points),
        )?);
        let approx = figures::two_copy_approx_line(&curve, 1e-9, 1e-2, 60)?;
        files.push(write_file(
            dir,
            &format!("two_copy_approx_t_{t}.csv"),
            &xy_csv("p_error,p_success_approx", &approx),
        )?);
        let states = figures::two_copy_state_line(t, indistinguishability, &curve)?;
        files.push(write_file(
            dir,
            &format!("two_copy_states_t_{t}.csv"),
            &state_line_csv(&states),
        )?);
    }
    Ok(files)
}

pub fn reproduce(args: ReproduceArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out_dir)?;
    let dir = args.out_dir.as_path();
    let quad = args.quad_nodes;
    let (figure, files) = match args.figure {
        FigureId::Fig3a => ("fig3a", mz_family_files(dir, quad, true)?),
        FigureId::Fig3b => ("fig3b", mz_family_files(dir, quad, false)?),
        FigureId::Fig3c => {
            let rows = figures::mz_ratio_table(figures::FIG3_T1);
            let mut out = String::from("t2,delta,ratio_coherent,ratio_polychromatic\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_num(r.t2),
                    fmt_num(r.delta),
                    fmt_num(r.ratio_coherent),
                    fmt_num(r.ratio_polychromatic)
                );
            }
            ("fig3c", vec![write_file(dir, "mz_ratio_table.csv", &out)?])
        }
        FigureId::Fig4a => ("fig4a", two_copy_family_files(dir, quad, 1.0)?),
        FigureId::Fig4b => ("fig4b", two_copy_family_files(dir, quad, 0.0)?),
        FigureId::Fig4c => {
            let rows = figures::two_copy_ratio_table(quad)?;
            let mut out = String::from("t,ratio_indistinguishable,ratio_distinguishable\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_num(r.t),
                    fmt_num(r.ratio_indistinguishable),
                    fmt_num(r.ratio_distinguishable)
                );
            }
            (
                "fig4c",
                vec![write_file(dir, "two_copy_ratio_table.csv", &out)?],
            )
        }
    };
    let manifest = dir.join(format!("{figure}.json"));
    let mut text = serde_json::to_string_pretty(&json!({
        "command": "reproduce",
        "figure": figure,
        "quad_nodes": quad,
        "files": files,
    }))
    .map_err(|e| CliError::Numerical(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(&manifest, text)?;
    println!("wrote {} files into {}", files.len() + 1, dir.display());
    Ok(())
}

