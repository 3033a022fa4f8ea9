//! CSV serialization of threshold curves.
//!
//! Plain CSV with a header row, `.` decimal separator, and scientific
//! notation for magnitudes below `1e-3`. Formatting is deterministic, so
//! identical curves serialize byte-identically.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::threshold::{validate_curve_points, CurvePoint, ThresholdCurve};

/// Formats a value with scientific notation below `1e-3` and full shortest
/// round-trip precision either way.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Renders curve points as CSV text.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let two = points.first().map_or(false, |p| p.magnitudes.len() == 2);
    let mut out = String::from("a,p_error,p_success_max,opt_mag_1");
    if two {
        out.push_str(",opt_mag_2");
    }
    out.push('\n');
    for p in points {
        out.push_str(&fmt_num(p.a));
        out.push(',');
        out.push_str(&fmt_num(p.p_error));
        out.push(',');
        out.push_str(&fmt_num(p.p_success));
        out.push(',');
        out.push_str(&fmt_num(p.magnitudes[0]));
        if two {
            out.push(',');
            out.push_str(&fmt_num(p.magnitudes.get(1).copied().unwrap_or(0.0)));
        }
        out.push('\n');
    }
    out
}

/// Writes a curve to CSV.
pub fn write_curve_csv(curve: &ThresholdCurve, path: &Path) -> Result<()> {
    fs::write(path, curve_to_csv(&curve.points))?;
    Ok(())
}

/// Reads curve points back from CSV and re-runs the monotonicity/concavity
/// validators.
pub fn read_curve_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    let text = fs::read_to_string(path)?;
    parse_curve_csv(&text)
}

/// Parses curve CSV text.
pub fn parse_curve_csv(text: &str) -> Result<Vec<CurvePoint>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedCurve("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 4
        || cols[0] != "a"
        || cols[1] != "p_error"
        || cols[2] != "p_success_max"
        || !cols[3].starts_with("opt_mag")
    {
        return Err(Error::MalformedCurve(format!(
            "unexpected header `{header}`"
        )));
    }
    let ncols = cols.len();
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != ncols {
            return Err(Error::MalformedCurve(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                ncols,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::MalformedCurve(format!("line {}: bad number `{s}`", lineno + 2))
            })
        };
        let a = parse(fields[0])?;
        let p_error = parse(fields[1])?;
        let p_success = parse(fields[2])?;
        let mut magnitudes = vec![parse(fields[3])?];
        if ncols > 4 {
            magnitudes.push(parse(fields[4])?);
        }
        points.push(CurvePoint {
            a,
            p_error,
            p_success,
            magnitudes,
        });
    }
    validate_curve_points(&points)?;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points() -> Vec<CurvePoint> {
        (0..20)
            .map(|i| {
                let pe = 10f64.powf(-8.0 + 6.0 * i as f64 / 19.0);
                CurvePoint {
                    a: -1.0 / pe.sqrt(),
                    p_error: pe,
                    p_success: pe.sqrt(),
                    magnitudes: vec![0.1 * (i + 1) as f64],
                }
            })
            .collect()
    }

    #[test]
    fn round_trip_preserves_values() {
        let points = sample_points();
        let csv = curve_to_csv(&points);
        let back = parse_curve_csv(&csv).unwrap();
        assert_eq!(points.len(), back.len());
        for (p, q) in points.iter().zip(&back) {
            assert_eq!(p.p_error, q.p_error);
            assert_eq!(p.p_success, q.p_success);
            assert_eq!(p.a, q.a);
        }
    }

    #[test]
    fn small_values_use_scientific_notation() {
        assert_eq!(fmt_num(0.0005), "5e-4");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.25), "0.25");
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(parse_curve_csv("").is_err());
        assert!(parse_curve_csv("x,y,z,w\n1,2,3,4\n").is_err());
        assert!(parse_curve_csv("a,p_error,p_success_max,opt_mag_1\n1,2\n").is_err());
        assert!(parse_curve_csv("a,p_error,p_success_max,opt_mag_1\n-1,frog,0.1,0.1\n").is_err());
        // non-concave point lists fail the reload validators
        let bad = "a,p_error,p_success_max,opt_mag_1\n-1,1e-6,1e-6,0.1\n-1,1e-4,1e-5,0.1\n-1,1e-2,1e-1,0.1\n";
        assert!(parse_curve_csv(bad).is_err());
    }
}
