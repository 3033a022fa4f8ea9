//! The four named detection layouts: which network they use, where the inputs
//! enter, and which detector coincidences count as success and error events.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{bs_matrix, hom_matrix, mz_matrix, three_mode_matrix, TransferMatrix};

/// Kind tag for the four supported layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    UnbalancedBs,
    MachZehnder,
    HomExtended,
    TwoCopyVariant,
}

impl LayoutKind {
    pub fn name(&self) -> &'static str {
        match self {
            LayoutKind::UnbalancedBs => "unbalanced-bs",
            LayoutKind::MachZehnder => "mach-zehnder",
            LayoutKind::HomExtended => "hom-extended",
            LayoutKind::TwoCopyVariant => "two-copy",
        }
    }
}

/// A detection layout: network parameters, input placement, and the detector
/// sets whose simultaneous clicks define success and error events.
///
/// Detector indices are 0-based. The success pattern is always a subset of the
/// error pattern: an error event is a success event with at least one extra
/// click.
#[derive(Clone, Debug, Serialize)]
pub struct LayoutSpec {
    pub kind: LayoutKind,
    pub t1: f64,
    pub t2: f64,
    /// Internal phase in radians; meaningful for the Mach-Zehnder only.
    pub phase: f64,
    /// Ports (0-based) that receive signal input, in copy order.
    pub input_ports: Vec<usize>,
    pub success_pattern: Vec<usize>,
    pub error_pattern: Vec<usize>,
}

fn check_unit_range(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

impl LayoutSpec {
    /// Single beam splitter of transmission `t`; input on port 0.
    /// Success: detector 0 clicks. Error: both detectors click.
    pub fn unbalanced_bs(t: f64) -> Result<Self> {
        check_unit_range(t, "transmission t")?;
        Ok(LayoutSpec {
            kind: LayoutKind::UnbalancedBs,
            t1: t,
            t2: 0.0,
            phase: 0.0,
            input_ports: vec![0],
            success_pattern: vec![0],
            error_pattern: vec![0, 1],
        })
    }

    /// Mach-Zehnder interferometer; input on port 0. Detector 0 is the
    /// constructive port at `phase = 0` (see [`mz_matrix`]).
    /// Success: detector 0 clicks. Error: both detectors click.
    pub fn mach_zehnder(t1: f64, t2: f64, phase: f64) -> Result<Self> {
        check_unit_range(t1, "transmission t1")?;
        check_unit_range(t2, "transmission t2")?;
        if !phase.is_finite() {
            return Err(Error::Domain(format!("phase must be finite, got {phase}")));
        }
        Ok(LayoutSpec {
            kind: LayoutKind::MachZehnder,
            t1,
            t2,
            phase,
            input_ports: vec![0],
            success_pattern: vec![0],
            error_pattern: vec![0, 1],
        })
    }

    /// Two copies interfere on a first splitter (transmission `t1`); one of its
    /// outputs is split again (transmission `t2`) onto detectors 0 and 1 while
    /// the other goes straight to detector 2.
    ///
    /// Success: detectors 0 and 1 click together (a photon pair bunched into
    /// the split arm). Error: all three click. At `t1 = 0` or `t1 = 1` the
    /// first splitter stops mixing the copies and the statistics factorize
    /// between detectors {0, 1} and detector 2.
    pub fn hom_extended(t1: f64, t2: f64) -> Result<Self> {
        check_unit_range(t1, "transmission t1")?;
        check_unit_range(t2, "transmission t2")?;
        Ok(LayoutSpec {
            kind: LayoutKind::HomExtended,
            t1,
            t2,
            phase: 0.0,
            input_ports: vec![0, 1],
            success_pattern: vec![0, 1],
            error_pattern: vec![0, 1, 2],
        })
    }

    /// Two copies routed toward their own detectors: a fraction `t1` of the
    /// first input reaches detector 0 and a fraction `t2` of the second input
    /// reaches detector 1, while both remainders fold onto detector 2, where
    /// they can interfere. At `t1 = t2 = 1` nothing reaches detector 2 and
    /// error events vanish for every state.
    ///
    /// Success: detectors 0 and 1 click together (both copies passed).
    /// Error: all three click.
    pub fn two_copy(t1: f64, t2: f64) -> Result<Self> {
        check_unit_range(t1, "transmission t1")?;
        check_unit_range(t2, "transmission t2")?;
        Ok(LayoutSpec {
            kind: LayoutKind::TwoCopyVariant,
            t1,
            t2,
            phase: 0.0,
            input_ports: vec![1, 2],
            success_pattern: vec![0, 1],
            error_pattern: vec![0, 1, 2],
        })
    }

    /// Number of modes/detectors.
    pub fn dim(&self) -> usize {
        match self.kind {
            LayoutKind::UnbalancedBs | LayoutKind::MachZehnder => 2,
            LayoutKind::HomExtended | LayoutKind::TwoCopyVariant => 3,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.input_ports.len()
    }

    pub fn is_single_copy(&self) -> bool {
        self.n_inputs() == 1
    }

    /// Transfer matrix at the layout's own phase.
    pub fn transfer(&self) -> TransferMatrix {
        self.transfer_at_phase(self.phase)
    }

    /// Transfer matrix with the internal phase overridden (no-op for layouts
    /// without one). Constructors validated the parameters, so this cannot
    /// fail.
    pub fn transfer_at_phase(&self, phase: f64) -> TransferMatrix {
        match self.kind {
            LayoutKind::UnbalancedBs => bs_matrix(self.t1),
            LayoutKind::MachZehnder => mz_matrix(self.t1, self.t2, phase),
            LayoutKind::HomExtended => hom_matrix(self.t1, self.t2),
            // Transmissions here are routing fractions toward the primary
            // detectors; the underlying splitter chain uses the complements.
            LayoutKind::TwoCopyVariant => three_mode_matrix(1.0 - self.t1, 1.0 - self.t2),
        }
        .expect("layout parameters were validated on construction")
    }

    /// Same layout with the phase replaced; used when canonicalizing the
    /// Mach-Zehnder for witness maximization.
    pub fn with_phase(&self, phase: f64) -> Self {
        let mut l = self.clone();
        l.phase = phase;
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn success_pattern_is_contained_in_error_pattern() {
        for l in [
            LayoutSpec::unbalanced_bs(0.5).unwrap(),
            LayoutSpec::mach_zehnder(0.5, 0.6, 0.0).unwrap(),
            LayoutSpec::hom_extended(0.5, 0.5).unwrap(),
            LayoutSpec::two_copy(0.7, 0.7).unwrap(),
        ] {
            for d in &l.success_pattern {
                assert!(l.error_pattern.contains(d));
            }
            assert!(l.error_pattern.len() == l.success_pattern.len() + 1);
            assert!(l.error_pattern.iter().all(|&d| d < l.dim()));
        }
    }

    #[test]
    fn two_copy_full_transmission_reaches_only_primary_detectors() {
        let l = LayoutSpec::two_copy(1.0, 1.0).unwrap();
        let m = l.transfer();
        let mut v = vec![Complex64::new(0.0, 0.0); 3];
        v[l.input_ports[0]] = Complex64::new(1.0, 0.0);
        v[l.input_ports[1]] = Complex64::new(0.5, 0.0);
        let out = crate::network::propagate(&m, &v).unwrap();
        assert_abs_diff_eq!(out[0].norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1].norm_sqr(), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(out[2].norm_sqr(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hom_first_splitter_extremes_factorize() {
        // t1 = 1: input 0 feeds detectors {0, 1}, input 1 feeds detector 2 only.
        let l = LayoutSpec::hom_extended(1.0, 0.5).unwrap();
        let m = l.transfer();
        assert_abs_diff_eq!(m.get(2, 0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(0, 1).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(1, 1).norm(), 0.0, epsilon = 1e-15);
        // t1 = 0: the roles of the two inputs swap.
        let l0 = LayoutSpec::hom_extended(0.0, 0.5).unwrap();
        let m0 = l0.transfer();
        assert_abs_diff_eq!(m0.get(2, 1).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m0.get(0, 0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m0.get(1, 0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn constructors_reject_out_of_range_parameters() {
        assert!(LayoutSpec::unbalanced_bs(1.2).is_err());
        assert!(LayoutSpec::mach_zehnder(0.5, -0.1, 0.0).is_err());
        assert!(LayoutSpec::mach_zehnder(0.5, 0.5, f64::INFINITY).is_err());
        assert!(LayoutSpec::two_copy(f64::NAN, 0.5).is_err());
    }
}
