//! Nonclassicality witnesses for single-photon sources built from click
//! statistics on small adjustable linear-optical layouts.
//!
//! The crate simulates classical (phase-randomized coherent) light and
//! realistic single-photon-plus-Poisson-noise sources through four layouts
//! (unbalanced beam splitter, Mach-Zehnder, and two three-detector two-copy
//! schemes), maximizes the linear witness `W_a = P_s + a P_e` over classical
//! light to trace variable threshold curves, and classifies measured or
//! simulated `(P_s, P_e)` pairs against them.

pub mod click;
pub mod error;
pub mod figures;
pub mod fock;
pub mod io;
pub mod layout;
pub mod network;
pub mod source;
pub mod threshold;

pub use click::{
    classical_click_stats, no_click_prob, phase_averaged_no_click, ClassicalInput, ClickStats,
    DetectorModel, DetectorSet, Provenance, DEFAULT_QUAD_NODES,
};
pub use error::{Error, Result};
pub use layout::{LayoutKind, LayoutSpec};
pub use network::{
    bs_matrix, hom_matrix, mz_matrix, propagate, three_mode_matrix, TransferMatrix,
};
pub use source::{
    hbt_ratio_estimate, mz_photon_placement, noise_detector_means, single_copy_click_stats,
    two_copy_click_stats, HbtRatio, PhotonPlacement, SourceParams,
};
pub use threshold::{
    critical_noise_ratio, is_nonclassical, maximize_witness, power_law_fit, threshold_curve,
    ASweep, CriticalRatio, CurvePoint, PowerLawFit, ThresholdCurve, Verdict, WitnessOptimum,
    MAGNITUDE_CAP,
};
