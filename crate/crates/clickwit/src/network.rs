//! Transfer matrices of the small linear-optical layouts and coherent-amplitude
//! propagation through them.
//!
//! Every network is a unitary acting on the vector of mode amplitudes,
//! `u = A v`. Intensities are `|u_i|^2`, so unitarity conserves the total
//! intensity exactly.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-entry tolerance for the unitarity check `A A^dagger = 1`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Complex amplitude of a coherent mode.
pub type ComplexAmp = Complex64;

/// Unitary transfer matrix of a lossless linear network.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    entries: Array2<Complex64>,
}

impl TransferMatrix {
    /// Validates squareness, finiteness and unitarity (within [`UNITARITY_TOL`]).
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols || rows == 0 {
            return Err(Error::Domain(format!(
                "transfer matrix must be square and nonempty, got {rows}x{cols}"
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("transfer matrix entries must be finite".into()));
        }
        let m = TransferMatrix { entries };
        if let Some((i, j, dev)) = m.unitarity_deviation() {
            return Err(Error::Domain(format!(
                "matrix is not unitary: |(A A^H - 1)[{i},{j}]| = {dev:.3e} exceeds {UNITARITY_TOL:.0e}"
            )));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[[row, col]]
    }

    /// Amplitudes a unit input on `port` sends to each output.
    pub fn column(&self, port: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.entries[[i, port]]).collect()
    }

    /// Worst entry of `A A^H - 1`, or `None` when unitary within tolerance.
    fn unitarity_deviation(&self) -> Option<(usize, usize, f64)> {
        let n = self.dim();
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entries[[i, k]] * self.entries[[j, k]].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (acc - target).norm();
                if dev > UNITARITY_TOL && worst.map_or(true, |(_, _, w)| dev > w) {
                    worst = Some((i, j, dev));
                }
            }
        }
        worst
    }
}

fn check_transmission(t: f64, name: &str) -> Result<()> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "{name} must lie in [0, 1], got {t}"
        )));
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Beam-splitter transfer with transmission `t`:
/// `[[sqrt(T), sqrt(1-T)], [-sqrt(1-T), sqrt(T)]]`.
///
/// Reflection carries the minus sign on the second row.
pub fn bs_matrix(t: f64) -> Result<TransferMatrix> {
    check_transmission(t, "transmission t")?;
    let (ct, cr) = (t.sqrt(), (1.0 - t).sqrt());
    let m = Array2::from_shape_vec((2, 2), vec![re(ct), re(cr), re(-cr), re(ct)]).unwrap();
    TransferMatrix::new(m)
}

/// Mach-Zehnder transfer: two beam splitters with a phase shift on the second
/// internal arm, composed as `bs(t2) . diag(1, e^{i phase}) . bs(t1)`.
///
/// Detector labelling convention: row 0 (detector 1) is the output whose
/// intensity for a unit input on port 0 equals
/// `T1 R2 + T2 R1 + 2 cos(phase) sqrt(T1 T2 R1 R2)`,
/// the constructively interfering port at `phase = 0`.
pub fn mz_matrix(t1: f64, t2: f64, phase: f64) -> Result<TransferMatrix> {
    check_transmission(t1, "transmission t1")?;
    check_transmission(t2, "transmission t2")?;
    if !phase.is_finite() {
        return Err(Error::Domain(format!("phase must be finite, got {phase}")));
    }
    let b1 = bs_matrix(t1)?;
    let b2 = bs_matrix(t2)?;
    let ph = Complex64::from_polar(1.0, phase);
    // rows of bs(t2) . diag(1, e^{i phase}) . bs(t1)
    let mut prod = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
    for i in 0..2 {
        for j in 0..2 {
            prod[[i, j]] = b2.get(i, 0) * b1.get(0, j) + b2.get(i, 1) * ph * b1.get(1, j);
        }
    }
    // swap rows so detector 1 carries the + interference term
    let m = Array2::from_shape_vec(
        (2, 2),
        vec![prod[[1, 0]], prod[[1, 1]], prod[[0, 0]], prod[[0, 1]]],
    )
    .unwrap();
    TransferMatrix::new(m)
}

/// Three-mode chain of two beam splitters with rows
/// `(sqrt(T1), sqrt(R1), 0)`,
/// `(-sqrt(R1 T2), sqrt(T1 T2), sqrt(1 - T2))`,
/// `(sqrt(R1 R2), -sqrt(T1 R2), sqrt(T2))`.
///
/// Input 0 splits at the first splitter; the reflected remainder meets input 2
/// on the second splitter that feeds outputs 1 and 2.
pub fn three_mode_matrix(t1: f64, t2: f64) -> Result<TransferMatrix> {
    check_transmission(t1, "transmission t1")?;
    check_transmission(t2, "transmission t2")?;
    let (r1, r2) = (1.0 - t1, 1.0 - t2);
    let rows = vec![
        re(t1.sqrt()),
        re(r1.sqrt()),
        re(0.0),
        re(-(r1 * t2).sqrt()),
        re((t1 * t2).sqrt()),
        re(r2.sqrt()),
        re((r1 * r2).sqrt()),
        re(-(t1 * r2).sqrt()),
        re(t2.sqrt()),
    ];
    TransferMatrix::new(Array2::from_shape_vec((3, 3), rows).unwrap())
}

/// Interfere-then-split chain: inputs 0 and 1 meet on a first splitter of
/// transmission `t1`; one output is split again (transmission `t2`) onto
/// detectors 0 and 1, the other goes straight to detector 2.
///
/// Rows are ordered (detector 1, detector 2, detector 3):
/// `(sqrt(T1 T2), sqrt(R1 T2), sqrt(R2))`,
/// `(-sqrt(T1 R2), -sqrt(R1 R2), sqrt(T2))`,
/// `(-sqrt(R1), sqrt(T1), 0)`.
pub fn hom_matrix(t1: f64, t2: f64) -> Result<TransferMatrix> {
    check_transmission(t1, "transmission t1")?;
    check_transmission(t2, "transmission t2")?;
    let (r1, r2) = (1.0 - t1, 1.0 - t2);
    let rows = vec![
        re((t1 * t2).sqrt()),
        re((r1 * t2).sqrt()),
        re(r2.sqrt()),
        re(-(t1 * r2).sqrt()),
        re(-(r1 * r2).sqrt()),
        re(t2.sqrt()),
        re(-r1.sqrt()),
        re(t1.sqrt()),
        re(0.0),
    ];
    TransferMatrix::new(Array2::from_shape_vec((3, 3), rows).unwrap())
}

/// Propagates input amplitudes through the network, `u = A v`.
pub fn propagate(m: &TransferMatrix, input: &[Complex64]) -> Result<Vec<Complex64>> {
    if input.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: input.len(),
        });
    }
    let n = m.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, v) in input.iter().enumerate() {
            *o += m.get(i, j) * v;
        }
    }
    Ok(out)
}

/// Total intensity `sum |v_i|^2` of an amplitude vector.
pub fn total_intensity(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
