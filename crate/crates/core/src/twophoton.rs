//! Two-photon polarization states and the beam-splitter coincidence model.
//!
//! Amplitudes are ordered `|00>, |01>, |10>, |11>` with Alice's qubit first.
//!
//! Only the singlet `|Psi->` leaves a symmetric beam splitter through both output ports,
//! so with perfect interference the coincidence probability equals the singlet fraction.
//! With dip depth `d` the interference term is scaled down:
//!
//! ```text
//! P(coincidence) = (1 - d_eff) / 2 + d_eff * |<Psi-|s>|^2,   d_eff = d * exp(-(tau / tau_c)^2)
//! ```
//!
//! For a product state this is `(1 - d_eff * overlap) / 2`; at `d_eff = 0` the photons
//! are distinguishable and split independently.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qstate::BlochState;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Default coherence time of the delay envelope, one picosecond.
pub const DEFAULT_TAU_C: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    /// Normalizes `amps`; the zero vector is rejected.
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !n2.is_finite() || n2 <= 0.0 {
            return Err(Error::domain("two-qubit amplitudes must be finite and non-zero"));
        }
        let k = 1.0 / n2.sqrt();
        Ok(TwoQubitState { amps: amps.map(|a| a * k) })
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Unit norm within 1e-12.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    pub fn inner(&self, other: &TwoQubitState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `a (x) b`.
pub fn product_state(a: &BlochState, b: &BlochState) -> TwoQubitState {
    let [a0, a1] = a.amplitudes();
    let [b0, b1] = b.amplitudes();
    TwoQubitState { amps: [a0 * b0, a0 * b1, a1 * b0, a1 * b1] }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(|01> - |10>) / sqrt 2`.
pub fn bell_singlet() -> TwoQubitState {
    TwoQubitState { amps: [real(0.0), real(FRAC_1_SQRT_2), real(-FRAC_1_SQRT_2), real(0.0)] }
}

/// `(|01> + |10>) / sqrt 2`.
pub fn bell_triplet() -> TwoQubitState {
    TwoQubitState { amps: [real(0.0), real(FRAC_1_SQRT_2), real(FRAC_1_SQRT_2), real(0.0)] }
}

/// `(|00> + |11>) / sqrt 2`.
pub fn bell_phi_plus() -> TwoQubitState {
    TwoQubitState { amps: [real(FRAC_1_SQRT_2), real(0.0), real(0.0), real(FRAC_1_SQRT_2)] }
}

/// `(|00> - |11>) / sqrt 2`.
pub fn bell_phi_minus() -> TwoQubitState {
    TwoQubitState { amps: [real(FRAC_1_SQRT_2), real(0.0), real(0.0), real(-FRAC_1_SQRT_2)] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];

    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let (o, l, i) = (real(0.0), real(1.0), Complex64::i());
        match self {
            PauliOp::I => [[l, o], [o, l]],
            PauliOp::X => [[o, l], [l, o]],
            PauliOp::Y => [[o, -i], [i, o]],
            PauliOp::Z => [[l, o], [o, -l]],
        }
    }
}

/// Applies `pa (x) pb` (Alice's operator on the first qubit).
pub fn apply_pauli_pair(s: &TwoQubitState, pa: PauliOp, pb: PauliOp) -> TwoQubitState {
    let (ma, mb) = (pa.matrix(), pb.matrix());
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (i, row_a) in ma.iter().enumerate() {
        for (j, row_b) in mb.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ea) in row_a.iter().enumerate() {
                for (l, eb) in row_b.iter().enumerate() {
                    acc += ea * eb * s.amps[2 * k + l];
                }
            }
            out[2 * i + j] = acc;
        }
    }
    TwoQubitState { amps: out }
}

/// `|<Psi-|s>|^2`.
pub fn singlet_fraction(s: &TwoQubitState) -> f64 {
    let amp = (s.amps[1] - s.amps[2]) * FRAC_1_SQRT_2;
    amp.norm_sqr().clamp(0.0, 1.0)
}

/// Imperfect two-photon interference: dip depth `d` at zero delay and a Gaussian
/// delay envelope of width `tau_c` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceModel {
    dip_depth: f64,
    tau_c: f64,
}

impl CoincidenceModel {
    pub fn new(dip_depth: f64, tau_c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&dip_depth) {
            return Err(Error::domain(format!("dip depth {dip_depth} outside [0, 1]")));
        }
        if !(tau_c.is_finite() && tau_c > 0.0) {
            return Err(Error::domain(format!("coherence time {tau_c} must be positive")));
        }
        Ok(CoincidenceModel { dip_depth, tau_c })
    }

    /// Dip depth `d` with the default coherence time.
    pub fn with_dip_depth(dip_depth: f64) -> Result<Self> {
        Self::new(dip_depth, DEFAULT_TAU_C)
    }

    /// Perfect interference, `d = 1`.
    pub fn ideal() -> Self {
        CoincidenceModel { dip_depth: 1.0, tau_c: DEFAULT_TAU_C }
    }

    pub fn dip_depth(&self) -> f64 {
        self.dip_depth
    }

    pub fn tau_c(&self) -> f64 {
        self.tau_c
    }

    /// `d * exp(-(delay / tau_c)^2)`; zero for infinite delay.
    pub fn effective_depth(&self, delay: f64) -> f64 {
        let x = delay / self.tau_c;
        self.dip_depth * (-x * x).exp()
    }
}

impl Default for CoincidenceModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Probability that the two detectors behind the beam splitter fire together.
pub fn coincidence_probability(s: &TwoQubitState, model: &CoincidenceModel, delay: f64) -> f64 {
    let d = model.effective_depth(delay);
    ((1.0 - d) / 2.0 + d * singlet_fraction(s)).clamp(0.0, 1.0)
}

/// Normalized coincidence rate `R / R_max` for the product state `a (x) b` at each delay,
/// where `R_max` is the rate for fully distinguishable photons.
pub fn dip_curve(a: &BlochState, b: &BlochState, model: &CoincidenceModel, delays: &[f64]) -> Result<Vec<(f64, f64)>> {
    if delays.is_empty() {
        return Err(Error::domain("dip curve needs at least one delay"));
    }
    let state = product_state(a, b);
    let r_max = coincidence_probability(&state, model, f64::INFINITY);
    Ok(delays.iter().map(|&tau| (tau, coincidence_probability(&state, model, tau) / r_max)).collect())
}

/// `points` delays evenly spaced over `[-tau_max, tau_max]`.
pub fn symmetric_delays(tau_max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => {
            let step = 2.0 * tau_max / (n - 1) as f64;
            (0..n)
                .map(|k| {
                    // mirror the lower half so the grid is exactly symmetric
                    if 2 * k + 1 < n {
                        -tau_max + step * k as f64
                    } else if 2 * k + 1 == n {
                        0.0
                    } else {
                        tau_max - step * (n - 1 - k) as f64
                    }
                })
                .collect()
        }
    }
}

/// CSV with header `tau_s,relative_rate`.
pub fn dip_curve_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("tau_s,relative_rate\n");
    for (tau, rate) in curve {
        out.push_str(&format!("{tau:?},{rate:?}\n"));
    }
    out
}
