//! One round of the fingerprinting game.
//!
//! Sapna hands `x` to Alice and `y` to Bob. In the unentangled protocol each encodes a
//! photon with its message's state; in the entangled protocol both apply a Pauli
//! operator to their half of a shared singlet. Roger mixes the photons on a beam
//! splitter (`r = 1` on a coincidence) and guesses `z` for `EQ(x, y)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qstate::{BlochState, Encoding};
use crate::twophoton::{
    apply_pauli_pair, bell_singlet, coincidence_probability, product_state, CoincidenceModel, PauliOp, TwoQubitState,
};
use crate::{Error, Result};

/// Message count of the entangled protocol: one per Pauli operator.
pub const ENTANGLED_M: usize = 4;

/// A message `value` drawn from `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Message {
    value: usize,
    m: usize,
}

impl Message {
    pub fn new(value: usize, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!("message set size must be at least 2, got {m}")));
        }
        if value >= m {
            return Err(Error::domain(format!("message {value} outside 0..{m}")));
        }
        Ok(Message { value, m })
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Bits needed to write a message, `ceil(log2 m)`.
    pub fn bit_length(&self) -> u32 {
        usize::BITS - (self.m - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Independent photons carrying the encoded states.
    QuantumUnentangled,
    /// A shared singlet with Pauli encoding.
    QuantumEntangled,
}

/// How Roger turns the detector outcome into a verdict.
///
/// `Mixed { pi0, pi1 }` first forms the pure guess `z*`, then replaces `z* = 1` by 0 with
/// probability `pi0` and `z* = 0` by 1 with probability `pi1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RogerStrategy {
    Pure,
    Mixed { pi0: f64, pi1: f64 },
}

impl RogerStrategy {
    pub fn mixed(pi0: f64, pi1: f64) -> Result<Self> {
        for (name, p) in [("pi0", pi0), ("pi1", pi1)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(RogerStrategy::Mixed { pi0, pi1 })
    }

    /// `(pi0, pi1)`; the pure strategy is `(0, 0)`.
    pub fn flip_probabilities(&self) -> (f64, f64) {
        match *self {
            RogerStrategy::Pure => (0.0, 0.0),
            RogerStrategy::Mixed { pi0, pi1 } => (pi0, pi1),
        }
    }

    /// `P(z = 1)` given `P(z* = 1)`.
    pub fn prob_says_equal(&self, prob_initial_equal: f64) -> f64 {
        let (pi0, pi1) = self.flip_probabilities();
        prob_initial_equal * (1.0 - pi0) + (1.0 - prob_initial_equal) * pi1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub x: Message,
    pub y: Message,
    /// Detector coincidence.
    pub r: bool,
    /// Roger's verdict, `true` for "equal".
    pub z: bool,
    pub correct: bool,
}

/// Roger's worst-case error rates for the two kinds of input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRates {
    pub p_same_err: f64,
    pub p_diff_err: f64,
    pub wcs_err: f64,
}

pub fn encode_unentangled(w: &Message, enc: &Encoding) -> Result<BlochState> {
    if w.m != enc.m() {
        return Err(Error::domain(format!("message from a set of {} but encoding has {} states", w.m, enc.m())));
    }
    Ok(enc.states()[w.value])
}

/// Fixed bijection `0 -> I, 1 -> X, 2 -> Y, 3 -> Z`.
pub fn encode_entangled(w: &Message) -> Result<PauliOp> {
    if w.m != ENTANGLED_M {
        return Err(Error::domain(format!("the entangled protocol needs m = {ENTANGLED_M}, got {}", w.m)));
    }
    Ok(PauliOp::ALL[w.value])
}

/// Roger's verdict for detector outcome `r`.
///
/// Unentangled: a coincidence proves the states differ, so `z* = 1 - r`. Entangled: only
/// the singlet (equal messages) produces a coincidence, so `z* = r`. Exactly one uniform
/// draw is consumed in every case, which keeps `Pure` and `Mixed(0, 0)` in lockstep.
pub fn roger_infer<R: Rng + ?Sized>(kind: ProtocolKind, r: bool, strategy: &RogerStrategy, rng: &mut R) -> bool {
    let initial = match kind {
        ProtocolKind::QuantumUnentangled => !r,
        ProtocolKind::QuantumEntangled => r,
    };
    let (pi0, pi1) = strategy.flip_probabilities();
    let u: f64 = rng.random();
    if initial {
        u >= pi0
    } else {
        u < pi1
    }
}

/// The two-photon state reaching Roger's beam splitter.
pub fn joint_state(kind: ProtocolKind, x: &Message, y: &Message, enc: &Encoding) -> Result<TwoQubitState> {
    if x.m != y.m {
        return Err(Error::domain("Alice's and Bob's messages come from different sets"));
    }
    match kind {
        ProtocolKind::QuantumUnentangled => {
            Ok(product_state(&encode_unentangled(x, enc)?, &encode_unentangled(y, enc)?))
        }
        ProtocolKind::QuantumEntangled => {
            Ok(apply_pauli_pair(&bell_singlet(), encode_entangled(x)?, encode_entangled(y)?))
        }
    }
}

/// `P(z* = 1)` for one message pair at zero delay.
pub fn prob_initial_equal(
    kind: ProtocolKind,
    x: &Message,
    y: &Message,
    enc: &Encoding,
    model: &CoincidenceModel,
) -> Result<f64> {
    let p_coinc = coincidence_probability(&joint_state(kind, x, y, enc)?, model, 0.0);
    Ok(match kind {
        ProtocolKind::QuantumUnentangled => 1.0 - p_coinc,
        ProtocolKind::QuantumEntangled => p_coinc,
    })
}

/// Probability that Roger's verdict on `(x, y)` is wrong.
pub fn pair_error(
    kind: ProtocolKind,
    x: &Message,
    y: &Message,
    enc: &Encoding,
    model: &CoincidenceModel,
    strategy: &RogerStrategy,
) -> Result<f64> {
    let says_equal = strategy.prob_says_equal(prob_initial_equal(kind, x, y, enc, model)?);
    Ok(if x.value == y.value { 1.0 - says_equal } else { says_equal })
}

/// Plays one round: builds the joint state, samples the detector, and scores Roger.
///
/// Draws exactly two uniforms from `rng`: one for the detector and one for Roger.
pub fn run_trial<R: Rng + ?Sized>(
    kind: ProtocolKind,
    x: Message,
    y: Message,
    enc: &Encoding,
    model: &CoincidenceModel,
    strategy: &RogerStrategy,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let state = joint_state(kind, &x, &y, enc)?;
    let p = coincidence_probability(&state, model, 0.0);
    let r = rng.random::<f64>() < p;
    let z = roger_infer(kind, r, strategy, rng);
    Ok(TrialOutcome { x, y, r, z, correct: z == (x.value == y.value) })
}

/// Worst-case error over equal pairs, over unequal pairs, and overall.
///
/// Every message pair is evaluated, so encodings with uneven overlaps report their
/// worst pair. The entangled protocol ignores `enc` apart from requiring `m = 4`.
pub fn analytic_rates(
    kind: ProtocolKind,
    enc: &Encoding,
    model: &CoincidenceModel,
    strategy: &RogerStrategy,
) -> Result<AnalyticRates> {
    let m = enc.m();
    if kind == ProtocolKind::QuantumEntangled && m != ENTANGLED_M {
        return Err(Error::domain(format!("the entangled protocol needs m = {ENTANGLED_M}, got {m}")));
    }
    let mut p_same_err: f64 = 0.0;
    let mut p_diff_err: f64 = 0.0;
    for xv in 0..m {
        for yv in 0..m {
            let (x, y) = (Message::new(xv, m)?, Message::new(yv, m)?);
            let e = pair_error(kind, &x, &y, enc, model, strategy)?;
            if xv == yv {
                p_same_err = p_same_err.max(e);
            } else {
                p_diff_err = p_diff_err.max(e);
            }
        }
    }
    Ok(AnalyticRates { p_same_err, p_diff_err, wcs_err: p_same_err.max(p_diff_err) })
}
