//! Pure single-qubit states on the Bloch sphere and fingerprint encodings.
//!
//! A state `(theta, phi)` stands for `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
//! The overlap `|<a|b>|^2` of two states measures how hard they are to tell apart;
//! a good encoding keeps the largest overlap between distinct messages small.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Two encoded states closer than this overlap are treated as the same fingerprint.
pub const INJECTIVITY_TOL: f64 = 1e-9;

/// A pure qubit state in Bloch-sphere coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    theta: f64,
    phi: f64,
}

impl BlochState {
    /// Builds a state from polar angle `theta` in `[0, pi]` and azimuth `phi`.
    ///
    /// `phi` is reduced into `[0, 2pi)`. `theta` is validated rather than clamped.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::domain(format!("non-finite angles ({theta}, {phi})")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("theta = {theta} outside [0, pi]")));
        }
        Ok(BlochState { theta, phi: normalize_phi(phi) })
    }

    /// `|0>`, the north pole.
    pub fn zero() -> Self {
        BlochState { theta: 0.0, phi: 0.0 }
    }

    /// `|1>`, the south pole.
    pub fn one() -> Self {
        BlochState { theta: PI, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Amplitudes on `|0>` and `|1>`.
    pub fn amplitudes(&self) -> [Complex64; 2] {
        let half = self.theta / 2.0;
        [Complex64::new(half.cos(), 0.0), Complex64::from_polar(half.sin(), self.phi)]
    }

    /// Unit Bloch vector `(sin t cos p, sin t sin p, cos t)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    fn from_bloch_vector(v: [f64; 3]) -> Self {
        let theta = v[2].clamp(-1.0, 1.0).acos();
        let phi = if v[0] == 0.0 && v[1] == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
        BlochState { theta, phi: normalize_phi(phi) }
    }
}

fn normalize_phi(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Squared inner product `|<a|b>|^2`, evaluated from the half-angle expression
/// `|cos(ta/2) cos(tb/2) + e^{i(pb - pa)} sin(ta/2) sin(tb/2)|^2`.
pub fn overlap(a: &BlochState, b: &BlochState) -> f64 {
    let (sa, ca) = (a.theta / 2.0).sin_cos();
    let (sb, cb) = (b.theta / 2.0).sin_cos();
    let amp = Complex64::new(ca * cb, 0.0) + Complex64::from_polar(sa * sb, b.phi - a.phi);
    amp.norm_sqr().clamp(0.0, 1.0)
}

/// An injective assignment of one qubit state per message `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    states: Vec<BlochState>,
}

impl Encoding {
    /// Requires at least two states, pairwise distinguishable up to [`INJECTIVITY_TOL`].
    pub fn new(states: Vec<BlochState>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::domain(format!("an encoding needs at least 2 messages, got {}", states.len())));
        }
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                if overlap(&states[i], &states[j]) >= 1.0 - INJECTIVITY_TOL {
                    return Err(Error::domain(format!("messages {i} and {j} map to the same state")));
                }
            }
        }
        Ok(Encoding { states })
    }

    /// Number of messages.
    pub fn m(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BlochState] {
        &self.states
    }

    pub fn state(&self, w: usize) -> Option<&BlochState> {
        self.states.get(w)
    }

    /// Largest overlap between the states of two distinct messages.
    pub fn delta_max(&self) -> f64 {
        self.pair_overlaps().map(|(_, _, o)| o).fold(0.0, f64::max)
    }

    /// Overlaps of all unordered pairs `i < j`.
    pub fn pair_overlaps(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.states.len();
        (0..m).flat_map(move |i| ((i + 1)..m).map(move |j| (i, j, overlap(&self.states[i], &self.states[j]))))
    }

    /// CSV with header `w,theta,phi`; angles use the shortest exact round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,theta,phi\n");
        for (w, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "{w},{:?},{:?}", s.theta, s.phi);
        }
        out
    }

    /// Parses the format written by [`Encoding::to_csv`]. Rows must list `w = 0, 1, ...` in order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim().replace(' ', "") == "w,theta,phi" => {}
            Some((i, _)) => return Err(Error::parse(i + 1, 0, "expected header `w,theta,phi`")),
            None => return Err(Error::parse(1, 0, "empty input")),
        }
        let mut states = Vec::new();
        for (i, line) in lines {
            let row = i + 1;
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 3 {
                return Err(Error::parse(row, 0, format!("expected 3 cells, found {}", cells.len())));
            }
            let w: usize =
                cells[0].parse().map_err(|_| Error::parse(row, 1, format!("bad message index {:?}", cells[0])))?;
            if w != states.len() {
                return Err(Error::parse(row, 1, format!("expected message {}, found {w}", states.len())));
            }
            let angle = |col: usize| -> Result<f64> {
                cells[col - 1]
                    .parse::<f64>()
                    .map_err(|_| Error::parse(row, col, format!("not a number: {:?}", cells[col - 1])))
            };
            let (theta, phi) = (angle(2)?, angle(3)?);
            let state = BlochState::new(theta, phi).map_err(|e| Error::parse(row, 2, e.to_string()))?;
            states.push(state);
        }
        Encoding::new(states)
    }
}

/// Maximum pairwise overlap of an encoding.
pub fn delta_max(enc: &Encoding) -> f64 {
    enc.delta_max()
}

/// Polar angle shared by the three non-polar tetrahedral states, `2 acos(1/sqrt 3)`.
pub fn tetrahedral_theta() -> f64 {
    2.0 * (1.0 / 3f64.sqrt()).acos()
}

/// The four states at the vertices of a regular tetrahedron: `|0>` and
/// `(2 acos(1/sqrt 3), 2 pi w / 3)` for `w = 1, 2, 3`. Every distinct pair has overlap 1/3.
pub fn tetrahedral_encoding() -> Encoding {
    let theta = tetrahedral_theta();
    let mut states = vec![BlochState::zero()];
    states.extend((1..=3).map(|w| BlochState { theta, phi: normalize_phi(TAU * w as f64 / 3.0) }));
    Encoding { states }
}

const SEARCH_RESTARTS: usize = 8;
const RIESZ_EXPONENT: f64 = 6.0;

/// Seeded search for an `m`-state encoding with small maximum overlap.
///
/// Each restart relaxes random Bloch vectors under a Riesz repulsion and then anneals
/// the exact maximum overlap with shrinking random perturbations. The best restart is
/// returned. The result depends only on `(m, iterations, seed)`.
pub fn search_encoding(m: usize, iterations: usize, seed: u64) -> Result<Encoding> {
    if m < 2 {
        return Err(Error::domain(format!("m must be at least 2, got {m}")));
    }
    if iterations == 0 {
        return Err(Error::domain("iterations must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<[f64; 3]>)> = None;
    for _ in 0..SEARCH_RESTARTS {
        let mut pts: Vec<[f64; 3]> = (0..m).map(|_| random_unit(&mut rng)).collect();
        relax(&mut pts, iterations);
        anneal(&mut pts, iterations, &mut rng);
        let score = max_dot(&pts);
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, pts));
        }
    }
    let (_, pts) = best.expect("at least one restart");
    Encoding::new(pts.into_iter().map(BlochState::from_bloch_vector).collect())
}

fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n2 = dot(&v, &v);
        if n2 > 1e-4 && n2 <= 1.0 {
            return scale(&v, 1.0 / n2.sqrt());
        }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: &[f64; 3], k: f64) -> [f64; 3] {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    scale(&a, 1.0 / dot(&a, &a).sqrt())
}

/// Overlap is `(1 + n.n') / 2`, so minimizing the largest dot product is equivalent.
fn max_dot(pts: &[[f64; 3]]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(dot(&pts[i], &pts[j]));
        }
    }
    best
}

fn riesz_energy(pts: &[[f64; 3]]) -> f64 {
    let mut e = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d2 = (2.0 - 2.0 * dot(&pts[i], &pts[j])).max(1e-300);
            e += d2.powf(-RIESZ_EXPONENT / 2.0);
        }
    }
    e
}

/// Projected gradient descent on the Riesz energy with a backtracking step.
fn relax(pts: &mut [[f64; 3]], iterations: usize) {
    let m = pts.len();
    let mut step = 0.1;
    let mut energy = riesz_energy(pts);
    for _ in 0..iterations {
        let mut force = vec![[0.0; 3]; m];
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let diff = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1], pts[i][2] - pts[j][2]];
                let d2 = dot(&diff, &diff).max(1e-300);
                let k = RIESZ_EXPONENT * d2.powf(-RIESZ_EXPONENT / 2.0 - 1.0);
                for c in 0..3 {
                    force[i][c] += k * diff[c];
                }
            }
            let radial = dot(&force[i], &pts[i]);
            for c in 0..3 {
                force[i][c] -= radial * pts[i][c];
            }
        }
        let fmax = force.iter().map(|f| dot(f, f).sqrt()).fold(0.0, f64::max);
        if fmax < 1e-300 {
            break;
        }
        loop {
            let trial: Vec<[f64; 3]> = pts
                .iter()
                .zip(&force)
                .map(|(p, f)| {
                    let k = step / fmax;
                    normalized([p[0] + k * f[0], p[1] + k * f[1], p[2] + k * f[2]])
                })
                .collect();
            let e = riesz_energy(&trial);
            if e < energy {
                pts.copy_from_slice(&trial);
                energy = e;
                step = (step * 1.2).min(0.5);
                break;
            }
            step *= 0.5;
            if step < 1e-15 {
                return;
            }
        }
    }
}

/// Random joint perturbations, accepted only when the largest dot product drops.
fn anneal(pts: &mut [[f64; 3]], iterations: usize, rng: &mut impl Rng) {
    let mut sigma = 1e-3;
    let mut current = max_dot(pts);
    let mut failures = 0;
    for _ in 0..iterations {
        let trial: Vec<[f64; 3]> = pts
            .iter()
            .map(|p| {
                normalized([
                    p[0] + sigma * rng.random_range(-1.0..1.0),
                    p[1] + sigma * rng.random_range(-1.0..1.0),
                    p[2] + sigma * rng.random_range(-1.0..1.0),
                ])
            })
            .collect();
        let score = max_dot(&trial);
        if score < current {
            pts.copy_from_slice(&trial);
            current = score;
            failures = 0;
        } else {
            failures += 1;
            if failures >= 20 {
                sigma *= 0.5;
                failures = 0;
                if sigma < 1e-13 {
                    break;
                }
            }
        }
    }
}
