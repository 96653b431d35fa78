//! Exhaustive game values for classical one-bit fingerprinting.
//!
//! Alice and Bob each send Roger a `g`-bit fingerprint of their message. They may share
//! `k` random bits that Sapna does not know; Roger sees only the two fingerprints. The
//! solvers below enumerate every deterministic protocol and report the best worst-case
//! value in exact rational arithmetic.
//!
//! With shared randomness the protocol is a list of `2^k` joint encodings
//! `(Alice table, Bob table)`, one per shared value. Only the multiset matters because
//! the shared value is uniform. For a fixed Roger rule the success of a message pair
//! depends only on how many shared values route it to each of Roger's four cells, so
//! multisets are grouped by the set of `(equal?, cell counts)` constraints they induce.
//! Each distinct constraint set is then solved once: by trying all 16 deterministic
//! rules, or by a linear program over Roger's four cell probabilities.

mod lp;

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact probability.
pub type Prob = Rational64;

/// Largest number of shared random bits the enumeration accepts.
pub const MAX_SHARED_BITS: u32 = 2;
/// Largest message count for the two-party enumerations with one-bit fingerprints.
pub const MAX_GAME_MESSAGES: usize = 4;

/// Whether Roger's verdict is a function of the fingerprints or a biased coin per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RogerClass {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedRandomnessConfig {
    k: u32,
}

impl SharedRandomnessConfig {
    pub fn new(k: u32) -> Result<Self> {
        if k > MAX_SHARED_BITS {
            return Err(Error::Unsupported(format!(
                "{k} shared random bits; at most {MAX_SHARED_BITS} can be enumerated"
            )));
        }
        Ok(SharedRandomnessConfig { k })
    }

    pub fn bits(&self) -> u32 {
        self.k
    }

    /// Number of equally likely shared values, `2^k`.
    pub fn values(&self) -> usize {
        1 << self.k
    }
}

/// Fingerprint lookup table: `table[s][w]` is the fingerprint of message `w` under
/// shared value `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalEncoding {
    g: u32,
    table: Vec<Vec<u8>>,
}

impl ClassicalEncoding {
    pub fn new(g: u32, table: Vec<Vec<u8>>) -> Result<Self> {
        if !(1..=2).contains(&g) {
            return Err(Error::domain(format!("fingerprint length {g} not in 1..=2")));
        }
        let m = table.first().map_or(0, Vec::len);
        if m < 2 || !table.len().is_power_of_two() {
            return Err(Error::domain("table needs 2^k rows of at least 2 messages"));
        }
        if table.iter().any(|row| row.len() != m) {
            return Err(Error::domain("ragged fingerprint table"));
        }
        if table.iter().flatten().any(|&f| u32::from(f) >= 1 << g) {
            return Err(Error::domain(format!("fingerprint does not fit in {g} bits")));
        }
        Ok(ClassicalEncoding { g, table })
    }

    pub fn m(&self) -> usize {
        self.table[0].len()
    }

    pub fn fingerprint_bits(&self) -> u32 {
        self.g
    }

    pub fn shared_values(&self) -> usize {
        self.table.len()
    }

    pub fn fingerprint(&self, w: usize, s: usize) -> u8 {
        self.table[s][w]
    }

    pub fn table(&self) -> &[Vec<u8>] {
        &self.table
    }
}

/// Roger's one-bit-fingerprint rule: `q[a][b]` is the probability of answering "equal"
/// after receiving `a` from Alice and `b` from Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RogerRule {
    q: [[Prob; 2]; 2],
}

impl RogerRule {
    pub fn new(q: [[Prob; 2]; 2]) -> Result<Self> {
        if q.iter().flatten().any(|p| *p < Prob::zero() || *p > Prob::one()) {
            return Err(Error::domain("Roger's answer probabilities must lie in [0, 1]"));
        }
        Ok(RogerRule { q })
    }

    pub fn prob_equal(&self, a: u8, b: u8) -> Prob {
        self.q[a as usize][b as usize]
    }

    pub fn is_pure(&self) -> bool {
        self.q.iter().flatten().all(|p| p.is_zero() || p.is_one())
    }

    fn from_cells(cells: [Prob; 4]) -> Self {
        RogerRule { q: [[cells[0], cells[1]], [cells[2], cells[3]]] }
    }
}

/// Outcome of [`best_success_shared_random`]: the optimal worst-case success and a
/// protocol achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct GameValueReport {
    pub m: usize,
    pub shared_bits: u32,
    pub roger: RogerClass,
    pub best_success: Prob,
    pub alice: ClassicalEncoding,
    pub bob: ClassicalEncoding,
    pub roger_rule: RogerRule,
}

#[derive(Serialize)]
struct ExactValue {
    fraction: String,
    value: f64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    best_success: ExactValue,
    alice_table: &'a [Vec<u8>],
    bob_table: &'a [Vec<u8>],
    roger_rule: [[String; 2]; 2],
}

impl GameValueReport {
    /// Re-plays the witness protocol against every message pair.
    pub fn evaluate(&self) -> Result<Prob> {
        evaluate_protocol(&self.alice, &self.bob, &self.roger_rule)
    }

    /// JSON object with `best_success` (exact fraction and float), `alice_table`,
    /// `bob_table` and `roger_rule`.
    pub fn to_json(&self) -> serde_json::Value {
        let q = self.roger_rule.q.map(|row| row.map(|p| p.to_string()));
        serde_json::to_value(ReportJson {
            best_success: ExactValue { fraction: self.best_success.to_string(), value: to_f64(self.best_success) },
            alice_table: self.alice.table(),
            bob_table: self.bob.table(),
            roger_rule: q,
        })
        .expect("report serializes")
    }
}

pub fn to_f64(p: Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Worst case over message pairs of Roger's success, averaged over the shared value.
pub fn evaluate_protocol(alice: &ClassicalEncoding, bob: &ClassicalEncoding, rule: &RogerRule) -> Result<Prob> {
    if alice.m() != bob.m() || alice.shared_values() != bob.shared_values() {
        return Err(Error::domain("Alice's and Bob's tables have different shapes"));
    }
    if alice.g != 1 || bob.g != 1 {
        return Err(Error::domain("Roger's rule is defined for one-bit fingerprints"));
    }
    let m = alice.m();
    let shared = alice.shared_values() as i64;
    let mut worst = Prob::one();
    for x in 0..m {
        for y in 0..m {
            let mut total = Prob::zero();
            for s in 0..alice.shared_values() {
                let p_equal = rule.prob_equal(alice.fingerprint(x, s), bob.fingerprint(y, s));
                total += if x == y { p_equal } else { Prob::one() - p_equal };
            }
            worst = worst.min(total / shared);
        }
    }
    Ok(worst)
}

/// Best worst-case error of a one-sided protocol in which Alice and Bob share one
/// deterministic `g`-bit encoding and Roger never errs on equal messages.
///
/// Every encoding is enumerated. For each one the optimal one-sided rule is found cell
/// by cell: a cell that can receive an equal pair must answer "equal"; any other cell
/// answers "different". Cells are independent because each message pair lands in one.
pub fn wcs_error_one_sided(m: usize, g: u32) -> Result<Prob> {
    if !(1..=2).contains(&g) {
        return Err(Error::Unsupported(format!("fingerprint length {g} not in 1..=2")));
    }
    if !(2..=8).contains(&m) {
        return Err(Error::Unsupported(format!("message count {m} not in 2..=8")));
    }
    let f = 1usize << g;
    let encodings = f.pow(m as u32);
    let mut best = Prob::one();
    for code in 0..encodings {
        let enc: Vec<usize> = (0..m).map(|w| (code / f.pow(w as u32)) % f).collect();
        let mut worst = Prob::zero();
        for a in 0..f {
            for b in 0..f {
                let holds_equal = a == b && enc.contains(&a);
                let holds_unequal = (0..m).any(|x| (0..m).any(|y| x != y && enc[x] == a && enc[y] == b));
                if holds_equal && holds_unequal {
                    worst = Prob::one();
                }
            }
        }
        best = best.min(worst);
    }
    Ok(best)
}

/// Roger's optimal answer probability for a cell and the resulting worst error there.
/// Answering "equal" with probability `q` errs with `1 - q` on equal pairs and `q` on
/// unequal ones; the max of the two is smallest at `q = 1/2` when both can occur.
fn cell_minimax(holds_equal: bool, holds_unequal: bool) -> (Prob, Prob) {
    match (holds_equal, holds_unequal) {
        (true, true) => (Prob::new(1, 2), Prob::new(1, 2)),
        (true, false) => (Prob::one(), Prob::zero()),
        (false, _) => (Prob::zero(), Prob::zero()),
    }
}

/// Best worst-case error with independent deterministic one-bit encodings for Alice and
/// Bob, no shared randomness, and Roger free to randomize per cell.
pub fn min_wcs_error_two_sided(m: usize) -> Result<Prob> {
    if !(2..=6).contains(&m) {
        return Err(Error::domain(format!("message count {m} not in 2..=6")));
    }
    let tables = 1usize << m;
    let mut best = Prob::one();
    for fa in 0..tables {
        for fb in 0..tables {
            let bit = |t: usize, w: usize| (t >> w) & 1;
            let mut worst = Prob::zero();
            for a in 0..2 {
                for b in 0..2 {
                    let mut holds_equal = false;
                    let mut holds_unequal = false;
                    for x in 0..m {
                        for y in 0..m {
                            if bit(fa, x) == a && bit(fb, y) == b {
                                if x == y {
                                    holds_equal = true;
                                } else {
                                    holds_unequal = true;
                                }
                            }
                        }
                    }
                    worst = worst.max(cell_minimax(holds_equal, holds_unequal).1);
                }
            }
            best = best.min(worst);
        }
    }
    Ok(best)
}

/// Best worst-case success of one-bit fingerprinting when Alice and Bob share `k`
/// uniformly random bits.
///
/// Alice's and Bob's tables range over all deterministic functions of (message, shared
/// value); Sapna picks the worst message pair without seeing the shared value; Roger's
/// rule is deterministic or randomized per `roger`.
pub fn best_success_shared_random(m: usize, k: u32, roger: RogerClass) -> Result<GameValueReport> {
    if !(2..=MAX_GAME_MESSAGES).contains(&m) {
        return Err(Error::domain(format!("message count {m} not in 2..={MAX_GAME_MESSAGES}")));
    }
    let config = SharedRandomnessConfig::new(k)?;
    let space = GameSpace::new(m, config.values());
    let signatures = space.distinct_signatures();

    let mut ordered: Vec<(Multiset, Signature)> = signatures.into_iter().map(|(sig, w)| (w, sig)).collect();
    ordered.sort_unstable();

    let mut best: Option<(Prob, Multiset, [Prob; 4])> = None;
    for (witness, sig) in ordered {
        let constraints = space.decode(sig);
        let (value, cells) = match roger {
            RogerClass::Pure => space.best_pure_rule(&constraints),
            RogerClass::Mixed => space.best_mixed_rule(&constraints),
        };
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, witness, cells));
        }
    }
    let (best_success, witness, cells) = best.expect("at least one protocol");
    let (alice, bob) = space.tables(&witness);
    Ok(GameValueReport { m, shared_bits: k, roger, best_success, alice, bob, roger_rule: RogerRule::from_cells(cells) })
}

/// Sorted joint-encoding indices, one per shared value; unused slots are `u16::MAX`.
type Multiset = [u16; 4];
/// Bit `2 * composition + equal` is set for every constraint present.
type Signature = u128;

#[derive(Default)]
struct SignatureHasher(u64);

impl Hasher for SignatureHasher {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ u64::from(b)).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }

    fn write_u128(&mut self, v: u128) {
        let folded = (v as u64) ^ ((v >> 64) as u64).rotate_left(29);
        self.0 = folded.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }

    fn finish(&self) -> u64 {
        self.0 ^ (self.0 >> 31)
    }
}

type SignatureMap = HashMap<Signature, Multiset, BuildHasherDefault<SignatureHasher>>;

/// A constraint on Roger's worst case: some message pair, equal or not, is routed to
/// cell `c` by `counts[c]` of the shared values.
#[derive(Debug, Clone, Copy)]
struct Constraint {
    equal: bool,
    counts: [u8; 4],
}

struct GameSpace {
    m: usize,
    shared: usize,
    /// Per joint encoding, the one-hot cell of every message pair packed as nibbles.
    onehots: Vec<[u16; 16]>,
    equal_pair: [bool; 16],
    /// Packed cell counts -> composition index, `u8::MAX` when not a composition.
    composition_index: Vec<u8>,
    compositions: Vec<[u8; 4]>,
}

impl GameSpace {
    fn new(m: usize, shared: usize) -> Self {
        let pairs = m * m;
        let encodings = 1usize << (2 * m);
        let onehots = (0..encodings)
            .map(|e| {
                let mut cells = [0u16; 16];
                for x in 0..m {
                    for y in 0..m {
                        let a = (e >> x) & 1;
                        let b = (e >> (m + y)) & 1;
                        cells[x * m + y] = 1 << (4 * (2 * a + b));
                    }
                }
                cells
            })
            .collect();
        let mut equal_pair = [false; 16];
        for x in 0..m {
            equal_pair[x * m + x] = true;
        }
        debug_assert!(pairs <= 16);

        let mut composition_index = vec![u8::MAX; 1 << 16];
        let mut compositions = Vec::new();
        for n0 in 0..=shared {
            for n1 in 0..=shared - n0 {
                for n2 in 0..=shared - n0 - n1 {
                    let n3 = shared - n0 - n1 - n2;
                    let packed = n0 | n1 << 4 | n2 << 8 | n3 << 12;
                    composition_index[packed] = compositions.len() as u8;
                    compositions.push([n0 as u8, n1 as u8, n2 as u8, n3 as u8]);
                }
            }
        }
        debug_assert!(2 * compositions.len() <= 128);
        GameSpace { m, shared, onehots, equal_pair, composition_index, compositions }
    }

    fn pairs(&self) -> usize {
        self.m * self.m
    }

    /// Every distinct signature with the lexicographically smallest multiset producing it.
    fn distinct_signatures(&self) -> SignatureMap {
        (0..self.onehots.len())
            .into_par_iter()
            .fold(SignatureMap::default, |mut map, first| {
                let mut multiset = [u16::MAX; 4];
                multiset[0] = first as u16;
                self.extend(1, first, self.onehots[first], &mut multiset, &mut map);
                map
            })
            .reduce(SignatureMap::default, |mut a, b| {
                for (sig, w) in b {
                    a.entry(sig).and_modify(|cur| *cur = (*cur).min(w)).or_insert(w);
                }
                a
            })
    }

    fn extend(&self, depth: usize, start: usize, partial: [u16; 16], multiset: &mut Multiset, map: &mut SignatureMap) {
        if depth == self.shared {
            let sig = self.signature(&partial);
            map.entry(sig).or_insert(*multiset);
            return;
        }
        for next in start..self.onehots.len() {
            let add = &self.onehots[next];
            let mut sum = partial;
            for p in 0..self.pairs() {
                sum[p] += add[p];
            }
            multiset[depth] = next as u16;
            self.extend(depth + 1, next, sum, multiset, map);
        }
    }

    fn signature(&self, counts: &[u16; 16]) -> Signature {
        let mut sig: Signature = 0;
        for (p, &count) in counts.iter().enumerate().take(self.pairs()) {
            let ci = self.composition_index[count as usize];
            debug_assert!(ci != u8::MAX);
            sig |= 1 << (2 * ci as u32 + self.equal_pair[p] as u32);
        }
        sig
    }

    fn decode(&self, sig: Signature) -> Vec<Constraint> {
        (0..2 * self.compositions.len())
            .filter(|bit| sig >> bit & 1 == 1)
            .map(|bit| Constraint { equal: bit & 1 == 1, counts: self.compositions[bit / 2] })
            .collect()
    }

    /// Success of a constraint under cell probabilities, times the number of shared values.
    fn scaled_success(&self, c: &Constraint, cells: &[Prob; 4]) -> Prob {
        let routed: Prob = (0..4).map(|i| cells[i] * i64::from(c.counts[i])).sum();
        if c.equal {
            routed
        } else {
            Prob::from_integer(self.shared as i64) - routed
        }
    }

    /// Tries all 16 deterministic rules; ties keep the lowest-numbered rule.
    fn best_pure_rule(&self, constraints: &[Constraint]) -> (Prob, [Prob; 4]) {
        let mut best: Option<(Prob, [Prob; 4])> = None;
        for rule in 0..16u32 {
            let cells: [Prob; 4] = std::array::from_fn(|i| Prob::from_integer(i64::from(rule >> i & 1)));
            let value =
                constraints.iter().map(|c| self.scaled_success(c, &cells)).min().expect("non-empty constraint set")
                    / self.shared as i64;
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, cells));
            }
        }
        best.expect("16 rules")
    }

    /// `max t` over `t <= success_j(q)`, `q in [0, 1]^4`, solved exactly.
    fn best_mixed_rule(&self, constraints: &[Constraint]) -> (Prob, [Prob; 4]) {
        let shared = Prob::from_integer(self.shared as i64);
        let int = |v: u8| Prob::from_integer(i64::from(v));
        let mut a = Vec::with_capacity(constraints.len() + 5);
        let mut b = Vec::with_capacity(constraints.len() + 5);
        for c in constraints {
            // equal:   K t - n.q <= 0
            // unequal: K t + n.q <= K
            let sign = if c.equal { -Prob::one() } else { Prob::one() };
            let mut row = vec![shared];
            row.extend(c.counts.iter().map(|&n| sign * int(n)));
            a.push(row);
            b.push(if c.equal { Prob::zero() } else { shared });
        }
        for i in 0..5 {
            let mut row = vec![Prob::zero(); 5];
            row[i] = Prob::one();
            a.push(row);
            b.push(Prob::one());
        }
        let objective = [Prob::one(), Prob::zero(), Prob::zero(), Prob::zero(), Prob::zero()];
        let (value, x) = lp::maximize(&objective, &a, &b).expect("bounded by t <= 1");
        (value, [x[1], x[2], x[3], x[4]])
    }

    fn tables(&self, multiset: &Multiset) -> (ClassicalEncoding, ClassicalEncoding) {
        let m = self.m;
        let rows = |offset: usize| -> Vec<Vec<u8>> {
            multiset[..self.shared]
                .iter()
                .map(|&e| (0..m).map(|w| ((e as usize >> (offset + w)) & 1) as u8).collect())
                .collect()
        };
        (
            ClassicalEncoding::new(1, rows(0)).expect("valid table"),
            ClassicalEncoding::new(1, rows(m)).expect("valid table"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Prob {
        Prob::new(1, 2)
    }

    #[test]
    fn one_sided_examples() {
        assert_eq!(wcs_error_one_sided(4, 1).unwrap(), Prob::one());
        assert_eq!(wcs_error_one_sided(2, 1).unwrap(), Prob::zero());
        assert_eq!(wcs_error_one_sided(8, 2).unwrap(), Prob::one());
        assert_eq!(wcs_error_one_sided(4, 2).unwrap(), Prob::zero());
        assert!(wcs_error_one_sided(9, 2).is_err());
        assert!(wcs_error_one_sided(4, 3).is_err());
    }

    #[test]
    fn two_sided_examples() {
        assert_eq!(min_wcs_error_two_sided(4).unwrap(), half());
        assert_eq!(min_wcs_error_two_sided(2).unwrap(), Prob::zero());
        assert_eq!(min_wcs_error_two_sided(3).unwrap(), half());
        assert!(min_wcs_error_two_sided(1).is_err());
        for m in 2..=4 {
            assert!(min_wcs_error_two_sided(m).unwrap() <= wcs_error_one_sided(m, 1).unwrap());
        }
    }

    #[test]
    fn cell_minimax_cases() {
        assert_eq!(cell_minimax(true, true), (half(), half()));
        assert_eq!(cell_minimax(true, false).1, Prob::zero());
        assert_eq!(cell_minimax(false, true).1, Prob::zero());
    }

    #[test]
    fn shared_randomness_small_k() {
        let r = best_success_shared_random(4, 0, RogerClass::Pure).unwrap();
        assert_eq!(r.best_success, Prob::zero());
        let r = best_success_shared_random(4, 0, RogerClass::Mixed).unwrap();
        assert_eq!(r.best_success, half());
        let r = best_success_shared_random(4, 1, RogerClass::Pure).unwrap();
        assert_eq!(r.best_success, half());
        assert_eq!(r.evaluate().unwrap(), r.best_success);
        assert!(r.roger_rule.is_pure());
    }

    #[test]
    fn injective_case_is_perfect() {
        let r = best_success_shared_random(2, 0, RogerClass::Pure).unwrap();
        assert_eq!(r.best_success, Prob::one());
        assert_eq!(r.evaluate().unwrap(), Prob::one());
    }

    #[test]
    fn zero_shared_bits_mixed_matches_two_sided_error() {
        for m in 2..=4 {
            let r = best_success_shared_random(m, 0, RogerClass::Mixed).unwrap();
            assert_eq!(Prob::one() - r.best_success, min_wcs_error_two_sided(m).unwrap());
        }
    }

    #[test]
    fn argument_validation() {
        assert!(matches!(best_success_shared_random(4, 3, RogerClass::Pure), Err(Error::Unsupported(_))));
        assert!(best_success_shared_random(5, 0, RogerClass::Pure).is_err());
        assert!(ClassicalEncoding::new(1, vec![vec![0, 2]]).is_err());
        assert!(ClassicalEncoding::new(1, vec![vec![0, 1], vec![0]]).is_err());
        assert!(ClassicalEncoding::new(1, vec![vec![0, 1]; 3]).is_err());
        assert!(RogerRule::new([[Prob::new(3, 2), Prob::zero()], [Prob::zero(); 2]]).is_err());
    }

    #[test]
    fn report_json_fields() {
        let r = best_success_shared_random(4, 1, RogerClass::Pure).unwrap();
        let json = r.to_json();
        let obj = json.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["alice_table", "best_success", "bob_table", "roger_rule"]);
        assert_eq!(json["best_success"]["fraction"], "1/2");
        assert_eq!(json["best_success"]["value"], 0.5);
        assert_eq!(json["alice_table"].as_array().unwrap().len(), 2);
    }
}
