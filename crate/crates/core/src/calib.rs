//! Visibility tables and calibration of the coincidence model.
//!
//! A visibility is the fractional dip `1 - R(0) / R_max` measured for one pair of
//! encoded states, Alice's message on the rows and Bob's on the columns. The diagonal
//! estimates the dip depth `d`; the off-diagonal mean `v_off` plays the role of
//! `d * overlap` for distinct states.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::strategy::{optimize_mixed, MixedStrategy};
use crate::{Error, Result};

/// Measured visibilities for every pair of tetrahedral states (two-photon experiment,
/// 2-nm filtered down-conversion photons).
pub const TETRAHEDRAL_VISIBILITIES_CSV: &str = "\
alice,0,1,2,3
0,0.88,0.31,0.24,0.26
1,0.30,0.88,0.25,0.40
2,0.44,0.30,0.89,0.25
3,0.20,0.30,0.35,0.89
";

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityTable {
    entries: Vec<Vec<f64>>,
}

impl VisibilityTable {
    /// Square, at least 2x2, every entry in `[0, 1]`.
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let m = entries.len();
        if m < 2 {
            return Err(Error::domain("visibility table needs at least 2 messages"));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::domain(format!("row {i} has {} entries, expected {m}", row.len())));
            }
            if let Some(j) = row.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::domain(format!("entry ({i}, {j}) = {} outside [0, 1]", row[j])));
            }
        }
        Ok(VisibilityTable { entries })
    }

    /// Unit diagonal and `1/3` elsewhere: perfect tetrahedral states.
    pub fn ideal_tetrahedral() -> Self {
        let entries = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 1.0 / 3.0 }).collect()).collect();
        VisibilityTable { entries }
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, alice: usize, bob: usize) -> f64 {
        self.entries[alice][bob]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Same messages relabelled on both axes: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let m = self.m();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::domain("not a permutation of the messages"));
        }
        let mut entries = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                entries[perm[i]][perm[j]] = self.entries[i][j];
            }
        }
        Ok(VisibilityTable { entries })
    }

    /// Header `alice,0,1,...`, then one row per Alice message.
    pub fn to_csv(&self) -> String {
        let m = self.m();
        let mut out = String::from("alice");
        for j in 0..m {
            let _ = write!(out, ",{j}");
        }
        out.push('\n');
        for (i, row) in self.entries.iter().enumerate() {
            let _ = write!(out, "{i}");
            for v in row {
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a visibility table. Rows and columns in errors are 1-based CSV coordinates.
pub fn parse_visibility_csv(text: &str) -> Result<VisibilityTable> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let (header_row, header) = lines.next().ok_or_else(|| Error::parse(1, 0, "empty input"))?;
    let head: Vec<&str> = header.split(',').map(str::trim).collect();
    if !head[0].eq_ignore_ascii_case("alice") {
        return Err(Error::parse(header_row, 1, "header must start with `alice`"));
    }
    let m = head.len() - 1;
    if m < 2 {
        return Err(Error::parse(header_row, 0, "header lists fewer than 2 Bob messages"));
    }
    for (j, cell) in head.iter().enumerate().skip(1) {
        if cell.parse::<usize>() != Ok(j - 1) {
            return Err(Error::parse(header_row, j + 1, format!("expected Bob message {}, found {cell:?}", j - 1)));
        }
    }

    let mut entries: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (row, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != m + 1 {
            return Err(Error::parse(row, 0, format!("expected {} cells, found {}", m + 1, cells.len())));
        }
        let alice = entries.len();
        if alice >= m {
            return Err(Error::parse(row, 0, format!("more than {m} Alice rows")));
        }
        if cells[0].parse::<usize>() != Ok(alice) {
            return Err(Error::parse(row, 1, format!("expected Alice message {alice}, found {:?}", cells[0])));
        }
        let mut values = Vec::with_capacity(m);
        for (j, cell) in cells.iter().enumerate().skip(1) {
            let v: f64 = cell.parse().map_err(|_| Error::parse(row, j + 1, format!("not a number: {cell:?}")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::parse(
                    row,
                    j + 1,
                    format!("visibility {v} for (alice {alice}, bob {}) outside [0, 1]", j - 1),
                ));
            }
            values.push(v);
        }
        entries.push(values);
    }
    if entries.len() != m {
        return Err(Error::parse(header_row, 0, format!("expected {m} Alice rows, found {}", entries.len())));
    }
    VisibilityTable::new(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Mean diagonal visibility.
    pub d: f64,
    /// Mean off-diagonal visibility.
    pub v_off: f64,
    /// `(1 - d) / 2`.
    pub p_same_err: f64,
    /// `(1 + v_off) / 2`.
    pub p_diff_err: f64,
}

impl CalibrationResult {
    pub fn from_visibilities(d: f64, v_off: f64) -> Self {
        CalibrationResult { d, v_off, p_same_err: (1.0 - d) / 2.0, p_diff_err: (1.0 + v_off) / 2.0 }
    }

    /// Two-decimal figures: `d` rounded down (a floor on the dip depth), `v_off` to nearest.
    pub fn rounded(&self) -> Self {
        let floor2 = |x: f64| ((x * 100.0) + 1e-9).floor() / 100.0;
        let round2 = |x: f64| (x * 100.0).round() / 100.0;
        Self::from_visibilities(floor2(self.d), round2(self.v_off))
    }
}

pub fn calibrate(table: &VisibilityTable) -> CalibrationResult {
    let m = table.m();
    let diag: f64 = (0..m).map(|i| table.get(i, i)).sum();
    let total: f64 = table.entries().iter().flatten().sum();
    let d = diag / m as f64;
    let v_off = (total - diag) / (m * (m - 1)) as f64;
    CalibrationResult::from_visibilities(d, v_off)
}

pub fn calibrate_and_optimize(table: &VisibilityTable) -> Result<(CalibrationResult, MixedStrategy)> {
    let cal = calibrate(table);
    let strategy = optimize_mixed(cal.p_same_err, cal.p_diff_err)?;
    Ok((cal, strategy))
}
