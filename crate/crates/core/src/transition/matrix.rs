use std::fmt::Write as _;

use super::TransitionError;
use crate::decision::Action;
use crate::faulttree::{HealthState, N_STATES};

/// Tolerance on each row of a transition matrix summing to one.
pub const ROW_TOLERANCE: f64 = 1e-12;

/// `P(H_{t+1} | H_t, d)` for one action, stored densely with `H_t` as the row.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    action: Action,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(action: Action, entries: Vec<f64>) -> Result<Self, TransitionError> {
        if entries.len() != N_STATES * N_STATES {
            return Err(TransitionError::Shape(entries.len()));
        }
        let m = Self { action, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(action: Action) -> Self {
        let mut entries = vec![0.0; N_STATES * N_STATES];
        for h in 0..N_STATES {
            entries[h * N_STATES + h] = 1.0;
        }
        Self { action, entries }
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn get(&self, from: HealthState, to: HealthState) -> f64 {
        self.entries[from.index() * N_STATES + to.index()]
    }

    pub fn row(&self, from: HealthState) -> &[f64] {
        &self.entries[from.index() * N_STATES..(from.index() + 1) * N_STATES]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn validate(&self) -> Result<(), TransitionError> {
        for h in HealthState::all() {
            let row = self.row(h);
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(TransitionError::Row { state: h.decimal(), reason: "negative or non-finite entry".into() });
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOLERANCE {
                return Err(TransitionError::Row { state: h.decimal(), reason: format!("sums to {s}") });
            }
        }
        Ok(())
    }

    /// One step of belief propagation: `b' = b P`.
    pub fn propagate(&self, belief: &[f64]) -> Vec<f64> {
        assert_eq!(belief.len(), N_STATES);
        let mut next = vec![0.0; N_STATES];
        for (from, &p) in belief.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let row = &self.entries[from * N_STATES..(from + 1) * N_STATES];
            for (acc, q) in next.iter_mut().zip(row) {
                *acc += p * q;
            }
        }
        next
    }

    /// Dense CSV: a header row `h_t,0,1,...,255`, then one row per `H_t`
    /// with the state label followed by its 256 probabilities. Values use
    /// the shortest representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(N_STATES * N_STATES * 4);
        out.push_str("h_t");
        for h in 0..N_STATES {
            write!(out, ",{h}").unwrap();
        }
        out.push('\n');
        for h in HealthState::all() {
            write!(out, "{h}").unwrap();
            for p in self.row(h) {
                write!(out, ",{p}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, action: Action) -> Result<Self, TransitionError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| TransitionError::Csv { line: 1, message: "empty file".into() })?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() != N_STATES + 1 || cols[0] != "h_t" {
            return Err(TransitionError::Csv { line: 1, message: "expected header h_t,0,...,255".into() });
        }
        let mut entries = vec![f64::NAN; N_STATES * N_STATES];
        let mut seen = [false; N_STATES];
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let err = |message: String| TransitionError::Csv { line: line_no, message };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != N_STATES + 1 {
                return Err(err(format!("expected {} columns, found {}", N_STATES + 1, fields.len())));
            }
            let from: u8 = fields[0].trim().parse().map_err(|_| err(format!("bad state label `{}`", fields[0])))?;
            if std::mem::replace(&mut seen[from as usize], true) {
                return Err(err(format!("state {from} listed twice")));
            }
            for (to, f) in fields[1..].iter().enumerate() {
                entries[from as usize * N_STATES + to] =
                    f.trim().parse().map_err(|_| err(format!("bad probability `{f}`")))?;
            }
            rows += 1;
        }
        if rows != N_STATES {
            return Err(TransitionError::Csv { line: rows + 1, message: format!("expected {N_STATES} rows, found {rows}") });
        }
        Self::new(action, entries)
    }
}

/// Maintenance returns the structure to the undamaged state from anywhere.
pub fn maintenance_matrix() -> TransitionMatrix {
    let mut entries = vec![0.0; N_STATES * N_STATES];
    for h in 0..N_STATES {
        entries[h * N_STATES] = 1.0;
    }
    TransitionMatrix { action: Action::Maintain, entries }
}
