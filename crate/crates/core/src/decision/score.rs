use serde::{Deserialize, Serialize};

use super::{Action, DecisionError, Strategy};

/// 2x2 confusion of decided actions against perfect-information actions.
/// `counts[oracle][decided]`, indexed by [`Action::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionConfusion {
    pub counts: [[usize; 2]; 2],
}

impl ActionConfusion {
    pub fn record(&mut self, oracle: Action, decided: Action) {
        self.counts[oracle.index()][decided.index()] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    /// Maintenance chosen where doing nothing was optimal.
    pub fn type_one(&self) -> usize {
        self.counts[Action::DoNothing.index()][Action::Maintain.index()]
    }

    /// Nothing done where maintenance was optimal.
    pub fn type_two(&self) -> usize {
        self.counts[Action::Maintain.index()][Action::DoNothing.index()]
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => f64::NAN,
            n => self.correct() as f64 / n as f64,
        }
    }

    pub fn merged(&self, other: &ActionConfusion) -> ActionConfusion {
        let mut counts = self.counts;
        for (row, other_row) in counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
        ActionConfusion { counts }
    }
}

/// Decision accuracy for both slices and overall.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionScore {
    pub first: ActionConfusion,
    pub second: ActionConfusion,
    pub overall: ActionConfusion,
}

/// Scores decided strategies against perfect-information strategies.
pub fn decision_accuracy(decided: &[Strategy], oracle: &[Strategy]) -> Result<DecisionScore, DecisionError> {
    if decided.len() != oracle.len() {
        return Err(DecisionError::LengthMismatch { decided: decided.len(), oracle: oracle.len() });
    }
    let mut score = DecisionScore::default();
    for (d, o) in decided.iter().zip(oracle) {
        score.first.record(o.first, d.first);
        score.second.record(o.second, d.second);
    }
    score.overall = score.first.merged(&score.second);
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::*;

    #[test]
    fn perfect_agreement() {
        let s = vec![Strategy::new(DoNothing, DoNothing), Strategy::new(Maintain, DoNothing)];
        let score = decision_accuracy(&s, &s).unwrap();
        assert_eq!(score.overall.accuracy(), 1.0);
        assert_eq!(score.overall.type_one() + score.overall.type_two(), 0);
        assert_eq!(score.overall.total(), 4);
    }

    #[test]
    fn all_wrong_is_type_one() {
        let decided = vec![Strategy::new(Maintain, Maintain); 3];
        let oracle = vec![Strategy::new(DoNothing, DoNothing); 3];
        let score = decision_accuracy(&decided, &oracle).unwrap();
        assert_eq!(score.overall.accuracy(), 0.0);
        assert_eq!(score.overall.type_one(), 6);
        assert_eq!(score.overall.counts[0][1], 6);
    }

    #[test]
    fn overall_is_sum_of_slices() {
        let decided = vec![
            Strategy::new(Maintain, DoNothing),
            Strategy::new(DoNothing, DoNothing),
            Strategy::new(DoNothing, Maintain),
        ];
        let oracle = vec![
            Strategy::new(DoNothing, DoNothing),
            Strategy::new(Maintain, DoNothing),
            Strategy::new(DoNothing, Maintain),
        ];
        let s = decision_accuracy(&decided, &oracle).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(s.overall.counts[i][j], s.first.counts[i][j] + s.second.counts[i][j]);
            }
        }
        assert_eq!(s.first.type_one(), 1);
        assert_eq!(s.first.type_two(), 1);
        assert_eq!(s.second.accuracy(), 1.0);
    }

    #[test]
    fn length_mismatch() {
        let s = vec![Strategy::new(DoNothing, DoNothing)];
        assert!(matches!(decision_accuracy(&s, &[]), Err(DecisionError::LengthMismatch { .. })));
    }
}
