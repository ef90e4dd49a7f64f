//! Exact inference by variable elimination.
//!
//! The elimination order is chosen greedily: at each step the variable with
//! the fewest neighbours in the current interaction graph is summed out,
//! ties broken by the lexicographically smallest name. The order therefore
//! depends only on the network and query, which makes results
//! bit-reproducible.

use std::collections::BTreeSet;

use super::{DiscreteNetwork, Factor, PgmError};

/// Computes the normalised conditional `P(query | evidence)`.
///
/// The returned factor's scope follows the order of `query`.
pub fn infer(
    net: &DiscreteNetwork,
    query: &[&str],
    evidence: &[(&str, usize)],
) -> Result<Factor, PgmError> {
    for (i, q) in query.iter().enumerate() {
        net.variable(q)?;
        if query[..i].contains(q) {
            return Err(PgmError::Structure(format!("query variable `{q}` repeated")));
        }
        if evidence.iter().any(|(e, _)| e == q) {
            return Err(PgmError::QueryEvidenceOverlap(q.to_string()));
        }
    }
    for (i, &(name, state)) in evidence.iter().enumerate() {
        let v = net.variable(name)?;
        if state >= v.cardinality() {
            return Err(PgmError::StateOutOfRange {
                variable: name.to_string(),
                state,
                cardinality: v.cardinality(),
            });
        }
        if evidence[..i].iter().any(|(e, s)| *e == name && *s != state) {
            return Err(PgmError::Structure(format!("conflicting evidence on `{name}`")));
        }
    }

    let mut factors: Vec<Factor> = net
        .cpds()
        .iter()
        .map(|f| f.reduce(evidence))
        .collect::<Result<_, _>>()?;

    let mut hidden: BTreeSet<&str> = net
        .variables()
        .iter()
        .map(|v| v.name())
        .filter(|n| !query.contains(n) && !evidence.iter().any(|(e, _)| e == n))
        .collect();

    while let Some(next) = pick_min_degree(&factors, &hidden) {
        hidden.remove(next);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.contains(next));
        factors = rest;
        let mut combined = Factor::scalar(1.0);
        for f in &touching {
            combined = combined.product(f)?;
        }
        factors.push(combined.marginalize(next)?);
    }

    let mut result = Factor::scalar(1.0);
    for f in &factors {
        result = result.product(f)?;
    }
    let result = result.permute(query)?;
    result.normalized().ok_or(PgmError::InconsistentEvidence)
}

/// Marginal `P(name = state | evidence)` for a single variable.
pub fn probability(
    net: &DiscreteNetwork,
    name: &str,
    state: usize,
    evidence: &[(&str, usize)],
) -> Result<f64, PgmError> {
    let f = infer(net, &[name], evidence)?;
    f.values().get(state).copied().ok_or_else(|| PgmError::StateOutOfRange {
        variable: name.to_string(),
        state,
        cardinality: f.len(),
    })
}

fn pick_min_degree<'a>(factors: &[Factor], hidden: &BTreeSet<&'a str>) -> Option<&'a str> {
    // BTreeSet iterates in lexicographic order, so the first strict minimum
    // is also the tie-break winner.
    let mut best: Option<(&'a str, usize)> = None;
    for &name in hidden {
        let mut neighbours: BTreeSet<&str> = BTreeSet::new();
        for f in factors.iter().filter(|f| f.contains(name)) {
            neighbours.extend(f.scope().iter().map(|v| v.name()).filter(|n| *n != name));
        }
        let degree = neighbours.len();
        if best.is_none_or(|(_, d)| degree < d) {
            best = Some((name, degree));
        }
    }
    best.map(|(n, _)| n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgm::Variable;

    fn chain() -> DiscreteNetwork {
        let mut net = DiscreteNetwork::new();
        net.add(Variable::binary("A"), &[], vec![0.6, 0.4]).unwrap();
        net.add(Variable::binary("B"), &["A"], vec![0.9, 0.1, 0.1, 0.9]).unwrap();
        net
    }

    #[test]
    fn chain_marginal() {
        let p = probability(&chain(), "B", 1, &[]).unwrap();
        assert!((p - 0.42).abs() < 1e-15);
    }

    #[test]
    fn chain_posterior() {
        // P(A=1 | B=1) = 0.36 / 0.42
        let p = probability(&chain(), "A", 1, &[("B", 1)]).unwrap();
        assert!((p - 0.36 / 0.42).abs() < 1e-15);
    }

    #[test]
    fn impossible_evidence_is_an_error() {
        let mut net = DiscreteNetwork::new();
        net.add(Variable::binary("A"), &[], vec![1.0, 0.0]).unwrap();
        net.add(Variable::binary("B"), &["A"], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            infer(&net, &["A"], &[("B", 1)]),
            Err(PgmError::InconsistentEvidence)
        ));
    }

    #[test]
    fn query_order_is_respected() {
        let net = chain();
        let ab = infer(&net, &["A", "B"], &[]).unwrap();
        let ba = infer(&net, &["B", "A"], &[]).unwrap();
        assert_eq!(ab.permute(&["B", "A"]).unwrap(), ba);
        assert_eq!(ab, net.joint_bruteforce().unwrap());
    }

    #[test]
    fn rejects_overlap_and_bad_states() {
        let net = chain();
        assert!(matches!(
            infer(&net, &["A"], &[("A", 0)]),
            Err(PgmError::QueryEvidenceOverlap(_))
        ));
        assert!(matches!(
            infer(&net, &["A"], &[("B", 2)]),
            Err(PgmError::StateOutOfRange { .. })
        ));
        assert!(matches!(infer(&net, &["Z"], &[]), Err(PgmError::UnknownVariable(_))));
    }
}
