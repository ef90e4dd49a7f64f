use std::collections::HashMap;

use super::{Factor, PgmError, Variable};

/// Tolerance for a CPD column summing to one.
pub const CPD_TOLERANCE: f64 = 1e-12;

/// Largest joint table [`DiscreteNetwork::joint_bruteforce`] will build.
pub const BRUTEFORCE_LIMIT: usize = 1 << 20;

/// A Bayesian network over discrete variables.
///
/// Variables are added in topological order: every parent must already be
/// present when a child is added, so the parent graph is acyclic by
/// construction. Each variable's CPD has scope `(parents..., variable)`.
#[derive(Clone, Debug, Default)]
pub struct DiscreteNetwork {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    cpds: Vec<Factor>,
    index: HashMap<String, usize>,
}

impl DiscreteNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `variable` with the given parents and CPD table, laid out with
    /// the parents slowest and the child fastest.
    pub fn add(
        &mut self,
        variable: Variable,
        parents: &[&str],
        table: Vec<f64>,
    ) -> Result<usize, PgmError> {
        if variable.cardinality() < 2 {
            return Err(PgmError::Structure(format!(
                "variable `{}` needs at least two states",
                variable.name()
            )));
        }
        if self.index.contains_key(variable.name()) {
            return Err(PgmError::DuplicateVariable(variable.name().to_string()));
        }
        let mut parent_ids = Vec::with_capacity(parents.len());
        for p in parents {
            let id = *self
                .index
                .get(*p)
                .ok_or_else(|| PgmError::UnknownVariable((*p).to_string()))?;
            if parent_ids.contains(&id) {
                return Err(PgmError::Structure(format!("parent `{p}` listed twice")));
            }
            parent_ids.push(id);
        }

        let mut scope: Vec<Variable> = parent_ids.iter().map(|&i| self.variables[i].clone()).collect();
        scope.push(variable.clone());
        let cpd = Factor::new(scope, table)?;
        check_cpd(&cpd)?;

        let id = self.variables.len();
        self.index.insert(variable.name().to_string(), id);
        self.variables.push(variable);
        self.parents.push(parent_ids);
        self.cpds.push(cpd);
        Ok(id)
    }

    /// Replaces the CPD table of an existing variable, keeping its parents.
    pub fn set_cpd(&mut self, name: &str, table: Vec<f64>) -> Result<(), PgmError> {
        let id = self.id(name)?;
        let cpd = Factor::new(self.cpds[id].scope().to_vec(), table)?;
        check_cpd(&cpd)?;
        self.cpds[id] = cpd;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Result<&Variable, PgmError> {
        Ok(&self.variables[self.id(name)?])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn parents(&self, name: &str) -> Result<Vec<&str>, PgmError> {
        let id = self.id(name)?;
        Ok(self.parents[id].iter().map(|&p| self.variables[p].name()).collect())
    }

    pub fn cpd(&self, name: &str) -> Result<&Factor, PgmError> {
        Ok(&self.cpds[self.id(name)?])
    }

    pub fn cpds(&self) -> &[Factor] {
        &self.cpds
    }

    fn id(&self, name: &str) -> Result<usize, PgmError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| PgmError::UnknownVariable(name.to_string()))
    }

    /// The full joint distribution as the product of every CPD, with scope
    /// in insertion order. Refuses tables above [`BRUTEFORCE_LIMIT`] entries.
    pub fn joint_bruteforce(&self) -> Result<Factor, PgmError> {
        let size = self
            .variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.cardinality()))
            .unwrap_or(usize::MAX);
        if size > BRUTEFORCE_LIMIT {
            return Err(PgmError::TooLarge { entries: size, limit: BRUTEFORCE_LIMIT });
        }
        let mut joint = Factor::scalar(1.0);
        for cpd in &self.cpds {
            joint = joint.product(cpd)?;
        }
        let order: Vec<&str> = self.variables.iter().map(Variable::name).collect();
        let joint = joint.permute(&order)?;
        joint.normalized().ok_or(PgmError::InconsistentEvidence)
    }
}

fn check_cpd(cpd: &Factor) -> Result<(), PgmError> {
    let child = cpd.scope().last().expect("cpd scope includes the child");
    let card = child.cardinality();
    for (row, chunk) in cpd.values().chunks(card).enumerate() {
        let s: f64 = chunk.iter().sum();
        if (s - 1.0).abs() > CPD_TOLERANCE {
            return Err(PgmError::InvalidCpd {
                variable: child.name().to_string(),
                reason: format!("parent configuration {row} sums to {s}"),
            });
        }
    }
    Ok(())
}
