use std::fmt;

use super::PgmError;

/// A discrete random variable. States are indexed `0..cardinality`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: String,
    cardinality: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Self {
        Self { name: name.into(), cardinality }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::new(name, 2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.cardinality)
    }
}

/// A non-negative table over an ordered scope of variables.
///
/// Values are laid out row-major: the first scope variable varies slowest
/// and the last varies fastest. A factor with an empty scope holds a
/// single scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<Variable>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<Variable>, values: Vec<f64>) -> Result<Self, PgmError> {
        for (i, v) in scope.iter().enumerate() {
            if v.cardinality == 0 {
                return Err(PgmError::Structure(format!("variable `{}` has zero states", v.name)));
            }
            if scope[..i].iter().any(|w| w.name == v.name) {
                return Err(PgmError::Structure(format!(
                    "variable `{}` appears twice in a factor scope",
                    v.name
                )));
            }
        }
        let expected: usize = scope.iter().map(|v| v.cardinality).product();
        if values.len() != expected {
            return Err(PgmError::Structure(format!(
                "factor table has {} entries, scope requires {}",
                values.len(),
                expected
            )));
        }
        if let Some(bad) = values.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(PgmError::Structure(format!("factor entry {bad} is not a finite non-negative number")));
        }
        Ok(Self { scope, values })
    }

    pub fn scalar(value: f64) -> Self {
        Self { scope: Vec::new(), values: vec![value] }
    }

    pub fn scope(&self) -> &[Variable] {
        &self.scope
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.scope.iter().position(|v| v.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Row-major strides of the scope.
    fn strides(&self) -> Vec<usize> {
        strides_of(&self.scope)
    }

    /// Entry at a full assignment given in scope order.
    pub fn get(&self, assignment: &[usize]) -> f64 {
        debug_assert_eq!(assignment.len(), self.scope.len());
        let idx = assignment
            .iter()
            .zip(self.strides())
            .map(|(s, st)| s * st)
            .sum::<usize>();
        self.values[idx]
    }

    /// Pointwise product; the result scope is `self`'s scope followed by the
    /// variables of `other` not already present.
    pub fn product(&self, other: &Factor) -> Result<Factor, PgmError> {
        let mut scope = self.scope.clone();
        for v in &other.scope {
            match self.scope.iter().find(|w| w.name == v.name) {
                Some(w) if w.cardinality != v.cardinality => {
                    return Err(PgmError::CardinalityMismatch {
                        variable: v.name.clone(),
                        left: w.cardinality,
                        right: v.cardinality,
                    })
                }
                Some(_) => {}
                None => scope.push(v.clone()),
            }
        }

        let left = embed_strides(&self.scope, &scope);
        let right = embed_strides(&other.scope, &scope);
        let cards: Vec<usize> = scope.iter().map(|v| v.cardinality).collect();
        let total: usize = cards.iter().product();

        let mut values = Vec::with_capacity(total);
        let mut counter = vec![0usize; scope.len()];
        let (mut li, mut ri) = (0usize, 0usize);
        for _ in 0..total {
            values.push(self.values[li] * other.values[ri]);
            // odometer increment, last variable fastest
            for d in (0..counter.len()).rev() {
                counter[d] += 1;
                li += left[d];
                ri += right[d];
                if counter[d] < cards[d] {
                    break;
                }
                li -= left[d] * cards[d];
                ri -= right[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor { scope, values })
    }

    /// Sums `name` out of the factor.
    pub fn marginalize(&self, name: &str) -> Result<Factor, PgmError> {
        let pos = self
            .position(name)
            .ok_or_else(|| PgmError::NotInScope(name.to_string()))?;
        let card = self.scope[pos].cardinality;
        let inner: usize = self.scope[pos + 1..].iter().map(|v| v.cardinality).product();
        let outer: usize = self.scope[..pos].iter().map(|v| v.cardinality).product();

        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                let out = &mut values[o * inner..(o + 1) * inner];
                for (acc, x) in out.iter_mut().zip(&self.values[base..base + inner]) {
                    *acc += x;
                }
            }
        }
        let mut scope = self.scope.clone();
        scope.remove(pos);
        Ok(Factor { scope, values })
    }

    /// Sums out every variable in `names`, in the order given.
    pub fn marginalize_all<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Factor, PgmError> {
        let mut f = self.clone();
        for n in names {
            f = f.marginalize(n)?;
        }
        Ok(f)
    }

    /// Slices the table at observed states. Evidence on variables outside
    /// the scope is ignored; values are not renormalised.
    pub fn reduce(&self, evidence: &[(&str, usize)]) -> Result<Factor, PgmError> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.scope.len()];
        for &(name, state) in evidence {
            if let Some(pos) = self.position(name) {
                let card = self.scope[pos].cardinality;
                if state >= card {
                    return Err(PgmError::StateOutOfRange {
                        variable: name.to_string(),
                        state,
                        cardinality: card,
                    });
                }
                fixed[pos] = Some(state);
            }
        }
        if fixed.iter().all(Option::is_none) {
            return Ok(self.clone());
        }

        let strides = self.strides();
        let offset: usize = fixed
            .iter()
            .zip(&strides)
            .filter_map(|(f, st)| f.map(|s| s * st))
            .sum();
        let kept: Vec<usize> = (0..self.scope.len()).filter(|&i| fixed[i].is_none()).collect();
        let scope: Vec<Variable> = kept.iter().map(|&i| self.scope[i].clone()).collect();
        let cards: Vec<usize> = scope.iter().map(|v| v.cardinality).collect();
        let kept_strides: Vec<usize> = kept.iter().map(|&i| strides[i]).collect();
        let total: usize = cards.iter().product();

        let mut values = Vec::with_capacity(total);
        let mut counter = vec![0usize; kept.len()];
        let mut idx = offset;
        for _ in 0..total {
            values.push(self.values[idx]);
            for d in (0..counter.len()).rev() {
                counter[d] += 1;
                idx += kept_strides[d];
                if counter[d] < cards[d] {
                    break;
                }
                idx -= kept_strides[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor { scope, values })
    }

    /// Reorders the table to the given scope order (a permutation of the
    /// current scope).
    pub fn permute(&self, order: &[&str]) -> Result<Factor, PgmError> {
        if order.len() != self.scope.len() {
            return Err(PgmError::Structure(format!(
                "permutation has {} variables, factor has {}",
                order.len(),
                self.scope.len()
            )));
        }
        let mut scope = Vec::with_capacity(order.len());
        for name in order {
            let pos = self
                .position(name)
                .ok_or_else(|| PgmError::NotInScope(name.to_string()))?;
            scope.push(self.scope[pos].clone());
        }
        if scope.iter().enumerate().any(|(i, v)| scope[..i].iter().any(|w| w.name == v.name)) {
            return Err(PgmError::Structure("permutation repeats a variable".into()));
        }
        // walk the target layout, reading source entries through their strides
        let read = embed_strides(&self.scope, &scope);
        let cards: Vec<usize> = scope.iter().map(|v| v.cardinality).collect();
        let mut values = Vec::with_capacity(self.values.len());
        let mut counter = vec![0usize; cards.len()];
        let mut idx = 0usize;
        for _ in 0..self.values.len() {
            values.push(self.values[idx]);
            for d in (0..counter.len()).rev() {
                counter[d] += 1;
                idx += read[d];
                if counter[d] < cards[d] {
                    break;
                }
                idx -= read[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor { scope, values })
    }

    /// Returns a copy scaled to sum to one, or `None` if the total mass is zero.
    pub fn normalized(&self) -> Option<Factor> {
        let z = self.sum();
        if z > 0.0 && z.is_finite() {
            Some(Factor {
                scope: self.scope.clone(),
                values: self.values.iter().map(|x| x / z).collect(),
            })
        } else {
            None
        }
    }
}

pub(crate) fn strides_of(scope: &[Variable]) -> Vec<usize> {
    let mut strides = vec![1usize; scope.len()];
    for i in (0..scope.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * scope[i + 1].cardinality;
    }
    strides
}

/// Strides of `sub` expressed over the dimensions of `full`; zero for
/// dimensions `sub` does not contain.
fn embed_strides(sub: &[Variable], full: &[Variable]) -> Vec<usize> {
    let own = strides_of(sub);
    full.iter()
        .map(|v| sub.iter().position(|w| w.name == v.name).map_or(0, |i| own[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Variable {
        Variable::binary("A")
    }
    fn b() -> Variable {
        Variable::binary("B")
    }

    #[test]
    fn independent_product() {
        let f = Factor::new(vec![a()], vec![0.3, 0.7]).unwrap();
        let g = Factor::new(vec![b()], vec![0.5, 0.5]).unwrap();
        let h = f.product(&g).unwrap();
        assert_eq!(h.scope(), &[a(), b()]);
        assert_eq!(h.values(), &[0.15, 0.15, 0.35, 0.35]);
    }

    #[test]
    fn shared_scope_product_is_elementwise() {
        let f = Factor::new(vec![a()], vec![0.2, 0.8]).unwrap();
        let g = Factor::new(vec![a()], vec![0.5, 0.5]).unwrap();
        assert_eq!(f.product(&g).unwrap().values(), &[0.1, 0.4]);
    }

    #[test]
    fn product_rejects_cardinality_mismatch() {
        let f = Factor::new(vec![a()], vec![0.2, 0.8]).unwrap();
        let g = Factor::new(vec![Variable::new("A", 3)], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(f.product(&g), Err(PgmError::CardinalityMismatch { .. })));
    }

    #[test]
    fn marginalize_recovers_factor() {
        let h = Factor::new(vec![a(), b()], vec![0.15, 0.15, 0.35, 0.35]).unwrap();
        let m = h.marginalize("B").unwrap();
        assert_eq!(m.scope(), &[a()]);
        assert!((m.values()[0] - 0.3).abs() < 1e-15);
        assert!((m.values()[1] - 0.7).abs() < 1e-15);
        let total = h.marginalize_all(["A", "B"]).unwrap();
        assert!(total.scope().is_empty());
        assert!((total.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn marginalize_missing_variable_errors() {
        let f = Factor::new(vec![a()], vec![0.5, 0.5]).unwrap();
        assert!(matches!(f.marginalize("Z"), Err(PgmError::NotInScope(_))));
    }

    #[test]
    fn reduce_slices_column() {
        let f = Factor::new(vec![a(), b()], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let r = f.reduce(&[("B", 0)]).unwrap();
        assert_eq!(r.scope(), &[a()]);
        assert_eq!(r.values(), &[0.1, 0.3]);
        assert_eq!(f.reduce(&[]).unwrap(), f);
        assert!(matches!(
            f.reduce(&[("A", 2)]),
            Err(PgmError::StateOutOfRange { .. })
        ));
    }

    #[test]
    fn permute_transposes() {
        let f = Factor::new(vec![a(), Variable::new("C", 3)], vec![1., 2., 3., 4., 5., 6.]).unwrap();
        let p = f.permute(&["C", "A"]).unwrap();
        assert_eq!(p.values(), &[1., 4., 2., 5., 3., 6.]);
        assert_eq!(p.permute(&["A", "C"]).unwrap(), f);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Factor::new(vec![a()], vec![0.5]).is_err());
        assert!(Factor::new(vec![a()], vec![-0.5, 1.5]).is_err());
        assert!(Factor::new(vec![a(), a()], vec![0.25; 4]).is_err());
    }
}
