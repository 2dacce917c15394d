use std::collections::{BTreeSet, HashMap};

use super::DistError;
use crate::graph::Dag;

/// Largest dense table (number of joint assignments) we are willing to build.
pub const MAX_ENTRIES: usize = 1 << 20;

/// Tolerance accepted on input normalization; tables are renormalized after
/// the check so the stored entries sum to 1 up to rounding.
pub const INPUT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

/// Exact discrete joint distribution over named finite variables.
///
/// Entries are stored row-major: the first variable is the most significant
/// digit of the assignment index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<Variable>,
    probs: Vec<f64>,
}

pub(crate) fn checked_size(cards: impl IntoIterator<Item = usize>) -> Result<usize, DistError> {
    let mut size = 1usize;
    for c in cards {
        size = size.checked_mul(c).filter(|&s| s <= MAX_ENTRIES).ok_or(DistError::TooLarge)?;
    }
    Ok(size)
}

pub(crate) fn normalize_checked(values: &mut [f64]) -> Result<(), DistError> {
    if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(DistError::InvalidProbability(bad));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > INPUT_SUM_TOL {
        return Err(DistError::NotNormalized(sum));
    }
    values.iter_mut().for_each(|v| *v /= sum);
    Ok(())
}

/// Advances a mixed-radix odometer (last digit fastest); false on wrap-around.
pub(crate) fn advance(digits: &mut [usize], cards: &[usize]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < cards[k] {
            return true;
        }
        digits[k] = 0;
    }
    false
}

impl JointTable {
    pub fn new(vars: Vec<Variable>, mut probs: Vec<f64>) -> Result<Self, DistError> {
        let mut names = BTreeSet::new();
        for v in &vars {
            if !names.insert(v.name.as_str()) {
                return Err(DistError::DuplicateVariable(v.name.clone()));
            }
            if v.cardinality == 0 {
                return Err(DistError::ZeroCardinality(v.name.clone()));
            }
        }
        let size = checked_size(vars.iter().map(|v| v.cardinality))?;
        if probs.len() != size {
            return Err(DistError::ShapeMismatch {
                expected: size,
                found: probs.len(),
            });
        }
        normalize_checked(&mut probs)?;
        Ok(Self { vars, probs })
    }

    /// Builds a table by evaluating `f` on every assignment.
    pub fn from_fn(
        vars: Vec<Variable>,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self, DistError> {
        let cards: Vec<usize> = vars.iter().map(|v| v.cardinality).collect();
        let size = checked_size(cards.iter().copied())?;
        let mut probs = Vec::with_capacity(size);
        let mut digits = vec![0; cards.len()];
        loop {
            probs.push(f(&digits));
            if !advance(&mut digits, &cards) {
                break;
            }
        }
        Self::new(vars, probs)
    }

    pub fn uniform(vars: Vec<Variable>) -> Result<Self, DistError> {
        let size = checked_size(vars.iter().map(|v| v.cardinality))?;
        Self::new(vars, vec![1.0 / size as f64; size])
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.cardinality).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DistError> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| DistError::UnknownVariable(name.to_string()))
    }

    pub fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, DistError> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    pub fn prob(&self, assignment: &[usize]) -> f64 {
        let idx = assignment
            .iter()
            .zip(&self.vars)
            .fold(0, |acc, (&a, v)| acc * v.cardinality + a);
        self.probs[idx]
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Marginal over the variables at `keep`, laid out row-major in that order.
    pub fn marginal(&self, keep: &[usize]) -> Vec<f64> {
        let cards = self.cardinalities();
        let mut pstride = vec![0usize; cards.len()];
        let mut size = 1;
        for &v in keep.iter().rev() {
            pstride[v] = size;
            size *= cards[v];
        }
        let mut out = vec![0.0; size];
        let mut digits = vec![0usize; cards.len()];
        let mut pi = 0usize;
        for &p in &self.probs {
            out[pi] += p;
            for k in (0..cards.len()).rev() {
                digits[k] += 1;
                pi += pstride[k];
                if digits[k] < cards[k] {
                    break;
                }
                pi -= pstride[k] * cards[k];
                digits[k] = 0;
            }
        }
        out
    }

    /// Largest entrywise difference to `other`, matching variables by name.
    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64, DistError> {
        let perm = other.indices(&self.vars.iter().map(|v| &v.name).collect::<Vec<_>>())?;
        if other.vars.len() != self.vars.len()
            || perm
                .iter()
                .zip(&self.vars)
                .any(|(&j, v)| other.vars[j].cardinality != v.cardinality)
        {
            return Err(DistError::VariableMismatch(
                "tables range over different variables".into(),
            ));
        }
        let cards = self.cardinalities();
        let mut digits = vec![0; cards.len()];
        let mut other_digits = vec![0; cards.len()];
        let mut worst = 0.0f64;
        for &p in &self.probs {
            for (k, &j) in perm.iter().enumerate() {
                other_digits[j] = digits[k];
            }
            worst = worst.max((p - other.prob(&other_digits)).abs());
            advance(&mut digits, &cards);
        }
        Ok(worst)
    }

    /// Checks that this table ranges over exactly the nodes of `g` (names and cardinalities).
    pub fn check_matches(&self, g: &Dag) -> Result<(), DistError> {
        if self.vars.len() != g.len() {
            return Err(DistError::VariableMismatch(format!(
                "distribution has {} variables, graph has {} nodes",
                self.vars.len(),
                g.len()
            )));
        }
        for node in g.nodes() {
            let i = self.index_of(&node.name).map_err(|_| {
                DistError::VariableMismatch(format!("graph node `{}` missing from distribution", node.name))
            })?;
            if self.vars[i].cardinality != node.cardinality {
                return Err(DistError::VariableMismatch(format!(
                    "`{}` has cardinality {} in the distribution but {} in the graph",
                    node.name, self.vars[i].cardinality, node.cardinality
                )));
            }
        }
        Ok(())
    }

    /// Serializes to the distribution file format, listing nonzero entries only.
    pub fn to_text(&self) -> String {
        let header: Vec<String> = self
            .vars
            .iter()
            .map(|v| format!("{}:{}", v.name, v.cardinality))
            .collect();
        let mut out = format!("vars {}\n", header.join(" "));
        let cards = self.cardinalities();
        let mut digits = vec![0; cards.len()];
        for &p in &self.probs {
            if p != 0.0 {
                let a: Vec<String> = digits.iter().map(usize::to_string).collect();
                out.push_str(&format!("{} {p}\n", a.join(" ")));
            }
            advance(&mut digits, &cards);
        }
        out
    }
}

/// Parses the distribution file format:
///
/// ```text
/// vars P:2 Q:2
/// 0 0 0.5
/// 1 1 0.5
/// ```
///
/// Omitted assignments are zero; `#` starts a comment.
pub fn parse_distribution(text: &str) -> Result<JointTable, DistError> {
    let mut vars: Option<Vec<Variable>> = None;
    let mut probs = Vec::new();
    let mut seen = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let syntax = |message: String| DistError::Syntax {
            line: line_no,
            message,
        };
        match &vars {
            None => {
                if tokens[0] != "vars" {
                    return Err(syntax("expected header `vars <name:cardinality> ...`".into()));
                }
                let mut list = Vec::new();
                for tok in &tokens[1..] {
                    let (name, card) = tok
                        .split_once(':')
                        .ok_or_else(|| syntax(format!("expected `name:cardinality`, got `{tok}`")))?;
                    let card: usize = card
                        .parse()
                        .map_err(|_| syntax(format!("invalid cardinality in `{tok}`")))?;
                    list.push(Variable {
                        name: name.to_string(),
                        cardinality: card,
                    });
                }
                let size = checked_size(list.iter().map(|v| v.cardinality))
                    .map_err(|e| syntax(e.to_string()))?;
                probs = vec![0.0; size];
                vars = Some(list);
            }
            Some(list) => {
                if tokens.len() != list.len() + 1 {
                    return Err(syntax(format!(
                        "expected {} values and a probability",
                        list.len()
                    )));
                }
                let mut idx = 0;
                for (tok, v) in tokens.iter().zip(list) {
                    let a: usize = tok
                        .parse()
                        .ok()
                        .filter(|&a| a < v.cardinality)
                        .ok_or_else(|| syntax(format!("invalid value `{tok}` for `{}`", v.name)))?;
                    idx = idx * v.cardinality + a;
                }
                let p: f64 = tokens[list.len()]
                    .parse()
                    .ok()
                    .filter(|p: &f64| p.is_finite() && *p >= 0.0)
                    .ok_or_else(|| syntax(format!("invalid probability `{}`", tokens[list.len()])))?;
                if let Some(prev) = seen.insert(idx, line_no) {
                    return Err(syntax(format!("assignment repeats line {prev}")));
                }
                probs[idx] = p;
            }
        }
    }
    let vars = vars.ok_or(DistError::Syntax {
        line: 0,
        message: "missing `vars` header".into(),
    })?;
    JointTable::new(vars, probs)
}

/// `P(child | parents)`, one probability simplex per parent assignment.
///
/// `entries[parent_index * child_cardinality + child_value]`, with the parent
/// index row-major over `parents` in order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    pub child: Variable,
    pub parents: Vec<Variable>,
    pub entries: Vec<f64>,
}

impl ConditionalTable {
    pub fn new(child: Variable, parents: Vec<Variable>, mut entries: Vec<f64>) -> Result<Self, DistError> {
        let contexts = checked_size(parents.iter().map(|v| v.cardinality))?;
        let expected = contexts * child.cardinality;
        if entries.len() != expected {
            return Err(DistError::ShapeMismatch {
                expected,
                found: entries.len(),
            });
        }
        for slice in entries.chunks_mut(child.cardinality) {
            normalize_checked(slice)?;
        }
        Ok(Self {
            child,
            parents,
            entries,
        })
    }

    /// A table with no parents.
    pub fn root(child: Variable, entries: Vec<f64>) -> Result<Self, DistError> {
        Self::new(child, Vec::new(), entries)
    }

    pub fn contexts(&self) -> usize {
        self.entries.len() / self.child.cardinality
    }

    /// The simplex for one parent assignment.
    pub fn slice(&self, parent_assignment: &[usize]) -> &[f64] {
        let ctx = parent_assignment
            .iter()
            .zip(&self.parents)
            .fold(0, |acc, (&a, v)| acc * v.cardinality + a);
        let k = self.child.cardinality;
        &self.entries[ctx * k..(ctx + 1) * k]
    }

    /// Whether every slice equals the first one within `tol` (the child
    /// ignores its conditioning context).
    pub fn is_context_free(&self, tol: f64) -> bool {
        let k = self.child.cardinality;
        let first = &self.entries[..k];
        self.entries
            .chunks(k)
            .all(|s| s.iter().zip(first).all(|(a, b)| (a - b).abs() <= tol))
    }
}

/// Multiplies conditionals into a joint over `vars`.
///
/// Every table's child and parents must name variables of `vars` with
/// matching cardinality; the caller is responsible for the tables forming a
/// valid factorization.
pub(crate) fn multiply(vars: Vec<Variable>, tables: &[ConditionalTable]) -> Result<JointTable, DistError> {
    let pos = |name: &str| {
        vars.iter()
            .position(|v| v.name == name)
            .ok_or_else(|| DistError::UnknownVariable(name.to_string()))
    };
    let mut plan = Vec::with_capacity(tables.len());
    for t in tables {
        let child = pos(&t.child.name)?;
        let parents = t
            .parents
            .iter()
            .map(|p| pos(&p.name))
            .collect::<Result<Vec<_>, _>>()?;
        plan.push((child, parents, t));
    }
    JointTable::from_fn(vars.clone(), |a| {
        plan.iter()
            .map(|(child, parents, t)| {
                let ctx = parents
                    .iter()
                    .zip(&t.parents)
                    .fold(0, |acc, (&p, v)| acc * v.cardinality + a[p]);
                t.entries[ctx * t.child.cardinality + a[*child]]
            })
            .product()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, c: usize) -> Variable {
        Variable {
            name: name.into(),
            cardinality: c,
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            JointTable::new(vec![var("P", 2)], vec![0.5, 0.4]),
            Err(DistError::NotNormalized(_))
        ));
        assert!(matches!(
            JointTable::new(vec![var("P", 2)], vec![1.5, -0.5]),
            Err(DistError::InvalidProbability(_))
        ));
        assert!(matches!(
            JointTable::new(vec![var("P", 2)], vec![1.0]),
            Err(DistError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            JointTable::new(vec![var("P", 2), var("P", 2)], vec![0.25; 4]),
            Err(DistError::DuplicateVariable(_))
        ));
        let big: Vec<Variable> = (0..21).map(|i| var(&format!("V{i}"), 2)).collect();
        assert!(matches!(JointTable::uniform(big), Err(DistError::TooLarge)));
    }

    #[test]
    fn marginal_layout_follows_keep_order() {
        let t = JointTable::new(vec![var("P", 2), var("Q", 3)], vec![0.1, 0.2, 0.0, 0.3, 0.15, 0.25])
            .unwrap();
        let q = t.marginal(&[1]);
        assert!((q[0] - 0.4).abs() < 1e-15 && (q[1] - 0.35).abs() < 1e-15);
        let qp = t.marginal(&[1, 0]);
        assert_eq!(qp.len(), 6);
        assert!((qp[1] - 0.3).abs() < 1e-15);
        assert!((t.marginal(&[])[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn file_round_trip() {
        let text = "# copy pair\nvars P:2 Q:2\n0 0 0.5\n1 1 0.5\n";
        let t = parse_distribution(text).unwrap();
        assert_eq!(t.probs(), &[0.5, 0.0, 0.0, 0.5]);
        let again = parse_distribution(&t.to_text()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn file_errors() {
        assert!(matches!(
            parse_distribution("vars P:2\n0 0.5\n"),
            Err(DistError::NotNormalized(_))
        ));
        assert!(matches!(
            parse_distribution("vars P:2\n2 1.0\n"),
            Err(DistError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_distribution("vars P:2\n0 0.5\n0 0.5\n"),
            Err(DistError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_distribution("0 1.0\n"),
            Err(DistError::Syntax { line: 1, .. })
        ));
        assert!(parse_distribution("vars P:2\n0 0.5\n1 0.5000000001\n").is_ok());
    }

    #[test]
    fn conditional_slices() {
        let t = ConditionalTable::new(var("Q", 2), vec![var("P", 2)], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.slice(&[1]), &[0.0, 1.0]);
        assert!(!t.is_context_free(1e-12));
        assert!(matches!(
            ConditionalTable::new(var("Q", 2), vec![var("P", 2)], vec![1.0, 0.0, 0.5, 0.4]),
            Err(DistError::NotNormalized(_))
        ));
    }
}
