//! Chain-rule and DAG factorizations.

use std::collections::BTreeSet;

use super::table::{multiply, ConditionalTable, JointTable, Variable};
use super::DistError;
use crate::graph::Dag;

fn node_var(g: &Dag, v: usize) -> Variable {
    Variable {
        name: g.name(v).to_string(),
        cardinality: g.cardinality(v),
    }
}

/// `P(x_1..x_n) = Π_j P(x_j | pa_j)` over the nodes of `g`, in declaration order.
///
/// Exactly one table per node is required; each table's parents must be the
/// node's parents in `g` (any order) with matching cardinalities.
pub fn joint_from_tables(g: &Dag, cpts: &[ConditionalTable]) -> Result<JointTable, DistError> {
    let mut seen = BTreeSet::new();
    for t in cpts {
        let v = g
            .id(&t.child.name)
            .map_err(|_| DistError::ExtraTable(t.child.name.clone()))?;
        if !seen.insert(v) {
            return Err(DistError::ExtraTable(t.child.name.clone()));
        }
        if t.child.cardinality != g.cardinality(v) {
            return Err(DistError::CardinalityMismatch(t.child.name.clone()));
        }
        let mut listed = BTreeSet::new();
        for p in &t.parents {
            let pid = g
                .id(&p.name)
                .map_err(|_| DistError::ParentMismatch(t.child.name.clone()))?;
            if !listed.insert(pid) {
                return Err(DistError::ParentMismatch(t.child.name.clone()));
            }
            if p.cardinality != g.cardinality(pid) {
                return Err(DistError::CardinalityMismatch(p.name.clone()));
            }
        }
        if !listed.iter().eq(g.parent_ids(v).iter()) {
            return Err(DistError::ParentMismatch(t.child.name.clone()));
        }
    }
    if let Some(missing) = (0..g.len()).find(|v| !seen.contains(v)) {
        return Err(DistError::MissingTable(g.name(missing).to_string()));
    }
    let vars = (0..g.len()).map(|v| node_var(g, v)).collect();
    multiply(vars, cpts)
}

/// `P(child | given)` extracted from `p`; zero-probability contexts get the
/// uniform conditional.
fn conditional(p: &JointTable, child: usize, given: &[usize]) -> ConditionalTable {
    let vars = p.variables();
    let k = vars[child].cardinality;
    let mut keep = given.to_vec();
    keep.push(child);
    let mut entries = p.marginal(&keep);
    for slice in entries.chunks_mut(k) {
        let total: f64 = slice.iter().sum();
        if total > 0.0 {
            slice.iter_mut().for_each(|e| *e /= total);
        } else {
            slice.iter_mut().for_each(|e| *e = 1.0 / k as f64);
        }
    }
    ConditionalTable {
        child: vars[child].clone(),
        parents: given.iter().map(|&i| vars[i].clone()).collect(),
        entries,
    }
}

/// Chain-rule decomposition `P(x_1..x_n) = Π_j P(x_j | x_1..x_{j-1})` along `order`.
pub fn chain_factorize<S: AsRef<str>>(
    p: &JointTable,
    order: &[S],
) -> Result<Vec<ConditionalTable>, DistError> {
    let idx = p.indices(order).map_err(|_| DistError::NotPermutation)?;
    let distinct: BTreeSet<usize> = idx.iter().copied().collect();
    if idx.len() != p.variables().len() || distinct.len() != idx.len() {
        return Err(DistError::NotPermutation);
    }
    Ok((0..idx.len())
        .map(|j| conditional(p, idx[j], &idx[..j]))
        .collect())
}

/// Re-multiplies chain factors (or any valid factorization) over `p`'s variables.
pub fn multiply_chain(p: &JointTable, tables: &[ConditionalTable]) -> Result<JointTable, DistError> {
    multiply(p.variables().to_vec(), tables)
}

/// `P(v | pa(v))` for every node of `g`, read off `p`.
///
/// Multiplying these back reproduces `p` iff `p` factorizes over `g`.
pub fn conditionals_on_graph(p: &JointTable, g: &Dag) -> Result<Vec<ConditionalTable>, DistError> {
    p.check_matches(g)?;
    (0..g.len())
        .map(|v| {
            let child = p.index_of(g.name(v))?;
            let parents = g
                .parent_ids(v)
                .iter()
                .map(|&u| p.index_of(g.name(u)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(conditional(p, child, &parents))
        })
        .collect()
}
