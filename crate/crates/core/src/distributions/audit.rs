//! Graph-relative audits: local Markov property, Causal Completeness and
//! the common-cause principle.

use std::fmt;

use super::ci::ci_holds;
use super::table::JointTable;
use super::DistError;
use crate::graph::{CondQuery, Dag, NodeId, NodeSet};
use crate::report::{AuditCheck, AuditReport};

fn query_for(g: &Dag, v: NodeId, others: &NodeSet, given: &NodeSet) -> CondQuery {
    CondQuery {
        x: vec![g.name(v).to_string()],
        y: g.names(others),
        z: g.names(given),
    }
}

/// One check per node: `(v ⫫ rest(v) | cond(v))`, skipped (trivially true)
/// when `rest(v)` is empty.
fn per_node_audit(
    p: &JointTable,
    g: &Dag,
    eps: f64,
    title: &str,
    split: impl Fn(NodeId) -> (NodeSet, NodeSet),
) -> Result<AuditReport, DistError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(DistError::InvalidEpsilon(eps));
    }
    p.check_matches(g)?;
    let mut report = AuditReport::new(title);
    for v in 0..g.len() {
        let (given, rest) = split(v);
        let q = query_for(g, v, &rest, &given);
        if rest.is_empty() {
            report.push(AuditCheck::new(q.to_string(), true, 0.0).with_note("vacuous"));
            continue;
        }
        let r = ci_holds(p, &q, eps)?;
        report.push(AuditCheck::new(q.to_string(), r.holds, r.max_violation).with_witness(r.witness_string()));
    }
    Ok(report)
}

fn markov_split(g: &Dag, v: NodeId) -> (NodeSet, NodeSet) {
    let parents: NodeSet = g.parent_ids(v).iter().copied().collect();
    let rest = g
        .non_descendant_ids(v)
        .difference(&parents)
        .copied()
        .collect();
    (parents, rest)
}

/// Whether `p` is compatible with `g`, via the local Markov property:
/// every node is independent of its non-descendants given its parents.
pub fn compatible(p: &JointTable, g: &Dag, eps: f64) -> Result<AuditReport, DistError> {
    per_node_audit(p, g, eps, "compatibility (local Markov property)", |v| markov_split(g, v))
}

/// Causal Markov Condition: each variable is independent of its
/// non-descendants conditional on its parents.
pub fn causal_markov_check(p: &JointTable, g: &Dag, eps: f64) -> Result<AuditReport, DistError> {
    per_node_audit(p, g, eps, "causal Markov condition", |v| markov_split(g, v))
}

/// Causal Completeness: each variable is independent of its non-descendants
/// conditional on its ancestors.
pub fn causal_completeness_check(p: &JointTable, g: &Dag, eps: f64) -> Result<AuditReport, DistError> {
    per_node_audit(p, g, eps, "causal completeness", |v| {
        let anc = g.ancestor_ids(v);
        let rest = g.non_descendant_ids(v).difference(&anc).copied().collect();
        (anc, rest)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RpccVerdict {
    /// `x` and `y` are marginally independent.
    Uncorrelated,
    /// One is an ancestor of the other.
    DirectCauseRelation,
    /// Correlated, but independent given their common ancestors.
    ScreenedByCommonPast { common: Vec<String> },
    /// Correlated and not screened off by their common ancestors.
    ViolatesRpcc { common: Vec<String>, violation: f64 },
}

impl RpccVerdict {
    /// Whether the verdict is consistent with the common-cause principle.
    pub fn consistent(&self) -> bool {
        !matches!(self, RpccVerdict::ViolatesRpcc { .. })
    }
}

impl fmt::Display for RpccVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |c: &[String]| if c.is_empty() { "∅".to_string() } else { c.join(",") };
        match self {
            RpccVerdict::Uncorrelated => write!(f, "uncorrelated"),
            RpccVerdict::DirectCauseRelation => write!(f, "direct_cause_relation"),
            RpccVerdict::ScreenedByCommonPast { common } => {
                write!(f, "screened_by_common_past: C = {{{}}}", set(common))
            }
            RpccVerdict::ViolatesRpcc { common, violation } => write!(
                f,
                "violates_rpcc: C = {{{}}}, max violation {violation:.9}",
                set(common)
            ),
        }
    }
}

/// Reichenbach's common-cause check for a pair of variables, with the common
/// causal past taken as the intersection of their ancestor sets.
pub fn reichenbach_check(
    p: &JointTable,
    g: &Dag,
    x: &str,
    y: &str,
    eps: f64,
) -> Result<RpccVerdict, DistError> {
    p.check_matches(g)?;
    let (xi, yi) = (g.id(x)?, g.id(y)?);
    if xi == yi {
        return Err(DistError::InvalidQuery("x and y must differ".into()));
    }
    let (ax, ay) = (g.ancestor_ids(xi), g.ancestor_ids(yi));
    if ax.contains(&yi) || ay.contains(&xi) {
        return Ok(RpccVerdict::DirectCauseRelation);
    }
    let marginal = ci_holds(p, &CondQuery::new(&[x], &[y], &[]), eps)?;
    if marginal.holds {
        return Ok(RpccVerdict::Uncorrelated);
    }
    let common: NodeSet = ax.intersection(&ay).copied().collect();
    let common_names = g.names(&common);
    let screened = ci_holds(
        p,
        &CondQuery {
            x: vec![x.to_string()],
            y: vec![y.to_string()],
            z: common_names.clone(),
        },
        eps,
    )?;
    Ok(if screened.holds {
        RpccVerdict::ScreenedByCommonPast {
            common: common_names,
        }
    } else {
        RpccVerdict::ViolatesRpcc {
            common: common_names,
            violation: screened.max_violation,
        }
    })
}
