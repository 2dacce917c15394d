//! The two-party Bell scenario: settings `X, Y`, outcomes `A, B` and a
//! latent common cause `Λ`.

mod behavior;
mod lhv;
mod membership;
pub mod simplex;

use thiserror::Error;

use crate::distributions::{ci_holds, DistError, JointTable, Variable};
use crate::graph::{CondQuery, Dag, DagBuilder, NodeKind};
use crate::report::{AuditCheck, AuditReport};

pub use behavior::{
    chsh_value, max_chsh, mixture, no_signalling_check, parse_behavior, pr_box, pr_box_variant,
    singlet_behavior, Behavior, ChshVariant, STANDARD_ANGLES,
};
pub use lhv::{
    behavior_from_lhv, deterministic_strategies, lhv_joint, lhv_screening_audit,
    model_from_strategy_weights, DeterministicStrategy, LhvModel,
};
pub use membership::{feasible_strategy_weights, lhv_membership, MembershipVerdict, LOCAL_BOUND};

/// Name of the latent common-cause node.
pub const LAMBDA: &str = "Λ";

/// Default hidden-variable range: one value per deterministic strategy.
pub const DEFAULT_LAMBDA_CARDINALITY: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("P(·,·|x={x},y={y}) sums to {sum}, not 1")]
    NotNormalized { x: usize, y: usize, sum: f64 },
    #[error("invalid LHV model: {0}")]
    InvalidModel(String),
    #[error("behavior is signalling (worst marginal deviation {0})")]
    Signalling(f64),
    #[error("internal inconsistency between facet check and feasibility solve: {0}")]
    Inconsistent(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// The Bell DAG with `X → A ← Λ → B ← Y` and a 16-valued `Λ`.
pub fn bell_dag() -> Dag {
    bell_dag_with_lambda(DEFAULT_LAMBDA_CARDINALITY)
}

pub fn bell_dag_with_lambda(lambda_cardinality: usize) -> Dag {
    let build = || -> Result<Dag, crate::graph::GraphError> {
        let mut b = DagBuilder::new();
        b.node("X", NodeKind::Setting, 2)?
            .node("Y", NodeKind::Setting, 2)?
            .node("A", NodeKind::Outcome, 2)?
            .node("B", NodeKind::Outcome, 2)?
            .node(LAMBDA, NodeKind::Latent, lambda_cardinality.max(1))?
            .edge("X", "A")?
            .edge(LAMBDA, "A")?
            .edge(LAMBDA, "B")?
            .edge("Y", "B")?;
        b.build()
    };
    build().expect("the Bell DAG is well formed")
}

/// Joint over `(X, Y, A, B)` with uniform setting priors.
pub fn behavior_joint(b: &Behavior) -> JointTable {
    let var = |n: &str| Variable {
        name: n.to_string(),
        cardinality: 2,
    };
    JointTable::from_fn(vec![var("X"), var("Y"), var("A"), var("B")], |v| {
        0.25 * b.p(v[2], v[3], v[0], v[1])
    })
    .expect("a normalized behavior gives a normalized joint")
}

/// Checks the independences demanded of a behavior on the Bell DAG by the
/// quantum causality condition: every outcome is marginally independent of
/// settings that are not its causes and of outcomes with which it shares no
/// common cause; settings are mutually independent. Outcome pairs that do
/// share a cause are reported but not asserted.
pub fn quantum_causality_audit(b: &Behavior, eps: f64) -> Result<AuditReport, BellError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(BellError::InvalidEpsilon(eps));
    }
    let g = bell_dag();
    let joint = behavior_joint(b);
    let mut report = AuditReport::new("quantum causality condition");
    let kinds = |k: NodeKind| -> Vec<usize> { (0..g.len()).filter(|&v| g.kind(v) == k).collect() };
    let outcomes = kinds(NodeKind::Outcome);
    let settings = kinds(NodeKind::Setting);
    let mut test = |u: usize, v: usize, asserted: bool, note: Option<&str>| -> Result<(), BellError> {
        let q = CondQuery::new(&[g.name(u)], &[g.name(v)], &[]);
        let r = ci_holds(&joint, &q, eps)?;
        let mut check = AuditCheck::new(q.to_string(), r.holds, r.max_violation)
            .with_witness(r.witness_string());
        if let Some(n) = note {
            let observed = if r.holds { "independent" } else { "dependent" };
            check = check.with_note(format!("{n}; observed {observed}"));
        }
        report.push(if asserted { check } else { check.excluded() });
        Ok(())
    };
    for &o in &outcomes {
        let causes = g.ancestor_ids(o);
        for &s in settings.iter().filter(|s| !causes.contains(s)) {
            test(o, s, true, None)?;
        }
    }
    for (i, &o) in outcomes.iter().enumerate() {
        for &p in &outcomes[i + 1..] {
            let shared = g.ancestor_ids(o).intersection(&g.ancestor_ids(p)).count() > 0;
            if shared {
                test(o, p, false, Some("outcomes share a common cause; not asserted"))?;
            } else {
                test(o, p, true, None)?;
            }
        }
    }
    for (i, &s) in settings.iter().enumerate() {
        for &t in &settings[i + 1..] {
            test(s, t, true, None)?;
        }
    }
    Ok(report)
}
