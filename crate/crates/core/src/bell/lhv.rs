//! Local hidden-variable models and their deterministic vertices.

use std::fmt;

use rand::Rng;

use super::behavior::{Behavior, ChshVariant};
use super::{bell_dag_with_lambda, BellError};
use crate::distributions::{
    ci_holds, joint_from_tables, ConditionalTable, DistError, JointTable, Variable,
};
use crate::graph::CondQuery;
use crate::report::{fmt_real, AuditCheck, AuditReport};

const MODEL_SUM_TOL: f64 = 1e-9;

/// `P(a,b|x,y) = Σ_λ P(λ) P(a|x,λ) P(b|y,λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    weights: Vec<f64>,
    /// `response_a[λ][x][a] = P(a|x,λ)`
    response_a: Vec<[[f64; 2]; 2]>,
    /// `response_b[λ][y][b] = P(b|y,λ)`
    response_b: Vec<[[f64; 2]; 2]>,
}

fn normalized(values: &mut [f64], what: &str) -> Result<(), BellError> {
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(BellError::InvalidModel(format!("{what} has a negative or non-finite entry")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > MODEL_SUM_TOL {
        return Err(BellError::InvalidModel(format!("{what} sums to {sum}")));
    }
    values.iter_mut().for_each(|v| *v /= sum);
    Ok(())
}

impl LhvModel {
    pub fn new(
        mut weights: Vec<f64>,
        mut response_a: Vec<[[f64; 2]; 2]>,
        mut response_b: Vec<[[f64; 2]; 2]>,
    ) -> Result<Self, BellError> {
        if weights.is_empty() || response_a.len() != weights.len() || response_b.len() != weights.len() {
            return Err(BellError::InvalidModel(
                "weights and response tables must have the same nonzero length".into(),
            ));
        }
        normalized(&mut weights, "lambda weights")?;
        for (l, r) in response_a.iter_mut().enumerate() {
            for s in r.iter_mut() {
                normalized(s, &format!("P(a|x,λ={l})"))?;
            }
        }
        for (l, r) in response_b.iter_mut().enumerate() {
            for s in r.iter_mut() {
                normalized(s, &format!("P(b|y,λ={l})"))?;
            }
        }
        Ok(Self {
            weights,
            response_a,
            response_b,
        })
    }

    /// A random model with `lambdas` hidden values; every simplex is drawn uniformly.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, lambdas: usize) -> Self {
        use crate::distributions::simplex_point;
        let weights = simplex_point(rng, lambdas.max(1));
        let mut response = |_| {
            let mut r = [[0.0; 2]; 2];
            for s in r.iter_mut() {
                let p = simplex_point(rng, 2);
                *s = [p[0], p[1]];
            }
            r
        };
        let response_a = (0..weights.len()).map(&mut response).collect();
        let response_b = (0..weights.len()).map(&mut response).collect();
        Self {
            weights,
            response_a,
            response_b,
        }
    }

    pub fn lambdas(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn response_a(&self, lambda: usize, x: usize, a: usize) -> f64 {
        self.response_a[lambda][x][a]
    }

    pub fn response_b(&self, lambda: usize, y: usize, b: usize) -> f64 {
        self.response_b[lambda][y][b]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("lambda weight P(a=0|x=0) P(a=0|x=1) P(b=0|y=0) P(b=0|y=1)\n");
        for (l, w) in self.weights.iter().enumerate() {
            out.push_str(&format!(
                "{l} {} {} {} {} {}\n",
                fmt_real(*w),
                fmt_real(self.response_a[l][0][0]),
                fmt_real(self.response_a[l][1][0]),
                fmt_real(self.response_b[l][0][0]),
                fmt_real(self.response_b[l][1][0]),
            ));
        }
        out
    }
}

impl fmt::Display for LhvModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Outcome functions `a = f(x)`, `b = g(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: [u8; 2],
    pub bob: [u8; 2],
}

impl DeterministicStrategy {
    /// All 16 strategies; index `4·f + g` where `f(x) = (f >> x) & 1`.
    pub fn all() -> Vec<Self> {
        let func = |code: u8| [code & 1, code >> 1 & 1];
        (0..4u8)
            .flat_map(|f| (0..4u8).map(move |g| Self {
                alice: func(f),
                bob: func(g),
            }))
            .collect()
    }

    /// `P(a,b|x,y) = [a = f(x)][b = g(y)]`, as 0/1 entries.
    pub fn indicator(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.alice[x] as usize == a && self.bob[y] as usize == b
    }

    /// CHSH value in exact integer arithmetic on ±1 correlators.
    pub fn chsh_exact(&self, variant: ChshVariant) -> i32 {
        let mut s = 0;
        for x in 0..2 {
            for y in 0..2 {
                let e = if self.alice[x] == self.bob[y] { 1 } else { -1 };
                s += variant.coefficient(x, y) * e;
            }
        }
        s
    }

    pub fn behavior(&self) -> Behavior {
        Behavior::from_fn(|a, b, x, y| if self.indicator(a, b, x, y) { 1.0 } else { 0.0 })
            .expect("deterministic tables are normalized")
    }

    pub fn as_model(&self) -> LhvModel {
        let point = |v: u8| if v == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
        LhvModel {
            weights: vec![1.0],
            response_a: vec![[point(self.alice[0]), point(self.alice[1])]],
            response_b: vec![[point(self.bob[0]), point(self.bob[1])]],
        }
    }
}

/// The 16 deterministic strategies as point-mass LHV models.
pub fn deterministic_strategies() -> Vec<LhvModel> {
    DeterministicStrategy::all().iter().map(|s| s.as_model()).collect()
}

/// A mixture of deterministic strategies as one model with a hidden value per strategy.
pub fn model_from_strategy_weights(weights: &[f64]) -> Result<LhvModel, BellError> {
    let strategies = DeterministicStrategy::all();
    if weights.len() != strategies.len() {
        return Err(BellError::InvalidModel("expected 16 strategy weights".into()));
    }
    let point = |v: u8| if v == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
    LhvModel::new(
        weights.to_vec(),
        strategies.iter().map(|s| [point(s.alice[0]), point(s.alice[1])]).collect(),
        strategies.iter().map(|s| [point(s.bob[0]), point(s.bob[1])]).collect(),
    )
}

/// Evaluates the LHV factorization into a behavior.
pub fn behavior_from_lhv(m: &LhvModel) -> Behavior {
    Behavior::from_fn(|a, b, x, y| {
        (0..m.lambdas())
            .map(|l| m.weights[l] * m.response_a[l][x][a] * m.response_b[l][y][b])
            .sum()
    })
    .expect("LHV models produce normalized behaviors")
}

/// The full joint over the Bell DAG (`X, Y, A, B, Λ`) with uniform setting priors.
pub fn lhv_joint(m: &LhvModel) -> Result<JointTable, DistError> {
    let g = bell_dag_with_lambda(m.lambdas());
    let var = |n: &str, c: usize| Variable {
        name: n.to_string(),
        cardinality: c,
    };
    let lam = var(super::LAMBDA, m.lambdas());
    let setting = |n: &str| ConditionalTable::root(var(n, 2), vec![0.5, 0.5]);
    let response = |child: &str, setting: &str, r: &[[[f64; 2]; 2]]| {
        // Context index: setting-major, then λ.
        let entries = (0..2)
            .flat_map(|s| (0..r.len()).flat_map(move |l| r[l][s]))
            .collect();
        ConditionalTable::new(var(child, 2), vec![var(setting, 2), lam.clone()], entries)
    };
    let tables = vec![
        setting("X")?,
        setting("Y")?,
        response("A", "X", &m.response_a)?,
        response("B", "Y", &m.response_b)?,
        ConditionalTable::root(lam.clone(), m.weights.clone())?,
    ];
    joint_from_tables(&g, &tables)
}

/// The four reductions the Bell DAG imposes on the chain decomposition
/// `P(a|b,x,y,λ)P(b|x,y,λ)P(λ|x,y)P(x|y)P(y)`, each checked as an exact CI.
pub fn lhv_screening_audit(joint: &JointTable, eps: f64) -> Result<AuditReport, DistError> {
    let l = super::LAMBDA;
    let checks = [
        ("P(a|b,x,y,λ) = P(a|x,λ)", CondQuery::new(&["A"], &["B", "Y"], &["X", l])),
        ("P(b|x,y,λ) = P(b|y,λ)", CondQuery::new(&["B"], &["X"], &["Y", l])),
        ("P(λ|x,y) = P(λ)", CondQuery::new(&[l], &["X", "Y"], &[])),
        ("P(x|y) = P(x)", CondQuery::new(&["X"], &["Y"], &[])),
    ];
    let mut report = AuditReport::new("LHV screening reductions");
    for (label, q) in checks {
        let r = ci_holds(joint, &q, eps)?;
        report.push(
            AuditCheck::new(label, r.holds, r.max_violation)
                .with_witness(r.witness_string())
                .with_note(q.to_string()),
        );
    }
    Ok(report)
}
