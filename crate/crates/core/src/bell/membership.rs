//! Local-polytope membership, decided twice: by the eight CHSH facets and by
//! a feasibility solve over mixtures of the 16 deterministic strategies.

use std::fmt;

use super::behavior::{max_chsh, no_signalling_check, Behavior, ChshVariant};
use super::lhv::{behavior_from_lhv, model_from_strategy_weights, DeterministicStrategy, LhvModel};
use super::simplex::phase_one;
use super::BellError;
use crate::report::fmt_real;

/// Local bound of every CHSH variant.
pub const LOCAL_BOUND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub enum MembershipVerdict {
    Local {
        model: LhvModel,
        /// Largest entrywise difference between the model's behavior and the input.
        residual: f64,
    },
    NotLocal {
        variant: ChshVariant,
        value: f64,
    },
}

impl MembershipVerdict {
    pub fn is_local(&self) -> bool {
        matches!(self, MembershipVerdict::Local { .. })
    }

    pub fn model(&self) -> Option<&LhvModel> {
        match self {
            MembershipVerdict::Local { model, .. } => Some(model),
            MembershipVerdict::NotLocal { .. } => None,
        }
    }

    pub fn violated_facet(&self) -> Option<(ChshVariant, f64)> {
        match self {
            MembershipVerdict::NotLocal { variant, value } => Some((*variant, *value)),
            MembershipVerdict::Local { .. } => None,
        }
    }

    /// Summary line, followed by strategy weights when local.
    pub fn to_text(&self) -> String {
        match self {
            MembershipVerdict::Local { model, residual } => {
                let mut out = format!("local: residual {}\n", fmt_real(*residual));
                out.push_str("strategy f(0) f(1) g(0) g(1) weight\n");
                for (k, (s, w)) in DeterministicStrategy::all().iter().zip(model.weights()).enumerate() {
                    out.push_str(&format!(
                        "{k} {} {} {} {} {}\n",
                        s.alice[0],
                        s.alice[1],
                        s.bob[0],
                        s.bob[1],
                        fmt_real(*w)
                    ));
                }
                out
            }
            MembershipVerdict::NotLocal { variant, value } => {
                format!("not local: variant {variant}, S = {}\n", fmt_real(*value))
            }
        }
    }

    pub fn to_csv(&self) -> String {
        match self {
            MembershipVerdict::Local { model, residual } => {
                let mut out = String::from("verdict,strategy,weight,residual\n");
                for (k, w) in model.weights().iter().enumerate() {
                    out.push_str(&format!("local,{k},{},{}\n", fmt_real(*w), fmt_real(*residual)));
                }
                out
            }
            MembershipVerdict::NotLocal { variant, value } => {
                format!("verdict,variant,value\nnot_local,{variant},{}\n", fmt_real(*value))
            }
        }
    }
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Mixture weights over the deterministic strategies reproducing `b`, if
/// the phase-one solve finds them within `eps` (max-norm on table entries).
pub fn feasible_strategy_weights(b: &Behavior, eps: f64) -> Option<(Vec<f64>, f64)> {
    let strategies = DeterministicStrategy::all();
    let mut rows = Vec::with_capacity(17);
    let mut rhs = Vec::with_capacity(17);
    for a in 0..2 {
        for bb in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    rows.push(
                        strategies
                            .iter()
                            .map(|s| if s.indicator(a, bb, x, y) { 1.0 } else { 0.0 })
                            .collect(),
                    );
                    rhs.push(b.p(a, bb, x, y));
                }
            }
        }
    }
    rows.push(vec![1.0; strategies.len()]);
    rhs.push(1.0);
    let sol = phase_one(&rows, &rhs);
    let mut w: Vec<f64> = sol.x.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= total);
    let model = model_from_strategy_weights(&w).ok()?;
    let residual = behavior_from_lhv(&model).max_abs_diff(b);
    (residual <= eps).then_some((w, residual))
}

/// Decides whether `b` admits a local hidden-variable model.
///
/// The input must be no-signalling within `eps`. The facet test and the
/// feasibility solve must agree; a local verdict may exceed the CHSH bound by
/// at most `16·eps`, since each variant sums 16 entries with unit weights.
pub fn lhv_membership(b: &Behavior, eps: f64) -> Result<MembershipVerdict, BellError> {
    let ns = no_signalling_check(b, eps)?;
    if !ns.passed() {
        return Err(BellError::Signalling(ns.worst_deviation()));
    }
    let (variant, value) = max_chsh(b);
    match feasible_strategy_weights(b, eps) {
        Some((weights, residual)) => {
            if value > LOCAL_BOUND + 16.0 * eps {
                return Err(BellError::Inconsistent(format!(
                    "feasibility solve found a model but variant {variant} evaluates to {value}"
                )));
            }
            Ok(MembershipVerdict::Local {
                model: model_from_strategy_weights(&weights)?,
                residual,
            })
        }
        None => {
            if value <= LOCAL_BOUND + eps {
                return Err(BellError::Inconsistent(format!(
                    "no model found but the largest CHSH value is {value}"
                )));
            }
            Ok(MembershipVerdict::NotLocal { variant, value })
        }
    }
}
