use std::fmt;

use super::table::{advance, JointTable};
use super::DistError;
use crate::graph::CondQuery;

/// Verdict of an exact conditional-independence test.
#[derive(Debug, Clone, PartialEq)]
pub struct CiReport {
    pub query: CondQuery,
    pub holds: bool,
    /// Largest `|P(x,y,z)·P(z) − P(x,z)·P(y,z)|` over assignments.
    pub max_violation: f64,
    /// Assignment (name, value) attaining `max_violation`, when the test fails.
    pub witness: Option<Vec<(String, usize)>>,
}

impl CiReport {
    pub fn witness_string(&self) -> Option<String> {
        self.witness.as_ref().map(|w| {
            w.iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
    }
}

impl fmt::Display for CiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (max violation {:.9})",
            self.query,
            if self.holds { "holds" } else { "fails" },
            self.max_violation
        )
    }
}

/// Tests `(X ⫫ Y | Z)` in `p` using the division-free product form.
pub fn ci_holds(p: &JointTable, q: &CondQuery, eps: f64) -> Result<CiReport, DistError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(DistError::InvalidEpsilon(eps));
    }
    q.check_shape().map_err(DistError::InvalidQuery)?;
    let x = p.indices(&q.x)?;
    let y = p.indices(&q.y)?;
    let z = p.indices(&q.z)?;
    let (max_violation, argmax) = max_violation(p, &x, &y, &z);
    let holds = max_violation <= eps;
    let witness = (!holds).then(|| {
        x.iter()
            .chain(&y)
            .chain(&z)
            .zip(&argmax)
            .map(|(&i, &a)| (p.variables()[i].name.clone(), a))
            .collect()
    });
    Ok(CiReport {
        query: q.clone(),
        holds,
        max_violation,
        witness,
    })
}

/// Worst violation and the (x, y, z) digits attaining it.
pub(crate) fn max_violation(p: &JointTable, x: &[usize], y: &[usize], z: &[usize]) -> (f64, Vec<usize>) {
    let card = |s: &[usize]| s.iter().map(|&i| p.variables()[i].cardinality).product::<usize>();
    let (nx, ny, nz) = (card(x), card(y), card(z));
    let keep: Vec<usize> = x.iter().chain(y).chain(z).copied().collect();
    // Layout [x][y][z].
    let xyz = p.marginal(&keep);
    let mut xz = vec![0.0; nx * nz];
    let mut yz = vec![0.0; ny * nz];
    let mut pz = vec![0.0; nz];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let v = xyz[(i * ny + j) * nz + k];
                xz[i * nz + k] += v;
                yz[j * nz + k] += v;
                pz[k] += v;
            }
        }
    }
    let mut worst = 0.0f64;
    let mut at = (0, 0, 0);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let d = (xyz[(i * ny + j) * nz + k] * pz[k] - xz[i * nz + k] * yz[j * nz + k]).abs();
                if d > worst {
                    worst = d;
                    at = (i, j, k);
                }
            }
        }
    }
    let cards: Vec<usize> = keep.iter().map(|&i| p.variables()[i].cardinality).collect();
    let flat = (at.0 * ny + at.1) * nz + at.2;
    let mut digits = vec![0; cards.len()];
    for _ in 0..flat {
        advance(&mut digits, &cards);
    }
    (worst, digits)
}
