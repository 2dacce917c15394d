//! Phase-one simplex for small dense feasibility problems `A x = b, x >= 0`.

const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// Structural part of the final basic solution.
    pub x: Vec<f64>,
    /// Sum of artificial variables at termination; zero iff feasible.
    pub infeasibility: f64,
    pub pivots: usize,
}

/// Minimizes the sum of artificials over `[A | I] (x, s) = b`.
///
/// Rows with negative right-hand side are negated first. Entering columns
/// follow Bland's rule, so the method terminates on degenerate problems.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * b[i];
    }
    // Reduced costs of min Σ s, expressed in the artificial basis.
    let costs: Vec<f64> = (0..n).map(|j| -(0..m).map(|i| t[i][j]).sum::<f64>()).collect();
    t[m][..n].copy_from_slice(&costs);
    t[m][width - 1] = -(0..m).map(|i| t[i][width - 1]).sum::<f64>();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    while pivots < MAX_PIVOTS {
        let Some(col) = (0..n).find(|&j| t[m][j] < -PIVOT_TOL) else {
            break;
        };
        let mut row: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][col] > PIVOT_TOL {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match row {
                    None => true,
                    Some((r, best)) => {
                        ratio < best - PIVOT_TOL || (ratio <= best + PIVOT_TOL && basis[i] < basis[r])
                    }
                };
                if better {
                    row = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so a pivot row always exists.
        let Some((r, _)) = row else { break };
        pivot(&mut t, r, col);
        basis[r] = col;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    let mut infeasibility = 0.0;
    for (i, &var) in basis.iter().enumerate() {
        let value = t[i][width - 1];
        if var < n {
            x[var] = value;
        } else {
            infeasibility += value.max(0.0);
        }
    }
    PhaseOne {
        x,
        infeasibility,
        pivots,
    }
}

fn pivot(t: &mut [Vec<f64>], r: usize, c: usize) {
    let p = t[r][c];
    t[r].iter_mut().for_each(|v| *v /= p);
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let factor = row[c];
        if factor != 0.0 {
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_feasible_point() {
        // x + y = 1, x - y = 0.5
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let s = phase_one(&a, &[1.0, 0.5]);
        assert!(s.infeasibility < 1e-12);
        assert!((s.x[0] - 0.75).abs() < 1e-12 && (s.x[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = 1, x + y = 2
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let s = phase_one(&a, &[1.0, 2.0]);
        assert!((s.infeasibility - 1.0).abs() < 1e-12);
        // x = -1 with x >= 0
        let s = phase_one(&[vec![1.0]], &[-1.0]);
        assert!(s.infeasibility > 0.5);
    }

    #[test]
    fn handles_redundant_rows() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        let s = phase_one(&a, &[1.0, 2.0, 1.0]);
        assert!(s.infeasibility < 1e-12);
        let r0 = s.x[0] + s.x[1];
        let r2 = s.x[1] + s.x[2];
        assert!((r0 - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert!(s.x.iter().all(|&v| v >= -1e-15));
    }
}
