use std::fmt;

use super::BellError;
use crate::report::{AuditCheck, AuditReport};

/// Tolerance accepted when loading a behavior; slices are renormalized afterwards.
pub const BEHAVIOR_SUM_TOL: f64 = 1e-9;

/// Two-party, two-setting, two-outcome conditional table `P(a,b|x,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    table: [f64; 16],
}

#[inline]
fn index(a: usize, b: usize, x: usize, y: usize) -> usize {
    ((a * 2 + b) * 2 + x) * 2 + y
}

impl Behavior {
    /// Builds a behavior from `f(a, b, x, y)`, validating every `(x, y)` slice.
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self, BellError> {
        let mut table = [0.0; 16];
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        table[index(a, b, x, y)] = f(a, b, x, y);
                    }
                }
            }
        }
        Self::from_table(table)
    }

    /// `table[((a*2+b)*2+x)*2+y] = P(a,b|x,y)`.
    pub fn from_table(mut table: [f64; 16]) -> Result<Self, BellError> {
        if let Some(&bad) = table.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(BellError::InvalidProbability(bad));
        }
        for x in 0..2 {
            for y in 0..2 {
                let cells = [index(0, 0, x, y), index(0, 1, x, y), index(1, 0, x, y), index(1, 1, x, y)];
                let sum: f64 = cells.iter().map(|&i| table[i]).sum();
                if (sum - 1.0).abs() > BEHAVIOR_SUM_TOL {
                    return Err(BellError::NotNormalized { x, y, sum });
                }
                for i in cells {
                    table[i] /= sum;
                }
            }
        }
        Ok(Self { table })
    }

    pub fn uniform() -> Self {
        Self { table: [0.25; 16] }
    }

    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[index(a, b, x, y)]
    }

    pub fn table(&self) -> &[f64; 16] {
        &self.table
    }

    /// `E(x,y) = Σ_{a,b} (−1)^{a⊕b} P(a,b|x,y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.p(0, 0, x, y) + self.p(1, 1, x, y) - self.p(0, 1, x, y) - self.p(1, 0, x, y)
    }

    /// Alice's marginal `Σ_b P(a,b|x,y)`.
    pub fn alice_marginal(&self, a: usize, x: usize, y: usize) -> f64 {
        self.p(a, 0, x, y) + self.p(a, 1, x, y)
    }

    /// Bob's marginal `Σ_a P(a,b|x,y)`.
    pub fn bob_marginal(&self, b: usize, x: usize, y: usize) -> f64 {
        self.p(0, b, x, y) + self.p(1, b, x, y)
    }

    pub fn max_abs_diff(&self, other: &Behavior) -> f64 {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serializes as 16 lines `a b x y prob`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        out.push_str(&format!("{a} {b} {x} {y} {}\n", self.p(a, b, x, y)));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the behavior file format: exactly one `a b x y prob` line per
/// assignment; `#` starts a comment.
pub fn parse_behavior(text: &str) -> Result<Behavior, BellError> {
    let mut table = [f64::NAN; 16];
    let mut first_line = [0usize; 16];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let syntax = |message: String| BellError::Syntax {
            line: line_no,
            message,
        };
        if tokens.len() != 5 {
            return Err(syntax("expected `a b x y prob`".into()));
        }
        let mut bits = [0usize; 4];
        for (slot, tok) in bits.iter_mut().zip(&tokens[..4]) {
            *slot = match *tok {
                "0" => 0,
                "1" => 1,
                other => return Err(syntax(format!("expected 0 or 1, got `{other}`"))),
            };
        }
        let p: f64 = tokens[4]
            .parse()
            .map_err(|_| syntax(format!("invalid probability `{}`", tokens[4])))?;
        let idx = index(bits[0], bits[1], bits[2], bits[3]);
        if first_line[idx] != 0 {
            return Err(syntax(format!("assignment repeats line {}", first_line[idx])));
        }
        first_line[idx] = line_no;
        table[idx] = p;
    }
    if let Some(missing) = first_line.iter().position(|&l| l == 0) {
        let (a, b, x, y) = (missing >> 3 & 1, missing >> 2 & 1, missing >> 1 & 1, missing & 1);
        return Err(BellError::Syntax {
            line: 0,
            message: format!("missing entry for a={a} b={b} x={x} y={y}"),
        });
    }
    Behavior::from_table(table)
}

/// One of the eight CHSH expressions: the position of the minus sign times a global sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChshVariant(u8);

impl ChshVariant {
    pub const ALL: [ChshVariant; 8] = [
        ChshVariant(0),
        ChshVariant(1),
        ChshVariant(2),
        ChshVariant(3),
        ChshVariant(4),
        ChshVariant(5),
        ChshVariant(6),
        ChshVariant(7),
    ];

    pub fn new(v: usize) -> Option<Self> {
        (v < 8).then_some(Self(v as u8))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    /// Coefficient of `E(x,y)`: variant 0 is `E00 + E01 + E10 − E11`.
    pub fn coefficient(self, x: usize, y: usize) -> i32 {
        let minus = [(1, 1), (1, 0), (0, 1), (0, 0)][(self.0 % 4) as usize];
        let sign = if self.0 < 4 { 1 } else { -1 };
        if (x, y) == minus {
            -sign
        } else {
            sign
        }
    }
}

impl fmt::Display for ChshVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn chsh_value(b: &Behavior, variant: ChshVariant) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            s += variant.coefficient(x, y) as f64 * b.correlator(x, y);
        }
    }
    s
}

/// The variant with the largest value (first on ties) and that value.
pub fn max_chsh(b: &Behavior) -> (ChshVariant, f64) {
    ChshVariant::ALL
        .iter()
        .map(|&v| (v, chsh_value(b, v)))
        .fold((ChshVariant(0), f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

/// Closed-form singlet correlations `E(x,y) = −cos(θ_x − φ_y)` with unbiased marginals.
pub fn singlet_behavior(theta0: f64, theta1: f64, phi0: f64, phi1: f64) -> Behavior {
    let theta = [theta0, theta1];
    let phi = [phi0, phi1];
    let mut table = [0.0; 16];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let e = -(theta[x] - phi[y]).cos();
                    let sign = if a == b { 1.0 } else { -1.0 };
                    table[index(a, b, x, y)] = 0.25 * (1.0 + sign * e);
                }
            }
        }
    }
    Behavior { table }
}

/// Angles maximizing the CHSH violation of [`singlet_behavior`].
pub const STANDARD_ANGLES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::FRAC_PI_4,
    -std::f64::consts::FRAC_PI_4,
];

/// `P(a,b|x,y) = ½` if `a ⊕ b = x·y`, else 0.
pub fn pr_box() -> Behavior {
    pr_box_variant(0)
}

/// The eight PR boxes `a ⊕ b = x·y ⊕ αx ⊕ βy ⊕ γ`, with `k = 4α + 2β + γ`.
pub fn pr_box_variant(k: usize) -> Behavior {
    let (alpha, beta, gamma) = (k >> 2 & 1, k >> 1 & 1, k & 1);
    let mut table = [0.0; 16];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if a ^ b == (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma {
                        table[index(a, b, x, y)] = 0.5;
                    }
                }
            }
        }
    }
    Behavior { table }
}

/// Convex combination `Σ w_i b_i`; weights must be nonnegative and sum to 1.
pub fn mixture(parts: &[(f64, &Behavior)]) -> Result<Behavior, BellError> {
    let mut table = [0.0; 16];
    for (w, b) in parts {
        for (t, p) in table.iter_mut().zip(&b.table) {
            *t += w * p;
        }
    }
    Behavior::from_table(table)
}

/// Checks that each party's marginal ignores the other party's setting.
pub fn no_signalling_check(b: &Behavior, eps: f64) -> Result<AuditReport, BellError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(BellError::InvalidEpsilon(eps));
    }
    let mut report = AuditReport::new("no-signalling");
    let mut alice = (0.0f64, None);
    let mut bob = (0.0f64, None);
    for out in 0..2 {
        for own in 0..2 {
            let d = (b.alice_marginal(out, own, 0) - b.alice_marginal(out, own, 1)).abs();
            if d > alice.0 {
                alice = (d, Some(format!("a={out} x={own}")));
            }
            let d = (b.bob_marginal(out, 0, own) - b.bob_marginal(out, 1, own)).abs();
            if d > bob.0 {
                bob = (d, Some(format!("b={out} y={own}")));
            }
        }
    }
    for (label, (dev, witness)) in [
        ("P(a|x,y) independent of y", alice),
        ("P(b|x,y) independent of x", bob),
    ] {
        let ok = dev <= eps;
        report.push(AuditCheck::new(label, ok, dev).with_witness(if ok { None } else { witness }));
    }
    Ok(report)
}
