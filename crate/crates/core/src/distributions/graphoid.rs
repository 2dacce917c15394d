//! Randomized audit of the graphoid axioms on a fixed distribution.
//!
//! Each instance draws disjoint variable sets `X, Y, W` (nonempty) and `Z`
//! (possibly empty). Whenever an axiom's antecedents hold within `eps`, its
//! consequent is required to hold within `10·eps`. Intersection is only
//! asserted on strictly positive distributions; elsewhere a failing
//! consequent is recorded as excluded.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ci::max_violation;
use super::table::JointTable;
use super::DistError;
use crate::report::{csv_field, fmt_real};

/// Consequents are checked at this multiple of the antecedent tolerance.
pub const CONSEQUENT_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::WeakUnion,
        Axiom::Contraction,
        Axiom::Intersection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Symmetry => "symmetry",
            Axiom::Decomposition => "decomposition",
            Axiom::WeakUnion => "weak union",
            Axiom::Contraction => "contraction",
            Axiom::Intersection => "intersection",
        }
    }

    fn needs_w(self) -> bool {
        self != Axiom::Symmetry
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxiomOutcome {
    /// Some antecedent failed; nothing to check.
    Vacuous,
    Holds,
    Fails { violation: f64 },
    /// Intersection consequent failed on a distribution with zeros.
    ExcludedByPositivity { violation: f64 },
}

/// `(antecedents, consequent)` as `(X, Y, Z)` index triples.
type Ci = (Vec<usize>, Vec<usize>, Vec<usize>);

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

fn instance(axiom: Axiom, x: &[usize], y: &[usize], z: &[usize], w: &[usize]) -> (Vec<Ci>, Ci) {
    let ci = |a: &[usize], b: &[usize], c: &[usize]| (a.to_vec(), b.to_vec(), c.to_vec());
    let yw = union(y, w);
    match axiom {
        Axiom::Symmetry => (vec![ci(x, y, z)], ci(y, x, z)),
        Axiom::Decomposition => (vec![ci(x, &yw, z)], ci(x, y, z)),
        Axiom::WeakUnion => (vec![ci(x, &yw, z)], ci(x, y, &union(z, w))),
        Axiom::Contraction => (
            vec![ci(x, y, &union(z, w)), ci(x, w, z)],
            ci(x, &yw, z),
        ),
        Axiom::Intersection => (
            vec![ci(x, w, &union(z, y)), ci(x, y, &union(z, w))],
            ci(x, &yw, z),
        ),
    }
}

fn evaluate(
    p: &JointTable,
    positive: bool,
    axiom: Axiom,
    sets: [&[usize]; 4],
    eps: f64,
) -> AxiomOutcome {
    let [x, y, z, w] = sets;
    let (antecedents, (cx, cy, cz)) = instance(axiom, x, y, z, w);
    if antecedents
        .iter()
        .any(|(a, b, c)| max_violation(p, a, b, c).0 > eps)
    {
        return AxiomOutcome::Vacuous;
    }
    let violation = max_violation(p, &cx, &cy, &cz).0;
    if violation <= CONSEQUENT_FACTOR * eps {
        AxiomOutcome::Holds
    } else if axiom == Axiom::Intersection && !positive {
        AxiomOutcome::ExcludedByPositivity { violation }
    } else {
        AxiomOutcome::Fails { violation }
    }
}

fn check_sets<S: AsRef<str>>(p: &JointTable, sets: [&[S]; 4], axiom: Axiom) -> Result<[Vec<usize>; 4], DistError> {
    let idx = sets.map(|s| p.indices(s));
    let [x, y, z, w] = idx;
    let (x, y, z, w) = (x?, y?, z?, w?);
    let mut all: Vec<usize> = x.iter().chain(&y).chain(&z).chain(&w).copied().collect();
    let n = all.len();
    all.sort_unstable();
    all.dedup();
    if all.len() != n {
        return Err(DistError::InvalidQuery("X, Y, Z, W must be disjoint".into()));
    }
    if x.is_empty() || y.is_empty() || (axiom.needs_w() && w.is_empty()) {
        return Err(DistError::InvalidQuery("X, Y and W must be nonempty".into()));
    }
    Ok([x, y, z, w])
}

/// Evaluates one axiom instance on named variable sets.
pub fn check_axiom<S: AsRef<str>>(
    p: &JointTable,
    axiom: Axiom,
    x: &[S],
    y: &[S],
    z: &[S],
    w: &[S],
    eps: f64,
) -> Result<AxiomOutcome, DistError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(DistError::InvalidEpsilon(eps));
    }
    let [x, y, z, w] = check_sets(p, [x, y, z, w], axiom)?;
    Ok(evaluate(p, p.is_strictly_positive(), axiom, [&x, &y, &z, &w], eps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomTally {
    pub axiom: Axiom,
    pub sampled: usize,
    /// Instances whose antecedents held.
    pub applicable: usize,
    pub held: usize,
    pub failures: usize,
    pub excluded: usize,
    pub counterexample: Option<String>,
}

impl AxiomTally {
    fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            sampled: 0,
            applicable: 0,
            held: 0,
            failures: 0,
            excluded: 0,
            counterexample: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphoidReport {
    pub trials: usize,
    pub strictly_positive: bool,
    pub tallies: Vec<AxiomTally>,
}

impl GraphoidReport {
    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failures == 0)
    }

    pub fn tally(&self, axiom: Axiom) -> &AxiomTally {
        self.tallies
            .iter()
            .find(|t| t.axiom == axiom)
            .expect("every axiom is tallied")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "graphoid audit: {} trials, strictly positive: {}\n",
            self.trials,
            if self.strictly_positive { "yes" } else { "no" }
        );
        out.push_str("axiom          sampled  applicable  held  failed  excluded\n");
        for t in &self.tallies {
            out.push_str(&format!(
                "{:<13}  {:>7}  {:>10}  {:>4}  {:>6}  {:>8}\n",
                t.axiom.name(),
                t.sampled,
                t.applicable,
                t.held,
                t.failures,
                t.excluded
            ));
        }
        for t in &self.tallies {
            if let Some(c) = &t.counterexample {
                let tag = if t.failures > 0 { "counterexample" } else { "excluded by positivity gate" };
                out.push_str(&format!("{} {tag}: {c}\n", t.axiom.name()));
            }
        }
        out.push_str(&format!("overall: {}\n", if self.passed() { "pass" } else { "fail" }));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("axiom,sampled,applicable,held,failed,excluded,counterexample\n");
        for t in &self.tallies {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t.axiom.name(),
                t.sampled,
                t.applicable,
                t.held,
                t.failures,
                t.excluded,
                csv_field(t.counterexample.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

impl fmt::Display for GraphoidReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

/// Random disjoint `(X, Y, Z, W)`; `W` is empty only when fewer than three
/// variables exist.
fn draw_sets<R: Rng>(rng: &mut R, n: usize) -> [Vec<usize>; 4] {
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        order.shuffle(rng);
        let mut sets: [Vec<usize>; 4] = Default::default();
        let forced = n.min(3);
        // First variables seed X, Y, W so they are nonempty; the rest go anywhere.
        let slots = [0usize, 1, 3];
        for (k, &v) in order.iter().enumerate() {
            let slot = if k < forced { slots[k] } else { rng.random_range(0..5) };
            if slot < 4 {
                sets[slot].push(v);
            }
        }
        if !sets[0].is_empty() && !sets[1].is_empty() {
            for s in sets.iter_mut() {
                s.sort_unstable();
            }
            return sets;
        }
    }
}

fn describe(p: &JointTable, sets: &[Vec<usize>; 4], violation: f64) -> String {
    let names = |s: &[usize]| {
        if s.is_empty() {
            "∅".to_string()
        } else {
            s.iter()
                .map(|&i| p.variables()[i].name.as_str())
                .collect::<Vec<_>>()
                .join(",")
        }
    };
    format!(
        "X={} Y={} Z={} W={} consequent violation {}",
        names(&sets[0]),
        names(&sets[1]),
        names(&sets[2]),
        names(&sets[3]),
        fmt_real(violation)
    )
}

/// Samples `trials` set quadruples and evaluates all five axioms on each.
pub fn graphoid_audit(p: &JointTable, eps: f64, trials: usize, seed: u64) -> Result<GraphoidReport, DistError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(DistError::InvalidEpsilon(eps));
    }
    let n = p.variables().len();
    let positive = p.is_strictly_positive();
    let mut tallies: Vec<AxiomTally> = Axiom::ALL.iter().map(|&a| AxiomTally::new(a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n >= 2 {
        for _ in 0..trials {
            let sets = draw_sets(&mut rng, n);
            for tally in tallies.iter_mut() {
                if tally.axiom.needs_w() && sets[3].is_empty() {
                    continue;
                }
                tally.sampled += 1;
                let outcome = evaluate(
                    p,
                    positive,
                    tally.axiom,
                    [&sets[0], &sets[1], &sets[2], &sets[3]],
                    eps,
                );
                match outcome {
                    AxiomOutcome::Vacuous => {}
                    AxiomOutcome::Holds => {
                        tally.applicable += 1;
                        tally.held += 1;
                    }
                    AxiomOutcome::Fails { violation } => {
                        tally.applicable += 1;
                        tally.failures += 1;
                        if tally.failures == 1 {
                            tally.counterexample = Some(describe(p, &sets, violation));
                        }
                    }
                    AxiomOutcome::ExcludedByPositivity { violation } => {
                        tally.applicable += 1;
                        tally.excluded += 1;
                        if tally.counterexample.is_none() {
                            tally.counterexample = Some(describe(p, &sets, violation));
                        }
                    }
                }
            }
        }
    }
    Ok(GraphoidReport {
        trials,
        strictly_positive: positive,
        tallies,
    })
}
