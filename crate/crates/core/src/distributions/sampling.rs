use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::factor::joint_from_tables;
use super::table::{checked_size, ConditionalTable, JointTable, Variable};
use super::DistError;
use crate::graph::Dag;

/// A point drawn uniformly from the probability simplex of dimension `k`.
pub(crate) fn simplex_point<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// One conditional table per node of `g` (declaration order), each slice
/// uniform on its simplex.
pub fn random_tables<R: Rng + ?Sized>(g: &Dag, rng: &mut R) -> Result<Vec<ConditionalTable>, DistError> {
    let var = |v: usize| Variable {
        name: g.name(v).to_string(),
        cardinality: g.cardinality(v),
    };
    (0..g.len())
        .map(|v| {
            let parents: Vec<Variable> = g.parent_ids(v).iter().map(|&u| var(u)).collect();
            let contexts = checked_size(parents.iter().map(|p| p.cardinality))?;
            let k = g.cardinality(v);
            let entries = (0..contexts).flat_map(|_| simplex_point(rng, k)).collect();
            ConditionalTable::new(var(v), parents, entries)
        })
        .collect()
}

/// A random joint that factorizes over `g`; deterministic per seed.
pub fn random_compatible(g: &Dag, seed: u64) -> Result<JointTable, DistError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables = random_tables(g, &mut rng)?;
    joint_from_tables(g, &tables)
}
