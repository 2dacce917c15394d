//! Helpers shared by the integration tests. The oracles here are written
//! against the raw data structures and do not call into the separation or
//! CI code they are used to check.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use causal_bell::distributions::{JointTable, Variable};
use causal_bell::graph::{Dag, DagBuilder, NodeId, NodeKind, NodeSet};
use proptest::prelude::*;
use rand::Rng;

/// Builds a DAG from a topological permutation, an edge mask over ordered
/// pairs of that permutation, node kinds and cardinalities. Edges into
/// latent nodes are dropped.
pub fn dag_from_parts(perm: &[usize], mask: &[bool], kinds: &[NodeKind], cards: &[usize]) -> Dag {
    let n = perm.len();
    let mut b = DagBuilder::new();
    for v in 0..n {
        b.node(&format!("N{v}"), kinds[v], cards[v]).unwrap();
    }
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (t, h) = (perm[i], perm[j]);
            if mask[k] && kinds[h] != NodeKind::Latent {
                b.edge(&format!("N{t}"), &format!("N{h}")).unwrap();
            }
            k += 1;
        }
    }
    b.build().unwrap()
}

fn kind_strategy(latents: bool) -> BoxedStrategy<NodeKind> {
    if latents {
        prop_oneof![Just(NodeKind::Setting), Just(NodeKind::Outcome), Just(NodeKind::Latent)].boxed()
    } else {
        prop_oneof![Just(NodeKind::Setting), Just(NodeKind::Outcome)].boxed()
    }
}

/// Random DAGs with `1..=max_n` nodes, mixed kinds and cardinalities `1..=max_card`.
pub fn arb_dag(max_n: usize, max_card: usize, latents: bool) -> impl Strategy<Value = Dag> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(kind_strategy(latents), n),
            proptest::collection::vec(1..=max_card, n),
        )
            .prop_map(|(perm, mask, kinds, cards)| dag_from_parts(&perm, &mask, &kinds, &cards))
    })
}

fn ancestral_closure(g: &Dag, seed: &NodeSet) -> NodeSet {
    let mut out = seed.clone();
    let mut stack: Vec<NodeId> = seed.iter().copied().collect();
    while let Some(v) = stack.pop() {
        for &(t, h) in g.edges() {
            if h == v && out.insert(t) {
                stack.push(t);
            }
        }
    }
    out
}

/// d-separation via the moralized ancestral graph: restrict to ancestors of
/// `x ∪ y ∪ z`, marry co-parents, drop directions, delete `z`, and test
/// whether `x` still reaches `y`.
pub fn moral_d_separated(g: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> bool {
    let all: NodeSet = x.iter().chain(y).chain(z).copied().collect();
    let keep = ancestral_closure(g, &all);
    let n = g.len();
    let mut adj = vec![BTreeSet::new(); n];
    for &(t, h) in g.edges() {
        if keep.contains(&t) && keep.contains(&h) {
            adj[t].insert(h);
            adj[h].insert(t);
        }
    }
    for v in &keep {
        let parents: Vec<NodeId> = g.edges().iter().filter(|e| e.1 == *v).map(|e| e.0).collect();
        for (i, &a) in parents.iter().enumerate() {
            for &b in &parents[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let mut seen: NodeSet = x.clone();
    let mut queue: VecDeque<NodeId> = x.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        if y.contains(&v) {
            return false;
        }
        for &w in &adj[v] {
            if !z.contains(&w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    true
}

/// Sum of `p` over every full assignment consistent with `fixed`.
fn mass(p: &JointTable, fixed: &[(usize, usize)]) -> f64 {
    let cards = p.cardinalities();
    let mut digits = vec![0usize; cards.len()];
    let mut total = 0.0;
    'outer: loop {
        if fixed.iter().all(|&(i, v)| digits[i] == v) {
            total += p.prob(&digits);
        }
        for k in (0..cards.len()).rev() {
            digits[k] += 1;
            if digits[k] < cards[k] {
                continue 'outer;
            }
            digits[k] = 0;
        }
        break;
    }
    total
}

fn assignments(cards: &[usize], vars: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..cards[v]).map(move |val| {
                    let mut b = a.clone();
                    b.push((v, val));
                    b
                })
            })
            .collect();
    }
    out
}

/// Largest `|P(x,y|z) − P(x|z)P(y|z)|` over contexts with `P(z) > 0`,
/// computed by summation and division.
pub fn ci_gap_by_division(p: &JointTable, x: &[usize], y: &[usize], z: &[usize]) -> f64 {
    let cards = p.cardinalities();
    let mut worst: f64 = 0.0;
    for zc in assignments(&cards, z) {
        let pz = mass(p, &zc);
        if pz <= 0.0 {
            continue;
        }
        for xa in assignments(&cards, x) {
            let xz: Vec<_> = xa.iter().chain(&zc).copied().collect();
            let px = mass(p, &xz) / pz;
            for ya in assignments(&cards, y) {
                let yz: Vec<_> = ya.iter().chain(&zc).copied().collect();
                let xyz: Vec<_> = xa.iter().chain(&ya).chain(&zc).copied().collect();
                let gap = mass(p, &xyz) / pz - px * mass(p, &yz) / pz;
                worst = worst.max(gap.abs());
            }
        }
    }
    worst
}

/// A random joint over `cards`; with `zeros`, roughly a third of the entries vanish.
pub fn random_joint<R: Rng>(rng: &mut R, cards: &[usize], zeros: bool) -> JointTable {
    let vars: Vec<Variable> = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| Variable {
            name: format!("V{i}"),
            cardinality: c,
        })
        .collect();
    let size: usize = cards.iter().product();
    loop {
        let mut w: Vec<f64> = (0..size)
            .map(|_| {
                if zeros && rng.random_bool(1.0 / 3.0) {
                    0.0
                } else {
                    rng.random::<f64>() + 1e-3
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|v| *v /= total);
            return JointTable::new(vars, w).unwrap();
        }
    }
}

/// All subsets of `items`, in binary-counter order.
pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1usize << items.len())
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// A random no-signalling behavior: a Dirichlet mixture over a random subset
/// of the 24 vertices of the no-signalling polytope (16 deterministic
/// strategies, 8 PR boxes). Sparse subsets keep many samples near faces.
pub fn random_ns_behavior<R: Rng>(rng: &mut R) -> causal_bell::bell::Behavior {
    use causal_bell::bell::{mixture, pr_box_variant, DeterministicStrategy};
    use rand::seq::SliceRandom;
    use rand_distr::Exp1;

    let mut vertices: Vec<causal_bell::bell::Behavior> =
        DeterministicStrategy::all().iter().map(|s| s.behavior()).collect();
    vertices.extend((0..8).map(pr_box_variant));
    vertices.shuffle(rng);
    let k = rng.random_range(1..=vertices.len());
    let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    let parts: Vec<(f64, &causal_bell::bell::Behavior)> =
        draws.iter().map(|d| d / total).zip(&vertices[..k]).collect();
    mixture(&parts).unwrap()
}
