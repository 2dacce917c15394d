mod common;

use causal_bell::graph::{all_dags, CondQuery, Dag, NodeKind, NodeSet};
use causal_bell::separation::{
    compare_criteria, d_separated, d_separated_oracle, enumerate_paths, path_d_blocked,
    path_q_inactive, q_separated, SeparationError, UndirectedPath,
};
use common::{arb_dag, moral_d_separated, subsets};
use proptest::prelude::*;

/// Splits the nodes of `g` into X, Y, Z by `roles` (0, 1, 2; anything else is unused).
fn query_from_roles(g: &Dag, roles: &[u8]) -> Option<(CondQuery, [NodeSet; 3])> {
    let mut sets: [NodeSet; 3] = Default::default();
    for (v, &role) in roles.iter().enumerate().take(g.len()) {
        if let Some(s) = sets.get_mut(role as usize) {
            s.insert(v);
        }
    }
    if sets[0].is_empty() || sets[1].is_empty() {
        return None;
    }
    let names = |s: &NodeSet| g.names(s);
    let q = CondQuery::new(&names(&sets[0]), &names(&sets[1]), &names(&sets[2]));
    Some((q, sets))
}

fn check_witness(g: &Dag, path: &UndirectedPath, sets: &[NodeSet; 3]) -> Result<(), TestCaseError> {
    let nodes = path.nodes();
    prop_assert!(nodes.len() >= 2);
    prop_assert!(sets[0].contains(&path.first()) && sets[1].contains(&path.last()));
    let rebuilt = UndirectedPath::new(g, nodes.to_vec(), path.steps().to_vec());
    prop_assert!(rebuilt.is_some(), "witness is not a simple path of the graph");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn sweep_matches_path_oracle_and_moral_graph(
        g in arb_dag(7, 2, true),
        roles in proptest::collection::vec(0u8..4, 7),
    ) {
        let Some((q, sets)) = query_from_roles(&g, &roles) else { return Ok(()) };
        let fast = d_separated(&g, &q).unwrap();
        let slow = d_separated_oracle(&g, &q).unwrap();
        prop_assert_eq!(fast.separated, slow.separated, "{}", q);
        prop_assert_eq!(fast.separated, moral_d_separated(&g, &sets[0], &sets[1], &sets[2]), "{}", q);
        prop_assert_eq!(fast.separated, d_separated(&g, &q.swapped()).unwrap().separated);
        prop_assert_eq!(fast.witness.is_none(), fast.separated);
        if let Some(w) = &fast.witness {
            check_witness(&g, w, &sets)?;
            prop_assert!(!path_d_blocked(&g, w, &sets[2]));
        }
    }

    #[test]
    fn q_separation_is_symmetric_with_valid_witnesses(
        g in arb_dag(6, 2, true),
        roles in proptest::collection::vec(0u8..4, 6),
    ) {
        let Some((q, sets)) = query_from_roles(&g, &roles) else { return Ok(()) };
        let latent_endpoint = sets[0].iter().chain(&sets[1]).any(|&v| g.kind(v) == NodeKind::Latent);
        let v = q_separated(&g, &q);
        if latent_endpoint {
            prop_assert!(matches!(v, Err(SeparationError::LatentEndpoint(_))));
            return Ok(());
        }
        let v = v.unwrap();
        prop_assert_eq!(v.separated, q_separated(&g, &q.swapped()).unwrap().separated, "{}", q);
        prop_assert_eq!(v.witness.is_none(), v.separated);
        if let Some(w) = &v.witness {
            check_witness(&g, w, &sets)?;
            prop_assert!(!path_q_inactive(&g, w, &sets[2]).unwrap());
        }
        // Members of Z that are not outcomes never matter.
        let outcome_z: NodeSet = sets[2].iter().copied().filter(|&z| g.kind(z) == NodeKind::Outcome).collect();
        let q2 = CondQuery::new(&g.names(&sets[0]), &g.names(&sets[1]), &g.names(&outcome_z));
        prop_assert_eq!(v.separated, q_separated(&g, &q2).unwrap().separated);
    }
}

/// Oracle equivalence on every labelled DAG with up to four nodes, every
/// ordered singleton pair and every conditioning subset. The five-node sweep
/// runs in the acceptance suite.
#[test]
fn exhaustive_oracle_equivalence_up_to_four_nodes() {
    let mut checked = 0usize;
    for n in 2..=4 {
        for g in all_dags(n) {
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                    for z in subsets(&rest) {
                        let zs: NodeSet = z.iter().copied().collect();
                        let q = CondQuery::new(&[g.name(x).to_string()], &[g.name(y).to_string()], &g.names(&zs));
                        let fast = d_separated(&g, &q).unwrap().separated;
                        assert_eq!(fast, d_separated_oracle(&g, &q).unwrap().separated, "{q} on\n{}", g.to_text());
                        checked += 1;
                    }
                }
            }
        }
    }
    assert_eq!(checked, 3 * 2 + 25 * 6 * 2 + 543 * 12 * 4);
}

fn d_collider_clause(g: &Dag, p: &UndirectedPath, z: &NodeSet) -> bool {
    p.interior().any(|(m, collider)| collider && !z.contains(&m) && !g.reaches_any(m, z))
}

/// On all-outcome graphs clauses (i) and (ii) of q-separation never fire, so
/// a path is q-inactive exactly when d-separation's collider clause blocks
/// it. The criteria can then only differ through d-separation's
/// chain/fork clause, which makes q-separation the stronger requirement and
/// the two coincide when nothing is conditioned on.
#[test]
fn all_outcome_graphs_agree_on_the_collider_clause() {
    for n in 2..=4 {
        for g in all_dags(n) {
            for x in 0..n {
                for y in x + 1..n {
                    let paths = enumerate_paths(&g, g.name(x), g.name(y)).unwrap();
                    let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                    for z in subsets(&rest) {
                        let zs: NodeSet = z.iter().copied().collect();
                        for p in &paths {
                            assert_eq!(path_q_inactive(&g, p, &zs).unwrap(), d_collider_clause(&g, p, &zs));
                        }
                        let q = CondQuery::new(&[g.name(x).to_string()], &[g.name(y).to_string()], &g.names(&zs));
                        let d = d_separated(&g, &q).unwrap().separated;
                        let qs = q_separated(&g, &q).unwrap().separated;
                        assert!(!qs || d, "{q} q-separated but not d-separated");
                        if zs.is_empty() {
                            assert_eq!(d, qs, "{q}");
                        }
                    }
                }
            }
        }
    }
}

fn bell() -> Dag {
    causal_bell::bell::bell_dag()
}

#[test]
fn bell_paths() {
    let g = bell();
    let xy = enumerate_paths(&g, "X", "Y").unwrap();
    assert_eq!(xy.len(), 1);
    assert_eq!(xy[0].render(&g), "X -> A <- Λ -> B <- Y");
    let ab = enumerate_paths(&g, "A", "B").unwrap();
    assert_eq!(ab.len(), 1);
    assert_eq!(ab[0].render(&g), "A <- Λ -> B");
    let iso = causal_bell::graph::parse_dag("node P 2\nnode Q 2\n").unwrap();
    assert!(enumerate_paths(&iso, "P", "Q").unwrap().is_empty());
}

#[test]
fn bell_path_predicates() {
    let g = bell();
    let set = |names: &[&str]| g.ids(names).unwrap();
    let fork = UndirectedPath::parse(&g, "A <- Λ -> B").unwrap();
    let long = UndirectedPath::parse(&g, "X -> A <- Λ -> B <- Y").unwrap();
    let direct = UndirectedPath::parse(&g, "X -> A").unwrap();
    assert!(path_d_blocked(&g, &fork, &set(&["Λ"])));
    assert!(path_d_blocked(&g, &long, &set(&[])));
    assert!(!path_d_blocked(&g, &long, &set(&["A", "B"])));
    assert!(path_q_inactive(&g, &long, &set(&[])).unwrap());
    assert!(!path_q_inactive(&g, &fork, &set(&[])).unwrap());
    assert!(!path_q_inactive(&g, &direct, &set(&[])).unwrap());
}

#[test]
fn bell_separation_examples() {
    let g = bell();
    let d = |x: &str, y: &str, z: &[&str]| d_separated(&g, &CondQuery::new(&[x], &[y], z)).unwrap();
    let q = |x: &str, y: &str, z: &[&str]| q_separated(&g, &CondQuery::new(&[x], &[y], z)).unwrap();
    assert!(d("X", "Y", &[]).separated);
    assert!(d("A", "B", &["Λ"]).separated);
    let v = d("X", "Y", &["A", "B"]);
    assert_eq!(v.witness.unwrap().render(&g), "X -> A <- Λ -> B <- Y");
    assert!(q("X", "Y", &[]).separated);
    assert_eq!(q("A", "B", &[]).witness.unwrap().render(&g), "A <- Λ -> B");
    assert!(q("A", "Y", &[]).separated);
    assert!(matches!(
        q_separated(&g, &CondQuery::new(&["Λ"], &["A"], &[])),
        Err(SeparationError::LatentEndpoint(_))
    ));
}

#[test]
fn compare_examples() {
    let report = compare_criteria(&bell()).unwrap();
    let row = report.find("A", "B", &["Λ"]).unwrap();
    assert!(row.d_separated && !row.q_separated && row.disagree());
    let row = report.find("A", "B", &[]).unwrap();
    assert!(!row.d_separated && !row.q_separated && !row.disagree());

    let g = causal_bell::graph::parse_dag("node X setting 2\nnode A outcome 2\nedge X -> A\n").unwrap();
    assert_eq!(compare_criteria(&g).unwrap().disagreements().count(), 0);
    let g = causal_bell::graph::parse_dag("node X setting 2\nnode Y setting 2\n").unwrap();
    let r = compare_criteria(&g).unwrap();
    let row = r.find("X", "Y", &[]).unwrap();
    assert!(row.d_separated && row.q_separated);
}
