//! Graphical independence criteria.
//!
//! Two criteria are provided: classical d-separation and q-separation for
//! networks whose nodes are typed as settings and outcomes. Both are defined
//! over simple undirected paths; [`enumerate_paths`] together with the
//! per-path predicates is the reference oracle, while [`d_separated`] uses a
//! linear-time reachability sweep over `(node, direction)` states.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::graph::{CondQuery, Dag, GraphError, NodeId, NodeKind, NodeSet, ResolvedQuery};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("path endpoints must differ")]
    SameEndpoints,
    #[error("q-separation is undefined for latent node `{0}`")]
    LatentEndpoint(String),
    #[error("graph has {found} setting/outcome nodes; criteria comparison is capped at {cap}")]
    TooLarge { found: usize, cap: usize },
}

/// Direction of one path step relative to the graph edge it traverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// `u -> v`: the edge points along the path.
    Forward,
    /// `u <- v`: the edge points against the path.
    Backward,
}

/// A simple path in the skeleton of a DAG, remembering each edge's orientation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UndirectedPath {
    nodes: Vec<NodeId>,
    steps: Vec<Step>,
}

impl UndirectedPath {
    /// Builds a path, checking that it is simple and that every step follows
    /// an actual edge of `g` in the recorded direction.
    pub fn new(g: &Dag, nodes: Vec<NodeId>, steps: Vec<Step>) -> Option<Self> {
        if nodes.len() < 2 || steps.len() + 1 != nodes.len() {
            return None;
        }
        let mut seen = NodeSet::new();
        if !nodes.iter().all(|&v| v < g.len() && seen.insert(v)) {
            return None;
        }
        let edges_ok = nodes.windows(2).zip(&steps).all(|(w, s)| match s {
            Step::Forward => g.has_edge(w[0], w[1]),
            Step::Backward => g.has_edge(w[1], w[0]),
        });
        edges_ok.then_some(Self { nodes, steps })
    }

    /// Parses the arrow notation produced by [`UndirectedPath::render`], e.g. `X -> A <- Λ`.
    pub fn parse(g: &Dag, text: &str) -> Option<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len().is_multiple_of(2) {
            return None;
        }
        let mut nodes = Vec::new();
        let mut steps = Vec::new();
        for (i, tok) in tokens.iter().enumerate() {
            if i % 2 == 0 {
                nodes.push(g.id(tok).ok()?);
            } else {
                steps.push(match *tok {
                    "->" => Step::Forward,
                    "<-" => Step::Backward,
                    _ => return None,
                });
            }
        }
        Self::new(g, nodes, steps)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        self.nodes[self.nodes.len() - 1]
    }

    /// Interior nodes with whether each is a collider (`i -> m <- j`) on this path.
    pub fn interior(&self) -> impl Iterator<Item = (NodeId, bool)> + '_ {
        (1..self.nodes.len() - 1).map(move |i| {
            let collider = self.steps[i - 1] == Step::Forward && self.steps[i] == Step::Backward;
            (self.nodes[i], collider)
        })
    }

    pub fn render(&self, g: &Dag) -> String {
        let mut out = g.name(self.nodes[0]).to_string();
        for (step, &v) in self.steps.iter().zip(&self.nodes[1..]) {
            out.push_str(match step {
                Step::Forward => " -> ",
                Step::Backward => " <- ",
            });
            out.push_str(g.name(v));
        }
        out
    }
}

/// Result of a separation query; `witness` is an active path iff not separated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationVerdict {
    pub separated: bool,
    pub witness: Option<UndirectedPath>,
}

impl SeparationVerdict {
    fn separated() -> Self {
        Self {
            separated: true,
            witness: None,
        }
    }

    fn active(path: UndirectedPath) -> Self {
        Self {
            separated: false,
            witness: Some(path),
        }
    }

    pub fn render(&self, g: &Dag) -> String {
        match &self.witness {
            None => "separated".to_string(),
            Some(p) => format!("not separated: witness {}", p.render(g)),
        }
    }
}

/// All simple undirected paths between `u` and `v`.
///
/// Order is deterministic: a depth-first search visiting, at each node,
/// children before parents, each in declaration order.
pub fn enumerate_paths(g: &Dag, u: &str, v: &str) -> Result<Vec<UndirectedPath>, SeparationError> {
    let (u, v) = (g.id(u)?, g.id(v)?);
    if u == v {
        return Err(SeparationError::SameEndpoints);
    }
    Ok(paths_between(g, u, v))
}

pub(crate) fn paths_between(g: &Dag, u: NodeId, v: NodeId) -> Vec<UndirectedPath> {
    let mut out = Vec::new();
    let mut on_path = vec![false; g.len()];
    let mut nodes = vec![u];
    let mut steps = Vec::new();
    on_path[u] = true;
    dfs_paths(g, v, &mut on_path, &mut nodes, &mut steps, &mut out);
    out
}

fn neighbours(g: &Dag, cur: NodeId) -> impl Iterator<Item = (NodeId, Step)> + '_ {
    let down = g.child_ids(cur).iter().map(|&c| (c, Step::Forward));
    let up = g.parent_ids(cur).iter().map(|&p| (p, Step::Backward));
    down.chain(up)
}

fn dfs_paths(
    g: &Dag,
    target: NodeId,
    on_path: &mut [bool],
    nodes: &mut Vec<NodeId>,
    steps: &mut Vec<Step>,
    out: &mut Vec<UndirectedPath>,
) {
    let cur = *nodes.last().expect("path is never empty");
    for (next, step) in neighbours(g, cur) {
        if on_path[next] {
            continue;
        }
        nodes.push(next);
        steps.push(step);
        if next == target {
            out.push(UndirectedPath {
                nodes: nodes.clone(),
                steps: steps.clone(),
            });
        } else {
            on_path[next] = true;
            dfs_paths(g, target, on_path, nodes, steps, out);
            on_path[next] = false;
        }
        nodes.pop();
        steps.pop();
    }
}

/// Whether `z` d-blocks `p`: some non-collider on `p` lies in `z`, or some
/// collider is outside `z` with no directed path into `z`.
pub fn path_d_blocked(g: &Dag, p: &UndirectedPath, z: &NodeSet) -> bool {
    p.interior().any(|(m, collider)| {
        if collider {
            !z.contains(&m) && !g.reaches_any(m, z)
        } else {
            z.contains(&m)
        }
    })
}

/// Path-enumeration reference for d-separation.
pub fn d_separated_oracle(g: &Dag, q: &CondQuery) -> Result<SeparationVerdict, SeparationError> {
    let r = q.resolve(g)?;
    for &x in &r.x {
        for &y in &r.y {
            if let Some(p) = paths_between(g, x, y)
                .into_iter()
                .find(|p| !path_d_blocked(g, p, &r.z))
            {
                return Ok(SeparationVerdict::active(p));
            }
        }
    }
    Ok(SeparationVerdict::separated())
}

/// d-separation by a reachability sweep over `(node, direction)` states.
pub fn d_separated(g: &Dag, q: &CondQuery) -> Result<SeparationVerdict, SeparationError> {
    let r = q.resolve(g)?;
    Ok(d_separated_resolved(g, &r))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Travel {
    /// Arrived from a child.
    Up,
    /// Arrived from a parent.
    Down,
}

pub(crate) fn d_separated_resolved(g: &Dag, r: &ResolvedQuery) -> SeparationVerdict {
    let n = g.len();
    // Nodes in Z or with a descendant in Z: colliders here are open.
    let mut opens_collider = vec![false; n];
    let mut stack: Vec<NodeId> = r.z.iter().copied().collect();
    while let Some(v) = stack.pop() {
        if !opens_collider[v] {
            opens_collider[v] = true;
            stack.extend(g.parent_ids(v).iter().copied());
        }
    }

    let state = |v: NodeId, t: Travel| 2 * v + (t == Travel::Down) as usize;
    let mut pred: Vec<Option<usize>> = vec![None; 2 * n];
    let mut visited = vec![false; 2 * n];
    let mut queue = VecDeque::new();
    for &x in &r.x {
        visited[state(x, Travel::Up)] = true;
        queue.push_back((x, Travel::Up));
    }
    while let Some((v, t)) = queue.pop_front() {
        let here = state(v, t);
        if r.y.contains(&v) {
            return SeparationVerdict::active(witness_path(g, r, here, &pred));
        }
        let in_z = r.z.contains(&v);
        let mut push = |w: NodeId, tw: Travel, queue: &mut VecDeque<(NodeId, Travel)>| {
            let s = state(w, tw);
            if !visited[s] {
                visited[s] = true;
                pred[s] = Some(here);
                queue.push_back((w, tw));
            }
        };
        match t {
            Travel::Up if !in_z => {
                for &p in g.parent_ids(v) {
                    push(p, Travel::Up, &mut queue);
                }
                for &c in g.child_ids(v) {
                    push(c, Travel::Down, &mut queue);
                }
            }
            Travel::Up => {}
            Travel::Down => {
                if !in_z {
                    for &c in g.child_ids(v) {
                        push(c, Travel::Down, &mut queue);
                    }
                }
                if opens_collider[v] {
                    for &p in g.parent_ids(v) {
                        push(p, Travel::Up, &mut queue);
                    }
                }
            }
        }
    }
    SeparationVerdict::separated()
}

/// Rebuilds the trail found by the sweep; a trail that revisits a node is
/// replaced by a simple active path found by pruned search.
fn witness_path(g: &Dag, r: &ResolvedQuery, end: usize, pred: &[Option<usize>]) -> UndirectedPath {
    let mut states = vec![end];
    let mut cur = end;
    while let Some(p) = pred[cur] {
        states.push(p);
        cur = p;
    }
    states.reverse();
    let nodes: Vec<NodeId> = states.iter().map(|s| s / 2).collect();
    // Entering a node "down" means we came from its parent along a forward edge.
    let steps: Vec<Step> = states[1..]
        .iter()
        .map(|s| if s % 2 == 1 { Step::Forward } else { Step::Backward })
        .collect();
    if let Some(p) = UndirectedPath::new(g, nodes, steps) {
        if !path_d_blocked(g, &p, &r.z) {
            return p;
        }
    }
    first_active_path(g, r, |p| !path_d_blocked(g, p, &r.z))
        .expect("sweep found an active trail, so an active simple path exists")
}

/// Depth-first search for a simple path from X to Y, pruning prefixes whose
/// interior already contains a node blocked under d-separation.
fn first_active_path(
    g: &Dag,
    r: &ResolvedQuery,
    accept: impl Fn(&UndirectedPath) -> bool,
) -> Option<UndirectedPath> {
    for &x in &r.x {
        for &y in &r.y {
            let mut on_path = vec![false; g.len()];
            on_path[x] = true;
            let mut nodes = vec![x];
            let mut steps = Vec::new();
            if let Some(p) = pruned_dfs(g, r, y, &mut on_path, &mut nodes, &mut steps, &accept) {
                return Some(p);
            }
        }
    }
    None
}

fn pruned_dfs(
    g: &Dag,
    r: &ResolvedQuery,
    target: NodeId,
    on_path: &mut [bool],
    nodes: &mut Vec<NodeId>,
    steps: &mut Vec<Step>,
    accept: &impl Fn(&UndirectedPath) -> bool,
) -> Option<UndirectedPath> {
    let cur = *nodes.last().expect("nonempty");
    for (next, step) in neighbours(g, cur) {
        if on_path[next] {
            continue;
        }
        if let Some(&prev) = steps.last() {
            let collider = prev == Step::Forward && step == Step::Backward;
            let in_z = r.z.contains(&cur);
            let blocked = if collider {
                !in_z && !g.reaches_any(cur, &r.z)
            } else {
                in_z
            };
            if blocked {
                continue;
            }
        }
        nodes.push(next);
        steps.push(step);
        let found = if next == target {
            let p = UndirectedPath {
                nodes: nodes.clone(),
                steps: steps.clone(),
            };
            accept(&p).then_some(p)
        } else {
            on_path[next] = true;
            let f = pruned_dfs(g, r, target, on_path, nodes, steps, accept);
            on_path[next] = false;
            f
        };
        nodes.pop();
        steps.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Whether `z` renders `p` inactive under q-separation. Only members of `z`
/// whose kind is outcome participate in any clause.
///
/// 1. both endpoints are settings and at least one has no directed path to an outcome in `z`;
/// 2. one endpoint is a setting `s`, the other an outcome `o`, and `s` has no
///    directed path to `o` nor to any outcome in `z`;
/// 3. some collider `m` on `p` is not an outcome in `z` and has no directed
///    path to an outcome in `z`.
pub fn path_q_inactive(g: &Dag, p: &UndirectedPath, z: &NodeSet) -> Result<bool, SeparationError> {
    let (a, b) = (p.first(), p.last());
    for v in [a, b] {
        if g.kind(v) == NodeKind::Latent {
            return Err(SeparationError::LatentEndpoint(g.name(v).to_string()));
        }
    }
    let z_out: NodeSet = z
        .iter()
        .copied()
        .filter(|&v| g.kind(v) == NodeKind::Outcome)
        .collect();
    Ok(q_clauses(g, p, &z_out).is_some())
}

/// Index (1-based) of the first q-separation clause that fires, if any.
fn q_clauses(g: &Dag, p: &UndirectedPath, z_out: &NodeSet) -> Option<u8> {
    let (a, b) = (p.first(), p.last());
    match (g.kind(a), g.kind(b)) {
        (NodeKind::Setting, NodeKind::Setting) => {
            if !g.reaches_any(a, z_out) || !g.reaches_any(b, z_out) {
                return Some(1);
            }
        }
        (NodeKind::Setting, NodeKind::Outcome) | (NodeKind::Outcome, NodeKind::Setting) => {
            let (s, o) = if g.kind(a) == NodeKind::Setting { (a, b) } else { (b, a) };
            if !g.descendant_ids(s).contains(&o) && !g.reaches_any(s, z_out) {
                return Some(2);
            }
        }
        _ => {}
    }
    let collider_closed = p
        .interior()
        .any(|(m, collider)| collider && !z_out.contains(&m) && !g.reaches_any(m, z_out));
    collider_closed.then_some(3)
}

/// q-separation by exhaustive path enumeration.
///
/// X and Y may hold only settings and outcomes; Z may hold any node, though
/// only its outcomes take part in the clauses.
pub fn q_separated(g: &Dag, q: &CondQuery) -> Result<SeparationVerdict, SeparationError> {
    let r = q.resolve(g)?;
    for &v in r.x.iter().chain(&r.y) {
        if g.kind(v) == NodeKind::Latent {
            return Err(SeparationError::LatentEndpoint(g.name(v).to_string()));
        }
    }
    let z_out: NodeSet = r
        .z
        .iter()
        .copied()
        .filter(|&v| g.kind(v) == NodeKind::Outcome)
        .collect();
    for &x in &r.x {
        for &y in &r.y {
            if let Some(p) = paths_between(g, x, y)
                .into_iter()
                .find(|p| q_clauses(g, p, &z_out).is_none())
            {
                return Ok(SeparationVerdict::active(p));
            }
        }
    }
    Ok(SeparationVerdict::separated())
}

/// Cap on setting/outcome nodes for [`compare_criteria`].
pub const COMPARE_OBSERVED_CAP: usize = 12;
/// Cap on the total node count for [`compare_criteria`].
pub const COMPARE_TOTAL_CAP: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriteriaRow {
    pub x: String,
    pub y: String,
    pub z: Vec<String>,
    pub d_separated: bool,
    pub q_separated: bool,
}

impl CriteriaRow {
    pub fn disagree(&self) -> bool {
        self.d_separated != self.q_separated
    }
}

/// d- versus q-separation over every singleton pair of setting/outcome nodes
/// and every conditioning subset of the remaining nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriteriaReport {
    pub rows: Vec<CriteriaRow>,
}

impl CriteriaReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &CriteriaRow> {
        self.rows.iter().filter(|r| r.disagree())
    }

    pub fn find(&self, x: &str, y: &str, z: &[&str]) -> Option<&CriteriaRow> {
        self.rows.iter().find(|r| {
            let same_pair = (r.x == x && r.y == y) || (r.x == y && r.y == x);
            same_pair && r.z.len() == z.len() && z.iter().all(|n| r.z.iter().any(|m| m == n))
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("X,Y,Z,d_sep,q_sep,disagree\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.x,
                r.y,
                r.z.join(" "),
                r.d_separated,
                r.q_separated,
                r.disagree()
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let zs: Vec<String> = self
            .rows
            .iter()
            .map(|r| if r.z.is_empty() { "∅".to_string() } else { r.z.join(",") })
            .collect();
        let w = |it: &mut dyn Iterator<Item = usize>, min: usize| it.max().unwrap_or(0).max(min);
        let wx = w(&mut self.rows.iter().map(|r| r.x.chars().count()), 1);
        let wy = w(&mut self.rows.iter().map(|r| r.y.chars().count()), 1);
        let wz = w(&mut zs.iter().map(|z| z.chars().count()), 1);
        let pad = |s: &str, width: usize| {
            let n = s.chars().count();
            format!("{s}{}", " ".repeat(width.saturating_sub(n)))
        };
        let mut out = format!(
            "{}  {}  {}  d_sep  q_sep  disagree\n",
            pad("X", wx),
            pad("Y", wy),
            pad("Z", wz)
        );
        for (r, z) in self.rows.iter().zip(&zs) {
            out.push_str(&format!(
                "{}  {}  {}  {}  {}  {}\n",
                pad(&r.x, wx),
                pad(&r.y, wy),
                pad(z, wz),
                pad(if r.d_separated { "yes" } else { "no" }, 5),
                pad(if r.q_separated { "yes" } else { "no" }, 5),
                if r.disagree() { "YES" } else { "no" }
            ));
        }
        out
    }
}

pub fn compare_criteria(g: &Dag) -> Result<CriteriaReport, SeparationError> {
    let observed: Vec<NodeId> = (0..g.len())
        .filter(|&v| g.kind(v) != NodeKind::Latent)
        .collect();
    if observed.len() > COMPARE_OBSERVED_CAP {
        return Err(SeparationError::TooLarge {
            found: observed.len(),
            cap: COMPARE_OBSERVED_CAP,
        });
    }
    if g.len() > COMPARE_TOTAL_CAP {
        return Err(SeparationError::TooLarge {
            found: g.len(),
            cap: COMPARE_TOTAL_CAP,
        });
    }
    let mut rows = Vec::new();
    for (i, &x) in observed.iter().enumerate() {
        for &y in &observed[i + 1..] {
            let rest: Vec<NodeId> = (0..g.len()).filter(|&v| v != x && v != y).collect();
            for mask in 0u32..(1 << rest.len()) {
                let z: NodeSet = rest
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                let q = CondQuery {
                    x: vec![g.name(x).to_string()],
                    y: vec![g.name(y).to_string()],
                    z: g.names(&z),
                };
                rows.push(CriteriaRow {
                    d_separated: d_separated(g, &q)?.separated,
                    q_separated: q_separated(g, &q)?.separated,
                    x: q.x[0].clone(),
                    y: q.y[0].clone(),
                    z: q.z,
                });
            }
        }
    }
    Ok(CriteriaReport { rows })
}

impl fmt::Display for CriteriaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_dag;

    fn bell() -> Dag {
        parse_dag(
            "node X setting 2\nnode Y setting 2\nnode A outcome 2\nnode B outcome 2\n\
             node Λ latent 16\nedge X -> A\nedge Λ -> A\nedge Λ -> B\nedge Y -> B\n",
        )
        .unwrap()
    }

    fn set(g: &Dag, names: &[&str]) -> NodeSet {
        g.ids(names).unwrap()
    }

    fn path(g: &Dag, s: &str) -> UndirectedPath {
        UndirectedPath::parse(g, s).unwrap()
    }

    fn q(x: &str, y: &str, z: &[&str]) -> CondQuery {
        CondQuery::new(&[x], &[y], z)
    }

    #[test]
    fn enumerates_bell_paths() {
        let g = bell();
        let xy = enumerate_paths(&g, "X", "Y").unwrap();
        assert_eq!(xy.len(), 1);
        assert_eq!(xy[0].render(&g), "X -> A <- Λ -> B <- Y");
        let ab = enumerate_paths(&g, "A", "B").unwrap();
        assert_eq!(ab.len(), 1);
        assert_eq!(ab[0].render(&g), "A <- Λ -> B");
        let iso = parse_dag("node P 2\nnode Q 2\n").unwrap();
        assert!(enumerate_paths(&iso, "P", "Q").unwrap().is_empty());
        assert_eq!(enumerate_paths(&g, "X", "X"), Err(SeparationError::SameEndpoints));
        assert!(enumerate_paths(&g, "X", "W").is_err());
    }

    #[test]
    fn path_parse_rejects_non_edges() {
        let g = bell();
        assert!(UndirectedPath::parse(&g, "X <- A").is_none());
        assert!(UndirectedPath::parse(&g, "X -> A -> X").is_none());
        assert!(UndirectedPath::parse(&g, "X").is_none());
    }

    #[test]
    fn d_blocking_clauses() {
        let g = bell();
        assert!(path_d_blocked(&g, &path(&g, "A <- Λ -> B"), &set(&g, &["Λ"])));
        let long = path(&g, "X -> A <- Λ -> B <- Y");
        assert!(path_d_blocked(&g, &long, &NodeSet::new()));
        assert!(!path_d_blocked(&g, &long, &set(&g, &["A", "B"])));
    }

    #[test]
    fn collider_opened_by_descendant() {
        let g = parse_dag("node P 2\nnode Q 2\nnode M 2\nnode D 2\nedge P -> M\nedge Q -> M\nedge M -> D\n")
            .unwrap();
        let p = path(&g, "P -> M <- Q");
        assert!(path_d_blocked(&g, &p, &NodeSet::new()));
        assert!(!path_d_blocked(&g, &p, &set(&g, &["D"])));
        let v = d_separated(&g, &q("P", "Q", &["D"])).unwrap();
        assert!(!v.separated);
    }

    #[test]
    fn bell_d_separation() {
        let g = bell();
        assert!(d_separated(&g, &q("X", "Y", &[])).unwrap().separated);
        assert!(d_separated(&g, &q("A", "B", &["Λ"])).unwrap().separated);
        let v = d_separated(&g, &q("X", "Y", &["A", "B"])).unwrap();
        assert!(!v.separated);
        assert_eq!(v.witness.unwrap().render(&g), "X -> A <- Λ -> B <- Y");
        assert!(matches!(
            d_separated(&g, &q("X", "X", &[])),
            Err(SeparationError::Graph(GraphError::InvalidQuery(_)))
        ));
    }

    #[test]
    fn latent_queries_allowed_classically() {
        let g = bell();
        assert!(!d_separated(&g, &q("Λ", "A", &[])).unwrap().separated);
        assert!(d_separated(&g, &q("Λ", "X", &[])).unwrap().separated);
    }

    #[test]
    fn q_inactivity_clauses() {
        let g = bell();
        let empty = NodeSet::new();
        assert!(path_q_inactive(&g, &path(&g, "X -> A <- Λ -> B <- Y"), &empty).unwrap());
        assert!(!path_q_inactive(&g, &path(&g, "A <- Λ -> B"), &empty).unwrap());
        assert!(!path_q_inactive(&g, &path(&g, "X -> A"), &empty).unwrap());
        assert!(matches!(
            path_q_inactive(&g, &path(&g, "Λ -> A"), &empty),
            Err(SeparationError::LatentEndpoint(_))
        ));
    }

    #[test]
    fn q_clause_one_needs_both_settings_to_reach_z() {
        let g = bell();
        let long = path(&g, "X -> A <- Λ -> B <- Y");
        // Only X reaches an outcome in Z; Y does not, so (i) still fires.
        assert!(path_q_inactive(&g, &long, &set(&g, &["A"])).unwrap());
        // Both reach; colliders A and B are outcomes in Z; nothing fires.
        assert!(!path_q_inactive(&g, &long, &set(&g, &["A", "B"])).unwrap());
    }

    #[test]
    fn bell_q_separation() {
        let g = bell();
        assert!(q_separated(&g, &q("X", "Y", &[])).unwrap().separated);
        let ab = q_separated(&g, &q("A", "B", &[])).unwrap();
        assert!(!ab.separated);
        assert_eq!(ab.witness.unwrap().render(&g), "A <- Λ -> B");
        assert!(q_separated(&g, &q("A", "Y", &[])).unwrap().separated);
        // Latent conditioning nodes are ignored rather than screening.
        assert!(!q_separated(&g, &q("A", "B", &["Λ"])).unwrap().separated);
        assert!(matches!(
            q_separated(&g, &q("Λ", "A", &[])),
            Err(SeparationError::LatentEndpoint(_))
        ));
    }

    #[test]
    fn compare_flags_latent_screening() {
        let g = bell();
        let report = compare_criteria(&g).unwrap();
        let ab = report.find("A", "B", &[]).unwrap();
        assert!(!ab.d_separated && !ab.q_separated && !ab.disagree());
        let ab_l = report.find("A", "B", &["Λ"]).unwrap();
        assert!(ab_l.d_separated && !ab_l.q_separated && ab_l.disagree());
        // 6 pairs, 3 remaining nodes each.
        assert_eq!(report.rows.len(), 6 * 8);
        assert!(report.to_csv().starts_with("X,Y,Z,d_sep,q_sep,disagree\n"));
        assert!(report.to_table().contains("YES"));
    }

    #[test]
    fn compare_small_graphs() {
        let g = parse_dag("node X setting 2\nnode A outcome 2\nedge X -> A\n").unwrap();
        let report = compare_criteria(&g).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.disagreements().count(), 0);
        let g = parse_dag("node X setting 2\nnode Y setting 2\n").unwrap();
        let report = compare_criteria(&g).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].d_separated && report.rows[0].q_separated);
    }

    #[test]
    fn compare_rejects_large_graphs() {
        let text: String = (0..13).map(|i| format!("node N{i} 2\n")).collect();
        let g = parse_dag(&text).unwrap();
        assert!(matches!(
            compare_criteria(&g),
            Err(SeparationError::TooLarge { found: 13, cap: 12 })
        ));
    }

    #[test]
    fn witness_reconstruction_survives_revisits() {
        // The sweep can reach Y via a trail that bounces through the collider
        // region; any witness must be simple and active.
        let g = parse_dag(
            "node P 2\nnode Q 2\nnode M 2\nnode D 2\nnode Y 2\n\
             edge P -> M\nedge Q -> M\nedge M -> D\nedge Q -> Y\n",
        )
        .unwrap();
        let v = d_separated(&g, &q("P", "Y", &["D"])).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.render(&g), "P -> M <- Q -> Y");
        assert!(!path_d_blocked(&g, &w, &set(&g, &["D"])));
    }
}
