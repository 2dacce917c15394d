//! Typed causal DAGs: nodes carry a kind and a finite cardinality.
//!
//! A [`Dag`] is immutable once built. Every node is addressed by a
//! [`NodeId`], which is its position in declaration order; all set-valued
//! queries return [`NodeSet`]s, so iteration is always in declaration order.

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Index of a node in declaration order.
pub type NodeId = usize;

/// Ordered set of node ids (declaration order).
pub type NodeSet = BTreeSet<NodeId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0} -> {1}`")]
    DuplicateEdge(String, String),
    #[error("edge `{0} -> {1}` points into latent node `{1}`")]
    EdgeIntoLatent(String, String),
    #[error("node `{0}` must have cardinality >= 1")]
    ZeroCardinality(String),
    #[error("cycle detected: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
}

impl GraphError {
    /// The underlying error with any line annotation stripped.
    pub fn root(&self) -> &GraphError {
        match self {
            GraphError::AtLine { source, .. } => source.root(),
            other => other,
        }
    }

    fn at_line(self, line: usize) -> GraphError {
        match self {
            e @ (GraphError::Syntax { .. } | GraphError::AtLine { .. }) => e,
            e => GraphError::AtLine {
                line,
                source: Box::new(e),
            },
        }
    }
}

/// The role a variable plays in a causal network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    /// A freely chosen, controllable variable.
    Setting,
    /// An observed but not directly controllable variable.
    Outcome,
    /// An unobserved exogenous cause.
    Latent,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Setting => "setting",
            NodeKind::Outcome => "outcome",
            NodeKind::Latent => "latent",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "setting" => Ok(NodeKind::Setting),
            "outcome" => Ok(NodeKind::Outcome),
            "latent" => Ok(NodeKind::Latent),
            other => Err(format!("unknown node kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub cardinality: usize,
}

/// Incremental, validating constructor for [`Dag`].
#[derive(Debug, Default, Clone)]
pub struct DagBuilder {
    nodes: Vec<Node>,
    index: HashMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(
        &mut self,
        name: &str,
        kind: NodeKind,
        cardinality: usize,
    ) -> Result<&mut Self, GraphError> {
        if self.index.contains_key(name) {
            return Err(GraphError::DuplicateNode(name.to_string()));
        }
        if cardinality == 0 {
            return Err(GraphError::ZeroCardinality(name.to_string()));
        }
        self.index.insert(name.to_string(), self.nodes.len());
        self.nodes.push(Node {
            name: name.to_string(),
            kind,
            cardinality,
        });
        Ok(self)
    }

    pub fn edge(&mut self, tail: &str, head: &str) -> Result<&mut Self, GraphError> {
        let t = *self
            .index
            .get(tail)
            .ok_or_else(|| GraphError::UnknownNode(tail.to_string()))?;
        let h = *self
            .index
            .get(head)
            .ok_or_else(|| GraphError::UnknownNode(head.to_string()))?;
        if t == h {
            return Err(GraphError::SelfLoop(tail.to_string()));
        }
        if self.nodes[h].kind == NodeKind::Latent {
            return Err(GraphError::EdgeIntoLatent(tail.to_string(), head.to_string()));
        }
        if self.edges.contains(&(t, h)) {
            return Err(GraphError::DuplicateEdge(tail.to_string(), head.to_string()));
        }
        self.edges.push((t, h));
        Ok(self)
    }

    pub fn build(&self) -> Result<Dag, GraphError> {
        let n = self.nodes.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(t, h) in &self.edges {
            parents[h].push(t);
            children[t].push(h);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let mut dag = Dag {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            edges: self.edges.clone(),
            parents,
            children,
            topo: Vec::new(),
        };
        dag.topo = dag.kahn_order().map_err(GraphError::Cycle)?;
        Ok(dag)
    }
}

/// Directed acyclic graph over typed, finite-cardinality nodes.
#[derive(Debug, Clone)]
pub struct Dag {
    nodes: Vec<Node>,
    index: HashMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    topo: Vec<NodeId>,
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Dag {}

impl Dag {
    pub fn builder() -> DagBuilder {
        DagBuilder::new()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id].name
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id].kind
    }

    pub fn cardinality(&self, id: NodeId) -> usize {
        self.nodes[id].cardinality
    }

    /// Edges in declaration order, as `(tail, head)`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn has_edge(&self, tail: NodeId, head: NodeId) -> bool {
        self.children[tail].binary_search(&head).is_ok()
    }

    pub fn id(&self, name: &str) -> Result<NodeId, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn ids<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet, GraphError> {
        names.iter().map(|n| self.id(n.as_ref())).collect()
    }

    pub fn names(&self, set: &NodeSet) -> Vec<String> {
        set.iter().map(|&v| self.nodes[v].name.clone()).collect()
    }

    pub fn parent_ids(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v]
    }

    pub fn child_ids(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn parents(&self, v: &str) -> Result<NodeSet, GraphError> {
        let v = self.id(v)?;
        Ok(self.parents[v].iter().copied().collect())
    }

    pub fn ancestors(&self, v: &str) -> Result<NodeSet, GraphError> {
        Ok(self.ancestor_ids(self.id(v)?))
    }

    pub fn descendants(&self, v: &str) -> Result<NodeSet, GraphError> {
        Ok(self.descendant_ids(self.id(v)?))
    }

    /// Strict ancestors of `v` (excluding `v`).
    pub fn ancestor_ids(&self, v: NodeId) -> NodeSet {
        self.closure(v, &self.parents)
    }

    /// Strict descendants of `v` (excluding `v`).
    pub fn descendant_ids(&self, v: NodeId) -> NodeSet {
        self.closure(v, &self.children)
    }

    /// Nodes that are neither `v` nor one of its descendants.
    pub fn non_descendant_ids(&self, v: NodeId) -> NodeSet {
        let desc = self.descendant_ids(v);
        (0..self.len()).filter(|&w| w != v && !desc.contains(&w)).collect()
    }

    /// True iff a directed path of length >= 1 leads from `from` to some member of `targets`.
    pub fn reaches_any(&self, from: NodeId, targets: &NodeSet) -> bool {
        !targets.is_empty() && self.descendant_ids(from).iter().any(|w| targets.contains(w))
    }

    fn closure(&self, v: NodeId, adj: &[Vec<NodeId>]) -> NodeSet {
        let mut seen = NodeSet::new();
        let mut stack: Vec<NodeId> = adj[v].clone();
        while let Some(u) = stack.pop() {
            if seen.insert(u) {
                stack.extend(adj[u].iter().copied());
            }
        }
        seen
    }

    /// Topological order with ties broken by declaration order.
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn topological_names(&self) -> Vec<String> {
        self.topo.iter().map(|&v| self.nodes[v].name.clone()).collect()
    }

    fn kahn_order(&self) -> Result<Vec<NodeId>, Vec<String>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<NodeId>> =
            (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node has a leftover parent, so walking parents must revisit a node.
        let leftover: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
        let start = leftover.iter().position(|&b| b).unwrap_or(0);
        let mut walk = vec![start];
        let mut pos = vec![usize::MAX; n];
        pos[start] = 0;
        let mut cur = start;
        loop {
            let next = self.parents[cur]
                .iter()
                .copied()
                .find(|&p| leftover[p])
                .expect("leftover node without leftover parent");
            if pos[next] != usize::MAX {
                let mut cycle: Vec<NodeId> = walk[pos[next]..].to_vec();
                // walk follows parents; reverse to edge direction.
                cycle.reverse();
                let mut names: Vec<String> =
                    cycle.iter().map(|&v| self.nodes[v].name.clone()).collect();
                names.push(names[0].clone());
                return Err(names);
            }
            pos[next] = walk.len();
            walk.push(next);
            cur = next;
        }
    }

    /// Serialize to the line-oriented DAG file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            out.push_str(&format!("node {} {} {}\n", node.name, node.kind, node.cardinality));
        }
        for &(t, h) in &self.edges {
            out.push_str(&format!("edge {} -> {}\n", self.nodes[t].name, self.nodes[h].name));
        }
        out
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Parse the DAG file format:
///
/// ```text
/// # comment
/// node X setting 2
/// node A 2            # kind defaults to outcome
/// edge X -> A
/// ```
pub fn parse_dag(text: &str) -> Result<Dag, GraphError> {
    let mut builder = DagBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let syntax = |message: String| GraphError::Syntax {
            line: line_no,
            message,
        };
        match tokens.as_slice() {
            [] => continue,
            ["node", rest @ ..] => {
                let (name, kind, card) = match rest {
                    [name, card] => (*name, NodeKind::Outcome, *card),
                    [name, kind, card] => (*name, kind.parse().map_err(syntax)?, *card),
                    _ => {
                        return Err(syntax(
                            "expected `node <name> [kind] <cardinality>`".to_string(),
                        ))
                    }
                };
                if !valid_name(name) {
                    return Err(syntax(format!("invalid node name `{name}`")));
                }
                let card: usize = card
                    .parse()
                    .map_err(|_| syntax(format!("invalid cardinality `{card}`")))?;
                builder
                    .node(name, kind, card)
                    .map_err(|e| e.at_line(line_no))?;
            }
            ["edge", tail, "->", head] => {
                builder.edge(tail, head).map_err(|e| e.at_line(line_no))?;
            }
            ["edge", ..] => {
                return Err(syntax("expected `edge <name> -> <name>`".to_string()));
            }
            [other, ..] => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    builder.build()
}

/// A conditional-independence / separation query `(X ⫫ Y | Z)` over names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondQuery {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

impl CondQuery {
    pub fn new<S: AsRef<str>>(x: &[S], y: &[S], z: &[S]) -> Self {
        let own = |s: &[S]| s.iter().map(|v| v.as_ref().to_string()).collect();
        Self {
            x: own(x),
            y: own(y),
            z: own(z),
        }
    }

    /// Checks nonemptiness of X and Y and pairwise disjointness (including
    /// repeated names within one set).
    pub fn check_shape(&self) -> Result<(), String> {
        if self.x.is_empty() || self.y.is_empty() {
            return Err("X and Y must be nonempty".to_string());
        }
        let mut seen = BTreeSet::new();
        for name in self.x.iter().chain(&self.y).chain(&self.z) {
            if !seen.insert(name.as_str()) {
                return Err(format!("`{name}` appears more than once across X, Y, Z"));
            }
        }
        Ok(())
    }

    /// Resolve against a graph, validating shape and membership.
    pub fn resolve(&self, g: &Dag) -> Result<ResolvedQuery, GraphError> {
        self.check_shape().map_err(GraphError::InvalidQuery)?;
        Ok(ResolvedQuery {
            x: g.ids(&self.x)?,
            y: g.ids(&self.y)?,
            z: g.ids(&self.z)?,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            z: self.z.clone(),
        }
    }
}

impl fmt::Display for CondQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} ⫫ {} | {})",
            self.x.join(","),
            self.y.join(","),
            if self.z.is_empty() { "∅".to_string() } else { self.z.join(",") }
        )
    }
}

/// A [`CondQuery`] whose names have been resolved against a [`Dag`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedQuery {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
}

/// Every labelled DAG on `n` outcome nodes named `V0..`, each of cardinality 2.
///
/// Enumerates all 3^(n(n-1)/2) orientations of the complete graph's pairs and
/// keeps the acyclic ones; intended for n <= 5.
pub fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut b = DagBuilder::new();
        for name in &names {
            b.node(name, NodeKind::Outcome, 2).expect("fresh names");
        }
        for &(i, j) in &pairs {
            match code % 3 {
                1 => {
                    b.edge(&names[i], &names[j]).expect("valid edge");
                }
                2 => {
                    b.edge(&names[j], &names[i]).expect("valid edge");
                }
                _ => {}
            }
            code /= 3;
        }
        if let Ok(g) = b.build() {
            out.push(g);
        }
    }
    out
}

/// One representative per isomorphism class of [`all_dags`]`(n)`.
///
/// Classes are identified by the lexicographically smallest adjacency bitmask
/// over all node relabellings.
pub fn dag_isomorphism_classes(n: usize) -> Vec<Dag> {
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in all_dags(n) {
        let canon = perms
            .iter()
            .map(|p| {
                g.edges()
                    .iter()
                    .fold(0u64, |acc, &(t, h)| acc | 1 << (p[t] * n + p[h]))
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
