//! Partial mixed graphs: edge marks, node sets, the four graph classes and
//! their validation, and the elementary ancestral relations.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{mec, paths, Limits};

/// Index of a node in declaration order.
pub type NodeId = usize;

/// Upper bound on the number of nodes a [`Graph`] can hold; node sets are 64-bit masks.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mark {
    Tail,
    Arrow,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphClass {
    Dag,
    Cpdag,
    Mag,
    Pag,
}

impl GraphClass {
    pub fn keyword(self) -> &'static str {
        match self {
            GraphClass::Dag => "dag",
            GraphClass::Cpdag => "cpdag",
            GraphClass::Mag => "mag",
            GraphClass::Pag => "pag",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "dag" => Some(GraphClass::Dag),
            "cpdag" => Some(GraphClass::Cpdag),
            "mag" => Some(GraphClass::Mag),
            "pag" => Some(GraphClass::Pag),
            _ => None,
        }
    }

    /// Classes whose edges may carry circle marks.
    pub fn is_partial(self) -> bool {
        matches!(self, GraphClass::Cpdag | GraphClass::Pag)
    }

    /// Whether an edge with the given endpoint marks belongs to the class vocabulary.
    pub fn allows(self, at_a: Mark, at_b: Mark) -> bool {
        use Mark::*;
        let directed = matches!((at_a, at_b), (Tail, Arrow) | (Arrow, Tail));
        match self {
            GraphClass::Dag => directed,
            GraphClass::Cpdag => directed || (at_a, at_b) == (Circle, Circle),
            GraphClass::Mag => directed || (at_a, at_b) == (Arrow, Arrow),
            GraphClass::Pag => {
                !matches!((at_a, at_b), (Tail, Tail) | (Tail, Circle) | (Circle, Tail))
            }
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GraphClass::Dag => "DAG",
            GraphClass::Cpdag => "CPDAG",
            GraphClass::Mag => "MAG",
            GraphClass::Pag => "PAG",
        };
        f.write_str(s)
    }
}

/// An edge between `a` and `b` with the mark at each endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub mark_a: Mark,
    pub mark_b: Mark,
}

impl Edge {
    pub fn new(a: NodeId, mark_a: Mark, mark_b: Mark, b: NodeId) -> Self {
        Edge {
            a,
            b,
            mark_a,
            mark_b,
        }
    }

    /// `a -> b`
    pub fn directed(a: NodeId, b: NodeId) -> Self {
        Edge::new(a, Mark::Tail, Mark::Arrow, b)
    }

    /// `a <-> b`
    pub fn bidirected(a: NodeId, b: NodeId) -> Self {
        Edge::new(a, Mark::Arrow, Mark::Arrow, b)
    }

    /// `a o-o b`
    pub fn nondirected(a: NodeId, b: NodeId) -> Self {
        Edge::new(a, Mark::Circle, Mark::Circle, b)
    }

    /// `a o-> b`
    pub fn partially_directed(a: NodeId, b: NodeId) -> Self {
        Edge::new(a, Mark::Circle, Mark::Arrow, b)
    }

    pub fn reversed(self) -> Self {
        Edge::new(self.b, self.mark_b, self.mark_a, self.a)
    }

    /// Same edge with `a < b`.
    pub fn normalized(self) -> Self {
        if self.a <= self.b {
            self
        } else {
            self.reversed()
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(
            (self.mark_a, self.mark_b),
            (Mark::Tail, Mark::Arrow) | (Mark::Arrow, Mark::Tail)
        )
    }
}

/// Textual operator for an edge seen from `a` to `b`, e.g. `o->`.
pub fn edge_operator(at_a: Mark, at_b: Mark) -> &'static str {
    use Mark::*;
    match (at_a, at_b) {
        (Tail, Arrow) => "->",
        (Arrow, Tail) => "<-",
        (Arrow, Arrow) => "<->",
        (Circle, Circle) => "o-o",
        (Circle, Arrow) => "o->",
        (Arrow, Circle) => "<-o",
        (Tail, Tail) => "--",
        (Tail, Circle) => "-o",
        (Circle, Tail) => "o-",
    }
}

/// A set of nodes of one graph, stored as a bit mask over node indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: NodeId) -> Self {
        NodeSet(1u64 << v)
    }

    /// The first `n` nodes.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, v: NodeId) -> bool {
        v < 64 && self.0 & (1u64 << v) != 0
    }

    pub fn insert(&mut self, v: NodeId) -> bool {
        let fresh = !self.contains(v);
        self.0 |= 1u64 << v;
        fresh
    }

    pub fn remove(&mut self, v: NodeId) {
        self.0 &= !(1u64 << v);
    }

    pub fn with(self, v: NodeId) -> Self {
        NodeSet(self.0 | (1u64 << v))
    }

    pub fn without(self, v: NodeId) -> Self {
        NodeSet(self.0 & !(1u64 << v))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn first(self) -> Option<NodeId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing index order.
    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// All subsets of `self`, in increasing order of their bit masks.
    pub fn subsets(self) -> impl Iterator<Item = NodeSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(NodeSet(cur))
        })
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = NodeSetIter;

    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl BitOr for NodeSet {
    type Output = NodeSet;
    fn bitor(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 | rhs.0)
    }
}

impl BitAnd for NodeSet {
    type Output = NodeSet;
    fn bitand(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 & rhs.0)
    }
}

impl Sub for NodeSet {
    type Output = NodeSet;
    fn sub(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 & !rhs.0)
    }
}

impl Not for NodeSet {
    type Output = NodeSet;
    fn not(self) -> NodeSet {
        NodeSet(!self.0)
    }
}

/// An immutable, validated partial mixed graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    class: GraphClass,
    names: Vec<String>,
    // ends[u * n + v]: mark at `u` on the edge between `u` and `v`
    ends: Vec<Option<Mark>>,
    adj: Vec<NodeSet>,
}

impl Graph {
    /// Builds and validates a graph of the given class.
    pub fn build(class: GraphClass, names: Vec<String>, edges: Vec<Edge>) -> Result<Graph> {
        Graph::build_with_limits(class, names, edges, &Limits::default())
    }

    pub fn build_with_limits(
        class: GraphClass,
        names: Vec<String>,
        edges: Vec<Edge>,
        limits: &Limits,
    ) -> Result<Graph> {
        let g = Graph::assemble(class, names, edges)?;
        for e in g.edges() {
            if !class.allows(e.mark_a, e.mark_b) {
                return Err(Error::MarkNotAllowedInClass {
                    class: class.to_string(),
                    edge: g.format_edge(&e),
                });
            }
        }
        g.validate_class(limits)?;
        Ok(g)
    }

    /// Structural checks only: distinct names, known endpoints, no loops or
    /// parallel edges. Class invariants are not checked.
    pub(crate) fn assemble(
        class: GraphClass,
        names: Vec<String>,
        edges: Vec<Edge>,
    ) -> Result<Graph> {
        let n = names.len();
        if n > MAX_NODES {
            return Err(Error::SizeCapExceeded {
                what: "graph nodes",
                limit: MAX_NODES,
                actual: n,
            });
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        let mut ends = vec![None; n * n];
        let mut adj = vec![NodeSet::EMPTY; n];
        for e in edges {
            if e.a >= n || e.b >= n {
                return Err(Error::UnknownNode(format!("#{}", e.a.max(e.b))));
            }
            if e.a == e.b {
                return Err(Error::SelfLoop(names[e.a].clone()));
            }
            if ends[e.a * n + e.b].is_some() {
                return Err(Error::DuplicateEdge(names[e.a].clone(), names[e.b].clone()));
            }
            ends[e.a * n + e.b] = Some(e.mark_a);
            ends[e.b * n + e.a] = Some(e.mark_b);
            adj[e.a].insert(e.b);
            adj[e.b].insert(e.a);
        }
        Ok(Graph {
            class,
            names,
            ends,
            adj,
        })
    }

    fn validate_class(&self, limits: &Limits) -> Result<()> {
        match self.class {
            GraphClass::Dag => self.check_acyclic(),
            GraphClass::Mag => self.check_ancestral().and_then(|_| self.check_maximal()),
            GraphClass::Cpdag => {
                self.check_acyclic()?;
                mec::enumerate_dags_with_limits(self, limits).map(|_| ())
            }
            GraphClass::Pag => {
                self.check_acyclic()?;
                mec::enumerate_mags_with_limits(self, limits).map(|_| ())
            }
        }
    }

    /// Same nodes and edges under another class tag, without validation.
    #[cfg(test)]
    pub(crate) fn retagged(&self, class: GraphClass) -> Graph {
        Graph {
            class,
            ..self.clone()
        }
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn index(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.index(name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Resolves names to a node set.
    pub fn node_set<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names
            .iter()
            .map(|n| self.node(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(|ids| ids.into_iter().collect())
    }

    /// Names of the members of `set`, in declaration order.
    pub fn set_names(&self, set: NodeSet) -> Vec<String> {
        set.iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::full(self.len())
    }

    /// Mark at `at` on the edge between `at` and `other`, if adjacent.
    pub fn mark(&self, at: NodeId, other: NodeId) -> Option<Mark> {
        self.ends[at * self.len() + other]
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, v: NodeId) -> NodeSet {
        self.adj[v]
    }

    pub fn edge(&self, a: NodeId, b: NodeId) -> Option<Edge> {
        Some(Edge::new(a, self.mark(a, b)?, self.mark(b, a)?, b))
    }

    /// All edges with `a < b`, sorted by `(a, b)`.
    pub fn edges(&self) -> Vec<Edge> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in self.adj[a].iter().filter(|&b| b > a) {
                out.push(self.edge(a, b).expect("adjacent"));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// `a -> b`
    pub fn is_directed(&self, a: NodeId, b: NodeId) -> bool {
        self.mark(a, b) == Some(Mark::Tail) && self.mark(b, a) == Some(Mark::Arrow)
    }

    /// `a <-> b`
    pub fn is_bidirected(&self, a: NodeId, b: NodeId) -> bool {
        self.mark(a, b) == Some(Mark::Arrow) && self.mark(b, a) == Some(Mark::Arrow)
    }

    pub fn circle_count(&self) -> usize {
        self.ends
            .iter()
            .filter(|m| **m == Some(Mark::Circle))
            .count()
    }

    /// Renders an edge as `A o-> B`.
    pub fn format_edge(&self, e: &Edge) -> String {
        format!(
            "{} {} {}",
            self.names[e.a],
            edge_operator(e.mark_a, e.mark_b),
            self.names[e.b]
        )
    }

    pub fn same_skeleton(&self, other: &Graph) -> bool {
        self.len() == other.len() && self.adj == other.adj
    }

    /// Nodes `w` with `w -> s` for some `s` in `set`.
    pub fn parents(&self, set: NodeSet) -> NodeSet {
        let mut out = NodeSet::EMPTY;
        for s in set {
            for w in self.adj[s] {
                if self.is_directed(w, s) {
                    out.insert(w);
                }
            }
        }
        out
    }

    pub fn children(&self, set: NodeSet) -> NodeSet {
        let mut out = NodeSet::EMPTY;
        for s in set {
            for w in self.adj[s] {
                if self.is_directed(s, w) {
                    out.insert(w);
                }
            }
        }
        out
    }

    /// Descendants along directed paths, including `set` itself. Defined for
    /// DAGs and MAGs only.
    pub fn descendants(&self, set: NodeSet) -> Result<NodeSet> {
        if self.class.is_partial() {
            return Err(Error::ClassMismatch {
                expected: "DAG or MAG".into(),
                found: self.class.to_string(),
            });
        }
        Ok(self.directed_reach(set))
    }

    /// Nodes reachable from `set` along directed edges, in any class.
    pub(crate) fn directed_reach(&self, set: NodeSet) -> NodeSet {
        self.closure(set, |u, v| self.is_directed(u, v))
    }

    /// Ancestors along directed paths, including `set` itself.
    pub fn ancestors(&self, set: NodeSet) -> NodeSet {
        self.closure(set, |u, v| self.is_directed(v, u))
    }

    /// Nodes reachable from `set` along possibly directed paths, including
    /// `set` itself: an edge `u *-* v` can be followed from `u` to `v`
    /// unless it has an arrowhead at `u`.
    pub fn possible_descendants(&self, set: NodeSet) -> NodeSet {
        self.closure(set, |u, v| self.mark(u, v) != Some(Mark::Arrow))
    }

    fn closure(&self, set: NodeSet, step: impl Fn(NodeId, NodeId) -> bool) -> NodeSet {
        let mut seen = set;
        let mut stack: Vec<NodeId> = set.iter().collect();
        while let Some(u) = stack.pop() {
            for v in self.adj[u] - seen {
                if step(u, v) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// A directed cycle, if one exists, as the node sequence around it.
    pub fn find_directed_cycle(&self) -> Option<Vec<NodeId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let n = self.len();
        let mut color = vec![Color::White; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if color[root] != Color::White {
                continue;
            }
            // iterative DFS; each frame holds the children still to visit
            let mut stack = vec![(root, self.children(NodeSet::singleton(root)))];
            color[root] = Color::Grey;
            while let Some((u, rest)) = stack.last_mut() {
                let u = *u;
                match rest.first() {
                    None => {
                        color[u] = Color::Black;
                        stack.pop();
                    }
                    Some(v) => {
                        rest.remove(v);
                        match color[v] {
                            Color::White => {
                                color[v] = Color::Grey;
                                parent[v] = u;
                                stack.push((v, self.children(NodeSet::singleton(v))));
                            }
                            Color::Grey => {
                                let mut cycle = vec![u];
                                let mut w = u;
                                while w != v {
                                    w = parent[w];
                                    cycle.push(w);
                                }
                                cycle.reverse();
                                cycle.push(v);
                                return Some(cycle);
                            }
                            Color::Black => {}
                        }
                    }
                }
            }
        }
        None
    }

    /// A directed path `a -> ... -> b` closed by `b <-> a`, if one exists.
    pub fn find_almost_directed_cycle(&self) -> Option<Vec<NodeId>> {
        for e in self.edges() {
            if !self.is_bidirected(e.a, e.b) {
                continue;
            }
            for (from, to) in [(e.a, e.b), (e.b, e.a)] {
                if let Some(p) = self.directed_path(from, to) {
                    return Some(p);
                }
            }
        }
        None
    }

    /// A shortest directed path from `from` to `to`.
    pub fn directed_path(&self, from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
        let n = self.len();
        let mut prev = vec![usize::MAX; n];
        let mut seen = NodeSet::singleton(from);
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut w = to;
                while w != from {
                    w = prev[w];
                    path.push(w);
                }
                path.reverse();
                return Some(path);
            }
            for v in self.children(NodeSet::singleton(u)) - seen {
                seen.insert(v);
                prev[v] = u;
                queue.push_back(v);
            }
        }
        None
    }

    fn check_acyclic(&self) -> Result<()> {
        match self.find_directed_cycle() {
            Some(c) => Err(Error::DirectedCycle(
                c.into_iter().map(|v| self.names[v].clone()).collect(),
            )),
            None => Ok(()),
        }
    }

    fn check_ancestral(&self) -> Result<()> {
        self.check_acyclic()?;
        match self.find_almost_directed_cycle() {
            Some(p) => Err(Error::AlmostDirectedCycle {
                path: p.into_iter().map(|v| self.names[v].clone()).collect(),
            }),
            None => Ok(()),
        }
    }

    /// In an ancestral graph two non-adjacent nodes are m-separable iff they
    /// are m-separated by their other common ancestors.
    fn check_maximal(&self) -> Result<()> {
        match self.inseparable_pair() {
            Some((a, b)) => Err(Error::NotMaximal(
                self.names[a].clone(),
                self.names[b].clone(),
            )),
            None => Ok(()),
        }
    }

    pub(crate) fn inseparable_pair(&self) -> Option<(NodeId, NodeId)> {
        let n = self.len();
        for a in 0..n {
            for b in (a + 1)..n {
                if self.adjacent(a, b) {
                    continue;
                }
                let pair = NodeSet::singleton(a).with(b);
                let cond = self.ancestors(pair) - pair;
                if paths::connected_by_walks(
                    self,
                    NodeSet::singleton(a),
                    NodeSet::singleton(b),
                    cond,
                ) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Whether the graph satisfies the MAG invariants (ancestral and maximal),
    /// regardless of its class tag.
    pub fn is_valid_mag(&self) -> bool {
        self.edges()
            .iter()
            .all(|e| GraphClass::Mag.allows(e.mark_a, e.mark_b))
            && self.check_ancestral().is_ok()
            && self.inseparable_pair().is_none()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{", self.class)?;
        for (i, e) in self.edges().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, " {}", self.format_edge(e))?;
        }
        let isolated: Vec<&str> = (0..self.len())
            .filter(|&v| self.adj[v].is_empty())
            .map(|v| self.names[v].as_str())
            .collect();
        if !isolated.is_empty() {
            write!(f, "; {}", isolated.join(" "))?;
        }
        f.write_str(" }")
    }
}

/// Incremental construction of a [`Graph`] from node names.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    class: GraphClass,
    names: Vec<String>,
    edges: Vec<(String, Mark, Mark, String)>,
}

impl GraphBuilder {
    pub fn new(class: GraphClass) -> Self {
        GraphBuilder {
            class,
            names: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn touch(&mut self, name: &str) {
        if !self.names.iter().any(|n| n == name) {
            self.names.push(name.to_string());
        }
    }

    pub fn node(mut self, name: &str) -> Self {
        self.touch(name);
        self
    }

    pub fn edge(mut self, a: &str, mark_a: Mark, mark_b: Mark, b: &str) -> Self {
        self.touch(a);
        self.touch(b);
        self.edges.push((a.into(), mark_a, mark_b, b.into()));
        self
    }

    pub fn directed(self, a: &str, b: &str) -> Self {
        self.edge(a, Mark::Tail, Mark::Arrow, b)
    }

    pub fn bidirected(self, a: &str, b: &str) -> Self {
        self.edge(a, Mark::Arrow, Mark::Arrow, b)
    }

    pub fn nondirected(self, a: &str, b: &str) -> Self {
        self.edge(a, Mark::Circle, Mark::Circle, b)
    }

    pub fn partially_directed(self, a: &str, b: &str) -> Self {
        self.edge(a, Mark::Circle, Mark::Arrow, b)
    }

    fn parts(&self) -> (Vec<String>, Vec<Edge>) {
        let idx = |n: &str| self.names.iter().position(|m| m == n).expect("touched");
        let edges = self
            .edges
            .iter()
            .map(|(a, ma, mb, b)| Edge::new(idx(a), *ma, *mb, idx(b)))
            .collect();
        (self.names.clone(), edges)
    }

    pub fn build(&self) -> Result<Graph> {
        let (names, edges) = self.parts();
        Graph::build(self.class, names, edges)
    }

    pub fn build_with_limits(&self, limits: &Limits) -> Result<Graph> {
        let (names, edges) = self.parts();
        Graph::build_with_limits(self.class, names, edges, limits)
    }
}
