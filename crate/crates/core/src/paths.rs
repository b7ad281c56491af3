//! Paths in partial mixed graphs: collider / definite status classification,
//! causal kinds, exhaustive enumeration, blocking and m-separation.
//!
//! m-connection is available through two independent routes. The path route
//! searches simple definite status paths directly; the walk route runs a
//! reachability search over traversed edges `(previous, current)`, where each
//! transition is checked against the status of the middle node of the triple.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Mark, NodeId, NodeSet};
use crate::Limits;

/// A sequence of distinct nodes in which successive nodes are adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    nodes: Vec<NodeId>,
}

impl Path {
    pub fn new(g: &Graph, nodes: Vec<NodeId>) -> Result<Path> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two nodes".into()));
        }
        let mut seen = NodeSet::EMPTY;
        for &v in &nodes {
            if v >= g.len() {
                return Err(Error::UnknownNode(format!("#{v}")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidPath(format!("`{}` repeats", g.name(v))));
            }
        }
        for w in nodes.windows(2) {
            if !g.adjacent(w[0], w[1]) {
                return Err(Error::InvalidPath(format!(
                    "`{}` and `{}` are not adjacent",
                    g.name(w[0]),
                    g.name(w[1])
                )));
            }
        }
        Ok(Path { nodes })
    }

    pub fn from_names<S: AsRef<str>>(g: &Graph, names: &[S]) -> Result<Path> {
        let nodes = names
            .iter()
            .map(|n| g.node(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Path::new(g, nodes)
    }

    pub(crate) fn from_vec_unchecked(nodes: Vec<NodeId>) -> Path {
        Path { nodes }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Number of nodes on the path.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("non-empty")
    }

    pub fn interior(&self) -> &[NodeId] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn reversed(&self) -> Path {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Path { nodes }
    }

    pub fn names(&self, g: &Graph) -> Vec<String> {
        self.nodes.iter().map(|&v| g.name(v).to_string()).collect()
    }

    /// Renders the path with its edges, e.g. `X -> V4 <- V3 -> Y`.
    pub fn render(&self, g: &Graph) -> String {
        let mut out = g.name(self.nodes[0]).to_string();
        for w in self.nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let op = crate::graph::edge_operator(
                g.mark(a, b).expect("adjacent"),
                g.mark(b, a).expect("adjacent"),
            );
            out.push_str(&format!(" {op} {}", g.name(b)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NodePathStatus {
    Collider,
    DefiniteNonCollider,
    NotDefinite,
    Endpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct PathKind {
    pub possibly_causal: bool,
    pub causal: bool,
    pub proper: bool,
    pub definite_status: bool,
}

/// Status of `mid` on the triple `prev *-* mid *-* next`.
pub fn triple_status(g: &Graph, prev: NodeId, mid: NodeId, next: NodeId) -> NodePathStatus {
    let in_mark = g.mark(mid, prev);
    let out_mark = g.mark(mid, next);
    match (in_mark, out_mark) {
        (Some(Mark::Arrow), Some(Mark::Arrow)) => NodePathStatus::Collider,
        (Some(Mark::Tail), _) | (_, Some(Mark::Tail)) => NodePathStatus::DefiniteNonCollider,
        (Some(Mark::Circle), Some(Mark::Circle)) if !g.adjacent(prev, next) => {
            NodePathStatus::DefiniteNonCollider
        }
        _ => NodePathStatus::NotDefinite,
    }
}

/// Status of the `i`-th node of `p`.
pub fn status_at(g: &Graph, p: &Path, i: usize) -> Result<NodePathStatus> {
    let len = p.len();
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    if i == 0 || i == len - 1 {
        return Ok(NodePathStatus::Endpoint);
    }
    Ok(triple_status(g, p.nodes[i - 1], p.nodes[i], p.nodes[i + 1]))
}

fn step_possibly_directed(g: &Graph, from: NodeId, to: NodeId) -> bool {
    g.mark(from, to) != Some(Mark::Arrow)
}

fn step_directed(g: &Graph, from: NodeId, to: NodeId) -> bool {
    g.is_directed(from, to)
}

pub fn is_definite_status(g: &Graph, p: &Path) -> bool {
    p.nodes.windows(3).all(|t| {
        matches!(
            triple_status(g, t[0], t[1], t[2]),
            NodePathStatus::Collider | NodePathStatus::DefiniteNonCollider
        )
    })
}

/// Classifies `p`, read from its first to its last node, relative to `x`.
pub fn classify(g: &Graph, p: &Path, x: NodeSet) -> PathKind {
    let possibly_causal = p
        .nodes
        .windows(2)
        .all(|w| step_possibly_directed(g, w[0], w[1]));
    let causal = p.nodes.windows(2).all(|w| step_directed(g, w[0], w[1]));
    let proper = x.contains(p.first()) && p.nodes[1..].iter().all(|&v| !x.contains(v));
    PathKind {
        possibly_causal,
        causal,
        proper,
        definite_status: is_definite_status(g, p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Causality {
    #[default]
    Any,
    Causal,
    PossiblyCausal,
    NonCausal,
}

/// Which paths [`enumerate_paths`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PathFilter {
    pub proper: bool,
    pub definite_status: bool,
    pub causality: Causality,
}

impl PathFilter {
    pub const ALL: PathFilter = PathFilter {
        proper: false,
        definite_status: false,
        causality: Causality::Any,
    };

    pub fn proper(causality: Causality) -> Self {
        PathFilter {
            proper: true,
            definite_status: false,
            causality,
        }
    }

    pub fn proper_definite_non_causal() -> Self {
        PathFilter {
            proper: true,
            definite_status: true,
            causality: Causality::NonCausal,
        }
    }

    pub fn matches(&self, kind: &PathKind) -> bool {
        (!self.proper || kind.proper)
            && (!self.definite_status || kind.definite_status)
            && match self.causality {
                Causality::Any => true,
                Causality::Causal => kind.causal,
                Causality::PossiblyCausal => kind.possibly_causal,
                Causality::NonCausal => !kind.possibly_causal,
            }
    }
}

pub(crate) fn check_path_cap(g: &Graph, limits: &Limits) -> Result<()> {
    if g.len() > limits.max_path_nodes {
        return Err(Error::SizeCapExceeded {
            what: "nodes for path enumeration",
            limit: limits.max_path_nodes,
            actual: g.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_query_sets(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyXOrY);
    }
    let all = g.all_nodes();
    for s in [x, y, z] {
        if let Some(v) = (s - all).first() {
            return Err(Error::UnknownNode(format!("#{v}")));
        }
    }
    for shared in [x & y, x & z, y & z] {
        if let Some(v) = shared.first() {
            return Err(Error::SetsNotDisjoint(g.name(v).to_string()));
        }
    }
    Ok(())
}

/// All simple paths from a node of `x` to a node of `y` accepted by
/// `filter`, in lexicographic order of their node indices.
///
/// Paths may run through other members of `y`; unless the filter asks for
/// proper paths they may also run through other members of `x`.
pub fn enumerate_paths(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    filter: PathFilter,
    limits: &Limits,
) -> Result<Vec<Path>> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyXOrY);
    }
    if let Some(v) = (x & y).first() {
        return Err(Error::SetsNotDisjoint(g.name(v).to_string()));
    }
    check_path_cap(g, limits)?;
    let mut out = Vec::new();
    for start in x {
        let mut stack = vec![start];
        dfs(
            g,
            x,
            y,
            &filter,
            limits,
            &mut stack,
            NodeSet::singleton(start),
            &mut out,
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    filter: &PathFilter,
    limits: &Limits,
    stack: &mut Vec<NodeId>,
    on_path: NodeSet,
    out: &mut Vec<Path>,
) -> Result<()> {
    let cur = *stack.last().expect("non-empty");
    for next in g.neighbors(cur) - on_path {
        if filter.proper && x.contains(next) {
            continue;
        }
        if filter.definite_status && stack.len() >= 2 {
            let prev = stack[stack.len() - 2];
            if triple_status(g, prev, cur, next) == NodePathStatus::NotDefinite {
                continue;
            }
        }
        match filter.causality {
            Causality::Causal if !step_directed(g, cur, next) => continue,
            Causality::PossiblyCausal if !step_possibly_directed(g, cur, next) => continue,
            _ => {}
        }
        stack.push(next);
        if y.contains(next) {
            let path = Path::from_vec_unchecked(stack.clone());
            let keep = match filter.causality {
                Causality::NonCausal => !classify(g, &path, x).possibly_causal,
                _ => true,
            };
            if keep {
                if out.len() >= limits.max_paths {
                    return Err(Error::SizeCapExceeded {
                        what: "enumerated paths",
                        limit: limits.max_paths,
                        actual: out.len() + 1,
                    });
                }
                out.push(path);
            }
        }
        dfs(g, x, y, filter, limits, stack, on_path.with(next), out)?;
        stack.pop();
    }
    Ok(())
}

/// Whether `z` blocks the definite status path `p`: some definite
/// non-collider is in `z`, or some collider has no descendant in `z`.
/// Descendants follow directed edges only, in every graph class.
pub fn blocks(g: &Graph, p: &Path, z: NodeSet) -> Result<bool> {
    for v in [p.first(), p.last()] {
        if z.contains(v) {
            return Err(Error::EndpointInZ(g.name(v).to_string()));
        }
    }
    let anc_z = g.ancestors(z);
    let mut blocked = false;
    for i in 1..p.len() - 1 {
        match status_at(g, p, i)? {
            NodePathStatus::Collider => blocked |= !anc_z.contains(p.nodes[i]),
            NodePathStatus::DefiniteNonCollider => blocked |= z.contains(p.nodes[i]),
            _ => return Err(Error::NotDefiniteStatus),
        }
    }
    Ok(blocked)
}

/// m-connection of `x` and `y` given `z`, computed by the walk route.
pub fn m_connected(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<bool> {
    check_query_sets(g, x, y, z)?;
    Ok(connected_by_walks(g, x, y, z))
}

pub fn m_separated(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<bool> {
    m_connected(g, x, y, z).map(|c| !c)
}

/// m-connection by reachability over traversed edges.
pub fn m_connected_by_walks(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<bool> {
    m_connected(g, x, y, z)
}

/// m-connection by searching simple definite status paths.
pub fn m_connected_by_paths(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
    limits: &Limits,
) -> Result<bool> {
    check_query_sets(g, x, y, z)?;
    check_path_cap(g, limits)?;
    let anc_z = g.ancestors(z);
    let open = |prev: NodeId, mid: NodeId, next: NodeId| match triple_status(g, prev, mid, next) {
        NodePathStatus::Collider => anc_z.contains(mid),
        NodePathStatus::DefiniteNonCollider => !z.contains(mid),
        _ => false,
    };
    fn search(
        g: &Graph,
        y: NodeSet,
        stack: &mut Vec<NodeId>,
        on_path: NodeSet,
        open: &dyn Fn(NodeId, NodeId, NodeId) -> bool,
    ) -> bool {
        let cur = *stack.last().expect("non-empty");
        for next in g.neighbors(cur) - on_path {
            if stack.len() >= 2 && !open(stack[stack.len() - 2], cur, next) {
                continue;
            }
            if y.contains(next) {
                return true;
            }
            stack.push(next);
            let found = search(g, y, stack, on_path.with(next), open);
            stack.pop();
            if found {
                return true;
            }
        }
        false
    }
    Ok(x.iter()
        .any(|s| search(g, y, &mut vec![s], NodeSet::singleton(s), &open)))
}

/// Walk-based m-connection without precondition checks.
pub(crate) fn connected_by_walks(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
    let n = g.len();
    let anc_z = g.ancestors(z);
    let mut visited = vec![false; n * n];
    let mut stack: Vec<(NodeId, NodeId)> = Vec::new();
    for s in x {
        for v in g.neighbors(s) {
            if !visited[s * n + v] {
                visited[s * n + v] = true;
                stack.push((s, v));
            }
        }
    }
    while let Some((prev, cur)) = stack.pop() {
        if y.contains(cur) {
            return true;
        }
        for next in g.neighbors(cur) {
            if next == prev || visited[cur * n + next] {
                continue;
            }
            let pass = match triple_status(g, prev, cur, next) {
                NodePathStatus::Collider => anc_z.contains(cur),
                NodePathStatus::DefiniteNonCollider => !z.contains(cur),
                _ => false,
            };
            if pass {
                visited[cur * n + next] = true;
                stack.push((cur, next));
            }
        }
    }
    false
}
