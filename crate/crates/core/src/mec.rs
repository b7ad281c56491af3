//! Markov equivalence classes.
//!
//! Classes are enumerated exactly by a backtracking search over edge
//! orientations of a fixed skeleton. The search prunes on directed and
//! almost directed cycles and on the collider status of unshielded triples,
//! which every member of a class shares. MAG candidates are then grouped by
//! their m-separation fingerprint, computed by brute force over all
//! conditioning sets.
//!
//! A CPDAG is accepted only if its class is non-empty, the per-endpoint
//! union of the members' marks reproduces it, and no equivalent DAG outside
//! the enumerated members exists on the same skeleton. A PAG is accepted if
//! exactly one fingerprint group of the MAGs consistent with its marks has a
//! mark union equal to the PAG. The PAG need not be maximally informative:
//! a circle may stand where the full Markov class agrees on a mark, and an
//! arrowhead where the full class has members with a tail.

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, GraphClass, Mark, NodeId, NodeSet};
use crate::paths::connected_by_walks;
use crate::Limits;

/// All DAGs (MAGs) represented by a CPDAG (PAG).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub representative: Graph,
    pub members: Vec<Graph>,
}

impl EquivalenceClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The m-separation statements `a _||_ b | S` holding in a graph, for every
/// pair `a < b` and every `S` within the remaining nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeparationFingerprint {
    n: usize,
    bits: Vec<u64>,
}

impl SeparationFingerprint {
    pub fn of(g: &Graph, limits: &Limits) -> Result<Self> {
        let n = g.len();
        if n > limits.max_fingerprint_nodes {
            return Err(Error::SizeCapExceeded {
                what: "nodes for separation fingerprints",
                limit: limits.max_fingerprint_nodes,
                actual: n,
            });
        }
        let per_pair = 1usize << n.saturating_sub(2);
        let pairs = n * n.saturating_sub(1) / 2;
        let mut bits = vec![0u64; (pairs * per_pair).div_ceil(64)];
        let mut idx = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                let rest = g.all_nodes() - NodeSet::singleton(a).with(b);
                for s in rest.subsets() {
                    let sep =
                        !connected_by_walks(g, NodeSet::singleton(a), NodeSet::singleton(b), s);
                    if sep {
                        bits[idx / 64] |= 1u64 << (idx % 64);
                    }
                    idx += 1;
                }
            }
        }
        Ok(SeparationFingerprint { n, bits })
    }

    /// Whether `g` has exactly the recorded separations. Stops at the first
    /// difference, which makes rejecting a non-equivalent graph cheap.
    pub fn matches(&self, g: &Graph) -> bool {
        if g.len() != self.n {
            return false;
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let rest = g.all_nodes() - NodeSet::singleton(a).with(b);
                for s in rest.subsets() {
                    let recorded = self.bits[idx / 64] >> (idx % 64) & 1 == 1;
                    let sep =
                        !connected_by_walks(g, NodeSet::singleton(a), NodeSet::singleton(b), s);
                    if sep != recorded {
                        return false;
                    }
                    idx += 1;
                }
            }
        }
        true
    }

    /// Number of separation statements recorded.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

/// Required collider status of each unshielded triple `(a, mid, c)`, `a < c`.
fn unshielded_triples(
    g: &Graph,
    collider: impl Fn(NodeId, NodeId, NodeId) -> bool,
) -> Vec<(NodeId, NodeId, NodeId, bool)> {
    let mut out = Vec::new();
    for mid in 0..g.len() {
        let nb: Vec<NodeId> = g.neighbors(mid).iter().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &c in &nb[i + 1..] {
                if !g.adjacent(a, c) {
                    out.push((a, mid, c, collider(a, mid, c)));
                }
            }
        }
    }
    out
}

/// Backtracking search over mark assignments of a fixed skeleton.
struct OrientationSearch<'a> {
    skeleton: &'a Graph,
    class: GraphClass,
    edges: Vec<(NodeId, NodeId)>,
    options: Vec<Vec<(Mark, Mark)>>,
    // per edge: indices into `triples` whose both edges are assigned once this edge is
    triple_checks: Vec<Vec<usize>>,
    triples: Vec<(NodeId, NodeId, NodeId, bool)>,
    marks: Vec<Option<Mark>>,
    children: Vec<NodeSet>,
    bidirected: Vec<(NodeId, NodeId)>,
    steps: usize,
    max_steps: usize,
}

impl<'a> OrientationSearch<'a> {
    fn new(
        skeleton: &'a Graph,
        class: GraphClass,
        options: Vec<Vec<(Mark, Mark)>>,
        triples: Vec<(NodeId, NodeId, NodeId, bool)>,
        limits: &Limits,
    ) -> Self {
        let n = skeleton.len();
        let edges: Vec<(NodeId, NodeId)> = skeleton.edges().iter().map(|e| (e.a, e.b)).collect();
        let position = |u: NodeId, v: NodeId| {
            edges
                .iter()
                .position(|&(a, b)| (a, b) == (u.min(v), u.max(v)))
                .expect("edge of skeleton")
        };
        let mut triple_checks = vec![Vec::new(); edges.len()];
        for (t, &(a, mid, c, _)) in triples.iter().enumerate() {
            let last = position(a, mid).max(position(mid, c));
            triple_checks[last].push(t);
        }
        OrientationSearch {
            skeleton,
            class,
            edges,
            options,
            triple_checks,
            triples,
            marks: vec![None; n * n],
            children: vec![NodeSet::EMPTY; n],
            bidirected: Vec::new(),
            steps: 0,
            max_steps: limits.max_search_steps,
        }
    }

    fn mark(&self, at: NodeId, other: NodeId) -> Option<Mark> {
        self.marks[at * self.skeleton.len() + other]
    }

    fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = NodeSet::singleton(from);
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            for v in self.children[u] - seen {
                seen.insert(v);
                stack.push(v);
            }
        }
        false
    }

    fn ancestral_so_far(&self) -> bool {
        self.bidirected
            .iter()
            .all(|&(p, q)| !self.reaches(p, q) && !self.reaches(q, p))
    }

    fn run(mut self) -> Result<Vec<Graph>> {
        let mut out = Vec::new();
        self.assign(0, &mut out)?;
        Ok(out)
    }

    fn assign(&mut self, k: usize, out: &mut Vec<Graph>) -> Result<()> {
        if k == self.edges.len() {
            let edges = self
                .edges
                .iter()
                .map(|&(a, b)| Edge::new(a, self.mark(a, b).unwrap(), self.mark(b, a).unwrap(), b))
                .collect();
            out.push(Graph::assemble(
                self.class,
                self.skeleton.names().to_vec(),
                edges,
            )?);
            return Ok(());
        }
        let n = self.skeleton.len();
        let (a, b) = self.edges[k];
        for oi in 0..self.options[k].len() {
            self.steps += 1;
            if self.steps > self.max_steps {
                return Err(Error::SizeCapExceeded {
                    what: "equivalence class search steps",
                    limit: self.max_steps,
                    actual: self.steps,
                });
            }
            let (ma, mb) = self.options[k][oi];
            let directed = match (ma, mb) {
                (Mark::Tail, Mark::Arrow) => Some((a, b)),
                (Mark::Arrow, Mark::Tail) => Some((b, a)),
                _ => None,
            };
            if let Some((u, v)) = directed {
                if self.reaches(v, u) {
                    continue;
                }
            }
            self.marks[a * n + b] = Some(ma);
            self.marks[b * n + a] = Some(mb);
            if let Some((u, v)) = directed {
                self.children[u].insert(v);
            }
            let bi = (ma, mb) == (Mark::Arrow, Mark::Arrow);
            if bi {
                self.bidirected.push((a, b));
            }

            let triples_ok = self.triple_checks[k].iter().all(|&t| {
                let (x, mid, z, collider) = self.triples[t];
                let is_collider = self.mark(mid, x) == Some(Mark::Arrow)
                    && self.mark(mid, z) == Some(Mark::Arrow);
                is_collider == collider
            });
            if triples_ok && self.ancestral_so_far() {
                self.assign(k + 1, out)?;
            }

            if bi {
                self.bidirected.pop();
            }
            if let Some((u, v)) = directed {
                self.children[u].remove(v);
            }
            self.marks[a * n + b] = None;
            self.marks[b * n + a] = None;
        }
        Ok(())
    }
}

const DIRECTIONS: [(Mark, Mark); 2] = [(Mark::Tail, Mark::Arrow), (Mark::Arrow, Mark::Tail)];
const MAG_EDGES: [(Mark, Mark); 3] = [
    (Mark::Tail, Mark::Arrow),
    (Mark::Arrow, Mark::Tail),
    (Mark::Arrow, Mark::Arrow),
];

fn collider_in(g: &Graph) -> impl Fn(NodeId, NodeId, NodeId) -> bool + '_ {
    move |a, mid, c| g.mark(mid, a) == Some(Mark::Arrow) && g.mark(mid, c) == Some(Mark::Arrow)
}

/// Every DAG Markov equivalent to `dag`: same skeleton and same unshielded colliders.
pub fn dag_class_of(dag: &Graph, limits: &Limits) -> Result<Vec<Graph>> {
    expect_class(dag, &[GraphClass::Dag])?;
    let options = vec![DIRECTIONS.to_vec(); dag.edge_count()];
    let triples = unshielded_triples(dag, collider_in(dag));
    OrientationSearch::new(dag, GraphClass::Dag, options, triples, limits).run()
}

/// Every MAG Markov equivalent to `mag`.
pub fn mag_class_of(mag: &Graph, limits: &Limits) -> Result<Vec<Graph>> {
    expect_class(mag, &[GraphClass::Mag])?;
    let reference = SeparationFingerprint::of(mag, limits)?;
    let options = vec![MAG_EDGES.to_vec(); mag.edge_count()];
    let triples = unshielded_triples(mag, collider_in(mag));
    let candidates =
        OrientationSearch::new(mag, GraphClass::Mag, options, triples, limits).run()?;
    Ok(candidates
        .into_iter()
        .filter(|c| reference.matches(c))
        .collect())
}

/// The CPDAG of a DAG: the mark union over its equivalence class.
pub fn cpdag_of(dag: &Graph, limits: &Limits) -> Result<Graph> {
    let members = dag_class_of(dag, limits)?;
    Ok(mark_union(&members, GraphClass::Cpdag))
}

/// The PAG of a MAG: the mark union over its equivalence class.
pub fn pag_of(mag: &Graph, limits: &Limits) -> Result<Graph> {
    let members = mag_class_of(mag, limits)?;
    Ok(mark_union(&members, GraphClass::Pag))
}

fn expect_class(g: &Graph, allowed: &[GraphClass]) -> Result<()> {
    if allowed.contains(&g.class()) {
        return Ok(());
    }
    let expected = allowed
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" or ");
    Err(Error::ClassMismatch {
        expected,
        found: g.class().to_string(),
    })
}

pub(crate) fn mark_union(members: &[Graph], class: GraphClass) -> Graph {
    let first = &members[0];
    let edges = first
        .edges()
        .into_iter()
        .map(|e| {
            let agree = |at: NodeId, other: NodeId, m: Mark| {
                members.iter().all(|g| g.mark(at, other) == Some(m))
            };
            let ma = if agree(e.a, e.b, e.mark_a) {
                e.mark_a
            } else {
                Mark::Circle
            };
            let mb = if agree(e.b, e.a, e.mark_b) {
                e.mark_b
            } else {
                Mark::Circle
            };
            Edge::new(e.a, ma, mb, e.b)
        })
        .collect();
    Graph::assemble(class, first.names().to_vec(), edges).expect("skeleton of a valid graph")
}

fn describe_mismatch(input: &Graph, union: &Graph) -> String {
    for e in input.edges() {
        let u = union.edge(e.a, e.b).expect("same skeleton");
        if u != e {
            return format!(
                "edge `{}` should be `{}` to represent its class",
                input.format_edge(&e),
                union.format_edge(&u)
            );
        }
    }
    "mark union differs from the input".into()
}

/// All DAGs represented by a CPDAG. A DAG yields its singleton class.
pub fn enumerate_dags(cpdag: &Graph) -> Result<EquivalenceClass> {
    enumerate_dags_with_limits(cpdag, &Limits::default())
}

pub fn enumerate_dags_with_limits(cpdag: &Graph, limits: &Limits) -> Result<EquivalenceClass> {
    expect_class(cpdag, &[GraphClass::Cpdag, GraphClass::Dag])?;
    if cpdag.class() == GraphClass::Dag {
        return Ok(EquivalenceClass {
            representative: cpdag.clone(),
            members: vec![cpdag.clone()],
        });
    }
    let undirected = cpdag
        .edges()
        .iter()
        .filter(|e| e.mark_a == Mark::Circle)
        .count();
    if undirected > limits.max_dag_circle_edges {
        return Err(Error::SizeCapExceeded {
            what: "undirected CPDAG edges",
            limit: limits.max_dag_circle_edges,
            actual: undirected,
        });
    }
    let options = cpdag
        .edges()
        .iter()
        .map(|e| match (e.mark_a, e.mark_b) {
            (Mark::Circle, Mark::Circle) => DIRECTIONS.to_vec(),
            fixed => vec![fixed],
        })
        .collect();
    let triples = unshielded_triples(cpdag, collider_in(cpdag));
    let members = OrientationSearch::new(cpdag, GraphClass::Dag, options, triples, limits).run()?;
    if members.is_empty() {
        return Err(Error::InvalidCpdag(
            "no acyclic orientation preserves its unshielded colliders".into(),
        ));
    }
    let union = mark_union(&members, GraphClass::Cpdag);
    if union != *cpdag {
        return Err(Error::InvalidCpdag(describe_mismatch(cpdag, &union)));
    }
    if dag_class_of(&members[0], limits)?.len() != members.len() {
        return Err(Error::InvalidCpdag(
            "a directed edge is reversible within the equivalence class".into(),
        ));
    }
    Ok(EquivalenceClass {
        representative: cpdag.clone(),
        members,
    })
}

/// All MAGs represented by a PAG: those that agree with its tails and
/// arrowheads, keep its unshielded colliders, and share one set of
/// m-separations whose mark union is the PAG itself. A MAG yields its
/// singleton class.
pub fn enumerate_mags(pag: &Graph) -> Result<EquivalenceClass> {
    enumerate_mags_with_limits(pag, &Limits::default())
}

pub fn enumerate_mags_with_limits(pag: &Graph, limits: &Limits) -> Result<EquivalenceClass> {
    expect_class(pag, &[GraphClass::Pag, GraphClass::Mag])?;
    if pag.class() == GraphClass::Mag {
        return Ok(EquivalenceClass {
            representative: pag.clone(),
            members: vec![pag.clone()],
        });
    }
    let circles = pag.circle_count();
    if circles > limits.max_mag_circle_marks {
        return Err(Error::SizeCapExceeded {
            what: "PAG circle marks",
            limit: limits.max_mag_circle_marks,
            actual: circles,
        });
    }
    let choices = |m: Mark| match m {
        Mark::Circle => vec![Mark::Tail, Mark::Arrow],
        m => vec![m],
    };
    let options = pag
        .edges()
        .iter()
        .map(|e| {
            let mut opts = Vec::new();
            for ma in choices(e.mark_a) {
                for mb in choices(e.mark_b) {
                    if GraphClass::Mag.allows(ma, mb) {
                        opts.push((ma, mb));
                    }
                }
            }
            opts
        })
        .collect();
    let triples = unshielded_triples(pag, collider_in(pag));
    let candidates =
        OrientationSearch::new(pag, GraphClass::Mag, options, triples, limits).run()?;

    let mut groups: Vec<(SeparationFingerprint, Vec<Graph>)> = Vec::new();
    for c in candidates {
        if c.inseparable_pair().is_some() {
            continue;
        }
        match groups.iter_mut().find(|(f, _)| f.matches(&c)) {
            Some((_, members)) => members.push(c),
            None => groups.push((SeparationFingerprint::of(&c, limits)?, vec![c])),
        }
    }
    if groups.is_empty() {
        return Err(Error::InvalidPag(
            "no MAG is consistent with its marks".into(),
        ));
    }
    let mut matching: Vec<Vec<Graph>> = Vec::new();
    let mut closest: Option<Graph> = None;
    for (_, members) in groups {
        let union = mark_union(&members, GraphClass::Pag);
        if union == *pag {
            matching.push(members);
        } else if closest.is_none() {
            closest = Some(union);
        }
    }
    let members = match matching.len() {
        1 => matching.pop().expect("one group"),
        0 => {
            let reason = closest
                .map(|u| describe_mismatch(pag, &u))
                .unwrap_or_else(|| "mark union differs from the input".into());
            return Err(Error::InvalidPag(reason));
        }
        _ => {
            return Err(Error::InvalidPag(
                "its marks fit more than one equivalence class".into(),
            ))
        }
    };
    Ok(EquivalenceClass {
        representative: pag.clone(),
        members,
    })
}

/// Per-endpoint mark union of pairwise Markov equivalent DAGs (giving a
/// CPDAG) or MAGs (giving a PAG): marks shared by all members are kept,
/// every other mark becomes a circle.
pub fn union_representative(members: &[Graph]) -> Result<Graph> {
    union_representative_with_limits(members, &Limits::default())
}

pub fn union_representative_with_limits(members: &[Graph], limits: &Limits) -> Result<Graph> {
    let first = members.first().ok_or(Error::NotEquivalent)?;
    let class = match first.class() {
        GraphClass::Dag => GraphClass::Cpdag,
        GraphClass::Mag => GraphClass::Pag,
        other => {
            return Err(Error::ClassMismatch {
                expected: "DAG or MAG".into(),
                found: other.to_string(),
            })
        }
    };
    for g in members {
        if g.class() != first.class() {
            return Err(Error::ClassMismatch {
                expected: first.class().to_string(),
                found: g.class().to_string(),
            });
        }
        if g.names() != first.names() {
            return Err(Error::NodeSetMismatch);
        }
        if !g.same_skeleton(first) {
            return Err(Error::SkeletonMismatch);
        }
    }
    if members.len() > 1 {
        let reference = SeparationFingerprint::of(first, limits)?;
        for g in &members[1..] {
            if SeparationFingerprint::of(g, limits)? != reference {
                return Err(Error::NotEquivalent);
            }
        }
    }
    Ok(mark_union(members, class))
}

/// Whether two DAGs (or two MAGs) imply the same m-separations.
pub fn markov_equivalent(g1: &Graph, g2: &Graph) -> Result<bool> {
    markov_equivalent_with_limits(g1, g2, &Limits::default())
}

pub fn markov_equivalent_with_limits(g1: &Graph, g2: &Graph, limits: &Limits) -> Result<bool> {
    let both = |c: GraphClass| g1.class() == c && g2.class() == c;
    if !both(GraphClass::Dag) && !both(GraphClass::Mag) {
        return Err(Error::ClassMismatch {
            expected: "two DAGs or two MAGs".into(),
            found: format!("{} and {}", g1.class(), g2.class()),
        });
    }
    let g2 = reorder_like(g2, g1)?;
    Ok(SeparationFingerprint::of(g1, limits)? == SeparationFingerprint::of(&g2, limits)?)
}

/// `g` with its nodes renumbered to follow the declaration order of `like`.
fn reorder_like(g: &Graph, like: &Graph) -> Result<Graph> {
    if g.len() != like.len() {
        return Err(Error::NodeSetMismatch);
    }
    let map = g
        .names()
        .iter()
        .map(|n| like.index(n).ok_or(Error::NodeSetMismatch))
        .collect::<Result<Vec<_>>>()?;
    let edges = g
        .edges()
        .into_iter()
        .map(|e| Edge::new(map[e.a], e.mark_a, e.mark_b, map[e.b]))
        .collect();
    Graph::assemble(g.class(), like.names().to_vec(), edges)
}

/// The MAG over `observed` representing the DAG `dag` with all other nodes
/// latent: two observed nodes are adjacent iff no set of observed nodes
/// d-separates them, and the mark at `a` on `a *-* b` is a tail iff `a` is
/// an ancestor of `b`.
pub fn latent_project(dag: &Graph, observed: NodeSet) -> Result<Graph> {
    latent_project_with_limits(dag, observed, &Limits::default())
}

pub fn latent_project_with_limits(
    dag: &Graph,
    observed: NodeSet,
    limits: &Limits,
) -> Result<Graph> {
    expect_class(dag, &[GraphClass::Dag])?;
    if let Some(v) = (observed - dag.all_nodes()).first() {
        return Err(Error::UnknownNode(format!("#{v}")));
    }
    if observed.len() > limits.max_fingerprint_nodes {
        return Err(Error::SizeCapExceeded {
            what: "observed nodes for latent projection",
            limit: limits.max_fingerprint_nodes,
            actual: observed.len(),
        });
    }
    let kept: Vec<NodeId> = observed.iter().collect();
    let names = kept.iter().map(|&v| dag.name(v).to_string()).collect();
    let mut edges = Vec::new();
    for (i, &a) in kept.iter().enumerate() {
        for (j, &b) in kept.iter().enumerate().skip(i + 1) {
            let rest = observed - NodeSet::singleton(a).with(b);
            let separable = rest
                .subsets()
                .any(|s| !connected_by_walks(dag, NodeSet::singleton(a), NodeSet::singleton(b), s));
            if separable {
                continue;
            }
            let mark = |u: NodeId, v: NodeId| {
                if dag.ancestors(NodeSet::singleton(v)).contains(u) {
                    Mark::Tail
                } else {
                    Mark::Arrow
                }
            };
            edges.push(Edge::new(i, mark(a, b), mark(b, a), j));
        }
    }
    Graph::assemble(GraphClass::Mag, names, edges)
}

/// The DAG obtained from a MAG by replacing every `a <-> b` with a fresh
/// latent `L -> a`, `L -> b`. Returns the DAG and its observed nodes, which
/// keep their indices. A DAG is returned unchanged.
pub fn canonical_dag(mag: &Graph) -> Result<(Graph, NodeSet)> {
    expect_class(mag, &[GraphClass::Mag, GraphClass::Dag])?;
    let observed = mag.all_nodes();
    if mag.class() == GraphClass::Dag {
        return Ok((mag.clone(), observed));
    }
    let mut names = mag.names().to_vec();
    let mut edges = Vec::new();
    for e in mag.edges() {
        if mag.is_bidirected(e.a, e.b) {
            let mut latent = format!("L_{}_{}", mag.name(e.a), mag.name(e.b));
            while names.contains(&latent) {
                latent.push('_');
            }
            let l = names.len();
            names.push(latent);
            edges.push(Edge::directed(l, e.a));
            edges.push(Edge::directed(l, e.b));
        } else {
            edges.push(e);
        }
    }
    let dag = Graph::assemble(GraphClass::Dag, names, edges)?;
    Ok((dag, observed))
}
