//! Adjustment criteria.
//!
//! [`satisfies_gac`] decides the generalized adjustment criterion in all four
//! graph classes. [`satisfies_ac`] is the adjustment criterion for DAGs and
//! MAGs, written against directed paths and descendants only, so that the two
//! can be compared on the members of an equivalence class.
//! [`satisfies_generalized_backdoor`] is the older, merely sufficient
//! generalized back-door criterion.
//!
//! Queries about many candidate sets for the same `(X, Y)` should go through
//! [`GacAnalysis`] (or [`AcAnalysis`], [`BackdoorAnalysis`]), which enumerate the
//! relevant paths once.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, GraphClass, Mark, NodeId, NodeSet};
use crate::paths::{self, check_query_sets, enumerate_paths, Causality, Path, PathFilter};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    Cond0,
    Cond1,
    Cond2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Cond0 => "Cond0",
            Condition::Cond1 => "Cond1",
            Condition::Cond2 => "Cond2",
        };
        f.write_str(s)
    }
}

/// Evidence for a failed condition: a violating path, or a forbidden node in `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Path(Path),
    Node(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustmentVerdict {
    pub passed: bool,
    pub failed_condition: Option<Condition>,
    pub witness: Option<Witness>,
}

impl AdjustmentVerdict {
    fn pass() -> Self {
        AdjustmentVerdict {
            passed: true,
            failed_condition: None,
            witness: None,
        }
    }

    fn fail(condition: Condition, witness: Witness) -> Self {
        AdjustmentVerdict {
            passed: false,
            failed_condition: Some(condition),
            witness: Some(witness),
        }
    }
}

/// Nodes that may not appear in an adjustment set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForbiddenSet {
    pub nodes: NodeSet,
}

/// Visibility of the directed edge `from -> to`. Every directed edge of a DAG
/// or CPDAG is visible. In a MAG or PAG the edge is visible iff some node `V`
/// not adjacent to `to` has an edge into `from`, or a collider path into
/// `from` whose interior nodes are all parents of `to`.
pub fn is_visible(g: &Graph, e: &Edge) -> Result<bool> {
    let (from, to) = match (e.mark_a, e.mark_b) {
        (Mark::Tail, Mark::Arrow) => (e.a, e.b),
        (Mark::Arrow, Mark::Tail) => (e.b, e.a),
        _ => return Err(Error::NotDirectedEdge(g.format_edge(e))),
    };
    if !g.is_directed(from, to) {
        return Err(Error::NotDirectedEdge(g.format_edge(e)));
    }
    Ok(visible(g, from, to))
}

pub(crate) fn visible(g: &Graph, from: NodeId, to: NodeId) -> bool {
    if matches!(g.class(), GraphClass::Dag | GraphClass::Cpdag) {
        return true;
    }
    // Breadth-first search backwards from `from` over nodes that may serve as
    // colliders; any walk found here shortens to a collider path.
    let mut seen = NodeSet::singleton(from).with(to);
    let mut queue = VecDeque::from([from]);
    while let Some(cur) = queue.pop_front() {
        for w in g.neighbors(cur) - seen {
            if g.mark(cur, w) != Some(Mark::Arrow) {
                continue;
            }
            if !g.adjacent(w, to) {
                return true;
            }
            if g.is_directed(w, to) && g.mark(w, cur) == Some(Mark::Arrow) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    false
}

/// A shortest proper possibly directed path from `x` to `y` that does not
/// start with a visible edge out of `x`, or `None` if the graph is amenable.
pub fn amenability_witness(g: &Graph, x: NodeSet, y: NodeSet) -> Result<Option<Path>> {
    check_query_sets(g, x, y, NodeSet::EMPTY)?;
    let mut best: Option<Vec<NodeId>> = None;
    for s in x {
        for v in g.neighbors(s) - x {
            if g.mark(s, v) == Some(Mark::Arrow) {
                continue;
            }
            if g.is_directed(s, v) && visible(g, s, v) {
                continue;
            }
            if let Some(rest) = shortest_possibly_directed(g, v, y, x) {
                if best.as_ref().is_none_or(|b| rest.len() + 1 < b.len()) {
                    let mut p = vec![s];
                    p.extend(rest);
                    best = Some(p);
                }
            }
        }
    }
    Ok(best.map(Path::from_vec_unchecked))
}

fn shortest_possibly_directed(
    g: &Graph,
    start: NodeId,
    y: NodeSet,
    avoid: NodeSet,
) -> Option<Vec<NodeId>> {
    let mut prev = vec![usize::MAX; g.len()];
    let mut seen = avoid.with(start);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if y.contains(u) {
            let mut p = vec![u];
            let mut w = u;
            while w != start {
                w = prev[w];
                p.push(w);
            }
            p.reverse();
            return Some(p);
        }
        for v in g.neighbors(u) - seen {
            if g.mark(u, v) != Some(Mark::Arrow) {
                seen.insert(v);
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

pub fn is_amenable(g: &Graph, x: NodeSet, y: NodeSet) -> Result<bool> {
    amenability_witness(g, x, y).map(|w| w.is_none())
}

pub fn forbidden_set(g: &Graph, x: NodeSet, y: NodeSet) -> Result<ForbiddenSet> {
    forbidden_set_with_limits(g, x, y, &Limits::default())
}

/// Possible descendants of every node outside `x` lying on a proper possibly
/// causal path from `x` to `y`.
pub fn forbidden_set_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    limits: &Limits,
) -> Result<ForbiddenSet> {
    check_query_sets(g, x, y, NodeSet::EMPTY)?;
    let paths = enumerate_paths(
        g,
        x,
        y,
        PathFilter::proper(Causality::PossiblyCausal),
        limits,
    )?;
    let on_paths: NodeSet = paths
        .iter()
        .flat_map(|p| p.nodes().iter().copied())
        .collect();
    Ok(ForbiddenSet {
        nodes: g.possible_descendants(on_paths - x),
    })
}

/// A definite status path reduced to what blocking depends on.
#[derive(Debug, Clone)]
struct CompiledPath {
    path: Path,
    non_colliders: NodeSet,
    // descendants of each collider, the collider included
    collider_descendants: Vec<NodeSet>,
}

impl CompiledPath {
    fn new(g: &Graph, path: Path) -> Self {
        let mut non_colliders = NodeSet::EMPTY;
        let mut collider_descendants = Vec::new();
        for (i, &v) in path.nodes().iter().enumerate().skip(1).take(path.len() - 2) {
            match paths::status_at(g, &path, i).expect("interior index") {
                paths::NodePathStatus::Collider => {
                    collider_descendants.push(g.directed_reach(NodeSet::singleton(v)))
                }
                _ => {
                    non_colliders.insert(v);
                }
            }
        }
        CompiledPath {
            path,
            non_colliders,
            collider_descendants,
        }
    }

    fn blocked_by(&self, z: NodeSet) -> bool {
        !self.non_colliders.is_disjoint(z)
            || self.collider_descendants.iter().any(|d| d.is_disjoint(z))
    }
}

/// The generalized adjustment criterion for one `(X, Y)`, ready to test
/// candidate sets.
#[derive(Debug, Clone)]
pub struct GacAnalysis {
    x: NodeSet,
    y: NodeSet,
    not_amenable: Option<Path>,
    forbidden: NodeSet,
    non_causal: Vec<CompiledPath>,
}

impl GacAnalysis {
    pub fn new(g: &Graph, x: NodeSet, y: NodeSet, limits: &Limits) -> Result<Self> {
        check_query_sets(g, x, y, NodeSet::EMPTY)?;
        let not_amenable = amenability_witness(g, x, y)?;
        let forbidden = forbidden_set_with_limits(g, x, y, limits)?.nodes;
        let non_causal =
            enumerate_paths(g, x, y, PathFilter::proper_definite_non_causal(), limits)?
                .into_iter()
                .map(|p| CompiledPath::new(g, p))
                .collect();
        Ok(GacAnalysis {
            x,
            y,
            not_amenable,
            forbidden,
            non_causal,
        })
    }

    pub fn is_amenable(&self) -> bool {
        self.not_amenable.is_none()
    }

    pub fn forbidden(&self) -> NodeSet {
        self.forbidden
    }

    /// Proper definite status non-causal paths from `X` to `Y`.
    pub fn non_causal_paths(&self) -> impl Iterator<Item = &Path> {
        self.non_causal.iter().map(|c| &c.path)
    }

    /// Verdict for `z`, reporting the first failing condition in order.
    /// `z` must be disjoint from `X` and `Y`.
    pub fn check(&self, z: NodeSet) -> AdjustmentVerdict {
        debug_assert!(z.is_disjoint(self.x | self.y));
        if let Some(p) = &self.not_amenable {
            return AdjustmentVerdict::fail(Condition::Cond0, Witness::Path(p.clone()));
        }
        if let Some(v) = (z & self.forbidden).first() {
            return AdjustmentVerdict::fail(Condition::Cond1, Witness::Node(v));
        }
        match self.non_causal.iter().find(|c| !c.blocked_by(z)) {
            Some(c) => AdjustmentVerdict::fail(Condition::Cond2, Witness::Path(c.path.clone())),
            None => AdjustmentVerdict::pass(),
        }
    }
}

pub fn satisfies_gac(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<AdjustmentVerdict> {
    satisfies_gac_with_limits(g, x, y, z, &Limits::default())
}

pub fn satisfies_gac_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
    limits: &Limits,
) -> Result<AdjustmentVerdict> {
    check_query_sets(g, x, y, z)?;
    Ok(GacAnalysis::new(g, x, y, limits)?.check(z))
}

/// The adjustment criterion for DAGs and MAGs, phrased with causal paths and
/// descendants.
#[derive(Debug, Clone)]
pub struct AcAnalysis {
    x: NodeSet,
    y: NodeSet,
    not_amenable: Option<Path>,
    forbidden: NodeSet,
    non_causal: Vec<CompiledPath>,
}

impl AcAnalysis {
    pub fn new(g: &Graph, x: NodeSet, y: NodeSet, limits: &Limits) -> Result<Self> {
        if g.class().is_partial() {
            return Err(Error::ClassMismatch {
                expected: "DAG or MAG".into(),
                found: g.class().to_string(),
            });
        }
        check_query_sets(g, x, y, NodeSet::EMPTY)?;
        let causal = enumerate_paths(g, x, y, PathFilter::proper(Causality::Causal), limits)?;
        let not_amenable = causal
            .iter()
            .filter(|p| !visible(g, p.first(), p.nodes()[1]))
            .min_by_key(|p| p.len())
            .cloned();
        let on_causal: NodeSet = causal
            .iter()
            .flat_map(|p| p.nodes().iter().copied())
            .collect();
        let forbidden = g.descendants(on_causal - x)?;
        // every path of a DAG or MAG is of definite status
        let non_causal =
            enumerate_paths(g, x, y, PathFilter::proper(Causality::NonCausal), limits)?
                .into_iter()
                .map(|p| CompiledPath::new(g, p))
                .collect();
        Ok(AcAnalysis {
            x,
            y,
            not_amenable,
            forbidden,
            non_causal,
        })
    }

    pub fn check(&self, z: NodeSet) -> AdjustmentVerdict {
        debug_assert!(z.is_disjoint(self.x | self.y));
        if let Some(p) = &self.not_amenable {
            return AdjustmentVerdict::fail(Condition::Cond0, Witness::Path(p.clone()));
        }
        if let Some(v) = (z & self.forbidden).first() {
            return AdjustmentVerdict::fail(Condition::Cond1, Witness::Node(v));
        }
        match self.non_causal.iter().find(|c| !c.blocked_by(z)) {
            Some(c) => AdjustmentVerdict::fail(Condition::Cond2, Witness::Path(c.path.clone())),
            None => AdjustmentVerdict::pass(),
        }
    }
}

pub fn satisfies_ac(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<AdjustmentVerdict> {
    satisfies_ac_with_limits(g, x, y, z, &Limits::default())
}

pub fn satisfies_ac_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
    limits: &Limits,
) -> Result<AdjustmentVerdict> {
    let analysis = AcAnalysis::new(g, x, y, limits)?;
    check_query_sets(g, x, y, z)?;
    Ok(analysis.check(z))
}

/// The generalized back-door criterion: `Z` has no possible descendant of
/// `X`, and for every `x` in `X`, `Z ∪ X∖{x}` blocks every definite status
/// path from `x` to `Y` that does not start with a visible edge out of `x`.
/// A possible descendant in `Z` is reported as `Cond1`, an open path as `Cond2`.
#[derive(Debug, Clone)]
pub struct BackdoorAnalysis {
    x: NodeSet,
    y: NodeSet,
    descendants_of_x: NodeSet,
    // (treatment node, path starting there)
    paths: Vec<(NodeId, CompiledPath)>,
}

impl BackdoorAnalysis {
    pub fn new(g: &Graph, x: NodeSet, y: NodeSet, limits: &Limits) -> Result<Self> {
        check_query_sets(g, x, y, NodeSet::EMPTY)?;
        let filter = PathFilter {
            definite_status: true,
            ..PathFilter::ALL
        };
        let mut paths = Vec::new();
        for s in x {
            for p in enumerate_paths(g, NodeSet::singleton(s), y, filter, limits)? {
                let next = p.nodes()[1];
                if g.is_directed(s, next) && visible(g, s, next) {
                    continue;
                }
                paths.push((s, CompiledPath::new(g, p)));
            }
        }
        Ok(BackdoorAnalysis {
            x,
            y,
            descendants_of_x: g.possible_descendants(x),
            paths,
        })
    }

    pub fn check(&self, z: NodeSet) -> AdjustmentVerdict {
        debug_assert!(z.is_disjoint(self.x | self.y));
        if let Some(v) = (z & self.descendants_of_x).first() {
            return AdjustmentVerdict::fail(Condition::Cond1, Witness::Node(v));
        }
        for (s, c) in &self.paths {
            if !c.blocked_by(z | self.x.without(*s)) {
                return AdjustmentVerdict::fail(Condition::Cond2, Witness::Path(c.path.clone()));
            }
        }
        AdjustmentVerdict::pass()
    }
}

pub fn satisfies_generalized_backdoor(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
) -> Result<AdjustmentVerdict> {
    satisfies_generalized_backdoor_with_limits(g, x, y, z, &Limits::default())
}

pub fn satisfies_generalized_backdoor_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
    limits: &Limits,
) -> Result<AdjustmentVerdict> {
    check_query_sets(g, x, y, z)?;
    Ok(BackdoorAnalysis::new(g, x, y, limits)?.check(z))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ListOptions {
    pub minimal_only: bool,
    pub max_size: Option<usize>,
}

/// Every set satisfying the generalized adjustment criterion, smallest first.
/// Forbidden nodes are excluded from the search up front.
pub fn list_adjustment_sets(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    opts: ListOptions,
) -> Result<Vec<NodeSet>> {
    list_adjustment_sets_with_limits(g, x, y, opts, &Limits::default())
}

pub fn list_adjustment_sets_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    opts: ListOptions,
    limits: &Limits,
) -> Result<Vec<NodeSet>> {
    let analysis = GacAnalysis::new(g, x, y, limits)?;
    if !analysis.is_amenable() {
        return Ok(Vec::new());
    }
    let candidates = g.all_nodes() - x - y - analysis.forbidden();
    search_lattice(candidates, opts, limits, |z| analysis.check(z).passed)
}

/// Every set satisfying the generalized back-door criterion, searched over
/// all subsets of the nodes outside `X ∪ Y`.
pub fn list_backdoor_sets(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    opts: ListOptions,
) -> Result<Vec<NodeSet>> {
    list_backdoor_sets_with_limits(g, x, y, opts, &Limits::default())
}

pub fn list_backdoor_sets_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeSet,
    opts: ListOptions,
    limits: &Limits,
) -> Result<Vec<NodeSet>> {
    let analysis = BackdoorAnalysis::new(g, x, y, limits)?;
    let candidates = g.all_nodes() - x - y;
    search_lattice(candidates, opts, limits, |z| analysis.check(z).passed)
}

fn search_lattice(
    candidates: NodeSet,
    opts: ListOptions,
    limits: &Limits,
    passes: impl Fn(NodeSet) -> bool,
) -> Result<Vec<NodeSet>> {
    if candidates.len() > limits.max_candidate_nodes {
        return Err(Error::SizeCapExceeded {
            what: "candidate adjustment nodes",
            limit: limits.max_candidate_nodes,
            actual: candidates.len(),
        });
    }
    let mut found: Vec<NodeSet> = candidates
        .subsets()
        .filter(|z| opts.max_size.is_none_or(|m| z.len() <= m))
        .filter(|&z| passes(z))
        .collect();
    sort_sets(&mut found);
    if opts.minimal_only {
        let mut minimal: Vec<NodeSet> = Vec::new();
        for z in found {
            if !minimal.iter().any(|m| m.is_subset(z)) {
                minimal.push(z);
            }
        }
        found = minimal;
    }
    Ok(found)
}

/// Sorts by size, then lexicographically by member indices.
pub fn sort_sets(sets: &mut [NodeSet]) {
    sets.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
}
