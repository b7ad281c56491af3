//! Shared helpers for the integration tests: random graph generators and
//! brute-force oracles written independently of the library algorithms.

#![allow(dead_code)]

use std::path::PathBuf;

use causal_adjust::graph::{Edge, Graph, GraphClass, NodeId, NodeSet};
use causal_adjust::io::{self, GraphDocument};
use causal_adjust::oracle::LinearSEM;
use causal_adjust::{mec, Limits};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

pub fn corpus(name: &str) -> GraphDocument {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    io::parse_graph(&text).expect("corpus file parses")
}

pub fn set(g: &Graph, names: &[&str]) -> NodeSet {
    g.node_set(names).unwrap()
}

pub fn named_sets(g: &Graph, sets: &[NodeSet]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = sets
        .iter()
        .map(|&s| {
            let mut v = g.set_names(s);
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}

pub fn expected_sets(sets: &[&[&str]]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = sets
        .iter()
        .map(|s| {
            let mut v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("V{i}")).collect()
}

/// Random DAG on `n` nodes: a random causal order, each forward pair joined
/// with probability `p`.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push(Edge::directed(order[i], order[j]));
            }
        }
    }
    Graph::build(GraphClass::Dag, names(n), edges).expect("acyclic by construction")
}

/// The CPDAG of a random DAG, rebuilt through the validating constructor.
pub fn random_cpdag(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let dag = random_dag(rng, n, p);
    let c = mec::cpdag_of(&dag, &Limits::default()).unwrap();
    Graph::build(GraphClass::Cpdag, c.names().to_vec(), c.edges()).expect("CPDAG of a DAG is valid")
}

/// A random DAG on `n + latents` nodes projected onto `n` of them.
pub fn random_mag(rng: &mut ChaCha8Rng, n: usize, latents: usize, p: f64) -> Graph {
    let dag = random_dag(rng, n + latents, p);
    let mut all: Vec<NodeId> = (0..n + latents).collect();
    all.shuffle(rng);
    let observed: NodeSet = all[..n].iter().copied().collect();
    let m = mec::latent_project(&dag, observed).unwrap();
    Graph::build(GraphClass::Mag, m.names().to_vec(), m.edges()).expect("projection is a MAG")
}

/// The PAG of a random MAG, rebuilt through the validating constructor.
/// Draws that exceed the class enumeration caps are redrawn.
pub fn random_pag(rng: &mut ChaCha8Rng, n: usize, latents: usize, p: f64) -> Graph {
    loop {
        let m = random_mag(rng, n, latents, p);
        let budget = Limits {
            max_search_steps: 200_000,
            ..Limits::default()
        };
        let pag = match mec::pag_of(&m, &budget) {
            Ok(pag) => pag,
            Err(causal_adjust::Error::SizeCapExceeded { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        match Graph::build(GraphClass::Pag, pag.names().to_vec(), pag.edges()) {
            Ok(g) => return g,
            Err(causal_adjust::Error::SizeCapExceeded { .. }) => continue,
            Err(e) => panic!("PAG of a MAG must be valid, got {e} for {pag:?} from {m:?}"),
        }
    }
}

/// d-separation in a DAG via the moral graph of the ancestral set.
pub fn d_separated_moral(g: &Graph, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
    let n = g.len();
    let parents: Vec<Vec<NodeId>> = (0..n)
        .map(|v| (0..n).filter(|&u| g.is_directed(u, v)).collect())
        .collect();
    // ancestral closure by fixed point
    let mut keep = vec![false; n];
    for v in (x | y | z).iter() {
        keep[v] = true;
    }
    loop {
        let mut changed = false;
        for v in 0..n {
            if keep[v] {
                for &u in &parents[v] {
                    if !keep[u] {
                        keep[u] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut adj = vec![vec![false; n]; n];
    for v in 0..n {
        if !keep[v] {
            continue;
        }
        for &u in &parents[v] {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        for &a in &parents[v] {
            for &b in &parents[v] {
                if a != b {
                    adj[a][b] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut stack: Vec<NodeId> = x.iter().collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        if y.contains(u) {
            return false;
        }
        for v in 0..n {
            if adj[u][v] && keep[v] && !seen[v] && !z.contains(v) {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    true
}

/// Maximality by brute force: every non-adjacent pair is m-separated by some
/// subset of the remaining nodes.
pub fn is_maximal_brute_force(g: &Graph) -> bool {
    let limits = Limits::default();
    for a in 0..g.len() {
        for b in a + 1..g.len() {
            if g.adjacent(a, b) {
                continue;
            }
            let rest = g.all_nodes().without(a).without(b);
            let separable = rest.subsets().any(|s| {
                !causal_adjust::paths::m_connected_by_paths(
                    g,
                    NodeSet::singleton(a),
                    NodeSet::singleton(b),
                    s,
                    &limits,
                )
                .unwrap()
            });
            if !separable {
                return false;
            }
        }
    }
    true
}

/// Total effect of each `x_i` on `y` by summing coefficient products over
/// directed paths that avoid the other intervened nodes.
pub fn total_effect_by_paths(sem: &LinearSEM, x: NodeSet, y: NodeId) -> Vec<f64> {
    fn walk(sem: &LinearSEM, blocked: NodeSet, cur: NodeId, y: NodeId, weight: f64, acc: &mut f64) {
        if cur == y {
            *acc += weight;
            return;
        }
        for next in 0..sem.dag.len() {
            let c = sem.coeff[(cur, next)];
            if c != 0.0 && !blocked.contains(next) {
                walk(sem, blocked, next, y, weight * c, acc);
            }
        }
    }
    x.iter()
        .map(|s| {
            let mut acc = 0.0;
            walk(sem, x.without(s), s, y, 1.0, &mut acc);
            acc
        })
        .collect()
}

/// Whether `sub` occurs in `seq` as a (not necessarily contiguous) subsequence.
pub fn is_subsequence(sub: &[NodeId], seq: &[NodeId]) -> bool {
    let mut it = seq.iter();
    sub.iter().all(|s| it.any(|t| t == s))
}

/// Concatenation of two node sequences sharing an endpoint, with loops cut
/// at the first revisit.
pub fn concat_remove_loops(p: &[NodeId], q: &[NodeId]) -> Vec<NodeId> {
    assert_eq!(p.last(), q.first());
    let joined: Vec<NodeId> = p.iter().chain(&q[1..]).copied().collect();
    let mut out: Vec<NodeId> = Vec::new();
    for v in joined {
        if let Some(pos) = out.iter().position(|&u| u == v) {
            out.truncate(pos);
        }
        out.push(v);
    }
    out
}

/// All pairs of non-empty disjoint sets of size at most `max` over `nodes`.
pub fn xy_pairs(nodes: NodeSet, max: usize) -> Vec<(NodeSet, NodeSet)> {
    let small: Vec<NodeSet> = nodes
        .subsets()
        .filter(|s| !s.is_empty() && s.len() <= max)
        .collect();
    let mut out = Vec::new();
    for &x in &small {
        for &y in &small {
            if x.is_disjoint(y) {
                out.push((x, y));
            }
        }
    }
    out
}
