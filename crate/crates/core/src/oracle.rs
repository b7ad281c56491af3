//! Linear-Gaussian structural equation models.
//!
//! A [`LinearSEM`] over a DAG gives exact covariances and exact interventional
//! effects, so covariate adjustment can be checked without sampling: the
//! regression coefficient of `Y` on `X` given `Z` equals the total effect of
//! `X` on `Y` whenever `Z` is an adjustment set.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphClass, NodeId, NodeSet};
use crate::mec;
use crate::paths::check_query_sets;
use crate::Limits;

pub const COEFF_RANGE: (f64, f64) = (0.1, 1.5);
pub const NOISE_RANGE: (f64, f64) = (0.5, 1.5);

/// `X_j = sum_i coeff[(i, j)] X_i + e_j` with independent `e_j ~ N(0, noise_var[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSEM {
    pub dag: Graph,
    pub coeff: DMatrix<f64>,
    pub noise_var: Vec<f64>,
}

impl LinearSEM {
    pub fn new(dag: Graph, coeff: DMatrix<f64>, noise_var: Vec<f64>) -> Result<Self> {
        if dag.class() != GraphClass::Dag {
            return Err(Error::ClassMismatch {
                expected: "DAG".into(),
                found: dag.class().to_string(),
            });
        }
        let n = dag.len();
        if coeff.shape() != (n, n) || noise_var.len() != n {
            return Err(Error::InvalidSem(format!("expected {n} nodes")));
        }
        for i in 0..n {
            for j in 0..n {
                if coeff[(i, j)] != 0.0 && !dag.is_directed(i, j) {
                    return Err(Error::InvalidSem(format!(
                        "coefficient on non-edge {} -> {}",
                        dag.name(i),
                        dag.name(j)
                    )));
                }
            }
        }
        if let Some(v) = noise_var.iter().position(|&s| s.is_nan() || s <= 0.0) {
            return Err(Error::InvalidSem(format!(
                "noise variance of {} is not positive",
                dag.name(v)
            )));
        }
        Ok(LinearSEM {
            dag,
            coeff,
            noise_var,
        })
    }

    /// Builds a model from named edge weights and unit noise variances.
    pub fn with_weights(dag: Graph, weights: &[(&str, &str, f64)]) -> Result<Self> {
        let n = dag.len();
        let mut coeff = DMatrix::zeros(n, n);
        for &(a, b, w) in weights {
            coeff[(dag.node(a)?, dag.node(b)?)] = w;
        }
        LinearSEM::new(dag, coeff, vec![1.0; n])
    }
}

/// Coefficients of magnitude uniform in [0.1, 1.5] with random sign, noise
/// variances uniform in [0.5, 1.5]. Edges are drawn in [`Graph::edges`] order.
pub fn random_sem(dag: &Graph, seed: u64) -> Result<LinearSEM> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dag.len();
    let mut coeff = DMatrix::zeros(n, n);
    for e in dag.edges() {
        let (from, to) = if dag.is_directed(e.a, e.b) {
            (e.a, e.b)
        } else {
            (e.b, e.a)
        };
        let magnitude = rng.gen_range(COEFF_RANGE.0..=COEFF_RANGE.1);
        coeff[(from, to)] = if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
    }
    let noise_var = (0..n)
        .map(|_| rng.gen_range(NOISE_RANGE.0..=NOISE_RANGE.1))
        .collect();
    LinearSEM::new(dag.clone(), coeff, noise_var)
}

/// `(I - B)^-T Ω (I - B)^-1`.
pub fn covariance(sem: &LinearSEM) -> Result<DMatrix<f64>> {
    let n = sem.dag.len();
    let inv = (DMatrix::identity(n, n) - &sem.coeff)
        .try_inverse()
        .ok_or(Error::SingularMatrix)?;
    let omega = DMatrix::from_diagonal(&DVector::from_vec(sem.noise_var.clone()));
    let sigma = inv.transpose() * omega * &inv;
    // symmetrize away rounding
    Ok((&sigma + sigma.transpose()) * 0.5)
}

/// Effect of each `X_i` on `y` under `do(X)`: cut every edge into `X`, then read
/// entry `(X_i, y)` of `(I - B_cut)^-1`.
pub fn total_effect(sem: &LinearSEM, x: NodeSet, y: NodeId) -> Result<Vec<f64>> {
    check_query_sets(&sem.dag, x, NodeSet::singleton(y), NodeSet::EMPTY)?;
    let n = sem.dag.len();
    let mut cut = sem.coeff.clone();
    for v in x {
        cut.column_mut(v).fill(0.0);
    }
    let inv = (DMatrix::identity(n, n) - cut)
        .try_inverse()
        .ok_or(Error::SingularMatrix)?;
    Ok(x.iter().map(|v| inv[(v, y)]).collect())
}

/// Coefficients of `X` in the population regression of `y` on `X ∪ Z`.
pub fn adjusted_estimate(
    sigma: &DMatrix<f64>,
    x: NodeSet,
    y: NodeId,
    z: NodeSet,
) -> Result<Vec<f64>> {
    let w: Vec<NodeId> = x.iter().chain(z.iter()).collect();
    let sww = DMatrix::from_fn(w.len(), w.len(), |i, j| sigma[(w[i], w[j])]);
    let swy = DVector::from_fn(w.len(), |i, _| sigma[(w[i], y)]);
    let beta = sww.cholesky().ok_or(Error::SingularDesign)?.solve(&swy);
    Ok(beta.iter().take(x.len()).copied().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectReport {
    pub z_set: NodeSet,
    /// Index of the DAG within the class the graph represents.
    pub member: usize,
    pub trial: usize,
    pub true_effect: Vec<f64>,
    pub adjusted_estimate: Vec<f64>,
    pub max_abs_gap: f64,
}

/// The DAGs a graph stands for: itself, the members of a CPDAG, or the
/// canonical DAGs of the MAGs in a PAG's class. Observed nodes keep their
/// indices; latents come after them.
pub fn member_dags(g: &Graph, limits: &Limits) -> Result<Vec<Graph>> {
    match g.class() {
        GraphClass::Dag => Ok(vec![g.clone()]),
        GraphClass::Cpdag => Ok(mec::enumerate_dags_with_limits(g, limits)?.members),
        GraphClass::Mag => Ok(vec![mec::canonical_dag(g)?.0]),
        GraphClass::Pag => mec::enumerate_mags_with_limits(g, limits)?
            .members
            .iter()
            .map(|m| mec::canonical_dag(m).map(|(d, _)| d))
            .collect(),
    }
}

pub fn verify_adjustment(
    g: &Graph,
    x: NodeSet,
    y: NodeId,
    z: NodeSet,
    trials: usize,
    seed: u64,
) -> Result<Vec<EffectReport>> {
    verify_adjustment_with_limits(g, x, y, z, trials, seed, &Limits::default())
}

/// Compares true effect and adjusted estimate for every member DAG and
/// `trials` random models per member. Reports come in (member, trial) order.
pub fn verify_adjustment_with_limits(
    g: &Graph,
    x: NodeSet,
    y: NodeId,
    z: NodeSet,
    trials: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<EffectReport>> {
    check_query_sets(g, x, NodeSet::singleton(y), z)?;
    let members = member_dags(g, limits)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(members.len() * trials);
    for (member, dag) in members.iter().enumerate() {
        for trial in 0..trials {
            let sem = random_sem(dag, seeds.next_u64())?;
            let sigma = covariance(&sem)?;
            let true_effect = total_effect(&sem, x, y)?;
            let estimate = adjusted_estimate(&sigma, x, y, z)?;
            let max_abs_gap = true_effect
                .iter()
                .zip(&estimate)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            reports.push(EffectReport {
                z_set: z,
                member,
                trial,
                true_effect,
                adjusted_estimate: estimate,
                max_abs_gap,
            });
        }
    }
    Ok(reports)
}
