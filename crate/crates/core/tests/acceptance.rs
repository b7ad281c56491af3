//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS or FAIL line; exits non-zero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use causal_adjust::criteria::{
    self, is_visible, list_adjustment_sets, list_backdoor_sets, satisfies_gac, AcAnalysis,
    GacAnalysis, ListOptions, Witness,
};
use causal_adjust::graph::{Graph, GraphClass, NodeSet};
use causal_adjust::paths::{m_connected_by_paths, m_connected_by_walks};
use causal_adjust::{mec, oracle, Limits};
use common::{corpus, expected_sets, named_sets, set};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, bound: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < bound, || {
        format!("{what} took {elapsed:.2?}, bound {bound:?}")
    })
}

fn all_sets(g: &Graph, x: NodeSet, y: NodeSet) -> Vec<NodeSet> {
    let mut v = list_adjustment_sets(g, x, y, ListOptions::default()).unwrap();
    criteria::sort_sets(&mut v);
    v
}

fn golden_cpdag_listing() -> Outcome {
    let g = corpus("fig1a.cg").graph;
    let t = Instant::now();
    let sets = all_sets(&g, set(&g, &["X"]), set(&g, &["Y"]));
    within(t.elapsed(), Duration::from_secs(1), "list")?;
    let want = expected_sets(&[
        &["Z", "A"],
        &["Z", "B"],
        &["Z", "A", "I"],
        &["Z", "B", "I"],
        &["Z", "A", "B"],
        &["Z", "A", "B", "I"],
    ]);
    let got = named_sets(&g, &sets);
    ensure(got == want, || format!("got {got:?}"))?;
    Ok(format!("{} sets in {:.2?}", got.len(), t.elapsed()))
}

fn golden_pag_listing() -> Outcome {
    let a = corpus("fig4a.cg").graph;
    let b = corpus("fig4b.cg").graph;
    let mut times = Vec::new();
    for (g, want) in [
        (
            &a,
            expected_sets(&[&["V3"], &["V1", "V3"], &["V2", "V3"], &["V1", "V2", "V3"]]),
        ),
        (&b, Vec::new()),
    ] {
        let (x, y) = (set(g, &["X"]), set(g, &["Y"]));
        let t = Instant::now();
        let got = named_sets(g, &all_sets(g, x, y));
        let forb = criteria::forbidden_set(g, x, y).unwrap().nodes;
        within(t.elapsed(), Duration::from_secs(1), "list")?;
        times.push(t.elapsed());
        ensure(got == want, || format!("got {got:?}, want {want:?}"))?;
        ensure(forb == set(g, &["V4", "Y"]), || {
            format!("forbidden {:?}", g.set_names(forb))
        })?;
    }
    Ok(format!(
        "fig4a 4 sets, fig4b none, forbidden {{V4, Y}} in {times:.2?}"
    ))
}

fn golden_backdoor_comparison() -> Outcome {
    let t = Instant::now();
    for name in ["fig5a.cg", "fig5b.cg"] {
        let g = corpus(name).graph;
        let (x, y) = (set(&g, &["X1", "X2"]), set(&g, &["Y"]));
        let backdoor = list_backdoor_sets(&g, x, y, ListOptions::default()).unwrap();
        ensure(backdoor.is_empty(), || {
            format!("{name}: back-door sets {:?}", named_sets(&g, &backdoor))
        })?;
        let v = satisfies_gac(&g, x, y, set(&g, &["V1", "V2"])).unwrap();
        ensure(v.passed, || {
            format!("{name}: {{V1, V2}} fails {:?}", v.failed_condition)
        })?;
    }
    let g = corpus("fig5b.cg").graph;
    let got = named_sets(&g, &all_sets(&g, set(&g, &["X1", "X2"]), set(&g, &["Y"])));
    let want = expected_sets(&[
        &["V1", "V2"],
        &["V1", "V2", "V3"],
        &["V1", "V2", "V4"],
        &["V1", "V2", "V3", "V4"],
    ]);
    ensure(got == want, || format!("fig5b sets {got:?}"))?;
    within(t.elapsed(), Duration::from_secs(5), "comparison")?;
    Ok(format!(
        "no back-door set, GAC holds for {{V1, V2}}, fig5b 4 sets in {:.2?}",
        t.elapsed()
    ))
}

fn amenability_and_visibility() -> Outcome {
    let path_witness = |name: &str| {
        let g = corpus(name).graph;
        let w = criteria::amenability_witness(&g, set(&g, &["X"]), set(&g, &["Y"])).unwrap();
        (g.clone(), w.map(|p| p.names(&g)))
    };
    let (_, w3a) = path_witness("fig3a.cg");
    ensure(w3a == Some(vec!["X".into(), "Y".into()]), || {
        format!("fig3a witness {w3a:?}")
    })?;
    let (g3b, w3b) = path_witness("fig3b.cg");
    ensure(w3b == Some(vec!["X".into(), "Y".into()]), || {
        format!("fig3b witness {w3b:?}")
    })?;
    let xy = g3b
        .edge(g3b.node("X").unwrap(), g3b.node("Y").unwrap())
        .unwrap();
    ensure(!is_visible(&g3b, &xy).unwrap(), || {
        "fig3b X -> Y visible".into()
    })?;
    let as_dag = Graph::build(GraphClass::Dag, g3b.names().to_vec(), g3b.edges()).unwrap();
    ensure(
        criteria::is_amenable(&as_dag, set(&as_dag, &["X"]), set(&as_dag, &["Y"])).unwrap(),
        || "fig3b read as a DAG is not amenable".into(),
    )?;

    let g3c = corpus("fig3c.cg").graph;
    let (x, y) = (g3c.node("X").unwrap(), g3c.node("Y").unwrap());
    ensure(
        criteria::is_amenable(&g3c, NodeSet::singleton(x), NodeSet::singleton(y)).unwrap(),
        || "fig3c not amenable".into(),
    )?;
    for to in ["Y", "V2"] {
        let e = g3c.edge(x, g3c.node(to).unwrap()).unwrap();
        ensure(is_visible(&g3c, &e).unwrap(), || {
            format!("fig3c X -> {to} invisible")
        })?;
    }
    let v = satisfies_gac(
        &g3c,
        NodeSet::singleton(x),
        NodeSet::singleton(y),
        NodeSet::EMPTY,
    )
    .unwrap();
    ensure(v.passed, || {
        format!("fig3c empty set fails {:?}", v.failed_condition)
    })?;

    let v = satisfies_gac(&g3b, set(&g3b, &["X"]), set(&g3b, &["Y"]), NodeSet::EMPTY).unwrap();
    ensure(
        v.failed_condition == Some(criteria::Condition::Cond0)
            && matches!(&v.witness, Some(Witness::Path(p)) if p.names(&g3b) == ["X", "Y"]),
        || format!("fig3b verdict {v:?}"),
    )?;

    for name in ["fig2-left.cg", "fig2-right.cg"] {
        let g = corpus(name).graph;
        let e = g.edge(g.node("X").unwrap(), g.node("Y").unwrap()).unwrap();
        ensure(is_visible(&g, &e).unwrap(), || {
            format!("{name}: X -> Y invisible")
        })?;
    }
    Ok("fig3a, fig3b not amenable with witness X-Y; fig3c amenable, empty set adjusts; fig2 edges visible".into())
}

fn cpdag_class_size() -> Outcome {
    let g = corpus("fig1a.cg").graph;
    let class = mec::enumerate_dags(&g).unwrap();
    ensure(class.len() == 8, || format!("{} members", class.len()))?;
    let union = mec::union_representative(&class.members).unwrap();
    ensure(union == g, || format!("union {union:?}"))?;
    Ok("8 DAGs, mark union equals the input".into())
}

/// Compares the criterion on `rep` with the adjustment criterion on every
/// member, for all (X, Y) with |X|, |Y| <= 2 and every Z. Returns the number of
/// comparisons and the first discrepancy.
fn bridge(rep: &Graph, members: &[Graph]) -> (usize, Option<String>) {
    let limits = Limits::default();
    let mut checks = 0;
    for (x, y) in common::xy_pairs(rep.all_nodes(), 2) {
        let gac = GacAnalysis::new(rep, x, y, &limits).unwrap();
        let acs: Vec<AcAnalysis> = members
            .iter()
            .map(|m| AcAnalysis::new(m, x, y, &limits).unwrap())
            .collect();
        for z in (rep.all_nodes() - x - y).subsets() {
            checks += 1;
            let lhs = gac.check(z).passed;
            let rhs = acs.iter().all(|a| a.check(z).passed);
            if lhs != rhs {
                return (
                    checks,
                    Some(format!(
                        "{rep:?} X={:?} Y={:?} Z={:?}: GAC {lhs}, AC on all members {rhs}",
                        rep.set_names(x),
                        rep.set_names(y),
                        rep.set_names(z)
                    )),
                );
            }
        }
    }
    (checks, None)
}

fn class_member_bridge() -> Outcome {
    let t = Instant::now();
    let mut rng = common::rng(0x3_4);
    let (mut checks, mut nontrivial) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(3..=6);
        let p = rng.gen_range(0.3..0.8);
        let c = common::random_cpdag(&mut rng, n, p);
        let members = mec::enumerate_dags(&c).unwrap().members;
        nontrivial += usize::from(members.len() > 1);
        let (k, bad) = bridge(&c, &members);
        checks += k;
        if let Some(b) = bad {
            return Err(format!("CPDAG discrepancy: {b}"));
        }
    }
    let mut pag_checks = 0;
    let mut pag_nontrivial = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=5);
        let latents = rng.gen_range(0..=2);
        let p = rng.gen_range(0.3..0.7);
        let g = common::random_pag(&mut rng, n, latents, p);
        let members = mec::enumerate_mags(&g).unwrap().members;
        pag_nontrivial += usize::from(members.len() > 1);
        let (k, bad) = bridge(&g, &members);
        pag_checks += k;
        if let Some(b) = bad {
            return Err(format!("PAG discrepancy: {b}"));
        }
    }
    within(t.elapsed(), Duration::from_secs(600), "bridge")?;
    Ok(format!(
        "200 CPDAGs ({nontrivial} with >1 member, {checks} queries), 100 PAGs ({pag_nontrivial} with >1 member, {pag_checks} queries), 0 discrepancies in {:.1?}",
        t.elapsed()
    ))
}

fn oracle_soundness_and_completeness() -> Outcome {
    let t = Instant::now();
    let queries: [(&str, &[&str]); 5] = [
        ("fig1a.cg", &["X"]),
        ("fig4a.cg", &["X"]),
        ("fig4b.cg", &["X"]),
        ("fig5a.cg", &["X1", "X2"]),
        ("fig5b.cg", &["X1", "X2"]),
    ];
    let (mut sound, mut complete) = (0, 0);
    let mut worst_pass: f64 = 0.0;
    let mut weakest_fail = f64::INFINITY;
    for (name, xs) in queries {
        let g = corpus(name).graph;
        let (x, y) = (set(&g, xs), g.node("Y").unwrap());
        ensure(
            criteria::is_amenable(&g, x, NodeSet::singleton(y)).unwrap(),
            || format!("{name} not amenable"),
        )?;
        for z in (g.all_nodes() - x).without(y).subsets() {
            let passed = satisfies_gac(&g, x, NodeSet::singleton(y), z)
                .unwrap()
                .passed;
            if passed {
                let reports = oracle::verify_adjustment(&g, x, y, z, 20, 1).unwrap();
                let gap = reports.iter().map(|r| r.max_abs_gap).fold(0.0, f64::max);
                worst_pass = worst_pass.max(gap);
                ensure(gap <= 1e-8, || {
                    format!("{name} Z={:?}: gap {gap:e}", g.set_names(z))
                })?;
                sound += 1;
            } else {
                let mut best = 0.0f64;
                for reseed in 0..=5u64 {
                    let reports = oracle::verify_adjustment(&g, x, y, z, 20, 100 + reseed).unwrap();
                    best = best.max(reports.iter().map(|r| r.max_abs_gap).fold(0.0, f64::max));
                    if best >= 1e-3 {
                        break;
                    }
                }
                weakest_fail = weakest_fail.min(best);
                ensure(best >= 1e-3, || {
                    format!(
                        "{name} Z={:?}: failing set with max gap {best:e}",
                        g.set_names(z)
                    )
                })?;
                complete += 1;
            }
        }
    }
    within(t.elapsed(), Duration::from_secs(120), "oracle")?;
    Ok(format!(
        "{sound} passing sets with max gap {worst_pass:.1e}, {complete} failing sets each with gap >= {weakest_fail:.2} in {:.1?}",
        t.elapsed()
    ))
}

fn random_query(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> (NodeSet, NodeSet, NodeSet) {
    loop {
        let (mut x, mut y, mut z) = (NodeSet::EMPTY, NodeSet::EMPTY, NodeSet::EMPTY);
        for v in 0..n {
            match rng.gen_range(0..6) {
                0 => x.insert(v),
                1 => y.insert(v),
                2 | 3 => z.insert(v),
                _ => false,
            };
        }
        if !x.is_empty() && !y.is_empty() {
            return (x, y, z);
        }
    }
}

fn dual_m_separation() -> Outcome {
    let limits = Limits::default();
    let mut rng = common::rng(0x8);
    let mut queries = 0;
    let mut dag_queries = 0;
    let mut connected = 0;
    let t = Instant::now();
    let mut round = 0;
    while queries < 10_000 {
        let n = rng.gen_range(2..=8);
        let p = rng.gen_range(0.2..0.6);
        let latents = rng.gen_range(0..=2);
        let g = match round % 4 {
            0 => common::random_dag(&mut rng, n, p),
            1 => common::random_cpdag(&mut rng, n, p),
            2 => common::random_mag(&mut rng, n, latents, p),
            _ => common::random_pag(&mut rng, n.min(6), latents, p),
        };
        round += 1;
        for _ in 0..25 {
            let (x, y, z) = random_query(&mut rng, g.len());
            let walks = m_connected_by_walks(&g, x, y, z).unwrap();
            let paths = m_connected_by_paths(&g, x, y, z, &limits).unwrap();
            ensure(walks == paths, || {
                format!(
                    "{g:?} X={:?} Y={:?} Z={:?}: walks {walks}, paths {paths}",
                    g.set_names(x),
                    g.set_names(y),
                    g.set_names(z)
                )
            })?;
            if g.class() == GraphClass::Dag {
                let moral = !common::d_separated_moral(&g, x, y, z);
                ensure(moral == walks, || format!("{g:?}: moral graph disagrees"))?;
                dag_queries += 1;
            }
            connected += usize::from(walks);
            queries += 1;
        }
    }
    Ok(format!(
        "{queries} queries ({connected} connected, {dag_queries} also against the moral graph), 0 disagreements in {:.1?}",
        t.elapsed()
    ))
}

fn latent_projection() -> Outcome {
    let mut rng = common::rng(0x9);
    let t = Instant::now();
    let mut statements = 0;
    let mut bidirected = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=7);
        let latents = rng.gen_range(0..=3.min(n - 2));
        let p = rng.gen_range(0.3..0.7);
        let d = common::random_dag(&mut rng, n, p);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let observed: NodeSet = order[latents..].iter().copied().collect();
        let m = mec::latent_project(&d, observed).unwrap();
        let kept: Vec<usize> = observed.iter().collect();
        Graph::build(GraphClass::Mag, m.names().to_vec(), m.edges())
            .map_err(|e| format!("projection of {d:?} is not a MAG: {e}"))?;
        ensure(common::is_maximal_brute_force(&m), || {
            format!("{m:?} not maximal")
        })?;
        bidirected += m
            .edges()
            .iter()
            .filter(|e| m.is_bidirected(e.a, e.b))
            .count();
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                let rest = m.all_nodes().without(a).without(b);
                for s in rest.subsets() {
                    let in_d: NodeSet = s.iter().map(|i| kept[i]).collect();
                    let dsep = common::d_separated_moral(
                        &d,
                        NodeSet::singleton(kept[a]),
                        NodeSet::singleton(kept[b]),
                        in_d,
                    );
                    let msep = !m_connected_by_paths(
                        &m,
                        NodeSet::singleton(a),
                        NodeSet::singleton(b),
                        s,
                        &Limits::default(),
                    )
                    .unwrap();
                    ensure(dsep == msep, || {
                        format!("{d:?} -> {m:?}: {a} {b} | {:?}", m.set_names(s))
                    })?;
                    statements += 1;
                }
            }
        }
        let (canon, obs) = mec::canonical_dag(&m).unwrap();
        let back = mec::latent_project(&canon, obs).unwrap();
        ensure(back == m, || {
            format!("canonical DAG of {m:?} projects to {back:?}")
        })?;
    }
    Ok(format!(
        "100 DAGs, {statements} separation statements preserved, {bidirected} bidirected edges, canonical DAGs round-trip in {:.1?}",
        t.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("golden enumeration, fig1a", golden_cpdag_listing),
        ("golden enumeration, fig4a and fig4b", golden_pag_listing),
        (
            "golden back-door comparison, fig5a and fig5b",
            golden_backdoor_comparison,
        ),
        (
            "amenability and visibility, fig2 and fig3",
            amenability_and_visibility,
        ),
        ("class size, fig1a", cpdag_class_size),
        (
            "criterion on class equals criterion on every member",
            class_member_bridge,
        ),
        (
            "linear SEM oracle soundness and completeness",
            oracle_soundness_and_completeness,
        ),
        ("dual m-separation implementations", dual_m_separation),
        ("latent projection", latent_projection),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("PASS {}. {name}: {detail}", i + 1),
            Ok(Err(reason)) => {
                failed += 1;
                println!("FAIL {}. {name}: {reason}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {}. {name}: panicked", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
