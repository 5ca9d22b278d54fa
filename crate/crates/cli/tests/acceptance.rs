//! Acceptance suite: ten end-to-end criteria, each with a time limit.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use mcbnc_core::synth::{instance, rng};
use mcbnc_core::{
    best_edge, criticality, d_separated, dag_to_cpdag, fuse, graph_at_theta, minimal_imap, moralize,
    na_set, pdag_to_dag, remove_cut_edges, run, select_theta, smhd, treewidth_upper, Config, Dag,
    FusionInput, GenConstraints, NodeId, NodeOrder, NodeSet, Pdag, Score, Trajectory,
};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn wxyz() -> NodeSet {
    NodeSet::new(["w", "x", "y", "z"]).unwrap()
}

fn dag(es: &[(&str, &str)]) -> Dag {
    Dag::from_labels(wxyz(), es).unwrap()
}

fn id(label: &str) -> NodeId {
    wxyz().id(label).unwrap()
}

fn example_inputs() -> Vec<Dag> {
    vec![
        dag(&[("w", "x"), ("x", "y"), ("y", "z")]),
        dag(&[("w", "x"), ("w", "y"), ("x", "z")]),
        dag(&[("w", "x"), ("y", "x"), ("x", "z")]),
    ]
}

fn example_sigma() -> NodeOrder {
    NodeOrder::from_labels(&wxyz(), ["w", "y", "x", "z"]).unwrap()
}

fn skeleton_labels(p: &Pdag) -> BTreeSet<(String, String)> {
    p.skeleton()
        .edges()
        .map(|(a, b)| (p.nodes().label(a).to_string(), p.nodes().label(b).to_string()))
        .collect()
}

fn pairs(es: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    es.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn worked_example() -> Outcome {
    let inputs = example_inputs();
    let input = FusionInput::new(inputs.clone()).with_ordering(example_sigma());
    let f = fuse(&input).map_err(|e| e.to_string())?;
    let e_plus = dag(&[("w", "x"), ("w", "y"), ("x", "z"), ("y", "x"), ("y", "z")]);
    ensure!(f.g_plus == e_plus, "fused graph {:?}", f.g_plus);

    // Iteration 1, each listed edge with an empty H.
    let cpdag = dag_to_cpdag(&f.g_plus);
    let listed = [
        ("w", "x", Score::new(1, 1)),
        ("y", "z", Score::new(1, 3)),
        ("w", "y", Score::new(2, 3)),
        ("x", "z", Score::new(2, 3)),
        ("y", "x", Score::new(2, 3)),
    ];
    for (u, v, expected) in listed {
        let (u, v) = (id(u), id(v));
        let mut cond = na_set(&cpdag, v, u).unwrap();
        cond.extend(cpdag.parents(v).into_iter().filter(|&p| p != u));
        cond.sort_unstable();
        let psi = criticality(u, v, &inputs, &cond).unwrap().psi;
        ensure!(psi == expected, "score of {u}->{v}: {psi} != {expected}");
    }

    let out = run(&input, &Config::threshold(Score::new(1, 2))).map_err(|e| e.to_string())?;
    let steps = &out.trajectory.steps;
    ensure!(steps.len() == 1, "{} deletions", steps.len());
    let s = &steps[0];
    ensure!(
        (s.choice.from, s.choice.to) == (id("y"), id("z")) && s.choice.h_set.is_empty(),
        "deleted {:?}",
        s.choice
    );
    ensure!(s.psi_star == Score::new(1, 3), "psi* {}", s.psi_star);
    let reduced = remove_cut_edges(&inputs, &s.per_graph_cuts).unwrap();
    ensure!(
        reduced[0] == dag(&[("w", "x"), ("x", "y")]) && reduced[1] == inputs[1] && reduced[2] == inputs[2],
        "reduced inputs {reduced:?}"
    );
    let next = best_edge(&out.cpdag, &reduced, 10).unwrap();
    ensure!(next.psi == Score::new(2, 3), "iteration 2 minimum {}", next.psi);
    ensure!(
        skeleton_labels(&out.cpdag) == pairs(&[("w", "x"), ("w", "y"), ("x", "y"), ("x", "z")]),
        "final skeleton {:?}",
        skeleton_labels(&out.cpdag)
    );

    // The only independencies of G* separate z from w and y, always through x.
    let g_star = &out.dag;
    let mut statements = 0;
    for u in 0..4 {
        for v in u + 1..4 {
            let rest: Vec<NodeId> = (0..4).filter(|&x| x != u && x != v).collect();
            for z in subsets(&rest) {
                let expected = (v == id("z") && (u == id("w") || u == id("y"))) && z.contains(&id("x"));
                let got = d_separated(g_star, u, v, &z).unwrap();
                ensure!(got == expected, "d-separation of {u},{v} given {z:?}: {got}");
                statements += got as usize;
            }
        }
    }
    ensure!(d_separated(g_star, id("w"), id("z"), &[id("x")]).unwrap(), "w and z given x");
    ensure!(d_separated(g_star, id("y"), id("z"), &[id("x")]).unwrap(), "y and z given x");
    Ok(format!("1 deletion (y->z, psi 1/3), next minimum 2/3, {statements} separation statements"))
}

fn nodes_auvb() -> NodeSet {
    NodeSet::new(["a", "b", "u", "v"]).unwrap()
}

fn score_boundaries() -> Outcome {
    let nodes = nodes_auvb();
    let (u, v) = (nodes.id("u").unwrap(), nodes.id("v").unwrap());
    let order = NodeOrder::from_labels(&nodes, ["a", "u", "v", "b"]).unwrap();
    let mut cases = 0;
    for r in [3u64, 5, 10] {
        for k in 1..=r {
            let graphs: Vec<Dag> = (0..r)
                .map(|i| {
                    let mut es = vec![("a", "u"), ("v", "b")];
                    if i < k {
                        es.push(("u", "v"));
                    }
                    Dag::from_labels(nodes.clone(), &es).unwrap()
                })
                .collect();
            let psi = Score::new(k, r);
            let got = criticality(u, v, &graphs, &[]).unwrap().psi;
            ensure!(got == psi, "k={k} r={r}: criticality {got}");
            let input = FusionInput::new(graphs).with_ordering(order.clone());
            let eps = Score::new(1, 1000 * r);
            let below = run(&input, &Config::threshold(psi - eps)).unwrap();
            ensure!(below.cpdag.adjacent(u, v), "k={k} r={r}: edge lost below k/r");
            let at = run(&input, &Config::threshold(psi)).unwrap();
            ensure!(!at.cpdag.adjacent(u, v), "k={k} r={r}: edge kept at k/r");
            cases += 1;
        }
    }
    Ok(format!("{cases} (k, r) instances"))
}

fn min_cut_oracle() -> Outcome {
    let mut total = 0;
    for seed in 0..200u64 {
        let n = 2 + (seed % 7) as usize;
        let g = seeded_ugraph(n, 0.5, 16, seed);
        let (s, t) = (0, n - 1);
        let cut = mcbnc_core::min_cut(&g, s, t).unwrap();
        let brute = brute_min_cut(&g, s, t);
        ensure!(cut.value == brute, "seed {seed}: {} != {brute}", cut.value);
        ensure!(disconnects(&g, s, t, &cut.cut_edges), "seed {seed}: cut leaves s and t connected");
        total += brute;
    }
    Ok(format!("200 graphs, total cut size {total}"))
}

fn d_separation_oracle() -> Outcome {
    let (mut queries, mut separated) = (0, 0);
    for seed in 0..100u64 {
        let n = 2 + (seed % 6) as usize;
        let g = seeded_dag(n, 0.4, seed);
        for u in 0..n {
            for v in u + 1..n {
                let rest: Vec<NodeId> = (0..n).filter(|&x| x != u && x != v).collect();
                for z in subsets(&rest) {
                    let got = d_separated(&g, u, v, &z).unwrap();
                    ensure!(got == dsep_by_paths(&g, u, v, &z), "seed {seed}: ({u},{v}|{z:?})");
                    queries += 1;
                    separated += got as usize;
                }
            }
        }
    }
    Ok(format!("{queries} queries, {separated} separated"))
}

fn v_structures(g: &Dag) -> BTreeSet<(NodeId, NodeId, NodeId)> {
    g.v_structures()
        .into_iter()
        .map(|(a, c, b)| (a.min(b), c, a.max(b)))
        .collect()
}

fn cpdag_properties() -> Outcome {
    let (mut reversals, mut enumerated) = (0, 0);
    for seed in 0..500u64 {
        let n = 1 + (seed % 10) as usize;
        let g = seeded_dag(n, 0.35, seed);
        let c = dag_to_cpdag(&g);
        let ext = pdag_to_dag(&c).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(dag_to_cpdag(&ext) == c, "seed {seed}: round trip");
        ensure!(c.skeleton() == g.skeleton(), "seed {seed}: skeleton");
        ensure!(v_structures(&ext) == v_structures(&g), "seed {seed}: v-structures");
        for (u, v) in g.edges() {
            let mut expect: Vec<NodeId> = g.parents(u).to_vec();
            expect.push(u);
            expect.sort_unstable();
            if expect == g.parents(v) {
                let h = Dag::new(g.nodes().clone(), g.edges().map(|e| if e == (u, v) { (v, u) } else { e })).unwrap();
                ensure!(dag_to_cpdag(&h) == c, "seed {seed}: covered reversal of {u}->{v}");
                reversals += 1;
            }
        }
        if g.edge_count() <= 12 {
            let (directed, undirected) = cpdag_by_enumeration(&g);
            ensure!(
                c.directed() == &directed && c.undirected() == &undirected,
                "seed {seed}: differs from class enumeration"
            );
            enumerated += 1;
        }
    }
    Ok(format!("500 DAGs, {reversals} covered reversals, {enumerated} checked by class enumeration"))
}

fn minimal_imaps() -> Outcome {
    let mut checked = 0;
    for seed in 0..150u64 {
        let n = 1 + (seed % 8) as usize;
        let g = seeded_dag(n, 0.4, seed);
        let mut r = rng(seed ^ 0xabcd);
        let mut seq: Vec<NodeId> = (0..n).collect();
        seq.shuffle(&mut r);
        let order = NodeOrder::new(seq, n).unwrap();
        let m = minimal_imap(&g, &order).map_err(|e| e.to_string())?;
        for (u, v) in m.edges() {
            ensure!(order.position(u) < order.position(v), "seed {seed}: {u}->{v} against order");
        }
        for v in 0..n {
            let pa = m.parents(v);
            for &w in pa {
                let rest: Vec<NodeId> = pa.iter().copied().filter(|&x| x != w).collect();
                ensure!(!dsep_by_paths(&g, v, w, &rest), "seed {seed}: parent {w} of {v} removable");
            }
        }
        // Sampled independencies of the I-map must hold in the source.
        for _ in 0..40 {
            if n < 2 {
                break;
            }
            let u = r.gen_range(0..n);
            let v = r.gen_range(0..n);
            if u == v {
                continue;
            }
            let z: Vec<NodeId> = (0..n).filter(|&x| x != u && x != v && r.gen_bool(0.4)).collect();
            if dsep_by_paths(&m, u, v, &z) {
                ensure!(dsep_by_paths(&g, u, v, &z), "seed {seed}: ({u},{v}|{z:?}) not in source");
                checked += 1;
            }
        }
    }
    let g1 = &example_inputs()[0];
    let m = minimal_imap(g1, &example_sigma()).unwrap();
    ensure!(
        m == dag(&[("w", "x"), ("w", "y"), ("y", "x"), ("y", "z")]),
        "worked example I-map {m:?}"
    );
    Ok(format!("150 DAGs, {checked} sampled independencies confirmed"))
}

struct SynthResult {
    gplus: usize,
    half: usize,
    inputs: f64,
    selected: usize,
    at_zero: usize,
}

fn synthetic_recovery() -> Outcome {
    let (n, r) = (30, 10);
    let c = GenConstraints::for_nodes(n);
    let mut rows = Vec::new();
    for seed in 0..10u64 {
        let (gold, inputs) = instance(n, r, seed, &c).unwrap();
        let input = FusionInput::new(inputs.clone());
        let half = run(&input, &Config::threshold(Score::new(1, 2))).map_err(|e| e.to_string())?;
        let full = run(&input, &Config::trajectory()).map_err(|e| e.to_string())?;
        let sel = select_theta(&full.trajectory, &inputs).unwrap();
        let zero = graph_at_theta(&full.trajectory, Score::new(0, 1)).unwrap();
        rows.push(SynthResult {
            gplus: smhd(&full.trajectory.g_plus, &gold).unwrap(),
            half: smhd(&half.cpdag, &gold).unwrap(),
            inputs: inputs.iter().map(|g| smhd(g, &gold).unwrap() as f64).sum::<f64>() / r as f64,
            selected: smhd(&sel.graph, &gold).unwrap(),
            at_zero: smhd(&zero, &gold).unwrap(),
        });
    }
    let k = rows.len() as f64;
    let mean_half = rows.iter().map(|x| x.half as f64).sum::<f64>() / k;
    let mean_gplus = rows.iter().map(|x| x.gplus as f64).sum::<f64>() / k;
    let mean_inputs = rows.iter().map(|x| x.inputs).sum::<f64>() / k;
    let selected_ok = rows.iter().filter(|x| x.selected <= x.at_zero).count();
    let summary = format!(
        "mean SMHD to gold: consensus {mean_half:.1}, fused {mean_gplus:.1}, inputs {mean_inputs:.1}; \
         selected <= theta 0 in {selected_ok}/10"
    );
    ensure!(mean_half < mean_gplus, "{summary}");
    ensure!(mean_half < mean_inputs, "{summary}");
    ensure!(selected_ok >= 9, "{summary}");
    Ok(summary)
}

fn trajectory_consistency() -> Outcome {
    let c = GenConstraints::for_nodes(10);
    let mut compared = 0;
    for seed in 0..5u64 {
        let (_, inputs) = instance(10, 10, seed, &c).unwrap();
        let input = FusionInput::new(inputs);
        let full = run(&input, &Config::trajectory()).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let recorded: Vec<Score> = full.trajectory.steps.iter().map(|s| s.psi_star).collect();
        let thetas: Vec<Score> = (0..20)
            .map(|i| {
                if i % 2 == 0 && !recorded.is_empty() {
                    *recorded.choose(&mut r).unwrap()
                } else {
                    Score::new(r.gen_range(0..=100), 100)
                }
            })
            .filter(|t| *t <= Score::from_integer(1))
            .collect();
        for theta in thetas {
            let fresh = run(&input, &Config::threshold(theta)).unwrap();
            let replay = graph_at_theta(&full.trajectory, theta).unwrap();
            ensure!(replay == fresh.cpdag, "seed {seed}, theta {theta}");
            compared += 1;
        }
    }
    Ok(format!("{compared} (instance, theta) pairs"))
}

fn treewidth_sanity() -> Outcome {
    for seed in 0..100u64 {
        let n = 2 + (seed % 6) as usize;
        let g = seeded_dag(n, 0.45, seed);
        let ub = treewidth_upper(&g).unwrap();
        let exact = exact_treewidth(&moralize(&g));
        ensure!(ub == exact, "seed {seed}: min-fill {ub}, exact {exact}");
    }
    let c = GenConstraints::for_nodes(15);
    let mut drops = Vec::new();
    for seed in 0..10u64 {
        let (_, inputs) = instance(15, 10, seed, &c).unwrap();
        let full = run(&FusionInput::new(inputs.clone()), &Config::trajectory()).unwrap();
        let sel = select_theta(&full.trajectory, &inputs).unwrap();
        let before = treewidth_upper(&full.trajectory.g_plus).unwrap();
        let after = treewidth_upper(&sel.graph).unwrap();
        ensure!(after <= before, "seed {seed}: selected width {after} > fused {before}");
        drops.push(format!("{before}->{after}"));
    }
    Ok(format!("100 moral graphs exact; fused->selected widths {}", drops.join(" ")))
}

fn mcbnc(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mcbnc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "mcbnc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn bytes(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (data, first, second, again) = (root.join("data"), root.join("a"), root.join("b"), root.join("c"));
    mcbnc(&["synth", "--nodes", "12", "--graphs", "8", "--seed", "5", "--out-dir", &s(&data)])?;
    mcbnc(&["rerun", &s(&data.join("manifest.json")), "--out-dir", &s(&again)])?;
    for name in ["gold.txt", "input_01.txt", "input_08.txt", "manifest.json"] {
        ensure!(bytes(&data.join(name)) == bytes(&again.join(name)), "synth {name} differs");
    }
    let mut args = vec!["consensus".to_string(), "--trajectory".into(), "--gold".into(), s(&data.join("gold.txt"))];
    for i in 1..=8 {
        args.push(s(&data.join(format!("input_{i:02}.txt"))));
    }
    args.extend(["--out-dir".into(), s(&first)]);
    mcbnc(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
    mcbnc(&["rerun", &s(&first.join("manifest.json")), "--out-dir", &s(&second)])?;
    for name in ["trajectory.json", "metrics.csv", "consensus.txt", "cpdag.txt", "manifest.json"] {
        ensure!(bytes(&first.join(name)) == bytes(&second.join(name)), "consensus {name} differs");
    }
    let traj = Trajectory::from_json(&String::from_utf8(bytes(&first.join("trajectory.json"))).unwrap())
        .map_err(|e| e.to_string())?;
    Ok(format!("{} steps reproduced byte-for-byte", traj.steps.len()))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("worked example", 1, worked_example),
        ("score boundaries k/r", 1, score_boundaries),
        ("min-cut oracle", 30, min_cut_oracle),
        ("d-separation oracle", 60, d_separation_oracle),
        ("CPDAG properties", 30, cpdag_properties),
        ("minimal I-maps", 30, minimal_imaps),
        ("synthetic recovery n=30 r=10", 300, synthetic_recovery),
        ("trajectory replay", 120, trajectory_consistency),
        ("treewidth", 60, treewidth_sanity),
        ("determinism", 60, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let (status, detail) = match result {
            Ok(d) if elapsed <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("over time limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} {:>2} {name} ({:.2}s, limit {}s): {detail}",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
