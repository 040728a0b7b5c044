//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! (including wall time against its budget) and exits nonzero on failure.

#[path = "../../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use depknap::milp::{build_model, completion, export_lp, solve_by_selection, BuildOptions};
use depknap::{
    generate_instance, influence_matrix, is_feasible, objective_value, penalties,
    signed_strengths, solve_bnb, solve_exhaustive, walk_closure, GeneratorParams, Instance,
    Selection, Vdg,
};

/// Objective agreement tolerance.
const TOL: f64 = 1e-9;
const DENSITIES: [f64; 3] = [0.1, 0.3, 0.6];
const NEG_SHARES: [f64; 3] = [0.0, 0.3, 0.7];

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: Check,
}

fn gen(n: usize, density: f64, negative_share: f64, seed: u64) -> Instance {
    generate_instance(GeneratorParams {
        n,
        density,
        negative_share,
        seed,
    })
    .expect("valid generator parameters")
}

/// 27 parameter cells per round: n cycles through `n_range`, density and
/// negative share through their grids.
fn corpus(count: usize, n_min: usize, n_max: usize, seed_base: u64) -> Vec<Instance> {
    (0..count)
        .map(|k| {
            let n = n_min + k % (n_max - n_min + 1);
            let d = DENSITIES[k % 3];
            let s = NEG_SHARES[(k / 3) % 3];
            gen(n, d, s, seed_base + k as u64)
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Result<String, String> {
    let instances = corpus(216, 3, 12, 1_000);
    let mut worst = 0.0f64;
    for (k, inst) in instances.iter().enumerate() {
        let m = influence_matrix(inst.vdg());
        let a = solve_exhaustive(inst, &m).map_err(|e| e.to_string())?;
        let b = solve_bnb(inst, &m).map_err(|e| e.to_string())?;
        let diff = (a.objective - b.objective).abs();
        worst = worst.max(diff);
        ensure(diff <= TOL, || {
            format!("instance {k}: exhaustive {} vs bnb {}", a.objective, b.objective)
        })?;
    }
    Ok(format!("{} instances, max |diff| = {worst:e}", instances.len()))
}

fn classical_reduction() -> Result<String, String> {
    let mut count = 0;
    for seed in 0..108u64 {
        let n = 1 + (seed % 18) as usize;
        let inst = gen(n, 0.0, 0.0, 2_000 + seed);
        let m = influence_matrix(inst.vdg());
        let values: Vec<f64> = inst.elements().iter().map(|e| e.value).collect();
        let weights: Vec<u32> = inst.elements().iter().map(|e| e.weight as u32).collect();
        ensure(inst.elements().iter().all(|e| e.weight.fract() == 0.0), || "non-integer weight".into())?;
        let dp = common::knapsack_dp(&values, &weights, inst.capacity() as u32);
        let r = solve_bnb(&inst, &m).map_err(|e| e.to_string())?;
        ensure(r.objective == dp, || format!("seed {seed}: bnb {} vs dp {dp}", r.objective))?;
        count += 1;
    }
    Ok(format!("{count} dependency-free instances, n <= 18, exact match"))
}

fn influence_correctness() -> Result<String, String> {
    let mut graphs = 0;
    let mut pairs = 0;
    for n in 2..=6usize {
        for density in [0.3, 0.7] {
            for seed in 0..50u64 {
                let g = gen(n, density, 0.5, 3_000 + seed).vdg().clone();
                let w = walk_closure(&g);
                for i in 0..n {
                    for j in (0..n).filter(|&j| j != i) {
                        let s = signed_strengths(&g, i, j);
                        let brute = common::brute_signed_strengths(&g, i, j);
                        ensure((s.pos, s.neg) == brute, || {
                            format!("n={n} d={density} seed={seed} ({i},{j}): {s:?} vs {brute:?}")
                        })?;
                        ensure(w.rho_pos(i, j) >= s.pos && w.rho_neg(i, j) >= s.neg, || {
                            format!("walk closure below simple paths at ({i},{j}), seed {seed}")
                        })?;
                        pairs += 1;
                    }
                }
                graphs += 1;
            }
        }
    }
    Ok(format!("{graphs} graphs, {pairs} ordered pairs"))
}

/// Shared corpus for the MILP criteria: n in [3, 10], all values positive.
fn milp_corpus() -> Vec<Instance> {
    let v = corpus(54, 3, 10, 4_000);
    assert!(v.iter().all(|i| i.elements().iter().all(|e| e.value > 0.0)));
    v
}

fn milp_semantics() -> Result<String, String> {
    let instances = milp_corpus();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (k, inst) in instances.iter().enumerate() {
        let n = inst.len();
        let m = influence_matrix(inst.vdg());
        let model = build_model(inst, &m, BuildOptions::default()).map_err(|e| e.to_string())?;
        for mask in 0u32..(1 << n) {
            let sel = Selection::new((0..n).map(|i| mask >> i & 1 == 1).collect());
            if !is_feasible(inst, &sel) {
                continue;
            }
            let p = penalties(&m, &sel).map_err(|e| e.to_string())?;
            let values = completion(&model, sel.as_slice(), p.as_slice());
            let bad = model.violations(&values, TOL);
            ensure(bad.is_empty(), || format!("instance {k}, selection {sel}: violates {bad:?}"))?;
            checked += 1;
        }
        let best = solve_exhaustive(inst, &m).map_err(|e| e.to_string())?.objective;
        let s = solve_by_selection(&model, n)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("instance {k}: model infeasible"))?;
        let diff = (s.objective - best).abs();
        worst = worst.max(diff);
        ensure(diff <= TOL, || format!("instance {k}: MILP {} vs exhaustive {best}", s.objective))?;
    }
    Ok(format!(
        "{} instances, {checked} feasible completions, max |diff| = {worst:e}",
        instances.len()
    ))
}

fn g_elimination() -> Result<String, String> {
    let instances = milp_corpus();
    let mut worst = 0.0f64;
    for (k, inst) in instances.iter().enumerate() {
        let m = influence_matrix(inst.vdg());
        let mut obj = Vec::new();
        for eliminate_g in [true, false] {
            let model = build_model(inst, &m, BuildOptions { eliminate_g }).map_err(|e| e.to_string())?;
            let s = solve_by_selection(&model, inst.len())
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("instance {k}: model infeasible"))?;
            obj.push(s.objective);
        }
        let diff = (obj[0] - obj[1]).abs();
        worst = worst.max(diff);
        ensure(diff <= TOL, || format!("instance {k}: {} vs {}", obj[0], obj[1]))?;
    }
    Ok(format!("{} instances, max |diff| = {worst:e}", instances.len()))
}

fn worked_micro_instance() -> Result<String, String> {
    let text = r#"{"elements":[{"id":"e1","value":10,"weight":5},{"id":"e2","value":8,"weight":5},
        {"id":"e3","value":6,"weight":5}],"capacity":10,
        "dependencies":[{"from":"e1","to":"e3","quality":"+","strength":0.9}]}"#;
    let inst = Instance::from_json(text).map_err(|e| e.to_string())?;
    let m = influence_matrix(inst.vdg());
    for r in [solve_exhaustive(&inst, &m), solve_bnb(&inst, &m)] {
        let r = r.map_err(|e| e.to_string())?;
        ensure((r.objective - 16.0).abs() <= TOL, || format!("objective {}", r.objective))?;
        ensure(r.selection.to_string() == "101", || format!("selection {}", r.selection))?;
    }
    let v = objective_value(&inst, &m, &Selection::from_bits("110").unwrap()).map_err(|e| e.to_string())?;
    ensure((v - 9.0).abs() <= TOL, || format!("{{e1,e2}} evaluates to {v}"))?;
    Ok("optimum 16 at {e1,e3}; {e1,e2} -> 9".into())
}

fn raise_one_edge(g: &Vdg, rng: &mut ChaCha8Rng) -> Option<Vdg> {
    let mut edges = g.explicit_edges();
    if edges.is_empty() {
        return None;
    }
    let k = rng.gen_range(0..edges.len());
    let s = edges[k].strength;
    edges[k].strength = s + (1.0 - s) * rng.gen::<f64>();
    Some(Vdg::from_edges(g.len(), edges).expect("same pairs"))
}

fn invariant_suite() -> Result<String, String> {
    let instances = corpus(81, 3, 10, 5_000);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut perturbations = 0;
    for (k, inst) in instances.iter().enumerate() {
        let n = inst.len();
        let m = influence_matrix(inst.vdg());
        for i in 0..n {
            for j in 0..n {
                let (p, q, v) = (m.rho_pos(i, j), m.rho_neg(i, j), m.influence(i, j));
                ensure((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q), || {
                    format!("instance {k}: rho out of range at ({i},{j})")
                })?;
                ensure((-1.0..=1.0).contains(&v), || format!("instance {k}: I({i},{j}) = {v}"))?;
            }
        }
        for mask in 0u32..(1 << n) {
            let sel = Selection::new((0..n).map(|i| mask >> i & 1 == 1).collect());
            let p = penalties(&m, &sel).map_err(|e| e.to_string())?;
            ensure(p.as_slice().iter().all(|x| (0.0..=1.0).contains(x)), || {
                format!("instance {k}: penalty out of range for {sel}")
            })?;
            let obj = objective_value(inst, &m, &sel).map_err(|e| e.to_string())?;
            let plain: f64 = sel.selected().map(|i| inst.elements()[i].value).sum();
            ensure(obj <= plain + TOL, || format!("instance {k}: objective {obj} > {plain}"))?;
        }
        for _ in 0..20 {
            let Some(h) = raise_one_edge(inst.vdg(), &mut rng) else {
                break;
            };
            let r = influence_matrix(&h);
            for i in 0..n {
                for j in 0..n {
                    ensure(r.rho_pos(i, j) >= m.rho_pos(i, j) && r.rho_neg(i, j) >= m.rho_neg(i, j), || {
                        format!("instance {k}: strength increase lowered ({i},{j})")
                    })?;
                }
            }
            perturbations += 1;
        }
    }
    Ok(format!("{} instances, {perturbations} perturbations", instances.len()))
}

fn run_cli(args: &[&str], stdin: &[u8]) -> (i32, Vec<u8>, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("depknap").chain(args.iter().copied());
    let code = depknap_cli::run(argv, &mut &stdin[..], &mut out, &mut err);
    (code, out, err)
}

fn determinism() -> Result<String, String> {
    let mut runs = 0;
    for seed in 0..30u64 {
        let a = gen(8, 0.4, 0.4, 6_000 + seed).to_json();
        let b = gen(8, 0.4, 0.4, 6_000 + seed).to_json();
        ensure(a == b, || format!("generate_instance differs for seed {seed}"))?;
    }
    let (_, instance, _) = run_cli(&["gen", "--n", "9", "--density", "0.4", "--neg", "0.3", "--seed", "11"], b"");
    let commands: &[&[&str]] = &[
        &["check", "-"],
        &["influence", "-"],
        &["influence", "-", "--walks"],
        &["influence", "-", "--format", "table", "--walks"],
        &["eval", "-", "--select", "e1,e4,e9"],
        &["eval", "-", "--mask", "101010101"],
        &["solve", "-"],
        &["solve", "-", "--json"],
        &["solve", "-", "--method", "exhaustive", "--json"],
        &["export-lp", "-"],
        &["export-lp", "-", "--keep-g"],
        &["gen", "--n", "12", "--density", "0.5", "--neg", "0.5", "--seed", "99"],
        &["eval", "-", "--select", "nope"],
    ];
    for args in commands {
        let first = run_cli(args, &instance);
        let second = run_cli(args, &instance);
        ensure(first == second, || format!("{args:?} differs between runs"))?;
        ensure(!first.1.is_empty() || !first.2.is_empty(), || format!("{args:?} produced no output"))?;
        runs += 2;
    }
    Ok(format!("{} CLI commands x2 ({runs} runs), 30 generator seeds", commands.len()))
}

fn lp_round_trip() -> Result<String, String> {
    let instances = corpus(54, 1, 12, 7_000);
    let mut models = 0;
    for (k, inst) in instances.iter().enumerate() {
        let m = influence_matrix(inst.vdg());
        for eliminate_g in [true, false] {
            let model = build_model(inst, &m, BuildOptions { eliminate_g }).map_err(|e| e.to_string())?;
            let back = common::parse_lp(&export_lp(&model)).map_err(|e| format!("instance {k}: {e}"))?;
            ensure(back == model, || format!("instance {k} (eliminate_g={eliminate_g}) differs after round trip"))?;
            models += 1;
        }
    }
    Ok(format!("{} instances, {models} models identical after export + parse", instances.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "bnb equals exhaustive", budget: Duration::from_secs(60), check: oracle_equivalence },
        Criterion { id: 2, name: "classical knapsack reduction", budget: Duration::from_secs(10), check: classical_reduction },
        Criterion { id: 3, name: "influence vs brute-force paths", budget: Duration::from_secs(30), check: influence_correctness },
        Criterion { id: 4, name: "MILP semantics and optimum", budget: Duration::from_secs(60), check: milp_semantics },
        Criterion { id: 5, name: "g-elimination equivalence", budget: Duration::from_secs(60), check: g_elimination },
        Criterion { id: 6, name: "worked micro-instance", budget: Duration::from_secs(1), check: worked_micro_instance },
        Criterion { id: 7, name: "invariant suite", budget: Duration::from_secs(30), check: invariant_suite },
        Criterion { id: 8, name: "determinism", budget: Duration::from_secs(30), check: determinism },
        Criterion { id: 9, name: "LP round trip", budget: Duration::from_secs(30), check: lp_round_trip },
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    println!("running {} acceptance criteria", criteria.len());
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.budget => Err(format!("{detail}; over time budget")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        println!(
            "[{tag}] AC{} {} ({:.2}s / {}s): {detail}",
            c.id,
            c.name,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
        failed += usize::from(outcome.is_err());
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}
