//! End-to-end acceptance gate. Each numbered check prints one PASS/FAIL
//! line; the test fails if any check fails. Run with
//! `cargo test --test acceptance -- --nocapture` to watch the lines.

use rand::Rng;

use maoeda::evolution::{
    dominates, environmental_selection, final_selection, nondominated_sort, Solution,
};
use maoeda::harness::{
    generations_to_baseline, run_experiment, table1_divisions, write_results_csv, ExperimentPlan,
    Mode,
};
use maoeda::metrics::{hv_exact, hv_monte_carlo};
use maoeda::problems::{ProblemId, ProblemSpec};
use maoeda::reduction::{pcsea_search, reduce_dimensions};
use maoeda::refvecs::{das_dennis, map_vectors, two_layer};
use maoeda::regmodel::{build_submodel, sample_model};
use maoeda::rng::stream;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Gate {
        Gate { failures: Vec::new() }
    }

    fn check(&mut self, name: &str, result: Result<(), String>) {
        match result {
            Ok(()) => println!("[PASS] {name}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                self.failures.push(format!("{name}: {detail}"));
            }
        }
    }
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();
    gate.check("1 reference-vector counts", criterion_vector_counts());
    gate.check("2 front power-sum property", criterion_front_property());
    gate.check("3 non-dominated sorting oracle", criterion_nd_oracle());
    gate.check("4 hypervolume oracles", criterion_hv_oracles());
    gate.check("5 regularity-model eigen checks", criterion_regmodel());
    gate.check("6 dimension-reduction effectiveness", criterion_reduction());
    gate.check("7 desk-scale hypervolume band", criterion_hv_band());
    gate.check("8 diversity-repair ablation direction", criterion_repair_ablation());
    gate.check("9 generations-to-baseline direction", criterion_baseline_direction());
    gate.check("10 byte-identical determinism", criterion_determinism());
    gate.check("11 selection size invariants", criterion_selection_invariants());
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}

fn criterion_vector_counts() -> Result<(), String> {
    for (m, want) in [(3usize, 120usize), (5, 126), (8, 156), (10, 110), (15, 135)] {
        let (h1, h2) = table1_divisions(m);
        let got = if h2 == 0 {
            das_dennis(m, h1).map_err(|e| e.to_string())?.len()
        } else {
            two_layer(m, h1, h2).map_err(|e| e.to_string())?.len()
        };
        ensure(got == want, || format!("M={m}: {got} vectors, expected {want}"))?;
    }
    Ok(())
}

fn criterion_front_property() -> Result<(), String> {
    for id in [ProblemId::Dtlz1, ProblemId::Dtlz2, ProblemId::Dtlz3, ProblemId::Dtlz4] {
        let spec = ProblemSpec::new(id, 3).map_err(|e| e.to_string())?;
        let mut rng = stream(7, "front");
        let front = spec.sample_front(10_000, &mut rng).map_err(|e| e.to_string())?;
        let (_, nadir) = spec.true_bounds();
        let p = id.front_exponent();
        let mut worst = 0.0f64;
        for f in &front {
            let s: f64 = f.iter().zip(&nadir).map(|(v, n)| (v / n).powf(p)).sum();
            worst = worst.max((s - 1.0).abs());
        }
        ensure(worst < 1e-9, || format!("{id}: max |sum-1| = {worst:e}"))?;
    }
    Ok(())
}

fn brute_force_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| j != i && dominates(&points[j], &points[i]))
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn criterion_nd_oracle() -> Result<(), String> {
    let mut rng = stream(100, "front");
    for case in 0..200 {
        let n = 2 + rng.random_range(0..199);
        let m = 2 + rng.random_range(0..14);
        // mixed continuous and discretized coordinates so ties and
        // duplicates appear
        let levels = if case % 3 == 0 { 4.0 } else { 0.0 };
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let v: f64 = rng.random();
                        if levels > 0.0 {
                            (v * levels).floor() / levels
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let got = nondominated_sort(&pts);
        let want = brute_force_fronts(&pts);
        ensure(got == want, || format!("case {case}: fronts disagree (n={n}, m={m})"))?;
    }
    Ok(())
}

/// Grid oracle for points whose coordinates are multiples of `h`: per-column
/// prefix minima make the union-of-boxes volume exact.
fn grid_hv_oracle(points: &[Vec<f64>], refv: f64, h: f64) -> f64 {
    let cells = (refv / h).round() as usize;
    match points.first().map(|p| p.len()) {
        None => 0.0,
        Some(2) => {
            let mut min_y = vec![f64::INFINITY; cells];
            for p in points {
                let i = (p[0] / h).round() as usize;
                if i < cells {
                    min_y[i] = min_y[i].min(p[1]);
                }
            }
            let mut best = f64::INFINITY;
            let mut vol = 0.0;
            for i in 0..cells {
                best = best.min(min_y[i]);
                if best < refv {
                    vol += h * (refv - best);
                }
            }
            vol
        }
        Some(3) => {
            let mut min_z = vec![f64::INFINITY; cells * cells];
            for p in points {
                let i = (p[0] / h).round() as usize;
                let j = (p[1] / h).round() as usize;
                if i < cells && j < cells {
                    min_z[i * cells + j] = min_z[i * cells + j].min(p[2]);
                }
            }
            // prefix minima along both axes
            for i in 0..cells {
                for j in 0..cells {
                    let mut v = min_z[i * cells + j];
                    if i > 0 {
                        v = v.min(min_z[(i - 1) * cells + j]);
                    }
                    if j > 0 {
                        v = v.min(min_z[i * cells + j - 1]);
                    }
                    min_z[i * cells + j] = v;
                }
            }
            let mut vol = 0.0;
            for &z in &min_z {
                if z < refv {
                    vol += h * h * (refv - z);
                }
            }
            vol
        }
        Some(d) => panic!("oracle supports 2-D and 3-D, got {d}-D"),
    }
}

fn criterion_hv_oracles() -> Result<(), String> {
    let h = 1e-3;
    let mut rng = stream(200, "mc-hv");
    for case in 0..50 {
        let m = 2 + case % 2;
        let n = 1 + rng.random_range(0..20);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| rng.random_range(0..1000) as f64 * h)
                    .collect()
            })
            .collect();
        let refp = vec![1.1; m];
        let exact = hv_exact(&pts, &refp).map_err(|e| e.to_string())?.value;
        let oracle = grid_hv_oracle(&pts, 1.1, h);
        let cell = h.powi(m as i32);
        ensure((exact - oracle).abs() <= cell, || {
            format!("case {case}: exact {exact} vs grid {oracle} (m={m}, n={n})")
        })?;
    }

    for case in 0..20 {
        let m = 2 + case % 4;
        let n = 2 + rng.random_range(0..19);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
            .collect();
        let refp = vec![1.1; m];
        let exact = hv_exact(&pts, &refp).map_err(|e| e.to_string())?.value;
        let samples = 1_000_000usize;
        let est = hv_monte_carlo(&pts, &refp, samples, &mut rng)
            .map_err(|e| e.to_string())?
            .value;
        let lo: Vec<f64> = (0..m)
            .map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min))
            .collect();
        let box_vol: f64 = lo.iter().map(|l| 1.1 - l).product();
        let frac = (exact / box_vol).clamp(0.0, 1.0);
        let sigma = box_vol * (frac * (1.0 - frac) / samples as f64).sqrt();
        ensure((est - exact).abs() <= 3.0 * sigma + 1e-12, || {
            format!("case {case}: mc {est} vs exact {exact}, 3 sigma {}", 3.0 * sigma)
        })?;
    }
    Ok(())
}

fn criterion_regmodel() -> Result<(), String> {
    let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
    let model = build_submodel(&pts, 0.96, 0.5).map_err(|e| e.to_string())?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ensure(
        (model.mu[0] - 1.0).abs() < 1e-9 && (model.mu[1] - 1.0).abs() < 1e-9,
        || format!("mu {:?}", model.mu),
    )?;
    ensure(model.components.len() == 1, || {
        format!("{} components", model.components.len())
    })?;
    let c = &model.components[0];
    let aligned =
        ((c[0] - s).abs() < 1e-9 && (c[1] - s).abs() < 1e-9)
            || ((c[0] + s).abs() < 1e-9 && (c[1] + s).abs() < 1e-9);
    ensure(aligned, || format!("component {c:?}"))?;
    let sq2 = std::f64::consts::SQRT_2;
    ensure(
        (model.lo[0] + sq2).abs() < 1e-7 && (model.hi[0] - sq2).abs() < 1e-7,
        || format!("bounds [{}, {}]", model.lo[0], model.hi[0]),
    )?;
    ensure(model.eps.abs() < 1e-12, || format!("eps {}", model.eps))?;

    let mut rng = stream(5, "offspring");
    let samples = sample_model(&model, 1000, &mut rng).map_err(|e| e.to_string())?;
    for x in &samples {
        ensure((x[0] - x[1]).abs() < 1e-9, || format!("off the line: {x:?}"))?;
        let proj = (x[0] - 1.0) * s + (x[1] - 1.0) * s;
        ensure((-2.8285..=2.8285).contains(&proj), || {
            format!("projection {proj} outside [-2.828, 2.828]")
        })?;
    }
    Ok(())
}

fn criterion_reduction() -> Result<(), String> {
    let spec = ProblemSpec::new(ProblemId::Dtlz2, 3).map_err(|e| e.to_string())?;
    let mut successes = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let mut rng = stream(seed, "pcsea");
        let archive = pcsea_search(&spec, 100, 50, &mut rng).map_err(|e| e.to_string())?;
        let map = reduce_dimensions(&archive.decisions, 0.96).map_err(|e| e.to_string())?;
        let removed_position = map.removed.iter().filter(|&&i| i < 2).count();
        let removed_distance = map.removed.iter().filter(|&&i| i >= 2).count();
        if removed_position == 0 && removed_distance >= 7 {
            successes += 1;
        } else {
            notes.push(format!(
                "seed {seed}: removed {removed_distance}/10 distance, {removed_position} position"
            ));
        }
    }
    ensure(successes >= 8, || {
        format!("{successes}/10 trials succeeded; {}", notes.join("; "))
    })
}

fn criterion_hv_band() -> Result<(), String> {
    let mut plan = ExperimentPlan::new(vec![ProblemId::Dtlz2], vec![3]);
    plan.runs = 5;
    plan.base_seed = 42;
    let outcome = run_experiment(&plan).map_err(|e| e.to_string())?;
    ensure(outcome.failures.is_empty(), || format!("{:?}", outcome.failures))?;
    let median = outcome.summaries[0].hv_median;
    ensure((median - 0.533).abs() <= 0.08, || {
        format!("median HV {median:.4} outside 0.533 +/- 0.08")
    })
}

fn criterion_repair_ablation() -> Result<(), String> {
    let mut with = ExperimentPlan::new(vec![ProblemId::Dtlz2], vec![10]);
    with.runs = 5;
    with.base_seed = 17;
    with.t_max = Some(50);
    let mut without = with.clone();
    without.mode = Mode::AblateRepair;
    let a = run_experiment(&with).map_err(|e| e.to_string())?;
    let b = run_experiment(&without).map_err(|e| e.to_string())?;
    ensure(a.failures.is_empty() && b.failures.is_empty(), || "run failures".into())?;
    let (ma, mb) = (a.summaries[0].hv_median, b.summaries[0].hv_median);
    ensure(ma >= mb, || {
        format!("median HV with repair {ma:.4} < without {mb:.4}")
    })
}

fn criterion_baseline_direction() -> Result<(), String> {
    let cap = 200;
    let mut plan = ExperimentPlan::new(vec![ProblemId::Dtlz1], vec![8]);
    plan.neighbor_size = 10;
    let mut with_gens = Vec::new();
    let mut without_gens = Vec::new();
    for seed in [3u64, 4, 5] {
        let cfg = plan
            .build_run_config(ProblemId::Dtlz1, 8, seed)
            .map_err(|e| e.to_string())?;
        // probe run: unreachable baseline records the full HV history
        let probe = generations_to_baseline(&cfg, 10.0, cap, Some(20_000))
            .map_err(|e| e.to_string())?;
        let baseline = 0.95 * probe.final_hv;
        if baseline <= 0.0 {
            return Err(format!("seed {seed}: probe ended with HV {}", probe.final_hv));
        }
        let reach = |hist: &[f64]| {
            hist.iter()
                .position(|&hv| (baseline - hv) / baseline <= 1e-4)
                .unwrap_or(cap)
        };
        with_gens.push(reach(&probe.history));

        let mut cfg_nr = cfg.clone();
        cfg_nr.ablations.no_dimension_reduction = true;
        let nr = generations_to_baseline(&cfg_nr, baseline, cap, Some(20_000))
            .map_err(|e| e.to_string())?;
        without_gens.push(nr.generations);
    }
    let med = |v: &mut Vec<usize>| {
        v.sort_unstable();
        v[v.len() / 2]
    };
    let (w, wo) = (med(&mut with_gens.clone()), med(&mut without_gens.clone()));
    ensure(wo >= w, || {
        format!(
            "median generations without reduction {wo} < with {w} (with {with_gens:?}, without {without_gens:?})"
        )
    })
}

fn criterion_determinism() -> Result<(), String> {
    let mut plan = ExperimentPlan::new(vec![ProblemId::Dtlz2], vec![3]);
    plan.runs = 3;
    plan.base_seed = 9;
    plan.neighbor_size = 5;
    plan.budget_total = Some(6000);
    plan.t_max = Some(3);
    let a = run_experiment(&plan).map_err(|e| e.to_string())?;
    let b = run_experiment(&plan).map_err(|e| e.to_string())?;
    let mut csv_a = Vec::new();
    let mut csv_b = Vec::new();
    write_results_csv(&mut csv_a, &a.records).map_err(|e| e.to_string())?;
    write_results_csv(&mut csv_b, &b.records).map_err(|e| e.to_string())?;
    ensure(csv_a == csv_b, || "results CSV differs between invocations".into())
}

fn criterion_selection_invariants() -> Result<(), String> {
    let mut rng = stream(77, "init");
    for case in 0..100 {
        let m = 2 + case % 3;
        let h = 2 + case % 3;
        let simplex = das_dennis(m, h).map_err(|e| e.to_string())?;
        let n_vec = simplex.len();
        let t = 2 + case % 4;
        let mut evidence = Vec::new();
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            evidence.push(e);
        }
        let vectors = map_vectors(&simplex, &evidence).map_err(|e| e.to_string())?;
        let extra = rng.random_range(0..40);
        let candidates: Vec<Solution> = (0..t * n_vec + extra)
            .map(|_| {
                let objectives: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
                Solution {
                    reduced: vec![0.0],
                    full: vec![0.0],
                    objectives,
                }
            })
            .collect();

        let env = environmental_selection(&candidates, &vectors, t).map_err(|e| e.to_string())?;
        ensure(env.len() == t * n_vec, || {
            format!("case {case}: env selection returned {} of {}", env.len(), t * n_vec)
        })?;
        let mut keys: Vec<String> = env.iter().map(|s| format!("{:?}", s.objectives)).collect();
        keys.sort();
        let before = keys.len();
        keys.dedup();
        ensure(keys.len() == before, || format!("case {case}: duplicate selection"))?;

        let fin = final_selection(&env, &vectors).map_err(|e| e.to_string())?;
        ensure(fin.len() == n_vec, || {
            format!("case {case}: final selection returned {} of {n_vec}", fin.len())
        })?;
    }
    Ok(())
}
