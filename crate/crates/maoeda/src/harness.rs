//! Experiment orchestration: budgets, reference-vector divisions, multi-run
//! grids with seeded parallel execution, neighbor-size sweeps, the
//! generations-to-baseline protocol, and deterministic CSV/JSON reporting.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{run, run_with, Ablations, RunConfig};
use crate::metrics::{
    hv_exact, hv_monte_carlo, igd, median_and_dispersion, normalize, rank_sum_test, Comparison,
};
use crate::problems::{ProblemId, ProblemSpec};
use crate::refvecs::{das_dennis, two_layer};
use crate::rng::stream;

/// HV reference point coordinate in normalized objective space.
pub const HV_REF: f64 = 1.1;
/// Objective count at and above which HV switches to Monte Carlo.
pub const HV_MC_THRESHOLD: usize = 10;
/// Default Monte Carlo sample count per HV evaluation.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
/// Default reference-front size for IGD.
pub const DEFAULT_IGD_POINTS: usize = 10_000;

/// Experiment variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Standard,
    AblateRepair,
    AblateReduction,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::AblateRepair => "no-repair",
            Mode::AblateReduction => "no-reduction",
        }
    }

    pub fn ablations(self) -> Ablations {
        Ablations {
            no_diversity_repair: self == Mode::AblateRepair,
            no_dimension_reduction: self == Mode::AblateReduction,
        }
    }
}

/// Reference-vector divisions per objective count: (boundary, inside).
/// The canonical rows give 120/126/156/110/135 vectors for M=3/5/8/10/15;
/// other objective counts get the densest single layer under 150 vectors.
pub fn table1_divisions(m: usize) -> (usize, usize) {
    match m {
        3 => (14, 0),
        5 => (5, 0),
        8 => (3, 2),
        10 => (2, 2),
        15 => (2, 1),
        _ => {
            let mut h = 1;
            while crate::refvecs::das_dennis_count(m, h + 1).map_or(false, |c| c <= 150) {
                h += 1;
            }
            if h == 1 {
                (1, 1)
            } else {
                (h, 0)
            }
        }
    }
}

/// Builds the reference simplex for an objective count.
pub fn reference_simplex(m: usize) -> Result<Vec<Vec<f64>>> {
    let (h1, h2) = table1_divisions(m);
    if h2 == 0 {
        das_dennis(m, h1)
    } else {
        two_layer(m, h1, h2)
    }
}

/// Evaluation budget split.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Budget {
    pub total: usize,
    pub pcsea: usize,
    pub main: usize,
}

/// Canonical per-M budgets (total = corner search + main loop).
pub fn table2_budget(m: usize) -> Option<Budget> {
    let (total, pcsea, main) = match m {
        3 => (72_000, 15_000, 57_000),
        5 => (130_000, 25_000, 105_000),
        8 => (250_000, 40_000, 210_000),
        10 => (220_000, 50_000, 170_000),
        15 => (410_000, 75_000, 335_000),
        _ => return None,
    };
    Some(Budget { total, pcsea, main })
}

/// Splits an overridden total with the canonical PCSEA fraction for the
/// objective count (one fifth when no canonical row exists).
pub fn split_budget(m: usize, total: usize) -> Budget {
    let pcsea = match table2_budget(m) {
        Some(b) => (total as f64 * b.pcsea as f64 / b.total as f64).round() as usize,
        None => total / 5,
    };
    let pcsea = pcsea.min(total.saturating_sub(1)).max(1);
    Budget {
        total,
        pcsea,
        main: total - pcsea,
    }
}

/// Corner-search population and generation count fitting a PCSEA budget
/// (evaluations = pop × generations + pop).
pub fn pcsea_settings(m: usize, pcsea_budget: usize) -> (usize, usize) {
    let mut pop = if m >= 10 { 200 } else { 100 };
    pop = pop.max(2 * m);
    if pcsea_budget < 2 * pop {
        pop = (pcsea_budget / 2).max(2 * m);
    }
    let generations = (pcsea_budget / pop).saturating_sub(1).max(1);
    (pop, generations)
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub problems: Vec<ProblemId>,
    pub objective_counts: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    pub mode: Mode,
    pub neighbor_size: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Overrides the canonical total budget when set.
    pub budget_total: Option<usize>,
    /// Generation cap (budget is the usual stopper).
    pub t_max: Option<usize>,
    pub mc_samples: usize,
    pub igd_points: usize,
}

impl ExperimentPlan {
    pub fn new(problems: Vec<ProblemId>, objective_counts: Vec<usize>) -> ExperimentPlan {
        ExperimentPlan {
            problems,
            objective_counts,
            runs: 30,
            base_seed: 42,
            mode: Mode::Standard,
            neighbor_size: 25,
            alpha: 0.96,
            beta: 0.96,
            gamma: 0.5,
            budget_total: None,
            t_max: None,
            mc_samples: DEFAULT_MC_SAMPLES,
            igd_points: DEFAULT_IGD_POINTS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.objective_counts.is_empty() {
            return Err(Error::EmptyInput("experiment grid".into()));
        }
        if self.runs < 1 {
            return Err(Error::InvalidArgument("runs must be >= 1".into()));
        }
        for &m in &self.objective_counts {
            if self.budget_total.is_none() && table2_budget(m).is_none() {
                return Err(Error::InvalidArgument(format!(
                    "no canonical budget for M={m}; set an explicit total"
                )));
            }
        }
        Ok(())
    }

    /// Run configuration for one grid cell and seed.
    pub fn build_run_config(&self, problem: ProblemId, m: usize, seed: u64) -> Result<RunConfig> {
        let spec = ProblemSpec::new(problem, m)?;
        let simplex = reference_simplex(m)?;
        let budget = match self.budget_total {
            Some(total) => split_budget(m, total),
            None => table2_budget(m).expect("validated"),
        };
        let (pcsea_pop, pcsea_generations) = pcsea_settings(m, budget.pcsea);
        let mut cfg = RunConfig::new(spec, simplex);
        cfg.neighbor_size = self.neighbor_size;
        cfg.alpha = self.alpha;
        cfg.beta = self.beta;
        cfg.gamma = self.gamma;
        cfg.eval_budget = budget.main;
        cfg.pcsea_pop = pcsea_pop;
        cfg.pcsea_generations = pcsea_generations;
        cfg.t_max = self.t_max.unwrap_or(usize::MAX);
        cfg.seed = seed;
        cfg.ablations = self.mode.ablations();
        Ok(cfg)
    }
}

/// One completed run with its indicator values.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub problem: String,
    pub objectives: usize,
    pub variant: &'static str,
    pub neighbor_size: usize,
    pub seed: u64,
    pub generations: usize,
    pub evaluations: usize,
    pub pcsea_evaluations: usize,
    pub hv: f64,
    pub hv_method: &'static str,
    pub hv_excluded: usize,
    /// Empty when the problem has no analytic front (minus variants).
    pub igd: Option<f64>,
    pub repair_skipped: usize,
    /// Wall-clock milliseconds; reported in JSON only (results CSV stays
    /// byte-identical across invocations).
    pub wall_ms: u128,
}

/// Per grid cell: medians and half-IQR dispersions.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub objectives: usize,
    pub variant: &'static str,
    pub runs: usize,
    pub hv_median: f64,
    pub hv_dispersion: f64,
    pub igd_median: Option<f64>,
    pub igd_dispersion: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<SummaryRow>,
    /// Runs that failed, as (problem, M, seed, message).
    pub failures: Vec<(String, usize, u64, String)>,
}

/// Executes one run and computes its indicators in normalized objective
/// space (true bounds; HV reference 1.1 per axis; IGD against a sampled
/// analytic front when one exists).
pub fn execute_run(plan: &ExperimentPlan, problem: ProblemId, m: usize, seed: u64) -> Result<RunRecord> {
    let cfg = plan.build_run_config(problem, m, seed)?;
    let started = Instant::now();
    let result = run(&cfg)?;
    let wall_ms = started.elapsed().as_millis();

    let objectives: Vec<Vec<f64>> = result.finals.iter().map(|s| s.objectives.clone()).collect();
    let (ideal, nadir) = cfg.spec.true_bounds();
    let norm = normalize(&objectives, &ideal, &nadir)?;
    let refp = vec![HV_REF; m];

    // reported as a fraction of the reference-box volume, so values are
    // comparable across objective counts
    let box_vol = HV_REF.powi(m as i32);
    let (hv, hv_method, hv_excluded) = if m < HV_MC_THRESHOLD {
        let h = hv_exact(&norm, &refp)?;
        (h.value / box_vol, "exact", h.excluded)
    } else {
        let mut rng = stream(seed, "mc-hv");
        let h = hv_monte_carlo(&norm, &refp, plan.mc_samples, &mut rng)?;
        (h.value / box_vol, "mc", h.excluded)
    };

    let igd_value = match cfg.spec.sample_front(plan.igd_points, &mut stream(seed, "front")) {
        Ok(front) => {
            let front_norm = normalize(&front, &ideal, &nadir)?;
            Some(igd(&norm, &front_norm)?)
        }
        Err(Error::NoKnownFront(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(RunRecord {
        problem: problem.to_string(),
        objectives: m,
        variant: plan.mode.label(),
        neighbor_size: plan.neighbor_size,
        seed,
        generations: result.generations,
        evaluations: result.evaluations,
        pcsea_evaluations: result.pcsea_evaluations,
        hv,
        hv_method,
        hv_excluded,
        igd: igd_value,
        repair_skipped: result.repair_skipped,
        wall_ms,
    })
}

/// Runs the full grid (problems × objective counts × seeds), runs in
/// parallel, aggregation deterministic (grid order, then seed).
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentOutcome> {
    plan.validate()?;
    let mut cells: Vec<(ProblemId, usize, u64)> = Vec::new();
    for &p in &plan.problems {
        for &m in &plan.objective_counts {
            for r in 0..plan.runs {
                cells.push((p, m, plan.base_seed + r as u64));
            }
        }
    }
    let results: Vec<std::result::Result<RunRecord, (ProblemId, usize, u64, String)>> = cells
        .par_iter()
        .map(|&(p, m, seed)| {
            execute_run(plan, p, m, seed).map_err(|e| (p, m, seed, e.to_string()))
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err((p, m, seed, msg)) => failures.push((p.to_string(), m, seed, msg)),
        }
    }

    let mut summaries = Vec::new();
    for &p in &plan.problems {
        for &m in &plan.objective_counts {
            let cell: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.problem == p.to_string() && r.objectives == m)
                .collect();
            if cell.is_empty() {
                continue;
            }
            let hvs: Vec<f64> = cell.iter().map(|r| r.hv).collect();
            let (hv_median, hv_dispersion) = median_and_dispersion(&hvs)?;
            let igds: Vec<f64> = cell.iter().filter_map(|r| r.igd).collect();
            let (igd_median, igd_dispersion) = if igds.len() == cell.len() {
                let (m, d) = median_and_dispersion(&igds)?;
                (Some(m), Some(d))
            } else {
                (None, None)
            };
            summaries.push(SummaryRow {
                problem: p.to_string(),
                objectives: m,
                variant: plan.mode.label(),
                runs: cell.len(),
                hv_median,
                hv_dispersion,
                igd_median,
                igd_dispersion,
            });
        }
    }

    Ok(ExperimentOutcome {
        records,
        summaries,
        failures,
    })
}

/// Rank-sum comparison of two run sets' HV values ("+": first better).
pub fn compare_hv(a: &[RunRecord], b: &[RunRecord], level: f64) -> Result<Comparison> {
    let ha: Vec<f64> = a.iter().map(|r| r.hv).collect();
    let hb: Vec<f64> = b.iter().map(|r| r.hv).collect();
    rank_sum_test(&ha, &hb, level)
}

fn fmt_f(v: f64) -> String {
    format!("{v:.10e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

/// Results CSV: one row per run, no wall-clock column so reruns with the
/// same plan and seed are byte-identical.
pub fn write_results_csv<W: std::io::Write>(w: &mut W, records: &[RunRecord]) -> Result<()> {
    writeln!(
        w,
        "problem,objectives,variant,neighbor_size,seed,generations,evaluations,pcsea_evaluations,hv,hv_method,hv_excluded,igd,repair_skipped"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.objectives,
            r.variant,
            r.neighbor_size,
            r.seed,
            r.generations,
            r.evaluations,
            r.pcsea_evaluations,
            fmt_f(r.hv),
            r.hv_method,
            r.hv_excluded,
            fmt_opt(r.igd),
            r.repair_skipped,
        )?;
    }
    Ok(())
}

/// Summary CSV: one row per grid cell; dispersion is half the
/// interquartile range.
pub fn write_summary_csv<W: std::io::Write>(w: &mut W, summaries: &[SummaryRow]) -> Result<()> {
    writeln!(w, "# dispersion = interquartile range / 2")?;
    writeln!(
        w,
        "problem,objectives,variant,runs,hv_median,hv_dispersion,igd_median,igd_dispersion"
    )?;
    for s in summaries {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            s.problem,
            s.objectives,
            s.variant,
            s.runs,
            fmt_f(s.hv_median),
            fmt_f(s.hv_dispersion),
            fmt_opt(s.igd_median),
            fmt_opt(s.igd_dispersion),
        )?;
    }
    Ok(())
}

/// Writes results.csv, summary.csv, and results.json under `dir`.
pub fn write_outputs(dir: &Path, outcome: &ExperimentOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = std::fs::File::create(dir.join("results.csv"))?;
    write_results_csv(&mut f, &outcome.records)?;
    let mut f = std::fs::File::create(dir.join("summary.csv"))?;
    write_summary_csv(&mut f, &outcome.summaries)?;
    let json = serde_json::to_string_pretty(outcome)
        .map_err(|e| Error::Parse(format!("json serialization: {e}")))?;
    std::fs::write(dir.join("results.json"), json)?;
    Ok(())
}

/// One row of a neighbor-size sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub neighbor_size: usize,
    pub igd_median: Option<f64>,
    pub hv_median: f64,
}

/// Runs a standard experiment per neighbor size and reports the medians.
pub fn neighbor_sweep(plan: &ExperimentPlan, t_values: &[usize]) -> Result<Vec<SweepRow>> {
    if t_values.is_empty() {
        return Err(Error::EmptyInput("neighbor sizes".into()));
    }
    let mut rows = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let mut p = plan.clone();
        p.neighbor_size = t;
        let outcome = run_experiment(&p)?;
        let s = outcome
            .summaries
            .first()
            .ok_or_else(|| Error::EmptyInput("sweep produced no summary".into()))?;
        rows.push(SweepRow {
            neighbor_size: t,
            igd_median: s.igd_median,
            hv_median: s.hv_median,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineOutcome {
    /// First generation whose HV reaches the baseline within 1e-4 relative
    /// error, or the cap when never reached.
    pub generations: usize,
    pub reached: bool,
    pub final_hv: f64,
    /// Per-generation HV, index 0 = initial population.
    pub history: Vec<f64>,
}

/// Records per-generation hypervolume and returns the first generation whose
/// HV is within 1e-4 relative error of (or exceeds) `baseline`, capped at
/// `cap` generations.
///
/// The per-generation HV (a fraction of the reference-box volume, like the
/// run records) is computed over the N representative solutions a final
/// selection would return, not the whole T×N population — full populations
/// make per-generation HV intractable and the representatives are what the
/// run reports anyway. It uses the exact method below the Monte Carlo
/// threshold unless `mc_samples` is set, in which case a fixed-seed Monte
/// Carlo estimate keeps per-generation costs flat (common random numbers
/// make the generation-to-generation comparison consistent).
pub fn generations_to_baseline(
    cfg: &RunConfig,
    baseline: f64,
    cap: usize,
    mc_samples: Option<usize>,
) -> Result<BaselineOutcome> {
    if baseline <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "baseline must be > 0, got {baseline}"
        )));
    }
    let m = cfg.spec.objectives;
    let (ideal, nadir) = cfg.spec.true_bounds();
    let refp = vec![HV_REF; m];
    let mut cfg = cfg.clone();
    cfg.t_max = cap;
    cfg.eval_budget = usize::MAX / 2;

    let mut reached_at: Option<usize> = None;
    let mut last_hv = 0.0;
    let mut history = Vec::new();
    let mut hv_error: Option<Error> = None;
    let seed = cfg.seed;
    let box_vol = HV_REF.powi(m as i32);
    run_with(&cfg, |pop, vectors| {
        let hv = (|| -> Result<f64> {
            let reps = crate::evolution::final_selection(&pop.members, vectors)?;
            let objectives: Vec<Vec<f64>> = reps.iter().map(|s| s.objectives.clone()).collect();
            let norm = normalize(&objectives, &ideal, &nadir)?;
            let raw = match mc_samples {
                Some(samples) => {
                    // fresh stream per evaluation: identical draws each generation
                    let mut rng = stream(seed, "mc-hv");
                    hv_monte_carlo(&norm, &refp, samples, &mut rng)?.value
                }
                None if m < HV_MC_THRESHOLD => hv_exact(&norm, &refp)?.value,
                None => {
                    let mut rng = stream(seed, "mc-hv");
                    hv_monte_carlo(&norm, &refp, DEFAULT_MC_SAMPLES, &mut rng)?.value
                }
            };
            Ok(raw / box_vol)
        })();
        match hv {
            Ok(hv) => {
                last_hv = hv;
                history.push(hv);
                if reached_at.is_none() && (baseline - hv) / baseline <= 1e-4 {
                    reached_at = Some(pop.generation);
                    return false;
                }
                true
            }
            Err(e) => {
                hv_error = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = hv_error {
        return Err(e);
    }
    Ok(match reached_at {
        Some(g) => BaselineOutcome {
            generations: g,
            reached: true,
            final_hv: last_hv,
            history,
        },
        None => BaselineOutcome {
            generations: cap,
            reached: false,
            final_hv: last_hv,
            history,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_divisions_and_budgets() {
        assert_eq!(table1_divisions(3), (14, 0));
        assert_eq!(table1_divisions(5), (5, 0));
        assert_eq!(table1_divisions(8), (3, 2));
        assert_eq!(table1_divisions(10), (2, 2));
        assert_eq!(table1_divisions(15), (2, 1));
        assert_eq!(reference_simplex(3).unwrap().len(), 120);
        assert_eq!(reference_simplex(8).unwrap().len(), 156);

        let b = table2_budget(3).unwrap();
        assert_eq!((b.total, b.pcsea, b.main), (72_000, 15_000, 57_000));
        let b = table2_budget(15).unwrap();
        assert_eq!((b.total, b.pcsea, b.main), (410_000, 75_000, 335_000));
        assert!(table2_budget(4).is_none());
    }

    #[test]
    fn split_budget_respects_canonical_fraction() {
        let b = split_budget(3, 7200);
        assert_eq!(b.total, 7200);
        assert_eq!(b.pcsea, 1500);
        assert_eq!(b.main, 5700);
        let b = split_budget(4, 1000);
        assert_eq!(b.pcsea, 200);
        assert_eq!(b.main, 800);
    }

    #[test]
    fn pcsea_settings_fit_budget() {
        for (m, budget) in [(3, 15_000), (10, 50_000), (3, 500), (8, 300)] {
            let (pop, gens) = pcsea_settings(m, budget);
            assert!(pop >= 2 * m, "pop {pop} for m={m}");
            assert!(pop * gens + pop <= budget.max(pop * 2 + pop), "m={m} budget={budget}");
        }
        let (pop, gens) = pcsea_settings(3, 15_000);
        assert_eq!(pop, 100);
        assert_eq!(gens, 149);
    }

    fn tiny_plan() -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(vec![ProblemId::Dtlz2], vec![3]);
        plan.runs = 2;
        plan.base_seed = 5;
        plan.neighbor_size = 4;
        plan.budget_total = Some(4000);
        plan.t_max = Some(2);
        plan.igd_points = 500;
        plan
    }

    #[test]
    fn experiment_grid_shapes() {
        let plan = tiny_plan();
        let outcome = run_experiment(&plan).unwrap();
        assert_eq!(outcome.records.len(), 2);
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.summaries.len(), 1);
        let s = &outcome.summaries[0];
        assert_eq!(s.runs, 2);
        assert!(s.hv_median >= 0.0);
        assert!(s.igd_median.is_some());
        for r in &outcome.records {
            assert!(r.evaluations <= split_budget(3, 4000).main);
            assert_eq!(r.variant, "standard");
        }
    }

    #[test]
    fn single_run_median_is_the_value() {
        let mut plan = tiny_plan();
        plan.runs = 1;
        let outcome = run_experiment(&plan).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.summaries[0].hv_median, outcome.records[0].hv);
    }

    #[test]
    fn results_csv_deterministic() {
        let plan = tiny_plan();
        let a = run_experiment(&plan).unwrap();
        let b = run_experiment(&plan).unwrap();
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        write_results_csv(&mut csv_a, &a.records).unwrap();
        write_results_csv(&mut csv_b, &b.records).unwrap();
        assert_eq!(csv_a, csv_b);
        assert!(String::from_utf8(csv_a).unwrap().starts_with("problem,"));
    }

    #[test]
    fn minus_problem_skips_igd() {
        let mut plan = tiny_plan();
        plan.problems = vec![ProblemId::Dtlz2Minus];
        plan.runs = 1;
        let outcome = run_experiment(&plan).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert!(outcome.records[0].igd.is_none());
        assert!(outcome.summaries[0].igd_median.is_none());
    }

    #[test]
    fn sweep_rows_per_t() {
        let mut plan = tiny_plan();
        plan.runs = 1;
        let rows = neighbor_sweep(&plan, &[3, 4]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].neighbor_size, 3);
        assert_eq!(rows[1].neighbor_size, 4);
        assert!(neighbor_sweep(&plan, &[]).is_err());
    }

    #[test]
    fn baseline_zero_generations_when_trivial() {
        let plan = tiny_plan();
        let cfg = plan.build_run_config(ProblemId::Dtlz2, 3, 5).unwrap();
        // tiny positive baseline: satisfied by the initial population
        let out = generations_to_baseline(&cfg, 1e-12, 3, None).unwrap();
        assert_eq!(out.generations, 0);
        assert!(out.reached);
    }

    #[test]
    fn baseline_unreachable_caps() {
        let plan = tiny_plan();
        let cfg = plan.build_run_config(ProblemId::Dtlz2, 3, 5).unwrap();
        // above the HV upper bound 1.1^3
        let out = generations_to_baseline(&cfg, 2.0, 2, None).unwrap();
        assert_eq!(out.generations, 2);
        assert!(!out.reached);
        assert!(generations_to_baseline(&cfg, 0.0, 2, None).is_err());
    }

    #[test]
    fn write_outputs_creates_files() {
        let plan = tiny_plan();
        let outcome = run_experiment(&plan).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &outcome).unwrap();
        for name in ["results.csv", "summary.csv", "results.json"] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        let json = std::fs::read_to_string(dir.path().join("results.json")).unwrap();
        assert!(json.contains("\"records\""));
    }
}
