//! MaOEDA-IR main loop: dimension reduction, reduced-space initialization,
//! per-generation diversity repair, regularity-model offspring, and
//! reference-vector-guided environmental/final selection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::reduction::{pcsea_search, reduce_dimensions, translate_population, ReductionMap};
use crate::refvecs::{map_vectors, perp_dist_unchecked, ReferenceVectorSet};
use crate::regmodel::{build_submodel_with, sample_model, NoiseIndexing, RegularityModel};
use crate::rng::stream;

/// One candidate: reduced-space coordinates, their full-space translation,
/// and the evaluated objectives.
#[derive(Debug, Clone)]
pub struct Solution {
    pub reduced: Vec<f64>,
    pub full: Vec<f64>,
    pub objectives: Vec<f64>,
}

/// Current population plus bookkeeping counters.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Solution>,
    pub generation: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Ablations {
    pub no_diversity_repair: bool,
    pub no_dimension_reduction: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    /// Unit simplex reference vectors (N of them).
    pub simplex: Vec<Vec<f64>>,
    /// Neighbor size T; population size is T × N.
    pub neighbor_size: usize,
    /// Dimension-reduction threshold α.
    pub alpha: f64,
    /// Eigenvalue-ratio threshold β for sub-models.
    pub beta: f64,
    /// Sampling-interval enlargement γ.
    pub gamma: f64,
    /// Generation cap.
    pub t_max: usize,
    /// Main-loop evaluation cap (initialization included, corner search not).
    pub eval_budget: usize,
    pub pcsea_pop: usize,
    pub pcsea_generations: usize,
    pub seed: u64,
    pub ablations: Ablations,
    pub noise: NoiseIndexing,
}

impl RunConfig {
    /// Paper defaults for everything except problem, vectors, and budgets.
    pub fn new(spec: ProblemSpec, simplex: Vec<Vec<f64>>) -> RunConfig {
        RunConfig {
            spec,
            simplex,
            neighbor_size: 25,
            alpha: 0.96,
            beta: 0.96,
            gamma: 0.5,
            t_max: usize::MAX,
            eval_budget: 100_000,
            pcsea_pop: 100,
            pcsea_generations: 50,
            seed: 0,
            ablations: Ablations::default(),
            noise: NoiseIndexing::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.neighbor_size < 2 {
            return Err(Error::InvalidArgument(format!(
                "neighbor size must be >= 2, got {}",
                self.neighbor_size
            )));
        }
        if self.simplex.is_empty() {
            return Err(Error::EmptyInput("reference vectors".into()));
        }
        if self.simplex.iter().any(|r| r.len() != self.spec.objectives) {
            return Err(Error::DimensionMismatch {
                expected: self.spec.objectives,
                actual: self.simplex.iter().map(|r| r.len()).find(|&l| l != self.spec.objectives).unwrap_or(0),
            });
        }
        let pop = self.neighbor_size * self.simplex.len();
        if self.eval_budget < pop {
            return Err(Error::InvalidArgument(format!(
                "evaluation budget {} below initial population {pop}",
                self.eval_budget
            )));
        }
        Ok(())
    }
}

/// One row of the optional per-generation trace.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub generation: usize,
    pub evaluations: usize,
    pub repair_count: usize,
    pub offspring_count: usize,
    pub unassigned_vectors: usize,
    pub front_size: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final N solutions, one per reference vector where possible.
    pub finals: Vec<Solution>,
    pub reduction: ReductionMap,
    /// Main-loop evaluations consumed (≤ eval_budget).
    pub evaluations: usize,
    pub pcsea_evaluations: usize,
    pub generations: usize,
    /// Vectors skipped in repair because a model could not be built.
    pub repair_skipped: usize,
    pub trace: Vec<TraceRecord>,
}

/// Executes the full pipeline and returns the final N solutions.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    run_with(config, |_, _| true)
}

/// Like [`run`], but calls `observer` on the initial population (generation
/// 0) and after every environmental selection. Returning `false` stops the
/// loop cleanly (final selection still runs).
pub fn run_with<F>(config: &RunConfig, mut observer: F) -> Result<RunResult>
where
    F: FnMut(&Population, &ReferenceVectorSet) -> bool,
{
    config.validate()?;
    let spec = &config.spec;
    let n_vec = config.simplex.len();
    let pop_size = config.neighbor_size * n_vec;

    // dimension reduction (once, on corner training data)
    let mut pcsea_evaluations = 0;
    let reduction = if config.ablations.no_dimension_reduction {
        ReductionMap::identity(spec.variables)
    } else {
        let mut rng = stream(config.seed, "pcsea");
        let archive = pcsea_search(spec, config.pcsea_pop, config.pcsea_generations, &mut rng)?;
        pcsea_evaluations = archive.evaluations_used;
        let map = reduce_dimensions(&archive.decisions, config.alpha)?;
        if map.retained == 0 {
            // single-point training data: keep the full space rather than
            // collapsing the search to one solution
            ReductionMap::identity(spec.variables)
        } else {
            map
        }
    };

    // initial TN population in the reduced space
    let mut rng_init = stream(config.seed, "init");
    let k = reduction.retained;
    let retained: Vec<usize> = reduction.retained_columns().collect();
    let init_reduced: Vec<Vec<f64>> = (0..pop_size)
        .map(|_| {
            retained
                .iter()
                .map(|&i| {
                    let mu = reduction.mean[i];
                    -mu + rng_init.random::<f64>()
                })
                .collect()
        })
        .collect();
    debug_assert!(init_reduced.iter().all(|r| r.len() == k));

    let mut evaluations = 0;
    let members = evaluate_reduced(&init_reduced, &reduction, spec, &mut evaluations)?;
    let mut pop = Population {
        members,
        generation: 0,
        evaluations,
    };

    let objectives: Vec<Vec<f64>> = pop.members.iter().map(|s| s.objectives.clone()).collect();
    let nd = nondominated_indices(&objectives);
    let nd_obj: Vec<Vec<f64>> = nd.iter().map(|&i| objectives[i].clone()).collect();
    let mut vectors = map_vectors(&config.simplex, &nd_obj)?;

    let mut rng_repair = stream(config.seed, "repair");
    let mut rng_offspring = stream(config.seed, "offspring");
    let mut repair_skipped = 0;
    let mut trace = Vec::new();
    let mut keep_going = observer(&pop, &vectors);

    while keep_going && pop.generation < config.t_max && pop.evaluations < config.eval_budget {
        let remaining = config.eval_budget - pop.evaluations;

        // diversity repair
        let (repair_reduced, unassigned) = if config.ablations.no_diversity_repair {
            (Vec::new(), 0)
        } else {
            let (mut r, unassigned, skipped) = repair_diversity(
                &pop.members,
                &vectors,
                config.neighbor_size,
                config.beta,
                config.gamma,
                config.noise,
                &mut rng_repair,
            )?;
            repair_skipped += skipped;
            r.truncate(remaining);
            (r, unassigned)
        };
        let repair_count = repair_reduced.len();
        let repaired = evaluate_reduced(&repair_reduced, &reduction, spec, &mut pop.evaluations)?;
        let mut union = pop.members.clone();
        union.extend(repaired);

        // non-dominated select and re-map vectors
        let union_obj: Vec<Vec<f64>> = union.iter().map(|s| s.objectives.clone()).collect();
        let nd = nondominated_indices(&union_obj);
        let s_set: Vec<Solution> = nd.iter().map(|&i| union[i].clone()).collect();
        let nd_obj: Vec<Vec<f64>> = s_set.iter().map(|s| s.objectives.clone()).collect();
        vectors = map_vectors(&config.simplex, &nd_obj)?;

        // offspring
        let remaining = config.eval_budget - pop.evaluations;
        let mut offspring_reduced = generate_offspring(
            &s_set,
            &vectors,
            config.neighbor_size,
            config.beta,
            config.gamma,
            config.noise,
            &mut rng_offspring,
        )?;
        offspring_reduced.truncate(remaining);
        let offspring_count = offspring_reduced.len();
        let offspring = evaluate_reduced(&offspring_reduced, &reduction, spec, &mut pop.evaluations)?;
        union.extend(offspring);

        // non-dominated select and update vectors
        let union_obj: Vec<Vec<f64>> = union.iter().map(|s| s.objectives.clone()).collect();
        let nd = nondominated_indices(&union_obj);
        let front_size = nd.len();
        let nd_obj: Vec<Vec<f64>> = nd.iter().map(|&i| union_obj[i].clone()).collect();
        vectors = map_vectors(&config.simplex, &nd_obj)?;

        // environmental selection back to TN
        pop.members = environmental_selection(&union, &vectors, config.neighbor_size)?;
        pop.generation += 1;

        trace.push(TraceRecord {
            generation: pop.generation,
            evaluations: pop.evaluations,
            repair_count,
            offspring_count,
            unassigned_vectors: unassigned,
            front_size,
        });
        keep_going = observer(&pop, &vectors);
    }

    let finals = final_selection(&pop.members, &vectors)?;
    Ok(RunResult {
        finals,
        reduction,
        evaluations: pop.evaluations,
        pcsea_evaluations,
        generations: pop.generation,
        repair_skipped,
        trace,
    })
}

/// Translates reduced-space samples to full space, evaluates them, and keeps
/// the clamped reduced coordinates consistent with the full-space vector.
fn evaluate_reduced(
    reduced: &[Vec<f64>],
    map: &ReductionMap,
    spec: &ProblemSpec,
    evaluations: &mut usize,
) -> Result<Vec<Solution>> {
    let fulls = translate_population(reduced, map)?;
    let retained: Vec<usize> = map.retained_columns().collect();
    let mut out = Vec::with_capacity(fulls.len());
    for full in fulls {
        let objectives = spec.evaluate(&full)?;
        *evaluations += 1;
        let reduced: Vec<f64> = retained.iter().map(|&i| full[i] - map.mean[i]).collect();
        out.push(Solution {
            reduced,
            full,
            objectives,
        });
    }
    Ok(out)
}

/// Association directions: mapped vectors translated back to the origin
/// (r ⊙ a). Objectives are shifted by the ideal point before measuring
/// perpendicular distances, so association is meaningful even when the front
/// lives far from the origin.
fn assoc_directions(vectors: &ReferenceVectorSet) -> Vec<Vec<f64>> {
    vectors
        .mapped
        .iter()
        .map(|v| {
            v.iter()
                .zip(&vectors.ideal)
                .map(|(c, z)| (c - z).max(1e-12))
                .collect()
        })
        .collect()
}

fn shifted(f: &[f64], ideal: &[f64]) -> Vec<f64> {
    f.iter().zip(ideal).map(|(a, z)| a - z).collect()
}

/// Perpendicular distance of each point (ideal-shifted) to each direction.
fn perp_table(objectives: &[Vec<f64>], vectors: &ReferenceVectorSet) -> Vec<Vec<f64>> {
    let dirs = assoc_directions(vectors);
    let norms: Vec<f64> = dirs.iter().map(|d| d.iter().map(|c| c * c).sum()).collect();
    objectives
        .iter()
        .map(|f| {
            let s = shifted(f, &vectors.ideal);
            dirs.iter()
                .zip(&norms)
                .map(|(d, &n)| perp_dist_unchecked(&s, d, n))
                .collect()
        })
        .collect()
}

/// Diversity repair (Algorithm 7): for every reference vector with no
/// associated non-dominated solution, fit a sub-model to its T nearest
/// population members plus the nearest non-dominated solution and sample T
/// reduced-space candidates.
///
/// Returns (samples, unassigned-vector count, skipped-vector count).
pub fn repair_diversity(
    members: &[Solution],
    vectors: &ReferenceVectorSet,
    t: usize,
    beta: f64,
    gamma: f64,
    noise: NoiseIndexing,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Vec<f64>>, usize, usize)> {
    if members.is_empty() {
        return Err(Error::EmptyInput("population for diversity repair".into()));
    }
    let objectives: Vec<Vec<f64>> = members.iter().map(|s| s.objectives.clone()).collect();
    let nd = nondominated_indices(&objectives);
    let table = perp_table(&objectives, vectors);

    let mut assigned = vec![false; vectors.len()];
    for &i in &nd {
        let best = argmin_row(&table[i]);
        assigned[best] = true;
    }

    let mut samples = Vec::new();
    let mut unassigned = 0;
    let mut skipped = 0;
    for vi in 0..vectors.len() {
        if assigned[vi] {
            continue;
        }
        unassigned += 1;
        let neighbors = neighbor_set(members, &nd, &table, vi, t);
        if neighbors.len() < 2 {
            skipped += 1;
            continue;
        }
        let model = build_submodel_with(&neighbors, beta, gamma, noise)?;
        samples.extend(sample_model(&model, t, rng)?);
    }
    Ok((samples, unassigned, skipped))
}

/// T nearest members by perpendicular distance to vector `vi`, plus the
/// nearest non-dominated member. The extra member is kept even when it
/// duplicates one of the T (sets have size T or T+1).
fn neighbor_set(
    members: &[Solution],
    nd: &[usize],
    table: &[Vec<f64>],
    vi: usize,
    t: usize,
) -> Vec<Vec<f64>> {
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        table[a][vi]
            .partial_cmp(&table[b][vi])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut out: Vec<Vec<f64>> = order
        .iter()
        .take(t)
        .map(|&i| members[i].reduced.clone())
        .collect();
    if let Some(&best_nd) = nd.iter().min_by(|&&a, &&b| {
        table[a][vi]
            .partial_cmp(&table[b][vi])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    }) {
        out.push(members[best_nd].reduced.clone());
    }
    out
}

/// Offspring generation (Algorithm 8): every reference vector fits a
/// sub-model to its T nearest non-dominated solutions plus the single
/// nearest one and samples T reduced-space candidates; |output| = T × N.
pub fn generate_offspring(
    s_set: &[Solution],
    vectors: &ReferenceVectorSet,
    t: usize,
    beta: f64,
    gamma: f64,
    noise: NoiseIndexing,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    if s_set.is_empty() {
        return Err(Error::EmptyInput("non-dominated set for offspring".into()));
    }
    let objectives: Vec<Vec<f64>> = s_set.iter().map(|s| s.objectives.clone()).collect();
    let table = perp_table(&objectives, vectors);
    let all: Vec<usize> = (0..s_set.len()).collect();

    let mut out = Vec::with_capacity(t * vectors.len());
    for vi in 0..vectors.len() {
        let mut neighbors = neighbor_set(s_set, &all, &table, vi, t);
        if neighbors.len() < 2 {
            // single-point set: degenerate model around that point
            neighbors.push(neighbors[0].clone());
        }
        let model = build_submodel_with(&neighbors, beta, gamma, noise)?;
        out.extend(sample_model(&model, t, rng)?);
    }
    Ok(out)
}

/// Degenerate single-point model (used by tests and fallbacks).
pub fn point_model(mu: Vec<f64>, gamma: f64) -> RegularityModel {
    RegularityModel {
        mu,
        components: Vec::new(),
        lo: Vec::new(),
        hi: Vec::new(),
        gamma,
        eps: 0.0,
        degenerate: true,
    }
}

/// True when `a` Pareto-dominates `b` (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Indices of the non-dominated subset, ascending.
///
/// Points are scanned in ascending objective-sum order against a growing
/// archive; a dominator always has a strictly smaller sum, so the archive
/// check is sufficient.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let sums: Vec<f64> = points.iter().map(|p| p.iter().sum()).collect();
    order.sort_by(|&a, &b| {
        sums[a]
            .partial_cmp(&sums[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut archive: Vec<usize> = Vec::new();
    for &i in &order {
        if !archive.iter().any(|&j| dominates(&points[j], &points[i])) {
            archive.push(i);
        }
    }
    archive.sort_unstable();
    archive
}

/// Fast non-dominated sort: fronts of point indices, F₁ first.
pub fn nondominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

fn argmin_row(row: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &d) in row.iter().enumerate() {
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Environmental selection (Algorithm 9): associate the non-dominated
/// candidates to reference vectors, truncate over-full lists by
/// non-dominated sorting with perpendicular-distance fill, then top up
/// deficits from the remaining pool by smallest perpendicular distance.
/// Selected solutions leave the pool immediately, so nothing is picked
/// twice. Output size is exactly T × N.
pub fn environmental_selection(
    candidates: &[Solution],
    vectors: &ReferenceVectorSet,
    t: usize,
) -> Result<Vec<Solution>> {
    let n_vec = vectors.len();
    let want = t * n_vec;
    if candidates.len() < want {
        return Err(Error::InvalidArgument(format!(
            "environmental selection needs >= {want} candidates, got {}",
            candidates.len()
        )));
    }
    let objectives: Vec<Vec<f64>> = candidates.iter().map(|s| s.objectives.clone()).collect();
    let table = perp_table(&objectives, vectors);
    let nd = nondominated_indices(&objectives);

    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n_vec];
    for &i in &nd {
        lists[argmin_row(&table[i])].push(i);
    }

    let mut taken = vec![false; candidates.len()];
    let mut per_vector: Vec<Vec<usize>> = vec![Vec::new(); n_vec];

    // phase 2: over-full lists are truncated front by front, filling the
    // splitting front by smallest perpendicular distance
    for vi in 0..n_vec {
        let list = &lists[vi];
        if list.len() <= t {
            per_vector[vi] = list.clone();
        } else {
            let pts: Vec<Vec<f64>> = list.iter().map(|&i| objectives[i].clone()).collect();
            let fronts = nondominated_sort(&pts);
            let mut chosen = Vec::with_capacity(t);
            for front in fronts {
                if chosen.len() + front.len() <= t {
                    chosen.extend(front.iter().map(|&l| list[l]));
                    if chosen.len() == t {
                        break;
                    }
                } else {
                    let mut split: Vec<usize> = front.iter().map(|&l| list[l]).collect();
                    split.sort_by(|&a, &b| {
                        table[a][vi]
                            .partial_cmp(&table[b][vi])
                            .unwrap_or(std::cmp::Ordering::Equal)
                            .then(a.cmp(&b))
                    });
                    split.truncate(t - chosen.len());
                    chosen.extend(split);
                    break;
                }
            }
            per_vector[vi] = chosen;
        }
        for &i in &per_vector[vi] {
            taken[i] = true;
        }
    }

    // phase 3: deficits pull the nearest remaining candidates
    for vi in 0..n_vec {
        let deficit = t - per_vector[vi].len();
        if deficit == 0 {
            continue;
        }
        let mut pool: Vec<usize> = (0..candidates.len()).filter(|&i| !taken[i]).collect();
        pool.sort_by(|&a, &b| {
            table[a][vi]
                .partial_cmp(&table[b][vi])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &i in pool.iter().take(deficit) {
            per_vector[vi].push(i);
            taken[i] = true;
        }
    }

    let mut out = Vec::with_capacity(want);
    for chosen in per_vector {
        debug_assert_eq!(chosen.len(), t);
        out.extend(chosen.into_iter().map(|i| candidates[i].clone()));
    }
    debug_assert_eq!(out.len(), want);
    Ok(out)
}

/// Final selection: environmental selection with T = 1, yielding exactly N
/// solutions.
pub fn final_selection(members: &[Solution], vectors: &ReferenceVectorSet) -> Result<Vec<Solution>> {
    environmental_selection(members, vectors, 1)
}
