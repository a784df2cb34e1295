//! Decision-space dimension reduction: PCSEA corner search collects
//! Pareto-corner training data, PCA drops the decision dimensions the
//! principal subspace does not reconstruct, and reduced-space populations are
//! translated back to full space through the stored column means.

use rand::Rng;

use crate::error::{Error, Result};
use crate::evolution::nondominated_indices;
use crate::problems::ProblemSpec;
use crate::regmodel::symmetric_eigen_desc;

/// Index set of removed decision dimensions plus the column means used for
/// back-translation.
#[derive(Debug, Clone)]
pub struct ReductionMap {
    /// Sorted, unique indices of removed decision dimensions.
    pub removed: Vec<usize>,
    /// Column means of the training data (length n).
    pub mean: Vec<f64>,
    /// Retained dimension count k = n - |removed|.
    pub retained: usize,
    /// True when the training data had rank 0 (single-point Pareto set).
    pub degenerate: bool,
}

impl ReductionMap {
    /// Identity map: nothing removed, zero means. Used when dimension
    /// reduction is ablated.
    pub fn identity(n: usize) -> ReductionMap {
        ReductionMap {
            removed: Vec::new(),
            mean: vec![0.0; n],
            retained: n,
            degenerate: false,
        }
    }

    pub fn full_dim(&self) -> usize {
        self.mean.len()
    }

    /// Iterator over retained column indices in ascending order.
    pub fn retained_columns(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.full_dim();
        (0..n).filter(move |i| self.removed.binary_search(i).is_err())
    }
}

/// Pareto-corner training data from PCSEA.
#[derive(Debug, Clone)]
pub struct CornerArchive {
    /// Mutually non-dominated decision vectors.
    pub decisions: Vec<Vec<f64>>,
    /// Their objective vectors.
    pub objectives: Vec<Vec<f64>>,
    pub generations_used: usize,
    pub evaluations_used: usize,
}

/// Sum of squared objective values excluding index `i` (0-based).
pub fn exclusive_l2(f: &[f64], i: usize) -> Result<f64> {
    if i >= f.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            limit: f.len(),
        });
    }
    Ok(f.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| v * v)
        .sum())
}

/// Pareto corner search: per generation, 2M ascending lists (M single
/// objectives and M exclusive-L2 norms) rank the population; each solution's
/// fitness is its best rank across the lists. Variation is SBX plus
/// polynomial mutation; survival is elitist on best rank. Returns the
/// non-dominated subset of the final population.
pub fn pcsea_search<R: Rng>(
    spec: &ProblemSpec,
    pop_size: usize,
    generations: usize,
    rng: &mut R,
) -> Result<CornerArchive> {
    if pop_size < 2 * spec.objectives {
        return Err(Error::InvalidArgument(format!(
            "pcsea population {pop_size} below 2M = {}",
            2 * spec.objectives
        )));
    }
    if generations < 1 {
        return Err(Error::InvalidArgument("pcsea needs at least one generation".into()));
    }
    let n = spec.variables;
    let mut xs: Vec<Vec<f64>> = (0..pop_size)
        .map(|_| (0..n).map(|_| rng.random()).collect())
        .collect();
    let mut fs: Vec<Vec<f64>> = xs.iter().map(|x| spec.evaluate(x)).collect::<Result<_>>()?;
    let mut evals = pop_size;

    for _ in 0..generations {
        let fitness = corner_fitness(&fs, spec.objectives);
        let mut children = Vec::with_capacity(pop_size);
        while children.len() < pop_size {
            let a = tournament(&fitness, rng);
            let b = tournament(&fitness, rng);
            let (mut c1, mut c2) = sbx(&xs[a], &xs[b], 20.0, rng);
            polynomial_mutation(&mut c1, 20.0, 1.0 / n as f64, rng);
            polynomial_mutation(&mut c2, 20.0, 1.0 / n as f64, rng);
            children.push(c1);
            if children.len() < pop_size {
                children.push(c2);
            }
        }
        let child_fs: Vec<Vec<f64>> = children
            .iter()
            .map(|x| spec.evaluate(x))
            .collect::<Result<_>>()?;
        evals += children.len();

        xs.extend(children);
        fs.extend(child_fs);
        let combined_fitness = corner_fitness(&fs, spec.objectives);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by_key(|&i| (combined_fitness[i], i));
        order.truncate(pop_size);
        xs = order.iter().map(|&i| xs[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i].clone()).collect();
    }

    let nd = nondominated_indices(&fs);
    Ok(CornerArchive {
        decisions: nd.iter().map(|&i| xs[i].clone()).collect(),
        objectives: nd.iter().map(|&i| fs[i].clone()).collect(),
        generations_used: generations,
        evaluations_used: evals,
    })
}

/// Weight of the squared-norm regularizer in the corner list keys. On
/// problems whose geometry lets an objective (or an exclusive norm) come
/// arbitrarily close to zero far from the front, whole clusters share a
/// near-zero primary key and would feel no convergence pressure; the small
/// norm term orders such clusters by overall convergence instead.
const CORNER_NORM_WEIGHT: f64 = 1e-3;

/// Best (smallest) rank of each solution across the 2M corner lists.
fn corner_fitness(fs: &[Vec<f64>], m: usize) -> Vec<usize> {
    let len = fs.len();
    let mut best = vec![usize::MAX; len];
    let mut order: Vec<usize> = (0..len).collect();
    let mut keys = vec![0.0f64; len];
    let norms: Vec<f64> = fs.iter().map(|f| f.iter().map(|v| v * v).sum()).collect();
    for list in 0..(2 * m) {
        for i in 0..len {
            let primary = if list < m {
                fs[i][list]
            } else {
                norms[i] - fs[i][list - m] * fs[i][list - m]
            };
            keys[i] = primary + CORNER_NORM_WEIGHT * norms[i];
        }
        order.sort_by(|&a, &b| {
            keys[a]
                .partial_cmp(&keys[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for (rank, &i) in order.iter().enumerate() {
            best[i] = best[i].min(rank);
        }
    }
    best
}

fn tournament<R: Rng>(fitness: &[usize], rng: &mut R) -> usize {
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    if fitness[b] < fitness[a] {
        b
    } else {
        a
    }
}

/// Bounded simulated binary crossover on [0,1], distribution index `eta`.
pub(crate) fn sbx<R: Rng>(p1: &[f64], p2: &[f64], eta: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for j in 0..p1.len() {
        if rng.random::<f64>() > 0.5 {
            continue;
        }
        let (x1, x2) = (p1[j].min(p2[j]), p1[j].max(p2[j]));
        if x2 - x1 < 1e-14 {
            continue;
        }
        let u: f64 = rng.random();
        let spread = |beta: f64| -> f64 {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let beta1 = 1.0 + 2.0 * x1 / (x2 - x1);
        let beta2 = 1.0 + 2.0 * (1.0 - x2) / (x2 - x1);
        let bq1 = spread(beta1);
        let bq2 = spread(beta2);
        let v1 = 0.5 * ((x1 + x2) - bq1 * (x2 - x1));
        let v2 = 0.5 * ((x1 + x2) + bq2 * (x2 - x1));
        let (v1, v2) = if rng.random::<f64>() < 0.5 { (v2, v1) } else { (v1, v2) };
        c1[j] = v1.clamp(0.0, 1.0);
        c2[j] = v2.clamp(0.0, 1.0);
    }
    (c1, c2)
}

/// Bounded polynomial mutation on [0,1], distribution index `eta`.
pub(crate) fn polynomial_mutation<R: Rng>(x: &mut [f64], eta: f64, prob: f64, rng: &mut R) {
    for v in x.iter_mut() {
        if rng.random::<f64>() >= prob {
            continue;
        }
        let u: f64 = rng.random();
        let delta = if u < 0.5 {
            let b = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - *v).powf(eta + 1.0);
            b.powf(1.0 / (eta + 1.0)) - 1.0
        } else {
            let b = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (*v).powf(eta + 1.0);
            1.0 - b.powf(1.0 / (eta + 1.0))
        };
        *v = (*v + delta).clamp(0.0, 1.0);
    }
}

/// Zero-column tolerances: a column of the PCA back-projection counts as
/// removed when its mean absolute value is below the scale-aware absolute
/// floor, or negligible next to the largest reconstructed column. The
/// relative clause matters on finite training sets: spurious sample
/// correlations let the kept components reconstruct a noticeable fraction of
/// a pure-noise column's (tiny) magnitude, so comparing against the column
/// itself cannot separate noise from signal, while the absolute data scale
/// separates them by orders of magnitude.
const ZERO_COL_ABS: f64 = 1e-8;
const ZERO_COL_REL: f64 = 0.1;

/// PCA-based dimension reduction over the corner training data.
///
/// Centers the rows, keeps the fewest principal components whose cumulative
/// eigenvalue ratio reaches `alpha`, back-projects, and removes every column
/// the back-projection leaves at zero.
pub fn reduce_dimensions(x: &[Vec<f64>], alpha: f64) -> Result<ReductionMap> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension reduction needs >= 2 training rows, got {}",
            x.len()
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0, 1], got {alpha}")));
    }
    let rows = x.len();
    let n = x[0].len();
    if x.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.iter().map(|r| r.len()).find(|&l| l != n).unwrap_or(n),
        });
    }

    let mean: Vec<f64> = (0..n)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / rows as f64)
        .collect();
    let centered: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(v, mu)| v - mu).collect())
        .collect();

    let (eigvals, eigvecs) = covariance_eigen(&centered);
    let total: f64 = eigvals.iter().sum();
    if total <= 1e-300 {
        // all rows identical: the Pareto set collapsed to a single point
        return Ok(ReductionMap {
            removed: (0..n).collect(),
            mean,
            retained: 0,
            degenerate: true,
        });
    }

    let mut keep = 0;
    let mut cum = 0.0;
    while keep < n && cum / total < alpha {
        cum += eigvals[keep];
        keep += 1;
    }

    // back-projection X_hat = X' U U^T restricted to the kept components
    let mut rec_means = vec![0.0f64; n];
    for row in &centered {
        let projs: Vec<f64> = eigvecs
            .iter()
            .take(keep)
            .map(|u| row.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect();
        for j in 0..n {
            let rec: f64 = projs.iter().zip(eigvecs.iter().take(keep)).map(|(p, u)| p * u[j]).sum();
            rec_means[j] += rec.abs();
        }
    }
    for r in &mut rec_means {
        *r /= rows as f64;
    }
    let dominant = rec_means.iter().cloned().fold(0.0f64, f64::max);
    let mut removed = Vec::new();
    for j in 0..n {
        if rec_means[j] < ZERO_COL_ABS * (1.0 + mean[j].abs())
            || rec_means[j] < ZERO_COL_REL * dominant
        {
            removed.push(j);
        }
    }

    Ok(ReductionMap {
        retained: n - removed.len(),
        removed,
        mean,
        degenerate: false,
    })
}

/// Eigen-decomposition (descending) of the sample covariance of centered rows.
fn covariance_eigen(centered: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let rows = centered.len();
    let n = centered[0].len();
    let mut cov = vec![vec![0.0; n]; n];
    for row in centered {
        for i in 0..n {
            for j in i..n {
                cov[i][j] += row[i] * row[j];
            }
        }
    }
    let norm = 1.0 / (rows as f64 - 1.0);
    for i in 0..n {
        for j in i..n {
            cov[i][j] *= norm;
            cov[j][i] = cov[i][j];
        }
    }
    symmetric_eigen_desc(&cov)
}

/// Translates a reduced-space population back to full space: removed columns
/// carry the stored means, retained columns add the reduced coordinates to
/// their means, and everything is clamped to the [0,1] decision box.
pub fn translate_population(p0: &[Vec<f64>], map: &ReductionMap) -> Result<Vec<Vec<f64>>> {
    let n = map.full_dim();
    let mut out = Vec::with_capacity(p0.len());
    for row in p0 {
        if row.len() != map.retained {
            return Err(Error::DimensionMismatch {
                expected: map.retained,
                actual: row.len(),
            });
        }
        let mut full = map.mean.clone();
        for (l, i) in map.retained_columns().enumerate() {
            full[i] += row[l];
        }
        for v in &mut full {
            *v = v.clamp(0.0, 1.0);
        }
        debug_assert_eq!(full.len(), n);
        out.push(full);
    }
    Ok(out)
}
