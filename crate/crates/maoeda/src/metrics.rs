//! Performance indicators: objective normalization, IGD, exact and Monte
//! Carlo hypervolume, and the Mann-Whitney rank-sum comparison.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::evolution::dominates;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorMethod {
    Igd,
    HvExact,
    HvMc,
}

#[derive(Debug, Clone, Copy)]
pub struct IndicatorResult {
    pub value: f64,
    pub method: IndicatorMethod,
    /// Monte Carlo sample count (0 for deterministic methods).
    pub samples: usize,
    pub normalized: bool,
}

/// Hypervolume value plus the number of points excluded for lying beyond the
/// reference point (they contribute no volume; a large count usually means
/// the population never entered the reference box).
#[derive(Debug, Clone, Copy)]
pub struct Hypervolume {
    pub value: f64,
    pub excluded: usize,
}

/// Componentwise (f − ideal) / (nadir − ideal). Values beyond the nadir stay
/// above 1 — clipping would hide them from the indicators.
pub fn normalize(points: &[Vec<f64>], ideal: &[f64], nadir: &[f64]) -> Result<Vec<Vec<f64>>> {
    let m = ideal.len();
    if nadir.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: nadir.len(),
        });
    }
    let range: Vec<f64> = nadir.iter().zip(ideal).map(|(n, i)| n - i).collect();
    if range.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidArgument(
            "normalization requires nadir > ideal componentwise".into(),
        ));
    }
    points
        .iter()
        .map(|p| {
            if p.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: p.len(),
                });
            }
            Ok(p.iter()
                .zip(ideal)
                .zip(&range)
                .map(|((f, i), r)| (f - i) / r)
                .collect())
        })
        .collect()
}

/// Mean over reference points of the Euclidean distance to the nearest
/// solution.
pub fn igd(solutions: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    if solutions.is_empty() {
        return Err(Error::EmptyInput("solution set for igd".into()));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("reference set for igd".into()));
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            solutions
                .iter()
                .map(|s| {
                    r.iter()
                        .zip(s)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    Ok(total / reference.len() as f64)
}

/// Exact hypervolume (minimization) of the region dominated by `points` and
/// bounded by `refp`, via recursive exclusive-volume slicing with a 2-D
/// sweep base case. Points not strictly inside the reference box are
/// excluded and counted.
pub fn hv_exact(points: &[Vec<f64>], refp: &[f64]) -> Result<Hypervolume> {
    let m = refp.len();
    for p in points {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hypervolume input".into()));
        }
    }
    let inside: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(refp).all(|(a, r)| a < r))
        .cloned()
        .collect();
    let excluded = points.len() - inside.len();
    let front = prune(inside);
    Ok(Hypervolume {
        value: wfg(&front, refp),
        excluded,
    })
}

/// Keeps the non-dominated, deduplicated subset.
fn prune(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup();
    let mut keep = Vec::with_capacity(pts.len());
    for p in &pts {
        if !pts.iter().any(|q| dominates(q, p)) {
            keep.push(p.clone());
        }
    }
    keep
}

fn wfg(front: &[Vec<f64>], refp: &[f64]) -> f64 {
    match front.len() {
        0 => 0.0,
        1 => inclusive(&front[0], refp),
        _ if refp.len() == 2 => hv2d(front, refp),
        _ => front
            .iter()
            .enumerate()
            .map(|(i, p)| exclusive(p, &front[i + 1..], refp))
            .sum(),
    }
}

fn inclusive(p: &[f64], refp: &[f64]) -> f64 {
    p.iter().zip(refp).map(|(a, r)| r - a).product()
}

fn exclusive(p: &[f64], rest: &[Vec<f64>], refp: &[f64]) -> f64 {
    let limited: Vec<Vec<f64>> = rest
        .iter()
        .map(|q| q.iter().zip(p).map(|(a, b)| a.max(*b)).collect())
        .collect();
    inclusive(p, refp) - wfg(&prune(limited), refp)
}

/// 2-D sweep: sort ascending in the first objective and stack slabs.
fn hv2d(front: &[Vec<f64>], refp: &[f64]) -> f64 {
    let mut pts = front.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap_or(std::cmp::Ordering::Equal));
    let mut vol = 0.0;
    let mut prev_y = refp[1];
    for p in &pts {
        if p[1] < prev_y {
            vol += (refp[0] - p[0]) * (prev_y - p[1]);
            prev_y = p[1];
        }
    }
    vol
}

/// Monte Carlo hypervolume: uniform samples in [min-corner, ref] (min-corner
/// clipped below by 0), returning the dominated fraction times the box
/// volume. Deterministic given the rng.
pub fn hv_monte_carlo<R: Rng>(
    points: &[Vec<f64>],
    refp: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<Hypervolume> {
    if samples < 1 {
        return Err(Error::InvalidArgument("monte carlo needs >= 1 sample".into()));
    }
    let m = refp.len();
    for p in points {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: p.len(),
            });
        }
    }
    let inside: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(refp).all(|(a, r)| a < r))
        .collect();
    let excluded = points.len() - inside.len();
    if inside.is_empty() {
        return Ok(Hypervolume {
            value: 0.0,
            excluded,
        });
    }
    let lo: Vec<f64> = (0..m)
        .map(|i| {
            inside
                .iter()
                .map(|p| p[i])
                .fold(f64::INFINITY, f64::min)
                .max(0.0)
        })
        .collect();
    let box_vol: f64 = lo.iter().zip(refp).map(|(a, r)| r - a).product();
    let mut hits = 0usize;
    let mut sample = vec![0.0; m];
    for _ in 0..samples {
        for i in 0..m {
            sample[i] = lo[i] + rng.random::<f64>() * (refp[i] - lo[i]);
        }
        if inside.iter().any(|p| p.iter().zip(&sample).all(|(a, s)| a <= s)) {
            hits += 1;
        }
    }
    Ok(Hypervolume {
        value: box_vol * hits as f64 / samples as f64,
        excluded,
    })
}

/// Outcome of a two-sided rank-sum comparison: `Better` means sample `a` has
/// significantly larger values than `b` (callers flip the reading for
/// lower-is-better indicators).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Better,
    Equal,
    Worse,
}

impl Comparison {
    pub fn mirror(self) -> Comparison {
        match self {
            Comparison::Better => Comparison::Worse,
            Comparison::Equal => Comparison::Equal,
            Comparison::Worse => Comparison::Better,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Better => "+",
            Comparison::Equal => "=",
            Comparison::Worse => "-",
        }
    }
}

/// Two-sided Mann-Whitney rank-sum test at significance `level`. Exact null
/// distribution (tie-aware, via doubled midranks) for combined sample size
/// ≤ 20, normal approximation with tie correction above that.
pub fn rank_sum_test(a: &[f64], b: &[f64], level: f64) -> Result<Comparison> {
    if a.len() < 3 || b.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "rank-sum test needs >= 3 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("significance level {level} not in (0,1)")));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("rank-sum sample".into()));
    }
    let first = a[0];
    if a.iter().chain(b).all(|&v| v == first) {
        return Ok(Comparison::Equal);
    }

    let n_a = a.len();
    let n = n_a + b.len();
    let mut combined: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    combined.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));

    // doubled midranks stay integral even with ties
    let mut ranks2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && combined[j].0 == combined[i].0 {
            j += 1;
        }
        let r2 = (i + j + 1) as u64; // 2 * average of ranks i+1..=j
        for r in ranks2.iter_mut().take(j).skip(i) {
            *r = r2;
        }
        tie_sizes.push((j - i) as u64);
        i = j;
    }
    let w2_a: u64 = combined
        .iter()
        .zip(&ranks2)
        .filter(|((_, is_a), _)| *is_a)
        .map(|(_, &r)| r)
        .sum();

    let p = if n <= 20 {
        exact_two_sided_p(&ranks2, n_a, w2_a)
    } else {
        let w = w2_a as f64 / 2.0;
        let n_b = (n - n_a) as f64;
        let na = n_a as f64;
        let nn = n as f64;
        let mean = na * (nn + 1.0) / 2.0;
        let tie_term: f64 = tie_sizes
            .iter()
            .map(|&t| (t * t * t - t) as f64)
            .sum::<f64>()
            / (nn * (nn - 1.0));
        let var = na * n_b / 12.0 * (nn + 1.0 - tie_term);
        if var <= 0.0 {
            return Ok(Comparison::Equal);
        }
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        2.0 * (1.0 - normal.cdf(z))
    };

    if p >= level {
        return Ok(Comparison::Equal);
    }
    Ok(if median(a) > median(b) {
        Comparison::Better
    } else {
        Comparison::Worse
    })
}

/// Exact two-sided p-value: DP over the number of subsets of size n_a whose
/// doubled-rank sum equals each achievable value.
fn exact_two_sided_p(ranks2: &[u64], n_a: usize, w2_a: u64) -> f64 {
    let max_sum: usize = ranks2.iter().sum::<u64>() as usize;
    // counts[k][s] = subsets of size k with doubled-rank sum s
    let mut counts = vec![vec![0f64; max_sum + 1]; n_a + 1];
    counts[0][0] = 1.0;
    for &r in ranks2 {
        let r = r as usize;
        for k in (1..=n_a).rev() {
            for s in (r..=max_sum).rev() {
                let add = counts[k - 1][s - r];
                if add > 0.0 {
                    counts[k][s] += add;
                }
            }
        }
    }
    let total: f64 = counts[n_a].iter().sum();
    let w = w2_a as usize;
    let le: f64 = counts[n_a][..=w].iter().sum();
    let ge: f64 = counts[n_a][w..].iter().sum();
    (2.0 * (le.min(ge)) / total).min(1.0)
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median and half-interquartile-range of a sample (the dispersion figure
/// printed in summaries).
pub fn median_and_dispersion(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("sample for median".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let q = |frac: f64| -> f64 {
        let pos = frac * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Ok((q(0.5), (q(0.75) - q(0.25)) / 2.0))
}
