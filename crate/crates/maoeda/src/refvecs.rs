//! Uniform unit reference vectors (Das-Dennis, two-layer), hyperplane
//! mapping into objective units, and perpendicular-distance association.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Hard cap on generated lattice size.
const MAX_VECTORS: usize = 1_000_000;

/// A set of simplex reference vectors together with their mapped images.
///
/// `mapped[i] = simplex[i] * intercepts + ideal`, with the intercepts solved
/// from the hyperplane through the extreme points of the evidence set.
/// Immutable after construction; re-mapping produces a new set.
#[derive(Debug, Clone)]
pub struct ReferenceVectorSet {
    pub simplex: Vec<Vec<f64>>,
    pub mapped: Vec<Vec<f64>>,
    pub ideal: Vec<f64>,
    pub extremes: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    /// True when the hyperplane solve failed and the nadir-span fallback was used.
    pub fallback: bool,
}

impl ReferenceVectorSet {
    pub fn len(&self) -> usize {
        self.simplex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplex.is_empty()
    }
}

/// Number of Das-Dennis lattice points: C(h + m - 1, m - 1).
pub fn das_dennis_count(m: usize, h: usize) -> Result<usize> {
    let mut c: u128 = 1;
    for i in 0..(m - 1) {
        c = c * (h as u128 + i as u128 + 1) / (i as u128 + 1);
        if c > MAX_VECTORS as u128 {
            return Err(Error::InvalidArgument(format!(
                "das-dennis lattice for m={m}, h={h} exceeds the {MAX_VECTORS} vector cap"
            )));
        }
    }
    Ok(c as usize)
}

/// Full Das-Dennis simplex lattice with divisions h: components in
/// {0, 1/h, ..., 1} summing to 1.
pub fn das_dennis(m: usize, h: usize) -> Result<Vec<Vec<f64>>> {
    if m < 2 {
        return Err(Error::InvalidArgument("das_dennis requires m >= 2".into()));
    }
    if h < 1 {
        return Err(Error::InvalidArgument("das_dennis requires h >= 1".into()));
    }
    let expected = das_dennis_count(m, h)?;
    let mut out = Vec::with_capacity(expected);
    let mut current = vec![0.0; m];
    recurse(&mut out, &mut current, m, h, h, 0);
    debug_assert_eq!(out.len(), expected);
    Ok(out)
}

fn recurse(out: &mut Vec<Vec<f64>>, current: &mut Vec<f64>, m: usize, h: usize, left: usize, depth: usize) {
    if depth == m - 1 {
        current[depth] = left as f64 / h as f64;
        out.push(current.clone());
        return;
    }
    for i in 0..=left {
        current[depth] = i as f64 / h as f64;
        recurse(out, current, m, h, left - i, depth + 1);
    }
}

/// Two-layer construction: boundary lattice at divisions `h1` unioned with an
/// inside lattice at `h2` shrunk halfway toward the centroid. `h2 = 0` gives a
/// single layer. Boundary vectors come first in the output.
pub fn two_layer(m: usize, h1: usize, h2: usize) -> Result<Vec<Vec<f64>>> {
    let mut vectors = das_dennis(m, h1)?;
    if h2 > 0 {
        let centroid = 1.0 / m as f64;
        for mut v in das_dennis(m, h2)? {
            for c in &mut v {
                *c = 0.5 * *c + 0.5 * centroid;
            }
            vectors.push(v);
        }
    }
    if vectors.len() > MAX_VECTORS {
        return Err(Error::InvalidArgument(format!(
            "two-layer set exceeds the {MAX_VECTORS} vector cap"
        )));
    }
    Ok(vectors)
}

/// Euclidean distance from `s` to its orthogonal projection onto span(v).
pub fn perpendicular_distance(s: &[f64], v: &[f64]) -> Result<f64> {
    if s.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            actual: s.len(),
        });
    }
    let vv: f64 = v.iter().map(|a| a * a).sum();
    if vv <= 0.0 {
        return Err(Error::InvalidArgument("zero reference vector".into()));
    }
    Ok(perp_dist_unchecked(s, v, vv))
}

#[inline]
pub(crate) fn perp_dist_unchecked(s: &[f64], v: &[f64], vv: f64) -> f64 {
    let sv: f64 = s.iter().zip(v).map(|(a, b)| a * b).sum();
    let t = sv / vv;
    s.iter()
        .zip(v)
        .map(|(a, b)| {
            let r = a - t * b;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Maps each point to the reference vector with the smallest perpendicular
/// distance; ties break to the lowest vector index.
pub fn associate(points: &[Vec<f64>], vectors: &[Vec<f64>]) -> Result<Vec<usize>> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput("reference vectors".into()));
    }
    let norms: Vec<f64> = vectors.iter().map(|v| v.iter().map(|a| a * a).sum()).collect();
    if norms.iter().any(|&n| n <= 0.0) {
        return Err(Error::InvalidArgument("zero reference vector".into()));
    }
    Ok(points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, v) in vectors.iter().enumerate() {
                let d = perp_dist_unchecked(p, v, norms[i]);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        })
        .collect())
}

/// Maps simplex vectors onto the hyperplane spanned by the extreme points of
/// the evidence set `evidence` (objective vectors of the current non-dominated
/// solutions): extremes are the per-objective maximizers, the ideal point is
/// the componentwise minimum, intercepts are solved from the hyperplane
/// through the shifted extremes, and each vector becomes
/// `r * intercepts + ideal`.
pub fn map_vectors(simplex: &[Vec<f64>], evidence: &[Vec<f64>]) -> Result<ReferenceVectorSet> {
    if evidence.is_empty() {
        return Err(Error::EmptyInput("evidence set for reference-vector mapping".into()));
    }
    let m = evidence[0].len();
    if simplex.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: simplex.iter().map(|r| r.len()).find(|&l| l != m).unwrap_or(m),
        });
    }

    // per-objective maximizer solutions
    let mut extremes: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let best = evidence
            .iter()
            .max_by(|a, b| a[i].partial_cmp(&b[i]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        extremes.push(best.clone());
    }

    // componentwise minimum
    let mut ideal = vec![f64::INFINITY; m];
    for f in evidence {
        for i in 0..m {
            ideal[i] = ideal[i].min(f[i]);
        }
    }

    let shifted: Vec<Vec<f64>> = extremes
        .iter()
        .map(|e| e.iter().zip(&ideal).map(|(a, z)| a - z).collect())
        .collect();

    let (intercepts, fallback) = solve_intercepts(&shifted, evidence, &ideal);

    let mapped: Vec<Vec<f64>> = simplex
        .iter()
        .map(|r| {
            r.iter()
                .zip(&intercepts)
                .zip(&ideal)
                .map(|((c, a), z)| c * a + z)
                .collect()
        })
        .collect();

    Ok(ReferenceVectorSet {
        simplex: simplex.to_vec(),
        mapped,
        ideal,
        extremes,
        intercepts,
        fallback,
    })
}

/// Solves E w = 1 for w = 1/a through the shifted extreme rows; duplicate rows
/// are perturbed before the solve. Falls back to the per-objective span over
/// the evidence set when the system is singular or yields a nonpositive
/// intercept.
fn solve_intercepts(
    shifted: &[Vec<f64>],
    evidence: &[Vec<f64>],
    ideal: &[f64],
) -> (Vec<f64>, bool) {
    let m = ideal.len();
    let mut rows = shifted.to_vec();
    for i in 1..m {
        let dup = rows[..i]
            .iter()
            .any(|r| r.iter().zip(&rows[i]).all(|(a, b)| (a - b).abs() < 1e-10));
        if dup {
            let bump = 1e-6 * (i + 1) as f64;
            for c in &mut rows[i] {
                *c += bump;
            }
        }
    }
    let e = DMatrix::from_fn(m, m, |r, c| rows[r][c]);
    let rhs = DVector::from_element(m, 1.0);
    if let Some(w) = e.lu().solve(&rhs) {
        if w.iter().all(|&wi| wi.is_finite() && wi > 0.0) {
            let a: Vec<f64> = w.iter().map(|&wi| 1.0 / wi).collect();
            if a.iter().all(|&ai| ai > 1e-12) {
                return (a, false);
            }
        }
    }
    // nadir-span fallback
    let a: Vec<f64> = (0..m)
        .map(|i| {
            let span = evidence
                .iter()
                .map(|f| f[i] - ideal[i])
                .fold(f64::NEG_INFINITY, f64::max);
            span.max(1e-12)
        })
        .collect();
    (a, true)
}

/// Writes the vector set as CSV: one row per vector with a `layer` column.
/// `boundary` is the number of leading boundary-layer vectors.
pub fn write_vectors_csv<W: Write>(w: &mut W, vectors: &[Vec<f64>], boundary: usize) -> Result<()> {
    let m = vectors.first().map_or(0, |v| v.len());
    let header: Vec<String> = (1..=m).map(|i| format!("r{i}")).collect();
    writeln!(w, "{},layer", header.join(","))?;
    for (i, v) in vectors.iter().enumerate() {
        let row: Vec<String> = v.iter().map(|c| format!("{c:.12}")).collect();
        let layer = if i < boundary { "boundary" } else { "inside" };
        writeln!(w, "{},{layer}", row.join(","))?;
    }
    Ok(())
}
