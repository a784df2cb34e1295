//! DTLZ1-DTLZ4 and their minus variants, true-front samplers, and
//! normalization bounds.
//!
//! Every problem is minimized over the box [0,1]^n with n = M + k - 1,
//! where k is the distance-variable count (5 for DTLZ1, 10 for DTLZ2-4).
//! The minus variant of a problem negates every objective.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemId {
    Dtlz1,
    Dtlz2,
    Dtlz3,
    Dtlz4,
    Dtlz1Minus,
    Dtlz2Minus,
    Dtlz3Minus,
    Dtlz4Minus,
}

impl ProblemId {
    pub const ALL: [ProblemId; 8] = [
        ProblemId::Dtlz1,
        ProblemId::Dtlz2,
        ProblemId::Dtlz3,
        ProblemId::Dtlz4,
        ProblemId::Dtlz1Minus,
        ProblemId::Dtlz2Minus,
        ProblemId::Dtlz3Minus,
        ProblemId::Dtlz4Minus,
    ];

    pub fn is_minus(self) -> bool {
        matches!(
            self,
            ProblemId::Dtlz1Minus
                | ProblemId::Dtlz2Minus
                | ProblemId::Dtlz3Minus
                | ProblemId::Dtlz4Minus
        )
    }

    /// The non-negated problem this id is based on.
    pub fn base(self) -> ProblemId {
        match self {
            ProblemId::Dtlz1Minus => ProblemId::Dtlz1,
            ProblemId::Dtlz2Minus => ProblemId::Dtlz2,
            ProblemId::Dtlz3Minus => ProblemId::Dtlz3,
            ProblemId::Dtlz4Minus => ProblemId::Dtlz4,
            other => other,
        }
    }

    /// Distance-variable count k: 5 for DTLZ1, 10 for DTLZ2-4.
    pub fn distance_vars(self) -> usize {
        match self.base() {
            ProblemId::Dtlz1 => 5,
            _ => 10,
        }
    }

    /// Exponent p of the true-front identity sum f_i^p = 1 in normalized space.
    pub fn front_exponent(self) -> f64 {
        match self.base() {
            ProblemId::Dtlz1 => 1.0,
            _ => 2.0,
        }
    }

    pub fn parse(s: &str) -> Result<ProblemId> {
        let t = s.trim().to_ascii_lowercase();
        let id = match t.as_str() {
            "dtlz1" => ProblemId::Dtlz1,
            "dtlz2" => ProblemId::Dtlz2,
            "dtlz3" => ProblemId::Dtlz3,
            "dtlz4" => ProblemId::Dtlz4,
            "dtlz1m" | "dtlz1-" => ProblemId::Dtlz1Minus,
            "dtlz2m" | "dtlz2-" => ProblemId::Dtlz2Minus,
            "dtlz3m" | "dtlz3-" => ProblemId::Dtlz3Minus,
            "dtlz4m" | "dtlz4-" => ProblemId::Dtlz4Minus,
            _ => return Err(Error::Parse(format!("unknown problem id: {s}"))),
        };
        Ok(id)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemId::Dtlz1 => "dtlz1",
            ProblemId::Dtlz2 => "dtlz2",
            ProblemId::Dtlz3 => "dtlz3",
            ProblemId::Dtlz4 => "dtlz4",
            ProblemId::Dtlz1Minus => "dtlz1m",
            ProblemId::Dtlz2Minus => "dtlz2m",
            ProblemId::Dtlz3Minus => "dtlz3m",
            ProblemId::Dtlz4Minus => "dtlz4m",
        };
        f.write_str(s)
    }
}

/// A benchmark instance: problem id plus objective count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub id: ProblemId,
    /// Objective count M.
    pub objectives: usize,
    /// Decision-variable count n = M + k - 1.
    pub variables: usize,
    /// Distance-variable count k.
    pub distance: usize,
}

impl ProblemSpec {
    pub fn new(id: ProblemId, objectives: usize) -> Result<ProblemSpec> {
        if objectives < 2 {
            return Err(Error::InvalidArgument(format!(
                "objective count must be >= 2, got {objectives}"
            )));
        }
        let distance = id.distance_vars();
        Ok(ProblemSpec {
            id,
            objectives,
            variables: objectives + distance - 1,
            distance,
        })
    }

    /// Evaluates the objective vector at `x`; components must lie in [0,1].
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.variables {
            return Err(Error::DimensionMismatch {
                expected: self.variables,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("decision vector".into()));
        }
        let mut f = self.evaluate_base(x);
        if self.id.is_minus() {
            for v in &mut f {
                *v = -*v;
            }
        }
        Ok(f)
    }

    fn evaluate_base(&self, x: &[f64]) -> Vec<f64> {
        let m = self.objectives;
        let pos = &x[..m - 1];
        let dist = &x[m - 1..];
        match self.id.base() {
            ProblemId::Dtlz1 => {
                let g = g_rastrigin(dist);
                dtlz1_shape(pos, g)
            }
            ProblemId::Dtlz2 => {
                let g = g_sphere(dist);
                dtlz2_shape(pos, g)
            }
            ProblemId::Dtlz3 => {
                let g = g_rastrigin(dist);
                dtlz2_shape(pos, g)
            }
            ProblemId::Dtlz4 => {
                let g = g_sphere(dist);
                let biased: Vec<f64> = pos.iter().map(|v| v.powf(DTLZ4_ALPHA)).collect();
                dtlz2_shape(&biased, g)
            }
            _ => unreachable!("base() never returns a minus id"),
        }
    }

    /// Uniformly samples `count` points on the true Pareto front.
    ///
    /// Minus variants have no analytic front recipe here and are rejected;
    /// use an empirical front file via [`read_front_file`] for those.
    pub fn sample_front<R: Rng>(&self, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidArgument("front sample count must be >= 1".into()));
        }
        if self.id.is_minus() {
            return Err(Error::NoKnownFront(self.id.to_string()));
        }
        let m = self.objectives;
        let mut out = Vec::with_capacity(count);
        match self.id {
            ProblemId::Dtlz1 => {
                // Uniform on the simplex sum f_i = 0.5 via normalized exponentials.
                for _ in 0..count {
                    let e: Vec<f64> = (0..m)
                        .map(|_| -(1.0 - rng.random::<f64>()).ln())
                        .collect();
                    let s: f64 = e.iter().sum();
                    out.push(e.iter().map(|v| 0.5 * v / s).collect());
                }
            }
            _ => {
                // Uniform direction on the nonnegative unit sphere octant.
                for _ in 0..count {
                    let mut v: Vec<f64> = (0..m)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(rng);
                            z.abs()
                        })
                        .collect();
                    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if norm < 1e-300 {
                        v = vec![1.0 / (m as f64).sqrt(); m];
                    } else {
                        for a in &mut v {
                            *a /= norm;
                        }
                    }
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Ideal and nadir vectors used for objective normalization.
    ///
    /// For the base problems these span the true front box; for the minus
    /// variants they span the attainable range, negated and swapped.
    pub fn true_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.objectives;
        let extent = match self.id.base() {
            ProblemId::Dtlz1 => 0.5,
            _ => 1.0,
        };
        if self.id.is_minus() {
            let fmax = self.objective_max();
            (vec![-fmax; m], vec![0.0; m])
        } else {
            (vec![0.0; m], vec![extent; m])
        }
    }

    /// Largest attainable value of any single objective of the base problem.
    pub fn objective_max(&self) -> f64 {
        let k = self.distance as f64;
        match self.id.base() {
            ProblemId::Dtlz1 => 0.5 * (1.0 + 100.0 * k * (1.0 + rastrigin_term_max())),
            ProblemId::Dtlz3 => 1.0 + 100.0 * k * (1.0 + rastrigin_term_max()),
            _ => 1.0 + 0.25 * k,
        }
    }
}

const DTLZ4_ALPHA: f64 = 100.0;

fn g_sphere(dist: &[f64]) -> f64 {
    dist.iter().map(|v| (v - 0.5) * (v - 0.5)).sum()
}

fn g_rastrigin(dist: &[f64]) -> f64 {
    let s: f64 = dist
        .iter()
        .map(|v| {
            let t = v - 0.5;
            t * t - (20.0 * std::f64::consts::PI * t).cos()
        })
        .sum();
    100.0 * (dist.len() as f64 + s)
}

/// max over t in [-0.5, 0.5] of t^2 - cos(20 pi t), computed once by scan plus
/// local refinement.
fn rastrigin_term_max() -> f64 {
    static MAX: OnceLock<f64> = OnceLock::new();
    *MAX.get_or_init(|| {
        let h = |t: f64| t * t - (20.0 * std::f64::consts::PI * t).cos();
        let mut best_t = 0.0;
        let mut best = f64::NEG_INFINITY;
        let steps = 200_000;
        for i in 0..=steps {
            let t = -0.5 + i as f64 / steps as f64;
            let v = h(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        // golden-section refinement around the scan winner
        let (mut a, mut b) = (best_t - 1e-5, best_t + 1e-5);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if h(c) > h(d) {
                b = d;
            } else {
                a = c;
            }
        }
        h(0.5 * (a + b)).max(best)
    })
}

fn dtlz1_shape(pos: &[f64], g: f64) -> Vec<f64> {
    let m = pos.len() + 1;
    let scale = 0.5 * (1.0 + g);
    (0..m)
        .map(|i| {
            let mut v = scale;
            for p in &pos[..m - 1 - i] {
                v *= p;
            }
            if i > 0 {
                v *= 1.0 - pos[m - 1 - i];
            }
            v
        })
        .collect()
}

fn dtlz2_shape(pos: &[f64], g: f64) -> Vec<f64> {
    let m = pos.len() + 1;
    let half_pi = std::f64::consts::FRAC_PI_2;
    (0..m)
        .map(|i| {
            let mut v = 1.0 + g;
            for p in &pos[..m - 1 - i] {
                v *= (p * half_pi).cos();
            }
            if i > 0 {
                v *= (pos[m - 1 - i] * half_pi).sin();
            }
            v
        })
        .collect()
}

/// Writes a front fixture file: header `# problem M count seed`, then one
/// space-separated objective vector per line.
pub fn write_front_file<W: Write>(
    w: &mut W,
    id: ProblemId,
    objectives: usize,
    seed: u64,
    points: &[Vec<f64>],
) -> Result<()> {
    writeln!(w, "# {id} {objectives} {} {seed}", points.len())?;
    for p in points {
        let line: Vec<String> = p.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads a front fixture file written by [`write_front_file`].
pub fn read_front_file<R: BufRead>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut points = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = t
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = points.first() {
            let first: &Vec<f64> = first;
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: ragged row width {}",
                    lineno + 1,
                    row.len()
                )));
            }
        }
        points.push(row);
    }
    Ok(points)
}
