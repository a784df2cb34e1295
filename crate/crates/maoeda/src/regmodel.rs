//! Per-reference-vector regularity sub-model Φ = Ω + ε.
//!
//! Ω is a box over the principal subspace of a neighbor set in the reduced
//! decision space; ε is an isotropic Gaussian noise variance estimated from
//! the discarded eigenvalues. Sampling draws uniform coordinates inside the
//! γ-enlarged projection box and adds the noise.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Which eigenvalues feed the noise-variance mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseIndexing {
    /// ε = (1/(k−i+1)) Σ_{j=i+1..k} λ_j — principal eigenvalues excluded.
    #[default]
    SkipPrincipal,
    /// ε = (1/(k−i+1)) Σ_{j=i..k} λ_j — the printed variant, which also
    /// counts the last principal eigenvalue.
    PaperLiteral,
}

/// Principal-subspace box with isotropic noise, fitted to a neighbor set.
#[derive(Debug, Clone)]
pub struct RegularityModel {
    /// Mean of the neighbor set (length k).
    pub mu: Vec<f64>,
    /// Retained orthonormal principal directions, each length k.
    pub components: Vec<Vec<f64>>,
    /// Per-direction projection minima.
    pub lo: Vec<f64>,
    /// Per-direction projection maxima.
    pub hi: Vec<f64>,
    /// Sampling-interval enlargement factor γ.
    pub gamma: f64,
    /// Noise variance ε ≥ 0.
    pub eps: f64,
    /// True when the neighbor covariance was zero (all neighbors identical).
    pub degenerate: bool,
}

impl RegularityModel {
    /// Enlarged sampling interval [l−γ(u−l), u+γ(u−l)] for direction `j`.
    pub fn enlarged_interval(&self, j: usize) -> (f64, f64) {
        let span = self.hi[j] - self.lo[j];
        (self.lo[j] - self.gamma * span, self.hi[j] + self.gamma * span)
    }
}

/// Fits the sub-model with the default noise-index convention.
pub fn build_submodel(neighbors: &[Vec<f64>], beta: f64, gamma: f64) -> Result<RegularityModel> {
    build_submodel_with(neighbors, beta, gamma, NoiseIndexing::default())
}

/// Fits the sub-model: mean-centers the neighbors, eigen-factorizes the
/// sample covariance (1/(T−1)), retains the smallest i whose cumulative
/// eigenvalue ratio reaches `beta`, records per-direction projection bounds,
/// and averages the remaining eigenvalues into ε.
pub fn build_submodel_with(
    neighbors: &[Vec<f64>],
    beta: f64,
    gamma: f64,
    noise: NoiseIndexing,
) -> Result<RegularityModel> {
    if neighbors.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "sub-model needs >= 2 neighbors, got {}",
            neighbors.len()
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!("beta must be in (0, 1], got {beta}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("gamma must be >= 0, got {gamma}")));
    }
    let t = neighbors.len();
    let k = neighbors[0].len();
    if k == 0 {
        return Err(Error::EmptyInput("zero-dimensional neighbors".into()));
    }
    if neighbors.iter().any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            actual: neighbors.iter().map(|r| r.len()).find(|&l| l != k).unwrap_or(k),
        });
    }
    if neighbors.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("neighbor set".into()));
    }

    let mu: Vec<f64> = (0..k)
        .map(|j| neighbors.iter().map(|r| r[j]).sum::<f64>() / t as f64)
        .collect();
    let centered: Vec<Vec<f64>> = neighbors
        .iter()
        .map(|r| r.iter().zip(&mu).map(|(v, m)| v - m).collect())
        .collect();

    let mut cov = vec![vec![0.0; k]; k];
    for row in &centered {
        for a in 0..k {
            for b in a..k {
                cov[a][b] += row[a] * row[b];
            }
        }
    }
    let norm = 1.0 / (t as f64 - 1.0);
    for a in 0..k {
        for b in a..k {
            cov[a][b] *= norm;
            cov[b][a] = cov[a][b];
        }
    }

    let (eigvals, eigvecs) = symmetric_eigen_desc(&cov);
    let total: f64 = eigvals.iter().map(|v| v.max(0.0)).sum();
    if total <= 1e-300 {
        return Ok(RegularityModel {
            mu,
            components: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            gamma,
            eps: 0.0,
            degenerate: true,
        });
    }

    let mut retain = 0;
    let mut cum = 0.0;
    while retain < k && cum / total < beta {
        cum += eigvals[retain].max(0.0);
        retain += 1;
    }

    let components: Vec<Vec<f64>> = eigvecs[..retain].to_vec();
    let mut lo = vec![f64::INFINITY; retain];
    let mut hi = vec![f64::NEG_INFINITY; retain];
    for row in &centered {
        for (j, u) in components.iter().enumerate() {
            let proj: f64 = row.iter().zip(u).map(|(a, b)| a * b).sum();
            lo[j] = lo[j].min(proj);
            hi[j] = hi[j].max(proj);
        }
    }

    let start = match noise {
        NoiseIndexing::SkipPrincipal => retain,
        NoiseIndexing::PaperLiteral => retain.saturating_sub(1),
    };
    let tail: f64 = eigvals[start..].iter().map(|v| v.max(0.0)).sum();
    let eps = tail / (k - retain + 1) as f64;

    Ok(RegularityModel {
        mu,
        components,
        lo,
        hi,
        gamma,
        eps: eps.max(0.0),
        degenerate: false,
    })
}

/// Draws `count` reduced-space decision vectors from the model: uniform
/// coordinates in each γ-enlarged projection interval plus isotropic
/// N(0, ε) noise per coordinate.
///
/// Every sample consumes exactly k uniforms and k normals regardless of the
/// retained component count, so downstream rng state is independent of the
/// fitted subspace dimension. Clamping to the decision box happens after
/// full-space translation, not here.
pub fn sample_model<R: Rng>(model: &RegularityModel, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if count < 1 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let k = model.mu.len();
    let sd = model.eps.sqrt();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let uniforms: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let normals: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
        let mut x = model.mu.clone();
        for (j, u) in model.components.iter().enumerate() {
            let (a, b) = model.enlarged_interval(j);
            let tau = a + uniforms[j] * (b - a);
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi += tau * ui;
            }
        }
        if sd > 0.0 {
            for (xi, z) in x.iter_mut().zip(&normals) {
                *xi += sd * z;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending,
/// eigenvectors returned as rows.
pub(crate) fn symmetric_eigen_desc(m: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.len();
    let flat: Vec<f64> = (0..n).flat_map(|j| (0..n).map(move |i| m[i][j])).collect();
    let eig = DMatrix::from_column_slice(n, n, &flat).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = idx
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    fn collinear_model() -> RegularityModel {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        build_submodel(&pts, 0.96, 0.5).unwrap()
    }

    #[test]
    fn collinear_fixture() {
        let m = collinear_model();
        assert_abs_diff_eq!(m.mu[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.mu[1], 1.0, epsilon = 1e-12);
        assert_eq!(m.components.len(), 1);
        let c = &m.components[0];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // eigenvector sign is arbitrary
        assert!(
            (c[0] - s).abs() < 1e-9 && (c[1] - s).abs() < 1e-9
                || (c[0] + s).abs() < 1e-9 && (c[1] + s).abs() < 1e-9,
            "component {c:?}"
        );
        assert_abs_diff_eq!(m.lo[0], -std::f64::consts::SQRT_2, epsilon = 1e-7);
        assert_abs_diff_eq!(m.hi[0], std::f64::consts::SQRT_2, epsilon = 1e-7);
        assert_abs_diff_eq!(m.eps, 0.0, epsilon = 1e-12);
        let (a, b) = m.enlarged_interval(0);
        assert_abs_diff_eq!(a, -2.0 * std::f64::consts::SQRT_2, epsilon = 1e-7);
        assert_abs_diff_eq!(b, 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-7);
    }

    #[test]
    fn identical_points_degenerate() {
        let pts = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let m = build_submodel(&pts, 0.96, 0.5).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.eps, 0.0);
        assert!(m.components.is_empty());
    }

    #[test]
    fn isotropic_gaussian_needs_both_components() {
        let mut rng = stream(9, "test");
        let pts: Vec<Vec<f64>> = (0..400)
            .map(|_| {
                vec![
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                ]
            })
            .collect();
        let m = build_submodel(&pts, 0.96, 0.5).unwrap();
        assert_eq!(m.components.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_submodel(&[vec![0.0, 0.0]], 0.96, 0.5).is_err());
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        assert!(build_submodel(&pts, 0.0, 0.5).is_err());
        assert!(build_submodel(&pts, 1.5, 0.5).is_err());
        assert!(build_submodel(&pts, 0.96, -0.1).is_err());
        let ragged = vec![vec![0.0, 0.0], vec![1.0]];
        assert!(build_submodel(&ragged, 0.96, 0.5).is_err());
        let nan = vec![vec![0.0, f64::NAN], vec![1.0, 1.0]];
        assert!(build_submodel(&nan, 0.96, 0.5).is_err());
    }

    #[test]
    fn components_orthonormal() {
        let mut rng = stream(10, "test");
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..4).map(|_| rng.random::<f64>()).collect())
            .collect();
        let m = build_submodel(&pts, 1.0, 0.5).unwrap();
        for (i, a) in m.components.iter().enumerate() {
            for (j, b) in m.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, want, epsilon = 1e-9);
            }
        }
        assert!(m.lo.iter().zip(&m.hi).all(|(l, u)| l <= u));
    }

    #[test]
    fn full_rank_model_reconstructs_neighbors() {
        let mut rng = stream(12, "test");
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
            .collect();
        let m = build_submodel(&pts, 1.0, 0.0).unwrap();
        assert_eq!(m.components.len(), 3);
        for p in &pts {
            let centered: Vec<f64> = p.iter().zip(&m.mu).map(|(a, b)| a - b).collect();
            let mut rec = vec![0.0; 3];
            for u in &m.components {
                let proj: f64 = centered.iter().zip(u).map(|(a, b)| a * b).sum();
                for (r, ui) in rec.iter_mut().zip(u) {
                    *r += proj * ui;
                }
            }
            for (r, c) in rec.iter().zip(&centered) {
                assert_abs_diff_eq!(*r, *c, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn samples_stay_on_collinear_line() {
        let m = collinear_model();
        let mut rng = stream(13, "offspring");
        let samples = sample_model(&m, 1000, &mut rng).unwrap();
        assert_eq!(samples.len(), 1000);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for x in &samples {
            assert!((x[0] - x[1]).abs() < 1e-9, "off the line: {x:?}");
            let proj = (x[0] - 1.0) * s + (x[1] - 1.0) * s;
            assert!(
                (-2.8285..=2.8285).contains(&proj),
                "projection {proj} outside enlarged interval"
            );
        }
    }

    #[test]
    fn gamma_zero_samples_stay_in_exact_bounds() {
        let mut m = collinear_model();
        m.gamma = 0.0;
        let mut rng = stream(14, "offspring");
        for x in sample_model(&m, 500, &mut rng).unwrap() {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let proj = (x[0] - 1.0) * s + (x[1] - 1.0) * s;
            assert!(proj >= m.lo[0] - 1e-12 && proj <= m.hi[0] + 1e-12);
        }
    }

    #[test]
    fn degenerate_samples_copy_mu() {
        let m = RegularityModel {
            mu: vec![0.5, 0.5],
            components: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            gamma: 0.5,
            eps: 0.0,
            degenerate: true,
        };
        let mut rng = stream(15, "offspring");
        let samples = sample_model(&m, 3, &mut rng).unwrap();
        assert_eq!(samples, vec![vec![0.5, 0.5]; 3]);
    }

    #[test]
    fn noise_matches_configured_sd() {
        let m = RegularityModel {
            mu: vec![0.0, 0.0],
            components: vec![vec![1.0, 0.0]],
            lo: vec![-1.0],
            hi: vec![1.0],
            gamma: 0.0,
            eps: 0.04,
            degenerate: false,
        };
        let mut rng = stream(16, "offspring");
        let samples = sample_model(&m, 10000, &mut rng).unwrap();
        // second coordinate is pure noise off the principal subspace
        let resid: Vec<f64> = samples.iter().map(|x| x[1]).collect();
        let mean = resid.iter().sum::<f64>() / resid.len() as f64;
        let var = resid.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (resid.len() - 1) as f64;
        assert!((var.sqrt() - 0.2).abs() < 0.01, "sd {}", var.sqrt());
    }

    #[test]
    fn sample_mean_converges_to_mu() {
        let m = collinear_model();
        let mut rng = stream(17, "offspring");
        let samples = sample_model(&m, 20000, &mut rng).unwrap();
        for j in 0..2 {
            let mean = samples.iter().map(|x| x[j]).sum::<f64>() / samples.len() as f64;
            // interval half-width 2√2·1.4142 ≈ 2.83 → sd ≈ 1.63, se ≈ 0.0116
            assert!((mean - 1.0).abs() < 3.0 * 0.0116 * 2.0, "mean {mean}");
        }
    }

    #[test]
    fn paper_literal_noise_counts_principal_tail() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.9],
            vec![2.0, 2.1],
            vec![3.0, 3.0],
        ];
        let skip = build_submodel_with(&pts, 0.96, 0.5, NoiseIndexing::SkipPrincipal).unwrap();
        let lit = build_submodel_with(&pts, 0.96, 0.5, NoiseIndexing::PaperLiteral).unwrap();
        assert!(lit.eps > skip.eps);
    }
}
