//! Uniform geodesic-ball sampling, ambient embedding and synthetic tasks.

use super::{geodesic_distance, sn, SpaceForm, SpaceFormGeometry};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Nodes in the radial inverse-CDF table.
const RADIAL_TABLE_NODES: usize = 10_000;

/// Synthetic label model. Both targets are Lipschitz in geodesic distance;
/// the regression target `cos(3 d_g(x, base))` has Lipschitz constant 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TaskKind {
    Regression { noise_sigma: f64 },
    Classification { flip_prob: f64 },
}

impl TaskKind {
    pub fn regression() -> Self {
        TaskKind::Regression { noise_sigma: 0.1 }
    }

    pub fn classification() -> Self {
        TaskKind::Classification { flip_prob: 0.05 }
    }
}

/// Paired intrinsic/ambient point sets with ground-truth geometry.
#[derive(Debug, Clone)]
pub struct ManifoldSample {
    pub geometry: SpaceFormGeometry,
    intrinsic: Array2<f64>,
    ambient: Option<Array2<f64>>,
    labels: Option<Array1<f64>>,
    pub seed: u64,
}

impl ManifoldSample {
    /// Draws `n` points uniformly (w.r.t. Riemannian volume) from the geodesic
    /// ball of radius `geometry.domain_radius` around the base point. The
    /// radial coordinate has density proportional to `sn_k(r)^{d-1}` and is
    /// drawn by inverse CDF on a monotone table; the direction is uniform on
    /// `S^{d-1}`. Deterministic given `seed`.
    pub fn uniform_ball(geometry: &SpaceFormGeometry, n: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("sample size must be >= 1"));
        }
        let d = geometry.d;
        let table = RadialCdf::build(geometry);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Array2::zeros((n, geometry.model_dim()));
        let mut dir = vec![0.0f64; d];
        for i in 0..n {
            loop {
                let mut norm2 = 0.0;
                for u in dir.iter_mut() {
                    *u = rng.sample(StandardNormal);
                    norm2 += *u * *u;
                }
                if norm2 > 1e-24 {
                    let inv = norm2.sqrt().recip();
                    for u in dir.iter_mut() {
                        *u *= inv;
                    }
                    break;
                }
            }
            let r = table.invert(rng.random::<f64>());
            let x = geometry.exp_at_base(r, &dir);
            for (j, v) in x.iter().enumerate() {
                pts[[i, j]] = *v;
            }
        }
        Ok(ManifoldSample {
            geometry: geometry.clone(),
            intrinsic: pts,
            ambient: None,
            labels: None,
            seed,
        })
    }

    /// Wraps an externally produced intrinsic point matrix.
    pub fn from_intrinsic(geometry: &SpaceFormGeometry, points: Array2<f64>, seed: u64) -> Result<Self> {
        if points.ncols() != geometry.model_dim() {
            return Err(Error::DimensionMismatch {
                expected: geometry.model_dim(),
                got: points.ncols(),
            });
        }
        Ok(ManifoldSample {
            geometry: geometry.clone(),
            intrinsic: points,
            ambient: None,
            labels: None,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.intrinsic.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intrinsic_points(&self) -> ArrayView2<'_, f64> {
        self.intrinsic.view()
    }

    pub fn ambient_points(&self) -> Option<ArrayView2<'_, f64>> {
        self.ambient.as_ref().map(|a| a.view())
    }

    pub fn labels(&self) -> Option<ArrayView1<'_, f64>> {
        self.labels.as_ref().map(|l| l.view())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
            .as_ref()
            .map(|a| a.ncols())
            .unwrap_or_else(|| self.intrinsic.ncols())
    }

    /// Geodesic distance from a model point to the sampler base point.
    pub fn dist_to_base(&self, x: ArrayView1<f64>) -> f64 {
        let g = &self.geometry;
        match g.model() {
            SpaceForm::Flat => x.dot(&x).sqrt(),
            SpaceForm::Spherical => {
                let sk = g.kappa.sqrt();
                (sk * x[0]).clamp(-1.0, 1.0).acos() / sk
            }
            SpaceForm::Hyperbolic => {
                let sk = g.kappa.abs().sqrt();
                (sk * x[0]).max(1.0).acosh() / sk
            }
        }
    }

    /// Fills the ambient coordinates: model coordinates are zero-padded to
    /// dimension `ambient_dim` and passed through a random orthogonal map
    /// (QR of a seeded Gaussian matrix), which preserves all pairwise
    /// Euclidean distances. `seed = None` skips the rotation and keeps the
    /// zero-padded coordinates as-is.
    pub fn embed_ambient(&self, ambient_dim: usize, seed: Option<u64>) -> Result<Self> {
        let m = self.intrinsic.ncols();
        if ambient_dim < m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: ambient_dim,
            });
        }
        let n = self.len();
        let mut padded = Array2::zeros((n, ambient_dim));
        padded.slice_mut(ndarray::s![.., ..m]).assign(&self.intrinsic);
        let ambient = match seed {
            None => padded,
            Some(s) => {
                let q = random_orthogonal(ambient_dim, s);
                padded.dot(&q.t())
            }
        };
        Ok(ManifoldSample {
            ambient: Some(ambient),
            ..self.clone()
        })
    }

    /// Attaches labels. Regression: `cos(3 d_g(x, base)) + N(0, sigma^2)`.
    /// Classification: the sign of the first tangent coordinate at the base
    /// point, flipped with probability `flip_prob`; labels are `+-1`.
    pub fn with_task(&self, task: TaskKind, seed: u64) -> Result<Self> {
        let n = self.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels = Array1::zeros(n);
        match task {
            TaskKind::Regression { noise_sigma } => {
                for i in 0..n {
                    let r = self.dist_to_base(self.intrinsic.row(i));
                    let noise: f64 = rng.sample(StandardNormal);
                    labels[i] = (3.0 * r).cos() + noise_sigma * noise;
                }
            }
            TaskKind::Classification { flip_prob } => {
                let tangent_col = match self.geometry.model() {
                    SpaceForm::Flat => 0,
                    _ => 1,
                };
                for i in 0..n {
                    let c = self.intrinsic[[i, tangent_col]];
                    let mut y = if c >= 0.0 { 1.0 } else { -1.0 };
                    if rng.random::<f64>() < flip_prob {
                        y = -y;
                    }
                    labels[i] = y;
                }
            }
        }
        Ok(ManifoldSample {
            labels: Some(labels),
            ..self.clone()
        })
    }

    /// Replaces the labels wholesale (used by the harness when re-ingesting).
    pub fn with_labels(&self, labels: Array1<f64>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        Ok(ManifoldSample {
            labels: Some(labels),
            ..self.clone()
        })
    }

    /// Pairwise geodesic distance matrix from the intrinsic coordinates.
    pub fn geodesic_matrix(&self) -> Result<Array2<f64>> {
        let n = self.len();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = geodesic_distance(self.intrinsic.row(i), self.intrinsic.row(j), &self.geometry)?;
                out[[i, j]] = dij;
                out[[j, i]] = dij;
            }
        }
        Ok(out)
    }
}

/// Monotone radial CDF table with linear interpolation between nodes.
struct RadialCdf {
    radii: Vec<f64>,
    cdf: Vec<f64>,
}

impl RadialCdf {
    fn build(geometry: &SpaceFormGeometry) -> Self {
        let n = RADIAL_TABLE_NODES;
        let r_max = geometry.domain_radius;
        let dm1 = (geometry.d - 1) as i32;
        let mut radii = Vec::with_capacity(n);
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        let mut prev_w = 0.0;
        let h = r_max / (n - 1) as f64;
        for i in 0..n {
            let t = i as f64 * h;
            let w = sn(geometry.kappa, t).powi(dm1);
            if i > 0 {
                acc += 0.5 * (w + prev_w) * h;
            }
            prev_w = w;
            radii.push(t);
            cdf.push(acc);
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        RadialCdf { radii, cdf }
    }

    fn invert(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self.cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => self.radii[i],
            Err(i) => {
                if i == 0 {
                    return self.radii[0];
                }
                if i >= self.cdf.len() {
                    return *self.radii.last().unwrap();
                }
                let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
                let (r0, r1) = (self.radii[i - 1], self.radii[i]);
                if c1 > c0 {
                    r0 + (u - c0) / (c1 - c0) * (r1 - r0)
                } else {
                    r0
                }
            }
        }
    }
}

/// Orthogonal matrix from the QR factorization of a seeded Gaussian matrix
/// (modified Gram-Schmidt; Gaussian matrices are well conditioned with
/// overwhelming probability).
pub fn random_orthogonal(dim: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            a[[i, j]] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    // Orthonormalize columns in place.
    for j in 0..dim {
        for k in 0..j {
            let proj = a.column(k).dot(&a.column(j));
            let col_k = a.column(k).to_owned();
            let mut col_j = a.column_mut(j);
            col_j.scaled_add(-proj, &col_k);
        }
        let norm = a.column(j).dot(&a.column(j)).sqrt();
        a.column_mut(j).mapv_inplace(|v| v / norm);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaceform::SpaceFormGeometry;

    #[test]
    fn flat_disk_mean_radius_is_two_thirds() {
        let geo = SpaceFormGeometry::ball(2, 0.0, 1.0).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 100_000, 3).unwrap();
        let mean: f64 = (0..s.len())
            .map(|i| s.dist_to_base(s.intrinsic_points().row(i)))
            .sum::<f64>()
            / s.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "mean radius {mean}");
    }

    #[test]
    fn spherical_cap_mass_matches_area_ratio() {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        let geo = SpaceFormGeometry::ball(2, 1.0, FRAC_PI_2).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 100_000, 5).unwrap();
        let frac = (0..s.len())
            .filter(|&i| s.dist_to_base(s.intrinsic_points().row(i)) <= FRAC_PI_4)
            .count() as f64
            / s.len() as f64;
        let expected = (1.0 - FRAC_PI_4.cos()) / (1.0 - FRAC_PI_2.cos());
        assert!((frac - expected).abs() < 0.01, "cap fraction {frac} vs {expected}");
    }

    #[test]
    fn single_point_stays_in_ball() {
        for &k in &[1.0, 0.0, -1.0] {
            let geo = SpaceFormGeometry::ball(3, k, 1.2).unwrap();
            let s = ManifoldSample::uniform_ball(&geo, 1, 42).unwrap();
            let r = s.dist_to_base(s.intrinsic_points().row(0));
            assert!(r <= geo.domain_radius + 1e-12);
        }
    }

    #[test]
    fn points_satisfy_model_invariants() {
        for &k in &[2.0, -0.5] {
            let geo = SpaceFormGeometry::ball(3, k, 0.9).unwrap();
            let s = ManifoldSample::uniform_ball(&geo, 200, 9).unwrap();
            for i in 0..s.len() {
                geo.validate_point(s.intrinsic_points().row(i)).unwrap();
                // Tighter than the validation tolerance: construction is exact
                // up to rounding.
                let pts = s.intrinsic_points();
                let x = pts.row(i);
                let q = match geo.model() {
                    SpaceForm::Spherical => geo.kappa * x.dot(&x),
                    SpaceForm::Hyperbolic => -geo.kappa.abs() * super::super::lorentz_inner(x, x),
                    SpaceForm::Flat => 1.0,
                };
                assert!((q - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let geo = SpaceFormGeometry::ball(2, -1.0, 1.5).unwrap();
        let a = ManifoldSample::uniform_ball(&geo, 50, 123).unwrap();
        let b = ManifoldSample::uniform_ball(&geo, 50, 123).unwrap();
        assert_eq!(a.intrinsic_points(), b.intrinsic_points());
        let c = ManifoldSample::uniform_ball(&geo, 50, 124).unwrap();
        assert_ne!(a.intrinsic_points(), c.intrinsic_points());
    }

    #[test]
    fn identity_embedding_is_zero_padding() {
        let geo = SpaceFormGeometry::ball(2, 0.0, 1.0).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 10, 1).unwrap();
        let e = s.embed_ambient(2, None).unwrap();
        assert_eq!(s.intrinsic_points(), e.ambient_points().unwrap());
    }

    #[test]
    fn embedding_preserves_sphere_norms() {
        let geo = SpaceFormGeometry::ball(2, 1.0, 1.0).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 40, 2).unwrap();
        let e = s.embed_ambient(100, Some(77)).unwrap();
        let amb = e.ambient_points().unwrap();
        for i in 0..40 {
            let norm = amb.row(i).dot(&amb.row(i)).sqrt();
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn embedding_distances_seed_invariant() {
        let geo = SpaceFormGeometry::ball(2, -1.0, 1.0).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 30, 4).unwrap();
        let e1 = s.embed_ambient(20, Some(1)).unwrap();
        let e2 = s.embed_ambient(20, Some(2)).unwrap();
        let (a1, a2) = (e1.ambient_points().unwrap(), e2.ambient_points().unwrap());
        for i in 0..30 {
            for j in (i + 1)..30 {
                let d1 = (&a1.row(i) - &a1.row(j)).dot(&(&a1.row(i) - &a1.row(j))).sqrt();
                let d2 = (&a2.row(i) - &a2.row(j)).dot(&(&a2.row(i) - &a2.row(j))).sqrt();
                assert!((d1 - d2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn embedding_dimension_checked() {
        let geo = SpaceFormGeometry::ball(2, 1.0, 1.0).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 5, 1).unwrap();
        assert!(s.embed_ambient(2, Some(0)).is_err()); // needs d+1 = 3
    }

    #[test]
    fn regression_label_at_base_is_one() {
        let geo = SpaceFormGeometry::ball(2, 0.0, 1.0).unwrap();
        let pts = ndarray::Array2::zeros((1, 2));
        let s = ManifoldSample::from_intrinsic(&geo, pts, 0).unwrap();
        let t = s
            .with_task(TaskKind::Regression { noise_sigma: 0.0 }, 0)
            .unwrap();
        assert!((t.labels().unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_labels_are_deterministic_functions_of_points() {
        let geo = SpaceFormGeometry::ball(3, 1.0, 1.2).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 64, 8).unwrap();
        let a = s.with_task(TaskKind::Classification { flip_prob: 0.0 }, 1).unwrap();
        let b = s.with_task(TaskKind::Classification { flip_prob: 0.0 }, 2).unwrap();
        assert_eq!(a.labels().unwrap(), b.labels().unwrap());
        for &y in a.labels().unwrap() {
            assert!(y == 1.0 || y == -1.0);
        }
    }

    #[test]
    fn noiseless_regression_is_3_lipschitz() {
        let geo = SpaceFormGeometry::ball(2, 0.0, 1.0).unwrap();
        let s = ManifoldSample::uniform_ball(&geo, 1000, 6)
            .unwrap()
            .with_task(TaskKind::Regression { noise_sigma: 0.0 }, 0)
            .unwrap();
        let pts = s.intrinsic_points();
        let y = s.labels().unwrap();
        let mut max_ratio: f64 = 0.0;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                let d = geodesic_distance(pts.row(i), pts.row(j), &s.geometry).unwrap();
                if d > 1e-12 {
                    max_ratio = max_ratio.max((y[i] - y[j]).abs() / d);
                }
            }
        }
        assert!(max_ratio <= 3.0 + 1e-9, "lipschitz ratio {max_ratio}");
    }
}
