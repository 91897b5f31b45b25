//! Geometry primitives for the three constant-curvature model spaces.
//!
//! Conventions used throughout:
//! * sphere (`kappa > 0`): points live on the radius `1/sqrt(kappa)` sphere in
//!   `R^{d+1}`, so `<x,x> = 1/kappa`;
//! * flat (`kappa = 0`): points are plain vectors in `R^d`;
//! * hyperbolic (`kappa < 0`): points live on the upper sheet of the
//!   hyperboloid in `R^{d+1}` under the Lorentz form
//!   `<x,y>_L = -x_0 y_0 + sum_{i>=1} x_i y_i`, so `<x,x>_L = -1/|kappa|`
//!   with `x_0 > 0`.
//!
//! The working domain is always a geodesic ball (cap) of radius
//! `domain_radius` around a fixed base point; closed manifolds are handled by
//! overriding `vol`.

mod sample;
mod serial;

pub use sample::{random_orthogonal, ManifoldSample, TaskKind};
pub use serial::{format_f64, load_point_cloud, read_geometry_json, read_sample_csv};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

/// Tolerance used when validating that a point lies on its model surface.
pub const MODEL_SURFACE_TOL: f64 = 1e-6;

/// Which of the three model spaces a curvature value selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceForm {
    Spherical,
    Flat,
    Hyperbolic,
}

impl SpaceForm {
    pub fn of(kappa: f64) -> Self {
        if kappa > 0.0 {
            SpaceForm::Spherical
        } else if kappa < 0.0 {
            SpaceForm::Hyperbolic
        } else {
            SpaceForm::Flat
        }
    }
}

/// A manifold description that parameterizes every bound: intrinsic dimension,
/// constant sectional curvature, injectivity radius, working-domain volume and
/// the geodesic radius of the working ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormGeometry {
    pub d: usize,
    pub kappa: f64,
    pub inj: f64,
    pub vol: f64,
    pub domain_radius: f64,
}

impl SpaceFormGeometry {
    /// Builds the default working domain: a geodesic ball of the given radius,
    /// with `vol` set to the exact ball volume. The injectivity radius is
    /// `pi/sqrt(kappa)` on the sphere and twice the domain radius otherwise
    /// (a finite conservative stand-in for the infinite true value).
    pub fn ball(d: usize, kappa: f64, domain_radius: f64) -> Result<Self> {
        let inj = if kappa > 0.0 {
            std::f64::consts::PI / kappa.sqrt()
        } else {
            2.0 * domain_radius
        };
        let vol = space_form_ball_volume(d, kappa, domain_radius)?;
        Self::new(d, kappa, inj, vol, domain_radius)
    }

    /// Fully explicit constructor; validates every invariant.
    pub fn new(d: usize, kappa: f64, inj: f64, vol: f64, domain_radius: f64) -> Result<Self> {
        if d < 1 {
            return Err(Error::domain("dimension must be >= 1"));
        }
        if !(inj > 0.0) || !(vol > 0.0) || !(domain_radius > 0.0) {
            return Err(Error::domain(
                "inj, vol and domain_radius must be strictly positive",
            ));
        }
        if kappa > 0.0 {
            let sk = kappa.sqrt();
            let half_pi = std::f64::consts::FRAC_PI_2;
            if domain_radius > half_pi / sk * (1.0 + 1e-12) {
                return Err(Error::domain(format!(
                    "spherical cap radius {domain_radius} exceeds pi/(2 sqrt(kappa)) = {}",
                    half_pi / sk
                )));
            }
            if inj > std::f64::consts::PI / sk * (1.0 + 1e-12) {
                return Err(Error::domain(format!(
                    "injectivity radius {inj} exceeds pi/sqrt(kappa) = {}",
                    std::f64::consts::PI / sk
                )));
            }
        }
        Ok(SpaceFormGeometry {
            d,
            kappa,
            inj,
            vol,
            domain_radius,
        })
    }

    pub fn model(&self) -> SpaceForm {
        SpaceForm::of(self.kappa)
    }

    /// Number of coordinates of a model point: `d` when flat, `d+1` curved.
    pub fn model_dim(&self) -> usize {
        match self.model() {
            SpaceForm::Flat => self.d,
            _ => self.d + 1,
        }
    }

    /// The fixed base point every sampler and task uses.
    pub fn base_point(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.model_dim()];
        match self.model() {
            SpaceForm::Flat => {}
            SpaceForm::Spherical => p[0] = 1.0 / self.kappa.sqrt(),
            SpaceForm::Hyperbolic => p[0] = 1.0 / self.kappa.abs().sqrt(),
        }
        p
    }

    /// Exponential map at the base point: geodesic distance `r` along the unit
    /// tangent direction `dir` (a unit vector in `R^d`).
    pub fn exp_at_base(&self, r: f64, dir: &[f64]) -> Vec<f64> {
        match self.model() {
            SpaceForm::Flat => dir.iter().map(|&u| r * u).collect(),
            SpaceForm::Spherical => {
                let sk = self.kappa.sqrt();
                let mut x = vec![0.0; self.d + 1];
                x[0] = (sk * r).cos() / sk;
                let s = (sk * r).sin() / sk;
                for i in 0..self.d {
                    x[i + 1] = s * dir[i];
                }
                x
            }
            SpaceForm::Hyperbolic => {
                let sk = self.kappa.abs().sqrt();
                let mut x = vec![0.0; self.d + 1];
                x[0] = (sk * r).cosh() / sk;
                let s = (sk * r).sinh() / sk;
                for i in 0..self.d {
                    x[i + 1] = s * dir[i];
                }
                x
            }
        }
    }

    /// Checks that `x` lies on the model surface within [`MODEL_SURFACE_TOL`].
    pub fn validate_point(&self, x: ArrayView1<f64>) -> Result<()> {
        if x.len() != self.model_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.model_dim(),
                got: x.len(),
            });
        }
        match self.model() {
            SpaceForm::Flat => Ok(()),
            SpaceForm::Spherical => {
                let q = self.kappa * x.dot(&x);
                if (q - 1.0).abs() > MODEL_SURFACE_TOL {
                    return Err(Error::InvalidPoint(format!(
                        "kappa <x,x> = {q}, expected 1"
                    )));
                }
                Ok(())
            }
            SpaceForm::Hyperbolic => {
                let q = -self.kappa.abs() * lorentz_inner(x, x);
                if (q - 1.0).abs() > MODEL_SURFACE_TOL {
                    return Err(Error::InvalidPoint(format!(
                        "-|kappa| <x,x>_L = {q}, expected 1"
                    )));
                }
                if x[0] <= 0.0 {
                    return Err(Error::InvalidPoint("x_0 must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

/// Lorentz inner product `-x_0 y_0 + sum_{i>=1} x_i y_i`.
pub fn lorentz_inner(x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    let mut s = -x[0] * y[0];
    for i in 1..x.len() {
        s += x[i] * y[i];
    }
    s
}

/// Volume of the unit ball in `R^d`: `pi^{d/2} / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    (half * std::f64::consts::PI.ln() - statrs::function::gamma::ln_gamma(half + 1.0)).exp()
}

/// The curvature-scaled sine: `sin(sqrt(k) t)/sqrt(k)`, `t`, or
/// `sinh(sqrt(-k) t)/sqrt(-k)` depending on the sign of `kappa`.
pub fn sn(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let sk = kappa.sqrt();
        (sk * t).sin() / sk
    } else if kappa < 0.0 {
        let sk = (-kappa).sqrt();
        (sk * t).sinh() / sk
    } else {
        t
    }
}

/// Volume of a geodesic ball of radius `r` in the `d`-dimensional space form
/// of curvature `kappa`:
/// `V_k(r) = d w_d int_0^r sn_k(t)^{d-1} dt`,
/// which reduces to `w_d r^d` when `kappa = 0` (used in closed form). The
/// surface-area factor `d w_d` is the volume of the unit sphere `S^{d-1}`.
pub fn space_form_ball_volume(d: usize, kappa: f64, r: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    if !(r > 0.0) {
        return Err(Error::domain(format!("ball radius must be positive, got {r}")));
    }
    if kappa > 0.0 && r > std::f64::consts::PI / kappa.sqrt() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "radius {r} wraps the sphere (max pi/sqrt(kappa) = {})",
            std::f64::consts::PI / kappa.sqrt()
        )));
    }
    let wd = unit_ball_volume(d);
    if kappa == 0.0 {
        return Ok(wd * r.powi(d as i32));
    }
    let dm1 = (d - 1) as i32;
    let integral = adaptive_simpson(|t| sn(kappa, t).powi(dm1), 0.0, r, 1e-10, 2_000_000);
    Ok(d as f64 * wd * integral)
}

/// The closed-form lower bounds on `V_kappa(r)` used in the covering-number
/// proof: `w_d r^d/d * exp(-(d-1) sqrt(|k|) d r)` for `kappa < 0` (from
/// `sinh(u) >= u e^{-u}`) and `w_d r^d/d * (2/pi)^{d-1}` for `kappa > 0`
/// (from `sin(u) >= (2/pi) u` on `[0, pi/2]`).
pub fn ball_volume_lower_bound(d: usize, kappa: f64, r: f64) -> Result<f64> {
    if d < 1 || !(r > 0.0) {
        return Err(Error::domain("need d >= 1 and r > 0"));
    }
    let wd = unit_ball_volume(d);
    let base = wd * r.powi(d as i32) / d as f64;
    if kappa < 0.0 {
        let c = (d - 1) as f64 * kappa.abs().sqrt();
        Ok(base * (-c * d as f64 * r).exp())
    } else if kappa > 0.0 {
        if kappa.sqrt() * r > std::f64::consts::FRAC_PI_2 * (1.0 + 1e-12) {
            return Err(Error::domain(
                "sin(u) >= (2/pi)u regime requires sqrt(kappa) r <= pi/2",
            ));
        }
        Ok(base * (2.0 / std::f64::consts::PI).powi(d as i32 - 1))
    } else {
        Ok(base)
    }
}

/// Geodesic distance between two model points. Inverse-trig arguments are
/// clamped to their domains so 1e-16-scale rounding cannot produce NaN.
pub fn geodesic_distance(
    x: ArrayView1<f64>,
    y: ArrayView1<f64>,
    geometry: &SpaceFormGeometry,
) -> Result<f64> {
    geometry.validate_point(x)?;
    geometry.validate_point(y)?;
    match geometry.model() {
        SpaceForm::Flat => {
            let mut s = 0.0;
            for i in 0..x.len() {
                let dxi = x[i] - y[i];
                s += dxi * dxi;
            }
            Ok(s.sqrt())
        }
        SpaceForm::Spherical => {
            let c = (geometry.kappa * x.dot(&y)).clamp(-1.0, 1.0);
            Ok(c.acos() / geometry.kappa.sqrt())
        }
        SpaceForm::Hyperbolic => {
            let c = (-geometry.kappa.abs() * lorentz_inner(x, y)).max(1.0);
            Ok(c.acosh() / geometry.kappa.abs().sqrt())
        }
    }
}
