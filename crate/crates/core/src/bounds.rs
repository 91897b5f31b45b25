//! Curvature-explicit complexity and generalization bounds.
//!
//! The chain evaluated here:
//!
//! 1. manifold covering number
//!    `log N(M, eps) <= log(Vol(M) / V_k(eps/2)) + c d sqrt(|k|) eps`,
//!    with the exact quadrature ball volume in the denominator;
//! 2. function-class covering number
//!    `log N(F, eps) <= N(M, eps/2L) * log(4B/eps)` for `L`-Lipschitz
//!    functions bounded by `B`, together with the closed form
//!    `[d log(2L/eps) + c sqrt(|k|) eps/L + log(Vol/w_d)] log(4B/eps)`;
//! 3. Dudley's entropy integral at `alpha = n^{-1/d}`, both as an adaptive
//!    quadrature and as the asymptotic rate
//!    `sqrt(d log(L sqrt(n)) + psi(k, L)) / n^{1/d}`;
//! 4. the two-sided generalization bound
//!    `2 L_loss Rad_n + 3B sqrt(log(2/delta)/(2n))`.
//!
//! The curvature penalty `psi(k, L) = sqrt(|k|)/L` applies for `k < 0` and
//! vanishes otherwise. Euclidean baselines use the ambient dimension: the
//! `L B sqrt(D/n)` form as the reported baseline and the same asymptotic rate
//! evaluated at `d = D, k = 0` (an `n^{-1/D}` rate) as the comparator for the
//! improvement percentage.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::spaceform::{space_form_ball_volume, unit_ball_volume, SpaceFormGeometry};
use serde::{Deserialize, Serialize};

/// Lipschitz hypothesis class: `|f(x) - f(y)| <= L d_g(x,y)`, `|f| <= B`,
/// trained with an `L_loss`-Lipschitz loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionClassSpec {
    pub lipschitz: f64,
    pub sup_bound: f64,
    pub loss_lipschitz: f64,
}

impl FunctionClassSpec {
    pub fn new(lipschitz: f64, sup_bound: f64, loss_lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0) || !(sup_bound > 0.0) || !(loss_lipschitz > 0.0) {
            return Err(Error::domain("class constants must be strictly positive"));
        }
        Ok(FunctionClassSpec {
            lipschitz,
            sup_bound,
            loss_lipschitz,
        })
    }
}

/// Every universal constant the theorems leave unstated, in one overridable
/// bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// `c` in the packing constant `C = c d`.
    pub c_pack: f64,
    /// Additive Dudley constant (the `4` in `4 alpha`).
    pub c_dudley_a: f64,
    /// Integral Dudley constant (the `12` in `12/sqrt(n)`).
    pub c_dudley_b: f64,
    /// Constant hidden by the O(.) of the asymptotic rate forms.
    pub big_o_scale: f64,
    /// Confidence parameter of the generalization bound.
    pub delta: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants {
            c_pack: 1.0,
            c_dudley_a: 4.0,
            c_dudley_b: 12.0,
            big_o_scale: 1.0,
            delta: 0.05,
        }
    }
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_pack > 0.0)
            || !(self.c_dudley_a > 0.0)
            || !(self.c_dudley_b > 0.0)
            || !(self.big_o_scale > 0.0)
        {
            return Err(Error::domain("bound constants must be strictly positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::domain("delta must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Curvature penalty `psi(k, L) = sqrt(|k|)/L` for `k < 0`, zero for `k >= 0`.
pub fn psi(kappa: f64, lipschitz: f64) -> f64 {
    if kappa < 0.0 {
        kappa.abs().sqrt() / lipschitz
    } else {
        0.0
    }
}

/// Log covering number of the manifold at scale `eps`:
/// `log(Vol(M)/V_k(eps/2)) + c_pack d sqrt(|k|) eps`.
/// Requires `eps < inj/2`; space forms are homogeneous, so the infimum ball
/// volume is the volume at any point.
pub fn manifold_log_covering(
    geometry: &SpaceFormGeometry,
    eps: f64,
    constants: &BoundConstants,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    if eps >= geometry.inj / 2.0 {
        return Err(Error::domain(format!(
            "eps = {eps} violates the covering-theorem hypothesis eps < inj/2 = {}",
            geometry.inj / 2.0
        )));
    }
    let small_ball = space_form_ball_volume(geometry.d, geometry.kappa, eps / 2.0)?;
    let curvature_term = constants.c_pack * geometry.d as f64 * geometry.kappa.abs().sqrt() * eps;
    Ok((geometry.vol / small_ball).ln() + curvature_term)
}

/// The looser variant of the manifold bound that replaces the quadrature ball
/// volume with the analytic lower bound of the comparison step. Kept as a
/// secondary read-out so the analytic inequality stays testable.
pub fn manifold_log_covering_analytic(
    geometry: &SpaceFormGeometry,
    eps: f64,
    constants: &BoundConstants,
) -> Result<f64> {
    if !(eps > 0.0) || eps >= geometry.inj / 2.0 {
        return Err(Error::domain("eps out of range"));
    }
    let lower = crate::spaceform::ball_volume_lower_bound(geometry.d, geometry.kappa, eps / 2.0)?;
    let curvature_term = constants.c_pack * geometry.d as f64 * geometry.kappa.abs().sqrt() * eps;
    Ok((geometry.vol / lower).ln() + curvature_term)
}

/// Log covering number of the Lipschitz class in sup norm:
/// `ceil(N(M, eps/2L)) * log(4B/eps)`; valid for `eps < min(inj/(2L), B)`.
pub fn function_class_log_covering(
    geometry: &SpaceFormGeometry,
    spec: &FunctionClassSpec,
    eps: f64,
    constants: &BoundConstants,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let limit = geometry.inj / (2.0 * spec.lipschitz);
    if eps >= limit {
        return Err(Error::domain(format!(
            "eps = {eps} violates eps < inj/(2L) = {limit}"
        )));
    }
    if eps >= spec.sup_bound {
        return Err(Error::domain(format!(
            "eps = {eps} must be below the class bound B = {}",
            spec.sup_bound
        )));
    }
    let log_nm = manifold_log_covering(geometry, eps / (2.0 * spec.lipschitz), constants)?;
    if log_nm > 700.0 {
        return Err(Error::domain("manifold covering number overflows f64"));
    }
    // Covering numbers are integer counts: round up before multiplying. The
    // relative guard keeps exp(ln k) rounding noise from bumping an exact
    // integer count to k+1.
    let nm = (log_nm.exp().max(1.0) * (1.0 - 1e-12)).ceil();
    Ok(nm * (4.0 * spec.sup_bound / eps).ln())
}

/// The curvature-explicit closed form obtained by substituting the comparison
/// volume bound:
/// `[d log(2L/eps) + c_pack sqrt(|k|) eps/L + log(Vol/w_d)] log(4B/eps)`,
/// clamped at zero (a covering number is never below one).
pub fn combined_log_covering(
    geometry: &SpaceFormGeometry,
    spec: &FunctionClassSpec,
    eps: f64,
    constants: &BoundConstants,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let bracket = geometry.d as f64 * (2.0 * spec.lipschitz / eps).ln()
        + constants.c_pack * geometry.kappa.abs().sqrt() * eps / spec.lipschitz
        + (geometry.vol / unit_ball_volume(geometry.d)).ln();
    let log_factor = (4.0 * spec.sup_bound / eps).ln();
    Ok(bracket.max(0.0) * log_factor.max(0.0))
}

/// Entropy used inside the Dudley integrand: the function-class bound where
/// its hypotheses hold, the closed form for the tail of the integration range.
pub fn class_log_covering_extended(
    geometry: &SpaceFormGeometry,
    spec: &FunctionClassSpec,
    eps: f64,
    constants: &BoundConstants,
) -> f64 {
    let in_range = eps < geometry.inj / (2.0 * spec.lipschitz)
        && eps < spec.sup_bound
        && eps / (2.0 * spec.lipschitz) < geometry.inj / 2.0;
    if in_range {
        if let Ok(v) = function_class_log_covering(geometry, spec, eps, constants) {
            return v.max(0.0);
        }
        return f64::INFINITY;
    }
    combined_log_covering(geometry, spec, eps, constants).unwrap_or(f64::INFINITY)
}

/// Both read-outs of the Rademacher complexity bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RademacherBound {
    /// Dudley form `c_a alpha + (c_b/sqrt(n)) int_alpha^B sqrt(log N(F,eps)) deps`.
    pub integral: f64,
    /// The bare entropy integral (useful for oracle comparisons).
    pub entropy_integral: f64,
    /// Asymptotic rate `big_o_scale sqrt(d log(L sqrt n) + psi)/n^{1/d}`.
    pub asymptotic: f64,
    /// The scale cut-off `alpha = n^{-1/d}`.
    pub alpha: f64,
}

/// Asymptotic Rademacher rate for a (possibly fractional) dimension. This is
/// the quantity the improvement metric compares across intrinsic and ambient
/// dimensions.
pub fn asymptotic_rademacher(
    d: f64,
    kappa: f64,
    spec: &FunctionClassSpec,
    n: usize,
    constants: &BoundConstants,
) -> f64 {
    let n_f = n as f64;
    let inner = d * (spec.lipschitz * n_f.sqrt()).ln() + psi(kappa, spec.lipschitz);
    constants.big_o_scale * inner.max(0.0).sqrt() / n_f.powf(1.0 / d)
}

/// Rademacher complexity via Dudley's entropy integral at `alpha = n^{-1/d}`,
/// with the asymptotic rate alongside. Errors when `n` is too small for the
/// geometry (`alpha` must stay below both `B` and `inj/(2L)`).
pub fn rademacher_bound(
    geometry: &SpaceFormGeometry,
    spec: &FunctionClassSpec,
    n: usize,
    constants: &BoundConstants,
) -> Result<RademacherBound> {
    if n < 2 {
        return Err(Error::domain("need n >= 2"));
    }
    constants.validate()?;
    let n_f = n as f64;
    let alpha = n_f.powf(-1.0 / geometry.d as f64);
    let limit = (geometry.inj / (2.0 * spec.lipschitz)).min(spec.sup_bound);
    if alpha >= limit {
        return Err(Error::domain(format!(
            "alpha = n^(-1/d) = {alpha} must be below min(B, inj/(2L)) = {limit}; n too small for this geometry"
        )));
    }
    let integrand = |eps: f64| class_log_covering_extended(geometry, spec, eps, constants).sqrt();
    let entropy_integral = adaptive_simpson(integrand, alpha, spec.sup_bound, 1e-6, 200_000);
    let integral =
        constants.c_dudley_a * alpha + constants.c_dudley_b / n_f.sqrt() * entropy_integral;
    let asymptotic = asymptotic_rademacher(geometry.d as f64, geometry.kappa, spec, n, constants);
    Ok(RademacherBound {
        integral,
        entropy_integral,
        asymptotic,
        alpha,
    })
}

/// Deviation term `3B sqrt(log(2/delta) / (2n))` shared by every
/// generalization bound here.
pub fn confidence_term(spec: &FunctionClassSpec, n: usize, constants: &BoundConstants) -> f64 {
    3.0 * spec.sup_bound * ((2.0 / constants.delta).ln() / (2.0 * n as f64)).sqrt()
}

/// Full generalization bound `2 L_loss Rad_n + 3B sqrt(log(2/delta)/(2n))`
/// with the Dudley-integral Rademacher term.
pub fn generalization_bound(
    geometry: &SpaceFormGeometry,
    spec: &FunctionClassSpec,
    n: usize,
    constants: &BoundConstants,
) -> Result<f64> {
    let rad = rademacher_bound(geometry, spec, n, constants)?;
    Ok(2.0 * spec.loss_lipschitz * rad.integral + confidence_term(spec, n, constants))
}

/// Euclidean baseline pair built from the ambient dimension.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EuclideanBaseline {
    pub rademacher: f64,
    pub gen_bound: f64,
}

/// Classical ambient-dimension baseline `Rad = big_o_scale L B sqrt(D/n)`,
/// composed into a generalization bound through the same outer form.
pub fn euclidean_baseline(
    ambient_dim: usize,
    spec: &FunctionClassSpec,
    n: usize,
    constants: &BoundConstants,
) -> Result<EuclideanBaseline> {
    if ambient_dim < 1 || n < 1 {
        return Err(Error::domain("need D >= 1 and n >= 1"));
    }
    let rademacher = constants.big_o_scale
        * spec.lipschitz
        * spec.sup_bound
        * (ambient_dim as f64 / n as f64).sqrt();
    let gen_bound = 2.0 * spec.loss_lipschitz * rademacher + confidence_term(spec, n, constants);
    Ok(EuclideanBaseline {
        rademacher,
        gen_bound,
    })
}

/// Ambient-rate comparator: the asymptotic bound evaluated at `d = D`,
/// `kappa = 0`, i.e. the `n^{-1/D}` rate a curvature-blind analysis pays.
pub fn ambient_rate_bound(
    ambient_dim: usize,
    spec: &FunctionClassSpec,
    n: usize,
    constants: &BoundConstants,
) -> Result<EuclideanBaseline> {
    if ambient_dim < 1 || n < 1 {
        return Err(Error::domain("need D >= 1 and n >= 1"));
    }
    let rademacher = asymptotic_rademacher(ambient_dim as f64, 0.0, spec, n, constants);
    let gen_bound = 2.0 * spec.loss_lipschitz * rademacher + confidence_term(spec, n, constants);
    Ok(EuclideanBaseline {
        rademacher,
        gen_bound,
    })
}

/// Tightness improvement of `ours` over `euclidean`, in percent. Negative
/// when the curvature-aware bound is looser.
pub fn improvement(ours: f64, euclidean: f64) -> Result<f64> {
    if !(euclidean > 0.0) {
        return Err(Error::domain("euclidean reference bound must be positive"));
    }
    Ok(100.0 * (euclidean - ours) / euclidean)
}

/// Evaluated bounds for one configuration, with the inputs echoed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub geometry: SpaceFormGeometry,
    pub spec: FunctionClassSpec,
    pub constants: BoundConstants,
    pub ambient_dim: usize,
    pub n: usize,
    pub eps: f64,
    pub log_cover_manifold: f64,
    pub log_cover_class: f64,
    pub log_cover_class_combined: f64,
    pub rademacher: f64,
    pub rademacher_asymptotic: f64,
    pub entropy_integral: f64,
    pub gen_bound: f64,
    pub gen_bound_asymptotic: f64,
    pub euclidean_rademacher: f64,
    pub euclidean_gen_bound: f64,
    pub ambient_rate_rademacher: f64,
    pub ambient_rate_gen_bound: f64,
    pub improvement_pct: f64,
}

impl BoundReport {
    pub fn csv_header() -> &'static str {
        "d,D,kappa,L,B,L_loss,n,delta,rademacher,gen_bound,euclidean_rademacher,euclidean_gen_bound,improvement_pct"
    }

    pub fn csv_row(&self) -> String {
        use crate::spaceform::format_f64 as f;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.geometry.d,
            self.ambient_dim,
            f(self.geometry.kappa),
            f(self.spec.lipschitz),
            f(self.spec.sup_bound),
            f(self.spec.loss_lipschitz),
            self.n,
            f(self.constants.delta),
            f(self.rademacher),
            f(self.gen_bound),
            f(self.euclidean_rademacher),
            f(self.euclidean_gen_bound),
            f(self.improvement_pct),
        )
    }
}

/// A covering scale that satisfies every hypothesis of the two covering
/// theorems for this geometry and class.
pub fn default_covering_eps(geometry: &SpaceFormGeometry, spec: &FunctionClassSpec) -> f64 {
    let l = spec.lipschitz;
    0.45 * (geometry.inj / (2.0 * l))
        .min(spec.sup_bound)
        .min(l * geometry.inj)
}

/// Evaluates the whole bound chain for one configuration. `eps` defaults to
/// [`default_covering_eps`]. The improvement percentage compares the
/// asymptotic intrinsic rate against the ambient `n^{-1/D}` rate, both pushed
/// through the generalization-bound composition at this `n`.
pub fn evaluate_bounds(
    geometry: &SpaceFormGeometry,
    spec: &FunctionClassSpec,
    ambient_dim: usize,
    n: usize,
    eps: Option<f64>,
    constants: &BoundConstants,
) -> Result<BoundReport> {
    constants.validate()?;
    if ambient_dim < geometry.d {
        return Err(Error::DimensionMismatch {
            expected: geometry.d,
            got: ambient_dim,
        });
    }
    let eps = eps.unwrap_or_else(|| default_covering_eps(geometry, spec));
    let log_cover_manifold = manifold_log_covering(geometry, eps, constants)?;
    let log_cover_class = function_class_log_covering(geometry, spec, eps, constants)?;
    let log_cover_class_combined = combined_log_covering(geometry, spec, eps, constants)?;
    let rad = rademacher_bound(geometry, spec, n, constants)?;
    let gen_bound = 2.0 * spec.loss_lipschitz * rad.integral + confidence_term(spec, n, constants);
    let gen_bound_asymptotic =
        2.0 * spec.loss_lipschitz * rad.asymptotic + confidence_term(spec, n, constants);
    let euclid = euclidean_baseline(ambient_dim, spec, n, constants)?;
    let ambient_rate = ambient_rate_bound(ambient_dim, spec, n, constants)?;
    let improvement_pct = improvement(gen_bound_asymptotic, ambient_rate.gen_bound)?;
    let report = BoundReport {
        geometry: geometry.clone(),
        spec: *spec,
        constants: *constants,
        ambient_dim,
        n,
        eps,
        log_cover_manifold,
        log_cover_class,
        log_cover_class_combined,
        rademacher: rad.integral,
        rademacher_asymptotic: rad.asymptotic,
        entropy_integral: rad.entropy_integral,
        gen_bound,
        gen_bound_asymptotic,
        euclidean_rademacher: euclid.rademacher,
        euclidean_gen_bound: euclid.gen_bound,
        ambient_rate_rademacher: ambient_rate.rademacher,
        ambient_rate_gen_bound: ambient_rate.gen_bound,
        improvement_pct,
    };
    for (name, v) in [
        ("log_cover_manifold", report.log_cover_manifold),
        ("log_cover_class", report.log_cover_class),
        ("rademacher", report.rademacher),
        ("gen_bound", report.gen_bound),
        ("euclidean_rademacher", report.euclidean_rademacher),
        ("euclidean_gen_bound", report.euclidean_gen_bound),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::domain(format!(
                "{name} is not finite and nonnegative: {v}"
            )));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_disk() -> SpaceFormGeometry {
        // Unit disk with Vol = pi; inj chosen so eps = 1 satisfies eps < inj/2.
        SpaceFormGeometry::new(2, 0.0, 4.0, std::f64::consts::PI, 1.0).unwrap()
    }

    fn default_spec() -> FunctionClassSpec {
        FunctionClassSpec::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn psi_cases() {
        assert_eq!(psi(0.0, 3.0), 0.0);
        assert_eq!(psi(-4.0, 2.0), 1.0);
        assert_eq!(psi(1.0, 5.0), 0.0); // vanishes for positive curvature
    }

    #[test]
    fn psi_scales_inversely_in_lipschitz() {
        for &k in &[-0.5, -1.0, -2.0] {
            for &l in &[0.5, 1.0, 3.0] {
                assert!((psi(k, 2.0 * l) - psi(k, l) / 2.0).abs() < 1e-15);
                assert!(psi(k, l) > 0.0);
            }
        }
    }

    #[test]
    fn flat_manifold_covering_matches_closed_form() {
        let c = BoundConstants::default();
        let geo = flat_disk();
        let eps = 1.0;
        let got = manifold_log_covering(&geo, eps, &c).unwrap();
        // Independent route: log Vol - log w_d - d log(eps/2).
        let expected = geo.vol.ln() - unit_ball_volume(2).ln() - 2.0 * (eps / 2.0f64).ln();
        assert!((got - expected).abs() < 1e-12 * expected.abs().max(1.0));
        // Vol/(w_d (1/2)^2) = pi/(pi/4) = 4.
        assert!((got - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn flat_case_has_no_curvature_term() {
        let mut c = BoundConstants::default();
        let geo = flat_disk();
        let base = manifold_log_covering(&geo, 0.5, &c).unwrap();
        c.c_pack = 1e6; // would dominate if any curvature term leaked in
        let same = manifold_log_covering(&geo, 0.5, &c).unwrap();
        assert_eq!(base, same);
    }

    #[test]
    fn hyperbolic_covering_matches_volume_oracle() {
        // Recompute both summands with an independent trapezoid volume oracle.
        let c = BoundConstants::default();
        let vol = space_form_ball_volume(2, -1.0, 2.0).unwrap();
        let geo = SpaceFormGeometry::new(2, -1.0, 4.0, vol, 2.0).unwrap();
        let eps = 0.5;
        let got = manifold_log_covering(&geo, eps, &c).unwrap();

        let trapezoid_volume = |r: f64| {
            let n = 1_000_000usize;
            let h = r / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let t = i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * t.sinh();
            }
            2.0 * std::f64::consts::PI * acc * h
        };
        let oracle =
            (trapezoid_volume(2.0) / trapezoid_volume(eps / 2.0)).ln() + 1.0 * 2.0 * 1.0 * eps;
        assert!(
            (got - oracle).abs() / oracle.abs() < 1e-8,
            "{got} vs {oracle}"
        );
    }

    #[test]
    fn covering_hypothesis_violation_errors() {
        let geo = flat_disk();
        let c = BoundConstants::default();
        assert!(manifold_log_covering(&geo, 2.0, &c).is_err()); // inj/2 = 2
        assert!(manifold_log_covering(&geo, -0.1, &c).is_err());
    }

    #[test]
    fn trivial_cover_reduces_to_log_term() {
        // One-center cover: eps/(2L) so large that N(M, .) = 1.
        let c = BoundConstants::default();
        let geo = SpaceFormGeometry::new(1, 0.0, 12.0, 2.0, 1.0).unwrap();
        let spec = FunctionClassSpec::new(0.1, 1.0, 1.0).unwrap();
        let eps = 0.5;
        let got = function_class_log_covering(&geo, &spec, eps, &c).unwrap();
        assert!((got - (4.0f64 / 0.5).ln()).abs() < 1e-12);
    }

    #[test]
    fn interval_class_covering_value() {
        // Flat 1-D interval of length 2 (ball of radius 1), L = 1, B = 1,
        // eps = 0.5: N(M, 0.25) = 2/(2*0.125) = 8 centers, times log 8.
        let c = BoundConstants::default();
        let geo = SpaceFormGeometry::new(1, 0.0, 4.0, 2.0, 1.0).unwrap();
        let spec = default_spec();
        let got = function_class_log_covering(&geo, &spec, 0.5, &c).unwrap();
        assert!((got - 8.0 * 8.0f64.ln()).abs() < 1e-12, "{got}");
    }

    #[test]
    fn halving_eps_never_decreases_class_bound() {
        let c = BoundConstants::default();
        let geo = SpaceFormGeometry::new(2, -1.0, 8.0, 20.0, 2.0).unwrap();
        let spec = default_spec();
        let mut eps = 0.8;
        let mut prev = function_class_log_covering(&geo, &spec, eps, &c).unwrap();
        for _ in 0..6 {
            eps /= 2.0;
            let next = function_class_log_covering(&geo, &spec, eps, &c).unwrap();
            assert!(next >= prev - 1e-9, "eps={eps}: {next} < {prev}");
            prev = next;
        }
    }

    /// Greedy radius-`delta` covering of `[0, len]` built on a fine mesh,
    /// then the explicit grid-valued construction: value grid of spacing
    /// eps/2 over [-B, B] at each center, extended by nearest center.
    fn interval_delta_cover(len: f64, delta: f64, mesh: usize) -> Vec<f64> {
        // Scan the mesh; when a point is uncovered, drop a center delta past
        // it so the new ball covers a full 2*delta stretch.
        let mut centers: Vec<f64> = Vec::new();
        for i in 0..=mesh {
            let x = len * i as f64 / mesh as f64;
            if centers.iter().all(|&c| (x - c).abs() > delta) {
                centers.push((x + delta).min(len));
            }
        }
        centers
    }

    fn grid_function_cover_log_count(len: f64, lipschitz: f64, sup_bound: f64, eps: f64) -> f64 {
        let delta = eps / (2.0 * lipschitz);
        let centers = interval_delta_cover(len, delta, 10_000);
        let grid_values = ((4.0 * sup_bound / eps).ceil() as usize) + 1;
        centers.len() as f64 * (grid_values as f64).ln()
    }

    #[test]
    fn class_bound_dominates_explicit_grid_cover() {
        // Five (L, B, eps) triples on the flat 1-D interval of length 2.
        let c = BoundConstants::default();
        let geo = SpaceFormGeometry::new(1, 0.0, 16.0, 2.0, 1.0).unwrap();
        for &(l, b, eps) in &[
            (1.0, 1.0, 0.5),
            (1.0, 1.0, 0.25),
            (2.0, 1.0, 0.5),
            (1.0, 2.0, 0.4),
            (1.5, 1.0, 0.3),
        ] {
            let spec = FunctionClassSpec::new(l, b, 1.0).unwrap();
            let bound = function_class_log_covering(&geo, &spec, eps, &c).unwrap();
            let oracle = grid_function_cover_log_count(2.0, l, b, eps);
            assert!(
                bound >= oracle,
                "L={l} B={b} eps={eps}: bound {bound} < oracle {oracle}"
            );
        }
    }

    #[test]
    fn grid_cover_construction_actually_covers() {
        // Validate the oracle itself: random Lipschitz functions on the mesh
        // are within eps of their quantized nearest-center extension.
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let (len, l, b, eps) = (2.0, 1.0, 1.0, 0.5);
        let delta = eps / (2.0 * l);
        let mesh = 2000usize;
        let xs: Vec<f64> = (0..=mesh).map(|i| len * i as f64 / mesh as f64).collect();
        let centers = interval_delta_cover(len, delta, mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            // Random L-Lipschitz path clamped to [-B, B].
            let mut f = vec![0.0f64; xs.len()];
            f[0] = rng.random_range(-b..b);
            let h = len / mesh as f64;
            for i in 1..f.len() {
                let slope = rng.random_range(-l..l);
                f[i] = (f[i - 1] + slope * h).clamp(-b, b);
            }
            // Quantize at centers (snapped to the mesh) to the grid of
            // spacing eps/2.
            let center_idx: Vec<usize> = centers
                .iter()
                .map(|&c| ((c / len * mesh as f64).round() as usize).min(mesh))
                .collect();
            let quant: Vec<f64> = center_idx
                .iter()
                .map(|&ci| {
                    let k = ((f[ci] + b) / (eps / 2.0)).round();
                    (-b + k * eps / 2.0).clamp(-b, b)
                })
                .collect();
            for (i, &x) in xs.iter().enumerate() {
                let (mut best, mut best_d) = (0usize, f64::INFINITY);
                for (j, &cj) in center_idx.iter().enumerate() {
                    let d = (x - xs[cj]).abs();
                    if d < best_d {
                        best_d = d;
                        best = j;
                    }
                }
                // Mesh snapping costs at most one extra step of slack.
                assert!(
                    (f[i] - quant[best]).abs() < eps + 2.0 * l * h,
                    "cover fails at x={x}: |{} - {}| >= {eps}",
                    f[i],
                    quant[best]
                );
            }
        }
    }

    #[test]
    fn rademacher_decreases_in_n() {
        let c = BoundConstants::default();
        let geo = flat_disk();
        let spec = default_spec();
        let small = rademacher_bound(&geo, &spec, 100, &c).unwrap();
        let large = rademacher_bound(&geo, &spec, 100_000_000, &c).unwrap();
        assert!(large.integral < small.integral);
        assert!(large.asymptotic < small.asymptotic);
    }

    #[test]
    fn negative_curvature_increases_rademacher() {
        let c = BoundConstants::default();
        let spec = default_spec();
        let flat = SpaceFormGeometry::new(2, 0.0, 4.0, 10.0, 1.5).unwrap();
        let hyp = SpaceFormGeometry::new(2, -1.0, 4.0, 10.0, 1.5).unwrap();
        let rf = rademacher_bound(&flat, &spec, 1000, &c).unwrap();
        let rh = rademacher_bound(&hyp, &spec, 1000, &c).unwrap();
        assert!(rh.integral > rf.integral);
        assert!(rh.asymptotic > rf.asymptotic);
    }

    #[test]
    fn rademacher_rejects_small_n() {
        let c = BoundConstants::default();
        let geo = flat_disk();
        let spec = FunctionClassSpec::new(1.0, 0.2, 1.0).unwrap();
        // alpha = 4^{-1/2} = 0.5 > B = 0.2
        assert!(rademacher_bound(&geo, &spec, 4, &c).is_err());
        assert!(rademacher_bound(&geo, &spec, 1, &c).is_err());
    }

    #[test]
    fn generalization_bound_composition() {
        let c = BoundConstants::default();
        let geo = flat_disk();
        let spec = default_spec();
        let rad = rademacher_bound(&geo, &spec, 1000, &c).unwrap();
        let g = generalization_bound(&geo, &spec, 1000, &c).unwrap();
        let conf = confidence_term(&spec, 1000, &c);
        assert!((g - (2.0 * rad.integral + conf)).abs() < 1e-12);
        // Doubling B with Rad fixed doubles the confidence term exactly.
        let spec2 = FunctionClassSpec::new(1.0, 2.0, 1.0).unwrap();
        assert!((confidence_term(&spec2, 1000, &c) - 2.0 * conf).abs() < 1e-15);
    }

    #[test]
    fn vanishing_loss_lipschitz_leaves_only_confidence() {
        let c = BoundConstants::default();
        let geo = flat_disk();
        let spec = FunctionClassSpec::new(1.0, 1.0, 1e-300).unwrap();
        let g = generalization_bound(&geo, &spec, 1000, &c).unwrap();
        let conf = confidence_term(&spec, 1000, &c);
        assert!((g - conf).abs() < 1e-12);
    }

    #[test]
    fn euclidean_baseline_scaling() {
        let c = BoundConstants::default();
        let spec = default_spec();
        let b1 = euclidean_baseline(100, &spec, 1000, &c).unwrap();
        let b4 = euclidean_baseline(100, &spec, 4000, &c).unwrap();
        assert!((b4.rademacher - b1.rademacher / 2.0).abs() < 1e-15);
        let d100 = euclidean_baseline(100, &spec, 1000, &c).unwrap();
        let d3 = euclidean_baseline(3, &spec, 1000, &c).unwrap();
        let ratio = d100.rademacher / d3.rademacher;
        assert!((ratio - (100.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn swiss_roll_row_has_positive_improvement() {
        // Table-style inputs: D = 3, estimated d = 2.1, kappa = 0.2553.
        let c = BoundConstants::default();
        let spec = default_spec();
        let n = 5000;
        let ours = asymptotic_rademacher(2.1, 0.2553, &spec, n, &c);
        let ours_gen = 2.0 * spec.loss_lipschitz * ours + confidence_term(&spec, n, &c);
        let ambient = ambient_rate_bound(3, &spec, n, &c).unwrap();
        let imp = improvement(ours_gen, ambient.gen_bound).unwrap();
        assert!(imp > 0.0, "improvement {imp}");
    }

    #[test]
    fn improvement_arithmetic() {
        assert_eq!(improvement(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(improvement(0.0, 1.0).unwrap(), 100.0);
        assert_eq!(improvement(0.25, 1.0).unwrap(), 75.0);
        assert!(improvement(1.0, 0.0).is_err());
        assert!(improvement(1.0, -2.0).is_err());
    }

    #[test]
    fn report_csv_schema_is_stable() {
        let c = BoundConstants::default();
        let geo = SpaceFormGeometry::ball(3, -1.0, 1.5).unwrap();
        let spec = default_spec();
        let report = evaluate_bounds(&geo, &spec, 100, 1000, None, &c).unwrap();
        assert_eq!(
            BoundReport::csv_header(),
            "d,D,kappa,L,B,L_loss,n,delta,rademacher,gen_bound,euclidean_rademacher,euclidean_gen_bound,improvement_pct"
        );
        let row = report.csv_row();
        assert_eq!(row.split(',').count(), 13);
        assert!(row.starts_with("3,100,"));
        assert!(report.improvement_pct <= 100.0);
    }
}
