//! Ellipsoid approximations of measurement testing regions and elliptical
//! d-cone approximations of state-family testing regions.
//!
//! For a measurement `{πᵢ}` on `ℂᵈ` the outer approximation `E₁` is the set of
//! probability vectors `p` in the affine range `t + range(Q)` with
//! `(p − t)ᵀ Q⁺ (p − t) ≤ 1`, where
//!
//! ```text
//! Qᵢⱼ = ((d − 1)/d)·(Tr[πᵢπⱼ] − Tr[πᵢ]Tr[πⱼ]/d),   tᵢ = Tr[πᵢ]/d.
//! ```
//!
//! `E_r` scales the radius by `1/r`; `E_{d−1}` is the inner approximation.
//!
//! For a state family `{ρᵢ}` the slice `k ∈ 0..=d` is the ellipsoid with
//! center `(k/d)·u` and covariance `Q_k = c_k·G`, where `u` is the all-ones
//! vector, `c_k = k − k²/d` and `Gᵢⱼ = Tr[ρᵢρⱼ] − 1/d`. The d-cone is the
//! convex hull of all slices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ensemble::{Ensemble, EnsembleKind};
use crate::error::{Error, Result};
use crate::operator::{pinv_gram, sqrt_psd, HermitianOperator, PinvFactorization};
use crate::tolerance::{default_rank_cutoff, Tolerances};

/// Interval tolerance of the 1-D search over the d-cone axis.
pub const AXIS_SEARCH_TOL: f64 = 1e-10;

const NOT_EXTREMAL_NOTE: &str =
    "ensemble is not informationally complete: approximation not necessarily extremal";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
    OffRange,
}

impl Verdict {
    /// `Inside` or `Boundary`.
    pub fn is_member(self) -> bool {
        matches!(self, Verdict::Inside | Verdict::Boundary)
    }

    pub fn classify(form: f64, range_residual: f64, bound: f64, tol: &Tolerances) -> Self {
        if !(range_residual <= tol.range) {
            Verdict::OffRange
        } else if (form - bound).abs() <= tol.member {
            Verdict::Boundary
        } else if form < bound {
            Verdict::Inside
        } else {
            Verdict::Outside
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    /// Quadratic form value; the body is `form ≤ bound`.
    pub form: f64,
    /// `1/r²`.
    pub bound: f64,
    /// Norm of the component outside the affine range.
    pub range_residual: f64,
    pub verdict: Verdict,
    /// Axis position of the optimal slice mixture (d-cones only).
    pub kappa: Option<f64>,
}

fn check_len(expected: usize, v: &DVector<f64>) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

fn check_scale(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale r must be positive, got {r}")));
    }
    Ok(())
}

/// The hyper-ellipsoid `E_r` of a measurement.
#[derive(Debug, Clone)]
pub struct EllipsoidApprox {
    ensemble: Ensemble,
    r: f64,
    center: DVector<f64>,
    covariance: DMatrix<f64>,
    pinv: PinvFactorization,
    informationally_complete: bool,
}

impl EllipsoidApprox {
    /// Builds `E_r` for a validated measurement.
    pub fn new(e: &Ensemble, r: f64, tol: &Tolerances) -> Result<Self> {
        Self::with_rank_cutoff(e, r, tol, default_rank_cutoff(e.len(), e.dim()))
    }

    pub fn with_rank_cutoff(e: &Ensemble, r: f64, tol: &Tolerances, rel_tol: f64) -> Result<Self> {
        e.ensure_valid(tol)?;
        Self::build(e, r, rel_tol)
    }

    /// Skips [`Ensemble::validate`]; the inclusions need not hold.
    pub fn new_unvalidated(e: &Ensemble, r: f64) -> Result<Self> {
        Self::build(e, r, default_rank_cutoff(e.len(), e.dim()))
    }

    fn build(e: &Ensemble, r: f64, rel_tol: f64) -> Result<Self> {
        if e.kind() != EnsembleKind::Measurement {
            return Err(Error::InvalidEnsemble(
                "ellipsoid approximation needs a measurement".into(),
            ));
        }
        check_scale(r)?;
        let d = e.dim() as f64;
        let gram = e.gram();
        let center = &gram.traces / d;
        let covariance = e.centered_gram() * ((d - 1.0) / d);
        let pinv = pinv_gram(&covariance, rel_tol)?;
        let informationally_complete = pinv.rank == e.dim() * e.dim() - 1;
        Ok(Self {
            ensemble: e.clone(),
            r,
            center,
            covariance,
            pinv,
            informationally_complete,
        })
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }

    pub fn scale(&self) -> f64 {
        self.r
    }

    /// The same ellipsoid family at another scale.
    pub fn with_scale(&self, r: f64) -> Result<Self> {
        check_scale(r)?;
        Ok(Self { r, ..self.clone() })
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn pinv(&self) -> &PinvFactorization {
        &self.pinv
    }

    pub fn rank(&self) -> usize {
        self.pinv.rank
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.informationally_complete
    }

    pub fn note(&self) -> Option<&'static str> {
        (!self.informationally_complete).then_some(NOT_EXTREMAL_NOTE)
    }

    /// `1/r²`.
    pub fn bound(&self) -> f64 {
        1.0 / (self.r * self.r)
    }

    /// `(p − t)ᵀ Q⁺ (p − t)`, ignoring any off-range component.
    pub fn form(&self, p: &DVector<f64>) -> f64 {
        self.pinv.quadratic_form(&(p - &self.center))
    }

    pub fn membership(&self, p: &DVector<f64>, tol: &Tolerances) -> Result<MembershipReport> {
        check_len(self.n(), p)?;
        let centered = p - &self.center;
        let form = self.pinv.quadratic_form(&centered);
        let range_residual = self.pinv.range_residual(&centered);
        let bound = self.bound();
        Ok(MembershipReport {
            form,
            bound,
            range_residual,
            verdict: Verdict::classify(form, range_residual, bound, tol),
            kappa: None,
        })
    }

    /// Support function `aᵀt + (1/r)·√(aᵀQa)`.
    pub fn support(&self, a: &DVector<f64>) -> f64 {
        a.dot(&self.center) + self.pinv.forward_form(a).sqrt() / self.r
    }

    /// Minimal-norm unit-trace operator mapped onto `p`.
    pub fn reconstruct_state(&self, p: &DVector<f64>, tol: &Tolerances) -> Result<HermitianOperator> {
        check_len(self.n(), p)?;
        let centered = p - &self.center;
        let residual = self.pinv.range_residual(&centered);
        if residual > tol.range {
            return Err(Error::OffRange { residual });
        }
        let d = self.dim() as f64;
        // (π − τ)⁺ = (π − τ)†·M⁺ with M = (d/(d−1))·Q.
        let coeffs = &self.pinv.pinv * centered * ((d - 1.0) / d);
        let traceless_shift = coeffs.dot(&(&self.center * d)) / d;
        let combo = self.ensemble.combine(&coeffs);
        let id = HermitianOperator::identity(self.dim());
        Ok(&combo + &id.scale(1.0 / d - traceless_shift))
    }

    /// Boundary of the projection of `E_r` onto coordinates `(i, j)`, as a
    /// closed polyline with `points` vertices.
    pub fn projection_profile(&self, i: usize, j: usize, points: usize) -> Result<Vec<[f64; 2]>> {
        let n = self.n();
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidParameter(format!(
                "profile coordinates must be distinct and below {n}"
            )));
        }
        let sub = DMatrix::from_row_slice(
            2,
            2,
            &[
                self.covariance[(i, i)],
                self.covariance[(i, j)],
                self.covariance[(j, i)],
                self.covariance[(j, j)],
            ],
        );
        let root = sqrt_psd(&sub, 1e-10)?;
        let points = points.max(3);
        Ok((0..=points)
            .map(|s| {
                let theta = 2.0 * std::f64::consts::PI * s as f64 / points as f64;
                let v = &root * DVector::from_vec(vec![theta.cos(), theta.sin()]) / self.r;
                [self.center[i] + v[0], self.center[j] + v[1]]
            })
            .collect())
    }
}

/// The elliptical d-cone `conv ∪ₖ E_r^k` of a state family.
#[derive(Debug, Clone)]
pub struct DConeApprox {
    ensemble: Ensemble,
    r: f64,
    shape: DMatrix<f64>,
    pinv: PinvFactorization,
    slice_coefficients: Vec<f64>,
    /// Vertices `(k, √c_k)` of the concave envelope at `r = 1`.
    envelope: Vec<(f64, f64)>,
    informationally_complete: bool,
}

impl DConeApprox {
    /// Builds the d-cone for a validated state family.
    pub fn new(e: &Ensemble, r: f64, tol: &Tolerances) -> Result<Self> {
        Self::with_rank_cutoff(e, r, tol, default_rank_cutoff(e.len(), e.dim()))
    }

    pub fn with_rank_cutoff(e: &Ensemble, r: f64, tol: &Tolerances, rel_tol: f64) -> Result<Self> {
        e.ensure_valid(tol)?;
        Self::build(e, r, rel_tol)
    }

    /// Skips [`Ensemble::validate`]; the inclusions need not hold.
    pub fn new_unvalidated(e: &Ensemble, r: f64) -> Result<Self> {
        Self::build(e, r, default_rank_cutoff(e.len(), e.dim()))
    }

    fn build(e: &Ensemble, r: f64, rel_tol: f64) -> Result<Self> {
        if e.kind() != EnsembleKind::StateFamily {
            return Err(Error::InvalidEnsemble("d-cone approximation needs a state family".into()));
        }
        check_scale(r)?;
        let d = e.dim();
        let df = d as f64;
        let gram = e.gram();
        let shape = gram.matrix.map(|x| x - 1.0 / df);
        let pinv = pinv_gram(&shape, rel_tol)?;
        let slice_coefficients: Vec<f64> = (0..=d)
            .map(|k| {
                let k = k as f64;
                k - k * k / df
            })
            .collect();
        let envelope = upper_concave_hull(
            &slice_coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| (k as f64, c.max(0.0).sqrt()))
                .collect::<Vec<_>>(),
        );
        let informationally_complete = pinv.rank == d * d - 1;
        Ok(Self {
            ensemble: e.clone(),
            r,
            shape,
            pinv,
            slice_coefficients,
            envelope,
            informationally_complete,
        })
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn n(&self) -> usize {
        self.shape.nrows()
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }

    pub fn scale(&self) -> f64 {
        self.r
    }

    pub fn with_scale(&self, r: f64) -> Result<Self> {
        check_scale(r)?;
        Ok(Self { r, ..self.clone() })
    }

    /// Common shape matrix `G`.
    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn pinv(&self) -> &PinvFactorization {
        &self.pinv
    }

    pub fn rank(&self) -> usize {
        self.pinv.rank
    }

    /// `c_k = k − k²/d` for `k = 0..=d`.
    pub fn slice_coefficients(&self) -> &[f64] {
        &self.slice_coefficients
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.informationally_complete
    }

    pub fn note(&self) -> Option<&'static str> {
        (!self.informationally_complete).then_some(NOT_EXTREMAL_NOTE)
    }

    pub fn bound(&self) -> f64 {
        1.0 / (self.r * self.r)
    }

    /// `Q_k = c_k·G`.
    pub fn slice_covariance(&self, k: usize) -> Result<DMatrix<f64>> {
        let c = self.coefficient(k)?;
        Ok(&self.shape * c)
    }

    /// `(k/d)·u`.
    pub fn slice_center(&self, k: usize) -> Result<DVector<f64>> {
        self.coefficient(k)?;
        Ok(self.axis_point(k as f64))
    }

    fn coefficient(&self, k: usize) -> Result<f64> {
        self.slice_coefficients.get(k).copied().ok_or_else(|| {
            Error::InvalidParameter(format!("slice index {k} exceeds dimension {}", self.dim()))
        })
    }

    fn axis_point(&self, kappa: f64) -> DVector<f64> {
        DVector::from_element(self.n(), kappa / self.dim() as f64)
    }

    /// Radial reach of the hull at axis position `κ ∈ [0, d]` for `r = 1`:
    /// the piecewise-linear concave envelope of `(k, √c_k)`.
    pub fn unit_envelope(&self, kappa: f64) -> f64 {
        if !(0.0..=self.dim() as f64).contains(&kappa) {
            return 0.0;
        }
        for w in self.envelope.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if kappa <= x1 {
                return y0 + (y1 - y0) * (kappa - x0) / (x1 - x0);
            }
        }
        self.envelope.last().map_or(0.0, |v| v.1)
    }

    /// Envelope at the approximation's scale: `unit_envelope(κ)/r`.
    pub fn envelope(&self, kappa: f64) -> f64 {
        self.unit_envelope(kappa) / self.r
    }

    /// Axial profile `(κ, R_env(κ))` through the envelope vertices.
    pub fn axial_profile(&self) -> Vec<[f64; 2]> {
        self.envelope.iter().map(|&(k, y)| [k, y / self.r]).collect()
    }

    fn slice_form(&self, q: &DVector<f64>, kappa: f64) -> f64 {
        self.pinv.quadratic_form(&(q - self.axis_point(kappa)))
    }

    pub fn slice_membership(&self, q: &DVector<f64>, k: usize, tol: &Tolerances) -> Result<MembershipReport> {
        check_len(self.n(), q)?;
        let c = self.coefficient(k)?;
        let centered = q - self.axis_point(k as f64);
        let bound = self.bound();
        if k == 0 || k == self.dim() {
            // Degenerate slice: a single point.
            let range_residual = centered.norm();
            let verdict = if range_residual <= tol.range {
                Verdict::Inside
            } else {
                Verdict::OffRange
            };
            return Ok(MembershipReport {
                form: 0.0,
                bound,
                range_residual,
                verdict,
                kappa: Some(k as f64),
            });
        }
        let form = self.pinv.quadratic_form(&centered) / c;
        let range_residual = self.pinv.range_residual(&centered);
        Ok(MembershipReport {
            form,
            bound,
            range_residual,
            verdict: Verdict::classify(form, range_residual, bound, tol),
            kappa: Some(k as f64),
        })
    }

    /// Decides `q ∈ conv ∪ₖ E_r^k`.
    ///
    /// All slices share the shape `G`, so a mixture of slices with mean axis
    /// position `κ` reaches at most `R_env(κ)` in the `G⁺` metric. When `u`
    /// has a component outside `range(G)` that component pins `κ`; otherwise
    /// the convex margin `√f(κ) − R_env(κ)` is minimised over `[0, d]`.
    ///
    /// The reported `form` is `f(κ*)/R_env,1(κ*)²`, which is `≤ 1/r²` exactly
    /// for members.
    pub fn membership(&self, q: &DVector<f64>, tol: &Tolerances) -> Result<MembershipReport> {
        check_len(self.n(), q)?;
        let d = self.dim() as f64;
        let bound = self.bound();
        let u = DVector::from_element(self.n(), 1.0);
        let u_perp = self.pinv.off_range(&u);
        let q_perp = self.pinv.off_range(q);
        let u_perp_sq = u_perp.norm_squared();

        let (kappa, range_residual) = if u_perp_sq.sqrt() > tol.range {
            let kappa = d * q_perp.dot(&u_perp) / u_perp_sq;
            let residual = (&q_perp - &u_perp * (kappa / d)).norm();
            (kappa, residual)
        } else {
            let margin = |k: f64| self.slice_form(q, k).sqrt() - self.envelope(k);
            (minimize_convex(margin, 0.0, d, self.dim()), q_perp.norm())
        };

        if range_residual > tol.range {
            return Ok(MembershipReport {
                form: f64::INFINITY,
                bound,
                range_residual,
                verdict: Verdict::OffRange,
                kappa: Some(kappa),
            });
        }
        let slack = 1e-9 * d.max(1.0);
        if kappa < -slack || kappa > d + slack {
            return Ok(MembershipReport {
                form: f64::INFINITY,
                bound,
                range_residual,
                verdict: Verdict::Outside,
                kappa: Some(kappa),
            });
        }
        let kappa = kappa.clamp(0.0, d);
        let f = self.slice_form(q, kappa);
        let reach = self.unit_envelope(kappa);
        let form = if reach > 0.0 {
            f / (reach * reach)
        } else if f <= tol.range * tol.range {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(MembershipReport {
            form,
            bound,
            range_residual,
            verdict: Verdict::classify(form, range_residual, bound, tol),
            kappa: Some(kappa),
        })
    }

    /// Support function `maxₖ [(k/d)·aᵀu + (√c_k/r)·√(aᵀGa)]`.
    pub fn support(&self, a: &DVector<f64>) -> f64 {
        let d = self.dim() as f64;
        let axial = a.sum();
        let radial = a.dot(&(&self.shape * a)).max(0.0).sqrt();
        self.slice_coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 / d * axial + c.max(0.0).sqrt() / self.r * radial)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minimal-norm trace-`k` operator mapped onto `q`.
    pub fn reconstruct_effect(&self, q: &DVector<f64>, k: usize, tol: &Tolerances) -> Result<HermitianOperator> {
        check_len(self.n(), q)?;
        self.coefficient(k)?;
        let d = self.dim() as f64;
        let centered = q - self.axis_point(k as f64);
        let residual = self.pinv.range_residual(&centered);
        if residual > tol.range {
            return Err(Error::OffRange { residual });
        }
        let coeffs = &self.pinv.pinv * centered;
        let combo = self.ensemble.combine(&coeffs);
        let id = HermitianOperator::identity(self.dim());
        Ok(&combo + &id.scale((k as f64 - coeffs.sum()) / d))
    }
}

/// Upper concave hull of points sorted by `x`.
fn upper_concave_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly above the chord
            let cross = (x2 - x1) * (p.1 - y1) - (y2 - y1) * (p.0 - x1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Golden-section search for a convex function on `[lo, hi]`, cross-checked
/// against the integer points where the envelope has kinks.
fn minimize_convex(f: impl Fn(f64) -> f64, lo: f64, hi: f64, kinks: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > AXIS_SEARCH_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let mut best = 0.5 * (a + b);
    let mut best_val = f(best);
    for k in 0..=kinks {
        let v = f(k as f64);
        if v <= best_val {
            best = k as f64;
            best_val = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{builtin, make_mub, make_sic};
    use crate::sample::{rng_from_seed, sample, SampleKind};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn id_minus_blocks(blocks: usize, size: usize, scale: f64) -> DMatrix<f64> {
        let n = blocks * size;
        DMatrix::from_fn(n, n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            let same = if i / size == j / size { 1.0 / size as f64 } else { 0.0 };
            scale * (delta - same)
        })
    }

    #[test]
    fn tetrahedron_covariance_and_center() {
        let e = builtin("tetrahedron").unwrap();
        let a = EllipsoidApprox::new(&e, 1.0, &tol()).unwrap();
        assert!((a.covariance() - id_minus_blocks(1, 4, 1.0 / 12.0)).norm() < 1e-12);
        assert!((a.covariance()[(0, 0)] - 1.0 / 16.0).abs() < 1e-14);
        assert!((a.covariance()[(0, 1)] + 1.0 / 48.0).abs() < 1e-14);
        assert!((a.center() - v(&[0.25; 4])).norm() < 1e-14);
        assert_eq!(a.rank(), 3);
        assert!(a.is_informationally_complete());
        assert!(a.note().is_none());
    }

    #[test]
    fn trine_covariance() {
        let a = EllipsoidApprox::new(&builtin("trine").unwrap(), 1.0, &tol()).unwrap();
        for i in 0..3 {
            assert!((a.center()[i] - 1.0 / 3.0).abs() < 1e-14);
            for j in 0..3 {
                let want = if i == j { 1.0 / 9.0 } else { -1.0 / 18.0 };
                assert!((a.covariance()[(i, j)] - want).abs() < 1e-14);
            }
        }
        assert_eq!(a.rank(), 2);
        assert!(a.note().is_some());
    }

    #[test]
    fn qubit_mub_covariance() {
        let e = make_mub(2, EnsembleKind::Measurement).unwrap();
        let a = EllipsoidApprox::new(&e, 1.0, &tol()).unwrap();
        assert!((a.covariance() - id_minus_blocks(3, 2, 1.0 / 18.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_wrong_kind_and_scale() {
        let states = builtin("pair").unwrap();
        assert!(EllipsoidApprox::new(&states, 1.0, &tol()).is_err());
        let m = builtin("trine").unwrap();
        assert!(EllipsoidApprox::new(&m, 0.0, &tol()).is_err());
        assert!(DConeApprox::new(&m, 1.0, &tol()).is_err());
    }

    #[test]
    fn membership_examples() {
        let a = EllipsoidApprox::new(&builtin("tetrahedron").unwrap(), 1.0, &tol()).unwrap();
        let at_center = a.membership(&a.center().clone(), &tol()).unwrap();
        assert_eq!(at_center.form, 0.0);
        assert_eq!(at_center.verdict, Verdict::Inside);
        for r in [1.0, 2.0, 10.0] {
            let ar = a.with_scale(r).unwrap();
            assert_eq!(ar.membership(a.center(), &tol()).unwrap().verdict, Verdict::Inside);
        }

        let mut rng = rng_from_seed(99);
        for _ in 0..20 {
            let rho = sample(SampleKind::HaarPure, 2, &mut rng).unwrap();
            let p = a.ensemble().probabilities(&rho).unwrap();
            let rep = a.membership(&p, &tol()).unwrap();
            assert!((rep.form - 1.0).abs() < 1e-9);
            assert_eq!(rep.verdict, Verdict::Boundary);
        }

        let far = a.membership(&v(&[1.0, 0.0, 0.0, 0.0]), &tol()).unwrap();
        assert_eq!(far.verdict, Verdict::Outside);
        assert!((far.form - 9.0).abs() < 1e-9);

        let off = a.membership(&v(&[0.5, 0.5, 0.5, 0.5]), &tol()).unwrap();
        assert_eq!(off.verdict, Verdict::OffRange);
        assert!(a.membership(&v(&[0.5, 0.5]), &tol()).is_err());
    }

    #[test]
    fn tetrahedron_single_outcome_cannot_reach_one() {
        // Brute force over a Bloch-sphere grid: max Tr[π₀ρ] stays well below 1.
        let e = builtin("tetrahedron").unwrap();
        let mut best = 0.0f64;
        for i in 0..=60 {
            for j in 0..120 {
                let th = std::f64::consts::PI * i as f64 / 60.0;
                let ph = 2.0 * std::f64::consts::PI * j as f64 / 120.0;
                let c = num_complex::Complex64::new;
                let psi = crate::operator::CVector::from_vec(vec![
                    c((th / 2.0).cos(), 0.0),
                    num_complex::Complex64::from_polar((th / 2.0).sin(), ph),
                ]);
                let rho = HermitianOperator::outer(&psi);
                best = best.max(e.probabilities(&rho).unwrap()[0]);
            }
        }
        assert!(best < 0.5 + 1e-12);
    }

    #[test]
    fn support_examples() {
        for name in ["trine", "tetrahedron", "computational(3)", "mub(3)"] {
            let a = EllipsoidApprox::new(&builtin(name).unwrap(), 1.0, &tol()).unwrap();
            let u = DVector::from_element(a.n(), 1.0);
            assert!((a.support(&u) - 1.0).abs() < 1e-12, "{name}");
            assert!((a.support(&-u) + 1.0).abs() < 1e-12, "{name}");
        }
        let a = EllipsoidApprox::new(&builtin("trine").unwrap(), 1.0, &tol()).unwrap();
        let e1 = v(&[1.0, 0.0, 0.0]);
        assert!((a.support(&e1) - 2.0 / 3.0).abs() < 1e-12);
        // Brute force over the Bloch circle of real pure states.
        let best = (0..3600)
            .map(|s| {
                let th = std::f64::consts::PI * s as f64 / 3600.0;
                let psi = crate::operator::CVector::from_vec(vec![
                    num_complex::Complex64::new(th.cos(), 0.0),
                    num_complex::Complex64::new(th.sin(), 0.0),
                ]);
                a.ensemble().probabilities(&HermitianOperator::outer(&psi)).unwrap()[0]
            })
            .fold(0.0f64, f64::max);
        assert!((best - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn reconstruct_state_examples() {
        let t = tol();
        let a = EllipsoidApprox::new(&builtin("tetrahedron").unwrap(), 1.0, &t).unwrap();
        let mixed = a.reconstruct_state(a.center(), &t).unwrap();
        assert!(mixed.frobenius_distance(&HermitianOperator::identity(2).scale(0.5)) < 1e-12);

        let zero = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let p = a.ensemble().probabilities(&zero).unwrap();
        let back = a.reconstruct_state(&p, &t).unwrap();
        assert!(back.frobenius_distance(&zero) < 1e-9);

        let trine = EllipsoidApprox::new(&builtin("trine").unwrap(), 1.0, &t).unwrap();
        let p = trine.ensemble().probabilities(&zero).unwrap();
        let back = trine.reconstruct_state(&p, &t).unwrap();
        assert!((back.trace() - 1.0).abs() < 1e-12);
        assert!((trine.ensemble().probabilities(&back).unwrap() - &p).norm() < 1e-9);

        // The y Bloch component is invisible to the trine and drops out.
        let c = num_complex::Complex64::new;
        let plus_i = crate::operator::CVector::from_vec(vec![c(1.0 / 2f64.sqrt(), 0.0), c(0.0, 1.0 / 2f64.sqrt())]);
        let p = trine.ensemble().probabilities(&HermitianOperator::outer(&plus_i)).unwrap();
        let back = trine.reconstruct_state(&p, &t).unwrap();
        assert!(back.frobenius_distance(&HermitianOperator::identity(2).scale(0.5)) < 1e-9);

        let off = v(&[0.5, 0.5, 0.5, 0.5]);
        assert!(matches!(a.reconstruct_state(&off, &t), Err(Error::OffRange { .. })));
    }

    #[test]
    fn qubit_sic_states_slices() {
        let e = make_sic(2, EnsembleKind::StateFamily).unwrap();
        let c = DConeApprox::new(&e, 1.0, &tol()).unwrap();
        // G = (2/3)(I − J/4) from Tr ρᵢρⱼ = (2δᵢⱼ + 1)/3.
        assert!((c.shape() - id_minus_blocks(1, 4, 2.0 / 3.0)).norm() < 1e-12);
        for k in 0..=2usize {
            let kf = k as f64;
            let want = id_minus_blocks(1, 4, (2.0 * kf - kf * kf) / 3.0);
            assert!((c.slice_covariance(k).unwrap() - want).norm() < 1e-12);
        }
        assert_eq!(c.rank(), 3);
        assert!(c.slice_covariance(3).is_err());
    }

    #[test]
    fn qutrit_mub_states_slices() {
        let e = make_mub(3, EnsembleKind::StateFamily).unwrap();
        let c = DConeApprox::new(&e, 1.0, &tol()).unwrap();
        for k in 0..=3usize {
            let kf = k as f64;
            let want = id_minus_blocks(4, 3, (3.0 * kf - kf * kf) / 3.0);
            assert!((c.slice_covariance(k).unwrap() - want).norm() < 1e-12);
        }
        for (got, want) in c.slice_coefficients().iter().zip([0.0, 2.0 / 3.0, 2.0 / 3.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn pair_family_shape() {
        let c = DConeApprox::new(&builtin("pair").unwrap(), 1.0, &tol()).unwrap();
        assert!((c.shape() - DMatrix::identity(2, 2) * 0.5).norm() < 1e-12);
        assert!((c.slice_coefficients()[1] - 0.5).abs() < 1e-15);
        assert!((c.slice_center(1).unwrap() - v(&[0.5, 0.5])).norm() < 1e-15);
        // Slice-1 disc radius: √(c₁·λ(G)) = 1/2.
        assert!((c.envelope(1.0) * 0.5f64.sqrt() - 0.5).abs() < 1e-12);
        assert!(c.note().is_some());
    }

    #[test]
    fn slice_membership_examples() {
        let t = tol();
        let c = DConeApprox::new(&builtin("pair").unwrap(), 1.0, &t).unwrap();
        let r = c.slice_membership(&v(&[0.5, 0.5]), 1, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Inside);
        assert_eq!(r.form, 0.0);
        let r = c.slice_membership(&v(&[1.0, 0.5]), 1, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert!((r.form - 1.0).abs() < 1e-12);
        let r = c.slice_membership(&v(&[1.0, 0.0]), 1, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Outside);
        assert!((r.form - 2.0).abs() < 1e-12);

        let r = c.slice_membership(&v(&[0.0, 0.0]), 0, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Inside);
        let r = c.slice_membership(&v(&[0.1, 0.0]), 0, &t).unwrap();
        assert_eq!(r.verdict, Verdict::OffRange);
        assert!(c.slice_membership(&v(&[1.0, 1.0]), 3, &t).is_err());
    }

    #[test]
    fn dcone_membership_examples() {
        let t = tol();
        let c = DConeApprox::new(&builtin("pair").unwrap(), 1.0, &t).unwrap();
        let apex = c.membership(&v(&[0.0, 0.0]), &t).unwrap();
        assert_eq!(apex.verdict, Verdict::Inside);
        assert_eq!(apex.kappa, Some(0.0));
        let top = c.membership(&v(&[1.0, 1.0]), &t).unwrap();
        assert_eq!(top.verdict, Verdict::Inside);
        assert_eq!(top.kappa, Some(2.0));
        let mid = c.membership(&v(&[0.75, 0.75]), &t).unwrap();
        assert_eq!(mid.verdict, Verdict::Inside);
        assert!(mid.form < 1.0 - 1e-3);
        let edge = c.membership(&v(&[1.0, 0.5]), &t).unwrap();
        assert!(edge.verdict.is_member());
        let out = c.membership(&v(&[1.0, 0.0]), &t).unwrap();
        assert_eq!(out.verdict, Verdict::Outside);
        let below = c.membership(&v(&[-0.1, -0.1]), &t).unwrap();
        assert_eq!(below.verdict, Verdict::Outside);

        // Forced-axis branch: u ⟂ range(G) for the SIC family.
        let s = DConeApprox::new(&make_sic(2, EnsembleKind::StateFamily).unwrap(), 1.0, &t).unwrap();
        assert_eq!(s.membership(&DVector::zeros(4), &t).unwrap().verdict, Verdict::Inside);
        let top = s.membership(&DVector::from_element(4, 1.0), &t).unwrap();
        assert!(top.verdict.is_member());
        assert!((top.kappa.unwrap() - 2.0).abs() < 1e-12);
        let beyond = s.membership(&DVector::from_element(4, 1.2), &t).unwrap();
        assert_eq!(beyond.verdict, Verdict::Outside);
    }

    #[test]
    fn dcone_support_examples() {
        let c = DConeApprox::new(&builtin("pair").unwrap(), 1.0, &tol()).unwrap();
        assert!((c.support(&v(&[1.0, 1.0])) - 2.0).abs() < 1e-12);
        assert!(c.support(&v(&[-1.0, -1.0])).abs() < 1e-12);
        assert!((c.support(&v(&[1.0, -1.0])) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reconstruct_effect_examples() {
        let t = tol();
        let c = DConeApprox::new(&builtin("pair").unwrap(), 1.0, &t).unwrap();
        let e = c.reconstruct_effect(&v(&[0.5, 0.5]), 1, &t).unwrap();
        assert!(e.frobenius_distance(&HermitianOperator::identity(2).scale(0.5)) < 1e-12);
        let e = c.reconstruct_effect(&v(&[1.0, 0.5]), 1, &t).unwrap();
        assert!(e.frobenius_distance(&HermitianOperator::from_real_diagonal(&[1.0, 0.0])) < 1e-12);

        let s = DConeApprox::new(&make_sic(2, EnsembleKind::StateFamily).unwrap(), 1.0, &t).unwrap();
        let zero = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let q = s.ensemble().probabilities(&zero).unwrap();
        let back = s.reconstruct_effect(&q, 1, &t).unwrap();
        assert!(back.frobenius_distance(&zero) < 1e-9);
        assert!(matches!(s.reconstruct_effect(&q, 2, &t), Err(Error::OffRange { .. })));
    }

    #[test]
    fn envelope_and_profile() {
        let c = DConeApprox::new(&builtin("pair").unwrap(), 1.0, &tol()).unwrap();
        let prof = c.axial_profile();
        assert_eq!(prof.len(), 3);
        assert_eq!(prof[0], [0.0, 0.0]);
        assert!((prof[1][1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(prof[2], [2.0, 0.0]);
        assert!((c.envelope(0.5) - 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
        let c2 = c.with_scale(2.0).unwrap();
        assert!((c2.envelope(1.0) - 0.5 * 0.5f64.sqrt()).abs() < 1e-15);

        let a = EllipsoidApprox::new(&builtin("trine").unwrap(), 1.0, &tol()).unwrap();
        let poly = a.projection_profile(0, 1, 16).unwrap();
        assert_eq!(poly.len(), 17);
        assert!((poly[0][0] - poly[16][0]).abs() < 1e-12);
        assert!(a.projection_profile(0, 0, 16).is_err());
    }

    #[test]
    fn concave_hull_drops_interior_points() {
        let h = upper_concave_hull(&[(0.0, 0.0), (1.0, 0.1), (2.0, 1.0), (3.0, 0.0)]);
        assert_eq!(h, vec![(0.0, 0.0), (2.0, 1.0), (3.0, 0.0)]);
    }
}
