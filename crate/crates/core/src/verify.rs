//! Monte-Carlo checks of the approximations and an independent membership
//! oracle for the d-cone.
//!
//! Every sample `i` draws from its own stream `stream_rng(seed, i)`, so the
//! results do not depend on the number of threads.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{Ensemble, EnsembleKind};
use crate::error::{Error, Result};
use crate::region::{DConeApprox, EllipsoidApprox};
use crate::sample::{gaussian_vector, rng_from_seed, sample, stream_rng, unit_vector, SampleKind};
use crate::tolerance::Tolerances;

/// Forms above `bound + VIOLATION_SLACK` count as violations.
pub const VIOLATION_SLACK: f64 = 1e-8;

/// Reconstructed operators may dip this far below zero.
pub const EIGENVALUE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl FormStats {
    fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        let (min, max, sum) = values.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, 0.0),
            |(lo, hi, s), &x| (lo.min(x), hi.max(x), s + x),
        );
        Self {
            count,
            min,
            max,
            mean: if count > 0 { sum / count as f64 } else { f64::NAN },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationStats {
    pub label: String,
    pub kind: EnsembleKind,
    pub check: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub informationally_complete: bool,
    /// Form statistics per sample group.
    pub forms: BTreeMap<&'static str, FormStats>,
    /// `|form − (d/(d−1))(Tr ρ² − 1/d)|`, measurement side only.
    pub max_identity_residual: Option<f64>,
    /// Frobenius distance between a sampled state and its reconstruction.
    pub max_reconstruction_error: Option<f64>,
    pub min_reconstruction_eigenvalue: Option<f64>,
    pub max_trace_error: Option<f64>,
    pub max_forward_residual: Option<f64>,
    /// `|slice form − 1|` over Haar projectors.
    pub max_slice_tightness_residual: Option<f64>,
    pub violations: usize,
    pub skipped: Option<String>,
}

impl VerificationStats {
    fn empty(e: &Ensemble, check: &'static str, samples: usize, seed: u64, ic: bool) -> Self {
        Self {
            label: e.label().to_string(),
            kind: e.kind(),
            check,
            samples,
            seed,
            informationally_complete: ic,
            forms: BTreeMap::new(),
            max_identity_residual: None,
            max_reconstruction_error: None,
            min_reconstruction_eigenvalue: None,
            max_trace_error: None,
            max_forward_residual: None,
            max_slice_tightness_residual: None,
            violations: 0,
            skipped: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Default)]
struct Record {
    group: &'static str,
    form: f64,
    violation: bool,
    identity_residual: Option<f64>,
    reconstruction_error: Option<f64>,
    min_eigenvalue: Option<f64>,
    trace_error: Option<f64>,
    forward_residual: Option<f64>,
    tightness: Option<f64>,
}

fn max_opt(acc: Option<f64>, x: Option<f64>) -> Option<f64> {
    match (acc, x) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn min_opt(acc: Option<f64>, x: Option<f64>) -> Option<f64> {
    match (acc, x) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn absorb(stats: &mut VerificationStats, records: Vec<Record>) {
    let mut groups: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry(r.group).or_default().push(r.form);
        stats.violations += r.violation as usize;
        stats.max_identity_residual = max_opt(stats.max_identity_residual, r.identity_residual);
        stats.max_reconstruction_error = max_opt(stats.max_reconstruction_error, r.reconstruction_error);
        stats.min_reconstruction_eigenvalue = min_opt(stats.min_reconstruction_eigenvalue, r.min_eigenvalue);
        stats.max_trace_error = max_opt(stats.max_trace_error, r.trace_error);
        stats.max_forward_residual = max_opt(stats.max_forward_residual, r.forward_residual);
        stats.max_slice_tightness_residual = max_opt(stats.max_slice_tightness_residual, r.tightness);
    }
    stats.forms = groups
        .into_iter()
        .map(|(k, v)| (k, FormStats::from_values(&v)))
        .collect();
}

fn require_kind(e: &Ensemble, kind: EnsembleKind) -> Result<()> {
    if e.kind() != kind {
        return Err(Error::InvalidEnsemble(format!("expected a {kind}, got a {}", e.kind())));
    }
    Ok(())
}

/// Every state must land inside `E_1`. Even samples are Haar-pure, odd
/// samples mixed with a uniformly drawn rank.
pub fn verify_outer_measurement(e: &Ensemble, samples: usize, seed: u64, tol: &Tolerances) -> Result<VerificationStats> {
    require_kind(e, EnsembleKind::Measurement)?;
    let approx = EllipsoidApprox::new(e, 1.0, tol)?;
    let ic = approx.is_informationally_complete();
    let d = e.dim();
    let df = d as f64;
    let records: Vec<Record> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Record> {
            let mut rng = stream_rng(seed, i as u64);
            let (group, kind) = if i % 2 == 0 {
                ("haar_pure", SampleKind::HaarPure)
            } else {
                ("mixed", SampleKind::Mixed { rank: rng.random_range(1..=d) })
            };
            let rho = sample(kind, d, &mut rng)?;
            let p = e.probabilities(&rho)?;
            let form = approx.form(&p);
            let mut record = Record {
                group,
                form,
                violation: form > 1.0 + VIOLATION_SLACK,
                ..Default::default()
            };
            if ic {
                let expected = df / (df - 1.0) * (rho.purity() - 1.0 / df);
                record.identity_residual = Some((form - expected).abs());
                let back = approx.reconstruct_state(&p, tol)?;
                record.reconstruction_error = Some(back.frobenius_distance(&rho));
            }
            Ok(record)
        })
        .collect::<Result<_>>()?;
    let mut stats = VerificationStats::empty(e, "outer", samples, seed, ic);
    absorb(&mut stats, records);
    Ok(stats)
}

/// Every point on the boundary of `E_{d−1}` must reconstruct to a state.
/// Skipped for measurements that are not informationally complete.
pub fn verify_inner_measurement(e: &Ensemble, samples: usize, seed: u64, tol: &Tolerances) -> Result<VerificationStats> {
    require_kind(e, EnsembleKind::Measurement)?;
    let d = e.dim();
    let df = d as f64;
    let approx = EllipsoidApprox::new(e, (df - 1.0).max(1.0), tol)?;
    let ic = approx.is_informationally_complete();
    let mut stats = VerificationStats::empty(e, "inner", samples, seed, ic);
    if !ic {
        stats.skipped = Some(format!(
            "centred rank {} < {}: the inner ellipsoid is only guaranteed for informationally complete measurements",
            approx.rank(),
            d * d - 1
        ));
        return Ok(stats);
    }
    let bound = approx.bound();
    let records: Vec<Record> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Record> {
            let mut rng = stream_rng(seed, i as u64);
            let g = gaussian_vector(e.len(), &mut rng);
            let v = &approx.pinv().range_projector * g;
            let scale = (bound / approx.pinv().quadratic_form(&v)).sqrt();
            let p = approx.center() + v * scale;
            let rho = approx.reconstruct_state(&p, tol)?;
            let min_eigenvalue = rho.min_eigenvalue();
            let forward = (e.probabilities(&rho)? - &p).amax();
            Ok(Record {
                group: "inner_boundary",
                form: approx.form(&p),
                violation: min_eigenvalue < -EIGENVALUE_SLACK,
                min_eigenvalue: Some(min_eigenvalue),
                trace_error: Some((rho.trace() - 1.0).abs()),
                forward_residual: Some(forward),
                ..Default::default()
            })
        })
        .collect::<Result<_>>()?;
    absorb(&mut stats, records);
    Ok(stats)
}

/// Every effect must land in the d-cone at `r = 1`, and every trace-`k`
/// projector in slice `k`. Even samples are random effects, odd samples
/// Haar projectors of a uniformly drawn trace.
pub fn verify_states_cone(e: &Ensemble, samples: usize, seed: u64, tol: &Tolerances) -> Result<VerificationStats> {
    require_kind(e, EnsembleKind::StateFamily)?;
    let approx = DConeApprox::new(e, 1.0, tol)?;
    let ic = approx.is_informationally_complete();
    let d = e.dim();
    let records: Vec<Record> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Record> {
            let mut rng = stream_rng(seed, i as u64);
            if i % 2 == 0 {
                let effect = sample(SampleKind::RandomEffect, d, &mut rng)?;
                let q = e.probabilities(&effect)?;
                let report = approx.membership(&q, tol)?;
                Ok(Record {
                    group: "random_effect",
                    form: report.form,
                    violation: !report.verdict.is_member() && report.form > 1.0 + VIOLATION_SLACK,
                    ..Default::default()
                })
            } else {
                let k = rng.random_range(0..=d);
                let proj = sample(SampleKind::Projector { trace: k }, d, &mut rng)?;
                let q = e.probabilities(&proj)?;
                let report = approx.slice_membership(&q, k, tol)?;
                let interior = k > 0 && k < d;
                Ok(Record {
                    group: "projector_slice",
                    form: report.form,
                    violation: !report.verdict.is_member() && report.form > 1.0 + VIOLATION_SLACK,
                    tightness: (ic && interior).then(|| (report.form - 1.0).abs()),
                    ..Default::default()
                })
            }
        })
        .collect::<Result<_>>()?;
    let mut stats = VerificationStats::empty(e, "states_cone", samples, seed, ic);
    absorb(&mut stats, records);
    Ok(stats)
}

/// Runs the checks that apply to the ensemble's kind.
pub fn verify_all(e: &Ensemble, samples: usize, seed: u64, tol: &Tolerances) -> Result<Vec<VerificationStats>> {
    match e.kind() {
        EnsembleKind::Measurement => Ok(vec![
            verify_outer_measurement(e, samples, seed, tol)?,
            verify_inner_measurement(e, samples, seed, tol)?,
        ]),
        EnsembleKind::StateFamily => Ok(vec![verify_states_cone(e, samples, seed, tol)?]),
    }
}

/// Result of the brute-force d-cone oracle.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum OracleOutcome {
    /// Explicit convex combination of slice points reproducing the query.
    Member {
        weights: Vec<(usize, f64)>,
        points: Vec<Vec<f64>>,
    },
    /// A direction along which the query exceeds the support function.
    Nonmember { direction: Vec<f64>, margin: f64 },
    Inconclusive,
}

/// d-cone membership decided without the concave-envelope reduction.
///
/// The member search scans the axis position, evaluates the best radial
/// reach by enumerating all pairs of slices that straddle it and, on
/// success, writes down explicit points of those slices and checks them
/// directly. The non-member search hill-climbs on `a·q − h(a)`.
#[derive(Debug, Clone)]
pub struct DConeOracle {
    d: usize,
    r: f64,
    g: DMatrix<f64>,
    g_pinv: DMatrix<f64>,
    range_projector: DMatrix<f64>,
    coefficients: Vec<f64>,
    grid: usize,
    directions: usize,
}

impl DConeOracle {
    pub fn new(e: &Ensemble, r: f64) -> Result<Self> {
        require_kind(e, EnsembleKind::StateFamily)?;
        let d = e.dim();
        let df = d as f64;
        let g = e.gram().matrix.map(|x| x - 1.0 / df);
        let svd = g.clone().svd(true, true);
        let top = svd.singular_values.max();
        let eps = 1e-10 * top.max(1e-300);
        let g_pinv = svd
            .clone()
            .pseudo_inverse(eps)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let mut range_projector = DMatrix::zeros(g.nrows(), g.nrows());
        for (j, s) in svd.singular_values.iter().enumerate() {
            if *s > eps {
                let col = u.column(j);
                range_projector += &col * col.transpose();
            }
        }
        let coefficients = (0..=d).map(|k| k as f64 - (k * k) as f64 / df).collect();
        Ok(Self {
            d,
            r,
            g,
            g_pinv,
            range_projector,
            coefficients,
            grid: 4000,
            directions: 3000,
        })
    }

    fn n(&self) -> usize {
        self.g.nrows()
    }

    fn axis(&self, kappa: f64) -> DVector<f64> {
        DVector::from_element(self.n(), kappa / self.d as f64)
    }

    fn reach(&self, k: usize) -> f64 {
        self.coefficients[k].max(0.0).sqrt() / self.r
    }

    /// Best `Σ λ_k √c_k / r` with `Σ λ_k k = κ`, attained on two slices.
    fn best_pair(&self, kappa: f64) -> (f64, usize, usize, f64) {
        let mut best = (f64::NEG_INFINITY, 0, 0, 1.0);
        for j in 0..=self.d {
            for k in j..=self.d {
                let (jf, kf) = (j as f64, k as f64);
                if kappa < jf - 1e-12 || kappa > kf + 1e-12 {
                    continue;
                }
                let lambda_j = if k == j { 1.0 } else { ((kf - kappa) / (kf - jf)).clamp(0.0, 1.0) };
                let s = lambda_j * self.reach(j) + (1.0 - lambda_j) * self.reach(k);
                if s > best.0 {
                    best = (s, j, k, lambda_j);
                }
            }
        }
        best
    }

    fn objective(&self, q: &DVector<f64>, kappa: f64) -> f64 {
        let w = q - self.axis(kappa);
        let off = (&w - &self.range_projector * &w).norm();
        let f = w.dot(&(&self.g_pinv * &w)).max(0.0).sqrt();
        off + (f - self.best_pair(kappa).0).max(0.0)
    }

    fn support(&self, a: &DVector<f64>) -> f64 {
        let radial = a.dot(&(&self.g * a)).max(0.0).sqrt();
        let axial = a.sum() / self.d as f64;
        (0..=self.d)
            .map(|k| k as f64 * axial + self.reach(k) * radial)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn try_member(&self, q: &DVector<f64>, tol: f64) -> Option<OracleOutcome> {
        let df = self.d as f64;
        let mut best = (f64::INFINITY, 0.0);
        for s in 0..=self.grid {
            let kappa = df * s as f64 / self.grid as f64;
            let v = self.objective(q, kappa);
            if v < best.0 {
                best = (v, kappa);
            }
        }
        let mut step = df / self.grid as f64;
        while step > 1e-13 {
            let mut moved = false;
            for cand in [best.1 - step, best.1 + step] {
                if (0.0..=df).contains(&cand) {
                    let v = self.objective(q, cand);
                    if v < best.0 {
                        best = (v, cand);
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        let kappa = best.1;
        let (reach, j, k, lambda_j) = self.best_pair(kappa);
        let w = q - self.axis(kappa);
        let y = if reach > 0.0 { &w / reach } else { DVector::zeros(self.n()) };
        let point = |m: usize| self.axis(m as f64) + &y * self.reach(m);
        let (pj, pk) = (point(j), point(k));
        // Each point must lie in its slice and the mixture must give back q.
        let in_slice = |p: &DVector<f64>, m: usize| {
            let c = self.axis(m as f64);
            let dev = p - c;
            let off = (&dev - &self.range_projector * &dev).norm();
            let form = dev.dot(&(&self.g_pinv * &dev));
            off <= tol && form <= self.coefficients[m] / (self.r * self.r) * (1.0 + tol) + tol * tol
        };
        let mix = &pj * lambda_j + &pk * (1.0 - lambda_j);
        if in_slice(&pj, j) && in_slice(&pk, k) && (mix - q).amax() <= tol {
            let mut weights = vec![(j, lambda_j)];
            let mut points = vec![pj.iter().copied().collect()];
            if k != j {
                weights.push((k, 1.0 - lambda_j));
                points.push(pk.iter().copied().collect());
            }
            return Some(OracleOutcome::Member { weights, points });
        }
        None
    }

    fn try_nonmember(&self, q: &DVector<f64>, seed: u64, tol: f64) -> Option<OracleOutcome> {
        let n = self.n();
        let margin = |a: &DVector<f64>| a.dot(q) - self.support(a);
        let mut rng = rng_from_seed(seed);
        let mut candidates: Vec<DVector<f64>> = Vec::new();
        let u = DVector::from_element(n, 1.0);
        candidates.push(&u / (n as f64).sqrt());
        candidates.push(-&u / (n as f64).sqrt());
        let off = q - &self.range_projector * q;
        candidates.push(off.clone());
        candidates.push(-off);
        for s in 0..=16 {
            let w = q - self.axis(self.d as f64 * s as f64 / 16.0);
            candidates.push(&self.g_pinv * &w);
            candidates.push(w);
        }
        for _ in 0..self.directions {
            candidates.push(unit_vector(n, &mut rng));
        }
        let mut best: Option<(f64, DVector<f64>)> = None;
        for c in candidates {
            let norm = c.norm();
            if norm < 1e-12 {
                continue;
            }
            let a = c / norm;
            let m = margin(&a);
            if best.as_ref().map_or(true, |(bm, _)| m > *bm) {
                best = Some((m, a));
            }
        }
        let (mut best_margin, mut a) = best?;
        let mut sigma = 0.3;
        while sigma > 1e-7 {
            let mut improved = false;
            for _ in 0..20 {
                let trial = &a + gaussian_vector(n, &mut rng) * sigma;
                let trial = &trial / trial.norm();
                let m = margin(&trial);
                if m > best_margin {
                    best_margin = m;
                    a = trial;
                    improved = true;
                }
            }
            if !improved {
                sigma *= 0.5;
            }
        }
        (best_margin > tol).then(|| OracleOutcome::Nonmember {
            direction: a.iter().copied().collect(),
            margin: best_margin,
        })
    }

    /// Membership of `q` with explicit evidence either way.
    pub fn decide(&self, q: &DVector<f64>, seed: u64) -> Result<OracleOutcome> {
        if q.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: q.len(),
            });
        }
        if let Some(found) = self.try_member(q, 1e-9) {
            return Ok(found);
        }
        Ok(self.try_nonmember(q, seed, 1e-10).unwrap_or(OracleOutcome::Inconclusive))
    }
}

/// Query points concentrated around the d-cone boundary: a random axis
/// position, a random `G⁺`-unit direction in `range(G)` scaled by a factor
/// in `[0, 1.6]` of the envelope reach, mixed with uniform points of the
/// box `[−0.1, 1.1]ⁿ`.
pub fn cone_probe_points(approx: &DConeApprox, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = rng_from_seed(seed);
    let n = approx.n();
    let d = approx.dim() as f64;
    (0..count)
        .map(|i| {
            if i % 4 == 3 {
                return DVector::from_fn(n, |_, _| rng.random_range(-0.1..1.1));
            }
            let kappa = rng.random_range(0.0..=d);
            let v = &approx.pinv().range_projector * gaussian_vector(n, &mut rng);
            let norm = approx.pinv().quadratic_form(&v).sqrt();
            let factor = rng.random_range(0.0..=1.6);
            let reach = approx.envelope(kappa);
            let y = if norm > 0.0 { v / norm } else { DVector::zeros(n) };
            DVector::from_element(n, kappa / d) + y * (factor * reach)
        })
        .collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleAgreement {
    pub compared: usize,
    pub agree: usize,
    pub disagree: usize,
    /// Oracle found no evidence either way; counted as disagreement.
    pub inconclusive: usize,
    /// Queries within the boundary band, left out of the comparison.
    pub excluded: usize,
}

impl OracleAgreement {
    pub fn rate(&self) -> f64 {
        if self.compared == 0 {
            return 1.0;
        }
        self.agree as f64 / self.compared as f64
    }
}

/// Compares [`DConeApprox::membership`] with [`DConeOracle`] on `points`,
/// skipping queries whose form lies within `band` of the bound.
pub fn compare_with_oracle(
    approx: &DConeApprox,
    points: &[DVector<f64>],
    band: f64,
    seed: u64,
    tol: &Tolerances,
) -> Result<OracleAgreement> {
    let oracle = DConeOracle::new(approx.ensemble(), approx.scale())?;
    let outcomes: Vec<Option<bool>> = points
        .par_iter()
        .enumerate()
        .map(|(i, q)| -> Result<Option<bool>> {
            let report = approx.membership(q, tol)?;
            if (report.form - report.bound).abs() <= band {
                return Ok(None);
            }
            let claimed = report.verdict.is_member();
            let agrees = match oracle.decide(q, seed.wrapping_add(i as u64))? {
                OracleOutcome::Member { .. } => claimed,
                OracleOutcome::Nonmember { .. } => !claimed,
                OracleOutcome::Inconclusive => false,
            };
            Ok(Some(agrees))
        })
        .collect::<Result<_>>()?;
    let mut agreement = OracleAgreement::default();
    for o in outcomes {
        match o {
            None => agreement.excluded += 1,
            Some(true) => {
                agreement.compared += 1;
                agreement.agree += 1;
            }
            Some(false) => {
                agreement.compared += 1;
                agreement.disagree += 1;
            }
        }
    }
    Ok(agreement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::builtin;

    #[test]
    fn outer_check_on_the_qubit_sic() {
        let e = builtin("sic(2)").unwrap();
        let stats = verify_outer_measurement(&e, 400, 1, &Tolerances::default()).unwrap();
        assert!(stats.passed());
        assert_eq!(stats.forms["haar_pure"].count, 200);
        assert!((stats.forms["haar_pure"].max - 1.0).abs() < 1e-9);
        assert!(stats.max_identity_residual.unwrap() < 1e-9);
        assert!(stats.max_reconstruction_error.unwrap() < 1e-9);
    }

    #[test]
    fn inner_check_skips_incomplete_measurements() {
        let e = builtin("trine").unwrap();
        let stats = verify_inner_measurement(&e, 10, 1, &Tolerances::default()).unwrap();
        assert!(stats.skipped.is_some());
        assert!(stats.forms.is_empty());
    }

    #[test]
    fn inner_check_on_qutrit_sic() {
        let e = builtin("sic(3)").unwrap();
        let stats = verify_inner_measurement(&e, 200, 2, &Tolerances::default()).unwrap();
        assert!(stats.passed());
        assert!(stats.min_reconstruction_eigenvalue.unwrap() > -1e-8);
        assert!(stats.max_trace_error.unwrap() < 1e-9);
        assert!(stats.max_forward_residual.unwrap() < 1e-9);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let e = builtin("mub-states(3)").unwrap();
        let tol = Tolerances::default();
        let a = verify_states_cone(&e, 100, 9, &tol).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| verify_states_cone(&e, 100, 9, &tol).unwrap());
        assert_eq!(a.forms, b.forms);
        assert!(a.passed());
        assert!(a.max_slice_tightness_residual.unwrap() < 1e-9);
    }

    #[test]
    fn oracle_agrees_on_simple_points() {
        let e = builtin("sic-states(2)").unwrap();
        let oracle = DConeOracle::new(&e, 1.0).unwrap();
        let half = DVector::from_element(4, 0.5);
        assert!(matches!(oracle.decide(&half, 0).unwrap(), OracleOutcome::Member { .. }));
        let beyond = DVector::from_element(4, 1.2);
        match oracle.decide(&beyond, 0).unwrap() {
            OracleOutcome::Nonmember { margin, .. } => assert!(margin > 0.1),
            other => panic!("expected nonmember, got {other:?}"),
        }
    }

    #[test]
    fn oracle_agreement_on_probe_points() {
        let e = builtin("mub-states(3)").unwrap();
        let tol = Tolerances::default();
        let approx = DConeApprox::new(&e, 1.0, &tol).unwrap();
        let probes = cone_probe_points(&approx, 60, 4);
        let agreement = compare_with_oracle(&approx, &probes, 1e-6, 5, &tol).unwrap();
        assert_eq!(agreement.disagree, 0, "{agreement:?}");
    }
}
