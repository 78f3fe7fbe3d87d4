//! Sufficient test for simulating one device by another.
//!
//! If the outer approximation of a reference ensemble lies inside the convex
//! hull of the probability vectors a second device produced, then a positive
//! map carries the reference to the observed device. The test compares
//! support functions: exactly against the hull facets when the cloud has low
//! affine dimension, and along sampled directions otherwise.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleKind;
use crate::error::{Error, Result};
use crate::hull::{hull_facets, DEFAULT_FACET_DIM_LIMIT};
use crate::region::{DConeApprox, EllipsoidApprox};
use crate::sample::{rng_from_seed, unit_vector};

/// Observed probability vectors, one point per row.
#[derive(Debug, Clone)]
pub struct ProbabilityCloud {
    points: Vec<DVector<f64>>,
    normalized: bool,
}

impl ProbabilityCloud {
    /// Entries must lie in `[-tol, 1 + tol]`; with `normalized` every row
    /// must also sum to one within `tol`.
    pub fn new(points: Vec<DVector<f64>>, normalized: bool, tol: f64) -> Result<Self> {
        let n = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::InvalidParameter("empty probability cloud".into()))?;
        if n == 0 {
            return Err(Error::InvalidParameter("probability vectors are empty".into()));
        }
        for (row, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.len(),
                });
            }
            if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -tol || **x > 1.0 + tol) {
                return Err(Error::InvalidParameter(format!(
                    "row {row}: entry {x} is not a probability"
                )));
            }
            if normalized && (p.sum() - 1.0).abs() > tol {
                return Err(Error::InvalidParameter(format!(
                    "row {row}: entries sum to {}, expected 1",
                    p.sum()
                )));
            }
        }
        Ok(Self { points, normalized })
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn support(&self, a: &DVector<f64>) -> f64 {
        self.points
            .iter()
            .map(|p| a.dot(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Anything with a support function `h(a) = max_{x ∈ K} a·x`.
pub trait SupportFunction {
    fn ambient_dim(&self) -> usize;
    fn support(&self, a: &DVector<f64>) -> f64;
}

impl SupportFunction for EllipsoidApprox {
    fn ambient_dim(&self) -> usize {
        self.n()
    }
    fn support(&self, a: &DVector<f64>) -> f64 {
        EllipsoidApprox::support(self, a)
    }
}

impl SupportFunction for DConeApprox {
    fn ambient_dim(&self) -> usize {
        self.n()
    }
    fn support(&self, a: &DVector<f64>) -> f64 {
        DConeApprox::support(self, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentVerdict {
    Contained,
    Violated,
    InconclusivePass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentMode {
    /// Facets when the hull dimension allows, sampled directions otherwise.
    Auto,
    Facets,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentMethod {
    Facets,
    SampledDirections,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub direction: Vec<f64>,
    pub hull_support: f64,
    pub body_support: f64,
    /// `body_support - hull_support`; positive beyond `slack` is a violation.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentCertificate {
    pub verdict: ContainmentVerdict,
    pub method: ContainmentMethod,
    pub slack: f64,
    pub hull_affine_dim: Option<usize>,
    pub directions_checked: usize,
    pub max_margin: f64,
    pub witnesses: Vec<Witness>,
    pub conclusion: String,
}

#[derive(Debug, Clone)]
pub struct ContainmentOptions {
    pub slack: f64,
    pub mode: ContainmentMode,
    pub facet_dim_limit: usize,
    pub directions: usize,
    pub seed: u64,
    pub max_witnesses: usize,
}

impl Default for ContainmentOptions {
    fn default() -> Self {
        Self {
            slack: 0.0,
            mode: ContainmentMode::Auto,
            facet_dim_limit: DEFAULT_FACET_DIM_LIMIT,
            directions: 10_000,
            seed: 0,
            max_witnesses: 8,
        }
    }
}

struct Check {
    margin: f64,
    witness: Witness,
}

fn check_direction<B: SupportFunction + ?Sized>(body: &B, a: &DVector<f64>, hull_support: f64) -> Check {
    let body_support = body.support(a);
    let margin = body_support - hull_support;
    Check {
        margin,
        witness: Witness {
            direction: a.iter().copied().collect(),
            hull_support,
            body_support,
            margin,
        },
    }
}

fn facet_directions(cloud: &ProbabilityCloud, limit: usize) -> Result<(usize, Vec<(DVector<f64>, f64)>)> {
    let facets = hull_facets(cloud.points(), limit)?;
    let mut dirs = Vec::with_capacity(facets.halfspaces.len() + 2 * facets.equalities.len());
    for h in &facets.halfspaces {
        dirs.push((h.normal.clone(), h.offset));
    }
    for h in &facets.equalities {
        dirs.push((h.normal.clone(), h.offset));
        dirs.push((-&h.normal, -h.offset));
    }
    Ok((facets.affine_dim, dirs))
}

fn sampled_directions(cloud: &ProbabilityCloud, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = rng_from_seed(seed);
    let n = cloud.n();
    let mut dirs: Vec<DVector<f64>> = (0..count).map(|_| unit_vector(n, &mut rng)).collect();
    // Differences of observed points probe the directions the cloud spans.
    let pairs = if cloud.len() > 1 { count.min(cloud.len() * 4) } else { 0 };
    for _ in 0..pairs {
        let i = rng.random_range(0..cloud.len());
        let j = rng.random_range(0..cloud.len());
        let diff = &cloud.points()[i] - &cloud.points()[j];
        let norm = diff.norm();
        if norm > 1e-12 {
            dirs.push(diff / norm);
        }
    }
    dirs
}

/// Support-function comparison of `body` against `conv(cloud)`.
pub fn contained_in_hull<B: SupportFunction + ?Sized>(
    body: &B,
    cloud: &ProbabilityCloud,
    opts: &ContainmentOptions,
) -> Result<ContainmentCertificate> {
    if body.ambient_dim() != cloud.n() {
        return Err(Error::DimensionMismatch {
            expected: body.ambient_dim(),
            found: cloud.n(),
        });
    }
    if !(opts.slack >= 0.0) {
        return Err(Error::InvalidParameter("slack must be non-negative".into()));
    }

    let facet_attempt = match opts.mode {
        ContainmentMode::Sampled => None,
        ContainmentMode::Facets => Some(facet_directions(cloud, opts.facet_dim_limit)?),
        ContainmentMode::Auto => match facet_directions(cloud, opts.facet_dim_limit) {
            Ok(found) => Some(found),
            Err(Error::HullDimension { .. }) => None,
            Err(e) => return Err(e),
        },
    };

    let (method, hull_affine_dim, checks): (_, _, Vec<Check>) = match facet_attempt {
        Some((affine_dim, dirs)) => (
            ContainmentMethod::Facets,
            Some(affine_dim),
            dirs.iter()
                .map(|(a, offset)| {
                    // The facet offset equals the cloud support up to round-off;
                    // the latter is what a witness should report.
                    let hull = cloud.support(a).max(*offset);
                    check_direction(body, a, hull)
                })
                .collect(),
        ),
        None => (
            ContainmentMethod::SampledDirections,
            None,
            sampled_directions(cloud, opts.directions, opts.seed)
                .iter()
                .map(|a| check_direction(body, a, cloud.support(a)))
                .collect(),
        ),
    };

    let directions_checked = checks.len();
    let max_margin = checks.iter().map(|c| c.margin).fold(f64::NEG_INFINITY, f64::max);
    let mut violations: Vec<Check> = checks.into_iter().filter(|c| c.margin > opts.slack).collect();
    violations.sort_by(|a, b| b.margin.total_cmp(&a.margin));
    let verdict = if !violations.is_empty() {
        ContainmentVerdict::Violated
    } else if method == ContainmentMethod::Facets {
        ContainmentVerdict::Contained
    } else {
        ContainmentVerdict::InconclusivePass
    };
    let witnesses = violations
        .into_iter()
        .take(opts.max_witnesses)
        .map(|c| c.witness)
        .collect();
    Ok(ContainmentCertificate {
        verdict,
        method,
        slack: opts.slack,
        hull_affine_dim,
        directions_checked,
        max_margin,
        witnesses,
        conclusion: String::new(),
    })
}

fn conclusion(kind: EnsembleKind, verdict: ContainmentVerdict) -> String {
    let body = match kind {
        EnsembleKind::Measurement => "outer ellipsoid of the reference measurement",
        EnsembleKind::StateFamily => "outer cone of the reference family",
    };
    let map = match kind {
        EnsembleKind::Measurement => {
            "a trace-preserving linear map, positive on the states, turns the observed measurement \
             into a post-processing-free simulation of the reference"
        }
        EnsembleKind::StateFamily => {
            "a linear map, positive on the effects, relates the reference family to the observed \
             one (trace preservation is not implied)"
        }
    };
    match verdict {
        ContainmentVerdict::Contained => format!(
            "sufficient condition met: the {body} lies inside the hull of the observed vectors, so {map}; \
             complete positivity is not certified"
        ),
        ContainmentVerdict::Violated => format!(
            "sufficient condition not met: a witness direction separates the {body} from the observed hull; \
             this does not rule out a simulation"
        ),
        ContainmentVerdict::InconclusivePass => format!(
            "no sampled direction separates the {body} from the observed hull; containment is not certified"
        ),
    }
}

fn finish(mut cert: ContainmentCertificate, kind: EnsembleKind) -> ContainmentCertificate {
    cert.conclusion = conclusion(kind, cert.verdict);
    cert
}

/// Measurement side: `E₁ ⊆ conv(cloud)`.
pub fn ellipsoid_in_hull(
    approx: &EllipsoidApprox,
    cloud: &ProbabilityCloud,
    opts: &ContainmentOptions,
) -> Result<ContainmentCertificate> {
    Ok(finish(contained_in_hull(approx, cloud, opts)?, EnsembleKind::Measurement))
}

/// State-family side: outer cone `⊆ conv(cloud)`.
pub fn dcone_in_hull(
    approx: &DConeApprox,
    cloud: &ProbabilityCloud,
    opts: &ContainmentOptions,
) -> Result<ContainmentCertificate> {
    Ok(finish(contained_in_hull(approx, cloud, opts)?, EnsembleKind::StateFamily))
}
