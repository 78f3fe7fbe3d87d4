//! Exact H-representation of the convex hull of a point cloud of low affine
//! dimension.
//!
//! The cloud is projected onto its affine hull, an incremental
//! (beneath–beyond) hull is built there, and the facets are lifted back
//! together with the equalities that cut out the affine hull.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::operator::symmetric_eigen_sorted;
use crate::sample::rng_from_seed;

pub const DEFAULT_FACET_DIM_LIMIT: usize = 4;

/// Facets whose unit normals differ by less than this are merged.
pub const FACET_ANGLE_TOL: f64 = 1e-9;

/// `normal·x ≤ offset` (or `=` when used as an equality), with unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn excess(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

#[derive(Debug, Clone)]
pub struct AffineHull {
    pub origin: DVector<f64>,
    /// Orthonormal columns spanning the hull directions.
    pub basis: DMatrix<f64>,
    /// Orthonormal columns spanning the orthogonal complement.
    pub complement: DMatrix<f64>,
}

impl AffineHull {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn project(&self, x: &DVector<f64>) -> Vec<f64> {
        self.basis.tr_mul(&(x - &self.origin)).iter().copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct HullFacets {
    pub halfspaces: Vec<HalfSpace>,
    pub equalities: Vec<HalfSpace>,
    pub affine_dim: usize,
}

impl HullFacets {
    /// Largest violation of any constraint by `x`.
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        let ineq = self.halfspaces.iter().map(|h| h.excess(x));
        let eq = self.equalities.iter().map(|h| h.excess(x).abs());
        ineq.chain(eq).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_points(points: &[DVector<f64>]) -> Result<usize> {
    let n = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::InvalidParameter("empty point cloud".into()))?;
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
    }
    Ok(n)
}

/// Affine hull through the Gram (scatter) matrix of the centred cloud.
pub fn affine_hull(points: &[DVector<f64>]) -> Result<AffineHull> {
    let n = check_points(points)?;
    let origin = points.iter().fold(DVector::zeros(n), |acc, p| acc + p) / points.len() as f64;
    let mut scatter = DMatrix::zeros(n, n);
    for p in points {
        let c = p - &origin;
        scatter += &c * c.transpose();
    }
    let (values, vectors) = symmetric_eigen_sorted(&scatter);
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = 1e-20f64.max(1e-12 * top);
    let m = values.iter().take_while(|&&l| l > cutoff).count();
    Ok(AffineHull {
        origin,
        basis: vectors.columns(0, m).into_owned(),
        complement: vectors.columns(m, n - m).into_owned(),
    })
}

/// Facets of `conv(points)` inside its affine hull, plus the affine-hull
/// equalities. Fails with [`Error::HullDimension`] above `facet_dim_limit`.
pub fn hull_facets(points: &[DVector<f64>], facet_dim_limit: usize) -> Result<HullFacets> {
    let aff = affine_hull(points)?;
    let m = aff.dim();
    if m > facet_dim_limit {
        return Err(Error::HullDimension {
            dim: m,
            limit: facet_dim_limit,
        });
    }
    let projected: Vec<Vec<f64>> = points.iter().map(|p| aff.project(p)).collect();
    let local = match m {
        0 => Vec::new(),
        1 => {
            let (lo, hi) = projected
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
            vec![(vec![1.0], hi), (vec![-1.0], -lo)]
        }
        _ => incremental_hull(&projected, m),
    };
    let halfspaces = dedup(
        local
            .into_iter()
            .map(|(normal, offset)| {
                let lifted = &aff.basis * DVector::from_vec(normal);
                let offset = offset + lifted.dot(&aff.origin);
                HalfSpace {
                    normal: lifted,
                    offset,
                }
            })
            .collect(),
    );
    let equalities = aff
        .complement
        .column_iter()
        .map(|c| HalfSpace {
            normal: c.into_owned(),
            offset: c.dot(&aff.origin),
        })
        .collect();
    Ok(HullFacets {
        halfspaces,
        equalities,
        affine_dim: m,
    })
}

fn dedup(halfspaces: Vec<HalfSpace>) -> Vec<HalfSpace> {
    let mut kept: Vec<HalfSpace> = Vec::with_capacity(halfspaces.len());
    'outer: for h in halfspaces {
        for k in &kept {
            if (&k.normal - &h.normal).norm() < FACET_ANGLE_TOL {
                // Same direction: keep the looser offset so no point is cut off.
                continue 'outer;
            }
        }
        kept.push(h);
    }
    kept
}

struct Facet {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    alive: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit normal of the hyperplane through `m` points in `ℝᵐ` by cofactor
/// expansion; `None` when the points are affinely dependent.
fn hyperplane_normal(pts: &[&[f64]]) -> Option<Vec<f64>> {
    let m = pts[0].len();
    let rows: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut normal = Vec::with_capacity(m);
    for skip in 0..m {
        let minor = DMatrix::from_fn(m - 1, m - 1, |r, c| {
            let col = if c < skip { c } else { c + 1 };
            rows[r][col]
        });
        let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
        normal.push(sign * minor.determinant());
    }
    let norm = dot(&normal, &normal).sqrt();
    let scale = rows.iter().map(|r| dot(r, r).sqrt()).fold(1e-300, f64::max);
    if norm <= 1e-14 * scale.powi(m as i32 - 1) {
        return None;
    }
    Some(normal.into_iter().map(|x| x / norm).collect())
}

fn make_facet(points: &[Vec<f64>], verts: Vec<usize>, interior: &[f64]) -> Option<Facet> {
    let pts: Vec<&[f64]> = verts.iter().map(|&i| points[i].as_slice()).collect();
    let mut normal = hyperplane_normal(&pts)?;
    let mut offset = dot(&normal, pts[0]);
    if dot(&normal, interior) > offset {
        normal.iter_mut().for_each(|x| *x = -*x);
        offset = -offset;
    }
    Some(Facet {
        verts,
        normal,
        offset,
        alive: true,
    })
}

/// Index of the point farthest from the affine span of `chosen`.
fn farthest_from_span(points: &[Vec<f64>], chosen: &[usize]) -> usize {
    let base = &points[chosen[0]];
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for &c in &chosen[1..] {
        let mut v: Vec<f64> = points[c].iter().zip(base).map(|(a, b)| a - b).collect();
        for d in &dirs {
            let proj = dot(&v, d);
            v.iter_mut().zip(d).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 0.0 {
            dirs.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut best = (0, -1.0);
    for (i, p) in points.iter().enumerate() {
        let mut v: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        for d in &dirs {
            let proj = dot(&v, d);
            v.iter_mut().zip(d).for_each(|(x, y)| *x -= proj * y);
        }
        let dist = dot(&v, &v);
        if dist > best.1 {
            best = (i, dist);
        }
    }
    best.0
}

/// Beneath–beyond hull of a full-dimensional cloud in `ℝᵐ`, `m ≥ 2`.
fn incremental_hull(points: &[Vec<f64>], m: usize) -> Vec<(Vec<f64>, f64)> {
    let extent = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    let eps = 1e-11 * extent;

    let first = (0..points.len())
        .min_by(|&a, &b| points[a][0].total_cmp(&points[b][0]))
        .unwrap_or(0);
    let mut simplex = vec![first];
    while simplex.len() < m + 1 {
        let next = farthest_from_span(points, &simplex);
        simplex.push(next);
    }
    let interior: Vec<f64> = (0..m)
        .map(|j| simplex.iter().map(|&i| points[i][j]).sum::<f64>() / (m + 1) as f64)
        .collect();

    let mut facets: Vec<Facet> = (0..=m)
        .filter_map(|skip| {
            let verts = simplex
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            make_facet(points, verts, &interior)
        })
        .collect();

    let mut order: Vec<usize> = (0..points.len()).filter(|i| !simplex.contains(i)).collect();
    order.shuffle(&mut rng_from_seed(0x5eed));

    let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
    for idx in order {
        let p = &points[idx];
        let visible: Vec<usize> = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && dot(&f.normal, p) - f.offset > eps)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        ridge_count.clear();
        for &fi in &visible {
            let verts = &facets[fi].verts;
            for skip in 0..verts.len() {
                let mut ridge: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }
        for &fi in &visible {
            facets[fi].alive = false;
        }
        let horizon: Vec<Vec<usize>> = ridge_count
            .iter()
            .filter(|&(_, &c)| c == 1)
            .map(|(r, _)| r.clone())
            .collect();
        for mut ridge in horizon {
            ridge.push(idx);
            if let Some(f) = make_facet(points, ridge, &interior) {
                facets.push(f);
            }
        }
        if facets.len() > 4 * points.len().max(64) {
            facets.retain(|f| f.alive);
        }
    }
    facets
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| (f.normal, f.offset))
        .collect()
}
