//! Random states and effects.
//!
//! Every sampler is a pure function of its RNG. Parallel loops derive one
//! stream per task with [`stream_rng`].

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::{CMatrix, CVector, HermitianOperator};

/// Distribution to draw an operator from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// Rank-one projector, unitarily invariant.
    HaarPure,
    /// Unit-trace PSD operator of the given rank (induced measure).
    Mixed { rank: usize },
    /// Haar-rotated projector with the given trace.
    Projector { trace: usize },
    /// Haar-rotated projector with trace drawn uniformly from `0..=d`.
    RandomProjector,
    /// Convex mix of two projectors with independently drawn traces.
    RandomEffect,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniformly distributed unit vector in `ℝⁿ`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Haar-distributed unit vector in `ℂᵈ`.
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

/// Haar-distributed `d × d` unitary: QR of a Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn haar_projector<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> HermitianOperator {
    if k == 0 {
        return HermitianOperator::zeros(d);
    }
    if k == d {
        return HermitianOperator::identity(d);
    }
    let u = haar_unitary(d, rng);
    let cols = u.columns(0, k);
    HermitianOperator::from_matrix_unchecked(&cols * cols.adjoint())
}

pub fn sample<R: Rng + ?Sized>(kind: SampleKind, d: usize, rng: &mut R) -> Result<HermitianOperator> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    match kind {
        SampleKind::HaarPure => Ok(HermitianOperator::outer(&haar_vector(d, rng))),
        SampleKind::Mixed { rank } => {
            if rank == 0 || rank > d {
                return Err(Error::InvalidParameter(format!(
                    "rank must lie in 1..={d}, got {rank}"
                )));
            }
            let a = CMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
            let m = &a * a.adjoint();
            let tr = m.trace().re;
            Ok(HermitianOperator::from_matrix_unchecked(m.unscale(tr)))
        }
        SampleKind::Projector { trace } => {
            if trace > d {
                return Err(Error::InvalidParameter(format!(
                    "projector trace must lie in 0..={d}, got {trace}"
                )));
            }
            Ok(haar_projector(d, trace, rng))
        }
        SampleKind::RandomProjector => {
            let k = rng.random_range(0..=d);
            Ok(haar_projector(d, k, rng))
        }
        SampleKind::RandomEffect => {
            let k1 = rng.random_range(0..=d);
            let p1 = haar_projector(d, k1, rng);
            let k2 = rng.random_range(0..=d);
            let p2 = haar_projector(d, k2, rng);
            let w: f64 = rng.random();
            Ok(&p1.scale(w) + &p2.scale(1.0 - w))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_extremes() {
        let mut rng = rng_from_seed(1);
        let z = sample(SampleKind::Projector { trace: 0 }, 3, &mut rng).unwrap();
        assert_eq!(z, HermitianOperator::zeros(3));
        let id = sample(SampleKind::Projector { trace: 3 }, 3, &mut rng).unwrap();
        assert_eq!(id, HermitianOperator::identity(3));
    }

    #[test]
    fn invalid_parameters() {
        let mut rng = rng_from_seed(1);
        assert!(sample(SampleKind::Mixed { rank: 0 }, 3, &mut rng).is_err());
        assert!(sample(SampleKind::Mixed { rank: 4 }, 3, &mut rng).is_err());
        assert!(sample(SampleKind::Projector { trace: 4 }, 3, &mut rng).is_err());
        assert!(sample(SampleKind::HaarPure, 0, &mut rng).is_err());
    }

    #[test]
    fn pure_and_mixed_states() {
        let mut rng = rng_from_seed(7);
        for d in 2..=5 {
            for _ in 0..50 {
                let rho = sample(SampleKind::HaarPure, d, &mut rng).unwrap();
                assert!((rho.trace() - 1.0).abs() < 1e-9);
                assert!((rho.purity() - 1.0).abs() < 1e-9);
                for rank in 1..=d {
                    let rho = sample(SampleKind::Mixed { rank }, d, &mut rng).unwrap();
                    assert!((rho.trace() - 1.0).abs() < 1e-9);
                    let ev = rho.eigenvalues();
                    assert!(ev[d - 1] > -1e-10);
                    let numerical_rank = ev.iter().filter(|&&x| x > 1e-9).count();
                    assert_eq!(numerical_rank, rank);
                }
            }
        }
    }

    #[test]
    fn effects_have_spectrum_in_unit_interval() {
        let mut rng = rng_from_seed(11);
        for d in 2..=4 {
            for k in 0..=d {
                let p = sample(SampleKind::Projector { trace: k }, d, &mut rng).unwrap();
                assert!((p.trace() - k as f64).abs() < 1e-9);
                assert!((p.purity() - k as f64).abs() < 1e-9);
            }
            for _ in 0..200 {
                let e = sample(SampleKind::RandomEffect, d, &mut rng).unwrap();
                let ev = e.eigenvalues();
                assert!(ev[0] <= 1.0 + 1e-10 && ev[d - 1] >= -1e-10);
            }
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        let u = haar_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn haar_pure_mean_is_maximally_mixed() {
        let mut rng = rng_from_seed(2024);
        let draws = 100_000;
        let mut acc = CMatrix::zeros(2, 2);
        for _ in 0..draws {
            acc += sample(SampleKind::HaarPure, 2, &mut rng).unwrap().matrix();
        }
        let mean = acc.unscale(draws as f64);
        let target = CMatrix::identity(2, 2).unscale(2.0);
        assert!((mean - target).norm() < 0.01);
    }

    #[test]
    fn seeded_streams_are_deterministic() {
        let a = sample(SampleKind::RandomEffect, 3, &mut stream_rng(5, 9)).unwrap();
        let b = sample(SampleKind::RandomEffect, 3, &mut stream_rng(5, 9)).unwrap();
        assert_eq!(a, b);
        let c = sample(SampleKind::RandomEffect, 3, &mut stream_rng(5, 10)).unwrap();
        assert_ne!(a, c);
    }
}
