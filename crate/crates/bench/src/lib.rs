//! Benchmark fixtures shared by the criterion targets.

use qregion_core::sample::{rng_from_seed, sample, SampleKind};
use qregion_core::{Ensemble, EnsembleKind, ProbabilityCloud};

/// Forward images of `count` sampled operators: Haar-pure states for
/// measurements, projectors of random trace for state families.
pub fn image_cloud(e: &Ensemble, count: usize, seed: u64) -> ProbabilityCloud {
    let mut rng = rng_from_seed(seed);
    let kind = match e.kind() {
        EnsembleKind::Measurement => SampleKind::HaarPure,
        EnsembleKind::StateFamily => SampleKind::RandomProjector,
    };
    let points = (0..count)
        .map(|_| {
            let op = sample(kind, e.dim(), &mut rng).expect("valid sampler");
            e.probabilities(&op).expect("matching dimension")
        })
        .collect();
    let normalized = e.kind() == EnsembleKind::Measurement;
    ProbabilityCloud::new(points, normalized, 1e-9).expect("images are probabilities")
}
