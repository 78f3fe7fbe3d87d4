//! Measurements (POVMs) and state families, and the closed-form SIC and MUB
//! constructions.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    pinv_gram, trace_product, CMatrix, CVector, HermitianOperator,
};
use crate::tolerance::{default_rank_cutoff, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Effects summing to the identity.
    Measurement,
    /// Unit-trace states.
    StateFamily,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleKind::Measurement => f.write_str("measurement"),
            EnsembleKind::StateFamily => f.write_str("state_family"),
        }
    }
}

/// An ordered family of Hermitian operators on `ℂᵈ`. Element order is part of
/// the identity: probability vectors are index-aligned with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    kind: EnsembleKind,
    dim: usize,
    elements: Vec<HermitianOperator>,
    label: String,
}

/// Pairwise Hilbert–Schmidt products and traces of an ensemble.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub matrix: DMatrix<f64>,
    pub traces: DVector<f64>,
}

/// Outcome of [`Ensemble::validate`]. Report-only; never an error.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub n: usize,
    pub label: String,
    pub valid: bool,
    pub min_eigenvalues: Vec<f64>,
    pub max_hermiticity_residual: f64,
    /// `‖Σπᵢ − 𝟙‖_F` for measurements.
    pub completeness_residual: Option<f64>,
    /// `|Tr ρᵢ − 1|` per element for state families.
    pub trace_residuals: Option<Vec<f64>>,
    pub centered_rank: usize,
    pub informationally_complete: bool,
    pub violations: Vec<String>,
}

impl Ensemble {
    /// Builds an ensemble after checking that it is non-empty and that all
    /// elements share one dimension. Physical validity is left to [`validate`].
    ///
    /// [`validate`]: Ensemble::validate
    pub fn new(
        kind: EnsembleKind,
        elements: Vec<HermitianOperator>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = elements
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::InvalidEnsemble("ensemble has no elements".into()))?;
        if dim == 0 {
            return Err(Error::InvalidEnsemble("zero-dimensional elements".into()));
        }
        for el in &elements {
            if el.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: el.dim(),
                });
            }
        }
        Ok(Self {
            kind,
            dim,
            elements,
            label: label.into(),
        })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The forward map: `(Tr[eᵢ·x])ᵢ`.
    pub fn probabilities(&self, x: &HermitianOperator) -> Result<DVector<f64>> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(DVector::from_iterator(
            self.len(),
            self.elements.iter().map(|e| trace_product(e.matrix(), x.matrix())),
        ))
    }

    /// The adjoint map: `Σᵢ cᵢ·eᵢ`.
    pub fn combine(&self, coeffs: &DVector<f64>) -> HermitianOperator {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            acc += e.matrix().map(|z| z * *c);
        }
        HermitianOperator::from_matrix_unchecked(acc)
    }

    pub fn gram(&self) -> GramMatrix {
        let n = self.len();
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = trace_product(self.elements[i].matrix(), self.elements[j].matrix());
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        let traces = DVector::from_iterator(n, self.elements.iter().map(HermitianOperator::trace));
        GramMatrix { matrix, traces }
    }

    /// Gram matrix of the elements with their trace part removed:
    /// `Tr[eᵢeⱼ] − Tr[eᵢ]Tr[eⱼ]/d`.
    pub fn centered_gram(&self) -> DMatrix<f64> {
        let g = self.gram();
        let d = self.dim as f64;
        DMatrix::from_fn(self.len(), self.len(), |i, j| {
            g.matrix[(i, j)] - g.traces[i] * g.traces[j] / d
        })
    }

    /// Rank of the centered Gram matrix; `d² − 1` means informationally complete.
    pub fn centered_rank(&self) -> usize {
        pinv_gram(&self.centered_gram(), default_rank_cutoff(self.len(), self.dim))
            .map(|f| f.rank)
            .unwrap_or(0)
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.centered_rank() == self.dim * self.dim - 1
    }

    pub fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let mut violations = Vec::new();
        let mut min_eigenvalues = Vec::with_capacity(self.len());
        let mut max_herm = 0.0f64;
        for (i, el) in self.elements.iter().enumerate() {
            let herm = el.hermiticity_residual();
            max_herm = max_herm.max(herm);
            if herm > tol.herm {
                violations.push(format!("element {i} is not Hermitian (residual {herm:.3e})"));
            }
            let lo = el.min_eigenvalue();
            min_eigenvalues.push(lo);
            if lo < -tol.psd {
                violations.push(format!("element {i} has negative eigenvalue {lo:.6e}"));
            }
        }
        let (completeness_residual, trace_residuals) = match self.kind {
            EnsembleKind::Measurement => {
                let mut sum = CMatrix::zeros(self.dim, self.dim);
                for el in &self.elements {
                    sum += el.matrix();
                }
                let res = (sum - CMatrix::identity(self.dim, self.dim)).norm();
                if res > tol.recon {
                    violations.push(format!("elements do not sum to identity (residual {res:.3e})"));
                }
                (Some(res), None)
            }
            EnsembleKind::StateFamily => {
                let res: Vec<f64> = self.elements.iter().map(|e| (e.trace() - 1.0).abs()).collect();
                for (i, r) in res.iter().enumerate() {
                    if *r > tol.recon {
                        violations.push(format!("element {i} has trace error {r:.3e}"));
                    }
                }
                (None, Some(res))
            }
        };
        let centered_rank = self.centered_rank();
        ValidationReport {
            kind: self.kind,
            dim: self.dim,
            n: self.len(),
            label: self.label.clone(),
            valid: violations.is_empty(),
            min_eigenvalues,
            max_hermiticity_residual: max_herm,
            completeness_residual,
            trace_residuals,
            centered_rank,
            informationally_complete: centered_rank == self.dim * self.dim - 1,
            violations,
        }
    }

    /// Errors unless [`validate`](Ensemble::validate) reports no violations.
    pub fn ensure_valid(&self, tol: &Tolerances) -> Result<()> {
        let report = self.validate(tol);
        if report.valid {
            Ok(())
        } else {
            Err(Error::InvalidEnsemble(report.violations.join("; ")))
        }
    }
}

fn from_states(
    states: Vec<HermitianOperator>,
    kind: EnsembleKind,
    measurement_scale: f64,
    label: String,
) -> Result<Ensemble> {
    let elements = match kind {
        EnsembleKind::StateFamily => states,
        EnsembleKind::Measurement => states.iter().map(|s| s.scale(measurement_scale)).collect(),
    };
    Ensemble::new(kind, elements, label)
}

fn qubit_state(bloch: [f64; 3]) -> HermitianOperator {
    let [x, y, z] = bloch;
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    );
    HermitianOperator::from_matrix_unchecked(m)
}

fn ket(amplitudes: &[Complex64]) -> CVector {
    let v = CVector::from_column_slice(amplitudes);
    let norm = v.norm();
    v.unscale(norm)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Orbit of `fiducial` under the Weyl–Heisenberg displacements `XᵃZᵇ`,
/// `a` major. As a measurement each projector is divided by `d`, which makes
/// the orbit sum to the identity for any fiducial.
pub fn weyl_heisenberg_orbit(
    fiducial: &CVector,
    kind: EnsembleKind,
    label: impl Into<String>,
) -> Result<Ensemble> {
    let d = fiducial.len();
    if d == 0 {
        return Err(Error::InvalidParameter("empty fiducial".into()));
    }
    let norm = fiducial.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("zero fiducial".into()));
    }
    let psi = fiducial.unscale(norm);
    let mut states = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (XᵃZᵇψ)[(x + a) mod d] = ω^{bx} ψ[x]
            let mut v = CVector::zeros(d);
            for x in 0..d {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * (b * x) as f64 / d as f64);
                v[(x + a) % d] = phase * psi[x];
            }
            states.push(HermitianOperator::outer(&v));
        }
    }
    from_states(states, kind, 1.0 / d as f64, label.into())
}

/// The `d²`-element SIC family for `d ∈ {2, 3}`.
pub fn make_sic(d: usize, kind: EnsembleKind) -> Result<Ensemble> {
    match d {
        2 => {
            let s = 2.0 * SQRT_2 / 3.0;
            let mut states = vec![qubit_state([0.0, 0.0, 1.0])];
            for j in 0..3 {
                let phi = 2.0 * PI * j as f64 / 3.0;
                states.push(qubit_state([s * phi.cos(), s * phi.sin(), -1.0 / 3.0]));
            }
            from_states(states, kind, 0.5, "sic(2)".into())
        }
        3 => {
            let fiducial = ket(&[re(0.0), re(1.0), re(-1.0)]);
            weyl_heisenberg_orbit(&fiducial, kind, "sic(3)")
        }
        _ => Err(Error::UnsupportedDimension {
            dim: d,
            reason: "SIC families are provided for d = 2 and d = 3 only",
        }),
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// Complete set of `d + 1` mutually unbiased bases for prime `d`, the
/// computational basis first, then the Fourier bases with quadratic phases.
pub fn make_mub(d: usize, kind: EnsembleKind) -> Result<Ensemble> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "complete MUB sets are constructed for prime d only",
        });
    }
    let mut states = Vec::with_capacity(d * (d + 1));
    for x in 0..d {
        let mut v = CVector::zeros(d);
        v[x] = re(1.0);
        states.push(HermitianOperator::outer(&v));
    }
    for a in 0..d {
        for j in 0..d {
            let amps: Vec<Complex64> = (0..d)
                .map(|x| {
                    let phase = if d == 2 {
                        // i^{a x²} (−1)^{j x}
                        PI / 2.0 * (a * x * x) as f64 + PI * (j * x) as f64
                    } else {
                        2.0 * PI * ((a * x * x + j * x) % d) as f64 / d as f64
                    };
                    Complex64::from_polar(1.0, phase)
                })
                .collect();
            states.push(HermitianOperator::outer(&ket(&amps)));
        }
    }
    from_states(states, kind, 1.0 / (d + 1) as f64, format!("mub({d})"))
}

fn parse_dim_arg(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| rest.strip_prefix(':'))?;
    inner.trim().parse().ok()
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "trine",
    "tetrahedron",
    "bb84-states",
    "pair",
    "computational(d)",
    "sic(d)",
    "sic-states(d)",
    "mub(d)",
    "mub-states(d)",
];

/// Small named ensembles.
///
/// * `trine`: qubit POVM `(2/3)|φᵢ⟩⟨φᵢ|` with Bloch vectors 120° apart in the x–z plane.
/// * `tetrahedron`: the qubit SIC POVM.
/// * `bb84-states`: `{|0⟩, |1⟩, |+⟩, |−⟩}`.
/// * `pair`: `{|0⟩⟨0|, |+⟩⟨+|}`.
/// * `computational(d)`: the projective measurement onto the standard basis.
/// * `sic(d)`, `mub(d)` measurements and `sic-states(d)`, `mub-states(d)` families.
pub fn builtin(name: &str) -> Result<Ensemble> {
    let name = name.trim();
    match name {
        "trine" => {
            let states = (0..3)
                .map(|i| {
                    let theta = PI * i as f64 / 3.0;
                    HermitianOperator::outer(&ket(&[re(theta.cos()), re(theta.sin())]))
                })
                .collect();
            return from_states(states, EnsembleKind::Measurement, 2.0 / 3.0, "trine".into());
        }
        "tetrahedron" => {
            let mut e = make_sic(2, EnsembleKind::Measurement)?;
            e.label = "tetrahedron".into();
            return Ok(e);
        }
        "bb84-states" | "bb84" => {
            let h = 1.0 / SQRT_2;
            let states = [[re(1.0), re(0.0)], [re(0.0), re(1.0)], [re(h), re(h)], [re(h), re(-h)]]
                .iter()
                .map(|a| HermitianOperator::outer(&ket(a)))
                .collect();
            return from_states(states, EnsembleKind::StateFamily, 1.0, "bb84-states".into());
        }
        "pair" | "pair(|0>,|+>)" => {
            let h = 1.0 / SQRT_2;
            let states = vec![
                HermitianOperator::outer(&ket(&[re(1.0), re(0.0)])),
                HermitianOperator::outer(&ket(&[re(h), re(h)])),
            ];
            return from_states(states, EnsembleKind::StateFamily, 1.0, "pair".into());
        }
        _ => {}
    }
    if let Some(d) = parse_dim_arg(name, "computational") {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let elements = (0..d)
            .map(|i| {
                let mut diag = vec![0.0; d];
                diag[i] = 1.0;
                HermitianOperator::from_real_diagonal(&diag)
            })
            .collect();
        return Ensemble::new(EnsembleKind::Measurement, elements, format!("computational({d})"));
    }
    if let Some(d) = parse_dim_arg(name, "sic-states") {
        return make_sic(d, EnsembleKind::StateFamily);
    }
    if let Some(d) = parse_dim_arg(name, "sic") {
        return make_sic(d, EnsembleKind::Measurement);
    }
    if let Some(d) = parse_dim_arg(name, "mub-states") {
        return make_mub(d, EnsembleKind::StateFamily);
    }
    if let Some(d) = parse_dim_arg(name, "mub") {
        return make_mub(d, EnsembleKind::Measurement);
    }
    Err(Error::UnknownBuiltin(name.to_string()))
}
