mod args;
mod report;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use qregion_core::io::{complex_rows, matrix_rows, parse_point, read_cloud_file, read_ensemble, write_cloud};
use qregion_core::sample::{rng_from_seed, sample, SampleKind};
use qregion_core::simulability::{dcone_in_hull, ellipsoid_in_hull};
use qregion_core::verify::verify_all;
use qregion_core::{
    builtin, CloudFile, ContainmentOptions, ContainmentVerdict, DConeApprox, EllipsoidApprox, Ensemble,
    EnsembleKind, Error, HermitianOperator, ProbabilityCloud, ValidationReport, BUILTIN_NAMES,
};
use serde_json::json;

use crate::args::{Cli, Command, GlobalArgs};
use crate::report::{emit, InputInfo};

/// Entries of observed clouds may stray this far from the probability simplex.
const CLOUD_TOL: f64 = 1e-6;

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::DimensionMismatch { .. } | Error::UnknownBuiltin(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<u8, CliError>;

fn load(input: &str) -> Result<Ensemble, CliError> {
    match input.strip_prefix("builtin:") {
        Some(name) => Ok(builtin(name)?),
        None => Ok(read_ensemble(Path::new(input))?),
    }
}

/// Loads and validates; invalid ensembles are rejected unless allowed.
fn load_checked(input: &str, g: &GlobalArgs) -> Result<(Ensemble, ValidationReport), CliError> {
    let e = load(input)?;
    let report = e.validate(&g.tolerances());
    if !report.valid && !g.allow_invalid {
        return Err(CliError {
            code: 1,
            message: format!("invalid ensemble: {}", report.violations.join("; ")),
        });
    }
    Ok((e, report))
}

fn ellipsoid(e: &Ensemble, report: &ValidationReport, r: f64, g: &GlobalArgs) -> Result<EllipsoidApprox, CliError> {
    Ok(if report.valid {
        EllipsoidApprox::new(e, r, &g.tolerances())?
    } else {
        EllipsoidApprox::new_unvalidated(e, r)?
    })
}

fn dcone(e: &Ensemble, report: &ValidationReport, r: f64, g: &GlobalArgs) -> Result<DConeApprox, CliError> {
    Ok(if report.valid {
        DConeApprox::new(e, r, &g.tolerances())?
    } else {
        DConeApprox::new_unvalidated(e, r)?
    })
}

fn check_len(expected: usize, found: usize) -> Result<(), CliError> {
    if expected != found {
        return Err(CliError::usage(format!(
            "point has {found} components, the ensemble has {expected} elements"
        )));
    }
    Ok(())
}

fn cmd_validate(g: &GlobalArgs, input: &str) -> CliResult {
    let e = load(input)?;
    let report = e.validate(&g.tolerances());
    let code = if report.valid { 0 } else { 1 };
    emit(g, "validate", Some(InputInfo::of(&e)), &report)?;
    Ok(code)
}

fn parse_coords(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [i, j] => match (i.parse(), j.parse()) {
            (Ok(i), Ok(j)) => Ok((i, j)),
            _ => Err(CliError::usage(format!("bad coordinates `{text}`"))),
        },
        _ => Err(CliError::usage(format!("expected two coordinates, got `{text}`"))),
    }
}

fn cmd_region(g: &GlobalArgs, input: &str, r: f64, profile: bool, coords: &str, points: usize) -> CliResult {
    let (e, report) = load_checked(input, g)?;
    let result = match e.kind() {
        EnsembleKind::Measurement => {
            let a = ellipsoid(&e, &report, r, g)?;
            let mut out = json!({
                "kind": e.kind(),
                "r": r,
                "bound": a.bound(),
                "rank": a.rank(),
                "informationally_complete": a.is_informationally_complete(),
                "note": a.note(),
                "center": a.center().as_slice(),
                "covariance": matrix_rows(a.covariance()),
            });
            if profile {
                let (i, j) = parse_coords(coords)?;
                out["profile"] = json!({
                    "type": "ellipse_section",
                    "coords": [i, j],
                    "points": a.projection_profile(i, j, points)?,
                });
            }
            out
        }
        EnsembleKind::StateFamily => {
            let c = dcone(&e, &report, r, g)?;
            let centers: Vec<Vec<f64>> = (0..=e.dim())
                .map(|k| c.slice_center(k).map(|v| v.as_slice().to_vec()))
                .collect::<Result<_, _>>()?;
            let mut out = json!({
                "kind": e.kind(),
                "r": r,
                "bound": c.bound(),
                "rank": c.rank(),
                "informationally_complete": c.is_informationally_complete(),
                "note": c.note(),
                "shape": matrix_rows(c.shape()),
                "slice_coefficients": c.slice_coefficients(),
                "slice_centers": centers,
            });
            if profile {
                out["profile"] = json!({
                    "type": "axial",
                    "points": c.axial_profile(),
                });
            }
            out
        }
    };
    emit(g, "region", Some(InputInfo::of(&e)), &result)?;
    Ok(0)
}

fn cmd_member(g: &GlobalArgs, input: &str, point: &str, r: f64, k: Option<usize>) -> CliResult {
    let (e, report) = load_checked(input, g)?;
    let p = parse_point(point)?;
    check_len(e.len(), p.len())?;
    let tol = g.tolerances();
    let membership = match (e.kind(), k) {
        (EnsembleKind::Measurement, None) => ellipsoid(&e, &report, r, g)?.membership(&p, &tol)?,
        (EnsembleKind::Measurement, Some(_)) => {
            return Err(CliError::usage("--k applies to state families only"));
        }
        (EnsembleKind::StateFamily, None) => dcone(&e, &report, r, g)?.membership(&p, &tol)?,
        (EnsembleKind::StateFamily, Some(k)) => dcone(&e, &report, r, g)?.slice_membership(&p, k, &tol)?,
    };
    let result = json!({
        "point": p.as_slice(),
        "r": r,
        "slice": k,
        "member": membership.verdict.is_member(),
        "membership": membership,
    });
    emit(g, "member", Some(InputInfo::of(&e)), &result)?;
    Ok(0)
}

fn cmd_reconstruct(g: &GlobalArgs, input: &str, point: &str, k: Option<usize>) -> CliResult {
    let (e, report) = load_checked(input, g)?;
    let p = parse_point(point)?;
    check_len(e.len(), p.len())?;
    let tol = g.tolerances();
    let op: HermitianOperator = match (e.kind(), k) {
        (EnsembleKind::Measurement, None) => ellipsoid(&e, &report, 1.0, g)?.reconstruct_state(&p, &tol)?,
        (EnsembleKind::Measurement, Some(_)) => {
            return Err(CliError::usage("--k applies to state families only"));
        }
        (EnsembleKind::StateFamily, Some(k)) => dcone(&e, &report, 1.0, g)?.reconstruct_effect(&p, k, &tol)?,
        (EnsembleKind::StateFamily, None) => {
            return Err(CliError::usage("state families need --k, the trace of the effect"));
        }
    };
    let forward = e.probabilities(&op)?;
    let result = json!({
        "point": p.as_slice(),
        "k": k,
        "operator": complex_rows(op.matrix()),
        "eigenvalues": op.eigenvalues(),
        "trace": op.trace(),
        "forward_residual": (forward - &p).amax(),
    });
    emit(g, "reconstruct", Some(InputInfo::of(&e)), &result)?;
    Ok(0)
}

fn cmd_simtest(
    g: &GlobalArgs,
    reference: &str,
    cloud_path: &Path,
    slack: f64,
    mode: args::Mode,
    directions: usize,
) -> CliResult {
    let (e, report) = load_checked(reference, g)?;
    let file = read_cloud_file(cloud_path)?;
    let normalized = e.kind() == EnsembleKind::Measurement;
    let cloud = ProbabilityCloud::new(file.points, normalized, CLOUD_TOL)?;
    check_len(e.len(), cloud.n())?;
    let opts = ContainmentOptions {
        slack,
        mode: mode.into(),
        directions,
        seed: g.seed(),
        ..Default::default()
    };
    let cert = match e.kind() {
        EnsembleKind::Measurement => ellipsoid_in_hull(&ellipsoid(&e, &report, 1.0, g)?, &cloud, &opts)?,
        EnsembleKind::StateFamily => dcone_in_hull(&dcone(&e, &report, 1.0, g)?, &cloud, &opts)?,
    };
    let code = match cert.verdict {
        ContainmentVerdict::Contained => 0,
        ContainmentVerdict::Violated => 1,
        ContainmentVerdict::InconclusivePass => 3,
    };
    let result = json!({
        "cloud_points": cloud.len(),
        "cloud_tolerance": CLOUD_TOL,
        "certificate": cert,
    });
    emit(g, "simtest", Some(InputInfo::of(&e)), &result)?;
    Ok(code)
}

fn cmd_verify(g: &GlobalArgs, input: &str, samples: usize) -> CliResult {
    let (e, report) = load_checked(input, g)?;
    if !report.valid {
        return Err(CliError {
            code: 1,
            message: "verification needs a valid ensemble".into(),
        });
    }
    let stats = verify_all(&e, samples, g.seed(), &g.tolerances())?;
    let violations: usize = stats.iter().map(|s| s.violations).sum();
    emit(g, "verify", Some(InputInfo::of(&e)), &json!({ "violations": violations, "checks": stats }))?;
    Ok(if violations == 0 { 0 } else { 1 })
}

fn cmd_images(g: &GlobalArgs, input: &str, samples: usize, shrink: f64, output: Option<&Path>) -> CliResult {
    if !(0.0..=1.0).contains(&shrink) {
        return Err(CliError::usage("--shrink must lie in [0, 1]"));
    }
    let (e, _) = load_checked(input, g)?;
    let d = e.dim();
    let mut rng = rng_from_seed(g.seed());
    let centre_op = match e.kind() {
        EnsembleKind::Measurement => HermitianOperator::identity(d).scale(1.0 / d as f64),
        EnsembleKind::StateFamily => HermitianOperator::identity(d).scale(0.5),
    };
    let centre = e.probabilities(&centre_op)?;
    let mut points = Vec::with_capacity(samples);
    for _ in 0..samples {
        let op = match e.kind() {
            EnsembleKind::Measurement => sample(SampleKind::HaarPure, d, &mut rng)?,
            EnsembleKind::StateFamily => sample(SampleKind::RandomProjector, d, &mut rng)?,
        };
        let p = e.probabilities(&op)?;
        points.push(&centre + (p - &centre) * (1.0 - shrink));
    }
    let cloud = CloudFile { header: None, points };
    match output {
        Some(path) => write_cloud(std::fs::File::create(path).map_err(Error::from)?, &cloud)?,
        None => {
            let mut buf = Vec::new();
            write_cloud(&mut buf, &cloud)?;
            report::print_stdout(String::from_utf8_lossy(&buf).trim_end())?;
        }
    }
    Ok(0)
}

fn cmd_builtin(g: &GlobalArgs, name: Option<&str>, output: Option<&Path>) -> CliResult {
    let Some(name) = name else {
        emit(g, "builtin", None, &json!({ "names": BUILTIN_NAMES }))?;
        return Ok(0);
    };
    let e = builtin(name)?;
    match output {
        Some(path) => qregion_core::io::write_ensemble(path, &e)?,
        None => report::print_stdout(&qregion_core::io::ensemble_to_json(&e)?)?,
    }
    Ok(0)
}

fn run(cli: Cli) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { input } => cmd_validate(g, input),
        Command::Region {
            input,
            r,
            profile,
            coords,
            profile_points,
        } => cmd_region(g, input, *r, *profile, coords, *profile_points),
        Command::Member { input, point, r, k } => cmd_member(g, input, point, *r, *k),
        Command::Reconstruct { input, point, k } => cmd_reconstruct(g, input, point, *k),
        Command::Simtest {
            reference,
            cloud,
            slack,
            mode,
            directions,
        } => cmd_simtest(g, reference, cloud, *slack, *mode, *directions),
        Command::Verify { input, samples } => cmd_verify(g, input, *samples),
        Command::Images {
            input,
            samples,
            shrink,
            output,
        } => cmd_images(g, input, *samples, *shrink, output.as_deref()),
        Command::Builtin { name, output } => cmd_builtin(g, name.as_deref(), output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qregion: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
