//! End-to-end commands behind the `ssa2d` binary.
//!
//! Every command loads the input, optionally adds seeded noise, builds the
//! lag covariance, extracts the eigenfilters and decomposes the image. Files
//! land in `output_dir`:
//!
//! | file | written by |
//! |------|------------|
//! | `spectrum.csv` | all commands |
//! | `taylor.csv` | decompose, verify (odd windows only) |
//! | `component_###.pgm/.csv` | decompose with `emit_components` |
//! | `reconstruction.pgm` | decompose |
//! | `denoise.csv`, `partial_sum.pgm/.csv` | denoise |
//! | `verify.txt` | verify |

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{rms_distance_curve, spectrum_csv, spectrum_report, taylor_report};
use crate::eigen::{eigendecompose, EigenFilter, SymmetryClass};
use crate::error::{Error, Result};
use crate::filterbank::{decompose_with, Decomposition, FilterPath};
use crate::imagemodel::{add_gaussian_noise, load_pgm, save_pgm, Image, NoiseSpec};
use crate::lagcov::{
    bisymmetry_residual, build_lag_covariance_fast, build_lag_covariance_oracle, LagCovariance,
    WindowGeometry,
};
use crate::spectral::verify_identities;

pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-9;
pub const BISYMMETRY_TOLERANCE: f64 = 1e-10;
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-9;
pub const SPECTRAL_TOLERANCE: f64 = 1e-9;
pub const PARITY_TOLERANCE: f64 = 1e-8;

/// Only periodic boundaries are implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidArgument(format!(
                "unsupported boundary {other:?} (only \"periodic\")"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub window: WindowGeometry,
    pub boundary: Boundary,
    pub noise_sigma: Option<f64>,
    pub noise_seed: Option<u64>,
    pub mesh_scale: f64,
    pub output_dir: PathBuf,
    pub fast_covariance: bool,
    pub emit_components: bool,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>, window: WindowGeometry) -> Self {
        Self {
            input_path: input_path.into(),
            window,
            boundary: Boundary::Periodic,
            noise_sigma: None,
            noise_seed: None,
            mesh_scale: 1.0,
            output_dir: PathBuf::from("."),
            fast_covariance: true,
            emit_components: false,
        }
    }

    fn noise(&self) -> Result<Option<NoiseSpec>> {
        match (self.noise_sigma, self.noise_seed) {
            (Some(sigma), seed) => Ok(Some(NoiseSpec::new(sigma, seed.unwrap_or(0))?)),
            (None, Some(_)) => Err(Error::InvalidArgument(
                "--noise-seed requires --noise-sigma".into(),
            )),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Rank(usize),
    Auto,
}

impl std::str::FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Truncation::Auto);
        }
        s.parse().map(Truncation::Rank).map_err(|_| {
            Error::InvalidArgument(format!("truncate must be a rank or \"auto\", got {s:?}"))
        })
    }
}

/// Result of a command: exit status plus the report lines printed to stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub success: bool,
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

struct Pipeline {
    input: Image,
    covariance: LagCovariance,
    filters: Vec<EigenFilter>,
}

fn load_input(config: &RunConfig) -> Result<Image> {
    let clean = load_pgm(&config.input_path)?;
    Ok(match config.noise()? {
        Some(spec) => add_gaussian_noise(&clean, spec),
        None => clean,
    })
}

fn run_pipeline(config: &RunConfig, zero_filter: Option<usize>) -> Result<Pipeline> {
    if !config.mesh_scale.is_finite() || config.mesh_scale <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mesh scale must be positive, got {}",
            config.mesh_scale
        )));
    }
    let input = load_input(config)?;
    let Boundary::Periodic = config.boundary;
    config.window.check_fits(input.rows(), input.cols())?;
    let covariance = if config.fast_covariance {
        build_lag_covariance_fast(&input, config.window)?
    } else {
        build_lag_covariance_oracle(&input, config.window)?
    };
    let mut filters = eigendecompose(&covariance)?;
    if let Some(rank) = zero_filter {
        let k = filters.len();
        let f = filters
            .get_mut(rank.wrapping_sub(1))
            .ok_or(Error::RankOutOfRange { ell: rank, k })?;
        *f = EigenFilter::from_vector(f.rank, f.lambda, vec![0.0; k], config.window)?;
    }
    Ok(Pipeline {
        input,
        covariance,
        filters,
    })
}

fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn decompose_pipeline(p: &Pipeline, window: WindowGeometry) -> Result<Decomposition> {
    decompose_with(&p.input, &p.filters, window, FilterPath::Auto)
}

/// Decomposes the input and writes the spectrum, Taylor table, reconstruction
/// and (optionally) every component. Succeeds iff the reconstruction error is
/// within [`RECONSTRUCTION_TOLERANCE`].
pub fn cmd_decompose(config: &RunConfig) -> Result<Outcome> {
    let p = run_pipeline(config, None)?;
    prepare_output(&config.output_dir)?;
    let dir = &config.output_dir;

    write(
        dir,
        "spectrum.csv",
        &spectrum_csv(&spectrum_report(&p.filters)),
    )?;
    if config.window.is_odd() {
        write(
            dir,
            "taylor.csv",
            &taylor_report(&p.filters, config.mesh_scale)?.to_csv(),
        )?;
    }

    let d = decompose_pipeline(&p, config.window)?;
    if config.emit_components {
        for (i, comp) in d.components.iter().enumerate() {
            save_pgm(comp, dir.join(format!("component_{:03}.pgm", i + 1)))?;
            write(dir, &format!("component_{:03}.csv", i + 1), &comp.to_csv())?;
        }
    }
    let reconstruction = d.reconstruction();
    save_pgm(&reconstruction, dir.join("reconstruction.pgm"))?;

    let residual = reconstruction.max_abs_diff(&d.source);
    let success = residual <= RECONSTRUCTION_TOLERANCE;
    Ok(Outcome {
        success,
        lines: vec![
            format!(
                "image {}x{} window {} K={}",
                p.input.rows(),
                p.input.cols(),
                config.window,
                config.window.k()
            ),
            format!("components {}", d.components.len()),
            format!(
                "reconstruction_residual {residual:e} tolerance {RECONSTRUCTION_TOLERANCE:e} {}",
                verdict(success)
            ),
        ],
    })
}

/// Computes `D(ℓ)` against `reference` and writes the prefix reconstruction at
/// the requested (or optimal) rank.
pub fn cmd_denoise(config: &RunConfig, reference: &Path, truncate: Truncation) -> Result<Outcome> {
    let p = run_pipeline(config, None)?;
    let reference = load_pgm(reference)?;
    reference.check_same_shape(&p.input)?;
    let k = config.window.k();
    if let Truncation::Rank(ell) = truncate {
        if ell == 0 || ell > k {
            return Err(Error::RankOutOfRange { ell, k });
        }
    }
    prepare_output(&config.output_dir)?;
    let dir = &config.output_dir;

    let d = decompose_pipeline(&p, config.window)?;
    let report = rms_distance_curve(&reference, &d)?;
    write(
        dir,
        "spectrum.csv",
        &spectrum_csv(&spectrum_report(&p.filters)),
    )?;
    write(dir, "denoise.csv", &report.to_csv())?;

    let ell = match truncate {
        Truncation::Rank(ell) => ell,
        Truncation::Auto => report.ell_star,
    };
    let out = d.partial_sum(ell)?;
    save_pgm(&out, dir.join("partial_sum.pgm"))?;
    write(dir, "partial_sum.csv", &out.to_csv())?;

    Ok(Outcome {
        success: true,
        lines: vec![
            format!("ell_star {} d_min {}", report.ell_star, report.d_min),
            format!("d_full {}", report.d(k)),
            format!("truncate {} d {}", ell, report.d(ell)),
        ],
    })
}

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn line(&self) -> String {
        format!(
            "{} {:e} tolerance {:e} {}",
            self.name,
            self.value,
            self.tolerance,
            verdict(self.passed)
        )
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Runs every structural check on the input's decomposition and writes
/// `verify.txt`. `zero_filter` replaces the eigenvector of that rank with
/// zeros before the checks; it exists to exercise the failure path.
pub fn cmd_verify(config: &RunConfig, zero_filter: Option<usize>) -> Result<Outcome> {
    let p = run_pipeline(config, zero_filter)?;
    prepare_output(&config.output_dir)?;
    let (rows, cols) = (p.input.rows(), p.input.cols());
    let c = &p.covariance;
    let k = c.k();
    let mut checks = Vec::new();

    checks.push(Check::at_most(
        "bisymmetry",
        bisymmetry_residual(c),
        BISYMMETRY_TOLERANCE,
    ));

    let mut gram: f64 = 0.0;
    for (i, a) in p.filters.iter().enumerate() {
        for b in &p.filters[i..] {
            let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
            let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            gram = gram.max((dot - target).abs());
        }
    }
    checks.push(Check::at_most(
        "orthonormality",
        gram,
        ORTHONORMALITY_TOLERANCE,
    ));

    let c_norm = c.frobenius_norm();
    let mut worst_pair: f64 = 0.0;
    for f in &p.filters {
        let mut r2 = 0.0;
        for i in 0..k {
            let cv: f64 = (0..k).map(|j| c.get(i, j) * f.vector[j]).sum();
            r2 += (cv - f.lambda * f.vector[i]).powi(2);
        }
        worst_pair = worst_pair.max(r2.sqrt());
    }
    let scale = if c_norm > 0.0 { c_norm } else { 1.0 };
    checks.push(Check::at_most(
        "eigen_residual",
        worst_pair / scale,
        EIGEN_RESIDUAL_TOLERANCE,
    ));

    let symmetry_gap = p
        .filters
        .iter()
        .filter(|f| !f.degenerate)
        .map(|f| 1.0 - f.symmetry_score.abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "eigenvector_symmetry",
        symmetry_gap,
        crate::eigen::SYMMETRY_TOLERANCE,
    ));

    let spectral = verify_identities(&p.filters, rows, cols)?;
    checks.push(Check::at_most(
        "spectral_normalization",
        spectral.max_normalization_residual(),
        SPECTRAL_TOLERANCE,
    ));
    checks.push(Check::at_most(
        "spectral_completeness",
        spectral.completeness_residual,
        SPECTRAL_TOLERANCE,
    ));

    let d = decompose_pipeline(&p, config.window)?;
    checks.push(Check::at_most(
        "reconstruction",
        d.reconstruction_residual(),
        RECONSTRUCTION_TOLERANCE,
    ));

    let mut lines = Vec::new();
    if config.window.is_odd() {
        let report = taylor_report(&p.filters, config.mesh_scale)?;
        write(&config.output_dir, "taylor.csv", &report.to_csv())?;
        let mut parity: f64 = 0.0;
        for row in &report.rows {
            let v = match row.symmetry {
                SymmetryClass::Symmetric => row.coefficients.odd_magnitude(),
                SymmetryClass::Antisymmetric => row.coefficients.even_magnitude(),
                SymmetryClass::Mixed => 0.0,
            };
            parity = parity.max(v);
        }
        checks.push(Check::at_most("taylor_parity", parity, PARITY_TOLERANCE));
    }

    write(
        &config.output_dir,
        "spectrum.csv",
        &spectrum_csv(&spectrum_report(&p.filters)),
    )?;

    lines.extend(checks.iter().map(Check::line));
    if !config.window.is_odd() {
        lines.push(format!(
            "taylor_parity SKIPPED window {} has an even dimension",
            config.window
        ));
    }
    let success = checks.iter().all(|c| c.passed);
    lines.push(format!("overall {}", verdict(success)));
    write(&config.output_dir, "verify.txt", &(lines.join("\n") + "\n"))?;
    Ok(Outcome { success, lines })
}

/// Caps rayon's global pool from `SSA2D_THREADS` (unset or 0 means automatic).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SSA2D_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::InvalidArgument(format!("SSA2D_THREADS must be an integer, got {raw:?}"))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}
