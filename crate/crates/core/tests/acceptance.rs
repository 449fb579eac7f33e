//! Exit-gate suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use ssa2d::eigen::FilterGrid;
use ssa2d::filterbank::{two_step_fft, two_step_spatial};
use ssa2d::lagcov::lag_consistency_residual;
use ssa2d::spectral::{dft2, naive_dft2};
use ssa2d::{
    add_gaussian_noise, bisymmetry_residual, build_lag_covariance_fast,
    build_lag_covariance_oracle, classify_symmetry, decompose_with, eigendecompose,
    rms_distance_curve, taylor_coefficients, taylor_coefficients_of_grid, verify_identities,
    EigenFilter, FilterPath, Image, LagCovariance, NoiseSpec, SymmetryClass, WindowGeometry,
};

const RECONSTRUCTION_TOL: f64 = 1e-9;
const BISYMMETRY_TOL: f64 = 1e-10;
const SYMMETRY_SCORE_TOL: f64 = 1e-6;
const DEGENERACY_GAP: f64 = 1e-8;
const SPECTRAL_TOL: f64 = 1e-9;
const TABLE_TOL: f64 = 0.002;
const PARITY_TOL: f64 = 1e-8;
const COVARIANCE_TOL: f64 = 1e-10;
const FILTERING_TOL: f64 = 1e-8;
const DFT_TOL: f64 = 1e-10;
const NOISE_RMS_REL_TOL: f64 = 1e-6;
const DENOISE_RATIO: f64 = 0.8;
const TAIL_FRACTION: f64 = 0.95;

const RANDOM_CASES: usize = 120;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Randomized image/window cases shared by criteria 1 and 2.
struct Case {
    image: Image,
    geometry: WindowGeometry,
}

fn random_cases() -> Vec<Case> {
    let mut rng = common::rng(0xacce);
    let mut cases = Vec::with_capacity(RANDOM_CASES);
    while cases.len() < RANDOM_CASES {
        let rows = rng.random_range(4..=32);
        let cols = rng.random_range(4..=32);
        let m = rng.random_range(1..=5);
        let n = rng.random_range(1..=5);
        if m >= rows || n >= cols {
            continue;
        }
        cases.push(Case {
            image: common::random_image(&mut rng, rows, cols),
            geometry: WindowGeometry::new(m, n).unwrap(),
        });
    }
    cases
}

fn ac1_perfect_reconstruction(cases: &[Case]) -> Outcome {
    let mut worst: f64 = 0.0;
    for case in cases {
        let c = build_lag_covariance_fast(&case.image, case.geometry).unwrap();
        let filters = eigendecompose(&c).unwrap();
        let d = decompose_with(&case.image, &filters, case.geometry, FilterPath::Spatial).unwrap();
        worst = worst.max(d.reconstruction_residual());
    }
    let random_ok = worst <= RECONSTRUCTION_TOL;

    let start = Instant::now();
    let photo = common::building_image(256, 256);
    let g = WindowGeometry::new(11, 11).unwrap();
    let filters = eigendecompose(&build_lag_covariance_fast(&photo, g).unwrap()).unwrap();
    let d = decompose_with(&photo, &filters, g, FilterPath::Fft).unwrap();
    let photo_err = d.reconstruction_residual();
    let elapsed = start.elapsed();
    let photo_ok = photo_err <= RECONSTRUCTION_TOL && elapsed < Duration::from_secs(120);

    outcome(
        random_ok && photo_ok,
        format!(
            "{} random cases max err {worst:.2e}; 256x256/11x11 err {photo_err:.2e} in {:.1}s (tol {RECONSTRUCTION_TOL:e}, < 120s)",
            cases.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac2_bisymmetry(cases: &[Case]) -> Outcome {
    let (mut bisym, mut lag): (f64, f64) = (0.0, 0.0);
    for case in cases {
        let (rows, cols) = (case.image.rows(), case.image.cols());
        for c in [
            build_lag_covariance_oracle(&case.image, case.geometry).unwrap(),
            build_lag_covariance_fast(&case.image, case.geometry).unwrap(),
        ] {
            bisym = bisym.max(bisymmetry_residual(&c));
            lag = lag.max(lag_consistency_residual(&c, rows, cols));
        }
    }
    outcome(
        bisym <= BISYMMETRY_TOL && lag <= BISYMMETRY_TOL,
        format!("bisymmetry {bisym:.2e}, lag consistency {lag:.2e} (tol {BISYMMETRY_TOL:e})"),
    )
}

/// Bisymmetric covariances: image-derived (odd and even windows) plus
/// synthetic matrices placed on an odd window.
fn bisymmetric_matrices() -> Vec<LagCovariance> {
    let mut rng = common::rng(0xb15);
    let mut out = Vec::new();
    for _ in 0..60 {
        let rows = rng.random_range(6..=24);
        let cols = rng.random_range(6..=24);
        let m = rng.random_range(1..=5);
        let n = rng.random_range(1..=5);
        let img = common::random_image(&mut rng, rows, cols);
        out.push(build_lag_covariance_fast(&img, WindowGeometry::new(m, n).unwrap()).unwrap());
    }
    for _ in 0..60 {
        let m = 2 * rng.random_range(0..=2) + 1;
        let n = 2 * rng.random_range(0..=2) + 1;
        let g = WindowGeometry::new(m, n).unwrap();
        let a = common::random_bisymmetric(&mut rng, g.k());
        out.push(LagCovariance::from_entries(g, a).unwrap());
    }
    out
}

fn nondegenerate(c: &LagCovariance, filters: &[EigenFilter]) -> Vec<bool> {
    let scale = c.trace().abs().max(c.frobenius_norm());
    common::eigen_gaps(filters)
        .iter()
        .map(|&gap| gap > DEGENERACY_GAP * scale)
        .collect()
}

fn ac3_eigenvector_symmetry(mats: &[LagCovariance]) -> Outcome {
    let (mut checked, mut worst): (usize, f64) = (0, 0.0);
    for c in mats {
        let filters = eigendecompose(c).unwrap();
        for (f, ok) in filters.iter().zip(nondegenerate(c, &filters)) {
            if ok {
                checked += 1;
                worst = worst.max(1.0 - f.symmetry_score.abs());
            }
        }
    }
    outcome(
        checked > 0 && worst <= SYMMETRY_SCORE_TOL,
        format!("{checked} nondegenerate eigenvectors, max 1-|score| {worst:.2e} (tol {SYMMETRY_SCORE_TOL:e})"),
    )
}

fn ac4_fourier_identities() -> Outcome {
    let mut rng = common::rng(0xf0);
    let (mut norm, mut complete, mut removal_min) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut removal_ok = true;
    for trial in 0..12 {
        let (rows, cols) = (rng.random_range(6..=20), rng.random_range(6..=20));
        let img = if trial == 0 {
            common::building_image(rows, cols)
        } else {
            common::random_image(&mut rng, rows, cols)
        };
        let g = WindowGeometry::new(rng.random_range(1..=4), rng.random_range(1..=4)).unwrap();
        let filters = eigendecompose(&build_lag_covariance_fast(&img, g).unwrap()).unwrap();
        let report = verify_identities(&filters, rows, cols).unwrap();
        norm = norm.max(report.max_normalization_residual());
        complete = complete.max(report.completeness_residual);
        let k = g.k();
        if k > 1 {
            let drop = rng.random_range(0..k);
            let mut partial = filters.clone();
            partial.remove(drop);
            let r = verify_identities(&partial, rows, cols)
                .unwrap()
                .completeness_residual;
            removal_min = removal_min.min(r * k as f64);
            removal_ok &= r >= 1.0 / k as f64 - SPECTRAL_TOL;
        }
    }
    outcome(
        norm <= SPECTRAL_TOL && complete <= SPECTRAL_TOL && removal_ok,
        format!(
            "normalization {norm:.2e}, completeness {complete:.2e} (tol {SPECTRAL_TOL:e}); removal residual >= {removal_min:.3}/K"
        ),
    )
}

fn ac5_facade_taylor_rows() -> Outcome {
    let g = WindowGeometry::new(3, 3).unwrap();
    let grids: Vec<FilterGrid> = common::FACADE_VECTORS
        .iter()
        .map(|v| FilterGrid::from_vector(g, v).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    for (grid, expected) in grids.iter().zip(common::FACADE_TAYLOR) {
        let t = taylor_coefficients_of_grid(grid, 1.0).unwrap();
        for (got, want) in t.as_array().iter().zip(expected) {
            worst = worst.max((got - want).abs());
        }
    }
    let reps = 1000;
    let start = Instant::now();
    for _ in 0..reps {
        for grid in &grids {
            std::hint::black_box(
                taylor_coefficients_of_grid(std::hint::black_box(grid), 1.0).unwrap(),
            );
        }
    }
    let per_table = start.elapsed() / reps;
    outcome(
        worst <= TABLE_TOL && per_table < Duration::from_millis(1),
        format!("max deviation {worst:.4} (tol {TABLE_TOL}); {per_table:?} per table"),
    )
}

fn ac6_facade_classes() -> Outcome {
    let expected = [
        SymmetryClass::Symmetric,
        SymmetryClass::Antisymmetric,
        SymmetryClass::Antisymmetric,
        SymmetryClass::Symmetric,
        SymmetryClass::Symmetric,
    ];
    let got: Vec<SymmetryClass> = common::FACADE_VECTORS
        .iter()
        .map(|v| classify_symmetry(&common::unit(v)).0)
        .collect();
    outcome(
        got == expected,
        format!(
            "classes {:?}",
            got.iter().map(|c| c.as_str()).collect::<Vec<_>>()
        ),
    )
}

fn ac7_taylor_parity(mats: &[LagCovariance]) -> Outcome {
    let (mut sym, mut anti, mut odd_worst, mut even_worst) = (0usize, 0usize, 0.0f64, 0.0f64);
    for c in mats.iter().filter(|c| c.geometry().is_odd()) {
        for f in eigendecompose(c).unwrap() {
            let t = taylor_coefficients(&f, 1.0).unwrap().coefficients;
            match f.symmetry {
                SymmetryClass::Symmetric => {
                    sym += 1;
                    odd_worst = odd_worst.max(t.odd_magnitude());
                }
                SymmetryClass::Antisymmetric => {
                    anti += 1;
                    even_worst = even_worst.max(t.even_magnitude());
                }
                SymmetryClass::Mixed => {}
            }
        }
    }
    outcome(
        sym > 0 && anti > 0 && odd_worst <= PARITY_TOL && even_worst <= PARITY_TOL,
        format!(
            "{sym} symmetric: max |f_x|,|f_y| {odd_worst:.2e}; {anti} antisymmetric: max even {even_worst:.2e} (tol {PARITY_TOL:e})"
        ),
    )
}

fn ac8_oracle_equivalences(cases: &[Case]) -> Outcome {
    let mut cov: f64 = 0.0;
    for case in cases {
        let a = build_lag_covariance_oracle(&case.image, case.geometry).unwrap();
        let b = build_lag_covariance_fast(&case.image, case.geometry).unwrap();
        cov = cov.max(common::rel_frobenius(b.entries(), a.entries()));
    }

    let mut filt: f64 = 0.0;
    for case in cases.iter().take(40) {
        let filters =
            eigendecompose(&build_lag_covariance_fast(&case.image, case.geometry).unwrap())
                .unwrap();
        for f in &filters {
            let a = two_step_spatial(&case.image, f, case.geometry).unwrap();
            let b = two_step_fft(&case.image, f, case.geometry).unwrap();
            let norm = a.sum_of_squares().sqrt().max(f64::MIN_POSITIVE);
            let diff = a
                .data()
                .iter()
                .zip(b.data())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            filt = filt.max(diff / norm.max(case.image.sum_of_squares().sqrt() * 1e-12));
        }
    }

    let mut rng = common::rng(0xdf7);
    let mut dft: f64 = 0.0;
    for rows in 1..=16 {
        for cols in [1, 3, 8, 13, 16] {
            let img = common::random_image(&mut rng, rows, cols);
            let fast = dft2(&img);
            let slow = naive_dft2(&img);
            let norm = slow.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let diff = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            dft = dft.max(diff / norm);
        }
    }
    outcome(
        cov <= COVARIANCE_TOL && filt <= FILTERING_TOL && dft <= DFT_TOL,
        format!(
            "covariance {cov:.2e} (tol {COVARIANCE_TOL:e}); filtering {filt:.2e} (tol {FILTERING_TOL:e}); dft {dft:.2e} (tol {DFT_TOL:e})"
        ),
    )
}

fn ac9_denoising_curve() -> Outcome {
    let start = Instant::now();
    let clean = common::smooth_image(128, 128);
    let mut ok = true;
    let mut details = Vec::new();
    for (sigma, window, seed) in [(5.0, 7, 1u64), (13.3, 11, 2), (20.0, 7, 3)] {
        let noisy = add_gaussian_noise(&clean, NoiseSpec::new(sigma, seed).unwrap());
        let g = WindowGeometry::new(window, window).unwrap();
        let filters = eigendecompose(&build_lag_covariance_fast(&noisy, g).unwrap()).unwrap();
        let d = decompose_with(&noisy, &filters, g, FilterPath::Fft).unwrap();
        let report = rms_distance_curve(&clean, &d).unwrap();
        let k = g.k();
        let noise_rms = noisy.rms_diff(&clean);
        let a = (report.d(k) - noise_rms).abs() <= NOISE_RMS_REL_TOL * noise_rms;
        let b = report.ell_star < k;
        let c = report.d_min <= DENOISE_RATIO * report.d(k);
        ok &= a && b && c;
        details.push(format!(
            "sigma {sigma} {window}x{window}: D(K) {:.3} vs rms {noise_rms:.3}, l*={} D(l*)={:.3} ratio {:.3}",
            report.d(k),
            report.ell_star,
            report.d_min,
            report.d_min / report.d(k)
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    details.push(format!("{:.1}s", elapsed.as_secs_f64()));
    outcome(ok, details.join("; "))
}

fn ac10_noise_raises_tail() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (img, window, sigma) in [
        (common::smooth_image(96, 96), 7, 10.0),
        (common::building_image(96, 96), 5, 8.0),
    ] {
        let noisy = add_gaussian_noise(&img, NoiseSpec::new(sigma, 11).unwrap());
        let g = WindowGeometry::new(window, window).unwrap();
        let clean_l = eigendecompose(&build_lag_covariance_fast(&img, g).unwrap()).unwrap();
        let noisy_l = eigendecompose(&build_lag_covariance_fast(&noisy, g).unwrap()).unwrap();
        let k = g.k();
        let tail = (k / 2)..k;
        let n = tail.len();
        let hits = tail
            .filter(|&i| noisy_l[i].lambda >= clean_l[i].lambda)
            .count();
        let frac = hits as f64 / n as f64;
        ok &= frac >= TAIL_FRACTION;
        details.push(format!("{window}x{window}: {hits}/{n} tail ranks raised"));
    }
    outcome(
        ok,
        format!("{} (need >= {TAIL_FRACTION})", details.join("; ")),
    )
}

fn ac11_self_reference(cases: &[Case]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut images: Vec<(Image, WindowGeometry)> = cases
        .iter()
        .take(40)
        .map(|c| (c.image.clone(), c.geometry))
        .collect();
    images.push((
        common::building_image(64, 64),
        WindowGeometry::new(5, 5).unwrap(),
    ));
    images.push((
        common::smooth_image(64, 64),
        WindowGeometry::new(7, 7).unwrap(),
    ));
    images.push((
        Image::filled(12, 12, 200.0),
        WindowGeometry::new(3, 3).unwrap(),
    ));
    for (img, g) in &images {
        let filters = eigendecompose(&build_lag_covariance_fast(img, *g).unwrap()).unwrap();
        let d = decompose_with(img, &filters, *g, FilterPath::Auto).unwrap();
        let report = rms_distance_curve(img, &d).unwrap();
        worst = worst.max(report.d(g.k()));
    }
    outcome(
        worst <= RECONSTRUCTION_TOL,
        format!(
            "{} images, max D(K) {worst:.2e} (tol {RECONSTRUCTION_TOL:e})",
            images.len()
        ),
    )
}

fn main() {
    let cases = random_cases();
    let mats = bisymmetric_matrices();
    let criteria: Vec<Criterion> = vec![
        (
            "AC1 perfect reconstruction",
            Box::new(|| ac1_perfect_reconstruction(&cases)),
        ),
        ("AC2 bisymmetry", Box::new(|| ac2_bisymmetry(&cases))),
        (
            "AC3 eigenvector symmetry",
            Box::new(|| ac3_eigenvector_symmetry(&mats)),
        ),
        ("AC4 Fourier identities", Box::new(ac4_fourier_identities)),
        (
            "AC5 facade Taylor rows",
            Box::new(ac5_facade_taylor_rows),
        ),
        (
            "AC6 facade symmetry classes",
            Box::new(ac6_facade_classes),
        ),
        ("AC7 Taylor parity", Box::new(|| ac7_taylor_parity(&mats))),
        (
            "AC8 oracle equivalences",
            Box::new(|| ac8_oracle_equivalences(&cases)),
        ),
        ("AC9 denoising U-curve", Box::new(ac9_denoising_curve)),
        (
            "AC10 noise raises tail spectrum",
            Box::new(ac10_noise_raises_tail),
        ),
        (
            "AC11 noiseless curve convergence",
            Box::new(|| ac11_self_reference(&cases)),
        ),
    ];

    let mut failures = 0;
    for (name, run) in &criteria {
        let result = run();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        if !result.passed {
            failures += 1;
        }
        println!("[{tag}] {name}: {}", result.detail);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
