//! Subcommand implementations. Each command resolves its options from an
//! [`OptMap`], writes its outputs under the run directory, and (except on
//! replay) records a manifest naming them.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use dgff::compare::{
    fkg_check, monotone_domain_check, nested_correlation_domination, slepian_corollary_check,
    scaled_field_slepian_hypothesis, variance_ratio_check, ComparisonReport, EquicorrelatedSpec,
    EventDirection, MonotoneGeometry, NestedBoxesSpec, SupEvent,
};
use dgff::green::{green_dense, green_spectral, variance_profile, GreenOperator};
use dgff::lattice::{build_ball, build_box, Vertex};
use dgff::maxima::{
    empirical_tail_centered, estimate_moments, fit_rate, run_maxima, Centering, RateModel,
    TailSide,
};
use dgff::sampler::{write_sample_dump, SpectralSampler};
use dgff::walk::{harmonic_measure, potential_kernel};

use crate::manifest::RunManifest;
use crate::options::{
    fmt_f64, parse_grid, parse_pairs, parse_window, CliError, CliResult, OptMap,
};

fn create(out_dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out_dir.join(name))?))
}

fn finish_manifest(
    command: &str,
    opts: &OptMap,
    seed: u64,
    outputs: Vec<String>,
    out_dir: &Path,
    write_manifest: bool,
) -> CliResult<()> {
    if write_manifest {
        let manifest = RunManifest::new(command, opts.0.clone(), seed, outputs);
        manifest.write(out_dir, &format!("{command}_manifest.json"))?;
    }
    Ok(())
}

/// `green`: variance-profile CSV plus covariance/correlation CSV for the
/// requested pairs.
pub fn cmd_green(opts: &OptMap, out_dir: &Path, write_manifest: bool) -> CliResult<()> {
    let box_side: Option<i32> = opts.parse("box")?;
    let ball_radius: Option<i32> = opts.parse("ball")?;
    let (green, n_for_pairs): (GreenOperator, i32) = match (box_side, ball_radius) {
        (Some(n), None) => (green_spectral(n)?, n),
        (None, Some(r)) => {
            let ball = build_ball(Vertex::new(0, 0), r)?;
            (green_dense(&ball.region)?, 2 * r)
        }
        _ => {
            return Err(CliError::Usage(
                "green needs exactly one region: --box N or --ball R".into(),
            ))
        }
    };

    let profile = variance_profile(&green);
    let mut w = create(out_dir, "variance_profile.csv")?;
    writeln!(w, "x,y,variance")?;
    for (v, value) in green.region().interior().iter().zip(profile.values()) {
        writeln!(w, "{},{},{}", v.x, v.y, fmt_f64(*value))?;
    }
    w.flush()?;

    let mut outputs = vec!["variance_profile.csv".to_string()];
    if let Some(spec) = opts.get("pairs") {
        let pairs = parse_pairs(spec, n_for_pairs)?;
        let report = dgff::green::correlation(&green, &pairs)?;
        let mut w = create(out_dir, "covariance_pairs.csv")?;
        writeln!(w, "ux,uy,wx,wy,covariance,correlation")?;
        for e in &report.pairs {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.u.x,
                e.u.y,
                e.w.x,
                e.w.y,
                fmt_f64(e.covariance),
                fmt_f64(e.correlation)
            )?;
        }
        w.flush()?;
        outputs.push("covariance_pairs.csv".to_string());
        for e in &report.pairs {
            println!(
                "G(({},{}),({},{})) = {:.6}  corr = {:.6}",
                e.u.x, e.u.y, e.w.x, e.w.y, e.covariance, e.correlation
            );
        }
    }
    finish_manifest("green", opts, 0, outputs, out_dir, write_manifest)
}

/// `sample`: binary dump of spectral field samples.
pub fn cmd_sample(opts: &OptMap, out_dir: &Path, write_manifest: bool) -> CliResult<()> {
    let n: i32 = opts.require("box")?;
    let reps: u64 = opts.parse_or("reps", 1)?;
    let seed: u64 = opts.parse_or("seed", 0)?;
    if reps < 1 {
        return Err(CliError::Usage("need at least one replicate".into()));
    }
    let sampler = SpectralSampler::new(n)?;
    let samples = dgff::par::replicate_map(reps, |r| sampler.sample(seed, r));
    let mut w = create(out_dir, "samples.bin")?;
    write_sample_dump(&mut w, n as u64, seed, 0, &samples)?;
    w.flush()?;
    println!(
        "wrote {} samples of the side-{} box ({} interior values each)",
        reps,
        n,
        (n - 1) * (n - 1)
    );
    finish_manifest(
        "sample",
        opts,
        seed,
        vec!["samples.bin".to_string()],
        out_dir,
        write_manifest,
    )
}

#[derive(Serialize)]
struct MomentsOut {
    n: i32,
    replicates: u64,
    mean: f64,
    mean_std_error: f64,
    variance: f64,
    variance_std_error: f64,
}

/// `maxima`: raw per-replicate maxima CSV plus a moments summary.
pub fn cmd_maxima(opts: &OptMap, out_dir: &Path, write_manifest: bool) -> CliResult<()> {
    let n: i32 = opts.require("box")?;
    let reps: u64 = opts.parse_or("reps", 10_000)?;
    let seed: u64 = opts.parse_or("seed", 0)?;
    let stat = run_maxima(n, reps, seed)?;
    let moments = estimate_moments(&stat)?;

    let mut w = create(out_dir, "maxima.csv")?;
    writeln!(w, "n,replicate,max")?;
    for (r, m) in stat.values.iter().enumerate() {
        writeln!(w, "{},{},{}", n, r, fmt_f64(*m))?;
    }
    w.flush()?;

    let out = MomentsOut {
        n,
        replicates: reps,
        mean: moments.mean,
        mean_std_error: moments.mean_std_error,
        variance: moments.variance,
        variance_std_error: moments.variance_std_error,
    };
    std::fs::write(
        out_dir.join("maxima_moments.json"),
        serde_json::to_string_pretty(&out).expect("serializable"),
    )?;
    println!(
        "n={} reps={}: mean {:.4} ± {:.4}, variance {:.4} ± {:.4}",
        n, reps, out.mean, out.mean_std_error, out.variance, out.variance_std_error
    );
    finish_manifest(
        "maxima",
        opts,
        seed,
        vec!["maxima.csv".to_string(), "maxima_moments.json".to_string()],
        out_dir,
        write_manifest,
    )
}

#[derive(Serialize)]
struct FitOut {
    side: String,
    model: String,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    window_lo: f64,
    window_hi: f64,
}

/// `tails`: empirical tail CSVs and rate-fit JSON.
pub fn cmd_tails(opts: &OptMap, out_dir: &Path, write_manifest: bool) -> CliResult<()> {
    let n: i32 = opts.require("box")?;
    let reps: u64 = opts.parse_or("reps", 100_000)?;
    let seed: u64 = opts.parse_or("seed", 0)?;
    let side = opts.get("side").unwrap_or("both").to_string();
    let grid = parse_grid(opts.get("grid").unwrap_or("0:3:0.25"))?;
    let centering = match opts.get("centering").unwrap_or("mean") {
        "mean" => Centering::Mean,
        "median" => Centering::Median,
        other => {
            return Err(CliError::Usage(format!(
                "centering must be mean or median, got {other:?}"
            )))
        }
    };
    let sides: Vec<TailSide> = match side.as_str() {
        "right" => vec![TailSide::Right],
        "left" => vec![TailSide::Left],
        "both" => vec![TailSide::Right, TailSide::Left],
        other => {
            return Err(CliError::Usage(format!(
                "side must be right, left or both, got {other:?}"
            )))
        }
    };

    let stat = run_maxima(n, reps, seed)?;
    let mut outputs = Vec::new();
    let mut fits = Vec::new();
    for s in sides {
        let tail = empirical_tail_centered(&stat, s, &grid, centering)?;
        if tail.lambda_cap_exceeded {
            eprintln!(
                "warning: grid extends beyond (log n)^(2/3) = {:.2}; tail bounds are only \
                 proven below it",
                (n as f64).ln().powf(2.0 / 3.0)
            );
        }
        let name = match s {
            TailSide::Right => "tails_right.csv",
            TailSide::Left => "tails_left.csv",
        };
        let mut w = create(out_dir, name)?;
        writeln!(w, "lambda,probability,wilson_lo,wilson_hi")?;
        for i in 0..tail.lambda_grid.len() {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(tail.lambda_grid[i]),
                fmt_f64(tail.probabilities[i]),
                fmt_f64(tail.wilson_bands[i].0),
                fmt_f64(tail.wilson_bands[i].1)
            )?;
        }
        w.flush()?;
        outputs.push(name.to_string());

        let window = match opts.get("window") {
            Some(spec) => parse_window(spec)?,
            None => match s {
                TailSide::Right => (1.0, 3.0),
                TailSide::Left => (0.5, 2.0),
            },
        };
        match fit_rate(&tail, window) {
            Ok(fit) => {
                println!(
                    "{:?} tail fit on [{}, {}]: slope {:.4}, R^2 {:.4}",
                    s, window.0, window.1, fit.slope, fit.r_squared
                );
                fits.push(FitOut {
                    side: format!("{s:?}").to_lowercase(),
                    model: match fit.model {
                        RateModel::LogLinear => "log-linear".to_string(),
                        RateModel::LogLogLinear => "loglog-linear".to_string(),
                    },
                    slope: fit.slope,
                    intercept: fit.intercept,
                    r_squared: fit.r_squared,
                    window_lo: window.0,
                    window_hi: window.1,
                });
            }
            Err(e) => eprintln!("warning: {s:?} tail fit skipped: {e}"),
        }
    }
    std::fs::write(
        out_dir.join("fits.json"),
        serde_json::to_string_pretty(&fits).expect("serializable"),
    )?;
    outputs.push("fits.json".to_string());
    finish_manifest("tails", opts, seed, outputs, out_dir, write_manifest)
}

/// `verify`: run the comparison suite and print a pass/fail table. Exit
/// status 0 only when every check passes.
pub fn cmd_verify(opts: &OptMap, out_dir: &Path, write_manifest: bool) -> CliResult<bool> {
    let level = opts.get("level").unwrap_or("full").to_string();
    let reps: u64 = opts.parse_or("reps", 20_000)?;
    let seed: u64 = opts.parse_or("seed", 0)?;
    if level != "fast" && level != "full" {
        return Err(CliError::Usage(format!(
            "level must be fast or full, got {level:?}"
        )));
    }

    let mut reports: Vec<ComparisonReport> = Vec::new();
    // exact checks
    reports.push(nested_correlation_domination(NestedBoxesSpec::new(16, 4)?)?);
    reports.push(nested_correlation_domination(NestedBoxesSpec::new(24, 6)?)?);
    reports.push(variance_ratio_check(NestedBoxesSpec::new(32, 8)?, 2.0, 4.0)?);
    reports.push(variance_ratio_check(NestedBoxesSpec::new(64, 16)?, 2.0, 4.0)?);
    reports.extend(scaled_field_slepian_hypothesis(NestedBoxesSpec::new(16, 4)?)?);

    if level == "full" {
        for &rho in &[0.05, 0.1, 0.2, 0.4] {
            for &n in &[10usize, 50, 100] {
                let spec = EquicorrelatedSpec::new(n, rho)?;
                reports.extend(slepian_corollary_check(spec, reps.max(10_000), seed)?);
            }
        }
        let outer = build_box(16, Vertex::new(0, 0))?;
        let inner = build_box(8, Vertex::new(4, 4))?;
        let geom = MonotoneGeometry::new(outer, inner)?;
        reports.extend(monotone_domain_check(&geom, &[0.5, 1.0, 2.0], reps, seed)?);
        let n = 32;
        let left: Vec<Vertex> = (1..n / 2)
            .flat_map(|x| (1..n).map(move |y| Vertex::new(x, y)))
            .collect();
        let right: Vec<Vertex> = (n / 2..n)
            .flat_map(|x| (1..n).map(move |y| Vertex::new(x, y)))
            .collect();
        let m_hat = estimate_moments(&run_maxima(n, reps.max(10_000), seed)?)?.mean;
        let a = SupEvent {
            vertices: left,
            threshold: m_hat,
            direction: EventDirection::Decreasing,
        };
        let b = SupEvent {
            vertices: right,
            threshold: m_hat,
            direction: EventDirection::Decreasing,
        };
        reports.push(fkg_check(n, (&a, &b), reps.max(50_000), seed)?);
    }

    println!(
        "{:<58} {:>12} {:>12} {:>11}  status",
        "check", "lhs", "rhs", "margin"
    );
    let mut all_pass = true;
    for r in &reports {
        all_pass &= r.pass;
        println!(
            "{:<58} {:>12.4e} {:>12.4e} {:>11.3e}  {}",
            r.check,
            r.lhs,
            r.rhs,
            r.margin,
            if r.pass { "PASS" } else { "FAIL" }
        );
        if !r.pass {
            eprintln!("FAILED: {}", serde_json::to_string(r).expect("serializable"));
        }
    }
    std::fs::write(
        out_dir.join("verify_report.json"),
        serde_json::to_string_pretty(&reports).expect("serializable"),
    )?;
    finish_manifest(
        "verify",
        opts,
        seed,
        vec!["verify_report.json".to_string()],
        out_dir,
        write_manifest,
    )?;
    Ok(all_pass)
}

/// `kernel`: potential-kernel CSV, plus the harmonic kernel of a box when
/// requested.
pub fn cmd_kernel(opts: &OptMap, out_dir: &Path, write_manifest: bool) -> CliResult<()> {
    let max_radius: i32 = opts.parse_or("max-radius", 32)?;
    let kernel = potential_kernel(max_radius)?;
    let mut w = create(out_dir, "potential_kernel.csv")?;
    kernel.write_csv(&mut w)?;
    w.flush()?;
    println!(
        "potential kernel to radius {max_radius}; calibrated constant {:.6}",
        kernel.kappa0()
    );
    let mut outputs = vec!["potential_kernel.csv".to_string()];
    if let Some(n) = opts.parse::<i32>("box")? {
        let region = build_box(n, Vertex::new(0, 0))?;
        let hk = harmonic_measure(&region)?;
        let mut w = create(out_dir, "harmonic_kernel.csv")?;
        hk.write_csv(&mut w)?;
        w.flush()?;
        outputs.push("harmonic_kernel.csv".to_string());
    }
    finish_manifest("kernel", opts, 0, outputs, out_dir, write_manifest)
}
