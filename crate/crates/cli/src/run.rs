use std::fs::File;
use std::io::{self, BufWriter, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use stable_extrema::density::{
    density_profile, pdf, pdf_asymptotic_large_x, pdf_asymptotic_small_x, pdf_ckl_series,
    pdf_mellin_inversion, CdfInverter, MellinSource,
};
use stable_extrema::mc::{ks_against_supremum_cdf, sample_supremum};
use stable_extrema::mellin::mellin;
use stable_extrema::params::CKL_DEFAULT_TOL;
use stable_extrema::wiener_hopf::{phi, PhiMethod};
use stable_extrema::{detect_ckl, make_params, EvalResult, Parameters};
use thiserror::Error;

use crate::args::{
    parse_alpha, points, Command, DensityArgs, DensityMethod, MellinArgs, OutputArgs, ParamArgs,
    PhiArgs, Quantity, SimulateArgs, VerifyArgs,
};
use crate::output::{Cell, Table};
use crate::suites::{run_suite, McConfig};

/// Bad input; reported with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

/// Runs one command and returns the process exit code.
pub fn run(command: &Command) -> Result<i32, ConfigError> {
    match command {
        Command::Phi(a) => run_phi(a),
        Command::Mellin(a) => run_mellin(a),
        Command::Density(a) => run_density(a),
        Command::Verify(a) => run_verify(a),
        Command::Simulate(a) => run_simulate(a),
    }
}

fn emit(table: &Table, out: &OutputArgs) -> Result<(), ConfigError> {
    let io_err = |e: io::Error| ConfigError(format!("cannot write output: {e}"));
    match &out.output {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| ConfigError(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            table.write(out.format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(out.format, &mut w).map_err(io_err)
        }
    }
}

fn param_meta(table: &mut Table, p: &Parameters, args: &ParamArgs) {
    table.meta("alpha", p.alpha());
    table.meta("rho", p.rho());
    table.meta("beta", p.beta());
    table.meta("alpha_input", args.alpha.clone());
    table.meta("rational", p.rational().map(|r| r.to_string()));
}

/// Value cells, or NaN with the error written to standard error.
fn value_cells(label: f64, r: stable_extrema::Result<EvalResult>, complex: bool) -> Vec<Cell> {
    match r {
        Ok(v) => {
            let mut cells = vec![Cell::Num(v.value.re)];
            if complex {
                cells.push(Cell::Num(v.value.im));
            }
            cells.push(Cell::Num(v.abs_err));
            cells.push(Cell::Text(v.method.to_string()));
            cells
        }
        Err(e) => {
            eprintln!("at {label}: {e}");
            let mut cells = vec![Cell::Num(f64::NAN)];
            if complex {
                cells.push(Cell::Num(f64::NAN));
            }
            cells.push(Cell::Num(f64::NAN));
            cells.push(Cell::Text("error".into()));
            cells
        }
    }
}

fn run_phi(a: &PhiArgs) -> Result<i32, ConfigError> {
    let p = a.params.to_params()?;
    let method: PhiMethod = a
        .method
        .parse()
        .map_err(|e: stable_extrema::Error| ConfigError(e.to_string()))?;
    let zs = points(a.z, a.grid.as_deref(), "z")?;
    let rows: Vec<Vec<Cell>> = zs
        .par_iter()
        .map(|&z| {
            let mut row = vec![Cell::Num(z)];
            row.extend(value_cells(
                z,
                phi(&p, Complex64::new(z, 0.0), method),
                true,
            ));
            row
        })
        .collect();
    let mut t = Table::new(vec!["z", "re", "im", "err_est", "method"]);
    t.meta("command", "phi");
    param_meta(&mut t, &p, &a.params);
    t.meta("grid", a.grid.clone());
    t.meta("method", method.as_str());
    rows.into_iter().for_each(|r| t.push(r));
    emit(&t, &a.out)?;
    Ok(0)
}

fn run_mellin(a: &MellinArgs) -> Result<i32, ConfigError> {
    let p = a.params.to_params()?;
    let ss = points(a.s, a.grid.as_deref(), "s")?;
    let rows: Vec<Vec<Cell>> = ss
        .par_iter()
        .map(|&s| {
            let mut row = vec![Cell::Num(s), Cell::Num(a.imag)];
            row.extend(value_cells(s, mellin(&p, Complex64::new(s, a.imag)), true));
            row
        })
        .collect();
    let mut t = Table::new(vec!["s_re", "s_im", "re", "im", "err_est", "method"]);
    t.meta("command", "mellin");
    param_meta(&mut t, &p, &a.params);
    t.meta("grid", a.grid.clone());
    rows.into_iter().for_each(|r| t.push(r));
    emit(&t, &a.out)?;
    Ok(0)
}

fn density_values(
    a: &DensityArgs,
    p: &Parameters,
    xs: &[f64],
) -> Result<Vec<stable_extrema::Result<EvalResult>>, ConfigError> {
    if !(a.time > 0.0 && a.time.is_finite()) {
        return Err(ConfigError(format!(
            "--time must be positive, got {}",
            a.time
        )));
    }
    if !(a.tol > 0.0) {
        return Err(ConfigError(format!(
            "--tol must be positive, got {}",
            a.tol
        )));
    }
    let scale = a.time.powf(1.0 / p.alpha());
    let unscaled: Vec<f64> = xs.iter().map(|x| x / scale).collect();
    let rescale = |r: stable_extrema::Result<EvalResult>| {
        r.map(|v| {
            if a.quantity == Quantity::Pdf {
                EvalResult::real(v.re() / scale, v.abs_err / scale, v.terms, v.method)
                    .flagged(v.near_singular)
            } else {
                v
            }
        })
    };
    if a.quantity == Quantity::Cdf {
        let pos: Vec<f64> = unscaled.iter().copied().filter(|&x| x > 0.0).collect();
        let inv = match pos.is_empty() {
            true => None,
            false => {
                let lo = pos.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = pos.iter().copied().fold(0.0, f64::max);
                Some(
                    CdfInverter::new(p, lo, hi, a.tol, MellinSource::Auto)
                        .map_err(|e| ConfigError(e.to_string()))?,
                )
            }
        };
        return Ok(unscaled
            .par_iter()
            .map(|&x| match &inv {
                Some(inv) if x > 0.0 => inv.cdf(x),
                _ => Ok(EvalResult::real(
                    0.0,
                    0.0,
                    0,
                    stable_extrema::Method::Direct,
                )),
            })
            .collect());
    }
    let ckl = detect_ckl(p, p.rational(), CKL_DEFAULT_TOL);
    if a.method == DensityMethod::Series && ckl.is_none() {
        return Err(ConfigError(format!(
            "{p} has no C(k,l) certificate; the convergent series does not apply"
        )));
    }
    if a.method == DensityMethod::Auto && unscaled.iter().all(|&x| x > 0.0) {
        if let Ok(prof) = density_profile(p, &unscaled) {
            return Ok(prof
                .p_values
                .iter()
                .zip(&prof.errs)
                .zip(&prof.methods)
                .map(|((&v, &e), &m)| rescale(Ok(EvalResult::real(v, e, 0, m))))
                .collect());
        }
    }
    Ok(unscaled
        .par_iter()
        .map(|&x| {
            let r = match a.method {
                DensityMethod::Auto => pdf(p, x),
                DensityMethod::Series => pdf_ckl_series(p, ckl.expect("checked above"), x),
                DensityMethod::AsymptoticSmall => pdf_asymptotic_small_x(p, x),
                DensityMethod::AsymptoticLarge => pdf_asymptotic_large_x(p, x),
                DensityMethod::Inversion => pdf_mellin_inversion(p, x, a.tol),
            };
            rescale(r)
        })
        .collect())
}

fn run_density(a: &DensityArgs) -> Result<i32, ConfigError> {
    let p = a.params.to_params()?;
    let xs = points(a.x, a.grid.as_deref(), "x")?;
    let values = density_values(a, &p, &xs)?;
    let name = match a.quantity {
        Quantity::Pdf => "p",
        Quantity::Cdf => "cdf",
    };
    let mut t = Table::new(vec!["x", name, "err_est", "method"]);
    t.meta("command", "density");
    param_meta(&mut t, &p, &a.params);
    t.meta("grid", a.grid.clone());
    t.meta("quantity", name);
    t.meta("time", a.time);
    t.meta("tol", a.tol);
    for (&x, r) in xs.iter().zip(values) {
        let mut row = vec![Cell::Num(x)];
        row.extend(value_cells(x, r, false));
        t.push(row);
    }
    emit(&t, &a.out)?;
    Ok(0)
}

fn run_verify(a: &VerifyArgs) -> Result<i32, ConfigError> {
    let params = match (&a.alpha, a.rho) {
        (Some(alpha), Some(rho)) => {
            let (v, ra) = parse_alpha(alpha)?;
            let p = make_params(v, rho).map_err(|e| ConfigError(e.to_string()))?;
            Some(match ra {
                Some(ra) => p
                    .with_rational(ra)
                    .map_err(|e| ConfigError(e.to_string()))?,
                None => p,
            })
        }
        (None, None) => None,
        _ => {
            return Err(ConfigError(
                "give both --alpha and --rho, or neither".into(),
            ))
        }
    };
    if !a.steps.is_power_of_two() {
        return Err(ConfigError(format!(
            "--steps must be a power of two, got {}",
            a.steps
        )));
    }
    let mc = McConfig {
        n_paths: a.paths,
        n_steps: a.steps,
        seed: a.seed,
    };
    let checks = run_suite(a.suite, params.as_ref(), a.seed, mc);
    let mut t = Table::new(vec!["suite", "check", "residual", "tolerance", "passed"]);
    t.meta("command", "verify");
    t.meta("suite", a.suite.as_str());
    t.meta("seed", a.seed);
    t.meta("paths", a.paths);
    t.meta("steps", a.steps);
    t.meta("alpha", params.map(|p| p.alpha()));
    t.meta("rho", params.map(|p| p.rho()));
    let mut failed = 0;
    for c in &checks {
        if !c.passed() {
            failed += 1;
            eprintln!(
                "FAIL {} / {}: {:e} > {:e}",
                c.suite, c.name, c.residual, c.tolerance
            );
        }
        t.push(vec![
            Cell::Text(c.suite.into()),
            Cell::Text(c.name.clone()),
            Cell::Num(c.residual),
            Cell::Num(c.tolerance),
            Cell::Bool(c.passed()),
        ]);
    }
    t.meta("failed", json!(failed));
    emit(&t, &a.out)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

fn run_simulate(a: &SimulateArgs) -> Result<i32, ConfigError> {
    let p = a.params.to_params()?;
    let batch =
        sample_supremum(&p, a.paths, a.steps, a.seed).map_err(|e| ConfigError(e.to_string()))?;
    let mut t = Table::new(vec!["path", "supremum"]);
    t.meta("command", "simulate");
    param_meta(&mut t, &p, &a.params);
    t.meta("paths", a.paths);
    t.meta("steps", a.steps);
    t.meta("seed", a.seed);
    if a.ks {
        match ks_against_supremum_cdf(&batch) {
            Ok(g) => {
                eprintln!("ks = {:.6} against {}", g.ks_stat, g.reference);
                t.meta("ks", g.ks_stat);
                t.meta("ks_reference", g.reference);
            }
            Err(e) => eprintln!("ks not available: {e}"),
        }
    }
    for (i, &v) in batch.values.iter().enumerate() {
        t.push(vec![Cell::Int(i as u64), Cell::Num(v)]);
    }
    emit(&t, &a.out)?;
    Ok(0)
}
