//! Subcommand implementations.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use lambda_qpt::analysis::{fidelity_sweep, fit_nu, fit_zeta, gap_minima, pseudo_critical_point_with, GapSearch, DEFAULT_N_GRID};
use lambda_qpt::dynamics::{berry_phase_linearized, integrate_loop, LoopOptions, LOOP_ATOL, LOOP_RTOL};
use lambda_qpt::meanfield::{critical_point, energy_derivative_profile, uniform_grid};
use lambda_qpt::quantum::{build_hamiltonian, eigensolve_dense, eigensolve_lowest, ground_observables, GroundSolver};
use lambda_qpt::{Couplings, FockBasis, ModelParams};

use crate::args::{
    BasisArgs, Command, FidelityArgs, GapMinArgs, GeophaseArgs, GridArgs, LoopArgs, MeanfieldArgs, ScalingArgs,
    SpectrumArgs, SweepArgs, TrajectoryArgs,
};
use crate::config::Resolved;
use crate::output::{float, int, Run, Table};

#[derive(Debug)]
pub enum CmdError {
    /// A required parameter is missing from both flags and config.
    Usage(String),
    Failure(String),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(m) | CmdError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<lambda_qpt::Error> for CmdError {
    fn from(e: lambda_qpt::Error) -> Self {
        CmdError::Failure(e.to_string())
    }
}

impl From<String> for CmdError {
    fn from(e: String) -> Self {
        CmdError::Failure(e)
    }
}

type Result<T> = std::result::Result<T, CmdError>;

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| CmdError::Usage(format!("missing required parameter --{flag}")))
}

fn grid(g: &GridArgs, min: f64, max: f64, steps: usize) -> (f64, f64, usize, Vec<f64>) {
    let (a, b, s) = (g.z_min.unwrap_or(min), g.z_max.unwrap_or(max), g.z_steps.unwrap_or(steps));
    (a, b, s, uniform_grid(a, b, s))
}

pub fn dispatch(r: &Resolved, run: &mut Run) -> Result<()> {
    match &r.command {
        Command::Basis(a) => basis(a, run),
        Command::Spectrum(a) => spectrum(a, run),
        Command::Sweep(a) => sweep(a, run),
        Command::Meanfield(a) => meanfield(a, run),
        Command::Geophase(a) => geophase(a, run),
        Command::Trajectory(a) => trajectory(a, run),
        Command::GapMin(a) => gap_min(a, run),
        Command::Scaling(a) => scaling(a, run),
        Command::Fidelity(a) => fidelity(a, run),
    }
}

fn basis(a: &BasisArgs, run: &mut Run) -> Result<()> {
    let n = required(a.n, "n")?;
    run.set_parameters(json!({ "n": n }));
    let b = FockBasis::new(n)?;
    let mut t = Table::new(&["index", "n_a", "n_g", "n_e"]);
    for (i, s) in b.iter() {
        t.push(vec![int(i as i64), int(s.n_a), int(s.n_g), int(s.n_e)]);
    }
    Ok(run.write_table(&t)?)
}

fn spectrum(a: &SpectrumArgs, run: &mut Run) -> Result<()> {
    let n = required(a.n, "n")?;
    let (z, delta, rho, phi) = (a.z.unwrap_or(1.0), a.model.delta.unwrap_or(0.0), a.model.rho.unwrap_or(1.0), a.model.phi.unwrap_or(0.0));
    let k = a.k.unwrap_or(0);
    let params = ModelParams::new(n, delta, z, rho, phi)?;
    run.set_parameters(json!({ "n": n, "z": z, "delta": delta, "rho": rho, "phi": params.phi, "k": k }));
    let h = build_hamiltonian(&params, &FockBasis::new(n)?)?;
    let energies = if k == 0 || k >= h.dim() { eigensolve_dense(&h)?.energies } else { eigensolve_lowest(&h, k)?.energies };
    let scale = if run.raw_units() { 1.0 } else { rho };
    let mut t = Table::new(&["index", "energy", "energy_per_N_rho"]);
    for (i, e) in energies.iter().enumerate() {
        t.push(vec![int(i as i64), float(e / scale), float(e / (n as f64 * rho))]);
    }
    Ok(run.write_table(&t)?)
}

fn sweep(a: &SweepArgs, run: &mut Run) -> Result<()> {
    let n = required(a.n, "n")?;
    let (delta, rho, phi) = (a.model.delta.unwrap_or(0.0), a.model.rho.unwrap_or(1.0), a.model.phi.unwrap_or(0.0));
    let (z_min, z_max, z_steps, zs) = grid(&a.grid, 0.0, 4.0, 81);
    let base = ModelParams::new(n, delta, z_min, rho, phi)?;
    run.set_parameters(json!({
        "n": n, "delta": delta, "rho": rho, "phi": base.phi, "z_min": z_min, "z_max": z_max, "z_steps": z_steps,
    }));
    let rows = zs
        .par_iter()
        .map(|&z| Ok((z, ground_observables(&base.with_z(z)?)?)))
        .collect::<std::result::Result<Vec<_>, lambda_qpt::Error>>()?;
    let scale = if run.raw_units() { rho } else { 1.0 };
    let mut t = Table::new(&["z", "E0", "E1", "gap", "atomic_fraction"]);
    for (z, g) in rows {
        t.push(vec![float(z), float(g.e0 * scale), float(g.e1 * scale), float(g.gap * scale), float(g.atomic_fraction)]);
    }
    Ok(run.write_table(&t)?)
}

fn meanfield(a: &MeanfieldArgs, run: &mut Run) -> Result<()> {
    let (delta, rho, h) = (a.delta.unwrap_or(0.0), a.rho.unwrap_or(1.0), a.fd_step.unwrap_or(1e-3));
    let (z_min, z_max, z_steps, zs) = grid(&a.grid, 0.0, 4.0, 81);
    run.set_parameters(json!({
        "delta": delta, "rho": rho, "fd_step": h, "z_min": z_min, "z_max": z_max, "z_steps": z_steps,
    }));
    let c = Couplings::new(delta, z_min, rho, 0.0)?;
    let profile = energy_derivative_profile(&zs, &c, h)?;
    run.record("discontinuity_cell", json!([profile.discontinuity.0, profile.discontinuity.1]));
    run.record("critical_point", json!(critical_point(rho, delta)));
    let scale = if run.raw_units() { 1.0 } else { rho };
    let mut t = Table::new(&["z", "mu", "E", "dEdz", "d2Edz2", "a2", "p1", "p2"]);
    for p in &profile.points {
        let s = &p.solution.state;
        t.push(vec![
            float(p.z),
            float(p.solution.mu / scale),
            float(p.solution.energy / scale),
            float(p.d_energy),
            float(p.d2_energy * scale),
            float(s.a.norm_sqr()),
            float(s.b_g.norm_sqr()),
            float(s.b_e.norm_sqr()),
        ]);
    }
    Ok(run.write_table(&t)?)
}

fn loop_options(l: &LoopArgs, default_samples: usize) -> LoopOptions {
    let mut o = LoopOptions::default();
    if let Some(rtol) = l.rtol {
        o.control.rtol = rtol;
        o.control.atol = rtol * (LOOP_ATOL / LOOP_RTOL);
    }
    o.samples = l.samples.unwrap_or(default_samples);
    o
}

fn geophase(a: &GeophaseArgs, run: &mut Run) -> Result<()> {
    let zs = a.z.clone().unwrap_or_else(|| vec![1.0]);
    let periods = a.period.clone().unwrap_or_else(|| vec![500.0]);
    let (delta, rho) = (a.run.delta.unwrap_or(0.0), a.run.rho.unwrap_or(1.0));
    let opts = loop_options(&a.run, 0);
    run.set_parameters(json!({
        "z": zs, "period": periods, "delta": delta, "rho": rho, "rtol": opts.control.rtol, "atol": opts.control.atol,
        "samples": opts.samples,
    }));
    let jobs: Vec<(f64, f64)> = zs.iter().flat_map(|&z| periods.iter().map(move |&p| (z, p))).collect();
    let results = jobs
        .par_iter()
        .map(|&(z, period)| integrate_loop(&Couplings::new(delta, z, rho, 0.0)?, period, &opts))
        .collect::<std::result::Result<Vec<_>, lambda_qpt::Error>>()?;
    let mut t = Table::new(&["z", "T", "lambda_total", "lambda_dynamic", "lambda_g", "berry_linearized"]);
    let mut loops = vec![];
    for (&(z, period), r) in jobs.iter().zip(&results) {
        let berry = if delta == 0.0 { berry_phase_linearized(z, rho).unwrap_or(f64::NAN) } else { f64::NAN };
        t.push(vec![float(z), float(period), float(r.lambda_total), float(r.lambda_dynamic), float(r.lambda_g), float(berry)]);
        let mut entry = json!({
            "z": z, "T": period, "mu0": r.mu0, "mean_p1": r.mean_p1, "max_norm_drift": r.max_norm_drift,
        });
        if opts.samples > 0 {
            entry["trajectory"] = serde_json::to_value(&r.trajectory).map_err(|e| e.to_string())?;
        }
        loops.push(entry);
    }
    run.record("loops", Value::Array(loops));
    Ok(run.write_table(&t)?)
}

fn trajectory(a: &TrajectoryArgs, run: &mut Run) -> Result<()> {
    let (z, period) = (a.z.unwrap_or(1.0), a.period.unwrap_or(500.0));
    let (delta, rho) = (a.run.delta.unwrap_or(0.0), a.run.rho.unwrap_or(1.0));
    let opts = loop_options(&a.run, 200);
    run.set_parameters(json!({
        "z": z, "period": period, "delta": delta, "rho": rho, "rtol": opts.control.rtol, "atol": opts.control.atol,
        "samples": opts.samples,
    }));
    let r = integrate_loop(&Couplings::new(delta, z, rho, 0.0)?, period, &opts)?;
    run.record("lambda_g", json!(r.lambda_g));
    run.record("mean_p1", json!(r.mean_p1));
    let mut t = Table::new(&["t", "phi", "re_a", "im_a", "re_bg", "im_bg", "re_be", "im_be", "norm", "p1", "p2"]);
    for s in &r.trajectory {
        let st = &s.state;
        t.push(vec![
            float(s.t),
            float(s.phi),
            float(st.a.re),
            float(st.a.im),
            float(st.b_g.re),
            float(st.b_g.im),
            float(st.b_e.re),
            float(st.b_e.im),
            float(st.norm()),
            float(st.b_g.norm_sqr()),
            float(st.b_e.norm_sqr()),
        ]);
    }
    Ok(run.write_table(&t)?)
}

fn gap_min(a: &GapMinArgs, run: &mut Run) -> Result<()> {
    let n = required(a.n, "n")?;
    let (delta, rho) = (a.delta.unwrap_or(0.0), a.rho.unwrap_or(1.0));
    let zc = critical_point(rho, delta);
    let (lo, hi) = (a.z_lo.unwrap_or(zc - 0.8 * rho), a.z_hi.unwrap_or(zc + 0.1 * rho));
    let search = GapSearch { scan_points: a.scan_points.unwrap_or(41), ..GapSearch::default() };
    run.set_parameters(json!({
        "n": n, "delta": delta, "rho": rho, "z_lo": lo, "z_hi": hi, "scan_points": search.scan_points,
        "tolerance": search.tolerance,
    }));
    let mut solver = GroundSolver::new(n)?.with_warm_start(true);
    let m = pseudo_critical_point_with(&mut solver, delta, rho, (lo, hi), &search)?;
    run.record("evaluations", json!(m.evaluations));
    let scale = if run.raw_units() { rho } else { 1.0 };
    let mut t = Table::new(&["N", "z_N", "gap_min"]);
    t.push(vec![int(m.n), float(m.z_n), float(m.gap_min * scale)]);
    Ok(run.write_table(&t)?)
}

fn scaling(a: &ScalingArgs, run: &mut Run) -> Result<()> {
    let ns = a.n_list.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
    let (delta, rho) = (a.delta.unwrap_or(0.0), a.rho.unwrap_or(1.0));
    let zc = critical_point(rho, delta);
    let (lo, hi) = (a.z_lo.unwrap_or(zc - 0.5 * rho), a.z_hi.unwrap_or(zc + 0.1 * rho));
    run.set_parameters(json!({ "n_list": ns, "delta": delta, "rho": rho, "z_lo": lo, "z_hi": hi, "z_c": zc }));
    let minima = gap_minima(&ns, delta, rho, (lo, hi), hi)?;

    let scale = if run.raw_units() { rho } else { 1.0 };
    let mut t = Table::new(&["N", "z_N", "gap_min"]);
    for m in &minima {
        t.push(vec![int(m.n), float(m.z_n), float(m.gap_min * scale)]);
    }
    run.write_table(&t)?;

    let nu = fit_nu(&minima.iter().map(|m| (m.n, m.z_n)).collect::<Vec<_>>(), zc);
    let zeta = fit_zeta(&minima.iter().map(|m| (m.n, m.gap_min)).collect::<Vec<_>>());
    let report = match (nu, zeta) {
        (Ok(nu), Ok(zeta)) => json!({
            "nu": nu.exponent, "kappa": nu.prefactor, "zeta": zeta.exponent, "gamma": zeta.prefactor,
            "r2_nu": nu.r_squared, "r2_zeta": zeta.r_squared,
            "nu_stderr": nu.exponent_stderr, "kappa_stderr": nu.prefactor_stderr,
            "zeta_stderr": zeta.exponent_stderr, "gamma_stderr": zeta.prefactor_stderr,
        }),
        (nu, zeta) => {
            let reason = nu.err().or(zeta.err()).map(|e| e.to_string()).unwrap_or_default();
            eprintln!("warning: scaling fit skipped: {reason}");
            json!({
                "nu": null, "kappa": null, "zeta": null, "gamma": null, "r2_nu": null, "r2_zeta": null,
                "fit_error": reason,
            })
        }
    };
    Ok(run.write_side_json("fit.json", &report)?)
}

fn fidelity(a: &FidelityArgs, run: &mut Run) -> Result<()> {
    let n = required(a.n, "n")?;
    let (alpha, rho) = (a.alpha.unwrap_or(0.1), a.rho.unwrap_or(1.0));
    let (z_min, z_max, z_steps, zs) = grid(&a.grid, 0.5, 3.5, 301);
    run.set_parameters(json!({
        "n": n, "alpha": alpha, "rho": rho, "z_min": z_min, "z_max": z_max, "z_steps": z_steps,
    }));
    let s = fidelity_sweep(n, alpha, &zs, rho)?;
    let mut t = Table::new(&["z", "F"]);
    for r in &s.records {
        t.push(vec![float(r.z), float(r.fidelity)]);
    }
    run.write_table(&t)?;
    let dip = json!({
        "n": n, "alpha": alpha, "z_min": s.z_min, "f_min": s.f_min, "local_minima": s.local_minima,
        "critical_point": critical_point(rho, alpha),
    });
    Ok(run.write_side_json("dip.json", &dip)?)
}
