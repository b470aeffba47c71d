//! The subcommands. Each returns a table; radii and levels run in parallel
//! and are collected in input order.

use rayon::prelude::*;
use vdw_core::anomaly::{abraham_residual, pressure};
use vdw_core::bec::{box_shift, discriminate, trap_levels, Geometry, TrapModel};
use vdw_core::media::{make_profile, MediumProfile};
use vdw_core::stress_engine::renormalized_stress;

use crate::config::RunConfig;
use crate::diag;
use crate::error::CliError;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Renormalized stress over a radial sweep.
    Stress,
    /// Anomalous pressure over a radial sweep.
    Pressure,
    /// Abraham-identity residuals with and without the anomaly.
    AbrahamCheck,
    /// Condensate in a box: shifts under both Compton readings.
    BecBox,
    /// Condensate in a harmonic trap: exact and asymptotic shifts.
    BecTrap,
    /// Invariant suites with measured values.
    Diag,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stress => "stress",
            Command::Pressure => "pressure",
            Command::AbrahamCheck => "abraham-check",
            Command::BecBox => "bec-box",
            Command::BecTrap => "bec-trap",
            Command::Diag => "diag",
        }
    }

    pub fn needs_config(&self) -> bool {
        !matches!(self, Command::Diag)
    }
}

pub fn execute(command: Command, config: &RunConfig) -> Result<Table, CliError> {
    match command {
        Command::Stress => stress(config),
        Command::Pressure => pressure_sweep(config),
        Command::AbrahamCheck => abraham_check(config),
        Command::BecBox => bec_box(config),
        Command::BecTrap => bec_trap(config),
        Command::Diag => Ok(diag::run()),
    }
}

fn sweep_profile(config: &RunConfig) -> Result<(MediumProfile, &[f64]), CliError> {
    let profile = make_profile(config.profile()?)?;
    let radii = config.radii()?;
    for &r in radii {
        profile.check_radius(r)?;
    }
    config.numerics.stress.validate()?;
    config.numerics.anomaly.validate()?;
    Ok((profile, radii))
}

fn collect<T, E: Into<CliError>>(items: Vec<Result<T, E>>) -> Result<Vec<T>, CliError> {
    items.into_iter().map(|r| r.map_err(Into::into)).collect()
}

fn stress(config: &RunConfig) -> Result<Table, CliError> {
    let (profile, radii) = sweep_profile(config)?;
    let spec = config.numerics.stress;
    let results = collect(radii.par_iter().map(|&r| renormalized_stress(&profile, r, &spec)).collect())?;
    let mut t = Table::new("stress", &["r", "sigma_rr", "sigma_thth", "trace_E", "trace_M", "l_max", "err"]);
    for s in results {
        t.push(vec![
            s.r.into(),
            s.sigma_rr.into(),
            s.sigma_thth.into(),
            s.trace_e.into(),
            s.trace_m.into(),
            s.l_max_used.into(),
            s.error.into(),
        ]);
    }
    Ok(t)
}

fn pressure_sweep(config: &RunConfig) -> Result<Table, CliError> {
    let (profile, radii) = sweep_profile(config)?;
    let rho0 = config.numerics.anomaly.rho0_cutoff;
    let results = collect(radii.par_iter().map(|&r| pressure(&profile, r, rho0)).collect())?;
    let mut t = Table::new("pressure", &["r", "p", "rho0", "err"]);
    for (r, p) in radii.iter().zip(results) {
        t.push(vec![(*r).into(), p.p.into(), rho0.into(), p.error.into()]);
    }
    Ok(t)
}

fn abraham_check(config: &RunConfig) -> Result<Table, CliError> {
    let (profile, radii) = sweep_profile(config)?;
    let (stress_spec, spec) = (config.numerics.stress, config.numerics.anomaly);
    let results = collect(radii.par_iter().map(|&r| abraham_residual(&profile, r, &stress_spec, &spec)).collect())?;
    let mut t = Table::new(
        "abraham-check",
        &["r", "residual_plain", "residual_anomalous", "p", "dp_term", "div_sigma", "derivative_error"],
    );
    let mut equal_split = false;
    for a in results {
        equal_split |= a.equal_split_assumed;
        t.push(vec![
            a.r.into(),
            a.residual_plain.into(),
            a.residual_anomalous.into(),
            a.p.into(),
            a.dp_term.into(),
            a.div_sigma.into(),
            a.derivative_error.into(),
        ]);
    }
    t.note("equal_split_assumed", equal_split);
    Ok(t)
}

fn bec_box(config: &RunConfig) -> Result<Table, CliError> {
    let model = config.box_model.as_ref().ok_or_else(|| CliError::Validation("config needs a 'box' block".into()))?;
    let shift = box_shift(model)?;
    let d = discriminate(&Geometry::Box(model.clone()), &config.levels)?;
    let mut t = Table::new("bec-box", &["level", "E_over_E1", "V_over_E", "rho_over_rho0", "V_over_rho"]);
    for row in &d.rows {
        t.push(vec![row.level.into(), row.energy_over_unit.into(), row.v_over_e.into(), row.rho_over_rho0.into(), row.v_over_rho.into()]);
    }
    t.note("rho0", shift.rho0);
    t.note("lambda_formula", shift.lambda_formula);
    t.note("lambda_reduced", shift.lambda_reduced);
    t.note("delta0_formula", shift.delta0_formula);
    t.note("delta0_reduced", shift.delta0_reduced);
    t.note("slope", d.slope);
    t.note("proportional_to_energy", d.proportional_to_energy);
    Ok(t)
}

fn bec_trap(config: &RunConfig) -> Result<Table, CliError> {
    let model = config.trap.as_ref().ok_or_else(|| CliError::Validation("config needs a 'trap' block".into()))?;
    model.validate()?;
    let levels = collect(
        config.levels.par_iter().map(|&level| trap_levels(&TrapModel { level, ..model.clone() })).collect(),
    )?;
    let d = discriminate(&Geometry::Trap(model.clone()), &config.levels)?;
    let mut t = Table::new(
        "bec-trap",
        &[
            "level",
            "E_over_hbarOmega",
            "V_over_E",
            "rho_over_rho0",
            "V_over_rho",
            "V_exact_over_hbarOmega",
            "V_asymptotic_over_hbarOmega",
            "rho_exact_over_rho0",
        ],
    );
    for (row, lv) in d.rows.iter().zip(&levels) {
        t.push(vec![
            row.level.into(),
            row.energy_over_unit.into(),
            row.v_over_e.into(),
            row.rho_over_rho0.into(),
            row.v_over_rho.into(),
            lv.v_exact_over_hbar_omega.into(),
            lv.v_asymptotic_over_hbar_omega.into(),
            lv.rho_exact_over_rho0.into(),
        ]);
    }
    t.note("delta0", levels.first().map_or(f64::NAN, |l| l.delta0));
    t.note("slope", d.slope);
    t.note("proportional_to_energy", d.proportional_to_energy);
    Ok(t)
}

/// True when every row of a diag table passed.
pub fn all_passed(table: &Table) -> bool {
    table.column("pass").is_some_and(|c| c.iter().all(|v| *v == Cell::Bool(true)))
}
