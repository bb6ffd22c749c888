//! One function per subcommand, each building a [`Table`] from the core
//! library. Default tolerances and windows are echoed into the metadata so
//! every emitted artifact documents the settings that produced it.

use num_complex::Complex;
use sphcs_core::asymptotics::{
    default_ratio_grid, principal_ratio_limit_study, remainder_decay_study, remainder_window,
};
use sphcs_core::coherent::{default_study_grid, limit_error_study, measure_width, FlatLabel};
use sphcs_core::geometry::PhysicalParams;
use sphcs_core::heatkernel::{spectral_kernel, EvalConfig, HeatKernel};
use sphcs_core::operator_lab::{
    circle_label_from_angle, operator_report, TruncatedBasis, TAIL_TOL,
};

use crate::config::{parse_list, StudyConfig};
use crate::output::{Cell, Table};
use crate::{CliError, OutputArgs};

/// Shared lattice evaluation settings, stamped into every artifact.
fn echo_eval_defaults(table: &mut Table, config: &EvalConfig<f64>) {
    table.meta_int("lattice_window_initial", config.window as i64);
    table.meta_float("truncation_tolerance", config.tolerance);
    table.meta_float("small_angle_switch", config.theta_switch);
    table.meta_int("series_order", config.series_order as i64);
    table.meta_float("max_im_theta", config.max_im);
}

fn echo_study_config(table: &mut Table, cfg: &StudyConfig) {
    table.meta_int("dim", cfg.dim as i64);
    table.meta_float("hbar", cfg.hbar);
    table.meta_float("mass", cfg.mass);
    table.meta_float("omega", cfg.omega);
    table.meta_floats("x0", &cfg.x0);
    table.meta_floats("p0", &cfg.p0);
    table.meta_int("grid_points_per_axis", cfg.grid_points as i64);
    table.meta_float("grid_half_side", cfg.resolved_half_side());
}

#[derive(Debug, clap::Args)]
pub struct KernelArgs {
    /// Sphere dimension (odd, between 1 and 21).
    #[arg(long)]
    pub dim: u32,
    /// Dimensionless time ħ/(mωr²).
    #[arg(long)]
    pub tau: f64,
    /// Real part of the angle.
    #[arg(long, allow_negative_numbers = true)]
    pub theta_re: f64,
    /// Imaginary part of the angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_im: f64,
    /// Also evaluate the eigenfunction-series oracle and the discrepancy.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn kernel(args: &KernelArgs) -> Result<Table, CliError> {
    let config = EvalConfig::default();
    let kernel = HeatKernel::new(args.dim, args.tau, &config)?;
    let theta = Complex::new(args.theta_re, args.theta_im);
    let (value, bound) = kernel.eval_with_bound(theta)?;

    let columns: &[&'static str] = if args.oracle {
        &["value_re", "value_im", "truncation_bound", "oracle_re", "oracle_im", "abs_diff"]
    } else {
        &["value_re", "value_im", "truncation_bound"]
    };
    let mut table = Table::new("kernel", columns);
    table.meta_int("dim", args.dim as i64);
    table.meta_float("tau", args.tau);
    table.meta_float("theta_re", args.theta_re);
    table.meta_float("theta_im", args.theta_im);
    table.meta_int("lattice_window_certified", kernel.window() as i64);
    echo_eval_defaults(&mut table, &config);

    let mut row = vec![Cell::Float(value.re), Cell::Float(value.im), Cell::Float(bound)];
    if args.oracle {
        let oracle = spectral_kernel(args.dim, args.tau, theta)?;
        row.push(Cell::Float(oracle.re));
        row.push(Cell::Float(oracle.im));
        row.push(Cell::Float((value - oracle).norm()));
    }
    table.push_row(row);
    Ok(table)
}

pub fn limit_study(cfg: &StudyConfig) -> Result<Table, CliError> {
    let label = FlatLabel::new(cfg.x0.clone(), cfg.p0.clone())?;
    let base = PhysicalParams::new(cfg.hbar, cfg.mass, cfg.omega, cfg.radii[0])?;
    let grid = default_study_grid(&cfg.x0, cfg.resolved_half_side(), cfg.grid_points);
    let rows = limit_error_study(&label, &grid, &cfg.radii, &base)?;

    let mut table =
        Table::new("limit-study", &["r", "tau", "max_abs_err", "fitted_slope_so_far"]);
    echo_study_config(&mut table, cfg);
    table.meta_int("grid_size", grid.len() as i64);
    echo_eval_defaults(&mut table, &EvalConfig::default());

    for row in rows {
        table.push_row(vec![
            Cell::Float(row.radius),
            Cell::Float(row.tau),
            Cell::Float(row.max_abs_err),
            Cell::opt_float(row.fitted_slope),
        ]);
    }
    Ok(table)
}

#[derive(Debug, clap::Args)]
pub struct RemainderArgs {
    /// Sphere dimension (odd).
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    /// Real part of the angle; must sit inside the shrinking window.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub theta_re: f64,
    /// Imaginary part of the angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_im: f64,
    /// Comma list of dimensionless times, largest to smallest reads best.
    #[arg(long, default_value = "0.3,0.25,0.2,0.15,0.1,0.05")]
    pub taus: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn remainder_study(args: &RemainderArgs) -> Result<Table, CliError> {
    let taus = parse_list("taus", &args.taus)?;
    if taus.len() < 2 {
        return Err(CliError::Usage("need at least two tau values".to_string()));
    }
    let theta = Complex::new(args.theta_re, args.theta_im);
    let rows = remainder_decay_study(args.dim, theta, &taus)?;

    let mut table = Table::new("remainder-study", &["tau", "abs_R", "fitted_C", "fitted_B"]);
    table.meta_int("dim", args.dim as i64);
    table.meta_float("theta_re", args.theta_re);
    table.meta_float("theta_im", args.theta_im);
    table.meta_float("angle_window", remainder_window(args.dim)?);
    table.meta_float("window_shrink_per_step", 0.9);
    echo_eval_defaults(&mut table, &EvalConfig::default());

    for row in rows {
        table.push_row(vec![
            Cell::Float(row.tau),
            Cell::Float(row.abs_remainder),
            Cell::opt_float(row.decay_rate),
            Cell::opt_float(row.amplitude),
        ]);
    }
    Ok(table)
}

#[derive(Debug, clap::Args)]
pub struct RatioArgs {
    /// Sphere dimension (odd).
    #[arg(long, default_value_t = 3)]
    pub dim: u32,
    /// Comma list of dimensionless times to compare against the τ → 0 limit.
    #[arg(long, default_value = "1e-2,1e-3,1e-4")]
    pub taus: String,
    /// Angle grid extends over |θ| ≤ re-max.
    #[arg(long, default_value_t = 1.0)]
    pub re_max: f64,
    /// Imaginary parts sampled across [−im-max, im-max].
    #[arg(long, default_value_t = 0.3)]
    pub im_max: f64,
    /// Real-axis steps of the grid.
    #[arg(long, default_value_t = 20)]
    pub re_steps: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn ratio_study(args: &RatioArgs) -> Result<Table, CliError> {
    let taus = parse_list("taus", &args.taus)?;
    if taus.is_empty() {
        return Err(CliError::Usage("need at least one tau value".to_string()));
    }
    let grid = default_ratio_grid(args.re_max, args.im_max, args.re_steps);
    let rows = principal_ratio_limit_study(args.dim, &grid, &taus)?;

    let mut table = Table::new("ratio-study", &["tau", "max_abs_err"]);
    table.meta_int("dim", args.dim as i64);
    table.meta_float("re_max", args.re_max);
    table.meta_float("im_max", args.im_max);
    table.meta_int("re_steps", args.re_steps as i64);
    table.meta_int("grid_size", grid.len() as i64);
    echo_eval_defaults(&mut table, &EvalConfig::default());

    for row in rows {
        table.push_row(vec![Cell::Float(row.tau), Cell::Float(row.max_abs_err)]);
    }
    Ok(table)
}

pub fn width_study(cfg: &StudyConfig) -> Result<Table, CliError> {
    let label = FlatLabel::new(cfg.x0.clone(), cfg.p0.clone())?;
    let grid = default_study_grid(&cfg.x0, cfg.resolved_half_side(), cfg.grid_points);

    let mut table = Table::new(
        "width-study",
        &["r", "tau", "axis", "width", "width_over_radius", "grid_warning"],
    );
    echo_study_config(&mut table, cfg);
    table.meta_int("grid_size", grid.len() as i64);
    table.meta_float("gaussian_width", (0.5 * cfg.hbar / (cfg.mass * cfg.omega)).sqrt());
    echo_eval_defaults(&mut table, &EvalConfig::default());

    for &radius in &cfg.radii {
        let params = PhysicalParams::new(cfg.hbar, cfg.mass, cfg.omega, radius)?;
        let report = measure_width(&label, &params, &grid)?;
        let warning = report.grid_warning.clone().unwrap_or_default();
        for axis in 0..report.widths.len() {
            table.push_row(vec![
                Cell::Float(radius),
                Cell::Float(params.tau),
                Cell::Int(axis as i64),
                Cell::Float(report.widths[axis]),
                Cell::Float(report.width_over_radius[axis]),
                Cell::Text(warning.clone()),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, clap::Args)]
pub struct OperatorArgs {
    /// Dimensionless time of the basis.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Circle radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Basis cutoff; modes n = −N…N.
    #[arg(long, default_value_t = 40)]
    pub n_max: u32,
    /// Real part of the label angle.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub alpha_re: f64,
    /// Imaginary part of the label angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn operator_check(args: &OperatorArgs) -> Result<Table, CliError> {
    let basis = TruncatedBasis::new(args.n_max, args.tau, args.radius)?;
    let alpha = Complex::new(args.alpha_re, args.alpha_im);
    let label = circle_label_from_angle(alpha, args.radius);
    let report = operator_report(&label, &basis)?;

    let mut table = Table::new(
        "operator-check",
        &[
            "res1",
            "res2",
            "sphere_residual",
            "commutator_norm",
            "dropped_mass",
            "extracted1_re",
            "extracted1_im",
            "label1_re",
            "label1_im",
            "eigenvalue_gap1",
            "extracted2_re",
            "extracted2_im",
            "label2_re",
            "label2_im",
            "eigenvalue_gap2",
        ],
    );
    table.meta_float("tau", args.tau);
    table.meta_float("radius", args.radius);
    table.meta_int("n_max", args.n_max as i64);
    table.meta_int("modes", basis.modes() as i64);
    table.meta_float("alpha_re", args.alpha_re);
    table.meta_float("alpha_im", args.alpha_im);
    table.meta_float("coefficient_tail_tolerance", TAIL_TOL);

    table.push_row(vec![
        Cell::Float(report.res1),
        Cell::Float(report.res2),
        Cell::Float(report.sphere_residual),
        Cell::Float(report.commutator_norm),
        Cell::Float(report.dropped_mass),
        Cell::Float(report.extracted_1.re),
        Cell::Float(report.extracted_1.im),
        Cell::Float(report.label_1.re),
        Cell::Float(report.label_1.im),
        Cell::Float(report.eigenvalue_gap_1),
        Cell::Float(report.extracted_2.re),
        Cell::Float(report.extracted_2.im),
        Cell::Float(report.label_2.re),
        Cell::Float(report.label_2.im),
        Cell::Float(report.eigenvalue_gap_2),
    ]);
    Ok(table)
}
