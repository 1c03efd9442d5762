use anyhow::{anyhow, bail, Context, Result};
use effham::eigen::{exact_spectrum_with, ExactOptions};
use effham::ising::Topology;
use effham::perturbation::Orders;
use effham::sweep::{run_sweep, SpectrumSweep, SweepConfig};
use effham::{IsingProblem, Schedule};

use crate::args::{parse_grid, Args, Mode};
use crate::output::{emit, num, Table};

pub fn run(args: &Args) -> Result<()> {
    match args.mode {
        Mode::Sweep => sweep_mode(args),
        Mode::Exact => exact_mode(args),
        Mode::Compare => compare_mode(args),
        Mode::Generate => generate_mode(args),
    }
}

fn load_problem(args: &Args) -> Result<IsingProblem> {
    let path = args
        .problem
        .as_ref()
        .ok_or_else(|| anyhow!("--problem is required for this mode"))?;
    IsingProblem::load(path).with_context(|| format!("--problem: cannot load {}", path.display()))
}

fn load_schedule(args: &Args) -> Result<Schedule> {
    match &args.schedule {
        Some(path) => Schedule::load(path).with_context(|| format!("--schedule: cannot load {}", path.display())),
        None => Ok(Schedule::synthetic_default()),
    }
}

fn grid(args: &Args) -> Result<Vec<f64>> {
    parse_grid(&args.s_grid).map_err(|e| anyhow!(e))
}

fn common_header(table: &mut Table, args: &Args, problem: &IsingProblem, grid: &[f64]) {
    table.meta("mode", format!("{:?}", args.mode).to_lowercase());
    table.meta(
        "problem",
        args.problem.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
    );
    table.meta("n", problem.n());
    table.meta(
        "schedule",
        args.schedule
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "synthetic_default".into()),
    );
    table.meta("s_grid", grid.iter().map(|&s| num(s)).collect::<Vec<_>>().join(";"));
    table.meta("seed", args.seed);
}

fn run_configured_sweep(args: &Args, problem: &IsingProblem, schedule: &Schedule, grid: &[f64]) -> Result<SpectrumSweep> {
    let ns = args.ns.ok_or_else(|| anyhow!("--ns is required for this mode"))?;
    if ns == 0 {
        bail!("--ns: must be at least 1");
    }
    if args.levels == 0 || args.levels > ns {
        bail!("--levels: must lie in 1..={ns} (the value of --ns)");
    }
    let orders = Orders::new(args.diag_order, args.offdiag_order)
        .map_err(|e| anyhow!("--diag-order/--offdiag-order: {e}"))?;
    let mut config = SweepConfig::new(ns, args.levels, grid.to_vec());
    config.orders = orders;
    config.rule = args.select.into();
    config.seed = args.seed;
    Ok(run_sweep(problem, schedule, &config)?)
}

fn sweep_header(table: &mut Table, args: &Args, sweep: &SpectrumSweep) {
    table.meta("ns", args.ns.unwrap_or_default());
    table.meta("basis_size", sweep.basis_size);
    table.meta("levels", sweep.levels);
    table.meta("diag_order", args.diag_order);
    table.meta("offdiag_order", args.offdiag_order);
    table.meta("select", format!("{:?}", args.select).to_lowercase());
    match sweep.min_gap {
        Some((s, g)) => {
            table.meta("min_gap_s", num(s));
            table.meta("min_gap", num(g));
        }
        None => {
            table.meta("min_gap_s", "NaN");
            table.meta("min_gap", "NaN");
        }
    }
}

fn names(prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|k| format!("{prefix}{k}")).collect()
}

fn warnings_field(w: &[effham::sweep::Warning]) -> String {
    w.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";")
}

fn sweep_mode(args: &Args) -> Result<()> {
    let problem = load_problem(args)?;
    let schedule = load_schedule(args)?;
    let grid = grid(args)?;
    let sweep = run_configured_sweep(args, &problem, &schedule, &grid)?;
    let m = sweep.levels;

    let mut columns = vec!["s".to_string()];
    columns.extend(names("E_", 0..m));
    columns.extend(names("rel_", 1..m));
    columns.push("gap".into());
    columns.extend(names("lambda_", 0..m));
    columns.push("warnings".into());
    let mut table = Table::new(columns);
    common_header(&mut table, args, &problem, &grid);
    sweep_header(&mut table, args, &sweep);
    for pt in &sweep.points {
        let mut row = vec![num(pt.s)];
        row.extend(pt.levels.iter().map(|l| num(l.energy)));
        row.extend((1..m).map(|k| num(pt.relative(k))));
        row.push(num(pt.gap.unwrap_or(f64::NAN)));
        row.extend(pt.levels.iter().map(|l| num(l.lambda.lambda_k)));
        row.push(warnings_field(&pt.warnings));
        table.row(row);
    }
    table.write(args.out.as_deref())
}

fn exact_rows(args: &Args, problem: &IsingProblem, schedule: &Schedule, grid: &[f64], m: usize) -> Result<Vec<Vec<f64>>> {
    let options = ExactOptions {
        seed: args.seed,
        ..Default::default()
    };
    grid.iter()
        .map(|&s| Ok(exact_spectrum_with(problem, s, schedule, m, &options)?.eigenvalues))
        .collect()
}

fn exact_mode(args: &Args) -> Result<()> {
    let problem = load_problem(args)?;
    let schedule = load_schedule(args)?;
    let grid = grid(args)?;
    let m = args.exact_levels.unwrap_or(args.levels);
    if m == 0 {
        bail!("--exact-levels: must be at least 1");
    }
    let rows = exact_rows(args, &problem, &schedule, &grid, m)?;

    let mut columns = vec!["s".to_string()];
    columns.extend(names("E_", 0..m));
    columns.extend(names("rel_", 1..m));
    columns.push("gap".into());
    let mut table = Table::new(columns);
    common_header(&mut table, args, &problem, &grid);
    table.meta("exact_levels", m);
    for (&s, e) in grid.iter().zip(&rows) {
        let mut row = vec![num(s)];
        row.extend(e.iter().map(|&x| num(x)));
        row.extend((1..m).map(|k| num(e[k] - e[0])));
        row.push(num(if m >= 2 { e[1] - e[0] } else { f64::NAN }));
        table.row(row);
    }
    table.write(args.out.as_deref())
}

fn compare_mode(args: &Args) -> Result<()> {
    let problem = load_problem(args)?;
    let schedule = load_schedule(args)?;
    let grid = grid(args)?;
    let m = args.levels;
    if let Some(e) = args.exact_levels {
        if e < m {
            bail!("--exact-levels: must be at least --levels ({m})");
        }
    }
    let sweep = run_configured_sweep(args, &problem, &schedule, &grid)?;
    let exact = exact_rows(args, &problem, &schedule, &grid, m)?;

    let mut columns = vec!["s".to_string()];
    columns.extend(names("approx_", 0..m));
    columns.extend(names("exact_", 0..m));
    columns.extend(names("abs_err_", 0..m));
    columns.push("max_abs_err".into());
    columns.push("warnings".into());

    let mut rows = Vec::new();
    let mut overall = f64::NAN;
    for (pt, e) in sweep.points.iter().zip(&exact) {
        let errs: Vec<f64> = pt.levels.iter().zip(e).map(|(a, b)| (a.energy - b).abs()).collect();
        let row_max = errs.iter().copied().fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
        overall = overall.max(row_max);
        let mut row = vec![num(pt.s)];
        row.extend(pt.levels.iter().map(|l| num(l.energy)));
        row.extend(e.iter().map(|&x| num(x)));
        row.extend(errs.iter().map(|&x| num(x)));
        row.push(num(row_max));
        row.push(warnings_field(&pt.warnings));
        rows.push(row);
    }

    let mut table = Table::new(columns);
    common_header(&mut table, args, &problem, &grid);
    sweep_header(&mut table, args, &sweep);
    table.meta("max_abs_err", num(overall));
    for r in rows {
        table.row(r);
    }
    table.write(args.out.as_deref())
}

fn generate_mode(args: &Args) -> Result<()> {
    let spec = args
        .topology
        .as_ref()
        .ok_or_else(|| anyhow!("--topology is required for generate mode"))?;
    let topo = Topology::resolve(spec).with_context(|| format!("--topology: {spec}"))?;
    let problem = topo.instance(args.seed)?;
    let mut text = problem.to_json();
    text.push('\n');
    emit(&text, args.out.as_deref())
}
