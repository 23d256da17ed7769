//! Implementations behind the subcommands. Every command validates its
//! flags before touching the filesystem and returns the process exit code.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Duration;

use wbag::acyclic::{acyclic_equilibrium, topological_order, Topology};
use wbag::bench::{run_benchmark, BenchOptions};
use wbag::format::format_significant;
use wbag::generator::{cycle_k, generate_benchmark, random_bag, GenSpec, WeightMode};
use wbag::solver::{integrate, integrate_with_refinement, write_trajectory_csv, Status};
use wbag::{parse_bag, serialize_bag, Bag, Model, SolverConfig};

use crate::svg::{line_chart, Series};
use crate::{Algo, Command, GenCommand, SolverArgs};

/// An input error; the process exits with code 1.
#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl CliError {
    fn new(message: impl Into<String>) -> Self {
        CliError(message.into())
    }
}

fn fail(context: &str, err: impl fmt::Display) -> CliError {
    CliError::new(format!("{context}: {err}"))
}

impl SolverArgs {
    fn config(&self, record_trajectory: bool) -> Result<SolverConfig, CliError> {
        if !self.wall_limit.is_finite() || self.wall_limit < 0.0 {
            return Err(CliError::new(format!(
                "invalid solver configuration: wall limit must be a nonnegative number of seconds, got {}",
                self.wall_limit
            )));
        }
        let wall_clock_limit = if self.wall_limit == 0.0 {
            None
        } else {
            Some(Duration::from_secs_f64(self.wall_limit))
        };
        let config = SolverConfig {
            step: self.delta,
            epsilon: self.epsilon,
            max_time: self.tmax,
            wall_clock_limit,
            method: self.method,
            record_every: self.record_every,
            record_trajectory,
        };
        config
            .validate()
            .map_err(|e| CliError::new(e.to_string()))?;
        Ok(config)
    }
}

fn load_bag(file: &Path) -> Result<Bag, CliError> {
    let text = fs::read_to_string(file)
        .map_err(|e| fail(&format!("cannot read {}", file.display()), e))?;
    parse_bag(&text).map_err(|e| fail(&format!("{}", file.display()), e))
}

pub fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve {
            file,
            model,
            algo,
            refine,
            solver,
        } => cmd_solve(&file, model.model, algo, refine, &solver),
        Command::Trace {
            file,
            out,
            report_out,
            model,
            solver,
        } => cmd_trace(&file, &out, report_out.as_deref(), model.model, &solver),
        Command::Check { file } => cmd_check(&file),
        Command::Gen { what } => cmd_gen(what),
        Command::Bench {
            dir,
            model,
            solver,
            jobs,
            no_fast_path,
            records_out,
            stats_out,
        } => cmd_bench(
            &dir,
            model.model,
            &solver,
            jobs,
            no_fast_path,
            records_out.as_deref(),
            stats_out.as_deref(),
        ),
        Command::Plot {
            csv,
            out,
            width,
            height,
        } => cmd_plot(&csv, &out, width, height),
    }
}

fn print_strength_table(bag: &Bag, finals: &[f64], converged: impl Fn(usize) -> bool) {
    let name_width = bag
        .arguments()
        .iter()
        .map(|a| a.name.len())
        .max()
        .unwrap_or(4)
        .max("name".len());
    println!(
        "{:<name_width$} {:>8} {:>8} converged",
        "name", "initial", "final"
    );
    for (j, arg) in bag.arguments().iter().enumerate() {
        println!(
            "{:<name_width$} {:>8.4} {:>8.4} {}",
            arg.name,
            arg.weight,
            finals[j],
            converged(j)
        );
    }
}

fn cmd_solve(
    file: &Path,
    model: Model,
    algo: Algo,
    refine: bool,
    solver: &SolverArgs,
) -> Result<u8, CliError> {
    let config = solver.config(false)?;
    let bag = load_bag(file)?;

    let use_exact_pass = !refine
        && match algo {
            Algo::Acyclic => true,
            Algo::Ode => false,
            Algo::Auto => matches!(topological_order(&bag), Topology::Acyclic(_)),
        };

    if use_exact_pass {
        let state =
            acyclic_equilibrium(model, &bag).map_err(|e| fail(&file.display().to_string(), e))?;
        print_strength_table(&bag, &state.values, |_| true);
        println!("status: exact (acyclic pass, model {model})");
        return Ok(0);
    }

    let (result, verdict) = if refine {
        let (result, verdict) = integrate_with_refinement(model, &bag, &config)
            .map_err(|e| fail("integration failed", e))?;
        (result, Some(verdict))
    } else {
        let result = integrate(model, &bag, &config).map_err(|e| fail("integration failed", e))?;
        (result, None)
    };

    print_strength_table(&bag, &result.final_state.values, |j| {
        result.report.per_argument[j].converged
    });
    println!(
        "status: {} (model {model}, t={}, {} steps)",
        result.status,
        format_significant(result.final_time, 6),
        result.steps_taken
    );
    if let Some(v) = verdict {
        println!(
            "refinement: max final-state difference at delta/2 = {}, stable = {}",
            format_significant(v.difference, 6),
            v.stable
        );
    }
    Ok(match result.status {
        Status::Converged => 0,
        Status::TimeCapReached | Status::WallClockCapReached => 2,
    })
}

fn cmd_trace(
    file: &Path,
    out: &Path,
    report_out: Option<&Path>,
    model: Model,
    solver: &SolverArgs,
) -> Result<u8, CliError> {
    let config = solver.config(true)?;
    let bag = load_bag(file)?;
    let result = integrate(model, &bag, &config).map_err(|e| fail("integration failed", e))?;
    let samples = result.trajectory.as_deref().unwrap_or(&[]);
    let file_out =
        fs::File::create(out).map_err(|e| fail(&format!("cannot create {}", out.display()), e))?;
    write_trajectory_csv(&bag, samples, file_out)
        .map_err(|e| fail(&format!("cannot write {}", out.display()), e))?;
    if let Some(path) = report_out {
        let report_file = fs::File::create(path)
            .map_err(|e| fail(&format!("cannot create {}", path.display()), e))?;
        result
            .write_report_csv(&bag, report_file)
            .map_err(|e| fail(&format!("cannot write {}", path.display()), e))?;
    }
    println!(
        "wrote {} samples to {} (status: {}, t={})",
        samples.len(),
        out.display(),
        result.status,
        format_significant(result.final_time, 6)
    );
    Ok(match result.status {
        Status::Converged => 0,
        Status::TimeCapReached | Status::WallClockCapReached => 2,
    })
}

fn cmd_check(file: &Path) -> Result<u8, CliError> {
    let bag = load_bag(file)?;
    match topological_order(&bag) {
        Topology::Acyclic(_) => println!(
            "acyclic; {} arguments, {} attacks, {} supports",
            bag.len(),
            bag.attack_count(),
            bag.support_count()
        ),
        Topology::Cyclic { witness } => {
            let names: Vec<&str> = witness.iter().map(|&id| bag.name(id)).collect();
            println!("cyclic; witness: {}", names.join(", "));
        }
    }
    Ok(0)
}

fn write_text(out: &Path, text: &str) -> Result<(), CliError> {
    if out.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        fs::write(out, text).map_err(|e| fail(&format!("cannot write {}", out.display()), e))
    }
}

fn cmd_gen(what: GenCommand) -> Result<u8, CliError> {
    match what {
        GenCommand::Random {
            nodes,
            edges,
            attack_prob,
            constant_weight,
            seed,
            no_self_loops,
            out,
        } => {
            let spec = GenSpec {
                nodes,
                edges,
                attack_probability: attack_prob,
                weight_mode: match constant_weight {
                    Some(c) => WeightMode::Constant(c),
                    None => WeightMode::Uniform,
                },
                seed,
                self_loops: !no_self_loops,
            };
            let bag = random_bag(&spec).map_err(|e| fail("generator", e))?;
            write_text(&out, &wbag::generator::render_bag_file(&spec, &bag))?;
            Ok(0)
        }
        GenCommand::Cycle { k, out } => {
            let bag = cycle_k(k).map_err(|e| fail("generator", e))?;
            let text = format!("// generator: cycle k={k}\n{}", serialize_bag(&bag));
            write_text(&out, &text)?;
            Ok(0)
        }
        GenCommand::Fixture { name, out } => {
            let which: wbag::Fixture = name.parse().map_err(|e| fail("generator", e))?;
            let text = format!(
                "// generator: fixture {which}\n{}",
                serialize_bag(&which.bag())
            );
            write_text(&out, &text)?;
            Ok(0)
        }
        GenCommand::Bench {
            dir,
            base_size,
            increments,
            trials,
            edge_ratio,
            seed,
        } => {
            let tree = generate_benchmark(&dir, base_size, increments, trials, edge_ratio, seed)
                .map_err(|e| fail("generator", e))?;
            println!(
                "wrote {} files across {} sizes under {}",
                tree.files_written,
                tree.sizes.len(),
                tree.root.display()
            );
            Ok(0)
        }
    }
}

fn cmd_bench(
    dir: &Path,
    model: Model,
    solver: &SolverArgs,
    jobs: usize,
    no_fast_path: bool,
    records_out: Option<&Path>,
    stats_out: Option<&Path>,
) -> Result<u8, CliError> {
    let config = solver.config(false)?;
    let options = BenchOptions {
        jobs: jobs.max(1),
        acyclic_fast_path: !no_fast_path,
        warmup: true,
    };
    let report = run_benchmark(dir, model, &config, &options).map_err(|e| fail("benchmark", e))?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }

    println!(
        "solve wall time per size (model {model}, jobs {}, one untimed warm-up solve first)",
        options.jobs
    );
    println!(
        "{:>6} {:>6} {:>12} {:>12} {:>12}",
        "size", "count", "min_ms", "mean_ms", "max_ms"
    );
    for s in &report.stats {
        println!(
            "{:>6} {:>6} {:>12.3} {:>12.3} {:>12.3}",
            s.size,
            s.count,
            s.min.as_secs_f64() * 1e3,
            s.mean.as_secs_f64() * 1e3,
            s.max.as_secs_f64() * 1e3
        );
    }
    let solved = report
        .records
        .iter()
        .filter(|r| r.status.is_solved())
        .count();
    println!(
        "{} files, {} solved, {} failed",
        report.records.len(),
        solved,
        report.records.len() - solved
    );

    if let Some(path) = records_out {
        let file = fs::File::create(path)
            .map_err(|e| fail(&format!("cannot create {}", path.display()), e))?;
        report
            .write_records_csv(file)
            .map_err(|e| fail(&format!("cannot write {}", path.display()), e))?;
    }
    if let Some(path) = stats_out {
        let file = fs::File::create(path)
            .map_err(|e| fail(&format!("cannot create {}", path.display()), e))?;
        report
            .write_stats_csv(file)
            .map_err(|e| fail(&format!("cannot write {}", path.display()), e))?;
    }
    Ok(0)
}

/// Parses a trajectory CSV back into per-argument series.
fn parse_trajectory_csv(text: &str) -> Result<Vec<Series>, CliError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::new("empty trajectory CSV"))?;
    let mut columns = header.split(',');
    if columns.next() != Some("t") {
        return Err(CliError::new("trajectory CSV must start with a `t` column"));
    }
    let mut series: Vec<Series> = columns
        .map(|name| Series {
            name: name.to_owned(),
            points: Vec::new(),
        })
        .collect();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t: f64 = fields
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(|e| CliError::new(format!("line {}: bad time value: {e}", idx + 1)))?;
        let expected = series.len();
        for s in series.iter_mut() {
            let field = fields.next().ok_or_else(|| {
                CliError::new(format!(
                    "line {}: expected {expected} value columns",
                    idx + 1
                ))
            })?;
            let v: f64 = field
                .parse()
                .map_err(|e| CliError::new(format!("line {}: bad value: {e}", idx + 1)))?;
            s.points.push((t, v));
        }
        if fields.next().is_some() {
            return Err(CliError::new(format!(
                "line {}: more columns than the header declares",
                idx + 1
            )));
        }
    }
    Ok(series)
}

fn cmd_plot(csv: &Path, out: &Path, width: u32, height: u32) -> Result<u8, CliError> {
    let text =
        fs::read_to_string(csv).map_err(|e| fail(&format!("cannot read {}", csv.display()), e))?;
    let series = parse_trajectory_csv(&text)?;
    let svg = line_chart(&series, width, height);
    write_text(out, &svg)?;
    if out.as_os_str() != "-" {
        println!("wrote {} series to {}", series.len(), out.display());
    }
    Ok(0)
}
