//! Benchmark harness: solve every graph file in a size-structured directory
//! tree and aggregate per-size runtime statistics.
//!
//! The expected layout is one subdirectory per graph size, named by the
//! size, each containing graph files. Wall time covers the solve call only
//! (parsing excluded); one warm-up solve runs before timing begins. Files
//! that fail to parse or hit a cap are recorded with their status rather
//! than dropped. Per-size statistics aggregate the successfully solved
//! records; `count` in the stats is the number of records aggregated.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::acyclic::{acyclic_equilibrium, topological_order, Topology};
use crate::bag::Bag;
use crate::format::{format_significant, parse_bag};
use crate::semantics::Model;
use crate::solver::{fixed_point_residual, integrate, SolverConfig, Status};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read benchmark directory {path}: {source}")]
    UnreadableDir {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Outcome of one benchmark file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStatus {
    /// Solved exactly by the acyclic pass.
    Exact,
    Converged,
    TimeCapReached,
    WallClockCapReached,
    /// Parse or solver error; the message is kept on the record.
    Error,
}

impl RecordStatus {
    /// Whether the record carries a meaningful solve time.
    pub fn is_solved(self) -> bool {
        !matches!(self, RecordStatus::Error)
    }
}

impl From<Status> for RecordStatus {
    fn from(status: Status) -> Self {
        match status {
            Status::Converged => RecordStatus::Converged,
            Status::TimeCapReached => RecordStatus::TimeCapReached,
            Status::WallClockCapReached => RecordStatus::WallClockCapReached,
        }
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordStatus::Exact => "exact",
            RecordStatus::Converged => "converged",
            RecordStatus::TimeCapReached => "time_cap",
            RecordStatus::WallClockCapReached => "wall_clock_cap",
            RecordStatus::Error => "error",
        })
    }
}

/// Result of one file.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub size: usize,
    pub file: String,
    pub status: RecordStatus,
    pub steps: u64,
    /// Solve wall time; zero for files that failed to parse.
    pub wall: Duration,
    /// Fixed-point residual of the final state; NaN for failures.
    pub residual: f64,
    pub message: Option<String>,
}

/// Min/mean/max solve time over one size's solved records.
#[derive(Debug, Clone)]
pub struct SizeStats {
    pub size: usize,
    pub count: usize,
    pub min: Duration,
    pub mean: Duration,
    pub max: Duration,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    /// One record per file, in (size, file name) order, failures included.
    pub records: Vec<BenchRecord>,
    /// One row per size with at least one solved record, ascending.
    pub stats: Vec<SizeStats>,
    /// Skipped directory entries and similar non-fatal findings.
    pub warnings: Vec<String>,
}

impl BenchReport {
    /// Per-file CSV: `size,file,status,steps,wall_ms,residual`.
    pub fn write_records_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "size,file,status,steps,wall_ms,residual")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{:.6},{}",
                r.size,
                r.file,
                r.status,
                r.steps,
                r.wall.as_secs_f64() * 1e3,
                if r.residual.is_nan() {
                    "nan".to_owned()
                } else {
                    format_significant(r.residual, 9)
                }
            )?;
        }
        Ok(())
    }

    /// Stats CSV: `size,count,min_ms,mean_ms,max_ms`.
    pub fn write_stats_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "size,count,min_ms,mean_ms,max_ms")?;
        for s in &self.stats {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6}",
                s.size,
                s.count,
                s.min.as_secs_f64() * 1e3,
                s.mean.as_secs_f64() * 1e3,
                s.max.as_secs_f64() * 1e3,
            )?;
        }
        Ok(())
    }
}

/// Harness knobs.
#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Worker threads; 1 guarantees sequential, interference-free timing.
    pub jobs: usize,
    /// Solve acyclic graphs with the exact linear pass instead of the ODE.
    pub acyclic_fast_path: bool,
    /// Run one untimed solve before the timed ones.
    pub warmup: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            jobs: 1,
            acyclic_fast_path: true,
            warmup: true,
        }
    }
}

fn solve_file(
    text: &str,
    model: Model,
    config: &SolverConfig,
    fast_path: bool,
) -> (RecordStatus, u64, Duration, f64, Option<String>) {
    let bag: Bag = match parse_bag(text) {
        Ok(bag) => bag,
        Err(err) => {
            return (
                RecordStatus::Error,
                0,
                Duration::ZERO,
                f64::NAN,
                Some(err.to_string()),
            )
        }
    };
    let started = Instant::now();
    let outcome = if fast_path {
        match topological_order(&bag) {
            Topology::Acyclic(_) => acyclic_equilibrium(model, &bag)
                .map(|state| (RecordStatus::Exact, bag.len() as u64, state))
                .map_err(|e| e.to_string()),
            Topology::Cyclic { .. } => integrate(model, &bag, config)
                .map(|r| (r.status.into(), r.steps_taken, r.final_state))
                .map_err(|e| e.to_string()),
        }
    } else {
        integrate(model, &bag, config)
            .map(|r| (r.status.into(), r.steps_taken, r.final_state))
            .map_err(|e| e.to_string())
    };
    let wall = started.elapsed();
    match outcome {
        Ok((status, steps, state)) => {
            let residual = fixed_point_residual(model, &bag, &state);
            (status, steps, wall, residual, None)
        }
        Err(message) => (RecordStatus::Error, 0, wall, f64::NAN, Some(message)),
    }
}

/// Enumerates `(size, path)` work items and collects warnings for entries
/// that do not fit the expected layout.
fn collect_work(
    dir: &Path,
    warnings: &mut Vec<String>,
) -> Result<Vec<(usize, PathBuf)>, BenchError> {
    let unreadable = |source: io::Error| BenchError::UnreadableDir {
        path: dir.to_owned(),
        source,
    };
    let mut sized_dirs = Vec::new();
    for entry in fs::read_dir(dir).map_err(unreadable)? {
        let entry = entry.map_err(unreadable)?;
        let path = entry.path();
        if !path.is_dir() {
            warnings.push(format!("skipping non-directory entry {}", path.display()));
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        match name.parse::<usize>() {
            Ok(size) => sized_dirs.push((size, path)),
            Err(_) => warnings.push(format!(
                "skipping subdirectory `{name}`: the name must be the graph size"
            )),
        }
    }
    sized_dirs.sort();

    let mut work = Vec::new();
    for (size, size_dir) in sized_dirs {
        let mut files = Vec::new();
        let unreadable_sub = |source: io::Error| BenchError::UnreadableDir {
            path: size_dir.clone(),
            source,
        };
        for entry in fs::read_dir(&size_dir).map_err(unreadable_sub)? {
            let entry = entry.map_err(unreadable_sub)?;
            if entry.path().is_file() {
                files.push(entry.path());
            }
        }
        files.sort();
        work.extend(files.into_iter().map(|p| (size, p)));
    }
    Ok(work)
}

fn stats_from_records(records: &[BenchRecord]) -> Vec<SizeStats> {
    let mut stats: Vec<SizeStats> = Vec::new();
    for record in records.iter().filter(|r| r.status.is_solved()) {
        match stats.last_mut() {
            Some(s) if s.size == record.size => {
                s.count += 1;
                s.min = s.min.min(record.wall);
                s.max = s.max.max(record.wall);
                // accumulate the total in `mean` and divide at the end
                s.mean += record.wall;
            }
            _ => stats.push(SizeStats {
                size: record.size,
                count: 1,
                min: record.wall,
                mean: record.wall,
                max: record.wall,
            }),
        }
    }
    for s in &mut stats {
        s.mean /= s.count as u32;
    }
    stats
}

/// Runs `model` over every file of a benchmark tree.
///
/// Parse failures and cap hits become records with their status; only an
/// unreadable directory aborts the run. With `jobs > 1` files are solved in
/// parallel (each file timed on its own worker); record order is still
/// deterministic.
pub fn run_benchmark(
    dir: &Path,
    model: Model,
    config: &SolverConfig,
    options: &BenchOptions,
) -> Result<BenchReport, BenchError> {
    let mut warnings = Vec::new();
    let work = collect_work(dir, &mut warnings)?;

    if options.warmup {
        if let Some((_, path)) = work.first() {
            if let Ok(text) = fs::read_to_string(path) {
                let _ = solve_file(&text, model, config, options.acyclic_fast_path);
            }
        }
    }

    let mut records: Vec<Option<BenchRecord>> = (0..work.len()).map(|_| None).collect();
    let run_one = |size: usize, path: &Path| -> BenchRecord {
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let (status, steps, wall, residual, message) = match fs::read_to_string(path) {
            Ok(text) => solve_file(&text, model, config, options.acyclic_fast_path),
            Err(err) => (
                RecordStatus::Error,
                0,
                Duration::ZERO,
                f64::NAN,
                Some(format!("unreadable file: {err}")),
            ),
        };
        BenchRecord {
            size,
            file,
            status,
            steps,
            wall,
            residual,
            message,
        }
    };

    let jobs = options.jobs.max(1).min(work.len().max(1));
    if jobs <= 1 {
        for (slot, (size, path)) in records.iter_mut().zip(&work) {
            *slot = Some(run_one(*size, path));
        }
    } else {
        let next = AtomicUsize::new(0);
        let slots = Mutex::new(&mut records);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= work.len() {
                        break;
                    }
                    let (size, path) = &work[i];
                    let record = run_one(*size, path);
                    slots.lock().expect("no poisoned workers")[i] = Some(record);
                });
            }
        });
    }

    let records: Vec<BenchRecord> = records
        .into_iter()
        .map(|r| r.expect("every work item produces a record"))
        .collect();
    let stats = stats_from_records(&records);
    Ok(BenchReport {
        records,
        stats,
        warnings,
    })
}
