//! Command-line front end: exact smooth counts, saddle points, Dickman
//! tables, character sums, averaged-error experiment grids, large-sieve
//! trials, and contour-reconstruction checks.
//!
//! Standard output carries data exclusively; progress and timings go to
//! standard error. Every command is deterministic given its full argument
//! list (including --seed). Exit codes: 0 success, 1 usage or domain error,
//! 2 capacity exceeded, 3 detected invariant violation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use smoothdist::characters::{psi_char_all, CharacterGroup, CharacterGroups};
use smoothdist::dickman::DickmanTable;
use smoothdist::error::Error;
use smoothdist::factor::FactorTable;
use smoothdist::large_sieve::{adversarial_windows, large_sieve_check, seeded_windows};
use smoothdist::perron::{perron_psi_char, perron_truncation_budget, ContourSpec};
use smoothdist::report::{ExperimentConfig, ReportFormat};
use smoothdist::saddle::solve_alpha;
use smoothdist::smooth::{psi, psi_coprime, psi_progression, smooth_split, splits_in_range};

#[derive(Parser)]
#[command(
    name = "smoothdist",
    version,
    about = "Distribution of smooth numbers in arithmetic progressions: exact counts, character sums, and averaged-error experiments"
)]
struct Cli {
    /// Factor table ceiling; defaults to the smallest table covering the command
    #[arg(long, global = true)]
    limit: Option<u64>,

    /// Binary factor-table cache; read when present, written after builds
    #[arg(long, global = true, value_name = "PATH")]
    table_cache: Option<PathBuf>,

    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count y-smooth n <= x, optionally restricted mod q
    Psi {
        x: u64,
        y: u64,
        /// Restrict to n coprime to this modulus (or to a residue with --res)
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// Residue class a (requires --mod): count n ≡ a
        #[arg(long = "res")]
        residue: Option<u64>,
    },
    /// Solve the saddle point alpha(x, y) of the prime sum
    Alpha {
        x: u64,
        y: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Tabulate the Dickman function rho(u) as CSV
    Rho {
        u_max: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Character sums over y-smooth n <= x for every character mod q
    Charsum { x: u64, y: u64, q: u64 },
    /// Worst-residue averaged-error experiment over an (x, y, Q) grid
    Bv(ExperimentArgs),
    /// Variance averaged-error experiment over an (x, y, Q) grid
    Bdh(ExperimentArgs),
    /// Multiplicative large sieve trials: seeded random + adversarial windows
    LargeSieve {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 50)]
        qmax: u64,
        #[arg(long, default_value_t = 2000)]
        nmax: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reconstruct character sums by contour quadrature and compare
    PerronCheck {
        #[arg(long, default_value_t = 10_000)]
        x: u64,
        #[arg(long, default_value_t = 30)]
        y: u64,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        moduli: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "64,256,1024")]
        heights: Vec<f64>,
        #[arg(long, default_value_t = 16384)]
        nodes: usize,
    },
    /// Verify the head/cofactor split partition and exact reconstruction
    SplitCheck {
        x: u64,
        y: u64,
        /// Split thresholds; default x^(1/4) and x^(1/3)
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<u64>>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_delimiter = ',')]
    x_grid: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    y_grid: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    q_grid: Option<Vec<u64>>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flag grid points with y < log^K x in the report
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    c_candidates: Option<Vec<f64>>,
    /// Flat key=value config file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Report destination (default: standard output)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print and succeed; real usage errors exit 1
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Capacity { .. } => ExitCode::from(2),
                Error::Invariant(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

/// Build (or load) the factor table. An explicit --limit is a hard ceiling;
/// otherwise the table is sized to the command's needs.
fn table_for(
    cli_limit: Option<u64>,
    cache: &Option<PathBuf>,
    needed: u64,
) -> Result<FactorTable, Error> {
    let limit = cli_limit.unwrap_or(needed.max(2));
    let t0 = Instant::now();
    let table = FactorTable::load_or_build(limit, cache.as_deref())?;
    eprintln!(
        "factor table ready: limit {} ({:?})",
        table.limit(),
        t0.elapsed()
    );
    Ok(table)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let out = std::io::stdout();
    let mut out = out.lock();
    match cli.command {
        Command::Psi {
            x,
            y,
            modulus,
            residue,
        } => {
            let table = table_for(cli.limit, &cli.table_cache, x)?;
            let count = match (modulus, residue) {
                (None, None) => psi(x, y, &table)?,
                (Some(q), None) => psi_coprime(x, y, q, &table)?,
                (Some(q), Some(a)) => psi_progression(x, y, q, a, &table)?,
                (None, Some(_)) => {
                    return Err(Error::domain("--res requires --mod"));
                }
            };
            writeln!(&mut out, "{count}").map_err(|e| Error::io("stdout", e))?;
        }
        Command::Alpha { x, y, tol } => {
            let sp = solve_alpha(x, y, tol)?;
            writeln!(&mut out, "alpha,residual").map_err(|e| Error::io("stdout", e))?;
            writeln!(&mut out, "{},{}", sp.alpha, sp.residual)
                .map_err(|e| Error::io("stdout", e))?;
        }
        Command::Rho { u_max, step } => {
            let table = DickmanTable::build(u_max, step)?;
            let mut w = BufWriter::new(&mut out);
            table
                .write_csv(&mut w)
                .map_err(|e| Error::io("stdout", e))?;
        }
        Command::Charsum { x, y, q } => {
            let table = table_for(cli.limit, &cli.table_cache, x)?;
            let group = CharacterGroup::new(q)?;
            let sums = psi_char_all(x, y, &group, &table)?;
            writeln!(&mut out, "index,conductor,order,parity,primitive,re,im,abs")
                .map_err(|e| Error::io("stdout", e))?;
            for chi in group.characters() {
                let s = sums[chi.index() as usize];
                writeln!(
                    &mut out,
                    "{},{},{},{},{},{},{},{}",
                    chi.index(),
                    chi.conductor(),
                    chi.order(),
                    chi.parity(),
                    chi.is_primitive(),
                    s.re,
                    s.im,
                    s.norm()
                )
                .map_err(|e| Error::io("stdout", e))?;
            }
        }
        Command::Bv(args) => return experiment(cli.limit, cli.table_cache, args, false, &mut out),
        Command::Bdh(args) => return experiment(cli.limit, cli.table_cache, args, true, &mut out),
        Command::LargeSieve {
            trials,
            qmax,
            nmax,
            seed,
        } => {
            let groups = CharacterGroups::new(qmax)?;
            let table = table_for(cli.limit, &cli.table_cache, nmax.max(2))?;
            let mut max_ratio: Option<f64> = None;
            let mut violations = 0u64;
            let mut run_window =
                |w: &smoothdist::large_sieve::CoefficientWindow| -> Result<(), Error> {
                    let check = large_sieve_check(qmax, w, &groups)?;
                    if !check.ok {
                        violations += 1;
                    }
                    if check.rhs > 0.0 {
                        let r = check.lhs / check.rhs;
                        max_ratio = Some(max_ratio.map_or(r, |m: f64| m.max(r)));
                    }
                    Ok(())
                };
            for w in seeded_windows(seed, trials, nmax, nmax) {
                run_window(&w)?;
            }
            if trials > 0 {
                for w in adversarial_windows(qmax, nmax, &table, &groups)? {
                    run_window(&w)?;
                }
            }
            let ratio_text = max_ratio.map_or("n/a".to_string(), |r| r.to_string());
            if violations == 0 {
                writeln!(&mut out, "pass {ratio_text}").map_err(|e| Error::io("stdout", e))?;
            } else {
                writeln!(&mut out, "fail {ratio_text}").map_err(|e| Error::io("stdout", e))?;
                return Err(Error::Invariant(format!(
                    "{violations} large-sieve violations observed"
                )));
            }
        }
        Command::PerronCheck {
            x,
            y,
            moduli,
            heights,
            nodes,
        } => {
            let table = table_for(cli.limit, &cli.table_cache, x)?;
            writeln!(
                &mut out,
                "q,index,height,exact_re,exact_im,approx_re,approx_im,err,budget,quad_err,ok"
            )
            .map_err(|e| Error::io("stdout", e))?;
            let mut all_ok = true;
            for &q in &moduli {
                let group = CharacterGroup::new(q)?;
                for chi in group.characters() {
                    let exact = smoothdist::characters::psi_char(x, y, &chi, &table)?;
                    for &h in &heights {
                        let contour = ContourSpec::at_saddle(x, y, h, nodes)?;
                        let rec = perron_psi_char(x, y, &chi, &contour, &table)?;
                        let budget = perron_truncation_budget(x, y, h, &group, &table)?;
                        let err = (rec.approx - exact).norm();
                        let ok = err <= budget + rec.quadrature_err;
                        all_ok &= ok;
                        writeln!(
                            &mut out,
                            "{},{},{},{},{},{},{},{},{},{},{}",
                            q,
                            chi.index(),
                            h,
                            exact.re,
                            exact.im,
                            rec.approx.re,
                            rec.approx.im,
                            err,
                            budget,
                            rec.quadrature_err,
                            ok
                        )
                        .map_err(|e| Error::io("stdout", e))?;
                    }
                }
            }
            if !all_ok {
                return Err(Error::Invariant(
                    "contour reconstruction exceeded its error budget".into(),
                ));
            }
        }
        Command::SplitCheck { x, y, thresholds } => {
            let table = table_for(cli.limit, &cli.table_cache, x)?;
            let thresholds = thresholds.unwrap_or_else(|| {
                let t1 = (x as f64).powf(0.25).floor() as u64;
                let t2 = (x as f64).powf(1.0 / 3.0).floor() as u64;
                vec![t1.max(1), t2.max(1)]
            });
            writeln!(
                &mut out,
                "threshold,smooth_in_range,splits,partition_ok,bijective"
            )
            .map_err(|e| Error::io("stdout", e))?;
            for threshold in thresholds {
                let splits = splits_in_range(x, y, threshold, &table)?;
                let total = psi(x, y, &table)?;
                let below = psi(threshold.min(x), y, &table)?;
                let partition_ok = total == below + splits.len() as u64;
                let mut seen = std::collections::HashSet::new();
                let mut bijective = true;
                for s in &splits {
                    let n = s.head * s.cofactor;
                    bijective &= seen.insert(n);
                    // every split must reproduce via the splitting rule
                    let again = smooth_split(n, threshold, &table)?;
                    bijective &= again == Some(*s);
                }
                writeln!(
                    &mut out,
                    "{},{},{},{},{}",
                    threshold,
                    total - below,
                    splits.len(),
                    partition_ok,
                    bijective
                )
                .map_err(|e| Error::io("stdout", e))?;
                if !partition_ok || !bijective {
                    return Err(Error::Invariant(format!(
                        "split identity failed at threshold {threshold}"
                    )));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(
    limit: Option<u64>,
    cache: Option<PathBuf>,
    args: ExperimentArgs,
    bdh: bool,
    out: &mut impl Write,
) -> Result<ExitCode, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))?;
            ExperimentConfig::from_key_values(&text)?
        }
        None => ExperimentConfig::default(),
    };
    cfg.kind_bdh = bdh;
    if let Some(v) = args.x_grid {
        cfg.x_grid = v;
    }
    if let Some(v) = args.y_grid {
        cfg.y_grid = v;
    }
    if let Some(v) = args.q_grid {
        cfg.q_grid = v;
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.k {
        cfg.k_exponent = v;
    }
    if let Some(v) = args.c_candidates {
        cfg.c_candidates = v;
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        };
    }
    cfg.validate()?;

    let t0 = Instant::now();
    let table = table_for(limit, &cache, cfg.max_x())?;
    let groups = CharacterGroups::new(cfg.max_q())?;
    let report = smoothdist::report::run_experiment(&cfg, &groups, &table, |msg| {
        eprintln!("[{:.1?}] {msg}", t0.elapsed());
    })?;
    eprintln!(
        "experiment done in {:?}: {} records, fitted c = {}",
        t0.elapsed(),
        report.records.len(),
        report.fitted_c
    );

    match &args.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path.clone(), e))?;
            let mut w = BufWriter::new(file);
            write_report(&report, cfg.format, &mut w)?;
            w.flush().map_err(|e| Error::io(path.clone(), e))?;
            eprintln!("report written to {}", path.display());
        }
        None => write_report(&report, cfg.format, out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn write_report(
    report: &smoothdist::report::ExperimentReport,
    format: ReportFormat,
    w: &mut impl Write,
) -> Result<(), Error> {
    match format {
        ReportFormat::Csv => report.write_csv(w).map_err(|e| Error::io("report", e)),
        ReportFormat::Json => report.write_json(w),
    }
}
