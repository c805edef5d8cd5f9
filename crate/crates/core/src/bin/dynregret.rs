use std::path::{Path, PathBuf};
use std::process::ExitCode as ProcessExit;

use clap::{Args, Parser, Subcommand};

use dynregret::bounds::AlphaGrid;
use dynregret::harness::{
    emit_report, load_config, run_experiment, run_sweep, verdict_table, verify_all, ExitCode,
    ExperimentConfig, ReportFormat, RunReport, SweepParam, SweepRow,
};
use dynregret::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dynregret",
    version,
    about = "Online gradient methods and dynamic-regret bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides the config's output section.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_name = "json|csv")]
    format: Option<String>,
    /// Seed applied to every seeded generator.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Log grid for the squared path-length bound, e.g. 1e-3:1e3:13.
    #[arg(long, value_name = "lo:hi:points")]
    alpha_grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments and write the report.
    Run(Common),
    /// Run the experiments, print the verdict table and exit 1 on any failure.
    Verify(Common),
    /// Write each configured scenario as a scenario file.
    Gen(Common),
    /// Re-run generated scenarios over a range of horizons or drifts.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary.
        #[arg(long, value_name = "horizon|drift")]
        vary: String,
        /// Comma-separated values.
        #[arg(long, value_name = "V1,V2,...", value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

struct Prepared {
    config: ExperimentConfig,
    out: Option<PathBuf>,
    format: ReportFormat,
}

fn prepare(c: &Common) -> Result<Prepared> {
    let mut config = load_config(&c.config)?;
    if let Some(seed) = c.seed {
        config.override_seed(seed);
    }
    if let Some(grid) = &c.alpha_grid {
        config.alpha_grid = Some(AlphaGrid::parse(grid).map_err(|e| Error::InvalidConfig(e.to_string()))?);
    }
    let format = match &c.format {
        Some(f) => f.parse()?,
        None => config.output.as_ref().map(|o| o.format).unwrap_or_default(),
    };
    let out = c.out.clone().or_else(|| {
        config.output.as_ref().map(|o| match &config.base_dir {
            Some(base) if o.dir.is_relative() => base.join(&o.dir),
            _ => o.dir.clone(),
        })
    });
    Ok(Prepared { config, out, format })
}

fn write_or_print(
    report: &RunReport,
    out: Option<&Path>,
    format: ReportFormat,
    print_json: bool,
) -> Result<()> {
    match out {
        Some(dir) => {
            for path in emit_report(report, dir, format)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None if format == ReportFormat::Csv => {
            return Err(Error::InvalidConfig("csv output needs --out DIR".into()));
        }
        None if print_json => print!("{}", report.to_json()?),
        None => {}
    }
    Ok(())
}

fn summarize(report: &RunReport) {
    for s in &report.scenarios {
        let r = &s.regularity;
        println!(
            "{} (T={}, d={}): P_T={:.6} S_T={:.6} V_T={:.6}",
            s.label, s.horizon, s.dim, r.path_length, r.squared_path_length, r.function_variation
        );
        for a in &s.algorithms {
            let bound = a
                .bounds
                .as_ref()
                .map_or("n/a".to_string(), |b| format!("{:.6}", b.min_bound));
            println!(
                "  {:<24} regret={:.6} min_bound={}",
                a.name, a.realized_regret, bound
            );
        }
    }
}

fn sweep_output(rows: &[SweepRow], out: Option<&Path>, format: ReportFormat) -> Result<()> {
    println!(
        "{:<28} {:<20} {:>10} {:>8} {:>14} {:>12} {:>12} {:>12} {:>14}",
        "scenario", "algorithm", "value", "T", "regret", "P_T", "S_T", "V_T", "min_bound"
    );
    for r in rows {
        println!(
            "{:<28} {:<20} {:>10} {:>8} {:>14.6} {:>12.6} {:>12.6} {:>12.6} {:>14}",
            r.scenario,
            r.algorithm,
            r.value,
            r.horizon,
            r.realized_regret,
            r.path_length,
            r.squared_path_length,
            r.function_variation,
            r.min_bound.map_or("n/a".into(), |b| format!("{b:.6}"))
        );
    }
    let Some(dir) = out else { return Ok(()) };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let path = match format {
        ReportFormat::Json => {
            let path = dir.join("sweep.json");
            let mut text = serde_json::to_string_pretty(rows)?;
            text.push('\n');
            std::fs::write(&path, text).map_err(io(&path))?;
            path
        }
        ReportFormat::Csv => {
            let path = dir.join("sweep.csv");
            let mut w = csv::Writer::from_path(&path)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(io(&path))?;
            path
        }
    };
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(c) => {
            let p = prepare(&c)?;
            let report = run_experiment(&p.config)?;
            if p.out.is_some() {
                summarize(&report);
            }
            write_or_print(&report, p.out.as_deref(), p.format, true)?;
            Ok(ExitCode::Pass)
        }
        Command::Verify(c) => {
            let p = prepare(&c)?;
            let (report, code) = verify_all(&p.config)?;
            print!("{}", verdict_table(&report));
            write_or_print(&report, p.out.as_deref(), p.format, false)?;
            Ok(code)
        }
        Command::Gen(c) => {
            let p = prepare(&c)?;
            let dir = p.out.unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
                path: dir.clone(),
                source,
            })?;
            for (i, case) in p.config.experiments.iter().enumerate() {
                let scenario = case.scenario.load(p.config.base_dir.as_deref())?;
                let path = dir.join(format!("s{i:02}_{}.json", sanitize(scenario.label())));
                std::fs::write(&path, scenario.to_config_text()).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::Pass)
        }
        Command::Sweep { common, vary, values } => {
            let p = prepare(&common)?;
            let param: SweepParam = vary.parse()?;
            let rows = run_sweep(&p.config, param, &values)?;
            sweep_output(&rows, p.out.as_deref(), p.format)?;
            Ok(ExitCode::Pass)
        }
    }
}

fn main() -> ProcessExit {
    let cli = Cli::parse();
    let code = execute(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::for_error(&e)
    });
    ProcessExit::from(code as u8)
}
