//! `sumproj` command-line front end.
//!
//! Exit status: 0 when every check passed, 1 when budget flags were raised,
//! 2 on errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sumproj::discrete::{
    bad_directions, direction_set, gen_grid_example, gen_parallel_lines_example, points_to_text, rich_line_search,
    st_incidences,
};
use sumproj::experiments::{emit_plot_data, fit_exponent, random_st_instance, run_experiment, ExperimentConfig, Report};
use sumproj::planted::{gen_planted_fan, PlantedFanSpec};
use sumproj::projections::default_parameter_grid;
use sumproj::sets::{
    gen_ap_set, gen_cantor_set, gen_figure3_set, gen_random_ds_set, parse_point_set, AnyPointSet, PointCloud,
};
use sumproj::solymosi::{sum_product_pipeline, PipelineOutcome};
use sumproj::tubes::FanParams;
use sumproj::{Error, Scale};

const THREADS_ENV: &str = "SUMPROJ_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sumproj", version, about = "Discretized sum-product and projection experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Worker threads (overrides SUMPROJ_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress the human-readable summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Generator {
    Ap,
    Cantor,
    Random,
    Figure3,
    Planted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Example {
    /// Grid with pairs along short primitive vectors.
    Grid,
    /// Parallel horizontal lines.
    Lines,
    /// Random incidence instance.
    St,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated point set.
    Generate {
        #[arg(long, value_enum)]
        generator: Generator,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Covering number, separation and non-concentration of a point set file.
    Check {
        input: PathBuf,
        #[arg(long)]
        s: f64,
        /// Largest acceptable non-concentration constant.
        #[arg(long, default_value_t = 8.0)]
        budget: f64,
    },
    /// Run a config-driven experiment across scales.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the sum-product pipeline on a generated set.
    Pipeline {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.55)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, value_enum, default_value = "ap")]
        generator: Generator,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parameters t (default: the δ^s-grid of [0, 1]).
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// JSON report file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice examples, rich-line search and incidence counts.
    Discrete {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.75)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        c_st: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the points, CSV and trace files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit log2(value) against log2(1/δ) from a two-column `delta value` file.
    Fit { input: PathBuf },
    /// Write plot-data files for every panel of a report.
    PlotData {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Outcome {
    flags: Vec<String>,
}

fn say(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        println!("{}", msg.as_ref());
    }
}

fn threads(cli: Option<usize>) -> Result<Option<usize>, Error> {
    if cli.is_some() {
        return Ok(cli);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map(Some).map_err(|e| Error::Config {
            field: THREADS_ENV.into(),
            msg: format!("`{v}`: {e}"),
        }),
        Err(_) => Ok(None),
    }
}

fn generate(generator: Generator, m: u32, s: f64, seed: u64) -> Result<AnyPointSet<f64>, Error> {
    let scale = Scale::new(m)?;
    Ok(match generator {
        Generator::Ap => AnyPointSet::Line(gen_ap_set(scale, s)?),
        Generator::Cantor => AnyPointSet::Line(gen_cantor_set(scale, s)?),
        Generator::Random => AnyPointSet::Line(gen_random_ds_set(scale, s, seed)?),
        Generator::Figure3 => AnyPointSet::Plane(gen_figure3_set(scale)?),
        Generator::Planted => AnyPointSet::Plane(gen_planted_fan(scale, &PlantedFanSpec::standard(scale, seed))?.set),
    })
}

fn write_or_print(out: Option<&Path>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, body)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cmd: Command, quiet: bool) -> Result<Outcome, Error> {
    let mut flags = Vec::new();
    match cmd {
        Command::Generate {
            generator,
            m,
            s,
            seed,
            out,
        } => {
            let set = generate(generator, m, s, seed)?;
            write_or_print(out.as_deref(), &set.to_text())?;
        }
        Command::Check { input, s, budget } => {
            let text = fs::read_to_string(&input)?;
            let (len, cover, sep, nc) = match parse_point_set::<f64>(&text)? {
                AnyPointSet::Line(a) => (a.len(), a.covering_number(), a.is_delta_separated(), a.nonconcentration(s)?),
                AnyPointSet::Plane(b) => (b.len(), b.covering_number(), b.is_delta_separated(), b.nonconcentration(s)?),
            };
            say(quiet, format!("points={len}"));
            say(quiet, format!("covering_number={cover}"));
            say(quiet, format!("delta_separated={sep}"));
            say(quiet, format!("nonconcentration_constant={}", nc.constant));
            if let Some(w) = &nc.witness {
                say(quiet, format!("witness_center={:?} radius={} count={}", w.center, w.radius, w.count));
            }
            if !sep {
                flags.push("set is not delta-separated".into());
            }
            if !nc.passes(budget) {
                flags.push(format!("non-concentration constant {} exceeds {budget}", nc.constant));
            }
        }
        Command::Sweep { config, out, seed } => {
            let mut cfg = ExperimentConfig::parse(&fs::read_to_string(&config)?)?;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let res = run_experiment(&cfg)?;
            for f in &res.files {
                say(quiet, format!("wrote {}", f.display()));
            }
            for l in &res.summary.human {
                say(quiet, l);
            }
            flags = res.flags;
        }
        Command::Pipeline {
            m,
            s,
            sigma,
            generator,
            seed,
            t,
            out,
        } => {
            let scale = Scale::new(m)?;
            let a = match generate(generator, m, 0.5, seed)? {
                AnyPointSet::Line(a) => a,
                AnyPointSet::Plane(_) => {
                    return Err(Error::Config {
                        field: "generator".into(),
                        msg: "the pipeline needs a set on the line (ap, cantor or random)".into(),
                    })
                }
            };
            let ts = if t.is_empty() { default_parameter_grid(scale, s) } else { t };
            let report = sum_product_pipeline(&a, &ts, &FanParams::new(s, sigma))?;
            for st in report.flags() {
                flags.push(format!("stage {} {:?}: measured {} budget {}", st.name, st.status, st.measured, st.budget));
            }
            if let PipelineOutcome::StageFailure { stage, reason } = &report.outcome {
                if !quiet {
                    eprintln!("stopped at {stage}: {reason}");
                }
            }
            let json = serde_json::to_string_pretty(&report)?;
            write_or_print(out.as_deref(), &(json + "\n"))?;
        }
        Command::Discrete {
            example,
            n,
            s,
            c_st,
            seed,
            out,
        } => {
            let mut files: Vec<(String, String)> = Vec::new();
            match example {
                Example::Grid | Example::Lines => {
                    let ex = match example {
                        Example::Grid => gen_grid_example(n, s)?,
                        _ => gen_parallel_lines_example(n, s)?,
                    };
                    let dirs = direction_set(&ex.points, &ex.pairs)?;
                    say(quiet, format!("points={} pairs={} directions={}", ex.points.len(), ex.pairs.len(), dirs.len()));
                    let res = rich_line_search(&ex.points, &ex.pairs, s, c_st)?;
                    say(quiet, format!("rich_line=\"{}\" count={}", res.line, res.count));
                    if res.trace.pigeonhole_failed {
                        say(quiet, "pigeonhole failed at this scale; heaviest line taken directly");
                    }
                    if ex.points.len() <= 2000 {
                        files.push(("bad_directions.csv".into(), bad_directions(&ex.points, s, 2.0)?.to_csv()));
                    }
                    files.push(("points.txt".into(), points_to_text(&ex.points)));
                    files.push(("trace.txt".into(), res.trace.to_text()));
                }
                Example::St => {
                    let (lines, pts) = random_st_instance(n as usize, seed);
                    let st = st_incidences(&lines, &pts);
                    say(quiet, format!("points={} lines={} incidences={} ratio={}", st.points, st.lines, st.incidences, st.ratio));
                    if st.ratio > 4.0 {
                        flags.push(format!("ST ratio {} exceeds 4", st.ratio));
                    }
                    files.push(("points.txt".into(), points_to_text(&pts)));
                }
            }
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                for (name, body) in files {
                    fs::write(dir.join(name), body)?;
                }
            }
        }
        Command::Fit { input } => {
            let text = fs::read_to_string(&input)?;
            let mut series = Vec::new();
            for (ln, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let nums: Vec<f64> = line
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e: std::num::ParseFloatError| Error::Parse {
                        line: ln + 1,
                        msg: e.to_string(),
                    })?;
                if nums.len() != 2 {
                    return Err(Error::Parse {
                        line: ln + 1,
                        msg: format!("expected `delta value`, got `{line}`"),
                    });
                }
                series.push((nums[0], nums[1]));
            }
            let fit = fit_exponent(&series)?;
            println!("slope={}", fit.slope);
            println!("intercept={}", fit.intercept);
            println!("max_residual={}", fit.max_residual);
        }
        Command::PlotData { report, out } => {
            let r = Report::parse(&fs::read_to_string(&report)?)?;
            for f in emit_plot_data(&r, &out)? {
                say(quiet, format!("wrote {}", f.display()));
            }
        }
    }
    Ok(Outcome { flags })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.common.quiet;
    let result = threads(cli.common.threads).and_then(|n| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = n {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Error::Config {
            field: "threads".into(),
            msg: e.to_string(),
        })?;
        pool.install(|| run(cli.command, quiet))
    });
    match result {
        Ok(o) if o.flags.is_empty() => ExitCode::SUCCESS,
        Ok(o) => {
            for f in &o.flags {
                eprintln!("flag: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
