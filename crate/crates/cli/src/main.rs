use std::path::PathBuf;
use std::process::ExitCode;

use almost_conv::Complex64;
use almost_conv_cli::{
    generate, load_spec, run, Analysis, AnalysisConfig, CliError, CliResult, RenderRange, ScheduleConfig,
    TauberMethod,
};
use almost_conv::{Sidedness, Taper};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "almost-conv", version, about = "Almost-convergence analyses of sequences and sampled functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a generator to a samples CSV.
    Generate(GenerateArgs),
    /// Run the analysis named in the config (or by --analysis).
    Analyze {
        #[arg(long, value_enum)]
        analysis: Option<Analysis>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tapered DFT magnitudes and the support check.
    Spectrum {
        #[arg(long, value_enum)]
        taper: Option<TaperArg>,
        #[arg(long)]
        mask_threshold: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Abel/Laplace sweeps and the boundary-mean consistency checks.
    Tauber {
        #[command(flatten)]
        tauber: TauberArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ordinary, weak* and Cesàro verdicts side by side.
    Chain {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Randomized identities on Z_N.
    Cyclic {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        cases: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TaperArg {
    Rectangular,
    Hann,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    OneSided,
    TwoSided,
}

#[derive(Args, Default)]
struct RangeArgs {
    #[arg(long, allow_negative_numbers = true)]
    n_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    n_max: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
}

impl RangeArgs {
    fn apply(&self, r: &mut RenderRange) {
        r.n_min = self.n_min.or(r.n_min);
        r.n_max = self.n_max.or(r.n_max);
        r.x0 = self.x0.or(r.x0);
        r.step = self.step.or(r.step);
        r.count = self.count.or(r.count);
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator JSON file.
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    range: RangeArgs,
    /// Output CSV; defaults to `signal.csv` in --out-dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON analysis config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator JSON or samples CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long)]
    k_min: Option<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    growth: Option<f64>,
    #[arg(long, value_enum)]
    sidedness: Option<SideArg>,
    /// Comma-separated gap half-widths.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Comma-separated Abel radii or Laplace abscissas.
    #[arg(long, value_delimiter = ',')]
    x_schedule: Option<Vec<f64>>,
}

#[derive(Args)]
struct TauberArgs {
    #[arg(long, value_enum)]
    method: Option<TauberMethod>,
    #[arg(long)]
    bound: Option<f64>,
    #[arg(long)]
    lower: Option<f64>,
    #[arg(long)]
    eps_tail: Option<f64>,
    /// Declared value as `re` or `re,im`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    target: Option<Vec<f64>>,
}

impl CommonArgs {
    fn config(&self, analysis: Option<Analysis>) -> CliResult<AnalysisConfig> {
        let mut c = match &self.config {
            Some(p) => AnalysisConfig::load(p)?,
            None => AnalysisConfig::default(),
        };
        if let Some(a) = analysis {
            c.analysis = a;
        }
        if let Some(p) = &self.input {
            c.input = Some(p.clone());
        }
        c.tol = self.tol.or(c.tol);
        c.seed = self.seed.unwrap_or(c.seed);
        self.range.apply(&mut c.range);
        if self.k_min.is_some() || self.k_max.is_some() || self.growth.is_some() || self.sidedness.is_some() {
            let base = c.schedule.clone();
            let k_min = self.k_min.or(base.as_ref().map(|s| s.k_min));
            let k_max = self.k_max.or(base.as_ref().map(|s| s.k_max));
            let (Some(k_min), Some(k_max)) = (k_min, k_max) else {
                return Err(CliError::Config("a custom schedule needs --k-min and --k-max".into()));
            };
            c.schedule = Some(ScheduleConfig {
                k_min,
                k_max,
                growth: self.growth.or(base.as_ref().map(|s| s.growth)).unwrap_or(2.0),
                sidedness: match self.sidedness {
                    Some(SideArg::OneSided) => Sidedness::OneSided,
                    Some(SideArg::TwoSided) => Sidedness::TwoSided,
                    None => base.map(|s| s.sidedness).unwrap_or_default(),
                },
            });
        }
        if let Some(d) = &self.deltas {
            c.deltas = Some(d.clone());
        }
        if let Some(x) = &self.x_schedule {
            c.x_schedule = Some(x.clone());
        }
        Ok(c)
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let (config, out_dir) = match cli.command {
        Command::Generate(g) => {
            let spec = load_spec(&g.spec)?;
            let mut range = RenderRange::default();
            g.range.apply(&mut range);
            let out = g.out.unwrap_or_else(|| g.out_dir.join("signal.csv"));
            generate(&spec, &range, &out)?;
            println!("{}", out.display());
            return Ok(());
        }
        Command::Analyze { analysis, common } => (common.config(analysis)?, common.out_dir),
        Command::Spectrum { taper, mask_threshold, common } => {
            let mut c = common.config(Some(Analysis::Spectrum))?;
            if let Some(t) = taper {
                c.taper = match t {
                    TaperArg::Rectangular => Taper::Rectangular,
                    TaperArg::Hann => Taper::Hann,
                };
            }
            c.mask_threshold = mask_threshold.or(c.mask_threshold);
            (c, common.out_dir)
        }
        Command::Tauber { tauber, common } => {
            let mut c = common.config(Some(Analysis::Tauber))?;
            let t = &mut c.tauber;
            t.method = tauber.method.unwrap_or(t.method);
            t.bound = tauber.bound.or(t.bound);
            t.lower = tauber.lower.or(t.lower);
            t.eps_tail = tauber.eps_tail.unwrap_or(t.eps_tail);
            if let Some(v) = tauber.target {
                t.target = Some(match v.as_slice() {
                    [re] => Complex64::new(*re, 0.0),
                    [re, im] => Complex64::new(*re, *im),
                    _ => return Err(CliError::Config("--target takes re or re,im".into())),
                });
            }
            (c, common.out_dir)
        }
        Command::Chain { common } => (common.config(Some(Analysis::Chain))?, common.out_dir),
        Command::Cyclic { n, cases, common } => {
            let mut c = common.config(Some(Analysis::CyclicSuite))?;
            c.n = n.or(c.n);
            c.cases = cases.or(c.cases);
            (c, common.out_dir)
        }
    };
    for path in run(&config, &out_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
