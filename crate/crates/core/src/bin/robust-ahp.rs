use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use robust_ahp::attack::run_attack;
use robust_ahp::config::Config;
use robust_ahp::inconsistency::{koczkodaj_k, saaty_ci};
use robust_ahp::io::{self as rio, FileError, NamedPanel};
use robust_ahp::matrix::ranking_order;
use robust_ahp::montecarlo::{self, Scenario};
use robust_ahp::robust::{Method, PanelAnalysis};
use robust_ahp::Error;

#[derive(Parser)]
#[command(name = "robust-ahp", version, about = "Manipulation-resistant group AHP aggregation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate a panel with the classical or a robust method.
    Aggregate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "classic")]
        method: MethodArg,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bribe experts until the runner-up wins.
    Attack {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the manipulated panel to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run Monte Carlo experiment 1 (attack and defense) or 2 (disturbance).
    Experiment {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for records.csv and summary.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Generate the scenario corpus and write it as corpus.jsonl.
    Gen {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-matrix CI and Koczkodaj index.
    Inspect {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Classic,
    Apdd,
    Aid,
    Mx,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Classic => Method::Classic,
            MethodArg::Apdd => Method::Apdd,
            MethodArg::Aid => Method::Aid,
            MethodArg::Mx => Method::Mx,
        }
    }
}

enum Failure {
    File(FileError),
    Domain(Error),
    Output(PathBuf, io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::File(e) => e.exit_code() as u8,
            Failure::Domain(_) => 3,
            Failure::Output(..) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::File(e) => write!(f, "{e}"),
            Failure::Domain(e) => write!(f, "{e}"),
            Failure::Output(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::File(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn output(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Output(path.to_path_buf(), e)
}

fn load_config(path: Option<&Path>, seed: Option<u64>, workers: Option<usize>) -> CliResult<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_ranking(scores: &[f64]) -> String {
    let parts: Vec<String> = ranking_order(scores).iter().map(|i| format!("a{}", i + 1)).collect();
    parts.join(" > ")
}

fn aggregate(input: &Path, method: Method, config: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let cfg = load_config(config, None, None)?;
    let NamedPanel { ids, panel } = rio::load_panel(input)?;
    let analysis = PanelAnalysis::new(&panel);
    let outcome = analysis.aggregate(method, &cfg.robust()?)?;
    let ci = analysis.ci()?;

    let mut text = String::new();
    text.push_str(&format!("experts: {}, alternatives: {}, method: {method}\n", panel.k(), panel.n()));
    for (q, id) in ids.iter().enumerate() {
        text.push_str(&format!(
            "{id}: w = {}, CI = {:.6}, weight = {:.6}\n",
            fmt_vec(analysis.priorities()[q].as_slice()),
            ci[q],
            outcome.weights[q]
        ));
    }
    let agg = &outcome.aggregation;
    text.push_str(&format!("aggregate: {}\n", fmt_vec(&agg.raw_scores)));
    text.push_str(&format!("normalized: {}\n", fmt_vec(agg.priorities.as_slice())));
    text.push_str(&format!("ranking: {}\n", fmt_ranking(&agg.raw_scores)));
    let w = agg.priorities.winner();
    text.push_str(&format!("winner: a{} ({:.6})\n", w + 1, agg.raw_scores[w]));

    match out {
        Some(p) => fs::write(p, text).map_err(output(p)),
        None => io::stdout().write_all(text.as_bytes()).map_err(output(Path::new("<stdout>"))),
    }
}

fn attack(input: &Path, config: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let cfg = load_config(config, None, None)?;
    let NamedPanel { ids, panel } = rio::load_panel(input)?;
    let result = run_attack(&panel, &cfg.attack())?;
    let bribed: Vec<String> = result.bribed.iter().map(|q| (q + 1).to_string()).collect();
    println!("winner: a{}, runner-up: a{}", result.winner + 1, result.runner_up + 1);
    println!("honest: {}", fmt_vec(&result.honest.raw_scores));
    println!("bribed: [{}]", bribed.join(", "));
    println!("manipulated: {}", fmt_vec(&result.manipulated.raw_scores));
    println!("ranking: {}", fmt_ranking(&result.manipulated.raw_scores));
    println!("success: {}", result.succeeded);
    if result.vacuous {
        println!("note: runner-up already tied for first; nothing to do");
    }
    if let Some(p) = out {
        rio::save_panel(p, &result.manipulated_panel, Some(&ids))?;
    }
    Ok(())
}

fn create_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(output(dir))
}

fn write_csv(path: &Path, f: impl FnOnce(BufWriter<File>) -> io::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(output(path))?;
    f(BufWriter::new(file)).map_err(output(path))
}

fn corpus(cfg: &Config) -> CliResult<Vec<Scenario>> {
    Ok(montecarlo::generate_corpus(&cfg.corpus())?)
}

fn experiment(which: u8, cfg: &Config, out: &Path) -> CliResult<()> {
    create_out_dir(out)?;
    let started = Instant::now();
    let scenarios = corpus(cfg)?;
    let ecfg = cfg.experiment()?;
    let records = out.join("records.csv");
    let summary = out.join("summary.csv");
    let headline = if which == 1 {
        let recs = montecarlo::experiment1(&scenarios, &ecfg, cfg.workers)?;
        let report = montecarlo::summarize_experiment1(&recs, cfg.ci_bucket_width)?;
        write_csv(&records, |w| rio::write_experiment1_records(&recs, w))?;
        write_csv(&summary, |w| rio::write_summary(&report, w))?;
        montecarlo::experiment1_headline(&recs)?.to_string()
    } else {
        let recs = montecarlo::experiment2(&scenarios, &ecfg, cfg.workers)?;
        let report = montecarlo::summarize_experiment2(&recs, cfg.ci_bucket_width)?;
        write_csv(&records, |w| rio::write_experiment2_records(&recs, w))?;
        write_csv(&summary, |w| rio::write_summary(&report, w))?;
        montecarlo::experiment2_headline(&recs)?.to_string()
    };
    print!("{headline}");
    eprintln!("done in {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn gen(cfg: &Config, out: &Path) -> CliResult<()> {
    create_out_dir(out)?;
    let scenarios = corpus(cfg)?;
    let path = out.join("corpus.jsonl");
    write_csv(&path, |w| rio::write_corpus(&scenarios, w))?;
    println!("wrote {} scenarios to {}", scenarios.len(), path.display());
    Ok(())
}

fn inspect(input: &Path) -> CliResult<()> {
    let NamedPanel { ids, panel } = rio::load_panel(input)?;
    println!("expert,n,ci,koczkodaj");
    for (id, c) in ids.iter().zip(panel.iter()) {
        let k = koczkodaj_k(c).map(|k| format!("{k:.6}")).unwrap_or_else(|_| "-".into());
        println!("{id},{},{:.6},{k}", c.n(), saaty_ci(c)?);
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Aggregate {
            input,
            method,
            config,
            out,
        } => aggregate(&input, method.into(), config.as_deref(), out.as_deref()),
        Command::Attack { input, config, out } => attack(&input, config.as_deref(), out.as_deref()),
        Command::Experiment {
            which,
            config,
            seed,
            out,
            workers,
        } => experiment(which, &load_config(config.as_deref(), seed, workers)?, &out),
        Command::Gen { config, seed, out } => gen(&load_config(config.as_deref(), seed, None)?, &out),
        Command::Inspect { input } => inspect(&input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
