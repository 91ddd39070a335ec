use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use sd_eval::engines::{
    EngineRegistry, ProviderClient, ProviderConfig, ProviderMode, ReasoningEffort,
    DEFAULT_API_KEY_ENV,
};
use sd_eval::harness::report::{render_report, ReportFormat};
use sd_eval::harness::{run_suite, RunConfig, DEFAULT_CAUSAL_TASK_PROMPT};
use sd_eval::service::{ServiceState, ADDR_ENV, DEFAULT_ADDR};
use sd_eval_core::eval::Suite;
use sd_eval_core::fixtures;
use sd_eval_core::synthesis::{canonical_suites, suite_fixture_json};

#[derive(Parser)]
#[command(name = "sd-eval", about = "Causal-map benchmark harness and engine service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the benchmark suites against an engine and render a report.
    Run(RunArgs),
    /// Suite fixture management.
    #[command(subcommand)]
    Suites(SuitesCommand),
    /// Recorded failure-fixture management.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Serve the engine REST API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct ProviderArgs {
    /// Model identifier sent to the provider.
    #[arg(long, default_value = "gpt-4o")]
    model: String,
    /// OpenAI-compatible API base URL.
    #[arg(long, default_value = "https://api.openai.com/v1")]
    base_url: String,
    /// Environment variable holding the API key.
    #[arg(long, default_value = DEFAULT_API_KEY_ENV)]
    api_key_env: String,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 120)]
    timeout_secs: u64,
    /// Retries on transient transport/429/5xx failures.
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    /// Reasoning effort, for models that accept it.
    #[arg(long)]
    reasoning_effort: Option<ReasoningEffort>,
    /// Replay transcripts from this directory instead of the network.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Record transcripts of live exchanges into this directory.
    #[arg(long)]
    record: Option<PathBuf>,
}

impl ProviderArgs {
    fn build(&self) -> anyhow::Result<(ProviderConfig, ProviderMode)> {
        if self.replay.is_some() && self.record.is_some() {
            anyhow::bail!("--replay and --record are mutually exclusive");
        }
        let config = ProviderConfig {
            base_url: self.base_url.clone(),
            model: self.model.clone(),
            api_key_env: self.api_key_env.clone(),
            timeout: Duration::from_secs(self.timeout_secs),
            max_retries: self.max_retries,
            reasoning_effort: self.reasoning_effort,
            ..ProviderConfig::default()
        };
        let mode = match (&self.replay, &self.record) {
            (Some(dir), _) => ProviderMode::Replay(dir.clone()),
            (_, Some(dir)) => ProviderMode::Record(dir.clone()),
            _ => ProviderMode::Live,
        };
        Ok((config, mode))
    }
}

#[derive(Args)]
struct RunArgs {
    /// Which suites to run: causal, conformance, or all.
    #[arg(long, default_value = "all")]
    suite: Vec<String>,
    /// Engine to drive.
    #[arg(long, default_value = "default")]
    engine: String,
    /// Suite generation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent tests in flight.
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Override the task prompt paired with causal-translation tests.
    #[arg(long, default_value = DEFAULT_CAUSAL_TASK_PROMPT)]
    causal_task_prompt: String,
    /// Replace the built-in 56-noun vocabulary (one noun per line).
    #[arg(long)]
    vocabulary: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "markdown")]
    format: ReportFormatArg,
    #[command(flatten)]
    provider: ProviderArgs,
}

#[derive(Clone, Copy)]
struct ReportFormatArg(ReportFormat);

impl std::str::FromStr for ReportFormatArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(ReportFormatArg)
    }
}

fn parse_suites(names: &[String]) -> anyhow::Result<Vec<Suite>> {
    let mut suites = Vec::new();
    for name in names {
        match name.as_str() {
            "causal" => suites.push(Suite::CausalTranslation),
            "conformance" => suites.push(Suite::Conformance),
            "all" => {
                suites.push(Suite::CausalTranslation);
                suites.push(Suite::Conformance);
            }
            other => anyhow::bail!("not a suite: {other:?} (causal|conformance|all)"),
        }
    }
    suites.dedup();
    Ok(suites)
}

#[derive(Subcommand)]
enum SuitesCommand {
    /// Write the canonical suite fixtures as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Replay the recorded failure fixtures through scoring and report
    /// any divergence.
    Verify {
        /// Fixture file; defaults to the built-in set.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ServeArgs {
    /// Listen address; falls back to $SD_EVAL_ADDR, then 127.0.0.1:8080.
    #[arg(long)]
    addr: Option<String>,
    #[command(flatten)]
    provider: ProviderArgs,
}

const EXIT_TEST_ERRORED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    match runtime.block_on(dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

async fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(args).await,
        Command::Suites(SuitesCommand::Export { out, seed }) => suites_export(out, seed),
        Command::Fixtures(FixturesCommand::Verify { file }) => fixtures_verify(file),
        Command::Serve(args) => serve(args).await,
    }
}

async fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let suites = parse_suites(&args.suite)?;
    let (provider_config, mode) = args.provider.build()?;
    // The dummy engine never touches the provider; label its rows by
    // engine name instead of the (unused) model id.
    let model_label = if args.engine == "predprey" {
        args.engine.clone()
    } else {
        provider_config.model.clone()
    };
    let provider = Arc::new(ProviderClient::new(provider_config, mode));
    let registry = EngineRegistry::builtin(provider);

    let config = RunConfig {
        suites,
        engine: args.engine.clone(),
        model_label,
        seed: args.seed,
        concurrency: args.concurrency,
        causal_task_prompt: args.causal_task_prompt.clone(),
        vocabulary_file: args.vocabulary.clone(),
    };
    let report = run_suite(&registry, &config).await?;
    let rendered = render_report(&report, args.format.0);
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => println!("{rendered}"),
    }
    if let Some(path) = &args.out {
        println!(
            "{}: causal {}% | conformance {}% | overall {}% | errored {} -> {}",
            report.model,
            report.scorecard.causal_percent(),
            report.scorecard.conformance_percent(),
            report.scorecard.overall_percent(),
            report.errored.len(),
            path.display()
        );
    }
    Ok(if report.errored.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_TEST_ERRORED)
    })
}

fn suites_export(out: Option<PathBuf>, seed: u64) -> anyhow::Result<ExitCode> {
    let (causal, conformance) = canonical_suites(seed)?;
    let document = serde_json::to_string_pretty(&suite_fixture_json(&causal, &conformance))?;
    match out {
        Some(path) => {
            std::fs::write(&path, document)
                .with_context(|| format!("writing suites to {}", path.display()))?;
            println!(
                "wrote {} causal and {} conformance cases to {}",
                causal.len(),
                conformance.len(),
                path.display()
            );
        }
        None => println!("{document}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn fixtures_verify(file: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let fixtures = match file {
        Some(path) => fixtures::load_fixtures(&path)?,
        None => fixtures::builtin_fixtures(),
    };
    let report = fixtures::verify_fixtures(&fixtures);
    for fixture in &fixtures {
        let ok = !report
            .divergences
            .iter()
            .any(|d| d.fixture_id == fixture.id);
        println!(
            "{} fixture {:>3} [{}] {}",
            if ok { "PASS" } else { "FAIL" },
            fixture.id,
            fixture.model,
            fixture.title
        );
    }
    for divergence in &report.divergences {
        println!("  fixture {}: {}", divergence.fixture_id, divergence.detail);
    }
    println!("{}/{} fixtures replayed clean", report.passed, report.total);
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_TEST_ERRORED)
    })
}

async fn serve(args: ServeArgs) -> anyhow::Result<ExitCode> {
    let (provider_config, mode) = args.provider.build()?;
    let timeout = provider_config.timeout;
    let provider = Arc::new(ProviderClient::new(provider_config, mode));
    let registry = Arc::new(EngineRegistry::builtin(provider));
    let addr = args
        .addr
        .or_else(|| std::env::var(ADDR_ENV).ok())
        .unwrap_or_else(|| DEFAULT_ADDR.to_string());
    sd_eval::service::serve(&addr, ServiceState::new(registry, timeout)).await?;
    Ok(ExitCode::SUCCESS)
}
