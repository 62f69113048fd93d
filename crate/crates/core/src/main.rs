use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsteen::cli_io::{self, JobConfig, OutputFormat, Section, Space};
use qsteen::equivariant_quotient::{QuotientDescriptor, DEFAULT_TRUNCATION_ORDER};
use qsteen::{checks, EqElement};

#[derive(Parser)]
#[command(name = "qsteen", version, about = "Exact tables of quantum and symplectic Steenrod squares over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Markdown => OutputFormat::Markdown,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Oline,
    TstarSphere,
}

#[derive(Args)]
struct OlineArgs {
    #[arg(long, value_enum, default_value = "oline")]
    space: SpaceArg,
    #[arg(short)]
    m: u32,
    #[arg(short, default_value_t = 1)]
    k: u32,
    /// Truncation order in h.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_ORDER)]
    hmax: u32,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// QS(x^0) .. QS(x^(m+1))
    Qs(OlineArgs),
    /// Normal forms of PS over the SH basis
    Ps(OlineArgs),
    /// Chain-level prefixes of PS on T*S^n
    Loop {
        #[arg(short)]
        n: u32,
        #[arg(long, default_value_t = cli_io::DEFAULT_I_MAX)]
        imax: u32,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
    /// Solve the linear constraints on r_eq
    SolveReq {
        #[arg(short)]
        m: u32,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
    /// Run the invariant suite
    Check,
    /// Decide membership in QS(x^m + T) Λ[[h]] for a JSON element (file or `-` for stdin)
    CheckMembership {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION_ORDER)]
        hmax: u32,
    },
    /// Run a job config (or an array of them) from a JSON file
    Run { config: PathBuf },
}

fn oline_job(a: &OlineArgs, section: Section) -> JobConfig {
    JobConfig {
        space: match a.space {
            SpaceArg::Oline => Space::Oline,
            SpaceArg::TstarSphere => Space::TstarSphere,
        },
        m: Some(a.m),
        k: Some(a.k),
        truncation_order: a.hmax,
        output_format: a.format.into(),
        section,
        ..JobConfig::oline(a.m, a.k)
    }
}

fn execute(mut cfg: JobConfig) -> anyhow::Result<Vec<u8>> {
    cfg.apply_env();
    let out = cli_io::cache_get_or_compute(&cfg, || {
        let report = cli_io::run_job(&cfg)?;
        Ok(cli_io::export(&report, cfg.output_format))
    })?;
    log::info!("cache: {:?}", out.status);
    Ok(out.bytes)
}

#[derive(Serialize)]
struct MembershipOutput {
    #[serde(flatten)]
    verdict: qsteen::equivariant_quotient::Membership,
    normal_form: EqElement,
    multipliers: Vec<(u32, String)>,
    witness: EqElement,
}

fn check_membership(input: &PathBuf, hmax: u32) -> anyhow::Result<Vec<u8>> {
    let mut text = String::new();
    if input.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(input)?;
    }
    let f: EqElement = serde_json::from_str(&text).map_err(|e| qsteen::Error::Parse(e.to_string()))?;
    let q = QuotientDescriptor::new(f.ring(), hmax)?;
    let red = q.reduce(&f)?;
    let out = MembershipOutput {
        verdict: q.member(&f)?,
        witness: red.witness(&q),
        multipliers: red.multipliers.iter().map(|(j, mu)| (*j, mu.to_string())).collect(),
        normal_form: red.normal_form,
    };
    Ok(serde_json::to_vec_pretty(&out)?)
}

fn run_batch(path: &PathBuf) -> anyhow::Result<Vec<u8>> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let configs: Vec<JobConfig> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    };
    let outputs = qsteen::parallel::try_map(&configs, |c| execute(c.clone()))?;
    Ok(outputs.join(&b'\n'))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Qs(a) => execute(oline_job(a, Section::Qs)),
        Command::Ps(a) => execute(oline_job(a, Section::Ps)),
        Command::Loop { n, imax, format } => execute(JobConfig {
            i_max: Some(*imax),
            output_format: (*format).into(),
            section: Section::Prefixes,
            ..JobConfig::tstar_sphere(*n)
        }),
        Command::SolveReq { m, format } => execute(JobConfig {
            output_format: (*format).into(),
            section: Section::Solver,
            ..JobConfig::oline(*m, 1)
        }),
        Command::CheckMembership { input, hmax } => check_membership(input, *hmax),
        Command::Run { config } => run_batch(config),
        Command::Check => {
            let outcomes = checks::run_all();
            let mut text = String::new();
            for o in &outcomes {
                let mark = if o.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{mark}  {}", o.name));
                if !o.detail.is_empty() {
                    text.push_str(&format!("  ({})", o.detail));
                }
                text.push('\n');
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            text.push_str(&format!("{} checks, {failed} failed", outcomes.len()));
            println!("{text}");
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(bytes) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(&bytes);
            if !bytes.ends_with(b"\n") {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
