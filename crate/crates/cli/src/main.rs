use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use seqaccel::series_lab::SeriesSpec;
use seqaccel_cli::config::{parse_series, parse_values};
use seqaccel_cli::registry::TRANSFORMS;
use seqaccel_cli::{check, render_json, render_table, run, CliError, OutputFormat, Params, RunConfig, Source};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

/// Accelerate a sequence of partial sums with one or more transformations.
#[derive(Debug, Parser)]
#[command(name = "seqaccel", version)]
struct Args {
    /// Catalog series, e.g. `euler_2f0(3)`, `zeta:2`, `lemniscate`.
    #[arg(long)]
    series: Option<String>,
    /// Read values (one per line) from FILE, or from stdin with `-`.
    #[arg(long)]
    input: Option<String>,
    /// Treat input values as partial sums rather than terms.
    #[arg(long)]
    partial_sums: bool,
    /// Transformation column, `ID[:key=value,...]`; repeatable.
    #[arg(long = "transform", short = 't')]
    transforms: Vec<String>,
    /// Last row index.
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<f64>,
    #[arg(long)]
    ell: Option<usize>,
    /// Remainder estimate rule: u, um, t, d, v, stieltjes.
    #[arg(long)]
    omega_rule: Option<String>,
    /// Interpolation points: reciprocal, reciprocal_power, linear, power,
    /// gbw, levin_like, reciprocal_levin_like.
    #[arg(long)]
    points: Option<String>,
    /// binary64 or binary128.
    #[arg(long, default_value = "binary64")]
    precision: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Require every column's final untainted estimate to match VALUE to DIGITS significant digits.
    #[arg(long, value_name = "VALUE:DIGITS", allow_hyphen_values = true)]
    check: Option<String>,
    /// List catalog series and transform ids, then exit.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list {
        print!("{}", listing());
        return ExitCode::SUCCESS;
    }
    match execute(args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("seqaccel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn listing() -> String {
    let mut out = String::from("series:\n");
    for name in SeriesSpec::NAMES {
        out += &format!("  {name}\n");
    }
    out += "transforms:\n";
    for (id, about) in TRANSFORMS {
        out += &format!("  {id:<16} {about}\n");
    }
    out
}

fn execute(args: Args) -> Result<u8, CliError> {
    let source = match (&args.series, &args.input) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --series or --input, not both".into())),
        (None, None) => return Err(CliError::Usage("no input: give --series NAME or --input FILE|-".into())),
        (Some(s), None) => {
            if args.partial_sums {
                return Err(CliError::Usage("--partial-sums applies only to --input".into()));
            }
            Source::Catalog(parse_series(s)?)
        }
        (None, Some(path)) => {
            let text = if path == "-" {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
                buf
            } else {
                std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?
            };
            let label = if path == "-" { "stdin".to_string() } else { path.clone() };
            Source::External { label, values: parse_values(&text)?, sums: args.partial_sums }
        }
    };
    let config = RunConfig {
        source,
        transforms: args.transforms.iter().map(|t| t.parse()).collect::<Result<_, _>>()?,
        max_n: args.n,
        precision: args.precision.parse()?,
        format: match args.format {
            Format::Table => OutputFormat::Table,
            Format::Json => OutputFormat::Json,
        },
        check: args.check.as_deref().map(str::parse).transpose()?,
    };
    if config.check.is_some() && config.transforms.is_empty() {
        return Err(CliError::Usage("--check needs at least one --transform".into()));
    }
    let globals = Params {
        beta: args.beta,
        gamma: args.gamma,
        alpha: args.alpha,
        zeta: args.zeta,
        ell: args.ell,
        omega: args.omega_rule.clone(),
        points: args.points.clone(),
    };
    let table = run(&config, &globals)?;
    match config.format {
        OutputFormat::Table => print!("{}", render_table(&table)),
        OutputFormat::Json => print!("{}", render_json(&table, &config, &globals)),
    }
    let mut code = 0;
    if let Some(c) = &config.check {
        for outcome in check(&table, c) {
            eprintln!("check {}: {} {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.id, outcome.message);
            if !outcome.pass {
                code = 1;
            }
        }
    }
    Ok(code)
}
