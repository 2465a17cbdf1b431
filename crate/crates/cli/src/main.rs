//! `mzwave`: run, scan and fit heralded interferometer simulations.

mod format;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mzwave::dsl;
use mzwave::experiments::{self, DetectorModel, Preset};
use mzwave::{check_unitary, Bindings, Circuit, Error};

const EXIT_PARSE: u8 = 1;
const EXIT_UNBOUND: u8 = 2;
const EXIT_ZERO_HERALD: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "mzwave",
    version,
    about = "Exact simulator for heralded multi-photon interferometers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a circuit at fixed phases and print the heralded outcome table.
    Run(RunArgs),
    /// Sweep one or more phases and write a CSV table.
    Scan(ScanArgs),
    /// Fit the dominant harmonic of one column of a scan CSV.
    Fit(FitArgs),
    /// Check an .icd file and the unitarity of its circuit.
    Validate { file: PathBuf },
    /// Evaluate the CHSH combination on the fig2 apparatus.
    Chsh(ChshArgs),
}

#[derive(Args)]
struct Source {
    /// Built-in apparatus: fig1, fig2, fig3, sec4, single, ifm.
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    preset: Option<String>,
    /// Circuit description file (.icd).
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Detector model for fig1 and fig3.
    #[arg(long, default_value = "resolving")]
    model: DetectorModel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pretty,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Parameter binding `name=radians`; repeatable.
    #[arg(long = "param", value_name = "NAME=RADIANS")]
    params: Vec<String>,
    #[arg(long, value_enum, default_value = "pretty")]
    format: Format,
    /// Write the circuit as .icd to this path (`-` for stdout) and exit.
    #[arg(long, value_name = "FILE")]
    emit_icd: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    source: Source,
    /// A bare name is swept; `name=radians` is held fixed. Repeatable.
    /// With no bare name, every parameter not held fixed is swept together.
    #[arg(long = "param", value_name = "NAME[=RADIANS]")]
    params: Vec<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 64)]
    steps: usize,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Scan CSV.
    input: PathBuf,
    #[arg(long)]
    column: String,
}

#[derive(Args)]
struct ChshArgs {
    /// Analyzer phases a a' b b' in radians; optimal settings when omitted.
    #[arg(num_args = 4, allow_negative_numbers = true)]
    angles: Vec<f64>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnboundParameter(_) => EXIT_UNBOUND,
            Error::ZeroProbability => EXIT_ZERO_HERALD,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Validate { file } => cmd_validate(&file),
        Command::Chsh(args) => cmd_chsh(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = read_file(path)?;
    dsl::parse(&text).map_err(|errors| {
        for e in &errors {
            eprint!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message);
            if e.token.is_empty() {
                eprintln!();
            } else {
                eprintln!(" (at `{}`)", e.token);
            }
        }
        Failure::new(
            EXIT_PARSE,
            format!("{} error(s) in {}", errors.len(), path.display()),
        )
    })
}

fn load(source: &Source) -> Result<Preset, Failure> {
    match (&source.preset, &source.circuit) {
        (Some(name), _) => Ok(experiments::build(name, source.model)?),
        (None, Some(path)) => {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("circuit");
            Ok(Preset::from_circuit(name, load_circuit(path)?))
        }
        (None, None) => Err(Failure::new(EXIT_PARSE, "give --preset or --circuit")),
    }
}

fn parse_binding(raw: &str) -> Result<(String, f64), Failure> {
    let (name, value) = raw
        .split_once('=')
        .ok_or_else(|| Failure::new(EXIT_PARSE, format!("expected NAME=RADIANS, got `{raw}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Failure::new(EXIT_PARSE, format!("bad angle in `{raw}`")))?;
    if !value.is_finite() {
        return Err(Failure::new(
            EXIT_PARSE,
            format!("angle must be finite in `{raw}`"),
        ));
    }
    Ok((name.trim().to_string(), value))
}

fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", p.display())))
        }
        _ => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, e.to_string())),
    }
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let preset = load(&args.source)?;
    if let Some(path) = &args.emit_icd {
        return write_output(Some(path), &dsl::serialize(&preset.circuit));
    }
    let mut bindings = Bindings::new();
    for raw in &args.params {
        let (k, v) = parse_binding(raw)?;
        bindings.insert(k, v);
    }
    let rates = preset.gated_rates(&bindings)?;
    let mut out = String::new();
    match args.format {
        Format::Pretty => {
            let width = rates
                .rates
                .iter()
                .map(|(n, _)| n.len())
                .max()
                .unwrap_or(0)
                .max(7);
            out.push_str(&format!(
                "herald probability: {}\n",
                format::value(rates.herald_probability)
            ));
            out.push_str(&format!("{:<width$}  probability\n", "outcome"));
            for (name, p) in &rates.rates {
                out.push_str(&format!("{name:<width$}  {}\n", format::value(*p)));
            }
        }
        Format::Csv => {
            out.push_str("outcome,probability\n");
            out.push_str(&format!(
                "herald,{}\n",
                format::value(rates.herald_probability)
            ));
            for (name, p) in &rates.rates {
                out.push_str(&format!("{},{}\n", csv_field(name), format::value(*p)));
            }
        }
    }
    write_output(None, &out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_scan(args: ScanArgs) -> CmdResult {
    let preset = load(&args.source)?;
    if args.steps < experiments::MIN_SCAN_STEPS {
        return Err(Failure::new(
            EXIT_PARSE,
            format!("--steps must be at least {}", experiments::MIN_SCAN_STEPS),
        ));
    }
    let mut swept = Vec::new();
    let mut fixed = Bindings::new();
    for raw in &args.params {
        if raw.contains('=') {
            let (k, v) = parse_binding(raw)?;
            fixed.insert(k, v);
        } else {
            swept.push(raw.trim().to_string());
        }
    }
    if swept.is_empty() {
        swept = preset
            .circuit
            .params()
            .iter()
            .filter(|p| !fixed.contains_key(*p))
            .cloned()
            .collect();
    }
    if swept.is_empty() {
        return Err(Failure::new(EXIT_PARSE, "no parameter to sweep"));
    }
    for p in &swept {
        if !preset.circuit.params().contains(p) {
            return Err(Failure::new(
                EXIT_PARSE,
                format!("circuit has no parameter `{p}`"),
            ));
        }
        fixed.insert(p.clone(), 0.0);
    }
    preset.circuit.check_bindings(&fixed)?;
    let names: Vec<&str> = swept.iter().map(String::as_str).collect();
    let scan = experiments::scan_range(&preset, &names, &fixed, args.from, args.to, args.steps)?;

    let mut out = String::new();
    out.push_str(&csv_field(&swept[0]));
    for (name, _) in &scan.columns {
        out.push(',');
        out.push_str(&csv_field(name));
    }
    out.push('\n');
    for (i, phi) in scan.grid.iter().enumerate() {
        out.push_str(&format::value(*phi));
        for (_, column) in &scan.columns {
            out.push(',');
            out.push_str(&format::value(column[i]));
        }
        out.push('\n');
    }
    write_output(args.out.as_deref(), &out)
}

fn cmd_fit(args: FitArgs) -> CmdResult {
    let text = read_file(&args.input)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| Failure::new(EXIT_PARSE, format!("{}: {e}", args.input.display()));
    let headers = reader.headers().map_err(bad)?.clone();
    let index = headers
        .iter()
        .position(|h| h == args.column)
        .filter(|&i| i > 0)
        .ok_or_else(|| Failure::new(EXIT_PARSE, format!("no column `{}`", args.column)))?;
    let mut grid = Vec::new();
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(bad)?;
        let number = |i: usize| -> Result<f64, Failure> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Failure::new(EXIT_PARSE, format!("row {}: not a number", row + 2)))
        };
        grid.push(number(0)?);
        samples.push(number(index)?);
    }
    let fit = experiments::fit_fringe(&grid, &samples)?;
    let mut out = format!("column: {}\n", args.column);
    match fit.harmonic {
        Some(k) => out.push_str(&format!("harmonic: {k}\n")),
        None => out.push_str("harmonic: none (no dominant harmonic)\n"),
    }
    out.push_str(&format!("visibility: {}\n", format::value(fit.visibility)));
    out.push_str(&format!("c0: {}\n", format::value(fit.mean)));
    out.push_str(&format!("|ck|: {}\n", format::value(fit.magnitude)));
    out.push_str(&format!("phase: {}\n", format::value(fit.phase)));
    out.push_str(&format!("residual: {}\n", format::value(fit.residual)));
    write_output(None, &out)
}

fn cmd_validate(path: &Path) -> CmdResult {
    let circuit = load_circuit(path)?;
    let zeros: Bindings = circuit.params().iter().map(|p| (p.clone(), 0.0)).collect();
    let u = circuit.compose(&zeros)?;
    let tol = 1e-9 * circuit.modes() as f64;
    let check = check_unitary(&u, tol);
    if !check.passed {
        return Err(Failure::new(
            EXIT_PARSE,
            format!(
                "composed transfer matrix deviates from unitarity by {:e}",
                check.max_deviation
            ),
        ));
    }
    write_output(
        None,
        &format!(
            "OK: {} modes, {} photons, {} elements\n",
            circuit.modes(),
            circuit.photons(),
            circuit.elements().len()
        ),
    )
}

fn cmd_chsh(args: ChshArgs) -> CmdResult {
    let (a, a2, b, b2) = match args.angles.as_slice() {
        [a, a2, b, b2] => (*a, *a2, *b, *b2),
        _ => experiments::optimal_chsh_settings(),
    };
    let preset = experiments::build_fig2();
    let result = experiments::chsh(&preset, a, a2, b, b2)?;
    let mut out = String::from("setting,phi1,phi2,E\n");
    for (x, (an, av)) in [("a", a), ("a'", a2)].iter().enumerate() {
        for (y, (bn, bv)) in [("b", b), ("b'", b2)].iter().enumerate() {
            out.push_str(&format!(
                "{an}{bn},{},{},{}\n",
                format::value(*av),
                format::value(*bv),
                format::value(result.table[x][y])
            ));
        }
    }
    out.push_str(&format!("S = {}\n", format::value(result.s)));
    write_output(None, &out)
}
