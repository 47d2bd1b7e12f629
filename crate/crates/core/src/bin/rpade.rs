use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Complex, Float};
use serde_json::{json, Value};

use riccati_pade::models::{qes_model, QesLabel};
use riccati_pade::potential::{parse_rational, Parity, PolynomialPotential};
use riccati_pade::precision::{PrecisionPolicy, DEFAULT_MAX_BITS};
use riccati_pade::scan::{scan_three_well, three_well_sequences, ScanSettings};
use riccati_pade::solver::{
    convergence_slope, converged_eigenvalue, ground_state_seed, log10, slope_from_points, RootSequence, SlopeFit,
    Tracker,
};
use riccati_pade::symbolic::{symbolic_report, ReportFormat};
use riccati_pade::text::{complex_parts, decimal_string, parse_complex, parse_grid, rational_string, shown_digits};
use riccati_pade::{Error, HankelIndex};

#[derive(Parser)]
#[command(name = "rpade", version, about = "Riccati-Pade eigenvalues and resonances of even polynomial oscillators")]
struct Cli {
    /// File of `key = value` lines presetting precision and dimension options
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report run metadata on stderr
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track one root to a certified eigenvalue and print it as JSON
    Solve(SolveArgs),
    /// Three-well bound state and resonance over a coupling grid, as CSV
    ScanG(ScanArgs),
    /// Fit log10 |E^[D] - E^[D-1]| = a + b D and print the fit as JSON
    Slope(SlopeArgs),
    /// Exact Hankel determinant of a small dimension
    Symbolic(SymbolicArgs),
}

#[derive(Args, Clone, Default)]
struct Budget {
    /// Decimal digits to certify
    #[arg(long)]
    digits: Option<u32>,
    /// First Hankel dimension
    #[arg(long)]
    d_min: Option<usize>,
    /// Largest Hankel dimension
    #[arg(long)]
    d_max: Option<usize>,
    /// Initial working precision in bits
    #[arg(long)]
    working_bits: Option<u32>,
    /// Precision cap in bits
    #[arg(long)]
    max_bits: Option<u32>,
    /// Factor applied to the precision on escalation, e.g. 2 or 3/2
    #[arg(long)]
    escalation_factor: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// Potential coefficients v_1,...,v_K of x^2,...,x^(2K), exact rationals
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    #[arg(long, default_value = "even")]
    parity: String,
    /// Starting energy, `a`, `a+bi` or `a-bi`
    #[arg(long, allow_hyphen_values = true)]
    seed: String,
    /// Hankel offset d
    #[arg(long)]
    offset: Option<usize>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct ScanArgs {
    /// Couplings: `a,b,c` or `start:stop:step`; empty for none
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Exponent k of the family x^2 (1 - g^(2k) x^(2k))^2
    #[arg(long)]
    k: Option<u32>,
    /// Override the bound-state seed
    #[arg(long, allow_hyphen_values = true)]
    bound_seed: Option<String>,
    /// Override the resonance seed
    #[arg(long, allow_hyphen_values = true)]
    res_seed: Option<String>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Clone, Copy, ValueEnum)]
enum State {
    Bound,
    Resonance,
}

#[derive(Args)]
struct SlopeArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["three_well", "test_sequence"])]
    coeffs: Option<String>,
    #[arg(long, default_value = "even")]
    parity: String,
    /// Starting energy; defaults to the harmonic estimate of the lowest state
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Three-well coupling g instead of --coeffs
    #[arg(long, conflicts_with = "test_sequence")]
    three_well: Option<String>,
    #[arg(long)]
    k: Option<u32>,
    /// Which three-well state to follow
    #[arg(long, value_enum, default_value = "bound")]
    state: State,
    /// Synthetic sequence E^[D] = 1 + 10^(-2D)
    #[arg(long)]
    test_sequence: bool,
    /// Hankel offset d
    #[arg(long)]
    offset: Option<usize>,
    /// Trailing fraction of the points used by the fit
    #[arg(long)]
    fit_fraction: Option<f64>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct SymbolicArgs {
    /// Catalogued model V1..V4
    #[arg(long, conflicts_with = "coeffs")]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    #[arg(long)]
    parity: Option<String>,
    /// Dimension D; defaults to the model's
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long, default_value_t = 0)]
    offset: usize,
    /// Rational root to deflate; defaults to the model's exact energy, `none` to skip
    #[arg(long, allow_hyphen_values = true)]
    root: Option<String>,
    #[arg(long, default_value = "json")]
    format: String,
}

/// Exit statuses: usage and parse errors 2, no convergence 3, precision cap 4.
fn exit_code(err: &Error) -> u8 {
    match err.root_cause() {
        Error::PrecisionExhausted { .. } => 4,
        Error::NoConvergence { .. } | Error::NotConverged { .. } | Error::DegenerateFit(_) => 3,
        Error::InsufficientCoefficients { .. } => 3,
        _ => 2,
    }
}

struct Config(BTreeMap<String, String>);

const CONFIG_KEYS: &[&str] = &[
    "digits",
    "d_min",
    "d_max",
    "working_bits",
    "max_bits",
    "escalation_factor",
    "offset",
    "k",
    "fit_fraction",
];

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Config(map));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!("config line {}: unknown key `{key}`", n + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Parse(format!("config value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Error> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }
}

struct Resolved {
    policy: PrecisionPolicy,
    d_min: usize,
    d_max: usize,
}

fn resolve(budget: &Budget, config: &Config, digits: u32, d_min: usize, d_max: usize) -> Result<Resolved, Error> {
    let digits = config.pick(budget.digits, "digits", digits)?;
    let mut policy = PrecisionPolicy::for_digits(digits);
    policy.max_bits = config.pick(budget.max_bits, "max_bits", DEFAULT_MAX_BITS)?;
    policy.working_bits = config.pick(budget.working_bits, "working_bits", policy.working_bits)?;
    let factor = config.pick(budget.escalation_factor.clone(), "escalation_factor", "2".to_string())?;
    policy.escalation_factor = parse_rational(&factor)?;
    policy.validate()?;
    let d_min = config.pick(budget.d_min, "d_min", d_min)?;
    let d_max = config.pick(budget.d_max, "d_max", d_max)?;
    if d_min < 1 || d_max < d_min {
        return Err(Error::Parse(format!("dimension range {d_min}..={d_max} is empty")));
    }
    Ok(Resolved { policy, d_min, d_max })
}

fn diff_strings(sequence: &RootSequence) -> Vec<String> {
    sequence.diffs.iter().map(|d| decimal_string(d, 6)).collect()
}

fn emit_json(value: &Value) {
    let mut out = serde_json::to_string_pretty(value).expect("json values serialize");
    out.push('\n');
    print!("{out}");
}

fn cmd_solve(args: &SolveArgs, config: &Config, verbose: bool) -> Result<u8, Error> {
    let budget = resolve(&args.budget, config, 30, 2, 120)?;
    let potential = PolynomialPotential::parse(&args.coeffs)?;
    let parity: Parity = args.parity.parse()?;
    let offset = config.pick(args.offset, "offset", 0)?;
    let seed = parse_complex(&args.seed, budget.policy.working_bits)?;
    let started = Instant::now();
    let sequence = Tracker::new(offset, budget.d_min, budget.d_max).run(&potential, parity, &seed, &budget.policy)?;
    let last = sequence.last().expect("tracker returns at least one root");
    let (certified, status) = match converged_eigenvalue(&sequence, budget.policy.target_digits) {
        Ok((_, certified)) => (certified, Ok(0)),
        Err(err @ Error::NotConverged { certified, .. }) => (certified, Err(err)),
        Err(err) => return Err(err),
    };
    let (re, im) = complex_parts(&last.value, shown_digits(certified));
    emit_json(&json!({
        "value_re": re,
        "value_im": im,
        "certified_digits": certified,
        "D_final": last.index.dimension,
        "working_bits_final": last.working_bits,
        "diffs": diff_strings(&sequence),
    }));
    if verbose {
        eprintln!(
            "# solve: D {}..={}, {} roots, {:.3} s",
            sequence.entries[0].index.dimension,
            last.index.dimension,
            sequence.entries.len(),
            started.elapsed().as_secs_f64()
        );
    }
    match status {
        Ok(code) => Ok(code),
        Err(err) => {
            eprintln!("rpade: {err}");
            Ok(exit_code(&err))
        }
    }
}

fn cmd_scan_g(args: &ScanArgs, config: &Config, verbose: bool) -> Result<u8, Error> {
    let budget = resolve(&args.budget, config, 12, 10, 120)?;
    let grid = parse_grid(&args.g)?;
    let prec = budget.policy.working_bits;
    let mut settings = ScanSettings::new(config.pick(args.k, "k", 1)?, budget.policy.clone());
    settings.dimension_min = budget.d_min;
    settings.dimension_max = budget.d_max;
    settings.bound_seed = args.bound_seed.as_deref().map(|s| parse_complex(s, prec)).transpose()?;
    settings.resonance_seed = args.res_seed.as_deref().map(|s| parse_complex(s, prec)).transpose()?;
    let started = Instant::now();
    let rows = scan_three_well(&grid, &settings);
    let digits = shown_digits(budget.policy.target_digits);
    let mut out = String::from("g,E_bs,ReE_res,ImE_res_abs,scaled_width,gap\n");
    let mut failed = false;
    for (g, row) in grid.iter().zip(&rows) {
        match row {
            Ok(p) => {
                let (re, im) = complex_parts(&p.resonance, digits);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    rational_string(g),
                    decimal_string(p.bound.value.real(), digits),
                    re,
                    im.trim_start_matches('-'),
                    decimal_string(&p.scaled_width, 12),
                    decimal_string(&p.gap, 12),
                );
            }
            Err(err) => {
                failed = true;
                let _ = writeln!(out, "{},FAILED,FAILED,FAILED,FAILED,FAILED", rational_string(g));
                eprintln!("rpade: g = {}: {err}", rational_string(g));
            }
        }
    }
    print!("{out}");
    if verbose {
        eprintln!("# scan-g: {} points, {:.3} s", grid.len(), started.elapsed().as_secs_f64());
    }
    Ok(if failed { 3 } else { 0 })
}

fn synthetic_points(d_min: usize, d_max: usize) -> Vec<(usize, f64)> {
    let prec = 16 + 8 * d_max as u32;
    let value = |d: usize| Float::with_val(prec, 1) + Float::with_val(prec, Float::u_pow_u(10, 2 * d as u32)).recip();
    (d_min.max(1) + 1..=d_max)
        .map(|d| {
            let diff = Float::with_val(prec, value(d) - value(d - 1)).abs();
            (d, log10(&diff))
        })
        .collect()
}

fn slope_json(fit: &SlopeFit) -> Value {
    json!({
        "a": fit.intercept,
        "b": fit.slope,
        "fit_range": [fit.fit_range.0, fit.fit_range.1],
        "slope_error": fit.slope_error,
        "rms_residual": fit.rms_residual,
        "points": fit.points.iter().map(|(d, y)| json!([d, y])).collect::<Vec<_>>(),
    })
}

fn cmd_slope(args: &SlopeArgs, config: &Config, verbose: bool) -> Result<u8, Error> {
    let budget = resolve(&args.budget, config, 0, 10, 40)?;
    let fraction = config.pick(args.fit_fraction, "fit_fraction", 0.5)?;
    let offset = config.pick(args.offset, "offset", 0)?;
    let started = Instant::now();
    let tracker = Tracker::new(offset, budget.d_min, budget.d_max).run_to_end();
    let fit = if args.test_sequence {
        slope_from_points(&synthetic_points(budget.d_min, budget.d_max), fraction)?
    } else if let Some(g) = &args.three_well {
        let g = parse_rational(g)?;
        let mut settings = ScanSettings::new(config.pick(args.k, "k", 1)?, budget.policy.clone());
        if let Some(seed) = &args.seed {
            let seed = parse_complex(seed, budget.policy.working_bits)?;
            match args.state {
                State::Bound => settings.bound_seed = Some(seed),
                State::Resonance => settings.resonance_seed = Some(seed),
            }
        }
        let runs = three_well_sequences(&g, &settings, &tracker)?;
        match args.state {
            State::Bound => convergence_slope(&runs.bound, fraction)?,
            State::Resonance => convergence_slope(&runs.resonance, fraction)?,
        }
    } else {
        let coeffs = args
            .coeffs
            .as_deref()
            .ok_or_else(|| Error::Parse("one of --coeffs, --three-well or --test-sequence is required".into()))?;
        let potential = PolynomialPotential::parse(coeffs)?;
        let parity: Parity = args.parity.parse()?;
        let prec = budget.policy.working_bits;
        let seed = match &args.seed {
            Some(s) => parse_complex(s, prec)?,
            None => Complex::with_val(prec, (ground_state_seed(&potential, parity)?, 0)),
        };
        let sequence = tracker.run(&potential, parity, &seed, &budget.policy)?;
        convergence_slope(&sequence, fraction)?
    };
    emit_json(&slope_json(&fit));
    if verbose {
        eprintln!("# slope: {} points, {:.3} s", fit.points.len(), started.elapsed().as_secs_f64());
    }
    Ok(0)
}

fn cmd_symbolic(args: &SymbolicArgs) -> Result<u8, Error> {
    let format: ReportFormat = args.format.parse()?;
    let (name, potential, parity, dimension, root) = match (&args.model, &args.coeffs) {
        (Some(label), _) => {
            let model = qes_model(label.parse::<QesLabel>()?);
            let parity = match &args.parity {
                Some(p) => p.parse()?,
                None => model.parity,
            };
            (label.to_ascii_uppercase(), model.potential, parity, model.dimension, Some(model.exact_energy))
        }
        (None, Some(coeffs)) => {
            let potential = PolynomialPotential::parse(coeffs)?;
            let parity = args.parity.as_deref().unwrap_or("even").parse()?;
            (potential.to_list_string(), potential, parity, 2, None)
        }
        (None, None) => return Err(Error::Parse("one of --model or --coeffs is required".into())),
    };
    let root = match args.root.as_deref() {
        Some("none") => None,
        Some(r) => Some(parse_rational(r)?),
        None => root,
    };
    let index = HankelIndex::new(args.dimension.unwrap_or(dimension), args.offset)?;
    let report = symbolic_report(&name, &potential, parity, index, root.as_ref())?;
    print!("{}", report.render(format));
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let config = Config::load(cli.config.as_ref())?;
    match &cli.command {
        Command::Solve(args) => cmd_solve(args, &config, cli.verbose),
        Command::ScanG(args) => cmd_scan_g(args, &config, cli.verbose),
        Command::Slope(args) => cmd_slope(args, &config, cli.verbose),
        Command::Symbolic(args) => cmd_symbolic(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("rpade: {err}");
            exit_code(&err)
        }
    };
    let _ = std::io::stdout().flush();
    ExitCode::from(code)
}
