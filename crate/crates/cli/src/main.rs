mod config;
mod parse;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use exprays::approximation::{
    approximate_misiurewicz_with, classify_misiurewicz_limited, ApproximationError, MisiurewiczCombinatorics,
};
use exprays::combinatorics::{
    embed, is_characteristic_pair, itinerary, portrait_classes_limited, witness_base, Alphabet, CharacteristicPair,
    CombinatoricsError, ExternalAddress,
};
use exprays::numerics::{
    find_misiurewicz_parameter, find_parabolic_root_with_traces, find_periodic_point, postsingular_period,
    trace_dynamic_ray, trace_parameter_ray, NumericsError, RayTrace, SpecialKind,
};
use exprays::render::{render, Mode, Palette, RenderError, RenderJob, Window};
use exprays::separation::{verify_fiber_separation, SeparationError, Verdict};

use config::Settings;

#[derive(Parser, Debug)]
#[command(name = "exprays", version, about = "External rays of the exponential family e^z + c")]
struct Cli {
    /// Configuration file of key=value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides one configuration key; repeatable.
    #[arg(long = "set", global = true, value_parser = parse::key_value)]
    set: Vec<(String, String)>,
    /// Newton residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Address alphabet: `exp` or `polyD`.
    #[arg(long, global = true, default_value = "exp")]
    alphabet: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operations on single addresses.
    Addr {
        #[command(subcommand)]
        op: AddrOp,
    },
    /// Orbit portraits of periodic addresses grouped by itinerary.
    Portrait {
        #[arg(long)]
        period: usize,
        /// Entries range over [-bound, bound].
        #[arg(long)]
        bound: i64,
        /// Strictly preperiodic address generating the partition.
        #[arg(long)]
        base: String,
    },
    /// Tests whether two periodic addresses form a characteristic pair.
    Characteristic {
        #[arg(long)]
        lower: String,
        #[arg(long)]
        upper: String,
    },
    /// Characteristic pairs approximating a Misiurewicz parameter's addresses.
    Approx {
        #[command(flatten)]
        target: MisiurewiczArgs,
        #[arg(long, value_parser = parse::epsilon_exponent)]
        epsilon: u32,
    },
    /// Traces a dynamic ray.
    TraceRay {
        #[arg(long)]
        address: String,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        c: Complex64,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Traces a parameter ray.
    TraceParamRay {
        #[arg(long)]
        address: String,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Landing point of a periodic dynamic ray.
    PeriodicPoint {
        #[arg(long)]
        address: String,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        c: Complex64,
    },
    /// Misiurewicz parameter at which a parameter ray lands.
    Misiurewicz {
        #[arg(long)]
        address: String,
        /// Preperiod; defaults to that of the address.
        #[arg(long)]
        k: Option<usize>,
        /// Period of the postsingular cycle; defaults to the combinatorial one.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Parabolic parameter at which a characteristic pair lands.
    Parabolic {
        #[arg(long)]
        lower: String,
        #[arg(long)]
        upper: String,
        /// Directory receiving the two parameter ray traces.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Certificate separating a parameter from a Misiurewicz parameter.
    Separate {
        #[command(flatten)]
        target: MisiurewiczArgs,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        c: Complex64,
        /// Smallest ε = 2^-N tried.
        #[arg(long, value_parser = parse::epsilon_exponent, default_value = "2^-10")]
        epsilon: u32,
        #[arg(long)]
        margin: Option<f64>,
        /// Directory receiving the certificate and its trace files.
        #[arg(long)]
        certificate_dir: Option<PathBuf>,
    },
    /// Escape-time image with ray overlays.
    Render(RenderArgs),
}

#[derive(Subcommand, Debug)]
enum AddrOp {
    /// Lexicographic order of two addresses.
    Compare {
        #[arg(long)]
        address: String,
        #[arg(long)]
        other: String,
    },
    /// Distance between two addresses.
    Dist {
        #[arg(long)]
        address: String,
        #[arg(long)]
        other: String,
    },
    /// Shifted address.
    Shift {
        #[arg(long)]
        address: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Itinerary relative to the partition of a base address.
    Itinerary {
        #[arg(long)]
        address: String,
        #[arg(long)]
        base: String,
    },
    /// The address over the polynomial alphabet of degree D.
    Embed {
        #[arg(long)]
        address: String,
        #[arg(long)]
        degree: u32,
    },
}

#[derive(Args, Debug)]
struct MisiurewiczArgs {
    /// Co-landing addresses; a single address is completed by classification.
    #[arg(long = "address", required = true)]
    addresses: Vec<String>,
    /// Entry bound of the classification; defaults to the largest |entry| + 1.
    #[arg(long)]
    entry_bound: Option<i64>,
}

#[derive(Args, Debug)]
struct RangeArgs {
    #[arg(long, default_value_t = 0.5)]
    t_lo: f64,
    #[arg(long, default_value_t = 30.0)]
    t_hi: f64,
    /// Trace file; standard output if absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RenderMode {
    Dynamical,
    Parameter,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long, value_enum)]
    mode: RenderMode,
    /// Parameter of the dynamical plane.
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    c: Option<Complex64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    center: Complex64,
    #[arg(long)]
    width: f64,
    #[arg(long, value_parser = parse::pixels, default_value = "800x600")]
    pixels: (u32, u32),
    #[arg(long)]
    max_iter: Option<u32>,
    #[arg(long)]
    escape_threshold: Option<f64>,
    #[arg(long, value_enum)]
    palette: Option<PaletteArg>,
    /// Trace file to overlay; repeatable.
    #[arg(long)]
    overlay: Vec<PathBuf>,
    /// Address whose ray is traced and overlaid; repeatable.
    #[arg(long)]
    ray: Vec<String>,
    #[arg(long, default_value_t = 1e-3)]
    ray_t_lo: f64,
    #[arg(long, default_value_t = 20.0)]
    ray_t_hi: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PaletteArg {
    Gray,
    Color,
}

/// Exit status classes.
#[derive(Debug)]
enum Failure {
    Precondition(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Precondition(_) => 2,
            Failure::Solver(_) => 3,
        }
    }
}

impl From<CombinatoricsError> for Failure {
    fn from(e: CombinatoricsError) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<NumericsError> for Failure {
    fn from(e: NumericsError) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

impl From<ApproximationError> for Failure {
    fn from(e: ApproximationError) -> Self {
        match e {
            ApproximationError::SearchExhausted { .. } => Failure::Solver(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<SeparationError> for Failure {
    fn from(e: SeparationError) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::InvalidJob(_) => Failure::Precondition(e.to_string()),
            RenderError::Io { .. } => Failure::Solver(e.to_string()),
        }
    }
}

const INCONCLUSIVE: u8 = 4;

fn alphabet(text: &str) -> Result<Alphabet, Failure> {
    if text == "exp" {
        return Ok(Alphabet::ExponentialIntegers);
    }
    let degree = text
        .strip_prefix("poly")
        .and_then(|d| d.parse::<u32>().ok())
        .ok_or_else(|| Failure::Precondition(format!("unknown alphabet {text:?}; use exp or polyD")))?;
    Ok(Alphabet::polynomial(degree)?)
}

fn c_str(z: Complex64) -> String {
    format!("{:?} {:?}", z.re, z.im)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Solver(format!("cannot write {}: {e}", path.display())))
}

fn emit_trace(trace: &RayTrace, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => write_file(path, &trace.to_text()),
        None => {
            print!("{}", trace.to_text());
            Ok(())
        }
    }
}

fn combinatorics(
    args: &MisiurewiczArgs,
    alpha: Alphabet,
    settings: &Settings,
) -> Result<MisiurewiczCombinatorics, Failure> {
    let addresses = args
        .addresses
        .iter()
        .map(|a| ExternalAddress::parse_with(a, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    if let [s] = addresses.as_slice() {
        let bound = args.entry_bound.unwrap_or(s.max_abs() + 1);
        Ok(classify_misiurewicz_limited(s, bound, settings.enumeration_limit)?)
    } else {
        Ok(MisiurewiczCombinatorics::new(addresses)?)
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut overrides = cli.set.clone();
    if let Some(tol) = cli.tol {
        overrides.push(("tol".into(), tol.to_string()));
    }
    let mut settings = Settings::load(cli.config.as_deref(), &overrides).map_err(Failure::Precondition)?;
    let alpha = alphabet(&cli.alphabet)?;
    let addr = |text: &str| ExternalAddress::parse_with(text, alpha);

    match cli.command {
        Command::Addr { op } => match op {
            AddrOp::Compare { address, other } => {
                let order = addr(&address)?.compare(&addr(&other)?)?;
                println!("order: {}", format!("{order:?}").to_lowercase());
            }
            AddrOp::Dist { address, other } => {
                let (a, b) = (addr(&address)?, addr(&other)?);
                println!("dist: {}", a.dist(&b)?);
                println!("dist_f64: {:?}", a.dist_f64(&b)?);
            }
            AddrOp::Shift { address, times } => println!("{}", addr(&address)?.shift_by(times)),
            AddrOp::Itinerary { address, base } => match itinerary(&addr(&address)?, &addr(&base)?)?.entries() {
                Some(seq) => println!("itinerary: {seq}"),
                None => println!("itinerary: undefined"),
            },
            AddrOp::Embed { address, degree } => println!("{}", embed(&addr(&address)?, degree)?),
        },
        Command::Portrait { period, bound, base } => {
            let portraits = portrait_classes_limited(period, bound, &addr(&base)?, settings.enumeration_limit)?;
            println!("portraits: {}", portraits.len());
            for p in portraits {
                println!(
                    "portrait: orbit_period={} rays_per_point={} valence={}",
                    p.orbit_period(),
                    p.rays_per_point(),
                    p.valence()
                );
                for class in p.classes() {
                    let names: Vec<String> = class.iter().map(|a| a.to_string()).collect();
                    println!("class: {}", names.join("; "));
                }
            }
        }
        Command::Characteristic { lower, upper } => {
            let (lo, hi) = (addr(&lower)?, addr(&upper)?);
            let verdict = is_characteristic_pair(&lo, &hi)?;
            println!("characteristic: {verdict}");
            if let Some(w) = witness_base(&lo, &hi) {
                println!("witness_base: {w}");
            }
            if verdict {
                let pair = CharacteristicPair::new(lo, hi)?;
                println!("period: {}", pair.period());
                println!("orbit_period: {}", pair.orbit_period());
            }
        }
        Command::Approx { target, epsilon } => {
            let m = combinatorics(&target, alpha, &settings)?;
            for s in m.addresses() {
                println!("address: {s}");
            }
            println!("q: {}", m.q());
            let result = approximate_misiurewicz_with(&m, epsilon, &settings.separation.budget)?;
            println!("epsilon: 2^-{}", result.n);
            print!("{}", result.to_text());
        }
        Command::TraceRay { address, c, range } => {
            let trace = trace_dynamic_ray(c, &addr(&address)?, range.t_lo, range.t_hi, &settings.solver.trace)?;
            emit_trace(&trace, range.output.as_deref())?;
        }
        Command::TraceParamRay { address, range } => {
            let trace = trace_parameter_ray(&addr(&address)?, range.t_lo, range.t_hi, &settings.solver.trace)?;
            emit_trace(&trace, range.output.as_deref())?;
        }
        Command::PeriodicPoint { address, c } => {
            let p = find_periodic_point(c, &addr(&address)?, &settings.solver)?;
            println!("c: {}", c_str(p.c));
            println!("z: {}", c_str(p.z));
            println!("period: {}", p.period);
            println!("orbit_period: {}", p.orbit_period);
            println!("multiplier: {}", c_str(p.multiplier));
            println!("multiplier_abs: {:?}", p.multiplier.norm());
            println!("residual: {:?}", p.residual);
        }
        Command::Misiurewicz { address, k, m } => {
            let s = addr(&address)?;
            let k = k.unwrap_or(s.preperiod_len());
            let m = match m {
                Some(m) => m,
                None => postsingular_period(&s)?,
            };
            let p = find_misiurewicz_parameter(&s, k, m, &settings.solver)?;
            println!("c: {}", c_str(p.c));
            println!("preperiod: {k}");
            println!("period: {m}");
            println!("postsingular_point: {}", c_str(p.point));
            println!("multiplier: {}", c_str(p.multiplier));
            println!("multiplier_abs: {:?}", p.multiplier.norm());
            println!("residual: {:?}", p.residual);
        }
        Command::Parabolic {
            lower,
            upper,
            trace_dir,
        } => {
            let pair = CharacteristicPair::new(addr(&lower)?, addr(&upper)?)?;
            let sol = find_parabolic_root_with_traces(&pair, &settings.solver)?;
            let root = &sol.root;
            println!("c: {}", c_str(root.c));
            if let SpecialKind::Parabolic {
                orbit_period,
                ray_period,
            } = root.kind
            {
                println!("orbit_period: {orbit_period}");
                println!("ray_period: {ray_period}");
            }
            println!("parabolic_point: {}", c_str(root.point));
            println!("multiplier: {}", c_str(root.multiplier));
            println!("multiplier_error: {:?}", (root.multiplier - 1.0).norm());
            println!("residual: {:?}", root.residual);
            if let Some(dir) = trace_dir {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| Failure::Solver(format!("cannot create {}: {e}", dir.display())))?;
                write_file(&dir.join("lower.trace"), &sol.lower_trace.to_text())?;
                write_file(&dir.join("upper.trace"), &sol.upper_trace.to_text())?;
                println!("lower_trace: {}", dir.join("lower.trace").display());
                println!("upper_trace: {}", dir.join("upper.trace").display());
            }
        }
        Command::Separate {
            target,
            c,
            epsilon,
            margin,
            certificate_dir,
        } => {
            if let Some(margin) = margin {
                settings.separation.margin = margin;
            }
            let m = combinatorics(&target, alpha, &settings)?;
            let cert = verify_fiber_separation(&m, c, epsilon, &settings.separation)?;
            let text = match (&certificate_dir, &cert.curve) {
                (Some(dir), curve) => {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| Failure::Solver(format!("cannot create {}: {e}", dir.display())))?;
                    let names = match curve {
                        Some(curve) => {
                            let (lo, hi) = (dir.join("lower.trace"), dir.join("upper.trace"));
                            write_file(&lo, &curve.lower_trace.to_text())?;
                            write_file(&hi, &curve.upper_trace.to_text())?;
                            Some((lo.display().to_string(), hi.display().to_string()))
                        }
                        None => None,
                    };
                    let text = cert.to_text(names.as_ref().map(|(a, b)| (a.as_str(), b.as_str())));
                    write_file(&dir.join("certificate.txt"), &text)?;
                    text
                }
                (None, _) => cert.to_text(None),
            };
            print!("{text}");
            if cert.verdict == Verdict::Inconclusive {
                return Ok(INCONCLUSIVE);
            }
        }
        Command::Render(args) => {
            let mode = match (args.mode, args.c) {
                (RenderMode::Dynamical, Some(c)) => Mode::Dynamical(c),
                (RenderMode::Dynamical, None) => {
                    return Err(Failure::Precondition("dynamical mode needs --c".into()));
                }
                (RenderMode::Parameter, _) => Mode::Parameter,
            };
            let window = Window::with_width(args.center, args.width, args.pixels.0, args.pixels.1)?;
            let mut job = RenderJob::new(mode, window, &args.output);
            job.max_iter = args.max_iter.unwrap_or(settings.max_iter);
            job.escape_threshold = args.escape_threshold.unwrap_or(settings.escape_threshold);
            job.palette = match args.palette {
                Some(PaletteArg::Gray) => Palette::Gray,
                Some(PaletteArg::Color) => Palette::Color,
                None => settings.palette,
            };
            for path in &args.overlay {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Precondition(format!("cannot read {}: {e}", path.display())))?;
                job.overlays.push(RayTrace::from_text(&text)?);
            }
            for ray in &args.ray {
                let s = addr(ray)?;
                let trace = match mode {
                    Mode::Dynamical(c) => {
                        trace_dynamic_ray(c, &s, args.ray_t_lo, args.ray_t_hi, &settings.solver.trace)
                    }
                    Mode::Parameter => trace_parameter_ray(&s, args.ray_t_lo, args.ray_t_hi, &settings.solver.trace),
                };
                let trace = match trace {
                    Ok(t) => t,
                    Err(e) => match e.partial_trace() {
                        Some(partial) => {
                            eprintln!("warning: ray {s} truncated: {e}");
                            partial.clone()
                        }
                        None => return Err(e.into()),
                    },
                };
                job.overlays.push(trace);
            }
            let report = render(&job)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("image: {}", job.output.display());
            println!("sidecar: {}", report.sidecar.display());
            println!("pixels: {}x{}", report.width, report.height);
            println!("escaped_pixels: {}", report.escaped_pixels);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Precondition(m) => eprintln!("error: {m}"),
                Failure::Solver(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
