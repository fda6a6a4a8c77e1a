use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lienard::analytic::{self, EigenState, Sector};
use lienard::classical::{self, OrbitParams, Trajectory};
use lienard::io::{self, SpectrumDocument, SpectrumMethod};
use lienard::numeric::{self, ResidualConfig, ShootingConfig};
use lienard::verify::{self, Suite};
use lienard::{semiclassical, Execution, PhysParams};

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "lienard", version, allow_negative_numbers = true, about = "Classical, semiclassical and quantum experiments on the PT-symmetric Lienard oscillator")]
struct Cli {
    #[arg(long, global = true, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    k: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,
    /// Output directory.
    #[arg(long, global = true, env = "LIENARD_OUT_DIR", default_value = "lienard-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate an orbit with RK4 and write trajectory.csv.
    Simulate(SimulateArgs),
    /// Write one phase contour CSV per energy.
    Portrait(PortraitArgs),
    /// Write the quantized amplitudes and levels of the regular orbits.
    Semiclassical,
    /// Write the spectrum from the closed form, the shooting solver or the action quantization.
    Spectrum(SpectrumArgs),
    /// Sample an eigenfunction and write its residual report.
    Wavefunction(WavefunctionArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long = "A", default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 10.0)]
    periods: f64,
    /// Time step; defaults to 1/1000 of a period.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args, Debug)]
struct PortraitArgs {
    /// Comma-separated energies.
    #[arg(long, default_value = "0.5,1,2,3,4.5")]
    energies: String,
    #[arg(long, default_value_t = 400)]
    points: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Analytic,
    Shooting,
    Semiclassical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SectorArg {
    Bound,
    Broken,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::Bound => Sector::Bound,
            SectorArg::Broken => Sector::Broken,
        }
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = Method::Analytic)]
    method: Method,
    #[arg(long, value_enum, default_value_t = SectorArg::Bound)]
    sector: SectorArg,
}

#[derive(Args, Debug)]
struct WavefunctionArgs {
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, value_enum, default_value_t = SectorArg::Bound)]
    sector: SectorArg,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    points: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Classical,
    Semiclassical,
    Quantum,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Run checks on the rayon pool.
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(lienard::Error),
    Io(anyhow::Error),
    Verify(usize),
}

impl From<lienard::Error> for Failure {
    fn from(e: lienard::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::FormatError> for Failure {
    fn from(e: io::FormatError) -> Self {
        Failure::Io(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Verify(n)) => {
            eprintln!("verification failed: {n} check(s)");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let params = PhysParams::new(cli.omega, cli.k, cli.hbar).map_err(|e| Failure::Usage(e.to_string()))?;
    let out = Output { dir: &cli.out_dir, params: &params, command: &cli.command };
    match &cli.command {
        Command::Simulate(a) => simulate(&out, a),
        Command::Portrait(a) => portrait(&out, a),
        Command::Semiclassical => {
            let levels = semiclassical::semiclassical_spectrum(&params)?;
            let doc = SpectrumDocument::semiclassical(&levels, &params);
            out.write("semiclassical.json", io::to_json(&doc)?, json!({}))
        }
        Command::Spectrum(a) => spectrum(&out, a),
        Command::Wavefunction(a) => wavefunction(&out, a),
        Command::Verify(a) => run_verify(&out, a),
    }
}

struct Output<'a> {
    dir: &'a Path,
    params: &'a PhysParams,
    command: &'a Command,
}

impl Output<'_> {
    /// Writes a data file and its `.meta.json` sidecar. Only the sidecar
    /// carries run-dependent information.
    fn write(&self, name: &str, contents: String, extra: serde_json::Value) -> Outcome {
        let path = self.dir.join(name);
        io::write_atomic(&path, contents.as_bytes())?;
        let generated = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = json!({
            "file": name,
            "version": env!("CARGO_PKG_VERSION"),
            "command": format!("{:?}", self.command),
            "omega": self.params.omega(),
            "k": self.params.k(),
            "hbar": self.params.hbar(),
            "generated_unix": generated,
            "details": extra,
        });
        io::write_atomic(&self.dir.join(format!("{name}.meta.json")), io::to_json(&meta)?.as_bytes())?;
        println!("{}", path.display());
        Ok(())
    }
}

fn simulate(out: &Output, a: &SimulateArgs) -> Outcome {
    let p = out.params;
    let orbit = OrbitParams::new(a.amplitude, a.delta).map_err(|e| Failure::Usage(e.to_string()))?;
    if !(a.periods > 0.0 && a.periods.is_finite()) {
        return Err(Failure::Usage(format!("--periods must be positive, got {}", a.periods)));
    }
    let traj = if a.amplitude == 0.0 {
        Trajectory::rest(p)?
    } else {
        let dt = a.dt.unwrap_or_else(|| classical::default_dt(p));
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Failure::Usage(format!("--dt must be positive, got {dt}")));
        }
        if !orbit.is_regular(p) {
            return Err(Failure::Domain(lienard::Error::Irregular { amplitude: a.amplitude, bound: p.regular_amplitude_bound() }));
        }
        let t_end = a.periods * 2.0 * std::f64::consts::PI / p.omega();
        classical::integrate_orbit(orbit.initial_state(p)?, t_end, dt, p)?
    };
    let meta = serde_json::to_value(&traj.meta).map_err(|e| Failure::Io(e.into()))?;
    out.write("trajectory.csv", io::trajectory_csv(&traj), meta)
}

fn parse_energies(text: &str) -> Result<Vec<f64>, Failure> {
    let energies = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Failure::Usage(format!("bad energy {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if energies.is_empty() {
        return Err(Failure::Usage("--energies needs at least one value".into()));
    }
    if let Some(e) = energies.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Failure::Usage(format!("energies must be positive, got {e}")));
    }
    Ok(energies)
}

fn portrait(out: &Output, a: &PortraitArgs) -> Outcome {
    let energies = parse_energies(&a.energies)?;
    if a.points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    for e in energies {
        let c = classical::phase_contour(e, a.points, out.params)?;
        let meta = json!({ "E": e, "p_range": c.p_range, "open": c.open });
        out.write(&format!("contour_E{e}.csv"), io::contour_csv(&c), meta)?;
    }
    Ok(())
}

fn spectrum(out: &Output, a: &SpectrumArgs) -> Outcome {
    let p = out.params;
    let sector = Sector::from(a.sector);
    let doc = match a.method {
        Method::Analytic => {
            let energies: Vec<f64> = (0..=a.n_max)
                .map(|n| match sector {
                    Sector::Bound => analytic::bound_energy(n, p),
                    Sector::Broken => analytic::broken_energy(n, p),
                })
                .collect();
            SpectrumDocument::from_energies(SpectrumMethod::Analytic, sector, &energies, p)
        }
        Method::Shooting => {
            if sector == Sector::Broken {
                return Err(Failure::Usage("the shooting solver covers the bound sector only".into()));
            }
            let energies = numeric::numeric_spectrum(a.n_max, &ShootingConfig::default(), p, Execution::default())?;
            SpectrumDocument::from_energies(SpectrumMethod::Shooting, sector, &energies, p)
        }
        Method::Semiclassical => {
            if sector == Sector::Broken {
                return Err(Failure::Usage("semiclassical levels exist for the bound sector only".into()));
            }
            let levels: Vec<_> = semiclassical::semiclassical_spectrum(p)?.into_iter().filter(|l| l.n <= a.n_max).collect();
            SpectrumDocument::semiclassical(&levels, p)
        }
    };
    let name = format!("spectrum_{}_{}.json", method_name(a.method), sector.as_str());
    out.write(&name, io::to_json(&doc)?, json!({ "n_max": a.n_max }))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Analytic => "analytic",
        Method::Shooting => "shooting",
        Method::Semiclassical => "semiclassical",
    }
}

fn wavefunction(out: &Output, a: &WavefunctionArgs) -> Outcome {
    let p = out.params;
    let sector = Sector::from(a.sector);
    if a.points < 3 {
        return Err(Failure::Usage("--points must be at least 3".into()));
    }
    let cfg = ResidualConfig::default();
    let default = numeric::default_grid(a.n, sector, 3, p, &cfg)?;
    let lo = a.p_min.unwrap_or(default[0]);
    let hi = a.p_max.unwrap_or(default[default.len() - 1]);
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Failure::Usage(format!("need p-min < p-max, got [{lo}, {hi}]")));
    }
    let m = a.points - 1;
    let grid: Vec<f64> = (0..=m).map(|i| if i == m { hi } else { lo + (hi - lo) * i as f64 / m as f64 }).collect();
    let state = EigenState::new(a.n, sector, p)?;
    let values: Vec<_> = grid.iter().map(|&q| state.amplitude(q)).collect();
    let report = numeric::residual_norm(&state, &grid, p)?;
    let stem = format!("wavefunction_{}_n{}", sector.as_str(), a.n);
    let meta = json!({ "n": a.n, "sector": sector.as_str(), "E": state.energy });
    out.write(&format!("{stem}.csv"), io::wavefunction_csv(&grid, &values), meta)?;
    out.write(&format!("{stem}.residual.json"), io::to_json(&report)?, json!({}))
}

fn run_verify(out: &Output, a: &VerifyArgs) -> Outcome {
    let suite = match a.suite {
        SuiteArg::Classical => Suite::Classical,
        SuiteArg::Semiclassical => Suite::Semiclassical,
        SuiteArg::Quantum => Suite::Quantum,
        SuiteArg::All => Suite::All,
    };
    let exec = if a.parallel { Execution::Parallel } else { Execution::Sequential };
    let report = verify::run_suite(suite, exec);
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {}: {:.3e} (tol {:.1e}) {}", c.suite, c.name, c.value, c.tolerance, c.detail);
    }
    out.write(&format!("verify_{suite}.json"), io::to_json(&report)?, json!({ "parallel": a.parallel }))?;
    match report.failures().count() {
        0 => Ok(()),
        n => Err(Failure::Verify(n)),
    }
}
