use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use polar_olct_core::bessel::{BesselOrder, ZeroTable};
use polar_olct_core::harness::{
    emit_report_with, read_params, report_summary, run_complexity_sweep,
    run_general_investigation, run_reduction_suite, ExperimentConfig,
};
use polar_olct_core::sampling::{
    evaluate_reconstruction, probe_grid, sample_with, GridMode, ReconstructionOptions,
    SampleGrid, SpectralChirp,
};
use polar_olct_core::synthesis::{
    synthesize, FourierBesselSpectrum, OrderMap, PolarField, SpectrumDomain, SynthesisMode,
};
use polar_olct_core::transforms::{
    olct_forward, olct_forward_at, olct_via_ft, KernelMode, PolarGrid, QuadratureConfig,
};
use polar_olct_core::OffsetParams;

#[derive(Parser)]
#[command(name = "polar-olct", version, about = "Polar OLCT transforms, sampling and reconstruction")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment configuration (flat `key = value` file)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory, depending on the command
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for spectra; overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first zeros of J_v and their normalized positions b·z/Ω
    Zeros {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        order: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        omega: f64,
    },
    /// Forward OLCT of a synthesized field on a uniform polar grid
    Transform {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        spectrum: PathBuf,
        /// Largest output radius
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 16)]
        radii: usize,
        #[arg(long, default_value_t = 16)]
        azimuths: usize,
        #[arg(long, value_enum, default_value_t = Method::Direct)]
        method: Method,
        /// Repeat with doubled nodes and fail on disagreement
        #[arg(long)]
        verify: bool,
    },
    /// Write a Fourier–Bessel spectrum CSV
    Synth {
        #[arg(long, default_value_t = std::f64::consts::PI)]
        omega: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        j_spec: usize,
        /// Build the coefficients from stencils over `taper + 1` zeros
        #[arg(long)]
        taper: Option<usize>,
        /// identity, doubled or fixed:<v>
        #[arg(long, default_value = "identity")]
        order_map: String,
        #[arg(long, value_enum, default_value_t = Domain::Transform)]
        domain: Domain,
    },
    /// Reconstruct a synthesized field (or its transform) from samples
    Reconstruct {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Bessel order of the fixed-order modes
        #[arg(long, default_value_t = 0.0)]
        order: f64,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        spectrum: PathBuf,
        /// Zeros per order
        #[arg(long, default_value_t = 40)]
        zeros: usize,
        /// m-sum truncation (default from the parameters)
        #[arg(long)]
        msum: Option<usize>,
        #[arg(long, value_enum, default_value_t = Kernel::Strict)]
        kernel: Kernel,
        #[arg(long, value_enum, default_value_t = Chirp::D)]
        chirp: Chirp,
        /// `auto`, `auto,<count>` or `<radius>,<count>`
        #[arg(long, default_value = "auto")]
        probes: String,
    },
    /// Sample counts and errors of both theorems over the configured K and N
    Sweep {
        #[arg(long)]
        timings: bool,
    },
    /// Reduction-regime oracle suite plus the general-parameter investigation
    Verify {
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    ViaFt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Transform,
    Field,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Theorem1,
    Theorem2,
    Corollary1,
    Corollary2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Reduced,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chirp {
    D,
    A,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(global: &Global) -> Result<ExperimentConfig> {
    let mut cfg = match &global.config {
        Some(p) => ExperimentConfig::read(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &global.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn load_params(path: Option<&Path>, global: &Global) -> Result<OffsetParams> {
    match path {
        Some(p) => read_params(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(load_config(global)?.params),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field_for(spectrum: &FourierBesselSpectrum, params: &OffsetParams) -> Result<PolarField> {
    let mode = match spectrum.order_map() {
        OrderMap::Fixed(_) => SynthesisMode::OlchtSpace,
        _ => SynthesisMode::OlctSpace,
    };
    Ok(synthesize(spectrum, params, mode)?)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let g = &cli.global;
    match cli.command {
        Command::Zeros { order, count, b, omega } => {
            let table = ZeroTable::new(BesselOrder::new(order)?, count)?;
            let mut out = String::from("j,z,alpha\n");
            for (j, z) in table.zeros().iter().enumerate() {
                writeln!(out, "{},{z:.17e},{:.17e}", j + 1, b * z / omega)?;
            }
            write_output(g.out.as_deref(), &out)?;
        }
        Command::Transform { params, spectrum, radius, radii, azimuths, method, verify } => {
            let p = load_params(params.as_deref(), g)?;
            let s = FourierBesselSpectrum::read(&spectrum)?;
            let f = field_for(&s, &p)?;
            let grid = PolarGrid::uniform(radius, radii, azimuths)?;
            let cfg = QuadratureConfig { verify, ..Default::default() };
            let spec = match method {
                Method::Direct => olct_forward(&f, &p, &grid, &cfg)?,
                Method::ViaFt => olct_via_ft(&f, &p, &grid, &cfg)?,
            };
            let mut out = String::from("rho,phi,Re(F),Im(F)\n");
            for (i, rho) in grid.radii().iter().enumerate() {
                for q in 0..grid.azimuths() {
                    let v = spec.get(i, q);
                    writeln!(out, "{rho:.12e},{:.12e},{:.12e},{:.12e}", grid.phi(q), v.re, v.im)?;
                }
            }
            write_output(g.out.as_deref(), &out)?;
        }
        Command::Synth { omega, k, j_spec, taper, order_map, domain } => {
            let seed = g.seed.unwrap_or(load_config(g)?.seed);
            let map = parse_order_map(&order_map)?;
            let s = match taper {
                Some(t) => FourierBesselSpectrum::tapered(omega, k, j_spec, t, map, seed)?,
                None => FourierBesselSpectrum::random(omega, k, j_spec, map, seed)?,
            };
            let s = s.with_domain(match domain {
                Domain::Transform => SpectrumDomain::Transform,
                Domain::Field => SpectrumDomain::Field,
            });
            write_output(g.out.as_deref(), &s.to_csv())?;
        }
        Command::Reconstruct { mode, order, params, spectrum, zeros, msum, kernel, chirp, probes } => {
            let p = load_params(params.as_deref(), g)?;
            let s = FourierBesselSpectrum::read(&spectrum)?;
            let f = field_for(&s, &p)?;
            let v = BesselOrder::new(order)?;
            let mode = match mode {
                Mode::Theorem1 => GridMode::Theorem1,
                Mode::Theorem2 => GridMode::Theorem2(v),
                Mode::Corollary1 => GridMode::Corollary1,
                Mode::Corollary2 => GridMode::Corollary2(v),
            };
            let grid = SampleGrid::new(mode, s.k(), zeros, s.omega(), &p)?;
            let (radius, count) = parse_probes(&probes, grid.reliable_radius())?;
            let pts = probe_grid(radius, count);
            let (samples, truth) = if mode.samples_spectrum() {
                let qcfg = QuadratureConfig::verified();
                let samples = {
                    let points = grid.points();
                    let values = olct_forward_at(&f, &p, &points, &qcfg)?;
                    polar_olct_core::sampling::SampleSet::new(grid.clone(), values)?
                };
                (samples, olct_forward_at(&f, &p, &pts, &qcfg)?)
            } else {
                let samples = sample_with(&grid, |r, t| f.evaluate(r, t));
                (samples, pts.iter().map(|&(r, t)| f.evaluate(r, t)).collect())
            };
            let opts = ReconstructionOptions {
                kernel: match kernel {
                    Kernel::Reduced => KernelMode::Reduced,
                    Kernel::Strict => KernelMode::Strict { m_max: None },
                },
                chirp: match chirp {
                    Chirp::D => SpectralChirp::D,
                    Chirp::A => SpectralChirp::A,
                },
                m_truncation: msum,
                ..Default::default()
            };
            let rep = evaluate_reconstruction(&samples, &opts, &pts, &truth)?;
            let mut out = String::from("r,theta,Re(true),Im(true),Re(recon),Im(recon),abs_err\n");
            for pe in &rep.probes {
                let (t, r): (C64, C64) = (pe.truth, pe.reconstructed);
                writeln!(
                    out,
                    "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}",
                    pe.r, pe.theta, t.re, t.im, r.re, r.im, pe.abs_error()
                )?;
            }
            write_output(g.out.as_deref(), &out)?;
            eprintln!(
                "{}: max relative error {:.3e}, M = {}, {} samples, sample count {}",
                mode.name(),
                rep.max_rel_error(),
                rep.m_truncation,
                rep.samples,
                rep.sample_count
            );
        }
        Command::Sweep { timings } => {
            let cfg = load_config(g)?;
            let res = run_complexity_sweep(&cfg);
            let path = cfg.out_dir.join("complexity.csv");
            emit_report_with(&res, &path, timings)?;
            eprint!("{}", report_summary(&res));
            return Ok(res.all_passed());
        }
        Command::Verify { timings } => {
            let cfg = load_config(g)?;
            let suite = run_reduction_suite(&cfg);
            emit_report_with(&suite, &cfg.out_dir.join("reduction.csv"), timings)?;
            let general = run_general_investigation(&cfg);
            emit_report_with(&general, &cfg.out_dir.join("general.csv"), timings)?;
            eprint!("{}", report_summary(&suite));
            return Ok(suite.all_passed() && general.all_passed());
        }
    }
    Ok(true)
}

fn parse_order_map(s: &str) -> Result<OrderMap> {
    Ok(match s {
        "identity" => OrderMap::Identity,
        "doubled" => OrderMap::Doubled,
        other => match other.strip_prefix("fixed:") {
            Some(v) => OrderMap::Fixed(BesselOrder::new(v.parse().context("fixed order")?)?),
            None => bail!("unknown order map `{other}`"),
        },
    })
}

fn parse_probes(s: &str, reliable: f64) -> Result<(f64, usize)> {
    let mut parts = s.split(',').map(str::trim);
    let radius = match parts.next() {
        Some("auto") | None => reliable,
        Some(r) => r.parse().with_context(|| format!("probe radius `{r}`"))?,
    };
    let count = match parts.next() {
        Some(c) => c.parse().with_context(|| format!("probe count `{c}`"))?,
        None => 20,
    };
    if count < 2 || radius.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        bail!("probes need a positive radius and at least 2 points per axis");
    }
    Ok((radius, count))
}
