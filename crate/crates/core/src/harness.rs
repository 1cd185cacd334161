//! Experiment configuration, check suites and report emission.
//!
//! Checks never abort the run: each produces a [`SweepRow`] with a status, and
//! the caller decides what a failure means.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bessel::BesselOrder;
use crate::error::{Error, Result};
use crate::params::OffsetParams;
use crate::sampling::{
    evaluate_reconstruction, probe_grid, sample_count, sample_field, GridMode,
    ReconstructionOptions, SampleGrid, SpectralChirp,
};
use crate::synthesis::{
    synthesize, FourierBesselSpectrum, OrderMap, PolarField, SpectrumDomain, SynthesisMode,
};
use crate::transforms::{
    adjudicate_series, fourier_coefficients, olcht_forward, olct_forward, olct_forward_at,
    relative_error, HankelOrder, KernelMode, OlchtOptions, PolarFunction, PolarGrid,
    QuadratureConfig, RadialQuadrature, SeriesOrder,
};

/// Reconstruction formula selected in a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModeKind {
    Theorem1,
    Theorem2,
    Corollary1,
    Corollary2,
}

impl FromStr for ModeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "theorem1" => Ok(ModeKind::Theorem1),
            "theorem2" => Ok(ModeKind::Theorem2),
            "corollary1" => Ok(ModeKind::Corollary1),
            "corollary2" => Ok(ModeKind::Corollary2),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

impl ModeKind {
    pub fn grid_mode(self, order: BesselOrder) -> GridMode {
        match self {
            ModeKind::Theorem1 => GridMode::Theorem1,
            ModeKind::Theorem2 => GridMode::Theorem2(order),
            ModeKind::Corollary1 => GridMode::Corollary1,
            ModeKind::Corollary2 => GridMode::Corollary2(order),
        }
    }
}

/// Flat `key = value` configuration; `#` starts a comment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: OffsetParams,
    pub modes: Vec<ModeKind>,
    pub k: Vec<usize>,
    pub n: Vec<usize>,
    /// m-sum truncation; `None` uses the default rule
    pub m: Option<usize>,
    /// Bessel order of theorem-2 grids
    pub order: BesselOrder,
    /// Bessel order of corollary-2 grids
    pub corollary_order: BesselOrder,
    pub omega: f64,
    pub j_spec: usize,
    pub seed: u64,
    pub probes: usize,
    pub tolerance: f64,
    pub out_dir: PathBuf,
    pub general_tau: [f64; 2],
    pub general_eta: [f64; 2],
    pub complexity_k: Vec<usize>,
    pub negative_control: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: OffsetParams::reduction(),
            modes: vec![
                ModeKind::Theorem1,
                ModeKind::Theorem2,
                ModeKind::Corollary1,
                ModeKind::Corollary2,
            ],
            k: vec![2],
            n: vec![10, 20, 40],
            m: None,
            order: BesselOrder::integer(1),
            corollary_order: BesselOrder::integer(0),
            omega: std::f64::consts::PI,
            j_spec: 3,
            seed: 42,
            probes: 20,
            tolerance: 1e-5,
            out_dir: PathBuf::from("."),
            general_tau: [0.3, 0.4],
            general_eta: [0.1, -0.2],
            complexity_k: vec![0, 1, 2, 3],
            negative_control: true,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let x = match v {
        "pi" => std::f64::consts::PI,
        _ => v
            .parse()
            .map_err(|_| Error::Parse(format!("{key}: expected a number, got `{v}`")))?,
    };
    if !x.is_finite() {
        return Err(Error::Parse(format!("{key}: non-finite value")));
    }
    Ok(x)
}

fn parse_pair(key: &str, v: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("{key}: expected two comma-separated numbers")));
    }
    Ok([parse_f64(key, parts[0])?, parse_f64(key, parts[1])?])
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: expected a non-negative integer, got `{v}`")))
}

/// `1, 2, 5`, `1..3` (inclusive) or empty.
fn parse_range(key: &str, v: &str) -> Result<Vec<usize>> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((lo, hi)) = v.split_once("..") {
        let (lo, hi) = (parse_usize(key, lo)?, parse_usize(key, hi)?);
        return Ok((lo..=hi).collect());
    }
    v.split(',').map(|s| parse_usize(key, s)).collect()
}

/// Splits flat config text into key/value pairs, rejecting duplicates.
fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 1)))?;
        let key = k.trim().to_string();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(out)
}

const PARAM_KEYS: [&str; 6] = ["a", "b", "c", "d", "tau", "eta"];

fn params_from(map: &BTreeMap<String, String>, base: OffsetParams) -> Result<OffsetParams> {
    let get = |k: &str, dflt: f64| map.get(k).map(|v| parse_f64(k, v)).unwrap_or(Ok(dflt));
    let tau = map.get("tau").map(|v| parse_pair("tau", v)).unwrap_or(Ok(base.tau()))?;
    let eta = map.get("eta").map(|v| parse_pair("eta", v)).unwrap_or(Ok(base.eta()))?;
    OffsetParams::new(
        get("a", base.a())?,
        get("b", base.b())?,
        get("c", base.c())?,
        get("d", base.d())?,
        tau,
        eta,
    )
}

/// Reads `a, b, c, d, tau, eta` from flat config text; missing keys keep the
/// reduction values.
pub fn parse_params(text: &str) -> Result<OffsetParams> {
    let map = parse_pairs(text)?;
    if let Some(k) = map.keys().find(|k| !PARAM_KEYS.contains(&k.as_str())) {
        return Err(Error::Parse(format!("unknown parameter key `{k}`")));
    }
    params_from(&map, OffsetParams::reduction())
}

pub fn read_params(path: &Path) -> Result<OffsetParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_params(&text)
}

impl ExperimentConfig {
    /// Parses config text. `params = <file>` is resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let map = parse_pairs(text)?;
        let mut cfg = Self::default();
        if let Some(file) = map.get("params") {
            cfg.params = read_params(&base_dir.join(file))?;
        }
        cfg.params = params_from(&map, cfg.params)?;
        for (key, v) in &map {
            match key.as_str() {
                "params" | "a" | "b" | "c" | "d" | "tau" | "eta" => {}
                "modes" => {
                    cfg.modes = v
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "k" => cfg.k = parse_range(key, v)?,
                "n" => cfg.n = parse_range(key, v)?,
                "m" => {
                    cfg.m = match v.as_str() {
                        "auto" | "" => None,
                        s => Some(parse_usize(key, s)?),
                    }
                }
                "order" => cfg.order = BesselOrder::new(parse_f64(key, v)?)?,
                "corollary_order" => cfg.corollary_order = BesselOrder::new(parse_f64(key, v)?)?,
                "omega" => cfg.omega = parse_f64(key, v)?,
                "j_spec" => cfg.j_spec = parse_usize(key, v)?,
                "seed" => {
                    cfg.seed = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("seed: expected an integer, got `{v}`")))?
                }
                "probes" => cfg.probes = parse_usize(key, v)?,
                "tolerance" => cfg.tolerance = parse_f64(key, v)?,
                "out_dir" => cfg.out_dir = base_dir.join(v),
                "general_tau" => cfg.general_tau = parse_pair(key, v)?,
                "general_eta" => cfg.general_eta = parse_pair(key, v)?,
                "complexity_k" => cfg.complexity_k = parse_range(key, v)?,
                "negative_control" => {
                    cfg.negative_control = match v.as_str() {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        _ => return Err(Error::Parse(format!("negative_control: bad flag `{v}`"))),
                    }
                }
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        if !(cfg.omega > 0.0) {
            return Err(Error::InvalidParams("omega must be positive".into()));
        }
        if cfg.j_spec == 0 || cfg.probes < 2 {
            return Err(Error::InvalidParams("j_spec must be >= 1 and probes >= 2".into()));
        }
        if cfg.n.contains(&0) {
            return Err(Error::InvalidParams("zero counts must be >= 1".into()));
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn reconstruction_options(&self, kernel: KernelMode) -> ReconstructionOptions {
        ReconstructionOptions {
            kernel,
            m_truncation: self.m,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// measured and reported, not asserted
    Reported,
}

impl Status {
    fn from_check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Reported => "reported",
        }
    }
}

/// One config point of a sweep or one check of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub check: String,
    pub mode: String,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub max_error: f64,
    pub mean_error: f64,
    pub sample_count: Option<u64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub note: String,
    pub runtime: Duration,
}

impl SweepRow {
    fn new(check: &str, mode: &str) -> Self {
        Self {
            check: check.into(),
            mode: mode.into(),
            k: None,
            n: None,
            m: None,
            max_error: 0.0,
            mean_error: 0.0,
            sample_count: None,
            tolerance: None,
            status: Status::Reported,
            note: String::new(),
            runtime: Duration::ZERO,
        }
    }

    fn failed(check: &str, mode: &str, err: &Error) -> Self {
        let mut row = Self::new(check, mode);
        row.max_error = f64::NAN;
        row.mean_error = f64::NAN;
        row.status = Status::Fail;
        row.note = format!("error: {err}").replace(',', ";");
        row
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn row(&self, check: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    pub fn extend(&mut self, other: SweepResult) {
        self.rows.extend(other.rows);
    }
}

// ---------------------------------------------------------------------------
// test fields

fn theorem_field(cfg: &ExperimentConfig, params: &OffsetParams, kind: ModeKind, k: usize, j_spec: usize) -> Result<PolarField> {
    let map = match kind {
        ModeKind::Theorem2 => OrderMap::Fixed(cfg.order),
        _ => OrderMap::Identity,
    };
    let spec = FourierBesselSpectrum::random(cfg.omega, k, j_spec, map, cfg.seed)?;
    synthesize(&spec, params, SynthesisMode::OlchtSpace)
}

/// Space-limited tapered field. For corollary-2 grids only orders with
/// `|n| − v` even and non-negative are kept, the orders whose transforms the
/// fixed-order series represents exactly.
fn corollary_field(cfg: &ExperimentConfig, params: &OffsetParams, kind: ModeKind, k: usize) -> Result<PolarField> {
    let mut spec = FourierBesselSpectrum::tapered(cfg.omega, k, 6, 3, OrderMap::Identity, cfg.seed)?
        .with_domain(SpectrumDomain::Field);
    if kind == ModeKind::Corollary2 {
        let v = cfg.corollary_order.value();
        for n in -(k as i32)..=(k as i32) {
            let gap = n.abs() as f64 - v;
            if gap < 0.0 || gap.rem_euclid(2.0) != 0.0 {
                for j in 1..=6 {
                    spec.set(n, j, C64::new(0.0, 0.0))?;
                }
            }
        }
    }
    synthesize(&spec, params, SynthesisMode::OlctSpace)
}

/// Tapered bandlimited field used by the transform checks.
fn transform_field(cfg: &ExperimentConfig, params: &OffsetParams, k: usize) -> Result<PolarField> {
    let spec = FourierBesselSpectrum::tapered(cfg.omega, k, 6, 3, OrderMap::Identity, cfg.seed)?;
    synthesize(&spec, params, SynthesisMode::OlctSpace)
}

fn mode_order(cfg: &ExperimentConfig, kind: ModeKind) -> BesselOrder {
    match kind {
        ModeKind::Corollary2 => cfg.corollary_order,
        _ => cfg.order,
    }
}

fn fmt_e(x: f64) -> String {
    format!("{x:.3e}")
}

// ---------------------------------------------------------------------------
// individual checks

/// Forward transform of a bandlimited field against its closed form.
pub fn check_ft_reduction(cfg: &ExperimentConfig) -> SweepRow {
    let start = Instant::now();
    let run = || -> Result<f64> {
        let f = transform_field(cfg, &cfg.params, 2)?;
        let pts: Vec<(f64, f64)> = probe_grid(1.2 * cfg.omega, 8);
        let got = olct_forward_at(&f, &cfg.params, &pts, &QuadratureConfig::verified())?;
        let want: Vec<C64> = pts.iter().map(|&(r, t)| f.transform_closed_form(r, t)).collect();
        Ok(relative_error(&got, &want))
    };
    let mut row = match run() {
        Ok(e) => {
            let mut row = SweepRow::new("ft_reduction", "olct_forward");
            row.max_error = e;
            row.mean_error = e;
            row.tolerance = Some(1e-8);
            row.status = Status::from_check(e <= 1e-8);
            row
        }
        Err(e) => SweepRow::failed("ft_reduction", "olct_forward", &e),
    };
    row.k = Some(2);
    row.runtime = start.elapsed();
    row
}

/// Per-order OLCHT against the closed-form Hankel-domain series.
pub fn check_ht_reduction(cfg: &ExperimentConfig) -> SweepRow {
    let start = Instant::now();
    let run = || -> Result<f64> {
        let f = transform_field(cfg, &cfg.params, 2)?;
        let quad = RadialQuadrature::auto(f.radial_extent(), f.chirp_rate(), f.radial_wavenumber());
        let rho: Vec<f64> = (0..16).map(|i| 1.2 * cfg.omega * (i as f64 + 0.5) / 16.0).collect();
        let mut worst = 0.0f64;
        for n in -2..=2 {
            let samples = quad.sample(|r| f.coefficient(n, r));
            let got = olcht_forward(&samples, HankelOrder::Int(n.abs()), &cfg.params, &rho, &OlchtOptions::default())?;
            let want: Vec<C64> = rho.iter().map(|&p| f.transform_coefficient(n, p)).collect();
            worst = worst.max(relative_error(&got, &want));
        }
        Ok(worst)
    };
    let mut row = match run() {
        Ok(e) => {
            let mut row = SweepRow::new("ht_reduction", "olcht_forward");
            row.max_error = e;
            row.mean_error = e;
            row.tolerance = Some(1e-8);
            row.status = Status::from_check(e <= 1e-8);
            row
        }
        Err(e) => SweepRow::failed("ht_reduction", "olcht_forward", &e),
    };
    row.k = Some(2);
    row.runtime = start.elapsed();
    row
}

/// Which series assembly (`H_n` or `H_2n` per azimuthal order) reproduces the
/// direct transform. Returns one row per assembly and a selection row.
pub fn check_series_order(cfg: &ExperimentConfig) -> Vec<SweepRow> {
    let start = Instant::now();
    let tol = 1e-6;
    let run = || -> Result<(f64, f64, Option<SeriesOrder>)> {
        let f = transform_field(cfg, &cfg.params, 2)?;
        let grid = PolarGrid::uniform(1.2 * cfg.omega, 8, 16)?;
        let reference = olct_forward(&f, &cfg.params, &grid, &QuadratureConfig::verified())?;
        let quad = RadialQuadrature::auto(f.radial_extent(), f.chirp_rate(), f.radial_wavenumber());
        let coeffs = fourier_coefficients(&f, 2).sample(&quad);
        let verdict = adjudicate_series(&coeffs, &reference, &OlchtOptions::default(), tol)?;
        Ok((verdict.order_n_error, verdict.order_2n_error, verdict.matching()))
    };
    match run() {
        Ok((en, e2n, pick)) => {
            let mut rows = Vec::new();
            for (mode, e) in [(SeriesOrder::OrderN, en), (SeriesOrder::Order2N, e2n)] {
                let mut row = SweepRow::new("series_mode", mode.name());
                row.k = Some(2);
                row.max_error = e;
                row.mean_error = e;
                row.tolerance = Some(tol);
                rows.push(row);
            }
            let mut sel = SweepRow::new("series_mode_selection", pick.map_or("none", |m| m.name()));
            sel.k = Some(2);
            sel.max_error = en.min(e2n);
            sel.mean_error = sel.max_error;
            sel.tolerance = Some(tol);
            sel.status = Status::from_check(pick.is_some());
            sel.note = match pick {
                Some(m) => format!("matching={}", m.name()),
                None => "no unique match".into(),
            };
            sel.runtime = start.elapsed();
            rows.push(sel);
            rows
        }
        Err(e) => vec![SweepRow::failed("series_mode_selection", "none", &e)],
    }
}

struct Truth {
    probes: Vec<(f64, f64)>,
    values: Vec<C64>,
}

fn truth_for(
    cfg: &ExperimentConfig,
    params: &OffsetParams,
    kind: ModeKind,
    field: &PolarField,
    radius_n: usize,
    k: usize,
) -> Result<Truth> {
    let grid = SampleGrid::new(kind.grid_mode(mode_order(cfg, kind)), k, radius_n, cfg.omega, params)?;
    let probes = probe_grid(grid.reliable_radius(), cfg.probes);
    let values = match kind {
        ModeKind::Theorem1 | ModeKind::Theorem2 => {
            probes.iter().map(|&(r, t)| field.evaluate(r, t)).collect()
        }
        ModeKind::Corollary1 | ModeKind::Corollary2 => {
            olct_forward_at(field, params, &probes, &QuadratureConfig::verified())?
        }
    };
    Ok(Truth { probes, values })
}

#[allow(clippy::too_many_arguments)]
fn reconstruction_row(
    check: &str,
    cfg: &ExperimentConfig,
    params: &OffsetParams,
    kind: ModeKind,
    field: &PolarField,
    truth: &Truth,
    k: usize,
    n: usize,
    opts: &ReconstructionOptions,
) -> SweepRow {
    let mode = kind.grid_mode(mode_order(cfg, kind));
    let start = Instant::now();
    let run = || -> Result<_> {
        let grid = SampleGrid::new(mode, k, n, cfg.omega, params)?;
        let samples = sample_field(field, &grid);
        evaluate_reconstruction(&samples, opts, &truth.probes, &truth.values)
    };
    let mut row = match run() {
        Ok(rep) => {
            let mut row = SweepRow::new(check, &mode.name());
            row.m = Some(rep.m_truncation);
            row.max_error = rep.max_rel_error();
            let peak = rep.probes.iter().map(|p| p.truth.norm()).fold(0.0, f64::max);
            row.mean_error = if peak > 0.0 { rep.mean_abs_error() / peak } else { rep.mean_abs_error() };
            row.sample_count = Some(rep.sample_count);
            row.note = format!("samples={}", rep.samples);
            row
        }
        Err(e) => SweepRow::failed(check, &mode.name(), &e),
    };
    row.k = Some(k);
    row.n = Some(n);
    row.runtime = start.elapsed();
    row
}

/// Reconstruction errors over `cfg.n` for one mode and bandwidth, plus a
/// monotonicity row when more than one zero count is swept.
pub fn check_reconstruction(cfg: &ExperimentConfig, kind: ModeKind, k: usize) -> Vec<SweepRow> {
    let params = cfg.params;
    let mut ns = cfg.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let Some(&n_min) = ns.first() else {
        return Vec::new();
    };
    let mode_name = kind.grid_mode(mode_order(cfg, kind)).name();
    let field = match kind {
        ModeKind::Theorem1 | ModeKind::Theorem2 => theorem_field(cfg, &params, kind, k, cfg.j_spec),
        _ => corollary_field(cfg, &params, kind, k),
    };
    let prepared = field.and_then(|f| {
        let t = truth_for(cfg, &params, kind, &f, n_min, k)?;
        Ok((f, t))
    });
    let (field, truth) = match prepared {
        Ok(x) => x,
        Err(e) => return vec![SweepRow::failed("reconstruction", &mode_name, &e)],
    };
    let opts = cfg.reconstruction_options(KernelMode::Strict { m_max: None });
    let mut rows: Vec<SweepRow> = ns
        .par_iter()
        .map(|&n| {
            let mut row = reconstruction_row("reconstruction", cfg, &params, kind, &field, &truth, k, n, &opts);
            if row.status != Status::Fail {
                row.tolerance = Some(cfg.tolerance);
                row.status = Status::from_check(row.max_error <= cfg.tolerance);
            }
            row
        })
        .collect();
    if ns.len() > 1 {
        let errs: Vec<f64> = rows.iter().map(|r| r.max_error).collect();
        let ok = monotone(&errs);
        let mut row = SweepRow::new("monotone_in_n", &mode_name);
        row.k = Some(k);
        row.max_error = errs.iter().copied().fold(0.0, f64::max);
        row.mean_error = errs.iter().sum::<f64>() / errs.len() as f64;
        row.status = Status::from_check(ok);
        row.note = format!("rate={}", decay_note(&ns, &errs));
        rows.push(row);
    }
    rows
}

/// Non-increasing within 10% jitter; errors below `1e-12` count as converged.
pub fn monotone(errors: &[f64]) -> bool {
    errors
        .windows(2)
        .all(|w| w[1] <= 1.1 * w[0] || w[1] <= 1e-12)
}

// log-log slope between the first and last point, or "converged"
fn decay_note(ns: &[usize], errs: &[f64]) -> String {
    let (e0, e1) = (errs[0], errs[errs.len() - 1]);
    if e1 <= 1e-12 {
        return "converged".into();
    }
    if e0 <= 0.0 {
        return "n/a".into();
    }
    let slope = (e1 / e0).ln() / (ns[ns.len() - 1] as f64 / ns[0] as f64).ln();
    format!("{slope:.2}")
}

/// Under-resolved control: a field with 8 coefficients per order sampled at 5
/// zeros must miss the tolerance.
pub fn check_negative_control(cfg: &ExperimentConfig) -> SweepRow {
    let start = Instant::now();
    let run = || -> Result<SweepRow> {
        let f = theorem_field(cfg, &cfg.params, ModeKind::Theorem1, 2, 8)?;
        let truth = truth_for(cfg, &cfg.params, ModeKind::Theorem1, &f, 5, 2)?;
        let opts = cfg.reconstruction_options(KernelMode::Strict { m_max: None });
        Ok(reconstruction_row("negative_control", cfg, &cfg.params, ModeKind::Theorem1, &f, &truth, 2, 5, &opts))
    };
    let mut row = match run() {
        Ok(mut row) => {
            if row.status != Status::Fail {
                row.tolerance = Some(cfg.tolerance);
                row.status = Status::from_check(row.max_error > cfg.tolerance);
                row.note = "expected to exceed tolerance".into();
            }
            row
        }
        Err(e) => SweepRow::failed("negative_control", "theorem1", &e),
    };
    row.runtime = start.elapsed();
    row
}

/// Identifies the self-consistent inner chirp of the fixed-order transform-domain
/// series using a matrix with `a ≠ d`, where the two variants differ.
pub fn check_chirp_variant(cfg: &ExperimentConfig) -> Vec<SweepRow> {
    let start = Instant::now();
    let params = match OffsetParams::lct(2.0, 1.0, 1.0, 1.0) {
        Ok(p) => p,
        Err(e) => return vec![SweepRow::failed("chirp_variant", "corollary2", &e)],
    };
    let kind = ModeKind::Corollary2;
    let n = cfg.n.iter().copied().max().unwrap_or(40);
    let prepared = corollary_field(cfg, &params, kind, 2).and_then(|f| {
        let t = truth_for(cfg, &params, kind, &f, n, 2)?;
        Ok((f, t))
    });
    let (field, truth) = match prepared {
        Ok(x) => x,
        Err(e) => return vec![SweepRow::failed("chirp_variant", "corollary2", &e)],
    };
    let mut rows = Vec::new();
    for (chirp, label) in [(SpectralChirp::D, "D"), (SpectralChirp::A, "A")] {
        let opts = ReconstructionOptions {
            chirp,
            m_truncation: cfg.m,
            ..Default::default()
        };
        let mut row = reconstruction_row("chirp_variant", cfg, &params, kind, &field, &truth, 2, n, &opts);
        row.note = format!("variant={label}");
        rows.push(row);
    }
    let (ed, ea) = (rows[0].max_error, rows[1].max_error);
    let pick = match (ed <= cfg.tolerance, ea <= cfg.tolerance) {
        (true, false) => Some("D"),
        (false, true) => Some("A"),
        _ => None,
    };
    let mut sel = SweepRow::new("chirp_variant_selection", pick.unwrap_or("none"));
    sel.k = Some(2);
    sel.n = Some(n);
    sel.max_error = ed.min(ea);
    sel.mean_error = sel.max_error;
    sel.tolerance = Some(cfg.tolerance);
    sel.status = Status::from_check(pick.is_some());
    sel.note = format!("D={};A={}", fmt_e(ed), fmt_e(ea));
    sel.runtime = start.elapsed();
    rows.push(sel);
    rows
}

// ---------------------------------------------------------------------------
// suites

/// All oracle checks of the reduction regime.
///
/// An empty `k` or `n` range yields an empty result.
pub fn run_reduction_suite(cfg: &ExperimentConfig) -> SweepResult {
    let mut result = SweepResult {
        seed: cfg.seed,
        rows: Vec::new(),
    };
    if cfg.k.is_empty() || cfg.n.is_empty() {
        return result;
    }
    result.rows.push(check_ft_reduction(cfg));
    result.rows.push(check_ht_reduction(cfg));
    result.rows.extend(check_series_order(cfg));
    let mut points: Vec<(ModeKind, usize)> = Vec::new();
    for &kind in &cfg.modes {
        for &k in &cfg.k {
            points.push((kind, k));
        }
    }
    let rows: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(kind, k)| check_reconstruction(cfg, kind, k))
        .collect();
    result.rows.extend(rows.into_iter().flatten());
    if cfg.modes.contains(&ModeKind::Corollary2) {
        result.rows.extend(check_chirp_variant(cfg));
    }
    if cfg.negative_control {
        result.rows.push(check_negative_control(cfg));
    }
    result
}

/// Reconstruction errors with offsets `general_tau`, `general_eta` in both
/// kernel modes. Nothing is asserted.
pub fn run_general_investigation(cfg: &ExperimentConfig) -> SweepResult {
    let mut result = SweepResult {
        seed: cfg.seed,
        rows: Vec::new(),
    };
    let (Some(&k), Some(&n)) = (cfg.k.iter().max(), cfg.n.iter().max()) else {
        return result;
    };
    let params = match cfg.params.with_offsets(cfg.general_tau, cfg.general_eta) {
        Ok(p) => p,
        Err(e) => {
            result.rows.push(SweepRow::failed("general_params", "", &e));
            return result;
        }
    };
    let kernels = [
        (KernelMode::Reduced, "reduced"),
        (KernelMode::Strict { m_max: None }, "strict"),
    ];
    for kind in [ModeKind::Theorem1, ModeKind::Theorem2] {
        let prepared = theorem_field(cfg, &params, kind, k, cfg.j_spec).and_then(|f| {
            let t = truth_for(cfg, &params, kind, &f, n, k)?;
            Ok((f, t))
        });
        let (field, truth) = match prepared {
            Ok(x) => x,
            Err(e) => {
                result.rows.push(SweepRow::failed("general_params", "", &e));
                continue;
            }
        };
        for (kernel, label) in kernels {
            let opts = cfg.reconstruction_options(kernel);
            let mut row = reconstruction_row("general_params", cfg, &params, kind, &field, &truth, k, n, &opts);
            if row.status != Status::Fail {
                row.status = Status::Reported;
            }
            row.note = format!("kernel={label};{}", row.note);
            result.rows.push(row);
        }
    }
    result
}

/// Sample counts, errors and runtimes of both theorems over `complexity_k × n`.
/// The theorem-2 row also checks that the count ratio is exactly `2K+1`.
pub fn run_complexity_sweep(cfg: &ExperimentConfig) -> SweepResult {
    let mut points = Vec::new();
    for &k in &cfg.complexity_k {
        for &n in &cfg.n {
            for kind in [ModeKind::Theorem1, ModeKind::Theorem2] {
                points.push((k, n, kind));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(k, n, kind)| {
            let prepared = theorem_field(cfg, &cfg.params, kind, k, cfg.j_spec).and_then(|f| {
                let t = truth_for(cfg, &cfg.params, kind, &f, n, k)?;
                Ok((f, t))
            });
            let mut row = match prepared {
                Ok((f, t)) => {
                    let opts = cfg.reconstruction_options(KernelMode::Strict { m_max: None });
                    reconstruction_row("complexity", cfg, &cfg.params, kind, &f, &t, k, n, &opts)
                }
                Err(e) => SweepRow::failed("complexity", "", &e),
            };
            if kind == ModeKind::Theorem2 && row.status != Status::Fail {
                let c1 = sample_count(k, n, &GridMode::Theorem1);
                let c2 = sample_count(k, n, &GridMode::Theorem2(cfg.order));
                let exact = c2 * (2 * k as u64 + 1) == c1;
                row.status = Status::from_check(exact);
                row.note = format!("{};ratio={}/{}", row.note, c1, c2);
            }
            row
        })
        .collect();
    SweepResult {
        seed: cfg.seed,
        rows,
    }
}

// ---------------------------------------------------------------------------
// reports

pub const REPORT_HEADER: &str =
    "seed,check,mode,k,n,m,max_error,mean_error,sample_count,tolerance,status,note";

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV text of a result; runtimes are appended as a column only on request,
/// so the default output is byte-identical across runs.
pub fn report_csv(result: &SweepResult, timings: bool) -> String {
    let mut out = String::from(REPORT_HEADER);
    if timings {
        out.push_str(",runtime_s");
    }
    out.push('\n');
    for r in &result.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{:.6e},{:.6e},{},{},{},{}",
            result.seed,
            r.check,
            r.mode,
            opt(r.k),
            opt(r.n),
            opt(r.m),
            r.max_error,
            r.mean_error,
            opt(r.sample_count),
            r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
            r.status.label(),
            r.note.replace(',', ";"),
        );
        if timings {
            let _ = write!(out, ",{:.3}", r.runtime.as_secs_f64());
        }
        out.push('\n');
    }
    out
}

/// Plain-text summary: counts by status and every failing row.
pub fn report_summary(result: &SweepResult) -> String {
    let count = |s: Status| result.rows.iter().filter(|r| r.status == s).count();
    let mut out = String::new();
    let _ = writeln!(out, "seed: {}", result.seed);
    let _ = writeln!(out, "rows: {}", result.rows.len());
    let _ = writeln!(
        out,
        "pass: {}  fail: {}  reported: {}",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Reported)
    );
    for r in &result.rows {
        if r.status == Status::Fail {
            let _ = writeln!(
                out,
                "FAIL {} {} k={} n={} error={:.3e} {}",
                r.check,
                r.mode,
                opt(r.k),
                opt(r.n),
                r.max_error,
                r.note
            );
        }
    }
    for r in &result.rows {
        if r.check.ends_with("_selection") {
            let _ = writeln!(out, "{}: {} ({})", r.check, r.mode, r.note);
        }
    }
    out
}

/// Writes the CSV to `path` and the summary next to it with a `.txt` extension.
pub fn emit_report(result: &SweepResult, path: &Path) -> Result<()> {
    emit_report_with(result, path, false)
}

pub fn emit_report_with(result: &SweepResult, path: &Path, timings: bool) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, report_csv(result, timings)).map_err(|e| Error::io(path, e))?;
    let summary = path.with_extension("txt");
    std::fs::write(&summary, report_summary(result)).map_err(|e| Error::io(&summary, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config() {
        let text = "# sweep\nk = 1..3\nn = 10, 20 # two counts\nmodes = theorem1, corollary2\n\
                    a = 1\nb = 2\nc = -0.25\nd = 0.5\ntau = 0.1, 0\nm = 7\nomega = pi\nseed = 9\n";
        let cfg = ExperimentConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(cfg.k, vec![1, 2, 3]);
        assert_eq!(cfg.n, vec![10, 20]);
        assert_eq!(cfg.modes, vec![ModeKind::Theorem1, ModeKind::Corollary2]);
        assert_eq!(cfg.params.b(), 2.0);
        assert_eq!(cfg.params.tau(), [0.1, 0.0]);
        assert_eq!(cfg.m, Some(7));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.omega, std::f64::consts::PI);
    }

    #[test]
    fn rejects_bad_config() {
        let base = Path::new(".");
        assert!(ExperimentConfig::parse("bogus = 1", base).is_err());
        assert!(ExperimentConfig::parse("k = 1\nk = 2", base).is_err());
        assert!(ExperimentConfig::parse("a = 1\nb = 2\nc = 0\nd = 0.5", base).is_err());
        assert!(ExperimentConfig::parse("modes = theorem3", base).is_err());
        assert!(ExperimentConfig::parse("no equals sign", base).is_err());
        assert!(parse_params("k = 1").is_err());
    }

    #[test]
    fn empty_range_gives_empty_result() {
        let cfg = ExperimentConfig::parse("n =", Path::new(".")).unwrap();
        assert!(cfg.n.is_empty());
        assert!(run_reduction_suite(&cfg).is_empty());
        assert!(run_complexity_sweep(&cfg).is_empty());
        assert!(run_general_investigation(&cfg).is_empty());
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = SweepResult { seed: 1, rows: vec![] };
        assert_eq!(report_csv(&r, false), format!("{REPORT_HEADER}\n"));
    }

    #[test]
    fn monotone_rule() {
        assert!(monotone(&[1e-3, 1e-6, 1.05e-6]));
        assert!(!monotone(&[1e-3, 1e-6, 2e-6]));
        assert!(monotone(&[1e-3, 1e-15, 3e-15]));
    }

    #[test]
    fn complexity_counts_and_ratio() {
        let cfg = ExperimentConfig {
            complexity_k: vec![0, 2],
            n: vec![10],
            ..Default::default()
        };
        let res = run_complexity_sweep(&cfg);
        assert_eq!(res.rows.len(), 4);
        let t1 = &res.rows[2];
        let t2 = &res.rows[3];
        assert_eq!(t1.sample_count, Some(2500));
        assert_eq!(t2.sample_count, Some(500));
        assert_eq!(t2.status, Status::Pass);
        assert!(t2.note.ends_with("ratio=2500/500"));
        assert!(res.rows.iter().all(|r| r.max_error < 1e-9));
    }
}
