use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand, ValueEnum};
use magcoh::config::Gauge;
use magcoh::fock::{
    charged_fock_norm, charged_norm_closed, coherent_vector, nlcs_kowalski_vector, nlcs_residual, photon_added_residual,
    photon_added_vector, semi_coherent_vector, PartialMode, TruncatedSpace,
};
use magcoh::gdyn::{
    dynamics_trace, propagator_trace, scenario_kick, scenario_step, symplectic_defect, uniform_times, write_trace_csv,
    INVARIANT_TOL,
};
use magcoh::minpacket::{min_packet_field, parameter_lattice, summarize, write_summary_csv, MinPacketParams};
use magcoh::wavefields::{
    charged_coherent_field, fock_darwin_field, husimi_field, io, ladder_residual, malkin_manko_field, null_plane_field,
    operator_residual, partially_coherent_field, quadratic_moments, reconstruct_field, td_coherent_field, GridOperator,
    GridSpec, Ladder, WaveField, NORM_TOL,
};
use magcoh::PhysicalConfig;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::output::{Artifacts, CliError};
use crate::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    FockDarwin,
    MalkinManko,
    PartialN,
    PartialM,
    Charged,
    Husimi,
    NullPlane,
    TdCoherent,
    MinEnergy,
    SemiCoherent,
    PhotonAdded,
    Nlcs,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Grid as W:P (half-width in units of mu^-1/2, points per axis).
    #[arg(long, default_value = "8:256", value_parser = parse_grid)]
    pub grid: GridSpec,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<C64>,
    /// Second coherent pair of the semi-coherent state.
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_dot: Option<C64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nr: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<i64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Number of added quanta.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Husimi packet centre as x,y.
    #[arg(long, allow_hyphen_values = true, value_parser = parse::pair)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lc: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub li: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_c: Option<i8>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<i8>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Fock cutoff for the families built from number-state sums.
    #[arg(long, default_value_t = 32)]
    pub cutoff: usize,
    /// Also write the binary raster.
    #[arg(long)]
    pub raster: bool,
    /// Output path prefix.
    #[arg(long, default_value = "magcoh-eval")]
    pub out: PathBuf,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    s.parse().map_err(|e: magcoh::wavefields::WaveError| e.to_string())
}

fn need<T: Copy>(v: Option<T>, name: &str, family: Family) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required for {}", family.to_possible_value().expect("no skipped variants").get_name())))
}

fn fock_backed(
    config: &PhysicalConfig,
    spec: GridSpec,
    v: &magcoh::fock::FockVector,
) -> Result<WaveField, CliError> {
    let f = reconstruct_field(config, spec, v);
    if (f.raw_norm() - 1.0).abs() > NORM_TOL {
        return Err(CliError::Gate(format!(
            "reconstructed norm {} deviates from 1; widen the grid or raise --cutoff",
            f.raw_norm()
        )));
    }
    Ok(f)
}

pub fn eval(args: &EvalArgs, config: &PhysicalConfig) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let fam = args.family;
    let spec = args.grid;
    let space = || TruncatedSpace::new(args.cutoff).map_err(CliError::from);
    let mut residuals = Map::new();
    let mut extra = Map::new();
    let field = match fam {
        Family::FockDarwin => {
            let l = need(args.l, "l", fam)?;
            let f = fock_darwin_field(config, spec, need(args.nr, "nr", fam)?, l)?;
            residuals.insert("L".into(), json!(operator_residual(&f, GridOperator::L, C64::new(config.hbar() * l as f64, 0.0))));
            f
        }
        Family::MalkinManko => {
            let (alpha, beta) = (need(args.alpha, "alpha", fam)?, need(args.beta, "beta", fam)?);
            let f = malkin_manko_field(config, spec, alpha, beta)?;
            residuals.insert("a".into(), json!(ladder_residual(&f, Ladder::A, alpha)?));
            residuals.insert("b".into(), json!(ladder_residual(&f, Ladder::B, beta)?));
            f
        }
        Family::PartialN => {
            let beta = need(args.beta, "beta", fam)?;
            let f = partially_coherent_field(config, spec, PartialMode::FixN(need(args.n, "n", fam)?), beta)?;
            residuals.insert("b".into(), json!(ladder_residual(&f, Ladder::B, beta)?));
            f
        }
        Family::PartialM => {
            let alpha = need(args.alpha, "alpha", fam)?;
            let f = partially_coherent_field(config, spec, PartialMode::FixM(need(args.m, "m", fam)?), alpha)?;
            residuals.insert("a".into(), json!(ladder_residual(&f, Ladder::A, alpha)?));
            f
        }
        Family::Charged => {
            let (z, l) = (need(args.z, "z", fam)?, need(args.l, "l", fam)?);
            let f = charged_coherent_field(config, spec, z, l)?;
            residuals.insert("L".into(), json!(operator_residual(&f, GridOperator::L, C64::new(config.hbar() * l as f64, 0.0))));
            residuals.insert("ab".into(), json!(operator_residual(&f, GridOperator::AB, z)));
            extra.insert("norm_series".into(), json!(charged_fock_norm(space()?, z, l)?));
            extra.insert("norm_closed".into(), json!(charged_norm_closed(z, l)));
            f
        }
        Family::Husimi => husimi_field(
            config,
            spec,
            need(args.a, "a", fam)?,
            need(args.beta_h, "beta-h", fam)?,
            args.t.unwrap_or(0.0),
        )?,
        Family::NullPlane => null_plane_field(
            config,
            spec,
            need(args.alpha, "alpha", fam)?,
            need(args.beta, "beta", fam)?,
            need(args.momentum, "momentum", fam)?,
            args.s.unwrap_or(0.0),
        )?,
        Family::TdCoherent => td_coherent_field(
            config,
            spec,
            need(args.eps, "eps", fam)?,
            need(args.eps_dot, "eps-dot", fam)?,
            args.phi.unwrap_or(0.0),
            need(args.alpha, "alpha", fam)?,
            need(args.beta, "beta", fam)?,
        )?,
        Family::MinEnergy => {
            let p = MinPacketParams::new(
                need(args.lc, "lc", fam)?,
                need(args.li, "li", fam)?,
                args.lambda_c.unwrap_or(1),
                args.lambda.unwrap_or(1),
                args.u.unwrap_or(0.0),
                args.v.unwrap_or(0.0),
            )?;
            extra.insert("closed_form".into(), serde_json::to_value(summarize(&p, config)?).expect("serializable"));
            min_packet_field(config, spec, &p)?
        }
        Family::SemiCoherent => {
            let a = (need(args.alpha, "alpha", fam)?, need(args.beta, "beta", fam)?);
            let b = (need(args.alpha2, "alpha2", fam)?, need(args.beta2, "beta2", fam)?);
            let sp = space()?;
            let v = semi_coherent_vector(sp, a, b)?;
            let overlap = coherent_vector(sp, b.0, b.1)?.inner(&v)?;
            residuals.insert("overlap_b".into(), json!(overlap.norm()));
            fock_backed(config, spec, &v)?
        }
        Family::PhotonAdded => {
            let (alpha, q) = (need(args.alpha, "alpha", fam)?, need(args.q, "q", fam)?);
            let v = photon_added_vector(space()?, alpha, args.beta.unwrap_or_default(), q)?;
            residuals.insert("eigen".into(), json!(photon_added_residual(&v, alpha, q)));
            fock_backed(config, spec, &v)?
        }
        Family::Nlcs => {
            let zeta = need(args.zeta, "zeta", fam)?;
            let v = nlcs_kowalski_vector(space()?, zeta, args.beta.unwrap_or_default())?;
            residuals.insert("eigen".into(), json!(nlcs_residual(&v, zeta)));
            fock_backed(config, spec, &v)?
        }
    };
    let q = quadratic_moments(&field)?;
    let moments = json!({
        "family": fam,
        "norm": q.norm,
        "energy": q.energy,
        "angular_momentum": q.angular_momentum,
        "angular_momentum_over_hbar": q.angular_momentum / config.hbar(),
        "means": q.means,
        "covariance": q.covariance,
        "residuals": Value::Object(residuals),
        "extra": Value::Object(extra),
    });
    let mut out = Artifacts::new(&args.out);
    let mut csv = Vec::new();
    io::write_csv(&field, &mut csv)?;
    out.add(".csv", csv);
    if args.raster {
        let mut raster = Vec::new();
        io::write_raster(&field, &mut raster)?;
        out.add(".raster", raster);
    }
    out.add(".moments.json", serde_json::to_vec_pretty(&moments).expect("serializable"));
    out.commit("eval", args, config, started)
}

#[derive(Args, Debug, Serialize)]
pub struct DynamicsArgs {
    /// constant | step:THETA,TAU | kick:GAMMA | parametric:GAMMA | file:PATH (times in 1/omega_c).
    #[arg(long, default_value = "constant")]
    pub profile: String,
    /// Gauge of the run; defaults to the configured gauge.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Gauge>,
    /// Final time in units of 1/omega_c.
    #[arg(long, default_value_t = 10.0)]
    pub tmax: f64,
    /// Number of output intervals.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value = "magcoh-dynamics")]
    pub out: PathBuf,
}

pub fn dynamics(args: &DynamicsArgs, config: &PhysicalConfig) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let wc = config.omega_c();
    let profile = parse::profile(&args.profile, wc).map_err(CliError::Usage)?;
    let gauge = args.gauge.unwrap_or(config.gauge());
    if !(args.tmax > 0.0 && args.tmax.is_finite()) || args.samples == 0 {
        return Err(CliError::Usage("--tmax must be positive and --samples non-zero".into()));
    }
    let times = uniform_times(args.tmax / wc, args.samples);
    let rows = dynamics_trace(config, &profile, gauge, &times)?;
    let lam = propagator_trace(config, &profile, gauge, &[times[times.len() - 1]])?;
    let defect = symplectic_defect(&lam[0]);
    if defect > INVARIANT_TOL {
        return Err(CliError::Gate(format!("symplectic defect {defect:.3e} exceeds {INVARIANT_TOL:e}")));
    }
    let mut csv = Vec::new();
    write_trace_csv(&rows, &mut csv)?;
    let mut out = Artifacts::new(&args.out);
    out.add(".csv", csv);
    out.commit("dynamics", args, config, started)
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[command(subcommand)]
    pub kind: ScanKind,
    #[arg(long, global = true, default_value = "magcoh-scan")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum ScanKind {
    /// Closed-form moments of minimum-energy packets over an L_c x L_i lattice.
    MinEnergy {
        /// L_c values (list a,b,c or range start:stop:count).
        #[arg(long, default_value = "0,0.5,2")]
        lc: String,
        #[arg(long, default_value = "0,0.5,2")]
        li: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        v: f64,
        /// Keep only rows with this lambda.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<i8>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_c: Option<i8>,
    },
    /// Step pulses: field held at THETA omega_c for TAU / omega_c.
    Step {
        #[arg(long, default_value = "0.9:0.1:9")]
        theta: String,
        #[arg(long, default_value = "3")]
        tau: String,
    },
    /// Delta kicks of strength GAMMA.
    Kick {
        #[arg(long, default_value = "0.1,1,5")]
        gamma: String,
    },
}

fn write_rows(header: &str, rows: &[Vec<f64>]) -> Vec<u8> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

pub fn scan(args: &ScanArgs, config: &PhysicalConfig) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let wc = config.omega_c();
    let range = |s: &str| parse::range(s).map_err(CliError::Usage);
    let csv = match &args.kind {
        ScanKind::MinEnergy { lc, li, u, v, lambda, lambda_c } => {
            let rows = parameter_lattice(&range(lc)?, &range(li)?, *u, *v)?
                .into_iter()
                .filter(|p| lambda.map_or(true, |l| p.lambda == l) && lambda_c.map_or(true, |l| p.lambda_c == l))
                .map(|p| summarize(&p, config))
                .collect::<Result<Vec<_>, _>>()?;
            if rows.is_empty() {
                return Err(CliError::Usage("no lattice point matches the lambda filters".into()));
            }
            let mut buf = Vec::new();
            write_summary_csv(&rows, &mut buf)?;
            buf
        }
        ScanKind::Step { theta, tau } => {
            let grid: Vec<(f64, f64)> =
                range(theta)?.iter().flat_map(|&th| range(tau).into_iter().flatten().map(move |t| (th, t))).collect();
            let rows = grid
                .par_iter()
                .map(|&(th, t)| {
                    let o = scenario_step(wc, th, t / wc)?;
                    Ok(vec![th, t, o.sigma_min, o.scanned_min, o.t_min * wc])
                })
                .collect::<Result<Vec<_>, magcoh::gdyn::DynError>>()?;
            write_rows("theta,tau,sigma_min,sigma_xixi_min,t_min", &rows)
        }
        ScanKind::Kick { gamma } => {
            let rows = range(gamma)?
                .par_iter()
                .map(|&g| {
                    let o = scenario_kick(wc, g)?;
                    Ok(vec![g, o.sigma_min, o.scanned_min, o.t_min * wc])
                })
                .collect::<Result<Vec<_>, magcoh::gdyn::DynError>>()?;
            write_rows("gamma,sigma_min,sigma_xixi_min,t_min", &rows)
        }
    };
    let mut out = Artifacts::new(&args.out);
    out.add(".csv", csv);
    out.commit("scan", args, config, started)
}
