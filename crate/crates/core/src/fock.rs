//! Truncated two-mode number basis `|n, m>` with `0 <= n, m <= N`.
//!
//! Mode `a` carries the relative (cyclotron) motion and mode `b` the guiding
//! centre. Every constructor measures how much weight sits on the cutoff shell
//! and refuses states whose truncation is visible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PhysicalConfig;
use crate::sparse::SparseMatrix;
use crate::special::{bessel_i, ln_factorial};

pub const DEFAULT_CUTOFF: usize = 64;
pub const TAIL_LIMIT: f64 = 1e-10;
pub const SEMI_COHERENT_LIMIT: f64 = 1.0 - 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("cutoff must be at least 1")]
    ZeroCutoff,
    #[error("truncation visible: {tail:.3e} of the norm sits on the cutoff shell (limit {TAIL_LIMIT:e})")]
    TailOverflow { tail: f64 },
    #[error("index {index} outside the truncated space (cutoff {cutoff})")]
    IndexOutOfRange { index: i64, cutoff: usize },
    #[error("projection is degenerate: |<B|A>| = {overlap}")]
    DegenerateProjection { overlap: f64 },
    #[error("variance requested for non-Hermitian operator `{label}`")]
    NonHermitianVariance { label: String },
    #[error("vectors or operators live in different truncated spaces")]
    SpaceMismatch,
    #[error("weights must be non-negative and sum to one")]
    BadWeights,
    #[error("malformed amplitude records: {0}")]
    Records(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncatedSpace {
    cutoff: usize,
}

impl Default for TruncatedSpace {
    fn default() -> Self {
        Self { cutoff: DEFAULT_CUTOFF }
    }
}

impl TruncatedSpace {
    pub fn new(cutoff: usize) -> Result<Self, FockError> {
        if cutoff == 0 {
            return Err(FockError::ZeroCutoff);
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    pub fn index(&self, n: usize, m: usize) -> usize {
        debug_assert!(n <= self.cutoff && m <= self.cutoff);
        n * (self.cutoff + 1) + m
    }

    pub fn quantum_numbers(&self, idx: usize) -> (usize, usize) {
        (idx / (self.cutoff + 1), idx % (self.cutoff + 1))
    }

    /// True when neither quantum number touches the cutoff.
    pub fn is_interior(&self, idx: usize) -> bool {
        let (n, m) = self.quantum_numbers(idx);
        n < self.cutoff && m < self.cutoff
    }

    fn check(&self, k: i64) -> Result<usize, FockError> {
        if k < 0 || k as usize > self.cutoff {
            Err(FockError::IndexOutOfRange { index: k, cutoff: self.cutoff })
        } else {
            Ok(k as usize)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: String,
    pub space: TruncatedSpace,
    pub matrix: SparseMatrix,
}

impl OperatorMatrix {
    fn new(label: impl Into<String>, space: TruncatedSpace, matrix: SparseMatrix) -> Self {
        Self { label: label.into(), space, matrix }
    }

    pub fn adjoint(&self) -> Self {
        Self::new(format!("{}†", self.label), self.space, self.matrix.adjoint())
    }

    pub fn then(&self, first: &Self) -> Self {
        Self::new(format!("{}{}", self.label, first.label), self.space, self.matrix.matmul(&first.matrix))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(format!("({}+{})", self.label, other.label), self.space, self.matrix.add(&other.matrix))
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::new(format!("({}-{})", self.label, other.label), self.space, self.matrix.sub(&other.matrix))
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(format!("{s}·{}", self.label), self.space, self.matrix.scale(s))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::new(format!("[{},{}]", self.label, other.label), self.space, self.matrix.commutator(&other.matrix))
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix.is_hermitian(HERMITIAN_TOL)
    }

    pub fn apply(&self, v: &FockVector) -> Vec<C64> {
        self.matrix.apply(&v.amps)
    }

    /// Largest entry of `self - other` on the interior block `n, m < N`.
    pub fn interior_distance(&self, other: &Self) -> f64 {
        let sp = self.space;
        self.matrix.sub(&other.matrix).max_abs_on(|i| sp.is_interior(i))
    }
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: OperatorMatrix,
    pub b: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub b_dag: OperatorMatrix,
    pub h: OperatorMatrix,
    pub l: OperatorMatrix,
}

fn lowering(space: TruncatedSpace, on_a: bool) -> SparseMatrix {
    let n_max = space.cutoff();
    let mut trip = Vec::new();
    for n in 0..=n_max {
        for m in 0..=n_max {
            let src = space.index(n, m);
            if on_a && n > 0 {
                trip.push((space.index(n - 1, m), src, C64::new((n as f64).sqrt(), 0.0)));
            } else if !on_a && m > 0 {
                trip.push((space.index(n, m - 1), src, C64::new((m as f64).sqrt(), 0.0)));
            }
        }
    }
    SparseMatrix::from_triplets(space.dim(), trip)
}

fn number_diag(space: TruncatedSpace, f: impl Fn(usize, usize) -> f64) -> SparseMatrix {
    let d: Vec<C64> = (0..space.dim())
        .map(|i| {
            let (n, m) = space.quantum_numbers(i);
            C64::new(f(n, m), 0.0)
        })
        .collect();
    SparseMatrix::diagonal(&d)
}

/// `a`, `b`, their adjoints, `H = hbar*omega_c*(a†a + 1/2)` and `L = hbar*(b†b - a†a)`.
pub fn ladder_matrices(space: TruncatedSpace, config: &PhysicalConfig) -> Ladder {
    let a = OperatorMatrix::new("a", space, lowering(space, true));
    let b = OperatorMatrix::new("b", space, lowering(space, false));
    let mut a_dag = a.adjoint();
    a_dag.label = "a†".into();
    let mut b_dag = b.adjoint();
    b_dag.label = "b†".into();
    let hw = config.hbar() * config.omega_c();
    let hbar = config.hbar();
    let h = OperatorMatrix::new("H", space, number_diag(space, |n, _| hw * (n as f64 + 0.5)));
    let l = OperatorMatrix::new("L", space, number_diag(space, |n, m| hbar * (m as f64 - n as f64)));
    Ladder { a, b, a_dag, b_dag, h, l }
}

/// Geometric coordinates `(X, Y, xi, eta)` as operators.
pub fn geometric_operators(space: TruncatedSpace, config: &PhysicalConfig) -> [OperatorMatrix; 4] {
    let lad = ladder_matrices(space, config);
    let ell = config.coherent_variance().sqrt();
    let re = C64::new(ell, 0.0);
    let im = C64::new(0.0, ell);
    let mut x = lad.b.plus(&lad.b_dag).scaled(re);
    let mut y = lad.b.minus(&lad.b_dag).scaled(im);
    let mut xi = lad.a.minus(&lad.a_dag).scaled(im);
    let mut eta = lad.a.plus(&lad.a_dag).scaled(re);
    x.label = "X".into();
    y.label = "Y".into();
    xi.label = "ξ".into();
    eta.label = "η".into();
    [x, y, xi, eta]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuKind {
    Su2,
    Su11,
}

#[derive(Debug, Clone)]
pub struct SuGenerators {
    pub k_plus: OperatorMatrix,
    pub k_minus: OperatorMatrix,
    pub k_zero: OperatorMatrix,
}

pub fn su_generators(space: TruncatedSpace, kind: SuKind) -> SuGenerators {
    let lad = ladder_matrices(space, &PhysicalConfig::default());
    let half = C64::new(0.5, 0.0);
    let (mut kp, mut km, mut k0) = match kind {
        SuKind::Su2 => (
            lad.b_dag.then(&lad.a),
            lad.a_dag.then(&lad.b),
            lad.b_dag.then(&lad.b).minus(&lad.a_dag.then(&lad.a)).scaled(half),
        ),
        SuKind::Su11 => (
            lad.b_dag.then(&lad.a_dag),
            lad.a.then(&lad.b),
            lad.a_dag.then(&lad.a).plus(&lad.b.then(&lad.b_dag)).scaled(half),
        ),
    };
    kp.label = "K+".into();
    km.label = "K-".into();
    k0.label = "K0".into();
    SuGenerators { k_plus: kp, k_minus: km, k_zero: k0 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    space: TruncatedSpace,
    amps: Vec<C64>,
    tail_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shell {
    Both,
    OnlyN,
    OnlyM,
}

fn shell_weight(space: TruncatedSpace, amps: &[C64], shell: Shell) -> f64 {
    let n_max = space.cutoff();
    amps.iter()
        .enumerate()
        .filter(|(i, _)| {
            let (n, m) = space.quantum_numbers(*i);
            match shell {
                Shell::Both => n == n_max || m == n_max,
                Shell::OnlyN => n == n_max,
                Shell::OnlyM => m == n_max,
            }
        })
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

impl FockVector {
    fn finish(space: TruncatedSpace, mut amps: Vec<C64>, shell: Shell) -> Result<Self, FockError> {
        let total: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let tail = shell_weight(space, &amps, shell) / total;
        if !(tail <= TAIL_LIMIT) {
            return Err(FockError::TailOverflow { tail });
        }
        let s = total.sqrt().recip();
        amps.iter_mut().for_each(|c| *c *= s);
        Ok(Self { space, amps, tail_norm: tail })
    }

    /// Basis state `|n, m>`.
    pub fn basis(space: TruncatedSpace, n: usize, m: usize) -> Result<Self, FockError> {
        let n = space.check(n as i64)?;
        let m = space.check(m as i64)?;
        let mut amps = vec![ZERO; space.dim()];
        amps[space.index(n, m)] = ONE;
        Ok(Self { space, amps, tail_norm: if n == space.cutoff() || m == space.cutoff() { 1.0 } else { 0.0 } })
    }

    /// Wraps raw amplitudes without normalizing; the tail is measured but not enforced.
    pub fn from_amplitudes(space: TruncatedSpace, amps: Vec<C64>) -> Result<Self, FockError> {
        if amps.len() != space.dim() {
            return Err(FockError::SpaceMismatch);
        }
        let total: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let tail = if total > 0.0 { shell_weight(space, &amps, Shell::Both) / total } else { 0.0 };
        Ok(Self { space, amps, tail_norm: tail })
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, n: usize, m: usize) -> C64 {
        self.amps[self.space.index(n, m)]
    }

    pub fn tail_norm(&self) -> f64 {
        self.tail_norm
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64, FockError> {
        if self.space != other.space {
            return Err(FockError::SpaceMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn to_records(&self) -> Vec<AmplitudeRecord> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(i, c)| {
                let (n, m) = self.space.quantum_numbers(i);
                AmplitudeRecord { n, m, re: c.re, im: c.im }
            })
            .collect()
    }

    pub fn from_records(space: TruncatedSpace, records: &[AmplitudeRecord]) -> Result<Self, FockError> {
        let mut amps = vec![ZERO; space.dim()];
        for r in records {
            if r.n > space.cutoff() || r.m > space.cutoff() {
                return Err(FockError::Records(format!("record ({}, {}) beyond cutoff {}", r.n, r.m, space.cutoff())));
            }
            amps[space.index(r.n, r.m)] += C64::new(r.re, r.im);
        }
        Self::from_amplitudes(space, amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records always serialize")
    }

    pub fn from_json(space: TruncatedSpace, s: &str) -> Result<Self, FockError> {
        let recs: Vec<AmplitudeRecord> = serde_json::from_str(s).map_err(|e| FockError::Records(e.to_string()))?;
        Self::from_records(space, &recs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRecord {
    pub n: usize,
    pub m: usize,
    pub re: f64,
    pub im: f64,
}

/// `z^n / sqrt(n!)` as `(ln|.|, arg)`; `None` when it vanishes.
fn ln_power_over_sqrt_fact(z: C64, n: usize) -> Option<(f64, f64)> {
    if n == 0 {
        return Some((0.0, 0.0));
    }
    if z == ZERO {
        return None;
    }
    let nf = n as f64;
    Some((nf * z.norm().ln() - 0.5 * ln_factorial(n), nf * z.arg()))
}

fn from_polar_log(ln_mag: f64, phase: f64) -> C64 {
    C64::from_polar(ln_mag.exp(), phase)
}

fn unnormalized_coherent(space: TruncatedSpace, alpha: C64, beta: C64) -> Vec<C64> {
    let n_max = space.cutoff();
    let pa: Vec<_> = (0..=n_max).map(|n| ln_power_over_sqrt_fact(alpha, n)).collect();
    let pb: Vec<_> = (0..=n_max).map(|m| ln_power_over_sqrt_fact(beta, m)).collect();
    let shift = -0.5 * (alpha.norm_sqr() + beta.norm_sqr());
    let mut amps = vec![ZERO; space.dim()];
    for (n, a) in pa.iter().enumerate() {
        for (m, b) in pb.iter().enumerate() {
            if let (Some(a), Some(b)) = (a, b) {
                amps[space.index(n, m)] = from_polar_log(a.0 + b.0 + shift, a.1 + b.1);
            }
        }
    }
    amps
}

/// Joint eigenstate `|alpha, beta>` of `a` and `b`.
pub fn coherent_vector(space: TruncatedSpace, alpha: C64, beta: C64) -> Result<FockVector, FockError> {
    FockVector::finish(space, unnormalized_coherent(space, alpha, beta), Shell::Both)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartialMode {
    /// Fixed `n`, Poissonian in `m`; the amplitude is `beta`.
    FixN(usize),
    /// Fixed `m`, Poissonian in `n`; the amplitude is `alpha`.
    FixM(usize),
}

pub fn partial_coherent_vector(space: TruncatedSpace, mode: PartialMode, amplitude: C64) -> Result<FockVector, FockError> {
    let n_max = space.cutoff();
    let shift = -0.5 * amplitude.norm_sqr();
    let mut amps = vec![ZERO; space.dim()];
    let shell = match mode {
        PartialMode::FixN(n) => {
            let n = space.check(n as i64)?;
            for m in 0..=n_max {
                if let Some((lm, ph)) = ln_power_over_sqrt_fact(amplitude, m) {
                    amps[space.index(n, m)] = from_polar_log(lm + shift, ph);
                }
            }
            Shell::OnlyM
        }
        PartialMode::FixM(m) => {
            let m = space.check(m as i64)?;
            for n in 0..=n_max {
                if let Some((lm, ph)) = ln_power_over_sqrt_fact(amplitude, n) {
                    amps[space.index(n, m)] = from_polar_log(lm + shift, ph);
                }
            }
            Shell::OnlyN
        }
    };
    FockVector::finish(space, amps, shell)
}

fn charged_unnormalized(space: TruncatedSpace, z: C64, l: i64) -> Result<Vec<C64>, FockError> {
    let n_max = space.cutoff() as i64;
    if l.abs() > n_max {
        return Err(FockError::IndexOutOfRange { index: l, cutoff: space.cutoff() });
    }
    let mut amps = vec![ZERO; space.dim()];
    for m in l.max(0)..=n_max.min(n_max + l) {
        let n = (m - l) as usize;
        let m = m as usize;
        if m == 0 && n == 0 {
            amps[space.index(0, 0)] = ONE;
            continue;
        }
        if m > 0 && z == ZERO {
            continue;
        }
        let lnmag = if m == 0 { 0.0 } else { m as f64 * z.norm().ln() } - 0.5 * (ln_factorial(n) + ln_factorial(m));
        amps[space.index(n, m)] = from_polar_log(lnmag, m as f64 * z.arg());
    }
    Ok(amps)
}

/// Squared norm `sum |z|^{2m} / ((m-l)! m!)` of the unnormalized charged state,
/// summed over the truncated space.
pub fn charged_fock_norm(space: TruncatedSpace, z: C64, l: i64) -> Result<f64, FockError> {
    Ok(charged_unnormalized(space, z, l)?.iter().map(|c| c.norm_sqr()).sum())
}

/// The same squared norm in closed form, `|z|^l I_|l|(2|z|)`.
pub fn charged_norm_closed(z: C64, l: i64) -> f64 {
    let r = z.norm();
    r.powi(l as i32) * bessel_i(l.unsigned_abs() as u32, 2.0 * r)
}

/// Eigenstate of `L` (eigenvalue `hbar*l`) and of `ab` (eigenvalue `z`).
pub fn charged_coherent_vector(space: TruncatedSpace, z: C64, l: i64) -> Result<FockVector, FockError> {
    if z == ZERO {
        return FockVector::basis(space, (-l).max(0) as usize, l.max(0) as usize);
    }
    FockVector::finish(space, charged_unnormalized(space, z, l)?, Shell::Both)
}

/// Charged state assembled from coherent states on the circle
/// `(sqrt(z) e^{-i phi}, sqrt(z) e^{i phi})` with the trapezoid rule on `nodes` points.
/// The prefactor `z^{l/2}` is taken as `(sqrt z)^l` with the principal root.
pub fn charged_coherent_from_circle(space: TruncatedSpace, z: C64, l: i64, nodes: usize) -> Result<FockVector, FockError> {
    let norm_sq = charged_fock_norm(space, z, l)?;
    let nrm = norm_sq.sqrt().recip();
    let root = z.sqrt();
    let pref = root.powi(l as i32) * (z.norm().exp() * nrm / nodes as f64);
    let mut acc = vec![ZERO; space.dim()];
    for j in 0..nodes {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
        let e = C64::from_polar(1.0, phi);
        let state = unnormalized_coherent(space, root * e.conj(), root * e);
        let w = C64::from_polar(1.0, -(l as f64) * phi) * pref;
        acc.iter_mut().zip(&state).for_each(|(a, s)| *a += w * s);
    }
    FockVector::from_amplitudes(space, acc)
}

/// `(|A> - |B><B|A>) / sqrt(1 - |<B|A>|^2)` for coherent `A = (alpha, beta)`, `B = (alpha', beta')`.
pub fn semi_coherent_vector(space: TruncatedSpace, a: (C64, C64), b: (C64, C64)) -> Result<FockVector, FockError> {
    let va = coherent_vector(space, a.0, a.1)?;
    let vb = coherent_vector(space, b.0, b.1)?;
    let ov = vb.inner(&va)?;
    if ov.norm() >= SEMI_COHERENT_LIMIT {
        return Err(FockError::DegenerateProjection { overlap: ov.norm() });
    }
    let s = (1.0 - ov.norm_sqr()).sqrt().recip();
    let amps: Vec<C64> = va.amps.iter().zip(&vb.amps).map(|(x, y)| (x - y * ov) * s).collect();
    let mut v = FockVector::finish(space, amps, Shell::Both)?;
    v.tail_norm = v.tail_norm.max(va.tail_norm).max(vb.tail_norm);
    Ok(v)
}

fn photon_added_unnormalized(space: TruncatedSpace, alpha: C64, beta: C64, q: usize) -> Vec<C64> {
    let n_max = space.cutoff();
    let base = unnormalized_coherent(space, alpha, beta);
    let mut amps = vec![ZERO; space.dim()];
    for n in 0..=n_max.saturating_sub(q) {
        if n + q > n_max {
            break;
        }
        let gain = (0.5 * (ln_factorial(n + q) - ln_factorial(n))).exp();
        for m in 0..=n_max {
            amps[space.index(n + q, m)] = base[space.index(n, m)] * gain;
        }
    }
    amps
}

/// `<alpha,beta| a^q a†^q |alpha,beta>` summed over the truncated space.
pub fn photon_added_fock_norm(space: TruncatedSpace, alpha: C64, beta: C64, q: usize) -> f64 {
    photon_added_unnormalized(space, alpha, beta, q).iter().map(|c| c.norm_sqr()).sum()
}

/// Normalized `a†^q |alpha, beta>`.
pub fn photon_added_vector(space: TruncatedSpace, alpha: C64, beta: C64, q: usize) -> Result<FockVector, FockError> {
    if q > space.cutoff() {
        return Err(FockError::IndexOutOfRange { index: q as i64, cutoff: space.cutoff() });
    }
    FockVector::finish(space, photon_added_unnormalized(space, alpha, beta, q), Shell::Both)
}

/// Eigenstate of `b` and of `exp(a†a) a`.
pub fn nlcs_kowalski_vector(space: TruncatedSpace, zeta: C64, beta: C64) -> Result<FockVector, FockError> {
    let n_max = space.cutoff();
    let mut amps = vec![ZERO; space.dim()];
    for n in 0..=n_max {
        let Some((ln_a, ph_a)) = ln_power_over_sqrt_fact(zeta, n) else { continue };
        let damp = -0.5 * (n as f64 - 0.5).powi(2);
        for m in 0..=n_max {
            if let Some((ln_b, ph_b)) = ln_power_over_sqrt_fact(beta, m) {
                amps[space.index(n, m)] = from_polar_log(ln_a + ln_b + damp, ph_a + ph_b);
            }
        }
    }
    FockVector::finish(space, amps, Shell::Both)
}

fn interior_norm(space: TruncatedSpace, r: &[C64]) -> f64 {
    r.iter()
        .enumerate()
        .filter(|(i, _)| space.is_interior(*i))
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `||(op - lambda) v||` restricted to the interior block.
pub fn eigen_residual(op: &OperatorMatrix, v: &FockVector, lambda: C64) -> f64 {
    let w = op.apply(v);
    let r: Vec<C64> = w.iter().zip(&v.amps).map(|(x, y)| x - lambda * y).collect();
    interior_norm(v.space, &r)
}

/// `||f(n) a v - alpha v||` on the interior block, where `f` multiplies the
/// result of `a` by a function of its `a`-mode number.
pub fn deformed_annihilation_residual(v: &FockVector, alpha: C64, f: impl Fn(usize) -> f64) -> f64 {
    let space = v.space;
    let n_max = space.cutoff();
    let mut r = vec![ZERO; space.dim()];
    for n in 0..n_max {
        let fac = f(n) * ((n + 1) as f64).sqrt();
        for m in 0..=n_max {
            let i = space.index(n, m);
            r[i] = v.amps[space.index(n + 1, m)] * fac - alpha * v.amps[i];
        }
    }
    interior_norm(space, &r)
}

/// Residual of `exp(a†a) a v = zeta v`.
pub fn nlcs_residual(v: &FockVector, zeta: C64) -> f64 {
    deformed_annihilation_residual(v, zeta, |n| (n as f64).exp())
}

/// Residual of `(1 - q/(1+n)) a v = alpha v`.
pub fn photon_added_residual(v: &FockVector, alpha: C64, q: usize) -> f64 {
    deformed_annihilation_residual(v, alpha, |n| 1.0 - q as f64 / (1.0 + n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

pub fn expectation(v: &FockVector, op: &OperatorMatrix) -> Result<C64, FockError> {
    if v.space != op.space {
        return Err(FockError::SpaceMismatch);
    }
    let w = op.apply(v);
    Ok(v.amps.iter().zip(&w).map(|(a, b)| a.conj() * b).sum())
}

pub fn moments(v: &FockVector, op: &OperatorMatrix) -> Result<Moments, FockError> {
    if !op.is_hermitian() {
        return Err(FockError::NonHermitianVariance { label: op.label.clone() });
    }
    if v.space != op.space {
        return Err(FockError::SpaceMismatch);
    }
    let w = op.apply(v);
    let mean: f64 = v.amps.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<C64>().re;
    let second: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    Ok(Moments { mean, variance: second - mean * mean })
}

/// Symmetrized covariance `Re<q_j v|q_k v> - <q_j><q_k>` of Hermitian operators.
pub fn covariance(v: &FockVector, ops: &[OperatorMatrix]) -> Result<Vec<Vec<f64>>, FockError> {
    let applied: Vec<Vec<C64>> = ops.iter().map(|o| o.apply(v)).collect();
    let means: Vec<f64> = applied.iter().map(|w| v.amps.iter().zip(w).map(|(a, b)| a.conj() * b).sum::<C64>().re).collect();
    let k = ops.len();
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let s: C64 = applied[i].iter().zip(&applied[j]).map(|(a, b)| a.conj() * b).sum();
            cov[i][j] = s.re - means[i] * means[j];
        }
    }
    Ok(cov)
}

/// Free evolution in a constant field: `c_{n,m} -> exp(-i omega_c (n + 1/2) t) c_{n,m}`.
pub fn evolve_constant_field(v: &FockVector, config: &PhysicalConfig, t: f64) -> FockVector {
    let space = v.space;
    let amps = v
        .amps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (n, _) = space.quantum_numbers(i);
            c * C64::from_polar(1.0, -config.omega_c() * (n as f64 + 0.5) * t)
        })
        .collect();
    FockVector { space, amps, tail_norm: v.tail_norm }
}

/// Finite mixture `sum_k w_k |v_k><v_k|`.
#[derive(Debug, Clone)]
pub struct FockEnsemble {
    weights: Vec<f64>,
    states: Vec<FockVector>,
}

impl FockEnsemble {
    pub fn new(weights: Vec<f64>, states: Vec<FockVector>) -> Result<Self, FockError> {
        if weights.len() != states.len() || weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(FockError::BadWeights);
        }
        if states.windows(2).any(|w| w[0].space != w[1].space) {
            return Err(FockError::SpaceMismatch);
        }
        Ok(Self { weights, states })
    }

    /// Thermal occupation of the `a` mode with mean `nbar`, guiding centre fixed at `m`.
    pub fn thermal_a_mode(space: TruncatedSpace, nbar: f64, m: usize) -> Result<Self, FockError> {
        let q = nbar / (1.0 + nbar);
        let mut weights: Vec<f64> = (0..=space.cutoff()).map(|n| q.powi(n as i32) / (1.0 + nbar)).collect();
        let total: f64 = weights.iter().sum();
        let tail = 1.0 - total + weights[space.cutoff()];
        if tail > TAIL_LIMIT {
            return Err(FockError::TailOverflow { tail });
        }
        weights.iter_mut().for_each(|w| *w /= total);
        let states = (0..=space.cutoff()).map(|n| FockVector::basis(space, n, m)).collect::<Result<Vec<_>, _>>()?;
        Self::new(weights, states)
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64, FockError> {
        let mut acc = ZERO;
        for (w, v) in self.weights.iter().zip(&self.states) {
            acc += expectation(v, op)? * *w;
        }
        Ok(acc)
    }

    /// Symmetrized covariance of Hermitian operators, `Tr(rho {q_j, q_k})/2 - <q_j><q_k>`.
    pub fn covariance(&self, ops: &[OperatorMatrix]) -> Result<Vec<Vec<f64>>, FockError> {
        let k = ops.len();
        let means: Vec<f64> = ops.iter().map(|o| self.expectation(o).map(|c| c.re)).collect::<Result<_, _>>()?;
        let mut cov = vec![vec![0.0; k]; k];
        for (w, v) in self.weights.iter().zip(&self.states) {
            let applied: Vec<Vec<C64>> = ops.iter().map(|o| o.apply(v)).collect();
            for i in 0..k {
                for j in 0..k {
                    let s: C64 = applied[i].iter().zip(&applied[j]).map(|(a, b)| a.conj() * b).sum();
                    cov[i][j] += w * s.re;
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                cov[i][j] -= means[i] * means[j];
            }
        }
        Ok(cov)
    }

    /// `Tr(rho^2) = sum_jk w_j w_k |<v_j|v_k>|^2`.
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for (wi, vi) in self.weights.iter().zip(&self.states) {
            for (wj, vj) in self.weights.iter().zip(&self.states) {
                p += wi * wj * vi.inner(vj).expect("same space").norm_sqr();
            }
        }
        p
    }
}
