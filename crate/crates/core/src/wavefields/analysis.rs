use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{WaveError, WaveField};
use crate::config::Gauge;

type C64 = Complex64;

/// Cells at each edge where first-derivative stencils are not evaluated.
pub const BORDER: usize = 4;

const STENCIL: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn d_dx(v: &[C64], p: usize, h: f64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    out.par_chunks_mut(p).enumerate().for_each(|(j, row)| {
        let base = j * p;
        for i in BORDER..p - BORDER {
            let mut acc = C64::new(0.0, 0.0);
            for (k, c) in STENCIL.iter().enumerate() {
                let o = k + 1;
                acc += (v[base + i + o] - v[base + i - o]) * *c;
            }
            row[i] = acc / h;
        }
    });
    out
}

fn d_dy(v: &[C64], p: usize, h: f64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    out.par_chunks_mut(p).enumerate().for_each(|(j, row)| {
        if j < BORDER || j >= p - BORDER {
            return;
        }
        for (i, r) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, c) in STENCIL.iter().enumerate() {
                let o = k + 1;
                acc += (v[(j + o) * p + i] - v[(j - o) * p + i]) * *c;
            }
            *r = acc / h;
        }
    });
    out
}

/// Operators realized through gauge-covariant kinetic momenta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GridOperator {
    PiX,
    PiY,
    X,
    Y,
    Xi,
    Eta,
    A,
    B,
    /// `a b`.
    AB,
    /// Generalized angular momentum `x pi_y - y pi_x + M omega_c r^2 / 2`.
    L,
    H,
}

impl GridOperator {
    fn derivative_order(self) -> usize {
        match self {
            GridOperator::H => 2,
            GridOperator::AB => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Ladder {
    A,
    B,
}

struct Ctx<'a> {
    field: &'a WaveField,
    p: usize,
    h: f64,
    hbar: f64,
    mw: f64,
}

impl<'a> Ctx<'a> {
    fn new(field: &'a WaveField) -> Self {
        let cfg = field.config();
        Self { field, p: field.grid().points(), h: field.grid().step(), hbar: cfg.hbar(), mw: cfg.mass() * cfg.omega_c() }
    }

    fn xy(&self, k: usize) -> (f64, f64) {
        let c = self.field.grid().coords();
        (c[k % self.p], c[k / self.p])
    }

    fn kinetic(&self, v: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let dx = d_dx(v, self.p, self.h);
        let dy = d_dy(v, self.p, self.h);
        let mih = C64::new(0.0, -self.hbar);
        let (ax, ay) = match self.field.gauge() {
            Gauge::Symmetric => (0.5, 0.5),
            Gauge::Landau => (1.0, 0.0),
        };
        let mw = self.mw;
        let px = (0..v.len())
            .into_par_iter()
            .map(|k| {
                let (_, y) = self.xy(k);
                mih * dx[k] + v[k] * (ax * mw * y)
            })
            .collect();
        let py = (0..v.len())
            .into_par_iter()
            .map(|k| {
                let (x, _) = self.xy(k);
                mih * dy[k] - v[k] * (ay * mw * x)
            })
            .collect();
        (px, py)
    }

    fn apply(&self, op: GridOperator, v: &[C64]) -> Vec<C64> {
        use GridOperator::*;
        let mw = self.mw;
        let (px, py) = match op {
            AB | H => {
                return match op {
                    AB => {
                        let bv = self.apply(B, v);
                        self.apply(A, &bv)
                    }
                    _ => {
                        let (px, py) = self.kinetic(v);
                        let (pxx, _) = self.kinetic(&px);
                        let (_, pyy) = self.kinetic(&py);
                        let cfg = self.field.config();
                        let m = cfg.mass();
                        let k0 = 0.5 * m * cfg.omega_0() * cfg.omega_0();
                        (0..v.len())
                            .map(|k| {
                                let (x, y) = self.xy(k);
                                (pxx[k] + pyy[k]) / (2.0 * m) + v[k] * (k0 * (x * x + y * y))
                            })
                            .collect()
                    }
                };
            }
            _ => self.kinetic(v),
        };
        let n = v.len();
        let map = |f: &dyn Fn(usize) -> C64| -> Vec<C64> { (0..n).map(f).collect() };
        match op {
            PiX => px,
            PiY => py,
            X => map(&|k| v[k] * self.xy(k).0 + py[k] / mw),
            Y => map(&|k| v[k] * self.xy(k).1 - px[k] / mw),
            Xi => map(&|k| -py[k] / mw),
            Eta => map(&|k| px[k] / mw),
            A => {
                let s = (2.0 * self.hbar * mw).sqrt().recip();
                map(&|k| (px[k] + C64::i() * py[k]) * s)
            }
            B => {
                let s = (mw / (2.0 * self.hbar)).sqrt();
                map(&|k| {
                    let (x, y) = self.xy(k);
                    let xv = v[k] * x + py[k] / mw;
                    let yv = v[k] * y - px[k] / mw;
                    (xv - C64::i() * yv) * s
                })
            }
            L => map(&|k| {
                let (x, y) = self.xy(k);
                py[k] * x - px[k] * y + v[k] * (0.5 * mw * (x * x + y * y))
            }),
            AB | H => unreachable!(),
        }
    }

    fn interior_norm_sqr(&self, v: &[C64], border: usize) -> f64 {
        let p = self.p;
        let w = self.field.grid().weights();
        (border..p - border)
            .map(|j| (border..p - border).map(|i| v[j * p + i].norm_sqr() * w[i]).sum::<f64>() * w[j])
            .sum()
    }
}

pub fn apply_operator(field: &WaveField, op: GridOperator) -> Vec<C64> {
    Ctx::new(field).apply(op, field.values())
}

/// `<psi|op psi> / <psi|psi>`.
pub fn expectation(field: &WaveField, op: GridOperator) -> C64 {
    let w = apply_operator(field, op);
    field.grid().integrate_product(field.values(), &w) / field.norm_sqr()
}

/// `||(op - lambda) psi|| / ||psi||` with the stencil border excluded.
pub fn operator_residual(field: &WaveField, op: GridOperator, lambda: C64) -> f64 {
    let ctx = Ctx::new(field);
    let w = ctx.apply(op, field.values());
    let r: Vec<C64> = w.iter().zip(field.values()).map(|(a, b)| a - lambda * b).collect();
    let border = BORDER * op.derivative_order();
    (ctx.interior_norm_sqr(&r, border) / ctx.interior_norm_sqr(field.values(), border)).sqrt()
}

pub fn ladder_residual(field: &WaveField, which: Ladder, eigenvalue: C64) -> Result<f64, WaveError> {
    let op = match which {
        Ladder::A => GridOperator::A,
        Ladder::B => GridOperator::B,
    };
    Ok(operator_residual(field, op, eigenvalue))
}

/// First and second moments of the geometric coordinates together with `<H>` and `<L>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticMoments {
    pub norm: f64,
    pub energy: f64,
    pub angular_momentum: f64,
    /// `<(X, Y, xi, eta)>`.
    pub means: [f64; 4],
    pub covariance: [[f64; 4]; 4],
}

impl QuadraticMoments {
    pub fn xi_eta_block(&self) -> [[f64; 2]; 2] {
        [[self.covariance[2][2], self.covariance[2][3]], [self.covariance[3][2], self.covariance[3][3]]]
    }

    pub fn x_y_block(&self) -> [[f64; 2]; 2] {
        [[self.covariance[0][0], self.covariance[0][1]], [self.covariance[1][0], self.covariance[1][1]]]
    }

    /// `<xi^2 + eta^2>`.
    pub fn relative_radius_sqr(&self) -> f64 {
        self.covariance[2][2] + self.covariance[3][3] + self.means[2].powi(2) + self.means[3].powi(2)
    }

    /// `<X^2 + Y^2>`.
    pub fn center_radius_sqr(&self) -> f64 {
        self.covariance[0][0] + self.covariance[1][1] + self.means[0].powi(2) + self.means[1].powi(2)
    }
}

pub fn quadratic_moments(field: &WaveField) -> Result<QuadraticMoments, WaveError> {
    let ctx = Ctx::new(field);
    let grid = field.grid();
    let psi = field.values();
    let norm = field.norm_sqr();
    let (px, py) = ctx.kinetic(psi);
    let mw = ctx.mw;
    let n = psi.len();
    let q: [Vec<C64>; 4] = [
        (0..n).map(|k| psi[k] * ctx.xy(k).0 + py[k] / mw).collect(),
        (0..n).map(|k| psi[k] * ctx.xy(k).1 - px[k] / mw).collect(),
        (0..n).map(|k| -py[k] / mw).collect(),
        (0..n).map(|k| px[k] / mw).collect(),
    ];
    let means: [f64; 4] = std::array::from_fn(|i| grid.integrate_product(psi, &q[i]).re / norm);
    let mut covariance = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let c = grid.integrate_product(&q[i], &q[j]).re / norm - means[i] * means[j];
            covariance[i][j] = c;
            covariance[j][i] = c;
        }
    }
    let cfg = field.config();
    let k0 = 0.5 * cfg.mass() * cfg.omega_0() * cfg.omega_0();
    let r2: Vec<C64> = (0..n)
        .map(|k| {
            let (x, y) = ctx.xy(k);
            psi[k] * (x * x + y * y)
        })
        .collect();
    let pot = k0 * grid.integrate_product(psi, &r2).re / norm;
    let kin = (grid.integrate_norm_sqr(&px) + grid.integrate_norm_sqr(&py)) / (2.0 * cfg.mass() * norm);
    let lv = ctx.apply(GridOperator::L, psi);
    let angular_momentum = grid.integrate_product(psi, &lv).re / norm;
    Ok(QuadraticMoments { norm, energy: kin + pot, angular_momentum, means, covariance })
}

/// `<H^2> - <H>^2`.
pub fn energy_variance(field: &WaveField) -> f64 {
    variance_of(field, GridOperator::H)
}

/// `<L^2> - <L>^2`.
pub fn angular_variance(field: &WaveField) -> f64 {
    variance_of(field, GridOperator::L)
}

fn variance_of(field: &WaveField, op: GridOperator) -> f64 {
    let w = apply_operator(field, op);
    let grid = field.grid();
    let norm = field.norm_sqr();
    let mean = grid.integrate_product(field.values(), &w).re / norm;
    grid.integrate_norm_sqr(&w) / norm - mean * mean
}
