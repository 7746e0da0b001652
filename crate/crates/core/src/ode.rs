//! Adaptive Dormand–Prince 5(4) integration for small real systems.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 5_000_000;

/// Integrator state carried across calls so that the step size adapts once
/// and is reused between output times and segment boundaries.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    tol: Tolerances,
    t: f64,
    y: Vec<f64>,
    h: f64,
    k: Vec<Vec<f64>>,
    steps: usize,
    rejected: usize,
}

impl Dopri5 {
    pub fn new(t0: f64, y0: Vec<f64>, tol: Tolerances) -> Self {
        let n = y0.len();
        Self { tol, t: t0, y: y0, h: 0.0, k: vec![vec![0.0; n]; 7], steps: 0, rejected: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Overwrites the state, e.g. to apply an impulsive jump.
    pub fn set_state(&mut self, y: Vec<f64>) {
        assert_eq!(y.len(), self.y.len());
        self.y = y;
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    fn error_norm(&self, y_new: &[f64], h: f64) -> f64 {
        let n = self.y.len();
        let mut acc = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| E[s] * self.k[s][i]).sum::<f64>() * h;
            let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(y_new[i].abs());
            acc += (e / sc).powi(2);
        }
        (acc / n as f64).sqrt()
    }

    fn initial_step(&mut self, f: &impl Fn(f64, &[f64], &mut [f64]), span: f64) -> f64 {
        let n = self.y.len();
        let mut f0 = vec![0.0; n];
        f(self.t, &self.y, &mut f0);
        let sc: Vec<f64> = self.y.iter().map(|v| self.tol.atol + self.tol.rtol * v.abs()).collect();
        let d0 = (self.y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
        let d1 = (f0.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: Vec<f64> = self.y.iter().zip(&f0).map(|(y, d)| y + h0 * d).collect();
        let mut f1 = vec![0.0; n];
        f(self.t + h0, &y1, &mut f1);
        let d2 = (f1.iter().zip(&f0).zip(&sc).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>() / n as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(span)
    }

    /// Advances to exactly `t_end`, calling `on_step(t, y)` after each accepted step.
    ///
    /// `f` is only evaluated on `[self.t(), t_end]`.
    pub fn advance<E2>(
        &mut self,
        t_end: f64,
        f: impl Fn(f64, &[f64], &mut [f64]),
        mut on_step: impl FnMut(f64, &[f64]) -> Result<(), E2>,
    ) -> Result<(), AdvanceError<E2>> {
        let span = t_end - self.t;
        if span <= 0.0 {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(&f, span);
        }
        let mut k0 = vec![0.0; self.y.len()];
        f(self.t, &self.y, &mut k0);
        self.k[0] = k0;
        let n = self.y.len();
        let mut ys = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        loop {
            let remaining = t_end - self.t;
            if remaining <= 1e-15 * t_end.abs().max(1.0) {
                self.t = t_end;
                return Ok(());
            }
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(AdvanceError::Ode(OdeError::StepUnderflow { t: self.t }));
            }
            for s in 1..7 {
                for i in 0..n {
                    ys[i] = self.y[i] + h * (0..s).map(|j| A[s][j] * self.k[j][i]).sum::<f64>();
                }
                let ts = if last && s >= 5 { t_end } else { self.t + C[s] * h };
                f(ts, &ys, &mut self.k[s]);
            }
            y_new.copy_from_slice(&ys);
            let err = self.error_norm(&y_new, h);
            if !err.is_finite() {
                return Err(AdvanceError::Ode(OdeError::NonFinite { t: self.t }));
            }
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                std::mem::swap(&mut self.y, &mut y_new);
                self.k.swap(0, 6);
                self.steps += 1;
                if self.steps > MAX_STEPS {
                    return Err(AdvanceError::Ode(OdeError::TooManySteps { t: self.t }));
                }
                on_step(self.t, &self.y).map_err(AdvanceError::Callback)?;
                let factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
                let proposed = h * factor;
                self.h = if last { self.h.max(proposed) } else { proposed };
                if last {
                    return Ok(());
                }
            } else {
                self.rejected += 1;
                self.h = h * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdvanceError<E> {
    Ode(OdeError),
    Callback(E),
}
