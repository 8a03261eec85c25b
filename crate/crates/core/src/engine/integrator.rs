//! Adaptive Dormand–Prince 5(4) integrator for autonomous complex linear systems.
//!
//! The local error is measured in the max norm of `err_i / (atol + rtol·|y_i|)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::ZERO;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

/// Integrator state carried across sample times.
pub struct Dopri5<F> {
    rhs: F,
    tol: Tolerances,
    max_steps: u64,
    t: f64,
    h: f64,
    err_old: f64,
    y: Vec<C64>,
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    stats: StepStats,
}

impl<F: FnMut(&[C64], &mut [C64])> Dopri5<F> {
    pub fn new(rhs: F, t0: f64, y0: Vec<C64>, tol: Tolerances, max_steps: u64) -> Self {
        let n = y0.len();
        let k = std::array::from_fn(|_| vec![ZERO; n]);
        Self { rhs, tol, max_steps, t: t0, h: 0.0, err_old: 1e-4, y: y0, k, tmp: vec![ZERO; n], stats: StepStats::default() }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[C64] {
        &self.y
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    fn eval(&mut self, src: Src, dst: usize) {
        let (input, out): (&[C64], &mut [C64]) = match src {
            Src::Y => (&self.y, &mut self.k[dst]),
            Src::Tmp => (&self.tmp, &mut self.k[dst]),
        };
        (self.rhs)(input, out);
        self.stats.evaluations += 1;
    }

    fn scaled_norm(&self, v: &[C64], reference: &[C64]) -> f64 {
        v.iter()
            .zip(reference)
            .map(|(e, y)| e.norm() / (self.tol.atol + self.tol.rtol * y.norm()))
            .fold(0.0, f64::max)
    }

    fn initial_step(&mut self, span: f64) -> f64 {
        self.eval(Src::Y, 0);
        let d0 = self.scaled_norm(&self.y, &self.y);
        let d1 = self.scaled_norm(&self.k[0], &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        for i in 0..self.y.len() {
            self.tmp[i] = self.y[i] + self.k[0][i] * h0;
        }
        self.eval(Src::Tmp, 1);
        let diff: Vec<C64> = self.k[1].iter().zip(&self.k[0]).map(|(a, b)| a - b).collect();
        let d2 = self.scaled_norm(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(span)
    }

    /// Advances exactly to `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        if t_end < self.t {
            return Err(Error::InvalidConfig(format!("sample time {t_end} precedes current time {}", self.t)));
        }
        if t_end == self.t {
            return Ok(());
        }
        if self.h == 0.0 {
            self.h = self.initial_step(t_end - self.t);
        } else if self.stats.accepted == 0 && self.stats.rejected == 0 {
            self.eval(Src::Y, 0);
        }
        let n = self.y.len();
        let mut steps = 0u64;
        let mut last_rejected = false;
        while self.t < t_end {
            let remaining = t_end - self.t;
            let clipped = self.h >= remaining * (1.0 - 1e-12);
            let h = if clipped { remaining } else { self.h };
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t: self.t, h });
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::ResourceLimit(format!("more than {} integrator steps before t = {t_end}", self.max_steps)));
            }

            for i in 0..n {
                self.tmp[i] = self.y[i] + self.k[0][i] * (h * A21);
            }
            self.eval(Src::Tmp, 1);
            for i in 0..n {
                self.tmp[i] = self.y[i] + (self.k[0][i] * A31 + self.k[1][i] * A32) * h;
            }
            self.eval(Src::Tmp, 2);
            for i in 0..n {
                self.tmp[i] = self.y[i] + (self.k[0][i] * A41 + self.k[1][i] * A42 + self.k[2][i] * A43) * h;
            }
            self.eval(Src::Tmp, 3);
            for i in 0..n {
                self.tmp[i] = self.y[i]
                    + (self.k[0][i] * A51 + self.k[1][i] * A52 + self.k[2][i] * A53 + self.k[3][i] * A54) * h;
            }
            self.eval(Src::Tmp, 4);
            for i in 0..n {
                self.tmp[i] = self.y[i]
                    + (self.k[0][i] * A61
                        + self.k[1][i] * A62
                        + self.k[2][i] * A63
                        + self.k[3][i] * A64
                        + self.k[4][i] * A65)
                        * h;
            }
            self.eval(Src::Tmp, 5);
            // 5th-order solution; its derivative is the first stage of the next step
            for i in 0..n {
                self.tmp[i] = self.y[i]
                    + (self.k[0][i] * A71
                        + self.k[2][i] * A73
                        + self.k[3][i] * A74
                        + self.k[4][i] * A75
                        + self.k[5][i] * A76)
                        * h;
            }
            self.eval(Src::Tmp, 6);

            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = (self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7)
                    * h;
                let sc = self.tol.atol + self.tol.rtol * self.y[i].norm().max(self.tmp[i].norm());
                err = err.max(e.norm() / sc);
            }

            let fac11 = err.powf(0.2);
            if err <= 1.0 {
                let fac = fac11 / self.err_old.powf(BETA);
                let fac = (fac / SAFETY).clamp(1.0 / MAX_FACTOR, 1.0 / MIN_FACTOR);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                self.err_old = err.max(1e-4);
                std::mem::swap(&mut self.y, &mut self.tmp);
                self.k.swap(0, 6);
                self.t = if clipped { t_end } else { self.t + h };
                self.stats.accepted += 1;
                last_rejected = false;
                if !(clipped && h_new > self.h) {
                    self.h = h_new;
                }
            } else {
                self.h = h / (fac11 / SAFETY).min(1.0 / MIN_FACTOR);
                self.stats.rejected += 1;
                last_rejected = true;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Src {
    Y,
    Tmp,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_oscillator_matches_exponential() {
        let w = C64::new(-0.3, 2.0);
        let rhs = move |y: &[C64], dy: &mut [C64]| dy[0] = w * y[0];
        let mut ode = Dopri5::new(rhs, 0.0, vec![C64::new(1.0, 0.0)], Tolerances::default(), 1_000_000);
        for &t in &[0.5, 1.0, 3.7, 10.0] {
            ode.advance_to(t).unwrap();
            assert_eq!(ode.t(), t);
            let exact = (w * t).exp();
            assert!((ode.state()[0] - exact).norm() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let w = C64::new(0.0, 5.0);
        let run = |rtol: f64| {
            let rhs = move |y: &[C64], dy: &mut [C64]| dy[0] = w * y[0];
            let tol = Tolerances { rtol, atol: rtol * 1e-2 };
            let mut ode = Dopri5::new(rhs, 0.0, vec![C64::new(1.0, 0.0)], tol, 1_000_000);
            ode.advance_to(4.0).unwrap();
            ((ode.state()[0] - (w * 4.0).exp()).norm(), ode.stats().accepted)
        };
        let (coarse, n_coarse) = run(1e-5);
        let (fine, n_fine) = run(1e-9);
        assert!(fine < coarse);
        assert!(n_fine > n_coarse);
    }

    #[test]
    fn step_budget_is_enforced() {
        let rhs = |y: &[C64], dy: &mut [C64]| dy[0] = C64::new(0.0, 100.0) * y[0];
        let mut ode = Dopri5::new(rhs, 0.0, vec![C64::new(1.0, 0.0)], Tolerances::default(), 10);
        assert!(matches!(ode.advance_to(100.0), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn going_backwards_is_rejected() {
        let rhs = |_: &[C64], dy: &mut [C64]| dy[0] = ZERO;
        let mut ode = Dopri5::new(rhs, 1.0, vec![ZERO], Tolerances::default(), 10);
        assert!(ode.advance_to(0.5).is_err());
    }
}
