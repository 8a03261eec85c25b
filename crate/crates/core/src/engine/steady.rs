//! Steady states of the Lindblad generator.
//!
//! Small registers solve the trace-constrained linear system `L ρ = 0`,
//! `Tr ρ = 1` with a dense LU factorization. Larger registers use restarted
//! GMRES on the same system, preconditioned by the Hamiltonian part in its
//! eigenbasis, and fall back to long-time integration.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::dense;
use crate::error::{Error, Result};
use crate::model::JumpOperatorSet;
use crate::operator::{ComplexMatrix, DensityMatrix, OperatorExpr, ONE, ZERO};

use super::compensated;
use super::generator::{check_dims, LindbladGenerator};
use super::integrator::{Dopri5, Tolerances};
use super::liouvillian::{build_liouvillian, DENSE_MAX_DIM};

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateOptions {
    /// Required `‖L(ρ)‖_max` for the direct route.
    pub residual_tol: f64,
    /// Required `‖L(ρ)‖_max` for the iterative and integration routes.
    pub iterative_residual_tol: f64,
    /// Liouvillian eigenvalues below this magnitude count as zero modes.
    pub degeneracy_threshold: f64,
    pub dense_max_dim: usize,
    pub gmres_restart: usize,
    pub gmres_max_iterations: usize,
    /// Integration span between residual checks in the fallback route.
    pub integration_chunk: f64,
    pub max_integration_time: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            iterative_residual_tol: 1e-8,
            degeneracy_threshold: 1e-10,
            dense_max_dim: DENSE_MAX_DIM,
            gmres_restart: 60,
            gmres_max_iterations: 1200,
            integration_chunk: 50.0,
            max_integration_time: 2e4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    DenseLu,
    Gmres,
    Integration,
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L(ρ)‖_max`
    pub residual: f64,
    pub method: SteadyMethod,
}

pub fn steady_state(h: &OperatorExpr, jumps: &JumpOperatorSet) -> Result<DensityMatrix> {
    Ok(steady_state_with(h, jumps, &SteadyStateOptions::default())?.rho)
}

pub fn steady_state_with(h: &OperatorExpr, jumps: &JumpOperatorSet, opts: &SteadyStateOptions) -> Result<SteadyState> {
    check_dims(h, jumps)?;
    if h.dim() <= opts.dense_max_dim {
        dense_steady_state(h, jumps, opts)
    } else {
        iterative_steady_state(h, jumps, opts)
    }
}

/// `‖L(ρ)‖_max` evaluated matrix-free.
pub fn residual(gen: &LindbladGenerator, rho: &ComplexMatrix) -> f64 {
    let mut out = vec![ZERO; rho.as_slice().len()];
    let mut scratch = out.clone();
    let local = gen.to_frame(rho.as_slice());
    gen.apply(&local, &mut out, &mut scratch);
    out.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn dense_steady_state(h: &OperatorExpr, jumps: &JumpOperatorSet, opts: &SteadyStateOptions) -> Result<SteadyState> {
    let d = h.dim();
    let n = d * d;
    let liouvillian = build_liouvillian(h, jumps)?;
    let l = liouvillian.to_dense()?;
    let mut a = l.clone();
    for c in 0..n {
        a[(0, c)] = ZERO;
    }
    for i in 0..d {
        a[(0, i + i * d)] = ONE;
    }
    let lu = a.partial_piv_lu();

    if smallest_singular_value(&lu, n) < opts.degeneracy_threshold {
        let zero_modes = null_space(&l, d, opts.degeneracy_threshold)?;
        if zero_modes.len() > 1 {
            return Err(Error::DegenerateSteadyState {
                multiplicity: zero_modes.len(),
                threshold: opts.degeneracy_threshold,
                basis: zero_modes,
            });
        }
        log::warn!("trace-constrained steady-state system is nearly singular but the zero mode is unique");
    }

    let mut b = Mat::<C64>::zeros(n, 1);
    b[(0, 0)] = ONE;
    let mut x = lu.solve(&b);
    for _ in 0..REFINEMENT_STEPS {
        let r = compensated_residual(h, jumps, x.col(0).try_as_col_major().unwrap().as_slice());
        x += lu.solve(&r);
    }

    let m = ComplexMatrix::unvectorize(d, x.col(0).try_as_col_major().unwrap().as_slice())?;
    finish(h, jumps, m, opts.residual_tol, SteadyMethod::DenseLu)
}

const REFINEMENT_STEPS: usize = 3;

/// `b - A x` for the trace-constrained system, with `L(ρ)` evaluated in
/// double-word precision so refinement converges on ill-conditioned Liouvillians.
fn compensated_residual(h: &OperatorExpr, jumps: &JumpOperatorSet, x: &[C64]) -> Mat<C64> {
    let d = h.dim();
    let lx = compensated::lindblad_apply(h, jumps, x);
    let mut tr = (compensated::Acc::default(), compensated::Acc::default());
    tr.0.add(-1.0);
    for i in 0..d {
        tr.0.add(x[i + i * d].re);
        tr.1.add(x[i + i * d].im);
    }
    Mat::from_fn(d * d, 1, |row, _| if row == 0 { -C64::new(tr.0.value(), tr.1.value()) } else { -lx[row] })
}

/// `σ_min` of an LU-factored square matrix by inverse iteration on `AᴴA`.
fn smallest_singular_value(lu: &faer::linalg::solvers::PartialPivLu<C64>, n: usize) -> f64 {
    let mut v = Mat::<C64>::from_fn(n, 1, |i, _| C64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    let mut estimate = f64::INFINITY;
    for _ in 0..6 {
        let nv = v.norm_l2();
        v = v * faer::Scale(C64::new(1.0 / nv, 0.0));
        let w = lu.solve(lu.solve_adjoint(&v));
        let growth = w.norm_l2();
        if !growth.is_finite() || growth == 0.0 {
            return 0.0;
        }
        estimate = 1.0 / growth.sqrt();
        v = w;
    }
    estimate
}

fn null_space(l: &Mat<C64>, d: usize, threshold: f64) -> Result<Vec<ComplexMatrix>> {
    let evd = l.eigen().map_err(|e| Error::LinAlg(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let n = l.nrows();
    let mut basis = Vec::new();
    for k in 0..n {
        if s[k].norm() < threshold {
            let v: Vec<C64> = (0..n).map(|i| u[(i, k)]).collect();
            let mut m = ComplexMatrix::unvectorize(d, &v)?;
            let tr = m.trace();
            if tr.norm() > 1e-8 {
                m = m.scale(ONE / tr);
            }
            basis.push(m);
        }
    }
    Ok(basis)
}

fn finish(
    h: &OperatorExpr,
    jumps: &JumpOperatorSet,
    m: ComplexMatrix,
    tol: f64,
    method: SteadyMethod,
) -> Result<SteadyState> {
    let d = m.dim();
    let herm = ComplexMatrix::from_fn(d, |r, c| 0.5 * (m[(r, c)] + m[(c, r)].conj()));
    let tr = herm.trace();
    let herm = herm.scale(ONE / tr);
    let gen = LindbladGenerator::new(h, jumps)?;
    let res = residual(&gen, &herm);
    if !(res < tol) {
        return Err(Error::NoConvergence { residual: res, iterations: 0 });
    }
    let rho = DensityMatrix::new(herm)?;
    let lo = rho.min_eigenvalue()?;
    if lo < -1e-10 {
        return Err(Error::InvalidState(format!("steady state has negative eigenvalue {lo:e}")));
    }
    Ok(SteadyState { rho, residual: res, method })
}

fn iterative_steady_state(h: &OperatorExpr, jumps: &JumpOperatorSet, opts: &SteadyStateOptions) -> Result<SteadyState> {
    let d = h.dim();
    let gen = LindbladGenerator::auto_frame(h, jumps)?;
    let n = d * d;

    // Hamiltonian eigenbasis in the generator's frame
    let h_frame = ComplexMatrix::from_vec(d, gen.to_frame(h.to_dense().as_slice()))?;
    let (energies, v) = dense::eigh(&h_frame)?;
    let kappa = {
        let total: f64 = jumps.iter().map(|j| j.rate).sum();
        (total / d as f64).max(1e-3)
    };
    let vh = v.adjoint().to_owned();

    let apply_a = |x: &[C64], out: &mut [C64], scratch: &mut [C64]| {
        gen.apply(x, out, scratch);
        out[0] = (0..d).map(|i| x[i * d + i]).sum();
    };
    let precondition = |x: &[C64]| -> Vec<C64> {
        let m = Mat::from_fn(d, d, |r, c| x[r * d + c]);
        let t = &vh * &m * &v;
        let t = Mat::from_fn(d, d, |a, b| t[(a, b)] / C64::new(-kappa, -(energies[a] - energies[b])));
        let back = &v * &t * &vh;
        let mut out = vec![ZERO; n];
        for r in 0..d {
            for c in 0..d {
                out[r * d + c] = back[(r, c)];
            }
        }
        out
    };

    let mut b = vec![ZERO; n];
    b[0] = ONE;
    let mut x0 = vec![ZERO; n];
    for i in 0..d {
        x0[i * d + i] = C64::new(1.0 / d as f64, 0.0);
    }
    let (x, gmres_res, iters) = gmres(apply_a, precondition, &b, x0, opts.gmres_restart, 1e-12, opts.gmres_max_iterations);
    log::info!("gmres steady state: {iters} iterations, residual {gmres_res:.3e}");

    let to_lab = |x: &[C64]| -> Result<ComplexMatrix> { ComplexMatrix::from_vec(d, gen.from_frame(x)) };
    let candidate = to_lab(&x)?;
    if let Ok(done) = finish(h, jumps, candidate.clone(), opts.iterative_residual_tol, SteadyMethod::Gmres) {
        return Ok(done);
    }
    log::warn!("gmres did not reach the steady-state tolerance; continuing by time integration");
    integrate_to_steady_state(&gen, h, jumps, candidate, opts)
}

fn integrate_to_steady_state(
    gen: &LindbladGenerator,
    h: &OperatorExpr,
    jumps: &JumpOperatorSet,
    start: ComplexMatrix,
    opts: &SteadyStateOptions,
) -> Result<SteadyState> {
    let d = start.dim();
    let herm = ComplexMatrix::from_fn(d, |r, c| 0.5 * (start[(r, c)] + start[(c, r)].conj()));
    let tr = herm.trace();
    let usable = tr.norm() > 0.5 && herm.hermitian_eigenvalues().map(|e| e[0] > -1e-3).unwrap_or(false);
    let init = if usable { herm.scale(ONE / tr) } else { DensityMatrix::maximally_mixed(d).into_matrix() };
    let mut scratch = vec![ZERO; d * d];
    let rhs = |y: &[C64], dy: &mut [C64]| gen.apply(y, dy, &mut scratch);
    let mut ode = Dopri5::new(rhs, 0.0, gen.to_frame(init.as_slice()), Tolerances::default(), u64::MAX);
    let mut t = 0.0;
    let mut last = f64::INFINITY;
    while t < opts.max_integration_time {
        t += opts.integration_chunk;
        ode.advance_to(t)?;
        let m = ComplexMatrix::from_vec(d, gen.from_frame(ode.state()))?;
        last = residual(gen, &m);
        if last < opts.iterative_residual_tol {
            return finish(h, jumps, m, opts.iterative_residual_tol, SteadyMethod::Integration);
        }
    }
    Err(Error::NoConvergence { residual: last, iterations: ode.stats().accepted as usize })
}

/// Right-preconditioned restarted GMRES for `A x = b`. Returns the solution,
/// the final relative residual and the number of inner iterations.
fn gmres(
    apply_a: impl Fn(&[C64], &mut [C64], &mut [C64]),
    precondition: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    mut x: Vec<C64>,
    restart: usize,
    tol: f64,
    max_iterations: usize,
) -> (Vec<C64>, f64, usize) {
    let n = b.len();
    let norm = |v: &[C64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>();
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let mut scratch = vec![ZERO; n];
    let mut ax = vec![ZERO; n];
    let mut iterations = 0;
    let mut rel = f64::INFINITY;

    while iterations < max_iterations {
        apply_a(&x, &mut ax, &mut scratch);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel < tol {
            break;
        }
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut z_basis: Vec<Vec<C64>> = Vec::new();
        let mut hess: Vec<Vec<C64>> = Vec::new();
        let mut cs: Vec<(C64, C64)> = Vec::new();
        let mut g = vec![C64::new(beta, 0.0)];
        let mut k_used = 0;
        for k in 0..restart {
            if iterations >= max_iterations {
                break;
            }
            iterations += 1;
            let z = precondition(&basis[k]);
            let mut w = vec![ZERO; n];
            apply_a(&z, &mut w, &mut scratch);
            z_basis.push(z);
            let mut col = vec![ZERO; k + 2];
            for (i, vi) in basis.iter().enumerate() {
                let hij = dot(vi, &w);
                col[i] = hij;
                w.iter_mut().zip(vi).for_each(|(a, v)| *a -= hij * v);
            }
            let wn = norm(&w);
            col[k + 1] = C64::new(wn, 0.0);
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = c.conj() * a + s.conj() * bb;
                col[i + 1] = -s * a + c * bb;
            }
            let (a, bb) = (col[k], col[k + 1]);
            let rnorm = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if rnorm == 0.0 { (ONE, ZERO) } else { (a / rnorm, bb / rnorm) };
            col[k] = C64::new(rnorm, 0.0);
            col[k + 1] = ZERO;
            cs.push((c, s));
            let gk = g[k];
            g[k] = c.conj() * gk;
            g.push(-s * gk);
            hess.push(col);
            k_used = k + 1;
            rel = g[k + 1].norm() / b_norm;
            if rel < tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let mut y = vec![ZERO; k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in i + 1..k_used {
                acc -= hess[j][i] * y[j];
            }
            y[i] = acc / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            x.iter_mut().zip(&z_basis[j]).for_each(|(a, z)| *a += yj * z);
        }
        if rel < tol {
            break;
        }
    }
    (x, rel, iterations)
}
