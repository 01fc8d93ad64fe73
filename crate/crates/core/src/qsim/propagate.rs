//! Action of `exp(-i H t)` on a state vector.
//!
//! Two methods: a Chebyshev expansion over substeps and a restarted
//! Lanczos (Krylov) propagator with adaptive step control. Both only use
//! `H x` products.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::hamiltonian::PauseHamiltonian;
use super::state::StateVector;
use super::C64;
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Allowed deviation of the final norm from 1.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// `t_nat = 2 pi 10^3 t_us`, the argument of `exp(-i H t)` for `H` in GHz.
pub fn natural_time(t_us: f64) -> f64 {
    2.0 * std::f64::consts::PI * 1e3 * t_us
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Propagator {
    Chebyshev,
    Krylov,
}

impl Default for Propagator {
    fn default() -> Self {
        Propagator::Chebyshev
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationSettings {
    pub method: Propagator,
    pub tolerance: f64,
    /// Lanczos subspace dimension.
    pub krylov_dim: usize,
    /// Spectral width times time step for one Chebyshev substep.
    pub chebyshev_step: f64,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        PropagationSettings {
            method: Propagator::default(),
            tolerance: DEFAULT_TOLERANCE,
            krylov_dim: 30,
            chebyshev_step: 400.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub matvecs: usize,
    pub substeps: usize,
    pub norm_drift: f64,
}

/// `exp(-i H t_nat) psi0` with `t_nat = natural_time(t_us)`.
pub fn evolve(h: &PauseHamiltonian, psi0: &StateVector, t_us: f64) -> Result<StateVector> {
    Ok(evolve_with(h, psi0, natural_time(t_us), &PropagationSettings::default())?.0)
}

/// `exp(-i H t) psi0` for a time already in natural units.
pub fn evolve_with(
    h: &PauseHamiltonian,
    psi0: &StateVector,
    t: f64,
    settings: &PropagationSettings,
) -> Result<(StateVector, PropagationStats)> {
    if psi0.n() != h.n() {
        return Err(Error::invalid(format!(
            "state has {} qubits, operator has {}",
            psi0.n(),
            h.n()
        )));
    }
    let norm0 = psi0.norm();
    if (norm0 - 1.0).abs() > super::state::NORM_TOLERANCE {
        return Err(Error::invalid(format!("initial state norm {norm0} is not 1")));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid("evolution time must be finite and non-negative"));
    }
    let mut stats = PropagationStats::default();
    let mut psi = psi0.amplitudes().to_vec();
    if t > 0.0 {
        match settings.method {
            Propagator::Chebyshev => chebyshev(h, &mut psi, t, settings, &mut stats),
            Propagator::Krylov => krylov(h, &mut psi, t, settings, &mut stats)?,
        }
    }
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    stats.norm_drift = (norm - 1.0).abs();
    if stats.norm_drift > NORM_DRIFT_LIMIT {
        return Err(Error::Integration(format!(
            "norm drifted by {:.3e} during propagation",
            stats.norm_drift
        )));
    }
    Ok((StateVector::from_raw(h.n(), psi), stats))
}

/// `J_0(x) .. J_{kmax}(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 sum J_{2k} = 1`.
pub(crate) fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = kmax.max(x.ceil() as usize) + 60 + (x.cbrt() * 10.0) as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = vals[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * vals[k];
    }
    vals.truncate(kmax + 1);
    vals.iter_mut().for_each(|v| *v /= norm);
    vals
}

fn chebyshev(h: &PauseHamiltonian, psi: &mut [C64], t: f64, settings: &PropagationSettings, stats: &mut PropagationStats) {
    let (lo, hi) = h.spectral_bounds();
    // pad the enclosure so the scaled operator stays strictly inside [-1, 1]
    let half = 0.5 * (hi - lo) * (1.0 + 1e-6) + 1e-12;
    let center = 0.5 * (hi + lo);
    let substeps = ((half * t) / settings.chebyshev_step).ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    let tau = half * dt;

    // terms until the Bessel tail is negligible
    let guess = (tau + 10.0 * tau.cbrt() + 30.0) as usize;
    let bessel = bessel_j_sequence(tau, guess);
    let cut = settings.tolerance * 1e-4 / substeps as f64;
    let mut terms = bessel.len();
    while terms > 2 && bessel[terms - 1].abs() < cut && bessel[terms - 2].abs() < cut {
        terms -= 1;
    }
    let coeffs: Vec<C64> = (0..terms)
        .map(|k| {
            let phase = match k % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, -1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, 1.0),
            };
            phase * bessel[k] * if k == 0 { 1.0 } else { 2.0 }
        })
        .collect();
    let global = C64::from_polar(1.0, -center * dt);

    let dim = psi.len();
    let mut prev = vec![C64::new(0.0, 0.0); dim];
    let mut cur = vec![C64::new(0.0, 0.0); dim];
    let mut next = vec![C64::new(0.0, 0.0); dim];
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    let inv = 1.0 / half;
    for _ in 0..substeps {
        prev.copy_from_slice(psi);
        for (a, p) in acc.iter_mut().zip(&prev) {
            *a = coeffs[0] * p;
        }
        h.apply(&prev, &mut cur);
        stats.matvecs += 1;
        for ((c, p), a) in cur.iter_mut().zip(&prev).zip(acc.iter_mut()) {
            *c = (*c - p * center) * inv;
            *a += coeffs[1] * *c;
        }
        for &ck in &coeffs[2..] {
            h.apply(&cur, &mut next);
            stats.matvecs += 1;
            for (((nx, c), p), a) in next.iter_mut().zip(&cur).zip(&prev).zip(acc.iter_mut()) {
                *nx = (*nx - c * center) * (2.0 * inv) - p;
                *a += ck * *nx;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        for (x, a) in psi.iter_mut().zip(&acc) {
            *x = a * global;
        }
        stats.substeps += 1;
    }
}

fn krylov(
    h: &PauseHamiltonian,
    psi: &mut [C64],
    t: f64,
    settings: &PropagationSettings,
    stats: &mut PropagationStats,
) -> Result<()> {
    let dim = psi.len();
    let m_max = settings.krylov_dim.min(dim).max(1);
    let (lo, hi) = h.spectral_bounds();
    // first step: a subspace of size m resolves roughly m / (width) time
    let mut dt = (m_max as f64 * 0.5 / ((hi - lo).max(1e-12))).min(t);
    let mut elapsed = 0.0;
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max + 1);
    let mut w = vec![C64::new(0.0, 0.0); dim];
    while elapsed < t {
        let beta0: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        basis.clear();
        basis.push(psi.iter().map(|a| a / beta0).collect());
        let mut alpha = Vec::with_capacity(m_max);
        let mut offdiag = Vec::with_capacity(m_max);
        let mut m = 0;
        let mut tail = 0.0;
        while m < m_max {
            h.apply(&basis[m], &mut w);
            stats.matvecs += 1;
            // full reorthogonalisation, twice
            let mut a_m = 0.0;
            for _ in 0..2 {
                for (j, v) in basis.iter().enumerate() {
                    let proj: C64 = v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    if j == m {
                        a_m += proj.re;
                    }
                    for (y, x) in w.iter_mut().zip(v) {
                        *y -= proj * x;
                    }
                }
            }
            alpha.push(a_m);
            let b: f64 = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            m += 1;
            tail = b;
            if b < 1e-13 * (hi - lo).abs().max(1.0) {
                break;
            }
            if m < m_max {
                offdiag.push(b);
                basis.push(w.iter().map(|a| a / b).collect());
            }
        }
        let tri = Mat::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j || j + 1 == i {
                offdiag[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = tri
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Integration(format!("tridiagonal eigensolver failed: {e:?}")))?;
        let q = eig.U();
        let lam = eig.S().column_vector();
        let remaining = t - elapsed;
        let mut step = dt.min(remaining);
        loop {
            let y: Vec<C64> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|k| C64::from_polar(1.0, -lam[k] * step) * (q[(i, k)] * q[(0, k)]))
                        .sum()
                })
                .collect();
            let err = tail * y[m - 1].norm();
            let budget = settings.tolerance * step / t;
            if err <= budget || m < m_max {
                for x in psi.iter_mut() {
                    *x = C64::new(0.0, 0.0);
                }
                for (yk, v) in y.iter().zip(&basis) {
                    let c = yk * beta0;
                    for (x, b) in psi.iter_mut().zip(v) {
                        *x += c * b;
                    }
                }
                elapsed += step;
                stats.substeps += 1;
                // grow the step when comfortably inside the budget
                dt = if err < 0.1 * budget { step * 1.5 } else { step };
                break;
            }
            step *= 0.5;
            if step < t * 1e-14 {
                return Err(Error::Integration("Krylov step size underflow".into()));
            }
        }
    }
    Ok(())
}
