//! Expansion of kernels restricted to S^{n-1} in surface spherical
//! harmonics (Fourier modes on the circle, real spherical harmonics on
//! the sphere), the Laplace-Beltrami eigenrelation, and the weighted
//! summability diagnostic with schedule m_l.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// One spherical-harmonic mode. On S^1 the coefficients are [a_l, b_l]
/// for a_l cos(l t) + b_l sin(l t) (just [a_0] for l = 0); on S^2 they
/// are the 2l+1 coefficients of the orthonormal real harmonics
/// Y_{l,-l..l}.
#[derive(Clone, Debug)]
pub struct Mode {
    pub l: usize,
    pub coeffs: Vec<f64>,
}

/// Schedule of Laplacian powers m_l used by the summability weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MSchedule {
    /// m_l = l^2, the choice that makes the weighted series converge
    /// for smooth kernels.
    LSquared,
    /// Constant m_l.
    Constant(u32),
}

impl MSchedule {
    pub fn m(&self, l: usize) -> u64 {
        match self {
            MSchedule::LSquared => (l * l) as u64,
            MSchedule::Constant(c) => *c as u64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SphericalExpansion {
    pub n: usize,
    pub modes: Vec<Mode>,
    pub l_max: usize,
}

impl SphericalExpansion {
    /// Builds a synthetic expansion directly from (l, coefficient)
    /// pairs; on S^1 the coefficient multiplies cos(l t), on S^2 the
    /// zonal harmonic Y_{l,0}.
    pub fn from_modes(n: usize, pairs: &[(usize, f64)]) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Expansion(format!("unsupported dimension {n}")));
        }
        let l_max = pairs.iter().map(|&(l, _)| l).max().unwrap_or(0);
        let mut modes = Vec::new();
        for l in 0..=l_max {
            let width = if n == 2 {
                if l == 0 {
                    1
                } else {
                    2
                }
            } else {
                2 * l + 1
            };
            let mut coeffs = vec![0.0; width];
            for &(pl, c) in pairs {
                if pl == l {
                    if n == 2 {
                        coeffs[0] += c;
                    } else {
                        coeffs[l] += c;
                    }
                }
            }
            modes.push(Mode { l, coeffs });
        }
        Ok(SphericalExpansion { n, modes, l_max })
    }

    /// Eigenvalue magnitude of the Laplace-Beltrami operator on degree
    /// l: Delta_S Y_l = -l(l+n-2) Y_l.
    pub fn eigenvalue(&self, l: usize) -> f64 {
        (l * (l + self.n - 2)) as f64
    }

    /// L^2(S^{n-1}) norm of the degree-l part.
    pub fn mode_norm(&self, l: usize) -> f64 {
        let mode = &self.modes[l];
        debug_assert_eq!(mode.l, l);
        if self.n == 2 {
            if l == 0 {
                mode.coeffs[0].abs() * (2.0 * PI).sqrt()
            } else {
                (PI * (mode.coeffs[0].powi(2) + mode.coeffs[1].powi(2))).sqrt()
            }
        } else {
            mode.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
        }
    }

    pub fn total_l2(&self) -> f64 {
        (0..=self.l_max)
            .map(|l| self.mode_norm(l).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest norm among even-degree parts (including l = 0); must be
    /// at noise level for an odd kernel.
    pub fn even_mode_residual(&self) -> f64 {
        (0..=self.l_max)
            .step_by(2)
            .map(|l| self.mode_norm(l))
            .fold(0.0, f64::max)
    }

    /// Evaluates the truncated series on S^1 at angle t (n = 2 only).
    pub fn eval_circle(&self, t: f64) -> f64 {
        assert_eq!(self.n, 2);
        let mut v = 0.0;
        for mode in &self.modes {
            if mode.l == 0 {
                v += mode.coeffs[0];
            } else {
                let lt = mode.l as f64 * t;
                v += mode.coeffs[0] * lt.cos() + mode.coeffs[1] * lt.sin();
            }
        }
        v
    }

    /// Evaluates the truncated series at a unit vector on S^2 (n = 3).
    pub fn eval_sphere(&self, x: &[f64; 3]) -> f64 {
        assert_eq!(self.n, 3);
        let mut v = 0.0;
        for mode in &self.modes {
            let l = mode.l as i64;
            for (idx, c) in mode.coeffs.iter().enumerate() {
                if *c != 0.0 {
                    v += c * real_sph_harm(mode.l, idx as i64 - l, x);
                }
            }
        }
        v
    }
}

/// Discrete Fourier analysis of equispaced samples on the circle
/// (angles 2 pi i / N). The grid must resolve the truncation degree:
/// N >= 4 L_max.
pub fn expand_circle(samples: &[f64], l_max: usize) -> Result<SphericalExpansion> {
    let n = samples.len();
    if n < 4 * l_max.max(1) {
        return Err(Error::Expansion(format!(
            "aliasing guard: {n} samples cannot resolve degree {l_max} (need >= {})",
            4 * l_max
        )));
    }
    let mut modes = Vec::with_capacity(l_max + 1);
    let mean = samples.iter().sum::<f64>() / n as f64;
    modes.push(Mode {
        l: 0,
        coeffs: vec![mean],
    });
    for l in 1..=l_max {
        let mut a = 0.0;
        let mut b = 0.0;
        for (i, f) in samples.iter().enumerate() {
            let t = 2.0 * PI * i as f64 / n as f64 * l as f64;
            a += f * t.cos();
            b += f * t.sin();
        }
        modes.push(Mode {
            l,
            coeffs: vec![2.0 * a / n as f64, 2.0 * b / n as f64],
        });
    }
    Ok(SphericalExpansion {
        n: 2,
        modes,
        l_max,
    })
}

/// Normalized associated Legendre function \bar P_l^m(x) such that
/// Y_{l,0} = \bar P_l^0 and Y_{l,+-m} = sqrt(2) \bar P_l^m {cos,sin}(m t)
/// are orthonormal on S^2.
fn legendre_norm(l: usize, m: usize, x: f64) -> f64 {
    debug_assert!(m <= l);
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= -((2.0 * k as f64 + 1.0) / (2.0 * k as f64)).sqrt() * somx2;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut p = 0.0;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        p = a * (x * pm1 - b * pmm);
        pmm = pm1;
        pm1 = p;
    }
    p
}

/// Real orthonormal spherical harmonic Y_{l,m} at a unit vector,
/// m in -l..=l (negative m are the sine harmonics).
pub fn real_sph_harm(l: usize, m: i64, x: &[f64; 3]) -> f64 {
    let ct = x[2].clamp(-1.0, 1.0);
    let theta = x[1].atan2(x[0]);
    let ma = m.unsigned_abs() as usize;
    let p = legendre_norm(l, ma, ct);
    if m == 0 {
        p
    } else if m > 0 {
        2.0f64.sqrt() * p * (ma as f64 * theta).cos()
    } else {
        2.0f64.sqrt() * p * (ma as f64 * theta).sin()
    }
}

/// Quadrature projection of samples on the lat-long sphere grid of
/// `crate::boundary::make_sphere` (unit radius, node index
/// p * ntheta + t) onto real spherical harmonics.
pub fn expand_sphere(
    nphi: usize,
    ntheta: usize,
    samples: &[f64],
    l_max: usize,
) -> Result<SphericalExpansion> {
    if samples.len() != nphi * ntheta {
        return Err(Error::Expansion(format!(
            "expected {} samples, got {}",
            nphi * ntheta,
            samples.len()
        )));
    }
    if ntheta < 4 * l_max.max(1) || nphi < 2 * l_max.max(1) {
        return Err(Error::Expansion(format!(
            "aliasing guard: {nphi}x{ntheta} grid cannot resolve degree {l_max}"
        )));
    }
    let dphi = PI / nphi as f64;
    let dtheta = 2.0 * PI / ntheta as f64;
    let mut modes = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut coeffs = vec![0.0; 2 * l + 1];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let m = idx as i64 - l as i64;
            let mut acc = 0.0;
            for p in 0..nphi {
                let phi = (p as f64 + 0.5) * dphi;
                let w_row = phi.sin() * dphi * dtheta;
                for t in 0..ntheta {
                    let theta = t as f64 * dtheta;
                    let x = [
                        phi.sin() * theta.cos(),
                        phi.sin() * theta.sin(),
                        phi.cos(),
                    ];
                    acc += samples[p * ntheta + t] * real_sph_harm(l, m, &x) * w_row;
                }
            }
            *c = acc;
        }
        modes.push(Mode { l, coeffs });
    }
    Ok(SphericalExpansion {
        n: 3,
        modes,
        l_max,
    })
}

#[derive(Clone, Debug)]
pub struct SummabilityRow {
    pub l: usize,
    pub m_l: u64,
    /// Natural log of the weighted term 4^{l^2} l^{-2 m_l}
    /// ||Delta^{m_l} k||_2 (scaled by the constant).
    pub ln_term: f64,
    /// The term itself when representable in double precision.
    pub term: f64,
}

#[derive(Clone, Debug)]
pub struct SummabilityReport {
    pub rows: Vec<SummabilityRow>,
    /// log of the sum of all terms (-inf for the zero kernel).
    pub ln_total: f64,
    pub convergent: bool,
}

fn log_sum_exp(vals: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = vals.filter(|v| v.is_finite()).collect();
    if vals.is_empty() {
        return f64::NEG_INFINITY;
    }
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Weighted summability diagnostic: per-l terms
/// c 4^{l^2} l^{-2 m_l} ||Delta^{m_l} k||_{L^2(S^{n-1})}, computed in
/// log space (the weights overflow double precision immediately), plus
/// a convergence verdict from the tail behavior.
pub fn summability_report(
    expansion: &SphericalExpansion,
    c: f64,
    schedule: MSchedule,
) -> SummabilityReport {
    // log of ||Delta^m k||_2^2 = sum_l lambda_l^{2m} ||Y_l||^2
    let mode_ln: Vec<(f64, f64)> = (1..=expansion.l_max)
        .filter(|&l| expansion.mode_norm(l) > 0.0)
        .map(|l| (expansion.eigenvalue(l).ln(), expansion.mode_norm(l).ln()))
        .collect();
    let mut rows = Vec::new();
    for l in 1..=expansion.l_max {
        let m_l = schedule.m(l);
        let ln_norm = 0.5
            * log_sum_exp(
                mode_ln
                    .iter()
                    .map(|&(ln_lam, ln_y)| 2.0 * m_l as f64 * ln_lam + 2.0 * ln_y),
            );
        let lf = l as f64;
        let ln_term = c.ln() + lf * lf * 4.0f64.ln() - 2.0 * m_l as f64 * lf.ln() + ln_norm;
        rows.push(SummabilityRow {
            l,
            m_l,
            ln_term,
            term: ln_term.exp(),
        });
    }
    let finite: Vec<f64> = rows.iter().map(|r| r.ln_term).collect();
    let ln_total = log_sum_exp(finite.iter().cloned());
    // tail verdict: the last increments must all be decreases
    let convergent = if finite.iter().all(|v| *v == f64::NEG_INFINITY) {
        true
    } else {
        let tail = finite.len().saturating_sub(3);
        finite
            .windows(2)
            .skip(tail.saturating_sub(1))
            .all(|w| w[1] < w[0])
    };
    SummabilityReport {
        rows,
        ln_total,
        convergent,
    }
}
