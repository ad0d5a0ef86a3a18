//! Kernel specifications: odd kernels, positively homogeneous of
//! degree -(n-1) — a Riesz component, a polynomial kernel
//! P(x)/|x|^{n-1+l}, or a truncated spherical-harmonic series.

use crate::error::{Error, Result};
use crate::poly::{
    gamma_coefficient, kernel_symbol, sphere_area, HomogeneousPoly, SphericalExpansion,
};
use crate::{RationalPoly, RealPoly};
use num::rational::BigRational;
use num_complex::Complex64;
use num_traits::One;

#[derive(Clone, Debug)]
pub enum KernelSpec {
    /// (x_j - y_j) / (omega_{n-1} |x-y|^n), 0-based component.
    Riesz { j: usize },
    /// P(x-y)/|x-y|^{n-1+l}; P odd homogeneous of degree l, kept
    /// exactly for the symbol path and as floats for quadrature.
    Poly {
        p: RationalPoly,
        pf: RealPoly,
        l: usize,
    },
    /// Truncated series sum_l P_l(x)/|x|^{n-1+l} built from circle
    /// Fourier modes (n = 2 only): P_l = a_l Re z^l + b_l Im z^l.
    Series { modes: Vec<(usize, RealPoly)> },
}

impl KernelSpec {
    pub fn riesz(j: usize) -> Self {
        KernelSpec::Riesz { j }
    }

    pub fn poly(p: RationalPoly) -> Result<Self> {
        let l = p.degree();
        if l % 2 == 0 {
            return Err(Error::Kernel(format!(
                "kernel polynomial must have odd degree, got {l}"
            )));
        }
        let pf = p.to_f64();
        Ok(KernelSpec::Poly { p, pf, l })
    }

    /// Assembles the polynomial modes of a circle expansion; even
    /// degrees must be at noise level (odd kernel).
    pub fn series_from_expansion(exp: &SphericalExpansion) -> Result<Self> {
        if exp.n != 2 {
            return Err(Error::Kernel(
                "series kernels are only supported on the circle".into(),
            ));
        }
        let noise = 1e-8 * exp.total_l2().max(1.0);
        if exp.even_mode_residual() > noise {
            return Err(Error::Kernel(format!(
                "expansion has even-degree content {:.3e}; kernel must be odd",
                exp.even_mode_residual()
            )));
        }
        let mut modes = Vec::new();
        for l in (1..=exp.l_max).step_by(2) {
            let a = exp.modes[l].coeffs[0];
            let b = exp.modes[l].coeffs[1];
            if a == 0.0 && b == 0.0 {
                continue;
            }
            modes.push((l, plane_harmonic(l, a, b)));
        }
        Ok(KernelSpec::Series { modes })
    }

    /// Evaluates the kernel at a displacement d in R^n.
    pub fn eval(&self, n: usize, d: &[f64; 3]) -> f64 {
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let r = r2.sqrt();
        match self {
            KernelSpec::Riesz { j } => d[*j] / (sphere_area(n) * r.powi(n as i32)),
            KernelSpec::Poly { pf, l, .. } => {
                pf.eval(d) / r.powi((n - 1 + l) as i32)
            }
            KernelSpec::Series { modes } => modes
                .iter()
                .map(|(l, p)| p.eval(d) / r.powi((n - 1 + l) as i32))
                .sum(),
        }
    }

    /// Spot-checks oddness and homogeneity of degree -(n-1) at random
    /// displacements.
    pub fn validate(&self, n: usize, samples: &[[f64; 3]]) -> Result<()> {
        for d in samples {
            let v = self.eval(n, d);
            let vm = self.eval(n, &[-d[0], -d[1], -d[2]]);
            let lam = 1.7;
            let vl = self.eval(n, &[lam * d[0], lam * d[1], lam * d[2]]);
            let scale = v.abs().max(1.0);
            if (v + vm).abs() > 1e-10 * scale {
                return Err(Error::Kernel("kernel fails oddness check".into()));
            }
            if (vl - v * lam.powi(1 - n as i32)).abs() > 1e-10 * scale {
                return Err(Error::Kernel("kernel fails homogeneity check".into()));
            }
        }
        Ok(())
    }

    /// Jump factor (1/2i) k^(nu) of the boundary trace; the imaginary
    /// residue must vanish for an odd real kernel.
    pub fn jump_symbol(&self, n: usize, nu: &[f64]) -> Result<f64> {
        let symbol: Complex64 = match self {
            KernelSpec::Riesz { j } => {
                let mut e = vec![0u8; n];
                e[*j] = 1;
                let xj = HomogeneousPoly::monomial(n, &e, BigRational::one())?;
                kernel_symbol(&xj, nu)? / sphere_area(n)
            }
            KernelSpec::Poly { p, .. } => kernel_symbol(p, nu)?,
            KernelSpec::Series { modes } => {
                let mut total = Complex64::new(0.0, 0.0);
                for (l, pf) in modes {
                    total += gamma_coefficient(2, *l, 1.0)? * pf.eval(&[nu[0], nu[1], 0.0]);
                }
                total
            }
        };
        // (1/2i) z = -i z / 2
        let jump = Complex64::new(0.0, -0.5) * symbol;
        if jump.im.abs() > 1e-10 * (1.0 + jump.norm()) {
            return Err(Error::Kernel(format!(
                "jump symbol has imaginary residue {:.3e}",
                jump.im
            )));
        }
        Ok(jump.re)
    }
}

/// a Re[(x1 + i x2)^l] + b Im[(x1 + i x2)^l] as a polynomial: the
/// degree-l harmonic polynomials on the plane.
pub fn plane_harmonic(l: usize, a: f64, b: f64) -> RealPoly {
    let mut binom = vec![1.0f64];
    for _ in 0..l {
        let mut next = vec![1.0];
        for i in 1..binom.len() {
            next.push(binom[i - 1] + binom[i]);
        }
        next.push(1.0);
        binom = next;
    }
    let mut terms = Vec::new();
    for k in 0..=l {
        // i^k = (re, im) cycling 1, i, -1, -i
        let (re, im) = match k % 4 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        let c = binom[k] * (a * re + b * im);
        if c != 0.0 {
            terms.push((vec![(l - k) as u8, k as u8], c));
        }
    }
    HomogeneousPoly::from_terms(2, l, terms).expect("degrees consistent by construction")
}
