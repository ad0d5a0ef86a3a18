//! Fourier coefficients of homogeneous kernels: the coefficient
//! gamma_{n,m,lambda} of Q(x)/|x|^{n+m-lambda} for harmonic homogeneous
//! Q of degree m, and the symbol of a polynomial kernel on the unit
//! sphere.

use super::{harmonic_decompose, HomogeneousPoly};
use crate::error::{Error, Result};
use num::rational::BigRational;
use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

/// Area of the unit sphere S^{n-1}: omega_{n-1} = 2 pi^{n/2} / Gamma(n/2).
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// gamma_{n,m,lambda} = (-1)^{3m/2} pi^{n/2} 2^lambda
/// Gamma(m/2 + lambda/2) / Gamma(m/2 + n/2 - lambda/2), with the root
/// of unity evaluated as exp(i 3 pi m / 2). Valid for lambda < n.
pub fn gamma_coefficient(n: usize, m: usize, lambda: f64) -> Result<Complex64> {
    if lambda >= n as f64 {
        return Err(Error::Kernel(format!(
            "lambda={lambda} outside the validity window lambda < n={n}"
        )));
    }
    let num_arg = m as f64 / 2.0 + lambda / 2.0;
    let den_arg = m as f64 / 2.0 + n as f64 / 2.0 - lambda / 2.0;
    if num_arg <= 0.0 {
        return Err(Error::GammaPole(num_arg));
    }
    if den_arg <= 0.0 {
        return Err(Error::GammaPole(den_arg));
    }
    let phase = match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    // magnitude via log-gamma so large degrees do not overflow
    let ln_mag = (n as f64 / 2.0) * PI.ln() + lambda * 2.0f64.ln() + ln_gamma(num_arg)
        - ln_gamma(den_arg);
    Ok(phase * ln_mag.exp())
}

/// Symbol k^(xi) of the kernel P(x)/|x|^{n-1+l} at a unit vector xi.
/// Harmonic P of degree l contributes gamma_{n,l,1} P(xi); general
/// homogeneous P is harmonically decomposed first and the symbols are
/// summed termwise with degrees l - 2(j-1).
pub fn kernel_symbol(
    p: &HomogeneousPoly<BigRational>,
    xi: &[f64],
) -> Result<Complex64> {
    let n = p.n();
    let r: f64 = xi.iter().take(n).map(|v| v * v).sum::<f64>().sqrt();
    if (r - 1.0).abs() > 1e-10 {
        return Err(Error::Kernel(format!("|xi| = {r}, expected a unit vector")));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (_, part) in harmonic_decompose(p)? {
        let h = part.degree();
        total += gamma_coefficient(n, h, 1.0)? * part.eval(xi);
    }
    Ok(total)
}
