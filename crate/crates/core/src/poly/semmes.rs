//! The Semmes decomposition: for an odd harmonic homogeneous
//! polynomial P of degree l, a family of Clifford-vector-valued
//! functions k_rs, homogeneous of degree -(n-1), with
//! sum_{r,s} [k_rs]_s = P(x)/|x|^{n-1+l} and D_R k_rs a pure
//! r-derivative.

use super::gamma::gamma_coefficient;
use super::{harmonic_decompose, HomogeneousPoly};
use crate::clifford::{blade_mul, BladeIndex};
use crate::error::{Error, Result};
use num::rational::BigRational;
use num_complex::Complex64;
use num_traits::One;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// A term scalar * N(x) / |x|^p with exact-rational numerator N.
#[derive(Clone, Debug)]
pub struct RationalHomogeneous {
    pub numerator: HomogeneousPoly<BigRational>,
    pub radial_power: i64,
    pub scalar: Complex64,
}

impl RationalHomogeneous {
    pub fn new(
        numerator: HomogeneousPoly<BigRational>,
        radial_power: i64,
        scalar: Complex64,
    ) -> Self {
        RationalHomogeneous {
            numerator,
            radial_power,
            scalar,
        }
    }

    /// Homogeneity degree deg(N) - p.
    pub fn homogeneity(&self) -> i64 {
        self.numerator.degree() as i64 - self.radial_power
    }

    /// d/dx_r of N/|x|^p = ((d_r N) |x|^2 - p x_r N) / |x|^{p+2};
    /// exact on the numerator, scalar untouched.
    pub fn partial(&self, r: usize) -> Result<Self> {
        let n = self.numerator.n();
        let r2 = HomogeneousPoly::<BigRational>::radial_sq(n);
        let mut xr = vec![0u8; n];
        xr[r] = 1;
        let xr = HomogeneousPoly::monomial(n, &xr, BigRational::one())?;
        let a = self.numerator.partial(r).mul(&r2)?;
        let b = xr
            .mul(&self.numerator)?
            .scale(&BigRational::from_integer(self.radial_power.into()));
        let numerator = if a.is_zero() {
            b.neg()
        } else if b.is_zero() {
            a
        } else {
            a.sub(&b)?
        };
        Ok(RationalHomogeneous {
            numerator,
            radial_power: self.radial_power + 2,
            scalar: self.scalar,
        })
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let n = self.numerator.n();
        let r: f64 = x.iter().take(n).map(|v| v * v).sum::<f64>().sqrt();
        self.scalar * (self.numerator.eval(x) / r.powi(self.radial_power as i32))
    }
}

/// A finite sum of `RationalHomogeneous` terms of equal homogeneity.
#[derive(Clone, Debug, Default)]
pub struct RationalSum {
    pub terms: Vec<RationalHomogeneous>,
}

impl RationalSum {
    pub fn zero() -> Self {
        RationalSum { terms: Vec::new() }
    }

    pub fn single(t: RationalHomogeneous) -> Self {
        RationalSum { terms: vec![t] }
    }

    pub fn push(&mut self, t: RationalHomogeneous) {
        if !t.numerator.is_zero() && t.scalar.norm() != 0.0 {
            self.terms.push(t);
        }
    }

    pub fn partial(&self, r: usize) -> Result<Self> {
        let mut out = RationalSum::zero();
        for t in &self.terms {
            out.push(t.partial(r)?);
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn homogeneity(&self) -> Option<i64> {
        self.terms.first().map(|t| t.homogeneity())
    }
}

/// The full decomposition attached to a source polynomial P.
pub struct SemmesFamily {
    pub n: usize,
    pub l: usize,
    pub p: HomogeneousPoly<BigRational>,
    /// P_rs = (1/(l(l-1))) d_r d_s P, degree l-2, harmonic.
    pub prs: Vec<Vec<HomogeneousPoly<BigRational>>>,
    /// krs[r][s][j] = coefficient of e_{j+1} in k_rs.
    pub krs: Vec<Vec<Vec<RationalSum>>>,
}

/// Builds the Semmes family for an odd harmonic homogeneous P of
/// degree l >= 3. For n >= 3 the components come from symbolic
/// differentiation of P_rs/|x|^{n+l-5}; for n = 2 they come from the
/// inverse Fourier transform of xi_r xi_j P_rs(xi)/|xi|^{l+1},
/// harmonically decomposed termwise with coefficients 1/gamma_{2,h,1}
/// and prefactor (-1)^{3l/2} 2 pi.
pub fn semmes_decompose(p: &HomogeneousPoly<BigRational>, n: usize) -> Result<SemmesFamily> {
    if p.n() != n {
        return Err(Error::DimensionMismatch(p.n(), n));
    }
    let l = p.degree();
    if l < 3 || l % 2 == 0 {
        return Err(Error::InvalidPoly(format!(
            "need odd degree >= 3, got {l}"
        )));
    }
    if !p.laplacian().is_zero() {
        return Err(Error::InvalidPoly("polynomial is not harmonic".into()));
    }
    if n < 2 {
        return Err(Error::UnsupportedDimension(n, 2));
    }
    let ll = BigRational::from_integer(((l * (l - 1)) as i64).into());
    let inv_ll = BigRational::one() / ll;
    let mut prs = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(n);
        for s in 0..n {
            row.push(p.partial(r).partial(s).scale(&inv_ll));
        }
        prs.push(row);
    }
    let krs = if n >= 3 {
        krs_direct(&prs, n, l)?
    } else {
        krs_fourier(&prs, l)?
    };
    Ok(SemmesFamily {
        n,
        l,
        p: p.clone(),
        prs,
        krs,
    })
}

/// n >= 3 path: k_rs = (1/((n+l-3)(n+l-5))) sum_j d_r d_j
/// (P_rs/|x|^{n+l-5}) e_j.
fn krs_direct(
    prs: &[Vec<HomogeneousPoly<BigRational>>],
    n: usize,
    l: usize,
) -> Result<Vec<Vec<Vec<RationalSum>>>> {
    let denom = ((n + l - 3) * (n + l - 5)) as f64;
    let scalar = Complex64::new(1.0 / denom, 0.0);
    let mut out = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(n);
        for s in 0..n {
            let mut comps = Vec::with_capacity(n);
            for j in 0..n {
                if prs[r][s].is_zero() {
                    comps.push(RationalSum::zero());
                    continue;
                }
                let base = RationalHomogeneous::new(
                    prs[r][s].clone(),
                    (n + l - 5) as i64,
                    scalar,
                );
                comps.push(RationalSum::single(base.partial(j)?.partial(r)?));
            }
            row.push(comps);
        }
        out.push(row);
    }
    Ok(out)
}

/// n = 2 path: component j of k_rs is
/// (-1)^{3l/2} 2 pi sum_t Q_t(x) / (gamma_{2,h_t,1} |x|^{h_t+1})
/// where xi_r xi_j P_rs(xi) = sum_t |xi|^{2(t-1)} Q_t(xi).
fn krs_fourier(
    prs: &[Vec<HomogeneousPoly<BigRational>>],
    l: usize,
) -> Result<Vec<Vec<Vec<RationalSum>>>> {
    let n = 2usize;
    // exp(i 3 pi l / 2) for odd l
    let prefactor = match l % 4 {
        1 => Complex64::new(0.0, -1.0),
        3 => Complex64::new(0.0, 1.0),
        _ => unreachable!("degree checked odd"),
    } * 2.0
        * PI;
    let mut out = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(n);
        for s in 0..n {
            let mut comps = Vec::with_capacity(n);
            for j in 0..n {
                let mut sum = RationalSum::zero();
                if !prs[r][s].is_zero() {
                    let mut xr = vec![0u8; n];
                    xr[r] += 1;
                    let mut g = HomogeneousPoly::monomial(n, &xr, BigRational::one())?;
                    let mut xj = vec![0u8; n];
                    xj[j] += 1;
                    g = g.mul(&HomogeneousPoly::monomial(n, &xj, BigRational::one())?)?;
                    g = g.mul(&prs[r][s])?;
                    for (_, q) in harmonic_decompose(&g)? {
                        let h = q.degree();
                        let gam = gamma_coefficient(n, h, 1.0)?;
                        sum.push(RationalHomogeneous::new(
                            q,
                            (h + 1) as i64,
                            prefactor / gam,
                        ));
                    }
                }
                comps.push(sum);
            }
            row.push(comps);
        }
        out.push(row);
    }
    Ok(out)
}

/// Residual report for the two defining identities, evaluated at
/// sample points.
pub struct SemmesResiduals {
    /// max |sum_{r,s} [k_rs(x)]_s - P(x)/|x|^{n-1+l}|
    pub pro1: f64,
    /// max over r,s of |scalar(D_R k_rs) - ((l-1)/(n+l-3))
    /// d_r(P_rs/|x|^{n+l-3})| plus any non-scalar blade residue
    pub pro2: f64,
    /// largest imaginary residue encountered in any evaluation
    pub imag: f64,
}

impl SemmesFamily {
    /// Evaluates k_rs at a point; returns the n vector components.
    pub fn eval_krs(&self, r: usize, s: usize, x: &[f64]) -> Vec<Complex64> {
        (0..self.n).map(|j| self.krs[r][s][j].eval(x)).collect()
    }

    pub fn residuals(&self, points: &[Vec<f64>]) -> Result<SemmesResiduals> {
        let mut pro1 = 0.0f64;
        let mut imag = 0.0f64;
        for x in points {
            let r_norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut total = Complex64::new(0.0, 0.0);
            for r in 0..self.n {
                for s in 0..self.n {
                    total += self.krs[r][s][s].eval(x);
                }
            }
            let target = self.p.eval(x) / r_norm.powi((self.n - 1 + self.l) as i32);
            pro1 = pro1.max((total.re - target).abs());
            imag = imag.max(total.im.abs());
        }
        let pro2 = self.pro2_residual(points, &mut imag)?;
        Ok(SemmesResiduals { pro1, pro2, imag })
    }

    /// D_R k_rs = sum_{m,j} d_j(k_rs_m) e_m ⊙ e_j, computed
    /// symbolically blade by blade, compared against
    /// ((l-1)/(n+l-3)) d_r (P_rs/|x|^{n+l-3}).
    fn pro2_residual(&self, points: &[Vec<f64>], imag: &mut f64) -> Result<f64> {
        let factor = (self.l - 1) as f64 / (self.n + self.l - 3) as f64;
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for s in 0..self.n {
                // accumulate D_R by blade mask
                let mut blades: BTreeMap<u32, RationalSum> = BTreeMap::new();
                for m in 0..self.n {
                    let em = BladeIndex::new(&[m + 1], self.n)?;
                    for j in 0..self.n {
                        let d = self.krs[r][s][m].partial(j)?;
                        if d.terms.is_empty() {
                            continue;
                        }
                        let ej = BladeIndex::new(&[j + 1], self.n)?;
                        let (sign, target) = blade_mul(em, ej);
                        let entry = blades.entry(target.mask()).or_insert_with(RationalSum::zero);
                        for mut t in d.terms {
                            t.scalar *= sign as f64;
                            entry.push(t);
                        }
                    }
                }
                let target_fn = RationalHomogeneous::new(
                    self.prs[r][s].clone(),
                    (self.n + self.l - 3) as i64,
                    Complex64::new(factor, 0.0),
                )
                .partial(r)?;
                for x in points {
                    for (mask, sum) in &blades {
                        let v = sum.eval(x);
                        *imag = imag.max(v.im.abs());
                        if *mask == 0 {
                            let t = target_fn.eval(x);
                            worst = worst.max((v.re - t.re).abs());
                        } else {
                            worst = worst.max(v.re.abs());
                        }
                    }
                }
            }
        }
        Ok(worst)
    }
}
