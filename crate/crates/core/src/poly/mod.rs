//! Exact symbolic machinery for homogeneous polynomials: calculus,
//! harmonic decomposition, the Semmes kernel families, Fourier
//! coefficients of homogeneous kernels, and spherical-harmonic
//! expansion with the summability diagnostic.

mod gamma;
mod semmes;
mod spherical;

pub use gamma::{gamma_coefficient, kernel_symbol, sphere_area};
pub use semmes::{semmes_decompose, RationalHomogeneous, RationalSum, SemmesFamily};
pub use spherical::{
    expand_circle, expand_sphere, real_sph_harm, summability_report, MSchedule, Mode,
    SphericalExpansion, SummabilityReport, SummabilityRow,
};

use crate::error::{Error, Result};
use num::rational::BigRational;
use num::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Scalar requirements for polynomial coefficients.
pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + ToPrimitive
{
    fn from_integer(k: i64) -> Self;
}

impl Coeff for BigRational {
    fn from_integer(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
}

impl Coeff for f64 {
    fn from_integer(k: i64) -> Self {
        k as f64
    }
}

/// A homogeneous polynomial in n variables: a map from exponent
/// multi-indices of fixed total degree to coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct HomogeneousPoly<T> {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<u8>, T>,
}

impl<T: Coeff> HomogeneousPoly<T> {
    pub fn zero(n: usize, degree: usize) -> Self {
        HomogeneousPoly {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: usize, exps: &[u8], coeff: T) -> Result<Self> {
        if exps.len() != n {
            return Err(Error::InvalidPoly(format!(
                "exponent vector length {} != n={}",
                exps.len(),
                n
            )));
        }
        let degree = exps.iter().map(|&e| e as usize).sum();
        let mut p = Self::zero(n, degree);
        if !coeff.is_zero() {
            p.terms.insert(exps.to_vec(), coeff);
        }
        Ok(p)
    }

    pub fn from_terms<I>(n: usize, degree: usize, iter: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, T)>,
    {
        let mut p = Self::zero(n, degree);
        for (e, c) in iter {
            if e.len() != n || e.iter().map(|&x| x as usize).sum::<usize>() != degree {
                return Err(Error::InvalidPoly(format!(
                    "term {e:?} does not have degree {degree}"
                )));
            }
            if !c.is_zero() {
                let entry = p.terms.entry(e).or_insert_with(T::zero);
                *entry = entry.clone() + c;
            }
        }
        p.prune();
        Ok(p)
    }

    /// The polynomial |x|^2 = x_1^2 + ... + x_n^2.
    pub fn radial_sq(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        for j in 0..n {
            let mut e = vec![0u8; n];
            e[j] = 2;
            terms.insert(e, T::one());
        }
        HomogeneousPoly {
            n,
            degree: 2,
            terms,
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u8]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    /// Partial derivative in variable `r` (0-based).
    pub fn partial(&self, r: usize) -> Self {
        assert!(r < self.n, "variable index out of range");
        let mut out = Self::zero(self.n, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[r] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[r] -= 1;
            let scaled = c.clone() * T::from_integer(e[r] as i64);
            let entry = out.terms.entry(e2).or_insert_with(T::zero);
            *entry = entry.clone() + scaled;
        }
        out.prune();
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree.saturating_sub(2));
        if self.degree < 2 {
            return out;
        }
        for (e, c) in &self.terms {
            for r in 0..self.n {
                if e[r] < 2 {
                    continue;
                }
                let mut e2 = e.clone();
                e2[r] -= 2;
                let k = e[r] as i64;
                let scaled = c.clone() * T::from_integer(k * (k - 1));
                let entry = out.terms.entry(e2).or_insert_with(T::zero);
                *entry = entry.clone() + scaled;
            }
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let mut out = Self::zero(self.n, self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let prod = ca.clone() * cb.clone();
                let entry = out.terms.entry(e).or_insert_with(T::zero);
                *entry = entry.clone() + prod;
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || (!self.is_zero() && !other.is_zero() && self.degree != other.degree)
        {
            return Err(Error::InvalidPoly(
                "cannot add polynomials of different shape".into(),
            ));
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (e, c) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(T::zero);
            *entry = entry.clone() + c.clone();
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone() * s.clone();
        }
        out.prune();
        out
    }

    /// Evaluation in double precision.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert!(x.len() >= self.n);
        let mut total = 0.0;
        for (e, c) in &self.terms {
            let mut m = c.to_f64().expect("coefficient not representable");
            for (j, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    m *= x[j];
                }
            }
            total += m;
        }
        total
    }

    /// Is the polynomial odd (all monomial degrees odd)? For a
    /// homogeneous polynomial this is just parity of the degree.
    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

impl HomogeneousPoly<BigRational> {
    pub fn to_f64(&self) -> HomogeneousPoly<f64> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.to_f64().unwrap()))
            .collect();
        HomogeneousPoly {
            n: self.n,
            degree: self.degree,
            terms,
        }
    }
}

impl fmt::Display for HomogeneousPoly<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c < &BigRational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(j, &p)| {
                    if p == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{}", j + 1, p)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Parses monomial-string literals such as `"x1^2*x2 - 3*x3^3"` into an
/// exact homogeneous polynomial in n variables. Coefficients may be
/// integers or fractions `p/q`.
pub fn parse_poly(n: usize, input: &str) -> Result<HomogeneousPoly<BigRational>> {
    let s = input.replace(' ', "");
    if s.is_empty() {
        return Err(Error::PolyParse("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !matches!(s.as_bytes()[i - 1], b'+' | b'-' | b'/' | b'^' | b'*') {
            terms.push((sign, std::mem::take(&mut cur)));
            sign = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() && terms.is_empty() && i == 0 {
            sign = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    terms.push((sign, cur));

    let mut parsed: Vec<(Vec<u8>, BigRational)> = Vec::new();
    let mut degree: Option<usize> = None;
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(Error::PolyParse("dangling sign".into()));
        }
        let mut coeff = BigRational::one();
        let mut exps = vec![0u8; n];
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(Error::PolyParse(format!("empty factor in '{term}'")));
            }
            if let Some(rest) = factor.strip_prefix('x') {
                let (var, pow) = match rest.split_once('^') {
                    Some((v, p)) => (v, p),
                    None => (rest, "1"),
                };
                let v: usize = var
                    .parse()
                    .map_err(|_| Error::PolyParse(format!("bad variable '{factor}'")))?;
                if v < 1 || v > n {
                    return Err(Error::PolyParse(format!(
                        "variable x{v} out of range for n={n}"
                    )));
                }
                let p: u8 = pow
                    .parse()
                    .map_err(|_| Error::PolyParse(format!("bad exponent '{factor}'")))?;
                exps[v - 1] += p;
            } else {
                let r = if let Some((num, den)) = factor.split_once('/') {
                    let num: BigInt = num
                        .parse()
                        .map_err(|_| Error::PolyParse(format!("bad coefficient '{factor}'")))?;
                    let den: BigInt = den
                        .parse()
                        .map_err(|_| Error::PolyParse(format!("bad coefficient '{factor}'")))?;
                    if den.is_zero() {
                        return Err(Error::PolyParse("zero denominator".into()));
                    }
                    BigRational::new(num, den)
                } else {
                    let k: BigInt = factor
                        .parse()
                        .map_err(|_| Error::PolyParse(format!("bad coefficient '{factor}'")))?;
                    BigRational::from_integer(k)
                };
                coeff *= r;
            }
        }
        if neg {
            coeff = -coeff;
        }
        let d = exps.iter().map(|&e| e as usize).sum();
        match degree {
            None => degree = Some(d),
            Some(d0) if d0 != d => {
                return Err(Error::PolyParse(format!(
                    "not homogeneous: degrees {d0} and {d}"
                )))
            }
            _ => {}
        }
        parsed.push((exps, coeff));
    }
    HomogeneousPoly::from_terms(n, degree.unwrap(), parsed)
}

/// All exponent multi-indices of total degree d in n variables, in
/// lexicographic order.
pub fn monomials(n: usize, d: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; n];
    fn rec(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: usize) {
        if pos + 1 == cur.len() {
            cur[pos] = left as u8;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[pos] = k as u8;
            rec(out, cur, pos + 1, left - k);
        }
    }
    if n == 0 {
        return out;
    }
    rec(&mut out, &mut cur, 0, d);
    out
}

/// Solves A q = rhs by exact Gaussian elimination with partial
/// (nonzero) pivoting. A is row-major square.
fn solve_rational(
    mut a: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
) -> Result<Vec<BigRational>> {
    let m = rhs.len();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Internal("singular system in harmonic decomposition".into()))?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = a[col][col].clone();
        for r in col + 1..m {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / inv.clone();
            for c in col..m {
                let sub = factor.clone() * a[col][c].clone();
                a[r][c] -= sub;
            }
            let sub = factor * rhs[col].clone();
            rhs[r] -= sub;
        }
    }
    let mut x = vec![BigRational::zero(); m];
    for row in (0..m).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..m {
            acc -= a[row][c].clone() * x[c].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok(x)
}

/// Writes P = sum_j |x|^{2(j-1)} P_j with every P_j harmonic and
/// homogeneous of degree deg(P) - 2(j-1). Each stage solves the exact
/// linear system Delta(|x|^2 Q) = Delta(P) for Q and peels off the
/// harmonic remainder P - |x|^2 Q.
pub fn harmonic_decompose(
    p: &HomogeneousPoly<BigRational>,
) -> Result<Vec<(usize, HomogeneousPoly<BigRational>)>> {
    let mut out = Vec::new();
    let mut current = p.clone();
    let mut j = 1usize;
    loop {
        if current.is_zero() {
            break;
        }
        let lap = current.laplacian();
        if lap.is_zero() {
            out.push((j, current));
            break;
        }
        let d = current.degree();
        let basis = monomials(current.n(), d - 2);
        let index: BTreeMap<&Vec<u8>, usize> =
            basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let m = basis.len();
        let r2 = HomogeneousPoly::<BigRational>::radial_sq(current.n());
        let mut a = vec![vec![BigRational::zero(); m]; m];
        for (col, e) in basis.iter().enumerate() {
            let mono = HomogeneousPoly::monomial(current.n(), e, BigRational::one())?;
            let img = r2.mul(&mono)?.laplacian();
            for (ei, c) in img.terms() {
                a[index[ei]][col] = c.clone();
            }
        }
        let mut rhs = vec![BigRational::zero(); m];
        for (e, c) in lap.terms() {
            rhs[index[e]] = c.clone();
        }
        let q_coeffs = solve_rational(a, rhs)?;
        let q = HomogeneousPoly::from_terms(
            current.n(),
            d - 2,
            basis.into_iter().zip(q_coeffs).collect::<Vec<_>>(),
        )?;
        let harmonic = current.sub(&r2.mul(&q)?)?;
        if !harmonic.is_zero() {
            out.push((j, harmonic));
        }
        current = q;
        j += 1;
    }
    Ok(out)
}
