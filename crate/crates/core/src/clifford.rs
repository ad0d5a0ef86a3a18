//! Real Clifford algebra Cl_n with n anticommuting imaginary units
//! (e_j ⊙ e_j = -1). Blades are encoded as bitmasks, coefficients are
//! stored densely over the 2^n blade basis.

use crate::error::{Error, Result};
use num_traits::{Float, One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Largest ambient dimension the algebra supports. The operator modules
/// only need n ∈ {2,3}; the polynomial module probes up to 6.
pub const MAX_DIM: usize = 6;

/// Scalar requirements for multivector coefficients.
pub trait Ring:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// A basis blade e_I for a strictly increasing multi-index I ⊆ {1,..,n},
/// encoded as a bitmask (bit j-1 set ⇔ j ∈ I). The empty index is the
/// scalar unit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BladeIndex {
    mask: u32,
}

impl BladeIndex {
    pub fn scalar() -> Self {
        BladeIndex { mask: 0 }
    }

    /// Builds a blade from 1-based indices, which must be strictly
    /// increasing and within 1..=n.
    pub fn new(indices: &[usize], n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut mask = 0u32;
        let mut prev = 0usize;
        for &i in indices {
            if i < 1 || i > n {
                return Err(Error::InvalidBlade(format!("index {i} out of 1..={n}")));
            }
            if i <= prev {
                return Err(Error::InvalidBlade(format!(
                    "indices not strictly increasing at {i}"
                )));
            }
            mask |= 1 << (i - 1);
            prev = i;
        }
        Ok(BladeIndex { mask })
    }

    pub fn from_mask(mask: u32, n: usize) -> Result<Self> {
        check_dim(n)?;
        if mask >= (1u32 << n) {
            return Err(Error::InvalidBlade(format!(
                "mask {mask:#b} invalid for n={n}"
            )));
        }
        Ok(BladeIndex { mask })
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Number of generators in the blade.
    pub fn grade(&self) -> u32 {
        self.mask.count_ones()
    }

    /// 1-based generator indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        (0..32).filter(|b| self.mask >> b & 1 == 1).map(|b| b + 1).collect()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n, MAX_DIM));
    }
    Ok(())
}

/// Sign incurred by reordering the concatenation of two ascending index
/// lists into ascending order (counting transpositions).
fn reorder_sign(a: u32, b: u32) -> i32 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Normalized product of basis blades: e_I ⊙ e_J = sign · e_K.
/// Transpositions are counted to interleave the factors, then each
/// repeated generator contracts with e_j ⊙ e_j = -1.
pub fn blade_mul(i: BladeIndex, j: BladeIndex) -> (i32, BladeIndex) {
    let mut sign = reorder_sign(i.mask, j.mask);
    if (i.mask & j.mask).count_ones() % 2 == 1 {
        sign = -sign;
    }
    (sign, BladeIndex { mask: i.mask ^ j.mask })
}

/// Sign of the Clifford conjugate on a blade of the given grade:
/// conj(e_I) = (-1)^{l(l+1)/2} e_I for l = |I|.
pub fn conj_sign(grade: u32) -> i32 {
    if (grade * (grade + 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Dense multiplication table for Cl_n: entry (a,b) holds the sign and
/// target mask of e_a ⊙ e_b. A cached optimization over the counting
/// path, used by the O(N^2) quadrature loops.
pub struct MulTable {
    n: usize,
    dim: usize,
    sign: Vec<f64>,
    target: Vec<usize>,
}

impl MulTable {
    pub fn new(n: usize) -> Result<Self> {
        check_dim(n)?;
        let dim = 1usize << n;
        let mut sign = vec![0.0; dim * dim];
        let mut target = vec![0usize; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let (s, k) = blade_mul(
                    BladeIndex { mask: a as u32 },
                    BladeIndex { mask: b as u32 },
                );
                sign[a * dim + b] = s as f64;
                target[a * dim + b] = k.mask as usize;
            }
        }
        Ok(MulTable { n, dim, sign, target })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// out := a ⊙ b on raw coefficient slices of length 2^n.
    pub fn mul_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        debug_assert_eq!(a.len(), self.dim);
        debug_assert_eq!(b.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        out.fill(0.0);
        for ia in 0..self.dim {
            let ca = a[ia];
            if ca == 0.0 {
                continue;
            }
            let row_s = &self.sign[ia * self.dim..(ia + 1) * self.dim];
            let row_t = &self.target[ia * self.dim..(ia + 1) * self.dim];
            for ib in 0..self.dim {
                let cb = b[ib];
                if cb != 0.0 {
                    out[row_t[ib]] += row_s[ib] * ca * cb;
                }
            }
        }
    }
}

/// An element of Cl_n with coefficients over the 2^n blade basis.
#[derive(Clone, PartialEq, Debug)]
pub struct Multivector<T> {
    n: usize,
    coeffs: Vec<T>,
}

impl<T: Ring> Multivector<T> {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Multivector {
            n,
            coeffs: vec![T::zero(); 1 << n],
        })
    }

    pub fn scalar(n: usize, c: T) -> Result<Self> {
        let mut u = Self::zero(n)?;
        u.coeffs[0] = c;
        Ok(u)
    }

    pub fn basis(n: usize, blade: BladeIndex) -> Result<Self> {
        if blade.mask >= (1u32 << n) {
            return Err(Error::InvalidBlade(format!(
                "blade {:?} invalid for n={n}",
                blade.indices()
            )));
        }
        let mut u = Self::zero(n)?;
        u.coeffs[blade.mask as usize] = T::one();
        Ok(u)
    }

    /// Embeds x ∈ R^n as the vector Σ x_j e_j.
    pub fn embed(components: &[T]) -> Result<Self> {
        let n = components.len();
        let mut u = Self::zero(n)?;
        for (j, c) in components.iter().enumerate() {
            u.coeffs[1 << j] = c.clone();
        }
        Ok(u)
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<T>) -> Result<Self> {
        check_dim(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch(coeffs.len(), 1 << n));
        }
        Ok(Multivector { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: BladeIndex) -> &T {
        &self.coeffs[blade.mask as usize]
    }

    pub fn coeff_mut(&mut self, blade: BladeIndex) -> &mut T {
        &mut self.coeffs[blade.mask as usize]
    }

    pub fn scalar_part(&self) -> T {
        self.coeffs[0].clone()
    }

    /// Components of the grade-1 part.
    pub fn vector_part(&self) -> Vec<T> {
        (0..self.n).map(|j| self.coeffs[1 << j].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let dim = 1usize << self.n;
        let mut out = vec![T::zero(); dim];
        for a in 0..dim {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..dim {
                if other.coeffs[b].is_zero() {
                    continue;
                }
                let (s, k) = blade_mul(
                    BladeIndex { mask: a as u32 },
                    BladeIndex { mask: b as u32 },
                );
                let prod = self.coeffs[a].clone() * other.coeffs[b].clone();
                let idx = k.mask as usize;
                if s > 0 {
                    out[idx] = out[idx].clone() + prod;
                } else {
                    out[idx] = out[idx].clone() - prod;
                }
            }
        }
        Ok(Multivector { n: self.n, coeffs: out })
    }

    /// Clifford conjugation: the real-linear involution with
    /// conj(e_I) = (-1)^{|I|} e_{i_l} ⊙ ... ⊙ e_{i_1}; it reverses
    /// products and negates vectors.
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if conj_sign((mask as u32).count_ones()) < 0 {
                *c = -c.clone();
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.clone() * s.clone()).collect();
        Multivector { n: self.n, coeffs }
    }
}

impl<T: Ring + Float> Multivector<T> {
    /// |u| = Euclidean norm of the coefficient vector; coincides with
    /// ((u ⊙ conj(u))_0)^{1/2}.
    pub fn norm(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + *c * *c)
            .sqrt()
    }

    /// ⟨u,v⟩ = (u ⊙ conj(v))_0.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .fold(T::zero(), |acc, (a, b)| acc + *a * *b))
    }
}

impl<T: Ring> Add for &Multivector<T> {
    type Output = Multivector<T>;
    fn add(self, rhs: Self) -> Multivector<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Multivector { n: self.n, coeffs }
    }
}

impl<T: Ring> Sub for &Multivector<T> {
    type Output = Multivector<T>;
    fn sub(self, rhs: Self) -> Multivector<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Multivector { n: self.n, coeffs }
    }
}

impl<T: Ring> Neg for &Multivector<T> {
    type Output = Multivector<T>;
    fn neg(self) -> Multivector<T> {
        let coeffs = self.coeffs.iter().map(|c| -c.clone()).collect();
        Multivector { n: self.n, coeffs }
    }
}

/// Geometric product. Panics on mismatched dimensions; use `try_mul`
/// for a checked variant.
impl<T: Ring> Mul for &Multivector<T> {
    type Output = Multivector<T>;
    fn mul(self, rhs: Self) -> Multivector<T> {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn b(idx: &[usize], n: usize) -> BladeIndex {
        BladeIndex::new(idx, n).unwrap()
    }

    fn random_mv(n: usize, rng: &mut impl Rng) -> Multivector<f64> {
        let coeffs = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Multivector::from_coeffs(n, coeffs).unwrap()
    }

    #[test]
    fn generator_squares_to_minus_one() {
        let (s, k) = blade_mul(b(&[1], 3), b(&[1], 3));
        assert_eq!((s, k), (-1, BladeIndex::scalar()));
    }

    #[test]
    fn ascending_product_has_no_sign() {
        let (s, k) = blade_mul(b(&[1], 3), b(&[2], 3));
        assert_eq!((s, k), (1, b(&[1, 2], 3)));
    }

    #[test]
    fn generators_anticommute() {
        let (s, k) = blade_mul(b(&[2], 3), b(&[1], 3));
        assert_eq!((s, k), (-1, b(&[1, 2], 3)));
    }

    #[test]
    fn invalid_blade_rejected() {
        assert!(BladeIndex::new(&[0], 3).is_err());
        assert!(BladeIndex::new(&[4], 3).is_err());
        assert!(BladeIndex::new(&[2, 2], 3).is_err());
        assert!(BladeIndex::new(&[3, 1], 3).is_err());
    }

    #[test]
    fn vector_squares_to_minus_norm() {
        let x = Multivector::embed(&[3.0, 4.0, 0.0]).unwrap();
        let sq = &x * &x;
        assert_eq!(sq, Multivector::scalar(3, -25.0).unwrap());
    }

    #[test]
    fn unit_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_mv(3, &mut rng);
        let one = Multivector::scalar(3, 1.0).unwrap();
        assert_eq!(&u * &one, u);
        assert_eq!(&one * &u, u);
    }

    #[test]
    fn embedding_round_trips() {
        let x = vec![0.3, -1.25, 4.0];
        let u = Multivector::embed(&x).unwrap();
        assert_eq!(u.vector_part(), x);
    }

    #[test]
    fn conjugation_examples() {
        let e12 = Multivector::<f64>::basis(2, b(&[1, 2], 2)).unwrap();
        assert_eq!(e12.conj(), -&e12);
        let c = Multivector::scalar(2, 2.5).unwrap();
        assert_eq!(c.conj(), c);
        let x = Multivector::embed(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(x.conj(), -&x);
    }

    #[test]
    fn conj_blade_times_blade_is_one() {
        for n in 1..=4 {
            for mask in 0..1u32 << n {
                let e = Multivector::<f64>::basis(n, BladeIndex::from_mask(mask, n).unwrap())
                    .unwrap();
                let p = &e.conj() * &e;
                assert_eq!(p, Multivector::scalar(n, 1.0).unwrap());
            }
        }
    }

    #[test]
    fn norm_and_inner() {
        let mut u = Multivector::zero(2).unwrap();
        *u.coeff_mut(b(&[1], 2)) = 1.0;
        *u.coeff_mut(b(&[1, 2], 2)) = 2.0;
        assert!((u.norm() * u.norm() - 5.0).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let u = random_mv(4, &mut rng);
            let sq = (&u * &u.conj()).scalar_part();
            assert!((sq - u.norm() * u.norm()).abs() <= 1e-12);
            let sq2 = (&u.conj() * &u).scalar_part();
            assert!((sq2 - u.norm() * u.norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn vector_factor_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let u = random_mv(3, &mut rng);
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = Multivector::embed(&w).unwrap();
            let lhs = (&x * &u).norm();
            let rhs = x.norm() * u.norm();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            let lhs2 = (&u * &x).norm();
            assert!((lhs2 - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }

    #[test]
    fn blade_associativity_exhaustive_small_dims() {
        for n in 1..=4usize {
            let dim = 1u32 << n;
            for a in 0..dim {
                for bb in 0..dim {
                    for c in 0..dim {
                        let ba = BladeIndex { mask: a };
                        let bb_ = BladeIndex { mask: bb };
                        let bc = BladeIndex { mask: c };
                        let (s1, k1) = blade_mul(ba, bb_);
                        let (s2, k2) = blade_mul(k1, bc);
                        let (s3, k3) = blade_mul(bb_, bc);
                        let (s4, k4) = blade_mul(ba, k3);
                        assert_eq!((s1 * s2, k2), (s3 * s4, k4));
                    }
                }
            }
        }
    }

    #[test]
    fn table_matches_counting_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 1..=4 {
            let table = MulTable::new(n).unwrap();
            let u = random_mv(n, &mut rng);
            let v = random_mv(n, &mut rng);
            let mut out = vec![0.0; 1 << n];
            table.mul_into(u.coeffs(), v.coeffs(), &mut out);
            let direct = &u * &v;
            for (a, b) in out.iter().zip(direct.coeffs()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugation_antihomomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for _ in 0..20 {
                let u = random_mv(n, &mut rng);
                let v = random_mv(n, &mut rng);
                let lhs = (&u * &v).conj();
                let rhs = &v.conj() * &u.conj();
                for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unit_vector_squares_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let mut w: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt();
            for c in &mut w {
                *c /= norm;
            }
            let nu = Multivector::embed(&w).unwrap();
            let sq = &nu * &nu;
            let minus_one = Multivector::scalar(3, -1.0).unwrap();
            for (a, b) in sq.coeffs().iter().zip(minus_one.coeffs()) {
                assert!((a - b).abs() < 1e-14);
            }
            // left multiplication by nu is inverted by -nu ⊙
            let u = random_mv(3, &mut rng);
            let back = &(-&nu) * &(&nu * &u);
            for (a, b) in back.coeffs().iter().zip(u.coeffs()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }
}
