//! Quadrature engines for the singular integral operators: truncated,
//! principal-value and maximal Riesz transforms, generalized
//! polynomial-kernel transforms, Cauchy-Clifford operators, and
//! harmonic layer potentials, plus the identity checks built on them.

pub mod cauchy;
pub mod kernel;
pub mod layer;
pub mod pv;

pub use cauchy::{
    cauchy_domain, cauchy_domain_subtracted, cauchy_pv, cauchy_pv_ladder, cauchy_pv_truncated,
    nontangential_trace, recover_normal, NormalRecovery, TraceEstimate,
};
pub use kernel::{plane_harmonic, KernelSpec};
pub use layer::{
    double_layer, fundamental_solution, grad_single_layer, single_layer, GradSingleLayer,
};
pub use pv::{
    boundary_to_domain, generalized_pv, generalized_pv_checked, riesz_maximal, riesz_pv,
    riesz_pv_checked, riesz_truncated, DomainDiagnostics, PvCheck,
};

use crate::boundary::{norm, sub, BoundaryMesh};
use crate::clifford::{BladeIndex, MulTable};
use crate::error::{Error, Result};
use crate::poly::sphere_area;
use crate::Mv;

/// Dimension-dependent constants shared by the quadrature engines.
#[derive(Clone, Debug)]
pub struct AmbientConstants {
    pub n: usize,
    /// 2^n, the dimension of Cl_n.
    pub dim: usize,
    /// omega_{n-1}, the area of the unit sphere S^{n-1}.
    pub omega: f64,
}

impl AmbientConstants {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=crate::clifford::MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n, crate::clifford::MAX_DIM));
        }
        Ok(AmbientConstants {
            n,
            dim: 1usize << n,
            omega: sphere_area(n),
        })
    }
}

/// Scalar samples on the nodes of a mesh.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn constant(len: usize, c: f64) -> Self {
        ScalarField {
            values: vec![c; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Clifford-valued samples on the nodes of a mesh.
#[derive(Clone, Debug)]
pub struct CliffordField {
    pub n: usize,
    pub values: Vec<Mv>,
}

impl CliffordField {
    pub fn from_values(n: usize, values: Vec<Mv>) -> Result<Self> {
        for v in &values {
            if v.n() != n {
                return Err(Error::DimensionMismatch(n, v.n()));
            }
        }
        Ok(CliffordField { n, values })
    }

    /// Scalar field embedded in grade 0.
    pub fn from_scalar(n: usize, f: &ScalarField) -> Result<Self> {
        let values = f
            .values
            .iter()
            .map(|&c| Mv::scalar(n, c))
            .collect::<Result<_>>()?;
        Ok(CliffordField { n, values })
    }

    /// Vector field embedded in grade 1 (first n components used).
    pub fn from_vectors(n: usize, vs: &[[f64; 3]]) -> Result<Self> {
        let values = vs
            .iter()
            .map(|v| Mv::embed(&v[..n]))
            .collect::<Result<_>>()?;
        Ok(CliffordField { n, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Per-node vector parts as ambient points (trailing coords 0).
    pub fn vector_parts(&self) -> Vec<[f64; 3]> {
        self.values
            .iter()
            .map(|v| {
                let p = v.vector_part();
                let mut out = [0.0; 3];
                out[..self.n].copy_from_slice(&p);
                out
            })
            .collect()
    }
}

/// Evaluations at off-boundary points together with the indices of any
/// points that came within two node spacings of the mesh.
#[derive(Clone, Debug)]
pub struct DomainValues<V> {
    pub values: Vec<V>,
    pub proximity_warnings: Vec<usize>,
}

/// Fails on points lying on the mesh; records near-mesh points.
pub(crate) fn proximity_scan(
    mesh: &BoundaryMesh,
    points: &[[f64; 3]],
) -> Result<Vec<usize>> {
    let near = 2.0 * mesh.spacing();
    let mut warnings = Vec::new();
    for (idx, p) in points.iter().enumerate() {
        let d = mesh.dist_to_nodes(p);
        if d == 0.0 {
            return Err(Error::Operator(format!(
                "evaluation point {idx} lies on the boundary mesh"
            )));
        }
        if d < near {
            warnings.push(idx);
        }
    }
    Ok(warnings)
}

/// Punctured periodic trapezoid with endpoint correction. `rows` holds
/// the integrand against the parameter (speed factor included),
/// row-major with `dim` entries per node; row `i` is ignored. The
/// missing singular-node contribution is extrapolated from the
/// symmetric neighbor averages S_m = (F_{i+m} + F_{i-m})/2 as
/// (4 S_1 - S_2)/3, and the result is (sum + correction) * h.
pub(crate) fn corrected_trapezoid(
    rows: &[f64],
    n_nodes: usize,
    dim: usize,
    i: usize,
    h: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(rows.len(), n_nodes * dim);
    debug_assert!(n_nodes >= 5, "correction needs two neighbors per side");
    out[..dim].fill(0.0);
    for k in 0..n_nodes {
        if k == i {
            continue;
        }
        let row = &rows[k * dim..(k + 1) * dim];
        for (o, v) in out[..dim].iter_mut().zip(row) {
            *o += v;
        }
    }
    for (m, c) in [(1usize, 4.0 / 3.0), (2usize, -1.0 / 3.0)] {
        let kp = (i + m) % n_nodes;
        let km = (i + n_nodes - m) % n_nodes;
        for d in 0..dim {
            out[d] += c * 0.5 * (rows[kp * dim + d] + rows[km * dim + d]);
        }
    }
    for o in out[..dim].iter_mut() {
        *o *= h;
    }
}

/// x - y as a grade-1 multivector divided by |x-y|^n: the Cauchy
/// kernel E(x-y) * omega_{n-1} without the normalization.
pub(crate) fn cauchy_kernel_into(
    table: &MulTable,
    d: &[f64; 3],
    out: &mut [f64],
) {
    let n = table.n();
    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let rn = r2.powf(n as f64 / 2.0);
    out.fill(0.0);
    for j in 0..n {
        out[1 << j] = d[j] / rn;
    }
}

/// Embeds the first n components of an ambient vector in grade 1.
pub(crate) fn vector_into(n: usize, v: &[f64; 3], out: &mut [f64]) {
    out.fill(0.0);
    for j in 0..n {
        out[1 << j] = v[j];
    }
}

/// Approximate distance from a point to the boundary, by nearest node.
pub(crate) fn rho(mesh: &BoundaryMesh, p: &[f64; 3]) -> f64 {
    mesh.dist_to_nodes(p)
}

/// Discrete weighted bilinear form sum_i <f_i, g_i> w_i used by the
/// anti-self-adjointness diagnostics.
pub fn bilinear_form(
    mesh: &BoundaryMesh,
    f: &CliffordField,
    g: &CliffordField,
) -> Result<f64> {
    if f.len() != mesh.len() || g.len() != mesh.len() {
        return Err(Error::DimensionMismatch(mesh.len(), f.len().min(g.len())));
    }
    let mut total = 0.0;
    for i in 0..mesh.len() {
        total += f.values[i].inner(&g.values[i])? * mesh.weights[i];
    }
    Ok(total)
}

/// The vector basis blade e_{j+1} (0-based j) in Cl_n.
pub fn vector_blade(n: usize, j: usize) -> Result<BladeIndex> {
    BladeIndex::new(&[j + 1], n)
}

pub(crate) fn displacement(x: &[f64; 3], y: &[f64; 3]) -> ([f64; 3], f64) {
    let d = sub(x, y);
    (d, norm(&d))
}
