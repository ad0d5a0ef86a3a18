//! Cauchy-Clifford operators: boundary-to-domain evaluation, the
//! subtracted-kernel pv operator with its analytic +/- 1/2 constant,
//! the independent epsilon-truncation mode, normal recovery, and
//! nontangential traces.

use super::{
    cauchy_kernel_into, corrected_trapezoid, displacement, proximity_scan, vector_into,
    AmbientConstants, CliffordField, DomainValues, ScalarField,
};
use crate::boundary::{BoundaryMesh, Param, ProbeSet};
use crate::clifford::MulTable;
use crate::error::{Error, Result};
use crate::operators::pv::riesz_pv;
use crate::Mv;
use std::f64::consts::PI;

fn check_field(mesh: &BoundaryMesh, f: &CliffordField) -> Result<()> {
    if f.n != mesh.n {
        return Err(Error::DimensionMismatch(mesh.n, f.n));
    }
    if f.len() != mesh.len() {
        return Err(Error::DimensionMismatch(mesh.len(), f.len()));
    }
    Ok(())
}

struct CauchyWork {
    table: MulTable,
    dim: usize,
    omega: f64,
    kbuf: Vec<f64>,
    nubuf: Vec<f64>,
    t1: Vec<f64>,
}

impl CauchyWork {
    fn new(n: usize) -> Result<Self> {
        let amb = AmbientConstants::new(n)?;
        Ok(CauchyWork {
            table: MulTable::new(n)?,
            dim: amb.dim,
            omega: amb.omega,
            kbuf: vec![0.0; amb.dim],
            nubuf: vec![0.0; amb.dim],
            t1: vec![0.0; amb.dim],
        })
    }

    /// K(x - y_k) (.) nu_k (.) g into `out`.
    fn kernel_row(
        &mut self,
        mesh: &BoundaryMesh,
        x: &[f64; 3],
        k: usize,
        g: &[f64],
        out: &mut [f64],
    ) {
        let (d, _) = displacement(x, &mesh.nodes[k]);
        cauchy_kernel_into(&self.table, &d, &mut self.kbuf);
        vector_into(self.table.n(), &mesh.normals[k], &mut self.nubuf);
        self.table.mul_into(&self.kbuf, &self.nubuf, &mut self.t1);
        self.table.mul_into(&self.t1, g, out);
    }
}

/// (1/omega_{n-1}) sum_i (x - y_i)/|x - y_i|^n (.) nu_i (.) f_i w_i at
/// off-boundary points.
pub fn cauchy_domain(
    mesh: &BoundaryMesh,
    f: &CliffordField,
    points: &[[f64; 3]],
) -> Result<DomainValues<Mv>> {
    check_field(mesh, f)?;
    let proximity_warnings = proximity_scan(mesh, points)?;
    let mut work = CauchyWork::new(mesh.n)?;
    let mut values = Vec::with_capacity(points.len());
    let mut acc = vec![0.0; work.dim];
    let mut row = vec![0.0; work.dim];
    for p in points {
        acc.fill(0.0);
        for k in 0..mesh.len() {
            let g = f.values[k].coeffs().to_vec();
            work.kernel_row(mesh, p, k, &g, &mut row);
            let w = mesh.weights[k];
            for (a, v) in acc.iter_mut().zip(&row) {
                *a += v * w;
            }
        }
        for a in acc.iter_mut() {
            *a /= work.omega;
        }
        values.push(Mv::from_coeffs(mesh.n, acc.clone())?);
    }
    Ok(DomainValues {
        values,
        proximity_warnings,
    })
}

/// Near-boundary evaluation anchored at node `base`:
/// Cf(z) = C1_analytic * f(base) + (1/omega) sum K (.) nu (.) (f - f(base)) w,
/// with C1_analytic = 1 inside a bounded domain and 0 outside. The
/// subtraction removes the O(1/dist) blow-up of the plain quadrature
/// when z approaches the boundary.
pub fn cauchy_domain_subtracted(
    mesh: &BoundaryMesh,
    f: &CliffordField,
    base: usize,
    points: &[[f64; 3]],
) -> Result<Vec<Mv>> {
    check_field(mesh, f)?;
    if base >= mesh.len() {
        return Err(Error::Operator(format!("base node {base} out of range")));
    }
    let mut work = CauchyWork::new(mesh.n)?;
    let fb = f.values[base].clone();
    let mut values = Vec::with_capacity(points.len());
    let mut acc = vec![0.0; work.dim];
    let mut g = vec![0.0; work.dim];
    let mut row = vec![0.0; work.dim];
    for p in points {
        acc.fill(0.0);
        for k in 0..mesh.len() {
            for (gi, (a, b)) in g
                .iter_mut()
                .zip(f.values[k].coeffs().iter().zip(fb.coeffs()))
            {
                *gi = a - b;
            }
            work.kernel_row(mesh, p, k, &g, &mut row);
            let w = mesh.weights[k];
            for (a, v) in acc.iter_mut().zip(&row) {
                *a += v * w;
            }
        }
        for a in acc.iter_mut() {
            *a /= work.omega;
        }
        let mut value = Mv::from_coeffs(mesh.n, acc.clone())?;
        if mesh.bounded {
            value = &value + &fb;
        }
        values.push(value);
    }
    Ok(values)
}

/// Subtracted-kernel pv Cauchy-Clifford operator:
/// C^pv f(x_i) = +/- f(x_i)/2
///   + (1/omega) sum_{k != i} K(x_i - y_k) (.) nu_k (.) (f_k - f_i) w_k,
/// + for bounded, - for unbounded orientation. The constant is injected
/// analytically, never integrated.
pub fn cauchy_pv(mesh: &BoundaryMesh, f: &CliffordField) -> Result<CliffordField> {
    check_field(mesh, f)?;
    let mut work = CauchyWork::new(mesh.n)?;
    let n_nodes = mesh.len();
    let sign = if mesh.bounded { 0.5 } else { -0.5 };
    let curve_corrected = matches!(mesh.param, Param::Angle(_)) && n_nodes >= 5;
    let h = 2.0 * PI / n_nodes as f64;
    let mut rows = vec![0.0; n_nodes * work.dim];
    let mut g = vec![0.0; work.dim];
    let mut row = vec![0.0; work.dim];
    let mut acc = vec![0.0; work.dim];
    let mut values = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let x = mesh.nodes[i];
        let fi = f.values[i].clone();
        if curve_corrected {
            for k in 0..n_nodes {
                let dst = &mut rows[k * work.dim..(k + 1) * work.dim];
                if k == i {
                    dst.fill(0.0);
                    continue;
                }
                for (gi, (a, b)) in g
                    .iter_mut()
                    .zip(f.values[k].coeffs().iter().zip(fi.coeffs()))
                {
                    *gi = a - b;
                }
                work.kernel_row(mesh, &x, k, &g, &mut row);
                // weight/h recovers the parametric speed |z'|
                let sp = mesh.weights[k] / h;
                for (d, v) in dst.iter_mut().zip(&row) {
                    *d = v * sp;
                }
            }
            corrected_trapezoid(&rows, n_nodes, work.dim, i, h, &mut acc);
        } else {
            acc.fill(0.0);
            for k in 0..n_nodes {
                if k == i {
                    continue;
                }
                for (gi, (a, b)) in g
                    .iter_mut()
                    .zip(f.values[k].coeffs().iter().zip(fi.coeffs()))
                {
                    *gi = a - b;
                }
                work.kernel_row(mesh, &x, k, &g, &mut row);
                let w = mesh.weights[k];
                for (a, v) in acc.iter_mut().zip(&row) {
                    *a += v * w;
                }
            }
        }
        for a in acc.iter_mut() {
            *a /= work.omega;
        }
        let value = Mv::from_coeffs(mesh.n, acc.clone())?;
        values.push(&value + &fi.scale(sign));
    }
    CliffordField::from_values(mesh.n, values)
}

/// Epsilon-truncation of the unsubtracted pv integrand:
/// (1/omega) sum_{|x_i - y_k| > eps} K (.) nu_k (.) f_k w_k.
pub fn cauchy_pv_truncated(
    mesh: &BoundaryMesh,
    f: &CliffordField,
    eps: f64,
) -> Result<CliffordField> {
    check_field(mesh, f)?;
    if eps <= 0.0 {
        return Err(Error::Operator("truncation radius must be positive".into()));
    }
    let mut work = CauchyWork::new(mesh.n)?;
    let n_nodes = mesh.len();
    let mut row = vec![0.0; work.dim];
    let mut acc = vec![0.0; work.dim];
    let mut values = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let x = mesh.nodes[i];
        let window = super::pv::exclusion_window(mesh, i, eps);
        acc.fill(0.0);
        for k in 0..n_nodes {
            if !super::pv::outside_truncation(mesh, i, k, eps, window) {
                continue;
            }
            let g = f.values[k].coeffs().to_vec();
            work.kernel_row(mesh, &x, k, &g, &mut row);
            let w = mesh.weights[k];
            for (a, v) in acc.iter_mut().zip(&row) {
                *a += v * w;
            }
        }
        for a in acc.iter_mut() {
            *a /= work.omega;
        }
        values.push(Mv::from_coeffs(mesh.n, acc.clone())?);
    }
    CliffordField::from_values(mesh.n, values)
}

/// Richardson-extrapolated epsilon ladder for C^pv, independent of the
/// subtracted form: eps_m = (diam/8) 2^{-m}, m = 0..6 (floored at the
/// mesh spacing), and R_m = 2 T_{m+1} - T_m. Returns the extrapolated
/// field and the max last increment as uncertainty.
pub fn cauchy_pv_ladder(
    mesh: &BoundaryMesh,
    f: &CliffordField,
) -> Result<(CliffordField, f64)> {
    let rungs = super::pv::epsilon_ladder(mesh);
    let ladder: Vec<CliffordField> = rungs
        .iter()
        .map(|&eps| cauchy_pv_truncated(mesh, f, eps))
        .collect::<Result<_>>()?;
    let last = rungs.len() - 1;
    let mut uncertainty = 0.0f64;
    let mut values = Vec::with_capacity(mesh.len());
    for i in 0..mesh.len() {
        let rich: Vec<Mv> = (0..last)
            .map(|m| &ladder[m + 1].values[i].scale(2.0) - &ladder[m].values[i])
            .collect();
        // conservative: max increment over the whole extrapolation
        // sequence, since the truncation error need not be smooth in eps
        for m in 1..last {
            uncertainty = uncertainty.max((&rich[m] - &rich[m - 1]).norm());
        }
        values.push(rich[last - 1].clone());
    }
    Ok((CliffordField::from_values(mesh.n, values)?, uncertainty))
}

/// Normal recovery nu_rec = -4 C^pv( sum_j (R_j^pv 1) e_j ) and its
/// per-node error against the mesh normals.
#[derive(Clone, Debug)]
pub struct NormalRecovery {
    pub nu_rec: Vec<[f64; 3]>,
    pub node_error: Vec<f64>,
    pub max_error: f64,
    /// Max angle (radians) between renormalized nu_rec and nu.
    pub max_angular_error: f64,
}

pub fn recover_normal(mesh: &BoundaryMesh) -> Result<NormalRecovery> {
    let ones = ScalarField::constant(mesh.len(), 1.0);
    let mut vecs = vec![[0.0f64; 3]; mesh.len()];
    for j in 0..mesh.n {
        let rj = riesz_pv(mesh, j, &ones)?;
        for (v, r) in vecs.iter_mut().zip(&rj.values) {
            v[j] = *r;
        }
    }
    let field = CliffordField::from_vectors(mesh.n, &vecs)?;
    let cpv = cauchy_pv(mesh, &field)?;
    let mut nu_rec = Vec::with_capacity(mesh.len());
    let mut node_error = Vec::with_capacity(mesh.len());
    let mut max_error = 0.0f64;
    let mut max_angular_error = 0.0f64;
    for (i, v) in cpv.values.iter().enumerate() {
        let parts = v.vector_part();
        let mut rec = [0.0f64; 3];
        for j in 0..mesh.n {
            rec[j] = -4.0 * parts[j];
        }
        let nu = mesh.normals[i];
        let err = ((rec[0] - nu[0]).powi(2)
            + (rec[1] - nu[1]).powi(2)
            + (rec[2] - nu[2]).powi(2))
        .sqrt();
        let len = (rec[0] * rec[0] + rec[1] * rec[1] + rec[2] * rec[2]).sqrt();
        if len > 0.0 {
            let cosang = ((rec[0] * nu[0] + rec[1] * nu[1] + rec[2] * nu[2]) / len)
                .clamp(-1.0, 1.0);
            max_angular_error = max_angular_error.max(cosang.acos());
        }
        max_error = max_error.max(err);
        node_error.push(err);
        nu_rec.push(rec);
    }
    Ok(NormalRecovery {
        nu_rec,
        node_error,
        max_error,
        max_angular_error,
    })
}

/// Richardson/Neville extrapolation of evaluator values along a probe
/// ladder to depth 0.
#[derive(Clone, Debug)]
pub struct TraceEstimate {
    pub limit: Mv,
    /// Change of the extrapolant when the deepest-order term is added.
    pub uncertainty: f64,
    /// False when the extrapolation increments failed to decrease.
    pub converged: bool,
}

pub fn nontangential_trace<F>(evaluator: F, probe: &ProbeSet) -> Result<TraceEstimate>
where
    F: Fn(&[f64; 3]) -> Result<Mv>,
{
    let k = probe.points.len();
    if k < 3 {
        return Err(Error::Operator(
            "nontangential trace needs at least 3 ladder depths".into(),
        ));
    }
    let vals: Vec<Mv> = probe
        .points
        .iter()
        .map(&evaluator)
        .collect::<Result<_>>()?;
    let n = vals[0].n();
    let dim = vals[0].coeffs().len();
    // Neville tableau toward t = 0, tracking the diagonal estimates
    let mut table: Vec<Vec<f64>> = vals.iter().map(|v| v.coeffs().to_vec()).collect();
    let t = &probe.depths;
    let mut estimates: Vec<Vec<f64>> = vec![table[0].clone()];
    for order in 1..k {
        for m in 0..k - order {
            for d in 0..dim {
                let hi = table[m + 1][d];
                let lo = table[m][d];
                table[m][d] = hi + (hi - lo) * t[m + order] / (t[m] - t[m + order]);
            }
        }
        estimates.push(table[0].clone());
    }
    let diff = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let increments: Vec<f64> = estimates
        .windows(2)
        .map(|w| diff(&w[0], &w[1]))
        .collect();
    let uncertainty = *increments.last().unwrap();
    let converged = uncertainty <= increments[0].max(1e-14);
    Ok(TraceEstimate {
        limit: Mv::from_coeffs(n, estimates.last().unwrap().clone())?,
        uncertainty,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{make_ellipse, probe_ladder};

    fn unit_field(mesh: &BoundaryMesh) -> CliffordField {
        CliffordField::from_scalar(mesh.n, &ScalarField::constant(mesh.len(), 1.0)).unwrap()
    }

    fn trig_field(mesh: &BoundaryMesh) -> CliffordField {
        let Param::Angle(angles) = &mesh.param else {
            panic!("curve expected")
        };
        let values = angles
            .iter()
            .map(|&th| {
                Mv::from_coeffs(
                    2,
                    vec![(3.0 * th).cos(), (2.0 * th).sin(), -th.cos(), 0.5 * th.cos()],
                )
                .unwrap()
            })
            .collect();
        CliffordField::from_values(2, values).unwrap()
    }

    #[test]
    fn cauchy_of_one_is_indicator() {
        let m = make_ellipse(2.0, 1.0, 512).unwrap();
        let f = unit_field(&m);
        let interior = [[0.3, -0.2, 0.0], [-1.0, 0.1, 0.0]];
        let out = cauchy_domain(&m, &f, &interior).unwrap();
        for v in &out.values {
            assert!((v.scalar_part() - 1.0).abs() <= 1e-8);
            let rest: f64 = v.coeffs()[1..].iter().map(|c| c.abs()).sum();
            assert!(rest <= 1e-8);
        }
        let ext = cauchy_domain(&m, &f, &[[3.0, 1.5, 0.0]]).unwrap();
        assert!(ext.values[0].norm() <= 1e-8);
    }

    #[test]
    fn pv_of_one_is_half() {
        let m = make_ellipse(2.0, 1.0, 256).unwrap();
        let out = cauchy_pv(&m, &unit_field(&m)).unwrap();
        for v in &out.values {
            assert!((v.scalar_part() - 0.5).abs() <= 1e-12);
            let rest: f64 = v.coeffs()[1..].iter().map(|c| c.abs()).sum();
            assert!(rest <= 1e-12);
        }
        let flipped = m.flip_orientation();
        let out = cauchy_pv(&flipped, &unit_field(&flipped)).unwrap();
        assert!((out.values[0].scalar_part() + 0.5).abs() <= 1e-12);
    }

    #[test]
    fn pv_of_normal_on_circle() {
        // C^pv nu = -nu/2 on the unit circle
        let m = make_ellipse(1.0, 1.0, 512).unwrap();
        let f = CliffordField::from_vectors(2, &m.normals).unwrap();
        let out = cauchy_pv(&m, &f).unwrap();
        for (v, nu) in out.values.iter().zip(&m.normals) {
            let p = v.vector_part();
            assert!((p[0] + nu[0] / 2.0).abs() <= 1e-8);
            assert!((p[1] + nu[1] / 2.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn square_identity_on_ellipse() {
        let m = make_ellipse(2.0, 1.0, 512).unwrap();
        let f = trig_field(&m);
        let once = cauchy_pv(&m, &f).unwrap();
        let twice = cauchy_pv(&m, &once).unwrap();
        let scale = f.sup_norm();
        let mut worst = 0.0f64;
        for i in 0..m.len() {
            worst = worst.max((&twice.values[i] - &f.values[i].scale(0.25)).norm());
        }
        assert!(worst / scale <= 5e-3, "rel err {}", worst / scale);
    }

    #[test]
    fn epsilon_ladder_reaches_half() {
        let m = make_ellipse(1.0, 1.0, 2048).unwrap();
        let (out, unc) = cauchy_pv_ladder(&m, &unit_field(&m)).unwrap();
        let worst = out
            .values
            .iter()
            .map(|v| (v.scalar_part() - 0.5).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 5e-3, "worst {worst}, uncertainty {unc}");
    }

    #[test]
    fn normals_recovered_on_circle() {
        let m = make_ellipse(1.0, 1.0, 512).unwrap();
        let rec = recover_normal(&m).unwrap();
        assert!(rec.max_error <= 1e-5, "{}", rec.max_error);
        assert!(rec.max_angular_error <= 1e-5);
    }

    #[test]
    fn trace_of_constant_evaluator() {
        let m = make_ellipse(1.0, 1.0, 128).unwrap();
        let probe = probe_ladder(&m, 5, 0.1, 0.5, 5, 1.0).unwrap();
        let c = Mv::from_coeffs(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let est = nontangential_trace(|_| Ok(c.clone()), &probe).unwrap();
        assert!((&est.limit - &c).norm() <= 1e-13);
        assert!(est.uncertainty <= 1e-13);
        assert!(est.converged);
    }

    #[test]
    fn jump_formula_on_ellipse() {
        let m = make_ellipse(2.0, 1.0, 512).unwrap();
        let f = trig_field(&m);
        let cpv = cauchy_pv(&m, &f).unwrap();
        let scale = f.sup_norm();
        for &i in &[0usize, 137, 300] {
            let probe = probe_ladder(&m, i, 0.1, 0.5, 7, 1.0).unwrap();
            let vals = cauchy_domain_subtracted(&m, &f, i, &probe.points).unwrap();
            let est = nontangential_trace(
                |p| {
                    let idx = probe
                        .points
                        .iter()
                        .position(|q| q == p)
                        .expect("probe point");
                    Ok(vals[idx].clone())
                },
                &probe,
            )
            .unwrap();
            let target = &f.values[i].scale(0.5) + &cpv.values[i];
            let err = (&est.limit - &target).norm();
            assert!(err <= 1e-2 * scale, "node {i}: {err}");
        }
    }

    #[test]
    fn anti_self_adjoint_bilinear_form() {
        // odd scalar kernel: <Rf, g>_w = -<f, Rg>_w up to the
        // endpoint-correction terms of the punctured trapezoid
        let m = make_ellipse(2.0, 1.0, 512).unwrap();
        let Param::Angle(angles) = &m.param else { panic!() };
        let f = ScalarField::new(angles.iter().map(|t| (3.0 * t).cos()).collect());
        let g = ScalarField::new(angles.iter().map(|t| (2.0 * t).sin() + 0.3).collect());
        let rf = riesz_pv(&m, 0, &f).unwrap();
        let rg = riesz_pv(&m, 0, &g).unwrap();
        let form = |u: &ScalarField, v: &ScalarField| -> f64 {
            u.values
                .iter()
                .zip(&v.values)
                .zip(&m.weights)
                .map(|((a, b), w)| a * b * w)
                .sum()
        };
        let a = form(&rf, &g);
        let b = form(&f, &rg);
        let scale = f.sup_norm() * g.sup_norm() * m.total_measure();
        assert!((a + b).abs() <= 1e-4 * scale, "{a} vs {b}");
    }
}
