//! Harmonic layer potentials: single layer, double layer, and the
//! single-layer gradient computed two independent ways (finite
//! differences of S, and the vector part of -C(nu (.) f)).

use super::cauchy::cauchy_domain;
use super::{proximity_scan, rho, AmbientConstants, CliffordField, DomainValues, ScalarField};
use crate::boundary::{dot, sub, BoundaryMesh};
use crate::error::{Error, Result};
use crate::Mv;
use std::f64::consts::PI;

/// Fundamental solution of the Laplacian: ln r / (2 pi) on the plane
/// and -1/(4 pi r) in space (the (2-n)-normalized form).
pub fn fundamental_solution(n: usize, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Operator("fundamental solution needs r > 0".into()));
    }
    match n {
        2 => Ok(r.ln() / (2.0 * PI)),
        3 => Ok(-1.0 / (4.0 * PI * r)),
        _ => Err(Error::UnsupportedDimension(n, 3)),
    }
}

fn check_field(mesh: &BoundaryMesh, f: &ScalarField) -> Result<()> {
    if f.len() != mesh.len() {
        return Err(Error::DimensionMismatch(mesh.len(), f.len()));
    }
    Ok(())
}

/// S f(x) = sum_i E(x - y_i) f_i w_i.
pub fn single_layer(
    mesh: &BoundaryMesh,
    f: &ScalarField,
    points: &[[f64; 3]],
) -> Result<DomainValues<f64>> {
    check_field(mesh, f)?;
    let proximity_warnings = proximity_scan(mesh, points)?;
    let mut values = Vec::with_capacity(points.len());
    for p in points {
        let mut total = 0.0;
        for k in 0..mesh.len() {
            let d = sub(p, &mesh.nodes[k]);
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            total += fundamental_solution(mesh.n, r)? * f.values[k] * mesh.weights[k];
        }
        values.push(total);
    }
    Ok(DomainValues {
        values,
        proximity_warnings,
    })
}

/// D f(x) = (1/omega_{n-1}) sum_i <y_i - x, nu_i>/|x - y_i|^n f_i w_i,
/// the scalar part of the Cauchy operator applied to scalar f.
pub fn double_layer(
    mesh: &BoundaryMesh,
    f: &ScalarField,
    points: &[[f64; 3]],
) -> Result<DomainValues<f64>> {
    check_field(mesh, f)?;
    let proximity_warnings = proximity_scan(mesh, points)?;
    let amb = AmbientConstants::new(mesh.n)?;
    let mut values = Vec::with_capacity(points.len());
    for p in points {
        let mut total = 0.0;
        for k in 0..mesh.len() {
            let d = sub(&mesh.nodes[k], p);
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            let rn = r2.powf(mesh.n as f64 / 2.0);
            total += dot(&d, &mesh.normals[k]) / rn * f.values[k] * mesh.weights[k];
        }
        values.push(total / amb.omega);
    }
    Ok(DomainValues {
        values,
        proximity_warnings,
    })
}

/// grad S f by two routes with their cross-residual.
#[derive(Clone, Debug)]
pub struct GradSingleLayer {
    /// Central finite differences of the single layer.
    pub fd: Vec<[f64; 3]>,
    /// Vector part of -C(nu (.) f).
    pub via_cauchy: Vec<[f64; 3]>,
    /// Max over points of |fd - via_cauchy|.
    pub cross_residual: f64,
    pub proximity_warnings: Vec<usize>,
}

pub fn grad_single_layer(
    mesh: &BoundaryMesh,
    f: &ScalarField,
    points: &[[f64; 3]],
) -> Result<GradSingleLayer> {
    check_field(mesh, f)?;
    let proximity_warnings = proximity_scan(mesh, points)?;
    // finite differences, step = min(rho/8, mesh spacing)
    let mut fd = Vec::with_capacity(points.len());
    for p in points {
        let step = (rho(mesh, p) / 8.0).min(mesh.spacing());
        let mut g = [0.0f64; 3];
        for j in 0..mesh.n {
            let mut hi = *p;
            let mut lo = *p;
            hi[j] += step;
            lo[j] -= step;
            let vh = single_layer(mesh, f, &[hi])?.values[0];
            let vl = single_layer(mesh, f, &[lo])?.values[0];
            g[j] = (vh - vl) / (2.0 * step);
        }
        fd.push(g);
    }
    // vector part of -C(nu f)
    let nuf: Vec<Mv> = mesh
        .normals
        .iter()
        .zip(&f.values)
        .map(|(nu, &c)| Mv::embed(&nu[..mesh.n]).map(|v| v.scale(c)))
        .collect::<Result<_>>()?;
    let nuf = CliffordField::from_values(mesh.n, nuf)?;
    let cau = cauchy_domain(mesh, &nuf, points)?;
    let via_cauchy: Vec<[f64; 3]> = cau
        .values
        .iter()
        .map(|v| {
            let parts = v.vector_part();
            let mut out = [0.0f64; 3];
            for j in 0..mesh.n {
                out[j] = -parts[j];
            }
            out
        })
        .collect();
    let cross_residual = fd
        .iter()
        .zip(&via_cauchy)
        .map(|(a, b)| {
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(GradSingleLayer {
        fd,
        via_cauchy,
        cross_residual,
        proximity_warnings,
    })
}
