//! Discretized closed boundaries: quadrature nodes, weights, outward
//! unit normals, parametrization metadata, interior probe ladders, and
//! the text file format for meshes.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Parametrization metadata attached to a mesh.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    /// Equispaced angles of a parametrized closed curve.
    Angle(Vec<f64>),
    /// Latitude-longitude tensor grid on a sphere of radius `r`
    /// (node index = p * ntheta + t).
    Grid { nphi: usize, ntheta: usize, r: f64 },
    /// Edge id per node for polygonal boundaries.
    Edge(Vec<usize>),
    /// No structure (e.g. loaded from a file).
    Unstructured,
}

/// A closed hypersurface sampled for quadrature. `bounded` marks the
/// orientation: true means the normals point out of the bounded
/// component.
#[derive(Clone, Debug)]
pub struct BoundaryMesh {
    pub n: usize,
    pub nodes: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub param: Param,
    pub label: String,
    pub bounded: bool,
}

/// Probe points marching to a boundary node along its inward normal.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    pub base: usize,
    pub depths: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    /// dist(z, boundary) per probe, approximated by nearest-node
    /// distance.
    pub rho: Vec<f64>,
    pub kappa: f64,
    /// Chord correction of the rho approximation (local node spacing).
    pub rho_uncertainty: f64,
}

pub fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Mean quadrature mass per node; the natural length scale of the
    /// discretization.
    pub fn spacing(&self) -> f64 {
        self.weights.iter().sum::<f64>() / self.len() as f64
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Diameter of the node cloud (bounding-box diagonal; an upper
    /// bound within a factor sqrt(n) of the true diameter).
    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.nodes {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        norm(&[hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]])
    }

    pub fn centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        let w: f64 = self.weights.iter().sum();
        for (p, wi) in self.nodes.iter().zip(&self.weights) {
            for k in 0..3 {
                c[k] += p[k] * wi / w;
            }
        }
        c
    }

    /// Distance from an arbitrary point to the node cloud.
    pub fn dist_to_nodes(&self, p: &[f64; 3]) -> f64 {
        self.nodes
            .iter()
            .map(|q| norm(&sub(p, q)))
            .fold(f64::INFINITY, f64::min)
    }

    /// The same boundary viewed from the complementary component:
    /// normals flip, node and weight data are unchanged.
    pub fn flip_orientation(&self) -> BoundaryMesh {
        let mut m = self.clone();
        m.bounded = !m.bounded;
        for nu in &mut m.normals {
            for c in nu.iter_mut() {
                *c = -*c;
            }
        }
        m
    }

    fn validate(&self) -> Result<()> {
        for (i, nu) in self.normals.iter().enumerate() {
            if (norm(nu) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidMesh(format!("normal {i} not unit length")));
            }
        }
        if self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidMesh("nonpositive weight".into()));
        }
        Ok(())
    }

    /// Writes the mesh in the text format: a header line
    /// `# n=<dim> bounded=<0|1> label=<string>` followed by one
    /// comma-separated row per node (x components, normal components,
    /// weight) with 17 significant digits.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            f,
            "# n={} bounded={} label={}",
            self.n,
            if self.bounded { 1 } else { 0 },
            self.label
        )?;
        for i in 0..self.len() {
            let mut row: Vec<String> = Vec::with_capacity(2 * self.n + 1);
            for k in 0..self.n {
                row.push(format!("{:.16e}", self.nodes[i][k]));
            }
            for k in 0..self.n {
                row.push(format!("{:.16e}", self.normals[i][k]));
            }
            row.push(format!("{:.16e}", self.weights[i]));
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<BoundaryMesh> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MeshFormat("empty file".into()))??;
        let header = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::MeshFormat("missing header".into()))?;
        let mut n = 0usize;
        let mut bounded = true;
        let mut label = String::new();
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v
                    .parse()
                    .map_err(|_| Error::MeshFormat(format!("bad n: {v}")))?;
            } else if let Some(v) = tok.strip_prefix("bounded=") {
                bounded = v == "1";
            } else if let Some(v) = tok.strip_prefix("label=") {
                label = v.to_string();
            }
        }
        if n < 2 || n > 3 {
            return Err(Error::MeshFormat(format!("unsupported dimension {n}")));
        }
        let mut nodes = Vec::new();
        let mut normals = Vec::new();
        let mut weights = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::MeshFormat(format!("bad number: {s}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 2 * n + 1 {
                return Err(Error::MeshFormat(format!(
                    "expected {} columns, got {}",
                    2 * n + 1,
                    vals.len()
                )));
            }
            let mut x = [0.0; 3];
            let mut nu = [0.0; 3];
            x[..n].copy_from_slice(&vals[..n]);
            nu[..n].copy_from_slice(&vals[n..2 * n]);
            nodes.push(x);
            normals.push(nu);
            weights.push(vals[2 * n]);
        }
        let mesh = BoundaryMesh {
            n,
            nodes,
            normals,
            weights,
            param: Param::Unstructured,
            label,
            bounded,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

/// Ellipse x = (a cos t, b sin t), N nodes at equispaced parameter
/// angles, periodic trapezoid weights.
pub fn make_ellipse(a: f64, b: f64, n_nodes: usize) -> Result<BoundaryMesh> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidMesh("ellipse axes must be positive".into()));
    }
    if n_nodes < 8 {
        return Err(Error::InvalidMesh("need at least 8 nodes".into()));
    }
    let h = 2.0 * PI / n_nodes as f64;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut normals = Vec::with_capacity(n_nodes);
    let mut weights = Vec::with_capacity(n_nodes);
    let mut angles = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let t = h * i as f64;
        angles.push(t);
        nodes.push([a * t.cos(), b * t.sin(), 0.0]);
        let speed = ((a * t.sin()).powi(2) + (b * t.cos()).powi(2)).sqrt();
        weights.push(speed * h);
        let mut nu = [b * t.cos(), a * t.sin(), 0.0];
        let nn = norm(&nu);
        nu[0] /= nn;
        nu[1] /= nn;
        normals.push(nu);
    }
    let mesh = BoundaryMesh {
        n: 2,
        nodes,
        normals,
        weights,
        param: Param::Angle(angles),
        label: format!("ellipse({a},{b})"),
        bounded: true,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Latitude-longitude sphere grid with midpoint latitudes (poles are
/// never nodes). Weights integrate each latitude band exactly,
/// r^2 (cos(phi - dphi/2) - cos(phi + dphi/2)) dtheta, so constants
/// integrate to the exact sphere area.
pub fn make_sphere(r: f64, nphi: usize, ntheta: usize) -> Result<BoundaryMesh> {
    if r <= 0.0 {
        return Err(Error::InvalidMesh("radius must be positive".into()));
    }
    if nphi < 8 || ntheta < 8 {
        return Err(Error::InvalidMesh("need at least an 8x8 grid".into()));
    }
    let dphi = PI / nphi as f64;
    let dtheta = 2.0 * PI / ntheta as f64;
    let mut nodes = Vec::with_capacity(nphi * ntheta);
    let mut normals = Vec::with_capacity(nphi * ntheta);
    let mut weights = Vec::with_capacity(nphi * ntheta);
    for p in 0..nphi {
        let phi = (p as f64 + 0.5) * dphi;
        for t in 0..ntheta {
            let theta = t as f64 * dtheta;
            let nu = [
                phi.sin() * theta.cos(),
                phi.sin() * theta.sin(),
                phi.cos(),
            ];
            nodes.push([r * nu[0], r * nu[1], r * nu[2]]);
            normals.push(nu);
            weights.push(
                r * r * ((phi - 0.5 * dphi).cos() - (phi + 0.5 * dphi).cos()) * dtheta,
            );
        }
    }
    let mesh = BoundaryMesh {
        n: 3,
        nodes,
        normals,
        weights,
        param: Param::Grid { nphi, ntheta, r },
        label: format!("sphere({r})"),
        bounded: true,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Axis-aligned square centered at the origin, `m` midpoint nodes per
/// edge. Corners are never nodes, so kernels stay finite at node
/// pairs; the normal field is discontinuous across corners.
pub fn make_square(side: f64, m: usize) -> Result<BoundaryMesh> {
    if side <= 0.0 {
        return Err(Error::InvalidMesh("side must be positive".into()));
    }
    if m < 4 {
        return Err(Error::InvalidMesh("need at least 4 nodes per edge".into()));
    }
    let s = side / 2.0;
    let step = side / m as f64;
    let mut nodes = Vec::with_capacity(4 * m);
    let mut normals = Vec::with_capacity(4 * m);
    let mut edges = Vec::with_capacity(4 * m);
    // counterclockwise: bottom, right, top, left
    for k in 0..m {
        let t = -s + (k as f64 + 0.5) * step;
        nodes.push([t, -s, 0.0]);
        normals.push([0.0, -1.0, 0.0]);
        edges.push(0);
    }
    for k in 0..m {
        let t = -s + (k as f64 + 0.5) * step;
        nodes.push([s, t, 0.0]);
        normals.push([1.0, 0.0, 0.0]);
        edges.push(1);
    }
    for k in 0..m {
        let t = s - (k as f64 + 0.5) * step;
        nodes.push([t, s, 0.0]);
        normals.push([0.0, 1.0, 0.0]);
        edges.push(2);
    }
    for k in 0..m {
        let t = s - (k as f64 + 0.5) * step;
        nodes.push([-s, t, 0.0]);
        normals.push([-1.0, 0.0, 0.0]);
        edges.push(3);
    }
    let mesh = BoundaryMesh {
        n: 2,
        weights: vec![step; 4 * m],
        nodes,
        normals,
        param: Param::Edge(edges),
        label: format!("square({side})"),
        bounded: true,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Smooth cutoff supported on |theta - pi| < 2 with s(pi) = 1, and its
/// derivative in theta.
fn bump_cutoff(theta: f64) -> (f64, f64) {
    let u = (theta - PI) / 2.0;
    if u.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - u * u;
    let s = (-u * u / d).exp();
    let ds_du = s * (-2.0 * u / (d * d));
    (s, ds_du / 2.0)
}

/// Radial graph r(theta) = 1 + A s(theta) |theta - pi|^{1+alpha}: a
/// boundary whose unit normal is exactly Hölder-alpha and no better at
/// theta = pi.
pub fn make_bump_circle(alpha: f64, amplitude: f64, n_nodes: usize) -> Result<BoundaryMesh> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidMesh("alpha must lie in (0,1)".into()));
    }
    if n_nodes < 8 {
        return Err(Error::InvalidMesh("need at least 8 nodes".into()));
    }
    let h = 2.0 * PI / n_nodes as f64;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut normals = Vec::with_capacity(n_nodes);
    let mut weights = Vec::with_capacity(n_nodes);
    let mut angles = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let t = h * i as f64;
        angles.push(t);
        let (s, ds) = bump_cutoff(t);
        let g = (t - PI).abs().powf(1.0 + alpha);
        let dg = (1.0 + alpha) * (t - PI).abs().powf(alpha) * (t - PI).signum();
        let r = 1.0 + amplitude * s * g;
        if r <= 0.0 {
            return Err(Error::InvalidMesh(
                "amplitude too large: radial graph not positive".into(),
            ));
        }
        let dr = amplitude * (ds * g + s * dg);
        let (ct, st) = (t.cos(), t.sin());
        nodes.push([r * ct, r * st, 0.0]);
        let tangent = [dr * ct - r * st, dr * st + r * ct];
        let speed = (tangent[0] * tangent[0] + tangent[1] * tangent[1]).sqrt();
        weights.push(speed * h);
        normals.push([tangent[1] / speed, -tangent[0] / speed, 0.0]);
    }
    let mesh = BoundaryMesh {
        n: 2,
        nodes,
        normals,
        weights,
        param: Param::Angle(angles),
        label: format!("bump_circle({alpha},{amplitude})"),
        bounded: true,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Probes x_i - t0 ratio^k nu_i, k = 0..K-1, staying inside the
/// nontangential region of aperture kappa.
pub fn probe_ladder(
    mesh: &BoundaryMesh,
    i: usize,
    t0: f64,
    ratio: f64,
    k: usize,
    kappa: f64,
) -> Result<ProbeSet> {
    if !(0.0 < ratio && ratio < 1.0) {
        return Err(Error::InvalidMesh("ratio must lie in (0,1)".into()));
    }
    if t0 <= 0.0 || k == 0 {
        return Err(Error::InvalidMesh("need t0 > 0 and at least one depth".into()));
    }
    let x = mesh.nodes[i];
    let nu = mesh.normals[i];
    let side = if mesh.bounded { -1.0 } else { 1.0 };
    // local-reach check: the deepest first probe must still see x_i as
    // its nearest node
    let first = [
        x[0] + side * t0 * nu[0],
        x[1] + side * t0 * nu[1],
        x[2] + side * t0 * nu[2],
    ];
    for (j, q) in mesh.nodes.iter().enumerate() {
        if j != i && norm(&sub(&first, q)) <= norm(&sub(&first, &x)) {
            return Err(Error::BadProbe {
                index: 0,
                t: t0,
                reason: format!("t0 exceeds local reach (node {j} closer than base)"),
            });
        }
    }
    let mut depths = Vec::with_capacity(k);
    let mut points = Vec::with_capacity(k);
    let mut rho = Vec::with_capacity(k);
    for kk in 0..k {
        let t = t0 * ratio.powi(kk as i32);
        let z = [
            x[0] + side * t * nu[0],
            x[1] + side * t * nu[1],
            x[2] + side * t * nu[2],
        ];
        let r = mesh.dist_to_nodes(&z);
        if norm(&sub(&x, &z)) >= (1.0 + kappa) * r {
            return Err(Error::BadProbe {
                index: kk,
                t,
                reason: "outside the nontangential region".into(),
            });
        }
        depths.push(t);
        points.push(z);
        rho.push(r);
    }
    Ok(ProbeSet {
        base: i,
        depths,
        points,
        rho,
        kappa,
        rho_uncertainty: mesh.spacing(),
    })
}
