//! Command-line front end: experiment orchestration over the operator
//! library, flat key=value configuration with flag overrides, and
//! JSON/CSV report emission.
//!
//! Exit codes: 0 all checks passed, 1 tolerance breach or invariant
//! failure, 2 usage or configuration error.

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riesz_workbench::boundary::{norm, probe_ladder, sub, BoundaryMesh};
use riesz_workbench::clifford::{conj_sign, MulTable, MAX_DIM};
use riesz_workbench::error::{Error, Result};
use riesz_workbench::metrics::{
    besov_seminorm, bmo_sharp, holder_seminorm, refinement_study, Family, FieldRef, SeminormKind,
};
use riesz_workbench::operators::{
    cauchy_domain, cauchy_domain_subtracted, cauchy_pv, cauchy_pv_ladder, nontangential_trace,
    recover_normal, riesz_pv, riesz_pv_checked, CliffordField, ScalarField,
};
use riesz_workbench::poly::{
    parse_poly, semmes_decompose, summability_report, MSchedule, SphericalExpansion,
};
use riesz_workbench::report::{parse_config, CheckItem, CsvTable, RunReport};
use riesz_workbench::Mv;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_SEED: u64 = 7_310_113;

#[derive(Parser)]
#[command(
    name = "rwb",
    version,
    about = "Workbench for singular integral operators on discretized closed boundaries"
)]
struct Cli {
    /// Flat key=value config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the JSON report and CSV tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Single accumulation lane and fixed seeds; identical configs
    /// produce byte-identical JSON.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Multiplies every tolerance in the run.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the Clifford algebra invariants for dimensions 2..=n.
    VerifyClifford {
        /// Largest ambient dimension to verify (2..=6).
        #[arg(long)]
        n: Option<usize>,
        /// Seed for the random multivector samples.
        #[arg(long)]
        seed: Option<u64>,
        /// Test-harness hook: flip the sign of the blade product
        /// e1 * e2 so the anticommutation check fails.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Run the operator identity suite on a smooth boundary family.
    VerifyIdentities {
        /// Boundary family: ellipse[:a,b], circle, bump[:alpha,amp].
        #[arg(long)]
        family: Option<String>,
        /// Node count of the mesh.
        #[arg(long = "N")]
        n_nodes: Option<usize>,
        /// Flip orientation and exercise the unbounded-domain branch.
        #[arg(long)]
        exterior: bool,
    },
    /// Decompose an odd harmonic polynomial kernel and check the two
    /// defining identities at random sample points.
    Semmes {
        /// Homogeneous polynomial literal, e.g. "x1*x2*x3".
        #[arg(long)]
        poly: Option<String>,
        /// Ambient dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Seed for the random sample points.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Spherical-harmonic mode ladder and weighted summability report.
    Expand {
        /// Mode list "l=3:1.0,l=5:0.25" (coefficient of the first
        /// harmonic in each degree).
        #[arg(long)]
        modes: Option<String>,
        /// Ambient dimension (2 or 3).
        #[arg(long)]
        n: Option<usize>,
        /// Derivative-order schedule: "l2" or "const:K".
        #[arg(long)]
        mschedule: Option<String>,
        /// Constant prefactor of the weighted terms.
        #[arg(long)]
        c: Option<f64>,
        /// Pad the ladder to this degree.
        #[arg(long)]
        l_max: Option<usize>,
    },
    /// Refinement study: Holder seminorm of a Riesz transform output
    /// across a mesh ladder, with a bounded/divergent verdict.
    Regularity {
        /// Boundary family: ellipse[:a,b], circle, square[:side],
        /// bump[:alpha,amp].
        #[arg(long)]
        family: Option<String>,
        /// Holder exponent of the classifier seminorm.
        #[arg(long)]
        alpha: Option<f64>,
        /// Riesz component to transform (0-based).
        #[arg(long)]
        component: Option<usize>,
        /// Comma-separated node counts of the refinement ladder.
        #[arg(long = "N")]
        levels: Option<String>,
        /// Also report the BMO-p sharp seminorm at the finest level.
        #[arg(long)]
        p: Option<f64>,
        /// Also report the Besov (p, s) seminorm at the finest level
        /// (requires --p).
        #[arg(long)]
        s: Option<f64>,
    },
    /// Emit a mesh file for a family, or inspect an existing one.
    Mesh {
        /// Boundary family to emit.
        #[arg(long)]
        family: Option<String>,
        /// Node count of the emitted mesh.
        #[arg(long = "N")]
        n_nodes: Option<usize>,
        /// Load and summarize this mesh file instead of emitting.
        #[arg(long)]
        inspect: Option<PathBuf>,
    },
}

/// Effective settings: config-file values overlaid by CLI flags.
struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    fn new(config: &Option<PathBuf>) -> Result<Self> {
        let map = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Settings { map })
    }

    fn set<T: ToString>(&mut self, key: &str, flag: &Option<T>) {
        if let Some(v) = flag {
            self.map.insert(key.to_string(), v.to_string());
        }
    }

    fn set_bool(&mut self, key: &str, flag: bool) {
        if flag {
            self.map.insert(key.to_string(), "true".to_string());
        }
    }

    fn default<T: ToString>(&mut self, key: &str, value: T) {
        self.map
            .entry(key.to_string())
            .or_insert_with(|| value.to_string());
    }

    fn str(&self, key: &str) -> String {
        self.map.get(key).cloned().unwrap_or_default()
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.str(key)
            .parse()
            .map_err(|_| Error::Config(format!("bad value for {key}: {:?}", self.str(key))))
    }

    fn flag(&self, key: &str) -> bool {
        self.str(key) == "true"
    }
}

fn parse_family(text: &str) -> Result<Family> {
    let (name, args) = match text.split_once(':') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    let nums: Vec<f64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad family parameter {t:?}")))
            })
            .collect::<Result<_>>()?
    };
    match (name, nums.as_slice()) {
        ("circle", []) => Ok(Family::Ellipse { a: 1.0, b: 1.0 }),
        ("circle", [r]) => Ok(Family::Ellipse { a: *r, b: *r }),
        ("ellipse", []) => Ok(Family::Ellipse { a: 2.0, b: 1.0 }),
        ("ellipse", [a, b]) => Ok(Family::Ellipse { a: *a, b: *b }),
        ("square", []) => Ok(Family::Square { side: 1.0 }),
        ("square", [side]) => Ok(Family::Square { side: *side }),
        ("bump" | "bump_circle", [alpha, amplitude]) => Ok(Family::BumpCircle {
            alpha: *alpha,
            amplitude: *amplitude,
        }),
        ("bump" | "bump_circle", []) => Ok(Family::BumpCircle {
            alpha: 0.5,
            amplitude: 0.1,
        }),
        _ => Err(Error::Config(format!(
            "unknown family {text:?}; expected circle[:r], ellipse[:a,b], square[:side] or bump[:alpha,amplitude]"
        ))),
    }
}

fn is_circle(f: &Family) -> bool {
    matches!(f, Family::Ellipse { a, b } if a == b)
}

fn emit(report: &RunReport, out: &Option<PathBuf>, tables: &[(&str, CsvTable)]) -> Result<()> {
    let json = report.to_json()?;
    print!("{json}");
    for item in &report.checks {
        let status = if item.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} {} value={:.6e} tolerance={:.6e}",
            item.name, item.value, item.tolerance
        );
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        report.save_json(&dir.join("report.json"))?;
        for (name, table) in tables {
            table.save(&dir.join(format!("{name}.csv")))?;
        }
        println!("reports written to {}", dir.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify-clifford
// ---------------------------------------------------------------------------

/// Blade-coefficient product through the cached table, with the
/// fault-injection hook: when `fault` matches a pair of pure basis
/// blades, the product's sign is flipped.
fn table_mul(table: &MulTable, a: &[f64], b: &[f64], out: &mut [f64], fault: Option<(u32, u32)>) {
    table.mul_into(a, b, out);
    if let Some((fa, fb)) = fault {
        let pure = |v: &[f64], m: u32| {
            v.iter()
                .enumerate()
                .all(|(i, c)| (i as u32 == m) == (*c != 0.0))
        };
        if pure(a, fa) && pure(b, fb) {
            for c in out.iter_mut() {
                *c = -*c;
            }
        }
    }
}

fn coeff_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn basis_vec(dim: usize, mask: u32) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[mask as usize] = 1.0;
    v
}

fn clifford_suite(
    n_max: usize,
    seed: u64,
    fault: Option<(u32, u32)>,
    report: &mut RunReport,
) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n_max) {
        return Err(Error::Config(format!("--n must lie in 2..={MAX_DIM}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=n_max {
        let table = MulTable::new(n)?;
        let dim = table.dim();
        let mut out = vec![0.0; dim];
        let mut tmp = vec![0.0; dim];

        // generator squares: e_j * e_j = -1
        let mut unit_residual = 0.0f64;
        for j in 0..n {
            let e = basis_vec(dim, 1 << j);
            table_mul(&table, &e, &e, &mut out, fault);
            out[0] += 1.0;
            unit_residual = unit_residual.max(coeff_norm(&out));
        }
        report.push(CheckItem::new(
            &format!("n{n}_generator_squares"),
            unit_residual,
            0.0,
        ));

        // anticommutation: e_i e_j + e_j e_i = 0, i != j
        let mut anti_residual = 0.0f64;
        let mut offending = String::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (basis_vec(dim, 1 << i), basis_vec(dim, 1 << j));
                table_mul(&table, &a, &b, &mut out, fault);
                table_mul(&table, &b, &a, &mut tmp, fault);
                let r = coeff_norm(
                    &out.iter().zip(&tmp).map(|(x, y)| x + y).collect::<Vec<_>>(),
                );
                if r > anti_residual {
                    anti_residual = r;
                    offending = format!("blade pair (e{}, e{})", i + 1, j + 1);
                }
            }
        }
        report.push(
            CheckItem::new(&format!("n{n}_anticommutation"), anti_residual, 0.0)
                .with_details(if anti_residual > 0.0 {
                    format!("worst {offending}")
                } else {
                    "all generator pairs anticommute".to_string()
                }),
        );

        // associativity on basis blades: exhaustive for n <= 4,
        // randomly sampled triples above
        let mut assoc_residual = 0.0f64;
        let mut worst_triple = String::new();
        let triples: Vec<(u32, u32, u32)> = if n <= 4 {
            (0..dim as u32)
                .flat_map(|a| {
                    (0..dim as u32).flat_map(move |b| (0..dim as u32).map(move |c| (a, b, c)))
                })
                .collect()
        } else {
            (0..4000)
                .map(|_| {
                    (
                        rng.gen_range(0..dim as u32),
                        rng.gen_range(0..dim as u32),
                        rng.gen_range(0..dim as u32),
                    )
                })
                .collect()
        };
        let mut left = vec![0.0; dim];
        for (a, b, c) in triples {
            let (va, vb, vc) = (basis_vec(dim, a), basis_vec(dim, b), basis_vec(dim, c));
            table_mul(&table, &va, &vb, &mut tmp, fault);
            table_mul(&table, &tmp, &vc, &mut left, fault);
            table_mul(&table, &vb, &vc, &mut tmp, fault);
            table_mul(&table, &va, &tmp, &mut out, fault);
            let r = coeff_norm(
                &left
                    .iter()
                    .zip(&out)
                    .map(|(x, y)| x - y)
                    .collect::<Vec<_>>(),
            );
            if r > assoc_residual {
                assoc_residual = r;
                worst_triple = format!("blade masks ({a:#x}, {b:#x}, {c:#x})");
            }
        }
        report.push(
            CheckItem::new(&format!("n{n}_associativity"), assoc_residual, 0.0).with_details(
                if assoc_residual > 0.0 {
                    format!("worst {worst_triple}")
                } else {
                    "associative on all tested blade triples".to_string()
                },
            ),
        );

        // random multivectors: distributivity, submultiplicativity,
        // conjugation anti-automorphism
        let rand_mv = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let conj = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .map(|(i, c)| conj_sign((i as u32).count_ones()) as f64 * c)
                .collect()
        };
        let mut dist_residual = 0.0f64;
        let mut sub_ratio = 0.0f64;
        let mut conj_residual = 0.0f64;
        let bound = 2.0f64.powf(n as f64 / 2.0);
        for _ in 0..2000 {
            let (x, y, z) = (rand_mv(&mut rng), rand_mv(&mut rng), rand_mv(&mut rng));
            let yz: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
            table_mul(&table, &x, &yz, &mut out, fault);
            table_mul(&table, &x, &y, &mut tmp, fault);
            table_mul(&table, &x, &z, &mut left, fault);
            let r = coeff_norm(
                &out.iter()
                    .zip(tmp.iter().zip(&left))
                    .map(|(s, (a, b))| s - a - b)
                    .collect::<Vec<_>>(),
            );
            dist_residual = dist_residual.max(r / coeff_norm(&x).max(1.0));

            table_mul(&table, &x, &y, &mut out, fault);
            let denom = bound * coeff_norm(&x) * coeff_norm(&y);
            if denom > 0.0 {
                sub_ratio = sub_ratio.max(coeff_norm(&out) / denom);
            }

            table_mul(&table, &conj(&y), &conj(&x), &mut tmp, fault);
            let cr = coeff_norm(
                &conj(&out)
                    .iter()
                    .zip(&tmp)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
            );
            conj_residual = conj_residual.max(cr / coeff_norm(&out).max(1.0));
        }
        report.push(CheckItem::new(
            &format!("n{n}_distributivity"),
            dist_residual,
            1e-12,
        ));
        report.push(
            CheckItem::new(&format!("n{n}_submultiplicativity"), sub_ratio, 1.0)
                .with_details(format!("|ab| <= 2^(n/2) |a| |b|, worst ratio {sub_ratio:.6}")),
        );
        report.push(CheckItem::new(
            &format!("n{n}_conjugation_reversal"),
            conj_residual,
            1e-12,
        ));
    }
    Ok(())
}

fn cmd_verify_clifford(settings: &Settings, report: &mut RunReport) -> Result<()> {
    let n: usize = settings.parse("n")?;
    let seed: u64 = settings.parse("seed")?;
    let fault = if settings.flag("inject_fault") {
        Some((1u32, 2u32))
    } else {
        None
    };
    println!("seed={seed}");
    report.meta("seed", seed.to_string());
    clifford_suite(n, seed, fault, report)
}

// ---------------------------------------------------------------------------
// verify-identities
// ---------------------------------------------------------------------------

fn trig_field(mesh: &BoundaryMesh) -> Result<CliffordField> {
    let n_nodes = mesh.len();
    let values = (0..n_nodes)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n_nodes as f64;
            let mut m = Mv::zero(mesh.n)?;
            *m.coeff_mut(riesz_workbench::clifford::BladeIndex::scalar()) = (2.0 * t).cos();
            let mut coeffs = m.coeffs().to_vec();
            coeffs[1] = t.sin();
            coeffs[2] = t.cos();
            Mv::from_coeffs(mesh.n, coeffs)
        })
        .collect::<Result<_>>()?;
    CliffordField::from_values(mesh.n, values)
}

fn cmd_verify_identities(settings: &Settings, report: &mut RunReport) -> Result<()> {
    let family = parse_family(&settings.str("family"))?;
    if matches!(family, Family::Square { .. }) {
        return Err(Error::Config(
            "the identity suite requires a smooth boundary: on the square the \
             exclusion quadrature loses its symmetry near the corners, so pv \
             identities are not meaningful there; use the `regularity` command \
             for square experiments"
                .into(),
        ));
    }
    let n_nodes: usize = settings.parse("N")?;
    let ts: f64 = settings.parse("tol_scale")?;
    let exterior = settings.flag("exterior");
    let mut mesh = family.build(n_nodes)?;
    if exterior {
        mesh = mesh.flip_orientation();
    }
    report.meta("mesh", mesh.label.clone());
    report.meta("nodes", mesh.len().to_string());

    let centroid = mesh.centroid();
    let ones = ScalarField::constant(mesh.len(), 1.0);
    let one_field = CliffordField::from_scalar(mesh.n, &ones)?;
    let probe_idx: Vec<usize> = (0..8).map(|k| k * mesh.len() / 8).collect();
    let scaled_pts = |factor: f64| -> Vec<[f64; 3]> {
        probe_idx
            .iter()
            .map(|&i| {
                let x = mesh.nodes[i];
                [
                    centroid[0] + factor * (x[0] - centroid[0]),
                    centroid[1] + factor * (x[1] - centroid[1]),
                    centroid[2] + factor * (x[2] - centroid[2]),
                ]
            })
            .collect()
    };

    // reproducing property of the Cauchy integral on the ambient
    // constant: 1 in the bounded component (bounded orientation),
    // 0 in the unbounded component
    if exterior {
        let vals = cauchy_domain(&mesh, &one_field, &scaled_pts(1.6))?;
        let resid = vals
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.norm()));
        report.push(
            CheckItem::new("cauchy_constant_unbounded", resid, 1e-6 * ts)
                .with_details("C1 = 0 in the unbounded domain".into()),
        );
    } else {
        let vals = cauchy_domain(&mesh, &one_field, &scaled_pts(0.7))?;
        let mut resid = 0.0f64;
        for v in &vals.values {
            let mut d = v.clone();
            *d.coeff_mut(riesz_workbench::clifford::BladeIndex::scalar()) -= 1.0;
            resid = resid.max(d.norm());
        }
        report.push(
            CheckItem::new("cauchy_constant_interior", resid, 1e-6 * ts)
                .with_details("C1 = 1 at interior points of relative depth >= 0.3".into()),
        );
        let vals = cauchy_domain(&mesh, &one_field, &scaled_pts(1.6))?;
        let resid = vals
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.norm()));
        report.push(CheckItem::new("cauchy_constant_exterior", resid, 1e-6 * ts));
    }

    // pv value of the constant: +1/2 bounded, -1/2 unbounded. The
    // exclusion engine injects the half analytically (the subtracted
    // integrand vanishes), so this is exact; the epsilon-ladder route
    // reaches the same value by extrapolated truncation.
    let half = if mesh.bounded { 0.5 } else { -0.5 };
    let pv1 = cauchy_pv(&mesh, &one_field)?;
    let mut resid = 0.0f64;
    for v in &pv1.values {
        let mut d = v.clone();
        *d.coeff_mut(riesz_workbench::clifford::BladeIndex::scalar()) -= half;
        resid = resid.max(d.norm());
    }
    report.push(CheckItem::new("cauchy_pv_half_exclusion", resid, 1e-12 * ts));
    let (ladder, unc) = cauchy_pv_ladder(&mesh, &one_field)?;
    let mut resid = 0.0f64;
    for v in &ladder.values {
        let mut d = v.clone();
        *d.coeff_mut(riesz_workbench::clifford::BladeIndex::scalar()) -= half;
        resid = resid.max(d.norm());
    }
    report.push(
        CheckItem::new("cauchy_pv_half_epsilon_ladder", resid, 1e-3 * ts)
            .with_details(format!("Richardson ladder uncertainty {unc:.3e}")),
    );

    // involution: (C^pv)^2 = 1/4 on a trigonometric Clifford field
    let g = trig_field(&mesh)?;
    let once = cauchy_pv(&mesh, &g)?;
    let twice = cauchy_pv(&mesh, &once)?;
    let scale = g.sup_norm();
    let mut resid = 0.0f64;
    for (a, b) in twice.values.iter().zip(&g.values) {
        resid = resid.max((a - &b.scale(0.25)).norm());
    }
    report.push(
        CheckItem::new("cauchy_pv_squared_quarter", resid / scale, 5e-3 * ts)
            .with_details("relative to the sup of the input field".into()),
    );

    // pv engine cross-check: exclusion vs Richardson-extrapolated
    // truncation for the first Riesz component
    let check = riesz_pv_checked(&mesh, 0, &ones)?;
    report.push(
        CheckItem::new("riesz_pv_route_agreement", check.max_disagreement, 2e-3 * ts)
            .with_details(format!(
                "agreement is limited by the Richardson ladder, not the exclusion \
                 engine; ladder uncertainty {:.3e}",
                check.ladder_uncertainty
            )),
    );

    if !exterior {
        // normal recovery nu_rec = -4 C^pv(sum_j (R_j^pv 1) e_j)
        let rec = recover_normal(&mesh)?;
        let tol = if is_circle(&family) { 1e-6 } else { 1e-2 };
        report.push(
            CheckItem::new("normal_recovery", rec.max_error, tol * ts).with_details(format!(
                "max angular error {:.3e} rad",
                rec.max_angular_error
            )),
        );

        if is_circle(&family) {
            // half-normal identity R_j^pv 1 = nu_j / 2 on the circle
            let mut resid = 0.0f64;
            for j in 0..mesh.n {
                let rj = riesz_pv(&mesh, j, &ones)?;
                for (v, nu) in rj.values.iter().zip(&mesh.normals) {
                    resid = resid.max((v - nu[j] / 2.0).abs());
                }
            }
            report.push(CheckItem::new("riesz_half_normal", resid, 1e-4 * ts));
        }

        // jump formula: nontangential limit of C(nu) equals
        // nu/2 + C^pv(nu)
        let nu_field = CliffordField::from_vectors(mesh.n, &mesh.normals)?;
        let pv_nu = cauchy_pv(&mesh, &nu_field)?;
        let mut resid = 0.0f64;
        for &i in &[0usize, mesh.len() / 3] {
            let probe = probe_ladder(&mesh, i, 0.1, 0.5, 7, 1.0)?;
            let trace = nontangential_trace(
                |z| Ok(cauchy_domain_subtracted(&mesh, &nu_field, i, &[*z])?[0].clone()),
                &probe,
            )?;
            let expected = &nu_field.values[i].scale(0.5) + &pv_nu.values[i];
            resid = resid.max((&trace.limit - &expected).norm());
        }
        report.push(
            CheckItem::new("jump_formula", resid, 1e-2 * ts)
                .with_details("nontangential trace of C(nu) vs nu/2 + C^pv(nu)".into()),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// semmes
// ---------------------------------------------------------------------------

fn shell_points(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (0.5..=2.0).contains(&r) {
            pts.push(x);
        }
    }
    pts
}

fn cmd_semmes(settings: &Settings, report: &mut RunReport) -> Result<()> {
    let n: usize = settings.parse("n")?;
    let literal = settings.str("poly");
    if literal.is_empty() {
        return Err(Error::Config("semmes requires --poly".into()));
    }
    let seed: u64 = settings.parse("seed")?;
    let ts: f64 = settings.parse("tol_scale")?;
    println!("seed={seed}");
    report.meta("seed", seed.to_string());
    let p = parse_poly(n, &literal)?;
    let family = semmes_decompose(&p, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = shell_points(n, 100, &mut rng);
    let res = family.residuals(&points)?;
    report.meta("degree", p.degree().to_string());

    // homogeneity k_rs(t x) = t^{-(n-1)} k_rs(x) at random dilations
    let mut hom_resid = 0.0f64;
    for x in points.iter().take(10) {
        let t: f64 = rng.gen_range(0.5..2.0);
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        for r in 0..n {
            for s in 0..n {
                let v = family.eval_krs(r, s, x);
                let vt = family.eval_krs(r, s, &tx);
                for j in 0..n {
                    let scaled = v[j] * t.powi(-(n as i32 - 1));
                    hom_resid =
                        hom_resid.max((vt[j] - scaled).norm() / v[j].norm().max(1.0));
                }
            }
        }
    }

    let pro1_tol = if n == 2 { 1e-8 } else { 1e-9 };
    report.push(
        CheckItem::new("pro1_reproduction", res.pro1, pro1_tol * ts)
            .with_details("sum of s-components of k_rs reproduces P(x)/|x|^{n-1+l}".into()),
    );
    if n >= 3 {
        report.push(
            CheckItem::new("pro2_dirac_scalar", res.pro2, 1e-9 * ts).with_details(
                "scalar part of D k_rs matches the gradient-potential target".into(),
            ),
        );
    }
    report.push(CheckItem::new("imaginary_residue", res.imag, 1e-10 * ts));
    report.push(CheckItem::new(
        "homogeneity_minus_n_minus_1",
        hom_resid,
        1e-9 * ts,
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

fn parse_modes(text: &str) -> Result<Vec<(usize, f64)>> {
    text.split(',')
        .map(|item| {
            let item = item.trim().trim_start_matches("l=");
            let (l, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("bad mode {item:?}, expected l=DEG:COEFF")))?;
            Ok((
                l.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad mode degree {l:?}")))?,
                c.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad mode coefficient {c:?}")))?,
            ))
        })
        .collect()
}

fn parse_schedule(text: &str) -> Result<MSchedule> {
    if text == "l2" {
        return Ok(MSchedule::LSquared);
    }
    if let Some(k) = text.strip_prefix("const:") {
        return Ok(MSchedule::Constant(k.parse().map_err(|_| {
            Error::Config(format!("bad schedule constant {k:?}"))
        })?));
    }
    Err(Error::Config(format!(
        "unknown mschedule {text:?}; expected \"l2\" or \"const:K\""
    )))
}

fn cmd_expand(settings: &Settings, report: &mut RunReport) -> Result<(CsvTable, bool)> {
    let modes_text = settings.str("modes");
    if modes_text.is_empty() {
        return Err(Error::Config("expand requires --modes".into()));
    }
    let n: usize = settings.parse("n")?;
    let pairs = parse_modes(&modes_text)?;
    let schedule = parse_schedule(&settings.str("mschedule"))?;
    let c: f64 = settings.parse("c")?;
    let mut exp = SphericalExpansion::from_modes(n, &pairs)?;
    let max_l = pairs.iter().map(|(l, _)| *l).max().unwrap_or(0);
    let l_max: usize = settings.parse("l_max")?;
    let l_max = l_max.max(max_l);
    while exp.modes.len() <= l_max {
        let l = exp.modes.len();
        exp.modes.push(riesz_workbench::poly::Mode {
            l,
            coeffs: vec![0.0; exp.modes.last().map(|m| m.coeffs.len()).unwrap_or(2)],
        });
    }
    exp.l_max = l_max;

    let sum = summability_report(&exp, c, schedule);
    let mut table = CsvTable::new(&["l", "m_l", "ln_term", "term"]);
    for row in &sum.rows {
        table.row(vec![
            row.l.to_string(),
            row.m_l.to_string(),
            CsvTable::num(row.ln_term),
            CsvTable::num(row.term),
        ]);
    }
    report.meta("ln_total", format!("{:.17e}", sum.ln_total));
    report.meta("total_l2", format!("{:.17e}", exp.total_l2()));
    report.push(CheckItem::qualitative(
        "weighted_summability",
        true,
        format!(
            "verdict: {}; ln of the weighted sum = {:.6e}",
            if sum.convergent {
                "convergent tail"
            } else {
                "divergent or undecided tail"
            },
            sum.ln_total
        ),
    ));
    Ok((table, sum.convergent))
}

// ---------------------------------------------------------------------------
// regularity
// ---------------------------------------------------------------------------

fn cmd_regularity(settings: &Settings, report: &mut RunReport) -> Result<CsvTable> {
    let family = parse_family(&settings.str("family"))?;
    let alpha: f64 = settings.parse("alpha")?;
    let component: usize = settings.parse("component")?;
    let levels: Vec<usize> = settings
        .str("N")
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad node count {t:?}")))
        })
        .collect::<Result<_>>()?;
    let bt: f64 = settings.parse("bounded_threshold")?;
    let dt: f64 = settings.parse("divergent_threshold")?;
    let cls = refinement_study(&family, component, alpha, &levels, bt, dt)?;

    let mut table = CsvTable::new(&["n_nodes", "spacing", "holder_seminorm", "ratio"]);
    for level in &cls.levels {
        table.row(vec![
            level.n_nodes.to_string(),
            CsvTable::num(level.spacing),
            CsvTable::num(level.seminorm),
            level.ratio.map(CsvTable::num).unwrap_or_default(),
        ]);
    }
    report.meta("family", cls.family.clone());
    report.meta("verdict", cls.verdict.as_str().to_string());
    report.push(CheckItem::qualitative(
        "refinement_verdict",
        true,
        format!(
            "{} at alpha={} (thresholds {}/{})",
            cls.verdict.as_str(),
            alpha,
            bt,
            dt
        ),
    ));

    // optional companion seminorms of R_j 1 at the finest level
    if let Ok(p) = settings.parse::<f64>("p") {
        let mesh = family.build(*levels.last().unwrap())?;
        let ones = ScalarField::constant(mesh.len(), 1.0);
        let r = riesz_pv(&mesh, component, &ones)?;
        let field = FieldRef::Scalar(&r);
        let radii: Vec<f64> = (1..=5)
            .map(|k| mesh.spacing() * 4.0 * k as f64)
            .collect();
        let bmo = bmo_sharp(&mesh, field, &radii, p)?;
        report.push(CheckItem::qualitative(
            "bmo_sharp_seminorm",
            true,
            format!("p={p}: {:.6e}", bmo.value),
        ));
        if let Ok(s) = settings.parse::<f64>("s") {
            let besov = besov_seminorm(&mesh, field, p, s)?;
            report.push(CheckItem::qualitative(
                "besov_seminorm",
                true,
                format!("p={p}, s={s}: {:.6e}", besov.value),
            ));
        }
        let holder = holder_seminorm(&mesh, field, alpha, 3.0 * mesh.spacing())?;
        if let SeminormKind::Holder { alpha: a } = holder.kind {
            report.push(CheckItem::qualitative(
                "holder_seminorm_finest",
                true,
                format!("alpha={a}: {:.6e}", holder.value),
            ));
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// mesh
// ---------------------------------------------------------------------------

fn cmd_mesh(settings: &Settings, out: &Option<PathBuf>, report: &mut RunReport) -> Result<()> {
    let inspect = settings.str("inspect");
    let mesh = if !inspect.is_empty() {
        BoundaryMesh::load(Path::new(&inspect))?
    } else {
        let family = parse_family(&settings.str("family"))?;
        let n_nodes: usize = settings.parse("N")?;
        let mesh = family.build(n_nodes)?;
        let dir = out
            .clone()
            .ok_or_else(|| Error::Config("mesh emission requires --out".into()))?;
        std::fs::create_dir_all(&dir)?;
        let file: String = mesh
            .label
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { '_' })
            .collect();
        let path = dir.join(format!("{file}.txt"));
        mesh.save(&path)?;
        println!("mesh written to {}", path.display());
        mesh
    };
    report.meta("label", mesh.label.clone());
    report.meta("n", mesh.n.to_string());
    report.meta("bounded", mesh.bounded.to_string());
    report.meta("nodes", mesh.len().to_string());
    report.meta("total_measure", format!("{:.17e}", mesh.total_measure()));
    report.meta("diameter", format!("{:.17e}", mesh.diameter()));
    report.meta("spacing", format!("{:.17e}", mesh.spacing()));
    let mut unit_norm = 0.0f64;
    for nu in &mesh.normals {
        unit_norm = unit_norm.max((norm(nu) - 1.0).abs());
    }
    report.push(CheckItem::new("unit_normals", unit_norm, 1e-12));
    let c = mesh.centroid();
    let mut outward = true;
    for (x, nu) in mesh.nodes.iter().zip(&mesh.normals) {
        let d = sub(x, &c);
        if (d[0] * nu[0] + d[1] * nu[1] + d[2] * nu[2]) * if mesh.bounded { 1.0 } else { -1.0 }
            <= 0.0
        {
            outward = false;
        }
    }
    report.push(CheckItem::qualitative(
        "orientation_consistent",
        outward,
        "sign of <x - centroid, nu> matches the bounded flag at every node".into(),
    ));
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<bool> {
    let mut settings = Settings::new(&cli.config)?;
    settings.set("tol_scale", &cli.tol_scale);
    settings.set_bool("deterministic", cli.deterministic);
    settings.default("tol_scale", 1.0);
    let deterministic = settings.flag("deterministic");

    let mut tables: Vec<(&str, CsvTable)> = Vec::new();
    let mut report;
    match &cli.cmd {
        Cmd::VerifyClifford {
            n,
            seed,
            inject_fault,
        } => {
            settings.set("n", n);
            settings.set("seed", seed);
            settings.set_bool("inject_fault", *inject_fault);
            settings.default("n", 3);
            settings.default("seed", DEFAULT_SEED);
            report = RunReport::new("verify-clifford", settings.map.clone(), deterministic);
            cmd_verify_clifford(&settings, &mut report)?;
        }
        Cmd::VerifyIdentities {
            family,
            n_nodes,
            exterior,
        } => {
            settings.set("family", family);
            settings.set("N", n_nodes);
            settings.set_bool("exterior", *exterior);
            settings.default("family", "ellipse:2,1");
            settings.default("N", 1024);
            report = RunReport::new("verify-identities", settings.map.clone(), deterministic);
            cmd_verify_identities(&settings, &mut report)?;
        }
        Cmd::Semmes { poly, n, seed } => {
            settings.set("poly", poly);
            settings.set("n", n);
            settings.set("seed", seed);
            settings.default("n", 3);
            settings.default("seed", DEFAULT_SEED);
            report = RunReport::new("semmes", settings.map.clone(), deterministic);
            cmd_semmes(&settings, &mut report)?;
        }
        Cmd::Expand {
            modes,
            n,
            mschedule,
            c,
            l_max,
        } => {
            settings.set("modes", modes);
            settings.set("n", n);
            settings.set("mschedule", mschedule);
            settings.set("c", c);
            settings.set("l_max", l_max);
            settings.default("n", 2);
            settings.default("mschedule", "l2");
            settings.default("c", 1.0);
            settings.default("l_max", 12);
            report = RunReport::new("expand", settings.map.clone(), deterministic);
            let (table, _) = cmd_expand(&settings, &mut report)?;
            tables.push(("summability", table));
        }
        Cmd::Regularity {
            family,
            alpha,
            component,
            levels,
            p,
            s,
        } => {
            settings.set("family", family);
            settings.set("alpha", alpha);
            settings.set("component", component);
            settings.set("N", levels);
            settings.set("p", p);
            settings.set("s", s);
            settings.default("family", "ellipse:2,1");
            settings.default("alpha", 0.5);
            settings.default("component", 0);
            settings.default("N", "256,1024,4096");
            settings.default("bounded_threshold", 1.1);
            settings.default("divergent_threshold", 1.5);
            report = RunReport::new("regularity", settings.map.clone(), deterministic);
            let table = cmd_regularity(&settings, &mut report)?;
            tables.push(("levels", table));
        }
        Cmd::Mesh {
            family,
            n_nodes,
            inspect,
        } => {
            settings.set("family", family);
            settings.set("N", n_nodes);
            settings.set("inspect", &inspect.as_ref().map(|p| p.display().to_string()));
            settings.default("family", "ellipse:2,1");
            settings.default("N", 256);
            report = RunReport::new("mesh", settings.map.clone(), deterministic);
            cmd_mesh(&settings, &cli.out, &mut report)?;
        }
    }
    emit(&report, &cli.out, &tables)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
