//! One function per subcommand. Inputs are parsed with path-qualified
//! errors; every report is assembled from the library's result types.

use crate::output::{cell, Report};
use crate::{Global, SolverArgs};
use anyhow::{bail, Context, Result};
use clap::Args;
use rand::Rng;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use wbm::corpus::{instance_rng, random_body, random_pairs, Kind};
use wbm::io::{
    body_to_value, fmt_f64, measure_from_name, measure_to_value, nu_to_value, parse_body, parse_measure,
    parse_nu, solve_report_to_value, to_json_string, to_value,
};
use wbm::measures::{boundary_mass, lambda_check as lambda_probe, log_grid, mass_and_facets, mc_mass, LambdaConfig};
use wbm::minkowski::{self, ProbeMode, SolveOptions, SolveReport};
use wbm::projection::{self, ShephardBound};
use wbm::suites::{self, dominated_scale, SuiteArgs};
use wbm::surfmeas::{mixed_measure, mixed_measure_q, mixed_report, surface_measure, surface_measure_q, DEFAULT_EPS};
use wbm::{DensitySpec, HPolytope, QuadConfig, SphericalAtomMeasure};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn body(path: &Path) -> Result<HPolytope> {
    parse_body(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn target(path: &Path) -> Result<SphericalAtomMeasure> {
    parse_nu(&read(path)?).with_context(|| format!("{}", path.display()))
}

/// A measure name (`lebesgue`, `gaussian`, `power:<s>`) or a JSON file.
fn measure(spec: &str, dim: usize) -> Result<DensitySpec> {
    let p = Path::new(spec);
    let mu = if p.is_file() {
        parse_measure(&read(p)?, Some(dim)).with_context(|| spec.to_string())?
    } else {
        measure_from_name(spec)?
    };
    mu.validate(dim)?;
    Ok(mu)
}

pub fn quad(g: &Global) -> Result<QuadConfig> {
    let cfg = QuadConfig {
        radial_order: g.radial_order,
        facet_order: g.facet_order,
        tri_level: g.tri_level,
        mc_samples: g.mc_samples,
        seed: g.seed,
        ..QuadConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn solver(s: &SolverArgs) -> Result<SolveOptions> {
    if !(s.tol > 0.0) {
        bail!("--tol must be positive, got {}", s.tol);
    }
    Ok(SolveOptions {
        tol: s.tol,
        max_iters: s.max_iters,
        ..SolveOptions::default()
    })
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn point_cells(v: &wbm::Vec3, dim: usize) -> Vec<String> {
    v[..dim].iter().map(|x| f(*x)).collect()
}

fn point_header(dim: usize, name: &str) -> Vec<String> {
    ["x", "y", "z"][..dim].iter().map(|c| format!("{name}_{c}")).collect()
}

fn trace_table(r: &SolveReport) -> Vec<Vec<String>> {
    r.functional_trace
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), f(*p)])
        .collect()
}

#[derive(Args)]
pub struct SolveCmd {
    /// Measure name or JSON file.
    #[arg(long)]
    measure: String,
    /// Target measure JSON file.
    #[arg(long)]
    nu: PathBuf,
    /// Exponent of μ(K)^{β/n} in the functional.
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// L^q exponent (1 for `solve`, 2 by default for `solve-lq`).
    #[arg(long)]
    q: Option<f64>,
    /// Power family only: rescale so that S^μ_K = ν exactly (c = 1).
    #[arg(long)]
    homogeneous: bool,
    /// Also restart the solver from this many seeded random starts and report
    /// the largest pairwise Hausdorff distance between solutions.
    #[arg(long)]
    restarts: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

pub fn solve(c: &SolveCmd, g: &Global, lq: bool) -> Result<Report> {
    let nu = target(&c.nu)?;
    let mu = measure(&c.measure, nu.dim())?;
    let cfg = quad(g)?;
    let opt = solver(&c.solver)?;
    let q = c.q.unwrap_or(if lq { 2.0 } else { 1.0 });
    let r = if c.homogeneous {
        minkowski::solve_homogeneous(&mu, &nu, q, &cfg, &opt)?
    } else {
        minkowski::solve_q(&mu, c.beta, &nu, q, &cfg, &opt)?
    };
    let mut v = solve_report_to_value(&r);
    v["measure"] = measure_to_value(&mu);
    v["homogeneous"] = json!(c.homogeneous);
    if let Some(n) = c.restarts {
        let mode = if c.homogeneous {
            ProbeMode::Homogeneous { q }
        } else {
            ProbeMode::Solve { beta: c.beta, q }
        };
        let u = minkowski::uniqueness_probe(&mu, &nu, mode, n, g.seed, &cfg, &opt)?;
        v["uniqueness"] = json!({
            "restarts": n,
            "max_pairwise_hausdorff": u.max_pairwise_hausdorff,
            "all_converged": u.all_ok,
        });
    }
    Ok(Report::json(v).with_table(&["iteration", "psi"], trace_table(&r)))
}

#[derive(Args)]
pub struct BodyCmd {
    #[arg(long)]
    measure: String,
    /// Body JSON file.
    #[arg(long)]
    body: PathBuf,
    /// Also realize Π_μK as an H-polytope (3D facet count grows quadratically
    /// in the number of atoms).
    #[arg(long)]
    realize: bool,
}

pub fn project(c: &BodyCmd, g: &Global) -> Result<Report> {
    let k = body(&c.body)?;
    let mu = measure(&c.measure, k.dim())?;
    let cfg = quad(g)?;
    let pb = projection::projection_body(&mu, &k, &cfg);
    let id = projection::surface_area_identity(&mu, &k, &cfg);
    let dim = k.dim();
    let gens = pb.generators();
    let mut v = json!({
        "measure": measure_to_value(&mu),
        "surface_measure": nu_to_value(pb.atoms()),
        "generators": gens.iter().map(|x| x[..dim].to_vec()).collect::<Vec<_>>(),
        "surface_area_identity": to_value(&id),
    });
    if c.realize {
        v["zonotope"] = body_to_value(pb.zonotope()?.body());
    }
    let mut header = vec!["index".to_string()];
    header.extend(point_header(dim, "g"));
    let rows = gens
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut r = vec![i.to_string()];
            r.extend(point_cells(x, dim));
            r
        })
        .collect();
    Ok(Report {
        json: v,
        table: Some((header, rows)),
    })
}

#[derive(Args)]
pub struct MassCmd {
    #[arg(long)]
    measure: String,
    #[arg(long)]
    body: PathBuf,
    /// Add a hit-or-miss Monte Carlo estimate with --mc-samples samples.
    #[arg(long)]
    mc: bool,
}

pub fn mass(c: &MassCmd, g: &Global) -> Result<Report> {
    let k = body(&c.body)?;
    let mu = measure(&c.measure, k.dim())?;
    let cfg = quad(g)?;
    let (m, facets) = mass_and_facets(&mu, &k, &cfg);
    let mut v = json!({
        "measure": measure_to_value(&mu),
        "mass": m,
        "boundary_mass": boundary_mass(&mu, &k, &cfg),
        "facet_masses": facets,
    });
    if c.mc {
        let (est, se) = mc_mass(&mu, &k, g.mc_samples, g.seed);
        v["monte_carlo"] = json!({"estimate": est, "std_error": se, "samples": g.mc_samples});
    }
    let dim = k.dim();
    let mut header = vec!["index".to_string()];
    header.extend(point_header(dim, "u"));
    header.extend(["offset".to_string(), "area".to_string(), "facet_mass".to_string()]);
    let rows = (0..k.len())
        .map(|i| {
            let mut r = vec![i.to_string()];
            r.extend(point_cells(&k.normals()[i], dim));
            r.extend([f(k.offsets()[i]), f(k.facet_areas()[i]), f(facets[i])]);
            r
        })
        .collect();
    Ok(Report {
        json: v,
        table: Some((header, rows)),
    })
}

#[derive(Args)]
pub struct SurfaceCmd {
    #[arg(long)]
    measure: String,
    #[arg(long)]
    body: PathBuf,
    /// L^q surface measure h_K^{1−q}·S^μ_K.
    #[arg(long)]
    q: Option<f64>,
}

fn atom_table(nu: &SphericalAtomMeasure) -> (Vec<String>, Vec<Vec<String>>) {
    let dim = nu.dim();
    let mut header = vec!["index".to_string()];
    header.extend(point_header(dim, "u"));
    header.push("weight".into());
    let rows = nu
        .dirs()
        .iter()
        .zip(nu.weights())
        .enumerate()
        .map(|(i, (u, w))| {
            let mut r = vec![i.to_string()];
            r.extend(point_cells(u, dim));
            r.push(f(*w));
            r
        })
        .collect();
    (header, rows)
}

pub fn surface(c: &SurfaceCmd, g: &Global) -> Result<Report> {
    let k = body(&c.body)?;
    let mu = measure(&c.measure, k.dim())?;
    let cfg = quad(g)?;
    let nu = match c.q {
        Some(q) => surface_measure_q(&mu, &k, q, &cfg)?,
        None => surface_measure(&mu, &k, &cfg),
    };
    let mut v = nu_to_value(&nu);
    v["measure"] = measure_to_value(&mu);
    v["total"] = json!(nu.total());
    Ok(Report {
        json: v,
        table: Some(atom_table(&nu)),
    })
}

#[derive(Args)]
pub struct MixedCmd {
    #[arg(long)]
    measure: String,
    /// First body (the one whose surface measure is used).
    #[arg(long = "K")]
    k: PathBuf,
    /// Second body (whose support is integrated).
    #[arg(long = "L")]
    l: PathBuf,
    /// Also report the L^q mixed measure.
    #[arg(long)]
    q: Option<f64>,
    /// Skip the finite-difference cross-check.
    #[arg(long)]
    no_fd: bool,
}

pub fn mixed(c: &MixedCmd, g: &Global) -> Result<Report> {
    let k = body(&c.k)?;
    let l = body(&c.l)?;
    if k.dim() != l.dim() {
        bail!("K and L have different dimensions ({} and {})", k.dim(), l.dim());
    }
    let mu = measure(&c.measure, k.dim())?;
    let cfg = quad(g)?;
    let mut v = json!({
        "measure": measure_to_value(&mu),
        "mixed": mixed_measure(&mu, &k, &l, &cfg),
    });
    if let Some(q) = c.q {
        v["q"] = json!(q);
        v["mixed_q"] = json!(mixed_measure_q(&mu, &k, &l, q, &cfg)?);
    }
    if !c.no_fd {
        v["finite_difference"] = to_value(&mixed_report(&mu, &k, &l, &DEFAULT_EPS, &cfg)?);
    }
    Ok(Report::json(v))
}

#[derive(Args)]
pub struct BlaschkeCmd {
    #[arg(long)]
    measure: String,
    #[arg(long)]
    body: PathBuf,
    /// Solve the β-μ-Blaschke equation instead (any measure).
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
}

pub fn blaschke(c: &BlaschkeCmd, g: &Global) -> Result<Report> {
    let k = body(&c.body)?;
    let mu = measure(&c.measure, k.dim())?;
    let cfg = quad(g)?;
    let opt = solver(&c.solver)?;
    let (mut v, r) = match c.beta {
        None => {
            let r = minkowski::blaschke(&mu, &k, &cfg, &opt)?;
            (solve_report_to_value(&r), r)
        }
        Some(beta) => {
            let b = minkowski::blaschke_beta(&mu, beta, &k, &cfg, &opt)?;
            let mut v = solve_report_to_value(&b.solve);
            v["target"] = nu_to_value(&b.target);
            v["target_residual_rel"] = json!(b.residual_rel);
            v["mass_ratio"] = json!(b.mass_ratio);
            (v, b.solve)
        }
    };
    v["measure"] = measure_to_value(&mu);
    Ok(Report::json(v).with_table(&["iteration", "psi"], trace_table(&r)))
}

#[derive(Args)]
pub struct ShephardCmd {
    /// Bound name (q1_AK, q1_AL, cor_q1, hard1, cor_hard2, lemma_q1_mixed) or `all`.
    #[arg(long, default_value = "all")]
    bound: String,
    /// Measure of K.
    #[arg(long)]
    mu: String,
    /// Measure of L.
    #[arg(long)]
    nu: String,
    #[arg(long = "K", requires = "l")]
    k: Option<PathBuf>,
    #[arg(long = "L", requires = "k")]
    l: Option<PathBuf>,
    /// Concavity exponent of μ (default 1/α).
    #[arg(long)]
    p: Option<f64>,
    /// Seeded sweep: L a random zonotope, K a random symmetric body dilated
    /// to a random fraction of the largest dominated scale.
    #[arg(long, conflicts_with_all = ["k", "l"])]
    pairs: Option<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

fn bounds(name: &str) -> Result<Vec<ShephardBound>> {
    if name == "all" {
        return Ok(ShephardBound::ALL.to_vec());
    }
    Ok(vec![name.parse::<ShephardBound>().map_err(anyhow::Error::msg)?])
}

fn refuse_gaussian(mu: &DensitySpec) -> Result<()> {
    if *mu == DensitySpec::Gaussian {
        bail!("the Shephard comparison is not meaningful for log-concave measures such as the gaussian");
    }
    Ok(())
}

pub fn shephard(c: &ShephardCmd, g: &Global) -> Result<Report> {
    let cfg = quad(g)?;
    let bs = bounds(&c.bound)?;
    let pairs: Vec<(HPolytope, HPolytope)> = match (&c.k, &c.l, c.pairs) {
        (Some(k), Some(l), _) => vec![(body(k)?, body(l)?)],
        (None, None, Some(n)) => {
            if !(c.dim == 2 || c.dim == 3) {
                bail!("--dim must be 2 or 3");
            }
            let (mu, nu) = (measure(&c.mu, c.dim)?, measure(&c.nu, c.dim)?);
            refuse_gaussian(&mu)?;
            refuse_gaussian(&nu)?;
            (0..n)
                .map(|i| {
                    let mut rng = instance_rng(g.seed, i as u64);
                    let kind = if rng.gen_bool(0.5) { Kind::SymPolygon } else { Kind::Zonotope };
                    let k = random_body(c.dim, kind, &mut rng);
                    let l = random_body(c.dim, Kind::Zonotope, &mut rng);
                    let t = dominated_scale(&mu, &nu, &k, &l, rng.gen_range(0.5..1.0), &cfg);
                    (k.scaled(t), l)
                })
                .collect()
        }
        _ => bail!("give either --K and --L, or --pairs"),
    };
    let dim = pairs[0].0.dim();
    if pairs.iter().any(|(k, l)| k.dim() != dim || l.dim() != dim) {
        bail!("K and L have different dimensions");
    }
    let (mu, nu) = (measure(&c.mu, dim)?, measure(&c.nu, dim)?);
    refuse_gaussian(&mu)?;
    refuse_gaussian(&nu)?;
    let alpha = mu.homogeneity(dim).expect("non-gaussian measures are homogeneous");
    let p = c.p.unwrap_or(1.0 / alpha);
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for (i, (k, l)) in pairs.iter().enumerate() {
        for b in &bs {
            match projection::shephard_check(&mu, &nu, k, l, p, *b, &cfg) {
                Ok(r) => {
                    table.push(vec![
                        i.to_string(),
                        b.name().to_string(),
                        f(r.lhs),
                        f(r.rhs),
                        f(r.slack),
                        f(r.d_pi_used),
                        f(r.hypothesis_margin),
                    ]);
                    rows.push(json!({"pair": i, "bound": b.name(), "report": to_value(&r)}));
                }
                // A single file pair should fail loudly; a sweep records it.
                Err(e) if c.pairs.is_none() && bs.len() == 1 => return Err(e.into()),
                Err(e) => {
                    let msg = e.to_string();
                    table.push(vec![i.to_string(), b.name().to_string(), String::new(), String::new(), String::new(), String::new(), cell(&json!(msg))]);
                    rows.push(json!({"pair": i, "bound": b.name(), "error": msg}));
                }
            }
        }
    }
    let v = json!({
        "mu": measure_to_value(&mu),
        "nu": measure_to_value(&nu),
        "p": p,
        "results": rows,
    });
    Ok(Report::json(v).with_table(
        &["pair", "bound", "lhs", "rhs", "slack", "d_pi_used", "hypothesis_margin"],
        table,
    ))
}

#[derive(Args)]
pub struct StabilityCmd {
    #[arg(long)]
    mu: String,
    #[arg(long)]
    nu: String,
    #[arg(long = "K")]
    k: PathBuf,
    #[arg(long = "L")]
    l: PathBuf,
    /// Required support gap ε > 0.
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

pub fn stability(c: &StabilityCmd, g: &Global) -> Result<Report> {
    let (k, l) = (body(&c.k)?, body(&c.l)?);
    if k.dim() != l.dim() {
        bail!("K and L have different dimensions ({} and {})", k.dim(), l.dim());
    }
    if !(c.eps > 0.0) {
        bail!("--eps must be positive, got {}", c.eps);
    }
    let (mu, nu) = (measure(&c.mu, k.dim())?, measure(&c.nu, k.dim())?);
    refuse_gaussian(&mu)?;
    refuse_gaussian(&nu)?;
    let cfg = quad(g)?;
    let r = projection::stability_check(&mu, &nu, &k, &l, c.eps, &cfg, &solver(&c.solver)?)?;
    let mut v = to_value(&r);
    v["mu"] = measure_to_value(&mu);
    v["nu"] = measure_to_value(&nu);
    Ok(Report::json(v))
}

#[derive(Args)]
pub struct LambdaCmd {
    #[arg(long)]
    measure: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1e-4)]
    r_min: f64,
    #[arg(long, default_value_t = 1e4)]
    r_max: f64,
    #[arg(long, default_value_t = 4)]
    per_decade: usize,
    /// Minimum tail length in grid points.
    #[arg(long, default_value_t = 5)]
    tail: usize,
}

pub fn lambda_check(c: &LambdaCmd, _g: &Global) -> Result<Report> {
    if !(c.dim == 2 || c.dim == 3) {
        bail!("--dim must be 2 or 3");
    }
    if !(c.r_min > 0.0 && c.r_max > c.r_min) {
        bail!("need 0 < --r-min < --r-max");
    }
    let mu = measure(&c.measure, c.dim)?;
    let grid = log_grid(c.r_min, c.r_max, c.per_decade.max(1));
    let lc = LambdaConfig {
        tail: c.tail,
        ..LambdaConfig::default()
    };
    let r = lambda_probe(&mu, c.dim, c.beta, &grid, &lc)?;
    let table = r.r_grid.iter().zip(&r.values).map(|(x, y)| vec![f(*x), f(*y)]).collect();
    let mut v = to_value(&r);
    v["measure"] = measure_to_value(&mu);
    v["beta"] = json!(c.beta);
    Ok(Report::json(v).with_table(&["r", "value"], table))
}

#[derive(Args)]
pub struct VerifyCmd {
    /// Suite name, or `all`.
    #[arg(required_unless_present = "list")]
    suite: Option<String>,
    /// Restrict family-parametrized suites to one measure.
    #[arg(long)]
    measure: Option<String>,
    /// Instances per configuration (suite default when omitted).
    #[arg(long, visible_alias = "pairs")]
    count: Option<usize>,
    /// List the suites and the property each checks.
    #[arg(long)]
    list: bool,
}

pub fn verify(c: &VerifyCmd, g: &Global) -> Result<(Report, bool)> {
    if c.list {
        let v: Vec<Value> = suites::SUITES
            .iter()
            .map(|s| json!({"suite": s.name, "property": s.property}))
            .collect();
        let table = suites::SUITES
            .iter()
            .map(|s| vec![s.name.to_string(), cell(&json!(s.property))])
            .collect();
        return Ok((Report::json(Value::Array(v)).with_table(&["suite", "property"], table), true));
    }
    let name = c.suite.as_deref().expect("clap requires a suite");
    let args = SuiteArgs {
        seed: g.seed,
        count: c.count,
        measure: c.measure.as_deref().map(measure_from_name).transpose()?,
        cfg: quad(g)?,
    };
    let reports = if name == "all" {
        suites::run_all(&args)
    } else {
        let s = suites::find(name).with_context(|| {
            format!("unknown suite '{name}'; known: all, {}", suites::names().join(", "))
        })?;
        vec![s.run(&args)]
    };
    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        eprintln!(
            "{} {}: {} ({} of {} checks failed)",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.property,
            r.failed,
            r.checked
        );
    }
    let mut table = Vec::new();
    for r in &reports {
        for row in &r.rows {
            table.push(vec![
                r.suite.clone(),
                cell(&json!(row.id)),
                f(row.value),
                f(row.limit),
                row.pass.to_string(),
                cell(&json!(row.note.clone().unwrap_or_default())),
            ]);
        }
    }
    let v = json!({
        "seed": g.seed,
        "count": c.count,
        "measure": args.measure.as_ref().map(measure_to_value),
        "pass": pass,
        "suites": to_value(&reports),
    });
    Ok((Report::json(v).with_table(&["suite", "id", "value", "limit", "pass", "note"], table), pass))
}

#[derive(Args)]
pub struct GenCmd {
    /// polygon, sym-polygon, zonotope or box.
    #[arg(long, default_value = "zonotope")]
    kind: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    pairs: usize,
    /// Write `pair_<i>_K.json` and `pair_<i>_L.json` here; otherwise the
    /// bodies are part of the report.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

pub fn gen(c: &GenCmd, g: &Global) -> Result<Report> {
    if !(c.dim == 2 || c.dim == 3) {
        bail!("--dim must be 2 or 3");
    }
    let kind: Kind = c.kind.parse().map_err(anyhow::Error::msg)?;
    let pairs = random_pairs(c.pairs, c.dim, kind, g.seed);
    let v = match &c.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let mut files = Vec::new();
            for (i, (a, b)) in pairs.iter().enumerate() {
                for (tag, k) in [("K", a), ("L", b)] {
                    let p = dir.join(format!("pair_{i:03}_{tag}.json"));
                    std::fs::write(&p, to_json_string(&body_to_value(k)))
                        .with_context(|| format!("cannot write {}", p.display()))?;
                    files.push(p.display().to_string());
                }
            }
            json!({"kind": c.kind, "dim": c.dim, "seed": g.seed, "files": files})
        }
        None => json!({
            "kind": c.kind,
            "dim": c.dim,
            "seed": g.seed,
            "pairs": pairs.iter().map(|(a, b)| json!({"K": body_to_value(a), "L": body_to_value(b)})).collect::<Vec<_>>(),
        }),
    };
    Ok(Report::json(v))
}
