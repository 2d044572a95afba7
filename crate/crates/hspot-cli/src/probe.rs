//! Growth and lower-bound probes driven by scenario files.
//!
//! `growth` and `growth-p` parameters:
//! `geometry` (plane | space), `n`, `data` (zero | constant | abs-power | inverse), `power`,
//! `value`, `m`, `alpha`, `p`, `gamma`, `theta`, `direction`, `radii` or `k_max`, `atoms`,
//! `beta`, `lambda`.
//!
//! `lower-bound` parameters: `n`, `k`, `rho` (r-over-log or a constant), `u` (exp-y-cos-x |
//! height), `r_min`, `r_max`, `n_r`, `n_theta`.

use std::collections::BTreeMap;

use hspot::dirichlet::{BoundaryFunction, DiscreteMeasure};
use hspot::growth::{
    class_membership, default_lambda, dyadic_radii, exceptional_cover, growth_probe_p_plane, growth_probe_p_space,
    lower_bound_probe, lower_bound_refinement, measure_membership_plane, measure_membership_space, polar_grid,
    ClassKind, ClassMembership, ExceptionalCover, GrowthClassSpec, GrowthExponent, LowerBoundProbeSpec, MembershipStatus,
    ProbeStatus, ProbeTable,
};
use hspot::quadrature::QuadratureSpec;
use hspot::space_kernels::norm;
use hspot::{Complex64, VerificationReport};
use serde_json::{json, Value};

use crate::output::{ratio_csv, RunReport};
use crate::scenario::{parse_atoms, Scenario};
use crate::{CliError, CliResult};

const GROWTH_KEYS: [&str; 16] = [
    "geometry", "n", "data", "power", "value", "m", "alpha", "p", "gamma", "theta", "direction", "radii", "k_max", "atoms", "beta",
    "lambda",
];
const LOWER_KEYS: [&str; 8] = ["n", "k", "rho", "u", "r_min", "r_max", "n_r", "n_theta"];

/// A finished probe: the run report and the `R,ratio` table.
pub struct ProbeRun {
    pub report: RunReport,
    pub csv: String,
    /// Membership failed and the probe did not run.
    pub refused: Option<String>,
}

pub fn run_probe(scenario: &Scenario, force: bool) -> CliResult<ProbeRun> {
    match scenario.operation.as_str() {
        "growth" | "growth-p" => growth(scenario, force),
        "lower-bound" => lower_bound(scenario),
        other => Err(CliError::usage(format!("unknown operation '{other}'"))),
    }
}

fn config_echo(s: &Scenario, force: bool) -> BTreeMap<String, Value> {
    let mut c = BTreeMap::new();
    c.insert("operation".into(), json!(s.operation));
    c.insert("seed".into(), json!(s.seed));
    c.insert("force".into(), json!(force));
    c.insert("parameters".into(), json!(s.parameters));
    c.insert("quadrature".into(), json!(s.quadrature));
    c
}

fn boundary_data(s: &Scenario, m: usize) -> CliResult<BoundaryFunction> {
    let dim_norm = |y: &[f64]| norm(y);
    Ok(match s.text("data").unwrap_or("abs-power") {
        "zero" => BoundaryFunction::constant(0.0),
        "constant" => BoundaryFunction::constant(s.f64_or("value", 1.0)?),
        "abs-power" => {
            let a = s.f64_or("power", m as f64)?;
            if a < 0.0 {
                return Err(CliError::usage("'power' must be nonnegative"));
            }
            BoundaryFunction::new(format!("|y|^{a}"), -a, move |y: &[f64]| dim_norm(y).powf(a))
        }
        "inverse" => BoundaryFunction::new("1/(1+|y|)", 1.0, move |y: &[f64]| 1.0 / (1.0 + dim_norm(y))),
        other => return Err(CliError::usage(format!("unknown data family '{other}'"))),
    })
}

fn membership_check(m: &ClassMembership, force: bool, summary: &mut BTreeMap<String, Value>, key: &str) -> Option<VerificationReport> {
    summary.insert(key.into(), json!(m.status.to_string()));
    if m.status != MembershipStatus::Finite && force {
        summary.insert(format!("{key}-forced"), json!(true));
        return None;
    }
    Some(m.report.clone())
}

fn table_summary(t: &ProbeTable, summary: &mut BTreeMap<String, Value>) {
    summary.insert("status".into(), json!(t.status));
    summary.insert("monotone_decrease".into(), json!(t.monotone_decrease));
    summary.insert("last_over_first".into(), json!(t.last_over_first));
    summary.insert("covered_rows".into(), json!(t.rows.iter().filter(|r| r.covered).count()));
    summary.insert("note".into(), json!(t.note));
}

fn cover_check<P: hspot::growth::CoverPoint>(cover: &ExceptionalCover<P>, summary: &mut BTreeMap<String, Value>) -> VerificationReport {
    summary.insert("cover_disks".into(), json!(cover.disks.len()));
    summary.insert("cover_beta".into(), json!(cover.beta));
    summary.insert("cover_lambda".into(), json!(cover.lambda));
    cover.report()
}

// Forced data outside the class can still make the integral itself diverge; that is a failed
// probe, not a usage error.
fn computable(t: hspot::Result<ProbeTable>, checks: &mut Vec<VerificationReport>) -> CliResult<Option<ProbeTable>> {
    match t {
        Ok(t) => Ok(Some(t)),
        Err(hspot::Error::Precondition(why)) => {
            checks.push(VerificationReport::with_verdict(format!("probe not computable: {why}"), f64::NAN, 0.0, 0.0, false, "growth-probe"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn growth(s: &Scenario, force: bool) -> CliResult<ProbeRun> {
    s.check_keys(&GROWTH_KEYS)?;
    let p_variant = s.operation == "growth-p";
    let plane = match s.text("geometry").unwrap_or("plane") {
        "plane" => true,
        "space" => false,
        other => return Err(CliError::usage(format!("unknown geometry '{other}'"))),
    };
    let n = if plane { 2 } else { s.usize_or("n", 3)? };
    let alpha = s.f64_or("alpha", 1.0)?;
    let (exp, kind) = if p_variant {
        let p = s.f64_req("p")?;
        let gamma = s.f64_req("gamma")?;
        let m = s.text("m").map(|_| s.usize_or("m", 0)).transpose()?;
        let exp = GrowthExponent::new(n, p, gamma, alpha, m)?;
        let kind = if plane { ClassKind::PlanePGamma { p, gamma } } else { ClassKind::SpacePGamma { n, p, gamma } };
        (exp, kind)
    } else {
        let m = s.usize_or("m", 0)?;
        let exp = GrowthExponent::basic(n, m, alpha)?;
        let kind = if plane { ClassKind::PlaneM { m } } else { ClassKind::SpaceM { n, m } };
        (exp, kind)
    };
    let class = GrowthClassSpec::new(kind)?;
    let f = boundary_data(s, exp.m.unwrap_or(0))?;
    let qspec = s.quadrature_spec(QuadratureSpec::new(1e-9, 1e-9)?)?;
    let radii = match s.text("radii") {
        Some(_) => s.list_or("radii", vec![])?,
        None => dyadic_radii(s.usize_or("k_max", 10)? as u32),
    };
    let atoms = parse_atoms("atoms", s.text("atoms").unwrap_or(""), n)?;
    let beta = s.f64_or("beta", (n as f64 * exp.p - exp.alpha).max(0.0))?;

    let mut summary = BTreeMap::new();
    let mut checks = Vec::new();
    let membership = class_membership(&class, &f, &qspec)?;
    let mut refused = None;
    if let Some(c) = membership_check(&membership, force, &mut summary, "data_membership") {
        if !c.pass {
            refused = Some(format!("boundary data '{}' are {} in {}", f.label(), membership.status, c.check));
        }
        checks.push(c);
    }

    let table = if plane {
        let mu = DiscreteMeasure::new(atoms.iter().map(|(x, m)| (Complex64::new(x[0], x[1]), *m)))?;
        if !mu.is_empty() {
            let mm = measure_membership_plane(&class, &mu)?;
            if let Some(c) = membership_check(&mm, force, &mut summary, "measure_membership") {
                if !c.pass && refused.is_none() {
                    refused = Some(format!("measure fails the class condition: {}", c.check));
                }
                checks.push(c);
            }
        }
        if refused.is_some() {
            None
        } else {
            let lambda = s.f64_or("lambda", default_lambda(beta, mu.total_mass()))?;
            let cover = exceptional_cover(&mu, beta, lambda)?;
            checks.push(cover_check(&cover, &mut summary));
            let theta = s.f64_or("theta", std::f64::consts::FRAC_PI_2)?;
            computable(growth_probe_p_plane(&exp, &f, &mu, theta, &radii, Some(&cover), &qspec), &mut checks)?
        }
    } else {
        let mu = DiscreteMeasure::new(atoms)?;
        if !mu.is_empty() {
            let mm = measure_membership_space(&class, &mu)?;
            if let Some(c) = membership_check(&mm, force, &mut summary, "measure_membership") {
                if !c.pass && refused.is_none() {
                    refused = Some(format!("measure fails the class condition: {}", c.check));
                }
                checks.push(c);
            }
        }
        if refused.is_some() {
            None
        } else {
            let lambda = s.f64_or("lambda", default_lambda(beta, mu.total_mass()))?;
            let cover = exceptional_cover(&mu, beta, lambda)?;
            checks.push(cover_check(&cover, &mut summary));
            let mut default_dir = vec![0.0; n];
            default_dir[n - 1] = 1.0;
            let dir = s.list_or("direction", default_dir)?;
            computable(growth_probe_p_space(&exp, &f, &mu, &dir, &radii, Some(&cover), &qspec), &mut checks)?
        }
    };

    summary.insert("height_exponent".into(), json!(exp.height_exponent()));
    summary.insert("modulus_exponent".into(), json!(exp.modulus_exponent()));
    summary.insert("log_augmented".into(), json!(exp.log_augmented));
    let rows: Vec<(f64, f64)> = match &table {
        Some(t) => {
            table_summary(t, &mut summary);
            checks.push(VerificationReport::with_verdict(
                format!("ratio table rows={} uncovered", t.rows.len()),
                t.rows.iter().filter(|r| !r.covered).count() as f64,
                t.rows.len() as f64,
                0.0,
                t.status == ProbeStatus::Data,
                "growth-probe",
            ));
            t.rows.iter().map(|r| (r.radius, r.ratio)).collect()
        }
        None => Vec::new(),
    };
    let mut report = RunReport::new(s.name.clone(), checks, config_echo(s, force));
    report.summary = summary;
    Ok(ProbeRun { report, csv: ratio_csv(&rows), refused })
}

fn lower_bound(s: &Scenario) -> CliResult<ProbeRun> {
    s.check_keys(&LOWER_KEYS)?;
    let n = s.usize_or("n", 2)?;
    let k = s.f64_or("k", 1.0)?;
    let rho_text = s.text("rho").unwrap_or("r-over-log").to_string();
    let rho: fn(f64) -> f64 = |r| r / r.ln();
    let constant = if rho_text == "r-over-log" { None } else { Some(crate::scenario::parse_f64("rho", &rho_text)?) };
    let u_name = s.text("u").unwrap_or("exp-y-cos-x");
    let u: Box<dyn Fn(&[f64]) -> f64 + Sync> = match u_name {
        "exp-y-cos-x" => Box::new(|x: &[f64]| x[x.len() - 1].exp() * x[0].cos()),
        "height" => Box::new(|x: &[f64]| x[x.len() - 1]),
        other => return Err(CliError::usage(format!("unknown lower-bound function '{other}'"))),
    };
    let r_min = s.f64_or("r_min", 1.5)?;
    let r_max = s.f64_or("r_max", 12.0)?;
    let n_r = s.usize_or("n_r", 8)?;
    let n_theta = s.usize_or("n_theta", 6)?;
    let grid = polar_grid(n, r_min, r_max, n_r, n_theta)?;
    let (table, refinement) = match constant {
        None => (
            lower_bound_probe(&LowerBoundProbeSpec::new(k, rho, grid)?, &*u, n)?,
            lower_bound_refinement(k, rho, &*u, n, r_min, r_max, n_r, n_theta)?,
        ),
        Some(c) => {
            let rho_c = move |_: f64| c;
            (
                lower_bound_probe(&LowerBoundProbeSpec::new(k, rho_c, grid)?, &*u, n)?,
                lower_bound_refinement(k, rho_c, &*u, n, r_min, r_max, n_r, n_theta)?,
            )
        }
    };
    let checks = vec![
        VerificationReport::with_verdict("fitted constant finite", table.fitted_c, 0.0, 0.0, table.fitted_c.is_finite(), "lower-bound"),
        refinement,
    ];
    let mut report = RunReport::new(s.name.clone(), checks, config_echo(s, false));
    report.summary.insert("fitted_c".into(), json!(table.fitted_c));
    report.summary.insert("grid_points".into(), json!(table.rows.len()));
    let rows: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.radius, r.ratio)).collect();
    Ok(ProbeRun { report, csv: ratio_csv(&rows), refused: None })
}
