//! Verification suites. Each suite is a list of named check groups; groups run concurrently
//! and their reports are assembled in registration order, so output depends only on the seed.

use std::f64::consts::PI;

use hspot::dirichlet::{laplacian_fd, poisson_integral_plane, poisson_integral_space, BoundaryFunction, DiscreteMeasure};
use hspot::identities::{
    averaged_limit_plane, averaged_limit_space, carleman_halfplane, carleman_halfspace, determinant_dn_check,
    majorant_bound, majorant_criterion_integral, majorant_identities, mobius_jacobian_check, nevanlinna_halfball,
    nevanlinna_halfdisk, nevanlinna_halfdisk_terms, radial_limit_plane, radial_limit_space, MobiusMap, PolynomialSpec,
    ZeroList,
};
use hspot::plane_kernels::{self as pk, PlaneBound};
use hspot::quadrature::{Decay, QuadratureSpec};
use hspot::space_kernels::{self as sk, dot, norm, SpaceBound};
use hspot::special::{gegenbauer_derivative, gegenbauer_eval, gegenbauer_max, generating_sum_check, lipschitz_bound_check, wallis, GegenbauerParam};
use hspot::{Complex64, VerificationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kernels,
    Gegenbauer,
    Carleman,
    Nevanlinna,
    Limits,
    Majorant,
    Mobius,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = ["kernels", "gegenbauer", "carleman", "nevanlinna", "limits", "majorant", "mobius", "all"];

    pub fn from_name(s: &str) -> CliResult<Self> {
        Ok(match s {
            "kernels" => Self::Kernels,
            "gegenbauer" => Self::Gegenbauer,
            "carleman" => Self::Carleman,
            "nevanlinna" => Self::Nevanlinna,
            "limits" => Self::Limits,
            "majorant" => Self::Majorant,
            "mobius" => Self::Mobius,
            "all" => Self::All,
            _ => return Err(CliError::usage(format!("unknown suite '{s}'; expected one of {}", Self::NAMES.join(", ")))),
        })
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Samples per kernel inequality family.
    pub samples: usize,
    /// Replaces the default tolerance of every equality and inequality check.
    pub tol: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 0, samples: 10_000, tol: None }
    }
}

type Group = fn(&SuiteOptions, u64) -> hspot::Result<Vec<VerificationReport>>;

fn groups(suite: Suite) -> Vec<(&'static str, Group)> {
    match suite {
        Suite::Kernels => vec![
            ("poisson-normalization", poisson_normalization as Group),
            ("harmonicity-plane", harmonicity_plane),
            ("harmonicity-space", harmonicity_space),
            ("factorization", factorization),
            ("plane-bounds", plane_bounds),
            ("space-bounds-3", |o, s| space_bounds(o, s, 3)),
            ("space-bounds-4", |o, s| space_bounds(o, s, 4)),
        ],
        Suite::Gegenbauer => vec![
            ("generating-sum", generating_sums as Group),
            ("generating-function", generating_function),
            ("gegenbauer-bound", gegenbauer_bound),
            ("gegenbauer-lipschitz", gegenbauer_lipschitz),
            ("gegenbauer-derivative", gegenbauer_derivative_fd),
        ],
        Suite::Carleman => vec![("carleman-plane", carleman_plane as Group), ("carleman-space", carleman_space)],
        Suite::Nevanlinna => vec![("nevanlinna-halfball", halfball as Group), ("nevanlinna-halfdisk", halfdisk)],
        Suite::Limits => vec![
            ("wallis", wallis_values as Group),
            ("limits-plane", limits_plane),
            ("limits-space", limits_space),
        ],
        Suite::Majorant => vec![("majorant-identities", majorant_identity_group as Group), ("majorant-slices", majorant_slices)],
        Suite::Mobius => vec![("mobius-jacobian", mobius as Group), ("determinant-dn", determinant)],
        Suite::All => [Suite::Kernels, Suite::Gegenbauer, Suite::Carleman, Suite::Nevanlinna, Suite::Limits, Suite::Majorant, Suite::Mobius]
            .into_iter()
            .flat_map(groups)
            .collect(),
    }
}

/// Seed of a group: the run seed mixed with the group name, so groups stay independent of
/// each other and of the suite they run in.
fn group_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Vec<VerificationReport> {
    let list = groups(suite);
    let results: Vec<Vec<VerificationReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = list
            .iter()
            .map(|(name, run)| {
                let (name, run) = (*name, *run);
                s.spawn(move || match run(opts, group_seed(opts.seed, name)) {
                    Ok(r) => r,
                    Err(e) => vec![VerificationReport::with_verdict(format!("{name} error: {e}"), f64::NAN, f64::NAN, 0.0, false, name)],
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check group panicked")).collect()
    });
    let mut out: Vec<VerificationReport> = results.into_iter().flatten().collect();
    if let Some(tol) = opts.tol {
        for r in &mut out {
            r.retolerate(tol);
        }
    }
    out
}

fn quad(tol: f64) -> QuadratureSpec {
    QuadratureSpec::new(tol, tol).expect("positive tolerances")
}

/// `max |Δu|` over the points, as an inequality against zero.
fn laplacian_report(check: String, points: &[Vec<f64>], u: &dyn Fn(&[f64]) -> hspot::Result<f64>) -> hspot::Result<VerificationReport> {
    let mut worst = 0.0f64;
    for p in points {
        let failed = std::cell::Cell::new(None);
        let f = |x: &[f64]| {
            u(x).unwrap_or_else(|e| {
                failed.set(Some(e));
                f64::NAN
            })
        };
        let lap = laplacian_fd(&f, p, 1e-3 * norm(p))?;
        if let Some(e) = failed.take() {
            return Err(e);
        }
        worst = worst.max(lap.abs());
    }
    Ok(VerificationReport::at_most(format!("{check} points={}", points.len()), worst, 0.0, 1e-5, "harmonicity"))
}

fn poisson_normalization(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let one = BoundaryFunction::constant(1.0);
    let plane = poisson_integral_plane(&one, Complex64::new(0.0, 1.0), &quad(1e-10))?;
    let space = poisson_integral_space(&one, &[0.0, 0.0, 1.0], &quad(1e-8))?;
    Ok(vec![
        VerificationReport::compare("poisson-mass plane z=i", plane.value, 1.0, 1e-6, "poisson-normalization"),
        VerificationReport::compare("poisson-mass space n=3 x=(0,0,1)", space.value, 1.0, 1e-4, "poisson-normalization"),
    ])
}

fn harmonicity_plane(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0)]).collect();
    let t = rng.gen_range(1.5..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let zeta = loop {
        let w = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.2..3.0));
        if points.iter().all(|p| (Complex64::new(p[0], p[1]) - w).norm() > 1.0) {
            break w;
        }
    };
    let z = |x: &[f64]| Complex64::new(x[0], x[1]);
    let mut out = vec![
        laplacian_report(format!("laplacian poisson-plane t={t:.3}"), &points, &|x| pk::poisson_plane(z(x), t))?,
        laplacian_report("laplacian green-plane".into(), &points, &|x| pk::green_plane(z(x), zeta))?,
    ];
    for m in 1..=4 {
        out.push(laplacian_report(format!("laplacian poisson-plane-mod m={m}"), &points, &|x| pk::poisson_plane_mod(m, z(x), t))?);
        out.push(laplacian_report(format!("laplacian green-plane-mod m={m}"), &points, &|x| pk::green_plane_mod(m, z(x), zeta))?);
    }
    Ok(out)
}

fn harmonicity_space(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in [3usize, 4] {
        let points: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let mut x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.5..1.5)).collect();
                x.push(rng.gen_range(0.5..2.0));
                x
            })
            .collect();
        let yp: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(1.2..3.0)).collect();
        let y = loop {
            let mut y: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
            y.push(rng.gen_range(0.2..3.0));
            if points.iter().all(|p| norm(&sub(p, &y)) > 1.0) {
                break y;
            }
        };
        out.push(laplacian_report(format!("laplacian poisson-space n={n}"), &points, &|x| sk::poisson_space(x, &yp))?);
        out.push(laplacian_report(format!("laplacian green-space n={n}"), &points, &|x| sk::green_space(x, &y))?);
        for m in 1..=4 {
            out.push(laplacian_report(format!("laplacian poisson-space-mod n={n} m={m}"), &points, &|x| sk::poisson_space_mod(m, x, &yp))?);
            out.push(laplacian_report(format!("laplacian green-space-mod n={n} m={m}"), &points, &|x| sk::green_space_mod(m, x, &y))?);
        }
    }
    Ok(out)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|c| c / r).collect();
        }
    }
}

fn factorization(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for m in 1..=4 {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let ry = rng.gen_range(1.1..5.0);
            let yp: Vec<f64> = unit(&mut rng, 2).iter().map(|c| c * ry).collect();
            let mut dir = unit(&mut rng, 3);
            dir[2] = dir[2].abs().max(0.05);
            let s = rng.gen_range(0.05..0.9);
            let scale = s * ry / norm(&dir);
            let x: Vec<f64> = dir.iter().map(|c| c * scale).collect();
            let a = sk::poisson_mod_factored(m, &x, &yp)?;
            let b = sk::poisson_space_mod_series(m, &x, &yp)?;
            // the bracket can cancel; measure against the kernel size as well
            let size = b.abs().max(1e-6 * sk::poisson_space(&x, &yp)?);
            worst = worst.max((a - b).abs() / size);
        }
        out.push(VerificationReport::at_most(format!("factored-vs-series n=3 m={m} pairs=100"), worst, 0.0, 1e-8, "factorization"));
    }
    Ok(out)
}

fn plane_bounds(opts: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    PlaneBound::ALL.iter().map(|b| pk::plane_bound_check(*b, opts.samples, seed)).collect()
}

fn space_bounds(opts: &SuiteOptions, seed: u64, n: usize) -> hspot::Result<Vec<VerificationReport>> {
    SpaceBound::ALL.iter().map(|b| sk::space_bound_check(*b, n, opts.samples, seed)).collect()
}

fn generating_sums(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for lambda in [0.5, 1.0, 1.5, 2.0] {
        for r in [0.25, 0.5] {
            let mut rep = generating_sum_check(lambda, r, 60)?;
            rep.retolerate(1e-8);
            out.push(rep);
        }
    }
    Ok(out)
}

fn generating_function(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for lambda in [0.5, 1.0, 1.5] {
        for t in [-1.0, -0.5, 0.0, 0.3, 1.0] {
            for r in [0.1f64, 0.5] {
                let mut sum = 0.0;
                for k in 0..=64 {
                    sum += gegenbauer_eval(GegenbauerParam::new(lambda, k)?, t)? * r.powi(k as i32);
                }
                let exact = (1.0 - 2.0 * t * r + r * r).powf(-lambda);
                out.push(VerificationReport::compare(
                    format!("generating-function lambda={lambda} t={t} r={r}"),
                    sum,
                    exact,
                    1e-8,
                    "gegenbauer-generating-function",
                ));
            }
        }
    }
    Ok(out)
}

fn gegenbauer_bound(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..10_000 {
        let p = GegenbauerParam::new(rng.gen_range(0.05..4.0), rng.gen_range(0..=40))?;
        let ratio = gegenbauer_eval(p, rng.gen_range(-1.0..=1.0))?.abs() / gegenbauer_max(p);
        if ratio > 1.0 + 1e-12 {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    Ok(vec![VerificationReport::at_most(
        format!("gegenbauer-max-bound samples=10000 violations={violations}"),
        worst,
        1.0,
        1e-12,
        "gegenbauer-bound",
    )])
}

fn gegenbauer_lipschitz(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..10_000 {
        let rep = lipschitz_bound_check(
            rng.gen_range(3..=5),
            rng.gen_range(1..=30),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        )?;
        if !rep.pass {
            violations += 1;
        }
        if rep.rhs > 0.0 {
            worst = worst.max(rep.lhs / rep.rhs);
        }
    }
    Ok(vec![VerificationReport::with_verdict(
        format!("gegenbauer-lipschitz samples=10000 violations={violations}"),
        worst,
        1.0,
        1e-12,
        violations == 0,
        "gegenbauer-lipschitz",
    )])
}

fn gegenbauer_derivative_fd(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for (lambda, k, t) in [(1.0, 3, 0.2), (1.5, 4, -0.6), (0.5, 6, 0.9)] {
        let p = GegenbauerParam::new(lambda, k)?;
        let h = 1e-5;
        let fd = (gegenbauer_eval(p, t + h)? - gegenbauer_eval(p, t - h)?) / (2.0 * h);
        let d = gegenbauer_derivative(p, t)?;
        out.push(VerificationReport::compare(
            format!("gegenbauer-derivative lambda={lambda} k={k} t={t}"),
            d,
            fd,
            1e-6 * d.abs().max(1.0),
            "gegenbauer-derivative",
        ));
    }
    Ok(out)
}

fn carleman_plane(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let spec = quad(1e-11);
    let mut out = Vec::new();
    for big in [2.0, 4.0] {
        let rep = carleman_halfplane(&|z| z.im, None, big, &spec)?;
        out.push(rep.equality(format!("carleman-plane u=y R={big}"), 1e-8));
        out.push(VerificationReport::compare(format!("carleman-plane u=y R={big} lhs"), rep.lhs(), 0.5, 1e-8, "carleman"));
        out.push(VerificationReport::compare(format!("carleman-plane u=y R={big} c1"), rep.c1, 0.5, 1e-8, "carleman"));
        out.push(VerificationReport::compare(format!("carleman-plane u=y R={big} c2"), rep.c2, 0.0, 1e-8, "carleman"));
    }
    let family: [(&str, &(dyn Fn(Complex64) -> f64 + Sync)); 3] =
        [("x", &|z| z.re), ("re z^2", &|z| (z * z).re), ("im z^3", &|z| (z * z * z).im)];
    for (label, u) in family {
        out.push(carleman_halfplane(u, None, 3.0, &spec)?.equality(format!("carleman-plane u={label} R=3"), 1e-8));
    }
    let sub = carleman_halfplane(&|z| z.norm_sqr(), None, 3.0, &spec)?;
    out.push(sub.inequality("carleman-plane subharmonic u=|z|^2 R=3", 1e-6));
    Ok(out)
}

fn carleman_space(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let spec = quad(1e-9);
    let mut out = Vec::new();
    for big in [2.0, 4.0] {
        let rep = carleman_halfspace(3, &|x| x[2], None, 1.0, big, &spec)?;
        out.push(VerificationReport::compare(format!("carleman-space n=3 u=x_n R={big} lhs"), rep.lhs(), 2.0 * PI, 1e-6, "carleman"));
        out.push(VerificationReport::compare(format!("carleman-space n=3 u=x_n R={big} rhs"), rep.rhs, 2.0 * PI, 1e-6, "carleman"));
    }
    let rep = carleman_halfspace(3, &|x| x[0] * x[2], None, 0.5, 3.0, &spec)?;
    out.push(rep.equality("carleman-space n=3 u=x_1 x_n r=0.5 R=3", 1e-6));
    for big in [2.0, 4.0] {
        let rep = carleman_halfspace(3, &|x| dot(x, x), None, 1.0, big, &spec)?;
        out.push(rep.inequality(format!("carleman-space subharmonic u=|x|^2 R={big}"), 1e-6));
    }
    Ok(out)
}

fn halfball(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = quad(1e-10);
    let points: Vec<Vec<f64>> = (0..10)
        .map(|_| loop {
            let x = vec![rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), rng.gen_range(0.1..0.7)];
            if norm(&x) < 0.8 {
                break x;
            }
        })
        .collect();
    let family: [(&str, &(dyn Fn(&[f64]) -> f64 + Sync)); 2] = [("x_n", &|x| x[2]), ("x_1 x_n", &|x| x[0] * x[2])];
    let mut out = Vec::new();
    for (label, u) in family {
        let mut worst = 0.0f64;
        for x in &points {
            let v = nevanlinna_halfball(u, &|_| 0.0, 1.0, x, &spec)?;
            worst = worst.max((v - u(x)).abs());
        }
        out.push(VerificationReport::at_most(format!("halfball u={label} n=3 R=1 points=10"), worst, 0.0, 1e-5, "nevanlinna-halfball"));
    }
    Ok(out)
}

fn halfdisk(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let spec = quad(1e-10);
    let c = Complex64::new;
    let zeros = ZeroList::new(vec![c(1.0, 0.0)], vec![])?;
    let mut out = vec![nevanlinna_halfdisk(&|z| z - 1.0, &zeros, 2.0, c(0.5, 0.0), 1e-6, &spec)?];
    let (lambda, pole) = (c(0.5, 0.5), c(1.0, -0.4));
    let list = ZeroList::new(vec![lambda], vec![pole])?;
    let t = nevanlinna_halfdisk_terms(&|z| (z - lambda) / (z - pole), &list, 1.5, c(0.9, 0.2), &spec)?;
    out.push(VerificationReport::at_most("halfdisk zero and pole R=1.5 residual", t.residual, 0.0, 1e-6, "nevanlinna-halfdisk"));
    Ok(out)
}

fn wallis_values(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    Ok(vec![
        VerificationReport::compare("wallis I_2", wallis(2), PI / 4.0, 1e-12, "wallis"),
        VerificationReport::compare("wallis I_3", wallis(3), 2.0 / 3.0, 1e-12, "wallis"),
    ])
}

fn limit_reports(label: &str, table: &hspot::identities::LimitTable) -> Vec<VerificationReport> {
    let last = table.rows.last().expect("limit tables have rows");
    let rate = table.rate().unwrap_or(f64::INFINITY);
    vec![
        VerificationReport::compare(format!("{label} R={}", last.radius), last.value, table.limit, 1e-3, "radial-limit"),
        VerificationReport::with_verdict(format!("{label} convergence exponent"), rate, 0.9, 0.0, rate >= 0.9, "radial-limit"),
    ]
}

fn limits_plane(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let q = PolynomialSpec::new(vec![1.0, -2.0, 0.5])?;
    let mu = DiscreteMeasure::new([(2.0, 3.0)])?;
    let radii = [100.0, 1000.0];
    let mut out = Vec::new();
    let closed = 0.5 - 3.0 / (8.0 * PI);
    let monomial = PolynomialSpec::new(vec![0.0, 0.0, 0.5])?;
    let t = radial_limit_plane(&monomial, &mu, PI / 4.0, &radii)?;
    out.push(VerificationReport::compare("plane limit closed form", t.limit, closed, 1e-14, "radial-limit"));
    out.extend(limit_reports("plane radial limit theta=pi/4", &t));
    let a = averaged_limit_plane(&q, &mu, &radii, &quad(1e-10))?;
    out.extend(limit_reports("plane averaged limit", &a));
    Ok(out)
}

fn limits_space(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mu = DiscreteMeasure::new([(vec![0.5, -0.2], 4.0)])?;
    let mut out = Vec::new();
    let t = radial_limit_space(3, 1.0, &mu, &[0.9, 1.3], &[100.0, 1000.0])?;
    out.extend(limit_reports("space radial limit n=3", &t));
    for n in [3usize, 4, 5] {
        let c = 1.5;
        let exact = 2f64.powi(n as i32 - 1) * wallis(n as u32).powi(n as i32 - 1) * c;
        let a = averaged_limit_space(n, c, &DiscreteMeasure::empty(), &[5.0], &quad(1e-9))?;
        out.push(VerificationReport::compare(format!("space averaged limit n={n} empty measure"), a.rows[0].value, exact, 1e-7, "averaged-limit"));
    }
    Ok(out)
}

fn majorant_identity_group(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let spec = quad(1e-10);
    let mut out = Vec::new();
    for x in [vec![0.3, -0.2, 0.7], vec![0.1, 0.2, -0.3, 1.5]] {
        out.extend(majorant_identities(&x, 1e-6, &spec)?);
    }
    Ok(out)
}

fn majorant_slices(_: &SuiteOptions, _: u64) -> hspot::Result<Vec<VerificationReport>> {
    let n = 3;
    let c = 0.7;
    let mu = DiscreteMeasure::new([(vec![0.5, -1.0], 2.0), (vec![-2.0, 0.3], 0.5)])?;
    let h = |x: &[f64]| -> f64 {
        c * x[n - 1] + mu.atoms().iter().map(|a| a.mass * sk::poisson_space(x, &a.location).unwrap_or(f64::NAN)).sum::<f64>()
    };
    let bound = majorant_bound(n, c, &mu)?;
    let decay = Decay::new(0.0).with_breakpoints([1.0, 2.0, 3.0]);
    let table = majorant_criterion_integral(&h, n, &decay, &[0.5, 2.0, 10.0], &quad(1e-8))?;
    Ok(vec![VerificationReport::at_most(format!("majorant slices n={n} heights=3"), table.sup, bound, 1e-8, "majorant")])
}

fn mobius(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in [3usize, 4, 5] {
        let map = MobiusMap::new(n)?;
        let pole = map.pole();
        let mut worst = 0.0f64;
        let mut all = true;
        for _ in 0..20 {
            let x = loop {
                let mut x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
                x.push(rng.gen_range(0.1..2.0));
                if norm(&sub(&x, &pole)) > 0.3 {
                    break x;
                }
            };
            let rep = mobius_jacobian_check(&map, &x, 1e-5)?;
            all &= rep.pass;
            worst = worst.max(rep.rel_err);
        }
        out.push(VerificationReport::with_verdict(format!("mobius-jacobian n={n} points=20"), worst, 0.0, 1e-5, all, "mobius-jacobian"));
    }
    Ok(out)
}

fn determinant(_: &SuiteOptions, seed: u64) -> hspot::Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in [3usize, 4, 5] {
        let mut worst = 0.0f64;
        let mut all = true;
        for _ in 0..50 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let rep = determinant_dn_check(&x)?;
            all &= rep.pass;
            worst = worst.max(rep.rel_err);
        }
        out.push(VerificationReport::with_verdict(format!("determinant-dn n={n} points=50"), worst, 0.0, 1e-9, all, "determinant-dn"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(Suite::from_name(name).unwrap().name(), name);
        }
        assert!(Suite::from_name("nope").is_err());
    }

    #[test]
    fn group_seeds_differ() {
        assert_ne!(group_seed(7, "a"), group_seed(7, "b"));
        assert_ne!(group_seed(7, "a"), group_seed(8, "a"));
    }

    #[test]
    fn gegenbauer_suite_passes() {
        let r = run_suite(Suite::Gegenbauer, &SuiteOptions::default());
        assert!(r.iter().all(|c| c.pass), "{:?}", r.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!(r.iter().any(|c| c.check.contains("lambda=1 r=0.5") && c.rhs == 4.0));
    }
}
