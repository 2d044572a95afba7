//! Growth classes, the order-β maximal function of a finite atomic measure with its
//! exceptional cover, growth-ratio probes along rays and the lower-bound probe.
//!
//! The growth theorems are asymptotic and hold outside an exceptional set. Probes only show
//! consistency: ratios evaluated outside a constructed cover, with their monotonicity and
//! last/first statistics. They never establish the limit.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::{
    green_potential_plane, green_potential_space, poisson_integral_plane_mod, poisson_integral_space_mod,
    BoundaryFunction, DiscreteMeasure, VariableOrderSpec,
};
use crate::error::{domain, Error, Result};
use crate::quadrature::{
    integrate_half_line, integrate_hemisphere, integrate_interval_with_breaks, integrate_sphere, Decay, QuadratureSpec,
};
use crate::report::VerificationReport;
use crate::space_kernels::norm;

/// Integrability classes for boundary data, interior data and measures.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassKind {
    /// `∫_R |f|/(1 + |ξ|^{2+m}) < ∞`.
    PlaneM { m: usize },
    /// `∫_R |f|^p/(1 + |ξ|)^γ < ∞`.
    PlanePGamma { p: f64, gamma: f64 },
    /// `∫_{R^{n-1}} |f|/(1 + |y'|^{n+m}) < ∞`.
    SpaceM { n: usize, m: usize },
    /// `∫_{R^{n-1}} |f|^p/(1 + |y'|)^γ < ∞`.
    SpacePGamma { n: usize, p: f64, gamma: f64 },
    /// `∫_H x_n |f|/(1 + |x|^{ρ(|x|)+n+α+1}) < ∞`; `n = 2` is the half-plane.
    LuAlpha { n: usize, order: VariableOrderSpec },
    /// `∫ |g|/(1 + |t|^{ρ(|t|)+α+1}) < ∞` on the line (`n = 2`), and
    /// `∫ |g|/(1 + |x'|^{ρ(|x'|)+n+α-1}) < ∞` on `R^{n-1}`.
    LvAlpha { n: usize, order: VariableOrderSpec },
}

/// A validated [`ClassKind`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClassSpec {
    kind: ClassKind,
}

impl GrowthClassSpec {
    pub fn new(kind: ClassKind) -> Result<Self> {
        let check_p = |p: f64| {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(domain(format!("p must be in [1, ∞), got {p}")));
            }
            Ok(())
        };
        let check_n = |n: usize, lo: usize| {
            if !(lo..=5).contains(&n) {
                return Err(domain(format!("dimension must be in [{lo}, 5], got {n}")));
            }
            Ok(())
        };
        match &kind {
            ClassKind::PlaneM { .. } => {}
            ClassKind::PlanePGamma { p, gamma } => {
                check_p(*p)?;
                if !gamma.is_finite() {
                    return Err(domain("gamma must be finite"));
                }
            }
            ClassKind::SpaceM { n, .. } => check_n(*n, 3)?,
            ClassKind::SpacePGamma { n, p, gamma } => {
                check_n(*n, 3)?;
                check_p(*p)?;
                if !gamma.is_finite() {
                    return Err(domain("gamma must be finite"));
                }
            }
            ClassKind::LuAlpha { n, .. } | ClassKind::LvAlpha { n, .. } => check_n(*n, 2)?,
        }
        Ok(Self { kind })
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    fn label(&self) -> String {
        match &self.kind {
            ClassKind::PlaneM { m } => format!("plane-m m={m}"),
            ClassKind::PlanePGamma { p, gamma } => format!("plane-p-gamma p={p} gamma={gamma}"),
            ClassKind::SpaceM { n, m } => format!("space-m n={n} m={m}"),
            ClassKind::SpacePGamma { n, p, gamma } => format!("space-p-gamma n={n} p={p} gamma={gamma}"),
            ClassKind::LuAlpha { n, order } => format!("lu-alpha n={n} alpha={}", order.alpha()),
            ClassKind::LvAlpha { n, order } => format!("lv-alpha n={n} alpha={}", order.alpha()),
        }
    }
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipStatus {
    Finite,
    Infinite,
    /// The decay hint and the sampled tail disagree, or quadrature failed.
    Indeterminate,
}

impl fmt::Display for MembershipStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Finite => "finite",
            Self::Infinite => "infinite",
            Self::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMembership {
    pub status: MembershipStatus,
    /// The defining integral or sum; `+∞` when divergent, best estimate when indeterminate.
    pub value: f64,
    /// Exponent `e` in `g(r) = O(r^{-e})` for the radial integrand, from the decay hint.
    pub tail_exponent: f64,
    /// Exponent fitted from the last two dyadic shells, when both are nonzero.
    pub observed_exponent: Option<f64>,
    /// Passes exactly when the status is finite.
    pub report: VerificationReport,
}

/// How far the fitted shell exponent may sit on the wrong side of 1 before the hint is doubted.
const SHELL_SLACK: f64 = 0.25;
const SHELLS: i32 = 6;

fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v.abs()
    } else {
        v.abs().powf(p)
    }
}

/// Radial integrand `g(r)` with the total integral `∫_0^∞ g`.
struct Radial<'a> {
    g: Box<dyn Fn(f64) -> f64 + 'a>,
    exponent: f64,
    breaks: Vec<f64>,
    scale: f64,
}

fn radial_for<'a>(
    kind: &'a ClassKind,
    f: &'a BoundaryFunction,
    inner: QuadratureSpec,
) -> Radial<'a> {
    let q = f.decay_hint();
    let mut breaks = f.breakpoints().to_vec();
    breaks.push(1.0);
    let mut scale = breaks.iter().copied().fold(1.0, f64::max);
    let sphere_mean = move |n: usize, r: f64, p: f64| -> f64 {
        // r^{n-2} ∫_{S^{n-2}} |f(rω)|^p dω
        let h = |w: &[f64]| {
            let y: Vec<f64> = w.iter().map(|v| v * r).collect();
            pow_abs(f.eval(&y), p)
        };
        match integrate_sphere(&h, n - 1, &inner) {
            Ok(res) => res.value * r.powi(n as i32 - 2),
            Err(Error::ToleranceNotMet { value, .. }) => value * r.powi(n as i32 - 2),
            Err(_) => f64::NAN,
        }
    };
    let line = move |r: f64, p: f64| pow_abs(f.eval_line(r), p) + pow_abs(f.eval_line(-r), p);
    let varying = |order: &VariableOrderSpec| {
        let mut b = order.jump_radii();
        b.extend(order.table().last().map(|t| t.0));
        b
    };
    let (g, exponent): (Box<dyn Fn(f64) -> f64 + 'a>, f64) = match kind {
        ClassKind::PlaneM { m } => {
            let m = *m as i32;
            (Box::new(move |r| line(r, 1.0) / (1.0 + r.powi(2 + m))), q + 2.0 + m as f64)
        }
        ClassKind::PlanePGamma { p, gamma } => {
            let (p, gamma) = (*p, *gamma);
            (Box::new(move |r| line(r, p) / (1.0 + r).powf(gamma)), p * q + gamma)
        }
        ClassKind::SpaceM { n, m } => {
            let (n, m) = (*n, *m);
            (
                Box::new(move |r| sphere_mean(n, r, 1.0) / (1.0 + r.powi((n + m) as i32))),
                q + m as f64 + 2.0,
            )
        }
        ClassKind::SpacePGamma { n, p, gamma } => {
            let (n, p, gamma) = (*n, *p, *gamma);
            (Box::new(move |r| sphere_mean(n, r, p) / (1.0 + r).powf(gamma)), p * q + gamma - (n as f64 - 2.0))
        }
        ClassKind::LvAlpha { n, order } => {
            breaks.extend(varying(order));
            let (n, a) = (*n, order.alpha());
            let e = q + order.rho_limit() + a + 1.0;
            if n == 2 {
                (Box::new(move |r| line(r, 1.0) / (1.0 + r.powf(order.rho(r) + a + 1.0))), e)
            } else {
                let nf = n as f64;
                (Box::new(move |r| sphere_mean(n, r, 1.0) / (1.0 + r.powf(order.rho(r) + nf + a - 1.0))), e)
            }
        }
        ClassKind::LuAlpha { n, order } => {
            breaks.extend(varying(order));
            let (n, a) = (*n, order.alpha());
            let e = q + order.rho_limit() + a + 1.0;
            let nf = n as f64;
            let shell = move |r: f64| -> f64 {
                if r == 0.0 {
                    return 0.0;
                }
                if n == 2 {
                    let h = |t: f64| {
                        let (s, c) = t.sin_cos();
                        r * s * f.eval(&[r * c, r * s]).abs() * r
                    };
                    integrate_interval_with_breaks(h, 0.0, PI, &[], &inner).map_or(f64::NAN, |v| v.value)
                } else {
                    let h = |x: &[f64]| x[n - 1] * f.eval(x).abs();
                    match integrate_hemisphere(&h, n, r, &inner) {
                        Ok(v) => v.value,
                        Err(Error::ToleranceNotMet { value, .. }) => value,
                        Err(_) => f64::NAN,
                    }
                }
            };
            (Box::new(move |r| shell(r) / (1.0 + r.powf(order.rho(r) + nf + a + 1.0))), e)
        }
    };
    scale = breaks.iter().copied().fold(scale, f64::max);
    Radial { g, exponent, breaks, scale }
}

/// Membership of `f` in a class: the defining integral is evaluated in polar form, and the
/// decay hint is cross-checked against the dyadic shells `[2^k, 2^{k+1}]` beyond the scale of
/// the data. Disagreement or quadrature failure gives an indeterminate status.
pub fn class_membership(spec: &GrowthClassSpec, f: &BoundaryFunction, qspec: &QuadratureSpec) -> Result<ClassMembership> {
    qspec.validate()?;
    let inner = QuadratureSpec { abs_tol: qspec.abs_tol / 10.0, rel_tol: qspec.rel_tol / 10.0, ..*qspec };
    let radial = radial_for(&spec.kind, f, inner);
    let g = &radial.g;
    let k0 = radial.scale.max(4.0).log2().ceil() as i32;
    let mut shells = Vec::new();
    for k in k0..k0 + SHELLS {
        let a = 2f64.powi(k);
        let s = match integrate_interval_with_breaks(g, a, 2.0 * a, &[], &inner) {
            Ok(v) => v.value,
            Err(Error::ToleranceNotMet { value, .. }) => value,
            Err(e) => return Err(e),
        };
        shells.push(s.abs());
    }
    let k = shells.len();
    let observed = if shells[k - 1] > 0.0 && shells[k - 2] > 0.0 {
        Some(1.0 - (shells[k - 1] / shells[k - 2]).log2())
    } else {
        None
    };
    let all_zero = shells.iter().all(|s| *s == 0.0);
    let e = radial.exponent;
    let (status, value) = if e > 1.0 {
        let decay = Decay::new(e).with_breakpoints(radial.breaks.clone()).with_scale(radial.scale);
        match integrate_half_line(g, &decay, qspec) {
            Ok(res) if observed.is_none_or(|o| o > 1.0 - SHELL_SLACK) => (MembershipStatus::Finite, res.value),
            Ok(res) => (MembershipStatus::Indeterminate, res.value),
            Err(Error::ToleranceNotMet { value, .. }) => (MembershipStatus::Indeterminate, value),
            Err(Error::Precondition(_)) => (MembershipStatus::Indeterminate, f64::NAN),
            Err(err) => return Err(err),
        }
    } else if all_zero {
        (MembershipStatus::Indeterminate, f64::NAN)
    } else if observed.is_none_or(|o| o <= 1.0 + SHELL_SLACK) {
        (MembershipStatus::Infinite, f64::INFINITY)
    } else {
        (MembershipStatus::Indeterminate, f64::NAN)
    };
    let check = format!("{} f={} status={status}", spec.label(), f.label());
    let report = VerificationReport::with_verdict(check, value, f64::INFINITY, 0.0, status == MembershipStatus::Finite, "class-membership");
    Ok(ClassMembership { status, value, tail_exponent: e, observed_exponent: observed, report })
}

fn measure_membership(label: String, sums: Vec<f64>) -> ClassMembership {
    let value = sums[0];
    let status = if sums.iter().all(|s| s.is_finite()) { MembershipStatus::Finite } else { MembershipStatus::Infinite };
    let detail: Vec<String> = sums.iter().map(|s| format!("{s:e}")).collect();
    let check = format!("{label} sums=[{}] status={status}", detail.join(", "));
    let report = VerificationReport::with_verdict(check, value, f64::INFINITY, 0.0, status == MembershipStatus::Finite, "class-membership");
    ClassMembership { status, value, tail_exponent: f64::INFINITY, observed_exponent: None, report }
}

/// Measure conditions of the subharmonic growth theorems in the half-plane: `Σ η/(1+|ζ|^{2+m})`
/// for the `m` class, `Σ η^p/(1+|ζ|)^γ` together with `Σ 1/(1+|ζ|)` for the `p, γ` class.
pub fn measure_membership_plane(spec: &GrowthClassSpec, mu: &DiscreteMeasure<Complex64>) -> Result<ClassMembership> {
    let sums = match &spec.kind {
        ClassKind::PlaneM { m } => {
            vec![mu.atoms().iter().map(|a| a.mass * a.location.im / (1.0 + a.location.norm().powi(*m as i32 + 2))).sum()]
        }
        ClassKind::PlanePGamma { p, gamma } => vec![
            mu.atoms().iter().map(|a| a.mass * a.location.im.powf(*p) / (1.0 + a.location.norm()).powf(*gamma)).sum(),
            mu.atoms().iter().map(|a| a.mass / (1.0 + a.location.norm())).sum(),
        ],
        _ => return Err(Error::Usage(format!("{} has no half-plane measure condition", spec.label()))),
    };
    Ok(measure_membership(format!("measure {}", spec.label()), sums))
}

/// Half-space measure conditions: `Σ y_n/(1+|y|^{n+m})`, or `Σ y_n^p/(1+|y|)^γ` together with
/// `Σ 1/(1+|y|)^{n-1}`.
pub fn measure_membership_space(spec: &GrowthClassSpec, mu: &DiscreteMeasure<Vec<f64>>) -> Result<ClassMembership> {
    let n = match &spec.kind {
        ClassKind::SpaceM { n, .. } | ClassKind::SpacePGamma { n, .. } => *n,
        _ => return Err(Error::Usage(format!("{} has no half-space measure condition", spec.label()))),
    };
    if mu.atoms().iter().any(|a| a.location.len() != n) {
        return Err(domain("atom has the wrong dimension"));
    }
    let h = |a: &Vec<f64>| a[n - 1];
    let sums = match &spec.kind {
        ClassKind::SpaceM { m, .. } => {
            vec![mu.atoms().iter().map(|a| a.mass * h(&a.location) / (1.0 + norm(&a.location).powi((n + m) as i32))).sum()]
        }
        ClassKind::SpacePGamma { p, gamma, .. } => vec![
            mu.atoms().iter().map(|a| a.mass * h(&a.location).powf(*p) / (1.0 + norm(&a.location)).powf(*gamma)).sum(),
            mu.atoms().iter().map(|a| a.mass / (1.0 + norm(&a.location)).powi(n as i32 - 1)).sum(),
        ],
        _ => unreachable!(),
    };
    Ok(measure_membership(format!("measure {}", spec.label()), sums))
}

/// Estimate of `ε_0 = limsup ρ'(R) R log R / ρ(R)` from samples `(R, ρ(R))`: symmetric difference
/// quotients in `log R`, supremum over the tail half. Admissible when the estimate is below
/// `1 - 1e-6`.
pub fn rho_admissible(samples: &[(f64, f64)], alpha: f64) -> Result<VerificationReport> {
    if samples.len() < 3 {
        return Err(Error::Precondition("need at least three samples".into()));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
            return Err(Error::Precondition("samples must increase in R and not decrease in rho".into()));
        }
    }
    if samples[0].0 <= 1.0 {
        return Err(Error::Precondition("samples need R > 1 so that log R > 0".into()));
    }
    let order = VariableOrderSpec::new(samples.to_vec(), alpha)?;
    let k = samples.len();
    let mut eps = 0.0f64;
    for i in (k / 2).max(1)..k - 1 {
        let (r0, r1, r2) = (samples[i - 1].0, samples[i].0, samples[i + 1].0);
        let slope = (samples[i + 1].1 - samples[i - 1].1) / (r2.ln() - r0.ln());
        eps = eps.max(slope * r1.ln() / samples[i].1);
    }
    let pass = eps < 1.0 - 1e-6;
    Ok(VerificationReport::with_verdict(
        format!("rho-admissible alpha={alpha} order-at-infinity={}", order.order(f64::INFINITY)?),
        eps,
        1.0,
        1e-6,
        pass,
        "rho-admissible",
    ))
}

/// Points that atomic measures and covers live on.
pub trait CoverPoint: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn distance(&self, other: &Self) -> f64;
    fn modulus(&self) -> f64;
    fn scaled(&self, s: f64) -> Self;
    fn dimension(&self) -> usize;
}

impl CoverPoint for Complex64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn dimension(&self) -> usize {
        2
    }
}

impl CoverPoint for Vec<f64> {
    fn distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
    fn modulus(&self) -> f64 {
        norm(self)
    }
    fn scaled(&self, s: f64) -> Self {
        self.iter().map(|v| v * s).collect()
    }
    fn dimension(&self) -> usize {
        self.len()
    }
}

fn check_points<P: CoverPoint>(mu: &DiscreteMeasure<P>, point: Option<&P>) -> Result<()> {
    let dim = point.map(|p| p.dimension()).or_else(|| mu.atoms().first().map(|a| a.location.dimension()));
    if let Some(d) = dim {
        if mu.atoms().iter().any(|a| a.location.dimension() != d) {
            return Err(domain("atoms and point have different dimensions"));
        }
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(domain(format!("beta must be finite and nonnegative, got {beta}")));
    }
    Ok(())
}

/// `M(dμ)(z) = sup_r μ(B(z,r))/r^β` over open balls; `+∞` when an atom sits at `z` and `β > 0`.
pub fn maximal_function<P: CoverPoint>(mu: &DiscreteMeasure<P>, point: &P, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_points(mu, Some(point))?;
    if beta == 0.0 {
        return Ok(mu.total_mass());
    }
    let mut d: Vec<(f64, f64)> =
        mu.atoms().iter().filter(|a| a.mass > 0.0).map(|a| (a.location.distance(point), a.mass)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0.0f64;
    let mut acc = 0.0;
    let mut i = 0;
    while i < d.len() {
        let r = d[i].0;
        while i < d.len() && d[i].0 == r {
            acc += d[i].1;
            i += 1;
        }
        // μ(B(z, s)) = acc for s just above r and decreases in s on each step
        if r == 0.0 {
            return Ok(f64::INFINITY);
        }
        best = best.max(acc / r.powf(beta));
    }
    Ok(best)
}

/// `|z| >= 2` and `M(dμ)(z) > λ/|z|^β`.
pub fn in_exceptional_set<P: CoverPoint>(mu: &DiscreteMeasure<P>, point: &P, beta: f64, lambda: f64) -> Result<bool> {
    let r = point.modulus();
    Ok(r >= 2.0 && maximal_function(mu, point, beta)? > lambda / r.powf(beta))
}

/// `3 · 5^β · 2 · μ_total`.
pub fn default_lambda(beta: f64, total_mass: f64) -> f64 {
    3.0 * 5f64.powf(beta) * 2.0 * total_mass
}

/// Finite family of balls `B(c_j, ρ_j)` containing the exceptional set `E(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalCover<P> {
    pub disks: Vec<(P, f64)>,
    pub beta: f64,
    pub lambda: f64,
    /// `3 · 5^β μ_total/λ`.
    pub mass_bound: f64,
    /// `Σ (ρ_j/|c_j|)^β`.
    pub weighted_sum: f64,
}

impl<P: CoverPoint> ExceptionalCover<P> {
    pub fn contains(&self, point: &P) -> bool {
        self.disks.iter().any(|(c, r)| c.distance(point) < *r)
    }

    pub fn report(&self) -> VerificationReport {
        VerificationReport::at_most(
            format!("cover beta={} disks={}", self.beta, self.disks.len()),
            self.weighted_sum,
            self.mass_bound,
            0.0,
            "exceptional-cover",
        )
    }
}

/// Largest `r` with `r^β λ <= (|a| + r)^β μ(B(a, 2r))`. Every point of `E(λ)` within a witness
/// ball of an atom `a` lies within `ρ_a` of `a`.
fn witness_radius<P: CoverPoint>(a: &P, atoms: &[(P, f64)], beta: f64, lambda: f64) -> f64 {
    let ra = a.modulus();
    if ra == 0.0 {
        return 0.0;
    }
    let mut d: Vec<(f64, f64)> = atoms.iter().map(|(p, m)| (p.distance(a), *m)).collect();
    d.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = 0.0f64;
    let mut acc = 0.0;
    let mut i = 0;
    while i < d.len() {
        let r = d[i].0;
        while i < d.len() && d[i].0 == r {
            acc += d[i].1;
            i += 1;
        }
        // μ(B(a, 2s)) = acc for s in (r/2, next/2]
        let lo = r / 2.0;
        let hi = if i < d.len() { d[i].0 / 2.0 } else { f64::INFINITY };
        let t = (acc / lambda).powf(1.0 / beta);
        if t >= 1.0 {
            return f64::INFINITY;
        }
        let cap = t * ra / (1.0 - t);
        if cap > lo {
            best = best.max(cap.min(hi));
        }
    }
    best
}

/// Cover of `E(λ)` for a finite atomic measure. Witness radii `ρ_a` are computed exactly; balls
/// `B(a, 2ρ_a)` are selected greedily, largest first, while disjoint from those already chosen,
/// and every selected ball is enlarged to radius `5ρ_b`. Balls with centre inside `|z| < 2` are
/// moved to the centre `2b/|b|` with the smallest radius still covering their part of `|z| >= 2`.
pub fn exceptional_cover<P: CoverPoint>(mu: &DiscreteMeasure<P>, beta: f64, lambda: f64) -> Result<ExceptionalCover<P>> {
    check_beta(beta)?;
    check_points(mu, None)?;
    let total = mu.total_mass();
    let threshold = 5f64.powf(beta) * total;
    if !(lambda >= threshold) || !lambda.is_finite() {
        return Err(Error::Precondition(format!("lambda = {lambda} is below 5^beta * mass = {threshold}")));
    }
    let mass_bound = if total == 0.0 { 0.0 } else { 3.0 * threshold / lambda };
    let mut cover = ExceptionalCover { disks: Vec::new(), beta, lambda, mass_bound, weighted_sum: 0.0 };
    // with β = 0 the maximal function is μ_total <= λ, so E(λ) is empty
    if total == 0.0 || beta == 0.0 {
        return Ok(cover);
    }
    let atoms: Vec<(P, f64)> = mu.atoms().iter().filter(|a| a.mass > 0.0).map(|a| (a.location.clone(), a.mass)).collect();
    let mut witness: Vec<(P, f64)> = atoms
        .iter()
        .map(|(a, _)| (a.clone(), witness_radius(a, &atoms, beta, lambda)))
        .filter(|(_, r)| *r > 0.0)
        .collect();
    witness.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut chosen: Vec<(P, f64)> = Vec::new();
    for (a, r) in witness {
        if chosen.iter().all(|(b, rb)| b.distance(&a) >= 2.0 * (r + rb)) {
            chosen.push((a, r));
        }
    }
    for (b, r) in chosen {
        let s = 5.0 * r;
        let rb = b.modulus();
        if rb >= 2.0 {
            cover.disks.push((b, s));
        } else if rb + s > 2.0 {
            let d = 2.0 - rb;
            let radius = (s * s * (1.0 + d / rb) - 2.0 * d * d / rb).max(0.0).sqrt() * (1.0 + 1e-12);
            let mut c = b.scaled(2.0 / rb);
            if c.modulus() < 2.0 {
                c = c.scaled(1.0 + 1e-15);
            }
            cover.disks.push((c, radius));
        }
    }
    cover.weighted_sum = cover.disks.iter().map(|(c, r)| (r / c.modulus()).powf(beta)).sum();
    Ok(cover)
}

/// Exponents of the `p, γ` growth theorems in dimension `n` (`n = 2` is the half-plane):
/// `|u| = o(x_n^{1-α/p} |x|^{γ/p + (n-1)/q - n + α/p})`, with a `(log|x|)^{1/q}` factor at
/// the lower end of the `γ` window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthExponent {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub m: Option<usize>,
    pub log_augmented: bool,
}

impl GrowthExponent {
    /// Validates the window of the theorem selected by `m`: plain kernels when `None`, the
    /// modified kernels of order `m` otherwise.
    pub fn new(n: usize, p: f64, gamma: f64, alpha: f64, m: Option<usize>) -> Result<Self> {
        if !(2..=5).contains(&n) {
            return Err(Error::Usage(format!("dimension must be in [2, 5], got {n}")));
        }
        if !(p >= 1.0) || !p.is_finite() || !gamma.is_finite() {
            return Err(Error::Usage(format!("need 1 <= p < ∞ and finite gamma, got p = {p}, gamma = {gamma}")));
        }
        let nf = n as f64;
        if !(alpha > 0.0 && alpha <= nf * p) {
            return Err(Error::Usage(format!("alpha = {alpha} is outside (0, {}]", nf * p)));
        }
        let eps = 1e-12 * (1.0 + gamma.abs());
        let (lo, hi, closed_hi) = match (m, p == 1.0) {
            (None, true) => (0.0, nf, true),
            (None, false) => (-(nf - 1.0) * (p - 1.0), nf - 1.0 + p, false),
            (Some(m), true) => (m as f64 + nf - 1.0, m as f64 + nf, true),
            (Some(m), false) => (nf - 1.0 + m as f64 * p, nf - 1.0 + (m as f64 + 1.0) * p, false),
        };
        let log_augmented = p > 1.0 && (gamma - lo).abs() <= eps;
        let inside = gamma > lo && (gamma < hi || (closed_hi && gamma <= hi + eps));
        if !inside && !log_augmented {
            return Err(Error::Usage(format!("gamma = {gamma} is outside the window ({lo}, {hi}) for p = {p}, m = {m:?}")));
        }
        Ok(Self { n, p, gamma, alpha, m, log_augmented })
    }

    /// `p = 1, γ = m + n`: the growth `o(x_n^{1-α}|x|^{m+α})`.
    pub fn basic(n: usize, m: usize, alpha: f64) -> Result<Self> {
        Self::new(n, 1.0, (m + n) as f64, alpha, Some(m))
    }

    pub fn q_inverse(&self) -> f64 {
        1.0 - 1.0 / self.p
    }

    /// Exponent of `|x|`.
    pub fn modulus_exponent(&self) -> f64 {
        let nf = self.n as f64;
        self.gamma / self.p + (nf - 1.0) * self.q_inverse() - nf + self.alpha / self.p
    }

    pub fn height_exponent(&self) -> f64 {
        1.0 - self.alpha / self.p
    }

    pub fn denominator(&self, height: f64, modulus: f64) -> f64 {
        let base = height.powf(self.height_exponent()) * modulus.powf(self.modulus_exponent());
        if self.log_augmented {
            base * modulus.ln().powf(self.q_inverse())
        } else {
            base
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub radius: f64,
    /// `NaN` when the point lies in the cover.
    pub ratio: f64,
    pub covered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    Data,
    /// Every point of the ray lies in the cover.
    NoData,
}

/// Ratios `|u|/denominator` along a ray, outside the cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    pub status: ProbeStatus,
    /// Ratios never increase across uncovered rows.
    pub monotone_decrease: bool,
    /// Last uncovered ratio over the first, `NaN` without data or with a zero first ratio.
    pub last_over_first: f64,
    pub note: &'static str,
}

const PROBE_NOTE: &str = "ratios outside the exceptional cover; decrease is consistent with the growth bound and does not prove it";

/// Radii `2, 4, ..., 2^k`.
pub fn dyadic_radii(k: u32) -> Vec<f64> {
    (1..=k).map(|j| 2f64.powi(j as i32)).collect()
}

fn probe_table<F>(radii: &[f64], covered: impl Fn(f64) -> bool, ratio: F) -> Result<ProbeTable>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(domain("radii must be positive and finite"));
    }
    let flags: Vec<bool> = radii.iter().map(|r| covered(*r)).collect();
    let values: Vec<Result<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = radii
            .iter()
            .zip(&flags)
            .map(|(r, c)| {
                let ratio = &ratio;
                let (r, c) = (*r, *c);
                s.spawn(move || if c { Ok(f64::NAN) } else { ratio(r) })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("probe worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(radii.len());
    for ((r, c), v) in radii.iter().zip(flags).zip(values) {
        rows.push(ProbeRow { radius: *r, ratio: v?, covered: c });
    }
    let data: Vec<f64> = rows.iter().filter(|r| !r.covered).map(|r| r.ratio).collect();
    let status = if data.is_empty() { ProbeStatus::NoData } else { ProbeStatus::Data };
    let monotone_decrease = data.windows(2).all(|w| w[1] <= w[0]);
    let last_over_first = match (data.first(), data.last()) {
        (Some(a), Some(b)) if *a != 0.0 => b / a,
        _ => f64::NAN,
    };
    Ok(ProbeTable { rows, status, monotone_decrease, last_over_first, note: PROBE_NOTE })
}

fn check_alpha_with_measure(exp: &GrowthExponent, has_measure: bool) -> Result<()> {
    // the subharmonic versions exclude the endpoint α = n p
    if has_measure && exp.alpha >= exp.n as f64 * exp.p {
        return Err(Error::Usage(format!("alpha must be below {} when a measure is present", exp.n as f64 * exp.p)));
    }
    Ok(())
}

fn admits_hint(exp: &GrowthExponent, f: &BoundaryFunction) -> Result<()> {
    // |f|^p/(1+|y'|)^γ integrable on R^{n-1}
    let e = exp.p * f.decay_hint() + exp.gamma;
    if !(e > exp.n as f64 - 1.0) {
        return Err(Error::Precondition(format!(
            "boundary data '{}' with decay {} are not in the class for p = {}, gamma = {}",
            f.label(),
            f.decay_hint(),
            exp.p,
            exp.gamma
        )));
    }
    Ok(())
}

/// `|u(Re^{iθ})|/denominator` for `u = ∫ P_m f + Σ μ_j G_m(·, ζ_j)` with `m = exp.m` (or 0).
pub fn growth_probe_p_plane(
    exp: &GrowthExponent,
    f: &BoundaryFunction,
    mu: &DiscreteMeasure<Complex64>,
    theta: f64,
    radii: &[f64],
    cover: Option<&ExceptionalCover<Complex64>>,
    qspec: &QuadratureSpec,
) -> Result<ProbeTable> {
    if exp.n != 2 {
        return Err(Error::Usage("half-plane probes need n = 2".into()));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(domain(format!("theta = {theta} is not in (0, π)")));
    }
    check_alpha_with_measure(exp, !mu.is_empty())?;
    admits_hint(exp, f)?;
    if exp.log_augmented && radii.iter().any(|r| *r <= 1.0) {
        return Err(domain("log-augmented denominators need radii above 1"));
    }
    let m = exp.m.unwrap_or(0);
    let point = |r: f64| Complex64::from_polar(r, theta);
    probe_table(radii, |r| cover.is_some_and(|c| c.contains(&point(r))), |r| {
        let z = point(r);
        let v = poisson_integral_plane_mod(m, f, z, qspec)?.value;
        let h = green_potential_plane(mu, m, z)?;
        Ok((v + h).abs() / exp.denominator(z.im, r))
    })
}

/// Half-space analogue along `x = R·direction/|direction|`.
pub fn growth_probe_p_space(
    exp: &GrowthExponent,
    f: &BoundaryFunction,
    mu: &DiscreteMeasure<Vec<f64>>,
    direction: &[f64],
    radii: &[f64],
    cover: Option<&ExceptionalCover<Vec<f64>>>,
    qspec: &QuadratureSpec,
) -> Result<ProbeTable> {
    let n = exp.n;
    if direction.len() != n || !(3..=5).contains(&n) {
        return Err(domain(format!("direction needs {n} coordinates with n in [3, 5]")));
    }
    let len = norm(direction);
    if !(direction[n - 1] > 0.0) || !len.is_finite() {
        return Err(domain("direction must point into the upper half-space"));
    }
    check_alpha_with_measure(exp, !mu.is_empty())?;
    admits_hint(exp, f)?;
    if exp.log_augmented && radii.iter().any(|r| *r <= 1.0) {
        return Err(domain("log-augmented denominators need radii above 1"));
    }
    let m = exp.m.unwrap_or(0);
    let point = |r: f64| -> Vec<f64> { direction.iter().map(|v| v * r / len).collect() };
    probe_table(radii, |r| cover.is_some_and(|c| c.contains(&point(r))), |r| {
        let x = point(r);
        let v = poisson_integral_space_mod(m, f, &x, qspec)?.value;
        let h = green_potential_space(mu, m, &x)?;
        Ok((v + h).abs() / exp.denominator(x[n - 1], r))
    })
}

/// Ratios `|u|/(y^{1-α}|z|^{m+α})` along the ray of angle `θ`.
#[allow(clippy::too_many_arguments)]
pub fn growth_probe_plane(
    f: &BoundaryFunction,
    mu: &DiscreteMeasure<Complex64>,
    m: usize,
    alpha: f64,
    theta: f64,
    radii: &[f64],
    cover: Option<&ExceptionalCover<Complex64>>,
    qspec: &QuadratureSpec,
) -> Result<ProbeTable> {
    growth_probe_p_plane(&GrowthExponent::basic(2, m, alpha)?, f, mu, theta, radii, cover, qspec)
}

/// Ratios `|u|/(x_n^{1-α}|x|^{m+α})` along a ray in the half-space.
#[allow(clippy::too_many_arguments)]
pub fn growth_probe_space(
    n: usize,
    f: &BoundaryFunction,
    mu: &DiscreteMeasure<Vec<f64>>,
    m: usize,
    alpha: f64,
    direction: &[f64],
    radii: &[f64],
    cover: Option<&ExceptionalCover<Vec<f64>>>,
    qspec: &QuadratureSpec,
) -> Result<ProbeTable> {
    growth_probe_p_space(&GrowthExponent::basic(n, m, alpha)?, f, mu, direction, radii, cover, qspec)
}

/// Constant `K > 0`, order function `ρ` and the grid of the lower-bound probe.
#[derive(Clone)]
pub struct LowerBoundProbeSpec {
    k: f64,
    rho: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    grid: Vec<Vec<f64>>,
}

impl fmt::Debug for LowerBoundProbeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LowerBoundProbeSpec").field("k", &self.k).field("grid", &self.grid.len()).finish_non_exhaustive()
    }
}

impl LowerBoundProbeSpec {
    pub fn new(k: f64, rho: impl Fn(f64) -> f64 + Send + Sync + 'static, grid: Vec<Vec<f64>>) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(domain(format!("K must be positive, got {k}")));
        }
        Ok(Self { k, rho: Arc::new(rho), grid })
    }

    pub fn grid(&self) -> &[Vec<f64>] {
        &self.grid
    }
}

/// Points `x` with `|x| = R` and `x_n = R sinθ`, for `n_r` radii geometric in `[r_min, r_max]`
/// and `n_theta` angles `θ_j = jπ/(2 n_theta)`; `x'` runs over `±e_1` (and `±e_i` in space).
pub fn polar_grid(n: usize, r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 || n_r < 2 || n_theta < 1 || !(r_min > 0.0 && r_max > r_min) {
        return Err(domain("grid needs n >= 2, n_r >= 2, n_theta >= 1 and 0 < r_min < r_max"));
    }
    let mut out = Vec::new();
    for i in 0..n_r {
        let r = r_min * (r_max / r_min).powf(i as f64 / (n_r - 1) as f64);
        for j in 1..=n_theta {
            let theta = j as f64 * PI / (2.0 * n_theta as f64);
            let (s, c) = theta.sin_cos();
            let dirs = if j == n_theta { 1 } else { 2 * (n - 1) };
            for d in 0..dirs {
                let mut x = vec![0.0; n];
                if j != n_theta {
                    x[d / 2] = if d % 2 == 0 { r * c } else { -r * c };
                }
                x[n - 1] = r * s;
                out.push(x);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub radius: f64,
    pub sin_theta: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundTable {
    pub rows: Vec<LowerBoundRow>,
    /// Largest ratio: the fitted constant `c`.
    pub fitted_c: f64,
}

/// `-u(x) sin^{n-1}θ / (K (1 + (2R)^{ρ(R)}))` at every grid point of dimension `n`.
pub fn lower_bound_probe(spec: &LowerBoundProbeSpec, u: &(dyn Fn(&[f64]) -> f64 + Sync), n: usize) -> Result<LowerBoundTable> {
    if n < 2 {
        return Err(domain("dimension must be at least 2"));
    }
    let mut rows = Vec::with_capacity(spec.grid.len());
    for x in &spec.grid {
        if x.len() != n {
            return Err(domain("grid point has the wrong dimension"));
        }
        let r = norm(x);
        let s = x[n - 1] / r;
        if !(s > 0.0) || !s.is_finite() {
            return Err(domain(format!("grid point {x:?} has sin θ = 0")));
        }
        let growth = ((spec.rho)(r) * (2.0 * r).ln()).exp();
        let ratio = -u(x) * s.powi(n as i32 - 1) / (spec.k * (1.0 + growth));
        rows.push(LowerBoundRow { radius: r, sin_theta: s, ratio });
    }
    let fitted_c = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(LowerBoundTable { rows, fitted_c })
}

/// Fitted constants on a polar grid and on the grid with doubled density in both radius and
/// angle; passes when both are finite and differ by at most 10% (or both are nonpositive).
#[allow(clippy::too_many_arguments)]
pub fn lower_bound_refinement(
    k: f64,
    rho: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    u: &(dyn Fn(&[f64]) -> f64 + Sync),
    n: usize,
    r_min: f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<VerificationReport> {
    let coarse = LowerBoundProbeSpec::new(k, rho.clone(), polar_grid(n, r_min, r_max, n_r, n_theta)?)?;
    let fine = LowerBoundProbeSpec::new(k, rho, polar_grid(n, r_min, r_max, 2 * n_r - 1, 2 * n_theta)?)?;
    let a = lower_bound_probe(&coarse, u, n)?.fitted_c;
    let b = lower_bound_probe(&fine, u, n)?.fitted_c;
    let finite = a.is_finite() && b.is_finite();
    let pass = finite && ((a <= 0.0 && b <= 0.0) || (b - a).abs() <= 0.1 * a.abs().max(b.abs()));
    Ok(VerificationReport::with_verdict(format!("lower-bound refinement n={n}"), b, a, 0.1, pass, "lower-bound"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::new(1e-9, 1e-9).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plane_m_canonical_families() {
        for m in [0usize, 1, 2] {
            let s = GrowthClassSpec::new(ClassKind::PlaneM { m }).unwrap();
            let one = class_membership(&s, &BoundaryFunction::constant(1.0), &spec()).unwrap();
            assert_eq!(one.status, MembershipStatus::Finite);
            let mm = m as i32;
            let power = BoundaryFunction::line("power m", -(m as f64), move |t| t.abs().powi(mm));
            assert_eq!(class_membership(&s, &power, &spec()).unwrap().status, MembershipStatus::Finite);
            let big = BoundaryFunction::line("power m+2", -(m as f64) - 2.0, move |t| t.abs().powi(mm + 2));
            let r = class_membership(&s, &big, &spec()).unwrap();
            assert_eq!(r.status, MembershipStatus::Infinite);
            assert!(!r.report.pass);
        }
        let s = GrowthClassSpec::new(ClassKind::PlaneM { m: 0 }).unwrap();
        let one = class_membership(&s, &BoundaryFunction::constant(1.0), &spec()).unwrap();
        assert_relative_eq!(one.value, PI, epsilon = 1e-8);
        assert!(one.report.pass);
    }

    #[test]
    fn wrong_hint_is_indeterminate() {
        let s = GrowthClassSpec::new(ClassKind::PlaneM { m: 0 }).unwrap();
        // claims decay but grows like t^2
        let liar = BoundaryFunction::line("liar", 5.0, |t| t * t);
        let r = class_membership(&s, &liar, &spec()).unwrap();
        assert_eq!(r.status, MembershipStatus::Indeterminate);
        assert!(!r.report.pass);
    }

    #[test]
    fn other_classes() {
        let s = GrowthClassSpec::new(ClassKind::PlanePGamma { p: 2.0, gamma: 1.0 }).unwrap();
        let f = BoundaryFunction::line("inv", 1.0, |t| 1.0 / (1.0 + t.abs()));
        let r = class_membership(&s, &f, &spec()).unwrap();
        assert_eq!(r.status, MembershipStatus::Finite);
        // ∫ 2/(1+t)^3 over (0, ∞) = 1
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-7);
        let s = GrowthClassSpec::new(ClassKind::SpaceM { n: 3, m: 0 }).unwrap();
        let r = class_membership(&s, &BoundaryFunction::constant(1.0), &spec()).unwrap();
        assert_eq!(r.status, MembershipStatus::Finite);
        // 2π ∫ r/(1+r^3) dr = 2π · 2π/(3√3)
        assert_relative_eq!(r.value, 4.0 * PI * PI / (3.0 * 3f64.sqrt()), epsilon = 1e-6);
        let grow = BoundaryFunction::new("norm^2", -2.0, |y: &[f64]| y[0] * y[0] + y[1] * y[1]);
        assert_eq!(class_membership(&s, &grow, &spec()).unwrap().status, MembershipStatus::Infinite);
        let order = VariableOrderSpec::constant(1.0, 0.5).unwrap();
        let lv = GrowthClassSpec::new(ClassKind::LvAlpha { n: 2, order: order.clone() }).unwrap();
        let lin = BoundaryFunction::line("abs", -1.0, f64::abs);
        assert_eq!(class_membership(&lv, &lin, &spec()).unwrap().status, MembershipStatus::Finite);
        let cube = BoundaryFunction::line("cube", -3.0, |t: f64| t.abs().powi(3));
        assert_eq!(class_membership(&lv, &cube, &spec()).unwrap().status, MembershipStatus::Infinite);
        let lu = GrowthClassSpec::new(ClassKind::LuAlpha { n: 2, order: order.clone() }).unwrap();
        let lu_f = BoundaryFunction::new("x", -1.0, |p: &[f64]| p[0]);
        assert_eq!(class_membership(&lu, &lu_f, &spec()).unwrap().status, MembershipStatus::Finite);
        let lu3 = GrowthClassSpec::new(ClassKind::LuAlpha { n: 3, order }).unwrap();
        let sq = BoundaryFunction::new("sq", -3.0, |p: &[f64]| norm(p).powi(3));
        assert_eq!(class_membership(&lu3, &sq, &QuadratureSpec::new(1e-7, 1e-7).unwrap()).unwrap().status, MembershipStatus::Infinite);
    }

    #[test]
    fn measure_conditions() {
        let s = GrowthClassSpec::new(ClassKind::PlaneM { m: 1 }).unwrap();
        let mu = DiscreteMeasure::new([(c(0.0, 1.0), 2.0)]).unwrap();
        let r = measure_membership_plane(&s, &mu).unwrap();
        assert_eq!(r.status, MembershipStatus::Finite);
        assert_relative_eq!(r.value, 1.0);
        let sp = GrowthClassSpec::new(ClassKind::SpacePGamma { n: 3, p: 2.0, gamma: 1.0 }).unwrap();
        let mu = DiscreteMeasure::new([(vec![0.0, 0.0, 1.0], 1.0)]).unwrap();
        assert_relative_eq!(measure_membership_space(&sp, &mu).unwrap().value, 0.5);
        assert!(measure_membership_space(&s, &mu).is_err());
    }

    #[test]
    fn rho_admissibility() {
        let table = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> Vec<(f64, f64)> {
            (0..=64).map(|i| lo * (hi / lo).powf(i as f64 / 64.0)).map(|r| (r, f(r))).collect()
        };
        let e = std::f64::consts::E;
        let r = rho_admissible(&table(&|_| 2.0, e, e.powi(8)), 1.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
        let r = rho_admissible(&table(&|x: f64| x.ln().sqrt().max(1.0), e, e.powi(8)), 1.0).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-2, "{}", r.lhs);
        assert!(r.pass);
        let r = rho_admissible(&table(&|x: f64| x.ln(), e, e.powi(8)), 1.0).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9);
        assert!(!r.pass);
        let bad = vec![(3.0, 2.0), (4.0, 1.5), (5.0, 3.0)];
        assert!(matches!(rho_admissible(&bad, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn maximal_function_values() {
        let mu = DiscreteMeasure::new([(c(3.0, 4.0), 1.0)]).unwrap();
        assert_relative_eq!(maximal_function(&mu, &c(0.0, 0.0), 1.0).unwrap(), 0.2);
        assert_eq!(maximal_function(&DiscreteMeasure::<Complex64>::empty(), &c(1.0, 1.0), 1.0).unwrap(), 0.0);
        let two = DiscreteMeasure::new([(c(1.0, 0.0), 1.0), (c(2.0, 0.0), 3.0)]).unwrap();
        assert_eq!(maximal_function(&two, &c(0.0, 0.0), 0.0).unwrap(), 4.0);
        // max(1/1, 4/2) = 2 at β = 1
        assert_relative_eq!(maximal_function(&two, &c(0.0, 0.0), 1.0).unwrap(), 2.0);
        assert_eq!(maximal_function(&two, &c(1.0, 0.0), 0.5).unwrap(), f64::INFINITY);
        let scaled = two.scaled(3.0).unwrap();
        assert_relative_eq!(maximal_function(&scaled, &c(0.5, 0.5), 1.3).unwrap(), 3.0 * maximal_function(&two, &c(0.5, 0.5), 1.3).unwrap());
    }

    fn random_measure(rng: &mut ChaCha8Rng, k: usize) -> DiscreteMeasure<Complex64> {
        DiscreteMeasure::new((0..k).map(|_| {
            let r = 2f64.powf(rng.gen_range(0.0..8.0));
            let t = rng.gen_range(0.0..PI);
            (Complex64::from_polar(r, t), rng.gen_range(0.1..2.0))
        }))
        .unwrap()
    }

    #[test]
    fn cover_bound_and_audit() {
        assert!(exceptional_cover(&DiscreteMeasure::<Complex64>::empty(), 1.0, 0.0).unwrap().disks.is_empty());
        let single = DiscreteMeasure::new([(c(10.0, 3.0), 1.0)]).unwrap();
        let cov = exceptional_cover(&single, 1.0, default_lambda(1.0, 1.0)).unwrap();
        assert_eq!(cov.disks.len(), 1);
        assert!(cov.weighted_sum < 0.5 * cov.mass_bound);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for beta in [0.5, 1.0, 2.0] {
            let mu = random_measure(&mut rng, 40);
            let lambda = default_lambda(beta, mu.total_mass());
            let cov = exceptional_cover(&mu, beta, lambda).unwrap();
            assert!(cov.report().pass, "{:?}", cov.report());
            assert!(cov.disks.iter().all(|(c, _)| c.norm() >= 2.0));
            // near the atoms, where the maximal function is largest
            let mut audited = 0;
            while audited < 1000 {
                let a = mu.atoms()[rng.gen_range(0..mu.len())].location;
                let z = a + Complex64::from_polar(rng.gen_range(0.0..2.0f64).powi(3), rng.gen_range(0.0..2.0 * PI));
                if z.norm() < 2.0 || cov.contains(&z) {
                    continue;
                }
                audited += 1;
                assert!(!in_exceptional_set(&mu, &z, beta, lambda).unwrap(), "{z} beta={beta}");
            }
        }
        let mu = random_measure(&mut rng, 5);
        assert!(matches!(exceptional_cover(&mu, 1.0, 0.1), Err(Error::Precondition(_))));
    }

    #[test]
    fn cover_catches_dense_cluster() {
        // a tight cluster puts points near it into E(λ) at the threshold λ
        let mu = DiscreteMeasure::new((0..20).map(|k| (vec![30.0 + 1e-3 * k as f64, 0.0, 1.0], 1.0))).unwrap();
        let beta = 2.0;
        let lambda = 5f64.powf(beta) * mu.total_mass();
        let p = vec![30.01, 0.0, 1.0];
        assert!(in_exceptional_set(&mu, &p, beta, lambda).unwrap());
        let cov = exceptional_cover(&mu, beta, lambda).unwrap();
        assert!(cov.contains(&p));
        assert!(cov.report().pass);
    }

    #[test]
    fn recentred_disks_cover_their_part() {
        let mu = DiscreteMeasure::new([(c(1.9, 0.0), 1.0), (c(1.85, 0.05), 5.0)]).unwrap();
        let beta = 1.0;
        let lambda = 5.0 * mu.total_mass();
        let cov = exceptional_cover(&mu, beta, lambda).unwrap();
        assert!(cov.disks.iter().all(|(c, _)| c.norm() >= 2.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..2000 {
            let z = Complex64::from_polar(rng.gen_range(2.0..3.0), rng.gen_range(-0.5..0.5));
            if in_exceptional_set(&mu, &z, beta, lambda).unwrap() {
                assert!(cov.contains(&z), "{z}");
            }
        }
    }

    #[test]
    fn exponents_and_windows() {
        let e = GrowthExponent::new(2, 1.0, 3.0, 1.0, Some(1)).unwrap();
        let b = GrowthExponent::basic(2, 1, 1.0).unwrap();
        assert_eq!(e, b);
        assert_relative_eq!(b.modulus_exponent(), 2.0);
        assert_eq!(b.height_exponent(), 0.0);
        let l = GrowthExponent::new(2, 2.0, 1.0, 1.0, Some(0)).unwrap();
        assert!(l.log_augmented);
        let (y, r) = (0.3f64, 50.0f64);
        let direct = y.powf(0.5) * r.ln().sqrt() * r.powf(0.5 + 0.5 - 2.0 + 0.5);
        assert_relative_eq!(l.denominator(y, r), direct, epsilon = 1e-14);
        assert!(!GrowthExponent::new(2, 2.0, 1.0, 1.0, None).unwrap().log_augmented);
        assert!(matches!(GrowthExponent::new(2, 2.0, 5.0, 1.0, None), Err(Error::Usage(_))));
        assert!(matches!(GrowthExponent::new(3, 1.0, 3.5, 1.0, None), Err(Error::Usage(_))));
        assert!(GrowthExponent::new(3, 3.0, 2.0 + 3.0, 1.0, Some(1)).unwrap().log_augmented);
    }

    #[test]
    fn probe_zero_data() {
        let zero = BoundaryFunction::constant(0.0);
        let t = growth_probe_plane(&zero, &DiscreteMeasure::empty(), 1, 1.0, 1.0, &dyadic_radii(5), None, &spec()).unwrap();
        assert!(t.rows.iter().all(|r| r.ratio == 0.0));
        assert_eq!(t.status, ProbeStatus::Data);
    }

    #[test]
    fn probe_power_data_decreases() {
        let m = 1usize;
        let f = BoundaryFunction::line("abs", -1.0, f64::abs);
        let radii = [2.0, 8.0, 32.0, 128.0, 512.0, 1000.0];
        let t = growth_probe_plane(&f, &DiscreteMeasure::empty(), m, 1.0, PI / 2.0, &radii, None, &spec()).unwrap();
        assert!(t.monotone_decrease, "{t:?}");
        assert!(t.last_over_first <= 0.1, "{t:?}");
    }

    #[test]
    fn probe_atom_contribution_decays() {
        let zero = BoundaryFunction::constant(0.0);
        let mu = DiscreteMeasure::new([(c(-40.0, 2.0), 3.0)]).unwrap();
        let radii = dyadic_radii(10);
        let t = growth_probe_plane(&zero, &mu, 0, 1.0, PI / 3.0, &radii, None, &spec()).unwrap();
        let last = t.rows.last().unwrap().ratio;
        assert!(last < 1e-2 * t.rows.iter().map(|r| r.ratio).fold(0.0, f64::max));
    }

    #[test]
    fn probe_respects_cover() {
        let zero = BoundaryFunction::constant(0.0);
        let cover = ExceptionalCover { disks: vec![(c(0.0, 8.0), 1.0)], beta: 1.0, lambda: 1.0, mass_bound: 0.0, weighted_sum: 0.0 };
        let t = growth_probe_plane(&zero, &DiscreteMeasure::empty(), 0, 1.0, PI / 2.0, &[4.0, 8.0], Some(&cover), &spec()).unwrap();
        assert!(t.rows[1].covered && t.rows[1].ratio.is_nan());
        let all = growth_probe_plane(&zero, &DiscreteMeasure::empty(), 0, 1.0, PI / 2.0, &[8.0], Some(&cover), &spec()).unwrap();
        assert_eq!(all.status, ProbeStatus::NoData);
    }

    #[test]
    fn p_probe_decreasing() {
        let f = BoundaryFunction::line("inv", 1.0, |t| 1.0 / (1.0 + t.abs()));
        let exp = GrowthExponent::new(2, 2.0, 1.0, 1.0, None).unwrap();
        let t = growth_probe_p_plane(&exp, &f, &DiscreteMeasure::empty(), 1.0, &dyadic_radii(10), None, &spec()).unwrap();
        assert!(t.monotone_decrease, "{t:?}");
    }

    #[test]
    fn space_probe() {
        let one = BoundaryFunction::constant(1.0);
        let s = QuadratureSpec::new(1e-7, 1e-7).unwrap();
        let t = growth_probe_space(3, &one, &DiscreteMeasure::empty(), 0, 1.0, &[0.3, 0.2, 1.0], &dyadic_radii(6), None, &s).unwrap();
        // u ≡ 1: ratio = 1/|x|
        for r in &t.rows {
            assert_relative_eq!(r.ratio, 1.0 / r.radius, epsilon = 1e-6);
        }
        assert!(t.monotone_decrease);
    }

    #[test]
    fn lower_bound_examples() {
        let grid = polar_grid(2, 1.5, 12.0, 8, 6).unwrap();
        let pos = LowerBoundProbeSpec::new(1.0, |_| 2.0, grid.clone()).unwrap();
        assert!(lower_bound_probe(&pos, &|x: &[f64]| x[1], 2).unwrap().fitted_c <= 0.0);
        let rho = |r: f64| r / r.ln();
        let u = |x: &[f64]| x[1].exp() * x[0].cos();
        let spec = LowerBoundProbeSpec::new(1.0, rho, grid).unwrap();
        let t = lower_bound_probe(&spec, &u, 2).unwrap();
        assert!(t.fitted_c.is_finite() && t.fitted_c <= 1.0);
        for row in &t.rows {
            // -u <= e^R <= 1 + (2R)^{ρ(R)}
            assert!(row.ratio <= row.sin_theta);
        }
        let r = lower_bound_refinement(1.0, rho, &u, 2, 1.5, 12.0, 8, 6).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(LowerBoundProbeSpec::new(0.0, rho, vec![]).is_err());
        let flat = LowerBoundProbeSpec::new(1.0, rho, vec![vec![1.0, 0.0]]).unwrap();
        assert!(lower_bound_probe(&flat, &u, 2).is_err());
    }
}
