//! Harmonic and subharmonic functions assembled from boundary data and point masses.
//!
//! Boundary data are [`BoundaryFunction`] values evaluated at `[t]` on the real line or at
//! `y' ∈ R^{n-1}`. Measures are finite lists of weighted atoms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, singular, Error, Result};
use crate::plane_kernels::{green_plane_mod, poisson_plane, poisson_plane_mod, MAX_ORDER};
use crate::quadrature::{integrate_boundary_polar_split, integrate_line, Decay, IntegrationResult, QuadratureSpec};
use crate::space_kernels::{green_space_mod, norm, poisson_space, poisson_space_mod};

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Boundary data `f` with a decay hint `q`: `|f(t)| = O(|t|^{-q})` as `|t| → ∞`.
/// Growing data have negative `q`.
#[derive(Clone)]
pub struct BoundaryFunction {
    label: String,
    decay_hint: f64,
    breakpoints: Vec<f64>,
    eval: Evaluator,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("label", &self.label)
            .field("decay_hint", &self.decay_hint)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl BoundaryFunction {
    pub fn new(label: impl Into<String>, decay_hint: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), decay_hint, breakpoints: Vec::new(), eval: Arc::new(f) }
    }

    /// Data on the real line.
    pub fn line(label: impl Into<String>, decay_hint: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(label, decay_hint, move |p: &[f64]| f(p[0]))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant {c}"), 0.0, move |_: &[f64]| c)
    }

    /// Radii (or abscissae on the line) where the data are not smooth.
    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decay_hint(&self) -> f64 {
        self.decay_hint
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.eval)(p)
    }

    pub fn eval_line(&self, t: f64) -> f64 {
        (self.eval)(&[t])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<P> {
    pub location: P,
    pub mass: f64,
}

/// Finite nonnegative combination of point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<P> {
    atoms: Vec<Atom<P>>,
}

impl<P> Default for DiscreteMeasure<P> {
    fn default() -> Self {
        Self { atoms: Vec::new() }
    }
}

impl<P> DiscreteMeasure<P> {
    pub fn new(atoms: impl IntoIterator<Item = (P, f64)>) -> Result<Self> {
        let atoms: Vec<Atom<P>> = atoms.into_iter().map(|(location, mass)| Atom { location, mass }).collect();
        if let Some(a) = atoms.iter().find(|a| !(a.mass >= 0.0) || !a.mass.is_finite()) {
            return Err(domain(format!("atom mass must be finite and nonnegative, got {}", a.mass)));
        }
        Ok(Self { atoms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom<P>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().fold(0.0, |s, a| s + a.mass)
    }

    /// The same atoms with every mass multiplied by `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self>
    where
        P: Clone,
    {
        Self::new(self.atoms.iter().map(|a| (a.location.clone(), a.mass * c)))
    }
}

/// Order function `ρ` given by a table of `(R, ρ(R))` samples, linear between samples and
/// constant outside, plus the shift `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableOrderSpec {
    table: Vec<(f64, f64)>,
    alpha: f64,
}

impl VariableOrderSpec {
    pub fn new(table: Vec<(f64, f64)>, alpha: f64) -> Result<Self> {
        if table.is_empty() {
            return Err(domain("order table is empty"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        for (r, rho) in &table {
            if !r.is_finite() || !rho.is_finite() || *r < 0.0 {
                return Err(domain(format!("bad order table entry ({r}, {rho})")));
            }
            if *rho < 1.0 {
                return Err(domain(format!("rho must be at least 1, got {rho}")));
            }
        }
        for w in table.windows(2) {
            if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
                return Err(domain("order table must increase in R and not decrease in rho"));
            }
        }
        let spec = Self { table, alpha };
        spec.order(f64::INFINITY)?;
        Ok(spec)
    }

    pub fn constant(rho: f64, alpha: f64) -> Result<Self> {
        Self::new(vec![(0.0, rho)], alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self, r: f64) -> f64 {
        let t = &self.table;
        if r <= t[0].0 {
            return t[0].1;
        }
        for w in t.windows(2) {
            if r <= w[1].0 {
                return w[0].1 + (r - w[0].0) / (w[1].0 - w[0].0) * (w[1].1 - w[0].1);
            }
        }
        t[t.len() - 1].1
    }

    /// `[ρ(r) + α]`.
    pub fn order(&self, r: f64) -> Result<usize> {
        let k = (self.rho(r) + self.alpha).floor();
        if k > MAX_ORDER as f64 {
            return Err(Error::Capacity(format!("order {k} exceeds cap {MAX_ORDER}")));
        }
        Ok(k as usize)
    }

    /// Samples `(R, ρ(R))`; `ρ` is constant beyond the last one.
    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    pub fn rho_limit(&self) -> f64 {
        self.table[self.table.len() - 1].1
    }

    /// Radii where `[ρ(r) + α]` jumps.
    pub fn jump_radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for w in self.table.windows(2) {
            let (a, b) = (w[0].1 + self.alpha, w[1].1 + self.alpha);
            let mut j = a.floor() + 1.0;
            while j <= b {
                out.push(w[0].0 + (j - a) / (b - a) * (w[1].0 - w[0].0));
                j += 1.0;
            }
        }
        out
    }

    /// `(LV)_α` membership for data with decay hint `q`: the weight `1 + |t|^{ρ+α+1}` on the
    /// line, `1 + |y'|^{ρ+n+α-1}` on `R^{n-1}`, both integrable exactly when `q + ρ + α > 0`.
    pub fn admits(&self, decay_hint: f64) -> bool {
        decay_hint + self.rho_limit() + self.alpha > 0.0
    }
}

fn check_plane(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain(format!("{z} is not in the upper half-plane")));
    }
    Ok(())
}

fn line_breaks(z: Complex64, extra: &[f64]) -> Vec<f64> {
    let mut b = vec![z.re];
    for w in [1.0, 10.0, 100.0] {
        b.push(z.re - w * z.im);
        b.push(z.re + w * z.im);
    }
    b.extend_from_slice(extra);
    b
}

fn line_integral(kernel: impl Fn(f64) -> f64, f: &BoundaryFunction, z: Complex64, p: f64, extra: &[f64], spec: &QuadratureSpec) -> Result<IntegrationResult> {
    let mut breaks = line_breaks(z, extra);
    breaks.extend_from_slice(&f.breakpoints);
    let decay = Decay::new(p + f.decay_hint).with_breakpoints(breaks).with_scale(z.norm().max(1.0));
    integrate_line(|t| kernel(t) * f.eval_line(t), &decay, spec)
}

/// `∫_R P(z, t) f(t) dt`.
pub fn poisson_integral_plane(f: &BoundaryFunction, z: Complex64, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    check_plane(z)?;
    line_integral(|t| poisson_plane(z, t).unwrap_or(f64::NAN), f, z, 2.0, &[], spec)
}

/// `∫_R P_m(z, t) f(t) dt`.
pub fn poisson_integral_plane_mod(m: usize, f: &BoundaryFunction, z: Complex64, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    check_plane(z)?;
    if m > MAX_ORDER {
        return Err(Error::Capacity(format!("order {m} exceeds cap {MAX_ORDER}")));
    }
    line_integral(|t| poisson_plane_mod(m, z, t).unwrap_or(f64::NAN), f, z, m as f64 + 2.0, &[1.0], spec)
}

fn space_point(x: &[f64]) -> Result<usize> {
    let n = x.len();
    if !(3..=5).contains(&n) {
        return Err(domain(format!("dimension must be in [3, 5], got {n}")));
    }
    if !(x[n - 1] > 0.0) || x.iter().any(|v| !v.is_finite()) {
        return Err(domain("point is not in the upper half-space"));
    }
    Ok(n)
}

/// Polar integral about `x'` with radial breaks at the peak width and where circles about `x'`
/// meet the spheres `|y'| = r` for each `r` in `spheres`.
fn space_integral(
    kernel: &dyn Fn(&[f64]) -> f64,
    f: &BoundaryFunction,
    x: &[f64],
    p: f64,
    spheres: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    let n = x.len();
    let centre = &x[..n - 1];
    let rc = norm(centre);
    let h = x[n - 1];
    let mut breaks = vec![h, 10.0 * h, 100.0 * h];
    let jumps: Vec<f64> = spheres.iter().chain(&f.breakpoints).copied().collect();
    for &r in &jumps {
        breaks.push((r - rc).abs());
        breaks.push(r + rc);
    }
    let decay = Decay::new(p + f.decay_hint).with_breakpoints(breaks).with_scale((rc + h).max(1.0));
    integrate_boundary_polar_split(&|y: &[f64]| kernel(y) * f.eval(y), n, Some(centre), &jumps, &decay, spec)
}

/// `∫_{R^{n-1}} P(x, y') f(y') dy'` with `n = x.len()`.
pub fn poisson_integral_space(f: &BoundaryFunction, x: &[f64], spec: &QuadratureSpec) -> Result<IntegrationResult> {
    let n = space_point(x)?;
    space_integral(&|y| poisson_space(x, y).unwrap_or(f64::NAN), f, x, n as f64, &[], spec)
}

/// `∫_{R^{n-1}} P_m(x, y') f(y') dy'`.
pub fn poisson_integral_space_mod(m: usize, f: &BoundaryFunction, x: &[f64], spec: &QuadratureSpec) -> Result<IntegrationResult> {
    let n = space_point(x)?;
    if m > MAX_ORDER {
        return Err(Error::Capacity(format!("order {m} exceeds cap {MAX_ORDER}")));
    }
    space_integral(&|y| poisson_space_mod(m, x, y).unwrap_or(f64::NAN), f, x, (n + m) as f64, &[1.0], spec)
}

/// `Σ_j μ_j G_m(z, ζ_j)`; zero on the boundary.
pub fn green_potential_plane(measure: &DiscreteMeasure<Complex64>, m: usize, z: Complex64) -> Result<f64> {
    if !(z.im >= 0.0) {
        return Err(domain(format!("{z} is not in the closed upper half-plane")));
    }
    if let Some(a) = measure.atoms.iter().find(|a| (a.location - z).norm() < crate::plane_kernels::SINGULAR_EPS) {
        return Err(singular(format!("evaluation point coincides with the atom at {}", a.location)));
    }
    if z.im == 0.0 {
        return Ok(0.0);
    }
    measure.atoms.iter().map(|a| Ok(a.mass * green_plane_mod(m, z, a.location)?)).sum()
}

/// `Σ_j μ_j G_m(x, y_j)`; zero on the boundary.
pub fn green_potential_space(measure: &DiscreteMeasure<Vec<f64>>, m: usize, x: &[f64]) -> Result<f64> {
    let n = x.len();
    if !(3..=5).contains(&n) || !(x[n - 1] >= 0.0) {
        return Err(domain("point is not in the closed upper half-space"));
    }
    for a in &measure.atoms {
        if a.location.len() != n {
            return Err(domain("atom has the wrong dimension"));
        }
        let d: f64 = a.location.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        if d < crate::plane_kernels::SINGULAR_EPS {
            return Err(singular(format!("evaluation point coincides with the atom at {:?}", a.location)));
        }
    }
    if x[n - 1] == 0.0 {
        return Ok(0.0);
    }
    measure.atoms.iter().map(|a| Ok(a.mass * green_space_mod(m, x, &a.location)?)).sum()
}

fn admit(spec: &VariableOrderSpec, u: &BoundaryFunction) -> Result<()> {
    if !spec.admits(u.decay_hint) {
        return Err(Error::Precondition(format!(
            "boundary data '{}' with decay {} are not in the class for rho {} and alpha {}",
            u.label,
            u.decay_hint,
            spec.rho_limit(),
            spec.alpha
        )));
    }
    Ok(())
}

/// `∫_R P_{[ρ(|t|)+α]}(z, t) u(t) dt`.
pub fn variable_order_integral_plane(
    spec: &VariableOrderSpec,
    u: &BoundaryFunction,
    z: Complex64,
    qspec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    check_plane(z)?;
    admit(spec, u)?;
    let k_inf = spec.order(f64::INFINITY)?;
    let mut jumps = spec.jump_radii();
    jumps.push(1.0);
    let kernel = |t: f64| match spec.order(t.abs()) {
        Ok(k) => poisson_plane_mod(k, z, t).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    let scale = jumps.iter().copied().fold(z.norm().max(1.0), f64::max);
    let mut breaks = line_breaks(z, &jumps);
    breaks.extend_from_slice(&u.breakpoints);
    let decay = Decay::new(k_inf as f64 + 2.0 + u.decay_hint).with_breakpoints(breaks).with_scale(scale);
    integrate_line(|t| kernel(t) * u.eval_line(t), &decay, qspec)
}

/// `∫_{R^{n-1}} P_{[ρ(|y'|)+α]}(x, y') u(y') dy'`.
pub fn variable_order_integral_space(
    spec: &VariableOrderSpec,
    u: &BoundaryFunction,
    x: &[f64],
    qspec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    let n = space_point(x)?;
    admit(spec, u)?;
    let k_inf = spec.order(f64::INFINITY)?;
    let mut spheres = spec.jump_radii();
    spheres.push(1.0);
    let kernel = |y: &[f64]| match spec.order(norm(y)) {
        Ok(k) => poisson_space_mod(k, x, y).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    space_integral(&kernel, u, x, (n + k_inf) as f64, &spheres, qspec)
}

/// Central second-difference Laplacian with step `h` along each axis; the last coordinate is
/// the height above the boundary.
pub fn laplacian_fd(u: &dyn Fn(&[f64]) -> f64, point: &[f64], h: f64) -> Result<f64> {
    if point.is_empty() {
        return Err(domain("empty point"));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(domain(format!("step must be positive, got {h}")));
    }
    if point[point.len() - 1] - h <= 0.0 {
        return Err(domain("stencil leaves the half-space"));
    }
    let centre = u(point);
    let mut p = point.to_vec();
    let mut acc = 0.0;
    for i in 0..point.len() {
        p[i] = point[i] + h;
        let up = u(&p);
        p[i] = point[i] - h;
        let down = u(&p);
        p[i] = point[i];
        acc += up - 2.0 * centre + down;
    }
    Ok(acc / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::new(1e-12, 1e-12).unwrap()
    }

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn plane_poisson_of_one() {
        let one = BoundaryFunction::constant(1.0);
        for z in [c(0.0, 1.0), c(3.0, 0.2), c(-40.0, 7.0)] {
            let r = poisson_integral_plane(&one, z, &spec()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "{z}: {}", r.value);
        }
    }

    #[test]
    fn plane_poisson_odd_data() {
        let f = BoundaryFunction::line("odd", 1.0, |t| t / (1.0 + t * t));
        let r = poisson_integral_plane(&f, c(0.0, 2.0), &spec()).unwrap();
        assert!(r.value.abs() < 1e-12);
        // closed form: Im-part oracle ∫ P(z,t) t/(1+t²) dt = x/(x² + (y+1)²)
        let z = c(0.7, 0.4);
        let r = poisson_integral_plane(&f, z, &spec()).unwrap();
        assert_relative_eq!(r.value, z.re / (z.re * z.re + (z.im + 1.0).powi(2)), max_relative = 1e-9);
    }

    #[test]
    fn plane_boundary_limit_of_bump() {
        // the harmonic extension of 1/(1+t²) is (y+1)/(x² + (y+1)²)
        let f = BoundaryFunction::line("lorentz", 2.0, |t| 1.0 / (1.0 + t * t));
        for z in [c(0.0, 1e-3), c(0.5, 1e-3), c(-2.0, 0.3)] {
            let r = poisson_integral_plane(&f, z, &spec()).unwrap();
            let exact = (z.im + 1.0) / (z.re * z.re + (z.im + 1.0).powi(2));
            assert!((r.value - exact).abs() < 1e-10, "{z}: {} vs {exact}", r.value);
        }
        let g = BoundaryFunction::line("gauss", 10.0, |t| (-t * t).exp());
        let mut prev = f64::INFINITY;
        for y in [1e-2, 1e-3, 1e-4] {
            let gap = (poisson_integral_plane(&g, c(0.0, y), &spec()).unwrap().value - 1.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn plane_mod_matches_plain_for_compact_data() {
        let f = BoundaryFunction::line("cap", 10.0, |t| if t.abs() <= 1.0 { 1.0 - t * t } else { 0.0 }).with_breakpoints([1.0]);
        let z = c(0.4, 0.6);
        let a = poisson_integral_plane(&f, z, &spec()).unwrap().value;
        for m in 0..3 {
            let b = poisson_integral_plane_mod(m, &f, z, &spec()).unwrap().value;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn plane_mod_growing_data() {
        let f = BoundaryFunction::line("abs", -1.0, f64::abs);
        let z = c(0.0, 1.0);
        let v = poisson_integral_plane_mod(1, &f, z, &spec()).unwrap().value;
        assert!(v.is_finite());
        let plain = poisson_integral_plane(&f, z, &spec());
        assert!(matches!(plain, Err(Error::Precondition(_))));
        // agrees with a long truncated integral
        let truncated = crate::quadrature::integrate_interval_with_breaks(
            |t| poisson_plane_mod(1, z, t).unwrap() * t.abs(),
            -1e6,
            1e6,
            &[-1.0, 0.0, 1.0],
            &spec(),
        )
        .unwrap()
        .value;
        // tail beyond 1e6 is O(1e-6)
        assert!((v - truncated).abs() < 1e-5, "{v} vs {truncated}");
    }

    #[test]
    fn plane_mod_is_harmonic() {
        let f = BoundaryFunction::line("abs", -1.0, f64::abs);
        let v = |p: &[f64]| poisson_integral_plane_mod(1, &f, c(p[0], p[1]), &spec()).unwrap().value;
        let lap = laplacian_fd(&v, &[0.3, 0.8], 1e-3).unwrap();
        assert!(lap.abs() < 1e-5, "{lap}");
    }

    #[test]
    fn space_poisson_of_one() {
        let one = BoundaryFunction::constant(1.0);
        let s = QuadratureSpec::new(1e-10, 1e-10).unwrap();
        let r = poisson_integral_space(&one, &[0.0, 0.0, 1.0], &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
        let r = poisson_integral_space(&one, &[0.5, -0.2, 0.3], &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn space_poisson_odd_data() {
        let f = BoundaryFunction::new("odd", 3.0, |y: &[f64]| y[0] * (-norm(y)).exp());
        let s = QuadratureSpec::new(1e-10, 1e-10).unwrap();
        let r = poisson_integral_space(&f, &[0.0, 0.0, 1.0], &s).unwrap();
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn space_mod_growing_data() {
        let f = BoundaryFunction::new("abs", -1.0, norm);
        let s = QuadratureSpec::new(1e-9, 1e-9).unwrap();
        let v = poisson_integral_space_mod(1, &f, &[0.0, 0.0, 1.0], &s).unwrap().value;
        assert!((v - (2f64.ln() - 1.0)).abs() < 1e-8, "{v}");
        // compact data: both kernels agree
        let g = BoundaryFunction::new("bump", 10.0, |y: &[f64]| {
            let r2 = y.iter().map(|v| v * v).sum::<f64>();
            if r2 < 1.0 {
                (1.0 - 1.0 / (1.0 - r2)).exp()
            } else {
                0.0
            }
        })
        .with_breakpoints([1.0]);
        let x = [0.2, 0.1, 0.5];
        let a = poisson_integral_space(&g, &x, &s).unwrap().value;
        let b = poisson_integral_space_mod(2, &g, &x, &s).unwrap().value;
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn green_potentials() {
        let empty = DiscreteMeasure::<Complex64>::empty();
        assert_eq!(green_potential_plane(&empty, 0, c(1.0, 1.0)).unwrap(), 0.0);
        let mu = DiscreteMeasure::new([(c(0.0, 2.0), 3.0)]).unwrap();
        let v = green_potential_plane(&mu, 0, c(0.0, 1.0)).unwrap();
        assert_relative_eq!(v, -3.0 * 3f64.ln() / (2.0 * PI), epsilon = 1e-14);
        assert_eq!(green_potential_plane(&mu, 2, c(5.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(green_potential_plane(&mu, 0, c(0.0, 2.0)), Err(Error::Singularity(_))));
        assert!(DiscreteMeasure::new([(c(0.0, 1.0), -1.0)]).is_err());

        let nu = DiscreteMeasure::new([(vec![0.0, 0.0, 2.0], 1.0), (vec![3.0, 0.0, 1.0], 0.5)]).unwrap();
        let x = [0.1, 0.2, 0.7];
        let direct = green_space_mod(1, &x, &[0.0, 0.0, 2.0]).unwrap() + 0.5 * green_space_mod(1, &x, &[3.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(green_potential_space(&nu, 1, &x).unwrap(), direct, epsilon = 1e-15);
        assert_eq!(green_potential_space(&nu, 1, &[1.0, 1.0, 0.0]).unwrap(), 0.0);
        assert!(green_potential_space(&nu, 1, &x).unwrap() < 0.0);
    }

    #[test]
    fn variable_order_tables() {
        let s = VariableOrderSpec::new(vec![(0.0, 1.0), (10.0, 1.0), (20.0, 3.0)], 0.5).unwrap();
        assert_eq!(s.order(5.0).unwrap(), 1);
        assert_eq!(s.order(100.0).unwrap(), 3);
        let j = s.jump_radii();
        assert_eq!(j.len(), 2);
        assert_relative_eq!(j[0], 12.5, epsilon = 1e-12);
        assert_relative_eq!(j[1], 17.5, epsilon = 1e-12);
        assert!(VariableOrderSpec::new(vec![(0.0, 2.0), (1.0, 1.5)], 0.5).is_err());
        assert!(VariableOrderSpec::new(vec![(0.0, 0.5)], 0.5).is_err());
        assert!(VariableOrderSpec::constant(1.0, 0.0).is_err());
        assert!(matches!(VariableOrderSpec::constant(40.0, 0.5), Err(Error::Capacity(_))));
    }

    #[test]
    fn variable_order_constant_matches_fixed() {
        let s = VariableOrderSpec::constant(1.0, 0.5).unwrap();
        let u = BoundaryFunction::line("abs", -1.0, f64::abs);
        let z = c(0.0, 1.0);
        let a = variable_order_integral_plane(&s, &u, z, &spec()).unwrap().value;
        let b = poisson_integral_plane_mod(1, &u, z, &spec()).unwrap().value;
        assert!((a - b).abs() < 1e-10);
        let bad = BoundaryFunction::line("fast", -3.0, |t| t.abs().powi(3));
        assert!(matches!(variable_order_integral_plane(&s, &bad, z, &spec()), Err(Error::Precondition(_))));
    }

    #[test]
    fn variable_order_boundary_recovery() {
        let s = VariableOrderSpec::new(vec![(0.0, 1.0), (4.0, 2.0)], 0.5).unwrap();
        let u = BoundaryFunction::line("poly", -2.0, |t| t * t - 0.5 * t);
        for x in [-3.0, -0.5, 0.0, 0.8, 2.5] {
            let v = variable_order_integral_plane(&s, &u, c(x, 1e-4), &spec()).unwrap().value;
            assert!((v - u.eval_line(x)).abs() < 1e-2, "x={x}: {v}");
        }
    }

    #[test]
    fn fd_laplacian() {
        assert!(laplacian_fd(&|p: &[f64]| p[2], &[0.1, 0.2, 0.5], 1e-2).unwrap().abs() < 1e-12);
        assert!(laplacian_fd(&|p: &[f64]| p[0] * p[0] - p[1] * p[1], &[0.3, 0.5], 1e-3).unwrap().abs() < 1e-9);
        let sq = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
        for n in 2..=5 {
            let mut p = vec![0.4; n];
            p[n - 1] = 1.0;
            assert_relative_eq!(laplacian_fd(&sq, &p, 1e-3).unwrap(), 2.0 * n as f64, max_relative = 1e-6);
        }
        assert!(laplacian_fd(&sq, &[0.0, 0.001], 0.01).is_err());
    }
}
