//! Adaptive Gauss-Kronrod (7/15) quadrature on intervals, the real line, boundary hyperplanes in polar
//! coordinates and upper hemispheres.
//!
//! Unbounded domains are cut into dyadic shells `[T0 2^k, T0 2^{k+1}]`. After each shell the
//! constant `C` in `|g(t)| <= C t^{-p}` is re-estimated from samples and the remaining tail
//! `C T^{1-p}/(p-1)` is compared with a tenth of the tolerance.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Fixed cut-off for unbounded domains; `None` chooses it from the decay hint.
    pub truncation_radius: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 30, truncation_radius: None }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let s = Self { abs_tol, rel_tol, ..Self::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_truncation(mut self, radius: f64) -> Self {
        self.truncation_radius = Some(radius);
        self
    }

    pub fn with_max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    /// Accuracy an integral computed under this spec is trusted to, given its estimate.
    fn trusted(&self, value: f64, estimate: f64) -> f64 {
        estimate.max(self.abs_tol.max(self.rel_tol * value.abs()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(domain("quadrature tolerances must be positive"));
        }
        if self.max_depth > 40 {
            return Err(domain(format!("max_depth {} exceeds 40", self.max_depth)));
        }
        if let Some(t) = self.truncation_radius {
            if !(t > 0.0) {
                return Err(domain("truncation radius must be positive"));
            }
        }
        Ok(())
    }

    fn inner(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 10.0,
            rel_tol: self.rel_tol / 10.0,
            max_depth: self.max_depth,
            truncation_radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub truncated_tail_bound: f64,
}

/// Asymptotic description of an integrand on an unbounded domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Decay {
    /// `p` in `|f(t)| = O(|t|^{-p})`.
    pub exponent: f64,
    /// Points where the integrand is non-smooth or sharply peaked.
    pub breakpoints: Vec<f64>,
    /// Radius beyond which the power law is expected to hold.
    pub scale: f64,
}

impl Decay {
    pub fn new(exponent: f64) -> Self {
        Self { exponent, breakpoints: Vec::new(), scale: 1.0 }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Engine<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    evals: u64,
    err: f64,
    failed: bool,
    max_depth: u32,
    // absolute error of the most recent evaluation, set by integrands that are themselves integrals
    noise: Option<&'a Cell<f64>>,
}

struct Panel {
    kronrod: f64,
    gauss: f64,
    abs: f64,
    noise: f64,
}

impl<'a, F: Fn(f64) -> f64> Engine<'a, F> {
    fn new(f: &'a F, max_depth: u32) -> Self {
        Self { f, evals: 0, err: 0.0, failed: false, max_depth, noise: None }
    }

    fn with_noise(mut self, noise: &'a Cell<f64>) -> Self {
        self.noise = Some(noise);
        self
    }

    /// Value and its own error at `x`.
    fn eval(&mut self, x: f64, centre: f64) -> (f64, f64) {
        self.evals += 1;
        let mut v = (self.f)(x);
        if !v.is_finite() {
            // node landed on an integrable singularity: step towards the panel centre
            self.evals += 1;
            v = (self.f)(x + (centre - x) * 1e-9);
        }
        (v, self.noise.map_or(0.0, Cell::get))
    }

    fn rule(&mut self, a: f64, b: f64) -> Panel {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let (fc, nc) = self.eval(c, c);
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut abs = WGK[7] * fc.abs();
        let mut noise = WGK[7] * nc;
        for i in 0..7 {
            let dx = h * XGK[i];
            let (f1, n1) = self.eval(c - dx, c);
            let (f2, n2) = self.eval(c + dx, c);
            kronrod += WGK[i] * (f1 + f2);
            abs += WGK[i] * (f1.abs() + f2.abs());
            noise += WGK[i] * (n1 + n2);
            if i % 2 == 1 {
                gauss += WG[i / 2] * (f1 + f2);
            }
        }
        Panel { kronrod: kronrod * h, gauss: gauss * h, abs: abs * h.abs(), noise: noise * h.abs() }
    }

    fn adapt(&mut self, a: f64, b: f64, p: Panel, tol: f64, depth: u32) -> f64 {
        let diff = (p.kronrod - p.gauss).abs();
        let rounding = 50.0 * f64::EPSILON * p.abs;
        let c = 0.5 * (a + b);
        let unsplittable = !(c > a && c < b);
        // below the error of the integrand values bisection cannot make progress
        let floor = rounding.max(2.0 * p.noise);
        if diff <= tol || diff <= floor || unsplittable || !diff.is_finite() {
            self.err += diff + rounding;
            return p.kronrod;
        }
        if depth >= self.max_depth {
            self.failed = true;
            self.err += diff;
            return p.kronrod;
        }
        let left = self.rule(a, c);
        let right = self.rule(c, b);
        self.adapt(a, c, left, tol / 2.0, depth + 1) + self.adapt(c, b, right, tol / 2.0, depth + 1)
    }

    /// Integrates over consecutive panels given by sorted `edges`; `tol(coarse)` gives the
    /// absolute budget from the first-pass estimate.
    fn panels(&mut self, edges: &[f64], mut tol: impl FnMut(f64) -> f64) -> f64 {
        let mut first = Vec::with_capacity(edges.len());
        let mut coarse = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let p = self.rule(a, b);
            coarse += p.kronrod;
            first.push((a, b, p));
        }
        let total_len: f64 = first.iter().map(|(a, b, _)| b - a).sum();
        let budget = tol(coarse);
        let mut sum = 0.0;
        for (a, b, p) in first {
            let share = budget * (b - a) / total_len;
            sum += self.adapt(a, b, p, share, 0);
        }
        sum
    }
}

fn sorted_edges(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges = vec![a, b];
    edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    edges
}

fn finish(value: f64, err: f64, evals: u64, tail: f64, failed: bool) -> Result<IntegrationResult> {
    if failed || !value.is_finite() {
        return Err(Error::ToleranceNotMet { value, estimate: err + tail });
    }
    Ok(IntegrationResult { value, error_estimate: err + tail, evaluations: evals, truncated_tail_bound: tail })
}

/// `∫_a^b f` by adaptive Gauss-Kronrod bisection.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    integrate_interval_with_breaks(f, a, b, &[], spec)
}

/// `∫_a^b f` with the interval split at `breaks` (kinks, peaks or integrable singularities).
pub fn integrate_interval_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    interval_impl(&f, a, b, breaks, spec, None)
}

fn interval_impl<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
    noise: Option<&Cell<f64>>,
) -> Result<IntegrationResult> {
    spec.validate()?;
    if !(a < b) {
        return Err(domain(format!("interval needs a < b, got [{a}, {b}]")));
    }
    let coarse = sorted_edges(a, b, breaks);
    let mut edges = Vec::with_capacity(4 * coarse.len());
    for w in coarse.windows(2) {
        let h = (w[1] - w[0]) / 4.0;
        edges.extend((0..4).map(|i| w[0] + h * i as f64));
    }
    edges.push(b);
    let mut eng = Engine::new(f, spec.max_depth);
    eng.noise = noise;
    let value = eng.panels(&edges, |c| spec.abs_tol.max(spec.rel_tol * c.abs()));
    finish(value, eng.err, eng.evals, 0.0, eng.failed)
}

/// `∫_0^∞ g` for `|g(t)| = O(t^{-p})`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(g: F, decay: &Decay, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    half_line_impl(&g, decay, spec, None)
}

fn half_line_impl<F: Fn(f64) -> f64>(
    g: &F,
    decay: &Decay,
    spec: &QuadratureSpec,
    noise: Option<&Cell<f64>>,
) -> Result<IntegrationResult> {
    spec.validate()?;
    let p = decay.exponent;
    let breaks: Vec<f64> = decay.breakpoints.iter().map(|b| b.abs()).filter(|&b| b > 0.0).collect();
    let reach = breaks.iter().copied().fold(decay.scale.max(1.0), f64::max);
    let t0 = 2f64.powi(reach.log2().ceil() as i32);
    let mut eng = Engine::new(g, spec.max_depth);
    eng.noise = noise;

    if let Some(t_max) = spec.truncation_radius {
        let mut cuts = breaks.clone();
        let mut d = 1.0f64.min(t_max / 2.0);
        while d < t_max {
            cuts.push(d);
            d *= 2.0;
        }
        let edges = sorted_edges(0.0, t_max, &cuts);
        let value = eng.panels(&edges, |c| spec.abs_tol.max(spec.rel_tol * c.abs()));
        let tail = if p > 1.0 {
            let c = shell_constant(g, t_max / 2.0, t_max, p, &mut eng.evals);
            c * t_max.powf(1.0 - p) / (p - 1.0)
        } else {
            f64::INFINITY
        };
        return finish(value, eng.err, eng.evals, tail, eng.failed);
    }

    if !(p > 1.0) {
        return Err(Error::Precondition(format!("decay exponent {p} does not give an integrable tail")));
    }
    let core_edges = sorted_edges(0.0, t0, &breaks);
    let mut budget = spec.abs_tol;
    let mut value = eng.panels(&core_edges, |c| {
        budget = spec.abs_tol.max(spec.rel_tol * c.abs());
        budget / 2.0
    });
    let mut lo = t0;
    let mut prev_c = f64::INFINITY;
    let mut k = 0u32;
    loop {
        let hi = lo * 2.0;
        let shell_tol = budget / (4.0 * f64::from(k + 1).powi(2));
        value += eng.panels(&[lo, hi], |_| shell_tol);
        let c = shell_constant(g, lo, hi, p, &mut eng.evals);
        let tail = c * hi.powf(1.0 - p) / (p - 1.0);
        let settled = hi >= 16.0 * decay.scale && c <= 1.1 * prev_c;
        if settled && k >= 1 && tail <= budget / 10.0 {
            return finish(value, eng.err, eng.evals, tail, eng.failed);
        }
        if hi > 1e250 || !value.is_finite() {
            return Err(Error::ToleranceNotMet { value, estimate: eng.err + tail });
        }
        prev_c = c;
        lo = hi;
        k += 1;
    }
}

fn shell_constant<F: Fn(f64) -> f64>(g: &F, lo: f64, hi: f64, p: f64, evals: &mut u64) -> f64 {
    let mut c: f64 = 0.0;
    for i in 0..=8 {
        let t = lo * (hi / lo).powf(i as f64 / 8.0);
        *evals += 1;
        c = c.max(g(t).abs() * t.powf(p));
    }
    c
}

/// `∫_R f` for `|f(t)| = O(|t|^{-p})`, folded onto the half-line as `f(t) + f(-t)`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, decay: &Decay, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    integrate_half_line(|t| f(t) + f(-t), decay, spec)
}

/// Iterated adaptive quadrature over a box; the first coordinate is outermost.
pub fn integrate_box(f: &dyn Fn(&[f64]) -> f64, bounds: &[(f64, f64)], spec: &QuadratureSpec) -> Result<IntegrationResult> {
    spec.validate()?;
    if bounds.is_empty() {
        return Err(domain("box integration needs at least one coordinate"));
    }
    box_impl(f, bounds, &[], spec)
}

fn box_impl(f: &dyn Fn(&[f64]) -> f64, bounds: &[(f64, f64)], first_breaks: &[f64], spec: &QuadratureSpec) -> Result<IntegrationResult> {
    let evals = Cell::new(0u64);
    let mut point = vec![0.0; bounds.len()];
    let r = nested(f, bounds, first_breaks, 0, &mut point, spec, &evals);
    finish(r.value, r.error_estimate, evals.get(), 0.0, r.failed)
}

struct Nested {
    value: f64,
    error_estimate: f64,
    failed: bool,
}

fn nested(
    f: &dyn Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    first_breaks: &[f64],
    level: usize,
    point: &mut [f64],
    spec: &QuadratureSpec,
    evals: &Cell<u64>,
) -> Nested {
    let (a, b) = bounds[level];
    let last = level + 1 == bounds.len();
    let base = point.to_vec();
    let worst_child = Cell::new(0.0f64);
    let child_failed = Cell::new(false);
    let noise = Cell::new(0.0f64);
    let g = |x: f64| -> f64 {
        let mut p = base.clone();
        p[level] = x;
        if last {
            evals.set(evals.get() + 1);
            f(&p)
        } else {
            let r = nested(f, bounds, &[], level + 1, &mut p, spec, evals);
            if r.failed {
                child_failed.set(true);
            }
            worst_child.set(worst_child.get().max(r.error_estimate));
            noise.set(spec.trusted(r.value, r.error_estimate));
            r.value
        }
    };
    let mut eng = Engine::new(&g, spec.max_depth).with_noise(&noise);
    let value = eng.panels(&sorted_edges(a, b, first_breaks), |c| spec.abs_tol.max(spec.rel_tol * c.abs()));
    Nested {
        value,
        error_estimate: eng.err + worst_child.get() * (b - a),
        failed: eng.failed || child_failed.get(),
    }
}

/// Unit vector on `S^{d}` (`d = dim - 1`) from the angles of the standard chart.
fn sphere_direction(dim: usize, angles: &[f64], out: &mut [f64]) {
    // dim = number of coordinates; angles.len() = dim - 1
    let mut s = 1.0;
    for i in 0..dim - 1 {
        out[i] = s * angles[i].cos();
        s *= angles[i].sin();
    }
    out[dim - 1] = s;
}

fn sphere_weight(angles: &[f64]) -> f64 {
    let k = angles.len();
    angles.iter().enumerate().map(|(i, a)| a.sin().powi((k - 1 - i) as i32)).product()
}

/// Angular bounds and chart for `S^{dim-1}`: the last angle spans a full turn.
fn sphere_bounds(dim: usize) -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, PI); dim - 1];
    if let Some(last) = b.last_mut() {
        *last = (0.0, 2.0 * PI);
    }
    b
}

fn check_dim(n: usize) -> Result<()> {
    if !(3..=5).contains(&n) {
        return Err(domain(format!("dimension must be in [3, 5], got {n}")));
    }
    Ok(())
}

/// `∫_{S^{dim-1}} h(ω) dω` for a function of unit vectors in `R^dim`.
pub fn integrate_sphere(h: &dyn Fn(&[f64]) -> f64, dim: usize, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    if dim < 2 {
        return Err(domain("sphere integration needs dimension >= 2"));
    }
    let bounds = sphere_bounds(dim);
    let integrand = |ang: &[f64]| {
        let mut w = vec![0.0; dim];
        sphere_direction(dim, ang, &mut w);
        h(&w) * sphere_weight(ang)
    };
    integrate_box(&integrand, &bounds, spec)
}

/// `∫_{S^{dim-1}} h(ω) dω` for `h` that jumps where `ω·axis` crosses one of `cosines`.
///
/// The chart is reflected so that its first angle is measured from `axis`; each jump then lies
/// on a fixed value of that angle and becomes a panel edge.
pub fn integrate_sphere_banded(
    h: &dyn Fn(&[f64]) -> f64,
    dim: usize,
    axis: &[f64],
    cosines: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    if dim < 2 || axis.len() != dim {
        return Err(domain("banded sphere integration needs an axis of the sphere's dimension"));
    }
    let len = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(len > 0.0) || !len.is_finite() {
        return integrate_sphere(h, dim, spec);
    }
    // Householder reflection taking e_1 to the unit axis
    let mut v: Vec<f64> = axis.iter().map(|a| -a / len).collect();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let reflect = vv > 1e-30;
    let angles: Vec<f64> = cosines.iter().filter(|t| t.abs() < 1.0).map(|t| t.acos()).collect();
    let breaks: Vec<f64> = if dim == 2 { angles.iter().flat_map(|&a| [a, 2.0 * PI - a]).collect() } else { angles };
    let bounds = sphere_bounds(dim);
    let integrand = |ang: &[f64]| {
        let mut w = vec![0.0; dim];
        sphere_direction(dim, ang, &mut w);
        if reflect {
            let k = 2.0 * w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv;
            w.iter_mut().zip(&v).for_each(|(a, b)| *a -= k * b);
        }
        h(&w) * sphere_weight(ang)
    };
    box_impl(&integrand, &bounds, &breaks, spec)
}

/// `∫_{r0<|y'-c|<r1} f(y') dy'` over `R^{n-1}` in polar coordinates about `c`.
pub fn integrate_boundary_annulus(
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    center: Option<&[f64]>,
    r0: f64,
    r1: f64,
    radial_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    check_dim(n)?;
    let d = n - 1;
    let c = center.map(|c| c.to_vec()).unwrap_or_else(|| vec![0.0; d]);
    if c.len() != d {
        return Err(domain("polar centre has the wrong dimension"));
    }
    let evals = Cell::new(0u64);
    let worst = Cell::new(0.0f64);
    let failed = Cell::new(false);
    let noise = Cell::new(0.0f64);
    let inner = spec.inner();
    let radial = |r: f64| -> f64 {
        if r == 0.0 && n > 3 {
            return 0.0;
        }
        let h = |w: &[f64]| {
            let y: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + r * wi).collect();
            f(&y)
        };
        match integrate_sphere(&h, d, &inner) {
            Ok(res) => {
                evals.set(evals.get() + res.evaluations);
                worst.set(worst.get().max((res.error_estimate / res.value.abs().max(inner.abs_tol)).min(1.0)));
                noise.set(inner.trusted(res.value, res.error_estimate) * r.powi((d - 1) as i32));
                res.value * r.powi((d - 1) as i32)
            }
            Err(Error::ToleranceNotMet { value, estimate }) => {
                failed.set(true);
                noise.set(inner.trusted(value, estimate) * r.powi((d - 1) as i32));
                value * r.powi((d - 1) as i32)
            }
            Err(_) => f64::NAN,
        }
    };
    let out = interval_impl(&radial, r0, r1, radial_breaks, spec, Some(&noise));
    nested_finish(out, &evals, &worst, &failed)
}

/// `∫_{R^{n-1}} f` in polar coordinates about `c`; `decay.exponent` refers to `f` itself.
pub fn integrate_boundary_polar(
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    center: Option<&[f64]>,
    decay: &Decay,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    integrate_boundary_polar_split(f, n, center, &[], decay, spec)
}

/// As [`integrate_boundary_polar`] for `f` that jumps across the spheres `|y'| = ρ`, `ρ` in
/// `spheres`. Radial breaks at `|ρ - |c||` and `ρ + |c|` are the caller's to supply in `decay`.
pub fn integrate_boundary_polar_split(
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    center: Option<&[f64]>,
    spheres: &[f64],
    decay: &Decay,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    check_dim(n)?;
    let d = n - 1;
    let c = center.map(|c| c.to_vec()).unwrap_or_else(|| vec![0.0; d]);
    if c.len() != d {
        return Err(domain("polar centre has the wrong dimension"));
    }
    let rc = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let evals = Cell::new(0u64);
    let worst = Cell::new(0.0f64);
    let failed = Cell::new(false);
    let noise = Cell::new(0.0f64);
    let inner = spec.inner();
    let radial = |r: f64| -> f64 {
        if r == 0.0 && n > 3 {
            return 0.0;
        }
        let h = |w: &[f64]| {
            let y: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + r * wi).collect();
            f(&y)
        };
        // |c + r w| = ρ  <=>  w·c/|c| = (ρ² - |c|² - r²)/(2 r |c|)
        let cosines: Vec<f64> = spheres.iter().map(|rho| (rho * rho - rc * rc - r * r) / (2.0 * r * rc)).collect();
        let res = if rc > 0.0 && r > 0.0 && !cosines.is_empty() {
            integrate_sphere_banded(&h, d, &c, &cosines, &inner)
        } else {
            integrate_sphere(&h, d, &inner)
        };
        match res {
            Ok(res) => {
                evals.set(evals.get() + res.evaluations);
                worst.set(worst.get().max((res.error_estimate / res.value.abs().max(inner.abs_tol)).min(1.0)));
                noise.set(inner.trusted(res.value, res.error_estimate) * r.powi((d - 1) as i32));
                res.value * r.powi((d - 1) as i32)
            }
            Err(Error::ToleranceNotMet { value, estimate }) => {
                failed.set(true);
                noise.set(inner.trusted(value, estimate) * r.powi((d - 1) as i32));
                value * r.powi((d - 1) as i32)
            }
            Err(_) => f64::NAN,
        }
    };
    let radial_decay = Decay {
        exponent: decay.exponent - (d as f64 - 1.0),
        breakpoints: decay.breakpoints.clone(),
        scale: decay.scale,
    };
    let out = half_line_impl(&radial, &radial_decay, spec, Some(&noise));
    nested_finish(out, &evals, &worst, &failed)
}

fn nested_finish(
    out: Result<IntegrationResult>,
    evals: &Cell<u64>,
    worst: &Cell<f64>,
    failed: &Cell<bool>,
) -> Result<IntegrationResult> {
    let mut res = out?;
    res.evaluations += evals.get();
    res.error_estimate += worst.get() * res.value.abs();
    if failed.get() {
        return Err(Error::ToleranceNotMet { value: res.value, estimate: res.error_estimate });
    }
    Ok(res)
}

/// Point of the sphere `|x| = R` in `R^n` with polar angles `θ_1, ..., θ_{n-1} ∈ (0, π)`;
/// `x_n = R sinθ_1 ... sinθ_{n-1} > 0`.
pub fn hemisphere_point(n: usize, radius: f64, angles: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    sphere_direction(n, angles, &mut x);
    x.iter_mut().for_each(|v| *v *= radius);
    x
}

/// `∫_{|x|=R, x_n>0} f dσ`.
pub fn integrate_hemisphere(f: &dyn Fn(&[f64]) -> f64, n: usize, radius: f64, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    check_dim(n)?;
    if !(radius > 0.0) {
        return Err(domain("hemisphere radius must be positive"));
    }
    let bounds = vec![(0.0, PI); n - 1];
    let scale = radius.powi((n - 1) as i32);
    let integrand = |ang: &[f64]| {
        let x = hemisphere_point(n, radius, ang);
        f(&x) * sphere_weight(ang) * scale
    };
    integrate_box(&integrand, &bounds, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn interval_basics() {
        let r = integrate_interval(f64::sin, 0.0, PI, &spec()).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-10);
        let r = integrate_interval(|t: f64| t.sin().powi(3), 0.0, PI / 2.0, &spec()).unwrap();
        assert_relative_eq!(r.value, 2.0 / 3.0, epsilon = 1e-10);
        let r = integrate_interval(|x: f64| (1.0 + x * x).sqrt(), 0.0, 1.0, &spec()).unwrap();
        assert_relative_eq!(r.value, (2f64.sqrt() + 1f64.asinh()) / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn line_integrals() {
        let r = integrate_line(|t| 1.0 / (1.0 + t * t), &Decay::new(2.0), &spec()).unwrap();
        assert!((r.value - PI).abs() < 1e-8, "{r:?}");
        assert!(r.truncated_tail_bound < 1e-10);
        let r = integrate_line(|t| t / (1.0 + t.powi(4)), &Decay::new(3.0), &spec()).unwrap();
        assert!(r.value.abs() < 1e-10);
        let p = |t: f64| 1.0 / (PI * (t * t + 1.0));
        let r = integrate_line(p, &Decay::new(2.0), &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_integrable_hint_rejected() {
        assert!(matches!(
            integrate_line(|_| 1.0, &Decay::new(0.5), &spec()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fixed_truncation_reports_tail() {
        let s = spec().with_truncation(100.0);
        let r = integrate_line(|t| 1.0 / (1.0 + t * t), &Decay::new(2.0), &s).unwrap();
        assert!((r.value - 2.0 * 100f64.atan()).abs() < 1e-9);
        assert!(r.truncated_tail_bound > 0.015 && r.truncated_tail_bound < 0.03);
    }

    #[test]
    fn boundary_polar_closed_form() {
        let s = QuadratureSpec::new(1e-9, 1e-9).unwrap();
        let f = |y: &[f64]| (1.0 + y[0] * y[0] + y[1] * y[1]).powf(-1.5);
        let r = integrate_boundary_polar(&f, 3, None, &Decay::new(3.0), &s).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-6, "{r:?}");
        let odd = |y: &[f64]| y[0] * (1.0 + y[0] * y[0] + y[1] * y[1]).powf(-2.5);
        let r = integrate_boundary_polar(&odd, 3, None, &Decay::new(4.0), &s).unwrap();
        assert!(r.value.abs() < 1e-8);
    }

    #[test]
    fn sphere_areas() {
        let one = |_: &[f64]| 1.0;
        let r = integrate_sphere(&one, 3, &spec()).unwrap();
        assert_relative_eq!(r.value, 4.0 * PI, epsilon = 1e-8);
        let r = integrate_sphere(&one, 4, &spec()).unwrap();
        assert_relative_eq!(r.value, 2.0 * PI * PI, epsilon = 1e-8);
    }

    #[test]
    fn banded_caps_are_exact() {
        let t = 0.3f64;
        let caps = [
            (2, 2.0 * t.acos()),
            (3, 2.0 * PI * (1.0 - t)),
            (4, 2.0 * PI * (PI / 2.0 - t * (1.0 - t * t).sqrt() - t.asin())),
        ];
        for (dim, exact) in caps {
            let axis: Vec<f64> = (0..dim).map(|i| 0.4 - 0.3 * i as f64).collect();
            let len = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            let cap = |w: &[f64]| if w.iter().zip(&axis).map(|(a, b)| a * b).sum::<f64>() > t * len { 1.0 } else { 0.0 };
            let r = integrate_sphere_banded(&cap, dim, &axis, &[t], &spec()).unwrap();
            assert_relative_eq!(r.value, exact, epsilon = 1e-9);
            assert!(r.evaluations < 20_000, "dim={dim} evals={}", r.evaluations);
        }
    }

    #[test]
    fn hemisphere_moments() {
        let s = spec();
        let one = |_: &[f64]| 1.0;
        assert_relative_eq!(integrate_hemisphere(&one, 3, 1.0, &s).unwrap().value, 2.0 * PI, epsilon = 1e-8);
        let xn = |x: &[f64]| x[2];
        assert_relative_eq!(integrate_hemisphere(&xn, 3, 1.0, &s).unwrap().value, PI, epsilon = 1e-8);
        let xn2 = |x: &[f64]| x[2] * x[2];
        assert_relative_eq!(integrate_hemisphere(&xn2, 3, 1.0, &s).unwrap().value, 2.0 * PI / 3.0, epsilon = 1e-8);
        let x4 = |x: &[f64]| x[3];
        // half of the S^3 first moment: ∫_{x_4>0} x_4 dσ = π^2/2·... = 4π/3
        assert_relative_eq!(integrate_hemisphere(&x4, 4, 1.0, &s).unwrap().value, 4.0 * PI / 3.0, epsilon = 1e-7);
    }

    #[test]
    fn hemisphere_points_are_upper() {
        let x = hemisphere_point(4, 2.0, &[0.3, 1.1, 2.9]);
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(r, 2.0, epsilon = 1e-14);
        assert!(x[3] > 0.0);
    }

    #[test]
    fn bad_specs() {
        assert!(QuadratureSpec::new(0.0, 1e-3).is_err());
        assert!(spec().with_max_depth(41).validate().is_err());
        assert!(integrate_interval(|x| x, 1.0, 0.0, &spec()).is_err());
    }

    #[test]
    fn depth_exhaustion_reports_best_value() {
        let s = spec().with_max_depth(2);
        let r = integrate_interval(|x: f64| (50.0 * x).sin().abs(), 0.0, 3.0, &s);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }
}
