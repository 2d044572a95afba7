//! Integral identities checked by quadrature: Carleman and Nevanlinna formulas, radial limits
//! of Poisson-type representations, the ball map used for harmonic majorants and the slice
//! integrals of the majorant criterion.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::DiscreteMeasure;
use crate::error::{domain, singular, Error, Result};
use crate::plane_kernels::cauchy_mod;
use crate::quadrature::{
    hemisphere_point, integrate_boundary_annulus, integrate_boundary_polar, integrate_box, integrate_hemisphere,
    integrate_interval_with_breaks, Decay, QuadratureSpec,
};
use crate::report::VerificationReport;
use crate::space_kernels::{dot, lift, norm, poisson_space};
use crate::special::{sphere_area, wallis};

/// Relative step of the radial finite difference used when no derivative is supplied.
const FD_STEP: f64 = 1e-4;

/// Both sides of a Carleman formula on the half-annulus `r < |x| < R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlemanReport {
    pub lhs_sphere_term: f64,
    pub lhs_boundary_term: f64,
    pub c1: f64,
    pub c2: f64,
    /// `c1 + c2/R^n`.
    pub rhs: f64,
    /// `lhs - rhs`: zero for harmonic `u`, nonnegative for subharmonic `u`.
    pub slack: f64,
    pub residual: f64,
    pub error_estimate: f64,
}

impl CarlemanReport {
    fn new(sphere: f64, boundary: f64, c1: f64, c2: f64, rn: f64, err: f64) -> Self {
        let rhs = c1 + c2 / rn;
        let slack = sphere + boundary - rhs;
        Self {
            lhs_sphere_term: sphere,
            lhs_boundary_term: boundary,
            c1,
            c2,
            rhs,
            slack,
            residual: slack.abs(),
            error_estimate: err,
        }
    }

    pub fn lhs(&self) -> f64 {
        self.lhs_sphere_term + self.lhs_boundary_term
    }

    /// Equality within `tol`, for harmonic `u`.
    pub fn equality(&self, check: impl Into<String>, tol: f64) -> VerificationReport {
        VerificationReport::compare(check, self.lhs(), self.rhs, tol, "carleman")
    }

    /// `rhs <= lhs + tol`, for subharmonic `u`.
    pub fn inequality(&self, check: impl Into<String>, tol: f64) -> VerificationReport {
        VerificationReport::at_most(check, self.rhs, self.lhs(), tol, "carleman")
    }
}

fn check_radii(r: f64, big_r: f64) -> Result<()> {
    if !(r > 0.0) || !big_r.is_finite() || !(big_r > r) {
        return Err(Error::Usage(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    Ok(())
}

/// Carleman formula in the upper half-plane on `1 < |z| < R`. The normal derivative on
/// `|z| = 1` points into the annulus; without `du_dr` it is a central difference.
pub fn carleman_halfplane(
    u: &dyn Fn(Complex64) -> f64,
    du_dr: Option<&dyn Fn(Complex64) -> f64>,
    big_r: f64,
    spec: &QuadratureSpec,
) -> Result<CarlemanReport> {
    check_radii(1.0, big_r)?;
    let radial = |z: Complex64| match du_dr {
        Some(d) => d(z),
        None => {
            let h = FD_STEP * z.norm();
            let w = z / z.norm();
            (u(z + w * h) - u(z - w * h)) / (2.0 * h)
        }
    };
    let sphere = integrate_interval_with_breaks(|t| u(Complex64::from_polar(big_r, t)) * t.sin(), 0.0, PI, &[], spec)?;
    let boundary = integrate_interval_with_breaks(
        |x| (u(Complex64::new(x, 0.0)) + u(Complex64::new(-x, 0.0))) * (1.0 / (x * x) - 1.0 / (big_r * big_r)),
        1.0,
        big_r,
        &[],
        spec,
    )?;
    let side = |sign: f64| {
        integrate_interval_with_breaks(
            |t| {
                let z = Complex64::from_polar(1.0, t);
                (u(z) + sign * radial(z)) * t.sin()
            },
            0.0,
            PI,
            &[],
            spec,
        )
    };
    let (a, b) = (side(1.0)?, side(-1.0)?);
    let err = sphere.error_estimate / (PI * big_r)
        + (boundary.error_estimate + a.error_estimate + b.error_estimate) / (2.0 * PI);
    Ok(CarlemanReport::new(
        sphere.value / (PI * big_r),
        boundary.value / (2.0 * PI),
        a.value / (2.0 * PI),
        b.value / (2.0 * PI),
        big_r * big_r,
        err,
    ))
}

/// Carleman formula in the upper half-space on `r < |x| < R`, with
/// `c1 = ∫_{|x|=r} [(n-1)x_n u/r^{n+1} + x_n ∂u/∂n / r^n]` and
/// `c2 = ∫_{|x|=r} [x_n u/r - x_n ∂u/∂n]`, the normal pointing into the annulus.
pub fn carleman_halfspace(
    n: usize,
    u: &dyn Fn(&[f64]) -> f64,
    du_dn: Option<&dyn Fn(&[f64]) -> f64>,
    r: f64,
    big_r: f64,
    spec: &QuadratureSpec,
) -> Result<CarlemanReport> {
    check_radii(r, big_r)?;
    let nf = n as f64;
    let radial = |x: &[f64]| match du_dn {
        Some(d) => d(x),
        None => {
            let len = norm(x);
            let h = FD_STEP * len;
            let up: Vec<f64> = x.iter().map(|v| v * (1.0 + h / len)).collect();
            let down: Vec<f64> = x.iter().map(|v| v * (1.0 - h / len)).collect();
            (u(&up) - u(&down)) / (2.0 * h)
        }
    };
    let sphere = integrate_hemisphere(&|x| u(x) * nf * x[n - 1] / big_r.powi(n as i32 + 1), n, big_r, spec)?;
    let boundary = integrate_boundary_annulus(
        &|y| u(&lift(y)) * (norm(y).powi(-(n as i32)) - big_r.powi(-(n as i32))),
        n,
        None,
        r,
        big_r,
        &[],
        spec,
    )?;
    let c1 = integrate_hemisphere(
        &|x| (nf - 1.0) * x[n - 1] * u(x) / r.powi(n as i32 + 1) + x[n - 1] * radial(x) / r.powi(n as i32),
        n,
        r,
        spec,
    )?;
    let c2 = integrate_hemisphere(&|x| x[n - 1] * u(x) / r - x[n - 1] * radial(x), n, r, spec)?;
    let rn = big_r.powi(n as i32);
    let err = sphere.error_estimate + boundary.error_estimate + c1.error_estimate + c2.error_estimate / rn;
    Ok(CarlemanReport::new(sphere.value, boundary.value, c1.value, c2.value, rn, err))
}

/// `u(x)` rebuilt from its values on the hemisphere `|y| = R` and on the flat disk `|y'| < R`.
/// `flat` takes boundary points `y' ∈ R^{n-1}`.
pub fn nevanlinna_halfball(
    sphere_data: &dyn Fn(&[f64]) -> f64,
    flat_data: &dyn Fn(&[f64]) -> f64,
    big_r: f64,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = x.len();
    if !(3..=5).contains(&n) {
        return Err(domain(format!("dimension must be in [3, 5], got {n}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(domain("non-finite coordinate"));
    }
    let len = norm(x);
    if len == 0.0 {
        return Err(domain("the reflected point R²x/|x|² is undefined at x = 0"));
    }
    if !(x[n - 1] > 0.0) {
        return Err(domain(format!("x_n = {} is not positive", x[n - 1])));
    }
    if !(len < big_r) {
        return Err(domain(format!("|x| = {len} is not inside the ball of radius {big_r}")));
    }
    let omega = sphere_area(n);
    let ni = n as i32;
    let mirror: Vec<f64> = x.iter().enumerate().map(|(i, v)| if i + 1 == n { -v } else { *v }).collect();
    let far: Vec<f64> = x.iter().map(|v| v * big_r * big_r / (len * len)).collect();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let sphere = integrate_hemisphere(
        &|y| {
            let k = dist(y, x).powi(-ni) - dist(y, &mirror).powi(-ni);
            (big_r * big_r - len * len) / (omega * big_r) * k * sphere_data(y)
        },
        n,
        big_r,
        spec,
    )?;
    let scale = (big_r / len).powi(ni);
    let flat_kernel = |yp: &[f64]| {
        let y = lift(yp);
        dist(&y, x).powi(-ni) - scale * dist(&y, &far).powi(-ni)
    };
    let rc = norm(&x[..n - 1]);
    let h = x[n - 1];
    let breaks: Vec<f64> = [rc, rc - h, rc + h, rc - 10.0 * h, rc + 10.0 * h]
        .into_iter()
        .filter(|b| *b > 0.0 && *b < big_r)
        .collect();
    let flat = integrate_boundary_annulus(&|yp| flat_kernel(yp) * flat_data(yp), n, None, 0.0, big_r, &breaks, spec)?;
    Ok(sphere.value + 2.0 * h / omega * flat.value)
}

/// Zeros and poles of a meromorphic test function on the right half-plane. Entries outside
/// the half-disk in use are ignored by [`nevanlinna_halfdisk`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroList {
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl ZeroList {
    pub fn new(zeros: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        if zeros.iter().chain(&poles).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(domain("zero and pole locations must be finite"));
        }
        Ok(Self { zeros, poles })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Zeros and poles of `F(z + ε)`.
    pub fn shifted(&self, eps: f64) -> Self {
        let s = |v: &Vec<Complex64>| v.iter().map(|z| z - eps).collect();
        Self { zeros: s(&self.zeros), poles: s(&self.poles) }
    }
}

/// Terms of the half-disk representation of `log|F(z)|` on `B_+(0,R) = {|z| < R, Re z > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfDiskTerms {
    pub log_abs: f64,
    pub arc: f64,
    pub segment: f64,
    pub zero_sum: f64,
    pub residual: f64,
    pub error_estimate: f64,
}

/// `log|(z-λ)(R²+λz) / ((R²-λ̄z)(z+λ̄))|`, the negative Green function of the half-disk.
fn blaschke_log(z: Complex64, lambda: Complex64, r2: f64) -> f64 {
    let num = (z - lambda) * (r2 + lambda * z);
    let den = (r2 - lambda.conj() * z) * (z + lambda.conj());
    (num.norm() / den.norm()).ln()
}

pub fn nevanlinna_halfdisk_terms(
    f: &dyn Fn(Complex64) -> Complex64,
    zeros: &ZeroList,
    big_r: f64,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<HalfDiskTerms> {
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(domain(format!("radius must be positive, got {big_r}")));
    }
    if !(z.re > 0.0) || !(z.norm() < big_r) {
        return Err(domain(format!("{z} is not in the right half-disk of radius {big_r}")));
    }
    let eps = 1e-12 * big_r;
    let mut inside = Vec::new();
    for (lambda, sign) in zeros.zeros.iter().map(|l| (*l, 1.0)).chain(zeros.poles.iter().map(|l| (*l, -1.0))) {
        let on_arc = (lambda.norm() - big_r).abs() <= eps && lambda.re >= -eps;
        let on_segment = lambda.re.abs() <= eps && lambda.im.abs() <= big_r + eps;
        if on_arc || on_segment {
            return Err(Error::Precondition(format!("zero or pole {lambda} lies on the boundary of the half-disk")));
        }
        if lambda.re > 0.0 && lambda.norm() < big_r {
            if (lambda - z).norm() < eps {
                return Err(singular(format!("{z} is a zero or pole of the test function")));
            }
            inside.push((lambda, sign));
        }
    }
    let r2 = big_r * big_r;
    let m = r2 - z.norm_sqr();
    let arc_breaks: Vec<f64> = std::iter::once(z.arg()).chain(inside.iter().map(|(l, _)| l.arg())).collect();
    let arc = integrate_interval_with_breaks(
        |t| {
            let w = Complex64::from_polar(big_r, t);
            let k = m / (w - z).norm_sqr() - m / (w.conj() + z).norm_sqr();
            k * f(w).norm().ln()
        },
        -PI / 2.0,
        PI / 2.0,
        &arc_breaks,
        spec,
    )?;
    let seg_breaks: Vec<f64> = std::iter::once(z.im).chain(inside.iter().map(|(l, _)| l.im)).collect();
    let segment = integrate_interval_with_breaks(
        |t| {
            let it = Complex64::new(0.0, t);
            let k = z.re / (it - z).norm_sqr() - r2 * z.re / (r2 + it * z).norm_sqr();
            k * f(it).norm().ln()
        },
        -big_r,
        big_r,
        &seg_breaks,
        spec,
    )?;
    let zero_sum: f64 = inside.iter().map(|(l, s)| s * blaschke_log(z, *l, r2)).sum();
    let log_abs = f(z).norm().ln();
    let error_estimate = arc.error_estimate / (2.0 * PI) + segment.error_estimate / PI;
    let (arc, segment) = (arc.value / (2.0 * PI), segment.value / PI);
    Ok(HalfDiskTerms {
        log_abs,
        arc,
        segment,
        zero_sum,
        residual: (log_abs - arc - segment - zero_sum).abs(),
        error_estimate,
    })
}

/// `log|F(z)|` against the arc and segment integrals plus the zero and pole sums.
pub fn nevanlinna_halfdisk(
    f: &dyn Fn(Complex64) -> Complex64,
    zeros: &ZeroList,
    big_r: f64,
    z: Complex64,
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<VerificationReport> {
    let t = nevanlinna_halfdisk_terms(f, zeros, big_r, z, spec)?;
    Ok(VerificationReport::compare(
        format!("half-disk R={big_r} z={z}"),
        t.log_abs,
        t.arc + t.segment + t.zero_sum,
        tol,
        "nevanlinna-halfdisk",
    ))
}

/// `Σ Re λ / (1 + |λ|^{ρ+1})`; nondecreasing as zeros in the right half-plane are appended.
pub fn zero_sum_diagnostic(zeros: &[Complex64], rho: f64) -> f64 {
    zeros.iter().map(|l| l.re / (1.0 + l.norm().powf(rho + 1.0))).sum()
}

/// Real polynomial `Q_p(z) = Σ a_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialSpec {
    coefficients: Vec<f64>,
}

pub const MAX_POLY_ORDER: usize = 16;

impl PolynomialSpec {
    /// Coefficients `a_0, ..., a_p`.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(domain("polynomial needs at least one coefficient"));
        }
        if coefficients.len() > MAX_POLY_ORDER + 1 {
            return Err(Error::Capacity(format!(
                "order {} exceeds cap {MAX_POLY_ORDER}",
                coefficients.len() - 1
            )));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(domain("coefficients must be finite"));
        }
        Ok(Self { coefficients })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }
}

/// One row of a limit table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub radius: f64,
    pub value: f64,
    pub error: f64,
}

/// Normalized values at increasing radii next to their closed-form limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitTable {
    pub rows: Vec<LimitRow>,
    pub limit: f64,
}

impl LimitTable {
    fn build(limit: f64, radii: &[f64], mut value: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(domain("no radii given"));
        }
        if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(domain("radii must be positive and finite"));
        }
        let mut sorted = radii.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rows = sorted
            .into_iter()
            .map(|r| {
                let v = value(r)?;
                Ok(LimitRow { radius: r, value: v, error: (v - limit).abs() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, limit })
    }

    /// Exponent `a` in `error ≈ C R^{-a}` from the two largest radii; `None` when either error
    /// vanishes.
    pub fn rate(&self) -> Option<f64> {
        let k = self.rows.len();
        if k < 2 {
            return None;
        }
        let (a, b) = (self.rows[k - 2], self.rows[k - 1]);
        if a.error <= 0.0 || b.error <= 0.0 || a.radius == b.radius {
            return None;
        }
        Some(-(b.error / a.error).ln() / (b.radius / a.radius).ln())
    }

    /// Whether the error does not increase with the radius.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error <= w[0].error)
    }

    pub fn last_error(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.error)
    }
}

fn h_plane(poly: &PolynomialSpec, mu: &DiscreteMeasure<f64>, z: Complex64) -> Result<f64> {
    let p = poly.order();
    let mut h = poly.eval(z).im;
    for a in mu.atoms() {
        h += a.mass * cauchy_mod(p, z, a.location)?.im;
    }
    Ok(h)
}

/// `a_p - π^{-1} Σ_{|t_j|>1} μ_j / t_j^{p+1}`.
fn plane_limit_coefficient(poly: &PolynomialSpec, mu: &DiscreteMeasure<f64>) -> f64 {
    let p = poly.order() as i32;
    let correction: f64 =
        mu.atoms().iter().filter(|a| a.location.abs() > 1.0).map(|a| a.mass / a.location.powi(p + 1)).sum();
    poly.coefficients()[poly.order()] - correction / PI
}

/// `R^{-p} H(Re^{iθ})` for `H = Im[Q_p + Σ μ_j C_p(·, t_j)]`, `C_p` the modified Cauchy kernel
/// with its `1/π` factor.
pub fn radial_limit_plane(
    poly: &PolynomialSpec,
    mu: &DiscreteMeasure<f64>,
    theta: f64,
    radii: &[f64],
) -> Result<LimitTable> {
    if !(theta > 0.0 && theta < PI) {
        return Err(domain(format!("theta = {theta} is not in (0, π)")));
    }
    let p = poly.order();
    let limit = plane_limit_coefficient(poly, mu) * (p as f64 * theta).sin();
    LimitTable::build(limit, radii, |r| Ok(h_plane(poly, mu, Complex64::from_polar(r, theta))? / r.powi(p as i32)))
}

/// `2/(πR^p) ∫_0^π H(Re^{iθ}) sin pθ dθ`; needs `p >= 1`.
pub fn averaged_limit_plane(
    poly: &PolynomialSpec,
    mu: &DiscreteMeasure<f64>,
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<LimitTable> {
    let p = poly.order();
    if p == 0 {
        return Err(domain("the averaged limit needs order p >= 1"));
    }
    let limit = plane_limit_coefficient(poly, mu);
    LimitTable::build(limit, radii, |r| {
        let failed = std::cell::Cell::new(None);
        let res = integrate_interval_with_breaks(
            |t| match h_plane(poly, mu, Complex64::from_polar(r, t)) {
                Ok(h) => h * (p as f64 * t).sin(),
                Err(e) => {
                    failed.set(Some(e));
                    f64::NAN
                }
            },
            0.0,
            PI,
            &[],
            spec,
        );
        if let Some(e) = failed.take() {
            return Err(e);
        }
        Ok(2.0 * res?.value / (PI * r.powi(p as i32)))
    })
}

fn h_space(c: f64, mu: &DiscreteMeasure<Vec<f64>>, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let mut h = c * x[n - 1];
    for a in mu.atoms() {
        h += a.mass * poisson_space(x, &a.location)?;
    }
    Ok(h)
}

fn check_space_measure(n: usize, mu: &DiscreteMeasure<Vec<f64>>) -> Result<()> {
    if !(3..=5).contains(&n) {
        return Err(domain(format!("dimension must be in [3, 5], got {n}")));
    }
    if mu.atoms().iter().any(|a| a.location.len() != n - 1) {
        return Err(domain("boundary atoms need n - 1 coordinates"));
    }
    Ok(())
}

/// `H(x)/R` at `x = R(angles)` for `H = c x_n + Σ μ_j P(x, y'_j)`; the limit is `c Π sin θ_j`.
pub fn radial_limit_space(
    n: usize,
    c: f64,
    mu: &DiscreteMeasure<Vec<f64>>,
    angles: &[f64],
    radii: &[f64],
) -> Result<LimitTable> {
    check_space_measure(n, mu)?;
    if angles.len() != n - 1 || angles.iter().any(|t| !(*t > 0.0 && *t < PI)) {
        return Err(domain(format!("need {} angles in (0, π)", n - 1)));
    }
    let limit = c * angles.iter().map(|t| t.sin()).product::<f64>();
    LimitTable::build(limit, radii, |r| Ok(h_space(c, mu, &hemisphere_point(n, r, angles))? / r))
}

/// `R^{-1} ∫_{[0,π]^{n-1}} H(x) (Π sin θ_j)^{n-1} dθ`; the limit is `2^{n-1} I_n^{n-1} c`.
pub fn averaged_limit_space(
    n: usize,
    c: f64,
    mu: &DiscreteMeasure<Vec<f64>>,
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<LimitTable> {
    check_space_measure(n, mu)?;
    let limit = (2.0 * wallis(n as u32)).powi(n as i32 - 1) * c;
    let bounds = vec![(0.0, PI); n - 1];
    LimitTable::build(limit, radii, |r| {
        let integrand = |ang: &[f64]| {
            let x = hemisphere_point(n, r, ang);
            let w: f64 = ang.iter().map(|t| t.sin()).product();
            h_space(c, mu, &x).unwrap_or(f64::NAN) * w.powi(n as i32 - 1)
        };
        Ok(integrate_box(&integrand, &bounds, spec)?.value / r)
    })
}

/// `Φ(x) = 2(x - S)* + S` with `S = (0', -1)` and `w* = w/|w|²`; maps the upper half-space
/// onto the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobiusMap {
    n: usize,
}

impl MobiusMap {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn pole(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        s[self.n - 1] = -1.0;
        s
    }

    /// `|x'|² + (x_n + 1)²`.
    fn denominator(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(domain(format!("point has {} coordinates, expected {}", x.len(), self.n)));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(domain("non-finite coordinate"));
        }
        let n = self.n;
        let d = dot(&x[..n - 1], &x[..n - 1]) + (x[n - 1] + 1.0).powi(2);
        if d == 0.0 {
            return Err(singular("the map is undefined at its pole (0', -1)"));
        }
        Ok(d)
    }

    /// `(2x', 1 - |x'|² - x_n²) / (|x'|² + (x_n + 1)²)`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.denominator(x)?;
        let n = self.n;
        let mut u: Vec<f64> = x[..n - 1].iter().map(|v| 2.0 * v / d).collect();
        u.push((1.0 - dot(x, x)) / d);
        Ok(u)
    }

    /// `J_Φ(x) = -2^n / (|x'|² + (x_n + 1)²)^n`.
    pub fn jacobian(&self, x: &[f64]) -> Result<f64> {
        let d = self.denominator(x)?;
        Ok(-(2.0 / d).powi(self.n as i32))
    }

    /// Determinant of the central-difference Jacobian matrix with step `h`.
    pub fn jacobian_fd(&self, x: &[f64], h: f64) -> Result<f64> {
        self.denominator(x)?;
        let n = self.n;
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut p = x.to_vec();
        for j in 0..n {
            p[j] = x[j] + h;
            let up = self.apply(&p)?;
            p[j] = x[j] - h;
            let down = self.apply(&p)?;
            p[j] = x[j];
            for i in 0..n {
                m[(i, j)] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        Ok(m.determinant())
    }
}

pub fn mobius_to_ball(map: &MobiusMap, x: &[f64]) -> Result<Vec<f64>> {
    map.apply(x)
}

pub fn jacobian_mobius(map: &MobiusMap, x: &[f64]) -> Result<f64> {
    map.jacobian(x)
}

/// Closed-form Jacobian against the finite-difference determinant, relative tolerance `tol`.
pub fn mobius_jacobian_check(map: &MobiusMap, x: &[f64], tol: f64) -> Result<VerificationReport> {
    let exact = map.jacobian(x)?;
    let fd = map.jacobian_fd(x, 1e-5 * (1.0 + norm(x)))?;
    Ok(VerificationReport::compare(format!("mobius-jacobian x={x:?}"), fd, exact, tol * exact.abs(), "mobius-jacobian"))
}

/// `det(|x|² E - 2 x xᵀ)` against `-|x|^{2n}`, relative tolerance `1e-9`.
pub fn determinant_dn_check(x: &[f64]) -> Result<VerificationReport> {
    let n = x.len();
    if n == 0 || x.iter().any(|v| !v.is_finite()) {
        return Err(domain("need a finite nonempty vector"));
    }
    let s = dot(x, x);
    if s == 0.0 {
        return Err(domain("the vector must be nonzero"));
    }
    let v = nalgebra::DVector::from_column_slice(x);
    let m = DMatrix::<f64>::identity(n, n) * s - (&v * v.transpose()) * 2.0;
    let expected = -s.powi(n as i32);
    Ok(VerificationReport::compare(
        format!("determinant n={n}"),
        m.determinant(),
        expected,
        1e-9 * expected.abs(),
        "determinant-dn",
    ))
}

/// Slice integral at one height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceRow {
    pub height: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Slice integrals of the majorant criterion and their largest value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorantTable {
    pub rows: Vec<SliceRow>,
    pub sup: f64,
}

impl MajorantTable {
    fn build(heights: &[f64], mut row: impl FnMut(f64) -> Result<SliceRow>) -> Result<Self> {
        if heights.is_empty() || heights.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(domain("heights must be positive and finite"));
        }
        let rows = heights.iter().map(|&h| row(h)).collect::<Result<Vec<_>>>()?;
        let sup = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { rows, sup })
    }
}

/// `∫_{R^{n-1}} G(x', x_n) / (|x'|² + (x_n + 1)²)^{n/2} dx'` per height. `decay` describes `G`
/// in `|x'|`: its exponent `q` in `G = O(|x'|^{-q})` and radii where `G` is peaked.
pub fn majorant_criterion_integral(
    g: &dyn Fn(&[f64]) -> f64,
    n: usize,
    decay: &Decay,
    heights: &[f64],
    spec: &QuadratureSpec,
) -> Result<MajorantTable> {
    if !(3..=5).contains(&n) {
        return Err(domain(format!("dimension must be in [3, 5], got {n}")));
    }
    MajorantTable::build(heights, |h| {
        let a2 = (h + 1.0).powi(2);
        let mut breaks = decay.breakpoints.clone();
        breaks.extend([h, h + 1.0]);
        let d = Decay::new(decay.exponent + n as f64).with_breakpoints(breaks).with_scale(decay.scale.max(h + 1.0));
        let f = |yp: &[f64]| {
            let mut x = yp.to_vec();
            x.push(h);
            g(&x) / (dot(yp, yp) + a2).powf(n as f64 / 2.0)
        };
        let r = integrate_boundary_polar(&f, n, None, &d, spec)?;
        Ok(SliceRow { height: h, value: r.value, error_estimate: r.error_estimate })
    })
}

/// `∫_R G(x + iy) / (x² + (y + 1)²)^{(p+1)/2} dx` per height `y`.
pub fn majorant_criterion_integral_plane(
    g: &dyn Fn(Complex64) -> f64,
    p: usize,
    decay: &Decay,
    heights: &[f64],
    spec: &QuadratureSpec,
) -> Result<MajorantTable> {
    MajorantTable::build(heights, |y| {
        let a2 = (y + 1.0).powi(2);
        let mut breaks = decay.breakpoints.clone();
        breaks.extend([y, y + 1.0]);
        let d = Decay::new(decay.exponent + p as f64 + 1.0)
            .with_breakpoints(breaks)
            .with_scale(decay.scale.max(y + 1.0));
        let f = |x: f64| g(Complex64::new(x, y)) / (x * x + a2).powf((p as f64 + 1.0) / 2.0);
        let r = crate::quadrature::integrate_line(f, &d, spec)?;
        Ok(SliceRow { height: y, value: r.value, error_estimate: r.error_estimate })
    })
}

/// `c ω_n / 2 + 2 Σ μ_j (1 + |y'_j|²)^{-n/2}`, a bound on every slice integral of
/// `H = c x_n + Σ μ_j P(·, y'_j)`.
pub fn majorant_bound(n: usize, c: f64, mu: &DiscreteMeasure<Vec<f64>>) -> Result<f64> {
    check_space_measure(n, mu)?;
    let s: f64 =
        mu.atoms().iter().map(|a| a.mass * (1.0 + dot(&a.location, &a.location)).powf(-(n as f64) / 2.0)).sum();
    Ok(c * sphere_area(n) / 2.0 + 2.0 * s)
}

/// Reproducing identities of the half-space Poisson kernel behind the majorant criterion, at
/// the point `x`: total mass one, reproduction of `(x_n + a)/(|x'|² + (x_n + a)²)^{n/2}` for
/// `a = 1/2` and `a = x_n + 1`, and the mass of the kernel at height `x_n + 1`.
pub fn majorant_identities(x: &[f64], tol: f64, spec: &QuadratureSpec) -> Result<Vec<VerificationReport>> {
    let n = x.len();
    if !(3..=5).contains(&n) || !(x[n - 1] > 0.0) || x.iter().any(|v| !v.is_finite()) {
        return Err(domain("need a point of the upper half-space in dimension 3 to 5"));
    }
    let omega = sphere_area(n);
    let h = x[n - 1];
    let centre = &x[..n - 1];
    let half_n = n as f64 / 2.0;
    let kernel = |yp: &[f64], height: f64| {
        let d2: f64 = yp.iter().zip(centre).map(|(a, b)| (a - b) * (a - b)).sum();
        2.0 * height / (omega * (d2 + height * height).powf(half_n))
    };
    let polar = |f: &dyn Fn(&[f64]) -> f64, decay: f64, scale: f64| {
        let d = Decay::new(decay).with_breakpoints([h, 10.0 * h, scale]).with_scale(scale.max(1.0));
        integrate_boundary_polar(f, n, Some(centre), &d, spec).map(|r| r.value)
    };
    let mut out = Vec::new();
    let mass = polar(&|y| kernel(y, h), n as f64, h)?;
    out.push(VerificationReport::compare(format!("poisson-mass x_n={h}"), mass, 1.0, tol, "majorant-identity"));
    for a in [0.5, h + 1.0] {
        let target = |yp: &[f64]| a / (dot(yp, yp) + a * a).powf(half_n);
        let lhs = (h + a) / (dot(centre, centre) + (h + a).powi(2)).powf(half_n);
        let rhs = polar(&|y| kernel(y, h) * target(y), 2.0 * n as f64, a + norm(centre))?;
        out.push(VerificationReport::compare(format!("poisson-reproduces a={a}"), lhs, rhs, tol, "majorant-identity"));
    }
    let shifted = polar(&|y| kernel(y, h + 1.0), n as f64, h + 1.0)?;
    out.push(VerificationReport::compare(format!("poisson-mass x_n={}", h + 1.0), shifted, 1.0, tol, "majorant-identity"));
    let slice = majorant_criterion_integral(&|_| 1.0, n, &Decay::new(0.0), &[h], spec)?.sup;
    out.push(VerificationReport::compare(
        format!("unit-slice x_n={h}"),
        slice,
        omega / (2.0 * (h + 1.0)),
        tol,
        "majorant-identity",
    ));
    Ok(out)
}
