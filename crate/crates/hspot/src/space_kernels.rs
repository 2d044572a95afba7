//! Kernels of the upper half-space `H = {x ∈ R^n : x_n > 0}` for `n ∈ [3, 5]`.
//!
//! Interior points are slices of length `n`; boundary points `y'` are slices of length `n - 1`.
//! The modified kernels subtract Gegenbauer terms of the expansion of `|x - y|^{2-n}` (Green)
//! or of the Poisson kernel in powers of `|x|/|y|`.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{domain, singular, Error, Result};
use crate::plane_kernels::SINGULAR_EPS;
use crate::quadrature::{integrate_interval_with_breaks, QuadratureSpec};
use crate::report::VerificationReport;
use crate::sampling::{bound_report, sample_ratios, Replay};
use crate::special::{gegenbauer_at_one, gegenbauer_fill, gegenbauer_raw, sphere_area};

/// Highest modification order accepted.
pub const MAX_ORDER: usize = 32;

/// `ω_n` and `r_n = 1/((n-2)ω_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceConstants {
    pub n: usize,
    pub omega_n: f64,
    pub r_n: f64,
}

impl SpaceConstants {
    pub fn new(n: usize) -> Result<Self> {
        check_dim(n)?;
        let omega_n = sphere_area(n);
        Ok(Self { n, omega_n, r_n: 1.0 / ((n as f64 - 2.0) * omega_n) })
    }
}

fn check_dim(n: usize) -> Result<()> {
    if !(3..=5).contains(&n) {
        return Err(domain(format!("dimension must be in [3, 5], got {n}")));
    }
    Ok(())
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Capacity(format!("order {m} exceeds cap {MAX_ORDER}")));
    }
    Ok(())
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(domain("non-finite coordinate"))
    }
}

fn interior(x: &[f64]) -> Result<usize> {
    let n = x.len();
    check_dim(n)?;
    check_finite(x)?;
    if !(x[n - 1] > 0.0) {
        return Err(domain(format!("x_n = {} is not positive", x[n - 1])));
    }
    Ok(n)
}

fn closed(x: &[f64]) -> Result<usize> {
    let n = x.len();
    check_dim(n)?;
    check_finite(x)?;
    if !(x[n - 1] >= 0.0) {
        return Err(domain(format!("x_n = {} is negative", x[n - 1])));
    }
    Ok(n)
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// `(y', 0)`.
pub fn lift(yp: &[f64]) -> Vec<f64> {
    let mut y = yp.to_vec();
    y.push(0.0);
    y
}

/// `y* = (y', -y_n)`.
pub fn reflect(y: &[f64]) -> Vec<f64> {
    let mut r = y.to_vec();
    if let Some(last) = r.last_mut() {
        *last = -*last;
    }
    r
}

/// `x·y/(|x||y|)` clamped to `[-1, 1]`; zero when either vector vanishes.
fn cosine(x: &[f64], y: &[f64]) -> f64 {
    let d = norm(x) * norm(y);
    if d == 0.0 {
        0.0
    } else {
        (dot(x, y) / d).clamp(-1.0, 1.0)
    }
}

/// `E(x) = -r_n |x|^{2-n}`.
pub fn fundamental_e_n(x: &[f64]) -> Result<f64> {
    let n = x.len();
    let c = SpaceConstants::new(n)?;
    let r = norm(x);
    if r < SINGULAR_EPS {
        return Err(singular("fundamental solution at the origin"));
    }
    Ok(-c.r_n * r.powi(2 - n as i32))
}

/// `E_m(x - y)`: adds `Σ_{k<m} r_n|x|^k/|y|^{n-2+k} C_k^{(n-2)/2}(x·y/(|x||y|))` for `|y| > 1`.
pub fn fundamental_e_mod_n(m: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_order(m)?;
    if x.len() != y.len() {
        return Err(domain("points have different dimensions"));
    }
    let n = x.len();
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let e = fundamental_e_n(&diff)?;
    let ry = norm(y);
    if ry <= 1.0 || m == 0 {
        return Ok(e);
    }
    let c = SpaceConstants::new(n)?;
    let lambda = (n as f64 - 2.0) / 2.0;
    let t = cosine(x, y);
    let mut gk = vec![0.0; m];
    gegenbauer_fill(lambda, t, &mut gk);
    let s = norm(x) / ry;
    let base = c.r_n * ry.powi(2 - n as i32);
    let corr: f64 = gk.iter().enumerate().map(|(k, g)| base * s.powi(k as i32) * g).sum();
    Ok(e + corr)
}

/// `G(x, y) = E(x - y) - E(x - y*)`, evaluated as
/// `-r_n a^{-(n-2)/2} (1 - (1 + δ)^{-(n-2)/2})` with `a = |x - y|²`, `δ = 4x_n y_n/a`.
pub fn green_space(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = closed(x)?;
    if closed(y)? != n {
        return Err(domain("points have different dimensions"));
    }
    let c = SpaceConstants::new(n)?;
    let a = dist_sq(x, y);
    if a.sqrt() < SINGULAR_EPS {
        return Err(singular("green function at coincident points"));
    }
    let delta = 4.0 * x[n - 1] * y[n - 1] / a;
    let h = (n as f64 - 2.0) / 2.0;
    Ok(-c.r_n * a.powf(-h) * (-(-h * delta.ln_1p()).exp_m1()))
}

/// Runs `C_k^λ(t)` together with the divided difference `D_k = (C_k(t) - C_k(t*))/(t - t*)`,
/// which keeps `C_k(t) - C_k(t*)` accurate when `t*` is within rounding of `t`.
struct GegenbauerDiff {
    lambda: f64,
    t: f64,
    t_star: f64,
    k: usize,
    c: [f64; 2],
    d: [f64; 2],
}

impl GegenbauerDiff {
    fn new(lambda: f64, t: f64, t_star: f64) -> Self {
        Self { lambda, t, t_star, k: 0, c: [0.0, 1.0], d: [0.0, 0.0] }
    }

    /// `(C_k(t), D_k)` for the current `k`.
    fn current(&self) -> (f64, f64) {
        (self.c[1], self.d[1])
    }

    fn advance(&mut self) {
        let k = (self.k + 1) as f64;
        let l = self.lambda;
        let c = (2.0 * (k + l - 1.0) * self.t * self.c[1] - (k + 2.0 * l - 2.0) * self.c[0]) / k;
        let d = (2.0 * (k + l - 1.0) * (self.c[1] + self.t_star * self.d[1]) - (k + 2.0 * l - 2.0) * self.d[0]) / k;
        self.c = [self.c[1], c];
        self.d = [self.d[1], d];
        self.k += 1;
    }
}

/// `Σ_{k>m} s^k D_k` for `s <= 1/2`.
fn green_tail_sum(lambda: f64, m: usize, s: f64, t: f64, t_star: f64) -> f64 {
    let mut g = GegenbauerDiff::new(lambda, t, t_star);
    let mut sum = 0.0;
    let mut sk = 1.0;
    // C_{k-1}^{λ+1}(1), so that 2λ times it bounds |D_k|
    let mut deriv_one = 1.0;
    for k in 1..600usize {
        g.advance();
        sk *= s;
        if k > 1 {
            deriv_one *= (2.0 * lambda + k as f64) / (k - 1) as f64;
        }
        if k > m {
            sum += sk * g.current().1;
            let bound = 2.0 * lambda * deriv_one * sk;
            if bound <= 1e-18 * sum.abs() || bound < 1e-300 {
                break;
            }
        }
    }
    sum
}

/// `G_m(x, y) = E_{m+1}(x - y) - E_{m+1}(x - y*)`; for `|y| > 1` this is
/// `G + Σ_{k=0}^{m} r_n|x|^k/|y|^{n-2+k} [C_k(t) - C_k(t*)]`.
pub fn green_space_mod(m: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_order(m)?;
    let g = green_space(x, y)?;
    let n = x.len();
    let ry = norm(y);
    if ry <= 1.0 {
        return Ok(g);
    }
    if y[n - 1] == 0.0 {
        return Ok(0.0);
    }
    let c = SpaceConstants::new(n)?;
    let lambda = (n as f64 - 2.0) / 2.0;
    let rx = norm(x);
    let (t, t_star) = (cosine(x, y), cosine(x, &reflect(y)));
    // t - t* = 2 x_n y_n/(|x||y|) exactly
    let gap = if rx == 0.0 { 0.0 } else { 2.0 * x[n - 1] * y[n - 1] / (rx * ry) };
    let s = rx / ry;
    let base = c.r_n * ry.powi(2 - n as i32);
    if s <= 0.5 {
        return Ok(-base * gap * green_tail_sum(lambda, m, s, t, t_star));
    }
    let mut diff = GegenbauerDiff::new(lambda, t, t_star);
    let mut corr = 0.0;
    for k in 1..=m {
        diff.advance();
        corr += s.powi(k as i32) * diff.current().1;
    }
    Ok(g + base * gap * corr)
}

/// `P(x, y') = 2x_n/(ω_n |x - (y', 0)|^n)`.
pub fn poisson_space(x: &[f64], yp: &[f64]) -> Result<f64> {
    let n = interior(x)?;
    if yp.len() != n - 1 {
        return Err(domain("boundary point has the wrong dimension"));
    }
    check_finite(yp)?;
    let c = SpaceConstants::new(n)?;
    let d = dist_sq(x, &lift(yp)).sqrt();
    Ok(2.0 * x[n - 1] / (c.omega_n * d.powi(n as i32)))
}

/// `Σ_{k>=m} C_k^{n/2}(t) s^k` for `s <= 1/2`.
fn poisson_tail_sum(lambda: f64, m: usize, s: f64, t: f64) -> f64 {
    let (mut a0, mut a1) = (1.0, 2.0 * lambda * t);
    let mut sum = if m == 0 { 1.0 } else { 0.0 };
    let mut sk = 1.0;
    let mut at_one = 1.0;
    for k in 1..600usize {
        let kf = k as f64;
        if k > 1 {
            let a2 = (2.0 * (kf + lambda - 1.0) * t * a1 - (kf + 2.0 * lambda - 2.0) * a0) / kf;
            a0 = a1;
            a1 = a2;
        }
        sk *= s;
        at_one *= (2.0 * lambda + kf - 1.0) / kf;
        if k >= m {
            sum += sk * a1;
            let bound = at_one * sk;
            if bound <= 1e-18 * sum.abs() || bound < 1e-300 {
                break;
            }
        }
    }
    sum
}

/// `P_m(x, y')`: `P` for `|y'| <= 1`, otherwise `P` minus the first `m` Gegenbauer terms.
pub fn poisson_space_mod(m: usize, x: &[f64], yp: &[f64]) -> Result<f64> {
    check_order(m)?;
    let p = poisson_space(x, yp)?;
    let n = x.len();
    let ry = norm(yp);
    if ry <= 1.0 || m == 0 {
        return Ok(p);
    }
    let c = SpaceConstants::new(n)?;
    let lambda = n as f64 / 2.0;
    let y = lift(yp);
    let t = cosine(x, &y);
    let s = norm(x) / ry;
    let base = 2.0 * x[n - 1] / (c.omega_n * ry.powi(n as i32));
    if s <= 0.5 {
        return Ok(base * poisson_tail_sum(lambda, m, s, t));
    }
    let mut gk = vec![0.0; m];
    gegenbauer_fill(lambda, t, &mut gk);
    let corr: f64 = gk.iter().enumerate().map(|(k, g)| base * s.powi(k as i32) * g).sum();
    Ok(p - corr)
}

/// `P_m` from the subtracted series, term by term.
pub fn poisson_space_mod_series(m: usize, x: &[f64], yp: &[f64]) -> Result<f64> {
    check_order(m)?;
    let p = poisson_space(x, yp)?;
    let n = x.len();
    let ry = norm(yp);
    if ry <= 1.0 {
        return Ok(p);
    }
    let c = SpaceConstants::new(n)?;
    let t = cosine(x, &lift(yp));
    let rx = norm(x);
    let corr: f64 = (0..m)
        .map(|k| {
            2.0 * x[n - 1] * rx.powi(k as i32) / (c.omega_n * ry.powi((n + k) as i32))
                * gegenbauer_raw(n as f64 / 2.0, k, t)
        })
        .sum();
    Ok(p - corr)
}

/// `I_m^{(n)}(s, t) = ∫_0^s (1 - 2tξ + ξ²)^{n/2-1} ξ^m dξ`.
pub fn i_integral(n: usize, m: usize, s: f64, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("dimension must be at least 2, got {n}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("upper limit must be positive, got {s}")));
    }
    if !(t.abs() < 1.0) {
        return Err(domain(format!("|t| must be below 1, got {t}")));
    }
    let e = n as f64 / 2.0 - 1.0;
    let f = |xi: f64| (1.0 - 2.0 * t * xi + xi * xi).max(0.0).powf(e) * xi.powi(m as i32);
    let spec = QuadratureSpec::new(1e-300, 1e-11)?;
    let r = integrate_interval_with_breaks(f, 0.0, s, &[t], &spec)?;
    Ok(r.value)
}

/// `P_m = P [m C_m^{n/2}(t') I_{m-1}(s', t') - (n+m-1) C_{m-1}^{n/2}(t') I_m(s', t')]` for
/// `|y'| > 1`; `m = 0` returns `P`.
pub fn poisson_mod_factored(m: usize, x: &[f64], yp: &[f64]) -> Result<f64> {
    check_order(m)?;
    let p = poisson_space(x, yp)?;
    let n = x.len();
    let ry = norm(yp);
    if ry <= 1.0 {
        return Err(domain("factored form needs |y'| > 1"));
    }
    if m == 0 {
        return Ok(p);
    }
    let lim = 1.0 - 1e-12;
    let t = cosine(x, &lift(yp)).clamp(-lim, lim);
    let s = norm(x) / ry;
    if s == 0.0 {
        return Ok(p);
    }
    let lambda = n as f64 / 2.0;
    let bracket = m as f64 * gegenbauer_raw(lambda, m, t) * i_integral(n, m - 1, s, t)?
        - (n + m - 1) as f64 * gegenbauer_raw(lambda, m - 1, t) * i_integral(n, m, s, t)?;
    Ok(p * bracket)
}

/// Inequality families checked by [`space_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceBound {
    GreenPotential,
    GreenProduct,
    InversePowerNear,
    InversePowerFar,
    ModPoissonMid,
    ModPoissonFar,
    ModPoissonUnit,
    GreenReflected,
    ModPoissonInner,
    ModPoissonShell,
    ModPoissonOuter,
    ModPoissonUnitFitted,
    ModGreenInner,
    ModGreenShell,
    ModGreenOuter,
    ModGreenUnit,
    ModGreenNear,
    FactoredNear,
    FactoredFar,
    ModGreenSmall,
    ModGreenLarge,
    IIntegralSmall,
    IIntegralLarge,
}

impl SpaceBound {
    pub const ALL: [SpaceBound; 23] = [
        Self::GreenPotential,
        Self::GreenProduct,
        Self::InversePowerNear,
        Self::InversePowerFar,
        Self::ModPoissonMid,
        Self::ModPoissonFar,
        Self::ModPoissonUnit,
        Self::GreenReflected,
        Self::ModPoissonInner,
        Self::ModPoissonShell,
        Self::ModPoissonOuter,
        Self::ModPoissonUnitFitted,
        Self::ModGreenInner,
        Self::ModGreenShell,
        Self::ModGreenOuter,
        Self::ModGreenUnit,
        Self::ModGreenNear,
        Self::FactoredNear,
        Self::FactoredFar,
        Self::ModGreenSmall,
        Self::ModGreenLarge,
        Self::IIntegralSmall,
        Self::IIntegralLarge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GreenPotential => "space-green-potential",
            Self::GreenProduct => "space-green-product",
            Self::InversePowerNear => "inverse-power-near",
            Self::InversePowerFar => "inverse-power-far",
            Self::ModPoissonMid => "space-mod-poisson-mid",
            Self::ModPoissonFar => "space-mod-poisson-far",
            Self::ModPoissonUnit => "space-mod-poisson-unit",
            Self::GreenReflected => "space-green-reflected",
            Self::ModPoissonInner => "space-mod-poisson-inner",
            Self::ModPoissonShell => "space-mod-poisson-shell",
            Self::ModPoissonOuter => "space-mod-poisson-outer",
            Self::ModPoissonUnitFitted => "space-mod-poisson-unit-fitted",
            Self::ModGreenInner => "space-mod-green-inner",
            Self::ModGreenShell => "space-mod-green-shell",
            Self::ModGreenOuter => "space-mod-green-outer",
            Self::ModGreenUnit => "space-mod-green-unit",
            Self::ModGreenNear => "space-mod-green-near",
            Self::FactoredNear => "factored-poisson-near",
            Self::FactoredFar => "factored-poisson-far",
            Self::ModGreenSmall => "space-mod-green-small-ratio",
            Self::ModGreenLarge => "space-mod-green-large-ratio",
            Self::IIntegralSmall => "i-integral-small",
            Self::IIntegralLarge => "i-integral-large",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::Usage(format!("unknown space bound '{name}'")))
    }

    pub fn is_explicit(self) -> bool {
        (self as usize) <= (Self::ModPoissonUnit as usize)
    }
}

/// Keeps unit-ball samples off the sphere where the modified kernels switch form.
const INNER: f64 = 1.0 - 1e-12;

fn log_uniform(rng: &mut Replay, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn gaussian(rng: &mut Replay) -> f64 {
    // Box-Muller; the second variate is discarded to keep draws aligned
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn direction(dim: usize, rng: &mut Replay) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

/// Point of `H` with `|x| = r`.
fn upper(n: usize, r: f64, rng: &mut Replay) -> Vec<f64> {
    loop {
        let mut v = direction(n, rng);
        v[n - 1] = v[n - 1].abs();
        if v[n - 1] > 1e-9 {
            return v.into_iter().map(|c| c * r).collect();
        }
    }
}

fn boundary(n: usize, r: f64, rng: &mut Replay) -> Vec<f64> {
    direction(n - 1, rng).into_iter().map(|c| c * r).collect()
}

/// Unit vector whose cosine with `axis` is uniform on `[-1, 1]`.
fn tilted(axis: &[f64], rng: &mut Replay) -> Vec<f64> {
    let len = norm(axis);
    if len == 0.0 {
        return direction(axis.len(), rng);
    }
    let a: Vec<f64> = axis.iter().map(|c| c / len).collect();
    let t = rng.gen_range(-1.0..=1.0f64);
    let p = loop {
        let mut p = direction(axis.len(), rng);
        let along = dot(&p, &a);
        p.iter_mut().zip(&a).for_each(|(pi, ai)| *pi -= along * ai);
        let r = norm(&p);
        if r > 1e-6 {
            break p.into_iter().map(|c| c / r).collect::<Vec<_>>();
        }
    };
    let w = (1.0 - t * t).sqrt();
    // p is orthogonal to a only up to cancellation, so renormalise
    let v: Vec<f64> = a.iter().zip(&p).map(|(ai, pi)| t * ai + w * pi).collect();
    let len = norm(&v);
    v.into_iter().map(|c| c / len).collect()
}

// Half of the draws spread the angle to the first point uniformly in cosine, so configurations
// near alignment or opposition are not starved in higher dimensions.
fn partner(n: usize, r: f64, axis: &[f64], rng: &mut Replay) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        for _ in 0..64 {
            let v = tilted(axis, rng);
            if v[n - 1] > 1e-9 {
                return v.into_iter().map(|c| c * r).collect();
            }
        }
    }
    upper(n, r, rng)
}

fn boundary_partner(n: usize, r: f64, x: &[f64], rng: &mut Replay) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        tilted(&x[..n - 1], rng).into_iter().map(|c| c * r).collect()
    } else {
        boundary(n, r, rng)
    }
}

fn space_sample(bound: SpaceBound, n: usize, rng: &mut Replay) -> Result<(f64, f64)> {
    use SpaceBound::*;
    let c = SpaceConstants::new(n)?;
    let nf = n as f64;
    let ni = n as i32;
    let m = rng.gen_range(0..=4usize);
    let mi = m as i32;
    let wide = |rng: &mut Replay| log_uniform(rng, 0.05, 1e4);
    let xn = |x: &[f64]| x[x.len() - 1];
    Ok(match bound {
        GreenPotential | GreenProduct => {
            let x = upper(n, wide(rng), rng);
            let y = loop {
                let y = partner(n, wide(rng), &x, rng);
                if dist_sq(&x, &y).sqrt() > 1e-9 * norm(&x) {
                    break y;
                }
            };
            let d = dist_sq(&x, &y).sqrt();
            let lhs = green_space(&x, &y)?.abs();
            if bound == GreenPotential {
                (lhs, c.r_n / d.powi(ni - 2))
            } else {
                (lhs, 2.0 * xn(&x) * xn(&y) / (c.omega_n * d.powi(ni)))
            }
        }
        InversePowerNear => {
            let x = upper(n, wide(rng), rng);
            let y = partner(n, norm(&x) * 0.5 * rng.gen_range(0.0..1.0f64), &x, rng);
            (1.0 / dist_sq(&x, &y).sqrt().powi(ni), 2f64.powi(ni) / norm(&x).powi(ni))
        }
        InversePowerFar => {
            let x = upper(n, wide(rng), rng);
            let y = partner(n, 2.0 * norm(&x) * log_uniform(rng, 1.0 + 1e-12, 1e4), &x, rng);
            (1.0 / dist_sq(&x, &y).sqrt().powi(ni), 2f64.powi(ni) / norm(&y).powi(ni))
        }
        ModPoissonMid => {
            let x = upper(n, log_uniform(rng, 1.0 + 1e-9, 1e4), rng);
            let rx = norm(&x);
            let yp = boundary_partner(n, rng.gen_range(1.0 + 1e-12..=2.0 * rx), &x, rng);
            let lhs = poisson_space_mod(m, &x, &yp)?.abs();
            let k = 2f64.powi(mi + ni) + if m > 0 { m as f64 * 2f64.powi(mi) * gegenbauer_at_one(nf / 2.0, m - 1) } else { 0.0 };
            let rhs = k * rx.powi(ni + mi - 1) / (c.omega_n * xn(&x).powi(ni - 1) * norm(&yp).powi(ni + mi - 1));
            (lhs, rhs)
        }
        ModPoissonFar => {
            let x = upper(n, log_uniform(rng, 1.0 + 1e-9, 1e4), rng);
            let yp = boundary_partner(n, 2.0 * norm(&x) * log_uniform(rng, 1.0 + 1e-12, 1e4), &x, rng);
            let lhs = poisson_space_mod(m, &x, &yp)?.abs();
            let rhs = 2f64.powi(mi + ni + 1) * xn(&x) * norm(&x).powi(mi) / (c.omega_n * norm(&yp).powi(ni + mi));
            (lhs, rhs)
        }
        ModPoissonUnit => {
            let x = upper(n, log_uniform(rng, 1.0 + 1e-9, 1e4), rng);
            let yp = boundary_partner(n, INNER * rng.gen_range(0.0..=1.0f64), &x, rng);
            (poisson_space_mod(m, &x, &yp)?.abs(), 2.0 / (c.omega_n * xn(&x).powi(ni - 1)))
        }
        GreenReflected => {
            let x = upper(n, wide(rng), rng);
            let y = loop {
                let y = partner(n, wide(rng), &x, rng);
                if dist_sq(&x, &y).sqrt() > 1e-9 * norm(&x) {
                    break y;
                }
            };
            let lhs = green_space(&x, &y)?.abs();
            let rhs = xn(&x) * xn(&y) / (dist_sq(&x, &y).sqrt().powi(ni - 2) * dist_sq(&x, &reflect(&y)));
            (lhs, rhs)
        }
        ModPoissonInner => {
            let x = upper(n, log_uniform(rng, 2.0 + 1e-9, 1e4), rng);
            let yp = boundary_partner(n, log_uniform(rng, 1.0 + 1e-12, norm(&x) / 2.0), &x, rng);
            let lhs = poisson_space_mod(m, &x, &yp)?.abs();
            (lhs, xn(&x) * norm(&x).powi(mi - 1) / norm(&yp).powi(mi + ni - 1))
        }
        ModPoissonShell => {
            let x = upper(n, wide(rng), rng);
            let yp = boundary_partner(n, norm(&x) * rng.gen_range(0.5 + 1e-12..=2.0), &x, rng);
            let lhs = poisson_space_mod(m, &x, &yp)?.abs();
            (lhs, xn(&x) / dist_sq(&x, &lift(&yp)).sqrt().powi(ni))
        }
        ModPoissonOuter => {
            let x = upper(n, wide(rng), rng);
            let yp = boundary_partner(n, (2.0 * norm(&x)).max(1.0) * log_uniform(rng, 1.0 + 1e-12, 1e4), &x, rng);
            let lhs = poisson_space_mod(m, &x, &yp)?.abs();
            (lhs, xn(&x) * norm(&x).powi(mi) / norm(&yp).powi(mi + ni))
        }
        ModPoissonUnitFitted => {
            let x = upper(n, log_uniform(rng, 2.0, 1e4), rng);
            let yp = boundary_partner(n, INNER * rng.gen_range(0.0..=1.0f64), &x, rng);
            (poisson_space_mod(m, &x, &yp)?.abs(), xn(&x) / norm(&x).powi(ni))
        }
        ModGreenInner => {
            let x = upper(n, log_uniform(rng, 2.0 + 1e-9, 1e4), rng);
            let y = partner(n, log_uniform(rng, 1.0 + 1e-12, norm(&x) / 2.0), &x, rng);
            let lhs = green_space_mod(m, &x, &y)?.abs();
            (lhs, xn(&x) * xn(&y) * norm(&x).powi(mi - 1) / norm(&y).powi(mi + ni - 1))
        }
        ModGreenShell => {
            let x = upper(n, wide(rng), rng);
            let y = loop {
                let y = partner(n, norm(&x) * rng.gen_range(0.5 + 1e-12..=2.0), &x, rng);
                if dist_sq(&x, &y).sqrt() > 1e-9 * norm(&x) {
                    break y;
                }
            };
            let lhs = green_space_mod(m, &x, &y)?.abs();
            (lhs, xn(&x) * xn(&y) / dist_sq(&x, &y).sqrt().powi(ni))
        }
        ModGreenOuter => {
            let x = upper(n, wide(rng), rng);
            let y = partner(n, (2.0 * norm(&x)).max(1.0) * log_uniform(rng, 1.0 + 1e-12, 1e4), &x, rng);
            let lhs = green_space_mod(m, &x, &y)?.abs();
            (lhs, xn(&x) * xn(&y) * norm(&x).powi(mi) / norm(&y).powi(mi + ni))
        }
        ModGreenUnit => {
            let x = upper(n, log_uniform(rng, 2.0, 1e4), rng);
            let y = partner(n, INNER * rng.gen_range(0.0..=1.0f64), &x, rng);
            (green_space_mod(m, &x, &y)?.abs(), xn(&x) * xn(&y) / norm(&x).powi(ni))
        }
        ModGreenNear => {
            let x = upper(n, wide(rng), rng);
            let y = loop {
                let d = direction(n, rng);
                let r = xn(&x) / 2.0 * rng.gen_range(0.0..1.0f64).powf(1.0 / nf);
                if r > 1e-9 * xn(&x) {
                    break x.iter().zip(&d).map(|(a, b)| a + r * b).collect::<Vec<_>>();
                }
            };
            let lhs = green_space_mod(m, &x, &y)?.abs();
            (lhs, 1.0 / dist_sq(&x, &y).sqrt().powi(ni - 2))
        }
        FactoredNear | FactoredFar => {
            let yp = boundary(n, log_uniform(rng, 1.0 + 1e-9, 1e4), rng);
            let s = if bound == FactoredNear { log_uniform(rng, 1e-4, 1.0) } else { log_uniform(rng, 1.0, 1e4) };
            let x = partner(n, s * norm(&yp), &lift(&yp), rng);
            let lhs = poisson_space_mod(m, &x, &yp)?.abs();
            let d = dist_sq(&x, &lift(&yp)).sqrt().powi(ni);
            let e = if bound == FactoredNear { mi } else { mi + ni - 1 };
            (lhs, xn(&x) * s.powi(e) / d)
        }
        ModGreenSmall | ModGreenLarge => {
            let y = upper(n, log_uniform(rng, 1.0 + 1e-9, 1e4), rng);
            let s = if bound == ModGreenSmall { log_uniform(rng, 1e-4, 1.0) } else { log_uniform(rng, 1.0, 1e4) };
            let x = loop {
                let x = partner(n, s * norm(&y), &y, rng);
                if dist_sq(&x, &y).sqrt() > 1e-9 * norm(&y) {
                    break x;
                }
            };
            let lhs = green_space_mod(m, &x, &y)?.abs();
            let (rx, ry) = (norm(&x), norm(&y));
            let d = dist_sq(&x, &y).sqrt();
            let lead = xn(&x) * xn(&y) / d.powi(ni - 2);
            let rhs = if bound == ModGreenSmall {
                lead * rx.powi(mi) / ry.powi(mi + 1) * (rx / (ry * ry) + 1.0 / ry + rx / (d * d))
            } else {
                lead * rx.powi(mi + ni - 4) / ry.powi(mi + ni - 2) * (1.0 + rx / ry + rx * rx / (d * d))
            };
            (lhs, rhs)
        }
        IIntegralSmall | IIntegralLarge => {
            let t = rng.gen_range(-1.0 + 1e-9..1.0 - 1e-9);
            let s = if bound == IIntegralSmall { log_uniform(rng, 1e-4, 1.0) } else { log_uniform(rng, 1.0, 1e3) };
            let lhs = i_integral(n, m, s, t)?;
            let e = if bound == IIntegralSmall { mi + 1 } else { mi + ni - 1 };
            (lhs, s.powi(e))
        }
    })
}

/// Ratios `lhs/rhs` for `samples` draws from the family's region in dimension `n`.
pub fn space_bound_ratios(bound: SpaceBound, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_dim(n)?;
    sample_ratios(samples, seed, |src| space_sample(bound, n, src))
}

/// Same verdict rules as the plane families.
pub fn space_bound_check(bound: SpaceBound, n: usize, samples: usize, seed: u64) -> Result<VerificationReport> {
    check_dim(n)?;
    let name = format!("{} dim={n}", bound.name());
    bound_report(&name, bound.is_explicit(), samples, seed, "space-kernel-bound", |src| space_sample(bound, n, src))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants() {
        let c = SpaceConstants::new(3).unwrap();
        assert_relative_eq!(c.omega_n, 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(c.r_n, 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert!(SpaceConstants::new(6).is_err());
    }

    #[test]
    fn fundamental_values() {
        assert_relative_eq!(fundamental_e_n(&[0.0, 0.0, 1.0]).unwrap(), -1.0 / (4.0 * PI), epsilon = 1e-15);
        let r4 = SpaceConstants::new(4).unwrap().r_n;
        assert_relative_eq!(fundamental_e_n(&[0.0, 1.0, 0.0, 0.0]).unwrap(), -r4, epsilon = 1e-15);
        assert_relative_eq!(fundamental_e_n(&[0.0, 0.0, 2.0]).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-15);
        assert!(matches!(fundamental_e_n(&[0.0; 3]), Err(Error::Singularity(_))));
    }

    #[test]
    fn green_values() {
        assert_eq!(green_space(&[0.1, 0.2, 1.0], &[3.0, 1.0, 0.0]).unwrap(), 0.0);
        assert_relative_eq!(green_space(&[0.0, 0.0, 1.0], &[0.0, 0.0, 2.0]).unwrap(), -1.0 / (6.0 * PI), epsilon = 1e-15);
        let (a, b) = ([0.3, -0.2, 0.7], [1.1, 0.4, 0.2]);
        assert_relative_eq!(green_space(&a, &b).unwrap(), green_space(&b, &a).unwrap(), epsilon = 1e-16);
        let direct = fundamental_e_n(&[-0.8, -0.6, 0.5]).unwrap() - fundamental_e_n(&[-0.8, -0.6, 0.9]).unwrap();
        assert_relative_eq!(green_space(&a, &b).unwrap(), direct, epsilon = 1e-15);
    }

    #[test]
    fn poisson_values() {
        assert_relative_eq!(poisson_space(&[0.0, 0.0, 1.0], &[0.0, 0.0]).unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-16);
        let a = poisson_space(&[0.3, 0.1, 0.8], &[1.0, -2.0]).unwrap();
        let b = poisson_space(&[1.3, 2.1, 0.8], &[2.0, 0.0]).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-16);
        assert!(poisson_space(&[0.0, 0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn modified_poisson_forms_agree() {
        let x = [0.4, -0.3, 0.5];
        assert_eq!(poisson_space_mod(3, &x, &[0.3, 0.3]).unwrap(), poisson_space(&x, &[0.3, 0.3]).unwrap());
        assert_eq!(poisson_space_mod(0, &x, &[3.0, 0.3]).unwrap(), poisson_space(&x, &[3.0, 0.3]).unwrap());
        for m in 0..6 {
            for yp in [[1.5, 0.2], [-3.0, 2.0], [10.0, -20.0]] {
                let a = poisson_space_mod(m, &x, &yp).unwrap();
                let b = poisson_space_mod_series(m, &x, &yp).unwrap();
                assert!((a - b).abs() <= 1e-12 * poisson_space(&x, &yp).unwrap(), "m={m}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn modified_green_matches_e_mod_difference() {
        let x = [0.3, 0.2, -0.1, 0.6];
        let y = [1.5, -0.7, 0.4, 0.9];
        for m in 0..5 {
            let oracle = fundamental_e_mod_n(m + 1, &x, &y).unwrap() - fundamental_e_mod_n(m + 1, &x, &reflect(&y)).unwrap();
            assert!((green_space_mod(m, &x, &y).unwrap() - oracle).abs() < 1e-13);
        }
        // tail branch against the direct sum
        let y = [4.0, 2.0, -1.0, 3.0];
        for m in 0..5 {
            let oracle = fundamental_e_mod_n(m + 1, &x, &y).unwrap() - fundamental_e_mod_n(m + 1, &x, &reflect(&y)).unwrap();
            let g = green_space_mod(m, &x, &y).unwrap();
            assert!((g - oracle).abs() < 1e-13, "m={m}: {g} vs {oracle}");
        }
    }

    #[test]
    fn modified_green_spot_value() {
        // m = 1, n = 3: G plus r_3 (C_0 + |x|/|y| (C_1(t) - C_1(t*))) / |y|
        let x = [0.2, 0.1, 0.5];
        let y = [1.0, 0.8, 0.6];
        let r3 = 1.0 / (4.0 * PI);
        let (rx, ry) = (norm(&x), norm(&y));
        let t = dot(&x, &y) / (rx * ry);
        let ts = dot(&x, &reflect(&y)) / (rx * ry);
        let oracle = green_space(&x, &y).unwrap() + r3 / ry * (rx / ry) * (t - ts);
        assert_relative_eq!(green_space_mod(1, &x, &y).unwrap(), oracle, epsilon = 1e-15);
        assert_eq!(green_space_mod(2, &x, &[2.0, 1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(green_space_mod(2, &x, &[0.2, 0.1, 0.3]).unwrap(), green_space(&x, &[0.2, 0.1, 0.3]).unwrap());
    }

    #[test]
    fn modified_green_near_boundary_is_linear_in_heights() {
        // both branches: |x|/|y| = 2 and |x|/|y| = 1/4
        let cases: [(&[f64], &[f64]); 2] = [(&[-2000.0, -1000.0, 0.0, 0.0], &[1000.0, 500.0, 0.0, 0.0]), (&[-0.5, 0.2, 0.0], &[1.6, 0.9, 0.0])];
        for (xs, ys) in cases {
            let mut q = Vec::new();
            for h in [1e-3, 1e-6, 1e-9] {
                let (mut x, mut y) = (xs.to_vec(), ys.to_vec());
                *x.last_mut().unwrap() = h;
                *y.last_mut().unwrap() = 2.0 * h;
                q.push(green_space_mod(4, &x, &y).unwrap() / (2.0 * h * h));
            }
            assert!(q[0] != 0.0);
            assert!((q[1] - q[2]).abs() <= 1e-6 * q[2].abs(), "{q:?}");
            assert!((q[0] - q[2]).abs() <= 1e-2 * q[2].abs(), "{q:?}");
        }
    }

    #[test]
    fn i_integral_values() {
        assert_relative_eq!(i_integral(2, 0, 0.7, 0.3).unwrap(), 0.7, epsilon = 1e-14);
        let s: f64 = 1.3;
        assert_relative_eq!(i_integral(4, 0, s, 0.0).unwrap(), s + s.powi(3) / 3.0, epsilon = 1e-13);
        assert!(i_integral(3, 0, 1.0, 1.0).is_err());
        assert!(i_integral(3, 1, 0.5, 0.2).unwrap() < i_integral(3, 1, 0.6, 0.2).unwrap());
    }

    #[test]
    fn factorization_agrees_with_series() {
        let x = [0.3, -0.4, 0.5];
        let yp = [1.2, 0.6];
        for m in 0..5 {
            let a = poisson_mod_factored(m, &x, &yp).unwrap();
            let b = poisson_space_mod(m, &x, &yp).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300), "m={m}: {a} vs {b}");
        }
        assert!(poisson_mod_factored(1, &x, &[0.2, 0.1]).is_err());
    }

    fn laplacian(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
        let h = 1e-3 * norm(x);
        let mut acc = -2.0 * x.len() as f64 * f(x);
        for i in 0..x.len() {
            let mut p = x.to_vec();
            p[i] += h;
            acc += f(&p);
            p[i] -= 2.0 * h;
            acc += f(&p);
        }
        acc / (h * h)
    }

    #[test]
    fn kernels_are_harmonic() {
        for x in [vec![0.3, 0.2, 0.8], vec![0.3, -0.1, 0.2, 0.9]] {
            let n = x.len();
            let yp = vec![2.5; n - 1];
            let mut y = vec![-1.5; n];
            y[n - 1] = 1.2;
            for m in 0..4 {
                assert!(laplacian(|p| poisson_space_mod(m, p, &yp).unwrap(), &x).abs() < 1e-5);
                assert!(laplacian(|p| green_space_mod(m, p, &y).unwrap(), &x).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn explicit_bounds_hold() {
        for n in 3..=4 {
            for b in SpaceBound::ALL.iter().copied().filter(|b| b.is_explicit()) {
                let r = space_bound_check(b, n, 1000, 3).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for b in SpaceBound::ALL {
            assert_eq!(SpaceBound::from_name(b.name()).unwrap(), b);
        }
    }
}
