//! Gegenbauer polynomials, Wallis integrals and half-integer Gamma values.
//!
//! `C_k^λ(t)` is the coefficient of `r^k` in `(1 - 2tr + r²)^{-λ}`. Evaluation uses the
//! three-term recurrence; the value at `t = 1` uses a rational product.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::report::VerificationReport;

/// Highest degree accepted by the public evaluators.
pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerParam {
    lambda: f64,
    degree: usize,
}

impl GegenbauerParam {
    pub fn new(lambda: f64, degree: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("gegenbauer lambda must be positive, got {lambda}")));
        }
        if degree > MAX_DEGREE {
            return Err(Error::Capacity(format!("degree {degree} exceeds cap {MAX_DEGREE}")));
        }
        Ok(Self { lambda, degree })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t.abs() > 1.0 {
        return Err(domain(format!("gegenbauer argument must lie in [-1, 1], got {t}")));
    }
    Ok(())
}

/// `C_k^λ(t)` by recurrence, without range checks.
pub(crate) fn gegenbauer_raw(lambda: f64, k: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * t;
    for j in 2..=k {
        let jf = j as f64;
        let next = (2.0 * (jf + lambda - 1.0) * t * cur - (jf + 2.0 * lambda - 2.0) * prev) / jf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = C_k^λ(t)` for `k < out.len()`.
pub(crate) fn gegenbauer_fill(lambda: f64, t: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    out[0] = 1.0;
    if len == 1 {
        return;
    }
    out[1] = 2.0 * lambda * t;
    for j in 2..len {
        let jf = j as f64;
        out[j] = (2.0 * (jf + lambda - 1.0) * t * out[j - 1] - (jf + 2.0 * lambda - 2.0) * out[j - 2]) / jf;
    }
}

/// `C_k^λ(1)` as a rational product, without range checks.
pub(crate) fn gegenbauer_at_one(lambda: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (2.0 * lambda + j as f64) / (j as f64 + 1.0))
}

pub fn gegenbauer_eval(param: GegenbauerParam, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(gegenbauer_raw(param.lambda, param.degree, t))
}

/// `C_k^λ(1) = Γ(2λ+k)/(Γ(2λ)Γ(k+1))`, the maximum of `|C_k^λ|` on `[-1, 1]`.
pub fn gegenbauer_max(param: GegenbauerParam) -> f64 {
    gegenbauer_at_one(param.lambda, param.degree)
}

/// `d/dt C_k^λ(t) = 2λ C_{k-1}^{λ+1}(t)`.
pub fn gegenbauer_derivative(param: GegenbauerParam, t: f64) -> Result<f64> {
    if param.degree == 0 {
        return Err(domain("derivative identity needs degree >= 1"));
    }
    check_t(t)?;
    Ok(2.0 * param.lambda * gegenbauer_raw(param.lambda + 1.0, param.degree - 1, t))
}

/// Compares `Σ_{k≤K} C_k^λ(1) r^k` with `(1-r)^{-2λ}`; the tolerance is the geometric tail
/// bound plus a rounding allowance.
pub fn generating_sum_check(lambda: f64, r: f64, k_max: usize) -> Result<VerificationReport> {
    GegenbauerParam::new(lambda, k_max)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("generating sum needs 0 < r < 1, got {r}")));
    }
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..=k_max {
        if k > 0 {
            term *= (2.0 * lambda + (k - 1) as f64) / k as f64 * r;
        }
        sum += term;
    }
    let exact = (1.0 - r).powf(-2.0 * lambda);
    // successive term ratios (2λ+k)r/(k+1) are monotone in k, so the tail is geometric
    let k1 = (k_max + 1) as f64;
    let first_tail = term * (2.0 * lambda + k_max as f64) / k1 * r;
    let q = ((2.0 * lambda + k1) / (k1 + 1.0) * r).max(r);
    let tail = if q < 1.0 { first_tail / (1.0 - q) } else { f64::INFINITY };
    let rounding = 4.0 * (k_max as f64 + 1.0) * f64::EPSILON * exact;
    Ok(VerificationReport::compare(
        format!("generating-sum lambda={lambda} r={r} K={k_max}"),
        sum,
        exact,
        tail + rounding,
        "gegenbauer-generating-sum",
    ))
}

/// `|C_k^{(n-2)/2}(t) - C_k^{(n-2)/2}(t*)| <= (n-2) C_{k-1}^{n/2}(1) |t - t*|`.
pub fn lipschitz_bound_check(n: usize, k: usize, t: f64, t_star: f64) -> Result<VerificationReport> {
    if n < 3 {
        return Err(domain(format!("dimension must be at least 3, got {n}")));
    }
    if k == 0 {
        return Err(domain("lipschitz bound needs degree >= 1"));
    }
    let p = GegenbauerParam::new((n as f64 - 2.0) / 2.0, k)?;
    let lhs = (gegenbauer_eval(p, t)? - gegenbauer_eval(p, t_star)?).abs();
    let rhs = (n as f64 - 2.0) * gegenbauer_at_one(n as f64 / 2.0, k - 1) * (t - t_star).abs();
    Ok(VerificationReport::at_most(
        format!("gegenbauer-lipschitz n={n} k={k}"),
        lhs,
        rhs,
        1e-12 * (1.0 + rhs),
        "gegenbauer-lipschitz",
    ))
}

/// `I_n = ∫_0^{π/2} sin^n θ dθ`.
pub fn wallis(n: u32) -> f64 {
    let (mut value, start) = if n.is_multiple_of(2) { (PI / 2.0, 2) } else { (1.0, 3) };
    let mut j = start;
    while j <= n {
        value *= (j - 1) as f64 / j as f64;
        j += 2;
    }
    value
}

/// `Γ(m/2)` for a positive integer `m`.
pub fn gamma_half(m: u32) -> f64 {
    assert!(m > 0, "gamma_half needs a positive argument");
    let (mut value, mut x) = if m.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface area `ω_n = 2π^{n/2}/Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(lambda: f64, k: usize, t: f64) -> f64 {
        gegenbauer_eval(GegenbauerParam::new(lambda, k).unwrap(), t).unwrap()
    }

    #[test]
    fn degree_zero_is_one() {
        assert_eq!(c(1.5, 0, 0.3), 1.0);
    }

    #[test]
    fn degree_two_chebyshev_second_kind() {
        assert!(c(1.0, 2, 0.5).abs() < 1e-15);
        assert_relative_eq!(c(1.0, 2, 0.3), 4.0 * 0.09 - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn odd_parity() {
        for &u in &[0.1, 0.37, 0.9] {
            assert_relative_eq!(c(1.5, 3, -u), -c(1.5, 3, u), epsilon = 1e-15);
        }
    }

    #[test]
    fn legendre_case() {
        // λ = 1/2 gives Legendre P_3(t) = (5t³ - 3t)/2
        let t: f64 = 0.4;
        assert_relative_eq!(c(0.5, 3, t), (5.0 * t.powi(3) - 3.0 * t) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(GegenbauerParam::new(1.0, 65), Err(Error::Capacity(_))));
        assert!(GegenbauerParam::new(0.0, 2).is_err());
        let p = GegenbauerParam::new(1.0, 2).unwrap();
        assert!(matches!(gegenbauer_eval(p, 1.5), Err(Error::Domain(_))));
        let p0 = GegenbauerParam::new(1.0, 0).unwrap();
        assert!(gegenbauer_derivative(p0, 0.0).is_err());
    }

    #[test]
    fn max_values() {
        let m = |l, k| gegenbauer_max(GegenbauerParam::new(l, k).unwrap());
        assert_eq!(m(2.7, 0), 1.0);
        assert_relative_eq!(m(1.5, 2), 6.0, epsilon = 1e-14);
        assert_relative_eq!(m(1.0, 5), 6.0, epsilon = 1e-14);
        assert_relative_eq!(m(1.3, 7), c(1.3, 7, 1.0), max_relative = 1e-13);
    }

    #[test]
    fn derivative_values() {
        let d = |l, k, t| gegenbauer_derivative(GegenbauerParam::new(l, k).unwrap(), t).unwrap();
        assert_relative_eq!(d(1.0, 1, 0.0), 2.0);
        assert_eq!(d(1.5, 2, 0.0), 0.0);
        let h = 1e-5;
        let fd = (c(1.0, 3, 0.2 + h) - c(1.0, 3, 0.2 - h)) / (2.0 * h);
        assert_relative_eq!(d(1.0, 3, 0.2), fd, max_relative = 1e-6);
    }

    #[test]
    fn generating_sums() {
        let r = generating_sum_check(1.0, 0.5, 60).unwrap();
        assert!(r.pass && r.abs_err <= 1e-8 && r.rhs == 4.0);
        let r = generating_sum_check(1.5, 0.5, 60).unwrap();
        assert!(r.pass && (r.rhs - 8.0).abs() < 1e-12);
        let r = generating_sum_check(1.0, 1e-9, 0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(generating_sum_check(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn lipschitz_cases() {
        let r = lipschitz_bound_check(3, 2, 0.4, 0.4).unwrap();
        assert!(r.pass && r.lhs == 0.0 && r.rhs == 0.0);
        assert!(lipschitz_bound_check(3, 3, 1.0, -1.0).unwrap().pass);
    }

    #[test]
    fn wallis_table() {
        assert_relative_eq!(wallis(2), PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(wallis(3), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(wallis(1), 1.0);
        assert_relative_eq!(wallis(0), PI / 2.0);
        assert_relative_eq!(wallis(5), 8.0 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, epsilon = 1e-13);
        assert_relative_eq!(sphere_area(5), 8.0 * PI * PI / 3.0, epsilon = 1e-13);
        assert_relative_eq!(gamma_half(7), 15.0 * PI.sqrt() / 8.0, epsilon = 1e-14);
    }
}
