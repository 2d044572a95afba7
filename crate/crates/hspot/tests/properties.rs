use std::f64::consts::PI;

use hspot::dirichlet::DiscreteMeasure;
use hspot::growth::{default_lambda, exceptional_cover, maximal_function, GrowthExponent};
use hspot::identities::{determinant_dn_check, mobius_jacobian_check, MobiusMap};
use hspot::plane_kernels::{green_plane, green_plane_mod, poisson_plane, poisson_plane_mod, poisson_plane_mod_series};
use hspot::space_kernels::{
    green_space, green_space_mod, poisson_mod_factored, poisson_space, poisson_space_mod, poisson_space_mod_series,
};
use hspot::special::{gegenbauer_eval, gegenbauer_max, sphere_area, wallis, GegenbauerParam};
use hspot::Complex64;
use proptest::prelude::*;

fn upper_plane() -> impl Strategy<Value = Complex64> {
    (-20.0..20.0f64, 0.01..20.0f64).prop_map(|(x, y)| Complex64::new(x, y))
}

fn upper_space(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-10.0..10.0f64, n - 1), 0.01..10.0f64).prop_map(|(mut v, h)| {
        v.push(h);
        v
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn plane_poisson_positive_and_explicit(z in upper_plane(), t in -50.0..50.0f64) {
        let p = poisson_plane(z, t).unwrap();
        prop_assert!(p > 0.0);
        prop_assert!(close(p, z.im / (PI * ((z.re - t).powi(2) + z.im * z.im)), 1e-14));
    }

    #[test]
    fn plane_modified_matches_series(z in upper_plane(), t in 1.5..400.0f64, sign in prop::bool::ANY, m in 0usize..5) {
        let t = if sign { t } else { -t };
        let a = poisson_plane_mod(m, z, t).unwrap();
        let b = poisson_plane_mod_series(m, z, t).unwrap();
        let scale = poisson_plane(z, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * scale.max(a.abs()), "a={a} b={b}");
        let inside = poisson_plane_mod(m, z, 0.9 * t.signum()).unwrap();
        prop_assert_eq!(inside, poisson_plane(z, 0.9 * t.signum()).unwrap());
    }

    #[test]
    fn plane_green_symmetric_nonpositive(z in upper_plane(), w in upper_plane()) {
        prop_assume!((z - w).norm() > 1e-3);
        let a = green_plane(z, w).unwrap();
        prop_assert!(a <= 0.0);
        prop_assert!(close(a, green_plane(w, z).unwrap(), 1e-12));
        prop_assert_eq!(green_plane(Complex64::new(z.re, 0.0), w).unwrap(), 0.0);
    }

    #[test]
    fn plane_modified_green_vanishes_on_boundary(x in -30.0..30.0f64, w in upper_plane(), m in 0usize..5) {
        prop_assume!(w.norm() > 1.0);
        let v = green_plane_mod(m, Complex64::new(x, 0.0), w).unwrap();
        prop_assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn space_poisson_homogeneous(x in upper_space(3), yp in prop::collection::vec(-10.0..10.0f64, 2), k in 0.1..10.0f64) {
        let p = poisson_space(&x, &yp).unwrap();
        prop_assert!(p > 0.0);
        let xs: Vec<f64> = x.iter().map(|v| v * k).collect();
        let ys: Vec<f64> = yp.iter().map(|v| v * k).collect();
        prop_assert!(close(poisson_space(&xs, &ys).unwrap(), p / (k * k), 1e-12));
    }

    #[test]
    fn space_green_symmetric_nonpositive(x in upper_space(4), y in upper_space(4)) {
        let d: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assume!(d > 1e-3);
        let a = green_space(&x, &y).unwrap();
        prop_assert!(a <= 0.0);
        prop_assert!(close(a, green_space(&y, &x).unwrap(), 1e-12));
        let mut b = x.clone();
        b[3] = 0.0;
        prop_assert_eq!(green_space(&b, &y).unwrap(), 0.0);
    }

    #[test]
    fn space_modified_green_vanishes_on_boundary(x in upper_space(3), y in upper_space(3), m in 0usize..5) {
        let mut b = x.clone();
        b[2] = 0.0;
        let ny: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(ny > 1.0);
        prop_assert!(green_space_mod(m, &b, &y).unwrap().abs() < 1e-12);
    }

    #[test]
    fn space_modified_forms_agree(x in upper_space(3), yp in prop::collection::vec(-30.0..30.0f64, 2), m in 1usize..5) {
        let ry = (yp[0] * yp[0] + yp[1] * yp[1]).sqrt();
        let rx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(ry > 1.0 && rx / ry <= 0.9);
        let series = poisson_space_mod_series(m, &x, &yp).unwrap();
        let direct = poisson_space_mod(m, &x, &yp).unwrap();
        let factored = poisson_mod_factored(m, &x, &yp).unwrap();
        let scale = series.abs().max(1e-6 * poisson_space(&x, &yp).unwrap());
        prop_assert!((direct - series).abs() <= 1e-8 * scale.max(direct.abs()), "direct={direct} series={series}");
        prop_assert!((factored - series).abs() <= 1e-8 * scale.max(factored.abs()), "factored={factored} series={series}");
    }

    #[test]
    fn gegenbauer_bounded_by_value_at_one(lambda in 0.1..4.0f64, k in 0usize..30, t in -1.0..=1.0f64) {
        let p = GegenbauerParam::new(lambda, k).unwrap();
        let v = gegenbauer_eval(p, t).unwrap();
        let max = gegenbauer_max(p);
        prop_assert!(v.abs() <= max * (1.0 + 1e-12));
        let mirrored = gegenbauer_eval(p, -t).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((mirrored - sign * v).abs() <= 1e-12 * max.max(1.0));
    }

    #[test]
    fn mobius_jacobian_matches_fd(x in upper_space(4)) {
        let map = MobiusMap::new(4).unwrap();
        let r = mobius_jacobian_check(&map, &x, 1e-5).unwrap();
        prop_assert!(r.pass, "{r:?}");
        let u = map.apply(&x).unwrap();
        prop_assert!(u.iter().map(|v| v * v).sum::<f64>() < 1.0);
    }

    #[test]
    fn determinant_identity(x in prop::collection::vec(-5.0..5.0f64, 3..=5)) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let r = determinant_dn_check(&x).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn maximal_function_is_linear_in_mass(
        atoms in prop::collection::vec((upper_plane(), 0.1..5.0f64), 1..12),
        p in upper_plane(),
        c in 0.1..10.0f64,
        beta in 0.0..3.0f64,
    ) {
        let mu = DiscreteMeasure::new(atoms.clone()).unwrap();
        prop_assume!(atoms.iter().all(|(a, _)| (*a - p).norm() > 1e-6));
        let scaled = DiscreteMeasure::new(atoms.into_iter().map(|(a, m)| (a, c * m))).unwrap();
        let a = maximal_function(&mu, &p, beta).unwrap();
        prop_assert!(close(maximal_function(&scaled, &p, beta).unwrap(), c * a, 1e-12));
        prop_assert!(a >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cover_sum_within_bound(
        atoms in prop::collection::vec(((-200.0..200.0f64, 0.01..200.0f64), 0.1..3.0f64), 1..30),
        beta in 0.1..3.0f64,
        slack in 1.0..4.0f64,
    ) {
        let mu = DiscreteMeasure::new(atoms.into_iter().map(|((x, y), m)| (Complex64::new(x, y), m))).unwrap();
        let lambda = slack * default_lambda(beta, mu.total_mass()) / 2.0;
        let cover = exceptional_cover(&mu, beta, lambda).unwrap();
        prop_assert!(cover.weighted_sum <= cover.mass_bound, "{} > {}", cover.weighted_sum, cover.mass_bound);
        prop_assert!(cover.report().pass);
    }

    #[test]
    fn space_cover_sum_within_bound(
        atoms in prop::collection::vec((upper_space(3), 0.1..3.0f64), 1..20),
        beta in 0.1..4.0f64,
    ) {
        let mu = DiscreteMeasure::new(atoms).unwrap();
        let cover = exceptional_cover(&mu, beta, default_lambda(beta, mu.total_mass())).unwrap();
        prop_assert!(cover.weighted_sum <= cover.mass_bound);
    }

    #[test]
    fn p_one_denominator_collapses(m in 0usize..4, alpha in 0.1..2.0f64, h in 0.01..5.0f64, r in 1.0..1e4f64) {
        prop_assume!(h <= r);
        let basic = GrowthExponent::basic(2, m, alpha).unwrap();
        let general = GrowthExponent::new(2, 1.0, (m + 2) as f64, alpha, Some(m)).unwrap();
        prop_assert_eq!(basic.denominator(h, r), general.denominator(h, r));
        prop_assert!(close(basic.denominator(h, r), h.powf(1.0 - alpha) * r.powf(m as f64 + alpha), 1e-12));
    }
}

#[test]
fn wallis_and_sphere_recursions() {
    for n in 2..40u32 {
        assert!(close(wallis(n), (n - 1) as f64 / n as f64 * wallis(n - 2), 1e-14));
    }
    for n in 1..20usize {
        assert!(close(sphere_area(n + 2), 2.0 * PI * sphere_area(n) / n as f64, 1e-13));
    }
}
