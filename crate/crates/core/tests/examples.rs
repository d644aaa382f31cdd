//! Worked examples with frozen expected values, exercised through the public
//! API.

use approx::assert_abs_diff_eq;
use realshadow_core::entropy::{
    bowen_ball_contains, metric_entropy, plane_metric_entropy, topological_entropy, BowenBallSpec,
};
use realshadow_core::measure::{
    brolin_sample, default_test_functions, inverse_images, invariance_discrepancy, pushforward_shadow, ShadowSample,
};
use realshadow_core::mirrors::{estimate_n, find_mirrors, green_level_diagnostic, line_image_count, mirror_breaks, LineImage, MirrorSet};
use realshadow_core::orbits::{check_growth_bound, escape_constants, iterate, shadow, shadow_shift};
use realshadow_core::potential::{boettcher, Boettcher, external_ray, green, ray_angle, GREEN_BUDGET};
use realshadow_core::{Complex, Error, ExceptionalKind, Polynomial, RealAffineMap, DEFAULT_TOL};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn sq() -> Polynomial {
    Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap()
}

fn cheb() -> Polynomial {
    Polynomial::from_real(&[-2.0, 0.0, 1.0]).unwrap()
}

fn strong() -> Polynomial {
    Polynomial::new(vec![c(0.0, 10.0), c(0.0, 0.0), c(0.0, -1.0)]).unwrap()
}

fn collapsing() -> Polynomial {
    Polynomial::new(vec![c(0.0, -10.0), c(0.0, 0.0), c(0.0, -1.0)]).unwrap()
}

#[test]
fn evaluation() {
    assert_eq!(sq().eval(c(1.0, 1.0)).unwrap(), c(0.0, 2.0));
    assert_eq!(cheb().eval(c(0.0, 0.0)).unwrap(), c(-2.0, 0.0));
    for y in [-3.0, -0.5, 0.0, 1.25, 7.0] {
        let w = strong().eval(c(0.0, y)).unwrap();
        assert_abs_diff_eq!(w.re, 0.0);
        assert_abs_diff_eq!(w.im, y * y + 10.0, epsilon = 1e-12);
    }
    assert!(sq().eval(c(1e200, 0.0)).is_err());
}

#[test]
fn conjugation_and_normal_form() {
    let half = sq().conjugate(&RealAffineMap::new(2.0, 0.0).unwrap());
    assert_eq!(half.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
    let p = Polynomial::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(0.0, 1.0)]).unwrap();
    assert_eq!(p.conjugate(&RealAffineMap::IDENTITY), p);

    let (n, m) = Polynomial::from_real(&[0.0, 4.0, 4.0]).unwrap().normalize();
    assert_eq!((m.a, m.b), (4.0, 2.0));
    assert_abs_diff_eq!(n.coeffs()[0].re, -2.0, epsilon = 1e-14);
    let (n, m) = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap().normalize();
    assert_eq!(m, RealAffineMap::IDENTITY);
    assert_eq!(n.coeffs()[3], c(1.0, 0.0));
    let (n, m) = Polynomial::from_real(&[0.0, 0.0, 2.0]).unwrap().normalize();
    assert_eq!((m.a, m.b), (2.0, 0.0));
    assert_eq!(n.leading(), c(1.0, 0.0));
}

#[test]
fn classification() {
    assert_eq!(strong().classify(DEFAULT_TOL).unwrap().kind, ExceptionalKind::StronglyExceptional);
    assert_eq!(sq().classify(DEFAULT_TOL).unwrap().kind, ExceptionalKind::NonExceptional);
    let weak = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
    assert_eq!(weak.classify(DEFAULT_TOL).unwrap().kind, ExceptionalKind::WeaklyExceptional);
    // A residual of 1.5 tol sits in the ambiguous band.
    let edge = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.5e-9, 1.0)]).unwrap();
    assert!(matches!(edge.classify(DEFAULT_TOL), Err(Error::AmbiguousClassification { .. })));
}

#[test]
fn iteration() {
    let r = iterate(&sq(), c(1.0, 0.0), 10, 4.0).unwrap();
    assert!(!r.escaped && r.points.iter().all(|z| *z == c(1.0, 0.0)));
    let r = iterate(&sq(), c(2.0, 0.0), 10, 4.0).unwrap();
    assert_eq!(r.escape_index, Some(2));
    assert_eq!(r.points, vec![c(2.0, 0.0), c(4.0, 0.0), c(16.0, 0.0)]);
    let r = iterate(&cheb(), c(1.5, 0.0), 200, 4.0).unwrap();
    assert!(!r.escaped && r.points.iter().all(|z| z.re.abs() <= 2.0 && z.im == 0.0));
}

#[test]
fn escape_constants_examples() {
    let k = escape_constants(&sq()).unwrap();
    assert_eq!((k.a, k.b), (-1.0, 0.0));
    assert_abs_diff_eq!(k.eta, 0.1123724, epsilon = 1e-6);
    assert_abs_diff_eq!(k.sigma, 0.1010205, epsilon = 1e-6);
    assert_eq!(escape_constants(&Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap()), Err(Error::NotNonExceptional));
    for a0 in [c(-2.0, 0.0), c(0.25, 0.7), c(3.0, -4.0)] {
        let p = Polynomial::new(vec![a0, c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(escape_constants(&p).unwrap().a, -1.0);
    }
    assert!(check_growth_bound(&sq(), &k, c(10.0, 0.0)).unwrap());
    assert!(check_growth_bound(&sq(), &k, c(k.r_double_prime, 0.0)).unwrap());
    assert!(matches!(check_growth_bound(&sq(), &k, c(0.5 * k.r_double_prime, 0.0)), Err(Error::PreconditionViolated(_))));
}

#[test]
fn shadows_and_shift() {
    assert_eq!(shadow(&sq(), c(1.0, 0.0), 3).unwrap().xs, vec![1.0, 1.0, 1.0, 1.0]);
    let s = shadow(&sq(), c(0.0, 1.0), 3).unwrap();
    assert_eq!(s.xs, vec![0.0, -1.0, 1.0, 1.0]);
    assert_eq!(shadow(&cheb(), c(2.0, 0.0), 2).unwrap().xs, vec![2.0, 2.0, 2.0]);
    assert_eq!(shadow_shift(&sq(), &s).unwrap().xs, vec![-1.0, 1.0, 1.0, 1.0]);
    let one = shadow(&sq(), c(1.0, 0.0), 3).unwrap();
    assert_eq!(shadow_shift(&sq(), &one).unwrap().xs, one.xs);
    assert!(matches!(shadow(&sq(), c(1e60, 0.0), 3), Err(Error::Escaped { .. })));
}

#[test]
fn green_values() {
    assert_abs_diff_eq!(green(&sq(), c(2.0, 0.0), GREEN_BUDGET).unwrap().g, 2f64.ln(), epsilon = 1e-12);
    assert_eq!(green(&sq(), c(0.5, 0.0), GREEN_BUDGET).unwrap().g, 0.0);
    let g = green(&cheb(), c(3.0, 0.0), GREEN_BUDGET).unwrap();
    assert!(g.converged);
    assert_abs_diff_eq!(g.g, ((3.0 + 5f64.sqrt()) / 2.0).ln(), epsilon = 1e-12);
    assert_abs_diff_eq!(g.g, 0.9624237, epsilon = 1e-7);
}

#[test]
fn boettcher_values() {
    for z in [c(1.5, 0.3), c(-4.0, 2.0), c(0.0, 9.0)] {
        assert!((boettcher(&sq(), z).unwrap() - z).norm() < 1e-12 * z.norm());
    }
    let w = boettcher(&cheb(), c(3.0, 0.0)).unwrap();
    assert_abs_diff_eq!(w.re, (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-10);
    assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-10);
    assert!(matches!(boettcher(&cheb(), c(0.5, 0.0)), Err(Error::OutsideDomain { .. })));
}

#[test]
fn rays_and_angles() {
    let ray = external_ray(&sq(), 0.0, 2.0, 0.1, 40).unwrap();
    assert!(ray.iter().all(|p| p.z.re > 0.0 && p.z.im.abs() < 1e-10));
    assert!(ray.windows(2).all(|w| w[1].potential < w[0].potential));
    let ray = external_ray(&sq(), 0.25, 2.0, 0.1, 40).unwrap();
    assert!(ray.iter().all(|p| p.z.im > 0.0 && p.z.re.abs() < 1e-10));

    let ray = external_ray(&cheb(), 0.0, 2.0, 0.01, 200).unwrap();
    let last = ray.last().unwrap().z;
    assert!(ray.iter().all(|p| p.z.im.abs() < 1e-8 && p.z.re > 2.0));
    assert!((last - c(2.0, 0.0)).norm() < 0.05);

    assert_abs_diff_eq!(ray_angle(&sq(), c(0.0, 3.0)).unwrap(), 0.25, epsilon = 1e-15);
    assert_abs_diff_eq!(ray_angle(&sq(), c(-5.0, 0.0)).unwrap(), 0.5, epsilon = 1e-15);
    let level = Boettcher::new(&cheb()).unwrap().level();
    for p in external_ray(&cheb(), 0.25, 2.0, 0.05, 100).unwrap() {
        assert_eq!(p.theta, 0.25);
        // Below the domain level, push forward until the angle is defined.
        let (mut z, mut theta, mut g) = (p.z, 0.25f64, p.potential);
        while g <= level {
            z = cheb().eval_unchecked(z);
            theta = (2.0 * theta).fract();
            g *= 2.0;
        }
        let gap = (ray_angle(&cheb(), z).unwrap() - theta + 0.5).rem_euclid(1.0) - 0.5;
        assert!(gap.abs() < 1e-8, "angle gap {gap} at potential {}", p.potential);
    }
}

#[test]
fn preimages() {
    let mut r = inverse_images(&sq(), c(4.0, 0.0)).unwrap();
    r.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-14 && (r[1] - c(2.0, 0.0)).norm() < 1e-14);
    assert!(inverse_images(&cheb(), c(-2.0, 0.0)).unwrap().iter().all(|w| w.norm() < 1e-12));
    let r = inverse_images(&Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap(), c(8.0, 0.0)).unwrap();
    for k in 0..3 {
        let want = Complex::from_polar(2.0, std::f64::consts::TAU * k as f64 / 3.0);
        assert!(r.iter().any(|w| (w - want).norm() < 1e-12));
    }
}

#[test]
fn brolin_examples() {
    let s = brolin_sample(&sq(), 10_000, 40, 11).unwrap();
    assert!(s.points.iter().all(|z| (z.norm() - 1.0).abs() < 1e-6));
    let sh = pushforward_shadow(&sq(), &s, 3).unwrap();
    assert!(sh.shadows.iter().all(|v| v.xs.iter().all(|x| x.abs() <= 1.0 + 1e-9)));
    for (v, &z) in sh.shadows.iter().zip(&s.points) {
        assert_eq!(shadow_shift(&sq(), v).unwrap().xs, shadow(&sq(), sq().eval_unchecked(z), 3).unwrap().xs);
    }

    let s = brolin_sample(&collapsing(), 10_000, 40, 11).unwrap();
    assert!(s.points.iter().all(|z| z.re.abs() < 1e-6));
    let sh = pushforward_shadow(&collapsing(), &s, 2).unwrap();
    assert!(sh.shadows.iter().all(|v| v.xs.iter().all(|x| x.abs() < 1e-5)));
}

#[test]
fn invariance_examples() {
    for p in [sq(), cheb()] {
        let s = brolin_sample(&p, 100_000, 40, 12).unwrap();
        assert!(invariance_discrepancy(&p, &s.points, &default_test_functions(&s.points)).unwrap() < 0.01);
    }
}

#[test]
fn invariance_discrepancy_shrinks_like_inverse_root() {
    // Averaged over seeds: a 4x larger sample should halve the discrepancy.
    let p = Polynomial::new(vec![c(-0.5, 0.3), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let mean = |count: usize| {
        (0..16u64)
            .map(|seed| {
                let s = brolin_sample(&p, count, 40, 100 + seed).unwrap();
                invariance_discrepancy(&p, &s.points, &default_test_functions(&s.points)).unwrap()
            })
            .sum::<f64>()
            / 16.0
    };
    let ratio = mean(2_000) / mean(8_000);
    assert!((1.3..=3.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn sample_lies_on_julia_set() {
    let basilica = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
    let s = brolin_sample(&basilica, 2_000, 40, 13).unwrap();
    assert!(s.points.iter().all(|&z| green(&basilica, z, GREEN_BUDGET).unwrap().g < 1e-6));
}

#[test]
fn line_counts() {
    assert_eq!(line_image_count(&strong(), 0.0, 0.0, DEFAULT_TOL).unwrap(), LineImage::Invariant);
    assert_eq!(line_image_count(&sq(), 1.0, 1.0, DEFAULT_TOL).unwrap(), LineImage::Count(2));
    assert_eq!(line_image_count(&sq(), 0.0, -4.0, DEFAULT_TOL).unwrap(), LineImage::Count(2));
}

#[test]
fn mirror_examples() {
    let m = find_mirrors(&cheb(), c(1.0, 1.0), 6, DEFAULT_TOL).unwrap();
    assert_eq!(m.mirrors.len(), 1);
    assert!((m.mirrors[0] - c(1.0, -1.0)).norm() < 1e-12);
    let p = Polynomial::new(vec![c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    for z in [c(0.3, 0.2), c(-0.7, 1.1), c(1.4, -0.6)] {
        assert!(find_mirrors(&p, z, 6, DEFAULT_TOL).unwrap().mirrors.len() <= 3);
    }
    assert!(find_mirrors(&sq(), c(0.5, 0.0), 6, DEFAULT_TOL).unwrap().mirrors.is_empty());
    assert_eq!(find_mirrors(&strong(), c(0.0, 0.7), 4, DEFAULT_TOL), Err(Error::InvariantLine));
}

#[test]
fn break_examples() {
    assert_eq!(mirror_breaks(&sq(), c(0.0, 1.0), c(0.0, -1.0), 10, 1e-12).unwrap().break_index, Some(1));
    assert_eq!(mirror_breaks(&cheb(), c(1.0, 1.0), c(1.0, -1.0), 20, 1e-12).unwrap().break_index, None);
    assert!(matches!(mirror_breaks(&sq(), c(0.3, 1.0), c(0.3, 1.0), 10, 1e-12), Err(Error::PreconditionViolated(_))));
}

#[test]
fn green_level_examples() {
    let pair = |base: Complex| MirrorSet { base, mirrors: vec![base.conj()], depth_verified: 6, tol: DEFAULT_TOL };
    assert!(green_level_diagnostic(&cheb(), &pair(c(3.0, 4.0))).unwrap() < 1e-9);
    assert!(green_level_diagnostic(&sq(), &pair(c(2.0, 1.0))).unwrap() < 1e-9);
    assert_eq!(green_level_diagnostic(&sq(), &pair(c(0.2, 0.1))), Err(Error::NotEscaping));
}

#[test]
fn n_estimates() {
    for p in [sq(), cheb()] {
        let e = estimate_n(&p, 200, 12, DEFAULT_TOL, 1).unwrap();
        assert_eq!((e.n, e.not_stabilized), (1, false));
    }
    let p = Polynomial::new(vec![c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let e = estimate_n(&p, 200, 12, DEFAULT_TOL, 1).unwrap();
    assert!(e.n <= 3 && !e.not_stabilized);
}

#[test]
fn bowen_ball_examples() {
    let one = shadow(&sq(), c(1.0, 0.0), 2).unwrap();
    let minus = shadow(&sq(), c(-1.0, 0.0), 2).unwrap();
    let ball = |center: &realshadow_core::orbits::ShadowPoint, epsilon, n| BowenBallSpec { center: center.clone(), epsilon, n };
    assert!(bowen_ball_contains(&sq(), &ball(&one, 1e-3, 5), &one).unwrap());
    assert!(!bowen_ball_contains(&sq(), &ball(&one, 0.5, 2), &minus).unwrap());
    let shifted = shadow_shift(&sq(), &one).unwrap();
    assert!(bowen_ball_contains(&sq(), &ball(&shifted, 0.5, 2), &shadow_shift(&sq(), &minus).unwrap()).unwrap());
    let s = pushforward_shadow(&sq(), &brolin_sample(&sq(), 200, 40, 14).unwrap(), 2).unwrap();
    assert!(s.shadows.iter().all(|y| bowen_ball_contains(&sq(), &ball(&s.shadows[0], 2.5, 6), y).unwrap()));
}

#[test]
fn degenerate_and_atomic_entropy() {
    let s = pushforward_shadow(&sq(), &brolin_sample(&sq(), 500, 40, 15).unwrap(), 2).unwrap();
    let e = topological_entropy(&sq(), &s, &[0.5, 0.25], 1).unwrap();
    assert!(e.degenerate && e.value == 0.0);
    let atom = ShadowSample { shadows: vec![s.shadows[0].clone(); 200], depth: 2 };
    assert_eq!(metric_entropy(&sq(), &atom, &[0.5, 0.25], 8, 20, 1).unwrap().value, 0.0);
}

#[test]
fn shadow_entropy_does_not_exceed_plane_entropy() {
    let eps = [1.0, 0.5, 0.25, 0.125, 0.0625];
    let p = Polynomial::new(vec![c(-0.4, 0.3), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let s = brolin_sample(&p, 20_000, 40, 16).unwrap();
    let shadows = pushforward_shadow(&p, &s, 2).unwrap();
    let h_shadow = metric_entropy(&p, &shadows, &eps, 10, 100, 1).unwrap().value;
    let h_plane = plane_metric_entropy(&p, &s, &eps, 10, 100, 1).unwrap().value;
    assert!(h_shadow <= h_plane + 0.1, "shadow {h_shadow} plane {h_plane}");
}
