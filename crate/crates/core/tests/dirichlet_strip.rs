//! Strip Dirichlet solver against the classical closed-form solution of
//! the 1-D two-ray problem: with data 0 below and 1 above, the unique
//! bounded solution on (0,1) is the regularized incomplete beta function
//! I_x(s, s) (its derivative x^{s-1}(1-x)^{s-1} makes the symmetric
//! second-difference integral vanish at every interior point).

use ifl_core::dirichlet::{
    barrier_centers, c0_analytic, calibrate_c0, check_uniform_monotonicity, comparison_check,
    fit_boundary_exponents, fit_exponents_of, growth_barrier, growth_barrier_eps_bounds,
    paraboloid_envelope, solve_dirichlet, BarrierSide, DirichletConfig, GraphPrimitive, StripDomain,
    StripSpec,
};
use ifl_core::field::{self, Growth, ScalarField, C11};
use ifl_core::operator::{ifl_eval, Branch, Exponent, QuadratureConfig};

// ---------------------------------------------------------------------------
// Oracle: the regularized incomplete beta I_x(s,s) with the sin² substitution
// (the integrand 2 sin^{2s-1} cos^{2s-1} is smooth for s > 1/2).
// ---------------------------------------------------------------------------
fn beta_integral(phi1: f64, s: f64) -> f64 {
    // Grading substitution phi = phi1 * w^4 removes the phi^{2s-1}
    // endpoint singularity at 0, so composite Simpson converges at
    // full order (the upper endpoint stays below pi/4 because the
    // caller pivots x > 1/2 through the symmetry).
    let n = 2048usize;
    let d = 1.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let w = d * i as f64;
        let phi = phi1 * w * w * w * w;
        let wgt = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let jac = 4.0 * phi1 * w * w * w;
        acc += wgt * 2.0 * phi.sin().powf(2.0 * s - 1.0) * phi.cos().powf(2.0 * s - 1.0) * jac;
    }
    acc * d / 3.0
}

fn beta_cdf(x: f64, s: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x > 0.5 {
        return 1.0 - beta_cdf(1.0 - x, s);
    }
    let full = 2.0 * beta_integral(std::f64::consts::FRAC_PI_4, s);
    beta_integral(x.sqrt().asin(), s) / full
}

/// Closed-form solution as a ScalarField with analytic gradient and
/// per-point quadratic control away from the endpoints.
fn beta_field(s: f64) -> ScalarField {
    let bfull = 2.0 * beta_integral(std::f64::consts::FRAC_PI_4, s);
    ScalarField::new(1, Growth::Bounded { c0: 1.0 }, move |x: &[f64]| {
        beta_cdf(x[0], s)
    })
    .with_grad(move |x: &[f64]| {
        let t = x[0];
        if t > 0.0 && t < 1.0 {
            vec![t.powf(s - 1.0) * (1.0 - t).powf(s - 1.0) / bfull]
        } else {
            vec![0.0]
        }
    })
    .with_c11(move |x: &[f64]| {
        let t = x[0];
        if t <= 0.0 || t >= 1.0 {
            // flat outside; distance to the nearest jump point
            let gap = if t <= 0.0 { -t } else { t - 1.0 };
            if gap <= 0.0 {
                return None;
            }
            return Some(C11 { m: 0.0, eta0: gap });
        }
        let eta0 = 0.5 * t.min(1.0 - t);
        // |U''| = (1-s)|1-2t| t^{s-2}(1-t)^{s-2} / B; largest at the
        // endpoint of the probe interval nearest to a boundary.
        let u2 = |t: f64| -> f64 {
            (1.0 - s) * (1.0 - 2.0 * t).abs() * t.powf(s - 2.0) * (1.0 - t).powf(s - 2.0) / bfull
        };
        let m_loc = u2(t - eta0).max(u2(t + eta0)).max(u2(t));
        Some(C11 {
            m: 0.6 * m_loc + 1e-9,
            eta0,
        })
    })
}

fn flat_strip() -> StripDomain {
    StripDomain::build(&StripSpec {
        dim: 1,
        lower: GraphPrimitive::Flat { c: 0.0 },
        upper: GraphPrimitive::Flat { c: 1.0 },
    })
    .unwrap()
}

#[test]
fn oracle_is_annihilated_by_the_operator() {
    let quad = QuadratureConfig::default();
    for &s in &[0.6, 0.75, 0.9] {
        let sx = Exponent::new(s).unwrap();
        let u = beta_field(s);
        // sanity of the closed form
        assert!((u.eval(&[0.5]) - 0.5).abs() < 1e-10);
        assert!((u.eval(&[0.3]) + u.eval(&[0.7]) - 1.0).abs() < 1e-10);
        for &x in &[0.25, 0.4, 0.5, 0.6, 0.75] {
            let r = ifl_eval(&u, &[x], sx, &quad).unwrap();
            assert_eq!(r.branch, Branch::NonzeroGrad);
            assert!(
                r.value.abs() <= 5e-3,
                "beta solution s={s} at {x}: residual {:.3e}",
                r.value
            );
        }
    }
}

#[test]
fn solver_matches_beta_oracle() {
    let dom = flat_strip();
    let s = 0.75;
    let sx = Exponent::new(s).unwrap();
    let cfg = DirichletConfig {
        h: 1.0 / 64.0,
        ..DirichletConfig::default()
    };
    let sol = solve_dirichlet(&dom, sx, &cfg).unwrap();
    assert!(sol.post.as_ref().unwrap().pass);

    // Node-wise agreement with the closed form.
    let spec = &sol.table.spec;
    let mut worst = 0.0f64;
    for f in 0..spec.len() {
        let x = spec.point_of_flat(f);
        let diff = (sol.table.values[f] - beta_cdf(x[0], s)).abs();
        worst = worst.max(diff);
    }
    assert!(worst <= 0.02, "sup |U - beta| = {worst}");

    // Midpoint value and hard exterior data.
    assert!((sol.table.eval(&[0.5]) - 0.5).abs() <= 0.02);
    for f in 0..spec.len() {
        let x = spec.point_of_flat(f);
        if x[0] <= 0.0 {
            assert_eq!(sol.table.values[f], 0.0, "exterior below at {x:?}");
        }
        if x[0] >= 1.0 {
            assert_eq!(sol.table.values[f], 1.0, "exterior above at {x:?}");
        }
    }

    // The iteration never dips below its Perron floor.
    for f in 0..spec.len() {
        assert!(sol.table.values[f] >= sol.floor[f] - 1e-12);
    }

    // Monotone along the strip direction with a strictly positive
    // uniform-monotonicity constant at exponent 1+s.
    let rep = check_uniform_monotonicity(&sol, 1.0 + s, &[1, 2, 4]);
    assert!(rep.violations.is_empty(), "violations: {:?}", rep.violations);
    assert!(rep.beta > 0.0, "beta = {}", rep.beta);
    assert!(rep.pairs > 50);

    // Growth-barrier sandwich: g ≤ U ≤ 1 - g(mirrored).
    let (_, cap) = growth_barrier_eps_bounds(&dom, sx);
    let g = growth_barrier(&dom, sx, 0.5 * cap).unwrap();
    for f in 0..spec.len() {
        let x = spec.point_of_flat(f);
        if !dom.in_omega(&x) {
            continue;
        }
        let u = sol.table.values[f];
        let lo = g.eval(&x);
        let hi = 1.0 - 0.5 * cap * dom.dist_upper(&x).powf(s);
        assert!(u >= lo - 5e-3, "floor breach at {x:?}: {u} < {lo}");
        assert!(u <= hi + 5e-3, "ceiling breach at {x:?}: {u} > {hi}");
    }

    // Boundary exponent close to s.  At this coarse resolution the fit
    // window [2h, 0.1m] holds only four bands and the lowest band sits one
    // jump from exit, where the discrete value carries O(1) relative bias;
    // the tight +-0.1 band is asserted at h = 1/128 in the acceptance
    // suite, and here we require the looser 0.15.
    let (sigma_minus, sigma_interior) = fit_boundary_exponents(&sol).unwrap();
    assert!(
        (sigma_minus - s).abs() <= 0.15,
        "boundary exponent {sigma_minus} vs {s}"
    );
    assert!(sigma_interior.is_finite() && sigma_interior > 0.0 && sigma_interior < 1.2);

    // Mesh stability: a coarser solve agrees on shared nodes.
    let cfg2 = DirichletConfig {
        h: 1.0 / 32.0,
        ..DirichletConfig::default()
    };
    let sol2 = solve_dirichlet(&dom, sx, &cfg2).unwrap();
    let mut gap = 0.0f64;
    for f in 0..sol2.table.spec.len() {
        let x = sol2.table.spec.point_of_flat(f);
        if dom.in_omega(&x) {
            gap = gap.max((sol2.table.eval(&x) - sol.table.eval(&x)).abs());
        }
    }
    assert!(gap <= 0.02, "coarse/fine disagreement {gap}");
}

#[test]
fn exponent_fitter_recovers_closed_forms() {
    let dom = flat_strip();
    let h = 1.0 / 256.0;
    for &s in &[0.6, 0.75, 0.9] {
        let u = field::half_profile(1, s).unwrap();
        let (sig, _) = fit_exponents_of(&u, &dom, h).unwrap();
        assert!((sig - s).abs() <= 0.02, "one-sided root fit {sig} vs {s}");
    }
    let lin = field::affine(vec![1.0], 0.0);
    let (sig, sig_int) = fit_exponents_of(&lin, &dom, h).unwrap();
    assert!((sig - 1.0).abs() <= 0.02, "linear boundary fit {sig}");
    assert!((sig_int - 1.0).abs() <= 0.02, "linear interior fit {sig_int}");
}

#[test]
fn barrier_budget_and_ordering() {
    let dom = flat_strip();
    let s = 0.75;
    let sx = Exponent::new(s).unwrap();
    let quad = QuadratureConfig::default();

    // The numeric calibration must admit at least the analytic budget.
    let rep = calibrate_c0(&dom, sx, &quad).unwrap();
    assert!(rep.analytic > 0.0);
    assert!(
        rep.calibrated >= 0.99 * rep.analytic,
        "calibrated {} below analytic {}",
        rep.calibrated,
        rep.analytic
    );

    // Build both barrier envelopes at the same depth and verify ordering
    // plus one-sided residual gates via the comparison harness.
    let c0 = 0.9 * c0_analytic(&dom, sx);
    let t0 = 0.5 * dom.big_m;
    let r0 = dom.c_theta * t0;
    let a = c0 * r0.powf(2.0 * s - 2.0);
    let plus = paraboloid_envelope(
        &dom,
        sx,
        &barrier_centers(&dom, t0, BarrierSide::Sub, 1),
        a,
        t0,
        c0,
        BarrierSide::Sub,
    )
    .unwrap();
    let minus = paraboloid_envelope(
        &dom,
        sx,
        &barrier_centers(&dom, t0, BarrierSide::Super, 1),
        a,
        t0,
        c0,
        BarrierSide::Super,
    )
    .unwrap();
    let interior: Vec<Vec<f64>> = (1..20).map(|k| vec![k as f64 / 20.0]).collect();
    let exterior: Vec<Vec<f64>> = vec![vec![-0.3], vec![-0.01], vec![1.01], vec![1.3]];
    let rep = comparison_check(&plus, &minus, sx, &interior, &exterior, &quad, 1e-9).unwrap();
    assert!(rep.ordered, "witness: {:?}", rep.witness);
    assert!(rep.residuals_checked > 0);
}

#[test]
fn sinusoidal_strip_solves_monotone() {
    let spec = StripSpec {
        dim: 2,
        lower: GraphPrimitive::Sinusoidal {
            a: 0.1,
            omega: 2.0 * std::f64::consts::PI,
            c: 0.0,
        },
        upper: GraphPrimitive::Sinusoidal {
            a: -0.1,
            omega: 2.0 * std::f64::consts::PI,
            c: 1.1,
        },
    };
    let dom = StripDomain::build(&spec).unwrap();
    assert!(dom.m > 0.8 && dom.big_m < 1.4);
    assert!(dom.theta > 0.0 && dom.theta < std::f64::consts::FRAC_PI_2);

    let s = 0.75;
    let sx = Exponent::new(s).unwrap();
    let cfg = DirichletConfig {
        h: 1.0 / 12.0,
        k_dir: 8,
        tol: 1e-4,
        post_check: false,
        ..DirichletConfig::default()
    };
    let sol = solve_dirichlet(&dom, sx, &cfg).unwrap();

    // No cone-monotonicity violations; a strictly positive beta at 1+s.
    let rep = check_uniform_monotonicity(&sol, 1.0 + s, &[1, 2]);
    assert!(rep.violations.is_empty(), "violations: {:?}", rep.violations);
    assert!(rep.beta > 0.0, "beta = {}", rep.beta);

    // Barrier sandwich on the grid.
    let (_, cap) = growth_barrier_eps_bounds(&dom, sx);
    let g = growth_barrier(&dom, sx, 0.5 * cap).unwrap();
    let spec = &sol.table.spec;
    for f in 0..spec.len() {
        let x = spec.point_of_flat(f);
        if !dom.in_omega(&x) {
            continue;
        }
        let u = sol.table.values[f];
        assert!(u >= g.eval(&x) - 2e-2);
        assert!(u <= 1.0 - 0.5 * cap * dom.dist_upper(&x).powf(s) + 2e-2);
    }
}
