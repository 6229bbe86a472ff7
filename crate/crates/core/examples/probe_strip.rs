//! Scratch probe for the fine-resolution strip solve (not part of the test
//! suite): prints midpoint value, fitted exponents, seminorm ratio, timing.

use ifl_core::dirichlet::{
    fit_boundary_exponents, solve_dirichlet, DirichletConfig, GraphPrimitive, StripDomain,
    StripSpec,
};
use ifl_core::harness::holder_seminorm;
use ifl_core::operator::Exponent;
use std::time::Instant;

fn main() {
    let s = 0.75;
    let sx = Exponent::new(s).unwrap();
    let dom = StripDomain::build(&StripSpec {
        dim: 1,
        lower: GraphPrimitive::Flat { c: 0.0 },
        upper: GraphPrimitive::Flat { c: 1.0 },
    })
    .unwrap();
    let h = 1.0 / 128.0;
    let cfg = DirichletConfig {
        h,
        ..DirichletConfig::default()
    };
    let t0 = Instant::now();
    let sol = solve_dirichlet(&dom, sx, &cfg).unwrap();
    let dt = t0.elapsed();
    let interp = sol.interpolant();
    let mid = interp.eval(&[0.5]);
    let (sm, si) = fit_boundary_exponents(&sol).unwrap();
    let gamma = 2.0 * s - 1.0;
    let est = holder_seminorm(&interp, gamma, &[0.0], &[1.0], 20_000, 7).unwrap();
    println!("time  = {:.2?}", dt);
    println!("mid   = {mid:.6}  (target 0.5 +- 0.02)");
    println!("sigma_minus    = {sm:.4}  (target [0.65, 0.85])");
    println!("sigma_interior = {si:.4}  (2s-1 = {gamma:.2})");
    println!("holder seminorm = {:.4}", est.seminorm);
    println!(
        "post = {:?}",
        sol.post
            .as_ref()
            .map(|p| (p.pass, p.checked, p.skipped_unverifiable, p.worst_abs, p.tol))
    );
}
