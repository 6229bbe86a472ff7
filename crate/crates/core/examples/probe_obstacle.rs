//! Scratch probe for the model obstacle solve at the reference window
//! (not part of the test suite): timing, coincidence threshold,
//! involution defect, Lipschitz, detachment.

use ifl_core::dirichlet::ConeSpec;
use ifl_core::obstacle::{
    check_lipschitz, detachment_from_solution, find_coincidence_m, involution_defect,
    model_obstacles, solve_obstacle, uniform_linear_monotonicity, ContactSide, ObstacleConfig,
};
use ifl_core::operator::Exponent;
use std::time::Instant;

fn main() {
    let s = Exponent::new(0.75).unwrap();
    let pair = model_obstacles(1.0, 1.0, 1);
    let cfg = ObstacleConfig::default(); // window 20, h = 1/64
    let t0 = Instant::now();
    let sol = solve_obstacle(&pair, s, &cfg).unwrap();
    println!("solve time = {:.2?}, sweeps = {}", t0.elapsed(), sol.sweeps);
    println!("involution defect = {:.5} (2h = {:.5})", involution_defect(&sol), 2.0 * cfg.h);
    let m = find_coincidence_m(&sol);
    println!("coincidence M = {m:.4}");
    let cone = ConeSpec {
        theta: std::f64::consts::FRAC_PI_4,
    };
    let lip = check_lipschitz(&sol, &pair, &cone);
    println!("lip = {:?}", lip);
    let t1 = Instant::now();
    let slope_hi = detachment_from_solution(&sol, &pair, ContactSide::Upper, 2.0);
    let slope_lo = detachment_from_solution(&sol, &pair, ContactSide::Lower, 2.0);
    println!("detachment slopes = {slope_hi:?} {slope_lo:?} in {:.2?}", t1.elapsed());
    let mono = uniform_linear_monotonicity(&sol, m.min(5.0), &[1, 2]);
    println!(
        "uniform beta = {:.5}, pairs = {}, violations = {}",
        mono.beta,
        mono.pairs,
        mono.violations.len()
    );
    println!(
        "post = {:?}",
        sol.post.as_ref().map(|p| (
            p.pass,
            p.checked,
            p.skipped_unverifiable,
            p.worst_sub_excess,
            p.worst_super_excess
        ))
    );
    // window doubling stability
    let cfg2 = ObstacleConfig {
        window: 40.0,
        ..ObstacleConfig::default()
    };
    let t2 = Instant::now();
    let sol2 = solve_obstacle(&pair, s, &cfg2).unwrap();
    let m2 = find_coincidence_m(&sol2);
    println!(
        "doubled window M = {m2:.4} (|dM| = {:.5}, h = {:.5}) in {:.2?}",
        (m2 - m).abs(),
        cfg.h,
        t2.elapsed()
    );
}
