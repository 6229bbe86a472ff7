//! Scratch probe of the sub-barrier envelope around its seed cluster.

use ifl_core::dirichlet::BarrierSide;
use ifl_core::obstacle::{model_obstacles, obstacle_barriers};
use ifl_core::operator::{ifl_eval, Exponent, QuadratureConfig};

fn main() {
    let s = Exponent::new(0.75).unwrap();
    let pair = model_obstacles(1.0, 1.0, 1);
    let m_tilde = pair.coincidence_threshold(s);
    println!("m_tilde = {m_tilde}");
    let seeds: Vec<Vec<f64>> = [0.5, 1.0, 1.5].iter().map(|d| vec![-m_tilde - d]).collect();
    let p = obstacle_barriers(&pair, s, &seeds, BarrierSide::Sub).unwrap();
    for i in 0..40 {
        let t = -m_tilde - 4.0 + 8.0 * i as f64 / 39.0;
        let v = p.eval(&[t]);
        let g = p.gradient(&[t], 1e-6);
        println!("x = {t:9.4}  P+ = {v:12.8}  g = {:10.3e}  Gp = {:9.6}", g[0], pair.upper.eval(&[t]));
    }
    let quad = QuadratureConfig {
        tol: 1e-3,
        ..QuadratureConfig::default()
    };
    for t in [-78.11070331643369_f64, -78.8, -78.3, -77.8, -77.3, -76.9] {
        match ifl_eval(&p, &[t], s, &quad) {
            Ok(r) => println!("x = {t:9.4}  op = {:12.6}  err = {:9.2e}  branch = {:?}", r.value, r.err_est, r.branch),
            Err(e) => println!("x = {t:9.4}  err: {e:?}"),
        }
    }
}
