//! Scratch probe: full comparison exhibit at a reduced sample count to
//! gauge runtime and outcomes before pinning the test configuration.

use ifl_core::counterexample::{
    build_geometry, comparison_exhibit, CertifyConfig, GeometryParams,
};
use ifl_core::operator::Exponent;
use std::time::Instant;

fn main() {
    let geom = build_geometry(GeometryParams::default()).unwrap();
    let s = Exponent::new(0.75).unwrap();
    let cfg = CertifyConfig {
        n_samples: 1000,
        n_sub_samples: 32,
        k_dir: 720,
        ..CertifyConfig::default()
    };
    let t0 = Instant::now();
    let ex = comparison_exhibit(&geom, s, &cfg).unwrap();
    println!("time = {:.2?}", t0.elapsed());
    println!(
        "zero: {}/{} certified, worst clearance {:.4}, worst sub {:.4}, worst free {:.2e}, refined {}",
        ex.zero.certified,
        ex.zero.samples,
        ex.zero.worst_clearance,
        ex.zero.worst_sub_value,
        ex.zero.worst_free_value,
        ex.zero.refined_samples
    );
    println!(
        "sub: eps_max = {:.5} (cap {:.5}, data floor {:.5}), worst residual {:.5}",
        ex.eps_max, ex.subsolution.eps_cap, ex.subsolution.data_floor, ex.subsolution.worst_residual
    );
    println!("strict gap = {:.5}", ex.strict_gap);
}
