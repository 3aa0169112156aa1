use sharp_interface_lab::potential::{Potential, RampKind};
use sharp_interface_lab::target_manifold::ManifoldPair;
use sharp_interface_lab::profile_1d::*;
use std::time::Instant;

fn main() {
    // non-minimal endpoints on the spheres config: p+ = top pole (2,1), p- = (-1,0)
    let m = ManifoldPair::two_spheres(vec![2.0, 0.0], 1.0, vec![-2.0, 0.0], 1.0).unwrap();
    let pot = Potential::new(m, 1.0, RampKind::Cubic).unwrap();
    let table = build_profile(&pot).unwrap();
    let cf = compute_cf(&pot).unwrap();
    let s_half = default_s_half(&table);
    println!("c_F = {cf}, s_max = {}, s_half = {s_half}", table.s_max);
    for (name, rel) in [("fire", Relaxer::Fire), ("gd", Relaxer::GradientDescent)] {
        let t0 = Instant::now();
        match minimal_connection(&pot, &table, &[2.0, 1.0], &[-1.0, 0.0], 2001, s_half, rel) {
            Ok(r) => println!(
                "{name}: action = {:.12} (margin {:.6e}) iters = {} in {:.2}s",
                r.action, r.action - cf, r.iterations, t0.elapsed().as_secs_f64()
            ),
            Err(e) => println!("{name}: FAILED after {:.2}s: {e}", t0.elapsed().as_secs_f64()),
        }
    }
}
