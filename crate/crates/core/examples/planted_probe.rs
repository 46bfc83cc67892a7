use proxyhash_core::itq::{itq_rotation, rotated_l1_mass};
use proxyhash_core::proxy::{random_binary_proxies, ProxyKind, ProxySet};
use proxyhash_core::rng::{derive_seed, random_orthogonal, rng_from_seed};
use proxyhash_core::tammes::{solve_tammes, TammesConfig};
use std::time::Instant;

fn main() {
    for (d, c, trials) in [(16usize, 32usize, 100u64), (8, 16, 50), (16, 64, 20), (24, 48, 20)] {
        let target = c as f64 * (d as f64).sqrt();
        let mut hits = 0;
        let mut worst: f64 = 0.0;
        let t0 = Instant::now();
        for trial in 0..trials {
            let mut rng = rng_from_seed(derive_seed(1000 + d as u64, trial));
            let r = random_orthogonal(&mut rng, d);
            let b = random_binary_proxies(c, d, derive_seed(2000 + c as u64, trial)).unwrap();
            let w = &r * (b.columns() / (d as f64).sqrt());
            let p = ProxySet::new(w, ProxyKind::Random, 1.0).unwrap();
            let (gamma, _) = itq_rotation(&p, 300, 8, derive_seed(3000, trial)).unwrap();
            if (target - rotated_l1_mass(&gamma, &p)).abs() < 1e-6 { hits += 1; }
            else { worst = worst.max((target - rotated_l1_mass(&gamma, &p)).abs()); }
        }
        println!("planted d={d} C={c}: {hits}/{trials} ({:?} total, worst miss {worst:.3})", t0.elapsed());
    }
    // non-planted input must not be slowed by the frame phase
    let sol = solve_tammes(32, 16, &TammesConfig::with_seed(5)).unwrap();
    let t0 = Instant::now();
    let _ = itq_rotation(&sol.proxies, 200, 8, 0).unwrap();
    println!("tammes C=32 d=16 align: {:?}", t0.elapsed());
}
