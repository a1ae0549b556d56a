use qwot::linalg::{default_cluster_tol, eigh};
use qwot::quantum::random_observable;
use std::time::Instant;

fn main() {
    let a = random_observable(9, 1);
    let t0 = Instant::now();
    let mut acc = 0.0;
    for _ in 0..20000 {
        let d = eigh(&a, default_cluster_tol(&a)).unwrap();
        acc += d.eigenvalues[0];
    }
    println!("eigh 9x9: {:.1?}/call (acc {acc:.3})", t0.elapsed() / 20000);
    let t0 = Instant::now();
    let mut acc2 = 0.0;
    for _ in 0..20000 {
        let d = eigh(&a, default_cluster_tol(&a)).unwrap();
        acc2 += d.assemble(&d.eigenvalues).max_abs();
    }
    println!("eigh+assemble: {:.1?}/call (acc {acc2:.3})", t0.elapsed() / 20000);
}
