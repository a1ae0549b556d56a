use qwot::cost::cost_operator;
use qwot::wasserstein::{negative_bracket_instance, transport_value_with_cost, SolverConfig};
use std::time::Instant;

fn main() {
    let (rho, omega, coll, p) = negative_bracket_instance();
    let cost = cost_operator(&coll, p).unwrap();
    let config = SolverConfig::default().with_tol(1e-9).with_max_iters(400_000);
    let t0 = Instant::now();
    let cross = transport_value_with_cost(&rho, &omega, &cost, &config).unwrap();
    let self_r = transport_value_with_cost(&rho, &rho, &cost, &config).unwrap();
    let self_o = transport_value_with_cost(&omega, &omega, &cost, &config).unwrap();
    println!(
        "cross={:.9} (gap {:.2e})  self_r={:.9} (gap {:.2e})  self_o={:.9} (gap {:.2e})",
        cross.value, cross.gap, self_r.value, self_r.gap, self_o.value, self_o.gap
    );
    println!(
        "bracket={:.9}  elapsed={:.2?}",
        cross.value - 0.5 * (self_r.value + self_o.value),
        t0.elapsed()
    );
}
