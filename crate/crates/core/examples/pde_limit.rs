// The continuum limit: closed-form value function, its residual, and the
// Hamiltonian on the interface x = 0.

use mw_adversary::asymptotics::{
    bounds_report, pde_solution, residual_sweep, tangential_hamiltonian,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for mu in [0.1, 0.5, 0.9] {
        let sweep = residual_sweep(mu, 2000, 5)?;
        let tangential = tangential_hamiltonian(mu, 201)?;
        let bounds = bounds_report(mu, 0.5, 0.5)?;
        println!(
            "mu {mu}: max residual {:.1e}, interface H {:.6} (1-mu^2 = {:.6}), bounds [{:.4}, {:.4}]",
            sweep.max_abs_residual,
            tangential.value,
            1.0 - mu * mu,
            bounds.lower,
            bounds.upper
        );
    }

    let mu = 0.5;
    let row: Vec<String> = [-1.0, -0.5, 0.0, 0.5, 1.0]
        .iter()
        .map(|&x| format!("{:.3}", pde_solution(1.0, x, mu)))
        .collect();
    println!("v(1, x) for x = -1..1 step 0.5: {}", row.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
