// The two-state strategy: lie from ρ₀, tell the truth from g(ρ₀).

use mw_adversary::sim::run_batch;
use mw_adversary::strategy::{
    two_state_asymptotic, two_state_exact_value, two_state_value_by_recursion,
};
use mw_adversary::{ForecasterKind, GameParams, Strategy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = GameParams::new(0.5, 0.5, 1000, 0.5)?;
    let exact = two_state_exact_value(&p);
    let recursion = two_state_value_by_recursion(&p);
    let limit = two_state_asymptotic(p.mu, p.eps, p.rho0)?;
    println!("exact {exact:.9}, recursion {recursion:.9}, long-run per round {limit:.9}");

    let stats = run_batch(ForecasterKind::FixedMw, &Strategy::TwoState, &p, 2000, 7)?;
    println!(
        "simulated per-round loss {:.5} ± {:.5}",
        stats.mean_avg_loss, stats.stderr
    );
    assert!((stats.mean_avg_loss - exact / 1000.0).abs() < 4.0 * stats.stderr);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
