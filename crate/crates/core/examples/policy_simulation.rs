// Play the optimal policy against the forecaster and compare the simulated
// loss with the exact value; write one episode trace as CSV.

use mw_adversary::sim::run_batch;
use mw_adversary::{run_episode, DpSolver, ForecasterKind, GameParams, Strategy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = GameParams::new(0.6, 0.5, 100, 0.5)?;
    let sol = DpSolver::new().solve(&p)?;
    let value = sol.values.start_value();
    let policy = Strategy::dp_policy(sol.policy.expect("policy extracted by default"));

    let stats = run_batch(ForecasterKind::FixedMw, &policy, &p, 2000, 42)?;
    println!(
        "V/N = {:.5}, simulated {:.5} ± {:.5}",
        value / 100.0,
        stats.mean_avg_loss,
        stats.stderr
    );
    assert!((stats.mean_avg_loss - value / 100.0).abs() < 4.0 * stats.stderr);

    let ep = run_episode(ForecasterKind::FixedMw, &policy, &p, 42)?;
    let mut trace = Vec::new();
    ep.write_log_csv(&mut trace, false)?;
    for line in String::from_utf8(trace)?.lines().take(6) {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
