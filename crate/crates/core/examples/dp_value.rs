// Exact value of the game against fixed-ε weights, checked against
// exhaustive search on a short horizon.

use mw_adversary::dp::{average_value, brute_force_value, DpSolver};
use mw_adversary::GameParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let short = GameParams::new(0.8, 0.5, 8, 0.5)?;
    let sol = DpSolver::new().solve(&short)?;
    let exhaustive = brute_force_value(&short)?;
    println!(
        "N = 8: dp {:.12}, exhaustive {:.12}",
        sol.values.start_value(),
        exhaustive
    );
    assert!((sol.values.start_value() - exhaustive).abs() < 1e-10);

    let policy = sol.policy.expect("policy extracted by default");
    let first: String = (-3..=3)
        .map(|k| policy.action(5, k).map(|a| a.as_str()))
        .collect::<Result<_, _>>()?;
    println!("actions with 5 rounds left, k = -3..3: {first}");

    for n in [100, 1000] {
        let p = short.with_horizon(n)?;
        let values = DpSolver::new().value_only().solve(&p)?.values;
        println!("N = {n}: V/N = {:.6}", average_value(&values));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
