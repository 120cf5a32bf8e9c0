// Regret of the adaptive forecaster against several adversaries, and the
// per-round incremental update that loses the guarantee.

use mw_adversary::sim::{check_regret_invariant, regret_bound, run_batch, run_episode};
use mw_adversary::{Action, ForecasterKind, GameParams, Strategy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 5000;
    let p = GameParams::new(0.3, 0.5, n, 0.5)?;
    println!("regret bound at N = {n}: {:.3}", regret_bound(n));

    for (name, s) in [
        ("lie", Strategy::AlwaysLie),
        ("truth", Strategy::AlwaysTruth),
    ] {
        let stats = run_batch(ForecasterKind::AdaptiveMw, &s, &p, 20, 1)?;
        println!(
            "{name:>6}: loss/round {:.4}, violations {}, min slack {:.2}",
            stats.mean_avg_loss,
            stats.regret_violations,
            stats.min_regret_slack.unwrap_or(f64::NAN)
        );
    }

    let switch = Strategy::fixed_sequence(
        (0..n)
            .map(|i| {
                if i < n / 5 {
                    Action::Truth
                } else {
                    Action::Lie
                }
            })
            .collect::<Vec<_>>(),
    );
    for kind in [
        ForecasterKind::AdaptiveMw,
        ForecasterKind::AdaptiveMwIncremental,
    ] {
        let ep = run_episode(kind, &switch, &p, 3)?;
        let check = check_regret_invariant(&ep)?;
        println!(
            "switch vs {:<20} regret {:9.2}  slack {:9.2}",
            kind.token(),
            check.regret,
            check.slack
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
