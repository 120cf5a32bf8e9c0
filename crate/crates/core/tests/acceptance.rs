//! Exit criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mw_adversary::asymptotics::{
    convergence_study, pde_solution, residual_sweep, tangential_hamiltonian,
};
use mw_adversary::dp::{brute_force_value, solve, DpSolver};
use mw_adversary::sim::{check_regret_invariant, regret_bound, run_batch, run_episode};
use mw_adversary::strategy::{
    two_state_asymptotic, two_state_exact_value, two_state_value_by_recursion,
};
use mw_adversary::{Action, ForecasterKind, GameParams, Strategy};

fn report(id: &str, ok: bool, detail: String) {
    println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} failed: {detail}");
}

fn params(mu: f64, eps: f64, n: usize, rho0: f64) -> GameParams {
    GameParams::new(mu, eps, n, rho0).unwrap()
}

#[test]
fn ac1_dp_sandwich_between_bounds() {
    let horizons = [250, 500, 1000, 2000];
    for &mu in &[0.8, 0.3, 0.5, 0.9] {
        let start = Instant::now();
        let rows = convergence_study(mu, 0.5, 0.5, &horizons).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let lower = two_state_asymptotic(mu, 0.5, 0.5).unwrap();
        let upper = 1.0 - mu * mu;
        let avg: Vec<f64> = rows.iter().map(|r| r.avg_value).collect();

        let above_lower = rows
            .iter()
            .all(|r| r.avg_value >= lower - 1.0 / r.horizon as f64);
        let below_upper = avg[3] <= upper + 0.02;
        let cauchy = (avg[3] - avg[2]).abs() < (avg[1] - avg[0]).abs();
        report(
            "AC1 DP sandwich",
            above_lower && below_upper && cauchy && elapsed < 5.0,
            format!(
                "mu={mu} avg={avg:.7?} lower={lower:.7} upper+0.02={:.4} \
                 |d(2000,1000)|={:.2e} |d(500,250)|={:.2e} time={elapsed:.2}s",
                upper + 0.02,
                (avg[3] - avg[2]).abs(),
                (avg[1] - avg[0]).abs()
            ),
        );
    }
}

#[test]
fn ac2_lattice_dp_matches_history_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let mu = 0.02 + 0.96 * rng.random::<f64>();
        let eps = 0.02 + 0.96 * rng.random::<f64>();
        let rho0 = 0.02 + 0.96 * rng.random::<f64>();
        for n in 1..=10 {
            let p = params(mu, eps, n, rho0);
            let dp = solve(&p).unwrap().0.start_value();
            let tree = brute_force_value(&p).unwrap();
            worst = worst.max((dp - tree).abs());
        }
    }
    report(
        "AC2 oracle equivalence",
        worst <= 1e-10,
        format!("20 triples x N=1..10, max |dp - tree| = {worst:.2e}"),
    );
}

#[test]
fn ac3_two_state_strategy() {
    let mut worst = 0.0_f64;
    for &(mu, eps, rho) in &[(0.5, 0.5, 0.5), (0.8, 0.5, 0.5), (0.3, 0.1, 0.9)] {
        let p = params(mu, eps, 100_000, rho);
        let closed = two_state_exact_value(&p);
        let rolled = two_state_value_by_recursion(&p);
        worst = worst.max((closed - rolled).abs());
    }
    report(
        "AC3 two-state closed form vs pi_t recursion",
        worst <= 1e-9,
        format!("N=1e5, max |closed - recursion| = {worst:.2e}"),
    );

    let p = params(0.5, 0.5, 1000, 0.5);
    let target = two_state_asymptotic(0.5, 0.5, 0.5).unwrap();
    let exact = two_state_exact_value(&p) / 1000.0;
    let stats = run_batch(ForecasterKind::FixedMw, &Strategy::TwoState, &p, 10_000, 31).unwrap();
    let se = stats.stderr;
    let m = stats.mean_avg_loss;
    report(
        "AC3 two-state Monte Carlo",
        (m - target).abs() <= 3.0 * se && (m - exact).abs() <= 3.0 * se && m - 0.5 > 3.0 * se,
        format!(
            "mean={m:.7} se={se:.2e} asymptote={target:.7} exact(N)/N={exact:.7} \
             z(asym)={:.2} z(exact)={:.2} z(1-mu)={:.1}",
            (m - target) / se,
            (m - exact) / se,
            (m - 0.5) / se
        ),
    );
}

fn switching(n: usize, switch_at: usize) -> Strategy {
    Strategy::fixed_sequence(
        (0..n)
            .map(|i| {
                if i < switch_at {
                    Action::Truth
                } else {
                    Action::Lie
                }
            })
            .collect::<Vec<_>>(),
    )
}

fn coin_flips(n: usize, rng: &mut ChaCha8Rng) -> Strategy {
    Strategy::fixed_sequence(
        (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Action::Lie
                } else {
                    Action::Truth
                }
            })
            .collect::<Vec<_>>(),
    )
}

#[test]
fn ac4_pathwise_regret_of_adaptive_forecaster() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut episodes = 0;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for &(n, count) in &[(1usize, 300usize), (10, 300), (100, 300), (10_000, 100)] {
        for i in 0..count {
            let mu = 0.05 + 0.9 * rng.random::<f64>();
            let p = params(mu, 0.5, n, 0.5);
            let strategy = match i % 5 {
                0 => Strategy::AlwaysLie,
                1 => Strategy::AlwaysTruth,
                2 if n <= 100 => Strategy::dp_policy(solve(&p).unwrap().1),
                3 => switching(n, n / 10 + rng.random_range(0..=n / 2)),
                _ => coin_flips(n, &mut rng),
            };
            let ep = run_episode(ForecasterKind::AdaptiveMw, &strategy, &p, rng.random()).unwrap();
            let check = check_regret_invariant(&ep).unwrap();
            episodes += 1;
            violations += usize::from(check.violated);
            min_slack = min_slack.min(check.slack);
        }
    }
    report(
        "AC4 path-wise regret",
        episodes >= 1000 && violations == 0,
        format!("{episodes} episodes, {violations} violations, min slack {min_slack:.3}"),
    );

    let n = 10_000;
    let mu = 0.8;
    let p = params(mu, 0.5, n, 0.5);
    let ceiling = 1.0 - mu + regret_bound(n) / n as f64;
    let lie = run_batch(
        ForecasterKind::AdaptiveMw,
        &Strategy::AlwaysLie,
        &p,
        1000,
        5,
    )
    .unwrap();
    let mut ok = lie.mean_avg_loss >= (1.0 - mu) - 3.0 * lie.stderr && lie.regret_violations == 0;
    let mut detail = format!(
        "lie: mean={:.5} se={:.1e} floor={:.3} ceiling={ceiling:.5}",
        lie.mean_avg_loss,
        lie.stderr,
        1.0 - mu
    );
    for (name, strategy) in [
        ("lie", Strategy::AlwaysLie),
        ("truth", Strategy::AlwaysTruth),
        ("switch", switching(n, n / 5)),
    ] {
        let s = run_batch(ForecasterKind::AdaptiveMw, &strategy, &p, 1000, 6).unwrap();
        ok &= s.mean_avg_loss <= ceiling + 3.0 * s.stderr && s.regret_violations == 0;
        detail.push_str(&format!("; {name}: mean={:.5}", s.mean_avg_loss));
    }
    // the DP policy only fits in memory at moderate N
    let small = params(mu, 0.5, 200, 0.5);
    let dp = Strategy::dp_policy(solve(&small).unwrap().1);
    let s = run_batch(ForecasterKind::AdaptiveMw, &dp, &small, 2000, 7).unwrap();
    let small_ceiling = 1.0 - mu + regret_bound(200) / 200.0;
    ok &= s.mean_avg_loss <= small_ceiling + 3.0 * s.stderr && s.regret_violations == 0;
    detail.push_str(&format!(
        "; dp-policy(N=200): mean={:.5} ceiling={small_ceiling:.5}",
        s.mean_avg_loss
    ));
    report("AC4 adaptive bracket", ok, detail);
}

#[test]
fn ac5_closed_form_solves_the_limit_equation() {
    let mut worst = 0.0_f64;
    for i in 1..=9 {
        let mu = i as f64 / 10.0;
        worst = worst.max(
            residual_sweep(mu, 10_000, 100 + i)
                .unwrap()
                .max_abs_residual,
        );
    }
    let mut jump = 0.0_f64;
    for i in 1..=9 {
        let mu = i as f64 / 10.0;
        for j in 1..=50 {
            let t = j as f64 / 25.0;
            for kink in [(1.0 - mu) * t, -mu * t] {
                let h = 1e-13;
                jump =
                    jump.max((pde_solution(t, kink - h, mu) - pde_solution(t, kink + h, mu)).abs());
            }
        }
    }
    report(
        "AC5 PDE closed form",
        worst <= 1e-12 && jump <= 1e-12,
        format!("max |residual| = {worst:.2e} over 9x1e4 points, max kink jump = {jump:.2e}"),
    );
}

#[test]
fn ac6_tangential_hamiltonian() {
    for &mu in &[0.1, 0.5, 0.9] {
        let start = Instant::now();
        let m = tangential_hamiltonian(mu, 1001).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let target = 1.0 - mu * mu;
        let near =
            m.alpha1.abs() <= 2e-3 && (m.alpha2 - 1.0).abs() <= 2e-3 && (m.c - mu).abs() <= 2e-3;
        report(
            "AC6 tangential Hamiltonian",
            (m.value - target).abs() <= 1e-3 && near && elapsed < 1.0,
            format!(
                "mu={mu} H_T={:.6} target={target:.6} argmax=({:.4}, {:.4}, {:.4}) time={elapsed:.3}s",
                m.value, m.alpha1, m.alpha2, m.c
            ),
        );
    }
}

#[test]
fn ac7_dp_policy_simulation_matches_dp_value() {
    for &n in &[50, 200] {
        let p = params(0.8, 0.5, n, 0.5);
        let sol = DpSolver::new().solve(&p).unwrap();
        let value = sol.values.start_value();
        let strategy = Strategy::dp_policy(sol.policy.unwrap());
        let s = run_batch(
            ForecasterKind::FixedMw,
            &strategy,
            &p,
            10_000,
            1234 + n as u64,
        )
        .unwrap();
        let nf = n as f64;
        let diff = (s.mean_avg_loss * nf - value).abs();
        report(
            "AC7 DP policy Monte Carlo",
            diff <= 3.0 * s.stderr * nf,
            format!(
                "N={n} V={value:.5} MC={:.5} |diff|={diff:.4} 3se*N={:.4}",
                s.mean_avg_loss * nf,
                3.0 * s.stderr * nf
            ),
        );
    }
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("acceptance-{tag}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Runs the CLI and returns (exit code, stdout, bytes of every `--out`-style file).
fn invoke(args: &[String], files: &[PathBuf]) -> (i32, Vec<u8>, Vec<Vec<u8>>) {
    for f in files {
        let _ = std::fs::remove_file(f);
    }
    let out = Command::new(env!("CARGO_BIN_EXE_mwgame"))
        .args(args)
        .output()
        .unwrap();
    let contents = files
        .iter()
        .map(|f| std::fs::read(f).unwrap_or_default())
        .collect();
    (out.status.code().unwrap_or(-1), out.stdout, contents)
}

#[test]
fn ac8_cli_is_deterministic() {
    let dir = scratch_dir("determinism");
    let path = |name: &str| dir.join(name);
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<String>>();
    let p = |name: &str| path(name).to_string_lossy().into_owned();

    let cases: Vec<(Vec<String>, Vec<PathBuf>)> = vec![
        (
            [
                s(&[
                    "dp",
                    "--mu",
                    "0.8",
                    "--eps",
                    "0.5",
                    "--horizon",
                    "60",
                    "--rho0",
                    "0.5",
                    "--policy",
                    "--out",
                ]),
                vec![p("dp.csv")],
            ]
            .concat(),
            vec![path("dp.csv")],
        ),
        (
            [
                s(&[
                    "simulate",
                    "--forecaster",
                    "mw",
                    "--strategy",
                    "dp-policy",
                    "--mu",
                    "0.7",
                    "--eps",
                    "0.4",
                    "--horizon",
                    "80",
                    "--reps",
                    "500",
                    "--seed",
                    "9",
                    "--log-episodes",
                ]),
                vec![p("ep.csv")],
            ]
            .concat(),
            vec![path("ep.csv")],
        ),
        (
            s(&[
                "simulate",
                "--forecaster",
                "adaptive",
                "--strategy",
                "lie",
                "--mu",
                "0.6",
                "--horizon",
                "300",
                "--reps",
                "400",
                "--seed",
                "3",
            ]),
            vec![],
        ),
        (
            s(&["bounds", "--mu", "0.5", "--eps", "0.5", "--rho", "0.5"]),
            vec![],
        ),
        (
            [
                s(&[
                    "converge",
                    "--mu",
                    "0.8",
                    "--eps",
                    "0.5",
                    "--rho0",
                    "0.5",
                    "--horizons",
                    "25,50,100",
                    "--out",
                ]),
                vec![p("conv.csv")],
            ]
            .concat(),
            vec![path("conv.csv")],
        ),
        (
            s(&[
                "pde-check",
                "--mu",
                "0.5",
                "--samples",
                "2000",
                "--resolution",
                "201",
                "--seed",
                "4",
            ]),
            vec![],
        ),
    ];

    let mut ok = true;
    let mut detail = Vec::new();
    for (args, files) in &cases {
        let first = invoke(args, files);
        let second = invoke(args, files);
        let produced = !first.1.is_empty() || first.2.iter().any(|f| !f.is_empty());
        let same = first == second && first.0 == 0 && produced;
        ok &= same;
        detail.push(format!(
            "{}={}",
            args[0],
            if same { "identical" } else { "DIFFERENT" }
        ));
    }
    report("AC8 CLI determinism", ok, detail.join(", "));
}
