// V(N)/N over growing horizons, bracketed by the closed-form bounds.

use mw_adversary::asymptotics::{convergence_study, write_convergence_csv};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (mu, eps, rho0) = (0.8, 0.5, 0.5);
    let rows = convergence_study(mu, eps, rho0, &[50, 100, 200, 400])?;
    for r in &rows {
        assert!(r.avg_value >= r.lower_bound - 1.0 / r.horizon as f64);
    }
    write_convergence_csv(std::io::stdout().lock(), &rows, mu, eps, rho0, false)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
