//! How well ECI tracks mean endowment as the structured share alpha of the
//! parameters falls. Pass `--desk` for the 20x20 sweep at 50x300x10.

use ecx::experiments::{linspace, run_phase_sweep, SweepConfig};
use ecx::model::Dims;

pub fn run_with(cfg: &SweepConfig) -> ecx::Result<()> {
    let res = run_phase_sweep(cfg)?;
    for i in 0..res.alpha_grid.len() {
        let bar = "*".repeat((res.corr_mean[i] * 40.0).round() as usize);
        println!("{:5.3} {:.3} {bar}", res.alpha_grid[i], res.corr_mean[i]);
    }
    if let Some((_, mid)) = res.steepest_drop() {
        println!("steepest drop near alpha = {mid:.3}");
    }
    Ok(())
}

pub fn run() -> ecx::Result<()> {
    run_with(&SweepConfig {
        alpha_grid: linspace(0.01, 1.0, 10),
        replicates: 4,
        dims: Dims {
            economies: 30,
            activities: 120,
            capabilities: 10,
        },
        seed: 0,
    })
}

#[allow(dead_code)]
fn main() {
    let r = if std::env::args().any(|a| a == "--desk") {
        run_with(&SweepConfig::desk(0))
    } else {
        run()
    };
    if let Err(e) = r {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
