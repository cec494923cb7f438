//! Baselines drawn from a min-max rescaled normal instead of a grid.

use ecx::experiments::run_model;
use ecx::model::{Dims, GeneratorKind, GeneratorSpec};

pub fn run_with(dims: Dims, seeds: u64) -> ecx::Result<()> {
    for seed in 0..seeds {
        let spec = GeneratorSpec::new(GeneratorKind::GaussianMinmax, dims, seed, 1.0)?;
        let run = run_model(&spec)?;
        println!("seed {seed}: Spearman(ECI, <r>) = {:.4}", run.spearman_endowment.unwrap_or(f64::NAN));
    }
    Ok(())
}

pub fn run() -> ecx::Result<()> {
    run_with(
        Dims {
            economies: 100,
            activities: 1000,
            capabilities: 10,
        },
        3,
    )
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
