//! Multi-capability model with evenly spaced endowments and requirements:
//! ECI ranks economies exactly by their mean endowment, while diversity
//! peaks below the top.

use ecx::experiments::run_model;
use ecx::model::{Dims, GeneratorKind, GeneratorSpec};

pub fn run_with(dims: Dims) -> ecx::Result<()> {
    let spec = GeneratorSpec::new(GeneratorKind::Linspace, dims, 0, 1.0)?;
    let run = run_model(&spec)?;
    println!("lambda2 = {:.6}", run.complexity.eigenvalue);
    println!("Spearman(ECI, <r>) = {:?}", run.spearman_endowment);
    let top = run.economies.iter().max_by_key(|e| e.diversity).expect("non-empty");
    println!("most diversified: {} with <r> = {:.3}, diversity {}", top.id, top.mean_endowment, top.diversity);
    Ok(())
}

pub fn run() -> ecx::Result<()> {
    run_with(Dims {
        economies: 100,
        activities: 1000,
        capabilities: 10,
    })
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
