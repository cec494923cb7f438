//! Short-run equilibrium: prices that clear every market, the wages they
//! imply, and the price-adjusted specialisation threshold.

use ecx::equilibrium::{run_scenario, PreferenceKind, Scenario};
use ecx::stats::spearman;

pub fn run() -> ecx::Result<()> {
    for preferences in [PreferenceKind::Uniform, PreferenceKind::Random] {
        let s = Scenario {
            economies: 8,
            activities: 12,
            preferences,
            ..Scenario::default()
        };
        let run = run_scenario(&s)?;
        let p = run.solution.prices.values();
        println!("{preferences:?} preferences, solved by {:?}", run.solution.method);
        println!("  prices: {:?}", p.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
        println!("  wages:  {:?}", run.accounts.wages.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
        println!("  Spearman(price, q) = {:?}", spearman(p, &run.inputs.q));
        println!(
            "  market clearing residual {:.1e}, budget residual {:.1e}, threshold {:.4}",
            run.solution.market_clearing_residual, run.budget_residual, run.threshold
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
