//! The pipeline against exact closed forms for the single-capability model.

use ecx::oracle::{oracle_mcc_exact, oracle_report, ParityCase, ParityKind, DEFAULT_SIZES};

pub fn run() -> ecx::Result<()> {
    let case = ParityCase::new(ParityKind::OddOdd, 5, 7)?;
    println!("exact M_cc' for 5 economies, 7 activities:");
    for row in oracle_mcc_exact(&case)? {
        println!("  {}", row.iter().map(|x| format!("{x:>5}")).collect::<Vec<_>>().join(" "));
    }
    let report = oracle_report(&DEFAULT_SIZES, 1e-12)?;
    for c in &report.cases {
        println!("{:>2}x{:<2} {:?}: pass {}", c.economies, c.activities, c.kind, c.pass);
    }
    println!("all cases pass: {}", report.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
