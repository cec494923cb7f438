//! Single-capability model on evenly spaced r and q: the nested output
//! matrix, the two-quadrant specialisation and the two-valued ECI.

use ecx::model::{gen_linspace, output_single};
use ecx::oracle::{oracle_eci, same_up_to_sign, sign_pattern, ParityCase};
use ecx::pipeline::{binarize, economic_complexity, project_economies, rca};

pub fn run() -> ecx::Result<()> {
    let (r, q) = (gen_linspace(10)?, gen_linspace(20)?);
    let y = output_single(&r, &q, 1.0)?;
    let m = binarize(&rca(&y)?)?;
    println!("M_cp (rows: economies by descending r, columns: activities by ascending q)");
    for i in 0..m.shape().0 {
        let row: String = (0..m.shape().1).map(|j| if m.values()[(i, j)] == 1 { '#' } else { '.' }).collect();
        println!("  {:>4} {row}", m.economy_ids()[i]);
    }
    let p = project_economies(&m)?;
    println!("M_cc' row 0: {:?}", p.values().row(0).iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    let res = economic_complexity(&m)?;
    let case = ParityCase::from_vectors(&r, &q, ecx::oracle::Center::Mean)?;
    let agrees = same_up_to_sign(&sign_pattern(&res.eci.raw), &oracle_eci(&case));
    println!("ECI: {:?}", res.eci.raw.iter().map(|v| format!("{v:+.3}")).collect::<Vec<_>>());
    println!("sign pattern matches the closed form: {agrees}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
