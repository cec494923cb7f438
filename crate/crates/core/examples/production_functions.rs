//! Separable output f_c g_p carries no comparative advantage; adding a
//! constant B splits economies and activities at their means.

use ecx::model::{output_shifted, FactorVectors};
use ecx::oracle::{check_separable_rca, shifted_condition};
use ecx::pipeline::{binarize, rca};

pub fn run() -> ecx::Result<()> {
    let f = [0.5, 1.0, 2.0, 4.0];
    let g = [3.0, 1.5, 1.0, 0.25, 0.1];
    let (ok, dev) = check_separable_rca(&f, &g)?;
    println!("separable: all R_cp = 1? {ok} (max deviation {dev:.1e})");

    let fv = FactorVectors::factor_intensity(vec![1.0, 2.0, 4.0, 8.0], vec![1.0, 2.0, 3.0, 5.0, 8.0], 0.5, 1.0)?;
    let m = binarize(&rca(&output_shifted(&fv)?)?)?;
    let expect = shifted_condition(&fv.f, &fv.g);
    println!("shifted (B = 1, gamma = 0.5):");
    for i in 0..m.shape().0 {
        let row: String = (0..m.shape().1).map(|j| if m.values()[(i, j)] == 1 { '#' } else { '.' }).collect();
        println!("  {row}");
    }
    println!("matches sign condition: {}", m.values() == expect.values());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
