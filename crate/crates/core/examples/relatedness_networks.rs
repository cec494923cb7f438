//! Activity networks from three parametrisations: mixed (core-periphery),
//! circulant (ring-like) and two blocks (dumbbell).

use ecx::experiments::{run_network, specialization_of, NetworkPreset};
use ecx::model::block_of;
use ecx::network::ProximityKind;

pub fn run() -> ecx::Result<()> {
    let core = run_network(&specialization_of(&NetworkPreset::CorePeriphery.spec(0)?)?, ProximityKind::MinConditional)?;
    let pci: Vec<f64> = core.graph.nodes.iter().map(|n| n.pci.unwrap_or(f64::NAN)).collect();
    let q = core.graph.degree_by_quartile(&pci)?;
    println!("core-periphery: mean degree by PCI quartile (low to high) {:?}", q.mean_degree);

    let ring = run_network(&specialization_of(&NetworkPreset::Ring.spec(0)?)?, ProximityKind::MinConditional)?;
    let deg = ring.graph.degrees();
    let low = deg.iter().filter(|d| **d <= 3).count();
    println!(
        "circulant: {low}/{} nodes with degree <= 3, longest fundamental cycle {}",
        deg.len(),
        ring.graph.longest_fundamental_cycle()
    );

    let bell = run_network(&specialization_of(&NetworkPreset::Dumbbell.spec(0)?)?, ProximityKind::MinConditional)?;
    let cut = bell.graph.spectral_bisection();
    let n = cut.len();
    let same = (0..n).filter(|&p| cut[p] as usize == block_of(p, n, 2)).count();
    println!("two blocks: spectral cut agrees with planted clusters on {}/{n} nodes", same.max(n - same));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
