use std::path::Path;
use std::process::{Command, Output};

fn ecx(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecx"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

#[test]
fn single_writes_panels_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = ecx(&["single"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["spec.toml", "output.csv", "rca.csv", "specialization.csv", "projection.csv", "eci.csv", "summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["diversity"].as_array().unwrap().len(), 10);
    // Two disconnected blocks: the top eigenvalue is repeated.
    assert_eq!(summary["degenerate"], true);
    let m = std::fs::read_to_string(dir.path().join("specialization.csv")).unwrap();
    assert_eq!(m.lines().nth(1).unwrap(), "c9,0,0,0,0,0,0,0,0,0,0,1,1,1,1,1,1,1,1,1,1");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = \"linspace\"\neconomies = 1\nactivities = 5\n").unwrap();
    assert_eq!(ecx(&["single", "--config", bad.to_str().unwrap()], &dir.path().join("a")).status.code(), Some(1));
    std::fs::write(&bad, "kind = \"mixed\"\neconomies = 4\nactivities = 5\nwidth = 3\nbogus = 1\n").unwrap();
    assert_eq!(ecx(&["multi", "--config", bad.to_str().unwrap()], &dir.path().join("b")).status.code(), Some(1));
    assert_eq!(ecx(&["nonsense"], &dir.path().join("c")).status.code(), Some(1));
    let missing = dir.path().join("missing.csv");
    assert_eq!(ecx(&["network", "--input", missing.to_str().unwrap()], &dir.path().join("d")).status.code(), Some(1));
    let scen = dir.path().join("scen.toml");
    std::fs::write(&scen, "economies = 3\nactivities = 4\nlabor = [1.0, 2.0]\n").unwrap();
    assert_eq!(ecx(&["equilibrium", "--config", scen.to_str().unwrap()], &dir.path().join("e")).status.code(), Some(1));
}

#[test]
fn network_from_csv_and_graphml_structure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    std::fs::write(
        &input,
        "id,a,b,c,d,e,f\nx,1,1,1,0,0,0\ny,1,1,0,0,0,0\nz,0,0,0,1,1,1\nw,0,0,0,1,1,0\n",
    )
    .unwrap();
    let out = dir.path().join("net");
    let o = ecx(&["network", "--input", input.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(out.join("backbone.graphml")).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed GraphML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "graphml");
    assert_eq!(root.tag_name().namespace(), Some("http://graphml.graphdrawing.org/xmlns"));
    let keys: Vec<&str> = root.children().filter(|n| n.has_tag_name("key")).filter_map(|n| n.attribute("id")).collect();
    for k in ["pci", "ubiquity", "x", "y", "weight", "in_backbone"] {
        assert!(keys.contains(&k), "missing key {k}");
    }
    let graph = root.children().find(|n| n.has_tag_name("graph")).unwrap();
    assert_eq!(graph.attribute("edgedefault"), Some("undirected"));
    let nodes: Vec<&str> = graph.children().filter(|n| n.has_tag_name("node")).filter_map(|n| n.attribute("id")).collect();
    assert_eq!(nodes, ["a", "b", "c", "d", "e", "f"]);
    for e in graph.children().filter(|n| n.has_tag_name("edge")) {
        assert!(nodes.contains(&e.attribute("source").unwrap()));
        assert!(nodes.contains(&e.attribute("target").unwrap()));
        for d in e.children().filter(|n| n.has_tag_name("data")) {
            assert!(keys.contains(&d.attribute("key").unwrap()));
        }
    }

    // Two disjoint groups of activities: two components, and no edge across.
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("network.json")).unwrap()).unwrap();
    assert_eq!(summary["components"], 2);
    let edges = ecx::network::parse_edge_csv(&std::fs::read_to_string(out.join("edges.csv")).unwrap()).unwrap();
    let left = |s: &str| ["a", "b", "c"].contains(&s);
    assert!(edges.iter().all(|e| left(&e.source) == left(&e.target)));
    assert!(std::fs::read_to_string(out.join("backbone.dot")).unwrap().starts_with("graph relatedness {"));
}

#[test]
fn oracle_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ecx(&["oracle-check"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(report["closed_forms"]["pass"], true);
}

#[test]
fn sweep_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, "alpha_points = 3\nreplicates = 2\neconomies = 12\nactivities = 30\ncapabilities = 4\n").unwrap();
    let out = dir.path().join("s");
    let o = ecx(&["sweep", "--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(std::fs::read_to_string(out.join("sweep_replicates.csv")).unwrap().lines().count(), 7);
}
