//! Relatedness networks: activity proximity from a specialisation matrix,
//! the spanning-tree-plus-strong-links backbone, graph export, and a few
//! structural measurements used to characterise ring, core-periphery and
//! two-cluster shapes.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{self, fmt_f64};
use crate::pipeline::{Scores, SpecializationMatrix};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProximityKind {
    /// `Σ_c M_cp M_cp' / max(M_p, M_p')`.
    MinConditional,
    /// `Σ_c M_cp M_cp'`.
    Cooccurrence,
}

/// Symmetric activity-activity proximity `φ_pp'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityMatrix {
    values: DMatrix<f64>,
    kind: ProximityKind,
    ids: Vec<String>,
    ubiquity: Vec<usize>,
}

impl ProximityMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kind(&self) -> ProximityKind {
        self.kind
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn ubiquity(&self) -> &[usize] {
        &self.ubiquity
    }

    /// Activities no economy is specialised in; their proximity is 0.
    pub fn zero_ubiquity(&self) -> Vec<usize> {
        (0..self.ubiquity.len()).filter(|&p| self.ubiquity[p] == 0).collect()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

pub fn proximity(m: &SpecializationMatrix, kind: ProximityKind) -> Result<ProximityMatrix> {
    let (_, np) = m.shape();
    if np == 0 {
        return Err(Error::EmptyInput("specialization matrix has no activities".into()));
    }
    let mf = m.as_f64();
    let co = mf.transpose() * &mf;
    let ubiquity = m.ubiquity();
    let zero: Vec<&String> = (0..np).filter(|&p| ubiquity[p] == 0).map(|p| &m.activity_ids()[p]).collect();
    if !zero.is_empty() {
        log::warn!("{} activities have zero ubiquity; their proximity is 0: {:?}", zero.len(), zero);
    }
    let values = match kind {
        ProximityKind::Cooccurrence => co,
        ProximityKind::MinConditional => DMatrix::from_fn(np, np, |p, pp| {
            let d = ubiquity[p].max(ubiquity[pp]);
            if d == 0 {
                0.0
            } else {
                co[(p, pp)] / d as f64
            }
        }),
    };
    Ok(ProximityMatrix {
        values,
        kind,
        ids: m.activity_ids().to_vec(),
        ubiquity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: String,
    pub pci: Option<f64>,
    pub ubiquity: usize,
    /// Position on the unit circle, in id order.
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub in_backbone: bool,
}

/// Rule for adding strong links on top of the spanning forest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackboneOptions {
    /// Links above `mean + sigmas · std` are kept.
    pub sigmas: f64,
    /// Count zero off-diagonal weights in the mean and standard deviation.
    pub include_zeros: bool,
}

impl Default for BackboneOptions {
    fn default() -> Self {
        BackboneOptions {
            sigmas: 1.0,
            include_zeros: false,
        }
    }
}

/// Weighted activity graph: every positive off-diagonal proximity is an
/// edge, flagged when it belongs to the backbone.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatednessGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Weight above which non-tree links join the backbone.
    pub threshold: f64,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Maximum-weight spanning forest plus every link above mean + 1 std.
pub fn backbone(phi: &ProximityMatrix) -> Result<RelatednessGraph> {
    backbone_with(phi, &BackboneOptions::default())
}

pub fn backbone_with(phi: &ProximityMatrix, opts: &BackboneOptions) -> Result<RelatednessGraph> {
    let n = phi.len();
    if n == 0 {
        return Err(Error::EmptyInput("proximity matrix is empty".into()));
    }
    let v = &phi.values;
    for i in 0..n {
        for j in 0..i {
            if (v[(i, j)] - v[(j, i)]).abs() > 1e-12 * v[(i, j)].abs().max(1.0) {
                return Err(Error::Validation(format!("proximity is not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut stat_weights = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = v[(i, j)];
            if w > 0.0 {
                edges.push(Edge {
                    source: i,
                    target: j,
                    weight: w,
                    in_backbone: false,
                });
                stat_weights.push(w);
            } else if opts.include_zeros {
                stat_weights.push(w);
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput("proximity graph has no edges".into()));
    }
    let threshold = stats::mean(&stat_weights) + opts.sigmas * stats::std_dev(&stat_weights);

    // Kruskal on descending weight; ties broken by the (source, target) pair.
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&edges[a], &edges[b]);
        eb.weight
            .total_cmp(&ea.weight)
            .then(ea.source.cmp(&eb.source))
            .then(ea.target.cmp(&eb.target))
    });
    let mut sets = DisjointSet::new(n);
    for &k in &order {
        let e = &mut edges[k];
        if sets.union(e.source, e.target) {
            e.in_backbone = true;
        }
    }
    for e in &mut edges {
        if e.weight > threshold {
            e.in_backbone = true;
        }
    }
    let nodes = (0..n)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Node {
                id: phi.ids[i].clone(),
                pci: None,
                ubiquity: phi.ubiquity[i],
                x: angle.cos(),
                y: angle.sin(),
            }
        })
        .collect();
    Ok(RelatednessGraph { nodes, edges, threshold })
}

/// Degree-by-PCI-quartile summary, lowest quartile first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuartileDegrees {
    pub mean_degree: [f64; 4],
    pub counts: [usize; 4],
}

impl RelatednessGraph {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn backbone_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.in_backbone)
    }

    /// Copy keeping only backbone edges.
    pub fn backbone_only(&self) -> RelatednessGraph {
        RelatednessGraph {
            nodes: self.nodes.clone(),
            edges: self.backbone_edges().copied().collect(),
            threshold: self.threshold,
        }
    }

    /// Attach PCI values by matching node ids; unmatched nodes keep `None`.
    pub fn attach_pci(&mut self, pci: &Scores) {
        for node in &mut self.nodes {
            node.pci = pci.ids.iter().position(|id| *id == node.id).map(|k| pci.raw[k]);
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in self.backbone_edges() {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        adj
    }

    /// Backbone degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    /// Connected-component label of every node in the backbone, numbered in
    /// order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut sets = DisjointSet::new(n);
        for e in self.backbone_edges() {
            sets.union(e.source, e.target);
        }
        let mut label = vec![usize::MAX; n];
        let mut roots = Vec::new();
        for i in 0..n {
            let r = sets.find(i);
            let k = match roots.iter().position(|x| *x == r) {
                Some(k) => k,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
            label[i] = k;
        }
        label
    }

    pub fn n_components(&self) -> usize {
        self.components().iter().max().map_or(0, |m| m + 1)
    }

    /// Length (in nodes) of the longest cycle closed by a single non-tree
    /// backbone edge against a BFS spanning forest of the backbone.
    pub fn longest_fundamental_cycle(&self) -> usize {
        let n = self.nodes.len();
        let adj = self.adjacency();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let mut nb = adj[u].clone();
                nb.sort_unstable();
                for w in nb {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = u;
                        depth[w] = depth[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut best = 0;
        for e in self.backbone_edges() {
            let (a, b) = (e.source, e.target);
            if parent[a] == b || parent[b] == a {
                continue;
            }
            // Walk both ends up to their lowest common ancestor.
            let (mut x, mut y, mut len) = (a, b, 1);
            while x != y {
                if depth[x] >= depth[y] {
                    x = parent[x];
                } else {
                    y = parent[y];
                }
                len += 1;
            }
            best = best.max(len);
        }
        best
    }

    /// Mean backbone degree in each quartile of `values` (one per node).
    pub fn degree_by_quartile(&self, values: &[f64]) -> Result<QuartileDegrees> {
        let n = self.nodes.len();
        if values.len() != n {
            return Err(Error::Dimension(format!("{} values for {n} nodes", values.len())));
        }
        let deg = self.degrees();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut sums = [0.0; 4];
        let mut counts = [0usize; 4];
        for (rank, &i) in order.iter().enumerate() {
            let q = (4 * rank / n).min(3);
            sums[q] += deg[i] as f64;
            counts[q] += 1;
        }
        let mut mean_degree = [0.0; 4];
        for q in 0..4 {
            if counts[q] > 0 {
                mean_degree[q] = sums[q] / counts[q] as f64;
            }
        }
        Ok(QuartileDegrees { mean_degree, counts })
    }

    /// Two-way spectral cut of the weighted backbone: sign of the Fiedler
    /// vector of the graph Laplacian (0 for nonnegative entries).
    pub fn spectral_bisection(&self) -> Vec<u8> {
        let n = self.nodes.len();
        let mut lap = DMatrix::<f64>::zeros(n, n);
        for e in self.backbone_edges() {
            let (a, b, w) = (e.source, e.target, e.weight);
            lap[(a, b)] -= w;
            lap[(b, a)] -= w;
            lap[(a, a)] += w;
            lap[(b, b)] += w;
        }
        let eig = SymmetricEigen::new(lap);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        if n < 2 {
            return vec![0; n];
        }
        let f = eig.eigenvectors.column(idx[1]);
        f.iter().map(|v| u8::from(*v < 0.0)).collect()
    }

    pub fn summary(&self) -> GraphSummary {
        let pci: Option<Vec<f64>> = self.nodes.iter().map(|n| n.pci).collect();
        GraphSummary {
            n_nodes: self.nodes.len(),
            n_edges: self.edges.len(),
            backbone_edges: self.backbone_edges().count(),
            components: self.n_components(),
            threshold: io::Sig17(self.threshold),
            degree_by_pci_quartile: pci
                .and_then(|p| self.degree_by_quartile(&p).ok())
                .map(|q| q.mean_degree.iter().copied().map(io::Sig17).collect()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub backbone_edges: usize,
    pub components: usize,
    pub threshold: io::Sig17,
    /// Mean backbone degree per PCI quartile, lowest first.
    pub degree_by_pci_quartile: Option<Vec<io::Sig17>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Csv,
    GraphMl,
    Dot,
}

impl GraphFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(GraphFormat::Csv),
            "graphml" => Ok(GraphFormat::GraphMl),
            "dot" => Ok(GraphFormat::Dot),
            other => Err(Error::Usage(format!("unsupported graph format `{other}`; use csv, graphml or dot"))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Csv => "csv",
            GraphFormat::GraphMl => "graphml",
            GraphFormat::Dot => "dot",
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Edge list with each undirected pair once:
/// `source,target,weight,in_backbone`.
pub fn write_edge_csv(g: &RelatednessGraph, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "source,target,weight,in_backbone")?;
    for e in &g.edges {
        writeln!(
            w,
            "{},{},{},{}",
            g.nodes[e.source].id,
            g.nodes[e.target].id,
            fmt_f64(e.weight),
            e.in_backbone
        )?;
    }
    Ok(())
}

pub fn write_graphml(g: &RelatednessGraph, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        w,
        r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">"#
    )?;
    writeln!(w, r#"  <key id="pci" for="node" attr.name="pci" attr.type="double"/>"#)?;
    writeln!(w, r#"  <key id="ubiquity" for="node" attr.name="ubiquity" attr.type="int"/>"#)?;
    writeln!(w, r#"  <key id="x" for="node" attr.name="x" attr.type="double"/>"#)?;
    writeln!(w, r#"  <key id="y" for="node" attr.name="y" attr.type="double"/>"#)?;
    writeln!(w, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#)?;
    writeln!(w, r#"  <key id="in_backbone" for="edge" attr.name="in_backbone" attr.type="boolean"/>"#)?;
    writeln!(w, r#"  <graph id="relatedness" edgedefault="undirected">"#)?;
    for n in &g.nodes {
        writeln!(w, r#"    <node id="{}">"#, xml_escape(&n.id))?;
        if let Some(p) = n.pci {
            writeln!(w, r#"      <data key="pci">{}</data>"#, fmt_f64(p))?;
        }
        writeln!(w, r#"      <data key="ubiquity">{}</data>"#, n.ubiquity)?;
        writeln!(w, r#"      <data key="x">{}</data>"#, fmt_f64(n.x))?;
        writeln!(w, r#"      <data key="y">{}</data>"#, fmt_f64(n.y))?;
        writeln!(w, "    </node>")?;
    }
    for (k, e) in g.edges.iter().enumerate() {
        writeln!(
            w,
            r#"    <edge id="e{k}" source="{}" target="{}">"#,
            xml_escape(&g.nodes[e.source].id),
            xml_escape(&g.nodes[e.target].id)
        )?;
        writeln!(w, r#"      <data key="weight">{}</data>"#, fmt_f64(e.weight))?;
        writeln!(w, r#"      <data key="in_backbone">{}</data>"#, e.in_backbone)?;
        writeln!(w, "    </edge>")?;
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")
}

pub fn write_dot(g: &RelatednessGraph, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "graph relatedness {{")?;
    for n in &g.nodes {
        let pci = n.pci.map(|p| format!(", pci={}", fmt_f64(p))).unwrap_or_default();
        writeln!(w, "  \"{}\" [ubiquity={}{pci}];", dot_escape(&n.id), n.ubiquity)?;
    }
    for e in &g.edges {
        writeln!(
            w,
            "  \"{}\" -- \"{}\" [weight={}, in_backbone={}];",
            dot_escape(&g.nodes[e.source].id),
            dot_escape(&g.nodes[e.target].id),
            fmt_f64(e.weight),
            e.in_backbone
        )?;
    }
    writeln!(w, "}}")
}

pub fn write_graph(g: &RelatednessGraph, format: GraphFormat, w: &mut dyn Write) -> std::io::Result<()> {
    match format {
        GraphFormat::Csv => write_edge_csv(g, w),
        GraphFormat::GraphMl => write_graphml(g, w),
        GraphFormat::Dot => write_dot(g, w),
    }
}

/// Write `g` to `path` in the named format (`csv`, `graphml` or `dot`).
pub fn export_graph(g: &RelatednessGraph, format: &str, path: &Path) -> Result<()> {
    let format = GraphFormat::parse(format)?;
    let mut buf = Vec::new();
    write_graph(g, format, &mut buf).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// One row of an edge-list CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub in_backbone: bool,
}

pub fn parse_edge_csv(text: &str) -> Result<Vec<EdgeRecord>> {
    let err = |m: String| Error::Parse {
        path: "<edge list>".into(),
        message: m,
    };
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| err(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["source", "target", "weight", "in_backbone"] {
        return Err(err(format!("unexpected header {headers:?}")));
    }
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| err(e.to_string()))?;
            Ok(EdgeRecord {
                source: rec[0].to_string(),
                target: rec[1].to_string(),
                weight: rec[2].parse().map_err(|_| err(format!("bad weight `{}`", &rec[2])))?,
                in_backbone: rec[3].parse().map_err(|_| err(format!("bad flag `{}`", &rec[3])))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_linspace, output_single};
    use crate::pipeline::{binarize, rca};
    use proptest::prelude::*;

    fn eq11() -> SpecializationMatrix {
        let y = output_single(&gen_linspace(4).unwrap(), &gen_linspace(6).unwrap(), 1.0).unwrap();
        binarize(&rca(&y).unwrap()).unwrap()
    }

    fn phi_from(values: DMatrix<f64>) -> ProximityMatrix {
        let n = values.nrows();
        ProximityMatrix {
            values,
            kind: ProximityKind::Cooccurrence,
            ids: crate::model::activity_ids(n),
            ubiquity: vec![1; n],
        }
    }

    #[test]
    fn even_case_two_cliques() {
        let phi = proximity(&eq11(), ProximityKind::MinConditional).unwrap();
        for p in 0..6 {
            for pp in 0..6 {
                let same = (p < 3) == (pp < 3);
                assert_eq!(phi.values()[(p, pp)], if same { 1.0 } else { 0.0 });
            }
        }
        let co = proximity(&eq11(), ProximityKind::Cooccurrence).unwrap();
        assert_eq!(co.values()[(0, 1)], 2.0);
        let g = backbone(&phi).unwrap();
        assert_eq!(g.n_components(), 2);
        assert_eq!(g.components(), vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn proximity_trivia() {
        let m = SpecializationMatrix::from_rows(3, &[1, 1, 0, 0, 0, 0, 1, 0, 1, 1, 0, 0]).unwrap();
        let phi = proximity(&m, ProximityKind::MinConditional).unwrap();
        assert_eq!(phi.values()[(0, 1)], 1.0);
        assert_eq!(phi.values()[(0, 2)], 0.0);
        assert_eq!(phi.values()[(3, 3)], 0.0);
        assert_eq!(phi.zero_ubiquity(), vec![3]);
        for p in 0..3 {
            assert_eq!(phi.values()[(p, p)], 1.0);
        }
    }

    #[test]
    fn constant_complete_graph_keeps_only_tree() {
        let phi = phi_from(DMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { 0.4 }));
        let g = backbone(&phi).unwrap();
        assert_eq!(g.backbone_edges().count(), 4);
        assert_eq!(g.n_components(), 1);
        // Ties resolved toward the smallest pairs: a star on node 0.
        let tree: Vec<(usize, usize)> = g.backbone_edges().map(|e| (e.source, e.target)).collect();
        assert_eq!(tree, vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
    }

    #[test]
    fn strong_links_join_tree() {
        let mut v = DMatrix::from_element(4, 4, 0.1);
        v[(0, 1)] = 0.9;
        v[(1, 0)] = 0.9;
        v[(2, 3)] = 0.8;
        v[(3, 2)] = 0.8;
        v[(0, 2)] = 0.85;
        v[(2, 0)] = 0.85;
        let g = backbone(&phi_from(v)).unwrap();
        assert!(g.backbone_edges().count() >= 3);
        assert!(g.edges.iter().filter(|e| e.weight > g.threshold).all(|e| e.in_backbone));
        assert!(backbone(&phi_from(DMatrix::zeros(3, 3))).is_err());
        assert!(backbone(&phi_from(DMatrix::zeros(0, 0))).is_err());
    }

    #[test]
    fn ring_measurements() {
        let n = 8;
        let v = DMatrix::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j).min(n - i.abs_diff(j));
            if d == 1 {
                1.0
            } else if d == 0 {
                0.0
            } else {
                0.01
            }
        });
        let g = backbone(&phi_from(v)).unwrap();
        assert!(g.degrees().iter().all(|d| *d == 2));
        assert_eq!(g.longest_fundamental_cycle(), n);
    }

    #[test]
    fn bisection_splits_two_blocks() {
        let v = DMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                0.0
            } else if (i < 3) == (j < 3) {
                1.0
            } else if (i, j) == (2, 3) || (i, j) == (3, 2) {
                0.05
            } else {
                0.0
            }
        });
        let g = backbone(&phi_from(v)).unwrap();
        let cut = g.spectral_bisection();
        assert!(cut[0] == cut[1] && cut[1] == cut[2]);
        assert!(cut[3] == cut[4] && cut[4] == cut[5]);
        assert_ne!(cut[0], cut[3]);
    }

    #[test]
    fn quartile_degrees() {
        let phi = phi_from(DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 + (i + j) as f64 }));
        let g = backbone(&phi).unwrap();
        let q = g.degree_by_quartile(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(q.counts, [1, 1, 1, 1]);
        let deg = g.degrees();
        assert_eq!(q.mean_degree, [deg[0] as f64, deg[1] as f64, deg[2] as f64, deg[3] as f64]);
    }

    #[test]
    fn exports() {
        let phi = phi_from(DMatrix::from_row_slice(3, 3, &[0.0, 0.1, 1.0 / 3.0, 0.1, 0.0, 0.7, 1.0 / 3.0, 0.7, 0.0]));
        let mut g = backbone(&phi).unwrap();
        g.nodes[0].pci = Some(-0.25);
        let mut buf = Vec::new();
        write_edge_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        let back = parse_edge_csv(&text).unwrap();
        assert_eq!(back.len(), 3);
        for (r, e) in back.iter().zip(&g.edges) {
            assert_eq!(r.weight.to_bits(), e.weight.to_bits());
            assert_eq!(r.in_backbone, e.in_backbone);
        }
        let mut dot = Vec::new();
        write_dot(&g, &mut dot).unwrap();
        let dot = String::from_utf8(dot).unwrap();
        assert!(dot.starts_with("graph relatedness {") && dot.matches(" -- ").count() == 3);
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(export_graph(&g, "gexf", &dir.path().join("g")), Err(Error::Usage(_))));
        export_graph(&g, "graphml", &dir.path().join("g.graphml")).unwrap();
    }

    proptest! {
        #[test]
        fn proximity_symmetric_and_row_permutation_invariant(bits in prop::collection::vec(0u8..=1, 5 * 7), shift in 0usize..5) {
            let m = SpecializationMatrix::from_rows(5, &bits).unwrap();
            let v = m.values();
            let perm = DMatrix::from_fn(5, 7, |i, j| v[((i + shift) % 5, j)]);
            let mp = SpecializationMatrix::new(perm, m.economy_ids().to_vec(), m.activity_ids().to_vec()).unwrap();
            for kind in [ProximityKind::MinConditional, ProximityKind::Cooccurrence] {
                let a = proximity(&m, kind).unwrap();
                let b = proximity(&mp, kind).unwrap();
                prop_assert_eq!(a.values(), b.values());
                prop_assert_eq!(a.values(), &a.values().transpose());
                if kind == ProximityKind::MinConditional {
                    prop_assert!(a.values().iter().all(|x| (0.0..=1.0).contains(x)));
                }
            }
        }

        #[test]
        fn backbone_spans_components(w in prop::collection::vec(0.0f64..1.0, 45)) {
            // Upper triangle of a 10-node graph; small weights dropped.
            let mut v = DMatrix::zeros(10, 10);
            let mut k = 0;
            for i in 0..10 {
                for j in i + 1..10 {
                    let x = if w[k] < 0.6 { 0.0 } else { w[k] };
                    v[(i, j)] = x;
                    v[(j, i)] = x;
                    k += 1;
                }
            }
            prop_assume!(v.iter().any(|x| *x > 0.0));
            let g = backbone(&phi_from(v.clone())).unwrap();
            // Components of the full positive graph equal those of the backbone.
            let full = RelatednessGraph { edges: g.edges.iter().map(|e| Edge { in_backbone: true, ..*e }).collect(), ..g.clone() };
            prop_assert_eq!(full.components(), g.components());
            let comps = g.n_components();
            prop_assert!(g.backbone_edges().count() >= 10 - comps);
        }
    }
}
