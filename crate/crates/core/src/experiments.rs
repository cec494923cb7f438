//! Numerical studies: single model runs with their matrix panels, the α
//! sweep, random-instance checks of the separable and shifted production
//! functions, and the network and equilibrium reports.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::EquilibriumRun;
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64, sig17, OutDir, Sig17};
use crate::model::{self, Dims, FactorVectors, GeneratorKind, GeneratorSpec, OutputMatrix, Realisation};
use crate::network::{self, GraphFormat, ProximityKind, ProximityMatrix, RelatednessGraph};
use crate::oracle;
use crate::pipeline::{self, ComplexityResult, ProjectionMatrix, RcaMatrix, SpecializationMatrix};
use crate::rng::{Role, StreamKey};
use crate::stats;
use crate::svg::{render_heatmap, render_heatmap_range, Palette};

/// Per-economy comparison row.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyRow {
    pub id: String,
    pub mean_endowment: f64,
    pub diversity: usize,
    pub eci: f64,
    pub eci_z: f64,
}

/// A generated model pushed through the whole pipeline.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub spec: GeneratorSpec,
    pub realisation: Realisation,
    pub output: OutputMatrix,
    pub rca: RcaMatrix,
    pub specialization: SpecializationMatrix,
    pub projection: ProjectionMatrix,
    pub complexity: ComplexityResult,
    /// Economies that survive pruning, in ECI order.
    pub economies: Vec<EconomyRow>,
    /// `Spearman(ECI, ⟨r⟩_c)` over `economies`; `None` when undefined.
    pub spearman_endowment: Option<f64>,
}

fn lookup<'a>(ids: &'a [String], values: &'a [f64]) -> HashMap<&'a str, f64> {
    ids.iter().map(String::as_str).zip(values.iter().copied()).collect()
}

pub fn run_model(spec: &GeneratorSpec) -> Result<ModelRun> {
    run_realisation(spec, spec.realise()?)
}

fn run_realisation(spec: &GeneratorSpec, realisation: Realisation) -> Result<ModelRun> {
    let output = realisation.output(1.0)?;
    let rca = pipeline::rca(&output)?;
    let specialization = pipeline::binarize(&rca)?;
    let projection = pipeline::project_economies(&specialization)?;
    let complexity = pipeline::economic_complexity(&specialization)?;
    let mean_r = realisation.endowments.mean_endowment();
    let r_of = lookup(realisation.endowments.economy_ids(), &mean_r);
    let diversity = specialization.diversity();
    let div_of: HashMap<&str, usize> = specialization
        .economy_ids()
        .iter()
        .map(String::as_str)
        .zip(diversity.iter().copied())
        .collect();
    let economies: Vec<EconomyRow> = complexity
        .eci
        .ids
        .iter()
        .enumerate()
        .map(|(k, id)| EconomyRow {
            id: id.clone(),
            mean_endowment: r_of[id.as_str()],
            diversity: div_of[id.as_str()],
            eci: complexity.eci.raw[k],
            eci_z: complexity.eci.zscore[k],
        })
        .collect();
    let r: Vec<f64> = economies.iter().map(|e| e.mean_endowment).collect();
    let spearman_endowment = stats::spearman(&complexity.eci.raw, &r);
    Ok(ModelRun {
        spec: spec.clone(),
        realisation,
        output,
        rca,
        specialization,
        projection,
        complexity,
        economies,
        spearman_endowment,
    })
}

#[derive(Serialize)]
struct ModelSummary<'a> {
    spec: SpecSummary,
    shape: (usize, usize),
    eigenvalue: Sig17,
    eigenvalues: Vec<Sig17>,
    eci: Vec<Sig17>,
    pci: Option<Vec<Sig17>>,
    diversity: Vec<usize>,
    ubiquity: Vec<usize>,
    spearman_eci_mean_endowment: Option<Sig17>,
    method: &'a str,
    degenerate: bool,
    converged: bool,
    dropped_economies: &'a [String],
    dropped_activities: &'a [String],
    undefined_rca_rows: usize,
    undefined_rca_cols: usize,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct SpecSummary {
    kind: String,
    economies: usize,
    activities: usize,
    capabilities: usize,
    seed: u64,
    alpha: Sig17,
}

fn spec_summary(s: &GeneratorSpec) -> SpecSummary {
    let kind = match s.kind {
        GeneratorKind::Linspace => "linspace".to_string(),
        GeneratorKind::GaussianMinmax => "gaussian-minmax".to_string(),
        GeneratorKind::Mixed => "mixed".to_string(),
        GeneratorKind::Circulant { width } => format!("circulant(width={width})"),
        GeneratorKind::Block { clusters } => format!("block(clusters={clusters})"),
    };
    SpecSummary {
        kind,
        economies: s.dims.economies,
        activities: s.dims.activities,
        capabilities: s.dims.capabilities,
        seed: s.seed,
        alpha: Sig17(s.alpha),
    }
}

impl ModelRun {
    /// Write the four matrix panels (CSV and SVG; RCA drawn as
    /// `(R − 1)/(R + 1)` so that `R = 1` is white), the ECI/diversity
    /// table, the PCI table and `summary.json`.
    pub fn write(&self, out: &mut OutDir) -> Result<()> {
        let y = &self.output;
        out.text("output.csv", &io::f64_matrix_csv(y.values(), y.economy_ids(), y.activity_ids()))?;
        out.text("output.svg", &render_heatmap(y.values(), Palette::Blues).svg)?;
        let r = &self.rca;
        out.text("rca.csv", &io::f64_matrix_csv(r.values(), r.economy_ids(), r.activity_ids()))?;
        out.text("rca.svg", &render_heatmap_range(&r.values().map(|v| (v - 1.0) / (v + 1.0)), Palette::Diverging, -1.0, 1.0).svg)?;
        let m = &self.specialization;
        out.text("specialization.csv", &io::u8_matrix_csv(m.values(), m.economy_ids(), m.activity_ids()))?;
        out.text("specialization.svg", &render_heatmap(&m.as_f64(), Palette::Binary).svg)?;
        let p = &self.projection;
        out.text("projection.csv", &io::f64_matrix_csv(p.values(), p.ids(), p.ids()))?;
        out.text("projection.svg", &render_heatmap(p.values(), Palette::Blues).svg)?;

        let e = &self.economies;
        out.text(
            "eci.csv",
            &io::table_csv(
                &["id", "mean_endowment", "diversity", "eci", "eci_z"],
                &[
                    e.iter().map(|x| x.id.clone()).collect(),
                    e.iter().map(|x| fmt_f64(x.mean_endowment)).collect(),
                    e.iter().map(|x| x.diversity.to_string()).collect(),
                    e.iter().map(|x| fmt_f64(x.eci)).collect(),
                    e.iter().map(|x| fmt_f64(x.eci_z)).collect(),
                ],
            ),
        )?;
        let ubiquity = m.ubiquity();
        if let Some(pci) = &self.complexity.pci {
            let q = self.realisation.requirements.mean_requirement();
            let q_of = lookup(self.realisation.requirements.activity_ids(), &q);
            let u_of: HashMap<&str, usize> =
                m.activity_ids().iter().map(String::as_str).zip(ubiquity.iter().copied()).collect();
            out.text(
                "pci.csv",
                &io::table_csv(
                    &["id", "mean_requirement", "ubiquity", "pci", "pci_z"],
                    &[
                        pci.ids.clone(),
                        pci.ids.iter().map(|id| fmt_f64(q_of[id.as_str()])).collect(),
                        pci.ids.iter().map(|id| u_of[id.as_str()].to_string()).collect(),
                        pci.raw.iter().map(|v| fmt_f64(*v)).collect(),
                        pci.zscore.iter().map(|v| fmt_f64(*v)).collect(),
                    ],
                ),
            )?;
        }
        let c = &self.complexity;
        let summary = ModelSummary {
            spec: spec_summary(&self.spec),
            shape: y.shape(),
            eigenvalue: Sig17(c.eigenvalue),
            eigenvalues: sig17(&c.eigenvalues),
            eci: sig17(&c.eci.raw),
            pci: c.pci.as_ref().map(|p| sig17(&p.raw)),
            diversity: e.iter().map(|x| x.diversity).collect(),
            ubiquity,
            spearman_eci_mean_endowment: self.spearman_endowment.map(Sig17),
            method: match c.method {
                pipeline::Method::Eigen => "eigen",
                pipeline::Method::Reflections => "reflections",
            },
            degenerate: c.degenerate,
            converged: c.converged,
            dropped_economies: &c.dropped.economies,
            dropped_activities: &c.dropped.activities,
            undefined_rca_rows: self.rca.undefined_rows().len(),
            undefined_rca_cols: self.rca.undefined_cols().len(),
            warnings: &c.warnings,
        };
        out.json("summary.json", &summary)?;
        Ok(())
    }
}

/// Grid, replicate count, model size and seed of an α sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alpha_grid: Vec<f64>,
    pub replicates: usize,
    pub dims: Dims,
    pub seed: u64,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl SweepConfig {
    /// 20 grid points on [0.01, 1], 20 replicates, 50×300×10.
    pub fn desk(seed: u64) -> Self {
        SweepConfig {
            alpha_grid: linspace(0.01, 1.0, 20),
            replicates: 20,
            dims: Dims {
                economies: 50,
                activities: 300,
                capabilities: 10,
            },
            seed,
        }
    }

    /// 50 grid points on [0.01, 1], 250 replicates, 100×1000×10.
    pub fn full(seed: u64) -> Self {
        SweepConfig {
            alpha_grid: linspace(0.01, 1.0, 50),
            replicates: 250,
            dims: Dims {
                economies: 100,
                activities: 1000,
                capabilities: 10,
            },
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub alpha_grid: Vec<f64>,
    pub replicates: usize,
    pub dims: Dims,
    pub seed: u64,
    /// `|Spearman(ECI, ⟨r⟩_c)|` per grid point and replicate; `None` when
    /// the replicate was degenerate.
    pub values: Vec<Vec<Option<f64>>>,
    pub corr_mean: Vec<f64>,
    pub corr_std: Vec<f64>,
    pub excluded: Vec<usize>,
}

impl SweepResult {
    /// Index `i` and midpoint of the largest drop in mean correlation
    /// from grid point `i + 1` down to `i`.
    pub fn steepest_drop(&self) -> Option<(usize, f64)> {
        (0..self.alpha_grid.len().saturating_sub(1))
            .filter(|&i| self.corr_mean[i].is_finite() && self.corr_mean[i + 1].is_finite())
            .max_by(|&a, &b| {
                let da = self.corr_mean[a + 1] - self.corr_mean[a];
                let db = self.corr_mean[b + 1] - self.corr_mean[b];
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .map(|i| (i, 0.5 * (self.alpha_grid[i] + self.alpha_grid[i + 1])))
    }

    pub fn write(&self, out: &mut OutDir) -> Result<()> {
        let n = self.alpha_grid.len();
        out.text(
            "sweep.csv",
            &io::table_csv(
                &["alpha", "corr_mean", "corr_std", "valid", "excluded"],
                &[
                    self.alpha_grid.iter().map(|v| fmt_f64(*v)).collect(),
                    self.corr_mean.iter().map(|v| fmt_f64(*v)).collect(),
                    self.corr_std.iter().map(|v| fmt_f64(*v)).collect(),
                    (0..n).map(|i| (self.replicates - self.excluded[i]).to_string()).collect(),
                    self.excluded.iter().map(usize::to_string).collect(),
                ],
            ),
        )?;
        let mut rows = String::from("alpha_index,replicate,alpha,abs_spearman\n");
        for (i, reps) in self.values.iter().enumerate() {
            for (k, v) in reps.iter().enumerate() {
                let v = v.map(fmt_f64).unwrap_or_else(|| "NaN".into());
                rows.push_str(&format!("{i},{k},{},{v}\n", fmt_f64(self.alpha_grid[i])));
            }
        }
        out.text("sweep_replicates.csv", &rows)?;

        #[derive(Serialize)]
        struct Summary {
            alpha_grid: Vec<Sig17>,
            replicates: usize,
            dims: Dims,
            seed: u64,
            corr_mean: Vec<Sig17>,
            corr_std: Vec<Sig17>,
            excluded: Vec<usize>,
            steepest_drop_index: Option<usize>,
            steepest_drop_alpha: Option<Sig17>,
        }
        let drop = self.steepest_drop();
        out.json(
            "sweep.json",
            &Summary {
                alpha_grid: sig17(&self.alpha_grid),
                replicates: self.replicates,
                dims: self.dims,
                seed: self.seed,
                corr_mean: sig17(&self.corr_mean),
                corr_std: sig17(&self.corr_std),
                excluded: self.excluded.clone(),
                steepest_drop_index: drop.map(|d| d.0),
                steepest_drop_alpha: drop.map(|d| Sig17(d.1)),
            },
        )?;
        Ok(())
    }
}

/// `|Spearman(ECI, ⟨r⟩_c)|` for one sweep cell; `None` if the pipeline
/// fails or the correlation is undefined.
pub fn sweep_cell(spec: &GeneratorSpec, alpha: f64, alpha_index: usize, replicate: usize) -> Option<f64> {
    let realisation = spec.realise_at(alpha, alpha_index, replicate).ok()?;
    match run_realisation(spec, realisation) {
        Ok(run) => run.spearman_endowment.map(f64::abs),
        Err(e) => {
            log::debug!("sweep cell ({alpha_index}, {replicate}) excluded: {e}");
            None
        }
    }
}

/// Mixed-model α sweep. Cells run in parallel; each draws from its own
/// stream keyed by `(seed, alpha_index, replicate)`, so results do not
/// depend on scheduling.
pub fn run_phase_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.replicates == 0 {
        return Err(Error::Validation("sweep needs at least one replicate".into()));
    }
    if cfg.alpha_grid.is_empty() {
        return Err(Error::Validation("sweep grid is empty".into()));
    }
    let spec = GeneratorSpec::new(GeneratorKind::Mixed, cfg.dims, cfg.seed, 1.0)?;
    for a in &cfg.alpha_grid {
        if !(0.0..=1.0).contains(a) {
            return Err(Error::Validation(format!("alpha {a} outside [0, 1]")));
        }
    }
    let cells: Vec<(usize, usize)> = (0..cfg.alpha_grid.len())
        .flat_map(|i| (0..cfg.replicates).map(move |k| (i, k)))
        .collect();
    let flat: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, k)| sweep_cell(&spec, cfg.alpha_grid[i], i, k))
        .collect();
    let values: Vec<Vec<Option<f64>>> = flat.chunks(cfg.replicates).map(<[_]>::to_vec).collect();
    let mut corr_mean = Vec::new();
    let mut corr_std = Vec::new();
    let mut excluded = Vec::new();
    for reps in &values {
        let ok: Vec<f64> = reps.iter().flatten().copied().collect();
        excluded.push(reps.len() - ok.len());
        if ok.is_empty() {
            corr_mean.push(f64::NAN);
            corr_std.push(f64::NAN);
        } else {
            corr_mean.push(stats::mean(&ok));
            corr_std.push(if ok.len() > 1 { stats::std_dev(&ok) } else { 0.0 });
        }
    }
    Ok(SweepResult {
        alpha_grid: cfg.alpha_grid.clone(),
        replicates: cfg.replicates,
        dims: cfg.dims,
        seed: cfg.seed,
        values,
        corr_mean,
        corr_std,
        excluded,
    })
}

/// Outcome of a batch of random production-function instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub instances: usize,
    pub passed: usize,
    /// Largest `|R_cp − 1|` (separable) or number of mismatching cells
    /// (shifted), over all instances.
    pub worst: f64,
    /// Cells skipped because a factor sat within 1e-12 of its mean.
    pub boundary_cells: usize,
}

fn random_vec<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// RCA of `f_c g_p` for random positive factors of size up to 50×80.
pub fn separable_trials(instances: usize, seed: u64) -> Result<TrialSummary> {
    let mut rng = StreamKey::new(seed, Role::Aux(10)).rng();
    let mut passed = 0;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let nc = rng.random_range(1..=50);
        let np = rng.random_range(1..=80);
        let f = random_vec(nc, 1e-3, 10.0, &mut rng);
        let g = random_vec(np, 1e-3, 10.0, &mut rng);
        let (ok, dev) = oracle::check_separable_rca(&f, &g)?;
        passed += usize::from(ok);
        worst = worst.max(dev);
    }
    Ok(TrialSummary {
        instances,
        passed,
        worst,
        boundary_cells: 0,
    })
}

/// Pipeline specialisation of `B + f_c g_p` against the sign condition, for
/// random `B > 0` and positive factors of size up to 50×80.
pub fn shifted_trials(instances: usize, seed: u64) -> Result<TrialSummary> {
    let mut rng = StreamKey::new(seed, Role::Aux(11)).rng();
    let mut passed = 0;
    let mut mismatches = 0usize;
    let mut boundary = 0usize;
    for _ in 0..instances {
        let nc = rng.random_range(2..=50);
        let np = rng.random_range(2..=80);
        let b = rng.random_range(0.01..5.0);
        let f = random_vec(nc, 0.0, 2.0, &mut rng);
        let g = random_vec(np, 0.0, 2.0, &mut rng);
        let fv = FactorVectors::shifted(f.clone(), g.clone(), b)?;
        let m = pipeline::binarize(&pipeline::rca(&model::output_shifted(&fv)?)?)?;
        let expect = oracle::shifted_condition(&f, &g);
        let (mf, mg) = (stats::mean(&f), stats::mean(&g));
        let mut bad = 0;
        for c in 0..nc {
            for p in 0..np {
                if (f[c] - mf).abs() < 1e-12 || (g[p] - mg).abs() < 1e-12 {
                    boundary += 1;
                    continue;
                }
                bad += usize::from(m.values()[(c, p)] != expect.values()[(c, p)]);
            }
        }
        passed += usize::from(bad == 0);
        mismatches += bad;
    }
    Ok(TrialSummary {
        instances,
        passed,
        worst: mismatches as f64,
        boundary_cells: boundary,
    })
}

/// Proximity, backbone and complexity of one specialisation matrix.
#[derive(Debug, Clone)]
pub struct NetworkRun {
    pub proximity: ProximityMatrix,
    pub graph: RelatednessGraph,
    pub complexity: Option<ComplexityResult>,
}

pub fn run_network(m: &SpecializationMatrix, kind: ProximityKind) -> Result<NetworkRun> {
    let proximity = network::proximity(m, kind)?;
    let mut graph = network::backbone(&proximity)?;
    // PCI is decoration; a degenerate or empty projection still yields a graph.
    let complexity = match pipeline::economic_complexity(m) {
        Ok(c) => Some(c),
        Err(e) => {
            log::warn!("no PCI for network nodes: {e}");
            None
        }
    };
    if let Some(pci) = complexity.as_ref().and_then(|c| c.pci.as_ref()) {
        graph.attach_pci(pci);
    }
    Ok(NetworkRun {
        proximity,
        graph,
        complexity,
    })
}

impl NetworkRun {
    /// `edges.csv` with every positive link, `backbone.graphml` and
    /// `backbone.dot` with backbone links only, `proximity.csv/svg` and
    /// `network.json`.
    pub fn write(&self, out: &mut OutDir) -> Result<()> {
        let phi = &self.proximity;
        out.text("proximity.csv", &io::f64_matrix_csv(phi.values(), phi.ids(), phi.ids()))?;
        out.text("proximity.svg", &render_heatmap(phi.values(), Palette::Blues).svg)?;
        out.with_writer("edges.csv", |w| network::write_graph(&self.graph, GraphFormat::Csv, w))?;
        let bb = self.graph.backbone_only();
        out.with_writer("backbone.graphml", |w| network::write_graph(&bb, GraphFormat::GraphMl, w))?;
        out.with_writer("backbone.dot", |w| network::write_graph(&bb, GraphFormat::Dot, w))?;
        out.json("network.json", &self.graph.summary())?;
        Ok(())
    }
}

/// Generator settings for the three network shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkPreset {
    /// Circulant 200×200×200 at α = 0.8.
    Ring,
    /// Mixed 100×200×10 at α = 0.6.
    CorePeriphery,
    /// Two blocks, 100×500×20, 25% block structure.
    Dumbbell,
}

impl NetworkPreset {
    pub fn spec(self, seed: u64) -> Result<GeneratorSpec> {
        let (kind, dims, alpha) = match self {
            NetworkPreset::Ring => (GeneratorKind::Circulant { width: 100 }, (200, 200, 200), 0.8),
            NetworkPreset::CorePeriphery => (GeneratorKind::Mixed, (100, 200, 10), 0.6),
            NetworkPreset::Dumbbell => (GeneratorKind::Block { clusters: 2 }, (100, 500, 20), 0.25),
        };
        GeneratorSpec::new(
            kind,
            Dims {
                economies: dims.0,
                activities: dims.1,
                capabilities: dims.2,
            },
            seed,
            alpha,
        )
    }
}

/// Specialisation matrix of a generated model, without the ECI step.
pub fn specialization_of(spec: &GeneratorSpec) -> Result<SpecializationMatrix> {
    let y = spec.realise()?.output(1.0)?;
    pipeline::binarize(&pipeline::rca(&y)?)
}

/// `prices.csv`, `economies.csv`, `consumption.csv`,
/// `specialization.csv` and `equilibrium.json`.
pub fn write_equilibrium(run: &EquilibriumRun, out: &mut OutDir) -> Result<()> {
    let inp = &run.inputs;
    let (nc, np) = (inp.r.len(), inp.q.len());
    let econ = model::economy_ids(nc);
    let act = model::activity_ids(np);
    let supply = crate::equilibrium::supply(&inp.q, &inp.r);
    let demand = run.consumption.demand();
    let f = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>();
    out.text(
        "prices.csv",
        &io::table_csv(
            &["id", "q", "price", "supply", "demand"],
            &[act.clone(), f(&inp.q), f(run.solution.prices.values()), f(&supply), f(&demand)],
        ),
    )?;
    let a = &run.accounts;
    out.text(
        "economies.csv",
        &io::table_csv(
            &["id", "r", "labor", "wage", "wage_slope", "income", "physical_output"],
            &[econ.clone(), f(&inp.r), f(&a.labor), f(&a.wages), f(&a.wage_slope), f(&a.income), f(&a.physical_output)],
        ),
    )?;
    out.text("consumption.csv", &io::f64_matrix_csv(run.consumption.values(), &econ, &act))?;
    let m = &run.specialization;
    out.text("specialization.csv", &io::u8_matrix_csv(m.values(), m.economy_ids(), m.activity_ids()))?;

    #[derive(Serialize)]
    struct Summary {
        economies: usize,
        activities: usize,
        method: String,
        iterations: usize,
        fixed_point_residual: Sig17,
        market_clearing_residual: Sig17,
        budget_residual: Sig17,
        supply_identity_residual: Sig17,
        specialization_threshold: Sig17,
        price_weighted_mean_q: Sig17,
        spearman_price_q: Option<Sig17>,
    }
    let s = &run.solution;
    out.json(
        "equilibrium.json",
        &Summary {
            economies: nc,
            activities: np,
            method: format!("{:?}", s.method).to_lowercase(),
            iterations: s.iterations,
            fixed_point_residual: Sig17(s.fixed_point_residual),
            market_clearing_residual: Sig17(s.market_clearing_residual),
            budget_residual: Sig17(run.budget_residual),
            supply_identity_residual: Sig17(run.supply_identity_residual),
            specialization_threshold: Sig17(run.threshold),
            price_weighted_mean_q: Sig17(s.prices.weighted_mean(&inp.q)),
            spearman_price_q: stats::spearman(s.prices.values(), &inp.q).map(Sig17),
        },
    )?;
    Ok(())
}
