//! Capability models of production.
//!
//! Endowment (`r`) and requirement (`q`) parameters, their generators, and the
//! output matrices produced from them: the single-capability model, the
//! product form over many capabilities, and the shifted separable form
//! `B + f_c g_p`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Role, StreamKey};

const PROB_TOL: f64 = 1e-12;

pub(crate) fn economy_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

pub(crate) fn activity_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

fn check_probabilities(name: &str, values: impl IntoIterator<Item = f64>) -> Result<()> {
    for v in values {
        if !(v >= -PROB_TOL && v <= 1.0 + PROB_TOL) {
            return Err(Error::Validation(format!(
                "{name} entry {v} is not a probability"
            )));
        }
    }
    Ok(())
}

fn row_means(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.ncols() as f64;
    m.row_iter().map(|row| row.sum() / n).collect()
}

/// Stable permutation sorting `keys` descending (or ascending).
fn sort_order(keys: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = keys[a].total_cmp(&keys[b]);
        if descending {
            ord.reverse()
        } else {
            ord
        }
    });
    idx
}

fn permute_rows(m: &DMatrix<f64>, order: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(order.len(), m.ncols(), |i, j| m[(order[i], j)])
}

/// `r_{c,b}`: probability that economy `c` is endowed with capability `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndowmentMatrix {
    values: DMatrix<f64>,
    economy_ids: Vec<String>,
}

impl EndowmentMatrix {
    pub fn new(values: DMatrix<f64>, economy_ids: Vec<String>) -> Result<Self> {
        if values.nrows() < 2 || values.ncols() < 1 {
            return Err(Error::Dimension(format!(
                "endowment matrix needs at least 2 economies and 1 capability, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if economy_ids.len() != values.nrows() {
            return Err(Error::Dimension("economy id count does not match rows".into()));
        }
        check_probabilities("endowment", values.iter().copied())?;
        Ok(EndowmentMatrix {
            values,
            economy_ids,
        })
    }

    /// Single-capability endowment: one column holding `r`.
    pub fn from_vector(r: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(r.len(), 1, r), economy_ids(r.len()))
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn economy_ids(&self) -> &[String] {
        &self.economy_ids
    }

    pub fn n_economies(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_capabilities(&self) -> usize {
        self.values.ncols()
    }

    /// Average capability endowment of each economy, `<r>_c`.
    pub fn mean_endowment(&self) -> Vec<f64> {
        row_means(&self.values)
    }

    /// Rows reordered by descending average endowment (stable).
    pub fn sorted_descending(&self) -> Self {
        let order = sort_order(&self.mean_endowment(), true);
        EndowmentMatrix {
            values: permute_rows(&self.values, &order),
            economy_ids: order.iter().map(|&i| self.economy_ids[i].clone()).collect(),
        }
    }
}

/// `q_{p,b}`: probability that activity `p` requires capability `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct RequirementMatrix {
    values: DMatrix<f64>,
    activity_ids: Vec<String>,
}

impl RequirementMatrix {
    pub fn new(values: DMatrix<f64>, activity_ids: Vec<String>) -> Result<Self> {
        if values.nrows() < 2 || values.ncols() < 1 {
            return Err(Error::Dimension(format!(
                "requirement matrix needs at least 2 activities and 1 capability, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if activity_ids.len() != values.nrows() {
            return Err(Error::Dimension("activity id count does not match rows".into()));
        }
        check_probabilities("requirement", values.iter().copied())?;
        Ok(RequirementMatrix {
            values,
            activity_ids,
        })
    }

    pub fn from_vector(q: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(q.len(), 1, q), activity_ids(q.len()))
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn activity_ids(&self) -> &[String] {
        &self.activity_ids
    }

    pub fn n_activities(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_capabilities(&self) -> usize {
        self.values.ncols()
    }

    pub fn mean_requirement(&self) -> Vec<f64> {
        row_means(&self.values)
    }

    /// Rows reordered by ascending average requirement (stable).
    pub fn sorted_ascending(&self) -> Self {
        let order = sort_order(&self.mean_requirement(), false);
        RequirementMatrix {
            values: permute_rows(&self.values, &order),
            activity_ids: order.iter().map(|&i| self.activity_ids[i].clone()).collect(),
        }
    }
}

/// `Y_cp`, economies by activities.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputMatrix {
    values: DMatrix<f64>,
    scale: f64,
    economy_ids: Vec<String>,
    activity_ids: Vec<String>,
}

impl OutputMatrix {
    pub fn new(
        values: DMatrix<f64>,
        scale: f64,
        economy_ids: Vec<String>,
        activity_ids: Vec<String>,
    ) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Validation(format!("scale must be positive, got {scale}")));
        }
        if economy_ids.len() != values.nrows() || activity_ids.len() != values.ncols() {
            return Err(Error::Dimension("id counts do not match output matrix".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Validation(format!("output entry {v} is negative or not finite")));
        }
        Ok(OutputMatrix {
            values,
            scale,
            economy_ids,
            activity_ids,
        })
    }

    /// Output with default ids `c0..`, `p0..` and unit scale.
    pub fn from_values(values: DMatrix<f64>) -> Result<Self> {
        let (nc, np) = values.shape();
        Self::new(values, 1.0, economy_ids(nc), activity_ids(np))
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn economy_ids(&self) -> &[String] {
        &self.economy_ids
    }

    pub fn activity_ids(&self) -> &[String] {
        &self.activity_ids
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }
}

/// Factor functions for the separable and shifted production functions.
///
/// `f[c]` and `g[p]` are the economy and activity factor functions; `shift`
/// is the additive `B`. When built from factor endowments the raw `K_c`,
/// `K_p` and exponent are kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorVectors {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub shift: f64,
    pub exponent: Option<f64>,
    pub k_economy: Option<Vec<f64>>,
    pub k_activity: Option<Vec<f64>>,
}

impl FactorVectors {
    pub fn shifted(f: Vec<f64>, g: Vec<f64>, shift: f64) -> Result<Self> {
        if f.iter().chain(&g).any(|v| !v.is_finite()) || !shift.is_finite() {
            return Err(Error::Validation("factor values must be finite".into()));
        }
        Ok(FactorVectors {
            f,
            g,
            shift,
            exponent: None,
            k_economy: None,
            k_activity: None,
        })
    }

    /// Relative factor intensity form: `f = K_c^γ`, `g = K_p^(-γ)`.
    pub fn factor_intensity(k_economy: Vec<f64>, k_activity: Vec<f64>, gamma: f64, shift: f64) -> Result<Self> {
        if k_economy.iter().chain(&k_activity).any(|k| !(*k > 0.0)) {
            return Err(Error::Validation("factor endowments and intensities must be positive".into()));
        }
        let f = k_economy.iter().map(|k| k.powf(gamma)).collect();
        let g = k_activity.iter().map(|k| k.powf(-gamma)).collect();
        let mut fv = Self::shifted(f, g, shift)?;
        fv.exponent = Some(gamma);
        fv.k_economy = Some(k_economy);
        fv.k_activity = Some(k_activity);
        Ok(fv)
    }
}

/// `n` evenly spaced probabilities from 0 to 1 inclusive.
pub fn gen_linspace(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Dimension(format!("linspace needs n >= 2, got {n}")));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 / last).collect())
}

/// Standard normal draws min-max rescaled onto [0, 1].
pub fn gen_gaussian_minmax<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Dimension(format!("gaussian-minmax needs n >= 2, got {n}")));
    }
    loop {
        let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let lo = draws.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = draws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        if span > 0.0 {
            return Ok(draws
                .iter()
                .map(|&x| if x == hi { 1.0 } else { (x - lo) / span })
                .collect());
        }
        log::warn!("degenerate gaussian draw, redrawing");
    }
}

fn mix_values<R: Rng + ?Sized>(base: &[f64], alpha: f64, n_b: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Validation(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if n_b == 0 {
        return Err(Error::Dimension("need at least one capability".into()));
    }
    check_probabilities("base", base.iter().copied())?;
    let noise = 1.0 - alpha;
    // Row-major draw order so the stream layout does not depend on storage.
    let mut m = DMatrix::zeros(base.len(), n_b);
    for (i, &b) in base.iter().enumerate() {
        for j in 0..n_b {
            let u: f64 = rng.random();
            m[(i, j)] = alpha * b + noise * u;
        }
    }
    Ok(m)
}

/// `r_{c,b} = α r_c + (1 − α) u_{c,b}` with `u` uniform on [0, 1).
pub fn mix_endowments<R: Rng + ?Sized>(base: &[f64], alpha: f64, n_b: usize, rng: &mut R) -> Result<EndowmentMatrix> {
    let m = mix_values(base, alpha, n_b, rng)?;
    EndowmentMatrix::new(m, economy_ids(base.len()))
}

/// Requirement-side counterpart of [`mix_endowments`].
pub fn mix_requirements<R: Rng + ?Sized>(base: &[f64], alpha: f64, n_b: usize, rng: &mut R) -> Result<RequirementMatrix> {
    let m = mix_values(base, alpha, n_b, rng)?;
    RequirementMatrix::new(m, activity_ids(base.len()))
}

/// Symmetric first row peaking at the centre column `n / 2` and falling
/// linearly to zero at circular distance `width`.
pub fn linear_profile(n: usize, width: usize) -> Result<Vec<f64>> {
    if n < 2 || width == 0 {
        return Err(Error::Validation(format!("profile needs n >= 2 and width >= 1, got n={n}, width={width}")));
    }
    let c = n / 2;
    Ok((0..n)
        .map(|j| {
            let d = j.abs_diff(c);
            let d = d.min(n - d);
            (1.0 - d as f64 / width as f64).max(0.0)
        })
        .collect())
}

fn circulant_values<R: Rng + ?Sized>(profile: &[f64], alpha: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    let n = profile.len();
    if n < 2 {
        return Err(Error::Dimension("circulant profile needs at least 2 entries".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Validation(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    check_probabilities("profile", profile.iter().copied())?;
    let c = n / 2;
    for d in 1..n {
        let a = profile[(c + d) % n];
        let b = profile[(c + n - d) % n];
        if (a - b).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "circulant profile is not symmetric about column {c}: offset {d} gives {a} vs {b}"
            )));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let u: f64 = rng.random();
            m[(i, j)] = alpha * profile[(j + c + n - i) % n] + (1.0 - alpha) * u;
        }
    }
    Ok(m)
}

/// Row `i` is `profile` rotated by `i`, mixed with uniform noise at weight `1 − α`.
pub fn gen_circulant_endowments<R: Rng + ?Sized>(profile: &[f64], alpha: f64, rng: &mut R) -> Result<EndowmentMatrix> {
    let m = circulant_values(profile, alpha, rng)?;
    let n = m.nrows();
    EndowmentMatrix::new(m, economy_ids(n))
}

pub fn gen_circulant_requirements<R: Rng + ?Sized>(profile: &[f64], alpha: f64, rng: &mut R) -> Result<RequirementMatrix> {
    let m = circulant_values(profile, alpha, rng)?;
    let n = m.nrows();
    RequirementMatrix::new(m, activity_ids(n))
}

/// Cluster index of item `i` when `n` items are cut into `k` equal blocks,
/// the remainder going to the last block.
pub fn block_of(i: usize, n: usize, k: usize) -> usize {
    (i / (n / k)).min(k - 1)
}

fn block_values<R: Rng + ?Sized>(n: usize, n_b: usize, k: usize, alpha: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    if k == 0 || k > n.min(n_b) {
        return Err(Error::Validation(format!(
            "cluster count {k} must lie in 1..={}",
            n.min(n_b)
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Validation(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mut m = DMatrix::zeros(n, n_b);
    for i in 0..n {
        let bi = block_of(i, n, k);
        for j in 0..n_b {
            let indicator = if block_of(j, n_b, k) == bi { 1.0 } else { 0.0 };
            let u: f64 = rng.random();
            m[(i, j)] = alpha * indicator + (1.0 - alpha) * u;
        }
    }
    Ok(m)
}

/// `α · block_indicator + (1 − α) · uniform` with `k` diagonal blocks.
pub fn gen_block_endowments<R: Rng + ?Sized>(n: usize, n_b: usize, k: usize, alpha: f64, rng: &mut R) -> Result<EndowmentMatrix> {
    EndowmentMatrix::new(block_values(n, n_b, k, alpha, rng)?, economy_ids(n))
}

pub fn gen_block_requirements<R: Rng + ?Sized>(n: usize, n_b: usize, k: usize, alpha: f64, rng: &mut R) -> Result<RequirementMatrix> {
    RequirementMatrix::new(block_values(n, n_b, k, alpha, rng)?, activity_ids(n))
}

/// Single-capability output `Y_cp = A(1 − q_p(1 − r_c))`, rows sorted by
/// descending `r` and columns by ascending `q`.
pub fn output_single(r: &[f64], q: &[f64], scale: f64) -> Result<OutputMatrix> {
    check_probabilities("r", r.iter().copied())?;
    check_probabilities("q", q.iter().copied())?;
    if r.is_empty() || q.is_empty() {
        return Err(Error::Dimension("r and q must be non-empty".into()));
    }
    let rows = sort_order(r, true);
    let cols = sort_order(q, false);
    let values = DMatrix::from_fn(r.len(), q.len(), |i, j| {
        scale * (1.0 - q[cols[j]] * (1.0 - r[rows[i]]))
    });
    OutputMatrix::new(
        values,
        scale,
        rows.iter().map(|&i| format!("c{i}")).collect(),
        cols.iter().map(|&j| format!("p{j}")).collect(),
    )
}

/// Product-form output `Y_cp = A ∏_b (1 − q_{p,b}(1 − r_{c,b}))`, keeping the
/// row order of both parameter matrices.
pub fn output_multi(endowments: &EndowmentMatrix, requirements: &RequirementMatrix, scale: f64) -> Result<OutputMatrix> {
    let nb = endowments.n_capabilities();
    if requirements.n_capabilities() != nb {
        return Err(Error::Dimension(format!(
            "endowments have {nb} capabilities but requirements have {}",
            requirements.n_capabilities()
        )));
    }
    let r = endowments.values();
    let q = requirements.values();
    let (nc, np) = (r.nrows(), q.nrows());
    let mut values = DMatrix::zeros(nc, np);
    for c in 0..nc {
        for p in 0..np {
            let mut y = scale;
            for b in 0..nb {
                y *= 1.0 - q[(p, b)] * (1.0 - r[(c, b)]);
            }
            values[(c, p)] = y;
        }
    }
    OutputMatrix::new(
        values,
        scale,
        endowments.economy_ids().to_vec(),
        requirements.activity_ids().to_vec(),
    )
}

/// Shifted separable output `Y_cp = B + f_c g_p`.
pub fn output_shifted(fv: &FactorVectors) -> Result<OutputMatrix> {
    if fv.f.is_empty() || fv.g.is_empty() {
        return Err(Error::Dimension("factor vectors must be non-empty".into()));
    }
    let values = DMatrix::from_fn(fv.f.len(), fv.g.len(), |c, p| fv.shift + fv.f[c] * fv.g[p]);
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(Error::Validation(format!(
            "shifted production gives negative output {v}; raise B or rescale f, g"
        )));
    }
    OutputMatrix::from_values(values)
}

/// How endowment and requirement parameters are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    /// Evenly spaced baseline, no noise.
    Linspace,
    /// Min-max rescaled normal draws as baseline, mixed at weight `alpha`.
    GaussianMinmax,
    /// Evenly spaced baseline mixed with uniform noise at weight `alpha`.
    Mixed,
    /// Symmetric circulant endowments and requirements (square models only).
    Circulant { width: usize },
    /// Block-diagonal endowments and requirements with `clusters` blocks.
    Block { clusters: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub economies: usize,
    pub activities: usize,
    pub capabilities: usize,
}

/// Everything needed to regenerate a model realisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dims: Dims,
    pub seed: u64,
    pub alpha: f64,
}

/// Flat on-disk form of [`GeneratorSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    economies: usize,
    activities: usize,
    #[serde(default = "one")]
    capabilities: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "unit")]
    alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clusters: Option<usize>,
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<RawSpec> for GeneratorSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let kind = match raw.kind.as_str() {
            "linspace" => GeneratorKind::Linspace,
            "gaussian-minmax" => GeneratorKind::GaussianMinmax,
            "mixed" => GeneratorKind::Mixed,
            "circulant" => GeneratorKind::Circulant {
                width: raw.width.unwrap_or((raw.economies / 2).max(1)),
            },
            "block" => GeneratorKind::Block {
                clusters: raw.clusters.unwrap_or(2),
            },
            other => return Err(Error::Validation(format!("unknown generator kind `{other}`"))),
        };
        let spec = GeneratorSpec {
            kind,
            dims: Dims {
                economies: raw.economies,
                activities: raw.activities,
                capabilities: raw.capabilities,
            },
            seed: raw.seed,
            alpha: raw.alpha,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<GeneratorSpec> for RawSpec {
    fn from(s: GeneratorSpec) -> Self {
        let (kind, width, clusters) = match s.kind {
            GeneratorKind::Linspace => ("linspace", None, None),
            GeneratorKind::GaussianMinmax => ("gaussian-minmax", None, None),
            GeneratorKind::Mixed => ("mixed", None, None),
            GeneratorKind::Circulant { width } => ("circulant", Some(width), None),
            GeneratorKind::Block { clusters } => ("block", None, Some(clusters)),
        };
        RawSpec {
            kind: kind.to_string(),
            economies: s.dims.economies,
            activities: s.dims.activities,
            capabilities: s.dims.capabilities,
            seed: s.seed,
            alpha: s.alpha,
            width,
            clusters,
        }
    }
}

/// Generated parameters for one model realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Realisation {
    pub endowments: EndowmentMatrix,
    pub requirements: RequirementMatrix,
}

impl Realisation {
    pub fn output(&self, scale: f64) -> Result<OutputMatrix> {
        output_multi(&self.endowments, &self.requirements, scale)
    }
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, dims: Dims, seed: u64, alpha: f64) -> Result<Self> {
        let spec = GeneratorSpec {
            kind,
            dims,
            seed,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        if d.economies < 2 || d.activities < 2 || d.capabilities < 1 {
            return Err(Error::Dimension(format!(
                "need at least 2 economies, 2 activities and 1 capability, got {}x{}x{}",
                d.economies, d.activities, d.capabilities
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Validation(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        match self.kind {
            GeneratorKind::Linspace if self.alpha != 1.0 => Err(Error::Validation(
                "linspace models are noise-free; use kind = \"mixed\" to set alpha".into(),
            )),
            GeneratorKind::Circulant { width } => {
                if d.economies != d.activities || d.economies != d.capabilities {
                    return Err(Error::Validation(
                        "circulant models need equal economy, activity and capability counts".into(),
                    ));
                }
                if width == 0 {
                    return Err(Error::Validation("circulant width must be at least 1".into()));
                }
                Ok(())
            }
            GeneratorKind::Block { clusters } => {
                let limit = d.economies.min(d.activities).min(d.capabilities);
                if clusters == 0 || clusters > limit {
                    return Err(Error::Validation(format!("cluster count {clusters} must lie in 1..={limit}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn baselines(&self, key: StreamKey) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.dims;
        match self.kind {
            GeneratorKind::GaussianMinmax => Ok((
                gen_gaussian_minmax(d.economies, &mut key.with_role(Role::EndowmentBase).rng())?,
                gen_gaussian_minmax(d.activities, &mut key.with_role(Role::RequirementBase).rng())?,
            )),
            _ => Ok((gen_linspace(d.economies)?, gen_linspace(d.activities)?)),
        }
    }

    /// Baseline vectors `r`, `q` for the single-capability model, in
    /// generation order (unsorted).
    pub fn single_parameters(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        self.baselines(StreamKey::new(self.seed, Role::EndowmentBase))
    }

    /// Realisation for sweep cell `(alpha_index, replicate)` with the given `alpha`.
    pub fn realise_at(&self, alpha: f64, alpha_index: usize, replicate: usize) -> Result<Realisation> {
        let d = self.dims;
        let key = StreamKey::at(self.seed, alpha_index, replicate, Role::EndowmentNoise);
        let mut r_noise = key.with_role(Role::EndowmentNoise).rng();
        let mut q_noise = key.with_role(Role::RequirementNoise).rng();
        match self.kind {
            GeneratorKind::Linspace | GeneratorKind::GaussianMinmax | GeneratorKind::Mixed => {
                let (r, q) = self.baselines(key)?;
                let endowments = mix_endowments(&r, alpha, d.capabilities, &mut r_noise)?;
                let requirements = mix_requirements(&q, alpha, d.capabilities, &mut q_noise)?;
                Ok(Realisation {
                    endowments: endowments.sorted_descending(),
                    requirements: requirements.sorted_ascending(),
                })
            }
            GeneratorKind::Circulant { width } => {
                let profile = linear_profile(d.economies, width)?;
                Ok(Realisation {
                    endowments: gen_circulant_endowments(&profile, alpha, &mut r_noise)?,
                    requirements: gen_circulant_requirements(&profile, alpha, &mut q_noise)?,
                })
            }
            GeneratorKind::Block { clusters } => Ok(Realisation {
                endowments: gen_block_endowments(d.economies, d.capabilities, clusters, alpha, &mut r_noise)?,
                requirements: gen_block_requirements(d.activities, d.capabilities, clusters, alpha, &mut q_noise)?,
            }),
        }
    }

    pub fn realise(&self) -> Result<Realisation> {
        self.realise_at(self.alpha, 0, 0)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&RawSpec::from(self.clone())).expect("flat spec always serialises")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<generator spec>".into(),
            message: e.to_string(),
        })?;
        GeneratorSpec::try_from(raw)
    }
}
