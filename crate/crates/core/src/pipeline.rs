//! The economic-complexity pipeline: revealed comparative advantage,
//! binary specialisation, bipartite projections and the ECI/PCI vectors.

use nalgebra::DMatrix;

use crate::eigen::{self, EigenOptions, SecondEigen, SignAnchor, Solver};
use crate::error::{Error, Result};
use crate::model::OutputMatrix;
use crate::stats;

/// RCA values this close to 1 (relative) count as ties and are specialised.
///
/// Model-generated ties, such as an economy sitting exactly at the mean
/// endowment, are exact in real arithmetic but land a few ulps either side
/// of 1 in floating point.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Revealed comparative advantage `R_cp = Y_cp Y / (Y_c Y_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaMatrix {
    values: DMatrix<f64>,
    economy_ids: Vec<String>,
    activity_ids: Vec<String>,
    undefined_rows: Vec<usize>,
    undefined_cols: Vec<usize>,
}

impl RcaMatrix {
    /// Entries in undefined rows or columns are NaN.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn economy_ids(&self) -> &[String] {
        &self.economy_ids
    }

    pub fn activity_ids(&self) -> &[String] {
        &self.activity_ids
    }

    /// Economies with zero total output.
    pub fn undefined_rows(&self) -> &[usize] {
        &self.undefined_rows
    }

    /// Activities with zero total output.
    pub fn undefined_cols(&self) -> &[usize] {
        &self.undefined_cols
    }

    pub fn is_defined(&self) -> bool {
        self.undefined_rows.is_empty() && self.undefined_cols.is_empty()
    }

    /// Copy without the undefined rows and columns.
    pub fn drop_undefined(&self) -> RcaMatrix {
        let rows: Vec<usize> = (0..self.values.nrows()).filter(|i| !self.undefined_rows.contains(i)).collect();
        let cols: Vec<usize> = (0..self.values.ncols()).filter(|j| !self.undefined_cols.contains(j)).collect();
        for &i in &self.undefined_rows {
            log::warn!("dropping economy {} with zero output", self.economy_ids[i]);
        }
        for &j in &self.undefined_cols {
            log::warn!("dropping activity {} with zero output", self.activity_ids[j]);
        }
        RcaMatrix {
            values: DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.values[(rows[i], cols[j])]),
            economy_ids: rows.iter().map(|&i| self.economy_ids[i].clone()).collect(),
            activity_ids: cols.iter().map(|&j| self.activity_ids[j].clone()).collect(),
            undefined_rows: vec![],
            undefined_cols: vec![],
        }
    }

    /// Output-weighted mean of RCA, `Σ R_cp Y_c Y_p / Y²`, which is 1 by
    /// construction.
    pub fn weighted_mean(&self, y: &OutputMatrix) -> f64 {
        let v = y.values();
        let total = v.sum();
        let yc: Vec<f64> = v.row_iter().map(|r| r.sum()).collect();
        let yp: Vec<f64> = v.column_iter().map(|c| c.sum()).collect();
        let mut acc = 0.0;
        for c in 0..v.nrows() {
            for p in 0..v.ncols() {
                let r = self.values[(c, p)];
                if r.is_finite() {
                    acc += r * yc[c] * yp[p];
                }
            }
        }
        acc / (total * total)
    }
}

pub fn rca(y: &OutputMatrix) -> Result<RcaMatrix> {
    let v = y.values();
    let total = v.sum();
    if !(total > 0.0) {
        return Err(Error::EmptyInput("output matrix sums to zero".into()));
    }
    let yc: Vec<f64> = v.row_iter().map(|r| r.sum()).collect();
    let yp: Vec<f64> = v.column_iter().map(|c| c.sum()).collect();
    let undefined_rows: Vec<usize> = (0..yc.len()).filter(|&i| yc[i] == 0.0).collect();
    let undefined_cols: Vec<usize> = (0..yp.len()).filter(|&j| yp[j] == 0.0).collect();
    let values = DMatrix::from_fn(v.nrows(), v.ncols(), |c, p| {
        if yc[c] == 0.0 || yp[p] == 0.0 {
            f64::NAN
        } else {
            (v[(c, p)] / yc[c]) / (yp[p] / total)
        }
    });
    Ok(RcaMatrix {
        values,
        economy_ids: y.economy_ids().to_vec(),
        activity_ids: y.activity_ids().to_vec(),
        undefined_rows,
        undefined_cols,
    })
}

/// Binary specialisation matrix `M_cp` with its diversity and ubiquity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializationMatrix {
    values: DMatrix<u8>,
    economy_ids: Vec<String>,
    activity_ids: Vec<String>,
}

/// Rows and columns removed by [`SpecializationMatrix::pruned`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dropped {
    pub economies: Vec<String>,
    pub activities: Vec<String>,
}

impl Dropped {
    pub fn is_empty(&self) -> bool {
        self.economies.is_empty() && self.activities.is_empty()
    }
}

impl SpecializationMatrix {
    pub fn new(values: DMatrix<u8>, economy_ids: Vec<String>, activity_ids: Vec<String>) -> Result<Self> {
        if economy_ids.len() != values.nrows() || activity_ids.len() != values.ncols() {
            return Err(Error::Dimension("id counts do not match specialization matrix".into()));
        }
        if values.iter().any(|v| *v > 1) {
            return Err(Error::Validation("specialization entries must be 0 or 1".into()));
        }
        Ok(SpecializationMatrix {
            values,
            economy_ids,
            activity_ids,
        })
    }

    /// From row-major 0/1 data with default ids.
    pub fn from_rows(rows: usize, data: &[u8]) -> Result<Self> {
        if rows == 0 || data.len() % rows != 0 {
            return Err(Error::Dimension("data length is not a multiple of the row count".into()));
        }
        let cols = data.len() / rows;
        Self::new(
            DMatrix::from_row_slice(rows, cols, data),
            crate::model::economy_ids(rows),
            crate::model::activity_ids(cols),
        )
    }

    pub fn values(&self) -> &DMatrix<u8> {
        &self.values
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

    pub fn as_f64(&self) -> DMatrix<f64> {
        self.values.map(f64::from)
    }

    /// `M_c`: number of activities each economy is specialised in.
    pub fn diversity(&self) -> Vec<usize> {
        self.values.row_iter().map(|r| r.iter().map(|&v| v as usize).sum()).collect()
    }

    /// `M_p`: number of economies specialised in each activity.
    pub fn ubiquity(&self) -> Vec<usize> {
        self.values.column_iter().map(|c| c.iter().map(|&v| v as usize).sum()).collect()
    }

    pub fn transposed(&self) -> SpecializationMatrix {
        SpecializationMatrix {
            values: self.values.transpose(),
            economy_ids: self.activity_ids.clone(),
            activity_ids: self.economy_ids.clone(),
        }
    }

    /// Repeatedly remove zero-diversity rows and zero-ubiquity columns.
    pub fn pruned(&self) -> (SpecializationMatrix, Dropped) {
        let mut rows: Vec<usize> = (0..self.values.nrows()).collect();
        let mut cols: Vec<usize> = (0..self.values.ncols()).collect();
        loop {
            let keep_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| cols.iter().any(|&j| self.values[(i, j)] == 1))
                .collect();
            let keep_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&j| keep_rows.iter().any(|&i| self.values[(i, j)] == 1))
                .collect();
            let stable = keep_rows.len() == rows.len() && keep_cols.len() == cols.len();
            rows = keep_rows;
            cols = keep_cols;
            if stable {
                break;
            }
        }
        let dropped = Dropped {
            economies: (0..self.values.nrows())
                .filter(|i| !rows.contains(i))
                .map(|i| self.economy_ids[i].clone())
                .collect(),
            activities: (0..self.values.ncols())
                .filter(|j| !cols.contains(j))
                .map(|j| self.activity_ids[j].clone())
                .collect(),
        };
        let m = SpecializationMatrix {
            values: DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.values[(rows[i], cols[j])]),
            economy_ids: rows.iter().map(|&i| self.economy_ids[i].clone()).collect(),
            activity_ids: cols.iter().map(|&j| self.activity_ids[j].clone()).collect(),
        };
        (m, dropped)
    }
}

/// `M_cp = 1` iff `R_cp ≥ 1`, with [`TIE_TOLERANCE`] applied at the boundary.
pub fn binarize(r: &RcaMatrix) -> Result<SpecializationMatrix> {
    binarize_with(r, TIE_TOLERANCE)
}

pub fn binarize_with(r: &RcaMatrix, tie_tolerance: f64) -> Result<SpecializationMatrix> {
    if !r.is_defined() {
        return Err(Error::Validation(format!(
            "RCA has {} undefined rows and {} undefined columns; call drop_undefined first",
            r.undefined_rows.len(),
            r.undefined_cols.len()
        )));
    }
    let threshold = 1.0 - tie_tolerance;
    Ok(SpecializationMatrix {
        values: r.values.map(|v| u8::from(v >= threshold)),
        economy_ids: r.economy_ids.clone(),
        activity_ids: r.activity_ids.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    Economies,
    Activities,
}

/// What to do with zero-diversity rows and zero-ubiquity columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroPolicy {
    #[default]
    Drop,
    Error,
}

/// Row-stochastic similarity matrix `M_cc'` (or `M_pp'`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    values: DMatrix<f64>,
    kind: ProjectionKind,
    ids: Vec<String>,
    degrees: Option<Vec<f64>>,
    dropped: Dropped,
}

impl ProjectionMatrix {
    /// Wrap an arbitrary row-stochastic matrix.
    pub fn new(values: DMatrix<f64>, kind: ProjectionKind, ids: Vec<String>) -> Result<Self> {
        let n = values.nrows();
        if n != values.ncols() {
            return Err(Error::Dimension(format!("projection must be square, got {}x{}", n, values.ncols())));
        }
        if ids.len() != n {
            return Err(Error::Dimension("id count does not match projection".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Validation("projection entries must be nonnegative".into()));
        }
        for (i, row) in values.row_iter().enumerate() {
            let s = row.sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("row {i} sums to {s}, not 1")));
            }
        }
        Ok(ProjectionMatrix {
            values,
            kind,
            ids,
            degrees: None,
            dropped: Dropped::default(),
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Diversity (or ubiquity) of each retained row, when built from a
    /// specialisation matrix. Proportional to the stationary distribution.
    pub fn degrees(&self) -> Option<&[f64]> {
        self.degrees.as_deref()
    }

    /// Rows/columns removed before projecting.
    pub fn dropped(&self) -> &Dropped {
        &self.dropped
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }
}

fn prepare(m: &SpecializationMatrix, policy: ZeroPolicy) -> Result<(SpecializationMatrix, Dropped)> {
    let (pruned, dropped) = m.pruned();
    if !dropped.is_empty() {
        match policy {
            ZeroPolicy::Error => {
                return Err(Error::Validation(format!(
                    "zero diversity rows {:?} or zero ubiquity columns {:?}",
                    dropped.economies, dropped.activities
                )))
            }
            ZeroPolicy::Drop => {
                log::warn!(
                    "dropping {} economies and {} activities with zero diversity/ubiquity",
                    dropped.economies.len(),
                    dropped.activities.len()
                );
            }
        }
    }
    if pruned.shape().0 < 2 || pruned.shape().1 < 1 {
        return Err(Error::EmptyInput("fewer than two economies remain after pruning".into()));
    }
    Ok((pruned, dropped))
}

fn project_rows(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let row_deg: Vec<f64> = m.row_iter().map(|r| r.sum()).collect();
    let col_deg: Vec<f64> = m.column_iter().map(|c| c.sum()).collect();
    let n = m.nrows();
    // D_c M D_p Mᵀ
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |c, p| m[(c, p)] / col_deg[p]);
    let mut out = &scaled * m.transpose();
    for c in 0..n {
        let inv = 1.0 / row_deg[c];
        out.row_mut(c).iter_mut().for_each(|v| *v *= inv);
    }
    (out, row_deg)
}

/// `M_cc' = (1/M_c) Σ_p M_cp M_c'p / M_p`.
pub fn project_economies(m: &SpecializationMatrix) -> Result<ProjectionMatrix> {
    project_economies_with(m, ZeroPolicy::Drop)
}

pub fn project_economies_with(m: &SpecializationMatrix, policy: ZeroPolicy) -> Result<ProjectionMatrix> {
    let (pruned, dropped) = prepare(m, policy)?;
    let (values, degrees) = project_rows(&pruned.as_f64());
    Ok(ProjectionMatrix {
        values,
        kind: ProjectionKind::Economies,
        ids: pruned.economy_ids,
        degrees: Some(degrees),
        dropped,
    })
}

/// `M_pp' = (1/M_p) Σ_c M_cp M_cp' / M_c`.
pub fn project_activities(m: &SpecializationMatrix) -> Result<ProjectionMatrix> {
    project_activities_with(m, ZeroPolicy::Drop)
}

pub fn project_activities_with(m: &SpecializationMatrix, policy: ZeroPolicy) -> Result<ProjectionMatrix> {
    let (pruned, dropped) = prepare(m, policy)?;
    let (values, degrees) = project_rows(&pruned.as_f64().transpose());
    Ok(ProjectionMatrix {
        values,
        kind: ProjectionKind::Activities,
        ids: pruned.activity_ids,
        degrees: Some(degrees),
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Eigen,
    Reflections,
}

/// A complexity vector in raw (unit-norm eigenvector) and z-scored form.
#[derive(Debug, Clone, PartialEq)]
pub struct Scores {
    pub ids: Vec<String>,
    pub raw: Vec<f64>,
    pub zscore: Vec<f64>,
}

impl Scores {
    fn new(ids: Vec<String>, raw: Vec<f64>) -> Self {
        let zscore = stats::zscore(&raw);
        Scores { ids, raw, zscore }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityResult {
    pub eci: Scores,
    pub pci: Option<Scores>,
    /// Eigenvalue associated with the returned vector.
    pub eigenvalue: f64,
    /// Real parts of the spectrum, descending (as far as the solver knows it).
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    pub sign_anchor: SignAnchor,
    pub degenerate: bool,
    pub converged: bool,
    pub iterations: usize,
    pub dropped: Dropped,
    pub warnings: Vec<String>,
}

/// Orientation reference for a projection: one reflection of the
/// diversity seed, `P · M_c`. With no stored degrees the stationary
/// distribution (proportional to diversity for a bipartite projection)
/// stands in for the seed.
fn anchor_for(p: &ProjectionMatrix, opts: &EigenOptions) -> Vec<f64> {
    let seed = match &p.degrees {
        Some(d) => d.clone(),
        None => eigen::stationary(&p.values, opts),
    };
    let seed = nalgebra::DVector::from_vec(seed);
    (&p.values * seed).iter().copied().collect()
}

fn from_eigen(p: &ProjectionMatrix, e: SecondEigen) -> ComplexityResult {
    let (converged, iterations, warnings) = match e.solver {
        Solver::Dense => (true, 0, vec![]),
        Solver::Power { iterations, converged } => {
            let w = if converged {
                vec![]
            } else {
                vec![format!("power iteration did not converge in {iterations} iterations")]
            };
            (converged, iterations, w)
        }
    };
    ComplexityResult {
        eci: Scores::new(p.ids.clone(), e.vector),
        pci: None,
        eigenvalue: e.eigenvalue,
        eigenvalues: e.spectrum,
        method: Method::Eigen,
        sign_anchor: e.anchor,
        degenerate: e.degenerate,
        converged,
        iterations,
        dropped: p.dropped.clone(),
        warnings,
    }
}

/// Second eigenvector of a projection matrix. For an activity-side
/// projection the `eci` field holds the activity scores.
pub fn eci_eigen(p: &ProjectionMatrix) -> Result<ComplexityResult> {
    eci_eigen_with(p, &EigenOptions::default())
}

pub fn eci_eigen_with(p: &ProjectionMatrix, opts: &EigenOptions) -> Result<ComplexityResult> {
    let anchor = anchor_for(p, opts);
    let e = eigen::second_eigenvector(&p.values, &anchor, p.degrees.as_deref(), opts)?;
    Ok(from_eigen(p, e))
}

fn activity_scores(m: &DMatrix<f64>, eci: &[f64]) -> Vec<f64> {
    let mut pci: Vec<f64> = m
        .column_iter()
        .map(|col| {
            let deg: f64 = col.sum();
            col.iter().zip(eci).map(|(a, e)| a * e).sum::<f64>() / deg
        })
        .collect();
    let norm = pci.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        pci.iter_mut().for_each(|v| *v /= norm);
    }
    pci
}

/// ECI from the economy projection and PCI from one averaging step
/// `PCI_p = (1/M_p) Σ_c M_cp ECI_c`, which is the matching eigenvector of
/// `M_pp'` for the same eigenvalue.
pub fn economic_complexity(m: &SpecializationMatrix) -> Result<ComplexityResult> {
    economic_complexity_with(m, &EigenOptions::default())
}

pub fn economic_complexity_with(m: &SpecializationMatrix, opts: &EigenOptions) -> Result<ComplexityResult> {
    let p = project_economies(m)?;
    let mut result = eci_eigen_with(&p, opts)?;
    let (pruned, _) = m.pruned();
    let pci = activity_scores(&pruned.as_f64(), &result.eci.raw);
    result.pci = Some(Scores::new(pruned.activity_ids.clone(), pci));
    Ok(result)
}

/// Weight of the index ramp added to the diversity seed of the reflections.
pub const SEED_RAMP: f64 = 1e-3;

/// Method of reflections.
///
/// Alternates `PCI = avg over producers of ECI` and `ECI = avg over
/// products of PCI`, starting from diversity; `iterations` counts half-steps
/// and must be even. After every full step the iterate is centred on its
/// diversity-weighted mean (which removes exactly the ones-vector component)
/// and rescaled to unit standard deviation.
pub fn eci_reflections(m: &SpecializationMatrix, iterations: usize) -> Result<ComplexityResult> {
    eci_reflections_with(m, iterations, 1e-10)
}

pub fn eci_reflections_with(m: &SpecializationMatrix, iterations: usize, tol: f64) -> Result<ComplexityResult> {
    if iterations < 2 || iterations % 2 != 0 {
        return Err(Error::Validation(format!("iterations must be even and >= 2, got {iterations}")));
    }
    let (pruned, dropped) = prepare(m, ZeroPolicy::Drop)?;
    let mf = pruned.as_f64();
    let (nc, np) = mf.shape();
    let div: Vec<f64> = mf.row_iter().map(|r| r.sum()).collect();
    let ubi: Vec<f64> = mf.column_iter().map(|c| c.sum()).collect();
    let total_div: f64 = div.iter().sum();
    let mut warnings = Vec::new();

    let half_step_p = |eci: &[f64]| -> Vec<f64> {
        (0..np)
            .map(|p| (0..nc).map(|c| mf[(c, p)] * eci[c]).sum::<f64>() / ubi[p])
            .collect()
    };
    let half_step_c = |pci: &[f64]| -> Vec<f64> {
        (0..nc)
            .map(|c| (0..np).map(|p| mf[(c, p)] * pci[p]).sum::<f64>() / div[c])
            .collect()
    };
    let standardise = |x: &mut Vec<f64>| -> f64 {
        let wm = x.iter().zip(&div).map(|(a, d)| a * d).sum::<f64>() / total_div;
        x.iter_mut().for_each(|v| *v -= wm);
        let s = (x.iter().map(|v| v * v).sum::<f64>() / nc as f64).sqrt();
        if s > 0.0 {
            x.iter_mut().for_each(|v| *v /= s);
        }
        s
    };

    // A seed symmetric under some relabelling of economies can be exactly
    // orthogonal to the second eigenvector, so a small descending ramp is
    // mixed into the diversity seed. Constant diversity leaves the ramp alone.
    let ramp: Vec<f64> = stats::zscore(&(0..nc).map(|i| (nc - i) as f64).collect::<Vec<_>>());
    let div_z = stats::zscore(&div);
    let mut eci: Vec<f64> = div_z.iter().zip(&ramp).map(|(d, r)| d + SEED_RAMP * r).collect();
    if div_z.iter().all(|v| *v == 0.0) {
        warnings.push("diversity is constant; seeding reflections with an index ramp".to_string());
        eci = ramp;
    }

    let mut converged = false;
    let mut done = 0;
    let mut degenerate = false;
    let mut growth = 0.0;
    for step in 0..iterations / 2 {
        let mut next = half_step_c(&half_step_p(&eci));
        let before = next.clone();
        if standardise(&mut next) < 1e-12 {
            degenerate = true;
            eci = vec![0.0; nc];
            done = 2 * (step + 1);
            warnings.push("iterate has no variance; matrix carries no ranking".to_string());
            break;
        }
        if step > 0 {
            // Ratio of norms before/after one application estimates λ₂.
            let n_prev = eci.iter().map(|v| v * v).sum::<f64>().sqrt();
            let wm = before.iter().zip(&div).map(|(a, d)| a * d).sum::<f64>() / total_div;
            let n_new = before.iter().map(|v| (v - wm) * (v - wm)).sum::<f64>().sqrt();
            growth = n_new / n_prev;
        }
        let diff = next.iter().zip(&eci).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        eci = next;
        done = 2 * (step + 1);
        if step > 0 && diff < tol {
            converged = true;
            break;
        }
    }
    if !converged && !degenerate {
        let msg = format!("reflections did not converge within {iterations} iterations; returning last iterate");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let norm = eci.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        eci.iter_mut().for_each(|v| *v /= norm);
    }
    let p = project_rows(&mf).0;
    let anchor: Vec<f64> = (&p * nalgebra::DVector::from_column_slice(&div)).iter().copied().collect();
    let sign_anchor = eigen::orient(&mut eci, &anchor);
    let pci_scores = if degenerate {
        vec![0.0; np]
    } else {
        activity_scores(&mf, &eci)
    };
    Ok(ComplexityResult {
        eci: Scores::new(pruned.economy_ids.clone(), eci),
        pci: Some(Scores::new(pruned.activity_ids.clone(), pci_scores)),
        eigenvalue: growth,
        eigenvalues: vec![1.0, growth],
        method: Method::Reflections,
        sign_anchor,
        degenerate,
        converged,
        iterations: done,
        dropped,
        warnings,
    })
}

pub use crate::stats::spearman;
