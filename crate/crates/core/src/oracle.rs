//! Closed-form results for the single-capability model and the separable
//! production functions, used as exact ground truth for the pipeline.
//!
//! Economies are ordered by descending `r` (above-mean group, the at-mean
//! economy if any, below-mean group) and activities by ascending `q`, the
//! same order `output_single` produces.

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::Serialize;

use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::model::{gen_linspace, output_single, OutputMatrix};
use crate::pipeline::{self, ProjectionKind, ProjectionMatrix, SpecializationMatrix};
use crate::stats;

/// Values within this distance of the centre count as sitting at it.
pub const AT_MEAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    Mean,
    Median,
}

fn center_of(x: &[f64], center: Center) -> f64 {
    match center {
        Center::Mean => stats::mean(x),
        Center::Median => {
            let mut s = x.to_vec();
            s.sort_by(f64::total_cmp);
            let n = s.len();
            if n % 2 == 1 {
                s[n / 2]
            } else {
                0.5 * (s[n / 2 - 1] + s[n / 2])
            }
        }
    }
}

/// -1, 0 or +1 relative to `c`.
fn side(x: f64, c: f64) -> i8 {
    if (x - c).abs() <= AT_MEAN_TOL * c.abs().max(1.0) {
        0
    } else if x > c {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityKind {
    /// No economy or activity at the mean.
    EvenEven,
    /// One economy at the mean, no activity.
    OddEven,
    /// One economy and one activity at the mean.
    OddOdd,
    /// One activity at the mean, no economy.
    EvenOdd,
}

impl ParityKind {
    fn flags(self) -> (bool, bool) {
        match self {
            ParityKind::EvenEven => (false, false),
            ParityKind::OddEven => (true, false),
            ParityKind::OddOdd => (true, true),
            ParityKind::EvenOdd => (false, true),
        }
    }

    fn from_flags(row: bool, col: bool) -> Self {
        match (row, col) {
            (false, false) => ParityKind::EvenEven,
            (true, false) => ParityKind::OddEven,
            (true, true) => ParityKind::OddOdd,
            (false, true) => ParityKind::EvenOdd,
        }
    }
}

/// Group structure of a single-capability specialisation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParityCase {
    pub kind: ParityKind,
    pub n_economies: usize,
    pub n_activities: usize,
    /// Economies with `r_c` above the centre.
    pub economies_above: usize,
    pub economies_below: usize,
    /// Activities with `q_p` above the centre.
    pub activities_above: usize,
    pub activities_below: usize,
}

impl ParityCase {
    /// Evenly spread parameters: equal group sizes on both sides of the centre.
    pub fn new(kind: ParityKind, n_economies: usize, n_activities: usize) -> Result<Self> {
        let (row, col) = kind.flags();
        let (mr, mq) = (usize::from(row), usize::from(col));
        if n_economies % 2 != mr || n_activities % 2 != mq {
            return Err(Error::Validation(format!(
                "{kind:?} needs {} economies and {} activities, got {n_economies}x{n_activities}",
                if row { "odd" } else { "even" },
                if col { "odd" } else { "even" },
            )));
        }
        let case = ParityCase {
            kind,
            n_economies,
            n_activities,
            economies_above: (n_economies - mr) / 2,
            economies_below: (n_economies - mr) / 2,
            activities_above: (n_activities - mq) / 2,
            activities_below: (n_activities - mq) / 2,
        };
        case.validate()?;
        Ok(case)
    }

    /// Classify arbitrary parameter vectors.
    pub fn from_vectors(r: &[f64], q: &[f64], center: Center) -> Result<Self> {
        let (cr, cq) = (center_of(r, center), center_of(q, center));
        let count = |x: &[f64], c: f64, s: i8| x.iter().filter(|v| side(**v, c) == s).count();
        let (r_at, q_at) = (count(r, cr, 0), count(q, cq, 0));
        if r_at > 1 || q_at > 1 {
            return Err(Error::NotCovered(format!(
                "{r_at} economies and {q_at} activities sit at the centre; closed forms cover at most one per side"
            )));
        }
        let case = ParityCase {
            kind: ParityKind::from_flags(r_at == 1, q_at == 1),
            n_economies: r.len(),
            n_activities: q.len(),
            economies_above: count(r, cr, 1),
            economies_below: count(r, cr, -1),
            activities_above: count(q, cq, 1),
            activities_below: count(q, cq, -1),
        };
        case.validate()?;
        Ok(case)
    }

    fn at_mean(&self) -> (usize, usize) {
        let (row, col) = self.kind.flags();
        (usize::from(row), usize::from(col))
    }

    fn validate(&self) -> Result<()> {
        let (mr, mq) = self.at_mean();
        if self.economies_above + self.economies_below + mr != self.n_economies
            || self.activities_above + self.activities_below + mq != self.n_activities
        {
            return Err(Error::Validation("group sizes do not add up".into()));
        }
        // Every economy needs a nonzero diversity and every activity a
        // nonzero ubiquity for the projection to exist.
        let bad_rows = (self.economies_above > 0 && self.activities_above + mq == 0)
            || (self.economies_below > 0 && self.activities_below + mq == 0);
        let bad_cols = (self.activities_above > 0 && self.economies_above + mr == 0)
            || (self.activities_below > 0 && self.economies_below + mr == 0);
        if bad_rows || bad_cols || self.n_economies < 2 {
            return Err(Error::NotCovered("a group has no partner group; projection undefined".into()));
        }
        Ok(())
    }

    /// Group label per economy in row order: +1 above, 0 at, -1 below.
    pub fn economy_groups(&self) -> Vec<i8> {
        let (mr, _) = self.at_mean();
        let mut g = vec![1; self.economies_above];
        g.extend(std::iter::repeat_n(0, mr));
        g.extend(std::iter::repeat_n(-1, self.economies_below));
        g
    }

    /// Group label per activity in column order (ascending `q`).
    pub fn activity_groups(&self) -> Vec<i8> {
        let (_, mq) = self.at_mean();
        let mut g = vec![-1; self.activities_below];
        g.extend(std::iter::repeat_n(0, mq));
        g.extend(std::iter::repeat_n(1, self.activities_above));
        g
    }
}

/// Quadrant specialisation matrix `M_cp = 1` iff
/// `(r_c − ⟨r⟩)(q_p − ⟨q⟩) ≥ 0`, rows sorted by descending `r` and columns by
/// ascending `q`, ids carrying the original indices.
pub fn oracle_mcp(r: &[f64], q: &[f64], center: Center) -> SpecializationMatrix {
    let (cr, cq) = (center_of(r, center), center_of(q, center));
    let mut rows: Vec<usize> = (0..r.len()).collect();
    rows.sort_by(|&a, &b| r[b].total_cmp(&r[a]));
    let mut cols: Vec<usize> = (0..q.len()).collect();
    cols.sort_by(|&a, &b| q[a].total_cmp(&q[b]));
    let values = DMatrix::from_fn(r.len(), q.len(), |i, j| {
        u8::from(side(r[rows[i]], cr) * side(q[cols[j]], cq) >= 0)
    });
    SpecializationMatrix::new(
        values,
        rows.iter().map(|i| format!("c{i}")).collect(),
        cols.iter().map(|j| format!("p{j}")).collect(),
    )
    .expect("ids match by construction")
}

type Q = Ratio<i64>;

fn q(n: usize) -> Q {
    Q::from_integer(n as i64)
}

/// Exact `M_cc'` entries for a parity case.
///
/// With `H`, `L` the above/below economy counts, `K_H`, `K_L` the activity
/// counts, `m_r`, `m_q` the at-mean indicators and `N_c` the economy count:
/// activities above the mean have ubiquity `H + m_r`, below `L + m_r`, and
/// the at-mean activity is produced everywhere (ubiquity `N_c`). Each entry
/// is the diversity-normalised sum of `1/M_p` over shared activities.
pub fn oracle_mcc_exact(case: &ParityCase) -> Result<Vec<Vec<Q>>> {
    case.validate()?;
    let (mr, mq) = case.at_mean();
    let (h, l) = (case.economies_above, case.economies_below);
    let (kh, kl) = (case.activities_above, case.activities_below);
    let nc = case.n_economies;
    let np = case.n_activities;
    let zero = Q::from_integer(0);
    let share_high = if kh > 0 { q(kh) / q(h + mr) } else { zero };
    let share_low = if kl > 0 { q(kl) / q(l + mr) } else { zero };
    let share_mid = if mq > 0 { q(mq) / q(nc) } else { zero };

    // Activities shared by groups a and b, as a sum of 1/M_p.
    let shared = |a: i8, b: i8| -> Q {
        let high = (a >= 0 && b >= 0) as i64;
        let low = (a <= 0 && b <= 0) as i64;
        share_high * high + share_low * low + share_mid
    };
    let diversity = |a: i8| -> Q {
        match a {
            1 => q(kh + mq),
            -1 => q(kl + mq),
            _ => q(np),
        }
    };
    let groups = case.economy_groups();
    Ok(groups
        .iter()
        .map(|&a| groups.iter().map(|&b| shared(a, b) / diversity(a)).collect())
        .collect())
}

fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// [`oracle_mcc_exact`] converted to floats.
pub fn oracle_mcc(case: &ParityCase) -> Result<ProjectionMatrix> {
    let exact = oracle_mcc_exact(case)?;
    let n = exact.len();
    let values = DMatrix::from_fn(n, n, |i, j| to_f64(&exact[i][j]));
    ProjectionMatrix::new(values, ProjectionKind::Economies, crate::model::economy_ids(n))
}

/// Sign pattern of the second eigenvector: +1 above the mean, -1 below,
/// 0 at the mean (up to a global sign).
pub fn oracle_eci(case: &ParityCase) -> Vec<i8> {
    case.economy_groups()
}

/// Apply the pipeline RCA to `f_c g_p` and report whether every entry is 1
/// within 1e-10, with the largest deviation.
pub fn check_separable_rca(f: &[f64], g: &[f64]) -> Result<(bool, f64)> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::Dimension("factor vectors must be non-empty".into()));
    }
    if f.iter().chain(g).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Validation("separable factors must be strictly positive and finite".into()));
    }
    let y = OutputMatrix::from_values(DMatrix::from_fn(f.len(), g.len(), |c, p| f[c] * g[p]))?;
    let r = pipeline::rca(&y)?;
    let dev = r.values().iter().fold(0.0f64, |a, v| a.max((v - 1.0).abs()));
    Ok((dev < 1e-10, dev))
}

/// Specialisation implied by `Y = B + f_c g_p` with `B > 0`:
/// `M_cp = 1` iff `(f_c − ⟨f⟩)(g_p − ⟨g⟩) ≥ 0`, in input order.
///
/// The condition is on the function values. With `f = K^γ`, `g = K^−γ` the
/// activity factor falls as `K_p` rises, so high-`K_c` economies pair with
/// low-`K_p` activities.
pub fn shifted_condition(f: &[f64], g: &[f64]) -> SpecializationMatrix {
    let (mf, mg) = (stats::mean(f), stats::mean(g));
    let values = DMatrix::from_fn(f.len(), g.len(), |c, p| u8::from(side(f[c], mf) * side(g[p], mg) >= 0));
    SpecializationMatrix::new(values, crate::model::economy_ids(f.len()), crate::model::activity_ids(g.len()))
        .expect("ids match by construction")
}

/// Outcome of one parity case in `oracle-check`.
#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub economies: usize,
    pub activities: usize,
    pub kind: ParityKind,
    pub mcp_equal: bool,
    pub mcc_max_deviation: f64,
    pub eci_pattern: Vec<i8>,
    pub eci_pattern_matches: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub tolerance: f64,
    pub cases: Vec<CaseReport>,
    pub pass: bool,
}

/// Sizes covering every parity combination, including the worked matrices.
pub const DEFAULT_SIZES: [(usize, usize); 6] = [(4, 6), (5, 6), (5, 7), (10, 20), (11, 20), (15, 17)];

/// Entries below `1e-8 · max|v|` read as zero.
pub fn sign_pattern(v: &[f64]) -> Vec<i8> {
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    v.iter()
        .map(|x| {
            if x.abs() <= 1e-8 * scale {
                0
            } else if *x > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Whether two sign patterns agree up to one global flip.
pub fn same_up_to_sign(a: &[i8], b: &[i8]) -> bool {
    a == b || a.iter().zip(b).all(|(x, y)| *x == -*y) && a.len() == b.len()
}

/// Run the pipeline on linspace parameters and compare with the closed forms.
pub fn check_case(n_economies: usize, n_activities: usize, tolerance: f64) -> Result<CaseReport> {
    let r = gen_linspace(n_economies)?;
    let qv = gen_linspace(n_activities)?;
    let case = ParityCase::from_vectors(&r, &qv, Center::Mean)?;
    let y = output_single(&r, &qv, 1.0)?;
    let m = pipeline::binarize(&pipeline::rca(&y)?)?;
    let mcp_equal = m.values() == oracle_mcp(&r, &qv, Center::Mean).values();
    let p = pipeline::project_economies(&m)?;
    let want = oracle_mcc(&case)?;
    let mcc_max_deviation = if p.values().shape() == want.values().shape() {
        (p.values() - want.values()).abs().max()
    } else {
        f64::INFINITY
    };
    let e = pipeline::eci_eigen_with(&p, &EigenOptions::default())?;
    let eci_pattern = sign_pattern(&e.eci.raw);
    let eci_pattern_matches = same_up_to_sign(&eci_pattern, &oracle_eci(&case));
    Ok(CaseReport {
        economies: n_economies,
        activities: n_activities,
        kind: case.kind,
        mcp_equal,
        mcc_max_deviation,
        eci_pattern,
        eci_pattern_matches,
        pass: mcp_equal && mcc_max_deviation <= tolerance && eci_pattern_matches,
    })
}

pub fn oracle_report(sizes: &[(usize, usize)], tolerance: f64) -> Result<OracleReport> {
    let cases = sizes
        .iter()
        .map(|&(nc, np)| check_case(nc, np, tolerance))
        .collect::<Result<Vec<_>>>()?;
    let pass = cases.iter().all(|c| c.pass);
    Ok(OracleReport { tolerance, cases, pass })
}
