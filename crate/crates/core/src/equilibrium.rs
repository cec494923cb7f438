//! Short-run equilibrium of the single-capability model: wages, priced
//! specialisation, log-utility consumption and market-clearing prices.
//!
//! Throughout, `⟨π⟩` is the mean price and `⟨qπ⟩` the mean of `q_p π_p`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{gen_linspace, OutputMatrix};
use crate::pipeline::SpecializationMatrix;
use crate::rng::{Role, StreamKey};
use crate::stats;

/// Positive activity prices with mean 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector {
    values: Vec<f64>,
}

impl PriceVector {
    /// Rescales to mean 1; every entry must be positive and finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("price vector is empty".into()));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Validation("prices must be positive and finite".into()));
        }
        let m = stats::mean(&values);
        Ok(PriceVector {
            values: values.iter().map(|v| v / m).collect(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `⟨π⟩`, which is 1 up to rounding.
    pub fn mean(&self) -> f64 {
        stats::mean(&self.values)
    }

    /// `⟨qπ⟩`.
    pub fn weighted_mean(&self, q: &[f64]) -> f64 {
        self.values.iter().zip(q).map(|(p, q)| p * q).sum::<f64>() / self.values.len() as f64
    }
}

/// Preference weights `B_cp` of the log utility `U_c = Σ_p B_cp log C_cp`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    values: DMatrix<f64>,
}

impl PreferenceMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Dimension("preference matrix is empty".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Validation("preferences must be nonnegative and finite".into()));
        }
        if let Some(c) = values.row_iter().position(|r| r.sum() <= 0.0) {
            return Err(Error::Validation(format!("economy {c} has no positive preference")));
        }
        Ok(PreferenceMatrix { values })
    }

    pub fn uniform(n_economies: usize, n_activities: usize) -> Result<Self> {
        Self::new(DMatrix::from_element(n_economies, n_activities, 1.0))
    }

    /// Entries drawn uniformly from `[low, high)`.
    pub fn random<R: Rng + ?Sized>(n_economies: usize, n_activities: usize, low: f64, high: f64, rng: &mut R) -> Result<Self> {
        let mut m = DMatrix::zeros(n_economies, n_activities);
        for c in 0..n_economies {
            for p in 0..n_activities {
                m[(c, p)] = low + (high - low) * rng.random::<f64>();
            }
        }
        Self::new(m)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// `⟨B_c⟩`.
    pub fn row_means(&self) -> Vec<f64> {
        let n = self.values.ncols() as f64;
        self.values.row_iter().map(|r| r.sum() / n).collect()
    }
}

/// Consumption quantities `C_cp`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionMatrix {
    values: DMatrix<f64>,
}

impl ConsumptionMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// `Σ_p π_p C_cp` per economy.
    pub fn spending(&self, prices: &PriceVector) -> Vec<f64> {
        self.values
            .row_iter()
            .map(|row| row.iter().zip(prices.values()).map(|(c, p)| c * p).sum())
            .collect()
    }

    /// `Σ_c C_cp` per activity.
    pub fn demand(&self) -> Vec<f64> {
        self.values.column_iter().map(|c| c.sum()).collect()
    }

    /// `Σ_p C_cp` per economy.
    pub fn physical_totals(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.sum()).collect()
    }
}

fn check_lengths(q: &[f64], prices: Option<&PriceVector>, r: &[f64]) -> Result<()> {
    if q.is_empty() || r.is_empty() {
        return Err(Error::Dimension("r and q must be non-empty".into()));
    }
    if let Some(p) = prices {
        if p.len() != q.len() {
            return Err(Error::Dimension(format!("{} prices for {} activities", p.len(), q.len())));
        }
    }
    if q.iter().chain(r).any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Validation("r and q must be probabilities".into()));
    }
    Ok(())
}

/// Physical output `y_cp = 1 − q_p(1 − r_c)`.
fn physical(q: f64, r: f64) -> f64 {
    1.0 - q * (1.0 - r)
}

/// Labour, wages and income of each economy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EconomyAccounts {
    pub labor: Vec<f64>,
    pub wages: Vec<f64>,
    /// `dw*_c / dr_c = N_p ⟨qπ⟩ / L_c`.
    pub wage_slope: Vec<f64>,
    /// `Y_c = Σ_p π_p y_cp = w_c L_c`.
    pub income: Vec<f64>,
    /// `y_c = Σ_p y_cp`.
    pub physical_output: Vec<f64>,
}

/// Equilibrium wages `w*_c = N_p(⟨π⟩ + ⟨qπ⟩(r_c − 1)) / L_c` and their
/// slope in `r_c`.
pub fn equilibrium_wages(prices: &PriceVector, q: &[f64], r: &[f64], labor: &[f64]) -> Result<EconomyAccounts> {
    check_lengths(q, Some(prices), r)?;
    if labor.len() != r.len() {
        return Err(Error::Dimension(format!("{} labour entries for {} economies", labor.len(), r.len())));
    }
    if labor.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::Validation("labour must be positive".into()));
    }
    let np = q.len() as f64;
    let (pm, qpm) = (prices.mean(), prices.weighted_mean(q));
    let wages: Vec<f64> = r.iter().zip(labor).map(|(rc, l)| np * (pm + qpm * (rc - 1.0)) / l).collect();
    let wage_slope = labor.iter().map(|l| np * qpm / l).collect();
    let income = wages.iter().zip(labor).map(|(w, l)| w * l).collect();
    let physical_output = r.iter().map(|rc| q.iter().map(|qp| physical(*qp, *rc)).sum()).collect();
    Ok(EconomyAccounts {
        labor: labor.to_vec(),
        wages,
        wage_slope,
        income,
        physical_output,
    })
}

pub const DEFAULT_ETA: f64 = 0.1;
pub const DEFAULT_DT: f64 = 1.0;

/// One explicit Euler step of `dw/dt = −η(w − w*)`.
pub fn wage_relaxation_step(w: &[f64], w_star: &[f64], eta: f64, dt: f64) -> Result<Vec<f64>> {
    if w.len() != w_star.len() {
        return Err(Error::Dimension("wage vectors differ in length".into()));
    }
    if !(eta > 0.0 && dt > 0.0) {
        return Err(Error::Validation("eta and dt must be positive".into()));
    }
    if eta * dt >= 1.0 {
        log::warn!("eta*dt = {} >= 1: relaxation overshoots or oscillates", eta * dt);
    }
    Ok(w.iter().zip(w_star).map(|(w, s)| w - eta * dt * (w - s)).collect())
}

/// Specialisation under prices, `(r_c − ⟨r⟩)(q_p⟨π⟩ − ⟨qπ⟩) ≥ 0`, in input
/// order, with the activity threshold `⟨q⟩ + cov(q, π)/⟨π⟩`.
pub fn priced_specialization(r: &[f64], q: &[f64], prices: &PriceVector) -> Result<(SpecializationMatrix, f64)> {
    check_lengths(q, Some(prices), r)?;
    let rm = stats::mean(r);
    let (pm, qpm) = (prices.mean(), prices.weighted_mean(q));
    let threshold = stats::mean(q) + stats::covariance(q, prices.values()) / pm;
    let tol = 1e-12;
    let sign = |x: f64, scale: f64| -> i8 {
        if x.abs() <= tol * scale.max(1.0) {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    };
    let values = DMatrix::from_fn(r.len(), q.len(), |c, p| {
        let a = sign(r[c] - rm, rm);
        let b = sign(q[p] * pm - qpm, qpm);
        u8::from(a * b >= 0)
    });
    let m = SpecializationMatrix::new(values, crate::model::economy_ids(r.len()), crate::model::activity_ids(q.len()))?;
    Ok((m, threshold))
}

/// Log-utility demand `C_cp = B_cp(⟨π⟩ − (1 − r_c)⟨qπ⟩) / (π_p ⟨B_c⟩)`.
pub fn consumption(b: &PreferenceMatrix, prices: &PriceVector, q: &[f64], r: &[f64]) -> Result<ConsumptionMatrix> {
    check_lengths(q, Some(prices), r)?;
    if b.values.shape() != (r.len(), q.len()) {
        return Err(Error::Dimension("preference matrix shape does not match r and q".into()));
    }
    let bm = b.row_means();
    let (pm, qpm) = (prices.mean(), prices.weighted_mean(q));
    let pv = prices.values();
    let values = DMatrix::from_fn(r.len(), q.len(), |c, p| {
        b.values[(c, p)] * (pm - (1.0 - r[c]) * qpm) / (pv[p] * bm[c])
    });
    Ok(ConsumptionMatrix { values })
}

/// Revenue-valued output `Y_cp = π_p(1 − q_p(1 − r_c))`, in input order.
pub fn priced_output(prices: &PriceVector, q: &[f64], r: &[f64]) -> Result<OutputMatrix> {
    check_lengths(q, Some(prices), r)?;
    let pv = prices.values();
    OutputMatrix::from_values(DMatrix::from_fn(r.len(), q.len(), |c, p| pv[p] * physical(q[p], r[c])))
}

/// Global physical supply `y_p = N_c(1 − q_p(1 − ⟨r⟩))`.
pub fn supply(q: &[f64], r: &[f64]) -> Vec<f64> {
    let nc = r.len() as f64;
    let rm = stats::mean(r);
    q.iter().map(|qp| nc * physical(*qp, rm)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceMethod {
    Power,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest activity count for the dense linear fallback.
    pub dense_max: usize,
    /// Starting iterate (rescaled to mean 1); uniform when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for PriceOptions {
    fn default() -> Self {
        PriceOptions {
            tol: 1e-12,
            max_iter: 10_000,
            dense_max: 2000,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSolution {
    pub prices: PriceVector,
    pub method: PriceMethod,
    pub iterations: usize,
    /// `‖π − T(π)‖_∞`.
    pub fixed_point_residual: f64,
    /// `‖Σ_c C_cp − y_p‖_∞` at the returned prices.
    pub market_clearing_residual: f64,
}

/// Linear market-clearing map `π ↦ D⁻¹Kπ` with
/// `K_pp' = Σ_c (B_cp/⟨B_c⟩)(1 − q_p'(1 − r_c)) / N_p` and `D = diag(y_p)`.
///
/// Column sums of `K` equal `y_p'`, so `diag(y)` is a left eigenvector with
/// eigenvalue 1 and the Perron root of the map is exactly 1.
pub fn price_map(b: &PreferenceMatrix, q: &[f64], r: &[f64]) -> Result<DMatrix<f64>> {
    check_lengths(q, None, r)?;
    if b.values.shape() != (r.len(), q.len()) {
        return Err(Error::Dimension("preference matrix shape does not match r and q".into()));
    }
    let y = supply(q, r);
    if let Some(p) = y.iter().position(|v| *v <= 0.0) {
        return Err(Error::Validation(format!("activity {p} has zero global supply")));
    }
    let bm = b.row_means();
    let np = q.len();
    // Shares S_cp = B_cp / ⟨B_c⟩, physical output Y_cp' = 1 − q_p'(1 − r_c).
    let shares = DMatrix::from_fn(r.len(), np, |c, p| b.values[(c, p)] / bm[c]);
    let phys = DMatrix::from_fn(r.len(), np, |c, p| physical(q[p], r[c]));
    let mut t = shares.transpose() * phys / np as f64;
    for p in 0..np {
        let inv = 1.0 / y[p];
        t.row_mut(p).iter_mut().for_each(|v| *v *= inv);
    }
    Ok(t)
}

fn normalise_mean(v: &mut DVector<f64>) {
    let m = v.mean();
    *v /= m;
}

/// Market-clearing prices, normalised to `⟨π⟩ = 1`.
pub fn solve_prices(b: &PreferenceMatrix, q: &[f64], r: &[f64]) -> Result<PriceSolution> {
    solve_prices_with(b, q, r, &PriceOptions::default())
}

pub fn solve_prices_with(b: &PreferenceMatrix, q: &[f64], r: &[f64], opts: &PriceOptions) -> Result<PriceSolution> {
    let t = price_map(b, q, r)?;
    let np = q.len();
    let mut x = match &opts.initial {
        Some(init) => {
            if init.len() != np || init.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Validation("initial prices must be positive, one per activity".into()));
            }
            DVector::from_column_slice(init)
        }
        None => DVector::from_element(np, 1.0),
    };
    normalise_mean(&mut x);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        let mut next = &t * &x;
        normalise_mean(&mut next);
        if next.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Numerical(format!("price iterate turned nonpositive at step {it}")));
        }
        let diff = (&next - &x).amax();
        x = next;
        iterations = it;
        if diff < opts.tol {
            converged = true;
            break;
        }
    }
    let mut method = PriceMethod::Power;
    if !converged {
        let res = (&t * &x - &x).amax();
        if np > opts.dense_max {
            return Err(Error::Numerical(format!(
                "price iteration did not converge in {iterations} steps (residual {res:.3e}) and {np} activities exceed the dense fallback limit"
            )));
        }
        log::warn!("price iteration stalled at residual {res:.3e}; solving densely");
        // (T − I)π = 0 with the last equation replaced by Σπ = N_p.
        let mut a = &t - DMatrix::identity(np, np);
        a.row_mut(np - 1).fill(1.0);
        let mut rhs = DVector::zeros(np);
        rhs[np - 1] = np as f64;
        x = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("price system is singular".into()))?;
        if x.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Numerical("dense price solve produced nonpositive prices".into()));
        }
        normalise_mean(&mut x);
        method = PriceMethod::Linear;
    }
    let fixed_point_residual = (&t * &x - &x).amax();
    let prices = PriceVector::new(x.iter().copied().collect())?;
    let c = consumption(b, &prices, q, r)?;
    let y = supply(q, r);
    let market_clearing_residual = c.demand().iter().zip(&y).fold(0.0f64, |a, (d, s)| a.max((d - s).abs()));
    Ok(PriceSolution {
        prices,
        method,
        iterations,
        fixed_point_residual,
        market_clearing_residual,
    })
}

/// Labour endowment: one value for every economy or one per economy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LaborSpec {
    Uniform(f64),
    PerEconomy(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreferenceKind {
    Uniform,
    /// Entries uniform on [0.5, 1.5).
    Random,
}

/// Equilibrium scenario as read from a TOML file.
///
/// `r` and `q` default to evenly spaced values on [0, 1] of length
/// `economies` and `activities`; explicit lists override both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_economies")]
    pub economies: usize,
    #[serde(default = "default_activities")]
    pub activities: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default = "default_labor")]
    pub labor: LaborSpec,
    #[serde(default = "default_preferences")]
    pub preferences: PreferenceKind,
    #[serde(default)]
    pub seed: u64,
}

fn default_economies() -> usize {
    20
}

fn default_activities() -> usize {
    40
}

fn default_labor() -> LaborSpec {
    LaborSpec::Uniform(1.0)
}

fn default_preferences() -> PreferenceKind {
    PreferenceKind::Random
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            economies: default_economies(),
            activities: default_activities(),
            r: None,
            q: None,
            labor: default_labor(),
            preferences: default_preferences(),
            seed: 0,
        }
    }
}

/// Concrete inputs of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInputs {
    pub r: Vec<f64>,
    pub q: Vec<f64>,
    pub labor: Vec<f64>,
    pub preferences: PreferenceMatrix,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: "<scenario>".into(),
            message: e.to_string(),
        })
    }

    pub fn inputs(&self) -> Result<ScenarioInputs> {
        let r = match &self.r {
            Some(r) => r.clone(),
            None => gen_linspace(self.economies)?,
        };
        let q = match &self.q {
            Some(q) => q.clone(),
            None => gen_linspace(self.activities)?,
        };
        check_lengths(&q, None, &r)?;
        let labor = match &self.labor {
            LaborSpec::Uniform(l) => vec![*l; r.len()],
            LaborSpec::PerEconomy(l) => l.clone(),
        };
        let preferences = match self.preferences {
            PreferenceKind::Uniform => PreferenceMatrix::uniform(r.len(), q.len())?,
            PreferenceKind::Random => {
                let mut rng = StreamKey::new(self.seed, Role::Aux(1)).rng();
                PreferenceMatrix::random(r.len(), q.len(), 0.5, 1.5, &mut rng)?
            }
        };
        Ok(ScenarioInputs { r, q, labor, preferences })
    }
}

/// Everything the `equilibrium` command reports.
#[derive(Debug, Clone)]
pub struct EquilibriumRun {
    pub inputs: ScenarioInputs,
    pub solution: PriceSolution,
    pub accounts: EconomyAccounts,
    pub consumption: ConsumptionMatrix,
    pub specialization: SpecializationMatrix,
    pub threshold: f64,
    /// `max_c |Σ_p π_p C_cp − Y_c|`.
    pub budget_residual: f64,
    /// `max_c |Σ_p C_cp − y_c|`; reported, not enforced by the model.
    pub supply_identity_residual: f64,
}

pub fn run_scenario(s: &Scenario) -> Result<EquilibriumRun> {
    let inputs = s.inputs()?;
    let solution = solve_prices(&inputs.preferences, &inputs.q, &inputs.r)?;
    let accounts = equilibrium_wages(&solution.prices, &inputs.q, &inputs.r, &inputs.labor)?;
    let consumption = consumption(&inputs.preferences, &solution.prices, &inputs.q, &inputs.r)?;
    let (specialization, threshold) = priced_specialization(&inputs.r, &inputs.q, &solution.prices)?;
    let budget_residual = consumption
        .spending(&solution.prices)
        .iter()
        .zip(&accounts.income)
        .fold(0.0f64, |a, (s, y)| a.max((s - y).abs()));
    let supply_identity_residual = consumption
        .physical_totals()
        .iter()
        .zip(&accounts.physical_output)
        .fold(0.0f64, |a, (s, y)| a.max((s - y).abs()));
    Ok(EquilibriumRun {
        inputs,
        solution,
        accounts,
        consumption,
        specialization,
        threshold,
        budget_residual,
        supply_identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{binarize, rca};
    use proptest::prelude::*;
    use rand::Rng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        StreamKey::new(seed, Role::Aux(9)).rng()
    }

    fn random_vec(n: usize, rng: &mut impl Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn wage_examples() {
        let prices = PriceVector::new(vec![0.5, 1.0, 2.0, 1.5]).unwrap();
        let q = [0.1, 0.4, 0.6, 0.9];
        let acc = equilibrium_wages(&prices, &q, &[1.0, 0.3], &[2.0, 4.0]).unwrap();
        assert!((acc.wages[0] - 4.0 * prices.mean() / 2.0).abs() < 1e-14);
        let flat = equilibrium_wages(&prices, &[0.0; 4], &[0.0, 0.5, 1.0], &[1.0; 3]).unwrap();
        assert!(flat.wages.iter().all(|w| (w - 4.0).abs() < 1e-14));
        for (c, rc) in [1.0, 0.3].iter().enumerate() {
            let direct: f64 = prices.values().iter().zip(&q).map(|(p, qp)| p * (1.0 - qp * (1.0 - rc))).sum::<f64>()
                / acc.labor[c];
            assert!((acc.wages[c] - direct).abs() < 1e-12);
            assert!((acc.income[c] - acc.wages[c] * acc.labor[c]).abs() < 1e-12);
        }
        assert!(equilibrium_wages(&prices, &q, &[0.5], &[0.0]).is_err());
    }

    #[test]
    fn relaxation() {
        let ws = [2.0, 3.0];
        assert_eq!(wage_relaxation_step(&ws, &ws, 0.1, 1.0).unwrap(), ws.to_vec());
        let next = wage_relaxation_step(&[5.0, 3.0], &ws, 0.1, 1.0).unwrap();
        assert!(next[0] < 5.0 && next[0] > 2.0);
        // Gap shrinks by (1 − η dt) each step.
        let mut w = vec![5.0, 0.0];
        for k in 1..=20 {
            w = wage_relaxation_step(&w, &ws, 0.1, 1.0).unwrap();
            let want = 2.0 + 3.0 * 0.9f64.powi(k);
            assert!((w[0] - want).abs() < 1e-12);
        }
        assert!(wage_relaxation_step(&[1.0], &[1.0], 0.0, 1.0).is_err());
        assert!(wage_relaxation_step(&[1.0], &[1.0], 2.0, 1.0).is_ok());
    }

    #[test]
    fn priced_threshold() {
        let q = gen_linspace(6).unwrap();
        let r = gen_linspace(4).unwrap();
        let (m, t) = priced_specialization(&r, &q, &PriceVector::uniform(6).unwrap()).unwrap();
        assert!((t - stats::mean(&q)).abs() < 1e-15);
        let plain = crate::oracle::oracle_mcp(&r, &q, crate::oracle::Center::Mean);
        // Both sorted the same way once r is reversed.
        let rev: Vec<u8> = (0..4).rev().flat_map(|c| m.values().row(c).iter().copied().collect::<Vec<_>>()).collect();
        assert_eq!(plain.values(), &DMatrix::from_row_slice(4, 6, &rev));

        let rising = PriceVector::new(q.iter().map(|x| 1.0 + x).collect()).unwrap();
        assert!(priced_specialization(&r, &q, &rising).unwrap().1 > stats::mean(&q));

        // π − 1 orthogonal to q − ⟨q⟩ but not constant.
        let dq: Vec<f64> = q.iter().map(|x| x - stats::mean(&q)).collect();
        let mut z = vec![1.0, -1.0, 0.5, 0.5, -1.0, 1.0];
        let zm = stats::mean(&z);
        z.iter_mut().for_each(|v| *v -= zm);
        let proj = z.iter().zip(&dq).map(|(a, b)| a * b).sum::<f64>() / dq.iter().map(|b| b * b).sum::<f64>();
        let pi: Vec<f64> = z.iter().zip(&dq).map(|(a, b)| 1.0 + 0.3 * (a - proj * b)).collect();
        let prices = PriceVector::new(pi).unwrap();
        assert!(stats::variance(prices.values()) > 1e-3);
        let (_, t) = priced_specialization(&r, &q, &prices).unwrap();
        assert!((t - stats::mean(&q)).abs() < 1e-12);
    }

    #[test]
    fn consumption_examples() {
        let mut g = rng(1);
        let (r, q) = (random_vec(5, &mut g), random_vec(8, &mut g));
        let b = PreferenceMatrix::random(5, 8, 0.5, 1.5, &mut g).unwrap();
        let prices = PriceVector::new(random_vec(8, &mut g).iter().map(|v| v + 0.1).collect()).unwrap();
        let c = consumption(&b, &prices, &q, &r).unwrap();
        let acc = equilibrium_wages(&prices, &q, &r, &[1.0; 5]).unwrap();
        for (s, y) in c.spending(&prices).iter().zip(&acc.income) {
            assert!((s - y).abs() < 1e-10);
        }
        // Raising one weight (row renormalised) raises that entry, lowers the rest.
        let mut bv = b.values().clone();
        bv[(0, 2)] *= 2.0;
        let s0: f64 = b.values().row(0).sum();
        let s1: f64 = bv.row(0).sum();
        bv.row_mut(0).iter_mut().for_each(|v| *v *= s0 / s1);
        let c2 = consumption(&PreferenceMatrix::new(bv).unwrap(), &prices, &q, &r).unwrap();
        assert!(c2.values()[(0, 2)] > c.values()[(0, 2)]);
        for p in [0, 1, 3, 4, 5, 6, 7] {
            assert!(c2.values()[(0, p)] < c.values()[(0, p)]);
        }
        // Uniform B and π at the mean endowment: flat consumption.
        let c = consumption(&PreferenceMatrix::uniform(3, 4).unwrap(), &PriceVector::uniform(4).unwrap(), &q[..4], &[0.5; 3]).unwrap();
        assert!(c.values().iter().all(|v| (v - c.values()[(0, 0)]).abs() < 1e-15));
        // Row scaling of B is irrelevant.
        let scaled = PreferenceMatrix::new(b.values() * 7.0).unwrap();
        let c1 = consumption(&b, &prices, &q, &r).unwrap();
        let c2 = consumption(&scaled, &prices, &q, &r).unwrap();
        assert!((c1.values() - c2.values()).amax() < 1e-14);
    }

    #[test]
    fn symmetric_prices_are_flat() {
        let b = PreferenceMatrix::uniform(4, 5).unwrap();
        let sol = solve_prices(&b, &[0.3; 5], &[0.6; 4]).unwrap();
        assert!(sol.prices.values().iter().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn prices_clear_markets() {
        for seed in 0..10 {
            let mut g = rng(100 + seed);
            let (r, q) = (random_vec(12, &mut g), random_vec(30, &mut g));
            let b = PreferenceMatrix::random(12, 30, 0.5, 1.5, &mut g).unwrap();
            let sol = solve_prices(&b, &q, &r).unwrap();
            assert!(sol.fixed_point_residual < 1e-10, "{}", sol.fixed_point_residual);
            assert!(sol.market_clearing_residual < 1e-8, "{}", sol.market_clearing_residual);
            assert!((sol.prices.mean() - 1.0).abs() < 1e-12);
            // Independent check against the stated price equation.
            let bm = b.row_means();
            let (pm, qpm) = (sol.prices.mean(), sol.prices.weighted_mean(&q));
            let rm = stats::mean(&r);
            for p in 0..30 {
                let num: f64 = (0..12).map(|c| b.values()[(c, p)] / bm[c] * (pm - qpm * (1.0 - r[c]))).sum();
                let want = num / (12.0 * (1.0 - q[p] * (1.0 - rm)));
                assert!((sol.prices.values()[p] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn prices_do_not_depend_on_start() {
        let mut g = rng(7);
        let (r, q) = (random_vec(10, &mut g), random_vec(25, &mut g));
        let b = PreferenceMatrix::random(10, 25, 0.5, 1.5, &mut g).unwrap();
        let base = solve_prices(&b, &q, &r).unwrap();
        for k in 0..10 {
            let init: Vec<f64> = random_vec(25, &mut rng(200 + k)).iter().map(|v| v + 0.01).collect();
            let opts = PriceOptions {
                initial: Some(init),
                ..PriceOptions::default()
            };
            let s = solve_prices_with(&b, &q, &r, &opts).unwrap();
            let dev = s.prices.values().iter().zip(base.prices.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            assert!(dev < 1e-8);
        }
    }

    #[test]
    fn dense_fallback_agrees() {
        let mut g = rng(11);
        let (r, q) = (random_vec(6, &mut g), random_vec(9, &mut g));
        let b = PreferenceMatrix::random(6, 9, 0.5, 1.5, &mut g).unwrap();
        let power = solve_prices(&b, &q, &r).unwrap();
        let opts = PriceOptions {
            max_iter: 1,
            ..PriceOptions::default()
        };
        let dense = solve_prices_with(&b, &q, &r, &opts).unwrap();
        assert_eq!(dense.method, PriceMethod::Linear);
        assert!(dense.fixed_point_residual < 1e-12);
        let dev = dense.prices.values().iter().zip(power.prices.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(dev < 1e-10);
    }

    #[test]
    fn uniform_preferences_rank_prices_by_q() {
        let mut g = rng(3);
        let (r, q) = (random_vec(15, &mut g), random_vec(40, &mut g));
        let sol = solve_prices(&PreferenceMatrix::uniform(15, 40).unwrap(), &q, &r).unwrap();
        assert_eq!(stats::spearman(sol.prices.values(), &q), Some(1.0));
    }

    #[test]
    fn priced_output_examples() {
        let r = gen_linspace(5).unwrap();
        let q = gen_linspace(7).unwrap();
        let y = priced_output(&PriceVector::uniform(7).unwrap(), &q, &r).unwrap();
        for c in 0..5 {
            for p in 0..7 {
                assert_eq!(y.values()[(c, p)], 1.0 - q[p] * (1.0 - r[c]));
            }
        }
        let prices = PriceVector::new((0..7).map(|i| 1.0 + 0.1 * i as f64).collect()).unwrap();
        let m1 = binarize(&rca(&priced_output(&prices, &q, &r).unwrap()).unwrap()).unwrap();
        let doubled = DMatrix::from_fn(5, 7, |c, p| 2.0 * prices.values()[p] * (1.0 - q[p] * (1.0 - r[c])));
        let m2 = binarize(&rca(&OutputMatrix::from_values(doubled).unwrap()).unwrap()).unwrap();
        assert_eq!(m1.values(), m2.values());
    }

    #[test]
    fn scenario_roundtrip() {
        let s = Scenario::from_toml("economies = 6\nactivities = 9\nlabor = [1, 2, 3, 4, 5, 6]\npreferences = \"uniform\"\n").unwrap();
        let run = run_scenario(&s).unwrap();
        assert_eq!(run.accounts.labor, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(run.budget_residual < 1e-10);
        assert!(Scenario::from_toml("bogus = 1").is_err());
        let s = Scenario::from_toml("labor = 2.5").unwrap();
        assert_eq!(s.labor, LaborSpec::Uniform(2.5));
    }

    proptest! {
        #[test]
        fn priced_pipeline_matches_condition(seed in 0u64..500) {
            let mut g = rng(seed);
            let (r, q) = (random_vec(7, &mut g), random_vec(11, &mut g));
            let b = PreferenceMatrix::random(7, 11, 0.5, 1.5, &mut g).unwrap();
            let sol = solve_prices(&b, &q, &r).unwrap();
            let m = binarize(&rca(&priced_output(&sol.prices, &q, &r).unwrap()).unwrap()).unwrap();
            let (want, _) = priced_specialization(&r, &q, &sol.prices).unwrap();
            prop_assert_eq!(m.values(), want.values());
        }

        #[test]
        fn wages_affine_in_r(r in prop::collection::vec(0.0f64..=1.0, 2..10), seed in 0u64..100) {
            let mut g = rng(seed);
            let q = random_vec(6, &mut g);
            let prices = PriceVector::new(random_vec(6, &mut g).iter().map(|v| v + 0.1).collect()).unwrap();
            let l = vec![1.5; r.len()];
            let acc = equilibrium_wages(&prices, &q, &r, &l).unwrap();
            for i in 0..r.len() {
                for j in 0..r.len() {
                    if (r[i] - r[j]).abs() > 1e-6 {
                        let slope = (acc.wages[i] - acc.wages[j]) / (r[i] - r[j]);
                        prop_assert!((slope - acc.wage_slope[i]).abs() < 1e-9 * acc.wage_slope[i].max(1.0));
                    }
                }
            }
        }
    }
}
