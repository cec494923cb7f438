//! Second eigenvector of a row-stochastic matrix.
//!
//! Small matrices go through a dense real Schur decomposition (all
//! eigenvalues) followed by an SVD null-space solve for the eigenvectors.
//! Larger ones use power iteration with the all-ones eigenvector deflated
//! through the stationary distribution.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Largest size solved densely; above this power iteration is used.
    pub dense_max: usize,
    /// Convergence tolerance on the iterate sup-norm (power path).
    pub tol: f64,
    pub max_iter: usize,
    /// Eigenvalues closer than this are treated as one degenerate value.
    pub degeneracy_tol: f64,
    /// Largest relative imaginary part accepted for the second eigenvalue.
    pub complex_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_max: 512,
            tol: 1e-10,
            max_iter: 10_000,
            degeneracy_tol: 1e-9,
            complex_tol: 1e-8,
        }
    }
}

/// How the global sign of an eigenvector was fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignAnchor {
    /// Covariance with the anchor vector made nonnegative.
    Covariance(f64),
    /// Anchor was uninformative; first non-negligible component made positive.
    FirstComponent(usize),
    /// Zero vector, nothing to orient.
    Undetermined,
}

impl SignAnchor {
    pub fn describe(&self) -> String {
        match self {
            SignAnchor::Covariance(c) => {
                format!("covariance with diversity-seeded reflection made nonnegative (cov = {c:.3e})")
            }
            SignAnchor::FirstComponent(i) => {
                format!("anchor uninformative; component {i} made positive")
            }
            SignAnchor::Undetermined => "zero vector".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solver {
    Dense,
    Power { iterations: usize, converged: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondEigen {
    /// Unit-norm eigenvector.
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    /// Real parts sorted descending (dense path), or `[1, λ₂]` (power path).
    pub spectrum: Vec<f64>,
    /// Top eigenvalue was degenerate and the vector was taken from its
    /// eigenspace orthogonal to the ones vector.
    pub degenerate: bool,
    pub anchor: SignAnchor,
    pub solver: Solver,
}

fn normalize(v: &mut DVector<f64>) -> f64 {
    let n = v.norm();
    if n > 0.0 {
        *v /= n;
    }
    n
}

fn centered(v: &DVector<f64>) -> DVector<f64> {
    let m = v.mean();
    v.map(|x| x - m)
}

/// Flip `v` so that its covariance with `anchor` is nonnegative, falling
/// back to a positive first significant component.
pub fn orient(v: &mut [f64], anchor: &[f64]) -> SignAnchor {
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return SignAnchor::Undetermined;
    }
    let vv = DVector::from_column_slice(v);
    let av = DVector::from_column_slice(anchor);
    let (vc, ac) = (centered(&vv), centered(&av));
    let cov = vc.dot(&ac) / v.len() as f64;
    // Measured against the uncentred anchor so that an anchor which is
    // constant up to rounding counts as uninformative.
    let denom = vc.norm() * av.norm() / v.len() as f64;
    if denom > 0.0 && cov.abs() > 1e-9 * denom {
        if cov < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        return SignAnchor::Covariance(cov.abs());
    }
    let i = v.iter().position(|x| x.abs() > 1e-9 * scale).unwrap_or(0);
    if v[i] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    SignAnchor::FirstComponent(i)
}

/// Right null-space basis of `a` of the requested dimension (columns),
/// taken from the smallest singular values.
fn null_space(a: DMatrix<f64>, dim: usize) -> Result<DMatrix<f64>> {
    let n = a.ncols();
    let svd = a
        .try_svd(false, true, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("SVD failed to converge".into()))?;
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut basis = DMatrix::zeros(n, dim);
    for (k, &i) in order.iter().take(dim).enumerate() {
        basis.set_column(k, &v_t.row(i).transpose());
    }
    Ok(basis)
}

/// Orthonormal basis for `span(basis) ∩ 1^⊥`, dropping directions that
/// vanish after removing the ones component.
fn orthogonal_to_ones(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for col in basis.column_iter() {
        let mut v: DVector<f64> = col.into_owned();
        v -= &ones * ones.dot(&v);
        for u in &kept {
            v -= u * u.dot(&v);
        }
        if v.norm() > 1e-8 {
            normalize(&mut v);
            kept.push(v);
        }
    }
    if kept.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&kept)
}

/// Pick a single direction inside an orthonormal subspace: the projection
/// of `anchor` (centered), else of the first unit vector, else the first
/// basis vector.
fn pick_in_subspace(basis: &DMatrix<f64>, anchor: &DVector<f64>) -> DVector<f64> {
    let n = basis.nrows();
    let mut first = DVector::zeros(n);
    first[0] = 1.0;
    for cand in [centered(anchor), centered(&first)] {
        let coeffs = basis.transpose() * &cand;
        if coeffs.norm() > 1e-8 * cand.norm().max(1e-300) {
            let mut v = basis * coeffs;
            normalize(&mut v);
            return v;
        }
    }
    basis.column(0).into_owned()
}

fn dense_second(p: &DMatrix<f64>, anchor: &DVector<f64>, opts: &EigenOptions) -> Result<SecondEigen> {
    let n = p.nrows();
    let schur = nalgebra::linalg::Schur::try_new(p.clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition failed to converge".into()))?;
    let mut eig: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    eig.sort_by(|a, b| b.0.total_cmp(&a.0));
    let spectrum: Vec<f64> = eig.iter().map(|e| e.0).collect();
    let (l1, l2) = (eig[0], eig[1]);
    if l1.1.abs() > opts.complex_tol || (l1.0 - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "leading eigenvalue {} + {}i is not 1; matrix is not row-stochastic",
            l1.0, l1.1
        )));
    }
    let multiplicity = |target: f64| {
        eig.iter()
            .filter(|e| (e.0 - target).abs() < opts.degeneracy_tol && e.1.abs() < opts.degeneracy_tol)
            .count()
    };

    let degenerate = (l1.0 - l2.0).abs() < opts.degeneracy_tol;
    let (eigenvalue, vector) = if degenerate {
        let m = multiplicity(l1.0);
        let basis = null_space(p - DMatrix::identity(n, n) * l1.0, m)?;
        let sub = orthogonal_to_ones(&basis);
        if sub.ncols() == 0 {
            return Err(Error::Numerical("degenerate top eigenspace has no direction orthogonal to ones".into()));
        }
        (l1.0, pick_in_subspace(&sub, anchor))
    } else {
        if l2.1.abs() > opts.complex_tol * l2.0.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "second eigenvalue {} + {}i is materially complex; spectrum head: {:?}",
                l2.0,
                l2.1,
                &eig[..eig.len().min(4)]
            )));
        }
        let m = multiplicity(l2.0).max(1);
        let basis = null_space(p - DMatrix::identity(n, n) * l2.0, m)?;
        let v = if m == 1 {
            let mut v = basis.column(0).into_owned();
            normalize(&mut v);
            v
        } else {
            pick_in_subspace(&basis, anchor)
        };
        (l2.0, v)
    };
    let mut vector: Vec<f64> = vector.iter().copied().collect();
    let sign = orient(&mut vector, anchor.as_slice());
    Ok(SecondEigen {
        vector,
        eigenvalue,
        spectrum,
        degenerate,
        anchor: sign,
        solver: Solver::Dense,
    })
}

/// Left eigenvector of a row-stochastic matrix for eigenvalue 1,
/// normalised to sum 1.
pub fn stationary(p: &DMatrix<f64>, opts: &EigenOptions) -> Vec<f64> {
    let n = p.nrows();
    let pt = p.transpose();
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..opts.max_iter {
        let mut next = &pt * &x;
        let s = next.sum();
        next /= s;
        let diff = (&next - &x).amax();
        x = next;
        if diff < opts.tol * 1e-2 {
            break;
        }
    }
    x.iter().copied().collect()
}

fn power_second(
    p: &DMatrix<f64>,
    weights: &[f64],
    anchor: &DVector<f64>,
    opts: &EigenOptions,
) -> Result<SecondEigen> {
    let n = p.nrows();
    let pi = DVector::from_column_slice(weights);
    let total = pi.sum();
    let deflate = |v: &mut DVector<f64>| {
        let c = pi.dot(v) / total;
        v.add_scalar_mut(-c);
    };
    let mut x = anchor.clone();
    deflate(&mut x);
    if x.norm() < 1e-12 * anchor.norm().max(1.0) {
        // Anchor carries no second-eigenvector signal; start from a ramp.
        x = DVector::from_fn(n, |i, _| (n - i) as f64);
        deflate(&mut x);
    }
    normalize(&mut x);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        let mut next = p * &x;
        deflate(&mut next);
        if normalize(&mut next) == 0.0 {
            return Err(Error::Numerical("power iteration collapsed to zero".into()));
        }
        if next.dot(&x) < 0.0 {
            next = -next;
        }
        let diff = (&next - &x).amax();
        x = next;
        iterations = it;
        if diff < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("power iteration stopped after {iterations} iterations without converging");
    }
    let px = p * &x;
    let eigenvalue = x.dot(&px);
    let mut vector: Vec<f64> = x.iter().copied().collect();
    let sign = orient(&mut vector, anchor.as_slice());
    Ok(SecondEigen {
        vector,
        eigenvalue,
        spectrum: vec![1.0, eigenvalue],
        degenerate: (1.0 - eigenvalue).abs() < opts.degeneracy_tol,
        anchor: sign,
        solver: Solver::Power { iterations, converged },
    })
}

/// Second eigenvector of the row-stochastic matrix `p`.
///
/// `anchor` orients the result (and picks a direction inside degenerate
/// eigenspaces); `weights`, when known, is the stationary distribution
/// used to deflate the ones vector on the power path.
pub fn second_eigenvector(
    p: &DMatrix<f64>,
    anchor: &[f64],
    weights: Option<&[f64]>,
    opts: &EigenOptions,
) -> Result<SecondEigen> {
    let n = p.nrows();
    if n != p.ncols() {
        return Err(Error::Dimension(format!("matrix must be square, got {}x{}", n, p.ncols())));
    }
    if n < 2 {
        return Err(Error::Dimension("need at least a 2x2 matrix".into()));
    }
    if anchor.len() != n {
        return Err(Error::Dimension("anchor length does not match matrix".into()));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let anchor = DVector::from_column_slice(anchor);
    if n <= opts.dense_max {
        dense_second(p, &anchor, opts)
    } else {
        let owned;
        let w = match weights {
            Some(w) => w,
            None => {
                owned = stationary(p, opts);
                &owned
            }
        };
        power_second(p, w, &anchor, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, data.len() / rows, data)
    }

    #[test]
    fn block_matrix_is_degenerate() {
        let p = m(4, &[0.5, 0.5, 0., 0., 0.5, 0.5, 0., 0., 0., 0., 0.5, 0.5, 0., 0., 0.5, 0.5]);
        let e = second_eigenvector(&p, &[1.0; 4], None, &EigenOptions::default()).unwrap();
        assert!(e.degenerate);
        assert!((e.eigenvalue - 1.0).abs() < 1e-12);
        let h = 0.5;
        for (got, want) in e.vector.iter().zip([h, h, -h, -h]) {
            assert!((got - want).abs() < 1e-10, "{:?}", e.vector);
        }
        assert!(matches!(e.anchor, SignAnchor::FirstComponent(0)));
    }

    #[test]
    fn rejects_non_stochastic() {
        let p = m(2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(matches!(
            second_eigenvector(&p, &[0.0, 0.0], None, &EigenOptions::default()),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn rejects_complex_second_eigenvalue() {
        // Rotation-like stochastic matrix: eigenvalues 1 and a complex pair.
        let p = m(3, &[0.1, 0.8, 0.1, 0.1, 0.1, 0.8, 0.8, 0.1, 0.1]);
        let err = second_eigenvector(&p, &[0.0; 3], None, &EigenOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)), "{err}");
    }

    #[test]
    fn orient_prefers_anchor_then_first_component() {
        let mut v = vec![-1.0, 0.0, 1.0];
        assert!(matches!(orient(&mut v, &[3.0, 2.0, 1.0]), SignAnchor::Covariance(_)));
        assert_eq!(v, vec![1.0, 0.0, -1.0]);
        let mut v = vec![0.0, -2.0, 2.0];
        assert_eq!(orient(&mut v, &[1.0; 3]), SignAnchor::FirstComponent(1));
        assert_eq!(v, vec![0.0, 2.0, -2.0]);
    }

    #[test]
    fn stationary_of_reversible_chain() {
        // P = D^-1 W with W symmetric: stationary ∝ row sums of W.
        let w = m(3, &[2.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 3.0]);
        let d: Vec<f64> = w.row_iter().map(|r| r.sum()).collect();
        let p = DMatrix::from_fn(3, 3, |i, j| w[(i, j)] / d[i]);
        let pi = stationary(&p, &EigenOptions::default());
        let total: f64 = d.iter().sum();
        for (a, b) in pi.iter().zip(&d) {
            assert!((a - b / total).abs() < 1e-10);
        }
    }
}
