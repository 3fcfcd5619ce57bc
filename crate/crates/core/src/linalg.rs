//! Thin wrappers over nalgebra for the few dense kernels we need.

use nalgebra::{Complex, DMatrix, DVector, Schur, SVD};

use crate::pattern::RealMatrix;

pub(crate) fn to_na(m: &RealMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.order(), m.order(), m.data())
}

/// All eigenvalues; `None` if the Schur iteration fails to converge.
///
/// Unshifted-looking inputs such as cyclic permutations stall the Francis
/// iteration, so on failure we retry on a few fixed reflections H·M·H.
pub(crate) fn eigenvalues(m: &RealMatrix) -> Option<Vec<Complex<f64>>> {
    let a = to_na(m);
    if let Some(s) = Schur::try_new(a.clone(), f64::EPSILON, 100_000) {
        return Some(s.complex_eigenvalues().iter().copied().collect());
    }
    let n = m.order();
    (0..4).find_map(|k| {
        let h = reflection(n, k);
        let s = Schur::try_new(&h * &a * &h, f64::EPSILON, 100_000)?;
        Some(s.complex_eigenvalues().iter().copied().collect())
    })
}

/// Singular data of `M − λI`.
pub(crate) struct Shifted {
    pub sigma: Vec<f64>,
    /// Right singular vector for the smallest singular value.
    pub right: Vec<f64>,
    /// Left singular vector for the smallest singular value.
    pub left: Vec<f64>,
}

impl Shifted {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }

    /// Numerical rank with threshold `rel · max(σ_max, floor)`.
    pub fn rank(&self, rel: f64, floor: f64) -> usize {
        let cut = rel * self.sigma_max().max(floor);
        self.sigma.iter().filter(|&&s| s > cut).count()
    }
}

pub(crate) fn shifted_svd(m: &RealMatrix, lambda: f64) -> Option<Shifted> {
    let n = m.order();
    let a = to_na(m) - DMatrix::<f64>::identity(n, n) * lambda;
    let (sigma, right) = null_direction(&a)?;
    // the left factor of nalgebra's SVD can be poor for tiny σ; use Aᵀ instead
    let (_, left) = null_direction(&a.transpose())?;
    Some(Shifted { sigma, right, left })
}

/// Singular values of `a` and the right singular vector of the smallest one.
fn null_direction(a: &DMatrix<f64>) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = a.nrows();
    // on non-convergence: A = H·(H·A·H)·H, so right singular vectors map through H
    let (svd, h) = match SVD::try_new(a.clone(), false, true, f64::EPSILON, 100_000) {
        Some(svd) => (svd, None),
        None => (0..4).find_map(|k| {
            let h = reflection(n, k);
            SVD::try_new(&h * a * &h, false, true, f64::EPSILON, 100_000).map(|s| (s, Some(h)))
        })?,
    };
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let k = sigma
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v = svd.v_t?.transpose();
    if let Some(h) = h {
        v = &h * v;
    }
    Some((sigma, v.column(k).iter().copied().collect()))
}

/// Householder reflection from a fixed, non-symmetric direction.
fn reflection(n: usize, k: usize) -> DMatrix<f64> {
    let w = DVector::from_fn(n, |i, _| ((i + 1) as f64 * (0.618 + k as f64)).sin() + 0.1);
    DMatrix::<f64>::identity(n, n) - (&w * w.transpose()) * (2.0 / w.norm_squared())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn inf_norm_vec(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Flip to positive if every component has one strict sign above the relative
/// threshold; `None` otherwise.
pub(crate) fn one_signed(x: &[f64], rel: f64) -> Option<Vec<f64>> {
    let max = inf_norm_vec(x);
    if max == 0.0 {
        return None;
    }
    let cut = rel * max;
    if x.iter().all(|&c| c > cut) {
        Some(x.to_vec())
    } else if x.iter().all(|&c| c < -cut) {
        Some(x.iter().map(|c| -c).collect())
    } else {
        None
    }
}
