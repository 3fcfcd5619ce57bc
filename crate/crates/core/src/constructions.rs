//! Eigen-data preserving block constructions.
//!
//! Every operation acts on the leading index (row 0) and a caller-chosen
//! column `j`; callers permute beforehand. Indices here are 0-based: a cycle
//! or path position `p` in the usual 1-based statement is `p - 1` here.
//! Each op returns the new matrix with its closed-form eigenvectors and
//! re-checks the certificate before returning.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::inf_norm_vec;
use crate::pattern::{Permutation, RealMatrix};
use crate::spectral::{check_simple, RESIDUAL_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("entry ({row}, {col}) has the wrong sign ({value})")]
    SignPrecondition { row: usize, col: usize, value: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("bad variant indices: {0}")]
    BadVariantIndices(String),
    #[error("epsilon {0} is not in (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("epsilon is not admissible: margin {0}")]
    InequalityViolated(f64),
    #[error("column-sum hypothesis fails: {0}")]
    HypothesisViolated(f64),
    #[error("matrix does not have the contraction shape: {0}")]
    ShapeMismatch(String),
    #[error("pivot entry (0, 1) is zero")]
    ZeroPivot,
    #[error("eigen-triple check failed: {0}")]
    InvalidTriple(String),
}

/// A matrix with a simple eigenvalue and positive right/left eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTriple {
    pub matrix: RealMatrix,
    pub lambda: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl EigenTriple {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    /// (‖Mu − λu‖∞, ‖vᵀM − λvᵀ‖∞).
    pub fn residuals(&self) -> (f64, f64) {
        let mu = self.matrix.mul_vec(&self.u);
        let vm = self.matrix.vec_mul(&self.v);
        let ru = mu
            .iter()
            .zip(&self.u)
            .fold(0.0f64, |m, (a, b)| m.max((a - self.lambda * b).abs()));
        let rv = vm
            .iter()
            .zip(&self.v)
            .fold(0.0f64, |m, (a, b)| m.max((a - self.lambda * b).abs()));
        (ru, rv)
    }

    /// Residuals relative to max(‖M‖∞, |λ|) (so a zero matrix is handled).
    pub fn relative_residual(&self) -> f64 {
        let (ru, rv) = self.residuals();
        let scale = self.matrix.inf_norm().max(self.lambda.abs()).max(f64::MIN_POSITIVE);
        ru.max(rv) / (scale * inf_norm_vec(&self.u).max(inf_norm_vec(&self.v)))
    }

    /// Residuals, positivity and simplicity.
    pub fn check(&self) -> Result<(), ConstructionError> {
        let n = self.order();
        if self.u.len() != n || self.v.len() != n {
            return Err(ConstructionError::InvalidTriple("vector length".into()));
        }
        if !self.u.iter().chain(&self.v).all(|&x| x > 0.0 && x.is_finite()) {
            return Err(ConstructionError::InvalidTriple("eigenvectors must be positive".into()));
        }
        let r = self.relative_residual();
        if !(r <= RESIDUAL_TOL) {
            return Err(ConstructionError::InvalidTriple(format!("relative residual {r:e}")));
        }
        if !check_simple(&self.matrix, self.lambda, &self.u, &self.v) {
            return Err(ConstructionError::InvalidTriple(format!(
                "eigenvalue {} is not simple",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Relabel by σ: new index i is old index σ(i).
    pub fn permute(&self, sigma: &Permutation) -> EigenTriple {
        EigenTriple {
            matrix: self.matrix.permute(sigma),
            lambda: self.lambda,
            u: sigma.images().iter().map(|&i| self.u[i]).collect(),
            v: sigma.images().iter().map(|&i| self.v[i]).collect(),
        }
    }

    /// Divide M by λ so the eigenvalue becomes 1; vectors rescaled to max 1.
    pub fn normalized(&self) -> EigenTriple {
        let su = inf_norm_vec(&self.u);
        let sv = inf_norm_vec(&self.v);
        EigenTriple {
            matrix: self.matrix.scale(1.0 / self.lambda),
            lambda: 1.0,
            u: self.u.iter().map(|x| x / su).collect(),
            v: self.v.iter().map(|x| x / sv).collect(),
        }
    }

    pub fn negate(&self) -> EigenTriple {
        EigenTriple {
            matrix: self.matrix.scale(-1.0),
            lambda: -self.lambda,
            u: self.u.clone(),
            v: self.v.clone(),
        }
    }
}

/// Output of a parameterized construction with the ε it used.
#[derive(Debug, Clone, PartialEq)]
pub struct Constructed {
    pub triple: EigenTriple,
    pub epsilon: Option<f64>,
}

/// Variants of splitting the positive leading diagonal entry into a k-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variant24 {
    /// Arcs into the old leading index go to cycle position `j`.
    Cycle { j: usize },
    /// Chord from position `j` to `s` (weight (1−ε)λ), incoming arcs to `s`.
    Chord { j: usize, s: usize, eps: Option<f64> },
    /// The closing arc is split between positions 0 and `s`, incoming arcs to `s`.
    SplitEntry { s: usize, eps: Option<f64> },
}

/// Variants of inserting an m-path in place of the entry (0, j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variant25 {
    /// Relocated rows go to path position `s`.
    Plain { s: usize },
    /// Chord from path position `s` to `t` with weight (1−ε)λ.
    Chord { s: usize, t: usize, eps: Option<f64> },
    /// Last path vertex splits its exit between `j` and position `t`.
    SplitTerminal { t: usize, eps: Option<f64> },
}

fn validated(t: &EigenTriple) -> Result<(), ConstructionError> {
    if !(t.lambda > 0.0) {
        return Err(ConstructionError::DegenerateInput(format!("lambda = {}", t.lambda)));
    }
    t.check()
}

fn finish(b: RealMatrix, lambda: f64, w: Vec<f64>, z: Vec<f64>) -> Result<EigenTriple, ConstructionError> {
    let out = EigenTriple {
        matrix: b,
        lambda,
        u: w,
        v: z,
    };
    out.check()?;
    Ok(out)
}

fn check_eps(eps: f64) -> Result<f64, ConstructionError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(eps)
    } else {
        Err(ConstructionError::EpsilonOutOfRange(eps))
    }
}

/// ½·min(1, bound), or the caller's ε after a range check.
fn pick_eps(eps: Option<f64>, bound: f64) -> Result<f64, ConstructionError> {
    match eps {
        Some(e) => check_eps(e),
        None => Ok(0.5 * bound.min(1.0)),
    }
}

fn col_check(t: &EigenTriple, j: usize) -> Result<(), ConstructionError> {
    if j >= t.order() {
        return Err(ConstructionError::BadVariantIndices(format!("column {j} out of range")));
    }
    Ok(())
}

/// Negative entry (0, j): prepend a k-cycle through the new indices whose
/// diagonal is λ − a₀ⱼ, re-routing (0, j) through it.
pub fn attach_cycle_negative(t: &EigenTriple, j: usize, k: usize) -> Result<EigenTriple, ConstructionError> {
    validated(t)?;
    col_check(t, j)?;
    if k == 0 {
        return Err(ConstructionError::BadVariantIndices(
            "cycle length must be at least 1".into(),
        ));
    }
    let a = &t.matrix;
    let n = a.order();
    let a0j = a.get(0, j);
    if !(a0j < 0.0) {
        return Err(ConstructionError::SignPrecondition {
            row: 0,
            col: j,
            value: a0j,
        });
    }
    let lam = t.lambda;
    let mut b = RealMatrix::zeros(k + n);
    for p in 0..k {
        b.set(p, p, lam - a0j);
        if p + 1 < k {
            b.set(p, p + 1, a0j);
        }
    }
    b.set(k - 1, k + j, a0j);
    b.set(k, 0, a0j);
    copy_block(&mut b, a, k, &[(0, j)]);
    let w = (0..k + n).map(|i| if i < k { t.u[j] } else { t.u[i - k] }).collect();
    let z = (0..k + n).map(|i| if i < k { t.v[0] } else { t.v[i - k] }).collect();
    finish(b, lam, w, z)
}

/// Positive entry (0, j): prepend a k-cycle with diagonal 2λ and −λ links.
pub fn attach_cycle_positive(t: &EigenTriple, j: usize, k: usize) -> Result<EigenTriple, ConstructionError> {
    validated(t)?;
    col_check(t, j)?;
    if k == 0 {
        return Err(ConstructionError::BadVariantIndices(
            "cycle length must be at least 1".into(),
        ));
    }
    let a = &t.matrix;
    let n = a.order();
    let a0j = a.get(0, j);
    if !(a0j > 0.0) {
        return Err(ConstructionError::SignPrecondition {
            row: 0,
            col: j,
            value: a0j,
        });
    }
    let lam = t.lambda;
    let mut b = RealMatrix::zeros(k + n);
    for p in 0..k {
        b.set(p, p, 2.0 * lam);
        if p + 1 < k {
            b.set(p, p + 1, -lam);
        }
    }
    b.set(k - 1, k + j, -lam);
    b.set(k, 0, -a0j);
    copy_block(&mut b, a, k, &[]);
    b.set(k, k + j, 2.0 * a0j);
    let w = (0..k + n).map(|i| if i < k { t.u[j] } else { t.u[i - k] }).collect();
    let z = (0..k + n)
        .map(|i| if i < k { a0j * t.v[0] / lam } else { t.v[i - k] })
        .collect();
    finish(b, lam, w, z)
}

/// B[off + p][off + q] = A[p][q] except at the listed old positions.
fn copy_block(b: &mut RealMatrix, a: &RealMatrix, off: usize, skip: &[(usize, usize)]) {
    let n = a.order();
    for p in 0..n {
        for q in 0..n {
            if !skip.contains(&(p, q)) {
                b.set(off + p, off + q, a.get(p, q));
            }
        }
    }
}

/// Positive a₀₀: replace index 0 by a k-cycle (old index 0 becomes position
/// k−1). Output order k+n−1.
pub fn split_leading_diagonal(t: &EigenTriple, k: usize, variant: Variant24) -> Result<Constructed, ConstructionError> {
    validated(t)?;
    let a = &t.matrix;
    let n = a.order();
    let lam = t.lambda;
    let a11 = a.get(0, 0);
    if !(a11 > 0.0) {
        return Err(ConstructionError::SignPrecondition {
            row: 0,
            col: 0,
            value: a11,
        });
    }
    if k < 2 {
        return Err(ConstructionError::BadVariantIndices("k must be at least 2".into()));
    }
    let bad = |m: String| Err(ConstructionError::BadVariantIndices(m));
    let size = k + n - 1;
    let off = k - 1; // old index o sits at o + off
    let v1 = t.v[0];
    let mut b = RealMatrix::zeros(size);
    for p in 0..k - 1 {
        b.set(p, p + 1, lam);
    }
    for r in 0..n {
        for c in 1..n {
            b.set(r + off, c + off, a.get(r, c));
        }
    }
    let incoming = |b: &mut RealMatrix, col: usize| {
        for r in 1..n {
            b.set(r + off, col, a.get(r, 0));
        }
    };
    let w: Vec<f64> = (0..size)
        .map(|i| if i < k - 1 { t.u[0] } else { t.u[i - off] })
        .collect();
    let tail = |i: usize| t.v[i - off];
    let (z, eps): (Vec<f64>, Option<f64>) = match variant {
        Variant24::Cycle { j } => {
            if j >= k {
                return bad(format!("cycle position {j} not below k = {k}"));
            }
            b.set(k - 1, 0, a11);
            incoming(&mut b, j);
            let z = (0..size)
                .map(|i| {
                    if i < j {
                        a11 * v1 / lam
                    } else if i < k - 1 {
                        v1
                    } else {
                        tail(i)
                    }
                })
                .collect();
            (z, None)
        }
        Variant24::Chord { j, s, eps } => {
            if j + 1 >= k || s >= k || s == j + 1 {
                return bad(format!("chord ({j}, {s}) invalid for k = {k}"));
            }
            let e = pick_eps(eps, lam / a11)?;
            b.set(j, j + 1, e * lam);
            b.set(k - 1, 0, a11);
            b.set(j, s, (1.0 - e) * lam);
            incoming(&mut b, s);
            let (z, margin): (Vec<f64>, f64) = if s <= j {
                let z = (0..size)
                    .map(|i| {
                        if i < s {
                            a11 * v1 / lam
                        } else if i <= j {
                            v1 / e
                        } else if i < k - 1 {
                            v1
                        } else {
                            tail(i)
                        }
                    })
                    .collect();
                (z, (lam / e - a11) * v1)
            } else {
                let z = (0..size)
                    .map(|i| {
                        if i <= j {
                            a11 * v1 / lam
                        } else if i < s {
                            e * a11 * v1 / lam
                        } else if i < k - 1 {
                            v1
                        } else {
                            tail(i)
                        }
                    })
                    .collect();
                (z, (lam - e * a11) * v1)
            };
            if !(margin > 0.0) {
                return Err(ConstructionError::InequalityViolated(margin));
            }
            (z, Some(e))
        }
        Variant24::SplitEntry { s, eps } => {
            if s == 0 || s >= k {
                return bad(format!("split position {s} must lie in 1..{k}"));
            }
            let e = pick_eps(eps, lam / a11)?;
            b.set(k - 1, 0, e * a11);
            b.set(k - 1, s, (1.0 - e) * a11);
            incoming(&mut b, s);
            let margin = (lam - e * a11) * v1;
            if !(margin > 0.0) {
                return Err(ConstructionError::InequalityViolated(margin));
            }
            let z = (0..size)
                .map(|i| {
                    if i < s {
                        e * a11 * v1 / lam
                    } else if i < k - 1 {
                        v1
                    } else {
                        tail(i)
                    }
                })
                .collect();
            (z, Some(e))
        }
    };
    Ok(Constructed {
        triple: finish(b, lam, w, z)?,
        epsilon: eps,
    })
}

/// The column-sum S = a₀ⱼv₀ + Σ_{o ≥ k} aₒⱼvₒ that must stay positive.
pub fn expansion_sum(t: &EigenTriple, j: usize, k: usize) -> f64 {
    let a = &t.matrix;
    a.get(0, j) * t.v[0] + (k..t.order()).map(|o| a.get(o, j) * t.v[o]).sum::<f64>()
}

/// Positive a₀ⱼ: replace the entry by an m-path 0 → new₀ → … → new_{m−1} → j.
/// Old rows k..n have their column-j entries moved onto a path vertex.
/// Output order m+n, old index o at m+o.
pub fn expand_component(
    t: &EigenTriple,
    m: usize,
    j: usize,
    k: usize,
    variant: Variant25,
) -> Result<Constructed, ConstructionError> {
    validated(t)?;
    col_check(t, j)?;
    let a = &t.matrix;
    let n = a.order();
    let lam = t.lambda;
    let bad = |msg: String| Err(ConstructionError::BadVariantIndices(msg));
    if m == 0 {
        return bad("path length must be at least 1".into());
    }
    if k == 0 || k > n {
        return bad(format!("split row count {k} must be in 1..={n}"));
    }
    let a1j = a.get(0, j);
    if !(a1j > 0.0) {
        return Err(ConstructionError::SignPrecondition {
            row: 0,
            col: j,
            value: a1j,
        });
    }
    let s_sum = expansion_sum(t, j, k);
    if !(s_sum > 0.0) {
        return Err(ConstructionError::HypothesisViolated(s_sum));
    }
    let v1 = t.v[0];
    let size = m + n;
    let mut b = RealMatrix::zeros(size);
    for p in 0..m - 1 {
        b.set(p, p + 1, lam);
    }
    b.set(m - 1, m + j, lam);
    b.set(m, 0, a1j);
    let mut skip = vec![(0, j)];
    skip.extend((k..n).map(|o| (o, j)));
    copy_block(&mut b, a, m, &skip);
    let relocate = |b: &mut RealMatrix, col: usize| {
        for o in k..n {
            b.set(m + o, col, a.get(o, j));
        }
    };
    let w: Vec<f64> = (0..size).map(|i| if i < m { t.u[j] } else { t.u[i - m] }).collect();
    let lo = a1j * v1 / lam;
    let hi = s_sum / lam;
    let tail = |i: usize| t.v[i - m];
    let (z, eps): (Vec<f64>, Option<f64>) = match variant {
        Variant25::Plain { s } => {
            if s >= m {
                return bad(format!("path position {s} not below m = {m}"));
            }
            relocate(&mut b, s);
            let z = (0..size)
                .map(|i| {
                    if i < s {
                        lo
                    } else if i < m {
                        hi
                    } else {
                        tail(i)
                    }
                })
                .collect();
            (z, None)
        }
        Variant25::Chord { s, t: tt, eps } => {
            if s + 1 >= m || tt >= m || tt == s + 1 {
                return bad(format!("chord ({s}, {tt}) invalid for m = {m}"));
            }
            let e = pick_eps(eps, s_sum / (a1j * v1))?;
            b.set(s, s + 1, e * lam);
            b.set(s, tt, (1.0 - e) * lam);
            relocate(&mut b, tt);
            let (z, margin): (Vec<f64>, f64) = if tt <= s {
                let z = (0..size)
                    .map(|i| {
                        if i < tt {
                            lo
                        } else if i <= s {
                            hi / e
                        } else if i < m {
                            hi
                        } else {
                            tail(i)
                        }
                    })
                    .collect();
                (z, s_sum / e - a1j * v1)
            } else {
                let z = (0..size)
                    .map(|i| {
                        if i <= s {
                            lo
                        } else if i < tt {
                            e * lo
                        } else if i < m {
                            hi
                        } else {
                            tail(i)
                        }
                    })
                    .collect();
                (z, s_sum - e * a1j * v1)
            };
            if !(margin > 0.0) {
                return Err(ConstructionError::InequalityViolated(margin));
            }
            (z, Some(e))
        }
        Variant25::SplitTerminal { t: tt, eps } => {
            if tt >= m {
                return bad(format!("path position {tt} not below m = {m}"));
            }
            let e = pick_eps(eps, s_sum / (a1j * v1))?;
            b.set(m - 1, m + j, e * lam);
            b.set(m - 1, tt, (1.0 - e) * lam);
            relocate(&mut b, tt);
            let margin = s_sum / e - a1j * v1;
            if !(margin > 0.0) {
                return Err(ConstructionError::InequalityViolated(margin));
            }
            let z = (0..size)
                .map(|i| {
                    if i < tt {
                        lo
                    } else if i < m {
                        hi / e
                    } else {
                        tail(i)
                    }
                })
                .collect();
            (z, Some(e))
        }
    };
    Ok(Constructed {
        triple: finish(b, lam, w, z)?,
        epsilon: eps,
    })
}

/// Merge indices 0 and 1 of M = [[0, a₁₂, 0ᵀ], [a₂₁, 0, yᵀ], [x, 0, R]] into one
/// index with diagonal λ + a₂₁ − λ²/a₁₂.
pub fn contract_pair(t: &EigenTriple) -> Result<EigenTriple, ConstructionError> {
    validated(t)?;
    let a = &t.matrix;
    let n = a.order();
    let shape = |m: &str| Err(ConstructionError::ShapeMismatch(m.to_string()));
    if n < 2 {
        return shape("order must be at least 2");
    }
    if a.get(0, 0) != 0.0 || a.get(1, 1) != 0.0 {
        return shape("leading diagonal entries must be zero");
    }
    if (2..n).any(|c| a.get(0, c) != 0.0) {
        return shape("row 0 may only have the (0, 1) entry");
    }
    if (2..n).any(|r| a.get(r, 1) != 0.0) {
        return shape("column 1 may only have the (0, 1) entry");
    }
    let a12 = a.get(0, 1);
    if a12 == 0.0 {
        return Err(ConstructionError::ZeroPivot);
    }
    let lam = t.lambda;
    let a21 = a.get(1, 0);
    let corner = lam + a21 - lam * lam / a12;
    let mut b = RealMatrix::zeros(n - 1);
    b.set(0, 0, corner);
    for c in 2..n {
        b.set(0, c - 1, a.get(1, c));
    }
    for r in 2..n {
        b.set(r - 1, 0, a.get(r, 0));
        for c in 2..n {
            b.set(r - 1, c - 1, a.get(r, c));
        }
    }
    let mut w = vec![t.u[0]];
    w.extend_from_slice(&t.u[2..]);
    let z = t.v[1..].to_vec();
    finish(b, lam, w, z)
}
