//! Numerical certificates: the simple-eigenvalue test with positive
//! eigenvectors, the witness polynomial, the base cycle realization and the
//! super-pattern lift.

use std::fmt;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::constructions::EigenTriple;
use crate::linalg::{dot, eigenvalues, norm2, one_signed, shifted_svd};
use crate::pattern::{is_subpattern, sign_of, RealMatrix, Sign, SignPattern};
use crate::precise::{charpoly_dd, evaluate_dd, horner, refine_root};

/// Relative residual tolerance for eigen relations.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;
/// Relative threshold separating a positive component from zero.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// |vᵀu| must exceed this times ‖u‖‖v‖.
pub const PAIRING_TOL: f64 = 1e-8;

const IMAG_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigenvalue iteration did not converge")]
    NumericalFailure,
    #[error("eigenvalue {0} is not simple")]
    NotSimple(f64),
    #[error("derivative of the characteristic polynomial vanishes at {0}")]
    NumericallySingular(f64),
    #[error("witness evaluation has a non-positive entry ({0:e})")]
    WitnessNotPositive(f64),
    #[error("pattern does not have the base cycle shape: {0}")]
    ShapeMismatch(String),
    #[error("target is not a super-pattern of the current pattern")]
    NotSuperpattern,
    #[error("no admissible perturbation after 60 halvings")]
    EpsilonExhausted,
}

/// Why a matrix failed the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    NoRealEigenvalue,
    NoPositiveEigenvectors,
    NotSimple,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::NoRealEigenvalue => "no real eigenvalue",
            Failure::NoPositiveEigenvectors => "no real eigenvalue has positive left and right eigenvectors",
            Failure::NotSimple => "the eigenvalue with positive eigenvectors is not simple",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub positive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

impl Verdict {
    fn negative(f: Failure) -> Self {
        Verdict {
            positive: false,
            lambda: None,
            u: None,
            v: None,
            failure: Some(f),
        }
    }

    fn from_triple(t: &EigenTriple) -> Self {
        Verdict {
            positive: true,
            lambda: Some(t.lambda),
            u: Some(t.u.clone()),
            v: Some(t.v.clone()),
            failure: None,
        }
    }
}

/// Rank test plus the pairing condition vᵀu ≠ 0.
pub fn check_simple(m: &RealMatrix, lambda: f64, u: &[f64], v: &[f64]) -> bool {
    let n = m.order();
    let Some(sh) = shifted_svd(m, lambda) else {
        return false;
    };
    sh.rank(RANK_TOL, m.inf_norm()) == n - 1 && dot(u, v).abs() > PAIRING_TOL * norm2(u) * norm2(v)
}

fn real_candidates(m: &RealMatrix) -> Result<Vec<f64>, SpectralError> {
    let eig = eigenvalues(m).ok_or(SpectralError::NumericalFailure)?;
    let mut re: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= IMAG_TOL * z.norm().max(1.0))
        .map(|z| z.re)
        .collect();
    re.sort_by(|a, b| b.total_cmp(a));
    re.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    Ok(re)
}

/// Try to certify `lambda` (approximately an eigenvalue) as simple with positive eigenvectors.
fn qualify(m: &RealMatrix, lambda: f64) -> Result<EigenTriple, Failure> {
    let n = m.order();
    let mut lam = lambda;
    for _ in 0..2 {
        let sh = shifted_svd(m, lam).ok_or(Failure::NotSimple)?;
        if n > 1 && sh.rank(RANK_TOL, m.inf_norm()) < n - 1 {
            return Err(Failure::NotSimple);
        }
        let (u, v) = if n == 1 {
            (vec![1.0], vec![1.0])
        } else {
            let u = one_signed(&sh.right, POSITIVITY_TOL).ok_or(Failure::NoPositiveEigenvectors)?;
            let v = one_signed(&sh.left, POSITIVITY_TOL).ok_or(Failure::NoPositiveEigenvectors)?;
            (u, v)
        };
        let vu = dot(&v, &u);
        let refined = dot(&v, &m.mul_vec(&u)) / vu;
        let t = EigenTriple {
            matrix: m.clone(),
            lambda: refined,
            u,
            v,
        };
        let scale = m.inf_norm().max(f64::MIN_POSITIVE);
        let (ru, rv) = t.residuals();
        if ru <= RESIDUAL_TOL * scale && rv <= RESIDUAL_TOL * scale {
            if !check_simple(m, t.lambda, &t.u, &t.v) {
                return Err(Failure::NotSimple);
            }
            return Ok(t);
        }
        lam = refined;
    }
    Err(Failure::NotSimple)
}

fn certify_by<F: Fn(f64) -> f64>(m: &RealMatrix, key: F) -> Result<Result<EigenTriple, Failure>, SpectralError> {
    let mut cands = real_candidates(m)?;
    cands.sort_by(|a, b| key(*a).total_cmp(&key(*b)));
    let mut worst = Failure::NoRealEigenvalue;
    for lam in cands {
        match qualify(m, lam) {
            Ok(t) => return Ok(Ok(t)),
            Err(f) => worst = worst.max(f),
        }
    }
    Ok(Err(worst))
}

/// Scan the real eigenvalues (largest first) for one that is simple with
/// strictly positive left and right eigenvectors.
pub fn find_eigen_triple(m: &RealMatrix) -> Result<Verdict, SpectralError> {
    Ok(match certify_by(m, |x| -x)? {
        Ok(t) => Verdict::from_triple(&t),
        Err(f) => Verdict::negative(f),
    })
}

/// Like [`find_eigen_triple`] but prefers the qualifying eigenvalue nearest `target`.
pub fn eigen_triple_near(m: &RealMatrix, target: f64) -> Result<Option<EigenTriple>, SpectralError> {
    Ok(certify_by(m, |x| (x - target).abs())?.ok())
}

/// Polynomial with real coefficients, lowest degree first.
///
/// Witnesses built here also carry `low`, the second halves of double-double
/// coefficients; when present, evaluation at a matrix runs in double-double.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPolynomial {
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub low: Vec<f64>,
}

impl WitnessPolynomial {
    pub fn from_coefficients(coefficients: Vec<f64>) -> Self {
        WitnessPolynomial {
            coefficients,
            low: Vec::new(),
        }
    }

    fn from_dd(c: &[TwoFloat]) -> Self {
        WitnessPolynomial {
            coefficients: c.iter().map(|x| x.hi()).collect(),
            low: c.iter().map(|x| x.lo()).collect(),
        }
    }

    fn dd(&self) -> Vec<TwoFloat> {
        let lo = |k: usize| self.low.get(k).copied().unwrap_or(0.0);
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| TwoFloat::new_add(c, lo(k)))
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval_scalar(&self, x: f64) -> f64 {
        horner(&self.dd(), TwoFloat::from(x)).hi()
    }

    /// f(M); double-double when the coefficients carry low parts.
    pub fn evaluate(&self, m: &RealMatrix) -> RealMatrix {
        if self.low.is_empty() {
            self.evaluate_horner(m)
        } else {
            evaluate_dd(&self.dd(), m)
        }
    }

    /// f(M) by Horner's rule in plain f64.
    pub fn evaluate_horner(&self, m: &RealMatrix) -> RealMatrix {
        let n = m.order();
        let mut acc = RealMatrix::zeros(n);
        for &c in self.coefficients.iter().rev() {
            acc = acc.matmul(m).add_diagonal(c);
        }
        acc
    }

    fn negate(&mut self) {
        self.coefficients.iter_mut().for_each(|c| *c = -*c);
        self.low.iter_mut().for_each(|c| *c = -*c);
    }
}

/// Characteristic polynomial (ascending coefficients) from computed eigenvalues.
fn charpoly_from_spectrum(m: &RealMatrix) -> Result<Vec<TwoFloat>, SpectralError> {
    let eig = eigenvalues(m).ok_or(SpectralError::NumericalFailure)?;
    let mut c: Vec<Complex<f64>> = vec![Complex::new(1.0, 0.0)];
    for mu in eig {
        let mut next = vec![Complex::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= ck * mu;
        }
        c = next;
    }
    Ok(c.into_iter().map(|z| TwoFloat::from(z.re)).collect())
}

/// f = ±p(x)/(x − λ), sign chosen so that f(M) is entrywise positive.
///
/// p is the exact characteristic polynomial (rounded to double-double), λ is
/// polished as a root of it, and the division is synthetic.
pub fn witness_polynomial(m: &RealMatrix, lambda: f64) -> Result<WitnessPolynomial, SpectralError> {
    let n = m.order();
    let sh = shifted_svd(m, lambda).ok_or(SpectralError::NumericalFailure)?;
    if !check_simple(m, lambda, &sh.right, &sh.left) {
        return Err(SpectralError::NotSimple(lambda));
    }
    let p = match charpoly_dd(m) {
        Some(p) => p,
        None => charpoly_from_spectrum(m)?,
    };
    let lam = refine_root(&p, lambda);
    // synthetic division, highest degree first
    let mut g = vec![TwoFloat::from(0.0); n];
    let mut carry = TwoFloat::from(0.0);
    for k in (1..=n).rev() {
        carry = p[k] + lam * carry;
        g[k - 1] = carry;
    }
    let scale: f64 = g
        .iter()
        .enumerate()
        .map(|(k, c)| c.hi().abs() * lambda.abs().powi(k as i32))
        .sum();
    if horner(&g, lam).hi().abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return Err(SpectralError::NumericallySingular(lambda));
    }
    let mut f = WitnessPolynomial::from_dd(&g);
    if f.evaluate(m).get(0, 0) < 0.0 {
        f.negate();
    }
    Ok(f)
}

/// Certificate search plus witness; the witness is re-evaluated at M.
pub fn verify_algebraic_positivity(m: &RealMatrix) -> Result<(Verdict, Option<WitnessPolynomial>), SpectralError> {
    let verdict = find_eigen_triple(m)?;
    let Some(lambda) = verdict.lambda.filter(|_| verdict.positive) else {
        return Ok((verdict, None));
    };
    let f = witness_polynomial(m, lambda)?;
    let min = f.evaluate(m).min_entry();
    if min <= 0.0 {
        return Err(SpectralError::WitnessNotPositive(min));
    }
    Ok((verdict, Some(f)))
}

/// M = 2I − C for a pattern whose diagonal is all + and whose off-diagonal
/// nonzeros are − entries along one Hamiltonian cycle. λ = 1, u = v = 1.
pub fn realize_base_cycle(x: &SignPattern) -> Result<EigenTriple, SpectralError> {
    let n = x.order();
    let bad = |s: &str| Err(SpectralError::ShapeMismatch(s.to_string()));
    let mut next = vec![usize::MAX; n];
    for (i, succ) in next.iter_mut().enumerate() {
        if x.get(i, i) != Sign::Plus {
            return bad("diagonal must be all +");
        }
        for j in (0..n).filter(|&j| j != i) {
            match x.get(i, j) {
                Sign::Zero => {}
                Sign::Plus => return bad("off-diagonal + entry"),
                Sign::Minus if *succ == usize::MAX => *succ = j,
                Sign::Minus => return bad("row with two off-diagonal entries"),
            }
        }
    }
    if n > 1 {
        let mut seen = vec![false; n];
        let mut v = 0;
        for _ in 0..n {
            if next[v] == usize::MAX || seen[v] {
                return bad("off-diagonal entries do not form one cycle");
            }
            seen[v] = true;
            v = next[v];
        }
        if v != 0 {
            return bad("off-diagonal entries do not form one cycle");
        }
    }
    let mut m = RealMatrix::zeros(n);
    for (i, &j) in next.iter().enumerate() {
        m.set(i, i, if n == 1 { 1.0 } else { 2.0 });
        if n > 1 {
            m.set(i, j, -1.0);
        }
    }
    Ok(EigenTriple {
        matrix: m,
        lambda: 1.0,
        u: vec![1.0; n],
        v: vec![1.0; n],
    })
}

/// Add ±ε at the entries where `a` is nonzero and the current matrix is zero,
/// halving ε from 1 until the certificate survives.
pub fn perturb_to_superpattern(t: &EigenTriple, a: &SignPattern) -> Result<EigenTriple, SpectralError> {
    perturb_with_epsilon(t, a).map(|(t, _)| t)
}

/// As [`perturb_to_superpattern`], also returning the ε used (None if nothing changed).
pub fn perturb_with_epsilon(t: &EigenTriple, a: &SignPattern) -> Result<(EigenTriple, Option<f64>), SpectralError> {
    let x = sign_of(&t.matrix, 0.0);
    if !is_subpattern(&x, a).map_err(|_| SpectralError::NotSuperpattern)? {
        return Err(SpectralError::NotSuperpattern);
    }
    let n = a.order();
    let mut delta = RealMatrix::zeros(n);
    let mut any = false;
    for (i, j) in a.nonzeros() {
        if x.get(i, j) == Sign::Zero {
            delta.set(i, j, if a.get(i, j) == Sign::Plus { 1.0 } else { -1.0 });
            any = true;
        }
    }
    if !any {
        return Ok((t.clone(), None));
    }
    let mut eps = 1.0;
    for _ in 0..=60 {
        let cand = t.matrix.add(&delta.scale(eps));
        if sign_of(&cand, 0.0) == *a {
            // the certified eigenvalue must be the continuation of the old one
            if let Some(next) = eigen_triple_near(&cand, t.lambda)? {
                if (next.lambda - t.lambda).abs() <= 0.5 * t.lambda.abs() {
                    return Ok((next, Some(eps)));
                }
            }
        }
        eps *= 0.5;
    }
    Err(SpectralError::EpsilonExhausted)
}
