//! Sign patterns, their positive/negative parts, and real matrices in the
//! qualitative class.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("empty pattern")]
    Empty,
    #[error("bad token {token:?} at row {row}, column {col}")]
    BadToken { row: usize, col: usize, token: String },
    #[error("pattern is not square: row {row} has {found} entries, expected {expected}")]
    NonSquare { row: usize, found: usize, expected: usize },
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("not a permutation of 0..{0}")]
    BadPermutation(usize),
    #[error("magnitude at ({row}, {col}) must be positive and finite")]
    NonpositiveMagnitude { row: usize, col: usize },
    #[error("matrix data has {found} entries, expected {expected}")]
    BadShape { found: usize, expected: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Zero,
    Plus,
    Minus,
}

impl Sign {
    pub fn is_nonzero(self) -> bool {
        self != Sign::Zero
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
        }
    }

    /// Sign of a real number with an absolute dead zone `tau`.
    pub fn of(x: f64, tau: f64) -> Sign {
        if x > tau {
            Sign::Plus
        } else if x < -tau {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Zero => '0',
        }
    }

    /// Base-3 digit used for encodings: 0, + -> 1, - -> 2.
    pub fn digit(self) -> u8 {
        match self {
            Sign::Zero => 0,
            Sign::Plus => 1,
            Sign::Minus => 2,
        }
    }

    pub fn from_digit(d: u8) -> Sign {
        match d % 3 {
            0 => Sign::Zero,
            1 => Sign::Plus,
            _ => Sign::Minus,
        }
    }

    fn parse(tok: &str) -> Option<Sign> {
        match tok {
            "+" => Some(Sign::Plus),
            "-" => Some(Sign::Minus),
            "0" => Some(Sign::Zero),
            _ => None,
        }
    }

    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
            Sign::Zero => 0.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A bijection of `0..n`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PatternError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PatternError::BadPermutation(n));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Transposition of `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self, PatternError> {
        if a >= n || b >= n {
            return Err(PatternError::BadPermutation(n));
        }
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(a, b);
        Ok(Permutation(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self, PatternError> {
        if self.len() != other.len() {
            return Err(PatternError::OrderMismatch(self.len(), other.len()));
        }
        Ok(Permutation(other.0.iter().map(|&i| self.0[i]).collect()))
    }
}

/// An `n × n` grid over {+, −, 0}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignPattern {
    n: usize,
    entries: Vec<Sign>,
}

impl SignPattern {
    pub fn new(n: usize, entries: Vec<Sign>) -> Result<Self, PatternError> {
        if n == 0 {
            return Err(PatternError::Empty);
        }
        if entries.len() != n * n {
            return Err(PatternError::BadShape {
                found: entries.len(),
                expected: n * n,
            });
        }
        Ok(SignPattern { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "pattern order must be positive");
        SignPattern {
            n,
            entries: vec![Sign::Zero; n * n],
        }
    }

    /// Build from rows of sign characters; panics on bad input, for literals in tests.
    pub fn from_rows(rows: &[&str]) -> Self {
        parse_pattern(&rows.join("\n")).expect("valid pattern literal")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Sign {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Sign) {
        self.entries[i * self.n + j] = s;
    }

    pub fn with_entry(&self, i: usize, j: usize, s: Sign) -> Self {
        let mut out = self.clone();
        out.set(i, j, s);
        out
    }

    pub fn entries(&self) -> &[Sign] {
        &self.entries
    }

    /// Nonzero positions in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_nonzero())
            .map(move |(k, _)| (k / n, k % n))
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|s| s.is_nonzero()).count()
    }

    pub fn negate(&self) -> Self {
        SignPattern {
            n: self.n,
            entries: self.entries.iter().map(|s| s.negate()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = SignPattern::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> &[Sign] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Base-3 digits, row-major.
    pub fn encoding(&self) -> Vec<u8> {
        self.entries.iter().map(|s| s.digit()).collect()
    }

    /// Principal subpattern on `idx` (in that order).
    pub fn principal(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut out = SignPattern::zeros(m.max(1));
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    /// Multi-line text grid in the input format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for SignPattern {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<String> = (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SignPattern {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(de)?;
        parse_pattern(&rows.join("\n")).map_err(serde::de::Error::custom)
    }
}

/// Parse whitespace-separated `+ - 0` tokens, one row per line. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_pattern(text: &str) -> Result<SignPattern, PatternError> {
    let mut rows: Vec<Vec<Sign>> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row_no = rows.len() + 1;
        let mut row = Vec::new();
        for (c, tok) in t.split_whitespace().enumerate() {
            let s = Sign::parse(tok).ok_or_else(|| PatternError::BadToken {
                row: row_no,
                col: c + 1,
                token: tok.to_string(),
            })?;
            row.push(s);
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(PatternError::Empty);
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(PatternError::NonSquare {
                row: i + 1,
                found: r.len(),
                expected: n,
            });
        }
    }
    Ok(SignPattern {
        n,
        entries: rows.into_iter().flatten().collect(),
    })
}

/// A₊: keeps the + entries.
pub fn positive_part(a: &SignPattern) -> SignPattern {
    SignPattern {
        n: a.n,
        entries: a
            .entries
            .iter()
            .map(|&s| if s == Sign::Plus { s } else { Sign::Zero })
            .collect(),
    }
}

/// A₋: keeps the − entries.
pub fn negative_part(a: &SignPattern) -> SignPattern {
    SignPattern {
        n: a.n,
        entries: a
            .entries
            .iter()
            .map(|&s| if s == Sign::Minus { s } else { Sign::Zero })
            .collect(),
    }
}

/// B_A = A₊ − (A₋)ᵀ; entries are + or 0.
pub fn b_matrix(a: &SignPattern) -> SignPattern {
    let n = a.n;
    let mut out = SignPattern::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) == Sign::Plus || a.get(j, i) == Sign::Minus {
                out.set(i, j, Sign::Plus);
            }
        }
    }
    out
}

pub fn is_subpattern(x: &SignPattern, a: &SignPattern) -> Result<bool, PatternError> {
    if x.n != a.n {
        return Err(PatternError::OrderMismatch(x.n, a.n));
    }
    Ok(x.entries
        .iter()
        .zip(&a.entries)
        .all(|(&s, &t)| s == Sign::Zero || s == t))
}

/// result(i, j) = A(σ(i), σ(j)).
pub fn permute(a: &SignPattern, sigma: &Permutation) -> Result<SignPattern, PatternError> {
    if sigma.len() != a.n {
        return Err(PatternError::OrderMismatch(a.n, sigma.len()));
    }
    let n = a.n;
    let mut out = SignPattern::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, a.get(sigma.apply(i), sigma.apply(j)));
        }
    }
    Ok(out)
}

/// Dense real `n × n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, PatternError> {
        if n == 0 {
            return Err(PatternError::Empty);
        }
        if data.len() != n * n {
            return Err(PatternError::BadShape {
                found: data.len(),
                expected: n * n,
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(PatternError::NonFinite {
                row: k / n + 1,
                col: k % n + 1,
            });
        }
        Ok(RealMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, PatternError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(PatternError::NonSquare {
                    row: i + 1,
                    found: r.len(),
                    expected: n,
                });
            }
        }
        RealMatrix::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        RealMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// xᵀM as a vector.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|j| (0..n).map(|i| x[i] * self.get(i, j)).sum()).collect()
    }

    pub fn matmul(&self, other: &RealMatrix) -> RealMatrix {
        let n = self.n;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> RealMatrix {
        RealMatrix {
            n: self.n,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &RealMatrix) -> RealMatrix {
        RealMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn add_diagonal(&self, c: f64) -> RealMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += c;
        }
        out
    }

    /// result(i, j) = M(σ(i), σ(j)), the matrix form of [`permute`].
    pub fn permute(&self, sigma: &Permutation) -> RealMatrix {
        let n = self.n;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(sigma.apply(i), sigma.apply(j)));
            }
        }
        out
    }

    /// Sign pattern with the default numeric dead zone, 1e-12·max|entry|.
    pub fn numeric_pattern(&self) -> SignPattern {
        sign_of(self, 1e-12 * self.max_abs())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for RealMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MatrixDoc {
            n: self.n,
            rows: self.rows(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RealMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(de)?;
        if doc.rows.len() != doc.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but {} rows given",
                doc.n,
                doc.rows.len()
            )));
        }
        RealMatrix::from_rows(&doc.rows).map_err(serde::de::Error::custom)
    }
}

/// How to choose magnitudes when sampling from Q(A).
#[derive(Debug, Clone, Default)]
pub enum Magnitudes<'a> {
    /// Every nonzero gets 1.
    #[default]
    Unit,
    /// Row-major per-entry magnitudes; ignored where A is zero.
    PerEntry(&'a [f64]),
}

pub fn sample_q(a: &SignPattern, mags: Magnitudes<'_>) -> Result<RealMatrix, PatternError> {
    let n = a.n;
    let mut m = RealMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let s = a.get(i, j);
            if s == Sign::Zero {
                continue;
            }
            let mag = match mags {
                Magnitudes::Unit => 1.0,
                Magnitudes::PerEntry(v) => {
                    if v.len() != n * n {
                        return Err(PatternError::BadShape {
                            found: v.len(),
                            expected: n * n,
                        });
                    }
                    v[i * n + j]
                }
            };
            if !(mag > 0.0 && mag.is_finite()) {
                return Err(PatternError::NonpositiveMagnitude { row: i + 1, col: j + 1 });
            }
            m.set(i, j, s.value() * mag);
        }
    }
    Ok(m)
}

/// Sample with magnitudes uniform in [0.5, 1.5].
pub fn sample_q_jitter<R: Rng + ?Sized>(a: &SignPattern, rng: &mut R) -> RealMatrix {
    let n = a.n;
    let mags: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.5..1.5)).collect();
    sample_q(a, Magnitudes::PerEntry(&mags)).expect("jitter magnitudes are positive")
}

pub fn sign_of(m: &RealMatrix, tau: f64) -> SignPattern {
    SignPattern {
        n: m.n,
        entries: m.data.iter().map(|&x| Sign::of(x, tau)).collect(),
    }
}
