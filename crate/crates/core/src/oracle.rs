//! Brute-force ground truth at desk scale: the necessary-condition filter,
//! grid search over Q(A), small-order enumeration and a probe table.
//!
//! Nothing here decides whether a pattern allows algebraic positivity; an
//! exhausted search is inconclusive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::pattern::{permute, sample_q, Magnitudes, Permutation, RealMatrix, Sign, SignPattern};
use crate::realizer::{hypothesis_holds, realize_up_to_sign, RealizeError};
use crate::spectral::{verify_algebraic_positivity, Verdict};
use crate::structure::{is_ap_irreducible, is_minimally_ap_irreducible};

pub const DEFAULT_GRID: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("grid must be a nonempty set of positive finite magnitudes")]
    BadGrid,
    #[error("enumeration is limited to orders 1..=3 (got {0})")]
    OrderTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterVerdict {
    /// Neither A nor −A is AP-irreducible, so no matrix in Q(A) is algebraically positive.
    Rejected,
    Candidate,
}

/// A or −A must be AP-irreducible.
pub fn necessary_filter(a: &SignPattern) -> FilterVerdict {
    if is_ap_irreducible(a) || is_ap_irreducible(&a.negate()) {
        FilterVerdict::Candidate
    } else {
        FilterVerdict::Rejected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Found {
    pub matrix: RealMatrix,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub pattern: SignPattern,
    pub found: Option<Found>,
    pub samples_tried: u64,
    pub filter_verdict: FilterVerdict,
}

fn check_grid(grid: &[f64]) -> Result<(), OracleError> {
    if grid.is_empty() || grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(OracleError::BadGrid);
    }
    Ok(())
}

fn certified(m: &RealMatrix) -> Option<Verdict> {
    match verify_algebraic_positivity(m) {
        Ok((v, Some(_))) if v.positive => Some(v),
        _ => None,
    }
}

/// Try magnitude assignments from `grid` (signs fixed by A): every assignment
/// when there are at most `budget` of them, otherwise `budget` seeded samples.
pub fn search_witness(a: &SignPattern, grid: &[f64], budget: u64, seed: u64) -> Result<OracleReport, OracleError> {
    if budget == 0 {
        return Err(OracleError::ZeroBudget);
    }
    check_grid(grid)?;
    let filter_verdict = necessary_filter(a);
    let mut report = OracleReport {
        pattern: a.clone(),
        found: None,
        samples_tried: 0,
        filter_verdict,
    };
    if filter_verdict == FilterVerdict::Rejected {
        return Ok(report);
    }
    let n = a.order();
    let nz: Vec<(usize, usize)> = a.nonzeros().collect();
    let g = grid.len() as u64;
    let total = u32::try_from(nz.len()).ok().and_then(|k| g.checked_pow(k));
    let exhaustive = total.is_some_and(|t| t <= budget);
    let count = if exhaustive { total.unwrap() } else { budget };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mags = vec![1.0; n * n];
    for s in 0..count {
        if exhaustive {
            let mut code = s;
            for &(i, j) in &nz {
                mags[i * n + j] = grid[(code % g) as usize];
                code /= g;
            }
        } else {
            for &(i, j) in &nz {
                mags[i * n + j] = grid[rng.random_range(0..grid.len())];
            }
        }
        report.samples_tried += 1;
        let m = sample_q(a, Magnitudes::PerEntry(&mags)).expect("grid magnitudes are positive");
        if let Some(verdict) = certified(&m) {
            report.found = Some(Found { matrix: m, verdict });
            break;
        }
    }
    Ok(report)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Least encoding over simultaneous permutations and global negation.
pub fn canonical_form(a: &SignPattern) -> SignPattern {
    let mut best: Option<SignPattern> = None;
    for p in permutations(a.order()) {
        let sigma = Permutation::new(p).expect("generated permutation");
        let b = permute(a, &sigma).expect("orders agree");
        for c in [b.negate(), b] {
            if best.as_ref().is_none_or(|x| c.encoding() < x.encoding()) {
                best = Some(c);
            }
        }
    }
    best.unwrap_or_else(|| a.clone())
}

/// Pattern with the given index in encoding order (row-major, first entry most significant).
fn pattern_from_index(n: usize, mut idx: u64) -> SignPattern {
    let mut entries = vec![Sign::Zero; n * n];
    for e in entries.iter_mut().rev() {
        *e = Sign::from_digit((idx % 3) as u8);
        idx /= 3;
    }
    SignPattern::new(n, entries).expect("square entry list")
}

/// All 3^(n²) patterns of order n in encoding order, or one representative
/// (the least encoding) per orbit when `canonical`.
pub fn enumerate_patterns(n: usize, canonical: bool) -> Result<Vec<SignPattern>, OracleError> {
    if !(1..=3).contains(&n) {
        return Err(OracleError::OrderTooLarge(n));
    }
    let total = 3u64.pow((n * n) as u32);
    Ok((0..total)
        .into_par_iter()
        .map(|i| pattern_from_index(n, i))
        .filter(|a| !canonical || canonical_form(a) == *a)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizeOutcome {
    /// Neither A nor −A meets the component hypothesis.
    NotApplicable,
    /// Realized (for −A when `negated`) and re-verified.
    Realized {
        negated: bool,
        verified: bool,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub pattern: SignPattern,
    pub filter: FilterVerdict,
    pub hypothesis: bool,
    pub hypothesis_negated: bool,
    pub realize: RealizeOutcome,
    pub oracle_found: bool,
    pub samples_tried: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub patterns: usize,
    pub candidates: usize,
    pub hypothesis: usize,
    pub realized: usize,
    pub oracle_found: usize,
    /// Candidates for which the grid search found nothing (inconclusive, not disproof).
    pub unresolved_candidates: usize,
    /// Realized but not certified by the oracle's verifier, or certified but filtered out.
    pub inconsistencies: usize,
    pub minimal_zero_diagonal: usize,
    /// Minimal zero-diagonal patterns exceeding 2n − 2 nonzeros.
    pub bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    pub n: usize,
    pub grid: Vec<f64>,
    pub budget: u64,
    pub seed: u64,
    pub canonical: bool,
    pub rows: Vec<ProbeRow>,
    pub summary: ProbeSummary,
}

fn probe_row(a: &SignPattern, grid: &[f64], budget: u64, seed: u64) -> Result<ProbeRow, OracleError> {
    let report = search_witness(a, grid, budget, seed)?;
    let hypothesis = hypothesis_holds(a);
    let hypothesis_negated = hypothesis_holds(&a.negate());
    let realize = if hypothesis || hypothesis_negated {
        match realize_up_to_sign(a) {
            Ok((r, negated)) => Realized {
                negated,
                verified: certified(&r.matrix).is_some(),
            },
            Err(RealizeError::HypothesisFails(_)) => RealizeOutcome::NotApplicable,
            Err(e) => RealizeOutcome::Failed(e.to_string()),
        }
    } else {
        RealizeOutcome::NotApplicable
    };
    use RealizeOutcome::Realized;
    Ok(ProbeRow {
        pattern: a.clone(),
        filter: report.filter_verdict,
        hypothesis,
        hypothesis_negated,
        realize,
        oracle_found: report.found.is_some(),
        samples_tried: report.samples_tried,
    })
}

/// Filter, hypothesis, realizer and grid search for every (canonical) pattern of order n.
/// Rows come back in encoding order regardless of scheduling.
pub fn conjecture_probe(
    n: usize,
    grid: &[f64],
    budget: u64,
    seed: u64,
    canonical: bool,
) -> Result<ProbeTable, OracleError> {
    if budget == 0 {
        return Err(OracleError::ZeroBudget);
    }
    check_grid(grid)?;
    let patterns = enumerate_patterns(n, canonical)?;
    let rows: Vec<ProbeRow> = patterns
        .par_iter()
        .map(|a| probe_row(a, grid, budget, seed))
        .collect::<Result<_, _>>()?;
    let mut s = ProbeSummary {
        patterns: rows.len(),
        ..Default::default()
    };
    for r in &rows {
        let candidate = r.filter == FilterVerdict::Candidate;
        s.candidates += candidate as usize;
        s.hypothesis += r.hypothesis as usize;
        s.oracle_found += r.oracle_found as usize;
        s.unresolved_candidates += (candidate && !r.oracle_found) as usize;
        if let RealizeOutcome::Realized { verified, .. } = r.realize {
            s.realized += 1;
            s.inconsistencies += (!verified || !candidate) as usize;
        }
        s.inconsistencies += (r.oracle_found && !candidate) as usize;
        let a = &r.pattern;
        let zero_diag = (0..n).all(|i| a.get(i, i) == Sign::Zero);
        if zero_diag && (is_minimally_ap_irreducible(a) || is_minimally_ap_irreducible(&a.negate())) {
            s.minimal_zero_diagonal += 1;
            s.bound_violations += (a.nnz() > 2 * n - 2) as usize;
        }
    }
    Ok(ProbeTable {
        n,
        grid: grid.to_vec(),
        budget,
        seed,
        canonical,
        rows,
        summary: s,
    })
}

impl ProbeTable {
    /// Tab-separated rows; patterns written as row strings joined by `/`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("pattern\tfilter\thypothesis\thypothesis_negated\trealize\toracle\tsamples\n");
        for r in &self.rows {
            let pat: Vec<String> = (0..self.n)
                .map(|i| (0..self.n).map(|j| r.pattern.get(i, j).as_char()).collect())
                .collect();
            let realize = match &r.realize {
                RealizeOutcome::NotApplicable => "n/a".to_string(),
                RealizeOutcome::Realized { negated, verified } => {
                    format!(
                        "{}{}",
                        if *negated { "ok(-A)" } else { "ok" },
                        if *verified { "" } else { ",unverified" }
                    )
                }
                RealizeOutcome::Failed(e) => format!("failed: {e}"),
            };
            let filter = match r.filter {
                FilterVerdict::Rejected => "rejected",
                FilterVerdict::Candidate => "candidate",
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                pat.join("/"),
                filter,
                yn(r.hypothesis),
                yn(r.hypothesis_negated),
                realize,
                if r.oracle_found { "found" } else { "exhausted" },
                r.samples_tried
            ));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "# patterns={} candidates={} hypothesis={} realized={} oracle_found={} unresolved_candidates={} \
             inconsistencies={} minimal_zero_diagonal={} bound_violations={}\n",
            s.patterns,
            s.candidates,
            s.hypothesis,
            s.realized,
            s.oracle_found,
            s.unresolved_candidates,
            s.inconsistencies,
            s.minimal_zero_diagonal,
            s.bound_violations
        ));
        out
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
