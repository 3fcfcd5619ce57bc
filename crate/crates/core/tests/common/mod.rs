//! Random generators shared by the integration tests.
#![allow(dead_code)]

use apsign::constructions::EigenTriple;
use apsign::pattern::{RealMatrix, Sign, SignPattern};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod golden;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> SignPattern {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    apsign::parse_pattern(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A random partition of `0..n` into nonempty parts.
fn partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(rng);
    let m = rng.random_range(1..=n);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain([n]) {
        parts.push(verts[start..c].to_vec());
        start = c;
    }
    parts
}

/// A pattern meeting the component hypothesis by construction: positive
/// cycles (or loops) inside random parts, negative arcs between parts along a
/// strongly connected quotient, then extra entries at density `extra`.
pub fn hypothesis_pattern(rng: &mut ChaCha8Rng, n: usize, extra: f64) -> SignPattern {
    let parts = partition(rng, n);
    let mut a = SignPattern::zeros(n);
    let mut part_of = vec![0; n];
    for (c, p) in parts.iter().enumerate() {
        for &v in p {
            part_of[v] = c;
        }
        if p.len() == 1 {
            a.set(p[0], p[0], Sign::Plus);
        } else {
            for i in 0..p.len() {
                a.set(p[i], p[(i + 1) % p.len()], Sign::Plus);
            }
        }
    }
    let m = parts.len();
    if m > 1 {
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let mut qarcs: Vec<(usize, usize)> = (0..m).map(|i| (order[i], order[(i + 1) % m])).collect();
        for _ in 0..rng.random_range(0..m) {
            let (x, y) = (rng.random_range(0..m), rng.random_range(0..m));
            if x != y {
                qarcs.push((x, y));
            }
        }
        for (x, y) in qarcs {
            let i = *parts[x].choose(rng).unwrap();
            let j = *parts[y].choose(rng).unwrap();
            a.set(i, j, Sign::Minus);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) == Sign::Zero && rng.random_bool(extra) {
                let same = part_of[i] == part_of[j];
                let s = if same && rng.random_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                a.set(i, j, s);
            }
        }
    }
    a
}

/// Uniform random pattern with the given density of nonzeros.
pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SignPattern {
    let mut a = SignPattern::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(density) {
                a.set(i, j, if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus });
            }
        }
    }
    a
}

pub fn random_positive_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}

/// D·(S − cI)·D⁻¹ for a symmetric S with positive entries: u = D·p and
/// v = D⁻¹·p for the Perron vector p, eigenvalue ρ(S) − c.
pub fn symmetric_triple(rng: &mut ChaCha8Rng, n: usize) -> EigenTriple {
    let mut s = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(0.1..1.0);
            s[(i, j)] = x;
            s[(j, i)] = x;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(s.clone());
    let top = eig.eigenvalues.imax();
    let rho = eig.eigenvalues[top];
    let mut p: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if p[0] < 0.0 {
        p.iter_mut().for_each(|x| *x = -*x);
    }
    let c = rng.random_range(0.0..0.9) * rho;
    let d = random_positive_vector(rng, n);
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let sij = if i == j { s[(i, j)] - c } else { s[(i, j)] };
            m[i * n + j] = d[i] * sij / d[j];
        }
    }
    EigenTriple {
        matrix: RealMatrix::new(n, m).unwrap(),
        lambda: rho - c,
        u: (0..n).map(|i| d[i] * p[i]).collect(),
        v: (0..n).map(|i| p[i] / d[i]).collect(),
    }
}

/// λ·u·vᵀ + P·R·P with P = I − u·vᵀ (vᵀu = 1) and R uniform in (−λ, λ):
/// entries of both signs, eigenvectors prescribed.
pub fn mixed_triple(rng: &mut ChaCha8Rng, n: usize) -> EigenTriple {
    let lambda = rng.random_range(0.5..2.0);
    let u = random_positive_vector(rng, n);
    let v0 = random_positive_vector(rng, n);
    let vu: f64 = v0.iter().zip(&u).map(|(a, b)| a * b).sum();
    let v: Vec<f64> = v0.iter().map(|x| x / vu).collect();
    let uv = nalgebra::DMatrix::from_fn(n, n, |i, j| u[i] * v[j]);
    let p = nalgebra::DMatrix::<f64>::identity(n, n) - &uv;
    let r = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.random_range(-lambda..lambda));
    let m = &uv * lambda + &p * r * &p;
    EigenTriple {
        matrix: RealMatrix::new(n, (0..n * n).map(|k| m[(k / n, k % n)]).collect()).unwrap(),
        lambda,
        u,
        v,
    }
}

/// A triple that passes `check`, drawn from either generator.
pub fn random_triple(rng: &mut ChaCha8Rng, n: usize) -> EigenTriple {
    loop {
        let t = if rng.random_bool(0.5) {
            symmetric_triple(rng, n)
        } else {
            mixed_triple(rng, n)
        };
        if t.check().is_ok() {
            return t;
        }
    }
}
