//! Randomized realizer sweep: `cargo run --release -p apsign --example stress -- [count] [nmax] [extra]`.
//! Generates patterns satisfying the component hypothesis and reports how many failed to realize.

#[path = "../tests/common/mod.rs"]
mod common;

fn main() {
    let count: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let nmax: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(9);
    let extra: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(0.15);
    let mut fails = 0;
    for seed in 0..count {
        let mut r = common::rng(seed);
        let n = 1 + (seed as usize % nmax);
        let a = common::hypothesis_pattern(&mut r, n, extra);
        assert!(apsign::realizer::hypothesis_holds(&a), "generator broken seed {seed}");
        match apsign::realize(&a) {
            Ok(res) => {
                let s = apsign::pattern::sign_of(&res.matrix, 0.0);
                assert_eq!(s, a);
            }
            Err(e) => {
                fails += 1;
                if fails < 1000 {
                    println!("seed {seed} n {n}: {e}\n{a}");
                }
            }
        }
    }
    println!("failures {fails}/{count}");
}
