mod common;

use apsign::pattern::{sign_of, Sign, SignPattern};
use apsign::realize;
use common::golden;

fn from_chars(rows: &[Vec<char>]) -> SignPattern {
    let mut p = SignPattern::zeros(rows.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            p.set(
                i,
                j,
                match c {
                    '+' => Sign::Plus,
                    '-' => Sign::Minus,
                    _ => Sign::Zero,
                },
            );
        }
    }
    p
}

#[test]
fn every_displayed_stage_matches() {
    let x = common::fixture("example_x.sp");
    let r = realize(&x).unwrap();
    let names: Vec<&str> = golden::STAGES.iter().map(|s| s.0).collect();
    assert_eq!(r.trace.stages(), names);
    for (name, block) in golden::STAGES {
        let (labels, rows) = golden::parse(block);
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let step = r.trace.stage(name).unwrap();
        let got = step
            .pattern_in_order(&labels)
            .unwrap_or_else(|| panic!("{name}: labels {:?}", step.labels));
        assert_eq!(got, from_chars(&rows), "{name}");
        assert!(step.residual.unwrap() < 1e-10, "{name}");
    }
}

#[test]
fn split_then_final_stage_is_y() {
    let x = common::fixture("example_x.sp");
    let y = common::fixture("example_y.sp");
    let r = realize(&x).unwrap();
    let split = &r.trace.steps[0];
    assert_eq!(split.pattern, y);
    let order: Vec<&str> = split.labels.iter().map(String::as_str).collect();
    assert_eq!(r.trace.stage("B[2,1]").unwrap().pattern_in_order(&order).unwrap(), y);
}

#[test]
fn x_is_certified() {
    let x = common::fixture("example_x.sp");
    let r = realize(&x).unwrap();
    assert_eq!(sign_of(&r.matrix, 0.0), x);
    let m = &r.matrix;
    let mu = m.mul_vec(&r.u);
    let res: f64 = mu
        .iter()
        .zip(&r.u)
        .map(|(a, b)| (a - r.lambda * b).abs())
        .fold(0.0, f64::max);
    assert!(res < 1e-8 * m.inf_norm());
    assert!(r.u.iter().chain(&r.v).all(|&c| c > 0.0));
    assert!(r.witness.evaluate(m).min_entry() > 0.0);
    assert_eq!(r.witness.degree(), 10);
}
