use std::path::PathBuf;

use choreo_core::{classify, Category, Scenario, Tolerances};

fn load(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"));
    Scenario::load(path).unwrap()
}

fn blocks(name: &str) -> (Category, Vec<Vec<usize>>) {
    let s = load(name);
    let c = classify(&s.spec, &s.initial, &Tolerances::printed()).unwrap();
    let report = c.trace_report.expect("equivariant motion has a trace report");
    (c.category, report.block_sets())
}

#[test]
fn four_body_limacon() {
    let (cat, b) = blocks("four_body_limacon");
    assert_eq!(cat, Category::EquivariantChoreography);
    assert_eq!(b, vec![vec![1, 2, 3, 4]]);
}

#[test]
fn four_body_two_dimers() {
    let (cat, b) = blocks("four_body_2_2");
    assert_eq!(cat, Category::EquivariantFragmented);
    assert_eq!(b, vec![vec![1, 3], vec![2, 4]]);
}

#[test]
fn five_body_two_dimers_and_singleton() {
    let (cat, b) = blocks("five_body_2_2_1");
    assert_eq!(cat, Category::EquivariantFragmented);
    assert_eq!(b, vec![vec![1, 2], vec![3, 5], vec![4]]);
}

#[test]
fn five_body_limacon() {
    let (cat, b) = blocks("five_body_limacon");
    assert_eq!(cat, Category::EquivariantChoreography);
    assert_eq!(b, vec![vec![1, 2, 3, 4, 5]]);
}

#[test]
fn six_body_three_dimers() {
    let (cat, b) = blocks("six_body_2_2_2");
    assert_eq!(cat, Category::EquivariantFragmented);
    assert_eq!(b, vec![vec![1, 4], vec![2, 5], vec![3, 6]]);
}

#[test]
fn six_body_rescaled_choreography() {
    let s = load("six_body_choreography_rescaled");
    let c = classify(&s.spec, &s.initial, &Tolerances::printed()).unwrap();
    assert_eq!(c.category, Category::EquivariantChoreography);
    let period = c.period.unwrap();
    assert!((period - 2.0 * std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-9);
    let report = c.trace_report.unwrap();
    assert_eq!(report.blocks.len(), 1);
    assert!(report.global_shift_consistent);
}

#[test]
fn six_body_published_data_pairs_into_dimers() {
    let (cat, b) = blocks("six_body_choreography");
    assert_eq!(cat, Category::EquivariantFragmented);
    assert_eq!(b.len(), 3);
}
