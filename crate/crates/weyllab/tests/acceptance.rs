//! The ten acceptance criteria at their stated tolerances, one test each.

use weyllab::suite::{run_criterion, title, Suite};

fn criterion(id: u8) {
    let result = run_criterion(id);
    eprintln!("{}", result.line());
    assert!(result.pass(), "{}", result.line());
}

#[test]
fn criterion_01_weyl_law() {
    criterion(1);
}

#[test]
fn criterion_02_torus_log_constant() {
    criterion(2);
}

#[test]
fn criterion_03_dirichlet_log_constant() {
    criterion(3);
}

#[test]
fn criterion_04_rescaled_limit_kernel() {
    criterion(4);
}

#[test]
fn criterion_05_green_splitting() {
    criterion(5);
}

#[test]
fn criterion_06_oscillatory_decay() {
    criterion(6);
}

#[test]
fn criterion_07_admissibility() {
    criterion(7);
}

#[test]
fn criterion_08_polarization() {
    criterion(8);
}

#[test]
fn criterion_09_disintegration() {
    criterion(9);
}

#[test]
fn criterion_10_projector_identity() {
    criterion(10);
}

#[test]
fn full_suite_covers_every_criterion() {
    assert_eq!(Suite::Full.criteria(), &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
    assert!(Suite::Full.criteria().iter().all(|&id| title(id) != "unknown"));
}
