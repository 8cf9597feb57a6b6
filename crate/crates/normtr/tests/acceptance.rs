//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; a failing criterion fails its test.

use std::time::Instant;

use normtr::geometry::{NormGeometry, NormKind};
use normtr::harness::{momentum_error_check, muon_vs_osgdm};
use normtr::point::{axpby, euclid_norm, ParamPoint};
use normtr::problems::{
    estimate_l, finite_diff_grad, make_matrix_layer, LossKind, Problem,
};
use normtr::trstep::Regularizer;
use normtr::verify::{
    case_records, geometry_checks, momentum_noise_free_case, run_case, run_suite, t1_layer_case,
    t1_quadratic_case, t2_case, t4_case, t5_case, t6_case, t7_case, t9d_case, trstep_checks,
    CheckLine, Suite,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(number: u8, title: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("{tag} criterion {number:02} ({title}): {detail}");
    assert!(passed, "criterion {number:02} ({title}) failed: {detail}");
}

fn all_pass(lines: &[CheckLine]) -> bool {
    lines.iter().all(|l| l.passed)
}

fn failing(lines: &[CheckLine]) -> String {
    let names: Vec<_> = lines.iter().filter(|l| !l.passed).map(|l| l.name).collect();
    if names.is_empty() {
        "none failing".into()
    } else {
        names.join(", ")
    }
}

#[test]
fn criterion_01_geometry_identities() {
    let start = Instant::now();
    let lines = geometry_checks().expect("geometry suite runs");
    let elapsed = start.elapsed();
    let passed = all_pass(&lines) && elapsed.as_secs_f64() < 10.0;
    report(
        1,
        "geometry identities",
        passed,
        &format!("{}/{} checks in {elapsed:.2?} (failing: {})", lines.iter().filter(|l| l.passed).count(), lines.len(), failing(&lines)),
    );
}

#[test]
fn criterion_02_step_equivalences() {
    let lines = trstep_checks().expect("step suite runs");
    let wanted = [
        "step_matches_orth_formula",
        "step_matches_normalized_formula",
        "step_matches_sign_formula",
        "subproblem_box_enumeration",
        "subproblem_sampled_sphere_search",
        "subproblem_spectral_grid_search",
    ];
    let relevant: Vec<_> =
        lines.iter().filter(|l| wanted.contains(&l.name)).cloned().collect();
    let passed = relevant.len() == wanted.len() && all_pass(&relevant);
    report(
        2,
        "step equivalences and brute-force search",
        passed,
        &format!("{}/{} equivalences (failing: {})", relevant.iter().filter(|l| l.passed).count(), wanted.len(), failing(&relevant)),
    );
}

#[test]
fn criterion_03_deterministic_residual_bound() {
    let start = Instant::now();
    let quad = run_case(&t1_quadratic_case().unwrap()).unwrap().1;
    let layer = run_case(&t1_layer_case().unwrap()).unwrap().1;
    let elapsed = start.elapsed();
    let passed = quad.holds && layer.holds && elapsed.as_secs_f64() < 5.0;
    report(
        3,
        "deterministic residual bound",
        passed,
        &format!(
            "quadratic lhs {:.3e} <= rhs {:.3e}; matrix layer lhs {:.3e} <= rhs {:.3e}; {elapsed:.2?}",
            quad.lhs, quad.rhs, layer.lhs, layer.rhs
        ),
    );
}

#[test]
fn criterion_04_noisy_residual_bound() {
    let start = Instant::now();
    let (records, rep) = run_case(&t2_case().unwrap()).unwrap();
    let elapsed = start.elapsed();
    let passed = rep.holds && records.len() == 20 && elapsed.as_secs_f64() < 60.0;
    report(
        4,
        "noisy residual bound at the seed-mean",
        passed,
        &format!("lhs {:.3e} <= rhs {:.3e} over {} seeds in {elapsed:.2?}", rep.lhs, rep.rhs, records.len()),
    );
}

#[test]
fn criterion_05_momentum_error_envelopes() {
    let case = t2_case().unwrap();
    let records = case_records(&case).unwrap();
    let noisy = momentum_error_check(&records, &case.constants).unwrap();

    let case = momentum_noise_free_case().unwrap();
    let records = case_records(&case).unwrap();
    let clean = momentum_error_check(&records, &case.constants).unwrap();
    let flat_envelope =
        case.constants.l * case.config.eta / case.config.alpha;

    let passed = noisy.holds && clean.holds && (clean.rhs - flat_envelope).abs() <= 1e-12;
    report(
        5,
        "momentum-error envelopes",
        passed,
        &format!(
            "noisy worst margin {:.3e}; noise-free worst margin {:.3e} against flat envelope {:.3e}",
            noisy.margin, clean.margin, flat_envelope
        ),
    );
}

#[test]
fn criterion_06_decay_boundedness() {
    let case = t4_case().unwrap();
    let (records, rep) = run_case(&case).unwrap();
    let r = &records[0];
    let eta = case.config.eta;
    let shift = r.summary.max_shift_bound.unwrap_or(f64::INFINITY);
    let shift_ok = shift <= eta * (1.0 + 1e-9);
    let step_ok = r.summary.max_step_norm <= 2.0 * eta * (1.0 + 1e-9);
    let passed = rep.holds && shift_ok && step_ok;
    report(
        6,
        "decay bound and iterate boundedness",
        passed,
        &format!(
            "final gap {:.3e} <= rhs {:.3e}; max beta*|x| {:.3e} vs eta {:.3e}; max step {:.3e} vs 2*eta {:.3e}",
            rep.lhs, rep.rhs, shift, eta, r.summary.max_step_norm, 2.0 * eta
        ),
    );
}

#[test]
fn criterion_07_stochastic_final_gap_and_extrapolation_bounds() {
    let t5 = run_case(&t5_case().unwrap()).unwrap().1;
    let t6 = run_case(&t6_case().unwrap()).unwrap().1;
    let t7 = run_case(&t7_case().unwrap()).unwrap().1;
    let passed = t5.holds && t6.holds && t7.holds;
    report(
        7,
        "stochastic decay and extrapolation bounds",
        passed,
        &format!(
            "decay lhs {:.3e} <= {:.3e}; extrapolation residual lhs {:.3e} <= {:.3e}; extrapolation decay lhs {:.3e} <= {:.3e}",
            t5.lhs, t5.rhs, t6.lhs, t6.rhs, t7.lhs, t7.rhs
        ),
    );
}

#[test]
fn criterion_08_clipped_bound_and_residual_oracle() {
    let (records, rep) = run_case(&t9d_case().unwrap()).unwrap();
    let radius = match records[0].config.regularizer {
        Regularizer::ClipBall { radius, .. } => radius,
        Regularizer::None => unreachable!("clipped case carries a clip ball"),
    };
    let feasible = records
        .iter()
        .flat_map(|r| r.rows.iter())
        .all(|row| row.x_norm <= radius + 1e-12);

    let lines = trstep_checks().unwrap();
    let residual_line = lines
        .iter()
        .find(|l| l.name == "residual_matches_grid_search")
        .expect("residual cross-check present");

    let passed = rep.holds && feasible && residual_line.passed;
    report(
        8,
        "clipped bound and residual brute force",
        passed,
        &format!(
            "lhs {:.3e} <= rhs {:.3e} over {} seeds; iterates feasible: {feasible}; {}",
            rep.lhs, rep.rhs, records.len(), residual_line.detail
        ),
    );
}

#[test]
fn criterion_09_constant_estimators() {
    let spectral_ok = |p: &Problem, seed: u64| -> (bool, bool) {
        let geo = NormGeometry::new(NormKind::Spectral, p.shape()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let est = estimate_l(p, &geo, 1000, &mut rng).unwrap();
        let analytic = p.grad_smoothness(NormKind::Spectral).unwrap();
        let sound = est <= analytic * (1.0 + 1e-9) && est > 0.0;

        let x = ParamPoint::zeros(p.shape());
        let g = p.grad(&x).unwrap();
        let fd = finite_diff_grad(p, &x, 1e-5).unwrap();
        let gap = euclid_norm(&axpby(1.0, &g, -1.0, &fd).unwrap());
        let grad_ok = gap <= 1e-5 * (1.0 + euclid_norm(&g));
        (sound, grad_ok)
    };
    let mut all_sound = true;
    let mut all_grad = true;
    for i in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + i);
        let loss = if i % 2 == 0 { LossKind::Quadratic } else { LossKind::Logistic };
        let p = make_matrix_layer(3, 4, 12, loss, &mut rng).unwrap();
        let (sound, grad_ok) = spectral_ok(&p, 900 + i);
        all_sound &= sound;
        all_grad &= grad_ok;
    }
    report(
        9,
        "constant estimators",
        all_sound && all_grad,
        &format!(
            "10 instances x 1000 sampled pairs stayed under the analytic constant: {all_sound}; finite-difference gradients at 1e-5 relative: {all_grad}"
        ),
    );
}

#[test]
fn criterion_10_side_by_side_comparison() {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let problem = make_matrix_layer(3, 3, 10, LossKind::Quadratic, &mut rng).unwrap();
    let etas = [0.05, 0.1];
    let seeds = [0, 1, 2];
    let a = muon_vs_osgdm(&problem, 0.5, 0.3, 40, &etas, &seeds).unwrap();
    let b = muon_vs_osgdm(&problem, 0.5, 0.3, 40, &etas, &seeds).unwrap();
    let passed = a == b && a.rows.len() == etas.len() * seeds.len() && a.means.len() == etas.len();
    let m = &a.means[0];
    report(
        10,
        "side-by-side reference comparison",
        passed,
        &format!(
            "{} rows, {} means, deterministic repeat: {}; eta {:.2}: final residual {:.3e} (orth of momentum) vs {:.3e} (momentum of orth)",
            a.rows.len(),
            a.means.len(),
            a == b,
            m.eta,
            m.orth_momentum_final_residual,
            m.momentum_orth_final_residual
        ),
    );
}

#[test]
fn criterion_11_full_verification_reproducible() {
    let start = Instant::now();
    let first = run_suite(Suite::All).unwrap();
    let second = run_suite(Suite::All).unwrap();
    let elapsed = start.elapsed();
    let identical = first.render() == second.render();
    let passed = first.all_passed() && identical && elapsed.as_secs_f64() < 300.0;
    report(
        11,
        "full verification suite reproducibility",
        passed,
        &format!(
            "{}/{} checks passed, two renders byte-identical: {identical}, both runs in {elapsed:.2?}",
            first.passed_count(),
            first.lines.len()
        ),
    );
}
