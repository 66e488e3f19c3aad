//! End-to-end acceptance suite: nine numbered criteria, each a test that
//! prints one PASS line. Time budgets are asserted where stated.

use std::time::Instant;

use qlab::bipartitions::{bipartition_oracle, bipartition_series, BipartitionParams};
use qlab::congruences::{density_experiment, family_by_id, verify_family};
use qlab::eta::{build_family_quotient, divisors, cusp_order_bound, QuotientFamilySpec, LevelConditions};
use qlab::hecke::{eigen_check, BuiltinForm};
use qlab::newman::{newman1_verify, newman2_verify, NewmanIIParams, NewmanSeriesId};
use qlab::report::Status;
use qlab::series::Ring;

const FORMS: [BuiltinForm; 3] =
    [BuiltinForm::Eta3x21, BuiltinForm::Eta4x20, BuiltinForm::Eta8x16];

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let pairs = [(3u64, 7u64), (3, 5), (3, 2), (7, 2), (11, 2), (13, 2), (4, 3), (8, 3), (4, 5)];
    for (u, v) in pairs {
        let params = BipartitionParams::new(u, v).unwrap();
        let series = bipartition_series(params, Ring::Integers, 30).unwrap();
        for n in 0..=30u64 {
            assert_eq!(
                series.coeff(n as i64).unwrap() as u64,
                bipartition_oracle(params, n).unwrap(),
                "(u,v)=({u},{v}), n={n}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}, budget 10 s");
    println!("criterion 1: PASS - series equals enumeration oracle for 9 pairs, n <= 30, in {elapsed:?}");
}

#[test]
fn criterion_2_known_expansions() {
    let a = BuiltinForm::Eta3x21.expansion(7).unwrap();
    assert_eq!(a.coeffs(), &[0, 1, 0, 0, -1, 0, 0, -1]);
    let b = BuiltinForm::Eta4x20.expansion(9).unwrap();
    assert_eq!(b.coeffs(), &[0, 1, 0, 0, 0, -1, 0, 0, 0, -1]);
    let c = BuiltinForm::Eta8x16.expansion(17).unwrap();
    let mut expected = vec![0i64; 18];
    expected[1] = 1;
    expected[9] = -1;
    expected[17] = -2;
    assert_eq!(c.coeffs(), &expected[..]);
    println!("criterion 2: PASS - the three eta-product expansions match their cited leading coefficients");
}

#[test]
fn criterion_3_support_conditions() {
    for form in FORMS {
        let a = form.expansion(10_000).unwrap();
        let m = form.support_modulus() as i64;
        for n in 0..=10_000i64 {
            if n % m != 1 {
                assert_eq!(a.coeff(n).unwrap(), 0, "{form:?} n={n}");
            }
        }
    }
    println!("criterion 3: PASS - coefficients vanish off n = 1 mod 3/4/8 up to n = 10^4, zero exceptions");
}

#[test]
fn criterion_4_hecke_eigenforms() {
    let start = Instant::now();
    for form in FORMS {
        let a = form.expansion(2_000).unwrap();
        for p in (2u64..50).filter(|&p| qlab::number_theory::is_prime(p)) {
            if form.level() % p == 0 {
                continue;
            }
            let ctx = form.context(p).unwrap();
            let lambda = eigen_check(ctx, &a).unwrap();
            if p % form.support_modulus() != 1 {
                assert_eq!(lambda, 0, "{form:?} p={p}");
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}, budget 30 s");
    println!("criterion 4: PASS - eigenform checks at all p < 50 coprime to the level, bound 2000, in {elapsed:?}");
}

#[test]
fn criterion_5_unconditional_congruence_sweeps() {
    let start = Instant::now();
    let family_ids = [
        "b37.4n1", "b37.4n3", "b37.2adic", "b311.3adic", "b37.inert", "b37.sq", "b35.sq", "b32.sq", "b37.sqshift",
        "b35.sqshift", "b32.sqshift", "b37.step", "b35.step", "b32.step", "b37.cycle", "b35.cycle",
        "b32.cycle", "b43.parity", "b83.parity", "b45.parity", "b43.343",
    ];
    let mut passes = 0u64;
    let mut skips = 0u64;
    for id in family_ids {
        let fam = family_by_id(id).unwrap();
        for report in verify_family(&fam, None).unwrap() {
            match report.status {
                Status::Pass => passes += 1,
                Status::Skip => {
                    assert!(
                        report.skip_reason.as_deref().map_or(false, |r| !r.is_empty()),
                        "{id} [{}] skipped without a logged reason",
                        report.params
                    );
                    skips += 1;
                }
                Status::Fail => panic!(
                    "{id} [{}] FAILED: {:?}",
                    report.params, report.witnesses
                ),
            }
        }
    }
    // The proportional prior result must carry multiplier -1 explicitly.
    let mirror = family_by_id("b37.4n1").unwrap();
    assert!(matches!(
        mirror.instances[0].relation,
        qlab::congruences::Relation::Proportional { multiplier: -1, m2: 1, r2: 0 }
    ));
    println!(
        "criterion 5: PASS - {passes} congruence instances PASS, {skips} SKIP with logged hypotheses, 0 FAIL, in {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_6_newman_identity_suites() {
    let start = Instant::now();
    let grid: &[(NewmanSeriesId, &[u64])] = &[
        (NewmanSeriesId::F1F7, &[7, 13, 19]),
        (NewmanSeriesId::F1F5, &[5, 13, 17]),
        (NewmanSeriesId::F1F2, &[17, 41]),
        (NewmanSeriesId::F1p5F2, &[73, 97]),
        (NewmanSeriesId::F1p9F2, &[73, 97]),
        (NewmanSeriesId::F1p11F2, &[73, 97]),
    ];
    for &(id, primes) in grid {
        for &p in primes {
            let report = newman1_verify(id, p, 250).unwrap();
            assert_eq!(report.status, Status::Pass, "{} p={p}: {:?}", id.label(), report.witnesses);
        }
    }
    for (q, r, s) in [(3u64, 2u32, 1u32), (3, 6, 1), (5, 2, 1)] {
        for p in [5u64, 7, 11, 13] {
            let params = NewmanIIParams::new(q, r, s, p).unwrap();
            let report = newman2_verify(params, 60).unwrap();
            if q == p {
                // p coprime to q is a hypothesis of the underlying identity.
                assert_eq!(report.status, Status::Skip, "{} p={p}", params.label());
                assert!(report.skip_reason.is_some());
            } else {
                assert_eq!(
                    report.status,
                    Status::Pass,
                    "{} p={p}: {:?}",
                    params.label(),
                    report.witnesses
                );
            }
        }
    }
    // The published calibration at p = 7: a(10) = 0 and w(7) = 1.
    let params = NewmanIIParams::new(3, 2, 1, 7).unwrap();
    let a = params.expansion(20).unwrap();
    assert_eq!(a.coeff(10).unwrap(), 0);
    assert_eq!(params.w_constant(&a).unwrap(), 1);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}, budget 2 min");
    println!("criterion 6: PASS - both recurrence suites hold on their full grids (w(7) = 1, a(10) = 0) in {elapsed:?}");
}

#[test]
fn criterion_7_modularity_analyzer() {
    let start = Instant::now();
    let mut checked = 0u64;
    for p in [5u64, 7, 11] {
        for m in [1u64, 5, 7, 25, 35] {
            if m % p == 0 {
                continue;
            }
            for j in [1u32, 2] {
                let spec = QuotientFamilySpec::new(p, m, j).unwrap();
                let eq = build_family_quotient(spec).unwrap();
                let expected_weight = (p as i128 - 1) * ((p as i128).pow(j) + 1) / 2;
                assert_eq!(eq.integral_weight().unwrap() as i128, expected_weight);
                assert_eq!(eq.check_level_conditions(), LevelConditions::Ok);
                for d in divisors(spec.level()) {
                    let order = eq.cusp_order(1, d).unwrap();
                    let (bound, nonneg) = cusp_order_bound(spec, d).unwrap();
                    assert!(order >= num_rational::Ratio::new(0, 1), "p={p} m={m} j={j} d={d}: order {order}");
                    assert!(nonneg, "p={p} m={m} j={j} d={d}: bound {bound}");
                    assert_eq!(nonneg, order >= num_rational::Ratio::new(0, 1));
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 1 min");
    println!("criterion 7: PASS - weight/conditions/cusp orders agree at {checked} divisor cusps in {elapsed:?}");
}

#[test]
fn criterion_8_density_monotone_decrease() {
    for (p, m) in [(5u64, 1u64), (5, 7), (7, 1), (7, 5)] {
        let start = Instant::now();
        let curve = density_experiment(p, m, &[1_000, 10_000, 100_000]).unwrap();
        let r: Vec<f64> = curve.checkpoints.iter().map(|c| c.ratio).collect();
        assert!(r[0] > r[1] && r[1] > r[2], "(p,m)=({p},{m}): ratios {r:?} not strictly decreasing");
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs() < 180, "(p,m)=({p},{m}) took {elapsed:?}, budget 3 min");
        println!(
            "criterion 8: (p,m)=({p},{m}) non-vanishing ratios {:.4} > {:.4} > {:.4} in {elapsed:?}",
            r[0], r[1], r[2]
        );
    }
    println!("criterion 8: PASS - non-vanishing ratio strictly decreases at X = 10^3, 10^4, 10^5 for all four pairs");
}

#[test]
fn criterion_9_conditional_families_and_scale_limits() {
    // Asymptotic claims are NOT reproducible at desk scale and are not
    // asserted: density = 1 is checked only as monotone decrease (criterion
    // 8); no decay-rate constant is fitted; each congruence family is
    // checked on a finite grid only, never for all n. The two seed-gated
    // family groups below may legitimately be all-SKIP when no admissible
    // prime up to 500 meets the seed condition.
    let mut lines = Vec::new();
    for id in ["b37.seed", "b35.seed", "b32.seed", "b72.seed", "b112.seed", "b132.seed"] {
        let fam = family_by_id(id).unwrap();
        let reports = verify_family(&fam, None).unwrap();
        let mut passes = 0u64;
        let mut skips = 0u64;
        for report in &reports {
            match report.status {
                Status::Pass => passes += 1,
                Status::Skip => {
                    assert!(
                        report.skip_reason.as_deref().map_or(false, |r| !r.is_empty()),
                        "{id} [{}] skipped without a logged reason",
                        report.params
                    );
                    skips += 1;
                }
                Status::Fail => {
                    assert!(
                        report.informational,
                        "{id} [{}] FAILED: {:?}",
                        report.params,
                        report.witnesses
                    );
                }
            }
        }
        lines.push(format!("{id}: {passes} PASS / {skips} SKIP of {}", reports.len()));
    }
    println!(
        "criterion 9: PASS - asymptotic density, decay rate, and all-n infinitude are out of desk-scale reach \
         (finite grids only); seed-gated families: {}",
        lines.join("; ")
    );
}
