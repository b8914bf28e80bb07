mod support;

use num_bigint::BigUint;
use rand::Rng;
use support::*;
use trislice::bounds::*;
use trislice::{max_family_with, GroundSize, IntersectionProfile, Mode, Prime, SearchOptions};

#[test]
fn binomials_match_pascal() {
    let mut row: Vec<u128> = vec![1];
    for n in 0..=64u64 {
        for (i, &v) in row.iter().enumerate() {
            assert_eq!(binomial(n, i as u64), BigUint::from(v), "C({n},{i})");
        }
        assert_eq!(binomial(n, n + 1), BigUint::from(0u8));
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    assert_eq!(binomial(100, 50).to_string(), "100891344545564193334812497256");
}

#[test]
fn reverse_odd_town_is_n_minus_one() {
    let two = Prime::new(2).unwrap();
    for n in (2..=64).step_by(2) {
        assert_eq!(sharper_bound(n, two, 1).unwrap(), BigUint::from(n - 1));
    }
}

#[test]
fn monotone_in_n_and_s() {
    for n in 1..40u64 {
        for s in 0..n {
            let a = snevily_bound(n, s).unwrap();
            assert!(a <= snevily_bound(n + 1, s).unwrap());
            if s + 1 < n {
                assert!(a <= snevily_bound(n, s + 1).unwrap());
            }
            // Snevily never exceeds Frankl–Wilson
            assert!(a <= frankl_wilson_bound(n, s).unwrap());
            assert!(frankl_wilson_bound(n, s).unwrap() <= frankl_wilson_bound(n + 1, s).unwrap());
        }
    }
    for p in [2u32, 3, 5] {
        let q = Prime::new(p).unwrap();
        for n in 3..40u64 {
            for s in 1..3 {
                // the sharper bound improves on Snevily's
                if let (Ok(a), Ok(b)) = (sharper_bound(n, q, s), snevily_bound(n, s)) {
                    assert!(a <= b, "n={n} p={p} s={s}");
                }
            }
        }
    }
}

#[test]
fn undefined_tops_are_errors() {
    let two = Prime::new(2).unwrap();
    assert!(generalized_rot_bound(2, two, 3, 1).is_err());
    assert!(generalized_rot_bound(8, two, 2, 1).is_err());
    assert!(snevily_bound(3, 3).is_err());
    assert_eq!(generalized_rot_bound(8, two, 3, 1).unwrap(), BigUint::from(4u8));
    assert_eq!(generalized_rot_bound(12, two, 3, 1).unwrap(), BigUint::from(6u8));
}

#[test]
fn report_checks_modulus() {
    let p: IntersectionProfile = "mod:2:0|1".parse().unwrap();
    assert!(bound_report(4, Some(Prime::new(3).unwrap()), &p).is_err());
    let r = bound_report(4, Some(Prime::new(2).unwrap()), &p).unwrap();
    assert_eq!(r.tightest_usize(), Some(3));
    assert_eq!(r.tightest_name(), Some(SHARPER));
    assert!(r.entries.iter().any(|e| e.name == SNEVILY_CONJECTURE && e.status == BoundStatus::Conjectured));
}

/// Exhaustive maxima never exceed a theorem bound.
#[test]
fn bounds_are_sound_on_small_instances() {
    let mut r = rng(41);
    let mut checked = 0;
    for _ in 0..400 {
        let n = r.gen_range(2..=6);
        let profile = if r.gen_bool(0.3) {
            let l: std::collections::BTreeSet<u64> = (0..n as u64).filter(|_| r.gen_bool(0.4)).collect();
            if l.is_empty() {
                continue;
            }
            IntersectionProfile::new(Mode::Exact, vec![(0..=n as u64).collect(), l]).unwrap()
        } else {
            let p = [2u32, 3][r.gen_range(0..2)];
            let k = r.gen_range(2..=3);
            let levels = (0..k)
                .map(|_| {
                    let s: std::collections::BTreeSet<u64> = (0..u64::from(p)).filter(|_| r.gen_bool(0.5)).collect();
                    if s.is_empty() { [0].into() } else { s }
                })
                .collect();
            modular_profile(p, levels)
        };
        let report = bound_report(n as u64, None, &profile).unwrap();
        let Some(t) = report.tightest_usize() else { continue };
        // without the stop-at-bound shortcut, which would mask an unsound bound
        let opts = SearchOptions { ignore_bounds: true, ..Default::default() };
        let out = max_family_with(GroundSize::new(n).unwrap(), &profile, &opts).unwrap();
        assert!(out.exhausted);
        if !out.infeasible {
            assert!(out.max_size <= t, "n={n} {profile}: {} > {t}", out.max_size);
            checked += 1;
        }
    }
    assert!(checked > 100);
}
