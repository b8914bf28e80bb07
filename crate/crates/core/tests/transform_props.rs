mod support;

use rand::Rng;
use support::*;
use trislice::transforms::{trace_with, TraceOptions};
use trislice::{complement_replace, shrink_small, trace, Error};

#[test]
fn complement_preserves_validity() {
    let mut r = rng(31);
    for _ in 0..300 {
        let (fam, profile, idx) = complement_instance(&mut r);
        let out = complement_replace(&fam, idx, &profile).unwrap();
        let sets = from_family(&out);
        assert!(naive_valid(&sets, &profile), "{fam} -> {out} under {profile}");
        assert_eq!(out.members()[idx], fam.members()[idx].complement());
        assert_eq!(complement_replace(&out, idx, &profile).unwrap(), fam);
    }
}

#[test]
fn shrink_leaves_only_small_sets() {
    let mut r = rng(32);
    let mut done = 0;
    while done < 200 {
        let (fam, profile, _) = complement_instance(&mut r);
        match shrink_small(&fam, &profile) {
            Ok(out) => {
                let n = fam.ground().get();
                assert!(out.members().iter().all(|m| 2 * m.len() <= n));
                assert!(naive_valid(&from_family(&out), &profile));
                done += 1;
            }
            // a member and a complement already present collide
            Err(Error::Duplicate { .. }) => {}
            Err(e) => panic!("{fam} under {profile}: {e}"),
        }
    }
}

#[test]
fn trace_gives_valid_smaller_family() {
    let mut r = rng(33);
    for _ in 0..300 {
        let (fam, profile, gamma) = trace_instance(&mut r);
        let out = trace(&fam, gamma, &profile).unwrap();
        assert_eq!(out.family.len(), fam.len() - 1);
        assert_eq!(out.profile.k(), profile.k() - 1);
        assert_eq!(out.family.ground().get(), fam.members()[gamma].len());
        assert!(naive_valid(&from_family(&out.family), &out.profile), "{fam} γ={gamma} {profile}");

        // relabelled sets really are the traces
        let pivot = from_family(&fam)[gamma].clone();
        let positions: Vec<usize> = pivot.iter().copied().collect();
        assert_eq!(out.relabel, positions);
        let traced: Vec<Set> = from_family(&fam)
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != gamma)
            .map(|(_, s)| s.intersection(&pivot).map(|e| positions.iter().position(|x| x == e).unwrap() + 1).collect())
            .collect();
        assert_eq!(from_family(&out.family), traced);

        let unchecked = trace_with(&fam, gamma, &profile, TraceOptions { reverify: false }).unwrap();
        assert_eq!(unchecked, out);
    }
}

#[test]
fn trace_rejects_profiles_without_disjoint_levels() {
    let mut r = rng(34);
    let mut seen = 0;
    while seen < 50 {
        let p = 2;
        let levels = (0..3)
            .map(|_| {
                let s: std::collections::BTreeSet<u64> = (0..2).filter(|_| r.gen_bool(0.7)).collect();
                if s.is_empty() { [0].into() } else { s }
            })
            .collect();
        let profile = modular_profile(p, levels);
        if profile.disjoint_consecutive_level().is_some() {
            continue;
        }
        let Some(f) = random_family(&mut r, 6, &profile, 5) else { continue };
        let fam = to_family(6, &f);
        assert!(matches!(trace(&fam, 0, &profile), Err(Error::Precondition(_))));
        seen += 1;
    }
}
