//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's own checkers: sets
//! are `BTreeSet<usize>` and every intersection is recomputed from scratch.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use trislice::profile::LiuConfiguration;
use trislice::{GroundSize, IntersectionProfile, Mode, SetFamily, Subset};

pub type Set = BTreeSet<usize>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn all_subsets(n: usize) -> Vec<Set> {
    (0u32..1 << n)
        .map(|m| (1..=n).filter(|&e| m >> (e - 1) & 1 == 1).collect())
        .collect()
}

pub fn to_family(n: usize, sets: &[Set]) -> SetFamily {
    let lists: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    SetFamily::from_lists(n, &lists).unwrap()
}

pub fn from_family(f: &SetFamily) -> Vec<Set> {
    f.to_lists().into_iter().map(|l| l.into_iter().collect()).collect()
}

fn reduce(profile: &IntersectionProfile, v: usize) -> u64 {
    match profile.mode() {
        Mode::Modular(p) => v as u64 % u64::from(p.get()),
        Mode::Exact => v as u64,
    }
}

fn level_ok(profile: &IntersectionProfile, level: usize, size: usize) -> bool {
    profile.levels()[level - 1].contains(&reduce(profile, size))
}

fn meet(sets: &[&Set]) -> Set {
    let mut it = sets.iter();
    let first = (*it.next().unwrap()).clone();
    it.fold(first, |acc, s| acc.intersection(s).copied().collect())
}

/// All index tuples `i_1 < ... < i_len` of `0..m`.
pub fn combinations(m: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, len, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, len, 0, &mut Vec::new(), &mut out);
    out
}

/// Definition check: distinct members, at least `k` of them, and every
/// `i`-wise meet (distinct indices) admitted by level `i`.
pub fn naive_valid(sets: &[Set], profile: &IntersectionProfile) -> bool {
    let k = profile.k();
    let distinct: BTreeSet<&Set> = sets.iter().collect();
    if distinct.len() != sets.len() || sets.len() < k {
        return false;
    }
    (1..=k).all(|i| {
        combinations(sets.len(), i).iter().all(|t| {
            let chosen: Vec<&Set> = t.iter().map(|&j| &sets[j]).collect();
            level_ok(profile, i, meet(&chosen).len())
        })
    })
}

/// Can `c` join `sets` (valid among themselves) without a violation?
pub fn naive_extends(sets: &[Set], c: &Set, profile: &IntersectionProfile) -> bool {
    if sets.contains(c) || !level_ok(profile, 1, c.len()) {
        return false;
    }
    let k = profile.k();
    (1..k).all(|i| {
        combinations(sets.len(), i).iter().all(|t| {
            let mut chosen: Vec<&Set> = t.iter().map(|&j| &sets[j]).collect();
            chosen.push(c);
            level_ok(profile, i + 1, meet(&chosen).len())
        })
    })
}

/// Random greedy family: shuffled candidates added while they fit, up to
/// `target` members. `None` when fewer than `k` fit.
pub fn random_family(
    rng: &mut impl Rng,
    n: usize,
    profile: &IntersectionProfile,
    target: usize,
) -> Option<Vec<Set>> {
    let mut cands = all_subsets(n);
    cands.shuffle(rng);
    let mut fam: Vec<Set> = Vec::new();
    for c in cands {
        if fam.len() >= target {
            break;
        }
        if naive_extends(&fam, &c, profile) {
            fam.push(c);
        }
    }
    (fam.len() >= profile.k()).then_some(fam)
}

fn random_level(rng: &mut impl Rng, p: u64, max_len: usize) -> BTreeSet<u64> {
    loop {
        let len = rng.gen_range(1..=max_len);
        let s: BTreeSet<u64> = (0..len).map(|_| rng.gen_range(0..p)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn modular_profile(p: u32, levels: Vec<BTreeSet<u64>>) -> IntersectionProfile {
    IntersectionProfile::new(Mode::Modular(trislice::Prime::new(p).unwrap()), levels).unwrap()
}

/// Snevily instance: `n ≤ 10`, `p ∈ {2,3}`, `|L| ≤ 2`, sizes outside `L`,
/// pairwise meets in `L`. Returned lex-sorted.
pub fn snevily_instance(rng: &mut impl Rng) -> (SetFamily, BTreeSet<u64>, u32) {
    loop {
        let p = *[2u32, 3].choose(rng).unwrap();
        let n = rng.gen_range(2..=10);
        let l = random_level(rng, u64::from(p), 2);
        let sizes: BTreeSet<u64> = (0..u64::from(p)).filter(|r| !l.contains(r)).collect();
        if sizes.is_empty() {
            continue;
        }
        let profile = modular_profile(p, vec![sizes, l.clone()]);
        let target = rng.gen_range(2..=24);
        if let Some(f) = random_family(rng, n, &profile, target) {
            return (to_family(n, &f).sorted_lex(), l, p);
        }
    }
}

/// Frankl–Wilson instance: exact pairwise meets in `L`, sorted by size.
pub fn fw_instance(rng: &mut impl Rng) -> (SetFamily, BTreeSet<u64>) {
    loop {
        let n = rng.gen_range(2..=9);
        let s = rng.gen_range(1..=3usize.min(n));
        let l: BTreeSet<u64> = (0..s).map(|_| rng.gen_range(0..n as u64)).collect();
        let all: Vec<u64> = (0..=n as u64).collect();
        let profile = IntersectionProfile::new(Mode::Exact, vec![all.into_iter().collect(), l.clone()]).unwrap();
        let target = rng.gen_range(2..=30);
        if let Some(f) = random_family(rng, n, &profile, target) {
            let fam = to_family(n, &f);
            let mut order: Vec<usize> = (0..fam.len()).collect();
            order.shuffle(rng);
            let shuffled = SetFamily::new(fam.ground(), order.iter().map(|&i| fam.members()[i]).collect()).unwrap();
            return (shuffled.sorted_by_size(), l);
        }
    }
}

/// Liu configuration: `A_r ⊆ B_r`, `|A_r| ∉ L`, `|A_r ∩ B_s| ∈ L` for
/// `r ≠ s`. Returned with the lower family lex-sorted.
pub fn liu_instance(rng: &mut impl Rng) -> LiuConfiguration {
    loop {
        let n = rng.gen_range(2..=8);
        let s = rng.gen_range(1..=2usize);
        let l: BTreeSet<usize> = (0..s).map(|_| rng.gen_range(0..n)).collect();
        let target = rng.gen_range(1..=20);
        let mut pairs: Vec<(Set, Set)> = Vec::new();
        for _ in 0..400 {
            if pairs.len() >= target {
                break;
            }
            let b: Set = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
            let a: Set = b.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            if l.contains(&a.len()) || pairs.iter().any(|(x, y)| *x == a || *y == b) {
                continue;
            }
            let fits = pairs.iter().all(|(ar, br)| {
                l.contains(&a.intersection(br).count()) && l.contains(&ar.intersection(&b).count())
            });
            if fits {
                pairs.push((a, b));
            }
        }
        if pairs.is_empty() {
            continue;
        }
        let (lower, upper): (Vec<Set>, Vec<Set>) = pairs.into_iter().unzip();
        let cfg = LiuConfiguration::new(
            to_family(n, &lower),
            to_family(n, &upper),
            l.iter().map(|&v| v as u64).collect(),
        )
        .unwrap();
        return cfg.sorted_lex();
    }
}

/// Complement-lemma instance: `p | n`, `α = (0, ..., 0, L)`, `L = −L`, and a
/// member index whose complement is not already present.
pub fn complement_instance(rng: &mut impl Rng) -> (SetFamily, IntersectionProfile, usize) {
    loop {
        let p = *[2u32, 3, 5].choose(rng).unwrap();
        let n = p as usize * rng.gen_range(1..=(10 / p as usize).max(1));
        let k = rng.gen_range(2..=3);
        let pp = u64::from(p);
        let mut last = random_level(rng, pp, 2);
        last = last.iter().flat_map(|&v| [v, (pp - v) % pp]).collect();
        let mut levels = vec![BTreeSet::from([0u64]); k - 1];
        levels.push(last);
        let profile = modular_profile(p, levels);
        let target = rng.gen_range(k..=k + 8);
        let Some(f) = random_family(rng, n, &profile, target) else { continue };
        let fam = to_family(n, &f);
        let idx = rng.gen_range(0..fam.len());
        if fam.contains(&fam.members()[idx].complement()) {
            continue;
        }
        return (fam, profile, idx);
    }
}

/// Trace-lemma instance: some `t ≥ 2` with `L_t ∩ L_{t+1} = ∅`, `n > t`,
/// at least `k` members.
pub fn trace_instance(rng: &mut impl Rng) -> (SetFamily, IntersectionProfile, usize) {
    loop {
        let p = *[2u32, 3].choose(rng).unwrap();
        let k = rng.gen_range(3..=4);
        let pp = u64::from(p);
        let levels: Vec<BTreeSet<u64>> = (0..k).map(|_| random_level(rng, pp, p as usize)).collect();
        let profile = modular_profile(p, levels);
        let Some(t) = profile.disjoint_consecutive_level() else { continue };
        let n = rng.gen_range(t + 1..=9);
        let target = rng.gen_range(k..=k + 8);
        let Some(f) = random_family(rng, n, &profile, target) else { continue };
        let fam = to_family(n, &f);
        let gamma = rng.gen_range(0..fam.len());
        return (fam, profile, gamma);
    }
}

/// Largest subfamily of admitted-size subsets, by enumerating every subset
/// of the candidate list. Two-level profiles only.
pub fn naive_max(n: usize, profile: &IntersectionProfile) -> usize {
    assert_eq!(profile.k(), 2);
    let cands: Vec<Set> = all_subsets(n)
        .into_iter()
        .filter(|s| level_ok(profile, 1, s.len()))
        .collect();
    let c = cands.len();
    assert!(c <= 20, "too many candidates for brute force");
    let compat: Vec<u32> = (0..c)
        .map(|i| {
            (0..c)
                .filter(|&j| j != i && level_ok(profile, 2, cands[i].intersection(&cands[j]).count()))
                .fold(0u32, |m, j| m | 1 << j)
        })
        .collect();
    let mut best = 0;
    for mask in 0u32..(1u32 << c) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let ok = (0..c)
            .filter(|&i| mask >> i & 1 == 1)
            .all(|i| mask & !(1 << i) & !compat[i] == 0);
        if ok {
            best = size;
        }
    }
    best
}

pub fn subset(n: usize, elems: &[usize]) -> Subset {
    Subset::from_elements(GroundSize::new(n).unwrap(), elems).unwrap()
}

// --- matrices ----------------------------------------------------------

/// Determinant over GF(p) by permutation expansion.
pub fn det_mod(m: &[Vec<u64>], p: u64) -> u64 {
    let d = m.len();
    let mut total: i128 = 0;
    permutations(d, &mut |perm, sign| {
        let mut prod: i128 = sign as i128;
        for (r, &c) in perm.iter().enumerate() {
            prod = prod * m[r][c] as i128 % p as i128;
        }
        total = (total + prod).rem_euclid(p as i128);
    });
    total as u64
}

pub fn det_exact(m: &[Vec<BigRational>]) -> BigRational {
    let mut total = BigRational::zero();
    permutations(m.len(), &mut |perm, sign| {
        let mut prod = BigRational::from_integer(BigInt::from(sign));
        for (r, &c) in perm.iter().enumerate() {
            prod *= &m[r][c];
        }
        total += prod;
    });
    total
}

fn permutations(d: usize, f: &mut dyn FnMut(&[usize], i64)) {
    fn rec(perm: &mut Vec<usize>, k: usize, sign: i64, f: &mut dyn FnMut(&[usize], i64)) {
        if k == perm.len() {
            f(perm, sign);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(perm, k + 1, if i == k { sign } else { -sign }, f);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..d).collect();
    rec(&mut perm, 0, 1, f);
}

fn submatrix<T: Clone>(m: &[Vec<T>], rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect()
}

/// Rank as the order of the largest nonzero minor.
pub fn minor_rank_mod(m: &[Vec<u64>], p: u64) -> usize {
    let d = m.len();
    (1..=d)
        .rev()
        .find(|&r| {
            let subsets = combinations(d, r);
            subsets.iter().any(|rows| {
                subsets
                    .iter()
                    .any(|cols| det_mod(&submatrix(m, rows, cols), p) != 0)
            })
        })
        .unwrap_or(0)
}

pub fn minor_rank_exact(m: &[Vec<BigRational>]) -> usize {
    let d = m.len();
    (1..=d)
        .rev()
        .find(|&r| {
            let subsets = combinations(d, r);
            subsets.iter().any(|rows| {
                subsets
                    .iter()
                    .any(|cols| !det_exact(&submatrix(m, rows, cols)).is_zero())
            })
        })
        .unwrap_or(0)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn one() -> BigRational {
    BigRational::one()
}
