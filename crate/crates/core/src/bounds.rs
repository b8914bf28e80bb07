//! Closed-form upper bounds on the size of `[n, p, α]`-families, and a
//! report listing every bound whose hypotheses a profile satisfies.
//!
//! All arithmetic is exact. `C(a, i) = 0` for `i > a`; a negative top is
//! rejected.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::Prime;
use crate::profile::{IntersectionProfile, Mode};

/// `C(a, i)`, zero when `i > a`.
pub fn binomial(a: u64, i: u64) -> BigUint {
    if i > a {
        return BigUint::zero();
    }
    let i = i.min(a - i);
    let mut acc = BigUint::one();
    for j in 0..i {
        acc *= a - j;
        acc /= j + 1;
    }
    acc
}

/// `Σ_{i=0}^{s} C(a, i)`.
pub fn binomial_sum(a: u64, s: u64) -> BigUint {
    (0..=s.min(a)).map(|i| binomial(a, i)).sum()
}

fn top_from(value: i64, what: &str) -> Result<u64> {
    u64::try_from(value).map_err(|_| {
        Error::Parameter(format!("binomial top {what} = {value} is negative; bound undefined"))
    })
}

/// `Σ_{i=0}^{s} C(n − 1, i)`, for `s ≤ n − 1`.
pub fn snevily_bound(n: u64, s: u64) -> Result<BigUint> {
    if n == 0 || s > n - 1 {
        return Err(Error::Parameter(format!(
            "need s ≤ n − 1, got n = {n}, s = {s}"
        )));
    }
    Ok(binomial_sum(n - 1, s))
}

/// `Σ_{i=0}^{s} C(n, i)`, for `s ≤ n`.
pub fn frankl_wilson_bound(n: u64, s: u64) -> Result<BigUint> {
    if s > n {
        return Err(Error::Parameter(format!("need s ≤ n, got n = {n}, s = {s}")));
    }
    Ok(binomial_sum(n, s))
}

/// Frankl–Wilson when `L` has only positive values: `Σ_{i=0}^{s} C(n − 1, i)`.
pub fn fw_positive_l_bound(n: u64, s: u64) -> Result<BigUint> {
    snevily_bound(n, s)
}

/// The conjectured `C(n, s)`.
pub fn snevily_conjecture_value(n: u64, s: u64) -> Result<BigUint> {
    if s > n {
        return Err(Error::Parameter(format!("need s ≤ n, got n = {n}, s = {s}")));
    }
    Ok(binomial(n, s))
}

/// Sizes in `{0}`, meets in a negation-closed `L`: `Σ_{i≤|L|} C(n − 2, i)`
/// when `p | n`, otherwise `Σ_{i≤|L|} C(n − 1, i)`.
pub fn sharper_bound(n: u64, p: Prime, size_l: u64) -> Result<BigUint> {
    if size_l == 0 {
        return Err(Error::Parameter("|L| must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if n % u64::from(p.get()) == 0 {
        let top = top_from(n as i64 - 2, "n − 2")?;
        Ok(binomial_sum(top, size_l))
    } else {
        Ok(binomial_sum(n - 1, size_l))
    }
}

/// `α = (0, ..., 0, L)` with `k > 2` levels, `0 ∉ L = −L`:
/// `Σ_{i≤|L|} C(⌊n / 2^{k−2}⌋ − 2, i) + k − 2` when `p | n`, and the same
/// with `2^{k−3}` otherwise.
pub fn generalized_rot_bound(n: u64, p: Prime, k: u64, size_l: u64) -> Result<BigUint> {
    if k <= 2 {
        return Err(Error::Parameter(format!("need k > 2, got k = {k}")));
    }
    if size_l == 0 {
        return Err(Error::Parameter("|L| must be at least 1".into()));
    }
    let shift = if n % u64::from(p.get()) == 0 { k - 2 } else { k - 3 };
    let halved = if shift >= 64 { 0 } else { n >> shift };
    let top = top_from(halved as i64 - 2, &format!("⌊{n}/2^{shift}⌋ − 2"))?;
    Ok(binomial_sum(top, size_l) + BigUint::from(k - 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    /// A theorem whose hypotheses were all checked against the profile.
    Theorem,
    /// Conjectured, not a theorem; excluded from `tightest`.
    Conjectured,
}

pub(crate) fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

fn serialize_opt_big<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => serialize_big(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    #[serde(serialize_with = "serialize_big")]
    pub value: BigUint,
    pub status: BoundStatus,
    /// Hypotheses verified before the bound was applied.
    pub hypotheses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub p: Option<u32>,
    pub profile: String,
    pub entries: Vec<BoundEntry>,
    /// Bounds considered but not applied, with the reason.
    pub notes: Vec<String>,
    /// Minimum over theorem entries.
    #[serde(serialize_with = "serialize_opt_big")]
    pub tightest: Option<BigUint>,
}

impl BoundReport {
    pub fn theorem_entries(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| e.status == BoundStatus::Theorem)
    }

    /// Name of the entry achieving `tightest`.
    pub fn tightest_name(&self) -> Option<&str> {
        let t = self.tightest.as_ref()?;
        self.theorem_entries().find(|e| &e.value == t).map(|e| e.name.as_str())
    }

    /// `tightest` as a machine integer, saturating.
    pub fn tightest_usize(&self) -> Option<usize> {
        self.tightest.as_ref().map(|t| t.to_usize().unwrap_or(usize::MAX))
    }
}

pub const SNEVILY: &str = "snevily";
pub const SNEVILY_CONJECTURE: &str = "snevily_conjecture";
pub const SHARPER: &str = "sharper_reverse_oddtown";
pub const GENERALIZED_ROT: &str = "generalized_reverse_oddtown";
pub const FRANKL_WILSON: &str = "frankl_wilson";
pub const FW_POSITIVE: &str = "frankl_wilson_positive_l";

/// Evaluates every bound whose hypotheses `profile` meets for ground size `n`.
/// A modulus passed separately must agree with the profile's.
pub fn bound_report(n: u64, p: Option<Prime>, profile: &IntersectionProfile) -> Result<BoundReport> {
    let mode_p = profile.modulus();
    if let (Some(given), Some(own)) = (p, mode_p) {
        if given != own {
            return Err(Error::Parameter(format!(
                "modulus {given} disagrees with profile {profile}"
            )));
        }
    }
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    let k = profile.k();
    let mut push = |name: &str, value: Result<BigUint>, status, hypotheses: Vec<String>, notes: &mut Vec<String>| {
        match value {
            Ok(value) => entries.push(BoundEntry {
                name: name.to_owned(),
                value,
                status,
                hypotheses,
            }),
            Err(e) => notes.push(format!("{name}: {e}")),
        }
    };

    match profile.mode() {
        Mode::Modular(q) => {
            if k == 2 {
                let sizes = profile.level(1);
                let meets = profile.level(2);
                let s = meets.len() as u64;
                if sizes.is_disjoint(meets) {
                    let hyps = vec![
                        format!("{q} is prime"),
                        "size residues and meet residues are disjoint".to_owned(),
                    ];
                    push(SNEVILY, snevily_bound(n, s), BoundStatus::Theorem, hyps.clone(), &mut notes);
                    push(
                        SNEVILY_CONJECTURE,
                        snevily_conjecture_value(n, s),
                        BoundStatus::Conjectured,
                        hyps,
                        &mut notes,
                    );
                    let zero_sizes = sizes.len() == 1 && sizes.contains(&0);
                    if zero_sizes && profile.is_negation_closed(2) {
                        push(
                            SHARPER,
                            sharper_bound(n, q, s),
                            BoundStatus::Theorem,
                            vec![
                                format!("{q} is prime"),
                                "sizes ≡ 0".to_owned(),
                                "L = −L".to_owned(),
                                "0 ∉ L".to_owned(),
                                if q.divides(n as usize) {
                                    format!("{q} divides {n}")
                                } else {
                                    format!("{q} does not divide {n}")
                                },
                            ],
                            &mut notes,
                        );
                    } else {
                        notes.push(format!(
                            "{SHARPER}: needs sizes ≡ 0 and a negation-closed L"
                        ));
                    }
                } else {
                    notes.push(format!(
                        "{SNEVILY}: size and meet residues intersect"
                    ));
                }
            } else if k > 2 {
                let last = profile.level(k);
                if profile.is_zero_prefixed() && !last.contains(&0) && profile.is_negation_closed(k) {
                    push(
                        GENERALIZED_ROT,
                        generalized_rot_bound(n, q, k as u64, last.len() as u64),
                        BoundStatus::Theorem,
                        vec![
                            format!("{q} is prime"),
                            format!("k = {k} > 2"),
                            "levels below k are {0}".to_owned(),
                            "0 ∉ L_k".to_owned(),
                            "L_k = −L_k".to_owned(),
                        ],
                        &mut notes,
                    );
                } else {
                    notes.push(format!(
                        "{GENERALIZED_ROT}: needs (0, ..., 0, L) with 0 ∉ L = −L"
                    ));
                }
            } else {
                notes.push("no bound for one-level profiles".to_owned());
            }
        }
        Mode::Exact => {
            if k == 2 {
                let meets = profile.level(2);
                let s = meets.len() as u64;
                push(
                    FRANKL_WILSON,
                    frankl_wilson_bound(n, s),
                    BoundStatus::Theorem,
                    vec!["pairwise meets lie in L_2 (exact)".to_owned()],
                    &mut notes,
                );
                if meets.contains(&0) {
                    notes.push(format!("{FW_POSITIVE}: inapplicable, 0 ∈ L"));
                } else {
                    push(
                        FW_POSITIVE,
                        fw_positive_l_bound(n, s),
                        BoundStatus::Theorem,
                        vec![
                            "pairwise meets lie in L_2 (exact)".to_owned(),
                            "L_2 has only positive values".to_owned(),
                        ],
                        &mut notes,
                    );
                }
            } else {
                notes.push("exact-mode bounds need a two-level profile".to_owned());
            }
        }
    }

    let tightest = entries
        .iter()
        .filter(|e| e.status == BoundStatus::Theorem)
        .map(|e| e.value.clone())
        .min();
    Ok(BoundReport {
        n,
        p: mode_p.or(p).map(Prime::get),
        profile: profile.to_string(),
        entries,
        notes,
        tightest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(snevily_bound(4, 1).unwrap(), big(4));
        assert_eq!(snevily_bound(10, 0).unwrap(), big(1));
        assert_eq!(snevily_bound(6, 2).unwrap(), big(16));
        assert!(snevily_bound(3, 3).is_err());

        assert_eq!(frankl_wilson_bound(4, 1).unwrap(), big(5));
        assert_eq!(frankl_wilson_bound(9, 0).unwrap(), big(1));
        assert_eq!(frankl_wilson_bound(5, 2).unwrap(), big(16));
        assert!(frankl_wilson_bound(3, 4).is_err());

        assert_eq!(fw_positive_l_bound(4, 1).unwrap(), big(4));
        assert_eq!(fw_positive_l_bound(3, 0).unwrap(), big(1));
        assert_eq!(fw_positive_l_bound(6, 2).unwrap(), big(16));

        assert_eq!(snevily_conjecture_value(4, 1).unwrap(), big(4));
        assert_eq!(snevily_conjecture_value(5, 2).unwrap(), big(10));
        assert_eq!(snevily_conjecture_value(7, 0).unwrap(), big(1));
        assert!(snevily_conjecture_value(2, 3).is_err());
    }

    #[test]
    fn sharper_and_generalized() {
        assert_eq!(sharper_bound(4, p(2), 1).unwrap(), big(3));
        assert_eq!(sharper_bound(5, p(2), 1).unwrap(), big(5));
        assert_eq!(sharper_bound(6, p(3), 2).unwrap(), big(11));
        assert!(sharper_bound(4, p(2), 0).is_err());

        assert_eq!(generalized_rot_bound(16, p(2), 3, 1).unwrap(), big(8));
        assert_eq!(generalized_rot_bound(15, p(2), 3, 1).unwrap(), big(15));
        assert_eq!(generalized_rot_bound(8, p(2), 3, 1).unwrap(), big(4));
        assert_eq!(generalized_rot_bound(12, p(2), 3, 1).unwrap(), big(6));
        assert!(generalized_rot_bound(8, p(2), 2, 1).is_err());
        // ⌊8 / 2^3⌋ − 2 < 0
        let err = generalized_rot_bound(8, p(2), 5, 1).unwrap_err();
        assert!(err.to_string().contains("negative"));
    }

    #[test]
    fn reports() {
        let r = bound_report(4, Some(p(2)), &"mod:2:0|1".parse().unwrap()).unwrap();
        let got: Vec<(&str, u64)> = r
            .entries
            .iter()
            .map(|e| (e.name.as_str(), e.value.to_u64().unwrap()))
            .collect();
        assert_eq!(got, vec![(SNEVILY, 4), (SNEVILY_CONJECTURE, 4), (SHARPER, 3)]);
        assert_eq!(r.tightest, Some(big(3)));
        assert_eq!(r.tightest_name(), Some(SHARPER));

        let r = bound_report(8, None, &"mod:2:0|0|1".parse().unwrap()).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].name, GENERALIZED_ROT);
        assert_eq!(r.tightest, Some(big(4)));

        let r = bound_report(3, None, &"exact:1,2|0".parse().unwrap()).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].name, FRANKL_WILSON);
        assert_eq!(r.entries[0].value, big(4));
        assert!(r.notes.iter().any(|n| n.contains("0 ∈ L")));

        let r = bound_report(5, None, &"mod:2:1|0".parse().unwrap()).unwrap();
        assert_eq!(r.tightest, Some(big(5)));

        let r = bound_report(5, None, &"mod:2:0|0".parse().unwrap()).unwrap();
        assert!(r.entries.is_empty() && r.tightest.is_none());

        assert!(bound_report(4, Some(p(3)), &"mod:2:0|1".parse().unwrap()).is_err());

        let json = serde_json::to_string(&bound_report(4, None, &"mod:2:0|1".parse().unwrap()).unwrap())
            .unwrap();
        assert!(json.contains(r#""tightest":3"#), "{json}");
    }
}
