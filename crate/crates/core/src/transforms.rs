//! Complement replacement, the trace of a family on one of its members, and
//! the normalization that complements every member larger than `n/2`.

use crate::error::{Error, Result};
use crate::family::{GroundSize, SetFamily, Subset};
use crate::profile::{verify_family, IntersectionProfile};

/// Output of [`trace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceResult {
    /// `{relabel(A_i ∩ A_γ) : i ≠ γ}` on ground set `[|A_γ|]`, input order.
    pub family: SetFamily,
    /// `(L_2, ..., L_k)`.
    pub profile: IntersectionProfile,
    /// `relabel[j]` is the original element mapped to `j + 1`.
    pub relabel: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    /// Re-run `verify_family` on the traced family.
    pub reverify: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { reverify: true }
    }
}

/// `p | n`, `α = (0, ..., 0, L)` and `L = -L`.
fn check_complement_preconditions(n: GroundSize, profile: &IntersectionProfile) -> Result<()> {
    let p = profile.modulus().ok_or_else(|| {
        Error::Precondition("complementation needs a modular profile".into())
    })?;
    if !p.divides(n.get()) {
        return Err(Error::Precondition(format!(
            "modulus must divide ground size ({p} does not divide {n})"
        )));
    }
    if !profile.is_zero_prefixed() {
        return Err(Error::Precondition(format!(
            "profile {profile} is not of the form (0, ..., 0, L)"
        )));
    }
    if !profile.is_negation_closed(profile.k()) {
        return Err(Error::Precondition(format!(
            "last level of {profile} is not closed under negation mod {p}"
        )));
    }
    Ok(())
}

fn complement_in_place(members: &mut [Subset], index: usize) -> Result<()> {
    let replaced = members[index].complement();
    if let Some(other) = members.iter().position(|m| *m == replaced) {
        if other != index {
            return Err(Error::Duplicate {
                first: other.min(index),
                second: other.max(index),
                set: replaced.to_string(),
            });
        }
    }
    members[index] = replaced;
    Ok(())
}

/// Replaces member `index` (0-based) by its complement in `[n]`. The result
/// is re-verified under `profile`; an invalid result is an error.
pub fn complement_replace(
    family: &SetFamily,
    index: usize,
    profile: &IntersectionProfile,
) -> Result<SetFamily> {
    check_complement_preconditions(family.ground(), profile)?;
    if index >= family.len() {
        return Err(Error::Parameter(format!(
            "member index {index} out of range for a family of {}",
            family.len()
        )));
    }
    let mut members = family.members().to_vec();
    complement_in_place(&mut members, index)?;
    let out = SetFamily::new(family.ground(), members)?;
    verify_family(&out, profile).into_result()?;
    Ok(out)
}

/// Intersects every other member with member `gamma` (0-based) and
/// relabels the result onto `[|A_γ|]`.
pub fn trace(
    family: &SetFamily,
    gamma: usize,
    profile: &IntersectionProfile,
) -> Result<TraceResult> {
    trace_with(family, gamma, profile, TraceOptions::default())
}

pub fn trace_with(
    family: &SetFamily,
    gamma: usize,
    profile: &IntersectionProfile,
    opts: TraceOptions,
) -> Result<TraceResult> {
    if profile.k() < 2 {
        return Err(Error::Precondition(
            "trace needs a profile with at least two levels".into(),
        ));
    }
    let t = profile.disjoint_consecutive_level().ok_or_else(|| {
        Error::Precondition(format!(
            "profile {profile} has no t > 1 with L_t and L_(t+1) disjoint; traced sets need not be distinct"
        ))
    })?;
    let n = family.ground().get();
    if n <= t {
        return Err(Error::Precondition(format!(
            "ground size {n} must exceed t = {t}"
        )));
    }
    if gamma >= family.len() {
        return Err(Error::Parameter(format!(
            "gamma {gamma} out of range for a family of {}",
            family.len()
        )));
    }
    verify_family(family, profile)
        .into_result()
        .map_err(|e| Error::Hypothesis(format!("input family is not valid under {profile}: {e}")))?;

    let pivot = family.members()[gamma];
    let traced: Vec<u64> = family
        .members()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != gamma)
        .map(|(_, m)| m.bits() & pivot.bits())
        .collect();
    for (i, a) in traced.iter().enumerate() {
        if let Some(j) = traced[i + 1..].iter().position(|b| b == a) {
            return Err(Error::Invariant(format!(
                "traces of two members on {pivot} coincide (positions {i} and {}) despite disjoint levels {t} and {}",
                i + 1 + j,
                t + 1
            )));
        }
    }
    let ground = GroundSize::new(pivot.len()).map_err(|_| {
        Error::Invariant(format!("trace onto {pivot} has an empty ground set"))
    })?;
    let members = family
        .members()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != gamma)
        .map(|(_, m)| m.relabel_onto(&pivot))
        .collect::<Result<Vec<_>>>()?;
    let traced_family = SetFamily::new(ground, members)?;
    let shifted = profile.shifted()?;
    if opts.reverify {
        verify_family(&traced_family, &shifted)
            .into_result()
            .map_err(|e| Error::Invariant(format!("traced family fails {shifted}: {e}")))?;
    }
    Ok(TraceResult {
        family: traced_family,
        profile: shifted,
        relabel: pivot.elements(),
    })
}

/// Complements, in index order, every member of size greater than `n/2`.
pub fn shrink_small(family: &SetFamily, profile: &IntersectionProfile) -> Result<SetFamily> {
    let n = family.ground();
    check_complement_preconditions(n, profile)?;
    let mut members = family.members().to_vec();
    for i in 0..members.len() {
        if 2 * members[i].len() > n.get() {
            complement_in_place(&mut members, i)?;
        }
    }
    let out = SetFamily::new(n, members)?;
    verify_family(&out, profile).into_result()?;
    Ok(out)
}
