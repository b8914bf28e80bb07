//! k-intersection profiles and `[n, p, α]`-family verification.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Prime, SetFamily, Subset};

/// Modulus handling for a profile. Never inferred from the values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Intersection sizes are reduced mod `p` before the membership test.
    Modular(Prime),
    /// Intersection sizes are compared as plain integers.
    Exact,
}

/// `α = (L_1, ..., L_k)`: level `i` constrains every `i`-wise intersection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersectionProfile {
    mode: Mode,
    levels: Vec<BTreeSet<u64>>,
}

impl IntersectionProfile {
    pub fn new(mode: Mode, levels: Vec<BTreeSet<u64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Parameter("profile needs at least one level".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(Error::Parameter(format!("level {} is empty", i + 1)));
            }
            if let Mode::Modular(p) = mode {
                if let Some(&bad) = level.iter().find(|&&v| v >= u64::from(p.get())) {
                    return Err(Error::Parameter(format!(
                        "residue {bad} in level {} is not below the modulus {p}",
                        i + 1
                    )));
                }
            }
        }
        Ok(IntersectionProfile { mode, levels })
    }

    /// Convenience constructor for modular profiles.
    pub fn modular(p: u32, levels: &[&[u64]]) -> Result<Self> {
        let p = Prime::new(p)?;
        Self::new(
            Mode::Modular(p),
            levels.iter().map(|l| l.iter().copied().collect()).collect(),
        )
    }

    pub fn exact(levels: &[&[u64]]) -> Result<Self> {
        Self::new(
            Mode::Exact,
            levels.iter().map(|l| l.iter().copied().collect()).collect(),
        )
    }

    #[inline]
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn modulus(&self) -> Option<Prime> {
        match self.mode {
            Mode::Modular(p) => Some(p),
            Mode::Exact => None,
        }
    }

    /// Number of levels `k`.
    #[inline]
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[BTreeSet<u64>] {
        &self.levels
    }

    /// Level `L_i`, 1-based.
    pub fn level(&self, i: usize) -> &BTreeSet<u64> {
        &self.levels[i - 1]
    }

    /// Whether an `i`-wise intersection of size `size` satisfies `L_i` (1-based `i`).
    #[inline]
    pub fn admits(&self, i: usize, size: u64) -> bool {
        let v = match self.mode {
            Mode::Modular(p) => p.reduce(size),
            Mode::Exact => size,
        };
        self.levels[i - 1].contains(&v)
    }

    /// Lookup table `table[i][s]` = `admits(i + 1, s)` for sizes `0..=n`.
    pub(crate) fn admit_table(&self, n: usize) -> Vec<Vec<bool>> {
        (1..=self.k())
            .map(|i| (0..=n as u64).map(|s| self.admits(i, s)).collect())
            .collect()
    }

    /// `(L_2, ..., L_k)`.
    pub fn shifted(&self) -> Result<Self> {
        if self.k() < 2 {
            return Err(Error::Parameter("cannot shift a one-level profile".into()));
        }
        Self::new(self.mode, self.levels[1..].to_vec())
    }

    /// `(0, ..., 0, L)`: modular with every level below the last equal to `{0}`.
    pub fn is_zero_prefixed(&self) -> bool {
        matches!(self.mode, Mode::Modular(_))
            && self.levels[..self.k() - 1]
                .iter()
                .all(|l| l.len() == 1 && l.contains(&0))
    }

    /// `L = -L` in `Z_p` for level `i` (1-based); false in exact mode.
    pub fn is_negation_closed(&self, i: usize) -> bool {
        match self.mode {
            Mode::Modular(p) => {
                let p = u64::from(p.get());
                let level = self.level(i);
                level.iter().all(|&v| level.contains(&((p - v) % p)))
            }
            Mode::Exact => false,
        }
    }

    /// Smallest `t >= 2` (1-based) with `L_t ∩ L_{t+1} = ∅`.
    pub fn disjoint_consecutive_level(&self) -> Option<usize> {
        (2..self.k()).find(|&t| self.level(t).is_disjoint(self.level(t + 1)))
    }

    /// Substitutes `{p}` in a template before parsing.
    pub fn instantiate(template: &str, p: Option<u32>) -> Result<Self> {
        match (template.contains("{p}"), p) {
            (true, Some(p)) => template.replace("{p}", &p.to_string()).parse(),
            (true, None) => Err(Error::Parameter(format!(
                "profile template `{template}` needs a modulus"
            ))),
            (false, _) => template.parse(),
        }
    }
}

fn fmt_level(level: &BTreeSet<u64>) -> String {
    level
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// `mod:p:L1|L2|...` or `exact:L1|L2|...`, residues comma-separated.
impl fmt::Display for IntersectionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Modular(p) => write!(f, "mod:{p}:")?,
            Mode::Exact => f.write_str("exact:")?,
        }
        let body = self.levels.iter().map(fmt_level).collect::<Vec<_>>();
        f.write_str(&body.join("|"))
    }
}

impl FromStr for IntersectionProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mode, body) = if let Some(rest) = s.strip_prefix("mod:") {
            let (p, body) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(format!("profile `{s}`: expected mod:p:levels")))?;
            let p: u32 = p
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("profile `{s}`: bad modulus `{p}`")))?;
            (Mode::Modular(Prime::new(p)?), body)
        } else if let Some(body) = s.strip_prefix("exact:") {
            (Mode::Exact, body)
        } else {
            return Err(Error::parse(format!(
                "profile `{s}` must start with `mod:` or `exact:`"
            )));
        };
        let levels = body
            .split('|')
            .map(|level| {
                level
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(|v| {
                        v.parse::<u64>()
                            .map_err(|_| Error::parse(format!("profile `{s}`: bad value `{v}`")))
                    })
                    .collect::<Result<BTreeSet<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        IntersectionProfile::new(mode, levels)
    }
}

/// What a verification found wrong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Fewer members than the profile has levels.
    TooSmall { size: usize, required: usize },
    /// The intersection of the members at `tuple` (0-based, ascending) has a
    /// size outside level `level`.
    Level {
        tuple: Vec<usize>,
        level: usize,
        observed: u64,
    },
    /// Paired configuration: `A_r ⊄ B_r`.
    NotContained { index: usize },
    /// Paired configuration: `|A_r| ∈ L`.
    OwnSizeInL { index: usize, size: u64 },
    /// Paired configuration: `|A_r ∩ B_s| ∉ L` for `r ≠ s`.
    CrossMeet { r: usize, s: usize, observed: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |t: &[usize]| {
            t.iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Violation::TooSmall { size, required } => {
                write!(f, "family too small: {size} members, profile needs {required}")
            }
            Violation::Level {
                tuple,
                level,
                observed,
            } => write!(
                f,
                "members ({}) meet in {observed}, not allowed at level {level}",
                one_based(tuple)
            ),
            Violation::NotContained { index } => {
                write!(f, "A_{0} is not contained in B_{0}", index + 1)
            }
            Violation::OwnSizeInL { index, size } => {
                write!(f, "|A_{}| = {size} lies in L", index + 1)
            }
            Violation::CrossMeet { r, s, observed } => write!(
                f,
                "|A_{} ∩ B_{}| = {observed} is not in L",
                r + 1,
                s + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// More violations exist than were recorded.
    pub truncated: bool,
}

impl VerificationReport {
    fn from_violations(violations: Vec<Violation>, truncated: bool) -> Self {
        VerificationReport {
            valid: violations.is_empty(),
            violations,
            truncated,
        }
    }

    /// Converts an invalid report into an error carrying its first violation.
    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Verification(v.to_string())),
        }
    }
}

/// How many violations to collect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub cap: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { cap: Some(32) }
    }
}

impl VerifyOptions {
    pub fn all() -> Self {
        VerifyOptions { cap: None }
    }

    /// Stop at the first violation.
    pub fn first() -> Self {
        VerifyOptions { cap: Some(1) }
    }
}

/// Families at least this large fan tuple enumeration out across threads.
const PARALLEL_MIN_MEMBERS: usize = 48;

pub fn verify_family(family: &SetFamily, profile: &IntersectionProfile) -> VerificationReport {
    verify_family_with(family, profile, VerifyOptions::default())
}

/// Checks every `i`-subset of members, `i = 1..=k`, in colexicographic
/// order of index tuples, together with the `|F| >= k` floor.
pub fn verify_family_with(
    family: &SetFamily,
    profile: &IntersectionProfile,
    opts: VerifyOptions,
) -> VerificationReport {
    let cap = opts.cap.unwrap_or(usize::MAX).max(1);
    let k = profile.k();
    let m = family.len();
    let mut violations = Vec::new();
    if m < k {
        violations.push(Violation::TooSmall { size: m, required: k });
    }
    let bits = family.bits();
    let table = profile.admit_table(family.ground().get());
    let mut truncated = false;

    for level in 1..=k.min(m) {
        if violations.len() >= cap {
            truncated = true;
            break;
        }
        let budget = cap - violations.len();
        // Colex order groups tuples by their largest index.
        let per_last = |last: usize| -> Vec<Violation> {
            let mut out = Vec::new();
            let mut tuple = vec![0usize; level];
            tuple[level - 1] = last;
            collect_rec(
                &bits,
                &table[level - 1],
                level,
                level - 1,
                last,
                bits[last],
                &mut tuple,
                budget,
                &mut out,
            );
            out
        };
        let groups: Vec<Vec<Violation>> = if m >= PARALLEL_MIN_MEMBERS && level >= 2 {
            crate::par::map_range(m - (level - 1), |j| per_last(j + level - 1))
        } else {
            let mut groups = Vec::new();
            let mut found = 0;
            for last in level - 1..m {
                let g = per_last(last);
                found += g.len();
                groups.push(g);
                if found >= budget {
                    break;
                }
            }
            groups
        };
        for v in groups.into_iter().flatten() {
            if violations.len() >= cap {
                truncated = true;
                break;
            }
            violations.push(v);
        }
    }
    VerificationReport::from_violations(violations, truncated)
}

/// Fills `tuple[..remaining]` with indices below `bound` in colex order,
/// carrying the running intersection.
#[allow(clippy::too_many_arguments)]
fn collect_rec(
    bits: &[u64],
    admit: &[bool],
    level: usize,
    remaining: usize,
    bound: usize,
    meet: u64,
    tuple: &mut Vec<usize>,
    budget: usize,
    out: &mut Vec<Violation>,
) {
    if out.len() >= budget {
        return;
    }
    if remaining == 0 {
        let size = u64::from(meet.count_ones());
        if !admit[size as usize] {
            out.push(Violation::Level {
                tuple: tuple.clone(),
                level,
                observed: size,
            });
        }
        return;
    }
    for idx in remaining - 1..bound {
        tuple[remaining - 1] = idx;
        collect_rec(bits, admit, level, remaining - 1, idx, meet & bits[idx], tuple, budget, out);
        if out.len() >= budget {
            return;
        }
    }
}

/// The paired families `A_1..A_m`, `B_1..B_m` and the set `L` of allowed
/// cross-intersection sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiuConfiguration {
    lower: SetFamily,
    upper: SetFamily,
    l: BTreeSet<u64>,
}

impl LiuConfiguration {
    pub fn new(lower: SetFamily, upper: SetFamily, l: BTreeSet<u64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Parameter(format!(
                "paired families differ in size: {} vs {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.ground() != upper.ground() {
            return Err(Error::Context {
                left: lower.ground().get(),
                right: upper.ground().get(),
            });
        }
        Ok(LiuConfiguration { lower, upper, l })
    }

    pub fn lower(&self) -> &SetFamily {
        &self.lower
    }

    pub fn upper(&self) -> &SetFamily {
        &self.upper
    }

    pub fn l(&self) -> &BTreeSet<u64> {
        &self.l
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Reorders both families together so the lower one is lex-ascending.
    pub fn sorted_lex(&self) -> Self {
        let mut pairs: Vec<(Subset, Subset)> = self
            .lower
            .members()
            .iter()
            .copied()
            .zip(self.upper.members().iter().copied())
            .collect();
        pairs.sort_by_key(|(a, _)| a.bits());
        let ground = self.lower.ground();
        let (a, b): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        LiuConfiguration {
            lower: SetFamily::from_bits_unchecked(ground, &a.iter().map(Subset::bits).collect::<Vec<_>>()),
            upper: SetFamily::from_bits_unchecked(ground, &b.iter().map(Subset::bits).collect::<Vec<_>>()),
            l: self.l.clone(),
        }
    }
}

/// Valid iff `A_r ⊆ B_r`, `|A_r| ∉ L` for all `r`, and `|A_r ∩ B_s| ∈ L`
/// for all `r ≠ s` (exact sizes).
pub fn verify_liu_config(cfg: &LiuConfiguration) -> VerificationReport {
    verify_liu_config_with(cfg, VerifyOptions::default())
}

pub fn verify_liu_config_with(cfg: &LiuConfiguration, opts: VerifyOptions) -> VerificationReport {
    let cap = opts.cap.unwrap_or(usize::MAX).max(1);
    let a = cfg.lower.bits();
    let b = cfg.upper.bits();
    let mut violations = Vec::new();
    let mut truncated = false;
    let mut push = |v: Violation, out: &mut Vec<Violation>| {
        if out.len() >= cap {
            truncated = true;
        } else {
            out.push(v);
        }
    };
    for r in 0..a.len() {
        if a[r] & !b[r] != 0 {
            push(Violation::NotContained { index: r }, &mut violations);
        }
        let size = u64::from(a[r].count_ones());
        if cfg.l.contains(&size) {
            push(Violation::OwnSizeInL { index: r, size }, &mut violations);
        }
    }
    for r in 0..a.len() {
        for s in 0..b.len() {
            if r == s {
                continue;
            }
            let observed = u64::from((a[r] & b[s]).count_ones());
            if !cfg.l.contains(&observed) {
                push(Violation::CrossMeet { r, s, observed }, &mut violations);
            }
        }
    }
    VerificationReport::from_violations(violations, truncated)
}
