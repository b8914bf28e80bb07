//! Subsets of `[n]` as fixed-width bit-vectors, families of them, and the
//! left-to-right lexicographic order on characteristic vectors.
//!
//! Element `e` of `[n]` lives at bit `n - e`, so element 1 is the most
//! significant position. Comparing two raw words of the same width is then
//! exactly the lexicographic comparison of the characteristic vectors read
//! from the left.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground size.
pub const MAX_GROUND: usize = 64;

/// A prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::Parameter(format!("{p} is not prime")))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u64 {
        v % u64::from(self.0)
    }

    pub fn divides(self, n: usize) -> bool {
        n % self.0 as usize == 0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The size `n` of the ground set `[n] = {1, ..., n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSize(u8);

impl GroundSize {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_GROUND).contains(&n) {
            Ok(GroundSize(n as u8))
        } else {
            Err(Error::Width(n))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Bit mask of the full set `[n]`.
    #[inline]
    pub fn full_mask(self) -> u64 {
        full_mask(self.get())
    }
}

impl fmt::Display for GroundSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    bits: u64,
    ground: GroundSize,
}

impl Subset {
    pub fn empty(ground: GroundSize) -> Self {
        Subset { bits: 0, ground }
    }

    pub fn full(ground: GroundSize) -> Self {
        Subset {
            bits: ground.full_mask(),
            ground,
        }
    }

    /// Builds a subset from 1-based elements. Repeated elements are ignored.
    pub fn from_elements(ground: GroundSize, elements: &[usize]) -> Result<Self> {
        let n = ground.get();
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementRange { element: e, n });
            }
            bits |= 1u64 << (n - e);
        }
        Ok(Subset { bits, ground })
    }

    /// Wraps a raw word in the internal bit layout.
    pub fn from_bits(ground: GroundSize, bits: u64) -> Result<Self> {
        if bits & !ground.full_mask() != 0 {
            return Err(Error::Parameter(format!(
                "bit pattern {bits:#x} exceeds ground size {ground}"
            )));
        }
        Ok(Subset { bits, ground })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn ground(&self) -> GroundSize {
        self.ground
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, element: usize) -> bool {
        let n = self.ground.get();
        element >= 1 && element <= n && self.bits >> (n - element) & 1 == 1
    }

    /// Elements in ascending order, 1-based.
    pub fn elements(&self) -> Vec<usize> {
        let n = self.ground.get();
        (1..=n).filter(|&e| self.bits >> (n - e) & 1 == 1).collect()
    }

    /// The `{0,1}` characteristic vector, entry `i` (0-based) for element `i + 1`.
    pub fn char_vector(&self) -> Vec<u8> {
        let n = self.ground.get();
        (1..=n).map(|e| (self.bits >> (n - e) & 1) as u8).collect()
    }

    pub fn complement(&self) -> Subset {
        Subset {
            bits: !self.bits & self.ground.full_mask(),
            ground: self.ground,
        }
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        self.same_ground(other)?;
        Ok(Subset {
            bits: self.bits & other.bits,
            ground: self.ground,
        })
    }

    pub fn is_subset_of(&self, other: &Subset) -> Result<bool> {
        self.same_ground(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// Lexicographic comparison of characteristic vectors from the left.
    pub fn lex_cmp(&self, other: &Subset) -> Result<Ordering> {
        self.same_ground(other)?;
        Ok(self.bits.cmp(&other.bits))
    }

    /// Restricts `self` to the elements of `onto` and renumbers them
    /// `1..=|onto|`, preserving order.
    pub fn relabel_onto(&self, onto: &Subset) -> Result<Subset> {
        self.same_ground(onto)?;
        let ground = GroundSize::new(onto.len())?;
        Ok(Subset {
            bits: extract_bits(self.bits, onto.bits),
            ground,
        })
    }

    fn same_ground(&self, other: &Subset) -> Result<()> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::Context {
                left: self.ground.get(),
                right: other.ground.get(),
            })
        }
    }
}

/// Packs the bits of `value` selected by `mask` into the low bits, keeping
/// their relative order (software PEXT).
pub(crate) fn extract_bits(value: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if value & low != 0 {
            out |= 1 << k;
        }
        k += 1;
        m ^= low;
    }
    out
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical text form: `{1,3,7}`.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

pub fn char_vector(set: &Subset, ground: GroundSize) -> Result<Vec<u8>> {
    if set.ground != ground {
        return Err(Error::Context {
            left: set.ground.get(),
            right: ground.get(),
        });
    }
    Ok(set.char_vector())
}

pub fn lex_compare(x: &Subset, y: &Subset) -> Result<Ordering> {
    x.lex_cmp(y)
}

/// Size of `A_1 ∩ ... ∩ A_r`, reduced mod `p` when a modulus is given.
pub fn meet_size(sets: &[Subset], modulus: Option<Prime>) -> Result<u64> {
    let (first, rest) = sets
        .split_first()
        .ok_or(Error::Arity("meet of an empty list of sets"))?;
    let mut bits = first.bits;
    for s in rest {
        first.same_ground(s)?;
        bits &= s.bits;
    }
    let size = u64::from(bits.count_ones());
    Ok(modulus.map_or(size, |p| p.reduce(size)))
}

/// An ordered family of distinct subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    ground: GroundSize,
    members: Vec<Subset>,
}

impl SetFamily {
    pub fn new(ground: GroundSize, members: Vec<Subset>) -> Result<Self> {
        for m in &members {
            if m.ground != ground {
                return Err(Error::Context {
                    left: ground.get(),
                    right: m.ground.get(),
                });
            }
        }
        check_distinct(&members)?;
        Ok(SetFamily { ground, members })
    }

    pub fn empty(ground: GroundSize) -> Self {
        SetFamily {
            ground,
            members: Vec::new(),
        }
    }

    /// Builds a family from lists of 1-based elements.
    pub fn from_lists<S: AsRef<[usize]>>(n: usize, sets: &[S]) -> Result<Self> {
        let ground = GroundSize::new(n)?;
        let members = sets
            .iter()
            .map(|s| Subset::from_elements(ground, s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(ground, members)
    }

    pub(crate) fn from_bits_unchecked(ground: GroundSize, bits: &[u64]) -> Self {
        SetFamily {
            ground,
            members: bits.iter().map(|&b| Subset { bits: b, ground }).collect(),
        }
    }

    #[inline]
    pub fn ground(&self) -> GroundSize {
        self.ground
    }

    #[inline]
    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Subset> {
        self.members.get(index)
    }

    pub(crate) fn bits(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.bits).collect()
    }

    /// Appends a member, rejecting duplicates.
    pub fn push(&mut self, set: Subset) -> Result<()> {
        if set.ground != self.ground {
            return Err(Error::Context {
                left: self.ground.get(),
                right: set.ground.get(),
            });
        }
        if let Some(pos) = self.members.iter().position(|m| *m == set) {
            return Err(Error::Duplicate {
                first: pos,
                second: self.members.len(),
                set: set.to_string(),
            });
        }
        self.members.push(set);
        Ok(())
    }

    pub fn contains(&self, set: &Subset) -> bool {
        self.members.contains(set)
    }

    /// Members sorted ascending in lex order.
    pub fn sorted_lex(&self) -> SetFamily {
        let mut members = self.members.clone();
        members.sort_by_key(|m| m.bits);
        SetFamily {
            ground: self.ground,
            members,
        }
    }

    /// Members sorted by size; equal sizes keep their relative order.
    pub fn sorted_by_size(&self) -> SetFamily {
        let mut members = self.members.clone();
        members.sort_by_key(|m| m.len());
        SetFamily {
            ground: self.ground,
            members,
        }
    }

    pub fn is_lex_sorted(&self) -> bool {
        self.members.windows(2).all(|w| w[0].bits < w[1].bits)
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(Subset::elements).collect()
    }

    /// One line of the family JSONL format, e.g. `{"n":4,"sets":[[1,2],[1,3]]}`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&FamilyRecord::from(self)).expect("family record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let record: FamilyRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(e.to_string()))?;
        record.into_family()
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

fn check_distinct(members: &[Subset]) -> Result<()> {
    let mut seen = std::collections::HashMap::with_capacity(members.len());
    for (i, m) in members.iter().enumerate() {
        if let Some(&j) = seen.get(&m.bits) {
            return Err(Error::Duplicate {
                first: j,
                second: i,
                set: m.to_string(),
            });
        }
        seen.insert(m.bits, i);
    }
    Ok(())
}

/// Wire form of a family: `{"n": 4, "sets": [[1,2],[1,3]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl From<&SetFamily> for FamilyRecord {
    fn from(f: &SetFamily) -> Self {
        FamilyRecord {
            n: f.ground.get(),
            sets: f.to_lists(),
        }
    }
}

impl FamilyRecord {
    pub fn into_family(self) -> Result<SetFamily> {
        SetFamily::from_lists(self.n, &self.sets)
    }
}

/// Reads every non-blank line of a family JSONL stream.
pub fn read_families(reader: impl BufRead) -> Result<Vec<SetFamily>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(SetFamily::from_json_line(&line).map_err(|e| e.at_line(i + 1))?);
    }
    Ok(out)
}

pub fn write_families<'a>(
    mut writer: impl Write,
    families: impl IntoIterator<Item = &'a SetFamily>,
) -> Result<()> {
    for f in families {
        writeln!(writer, "{}", f.to_json_line())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn s(n: usize, e: &[usize]) -> Subset {
        Subset::from_elements(g(n), e).unwrap()
    }

    #[test]
    fn char_vector_examples() {
        assert_eq!(char_vector(&s(4, &[1, 2]), g(4)).unwrap(), vec![1, 1, 0, 0]);
        assert_eq!(char_vector(&s(3, &[]), g(3)).unwrap(), vec![0, 0, 0]);
        assert_eq!(char_vector(&s(3, &[3]), g(3)).unwrap(), vec![0, 0, 1]);
        assert!(matches!(
            Subset::from_elements(g(3), &[4]),
            Err(Error::ElementRange { element: 4, n: 3 })
        ));
        assert!(char_vector(&s(3, &[1]), g(4)).is_err());
    }

    #[test]
    fn lex_compare_examples() {
        assert_eq!(
            lex_compare(&s(4, &[1]), &s(4, &[1, 2])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            lex_compare(&s(4, &[2, 3]), &s(4, &[1, 3])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            lex_compare(&s(4, &[1, 2]), &s(4, &[1, 2])).unwrap(),
            Ordering::Equal
        );
        assert!(matches!(
            lex_compare(&s(4, &[1]), &s(5, &[1])),
            Err(Error::Context { .. })
        ));
    }

    #[test]
    fn lex_order_properties_exhaustive() {
        for n in 1..=6 {
            let all: Vec<Subset> = (0..1u64 << n)
                .map(|b| Subset::from_bits(g(n), b).unwrap())
                .collect();
            for x in &all {
                for y in &all {
                    let xy = x.lex_cmp(y).unwrap();
                    assert_eq!(xy.reverse(), y.lex_cmp(x).unwrap());
                    assert_eq!(xy == Ordering::Equal, x == y);
                    if x.is_subset_of(y).unwrap() {
                        assert_ne!(xy, Ordering::Greater, "{x} ⊆ {y}");
                    }
                    if xy != Ordering::Greater {
                        let (vx, vy) = (x.char_vector(), y.char_vector());
                        assert_eq!(vx[0] * vy[0], vx[0]);
                    }
                }
            }
            // transitivity via agreement with a sort by characteristic vectors
            let mut by_lex = all.clone();
            by_lex.sort_by(|a, b| a.lex_cmp(b).unwrap());
            let mut by_vec = all.clone();
            by_vec.sort_by_key(|a| a.char_vector());
            assert_eq!(by_lex, by_vec);
        }
    }

    #[test]
    fn meet_size_examples() {
        let sets = [s(8, &[1, 2, 3, 4]), s(8, &[1, 2, 5, 6]), s(8, &[1, 3, 5, 7])];
        assert_eq!(meet_size(&sets, None).unwrap(), 1);
        let two = Prime::new(2).unwrap();
        assert_eq!(meet_size(&[s(4, &[1, 2]), s(4, &[3, 4])], Some(two)).unwrap(), 0);
        assert_eq!(meet_size(&[s(4, &[1, 2, 3])], Some(two)).unwrap(), 1);
        assert!(matches!(meet_size(&[], None), Err(Error::Arity(_))));
        let mut rev = sets;
        rev.reverse();
        assert_eq!(meet_size(&rev, None).unwrap(), 1);
    }

    #[test]
    fn ground_limits() {
        assert!(GroundSize::new(0).is_err());
        assert!(GroundSize::new(65).is_err());
        let full = Subset::full(g(64));
        assert_eq!(full.len(), 64);
        assert_eq!(full.complement().len(), 0);
        assert!(full.contains(1) && full.contains(64));
    }

    #[test]
    fn relabel_is_order_preserving() {
        let onto = s(8, &[1, 2, 5, 6]);
        assert_eq!(s(8, &[1, 2]).relabel_onto(&onto).unwrap(), s(4, &[1, 2]));
        assert_eq!(s(8, &[1, 5, 7]).relabel_onto(&onto).unwrap(), s(4, &[1, 3]));
        assert_eq!(s(8, &[6]).relabel_onto(&onto).unwrap(), s(4, &[4]));
    }

    #[test]
    fn family_rejects_duplicates() {
        let err = SetFamily::from_lists(4, &[vec![1, 2], vec![3], vec![2, 1]]).unwrap_err();
        assert!(matches!(err, Error::Duplicate { first: 0, second: 2, .. }));
    }

    #[test]
    fn family_json_line() {
        let f = SetFamily::from_lists(4, &[vec![2, 1], vec![3]]).unwrap();
        assert_eq!(f.to_json_line(), r#"{"n":4,"sets":[[1,2],[3]]}"#);
        assert_eq!(SetFamily::from_json_line(&f.to_json_line()).unwrap(), f);
        assert_eq!(f.to_string(), "{{1,2},{3}}");
        let err = read_families("\n{\"n\":4}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(2), .. }));
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
    }
}
