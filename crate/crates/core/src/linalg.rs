//! Exact dense square matrices over `GF(p)` and over the rationals.
//!
//! Rank over `GF(p)` is plain Gauss–Jordan with inverses by Fermat; rank
//! over `Q` clears denominators row by row and runs fraction-free (Bareiss)
//! elimination on big integers, so every intermediate is an exact minor.

use std::fmt;
use std::io::BufRead;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Prime;

/// Read-only view used by [`triangularity`].
pub trait SquareMatrix {
    fn dim(&self) -> usize;
    fn is_zero_at(&self, row: usize, col: usize) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMatrix {
    p: Prime,
    dim: usize,
    entries: Vec<u32>,
}

impl ResidueMatrix {
    /// Entries are reduced mod `p`. `rows` must be square.
    pub fn new(p: Prime, rows: Vec<Vec<u64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Parameter(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            entries.extend(row.into_iter().map(|v| p.reduce(v) as u32));
        }
        Ok(ResidueMatrix { p, dim, entries })
    }

    /// Builds from a function of `(row, col)`; `f` may return any `i64`.
    pub fn from_fn(p: Prime, dim: usize, f: impl Fn(usize, usize) -> i64 + Sync + Send) -> Self {
        let q = i64::from(p.get());
        let rows = crate::par::map_range(dim, |r| {
            (0..dim)
                .map(|c| f(r, c).rem_euclid(q) as u32)
                .collect::<Vec<_>>()
        });
        ResidueMatrix {
            p,
            dim,
            entries: rows.concat(),
        }
    }

    pub fn identity(p: Prime, dim: usize) -> Self {
        Self::from_fn(p, dim, |r, c| i64::from(r == c))
    }

    #[inline]
    pub fn modulus(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.dim.max(1)).map(<[u32]>::to_vec).take(self.dim).collect()
    }

    /// Copy with rows and columns permuted: entry `(i, j)` of the result is
    /// entry `(rows[i], cols[j])` of `self`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.p, self.dim, |i, j| i64::from(self.get(rows[i], cols[j])))
    }
}

impl SquareMatrix for ResidueMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_zero_at(&self, row: usize, col: usize) -> bool {
        self.get(row, col) == 0
    }
}

/// Debug dump: a dimension line, then one line of space-separated residues per row.
impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Parameter(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(ExactMatrix { dim, entries })
    }

    pub fn from_integers(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(|v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> BigRational + Sync + Send) -> Self {
        let rows = crate::par::map_range(dim, |r| (0..dim).map(|c| f(r, c)).collect::<Vec<_>>());
        ExactMatrix {
            dim,
            entries: rows.concat(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| {
            if r == c {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.dim + col]
    }

    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl SquareMatrix for ExactMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_zero_at(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_zero()
    }
}

/// Debug dump: a dimension line, then rows of `num/den` entries.
impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let v = self.get(r, c);
                    format!("{}/{}", v.numer(), v.denom())
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn parse_rational(tok: &str) -> Result<BigRational> {
    let bad = || Error::parse(format!("bad matrix entry `{tok}`"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

fn read_dump(reader: impl BufRead) -> Result<Vec<Vec<String>>> {
    let mut lines = reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
    let (_, header) = lines.next().ok_or_else(|| Error::parse("empty matrix dump"))?;
    let header = header?;
    let dim: usize = header
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(format!("bad dimension header `{header}`")).at_line(1))?;
    let mut rows = Vec::with_capacity(dim);
    for (i, line) in lines {
        let row: Vec<String> = line?.split_whitespace().map(str::to_owned).collect();
        if row.len() != dim {
            return Err(Error::parse(format!("expected {dim} entries, found {}", row.len())).at_line(i + 1));
        }
        rows.push(row);
    }
    if rows.len() != dim {
        return Err(Error::parse(format!("expected {dim} rows, found {}", rows.len())));
    }
    Ok(rows)
}

/// Parses the dump format. Integer entries may be negative; they are reduced mod `p`.
pub fn read_residue_matrix(reader: impl BufRead, p: Prime) -> Result<ResidueMatrix> {
    let rows = read_dump(reader)?;
    let q = i64::from(p.get());
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|t| {
                    t.parse::<i64>()
                        .map(|v| v.rem_euclid(q) as u64)
                        .map_err(|_| Error::parse(format!("bad residue `{t}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ResidueMatrix::new(p, rows)
}

/// Parses the dump format with `num/den` or integer entries.
pub fn read_exact_matrix(reader: impl BufRead) -> Result<ExactMatrix> {
    let rows = read_dump(reader)?;
    let rows = rows
        .into_iter()
        .map(|r| r.iter().map(|t| parse_rational(t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ExactMatrix::new(rows)
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Rank over `GF(p)`.
pub fn rank_mod_p(m: &ResidueMatrix) -> usize {
    let p = u64::from(m.p.get());
    let dim = m.dim;
    let mut a: Vec<u64> = m.entries.iter().map(|&v| u64::from(v)).collect();
    let mut rank = 0;
    for col in 0..dim {
        let Some(piv) = (rank..dim).find(|&r| a[r * dim + col] != 0) else {
            continue;
        };
        if piv != rank {
            for c in 0..dim {
                a.swap(piv * dim + c, rank * dim + c);
            }
        }
        let inv = pow_mod(a[rank * dim + col], p - 2, p);
        for c in col..dim {
            a[rank * dim + c] = a[rank * dim + c] * inv % p;
        }
        for r in rank + 1..dim {
            let factor = a[r * dim + col];
            if factor == 0 {
                continue;
            }
            for c in col..dim {
                let sub = factor * a[rank * dim + c] % p;
                a[r * dim + c] = (a[r * dim + c] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over `Q`.
pub fn rank_exact(m: &ExactMatrix) -> usize {
    let dim = m.dim;
    // Scale each row by the lcm of its denominators; rank is unchanged.
    let mut a: Vec<BigInt> = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        let row = &m.entries[r * dim..(r + 1) * dim];
        let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        a.extend(row.iter().map(|v| v.numer() * (&lcm / v.denom())));
    }
    bareiss_rank(&mut a, dim)
}

/// Fraction-free elimination on a `dim × dim` integer matrix in place.
pub(crate) fn bareiss_rank(a: &mut [BigInt], dim: usize) -> usize {
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..dim {
        let Some(piv) = (rank..dim).find(|&r| !a[r * dim + col].is_zero()) else {
            continue;
        };
        if piv != rank {
            for c in 0..dim {
                a.swap(piv * dim + c, rank * dim + c);
            }
        }
        let pivot = a[rank * dim + col].clone();
        for r in rank + 1..dim {
            let lead = a[r * dim + col].clone();
            for c in col + 1..dim {
                let v = &pivot * &a[r * dim + c] - &lead * &a[rank * dim + c];
                debug_assert!((&v % &prev).is_zero());
                a[r * dim + c] = v / &prev;
            }
            a[r * dim + col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangularShape {
    LowerTriangular,
    UpperTriangular,
    Diagonal,
    None,
}

/// Structure of a square matrix relative to a total order on its indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangularityCertificate {
    pub shape: TriangularShape,
    pub diagonal_all_nonzero: bool,
    /// First nonzero `(row, col)` with `row` before `col`; its presence
    /// rules out lower-triangularity.
    pub lower_violation: Option<(usize, usize)>,
    /// First nonzero `(row, col)` with `row` after `col`.
    pub upper_violation: Option<(usize, usize)>,
}

impl TriangularityCertificate {
    /// An offending entry whenever the shape is not diagonal; always present
    /// for [`TriangularShape::None`].
    pub fn witness(&self) -> Option<(usize, usize)> {
        self.lower_violation.or(self.upper_violation)
    }

    pub fn is_lower(&self) -> bool {
        matches!(self.shape, TriangularShape::LowerTriangular | TriangularShape::Diagonal)
    }

    pub fn is_upper(&self) -> bool {
        matches!(self.shape, TriangularShape::UpperTriangular | TriangularShape::Diagonal)
    }

    /// Triangular (either way) with nonzero diagonal, hence full rank.
    pub fn certifies_full_rank(&self) -> bool {
        self.shape != TriangularShape::None && self.diagonal_all_nonzero
    }
}

/// `order[i]` is the position of index `i` in the total order. The matrix
/// is lower-triangular when every entry with `order[row] < order[col]` is
/// zero, upper-triangular when every entry with `order[row] > order[col]` is.
pub fn triangularity<M: SquareMatrix + ?Sized>(
    m: &M,
    order: &[usize],
) -> Result<TriangularityCertificate> {
    let dim = m.dim();
    if order.len() != dim {
        return Err(Error::Parameter(format!(
            "order has {} entries for a {dim}×{dim} matrix",
            order.len()
        )));
    }
    let mut seen = vec![false; dim];
    for &o in order {
        if o >= dim || std::mem::replace(&mut seen[o], true) {
            return Err(Error::Parameter("order is not a permutation".into()));
        }
    }
    // Walk in order-position space so "first" violation is well defined.
    let mut by_pos = vec![0usize; dim];
    for (i, &o) in order.iter().enumerate() {
        by_pos[o] = i;
    }
    let mut lower_violation = None;
    let mut upper_violation = None;
    for (pu, &u) in by_pos.iter().enumerate() {
        for (pv, &v) in by_pos.iter().enumerate() {
            if pu == pv || m.is_zero_at(u, v) {
                continue;
            }
            if pu < pv {
                lower_violation.get_or_insert((u, v));
            } else {
                upper_violation.get_or_insert((u, v));
            }
        }
        if lower_violation.is_some() && upper_violation.is_some() {
            break;
        }
    }
    let shape = match (lower_violation.is_none(), upper_violation.is_none()) {
        (true, true) => TriangularShape::Diagonal,
        (true, false) => TriangularShape::LowerTriangular,
        (false, true) => TriangularShape::UpperTriangular,
        (false, false) => TriangularShape::None,
    };
    let diagonal_all_nonzero = (0..dim).all(|i| !m.is_zero_at(i, i));
    Ok(TriangularityCertificate {
        shape,
        diagonal_all_nonzero,
        lower_violation,
        upper_violation,
    })
}

/// The identity order `0, 1, ..., dim - 1`.
pub fn natural_order(dim: usize) -> Vec<usize> {
    (0..dim).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    fn res(pr: u32, rows: &[&[u64]]) -> ResidueMatrix {
        ResidueMatrix::new(p(pr), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn ex(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_integers(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rank_mod_p_examples() {
        assert_eq!(rank_mod_p(&ResidueMatrix::identity(p(2), 3)), 3);
        assert_eq!(rank_mod_p(&res(2, &[&[1, 1], &[1, 1]])), 1);
        assert_eq!(rank_mod_p(&res(3, &[&[0, 0], &[0, 0]])), 0);
        // rank depends on the field: det = 2
        let m = [&[1u64, 1][..], &[1, 3]];
        assert_eq!(rank_mod_p(&res(2, &m)), 1);
        assert_eq!(rank_mod_p(&res(3, &m)), 2);
        assert_eq!(rank_mod_p(&ResidueMatrix::identity(p(2), 0)), 0);
    }

    #[test]
    fn rank_exact_examples() {
        assert_eq!(rank_exact(&ExactMatrix::identity(3)), 3);
        assert_eq!(rank_exact(&ex(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_exact(&ex(&[&[0, 1], &[1, 0]])), 2);
        let half = BigRational::new(1.into(), 2.into());
        let m = ExactMatrix::new(vec![
            vec![half.clone(), BigRational::one()],
            vec![BigRational::one(), BigRational::from_integer(2.into())],
        ])
        .unwrap();
        assert_eq!(rank_exact(&m), 1);
        // needs a skipped column in the middle
        assert_eq!(rank_exact(&ex(&[&[1, 2, 3], &[2, 4, 7], &[3, 6, 10]])), 2);
    }

    #[test]
    fn triangularity_examples() {
        let id = ResidueMatrix::identity(p(5), 3);
        let c = triangularity(&id, &[2, 0, 1]).unwrap();
        assert_eq!(c.shape, TriangularShape::Diagonal);
        assert!(c.diagonal_all_nonzero);
        assert_eq!(c.witness(), None);

        let lower = ex(&[&[1, 0], &[5, 1]]);
        let c = triangularity(&lower, &natural_order(2)).unwrap();
        assert_eq!(c.shape, TriangularShape::LowerTriangular);
        assert!(c.diagonal_all_nonzero);

        let upper = ex(&[&[1, 2], &[0, 1]]);
        let c = triangularity(&upper, &natural_order(2)).unwrap();
        assert_eq!(c.shape, TriangularShape::UpperTriangular);
        assert_eq!(c.lower_violation, Some((0, 1)));
        assert_eq!(c.upper_violation, None);
        // reversing the order flips the shape
        let c = triangularity(&upper, &[1, 0]).unwrap();
        assert_eq!(c.shape, TriangularShape::LowerTriangular);

        let full = ex(&[&[1, 2], &[3, 0]]);
        let c = triangularity(&full, &natural_order(2)).unwrap();
        assert_eq!(c.shape, TriangularShape::None);
        assert!(c.witness().is_some());
        assert!(!c.diagonal_all_nonzero);

        assert!(triangularity(&full, &[0, 0]).is_err());
        assert!(triangularity(&full, &[0]).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let m = res(5, &[&[1, 4], &[0, 3]]);
        let text = m.to_string();
        assert_eq!(text, "2\n1 4\n0 3\n");
        assert_eq!(read_residue_matrix(text.as_bytes(), p(5)).unwrap(), m);

        let e = ExactMatrix::new(vec![
            vec![BigRational::new((-3).into(), 4.into()), BigRational::zero()],
            vec![BigRational::one(), BigRational::from_integer(7.into())],
        ])
        .unwrap();
        let text = e.to_string();
        assert_eq!(text, "2\n-3/4 0/1\n1/1 7/1\n");
        assert_eq!(read_exact_matrix(text.as_bytes()).unwrap(), e);
        assert!(read_exact_matrix("2\n1 2\n".as_bytes()).is_err());
        assert!(read_exact_matrix("2\n1 2\n3\n".as_bytes()).is_err());
    }
}
