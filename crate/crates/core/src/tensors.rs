//! The 2-tensors behind the triangular slice-rank arguments, built as
//! explicit matrices and certified for triangularity and rank.
//!
//! * [`snevily_matrix`]: `T'(X, Y) = ∏_{l ∈ L} (x_1 + Σ_{j≥2} x_j y_j − l)`
//!   over `GF(p)`, rows and columns in lex order.
//! * [`liu_matrix`]: the same product with `x` from the lower family and `y`
//!   from the upper family, over the integers.
//! * [`frankl_wilson_matrix`]: `T(X, Y) = ∏_{l ∈ L} (|X ∩ Y| − l + δ(l, |Y|))`
//!   over the integers, rows and columns ordered by size.
//! * [`slice_decompose`]: expansion of `∏_i (⟨x, y⟩ + f_i(x))` into
//!   monomials `y_S`, `|S| ≤ l`, each one a rank-one slice.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::family::{Prime, SetFamily};
use crate::linalg::{
    natural_order, rank_exact, rank_mod_p, triangularity, ExactMatrix, ResidueMatrix,
    TriangularityCertificate,
};
use crate::profile::{verify_liu_config, LiuConfiguration};

/// A built tensor with its structural certificate.
#[derive(Clone, Debug)]
pub struct ProofTensor<M> {
    pub matrix: M,
    pub certificate: TriangularityCertificate,
    /// Hypotheses that failed; only non-empty for forced builds.
    pub failed_hypotheses: Vec<String>,
}

impl ProofTensor<ResidueMatrix> {
    pub fn rank(&self) -> usize {
        rank_mod_p(&self.matrix)
    }
}

impl ProofTensor<ExactMatrix> {
    pub fn rank(&self) -> usize {
        rank_exact(&self.matrix)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Build even if the family violates the theorem's hypotheses.
    pub force: bool,
}

#[inline]
fn first_bit(n: usize) -> u64 {
    1u64 << (n - 1)
}

/// Sizes mod `p` must avoid `L` and pairwise meets mod `p` must lie in `L`.
fn snevily_hypotheses(family: &SetFamily, l: &BTreeSet<u64>, p: Prime) -> Vec<String> {
    let mut out = Vec::new();
    let m = family.members();
    for (i, a) in m.iter().enumerate() {
        let r = p.reduce(a.len() as u64);
        if l.contains(&r) {
            out.push(format!("member {} = {a} has size ≡ {r} (mod {p}) in L", i + 1));
        }
    }
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let r = p.reduce(u64::from((m[i].bits() & m[j].bits()).count_ones()));
            if !l.contains(&r) {
                out.push(format!(
                    "members {} and {} meet in ≡ {r} (mod {p}), not in L",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    out
}

fn reduce_l(l: &BTreeSet<u64>, p: Prime) -> Result<Vec<i64>> {
    if l.is_empty() {
        return Err(Error::Parameter("L must be nonempty".into()));
    }
    l.iter()
        .map(|&v| {
            if v >= u64::from(p.get()) {
                Err(Error::Parameter(format!("residue {v} is not below {p}")))
            } else {
                Ok(v as i64)
            }
        })
        .collect()
}

fn hypothesis_error(failures: &[String]) -> Error {
    Error::Hypothesis(failures[0].clone())
}

/// Rows and columns indexed by the members of `family`, which must be
/// strictly ascending in lex order.
pub fn snevily_matrix(
    family: &SetFamily,
    l: &BTreeSet<u64>,
    p: Prime,
    opts: BuildOptions,
) -> Result<ProofTensor<ResidueMatrix>> {
    if !family.is_lex_sorted() {
        return Err(Error::Order("family is not sorted ascending in lex order".into()));
    }
    let ls = reduce_l(l, p)?;
    let failed = snevily_hypotheses(family, l, p);
    if !failed.is_empty() && !opts.force {
        return Err(hypothesis_error(&failed));
    }
    let n = family.ground().get();
    let top = first_bit(n);
    let bits = family.bits();
    let matrix = ResidueMatrix::from_fn(p, bits.len(), |r, c| {
        let (x, y) = (bits[r], bits[c]);
        let x1 = i64::from(x & top != 0);
        let rest = i64::from((x & y & !top).count_ones());
        let q = i64::from(p.get());
        ls.iter().fold(1i64, |acc, &li| acc * (x1 + rest - li).rem_euclid(q) % q)
    });
    let certificate = triangularity(&matrix, &natural_order(bits.len()))?;
    Ok(ProofTensor {
        matrix,
        certificate,
        failed_hypotheses: failed,
    })
}

/// The untruncated product `∏_{l ∈ L} (|X ∩ Y| − l)` over `GF(p)`, in the
/// family's own order. Diagonal with nonzero diagonal for valid families.
pub fn snevily_full_matrix(family: &SetFamily, l: &BTreeSet<u64>, p: Prime) -> Result<ResidueMatrix> {
    let ls = reduce_l(l, p)?;
    let bits = family.bits();
    let q = i64::from(p.get());
    Ok(ResidueMatrix::from_fn(p, bits.len(), |r, c| {
        let meet = i64::from((bits[r] & bits[c]).count_ones());
        ls.iter().fold(1i64, |acc, &li| acc * (meet - li).rem_euclid(q) % q)
    }))
}

/// Rows and columns indexed by `family`, which must be sorted by size
/// (ascending, ties in any fixed order). Every pairwise meet must lie in `L`.
pub fn frankl_wilson_matrix(
    family: &SetFamily,
    l: &BTreeSet<u64>,
    opts: BuildOptions,
) -> Result<ProofTensor<ExactMatrix>> {
    if l.is_empty() {
        return Err(Error::Parameter("L must be nonempty".into()));
    }
    if family.members().windows(2).any(|w| w[0].len() > w[1].len()) {
        return Err(Error::Order("family is not sorted by size".into()));
    }
    let bits = family.bits();
    let mut failed = Vec::new();
    for i in 0..bits.len() {
        for j in i + 1..bits.len() {
            let meet = u64::from((bits[i] & bits[j]).count_ones());
            if !l.contains(&meet) {
                failed.push(format!(
                    "members {} and {} meet in {meet}, not in L",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    if !failed.is_empty() && !opts.force {
        return Err(hypothesis_error(&failed));
    }
    let ls: Vec<i64> = l.iter().map(|&v| v as i64).collect();
    let matrix = ExactMatrix::from_fn(bits.len(), |r, c| {
        let meet = i64::from((bits[r] & bits[c]).count_ones());
        let col_size = i64::from(bits[c].count_ones());
        let mut acc = BigInt::one();
        for &li in &ls {
            // δ(l_i, |Y|) sits inside each factor.
            let delta = i64::from(li == col_size);
            acc *= BigInt::from(meet - li + delta);
        }
        BigRational::from_integer(acc)
    });
    let certificate = triangularity(&matrix, &natural_order(bits.len()))?;
    Ok(ProofTensor {
        matrix,
        certificate,
        failed_hypotheses: failed,
    })
}

/// Rows from the lower family, columns from the upper family; the lower
/// family must be lex-ascending (the upper one permuted in tandem).
pub fn liu_matrix(cfg: &LiuConfiguration, opts: BuildOptions) -> Result<ProofTensor<ExactMatrix>> {
    if !cfg.lower().is_lex_sorted() {
        return Err(Error::Order("lower family is not sorted ascending in lex order".into()));
    }
    if cfg.l().is_empty() {
        return Err(Error::Parameter("L must be nonempty".into()));
    }
    let report = verify_liu_config(cfg);
    let failed: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    if !failed.is_empty() && !opts.force {
        return Err(hypothesis_error(&failed));
    }
    let n = cfg.lower().ground().get();
    let top = first_bit(n);
    let a = cfg.lower().bits();
    let b = cfg.upper().bits();
    let ls: Vec<i64> = cfg.l().iter().map(|&v| v as i64).collect();
    let matrix = ExactMatrix::from_fn(a.len(), |r, s| {
        let x1 = i64::from(a[r] & top != 0);
        let rest = i64::from((a[r] & b[s] & !top).count_ones());
        let mut acc = BigInt::one();
        for &li in &ls {
            acc *= BigInt::from(x1 + rest - li);
        }
        BigRational::from_integer(acc)
    });
    let certificate = triangularity(&matrix, &natural_order(a.len()))?;
    Ok(ProofTensor {
        matrix,
        certificate,
        failed_hypotheses: failed,
    })
}

/// One rank-one slice: `coefficients[x] · y_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceTerm {
    /// Bit mask of `S` over coordinates `0..m`.
    pub monomial: u64,
    /// `g_S` evaluated at each row object, in row order.
    pub coefficients: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceDecomposition {
    pub l: usize,
    pub m: usize,
    /// Row objects as `{0,1}` vectors, coordinate `j` at bit `j`.
    pub rows: Vec<u64>,
    pub terms: Vec<SliceTerm>,
}

impl SliceDecomposition {
    /// `Σ_S g_S(x_row) · y_S` at a `{0,1}` vector `y`.
    pub fn evaluate(&self, row: usize, y: u64) -> i64 {
        self.terms
            .iter()
            .filter(|t| t.monomial & !y == 0)
            .map(|t| t.coefficients[row])
            .sum()
    }

    /// `Σ_{i=0}^{l} C(m, i)`, the number of monomials of degree at most `l`.
    pub fn term_bound(&self) -> u128 {
        let mut total = 0u128;
        let mut c = 1u128;
        for i in 0..=self.l.min(self.m) {
            total += c;
            c = c * (self.m - i) as u128 / (i + 1) as u128;
        }
        total
    }
}

/// Expands `∏_{i=1}^{l} (⟨x, y⟩ + f_i(x))` over row objects `rows`, using
/// `y_j^2 = y_j`. `shifts[i][r]` is `f_i` at row `r`. Monomials whose
/// coefficient vanishes on every row are dropped.
pub fn slice_decompose(
    l: usize,
    m: usize,
    rows: &[u64],
    shifts: &[Vec<i64>],
) -> Result<SliceDecomposition> {
    if l > m {
        return Err(Error::Parameter(format!(
            "product length {l} exceeds dimension {m}"
        )));
    }
    if m > 63 {
        return Err(Error::Parameter(format!("dimension {m} too large")));
    }
    if shifts.len() != l {
        return Err(Error::Parameter(format!(
            "expected {l} shift tables, got {}",
            shifts.len()
        )));
    }
    let mask = crate::family::full_mask(m);
    if let Some(bad) = shifts.iter().position(|s| s.len() != rows.len()) {
        return Err(Error::Parameter(format!(
            "shift table {} does not cover all {} row objects",
            bad + 1,
            rows.len()
        )));
    }
    if rows.iter().any(|r| r & !mask != 0) {
        return Err(Error::Parameter("row object has coordinates beyond m".into()));
    }
    let overflow = || Error::Parameter("coefficient overflow during expansion".into());

    let per_row: Vec<Result<BTreeMap<u64, i64>>> = crate::par::map_range(rows.len(), |r| {
        let x = rows[r];
        let mut poly: BTreeMap<u64, i64> = BTreeMap::from([(0, 1)]);
        for shift in shifts {
            let f = shift[r];
            let mut next: BTreeMap<u64, i64> = BTreeMap::new();
            for (&s, &c) in &poly {
                if f != 0 {
                    let e = next.entry(s).or_insert(0);
                    *e = e.checked_add(c.checked_mul(f).ok_or_else(overflow)?).ok_or_else(overflow)?;
                }
                let mut coords = x;
                while coords != 0 {
                    let j = coords & coords.wrapping_neg();
                    coords ^= j;
                    let e = next.entry(s | j).or_insert(0);
                    *e = e.checked_add(c).ok_or_else(overflow)?;
                }
            }
            next.retain(|_, c| *c != 0);
            poly = next;
        }
        Ok(poly)
    });
    let mut tables: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
    for (r, poly) in per_row.into_iter().enumerate() {
        for (s, c) in poly? {
            tables.entry(s).or_insert_with(|| vec![0; rows.len()])[r] = c;
        }
    }
    let mut terms: Vec<SliceTerm> = tables
        .into_iter()
        .map(|(monomial, coefficients)| SliceTerm {
            monomial,
            coefficients,
        })
        .collect();
    terms.sort_by_key(|t| (t.monomial.count_ones(), t.monomial));
    Ok(SliceDecomposition {
        l,
        m,
        rows: rows.to_vec(),
        terms,
    })
}

/// Direct evaluation of `∏_i (⟨x, y⟩ + f_i(x))`.
pub fn product_tensor(x: u64, y: u64, row_shifts: impl IntoIterator<Item = i64>) -> i64 {
    let ip = i64::from((x & y).count_ones());
    row_shifts.into_iter().map(|f| ip + f).product()
}
