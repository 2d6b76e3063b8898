//! Homology-side bookkeeping: exponent vectors of IA words, the
//! commutator-class membership test, formal H2 expressions with their
//! sign canonicalization, the labeled relation matrix with its kernel
//! lattice, and the stability relabeling check.
//!
//! A word over the IA alphabet represents a homology class of the
//! relation subgroup only if every generator has exponent sum zero.
//! Exponent counting uses the positive orientation for commutator
//! transvections (middle index less than last index); a reversed
//! occurrence counts as minus one of its flip.

use crate::alphabet::{GenLetter, IAGen, IAWord};
use crate::matrix::IntMatrix;
use crate::relations::{Builtin, RelInstance};
use crate::theta::relabel_ia_gen;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomlinError {
    #[error("matrix entry ({row}, {col}) computes to {got}, printed value is {want}")]
    MatrixMismatch {
        row: usize,
        col: usize,
        got: i64,
        want: i64,
    },
    #[error("relation word {0} does not evaluate to the identity")]
    NotARelator(usize),
}

/// Canonical orientation of a generator: conjugation moves with a
/// positive second slot, commutator transvections with middle index
/// less than last index. Returns the canonical key and the sign of the
/// original relative to it.
pub fn canonical_gen(g: &IAGen) -> (IAGen, i64) {
    match *g {
        IAGen::Conj { a, b } => {
            if b > 0 {
                (*g, 1)
            } else {
                (IAGen::conj(a, -b), -1)
            }
        }
        IAGen::CommTv { a, b, c } => {
            if b.abs() < c.abs() {
                (*g, 1)
            } else {
                (IAGen::commtv(a, c, b), -1)
            }
        }
    }
}

/// Exponent sums of an IA word over canonically oriented generators.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExpVector {
    counts: BTreeMap<IAGen, i64>,
}

impl ExpVector {
    pub fn of(w: &IAWord) -> ExpVector {
        let mut counts = BTreeMap::new();
        for g in w.letters() {
            let (key, sign) = canonical_gen(g);
            *counts.entry(key).or_insert(0) += sign;
        }
        counts.retain(|_, v| *v != 0);
        ExpVector { counts }
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, g: &IAGen) -> i64 {
        let (key, sign) = canonical_gen(g);
        sign * self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn add(&self, rhs: &ExpVector) -> ExpVector {
        let mut counts = self.counts.clone();
        for (k, v) in &rhs.counts {
            *counts.entry(*k).or_insert(0) += v;
        }
        counts.retain(|_, v| *v != 0);
        ExpVector { counts }
    }

    pub fn neg(&self) -> ExpVector {
        ExpVector {
            counts: self.counts.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IAGen, &i64)> {
        self.counts.iter()
    }
}

/// Whether the word lies in the commutator subgroup of the free group
/// on the IA alphabet: every generator's exponent sum vanishes.
pub fn is_commutator_class(w: &IAWord) -> bool {
    ExpVector::of(w).is_zero()
}

/// The eight commutator transvections on an ordered index triple,
/// numbered by sign pattern: index 0 is all positive, bit 0 flips the
/// head, bit 1 the middle, bit 2 the last slot.
pub fn labeled_transvections(a: i32, b: i32, c: i32) -> [IAGen; 8] {
    std::array::from_fn(|bits| {
        let sa = if bits & 1 != 0 { -1 } else { 1 };
        let sb = if bits & 2 != 0 { -1 } else { 1 };
        let sc = if bits & 4 != 0 { -1 } else { 1 };
        IAGen::commtv(sa * a, sb * b, sc * c)
    })
}

/// The sixteen labeled relation words tying those eight generators
/// together: eight conjugation relations followed by eight pairing
/// relations. The printed forms of words 3 to 6 order the two
/// transvections for the opposite composition convention; the variants
/// here transpose them, which leaves every exponent count unchanged.
pub fn labeled_relation_words(a: i32, b: i32, c: i32) -> [IAWord; 16] {
    let v = labeled_transvections(a, b, c);
    let cab = IAGen::conj(a, b);
    let cab_i = IAGen::conj(a, -b);
    let cac = IAGen::conj(a, c);
    let cac_i = IAGen::conj(a, -c);
    let conj_pair = |outer: IAGen, first: usize, second: usize| -> IAWord {
        IAWord::from_letters(vec![outer, v[first], outer.inverse(), v[second]])
    };
    let pair_rel = |first: usize, second: usize, x: IAGen, y: IAGen| -> IAWord {
        IAWord::from_letters(vec![v[first], v[second], x, y, x.inverse(), y.inverse()])
    };
    [
        conj_pair(cab, 0, 2),
        conj_pair(cab, 1, 3),
        conj_pair(cac_i, 4, 0),
        conj_pair(cac_i, 5, 1),
        conj_pair(cac_i, 6, 2),
        conj_pair(cac_i, 7, 3),
        conj_pair(cab, 4, 6),
        conj_pair(cab, 5, 7),
        pair_rel(0, 1, cab_i, cac_i),
        pair_rel(2, 3, cab, cac_i),
        pair_rel(4, 5, cab_i, cac),
        pair_rel(6, 7, cab, cac),
        pair_rel(1, 0, cab_i, cac_i),
        pair_rel(3, 2, cab, cac_i),
        pair_rel(5, 4, cab_i, cac),
        pair_rel(7, 6, cab, cac),
    ]
}

/// The printed exponent matrix the computed one must reproduce.
pub const LABELED_MATRIX_PRINT: [[i64; 16]; 8] = [
    [1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0],
    [0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1],
];

/// The nine published kernel generators, as coordinate rows over the
/// sixteen labeled relations.
pub fn published_kernel_vectors() -> IntMatrix {
    let mut rows = vec![vec![0i64; 16]; 9];
    let combos: [&[(usize, i64)]; 9] = [
        &[(1, 1), (3, -1), (5, -1), (7, 1)],
        &[(2, 1), (4, -1), (6, -1), (8, 1)],
        &[(1, -1), (2, -1), (13, 1), (14, 1)],
        &[(3, -1), (4, -1), (13, 1), (15, 1)],
        &[(1, 1), (2, 1), (5, -1), (6, -1), (13, -1), (12, 1)],
        &[(9, 1), (13, -1)],
        &[(10, 1), (14, -1)],
        &[(11, 1), (15, -1)],
        &[(12, 1), (16, -1)],
    ];
    for (row, combo) in combos.iter().enumerate() {
        for &(r, c) in *combo {
            rows[row][r - 1] = c;
        }
    }
    IntMatrix::from_i64_rows(&rows)
}

/// Exponent matrix of the sixteen labeled relations over the eight
/// labeled transvections, computed from the word definitions and
/// checked against the printed matrix entry by entry. Every relation
/// word is also required to evaluate to the identity.
pub fn build_labeled_matrix() -> Result<IntMatrix, HomlinError> {
    let (a, b, c) = (1, 2, 3);
    let v = labeled_transvections(a, b, c);
    let words = labeled_relation_words(a, b, c);
    let mut m = IntMatrix::zero(8, 16);
    for (j, word) in words.iter().enumerate() {
        if !word.evaluates_to_identity(3) {
            return Err(HomlinError::NotARelator(j + 1));
        }
        let exp = ExpVector::of(word);
        for (i, gen) in v.iter().enumerate() {
            let got = exp.count(gen);
            let want = LABELED_MATRIX_PRINT[i][j];
            if got != want {
                return Err(HomlinError::MatrixMismatch {
                    row: i + 1,
                    col: j + 1,
                    got,
                    want,
                });
            }
            m.set(i, j, got.into());
        }
    }
    Ok(m)
}

/// A formal integer combination of relation-family instances,
/// canonicalized by the stated sign symmetries: flipping the fourth
/// slot of an H1 or the fifth slot of an H3 negates, and swapping the
/// commutator pair of an H3 or an H6 negates.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct H2Expr {
    terms: BTreeMap<(Builtin, Vec<i32>), i64>,
}

/// Canonical form of one instance: returns the canonical parameter
/// vector and the sign picked up on the way.
pub fn canonical_instance(family: Builtin, params: &[i32]) -> (Vec<i32>, i64) {
    let mut p = params.to_vec();
    family.normalize(&mut p);
    let mut sign = 1i64;
    match family {
        Builtin::H1 => {
            if p[3] < 0 {
                p[3] = -p[3];
                sign = -sign;
            }
        }
        Builtin::H3 => {
            if p[4] < 0 {
                p[4] = -p[4];
                sign = -sign;
            }
            if p[1].abs() > p[2].abs() {
                p.swap(1, 2);
                sign = -sign;
            }
        }
        Builtin::H6 => {
            if p[1].abs() > p[2].abs() {
                p.swap(1, 2);
                sign = -sign;
            }
        }
        _ => {}
    }
    (p, sign)
}

impl H2Expr {
    pub fn zero() -> H2Expr {
        H2Expr::default()
    }

    pub fn term(family: Builtin, params: &[i32], coeff: i64) -> H2Expr {
        let mut e = H2Expr::zero();
        e.add_term(family, params, coeff);
        e
    }

    pub fn add_term(&mut self, family: Builtin, params: &[i32], coeff: i64) {
        if coeff == 0 {
            return;
        }
        let (p, sign) = canonical_instance(family, params);
        let key = (family, p);
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry += sign * coeff;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, rhs: &H2Expr) -> H2Expr {
        let mut out = self.clone();
        for ((f, p), c) in &rhs.terms {
            out.add_term(*f, p, *c);
        }
        out
    }

    pub fn neg(&self) -> H2Expr {
        H2Expr {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Builtin, &[i32], i64)> {
        self.terms.iter().map(|((f, p), c)| (*f, p.as_slice(), *c))
    }

    /// Termwise parameter relabeling by an odd index map (a permutation
    /// with sign flips), recanonicalized.
    pub fn relabel<F: Fn(i32) -> i32>(&self, f: F) -> H2Expr {
        let mut out = H2Expr::zero();
        for ((fam, p), c) in &self.terms {
            let q: Vec<i32> = p.iter().map(|&v| f(v)).collect();
            out.add_term(*fam, &q, *c);
        }
        out
    }
}

impl fmt::Display for H2Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((fam, p), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != 1 {
                write!(f, "{}*", c)?;
            }
            write!(f, "{}{:?}", fam, p)?;
        }
        Ok(())
    }
}

/// Outcome of the relabeling coverage scan over one rank.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    /// Rank the instances must compress into.
    pub rank: usize,
    /// Instances enumerated over one extra letter.
    pub total: u64,
    /// Instances that relabel into the smaller rank.
    pub covered: u64,
    /// An instance needing all n+1 letters, when one exists.
    pub witness: Option<RelInstance>,
}

impl StabilityReport {
    pub fn fully_covered(&self) -> bool {
        self.covered == self.total
    }
}

/// Checks that every H-family instance over n+1 letters is a relabel of
/// one over n letters, by counting distinct indices. Instances touching
/// at most n distinct indices compress by the order-preserving map onto
/// a dense range; any instance with n+1 distinct indices is reported as
/// a witness.
pub fn stability_orbit_check(n: usize) -> StabilityReport {
    use crate::relations::for_each_instance;
    let pool = (n + 1) as i32;
    let mut total = 0u64;
    let mut covered = 0u64;
    let mut witness = None;
    for fam in Builtin::H_FAMILIES {
        for_each_instance(fam, pool, |params| {
            total += 1;
            let mut idx: Vec<i32> = params.iter().map(|p| p.abs()).collect();
            idx.sort_unstable();
            idx.dedup();
            if idx.len() <= n {
                covered += 1;
            } else if witness.is_none() {
                witness = Some(RelInstance::builtin(fam, params));
            }
        });
    }
    StabilityReport {
        rank: n,
        total,
        covered,
        witness,
    }
}

/// Compresses an instance onto the dense index range 1..k, preserving
/// index order and signs. Returns the relabeled parameters.
pub fn compress_instance(params: &[i32]) -> Vec<i32> {
    let mut idx: Vec<i32> = params.iter().map(|p| p.abs()).collect();
    idx.sort_unstable();
    idx.dedup();
    params
        .iter()
        .map(|&p| {
            let j = idx.binary_search(&p.abs()).unwrap() as i32 + 1;
            p.signum() * j
        })
        .collect()
}

/// The relabeling on words matching [`compress_instance`] on instances.
pub fn compress_word(w: &IAWord, params: &[i32]) -> IAWord {
    let mut idx: Vec<i32> = params.iter().map(|p| p.abs()).collect();
    idx.sort_unstable();
    idx.dedup();
    IAWord::from_letters(
        w.letters()
            .iter()
            .map(|g| {
                relabel_ia_gen(g, |v| {
                    let j = idx.binary_search(&v.abs()).unwrap() as i32 + 1;
                    v.signum() * j
                })
            })
            .collect::<Vec<_>>(),
    )
}

/// Convenience: the kernel of the labeled matrix together with the HNF
/// of the span of the published vectors, for the lattice equality
/// check.
pub fn kernel_comparison() -> Result<(IntMatrix, IntMatrix), HomlinError> {
    let m = build_labeled_matrix()?;
    let computed = m.kernel();
    let published = published_kernel_vectors().hnf();
    Ok((computed, published))
}

/// Checks `M v = 0` for each published vector.
pub fn published_vectors_annihilate(m: &IntMatrix) -> bool {
    let published = published_kernel_vectors();
    (0..published.rows()).all(|r| {
        let v = published.row(r).to_vec();
        m.mul_vec(&v).iter().all(Zero::is_zero)
    })
}
