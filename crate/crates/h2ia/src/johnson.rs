//! The Johnson homomorphism via a degree-2 truncated Magnus expansion.
//!
//! Substituting `x_i -> 1 + X_i` (and `x_i^-1 -> 1 - X_i + X_i^2`) into
//! a free word and truncating at total degree 2 gives a multiplicative
//! expansion. For a word with zero exponent sums the quadratic part is
//! antisymmetric and descends to a vector `rho(w)` in the exterior
//! square. The Johnson homomorphism of an IA endomorphism `f` reads off
//! `rho(f(x_i) x_i^-1)` row by row, and on the distinguished generating
//! set those tables form a basis of the target, certified here by a
//! unimodular determinant.
//!
//! Coefficients use machine integers: a degree-2 coefficient of a word
//! of length L is bounded by L^2, far below overflow for any word this
//! crate produces.

use crate::alphabet::{magnus_generating_set, IAGen};
use crate::endo::{AbelMatrix, Endo};
use crate::matrix::IntMatrix;
use crate::words::FreeWord;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JohnsonError {
    #[error("word has nonzero exponent sum at x{0}, not a commutator word")]
    NotCommutatorWord(usize),
    #[error("endomorphism does not act trivially on the abelianization")]
    NotIA,
}

/// Truncated Magnus expansion `1 + linear + quadratic`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Deg2 {
    n: usize,
    linear: Vec<i64>,
    quad: Vec<i64>,
}

impl Deg2 {
    pub fn one(n: usize) -> Self {
        Deg2 {
            n,
            linear: vec![0; n],
            quad: vec![0; n * n],
        }
    }

    fn letter(n: usize, v: i32) -> Self {
        let mut d = Deg2::one(n);
        let i = (v.unsigned_abs() as usize) - 1;
        assert!(i < n, "letter x{} outside rank {}", v.abs(), n);
        if v > 0 {
            d.linear[i] = 1;
        } else {
            // 1 - X_i + X_i^2
            d.linear[i] = -1;
            d.quad[i * n + i] = 1;
        }
        d
    }

    /// Product truncated at degree 2.
    pub fn mul(&self, rhs: &Deg2) -> Deg2 {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Deg2::one(n);
        for i in 0..n {
            out.linear[i] = self.linear[i] + rhs.linear[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.quad[i * n + j] =
                    self.quad[i * n + j] + rhs.quad[i * n + j] + self.linear[i] * rhs.linear[j];
            }
        }
        out
    }

    pub fn expand2(w: &FreeWord, n: usize) -> Deg2 {
        let mut acc = Deg2::one(n);
        for &v in w.letters() {
            acc = acc.mul(&Deg2::letter(n, v));
        }
        acc
    }

    pub fn linear(&self) -> &[i64] {
        &self.linear
    }

    pub fn quad(&self, i: usize, j: usize) -> i64 {
        self.quad[(i - 1) * self.n + (j - 1)]
    }
}

/// Element of the exterior square, coordinates over `e_i ∧ e_j`, i < j.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Wedge2 {
    n: usize,
    coords: Vec<i64>,
}

impl Wedge2 {
    pub fn zero(n: usize) -> Self {
        Wedge2 {
            n,
            coords: vec![0; n * (n - 1) / 2],
        }
    }

    /// Position of the pair (i, j), 1-based with i < j, in lex order.
    pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= n);
        // Pairs (1,2)..(1,n), (2,3)..(2,n), ...
        (i - 1) * n - i * (i - 1) / 2 + (j - i) - 1
    }

    pub fn dim(n: usize) -> usize {
        n * (n - 1) / 2
    }

    /// `e_i ∧ e_j` for distinct i, j (antisymmetric in its arguments).
    pub fn wedge(n: usize, i: usize, j: usize) -> Self {
        let mut w = Wedge2::zero(n);
        w.add_wedge(i, j, 1);
        w
    }

    /// Adds `c · e_i ∧ e_j`.
    pub fn add_wedge(&mut self, i: usize, j: usize, c: i64) {
        assert!(i != j);
        if i < j {
            self.coords[Self::pair_index(self.n, i, j)] += c;
        } else {
            self.coords[Self::pair_index(self.n, j, i)] -= c;
        }
    }

    /// Coordinate at (i, j), antisymmetric in its arguments.
    pub fn coord(&self, i: usize, j: usize) -> i64 {
        if i < j {
            self.coords[Self::pair_index(self.n, i, j)]
        } else {
            -self.coords[Self::pair_index(self.n, j, i)]
        }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, rhs: &Wedge2) -> Wedge2 {
        assert_eq!(self.n, rhs.n);
        Wedge2 {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Wedge2 {
        Wedge2 {
            n: self.n,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Projection of a commutator word to the exterior square.
pub fn rho(w: &FreeWord, n: usize) -> Result<Wedge2, JohnsonError> {
    for i in 1..=n {
        if w.exponent_sum(i as i32) != 0 {
            return Err(JohnsonError::NotCommutatorWord(i));
        }
    }
    let d = Deg2::expand2(w, n);
    let mut out = Wedge2::zero(n);
    for i in 1..=n {
        // With zero linear part the quadratic matrix is antisymmetric;
        // anything else is an internal arithmetic fault.
        assert_eq!(d.quad(i, i), 0, "nonzero diagonal in quadratic part");
        for j in i + 1..=n {
            assert_eq!(
                d.quad(i, j),
                -d.quad(j, i),
                "quadratic part not antisymmetric"
            );
            out.add_wedge(i, j, d.quad(i, j));
        }
    }
    Ok(out)
}

/// The Johnson homomorphism of one endomorphism: row i is the image of
/// the i-th basis vector in the exterior square.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TauTable {
    n: usize,
    rows: Vec<Wedge2>,
}

impl TauTable {
    pub fn zero(n: usize) -> Self {
        TauTable {
            n,
            rows: vec![Wedge2::zero(n); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &Wedge2 {
        &self.rows[i - 1]
    }

    pub fn add(&self, rhs: &TauTable) -> TauTable {
        assert_eq!(self.n, rhs.n);
        TauTable {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Wedge2::is_zero)
    }

    /// Sparse rendering: (row, i, j, coefficient) per nonzero entry.
    pub fn sparse_entries(&self) -> Vec<(usize, usize, usize, i64)> {
        let mut out = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for i in 1..=self.n {
                for j in i + 1..=self.n {
                    let c = row.coord(i, j);
                    if c != 0 {
                        out.push((r + 1, i, j, c));
                    }
                }
            }
        }
        out
    }

    /// Flattened column vector: rows concatenated in basis order.
    pub fn flatten(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n * Wedge2::dim(self.n));
        for row in &self.rows {
            out.extend_from_slice(row.coords());
        }
        out
    }
}

pub fn tau(f: &Endo) -> Result<TauTable, JohnsonError> {
    if !f.is_ia() {
        return Err(JohnsonError::NotIA);
    }
    let n = f.rank();
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let moved = f.image(i).mul(&FreeWord::generator(-(i as i32)));
        rows.push(rho(&moved, n).expect("IA image has zero exponent defect"));
    }
    Ok(TauTable { n, rows })
}

/// Matrix whose columns are the flattened tau tables of the
/// distinguished generating set; square of size n·C(n,2).
pub fn tau_basis_matrix(n: usize) -> IntMatrix {
    let gens = magnus_generating_set(n);
    let dim = n * Wedge2::dim(n);
    assert_eq!(gens.len(), dim);
    let mut m = IntMatrix::zero(dim, dim);
    for (col, g) in gens.iter().enumerate() {
        let table = tau(&g.action(n)).expect("generators are IA");
        for (row, v) in table.flatten().into_iter().enumerate() {
            m.set(row, col, v.into());
        }
    }
    m
}

/// The formula-level tau table of a single generator, used to
/// cross-check the expansion-computed one.
pub fn tau_formula(g: &IAGen, n: usize) -> TauTable {
    let mut t = TauTable::zero(n);
    match *g {
        IAGen::Conj { a, b } => {
            // row a: e_b ∧ e_a, with the slot sign riding along.
            let row = &mut t.rows[(a - 1) as usize];
            row.add_wedge(b.unsigned_abs() as usize, a as usize, b.signum() as i64);
        }
        IAGen::CommTv { a, b, c } => {
            let row = &mut t.rows[(a.unsigned_abs() - 1) as usize];
            let sign = (a.signum() * b.signum() * c.signum()) as i64;
            row.add_wedge(b.unsigned_abs() as usize, c.unsigned_abs() as usize, sign);
        }
    }
    t
}

/// Transforms an exterior-square vector by a matrix: `e_i ∧ e_j` maps to
/// `(A e_i) ∧ (A e_j)`.
pub fn wedge_transform(a: &AbelMatrix, w: &Wedge2) -> Wedge2 {
    let n = a.size();
    let mut out = Wedge2::zero(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let c = w.coord(i, j);
            if c == 0 {
                continue;
            }
            for p in 1..=n {
                for q in p + 1..=n {
                    let minor = a.entry(p, i) * a.entry(q, j) - a.entry(p, j) * a.entry(q, i);
                    if minor != 0 {
                        out.add_wedge(p, q, c * minor);
                    }
                }
            }
        }
    }
    out
}

/// Natural action of an invertible abelianized matrix on a tau table:
/// precompose with the inverse on the source, postcompose with the
/// exterior square on the target. The caller supplies the inverse.
pub fn tau_transform(a: &AbelMatrix, a_inv: &AbelMatrix, t: &TauTable) -> TauTable {
    let n = t.n;
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let mut combined = Wedge2::zero(n);
        for k in 1..=n {
            let coeff = a_inv.entry(k, i);
            if coeff == 0 {
                continue;
            }
            for p in 1..=n {
                for q in p + 1..=n {
                    let c = t.row(k).coord(p, q);
                    if c != 0 {
                        combined.add_wedge(p, q, coeff * c);
                    }
                }
            }
        }
        rows.push(wedge_transform(a, &combined));
    }
    TauTable { n, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{aut_generating_set, AutGen, GenLetter, IAWord};
    use num_bigint::BigInt;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn w(letters: &[i32]) -> FreeWord {
        FreeWord::from_letters(letters.to_vec())
    }

    #[test]
    fn expansion_of_identity_and_single_letters() {
        let d = Deg2::expand2(&FreeWord::identity(), 3);
        assert_eq!(d, Deg2::one(3));
        let d = Deg2::expand2(&w(&[1]), 3);
        assert_eq!(d.linear(), &[1, 0, 0]);
        let d = Deg2::expand2(&w(&[-2]), 3);
        assert_eq!(d.linear(), &[0, -1, 0]);
        assert_eq!(d.quad(2, 2), 1);
    }

    #[test]
    fn expansion_is_multiplicative() {
        let u = w(&[1, -2, 3]);
        let v = w(&[2, 2, -1]);
        let product = Deg2::expand2(&u.mul(&v), 3);
        let factored = Deg2::expand2(&u, 3).mul(&Deg2::expand2(&v, 3));
        assert_eq!(product, factored);
    }

    #[test]
    fn rho_of_basic_commutator() {
        let c = FreeWord::commutator(&FreeWord::generator(1), &FreeWord::generator(2));
        let r = rho(&c, 3).unwrap();
        assert_eq!(r.coord(1, 2), 1);
        assert_eq!(r.coord(1, 3), 0);
        assert_eq!(r.coord(2, 3), 0);
    }

    #[test]
    fn rho_rejects_noncommutator_words() {
        assert_eq!(
            rho(&w(&[1, 2]), 3),
            Err(JohnsonError::NotCommutatorWord(1))
        );
    }

    #[test]
    fn rho_kills_triple_commutators() {
        let inner = FreeWord::commutator(&FreeWord::generator(2), &FreeWord::generator(3));
        let triple = FreeWord::commutator(&FreeWord::generator(1), &inner);
        assert!(rho(&triple, 3).unwrap().is_zero());
    }

    #[test]
    fn tau_of_conjugation_move_matches_formula() {
        let g = IAGen::conj(1, 2);
        let t = tau(&g.action(3)).unwrap();
        // row 1 = e_2 ∧ e_1 = -(e_1 ∧ e_2)
        assert_eq!(t.row(1).coord(2, 1), 1);
        assert!(t.row(2).is_zero());
        assert!(t.row(3).is_zero());
        assert_eq!(t, tau_formula(&g, 3));
    }

    #[test]
    fn tau_of_commutator_transvection_matches_formula() {
        let g = IAGen::commtv(1, 2, 3);
        let t = tau(&g.action(3)).unwrap();
        assert_eq!(t.row(1).coord(2, 3), 1);
        assert!(t.row(2).is_zero());
        assert_eq!(t, tau_formula(&g, 3));
    }

    #[test]
    fn tau_formula_agrees_on_all_letters_rank_four() {
        let n = 4;
        for a in 1..=n as i32 {
            for b in 1..=n as i32 {
                if a == b {
                    continue;
                }
                for s in [1, -1] {
                    let g = IAGen::conj(a, s * b);
                    assert_eq!(tau(&g.action(n)).unwrap(), tau_formula(&g, n), "{}", g);
                }
                for c in 1..=n as i32 {
                    if c == a || c == b {
                        continue;
                    }
                    for sa in [1, -1] {
                        for sb in [1, -1] {
                            for sc in [1, -1] {
                                let g = IAGen::commtv(sa * a, sb * b, sc * c);
                                assert_eq!(
                                    tau(&g.action(n)).unwrap(),
                                    tau_formula(&g, n),
                                    "{}",
                                    g
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tau_rejects_non_ia() {
        let f = AutGen::transv(1, 2).action(3);
        assert_eq!(tau(&f), Err(JohnsonError::NotIA));
    }

    #[test]
    fn tau_of_identity_is_zero() {
        assert!(tau(&Endo::identity(4)).unwrap().is_zero());
    }

    #[test]
    fn basis_matrix_is_signed_permutation() {
        // Independent structural oracle for the determinant: each column
        // has exactly one nonzero entry, equal to ±1, and the positions
        // biject with the rows.
        for n in [3, 4] {
            let m = tau_basis_matrix(n);
            let dim = n * Wedge2::dim(n);
            assert_eq!((m.rows(), m.cols()), (dim, dim));
            let mut seen = vec![false; dim];
            for col in 0..dim {
                let nonzero: Vec<usize> =
                    (0..dim).filter(|&r| !m.at(r, col).is_zero()).collect();
                assert_eq!(nonzero.len(), 1, "column {} not elementary", col);
                let r = nonzero[0];
                assert_eq!(m.at(r, col).magnitude().to_string(), "1");
                assert!(!seen[r], "row {} hit twice", r);
                seen[r] = true;
            }
            assert!(seen.iter().all(|&s| s));
            let det = m.det();
            assert!(
                det == BigInt::from(1) || det == BigInt::from(-1),
                "determinant {} is not unimodular",
                det
            );
        }
    }

    #[test]
    fn equivariance_under_ambient_conjugation() {
        let n = 4;
        let samples = [
            IAWord::from_letters(vec![IAGen::conj(1, 2), IAGen::commtv(3, 1, -4)]),
            IAWord::from_letters(vec![IAGen::commtv(2, -3, 1), IAGen::conj(4, -2)]),
        ];
        for s in aut_generating_set(n) {
            let a = s.action(n).abelianization();
            let a_inv = s.inverse().action(n).abelianization();
            for word in &samples {
                let f = word.eval(n);
                let conjugated = s
                    .action(n)
                    .compose(&f)
                    .compose(&s.inverse().action(n));
                let lhs = tau(&conjugated).unwrap();
                let rhs = tau_transform(&a, &a_inv, &tau(&f).unwrap());
                assert_eq!(lhs, rhs, "equivariance fails for s = {}", s);
            }
        }
    }

    proptest! {
        #[test]
        fn tau_is_additive(
            letters in proptest::collection::vec((0usize..2, 1i32..=4, 1i32..=4, 1i32..=4, proptest::bool::ANY, proptest::bool::ANY), 1..8),
            split in 0usize..8,
        ) {
            let n = 4;
            let gens: Vec<IAGen> = letters
                .iter()
                .filter_map(|&(kind, a, b, c, s1, s2)| {
                    let sb = if s1 { 1 } else { -1 };
                    let sc = if s2 { 1 } else { -1 };
                    if kind == 0 {
                        if a != b { Some(IAGen::conj(a, sb * b)) } else { None }
                    } else if a != b && b != c && a != c {
                        Some(IAGen::commtv(a, sb * b, sc * c))
                    } else {
                        None
                    }
                })
                .collect();
            prop_assume!(!gens.is_empty());
            let k = split.min(gens.len());
            let u = IAWord::from_letters(gens[..k].to_vec());
            let v = IAWord::from_letters(gens[k..].to_vec());
            let f = u.eval(n);
            let g = v.eval(n);
            let sum = tau(&f).unwrap().add(&tau(&g).unwrap());
            prop_assert_eq!(tau(&f.compose(&g)).unwrap(), sum);
        }

        #[test]
        fn rho_vanishes_on_sampled_triple_commutators(
            a in proptest::collection::vec(-4i32..=4, 1..5),
            b in proptest::collection::vec(-4i32..=4, 1..5),
            c in proptest::collection::vec(-4i32..=4, 1..5),
        ) {
            let clean = |v: &[i32]| FreeWord::from_letters(
                v.iter().copied().filter(|&x| x != 0).collect::<Vec<_>>()
            );
            let (u, v, t) = (clean(&a), clean(&b), clean(&c));
            let inner = FreeWord::commutator(&v, &t);
            let triple = FreeWord::commutator(&u, &inner);
            prop_assert!(rho(&triple, 4).unwrap().is_zero());
        }
    }
}
