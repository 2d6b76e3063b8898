//! Generator alphabets for the IA-group and for the ambient automorphism
//! group, and words over them.
//!
//! IA generators come in two kinds, each acting on the free group with
//! basis `x_1, x_2, ...`:
//!
//! * `C[a, b]` (conjugation move): `x_a -> x_b^s x_a x_b^-s` where `s` is
//!   the sign of `b`; every other basis element is fixed. The first slot
//!   ignores sign and is stored positive.
//! * `Mc[a, b, c]` (commutator transvection): for positive `a` it sends
//!   `x_a -> [x_b, x_c] x_a`, and for negative `a` it sends
//!   `x_|a| -> x_|a| [x_b, x_c]^-1`, where each slot is a signed letter
//!   and `[u, v] = u v u^-1 v^-1`.
//!
//! Ambient generators:
//!
//! * `M[a, b]` (transvection): for positive `a`, `x_a -> x_b^s x_a`; for
//!   negative `a`, `x_|a| -> x_|a| x_b^-s`, with `s` the sign of `b`.
//! * `P[a, b]` (swap): exchanges `x_a` and `x_b`.
//! * `I[a]` (inversion): `x_a -> x_a^-1`.
//!
//! Letter inverses are again letters: `C[a,b]^-1 = C[a,-b]`,
//! `Mc[a,b,c]^-1 = Mc[a,c,b]`, `M[a,b]^-1 = M[a,-b]`, and swaps and
//! inversions are involutions. Words over either alphabet reduce eagerly
//! under this involution. Evaluation composes letter actions right to
//! left: `eval([g1, g2, ..., gk]) = act(g1) ∘ act(g2) ∘ ... ∘ act(gk)`.

use crate::endo::Endo;
use crate::words::FreeWord;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Validation failure for a generator entry.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("zero index in generator {0}")]
    ZeroIndex(String),
    #[error("repeated index in generator {0}")]
    RepeatedIndex(String),
}

/// A generator of the IA-group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawIAGen", into = "RawIAGen")]
pub enum IAGen {
    /// `C[a, b]`: conjugate `x_a` by `x_b^sign(b)`. Invariant: `a >= 1`,
    /// `b != 0`, `a != |b|`.
    Conj { a: i32, b: i32 },
    /// `Mc[a, b, c]`: multiply `x_a^sign(a)` on the left by
    /// `[x_b, x_c]` (signed letters). Invariant: all nonzero, indices
    /// pairwise distinct.
    CommTv { a: i32, b: i32, c: i32 },
}

impl IAGen {
    /// Conjugation move; the sign of `a` is immaterial and is dropped.
    pub fn conj(a: i32, b: i32) -> Self {
        Self::try_conj(a, b).unwrap()
    }

    pub fn try_conj(a: i32, b: i32) -> Result<Self, GenError> {
        let desc = || format!("C[{},{}]", a, b);
        if a == 0 || b == 0 {
            return Err(GenError::ZeroIndex(desc()));
        }
        if a.abs() == b.abs() {
            return Err(GenError::RepeatedIndex(desc()));
        }
        Ok(IAGen::Conj { a: a.abs(), b })
    }

    /// Commutator transvection with all three slots signed.
    pub fn commtv(a: i32, b: i32, c: i32) -> Self {
        Self::try_commtv(a, b, c).unwrap()
    }

    pub fn try_commtv(a: i32, b: i32, c: i32) -> Result<Self, GenError> {
        let desc = || format!("Mc[{},{},{}]", a, b, c);
        if a == 0 || b == 0 || c == 0 {
            return Err(GenError::ZeroIndex(desc()));
        }
        if a.abs() == b.abs() || a.abs() == c.abs() || b.abs() == c.abs() {
            return Err(GenError::RepeatedIndex(desc()));
        }
        Ok(IAGen::CommTv { a, b, c })
    }

    /// Largest basis index referenced.
    pub fn max_index(&self) -> i32 {
        match *self {
            IAGen::Conj { a, b } => a.max(b.abs()),
            IAGen::CommTv { a, b, c } => a.abs().max(b.abs()).max(c.abs()),
        }
    }

    /// The action on the free group of rank `n`.
    pub fn action(&self, n: usize) -> Endo {
        assert!(
            self.max_index() as usize <= n,
            "generator {} outside rank {}",
            self,
            n
        );
        let mut images: Vec<FreeWord> = (1..=n as i32).map(FreeWord::generator).collect();
        let (target, image) = self.moved_basis_image();
        images[(target - 1) as usize] = image;
        Endo::from_images(n, images)
    }

    /// The one basis index the generator moves, with its image word.
    fn moved_basis_image(&self) -> (i32, FreeWord) {
        match *self {
            IAGen::Conj { a, b } => (a, FreeWord::from_letters([b, a, -b])),
            IAGen::CommTv { a, b, c } => {
                let comm = FreeWord::from_letters([b, c, -b, -c]);
                let i = a.abs();
                let img = if a > 0 {
                    comm.mul(&FreeWord::generator(i))
                } else {
                    FreeWord::generator(i).mul(&comm.inv())
                };
                (i, img)
            }
        }
    }

    /// Applies the generator's action to a single word. Equivalent to
    /// `self.action(n).apply(w)` but touches only the one basis element
    /// the generator moves.
    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        let (target, image) = self.moved_basis_image();
        let image_inv = image.inv();
        let mut out = FreeWord::identity();
        for &l in w.letters() {
            if l == target {
                out.extend(image.letters().iter().copied());
            } else if l == -target {
                out.extend(image_inv.letters().iter().copied());
            } else {
                out.push(l);
            }
        }
        out
    }
}

impl GenLetter for IAGen {
    fn inverse(self) -> Self {
        match self {
            IAGen::Conj { a, b } => IAGen::Conj { a, b: -b },
            IAGen::CommTv { a, b, c } => IAGen::CommTv { a, b: c, c: b },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "k")]
enum RawIAGen {
    C { a: i32, b: i32 },
    Mc { a: i32, b: i32, c: i32 },
}

impl TryFrom<RawIAGen> for IAGen {
    type Error = GenError;
    fn try_from(raw: RawIAGen) -> Result<Self, GenError> {
        match raw {
            RawIAGen::C { a, b } => IAGen::try_conj(a, b),
            RawIAGen::Mc { a, b, c } => IAGen::try_commtv(a, b, c),
        }
    }
}

impl From<IAGen> for RawIAGen {
    fn from(g: IAGen) -> Self {
        match g {
            IAGen::Conj { a, b } => RawIAGen::C { a, b },
            IAGen::CommTv { a, b, c } => RawIAGen::Mc { a, b, c },
        }
    }
}

impl fmt::Display for IAGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IAGen::Conj { a, b } => write!(f, "C[{},{}]", a, b),
            IAGen::CommTv { a, b, c } => write!(f, "Mc[{},{},{}]", a, b, c),
        }
    }
}

impl fmt::Debug for IAGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A generator of the ambient automorphism group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawAutGen", into = "RawAutGen")]
pub enum AutGen {
    /// `M[a, b]`: left-multiply `x_a^sign(a)` by `x_b^sign(b)`.
    /// Invariant: both nonzero, `|a| != |b|`.
    Transv { a: i32, b: i32 },
    /// `P[a, b]`: swap `x_a` and `x_b`. Stored with `0 < a < b`.
    Swap { a: i32, b: i32 },
    /// `I[a]`: invert `x_a`. Stored with `a >= 1`.
    Inv { a: i32 },
}

impl AutGen {
    pub fn transv(a: i32, b: i32) -> Self {
        Self::try_transv(a, b).unwrap()
    }

    pub fn try_transv(a: i32, b: i32) -> Result<Self, GenError> {
        let desc = || format!("M[{},{}]", a, b);
        if a == 0 || b == 0 {
            return Err(GenError::ZeroIndex(desc()));
        }
        if a.abs() == b.abs() {
            return Err(GenError::RepeatedIndex(desc()));
        }
        Ok(AutGen::Transv { a, b })
    }

    pub fn swap(a: i32, b: i32) -> Self {
        Self::try_swap(a, b).unwrap()
    }

    pub fn try_swap(a: i32, b: i32) -> Result<Self, GenError> {
        let desc = || format!("P[{},{}]", a, b);
        if a == 0 || b == 0 {
            return Err(GenError::ZeroIndex(desc()));
        }
        let (a, b) = (a.abs(), b.abs());
        if a == b {
            return Err(GenError::RepeatedIndex(desc()));
        }
        Ok(AutGen::Swap { a: a.min(b), b: a.max(b) })
    }

    pub fn inv_gen(a: i32) -> Self {
        Self::try_inv_gen(a).unwrap()
    }

    pub fn try_inv_gen(a: i32) -> Result<Self, GenError> {
        if a == 0 {
            return Err(GenError::ZeroIndex(format!("I[{}]", a)));
        }
        Ok(AutGen::Inv { a: a.abs() })
    }

    pub fn max_index(&self) -> i32 {
        match *self {
            AutGen::Transv { a, b } => a.abs().max(b.abs()),
            AutGen::Swap { a, b } => a.max(b),
            AutGen::Inv { a } => a,
        }
    }

    /// The action on the free group of rank `n`.
    pub fn action(&self, n: usize) -> Endo {
        assert!(
            self.max_index() as usize <= n,
            "generator {} outside rank {}",
            self,
            n
        );
        let mut images: Vec<FreeWord> = (1..=n as i32).map(FreeWord::generator).collect();
        match *self {
            AutGen::Transv { a, b } => {
                let i = a.unsigned_abs() as usize;
                images[i - 1] = if a > 0 {
                    FreeWord::from_letters([b, a])
                } else {
                    FreeWord::from_letters([-a, -b])
                };
            }
            AutGen::Swap { a, b } => {
                images[(a - 1) as usize] = FreeWord::generator(b);
                images[(b - 1) as usize] = FreeWord::generator(a);
            }
            AutGen::Inv { a } => {
                images[(a - 1) as usize] = FreeWord::generator(-a);
            }
        }
        Endo::from_images(n, images)
    }
}

impl GenLetter for AutGen {
    fn inverse(self) -> Self {
        match self {
            AutGen::Transv { a, b } => AutGen::Transv { a, b: -b },
            AutGen::Swap { .. } | AutGen::Inv { .. } => self,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "k")]
enum RawAutGen {
    M { a: i32, b: i32 },
    P { a: i32, b: i32 },
    I { a: i32 },
}

impl TryFrom<RawAutGen> for AutGen {
    type Error = GenError;
    fn try_from(raw: RawAutGen) -> Result<Self, GenError> {
        match raw {
            RawAutGen::M { a, b } => AutGen::try_transv(a, b),
            RawAutGen::P { a, b } => AutGen::try_swap(a, b),
            RawAutGen::I { a } => AutGen::try_inv_gen(a),
        }
    }
}

impl From<AutGen> for RawAutGen {
    fn from(g: AutGen) -> Self {
        match g {
            AutGen::Transv { a, b } => RawAutGen::M { a, b },
            AutGen::Swap { a, b } => RawAutGen::P { a, b },
            AutGen::Inv { a } => RawAutGen::I { a },
        }
    }
}

impl fmt::Display for AutGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AutGen::Transv { a, b } => write!(f, "M[{},{}]", a, b),
            AutGen::Swap { a, b } => write!(f, "P[{},{}]", a, b),
            AutGen::Inv { a } => write!(f, "I[{}]", a),
        }
    }
}

impl fmt::Debug for AutGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A letter type with an involutive inverse, so that words over it can be
/// freely reduced.
pub trait GenLetter: Copy + Eq + Ord + std::hash::Hash + fmt::Display {
    fn inverse(self) -> Self;
}

/// A freely reduced word over a generator alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenWord<G: GenLetter> {
    letters: Vec<G>,
}

pub type IAWord = GenWord<IAGen>;
pub type AutWord = GenWord<AutGen>;

impl<G: GenLetter> Default for GenWord<G> {
    fn default() -> Self {
        GenWord { letters: Vec::new() }
    }
}

impl<G: GenLetter> GenWord<G> {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(g: G) -> Self {
        GenWord { letters: vec![g] }
    }

    pub fn from_letters<I: IntoIterator<Item = G>>(letters: I) -> Self {
        let mut w = Self::identity();
        for g in letters {
            w.push(g);
        }
        w
    }

    /// Appends a letter, cancelling against the current last letter.
    pub fn push(&mut self, g: G) {
        if self.letters.last() == Some(&g.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(g);
        }
    }

    pub fn letters(&self) -> &[G] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reduced product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for &g in rhs.letters() {
            out.push(g);
        }
        out
    }

    /// The inverse word.
    pub fn inv(&self) -> Self {
        GenWord {
            letters: self.letters.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// The commutator `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.mul(b).mul(&a.inv()).mul(&b.inv())
    }

    /// Cyclic shift by `k`: moves the first `k` letters to the end, one at
    /// a time, reducing as it goes.
    pub fn cyclic_shift(&self, k: usize) -> Self {
        let mut w = self.clone();
        for _ in 0..k {
            if w.letters.is_empty() {
                break;
            }
            let head = w.letters.remove(0);
            w.push(head);
        }
        w
    }

    /// Removes inverse pairs wrapping around the ends until the word is
    /// cyclically reduced, returning the core.
    pub fn cyclically_reduce(&self) -> Self {
        let mut letters = self.letters.clone();
        while letters.len() >= 2 && *letters.last().unwrap() == letters[0].inverse() {
            letters.pop();
            letters.remove(0);
        }
        GenWord { letters }
    }

    /// Largest basis index referenced by any letter, given a per-letter
    /// index bound.
    pub fn max_index_by<F: Fn(&G) -> i32>(&self, f: F) -> i32 {
        self.letters.iter().map(f).max().unwrap_or(0)
    }
}

impl IAWord {
    pub fn max_index(&self) -> i32 {
        self.max_index_by(IAGen::max_index)
    }

    /// Evaluates the word to an endomorphism of rank `n`, composing letter
    /// actions right to left.
    pub fn eval(&self, n: usize) -> Endo {
        let mut result = Endo::identity(n);
        for g in &self.letters {
            result = result.compose(&g.action(n));
        }
        result
    }

    /// Applies the evaluated automorphism to a word without materializing
    /// the endomorphism: letters act right to left.
    pub fn apply_to_word(&self, u: &FreeWord) -> FreeWord {
        apply_ia_letters(&self.letters, u)
    }

    /// Whether the word evaluates to the identity automorphism in rank `n`.
    pub fn evaluates_to_identity(&self, n: usize) -> bool {
        ia_letters_evaluate_to_identity(&self.letters, n)
    }
}

/// Applies a raw (possibly unreduced) letter sequence to a word, right to
/// left.
pub fn apply_ia_letters(letters: &[IAGen], u: &FreeWord) -> FreeWord {
    let mut out = u.clone();
    for g in letters.iter().rev() {
        out = g.apply(&out);
    }
    out
}

/// Whether a raw letter sequence evaluates to the identity automorphism:
/// every basis element of the rank-`n` free group must map to itself.
pub fn ia_letters_evaluate_to_identity(letters: &[IAGen], n: usize) -> bool {
    (1..=n as i32).all(|i| apply_ia_letters(letters, &FreeWord::generator(i)).letters() == [i])
}

impl AutWord {
    pub fn max_index(&self) -> i32 {
        self.max_index_by(AutGen::max_index)
    }

    pub fn eval(&self, n: usize) -> Endo {
        let mut result = Endo::identity(n);
        for g in &self.letters {
            result = result.compose(&g.action(n));
        }
        result
    }
}

impl<G: GenLetter> fmt::Display for GenWord<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for g in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}", g)?;
        }
        Ok(())
    }
}

impl<G: GenLetter> fmt::Debug for GenWord<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<G: GenLetter + Serialize> Serialize for GenWord<G> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.letters.serialize(s)
    }
}

impl<'de, G: GenLetter + DeserializeOwned> Deserialize<'de> for GenWord<G> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let letters = Vec::<G>::deserialize(d)?;
        Ok(GenWord::from_letters(letters))
    }
}

/// The generating set whose images under the abelianized Johnson map form
/// a basis: all conjugation moves `C[i, j]`, plus the commutator
/// transvections `Mc[i, j, k]` with positive slots and `j < k`.
pub fn magnus_generating_set(n: usize) -> Vec<IAGen> {
    let n = n as i32;
    let mut gens = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                gens.push(IAGen::conj(i, j));
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in (j + 1)..=n {
                if j != i && k != i {
                    gens.push(IAGen::commtv(i, j, k));
                }
            }
        }
    }
    gens
}

/// The full ambient generating set over indices `1..=n`: every signed
/// transvection `M[a, b]`, every swap, every inversion.
pub fn aut_generating_set(n: usize) -> Vec<AutGen> {
    let n = n as i32;
    let mut gens = Vec::new();
    for a in 1..=n {
        for sa in [1, -1] {
            for b in 1..=n {
                if b == a {
                    continue;
                }
                for sb in [1, -1] {
                    gens.push(AutGen::transv(sa * a, sb * b));
                }
            }
        }
    }
    for a in 1..=n {
        for b in (a + 1)..=n {
            gens.push(AutGen::swap(a, b));
        }
    }
    for a in 1..=n {
        gens.push(AutGen::inv_gen(a));
    }
    gens
}

/// Generators of the subgroup fixing the classes of the last `k` basis
/// elements under the abelianized Johnson map: all conjugation moves, plus
/// `Mc[a, b, c]` (positive slots, `b < c`) with `a <= n - k`.
pub fn stabilizer_generating_set(n: usize, k: usize) -> Vec<IAGen> {
    assert!(k <= n);
    let cutoff = (n - k) as i32;
    magnus_generating_set(n)
        .into_iter()
        .filter(|g| match *g {
            IAGen::Conj { .. } => true,
            IAGen::CommTv { a, .. } => a <= cutoff,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conj_action_matches_definition() {
        let g = IAGen::conj(1, 2);
        let f = g.action(3);
        assert_eq!(f.image(1).letters(), &[2, 1, -2]);
        assert_eq!(f.image(2).letters(), &[2]);
        assert_eq!(f.image(3).letters(), &[3]);
        let neg = IAGen::conj(1, -2);
        assert_eq!(neg.action(3).image(1).letters(), &[-2, 1, 2]);
    }

    #[test]
    fn conj_first_slot_sign_is_dropped() {
        assert_eq!(IAGen::conj(-1, 2), IAGen::conj(1, 2));
    }

    #[test]
    fn commtv_action_matches_definition() {
        let g = IAGen::commtv(1, 2, -3);
        let f = g.action(3);
        // [x2, x3^-1] x1
        assert_eq!(f.image(1).letters(), &[2, -3, -2, 3, 1]);
        let h = IAGen::commtv(-1, 2, -3).action(3);
        // x1 [x2, x3^-1]^-1
        assert_eq!(h.image(1).letters(), &[1, -3, 2, 3, -2]);
    }

    #[test]
    fn transv_action_matches_definition() {
        let f = AutGen::transv(1, -2).action(2);
        assert_eq!(f.image(1).letters(), &[-2, 1]);
        let g = AutGen::transv(-1, 2).action(2);
        assert_eq!(g.image(1).letters(), &[1, -2]);
    }

    #[test]
    fn swap_and_inv_actions() {
        let p = AutGen::swap(3, 1).action(3);
        assert_eq!(p.image(1).letters(), &[3]);
        assert_eq!(p.image(3).letters(), &[1]);
        let i = AutGen::inv_gen(2).action(3);
        assert_eq!(i.image(2).letters(), &[-2]);
    }

    #[test]
    fn letter_inverse_is_action_inverse() {
        let n = 4;
        let gens = [
            IAGen::conj(1, 2),
            IAGen::conj(2, -3),
            IAGen::commtv(1, 2, 3),
            IAGen::commtv(-2, -4, 1),
        ];
        for g in gens {
            let f = g.action(n).compose(&g.inverse().action(n));
            assert!(f.is_identity(), "letter inverse failed for {}", g);
        }
        let auts = [
            AutGen::transv(1, 2),
            AutGen::transv(-3, -1),
            AutGen::swap(1, 4),
            AutGen::inv_gen(2),
        ];
        for g in auts {
            let f = g.action(n).compose(&g.inverse().action(n));
            assert!(f.is_identity(), "letter inverse failed for {}", g);
        }
    }

    #[test]
    fn ia_generators_are_ia() {
        for g in magnus_generating_set(4) {
            assert!(g.action(4).is_ia(), "{} not trivial on abelianization", g);
        }
    }

    #[test]
    fn word_reduction_cancels_commtv_slot_swap() {
        let w = IAWord::from_letters([IAGen::commtv(1, 2, 3), IAGen::commtv(1, 3, 2)]);
        assert!(w.is_identity());
    }

    #[test]
    fn eval_composes_right_to_left() {
        // Under right-to-left composition, eval([g, h]) applied to x reads
        // act(g)(act(h)(x)).
        let g = AutGen::transv(1, 2); // x1 -> x2 x1
        let h = AutGen::transv(2, 3); // x2 -> x3 x2
        let w = AutWord::from_letters([g, h]);
        let f = w.eval(3);
        // act(h)(x1) = x1, then act(g)(x1) = x2 x1.
        assert_eq!(f.image(1).letters(), &[2, 1]);
        // act(h)(x2) = x3 x2, then act(g) fixes both letters.
        assert_eq!(f.image(2).letters(), &[3, 2]);
        let wr = AutWord::from_letters([h, g]);
        // act(g)(x1) = x2 x1, then act(h): x2 -> x3 x2 gives x3 x2 x1.
        assert_eq!(wr.eval(3).image(1).letters(), &[3, 2, 1]);
    }

    #[test]
    fn cyclic_shift_evaluates_to_conjugate() {
        let w = IAWord::from_letters([
            IAGen::conj(1, 2),
            IAGen::commtv(2, 3, 1),
            IAGen::conj(3, -1),
        ]);
        let shifted = w.cyclic_shift(1);
        let n = 3;
        let g0 = IAGen::conj(1, 2).action(n);
        let lhs = w.eval(n);
        let rhs = g0.compose(&shifted.eval(n)).compose(&IAGen::conj(1, -2).action(n));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn generating_set_sizes() {
        assert_eq!(magnus_generating_set(3).len(), 9);
        assert_eq!(magnus_generating_set(4).len(), 24);
        assert_eq!(magnus_generating_set(5).len(), 50);
        // 4n(n-1) signed transvections, n(n-1)/2 swaps, n inversions.
        assert_eq!(aut_generating_set(3).len(), 24 + 3 + 3);
    }

    #[test]
    fn stabilizer_set_restricts_commtv_targets() {
        let gens = stabilizer_generating_set(4, 2);
        assert!(gens.iter().all(|g| match *g {
            IAGen::Conj { .. } => true,
            IAGen::CommTv { a, .. } => a <= 2,
        }));
        // All 12 conjugation moves survive; commutator transvections with
        // first slot 1 or 2 give 2 * 3 more.
        assert_eq!(gens.len(), 12 + 6);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let w = IAWord::from_letters([IAGen::conj(1, -2), IAGen::commtv(1, 2, -3)]);
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(
            json,
            r#"[{"k":"C","a":1,"b":-2},{"k":"Mc","a":1,"b":2,"c":-3}]"#
        );
        let back: IAWord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);

        let bad: Result<IAWord, _> = serde_json::from_str(r#"[{"k":"C","a":2,"b":2}]"#);
        let err = bad.unwrap_err().to_string();
        assert!(err.contains("C[2,2]"), "unexpected error: {}", err);

        let aut: AutWord =
            serde_json::from_str(r#"[{"k":"M","a":-1,"b":2},{"k":"P","a":2,"b":1},{"k":"I","a":3}]"#)
                .unwrap();
        assert_eq!(
            aut.letters(),
            &[AutGen::transv(-1, 2), AutGen::swap(1, 2), AutGen::inv_gen(3)]
        );
    }

    pub fn arb_ia_gen(n: i32) -> impl Strategy<Value = IAGen> {
        let conj = (1..=n, 1..=n, prop::bool::ANY).prop_filter_map("distinct", |(a, b, s)| {
            if a == b {
                None
            } else {
                Some(IAGen::conj(a, if s { b } else { -b }))
            }
        });
        let commtv = (1..=n, 1..=n, 1..=n, prop::bool::ANY, prop::bool::ANY, prop::bool::ANY)
            .prop_filter_map("distinct", |(a, b, c, sa, sb, sc)| {
                if a == b || a == c || b == c {
                    None
                } else {
                    Some(IAGen::commtv(
                        if sa { a } else { -a },
                        if sb { b } else { -b },
                        if sc { c } else { -c },
                    ))
                }
            });
        prop_oneof![conj, commtv]
    }

    fn arb_ia_word(n: i32) -> impl Strategy<Value = IAWord> {
        prop::collection::vec(arb_ia_gen(n), 0..12).prop_map(IAWord::from_letters)
    }

    proptest! {
        #[test]
        fn letter_apply_agrees_with_full_action(g in arb_ia_gen(4), ls in prop::collection::vec((1i32..=4, prop::bool::ANY).prop_map(|(i, s)| if s { i } else { -i }), 0..15)) {
            let u = FreeWord::from_letters(ls);
            prop_assert_eq!(g.apply(&u), g.action(4).apply(&u));
        }

        #[test]
        fn word_apply_agrees_with_eval(w in arb_ia_word(4), ls in prop::collection::vec((1i32..=4, prop::bool::ANY).prop_map(|(i, s)| if s { i } else { -i }), 0..10)) {
            let u = FreeWord::from_letters(ls);
            prop_assert_eq!(w.apply_to_word(&u), w.eval(4).apply(&u));
            prop_assert_eq!(w.evaluates_to_identity(4), w.eval(4).is_identity());
        }

        #[test]
        fn eval_is_a_homomorphism(u in arb_ia_word(4), v in arb_ia_word(4)) {
            let lhs = u.mul(&v).eval(4);
            let rhs = u.eval(4).compose(&v.eval(4));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn word_inverse_evaluates_to_inverse(u in arb_ia_word(4)) {
            prop_assert!(u.eval(4).compose(&u.inv().eval(4)).is_identity());
        }

        #[test]
        fn reduction_preserves_evaluation(gs in prop::collection::vec(arb_ia_gen(3), 0..10)) {
            // Building the word letter by letter reduces; composing the raw
            // letter actions does not. Both must agree.
            let w = IAWord::from_letters(gs.clone());
            let mut raw = Endo::identity(3);
            for g in gs {
                raw = raw.compose(&g.action(3));
            }
            prop_assert_eq!(w.eval(3), raw);
        }

        #[test]
        fn cyclically_reduced_core_is_conjugate(u in arb_ia_word(4)) {
            let core = u.cyclically_reduce();
            // u = prefix * core * prefix^-1 where prefix is what was peeled.
            let k = (u.len() - core.len()) / 2;
            let prefix = IAWord::from_letters(u.letters()[..k].to_vec());
            prop_assert_eq!(u, prefix.mul(&core).mul(&prefix.inv()));
        }
    }
}
