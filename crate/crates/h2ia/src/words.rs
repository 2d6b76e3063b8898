//! Freely reduced words in a free group.
//!
//! A letter is a nonzero signed index: `i` stands for the basis element
//! `x_i`, `-i` for its inverse. Words are kept freely reduced at all
//! times; every constructor and operation reduces eagerly, so two words
//! are equal as group elements exactly when they are equal as values.
//! Words do not carry a rank; the ambient rank is supplied by the
//! operations that need one.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A signed generator index. Positive `i` is `x_i`, negative is `x_i^-1`.
pub type Letter = i32;

/// Inverse of a single letter.
#[inline]
pub fn inv_letter(l: Letter) -> Letter {
    debug_assert!(l != 0, "letter index must be nonzero");
    -l
}

/// A freely reduced word in the free group.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Letter>", into = "Vec<Letter>")]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    /// The empty word.
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    /// A single-letter word.
    pub fn generator(l: Letter) -> Self {
        assert!(l != 0, "letter index must be nonzero");
        FreeWord { letters: vec![l] }
    }

    /// Builds a word from arbitrary letters, reducing adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = FreeWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Appends one letter, cancelling against the current last letter.
    pub fn push(&mut self, l: Letter) {
        assert!(l != 0, "letter index must be nonzero");
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    /// The reduced letter sequence.
    pub fn letters(&self) -> &[Letter] {
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

    /// Product `self * rhs`, reduced.
    pub fn mul(&self, rhs: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        out.extend(rhs.letters.iter().copied());
        out
    }

    /// Appends a letter sequence, reducing at the junction.
    pub fn extend<I: IntoIterator<Item = Letter>>(&mut self, letters: I) {
        for l in letters {
            self.push(l);
        }
    }

    /// The inverse word: reversed order, each letter inverted.
    pub fn inv(&self) -> FreeWord {
        // A reduced word's inverse is already reduced.
        FreeWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// The commutator `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &FreeWord, b: &FreeWord) -> FreeWord {
        a.mul(b).mul(&a.inv()).mul(&b.inv())
    }

    /// Conjugate `g * self * g^-1`.
    pub fn conjugate(&self, g: &FreeWord) -> FreeWord {
        g.mul(self).mul(&g.inv())
    }

    /// Exponent sum of the basis element with the given (positive) index.
    pub fn exponent_sum(&self, index: i32) -> i64 {
        assert!(index > 0);
        self.letters
            .iter()
            .map(|&l| {
                if l == index {
                    1
                } else if l == -index {
                    -1
                } else {
                    0
                }
            })
            .sum()
    }

    /// Largest basis index appearing in the word, or 0 for the identity.
    pub fn max_index(&self) -> i32 {
        self.letters.iter().map(|l| l.abs()).max().unwrap_or(0)
    }
}

impl From<Vec<Letter>> for FreeWord {
    fn from(letters: Vec<Letter>) -> Self {
        FreeWord::from_letters(letters)
    }
}

impl From<FreeWord> for Vec<Letter> {
    fn from(w: FreeWord) -> Self {
        w.letters
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for &l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if l > 0 {
                write!(f, "x{}", l)?;
            } else {
                write!(f, "x{}^-1", -l)?;
            }
        }
        Ok(())
    }
}
