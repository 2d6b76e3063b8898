//! Endomorphisms of a free group of fixed rank, given by generator images.
//!
//! An endomorphism stores the images of the basis elements `x_1..x_n`.
//! All endomorphisms built by this crate are automorphisms, but nothing
//! here assumes invertibility; composition and application are plain
//! substitution.

use crate::words::{FreeWord, Letter};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An endomorphism of the free group of rank `n`, as images of the basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endo {
    n: usize,
    /// `images[i - 1]` is the image of `x_i`.
    images: Vec<FreeWord>,
}

impl Endo {
    /// The identity endomorphism of rank `n`.
    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "rank must be positive");
        Endo {
            n,
            images: (1..=n as i32).map(FreeWord::generator).collect(),
        }
    }

    /// Builds an endomorphism from basis images. Every letter used in an
    /// image must have index at most `n`.
    pub fn from_images(n: usize, images: Vec<FreeWord>) -> Self {
        assert_eq!(images.len(), n, "need exactly one image per basis element");
        for w in &images {
            assert!(
                w.max_index() as usize <= n,
                "image uses a letter outside rank {}",
                n
            );
        }
        Endo { n, images }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// The image of the basis element `x_i` (1-based).
    pub fn image(&self, i: usize) -> &FreeWord {
        &self.images[i - 1]
    }

    /// Applies the endomorphism to a word by substituting basis images.
    ///
    /// Panics if the word uses a letter with index larger than the rank.
    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        let mut out = FreeWord::identity();
        for &l in w.letters() {
            out.extend(self.letter_image_letters(l));
        }
        out
    }

    fn letter_image_letters(&self, l: Letter) -> Vec<Letter> {
        let idx = l.unsigned_abs() as usize;
        assert!(
            idx >= 1 && idx <= self.n,
            "letter x{} outside rank {}",
            idx,
            self.n
        );
        let img = &self.images[idx - 1];
        if l > 0 {
            img.letters().to_vec()
        } else {
            img.inv().letters().to_vec()
        }
    }

    /// Composition `self ∘ rhs`: first apply `rhs`, then `self`.
    pub fn compose(&self, rhs: &Endo) -> Endo {
        assert_eq!(self.n, rhs.n, "rank mismatch in composition");
        Endo {
            n: self.n,
            images: rhs.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    /// Whether this is the identity map (fixes every basis element).
    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [(i + 1) as i32])
    }

    /// The induced matrix on the abelianization, with `entry(i, j)` the
    /// exponent sum of `x_i` in the image of `x_j` (so columns are image
    /// classes and matrices multiply in composition order).
    pub fn abelianization(&self) -> AbelMatrix {
        let n = self.n;
        let mut m = AbelMatrix::zero(n);
        for j in 1..=n {
            for i in 1..=n {
                *m.entry_mut(i, j) = self.images[j - 1].exponent_sum(i as i32);
            }
        }
        m
    }

    /// Whether the endomorphism acts trivially on the abelianization.
    pub fn is_ia(&self) -> bool {
        self.abelianization().is_identity()
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Endo(rank {})", self.n)?;
        for (i, w) in self.images.iter().enumerate() {
            writeln!(f, "  x{} -> {}", i + 1, w)?;
        }
        Ok(())
    }
}

/// An integer matrix acting on the abelianization of the free group.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelMatrix {
    n: usize,
    /// Row-major entries.
    entries: Vec<i64>,
}

impl AbelMatrix {
    pub fn zero(n: usize) -> Self {
        AbelMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = AbelMatrix::zero(n);
        for i in 1..=n {
            *m.entry_mut(i, i) = 1;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// 1-based entry access.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut i64 {
        &mut self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn is_identity(&self) -> bool {
        self == &AbelMatrix::identity(self.n)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &AbelMatrix) -> AbelMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = AbelMatrix::zero(self.n);
        for i in 1..=self.n {
            for j in 1..=self.n {
                let mut s = 0i64;
                for k in 1..=self.n {
                    s += self.entry(i, k) * rhs.entry(k, j);
                }
                *out.entry_mut(i, j) = s;
            }
        }
        out
    }
}

impl fmt::Debug for AbelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            for j in 1..=self.n {
                write!(f, "{:>3}", self.entry(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
