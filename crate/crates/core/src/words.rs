//! Freely reduced words over a ranked generating set.
//!
//! Words are stored always-reduced, so equality of group elements of a free
//! group is plain sequence equality. The same representation carries surface
//! group words; there equality additionally goes through Dehn's algorithm in
//! the [`crate::surface`] module.

use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("image list has {got} entries, expected {expected}")]
    ImageCountMismatch { got: usize, expected: usize },
    #[error("cannot parse word token `{0}`")]
    BadToken(String),
}

/// A single signed generator. `index` is 0-based internally; the text syntax
/// is 1-based (`a1`, `A1`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub positive: bool,
}

impl Letter {
    pub fn new(index: usize, positive: bool) -> Self {
        Letter { index, positive }
    }

    pub fn inverse(self) -> Self {
        Letter {
            index: self.index,
            positive: !self.positive,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.positive != other.positive
    }
}

/// A freely reduced word over `rank` generators. The empty word is the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    letters: Vec<Letter>,
    rank: usize,
}

/// Names the generating set for parsing and printing. A surface alphabet of
/// genus g interleaves `a_i`, `b_i` as generator indices `2(i-1)`, `2(i-1)+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    Free { rank: usize },
    Surface { genus: usize },
}

impl Alphabet {
    pub fn rank(&self) -> usize {
        match *self {
            Alphabet::Free { rank } => rank,
            Alphabet::Surface { genus } => 2 * genus,
        }
    }

    fn letter_text(&self, l: Letter) -> String {
        match *self {
            Alphabet::Free { .. } => {
                let c = if l.positive { 'a' } else { 'A' };
                format!("{}{}", c, l.index + 1)
            }
            Alphabet::Surface { .. } => {
                let handle = l.index / 2 + 1;
                let c = match (l.index % 2, l.positive) {
                    (0, true) => 'a',
                    (0, false) => 'A',
                    (1, true) => 'b',
                    (_, _) => 'B',
                };
                format!("{}{}", c, handle)
            }
        }
    }

    fn parse_token(&self, tok: &str) -> Result<Letter, WordError> {
        let bad = || WordError::BadToken(tok.to_string());
        let mut chars = tok.chars();
        let head = chars.next().ok_or_else(bad)?;
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        let letter = match (*self, head) {
            (Alphabet::Free { .. }, 'a') => Letter::new(n - 1, true),
            (Alphabet::Free { .. }, 'A') => Letter::new(n - 1, false),
            (Alphabet::Surface { .. }, 'a') => Letter::new(2 * (n - 1), true),
            (Alphabet::Surface { .. }, 'A') => Letter::new(2 * (n - 1), false),
            (Alphabet::Surface { .. }, 'b') => Letter::new(2 * (n - 1) + 1, true),
            (Alphabet::Surface { .. }, 'B') => Letter::new(2 * (n - 1) + 1, false),
            _ => return Err(bad()),
        };
        if letter.index >= self.rank() {
            return Err(WordError::LetterOutOfRange {
                index: letter.index,
                rank: self.rank(),
            });
        }
        Ok(letter)
    }
}

impl ReducedWord {
    /// The identity word.
    pub fn identity(rank: usize) -> Self {
        ReducedWord {
            letters: Vec::new(),
            rank,
        }
    }

    /// A single positive generator.
    pub fn generator(index: usize, rank: usize) -> Self {
        assert!(index < rank, "generator index out of range");
        ReducedWord {
            letters: vec![Letter::new(index, true)],
            rank,
        }
    }

    /// Freely reduce a letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>, rank: usize) -> Result<Self, WordError> {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if l.index >= rank {
                return Err(WordError::LetterOutOfRange {
                    index: l.index,
                    rank,
                });
            }
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Ok(ReducedWord {
            letters: stack,
            rank,
        })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &ReducedWord) -> Result<ReducedWord, WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch(self.rank, other.rank));
        }
        // Both sides are already reduced; cancellation only happens at the seam.
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        Ok(ReducedWord {
            letters,
            rank: self.rank,
        })
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    pub fn pow(&self, n: i64) -> ReducedWord {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = ReducedWord::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base).expect("same rank");
        }
        out
    }

    /// Signed count of occurrences of generator `i`.
    pub fn exponent_sum(&self, i: usize) -> Result<BigInt, WordError> {
        if i >= self.rank {
            return Err(WordError::LetterOutOfRange {
                index: i,
                rank: self.rank,
            });
        }
        let mut total = BigInt::zero();
        for l in &self.letters {
            if l.index == i {
                if l.positive {
                    total += 1;
                } else {
                    total -= 1;
                }
            }
        }
        Ok(total)
    }

    /// Image under abelianization: entry `i` is the exponent sum of
    /// generator `i`.
    pub fn abelianize(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank];
        for l in &self.letters {
            if l.positive {
                v[l.index] += 1;
            } else {
                v[l.index] -= 1;
            }
        }
        v
    }

    /// Conjugate `self` by `w`: returns `w * self * w^-1`.
    pub fn conjugate_by(&self, w: &ReducedWord) -> ReducedWord {
        w.multiply(self)
            .and_then(|x| x.multiply(&w.inverse()))
            .expect("same rank")
    }

    pub fn parse(text: &str, alphabet: Alphabet) -> Result<ReducedWord, WordError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            letters.push(alphabet.parse_token(tok)?);
        }
        ReducedWord::reduce(letters, alphabet.rank())
    }

    pub fn display(&self, alphabet: Alphabet) -> String {
        self.letters
            .iter()
            .map(|&l| alphabet.letter_text(l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(Alphabet::Free { rank: self.rank }))
    }
}

/// Substitute each generator by its image word and reduce. `images[i]` is the
/// image of generator `i`; a negative letter maps to the inverse image.
pub fn apply_map(images: &[ReducedWord], u: &ReducedWord) -> Result<ReducedWord, WordError> {
    if images.len() != u.rank() {
        return Err(WordError::ImageCountMismatch {
            got: images.len(),
            expected: u.rank(),
        });
    }
    let target_rank = images.first().map(|w| w.rank()).unwrap_or(0);
    for w in images {
        if w.rank() != target_rank {
            return Err(WordError::RankMismatch(w.rank(), target_rank));
        }
    }
    let mut out = ReducedWord::identity(target_rank);
    for &l in u.letters() {
        let img = &images[l.index];
        if l.positive {
            out = out.multiply(img)?;
        } else {
            out = out.multiply(&img.inverse())?;
        }
    }
    Ok(out)
}

/// The identity image list on `rank` generators.
pub fn identity_images(rank: usize) -> Vec<ReducedWord> {
    (0..rank).map(|i| ReducedWord::generator(i, rank)).collect()
}

/// Abelianization matrix of an image list: column `j` is the exponent vector
/// of the image of generator `j`.
pub fn abelianization_matrix(images: &[ReducedWord]) -> crate::intlat::IntMatrix {
    let target_rank = images.first().map(|w| w.rank()).unwrap_or(0);
    let cols: Vec<Vec<BigInt>> = images.iter().map(|w| w.abelianize()).collect();
    crate::intlat::IntMatrix::from_fn(target_rank, images.len(), |i, j| cols[j][i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn w(text: &str, rank: usize) -> ReducedWord {
        ReducedWord::parse(text, Alphabet::Free { rank }).unwrap()
    }

    #[test]
    fn reduce_cancels() {
        let letters = vec![Letter::new(0, true), Letter::new(0, false)];
        assert!(ReducedWord::reduce(letters, 2).unwrap().is_empty());
        let letters = vec![
            Letter::new(0, true),
            Letter::new(1, true),
            Letter::new(1, false),
            Letter::new(0, true),
        ];
        assert_eq!(ReducedWord::reduce(letters, 2).unwrap(), w("a1 a1", 2));
    }

    #[test]
    fn reduce_rejects_out_of_range() {
        let letters = vec![Letter::new(5, true)];
        assert!(matches!(
            ReducedWord::reduce(letters, 2),
            Err(WordError::LetterOutOfRange { .. })
        ));
    }

    #[test]
    fn multiply_examples() {
        assert!(w("a1", 2).multiply(&w("A1", 2)).unwrap().is_empty());
        assert_eq!(
            w("a1 a2", 3).multiply(&w("A2 a3", 3)).unwrap(),
            w("a1 a3", 3)
        );
        assert!(w("a1", 2).multiply(&w("a1", 3)).is_err());
    }

    #[test]
    fn invert_examples() {
        assert!(ReducedWord::identity(2).inverse().is_empty());
        assert_eq!(w("a1 A2", 2).inverse(), w("a2 A1", 2));
    }

    #[test]
    fn exponent_sum_examples() {
        assert_eq!(w("a1 a2 a1", 2).exponent_sum(0).unwrap(), BigInt::from(2));
        assert!(w("a1 a2 a1", 2)
            .multiply(&w("A1 A2 A1", 2))
            .unwrap()
            .exponent_sum(0)
            .unwrap()
            .to_i64()
            .unwrap()
            == 0);
        assert!(w("a1", 2).exponent_sum(5).is_err());
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(
            ReducedWord::identity(2).abelianize(),
            vec![BigInt::zero(), BigInt::zero()]
        );
        assert_eq!(
            w("a1 A2 a1", 2).abelianize(),
            vec![BigInt::from(2), BigInt::from(-1)]
        );
    }

    #[test]
    fn apply_map_examples() {
        let u = w("a2 a1", 2);
        assert_eq!(apply_map(&identity_images(2), &u).unwrap(), u);
        let images = vec![w("a1", 2), w("A2", 2)];
        assert_eq!(apply_map(&images, &u).unwrap(), w("A2 a1", 2));
        assert!(apply_map(&identity_images(3), &u).is_err());
    }

    #[test]
    fn parse_print_round_trip() {
        let free = Alphabet::Free { rank: 3 };
        for text in ["", "a1 a2 A3", "a3 a3 A1"] {
            let word = ReducedWord::parse(text, free).unwrap();
            assert_eq!(word.display(free), text.trim());
        }
        let surf = Alphabet::Surface { genus: 2 };
        let word = ReducedWord::parse("a1 b1 A1 B1 a2 b2 A2 B2", surf).unwrap();
        assert_eq!(word.display(surf), "a1 b1 A1 B1 a2 b2 A2 B2");
        assert!(ReducedWord::parse("c1", surf).is_err());
        assert!(ReducedWord::parse("a0", free).is_err());
        assert!(ReducedWord::parse("a9", free).is_err());
    }

    fn arb_word(rank: usize, max_len: usize) -> impl Strategy<Value = ReducedWord> {
        prop::collection::vec((0..rank, any::<bool>()), 0..=max_len).prop_map(move |ls| {
            ReducedWord::reduce(ls.into_iter().map(|(i, p)| Letter::new(i, p)), rank).unwrap()
        })
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_reduced(word in arb_word(3, 50)) {
            // rescan oracle: no adjacent cancelling pair
            for pair in word.letters().windows(2) {
                prop_assert!(!pair[0].cancels(pair[1]));
            }
            let again = ReducedWord::reduce(word.letters().iter().copied(), 3).unwrap();
            prop_assert_eq!(&again, &word);
        }

        #[test]
        fn group_axioms(u in arb_word(3, 20), v in arb_word(3, 20), x in arb_word(3, 20)) {
            let uv_x = u.multiply(&v).unwrap().multiply(&x).unwrap();
            let u_vx = u.multiply(&v.multiply(&x).unwrap()).unwrap();
            prop_assert_eq!(uv_x, u_vx);
            prop_assert!(u.multiply(&u.inverse()).unwrap().is_empty());
            prop_assert_eq!(u.inverse().inverse(), u);
        }

        #[test]
        fn abelianize_is_a_homomorphism(u in arb_word(3, 20), v in arb_word(3, 20)) {
            let ab_uv = u.multiply(&v).unwrap().abelianize();
            let ab_u = u.abelianize();
            let ab_v = v.abelianize();
            for i in 0..3 {
                prop_assert_eq!(&ab_uv[i], &(&ab_u[i] + &ab_v[i]));
                prop_assert_eq!(&ab_uv[i], &(u.exponent_sum(i).unwrap() + v.exponent_sum(i).unwrap()));
            }
        }

        #[test]
        fn apply_map_respects_products(u in arb_word(2, 15), v in arb_word(2, 15)) {
            let images = vec![
                ReducedWord::parse("a1 a2", Alphabet::Free { rank: 2 }).unwrap(),
                ReducedWord::parse("A1", Alphabet::Free { rank: 2 }).unwrap(),
            ];
            let lhs = apply_map(&images, &u.multiply(&v).unwrap()).unwrap();
            let rhs = apply_map(&images, &u).unwrap().multiply(&apply_map(&images, &v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
