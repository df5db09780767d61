//! Word problem for genus-g surface groups via Dehn's algorithm, plus the
//! subgroup isomorphism formulas (finite index: surface of genus m(g-1)+1;
//! infinite index: free, infinitely generated when normal and nontrivial).

use crate::classify::{BaseType, IsoType};
use crate::words::{Letter, ReducedWord, WordError};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("index must be at least 1, got {0}")]
    BadIndex(usize),
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("inconsistent flags: an infinite normal image needs container rank >= 2")]
    InconsistentFlags,
}

/// The defining relator `[a1,b1]...[ag,bg]` as a word over the 2g-letter
/// surface alphabet (generator `2(i-1)` is `a_i`, `2(i-1)+1` is `b_i`).
pub fn relator(genus: usize) -> Result<ReducedWord, SurfaceError> {
    if genus < 2 {
        return Err(SurfaceError::GenusTooSmall(genus));
    }
    let mut letters = Vec::with_capacity(4 * genus);
    for i in 0..genus {
        let a = Letter::new(2 * i, true);
        let b = Letter::new(2 * i + 1, true);
        letters.extend([a, b, a.inverse(), b.inverse()]);
    }
    Ok(ReducedWord::reduce(letters, 2 * genus)?)
}

/// Strip matching first/last letters until the word is cyclically reduced.
fn cyclic_reduce(mut letters: Vec<Letter>) -> Vec<Letter> {
    while letters.len() >= 2 && letters[0] == letters[letters.len() - 1].inverse() {
        letters.pop();
        letters.remove(0);
    }
    letters
}

/// Decide triviality in pi_1(Sigma_g) by Dehn's algorithm: cyclically reduce,
/// then replace any cyclic subword matching more than half of a cyclic
/// rotation of the relator (or its inverse) by the shorter complement, until
/// the word empties or no replacement applies. Valid because the presentation
/// is C'(1/6) small cancellation for g >= 2.
pub fn is_trivial(w: &ReducedWord, genus: usize) -> Result<bool, SurfaceError> {
    if genus < 2 {
        return Err(SurfaceError::GenusTooSmall(genus));
    }
    if w.rank() != 2 * genus {
        return Err(WordError::RankMismatch(w.rank(), 2 * genus).into());
    }
    let rel = relator(genus)?;
    let rel_len = rel.len(); // 4g
    let min_match = 2 * genus + 1; // strictly more than half

    // All cyclic rotations of the relator and of its inverse.
    let mut rotations: Vec<Vec<Letter>> = Vec::with_capacity(2 * rel_len);
    for base in [rel.letters().to_vec(), rel.inverse().letters().to_vec()] {
        for start in 0..rel_len {
            let mut rot = base[start..].to_vec();
            rot.extend_from_slice(&base[..start]);
            rotations.push(rot);
        }
    }

    let mut cur = cyclic_reduce(w.letters().to_vec());
    loop {
        if cur.is_empty() {
            return Ok(true);
        }
        let n = cur.len();
        let mut replaced = false;
        // Longest matches first: each replacement shrinks the word the most.
        'scan: for match_len in (min_match..=rel_len.min(n)).rev() {
            for start in 0..n {
                'rot: for rot in &rotations {
                    for j in 0..match_len {
                        if cur[(start + j) % n] != rot[j] {
                            continue 'rot;
                        }
                    }
                    // cur cyclically contains p = rot[..match_len]; in the group
                    // p = q^{-1} where q = rot[match_len..], and |q| < |p|.
                    let complement: Vec<Letter> =
                        rot[match_len..].iter().rev().map(|l| l.inverse()).collect();
                    let mut next: Vec<Letter> = complement;
                    for j in match_len..n {
                        next.push(cur[(start + j) % n]);
                    }
                    let reduced = ReducedWord::reduce(next, 2 * genus)?;
                    let next = cyclic_reduce(reduced.letters().to_vec());
                    assert!(next.len() < n, "Dehn replacement must shorten the word");
                    cur = next;
                    replaced = true;
                    break 'scan;
                }
            }
        }
        if !replaced {
            return Ok(false);
        }
    }
}

/// Equality in pi_1(Sigma_g): u = v iff u v^{-1} is trivial.
pub fn surface_equal(u: &ReducedWord, v: &ReducedWord, genus: usize) -> Result<bool, SurfaceError> {
    if u.rank() != v.rank() {
        return Err(SurfaceError::GenusMismatch(u.rank() / 2, v.rank() / 2));
    }
    is_trivial(&u.multiply(&v.inverse())?, genus)
}

/// A subgroup of index m in a genus-g surface group is a surface group of
/// genus m(g-1)+1 (Euler characteristic multiplies by the index).
pub fn finite_index_subgroup_type(genus: usize, index: usize) -> Result<IsoType, SurfaceError> {
    if genus < 2 {
        return Err(SurfaceError::GenusTooSmall(genus));
    }
    if index < 1 {
        return Err(SurfaceError::BadIndex(index));
    }
    Ok(IsoType::new(
        BaseType::Surface(index * (genus - 1) + 1),
        0,
    ))
}

/// An infinite-index normal subgroup of a surface group is free; it is F_inf
/// when nontrivial (inside a container of rank >= 2) and trivial otherwise.
pub fn infinite_index_normal_type(
    container_rank_at_least_2: bool,
    kernel_nontrivial: bool,
) -> Result<IsoType, SurfaceError> {
    match (container_rank_at_least_2, kernel_nontrivial) {
        (_, false) => Ok(IsoType::new(BaseType::Trivial, 0)),
        (true, true) => Ok(IsoType::new(BaseType::FreeInfinite, 0)),
        (false, true) => Err(SurfaceError::InconsistentFlags),
    }
}

/// Exponent vector (abelianization) of a surface word; invariant under
/// relator insertion because the relator abelianizes to zero.
pub fn exponent_vector(w: &ReducedWord) -> Vec<num_bigint::BigInt> {
    w.abelianize()
}

/// Checked triviality: a trivial word must abelianize to zero.
pub fn is_trivial_checked(w: &ReducedWord, genus: usize) -> Result<bool, SurfaceError> {
    let ans = is_trivial(w, genus)?;
    if ans {
        debug_assert!(w.abelianize().iter().all(|x| x.is_zero()));
    }
    Ok(ans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn sw(text: &str, genus: usize) -> ReducedWord {
        ReducedWord::parse(text, Alphabet::Surface { genus }).unwrap()
    }

    #[test]
    fn relator_shape() {
        let r = relator(2).unwrap();
        assert_eq!(r.display(Alphabet::Surface { genus: 2 }), "a1 b1 A1 B1 a2 b2 A2 B2");
        for g in 2..=6 {
            let r = relator(g).unwrap();
            assert_eq!(r.len(), 4 * g);
            assert!(r.abelianize().iter().all(|x| x.is_zero()));
        }
        assert_eq!(relator(1).unwrap_err(), SurfaceError::GenusTooSmall(1));
    }

    #[test]
    fn relator_is_trivial() {
        for g in 2..=4 {
            assert!(is_trivial(&relator(g).unwrap(), g).unwrap());
        }
        assert!(is_trivial(&ReducedWord::identity(4), 2).unwrap());
        assert!(!is_trivial(&sw("a1", 2), 2).unwrap());
        assert!(!is_trivial(&sw("a1 b1 A1 B1", 2), 2).unwrap());
    }

    #[test]
    fn equality_examples() {
        let w = sw("a1 b2 A2", 2);
        assert!(surface_equal(&w, &w, 2).unwrap());
        let ra1 = relator(2).unwrap().multiply(&sw("a1", 2)).unwrap();
        assert!(surface_equal(&ra1, &sw("a1", 2), 2).unwrap());
        assert!(!surface_equal(&sw("a1", 2), &sw("b1", 2), 2).unwrap());
    }

    #[test]
    fn relator_powers_and_inverse() {
        let r = relator(2).unwrap();
        assert!(is_trivial(&r.inverse(), 2).unwrap());
        assert!(is_trivial(&r.multiply(&r).unwrap(), 2).unwrap());
        assert!(is_trivial(&r.pow(3), 2).unwrap());
    }

    fn random_word(rng: &mut impl Rng, genus: usize, len: usize) -> ReducedWord {
        let letters: Vec<Letter> = (0..len)
            .map(|_| Letter::new(rng.gen_range(0..2 * genus), rng.gen()))
            .collect();
        ReducedWord::reduce(letters, 2 * genus).unwrap()
    }

    #[test]
    fn conjugates_of_relator_are_trivial() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let genus = rng.gen_range(2..=3);
            let len = rng.gen_range(0..8);
            let w = random_word(&mut rng, genus, len);
            let conj = relator(genus).unwrap().conjugate_by(&w);
            assert!(is_trivial(&conj, genus).unwrap());
        }
    }

    #[test]
    fn nonzero_exponent_vector_is_nontrivial() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        while checked < 100 {
            let genus = rng.gen_range(2..=3);
            let len = rng.gen_range(1..10);
            let w = random_word(&mut rng, genus, len);
            if w.abelianize().iter().all(|x| x.is_zero()) {
                continue;
            }
            assert!(!is_trivial(&w, genus).unwrap(), "nontrivial abelianization: {w}");
            checked += 1;
        }
    }

    #[test]
    fn exponent_vector_relator_insertion_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let genus = rng.gen_range(2..=3);
            let len = rng.gen_range(0..8);
            let w = random_word(&mut rng, genus, len);
            let pos = rng.gen_range(0..=w.len());
            let mut letters = w.letters()[..pos].to_vec();
            letters.extend_from_slice(relator(genus).unwrap().letters());
            letters.extend_from_slice(&w.letters()[pos..]);
            let spliced = ReducedWord::reduce(letters, 2 * genus).unwrap();
            assert_eq!(spliced.abelianize(), w.abelianize());
            // and the spliced word is the same group element
            assert!(surface_equal(&spliced, &w, genus).unwrap());
        }
    }

    #[test]
    fn product_of_shuffled_commutators_is_trivial() {
        // [a2,b2] equals [a1,b1]^{-1} in genus 2
        let c1 = sw("a1 b1 A1 B1", 2);
        let c2 = sw("a2 b2 A2 B2", 2);
        assert!(surface_equal(&c2, &c1.inverse(), 2).unwrap());
        assert!(!surface_equal(&c2, &c1, 2).unwrap());
    }

    #[test]
    fn subgroup_type_formulas() {
        assert_eq!(
            finite_index_subgroup_type(2, 1).unwrap(),
            IsoType::new(BaseType::Surface(2), 0)
        );
        assert_eq!(
            finite_index_subgroup_type(2, 3).unwrap(),
            IsoType::new(BaseType::Surface(4), 0)
        );
        assert_eq!(
            finite_index_subgroup_type(3, 2).unwrap(),
            IsoType::new(BaseType::Surface(5), 0)
        );
        assert!(finite_index_subgroup_type(2, 0).is_err());

        assert_eq!(
            infinite_index_normal_type(true, true).unwrap(),
            IsoType::new(BaseType::FreeInfinite, 0)
        );
        assert_eq!(
            infinite_index_normal_type(true, false).unwrap(),
            IsoType::new(BaseType::Trivial, 0)
        );
        assert_eq!(
            infinite_index_normal_type(false, false).unwrap(),
            IsoType::new(BaseType::Trivial, 0)
        );
        assert!(infinite_index_normal_type(false, true).is_err());
    }

    #[test]
    fn trivial_words_abelianize_to_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let w = random_word(&mut rng, 2, 5);
            let conj = relator(2).unwrap().conjugate_by(&w);
            assert!(is_trivial_checked(&conj, 2).unwrap());
            assert!(conj.abelianize().iter().all(|x| *x == BigInt::from(0)));
        }
    }
}
