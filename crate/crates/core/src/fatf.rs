//! Ambient groups `F_g x Z^k` and `pi_1(Sigma_g) x Z^k`, their elements, and
//! standard-form endomorphisms `phi(u, v) = (alpha(u), Gamma·ab(u) + L·v)`.

use crate::intlat::{IntMatrix, MatrixError};
use crate::stallings::{GraphError, SubgroupGraph};
use crate::surface::{surface_equal, SurfaceError};
use crate::words::{apply_map, identity_images, Alphabet, Letter, ReducedWord, WordError};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EndoError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("genus/rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("ambient mismatch")]
    AmbientMismatch,
    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    MatrixShape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("alpha has {got} images, expected {expected}")]
    ImageCount { got: usize, expected: usize },
    #[error("vector part has length {got}, expected {expected}")]
    VectorLength { got: usize, expected: usize },
    #[error("certificate word `{0}` is not fixed by alpha")]
    CertificateNotFixed(String),
    #[error("a WholeGroup certificate requires alpha to be the identity")]
    WholeGroupNotIdentity,
    #[error("cannot parse endomorphism JSON: {0}")]
    BadJson(String),
    #[error("word enumeration budget exceeded (bound {0})")]
    BudgetExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbientKind {
    Free,
    Surface,
}

/// An ambient group `F_g x Z^k` (kind Free) or `pi_1(Sigma_g) x Z^k`
/// (kind Surface), with `g >= 2`, `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambient {
    pub kind: AmbientKind,
    pub g: usize,
    pub k: usize,
}

impl Ambient {
    pub fn free(g: usize, k: usize) -> Result<Self, EndoError> {
        if g < 2 {
            return Err(EndoError::RankTooSmall(g));
        }
        Ok(Ambient {
            kind: AmbientKind::Free,
            g,
            k,
        })
    }

    pub fn surface(g: usize, k: usize) -> Result<Self, EndoError> {
        if g < 2 {
            return Err(EndoError::RankTooSmall(g));
        }
        Ok(Ambient {
            kind: AmbientKind::Surface,
            g,
            k,
        })
    }

    /// Number of word generators: g for free, 2g for surface.
    pub fn word_rank(&self) -> usize {
        match self.kind {
            AmbientKind::Free => self.g,
            AmbientKind::Surface => 2 * self.g,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self.kind {
            AmbientKind::Free => Alphabet::Free { rank: self.g },
            AmbientKind::Surface => Alphabet::Surface { genus: self.g },
        }
    }

    /// Equality of word parts as group elements: free reduction for free
    /// ambients, Dehn's algorithm for surface ambients.
    pub fn word_equal(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool, EndoError> {
        match self.kind {
            AmbientKind::Free => Ok(u == v),
            AmbientKind::Surface => Ok(surface_equal(u, v, self.g)?),
        }
    }
}

/// An element `(u, v)` of the ambient group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub word: ReducedWord,
    pub vector: Vec<BigInt>,
}

impl GroupElement {
    pub fn new(word: ReducedWord, vector: Vec<BigInt>) -> Self {
        GroupElement { word, vector }
    }

    pub fn identity(ambient: &Ambient) -> Self {
        GroupElement {
            word: ReducedWord::identity(ambient.word_rank()),
            vector: vec![BigInt::zero(); ambient.k],
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement, EndoError> {
        if self.vector.len() != other.vector.len() {
            return Err(EndoError::VectorLength {
                got: other.vector.len(),
                expected: self.vector.len(),
            });
        }
        Ok(GroupElement {
            word: self.word.multiply(&other.word)?,
            vector: self
                .vector
                .iter()
                .zip(&other.vector)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// The certificate describing Fix(alpha) inside the word factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixCertificate {
    /// alpha is the identity, Fix(alpha) is the whole word factor.
    WholeGroup,
    /// Fix(alpha) is free with this basis (also used for free subgroups of a
    /// surface group — infinite-index surface subgroups are free).
    FreeBasis(Vec<ReducedWord>),
}

/// The word-factor map alpha together with its fixed-subgroup certificate.
/// Completeness of the certificate (Fix alpha is no larger) is trusted unless
/// brute-checked via [`validate_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSpec {
    pub images: Vec<ReducedWord>,
    pub fix_certificate: FixCertificate,
    pub certified_complete: bool,
}

impl AlphaSpec {
    pub fn identity(ambient: &Ambient) -> Self {
        AlphaSpec {
            images: identity_images(ambient.word_rank()),
            fix_certificate: FixCertificate::WholeGroup,
            certified_complete: true,
        }
    }

    pub fn apply(&self, u: &ReducedWord) -> Result<ReducedWord, EndoError> {
        Ok(apply_map(&self.images, u)?)
    }
}

/// A standard-form endomorphism `phi(u, v) = (alpha(u), Gamma·ab(u) + L·v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StdEndo {
    pub ambient: Ambient,
    pub alpha: AlphaSpec,
    pub gamma: IntMatrix,
    pub l: IntMatrix,
    pub claims_automorphism: bool,
    pub inverse: Option<Box<StdEndo>>,
}

impl StdEndo {
    /// Shape-check the parts and assemble.
    pub fn new(
        ambient: Ambient,
        alpha: AlphaSpec,
        gamma: IntMatrix,
        l: IntMatrix,
        claims_automorphism: bool,
        inverse: Option<Box<StdEndo>>,
    ) -> Result<Self, EndoError> {
        let n = ambient.word_rank();
        if alpha.images.len() != n {
            return Err(EndoError::ImageCount {
                got: alpha.images.len(),
                expected: n,
            });
        }
        for img in &alpha.images {
            if img.rank() != n {
                return Err(WordError::RankMismatch(img.rank(), n).into());
            }
        }
        if gamma.rows() != ambient.k || gamma.cols() != n {
            return Err(EndoError::MatrixShape {
                expected_rows: ambient.k,
                expected_cols: n,
                rows: gamma.rows(),
                cols: gamma.cols(),
            });
        }
        if l.rows() != ambient.k || l.cols() != ambient.k {
            return Err(EndoError::MatrixShape {
                expected_rows: ambient.k,
                expected_cols: ambient.k,
                rows: l.rows(),
                cols: l.cols(),
            });
        }
        Ok(StdEndo {
            ambient,
            alpha,
            gamma,
            l,
            claims_automorphism,
            inverse,
        })
    }

    pub fn identity(ambient: Ambient) -> Self {
        let k = ambient.k;
        StdEndo::new(
            ambient,
            AlphaSpec::identity(&ambient),
            IntMatrix::zero(k, ambient.word_rank()),
            IntMatrix::identity(k),
            true,
            None,
        )
        .expect("identity endomorphism is well-formed")
    }

    /// Evaluate: `(u, v) -> (alpha(u), Gamma·ab(u) + L·v)`.
    pub fn eval(&self, x: &GroupElement) -> Result<GroupElement, EndoError> {
        if x.vector.len() != self.ambient.k {
            return Err(EndoError::VectorLength {
                got: x.vector.len(),
                expected: self.ambient.k,
            });
        }
        let word = self.alpha.apply(&x.word)?;
        let gu = self.gamma.matvec(&x.word.abelianize())?;
        let lv = self.l.matvec(&x.vector)?;
        let vector = gu.iter().zip(&lv).map(|(a, b)| a + b).collect();
        Ok(GroupElement { word, vector })
    }

    /// Is `x` fixed by this endomorphism (word part compared as group
    /// elements of the ambient)?
    pub fn fixes(&self, x: &GroupElement) -> Result<bool, EndoError> {
        let y = self.eval(x)?;
        Ok(self.ambient.word_equal(&y.word, &x.word)? && y.vector == x.vector)
    }

    /// The abelianization matrix of alpha (columns = abelianized images).
    pub fn alpha_abelianization(&self) -> IntMatrix {
        crate::words::abelianization_matrix(&self.alpha.images)
    }
}

/// Functional composition: `compose(e1, e2)` acts as `x -> e1(e2(x))`, with
/// `alpha = alpha1 ∘ alpha2`, `Gamma = Gamma1·Ab(alpha2) + L1·Gamma2`,
/// `L = L1·L2`. The result carries no fixed-subgroup certificate.
pub fn compose(e1: &StdEndo, e2: &StdEndo) -> Result<StdEndo, EndoError> {
    if e1.ambient != e2.ambient {
        return Err(EndoError::AmbientMismatch);
    }
    let images: Result<Vec<ReducedWord>, WordError> = e2
        .alpha
        .images
        .iter()
        .map(|img| apply_map(&e1.alpha.images, img))
        .collect();
    let gamma = e1
        .gamma
        .mul(&e2.alpha_abelianization())?
        .add(&e1.l.mul(&e2.gamma)?)?;
    StdEndo::new(
        e1.ambient,
        AlphaSpec {
            images: images?,
            fix_certificate: FixCertificate::FreeBasis(Vec::new()),
            certified_complete: false,
        },
        gamma,
        e1.l.mul(&e2.l)?,
        false,
        None,
    )
}

/// True iff `e` and `e_inv` are mutually inverse: both compositions act as the
/// identity on every word generator and on Z^k.
pub fn verify_automorphism(e: &StdEndo, e_inv: &StdEndo) -> Result<bool, EndoError> {
    if e.ambient != e_inv.ambient {
        return Err(EndoError::AmbientMismatch);
    }
    for (first, second) in [(e, e_inv), (e_inv, e)] {
        let c = compose(first, second)?;
        let n = c.ambient.word_rank();
        for i in 0..n {
            let gen = ReducedWord::generator(i, n);
            if !c.ambient.word_equal(&c.alpha.images[i], &gen)? {
                return Ok(false);
            }
            // the vector part of the image of (a_i, 0) must be zero;
            // for surface ambients Gamma factors through abelianization, so
            // generator columns determine it
            let col = c.gamma.matvec(&gen.abelianize())?;
            if col.iter().any(|x| !x.is_zero()) {
                return Ok(false);
            }
        }
        if c.l != IntMatrix::identity(c.ambient.k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extend by an extra abelian block: the new ambient has `k + k'` abelian
/// directions, `L` becomes block-diagonal, and `Gamma` gains zero rows.
/// `Fix` of the result is `Fix(e) x Fix(extra)`.
pub fn direct_sum(e: &StdEndo, extra: &IntMatrix) -> Result<StdEndo, EndoError> {
    if !extra.is_square() {
        return Err(EndoError::MatrixShape {
            expected_rows: extra.rows(),
            expected_cols: extra.rows(),
            rows: extra.rows(),
            cols: extra.cols(),
        });
    }
    let inverse = match &e.inverse {
        Some(inv) => {
            // invertible 1x1/diagonal-style blocks: reuse extra only when it
            // is its own inverse; otherwise drop the witness
            let square = extra.mul(extra)?;
            if square == IntMatrix::identity(extra.rows()) {
                Some(Box::new(direct_sum_no_inverse(inv, extra)?))
            } else {
                None
            }
        }
        None => None,
    };
    let mut out = direct_sum_no_inverse(e, extra)?;
    out.claims_automorphism = e.claims_automorphism;
    out.inverse = inverse;
    Ok(out)
}

fn direct_sum_no_inverse(e: &StdEndo, extra: &IntMatrix) -> Result<StdEndo, EndoError> {
    let mut ambient = e.ambient;
    ambient.k += extra.rows();
    let n = ambient.word_rank();
    let gamma = IntMatrix::from_fn(ambient.k, n, |i, j| {
        if i < e.ambient.k {
            e.gamma.get(i, j).clone()
        } else {
            BigInt::zero()
        }
    });
    StdEndo::new(
        ambient,
        e.alpha.clone(),
        gamma,
        e.l.block_diag(extra),
        false,
        None,
    )
}

/// Result of validating an alpha certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Every certificate word (or every generator, for WholeGroup) is fixed.
    pub verified_fixed: bool,
    /// When a brute bound was given: no fixed word of length <= bound lies
    /// outside the certified subgroup.
    pub completeness_brute_checked: Option<usize>,
}

/// Check that every certificate word is fixed by alpha (hard error if not),
/// and optionally brute-check completeness up to a word-length bound.
pub fn validate_certificate(
    spec: &AlphaSpec,
    ambient: &Ambient,
    brute_length: Option<usize>,
) -> Result<ValidationReport, EndoError> {
    let n = ambient.word_rank();
    match &spec.fix_certificate {
        FixCertificate::WholeGroup => {
            for i in 0..n {
                let gen = ReducedWord::generator(i, n);
                if !ambient.word_equal(&spec.apply(&gen)?, &gen)? {
                    return Err(EndoError::WholeGroupNotIdentity);
                }
            }
            Ok(ValidationReport {
                verified_fixed: true,
                completeness_brute_checked: brute_length,
            })
        }
        FixCertificate::FreeBasis(basis) => {
            for w in basis {
                if !ambient.word_equal(&spec.apply(w)?, w)? {
                    return Err(EndoError::CertificateNotFixed(
                        w.display(ambient.alphabet()),
                    ));
                }
            }
            let mut checked = None;
            if let Some(bound) = brute_length {
                let graph = SubgroupGraph::from_basis(basis, n)?;
                for u in enumerate_reduced_words(n, bound)? {
                    if ambient.word_equal(&spec.apply(&u)?, &u)? && !graph.member(&u)? {
                        return Err(EndoError::CertificateNotFixed(
                            u.display(ambient.alphabet()),
                        ));
                    }
                }
                checked = Some(bound);
            }
            Ok(ValidationReport {
                verified_fixed: true,
                completeness_brute_checked: checked,
            })
        }
    }
}

/// All freely reduced words of length <= max_len, lexicographic by length then
/// letters. Guarded against blow-up.
pub fn enumerate_reduced_words(
    rank: usize,
    max_len: usize,
) -> Result<Vec<ReducedWord>, EndoError> {
    const BUDGET: usize = 10_000_000;
    let mut out = vec![ReducedWord::identity(rank)];
    let mut frontier = vec![ReducedWord::identity(rank)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for u in &frontier {
            for g in 0..rank {
                for positive in [true, false] {
                    let l = Letter::new(g, positive);
                    if u.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut letters = u.letters().to_vec();
                    letters.push(l);
                    next.push(ReducedWord::reduce(letters, rank)?);
                }
            }
        }
        if out.len() + next.len() > BUDGET {
            return Err(EndoError::BudgetExceeded(BUDGET));
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

// ---- JSON round trip ----

#[derive(Serialize, Deserialize)]
struct AmbientRepr {
    kind: String,
    g: usize,
    k: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FixRepr {
    Whole(String),
    Basis(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct AlphaRepr {
    images: Vec<String>,
    fix: FixRepr,
}

#[derive(Serialize, Deserialize)]
struct EndoRepr {
    ambient: AmbientRepr,
    alpha: AlphaRepr,
    gamma: IntMatrix,
    #[serde(rename = "L")]
    l: IntMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    inverse: Option<Box<EndoRepr>>,
}

fn to_repr(e: &StdEndo) -> EndoRepr {
    let alphabet = e.ambient.alphabet();
    EndoRepr {
        ambient: AmbientRepr {
            kind: match e.ambient.kind {
                AmbientKind::Free => "free".to_string(),
                AmbientKind::Surface => "surface".to_string(),
            },
            g: e.ambient.g,
            k: e.ambient.k,
        },
        alpha: AlphaRepr {
            images: e
                .alpha
                .images
                .iter()
                .map(|w| w.display(alphabet))
                .collect(),
            fix: match &e.alpha.fix_certificate {
                FixCertificate::WholeGroup => FixRepr::Whole("whole".to_string()),
                FixCertificate::FreeBasis(b) => {
                    FixRepr::Basis(b.iter().map(|w| w.display(alphabet)).collect())
                }
            },
        },
        gamma: e.gamma.clone(),
        l: e.l.clone(),
        inverse: e.inverse.as_ref().map(|inv| Box::new(to_repr(inv))),
    }
}

fn from_repr(r: &EndoRepr) -> Result<StdEndo, EndoError> {
    let ambient = match r.ambient.kind.as_str() {
        "free" => Ambient::free(r.ambient.g, r.ambient.k)?,
        "surface" => Ambient::surface(r.ambient.g, r.ambient.k)?,
        other => return Err(EndoError::BadJson(format!("unknown ambient kind `{other}`"))),
    };
    let alphabet = ambient.alphabet();
    let images: Result<Vec<ReducedWord>, WordError> = r
        .alpha
        .images
        .iter()
        .map(|t| ReducedWord::parse(t, alphabet))
        .collect();
    let fix_certificate = match &r.alpha.fix {
        FixRepr::Whole(tag) if tag == "whole" => FixCertificate::WholeGroup,
        FixRepr::Whole(tag) => {
            return Err(EndoError::BadJson(format!("unknown fix tag `{tag}`")))
        }
        FixRepr::Basis(words) => {
            let basis: Result<Vec<ReducedWord>, WordError> = words
                .iter()
                .map(|t| ReducedWord::parse(t, alphabet))
                .collect();
            FixCertificate::FreeBasis(basis?)
        }
    };
    let inverse = match &r.inverse {
        Some(inv) => Some(Box::new(from_repr(inv)?)),
        None => None,
    };
    let claims = inverse.is_some();
    StdEndo::new(
        ambient,
        AlphaSpec {
            images: images?,
            fix_certificate,
            certified_complete: true,
        },
        r.gamma.clone(),
        r.l.clone(),
        claims,
        inverse,
    )
}

impl StdEndo {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&to_repr(self)).expect("endomorphism serializes")
    }

    pub fn from_json(text: &str) -> Result<StdEndo, EndoError> {
        let repr: EndoRepr =
            serde_json::from_str(text).map_err(|e| EndoError::BadJson(e.to_string()))?;
        from_repr(&repr)
    }
}
