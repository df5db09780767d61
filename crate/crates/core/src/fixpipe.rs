//! The fixed-subgroup pipeline: `Fix phi ≅ p(Fix phi) x Z^s` with
//! `s = rank ker(L - I)`, and the case analysis for the projected part
//! `p(Fix phi) = { u in Fix alpha : (I - L)v = Gamma·ab(u) solvable }`,
//! cross-checked by a brute-force enumeration oracle.

use crate::classify::{BaseType, IsoType};
use crate::fatf::{
    enumerate_reduced_words, Ambient, AmbientKind, EndoError, FixCertificate, GroupElement,
    StdEndo,
};
use crate::intlat::{cokernel, kernel_basis, solve_integer, CokernelStructure, IntMatrix};
use crate::stallings::{schreier_kernel_graph, FiniteAbelianGroup, DEFAULT_COSET_BOUND};
use crate::words::{apply_map, ReducedWord};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

/// The structure of the projected part `p(Fix phi)` inside Fix alpha.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectedKind {
    /// Fix alpha is trivial (or the congruence kills everything).
    Trivial,
    /// The congruence is vacuous on Fix alpha: `p(Fix phi) = Fix alpha`.
    FullFixAlpha,
    /// The congruence cuts out a subgroup of finite index `index >= 2`.
    FiniteIndexKernel { index: usize },
    /// The congruence image is infinite: `p(Fix phi) ≅ F_inf` (the kernel
    /// contains all commutators of a rank >= 2 container).
    InfinitelyGenerated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedPart {
    pub kind: ProjectedKind,
    /// Generators of the projected part as ambient words (finite cases only;
    /// for a surface container these generate together with the relator).
    pub generators: Vec<ReducedWord>,
    /// Isomorphism type of the projected part alone (abelian rank 0 unless
    /// normalization folded a rank-1 free factor).
    pub iso: IsoType,
}

/// Full output of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixDescription {
    /// Rank of the fixed lattice ker(L - I).
    pub s: usize,
    pub lattice_basis: Vec<Vec<BigInt>>,
    pub projected: ProjectedPart,
    /// Canonical type of the whole fixed subgroup.
    pub iso: IsoType,
    /// Embedded generators: each projected generator paired with its
    /// particular solution of (I - L)v = Gamma·ab(u), then the lattice basis
    /// paired with the identity word.
    pub witnesses: Vec<GroupElement>,
}

/// `ker(L - I)`: the abelian direct factor Z^s of the fixed subgroup.
pub fn fixed_lattice(l: &IntMatrix) -> Result<(usize, Vec<Vec<BigInt>>), EndoError> {
    let m = IntMatrix::identity(l.rows()).sub(l)?;
    let basis = kernel_basis(&m);
    Ok((basis.len(), basis))
}

/// Does `(I - L)v = Gamma·ab(u)` have an integer solution? This is the
/// membership condition cutting `p(Fix phi)` out of Fix alpha.
pub fn congruence_holds(
    gamma: &IntMatrix,
    l: &IntMatrix,
    u: &ReducedWord,
) -> Result<bool, EndoError> {
    Ok(congruence_solution(gamma, l, u)?.is_some())
}

/// A particular solution of `(I - L)v = Gamma·ab(u)`, if any.
pub fn congruence_solution(
    gamma: &IntMatrix,
    l: &IntMatrix,
    u: &ReducedWord,
) -> Result<Option<Vec<BigInt>>, EndoError> {
    let m = IntMatrix::identity(l.rows()).sub(l)?;
    Ok(solve_integer(&m, &gamma.matvec(&u.abelianize())?)?)
}

/// The container Fix alpha, uniformly: its generators as ambient words and
/// its isomorphism type.
struct Container {
    generators: Vec<ReducedWord>,
    /// Whole surface group containers are the one non-free case.
    whole_surface: bool,
    iso: IsoType,
}

fn container_of(cert: &FixCertificate, ambient: &Ambient) -> Container {
    let n = ambient.word_rank();
    match cert {
        FixCertificate::WholeGroup => Container {
            generators: (0..n).map(|i| ReducedWord::generator(i, n)).collect(),
            whole_surface: ambient.kind == AmbientKind::Surface,
            iso: match ambient.kind {
                AmbientKind::Free => IsoType::new(BaseType::Free(ambient.g), 0),
                AmbientKind::Surface => IsoType::new(BaseType::Surface(ambient.g), 0),
            },
        },
        FixCertificate::FreeBasis(basis) => Container {
            generators: basis.clone(),
            whole_surface: false,
            iso: IsoType::new(BaseType::Free(basis.len()), 0),
        },
    }
}

fn h_images(
    q: &CokernelStructure,
    gamma: &IntMatrix,
    gens: &[ReducedWord],
) -> Result<Vec<crate::intlat::CokernelCoords>, EndoError> {
    gens.iter()
        .map(|u| Ok(q.project(&gamma.matvec(&u.abelianize())?)?))
        .collect()
}

/// Case analysis for the projected part.
pub fn projected_fix(
    cert: &FixCertificate,
    gamma: &IntMatrix,
    l: &IntMatrix,
    ambient: &Ambient,
) -> Result<ProjectedPart, EndoError> {
    let cont = container_of(cert, ambient);
    let r = cont.generators.len();
    if r == 0 {
        return Ok(ProjectedPart {
            kind: ProjectedKind::Trivial,
            generators: Vec::new(),
            iso: IsoType::trivial(),
        });
    }

    let m = IntMatrix::identity(l.rows()).sub(l)?;
    let q = cokernel(&m);
    let images = h_images(&q, gamma, &cont.generators)?;

    if images.iter().all(|c| c.is_zero()) {
        return Ok(ProjectedPart {
            kind: ProjectedKind::FullFixAlpha,
            generators: cont.generators,
            iso: cont.iso,
        });
    }

    let image_finite = images.iter().all(|c| c.free.iter().all(|x| x.is_zero()));
    if image_finite {
        // Schreier coset graph of ker(h) over the finite image subgroup.
        let group = FiniteAbelianGroup::new(q.torsion().to_vec());
        let torsion_images: Vec<Vec<BigInt>> =
            images.iter().map(|c| c.torsion.clone()).collect();
        let graph = schreier_kernel_graph(r, &group, &torsion_images, DEFAULT_COSET_BOUND)?;
        let index = graph.index().expect("coset graphs are complete");
        debug_assert!(index >= 2, "zero image is the FullFixAlpha case");
        let (generators, iso) = if cont.whole_surface {
            let gens: Result<Vec<ReducedWord>, _> = graph
                .basis()
                .iter()
                .map(|w| apply_map(&cont.generators, w))
                .collect();
            (
                gens?,
                crate::surface::finite_index_subgroup_type(ambient.g, index)?,
            )
        } else if r == 1 {
            // index-m subgroup of Z: still infinite cyclic
            (
                vec![cont.generators[0].pow(index as i64)],
                IsoType::new(BaseType::Free(1), 0),
            )
        } else {
            let gens: Result<Vec<ReducedWord>, _> = graph
                .basis()
                .iter()
                .map(|w| apply_map(&cont.generators, w))
                .collect();
            (
                gens?,
                IsoType::new(BaseType::Free(index * (r - 1) + 1), 0),
            )
        };
        return Ok(ProjectedPart {
            kind: ProjectedKind::FiniteIndexKernel { index },
            generators,
            iso,
        });
    }

    // Infinite image: the kernel is an infinite-index normal subgroup of the
    // container. It contains every commutator, so it is nontrivial iff the
    // container is non-abelian (rank >= 2 free, or a whole surface group).
    if cont.whole_surface || r >= 2 {
        Ok(ProjectedPart {
            kind: ProjectedKind::InfinitelyGenerated,
            generators: Vec::new(),
            iso: IsoType::new(BaseType::FreeInfinite, 0),
        })
    } else {
        // rank-1 container, h injective on it: only the identity survives
        Ok(ProjectedPart {
            kind: ProjectedKind::Trivial,
            generators: Vec::new(),
            iso: IsoType::trivial(),
        })
    }
}

/// The full pipeline: certificate -> lattice + projected part -> canonical
/// type and embedded, verified witnesses.
pub fn fix_subgroup(e: &StdEndo) -> Result<FixDescription, EndoError> {
    crate::fatf::validate_certificate(&e.alpha, &e.ambient, None)?;
    let (s, lattice_basis) = fixed_lattice(&e.l)?;
    let projected = projected_fix(&e.alpha.fix_certificate, &e.gamma, &e.l, &e.ambient)?;
    let iso = IsoType::new(projected.iso.base(), projected.iso.abelian_rank() + s);

    let mut witnesses = Vec::new();
    for u in &projected.generators {
        let v = congruence_solution(&e.gamma, &e.l, u)?
            .expect("projected generators satisfy the congruence");
        witnesses.push(GroupElement::new(u.clone(), v));
    }
    for b in &lattice_basis {
        witnesses.push(GroupElement::new(
            ReducedWord::identity(e.ambient.word_rank()),
            b.clone(),
        ));
    }
    for x in &witnesses {
        debug_assert!(e.fixes(x)?, "emitted witness must be fixed");
    }

    Ok(FixDescription {
        s,
        lattice_basis,
        projected,
        iso,
        witnesses,
    })
}

/// A finite prefix of kernel elements for the infinitely generated case:
/// conjugates `u^n w u^{-n}` with h(u) != 0 and h(w) = 0, paired with their
/// particular solutions. `count` conjugates for n = 0, 1, -1, 2, -2, ...
pub fn lazy_infinite_witnesses(
    e: &StdEndo,
    count: usize,
) -> Result<Vec<GroupElement>, EndoError> {
    let cont = container_of(&e.alpha.fix_certificate, &e.ambient);
    let m = IntMatrix::identity(e.l.rows()).sub(&e.l)?;
    let q = cokernel(&m);
    let images = h_images(&q, &e.gamma, &cont.generators)?;
    let moving = cont
        .generators
        .iter()
        .zip(&images)
        .find(|(_, c)| !c.is_zero())
        .map(|(g, _)| g.clone())
        .expect("the infinite case has a generator with nonzero image");
    let seed = match cont
        .generators
        .iter()
        .zip(&images)
        .find(|(g, c)| c.is_zero() && !g.is_empty())
    {
        Some((g, _)) => g.clone(),
        // all generators have nonzero image: fall back to a commutator,
        // which h always kills
        None => {
            let a = &cont.generators[0];
            let b = cont
                .generators
                .iter()
                .skip(1)
                .find(|g| *g != a)
                .expect("rank >= 2 container");
            a.multiply(b)?
                .multiply(&a.inverse())?
                .multiply(&b.inverse())?
        }
    };
    let mut out = Vec::new();
    let mut n: i64 = 0;
    while out.len() < count {
        let word = seed.conjugate_by(&moving.pow(n));
        let v = congruence_solution(&e.gamma, &e.l, &word)?
            .expect("kernel elements satisfy the congruence");
        let x = GroupElement::new(word, v);
        debug_assert!(e.fixes(&x)?);
        out.push(x);
        n = if n >= 0 { -n - 1 } else { -n };
    }
    Ok(out)
}

/// One brute-force fixed element: the word with its particular vector part.
/// The full solution set over this word is `vector + fixed lattice`.
pub fn brute_fixed_elements(
    e: &StdEndo,
    max_len: usize,
) -> Result<Vec<GroupElement>, EndoError> {
    let n = e.ambient.word_rank();
    let mut out = Vec::new();
    for u in enumerate_reduced_words(n, max_len)? {
        let image = e.alpha.apply(&u)?;
        // cheap pre-filters before the (surface) word problem
        let fixed_word = if image == u {
            true
        } else if image.abelianize() != u.abelianize() {
            false
        } else {
            e.ambient.word_equal(&image, &u)?
        };
        if !fixed_word {
            continue;
        }
        if let Some(v) = congruence_solution(&e.gamma, &e.l, &u)? {
            let x = GroupElement::new(u, v);
            debug_assert!(e.fixes(&x)?);
            out.push(x);
        }
    }
    Ok(out)
}

/// The index bound of the finite-index case: `index <= |det(L - I)|^r` where
/// r is the certified rank of Fix alpha. Vacuously true otherwise.
pub fn index_bound_check(e: &StdEndo, desc: &FixDescription) -> Result<bool, EndoError> {
    let ProjectedKind::FiniteIndexKernel { index } = desc.projected.kind else {
        return Ok(true);
    };
    let m = IntMatrix::identity(e.l.rows()).sub(&e.l)?;
    let det = m.determinant()?;
    if det.is_zero() {
        return Ok(true);
    }
    let r = container_of(&e.alpha.fix_certificate, &e.ambient)
        .generators
        .len();
    let mut bound = BigInt::from(1);
    let abs_det = if det < BigInt::zero() { -det } else { det };
    for _ in 0..r {
        bound *= &abs_det;
    }
    Ok(BigInt::from(index) <= bound)
}

impl FixDescription {
    /// JSON output with exact integers; the iso string is the canonical form.
    pub fn to_json(&self, ambient: &Ambient) -> String {
        let alphabet = ambient.alphabet();
        let big = |x: &BigInt| {
            let n: serde_json::Number = x
                .to_string()
                .parse()
                .expect("integer strings parse as JSON numbers");
            Value::Number(n)
        };
        let mut projected = serde_json::Map::new();
        let tag = match self.projected.kind {
            ProjectedKind::Trivial => "Trivial",
            ProjectedKind::FullFixAlpha => "FullFixAlpha",
            ProjectedKind::FiniteIndexKernel { .. } => "FiniteIndexKernel",
            ProjectedKind::InfinitelyGenerated => "InfinitelyGenerated",
        };
        projected.insert("tag".into(), json!(tag));
        if let ProjectedKind::FiniteIndexKernel { index } = self.projected.kind {
            projected.insert("index".into(), json!(index));
        }
        if let crate::classify::Rank::Finite(r) = self.projected.iso.rank() {
            projected.insert("rank".into(), json!(r));
        }
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|x| {
                json!([
                    x.word.display(alphabet),
                    x.vector.iter().map(big).collect::<Vec<_>>()
                ])
            })
            .collect();
        let value = json!({
            "s": self.s,
            "projected": Value::Object(projected),
            "iso": self.iso.to_string(),
            "witnesses": witnesses,
        });
        serde_json::to_string_pretty(&value).expect("description serializes")
    }
}
