//! Canonical isomorphism types of candidate fixed subgroups, and the
//! aut-fixed decision procedures for the six ambient families
//! `F_g`, `pi_1(Sigma_g)`, `F_g x Z`, `Sigma_g x Z`, `F_g x Z^k`,
//! `Sigma_g x Z^k` (k >= 2).

use crate::fatf::{Ambient, AmbientKind};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("cannot parse subgroup type `{0}`")]
    BadTypeString(String),
    #[error("index must be at least 1, got {0}")]
    BadIndex(usize),
    #[error("rank must be at least 2, got {0}")]
    BadRank(usize),
}

/// Non-abelian factor of a canonical isomorphism type. `Free(t)` always has
/// `t >= 2` and `Surface(r)` always has `r >= 2` in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseType {
    Trivial,
    Free(usize),
    FreeInfinite,
    Surface(usize),
}

/// A canonical isomorphism type `base x Z^s`. Construction normalizes:
/// `F_0 x Z^s -> Z^s` and `F_1 x Z^s -> Z^{s+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoType {
    base: BaseType,
    s: usize,
}

/// Rank of a finitely or infinitely generated group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

/// Number of aut-fixed isomorphism classes in an ambient group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(usize),
    Infinite,
}

/// Outcome of an aut-fixed query: the answer, the classification theorem that
/// decided it, and a construction recipe realizing it when the catalog has one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutFixedVerdict {
    pub answer: bool,
    pub witness: Option<&'static str>,
    pub theorem_tag: &'static str,
}

impl IsoType {
    pub fn new(base: BaseType, s: usize) -> Self {
        match base {
            BaseType::Free(0) => IsoType {
                base: BaseType::Trivial,
                s,
            },
            BaseType::Free(1) => IsoType {
                base: BaseType::Trivial,
                s: s + 1,
            },
            BaseType::Surface(r) => {
                assert!(r >= 2, "surface genus below 2 is not a canonical base");
                IsoType { base, s }
            }
            _ => IsoType { base, s },
        }
    }

    pub fn trivial() -> Self {
        IsoType::new(BaseType::Trivial, 0)
    }

    pub fn base(&self) -> BaseType {
        self.base
    }

    pub fn abelian_rank(&self) -> usize {
        self.s
    }

    /// Direct product of two types, renormalized.
    pub fn product(&self, other: &IsoType) -> Option<IsoType> {
        match (self.base, other.base) {
            (b, BaseType::Trivial) => Some(IsoType::new(b, self.s + other.s)),
            (BaseType::Trivial, b) => Some(IsoType::new(b, self.s + other.s)),
            _ => None, // two non-abelian factors never arise as a fixed subgroup here
        }
    }

    pub fn rank(&self) -> Rank {
        match self.base {
            BaseType::Trivial => Rank::Finite(self.s),
            BaseType::Free(t) => Rank::Finite(t + self.s),
            BaseType::Surface(r) => Rank::Finite(2 * r + self.s),
            BaseType::FreeInfinite => Rank::Infinite,
        }
    }
}

pub fn normalize_iso(base: BaseType, s: usize) -> IsoType {
    IsoType::new(base, s)
}

/// Equality of canonical types. Free and surface bases never compare equal;
/// `FreeInfinite x Z^s` types are distinguished by their centers `Z^s`.
pub fn iso_equal(a: &IsoType, b: &IsoType) -> bool {
    a == b
}

pub fn rank_of(a: &IsoType) -> Rank {
    a.rank()
}

/// Index-m subgroups of F_g are free of rank m(g-1)+1 (Schreier).
pub fn schreier_rank(m: usize, g: usize) -> Result<usize, ClassifyError> {
    if m < 1 {
        return Err(ClassifyError::BadIndex(m));
    }
    if g < 2 {
        return Err(ClassifyError::BadRank(g));
    }
    Ok(m * (g - 1) + 1)
}

/// Whether `a` occurs as a subgroup of the ambient at all (finitely generated
/// subgroups are F_t x Z^s or Finf x Z^s with s <= k; surface ambients also
/// admit Surface(m(g-1)+1) x Z^s from finite-index subgroups).
pub fn subgroup_realizable(ambient: &Ambient, a: &IsoType) -> bool {
    let (g, k) = (ambient.g, ambient.k);
    match a.base {
        // Z^{k+1} embeds as <a_1> x Z^k
        BaseType::Trivial => a.s <= k + 1,
        BaseType::Free(_) | BaseType::FreeInfinite => a.s <= k,
        BaseType::Surface(r) => {
            ambient.kind == AmbientKind::Surface && a.s <= k && (r - 1) % (g - 1) == 0
        }
    }
}

/// The aut-fixed decision, dispatching on the six ambient families.
pub fn is_aut_fixed(ambient: &Ambient, a: &IsoType) -> AutFixedVerdict {
    let no = |tag| AutFixedVerdict {
        answer: false,
        witness: None,
        theorem_tag: tag,
    };
    let yes = |tag, witness| AutFixedVerdict {
        answer: true,
        witness,
        theorem_tag: tag,
    };
    if !subgroup_realizable(ambient, a) {
        return no("not a subgroup");
    }
    let (g, k, s) = (ambient.g, ambient.k, a.s);
    match (ambient.kind, k) {
        (AmbientKind::Free, 0) => {
            // F_t for 0 <= t <= g
            let tag = "Prop 2.7";
            let ok = match a.base {
                BaseType::Trivial => s <= 1,
                BaseType::Free(t) => s == 0 && t <= g,
                _ => false,
            };
            if ok {
                yes(tag, Some("prop27"))
            } else {
                no(tag)
            }
        }
        (AmbientKind::Surface, 0) => {
            // pi_1(Sigma_g) itself, or F_t for 0 <= t < 2g
            let tag = "Prop 2.9";
            match a.base {
                BaseType::Trivial if s <= 1 => yes(tag, None),
                BaseType::Free(t) if s == 0 && t <= 2 * g - 1 => {
                    let witness = (t == 2 * g - 1).then_some("surface_psi");
                    yes(tag, witness)
                }
                BaseType::Surface(r) if s == 0 && r == g => yes(tag, None),
                _ => no(tag),
            }
        }
        (AmbientKind::Free, 1) => {
            // F_{2t-1} (1 <= t <= g), F_t x Z^s (t <= g, s <= 1), Finf x Z
            let tag = "Thm 3.3";
            let ok = match a.base {
                BaseType::Trivial => s <= 2,
                BaseType::Free(t) => match s {
                    0 => t <= g || (t % 2 == 1 && t <= 2 * g - 1),
                    1 => t <= g,
                    _ => false,
                },
                BaseType::FreeInfinite => s == 1,
                BaseType::Surface(_) => false,
            };
            if ok {
                let witness = match a.base {
                    BaseType::FreeInfinite => Some("aleph"),
                    _ => Some("thm33"),
                };
                yes(tag, witness)
            } else {
                no(tag)
            }
        }
        (AmbientKind::Surface, 1) => {
            // F_{2t-1} (t < 2g), Sigma_{2g-1}, Finf x Z, Sigma_g x Z^s,
            // F_t x Z^s (t < 2g, s <= 1)
            let tag = "Thm 4.3";
            let ok = match a.base {
                BaseType::Trivial => s <= 2,
                BaseType::Free(t) => match s {
                    0 => t <= 2 * g - 1 || (t % 2 == 1 && t <= 4 * g - 3),
                    1 => t <= 2 * g - 1,
                    _ => false,
                },
                BaseType::FreeInfinite => s == 1,
                BaseType::Surface(r) => (r == g && s <= 1) || (r == 2 * g - 1 && s == 0),
            };
            if ok {
                yes(tag, None)
            } else {
                no(tag)
            }
        }
        (AmbientKind::Free, _) => {
            // everything but F_t x Z^k (t > g) and Finf alone
            let tag = "Thm 1.2";
            match a.base {
                BaseType::Trivial => yes(tag, Some("rank_witness")),
                BaseType::Free(t) => {
                    if s < k || t <= g {
                        let witness = match s {
                            0 => Some("phi_t"),
                            1 => Some("psi_t"),
                            _ => Some("rank_witness"),
                        };
                        yes(tag, witness)
                    } else {
                        no(tag)
                    }
                }
                BaseType::FreeInfinite => {
                    if s >= 1 {
                        yes(tag, Some("aleph"))
                    } else {
                        no(tag)
                    }
                }
                BaseType::Surface(_) => no(tag),
            }
        }
        (AmbientKind::Surface, _) => {
            // Thm 4.7: F_t x Z^s (t < 2g if s = k), Sigma_{m(g-1)+1} x Z^s
            // (m = 1 if s = k), Finf x Z^s (s >= 1)
            let tag = "Thm 4.7";
            match a.base {
                BaseType::Trivial => yes(tag, Some("rank_witness")),
                BaseType::Free(t) => {
                    if s < k || t <= 2 * g - 1 {
                        yes(tag, Some("surface_endo"))
                    } else {
                        no(tag)
                    }
                }
                BaseType::Surface(r) => {
                    if s < k || r == g {
                        yes(tag, Some("surface_endo"))
                    } else {
                        no(tag)
                    }
                }
                BaseType::FreeInfinite => {
                    if s >= 1 {
                        yes(tag, Some("aleph"))
                    } else {
                        no(tag)
                    }
                }
            }
        }
    }
}

/// All aut-fixed types. For k <= 1 the list is finite and returned in full by
/// deduplicating the raw theorem lists (independently of the counting
/// formulas); for k >= 2 the finite-rank types up to `rank_bound` plus the
/// `Finf x Z^s` entries are generated from the decision predicate.
pub fn enumerate_aut_fixed(ambient: &Ambient, rank_bound: usize) -> Vec<IsoType> {
    let (g, k) = (ambient.g, ambient.k);
    let mut out: Vec<IsoType> = Vec::new();
    match (ambient.kind, k) {
        (AmbientKind::Free, 0) => {
            for t in 0..=g {
                out.push(IsoType::new(BaseType::Free(t), 0));
            }
        }
        (AmbientKind::Surface, 0) => {
            for t in 0..2 * g {
                out.push(IsoType::new(BaseType::Free(t), 0));
            }
            out.push(IsoType::new(BaseType::Surface(g), 0));
        }
        (AmbientKind::Free, 1) => {
            for t in 1..=g {
                out.push(IsoType::new(BaseType::Free(2 * t - 1), 0));
            }
            for t in 0..=g {
                for s in 0..=1 {
                    out.push(IsoType::new(BaseType::Free(t), s));
                }
            }
            out.push(IsoType::new(BaseType::FreeInfinite, 1));
        }
        (AmbientKind::Surface, 1) => {
            for t in 1..2 * g {
                out.push(IsoType::new(BaseType::Free(2 * t - 1), 0));
            }
            out.push(IsoType::new(BaseType::Surface(2 * g - 1), 0));
            out.push(IsoType::new(BaseType::FreeInfinite, 1));
            for s in 0..=1 {
                out.push(IsoType::new(BaseType::Surface(g), s));
                for t in 0..2 * g {
                    out.push(IsoType::new(BaseType::Free(t), s));
                }
            }
        }
        _ => {
            for s in 0..=k + 1 {
                if s <= rank_bound {
                    out.push(IsoType::new(BaseType::Trivial, s));
                }
            }
            for t in 2..=rank_bound.max(2) {
                for s in 0..=k.min(rank_bound.saturating_sub(t)) {
                    if t + s <= rank_bound {
                        out.push(IsoType::new(BaseType::Free(t), s));
                    }
                }
            }
            if ambient.kind == AmbientKind::Surface {
                let mut r = g;
                while 2 * r <= rank_bound {
                    for s in 0..=k.min(rank_bound - 2 * r) {
                        out.push(IsoType::new(BaseType::Surface(r), s));
                    }
                    r += g - 1;
                }
            }
            for s in 1..=k {
                out.push(IsoType::new(BaseType::FreeInfinite, s));
            }
            out.retain(|a| is_aut_fixed(ambient, a).answer);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Closed-form count of aut-fixed isomorphism classes.
pub fn count_aut_fixed(ambient: &Ambient) -> Count {
    let g = ambient.g;
    match (ambient.kind, ambient.k) {
        (AmbientKind::Free, 0) => Count::Finite(g + 1),
        (AmbientKind::Surface, 0) => Count::Finite(2 * g + 1),
        (AmbientKind::Free, 1) => Count::Finite(2 * g + 2 + g / 2),
        (AmbientKind::Surface, 1) => Count::Finite(5 * g + 2),
        _ => Count::Infinite,
    }
}

impl fmt::Display for IsoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let abelian = |s: usize| match s {
            0 => String::new(),
            1 => "Z".to_string(),
            _ => format!("Z^{s}"),
        };
        match self.base {
            BaseType::Trivial => {
                if self.s == 0 {
                    write!(f, "1")
                } else {
                    write!(f, "{}", abelian(self.s))
                }
            }
            BaseType::Free(t) => {
                write!(f, "F_{t}")?;
                if self.s > 0 {
                    write!(f, " x {}", abelian(self.s))?;
                }
                Ok(())
            }
            BaseType::FreeInfinite => {
                write!(f, "Finf")?;
                if self.s > 0 {
                    write!(f, " x {}", abelian(self.s))?;
                }
                Ok(())
            }
            BaseType::Surface(r) => {
                write!(f, "S_{r}")?;
                if self.s > 0 {
                    write!(f, " x {}", abelian(self.s))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for IsoType {
    type Err = ClassifyError;

    /// Parse the canonical strings, case-insensitively: "1", "Z", "Z^s",
    /// "F_t", "Finf", "S_r", optionally followed by "x Z" / "x Z^s".
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || ClassifyError::BadTypeString(text.to_string());
        let lower = text.to_lowercase();
        let parts: Vec<&str> = lower.split('x').map(str::trim).collect();
        if parts.is_empty() || parts.len() > 2 || parts[0].is_empty() {
            return Err(bad());
        }
        let abelian_part = |p: &str| -> Result<usize, ClassifyError> {
            if p == "z" {
                Ok(1)
            } else if let Some(exp) = p.strip_prefix("z^") {
                exp.parse().map_err(|_| bad())
            } else {
                Err(bad())
            }
        };
        let (base, mut s) = match parts[0] {
            "1" => (BaseType::Trivial, 0),
            p if p == "finf" || p == "f_inf" => (BaseType::FreeInfinite, 0),
            p if p.starts_with("f_") || p.starts_with('f') => {
                let digits = p.strip_prefix("f_").unwrap_or(&p[1..]);
                (BaseType::Free(digits.parse().map_err(|_| bad())?), 0)
            }
            p if p.starts_with("s_") => {
                let r: usize = p[2..].parse().map_err(|_| bad())?;
                if r < 2 {
                    return Err(bad());
                }
                (BaseType::Surface(r), 0)
            }
            p => (BaseType::Trivial, abelian_part(p)?),
        };
        if parts.len() == 2 {
            s += abelian_part(parts[1])?;
        }
        Ok(IsoType::new(base, s))
    }
}
