//! Representation labels for the three compact classical families.
//!
//! Signatures are kept in strict (rho-shifted) coordinates throughout: the
//! parts of a valid signature are strictly decreasing integers, with the
//! family-specific floor (none for U, >= 0 for O, > 0 for Sp). The trivial
//! representation is (n-1, ..., 1, 0) for U and O, and (n, ..., 2, 1) for Sp.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three compact classical group families, with its rank.
///
/// `OrthogonalO(n)` denotes O(2n) of rank n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupFamily {
    UnitaryU(usize),
    OrthogonalO(usize),
    SymplecticSp(usize),
}

impl GroupFamily {
    pub fn rank(self) -> usize {
        match self {
            GroupFamily::UnitaryU(n)
            | GroupFamily::OrthogonalO(n)
            | GroupFamily::SymplecticSp(n) => n,
        }
    }

    /// Short tag used in serialized output: "U", "O", "Sp".
    pub fn tag(self) -> &'static str {
        match self {
            GroupFamily::UnitaryU(_) => "U",
            GroupFamily::OrthogonalO(_) => "O",
            GroupFamily::SymplecticSp(_) => "Sp",
        }
    }

    pub fn from_tag(tag: &str, rank: usize) -> Result<Self> {
        match tag {
            "U" => Ok(GroupFamily::UnitaryU(rank)),
            "O" => Ok(GroupFamily::OrthogonalO(rank)),
            "Sp" => Ok(GroupFamily::SymplecticSp(rank)),
            other => Err(Error::InvalidSignature(format!(
                "unknown family tag {other:?}"
            ))),
        }
    }

    /// Parts of the trivial (constant-character) signature.
    pub fn trivial_parts(self) -> Vec<i64> {
        let n = self.rank() as i64;
        match self {
            GroupFamily::UnitaryU(_) | GroupFamily::OrthogonalO(_) => (0..n).rev().collect(),
            GroupFamily::SymplecticSp(_) => (1..=n).rev().collect(),
        }
    }
}

/// A strictly decreasing integer tuple indexing an irreducible character.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    family: GroupFamily,
    parts: Vec<i64>,
}

impl Signature {
    /// Validate and construct. The parts must be strictly decreasing andobey
    /// the family floor: none for U(n), last part >= 0 for O(2n), > 0 for Sp(n).
    pub fn new(family: GroupFamily, parts: Vec<i64>) -> Result<Self> {
        let n = family.rank();
        if n == 0 {
            return Err(Error::InvalidSignature("rank must be >= 1".into()));
        }
        if parts.len() != n {
            return Err(Error::InvalidSignature(format!(
                "expected {n} parts, got {}",
                parts.len()
            )));
        }
        for w in parts.windows(2) {
            if w[0] <= w[1] {
                return Err(Error::InvalidSignature(format!(
                    "parts not strictly decreasing: {parts:?}"
                )));
            }
        }
        let last = *parts.last().unwrap();
        match family {
            GroupFamily::UnitaryU(_) => {}
            GroupFamily::OrthogonalO(_) if last < 0 => {
                return Err(Error::InvalidSignature(format!(
                    "O-family parts must end >= 0: {parts:?}"
                )));
            }
            GroupFamily::SymplecticSp(_) if last <= 0 => {
                return Err(Error::InvalidSignature(format!(
                    "Sp-family parts must end > 0: {parts:?}"
                )));
            }
            _ => {}
        }
        Ok(Self { family, parts })
    }

    pub fn trivial(family: GroupFamily) -> Self {
        Self {
            family,
            parts: family.trivial_parts(),
        }
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn is_trivial(&self) -> bool {
        self.parts == self.family.trivial_parts()
    }

    /// Uniform shift (m_1 + k, ..., m_n + k); U-family only keeps validity
    /// for every k, so this is restricted to U.
    pub fn shift(&self, k: i64) -> Signature {
        debug_assert!(matches!(self.family, GroupFamily::UnitaryU(_)));
        Signature {
            family: self.family,
            parts: self.parts.iter().map(|m| m + k).collect(),
        }
    }

    /// The signature of the conjugate character: m*_j = (n-1) - m_{n+1-j}.
    ///
    /// Satisfies conj(chi_m) = chi_{m*} on U(n); an involution fixing the
    /// trivial signature.
    pub fn conjugate(&self) -> Signature {
        debug_assert!(matches!(self.family, GroupFamily::UnitaryU(_)));
        let n = self.rank() as i64;
        let parts = self.parts.iter().rev().map(|m| (n - 1) - m).collect();
        Signature {
            family: self.family,
            parts,
        }
    }

    /// Semicolon-joined parts, the CSV serialization of the tuple.
    pub fn parts_string(&self) -> String {
        self.parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Every valid signature with max_j |parts_j| <= bound, in descending
/// lexicographic order.
pub fn enumerate_signatures(family: GroupFamily, bound: i64) -> Result<Vec<Signature>> {
    let n = family.rank();
    let (lo, hi) = match family {
        GroupFamily::UnitaryU(_) => (-bound, bound),
        GroupFamily::OrthogonalO(_) => (0, bound),
        GroupFamily::SymplecticSp(_) => (1, bound),
    };
    let mut out = Vec::new();
    let mut stack: Vec<i64> = Vec::with_capacity(n);
    descend(&mut out, &mut stack, family, n, lo, hi);
    if out.is_empty() {
        return Err(Error::EmptyEnumeration {
            family: family.tag(),
            rank: n,
            bound,
        });
    }
    Ok(out)
}

fn descend(
    out: &mut Vec<Signature>,
    stack: &mut Vec<i64>,
    family: GroupFamily,
    n: usize,
    lo: i64,
    hi: i64,
) {
    if stack.len() == n {
        out.push(Signature {
            family,
            parts: stack.clone(),
        });
        return;
    }
    let remaining = (n - stack.len() - 1) as i64;
    let top = match stack.last() {
        Some(&prev) => prev - 1,
        None => hi,
    };
    // Descending lexicographic order: largest next part first. Leave room for
    // the strictly smaller parts below.
    let mut v = top;
    while v - remaining >= lo {
        stack.push(v);
        descend(out, stack, family, n, lo, hi);
        stack.pop();
        v -= 1;
    }
}

/// Weyl dimension of the U(n) irreducible labeled by `sig`, computed in the
/// strict coordinates:
///
///   dim = prod_{a<b} (m_a - m_b) / prod_{j=1}^{n-1} j!
///
/// The denominator runs to n-1, which is what chi_m(1) = dim forces; see the
/// torus-limit cross-check in the character tests.
pub fn dimension_unitary(sig: &Signature) -> Result<u64> {
    if !matches!(sig.family(), GroupFamily::UnitaryU(_)) {
        return Err(Error::MixedFamily(sig.family().tag(), "U"));
    }
    let parts = sig.parts();
    let n = parts.len();
    let mut num: i128 = 1;
    for a in 0..n {
        for b in (a + 1)..n {
            num = num
                .checked_mul((parts[a] - parts[b]) as i128)
                .ok_or_else(|| Error::InternalError("dimension overflow".into()))?;
        }
    }
    let mut den: i128 = 1;
    for j in 1..n as i128 {
        let mut f: i128 = 1;
        for i in 2..=j {
            f *= i;
        }
        den *= f;
    }
    if num <= 0 || num % den != 0 {
        return Err(Error::InternalError(format!(
            "non-integral dimension {num}/{den} for {:?}",
            parts
        )));
    }
    Ok((num / den) as u64)
}
