//! Typical/nontypical classification, invariant subspaces and quotients.
//!
//! Under generic q a q-number [x] vanishes only for x = 0, so the typicality
//! conditions [2J₁+2J₂+1] ≠ 0 and [2J₂] ≠ 0 become integer conditions on the
//! weights. The predictions are cross-checked by brute force: the invariant
//! closure of a vector is computed by repeatedly applying all generator
//! matrices and reducing exactly.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exec::Exec;
use crate::matrix::{axpy, SparseMatrix, SparseVec};
use crate::qfield::{HalfInt, QScalar};
use crate::realization::Generator;
use crate::repbuilder::Representation;

/// Classification outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RepKind {
    /// Irreducible.
    Typical,
    /// 2J₁+2J₂+1 = 0: invariant subspace V₁ ⊕ V₃.
    Nontypical1,
    /// 2J₂ = 0: invariant subspace V₁ ⊕ V₂.
    Nontypical2,
    /// Both conditions at once (trivial representations).
    Excluded,
}

/// Classification with the predicted invariant subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepClass {
    /// Which case applies.
    pub kind: RepKind,
    /// Towers spanning the predicted invariant subspace (empty when typical
    /// or excluded).
    pub predicted_invariant: Vec<u8>,
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepKind::Typical => "Typical",
            RepKind::Nontypical1 => "Nontypical1",
            RepKind::Nontypical2 => "Nontypical2",
            RepKind::Excluded => "Excluded",
        })
    }
}

impl RepClass {
    /// Predicted invariant subspace as text, e.g. `V1⊕V3`.
    pub fn invariant_text(&self) -> String {
        self.predicted_invariant
            .iter()
            .map(|t| format!("V{t}"))
            .collect::<Vec<_>>()
            .join("⊕")
    }

    /// True for the two nontypical kinds.
    pub fn is_nontypical(&self) -> bool {
        matches!(self.kind, RepKind::Nontypical1 | RepKind::Nontypical2)
    }
}

/// Classify the module with highest weight (J₁, J₂, ·).
pub fn classify(j1: HalfInt, j2: HalfInt) -> RepClass {
    let a = j1.twice() + j2.twice() + 1 != 0;
    let b = j2.twice() != 0;
    let (kind, towers) = match (a, b) {
        (true, true) => (RepKind::Typical, vec![]),
        (false, true) => (RepKind::Nontypical1, vec![1, 3]),
        (true, false) => (RepKind::Nontypical2, vec![1, 2]),
        (false, false) => (RepKind::Excluded, vec![]),
    };
    RepClass {
        kind,
        predicted_invariant: towers,
    }
}

/// A subspace of the coordinate space, kept in reduced row echelon form:
/// each spanning vector has a pivot coordinate equal to 1 where all the
/// other spanning vectors vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    rows: BTreeMap<usize, SparseVec>,
}

impl Subspace {
    /// The zero subspace of an `ambient`-dimensional space.
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: BTreeMap::new(),
        }
    }

    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// Span of the basis vectors belonging to the given towers.
    pub fn of_towers(rep: &Representation, towers: &[u8]) -> Self {
        Subspace::span(
            rep.dim(),
            (0..rep.dim())
                .filter(|i| towers.contains(&rep.labels()[*i].tower))
                .map(|i| SparseVec::from([(i, QScalar::one())])),
        )
    }

    /// Ambient dimension.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Pivot coordinates in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Reduced spanning vectors, by pivot.
    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    /// Remainder of `v` after eliminating all pivot coordinates.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        for (p, row) in &self.rows {
            if let Some(c) = r.get(p).cloned() {
                axpy(&mut r, &-c, row);
            }
        }
        r
    }

    /// Exact membership test.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Add a vector; returns true when the dimension grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(&v);
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero leading entry");
        let r: SparseVec = r.iter().map(|(i, c)| (*i, c * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&p).cloned() {
                axpy(row, &-c, &r);
            }
        }
        self.rows.insert(p, r);
        true
    }
}

/// Errors raised by structural operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    /// The subspace is not mapped into itself by a generator.
    #[error("subspace is not invariant under {generator} (spanning vector with pivot {pivot})")]
    NotInvariant { generator: Generator, pivot: usize },
    /// The subspace lives in a space of a different dimension.
    #[error("subspace has ambient dimension {got}, representation has {want}")]
    DimensionMismatch { got: usize, want: usize },
}

/// Smallest subspace containing `seeds` and closed under all generators.
pub fn invariant_closure(rep: &Representation, seeds: &[SparseVec]) -> Subspace {
    let mut sub = Subspace::zero(rep.dim());
    let mut queue: Vec<SparseVec> = seeds.to_vec();
    while let Some(v) = queue.pop() {
        if sub.insert(v.clone()) {
            for (_, m) in rep.matrices() {
                let img = m.apply(&v);
                if !img.is_empty() {
                    queue.push(img);
                }
            }
        }
    }
    sub
}

/// The representation induced on the quotient by an invariant subspace.
/// Coset representatives are the standard basis vectors at the non-pivot
/// coordinates, in their original order.
pub fn quotient_rep(rep: &Representation, sub: &Subspace) -> Result<Representation, StructureError> {
    if sub.ambient() != rep.dim() {
        return Err(StructureError::DimensionMismatch {
            got: sub.ambient(),
            want: rep.dim(),
        });
    }
    for (g, m) in rep.matrices() {
        for (p, row) in &sub.rows {
            if !sub.contains(&m.apply(row)) {
                return Err(StructureError::NotInvariant {
                    generator: g,
                    pivot: *p,
                });
            }
        }
    }
    let keep: Vec<usize> = (0..rep.dim()).filter(|i| !sub.rows.contains_key(i)).collect();
    let matrices = rep
        .matrices()
        .map(|(g, m)| {
            let reduced = SparseMatrix::from_columns(
                (0..rep.dim()).map(|j| sub.reduce(m.column(j))).collect(),
            );
            (g, reduced.submatrix(&keep))
        })
        .collect();
    let labels = keep.iter().map(|i| rep.labels()[*i]).collect();
    let fock = rep
        .fock_basis()
        .map(|b| keep.iter().map(|i| b[*i].clone()).collect());
    Ok(Representation::new(rep.params().clone(), labels, fock, matrices)
        .expect("quotient keeps all generators"))
}

/// True iff the closure of every basis vector is the whole space.
pub fn is_irreducible(rep: &Representation) -> bool {
    is_irreducible_with(rep, Exec::default())
}

/// [`is_irreducible`] with an explicit execution mode.
pub fn is_irreducible_with(rep: &Representation, exec: Exec) -> bool {
    let idx: Vec<usize> = (0..rep.dim()).collect();
    exec.map(&idx, |&i| {
        invariant_closure(rep, &[SparseVec::from([(i, QScalar::one())])]).dim() == rep.dim()
    })
    .into_iter()
    .all(|b| b)
}

/// Closure of the top V₁ vector (index 0).
pub fn highest_weight_closure(rep: &Representation) -> Subspace {
    invariant_closure(rep, &[SparseVec::from([(0, QScalar::one())])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::RealizationParams;
    use crate::repbuilder::build_rep;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(h(2), h(1)).kind, RepKind::Typical);
        let c = classify(h(1), h(0));
        assert_eq!(c.kind, RepKind::Nontypical2);
        assert_eq!(c.invariant_text(), "V1⊕V2");
        let c = classify(h(1), h(-2));
        assert_eq!(c.kind, RepKind::Nontypical1);
        assert_eq!(c.invariant_text(), "V1⊕V3");
        assert_eq!(classify(h(-1), h(0)).kind, RepKind::Excluded);
    }

    #[test]
    fn subspace_rref() {
        let v = |a: i64, b: i64| {
            let mut s = SparseVec::new();
            for (i, c) in [(0, a), (1, b)] {
                if c != 0 {
                    s.insert(i, QScalar::from_int(c));
                }
            }
            s
        };
        let mut s = Subspace::zero(2);
        assert!(s.insert(v(1, 1)));
        assert!(!s.insert(v(2, 2)));
        assert!(s.insert(v(1, -1)));
        assert_eq!(s.dim(), 2);
        assert_eq!(s.pivots(), vec![0, 1]);
        assert!(s.contains(&v(5, 7)));
    }

    #[test]
    fn nontypical2_closure_and_quotient() {
        let rep = build_rep(&RealizationParams::from_twice(1, 0, 0)).unwrap();
        let c = highest_weight_closure(&rep);
        assert_eq!(c.dim(), 3);
        assert_eq!(c, Subspace::of_towers(&rep, &[1, 2]));
        assert!(!is_irreducible(&rep));
        let q = quotient_rep(&rep, &c).unwrap();
        assert_eq!(q.dim(), 5);
        assert!(is_irreducible(&q));
    }

    #[test]
    fn nontypical1_quotient_dim() {
        let rep = build_rep(&RealizationParams::from_twice(1, -2, 0)).unwrap();
        let c = highest_weight_closure(&rep);
        assert_eq!(c, Subspace::of_towers(&rep, &[1, 3]));
        assert_eq!(quotient_rep(&rep, &c).unwrap().dim(), 3);
    }

    #[test]
    fn typical_is_irreducible() {
        let rep = build_rep(&RealizationParams::from_twice(2, 1, 0)).unwrap();
        assert!(is_irreducible(&rep));
    }

    #[test]
    fn quotient_by_zero_is_identity() {
        let rep = build_rep(&RealizationParams::from_twice(1, 2, 0)).unwrap();
        assert_eq!(quotient_rep(&rep, &Subspace::zero(rep.dim())).unwrap(), rep);
        assert_eq!(invariant_closure(&rep, &[]).dim(), 0);
    }

    #[test]
    fn non_invariant_subspace_is_rejected() {
        let rep = build_rep(&RealizationParams::from_twice(1, 0, 0)).unwrap();
        let s = Subspace::of_towers(&rep, &[4]);
        assert!(matches!(
            quotient_rep(&rep, &s),
            Err(StructureError::NotInvariant { .. })
        ));
    }
}
