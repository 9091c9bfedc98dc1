//! The 8J₁+4 dimensional module: its Fock-space basis, the generator
//! matrices obtained by applying Γ and re-expanding, and an independent
//! table of closed-form matrix elements.
//!
//! Basis vectors are labelled by a tower V₁..V₄ and a projection. Inside
//! each tower the projection runs downward in steps of one. In terms of
//! k = J₁ − projection (shifted by 1/2 on V₂ and V₃) the Fock images are
//!
//! * V₁: (a†)^k |0⟩
//! * V₂: 2F₂(k) α₂₃†(a†)^k |0⟩ + 2F₃(k−1) α₁₃†(a†)^(k−1) |0⟩
//! * V₃: 2{F₁(k)[2J₁+1] − F₂(k)[k]q^(−2J₁−1)} α₂₃†(a†)^k |0⟩
//!   − 2F₃(k−1)[k]q^(−2J₁−1) α₁₃†(a†)^(k−1) |0⟩
//! * V₄: α₂₃†α₁₃†(a†)^k |0⟩

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::coeff::CoeffError;
use crate::exec::Exec;
use crate::fock::{FockMonomial, FockVector};
use crate::matrix::{solve, SparseMatrix, SparseVec};
use crate::qfield::{qint, HalfInt, QScalar};
use crate::realization::{Generator, Realization, RealizationError, RealizationParams};
use crate::report::{Check, Report};

/// Label of a basis vector: tower (1..=4) and projection M, P, R or S.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    /// Tower index 1..=4.
    pub tower: u8,
    /// Projection.
    pub proj: HalfInt,
}

impl BasisLabel {
    /// New label.
    pub fn new(tower: u8, proj: HalfInt) -> Self {
        BasisLabel { tower, proj }
    }

    /// Highest projection of the tower for a given J₁ (twice), or `None`
    /// when the tower is empty.
    pub fn tower_top_twice(tower: u8, j1_twice: i64) -> Option<i64> {
        let top = match tower {
            1 | 4 => j1_twice,
            2 => j1_twice - 1,
            3 => j1_twice + 1,
            _ => return None,
        };
        (top >= 0).then_some(top)
    }

    /// All labels for J₁, tower-major, descending projection.
    pub fn all(j1: HalfInt) -> Vec<BasisLabel> {
        let j = j1.twice();
        let mut out = Vec::new();
        for t in 1..=4u8 {
            if let Some(top) = Self::tower_top_twice(t, j) {
                let mut p = top;
                while p >= -top {
                    out.push(BasisLabel::new(t, HalfInt::from_twice(p)));
                    p -= 2;
                }
            }
        }
        out
    }

    /// Letter used for the projection in this tower.
    pub fn letter(&self) -> char {
        match self.tower {
            1 => 'M',
            2 => 'P',
            3 => 'R',
            _ => 'S',
        }
    }

    /// (H1, H2, H3) eigenvalues of the basis vector with this label.
    pub fn weights(&self, j2: HalfInt, j3: HalfInt, j1: HalfInt) -> [i64; 3] {
        let p = self.proj.twice();
        let (j, t2, t3) = (j1.twice(), j2.twice(), j3.twice());
        let (h2, h3) = match self.tower {
            1 => (t2 + (j - p) / 2, t3),
            2 | 3 => (t2 + (j - p + 1) / 2, t3 + 1),
            _ => (t2 + (j - p + 2) / 2, t3 + 2),
        };
        [p, h2, h3]
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{} {}={}", self.tower, self.letter(), self.proj)
    }
}

/// Errors from building a representation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    /// Γ applied to a basis vector left the span of the basis.
    #[error("image of {label} under {generator} is not in the span of the basis")]
    ExpansionFailure {
        generator: Generator,
        label: BasisLabel,
    },
    /// A coefficient function was singular where the basis needs it.
    #[error("basis vector {label}: {source}")]
    SingularCoefficient {
        label: BasisLabel,
        source: CoeffError,
    },
    /// Error raised by the realization.
    #[error(transparent)]
    Realization(#[from] RealizationError),
    /// Inconsistent representation data.
    #[error("malformed representation: {0}")]
    Malformed(String),
}

/// A finite-dimensional representation: labelled basis plus one sparse
/// matrix per generator. Column j of each matrix is the image of basis
/// vector j.
#[derive(Clone, Debug)]
pub struct Representation {
    params: RealizationParams,
    labels: Vec<BasisLabel>,
    fock_basis: Option<Vec<FockVector>>,
    matrices: BTreeMap<Generator, SparseMatrix>,
}

impl PartialEq for Representation {
    /// Entrywise equality of parameters, labels and matrices.
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.labels == other.labels
            && self.matrices == other.matrices
    }
}

impl Representation {
    /// Assemble a representation, checking that all twelve generators are
    /// present with the right size.
    pub fn new(
        params: RealizationParams,
        labels: Vec<BasisLabel>,
        fock_basis: Option<Vec<FockVector>>,
        matrices: BTreeMap<Generator, SparseMatrix>,
    ) -> Result<Self, RepError> {
        let dim = labels.len();
        for g in Generator::ALL {
            match matrices.get(&g) {
                None => return Err(RepError::Malformed(format!("missing generator {g}"))),
                Some(m) if m.dim() != dim => {
                    return Err(RepError::Malformed(format!(
                        "{g} has size {} but the basis has {dim} vectors",
                        m.dim()
                    )))
                }
                _ => {}
            }
        }
        if let Some(b) = &fock_basis {
            if b.len() != dim {
                return Err(RepError::Malformed("basis length mismatch".into()));
            }
        }
        Ok(Representation {
            params,
            labels,
            fock_basis,
            matrices,
        })
    }

    /// Parameters of the module.
    pub fn params(&self) -> &RealizationParams {
        &self.params
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Basis labels in order.
    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    /// Fock images of the basis vectors, when known.
    pub fn fock_basis(&self) -> Option<&[FockVector]> {
        self.fock_basis.as_deref()
    }

    /// Matrix of a generator.
    pub fn matrix(&self, g: Generator) -> &SparseMatrix {
        &self.matrices[&g]
    }

    /// All matrices in the fixed generator order.
    pub fn matrices(&self) -> impl Iterator<Item = (Generator, &SparseMatrix)> {
        Generator::ALL.into_iter().map(|g| (g, &self.matrices[&g]))
    }

    /// Replace one matrix (used to build perturbed copies).
    pub fn with_matrix(mut self, g: Generator, m: SparseMatrix) -> Self {
        assert_eq!(m.dim(), self.dim(), "matrix size");
        self.matrices.insert(g, m);
        self
    }

    /// Indices of the basis vectors in the given tower.
    pub fn tower_indices(&self, tower: u8) -> Vec<usize> {
        (0..self.dim())
            .filter(|i| self.labels[*i].tower == tower)
            .collect()
    }

    /// (H1, H2, H3) eigenvalues read off the diagonal of the H matrices.
    /// `None` when an eigenvalue is not an integer constant.
    pub fn weight(&self, i: usize) -> Option<[i64; 3]> {
        let read = |g| {
            let r = self.matrix(g).get(i, i).to_rational()?;
            r.is_integer().then(|| i64::try_from(r.to_integer()).ok())?
        };
        Some([read(Generator::H1)?, read(Generator::H2)?, read(Generator::H3)?])
    }
}

/// Add E11, E22, E33 computed from the H matrices.
fn add_diagonal_units(m: &mut BTreeMap<Generator, SparseMatrix>) {
    let one = QScalar::one();
    let h1 = m[&Generator::H1].clone();
    let h2 = m[&Generator::H2].clone();
    let h3 = m[&Generator::H3].clone();
    let e22 = SparseMatrix::combination(&[(one.clone(), &h2), (-one.clone(), &h3)]);
    let e11 = SparseMatrix::combination(&[(one.clone(), &h1), (one.clone(), &e22)]);
    m.insert(Generator::E11, e11);
    m.insert(Generator::E22, e22);
    m.insert(Generator::E33, h3);
}

/// Fock images of the basis vectors, in label order.
pub fn build_basis(p: &RealizationParams) -> Result<Vec<(BasisLabel, FockVector)>, RepError> {
    p.validate()?;
    let j = p.j1.twice();
    let f = p.coeffs.functions();
    let qj = QScalar::z_pow(-2 * (j + 1));
    let two = QScalar::from_int(2);
    BasisLabel::all(p.j1)
        .into_iter()
        .map(|label| {
            let err = |source| RepError::SingularCoefficient { label, source };
            let pt = label.proj.twice();
            let mut v = FockVector::zero();
            match label.tower {
                1 => v = FockVector::monomial(FockMonomial::new(((j - pt) / 2) as u32, 0, 0)),
                4 => v = FockVector::monomial(FockMonomial::new(((j - pt) / 2) as u32, 1, 1)),
                2 => {
                    let k = (j - pt + 1) / 2;
                    let ku = k as u32;
                    v.add_term(FockMonomial::new(ku, 0, 1), &(&two * &f[1].eval(k).map_err(err)?));
                    v.add_term(
                        FockMonomial::new(ku - 1, 1, 0),
                        &(&two * &f[2].eval(k - 1).map_err(err)?),
                    );
                }
                _ => {
                    let k = (j - pt + 1) / 2;
                    let ku = k as u32;
                    let qk = qint(k);
                    let mut c23 = f[0].eval(k).map_err(err)? * qint(j + 1);
                    if !qk.is_zero() {
                        c23 -= &(f[1].eval(k).map_err(err)? * &qk * &qj);
                        v.add_term(
                            FockMonomial::new(ku - 1, 1, 0),
                            &(-(&two * &f[2].eval(k - 1).map_err(err)? * &qk * &qj)),
                        );
                    }
                    v.add_term(FockMonomial::new(ku, 0, 1), &(&two * &c23));
                }
            }
            Ok((label, v))
        })
        .collect()
}

/// Group key of a monomial: basis vectors only mix inside a group.
fn group_key(m: &FockMonomial) -> (u8, u32) {
    match (m.f13, m.f23) {
        (0, 0) => (0, m.n),
        (1, 1) => (3, m.n),
        (0, _) => (1, m.n),
        _ => (1, m.n + 1),
    }
}

/// Re-expansion of Fock vectors in a fixed basis, grouped by weight.
struct Expander<'a> {
    basis: &'a [FockVector],
    groups: HashMap<(u8, u32), (Vec<usize>, Vec<FockMonomial>)>,
}

impl<'a> Expander<'a> {
    fn new(basis: &'a [FockVector]) -> Self {
        let mut groups: HashMap<(u8, u32), (Vec<usize>, Vec<FockMonomial>)> = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            for (m, _) in b.iter() {
                let e = groups.entry(group_key(m)).or_default();
                if !e.0.contains(&i) {
                    e.0.push(i);
                }
                if !e.1.contains(m) {
                    e.1.push(*m);
                }
            }
        }
        Expander { basis, groups }
    }

    fn expand(&self, w: &FockVector) -> Option<SparseVec> {
        let mut by_group: BTreeMap<(u8, u32), Vec<FockMonomial>> = BTreeMap::new();
        for (m, _) in w.iter() {
            by_group.entry(group_key(m)).or_default().push(*m);
        }
        let mut out = SparseVec::new();
        for (key, ms) in by_group {
            let (idx, support) = self.groups.get(&key)?;
            let mut rows = support.clone();
            for m in ms {
                if !rows.contains(&m) {
                    rows.push(m);
                }
            }
            let cols: Vec<Vec<QScalar>> = idx
                .iter()
                .map(|i| rows.iter().map(|m| self.basis[*i].coeff(m)).collect())
                .collect();
            let rhs: Vec<QScalar> = rows.iter().map(|m| w.coeff(m)).collect();
            let x = solve(&cols, &rhs)?;
            for (i, c) in idx.iter().zip(x) {
                if !c.is_zero() {
                    out.insert(*i, c);
                }
            }
        }
        Some(out)
    }
}

/// Matrices via Γ: apply each generator to each basis vector and re-expand.
pub fn build_rep(p: &RealizationParams) -> Result<Representation, RepError> {
    build_rep_with(p, Exec::default())
}

/// [`build_rep`] with an explicit execution mode for the column work.
pub fn build_rep_with(p: &RealizationParams, exec: Exec) -> Result<Representation, RepError> {
    let basis = build_basis(p)?;
    let (labels, vectors): (Vec<_>, Vec<_>) = basis.into_iter().unzip();
    let real = Realization::new(p.clone())?;
    let expander = Expander::new(&vectors);
    let jobs: Vec<(Generator, usize)> = Generator::ALL
        .into_iter()
        .filter(|g| !matches!(g, Generator::E11 | Generator::E22 | Generator::E33))
        .flat_map(|g| (0..vectors.len()).map(move |j| (g, j)))
        .collect();
    let cols = exec.map(&jobs, |&(g, j)| -> Result<SparseVec, RepError> {
        let img = real.gamma(g, &vectors[j])?;
        expander.expand(&img).ok_or(RepError::ExpansionFailure {
            generator: g,
            label: labels[j],
        })
    });
    let mut by_gen: BTreeMap<Generator, Vec<SparseVec>> = BTreeMap::new();
    for ((g, _), col) in jobs.iter().zip(cols) {
        by_gen.entry(*g).or_default().push(col?);
    }
    let mut matrices: BTreeMap<Generator, SparseMatrix> = by_gen
        .into_iter()
        .map(|(g, cols)| (g, SparseMatrix::from_columns(cols)))
        .collect();
    add_diagonal_units(&mut matrices);
    Representation::new(p.clone(), labels, Some(vectors), matrices)
}

/// Matrices from the closed-form table of matrix elements, with F₄ in
/// place of D₄ for custom coefficient families.
pub fn closed_form_rep(p: &RealizationParams) -> Result<Representation, RepError> {
    p.validate()?;
    let labels = BasisLabel::all(p.j1);
    let index: HashMap<(u8, i64), usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| ((l.tower, l.proj.twice()), i))
        .collect();
    let dim = labels.len();
    let j = p.j1.twice();
    let t2 = p.j2.twice();
    let f4 = p.coeffs.get(4);
    let d4 = |k: i64, label: BasisLabel| {
        f4.eval(k)
            .map_err(|source| RepError::SingularCoefficient { label, source })
    };
    let z = QScalar::z_pow;
    let int = QScalar::from_int;
    let inv = |x: QScalar, label: BasisLabel| {
        x.inv().ok_or(RepError::SingularCoefficient {
            label,
            source: CoeffError::SingularCoefficient {
                n: 0,
                sub: "closed-form denominator".into(),
            },
        })
    };

    let mut m: BTreeMap<Generator, SparseMatrix> = Generator::ALL
        .into_iter()
        .map(|g| (g, SparseMatrix::zeros(dim)))
        .collect();

    for (src, l) in labels.iter().enumerate() {
        let pt = l.proj.twice();
        let w = l.weights(p.j2, p.j3, p.j1);
        for (g, h) in [Generator::H1, Generator::H2, Generator::H3].into_iter().zip(w) {
            m.get_mut(&g).unwrap().set(src, src, int(h));
        }
        // Each entry is only evaluated when its target label exists.
        let mut put = |g: Generator, tower: u8, ptarget: i64, c: &dyn Fn() -> Result<QScalar, RepError>| {
            if let Some(&dst) = index.get(&(tower, ptarget)) {
                let v = c()?;
                m.get_mut(&g).unwrap().add_to(dst, src, &v);
            }
            Ok::<(), RepError>(())
        };
        let shift = match l.tower {
            2 => 1,
            3 => -1,
            _ => 0,
        };
        let lab = *l;
        match l.tower {
            4 => {
                let k = (j - pt) / 2;
                put(Generator::E12, 4, pt + 2, &|| {
                    Ok(qint(k) * d4(k - 1, lab)? * inv(d4(k, lab)?, lab)?)
                })?;
                put(Generator::E21, 4, pt - 2, &|| {
                    Ok(qint(j - k) * d4(k + 1, lab)? * inv(d4(k, lab)?, lab)?)
                })?;
            }
            _ => {
                put(Generator::E12, l.tower, pt + 2, &|| Ok(qint((j - pt - shift) / 2)))?;
                put(Generator::E21, l.tower, pt - 2, &|| Ok(qint((j + pt - shift) / 2)))?;
            }
        }
        let big = qint(j + t2 + 1);
        match l.tower {
            1 => {
                let den = int(2) * qint(j + 1);
                put(Generator::E31, 2, pt - 1, &|| {
                    Ok(&big * &qint((j + pt) / 2) * z(-(j - pt) - 2) * inv(den.clone(), lab)?)
                })?;
                put(Generator::E31, 3, pt - 1, &|| {
                    Ok(-(qint(t2) * z(j + pt) * inv(den.clone(), lab)?))
                })?;
                put(Generator::E32, 2, pt + 1, &|| {
                    Ok(qint((j - pt) / 2) * &big * inv(den.clone(), lab)?)
                })?;
                put(Generator::E32, 3, pt + 1, &|| Ok(qint(t2) * inv(den.clone(), lab)?))?;
            }
            2 => {
                put(Generator::E13, 1, pt + 1, &|| Ok(int(2) * z(j - pt - 1)))?;
                put(Generator::E31, 4, pt - 1, &|| {
                    Ok(-(int(2) * z(j + pt - 1) * qint(t2) * d4((j - pt + 1) / 2, lab)?))
                })?;
                put(Generator::E23, 1, pt - 1, &|| Ok(int(2)))?;
                put(Generator::E32, 4, pt + 1, &|| {
                    Ok(int(2) * qint(t2) * d4((j - pt - 1) / 2, lab)?)
                })?;
            }
            3 => {
                put(Generator::E13, 1, pt + 1, &|| {
                    Ok(-(int(2) * z(-j - pt - 3) * qint((j - pt + 1) / 2)))
                })?;
                put(Generator::E31, 4, pt - 1, &|| {
                    Ok(-(int(2)
                        * z(-j + pt - 3)
                        * &big
                        * qint((j + pt + 1) / 2)
                        * d4((j - pt + 1) / 2, lab)?))
                })?;
                put(Generator::E23, 1, pt - 1, &|| Ok(int(2) * qint((j + pt + 1) / 2)))?;
                put(Generator::E32, 4, pt + 1, &|| {
                    Ok(-(int(2) * qint((j - pt + 1) / 2) * &big * d4((j - pt - 1) / 2, lab)?))
                })?;
            }
            _ => {
                let k = (j - pt) / 2;
                let den = || inv(int(2) * d4(k, lab)? * qint(j + 1), lab);
                put(Generator::E13, 2, pt + 1, &|| {
                    Ok(-(qint((j - pt) / 2) * z(-j - pt - 2) * den()?))
                })?;
                put(Generator::E13, 3, pt + 1, &|| Ok(-(z(j - pt) * den()?)))?;
                put(Generator::E23, 2, pt - 1, &|| Ok(qint((j + pt) / 2) * den()?))?;
                put(Generator::E23, 3, pt - 1, &|| Ok(-den()?))?;
            }
        }
    }
    add_diagonal_units(&mut m);
    Representation::new(p.clone(), labels, None, m)
}

/// Predicted E₂₁ matrix element from `label` to the next label down its tower.
fn e21_prediction(p: &RealizationParams, label: BasisLabel) -> Result<QScalar, CoeffError> {
    let j = p.j1.twice();
    let pt = label.proj.twice();
    match label.tower {
        4 => {
            let k = (j - pt) / 2;
            let f4 = p.coeffs.get(4);
            let num = qint(j - k) * f4.eval(k + 1)?;
            num.checked_div(&f4.eval(k)?)
                .ok_or(CoeffError::SingularCoefficient { n: k, sub: "F4(N)".into() })
        }
        t => {
            let shift = [0, 1, -1][usize::from(t - 1)];
            Ok(qint((j + pt - shift) / 2))
        }
    }
}

/// Within each tower, E₂₁ applied k times to the tower-top vector gives the
/// k-th vector times the product of the E₂₁ matrix elements along the way;
/// E₁₂ and E₂₁ never connect different towers.
pub fn lowering_check(rep: &Representation) -> Report {
    let e21 = rep.matrix(Generator::E21);
    let e12 = rep.matrix(Generator::E12);
    let mut report = Report::new();
    for tower in 1..=4u8 {
        let idx = rep.tower_indices(tower);
        let name = format!("V{tower}: E21 powers of the top vector");
        let Some(&top) = idx.first() else {
            report.push(Check::pass(format!("{name} (empty tower)")));
            continue;
        };
        let mut v = SparseVec::from([(top, QScalar::one())]);
        let mut expected = QScalar::one();
        let mut failure = None;
        for w in idx.windows(2) {
            match e21_prediction(rep.params(), rep.labels()[w[0]]) {
                Ok(c) => expected = &expected * &c,
                Err(e) => {
                    failure = Some(format!("{}: {e}", rep.labels()[w[0]]));
                    break;
                }
            }
            v = e21.apply(&v);
            let want = SparseVec::from([(w[1], expected.clone())]);
            if expected.is_zero() || v != want {
                failure = Some(rep.labels()[w[1]].to_string());
                break;
            }
        }
        if failure.is_none() {
            if let Some(&bottom) = idx.last() {
                if !e21.column(bottom).is_empty() {
                    failure = Some(format!("below {}", rep.labels()[bottom]));
                }
            }
        }
        report.push(match failure {
            None => Check::pass(name),
            Some(loc) => Check::fail(name, loc),
        });
    }
    for (g, m) in [(Generator::E12, e12), (Generator::E21, e21)] {
        let cross = m
            .entries()
            .into_iter()
            .find(|(i, j, _)| rep.labels()[*i].tower != rep.labels()[*j].tower);
        let name = format!("{g} preserves towers");
        report.push(match cross {
            None => Check::pass(name),
            Some((i, j, _)) => Check::fail(name, format!("({i}, {j})")),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t1: i64, t2: i64, t3: i64) -> RealizationParams {
        RealizationParams::from_twice(t1, t2, t3)
    }

    #[test]
    fn tower_sizes() {
        let count = |j: i64, t: u8| {
            BasisLabel::all(HalfInt::from_twice(j))
                .iter()
                .filter(|l| l.tower == t)
                .count()
        };
        assert_eq!([1, 2, 3, 4].map(|t| count(0, t)), [1, 0, 2, 1]);
        assert_eq!([1, 2, 3, 4].map(|t| count(1, t)), [2, 1, 3, 2]);
        for j in 0..=6 {
            assert_eq!(BasisLabel::all(HalfInt::from_twice(j)).len() as i64, 4 * j + 4);
        }
    }

    #[test]
    fn top_vector_is_vacuum() {
        let b = build_basis(&p(3, 1, 0)).unwrap();
        assert_eq!(b[0].1, FockVector::monomial(FockMonomial::VACUUM));
    }

    #[test]
    fn h1_diagonal_half() {
        let rep = build_rep(&p(1, 2, 0)).unwrap();
        let h1 = rep.matrix(Generator::H1);
        assert!(h1.is_diagonal());
        let d: Vec<QScalar> = (0..rep.dim()).map(|i| h1.get(i, i)).collect();
        let want: Vec<QScalar> = [1, -1, 0, 2, 0, -2, 1, -1].map(QScalar::from_int).to_vec();
        assert_eq!(d, want);
    }

    #[test]
    fn e13_kills_v1_and_e32_kills_top_v4() {
        let rep = build_rep(&p(1, 2, 0)).unwrap();
        for i in rep.tower_indices(1) {
            assert!(rep.matrix(Generator::E13).column(i).is_empty());
        }
        let top4 = rep.tower_indices(4)[0];
        assert!(rep.matrix(Generator::E32).column(top4).is_empty());
    }

    #[test]
    fn e23_on_v2_and_e13_on_v2() {
        let rep = build_rep(&p(1, 2, 0)).unwrap();
        let v2 = rep.tower_indices(2)[0];
        let v1 = rep.tower_indices(1);
        assert_eq!(rep.matrix(Generator::E23).column(v2), &SparseVec::from([(v1[1], QScalar::from_int(2))]));
        assert_eq!(rep.matrix(Generator::E13).column(v2), &SparseVec::from([(v1[0], QScalar::from_int(2))]));
    }

    #[test]
    fn gamma_matches_closed_forms_small() {
        for (t1, t2) in [(0, 1), (1, 2), (2, -1), (3, 0), (2, 4)] {
            let a = build_rep(&p(t1, t2, 0)).unwrap();
            let b = closed_form_rep(&p(t1, t2, 0)).unwrap();
            for g in Generator::ALL {
                assert_eq!(
                    a.matrix(g).first_difference(b.matrix(g)),
                    None,
                    "{g} at 2J1={t1}, 2J2={t2}"
                );
            }
        }
    }

    #[test]
    fn lowering_structure() {
        let rep = build_rep(&p(2, 1, 0)).unwrap();
        let r = lowering_check(&rep);
        assert!(r.passed(), "{r}");
        // For J1 = 1 the V1 tower has E21 entries [J1+M] = [2], [1].
        let v1 = rep.tower_indices(1);
        assert_eq!(rep.matrix(Generator::E21).get(v1[1], v1[0]), qint(2));
        assert_eq!(rep.matrix(Generator::E21).get(v1[2], v1[1]), qint(1));
    }

    #[test]
    fn lowering_check_catches_cross_tower_entry() {
        let rep = build_rep(&p(1, 1, 0)).unwrap();
        let mut e12 = rep.matrix(Generator::E12).clone();
        e12.set(0, rep.dim() - 1, QScalar::one());
        let bad = rep.with_matrix(Generator::E12, e12);
        assert!(!lowering_check(&bad).passed());
    }
}
