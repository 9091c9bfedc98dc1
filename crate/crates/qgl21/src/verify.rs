//! Relation checking.
//!
//! The defining relations and Serre relations are written once, against the
//! [`Action`] trait, and run both on Fock space (through Γ) and on the
//! matrices of a [`Representation`]. Every relation is tested on a list of
//! probe vectors: Fock monomials up to a boson cutoff, or the standard basis
//! vectors of the module, so a failure is located at a state or at a
//! (row, col) matrix position.
//!
//! The classical limit evaluates all matrices at z = 1 and checks the
//! gl(2|1) super-commutator table; [`numeric_relation_check`] evaluates at
//! another rational q and checks the q-relations with q replaced by its value.

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::exec::Exec;
use crate::matrix::{axpy, SparseMatrix, SparseVec};
use crate::qfield::{qint, QFieldError, QScalar};
use crate::realization::Generator;
use crate::repbuilder::Representation;
pub use crate::report::{Check, Report};

/// Errors raised by matrix-level checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    /// A diagonal Cartan entry is not an integer, so [H]_q cannot be formed.
    #[error("{generator} entry ({index}, {index}) = {value} is not an integer")]
    NonIntegerCartan {
        generator: Generator,
        index: usize,
        value: String,
    },
    /// A Cartan matrix is not diagonal.
    #[error("{0} is not diagonal")]
    NonDiagonalCartan(Generator),
    /// A matrix entry has a pole at the evaluation point.
    #[error("{generator} entry ({row}, {col}): {source}")]
    SingularEvaluation {
        generator: Generator,
        row: usize,
        col: usize,
        source: QFieldError,
    },
    /// The evaluation point is not the square of a rational.
    #[error(transparent)]
    Field(#[from] QFieldError),
}

/// Something the generators act on, probed vector by vector.
pub(crate) trait Action: Sync {
    type Vector: Clone + PartialEq + Send + Sync;
    type Error: std::fmt::Display + Send;

    /// Probe vectors with printable names.
    fn probes(&self) -> Vec<(String, Self::Vector)>;
    /// Action of a generator.
    fn act(&self, g: Generator, v: &Self::Vector) -> Result<Self::Vector, Self::Error>;
    /// Action of [H]_q for H = H1 or H2.
    fn cartan_q(&self, g: Generator, v: &Self::Vector) -> Result<Self::Vector, Self::Error>;
    /// Linear combination.
    fn combine(&self, terms: &[(QScalar, &Self::Vector)]) -> Self::Vector;
    /// First component where the vectors differ, with both values.
    fn first_difference(
        &self,
        a: &Self::Vector,
        b: &Self::Vector,
    ) -> Option<(String, QScalar, QScalar)>;
    /// Location string for a counterexample.
    fn locate(&self, probe: &str, component: &str) -> String {
        format!("{probe} -> {component}")
    }
    /// Value of a scalar appearing in a relation (q, q⁻¹). Symbolic by default.
    fn scalar(&self, c: QScalar) -> QScalar {
        c
    }
}

type RelFn<'a, A> = Box<
    dyn Fn(
            &A,
            &<A as Action>::Vector,
        ) -> Result<(<A as Action>::Vector, <A as Action>::Vector), <A as Action>::Error>
        + Sync
        + 'a,
>;

fn run_relations<A: Action>(a: &A, rels: Vec<(String, RelFn<'_, A>)>, exec: Exec) -> Report {
    let probes = a.probes();
    let jobs: Vec<(usize, usize)> = (0..rels.len())
        .flat_map(|r| (0..probes.len()).map(move |p| (r, p)))
        .collect();
    let outcomes = exec.map(&jobs, |&(r, p)| -> Option<Check> {
        let (pname, v) = &probes[p];
        let name = &rels[r].0;
        match (rels[r].1)(a, v) {
            Ok((lhs, rhs)) => a.first_difference(&lhs, &rhs).map(|(comp, l, rr)| {
                Check::fail(name.clone(), a.locate(pname, &comp)).with_mismatch(l, rr)
            }),
            Err(e) => Some(Check::fail(name.clone(), format!("{pname}: {e}"))),
        }
    });
    rels.iter()
        .enumerate()
        .map(|(r, (name, _))| {
            outcomes
                .iter()
                .skip(r * probes.len())
                .take(probes.len())
                .flatten()
                .next()
                .cloned()
                .unwrap_or_else(|| Check::pass(name.clone()))
        })
        .collect()
}

fn zero_of<A: Action>(a: &A, v: &A::Vector) -> A::Vector {
    a.combine(&[(QScalar::zero(), v)])
}

/// Cartan relations, [E12,E21] = [H1]_q and {E23,E32} = [H2]_q.
fn defining<'a, A: Action + 'a>() -> Vec<(String, RelFn<'a, A>)> {
    use Generator::*;
    let mut rels: Vec<(String, RelFn<'a, A>)> = Vec::new();
    let diag = [E11, E22, E33];
    for (i, x) in diag.iter().enumerate() {
        for y in &diag[i + 1..] {
            let (x, y) = (*x, *y);
            rels.push((
                format!("[{x},{y}] = 0"),
                Box::new(move |a: &A, v| {
                    let xy = a.act(x, &a.act(y, v)?)?;
                    let yx = a.act(y, &a.act(x, v)?)?;
                    Ok((xy, yx))
                }),
            ));
        }
    }
    for (i, x) in diag.iter().enumerate() {
        for g in Generator::ROOTS {
            let x = *x;
            let r = g.root()[i];
            rels.push((
                format!("[{x},{g}] = {r}*{g}"),
                Box::new(move |a: &A, v| {
                    let xg = a.act(x, &a.act(g, v)?)?;
                    let gx = a.act(g, &a.act(x, v)?)?;
                    let gv = a.act(g, v)?;
                    let lhs = a.combine(&[(QScalar::one(), &xg), (-QScalar::one(), &gx)]);
                    let rhs = a.combine(&[(QScalar::from_int(r), &gv)]);
                    Ok((lhs, rhs))
                }),
            ));
        }
    }
    rels.push((
        "[E12,E21] = [H1]_q".into(),
        Box::new(|a: &A, v| {
            let p = a.act(E12, &a.act(E21, v)?)?;
            let m = a.act(E21, &a.act(E12, v)?)?;
            let lhs = a.combine(&[(QScalar::one(), &p), (-QScalar::one(), &m)]);
            Ok((lhs, a.cartan_q(H1, v)?))
        }),
    ));
    rels.push((
        "{E23,E32} = [H2]_q".into(),
        Box::new(|a: &A, v| {
            let p = a.act(E23, &a.act(E32, v)?)?;
            let m = a.act(E32, &a.act(E23, v)?)?;
            let lhs = a.combine(&[(QScalar::one(), &p), (QScalar::one(), &m)]);
            Ok((lhs, a.cartan_q(H2, v)?))
        }),
    ));
    rels
}

/// Serre relations and the definitions of E13, E31.
fn serre<'a, A: Action + 'a>() -> Vec<(String, RelFn<'a, A>)> {
    use Generator::*;
    let mut rels: Vec<(String, RelFn<'a, A>)> = Vec::new();
    for g in [E23, E32] {
        rels.push((
            format!("{g}^2 = 0"),
            Box::new(move |a: &A, v| {
                let sq = a.act(g, &a.act(g, v)?)?;
                let z = zero_of(a, &sq);
                Ok((sq, z))
            }),
        ));
    }
    for (x, y) in [(E12, E13), (E21, E31)] {
        rels.push((
            format!("[{x},{y}]_q = 0"),
            Box::new(move |a: &A, v| {
                let xy = a.act(x, &a.act(y, v)?)?;
                let yx = a.act(y, &a.act(x, v)?)?;
                let lhs = a.combine(&[(QScalar::one(), &xy), (-a.scalar(QScalar::q()), &yx)]);
                let z = zero_of(a, &lhs);
                Ok((lhs, z))
            }),
        ));
    }
    for (target, x, y, sign) in [(E13, E12, E23, 1), (E31, E21, E32, -1)] {
        let name = if sign == 1 {
            format!("{target} = [{x},{y}]_(q^-1)")
        } else {
            format!("{target} = -[{x},{y}]_(q^-1)")
        };
        rels.push((
            name,
            Box::new(move |a: &A, v| {
                let xy = a.act(x, &a.act(y, v)?)?;
                let yx = a.act(y, &a.act(x, v)?)?;
                let s = QScalar::from_int(sign);
                let qi = a.scalar(QScalar::z_pow(-2));
                let rhs = a.combine(&[(s.clone(), &xy), (-(&s * &qi), &yx)]);
                Ok((a.act(target, v)?, rhs))
            }),
        ));
    }
    rels
}

/// Defining relations followed by Serre relations.
pub(crate) fn relation_suite<A: Action>(a: &A, exec: Exec) -> Report {
    let mut rels = defining::<A>();
    rels.extend(serre::<A>());
    run_relations(a, rels, exec)
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// The generator matrices acting on coordinate vectors.
struct MatrixAction<'a> {
    rep: &'a Representation,
    /// Integer eigenvalues of H1 and H2.
    cartan: [Vec<i64>; 2],
    /// Evaluation point q0 for numeric checks (None = symbolic).
    q0: Option<BigRational>,
}

impl<'a> MatrixAction<'a> {
    fn new(rep: &'a Representation, q0: Option<BigRational>) -> Result<Self, VerifyError> {
        let read = |g: Generator| -> Result<Vec<i64>, VerifyError> {
            let m = rep.matrix(g);
            if !m.is_diagonal() {
                return Err(VerifyError::NonDiagonalCartan(g));
            }
            (0..rep.dim())
                .map(|i| {
                    let v = m.get(i, i);
                    v.to_rational()
                        .filter(|r| r.is_integer())
                        .and_then(|r| i64::try_from(r.to_integer()).ok())
                        .ok_or_else(|| VerifyError::NonIntegerCartan {
                            generator: g,
                            index: i,
                            value: v.to_string(),
                        })
                })
                .collect()
        };
        Ok(MatrixAction {
            rep,
            cartan: [read(Generator::H1)?, read(Generator::H2)?],
            q0,
        })
    }
}

impl Action for MatrixAction<'_> {
    type Vector = SparseVec;
    type Error = VerifyError;

    fn probes(&self) -> Vec<(String, SparseVec)> {
        (0..self.rep.dim())
            .map(|j| (j.to_string(), SparseVec::from([(j, QScalar::one())])))
            .collect()
    }

    fn act(&self, g: Generator, v: &SparseVec) -> Result<SparseVec, VerifyError> {
        Ok(self.rep.matrix(g).apply(v))
    }

    fn cartan_q(&self, g: Generator, v: &SparseVec) -> Result<SparseVec, VerifyError> {
        let h = &self.cartan[if g == Generator::H1 { 0 } else { 1 }];
        let mut out = SparseVec::new();
        for (i, c) in v {
            let e = self.scalar(qint(h[*i]));
            axpy(&mut out, c, &SparseVec::from([(*i, e)]));
        }
        Ok(out)
    }

    fn combine(&self, terms: &[(QScalar, &SparseVec)]) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, v) in terms {
            axpy(&mut out, c, v);
        }
        out
    }

    fn first_difference(&self, a: &SparseVec, b: &SparseVec) -> Option<(String, QScalar, QScalar)> {
        let d = self.combine(&[(QScalar::one(), a), (-QScalar::one(), b)]);
        d.keys().next().map(|i| {
            let get = |v: &SparseVec| v.get(i).cloned().unwrap_or_default();
            (i.to_string(), get(a), get(b))
        })
    }

    fn locate(&self, probe: &str, component: &str) -> String {
        format!("({component}, {probe})")
    }

    fn scalar(&self, c: QScalar) -> QScalar {
        match &self.q0 {
            None => c,
            Some(q0) => QScalar::from_rational(c.eval_at(q0).expect("q-number at a valid point")),
        }
    }
}

/// Cartan identifications H1 = E11 − E22, H2 = E22 + E33, H3 = E33.
fn cartan_identities(rep: &Representation) -> Report {
    use Generator::*;
    let one = QScalar::one;
    let cases = [
        ("H1 = E11 - E22", H1, [(one(), E11), (-one(), E22)]),
        ("H2 = E22 + E33", H2, [(one(), E22), (one(), E33)]),
        ("H3 = E33", H3, [(one(), E33), (QScalar::zero(), E33)]),
    ];
    cases
        .into_iter()
        .map(|(name, h, terms)| {
            let rhs = SparseMatrix::combination(&[
                (terms[0].0.clone(), rep.matrix(terms[0].1)),
                (terms[1].0.clone(), rep.matrix(terms[1].1)),
            ]);
            match rep.matrix(h).first_difference(&rhs) {
                None => Check::pass(name),
                Some((i, j)) => Check::fail(name, format!("({i}, {j})"))
                    .with_mismatch(rep.matrix(h).get(i, j), rhs.get(i, j)),
            }
        })
        .collect()
}

/// Cartan relations, root relations, [E12,E21] = [H1]_q and
/// {E23,E32} = [H2]_q on the matrices.
pub fn check_defining_relations(rep: &Representation) -> Result<Report, VerifyError> {
    check_defining_relations_with(rep, Exec::default())
}

/// [`check_defining_relations`] with an explicit execution mode.
pub fn check_defining_relations_with(
    rep: &Representation,
    exec: Exec,
) -> Result<Report, VerifyError> {
    let a = MatrixAction::new(rep, None)?;
    let mut r = cartan_identities(rep);
    r.extend_prefixed("", run_relations(&a, defining::<MatrixAction<'_>>(), exec));
    Ok(r)
}

/// E23² = E32² = 0, [E12,E13]_q = [E21,E31]_q = 0 and the definitions of
/// E13 and E31 as q-brackets, on the matrices.
pub fn check_serre(rep: &Representation) -> Report {
    check_serre_with(rep, Exec::default())
}

/// [`check_serre`] with an explicit execution mode.
pub fn check_serre_with(rep: &Representation, exec: Exec) -> Report {
    let a = MatrixAction {
        rep,
        cartan: [Vec::new(), Vec::new()],
        q0: None,
    };
    run_relations(&a, serre::<MatrixAction<'_>>(), exec)
}

/// Both matrix suites.
pub fn check_all(rep: &Representation, exec: Exec) -> Result<Report, VerifyError> {
    let mut r = check_defining_relations_with(rep, exec)?;
    r.extend_prefixed("", check_serre_with(rep, exec));
    Ok(r)
}

/// All twelve matrices evaluated at q = q0 (given as a rational square),
/// stored as constant scalars.
pub fn evaluate_rep(
    rep: &Representation,
    q0: &BigRational,
) -> Result<Vec<(Generator, SparseMatrix)>, VerifyError> {
    rep.matrices()
        .map(|(g, m)| {
            let mut out = SparseMatrix::zeros(m.dim());
            for (row, col, v) in m.entries() {
                let x = v.eval_at(q0).map_err(|source| VerifyError::SingularEvaluation {
                    generator: g,
                    row,
                    col,
                    source,
                })?;
                out.set(row, col, QScalar::from_rational(x));
            }
            Ok((g, out))
        })
        .collect()
}

fn parity(i: usize) -> i64 {
    i64::from(i == 3)
}

/// Evaluate at z = 1 and check the gl(2|1) super-commutator table
/// [e_ij, e_kl} = δ_jk e_il − (−1)^((|i|+|j|)(|k|+|l|)) δ_il e_kj
/// for all pairs of the nine matrix units.
pub fn classical_limit_check(rep: &Representation) -> Result<Report, VerifyError> {
    classical_limit_check_with(rep, Exec::default())
}

/// [`classical_limit_check`] with an explicit execution mode.
pub fn classical_limit_check_with(rep: &Representation, exec: Exec) -> Result<Report, VerifyError> {
    let mats = evaluate_rep(rep, &BigRational::one())?;
    let get = |g: Generator| &mats.iter().find(|(h, _)| *h == g).expect("generator").1;
    let units: Vec<(Generator, (usize, usize))> = Generator::ALL
        .into_iter()
        .filter_map(|g| g.indices().map(|ij| (g, ij)))
        .collect();
    let unit = |i: usize, j: usize| {
        units
            .iter()
            .find(|(_, ij)| *ij == (i, j))
            .map(|(g, _)| get(*g))
            .expect("matrix unit")
    };
    let pairs: Vec<_> = units
        .iter()
        .flat_map(|x| units.iter().map(move |y| (*x, *y)))
        .collect();
    let dim = rep.dim();
    let mut report: Report = exec
        .map(&pairs, |&((gx, (i, j)), (gy, (k, l)))| {
            let px = (parity(i) + parity(j)) % 2;
            let py = (parity(k) + parity(l)) % 2;
            let sign = if px * py == 1 { -1 } else { 1 };
            let x = get(gx);
            let y = get(gy);
            let lhs = SparseMatrix::combination(&[
                (QScalar::one(), &x.mul(y)),
                (QScalar::from_int(-sign), &y.mul(x)),
            ]);
            let mut rhs = SparseMatrix::zeros(dim);
            if j == k {
                rhs = SparseMatrix::combination(&[(QScalar::one(), &rhs), (QScalar::one(), unit(i, l))]);
            }
            if i == l {
                rhs = SparseMatrix::combination(&[
                    (QScalar::one(), &rhs),
                    (QScalar::from_int(-sign), unit(k, j)),
                ]);
            }
            let bracket = if sign == -1 { ("{", "}") } else { ("[", "]") };
            let name = format!(
                "{}e{i}{j},e{k}{l}{} (q = 1)",
                bracket.0, bracket.1
            );
            match lhs.first_difference(&rhs) {
                None => Check::pass(name),
                Some((r, c)) => Check::fail(name, format!("({r}, {c})"))
                    .with_mismatch(lhs.get(r, c), rhs.get(r, c)),
            }
        })
        .into_iter()
        .collect();
    for (name, h, a, b) in [
        ("h1 = e11 - e22 (q = 1)", Generator::H1, (1, 1), (2, 2)),
        ("h2 = e22 + e33 (q = 1)", Generator::H2, (2, 2), (3, 3)),
    ] {
        let s = if h == Generator::H1 { -1 } else { 1 };
        let rhs = SparseMatrix::combination(&[
            (QScalar::one(), unit(a.0, a.1)),
            (QScalar::from_int(s), unit(b.0, b.1)),
        ]);
        report.push(match get(h).first_difference(&rhs) {
            None => Check::pass(name),
            Some((r, c)) => Check::fail(name, format!("({r}, {c})")),
        });
    }
    Ok(report)
}

/// Evaluate at a rational q0 ≠ 1 (an exact square) and check the defining
/// and Serre relations with q replaced by q0.
pub fn numeric_relation_check(
    rep: &Representation,
    q0: &BigRational,
    exec: Exec,
) -> Result<Report, VerifyError> {
    let mats = evaluate_rep(rep, q0)?;
    let mut numeric = rep.clone();
    for (g, m) in mats {
        numeric = numeric.with_matrix(g, m);
    }
    let a = MatrixAction::new(&numeric, Some(q0.clone()))?;
    let mut rels = defining::<MatrixAction<'_>>();
    rels.extend(serre::<MatrixAction<'_>>());
    let mut r = cartan_identities(&numeric);
    r.extend_prefixed("", run_relations(&a, rels, exec));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::RealizationParams;
    use crate::repbuilder::build_rep;

    fn rep(t1: i64, t2: i64, t3: i64) -> Representation {
        build_rep(&RealizationParams::from_twice(t1, t2, t3)).unwrap()
    }

    #[test]
    fn typical_rep_passes_everything() {
        let r = rep(2, 1, 0);
        let d = check_defining_relations(&r).unwrap();
        assert!(d.passed(), "{d}");
        let s = check_serre(&r);
        assert!(s.passed(), "{s}");
        let c = classical_limit_check(&r).unwrap();
        assert!(c.passed(), "{c}");
    }

    #[test]
    fn smallest_module_passes() {
        let r = rep(0, 1, 0);
        assert_eq!(r.dim(), 4);
        assert!(check_all(&r, Exec::Sequential).unwrap().passed());
    }

    #[test]
    fn classical_bracket_of_e12_e21() {
        let r = rep(1, 2, 0);
        let c = classical_limit_check(&r).unwrap();
        assert!(c.get("[e12,e21] (q = 1)").unwrap().passed);
        assert!(c.get("{e23,e32} (q = 1)").unwrap().passed);
    }

    #[test]
    fn numeric_q_passes() {
        let r = rep(1, 2, 0);
        let q0 = BigRational::new(9.into(), 4.into());
        let n = numeric_relation_check(&r, &q0, Exec::default()).unwrap();
        assert!(n.passed(), "{n}");
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let r = rep(3, -1, 2);
        assert_eq!(
            check_all(&r, Exec::Sequential).unwrap(),
            check_all(&r, Exec::Parallel).unwrap()
        );
    }

    fn fails(r: &Representation) -> bool {
        let all = check_all(r, Exec::default()).unwrap();
        !all.passed()
    }

    #[test]
    fn mutation_scale_e21_by_q() {
        let r = rep(2, 1, 0);
        let m = r.matrix(Generator::E21).scaled(&QScalar::q());
        let bad = r.with_matrix(Generator::E21, m);
        let d = check_defining_relations(&bad).unwrap();
        let c = d.get("[E12,E21] = [H1]_q").unwrap();
        assert!(!c.passed);
        assert!(c.location.is_some() && c.mismatch.is_some());
    }

    #[test]
    fn mutation_e13_with_q_instead_of_inverse() {
        let r = rep(2, 1, 0);
        let e12 = r.matrix(Generator::E12);
        let e23 = r.matrix(Generator::E23);
        let wrong = SparseMatrix::combination(&[
            (QScalar::one(), &e12.mul(e23)),
            (-QScalar::q(), &e23.mul(e12)),
        ]);
        let bad = r.with_matrix(Generator::E13, wrong);
        let s = check_serre(&bad);
        assert!(!s.get("E13 = [E12,E23]_(q^-1)").unwrap().passed);
    }

    #[test]
    fn mutation_drop_one_e23_entry() {
        let r = rep(1, 2, 0);
        let mut m = r.matrix(Generator::E23).clone();
        let (i, j, _) = m.entries()[0].clone();
        m.set(i, j, QScalar::zero());
        assert!(fails(&r.with_matrix(Generator::E23, m)));
    }

    #[test]
    fn mutation_shift_h2_eigenvalue() {
        let r = rep(1, 2, 0);
        let mut m = r.matrix(Generator::H2).clone();
        m.add_to(0, 0, &QScalar::one());
        assert!(fails(&r.with_matrix(Generator::H2, m)));
    }

    #[test]
    fn mutation_flip_e31_sign() {
        let r = rep(2, 3, 0);
        let m = r.matrix(Generator::E31).scaled(&-QScalar::one());
        assert!(fails(&r.with_matrix(Generator::E31, m)));
    }

    #[test]
    fn mutation_swap_e12_and_e21() {
        let r = rep(2, 1, 0);
        let e12 = r.matrix(Generator::E12).clone();
        let e21 = r.matrix(Generator::E21).clone();
        let bad = r.with_matrix(Generator::E12, e21).with_matrix(Generator::E21, e12);
        assert!(fails(&bad));
    }

    #[test]
    fn non_integer_cartan_is_reported() {
        let r = rep(1, 2, 0);
        let mut m = r.matrix(Generator::H1).clone();
        m.set(0, 0, QScalar::q());
        let bad = r.with_matrix(Generator::H1, m);
        assert!(matches!(
            check_defining_relations(&bad),
            Err(VerifyError::NonIntegerCartan { .. })
        ));
    }
}
