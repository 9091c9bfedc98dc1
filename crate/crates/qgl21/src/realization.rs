//! The q-boson-fermion realization Γ of the Uq[gl(2|1)] generators on the
//! Fock space, parameterized by a highest weight (J₁, J₂, J₃) and a family
//! of four coefficient functions of N.
//!
//! Each odd or off-diagonal generator is a sum of operator words. A word is
//! a list of factors read left to right and applied right to left: ladder
//! operators act on the state, and coefficient factors are functions of the
//! boson number evaluated at the occupation reached at their slot.
//!
//! Evaluation of a word on a monomial runs in two passes:
//!
//! 1. a structural pass pushes only the ladder operators through the word;
//!    if the monomial is annihilated the term is dropped before any
//!    coefficient is evaluated;
//! 2. a coefficient pass walks the word again right to left, multiplying
//!    factors in, and stops as soon as the running product is exactly zero.
//!
//! Both rules matter: several coefficient factors are singular exactly on
//! states that the surrounding operators annihilate (for instance a ratio
//! with D₄(N−1) in front of a boson annihilator acting on n = 0).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::coeff::{CoeffError, CoeffFamily, CoeffFn};
use crate::exec::Exec;
use crate::fock::{act_structural, apply_monomial, FockMonomial, FockVector, LadderOp};
use crate::qfield::{qfact, qint, HalfInt, QScalar};
use crate::report::{Check, Report};
use crate::repbuilder::Representation;
use crate::verify::{relation_suite, Action};

/// The twelve generator names, in export order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    H1,
    H2,
    H3,
    E11,
    E22,
    E33,
    E12,
    E21,
    E23,
    E32,
    E13,
    E31,
}

impl Generator {
    /// All generators in the fixed export order.
    pub const ALL: [Generator; 12] = [
        Generator::H1,
        Generator::H2,
        Generator::H3,
        Generator::E11,
        Generator::E22,
        Generator::E33,
        Generator::E12,
        Generator::E21,
        Generator::E23,
        Generator::E32,
        Generator::E13,
        Generator::E31,
    ];

    /// The six root generators.
    pub const ROOTS: [Generator; 6] = [
        Generator::E12,
        Generator::E21,
        Generator::E23,
        Generator::E32,
        Generator::E13,
        Generator::E31,
    ];

    /// Printable name, e.g. `E12`.
    pub fn name(self) -> &'static str {
        match self {
            Generator::H1 => "H1",
            Generator::H2 => "H2",
            Generator::H3 => "H3",
            Generator::E11 => "E11",
            Generator::E22 => "E22",
            Generator::E33 => "E33",
            Generator::E12 => "E12",
            Generator::E21 => "E21",
            Generator::E23 => "E23",
            Generator::E32 => "E32",
            Generator::E13 => "E13",
            Generator::E31 => "E31",
        }
    }

    /// Look up a generator by name.
    pub fn from_name(s: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Matrix unit indices (i, j) for E_ij; `None` for H1, H2, H3.
    pub fn indices(self) -> Option<(usize, usize)> {
        match self {
            Generator::E11 => Some((1, 1)),
            Generator::E22 => Some((2, 2)),
            Generator::E33 => Some((3, 3)),
            Generator::E12 => Some((1, 2)),
            Generator::E21 => Some((2, 1)),
            Generator::E23 => Some((2, 3)),
            Generator::E32 => Some((3, 2)),
            Generator::E13 => Some((1, 3)),
            Generator::E31 => Some((3, 1)),
            _ => None,
        }
    }

    /// True for the odd generators E23, E32, E13, E31.
    pub fn is_odd(self) -> bool {
        matches!(
            self,
            Generator::E23 | Generator::E32 | Generator::E13 | Generator::E31
        )
    }

    /// Change of the (E11, E22, E33) eigenvalues caused by the generator.
    pub fn root(self) -> [i64; 3] {
        match self.indices() {
            Some((i, j)) if i != j => {
                let mut r = [0; 3];
                r[i - 1] += 1;
                r[j - 1] -= 1;
                r
            }
            _ => [0; 3],
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Highest weight and coefficient family of a realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationParams {
    /// J₁ ≥ 0.
    pub j1: HalfInt,
    /// J₂.
    pub j2: HalfInt,
    /// J₃.
    pub j3: HalfInt,
    /// F₁..F₄ (the standard D family by default).
    pub coeffs: CoeffFamily,
}

impl RealizationParams {
    /// Parameters with the standard coefficient family.
    pub fn new(j1: HalfInt, j2: HalfInt, j3: HalfInt) -> Self {
        RealizationParams {
            j1,
            j2,
            j3,
            coeffs: CoeffFamily::Standard,
        }
    }

    /// Convenience constructor from twice the weights.
    pub fn from_twice(t1: i64, t2: i64, t3: i64) -> Self {
        RealizationParams::new(
            HalfInt::from_twice(t1),
            HalfInt::from_twice(t2),
            HalfInt::from_twice(t3),
        )
    }

    /// Replace the coefficient family.
    pub fn with_coeffs(mut self, coeffs: CoeffFamily) -> Self {
        self.coeffs = coeffs;
        self
    }

    /// Check that J₁ is a nonnegative half-integer.
    pub fn validate(&self) -> Result<(), RealizationError> {
        if self.j1.twice() < 0 {
            return Err(RealizationError::InvalidParams(format!(
                "j1 = {} must be nonnegative",
                self.j1
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RealizationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(J1, J2, J3) = ({}, {}, {})", self.j1, self.j2, self.j3)
    }
}

/// Errors raised while applying the realization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizationError {
    /// A nonzero term needed a coefficient value that is singular.
    #[error("Γ({generator}) on {state}: {source}")]
    SingularCoefficient {
        generator: Generator,
        state: String,
        source: CoeffError,
    },
    /// Malformed parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

// ---------------------------------------------------------------------------
// Operator words
// ---------------------------------------------------------------------------

/// Evaluation context handed to coefficient factors.
pub struct Ctx<'a> {
    real: &'a Realization,
}

type CoefResult = Result<QScalar, CoeffError>;

impl Ctx<'_> {
    /// F_i(n), memoized.
    pub fn f(&self, i: usize, n: i64) -> CoefResult {
        self.real.coeff_value(i, n)
    }

    /// [n]_q.
    pub fn qn(&self, n: i64) -> QScalar {
        qint(n)
    }

    /// q^n.
    pub fn qp(&self, n: i64) -> QScalar {
        QScalar::z_pow(2 * n)
    }

    /// Exact division that reports a singular coefficient at `n`.
    pub fn div(&self, a: QScalar, b: QScalar, n: i64, what: &str) -> CoefResult {
        a.checked_div(&b)
            .ok_or_else(|| CoeffError::SingularCoefficient {
                n,
                sub: what.to_string(),
            })
    }

    /// F_i(n1) / F_j(n2).
    pub fn ratio(&self, i: usize, n1: i64, j: usize, n2: i64) -> CoefResult {
        let what = format!("F{j}(N{:+})", n2 - n1);
        self.div(self.f(i, n1)?, self.f(j, n2)?, n2, &what)
    }

    /// 1 / F_i(n).
    pub fn recip(&self, i: usize, n: i64) -> CoefResult {
        self.div(QScalar::one(), self.f(i, n)?, n, &format!("F{i}(N)"))
    }
}

type CoefFn = Arc<dyn Fn(&Ctx<'_>, i64) -> CoefResult + Send + Sync>;

/// One factor of an operator word.
#[derive(Clone)]
pub enum Factor {
    /// A ladder operator.
    Op(LadderOp),
    /// A coefficient depending on the boson number at this slot.
    Coef(CoefFn),
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Op(op) => write!(f, "{op:?}"),
            Factor::Coef(_) => write!(f, "coef(N)"),
        }
    }
}

/// A scalar times an operator word.
#[derive(Clone, Debug)]
pub struct Term {
    /// Constant prefactor (depends only on the weights).
    pub coef: QScalar,
    /// Factors, leftmost first.
    pub factors: Vec<Factor>,
}

fn op(o: LadderOp) -> Factor {
    Factor::Op(o)
}

fn cf(f: impl Fn(&Ctx<'_>, i64) -> CoefResult + Send + Sync + 'static) -> Factor {
    Factor::Coef(Arc::new(f))
}

fn term(coef: QScalar, factors: Vec<Factor>) -> Term {
    Term { coef, factors }
}

/// Build the word tables for the six root generators.
fn build_terms(t1: i64, t2: i64) -> HashMap<Generator, Vec<Term>> {
    use LadderOp::{
        BosonAnnihilate as A, BosonCreate as AD, Fermion13Annihilate as D13,
        Fermion13Create as C13, Fermion23Annihilate as D23, Fermion23Create as C23, NumF13 as N13,
        NumF23 as N23,
    };
    let one = QScalar::one;
    let int = QScalar::from_int;
    let q = QScalar::q;
    let qinv = || QScalar::z_pow(-2);
    let q_t1 = QScalar::z_pow(2 * t1);
    let q_t2 = QScalar::z_pow(2 * t2);
    let q_t1t2 = &q_t1 * &q_t2;

    let mut g = HashMap::new();

    g.insert(
        Generator::E12,
        vec![
            term(one(), vec![op(A), op(D23), op(C23), op(D13), op(C13)]),
            term(
                one(),
                vec![op(A), cf(|c, n| c.ratio(1, n - 1, 1, n)), op(N23), op(D13), op(C13)],
            ),
            term(one(), vec![op(A), cf(|c, n| c.ratio(4, n - 1, 4, n)), op(N13), op(N23)]),
            term(
                one(),
                vec![
                    cf(|c, n| c.f(2, n)),
                    cf(|c, n| c.recip(3, n)),
                    cf(|c, n| Ok(c.qn(n))),
                    op(C23),
                    op(D13),
                ],
            ),
            term(
                int(-1),
                vec![
                    cf(|c, n| c.ratio(1, n, 1, n + 1)),
                    cf(|c, n| c.ratio(2, n + 1, 3, n)),
                    cf(|c, n| Ok(c.qn(n + 1))),
                    op(C23),
                    op(D13),
                ],
            ),
            term(
                one(),
                vec![op(A), cf(|c, n| c.ratio(3, n - 1, 3, n)), op(N13), op(D23), op(C23)],
            ),
        ],
    );

    let pre = -QScalar::z_pow(-2 * (t1 + 1));
    g.insert(
        Generator::E21,
        vec![
            term(
                pre.clone(),
                vec![cf(|c, n| c.ratio(2, n, 1, n - 1)), op(AD), op(N23), op(D13), op(C13)],
            ),
            term(
                -&pre,
                vec![
                    cf(|c, n| c.ratio(2, n, 1, n - 1)),
                    cf(|c, n| c.ratio(2, n - 1, 3, n - 2)),
                    op(AD),
                    op(AD),
                    op(C23),
                    op(D13),
                ],
            ),
            term(pre.clone(), vec![cf(|c, n| c.ratio(3, n, 1, n)), op(C13), op(D23)]),
            term(
                -&pre,
                vec![
                    cf(|c, n| c.ratio(3, n, 1, n)),
                    op(C13),
                    op(D23),
                    cf(|c, n| c.ratio(2, n, 3, n - 1)),
                    op(AD),
                    op(C23),
                    op(D13),
                ],
            ),
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(c.qn(t1 - n + 1))),
                    op(AD),
                    op(D23),
                    op(C23),
                    op(D13),
                    op(C13),
                ],
            ),
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(c.qn(t1 + 2 - n) * c.ratio(1, n, 1, n - 1)?)),
                    op(AD),
                    op(N23),
                    op(D13),
                    op(C13),
                ],
            ),
            term(
                one(),
                vec![
                    cf(move |c, n| {
                        let a = c.qn(t1 - n + 1) * c.ratio(2, n, 3, n - 2)?;
                        let b = c.qn(t1 - n + 2)
                            * c.ratio(1, n, 1, n - 1)?
                            * c.ratio(2, n - 1, 3, n - 2)?;
                        Ok(a - b)
                    }),
                    op(AD),
                    op(AD),
                    op(C23),
                    op(D13),
                ],
            ),
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(c.qn(t1 - n) * c.ratio(3, n, 3, n - 1)?)),
                    op(AD),
                    op(N13),
                    op(D23),
                    op(C23),
                ],
            ),
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(c.qn(t1 - n + 1) * c.ratio(4, n, 4, n - 1)?)),
                    op(AD),
                    op(N13),
                    op(N23),
                ],
            ),
        ],
    );

    g.insert(
        Generator::E13,
        vec![
            term(
                one(),
                vec![
                    cf(|c, n| c.div(c.qp(n), c.f(3, n)?, n, "F3(N)")),
                    op(D13),
                    op(D23),
                    op(C23),
                ],
            ),
            term(
                one(),
                vec![cf(|c, n| Ok(c.qp(n) * c.ratio(1, n, 4, n)?)), op(D13), op(N23)],
            ),
        ],
    );

    let cc = qint(t1 + t2) * qinv();
    let cc_q = &cc * &qinv();
    let qq_q = &q_t1t2 * &qinv();
    let qt1 = q_t1.clone();
    let qt1b = q_t1.clone();
    let qa = q_t1t2.clone();
    let qb = q_t1t2.clone();
    let qc = q_t1t2.clone();
    let qd = q_t1t2.clone();
    let qe = q_t1t2.clone();
    g.insert(
        Generator::E31,
        vec![
            term(cc.clone(), vec![cf(|c, n| c.f(2, n)), op(AD), op(C23), op(D13), op(C13)]),
            term(cc.clone(), vec![cf(|c, n| c.f(3, n)), op(C13), op(D23), op(C23)]),
            term(cc_q.clone(), vec![cf(|c, n| c.ratio(4, n, 1, n)), op(C13), op(N23)]),
            term(
                cc_q,
                vec![
                    cf(|c, n| c.ratio(4, n, 1, n)),
                    cf(|c, n| c.ratio(2, n, 3, n - 1)),
                    op(AD),
                    op(C23),
                    op(N13),
                ],
            ),
            term(
                qq_q.clone(),
                vec![cf(|c, n| c.f(4, n)), op(C13), op(N23), cf(|c, n| c.recip(1, n))],
            ),
            term(
                qq_q,
                vec![
                    cf(|c, n| c.f(4, n)),
                    op(N13),
                    cf(|c, n| c.recip(1, n)),
                    cf(|c, n| c.ratio(2, n, 3, n - 1)),
                    op(AD),
                    op(C23),
                ],
            ),
            term(
                int(-1),
                vec![
                    cf(move |c, n| Ok(&qa * &c.qp(-n) * c.f(2, n)?)),
                    cf(|c, n| Ok(c.qn(n - 1))),
                    op(AD),
                    op(C23),
                    op(D13),
                    op(C13),
                ],
            ),
            term(
                -qint(t2),
                vec![
                    cf(move |c, n| Ok(&qt1 * &c.qp(1 - n) * c.f(1, n)?)),
                    op(AD),
                    op(C23),
                    op(D13),
                    op(C13),
                ],
            ),
            term(
                int(-1),
                vec![
                    cf(move |c, n| Ok(&qb * &c.qp(-n - 1) * c.f(3, n)?)),
                    cf(|c, n| Ok(c.qn(n))),
                    op(C13),
                    op(D23),
                    op(C23),
                ],
            ),
            term(
                -(qint(t2 + 1) * q()),
                vec![
                    cf(move |c, n| Ok(&qt1b * &c.qp(-n) * c.ratio(4, n, 3, n - 1)?)),
                    op(AD),
                    op(C23),
                    op(N13),
                ],
            ),
            term(
                int(-1),
                vec![
                    cf(move |c, n| Ok(&qc * &c.qp(-n) * c.ratio(4, n, 1, n)?)),
                    cf(|c, n| Ok(c.qn(n))),
                    op(C13),
                    op(N23),
                ],
            ),
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(&qd * &c.qp(-n) * c.ratio(4, n, 1, n)?)),
                    cf(|c, n| Ok(c.qn(n))),
                    op(C13),
                    cf(|c, n| c.ratio(2, n, 3, n - 1)),
                    op(AD),
                    op(C23),
                    op(D13),
                ],
            ),
            term(
                q(),
                vec![
                    cf(move |c, n| Ok(&qe * &c.qp(-n) * c.ratio(4, n, 3, n - 1)?)),
                    op(AD),
                    op(C23),
                    op(N13),
                ],
            ),
        ],
    );

    g.insert(
        Generator::E23,
        vec![
            term(
                one(),
                vec![
                    cf(|c, n| c.div(QScalar::one(), c.qp(n) * c.f(1, n)?, n, "F1(N)")),
                    op(D23),
                    op(D13),
                    op(C13),
                ],
            ),
            term(
                int(-1),
                vec![
                    cf(|c, n| c.div(QScalar::one(), c.qp(n) * c.f(1, n)?, n, "F1(N)")),
                    cf(|c, n| c.ratio(2, n, 3, n - 1)),
                    op(AD),
                    op(D13),
                    op(D23),
                    op(C23),
                ],
            ),
            term(
                int(-1),
                vec![cf(|c, n| Ok(c.qp(-n) * c.ratio(2, n, 4, n - 1)?)), op(AD), op(D13), op(N23)],
            ),
            term(
                one(),
                vec![
                    cf(|c, n| c.div(c.f(3, n)?, c.qp(n + 1) * c.f(4, n)?, n, "F4(N)")),
                    op(D23),
                    op(N13),
                ],
            ),
            term(one(), vec![cf(|c, n| c.recip(3, n - 1)), op(AD), op(D13), op(D23), op(C23)]),
            term(one(), vec![cf(|c, n| c.ratio(1, n, 4, n - 1)), op(AD), op(D13), op(N23)]),
        ],
    );

    let qt2a = q_t2.clone();
    let qt2b = q_t2.clone();
    let qt2c = q_t2.clone();
    let qt2d = q_t2.clone();
    let qt2e = q_t2;
    g.insert(
        Generator::E32,
        vec![
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(&qt2a * &c.f(2, n)?)),
                    cf(|c, n| Ok(c.qn(n))),
                    op(C23),
                    op(D13),
                    op(C13),
                ],
            ),
            term(qint(t2), vec![cf(|c, n| c.f(1, n)), op(C23), op(D13), op(C13)]),
            term(
                one(),
                vec![cf(move |c, n| Ok(&qt2b * &c.f(3, n)?)), op(A), op(C13), op(D23), op(C23)],
            ),
            term(qint(t2 + 1) * q(), vec![cf(|c, n| c.ratio(4, n, 3, n)), op(C23), op(N13)]),
            term(
                one(),
                vec![
                    cf(move |c, n| Ok(&qt2c * &c.f(4, n)?)),
                    op(A),
                    op(C13),
                    cf(|c, n| c.recip(1, n)),
                    op(N23),
                ],
            ),
            term(
                int(-1),
                vec![
                    cf(move |c, n| Ok(&qt2d * &c.f(4, n)?)),
                    op(A),
                    op(C13),
                    cf(|c, n| c.recip(1, n)),
                    cf(|c, n| c.ratio(2, n, 3, n - 1)),
                    op(AD),
                    op(C23),
                    op(D13),
                ],
            ),
            term(
                -q(),
                vec![
                    cf(move |c, n| Ok(&qt2e * &c.f(4, n)?)),
                    op(C23),
                    cf(|c, n| c.recip(3, n)),
                    op(N13),
                ],
            ),
        ],
    );
    g
}

// ---------------------------------------------------------------------------
// Realization
// ---------------------------------------------------------------------------

/// A realization Γ for fixed parameters, with memoized coefficient values.
pub struct Realization {
    params: RealizationParams,
    fns: [CoeffFn; 4],
    cache: RwLock<HashMap<(usize, i64), CoefResult>>,
    images: RwLock<HashMap<(Generator, FockMonomial), Result<FockVector, RealizationError>>>,
    terms: HashMap<Generator, Vec<Term>>,
}

impl fmt::Debug for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Realization")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl Realization {
    /// Set up the word tables for `params`.
    pub fn new(params: RealizationParams) -> Result<Self, RealizationError> {
        params.validate()?;
        let terms = build_terms(params.j1.twice(), params.j2.twice());
        Ok(Realization {
            fns: params.coeffs.functions(),
            params,
            cache: RwLock::new(HashMap::new()),
            images: RwLock::new(HashMap::new()),
            terms,
        })
    }

    /// The parameters this realization was built for.
    pub fn params(&self) -> &RealizationParams {
        &self.params
    }

    fn coeff_value(&self, i: usize, n: i64) -> CoefResult {
        if let Some(v) = self.cache.read().expect("cache lock").get(&(i, n)) {
            return v.clone();
        }
        let v = self.fns[i - 1].eval(n);
        self.cache
            .write()
            .expect("cache lock")
            .insert((i, n), v.clone());
        v
    }

    /// Mutable access to a generator's word table (for mutation testing).
    #[cfg(test)]
    pub(crate) fn terms_mut(&mut self, g: Generator) -> &mut Vec<Term> {
        self.images.get_mut().expect("cache lock").clear();
        self.terms.get_mut(&g).expect("root generator")
    }

    /// Eigenvalues of (H1, H2, H3) on a monomial.
    pub fn cartan_eigenvalues(&self, m: &FockMonomial) -> [i64; 3] {
        let (n, f13, f23) = (i64::from(m.n), i64::from(m.f13), i64::from(m.f23));
        [
            self.params.j1.twice() - 2 * n + f23 - f13,
            self.params.j2.twice() + n + f13,
            self.params.j3.twice() + f13 + f23,
        ]
    }

    /// Eigenvalue of a Cartan generator (H or E_ii) on a monomial.
    pub fn diagonal_eigenvalue(&self, g: Generator, m: &FockMonomial) -> Option<i64> {
        let [h1, h2, h3] = self.cartan_eigenvalues(m);
        Some(match g {
            Generator::H1 => h1,
            Generator::H2 => h2,
            Generator::H3 | Generator::E33 => h3,
            Generator::E22 => h2 - h3,
            Generator::E11 => h1 + h2 - h3,
            _ => return None,
        })
    }

    /// Apply one word to one monomial.
    fn apply_word(
        &self,
        t: &Term,
        m: FockMonomial,
    ) -> Result<Option<(QScalar, FockMonomial)>, CoeffError> {
        // Structural pass: is the monomial annihilated by the ladder operators?
        let mut cur = m;
        for f in t.factors.iter().rev() {
            if let Factor::Op(o) = f {
                match act_structural(*o, cur) {
                    Some((_, next)) => cur = next,
                    None => return Ok(None),
                }
            }
        }
        // Coefficient pass, right to left, with zero short-circuit.
        let ctx = Ctx { real: self };
        let mut c = t.coef.clone();
        if c.is_zero() {
            return Ok(None);
        }
        let mut cur = m;
        for f in t.factors.iter().rev() {
            match f {
                Factor::Op(o) => {
                    let (s, next) = apply_monomial(*o, cur).expect("structural pass succeeded");
                    c = c * s;
                    cur = next;
                }
                Factor::Coef(func) => {
                    c = c * func(&ctx, i64::from(cur.n))?;
                }
            }
            if c.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some((c, cur)))
    }

    /// Γ(g) applied to a Fock vector.
    pub fn gamma(&self, g: Generator, v: &FockVector) -> Result<FockVector, RealizationError> {
        if self.diagonal_eigenvalue(g, &FockMonomial::VACUUM).is_some() {
            let mut out = FockVector::zero();
            for (m, c) in v.iter() {
                let e = self.diagonal_eigenvalue(g, m).expect("diagonal generator");
                out.add_term(*m, &(c * &QScalar::from_int(e)));
            }
            return Ok(out);
        }
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            out.add_scaled(c, &self.gamma_monomial(g, *m)?);
        }
        Ok(out)
    }

    /// Γ(g) on a single monomial, memoized.
    fn gamma_monomial(&self, g: Generator, m: FockMonomial) -> Result<FockVector, RealizationError> {
        if let Some(v) = self.images.read().expect("cache lock").get(&(g, m)) {
            return v.clone();
        }
        let mut out = FockVector::zero();
        let mut result = Ok(());
        for t in &self.terms[&g] {
            match self.apply_word(t, m) {
                Ok(Some((s, target))) => out.add_term(target, &s),
                Ok(None) => {}
                Err(source) => {
                    result = Err(RealizationError::SingularCoefficient {
                        generator: g,
                        state: m.to_string(),
                        source,
                    });
                    break;
                }
            }
        }
        let v = result.map(|_| out);
        self.images
            .write()
            .expect("cache lock")
            .insert((g, m), v.clone());
        v
    }
}

/// Γ(g) applied to a Fock vector for the given parameters.
pub fn gamma(
    g: Generator,
    p: &RealizationParams,
    v: &FockVector,
) -> Result<FockVector, RealizationError> {
    Realization::new(p.clone())?.gamma(g, v)
}

/// Relation checking on Fock monomials with n ≤ nmax.
struct FockAction<'a> {
    real: &'a Realization,
    nmax: u32,
}

impl Action for FockAction<'_> {
    type Vector = FockVector;
    type Error = RealizationError;

    fn probes(&self) -> Vec<(String, FockVector)> {
        FockMonomial::all_up_to(self.nmax)
            .into_iter()
            .map(|m| (m.to_string(), FockVector::monomial(m)))
            .collect()
    }

    fn act(&self, g: Generator, v: &FockVector) -> Result<FockVector, RealizationError> {
        self.real.gamma(g, v)
    }

    fn cartan_q(&self, g: Generator, v: &FockVector) -> Result<FockVector, RealizationError> {
        let mut out = FockVector::zero();
        for (m, c) in v.iter() {
            let e = self.real.diagonal_eigenvalue(g, m).expect("Cartan generator");
            out.add_term(*m, &(c * &qint(e)));
        }
        Ok(out)
    }

    fn combine(&self, terms: &[(QScalar, &FockVector)]) -> FockVector {
        let mut out = FockVector::zero();
        for (c, v) in terms {
            out.add_scaled(c, v);
        }
        out
    }

    fn first_difference(&self, a: &FockVector, b: &FockVector) -> Option<(String, QScalar, QScalar)> {
        let d = a.sub(b);
        let m = *d.iter().next()?.0;
        Some((m.to_string(), a.coeff(&m), b.coeff(&m)))
    }
}

/// Check the full defining-relation suite (Cartan commutators,
/// [E12,E21] = [H1]_q, {E23,E32} = [H2]_q, Serre relations and the
/// definitions of E13, E31) on every monomial with n ≤ nmax.
pub fn verify_fock_relations(
    p: &RealizationParams,
    nmax: u32,
    exec: Exec,
) -> Result<Report, RealizationError> {
    let real = Realization::new(p.clone())?;
    Ok(verify_realization(&real, nmax, exec))
}

fn verify_realization(real: &Realization, nmax: u32, exec: Exec) -> Report {
    relation_suite(&FockAction { real, nmax }, exec)
}

// ---------------------------------------------------------------------------
// Factorization of the q-exponential
// ---------------------------------------------------------------------------

/// A state of Fock space ⊗ module: map (monomial, basis index) → coefficient.
type Mixed = std::collections::BTreeMap<(FockMonomial, usize), QScalar>;

fn mixed_add(out: &mut Mixed, k: (FockMonomial, usize), c: QScalar) {
    if c.is_zero() {
        return;
    }
    let e = out.entry(k).or_default();
    *e += &c;
    if e.is_zero() {
        out.remove(&k);
    }
}

fn mixed_sum(a: &Mixed, b: &Mixed) -> Mixed {
    let mut out = a.clone();
    for (k, c) in b {
        mixed_add(&mut out, *k, c.clone());
    }
    out
}

/// Apply `(fock word) ⊗ E` with the graded sign (−1)^{|E|·|fock state|}.
/// The Fock word is applied right to left after the module generator.
fn apply_mixed(
    rep: &Representation,
    g: Generator,
    word: &[LadderOp],
    s: &Mixed,
) -> Mixed {
    let mut out = Mixed::new();
    let m = rep.matrix(g);
    for ((fm, i), c) in s {
        let sign = if g.is_odd() && fm.fermion_number() % 2 == 1 {
            -QScalar::one()
        } else {
            QScalar::one()
        };
        for (row, v) in m.column(*i) {
            let mut coef = c * v * &sign;
            let mut cur = *fm;
            let mut alive = true;
            for o in word.iter().rev() {
                match apply_monomial(*o, cur) {
                    Some((s, next)) => {
                        coef = coef * s;
                        cur = next;
                    }
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
            if alive {
                mixed_add(&mut out, (cur, *row), coef);
            }
        }
    }
    out
}

fn apply_number_fn(f: &CoeffFn, s: &Mixed) -> Result<Mixed, CoeffError> {
    let mut out = Mixed::new();
    for ((fm, i), c) in s {
        mixed_add(&mut out, (*fm, *i), c * &f.eval(i64::from(fm.n))?);
    }
    Ok(out)
}

/// q-exponential Σ Xⁿ/[n]_q! of a nilpotent operator applied to `s`.
fn q_exp(s: &Mixed, x: impl Fn(&Mixed) -> Mixed) -> Mixed {
    let mut total = s.clone();
    let mut power = s.clone();
    let mut k = 0u32;
    loop {
        power = x(&power);
        if power.is_empty() {
            break;
        }
        k += 1;
        let inv = qfact(k).inv().expect("q-factorial is nonzero");
        let scaled: Mixed = power.iter().map(|(key, c)| (*key, c * &inv)).collect();
        total = mixed_sum(&total, &scaled);
    }
    total
}

fn pair_with_top(s: &Mixed) -> FockVector {
    let mut out = FockVector::zero();
    for ((fm, i), c) in s {
        if *i == 0 {
            out.add_term(*fm, c);
        }
    }
    out
}

/// Left and right sides of the factorization identity for one basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationSides {
    /// ⟨J| e_q^(a†E12 + α23†E23 + α13†E13) |ψ⟩|0⟩.
    pub lhs: FockVector,
    /// ⟨J| {D4 α13†E13 α23†E23 + D3 α13†E13 + e^(D2 a†α23†E13) e^(D1 α23†E23)} e_q^(a†E12) |ψ⟩|0⟩.
    pub rhs: FockVector,
}

/// Compute both sides of the factorization identity for basis vector `j`,
/// using `rhs_coeffs` for the functions on the factored side.
pub fn factorization_sides(
    rep: &Representation,
    j: usize,
    rhs_coeffs: &CoeffFamily,
) -> Result<FactorizationSides, CoeffError> {
    use LadderOp::{BosonCreate as AD, Fermion13Create as C13, Fermion23Create as C23};
    let mut start = Mixed::new();
    start.insert((FockMonomial::VACUUM, j), QScalar::one());

    let lhs = q_exp(&start, |s| {
        let a = apply_mixed(rep, Generator::E12, &[AD], s);
        let b = apply_mixed(rep, Generator::E23, &[C23], s);
        let c = apply_mixed(rep, Generator::E13, &[C13], s);
        mixed_sum(&mixed_sum(&a, &b), &c)
    });

    let e12 = q_exp(&start, |s| apply_mixed(rep, Generator::E12, &[AD], s));
    let [d1, d2, d3, d4] = rhs_coeffs.functions();
    // e^(D1 α23† E23) = 1 + D1 α23† E23 since α23†² = 0.
    let x1 = apply_number_fn(&d1, &apply_mixed(rep, Generator::E23, &[C23], &e12))?;
    let after_d1 = mixed_sum(&e12, &x1);
    // e^(D2 a† α23† E13) = 1 + D2 a† α23† E13 for the same reason.
    let y = apply_number_fn(&d2, &apply_mixed(rep, Generator::E13, &[AD, C23], &after_d1))?;
    let exp_part = mixed_sum(&after_d1, &y);
    let t3 = apply_number_fn(&d3, &apply_mixed(rep, Generator::E13, &[C13], &e12))?;
    let inner = apply_mixed(rep, Generator::E23, &[C23], &e12);
    let t4 = apply_number_fn(&d4, &apply_mixed(rep, Generator::E13, &[C13], &inner))?;
    let rhs = mixed_sum(&mixed_sum(&exp_part, &t3), &t4);

    Ok(FactorizationSides {
        lhs: pair_with_top(&lhs),
        rhs: pair_with_top(&rhs),
    })
}

/// For every basis vector ψ of `rep`, compare both sides of the
/// factorization of the q-exponential, using the coefficient family of `p`
/// on the factored side.
pub fn factorization_check(p: &RealizationParams, rep: &Representation) -> Report {
    factorization_check_with(rep, &p.coeffs, Exec::default())
}

/// As [`factorization_check`], with an explicit family on the factored side.
pub fn factorization_check_with(
    rep: &Representation,
    rhs_coeffs: &CoeffFamily,
    exec: Exec,
) -> Report {
    let idx: Vec<usize> = (0..rep.dim()).collect();
    exec.map(&idx, |&j| {
        let name = format!("basis {} ({})", j, rep.labels()[j]);
        match factorization_sides(rep, j, rhs_coeffs) {
            Ok(s) if s.lhs == s.rhs => Check::pass(name),
            Ok(s) => {
                let d = s.lhs.sub(&s.rhs);
                let (m, _) = d.iter().next().expect("nonzero difference");
                Check::fail(name, m.to_string())
                    .with_mismatch(s.lhs.coeff(m), s.rhs.coeff(m))
            }
            Err(e) => Check::fail(name, format!("singular coefficient: {e}")),
        }
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockMonomial as M;

    fn p(t1: i64, t2: i64, t3: i64) -> RealizationParams {
        RealizationParams::from_twice(t1, t2, t3)
    }

    #[test]
    fn h1_on_two_bosons() {
        let v = FockVector::monomial(M::new(2, 0, 0));
        let r = gamma(Generator::H1, &p(2, 0, 0), &v).unwrap();
        assert_eq!(r, v.scaled(&QScalar::from_int(-2)));
    }

    #[test]
    fn e13_kills_vacuum() {
        let v = FockVector::monomial(M::VACUUM);
        assert!(gamma(Generator::E13, &p(1, 2, 0), &v).unwrap().is_zero());
    }

    #[test]
    fn root_generators_shift_weights() {
        let real = Realization::new(p(3, -1, 1)).unwrap();
        for g in Generator::ROOTS {
            for m in M::all_up_to(5) {
                let img = real.gamma(g, &FockVector::monomial(m)).unwrap();
                let w = |x: &M| {
                    [Generator::E11, Generator::E22, Generator::E33]
                        .map(|e| real.diagonal_eigenvalue(e, x).unwrap())
                };
                let w0 = w(&m);
                for (t, _) in img.iter() {
                    let w1 = w(t);
                    let r = g.root();
                    assert_eq!([w1[0] - w0[0], w1[1] - w0[1], w1[2] - w0[2]], r, "{g} on {m}");
                }
            }
        }
    }

    #[test]
    fn odd_generators_square_to_zero() {
        let real = Realization::new(p(2, 1, 0)).unwrap();
        for g in [Generator::E23, Generator::E32] {
            for m in M::all_up_to(10) {
                let v = FockVector::monomial(m);
                let twice = real.gamma(g, &real.gamma(g, &v).unwrap()).unwrap();
                assert!(twice.is_zero(), "{g}^2 on {m}");
            }
        }
    }

    #[test]
    fn fock_relations_smallest_case() {
        let r = verify_fock_relations(&p(1, 0, 0), 8, Exec::default()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn fock_relations_constant_family() {
        let params = p(2, 3, 1).with_coeffs(CoeffFamily::constant_one());
        let r = verify_fock_relations(&params, 6, Exec::default()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn mutated_e13_power_is_caught() {
        let mut real = Realization::new(p(2, 1, 0)).unwrap();
        let t = &mut real.terms_mut(Generator::E13)[0];
        t.factors[0] = cf(|c, n| c.div(c.qp(n + 1), c.f(3, n)?, n, "F3(N)"));
        let r = verify_realization(&real, 4, Exec::default());
        assert!(!r.passed());
        let failed: Vec<_> = r.failures().iter().map(|c| c.relation.clone()).collect();
        assert!(
            failed.iter().any(|f| f.contains("E13 =") || f.contains("[E12,E13]")),
            "{failed:?}"
        );
    }

    #[test]
    fn generator_names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(Generator::from_name(g.name()), Some(g));
        }
        assert_eq!(Generator::from_name("E99"), None);
    }
}
