//! Fock space of one q-boson and two fermions carrying the quantum Heisenberg
//! superalgebra Uq[h(2|1)].
//!
//! Basis states are the canonical-order monomials
//! `α23†^f23 α13†^f13 (a†)^n |0⟩`. The boson obeys `a a† − q a† a = q^(−N)`
//! with `a |n⟩ = [n]_q |n−1⟩`. Distinct fermion modes anticommute and the
//! boson commutes with both, so an α13 operator picks up the sign
//! `(−1)^f23` from moving past an occupied α23† slot.

use std::collections::BTreeMap;
use std::fmt;

use crate::qfield::{qint, QScalar};
use crate::report::{Check, Report};

/// Canonical monomial `α23†^f23 α13†^f13 (a†)^n |0⟩`.
///
/// Ordering is by boson number first, then f13, then f23.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockMonomial {
    /// Boson occupation.
    pub n: u32,
    /// Occupation of the α13 fermion (0 or 1).
    pub f13: u8,
    /// Occupation of the α23 fermion (0 or 1).
    pub f23: u8,
}

impl FockMonomial {
    /// Build a monomial; panics if a fermion occupation exceeds 1.
    pub fn new(n: u32, f13: u8, f23: u8) -> Self {
        assert!(f13 <= 1 && f23 <= 1, "fermion occupation must be 0 or 1");
        FockMonomial { n, f13, f23 }
    }

    /// The vacuum |0⟩.
    pub const VACUUM: FockMonomial = FockMonomial { n: 0, f13: 0, f23: 0 };

    /// Total fermion number, which is also the Z2 parity of the state.
    pub fn fermion_number(&self) -> u8 {
        self.f13 + self.f23
    }

    /// All monomials with n ≤ nmax, in ascending order.
    pub fn all_up_to(nmax: u32) -> Vec<FockMonomial> {
        let mut v = Vec::with_capacity(4 * (nmax as usize + 1));
        for n in 0..=nmax {
            for f13 in 0..=1 {
                for f23 in 0..=1 {
                    v.push(FockMonomial { n, f13, f23 });
                }
            }
        }
        v
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f23 == 1 {
            write!(f, "a23+ ")?;
        }
        if self.f13 == 1 {
            write!(f, "a13+ ")?;
        }
        match self.n {
            0 => {}
            1 => write!(f, "(a+) ")?,
            n => write!(f, "(a+)^{n} ")?,
        }
        write!(f, "|0>")
    }
}

/// Finite linear combination of canonical monomials. Zero coefficients are
/// never stored, so equality is coefficient-wise equality.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<FockMonomial, QScalar>,
}

impl FockVector {
    /// The zero vector.
    pub fn zero() -> Self {
        FockVector::default()
    }

    /// A single monomial with coefficient 1.
    pub fn monomial(m: FockMonomial) -> Self {
        FockVector::term(m, QScalar::one())
    }

    /// A single monomial with the given coefficient.
    pub fn term(m: FockMonomial, c: QScalar) -> Self {
        let mut v = FockVector::zero();
        v.add_term(m, &c);
        v
    }

    /// True for the zero vector.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c · m` in place.
    pub fn add_term(&mut self, m: FockMonomial, c: &QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// Add `c · other` in place.
    pub fn add_scaled(&mut self, c: &QScalar, other: &FockVector) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(*m, &(c * x));
        }
    }

    /// `c · self`.
    pub fn scaled(&self, c: &QScalar) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(c, self);
        out
    }

    /// `self − other`.
    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(&QScalar::from_int(-1), other);
        out
    }

    /// `self + other`.
    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(&QScalar::one(), other);
        out
    }

    /// Coefficient of `m` (zero if absent).
    pub fn coeff(&self, m: &FockMonomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Iterate over nonzero terms in monomial order.
    pub fn iter(&self) -> impl Iterator<Item = (&FockMonomial, &QScalar)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no terms (same as `is_zero`).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c} {m}")?;
        }
        Ok(())
    }
}

/// Generators of the Heisenberg superalgebra acting on the Fock space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderOp {
    /// a†
    BosonCreate,
    /// a
    BosonAnnihilate,
    /// α13†
    Fermion13Create,
    /// α13
    Fermion13Annihilate,
    /// α23†
    Fermion23Create,
    /// α23
    Fermion23Annihilate,
    /// N_a
    NumBoson,
    /// N_α13
    NumF13,
    /// N_α23
    NumF23,
}

/// Structural action of one ladder operator on a monomial: `None` when the
/// monomial is annihilated, otherwise the Koszul sign (true = negative) and
/// the target monomial. Scalar factors ([n]_q from `a`, the eigenvalue of a
/// number operator) are not included; see [`apply_monomial`].
pub fn act_structural(op: LadderOp, m: FockMonomial) -> Option<(bool, FockMonomial)> {
    use LadderOp::*;
    let FockMonomial { n, f13, f23 } = m;
    match op {
        BosonCreate => Some((false, FockMonomial { n: n + 1, ..m })),
        BosonAnnihilate => (n > 0).then(|| (false, FockMonomial { n: n - 1, ..m })),
        Fermion13Create => (f13 == 0).then_some((f23 == 1, FockMonomial { f13: 1, ..m })),
        Fermion13Annihilate => (f13 == 1).then_some((f23 == 1, FockMonomial { f13: 0, ..m })),
        Fermion23Create => (f23 == 0).then_some((false, FockMonomial { f23: 1, ..m })),
        Fermion23Annihilate => (f23 == 1).then_some((false, FockMonomial { f23: 0, ..m })),
        NumBoson => (n > 0).then_some((false, m)),
        NumF13 => (f13 == 1).then_some((false, m)),
        NumF23 => (f23 == 1).then_some((false, m)),
    }
}

/// Action of one ladder operator on a monomial, including its scalar factor.
pub fn apply_monomial(op: LadderOp, m: FockMonomial) -> Option<(QScalar, FockMonomial)> {
    let (negative, target) = act_structural(op, m)?;
    let c = match op {
        LadderOp::BosonAnnihilate => qint(i64::from(m.n)),
        LadderOp::NumBoson => QScalar::from_int(i64::from(m.n)),
        _ => QScalar::one(),
    };
    Some((if negative { -c } else { c }, target))
}

/// Linear extension of the single-monomial action.
pub fn apply(op: LadderOp, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (m, c) in v.iter() {
        if let Some((s, target)) = apply_monomial(op, *m) {
            out.add_term(target, &(c * &s));
        }
    }
    out
}

/// Apply a word of operators, rightmost first.
pub fn apply_word(word: &[LadderOp], v: &FockVector) -> FockVector {
    word.iter().rev().fold(v.clone(), |acc, op| apply(*op, &acc))
}

/// Multiply each monomial by `f(monomial)`.
pub fn apply_diagonal(v: &FockVector, f: impl Fn(&FockMonomial) -> QScalar) -> FockVector {
    let mut out = FockVector::zero();
    for (m, c) in v.iter() {
        out.add_term(*m, &(c * &f(m)));
    }
    out
}

/// q^(N_α) on a fermion mode via the Maclaurin identity q^(N_α) = 1 + (q − 1) N_α.
pub fn q_pow_fermion_number(op: LadderOp, v: &FockVector) -> FockVector {
    let n_alpha = apply(op, v);
    let mut out = v.clone();
    out.add_scaled(&(&QScalar::q() - &QScalar::one()), &n_alpha);
    out
}

fn first_failure(
    relation: &str,
    states: &[FockMonomial],
    lhs: impl Fn(&FockVector) -> FockVector,
    rhs: impl Fn(&FockVector) -> FockVector,
) -> Check {
    for m in states {
        let v = FockVector::monomial(*m);
        let (l, r) = (lhs(&v), rhs(&v));
        if l != r {
            return Check::fail(relation, format!("{m}: lhs = {l}, rhs = {r}"));
        }
    }
    Check::pass(relation)
}

/// Verify every Heisenberg superalgebra relation on all monomials with n ≤ nmax.
pub fn check_heisenberg(nmax: u32) -> Report {
    check_heisenberg_with_q(nmax, &QScalar::q())
}

/// Same as [`check_heisenberg`] but with the q in the boson q-commutator
/// replaced by `qfactor`. Only useful for mutation testing.
fn check_heisenberg_with_q(nmax: u32, qfactor: &QScalar) -> Report {
    use LadderOp::*;
    let states = FockMonomial::all_up_to(nmax);
    let mut r = Report::new();
    let qn = |m: &FockMonomial, shift: i64| qint(i64::from(m.n) + shift);

    r.push(first_failure(
        "a a+ - q a+ a = q^(-N)",
        &states,
        |v| {
            let mut x = apply_word(&[BosonAnnihilate, BosonCreate], v);
            x.add_scaled(&-qfactor, &apply_word(&[BosonCreate, BosonAnnihilate], v));
            x
        },
        |v| apply_diagonal(v, |m| QScalar::z_pow(-2 * i64::from(m.n))),
    ));
    r.push(first_failure(
        "a+ a = [N]_q",
        &states,
        |v| apply_word(&[BosonCreate, BosonAnnihilate], v),
        |v| apply_diagonal(v, |m| qn(m, 0)),
    ));
    r.push(first_failure(
        "a a+ = [N+1]_q",
        &states,
        |v| apply_word(&[BosonAnnihilate, BosonCreate], v),
        |v| apply_diagonal(v, |m| qn(m, 1)),
    ));
    let commutator = |x: LadderOp, y: LadderOp| {
        move |v: &FockVector| apply_word(&[x, y], v).sub(&apply_word(&[y, x], v))
    };
    let anticommutator = |x: LadderOp, y: LadderOp| {
        move |v: &FockVector| apply_word(&[x, y], v).add(&apply_word(&[y, x], v))
    };
    r.push(first_failure(
        "[N, a+] = a+",
        &states,
        commutator(NumBoson, BosonCreate),
        |v| apply(BosonCreate, v),
    ));
    r.push(first_failure(
        "[N, a] = -a",
        &states,
        commutator(NumBoson, BosonAnnihilate),
        |v| apply(BosonAnnihilate, v).scaled(&QScalar::from_int(-1)),
    ));
    for (name, c, a, num) in [
        ("13", Fermion13Create, Fermion13Annihilate, NumF13),
        ("23", Fermion23Create, Fermion23Annihilate, NumF23),
    ] {
        r.push(first_failure(
            &format!("{{a{name}, a{name}+}} = 1"),
            &states,
            anticommutator(a, c),
            |v| v.clone(),
        ));
        r.push(first_failure(
            &format!("N_a{name} = a{name}+ a{name}"),
            &states,
            |v| apply(num, v),
            |v| apply_word(&[c, a], v),
        ));
        r.push(first_failure(
            &format!("[N_a{name}, a{name}+] = a{name}+"),
            &states,
            commutator(num, c),
            |v| apply(c, v),
        ));
        r.push(first_failure(
            &format!("[N_a{name}, a{name}] = -a{name}"),
            &states,
            commutator(num, a),
            |v| apply(a, v).scaled(&QScalar::from_int(-1)),
        ));
        r.push(first_failure(
            &format!("(a{name}+)^2 = 0"),
            &states,
            |v| apply_word(&[c, c], v),
            |_| FockVector::zero(),
        ));
        r.push(first_failure(
            &format!("q^(N_a{name}) = 1 + (q - 1) N_a{name}"),
            &states,
            |v| q_pow_fermion_number(num, v),
            |v| {
                apply_diagonal(v, |m| {
                    let f = if num == NumF13 { m.f13 } else { m.f23 };
                    QScalar::z_pow(2 * i64::from(f))
                })
            },
        ));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use LadderOp::*;

    #[test]
    fn boson_annihilate_examples() {
        let v = FockVector::monomial(FockMonomial::new(2, 0, 0));
        assert_eq!(
            apply(BosonAnnihilate, &v),
            FockVector::term(FockMonomial::new(1, 0, 0), qint(2))
        );
        assert!(apply(BosonAnnihilate, &FockVector::monomial(FockMonomial::VACUUM)).is_zero());
    }

    #[test]
    fn fermion13_sign_past_occupied_23() {
        let v = FockVector::monomial(FockMonomial::new(0, 1, 1));
        assert_eq!(
            apply(Fermion13Annihilate, &v),
            FockVector::term(FockMonomial::new(0, 0, 1), QScalar::from_int(-1))
        );
    }

    #[test]
    fn distinct_fermion_modes_anticommute() {
        let vac = FockVector::monomial(FockMonomial::VACUUM);
        let a = apply_word(&[Fermion13Create, Fermion23Create], &vac);
        let b = apply_word(&[Fermion23Create, Fermion13Create], &vac);
        assert_eq!(a, b.scaled(&QScalar::from_int(-1)));
    }

    #[test]
    fn bosons_commute_with_fermions() {
        let bos = [BosonCreate, BosonAnnihilate];
        let fer = [
            Fermion13Create,
            Fermion13Annihilate,
            Fermion23Create,
            Fermion23Annihilate,
        ];
        for m in FockMonomial::all_up_to(10) {
            let v = FockVector::monomial(m);
            for b in bos {
                for f in fer {
                    assert_eq!(apply_word(&[b, f], &v), apply_word(&[f, b], &v), "{m}");
                }
            }
        }
    }

    #[test]
    fn heisenberg_relations_hold() {
        let r = check_heisenberg(0);
        assert!(r.passed(), "{r}");
        let r = check_heisenberg(20);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn mutated_q_commutator_fails_at_first_excited_state() {
        let r = check_heisenberg_with_q(5, &QScalar::one());
        let c = r.get("a a+ - q a+ a = q^(-N)").unwrap();
        assert!(!c.passed);
        assert!(c.location.as_deref().unwrap().starts_with("(a+) |0>"));
    }

    #[test]
    fn display_notation() {
        assert_eq!(FockMonomial::new(3, 1, 1).to_string(), "a23+ a13+ (a+)^3 |0>");
        assert_eq!(FockMonomial::VACUUM.to_string(), "|0>");
    }
}
