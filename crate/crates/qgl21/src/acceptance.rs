//! End-to-end acceptance checks, shared by the `selftest` command and the
//! acceptance test target. Each criterion returns a [`Report`] whose checks
//! name the grid point they cover.

use crate::coeff::CoeffFamily;
use crate::exec::Exec;
use crate::fock::check_heisenberg;
use crate::matrix::SparseVec;
use crate::qfield::{HalfInt, QScalar};
use crate::realization::{factorization_check_with, verify_fock_relations, Generator, RealizationParams};
use crate::repbuilder::{build_rep_with, closed_form_rep, BasisLabel, Representation};
use crate::report::{Check, Report};
use crate::structure::{
    classify, invariant_closure, is_irreducible_with, quotient_rep, RepKind, Subspace,
};
use crate::verify::{check_all, classical_limit_check_with};

/// Twice J₁ on the main grid.
pub const GRID_J1: [i64; 3] = [1, 2, 3];
/// Twice J₂ on the main grid.
pub const GRID_J2: [i64; 7] = [-4, -2, -1, 0, 1, 2, 3];
/// Twice J₃ on the main grid.
pub const GRID_J3: [i64; 2] = [0, 1];
/// Boson cutoff for Fock-level relation checks.
pub const FOCK_CUTOFF: u32 = 6;

/// One acceptance criterion and its outcome.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// Criterion number.
    pub number: u8,
    /// Short title.
    pub title: &'static str,
    /// Detailed checks.
    pub report: Report,
}

impl Outcome {
    /// True iff every check passed.
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    /// `PASS 3 title` or `FAIL 3 title (first failure ...)`.
    pub fn summary_line(&self) -> String {
        if self.passed() {
            format!("PASS  criterion {}: {}", self.number, self.title)
        } else {
            let f = self.report.failures();
            let first = f.first().map_or(String::new(), |c| {
                format!(
                    " [{} failing; first: {}{}]",
                    f.len(),
                    c.relation,
                    c.location
                        .as_ref()
                        .map_or(String::new(), |l| format!(" at {l}"))
                )
            });
            format!("FAIL  criterion {}: {}{first}", self.number, self.title)
        }
    }
}

fn grid() -> Vec<(i64, i64, i64)> {
    let mut v = Vec::new();
    for t1 in GRID_J1 {
        for t2 in GRID_J2 {
            for t3 in GRID_J3 {
                v.push((t1, t2, t3));
            }
        }
    }
    v
}

fn label(t: (i64, i64, i64)) -> String {
    format!(
        "({}, {}, {})",
        HalfInt::from_twice(t.0),
        HalfInt::from_twice(t.1),
        HalfInt::from_twice(t.2)
    )
}

fn params(t: (i64, i64, i64), fam: &CoeffFamily) -> RealizationParams {
    RealizationParams::from_twice(t.0, t.1, t.2).with_coeffs(fam.clone())
}

fn fock_suite(fam: &CoeffFamily, exec: Exec) -> Report {
    let pts = grid();
    let per_point = exec.map(&pts, |t| {
        match verify_fock_relations(&params(*t, fam), FOCK_CUTOFF, Exec::Sequential) {
            Ok(r) => r,
            Err(e) => Report::from_iter([Check::fail("realization", e.to_string())]),
        }
    });
    let mut out = Report::new();
    for (t, r) in pts.iter().zip(per_point) {
        out.extend_prefixed(&label(*t), r);
    }
    out
}

fn oracle_suite(fam: &CoeffFamily, exec: Exec) -> Report {
    let pts = grid();
    exec.map(&pts, |t| {
        let p = params(*t, fam);
        let name = format!("{}: Γ matrices = closed forms", label(*t));
        match (build_rep_with(&p, Exec::Sequential), closed_form_rep(&p)) {
            (Ok(a), Ok(b)) => {
                for g in Generator::ALL {
                    if let Some((i, j)) = a.matrix(g).first_difference(b.matrix(g)) {
                        return Check::fail(name, format!("{g} ({i}, {j})"))
                            .with_mismatch(a.matrix(g).get(i, j), b.matrix(g).get(i, j));
                    }
                }
                Check::pass(name)
            }
            (Err(e), _) | (_, Err(e)) => Check::fail(name, e.to_string()),
        }
    })
    .into_iter()
    .collect()
}

/// Criterion 1: defining, Serre and non-Chevalley relations through Γ on
/// Fock monomials n ≤ 6 over the grid.
pub fn criterion_1(exec: Exec) -> Outcome {
    Outcome {
        number: 1,
        title: "relation suite on Fock space",
        report: fock_suite(&CoeffFamily::Standard, exec),
    }
}

/// Criterion 2: matrices via Γ equal the closed-form table over the grid.
pub fn criterion_2(exec: Exec) -> Outcome {
    Outcome {
        number: 2,
        title: "Γ matrices equal closed forms",
        report: oracle_suite(&CoeffFamily::Standard, exec),
    }
}

/// Expected (H1, H2, H3) eigenvalue of a label, written out tower by tower.
fn printed_weight(l: &BasisLabel, t1: i64, t2: i64, t3: i64) -> [i64; 3] {
    let x = l.proj.twice();
    // H2 = 2J₂ + J₁ − x/2 plus a tower shift; everything doubled then halved.
    let h2 = |shift2: i64| t2 + (t1 - x + shift2) / 2;
    match l.tower {
        1 => [x, h2(0), t3],
        2 | 3 => [x, h2(1), t3 + 1],
        _ => [x, h2(2), t3 + 2],
    }
}

/// Criterion 3: dimension 8J₁+4, tower sizes and Cartan eigenvalues.
pub fn criterion_3(exec: Exec) -> Outcome {
    let pts: Vec<(i64, i64, i64)> = (0..=6)
        .flat_map(|t1| [(t1, 1, 0), (t1, -3, 1), (t1, 0, -2)])
        .collect();
    let report = exec
        .map(&pts, |&(t1, t2, t3)| {
            let name = format!("{}: dimension and weights", label((t1, t2, t3)));
            let rep = match build_rep_with(&RealizationParams::from_twice(t1, t2, t3), Exec::Sequential) {
                Ok(r) => r,
                Err(e) => return Check::fail(name, e.to_string()),
            };
            if rep.dim() as i64 != 4 * t1 + 4 {
                return Check::fail(name, format!("dimension {}", rep.dim()));
            }
            let sizes = [1, 2, 3, 4].map(|t| rep.tower_indices(t).len() as i64);
            if sizes != [t1 + 1, t1, t1 + 2, t1 + 1] {
                return Check::fail(name, format!("tower sizes {sizes:?}"));
            }
            for (i, l) in rep.labels().iter().enumerate() {
                let want = printed_weight(l, t1, t2, t3);
                for (g, w) in [Generator::H1, Generator::H2, Generator::H3].into_iter().zip(want) {
                    let got = rep.matrix(g).get(i, i);
                    if got != QScalar::from_int(w) {
                        return Check::fail(name, format!("{g} at {l}"))
                            .with_mismatch(got, QScalar::from_int(w));
                    }
                }
            }
            for g in [Generator::H1, Generator::H2, Generator::H3] {
                if !rep.matrix(g).is_diagonal() {
                    return Check::fail(name, format!("{g} not diagonal"));
                }
            }
            Check::pass(name)
        })
        .into_iter()
        .collect();
    Outcome {
        number: 3,
        title: "dimension and weight structure",
        report,
    }
}

fn classification_point(t1: i64, t2: i64) -> Report {
    let t = (t1, t2, 0);
    let name = label(t);
    let rep = match build_rep_with(&RealizationParams::from_twice(t1, t2, 0), Exec::Sequential) {
        Ok(r) => r,
        Err(e) => return Report::from_iter([Check::fail(name, e.to_string())]),
    };
    let class = classify(HalfInt::from_twice(t1), HalfInt::from_twice(t2));
    let mut r = Report::new();
    match class.kind {
        RepKind::Typical => {
            let ok = is_irreducible_with(&rep, Exec::Sequential);
            r.push(if ok {
                Check::pass(format!("{name}: typical and irreducible"))
            } else {
                Check::fail(format!("{name}: typical and irreducible"), "closure of a basis vector")
            });
        }
        RepKind::Nontypical1 | RepKind::Nontypical2 => {
            let closure = invariant_closure(&rep, &[SparseVec::from([(0, QScalar::one())])]);
            let predicted = Subspace::of_towers(&rep, &class.predicted_invariant);
            let cname = format!("{name}: {} closure = {}", class.kind, class.invariant_text());
            r.push(if closure == predicted {
                Check::pass(cname)
            } else {
                Check::fail(cname, format!("closure has dimension {}", closure.dim()))
            });
            match quotient_rep(&rep, &predicted) {
                Ok(q) => {
                    match check_all(&q, Exec::Sequential) {
                        Ok(rel) => r.extend_prefixed(&format!("{name}: quotient"), rel),
                        Err(e) => r.push(Check::fail(format!("{name}: quotient relations"), e.to_string())),
                    }
                    let iname = format!("{name}: quotient irreducible");
                    r.push(if is_irreducible_with(&q, Exec::Sequential) {
                        Check::pass(iname)
                    } else {
                        Check::fail(iname, "closure of a basis vector")
                    });
                }
                Err(e) => r.push(Check::fail(format!("{name}: quotient"), e.to_string())),
            }
        }
        RepKind::Excluded => r.push(Check::fail(format!("{name}: excluded"), "unexpected")),
    }
    r
}

/// Criterion 4: classification agrees with brute-force invariant closures,
/// and nontypical quotients satisfy the relations and are irreducible.
pub fn criterion_4(exec: Exec) -> Outcome {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for t1 in GRID_J1 {
        for t2 in GRID_J2.into_iter().chain([-t1 - 1]) {
            if !pts.contains(&(t1, t2)) {
                pts.push((t1, t2));
            }
        }
    }
    let mut report = Report::new();
    for r in exec.map(&pts, |&(t1, t2)| classification_point(t1, t2)) {
        report.extend_prefixed("", r);
    }
    Outcome {
        number: 4,
        title: "classification matches invariant subspaces",
        report,
    }
}

/// Criterion 5: the factorization of the q-exponential with the standard
/// functions, on every basis vector for J₁ ∈ {1/2, 1}.
pub fn criterion_5(exec: Exec) -> Outcome {
    let mut report = Report::new();
    for t1 in [1, 2] {
        for t2 in GRID_J2 {
            let t = (t1, t2, 0);
            match build_rep_with(&params(t, &CoeffFamily::Standard), exec) {
                Ok(rep) => report.extend_prefixed(
                    &label(t),
                    factorization_check_with(&rep, &CoeffFamily::Standard, exec),
                ),
                Err(e) => report.push(Check::fail(label(t), e.to_string())),
            }
        }
    }
    Outcome {
        number: 5,
        title: "factorization of the q-exponential",
        report,
    }
}

/// Criterion 6: criteria 1 and 2 with F_i ≡ 1 and with F_i = q^N.
pub fn criterion_6(exec: Exec) -> Outcome {
    let mut report = Report::new();
    for (tag, fam) in [("F=1", CoeffFamily::constant_one()), ("F=q^N", CoeffFamily::q_pow_n())] {
        report.extend_prefixed(tag, fock_suite(&fam, exec));
        report.extend_prefixed(tag, oracle_suite(&fam, exec));
    }
    Outcome {
        number: 6,
        title: "generalized coefficient families",
        report,
    }
}

/// Criterion 7: every grid representation is regular at z = 1 and obeys
/// the gl(2|1) super-commutator table there.
pub fn criterion_7(exec: Exec) -> Outcome {
    let pts = grid();
    let reps: Vec<Result<Representation, String>> = exec.map(&pts, |t| {
        build_rep_with(&params(*t, &CoeffFamily::Standard), Exec::Sequential).map_err(|e| e.to_string())
    });
    let mut report = Report::new();
    for (t, rep) in pts.iter().zip(reps) {
        match rep.map(|r| classical_limit_check_with(&r, exec)) {
            Ok(Ok(r)) => report.extend_prefixed(&label(*t), r),
            Ok(Err(e)) => report.push(Check::fail(label(*t), e.to_string())),
            Err(e) => report.push(Check::fail(label(*t), e)),
        }
    }
    Outcome {
        number: 7,
        title: "classical limit",
        report,
    }
}

/// Criterion 8: the Heisenberg superalgebra relations on monomials n ≤ 20.
pub fn criterion_8(_exec: Exec) -> Outcome {
    Outcome {
        number: 8,
        title: "Heisenberg superalgebra relations",
        report: check_heisenberg(20),
    }
}

/// Criteria 1 to 8 in order.
pub fn run_library_criteria(exec: Exec) -> Vec<Outcome> {
    vec![
        criterion_1(exec),
        criterion_2(exec),
        criterion_3(exec),
        criterion_4(exec),
        criterion_5(exec),
        criterion_6(exec),
        criterion_7(exec),
        criterion_8(exec),
    ]
}
