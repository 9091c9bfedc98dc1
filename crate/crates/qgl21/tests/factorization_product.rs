//! The q-exponential factorization with the fourth coefficient replaced by
//! the product q^(-N) D3(N) D3(N+1).
//!
//! With the built-in fourth coefficient the identity fails on the V4 tower
//! (reported by the acceptance suite). These tests record that the product
//! form makes it hold on every basis vector, and that the built-in form
//! really does differ from the product.

use qgl21::realization::factorization_check_with;
use qgl21::{build_rep, standard_d, CoeffFamily, CoeffFn, Exec, RealizationParams};

fn product_family() -> CoeffFamily {
    let d3: CoeffFn = standard_d(3);
    let f4: CoeffFn = format!("qpow(-N)*({d3})*({})", d3.shift(1))
        .parse()
        .expect("product expression parses");
    CoeffFamily::Custom([standard_d(1), standard_d(2), d3, f4])
}

#[test]
fn product_form_factorizes_on_every_vector() {
    let rhs = product_family();
    for t1 in 0..=4 {
        for t2 in [-3, -1, 0, 2, 5] {
            let rep = build_rep(&RealizationParams::from_twice(t1, t2, 0)).unwrap();
            let r = factorization_check_with(&rep, &rhs, Exec::default());
            assert!(r.passed(), "2J1={t1}, 2J2={t2}:\n{r}");
        }
    }
}

#[test]
fn built_in_fourth_coefficient_differs_from_the_product() {
    let rhs = product_family();
    for n in 0..6 {
        assert_ne!(
            standard_d(4).eval(n).unwrap(),
            rhs.get(4).eval(n).unwrap(),
            "N = {n}"
        );
    }
}
