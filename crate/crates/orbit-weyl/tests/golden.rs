//! Golden-file checks for the deterministic text serializations.

use orbit_weyl::lie::Family;
use orbit_weyl::report::{dump, SuiteConfig};

#[test]
fn f_psi_sl3() {
    let cfg = SuiteConfig::new(Family::Sl, 3);
    assert_eq!(
        dump(&cfg, "f_psi").unwrap(),
        "(1/4)*f0^-3*f1^2*fp1^2 - (1/4)*f0^-1*fp0^2\n"
    );
}

#[test]
fn a_operator_sl3() {
    // the symmetrized quadratic expands to exactly four normal-form terms
    let cfg = SuiteConfig::new(Family::Sl, 3);
    assert_eq!(
        dump(&cfg, "A").unwrap(),
        "-f0^2*D[f1]*D[fp1] + f0*fp1*D[fp0]*D[fp1] - f0*f1*D[fp0]*D[f1] + f1*fp1*D[fp0]^2\n"
    );
}

#[test]
fn f_psi_so6() {
    // (a^2 + 4bc - (f0 fp0)^2) / (4 f0^3) with a = f1 fp1 - f2 fp2,
    // b = fp1 f2, c = f1 fp2 in the unified pair variables
    let cfg = SuiteConfig::new(Family::So, 6);
    let text = dump(&cfg, "f_psi").unwrap();
    assert_eq!(
        text,
        "(1/4)*f0^-3*f1^2*fp1^2 + (1/2)*f0^-3*f1*fp1*f2*fp2 + (1/4)*f0^-3*f2^2*fp2^2 - (1/4)*f0^-1*fp0^2\n"
    );
}

#[test]
fn gram_degree_1_so6_csv() {
    let cfg = SuiteConfig::new(Family::So, 6);
    let csv = dump(&cfg, "gram:1").unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 15);
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 15);
        for (j, cell) in cells.iter().enumerate() {
            // gamma(1) = 3 on the diagonal of the basis-function Gram
            assert_eq!(*cell, if i == j { "3" } else { "0" });
        }
    }
}

#[test]
fn dumps_are_stable_across_runs() {
    let cfg = SuiteConfig::new(Family::Sl, 3);
    for object in ["f_psi", "A", "S", "D0"] {
        assert_eq!(dump(&cfg, object).unwrap(), dump(&cfg, object).unwrap());
    }
}

#[test]
fn b_and_c_only_for_so() {
    let cfg = SuiteConfig::new(Family::Sl, 3);
    assert!(dump(&cfg, "B").is_err());
    assert!(dump(&cfg, "C").is_err());
    let cfg = SuiteConfig::new(Family::So, 6);
    assert!(dump(&cfg, "B").is_ok());
    assert!(dump(&cfg, "C").is_ok());
}
