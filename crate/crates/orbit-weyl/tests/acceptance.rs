//! Acceptance suite: every criterion is an exact identity (tolerance 0).
//! One pass/fail line per criterion is printed; run with `--nocapture` to
//! see the lines for passing criteria too.

use num::{Signed, Zero};
use orbit_weyl::chart::Chart;
use orbit_weyl::exotic::{
    all_pairs, divisibility_defect, eigenvalue_closed_form, eigenvalue_sequence, gamma_polynomial,
    generate_family, noncommuting_pairs, r0_symbol, CorrectionPoly, Engine, ExoticFamily,
};
use orbit_weyl::inner::{gram_matrix, pairing, Expr};
use orbit_weyl::lie::{build_algebra, Family};
use orbit_weyl::rat::{rat_int, Rat};
use orbit_weyl::report::{run, Suite, SuiteConfig};
use std::sync::OnceLock;

fn criterion(n: u32, desc: &str, f: impl FnOnce() -> Result<(), String>) {
    match f() {
        Ok(()) => println!("criterion {n}: PASS - {desc}"),
        Err(w) => {
            println!("criterion {n}: FAIL - {desc}: {w}");
            panic!("criterion {n} failed: {w}");
        }
    }
}

fn engine(family: Family, n: usize) -> Engine {
    Engine::build(Chart::new(build_algebra(family, n).unwrap()).unwrap()).unwrap()
}

fn sl3_family() -> &'static (Engine, ExoticFamily) {
    static CELL: OnceLock<(Engine, ExoticFamily)> = OnceLock::new();
    CELL.get_or_init(|| {
        let eng = engine(Family::Sl, 3);
        let fam = generate_family(&eng.chart, &eng.d0).unwrap();
        (eng, fam)
    })
}

fn so6_family() -> &'static (Engine, ExoticFamily) {
    static CELL: OnceLock<(Engine, ExoticFamily)> = OnceLock::new();
    CELL.get_or_init(|| {
        let eng = engine(Family::So, 6);
        let fam = generate_family(&eng.chart, &eng.d0).unwrap();
        (eng, fam)
    })
}

#[test]
fn criterion_01_eigenvalue_law_sl() {
    criterion(
        1,
        "sl(3..5): D0(f_psi^k) = k^2 (k+(m-1)/2)(k+m/2) f_psi^{k-1} for k = 0..8",
        || {
            for n in [3usize, 4, 5] {
                let eng = engine(Family::Sl, n);
                let seq = eigenvalue_sequence(&eng.chart, &eng.d0, 8).map_err(|e| e.to_string())?;
                for (k, got) in seq.iter().enumerate() {
                    let want = eigenvalue_closed_form(Family::Sl, n - 2, k as u32);
                    if *got != want {
                        return Err(format!("sl({n}), k = {k}: {got} != {want}"));
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_02_eigenvalue_law_so() {
    criterion(
        2,
        "so(6..8): D0(f_psi^k) = k(k+1)(k+m/2-1)(k+m/2-1/2) f_psi^{k-1} for k = 0..6",
        || {
            let spot: [(usize, i64); 3] = [(6, 3), (7, 6), (8, 10)];
            for (n, beta1) in spot {
                let eng = engine(Family::So, n);
                let m = n - 4;
                let seq = eigenvalue_sequence(&eng.chart, &eng.d0, 6).map_err(|e| e.to_string())?;
                if seq[1] != rat_int(beta1) {
                    return Err(format!("so({n}): beta_1 = {}, expected {beta1}", seq[1]));
                }
                for (k, got) in seq.iter().enumerate() {
                    let want = eigenvalue_closed_form(Family::So, m, k as u32);
                    if *got != want {
                        return Err(format!("so({n}), k = {k}: {got} != {want}"));
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_03_correction_polynomial() {
    criterion(
        3,
        "solve_q recovers (E+m/2)^2 for sl and (E+m/2+1)(E+m/2-1) for so, uniquely",
        || {
            for (family, n) in [
                (Family::Sl, 3),
                (Family::Sl, 4),
                (Family::Sl, 5),
                (Family::So, 6),
                (Family::So, 7),
                (Family::So, 8),
            ] {
                let eng = engine(family, n);
                let m = eng.chart.spec.m;
                let want = CorrectionPoly::closed_form(family, m);
                if eng.q != want {
                    return Err(format!(
                        "{family}({n}): q = {}, expected {}",
                        eng.q.to_text(),
                        want.to_text()
                    ));
                }
                // uniqueness witness: q + 1 leaves a nonzero divisibility defect at k = 2
                let defect = divisibility_defect(&eng.chart, &eng.main, &eng.q.shifted(&rat_int(1)), 2);
                if defect.is_zero() {
                    return Err(format!("{family}({n}): perturbed q still divides"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_04_symbol_identity() {
    criterion(
        4,
        "principal symbol of D0 equals f0^-1 (P(Theta...) - 1/4 lambda^2 (Phi^x0)^2) exactly",
        || {
            for (family, n) in [
                (Family::Sl, 3),
                (Family::Sl, 4),
                (Family::Sl, 5),
                (Family::So, 6),
                (Family::So, 7),
                (Family::So, 8),
            ] {
                let eng = engine(family, n);
                let sym = eng.chart.symbol_vars();
                if eng.d0.order() != Some(4) {
                    return Err(format!("{family}({n}): order {:?}", eng.d0.order()));
                }
                let got = eng.d0.principal_symbol(&sym).map_err(|e| e.to_string())?;
                if got != r0_symbol(&eng.chart) {
                    return Err(format!("{family}({n}): symbol differs"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_05_lowest_weight_sweep() {
    criterion(
        5,
        "[eta^z, D0] = 0 on all of g_neg; [eta^h, D0] = -2 D0; [E, D0] = -D0; [eta^h, S] = -4 S",
        || {
            for (family, n) in [
                (Family::Sl, 3),
                (Family::Sl, 4),
                (Family::Sl, 5),
                (Family::So, 6),
                (Family::So, 7),
                (Family::So, 8),
            ] {
                let eng = engine(family, n);
                let chart = &eng.chart;
                let spec = &chart.spec;
                let g_neg = spec.g_neg_indices();
                if g_neg.len() != 2 * spec.m + 1 {
                    return Err(format!("{family}({n}): g_neg has {} elements", g_neg.len()));
                }
                for zi in g_neg {
                    let eta = chart.eta_field(&spec.basis_elem(zi));
                    if !eta.commutator(&eng.d0).is_zero() {
                        return Err(format!("{family}({n}): [eta^{}, D0] != 0", spec.names[zi]));
                    }
                }
                if !eng.d0.has_weight(&chart.eta_h, &rat_int(-2)) {
                    return Err(format!("{family}({n}): [eta^h, D0] != -2 D0"));
                }
                if !eng.d0.has_weight(&chart.euler, &rat_int(-1)) {
                    return Err(format!("{family}({n}): [E, D0] != -D0"));
                }
                if !eng.s_op.has_weight(&chart.eta_h, &rat_int(-4)) {
                    return Err(format!("{family}({n}): [eta^h, S] != -4 S"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_06_family_and_commutativity() {
    criterion(
        6,
        "family spans dim g with path independence; all 28 sl(3) and 105 so(6) pairs commute",
        || {
            let (eng3, fam3) = sl3_family();
            if fam3.ops.len() != 8 {
                return Err(format!("sl(3) span {}", fam3.ops.len()));
            }
            let pairs3 = all_pairs(8);
            if pairs3.len() != 28 {
                return Err("sl(3) pair count".to_string());
            }
            let bad = noncommuting_pairs(fam3, &pairs3);
            if !bad.is_empty() {
                return Err(format!("sl(3): {} noncommuting pairs", bad.len()));
            }
            if fam3.op_for(&eng3.chart.spec.x0) != eng3.d0 {
                return Err("sl(3): D_[x0] != D0".to_string());
            }

            let (_eng6, fam6) = so6_family();
            if fam6.ops.len() != 15 {
                return Err(format!("so(6) span {}", fam6.ops.len()));
            }
            let pairs6 = all_pairs(15);
            if pairs6.len() != 105 {
                return Err("so(6) pair count".to_string());
            }
            let bad = noncommuting_pairs(fam6, &pairs6);
            if !bad.is_empty() {
                return Err(format!("so(6): {} noncommuting pairs", bad.len()));
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_07_model_suite() {
    criterion(
        7,
        "Jacobi/Killing sweeps, Heisenberg relations, P closed forms, tangent dimension",
        || {
            for (family, n) in [
                (Family::Sl, 3),
                (Family::Sl, 4),
                (Family::Sl, 5),
                (Family::So, 6),
                (Family::So, 7),
                (Family::So, 8),
            ] {
                let mut cfg = SuiteConfig::new(family, n);
                cfg.suites = vec![Suite::Model, Suite::Heisenberg];
                let report = run(&cfg, false).map_err(|e| e.to_string())?;
                if !report.passed() {
                    return Err(format!("{family}({n}):\n{}", report.to_text()));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_chart_suite() {
    criterion(
        8,
        "eta is a Lie homomorphism; equivariance on all pairs; f_psi matches the quartic form",
        || {
            for (family, n) in [
                (Family::Sl, 3),
                (Family::Sl, 4),
                (Family::Sl, 5),
                (Family::So, 6),
                (Family::So, 7),
                (Family::So, 8),
            ] {
                let mut cfg = SuiteConfig::new(family, n);
                cfg.suites = vec![Suite::Chart];
                let report = run(&cfg, false).map_err(|e| e.to_string())?;
                if !report.passed() {
                    return Err(format!("{family}({n}):\n{}", report.to_text()));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_09_inner_product() {
    criterion(
        9,
        "(1|1)=1; psi-power norms; Gram p=1,2 symmetric PSD with oracle ranks (8/27 for sl(3)); adjointness",
        || {
            // the full randomized battery via the gram suite
            for (family, n) in [(Family::Sl, 3), (Family::So, 6)] {
                let mut cfg = SuiteConfig::new(family, n);
                cfg.suites = vec![Suite::Gram];
                let report = run(&cfg, false).map_err(|e| e.to_string())?;
                if !report.passed() {
                    return Err(format!("{family}({n}):\n{}", report.to_text()));
                }
            }
            // pinned ranks and explicit symmetry for sl(3)
            let (eng, fam) = sl3_family();
            let one = Expr::one(eng.chart.spec.key());
            let v = pairing(&eng.chart, fam, &one, &one).map_err(|e| e.to_string())?;
            if v != rat_int(1) {
                return Err(format!("(1|1) = {v}"));
            }
            let f_psi = Expr::from_element(&eng.chart.spec.x_psi);
            let mut expect: Rat = rat_int(1);
            for p in 1..=4u32 {
                expect *= eigenvalue_closed_form(Family::Sl, 1, p);
                let fp = f_psi.pow(p);
                let got = pairing(&eng.chart, fam, &fp, &fp).map_err(|e| e.to_string())?;
                if got != expect || !got.is_positive() {
                    return Err(format!("(psi^{p}|psi^{p}) = {got}, expected {expect}"));
                }
            }
            for (p, want_rank, want_size) in [(1usize, 8usize, 8usize), (2, 27, 36)] {
                let g = gram_matrix(&eng.chart, fam, p, 0xC0FFEE).map_err(|e| e.to_string())?;
                if g.monomials.len() != want_size {
                    return Err(format!("sl(3) p={p}: {} monomials", g.monomials.len()));
                }
                if !g.psd.psd || g.psd.rank != want_rank || g.eval_rank != want_rank {
                    return Err(format!(
                        "sl(3) p={p}: psd {}, rank {}, eval {}",
                        g.psd.psd, g.psd.rank, g.eval_rank
                    ));
                }
                for i in 0..g.matrix.len() {
                    for j in 0..i {
                        if g.matrix[i][j] != g.matrix[j][i] {
                            return Err(format!("sl(3) p={p}: asymmetric at ({i},{j})"));
                        }
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_10_cross_model_oracle() {
    criterion(
        10,
        "so(6) and sl(4) eigenvalue sequences agree term-by-term for k = 0..6",
        || {
            let eng_so = engine(Family::So, 6);
            let eng_sl = engine(Family::Sl, 4);
            let seq_so =
                eigenvalue_sequence(&eng_so.chart, &eng_so.d0, 6).map_err(|e| e.to_string())?;
            let seq_sl =
                eigenvalue_sequence(&eng_sl.chart, &eng_sl.d0, 6).map_err(|e| e.to_string())?;
            if seq_so != seq_sl {
                return Err(format!("{seq_so:?} vs {seq_sl:?}"));
            }
            // both interpolate to the same quartic with leading coefficient 1
            let c_so = gamma_polynomial(&seq_so).ok_or("so(6) interpolation fails")?;
            let c_sl = gamma_polynomial(&seq_sl).ok_or("sl(4) interpolation fails")?;
            if c_so != c_sl || c_so[4] != rat_int(1) {
                return Err("interpolants differ".to_string());
            }
            Ok(())
        },
    );
}
