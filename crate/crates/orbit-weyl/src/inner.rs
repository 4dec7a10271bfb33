//! The Hermitian pairing (f|g) = constant term of D_conj(g)(f), restricted
//! to the rational span where it is an exact symmetric bilinear form.
//!
//! Functions on the orbit enter as formal ℚ-combinations of monomials in
//! the basis functions f_b (an `Expr`), so conjugation is the signed basis
//! permutation b ↦ −σ(b) extended multiplicatively, and the lift f ↦ D_f
//! sends a monomial to the composition of the matching family operators
//! (order immaterial once commutativity is verified).

use crate::chart::{random_orbit_point, Chart};
use crate::diffop::DiffOp;
use crate::exotic::ExoticFamily;
use crate::lie::{AlgKey, AlgebraSpec, LieElement};
use crate::linalg::{psd_certify, rank, PsdReport};
use crate::poly::{zero_expo, Poly};
use crate::rat::Rat;
use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("pairing left a non-constant Euler-degree-0 residue: {0}")]
    NonConstantResidue(String),
}

/// Formal ℚ-linear combination of monomials in the basis functions; a
/// monomial is a sorted multiset of basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub alg: AlgKey,
    pub terms: BTreeMap<Vec<usize>, Rat>,
}

impl Expr {
    pub fn zero(alg: AlgKey) -> Self {
        Expr {
            alg,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alg: AlgKey) -> Self {
        let mut e = Expr::zero(alg);
        e.add_term(Vec::new(), num::One::one());
        e
    }

    pub fn basis_fn(alg: AlgKey, idx: usize) -> Self {
        let mut e = Expr::zero(alg);
        e.add_term(vec![idx], num::One::one());
        e
    }

    pub fn monomial(alg: AlgKey, mut indices: Vec<usize>, coef: Rat) -> Self {
        indices.sort_unstable();
        let mut e = Expr::zero(alg);
        e.add_term(indices, coef);
        e
    }

    /// The degree-1 expression matching a Lie element under x ↦ f_x.
    pub fn from_element(y: &LieElement) -> Self {
        let mut e = Expr::zero(y.alg);
        for (i, c) in y.coords.iter().enumerate() {
            if !c.is_zero() {
                e.add_term(vec![i], c.clone());
            }
        }
        e
    }

    pub fn add_term(&mut self, indices: Vec<usize>, coef: Rat) {
        debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]));
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(indices) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + coef;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        assert_eq!(self.alg, other.alg);
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Expr {
        let mut out = Expr::zero(self.alg);
        for (mono, k) in &self.terms {
            out.add_term(mono.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        assert_eq!(self.alg, other.alg);
        let mut out = Expr::zero(self.alg);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                m.sort_unstable();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Expr {
        let mut acc = Expr::one(self.alg);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Homogeneous degree, if every monomial has the same length.
    pub fn degree(&self) -> Option<usize> {
        let mut d = None;
        for mono in self.terms.keys() {
            match d {
                None => d = Some(mono.len()),
                Some(p) if p != mono.len() => return None,
                _ => {}
            }
        }
        d.or(Some(0))
    }
}

/// Complex conjugation on expressions: b ↦ −σ(b) on each factor.
pub fn conjugate_expr(spec: &AlgebraSpec, e: &Expr) -> Expr {
    assert_eq!(e.alg, spec.key());
    let mut out = Expr::zero(e.alg);
    for (mono, c) in &e.terms {
        let mut sign = c.clone();
        let mut mapped: Vec<usize> = Vec::with_capacity(mono.len());
        for &b in mono {
            let (j, s) = spec.sigma_basis(b);
            mapped.push(j);
            sign = -sign * crate::rat::rat_int(s.into());
        }
        mapped.sort_unstable();
        out.add_term(mapped, sign);
    }
    out
}

/// Chart expansion: substitute the localized chart expression of each basis
/// function and multiply out.
pub fn chart_expand(chart: &Chart, e: &Expr) -> Poly {
    let mut acc = chart.vars.zero();
    for (mono, c) in &e.terms {
        let mut t = Poly::constant(chart.vars.nvars(), c.clone());
        for &b in mono {
            t = t.mul(&chart.orbit_function(&chart.spec.basis_elem(b)));
        }
        acc = acc.add(&t);
    }
    acc
}

/// The algebra lift f ↦ D_f as an operator (monomials become compositions).
pub fn lift_to_operator(family: &ExoticFamily, e: &Expr) -> DiffOp {
    assert_eq!(e.alg, family.alg);
    let nv = family.ops[0].nvars();
    let mut acc = DiffOp::zero(nv);
    for (mono, c) in &e.terms {
        let mut term = DiffOp::identity(nv);
        for &b in mono {
            term = family.ops[b].compose(&term);
        }
        acc = acc.add(&term.scale(c));
    }
    acc
}

/// Apply D_e to a chart function without forming the composed operator.
pub fn lift_apply(family: &ExoticFamily, e: &Expr, target: &Poly) -> Poly {
    assert_eq!(e.alg, family.alg);
    let mut acc = Poly::zero(target.nvars());
    for (mono, c) in &e.terms {
        let mut t = target.clone();
        for &b in mono {
            t = family.ops[b].apply(&t);
            if t.is_zero() {
                break;
            }
        }
        acc = acc.add(&t.scale(c));
    }
    acc
}

/// Constant term with the degree-0 sanity check: anything of Euler degree 0
/// other than a true constant signals an engine bug.
pub fn constant_term(chart: &Chart, p: &Poly) -> Result<Rat, PairingError> {
    let weights = chart.vars.euler_weights();
    let zero_mono = zero_expo(chart.vars.nvars());
    for (mono, _) in p.terms() {
        if Poly::weighted_degree_of(mono, &weights) == 0 && *mono != zero_mono {
            return Err(PairingError::NonConstantResidue(
                p.to_text(&chart.vars.names()),
            ));
        }
    }
    Ok(p.coeff(&zero_mono))
}

/// (f|g) = constant term of D_conj(g)(f), evaluated in the chart.
pub fn pairing(
    chart: &Chart,
    family: &ExoticFamily,
    f: &Expr,
    g: &Expr,
) -> Result<Rat, PairingError> {
    let expanded = chart_expand(chart, f);
    let conj_g = conjugate_expr(&chart.spec, g);
    let image = lift_apply(family, &conj_g, &expanded);
    constant_term(chart, &image)
}

#[derive(Clone, Debug)]
pub struct GramResult {
    pub degree: usize,
    /// Monomials spanning the degree-p functions, as sorted index multisets.
    pub monomials: Vec<Vec<usize>>,
    pub matrix: Vec<Vec<Rat>>,
    pub psd: PsdReport,
    /// Rank of the evaluation matrix of the same monomials at random
    /// rational orbit points (the independent rank oracle).
    pub eval_rank: usize,
}

fn multisets(dim: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, p, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, p, 0, &mut Vec::with_capacity(p), &mut out);
    out
}

/// Gram matrix of the pairing over all degree-p monomials in the basis
/// functions, with the exact PSD certificate and the evaluation rank oracle.
pub fn gram_matrix(
    chart: &Chart,
    family: &ExoticFamily,
    p: usize,
    seed: u64,
) -> Result<GramResult, PairingError> {
    assert!(p >= 1);
    let spec = &chart.spec;
    let monomials = multisets(spec.dim, p);
    let n = monomials.len();

    let exprs: Vec<Expr> = monomials
        .iter()
        .map(|mono| Expr::monomial(spec.key(), mono.clone(), num::One::one()))
        .collect();
    let expanded: Vec<Poly> = exprs.par_iter().map(|e| chart_expand(chart, e)).collect();
    let conjugated: Vec<Expr> = exprs.iter().map(|e| conjugate_expr(spec, e)).collect();

    // upper triangle in parallel, mirrored afterwards (symmetry itself is
    // property-tested separately)
    let entries: Vec<Result<((usize, usize), Rat), PairingError>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let image = lift_apply(family, &conjugated[j], &expanded[i]);
            constant_term(chart, &image).map(|v| ((i, j), v))
        })
        .collect();

    let mut matrix = vec![vec![Rat::zero(); n]; n];
    for e in entries {
        let ((i, j), v) = e?;
        matrix[i][j] = v.clone();
        matrix[j][i] = v;
    }

    let psd = psd_certify(&matrix);

    // evaluation-rank oracle at random orbit points
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let npoints = n + 8;
    let points: Vec<LieElement> = (0..npoints)
        .map(|_| random_orbit_point(spec, &mut rng))
        .collect();
    let eval_rows: Vec<Vec<Rat>> = points
        .par_iter()
        .map(|z| {
            let vals: Vec<Rat> = (0..spec.dim)
                .map(|b| spec.killing(&spec.basis_elem(b), z).unwrap())
                .collect();
            monomials
                .iter()
                .map(|mono| {
                    let mut acc: Rat = num::One::one();
                    for &b in mono {
                        acc *= &vals[b];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let eval_rank = rank(eval_rows);

    Ok(GramResult {
        degree: p,
        monomials,
        matrix,
        psd,
        eval_rank,
    })
}

/// CSV rendering, row/column order = monomial order.
pub fn gram_csv(g: &GramResult) -> String {
    let mut out = String::new();
    for row in &g.matrix {
        let cells: Vec<String> = row.iter().map(crate::rat::fmt_rat).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exotic::{eigenvalue_closed_form, generate_family, Engine};
    use crate::lie::{build_algebra, Family};
    use crate::rat::{rat, rat_int};
    use rand::Rng;

    fn setup(family: Family, n: usize) -> (Engine, ExoticFamily) {
        let eng =
            Engine::build(crate::chart::Chart::new(build_algebra(family, n).unwrap()).unwrap())
                .unwrap();
        let fam = generate_family(&eng.chart, &eng.d0).unwrap();
        (eng, fam)
    }

    #[test]
    fn conjugation_examples() {
        let spec = build_algebra(Family::Sl, 3).unwrap();
        let key = spec.key();
        let f_psi = Expr::from_element(&spec.x_psi);
        let f_0 = Expr::from_element(&spec.x0);
        assert_eq!(conjugate_expr(&spec, &f_psi), f_0);
        assert_eq!(conjugate_expr(&spec, &f_0), f_psi);
        let sq = f_psi.mul(&f_psi);
        assert_eq!(conjugate_expr(&spec, &sq), f_0.mul(&f_0));
        let e = Expr::monomial(key, vec![0, 3, 3], rat(2, 3));
        assert_eq!(conjugate_expr(&spec, &conjugate_expr(&spec, &e)), e);
    }

    #[test]
    fn lift_examples() {
        let (eng, fam) = setup(Family::Sl, 3);
        let key = eng.chart.spec.key();
        let nv = eng.chart.vars.nvars();
        assert_eq!(
            lift_to_operator(&fam, &Expr::one(key)),
            DiffOp::identity(nv)
        );
        let f_x0 = Expr::from_element(&eng.chart.spec.x0);
        assert_eq!(lift_to_operator(&fam, &f_x0), eng.d0);
        let sq = f_x0.mul(&f_x0);
        assert_eq!(lift_to_operator(&fam, &sq), eng.d0.compose(&eng.d0));
    }

    #[test]
    fn pairing_examples_sl3() {
        let (eng, fam) = setup(Family::Sl, 3);
        let chart = &eng.chart;
        let key = chart.spec.key();
        let one = Expr::one(key);
        assert_eq!(pairing(chart, &fam, &one, &one).unwrap(), rat_int(1));
        // (f_psi | f_psi) = γ(1) = 3/2
        let f_psi = Expr::from_element(&chart.spec.x_psi);
        assert_eq!(pairing(chart, &fam, &f_psi, &f_psi).unwrap(), rat(3, 2));
        // weight orthogonality: (f_psi | f_0) = 0
        let f_0 = Expr::from_element(&chart.spec.x0);
        assert_eq!(pairing(chart, &fam, &f_psi, &f_0).unwrap(), rat_int(0));
        // degree orthogonality
        assert_eq!(pairing(chart, &fam, &f_psi, &one).unwrap(), rat_int(0));
    }

    #[test]
    fn psi_power_norms() {
        // (f_psi^p | f_psi^p) = γ(1)…γ(p)
        let (eng, fam) = setup(Family::Sl, 3);
        let chart = &eng.chart;
        let f_psi = Expr::from_element(&chart.spec.x_psi);
        let mut expect = rat_int(1);
        for p in 1..=4u32 {
            expect *= eigenvalue_closed_form(Family::Sl, 1, p);
            let fp = f_psi.pow(p);
            assert_eq!(pairing(chart, &fam, &fp, &fp).unwrap(), expect);
        }
    }

    #[test]
    fn pairing_symmetry_random() {
        let (eng, fam) = setup(Family::Sl, 3);
        let chart = &eng.chart;
        let key = chart.spec.key();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mono1: Vec<usize> = (0..2).map(|_| rng.random_range(0..8)).collect();
            let mono2: Vec<usize> = (0..2).map(|_| rng.random_range(0..8)).collect();
            let f = Expr::monomial(key, mono1, rat_int(rng.random_range(1..4)));
            let g = Expr::monomial(key, mono2, rat_int(rng.random_range(1..4)));
            let fg = pairing(chart, &fam, &f, &g).unwrap();
            let gf = pairing(chart, &fam, &g, &f).unwrap();
            assert_eq!(fg, gf);
        }
    }

    #[test]
    fn adjointness_random() {
        // (D_v h | g) = (h | conj(f_v) · g) for basis elements v
        let (eng, fam) = setup(Family::Sl, 3);
        let chart = &eng.chart;
        let spec = &chart.spec;
        let key = spec.key();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        for _ in 0..12 {
            let v = rng.random_range(0..spec.dim);
            let h = Expr::monomial(
                key,
                vec![rng.random_range(0..8), rng.random_range(0..8)],
                rat_int(1),
            );
            let g = Expr::monomial(key, vec![rng.random_range(0..8)], rat_int(1));
            let f_v_bar = conjugate_expr(spec, &Expr::basis_fn(key, v));
            let lhs = pairing(chart, &fam, &h, &f_v_bar.mul(&g)).unwrap();
            let image = fam.ops[v].apply(&chart_expand(chart, &h));
            let conj_g = conjugate_expr(spec, &g);
            let rhs = constant_term(chart, &lift_apply(&fam, &conj_g, &image)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gram_sl3() {
        let (eng, fam) = setup(Family::Sl, 3);
        let g1 = gram_matrix(&eng.chart, &fam, 1, 0xC0FFEE).unwrap();
        assert_eq!(g1.monomials.len(), 8);
        assert!(g1.psd.psd);
        assert_eq!(g1.psd.rank, 8);
        assert_eq!(g1.eval_rank, 8);

        let g2 = gram_matrix(&eng.chart, &fam, 2, 0xC0FFEE).unwrap();
        assert_eq!(g2.monomials.len(), 36);
        assert!(g2.psd.psd);
        assert_eq!(g2.psd.rank, 27);
        assert_eq!(g2.eval_rank, 27);
    }
}
