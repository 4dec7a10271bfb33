//! The étale chart on the open locus f0 ≠ 0 of the minimal orbit.
//!
//! Chart variables are the coordinate functions f0, fp0, f1, fp1, …, fm, fpm
//! of the elements x0, h, x_1, x'_1, …; every other orbit function f_y is
//! expressed in them as an element of the localized ring. The expressions
//! are derived once per family from an explicit parametrization of the
//! orbit and validated at build time against the coordinate functions
//! themselves; the verification suites additionally sweep the equivariance
//! law η^x(f_y) = f_[x,y] and cross-check random rational orbit points.
//!
//! sl(N): points are rank-one square-zero matrices z = u vᵀ with v·u = 0.
//! On f0 ≠ 0 we may gauge u_0 = 1; rows and columns of z then solve to
//! localized chart expressions.
//!
//! so(N): points are decomposable bivectors u∧v with isotropic span. On
//! f0 ≠ 0 the frame pairings against v_{n-1}, v_n can be gauged to
//! [[1, 0], [0, 2f0]]; the isotropy constraints u·u = u·v = v·v = 0 plus
//! the value of fp0 determine the four remaining pairings.

use crate::diffop::{DiffOp, SymbolVars};
use crate::lie::{AlgebraSpec, Family, LieElement};
use crate::poly::{ChartVars, Poly};
use crate::rat::{rat, Rat};
use num::Zero;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("chart self-check failed: {0}")]
    Internal(String),
}

pub struct Chart {
    pub spec: AlgebraSpec,
    pub vars: ChartVars,
    orbit_fns: Vec<Poly>,
    pub euler: DiffOp,
    pub eta_h: DiffOp,
    pub eta_x0: DiffOp,
    deltas: Vec<(DiffOp, DiffOp)>,
    pub f_psi: Poly,
}

impl Chart {
    pub fn new(spec: AlgebraSpec) -> Result<Chart, ChartError> {
        let vars = ChartVars::new(spec.m);
        let orbit_fns = match spec.family {
            Family::Sl => sl_orbit_functions(&spec, &vars),
            Family::So => so_orbit_functions(&spec, &vars),
        };

        // the coordinate elements must come back as their own variables
        for (k, elem) in spec.coord_elems.iter().enumerate() {
            let got = combine(&orbit_fns, elem, &vars);
            if got != vars.var(k) {
                return Err(ChartError::Internal(format!(
                    "coordinate element {k} does not reproduce its chart variable"
                )));
            }
        }

        let euler = DiffOp::vector_field((0..vars.nvars()).map(|i| vars.var(i)).collect());
        let eta = |y: &LieElement| -> DiffOp {
            let coeffs = spec
                .coord_elems
                .iter()
                .map(|c| combine(&orbit_fns, &spec.bracket(y, c).unwrap(), &vars))
                .collect();
            DiffOp::vector_field(coeffs)
        };
        let eta_h = eta(&spec.h);
        let eta_x0 = eta(&spec.x0);
        let mut deltas = Vec::with_capacity(spec.m);
        for j in 1..=spec.m {
            let mk = |primed: bool| -> DiffOp {
                let elem = &spec.coord_elems[2 * j + usize::from(primed)];
                let f_over_f0 = vars
                    .var(vars.f(j) + usize::from(primed))
                    .mul(&vars.f0_pow(-1));
                eta(elem).sub(&eta_x0.mul_left(&f_over_f0))
            };
            deltas.push((mk(false), mk(true)));
        }
        let f_psi = combine(&orbit_fns, &spec.x_psi, &vars);

        Ok(Chart {
            spec,
            vars,
            orbit_fns,
            euler,
            eta_h,
            eta_x0,
            deltas,
            f_psi,
        })
    }

    /// f_y as an element of the localized chart ring; linear in y.
    pub fn orbit_function(&self, y: &LieElement) -> Poly {
        assert_eq!(y.alg, self.spec.key(), "element from a different algebra");
        combine(&self.orbit_fns, y, &self.vars)
    }

    /// The infinitesimal action η^y = Σ_c f_[y,c] ∂_c.
    pub fn eta_field(&self, y: &LieElement) -> DiffOp {
        let coeffs = self
            .spec
            .coord_elems
            .iter()
            .map(|c| self.orbit_function(&self.spec.bracket(y, c).unwrap()))
            .collect();
        DiffOp::vector_field(coeffs)
    }

    /// Δ for the j-th coordinate pair (1-based), primed or not.
    pub fn delta_field(&self, j: usize, primed: bool) -> &DiffOp {
        assert!((1..=self.spec.m).contains(&j));
        let (d, dp) = &self.deltas[j - 1];
        if primed {
            dp
        } else {
            d
        }
    }

    pub fn euler_field(&self) -> &DiffOp {
        &self.euler
    }

    pub fn symbol_vars(&self) -> SymbolVars {
        SymbolVars::new(self.spec.m)
    }

    /// λ, the symbol of the Euler field.
    pub fn lambda(&self) -> Poly {
        self.euler.principal_symbol(&self.symbol_vars()).unwrap()
    }

    /// Φ^y, the symbol of η^y.
    pub fn phi(&self, y: &LieElement) -> Poly {
        self.eta_field(y)
            .principal_symbol(&self.symbol_vars())
            .unwrap()
    }

    /// Θ for the j-th pair, the symbol of Δ: Φ^{x_j} − (f_j/f0) Φ^{x0}.
    pub fn theta(&self, j: usize, primed: bool) -> Poly {
        self.delta_field(j, primed)
            .principal_symbol(&self.symbol_vars())
            .unwrap()
    }

    /// Chart coordinates of a LieElement lying on the orbit.
    pub fn coords_of_point(&self, z: &LieElement) -> Vec<Rat> {
        self.spec
            .coord_elems
            .iter()
            .map(|c| self.spec.killing(c, z).unwrap())
            .collect()
    }
}

fn combine(orbit_fns: &[Poly], y: &LieElement, vars: &ChartVars) -> Poly {
    let mut acc = vars.zero();
    for (i, c) in y.coords.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&orbit_fns[i].scale(c));
        }
    }
    acc
}

fn sl_orbit_functions(spec: &AlgebraSpec, vars: &ChartVars) -> Vec<Poly> {
    let nn = spec.n;
    let n = nn - 1;
    let m = spec.m;
    let half = rat(1, 2);

    // a = Σ f_p fp_p
    let mut a = vars.zero();
    for p in 1..=m {
        a = a.add(&vars.var(vars.f(p)).mul(&vars.var(vars.fp(p))));
    }
    let f0inv = vars.f0_pow(-1);
    let f0inv2 = vars.f0_pow(-2);

    // z = u vᵀ under the gauge u_0 = 1
    let mut u = vec![vars.zero(); nn];
    let mut v = vec![vars.zero(); nn];
    u[0] = vars.one();
    for p in 1..=m {
        u[p] = vars.var(vars.fp(p)).mul(&f0inv);
        v[p] = vars.var(vars.f(p)).scale(&rat(2, 1));
    }
    u[n] = vars
        .var(vars.fp(0))
        .mul(&f0inv)
        .scale(&-half.clone())
        .sub(&a.mul(&f0inv2).scale(&half));
    v[0] = vars.var(vars.fp(0)).sub(&a.mul(&f0inv));
    v[n] = vars.var(0).scale(&rat(2, 1));

    let z = |i: usize, j: usize| -> Poly { u[i].mul(&v[j]) };

    // f_X(z) = Tr(X z)/2 on each basis element
    let mut out = Vec::with_capacity(spec.dim);
    for idx in 0..spec.dim {
        let name = &spec.names[idx];
        if let Some(i) = name.strip_prefix('H').and_then(|s| s.parse::<usize>().ok()) {
            out.push(z(i, i).sub(&z(i + 1, i + 1)).scale(&half));
        } else {
            let inner = name.trim_start_matches("E[").trim_end_matches(']');
            let mut it = inner.split(',');
            let i: usize = it.next().unwrap().parse().unwrap();
            let j: usize = it.next().unwrap().parse().unwrap();
            out.push(z(j, i).scale(&half));
        }
    }
    out
}

fn so_orbit_functions(spec: &AlgebraSpec, vars: &ChartVars) -> Vec<Poly> {
    let nn = spec.n;
    let n = nn / 2;
    let odd = nn % 2 == 1;
    let g = spec.so_grouping.clone().unwrap();
    let half = rat(1, 2);
    let two = rat(2, 1);

    let fv = |j: usize| vars.var(vars.f(j));
    let fpv = |j: usize| vars.var(vars.fp(j));
    let f0inv = vars.f0_pow(-1);
    let f0inv2 = vars.f0_pow(-2);

    // a = Σ (f_p fp_p − f_t fp_t) − f_t0 fp_t0
    // b = Σ fp_p f_t + f_t0²/2
    // c = Σ f_p fp_t − fp_t0²/2
    let mut a = vars.zero();
    let mut b = vars.zero();
    let mut c = vars.zero();
    for (&p, &t) in g.plain.iter().zip(g.tilde.iter()) {
        a = a.add(&fv(p).mul(&fpv(p))).sub(&fv(t).mul(&fpv(t)));
        b = b.add(&fpv(p).mul(&fv(t)));
        c = c.add(&fv(p).mul(&fpv(t)));
    }
    if let Some(t0) = g.tilde0 {
        a = a.sub(&fv(t0).mul(&fpv(t0)));
        b = b.add(&fv(t0).mul(&fv(t0)).scale(&half));
        c = c.sub(&fpv(t0).mul(&fpv(t0)).scale(&half));
    }

    // pairings of every basis vector of ℂ^N against u and v
    let nvec = 2 * n + usize::from(odd);
    let mut du = vec![vars.zero(); nvec];
    let mut dv = vec![vars.zero(); nvec];
    for (i, (&p, &t)) in g.plain.iter().zip(g.tilde.iter()).enumerate() {
        // v_{i+1} has vector index 2i, v'_{i+1} index 2i+1
        du[2 * i] = fv(t).mul(&f0inv).neg();
        dv[2 * i] = fv(p).scale(&two);
        du[2 * i + 1] = fpv(p).mul(&f0inv).neg();
        dv[2 * i + 1] = fpv(t).scale(&-two.clone());
    }
    if let (true, Some(t0)) = (odd, g.tilde0) {
        du[2 * n] = fv(t0).mul(&f0inv).neg();
        dv[2 * n] = fpv(t0).scale(&-two.clone());
    }
    let vn1 = 2 * (n - 2);
    let vn = 2 * (n - 1);
    du[vn1] = vars.one();
    dv[vn1] = vars.zero();
    du[vn] = vars.zero();
    dv[vn] = vars.var(0).scale(&two);
    // frame components solved from isotropy and the value of fp0
    du[vn1 + 1] = b.mul(&f0inv2).neg();
    dv[vn1 + 1] = a.mul(&f0inv).sub(&vars.var(vars.fp(0)));
    du[vn + 1] = a
        .mul(&f0inv2)
        .scale(&half)
        .add(&vars.var(vars.fp(0)).mul(&f0inv).scale(&half));
    dv[vn + 1] = c.mul(&f0inv).scale(&two);

    // f_{e_a ∧ e_b}(u∧v) = ((a·v)(b·u) − (a·u)(b·v)) / 2
    let mut out = Vec::with_capacity(spec.dim);
    for ia in 0..nvec {
        for ib in (ia + 1)..nvec {
            let p = dv[ia].mul(&du[ib]).sub(&du[ia].mul(&dv[ib])).scale(&half);
            out.push(p);
        }
    }
    debug_assert_eq!(out.len(), spec.dim);
    out
}

/// A random rational point of the orbit: c · exp(ad y)(x_psi) with y in the
/// Heisenberg part (ad y is nilpotent of step ≤ 5, so the series is finite).
/// Retries until the point lands in the chart locus f0 ≠ 0.
pub fn random_orbit_point<R: Rng>(spec: &AlgebraSpec, rng: &mut R) -> LieElement {
    loop {
        let mut y = LieElement::zero(spec.key(), spec.dim);
        for i in spec.g_neg_indices() {
            y.coords[i] = rat(rng.random_range(-4i64..=4), rng.random_range(1i64..=3));
        }
        let scale = rat(rng.random_range(1i64..=6), rng.random_range(1i64..=3));
        let mut z = spec.x_psi.clone();
        let mut term = spec.x_psi.clone();
        let mut fact = Rat::from_integer(1.into());
        for k in 1..=4u64 {
            term = spec.bracket(&y, &term).unwrap();
            fact *= Rat::from_integer(k.into());
            z = z.add(&term.scale(&fact.recip()));
        }
        let z = z.scale(&scale);
        if !spec.killing(&spec.x0, &z).unwrap().is_zero() {
            return z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_algebra;
    use crate::rat::rat_int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn sl3() -> Chart {
        Chart::new(build_algebra(Family::Sl, 3).unwrap()).unwrap()
    }

    fn so6() -> Chart {
        Chart::new(build_algebra(Family::So, 6).unwrap()).unwrap()
    }

    /// f_psi assembled from the quartic P.
    fn f_psi_from_p(chart: &Chart) -> Poly {
        let spec = &chart.spec;
        let vars = &chart.vars;
        let p = crate::lie::compute_p(spec).unwrap();
        let mut args = Vec::with_capacity(2 * spec.m);
        for j in 1..=spec.m {
            args.push(vars.var(vars.f(j)));
            args.push(vars.var(vars.fp(j)));
        }
        let p_chart = p.substitute(&args);
        p_chart.mul(&vars.f0_pow(-3)).sub(
            &vars
                .var(vars.fp(0))
                .mul(&vars.var(vars.fp(0)))
                .mul(&vars.f0_pow(-1))
                .scale(&rat(1, 4)),
        )
    }

    #[test]
    fn coordinate_functions() {
        let chart = sl3();
        let vars = &chart.vars;
        assert_eq!(chart.orbit_function(&chart.spec.x0), vars.var(0));
        assert_eq!(chart.orbit_function(&chart.spec.h), vars.var(1));
    }

    #[test]
    fn f_psi_closed_form_sl3() {
        let chart = sl3();
        let vars = &chart.vars;
        // (a² − (f0 fp0)²) / (4 f0³) with a = f1 fp1
        let a = vars.var(vars.f(1)).mul(&vars.var(vars.fp(1)));
        let f0fp0 = vars.var(0).mul(&vars.var(1));
        let expected = a
            .mul(&a)
            .sub(&f0fp0.mul(&f0fp0))
            .mul(&vars.f0_pow(-3))
            .scale(&rat(1, 4));
        assert_eq!(chart.f_psi, expected);
        assert_eq!(chart.f_psi, f_psi_from_p(&chart));
        assert_eq!(
            chart.f_psi.homogeneous_degree(&vars.euler_weights()),
            Some(1)
        );
    }

    #[test]
    fn f_psi_from_p_all_families() {
        for (family, n) in [(Family::Sl, 4), (Family::So, 6), (Family::So, 7)] {
            let chart = Chart::new(build_algebra(family, n).unwrap()).unwrap();
            assert_eq!(chart.f_psi, f_psi_from_p(&chart), "{family}({n})");
        }
    }

    #[test]
    fn interior_cartan_function_sl3() {
        // H1 = E11 − E22 pulls back to 3 f1 fp1 / (2 f0) + fp0/2
        let chart = sl3();
        let vars = &chart.vars;
        let h1 = chart.spec.basis_elem(1);
        let expected = vars
            .var(vars.f(1))
            .mul(&vars.var(vars.fp(1)))
            .mul(&vars.f0_pow(-1))
            .scale(&rat(3, 2))
            .add(&vars.var(1).scale(&rat(1, 2)));
        assert_eq!(chart.orbit_function(&h1), expected);
    }

    #[test]
    fn eta_closed_forms() {
        let chart = sl3();
        let vars = &chart.vars;
        let spec = &chart.spec;
        let nv = vars.nvars();

        // η^{x'_1} = f0 ∂f1 + fp1 ∂fp0
        let x1p = &spec.coord_elems[3];
        let mut coeffs = vec![Poly::zero(nv); nv];
        coeffs[vars.f(1)] = vars.var(0);
        coeffs[vars.fp(0)] = vars.var(vars.fp(1));
        assert_eq!(chart.eta_field(x1p), DiffOp::vector_field(coeffs));

        // η^{x_1} = −f0 ∂fp1 + f1 ∂fp0
        let x1 = &spec.coord_elems[2];
        let mut coeffs = vec![Poly::zero(nv); nv];
        coeffs[vars.fp(1)] = vars.var(0).neg();
        coeffs[vars.fp(0)] = vars.var(vars.f(1));
        assert_eq!(chart.eta_field(x1), DiffOp::vector_field(coeffs));

        // η^h = −2 f0 ∂f0 − f1 ∂f1 − fp1 ∂fp1
        let mut coeffs = vec![Poly::zero(nv); nv];
        coeffs[0] = vars.var(0).scale(&rat_int(-2));
        coeffs[vars.f(1)] = vars.var(vars.f(1)).neg();
        coeffs[vars.fp(1)] = vars.var(vars.fp(1)).neg();
        assert_eq!(chart.eta_h, DiffOp::vector_field(coeffs));

        // η^{x0} = 2 f0 ∂fp0
        let mut coeffs = vec![Poly::zero(nv); nv];
        coeffs[vars.fp(0)] = vars.var(0).scale(&rat_int(2));
        assert_eq!(chart.eta_x0, DiffOp::vector_field(coeffs));

        // η^{x0}(f_psi) = −fp0
        assert_eq!(chart.eta_x0.apply(&chart.f_psi), vars.var(1).neg());
    }

    #[test]
    fn delta_closed_forms_and_heisenberg() {
        for chart in [sl3(), so6()] {
            let vars = &chart.vars;
            let spec = &chart.spec;
            let nv = vars.nvars();
            for j in 1..=spec.m {
                // Δ^{x_j} = −f0 ∂fp_j − f_j ∂fp0
                let mut coeffs = vec![Poly::zero(nv); nv];
                coeffs[vars.fp(j)] = vars.var(0).neg();
                coeffs[vars.fp(0)] = vars.var(vars.f(j)).neg();
                assert_eq!(chart.delta_field(j, false), &DiffOp::vector_field(coeffs));
                // Δ^{x'_j} = f0 ∂f_j − fp_j ∂fp0
                let mut coeffs = vec![Poly::zero(nv); nv];
                coeffs[vars.f(j)] = vars.var(0);
                coeffs[vars.fp(0)] = vars.var(vars.fp(j)).neg();
                assert_eq!(chart.delta_field(j, true), &DiffOp::vector_field(coeffs));
            }
            for j in 1..=spec.m {
                for k in 1..=spec.m {
                    // [Δ^{x_j}, Δ^{x'_k}] = 2 δ_jk f0 ∂fp0 = δ_jk η^{x0}
                    let br = chart
                        .delta_field(j, false)
                        .commutator(chart.delta_field(k, true));
                    if j == k {
                        assert_eq!(br, chart.eta_x0);
                    } else {
                        assert!(br.is_zero());
                    }
                    assert!(chart
                        .delta_field(j, false)
                        .commutator(chart.delta_field(k, false))
                        .is_zero());
                    assert!(chart
                        .delta_field(j, true)
                        .commutator(chart.delta_field(k, true))
                        .is_zero());
                }
                assert!(chart
                    .delta_field(j, false)
                    .commutator(&chart.eta_x0)
                    .is_zero());
                // [η^h, Δ] = −Δ and [E, Δ] = 0
                assert!(chart
                    .delta_field(j, false)
                    .has_weight(&chart.eta_h, &rat_int(-1)));
                assert!(chart
                    .delta_field(j, true)
                    .has_weight(&chart.eta_h, &rat_int(-1)));
                assert!(chart
                    .euler
                    .commutator(chart.delta_field(j, false))
                    .is_zero());
            }
        }
    }

    #[test]
    fn euler_field_examples() {
        let chart = sl3();
        let vars = &chart.vars;
        assert_eq!(chart.euler.apply(&vars.var(0)), vars.var(0));
        assert_eq!(chart.euler.apply(&chart.f_psi), chart.f_psi);
    }

    #[test]
    fn eta_squared_on_psi_powers() {
        // (η^{x0})²(f_psi^k) = [−2k f0 f_psi + k(k−1) fp0²] f_psi^{k−2}
        let chart = sl3();
        let vars = &chart.vars;
        let sq = chart.eta_x0.compose(&chart.eta_x0);
        for k in [2i64, 3] {
            let fk = chart.f_psi.pow(k as u32);
            let lhs = sq.apply(&fk);
            let bracket = vars
                .var(0)
                .mul(&chart.f_psi)
                .scale(&rat_int(-2 * k))
                .add(&vars.var(1).mul(&vars.var(1)).scale(&rat_int(k * (k - 1))));
            let rhs = bracket.mul(&chart.f_psi.pow(k as u32 - 2));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn theta_symbol() {
        let chart = sl3();
        let sym = chart.symbol_vars();
        // Θ^{x'_1} = Φ^{x'_1} − (fp1/f0) Φ^{x0}
        let spec = &chart.spec;
        let phi_x1p = chart.phi(&spec.coord_elems[3]);
        let phi_x0 = chart.phi(&spec.x0);
        let factor = sym.from_chart(
            &chart
                .vars
                .var(chart.vars.fp(1))
                .mul(&chart.vars.f0_pow(-1)),
        );
        let expected = phi_x1p.sub(&factor.mul(&phi_x0));
        assert_eq!(chart.theta(1, true), expected);
    }

    #[test]
    fn equivariance_sweep_small() {
        for chart in [sl3(), so6()] {
            let spec = &chart.spec;
            for i in 0..spec.dim {
                let x = spec.basis_elem(i);
                let eta_x = chart.eta_field(&x);
                for j in 0..spec.dim {
                    let y = spec.basis_elem(j);
                    let lhs = eta_x.apply(&chart.orbit_function(&y));
                    let rhs = chart.orbit_function(&spec.bracket(&x, &y).unwrap());
                    assert_eq!(lhs, rhs, "equivariance failed at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn random_point_cross_validation() {
        let mut rng = ChaCha20Rng::seed_from_u64(0xC0FFEE);
        for chart in [sl3(), so6()] {
            let spec = &chart.spec;
            for _ in 0..20 {
                let z = random_orbit_point(spec, &mut rng);
                let coords = chart.coords_of_point(&z);
                for i in 0..spec.dim {
                    let y = spec.basis_elem(i);
                    let via_chart = chart.orbit_function(&y).eval(&coords).unwrap();
                    let direct = spec.killing(&y, &z).unwrap();
                    assert_eq!(via_chart, direct);
                }
            }
        }
    }
}
