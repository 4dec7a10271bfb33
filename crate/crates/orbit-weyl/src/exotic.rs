//! Construction of the order-4 operators: the order-2 quantizations A (and
//! B, C for so), the order-4 candidate S = ¼(main − q(E)(η^{x0})²) with its
//! correction polynomial q solved from exact divisibility on powers of
//! f_psi, the operator D0 = f0⁻¹ S, the family {D_x} generated from D0 by
//! commutators with the η-fields, and the pairwise-commutativity sweep.

use crate::chart::Chart;
use crate::diffop::DiffOp;
use crate::lie::{AlgKey, Family, LieElement};
use crate::linalg::{Insert, Payload, TaggedSpan};
use crate::poly::Poly;
use crate::rat::{rat, rat_int, Rat};
use num::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExoticError {
    #[error("B and C exist only for the so family")]
    BcOnlyForSo,
    #[error("no correction scalar makes the order-4 candidate divisible at k = {k}")]
    NoSolution { k: u32 },
    #[error("correction scalar at k = {k} is not unique")]
    NonUnique { k: u32 },
    #[error("correction scalars do not interpolate to a polynomial of degree <= 2 (defect at k = {k})")]
    BadInterpolation { k: u32 },
    #[error("D0(f_psi^{k}) is not a scalar multiple of the next power down")]
    NotProportional { k: u32 },
    #[error("operator family closure is inconsistent: two routes to the same element differ (via {generator})")]
    PathInconsistency { generator: String },
    #[error("operator family spans dimension {got}, expected {want}")]
    SpanDeficiency { got: usize, want: usize },
}

/// The correction polynomial q(E) = c2 E² + c1 E + c0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionPoly {
    pub c0: Rat,
    pub c1: Rat,
    pub c2: Rat,
}

impl CorrectionPoly {
    pub fn eval_scalar(&self, k: &Rat) -> Rat {
        (&self.c2 * k + &self.c1) * k + &self.c0
    }

    /// q as a composed operator in the Euler field.
    pub fn as_operator(&self, chart: &Chart) -> DiffOp {
        let e = chart.euler_field();
        let id = DiffOp::identity(chart.vars.nvars());
        e.compose(e)
            .scale(&self.c2)
            .add(&e.scale(&self.c1))
            .add(&id.scale(&self.c0))
    }

    /// The closed form: (E + m/2)² for sl, (E + m/2 + 1)(E + m/2 − 1) for so.
    pub fn closed_form(family: Family, m: usize) -> CorrectionPoly {
        let half_m = rat(m as i64, 2);
        match family {
            Family::Sl => CorrectionPoly {
                c0: &half_m * &half_m,
                c1: half_m.clone() + half_m,
                c2: Rat::one(),
            },
            Family::So => {
                let r1 = &half_m + rat_int(1);
                let r2 = &half_m - rat_int(1);
                CorrectionPoly {
                    c0: &r1 * &r2,
                    c1: r1 + r2,
                    c2: Rat::one(),
                }
            }
        }
    }

    pub fn shifted(&self, delta: &Rat) -> CorrectionPoly {
        CorrectionPoly {
            c0: &self.c0 + delta,
            c1: self.c1.clone(),
            c2: self.c2.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let e2 = Poly::var_pow(1, 0, 2);
        let e1 = Poly::var(1, 0);
        let p = e2
            .scale(&self.c2)
            .add(&e1.scale(&self.c1))
            .add(&Poly::constant(1, self.c0.clone()));
        p.to_text(&["E".to_string()])
    }
}

/// Weyl quantization of the quadratic a: half-sum of both orders per pair,
/// with the so sign pattern over plain/tilde/extra pairs.
pub fn build_a(chart: &Chart) -> DiffOp {
    let m = chart.spec.m;
    let half = rat(1, 2);
    let sym_pair = |j: usize| -> DiffOp {
        let d = chart.delta_field(j, false);
        let dp = chart.delta_field(j, true);
        d.compose(dp).add(&dp.compose(d)).scale(&half)
    };
    match chart.spec.family {
        Family::Sl => {
            let mut acc = DiffOp::zero(chart.vars.nvars());
            for j in 1..=m {
                acc = acc.add(&sym_pair(j));
            }
            acc
        }
        Family::So => {
            let g = chart.spec.so_grouping.clone().unwrap();
            let mut acc = DiffOp::zero(chart.vars.nvars());
            for &p in &g.plain {
                acc = acc.add(&sym_pair(p));
            }
            for &t in &g.tilde {
                acc = acc.sub(&sym_pair(t));
            }
            if let Some(t0) = g.tilde0 {
                acc = acc.sub(&sym_pair(t0));
            }
            acc
        }
    }
}

/// B = Σ Δ'_{plain} Δ_{tilde} + ½ Δ_{t0}² (the factors commute).
pub fn build_b(chart: &Chart) -> Result<DiffOp, ExoticError> {
    let g = chart
        .spec
        .so_grouping
        .clone()
        .ok_or(ExoticError::BcOnlyForSo)?;
    let mut acc = DiffOp::zero(chart.vars.nvars());
    for (&p, &t) in g.plain.iter().zip(g.tilde.iter()) {
        acc = acc.add(
            &chart
                .delta_field(p, true)
                .compose(chart.delta_field(t, false)),
        );
    }
    if let Some(t0) = g.tilde0 {
        let d = chart.delta_field(t0, false);
        acc = acc.add(&d.compose(d).scale(&rat(1, 2)));
    }
    Ok(acc)
}

/// C = Σ Δ_{plain} Δ'_{tilde} − ½ (Δ'_{t0})².
pub fn build_c(chart: &Chart) -> Result<DiffOp, ExoticError> {
    let g = chart
        .spec
        .so_grouping
        .clone()
        .ok_or(ExoticError::BcOnlyForSo)?;
    let mut acc = DiffOp::zero(chart.vars.nvars());
    for (&p, &t) in g.plain.iter().zip(g.tilde.iter()) {
        acc = acc.add(
            &chart
                .delta_field(p, false)
                .compose(chart.delta_field(t, true)),
        );
    }
    if let Some(t0) = g.tilde0 {
        let d = chart.delta_field(t0, true);
        acc = acc.sub(&d.compose(d).scale(&rat(1, 2)));
    }
    Ok(acc)
}

/// The order-4 main term: A² for sl, A² + 2BC + 2CB for so.
pub fn main_term(chart: &Chart) -> DiffOp {
    let a = build_a(chart);
    match chart.spec.family {
        Family::Sl => a.compose(&a),
        Family::So => {
            let b = build_b(chart).unwrap();
            let c = build_c(chart).unwrap();
            let two = rat_int(2);
            a.compose(&a)
                .add(&b.compose(&c).scale(&two))
                .add(&c.compose(&b).scale(&two))
        }
    }
}

/// Powers 1, f_psi, f_psi², …, f_psi^k_max.
pub fn psi_powers(chart: &Chart, k_max: u32) -> Vec<Poly> {
    let mut v = Vec::with_capacity(k_max as usize + 1);
    v.push(chart.vars.one());
    for _ in 1..=k_max {
        v.push(v.last().unwrap().mul(&chart.f_psi));
    }
    v
}

/// Solve, for each k, main(ψ^k) = q_k (η^{x0})²(ψ^k) + γ'_k f0 ψ^{k−1}
/// for the unique scalar pair, then interpolate q_k by a polynomial in k
/// and check it has degree ≤ 2 and reproduces every sample.
pub fn solve_q(chart: &Chart, main: &DiffOp, k_max: u32) -> Result<CorrectionPoly, ExoticError> {
    assert!(k_max >= 4);
    let powers = psi_powers(chart, k_max);
    let eta0_sq = chart.eta_x0.compose(&chart.eta_x0);
    let mut q_samples: Vec<(u32, Rat)> = Vec::new();
    for k in 2..=k_max {
        let target = main.apply(&powers[k as usize]);
        let g = eta0_sq.apply(&powers[k as usize]);
        let f = chart.vars.var(0).mul(&powers[k as usize - 1]);
        let (qk, _gamma) = solve_two_term(&target, &g, &f, k)?;
        q_samples.push((k, qk));
    }
    // quadratic through the first three samples, then consistency on the rest
    let pts: Vec<(Rat, Rat)> = q_samples
        .iter()
        .take(3)
        .map(|(k, q)| (rat_int(*k as i64), q.clone()))
        .collect();
    let q = interpolate_quadratic(&pts);
    for (k, qk) in &q_samples {
        if q.eval_scalar(&rat_int(*k as i64)) != *qk {
            return Err(ExoticError::BadInterpolation { k: *k });
        }
    }
    Ok(q)
}

/// Solve target = x·g + y·f exactly; error if no solution or not unique.
fn solve_two_term(target: &Poly, g: &Poly, f: &Poly, k: u32) -> Result<(Rat, Rat), ExoticError> {
    let mut monos: Vec<_> = Vec::new();
    for p in [target, g, f] {
        for (mo, _) in p.terms() {
            monos.push(mo.clone());
        }
    }
    monos.sort();
    monos.dedup();
    let mut rows: Vec<[Rat; 3]> = monos
        .iter()
        .map(|mo| [g.coeff(mo), f.coeff(mo), target.coeff(mo)])
        .collect();
    let mut pivot_rows: Vec<usize> = Vec::new();
    for col in 0..2 {
        let Some(pi) =
            (0..rows.len()).find(|&i| !pivot_rows.contains(&i) && !rows[i][col].is_zero())
        else {
            continue;
        };
        for i in 0..rows.len() {
            if i != pi && !rows[i][col].is_zero() {
                let factor = &rows[i][col] / &rows[pi][col];
                for c in 0..3 {
                    let delta = &factor * &rows[pi][c];
                    rows[i][c] -= delta;
                }
            }
        }
        pivot_rows.push(pi);
    }
    if pivot_rows.len() < 2 {
        return Err(ExoticError::NonUnique { k });
    }
    let x = &rows[pivot_rows[0]][2] / &rows[pivot_rows[0]][0];
    let y = &rows[pivot_rows[1]][2] / &rows[pivot_rows[1]][1];
    for (i, row) in rows.iter().enumerate() {
        if pivot_rows.contains(&i) {
            continue;
        }
        if !(&row[0] * &x + &row[1] * &y - &row[2]).is_zero() {
            return Err(ExoticError::NoSolution { k });
        }
    }
    Ok((x, y))
}

/// Lagrange interpolation through three points, returned as a quadratic.
fn interpolate_quadratic(pts: &[(Rat, Rat)]) -> CorrectionPoly {
    assert_eq!(pts.len(), 3);
    let mut c = [Rat::zero(), Rat::zero(), Rat::zero()];
    for (i, (xi, yi)) in pts.iter().enumerate() {
        let mut num = [Rat::one(), Rat::zero(), Rat::zero()];
        let mut den = Rat::one();
        for (j, (xj, _)) in pts.iter().enumerate() {
            if j == i {
                continue;
            }
            // multiply num by (x − x_j)
            num = [
                -(xj) * &num[0],
                &num[0] - &(xj * &num[1]),
                &num[1] - &(xj * &num[2]),
            ];
            den *= xi - xj;
        }
        for d in 0..3 {
            c[d] += yi * &num[d] / &den;
        }
    }
    CorrectionPoly {
        c0: c[0].clone(),
        c1: c[1].clone(),
        c2: c[2].clone(),
    }
}

/// Residue of the divisibility demand at level k under a given q: zero iff
/// main(ψ^k) − q(k)(η^{x0})²(ψ^k) is an exact scalar multiple of f0 ψ^{k−1}.
pub fn divisibility_defect(chart: &Chart, main: &DiffOp, q: &CorrectionPoly, k: u32) -> Poly {
    let powers = psi_powers(chart, k);
    let eta0_sq = chart.eta_x0.compose(&chart.eta_x0);
    let x = main.apply(&powers[k as usize]).sub(
        &eta0_sq
            .apply(&powers[k as usize])
            .scale(&q.eval_scalar(&rat_int(k as i64))),
    );
    let f = chart.vars.var(0).mul(&powers[k as usize - 1]);
    match x.try_scalar_ratio(&f) {
        Some(_) => chart.vars.zero(),
        None => {
            // subtract the best matching multiple so the defect is visible
            let lead = f.terms().next().map(|(m, c)| (m.clone(), c.clone()));
            if let Some((mo, c)) = lead {
                let ratio = x.coeff(&mo) / c;
                x.sub(&f.scale(&ratio))
            } else {
                x
            }
        }
    }
}

/// S = ¼ (main − q(E)(η^{x0})²).
pub fn build_s(chart: &Chart, main: &DiffOp, q: &CorrectionPoly) -> DiffOp {
    let eta0_sq = chart.eta_x0.compose(&chart.eta_x0);
    main.sub(&q.as_operator(chart).compose(&eta0_sq))
        .scale(&rat(1, 4))
}

/// D0 = f0⁻¹ · S (left multiplication).
pub fn build_d0(chart: &Chart, s: &DiffOp) -> DiffOp {
    s.mul_left(&chart.vars.f0_pow(-1))
}

/// Exact eigenvalue quotients γ(k) = D0(ψ^k)/ψ^{k−1} for k = 0..k_max.
pub fn eigenvalue_sequence(
    chart: &Chart,
    d0: &DiffOp,
    k_max: u32,
) -> Result<Vec<Rat>, ExoticError> {
    let powers = psi_powers(chart, k_max);
    let results: Vec<Result<Rat, ExoticError>> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let image = d0.apply(&powers[k as usize]);
            if k == 0 {
                return if image.is_zero() {
                    Ok(Rat::zero())
                } else {
                    Err(ExoticError::NotProportional { k })
                };
            }
            image
                .try_scalar_ratio(&powers[k as usize - 1])
                .ok_or(ExoticError::NotProportional { k })
        })
        .collect();
    results.into_iter().collect()
}

/// Coefficients (c0..c4) of the degree-4 polynomial through γ(0..4); `None`
/// if the higher samples disagree with it.
pub fn gamma_polynomial(seq: &[Rat]) -> Option<[Rat; 5]> {
    assert!(seq.len() >= 5);
    let mut mat: Vec<Vec<Rat>> = (0..5)
        .map(|k| {
            let x = rat_int(k as i64);
            let mut row = Vec::with_capacity(6);
            let mut p = Rat::one();
            for _ in 0..5 {
                row.push(p.clone());
                p *= &x;
            }
            row.push(seq[k].clone());
            row
        })
        .collect();
    for col in 0..5 {
        let pi = (col..5).find(|&i| !mat[i][col].is_zero())?;
        mat.swap(col, pi);
        let inv = mat[col][col].clone();
        for i in 0..5 {
            if i != col && !mat[i][col].is_zero() {
                let factor = &mat[i][col] / &inv;
                for c in col..6 {
                    let delta = &factor * &mat[col][c];
                    mat[i][c] -= delta;
                }
            }
        }
    }
    let coeffs: Vec<Rat> = (0..5).map(|i| &mat[i][5] / &mat[i][i]).collect();
    for (k, val) in seq.iter().enumerate().skip(5) {
        let x = rat_int(k as i64);
        let mut acc = Rat::zero();
        let mut p = Rat::one();
        for c in &coeffs {
            acc += c * &p;
            p *= &x;
        }
        if &acc != val {
            return None;
        }
    }
    Some([
        coeffs[0].clone(),
        coeffs[1].clone(),
        coeffs[2].clone(),
        coeffs[3].clone(),
        coeffs[4].clone(),
    ])
}

/// The closed-form eigenvalue law: k²(k+(m−1)/2)(k+m/2) for sl,
/// k(k+1)(k+m/2−1)(k+m/2−½) for so.
pub fn eigenvalue_closed_form(family: Family, m: usize, k: u32) -> Rat {
    let k = rat_int(k as i64);
    let mh = rat(m as i64, 2);
    match family {
        Family::Sl => (&k * &k) * (&k + &mh - rat(1, 2)) * (&k + &mh),
        Family::So => (&k) * (&k + rat_int(1)) * (&k + &mh - rat_int(1)) * (&k + &mh - rat(1, 2)),
    }
}

/// The principal symbol D0 must carry: f0⁻¹ (P(Θ…) − ¼ λ² (Φ^{x0})²).
pub fn r0_symbol(chart: &Chart) -> Poly {
    let sym = chart.symbol_vars();
    let p = crate::lie::compute_p(&chart.spec).unwrap();
    let mut thetas = Vec::with_capacity(2 * chart.spec.m);
    for j in 1..=chart.spec.m {
        thetas.push(chart.theta(j, false));
        thetas.push(chart.theta(j, true));
    }
    let p_theta = p.substitute(&thetas);
    let lam = chart.lambda();
    let phi0 = chart.phi(&chart.spec.x0);
    let s_sym = p_theta.sub(&lam.mul(&lam).mul(&phi0).mul(&phi0).scale(&rat(1, 4)));
    let f0_inv = Poly::var_pow(sym.nvars(), 0, -1);
    s_sym.mul(&f0_inv)
}

impl Payload for DiffOp {
    fn sub_scaled(&self, other: &Self, c: &Rat) -> Self {
        self.sub(&other.scale(c))
    }
    fn scale(&self, c: &Rat) -> Self {
        DiffOp::scale(self, c)
    }
    fn is_zero_payload(&self) -> bool {
        self.is_zero()
    }
}

/// The adjoint family: one operator per basis element, generated from D0 by
/// breadth-first closure under (x, D) ↦ ([y, x], [η^y, D]) over all basis
/// generators y, with exact span tracking. Any time a bracket route lands in
/// the existing span the operator residual must vanish, which simultaneously
/// witnesses path independence and linearity of x ↦ D_x.
#[derive(Clone)]
pub struct ExoticFamily {
    pub alg: AlgKey,
    pub ops: Vec<DiffOp>,
}

impl ExoticFamily {
    pub fn op_for(&self, y: &LieElement) -> DiffOp {
        assert_eq!(y.alg, self.alg);
        let nv = self.ops[0].nvars();
        let mut acc = DiffOp::zero(nv);
        for (i, c) in y.coords.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.ops[i].scale(c));
            }
        }
        acc
    }
}

pub fn generate_family(chart: &Chart, d0: &DiffOp) -> Result<ExoticFamily, ExoticError> {
    let spec = &chart.spec;
    let etas: Vec<DiffOp> = (0..spec.dim)
        .map(|i| chart.eta_field(&spec.basis_elem(i)))
        .collect();

    let mut span: TaggedSpan<DiffOp> = TaggedSpan::new(spec.dim);
    let mut queue: Vec<(LieElement, DiffOp)> = Vec::new();
    match span.insert(spec.x0.coords.clone(), d0.clone()) {
        Insert::Extended => queue.push((spec.x0.clone(), d0.clone())),
        Insert::InSpan { .. } => unreachable!("x0 is nonzero"),
    }
    while let Some((x, d)) = queue.pop() {
        for gen in 0..spec.dim {
            let y = spec.basis_elem(gen);
            let new_x = spec.bracket(&y, &x).unwrap();
            let new_d = etas[gen].commutator(&d);
            if new_x.is_zero() {
                if !new_d.is_zero() {
                    return Err(ExoticError::PathInconsistency {
                        generator: spec.names[gen].clone(),
                    });
                }
                continue;
            }
            match span.insert(new_x.coords.clone(), new_d.clone()) {
                Insert::Extended => queue.push((new_x, new_d)),
                Insert::InSpan { residual } => {
                    if !residual.is_zero() {
                        return Err(ExoticError::PathInconsistency {
                            generator: spec.names[gen].clone(),
                        });
                    }
                }
            }
        }
    }
    if span.dim() != spec.dim {
        return Err(ExoticError::SpanDeficiency {
            got: span.dim(),
            want: spec.dim,
        });
    }
    let ops: Vec<DiffOp> = (0..spec.dim)
        .map(|i| {
            span.solve(spec.basis_elem(i).coords)
                .expect("span is full-dimensional")
        })
        .collect();
    Ok(ExoticFamily {
        alg: spec.key(),
        ops,
    })
}

/// Commutators [D_x, D_y] over the requested unordered basis pairs; returns
/// the pairs whose commutator is not identically zero.
pub fn noncommuting_pairs(family: &ExoticFamily, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    pairs
        .par_iter()
        .filter(|&&(i, j)| !family.ops[i].commutator(&family.ops[j]).is_zero())
        .cloned()
        .collect()
}

pub fn all_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(dim * (dim - 1) / 2);
    for i in 0..dim {
        for j in (i + 1)..dim {
            v.push((i, j));
        }
    }
    v
}

/// Everything downstream of the chart, built in dependency order.
pub struct Engine {
    pub chart: Chart,
    pub a_op: DiffOp,
    pub b_op: Option<DiffOp>,
    pub c_op: Option<DiffOp>,
    pub main: DiffOp,
    pub q: CorrectionPoly,
    pub s_op: DiffOp,
    pub d0: DiffOp,
}

impl Engine {
    pub fn build(chart: Chart) -> Result<Engine, ExoticError> {
        let a_op = build_a(&chart);
        let (b_op, c_op) = match chart.spec.family {
            Family::Sl => (None, None),
            Family::So => (Some(build_b(&chart)?), Some(build_c(&chart)?)),
        };
        let main = main_term(&chart);
        let q = solve_q(&chart, &main, 6)?;
        let s_op = build_s(&chart, &main, &q);
        let d0 = build_d0(&chart, &s_op);
        Ok(Engine {
            chart,
            a_op,
            b_op,
            c_op,
            main,
            q,
            s_op,
            d0,
        })
    }
}
