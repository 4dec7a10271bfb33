//! Normal-ordered differential operators over the localized chart ring.
//!
//! An operator is a finite sum  Σ_α  p_α(f) ∂^α  with all coefficients to
//! the left of all derivatives. Composition expands derivatives past
//! coefficients with the finite Leibniz rule and lands back in normal form,
//! so operator equality is literal term-by-term equality — every identity
//! in the verification suites is decided exactly, never by sampling.

use crate::poly::{zero_expo, ChartVars, Expo, Poly};
use crate::rat::{binomial, Rat};
use num::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("the zero operator has no principal symbol")]
    ZeroOperator,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOp {
    nvars: usize,
    terms: BTreeMap<Expo, Poly>,
}

impl DiffOp {
    pub fn zero(nvars: usize) -> Self {
        DiffOp {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(nvars: usize) -> Self {
        DiffOp::mult(Poly::one(nvars))
    }

    /// Multiplication operator by a chart function.
    pub fn mult(p: Poly) -> Self {
        let nvars = p.nvars();
        let mut op = DiffOp::zero(nvars);
        op.add_term(zero_expo(nvars), p);
        op
    }

    /// The bare derivative ∂ in variable `var`.
    pub fn deriv(nvars: usize, var: usize) -> Self {
        let mut alpha = zero_expo(nvars);
        alpha[var] = 1;
        let mut op = DiffOp::zero(nvars);
        op.add_term(alpha, Poly::one(nvars));
        op
    }

    /// Vector field Σ coeffs[i] ∂_i.
    pub fn vector_field(coeffs: Vec<Poly>) -> Self {
        let nvars = coeffs.len();
        let mut op = DiffOp::zero(nvars);
        for (i, c) in coeffs.into_iter().enumerate() {
            let mut alpha = zero_expo(nvars);
            alpha[i] = 1;
            op.add_term(alpha, c);
        }
        op
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Poly)> {
        self.terms.iter()
    }

    pub fn num_flat_terms(&self) -> usize {
        self.terms.values().map(|p| p.num_terms()).sum()
    }

    pub fn add_term(&mut self, alpha: Expo, coeff: Poly) {
        debug_assert_eq!(alpha.len(), self.nvars);
        debug_assert!(alpha.iter().all(|&e| e >= 0));
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (a, p) in &other.terms {
            out.add_term(a.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        let mut out = DiffOp::zero(self.nvars);
        for (a, p) in &self.terms {
            out.terms.insert(a.clone(), p.neg());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero(self.nvars);
        }
        let mut out = DiffOp::zero(self.nvars);
        for (a, p) in &self.terms {
            out.terms.insert(a.clone(), p.scale(c));
        }
        out
    }

    /// Left multiplication by a function: coefficients pick up the factor.
    pub fn mul_left(&self, p: &Poly) -> DiffOp {
        let mut out = DiffOp::zero(self.nvars);
        for (a, q) in &self.terms {
            out.add_term(a.clone(), p.mul(q));
        }
        out
    }

    /// Operator order: max total derivative degree, or None for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|a| a.iter().map(|&e| e as usize).sum())
            .max()
    }

    /// Exact action on a chart function.
    pub fn apply(&self, g: &Poly) -> Poly {
        assert_eq!(self.nvars, g.nvars());
        let work: Vec<(&Expo, &Poly)> = self.terms.iter().collect();
        let combine = |(alpha, p): (&Expo, &Poly)| {
            let d = g.partial_multi(alpha);
            if d.is_zero() {
                Poly::zero(self.nvars)
            } else {
                p.mul(&d)
            }
        };
        if work.len() >= 16 && g.num_terms() >= 64 {
            work.into_par_iter()
                .map(combine)
                .reduce(|| Poly::zero(self.nvars), |a, b| a.add(&b))
        } else {
            let mut acc = Poly::zero(self.nvars);
            for t in work {
                acc = acc.add(&combine(t));
            }
            acc
        }
    }

    /// Normal-ordered product: apply(compose(a, b), g) == apply(a, apply(b, g)).
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.nvars, other.nvars);
        let nv = self.nvars;
        let work: Vec<(&Expo, &Poly)> = self.terms.iter().collect();
        let piece = |(alpha, p): (&Expo, &Poly)| {
            let mut out = DiffOp::zero(nv);
            for (beta, q) in &other.terms {
                // push ∂^alpha past q by Leibniz
                for (gamma_rest, dq) in leibniz_split(alpha, q) {
                    let mut key = gamma_rest;
                    for (k, b) in key.iter_mut().zip(beta.iter()) {
                        *k += *b;
                    }
                    out.add_term(key, p.mul(&dq));
                }
            }
            out
        };
        if work.len() >= 16 {
            work.into_par_iter()
                .map(piece)
                .reduce(|| DiffOp::zero(nv), |a, b| a.add(&b))
        } else {
            let mut acc = DiffOp::zero(nv);
            for t in work {
                acc = acc.add(&piece(t));
            }
            acc
        }
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// Exact operator identity [field, self] == weight · self.
    pub fn has_weight(&self, field: &DiffOp, weight: &Rat) -> bool {
        field.commutator(self) == self.scale(weight)
    }

    /// Top-order part as a fiberwise polynomial on the cotangent chart.
    pub fn principal_symbol(&self, sym: &SymbolVars) -> Result<Poly, OpError> {
        let d = self.order().ok_or(OpError::ZeroOperator)?;
        let mut out = Poly::zero(sym.nvars());
        for (alpha, p) in &self.terms {
            let total: usize = alpha.iter().map(|&e| e as usize).sum();
            if total != d {
                continue;
            }
            for (m, c) in p.terms() {
                let mut key = zero_expo(sym.nvars());
                key[..m.len()].copy_from_slice(m);
                for (i, &e) in alpha.iter().enumerate() {
                    key[sym.xi(i)] = e;
                }
                out.add_term(key, c.clone());
            }
        }
        Ok(out)
    }

    /// Flattened text form: terms sorted by derivative multi-index, then by
    /// coefficient monomial, signs folded into the separators.
    pub fn to_text(&self, chart_names: &[String]) -> String {
        use num::Signed;
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (alpha, p) in &self.terms {
            for (m, c) in p.terms() {
                let neg = c.is_negative();
                if first {
                    if neg {
                        out.push('-');
                    }
                    first = false;
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                let mono_poly = Poly::monomial(m.clone(), c.abs());
                let mut piece = mono_poly.to_text(chart_names);
                let deriv_txt = deriv_text(alpha, chart_names);
                if !deriv_txt.is_empty() {
                    if piece == "1" {
                        piece = deriv_txt;
                    } else {
                        piece = format!("{piece}*{deriv_txt}");
                    }
                }
                out.push_str(&piece);
            }
        }
        out
    }
}

/// All (remaining derivative, ∂^γ q · binom) pieces of pushing ∂^α past q.
fn leibniz_split(alpha: &Expo, q: &Poly) -> Vec<(Expo, Poly)> {
    let mut acc: Vec<(Expo, Poly)> = vec![(alpha.clone(), q.clone())];
    for (var, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let mut next: Vec<(Expo, Poly)> = Vec::with_capacity(acc.len() * (a as usize + 1));
        for (rest, poly) in acc {
            let mut dq = poly;
            for j in 0..=a {
                let coef = binomial(a as u32, j as u32);
                if !dq.is_zero() {
                    let mut key = rest.clone();
                    key[var] = a - j;
                    next.push((key, dq.scale(&coef)));
                }
                if j < a {
                    dq = dq.partial(var);
                    if dq.is_zero() {
                        break;
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

fn deriv_text(alpha: &Expo, chart_names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in alpha.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            parts.push(format!("D[{}]", chart_names[i]));
        } else {
            parts.push(format!("D[{}]^{}", chart_names[i], e));
        }
    }
    parts.join("*")
}

/// Variable layout for symbols: the chart variables followed by one fiber
/// variable per chart variable.
#[derive(Clone, Debug)]
pub struct SymbolVars {
    pub chart: ChartVars,
}

impl SymbolVars {
    pub fn new(m: usize) -> Self {
        SymbolVars {
            chart: ChartVars::new(m),
        }
    }

    pub fn nvars(&self) -> usize {
        2 * self.chart.nvars()
    }

    /// Index of the fiber variable dual to chart variable `i`.
    pub fn xi(&self, i: usize) -> usize {
        self.chart.nvars() + i
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = self.chart.names();
        for i in 0..=self.chart.m {
            v.push(format!("xi{i}"));
            v.push(format!("xip{i}"));
        }
        v
    }

    /// Lift a chart function into the symbol ring.
    pub fn from_chart(&self, p: &Poly) -> Poly {
        p.extend_vars(self.nvars())
    }

    /// Fiber-degree weights (order grading of symbols).
    pub fn order_weights(&self) -> Vec<i64> {
        let mut w = vec![0; self.nvars()];
        for i in self.chart.nvars()..self.nvars() {
            w[i] = 1;
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use proptest::prelude::*;

    fn cv() -> ChartVars {
        ChartVars::new(1)
    }

    /// Euler field in degree-1 chart coordinates: Σ f_c ∂_c.
    fn euler(v: &ChartVars) -> DiffOp {
        DiffOp::vector_field((0..v.nvars()).map(|i| v.var(i)).collect())
    }

    /// 2 f0 ∂_{fp0}
    fn eta_x0(v: &ChartVars) -> DiffOp {
        let mut coeffs = vec![v.zero(); v.nvars()];
        coeffs[v.fp(0)] = v.var(0).scale(&rat_int(2));
        DiffOp::vector_field(coeffs)
    }

    #[test]
    fn leibniz_compose() {
        let v = cv();
        // ∂_{f1} ∘ (f1 ·) = f1 ∂_{f1} + 1
        let d = DiffOp::deriv(v.nvars(), v.f(1));
        let m = DiffOp::mult(v.var(v.f(1)));
        let got = d.compose(&m);
        let expected = m.compose(&d).add(&DiffOp::identity(v.nvars()));
        assert_eq!(got, expected);
    }

    #[test]
    fn euler_commutators() {
        let v = cv();
        let e = euler(&v);
        // [E, f0·] = f0·
        let f0 = DiffOp::mult(v.var(0));
        assert_eq!(e.commutator(&f0), f0);
        // [E, eta_x0] = 0: both coefficient and derivative scale once
        assert!(e.commutator(&eta_x0(&v)).is_zero());
        // E(f1 fp1) = 2 f1 fp1
        let g = v.var(v.f(1)).mul(&v.var(v.fp(1)));
        assert_eq!(e.apply(&g), g.scale(&rat_int(2)));
    }

    #[test]
    fn eta_x0_action() {
        let v = cv();
        assert_eq!(eta_x0(&v).apply(&v.var(v.fp(0))), v.var(0).scale(&rat_int(2)));
    }

    #[test]
    fn weight_check() {
        let v = cv();
        let e = euler(&v);
        let f0 = DiffOp::mult(v.var(0));
        assert!(f0.has_weight(&e, &rat_int(1)));
        assert!(e.has_weight(&e, &rat_int(0)));
        assert!(!f0.has_weight(&e, &rat_int(2)));
    }

    #[test]
    fn symbol_examples() {
        let v = cv();
        let sym = SymbolVars::new(1);
        // symbol(eta_x0) = 2 f0 xip0
        let s = eta_x0(&v).principal_symbol(&sym).unwrap();
        let expected = sym
            .from_chart(&v.var(0))
            .mul(&Poly::var(sym.nvars(), sym.xi(v.fp(0))))
            .scale(&rat_int(2));
        assert_eq!(s, expected);
        // symbol(E) = λ = Σ f_c xi_c
        let lam = euler(&v).principal_symbol(&sym).unwrap();
        let mut expect = Poly::zero(sym.nvars());
        for i in 0..v.nvars() {
            expect = expect.add(
                &sym.from_chart(&v.var(i))
                    .mul(&Poly::var(sym.nvars(), sym.xi(i))),
            );
        }
        assert_eq!(lam, expect);
        // zero operator has no symbol
        assert_eq!(
            DiffOp::zero(v.nvars()).principal_symbol(&sym),
            Err(OpError::ZeroOperator)
        );
    }

    #[test]
    fn symbol_multiplicative_when_orders_add() {
        let v = cv();
        let sym = SymbolVars::new(1);
        let a = eta_x0(&v);
        let e = euler(&v);
        let prod = a.compose(&e);
        assert_eq!(prod.order(), Some(2));
        let lhs = prod.principal_symbol(&sym).unwrap();
        let rhs = a
            .principal_symbol(&sym)
            .unwrap()
            .mul(&e.principal_symbol(&sym).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_format() {
        let v = cv();
        let op = DiffOp::mult(v.var(0)).add(&DiffOp::deriv(v.nvars(), v.fp(0)).scale(&rat(-1, 2)));
        assert_eq!(op.to_text(&v.names()), "f0 - (1/2)*D[fp0]");
    }

    fn arb_op(nvars: usize) -> impl Strategy<Value = DiffOp> {
        let term = (
            proptest::collection::vec(0i16..2, nvars),
            proptest::collection::vec(-2i16..3, nvars),
            -4i64..5,
        );
        proptest::collection::vec(term, 0..4).prop_map(move |ts| {
            let mut op = DiffOp::zero(nvars);
            for (alpha, mut expo, c) in ts {
                for e in expo.iter_mut().skip(1) {
                    if *e < 0 {
                        *e = -*e;
                    }
                }
                op.add_term(
                    Expo::from_vec(alpha),
                    Poly::monomial(Expo::from_vec(expo), rat_int(c)),
                );
            }
            op
        })
    }

    fn arb_fun(nvars: usize) -> impl Strategy<Value = Poly> {
        let term = (proptest::collection::vec(-1i16..3, nvars), -4i64..5);
        proptest::collection::vec(term, 0..4).prop_map(move |ts| {
            let mut p = Poly::zero(nvars);
            for (mut expo, c) in ts {
                for e in expo.iter_mut().skip(1) {
                    if *e < 0 {
                        *e = -*e;
                    }
                }
                p.add_term(Expo::from_vec(expo), rat_int(c));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn apply_compose_consistent(a in arb_op(3), b in arb_op(3), g in arb_fun(3)) {
            prop_assert_eq!(a.compose(&b).apply(&g), a.apply(&b.apply(&g)));
        }

        #[test]
        fn compose_associative(a in arb_op(3), b in arb_op(3), c in arb_op(3)) {
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }

        #[test]
        fn jacobi(a in arb_op(3), b in arb_op(3), c in arb_op(3)) {
            let lhs = a.commutator(&b.commutator(&c))
                .add(&b.commutator(&c.commutator(&a)))
                .add(&c.commutator(&a.commutator(&b)));
            prop_assert!(lhs.is_zero());
        }

        #[test]
        fn commutator_antisymmetric(a in arb_op(3), b in arb_op(3)) {
            prop_assert_eq!(a.commutator(&b), b.commutator(&a).neg());
        }
    }
}
