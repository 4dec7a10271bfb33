//! Sparse multivariate Laurent polynomials over ℚ.
//!
//! One representation serves three rings:
//!   * the localized chart ring ℚ[f0^{±1}, fp0, f1, fp1, …] (variable 0 is
//!     the only one allowed a negative exponent),
//!   * cotangent-fiber symbols in the chart variables plus xi0, xip0, …,
//!   * auxiliary polynomial rings (the quartic in the w variables).
//!
//! Terms live in a `BTreeMap` keyed by the exponent vector, so every value
//! has exactly one canonical form: no zero coefficients, lexicographic
//! monomial order. Equality of normal forms is equality in the ring.

use crate::rat::{fmt_rat, Rat};
use num::{One, Signed, Zero};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use thiserror::Error;

/// Exponent vector; entry 0 may be negative (localization at f0).
pub type Expo = SmallVec<[i16; 12]>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("evaluation point assigns 0 to variable {0}, which occurs with a negative exponent")]
    ZeroAtPole(usize),
    #[error("evaluation point has {got} coordinates, polynomial has {want} variables")]
    BadPoint { want: usize, got: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Expo, Rat>,
}

pub fn zero_expo(nvars: usize) -> Expo {
    SmallVec::from_elem(0, nvars)
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(zero_expo(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::var_pow(nvars, i, 1)
    }

    pub fn var_pow(nvars: usize, i: usize, e: i16) -> Self {
        assert!(i < nvars);
        let mut m = zero_expo(nvars);
        m[i] = e;
        Poly::monomial(m, Rat::one())
    }

    pub fn monomial(expo: Expo, coef: Rat) -> Self {
        let nvars = expo.len();
        let mut p = Poly::zero(nvars);
        p.add_term(expo, coef);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, expo: &Expo) -> Rat {
        self.terms.get(expo).cloned().unwrap_or_else(Rat::zero)
    }

    /// The scalar value if the polynomial is a constant, else `None`.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add_term(&mut self, expo: Expo, coef: Rat) {
        debug_assert_eq!(expo.len(), self.nvars);
        debug_assert!(expo.iter().skip(1).all(|&e| e >= 0), "only variable 0 is localized");
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(expo) {
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

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (m, k) in &self.terms {
            out.terms.insert(m.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                let mut m: Expo = m1.clone();
                for (a, b) in m.iter_mut().zip(m2.iter()) {
                    *a += *b;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Multiply by a single monomial (cheap remap of every key).
    pub fn mul_monomial(&self, expo: &Expo, coef: &Rat) -> Poly {
        assert_eq!(expo.len(), self.nvars);
        if coef.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut k: Expo = m.clone();
            for (a, b) in k.iter_mut().zip(expo.iter()) {
                *a += *b;
            }
            out.terms.insert(k, c * coef);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative in variable `var` (Laurent rule on var 0).
    pub fn partial(&self, var: usize) -> Poly {
        assert!(var < self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[var];
            if e == 0 {
                continue;
            }
            let mut k = m.clone();
            k[var] = e - 1;
            out.add_term(k, c * Rat::from_integer(e.into()));
        }
        out
    }

    /// Iterated partial derivative by a multi-index.
    pub fn partial_multi(&self, alpha: &Expo) -> Poly {
        let mut cur = self.clone();
        for (var, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                if cur.is_zero() {
                    return cur;
                }
                cur = cur.partial(var);
            }
        }
        cur
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::BadPoint {
                want: self.nvars,
                got: point.len(),
            });
        }
        for (m, _) in &self.terms {
            for (i, &e) in m.iter().enumerate() {
                if e < 0 && point[i].is_zero() {
                    return Err(PolyError::ZeroAtPole(i));
                }
            }
        }
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e != 0 {
                    t *= pow_rat(&point[i], e.into());
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn weighted_degree_of(mono: &Expo, weights: &[i64]) -> i64 {
        mono.iter()
            .zip(weights.iter())
            .map(|(&e, &w)| i64::from(e) * w)
            .sum()
    }

    /// Split into weight-homogeneous components; the components sum to `self`.
    pub fn grade_split(&self, weights: &[i64]) -> BTreeMap<i64, Poly> {
        assert_eq!(weights.len(), self.nvars);
        let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = Poly::weighted_degree_of(m, weights);
            out.entry(d)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Degree if homogeneous for the given weights; `None` if mixed.
    /// The zero polynomial is homogeneous of every degree (reported as 0).
    pub fn homogeneous_degree(&self, weights: &[i64]) -> Option<i64> {
        let mut deg = None;
        for (m, _) in &self.terms {
            let d = Poly::weighted_degree_of(m, weights);
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// `Some(c)` when `self == c * other` with `other != 0`.
    pub fn try_scalar_ratio(&self, other: &Poly) -> Option<Rat> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Rat::zero());
        }
        let (m0, c0) = other.terms.iter().next().unwrap();
        let c = self.terms.get(m0)? / c0;
        if self == &other.scale(&c) {
            Some(c)
        } else {
            None
        }
    }

    /// Substitute `args[i]` for variable `i`. All exponents must be ≥ 0.
    pub fn substitute(&self, args: &[Poly]) -> Poly {
        assert_eq!(args.len(), self.nvars);
        let target_nvars = if args.is_empty() { 0 } else { args[0].nvars };
        // per-variable power cache
        let mut cache: Vec<Vec<Poly>> = args
            .iter()
            .map(|a| vec![Poly::one(a.nvars()), a.clone()])
            .collect();
        let mut acc = Poly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target_nvars, c.clone());
            for (i, &e) in m.iter().enumerate() {
                assert!(e >= 0, "substitute requires non-negative exponents");
                let e = e as usize;
                while cache[i].len() <= e {
                    let next = cache[i].last().unwrap().mul(&args[i]);
                    cache[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&cache[i][e]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Re-embed into a ring with more variables (same indices, zero padding).
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars);
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut k = zero_expo(nvars);
            k[..m.len()].copy_from_slice(m);
            out.terms.insert(k, c.clone());
        }
        out
    }

    /// Deterministic text form: canonical monomial order, reduced rational
    /// coefficients, caret exponents.
    pub fn to_text(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term_text(&c.abs(), m, names));
        }
        out
    }
}

fn pow_rat(base: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

fn term_text(coef_abs: &Rat, mono: &Expo, names: &[String]) -> String {
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in mono.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            factors.push(names[i].clone());
        } else {
            factors.push(format!("{}^{}", names[i], e));
        }
    }
    let coef_txt = if coef_abs.denom().is_one() {
        fmt_rat(coef_abs)
    } else {
        format!("({})", fmt_rat(coef_abs))
    };
    if factors.is_empty() {
        coef_txt
    } else if coef_abs.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", coef_txt, factors.join("*"))
    }
}

/// Variable naming and weights for the localized chart ring
/// ℚ[f0^{±1}, fp0, f1, fp1, …, fm, fpm].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartVars {
    pub m: usize,
}

impl ChartVars {
    pub fn new(m: usize) -> Self {
        ChartVars { m }
    }

    pub fn nvars(&self) -> usize {
        2 * self.m + 2
    }

    /// Index of f_i (i = 0 is f0).
    pub fn f(&self, i: usize) -> usize {
        debug_assert!(i <= self.m);
        2 * i
    }

    /// Index of fp_i (i = 0 is fp0).
    pub fn fp(&self, i: usize) -> usize {
        debug_assert!(i <= self.m);
        2 * i + 1
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::with_capacity(self.nvars());
        for i in 0..=self.m {
            v.push(format!("f{i}"));
            v.push(format!("fp{i}"));
        }
        v
    }

    /// Euler weights: every chart variable scales with degree 1.
    pub fn euler_weights(&self) -> Vec<i64> {
        vec![1; self.nvars()]
    }

    /// Weights of the Cartan field: f0 ↦ −2f0, fp0 ↦ 0, f_i, fp_i ↦ −1.
    pub fn h_weights(&self) -> Vec<i64> {
        let mut w = vec![-1; self.nvars()];
        w[0] = -2;
        w[1] = 0;
        w
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.nvars())
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.nvars())
    }

    pub fn var(&self, idx: usize) -> Poly {
        Poly::var(self.nvars(), idx)
    }

    /// f0^k for any integer k (the localization unit).
    pub fn f0_pow(&self, k: i16) -> Poly {
        Poly::var_pow(self.nvars(), 0, k)
    }
}
