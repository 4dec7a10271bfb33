//! Rational models of sl(N,ℂ) and so(N,ℂ) with the structure needed on the
//! minimal nilpotent orbit: a fixed basis with exact structure constants,
//! the normalized invariant form with (x_psi, x0) = 1/2, the five-step
//! grading by ad h, the Cartan involution as a signed basis permutation,
//! and the distinguished triple (x_psi, h, x0) together with the 2m
//! coordinate pairs in degree -1.
//!
//! sl(N): trace-zero matrices; x_psi = E[0,n], x0 = E[n,0], h = E00 - Enn,
//! pairs x_p = E[p,0], x'_p = E[n,p] (p = 1..N-2), form (X,Y) = Tr(XY)/2.
//!
//! so(N): Λ²ℂ^N with hyperbolic basis v_1, v'_1, …, v_n, v'_n (plus an
//! extra unit vector for odd N); x0 = -(v_{n-1}∧v_n), x_psi = v'_{n-1}∧v'_n.
//! Degree -1 splits into plain pairs (v_i∧v_{n-1}, v'_i∧v_n), tilde pairs
//! (v_i∧v_n, -(v'_i∧v_{n-1})) and, for odd N, the extra pair
//! (v_0∧v_n, -(v_0∧v_{n-1})). This labeling makes every pair satisfy
//! [x'_j, x_k] = δ_jk x0 and (x_j|x_j) = 1/2, and it is the one under which
//! the quartic P below splits as P = a²/4 + bc.

use crate::poly::Poly;
use crate::rat::{rat, rat_int, Rat};
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sl,
    So,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Sl => write!(f, "sl"),
            Family::So => write!(f, "so"),
        }
    }
}

pub type AlgKey = (Family, usize);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("unsupported algebra {family}({n}): {reason}")]
    Unsupported {
        family: String,
        n: usize,
        reason: String,
    },
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("model self-check failed: {0}")]
    ModelCheck(String),
    #[error("(ad w)^4(x_psi) has a component outside the x0 line, on basis element {0}")]
    QuarticResidual(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElement {
    pub alg: AlgKey,
    pub coords: Vec<Rat>,
}

impl LieElement {
    pub fn zero(alg: AlgKey, dim: usize) -> Self {
        LieElement {
            alg,
            coords: vec![Rat::zero(); dim],
        }
    }

    pub fn basis(alg: AlgKey, dim: usize, idx: usize) -> Self {
        let mut e = LieElement::zero(alg, dim);
        e.coords[idx] = Rat::one();
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        assert_eq!(self.alg, other.alg);
        LieElement {
            alg: self.alg,
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> LieElement {
        LieElement {
            alg: self.alg,
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        self.add(&other.scale(&-Rat::one()))
    }
}

/// Pair indices into the degree -1 coordinate pairs, recording which unified
/// pairs came from the plain block, the tilde block, and the odd-N extra pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoGrouping {
    pub plain: Vec<usize>,
    pub tilde: Vec<usize>,
    pub tilde0: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub names: Vec<String>,
    bracket_table: Vec<Vec<Vec<(usize, Rat)>>>,
    killing_mat: Vec<Vec<Rat>>,
    pub grading: Vec<i8>,
    sigma_map: Vec<(usize, i8)>,
    pub x_psi: LieElement,
    pub h: LieElement,
    pub x0: LieElement,
    /// 2m+2 chart coordinate elements in chart-variable order:
    /// [x0, h, x_1, x'_1, …, x_m, x'_m].
    pub coord_elems: Vec<LieElement>,
    pub so_grouping: Option<SoGrouping>,
}

impl AlgebraSpec {
    pub fn key(&self) -> AlgKey {
        (self.family, self.n)
    }

    pub fn dim_orbit(&self) -> usize {
        2 * self.m + 2
    }

    pub fn basis_elem(&self, idx: usize) -> LieElement {
        LieElement::basis(self.key(), self.dim, idx)
    }

    fn check_key(&self, x: &LieElement) -> Result<(), LieError> {
        if x.alg != self.key() || x.coords.len() != self.dim {
            return Err(LieError::MixedAlgebras);
        }
        Ok(())
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement, LieError> {
        self.check_key(x)?;
        self.check_key(y)?;
        let mut out = LieElement::zero(self.key(), self.dim);
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.bracket_table[i][j] {
                    out.coords[*k] += &ab * c;
                }
            }
        }
        Ok(out)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Rat)] {
        &self.bracket_table[i][j]
    }

    pub fn killing(&self, x: &LieElement, y: &LieElement) -> Result<Rat, LieError> {
        self.check_key(x)?;
        self.check_key(y)?;
        let mut acc = Rat::zero();
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc += a * b * &self.killing_mat[i][j];
            }
        }
        Ok(acc)
    }

    /// The Cartan involution, extended ℚ-linearly over the rational basis.
    pub fn sigma(&self, x: &LieElement) -> Result<LieElement, LieError> {
        self.check_key(x)?;
        let mut out = LieElement::zero(self.key(), self.dim);
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (j, s) = self.sigma_map[i];
            out.coords[j] += a * rat_int(s.into());
        }
        Ok(out)
    }

    pub fn sigma_basis(&self, i: usize) -> (usize, i8) {
        self.sigma_map[i]
    }

    /// Basis indices of the Heisenberg part g_{-1} ⊕ g_{-2} (2m+1 elements).
    pub fn g_neg_indices(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.grading[i] < 0).collect()
    }

    /// A few grading-0 basis elements orthogonal to h (spot-check material).
    pub fn g0_orth_h_samples(&self, count: usize) -> Vec<LieElement> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            if self.grading[i] != 0 {
                continue;
            }
            let e = self.basis_elem(i);
            if self.killing(&e, &self.h).unwrap().is_zero() && e.sub(&self.h.scale(&Rat::zero())) != self.h {
                out.push(e);
                if out.len() == count {
                    break;
                }
            }
        }
        out
    }

    /// Rank of y ↦ [y, x_psi]; equals the orbit dimension 2m+2.
    pub fn tangent_dim(&self) -> usize {
        let rows: Vec<Vec<Rat>> = (0..self.dim)
            .map(|j| {
                self.bracket(&self.basis_elem(j), &self.x_psi)
                    .unwrap()
                    .coords
            })
            .collect();
        crate::linalg::rank(rows)
    }
}

pub fn build_algebra(family: Family, n: usize) -> Result<AlgebraSpec, LieError> {
    let spec = match family {
        Family::Sl => {
            if n < 3 {
                return Err(LieError::Unsupported {
                    family: "sl".into(),
                    n,
                    reason: "need N >= 3 (the N = 2 orbit has an even Weyl algebra of operators)"
                        .into(),
                });
            }
            build_sl(n)
        }
        Family::So => {
            if n < 6 {
                return Err(LieError::Unsupported {
                    family: "so".into(),
                    n,
                    reason: "need N >= 6 (lower ranks are not simple or coincide with excluded types)"
                        .into(),
                });
            }
            build_so(n)
        }
    };
    verify_model(&spec)?;
    Ok(spec)
}

// ---------------------------------------------------------------------------
// sl(N)
// ---------------------------------------------------------------------------

fn build_sl(nn: usize) -> AlgebraSpec {
    let n = nn - 1; // matrix indices 0..=n
    let m = n - 1;
    let dim = nn * nn - 1;
    let key = (Family::Sl, nn);

    // basis: H_0..H_{n-1}, then E[i,j] for i != j (row-major)
    let mut names = Vec::with_capacity(dim);
    let mut offdiag = Vec::new();
    for i in 0..n {
        names.push(format!("H{i}"));
    }
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                names.push(format!("E[{i},{j}]"));
                offdiag.push((i, j));
            }
        }
    }
    let eidx = |i: usize, j: usize| -> usize {
        n + offdiag.iter().position(|&p| p == (i, j)).unwrap()
    };

    // dense matrix form of each basis element
    let to_matrix = |idx: usize| -> Vec<Vec<Rat>> {
        let mut mat = vec![vec![Rat::zero(); nn]; nn];
        if idx < n {
            mat[idx][idx] = Rat::one();
            mat[idx + 1][idx + 1] = -Rat::one();
        } else {
            let (i, j) = offdiag[idx - n];
            mat[i][j] = Rat::one();
        }
        mat
    };
    let matrices: Vec<Vec<Vec<Rat>>> = (0..dim).map(to_matrix).collect();

    // decompose a trace-zero matrix over the basis
    let decompose = |mat: &[Vec<Rat>]| -> Vec<Rat> {
        let mut coords = vec![Rat::zero(); dim];
        let mut partial = Rat::zero();
        for i in 0..n {
            partial += &mat[i][i];
            coords[i] = partial.clone();
        }
        for (k, &(i, j)) in offdiag.iter().enumerate() {
            coords[n + k] = mat[i][j].clone();
        }
        coords
    };

    let mat_mul = |a: &[Vec<Rat>], b: &[Vec<Rat>]| -> Vec<Vec<Rat>> {
        let mut out = vec![vec![Rat::zero(); nn]; nn];
        for i in 0..nn {
            for k in 0..nn {
                if a[i][k].is_zero() {
                    continue;
                }
                for j in 0..nn {
                    if !b[k][j].is_zero() {
                        out[i][j] += &a[i][k] * &b[k][j];
                    }
                }
            }
        }
        out
    };

    let mut bracket_table = vec![vec![Vec::new(); dim]; dim];
    let mut killing_mat = vec![vec![Rat::zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let ab = mat_mul(&matrices[i], &matrices[j]);
            let ba = mat_mul(&matrices[j], &matrices[i]);
            let mut comm = ab.clone();
            for r in 0..nn {
                for c in 0..nn {
                    comm[r][c] -= &ba[r][c];
                }
            }
            let coords = decompose(&comm);
            bracket_table[i][j] = coords
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            // (X, Y) = Tr(XY)/2
            let mut tr = Rat::zero();
            for r in 0..nn {
                tr += &ab[r][r];
            }
            killing_mat[i][j] = tr * rat(1, 2);
        }
    }

    // grading by ad(E00 - Enn)
    let mut grading = vec![0i8; dim];
    for (k, &(i, j)) in offdiag.iter().enumerate() {
        let wt = |p: usize| -> i8 {
            if p == 0 {
                1
            } else if p == n {
                -1
            } else {
                0
            }
        };
        grading[n + k] = wt(i) - wt(j);
    }

    // sigma(X) = -X^T on the rational basis
    let mut sigma_map: Vec<(usize, i8)> = (0..n).map(|i| (i, -1)).collect();
    for &(i, j) in &offdiag {
        sigma_map.push((eidx(j, i), -1));
    }

    let unit = |idx: usize| LieElement::basis(key, dim, idx);
    let x_psi = unit(eidx(0, n));
    let x0 = unit(eidx(n, 0));
    let mut h = LieElement::zero(key, dim);
    for i in 0..n {
        h.coords[i] = Rat::one();
    }

    let mut coord_elems = vec![x0.clone(), h.clone()];
    for p in 1..=m {
        coord_elems.push(unit(eidx(p, 0))); // x_p
        coord_elems.push(unit(eidx(n, p))); // x'_p
    }

    AlgebraSpec {
        family: Family::Sl,
        n: nn,
        m,
        dim,
        names,
        bracket_table,
        killing_mat,
        grading,
        sigma_map,
        x_psi,
        h,
        x0,
        coord_elems,
        so_grouping: None,
    }
}

// ---------------------------------------------------------------------------
// so(N) as Λ²ℂ^N
// ---------------------------------------------------------------------------

fn build_so(nn: usize) -> AlgebraSpec {
    let n = nn / 2;
    let odd = nn % 2 == 1;
    let m = nn - 4;
    let dim = nn * (nn - 1) / 2;
    let key = (Family::So, nn);

    // vector index map: 2i -> v_{i+1}, 2i+1 -> v'_{i+1}, last (odd) -> v_0
    let vname = |a: usize| -> String {
        if odd && a == 2 * n {
            "v0".to_string()
        } else if a % 2 == 0 {
            format!("v{}", a / 2 + 1)
        } else {
            format!("vp{}", a / 2 + 1)
        }
    };
    let dot = |a: usize, b: usize| -> Rat {
        if odd && a == 2 * n && b == 2 * n {
            Rat::one()
        } else if a / 2 == b / 2 && a != b && a.max(b) < 2 * n {
            Rat::one()
        } else {
            Rat::zero()
        }
    };

    let mut pairs = Vec::with_capacity(dim);
    let mut names = Vec::with_capacity(dim);
    for a in 0..nn {
        for b in (a + 1)..nn {
            pairs.push((a, b));
            names.push(format!("{}^{}", vname(a), vname(b)));
        }
    }
    let pair_idx = |a: usize, b: usize| -> (usize, i8) {
        // signed position of e_a ∧ e_b in the sorted basis
        if a < b {
            (pairs.iter().position(|&p| p == (a, b)).unwrap(), 1)
        } else {
            (pairs.iter().position(|&p| p == (b, a)).unwrap(), -1)
        }
    };

    // [a∧b, c∧d] = (a.c) b∧d + (b.d) a∧c - (a.d) b∧c - (b.c) a∧d
    let mut bracket_table = vec![vec![Vec::new(); dim]; dim];
    let mut killing_mat = vec![vec![Rat::zero(); dim]; dim];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate() {
            let mut coords: Vec<Rat> = vec![Rat::zero(); dim];
            let mut put = |x: usize, y: usize, coef: Rat| {
                if x == y || coef.is_zero() {
                    return;
                }
                let (idx, s) = pair_idx(x, y);
                coords[idx] += coef * rat_int(s.into());
            };
            put(b, d, dot(a, c));
            put(a, c, dot(b, d));
            put(b, c, -dot(a, d));
            put(a, d, -dot(b, c));
            bracket_table[i][j] = coords
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            // normalized invariant form with (x_psi, x0) = 1/2
            killing_mat[i][j] = (dot(a, d) * dot(b, c) - dot(a, c) * dot(b, d)) * rat(1, 2);
        }
    }

    // grading: v_{n-1}, v_n carry weight -1; v'_{n-1}, v'_n weight +1
    let vweight = |a: usize| -> i8 {
        let i = a / 2;
        if a < 2 * n && (i == n - 2 || i == n - 1) {
            if a % 2 == 0 {
                -1
            } else {
                1
            }
        } else {
            0
        }
    };
    let grading: Vec<i8> = pairs.iter().map(|&(a, b)| vweight(a) + vweight(b)).collect();

    // sigma: v_i <-> v'_i, v_0 fixed
    let vsigma = |a: usize| -> usize {
        if odd && a == 2 * n {
            a
        } else if a % 2 == 0 {
            a + 1
        } else {
            a - 1
        }
    };
    let sigma_map: Vec<(usize, i8)> = pairs
        .iter()
        .map(|&(a, b)| {
            let (idx, s) = pair_idx(vsigma(a), vsigma(b));
            (idx, s)
        })
        .collect();

    // distinguished elements; vector indices of v_{n-1}, v_n, v'_{n-1}, v'_n
    let vn1 = 2 * (n - 2);
    let vn = 2 * (n - 1);
    let vpn1 = vn1 + 1;
    let vpn = vn + 1;

    let signed_elem = |a: usize, b: usize, coef: Rat| -> LieElement {
        let mut e = LieElement::zero(key, dim);
        let (idx, s) = pair_idx(a, b);
        e.coords[idx] = coef * rat_int(s.into());
        e
    };

    let x_psi = signed_elem(vpn1, vpn, Rat::one());
    let x0 = signed_elem(vn1, vn, -Rat::one());
    let h = signed_elem(vn1, vpn1, Rat::one()).add(&signed_elem(vn, vpn, Rat::one()));

    // coordinate pairs: plain (v_i∧v_{n-1}, v'_i∧v_n), then for odd N the
    // extra pair (v_0∧v_n, -(v_0∧v_{n-1})), then tilde (v_i∧v_n, -(v'_i∧v_{n-1}))
    let mut coord_elems = vec![x0.clone(), h.clone()];
    let mut plain = Vec::new();
    let mut tilde = Vec::new();
    let mut tilde0 = None;
    let mut pair_no = 0;
    for i in 0..(n - 2) {
        let vi = 2 * i;
        let vpi = 2 * i + 1;
        coord_elems.push(signed_elem(vi, vn1, Rat::one()));
        coord_elems.push(signed_elem(vpi, vn, Rat::one()));
        pair_no += 1;
        plain.push(pair_no);
    }
    if odd {
        let v0 = 2 * n;
        coord_elems.push(signed_elem(v0, vn, Rat::one()));
        coord_elems.push(signed_elem(v0, vn1, -Rat::one()));
        pair_no += 1;
        tilde0 = Some(pair_no);
    }
    for i in 0..(n - 2) {
        let vi = 2 * i;
        let vpi = 2 * i + 1;
        coord_elems.push(signed_elem(vi, vn, Rat::one()));
        coord_elems.push(signed_elem(vpi, vn1, -Rat::one()));
        pair_no += 1;
        tilde.push(pair_no);
    }
    debug_assert_eq!(pair_no, m);

    AlgebraSpec {
        family: Family::So,
        n: nn,
        m,
        dim,
        names,
        bracket_table,
        killing_mat,
        grading,
        sigma_map,
        x_psi,
        h,
        x0,
        coord_elems,
        so_grouping: Some(SoGrouping {
            plain,
            tilde,
            tilde0,
        }),
    }
}

/// Build-time sanity: the triple, the normalization, and the coordinate-pair
/// relations the whole chart construction rests on.
fn verify_model(spec: &AlgebraSpec) -> Result<(), LieError> {
    let fail = |msg: String| Err(LieError::ModelCheck(msg));
    let br = |x: &LieElement, y: &LieElement| spec.bracket(x, y).unwrap();

    if br(&spec.h, &spec.x_psi) != spec.x_psi.scale(&rat_int(2)) {
        return fail("[h, x_psi] != 2 x_psi".into());
    }
    if br(&spec.h, &spec.x0) != spec.x0.scale(&rat_int(-2)) {
        return fail("[h, x0] != -2 x0".into());
    }
    if br(&spec.x_psi, &spec.x0) != spec.h {
        return fail("[x_psi, x0] != h".into());
    }
    if spec.killing(&spec.x_psi, &spec.x0).unwrap() != rat(1, 2) {
        return fail("(x_psi, x0) != 1/2".into());
    }
    if spec.sigma(&spec.x_psi).unwrap() != spec.x0.scale(&-Rat::one()) {
        return fail("sigma(x_psi) != -x0".into());
    }
    for j in 1..=spec.m {
        for k in 1..=spec.m {
            let xj_p = &spec.coord_elems[2 * j + 1];
            let xk = &spec.coord_elems[2 * k];
            let expect = if j == k {
                spec.x0.clone()
            } else {
                LieElement::zero(spec.key(), spec.dim)
            };
            if br(xj_p, xk) != expect {
                return fail(format!("[x'_{j}, x_{k}] != {} x0", usize::from(j == k)));
            }
            if !br(&spec.coord_elems[2 * j], xk).is_zero() {
                return fail(format!("[x_{j}, x_{k}] != 0"));
            }
            if !br(xj_p, &spec.coord_elems[2 * k + 1]).is_zero() {
                return fail(format!("[x'_{j}, x'_{k}] != 0"));
            }
        }
        // hermitian normalization (x|x) = -(x, sigma x) = 1/2 on each pair element
        for elem in [&spec.coord_elems[2 * j], &spec.coord_elems[2 * j + 1]] {
            let s = spec.sigma(elem).unwrap();
            if -spec.killing(elem, &s).unwrap() != rat(1, 2) {
                return fail(format!("(x|x) != 1/2 on pair {j}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The quartic P: (1/24) (ad w)^4 (x_psi) = P(w) x0
// ---------------------------------------------------------------------------

/// w-variable layout: pair j (1-based) owns variables 2(j-1) (w_j) and
/// 2(j-1)+1 (w'_j), mirroring the chart variable order without the 0-pair.
pub fn w_var(j: usize, primed: bool) -> usize {
    2 * (j - 1) + usize::from(primed)
}

pub fn w_names(m: usize) -> Vec<String> {
    let mut v = Vec::with_capacity(2 * m);
    for j in 1..=m {
        v.push(format!("w{j}"));
        v.push(format!("wp{j}"));
    }
    v
}

/// Compute P by four exact symbolic bracket applications.
pub fn compute_p(spec: &AlgebraSpec) -> Result<Poly, LieError> {
    let wv = 2 * spec.m;
    // coordinates of w = Σ_j (w_j x_j + w'_j x'_j) as polynomials
    let mut w_coords = vec![Poly::zero(wv); spec.dim];
    for j in 1..=spec.m {
        for (primed, elem) in [(false, &spec.coord_elems[2 * j]), (true, &spec.coord_elems[2 * j + 1])] {
            let var = Poly::var(wv, w_var(j, primed));
            for (idx, c) in elem.coords.iter().enumerate() {
                if !c.is_zero() {
                    w_coords[idx] = w_coords[idx].add(&var.scale(c));
                }
            }
        }
    }

    let mut cur: Vec<Poly> = spec
        .x_psi
        .coords
        .iter()
        .map(|c| Poly::constant(wv, c.clone()))
        .collect();
    for _ in 0..4 {
        let mut next = vec![Poly::zero(wv); spec.dim];
        for (i, a) in w_coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in cur.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a.mul(b);
                for (k, c) in &spec.bracket_table[i][j] {
                    next[*k] = next[*k].add(&ab.scale(c));
                }
            }
        }
        cur = next;
    }

    // cur must be (24 P) x0 exactly
    let idx0 = spec
        .x0
        .coords
        .iter()
        .position(|c| !c.is_zero())
        .expect("x0 is nonzero");
    let c0 = &spec.x0.coords[idx0];
    let p = cur[idx0].scale(&(rat(1, 24) / c0));
    for (k, comp) in cur.iter().enumerate() {
        if k != idx0 && !comp.is_zero() {
            return Err(LieError::QuarticResidual(spec.names[k].clone()));
        }
    }
    Ok(p)
}

/// The closed form of P: (Σ w_j w'_j)²/4 for sl; a²/4 + bc for so, where
/// a = Σ_plain w w' - Σ_tilde w w' - w_t0 w'_t0,
/// b = Σ_i w'_plain(i) w_tilde(i) + w_t0²/2,
/// c = Σ_i w_plain(i) w'_tilde(i) - (w'_t0)²/2.
pub fn closed_form_p(spec: &AlgebraSpec) -> Poly {
    let wv = 2 * spec.m;
    let v = |j: usize, primed: bool| Poly::var(wv, w_var(j, primed));
    match spec.family {
        Family::Sl => {
            let mut s = Poly::zero(wv);
            for j in 1..=spec.m {
                s = s.add(&v(j, false).mul(&v(j, true)));
            }
            s.mul(&s).scale(&rat(1, 4))
        }
        Family::So => {
            let g = spec.so_grouping.as_ref().unwrap();
            let mut a = Poly::zero(wv);
            for &j in &g.plain {
                a = a.add(&v(j, false).mul(&v(j, true)));
            }
            for &j in &g.tilde {
                a = a.sub(&v(j, false).mul(&v(j, true)));
            }
            if let Some(j) = g.tilde0 {
                a = a.sub(&v(j, false).mul(&v(j, true)));
            }
            let mut b = Poly::zero(wv);
            let mut c = Poly::zero(wv);
            for (&p, &t) in g.plain.iter().zip(g.tilde.iter()) {
                b = b.add(&v(p, true).mul(&v(t, false)));
                c = c.add(&v(p, false).mul(&v(t, true)));
            }
            if let Some(j) = g.tilde0 {
                b = b.add(&v(j, false).mul(&v(j, false)).scale(&rat(1, 2)));
                c = c.sub(&v(j, true).mul(&v(j, true)).scale(&rat(1, 2)));
            }
            a.mul(&a).scale(&rat(1, 4)).add(&b.mul(&c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_ranks() {
        let sl3 = build_algebra(Family::Sl, 3).unwrap();
        assert_eq!(sl3.dim, 8);
        assert_eq!(sl3.m, 1);
        assert_eq!(sl3.dim_orbit(), 4);
        assert_eq!(sl3.tangent_dim(), 4);

        let so6 = build_algebra(Family::So, 6).unwrap();
        assert_eq!(so6.dim, 15);
        assert_eq!(so6.m, 2);
        assert_eq!(so6.dim_orbit(), 6);
        assert_eq!(so6.tangent_dim(), 6);

        let so7 = build_algebra(Family::So, 7).unwrap();
        assert_eq!(so7.m, 3);

        let so8 = build_algebra(Family::So, 8).unwrap();
        assert_eq!(so8.tangent_dim(), 10);
    }

    #[test]
    fn rejects_low_rank() {
        assert!(build_algebra(Family::Sl, 2).is_err());
        assert!(build_algebra(Family::So, 5).is_err());
    }

    #[test]
    fn triple_and_involution() {
        for spec in [
            build_algebra(Family::Sl, 4).unwrap(),
            build_algebra(Family::So, 7).unwrap(),
        ] {
            // [x'_1, x_1] = x0
            let x1p = &spec.coord_elems[3];
            let x1 = &spec.coord_elems[2];
            assert_eq!(spec.bracket(x1p, x1).unwrap(), spec.x0);
            assert_eq!(spec.killing(&spec.x0, &spec.x_psi).unwrap(), rat(1, 2));
            assert_eq!(
                spec.sigma(&spec.x_psi).unwrap(),
                spec.x0.scale(&rat_int(-1))
            );
            // sigma is an involution
            for i in 0..spec.dim {
                let e = spec.basis_elem(i);
                let s2 = spec.sigma(&spec.sigma(&e).unwrap()).unwrap();
                assert_eq!(s2, e);
            }
        }
    }

    #[test]
    fn mixed_algebra_rejected() {
        let sl3 = build_algebra(Family::Sl, 3).unwrap();
        let sl4 = build_algebra(Family::Sl, 4).unwrap();
        let x = sl4.basis_elem(0);
        assert_eq!(
            sl3.bracket(&sl3.basis_elem(0), &x),
            Err(LieError::MixedAlgebras)
        );
    }

    #[test]
    fn jacobi_sweep_small() {
        for spec in [
            build_algebra(Family::Sl, 3).unwrap(),
            build_algebra(Family::So, 6).unwrap(),
        ] {
            for i in 0..spec.dim {
                for j in (i + 1)..spec.dim {
                    for k in (j + 1)..spec.dim {
                        let a = spec.basis_elem(i);
                        let b = spec.basis_elem(j);
                        let c = spec.basis_elem(k);
                        let s = spec
                            .bracket(&a, &spec.bracket(&b, &c).unwrap())
                            .unwrap()
                            .add(&spec.bracket(&b, &spec.bracket(&c, &a).unwrap()).unwrap())
                            .add(&spec.bracket(&c, &spec.bracket(&a, &b).unwrap()).unwrap());
                        assert!(s.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn p_closed_forms() {
        for (family, n) in [
            (Family::Sl, 3),
            (Family::Sl, 4),
            (Family::Sl, 5),
            (Family::So, 6),
            (Family::So, 7),
            (Family::So, 8),
        ] {
            let spec = build_algebra(family, n).unwrap();
            let p = compute_p(&spec).unwrap();
            assert_eq!(p, closed_form_p(&spec), "P mismatch for {family}({n})");
            // P(0) = 0
            let zeros = vec![Rat::zero(); 2 * spec.m];
            assert!(p.eval(&zeros).unwrap().is_zero());
        }
    }
}
