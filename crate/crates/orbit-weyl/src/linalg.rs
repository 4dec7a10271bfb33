//! Exact linear algebra over ℚ: rank, span tracking with payloads, and
//! positive-semidefiniteness certification by symmetric pivoting.

use crate::rat::Rat;
use num::{Signed, Zero};

/// Rank by fraction-preserving Gaussian elimination (destructive).
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = rows[r][col].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = &rows[i][col] / &inv;
                for c in col..ncols {
                    let delta = &factor * &rows[r][c];
                    rows[i][c] -= delta;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Payload carried through row reduction (an element of some ℚ-vector space).
pub trait Payload: Clone {
    fn sub_scaled(&self, other: &Self, c: &Rat) -> Self;
    fn scale(&self, c: &Rat) -> Self;
    fn is_zero_payload(&self) -> bool;
}

/// Row-echelon span tracker: each row is a coordinate vector tied to a
/// payload, and row operations apply to both in lockstep. Inserting a vector
/// already in the span reduces it to zero and returns the payload residual,
/// which must itself be zero when the assignment vector ↦ payload is linear.
pub struct TaggedSpan<T: Payload> {
    ncols: usize,
    rows: Vec<(Vec<Rat>, T)>,
    pivots: Vec<usize>,
}

pub enum Insert<T> {
    Extended,
    InSpan { residual: T },
}

impl<T: Payload> TaggedSpan<T> {
    pub fn new(ncols: usize) -> Self {
        TaggedSpan {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<Rat>, mut payload: T) -> (Vec<Rat>, T) {
        for (row_idx, &p) in self.pivots.iter().enumerate() {
            if !v[p].is_zero() {
                let c = v[p].clone();
                let (rv, rp) = &self.rows[row_idx];
                for j in 0..self.ncols {
                    let delta = &c * &rv[j];
                    v[j] -= delta;
                }
                payload = payload.sub_scaled(rp, &c);
            }
        }
        (v, payload)
    }

    pub fn insert(&mut self, v: Vec<Rat>, payload: T) -> Insert<T> {
        assert_eq!(v.len(), self.ncols);
        let (mut v, mut payload) = self.reduce(v, payload);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return Insert::InSpan { residual: payload };
        };
        // normalize so the pivot entry is 1
        let inv = v[pivot].clone();
        for x in v.iter_mut() {
            *x = &*x / &inv;
        }
        payload = payload.scale(&inv.recip());
        self.rows.push((v, payload));
        self.pivots.push(pivot);
        Insert::Extended
    }

    /// Express `v` in the span, returning the matching payload combination.
    pub fn solve(&self, v: Vec<Rat>) -> Option<T> {
        let mut combo: Option<T> = None;
        let mut v = v;
        for (row_idx, &p) in self.pivots.iter().enumerate() {
            if !v[p].is_zero() {
                let c = v[p].clone();
                let (rv, rp) = &self.rows[row_idx];
                for j in 0..self.ncols {
                    let delta = &c * &rv[j];
                    v[j] -= delta;
                }
                combo = Some(match combo {
                    None => rp.scale(&c),
                    Some(acc) => acc.sub_scaled(rp, &(-c)),
                });
            }
        }
        if v.iter().all(|x| x.is_zero()) {
            combo
        } else {
            None
        }
    }

    pub fn payloads(&self) -> impl Iterator<Item = &T> {
        self.rows.iter().map(|(_, p)| p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdReport {
    pub psd: bool,
    pub rank: usize,
    /// For an indefinite matrix, a rational vector v with vᵀ M v < 0.
    pub witness: Option<Vec<Rat>>,
}

/// Certify that a symmetric rational matrix is positive semidefinite by
/// diagonal-pivoted symmetric elimination. Exact: a matrix is PSD iff the
/// sweep never produces a negative diagonal entry and every zero-diagonal
/// active row is entirely zero.
pub fn psd_certify(mat: &[Vec<Rat>]) -> PsdReport {
    let n = mat.len();
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    // basis[i] expresses current row i in the original coordinates
    let mut basis: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut e = vec![Rat::zero(); n];
            e[i] = num::One::one();
            e
        })
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut rank = 0;

    loop {
        if let Some(&i) = active.iter().find(|&&i| m[i][i].is_negative()) {
            return PsdReport {
                psd: false,
                rank: 0,
                witness: Some(basis[i].clone()),
            };
        }
        let Some(pos) = active.iter().position(|&i| m[i][i].is_positive()) else {
            // all active diagonals vanish: PSD needs the active block to be zero
            for (ai, &i) in active.iter().enumerate() {
                for &j in active.iter().skip(ai + 1) {
                    if !m[i][j].is_zero() {
                        // (e_i + t e_j) with t = -sign picks up 2 t m_ij < 0
                        let t = if m[i][j].is_positive() {
                            -Rat::from_integer(1.into())
                        } else {
                            Rat::from_integer(1.into())
                        };
                        let w: Vec<Rat> = basis[i]
                            .iter()
                            .zip(basis[j].iter())
                            .map(|(a, b)| a + &t * b)
                            .collect();
                        return PsdReport {
                            psd: false,
                            rank: 0,
                            witness: Some(w),
                        };
                    }
                }
            }
            return PsdReport {
                psd: true,
                rank,
                witness: None,
            };
        };
        let piv = active.remove(pos);
        rank += 1;
        let d = m[piv][piv].clone();
        for &j in &active {
            if m[piv][j].is_zero() {
                continue;
            }
            let factor = &m[piv][j] / &d;
            // row_j -= factor * row_piv, applied symmetrically
            for k in 0..n {
                let delta = &factor * &m[piv][k];
                m[j][k] -= delta;
            }
            for k in 0..n {
                let delta = &factor * &m[k][piv];
                m[k][j] -= delta;
            }
            for k in 0..n {
                let delta = &factor * &basis[piv][k];
                basis[j][k] -= delta;
            }
        }
    }
}
