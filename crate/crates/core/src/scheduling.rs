//! Greedy semi-orthogonal user selection for one satellite, and the
//! interference-aware joint allocation of a common pool to two satellites.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::precoding::zf_directions;

/// Candidates whose orthogonal component is below this fraction of their
/// channel norm would make the selected set numerically singular.
const ORTHOGONAL_FLOOR: f64 = 1e-6;

/// Users served by each satellite, in selection order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Allocation {
    pub sat1_users: Vec<usize>,
    pub sat2_users: Vec<usize>,
}

impl Allocation {
    pub fn users(&self, s: usize) -> &[usize] {
        if s == 0 {
            &self.sat1_users
        } else {
            &self.sat2_users
        }
    }

    /// Disjointness and cardinality check.
    pub fn is_valid(&self, k1: usize, k2: usize) -> bool {
        let mut seen: Vec<usize> = self.sat1_users.iter().chain(&self.sat2_users).copied().collect();
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == total && self.sat1_users.len() <= k1 && self.sat2_users.len() <= k2
    }

    pub fn swapped(&self) -> Self {
        Self {
            sat1_users: self.sat2_users.clone(),
            sat2_users: self.sat1_users.clone(),
        }
    }
}

/// Orthonormal basis of the span of the selected channels, kept by Gram-Schmidt.
#[derive(Debug, Clone, Default)]
struct Span {
    basis: Vec<Vec<C64>>,
}

impl Span {
    /// Component of `h` orthogonal to the span (two Gram-Schmidt passes).
    fn orthogonal(&self, h: &[C64]) -> Vec<C64> {
        let mut g = h.to_vec();
        for _ in 0..2 {
            for q in &self.basis {
                let c = linalg::inner(&g, q);
                for (gk, qk) in g.iter_mut().zip(q) {
                    *gk -= c * qk;
                }
            }
        }
        g
    }

    /// Largest normalized correlation of `h` with the basis vectors.
    fn correlated(&self, h: &[C64], alpha: f64) -> bool {
        let nh = libm::sqrt(linalg::norm_sqr(h));
        self.basis.iter().any(|q| linalg::inner(h, q).norm() > alpha * nh)
    }

    fn push(&mut self, g: Vec<C64>) {
        let n = libm::sqrt(linalg::norm_sqr(&g));
        self.basis.push(g.into_iter().map(|x| x / n).collect());
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", "must lie strictly between 0 and 1"))
    }
}

fn rows(h: &CMatrix) -> Vec<Vec<C64>> {
    (0..h.nrows()).map(|i| linalg::row(h, i)).collect()
}

/// Greedy SUS: repeatedly take the candidate with the largest component
/// orthogonal to the selected channels, then drop candidates whose normalized
/// correlation with that component exceeds `alpha`. Ties go to the lowest index.
pub fn sus_select(h_pool: &CMatrix, alpha: f64, max_users: usize) -> Result<Vec<usize>> {
    check_alpha(alpha)?;
    if h_pool.nrows() == 0 {
        return Err(Error::EmptyPool);
    }
    if max_users > h_pool.ncols() {
        return Err(invalid("max_users", "cannot exceed the number of beams"));
    }
    let h = rows(h_pool);
    let mut pool: Vec<usize> = (0..h.len()).filter(|&i| linalg::norm_sqr(&h[i]) > 0.0).collect();
    let mut span = Span::default();
    let mut selected = Vec::new();
    while selected.len() < max_users {
        let mut best: Option<(usize, f64, Vec<C64>)> = None;
        pool.retain(|&u| {
            let g = span.orthogonal(&h[u]);
            let ng = linalg::norm_sqr(&g);
            if ng <= ORTHOGONAL_FLOOR * ORTHOGONAL_FLOOR * linalg::norm_sqr(&h[u]) {
                return false;
            }
            if best.as_ref().is_none_or(|(_, b, _)| ng > *b) {
                best = Some((u, ng, g));
            }
            true
        });
        let Some((u, _, g)) = best else { break };
        selected.push(u);
        span.push(g);
        pool.retain(|&j| j != u && !span.correlated(&h[j], alpha));
    }
    Ok(selected)
}

/// Parameters of the joint allocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiuaParams {
    /// Semi-orthogonality threshold in (0, 1).
    pub alpha: f64,
    /// Weight of the inter-satellite interference penalty.
    pub lambda_interf: f64,
}

impl Default for SiuaParams {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            lambda_interf: 100.0,
        }
    }
}

struct Side {
    h: Vec<Vec<C64>>,
    h_mat: CMatrix,
    cap: usize,
    span: Span,
    set: Vec<usize>,
    pool: Vec<bool>,
    done: bool,
}

impl Side {
    fn new(h: &CMatrix, cap: usize) -> Self {
        let rows = rows(h);
        let pool = rows.iter().map(|r| linalg::norm_sqr(r) > 0.0).collect();
        Self {
            h: rows,
            h_mat: h.clone(),
            cap,
            span: Span::default(),
            set: Vec::new(),
            pool,
            done: cap == 0,
        }
    }
}

/// Best admissible candidate of `me` given the partner's state:
/// `score = |g_u|^2 - lambda (I_received + I_induced)`, admitted only when positive.
fn best_candidate(
    me: &mut Side,
    other: &Side,
    taken: &[bool],
    params: &SiuaParams,
) -> Result<Option<(usize, f64, Vec<C64>)>> {
    let partner_w = if other.set.is_empty() {
        None
    } else {
        Some(zf_directions(&linalg::select_rows(&other.h_mat, &other.set))?)
    };
    let mut best: Option<(usize, f64, Vec<C64>)> = None;
    for (u, h) in me.h.iter().enumerate() {
        if !me.pool[u] || taken[u] {
            continue;
        }
        let g = me.span.orthogonal(h);
        let ng = linalg::norm_sqr(&g);
        if ng <= ORTHOGONAL_FLOOR * ORTHOGONAL_FLOOR * linalg::norm_sqr(h) {
            me.pool[u] = false;
            continue;
        }
        let mut penalty = 0.0;
        if let Some(w) = &partner_w {
            let received: f64 = (0..w.ncols())
                .map(|j| linalg::row_col_gain(&other.h_mat, u, w, j))
                .sum();
            let induced: f64 = other
                .set
                .iter()
                .map(|&j| linalg::inner(&me.h[j], &g).norm_sqr() / ng)
                .sum();
            penalty = received + induced;
        }
        let score = ng - params.lambda_interf * penalty;
        if score > 0.0 && best.as_ref().is_none_or(|(_, b, _)| score > *b) {
            best = Some((u, score, g));
        }
    }
    Ok(best)
}

/// Alternating greedy allocation of a common user pool to two satellites.
/// The satellite with the better opening candidate moves first; turns then
/// alternate until neither satellite can admit a candidate. With
/// `lambda_interf = 0` each satellite runs plain SUS on its visible users.
pub fn siua_allocate(
    h1_pool: &CMatrix,
    h2_pool: &CMatrix,
    params: &SiuaParams,
    k1: usize,
    k2: usize,
) -> Result<Allocation> {
    check_alpha(params.alpha)?;
    if !(params.lambda_interf >= 0.0) || !params.lambda_interf.is_finite() {
        return Err(invalid("lambda_interf", "must be nonnegative and finite"));
    }
    let n = h1_pool.nrows();
    if n == 0 {
        return Err(Error::EmptyPool);
    }
    if h2_pool.nrows() != n {
        return Err(invalid("h2_pool", "must cover the same user pool as h1_pool"));
    }
    if k1 == 0 && k2 == 0 {
        return Err(invalid("beams", "both satellites have zero capacity"));
    }
    if k1 > h1_pool.ncols() || k2 > h2_pool.ncols() {
        return Err(invalid("max_users", "cannot exceed the number of beams"));
    }
    let mut sides = [Side::new(h1_pool, k1), Side::new(h2_pool, k2)];
    let mut taken = vec![false; n];

    let mut opening = [f64::NEG_INFINITY; 2];
    for s in 0..2 {
        if !sides[s].done {
            let [a, b] = &mut sides;
            let (me, other) = if s == 0 { (a, &*b) } else { (b, &*a) };
            if let Some((_, score, _)) = best_candidate(me, other, &taken, params)? {
                opening[s] = score;
            }
        }
    }
    let mut s = if opening[1] > opening[0] { 1 } else { 0 };

    while !(sides[0].done && sides[1].done) {
        if sides[s].done || sides[s].set.len() >= sides[s].cap {
            sides[s].done = true;
            s = 1 - s;
            continue;
        }
        let [a, b] = &mut sides;
        let (me, other) = if s == 0 { (a, &*b) } else { (b, &*a) };
        match best_candidate(me, other, &taken, params)? {
            None => me.done = true,
            Some((u, _, g)) => {
                taken[u] = true;
                me.set.push(u);
                me.span.push(g);
                let h = &me.h;
                let span = &me.span;
                for (j, keep) in me.pool.iter_mut().enumerate() {
                    if *keep && span.correlated(&h[j], params.alpha) && j != u {
                        *keep = false;
                    }
                }
                me.pool[u] = false;
            }
        }
        s = 1 - s;
    }
    let [a, b] = sides;
    Ok(Allocation {
        sat1_users: a.set,
        sat2_users: b.set,
    })
}
