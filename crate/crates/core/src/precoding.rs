//! Zero-forcing precoding under per-antenna power limits, and the cooperative
//! sum-capacity upper bound.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Relative tolerance of the zero-forcing and per-antenna invariants.
pub const ZF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerAllocation {
    /// Equal powers scaled so the most loaded feed is exactly at its limit.
    #[default]
    Uniform,
    /// Projected-gradient sum-rate maximization over the per-user powers.
    MaxSumRate,
}

/// ZF beamformer for one satellite's scheduled set.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    /// `K x n` with unit-norm columns.
    pub directions: CMatrix,
    pub powers: Vec<f64>,
}

impl Precoder {
    pub fn new(h_sched: &CMatrix, per_antenna_limit: f64, noise: f64, mode: PowerAllocation) -> Result<Self> {
        let directions = zf_directions(h_sched)?;
        let powers = match mode {
            PowerAllocation::Uniform => allocate_powers(&directions, per_antenna_limit)?,
            PowerAllocation::MaxSumRate => {
                allocate_powers_max_sum_rate(&directions, h_sched, per_antenna_limit, noise)?
            }
        };
        Ok(Self { directions, powers })
    }

    /// Power radiated by feed `k`.
    pub fn feed_power(&self, k: usize) -> f64 {
        self.powers
            .iter()
            .enumerate()
            .map(|(j, p)| p * self.directions[(k, j)].norm_sqr())
            .sum()
    }

    pub fn total_power(&self) -> f64 {
        self.powers.iter().sum()
    }
}

/// Unit-norm columns of the right pseudo-inverse of `h_sched` (`n x K`, `n <= K`).
pub fn zf_directions(h_sched: &CMatrix) -> Result<CMatrix> {
    let mut w = linalg::right_pseudo_inverse(h_sched)?;
    for mut col in w.column_iter_mut() {
        let n = col.norm();
        col.unscale_mut(n);
    }
    Ok(w)
}

fn feed_loads(w: &CMatrix, powers: &[f64]) -> Vec<f64> {
    (0..w.nrows())
        .map(|k| (0..w.ncols()).map(|j| powers[j] * w[(k, j)].norm_sqr()).sum())
        .collect()
}

/// Equal per-user power `p = P_ant / max_k sum_j |W_kj|^2`.
pub fn allocate_powers(w: &CMatrix, per_antenna_limit: f64) -> Result<Vec<f64>> {
    if !(per_antenna_limit > 0.0) || !per_antenna_limit.is_finite() {
        return Err(invalid("per_antenna_limit", "must be positive and finite"));
    }
    let load = feed_loads(w, &vec![1.0; w.ncols()]);
    let max = load.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(invalid("directions", "matrix is empty or zero"));
    }
    Ok(vec![per_antenna_limit / max; w.ncols()])
}

fn zf_sum_rate(gains: &[f64], powers: &[f64], noise: f64) -> f64 {
    gains
        .iter()
        .zip(powers)
        .map(|(g, p)| libm::log2(1.0 + p * g / noise))
        .sum()
}

/// Euclidean projection onto `{p >= 0, A p <= b}` by Dykstra's alternating projections.
fn project_feasible(y: &[f64], a: &[Vec<f64>], b: f64) -> Vec<f64> {
    let sets = a.len() + 1;
    let mut x = y.to_vec();
    let mut inc = vec![vec![0.0; y.len()]; sets];
    for _ in 0..200 {
        let prev = x.clone();
        for s in 0..sets {
            let z: Vec<f64> = x.iter().zip(&inc[s]).map(|(x, i)| x + i).collect();
            let proj: Vec<f64> = if s == a.len() {
                z.iter().map(|v| v.max(0.0)).collect()
            } else {
                let row = &a[s];
                let dot: f64 = row.iter().zip(&z).map(|(r, v)| r * v).sum();
                let nn: f64 = row.iter().map(|r| r * r).sum();
                if dot <= b || nn == 0.0 {
                    z.clone()
                } else {
                    let t = (dot - b) / nn;
                    z.iter().zip(row).map(|(v, r)| v - t * r).collect()
                }
            };
            inc[s] = z.iter().zip(&proj).map(|(z, p)| z - p).collect();
            x = proj;
        }
        let moved: f64 = x.iter().zip(&prev).map(|(a, b)| (a - b).abs()).sum();
        if moved <= 1e-14 * (1.0 + x.iter().sum::<f64>()) {
            break;
        }
    }
    // Dykstra converges only in the limit; land exactly inside the polytope.
    let worst = a
        .iter()
        .map(|row| row.iter().zip(&x).map(|(r, v)| r * v.max(0.0)).sum::<f64>())
        .fold(0.0, f64::max);
    let shrink = if worst > b { b / worst } else { 1.0 };
    x.iter().map(|v| v.max(0.0) * shrink).collect()
}

/// Sum-rate maximizing powers for fixed ZF directions, by projected gradient
/// ascent. Never returns a worse sum rate than [`allocate_powers`].
pub fn allocate_powers_max_sum_rate(
    w: &CMatrix,
    h_sched: &CMatrix,
    per_antenna_limit: f64,
    noise: f64,
) -> Result<Vec<f64>> {
    let uniform = allocate_powers(w, per_antenna_limit)?;
    if !(noise > 0.0) {
        return Err(invalid("noise", "must be positive"));
    }
    let n = w.ncols();
    let gains: Vec<f64> = (0..n).map(|j| linalg::row_col_gain(h_sched, j, w, j)).collect();
    let a: Vec<Vec<f64>> = (0..w.nrows())
        .map(|k| (0..n).map(|j| w[(k, j)].norm_sqr()).collect())
        .collect();
    let b = per_antenna_limit;
    let mut p = uniform.clone();
    let mut f = zf_sum_rate(&gains, &p, noise);
    let mut step = per_antenna_limit;
    for _ in 0..500 {
        let grad: Vec<f64> = gains
            .iter()
            .zip(&p)
            .map(|(g, p)| g / ((noise + p * g) * LN_2))
            .collect();
        let gn = libm::sqrt(grad.iter().map(|g| g * g).sum::<f64>());
        if gn == 0.0 {
            break;
        }
        let mut improved = false;
        while step > 1e-12 * per_antenna_limit {
            let trial: Vec<f64> = p.iter().zip(&grad).map(|(p, g)| p + step * g / gn).collect();
            let q = project_feasible(&trial, &a, b);
            let fq = zf_sum_rate(&gains, &q, noise);
            if fq > f {
                improved = fq - f > 1e-12 * f.abs().max(1e-300);
                p = q;
                f = fq;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if f >= zf_sum_rate(&gains, &uniform, noise) {
        Ok(p)
    } else {
        Ok(uniform)
    }
}

/// Result of the sum-power broadcast capacity computation.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityBound {
    /// bits/s/Hz.
    pub sum_rate: f64,
    /// Optimal dual uplink powers.
    pub powers: Vec<f64>,
    pub iterations: usize,
    /// Frank-Wolfe gap of the dual problem, bits/s/Hz. Bounds the distance to the optimum.
    pub duality_gap: f64,
}

const CAPACITY_MAX_ITERATIONS: usize = 500;
const CAPACITY_REL_TOL: f64 = 1e-8;

/// Waterfilling of `total` over channels with inverse gains `inv`.
fn waterfill(inv: &[f64], total: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..inv.len()).collect();
    order.sort_by(|&a, &b| inv[a].total_cmp(&inv[b]).then(a.cmp(&b)));
    let mut level = 0.0;
    for m in (1..=inv.len()).rev() {
        let s: f64 = order[..m].iter().map(|&i| inv[i]).sum();
        level = (total + s) / m as f64;
        if level > inv[order[m - 1]] {
            break;
        }
    }
    inv.iter().map(|v| (level - v).max(0.0)).collect()
}

struct DualMac<'a> {
    /// Columns are noise-normalized user channels `h_i^H / sqrt(N)`.
    hn: &'a CMatrix,
}

impl DualMac<'_> {
    fn covariance(&self, q: &[f64]) -> CMatrix {
        let m = self.hn.nrows();
        let mut a = CMatrix::identity(m, m);
        for (i, qi) in q.iter().enumerate() {
            if *qi > 0.0 {
                let c = self.hn.column(i);
                a += (c * c.adjoint()).scale(*qi);
            }
        }
        a
    }

    fn rate(&self, q: &[f64]) -> f64 {
        linalg::ln_det_hpd(self.covariance(q)).unwrap_or(f64::NAN) / LN_2
    }

    /// `a_i = h_i A^-1 h_i^H`.
    fn quadratic_forms(&self, q: &[f64]) -> Option<Vec<f64>> {
        let chol = self.covariance(q).cholesky()?;
        Some(
            (0..self.hn.ncols())
                .map(|i| {
                    let c: DVector<C64> = self.hn.column(i).into_owned();
                    let x = chol.solve(&c);
                    c.dotc(&x).re
                })
                .collect(),
        )
    }
}

/// Sum capacity of the MISO broadcast channel `h_joint` (`n x M`) under a sum
/// power constraint, via the dual multiple-access channel and sum-power
/// iterative waterfilling with a line search on each update.
pub fn sum_capacity_bound(h_joint: &CMatrix, total_power: f64, noise: f64) -> Result<CapacityBound> {
    let n = h_joint.nrows();
    if n == 0 {
        return Err(Error::EmptyPool);
    }
    if !(total_power > 0.0) || !total_power.is_finite() {
        return Err(invalid("total_power", "must be positive and finite"));
    }
    if !(noise > 0.0) || !noise.is_finite() {
        return Err(invalid("noise", "must be positive and finite"));
    }
    let hn = h_joint.adjoint().unscale(libm::sqrt(noise));
    let mac = DualMac { hn: &hn };
    if n == 1 {
        let g = hn.column(0).norm_squared();
        return Ok(CapacityBound {
            sum_rate: libm::log2(1.0 + total_power * g),
            powers: vec![total_power],
            iterations: 0,
            duality_gap: 0.0,
        });
    }
    let mut q = vec![total_power / n as f64; n];
    let mut f = mac.rate(&q);
    let mut iterations = 0;
    let mut converged = false;
    let gap = |q: &[f64], a: &[f64]| {
        let max = a.iter().cloned().fold(0.0, f64::max);
        let used: f64 = q.iter().zip(a).map(|(q, a)| q * a).sum();
        ((total_power * max - used) / LN_2).max(0.0)
    };
    let nonconv = |iterations, residual| Error::NonConvergence { iterations, residual };
    while iterations < CAPACITY_MAX_ITERATIONS {
        iterations += 1;
        let a = mac.quadratic_forms(&q).ok_or_else(|| nonconv(iterations, f64::NAN))?;
        let inv: Vec<f64> = a
            .iter()
            .zip(&q)
            .map(|(a, q)| if *a > 0.0 { (1.0 - q * a) / a } else { f64::INFINITY })
            .collect();
        let target = waterfill(&inv, total_power);
        let along = |t: f64| -> Vec<f64> { q.iter().zip(&target).map(|(q, w)| q + t * (w - q)).collect() };
        let (t, ft) = golden_section(|t| mac.rate(&along(t)), 1.0 / n as f64, 1.0, 30);
        let (t, ft) = {
            let base = mac.rate(&along(1.0 / n as f64));
            if base > ft || !ft.is_finite() {
                (1.0 / n as f64, base)
            } else {
                (t, ft)
            }
        };
        q = along(t);
        let change = (ft - f).abs();
        f = ft;
        if change <= CAPACITY_REL_TOL * f.abs() {
            converged = true;
            break;
        }
    }
    let a = mac.quadratic_forms(&q).ok_or_else(|| nonconv(iterations, f64::NAN))?;
    let duality_gap = gap(&q, &a);
    if !converged || !f.is_finite() {
        return Err(nonconv(iterations, duality_gap));
    }
    Ok(CapacityBound {
        sum_rate: f,
        powers: q,
        iterations,
        duality_gap,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, evals: usize) -> (f64, f64) {
    let gr = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..evals {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = (lo + hi) / 2.0;
    (t, f(t))
}
