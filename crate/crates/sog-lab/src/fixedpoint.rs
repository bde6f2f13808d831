//! Numerical solver for the distribution of the cascade heaviest root-path
//! weight with zero vertex weights: the CDF G(t, w) = P(w_tilde(t) <= w)
//! satisfies
//!
//!   G(t, w) = exp(-∫₀ᵗ E_u[1 - G(s, w - u)] ds),   G(t, w) = 0 for w < 0,
//!
//! because w_tilde exceeds w exactly when some Poisson offspring point at
//! distance s carries u + w_tilde'(t - s) > w. The solver marches in t with
//! the trapezoid rule on a uniform (t, w) grid. Positive u keeps the inner
//! dependence strictly below the current w index, so each time level is
//! explicit when sweeping w upward.

use std::fmt::Write as _;

use crate::cascade::build_pwit;
use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::par::run_replications;
use crate::stream::{role, StreamKey};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointGrid {
    pub dt: f64,
    pub dw: f64,
    /// Uniform grid 0, dt, ..., t_max.
    pub t: Vec<f64>,
    /// Uniform grid -dw, 0, dw, ..., w_max; the leading negative point pins
    /// the boundary value G = 0 below zero.
    pub w: Vec<f64>,
    /// g[i][j] = G(t[i], w[j]).
    pub g: Vec<Vec<f64>>,
    pub du: DistributionSpec,
    /// Human-readable record of how E_u was discretized.
    pub quadrature: String,
}

impl FixedPointGrid {
    fn t_index(&self, t: f64) -> Result<usize> {
        grid_index(t, self.dt, 0.0, self.t.len())
            .ok_or_else(|| Error::GridMismatch(format!("t={t} is not on the time grid")))
    }

    fn w_index(&self, w: f64) -> Result<usize> {
        grid_index(w, self.dw, -self.dw, self.w.len())
            .ok_or_else(|| Error::GridMismatch(format!("w={w} is not on the weight grid")))
    }

    /// G(t, w) at an exact grid point.
    pub fn cdf(&self, t: f64, w: f64) -> Result<f64> {
        Ok(self.g[self.t_index(t)?][self.w_index(w)?])
    }

    /// Tail F(t, w) = P(w_tilde(t) > w) at an exact grid point.
    pub fn tail(&self, t: f64, w: f64) -> Result<f64> {
        Ok(1.0 - self.cdf(t, w)?)
    }

    /// CSV rendering: one row per (t, w) grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,w,g\n");
        for (i, &t) in self.t.iter().enumerate() {
            for (j, &w) in self.w.iter().enumerate() {
                let _ = writeln!(out, "{t},{w},{}", self.g[i][j]);
            }
        }
        out
    }
}

/// Index of `x` on the uniform grid start, start+step, ... of length `len`.
fn grid_index(x: f64, step: f64, start: f64, len: usize) -> Option<usize> {
    let r = (x - start) / step;
    let k = r.round();
    if (r - k).abs() > 1e-9 * (1.0 + r.abs()) || k < 0.0 || k as usize >= len {
        return None;
    }
    Some(k as usize)
}

fn steps(span: f64, step: f64, span_name: &'static str, step_name: &'static str) -> Result<usize> {
    if !(span > 0.0) {
        return Err(Error::parameter(span_name, "must be positive"));
    }
    if !(step > 0.0) {
        return Err(Error::parameter(step_name, "must be positive"));
    }
    let r = span / step;
    let k = r.round();
    if (r - k).abs() > 1e-9 * (1.0 + r.abs()) || k < 1.0 {
        return Err(Error::parameter(
            span_name,
            format!("must be a whole multiple of {step_name}"),
        ));
    }
    Ok(k as usize)
}

/// E_u discretized as grid-aligned point masses (index m stands for u = m*dw).
struct Quadrature {
    nodes: Vec<(usize, f64)>,
    description: String,
}

fn build_quadrature(du: &DistributionSpec, dw: f64, w_levels: usize) -> Result<Quadrature> {
    if let Some(atoms) = du.atoms() {
        let mut nodes = Vec::with_capacity(atoms.len());
        for (a, p) in &atoms {
            if *p == 0.0 {
                continue;
            }
            let m = grid_index(*a, dw, 0.0, usize::MAX).ok_or_else(|| {
                Error::GridMismatch(format!("u atom at {a} is not a multiple of dw={dw}"))
            })?;
            // positivity was checked before; aligned atoms are >= dw
            nodes.push((m, *p));
        }
        return Ok(Quadrature {
            description: format!("exact atoms ({})", nodes.len()),
            nodes,
        });
    }
    // continuous law: cell rule with grid-aligned nodes m*dw carrying the
    // probability of ((m-1/2)dw, (m+1/2)dw]; the first cell also absorbs
    // [0, dw/2] and the last the remaining upper tail. Any u beyond the top
    // w level acts exactly like the top node (w - u < 0 for every grid w).
    let cutoff = w_levels + 1;
    let mut nodes = Vec::new();
    let mut below = 0.0;
    for m in 1..=cutoff {
        let hi = if m == cutoff {
            1.0
        } else {
            du.cdf((m as f64 + 0.5) * dw)
        };
        let p = hi - below;
        below = hi;
        if p > 0.0 {
            nodes.push((m, p));
        }
    }
    Ok(Quadrature {
        description: format!("cell rule, step dw, {} nodes", nodes.len()),
        nodes,
    })
}

/// Solve the fixed-point recursion on [0, t_max] x [-dw, w_max]; `t_max` and
/// `w_max` must be whole multiples of the steps.
pub fn solve_ftw(
    du: &DistributionSpec,
    t_max: f64,
    w_max: f64,
    dt: f64,
    dw: f64,
) -> Result<FixedPointGrid> {
    du.validate()?;
    let nt = steps(t_max, dt, "t_max", "dt")?;
    let nw = steps(w_max, dw, "w_max", "dw")?;
    if du.raw_moments().mass_at_or_below_zero {
        return Err(Error::Assumption(
            "u must be strictly positive for the time-marching recursion".into(),
        ));
    }
    let quad = build_quadrature(du, dw, nw + 1)?;

    // w index j holds w = (j-1)*dw; j = 0 is the pinned negative point
    let jn = nw + 2;
    let mut g: Vec<Vec<f64>> = Vec::with_capacity(nt + 1);
    let mut row0 = vec![1.0; jn];
    row0[0] = 0.0;
    g.push(row0);

    // phi(t, w) = E_u[1 - G(t, w - u)]; h accumulates ∫₀ᵗ phi ds (trapezoid)
    let eval_phi = |row: &[f64], j: usize| -> f64 {
        quad.nodes
            .iter()
            .map(|&(m, p)| p * (1.0 - if j > m { row[j - m] } else { 0.0 }))
            .sum()
    };
    let mut phi_prev: Vec<f64> = (0..jn).map(|j| eval_phi(&g[0], j)).collect();
    let mut h = vec![0.0f64; jn];
    for _ in 1..=nt {
        let mut row = vec![0.0f64; jn];
        let mut phi = vec![0.0f64; jn];
        for j in 1..jn {
            // all quadrature nodes have m >= 1, so eval_phi only reads
            // row[..j], already final in this ascending sweep
            phi[j] = eval_phi(&row, j);
            row[j] = (-(h[j] + 0.5 * dt * (phi_prev[j] + phi[j]))).exp();
        }
        phi[0] = eval_phi(&row, 0);
        for j in 0..jn {
            h[j] += 0.5 * dt * (phi_prev[j] + phi[j]);
        }
        phi_prev = phi;
        g.push(row);
    }

    Ok(FixedPointGrid {
        dt,
        dw,
        t: (0..=nt).map(|i| i as f64 * dt).collect(),
        w: (0..jn).map(|j| (j as f64 - 1.0) * dw).collect(),
        g,
        du: du.clone(),
        quadrature: quad.description,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub t: f64,
    pub w: f64,
    /// Solver tail F(t, w).
    pub solver: f64,
    /// Monte Carlo tail frequency over `reps` cascade simulations.
    pub monte_carlo: f64,
    pub mc_stderr: f64,
    pub reps: usize,
}

/// Compare solver tails against direct cascade simulation (v = 0) at grid
/// checkpoints.
pub fn mc_validate_ftw(
    grid: &FixedPointGrid,
    checkpoints: &[(f64, f64)],
    reps: usize,
    seed: u64,
) -> Result<Vec<CheckpointRow>> {
    if reps < 2 {
        return Err(Error::parameter("reps", "must be at least 2"));
    }
    let dv = DistributionSpec::Constant(0.0);
    let mut rows = Vec::with_capacity(checkpoints.len());
    for (ci, &(t, w)) in checkpoints.iter().enumerate() {
        let solver = grid.tail(t, w)?;
        let key = StreamKey::root(seed).child(role::TREE).child(ci as u64);
        let hits = run_replications(reps, |r| {
            let s = key.child(r as u64).rng().next_u64();
            let tree = build_pwit(&grid.du, &dv, t, s).expect("validated inputs");
            usize::from(crate::cascade::tree_w_tilde(&tree) > w)
        })
        .into_iter()
        .sum::<usize>();
        let freq = hits as f64 / reps as f64;
        let se = (freq * (1.0 - freq) / reps as f64).sqrt();
        rows.push(CheckpointRow {
            t,
            w,
            solver,
            monte_carlo: freq,
            mc_stderr: se,
            reps,
        });
    }
    Ok(rows)
}
