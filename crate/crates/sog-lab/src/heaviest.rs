//! Exact heaviest-path computation on a window: optimal values, clipped
//! values, window maxima, argmax paths, and a brute-force oracle.
//!
//! The vertices are naturally ordered, so a single sweep in vertex order is a
//! topological dynamic program. Unreachability is a distinct flag, never a
//! sentinel value leaking into arithmetic.

use crate::error::{Error, Result};
use crate::graph::GraphWindow;
use serde::{Deserialize, Serialize};

/// Weight variant: `Full` sums v-source plus u-edge per traversed edge;
/// `EdgeOnly` zeroes all vertex weights (the auxiliary zero-vertex graph).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Full,
    EdgeOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathValue {
    pub reachable: bool,
    /// Optimal value; None when unreachable.
    pub w: Option<f64>,
    /// Clipped value: max(w, 0), and 0 when unreachable.
    #[serde(rename = "W")]
    pub w_clipped: f64,
    /// Argmax path, lexicographically smallest among optima; empty when
    /// unreachable.
    pub path: Vec<usize>,
    pub variant: Variant,
}

impl PathValue {
    fn unreachable(variant: Variant) -> Self {
        PathValue { reachable: false, w: None, w_clipped: 0.0, path: Vec::new(), variant }
    }

    fn reached(w: f64, path: Vec<usize>, variant: Variant) -> Self {
        PathValue { reachable: true, w: Some(w), w_clipped: w.max(0.0), path, variant }
    }
}

#[inline]
fn gain(w: &GraphWindow, x: usize, u: f64, variant: Variant) -> f64 {
    match variant {
        Variant::Full => w.vertex_weight(x) + u,
        Variant::EdgeOnly => u,
    }
}

/// Weight of an explicit path (at least one edge) under the chosen variant.
pub fn path_weight(w: &GraphWindow, path: &[usize], variant: Variant) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::parameter("path", "must traverse at least one edge"));
    }
    let mut total = 0.0;
    for pair in path.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        let u = w.edge_weight(x, y).ok_or(Error::InvalidPath(x, y))?;
        total += gain(w, x, u, variant);
    }
    Ok(total)
}

/// Forward sweep from `src`: calls `visit(j, value)` for each j in (src, hi]
/// once the heaviest src->j value is final (None if unreachable). Return
/// false from `visit` to abort the sweep early.
pub fn forward_scan<F>(w: &GraphWindow, src: usize, hi: usize, variant: Variant, mut visit: F)
where
    F: FnMut(usize, Option<f64>) -> bool,
{
    let mut score: Vec<Option<f64>> = vec![None; hi + 1];
    score[src] = Some(0.0);
    for x in src..=hi {
        if x > src && !visit(x, score[x]) {
            return;
        }
        if let Some(sx) = score[x] {
            for &(y, u) in w.out_edges(x) {
                let y = y as usize;
                if y > hi {
                    break;
                }
                let cand = sx + gain(w, x, u, variant);
                if score[y].map_or(true, |cur| cand > cur) {
                    score[y] = Some(cand);
                }
            }
        }
    }
}

/// Heaviest values from `src` to every j in (src, hi].
pub fn forward_values(w: &GraphWindow, src: usize, hi: usize, variant: Variant) -> Vec<Option<f64>> {
    let mut vals = vec![None; hi + 1];
    forward_scan(w, src, hi, variant, |j, v| {
        vals[j] = v;
        true
    });
    vals
}

/// Backward sweep toward `dst`: calls `visit(x, value)` for each x in
/// [lo, dst) in descending order with the heaviest x->dst value.
pub fn backward_scan<F>(w: &GraphWindow, dst: usize, lo: usize, variant: Variant, mut visit: F)
where
    F: FnMut(usize, Option<f64>) -> bool,
{
    let mut score: Vec<Option<f64>> = vec![None; dst + 1];
    score[dst] = Some(0.0);
    for x in (lo..dst).rev() {
        let mut best: Option<f64> = None;
        for &(y, u) in w.out_edges(x) {
            let y = y as usize;
            if y > dst {
                break;
            }
            if let Some(sy) = score[y] {
                let cand = gain(w, x, u, variant) + sy;
                if best.map_or(true, |cur| cand > cur) {
                    best = Some(cand);
                }
            }
        }
        score[x] = best;
        if !visit(x, best) {
            return;
        }
    }
}

/// Exact heaviest path from i to j with the argmax path, ties broken toward
/// the lexicographically smallest vertex sequence.
pub fn heaviest_between(
    w: &GraphWindow,
    i: usize,
    j: usize,
    variant: Variant,
) -> Result<PathValue> {
    check_span(w, i, j)?;
    // paths to each vertex; prefix optimality makes the greedy lexicographic
    // choice compose
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; j + 1];
    best[i] = Some((0.0, vec![i]));
    for x in i..j {
        let Some((sx, px)) = best[x].clone() else { continue };
        for &(y, u) in w.out_edges(x) {
            let y = y as usize;
            if y > j {
                break;
            }
            let cand = sx + gain(w, x, u, variant);
            let take = match &best[y] {
                None => true,
                Some((cur, pcur)) => {
                    cand > *cur || (cand == *cur && px.as_slice() < &pcur[..pcur.len() - 1])
                }
            };
            if take {
                let mut path = px.clone();
                path.push(y);
                best[y] = Some((cand, path));
            }
        }
    }
    Ok(match best[j].take() {
        Some((val, path)) => PathValue::reached(val, path, variant),
        None => PathValue::unreachable(variant),
    })
}

/// Max over all x < y in [i, j] of the clipped value W_{x,y}; always >= 0.
/// One O(edges) sweep: track the best nonempty path ending at each vertex,
/// allowing a fresh start at any vertex (negative prefixes are dropped, which
/// is exactly the max over starting points).
pub fn window_max(w: &GraphWindow, i: usize, j: usize, variant: Variant) -> Result<f64> {
    check_span(w, i, j)?;
    let mut end: Vec<Option<f64>> = vec![None; j + 1];
    let mut best = 0.0f64;
    for x in i..j {
        let prefix = end[x].map_or(0.0, |v| v.max(0.0));
        for &(y, u) in w.out_edges(x) {
            let y = y as usize;
            if y > j {
                break;
            }
            let cand = prefix + gain(w, x, u, variant);
            if end[y].map_or(true, |cur| cand > cur) {
                end[y] = Some(cand);
                if cand > best {
                    best = cand;
                }
            }
        }
    }
    Ok(best)
}

/// Exhaustive enumeration oracle; identical contract to [`heaviest_between`].
pub fn brute_force_heaviest(
    w: &GraphWindow,
    i: usize,
    j: usize,
    variant: Variant,
) -> Result<PathValue> {
    check_span(w, i, j)?;
    const GUARD: usize = 20;
    if j - i > GUARD {
        return Err(Error::SpanGuard(j - i, GUARD));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut stack = vec![i];
    dfs(w, j, variant, &mut stack, 0.0, &mut best);
    Ok(match best {
        Some((val, path)) => PathValue::reached(val, path, variant),
        None => PathValue::unreachable(variant),
    })
}

fn dfs(
    w: &GraphWindow,
    dst: usize,
    variant: Variant,
    stack: &mut Vec<usize>,
    acc: f64,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    let x = *stack.last().unwrap();
    if x == dst {
        let better = match best {
            None => true,
            Some((cur, pcur)) => acc > *cur || (acc == *cur && stack.as_slice() < pcur.as_slice()),
        };
        if better {
            *best = Some((acc, stack.clone()));
        }
        return;
    }
    for &(y, u) in w.out_edges(x) {
        let y = y as usize;
        if y > dst {
            break;
        }
        stack.push(y);
        dfs(w, dst, variant, stack, acc + gain(w, x, u, variant), best);
        stack.pop();
    }
}

fn check_span(w: &GraphWindow, i: usize, j: usize) -> Result<()> {
    if i >= j || j > w.n {
        return Err(Error::parameter("span", format!("requires 0 <= i < j <= {}", w.n)));
    }
    Ok(())
}
