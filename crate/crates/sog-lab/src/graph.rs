//! Reproducible finite windows [0, n] of the weighted stochastic ordered
//! graph: each pair (i, j), i < j, is an edge independently with probability
//! p, edges carry i.i.d. edge weights and vertices i.i.d. vertex weights.
//!
//! Out-edges of a source are realized as a run of geometric gaps, which is the
//! same law as independent per-pair indicators. The gap following position
//! `prev` is drawn from the stream keyed by (seed, source, prev), so the
//! realized window depends only on graph positions, never on draw order:
//! dense and sparse generation modes, and any parallel evaluation order,
//! produce byte-identical windows.

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::stream::{role, StreamKey};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenerationMode {
    /// Enumerate every candidate target per source: O(n^2).
    Dense,
    /// Jump between realized targets: O(n^2 p + n) expected.
    Sparse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphWindow {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub du: DistributionSpec,
    pub dv: DistributionSpec,
    /// Out-adjacency per source: (target, edge weight), targets ascending.
    out: Vec<Vec<(u32, f64)>>,
    vertex_weights: Vec<f64>,
}

impl GraphWindow {
    /// Generate the window. Both modes yield the identical window for
    /// identical (n, p, du, dv, seed).
    pub fn generate(
        n: usize,
        p: f64,
        du: &DistributionSpec,
        dv: &DistributionSpec,
        seed: u64,
        mode: GenerationMode,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::parameter("n", "must be at least 1"));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::parameter("p", "must lie in (0, 1]"));
        }
        du.validate()?;
        dv.validate()?;
        let root = StreamKey::root(seed);
        let gap_key = root.child(role::EDGE_GAP);
        let uw_key = root.child(role::EDGE_WEIGHT);
        let vw_key = root.child(role::VERTEX_WEIGHT);

        // hot path: cache ln(1-p) (geometric recomputes it per draw) and
        // skip the weight stream entirely for constant u; both are
        // stream-identical to the straightforward per-edge draws
        let lnq = if p < 1.0 { (1.0 - p).ln() } else { f64::NEG_INFINITY };
        let const_u = match du {
            DistributionSpec::Constant(a) => Some(*a),
            _ => None,
        };
        let draw_gap = |src_gap: StreamKey, prev: usize| -> usize {
            if p >= 1.0 {
                return 1;
            }
            let u = src_gap.child(prev as u64).rng().next_f64_open();
            1 + (u.ln() / lnq).floor() as usize
        };
        let draw_u = |src_uw: StreamKey, j: usize| -> f64 {
            match const_u {
                Some(a) => a,
                None => du.sample(&mut src_uw.child(j as u64).rng()),
            }
        };
        let mut out: Vec<Vec<(u32, f64)>> = (0..n)
            .map(|i| Vec::with_capacity(((n - i) as f64 * p) as usize + 2))
            .collect();
        match mode {
            GenerationMode::Sparse if p >= 1.0 => {
                for (i, edges) in out.iter_mut().enumerate() {
                    let src_uw = uw_key.child(i as u64);
                    for j in i + 1..=n {
                        edges.push((j as u32, draw_u(src_uw, j)));
                    }
                }
            }
            GenerationMode::Sparse => {
                // each source's gap chain is serially dependent (the next key
                // uses the previous target), so a single chain runs at
                // mix+ln latency; interleaving independent sources in
                // batched phases recovers throughput. Draws are keyed by
                // position alone, so the window is byte-identical to the
                // one-source-at-a-time order.
                const L: usize = 8;
                let mut src = [0usize; L];
                let mut prev = [0usize; L];
                let mut gkeys = [gap_key; L];
                let mut ukeys = [uw_key; L];
                let mut bufs: [Vec<(u32, f64)>; L] = Default::default();
                let mut next_src = 0usize;
                let mut active = 0usize;
                while active < L && next_src < n {
                    src[active] = next_src;
                    prev[active] = next_src;
                    gkeys[active] = gap_key.child(next_src as u64);
                    ukeys[active] = uw_key.child(next_src as u64);
                    bufs[active] = std::mem::take(&mut out[next_src]);
                    next_src += 1;
                    active += 1;
                }
                let mut lns = [0.0f64; L];
                while active > 0 {
                    // phase 1+2: one independent uniform and its log per lane
                    let mut us = [0.0f64; L];
                    for k in 0..active {
                        us[k] = gkeys[k].child(prev[k] as u64).rng().next_f64_open();
                    }
                    for k in 0..active {
                        lns[k] = us[k].ln();
                    }
                    // phase 3: advance each lane by its drawn gap
                    let mut k = 0;
                    while k < active {
                        let j = prev[k] + 1 + (lns[k] / lnq).floor() as usize;
                        if j > n {
                            out[src[k]] = std::mem::take(&mut bufs[k]);
                            if next_src < n {
                                src[k] = next_src;
                                prev[k] = next_src;
                                gkeys[k] = gap_key.child(next_src as u64);
                                ukeys[k] = uw_key.child(next_src as u64);
                                bufs[k] = std::mem::take(&mut out[next_src]);
                                next_src += 1;
                                k += 1; // fresh lane draws next round
                            } else {
                                active -= 1;
                                src[k] = src[active];
                                prev[k] = prev[active];
                                gkeys[k] = gkeys[active];
                                ukeys[k] = ukeys[active];
                                lns[k] = lns[active];
                                bufs[k] = std::mem::take(&mut bufs[active]);
                                // re-examine the swapped-in lane's pending gap
                            }
                        } else {
                            bufs[k].push((j as u32, draw_u(ukeys[k], j)));
                            prev[k] = j;
                            k += 1;
                        }
                    }
                }
            }
            GenerationMode::Dense => {
                for i in 0..n {
                    let src_gap = gap_key.child(i as u64);
                    let src_uw = uw_key.child(i as u64);
                    let mut prev = i;
                    let mut next = prev + draw_gap(src_gap, prev);
                    for j in i + 1..=n {
                        if j == next {
                            out[i].push((j as u32, draw_u(src_uw, j)));
                            prev = j;
                            next = prev + draw_gap(src_gap, prev);
                        }
                    }
                }
            }
        }
        // vertex n has no out-edges within the window
        out.push(Vec::new());

        let vertex_weights = (0..=n)
            .map(|i| dv.sample(&mut vw_key.child(i as u64).rng()))
            .collect();

        Ok(GraphWindow { n, p, seed, du: du.clone(), dv: dv.clone(), out, vertex_weights })
    }

    pub fn out_edges(&self, i: usize) -> &[(u32, f64)] {
        &self.out[i]
    }

    pub fn vertex_weight(&self, i: usize) -> f64 {
        self.vertex_weights[i]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_weight(i, j).is_some()
    }

    pub fn edge_weight(&self, i: usize, j: usize) -> Option<f64> {
        let edges = &self.out[i];
        edges
            .binary_search_by_key(&(j as u32), |&(t, _)| t)
            .ok()
            .map(|ix| edges[ix].1)
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Smallest k >= 1 with (j-k, j) an edge and j-k >= 0, or None.
    pub fn first_left_connection(&self, j: usize) -> Result<Option<usize>> {
        if j < 1 || j > self.n {
            return Err(Error::parameter("j", format!("must lie in [1, {}]", self.n)));
        }
        Ok((1..=j).find(|&k| self.has_edge(j - k, j)))
    }

    /// Distance to the nearest in-neighbor per vertex, in one pass over edges.
    pub fn nearest_in_dist(&self) -> Vec<Option<usize>> {
        let mut g: Vec<Option<usize>> = vec![None; self.n + 1];
        for (i, edges) in self.out.iter().enumerate() {
            for &(j, _) in edges {
                let d = j as usize - i;
                if g[j as usize].map_or(true, |cur| d < cur) {
                    g[j as usize] = Some(d);
                }
            }
        }
        g
    }

    /// Distance to the nearest out-neighbor per vertex.
    pub fn nearest_out_dist(&self) -> Vec<Option<usize>> {
        (0..=self.n)
            .map(|i| self.out[i].first().map(|&(j, _)| j as usize - i))
            .collect()
    }

    pub fn to_doc(&self) -> WindowDoc {
        WindowDoc {
            n: self.n,
            p: self.p,
            seed: self.seed,
            du: self.du.clone(),
            dv: self.dv.clone(),
            edges: self
                .out
                .iter()
                .enumerate()
                .flat_map(|(i, edges)| {
                    edges.iter().map(move |&(j, u)| (i, j as usize, u))
                })
                .collect(),
            vertex_weights: self.vertex_weights.clone(),
        }
    }

    pub fn from_doc(doc: WindowDoc) -> Result<Self> {
        let mut out: Vec<Vec<(u32, f64)>> = vec![Vec::new(); doc.n + 1];
        for (i, j, u) in doc.edges {
            if i >= j || j > doc.n {
                return Err(Error::parameter("edges", format!("bad pair ({i},{j})")));
            }
            out[i].push((j as u32, u));
        }
        for edges in &mut out {
            edges.sort_by_key(|&(j, _)| j);
        }
        if doc.vertex_weights.len() != doc.n + 1 {
            return Err(Error::parameter("vertex_weights", "length must be n+1"));
        }
        Ok(GraphWindow {
            n: doc.n,
            p: doc.p,
            seed: doc.seed,
            du: doc.du,
            dv: doc.dv,
            out,
            vertex_weights: doc.vertex_weights,
        })
    }
}

/// JSON document form of a window, used by the CLI for fixture capture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowDoc {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub du: DistributionSpec,
    pub dv: DistributionSpec,
    pub edges: Vec<(usize, usize, f64)>,
    pub vertex_weights: Vec<f64>,
}
