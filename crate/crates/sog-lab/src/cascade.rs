//! The weighted cascade on the Harris-Ulam tree: Poisson-gap and discrete
//! geometric-gap flavors, the collapse map onto a rooted weighted geometric
//! graph on the half line, the heaviest root-path weight, a rooted-graph
//! metric at small scale, and the sparse-limit convergence test.
//!
//! Trees are truncated at a horizon: a node is kept iff its root distance is
//! at most the horizon. All randomness is keyed by node address, so a tree is
//! a deterministic function of (flavor, weights, seed) and rebuilding with a
//! larger horizon extends the smaller tree without changing it.

use std::collections::{BTreeMap, VecDeque};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::par::run_replications;
use crate::stats::ks_two_sample;
use crate::stream::{role, StreamKey};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Pwit,
    Discrete { n: usize, p_n: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    /// Harris-Ulam address; the root is the empty word.
    pub address: Vec<u32>,
    /// Index of the parent in `nodes`; None at the root.
    pub parent: Option<usize>,
    /// Root distance (sum of edge lengths along the ancestry).
    pub dist: f64,
    /// Exact root distance in gap units for the discrete flavor, where
    /// dist = dist_units / n; used for exact coincidence detection.
    pub dist_units: Option<u64>,
    /// Weight u of the edge from the parent; 0 at the root (no edge).
    pub edge_weight: f64,
    pub vertex_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeTree {
    /// Breadth-first order: every parent precedes its children.
    pub nodes: Vec<TreeNode>,
    pub horizon: f64,
    pub flavor: Flavor,
}

impl CascadeTree {
    /// Length of the edge from `parent` to the node at `i`.
    pub fn edge_length(&self, i: usize) -> f64 {
        let p = self.nodes[i].parent.expect("root has no incoming edge");
        self.nodes[i].dist - self.nodes[p].dist
    }
}

/// Largest admissible horizon: the truncated tree has ~e^horizon nodes.
const MAX_HORIZON: f64 = 12.0;

/// Poisson weighted infinite tree, truncated at `horizon`: per node, child
/// edge lengths are the points of a unit Poisson process (cumulative sums of
/// i.i.d. exponential(1) gaps).
pub fn build_pwit(
    du: &DistributionSpec,
    dv: &DistributionSpec,
    horizon: f64,
    seed: u64,
) -> Result<CascadeTree> {
    build(Flavor::Pwit, du, dv, horizon, seed)
}

/// Discrete analogue: gaps are geometric(p_n) counts scaled by 1/n, so child
/// offsets live on the lattice {1/n, 2/n, ...}.
pub fn build_discrete_tree(
    n: usize,
    p_n: f64,
    du: &DistributionSpec,
    dv: &DistributionSpec,
    horizon: f64,
    seed: u64,
) -> Result<CascadeTree> {
    if n < 1 {
        return Err(Error::parameter("n", "must be at least 1"));
    }
    if !(p_n > 0.0 && p_n <= 1.0) {
        return Err(Error::parameter("p_n", "must lie in (0, 1]"));
    }
    build(Flavor::Discrete { n, p_n }, du, dv, horizon, seed)
}

fn build(
    flavor: Flavor,
    du: &DistributionSpec,
    dv: &DistributionSpec,
    horizon: f64,
    seed: u64,
) -> Result<CascadeTree> {
    if !(horizon > 0.0) {
        return Err(Error::parameter("horizon", "must be positive"));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::parameter(
            "horizon",
            format!("must be at most {MAX_HORIZON}: tree size grows like e^horizon"),
        ));
    }
    du.validate()?;
    dv.validate()?;
    let root_key = StreamKey::root(seed);
    let gap_base = root_key.child(role::TREE_GAP);
    let uw_base = root_key.child(role::TREE_EDGE_WEIGHT);
    let vw_base = root_key.child(role::TREE_VERTEX_WEIGHT);

    let mut nodes = vec![TreeNode {
        address: Vec::new(),
        parent: None,
        dist: 0.0,
        dist_units: matches!(flavor, Flavor::Discrete { .. }).then_some(0),
        edge_weight: 0.0,
        vertex_weight: dv.sample(&mut vw_base.rng()),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(xi) = queue.pop_front() {
        let addr = nodes[xi].address.clone();
        let d = nodes[xi].dist;
        let units = nodes[xi].dist_units;
        let gap_key = fold(gap_base, &addr);
        let mut cum = 0.0f64;
        let mut cum_units = 0u64;
        for k in 1u32.. {
            let (child_dist, child_units) = match flavor {
                Flavor::Pwit => {
                    cum += gap_key.child(k as u64).rng().exponential(1.0);
                    (d + cum, None)
                }
                Flavor::Discrete { n, p_n } => {
                    cum_units += gap_key.child(k as u64).rng().geometric(p_n);
                    let cu = units.expect("discrete node has units") + cum_units;
                    (cu as f64 / n as f64, Some(cu))
                }
            };
            if child_dist > horizon {
                break;
            }
            let mut caddr = addr.clone();
            caddr.push(k);
            let edge_weight = du.sample(&mut fold(uw_base, &caddr).rng());
            let vertex_weight = dv.sample(&mut fold(vw_base, &caddr).rng());
            nodes.push(TreeNode {
                address: caddr,
                parent: Some(xi),
                dist: child_dist,
                dist_units: child_units,
                edge_weight,
                vertex_weight,
            });
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(CascadeTree { nodes, horizon, flavor })
}

fn fold(base: StreamKey, addr: &[u32]) -> StreamKey {
    addr.iter().fold(base, |k, &c| k.child(c as u64))
}

/// A rooted weighted geometric graph on the half line: vertices are the
/// sorted root distances (root = 0), edge lengths are coordinate
/// differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootedWgg {
    pub vertices: Vec<f64>,
    /// Parallel to `vertices`.
    pub vertex_weights: Vec<f64>,
    /// (source index, target index, edge weight u), sorted, source < target.
    pub edges: Vec<(usize, usize, f64)>,
}

impl RootedWgg {
    pub fn edge_length(&self, e: usize) -> f64 {
        let (s, t, _) = self.edges[e];
        self.vertices[t] - self.vertices[s]
    }
}

/// Collapse a cascade tree onto the half line: nodes map to their root
/// distances, tree edges to coordinate pairs. Coincident distances (possible
/// for the discrete flavor, detected exactly via gap units) merge; merged
/// weights are taken from the lexicographically least preimage address.
pub fn collapse(t: &CascadeTree) -> RootedWgg {
    // bit patterns of nonnegative floats sort like the floats themselves
    let key = |node: &TreeNode| match node.dist_units {
        Some(u) => u,
        None => node.dist.to_bits(),
    };
    let mut groups: BTreeMap<u64, usize> = BTreeMap::new();
    for node in &t.nodes {
        let next = groups.len();
        groups.entry(key(node)).or_insert(next);
    }
    // BTreeMap iterates keys ascending; renumber in sorted order
    let index: BTreeMap<u64, usize> =
        groups.keys().enumerate().map(|(i, &k)| (k, i)).collect();

    let m = index.len();
    let mut vertices = vec![0.0; m];
    let mut vertex_weights = vec![0.0; m];
    let mut owner: Vec<Option<&[u32]>> = vec![None; m];
    for node in &t.nodes {
        let i = index[&key(node)];
        if owner[i].is_none_or(|a| node.address.as_slice() < a) {
            owner[i] = Some(&node.address);
            vertices[i] = node.dist;
            vertex_weights[i] = node.vertex_weight;
        }
    }

    let mut edge_map: BTreeMap<(usize, usize), (&[u32], f64)> = BTreeMap::new();
    for node in &t.nodes {
        let Some(p) = node.parent else { continue };
        let st = (index[&key(&t.nodes[p])], index[&key(node)]);
        let cand: (&[u32], f64) = (&node.address, node.edge_weight);
        edge_map
            .entry(st)
            .and_modify(|cur| {
                if cand.0 < cur.0 {
                    *cur = cand;
                }
            })
            .or_insert(cand);
    }
    let edges = edge_map.into_iter().map(|((s, t), (_, u))| (s, t, u)).collect();
    RootedWgg { vertices, vertex_weights, edges }
}

/// Heaviest root-path weight on the tree: max over all paths from the root
/// (the empty path contributes 0) of the sum of v(source) + u(edge) over
/// traversed edges.
pub fn tree_w_tilde(t: &CascadeTree) -> f64 {
    let mut val = vec![0.0f64; t.nodes.len()];
    let mut best = 0.0f64;
    for i in 1..t.nodes.len() {
        let p = t.nodes[i].parent.expect("non-root node has a parent");
        val[i] = val[p] + t.nodes[p].vertex_weight + t.nodes[i].edge_weight;
        if val[i] > best {
            best = val[i];
        }
    }
    best
}

/// Heaviest root-path weight computed on a collapsed graph; agrees with
/// [`tree_w_tilde`] whenever no distances coincide.
pub fn wgg_heaviest_from_root(g: &RootedWgg) -> f64 {
    let mut val: Vec<Option<f64>> = vec![None; g.vertices.len()];
    if !g.vertices.is_empty() {
        val[0] = Some(0.0);
    }
    let mut best = 0.0f64;
    for &(s, t, u) in &g.edges {
        if let Some(vs) = val[s] {
            let cand = vs + g.vertex_weights[s] + u;
            if val[t].is_none_or(|cur| cand > cur) {
                val[t] = Some(cand);
                if cand > best {
                    best = cand;
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ccm0Sample {
    pub wgg: RootedWgg,
    /// Heaviest root-path weight within the horizon; 0 for the empty path.
    pub w_tilde: f64,
}

/// One sample of the collapsed continuum cascade restricted to the root
/// component: the collapse of a truncated Poisson weighted tree.
pub fn simulate_ccm0(
    du: &DistributionSpec,
    dv: &DistributionSpec,
    horizon: f64,
    seed: u64,
) -> Result<Ccm0Sample> {
    let t = build_pwit(du, dv, horizon, seed)?;
    let w_tilde = tree_w_tilde(&t);
    Ok(Ccm0Sample { wgg: collapse(&t), w_tilde })
}

/// Guard for the exhaustive bijection search.
const BALL_GUARD: usize = 8;

/// Distance between two rooted wggs: integral over r of e^{-r} times the
/// capped ball distance 1 ∧ d(B_r, B_r'). The integrand is piecewise
/// constant between vertex radii, so the integral over [0, r_max] is computed
/// segment-exactly; the truncated tail is bounded by e^{-r_max}.
/// `quadrature_step` further subdivides segments; it cannot change the value
/// and is validated only for interface stability.
pub fn wgg_distance(
    g1: &RootedWgg,
    g2: &RootedWgg,
    r_max: f64,
    quadrature_step: f64,
) -> Result<f64> {
    if !(r_max > 0.0) {
        return Err(Error::parameter("r_max", "must be positive"));
    }
    if !(quadrature_step > 0.0) {
        return Err(Error::parameter("quadrature_step", "must be positive"));
    }
    for g in [g1, g2] {
        let m = g.vertices.iter().filter(|&&x| x <= r_max).count();
        if m > BALL_GUARD {
            return Err(Error::BallGuard(m, BALL_GUARD));
        }
    }
    let mut cuts: Vec<f64> = g1
        .vertices
        .iter()
        .chain(g2.vertices.iter())
        .copied()
        .filter(|&x| x > 0.0 && x < r_max)
        .collect();
    cuts.push(0.0);
    cuts.push(r_max);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let d = ball_distance(g1, g2, a)?.min(1.0);
        total += d * ((-a).exp() - (-b).exp());
    }
    Ok(total)
}

/// Exact distance between the balls of radius `r` (vertices with coordinate
/// <= r) by exhaustive root-preserving edge-structure-preserving bijections:
/// min over bijections of max_e(|Δlength| + |Δu|) + max_x |Δv|, and 1 when
/// no bijection exists.
fn ball_distance(g1: &RootedWgg, g2: &RootedWgg, r: f64) -> Result<f64> {
    let m1 = g1.vertices.iter().filter(|&&x| x <= r).count();
    let m2 = g2.vertices.iter().filter(|&&x| x <= r).count();
    if m1 > BALL_GUARD || m2 > BALL_GUARD {
        return Err(Error::BallGuard(m1.max(m2), BALL_GUARD));
    }
    if m1 != m2 {
        return Ok(1.0);
    }
    let m = m1;
    if m == 0 {
        return Ok(0.0);
    }
    let in_ball = |g: &RootedWgg| -> Vec<(usize, usize, f64)> {
        g.edges.iter().copied().filter(|&(_, t, _)| t < m).collect()
    };
    let e1 = in_ball(g1);
    let e2 = in_ball(g2);
    if e1.len() != e2.len() {
        return Ok(1.0);
    }
    let lookup: BTreeMap<(usize, usize), f64> = e2.iter().map(|&(s, t, u)| ((s, t), u)).collect();

    // permute the non-root vertices; phi[0] = 0 always
    let mut phi: Vec<usize> = (0..m).collect();
    let mut best: Option<f64> = None;
    permute(&mut phi, 1, &mut |phi| {
        let mut worst_edge = 0.0f64;
        for &(s, t, u) in &e1 {
            let (a, b) = (phi[s].min(phi[t]), phi[s].max(phi[t]));
            let Some(&u2) = lookup.get(&(a, b)) else { return };
            let dl = ((g1.vertices[t] - g1.vertices[s]) - (g2.vertices[b] - g2.vertices[a])).abs();
            let cost = dl + (u - u2).abs();
            if cost > worst_edge {
                worst_edge = cost;
            }
        }
        let worst_v = (0..m)
            .map(|i| (g1.vertex_weights[i] - g2.vertex_weights[phi[i]]).abs())
            .fold(0.0f64, f64::max);
        let cost = worst_edge + worst_v;
        if best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    });
    Ok(best.unwrap_or(1.0))
}

/// Visit every permutation of `xs[lo..]` (Heap-style recursion).
fn permute<F: FnMut(&[usize])>(xs: &mut Vec<usize>, lo: usize, visit: &mut F) {
    if lo + 1 >= xs.len() {
        visit(xs);
        return;
    }
    for i in lo..xs.len() {
        xs.swap(lo, i);
        permute(xs, lo + 1, visit);
        xs.swap(lo, i);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub reps: usize,
    /// Two-sample KS distance for the collapsed vertex count within horizon.
    pub ks_vertex_count: f64,
    /// Two-sample KS distance for the heaviest root-path weight.
    pub ks_w_tilde: f64,
}

/// Sparse-limit convergence check: per n, compare scalar functionals of the
/// collapsed discrete tree at p_n = 1/n against the continuum cascade via
/// two-sample KS statistics. Discrete and continuum samples are drawn
/// independently per n from replication-keyed streams.
pub fn convergence_test(
    n_list: &[usize],
    du: &DistributionSpec,
    dv: &DistributionSpec,
    horizon: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if reps < 500 {
        return Err(Error::parameter("reps", "must be at least 500"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        build_discrete_tree(n, 1.0 / n as f64, du, dv, horizon, 0)?; // surface errors once
        let base = StreamKey::root(seed).child(role::TREE).child(n as u64);
        let disc_key = base.child(1);
        let ccm_key = base.child(2);
        let disc = run_replications(reps, |r| {
            let s = disc_key.child(r as u64).rng().next_u64();
            let t = build_discrete_tree(n, 1.0 / n as f64, du, dv, horizon, s)
                .expect("validated inputs");
            (collapse(&t).vertices.len() as f64, tree_w_tilde(&t))
        });
        let ccm = run_replications(reps, |r| {
            let s = ccm_key.child(r as u64).rng().next_u64();
            let t = build_pwit(du, dv, horizon, s).expect("validated inputs");
            (collapse(&t).vertices.len() as f64, tree_w_tilde(&t))
        });
        let col = |xs: &[(f64, f64)], pick: fn(&(f64, f64)) -> f64| -> Vec<f64> {
            xs.iter().map(pick).collect()
        };
        rows.push(ConvergenceRow {
            n,
            reps,
            ks_vertex_count: ks_two_sample(&col(&disc, |x| x.0), &col(&ccm, |x| x.0)),
            ks_w_tilde: ks_two_sample(&col(&disc, |x| x.1), &col(&ccm, |x| x.1)),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> DistributionSpec {
        s.parse().unwrap()
    }

    fn unit_pwit(horizon: f64, seed: u64) -> CascadeTree {
        build_pwit(&spec("constant(1)"), &spec("constant(0)"), horizon, seed).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        let du = spec("constant(1)");
        let dv = spec("constant(0)");
        assert!(build_pwit(&du, &dv, 0.0, 0).is_err());
        assert!(build_pwit(&du, &dv, 20.0, 0).is_err());
        assert!(build_discrete_tree(0, 0.5, &du, &dv, 1.0, 0).is_err());
        assert!(build_discrete_tree(10, 0.0, &du, &dv, 1.0, 0).is_err());
        assert!(build_discrete_tree(10, 1.5, &du, &dv, 1.0, 0).is_err());
    }

    #[test]
    fn same_seed_same_tree() {
        let a = unit_pwit(2.0, 7);
        let b = unit_pwit(2.0, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn child_lengths_strictly_increasing() {
        for seed in 0..50 {
            let t = unit_pwit(3.0, seed);
            for (i, node) in t.nodes.iter().enumerate() {
                let mut kids: Vec<usize> = (0..t.nodes.len())
                    .filter(|&j| t.nodes[j].parent == Some(i))
                    .collect();
                kids.sort_by_key(|&j| *t.nodes[j].address.last().unwrap());
                for pair in kids.windows(2) {
                    assert!(t.edge_length(pair[0]) < t.edge_length(pair[1]));
                }
                let _ = node;
            }
        }
    }

    #[test]
    fn truncation_completeness() {
        for seed in 0..30 {
            let small = unit_pwit(1.0, seed);
            let large = unit_pwit(2.5, seed);
            let cut: Vec<&TreeNode> =
                large.nodes.iter().filter(|n| n.dist <= 1.0).collect();
            assert_eq!(cut.len(), small.nodes.len(), "seed={seed}");
            for (a, b) in cut.iter().zip(&small.nodes) {
                assert_eq!(a.address, b.address);
                assert_eq!(a.dist, b.dist);
                assert_eq!(a.edge_weight, b.edge_weight);
                assert_eq!(a.vertex_weight, b.vertex_weight);
            }
        }
    }

    #[test]
    fn root_child_count_is_poisson() {
        let t_horizon = 1.0;
        let reps = 20_000;
        let mut total = 0usize;
        for seed in 0..reps {
            let t = unit_pwit(t_horizon, seed as u64);
            total += t.nodes.iter().filter(|n| n.address.len() == 1).count();
        }
        let mean = total as f64 / reps as f64;
        // Poisson(t): mean t, variance t
        let se = (t_horizon / reps as f64).sqrt();
        assert!((mean - t_horizon).abs() < 4.0 * se, "{mean}");
    }

    #[test]
    fn discrete_p_one_lattice() {
        let t = build_discrete_tree(5, 1.0, &spec("constant(1)"), &spec("constant(0)"), 1.0, 3)
            .unwrap();
        // all gaps are exactly one unit: the k-th child sits at offset k/5
        for i in 1..t.nodes.len() {
            let k = *t.nodes[i].address.last().unwrap() as f64;
            assert!((t.edge_length(i) - k / 5.0).abs() < 1e-15);
        }
        // five generations fit in the horizon
        assert!(t.nodes.iter().any(|n| n.address.len() == 5));
    }

    #[test]
    fn discrete_gap_law() {
        let (n, p) = (100, 0.01);
        let reps = 30_000;
        let mut firsts = Vec::with_capacity(reps);
        for seed in 0..reps {
            let t = build_discrete_tree(n, p, &spec("constant(1)"), &spec("constant(0)"), 0.5, seed as u64)
                .unwrap();
            // first root gap, when it lands inside the horizon
            if let Some(node) = t.nodes.iter().find(|x| x.address == [1]) {
                firsts.push(node.dist_units.unwrap());
            }
        }
        let total = reps as f64;
        for k in 1..=5u64 {
            let frac = firsts.iter().filter(|&&g| g > k).count() as f64 / total;
            // window truncation at 50 units removes the far tail
            let expect = (1.0 - p).powi(k as i32) - (1.0 - p).powi(50);
            let se = (expect * (1.0 - expect) / total).sqrt();
            assert!((frac - expect).abs() < 3.0 * se + 1e-3, "k={k}: {frac} vs {expect}");
        }
    }

    #[test]
    fn collapse_chain_fixture() {
        // single-child chain with gaps 0.5 and 0.7
        let nodes = vec![
            TreeNode {
                address: vec![],
                parent: None,
                dist: 0.0,
                dist_units: None,
                edge_weight: 0.0,
                vertex_weight: 10.0,
            },
            TreeNode {
                address: vec![1],
                parent: Some(0),
                dist: 0.5,
                dist_units: None,
                edge_weight: 2.0,
                vertex_weight: 11.0,
            },
            TreeNode {
                address: vec![1, 1],
                parent: Some(1),
                dist: 1.2,
                dist_units: None,
                edge_weight: 3.0,
                vertex_weight: 12.0,
            },
        ];
        let t = CascadeTree { nodes, horizon: 2.0, flavor: Flavor::Pwit };
        let g = collapse(&t);
        assert_eq!(g.vertices, vec![0.0, 0.5, 1.2]);
        assert_eq!(g.vertex_weights, vec![10.0, 11.0, 12.0]);
        assert_eq!(g.edges, vec![(0, 1, 2.0), (1, 2, 3.0)]);
        assert!((g.edge_length(1) - 0.7).abs() < 1e-15);
        assert_eq!(tree_w_tilde(&t), 10.0 + 2.0 + 11.0 + 3.0);
        assert_eq!(wgg_heaviest_from_root(&g), 26.0);
    }

    fn coincidence_fixture() -> CascadeTree {
        // units: root=0, [1]=1, [2]=2, [1,1]=2 (ties [2]), [1,1,1]=3, [2,1]=3
        let mk = |address: Vec<u32>, parent, units: u64, ew, vw| TreeNode {
            address,
            parent,
            dist: units as f64 / 1.0,
            dist_units: Some(units),
            edge_weight: ew,
            vertex_weight: vw,
        };
        CascadeTree {
            nodes: vec![
                mk(vec![], None, 0, 0.0, 0.5),
                mk(vec![1], Some(0), 1, 1.0, 1.5),
                mk(vec![2], Some(0), 2, 2.0, 2.5),
                mk(vec![1, 1], Some(1), 2, 3.0, 3.5),
                mk(vec![1, 1, 1], Some(3), 3, 4.0, 4.5),
                mk(vec![2, 1], Some(2), 3, 5.0, 5.5),
            ],
            horizon: 4.0,
            flavor: Flavor::Discrete { n: 1, p_n: 0.5 },
        }
    }

    #[test]
    fn collapse_breaks_ties_lexicographically() {
        let g = collapse(&coincidence_fixture());
        assert_eq!(g.vertices, vec![0.0, 1.0, 2.0, 3.0]);
        // vertex 2: preimages [2] and [1,1]; [1,1] is lexicographically least
        assert_eq!(g.vertex_weights, vec![0.5, 1.5, 3.5, 4.5]);
        // edge (2,3): preimages [1,1,1] (u=4) and [2,1] (u=5); [1,1,1] wins.
        // vertex 3's weight comes from [1,1,1] < [2,1] likewise.
        assert_eq!(
            g.edges,
            vec![(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0), (2, 3, 4.0)]
        );
    }

    #[test]
    fn collapse_preserves_distances_and_weights() {
        let du = spec("exponential(1)");
        let dv = spec("uniform(0,1)");
        for seed in 0..50 {
            let t = build_pwit(&du, &dv, 2.0, seed).unwrap();
            let g = collapse(&t);
            // continuous gaps: distances are a.s. distinct, so the collapse
            // is a relabeling
            assert_eq!(g.vertices.len(), t.nodes.len(), "seed={seed}");
            let mut dists: Vec<f64> = t.nodes.iter().map(|n| n.dist).collect();
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(g.vertices, dists);
            assert_eq!(g.edges.len(), t.nodes.len() - 1);
            // heaviest root path survives the collapse bit-exactly
            assert_eq!(wgg_heaviest_from_root(&g), tree_w_tilde(&t), "seed={seed}");
        }
    }

    #[test]
    fn w_tilde_tail_matches_poisson_analytics() {
        let reps = 20_000;
        let (mut hits_half, mut hits_threehalf) = (0usize, 0usize);
        for seed in 0..reps {
            let s = simulate_ccm0(&spec("constant(1)"), &spec("constant(0)"), 1.0, seed as u64)
                .unwrap();
            if s.w_tilde > 0.5 {
                hits_half += 1;
            }
            if s.w_tilde > 1.5 {
                hits_threehalf += 1;
            }
        }
        let n = reps as f64;
        // one unit edge within horizon 1: 1 - e^{-1}
        let p1 = 1.0 - (-1.0f64).exp();
        let f1 = hits_half as f64 / n;
        assert!((f1 - p1).abs() < 3.0 * (p1 * (1.0 - p1) / n).sqrt(), "{f1} vs {p1}");
        // two unit edges within horizon 1: 1 - e^{-(t-1+e^{-t})} at t=1
        let p2 = 1.0 - (-(0.0 + (-1.0f64).exp())).exp();
        let f2 = hits_threehalf as f64 / n;
        assert!((f2 - p2).abs() < 3.0 * (p2 * (1.0 - p2) / n).sqrt(), "{f2} vs {p2}");
    }

    fn chain_wgg(coords: &[f64], us: &[f64], vs: &[f64]) -> RootedWgg {
        RootedWgg {
            vertices: coords.to_vec(),
            vertex_weights: vs.to_vec(),
            edges: us.iter().enumerate().map(|(i, &u)| (i, i + 1, u)).collect(),
        }
    }

    #[test]
    fn distance_to_self_is_zero() {
        let t = unit_pwit(1.5, 4);
        let g = collapse(&t);
        if g.vertices.len() <= BALL_GUARD {
            assert_eq!(wgg_distance(&g, &g, 3.0, 0.01).unwrap(), 0.0);
        }
    }

    #[test]
    fn distance_single_edge_weight_gap() {
        let r1 = 0.6;
        let delta = 0.25;
        let a = chain_wgg(&[0.0, r1], &[1.0], &[0.0, 0.0]);
        let b = chain_wgg(&[0.0, r1], &[1.0 + delta], &[0.0, 0.0]);
        let r_max = 4.0;
        let d = wgg_distance(&a, &b, r_max, 0.01).unwrap();
        let expect = delta * ((-r1).exp() - (-r_max).exp());
        assert!((d - expect).abs() < 1e-12, "{d} vs {expect}");
    }

    #[test]
    fn distance_caps_on_structural_mismatch() {
        let root_only = chain_wgg(&[0.0], &[], &[0.0]);
        let chain = chain_wgg(&[0.0, 0.7], &[1.0], &[0.0, 0.0]);
        let r_max = 5.0;
        let d = wgg_distance(&root_only, &chain, r_max, 0.01).unwrap();
        // balls differ exactly for r >= 0.7, contributing the cap 1
        let expect = (-0.7f64).exp() - (-r_max).exp();
        assert!((d - expect).abs() < 1e-12, "{d}");
    }

    #[test]
    fn distance_metric_axioms_on_fixtures() {
        let du = spec("uniform(0,1)");
        let dv = spec("uniform(0,1)");
        let mut gs = Vec::new();
        let mut seed = 0;
        while gs.len() < 20 {
            let t = build_pwit(&du, &dv, 1.2, seed).unwrap();
            seed += 1;
            let g = collapse(&t);
            if g.vertices.len() <= BALL_GUARD {
                gs.push(g);
            }
        }
        let d = |a: &RootedWgg, b: &RootedWgg| wgg_distance(a, b, 6.0, 0.01).unwrap();
        for i in 0..gs.len() {
            for j in 0..gs.len() {
                let dij = d(&gs[i], &gs[j]);
                assert!(dij >= 0.0);
                assert!((dij - d(&gs[j], &gs[i])).abs() < 1e-12, "symmetry {i},{j}");
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    let lhs = d(&gs[i], &gs[k]);
                    let rhs = d(&gs[i], &gs[j]) + d(&gs[j], &gs[k]);
                    assert!(lhs <= rhs + 1e-9, "triangle {i},{j},{k}: {lhs} > {rhs}");
                }
            }
        }
    }

    #[test]
    fn distance_guards_large_balls() {
        let t = (0..)
            .map(|s| unit_pwit(5.0, s))
            .find(|t| t.nodes.len() > BALL_GUARD)
            .unwrap();
        let g = collapse(&t);
        assert!(matches!(
            wgg_distance(&g, &g, 5.0, 0.01),
            Err(Error::BallGuard(_, _))
        ));
    }

    #[test]
    fn convergence_smoke() {
        let rows = convergence_test(
            &[16, 64],
            &spec("constant(1)"),
            &spec("constant(0)"),
            1.0,
            600,
            5,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.ks_vertex_count >= 0.0 && row.ks_vertex_count <= 1.0);
            assert!(row.ks_w_tilde >= 0.0 && row.ks_w_tilde <= 1.0);
        }
        // larger n should already be visibly closer at this scale
        assert!(rows[1].ks_w_tilde < rows[0].ks_w_tilde + 2.0 * (2.0f64 / 600.0).sqrt());
        assert!(convergence_test(&[16], &spec("constant(1)"), &spec("constant(0)"), 1.0, 100, 5).is_err());
    }

    #[test]
    fn discrete_collapse_matches_window_law() {
        // the collapsed discrete tree has the law of the window graph at
        // p = 1/n restricted to the root component: compare the heaviest
        // weight from 0 and the reachable-vertex count by two-sample KS
        use crate::graph::{GenerationMode, GraphWindow};
        use crate::heaviest::{forward_values, Variant};
        let du = spec("constant(1)");
        let dv = spec("constant(0)");
        let horizon = 2.0;
        let reps = 800usize;
        for n in [64usize, 256] {
            let p_n = 1.0 / n as f64;
            let tree_key = StreamKey::root(77).child(role::TREE).child(n as u64);
            let win_key = StreamKey::root(78).child(n as u64);
            let tree_samples: Vec<(f64, f64)> = run_replications(reps, |r| {
                let s = tree_key.child(r as u64).rng().next_u64();
                let t = build_discrete_tree(n, p_n, &du, &dv, horizon, s).unwrap();
                (collapse(&t).vertices.len() as f64, tree_w_tilde(&t))
            });
            let win_samples: Vec<(f64, f64)> = run_replications(reps, |r| {
                let s = win_key.child(r as u64).rng().next_u64();
                let len = (horizon * n as f64) as usize;
                let w = GraphWindow::generate(len, p_n, &du, &dv, s, GenerationMode::Sparse)
                    .unwrap();
                let vals = forward_values(&w, 0, len, Variant::Full);
                let reachable =
                    1 + vals.iter().filter(|v| v.is_some()).count();
                let heaviest = vals
                    .iter()
                    .flatten()
                    .fold(0.0f64, |acc, &v| acc.max(v));
                (reachable as f64, heaviest)
            });
            let crit = 1.63 * (2.0 / reps as f64).sqrt(); // 1% two-sample level
            let ks_count = ks_two_sample(
                &tree_samples.iter().map(|x| x.0).collect::<Vec<_>>(),
                &win_samples.iter().map(|x| x.0).collect::<Vec<_>>(),
            );
            let ks_w = ks_two_sample(
                &tree_samples.iter().map(|x| x.1).collect::<Vec<_>>(),
                &win_samples.iter().map(|x| x.1).collect::<Vec<_>>(),
            );
            assert!(ks_count < crit, "n={n} count: {ks_count} vs {crit}");
            assert!(ks_w < crit, "n={n} w: {ks_w} vs {crit}");
        }
    }

    #[test]
    fn tree_serializes() {
        let t = unit_pwit(1.5, 9);
        let json = serde_json::to_string(&t).unwrap();
        let back: CascadeTree = serde_json::from_str(&json).unwrap();
        assert_eq!(t, back);
    }
}
