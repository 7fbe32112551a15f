//! Simple d-regular digraphs: configuration-model sampling with rejection to
//! the simple ensemble, undirected balls with boundary data, excess
//! statistics, and the radius scales of the local analysis.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A d-regular digraph stored as per-vertex ordered out-edge lists.
///
/// Immutable after construction; all queries are read-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    d: usize,
    out_edges: Vec<Vec<u32>>,
    in_edges: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct DigraphRepr {
    n: usize,
    d: usize,
    out_edges: Vec<Vec<u32>>,
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        DigraphRepr { n: self.n, d: self.d, out_edges: self.out_edges.clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = DigraphRepr::deserialize(de)?;
        Digraph::from_out_edges(repr.n, repr.d, repr.out_edges).map_err(serde::de::Error::custom)
    }
}

impl Digraph {
    /// Build from out-edge lists, checking d-regularity in both directions.
    /// Self-loops and repeated edges are allowed here (configuration model);
    /// use [`Digraph::is_simple`] to test for the simple ensemble.
    pub fn from_out_edges(n: usize, d: usize, out_edges: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidParameter("need n >= 1 and d >= 1".into()));
        }
        if out_edges.len() != n {
            return Err(Error::InvalidParameter(format!(
                "out_edges has {} rows, expected {n}",
                out_edges.len()
            )));
        }
        let mut in_deg = vec![0usize; n];
        for (v, heads) in out_edges.iter().enumerate() {
            if heads.len() != d {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} has out-degree {}, expected {d}",
                    heads.len()
                )));
            }
            for &h in heads {
                let h = h as usize;
                if h >= n {
                    return Err(Error::UnknownVertex(h));
                }
                in_deg[h] += 1;
            }
        }
        for (v, &deg) in in_deg.iter().enumerate() {
            if deg != d {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} has in-degree {deg}, expected {d}"
                )));
            }
        }
        let in_edges = transpose(n, &out_edges);
        Ok(Self { n, d, out_edges, in_edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out_edges[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.in_edges[v]
    }

    pub fn out_edge_lists(&self) -> &[Vec<u32>] {
        &self.out_edges
    }

    pub fn has_edge(&self, tail: usize, head: usize) -> bool {
        self.out_edges[tail].contains(&(head as u32))
    }

    /// Directed edges in deterministic (tail, slot) order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out_edges
            .iter()
            .enumerate()
            .flat_map(|(v, heads)| heads.iter().map(move |&h| (v as u32, h)))
    }

    /// No self-loops and no repeated directed edge.
    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.d);
        for (v, heads) in self.out_edges.iter().enumerate() {
            seen.clear();
            for &h in heads {
                if h as usize == v || !seen.insert(h) {
                    return false;
                }
            }
        }
        true
    }

    /// Undirected neighbors on the simple skeleton (antiparallel pairs
    /// collapse to one edge), deduplicated, ascending.
    pub fn undirected_neighbors(&self, v: usize) -> Vec<u32> {
        let mut nb: Vec<u32> = self.out_edges[v]
            .iter()
            .chain(self.in_edges[v].iter())
            .copied()
            .filter(|&u| u as usize != v)
            .collect();
        nb.sort_unstable();
        nb.dedup();
        nb
    }

    /// Replace heads in specific out-slots, returning a new graph. Used by
    /// the switching construction so edge-slot order survives a switch.
    pub(crate) fn with_replaced_heads(&self, replacements: &[(usize, usize, u32)]) -> Result<Self> {
        let mut out_edges = self.out_edges.clone();
        for &(tail, slot, new_head) in replacements {
            if tail >= self.n || slot >= self.d || new_head as usize >= self.n {
                return Err(Error::InvalidParameter("replacement out of range".into()));
            }
            out_edges[tail][slot] = new_head;
        }
        let in_edges = transpose(self.n, &out_edges);
        Ok(Self { n: self.n, d: self.d, out_edges, in_edges })
    }

    /// Compact edge list, one `tail,head` line per directed edge in
    /// (tail, slot) order.
    pub fn to_edge_list_csv(&self) -> String {
        let mut s = String::with_capacity(self.n * self.d * 8);
        for (t, h) in self.edges() {
            s.push_str(&format!("{t},{h}\n"));
        }
        s
    }

    /// Parse the edge-list CSV produced by [`Digraph::to_edge_list_csv`].
    pub fn from_edge_list_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<(u32, u32)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (t, h) = line.split_once(',').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected tail,head", lineno + 1))
            })?;
            let t: u32 = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("line {}: bad tail", lineno + 1)))?;
            let h: u32 = h
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("line {}: bad head", lineno + 1)))?;
            rows.push((t, h));
        }
        if rows.is_empty() {
            return Err(Error::InvalidParameter("empty edge list".into()));
        }
        let n = rows.iter().map(|&(t, h)| t.max(h) as usize + 1).max().unwrap();
        if rows.len() % n != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} edges cannot form a regular digraph on {n} vertices",
                rows.len()
            )));
        }
        let d = rows.len() / n;
        let mut out_edges = vec![Vec::with_capacity(d); n];
        for (t, h) in rows {
            out_edges[t as usize].push(h);
        }
        Digraph::from_out_edges(n, d, out_edges)
    }
}

fn transpose(n: usize, out_edges: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut in_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (v, heads) in out_edges.iter().enumerate() {
        for &h in heads {
            in_edges[h as usize].push(v as u32);
        }
    }
    in_edges
}

/// One configuration-model draw: a uniform matching of out-stubs to in-stubs.
/// Self-loops and multiple edges are allowed. Deterministic per seed.
pub fn sample_configuration(n: usize, d: usize, seed: u64) -> Result<Digraph> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidParameter("need n >= 2 and d >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    configuration_draw(n, d, &mut rng)
}

fn configuration_draw(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Digraph> {
    let mut in_stubs: Vec<u32> = (0..(n * d) as u32).collect();
    in_stubs.shuffle(rng);
    let mut out_edges = vec![Vec::with_capacity(d); n];
    for (out_stub, &in_stub) in in_stubs.iter().enumerate() {
        let tail = out_stub / d;
        let head = in_stub as usize / d;
        out_edges[tail].push(head as u32);
    }
    Digraph::from_out_edges(n, d, out_edges)
}

/// Rejection-sample a uniform simple d-regular digraph, also reporting the
/// number of configuration draws used.
pub fn sample_simple_counted(
    n: usize,
    d: usize,
    seed: u64,
    max_retries: usize,
) -> Result<(Digraph, usize)> {
    if n <= d {
        return Err(Error::InvalidParameter(format!(
            "simple d-regular digraph needs n > d (n={n}, d={d})"
        )));
    }
    if max_retries == 0 {
        return Err(Error::InvalidParameter("max_retries must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_retries {
        let g = configuration_draw(n, d, &mut rng)?;
        if g.is_simple() {
            return Ok((g, attempt));
        }
    }
    Err(Error::RetryExhausted { tries: max_retries })
}

/// Rejection-sample a uniform simple d-regular digraph.
pub fn sample_simple(n: usize, d: usize, seed: u64, max_retries: usize) -> Result<Digraph> {
    sample_simple_counted(n, d, seed, max_retries).map(|(g, _)| g)
}

/// A boundary edge of a ball: `inside` is the endpoint in the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub inside: u32,
    pub outside: u32,
    /// true when the edge is oriented inside -> outside
    pub outward: bool,
}

/// An undirected-radius ball together with its induced directed subgraph and
/// oriented boundary edges.
#[derive(Debug, Clone)]
pub struct BallView {
    pub centers: Vec<usize>,
    pub radius: usize,
    /// Ball vertices, ascending.
    pub vertices: Vec<u32>,
    /// Undirected distances from the center set, aligned with `vertices`.
    pub distances: Vec<u32>,
    /// Directed edges with both endpoints inside, in (tail, slot) order.
    pub induced_edges: Vec<(u32, u32)>,
    /// Boundary edges in (inside vertex, out-slots then in-slots) order.
    pub boundary_edges: Vec<BoundaryEdge>,
    pub(crate) membership: Vec<bool>,
}

impl BallView {
    pub fn contains(&self, v: usize) -> bool {
        self.membership[v]
    }
}

/// BFS ball of given undirected radius around a center set.
pub fn ball(g: &Digraph, centers: &[usize], radius: usize) -> Result<BallView> {
    if centers.is_empty() {
        return Err(Error::InvalidParameter("centers must be nonempty".into()));
    }
    let n = g.n_vertices();
    for &c in centers {
        if c >= n {
            return Err(Error::UnknownVertex(c));
        }
    }
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &c in centers {
        if dist[c] == u32::MAX {
            dist[c] = 0;
            queue.push_back(c as u32);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize];
        if dv as usize >= radius {
            continue;
        }
        for u in g.undirected_neighbors(v as usize) {
            if dist[u as usize] == u32::MAX {
                dist[u as usize] = dv + 1;
                queue.push_back(u);
            }
        }
    }
    let mut vertices: Vec<u32> = (0..n as u32).filter(|&v| dist[v as usize] != u32::MAX).collect();
    vertices.sort_unstable();
    let membership: Vec<bool> = (0..n).map(|v| dist[v] != u32::MAX).collect();
    let mut induced_edges = Vec::new();
    let mut boundary_edges = Vec::new();
    for &v in &vertices {
        for &h in g.out_neighbors(v as usize) {
            if membership[h as usize] {
                induced_edges.push((v, h));
            } else {
                boundary_edges.push(BoundaryEdge { inside: v, outside: h, outward: true });
            }
        }
        for &t in g.in_neighbors(v as usize) {
            if !membership[t as usize] {
                boundary_edges.push(BoundaryEdge { inside: v, outside: t, outward: false });
            }
        }
    }
    let distances = vertices.iter().map(|&v| dist[v as usize]).collect();
    Ok(BallView {
        centers: centers.to_vec(),
        radius,
        vertices,
        distances,
        induced_edges,
        boundary_edges,
        membership,
    })
}

/// Cycle-space statistics of a neighborhood's undirected simple skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodStats {
    pub vertex_count: usize,
    /// Undirected simple-skeleton edge count.
    pub edge_count: usize,
    pub components: usize,
    /// edges - vertices + components
    pub excess: usize,
    pub is_tree: bool,
}

/// Excess and tree-likeness of a ball, computed on the undirected simple
/// skeleton of the induced subgraph.
pub fn neighborhood_stats(view: &BallView) -> NeighborhoodStats {
    let vs = &view.vertices;
    let mut undirected: HashSet<(u32, u32)> = HashSet::new();
    for &(t, h) in &view.induced_edges {
        if t == h {
            continue;
        }
        undirected.insert((t.min(h), t.max(h)));
    }
    // components via union-find over ball vertices
    let mut parent: Vec<usize> = (0..vs.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let pos = |v: u32| vs.binary_search(&v).expect("vertex in ball");
    for &(a, b) in &undirected {
        let (ra, rb) = (find(&mut parent, pos(a)), find(&mut parent, pos(b)));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut roots = HashSet::new();
    for i in 0..vs.len() {
        let r = find(&mut parent, i);
        roots.insert(r);
    }
    let components = roots.len();
    let edge_count = undirected.len();
    let vertex_count = vs.len();
    let excess = edge_count + components - vertex_count;
    NeighborhoodStats {
        vertex_count,
        edge_count,
        components,
        excess,
        is_tree: excess == 0 && components == 1,
    }
}

/// The three radius scales of the local analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusParams {
    /// R = (c/4) log_{d-1} n
    pub big_r: usize,
    /// r = R/8 (largest value of the allowed window)
    pub r: usize,
    /// ell = a log_{d-1} log n (smallest value of the allowed window)
    pub ell: usize,
}

/// Evaluate the paper-scale radius formulas. Returns `ScaleCollapse` when the
/// ordering R > r > ell cannot hold at this n, which is the typical desk-scale
/// outcome; callers then pass explicit radii instead.
pub fn radius_parameters(n: usize, d: usize, frak_c: f64, frak_a: f64) -> Result<RadiusParams> {
    if !(0.0 < frak_c && frak_c < 1.0) {
        return Err(Error::InvalidParameter("need 0 < c < 1".into()));
    }
    if frak_a < 12.0 {
        return Err(Error::InvalidParameter("need a >= 12".into()));
    }
    if n < 3 {
        return Err(Error::InvalidParameter("need n >= 3".into()));
    }
    if d < 3 {
        return Err(Error::InvalidParameter("need d >= 3".into()));
    }
    let base = (d - 1) as f64;
    let log_n = (n as f64).ln() / base.ln();
    let big_r = ((frak_c / 4.0) * log_n).floor() as usize;
    let r = (big_r as f64 / 8.0).floor() as usize;
    let ell = (frak_a * ((n as f64).ln()).ln() / base.ln()).floor() as usize;
    if big_r > r && r > ell {
        Ok(RadiusParams { big_r, r, ell })
    } else {
        Err(Error::ScaleCollapse { big_r, r, ell })
    }
}
