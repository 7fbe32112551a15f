//! Oriented d-regular trees, boundary-weight extensions of their
//! Hermitizations, and the exact Green's-function machinery on them: the
//! two-type leaf-to-root Schur recursion, an explicit-graph elimination
//! oracle, the i/o fixed-point maps, boundary sums, and path factorizations.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::selfconsistent::{solve_m_infty, SelfConsistentSolution, SpectralPoint};

/// 2x2 complex block; index 0 is the vertex row v, index 1 the row v + n.
pub type Block2 = [[C64; 2]; 2];

fn zero2() -> Block2 {
    let z = C64::new(0.0, 0.0);
    [[z, z], [z, z]]
}

fn inv2(b: &Block2, depth: usize) -> Result<Block2> {
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let scale = b[0][0].norm() + b[0][1].norm() + b[1][0].norm() + b[1][1].norm();
    if det.norm() <= 1e-300 * (1.0 + scale * scale) {
        return Err(Error::SingularPivot { depth });
    }
    Ok([[b[1][1] / det, -b[0][1] / det], [-b[1][0] / det, b[0][0] / det]])
}

fn mul2(a: &Block2, b: &Block2) -> Block2 {
    let mut out = zero2();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn neg2(a: &Block2) -> Block2 {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

/// The three tree flavors: the full tree and the two one-deficit trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeKind {
    /// Root has d out-edges and d in-edges.
    T,
    /// Root has d out-edges and d-1 in-edges.
    T1,
    /// Root has d-1 out-edges and d in-edges.
    T2,
}

impl TreeKind {
    fn root_children(self, d: usize) -> (usize, usize) {
        match self {
            TreeKind::T => (d, d),
            TreeKind::T1 => (d, d - 1),
            TreeKind::T2 => (d - 1, d),
        }
    }
}

const MAX_TREE_VERTICES: u128 = 4_000_000;

/// A truncated oriented regular tree with BFS vertex numbering (root = 0).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientedTree {
    pub kind: TreeKind,
    pub depth: usize,
    pub d: usize,
    pub out_edges: Vec<Vec<u32>>,
    pub in_edges: Vec<Vec<u32>>,
    /// (parent, true when the parent edge points parent -> child)
    pub parent: Vec<Option<(u32, bool)>>,
    pub depth_of: Vec<u32>,
}

impl OrientedTree {
    pub fn n_vertices(&self) -> usize {
        self.out_edges.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_edges[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_edges[v].len()
    }
}

fn tree_vertex_count(kind: TreeKind, depth: usize, d: usize) -> u128 {
    let b = (2 * d - 1) as u128;
    let mut level: u128 = match kind {
        TreeKind::T => (2 * d) as u128,
        _ => (2 * d - 1) as u128,
    };
    let mut total: u128 = 1;
    for _ in 0..depth {
        total += level;
        level = level.saturating_mul(b);
    }
    total
}

/// Build the depth-K truncation of the oriented tree, level by level, with
/// out-children attached before in-children at every vertex.
pub fn build_tree(kind: TreeKind, depth: usize, d: usize) -> Result<OrientedTree> {
    if d < 2 {
        return Err(Error::InvalidParameter("tree construction needs d >= 2".into()));
    }
    let total = tree_vertex_count(kind, depth, d);
    if total > MAX_TREE_VERTICES {
        return Err(Error::SizeOverflow(format!(
            "tree would have {total} vertices (cap {MAX_TREE_VERTICES})"
        )));
    }
    let total = total as usize;
    let mut out_edges: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut in_edges: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut parent: Vec<Option<(u32, bool)>> = vec![None; total];
    let mut depth_of: Vec<u32> = vec![0; total];

    let mut next = 1u32;
    // (vertex, #out-children, #in-children)
    let mut queue = std::collections::VecDeque::new();
    if depth > 0 {
        let (o, i) = kind.root_children(d);
        queue.push_back((0u32, o, i));
    }
    while let Some((v, n_out, n_in)) = queue.pop_front() {
        let child_depth = depth_of[v as usize] + 1;
        for _ in 0..n_out {
            let c = next;
            next += 1;
            out_edges[v as usize].push(c);
            in_edges[c as usize].push(v);
            parent[c as usize] = Some((v, true));
            depth_of[c as usize] = child_depth;
            if (child_depth as usize) < depth {
                // parent edge points toward the child: d out, d-1 in below
                queue.push_back((c, d, d - 1));
            }
        }
        for _ in 0..n_in {
            let c = next;
            next += 1;
            out_edges[c as usize].push(v);
            in_edges[v as usize].push(c);
            parent[c as usize] = Some((v, false));
            depth_of[c as usize] = child_depth;
            if (child_depth as usize) < depth {
                // parent edge points away from the child: d-1 out, d in below
                queue.push_back((c, d - 1, d));
            }
        }
    }
    debug_assert_eq!(next as usize, total);
    Ok(OrientedTree { kind, depth, d, out_edges, in_edges, parent, depth_of })
}

/// A boundary-weight extension of the Hermitization of a digraph whose
/// degrees are at most d. Vertex v occupies rows v and v + n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeExtension {
    pub d: usize,
    pub z: C64,
    pub w: C64,
    pub delta1: C64,
    pub delta2: C64,
    /// (def_out, def_in) per vertex.
    pub deficits: Vec<(u32, u32)>,
    pub out_edges: Vec<Vec<u32>>,
}

impl TreeExtension {
    pub fn n_vertices(&self) -> usize {
        self.out_edges.len()
    }

    fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n_vertices();
        let mut dout = vec![0usize; n];
        let mut din = vec![0usize; n];
        for (v, heads) in self.out_edges.iter().enumerate() {
            dout[v] = heads.len();
            for &h in heads {
                din[h as usize] += 1;
            }
        }
        (dout, din)
    }

    /// Diagonal correction coefficients ((d - d_out - def_out)/(d-1), same
    /// with in-quantities) per vertex.
    pub fn coefficients(&self) -> Vec<(f64, f64)> {
        let (dout, din) = self.degrees();
        let dm1 = (self.d - 1) as f64;
        (0..self.n_vertices())
            .map(|v| {
                let a = (self.d as f64 - dout[v] as f64 - self.deficits[v].0 as f64) / dm1;
                let b = (self.d as f64 - din[v] as f64 - self.deficits[v].1 as f64) / dm1;
                (a, b)
            })
            .collect()
    }

    /// Assemble the dense 2n x 2n extension matrix.
    pub fn matrix(&self) -> Array2<C64> {
        let n = self.n_vertices();
        let kappa = 1.0 / ((self.d - 1) as f64).sqrt();
        let mut h = Array2::from_elem((2 * n, 2 * n), C64::new(0.0, 0.0));
        for i in 0..2 * n {
            h[[i, i]] = -self.z;
        }
        for v in 0..n {
            h[[v, v + n]] -= self.w;
            h[[v + n, v]] -= self.w.conj();
        }
        for (v, heads) in self.out_edges.iter().enumerate() {
            for &c in heads {
                let c = c as usize;
                h[[v, c + n]] += C64::new(kappa, 0.0);
                h[[c + n, v]] += C64::new(kappa, 0.0);
            }
        }
        let coef = self.coefficients();
        for (v, (a, b)) in coef.into_iter().enumerate() {
            h[[v, v]] -= self.delta1 * a;
            h[[v + n, v + n]] -= self.delta2 * b;
        }
        h
    }
}

/// Build an extension after validating the deficit ranges.
pub fn extend(
    out_edges: &[Vec<u32>],
    d: usize,
    deficits: &[(u32, u32)],
    delta1: C64,
    delta2: C64,
    z: C64,
    w: C64,
) -> Result<TreeExtension> {
    let n = out_edges.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty vertex set".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("extension needs d >= 2".into()));
    }
    if deficits.len() != n {
        return Err(Error::InvalidParameter("deficit list length mismatch".into()));
    }
    let mut din = vec![0usize; n];
    for heads in out_edges {
        for &h in heads {
            if h as usize >= n {
                return Err(Error::UnknownVertex(h as usize));
            }
            din[h as usize] += 1;
        }
    }
    for v in 0..n {
        let dout = out_edges[v].len();
        if dout > d || din[v] > d {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} exceeds degree bound d = {d}"
            )));
        }
        if deficits[v].0 as usize > d - dout || deficits[v].1 as usize > d - din[v] {
            return Err(Error::DeficitOutOfRange { vertex: v });
        }
    }
    Ok(TreeExtension {
        d,
        z,
        w,
        delta1,
        delta2,
        deficits: deficits.to_vec(),
        out_edges: out_edges.to_vec(),
    })
}

/// The plain extension (no deficits) of a tree.
pub fn ext(tree: &OrientedTree, delta1: C64, delta2: C64, z: C64, w: C64) -> Result<TreeExtension> {
    let deficits = vec![(0, 0); tree.n_vertices()];
    extend(&tree.out_edges, tree.d, &deficits, delta1, delta2, z, w)
}

/// Extension with one in-deficit at the root.
pub fn ext_i(tree: &OrientedTree, delta1: C64, delta2: C64, z: C64, w: C64) -> Result<TreeExtension> {
    let mut deficits = vec![(0, 0); tree.n_vertices()];
    deficits[0] = (0, 1);
    extend(&tree.out_edges, tree.d, &deficits, delta1, delta2, z, w)
}

/// Extension with one out-deficit at the root.
pub fn ext_o(tree: &OrientedTree, delta1: C64, delta2: C64, z: C64, w: C64) -> Result<TreeExtension> {
    let mut deficits = vec![(0, 0); tree.n_vertices()];
    deficits[0] = (1, 0);
    extend(&tree.out_edges, tree.d, &deficits, delta1, delta2, z, w)
}

/// Full dense inverse of the extension matrix; the oracle every recursive
/// path is checked against.
pub fn green_dense(extension: &TreeExtension) -> Result<Array2<C64>> {
    linalg::invert(&extension.matrix())
}

/// Closed-form 2x2 root blocks of the infinite-tree Green's functions,
/// derived from the solved self-consistent equation.
pub fn root_entries_recursive(kind: TreeKind, z: C64, w: C64, d: u32) -> Result<Block2> {
    let point = SpectralPoint::scaled(z, w, d)?;
    let sol = solve_m_infty(&point)?;
    Ok(root_block_from_solution(kind, &sol))
}

pub fn root_block_from_solution(kind: TreeKind, sol: &SelfConsistentSolution) -> Block2 {
    match kind {
        TreeKind::T1 => [[sol.m_sd, sol.m_uod], [sol.m_lod, sol.m_infty]],
        TreeKind::T2 => [[sol.m_infty, sol.m_uod], [sol.m_lod, sol.m_sd]],
        TreeKind::T => [[sol.mt_d, sol.mt_uod], [sol.mt_lod, sol.mt_d]],
    }
}

/// Leaf-to-root two-type ladder: returns the eliminated subtree blocks
/// (type-A = T2-like, type-B = T1-like) with `levels` remaining levels.
fn type_ladder(
    levels: usize,
    d: usize,
    delta1: C64,
    delta2: C64,
    z: C64,
    w: C64,
) -> Result<(Block2, Block2)> {
    let dm1 = (d - 1) as f64;
    let c = d as f64 / dm1;
    let base = |a: f64, b: f64| -> Block2 {
        [
            [-z - delta1 * a, -w],
            [-w.conj(), -z - delta2 * b],
        ]
    };
    // leaves: type A has only its outgoing parent edge, type B only its
    // incoming parent edge
    let mut s_a = inv2(&base(1.0, c), 0)?;
    let mut s_b = inv2(&base(c, 1.0), 0)?;
    for level in 1..=levels {
        let mut m_a = base(0.0, 0.0);
        // type A: d-1 out-children (type B), d in-children (type A)
        m_a[0][0] -= s_b[1][1] * (dm1 / dm1);
        m_a[1][1] -= s_a[0][0] * c;
        let mut m_b = base(0.0, 0.0);
        // type B: d out-children (type B), d-1 in-children (type A)
        m_b[0][0] -= s_b[1][1] * c;
        m_b[1][1] -= s_a[0][0] * (dm1 / dm1);
        let new_a = inv2(&m_a, level)?;
        let new_b = inv2(&m_b, level)?;
        s_a = new_a;
        s_b = new_b;
    }
    Ok((s_a, s_b))
}

/// Root block of the depth-K extension by the two-type recursion, with the
/// indicated deficits at the root. O(K) work.
pub fn root_block_recursive(
    kind: TreeKind,
    def_out_root: u32,
    def_in_root: u32,
    k: usize,
    d: usize,
    delta1: C64,
    delta2: C64,
    z: C64,
    w: C64,
) -> Result<Block2> {
    if d < 2 {
        return Err(Error::InvalidParameter("need d >= 2".into()));
    }
    let (n_out, n_in) = if k == 0 { (0, 0) } else { kind.root_children(d) };
    if def_out_root as usize > d - n_out || def_in_root as usize > d - n_in {
        return Err(Error::DeficitOutOfRange { vertex: 0 });
    }
    let dm1 = (d - 1) as f64;
    let alpha = (d as f64 - n_out as f64 - def_out_root as f64) / dm1;
    let beta = (d as f64 - n_in as f64 - def_in_root as f64) / dm1;
    let mut m: Block2 = [
        [-z - delta1 * alpha, -w],
        [-w.conj(), -z - delta2 * beta],
    ];
    if k > 0 {
        let (s_a, s_b) = type_ladder(k - 1, d, delta1, delta2, z, w)?;
        m[0][0] -= s_b[1][1] * (n_out as f64 / dm1);
        m[1][1] -= s_a[0][0] * (n_in as f64 / dm1);
    }
    inv2(&m, k)
}

/// Y_{i,K}: the (root+n, root+n) entry of the in-deficit extension of the
/// depth-K one-in-deficit tree.
pub fn y_ik(delta1: C64, delta2: C64, k: usize, d: usize, z: C64, w: C64) -> Result<C64> {
    if k < 1 {
        return Err(Error::InvalidParameter("Y_{i,K} needs K >= 1".into()));
    }
    Ok(root_block_recursive(TreeKind::T1, 0, 1, k, d, delta1, delta2, z, w)?[1][1])
}

/// Y_{o,K}: the (root, root) entry of the out-deficit extension of the
/// depth-K one-out-deficit tree.
pub fn y_ok(delta1: C64, delta2: C64, k: usize, d: usize, z: C64, w: C64) -> Result<C64> {
    if k < 1 {
        return Err(Error::InvalidParameter("Y_{o,K} needs K >= 1".into()));
    }
    Ok(root_block_recursive(TreeKind::T2, 1, 0, k, d, delta1, delta2, z, w)?[0][0])
}

/// Exact Green data for the root of an explicitly materialized tree:
/// the root block plus, per vertex, the 2x2 row matrix
/// `[G_{root + o_r, v + o_c}]` and column matrix `[G_{v + o_r, root + o_c}]`.
///
/// This is an independent oracle for the two-type ladder: it processes the
/// concrete graph vertex by vertex with no type memoization, so it also
/// covers trees too large for dense inversion.
#[derive(Debug, Clone)]
pub struct TreeGreenOracle {
    pub root_block: Block2,
    pub row_root: Vec<Block2>,
    pub col_root: Vec<Block2>,
}

pub fn tree_green_elimination(ext: &TreeExtension, tree: &OrientedTree) -> Result<TreeGreenOracle> {
    let n = tree.n_vertices();
    if ext.n_vertices() != n {
        return Err(Error::InvalidParameter("extension/tree size mismatch".into()));
    }
    let kappa = 1.0 / ((ext.d - 1) as f64).sqrt();
    let coef = ext.coefficients();
    let base = |v: usize| -> Block2 {
        [
            [-ext.z - ext.delta1 * coef[v].0, -ext.w],
            [-ext.w.conj(), -ext.z - ext.delta2 * coef[v].1],
        ]
    };
    // bottom-up: children of v always carry larger BFS indices
    let mut s: Vec<Block2> = vec![zero2(); n];
    for v in (0..n).rev() {
        let mut m = base(v);
        for &c in &tree.out_edges[v] {
            let c = c as usize;
            if c > v {
                m[0][0] -= s[c][1][1] * (kappa * kappa);
            }
        }
        for &c in &tree.in_edges[v] {
            let c = c as usize;
            if c > v {
                m[1][1] -= s[c][0][0] * (kappa * kappa);
            }
        }
        s[v] = inv2(&m, tree.depth_of[v] as usize)?;
    }
    // top-down transfer of root rows and columns
    let mut row_root: Vec<Block2> = vec![zero2(); n];
    let mut col_root: Vec<Block2> = vec![zero2(); n];
    row_root[0] = s[0];
    col_root[0] = s[0];
    for v in 1..n {
        let (p, parent_points_down) = tree.parent[v].expect("non-root has parent");
        let p = p as usize;
        let k = C64::new(kappa, 0.0);
        let zero = C64::new(0.0, 0.0);
        // couplings between the parent block and child block
        let (h_pc, h_cp) = if parent_points_down {
            // edge p -> v: H[p, v+n] = kappa, H[v+n, p] = kappa
            ([[zero, k], [zero, zero]], [[zero, zero], [k, zero]])
        } else {
            // edge v -> p: H[v, p+n] = kappa, H[p+n, v] = kappa
            ([[zero, zero], [k, zero]], [[zero, k], [zero, zero]])
        };
        row_root[v] = neg2(&mul2(&mul2(&row_root[p], &h_pc), &s[v]));
        col_root[v] = neg2(&mul2(&mul2(&s[v], &h_cp), &col_root[p]));
    }
    Ok(TreeGreenOracle { root_block: s[0], row_root, col_root })
}

/// Boundary sums A_{1,k}, A_{2,k}, each computed two ways: by the
/// [[Y,X],[X,Y]] matrix-power recursion from the root contributions, and by
/// direct summation of squared Green entries over the depth-k boundary of a
/// truncated extension.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySums {
    pub a1_power: f64,
    pub a2_power: f64,
    pub a1_direct: f64,
    pub a2_direct: f64,
}

pub fn boundary_sums(k: usize, d: u32, z: C64, w: C64) -> Result<BoundarySums> {
    let point = SpectralPoint::scaled(z, w, d)?;
    let sol = solve_m_infty(&point)?;
    let (x, y) = (sol.x, sol.y);
    let a1_0 = sol.m_lod.norm_sqr() + sol.m_infty.norm_sqr();
    let a2_0 = sol.m_infty.norm_sqr() + sol.m_uod.norm_sqr();
    let (mut a1, mut a2) = (a1_0, a2_0);
    for _ in 0..k {
        let next1 = y * a1 + x * a2;
        let next2 = x * a1 + y * a2;
        a1 = next1;
        a2 = next2;
    }

    // direct path on materialized depth-k trees
    let t1 = build_tree(TreeKind::T1, k, d as usize)?;
    let e1 = ext_i(&t1, sol.m_infty, sol.m_infty, z, w)?;
    let o1 = tree_green_elimination(&e1, &t1)?;
    let mut a1_direct = 0.0;
    for v in 0..t1.n_vertices() {
        if t1.depth_of[v] as usize == k {
            a1_direct += o1.row_root[v][1][0].norm_sqr() + o1.row_root[v][1][1].norm_sqr();
        }
    }
    let t2 = build_tree(TreeKind::T2, k, d as usize)?;
    let e2 = ext_o(&t2, sol.m_infty, sol.m_infty, z, w)?;
    let o2 = tree_green_elimination(&e2, &t2)?;
    let mut a2_direct = 0.0;
    for v in 0..t2.n_vertices() {
        if t2.depth_of[v] as usize == k {
            a2_direct += o2.row_root[v][0][0].norm_sqr() + o2.row_root[v][0][1].norm_sqr();
        }
    }
    Ok(BoundarySums { a1_power: a1, a2_power: a2, a1_direct, a2_direct })
}

/// A root-to-vertex Green entry assembled from per-step factors.
#[derive(Debug, Clone)]
pub struct PathEntry {
    pub value: C64,
    /// One factor of -1/sqrt(d-1) times a root-block entry per path step,
    /// followed by the final root-block entry at the target subtree.
    pub factors: Vec<C64>,
}

/// Compute G_{x, y} of a tree extension with Delta = m_infty by multiplying
/// the per-vertex path factors. `x` must be a root index (0 or n).
pub fn path_entry(ext: &TreeExtension, tree: &OrientedTree, x: usize, y: usize) -> Result<PathEntry> {
    let n = tree.n_vertices();
    if ext.n_vertices() != n {
        return Err(Error::InvalidParameter("extension/tree size mismatch".into()));
    }
    if x != 0 && x != n {
        return Err(Error::InvalidParameter("x must be a root index (0 or n)".into()));
    }
    if y >= 2 * n {
        return Err(Error::InvalidParameter("y out of range".into()));
    }
    // base graph must be a tree
    {
        let mut und = std::collections::HashSet::new();
        for (v, heads) in ext.out_edges.iter().enumerate() {
            for &h in heads {
                let h = h as usize;
                if h == v {
                    return Err(Error::NotATree);
                }
                und.insert((v.min(h), v.max(h)));
            }
        }
        if und.len() != n - 1 {
            return Err(Error::NotATree);
        }
    }
    let point = SpectralPoint::scaled(ext.z, ext.w, ext.d as u32)?;
    let sol = solve_m_infty(&point)?;
    if (ext.delta1 - sol.m_infty).norm() > 1e-10 || (ext.delta2 - sol.m_infty).norm() > 1e-10 {
        return Err(Error::InvalidParameter(
            "path factorization requires Delta1 = Delta2 = m_infty".into(),
        ));
    }
    let o_r = usize::from(x == n);
    let (target_v, o_y) = if y < n { (y, 0usize) } else { (y - n, 1usize) };

    // effective root block: every missing edge at the root is weighted by
    // m_infty, whether virtual (extension) or pruned (deficit)
    let coef = ext.coefficients();
    let dm1 = (ext.d - 1) as f64;
    let n_out_real = ext.out_edges[0].len() as f64;
    let n_in_real = ext
        .out_edges
        .iter()
        .flatten()
        .filter(|&&h| h == 0)
        .count() as f64;
    let root_m: Block2 = [
        [-ext.z - sol.m_infty * (coef[0].0 + n_out_real / dm1), -ext.w],
        [
            -ext.w.conj(),
            -ext.z - sol.m_infty * (coef[0].1 + n_in_real / dm1),
        ],
    ];
    let root_block = inv2(&root_m, 0)?;

    // path from root down to the target vertex
    let mut path = Vec::new();
    let mut v = target_v;
    while v != 0 {
        path.push(v);
        v = tree.parent[v].expect("non-root has parent").0 as usize;
    }
    path.reverse();

    if path.is_empty() {
        return Ok(PathEntry { value: root_block[o_r][o_y], factors: Vec::new() });
    }

    let kappa = 1.0 / dm1.sqrt();
    // state machine: B = T1-like (tracks row v+n), A = T2-like (tracks row v)
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        A,
        B,
    }
    let mut factors = Vec::with_capacity(path.len() + 1);
    let mut value = C64::new(1.0, 0.0);
    let mut state: Option<State> = None; // None = at the root block
    for &c in &path {
        let (_, parent_points_down) = tree.parent[c].unwrap();
        let (entry, next) = match (state, parent_points_down) {
            // out-step from the current vertex
            (None, true) => (root_block[o_r][0], State::B),
            (None, false) => (root_block[o_r][1], State::A),
            (Some(State::B), true) => (sol.m_lod, State::B),
            (Some(State::B), false) => (sol.m_infty, State::A),
            (Some(State::A), true) => (sol.m_infty, State::B),
            (Some(State::A), false) => (sol.m_uod, State::A),
        };
        let factor = -entry * kappa;
        factors.push(factor);
        value *= factor;
        state = Some(next);
    }
    let final_entry = match state.unwrap() {
        State::B => {
            if o_y == 0 {
                sol.m_lod
            } else {
                sol.m_infty
            }
        }
        State::A => {
            if o_y == 0 {
                sol.m_infty
            } else {
                sol.m_uod
            }
        }
    };
    factors.push(final_entry);
    value *= final_entry;
    Ok(PathEntry { value, factors })
}
