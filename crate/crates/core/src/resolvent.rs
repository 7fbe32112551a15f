//! Hermitization of sampled digraphs and everything read off its resolvent:
//! normalized traces, the edge-removal control parameters Q_I/Q_O via rank-2
//! minor downdates, singular-value profiles with log potentials, Ward
//! identity audits, and local-law deviations against the tree limit.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::selfconsistent::{solve_m_infty, Convention, SpectralPoint};

/// Assemble the 2n x 2n Hermitization block matrix
/// `[[-z, sA - w], [sA^T - conj(w), -z]]` where `s` scales the 0/1 adjacency.
pub fn hermitization_matrix(
    n: usize,
    edges: &[(u32, u32)],
    scale: f64,
    z: C64,
    w: C64,
) -> Array2<C64> {
    let mut h = Array2::from_elem((2 * n, 2 * n), C64::new(0.0, 0.0));
    for i in 0..2 * n {
        h[[i, i]] = -z;
    }
    for v in 0..n {
        h[[v, v + n]] -= w;
        h[[v + n, v]] -= w.conj();
    }
    for &(t, head) in edges {
        let (t, head) = (t as usize, head as usize);
        h[[t, head + n]] += C64::new(scale, 0.0);
        h[[head + n, t]] += C64::new(scale, 0.0);
    }
    h
}

/// The Hermitization of a digraph at a spectral point. The dense matrix is
/// materialized on demand.
#[derive(Debug, Clone)]
pub struct Hermitization {
    pub n: usize,
    pub d: usize,
    pub z: C64,
    pub w: C64,
    pub convention: Convention,
    edges: Vec<(u32, u32)>,
}

/// Build the Hermitization of `g` at `(z, w)`; `z = 0` is allowed (the pure
/// H(0, w) used for log potentials).
pub fn hermitize(g: &Digraph, z: C64, w: C64, convention: Convention) -> Result<Hermitization> {
    if z.im < 0.0 {
        return Err(Error::InvalidParameter("Im(z) must be >= 0".into()));
    }
    if convention == Convention::Scaled && g.degree() < 2 {
        return Err(Error::InvalidParameter("scaled convention needs d >= 2".into()));
    }
    Ok(Hermitization {
        n: g.n_vertices(),
        d: g.degree(),
        z,
        w,
        convention,
        edges: g.edges().collect(),
    })
}

impl Hermitization {
    pub fn adjacency_scale(&self) -> f64 {
        match self.convention {
            Convention::Scaled => 1.0 / ((self.d - 1) as f64).sqrt(),
            Convention::Unscaled => 1.0,
        }
    }

    /// Dense 2n x 2n matrix.
    pub fn dense(&self) -> Array2<C64> {
        hermitization_matrix(self.n, &self.edges, self.adjacency_scale(), self.z, self.w)
    }

    /// Dense H(0, w) (the z-independent Hermitian core).
    pub fn h0_dense(&self) -> Array2<C64> {
        hermitization_matrix(self.n, &self.edges, self.adjacency_scale(), C64::new(0.0, 0.0), self.w)
    }
}

fn require_upper_half(z: C64) -> Result<()> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("Im(z) must be strictly positive".into()))
    }
}

/// Eigenvalues of the Hermitian H(0, w), ascending.
pub fn hermitization_spectrum(g: &Digraph, w: C64, convention: Convention) -> Result<Vec<f64>> {
    let herm = hermitize(g, C64::new(0.0, 0.0), w, convention)?;
    linalg::hermitian_eigenvalues(&herm.h0_dense())
}

/// Normalized resolvent trace (1/(2n)) tr (H(0,w) - z)^{-1} via the
/// Hermitian eigendecomposition of H(0, w).
pub fn green_trace(g: &Digraph, z: C64, w: C64, convention: Convention) -> Result<C64> {
    require_upper_half(z)?;
    let spectrum = hermitization_spectrum(g, w, convention)?;
    Ok(linalg::resolvent_trace_from_spectrum(&spectrum, z))
}

/// Resolvent traces for many z against one eigendecomposition of H(0, w).
pub fn green_trace_many(
    g: &Digraph,
    w: C64,
    convention: Convention,
    zs: &[C64],
) -> Result<Vec<C64>> {
    for &z in zs {
        require_upper_half(z)?;
    }
    let spectrum = hermitization_spectrum(g, w, convention)?;
    Ok(zs
        .iter()
        .map(|&z| linalg::resolvent_trace_from_spectrum(&spectrum, z))
        .collect())
}

/// Full Green's function G = H(z, w)^{-1} (scaled convention).
pub fn green_full(g: &Digraph, z: C64, w: C64, convention: Convention) -> Result<Array2<C64>> {
    require_upper_half(z)?;
    let herm = hermitize(g, z, w, convention)?;
    linalg::invert(&herm.dense())
}

/// The pair of edge-removal control parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QParameters {
    pub q_i: C64,
    pub q_o: C64,
    /// Vertices whose 2x2 pivot block was numerically singular and skipped.
    pub skipped: usize,
}

/// Q_I/Q_O from an already computed full Green's function, by the rank-2
/// Schur downdate of the pair (x, x+n) per directed edge.
pub fn q_parameters_from_green(g: &Digraph, green: &Array2<C64>) -> Result<QParameters> {
    let n = g.n_vertices();
    if green.dim() != (2 * n, 2 * n) {
        return Err(Error::InvalidParameter("Green's function has wrong shape".into()));
    }
    let mut q_i = C64::new(0.0, 0.0);
    let mut q_o = C64::new(0.0, 0.0);
    let mut skipped = 0usize;
    for x in 0..n {
        let p = [
            [green[[x, x]], green[[x, x + n]]],
            [green[[x + n, x]], green[[x + n, x + n]]],
        ];
        let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
        let scale = p[0][0].norm() + p[0][1].norm() + p[1][0].norm() + p[1][1].norm();
        if det.norm() <= 1e-14 * (1.0 + scale * scale) {
            skipped += 1;
            continue;
        }
        let pinv = [
            [p[1][1] / det, -p[0][1] / det],
            [-p[1][0] / det, p[0][0] / det],
        ];
        let downdated = |row: usize, col: usize| -> C64 {
            let left = [green[[row, x]], green[[row, x + n]]];
            let right = [green[[x, col]], green[[x + n, col]]];
            let mut corr = C64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    corr += left[a] * pinv[a][b] * right[b];
                }
            }
            green[[row, col]] - corr
        };
        for &y in g.out_neighbors(x) {
            let y = y as usize;
            q_i += downdated(y + n, y + n);
        }
        for &y in g.in_neighbors(x) {
            let y = y as usize;
            q_o += downdated(y, y);
        }
    }
    let norm = (n * g.degree()) as f64;
    Ok(QParameters { q_i: q_i / norm, q_o: q_o / norm, skipped })
}

/// Q_I/Q_O at (z, w) in the scaled convention.
pub fn q_parameters(g: &Digraph, z: C64, w: C64) -> Result<QParameters> {
    let green = green_full(g, z, w, Convention::Scaled)?;
    q_parameters_from_green(g, &green)
}

/// Singular values of A - wI (unscaled), the minimal one, and the log
/// potential (mean log singular value; -inf when the matrix is singular).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularProfile {
    pub s1: f64,
    pub log_potential: f64,
    pub singular_values: Vec<f64>,
}

const SINGULAR_SENTINEL_TOL: f64 = 1e-14;

pub fn singular_profile(g: &Digraph, w: C64) -> Result<SingularProfile> {
    let n = g.n_vertices();
    let mut a = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    for (t, h) in g.edges() {
        a[[t as usize, h as usize]] += C64::new(1.0, 0.0);
    }
    for v in 0..n {
        a[[v, v]] -= w;
    }
    let sv = linalg::singular_values(&a)?;
    let s1 = sv[0];
    let smax = *sv.last().unwrap();
    let log_potential = if s1 <= SINGULAR_SENTINEL_TOL * smax.max(1.0) {
        f64::NEG_INFINITY
    } else {
        sv.iter().map(|s| s.ln()).sum::<f64>() / n as f64
    };
    Ok(SingularProfile { s1, log_potential, singular_values: sv })
}

/// Max relative per-row Ward identity violation of a resolvent matrix
/// G = (H0 - z)^{-1}: | sum_j |G_ij|^2 - Im(G_ii)/Im(z) | / (Im(G_ii)/Im(z)).
pub fn ward_violation_of_green(green: &Array2<C64>, z: C64) -> f64 {
    let n = green.nrows();
    let eta = z.im;
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            sum += green[[i, j]].norm_sqr();
        }
        let target = green[[i, i]].im / eta;
        let rel = (sum - target).abs() / target.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    worst
}

/// Ward identity audit for the Hermitized digraph at (z, w).
pub fn ward_check(g: &Digraph, z: C64, w: C64, convention: Convention) -> Result<f64> {
    let green = green_full(g, z, w, convention)?;
    Ok(ward_violation_of_green(&green, z))
}

/// Deviations of the empirical resolvent from the infinite-tree limit, plus
/// the control parameters, all from one full inversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalLawBundle {
    /// |(1/n) sum_{i<n} G_ii - mT_d|: first-block deviation.
    pub block_deviation: f64,
    /// |(1/2n) tr G - mT_d|.
    pub trace_deviation: f64,
    pub q_i: C64,
    pub q_o: C64,
    pub q_skipped: usize,
    pub m_infty: C64,
    pub mt_d: C64,
    pub sg1: f64,
}

/// Evaluate the local-law deviation bundle at (z, w), scaled convention.
pub fn local_law_bundle(g: &Digraph, z: C64, w: C64) -> Result<LocalLawBundle> {
    let point = SpectralPoint::scaled(z, w, g.degree() as u32)?;
    let sol = solve_m_infty(&point)?;
    let green = green_full(g, z, w, Convention::Scaled)?;
    let n = g.n_vertices();
    let mut block = C64::new(0.0, 0.0);
    let mut full = C64::new(0.0, 0.0);
    for i in 0..n {
        block += green[[i, i]];
    }
    for i in 0..2 * n {
        full += green[[i, i]];
    }
    block /= n as f64;
    full /= (2 * n) as f64;
    let q = q_parameters_from_green(g, &green)?;
    Ok(LocalLawBundle {
        block_deviation: (block - sol.mt_d).norm(),
        trace_deviation: (full - sol.mt_d).norm(),
        q_i: q.q_i,
        q_o: q.q_o,
        q_skipped: q.skipped,
        m_infty: sol.m_infty,
        mt_d: sol.mt_d,
        sg1: sol.sg1,
    })
}

/// Local-law deviation: (first-block deviation, 2n-trace deviation).
pub fn local_law_deviation(g: &Digraph, z: C64, w: C64) -> Result<(f64, f64)> {
    let b = local_law_bundle(g, z, w)?;
    Ok((b.block_deviation, b.trace_deviation))
}

/// Per-graph measurement bundle assembled by the experiment pipelines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSample {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub eigenvalues: Vec<C64>,
    pub singular_profiles: Vec<(C64, SingularProfile)>,
    pub traces: Vec<(C64, C64, C64)>,
    pub q_values: Vec<(C64, C64, QParameters)>,
}
