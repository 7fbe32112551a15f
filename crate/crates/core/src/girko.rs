//! Empirical spectral distributions of sampled digraphs, their comparison to
//! the oriented Kesten-McKay law, and a numerical verification of Girko's
//! formula through the log potential of shifted singular values.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::quad;
use crate::selfconsistent::{kesten_mckay_density, radial_cdf, second_moment};

/// All eigenvalues of the unscaled adjacency matrix, sorted by
/// (real part, imaginary part).
pub fn esd(g: &Digraph) -> Result<Vec<C64>> {
    let n = g.n_vertices();
    let mut a = Array2::zeros((n, n));
    for (t, h) in g.edges() {
        a[[t as usize, h as usize]] += 1.0;
    }
    let mut eigs = linalg::real_matrix_eigenvalues(&a)?;
    eigs.sort_by(|p, q| (p.re, p.im).partial_cmp(&(q.re, q.im)).unwrap());
    Ok(eigs)
}

/// Index of the trivial (Perron) eigenvalue: the one nearest to d.
pub fn trivial_eigenvalue_index(eigs: &[C64], d: usize) -> usize {
    let target = C64::new(d as f64, 0.0);
    eigs.iter()
        .enumerate()
        .min_by(|(_, p), (_, q)| {
            (**p - target).norm().partial_cmp(&(**q - target).norm()).unwrap()
        })
        .map(|(i, _)| i)
        .expect("nonempty spectrum")
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical distribution
/// of |lambda| and the radial CDF of the oriented Kesten-McKay law.
pub fn radial_ks(eigs: &[C64], d: u32, exclude_trivial: bool) -> f64 {
    assert!(!eigs.is_empty(), "need eigenvalues");
    let mut radii: Vec<f64> = if exclude_trivial {
        let skip = trivial_eigenvalue_index(eigs, d as usize);
        eigs.iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, l)| l.norm())
            .collect()
    } else {
        eigs.iter().map(|l| l.norm()).collect()
    };
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = radii.len();
    let mut ks = 0.0f64;
    for (i, &r) in radii.iter().enumerate() {
        let f = radial_cdf(r, d);
        let hi = (i + 1) as f64 / n as f64;
        let lo = i as f64 / n as f64;
        ks = ks.max((hi - f).abs()).max((lo - f).abs());
    }
    ks
}

/// Summary of one empirical spectrum against the limit law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EsdReport {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub eigenvalues: Vec<C64>,
    pub trivial_index: usize,
    pub trivial_value: C64,
    /// max |lambda| over the nontrivial spectrum
    pub nontrivial_radius: f64,
    pub radial_ks: f64,
    /// mean |lambda|^2 over the nontrivial spectrum
    pub second_moment_nontrivial: f64,
    /// second absolute moment of the limit law
    pub second_moment_limit: f64,
}

pub fn esd_report(g: &Digraph, seed: u64) -> Result<EsdReport> {
    let eigs = esd(g)?;
    let d = g.degree();
    let trivial_index = trivial_eigenvalue_index(&eigs, d);
    let trivial_value = eigs[trivial_index];
    let nontrivial = || {
        eigs.iter()
            .enumerate()
            .filter(move |&(i, _)| i != trivial_index)
            .map(|(_, l)| l)
    };
    let nontrivial_radius = nontrivial().map(|l| l.norm()).fold(0.0, f64::max);
    let m2 = nontrivial().map(|l| l.norm_sqr()).sum::<f64>() / (eigs.len() - 1) as f64;
    Ok(EsdReport {
        n: g.n_vertices(),
        d,
        seed,
        radial_ks: radial_ks(&eigs, d as u32, true),
        eigenvalues: eigs,
        trivial_index,
        trivial_value,
        nontrivial_radius,
        second_moment_nontrivial: m2,
        second_moment_limit: second_moment(d as u32),
    })
}

/// A radial Gaussian-windowed polynomial bump: with u = |w - center|^2 / radius^2,
/// psi(w) = p(u) exp(-u). The Laplacian is closed-form, so the right-hand
/// side of Girko's formula needs no numerical differentiation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialBump {
    pub center: C64,
    pub radius: f64,
    /// polynomial coefficients in u, constant term first
    pub poly: Vec<f64>,
}

impl RadialBump {
    pub fn gaussian(center: C64, radius: f64) -> Self {
        Self { center, radius, poly: vec![1.0] }
    }

    fn eval_poly(&self, u: f64) -> (f64, f64, f64) {
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for (k, &c) in self.poly.iter().enumerate() {
            let k = k as f64;
            p += c * u.powf(k);
            if k >= 1.0 {
                dp += c * k * u.powf(k - 1.0);
            }
            if k >= 2.0 {
                ddp += c * k * (k - 1.0) * u.powf(k - 2.0);
            }
        }
        (p, dp, ddp)
    }

    pub fn psi(&self, w: C64) -> f64 {
        let u = (w - self.center).norm_sqr() / (self.radius * self.radius);
        let (p, _, _) = self.eval_poly(u);
        p * (-u).exp()
    }

    pub fn laplacian(&self, w: C64) -> f64 {
        let r2 = self.radius * self.radius;
        let u = (w - self.center).norm_sqr() / r2;
        let (p, dp, ddp) = self.eval_poly(u);
        (4.0 / r2) * (-u).exp() * (u * (ddp - 2.0 * dp + p) + dp - p)
    }

    /// Radius beyond which the bump is treated as zero.
    pub fn support_radius(&self) -> f64 {
        4.0 * self.radius
    }
}

/// Result of one numerical check of Girko's identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GirkoCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
    pub relative_discrepancy: f64,
    pub h: f64,
    pub grid_points: usize,
    /// difference against the double-spacing subgrid; a coarse error estimate
    pub quad_error_estimate: f64,
}

/// Verify Girko's identity for a sum of radial bumps: the spectral average
/// of psi against the quadrature of (1/2pi) Laplacian(psi) times the log
/// potential of A - wI.
pub fn girko_identity_check(
    g: &Digraph,
    bumps: &[RadialBump],
    h: f64,
    tolerance: Option<f64>,
) -> Result<GirkoCheck> {
    if bumps.is_empty() {
        return Err(Error::InvalidParameter("need at least one test bump".into()));
    }
    if h <= 0.0 {
        return Err(Error::InvalidParameter("grid spacing must be positive".into()));
    }
    let eigs = esd(g)?;
    let n = g.n_vertices();
    let lhs = eigs
        .iter()
        .map(|&l| bumps.iter().map(|b| b.psi(l)).sum::<f64>())
        .sum::<f64>()
        / n as f64;

    let radius = bumps
        .iter()
        .map(|b| b.center.norm() + b.support_radius())
        .fold(0.0, f64::max);
    let steps = (2.0 * radius / h).ceil() as i64;
    let base = Array2::from_shape_fn((n, n), |(i, j)| {
        C64::new(0.0, 0.0) + if g.has_edge(i, j) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    });

    // midpoint grid over the union of bump supports
    let mut cells: Vec<(i64, i64, C64)> = Vec::new();
    for i in 0..steps {
        for j in 0..steps {
            let mut w = C64::new(
                -radius + (i as f64 + 0.5) * h,
                -radius + (j as f64 + 0.5) * h,
            );
            if !bumps.iter().any(|b| (w - b.center).norm() <= b.support_radius()) {
                continue;
            }
            // keep the lattice off the log singularities
            if eigs.iter().any(|&l| (w - l).norm() < 1e-6) {
                w += C64::new(0.5 * h, 0.0);
            }
            cells.push((i, j, w));
        }
    }
    let contributions: Vec<f64> = cells
        .par_iter()
        .map(|&(_, _, w)| {
            let mut m = base.clone();
            for k in 0..n {
                m[[k, k]] -= w;
            }
            let sv = linalg::singular_values(&m).expect("svd");
            let log_pot = sv.iter().map(|s| s.ln()).sum::<f64>() / n as f64;
            let lap: f64 = bumps.iter().map(|b| b.laplacian(w)).sum();
            lap * log_pot
        })
        .collect();

    let rhs: f64 = contributions.iter().sum::<f64>() * h * h / (2.0 * std::f64::consts::PI);
    let rhs_coarse: f64 = cells
        .iter()
        .zip(&contributions)
        .filter(|&(&(i, j, _), _)| i % 2 == 0 && j % 2 == 0)
        .map(|(_, c)| c)
        .sum::<f64>()
        * (2.0 * h)
        * (2.0 * h)
        / (2.0 * std::f64::consts::PI);
    let quad_error_estimate = (rhs - rhs_coarse).abs();
    if let Some(tol) = tolerance {
        if quad_error_estimate > tol {
            return Err(Error::GridTooCoarse { estimate: quad_error_estimate, tolerance: tol });
        }
    }
    let discrepancy = (lhs - rhs).abs();
    Ok(GirkoCheck {
        lhs,
        rhs,
        discrepancy,
        relative_discrepancy: discrepancy / lhs.abs().max(f64::MIN_POSITIVE),
        h,
        grid_points: cells.len(),
        quad_error_estimate,
    })
}

/// Local-window comparison: the empirical mass of psi_r(. - w0) with
/// r = n^a against the same integral under the limit law.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindowComparison {
    pub empirical: f64,
    pub law: f64,
    pub difference: f64,
    pub window_scale: f64,
}

pub fn local_window(
    eigs: &[C64],
    w0: C64,
    a: f64,
    d: u32,
    n: usize,
    bump: &RadialBump,
) -> WindowComparison {
    assert!(a >= 0.0, "window exponent must be nonnegative");
    let r = (n as f64).powf(a);
    let empirical = eigs
        .iter()
        .map(|&l| r * r * bump.psi((l - w0) * r))
        .sum::<f64>()
        / eigs.len() as f64;

    // integrate r^2 psi(r (w - w0)) h_d(w) in polar coordinates about the
    // origin; the law's support edge is then a coordinate line
    let sqrt_d = (d as f64).sqrt();
    let reach = bump.support_radius() / r;
    let s_lo = (w0.norm() - reach).max(0.0);
    let s_hi = (w0.norm() + reach).min(sqrt_d);
    let law = if s_lo >= s_hi {
        0.0
    } else {
        quad::adaptive_simpson(
            &|s: f64| {
                let ring = quad::adaptive_simpson(
                    &|theta: f64| {
                        let w = C64::from_polar(s, theta);
                        r * r * bump.psi((w - w0) * r)
                    },
                    0.0,
                    2.0 * std::f64::consts::PI,
                    1e-10,
                );
                s * kesten_mckay_density(C64::new(s, 0.0), d) * ring
            },
            s_lo,
            s_hi,
            1e-9,
        )
    };
    WindowComparison { empirical, law, difference: empirical - law, window_scale: r }
}
