//! The self-consistent cubic for the directed-tree Green's function and
//! everything derived from its distinguished Herglotz solution: the root
//! entries of the infinite-tree Green's functions, the singularity
//! parameters, the unscaled system with its degree recursion, and the
//! oriented Kesten-McKay density.
//!
//! The scalar type is generic over `f32`/`f64`; concrete pipelines use `f64`
//! via the [`crate::C64`] alias.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Floating-point scalars the analytic core is generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + std::fmt::Debug + Send + Sync + 'static
{
}
impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + std::fmt::Debug + Send + Sync + 'static
{
}

fn lit<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("literal conversion")
}

fn to_c64<S: Scalar>(v: Complex<S>) -> C64 {
    C64::new(v.re.to_f64().unwrap_or(f64::NAN), v.im.to_f64().unwrap_or(f64::NAN))
}

/// Which normalization of the adjacency matrix a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Adjacency scaled by 1/sqrt(d-1).
    Scaled,
    /// Raw 0/1 adjacency.
    Unscaled,
}

/// Evaluation coordinates of the Green's-function quantities.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPoint<S: Scalar = f64> {
    pub z: Complex<S>,
    pub w: Complex<S>,
    pub d: u32,
    pub convention: Convention,
}

impl<S: Scalar> SpectralPoint<S> {
    /// A point for the scaled system; requires Im(z) > 0 and d >= 3.
    pub fn scaled(z: Complex<S>, w: Complex<S>, d: u32) -> Result<Self> {
        if !(z.im > S::zero()) {
            return Err(Error::InvalidParameter("Im(z) must be strictly positive".into()));
        }
        if d < 3 {
            return Err(Error::InvalidParameter(format!("d = {d} < 3 not supported by the scaled system")));
        }
        Ok(Self { z, w, d, convention: Convention::Scaled })
    }

    fn degree_ratio(&self) -> S {
        lit::<S>(self.d as f64) / lit::<S>(self.d as f64 - 1.0)
    }
}

/// The solution bundle at one spectral point: m_infty plus every derived
/// scalar and the singularity parameters.
#[derive(Debug, Clone, Copy)]
pub struct SelfConsistentSolution<S: Scalar = f64> {
    pub m_infty: Complex<S>,
    /// Root diagonal entry of the one-in-deficit tree (same-diagonal entry).
    pub m_sd: Complex<S>,
    /// Upper off-diagonal root entry.
    pub m_uod: Complex<S>,
    /// Lower off-diagonal root entry.
    pub m_lod: Complex<S>,
    /// Root diagonal of the full directed tree.
    pub mt_d: Complex<S>,
    pub mt_uod: Complex<S>,
    pub mt_lod: Complex<S>,
    /// X = |m_infty|^2.
    pub x: S,
    /// Y = d/(d-1) |w m_infty|^2 / |z + d/(d-1) m_infty|^2.
    pub y: S,
    /// S_g^1 = 1 - X - Y.
    pub sg1: S,
    /// S_g^2 = 1 + X - Y.
    pub sg2: S,
    /// Absolute residual of the cubic at m_infty.
    pub residual: S,
    /// Set when |w| is within 1e-3 of the spectral edge sqrt(d).
    pub near_edge: bool,
}

impl<S: Scalar> SelfConsistentSolution<S> {
    /// Complex linearization coefficient multiplying same-index propagation,
    /// m_infty^2. Its modulus is `x`.
    pub fn x_lin(&self) -> Complex<S> {
        self.m_infty * self.m_infty
    }

    /// Complex linearization coefficient for cross-index propagation,
    /// d/(d-1) m_uod m_lod. Its modulus is `y`.
    pub fn y_lin(&self, d: u32) -> Complex<S> {
        let c = lit::<S>(d as f64) / lit::<S>(d as f64 - 1.0);
        self.m_uod * self.m_lod * c
    }
}

/// Coefficients (cubic downward: m^3, m^2, m^1, m^0) of the scaled system.
fn scaled_cubic<S: Scalar>(z: Complex<S>, w: Complex<S>, d: u32) -> [Complex<S>; 4] {
    let c = lit::<S>(d as f64) / lit::<S>(d as f64 - 1.0);
    let one = Complex::new(S::one(), S::zero());
    let cc = Complex::new(c, S::zero());
    [
        cc,
        (cc + one) * z,
        z * z + cc - Complex::new(w.norm_sqr(), S::zero()),
        z,
    ]
}

/// Coefficients of the unscaled system; degenerates to a quadratic at d = 1.
fn unscaled_cubic<S: Scalar>(z: Complex<S>, w: Complex<S>, d: u32) -> [Complex<S>; 4] {
    let df = lit::<S>(d as f64);
    let one = S::one();
    [
        Complex::new(df * (df - one), S::zero()),
        z * (df + df - one),
        z * z + Complex::new(df - w.norm_sqr(), S::zero()),
        z,
    ]
}

/// All roots of a polynomial of degree <= 3 given downward coefficients.
fn poly_roots<S: Scalar>(coeffs: [Complex<S>; 4]) -> Vec<Complex<S>> {
    let [a, b, c, d] = coeffs;
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
    let tiny = lit::<S>(1e-14) * scale.max(S::one());
    if a.norm() > tiny {
        cubic_roots(a, b, c, d)
    } else if b.norm() > tiny {
        quadratic_roots(b, c, d)
    } else if c.norm() > tiny {
        vec![-d / c]
    } else {
        Vec::new()
    }
}

fn quadratic_roots<S: Scalar>(a: Complex<S>, b: Complex<S>, c: Complex<S>) -> Vec<Complex<S>> {
    let two = lit::<S>(2.0);
    let disc = (b * b - a * c * lit::<S>(4.0)).sqrt();
    // use the numerically stable pairing
    let q = if (b.conj() * disc).re >= S::zero() { -(b + disc) / two } else { -(b - disc) / two };
    if q.norm() == S::zero() {
        vec![Complex::new(S::zero(), S::zero()), -b / a]
    } else {
        vec![q / a, c / q]
    }
}

fn cubic_roots<S: Scalar>(
    a: Complex<S>,
    b: Complex<S>,
    c: Complex<S>,
    d: Complex<S>,
) -> Vec<Complex<S>> {
    let three = lit::<S>(3.0);
    // depressed cubic t^3 + p t + q with m = t - b/(3a)
    let shift = b / (a * three);
    let p = c / a - shift * shift * three;
    let q = d / a + shift * shift * shift * lit::<S>(2.0) - shift * (c / a);
    let half_q = q * lit::<S>(0.5);
    let disc = (half_q * half_q + p * p * p / lit::<S>(27.0)).sqrt();
    // pick the larger-magnitude branch for the cube root
    let u3a = -half_q + disc;
    let u3b = -half_q - disc;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let mut roots = Vec::with_capacity(3);
    if u3.norm() == S::zero() {
        // triple root of the depressed cubic
        for _ in 0..3 {
            roots.push(-shift);
        }
        return roots;
    }
    let u0 = u3.cbrt();
    let omega = Complex::new(-lit::<S>(0.5), lit::<S>(0.75).sqrt());
    let mut u = u0;
    for _ in 0..3 {
        let t = if u.norm() > lit::<S>(1e-30) { u - p / (u * three) } else { u };
        roots.push(t - shift);
        u = u * omega;
    }
    // one Newton step per root against the original cubic sharpens Cardano
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let f = ((a * *r + b) * *r + c) * *r + d;
            let fp = (a * *r * three + b * lit::<S>(2.0)) * *r + c;
            if fp.norm() > S::zero() {
                *r = *r - f / fp;
            }
        }
    }
    roots
}

fn poly_eval<S: Scalar>(coeffs: &[Complex<S>; 4], m: Complex<S>) -> Complex<S> {
    ((coeffs[0] * m + coeffs[1]) * m + coeffs[2]) * m + coeffs[3]
}

/// Track the root with z m -> -1 from z + iT down to z by nearest-root
/// matching, halving the step whenever the matching is ambiguous.
fn homotopy_track<S: Scalar>(
    coeffs_at: &dyn Fn(Complex<S>) -> [Complex<S>; 4],
    z: Complex<S>,
    w: Complex<S>,
) -> Result<Complex<S>> {
    let z64 = to_c64(z);
    let w64 = to_c64(w);
    let big_t = lit::<S>(8.0) * (S::one() + z.norm() + w.norm());
    let mut shift = big_t;
    let mut m = -Complex::new(S::one(), S::zero()) / (z + Complex::new(S::zero(), shift));
    let floor = lit::<S>(1e-6);
    let min_shift = lit::<S>(1e-9);
    let mut factor = lit::<S>(0.75);
    let mut steps = 0usize;
    while shift > min_shift {
        let next_shift = if shift * factor < min_shift { S::zero() } else { shift * factor };
        let zz = z + Complex::new(S::zero(), next_shift);
        let roots = poly_roots(coeffs_at(zz));
        if roots.is_empty() {
            return Err(Error::BranchAmbiguity { z: z64, w: w64, detail: "degenerate polynomial".into() });
        }
        let mut dists: Vec<(S, Complex<S>)> =
            roots.iter().map(|r| ((*r - m).norm(), *r)).collect();
        dists.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let ambiguous = dists.len() > 1
            && dists[1].0 < dists[0].0 * lit::<S>(10.0)
            && dists[0].0 > lit::<S>(1e-12);
        if ambiguous {
            let step = shift - next_shift;
            if step <= floor {
                return Err(Error::BranchAmbiguity {
                    z: z64,
                    w: w64,
                    detail: "nearest-root matching ambiguous at minimal step".into(),
                });
            }
            factor = (factor + S::one()) * lit::<S>(0.5); // halve the step size
            steps += 1;
            if steps > 100_000 {
                return Err(Error::BranchAmbiguity { z: z64, w: w64, detail: "homotopy stalled".into() });
            }
            continue;
        }
        m = dists[0].1;
        shift = next_shift;
        steps += 1;
        if steps > 100_000 {
            return Err(Error::BranchAmbiguity { z: z64, w: w64, detail: "homotopy stalled".into() });
        }
    }
    // land exactly on z
    let roots = poly_roots(coeffs_at(z));
    let m_final = roots
        .into_iter()
        .min_by(|p, q| (*p - m).norm().partial_cmp(&(*q - m).norm()).unwrap())
        .ok_or(Error::BranchAmbiguity { z: z64, w: w64, detail: "no roots at target".into() })?;
    Ok(m_final)
}

fn newton_polish<S: Scalar>(coeffs: &[Complex<S>; 4], mut m: Complex<S>) -> Complex<S> {
    let three = lit::<S>(3.0);
    let two = lit::<S>(2.0);
    for _ in 0..4 {
        let f = poly_eval(coeffs, m);
        let fp = (coeffs[0] * m * three + coeffs[1] * two) * m + coeffs[2];
        if fp.norm() == S::zero() {
            break;
        }
        let step = f / fp;
        m = m - step;
        if step.norm() < lit::<S>(1e-17) * (S::one() + m.norm()) {
            break;
        }
    }
    m
}

/// Solve the scaled self-consistent cubic at `point`, returning the full
/// solution bundle. The accepted root is the analytic branch with
/// z m_infty -> -1 at infinity, cross-checked by a damped fixed-point pass.
pub fn solve_m_infty<S: Scalar>(point: &SpectralPoint<S>) -> Result<SelfConsistentSolution<S>> {
    if !(point.z.im > S::zero()) {
        return Err(Error::InvalidParameter("Im(z) must be strictly positive".into()));
    }
    if point.d < 3 {
        return Err(Error::InvalidParameter(format!("d = {} < 3", point.d)));
    }
    let (z, w, d) = (point.z, point.w, point.d);
    let coeffs_at = |zz: Complex<S>| scaled_cubic(zz, w, d);
    let m_h = homotopy_track(&coeffs_at, z, w)?;
    let coeffs = coeffs_at(z);
    let m = newton_polish(&coeffs, m_h);
    if !(m.im > S::zero()) {
        return Err(Error::NonHerglotz { z: to_c64(z), w: to_c64(w) });
    }
    cross_check_fixed_point(point, m)?;
    let residual = poly_eval(&coeffs, m).norm();
    let mut sol = derived_quantities(m, point)?;
    sol.residual = residual;
    Ok(sol)
}

/// The map whose fixed point is m_infty (right-hand side of the
/// self-consistent equation).
fn self_consistent_map<S: Scalar>(point: &SpectralPoint<S>, m: Complex<S>) -> Complex<S> {
    let c = point.degree_ratio();
    let b = point.z + m * c;
    let den = Complex::new(point.w.norm_sqr(), S::zero()) - b * (point.z + m);
    b / den
}

fn cross_check_fixed_point<S: Scalar>(point: &SpectralPoint<S>, m_h: Complex<S>) -> Result<()> {
    let gamma = lit::<S>(0.35);
    let mut m = m_h;
    let mut converged = false;
    for _ in 0..400 {
        let next = m + (self_consistent_map(point, m) - m) * gamma;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        if (next - m).norm() <= lit::<S>(1e-14) * (S::one() + next.norm()) {
            m = next;
            converged = true;
            break;
        }
        m = next;
    }
    if converged {
        if (m - m_h).norm() > lit::<S>(1e-8) * (S::one() + m_h.norm()) {
            return Err(Error::BranchAmbiguity {
                z: to_c64(point.z),
                w: to_c64(point.w),
                detail: "fixed-point iteration settled on a different root".into(),
            });
        }
        return Ok(());
    }
    // fixed-point pass inconclusive: accept only if the Herglotz root is unique
    let roots = poly_roots(scaled_cubic(point.z, point.w, point.d));
    let herglotz = roots.iter().filter(|r| r.im > lit::<S>(1e-12)).count();
    if herglotz > 1 {
        return Err(Error::BranchAmbiguity {
            z: to_c64(point.z),
            w: to_c64(point.w),
            detail: format!("{herglotz} roots in the upper half-plane and no fixed-point confirmation"),
        });
    }
    Ok(())
}

/// Compute every derived scalar from a solved m_infty.
pub fn derived_quantities<S: Scalar>(
    m_infty: Complex<S>,
    point: &SpectralPoint<S>,
) -> Result<SelfConsistentSolution<S>> {
    let (z, w) = (point.z, point.w);
    let c = point.degree_ratio();
    let b = z + m_infty * c;
    if b.norm() < lit::<S>(1e-8) {
        return Err(Error::DegenerateDenominator { magnitude: b.norm().to_f64().unwrap_or(0.0) });
    }
    let w2 = Complex::new(w.norm_sqr(), S::zero());
    let m_sd = (z + m_infty) / b * m_infty;
    let m_uod = -w / b * m_infty;
    let m_lod = -w.conj() / b * m_infty;
    let mt_d = b / (w2 - b * b);
    let mt_uod = -w / b * mt_d;
    let mt_lod = -w.conj() / b * mt_d;
    let x = m_infty.norm_sqr();
    let y = c * w.norm_sqr() * m_infty.norm_sqr() / b.norm_sqr();
    let sg1 = S::one() - x - y;
    let sg2 = S::one() + x - y;
    let near_edge = (w.norm() - lit::<S>(point.d as f64).sqrt()).abs() < lit::<S>(1e-3);
    let residual = poly_eval(&scaled_cubic(z, w, point.d), m_infty).norm();
    Ok(SelfConsistentSolution {
        m_infty,
        m_sd,
        m_uod,
        m_lod,
        mt_d,
        mt_uod,
        mt_lod,
        x,
        y,
        sg1,
        sg2,
        residual,
        near_edge,
    })
}

/// All roots of the scaled self-consistent cubic at (z, w); diagnostic
/// surface for branch studies and factorization checks.
pub fn scaled_cubic_roots<S: Scalar>(z: Complex<S>, w: Complex<S>, d: u32) -> Vec<Complex<S>> {
    poly_roots(scaled_cubic(z, w, d))
}

/// Stieltjes transform of the limiting Hermitization spectrum in the
/// unscaled variables: m_star(Z, W) = mT_d(Z/sqrt(d-1), W/sqrt(d-1)) / sqrt(d-1).
pub fn m_star<S: Scalar>(z: Complex<S>, w: Complex<S>, d: u32) -> Result<Complex<S>> {
    let s = lit::<S>(d as f64 - 1.0).sqrt();
    let point = SpectralPoint::scaled(z / s, w / s, d)?;
    let sol = solve_m_infty(&point)?;
    Ok(sol.mt_d / s)
}

/// Solve the unscaled pair (m_infty, mT_d); valid for d >= 1 (the cubic
/// degenerates to the exactly solvable quadratic at d = 1).
pub fn solve_unrescaled<S: Scalar>(
    z: Complex<S>,
    w: Complex<S>,
    d: u32,
) -> Result<(Complex<S>, Complex<S>)> {
    if !(z.im > S::zero()) {
        return Err(Error::InvalidParameter("Im(z) must be strictly positive".into()));
    }
    if d < 1 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let coeffs_at = |zz: Complex<S>| unscaled_cubic(zz, w, d);
    let m_h = homotopy_track(&coeffs_at, z, w)?;
    let m = newton_polish(&coeffs_at(z), m_h);
    if !(m.im > S::zero()) {
        return Err(Error::NonHerglotz { z: to_c64(z), w: to_c64(w) });
    }
    let df = lit::<S>(d as f64);
    let b = z + m * df;
    let mt = b / (Complex::new(w.norm_sqr(), S::zero()) - b * b);
    Ok((m, mt))
}

/// Closed form for the unscaled mT at d = 1, branch chosen so Im > 0.
pub fn unscaled_mt_d1<S: Scalar>(z: Complex<S>, w: Complex<S>) -> Complex<S> {
    let one = Complex::new(S::one(), S::zero());
    let wr = Complex::new(w.norm(), S::zero());
    let p = (z * z - (one - wr) * (one - wr)) * (z * z - (one + wr) * (one + wr));
    let mut v = -z / p.sqrt();
    if !(v.im > S::zero()) {
        v = -v;
    }
    v
}

/// Density of the oriented Kesten-McKay law on the complex plane.
pub fn kesten_mckay_density<S: Scalar>(w: Complex<S>, d: u32) -> S {
    assert!(d >= 2, "density defined for d >= 2");
    let df = lit::<S>(d as f64);
    if w.norm_sqr() > df {
        return S::zero();
    }
    let den = df * df - w.norm_sqr();
    df * df * (df - S::one()) / (S::PI() * den * den)
}

/// Radial CDF of the oriented Kesten-McKay law: F_d(r) = (d-1) r^2 / (d^2 - r^2),
/// clamped to 1 at the spectral edge sqrt(d).
pub fn radial_cdf<S: Scalar>(r: S, d: u32) -> S {
    assert!(d >= 2, "law defined for d >= 2");
    let df = lit::<S>(d as f64);
    if r * r >= df {
        return S::one();
    }
    (df - S::one()) * r * r / (df * df - r * r)
}

/// Second absolute moment of the oriented Kesten-McKay law,
/// d^2 + d^2 (d-1) ln(1 - 1/d).
pub fn second_moment<S: Scalar>(d: u32) -> S {
    let df = lit::<S>(d as f64);
    df * df + df * df * (df - S::one()) * (S::one() - S::one() / df).ln()
}

/// Derivative dm/dz of the tracked branch via implicit differentiation of
/// the cubic; used by the branch-continuity diagnostics.
pub fn dm_dz<S: Scalar>(point: &SpectralPoint<S>, m: Complex<S>) -> Complex<S> {
    let c = point.degree_ratio();
    let cc = Complex::new(c, S::zero());
    let one = Complex::new(S::one(), S::zero());
    let z = point.z;
    let three = lit::<S>(3.0);
    let two = lit::<S>(2.0);
    let w2 = Complex::new(point.w.norm_sqr(), S::zero());
    // F(m, z) = c m^3 + (1+c) z m^2 + (z^2 + c - |w|^2) m + z
    let f_m = cc * m * m * three + (cc + one) * z * m * two + (z * z + cc - w2);
    let f_z = (cc + one) * m * m + z * m * two + one;
    -f_z / f_m
}
