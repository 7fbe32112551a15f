//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured numbers. Monte Carlo thresholds marked "committed" were
//! frozen from a calibration run of the same pipelines (seeds included).

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use okm_core::digraph::sample_simple;
use okm_core::girko::{esd, girko_identity_check, radial_ks, trivial_eigenvalue_index, RadialBump};
use okm_core::resolvent::{
    green_full, hermitization_spectrum, hermitize, q_parameters_from_green, singular_profile,
    ward_violation_of_green, local_law_bundle,
};
use okm_core::selfconsistent::{
    kesten_mckay_density, m_star, radial_cdf, scaled_cubic_roots, second_moment, solve_m_infty,
    solve_unrescaled, unscaled_mt_d1, Convention, SpectralPoint,
};
use okm_core::treegreen::{
    boundary_sums, build_tree, ext, ext_i, ext_o, green_dense, path_entry,
    root_entries_recursive, tree_green_elimination, y_ik, y_ok, TreeKind,
};
use okm_core::linalg;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Test-local adaptive Simpson: the quadrature oracle for criterion 1 stays
/// independent of the crate's own integration helpers.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let coarse = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    let left = (m - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + m)) + f(m));
    let right = (b - m) / 6.0 * (f(m) + 4.0 * f(0.5 * (m + b)) + f(b));
    let fine = left + right;
    if depth == 0 || (fine - coarse).abs() <= 15.0 * tol {
        fine + (fine - coarse) / 15.0
    } else {
        simpson(f, a, m, tol / 2.0, depth - 1) + simpson(f, m, b, tol / 2.0, depth - 1)
    }
}

fn z_grid_50() -> Vec<C64> {
    let mut zs = Vec::with_capacity(2500);
    for i in 0..50 {
        for j in 0..50 {
            zs.push(C64::new(
                -4.0 + 8.0 * i as f64 / 49.0,
                1e-2 + (4.0 - 1e-2) * j as f64 / 49.0,
            ));
        }
    }
    zs
}

#[test]
fn criterion_1_density_normalization() {
    let mut worst_mass = 0.0f64;
    let mut worst_cdf = 0.0f64;
    for d in 3..=8u32 {
        let sqrt_d = (d as f64).sqrt();
        let mass = simpson(
            &|r| 2.0 * std::f64::consts::PI * r * kesten_mckay_density(C64::new(r, 0.0), d),
            0.0,
            sqrt_d,
            1e-13,
            40,
        );
        worst_mass = worst_mass.max((mass - 1.0).abs());
        for k in 1..=9 {
            let r = sqrt_d * k as f64 / 10.0;
            let part = simpson(
                &|s| 2.0 * std::f64::consts::PI * s * kesten_mckay_density(C64::new(s, 0.0), d),
                0.0,
                r,
                1e-13,
                40,
            );
            worst_cdf = worst_cdf.max((part - radial_cdf(r, d)).abs());
        }
    }
    assert!(worst_mass <= 1e-9, "density mass defect {worst_mass:.2e}");
    assert!(worst_cdf <= 1e-9, "radial CDF defect {worst_cdf:.2e}");
    println!(
        "criterion 1 (density normalization, d=3..8): PASS  mass defect {worst_mass:.2e}, cdf defect {worst_cdf:.2e}"
    );
}

#[test]
fn criterion_2_self_consistency() {
    let zs = z_grid_50();
    let ws = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.5, 0.0)];
    let mut worst_residual = 0.0f64;
    let mut worst_sg1_slack = f64::INFINITY;
    let mut worst_mt = 0.0f64;
    for d in [3u32, 4] {
        for &w in &ws {
            let stats: Vec<(f64, f64, f64)> = zs
                .par_iter()
                .map(|&z| {
                    let sol = solve_m_infty(&SpectralPoint::scaled(z, w, d).unwrap()).unwrap();
                    assert!(sol.m_infty.im > 0.0 && sol.mt_d.im > 0.0);
                    let slack = sol.sg1 - 0.5 * z.im.min(1.0);
                    let mt_slack = (d as f64 - 1.0) / (d as f64 - 2.0) - sol.mt_d.norm();
                    (sol.residual, slack, mt_slack)
                })
                .collect();
            for (res, slack, mt_slack) in stats {
                worst_residual = worst_residual.max(res);
                worst_sg1_slack = worst_sg1_slack.min(slack);
                assert!(mt_slack >= -1e-12, "|mT_d| bound violated by {mt_slack:.2e}");
                worst_mt = worst_mt.max(-mt_slack);
            }
        }
        // w = 0 factorization: semicircle pair and -z(d-1)/d
        for &z in zs.iter().step_by(7) {
            let roots = scaled_cubic_roots(z, C64::new(0.0, 0.0), d);
            let disc = (z * z - 4.0).sqrt();
            for target in [
                (-z + disc) / 2.0,
                (-z - disc) / 2.0,
                -z * (d as f64 - 1.0) / d as f64,
            ] {
                let best = roots.iter().map(|r| (*r - target).norm()).fold(f64::INFINITY, f64::min);
                assert!(best <= 1e-10, "w=0 factorization root off by {best:.2e}");
            }
        }
    }
    assert!(worst_residual <= 1e-12, "cubic residual {worst_residual:.2e}");
    assert!(worst_sg1_slack >= -1e-12, "S_g^1 bound violated by {worst_sg1_slack:.2e}");
    println!(
        "criterion 2 (self-consistency on 50x50 grid, w in {{0,1,1.5}}, d in {{3,4}}): PASS  max residual {worst_residual:.2e}, min S_g^1 slack {worst_sg1_slack:.2e}"
    );
}

#[test]
fn criterion_3_scaling_and_unscaled_recursion() {
    let zs = z_grid_50();
    let ws = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.5, 0.0)];
    let mut worst_scaling = 0.0f64;
    let mut worst_ident = 0.0f64;
    for d in [3u32, 4] {
        let s = (d as f64 - 1.0).sqrt();
        for &w in &ws {
            let devs: Vec<(f64, f64)> = zs
                .par_iter()
                .map(|&z| {
                    let sol = solve_m_infty(&SpectralPoint::scaled(z, w, d).unwrap()).unwrap();
                    let star = m_star(z * s, w * s, d).unwrap();
                    let scaling = (star * s - sol.mt_d).norm();
                    let ident = (sol.mt_d.inv()
                        - (sol.m_infty.inv() - sol.m_infty / (d as f64 - 1.0)))
                    .norm();
                    (scaling, ident)
                })
                .collect();
            for (a, b) in devs {
                worst_scaling = worst_scaling.max(a);
                worst_ident = worst_ident.max(b);
            }
        }
    }
    assert!(worst_scaling <= 1e-10, "scaling identity defect {worst_scaling:.2e}");
    assert!(worst_ident <= 1e-10, "1/mT identity defect {worst_ident:.2e}");

    // unscaled degree recursion anchored by the d = 1 closed form
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(314159);
    let mut worst_rec = 0.0f64;
    let mut worst_d1 = 0.0f64;
    for _ in 0..50 {
        let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(2.5..4.0));
        let w = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (_, mt1) = solve_unrescaled(z, w, 1).unwrap();
        worst_d1 = worst_d1.max((mt1 - unscaled_mt_d1(z, w)).norm());
        for d in 2..=6u32 {
            let (m, mt) = solve_unrescaled(z, w, d).unwrap();
            // shift via the quadratic branch that reproduces m
            let root = (C64::new(1.0, 0.0) + mt * mt * 4.0).sqrt();
            let shift_a = (root - 1.0) / (mt * 2.0);
            let shift_b = (-root - 1.0) / (mt * 2.0);
            let shift = if (shift_a - m).norm() <= (shift_b - m).norm() { shift_a } else { shift_b };
            assert!((shift - m).norm() <= 1e-9, "branch of the shift formula drifted");
            let (_, mt_prev) = solve_unrescaled(z - shift, w, d - 1).unwrap();
            worst_rec = worst_rec.max((mt - mt_prev).norm());
        }
    }
    assert!(worst_rec <= 1e-8, "degree recursion defect {worst_rec:.2e}");
    assert!(worst_d1 <= 1e-8, "d=1 closed form defect {worst_d1:.2e}");
    println!(
        "criterion 3 (scaling + tree identity + unscaled recursion d=2..6): PASS  scaling {worst_scaling:.2e}, identity {worst_ident:.2e}, recursion {worst_rec:.2e}, d=1 anchor {worst_d1:.2e}"
    );
}

#[test]
fn criterion_4_tree_oracle_equivalence() {
    let z = C64::new(0.35, 0.8);
    let w = C64::new(1.05, 0.4);
    let d1 = C64::new(0.15, 0.55); // arbitrary boundary weights for the ladder check
    let d2 = C64::new(-0.25, 0.65);
    const DENSE_SIDE_CAP: usize = 2000;
    let mut worst_dense = 0.0f64;
    let mut worst_elim = 0.0f64;
    let mut dense_pairs = Vec::new();
    let mut elim_pairs = Vec::new();
    for d in [3usize, 4] {
        let sol = solve_m_infty(&SpectralPoint::scaled(z, w, d as u32).unwrap()).unwrap();
        let m = sol.m_infty;
        for k in 1..=5usize {
            let t1 = build_tree(TreeKind::T1, k, d).unwrap();
            let n1 = t1.n_vertices();
            if 2 * n1 <= DENSE_SIDE_CAP {
                dense_pairs.push((d, k));
                // dense oracle: every recursive product checked entrywise
                let e1 = ext_i(&t1, m, m, z, w).unwrap();
                let g1 = green_dense(&e1).unwrap();
                let oracle = tree_green_elimination(&e1, &t1).unwrap();
                for v in 0..n1 {
                    for a in 0..2 {
                        for b in 0..2 {
                            worst_dense = worst_dense
                                .max((oracle.row_root[v][a][b] - g1[[a * n1, v + b * n1]]).norm())
                                .max((oracle.col_root[v][a][b] - g1[[v + a * n1, b * n1]]).norm());
                        }
                    }
                }
                let blk = root_entries_recursive(TreeKind::T1, z, w, d as u32).unwrap();
                worst_dense = worst_dense
                    .max((g1[[0, 0]] - blk[0][0]).norm())
                    .max((g1[[0, n1]] - blk[0][1]).norm())
                    .max((g1[[n1, 0]] - blk[1][0]).norm())
                    .max((g1[[n1, n1]] - blk[1][1]).norm());
                worst_dense = worst_dense.max((y_ik(m, m, k, d, z, w).unwrap() - g1[[n1, n1]]).norm());
                // path factorization from the root
                for v in (0..n1).step_by(1 + n1 / 64) {
                    for o in [0usize, 1] {
                        let p = path_entry(&e1, &t1, n1, v + o * n1).unwrap();
                        worst_dense = worst_dense.max((p.value - g1[[n1, v + o * n1]]).norm());
                    }
                }
                // arbitrary boundary weights
                let e1b = ext_i(&t1, d1, d2, z, w).unwrap();
                let g1b = green_dense(&e1b).unwrap();
                worst_dense =
                    worst_dense.max((y_ik(d1, d2, k, d, z, w).unwrap() - g1b[[n1, n1]]).norm());
                // out-deficit tree
                let t2 = build_tree(TreeKind::T2, k, d).unwrap();
                let e2 = ext_o(&t2, d1, d2, z, w).unwrap();
                let g2 = green_dense(&e2).unwrap();
                worst_dense =
                    worst_dense.max((y_ok(d1, d2, k, d, z, w).unwrap() - g2[[0, 0]]).norm());
                // full tree: Ext closes the recursion at the root
                let t = build_tree(TreeKind::T, k, d).unwrap();
                if 2 * t.n_vertices() <= DENSE_SIDE_CAP {
                    let ge = green_dense(&ext(&t, m, m, z, w).unwrap()).unwrap();
                    let nt = t.n_vertices();
                    worst_dense = worst_dense
                        .max((ge[[0, 0]] - sol.mt_d).norm())
                        .max((ge[[nt, nt]] - sol.mt_d).norm())
                        .max((ge[[0, nt]] - sol.mt_uod).norm())
                        .max((ge[[nt, 0]] - sol.mt_lod).norm());
                }
            } else {
                // dense inversion is out of reach at this size on desk
                // hardware; the independent explicit-graph elimination
                // oracle carries the comparison instead
                elim_pairs.push((d, k));
                let e1 = ext_i(&t1, d1, d2, z, w).unwrap();
                let oracle = tree_green_elimination(&e1, &t1).unwrap();
                worst_elim = worst_elim
                    .max((y_ik(d1, d2, k, d, z, w).unwrap() - oracle.root_block[1][1]).norm());
                let t2 = build_tree(TreeKind::T2, k, d).unwrap();
                let e2 = ext_o(&t2, d1, d2, z, w).unwrap();
                let oracle2 = tree_green_elimination(&e2, &t2).unwrap();
                worst_elim = worst_elim
                    .max((y_ok(d1, d2, k, d, z, w).unwrap() - oracle2.root_block[0][0]).norm());
            }
            // boundary sums, both routes (direct route uses the explicit graph)
            let sums = boundary_sums(k, d as u32, z, w).unwrap();
            let gap = (sums.a1_power - sums.a1_direct)
                .abs()
                .max((sums.a2_power - sums.a2_direct).abs());
            if 2 * n1 <= DENSE_SIDE_CAP {
                worst_dense = worst_dense.max(gap);
            } else {
                worst_elim = worst_elim.max(gap);
            }
        }

        // fixed point at m_infty for K = 1..8
        for k in 1..=8 {
            let yi = (y_ik(m, m, k, d, z, w).unwrap() - m).norm();
            let yo = (y_ok(m, m, k, d, z, w).unwrap() - m).norm();
            assert!(yi <= 1e-10 && yo <= 1e-10, "fixed point drift d={d} K={k}: {yi:.2e}/{yo:.2e}");
        }

        // Jacobian at the fixed point vs the [[Y,X],[X,Y]] power prediction
        let xc = sol.x_lin();
        let yc = sol.y_lin(d as u32);
        for k in [1usize, 2, 3] {
            let mut pred = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
            for _ in 0..=k {
                let b = pred;
                pred = [
                    [b[0][0] * yc + b[0][1] * xc, b[0][0] * xc + b[0][1] * yc],
                    [b[1][0] * yc + b[1][1] * xc, b[1][0] * xc + b[1][1] * yc],
                ];
            }
            let h = 1e-6;
            let fd_i = [
                (y_ik(m + h, m, k, d, z, w).unwrap() - y_ik(m, m, k, d, z, w).unwrap()) / h,
                (y_ik(m, m + h, k, d, z, w).unwrap() - y_ik(m, m, k, d, z, w).unwrap()) / h,
            ];
            let fd_o = [
                (y_ok(m + h, m, k, d, z, w).unwrap() - y_ok(m, m, k, d, z, w).unwrap()) / h,
                (y_ok(m, m + h, k, d, z, w).unwrap() - y_ok(m, m, k, d, z, w).unwrap()) / h,
            ];
            for (num, exact) in [
                (fd_i[0], pred[0][0]),
                (fd_i[1], pred[0][1]),
                (fd_o[0], pred[1][0]),
                (fd_o[1], pred[1][1]),
            ] {
                assert!(
                    (num - exact).norm() <= 1e-4,
                    "Jacobian mismatch d={d} K={k}: {:.2e}",
                    (num - exact).norm()
                );
            }
        }
    }
    assert!(worst_dense <= 1e-10, "dense-oracle deviation {worst_dense:.2e}");
    assert!(worst_elim <= 1e-10, "elimination-oracle deviation {worst_elim:.2e}");
    println!(
        "criterion 4 (tree oracle equivalence, K<=5, d in {{3,4}}): PASS  dense {worst_dense:.2e} on {dense_pairs:?}; elimination oracle {worst_elim:.2e} on {elim_pairs:?} (dense side > 2000 infeasible in budget); fixed points K<=8 and Jacobians OK"
    );
}

#[test]
fn criterion_5_resolvent_identities() {
    // Ward identity at N = 400
    let g = sample_simple(400, 3, 40, 100_000).unwrap();
    let z = C64::new(0.2, 0.5);
    let w = C64::new(0.9, 0.3);
    let green = green_full(&g, z, w, Convention::Scaled).unwrap();
    let ward = ward_violation_of_green(&green, z);
    assert!(ward <= 1e-8, "ward violation {ward:.2e}");

    // +/- spectral symmetry at N = 400
    let spec = hermitization_spectrum(&g, w, Convention::Scaled).unwrap();
    let mut sym = 0.0f64;
    for i in 0..spec.len() {
        sym = sym.max((spec[i] + spec[spec.len() - 1 - i]).abs());
    }
    assert!(sym <= 1e-9, "spectrum symmetry defect {sym:.2e}");

    // minor downdate vs literal deletion at N = 60 over 10 seeds
    let mut worst_q = 0.0f64;
    for seed in 1..=10u64 {
        let g = sample_simple(60, 3, seed, 100_000).unwrap();
        let z = C64::new(0.25, 0.6);
        let w = C64::new(1.0, 0.0);
        let green = green_full(&g, z, w, Convention::Scaled).unwrap();
        let q = q_parameters_from_green(&g, &green).unwrap();
        assert_eq!(q.skipped, 0);
        let h = hermitize(&g, z, w, Convention::Scaled).unwrap().dense();
        let n = g.n_vertices();
        let mut q_i = C64::new(0.0, 0.0);
        let mut q_o = C64::new(0.0, 0.0);
        for x in 0..n {
            let keep: Vec<usize> = (0..2 * n).filter(|&i| i != x && i != x + n).collect();
            let mut sub = ndarray::Array2::from_elem((keep.len(), keep.len()), C64::new(0.0, 0.0));
            for (a, &ia) in keep.iter().enumerate() {
                for (b, &ib) in keep.iter().enumerate() {
                    sub[[a, b]] = h[[ia, ib]];
                }
            }
            let gsub = linalg::invert(&sub).unwrap();
            let pos = |idx: usize| keep.binary_search(&idx).unwrap();
            for &y in g.out_neighbors(x) {
                q_i += gsub[[pos(y as usize + n), pos(y as usize + n)]];
            }
            for &y in g.in_neighbors(x) {
                q_o += gsub[[pos(y as usize), pos(y as usize)]];
            }
        }
        q_i /= (n * 3) as f64;
        q_o /= (n * 3) as f64;
        worst_q = worst_q.max((q.q_i - q_i).norm()).max((q.q_o - q_o).norm());
    }
    assert!(worst_q <= 1e-8, "downdate vs literal deletion {worst_q:.2e}");
    println!(
        "criterion 5 (resolvent identities): PASS  ward {ward:.2e}, +/- symmetry {sym:.2e}, downdate gap {worst_q:.2e}"
    );
}

#[test]
fn criterion_6_local_law_trend() {
    // committed pilot thresholds at N = 2000 (seeds 1..8, z = 0.3i, w = 1):
    // trace-dev median 4.0e-4, q-dev median 4.4e-4 observed
    const TRACE_MEDIAN_LIMIT: f64 = 1.0e-3;
    const Q_MEDIAN_LIMIT: f64 = 1.0e-3;
    let z = C64::new(0.0, 0.3);
    let w = C64::new(1.0, 0.0);
    let sizes = [250usize, 500, 1000, 2000];
    let mut medians = Vec::new();
    for &n in &sizes {
        let mut tdev = Vec::new();
        let mut qdev = Vec::new();
        for seed in 1..=8u64 {
            let g = sample_simple(n, 3, seed, 100_000).unwrap();
            let b = local_law_bundle(&g, z, w).unwrap();
            tdev.push(b.block_deviation);
            qdev.push((b.q_i - b.m_infty).norm().max((b.q_o - b.m_infty).norm()));
        }
        medians.push((n, median(tdev), median(qdev)));
    }
    for pair in medians.windows(2) {
        assert!(
            pair[1].1 < pair[0].1,
            "trace-dev median not strictly decreasing: {medians:?}"
        );
        assert!(
            pair[1].2 < pair[0].2,
            "q-dev median not strictly decreasing: {medians:?}"
        );
    }
    let last = medians.last().unwrap();
    assert!(last.1 <= TRACE_MEDIAN_LIMIT, "trace-dev median {:.2e} at N=2000", last.1);
    assert!(last.2 <= Q_MEDIAN_LIMIT, "q-dev median {:.2e} at N=2000", last.2);
    println!("criterion 6 (local law trend, medians over 8 seeds): PASS  {medians:?}");
}

#[test]
fn criterion_7_esd_convergence() {
    // committed pilot thresholds: KS median at N=2000 observed 0.0109
    const KS_LIMIT_2000: f64 = 0.025;
    let sizes = [250usize, 500, 1000, 2000];
    let mut ks_medians = Vec::new();
    let mut radius_worst = 0.0f64;
    let mut m2_at_2000 = Vec::new();
    for &n in &sizes {
        let mut ks = Vec::new();
        for seed in 1..=8u64 {
            let g = sample_simple(n, 3, seed, 100_000).unwrap();
            let eigs = esd(&g).unwrap();
            let ti = trivial_eigenvalue_index(&eigs, 3);
            assert!(
                (eigs[ti] - C64::new(3.0, 0.0)).norm() <= 1e-8,
                "trivial eigenvalue off by {:.2e}",
                (eigs[ti] - C64::new(3.0, 0.0)).norm()
            );
            let radius = eigs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ti)
                .map(|(_, l)| l.norm())
                .fold(0.0, f64::max);
            radius_worst = radius_worst.max(radius);
            assert!(radius <= 3f64.sqrt() + 0.3, "nontrivial radius {radius}");
            ks.push(radial_ks(&eigs, 3, true));
            if n == 2000 {
                let m2 = eigs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != ti)
                    .map(|(_, l)| l.norm_sqr())
                    .sum::<f64>()
                    / (n - 1) as f64;
                m2_at_2000.push(m2);
            }
        }
        ks_medians.push((n, median(ks)));
    }
    for pair in ks_medians.windows(2) {
        assert!(pair[1].1 < pair[0].1, "KS median not decreasing: {ks_medians:?}");
    }
    assert!(
        ks_medians.last().unwrap().1 <= KS_LIMIT_2000,
        "KS median {:.4} at N=2000",
        ks_medians.last().unwrap().1
    );
    let target = second_moment::<f64>(3);
    assert!((target - 1.70163).abs() < 1e-5);
    let m2 = median(m2_at_2000);
    assert!(
        (m2 - target).abs() / target <= 0.05,
        "second moment {m2:.5} vs {target:.5}"
    );
    println!(
        "criterion 7 (esd convergence, 8 seeds): PASS  KS medians {ks_medians:?}, radius max {radius_worst:.4} <= {:.4}, m2 {m2:.5} vs {target:.5}",
        3f64.sqrt() + 0.3
    );
}

#[test]
fn criterion_8_girko_identity() {
    // committed pilot outcome: relative discrepancy at h=0.2 a few 1e-4,
    // decaying ~4x from h=0.4 (seeds 777, 778)
    let bump = RadialBump::gaussian(C64::new(0.0, 0.0), 1.2 * 3f64.sqrt());
    let mut lines = Vec::new();
    for seed in [777u64, 778] {
        let g = sample_simple(50, 3, seed, 100_000).unwrap();
        let coarse = girko_identity_check(&g, &[bump.clone()], 0.4, None).unwrap();
        let fine = girko_identity_check(&g, &[bump.clone()], 0.2, None).unwrap();
        assert!(
            fine.relative_discrepancy <= 0.02,
            "relative discrepancy {:.3e}",
            fine.relative_discrepancy
        );
        assert!(
            fine.relative_discrepancy <= (coarse.relative_discrepancy / 2.0).max(1e-3),
            "no ~h^2 decay: {:.3e} -> {:.3e}",
            coarse.relative_discrepancy,
            fine.relative_discrepancy
        );
        lines.push(format!(
            "seed {seed}: {:.2e} (h=0.4) -> {:.2e} (h=0.2)",
            coarse.relative_discrepancy, fine.relative_discrepancy
        ));
    }
    println!("criterion 8 (girko identity, N=50): PASS  {}", lines.join("; "));
}

#[test]
fn criterion_9_switching_suite() {
    use okm_core::switching::{apply_switch, sample_switching, switch_statistics};
    // committed pilot outcome at (N=2000, ell=2, R_chi=1): zero-chi mean
    // 146.4 of mu = 150, max proximity count 8
    let mut pairs = 0usize;
    let mut switches = 0usize;
    let plans: [(usize, usize, usize, usize, u64); 5] = [
        (300, 1, 1, 1500, 1),
        (1500, 1, 1, 2500, 2),
        (1500, 1, 2, 2000, 3),
        (2000, 2, 1, 2000, 4),
        (2000, 2, 2, 2000, 5),
    ];
    for (n, ell, r_chi, count, gseed) in plans {
        let graphs: Vec<_> = (0..4u64)
            .map(|k| sample_simple(n, 3, gseed * 100 + k, 100_000).unwrap())
            .collect();
        let per_graph = count / graphs.len();
        for (gi, g) in graphs.iter().enumerate() {
            for t in 0..per_graph {
                let center = (t * 37 + gi * 11) % n;
                let seed = (gseed << 32) ^ (gi as u64) << 16 ^ t as u64;
                let s = match sample_switching(g, center, ell, r_chi, seed) {
                    Ok(s) => s,
                    Err(okm_core::Error::EmptyComplement) => continue,
                    Err(e) => panic!("{e}"),
                };
                let (g2, s2) = apply_switch(g, &s).unwrap();
                assert!(g2.is_simple(), "simplicity lost");
                let (g3, s3) = apply_switch(&g2, &s2).unwrap();
                assert!(g3 == *g && s3 == s, "involution failed at n={n} ell={ell} seed={seed}");
                switches += s.valid_count();
                pairs += 1;
            }
        }
    }
    assert!(pairs >= 10_000, "only {pairs} (graph, data) pairs exercised");
    assert!(switches > 10_000, "only {switches} individual switches exercised");

    let g = sample_simple(2000, 3, 31, 100_000).unwrap();
    let stats = switch_statistics(&g, 11, 2, 1, 500, 99).unwrap();
    assert_eq!(stats.simplicity_violations, 0);
    assert_eq!(stats.mu, 150);
    assert!(stats.zero_chi_max <= stats.mu, "zero count above mu");
    assert!(
        (110.0..=150.0).contains(&stats.zero_chi_mean),
        "zero-chi mean {:.1} outside the committed band",
        stats.zero_chi_mean
    );
    assert!(
        stats.max_proximity_count <= 24,
        "proximity count {} above committed bound",
        stats.max_proximity_count
    );
    println!(
        "criterion 9 (switching suite): PASS  {pairs} involution pairs ({switches} switches), 500-trial stats: zero-chi mean {:.1}/{} max {}, proximity max {}, violations {}",
        stats.zero_chi_mean, stats.mu, stats.zero_chi_max, stats.max_proximity_count, stats.simplicity_violations
    );
}
