//! One-off calibration run backing the committed thresholds in the
//! acceptance suite. Prints medians/maxima for the Monte Carlo criteria.

use num_complex::Complex64 as C64;
use okm_core::digraph::sample_simple;
use okm_core::girko::{esd, girko_identity_check, local_window, radial_ks, RadialBump};
use okm_core::resolvent::local_law_bundle;
use okm_core::switching::switch_statistics;

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn main() {
    let t0 = std::time::Instant::now();
    let z = C64::new(0.0, 0.3);
    let w = C64::new(1.0, 0.0);

    // ---- criterion 6: local law trend ----
    println!("== local law trend (z=0.3i, w=1, d=3) ==");
    for n in [250usize, 500, 1000, 2000] {
        let mut tdev = Vec::new();
        let mut qdev = Vec::new();
        for seed in 1..=8u64 {
            let g = sample_simple(n, 3, seed, 100_000).unwrap();
            let b = local_law_bundle(&g, z, w).unwrap();
            let qd = (b.q_i - b.m_infty).norm().max((b.q_o - b.m_infty).norm());
            tdev.push(b.block_deviation);
            qdev.push(qd);
        }
        println!(
            "n={n}: trace-dev median {:.5} max {:.5} | q-dev median {:.5} max {:.5}  [{:?}]",
            median(&mut tdev.clone()),
            tdev.iter().cloned().fold(0.0, f64::max),
            median(&mut qdev.clone()),
            qdev.iter().cloned().fold(0.0, f64::max),
            t0.elapsed()
        );
    }

    // ---- criterion 7: esd convergence ----
    println!("== esd: ks / radius / second moment ==");
    for n in [250usize, 500, 1000, 2000] {
        let mut ks = Vec::new();
        let mut rad: f64 = 0.0;
        let mut m2 = Vec::new();
        for seed in 1..=8u64 {
            let g = sample_simple(n, 3, seed, 100_000).unwrap();
            let eigs = esd(&g).unwrap();
            ks.push(radial_ks(&eigs, 3, true));
            let ti = okm_core::girko::trivial_eigenvalue_index(&eigs, 3);
            rad = rad.max(
                eigs.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != ti)
                    .map(|(_, l)| l.norm())
                    .fold(0.0, f64::max),
            );
            m2.push(
                eigs.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != ti)
                    .map(|(_, l)| l.norm_sqr())
                    .sum::<f64>()
                    / (n - 1) as f64,
            );
            if n == 2000 {
                let bump = RadialBump::gaussian(C64::new(0.0, 0.0), 1.0);
                let wc = local_window(&eigs, C64::new(0.5, 0.0), 0.1, 3, n, &bump);
                println!("  window(w0=0.5,a=0.1) seed {seed}: diff {:+.5}", wc.difference);
            }
        }
        println!(
            "n={n}: ks median {:.5} max {:.5} | radius max {:.4} | m2 median {:.5}  [{:?}]",
            median(&mut ks.clone()),
            ks.iter().cloned().fold(0.0, f64::max),
            rad,
            median(&mut m2.clone()),
            t0.elapsed()
        );
    }

    // ---- criterion 8: girko identity self-convergence ----
    println!("== girko at N=50 ==");
    let bump = RadialBump::gaussian(C64::new(0.0, 0.0), 1.2 * 3f64.sqrt());
    for seed in [777u64, 778, 779] {
        let g = sample_simple(50, 3, seed, 100_000).unwrap();
        let coarse = girko_identity_check(&g, &[bump.clone()], 0.4, None).unwrap();
        let fine = girko_identity_check(&g, &[bump.clone()], 0.2, None).unwrap();
        println!(
            "seed {seed}: rel {:.2e} (h=0.4, {} pts) -> {:.2e} (h=0.2, {} pts), ratio {:.2}  [{:?}]",
            coarse.relative_discrepancy,
            coarse.grid_points,
            fine.relative_discrepancy,
            fine.grid_points,
            coarse.relative_discrepancy / fine.relative_discrepancy.max(1e-300),
            t0.elapsed()
        );
    }

    // ---- criterion 9: switching statistics ----
    println!("== switching stats at n=2000 ==");
    let g = sample_simple(2000, 3, 31, 100_000).unwrap();
    for (ell, r_chi) in [(2usize, 1usize), (2, 4), (1, 1)] {
        let st = switch_statistics(&g, 11, ell, r_chi, 40, 99).unwrap();
        println!(
            "ell={ell} R={r_chi}: mu={} zero mean {:.1} max {} | valid mean {:.1} | prox max {} | nontree {:.4}  [{:?}]",
            st.mu,
            st.zero_chi_mean,
            st.zero_chi_max,
            st.valid_mean,
            st.max_proximity_count,
            st.nontree_fraction_mean,
            t0.elapsed()
        );
    }

    // ---- w-uniformity of the local law at n=1000 ----
    println!("== w-grid uniformity at n=1000 ==");
    let g = sample_simple(1000, 3, 1, 100_000).unwrap();
    let reference = local_law_bundle(&g, z, w).unwrap().block_deviation;
    let mut worst: f64 = 0.0;
    let r_grid = 1.5 * 3f64.sqrt() / 2f64.sqrt();
    for i in 0..5 {
        for j in 0..5 {
            let wg = C64::new(
                -r_grid + 2.0 * r_grid * i as f64 / 4.0,
                -r_grid + 2.0 * r_grid * j as f64 / 4.0,
            );
            if wg.norm() > r_grid {
                continue;
            }
            let b = local_law_bundle(&g, z, wg).unwrap();
            worst = worst.max(b.block_deviation);
        }
    }
    println!("reference {reference:.5}, grid max {worst:.5}, ratio {:.2}  [{:?}]", worst / reference, t0.elapsed());
}
