use ris_mec_core::channel::*;
use ris_mec_core::numerics::{normalized, ComplexMatrix};
use ris_mec_core::rng::rng_from_seed;
use ris_mec_core::{gen_channels, SystemConfig};

const DRAWS: u64 = 10_000;

/// Mean of `|h_d[m, n]|² / L_d,n` over draws, antennas and UEs.
fn normalized_direct_power(cfg: &SystemConfig, positions: &[[f64; 2]]) -> f64 {
    let (ld, _, _) = link_path_losses(cfg, positions).unwrap();
    let mut acc = 0.0;
    for s in 0..DRAWS {
        let ch = gen_channels_at(cfg, positions, &mut rng_from_seed(s)).unwrap();
        for n in 0..cfg.n_ue {
            for m in 0..cfg.m_ap {
                acc += ch.h_d[(m, n)].norm_sqr() / ld[n];
            }
        }
    }
    acc / (DRAWS as f64 * (cfg.n_ue * cfg.m_ap) as f64)
}

#[test]
fn rayleigh_direct_link_variance_matches_path_loss() {
    let cfg = SystemConfig::desk().with_zeta_d(0.0);
    let positions = vec![[25.0, 30.0], [50.0, 22.0], [33.0, 58.0], [59.0, 59.0]];
    let ratio = normalized_direct_power(&cfg, &positions);
    assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn second_moment_is_independent_of_rician_fraction() {
    let positions = vec![[25.0, 30.0], [50.0, 22.0], [33.0, 58.0], [59.0, 59.0]];
    for zeta in [0.25, 0.5, 0.9] {
        let cfg = SystemConfig::desk().with_zeta_d(zeta);
        let ratio = normalized_direct_power(&cfg, &positions);
        assert!((ratio - 1.0).abs() < 0.05, "zeta {zeta}: ratio {ratio}");
    }
}

#[test]
fn doubling_distance_scales_power_by_alpha() {
    let mut cfg = SystemConfig::desk().with_counts(2, 4, 2, 2).with_zeta_d(0.0);
    cfg.ap_pos = [0.0, 0.0, 0.0];
    cfg.area_origin = [0.0, 0.0];
    let positions = vec![[10.0, 0.0], [20.0, 0.0]];
    let mut p = [0.0; 2];
    for s in 0..DRAWS {
        let ch = gen_channels_at(&cfg, &positions, &mut rng_from_seed(s)).unwrap();
        for (n, acc) in p.iter_mut().enumerate() {
            *acc += (0..cfg.m_ap).map(|m| ch.h_d[(m, n)].norm_sqr()).sum::<f64>();
        }
    }
    let measured = p[1] / p[0];
    let expected = 2f64.powf(-cfg.alpha_d);
    assert!((measured / expected - 1.0).abs() < 0.05, "{measured} vs {expected}");
}

#[test]
fn pure_los_entries_have_path_loss_modulus() {
    let cfg = SystemConfig::desk().with_zeta_d(1.0);
    assert_eq!((cfg.zeta_r, cfg.zeta_ap), (1.0, 1.0));
    let ch = gen_channels(&cfg, 3).unwrap();
    let (ld, lr, la) = link_path_losses(&cfg, &ch.ue_positions).unwrap();
    for n in 0..cfg.n_ue {
        for m in 0..cfg.m_ap {
            assert!((ch.h_d[(m, n)].norm() / ld[n].sqrt() - 1.0).abs() < 1e-12);
        }
        for k in 0..cfg.k() {
            assert!((ch.h_r[(k, n)].norm() / lr[n].sqrt() - 1.0).abs() < 1e-12);
        }
    }
    for m in 0..cfg.m_ap {
        for k in 0..cfg.k() {
            assert!((ch.h_ap[(m, k)].norm() / la.sqrt() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn los_ris_to_ap_channel_is_rank_one() {
    let cfg = SystemConfig::reference();
    let ch = gen_channels(&cfg, 9).unwrap();
    // residual after projecting every column on the first one
    let u = normalized(&ch.h_ap.column(0)).unwrap();
    let proj = ComplexMatrix::outer(&u, &u).matmul(&ch.h_ap).unwrap();
    let residual = ch.h_ap.sub(&proj).frobenius_norm();
    assert!(residual < 1e-10 * ch.h_ap.frobenius_norm(), "{residual}");
}

#[test]
fn same_seed_is_bitwise_identical_and_positions_in_square() {
    let cfg = SystemConfig::reference();
    let a = gen_channels(&cfg, 77).unwrap();
    let b = gen_channels(&cfg, 77).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, gen_channels(&cfg, 78).unwrap());
    for p in &a.ue_positions {
        for (c, o) in p.iter().zip(cfg.area_origin) {
            assert!(*c >= o && *c <= o + cfg.area_side);
        }
    }
}

#[test]
fn steering_entries_have_unit_modulus() {
    for &(e, z) in &[(0.3, 1.2), (1.4, -2.0), (2.9, 0.1)] {
        assert!(steering_ura(e, z, 8, 3).iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        assert!(steering_ula(f64::sin(e), 8).unwrap().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
    }
    assert!(steering_ula(1.5, 4).is_err());
}

#[test]
fn ura_kronecker_order() {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let v = steering_ura(half_pi, half_pi, 2, 2);
    let expected = [1.0, 1.0, -1.0, -1.0];
    for (z, e) in v.iter().zip(expected) {
        assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
    }
}

#[test]
fn path_loss_examples() {
    assert!((path_loss(1.0, 3.5, 0.1, 1.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
    assert!((path_loss(10.0, 2.0, 0.1, 1.0, 1.0).unwrap() - 1e-3).abs() < 1e-15);
    assert!((path_loss(1.0, 2.5, 0.1, 1.0, 10f64.powf(0.3)).unwrap() - 0.19953).abs() < 1e-5);
    assert!(path_loss(0.5, 2.0, 0.1, 1.0, 1.0).is_err());
}
