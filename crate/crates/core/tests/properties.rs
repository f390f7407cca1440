//! Structural invariants over randomized benchmark shapes and levels.

use formsteklov::feec::{mass_matrix, tangential_trace, MassKind};
use formsteklov::geometry::measures;
use formsteklov::mesh::{
    betti, euler_characteristic, generate, read_mesh_str, write_mesh_string, DomainSpec, Family,
};
use formsteklov::scalar::{biharmonic_mu1, mean_exit_time};
use formsteklov::steklov::{dual_spectrum, primal_spectrum};
use formsteklov::verify::{richardson, StudyFlag};
use proptest::prelude::*;

fn planar() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Disk),
        (0.5f64..1.5, 0.4f64..=1.0).prop_map(|(a, t)| Family::Ellipse { a, b: t * a }),
        (0.2f64..0.7, 0.8f64..1.5).prop_map(|(t, r_out)| Family::Annulus {
            r_in: t * r_out,
            r_out
        }),
    ]
}

fn spatial() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Ball),
        (0.6f64..1.2, 0.6f64..=1.0, 0.6f64..=1.0).prop_map(|(a, s, t)| Family::Ellipsoid {
            a,
            b: s * a,
            c: t * s * a
        }),
        (0.3f64..0.6).prop_map(|r_in| Family::Shell { r_in, r_out: 1.0 }),
        (0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0).prop_map(|(lx, ly, lz)| Family::Cuboid {
            lx,
            ly,
            lz
        }),
    ]
}

fn spec() -> impl Strategy<Value = DomainSpec> {
    prop_oneof![
        (planar(), 0usize..=3).prop_map(|(f, l)| DomainSpec::new(f, l)),
        (spatial(), 0usize..=1).prop_map(|(f, l)| DomainSpec::new(f, l)),
    ]
}

fn expected_betti(f: &Family) -> Vec<usize> {
    match f {
        Family::Disk | Family::Ellipse { .. } => vec![1, 0, 0],
        Family::Annulus { .. } => vec![1, 1, 0],
        Family::Shell { .. } => vec![1, 0, 1, 0],
        _ => vec![1, 0, 0, 0],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coboundary_squares_to_zero(s in spec()) {
        let cx = generate(&s).unwrap();
        for p in 0..cx.dim() - 1 {
            prop_assert!(cx.coboundary(p + 1).matmul(&cx.coboundary(p)).is_zero());
        }
    }

    #[test]
    fn trace_commutes_with_coboundary(s in spec()) {
        let cx = generate(&s).unwrap();
        let sigma = cx.boundary().unwrap().complex();
        for p in 0..cx.dim() - 1 {
            let lhs = tangential_trace(&cx, p + 1).unwrap().matmul(&cx.coboundary(p).to_real());
            let rhs = sigma.coboundary(p).to_real().matmul(&tangential_trace(&cx, p).unwrap());
            prop_assert_eq!(lhs.add_scaled(&rhs, -1.0).max_abs(), 0.0);
        }
    }

    #[test]
    fn topology_is_level_independent(s in spec()) {
        let cx = generate(&s).unwrap();
        let b = betti(&cx);
        prop_assert_eq!(&b, &expected_betti(&s.family));
        let alternating: i64 = b.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(euler_characteristic(&cx), alternating);
    }

    #[test]
    fn refinement_multiplies_cells(s in spec()) {
        let coarse = generate(&s).unwrap();
        let fine = generate(&s.at_level(s.level + 1)).unwrap();
        let n = coarse.dim();
        prop_assert_eq!(fine.count(n), coarse.count(n) << n);
        prop_assert_eq!(fine.count(0), coarse.count(0) + coarse.count(1));
        prop_assert_eq!(euler_characteristic(&fine), euler_characteristic(&coarse));
        prop_assert!(fine.max_edge_length() < coarse.max_edge_length());
    }

    #[test]
    fn mesh_round_trip_is_byte_identical(s in spec()) {
        let cx = generate(&s).unwrap();
        let text = write_mesh_string(&cx);
        let back = read_mesh_str(&text).unwrap();
        prop_assert_eq!(back.counts(), cx.counts());
        prop_assert_eq!(write_mesh_string(&back), text);
    }

    #[test]
    fn mass_matrices_are_spd(s in spec(), seed in prop::collection::vec(-1.0f64..1.0, 64)) {
        let cx = generate(&s).unwrap();
        for p in 0..=cx.dim() {
            for kind in [MassKind::Consistent, MassKind::Lumped] {
                let m = mass_matrix(&cx, p, kind).unwrap();
                prop_assert!(m.asymmetry() <= 1e-14 * m.max_abs());
                let x: Vec<f64> = (0..m.nrows()).map(|i| seed[i % seed.len()] + 1e-3).collect();
                prop_assert!(m.bilinear(&x, &x) > 0.0);
                prop_assert!(m.diagonal().iter().all(|&d| d > 0.0));
            }
        }
    }

    #[test]
    fn exit_time_flux_obeys_green(s in spec()) {
        // Coarsest annuli and shells have no interior vertex.
        let cx = generate(&s.at_level(s.level.max(1))).unwrap();
        let (vol, area) = measures(&cx);
        let r = mean_exit_time(&cx).unwrap();
        prop_assert!((r.mean_flux - vol / area).abs() <= 1e-10 * (vol / area));
        prop_assert!(r.e.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn richardson_recovers_power_laws(limit in -5.0f64..5.0, c in 0.1f64..2.0, q in 1.2f64..2.8, start in 0usize..4) {
        let levels: Vec<usize> = (start..start + 4).collect();
        let values: Vec<f64> = levels.iter().map(|&l| limit + c * 2f64.powf(-q * l as f64)).collect();
        let s = richardson("x", &levels, &values).unwrap();
        prop_assert_eq!(s.flag, None);
        prop_assert!((s.order.unwrap() - q).abs() < 1e-6);
        prop_assert!((s.extrapolated - limit).abs() < 1e-8 * (1.0 + limit.abs()));
        prop_assert!(s.error_bar <= (values[3] - values[2]).abs());
    }

    #[test]
    fn richardson_flags_oscillation(limit in -5.0f64..5.0, c in 0.1f64..2.0) {
        let values = [limit + c, limit - c / 2.0, limit + c / 4.0];
        let s = richardson("x", &[1, 2, 3], &values).unwrap();
        prop_assert_eq!(s.flag, Some(StudyFlag::NonMonotone));
        prop_assert_eq!(s.extrapolated, values[2]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planar_dtn_is_symmetric_psd_with_topological_kernel(f in planar(), level in 1usize..=3) {
        let cx = generate(&DomainSpec::new(f, level)).unwrap();
        let b = expected_betti(&f);
        for p in 0..cx.dim() {
            let abs = primal_spectrum(&cx, p, 4).unwrap();
            prop_assert!(abs.asymmetry <= 1e-10);
            prop_assert!(abs.min_relative_eigenvalue >= -1e-8);
            prop_assert_eq!(abs.kernel_dim, b[p]);
            let rel = dual_spectrum(&cx, p, 4).unwrap();
            prop_assert!(rel.asymmetry <= 1e-10);
            prop_assert!(rel.min_relative_eigenvalue >= -1e-8);
            // The relative field of an annulus is only approximated by the
            // relative scheme (its eigenvalue decays at first order), so
            // exactness is required for the top degree alone.
            let expected = b[cx.dim() - 1 - p];
            if p + 1 == cx.dim() {
                prop_assert_eq!(rel.kernel_dim, expected);
            } else {
                prop_assert!(rel.kernel_dim <= expected);
            }
        }
    }

    #[test]
    fn biharmonic_mu_is_below_the_discrete_isoperimetric_ratio(f in planar(), level in 1usize..=3) {
        let cx = generate(&DomainSpec::new(f, level)).unwrap();
        let (vol, area) = measures(&cx);
        let mu = biharmonic_mu1(&cx).unwrap();
        prop_assert!(mu > 0.0);
        prop_assert!(mu <= area / vol * (1.0 + 1e-10));
    }

    #[test]
    fn dtn_spectrum_scales_inversely_with_size(t in 0.5f64..2.0, level in 0usize..=2) {
        let unit = generate(&DomainSpec::new(Family::Ellipse { a: 1.0, b: 0.7 }, level)).unwrap();
        let scaled = generate(&DomainSpec::new(Family::Ellipse { a: t, b: 0.7 * t }, level)).unwrap();
        for p in 0..2 {
            let a = primal_spectrum(&unit, p, 4).unwrap().eigenvalues;
            let b = primal_spectrum(&scaled, p, 4).unwrap().eigenvalues;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x / t - y).abs() <= 1e-8 * (1.0 + x.abs()));
            }
        }
    }
}
