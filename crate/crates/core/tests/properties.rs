mod common;

use common::{draw_mode, draw_quadratures, draw_time, rel, rng};
use proptest::prelude::*;
use wgquant_core::boundary::{self, ElectrodeId};
use wgquant_core::constants::{C, HBAR};
use wgquant_core::fields::{self, Excitation, ReferenceFrame};
use wgquant_core::geometry::{Family, Geometry, Mode, ModeClass};
use wgquant_core::motion::{self, QuadratureGrid, QuadraturePath};
use wgquant_core::numerics::AxisRule;
use wgquant_core::quanta;

fn class_strategy() -> impl Strategy<Value = ModeClass> {
    prop::sample::select(ModeClass::ALL.to_vec())
}

fn mode_strategy() -> impl Strategy<Value = (Mode, u64)> {
    (class_strategy(), any::<u64>())
        .prop_map(|(class, seed)| (draw_mode(&mut rng(seed), class), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dispersion_relation((mode, _) in mode_strategy()) {
        let om = mode.omega();
        prop_assert!(rel(om * om, C * C * (mode.beta().powi(2) + mode.k_c().powi(2))) < 1e-14);
        prop_assert!(mode.disp.v_phi >= C * (1.0 - 1e-15));
    }

    #[test]
    fn volume_quadrature_paths_agree((mode, seed) in mode_strategy()) {
        let mut r = rng(seed ^ 0x5eed);
        let exc = Excitation::canonical(&mode, 2.0, draw_quadratures(&mut r));
        let t = draw_time(&mut r, &mode);
        let grid = QuadratureGrid::default_for(&mode);
        let fast = motion::motion_by_quadrature(&mode, &exc, t, &grid, QuadraturePath::Fast).unwrap();
        let oracle = motion::motion_by_quadrature(&mode, &exc, t, &grid, QuadraturePath::Oracle).unwrap();
        let (h, pz) = motion::closed_form_energy(&mode, &exc).unwrap();
        prop_assert!(rel(fast.h, h) < 1e-10 && rel(oracle.h, h) < 1e-10);
        prop_assert!(rel(fast.p[2], pz) < 1e-10 && rel(oracle.p[2], pz) < 1e-10);
        let flux = motion::total_energy_by_flux_form(&mode, &exc, t, &grid).unwrap();
        prop_assert!(rel(flux.total(), h) < 1e-10 && rel(flux.momentum, pz) < 1e-10);
    }

    #[test]
    fn closed_form_densities_match_fields((mode, seed) in mode_strategy()) {
        let mut r = rng(seed ^ 0xd1);
        let exc = Excitation::canonical(&mode, 1.0, draw_quadratures(&mut r));
        let t = draw_time(&mut r, &mode);
        for &pair in fields::valid_frames(mode.class) {
            let flux = boundary::flux_field(&mode, pair, &exc).unwrap();
            let id = match pair {
                ReferenceFrame::TopBottom => ElectrodeId::Top,
                ReferenceFrame::LeftRight => ElectrodeId::Left,
            };
            let pairs: Vec<_> = boundary::electrode_grid(&mode, id, 5, 3)
                .into_iter()
                .map(|(u, z)| {
                    let a = boundary::surface_density_from_fields(&mode, id, &exc, u, z, t).unwrap();
                    let b = boundary::surface_density_from_flux(&mode, id, &flux, u, z, t).unwrap();
                    (a, b)
                })
                .collect();
            // sigma carries C/m^2, j carries A/m; compare each against its own scale
            let s_scale = pairs.iter().map(|(a, _)| a.sigma.abs()).fold(f64::MIN_POSITIVE, f64::max);
            let j_scale = pairs
                .iter()
                .map(|(a, _)| a.j[0].abs().max(a.j[1].abs()))
                .fold(f64::MIN_POSITIVE, f64::max);
            for (a, b) in &pairs {
                prop_assert!((a.sigma - b.sigma).abs() <= 1e-10 * s_scale);
                prop_assert!((a.j[0] - b.j[0]).abs() <= 1e-10 * j_scale);
                prop_assert!((a.j[1] - b.j[1]).abs() <= 1e-10 * j_scale);
            }
        }
    }

    #[test]
    fn boundary_conditions_hold((mode, seed) in mode_strategy()) {
        let mut r = rng(seed ^ 0xbc);
        let exc = Excitation::canonical(&mode, 1.0, draw_quadratures(&mut r));
        let res = boundary::boundary_condition_residual(&mode, &exc, 7, 3, draw_time(&mut r, &mode)).unwrap();
        prop_assert!(res.relative() < 1e-12);
    }

    #[test]
    fn frame_conversion_round_trip(class in prop::sample::select(vec![ModeClass::TmRect, ModeClass::TeRect]), seed in any::<u64>(), e in -5.0f64..5.0) {
        let mode = draw_mode(&mut rng(seed), class);
        let there = fields::convert_frame(&mode, e, ReferenceFrame::TopBottom, ReferenceFrame::LeftRight).unwrap();
        let back = fields::convert_frame(&mode, there, ReferenceFrame::LeftRight, ReferenceFrame::TopBottom).unwrap();
        prop_assert!((back - e).abs() <= 1e-14 * e.abs().max(1.0));
        let tb = quanta::quantize(&mode, ReferenceFrame::TopBottom).unwrap();
        let lr = quanta::quantize(&mode, ReferenceFrame::LeftRight).unwrap();
        prop_assert!(rel(tb.commutator_prefactor(mode.omega()), HBAR) < 1e-14);
        prop_assert!(rel(lr.commutator_prefactor(mode.omega()), HBAR) < 1e-14);
    }

    #[test]
    fn tm_zero_point_suppressed_at_low_beta(n in 1u32..4, m in 1u32..4, aspect in 0.5f64..3.0) {
        let d = 0.01;
        let g = Geometry::rectangular(aspect * d, d, 1.0).unwrap();
        let betas: Vec<f64> = (0..40).map(|i| 1e-3 * 1.4f64.powi(i)).collect();
        let s = quanta::zpf_ratio_sweep_beta(&g, Family::TmRect { n, m }, &betas).unwrap();
        for w in s.windows(2) {
            prop_assert!(w[1].1 > w[0].1);
        }
        // proportional to beta near zero
        prop_assert!(rel(s[1].1 / s[1].0, s[0].1 / s[0].0) < 1e-6);
    }

    #[test]
    fn photon_rest_energy(class in prop::sample::select(vec![ModeClass::TePlates, ModeClass::TeRotated, ModeClass::TeRect]), seed in any::<u64>()) {
        let mode = draw_mode(&mut rng(seed), class);
        let q = quanta::quantize(&mode, fields::canonical_frame(class)).unwrap();
        prop_assert!(rel(q.photon_mass * C * C, HBAR * C * mode.k_c()) < 1e-15);
        prop_assert!(q.dh_per_photon <= HBAR * C * mode.k_c());
    }

    #[test]
    fn scaling_leaves_invariants((mode, seed) in mode_strategy(), alpha in prop::num::f64::NORMAL.prop_filter("moderate", |a| a.abs() > 1e-3 && a.abs() < 1e3)) {
        let quad = draw_quadratures(&mut rng(seed));
        let rep = quanta::scaling_invariance_check(&mode, fields::canonical_frame(mode.class), &quad, alpha).unwrap();
        prop_assert!(rep.worst() < 1e-12);
    }

    #[test]
    fn ladder_identities(dim in 3usize..24, theta0 in -6.3f64..6.3) {
        let rep = quanta::ladder_algebra_check(dim, theta0).unwrap();
        prop_assert_eq!(rep.subspace, dim - 1);
        prop_assert!(rep.worst() < 1e-12 * dim as f64);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials(order in 1usize..20, coeffs in prop::collection::vec(-1.0f64..1.0, 40), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let deg = 2 * order - 1;
        let rule = AxisRule::gauss_legendre(a, b, order, 1);
        let p = |x: f64| coeffs[..=deg].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let exact: f64 = coeffs[..=deg]
            .iter()
            .enumerate()
            .map(|(i, c)| c * (b.powi(i as i32 + 1) - a.powi(i as i32 + 1)) / (i as f64 + 1.0))
            .sum();
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum::<f64>() * 2f64.powi(deg as i32 + 1);
        prop_assert!((rule.integrate(p) - exact).abs() <= 1e-13 * scale);
    }
}
