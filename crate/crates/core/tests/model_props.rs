use num_complex::Complex64;
use proptest::prelude::*;
use ptgup::model::*;

fn unbroken_or_broken() -> impl Strategy<Value = ModelParams> {
    (0.3f64..3.0, 0.2f64..2.0, 0.2f64..2.0, 0.0f64..1.0, prop::bool::ANY).prop_filter_map(
        "away from the exceptional point",
        |(m, wx, dw, frac, broken)| {
            let wy = wx + dw;
            let lc = m * (wy * wy - wx * wx) / 2.0;
            let lambda = if broken { lc * (1.05 + 2.0 * frac) } else { lc * 0.95 * frac };
            ModelParams::new(m, wx, wy, lambda, 0.0).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rotation_is_complex_orthogonal(p in unbroken_or_broken()) {
        let d = derive_modes(&p).unwrap();
        let r = d.rotation().unwrap();
        prop_assert!(r.exact);
        prop_assert!(r.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn rotation_diagonalizes_potential(p in unbroken_or_broken()) {
        let d = derive_modes(&p).unwrap();
        let nm = d.normal_modes().unwrap();
        let k = d.rotation().unwrap().congruence(potential_matrix(&p));
        let scale = p.omega_plus_sq();
        prop_assert!(k[0][1].norm() < 1e-12 * scale);
        prop_assert!(k[1][0].norm() < 1e-12 * scale);
        prop_assert!((k[0][0] - nm.c1 * nm.c1).norm() < 1e-12 * scale);
        prop_assert!((k[1][1] - nm.c2 * nm.c2).norm() < 1e-12 * scale);
    }

    #[test]
    fn frequency_sum_rules(p in unbroken_or_broken()) {
        let d = derive_modes(&p).unwrap();
        let (c1, c2) = (d.c1().unwrap(), d.c2().unwrap());
        let k_inv = d.k_inv.unwrap();
        let tol = 1e-12 * p.omega_plus_sq();
        prop_assert!((c1 * c1 + c2 * c2 - p.omega_plus_sq()).norm() < tol);
        prop_assert!((c2 * c2 - c1 * c1 - k_inv * p.omega_minus_sq()).norm() < tol);
        // (c1 c2)² = ωx²ωy² + λ²/m²: determinant of the potential matrix.
        let det = Complex64::new(p.omega_x.powi(2) * p.omega_y.powi(2), 0.0)
            + (p.lambda / p.mass).powi(2);
        prop_assert!(((c1 * c2).powi(2) - det).norm() < 1e-11 * det.norm());
        prop_assert!((d.alpha1_sq().unwrap() - c1 * p.mass).norm() < 1e-15 * c1.norm() * p.mass);
    }

    #[test]
    fn spectrum_reality_tracks_phase(p in unbroken_or_broken(), n1 in 0usize..6, n2 in 0usize..6) {
        let d = derive_modes(&p).unwrap();
        let e = energy(&d, StateIndex::new(n1, n2)).unwrap();
        match d.phase {
            PhaseClass::Unbroken => prop_assert_eq!(e.im, 0.0),
            PhaseClass::Broken => {
                let swapped = energy(&d, StateIndex::new(n2, n1)).unwrap();
                prop_assert!((swapped - e.conj()).norm() < 1e-12 * e.norm());
                if n1 != n2 {
                    prop_assert!(e.im.abs() > 0.0);
                }
            }
            other => prop_assert!(false, "unexpected phase {other:?}"),
        }
    }

    #[test]
    fn phase_boundary(m in 0.3f64..3.0, wx in 0.2f64..2.0, dw in 0.2f64..2.0, eps in 1e-6f64..0.5) {
        let wy = wx + dw;
        let lc = m * (wy * wy - wx * wx) / 2.0;
        let at = |l: f64| classify_phase(&ModelParams::new(m, wx, wy, l, 0.0).unwrap());
        prop_assert_eq!(at(lc * (1.0 - eps)), PhaseClass::Unbroken);
        prop_assert_eq!(at(lc * (1.0 + eps)), PhaseClass::Broken);
        prop_assert_eq!(at(-lc * (1.0 + eps)), PhaseClass::Broken);
        prop_assert_eq!(at(lc), PhaseClass::Critical);
    }
}

#[test]
fn isotropic_classes() {
    let p = ModelParams::new(1.0, 1.5, 1.5, 0.0, 0.0).unwrap();
    assert_eq!(classify_phase(&p), PhaseClass::DecoupledIsotropic);
    let d = derive_modes(&p.with_lambda(0.3)).unwrap();
    assert_eq!(d.phase, PhaseClass::IsotropicBroken);
    assert_eq!(d.normal_modes(), Err(ModelError::ModesUnavailable));
}

#[test]
fn critical_point_convention() {
    let p = ModelParams::new(1.0, 1.0, 2.0, 1.5, 0.0).unwrap();
    let d = derive_modes(&p).unwrap();
    assert_eq!(d.phase, PhaseClass::Critical);
    let c = (2.5f64).sqrt();
    assert!((d.c1().unwrap() - c).norm() < 1e-15);
    assert!((d.c2().unwrap() - c).norm() < 1e-15);
    assert!(!d.rotation().unwrap().exact);
}
