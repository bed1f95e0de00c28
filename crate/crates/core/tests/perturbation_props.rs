use num_complex::Complex64;
use proptest::prelude::*;
use ptgup::model::*;
use ptgup::perturbation::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.5f64..2.0, 0.5f64..1.5, 0.3f64..1.5, 0.0f64..2.5, 1e-4f64..0.05).prop_filter_map(
        "off the exceptional point",
        |(m, wx, dw, frac, beta)| {
            let wy = wx + dw;
            let lc = m * (wy * wy - wx * wx) / 2.0;
            let lambda = lc * frac;
            ((frac - 1.0).abs() > 0.02).then(|| ModelParams::new(m, wx, wy, lambda, beta).ok())?
        },
    )
}

fn unbroken() -> impl Strategy<Value = ModelParams> {
    params().prop_filter("unbroken", |p| classify_phase(p) == PhaseClass::Unbroken)
}

fn state(max: usize) -> impl Strategy<Value = StateIndex> {
    (0..=max, 0..=max).prop_map(|(a, b)| StateIndex::new(a, b))
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn elements_vanish_off_the_selection_set(p in params(), bra in state(10), ket in state(10)) {
        let d = derive_modes(&p).unwrap();
        let v = h_int_matrix_element(&d, bra, ket, &p).unwrap();
        let d1 = bra.n1 as i64 - ket.n1 as i64;
        let d2 = bra.n2 as i64 - ket.n2 as i64;
        let allowed = SELECTION_OFFSETS.contains(&(d1, d2));
        prop_assert_eq!(allowed, selection_allowed(bra, ket));
        if !allowed {
            prop_assert_eq!(v, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn elements_are_symmetric(p in params(), bra in state(8), ket in state(8)) {
        let d = derive_modes(&p).unwrap();
        let a = h_int_matrix_element(&d, bra, ket, &p).unwrap();
        let b = h_int_matrix_element(&d, ket, bra, &p).unwrap();
        prop_assert!(close(a, b, 1e-12) || (a.norm() < 1e-300 && b.norm() < 1e-300));
    }

    #[test]
    fn closed_form_equals_ladder_diagonal(p in params(), s in state(8)) {
        let d = derive_modes(&p).unwrap();
        let closed = delta_energy(&d, s, &p).unwrap();
        let ladder = h_int_matrix_element(&d, s, s, &p).unwrap();
        prop_assert!(close(closed, ladder, 1e-12), "{closed} vs {ladder}");
    }

    #[test]
    fn correction_has_at_most_twelve_terms(p in params(), s in state(10)) {
        let d = derive_modes(&p).unwrap();
        if let Ok(r) = wavefunction_correction(&d, s, &p) {
            prop_assert!(r.m_coefficients.len() <= 12);
            prop_assert!(!r.m_coefficients.contains_key(&s));
            for m in r.m_coefficients.keys() {
                prop_assert!(selection_allowed(*m, s));
            }
            prop_assert_eq!(r.m_coefficients.len(), coupled_states(s).len());
        }
    }

    #[test]
    fn correction_is_linear_in_beta(p in unbroken(), s in state(4), scale in 0.1f64..10.0) {
        let d = derive_modes(&p).unwrap();
        let q = p.with_beta(p.beta * scale);
        let a = delta_energy(&d, s, &p).unwrap();
        let b = delta_energy(&d, s, &q).unwrap();
        prop_assert!(close(a * scale, b, 1e-13));
    }

    #[test]
    fn corrections_keep_pt_eigenvalue(p in unbroken(), s in state(3)) {
        let d = derive_modes(&p).unwrap();
        let grid = SampleGrid::symmetric(2.5, 13);
        let bare = Wavefunction::new(&d, s, &p, false).unwrap().sample(&grid);
        let full = Wavefunction::new(&d, s, &p, true).unwrap().sample(&grid);
        for axis in [ParityAxis::X, ParityAxis::Y] {
            let a = pt_eigenvalue(&grid, &bare, axis).unwrap();
            let b = pt_eigenvalue(&grid, &full, axis).unwrap();
            prop_assert!(a.deviation < 1e-10 && b.deviation < 1e-10);
            prop_assert!((a.value - b.value).norm() < 1e-10);
        }
        prop_assert!(wavefunction_correction(&d, s, &p).unwrap().pt_preserved);
    }
}

#[test]
fn broken_phase_reality_structure() {
    let p = ModelParams::new(1.0, 1.0, 2.0, 2.0, 0.01).unwrap();
    let d = derive_modes(&p).unwrap();
    for n1 in 0..=4 {
        for n2 in 0..=4 {
            let a = delta_energy(&d, StateIndex::new(n1, n2), &p).unwrap();
            let b = delta_energy(&d, StateIndex::new(n2, n1), &p).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm(), "({n1},{n2})");
            if n1 == n2 {
                assert!(a.im.abs() < 1e-12 * a.norm());
            }
        }
    }
}

#[test]
fn special_cases_from_general_formula() {
    let r = |n: i64, d: i64| num_rational::Rational64::new(n, d);
    let cases = [
        ((0, 0), [r(3, 2), r(3, 2), r(1, 1)]),
        ((0, 1), [r(3, 2), r(15, 2), r(3, 1)]),
        ((1, 0), [r(15, 2), r(3, 2), r(3, 1)]),
        ((1, 1), [r(15, 2), r(15, 2), r(9, 1)]),
    ];
    for ((n1, n2), want) in cases {
        assert_eq!(delta_energy_coefficients(StateIndex::new(n1, n2)), want);
    }
    // and the floating-point path agrees with them
    let p = ModelParams::new(1.0, 1.0, 2.0, 0.0, 2.0).unwrap();
    let d = derive_modes(&p).unwrap();
    for ((n1, n2), c) in cases {
        let f = |q: num_rational::Rational64| *q.numer() as f64 / *q.denom() as f64;
        let want = f(c[0]) + f(c[1]) * 4.0 + f(c[2]) * 2.0;
        let got = delta_energy(&d, StateIndex::new(n1, n2), &p).unwrap();
        assert!((got.re - want).abs() < 1e-12 && got.im == 0.0);
    }
}
