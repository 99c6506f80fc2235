use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use nctorus::config::Tolerances;
use nctorus::dirac::{deformed_block, DiracCoefficients};
use nctorus::dynamics::{golden_alpha, DiffeoSpec};
use nctorus::fourier::{hat_vector, paren_vector};
use nctorus::gns::{GnsSpace, GnsVector, TruncationBox};
use nctorus::modular::{apply_j_unchecked, tomita_check};
use nctorus::summation::{SummationKernel, TransferencePoint};
use nctorus::weyl::{involution, star_product, trace, WeylElement};

fn small_space() -> &'static GnsSpace {
    static S: OnceLock<GnsSpace> = OnceLock::new();
    S.get_or_init(|| GnsSpace::new(DiffeoSpec::benchmark(), TruncationBox::new(4, 12, 128).unwrap()).unwrap())
}

fn rotation_space() -> &'static GnsSpace {
    static S: OnceLock<GnsSpace> = OnceLock::new();
    S.get_or_init(|| GnsSpace::new(DiffeoSpec::rotation(golden_alpha()).unwrap(), TruncationBox::new(4, 8, 128).unwrap()).unwrap())
}

fn coeff() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn element(alpha: f64, radius: i64) -> impl Strategy<Value = WeylElement> {
    prop::collection::vec(((-radius..=radius, -radius..=radius), coeff()), 1..6)
        .prop_map(move |terms| WeylElement::from_terms(alpha, terms))
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(0.25), Just(golden_alpha()), 0.0..0.5f64]
}

fn vector(tbox: TruncationBox) -> impl Strategy<Value = GnsVector> {
    prop::collection::vec(coeff(), tbox.dim()).prop_map(move |c| GnsVector::from_coeffs(tbox, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_is_associative((f, g, h) in alpha().prop_flat_map(|a| (element(a, 2), element(a, 2), element(a, 2)))) {
        let left = star_product(&star_product(&f, &g).unwrap(), &h).unwrap();
        let right = star_product(&f, &star_product(&g, &h).unwrap()).unwrap();
        prop_assert!(left.max_deviation(&right) < 1e-12);
    }

    #[test]
    fn involution_reverses_products(f in element(golden_alpha(), 3), g in element(golden_alpha(), 3)) {
        let lhs = involution(&star_product(&f, &g).unwrap());
        let rhs = star_product(&involution(&g), &involution(&f)).unwrap();
        prop_assert!(lhs.max_deviation(&rhs) < 1e-12);
        prop_assert!(involution(&involution(&f)).max_deviation(&f) == 0.0);
    }

    #[test]
    fn trace_is_positive_and_tracial(a in alpha(), f in element(0.0, 3), g in element(0.0, 3)) {
        let f = WeylElement::from_terms(a, f.terms());
        let g = WeylElement::from_terms(a, g.terms());
        let ff = trace(&star_product(&involution(&f), &f).unwrap());
        prop_assert!((ff.re - f.l2_norm_sqr()).abs() < 1e-12 && ff.im.abs() < 1e-12);
        let d = trace(&star_product(&f, &g).unwrap()) - trace(&star_product(&g, &f).unwrap());
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn weyl_generators_commute_up_to_phase(a in alpha(), p in (-6i64..=6, -6i64..=6), q in (-6i64..=6, -6i64..=6)) {
        let wp = WeylElement::generator(a, p);
        let wq = WeylElement::generator(a, q);
        let pq = star_product(&wp, &wq).unwrap();
        let qp = star_product(&wq, &wp).unwrap();
        let sigma = (p.0 * q.1 - q.0 * p.1) as f64;
        let site = (p.0 + q.0, p.1 + q.1);
        let ratio = pq.get(site) / qp.get(site);
        prop_assert!((ratio - C64::from_polar(1.0, 4.0 * PI * a * sigma)).norm() < 1e-12);
    }

    #[test]
    fn cocycle_holds_pointwise(m in -6i64..=6, n in -6i64..=6, x in 0.0..1.0f64) {
        let d = DiffeoSpec::benchmark();
        let lhs = d.iterate_derivative(m + n, x).unwrap();
        let rhs = d.iterate_derivative(m, d.iterate_point(n, x).unwrap()).unwrap() * d.iterate_derivative(n, x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
        // the lift commutes with integer translation
        let shifted = d.iterate_point(n, x + 1.0).unwrap() - 1.0;
        prop_assert!((shifted - d.iterate_point(n, x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hat_is_isometric(x in vector(TruncationBox::new(3, 4, 64).unwrap())) {
        prop_assert!((hat_vector(&x).l2_norm() - x.norm()).abs() < 1e-12);
    }

    #[test]
    fn j_is_an_antiunitary_involution_on_rotations(x in vector(rotation_space().tbox()), y in vector(rotation_space().tbox())) {
        let s = rotation_space();
        let (jx, _) = apply_j_unchecked(&x, s).unwrap();
        let (jy, _) = apply_j_unchecked(&y, s).unwrap();
        let (jjx, _) = apply_j_unchecked(&jx, s).unwrap();
        prop_assert!(jjx.distance(&x) < 1e-12);
        // ⟨Jx, Jy⟩ = ⟨y, x⟩
        prop_assert!((jx.inner(&jy) - y.inner(&x)).norm() < 1e-10);
        let p = paren_vector(&x, s).unwrap();
        prop_assert!((p.l2_norm() - x.norm()).abs() < 1e-10);
    }

    #[test]
    fn tomita_holds_for_low_modes(f in element(golden_alpha(), 1)) {
        prop_assert!(tomita_check(&f, small_space()).unwrap() < 1e-9);
    }

    #[test]
    fn kernel_coefficients_are_contractive(n in 0usize..50, r in 0.0..0.999f64, l in -80i64..=80) {
        for k in [SummationKernel::Fejer(n), SummationKernel::Poisson(r), SummationKernel::Dirichlet(n)] {
            let c = k.coefficient(l);
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert_eq!(k.coefficient(0), 1.0);
            prop_assert_eq!(c, k.coefficient(-l));
        }
        prop_assert!(SummationKernel::Fejer(n).eval(l as f64 * 0.1) >= 0.0);
    }

    #[test]
    fn characters_are_multiplicative(p1 in -PI..PI, p2 in -PI..PI, k in -5i64..=5, l in -5i64..=5, k2 in -5i64..=5, l2 in -5i64..=5) {
        let w = TransferencePoint::from_angles(p1, p2);
        let lhs = w.character(k + k2, l + l2);
        prop_assert!((lhs - w.character(k, l) * w.character(k2, l2)).norm() < 1e-12);
        prop_assert!((w.character(k, l).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tolerance_scaling_is_linear(factor in 1e-3..1e3f64) {
        let t = Tolerances::default();
        let s = t.scaled(factor);
        for (name, v) in t.entries() {
            prop_assert!((s.get(name) - v * factor).abs() <= 1e-15 * v.max(1.0) * factor);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn deformed_blocks_are_self_adjoint(n in -4i64..=4, eta in 0.0..=1.0f64) {
        let s = small_space();
        let coeffs = DiracCoefficients::for_space(s).unwrap();
        let b = deformed_block(n, eta, &coeffs, s).unwrap();
        prop_assert!(b.self_adjointness_deviation() < 1e-9);
        let sv = b.singular_values();
        prop_assert!(sv.windows(2).all(|w| w[0] <= w[1]));
    }
}
