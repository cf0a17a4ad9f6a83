use proptest::prelude::*;

use plaquette_core::cubical::{build_box, build_torus, Boundary, Chain, Complex};
use plaquette_core::duality::{dual_beta, dual_p, duality_product, log_duality_constant};
use plaquette_core::field::PrimeField;
use plaquette_core::homology::{alexander_check, betti, eta_offset_constant, is_null_homologous, Subcomplex};
use plaquette_core::pltg::{bond_probability, gauge_transform, hamiltonian, wilson_phase};
use plaquette_core::rcm::{conditional_open_probability, weight, PlaquetteConfig, RcmParams};

fn f(q: u64) -> PrimeField {
    PrimeField::new(q).unwrap()
}

fn mask(bits: &[bool], n: usize) -> Vec<bool> {
    (0..n).map(|k| bits[k % bits.len()]).collect()
}

fn small_torus() -> impl Strategy<Value = (usize, usize, usize)> {
    prop_oneof![Just((2, 3, 1)), Just((2, 4, 1)), Just((3, 2, 1)), Just((3, 2, 2)), Just((4, 2, 2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_of_boundary_vanishes(
        (d, n, _) in small_torus(),
        k in 2usize..=3,
        coeffs in prop::collection::vec(0u32..5, 1..40),
        q in prop_oneof![Just(2u64), Just(3), Just(5)],
    ) {
        let t = build_torus(d, n, d).unwrap();
        prop_assume!(k <= d);
        let terms: Vec<(usize, u32)> =
            coeffs.iter().enumerate().map(|(j, &c)| ((j * 7) % t.num_cells(k), c % q as u32)).collect();
        let c = Chain::new(k, f(q), terms);
        prop_assert!(c.boundary(&t).boundary(&t).is_zero());
    }

    #[test]
    fn dualization_is_an_involution((d, n, i) in small_torus(), bits in prop::collection::vec(any::<bool>(), 1..64)) {
        let t = build_torus(d, n, d).unwrap();
        let open = mask(&bits, t.num_cells(i));
        let dual = t.dual_complex(i, &open).unwrap();
        prop_assert_eq!(dual.iter().filter(|&&b| b).count(), open.iter().filter(|&&b| !b).count());
        prop_assert_eq!(t.dual_complex(d - i, &dual).unwrap(), open);
    }

    #[test]
    fn alexander_duality_and_offset(
        (d, n, i) in small_torus(),
        bits in prop::collection::vec(any::<bool>(), 1..64),
        q in prop_oneof![Just(2u64), Just(3)],
    ) {
        let t = build_torus(d, n, d).unwrap();
        let open = mask(&bits, t.num_cells(i));
        let r = alexander_check(&t, i, &open, f(q)).unwrap();
        prop_assert!(r.eq1 && r.eq2 && r.eq3);
        prop_assert_eq!(r.offset, eta_offset_constant(&t, i, f(q)).unwrap());
    }

    #[test]
    fn balanced_weights_dualize_termwise(
        (d, n, i) in small_torus(),
        bits in prop::collection::vec(any::<bool>(), 1..64),
        p in 0.05f64..0.95,
        q in prop_oneof![Just(2u64), Just(3)],
    ) {
        let t = build_torus(d, n, d).unwrap();
        let open = mask(&bits, t.num_cells(i));
        let dual = t.dual_complex(i, &open).unwrap();
        let qf = q as f64;
        let primal = RcmParams::new(p, qf, i).unwrap().with_field(f(q)).with_balanced(true);
        let other = RcmParams::new(dual_p(p, qf), qf, d - i).unwrap().with_field(f(q)).with_balanced(true);
        let w = weight(&t, &primal, &PlaquetteConfig::from_open(&t, i, open).unwrap()).unwrap();
        let wd = weight(&t, &other, &PlaquetteConfig::from_open(&t, d - i, dual).unwrap()).unwrap();
        let k = log_duality_constant(&t, i, p, qf, f(q)).unwrap();
        prop_assert!((wd - w - k).abs() < 1e-9, "{} vs {}", wd - w, k);
    }

    #[test]
    fn parameter_duality(p in 0.001f64..0.999, q in 1.0f64..10.0, beta in 0.01f64..5.0) {
        let ps = dual_p(p, q);
        prop_assert!((dual_p(ps, q) - p).abs() < 1e-10);
        prop_assert!((duality_product(p, ps) - q).abs() < 1e-8 * q);
        prop_assert!((bond_probability(dual_beta(beta, q)) - dual_p(bond_probability(beta), q)).abs() < 1e-10);
    }

    #[test]
    fn boundaries_of_open_plaquettes_are_null_homologous(
        bits in prop::collection::vec(any::<bool>(), 1..64),
        pick in prop::collection::vec(any::<bool>(), 1..64),
        q in prop_oneof![Just(2u64), Just(3)],
    ) {
        let b = build_box(3, 2, 3, Boundary::Free).unwrap();
        let m = b.num_cells(2);
        let open = mask(&bits, m);
        let chosen: Vec<(usize, u32)> =
            (0..m).filter(|&s| open[s] && pick[s % pick.len()]).map(|s| (s, 1 + (s as u32 % (q as u32 - 1).max(1)))).collect();
        let gamma = Chain::new(2, f(q), chosen).boundary(&b);
        let sub = Subcomplex::plaquettes(&b, 2, &open).unwrap();
        prop_assert!(is_null_homologous(&gamma, &sub, f(q)).unwrap());
    }

    #[test]
    fn conditional_open_probability_is_p_or_p_hat(
        bits in prop::collection::vec(any::<bool>(), 1..64),
        cell in 0usize..1000,
        p in 0.05f64..0.95,
        q in 1.0f64..6.0,
    ) {
        let t = build_torus(2, 3, 2).unwrap();
        let params = RcmParams::new(p, q, 1).unwrap();
        let m = t.num_cells(1);
        let mut open = mask(&bits, m);
        let e = cell % m;
        let cfg = |o: &[bool]| PlaquetteConfig::from_open(&t, 1, o.to_vec()).unwrap();
        let c = conditional_open_probability(&t, &params, &cfg(&open), e).unwrap();
        prop_assert!((c - p).abs() < 1e-12 || (c - params.p_hat()).abs() < 1e-12);
        // The kill test does not look at the cell's own state.
        open[e] = !open[e];
        prop_assert_eq!(conditional_open_probability(&t, &params, &cfg(&open), e).unwrap(), c);
        // It opens with p exactly when its endpoints are already joined without it.
        open[e] = false;
        let sub = Subcomplex::plaquettes(&t, 1, &open).unwrap();
        let b0 = betti(&sub, 0, params.field);
        open[e] = true;
        let joined = betti(&Subcomplex::plaquettes(&t, 1, &open).unwrap(), 0, params.field) == b0;
        prop_assert_eq!((c - p).abs() < 1e-12, joined);
    }

    #[test]
    fn gauge_invariance(
        spins in prop::collection::vec(0u32..3, 1..200),
        gauge in prop::collection::vec(0u32..3, 1..200),
        (d, n, i) in prop_oneof![Just((3usize, 2usize, 2usize)), Just((4, 2, 2)), Just((3, 3, 3))],
    ) {
        let t: Complex = build_torus(d, n, d).unwrap();
        let field = f(3);
        let fs: Vec<u32> = (0..t.num_cells(i - 1)).map(|k| spins[k % spins.len()]).collect();
        let g: Vec<u32> = (0..t.num_cells(i - 2)).map(|k| gauge[k % gauge.len()]).collect();
        let h = gauge_transform(&t, i, field, &fs, &g);
        prop_assert_eq!(hamiltonian(&t, i, field, &fs).unwrap(), hamiltonian(&t, i, field, &h).unwrap());
        // Wilson phases of cycles are gauge invariant.
        let gamma = Chain::new(i, field, vec![(0, 1), (t.num_cells(i) / 2, 2)]).boundary(&t);
        prop_assert_eq!(wilson_phase(&gamma, &fs), wilson_phase(&gamma, &h));
    }
}
