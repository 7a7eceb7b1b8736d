use carnot_core::cayley::{word_ball, word_norm, Group, ZGroupElement, DEFAULT_BUDGET_BYTES};
use carnot_core::heisenberg::{commutator, psi, psi_inv, HeisMatrix, HeisPoint};
use carnot_core::q_algebra::{composition_defect, q_add, q_inverse, tsallis_entropy, ProbDist, QParam};
use carnot_core::subriemannian::{
    cc_distance, chow_connect, dilate, holonomy, integrate_path, CcOptions, NormKind,
};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -5.0..5.0_f64
}

fn point() -> impl Strategy<Value = HeisPoint> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| HeisPoint::new(x, y, z))
}

fn dist() -> impl Strategy<Value = ProbDist> {
    prop::collection::vec(0.01..1.0_f64, 1..6)
        .prop_map(|w| ProbDist::renormalized(w).unwrap())
}

proptest! {
    #[test]
    fn q_add_is_a_commutative_group_law(x in -0.9..3.0_f64, y in -0.9..3.0_f64, z in -0.9..3.0_f64, q in 0.2..3.0_f64) {
        let q = QParam::new(q).unwrap();
        prop_assert!((q_add(x, y, q) - q_add(y, x, q)).abs() < 1e-12);
        let l = q_add(q_add(x, y, q), z, q);
        let r = q_add(x, q_add(y, z, q), q);
        prop_assert!((l - r).abs() < 1e-9 * l.abs().max(1.0));
        if let Some(inv) = q_inverse(x, q) {
            prop_assert!(q_add(x, inv, q).abs() < 1e-9 * inv.abs().max(1.0));
        }
    }

    #[test]
    fn entropy_composes_by_q_addition(p in dist(), r in dist(), q in 0.2..3.0_f64) {
        let q = QParam::new(q).unwrap();
        prop_assert!(composition_defect(&p, &r, q).unwrap() < 1e-10);
        prop_assert!(tsallis_entropy(&p, q).unwrap() >= -1e-15);
    }

    #[test]
    fn exponential_product_matches_matrix_product(g in point(), h in point()) {
        let via_matrix = psi_inv(&psi(&g).mul(&psi(&h)));
        prop_assert!(via_matrix.max_abs_diff(&g.exp_mul(&h)) < 1e-12);
        let e = g.exp_mul(&g.inverse());
        prop_assert!(e.max_abs_diff(&HeisPoint::ORIGIN) < 1e-12);
    }

    #[test]
    fn group_law_is_associative(g in point(), h in point(), k in point()) {
        let l = g.exp_mul(&h).exp_mul(&k);
        let r = g.exp_mul(&h.exp_mul(&k));
        prop_assert!(l.max_abs_diff(&r) < 1e-12);
    }

    #[test]
    fn commutators_are_central(a in coord(), b in coord(), c in coord(), d in coord()) {
        let g = HeisMatrix::new(a, b, 0.5);
        let h = HeisMatrix::new(c, d, -1.5);
        let k = commutator(&g, &h);
        prop_assert!(k.a.abs() < 1e-12 && k.c.abs() < 1e-12);
        prop_assert!((k.b - (a * d - b * c)).abs() < 1e-12);
    }

    #[test]
    fn dilations_are_automorphisms(g in point(), h in point(), t in 0.1..10.0_f64) {
        let l = dilate(&g.exp_mul(&h), t).unwrap();
        let r = dilate(&g, t).unwrap().exp_mul(&dilate(&h, t).unwrap());
        prop_assert!(l.max_abs_diff(&r) < 1e-10 * t * t * 50.0);
    }

    #[test]
    fn polygon_holonomy_is_shoelace_area(pts in prop::collection::vec((coord(), coord()), 3..9)) {
        let mut loop_pts: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        loop_pts.push(loop_pts[0]);
        let area: f64 = loop_pts.windows(2).map(|w| (w[0][0] * w[1][1] - w[1][0] * w[0][1]) / 2.0).sum();
        prop_assert!((holonomy(&loop_pts).unwrap() - area).abs() < 1e-9);
    }

    #[test]
    fn chow_path_reaches_target(a in point(), b in point()) {
        let path = chow_connect(&a, &b);
        prop_assert!(integrate_path(&path).max_abs_diff(&b) < 1e-9);
        prop_assert!(path.max_contact_violation(3) < 1e-9);
    }
}

#[test]
fn distance_sandwich_on_vertical_points() {
    let opts = CcOptions::default();
    for z in [0.25, 1.0, -2.0, 9.0] {
        let d = cc_distance(&HeisPoint::ORIGIN, &HeisPoint::new(0.0, 0.0, z), &opts).unwrap();
        let lo = (4.0 * std::f64::consts::PI * z.abs()).sqrt();
        assert!(lo <= d.value + 1e-12, "{z}: {d:?}");
        assert!(d.value <= 4.0 * z.abs().sqrt() + 1e-12, "{z}: {d:?}");
        assert!((d.value - lo) / lo < 1e-3, "{z}: {}", d.value);
    }
}

#[test]
fn norm_equivalence_on_a_fixed_pair() {
    let a = HeisPoint::new(0.3, -0.5, 0.7);
    let b = HeisPoint::new(-0.4, 0.9, -0.2);
    let base = CcOptions::default();
    let l2 = cc_distance(&a, &b, &base).unwrap().value;
    let l1 = cc_distance(&a, &b, &CcOptions { norm: NormKind::L1, ..base }).unwrap().value;
    let linf = cc_distance(&a, &b, &CcOptions { norm: NormKind::Linf, ..base }).unwrap().value;
    let r1 = l1 / l2;
    assert!(r1 >= 1.0 - 1e-6 && r1 <= std::f64::consts::SQRT_2 + 1e-6, "{r1}");
    let rinf = linf / l2;
    assert!(rinf >= std::f64::consts::FRAC_1_SQRT_2 - 1e-6 && rinf <= 1.0 + 1e-6, "{rinf}");
}

#[test]
fn word_norm_agrees_with_ball_membership() {
    let gens = Group::HeisZ.standard_generators();
    let table = word_ball(&gens, 5, DEFAULT_BUDGET_BYTES).unwrap();
    let mut by_norm = vec![0u64; 6];
    for a in -5..=5 {
        for c in -5..=5 {
            for b in -8..=8 {
                if let Some(n) = word_norm(&ZGroupElement::new(a, c, b), &gens, 5).unwrap() {
                    by_norm[n as usize] += 1;
                }
            }
        }
    }
    let cumulative: Vec<u64> = by_norm
        .iter()
        .scan(0, |s, n| {
            *s += n;
            Some(*s)
        })
        .collect();
    assert_eq!(cumulative, table.counts);
}
