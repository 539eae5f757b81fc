use proptest::prelude::*;

use nispdg::exec::Execution;
use nispdg::gpc::{build_quadrature, Family};
use nispdg::mesh_dg::{l2_error, l2_project, radau_project, Mesh1D, PiecewisePoly};

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::UniformLegendre), Just(Family::GaussianHermite)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn projection_reproduces_polynomials(
        x_min in -3.0..3.0f64,
        len in 0.5..5.0f64,
        cells in 1usize..12,
        p in 0usize..4,
        coeffs in prop::collection::vec(-2.0..2.0f64, 4),
    ) {
        let mesh = Mesh1D::new(x_min, x_min + len, cells).unwrap();
        let c = &coeffs[..=p];
        let f = l2_project(|x, o| o[0] = poly(c, x), mesh, p, 1);
        let err = l2_error(&f, |x, o| o[0] = poly(c, x), p + 3);
        prop_assert!(err < 1e-11, "err = {err}");
    }

    #[test]
    fn downwind_projection_keeps_low_moments_and_hits_the_end(
        cells in 1usize..10,
        p in 1usize..4,
        k in 1.0..3.0f64,
        phase in 0.0..6.0f64,
        flips in prop::collection::vec(any::<bool>(), 10),
    ) {
        let mesh = Mesh1D::new(0.0, 2.0, cells).unwrap();
        let g = |x: f64, o: &mut [f64]| o[0] = (k * x + phase).sin();
        let l2 = l2_project(g, mesh, p, 1);
        let r = radau_project(g, mesh, p, 1, |j, _| flips[j]);
        let mut v = [0.0];
        for j in 0..cells {
            for d in 0..p {
                prop_assert!((l2.cell(j)[d] - r.cell(j)[d]).abs() < 1e-14);
            }
            let xi = if flips[j] { 1.0 } else { -1.0 };
            r.eval_local(j, xi, &mut v);
            let mut want = [0.0];
            g(mesh.x_of(j, xi), &mut want);
            prop_assert!((v[0] - want[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_integrates_moments_up_to_its_exactness(family in family(), order in 0usize..12) {
        let q = build_quadrature(family, order);
        prop_assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        for k in 0..=q.exactness() as u32 {
            let exact = family.moment(k);
            // Odd moments vanish by cancellation; scale by the next even one.
            let scale = family.moment(k + k % 2);
            let got = q.integrate(|y| y.powi(k as i32));
            prop_assert!((got - exact).abs() <= 1e-12 * scale, "k = {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn execution_policy_does_not_change_results(n in 0usize..300, s in -10.0..10.0f64) {
        let f = |i: usize| (i as f64 * s).sin();
        prop_assert_eq!(Execution::Parallel.map(n, f), Execution::Sequential.map(n, f));
    }
}
