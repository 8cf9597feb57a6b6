//! Randomized properties of the norm triples: norm axioms, duality pairing,
//! steepest-direction optimality, and the norm-equivalence cap.

use normtr::geometry::{orth, singular_values, NormGeometry, NormKind, OrthConfig};
use normtr::point::{axpby, euclid_norm, inner, ParamPoint, Shape};
use proptest::prelude::*;

const EPS: f64 = 1e-9;

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn geometries() -> impl Strategy<Value = (NormKind, Shape)> {
    prop_oneof![
        Just((NormKind::Euclidean, Shape::Vector(5))),
        Just((NormKind::Infinity, Shape::Vector(5))),
        Just((NormKind::Spectral, Shape::Matrix(3, 2))),
        Just((NormKind::Spectral, Shape::Matrix(2, 3))),
    ]
}

fn scale(x: &ParamPoint, c: f64) -> ParamPoint {
    axpby(c, x, 0.0, x).unwrap()
}

type NormFn = fn(&NormGeometry, &ParamPoint) -> normtr::Result<f64>;

const BOTH_NORMS: [NormFn; 2] = [NormGeometry::primal_norm, NormGeometry::dual_norm];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norms_are_absolutely_homogeneous(
        (kind, shape) in geometries(),
        raw in coords(6),
        c in -4.0f64..4.0,
    ) {
        let geo = NormGeometry::new(kind, shape).unwrap();
        let x = ParamPoint::new(shape, raw[..shape.len()].to_vec()).unwrap();
        for norm in BOTH_NORMS {
            let lhs = norm(&geo, &scale(&x, c)).unwrap();
            let rhs = c.abs() * norm(&geo, &x).unwrap();
            prop_assert!((lhs - rhs).abs() <= EPS * (1.0 + rhs));
        }
    }

    #[test]
    fn norms_satisfy_the_triangle_inequality(
        (kind, shape) in geometries(),
        raw_a in coords(6),
        raw_b in coords(6),
    ) {
        let geo = NormGeometry::new(kind, shape).unwrap();
        let a = ParamPoint::new(shape, raw_a[..shape.len()].to_vec()).unwrap();
        let b = ParamPoint::new(shape, raw_b[..shape.len()].to_vec()).unwrap();
        let sum = axpby(1.0, &a, 1.0, &b).unwrap();
        for norm in BOTH_NORMS {
            let lhs = norm(&geo, &sum).unwrap();
            let rhs = norm(&geo, &a).unwrap() + norm(&geo, &b).unwrap();
            prop_assert!(lhs <= rhs + EPS * (1.0 + rhs));
        }
    }

    #[test]
    fn norms_vanish_only_at_zero((kind, shape) in geometries(), raw in coords(6)) {
        let geo = NormGeometry::new(kind, shape).unwrap();
        let x = ParamPoint::new(shape, raw[..shape.len()].to_vec()).unwrap();
        let nonzero = x.data().iter().any(|v| *v != 0.0);
        for norm in BOTH_NORMS {
            let n = norm(&geo, &x).unwrap();
            prop_assert!(n >= 0.0);
            prop_assert_eq!(n > 0.0, nonzero);
        }
    }

    #[test]
    fn pairing_is_bounded_by_primal_times_dual(
        (kind, shape) in geometries(),
        raw_x in coords(6),
        raw_y in coords(6),
    ) {
        let geo = NormGeometry::new(kind, shape).unwrap();
        let x = ParamPoint::new(shape, raw_x[..shape.len()].to_vec()).unwrap();
        let y = ParamPoint::new(shape, raw_y[..shape.len()].to_vec()).unwrap();
        let lhs = inner(&x, &y).unwrap().abs();
        let rhs = geo.primal_norm(&x).unwrap() * geo.dual_norm(&y).unwrap();
        prop_assert!(lhs <= rhs + EPS * (1.0 + rhs));
    }

    #[test]
    fn steepest_direction_is_feasible_and_attains_the_dual_norm(
        (kind, shape) in geometries(),
        raw in coords(6),
    ) {
        let geo = NormGeometry::new(kind, shape).unwrap();
        let m = ParamPoint::new(shape, raw[..shape.len()].to_vec()).unwrap();
        let dir = geo.lmo(&m, &OrthConfig::default()).unwrap();
        let norm = geo.primal_norm(&dir).unwrap();
        prop_assert!(norm <= 1.0 + EPS);
        let attained = inner(&m, &dir).unwrap();
        let dual = geo.dual_norm(&m).unwrap();
        prop_assert!((attained - dual).abs() <= EPS * (1.0 + dual));
    }

    #[test]
    fn dual_norm_never_exceeds_rho_times_euclidean(
        (kind, shape) in geometries(),
        raw in coords(6),
    ) {
        let geo = NormGeometry::new(kind, shape).unwrap();
        let x = ParamPoint::new(shape, raw[..shape.len()].to_vec()).unwrap();
        let lhs = geo.dual_norm(&x).unwrap();
        let rhs = geo.rho() * euclid_norm(&x);
        prop_assert!(lhs <= rhs + EPS * (1.0 + rhs));
    }

    #[test]
    fn orth_outputs_only_unit_or_null_singular_values(raw in coords(6)) {
        let g = ParamPoint::new(Shape::Matrix(3, 2), raw).unwrap();
        let o = orth(&g, &OrthConfig::default()).unwrap();
        for s in singular_values(&o) {
            prop_assert!(s.abs() <= EPS || (s - 1.0).abs() <= EPS, "singular value {s}");
        }
    }
}
