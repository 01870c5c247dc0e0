use kslab::cubes::{pairing, unpair};
use kslab::expr::{parse, BinOp, FieldExpr, Func};
use kslab::spectral::{forward, inverse};
use kslab::{GridBox, GridField};
use proptest::prelude::*;

fn line_field(samples: Vec<f64>) -> GridField {
    let n = samples.len();
    GridField::from_samples(GridBox::cube(-0.5, 1.5, 1).unwrap(), vec![n], samples).unwrap()
}

fn arb_expr() -> impl Strategy<Value = FieldExpr> {
    let leaf = prop_oneof![
        (-4.0f64..4.0).prop_map(FieldExpr::Const),
        (1usize..=2).prop_map(FieldExpr::Var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| FieldExpr::Neg(Box::new(e))),
            (
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| FieldExpr::Binary(op, Box::new(a), Box::new(b))),
            (
                prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Abs)],
                inner
            )
                .prop_map(|(f, e)| FieldExpr::Call(f, Box::new(e))),
        ]
    })
}

proptest! {
    #[test]
    fn pairing_round_trips(l in 1u64..50_000, i in 1u64..50_000) {
        let r = pairing(l, i);
        prop_assert_eq!(unpair(r), (l, i));
    }

    #[test]
    fn unpair_round_trips(r in 1u64..(1u64 << 50)) {
        let (l, i) = unpair(r);
        prop_assert_eq!(pairing(l, i), r);
    }

    #[test]
    fn holder_on_finite_measure(
        samples in prop::collection::vec(-3.0f64..3.0, 16..200),
        p in 1.0f64..4.0,
        extra in 0.0f64..4.0,
    ) {
        let f = line_field(samples);
        let q = p + extra;
        let vol: f64 = 2.0;
        prop_assert!(f.lp_norm(p) <= f.lp_norm(q) * vol.powf(1.0 / p - 1.0 / q) * (1.0 + 1e-12) + 1e-9);
    }

    #[test]
    fn display_reparses_to_the_same_values(e in arb_expr(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let text = e.to_string();
        let back = parse(&text, 2).unwrap();
        let (a, b) = (e.eval(&[x, y]), back.eval(&[x, y]));
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{text}: {a} vs {b}"),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn compiled_evaluation_is_identical(e in arb_expr(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        prop_assert_eq!(e.compile().eval(&[x, y]), e.eval(&[x, y]));
    }

    #[test]
    fn fourier_round_trip_and_parseval(samples in prop::collection::vec(-1.0f64..1.0, 8..96)) {
        let f = line_field(samples).with_periodic(true);
        let spec = forward(&f).unwrap();
        let back = inverse(&spec).unwrap();
        let err = back.sub(&f).unwrap().max_abs();
        prop_assert!(err < 1e-13, "{err}");
        let mean_square = f.lp_norm(2.0).powi(2) / 2.0;
        prop_assert!((spec.energy() - mean_square).abs() < 1e-12 * (1.0 + mean_square));
    }
}
