use ordstat::distributions::C64;
use ordstat::ilt::{invert_numeric, invert_with, IltConfig, TransformFn};
use ordstat::laplace_terms::{LaplaceTerm, LaplaceTermSum, PiecewisePoly};
use proptest::prelude::*;

fn transform(sum: &LaplaceTermSum) -> TransformFn {
    let pole = sum.pole().unwrap_or(1.0);
    let s = sum.clone();
    TransformFn::from_fn(move |z: C64| Ok(s.eval(z)), -pole, 1.0 / pole)
}

fn magnitude(f: &PiecewisePoly, t: f64) -> f64 {
    f.terms().iter().map(|p| PiecewisePoly::new(vec![p.clone()]).eval(t).abs()).sum()
}

fn arb_sum() -> impl Strategy<Value = LaplaceTermSum> {
    (0.3f64..3.0, prop::collection::vec((-2.0f64..2.0, 1u32..5), 1..5)).prop_map(|(pole, ts)| {
        LaplaceTermSum::from_terms(ts.into_iter().map(|(a, n)| LaplaceTerm::new(a, 0.0, pole, n).unwrap()).collect())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn numeric_inverse_matches_exact_inverse(sum in arb_sum(), t in 0.2f64..6.0) {
        let exact = sum.invert().unwrap();
        let est = invert_numeric(&transform(&sum), t, 8).unwrap();
        let want = exact.eval(t);
        prop_assert!((est.value - want).abs() <= 1e-6 * (1e-3 + magnitude(&exact, t)), "{} vs {want}", est.value);
    }

    #[test]
    fn error_estimate_is_honest(sum in arb_sum(), t in 0.2f64..6.0, digits in 6u32..11) {
        let want = sum.invert().unwrap().eval(t);
        let est = invert_with(&transform(&sum), t, &IltConfig::with_digits(digits)).unwrap();
        prop_assert!((est.value - want).abs() <= 10.0 * est.error + 1e-12, "{} vs {want}, claimed {}", est.value, est.error);
    }

    #[test]
    fn inversion_is_linear(x in arb_sum(), y in arb_sum(), a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.2f64..6.0) {
        let (tx, ty) = (transform(&x), transform(&y));
        let abscissa = tx.abscissa.max(ty.abscissa);
        let combined = TransformFn::from_fn(
            move |s: C64| Ok(x.eval(s) * a + y.eval(s) * b),
            abscissa,
            tx.scale_hint.max(ty.scale_hint),
        );
        let lhs = invert_numeric(&combined, t, 9).unwrap();
        let fx = invert_numeric(&tx, t, 9).unwrap();
        let fy = invert_numeric(&ty, t, 9).unwrap();
        let rhs = a * fx.value + b * fy.value;
        let tol = 10.0 * (lhs.error + a.abs() * fx.error + b.abs() * fy.error) + 1e-10;
        prop_assert!((lhs.value - rhs).abs() <= tol, "{} vs {rhs}", lhs.value);
    }

    #[test]
    fn delay_shifts_the_inverse(sum in arb_sum(), t in 0.2f64..5.0, d in 0.1f64..2.0) {
        let plain = invert_numeric(&transform(&sum), t, 8).unwrap();
        let delayed = invert_numeric(&transform(&sum).with_delay(d), t + d, 8).unwrap();
        prop_assert!((plain.value - delayed.value).abs() <= 10.0 * (plain.error + delayed.error) + 1e-12);
    }
}

#[test]
fn before_the_delay_the_inverse_vanishes() {
    let sum = LaplaceTermSum::from_terms(vec![LaplaceTerm::new(1.0, 0.0, 1.0, 2).unwrap()]).unwrap();
    let est = invert_numeric(&transform(&sum).with_delay(3.0), 2.0, 8).unwrap();
    assert_eq!(est.value, 0.0);
}

#[test]
fn erlang_inverse_to_ten_digits() {
    let sum = LaplaceTermSum::from_terms(vec![LaplaceTerm::new(1.0, 0.0, 1.0, 3).unwrap()]).unwrap();
    let est = invert_numeric(&transform(&sum), 2.0, 10).unwrap();
    let want = 2.0 * (-2.0f64).exp();
    assert!((est.value - want).abs() < 1e-10 * want, "{}", est.value);
}
