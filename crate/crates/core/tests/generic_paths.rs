use ordstat::distributions::{Distribution, Exponential, HalfNormal};
use ordstat::exact_exp::ExactExp;
use ordstat::generic_joint::GenericJoint;
use ordstat::quadrature::{try_integrate_to_infinity, QuadConfig};
use ordstat::reduction::ReductionOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn total_mass(f: impl Fn(f64) -> f64) -> f64 {
    let cfg = QuadConfig::new(1e-8, 1e-7);
    try_integrate_to_infinity(|x| Ok(f(x)), 0.0, &[], &cfg).unwrap().value
}

#[test]
fn sum_densities_normalize() {
    let dists: Vec<Arc<dyn Distribution>> =
        vec![Arc::new(Exponential::new(1.5).unwrap()), Arc::new(HalfNormal::new(1.0).unwrap())];
    for d in dists {
        let g = GenericJoint::new(d.clone()).unwrap();
        for k in 1..=4 {
            let mass = total_mass(|x| g.t1_pdf(k, x).unwrap());
            assert!((mass - 1.0).abs() < 1e-4, "{} T1 K={k}: {mass}", d.name());
        }
        for &(k, ks) in &[(3, 2), (4, 2), (4, 3)] {
            let mass = total_mass(|x| g.t4_pdf(k, ks, x).unwrap());
            assert!((mass - 1.0).abs() < 1e-4, "{} T4 K={k} Ks={ks}: {mass}", d.name());
        }
    }
}

#[test]
fn all_selected_reductions_agree() {
    let g = GenericJoint::new(Arc::new(HalfNormal::new(1.0).unwrap())).unwrap();
    for &(x, y) in &[(0.9, 1.4), (1.5, 0.8)] {
        let a = g.t4_pdf(3, 3, x + y).unwrap();
        let b = g.t1_pdf(3, x + y).unwrap();
        assert!((a - b).abs() <= 1e-5 * b, "{a} vs {b}");
    }
    for &(x, y) in &[(2.0, 0.9), (2.6, 0.5)] {
        let a = g.t6_jpdf(4, 4, 2, x, y).unwrap();
        let b = g.t3_jpdf(4, 2, x, y).unwrap();
        assert!((a - b).abs() <= 1e-5 * b, "T6/T3 {a} vs {b}");
    }
    for &(x, y) in &[(0.7, 1.6), (1.0, 2.6)] {
        let a = g.t5_jpdf(4, 4, 2, x, y).unwrap();
        let b = g.t2_jpdf(4, 2, x, y).unwrap();
        assert!((a - b).abs() <= 1e-5 * b, "T5/T2 {a} vs {b}");
    }
}

#[test]
fn reduction_orders_agree_on_generic_path() {
    let g = GenericJoint::new(Arc::new(HalfNormal::new(1.0).unwrap())).unwrap();
    for &(k, ks, m, x, y) in &[(5, 4, 2, 0.8, 1.9), (4, 3, 1, 1.3, 1.1), (4, 3, 2, 0.6, 1.5)] {
        let a = g.t5_with_order(k, ks, m, x, y, ReductionOrder::OuterLast).unwrap();
        let b = g.t5_with_order(k, ks, m, x, y, ReductionOrder::OuterOther).unwrap();
        assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-9), "{k},{ks},{m}: {a} vs {b}");
    }
}

#[test]
fn exponential_matches_exact_at_random_points() {
    let g = GenericJoint::new(Arc::new(Exponential::new(0.8).unwrap())).unwrap();
    let e = ExactExp::new(0.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let k = rng.random_range(2..=5);
        let m = rng.random_range(1..k);
        let x = rng.random_range(0.2..3.0);
        let y = rng.random_range(0.0..1.0) * (k - m) as f64 * x / m as f64;
        let a = g.t3_jpdf(k, m, x, y).unwrap();
        let b = e.jpdf_headsum_vs_tailsum_all_k(k, m).unwrap().evaluate(&[x, y]).unwrap();
        assert!((a - b).abs() <= 1e-5 * b.abs() + 1e-9, "T3 K={k} m={m} ({x},{y}): {a} vs {b}");
    }
}
