use gcnn_ridgelet::quadrature::{integrate, pairwise_sum, BoxGrid, PointCloud};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn midpoint_rule_is_exact_on_affine_integrands(
        radii in prop::collection::vec(0.1f64..5.0, 1..4),
        coef in prop::collection::vec(-3.0f64..3.0, 4),
        points in 1usize..12,
    ) {
        let g = BoxGrid::new(radii.clone(), points).unwrap();
        let v = integrate(&g, |x| {
            coef[0] + x.iter().zip(&coef[1..]).map(|(a, b)| a * b).sum::<f64>()
        })
        .unwrap();
        let vol: f64 = radii.iter().map(|r| 2.0 * r).product();
        prop_assert!((v - coef[0] * vol).abs() <= 1e-11 * vol.max(1.0));
    }

    #[test]
    fn monte_carlo_volume_is_exact(
        radii in prop::collection::vec(0.1f64..5.0, 1..5),
        samples in 1usize..500,
        seed in any::<u64>(),
    ) {
        let c = PointCloud::new(radii.clone(), samples, seed).unwrap();
        let vol: f64 = radii.iter().map(|r| 2.0 * r).product();
        let v = integrate(&c, |_| 1.0).unwrap();
        prop_assert!((v - vol).abs() <= 1e-12 * vol);
    }

    #[test]
    fn pairwise_sum_is_close_to_naive(v in prop::collection::vec(-1e3f64..1e3, 0..300)) {
        let naive: f64 = v.iter().sum();
        let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&v) - naive).abs() <= 1e-13 * scale);
    }
}

#[test]
fn monte_carlo_reproduces_with_seed() {
    let a = PointCloud::new(vec![1.0, 2.0], 64, 7).unwrap();
    let b = PointCloud::new(vec![1.0, 2.0], 64, 7).unwrap();
    let f = |x: &[f64]| (x[0] * x[1]).sin();
    assert_eq!(integrate(&a, f).unwrap(), integrate(&b, f).unwrap());
}
