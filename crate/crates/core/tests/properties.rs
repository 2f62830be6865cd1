use proptest::prelude::*;

use planar_cc::cc::{lambda_from_config, moment_i, moment_i_positions, position_cc_residual, potential_u};
use planar_cc::classify::classify_configuration;
use planar_cc::geometry::{heron_area, mutual_distances, quad_area_delta, vertex_angle};
use planar_cc::planarity::{affine_dependence, cayley_menger, ptolemy_defect};
use planar_cc::sampling::Sampler;
use planar_cc::{AreaSet, Configuration, Masses, Vec3};

fn arbitrary_configuration() -> impl Strategy<Value = Configuration> {
    (prop::array::uniform4(prop::array::uniform3(-2.0f64..2.0)), prop::array::uniform4(0.1f64..3.0))
        .prop_filter_map("bodies too close", |(q, m)| {
            let c = Configuration::new(q, Masses::new(m).ok()?).ok()?;
            let d = mutual_distances(&c).ok()?;
            (d.as_array().iter().all(|&r| r > 0.05)).then_some(c)
        })
}

const PERMUTATIONS: [[usize; 4]; 6] = [
    [1, 0, 2, 3],
    [0, 2, 1, 3],
    [3, 1, 2, 0],
    [1, 2, 3, 0],
    [2, 3, 0, 1],
    [3, 2, 1, 0],
];

proptest! {
    #[test]
    fn scaling_laws(c in arbitrary_configuration(), k in 0.2f64..5.0) {
        let d = mutual_distances(&c).unwrap();
        let ds = d.scaled(k);
        let m = c.masses();
        let l = d.max();
        prop_assert!((potential_u(m, &ds).unwrap() * k - potential_u(m, &d).unwrap()).abs() < 1e-12 * potential_u(m, &d).unwrap());
        prop_assert!((moment_i(m, &ds) - k * k * moment_i(m, &d)).abs() < 1e-12 * k * k * moment_i(m, &d));
        prop_assert!((cayley_menger(&ds) - k.powi(6) * cayley_menger(&d)).abs() < 1e-9 * (k * l).powi(6));
        if let (Ok(a), Ok(b)) = (quad_area_delta(&d), quad_area_delta(&ds)) {
            prop_assert!((b - k * k * a).abs() < 1e-9 * (k * l).powi(2));
        }
    }

    #[test]
    fn moment_forms_agree(c in arbitrary_configuration()) {
        let d = mutual_distances(&c).unwrap();
        let (a, b) = (moment_i(c.masses(), &d), moment_i_positions(&c));
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
    }

    #[test]
    fn relabeling_invariance(c in arbitrary_configuration(), k in 0usize..6) {
        let p = c.permuted(PERMUTATIONS[k]);
        let (d, dp) = (mutual_distances(&c).unwrap(), mutual_distances(&p).unwrap());
        let u = potential_u(c.masses(), &d).unwrap();
        prop_assert!((potential_u(p.masses(), &dp).unwrap() - u).abs() < 1e-12 * u);
        let cm = cayley_menger(&d);
        prop_assert!((cayley_menger(&dp) - cm).abs() < 1e-9 * d.max().powi(6));
    }

    #[test]
    fn rigid_motion_invariance(c in arbitrary_configuration(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let moved = c.transformed(&s.rotation(), Vec3::new(s.uniform(-5.0, 5.0), s.uniform(-5.0, 5.0), 0.3));
        let l1 = lambda_from_config(&c).unwrap();
        let l2 = lambda_from_config(&moved).unwrap();
        prop_assert!((l1.lambda - l2.lambda).abs() < 1e-9 * l1.lambda.abs().max(1.0));
        let n = |r: [f64; 12]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r1 = n(position_cc_residual(&c, 1.3).unwrap());
        let r2 = n(position_cc_residual(&moved, 1.3).unwrap());
        prop_assert!((r1 - r2).abs() < 1e-9 * r1.max(1.0));
    }

    #[test]
    fn heron_is_symmetric(x in 0.1f64..2.0, y in 0.1f64..2.0, z in 0.1f64..2.0) {
        if let Ok(a) = heron_area(x, y, z) {
            for (p, q, r) in [(y, z, x), (z, x, y), (y, x, z)] {
                prop_assert!((heron_area(p, q, r).unwrap() - a).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn vertex_angle_is_symmetric(c in arbitrary_configuration()) {
        let d = mutual_distances(&c).unwrap();
        if let Ok(t) = vertex_angle(&d, 1, 2, 3) {
            prop_assert_eq!(t, vertex_angle(&d, 3, 2, 1).unwrap());
            prop_assert!(t > 0.0 && t < std::f64::consts::PI);
        }
    }

    #[test]
    fn affine_vector_is_normalized(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        for c in [s.convex_planar(), s.concave_planar().0, s.cyclic()] {
            let a = affine_dependence(&c).unwrap();
            prop_assert_eq!(a.kernel_dim, 1);
            let sum: f64 = a.vector.iter().sum();
            let norm: f64 = a.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(sum.abs() < 1e-12 && (norm - 1.0).abs() < 1e-12);
            let combo = (0..4).fold(Vec3::zeros(), |acc, i| acc + c.positions()[i] * a.vector[i]);
            prop_assert!(combo.norm() < 1e-10);
        }
    }

    #[test]
    fn convex_area_splits(seed in any::<u64>()) {
        let c = Sampler::new(seed).convex_planar();
        let d = mutual_distances(&c).unwrap();
        let a = AreaSet::from_positions(&c);
        let delta = quad_area_delta(&d).unwrap();
        prop_assert!((delta - a.a1 - a.a3).abs() < 1e-12);
        prop_assert!((delta - a.a2 - a.a4).abs() < 1e-12);
        prop_assert!(ptolemy_defect(&d) >= -1e-12);
    }

    #[test]
    fn shape_survives_relabeling(seed in any::<u64>(), k in 0usize..6) {
        let mut s = Sampler::new(seed);
        let c = if seed % 2 == 0 { s.cyclic() } else { s.convex_planar() };
        let a = classify_configuration(&c);
        let b = classify_configuration(&c.permuted(PERMUTATIONS[k]));
        prop_assert_eq!(a.shape, b.shape);
        prop_assert_eq!(a.cocircular, b.cocircular);
        prop_assert_eq!(a.convexity, b.convexity);
    }
}
