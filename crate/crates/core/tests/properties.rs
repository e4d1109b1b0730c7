//! Property tests for the algebraic invariants of the kernels and the model.

mod common;

use gemfit::central::{assemble_essential, project_to_essential};
use gemfit::gem::{assemble, decompose_blocks, optimal_t_hat, FitProblem};
use gemfit::io::{format_matrix, parse_matrix};
use gemfit::linalg::{hat, rodrigues_exp, svd3, Mat3, Mat6, RotationMatrix, SkewSymmetric3, Vec3};
use proptest::prelude::*;

fn vec3_strategy(scale: f64) -> impl Strategy<Value = Vec3> {
    (
        -scale..scale,
        -scale..scale,
        -scale..scale,
    )
        .prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn rotation_strategy() -> impl Strategy<Value = RotationMatrix> {
    (vec3_strategy(2.0), -3.0..3.0f64)
        .prop_map(|(axis, mu)| rodrigues_exp(&SkewSymmetric3::from_axis(axis), mu))
}

fn mat3_strategy(scale: f64) -> impl Strategy<Value = Mat3> {
    prop::array::uniform3(prop::array::uniform3(-scale..scale)).prop_map(Mat3::from_rows)
}

fn mat6_strategy(scale: f64) -> impl Strategy<Value = Mat6> {
    prop::collection::vec(-scale..scale, 36).prop_map(|v| {
        let mut m = Mat6::zero();
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] = v[6 * i + j];
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hat_is_linear(u in vec3_strategy(3.0), v in vec3_strategy(3.0), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let lhs = hat(u * a + v * b);
        let rhs = hat(u) * a + hat(v) * b;
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    #[test]
    fn trace_product_commutes(a in mat6_strategy(3.0), b in mat6_strategy(3.0)) {
        prop_assert!((a.trace_product(&b) - b.trace_product(&a)).abs() < 1e-12);
    }

    #[test]
    fn rodrigues_is_a_one_parameter_subgroup(axis in vec3_strategy(2.0), mu in -2.0..2.0f64, nu in -2.0..2.0f64) {
        let z = SkewSymmetric3::from_axis(axis);
        let lhs = rodrigues_exp(&z, mu) * rodrigues_exp(&z, nu);
        let rhs = rodrigues_exp(&z, mu + nu);
        prop_assert!((*lhs.matrix() - *rhs.matrix()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn rodrigues_never_leaves_the_manifold(axis in vec3_strategy(4.0), mu in -4.0..4.0f64) {
        let r = rodrigues_exp(&SkewSymmetric3::from_axis(axis), mu);
        prop_assert!((r.matrix().det() - 1.0).abs() < 1e-12);
        prop_assert!(r.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn singular_values_are_rotation_invariant(m in mat3_strategy(3.0), r in rotation_strategy()) {
        let base = svd3(&m).sigma;
        let left = svd3(&(*r.matrix() * m)).sigma;
        let right = svd3(&(m * *r.matrix())).sigma;
        for k in 0..3 {
            prop_assert!((base[k] - left[k]).abs() < 1e-10);
            prop_assert!((base[k] - right[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn central_projection_is_idempotent_and_scale_equivariant(m in mat3_strategy(3.0), c in 0.1..4.0f64) {
        let p = project_to_essential(&m);
        let pp = project_to_essential(p.matrix());
        prop_assert!((*pp.matrix() - *p.matrix()).frobenius_norm() < 1e-10);

        let pc = project_to_essential(&(m * c));
        prop_assert!((*pc.matrix() - *p.matrix() * c).frobenius_norm() < 1e-10);

        // Output spectrum is (σ, σ, 0) with σ the mean of the two largest
        // input singular values.
        let s_in = svd3(&m).sigma;
        let s_out = svd3(p.matrix()).sigma;
        let sigma = 0.5 * (s_in[0] + s_in[1]);
        prop_assert!((s_out[0] - sigma).abs() < 1e-10);
        prop_assert!((s_out[1] - sigma).abs() < 1e-10);
        prop_assert!(s_out[2].abs() < 1e-10);
    }

    #[test]
    fn essential_epipolar_product_vanishes(t in vec3_strategy(2.0), r in rotation_strategy(), p in vec3_strategy(4.0)) {
        let e = assemble_essential(t, &r);
        let d_left = p;
        let d_right = r.transpose() * (p - t);
        prop_assert!(d_left.dot(&(*e.matrix() * d_right)).abs() < 1e-10);
    }

    #[test]
    fn assembled_matrices_satisfy_all_constraint_groups(r in rotation_strategy(), t in vec3_strategy(2.0)) {
        let x = assemble(&r, t);
        let (x11, x12, x21, x22) = decompose_blocks(&x);
        prop_assert!((x12.transpose() * x12 - Mat3::identity()).max_abs() < 1e-12);
        prop_assert!((x21 - x12).max_abs() < 1e-12);
        prop_assert!(x22.max_abs() < 1e-12);
        prop_assert!((x11 * x12.transpose() + x12 * x11.transpose()).max_abs() < 1e-12);
        for v in gemfit::baseline::constraint_residuals(&x) {
            prop_assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn objective_f_is_a_squared_distance(a in mat6_strategy(2.0), r in rotation_strategy(), t in vec3_strategy(2.0)) {
        let p = FitProblem::new(a);
        let f = p.objective_f(&r, t);
        prop_assert!(f >= -1e-9);
        let direct = (assemble(&r, t) - a).frobenius_sq();
        prop_assert!((f - direct).abs() <= 1e-10 * direct.max(1.0));

        // Zero exactly at a feasible target.
        let feasible = FitProblem::new(assemble(&r, t));
        prop_assert!(feasible.objective_f(&r, t).abs() < 1e-12);
    }

    #[test]
    fn reduced_objective_matches_partial_minimization(a in mat6_strategy(2.0), r in rotation_strategy()) {
        let p = FitProblem::new(a);
        let g = p.objective_g(&r);
        let f = p.objective_f(&r, optimal_t_hat(p.m(), &r).axis());
        prop_assert!((g - f).abs() <= 1e-10 * g.abs().max(1.0));
    }

    #[test]
    fn matrix_files_round_trip_value_exactly(values in prop::collection::vec(-1e12..1e12f64, 36)) {
        let text = format_matrix(6, 6, &values);
        let parsed = parse_matrix(&text).unwrap();
        prop_assert_eq!(parsed.data, values);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_lines_are_valid_and_incident(seed in 0u64..5000, n in 1usize..12) {
        let mut rng = gemfit::synth::rng_from_seed(seed);
        let r = gemfit::synth::random_rotation(&mut rng);
        let t = gemfit::synth::random_translation(&mut rng);
        let set = gemfit::synth::generate_correspondences(&r, t, n, &mut rng, 0.0);
        let x = assemble(&r, t);
        for (left, right) in &set.pairs {
            prop_assert!((left.direction().norm() - 1.0).abs() < 1e-12);
            prop_assert!(left.direction().dot(&left.moment()).abs() < 1e-12);
            prop_assert!((right.direction().norm() - 1.0).abs() < 1e-12);
            prop_assert!(right.direction().dot(&right.moment()).abs() < 1e-12);
            prop_assert!(gemfit::gem::epipolar_residual(&x, left, right).abs() < 1e-9);
        }
    }
}
