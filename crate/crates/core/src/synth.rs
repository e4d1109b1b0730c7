//! Reproducible synthetic instance generation: Haar-random rotations, noisy
//! 6x6 instances, and geometrically consistent Plücker-line correspondence
//! sets for the pose pipelines.
//!
//! All generators take an explicit RNG; the seedable generator is ChaCha8
//! (a named, cross-platform-stable stream cipher), so test vectors are
//! portable across platforms and runs.

use crate::error::{Error, Result};
use crate::gem::{assemble, PluckerLine};
use crate::linalg::{rodrigues_exp, Mat3, Mat6, RotationMatrix, SkewSymmetric3, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// The seedable generator used throughout the crate.
pub type SynthRng = ChaCha8Rng;

/// Scene points are sampled uniformly in `[-HALF, HALF]³`.
pub const SCENE_HALF_EXTENT: f64 = 5.0;
/// Non-central ray origins are sampled uniformly in a ball of this radius
/// around each camera center.
pub const CAMERA_BODY_RADIUS: f64 = 0.5;

pub fn rng_from_seed(seed: u64) -> SynthRng {
    SynthRng::seed_from_u64(seed)
}

/// Entrywise Gaussian noise specification for [`noisy_instance`].
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be non-negative, got {sigma}"
            )));
        }
        Ok(NoiseSpec { sigma, seed })
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// A rotation drawn from the Haar measure, via a quaternion uniform on the
/// 3-sphere (four normal deviates, normalized).
pub fn random_rotation<R: Rng>(rng: &mut R) -> RotationMatrix {
    loop {
        let (w, x, y, z) = (normal(rng), normal(rng), normal(rng), normal(rng));
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if n < 1e-6 {
            continue;
        }
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        let m = Mat3::from_rows([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]);
        return RotationMatrix::from_mat3_unchecked(m);
    }
}

/// Translation with components uniform in `[-1, 1]`.
pub fn random_translation<R: Rng>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

/// `A = assemble(R, t) + Ω` with `Ω` entrywise `N(0, sigma²)`; also returns
/// `‖Ω‖_F` for optimality-bound checks.
pub fn noisy_instance(r: &RotationMatrix, t: Vec3, noise: &NoiseSpec) -> (Mat6, f64) {
    let mut rng = rng_from_seed(noise.seed);
    noisy_instance_with(r, t, noise.sigma, &mut rng)
}

/// Same as [`noisy_instance`] but drawing from a caller-provided RNG.
pub fn noisy_instance_with<R: Rng>(
    r: &RotationMatrix,
    t: Vec3,
    sigma: f64,
    rng: &mut R,
) -> (Mat6, f64) {
    let mut a = assemble(r, t);
    let mut omega_sq = 0.0;
    if sigma > 0.0 {
        for i in 0..6 {
            for j in 0..6 {
                let w = sigma * normal(rng);
                a[i][j] += w;
                omega_sq += w * w;
            }
        }
    }
    (a, omega_sq.sqrt())
}

fn point_in_box<R: Rng>(rng: &mut R, half: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

fn point_in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let p = point_in_box(rng, radius);
        if p.norm_sq() <= radius * radius {
            return p;
        }
    }
}

/// Rotates `d` about a random axis orthogonal to it by an angle drawn from
/// `N(0, angle_std²)`.
fn perturb_direction<R: Rng>(d: Vec3, angle_std: f64, rng: &mut R) -> Vec3 {
    if angle_std == 0.0 {
        return d;
    }
    let angle = angle_std * normal(rng);
    let axis = loop {
        let v = Vec3::new(normal(rng), normal(rng), normal(rng));
        let ortho = v - d * v.dot(&d);
        if let Some(u) = ortho.normalized() {
            break u;
        }
    };
    // rodrigues_exp(z, mu) = expm(-mu·hat(z)); rotate by `angle` about `axis`.
    let rot = rodrigues_exp(&SkewSymmetric3::from_axis(axis), -angle);
    rot * d
}

/// Paired projection-line bundles with their ground-truth motion.
#[derive(Debug, Clone)]
pub struct CorrespondenceSet {
    /// `(left, right)` line pairs, each in its own camera frame.
    pub pairs: Vec<(PluckerLine, PluckerLine)>,
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

/// Samples `n` 3D points in the scene box and, for each, a non-central ray
/// per camera: origins inside each camera body, lines through origin and
/// point, expressed in the respective camera frame (the right camera sits at
/// pose `(r, t)`, i.e. `x_left = R·x_right + t`). With `line_noise > 0` the
/// ray directions are angularly perturbed about their origins.
pub fn generate_correspondences<R: Rng>(
    r: &RotationMatrix,
    t: Vec3,
    n: usize,
    rng: &mut R,
    line_noise: f64,
) -> CorrespondenceSet {
    let r_t = r.transpose();
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let p = point_in_box(rng, SCENE_HALF_EXTENT);
        let o_left = point_in_ball(rng, CAMERA_BODY_RADIUS);
        let Some(left_clean) = PluckerLine::through_points(o_left, p) else {
            continue;
        };
        let p_right = r_t * (p - t);
        let o_right = point_in_ball(rng, CAMERA_BODY_RADIUS);
        let Some(right_clean) = PluckerLine::through_points(o_right, p_right) else {
            continue;
        };
        let left = PluckerLine::from_origin_direction(
            o_left,
            perturb_direction(left_clean.direction(), line_noise, rng),
        )
        .expect("perturbed direction stays unit");
        let right = PluckerLine::from_origin_direction(
            o_right,
            perturb_direction(right_clean.direction(), line_noise, rng),
        )
        .expect("perturbed direction stays unit");
        pairs.push((left, right));
    }
    CorrespondenceSet {
        pairs,
        rotation: *r,
        translation: t,
    }
}

/// A world-line scene for the absolute pose problem: `bundles[i]` holds the
/// camera-frame rays that see `world_lines[i]`.
#[derive(Debug, Clone)]
pub struct AbsoluteScene {
    pub world_lines: Vec<PluckerLine>,
    pub bundles: Vec<Vec<PluckerLine>>,
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

/// Samples `num_lines` world lines and, for each, `rays_per_line` non-central
/// camera rays through points on the line; the camera sits at pose `(r, t)`
/// (camera-to-world). Ray directions get angular noise of `line_noise`.
pub fn generate_absolute_scene<R: Rng>(
    r: &RotationMatrix,
    t: Vec3,
    num_lines: usize,
    rays_per_line: usize,
    rng: &mut R,
    line_noise: f64,
) -> AbsoluteScene {
    let r_t = r.transpose();
    let mut world_lines = Vec::with_capacity(num_lines);
    let mut bundles = Vec::with_capacity(num_lines);
    while world_lines.len() < num_lines {
        let anchor = point_in_box(rng, SCENE_HALF_EXTENT);
        let dir = Vec3::new(normal(rng), normal(rng), normal(rng));
        let Some(world_line) = PluckerLine::from_origin_direction(anchor, dir) else {
            continue;
        };
        let mut rays = Vec::with_capacity(rays_per_line);
        while rays.len() < rays_per_line {
            let s: f64 = rng.random_range(-3.0..3.0);
            let q = anchor + world_line.direction() * s;
            let q_cam = r_t * (q - t);
            let o_cam = point_in_ball(rng, CAMERA_BODY_RADIUS);
            let Some(clean) = PluckerLine::through_points(o_cam, q_cam) else {
                continue;
            };
            let ray = PluckerLine::from_origin_direction(
                o_cam,
                perturb_direction(clean.direction(), line_noise, rng),
            )
            .expect("perturbed direction stays unit");
            rays.push(ray);
        }
        world_lines.push(world_line);
        bundles.push(rays);
    }
    AbsoluteScene {
        world_lines,
        bundles,
        rotation: *r,
        translation: t,
    }
}
