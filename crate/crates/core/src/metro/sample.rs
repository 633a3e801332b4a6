//! Area-uniform surface sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::Mesh;

/// Seeded generator for one sampling stream.
pub(crate) fn sampler_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point in triangle `abc` from two uniform numbers in [0, 1).
pub fn barycentric_sample(a: Vec3, b: Vec3, c: Vec3, r1: f64, r2: f64) -> Vec3 {
    let s = r1.sqrt();
    a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2)
}

/// `n` points drawn with face probability proportional to area.
pub fn sample_surface(mesh: &Mesh, n: usize, seed: u64) -> Result<Vec<Vec3>> {
    sample_with(mesh, n, &mut sampler_rng(seed, 0))
}

pub(crate) fn sample_with(mesh: &Mesh, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut cdf = Vec::with_capacity(mesh.face_count());
    let mut acc = 0.0;
    for f in 0..mesh.face_count() as u32 {
        acc += mesh.face_area(f);
        cdf.push(acc);
    }
    if acc.is_nan() || acc <= 0.0 {
        return Err(Error::Numeric("surface has zero total area"));
    }
    let last = cdf.len() - 1;
    let points = (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let mut f = cdf.partition_point(|&c| c <= u).min(last);
            // never land on a zero-area face sharing the same cumulative value
            while mesh.face_area(f as u32) == 0.0 && f > 0 {
                f -= 1;
            }
            let [a, b, c] = mesh.face(f as u32).map(|v| mesh.vertex(v));
            barycentric_sample(a, b, c, rng.gen(), rng.gen())
        })
        .collect();
    Ok(points)
}
