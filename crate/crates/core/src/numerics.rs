//! Small dense linear algebra: symmetric 3×3 matrices, a cyclic Jacobi
//! eigensolver, quadric minimization and plane helpers.

use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Off-diagonal Frobenius norm at which Jacobi iteration stops, relative to
/// the Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// A quadric is treated as singular when its smallest eigenvalue is below
/// this fraction of its largest.
pub const SINGULAR_RATIO: f64 = 1e-8;

/// Symmetric 3×3 matrix stored as its six unique coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3 {
    pub xx: f64,
    pub xy: f64,
    pub xz: f64,
    pub yy: f64,
    pub yz: f64,
    pub zz: f64,
}

impl Sym3 {
    pub const ZERO: Sym3 = Sym3 {
        xx: 0.0,
        xy: 0.0,
        xz: 0.0,
        yy: 0.0,
        yz: 0.0,
        zz: 0.0,
    };

    pub fn identity() -> Sym3 {
        Sym3::diagonal(1.0, 1.0, 1.0)
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Sym3 {
        Sym3 {
            xx: a,
            yy: b,
            zz: c,
            ..Sym3::ZERO
        }
    }

    /// `v vᵀ`
    pub fn outer(v: Vec3) -> Sym3 {
        Sym3 {
            xx: v.x * v.x,
            xy: v.x * v.y,
            xz: v.x * v.z,
            yy: v.y * v.y,
            yz: v.y * v.z,
            zz: v.z * v.z,
        }
    }

    /// Builds from a full matrix, reading the upper triangle.
    pub fn from_rows(m: [[f64; 3]; 3]) -> Sym3 {
        Sym3 {
            xx: m[0][0],
            xy: m[0][1],
            xz: m[0][2],
            yy: m[1][1],
            yz: m[1][2],
            zz: m[2][2],
        }
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.xx * v.x + self.xy * v.y + self.xz * v.z,
            self.xy * v.x + self.yy * v.y + self.yz * v.z,
            self.xz * v.x + self.yz * v.y + self.zz * v.z,
        )
    }

    pub fn scaled(&self, s: f64) -> Sym3 {
        Sym3 {
            xx: self.xx * s,
            xy: self.xy * s,
            xz: self.xz * s,
            yy: self.yy * s,
            yz: self.yz * s,
            zz: self.zz * s,
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn determinant(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz)
            - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz))
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.xx, self.xy, self.xz, self.yy, self.yz, self.zz]
            .iter()
            .all(|c| c.is_finite())
    }
}

impl Add for Sym3 {
    type Output = Sym3;
    fn add(mut self, o: Sym3) -> Sym3 {
        self += o;
        self
    }
}

impl AddAssign for Sym3 {
    fn add_assign(&mut self, o: Sym3) {
        self.xx += o.xx;
        self.xy += o.xy;
        self.xz += o.xz;
        self.yy += o.yy;
        self.yz += o.yz;
        self.zz += o.zz;
    }
}

/// Eigenvalues sorted descending, each paired with a unit eigenvector.
///
/// Every eigenvector has its largest-magnitude component positive so the
/// decomposition is reproducible bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
}

/// Eigendecomposition of a symmetric 3×3 matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(m: &Sym3) -> Result<EigenDecomposition> {
    if !m.is_finite() {
        return Err(Error::Numeric("non-finite matrix entry"));
    }
    let mut a = m.to_rows();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let threshold = JACOBI_TOLERANCE * m.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2])).sqrt();
        if off <= threshold {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            rotate(&mut a, &mut v, p, q);
        }
    }

    let mut order = [0usize, 1, 2];
    // stable: equal eigenvalues keep their Jacobi order
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));

    let mut values = [0.0; 3];
    let mut vectors = [Vec3::ZERO; 3];
    for (k, &i) in order.iter().enumerate() {
        values[k] = a[i][i];
        let mut e = Vec3::new(v[0][i], v[1][i], v[2][i]);
        if e[e.max_abs_axis()] < 0.0 {
            e = -e;
        }
        vectors[k] = e;
    }
    Ok(EigenDecomposition { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut [[f64; 3]; 3], v: &mut [[f64; 3]; 3], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for row in a.iter_mut() {
        let (akp, akq) = (row[p], row[q]);
        row[p] = c * akp - s * akq;
        row[q] = s * akp + c * akq;
    }
    let (rp, rq) = (a[p], a[q]);
    a[p] = std::array::from_fn(|k| c * rp[k] - s * rq[k]);
    a[q] = std::array::from_fn(|k| s * rp[k] + c * rq[k]);
    a[p][q] = 0.0;
    a[q][p] = 0.0;

    for row in v.iter_mut() {
        let vp = row[p];
        let vq = row[q];
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricSolution {
    pub point: Vec3,
    pub used_fallback: bool,
}

/// Minimizer of `Q(v) = vᵀAv + 2Bᵀv + c`, i.e. `v = −A⁻¹B`.
///
/// Returns `fallback` (flagged) when `A` is singular or ill-conditioned.
pub fn solve_min_quadric(a: &Sym3, b: Vec3, fallback: Vec3) -> QuadricSolution {
    let fallback = QuadricSolution {
        point: fallback,
        used_fallback: true,
    };
    if !b.is_finite() {
        return fallback;
    }
    let Ok(eigen) = jacobi_eigen(a) else {
        return fallback;
    };
    let largest = eigen.values[0];
    if largest <= 0.0 || eigen.values[2] < SINGULAR_RATIO * largest {
        return fallback;
    }

    let solve = |rhs: Vec3| -> Vec3 {
        eigen
            .values
            .iter()
            .zip(&eigen.vectors)
            .fold(Vec3::ZERO, |acc, (&l, &u)| acc + u * (u.dot(rhs) / l))
    };
    let mut point = -solve(b);
    // one step of iterative refinement on the residual A·v + B
    let residual = a.mul_vec(point) + b;
    point -= solve(residual);

    if !point.is_finite() {
        return fallback;
    }
    QuadricSolution {
        point,
        used_fallback: false,
    }
}

/// Plane `normal · x + offset = 0` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    /// Plane through `point`; `None` if `normal` cannot be normalized.
    pub fn through(point: Vec3, normal: Vec3) -> Option<Plane> {
        let normal = normal.try_normalize()?;
        Some(Plane {
            normal,
            offset: -normal.dot(point),
        })
    }

    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) + self.offset
    }

    /// Orthogonal projection of a point onto the plane.
    pub fn project_point(&self, p: Vec3) -> Vec3 {
        p - self.normal * self.signed_distance(p)
    }
}

/// Component of `v` orthogonal to the unit vector `normal`.
pub fn project_onto_plane(v: Vec3, normal: Vec3) -> Vec3 {
    v - normal * v.dot(normal)
}

/// Angle between two non-zero vectors in degrees, in `[0, 180]`.
pub fn angle_between(u: Vec3, v: Vec3) -> Result<f64> {
    let lu = u.length();
    let lv = v.length();
    if !(lu > 0.0 && lv > 0.0) || !lu.is_finite() || !lv.is_finite() {
        return Err(Error::Numeric("angle with a zero or non-finite vector"));
    }
    let cos = (u.dot(v) / (lu * lv)).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}
