//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//! The process exits non-zero on any failure not listed in
//! `EXPECTED_FAILURES`, or if a listed one starts passing.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsimp::generate;
use rsimp::io::{self, Format, PlyEncoding};
use rsimp::metro::{self, point_triangle_distance, SpatialIndex};
use rsimp::numerics::{jacobi_eigen, Sym3};
use rsimp::rsimp::{
    analyze_variation, plane_quadric, refine, representative_vertex, simplify, simplify_to_faces, split_arity,
    Cluster, SimplificationState, SimplifyOptions, SplitArity, Workspace,
};
use rsimp::vclust;
use rsimp::{validate, Mesh, Vec3};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn whole_mesh_cluster(mesh: &Mesh) -> Cluster {
    Cluster::new(
        0,
        (0..mesh.vertex_count() as u32).collect(),
        (0..mesh.face_count() as u32).collect(),
        mesh,
    )
}

fn time_simplify(mesh: &Mesh, target: usize, runs: usize) -> Duration {
    // warm-up run, not timed
    std::hint::black_box(simplify(mesh, target, None, SimplifyOptions::default()).unwrap());
    // noise only adds time, so the fastest run is the estimate
    (0..runs)
        .map(|_| {
            let t = Instant::now();
            let out = simplify(mesh, target, None, SimplifyOptions::default()).unwrap();
            let elapsed = t.elapsed();
            std::hint::black_box(out);
            elapsed
        })
        .min()
        .expect("at least one run")
}

fn planar_exactness() -> Verdict {
    let start = Instant::now();
    let grid = generate::grid(20, 1.0);
    let mut ws = Workspace::new(&grid);
    let mut state = SimplificationState::initialize(&grid, SimplifyOptions::default());
    let mut worst_nv: f64 = state.clusters().map(|c| c.variation).fold(0.0, f64::max);
    while state.live_count() < 50 {
        if state.step(&grid, &mut ws).is_none() {
            break;
        }
        worst_nv = state.clusters().map(|c| c.variation).fold(worst_nv, f64::max);
    }
    let out = state.output(&grid);
    let diag = grid.bounding_box().diagonal();
    let max_z = out.vertices.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    verdict(
        out.vertex_count() >= 50 && max_z <= 1e-9 * diag && worst_nv <= 1e-12 && elapsed < Duration::from_secs(1),
        format!(
            "vertices={} max|z|={max_z:e} worst nv={worst_nv:e} time={elapsed:?}",
            out.vertex_count()
        ),
    )
}

fn split_arity_classification() -> Verdict {
    let start = Instant::now();
    let cases = [
        (
            "cylinder band",
            generate::cylinder_band(1.0, 2.0, std::f64::consts::FRAC_PI_2, 24, 8),
            SplitArity::Two,
        ),
        (
            "spherical cap",
            generate::spherical_cap(1.0, 60f64.to_radians(), 12, 32),
            SplitArity::Four,
        ),
        ("icosphere", generate::icosphere(Vec3::ZERO, 1.0, 2), SplitArity::Eight),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, mesh, expected) in cases {
        let eigen = analyze_variation(&whole_mesh_cluster(&mesh), &mesh).unwrap();
        let [c_mn, c_big, c_small] = eigen.values;
        // the thresholds restated independently of the library
        let independent = if c_big < 2.0 * c_small && c_mn < 2.0 * c_big {
            SplitArity::Eight
        } else if c_small > 1e-12 * c_mn && c_big / c_small <= 4.0 {
            SplitArity::Four
        } else {
            SplitArity::Two
        };
        let got = split_arity(eigen.values);
        pass &= got == expected && independent == expected;
        detail.push(format!("{name}: eig=[{c_mn:.3}, {c_big:.3}, {c_small:.3}] -> {got:?}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    verdict(pass, format!("{} time={elapsed:?}", detail.join("; ")))
}

fn quality_vs_baseline() -> Verdict {
    let start = Instant::now();
    let torus = generate::torus_with_face_count(20_000);
    let (ours, _) = simplify_to_faces(&torus, 400, None, SimplifyOptions::default()).unwrap();
    let resolution = vclust::resolution_for_target(&torus, ours.mesh.vertex_count());
    let baseline = vclust::cluster_simplify(&torus, resolution);
    let e_ours = metro::mean_error(&torus, &ours.mesh, 500_000, metro::DEFAULT_SEED).unwrap();
    let e_base = metro::mean_error(&torus, &baseline, 500_000, metro::DEFAULT_SEED).unwrap();
    let elapsed = start.elapsed();
    verdict(
        e_ours.percent < e_base.percent && e_ours.percent <= 0.6 && elapsed < Duration::from_secs(60),
        format!(
            "rsimp {}v/{}f {:.4}% vs vclust(res {resolution}) {}v/{}f {:.4}% time={elapsed:.2?}",
            ours.mesh.vertex_count(),
            ours.mesh.face_count(),
            e_ours.percent,
            baseline.vertex_count(),
            baseline.face_count(),
            e_base.percent
        ),
    )
}

fn output_size_control() -> Verdict {
    let torus = generate::torus_with_face_count(20_000);
    let mut pass = true;
    let mut detail = Vec::new();
    for target in [100, 500, 2000] {
        let out = simplify(&torus, target, None, SimplifyOptions::default()).unwrap();
        let k = out.state.split_log().last().map_or(0, |r| r.children.len());
        let n = out.mesh.vertex_count();
        pass &= n >= target && n <= target + 7 + k;
        detail.push(format!("target {target}: {n} vertices (k={k})"));
    }
    verdict(pass, detail.join("; "))
}

fn encode_all(mesh: &rsimp::SimplifiedMesh) -> Vec<Vec<u8>> {
    [Format::Obj, Format::Ply(PlyEncoding::Ascii), Format::Ply(PlyEncoding::BinaryLittleEndian)]
        .into_iter()
        .map(|f| {
            let mut buf = Vec::new();
            io::write_mesh_to(&mut buf, mesh, f).unwrap();
            buf
        })
        .collect()
}

fn refinement_equivalence() -> Verdict {
    let torus = generate::torus_with_face_count(20_000);
    let direct = simplify(&torus, 2000, None, SimplifyOptions::default()).unwrap();
    let coarse = simplify(&torus, 500, None, SimplifyOptions::default()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("state.rsimp-ckpt");
    io::save_checkpoint(&coarse.state, &ckpt).unwrap();
    let reloaded = io::load_checkpoint(&ckpt, &torus).unwrap();

    let in_memory = refine(coarse.state, &torus, 2000, None).unwrap();
    let via_file = refine(reloaded, &torus, 2000, None).unwrap();

    let want = encode_all(&direct.mesh);
    let mem_ok = encode_all(&in_memory.mesh) == want;
    let file_ok = encode_all(&via_file.mesh) == want;

    // and through actual files on disk
    let a = dir.path().join("direct.ply");
    let b = dir.path().join("refined.ply");
    io::write_mesh(&a, &direct.mesh, None).unwrap();
    io::write_mesh(&b, &via_file.mesh, None).unwrap();
    let disk_ok = std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();

    verdict(
        mem_ok && file_ok && disk_ok,
        format!(
            "{} vertices; in-memory identical={mem_ok} checkpoint identical={file_ok} files identical={disk_ok}",
            direct.mesh.vertex_count()
        ),
    )
}

fn scaling_shape() -> Verdict {
    let runs = 7;
    let inputs = [5_000, 10_000, 20_000, 40_000];
    let times: Vec<Duration> = inputs
        .iter()
        .map(|&f| time_simplify(&generate::torus_with_face_count(f), 400, runs))
        .collect();
    let input_ratios: Vec<f64> = times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect();
    let input_ok = input_ratios.iter().all(|&r| r <= 2.5);

    let torus = generate::torus_with_face_count(20_000);
    let outputs = [100usize, 400, 1600, 6400];
    let per_vertex: Vec<f64> = outputs
        .iter()
        .map(|&n| time_simplify(&torus, n, runs).as_secs_f64() / n as f64)
        .collect();
    let output_ok = per_vertex.windows(2).all(|w| w[1] <= 2.0 * w[0]);

    verdict(
        input_ok && output_ok,
        format!(
            "input doubling ratios {:?}; time per output vertex (us) {:?}",
            input_ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>(),
            per_vertex.iter().map(|t| format!("{:.2}", t * 1e6)).collect::<Vec<_>>()
        ),
    )
}

fn time_budget() -> Verdict {
    let torus = generate::torus_with_face_count(40_000);
    let budget = Duration::from_millis(50);
    let out = simplify(&torus, torus.vertex_count(), Some(budget), SimplifyOptions::default()).unwrap();
    let r = &out.report;
    let within = r.split_loop <= budget + r.longest_split;
    let report = out.mesh.to_mesh().map(|m| validate(&m));
    let renderable = report.as_ref().is_ok_and(|v| v.is_renderable());
    verdict(
        within && renderable && out.mesh.vertex_count() >= 8,
        format!(
            "split loop {:?} (longest split {:?}), stop={:?}, {} vertices, {} faces, renderable={renderable}",
            r.split_loop,
            r.longest_split,
            r.stop,
            out.mesh.vertex_count(),
            out.mesh.face_count()
        ),
    )
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if let Some(u) = v.try_normalize() {
            if v.length() <= 1.0 {
                return u;
            }
        }
    }
}

fn quadric_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_grad = 0.0f64;
    let mut tested = 0;
    for _ in 0..200 {
        // a few random triangles scattered around a random centre
        let centre = Vec3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let n_tri = rng.gen_range(3..12);
        let mut verts = Vec::new();
        let mut faces = Vec::new();
        for t in 0..n_tri {
            let base = centre + random_unit(&mut rng) * rng.gen_range(0.0..1.0);
            for _ in 0..3 {
                verts.push(base + random_unit(&mut rng) * rng.gen_range(0.1..0.5));
            }
            faces.push([3 * t, 3 * t + 1, 3 * t + 2]);
        }
        let mesh = Mesh::new(verts, faces).unwrap();
        let cluster = whole_mesh_cluster(&mesh);
        let (a, b, c) = plane_quadric(&cluster, &mesh);
        let q = |v: Vec3| v.dot(a.mul_vec(v)) + 2.0 * b.dot(v) + c;
        let v = representative_vertex(&cluster, &mesh);

        let bounds = mesh.bounding_box();
        let lo = bounds.min - Vec3::splat(1.0);
        let hi = bounds.max + Vec3::splat(1.0);
        let probe_min = (0..1000)
            .map(|_| {
                q(Vec3::new(
                    rng.gen_range(lo.x..hi.x),
                    rng.gen_range(lo.y..hi.y),
                    rng.gen_range(lo.z..hi.z),
                ))
            })
            .fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(q(v) - probe_min);

        let h = 1e-5;
        let analytic = (a.mul_vec(v) + b) * 2.0;
        let axes = [Vec3::X, Vec3::Y, Vec3::Z];
        let fd = Vec3::new(
            (q(v + axes[0] * h) - q(v - axes[0] * h)) / (2.0 * h),
            (q(v + axes[1] * h) - q(v - axes[1] * h)) / (2.0 * h),
            (q(v + axes[2] * h) - q(v - axes[2] * h)) / (2.0 * h),
        );
        // relative to the size of the terms that cancel in the gradient
        let scale = 2.0 * (a.frobenius_norm() * v.length() + b.length()).max(1.0);
        worst_grad = worst_grad.max((fd - analytic).length() / scale);
        tested += 1;
    }
    verdict(
        worst_gap <= 1e-9 && worst_grad <= 1e-6,
        format!("{tested} clusters; worst Q(v)-min(probes)={worst_gap:e}; worst gradient mismatch={worst_grad:e}"),
    )
}

/// Eigenvalues of a symmetric 3×3 matrix from the trigonometric solution of
/// its characteristic cubic, sorted descending.
fn cubic_eigenvalues(m: &Sym3) -> [f64; 3] {
    let p1 = m.xy * m.xy + m.xz * m.xz + m.yz * m.yz;
    let q = m.trace() / 3.0;
    if p1 == 0.0 {
        let mut d = [m.xx, m.yy, m.zz];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let p2 = (m.xx - q).powi(2) + (m.yy - q).powi(2) + (m.zz - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = Sym3 {
        xx: m.xx - q,
        yy: m.yy - q,
        zz: m.zz - q,
        ..*m
    }
    .scaled(1.0 / p);
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [l1, 3.0 * q - l1 - l3, l3]
}

fn eigensolver_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_res, mut worst_tr, mut worst_det, mut worst_root) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        // Bᵀ B is PSD; its columns' outer products sum to it
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let mut m = Sym3::ZERO;
        for _ in 0..3 {
            let row = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m += Sym3::outer(row * scale);
        }
        let e = jacobi_eigen(&m).unwrap();
        let norm = m.frobenius_norm();
        for k in 0..3 {
            let r = (m.mul_vec(e.vectors[k]) - e.vectors[k] * e.values[k]).length();
            worst_res = worst_res.max(r / norm);
        }
        let tr = e.values.iter().sum::<f64>();
        worst_tr = worst_tr.max((tr - m.trace()).abs() / m.trace().abs());
        let det = e.values.iter().product::<f64>();
        worst_det = worst_det.max((det - m.determinant()).abs() / norm.powi(3));
        let roots = cubic_eigenvalues(&m);
        for (r, v) in roots.iter().zip(&e.values) {
            worst_root = worst_root.max((r - v).abs() / norm);
        }
    }
    verdict(
        worst_res <= 1e-9 && worst_tr <= 1e-9 && worst_det <= 1e-9 && worst_root <= 1e-8,
        format!(
            "1000 matrices; residual/|A|={worst_res:e} trace rel={worst_tr:e} det rel={worst_det:e} roots rel={worst_root:e}"
        ),
    )
}

struct SpherePair {
    mesh: Mesh,
    centres: [Vec3; 2],
    axis: Vec3,
    first_b: u32,
}

fn sphere_pair(centre_distance: f64) -> SpherePair {
    let axis = Vec3::splat(1.0).try_normalize().unwrap();
    let centres = [axis * (-centre_distance / 2.0), axis * (centre_distance / 2.0)];
    let a = generate::icosphere(centres[0], 1.0, 3);
    let first_b = a.vertex_count() as u32;
    let b = generate::icosphere(centres[1], 1.0, 3);
    SpherePair {
        mesh: generate::merge(&[a, b]),
        centres,
        axis,
        first_b,
    }
}

struct SphereRun {
    /// Representatives of clusters drawn from one sphere only, per sphere.
    pure: [Vec<Vec3>; 2],
    /// Representatives of clusters averaging vertices of both spheres.
    mixed: Vec<Vec3>,
}

fn run_spheres(pair: &SpherePair, topology_check: bool) -> SphereRun {
    let out = simplify(&pair.mesh, 16, None, SimplifyOptions { topology_check }).unwrap();
    let mut counts = vec![[0usize; 2]; out.mesh.vertex_count()];
    for (v, &k) in out.mesh.vertex_map.iter().enumerate() {
        counts[k as usize][usize::from(v as u32 >= pair.first_b)] += 1;
    }
    let mut run = SphereRun {
        pure: [Vec::new(), Vec::new()],
        mixed: Vec::new(),
    };
    for (k, [in_a, in_b]) in counts.into_iter().enumerate() {
        let p = out.mesh.vertices[k];
        match (in_a, in_b) {
            (_, 0) => run.pure[0].push(p),
            (0, _) => run.pure[1].push(p),
            _ => run.mixed.push(p),
        }
    }
    run
}

/// Outside both spheres and inside the slab separating them.
fn between(pair: &SpherePair, p: Vec3) -> bool {
    let [c1, c2] = pair.centres;
    let t = (p - c1).dot(pair.axis);
    let gap = c1.distance(c2);
    t > 1.0 && t < gap - 1.0 && p.distance(c1) > 1.0 && p.distance(c2) > 1.0
}

fn topology_check() -> Verdict {
    let pair = sphere_pair(3.0);
    let with = run_spheres(&pair, true);
    let centroid = |g: &[Vec3]| g.iter().fold(Vec3::ZERO, |s, &p| s + p) / g.len() as f64;
    let separation = if with.pure.iter().all(|g| !g.is_empty()) {
        centroid(&with.pure[0]).distance(centroid(&with.pure[1]))
    } else {
        0.0
    };
    let with_ok = with.mixed.is_empty() && separation >= 2.0;

    // Without the check the effect shows up as a cluster averaging both
    // spheres whose representative falls in the gap.
    let without = run_spheres(&pair, false);
    let cross = without.mixed.iter().filter(|&&p| between(&pair, p)).count();

    // same experiment with the spheres 2.2 apart, for comparison only
    let close = sphere_pair(2.2);
    let close_without = run_spheres(&close, false);
    let close_with_mixed = run_spheres(&close, true).mixed.len();

    verdict(
        with_ok && cross >= 1,
        format!(
            "with check: {} mixed clusters, centroid separation {separation:.3}; without check: {} mixed clusters, \
             {cross} cross-sphere representatives between the spheres. The initial octant planes through the \
             midpoint always put the two spheres in different clusters at this spacing, so the check never \
             changes the result. [info, not scored: at spacing 2.2 the spheres do share \
             clusters, {close_with_mixed} mixed with check and {} without]",
            with.mixed.len(),
            without.mixed.len(),
            close_without.mixed.len()
        ),
    )
}

fn metro_self_test() -> Verdict {
    let torus = generate::torus(1.0, 0.4, 40, 20);
    let same = metro::mean_error(&torus, &torus, 50_000, 1).unwrap();

    let plane = generate::grid(16, 1.0);
    let d = 0.3;
    let offset = generate::transform(&plane, |p| p + Vec3::Z * d);
    let off = metro::mean_error(&plane, &offset, 50_000, 2).unwrap();
    let expected = 100.0 * d / plane.bounding_box().diagonal();
    let rel = (off.percent - expected).abs() / expected;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0;
    let small = [
        generate::torus(1.0, 0.4, 10, 10),
        generate::icosphere(Vec3::ZERO, 1.0, 1),
        generate::grid(10, 0.1),
    ];
    for mesh in &small {
        assert!(mesh.face_count() <= 200);
        let index = SpatialIndex::build(mesh).unwrap();
        for _ in 0..200 {
            let p = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let brute = mesh
                .faces()
                .iter()
                .map(|f| {
                    let [a, b, c] = f.map(|v| mesh.vertex(v));
                    point_triangle_distance(p, a, b, c)
                })
                .fold(f64::INFINITY, f64::min);
            if index.distance(p) != brute {
                mismatches += 1;
            }
        }
    }
    verdict(
        same.percent.abs() <= 1e-10 && rel <= 0.02 && mismatches == 0,
        format!(
            "identical {:e}%; offset planes {:.5}% vs {expected:.5}% (rel {rel:.2e}); index mismatches {mismatches}/600",
            same.percent, off.percent
        ),
    )
}

/// Criteria known to fail as stated. They still run and print FAIL; only a
/// change in their outcome affects the exit status.
const EXPECTED_FAILURES: &[usize] = &[10];

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("planar exactness", planar_exactness),
        ("split arity classification", split_arity_classification),
        ("quality vs vertex clustering", quality_vs_baseline),
        ("output size control", output_size_control),
        ("refinement equivalence", refinement_equivalence),
        ("scaling shape", scaling_shape),
        ("time budget", time_budget),
        ("quadric oracle", quadric_oracle),
        ("eigensolver oracle", eigensolver_oracle),
        ("topology check", topology_check),
        ("metro self-test", metro_self_test),
    ];
    let mut failures = 0;
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        let v = check();
        let expected_failure = EXPECTED_FAILURES.contains(&number);
        if !v.pass {
            failures += 1;
        }
        if v.pass == expected_failure {
            unexpected += 1;
        }
        let note = match (v.pass, expected_failure) {
            (false, true) => " [expected: not attainable with this geometry, see README]",
            (true, true) => " [UNEXPECTED PASS]",
            _ => "",
        };
        println!(
            "{} criterion {number:>2} ({name}): {}{note}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed; {unexpected} unexpected result(s)",
        criteria.len() - failures,
        criteria.len()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
