use std::ffi::{CStr, CString};
use std::ptr;

use rsimp::generate;
use rsimp_ffi::*;

fn torus_handle() -> (*mut RsimpMesh, rsimp::Mesh) {
    let mesh = generate::torus(1.0, 0.3, 40, 20);
    let coords: Vec<f64> = mesh.vertices().iter().flat_map(|v| v.to_array()).collect();
    let idx: Vec<u32> = mesh.faces().iter().flatten().copied().collect();
    let mut handle = ptr::null_mut();
    let st = unsafe {
        rsimp_mesh_from_arrays(coords.as_ptr(), mesh.vertex_count(), idx.as_ptr(), mesh.face_count(), &mut handle)
    };
    assert_eq!(st, RsimpStatus::Ok);
    (handle, mesh)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rsimp_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn simplify_matches_library() {
    let (m, mesh) = torus_handle();
    unsafe {
        assert_eq!(rsimp_mesh_vertex_count(m), 800);
        assert_eq!(rsimp_mesh_face_count(m), 1600);
        let mut res = ptr::null_mut();
        let st = rsimp_simplify(m, 100, -1, true, ptr::null_mut(), &mut res);
        assert_eq!(st, RsimpStatus::Ok);
        let direct = rsimp::simplify(&mesh, 100, None, Default::default()).unwrap();

        let nv = rsimp_result_vertex_count(res);
        let nf = rsimp_result_face_count(res);
        assert_eq!(nv, direct.mesh.vertex_count());
        assert_eq!(nf, direct.mesh.face_count());
        assert_eq!(rsimp_result_split_count(res), direct.report.splits);
        assert!(!rsimp_result_stopped_by_budget(res));

        let mut verts = vec![0.0; 3 * nv];
        assert_eq!(rsimp_result_copy_vertices(res, verts.as_mut_ptr(), verts.len()), RsimpStatus::Ok);
        let expected: Vec<f64> = direct.mesh.vertices.iter().flat_map(|v| v.to_array()).collect();
        assert_eq!(verts, expected);

        let mut faces = vec![0u32; 3 * nf];
        assert_eq!(rsimp_result_copy_faces(res, faces.as_mut_ptr(), faces.len()), RsimpStatus::Ok);
        assert!(faces.iter().all(|&i| (i as usize) < nv));

        let mut map = vec![0u32; 800];
        assert_eq!(rsimp_result_copy_vertex_map(res, map.as_mut_ptr(), map.len()), RsimpStatus::Ok);
        assert_eq!(map, direct.mesh.vertex_map);

        rsimp_result_free(res);
        rsimp_mesh_free(m);
    }
}

#[test]
fn small_buffer_is_rejected() {
    let (m, _) = torus_handle();
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(rsimp_simplify(m, 50, -1, true, ptr::null_mut(), &mut res), RsimpStatus::Ok);
        let mut buf = [0.0f64; 3];
        let st = rsimp_result_copy_vertices(res, buf.as_mut_ptr(), buf.len());
        assert_eq!(st, RsimpStatus::BufferTooSmall);
        assert!(last_error().contains("needed"));
        rsimp_result_free(res);
        rsimp_mesh_free(m);
    }
}

#[test]
fn refine_through_checkpoint_equals_direct() {
    let (m, _) = torus_handle();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = CString::new(dir.path().join("run.rsmp").to_str().unwrap()).unwrap();
    unsafe {
        let mut state = ptr::null_mut();
        let mut coarse = ptr::null_mut();
        assert_eq!(rsimp_simplify(m, 60, -1, true, &mut state, &mut coarse), RsimpStatus::Ok);
        assert_eq!(rsimp_state_cluster_count(state), rsimp_result_vertex_count(coarse));
        assert_eq!(rsimp_checkpoint_save(state, ckpt.as_ptr()), RsimpStatus::Ok);
        rsimp_state_free(state);

        let mut loaded = ptr::null_mut();
        assert_eq!(rsimp_checkpoint_load(ckpt.as_ptr(), m, &mut loaded), RsimpStatus::Ok);
        let mut fine = ptr::null_mut();
        assert_eq!(rsimp_refine(loaded, m, 200, -1, &mut fine), RsimpStatus::Ok);
        assert_eq!(rsimp_state_cluster_count(loaded), rsimp_result_vertex_count(fine));

        let mut direct = ptr::null_mut();
        assert_eq!(rsimp_simplify(m, 200, -1, true, ptr::null_mut(), &mut direct), RsimpStatus::Ok);
        let n = rsimp_result_vertex_count(fine);
        assert_eq!(n, rsimp_result_vertex_count(direct));
        let mut a = vec![0.0; 3 * n];
        let mut b = vec![0.0; 3 * n];
        rsimp_result_copy_vertices(fine, a.as_mut_ptr(), a.len());
        rsimp_result_copy_vertices(direct, b.as_mut_ptr(), b.len());
        assert_eq!(a, b);

        for r in [coarse, fine, direct] {
            rsimp_result_free(r);
        }
        rsimp_state_free(loaded);
        rsimp_mesh_free(m);
    }
}

#[test]
fn checkpoint_for_other_mesh_is_rejected() {
    let (m, _) = torus_handle();
    let other = generate::icosphere(rsimp::Vec3::new(0.0, 0.0, 0.0), 1.0, 2);
    let coords: Vec<f64> = other.vertices().iter().flat_map(|v| v.to_array()).collect();
    let idx: Vec<u32> = other.faces().iter().flatten().copied().collect();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = CString::new(dir.path().join("a.rsmp").to_str().unwrap()).unwrap();
    unsafe {
        let mut o = ptr::null_mut();
        assert_eq!(
            rsimp_mesh_from_arrays(coords.as_ptr(), other.vertex_count(), idx.as_ptr(), other.face_count(), &mut o),
            RsimpStatus::Ok
        );
        let mut state = ptr::null_mut();
        let mut res = ptr::null_mut();
        assert_eq!(rsimp_simplify(m, 40, -1, true, &mut state, &mut res), RsimpStatus::Ok);
        assert_eq!(rsimp_checkpoint_save(state, ckpt.as_ptr()), RsimpStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(rsimp_checkpoint_load(ckpt.as_ptr(), o, &mut loaded), RsimpStatus::DigestMismatch);
        assert!(loaded.is_null());
        assert!(!last_error().is_empty());
        rsimp_state_free(state);
        rsimp_result_free(res);
        rsimp_mesh_free(o);
        rsimp_mesh_free(m);
    }
}

#[test]
fn measure_and_cluster() {
    let (m, _) = torus_handle();
    unsafe {
        let mut ours = ptr::null_mut();
        let mut grid = ptr::null_mut();
        assert_eq!(rsimp_simplify(m, 200, -1, true, ptr::null_mut(), &mut ours), RsimpStatus::Ok);
        assert_eq!(rsimp_vertex_cluster(m, 8, &mut grid), RsimpStatus::Ok);
        assert!(rsimp_result_vertex_count(grid) > 0);

        let mut a = RsimpErrorReport::default();
        let mut b = RsimpErrorReport::default();
        assert_eq!(rsimp_measure(m, ours, 20_000, 42, &mut a), RsimpStatus::Ok);
        assert_eq!(rsimp_measure(m, ours, 20_000, 42, &mut b), RsimpStatus::Ok);
        assert_eq!(a.mean_symmetric.to_bits(), b.mean_symmetric.to_bits());
        assert_eq!(a.samples, 20_000);
        assert_eq!(a.mean_symmetric, a.mean_forward.max(a.mean_backward));
        assert!(a.percent > 0.0 && a.percent < 5.0);
        assert_eq!(a.degenerate, 0);

        let mut d = RsimpErrorReport::default();
        assert_eq!(rsimp_measure(m, ours, 0, 7, &mut d), RsimpStatus::Ok);
        assert_eq!(d.samples, 160_000);

        rsimp_result_free(grid);
        assert_eq!(rsimp_vertex_cluster(m, 0, &mut grid), RsimpStatus::InvalidArgument);
        assert!(grid.is_null());
        rsimp_result_free(ours);
        rsimp_mesh_free(m);
    }
}

#[test]
fn file_round_trip() {
    let (m, _) = torus_handle();
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().join("out.ply").to_str().unwrap()).unwrap();
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(rsimp_simplify(m, 80, -1, true, ptr::null_mut(), &mut res), RsimpStatus::Ok);
        assert_eq!(rsimp_result_write(res, out.as_ptr()), RsimpStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(rsimp_mesh_read(out.as_ptr(), &mut back), RsimpStatus::Ok);
        assert_eq!(rsimp_mesh_vertex_count(back), rsimp_result_vertex_count(res));
        assert_eq!(rsimp_mesh_face_count(back), rsimp_result_face_count(res));
        rsimp_mesh_free(back);
        rsimp_result_free(res);
        rsimp_mesh_free(m);
    }
}

#[test]
fn bad_inputs_report_status() {
    unsafe {
        let mut m = ptr::null_mut();
        let missing = CString::new("/nonexistent/dir/mesh.obj").unwrap();
        assert_eq!(rsimp_mesh_read(missing.as_ptr(), &mut m), RsimpStatus::Io);
        assert!(m.is_null());
        assert!(last_error().contains("mesh.obj"));

        assert_eq!(rsimp_mesh_read(ptr::null(), &mut m), RsimpStatus::NullPointer);
        assert_eq!(rsimp_mesh_from_arrays(ptr::null(), 0, ptr::null(), 0, &mut m), RsimpStatus::EmptyInput);

        let coords = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let idx = [0u32, 1, 5];
        assert_eq!(
            rsimp_mesh_from_arrays(coords.as_ptr(), 3, idx.as_ptr(), 1, &mut m),
            RsimpStatus::IndexOutOfRange
        );
        assert!(m.is_null());

        let mut res = ptr::null_mut();
        assert_eq!(rsimp_simplify(ptr::null(), 10, -1, true, ptr::null_mut(), &mut res), RsimpStatus::NullPointer);

        assert_eq!(rsimp_mesh_vertex_count(ptr::null()), 0);
        rsimp_mesh_free(ptr::null_mut());
        rsimp_result_free(ptr::null_mut());
        rsimp_state_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(rsimp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
