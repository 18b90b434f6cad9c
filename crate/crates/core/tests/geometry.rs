use proptest::prelude::*;
use sdfforge::geometry::{closest_point, ray_intersect, KdTree3, PinholeCamera, TriangleBvh, TriangleMesh};
use sdfforge::sampling::render_depth;
use sdfforge::Vec3;

fn point() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn blob() -> TriangleMesh {
    // An icosphere squashed along two axes: convex but not symmetric.
    let ico = TriangleMesh::icosphere(Vec3::new(0.1, -0.05, 0.0), 0.6, 2);
    let vertices = ico
        .vertices
        .iter()
        .map(|v| Vec3::new(v.x, 0.7 * v.y, 0.5 * v.z))
        .collect();
    TriangleMesh::new(vertices, ico.triangles).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kdtree_nearest_matches_scan(points in prop::collection::vec(point(), 1..200), q in point()) {
        let nn = KdTree3::new(&points).nearest(q).unwrap();
        let best = points.iter().map(|p| (*p - q).norm_squared()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(nn.distance_squared, best);
        prop_assert_eq!((points[nn.index] - q).norm_squared(), best);
    }

    #[test]
    fn bvh_closest_matches_scan(q in point()) {
        let mesh = blob();
        let hit = TriangleBvh::new(&mesh).closest(q).unwrap();
        let best = mesh.triangles_iter().map(|t| (closest_point(q, &t) - q).norm()).fold(f64::INFINITY, f64::min);
        prop_assert!((hit.distance - best).abs() <= 1e-12);
    }

    #[test]
    fn bvh_raycast_matches_scan(o in point(), target in point()) {
        let mesh = blob();
        let origin = o * 2.5;
        let Some(dir) = (target - origin).try_normalize() else { return Ok(()) };
        let scan = mesh.triangles_iter().filter_map(|t| ray_intersect(origin, dir, &t, 0.0)).fold(f64::INFINITY, f64::min);
        match TriangleBvh::new(&mesh).raycast(origin, dir, 0.0, f64::INFINITY) {
            Some(hit) => prop_assert!((hit.t - scan).abs() <= 1e-12),
            None => prop_assert!(scan.is_infinite()),
        }
    }
}

#[test]
fn depth_points_lie_on_the_mesh() {
    let mesh = blob();
    let camera = PinholeCamera::look_at(Vec3::new(0.4, 0.9, 1.8), Vec3::ZERO, 0.9, 40, 30).unwrap();
    let map = render_depth(&mesh, &camera);
    let bvh = TriangleBvh::new(&mesh);
    assert!(map.hit_count() > 100, "{}", map.hit_count());
    for i in map.hits() {
        let p = map.point(i);
        assert!(bvh.closest(p).unwrap().distance < 1e-9);
        // Depth is measured along the optical axis.
        assert!((camera.world_to_camera(p).z - map.depth[i]).abs() < 1e-9);
        // Normals face the camera.
        assert!(map.normals[i].dot(camera.center - p) > 0.0);
    }
}
