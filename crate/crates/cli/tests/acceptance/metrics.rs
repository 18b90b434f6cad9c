use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdfforge::geometry::TriangleMesh;
use sdfforge::metrics::{chamfer, emd, mesh_accuracy, mesh_completion, sample_points};
use sdfforge::Vec3;

use crate::Outcome;

fn dist(a: Vec3, b: Vec3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Heap's algorithm over all n! bijections; costs summed in row order.
fn brute_force_emd(a: &[Vec3], b: &[Vec3]) -> f64 {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| dist(a[i], b[j])).sum::<f64>() / n as f64;
    let mut best = cost(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect()
}

pub fn run() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut emd_mismatch = 0;
    for k in 0..50 {
        let n = 1 + k % 6;
        let (a, b) = (cloud(&mut rng, n), cloud(&mut rng, n));
        if emd(&a, &b).unwrap() != brute_force_emd(&a, &b) {
            emd_mismatch += 1;
        }
    }

    let mut chamfer_ok = true;
    for _ in 0..20 {
        let (a, b) = (cloud(&mut rng, 300), cloud(&mut rng, 300));
        chamfer_ok &= chamfer(&a, &b).unwrap() == chamfer(&b, &a).unwrap();
        chamfer_ok &= chamfer(&a, &a).unwrap() == 0.0;
    }

    let meshes = [
        TriangleMesh::icosphere(Vec3::ZERO, 0.5, 3),
        TriangleMesh::cuboid(Vec3::new(0.4, 0.2, 0.3)),
    ];
    let (mut completion_min, mut accuracy_max) = (f64::INFINITY, 0.0f64);
    for (i, mesh) in meshes.iter().enumerate() {
        let pts: Vec<Vec3> = sample_points(mesh, 1000, i as u64)
            .unwrap()
            .into_iter()
            .map(|p| p.position)
            .collect();
        completion_min = completion_min.min(mesh_completion(mesh, &pts, 0.01).unwrap());
        accuracy_max = accuracy_max.max(mesh_accuracy(&pts, mesh).unwrap());
    }

    Outcome::new(
        emd_mismatch == 0 && chamfer_ok && completion_min == 1.0 && accuracy_max <= 1e-9,
        format!(
            "emd brute-force mismatches {emd_mismatch}/50, chamfer symmetric+zero {chamfer_ok}, \
             self completion {completion_min}, self accuracy {accuracy_max:.1e}"
        ),
    )
}
