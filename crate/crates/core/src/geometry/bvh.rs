//! Bounding volume hierarchy over mesh triangles for closest-point and ray queries.

use alloc::vec::Vec;

use super::triangle::{closest_point, ray_intersect, Triangle};
use super::{Aabb, TriangleMesh};
use crate::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    /// Leaf: first triangle in `order`; interior: index of the right child
    /// (the left child immediately follows its parent).
    start: u32,
    count: u32,
}

#[derive(Debug, Clone)]
pub struct TriangleBvh {
    nodes: Vec<Node>,
    triangles: Vec<Triangle>,
    /// Mesh triangle index of each entry of `triangles`.
    order: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestHit {
    pub distance: f64,
    pub point: Vec3,
    /// Triangle index in the source mesh.
    pub triangle: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub t: f64,
    pub triangle: usize,
}

impl TriangleBvh {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let tris: Vec<Triangle> = mesh.triangles_iter().collect();
        let mut items: Vec<(u32, Vec3, Aabb)> = tris
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let b = Aabb::EMPTY.grow(t.a).grow(t.b).grow(t.c);
                (i as u32, t.centroid(), b)
            })
            .collect();
        let mut nodes = Vec::with_capacity(2 * items.len() / LEAF_SIZE + 1);
        if !items.is_empty() {
            build(&mut items, 0, &mut nodes);
        }
        let order: Vec<u32> = items.iter().map(|e| e.0).collect();
        TriangleBvh {
            nodes,
            triangles: order.iter().map(|&i| tris[i as usize]).collect(),
            order,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Closest point on any triangle (full faces, not only vertices).
    pub fn closest(&self, q: Vec3) -> Option<ClosestHit> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best_d2 = f64::INFINITY;
        let mut best = (Vec3::ZERO, usize::MAX);
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.bounds.distance_squared(q) >= best_d2 {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for k in s..s + node.count as usize {
                    let p = closest_point(q, &self.triangles[k]);
                    let d2 = q.distance_squared(p);
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = (p, self.order[k] as usize);
                    }
                }
            } else {
                let left = ni + 1;
                let right = node.start;
                let dl = self.nodes[left as usize].bounds.distance_squared(q);
                let dr = self.nodes[right as usize].bounds.distance_squared(q);
                // Visit the nearer child first.
                if dl <= dr {
                    stack.push(right);
                    stack.push(left);
                } else {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        Some(ClosestHit {
            distance: best_d2.sqrt(),
            point: best.0,
            triangle: best.1,
        })
    }

    /// Nearest intersection with `t` in `(t_min, t_max)`; `dir` need not be unit length.
    pub fn raycast(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64) -> Option<RayHit> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<RayHit> = None;
        let mut t_best = t_max;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            match node.bounds.ray_interval(origin, inv) {
                Some((t0, t1)) if t1 >= t_min && t0 <= t_best => {}
                _ => continue,
            }
            if node.count > 0 {
                let s = node.start as usize;
                for k in s..s + node.count as usize {
                    if let Some(t) = ray_intersect(origin, dir, &self.triangles[k], t_min) {
                        let tri = self.order[k] as usize;
                        // Prefer the lower triangle index on exact ties for determinism.
                        let better = match best {
                            None => t < t_best,
                            Some(b) => t < b.t || (t == b.t && tri < b.triangle),
                        };
                        if better {
                            t_best = t;
                            best = Some(RayHit { t, triangle: tri });
                        }
                    }
                }
            } else {
                stack.push(node.start);
                stack.push(ni + 1);
            }
        }
        best
    }
}

fn build(items: &mut [(u32, Vec3, Aabb)], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let bounds = items.iter().fold(Aabb::EMPTY, |b, e| b.union(e.2));
    let me = nodes.len();
    nodes.push(Node {
        bounds,
        start: offset as u32,
        count: items.len() as u32,
    });
    if items.len() <= LEAF_SIZE {
        return me;
    }
    let cb = items.iter().fold(Aabb::EMPTY, |b, e| b.grow(e.1));
    let ext = cb.extent();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = items.len() / 2;
    items.select_nth_unstable_by(mid, |a, b| a.1[axis].total_cmp(&b.1[axis]).then(a.0.cmp(&b.0)));
    let (left, right) = items.split_at_mut(mid);
    build(left, offset, nodes);
    let r = build(right, offset + mid, nodes);
    nodes[me].start = r as u32;
    nodes[me].count = 0;
    me
}
