//! Static 3-d tree over a point list for exact nearest-neighbor queries.

use alloc::vec::Vec;

use crate::Vec3;

const LEAF_SIZE: usize = 8;

/// Balanced, implicit k-d tree. Node `mid` of a range splits it on `axes[mid]`.
#[derive(Debug, Clone)]
pub struct KdTree3 {
    points: Vec<Vec3>,
    /// Original index of each stored point.
    index: Vec<u32>,
    axes: Vec<u8>,
}

/// Result of a nearest-neighbor query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Index into the point list the tree was built from.
    pub index: usize,
    pub distance_squared: f64,
}

impl KdTree3 {
    pub fn new(points: &[Vec3]) -> Self {
        assert!(points.len() < u32::MAX as usize, "too many points for KdTree3");
        let mut order: Vec<(Vec3, u32)> = points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let mut axes = alloc::vec![0u8; points.len()];
        build(&mut order, &mut axes);
        KdTree3 {
            points: order.iter().map(|e| e.0).collect(),
            index: order.iter().map(|e| e.1).collect(),
            axes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact nearest neighbor; ties go to the lowest original index.
    pub fn nearest(&self, q: Vec3) -> Option<Neighbor> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, u32::MAX);
        self.search(q, 0, self.points.len(), &mut best);
        Some(Neighbor {
            index: best.1 as usize,
            distance_squared: best.0,
        })
    }

    fn search(&self, q: Vec3, lo: usize, hi: usize, best: &mut (f64, u32)) {
        if hi - lo <= LEAF_SIZE {
            for i in lo..hi {
                self.offer(q, i, best);
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = self.axes[mid] as usize;
        let diff = q[axis] - self.points[mid][axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, best);
        self.offer(q, mid, best);
        // `<=` keeps equal-distance candidates with lower indices reachable.
        if diff * diff <= best.0 {
            self.search(q, far.0, far.1, best);
        }
    }

    #[inline]
    fn offer(&self, q: Vec3, i: usize, best: &mut (f64, u32)) {
        let d = q.distance_squared(self.points[i]);
        let idx = self.index[i];
        if d < best.0 || (d == best.0 && idx < best.1) {
            *best = (d, idx);
        }
    }
}

fn build(items: &mut [(Vec3, u32)], axes: &mut [u8]) {
    if items.len() <= LEAF_SIZE {
        return;
    }
    let mut lo = Vec3::splat(f64::INFINITY);
    let mut hi = Vec3::splat(f64::NEG_INFINITY);
    for (p, _) in items.iter() {
        lo = lo.min(*p);
        hi = hi.max(*p);
    }
    let ext = hi - lo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = items.len() / 2;
    items.select_nth_unstable_by(mid, |a, b| a.0[axis].total_cmp(&b.0[axis]));
    axes[mid] = axis as u8;
    let (left, rest) = items.split_at_mut(mid);
    let (left_axes, rest_axes) = axes.split_at_mut(mid);
    build(left, left_axes);
    build(&mut rest[1..], &mut rest_axes[1..]);
}
