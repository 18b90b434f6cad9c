use alloc::vec::Vec;

use super::field::{LatentField, ScalarField};
use crate::decoder::{DecoderParams, Real};
use crate::geometry::Aabb;
use crate::{Result, Vec3};

/// Half extent of the cube outside which rays are considered missed.
pub const TRACE_BOUNDS: f64 = 1.2;

/// Bisection steps used to resolve an overshoot into the inside.
const BISECTION_STEPS: usize = 60;

/// Newton steps along the ray that move a hit towards the zero crossing.
const REFINE_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    pub max_steps: usize,
    pub surface_eps: f64,
    /// Smallest step taken while the field is above `surface_eps`.
    pub min_step: f64,
    /// Largest step; the learned field is only metric inside the clamp band.
    pub max_step: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            max_steps: 200,
            surface_eps: 1e-3,
            min_step: 1e-4,
            max_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceHit {
    pub point: Vec3,
    /// Distance along the normalized ray direction.
    pub t: f64,
    /// Field evaluations spent on this ray.
    pub steps: usize,
}

struct RayState {
    origin: Vec3,
    dir: Vec3,
    t: f64,
    t_end: f64,
    /// Last position with field above the threshold, if any.
    prev: Option<f64>,
    steps: usize,
}

/// Sphere traces all rays in lockstep so each iteration is one batched field evaluation.
pub fn trace_field<F: ScalarField + ?Sized>(
    field: &F,
    rays: &[(Vec3, Vec3)],
    cfg: &TraceConfig,
) -> Vec<Option<TraceHit>> {
    let mut out = alloc::vec![None; rays.len()];
    let bounds = Aabb::cube(TRACE_BOUNDS);
    let mut active: Vec<(usize, RayState)> = Vec::new();
    for (r, &(origin, dir)) in rays.iter().enumerate() {
        let Some(dir) = dir.try_normalize() else { continue };
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        if let Some((t0, t1)) = bounds.ray_interval(origin, inv) {
            let t = t0.max(0.0);
            if t <= t1 {
                active.push((
                    r,
                    RayState {
                        origin,
                        dir,
                        t,
                        t_end: t1,
                        prev: None,
                        steps: 0,
                    },
                ));
            }
        }
    }
    let eps = cfg.surface_eps;
    let mut overshoot = Vec::new();
    while !active.is_empty() {
        let points: Vec<Vec3> = active.iter().map(|(_, s)| s.origin + s.dir * s.t).collect();
        let values = field.values(&points);
        let mut next = Vec::with_capacity(active.len());
        for ((r, mut s), f) in active.into_iter().zip(values) {
            s.steps += 1;
            if f <= eps {
                if f >= -eps {
                    out[r] = Some(TraceHit {
                        point: s.origin + s.dir * s.t,
                        t: s.t,
                        steps: s.steps,
                    });
                } else if s.prev.is_some() {
                    overshoot.push((r, s));
                }
                continue;
            }
            s.prev = Some(s.t);
            s.t += f.clamp(cfg.min_step, cfg.max_step);
            if s.t <= s.t_end && s.steps < cfg.max_steps {
                next.push((r, s));
            }
        }
        active = next;
    }
    for (r, s) in overshoot {
        out[r] = bisect(field, s, eps);
    }
    refine(field, rays, &mut out, eps);
    out
}

/// Stopping at `|f| <= eps` leaves hits up to `eps / cos` in front of the
/// surface. Newton steps on `t` along the ray remove that bias; a step is
/// kept only if it lowers `|f|`, so every hit still satisfies the threshold.
fn refine<F: ScalarField + ?Sized>(field: &F, rays: &[(Vec3, Vec3)], out: &mut [Option<TraceHit>], eps: f64) {
    let idx: Vec<usize> = (0..out.len()).filter(|&r| out[r].is_some()).collect();
    if idx.is_empty() {
        return;
    }
    let dirs: Vec<Vec3> = idx.iter().map(|&r| rays[r].1.normalize()).collect();
    let mut values = field.values(&idx.iter().map(|&r| out[r].unwrap().point).collect::<Vec<_>>());
    for _ in 0..REFINE_STEPS {
        let points: Vec<Vec3> = idx.iter().map(|&r| out[r].unwrap().point).collect();
        let grads = field.gradients(&points);
        let proposals: Vec<Option<f64>> = idx
            .iter()
            .zip(&dirs)
            .zip(grads.iter().zip(&values))
            .map(|((&r, &d), (g, &f))| {
                let slope = g.dot(d);
                (slope < -1e-3).then(|| out[r].unwrap().t + (-f / slope).clamp(-4.0 * eps, 4.0 * eps))
            })
            .collect();
        let trial: Vec<Vec3> = idx
            .iter()
            .zip(&dirs)
            .zip(&proposals)
            .map(|((&r, &d), t)| t.map_or(out[r].unwrap().point, |t| rays[r].0 + d * t))
            .collect();
        let trial_values = field.values(&trial);
        for k in 0..idx.len() {
            let hit = out[idx[k]].as_mut().unwrap();
            hit.steps += 1;
            if let Some(t) = proposals[k] {
                if trial_values[k].abs() < values[k].abs() {
                    *hit = TraceHit {
                        point: trial[k],
                        t,
                        steps: hit.steps,
                    };
                    values[k] = trial_values[k];
                }
            }
        }
    }
}

fn bisect<F: ScalarField + ?Sized>(field: &F, mut s: RayState, eps: f64) -> Option<TraceHit> {
    let (mut lo, mut hi) = (s.prev?, s.t);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let p = s.origin + s.dir * mid;
        let f = field.values(&[p])[0];
        s.steps += 1;
        if f.abs() <= eps {
            return Some(TraceHit {
                point: p,
                t: mid,
                steps: s.steps,
            });
        }
        if f > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// Traces one ray against the decoder surface at code `z`.
pub fn sphere_trace<T: Real>(
    params: &DecoderParams<T>,
    z: &[f32],
    origin: Vec3,
    dir: Vec3,
    cfg: &TraceConfig,
) -> Result<Option<TraceHit>> {
    Ok(sphere_trace_batch(params, z, &[(origin, dir)], cfg)?[0])
}

/// Traces many rays against the decoder surface at code `z`.
pub fn sphere_trace_batch<T: Real>(
    params: &DecoderParams<T>,
    z: &[f32],
    rays: &[(Vec3, Vec3)],
    cfg: &TraceConfig,
) -> Result<Vec<Option<TraceHit>>> {
    Ok(trace_field(&LatentField::new(params, z)?, rays, cfg))
}
