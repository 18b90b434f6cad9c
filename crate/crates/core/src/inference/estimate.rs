use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::observation::PartialObservation;
use crate::decoder::{DecoderParams, Network, Real};
use crate::exec::derive_seed;
use crate::sampling::SdfSample;
use crate::training::objective::{accumulate, sample_points, ShapeQuery};
use crate::training::{clamped_l1, clamped_l1_grad, AdamState};
use crate::{Error, Result, Vec3};

/// Settings for fitting a latent code to SDF samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub lambda: f64,
    pub iterations: usize,
    pub lr: f64,
    pub delta: f64,
    pub init_stddev: f64,
    /// Random subset of samples per iteration; `None` uses all of them.
    pub samples_per_iter: Option<usize>,
    pub seed: u64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            lambda: 1e-4,
            iterations: 800,
            lr: 5e-3,
            delta: 0.1,
            init_stddev: 0.01,
            samples_per_iter: None,
            seed: 0,
        }
    }
}

/// Settings for shape completion from a partial observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionConfig {
    pub eta: f64,
    pub iterations: usize,
    pub lr: f64,
    pub lambda: f64,
    pub free_points_per_ray: usize,
    pub init_stddev: f64,
    /// Random subset of observation points per iteration; `None` uses all.
    pub samples_per_iter: Option<usize>,
    /// Clamp distance at the first iteration. The clamp shrinks geometrically
    /// to `eta` over the first half of the iterations and stays there. `None`
    /// clamps at `eta` throughout, which leaves no gradient at samples whose
    /// initial prediction is further than `eta` from the surface. The default
    /// of 1 spans the whole tanh output range, so no sample starts saturated.
    pub warmup_delta: Option<f64>,
    pub seed: u64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            eta: 0.005,
            iterations: 800,
            lr: 5e-3,
            lambda: 1e-4,
            free_points_per_ray: 2,
            init_stddev: 0.01,
            samples_per_iter: None,
            warmup_delta: Some(1.0),
            seed: 0,
        }
    }
}

/// Result of a latent optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub z: Vec<f32>,
    /// Objective of the returned code over all observation points.
    pub objective: f64,
    /// Objective of every iteration, measured on that iteration's points
    /// before the update.
    pub history: Vec<f64>,
}

/// `max(0, -pred)`: penalizes predictions claiming free space is inside.
#[inline]
pub fn freespace_loss(pred: f64) -> f64 {
    (-pred).max(0.0)
}

#[inline]
fn freespace_grad(pred: f64) -> f64 {
    if pred < 0.0 {
        -1.0
    } else {
        0.0
    }
}

struct Problem<'a> {
    samples: &'a [SdfSample],
    free: &'a [Vec3],
    delta: f64,
    /// Starting clamp of the continuation towards `delta`.
    warmup_delta: Option<f64>,
    lambda: f64,
}

impl Problem<'_> {
    fn delta_at(&self, it: usize, iterations: usize) -> f64 {
        let half = iterations / 2;
        match self.warmup_delta {
            Some(d0) if it < half => {
                self.delta * num_traits::Float::powf(d0 / self.delta, 1.0 - it as f64 / half as f64)
            }
            _ => self.delta,
        }
    }

    fn len(&self) -> usize {
        self.samples.len() + self.free.len()
    }

    /// Objective and latent gradient over the points with indices `subset`
    /// (all points when `None`): SDF samples first, then free points.
    fn evaluate<T: Real>(
        &self,
        net: &Network<'_, T>,
        z: &[T],
        subset: Option<&[usize]>,
        delta: f64,
    ) -> Result<(f64, Vec<T>)> {
        let all: Vec<usize>;
        let idx = match subset {
            Some(s) => s,
            None => {
                all = (0..self.len()).collect();
                &all
            }
        };
        let points: Vec<[T; 3]> = idx
            .iter()
            .map(|&i| match i.checked_sub(self.samples.len()) {
                None => sample_points(&self.samples[i..=i])[0],
                Some(f) => self.free[f].to_array().map(T::of),
            })
            .collect();
        let w = 1.0 / idx.len() as f64;
        let g = accumulate(
            net,
            &[ShapeQuery { z, points: &points }],
            None,
            false,
            |_, j, p| match idx[j].checked_sub(self.samples.len()) {
                None => {
                    let s = self.samples[idx[j]].sdf as f64;
                    (clamped_l1(p, s, delta) * w, clamped_l1_grad(p, s, delta) * w)
                }
                Some(_) => (freespace_loss(p) * w, freespace_grad(p) * w),
            },
        )?;
        let norm2: f64 = z.iter().map(|v| v.f64() * v.f64()).sum();
        let grad = g.latent[0]
            .iter()
            .zip(z)
            .map(|(&a, &zi)| a + T::of(2.0 * self.lambda * zi.f64()))
            .collect();
        Ok((g.loss[0] + self.lambda * norm2, grad))
    }
}

#[allow(clippy::too_many_arguments)]
fn optimize<T: Real>(
    params: &DecoderParams<T>,
    problem: &Problem<'_>,
    iterations: usize,
    lr: f64,
    init_stddev: f64,
    samples_per_iter: Option<usize>,
    seed: u64,
) -> Result<Estimate> {
    let dim = params.config().latent_dim;
    if problem.samples.is_empty() {
        return Err(Error::EmptyInput("sdf samples"));
    }
    let positive = |d: f64| d.is_finite() && d > 0.0;
    if !(positive(lr) && positive(problem.delta) && problem.warmup_delta.is_none_or(positive)) {
        return Err(Error::invalid("learning rate and clamp distance must be positive"));
    }
    let normal = Normal::new(0.0, init_stddev).map_err(|_| Error::invalid("invalid latent init stddev"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<T> = (0..dim).map(|_| T::of(normal.sample(&mut rng))).collect();
    let net = Network::new(params);
    let mut adam = AdamState::new(dim);
    let mut history = Vec::with_capacity(iterations);
    let n = problem.len();
    for it in 0..iterations {
        let subset = samples_per_iter.filter(|&k| k < n).map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1, it as u64));
            let mut idx = sample(&mut rng, n, k).into_vec();
            idx.sort_unstable();
            idx
        });
        let (obj, grad) = problem.evaluate(&net, &z, subset.as_deref(), problem.delta_at(it, iterations))?;
        if !obj.is_finite() {
            return Err(Error::InferenceFault(alloc::format!(
                "non-finite objective at iteration {it}"
            )));
        }
        history.push(obj);
        adam.update(&mut z, &grad, lr)
            .map_err(|e| Error::InferenceFault(alloc::format!("{e}")))?;
    }
    let (objective, _) = problem.evaluate(&net, &z, None, problem.delta)?;
    if !objective.is_finite() {
        return Err(Error::InferenceFault("non-finite final objective".into()));
    }
    Ok(Estimate {
        z: z.iter().map(|v| v.f64() as f32).collect(),
        objective,
        history,
    })
}

/// MAP estimate of a latent code for `samples` with the decoder frozen.
pub fn estimate_latent<T: Real>(
    params: &DecoderParams<T>,
    samples: &[SdfSample],
    cfg: &EstimateConfig,
) -> Result<Estimate> {
    let problem = Problem {
        samples,
        free: &[],
        delta: cfg.delta,
        warmup_delta: None,
        lambda: cfg.lambda,
    };
    optimize(
        params,
        &problem,
        cfg.iterations,
        cfg.lr,
        cfg.init_stddev,
        cfg.samples_per_iter,
        cfg.seed,
    )
}

/// Latent code best explaining a partial observation: clamped-L1 with clamp
/// `eta` on the SDF samples plus the free-space penalty, averaged over all
/// points, plus `lambda |z|^2`. See [`CompletionConfig::warmup_delta`] for
/// the clamp schedule; the reported objective always uses `eta`.
pub fn complete_shape<T: Real>(
    params: &DecoderParams<T>,
    observation: &PartialObservation,
    cfg: &CompletionConfig,
) -> Result<Estimate> {
    if !(cfg.eta.is_finite() && cfg.eta > 0.0) {
        return Err(Error::invalid("eta must be positive"));
    }
    if cfg.iterations == 0 {
        return Err(Error::invalid("completion needs at least one iteration"));
    }
    let problem = Problem {
        samples: &observation.sdf_samples,
        free: &observation.free_points,
        delta: cfg.eta,
        warmup_delta: cfg.warmup_delta,
        lambda: cfg.lambda,
    };
    optimize(
        params,
        &problem,
        cfg.iterations,
        cfg.lr,
        cfg.init_stddev,
        cfg.samples_per_iter,
        cfg.seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::NetConfig;
    use proptest::prelude::*;

    fn samples() -> Vec<SdfSample> {
        (0..400)
            .map(|i| {
                let t = i as f64 * 0.1;
                let p = Vec3::new(t.sin(), (1.7 * t).cos(), (0.3 * t).sin()) * 0.8;
                SdfSample::new(p, p.norm() - 0.5)
            })
            .collect()
    }

    fn params() -> DecoderParams<f32> {
        DecoderParams::init(&NetConfig::new(4, 32, 3, &[]), 5).unwrap()
    }

    #[test]
    fn freespace_examples() {
        assert_eq!(freespace_loss(0.3), 0.0);
        assert!((freespace_loss(-0.2) - 0.2).abs() < 1e-15);
        assert_eq!(freespace_loss(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn freespace_is_convex(a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.0f64..1.0) {
            let mid = freespace_loss(t * a + (1.0 - t) * b);
            prop_assert!(mid <= t * freespace_loss(a) + (1.0 - t) * freespace_loss(b) + 1e-12);
            prop_assert!(freespace_loss(a.abs()) == 0.0);
        }
    }

    #[test]
    fn decoder_is_untouched_and_objective_drops() {
        let p = params();
        let before = p.checksum();
        let est = estimate_latent(
            &p,
            &samples(),
            &EstimateConfig {
                iterations: 200,
                lr: 1e-2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(p.checksum(), before);
        assert_eq!(est.history.len(), 200);
        assert!(est.objective < est.history[0]);
        assert_eq!(est.z.len(), 4);
    }

    #[test]
    fn huge_lambda_pulls_code_to_zero() {
        let cfg = EstimateConfig {
            lambda: 1e6,
            iterations: 400,
            lr: 1e-2,
            init_stddev: 1.0,
            ..Default::default()
        };
        let est = estimate_latent(&params(), &samples(), &cfg).unwrap();
        let norm: f32 = est.z.iter().map(|v| v * v).sum::<f32>().sqrt();
        assert!(norm < 1e-2, "{norm}");
    }

    #[test]
    fn clamp_schedule_ends_at_eta() {
        let problem = Problem {
            samples: &[],
            free: &[],
            delta: 0.005,
            warmup_delta: Some(0.1),
            lambda: 0.0,
        };
        assert!((problem.delta_at(0, 100) - 0.1).abs() < 1e-15);
        assert!((problem.delta_at(25, 100) - (0.1f64 * 0.005).sqrt()).abs() < 1e-12);
        for it in 50..100 {
            assert_eq!(problem.delta_at(it, 100), 0.005);
        }
        assert!((1..50).all(|it| problem.delta_at(it, 100) < problem.delta_at(it - 1, 100)));
        let fixed = Problem {
            warmup_delta: None,
            ..problem
        };
        assert_eq!(fixed.delta_at(0, 100), 0.005);
        assert_eq!(fixed.delta_at(0, 1), 0.005);
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(matches!(
            estimate_latent(&params(), &[], &EstimateConfig::default()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn completion_without_free_points_equals_estimation() {
        let p = params();
        let obs = PartialObservation {
            sdf_samples: samples(),
            free_points: Vec::new(),
            eta: 0.05,
        };
        let c = complete_shape(
            &p,
            &obs,
            &CompletionConfig {
                eta: 0.05,
                iterations: 100,
                seed: 3,
                warmup_delta: None,
                ..Default::default()
            },
        )
        .unwrap();
        let e = estimate_latent(
            &p,
            &obs.sdf_samples,
            &EstimateConfig {
                delta: 0.05,
                iterations: 100,
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((c.objective - e.objective).abs() <= 1e-4);
        assert_eq!(c.z, e.z);
    }

    #[test]
    fn free_points_add_a_penalty_term() {
        let p = params();
        let free: Vec<Vec3> = (0..50).map(|i| Vec3::splat(0.01 * i as f64)).collect();
        let obs = PartialObservation {
            sdf_samples: samples(),
            free_points: free,
            eta: 0.05,
        };
        let est = complete_shape(
            &p,
            &obs,
            &CompletionConfig {
                iterations: 50,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(est.objective.is_finite());
        let sub = complete_shape(
            &p,
            &obs,
            &CompletionConfig {
                iterations: 50,
                samples_per_iter: Some(100),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(sub.objective.is_finite());
        assert!(complete_shape(
            &p,
            &obs,
            &CompletionConfig {
                eta: 0.0,
                ..Default::default()
            }
        )
        .is_err());
    }
}
