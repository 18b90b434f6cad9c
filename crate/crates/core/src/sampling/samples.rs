use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::shell::extract_shell;
use crate::exec;
use crate::geometry::{ShellOracle, SignedDistance, TriangleMesh};
use crate::{Error, Result, Vec3};
#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;

/// Largest admissible |sdf| of a stored sample.
pub const MAX_ABS_SDF: f64 = 2.0;

/// One spatial sample: position in the normalized frame and its signed distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdfSample {
    pub position: [f32; 3],
    pub sdf: f32,
}

impl SdfSample {
    pub fn new(position: Vec3, sdf: f64) -> Self {
        SdfSample {
            position: [position.x as f32, position.y as f32, position.z as f32],
            sdf: sdf as f32,
        }
    }

    pub fn point(&self) -> Vec3 {
        Vec3::new(
            self.position[0] as f64,
            self.position[1] as f64,
            self.position[2] as f64,
        )
    }

    pub fn is_positive(&self) -> bool {
        self.sdf >= 0.0
    }
}

/// All samples of one shape, split by sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub shape_id: String,
    pub positive: Vec<SdfSample>,
    pub negative: Vec<SdfSample>,
}

impl SampleSet {
    pub fn new(shape_id: impl Into<String>, samples: impl IntoIterator<Item = SdfSample>) -> Result<Self> {
        let shape_id = shape_id.into();
        if shape_id.is_empty() {
            return Err(Error::invalid("shape id must not be empty"));
        }
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for s in samples {
            if !(s.position.iter().all(|v| v.is_finite()) && s.sdf.is_finite()) {
                return Err(Error::invalid("non-finite sample"));
            }
            if (s.sdf as f64).abs() > MAX_ABS_SDF {
                return Err(Error::invalid(alloc::format!(
                    "sample sdf {} exceeds {MAX_ABS_SDF}",
                    s.sdf
                )));
            }
            if s.is_positive() {
                positive.push(s);
            } else {
                negative.push(s);
            }
        }
        Ok(SampleSet {
            shape_id,
            positive,
            negative,
        })
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &SdfSample> {
        self.positive.iter().chain(&self.negative)
    }
}

/// Data preparation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepConfig {
    pub n_cameras: usize,
    pub depth_resolution: u32,
    /// Surface points drawn per perturbation variance.
    pub n_surface: usize,
    pub perturb_variances: Vec<f64>,
    pub n_uniform: usize,
    pub double_sided_reject_fraction: f64,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            n_cameras: 100,
            depth_resolution: 256,
            n_surface: 250_000,
            perturb_variances: alloc::vec![0.0025, 0.00025],
            n_uniform: 25_000,
            double_sided_reject_fraction: 0.02,
        }
    }
}

impl PrepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cameras == 0 || self.depth_resolution == 0 {
            return Err(Error::invalid("need at least one camera and one pixel"));
        }
        if self.perturb_variances.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("perturbation variances must be finite and non-negative"));
        }
        if self.n_uniform + self.n_surface * self.perturb_variances.len() == 0 {
            return Err(Error::invalid("configuration yields no samples"));
        }
        if !(0.0..=1.0).contains(&self.double_sided_reject_fraction) {
            return Err(Error::invalid("double-sided threshold must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        self.n_surface * self.perturb_variances.len() + self.n_uniform
    }
}

fn uniform_in_unit_ball<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let p = Vec3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        if p.norm_squared() <= 1.0 {
            return p;
        }
    }
}

/// Sample positions: for each variance, `n_surface` area-weighted surface
/// points with isotropic Gaussian offsets, then `n_uniform` points in the unit ball.
pub fn sample_positions<R: Rng + ?Sized>(mesh: &TriangleMesh, config: &PrepConfig, rng: &mut R) -> Result<Vec<Vec3>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.sample_count());
    for &var in &config.perturb_variances {
        let noise = Normal::new(0.0, var.sqrt()).map_err(|e| Error::invalid(alloc::format!("{e}")))?;
        for p in mesh.sample_surface(config.n_surface, rng)? {
            let offset = Vec3::new(noise.sample(rng), noise.sample(rng), noise.sample(rng));
            out.push(p.position + offset);
        }
    }
    for _ in 0..config.n_uniform {
        out.push(uniform_in_unit_ball(rng));
    }
    Ok(out)
}

/// Draws sample positions on `mesh` and labels them with `surface`.
pub fn generate_samples_with<S: SignedDistance + Sync + ?Sized>(
    mesh: &TriangleMesh,
    surface: &S,
    shape_id: &str,
    config: &PrepConfig,
    seed: u64,
) -> Result<SampleSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = sample_positions(mesh, config, &mut rng)?;
    let sdf = exec::map_range(positions.len(), |i| surface.signed_distance(positions[i]));
    let samples = positions
        .iter()
        .zip(sdf)
        .map(|(&p, s)| SdfSample::new(p, s.clamp(-MAX_ABS_SDF, MAX_ABS_SDF)));
    SampleSet::new(shape_id, samples)
}

/// Full preparation of a normalized mesh: shell extraction, then samples
/// labeled against the shell.
pub fn generate_samples(mesh: &TriangleMesh, shape_id: &str, config: &PrepConfig, seed: u64) -> Result<SampleSet> {
    let shell = extract_shell(mesh, config)?;
    let oracle = ShellOracle::new(shell.points)?;
    generate_samples_with(mesh, &oracle, shape_id, config, seed)
}
