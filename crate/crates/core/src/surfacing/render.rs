use alloc::vec::Vec;

use super::field::{LatentField, ScalarField};
use super::trace::{trace_field, TraceConfig};
use crate::decoder::{DecoderParams, Real};
use crate::geometry::PinholeCamera;
use crate::{Result, Vec3};
#[allow(unused_imports)] // sqrt and friends without std
use num_traits::Float;

/// Row-major grayscale image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<f32>,
}

impl Image {
    pub fn get(&self, u: u32, v: u32) -> f32 {
        self.pixels[(v * self.width + u) as usize]
    }

    /// Binary PPM (P6) with the gray value in all three channels.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = alloc::format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for &p in &self.pixels {
            let b = (p.clamp(0.0, 1.0) * 255.0).round() as u8;
            out.extend_from_slice(&[b, b, b]);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    /// Direction towards the light; `None` lights from the camera.
    pub light: Option<Vec3>,
    pub background: f32,
    pub trace: TraceConfig,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            light: None,
            background: 0.0,
            trace: TraceConfig::default(),
        }
    }
}

/// Lambertian rendering of the zero level set of any field.
pub fn render_field<F: ScalarField + ?Sized>(field: &F, camera: &PinholeCamera, cfg: &RenderConfig) -> Image {
    let w = camera.width;
    let rays: Vec<(Vec3, Vec3)> = (0..camera.height)
        .flat_map(|v| (0..w).map(move |u| (u, v)))
        .map(|(u, v)| (camera.center, camera.pixel_direction(u, v)))
        .collect();
    let hits = trace_field(field, &rays, &cfg.trace);
    let light = cfg.light.and_then(Vec3::try_normalize).unwrap_or(-camera.forward());
    let hit_points: Vec<Vec3> = hits.iter().flatten().map(|h| h.point).collect();
    let mut grads = field.gradients(&hit_points).into_iter();
    let pixels = hits
        .iter()
        .map(|h| match h {
            Some(_) => {
                let g = grads.next().expect("one gradient per hit");
                g.try_normalize().map_or(0.0, |n| n.dot(light).max(0.0) as f32)
            }
            None => cfg.background,
        })
        .collect();
    Image {
        width: w,
        height: camera.height,
        pixels,
    }
}

/// Renders the decoder surface at code `z`.
pub fn render<T: Real>(
    params: &DecoderParams<T>,
    z: &[f32],
    camera: &PinholeCamera,
    cfg: &RenderConfig,
) -> Result<Image> {
    Ok(render_field(&LatentField::new(params, z)?, camera, cfg))
}
