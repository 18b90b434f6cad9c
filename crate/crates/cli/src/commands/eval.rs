use serde_json::{Map, Value};

use sdfforge::derive_seed;
use sdfforge::geometry::TriangleMesh;
use sdfforge::metrics::{
    chamfer, cosine_similarity, emd, mesh_accuracy, mesh_completion, sample_points, MAX_EMD_POINTS,
};
use sdfforge::Vec3;

use crate::cli::EvalArgs;
use crate::error::{CliError, CliResult};
use crate::runtime;

/// Which metrics to compute and with how many points.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRequest {
    pub metrics: Vec<String>,
    pub n_chamfer: usize,
    pub n_emd: usize,
    pub n_acc: usize,
    pub n_comp: usize,
    pub n_cos: usize,
    pub comp_delta: f64,
}

const KNOWN: [&str; 5] = ["chamfer", "emd", "acc", "comp", "cos"];

fn positions(mesh: &TriangleMesh, n: usize, seed: u64) -> CliResult<Vec<Vec3>> {
    Ok(sample_points(mesh, n, seed)?.into_iter().map(|p| p.position).collect())
}

/// Metric values keyed by name. Metrics that need points on the generated
/// mesh are `null` when it is empty.
pub fn evaluate_meshes(
    gen: &TriangleMesh,
    gt: &TriangleMesh,
    req: &MetricRequest,
    seed: u64,
) -> CliResult<Map<String, Value>> {
    if let Some(bad) = req.metrics.iter().find(|m| !KNOWN.contains(&m.as_str())) {
        return Err(CliError::Config(format!(
            "unknown metric {bad:?} (expected one of {})",
            KNOWN.join(", ")
        )));
    }
    if req.metrics.iter().any(|m| m == "emd") && req.n_emd > MAX_EMD_POINTS {
        return Err(CliError::Config(format!("--n-emd is limited to {MAX_EMD_POINTS}")));
    }
    if gt.is_empty() {
        return Err(CliError::Data("ground-truth mesh is empty".into()));
    }
    let gen_empty = gen.is_empty() || gen.surface_area() <= 0.0;
    let mut out = Map::new();
    for (k, name) in req.metrics.iter().enumerate() {
        let s = |side: u64| derive_seed(seed, k as u64, side);
        let value = match name.as_str() {
            "comp" => Some(mesh_completion(gen, &positions(gt, req.n_comp, s(1))?, req.comp_delta)?),
            _ if gen_empty => None,
            "chamfer" => Some(chamfer(
                &positions(gen, req.n_chamfer, s(0))?,
                &positions(gt, req.n_chamfer, s(1))?,
            )?),
            "emd" => Some(emd(
                &positions(gen, req.n_emd, s(0))?,
                &positions(gt, req.n_emd, s(1))?,
            )?),
            "acc" => Some(mesh_accuracy(&positions(gen, req.n_acc, s(0))?, gt)?),
            "cos" => Some(cosine_similarity(gen, &sample_points(gt, req.n_cos, s(1))?)?),
            _ => unreachable!(),
        };
        out.insert(name.clone(), value.map_or(Value::Null, Value::from));
    }
    Ok(out)
}

pub fn eval(a: EvalArgs) -> CliResult<()> {
    let gen = runtime::read_mesh(&a.gen)?;
    let gt = runtime::read_mesh(&a.gt)?;
    let req = MetricRequest {
        metrics: a.metrics,
        n_chamfer: a.n_chamfer,
        n_emd: a.n_emd,
        n_acc: a.n_acc,
        n_comp: a.n_comp,
        n_cos: a.n_cos,
        comp_delta: a.comp_delta,
    };
    let values = evaluate_meshes(&gen, &gt, &req, a.common.seed())?;
    println!("{}", Value::Object(values));
    Ok(())
}
