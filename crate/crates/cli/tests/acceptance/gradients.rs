use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdfforge::decoder::{backward, forward, DecoderParams, Mode, NetConfig};

use crate::Outcome;

const H: f64 = 1e-5;
const TOL: f64 = 1e-5;
/// Relative errors are taken against max(|analytic|, |numeric|, FLOOR).
const FLOOR: f64 = 1e-4;

fn eval(p: &DecoderParams<f64>, z: &[f64], x: [f64; 3]) -> (f64, Vec<bool>) {
    let (y, tape) = forward(p, z, x, Mode::Eval).unwrap();
    (y, tape.active_units().collect())
}

/// Worst relative error over every parameter, latent and input component,
/// plus the number of components skipped because the step crossed a ReLU kink.
fn worst_error(p: &DecoderParams<f64>, z: &[f64], x: [f64; 3]) -> (f64, usize, usize) {
    let (_, tape) = forward(p, z, x, Mode::Eval).unwrap();
    let pattern: Vec<bool> = tape.active_units().collect();
    let g = backward(p, &tape, 1.0).unwrap();
    let (mut worst, mut skipped, mut checked) = (0.0f64, 0, 0);
    let mut check = |analytic: f64, plus: (f64, Vec<bool>), minus: (f64, Vec<bool>)| {
        if plus.1 != pattern || minus.1 != pattern {
            skipped += 1;
            return;
        }
        checked += 1;
        let numeric = (plus.0 - minus.0) / (2.0 * H);
        worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FLOOR));
    };
    for i in 0..p.len() {
        let mut q = p.clone();
        q.as_mut_slice()[i] += H;
        let plus = eval(&q, z, x);
        q.as_mut_slice()[i] -= 2.0 * H;
        check(g.params[i], plus, eval(&q, z, x));
    }
    for i in 0..z.len() {
        let mut zp = z.to_vec();
        zp[i] += H;
        let plus = eval(p, &zp, x);
        zp[i] -= 2.0 * H;
        check(g.latent(0)[i], plus, eval(p, &zp, x));
    }
    for i in 0..3 {
        let mut xp = x;
        xp[i] += H;
        let plus = eval(p, z, xp);
        xp[i] -= 2.0 * H;
        check(g.spatial(0)[i], plus, eval(p, z, xp));
    }
    (worst, skipped, checked)
}

pub fn run() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut skipped, mut checked) = (0.0f64, 0, 0);
    for _ in 0..100 {
        let latent = rng.random_range(1..=8);
        let layers = rng.random_range(2..=4);
        let hidden = rng.random_range(latent + 4..=64);
        let skip: Vec<usize> = if layers >= 3 && rng.random_bool(0.5) {
            vec![rng.random_range(2..layers)]
        } else {
            vec![]
        };
        let cfg = NetConfig::new(latent, hidden, layers, &skip);
        let mut p = DecoderParams::<f64>::init(&cfg, rng.random()).unwrap();
        for l in p.layers().to_vec() {
            for i in l.g_range().chain(l.b_range()) {
                p.as_mut_slice()[i] += rng.random_range(-0.3..0.3);
            }
        }
        let z: Vec<f64> = (0..latent).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = [0; 3].map(|_| rng.random_range(-1.0..1.0));
        let (w, s, c) = worst_error(&p, &z, x);
        worst = worst.max(w);
        skipped += s;
        checked += c;
    }
    Outcome::new(
        worst <= TOL && skipped * 1000 <= checked,
        format!(
            "max relative error {worst:.2e} over {checked} components in 100 nets ({skipped} kink crossings skipped)"
        ),
    )
    .within(30.0)
}
