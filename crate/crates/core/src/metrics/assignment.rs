use alloc::vec::Vec;

use crate::{Error, Result, Vec3};

/// Largest point count accepted by [`emd`] (the solver is cubic).
pub const MAX_EMD_POINTS: usize = 2000;

/// Minimum-cost perfect matching of a square cost matrix (row-major,
/// `n x n`) by the Hungarian method with potentials. Returns the column
/// assigned to each row.
pub fn optimal_assignment(n: usize, cost: &[f64]) -> Result<Vec<usize>> {
    if cost.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: cost.len(),
        });
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("assignment costs must be finite"));
    }
    // 1-based arrays; index 0 is the virtual start column.
    let mut u = alloc::vec![0.0f64; n + 1];
    let mut v = alloc::vec![0.0f64; n + 1];
    let mut row_of = alloc::vec![0usize; n + 1];
    let mut way = alloc::vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_to = alloc::vec![f64::INFINITY; n + 1];
        let mut used = alloc::vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = alloc::vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    Ok(col_of)
}

/// Earth mover's distance: the cost of the optimal bijection, as the mean
/// Euclidean distance per point.
pub fn emd(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyInput("point set"));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() > MAX_EMD_POINTS {
        return Err(Error::invalid(alloc::format!(
            "emd supports at most {MAX_EMD_POINTS} points"
        )));
    }
    let n = a.len();
    let cost: Vec<f64> = a.iter().flat_map(|p| b.iter().map(move |q| p.distance(*q))).collect();
    let col = optimal_assignment(n, &cost)?;
    Ok(col.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum::<f64>() / n as f64)
}
