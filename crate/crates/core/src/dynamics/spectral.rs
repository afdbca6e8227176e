use serde::Serialize;

use super::DynamicsError;
use crate::horoprod::HoroWindow;

pub const MAX_POWER_ITERATIONS: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// Lower bound on the spectral radius of the infinite graph.
    pub rho: f64,
    pub iterations: u32,
    pub interior: usize,
    pub tol: f64,
    pub bound: &'static str,
}

/// Top eigenvalue of the walk operator killed outside the interior.
///
/// Iterates `S = D^{-1/2} A_I D^{-1/2}`, which is similar to the killed
/// transition matrix, from the indicator of the origin (or of the first
/// interior vertex if the origin is not interior). The estimate `‖S w‖` for
/// unit `w = S^k e / ‖S^k e‖` is nondecreasing in `k` and never exceeds the top
/// eigenvalue, also on bipartite windows where `±ρ` are both eigenvalues.
pub fn dirichlet_spectral_radius(
    w: &HoroWindow,
    tol: f64,
) -> Result<SpectralEstimate, DynamicsError> {
    let n = w.len();
    let mut local = vec![u32::MAX; n];
    let mut interior = Vec::new();
    for id in 0..n as u32 {
        if w.is_interior(id) {
            local[id as usize] = interior.len() as u32;
            interior.push(id);
        }
    }
    if interior.is_empty() {
        return Err(DynamicsError::EmptyInterior);
    }
    let inv_sqrt_deg: Vec<f64> = interior
        .iter()
        .map(|&id| 1.0 / f64::from(w.degree_of(id)).sqrt())
        .collect();
    let mut start = vec![0u32];
    let mut cols = Vec::new();
    for &id in &interior {
        cols.extend(
            w.neighbors(id)
                .iter()
                .map(|&u| local[u as usize])
                .filter(|&u| u != u32::MAX),
        );
        start.push(cols.len() as u32);
    }
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..x.len() {
            let row = &cols[start[i] as usize..start[i + 1] as usize];
            let s: f64 = row
                .iter()
                .map(|&j| x[j as usize] * inv_sqrt_deg[j as usize])
                .sum();
            y[i] = s * inv_sqrt_deg[i];
        }
    };
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();

    let m = interior.len();
    let mut x = vec![0.0; m];
    let first = if w.is_interior(w.origin()) {
        local[w.origin() as usize]
    } else {
        0
    };
    x[first as usize] = 1.0;
    let mut y = vec![0.0; m];
    let mut rho = 0.0;
    let mut last_change = f64::INFINITY;
    for it in 1..=MAX_POWER_ITERATIONS {
        apply(&x, &mut y);
        let est = norm(&y);
        if est == 0.0 {
            return Ok(report(0.0, it, m, tol));
        }
        last_change = (est - rho).abs() / est;
        rho = est;
        y.iter_mut().for_each(|v| *v /= est);
        std::mem::swap(&mut x, &mut y);
        if last_change < tol {
            return Ok(report(rho, it, m, tol));
        }
    }
    Err(DynamicsError::NoConvergence {
        iterations: MAX_POWER_ITERATIONS,
        last_change,
    })
}

fn report(rho: f64, iterations: u32, interior: usize, tol: f64) -> SpectralEstimate {
    SpectralEstimate {
        rho,
        iterations,
        interior,
        tol,
        bound: "lower bound on the spectral radius",
    }
}
