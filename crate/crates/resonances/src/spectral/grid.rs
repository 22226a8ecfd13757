use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Chebyshev–Gauss–Lobatto grid on [a, b] with dense differentiation
/// matrices. Node 0 is `b`, node n−1 is `a`.
#[derive(Clone, Debug)]
pub struct CollocationGrid {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
}

pub fn build_grid(n: usize, a: f64, b: f64) -> Result<CollocationGrid> {
    if n < 8 {
        return Err(Error::Config(format!("grid needs n >= 8 nodes, got {n}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!("grid needs a < b, got [{a}, {b}]")));
    }
    let deg = n - 1;
    // symmetric sine form keeps x_j = −x_{N−j} exact
    let x: Vec<f64> = (0..n)
        .map(|j| (PI * (deg as f64 - 2.0 * j as f64) / (2.0 * deg as f64)).sin())
        .collect();
    let c = |j: usize| {
        let base = if j == 0 || j == deg { 2.0 } else { 1.0 };
        if j.is_multiple_of(2) { base } else { -base }
    };
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..n {
        let s: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    let scale = 2.0 / (b - a);
    let d1 = d * scale;
    let d2 = &d1 * &d1;
    let mut nodes: Vec<f64> = x.iter().map(|&t| a + (b - a) * (t + 1.0) / 2.0).collect();
    nodes[0] = b;
    nodes[deg] = a;
    Ok(CollocationGrid { n, a, b, nodes, d1, d2 })
}
