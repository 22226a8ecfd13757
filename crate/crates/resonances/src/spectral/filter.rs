use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pencil::{Spectrum, SpectrumEntry};
use crate::{Error, Result};

/// Trust region {|λ| ≤ radius, Im λ ≥ −gamma}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub radius: f64,
    pub gamma: f64,
}

impl Window {
    pub fn strip(gamma: f64) -> Self {
        Self { radius: f64::INFINITY, gamma }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() <= self.radius && z.im >= -self.gamma
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterOptions {
    pub drift_tol: f64,
    pub residual_tol: f64,
    /// Eigenvalues closer than this (relative) are treated as one split
    /// defective eigenvalue when their individual drifts fail.
    pub split_tol: f64,
    pub max_cluster: usize,
    pub window: Window,
}

impl Default for FilterOptions {
    fn default() -> Self {
        Self { drift_tol: 1e-7, residual_tol: 1e-8, split_tol: 1e-3, max_cluster: 4, window: Window::strip(f64::INFINITY) }
    }
}

fn rel(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / z.norm().max(1.0)
}

fn nearest(values: &[Complex64], z: Complex64) -> Option<(usize, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(i, &w)| (i, (w - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Single-linkage groups of `values` with link length `split_tol·max(1,|z|)`.
fn link_clusters(values: &[Complex64], split_tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut j = i;
        while label[j] != r {
            let next = label[j];
            label[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if rel(values[i], values[j]) <= split_tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut label, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn centroid(values: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| values[i]).sum::<Complex64>() / idx.len() as f64
}

/// Keeps eigenvalues of `high` that persist in `low` within `drift_tol`.
///
/// Entries of the returned spectrum come from `high` restricted to the
/// window. Defective eigenvalues that split differently at the two
/// resolutions are accepted through their cluster centroids.
pub fn filter_spectrum(low: &Spectrum, high: &Spectrum, opts: &FilterOptions) -> Result<Spectrum> {
    if low.resolution() == high.resolution() {
        return Err(Error::Misuse(format!("both spectra have resolution {}", low.resolution())));
    }
    let lo: Vec<Complex64> = low.entries.iter().map(|e| e.lambda).collect();
    let hi: Vec<Complex64> = high.entries.iter().map(|e| e.lambda).collect();
    let mut out: Vec<SpectrumEntry> = high.entries.clone();
    for e in &mut out {
        e.accepted = false;
        e.drift = None;
    }

    for (ih, e) in out.iter_mut().enumerate() {
        let z = e.lambda;
        if !opts.window.contains(z) {
            continue;
        }
        let Some((il, _)) = nearest(&lo, z) else { continue };
        let Some((back, _)) = nearest(&hi, lo[il]) else { continue };
        if back != ih {
            continue;
        }
        let close = lo.iter().filter(|&&w| rel(z, w) < opts.drift_tol).count();
        if close > 1 {
            continue;
        }
        let d = rel(z, lo[il]);
        if d < opts.drift_tol && e.residual < opts.residual_tol {
            e.accepted = true;
            e.drift = Some(d);
        }
    }

    let hi_groups = link_clusters(&hi, opts.split_tol);
    let lo_groups = link_clusters(&lo, opts.split_tol);
    let lo_centroids: Vec<Complex64> = lo_groups.iter().map(|g| centroid(&lo, g)).collect();
    let hi_centroids: Vec<Complex64> = hi_groups.iter().map(|g| centroid(&hi, g)).collect();
    for (gi, group) in hi_groups.iter().enumerate() {
        if group.len() < 2 || group.len() > opts.max_cluster {
            continue;
        }
        let ch = hi_centroids[gi];
        if !opts.window.contains(ch) || group.iter().all(|&i| out[i].accepted) {
            continue;
        }
        let Some((li, _)) = nearest(&lo_centroids, ch) else { continue };
        if lo_groups[li].len() != group.len() {
            continue;
        }
        let Some((back, _)) = nearest(&hi_centroids, lo_centroids[li]) else { continue };
        if back != gi {
            continue;
        }
        let d = rel(ch, lo_centroids[li]);
        let worst = group.iter().map(|&i| out[i].residual).fold(0.0, f64::max);
        if d < opts.drift_tol && worst < opts.residual_tol {
            for &i in group {
                out[i].lambda = ch;
                out[i].accepted = true;
                out[i].drift = Some(d);
            }
        }
    }

    let mut spec = Spectrum { entries: out.into_iter().filter(|e| opts.window.contains(e.lambda)).collect() };
    spec.sort();
    Ok(spec)
}

/// Accepted eigenvalues whose mirror image −λ̄ is missing (same mode and
/// boundary condition); zero modes are skipped.
pub fn check_pairing(spec: &Spectrum, pair_tol: f64) -> Vec<SpectrumEntry> {
    let acc: Vec<&SpectrumEntry> = spec.accepted().filter(|e| !e.zero_mode).collect();
    acc.iter()
        .filter(|e| {
            let target = -e.lambda.conj();
            !acc.iter().any(|w| {
                w.mode_index == e.mode_index && w.bc == e.bc && (w.lambda - target).norm() <= pair_tol * e.lambda.norm().max(1.0)
            })
        })
        .map(|e| (*e).clone())
        .collect()
}
