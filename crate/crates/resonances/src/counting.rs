//! Multiplicity clustering, counting functions, growth exponents and the
//! pseudopole lattice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{Bc, Spectrum, Window};
use crate::{Error, Result};

/// How per-mode eigenvalues are weighted when aggregated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Spherical-harmonic degeneracy 2ℓ + 1, ℓ the mode index.
    Sds,
    /// Weight 2 for m ≠ 0 when only m ≥ 0 was computed.
    FunnelFolded,
    Unit,
}

impl Weighting {
    pub fn weight(self, mode_index: i64) -> u64 {
        match self {
            Weighting::Sds => 2 * mode_index.unsigned_abs() + 1,
            Weighting::FunnelFolded if mode_index != 0 => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub lambda: Complex64,
    pub multiplicity: u32,
    pub weight: u64,
    pub mode_index: i64,
    pub bc: Option<Bc>,
}

impl Resonance {
    /// Multiplicity times degeneracy weight.
    pub fn count(&self) -> u64 {
        self.multiplicity as u64 * self.weight
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Clustered {
    pub resonances: Vec<Resonance>,
    pub warnings: Vec<String>,
}

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

fn rel_dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Single-linkage clusters of accepted nonzero eigenvalues per
/// (mode, bc); a cluster of size k is one resonance of multiplicity k.
pub fn cluster_multiplicities(spec: &Spectrum, cluster_tol: f64, weighting: Weighting) -> Clustered {
    let mut out = Clustered::default();
    let mut groups: Vec<((i64, Option<Bc>), Vec<Complex64>)> = Vec::new();
    for e in spec.accepted().filter(|e| !e.zero_mode) {
        let key = (e.mode_index, e.bc);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(e.lambda),
            None => groups.push((key, vec![e.lambda])),
        }
    }
    for ((mode_index, bc), zs) in groups {
        let n = zs.len();
        let mut label: Vec<usize> = (0..n).collect();
        fn find(l: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while l[r] != r {
                r = l[r];
            }
            l[i] = r;
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if rel_dist(zs[i], zs[j]) <= cluster_tol {
                    let (a, b) = (find(&mut label, i), find(&mut label, j));
                    label[a.max(b)] = a.min(b);
                }
            }
        }
        let mut clusters: Vec<Vec<Complex64>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..n {
            let r = find(&mut label, i);
            match roots.iter().position(|&x| x == r) {
                Some(k) => clusters[k].push(zs[i]),
                None => {
                    roots.push(r);
                    clusters.push(vec![zs[i]]);
                }
            }
        }
        let diam = |c: &[Complex64]| {
            c.iter().flat_map(|a| c.iter().map(move |b| rel_dist(*a, *b))).fold(0.0, f64::max)
        };
        for (a, ca) in clusters.iter().enumerate() {
            for cb in clusters.iter().skip(a + 1) {
                let gap = ca
                    .iter()
                    .flat_map(|x| cb.iter().map(move |y| rel_dist(*x, *y)))
                    .fold(f64::INFINITY, f64::min);
                let d = diam(ca).max(diam(cb));
                if d > 0.0 && gap <= 2.0 * d {
                    out.warnings.push(format!(
                        "mode {mode_index}: cluster diameter {d:.3e} within 2x of gap {gap:.3e}"
                    ));
                }
            }
        }
        for c in clusters {
            let sum: Complex64 = c.iter().sum();
            out.resonances.push(Resonance {
                lambda: sum / c.len() as f64,
                multiplicity: c.len() as u32,
                weight: weighting.weight(mode_index),
                mode_index,
                bc,
            });
        }
    }
    out.resonances.sort_by(|a, b| {
        a.mode_index
            .cmp(&b.mode_index)
            .then(a.bc.cmp(&b.bc))
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// |λ| ≤ r.
    Disk,
    /// |λ| ≤ r and Im λ ≥ −gamma.
    Strip { gamma: f64 },
}

impl Region {
    pub fn contains(&self, z: Complex64, r: f64) -> bool {
        z.norm() <= r
            && match *self {
                Region::Disk => true,
                Region::Strip { gamma } => z.im >= -gamma,
            }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingCurve {
    pub radii: Vec<f64>,
    pub counts: Vec<u64>,
    pub region: Region,
}

/// Weighted counts N(r) at each radius. Refuses any part of the region
/// outside `trust`.
pub fn counting_curve(res: &[Resonance], region: Region, radii: &[f64], trust: &Window) -> Result<CountingCurve> {
    if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::Config("radii must be nonnegative and strictly increasing".into()));
    }
    let r_max = radii.last().copied().unwrap_or(0.0);
    if r_max > trust.radius {
        return Err(Error::Refused(format!("radius {r_max} exceeds the trusted radius {}", trust.radius)));
    }
    let depth = match region {
        Region::Disk => r_max,
        Region::Strip { gamma } => gamma.min(r_max),
    };
    if depth > trust.gamma {
        return Err(Error::Refused(format!(
            "region reaches Im = -{depth}, below the trusted strip Im >= -{}",
            trust.gamma
        )));
    }
    let counts = radii
        .iter()
        .map(|&r| res.iter().filter(|z| region.contains(z.lambda, r)).map(Resonance::count).sum())
        .collect();
    Ok(CountingCurve { radii: radii.to_vec(), counts, region })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Least-squares slope of log N against log r over [r_min, r_max].
pub fn fit_exponent(curve: &CountingCurve, r_min: f64, r_max: f64) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = curve
        .radii
        .iter()
        .zip(&curve.counts)
        .filter(|(r, c)| **r >= r_min && **r <= r_max && **r > 0.0 && **c >= 1)
        .map(|(r, c)| (r.ln(), (*c as f64).ln()))
        .collect();
    let n = pts.len();
    if n < 6 {
        return Err(Error::InsufficientData(format!(
            "{n} radii with nonzero counts in [{r_min}, {r_max}], need at least 6"
        )));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("all radii coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (sse / (nf - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, intercept, stderr, points: n })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// c(±(ℓ + ½) − i(k + ½)).
    #[default]
    Correlated,
    /// c(±ℓ ± ½ − i(k + ½)), all four combinations.
    Independent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub lambda: Complex64,
    pub multiplicity: u32,
    /// Sign of the real part.
    pub sign: i8,
    pub ell: u32,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoLattice {
    pub c: f64,
    pub signs: SignConvention,
    pub points: Vec<LatticePoint>,
}

impl PseudoLattice {
    /// The lattice as resonances, for counting.
    pub fn resonances(&self) -> Vec<Resonance> {
        self.points
            .iter()
            .map(|p| Resonance { lambda: p.lambda, multiplicity: p.multiplicity, weight: 1, mode_index: p.ell as i64, bc: None })
            .collect()
    }
}

pub fn build_lattice(c: f64, ell_max: u32, k_max: u32, signs: SignConvention) -> Result<PseudoLattice> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("lattice constant must be positive, got {c}")));
    }
    let mut points = Vec::new();
    for ell in 1..=ell_max {
        for k in 0..=k_max {
            let im = -(k as f64 + 0.5);
            let reals: Vec<(i8, f64)> = match signs {
                SignConvention::Correlated => vec![(1, ell as f64 + 0.5), (-1, -(ell as f64 + 0.5))],
                SignConvention::Independent => vec![
                    (1, ell as f64 + 0.5),
                    (1, ell as f64 - 0.5),
                    (-1, -(ell as f64 - 0.5)),
                    (-1, -(ell as f64 + 0.5)),
                ],
            };
            for (sign, re) in reals {
                points.push(LatticePoint {
                    lambda: Complex64::new(c * re, c * im),
                    multiplicity: 2 * ell + 1,
                    sign,
                    ell,
                    k,
                });
            }
        }
    }
    Ok(PseudoLattice { c, signs, points })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LatticeMatch {
    /// (ℓ, d(ℓ)): worse of the two k = 0 distances.
    pub distances: Vec<(u32, f64)>,
    /// d(ℓ) nonincreasing over the upper half of the ℓ range.
    pub nonincreasing: bool,
    pub discrepancies: Vec<String>,
}

/// Mutual-nearest matching of each ℓ's resonances to the k = 0 lattice
/// points of the same ℓ.
pub fn match_lattice(res: &[Resonance], lattice: &PseudoLattice, window: &Window) -> LatticeMatch {
    let mut out = LatticeMatch { nonincreasing: true, ..LatticeMatch::default() };
    let mut ells: Vec<u32> = res.iter().filter(|r| r.mode_index >= 1).map(|r| r.mode_index as u32).collect();
    ells.sort_unstable();
    ells.dedup();
    if ells.is_empty() {
        return out;
    }
    let half = ells[(ells.len() - 1) / 2];
    for &ell in &ells {
        let own: Vec<Complex64> = res.iter().filter(|r| r.mode_index == ell as i64).map(|r| r.lambda).collect();
        let targets: Vec<Complex64> = lattice
            .points
            .iter()
            .filter(|p| p.ell == ell && p.k == 0 && p.lambda.re.abs() > ell as f64 * lattice.c)
            .map(|p| p.lambda)
            .collect();
        if targets.is_empty() {
            continue;
        }
        let mut worst: f64 = 0.0;
        let mut complete = true;
        for t in &targets {
            let nearest = own.iter().min_by(|a, b| (*a - t).norm().total_cmp(&(*b - t).norm()));
            let mutual = nearest.filter(|z| {
                let back = targets.iter().min_by(|a, b| (*a - *z).norm().total_cmp(&(*b - *z).norm()));
                back == Some(t)
            });
            match mutual {
                Some(z) => worst = worst.max((z - t).norm()),
                None => {
                    complete = false;
                    if ell >= half && window.contains(*t) {
                        out.discrepancies.push(format!("lattice point {t} (ell={ell}, k=0) has no matching resonance"));
                    }
                }
            }
        }
        if complete {
            out.distances.push((ell, worst));
        }
    }
    let top: Vec<f64> = out.distances.iter().filter(|(l, _)| *l >= half).map(|(_, d)| *d).collect();
    out.nonincreasing = top.windows(2).all(|w| w[1] <= w[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(re: f64, im: f64, mode: i64) -> Resonance {
        Resonance { lambda: Complex64::new(re, im), multiplicity: 1, weight: 1, mode_index: mode, bc: None }
    }

    #[test]
    fn weights() {
        assert_eq!(Weighting::Sds.weight(2), 5);
        assert_eq!(Weighting::FunnelFolded.weight(0), 1);
        assert_eq!(Weighting::FunnelFolded.weight(3), 2);
    }

    #[test]
    fn refusal_outside_trust() {
        let trust = Window::strip(1.0);
        let r = [res(0.5, -0.5, 1)];
        assert!(matches!(counting_curve(&r, Region::Strip { gamma: 2.0 }, &[1.0, 3.0], &trust), Err(Error::Refused(_))));
        assert!(matches!(counting_curve(&r, Region::Disk, &[0.5, 3.0], &trust), Err(Error::Refused(_))));
        let c = counting_curve(&r, Region::Strip { gamma: 1.0 }, &[0.5, 3.0], &trust).unwrap();
        assert_eq!(c.counts, vec![0, 1]);
    }

    #[test]
    fn constant_curve_has_zero_slope() {
        let curve = CountingCurve { radii: (1..=8).map(f64::from).collect(), counts: vec![4; 8], region: Region::Disk };
        let f = fit_exponent(&curve, 0.0, 10.0).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn lattice_on_itself_has_zero_distance() {
        let lat = build_lattice(0.5, 6, 0, SignConvention::Correlated).unwrap();
        let r: Vec<Resonance> = lat.resonances();
        let m = match_lattice(&r, &lat, &Window::strip(1.0));
        assert_eq!(m.distances.len(), 6);
        assert!(m.distances.iter().all(|(_, d)| *d == 0.0));
        assert!(m.nonincreasing && m.discrepancies.is_empty());
    }
}
