use proptest::prelude::*;
use resonances::counting::*;
use resonances::spectral::{Spectrum, SpectrumEntry, Window};
use resonances::{Complex64, Error};

type C = Complex64;

fn unit(z: C) -> Resonance {
    Resonance { lambda: z, multiplicity: 1, weight: 1, mode_index: 0, bc: None }
}

fn entry(z: C, ell: i64) -> SpectrumEntry {
    SpectrumEntry {
        lambda: z,
        residual: 0.0,
        accepted: true,
        mode_index: ell,
        resolution: 30,
        drift: Some(0.0),
        bc: None,
        zero_mode: false,
    }
}

#[test]
fn split_pairs_become_double_resonances() {
    let z = C::new(0.0, -1.5);
    let spec = Spectrum {
        entries: vec![
            entry(z + C::new(1e-9, 0.0), 2),
            entry(z - C::new(1e-9, 0.0), 2),
            entry(C::new(0.4, -0.1), 2),
            entry(C::new(-0.4, -0.1), 2),
            entry(C::new(1e-12, 0.0), 2),
        ],
    };
    let mut spec = spec;
    spec.entries[4].zero_mode = true;
    let cl = cluster_multiplicities(&spec, DEFAULT_CLUSTER_TOL, Weighting::Sds);
    assert_eq!(cl.resonances.len(), 3);
    let double = cl.resonances.iter().find(|r| r.multiplicity == 2).unwrap();
    assert!((double.lambda - z).norm() < 1e-15);
    assert_eq!(double.weight, 5);
    assert_eq!(cl.resonances.iter().map(Resonance::count).sum::<u64>(), 20);
    assert_eq!(Weighting::FunnelFolded.weight(0), 1);
    assert_eq!(Weighting::FunnelFolded.weight(3), 2);
}

#[test]
fn cubic_counting_has_slope_three() {
    let res: Vec<Resonance> = (1..=30000).map(|j| unit(C::new((j as f64).cbrt(), 0.0))).collect();
    let radii: Vec<f64> = (0..40).map(|i| 5.0 * 1.04f64.powi(i)).collect();
    let curve = counting_curve(&res, Region::Disk, &radii, &Window::strip(f64::INFINITY)).unwrap();
    let fit = fit_exponent(&curve, 5.0, 30.0).unwrap();
    assert!((fit.slope - 3.0).abs() < 0.01, "{fit:?}");
    assert!(matches!(fit_exponent(&curve, 5.0, 5.5), Err(Error::InsufficientData(_))));
}

/// Direct enumeration of c(±(ℓ+½) − i(k+½)), weight 2ℓ+1, in the disk.
fn enumerate(c: f64, r: f64, ell_max: u32, k_max: u32) -> u64 {
    let mut n = 0;
    for ell in 1..=ell_max {
        for k in 0..=k_max {
            let (a, b) = (c * (ell as f64 + 0.5), c * (k as f64 + 0.5));
            if a * a + b * b <= r * r {
                n += 2 * (2 * ell as u64 + 1);
            }
        }
    }
    n
}

#[test]
fn lattice_counts_match_enumeration() {
    let lat = build_lattice(1.0, 20, 20, SignConvention::Correlated).unwrap();
    let radii = [1.0, 2.0, 3.0, 5.5, 8.0, 12.0];
    let curve = counting_curve(&lat.resonances(), Region::Disk, &radii, &Window::strip(f64::INFINITY)).unwrap();
    assert_eq!(curve.counts[1], 6);
    for (r, n) in radii.iter().zip(&curve.counts) {
        assert_eq!(*n, enumerate(1.0, *r, 20, 20));
    }
}

#[test]
fn lattice_sizes_and_scaling() {
    let a = build_lattice(0.3, 7, 3, SignConvention::Correlated).unwrap();
    assert_eq!(a.points.len(), 2 * 7 * 4);
    let b = build_lattice(0.3, 7, 3, SignConvention::Independent).unwrap();
    assert_eq!(b.points.len(), 4 * 7 * 4);
    let d = build_lattice(0.6, 7, 3, SignConvention::Correlated).unwrap();
    for (p, q) in a.points.iter().zip(&d.points) {
        assert_eq!(q.lambda, p.lambda * 2.0);
        assert_eq!(q.multiplicity, p.multiplicity);
    }
    assert!(matches!(build_lattice(0.0, 3, 3, SignConvention::Correlated), Err(Error::Config(_))));
}

#[test]
fn full_lattice_grows_cubically_in_disks() {
    let lat = build_lattice(1.0, 200, 200, SignConvention::Correlated).unwrap();
    let radii: Vec<f64> = (0..30).map(|i| 20.0 * 1.05f64.powi(i)).collect();
    let curve = counting_curve(&lat.resonances(), Region::Disk, &radii, &Window::strip(f64::INFINITY)).unwrap();
    let fit = fit_exponent(&curve, 20.0, 100.0).unwrap();
    assert!((fit.slope - 3.0).abs() < 0.1, "{fit:?}");
}

#[test]
fn lattice_matching_detects_offsets() {
    let lat = build_lattice(0.2, 12, 0, SignConvention::Correlated).unwrap();
    // distances shrinking like 1/ℓ
    let res: Vec<Resonance> = lat
        .points
        .iter()
        .map(|p| Resonance { lambda: p.lambda + C::new(0.0, 0.01 / p.ell as f64), multiplicity: 1, weight: 1, mode_index: p.ell as i64, bc: None })
        .collect();
    let m = match_lattice(&res, &lat, &Window::strip(1.0));
    assert!(m.nonincreasing);
    for (ell, d) in &m.distances {
        assert!((d - 0.01 / *ell as f64).abs() < 1e-12);
    }
}

fn pts() -> impl Strategy<Value = Vec<(f64, f64, u32)>> {
    proptest::collection::vec((-10.0f64..10.0, -5.0f64..0.0, 1u32..4), 0..40)
}

proptest! {
    #[test]
    fn counts_are_additive(a in pts(), b in pts()) {
        let mk = |v: &[(f64, f64, u32)]| -> Vec<Resonance> {
            v.iter().map(|&(x, y, m)| Resonance { lambda: C::new(x, y), multiplicity: m, weight: 1, mode_index: 0, bc: None }).collect()
        };
        let radii = [1.0, 2.0, 4.0, 8.0];
        let trust = Window::strip(5.0);
        let region = Region::Strip { gamma: 3.0 };
        let ca = counting_curve(&mk(&a), region, &radii, &trust).unwrap();
        let cb = counting_curve(&mk(&b), region, &radii, &trust).unwrap();
        let mut both = mk(&a);
        both.extend(mk(&b));
        let cab = counting_curve(&both, region, &radii, &trust).unwrap();
        for i in 0..radii.len() {
            prop_assert_eq!(cab.counts[i], ca.counts[i] + cb.counts[i]);
            if i > 0 {
                prop_assert!(cab.counts[i] >= cab.counts[i - 1]);
            }
        }
    }

    #[test]
    fn counts_are_scale_invariant(a in pts(), e in -3i32..4) {
        let s = 2f64.powi(e);
        let res: Vec<Resonance> = a.iter().map(|&(x, y, m)| Resonance { lambda: C::new(x, y), multiplicity: m, weight: 1, mode_index: 0, bc: None }).collect();
        let scaled: Vec<Resonance> = res.iter().map(|r| Resonance { lambda: r.lambda * s, ..*r }).collect();
        let radii = [0.5, 1.0, 3.0, 7.0];
        let sr: Vec<f64> = radii.iter().map(|r| r * s).collect();
        let trust = Window::strip(f64::INFINITY);
        let c1 = counting_curve(&res, Region::Disk, &radii, &trust).unwrap();
        let c2 = counting_curve(&scaled, Region::Disk, &sr, &trust).unwrap();
        prop_assert_eq!(c1.counts, c2.counts);
    }
}
