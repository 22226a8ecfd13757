mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use resonances::spectral::*;
use resonances::{Complex64, Error};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn differentiation_is_exact_on_polynomials() {
    let g = build_grid(16, -0.5, 2.0).unwrap();
    assert_eq!(g.nodes[0], 2.0);
    assert_eq!(g.nodes[15], -0.5);
    let f: Vec<f64> = g.nodes.iter().map(|x| x.powi(7) - 3.0 * x * x + 1.0).collect();
    for i in 0..g.n {
        let x = g.nodes[i];
        let d1: f64 = (0..g.n).map(|j| g.d1[(i, j)] * f[j]).sum();
        let d2: f64 = (0..g.n).map(|j| g.d2[(i, j)] * f[j]).sum();
        assert!((d1 - (7.0 * x.powi(6) - 6.0 * x)).abs() < 1e-9);
        assert!((d2 - (42.0 * x.powi(5) - 6.0)).abs() < 1e-8);
    }
    assert!(matches!(build_grid(7, 0.0, 1.0), Err(Error::Config(_))));
    assert!(matches!(build_grid(10, 1.0, 1.0), Err(Error::Config(_))));
}

#[test]
fn eigenvalues_preserve_trace_and_determinant() {
    for seed in 0..5 {
        let m = common::random_matrix(seed, 12);
        let ev = eig_dense(&m).unwrap();
        assert_eq!(ev.len(), 12);
        let tr: C = ev.iter().sum();
        let det: C = ev.iter().product();
        assert!((tr - m.trace()).norm() < 1e-11);
        let d = m.clone().determinant();
        assert!((det - d).norm() < 1e-10 * d.norm().max(1.0));
        // each value makes m − λ singular
        for &l in &ev {
            let s = (&m - DMatrix::<C>::identity(12, 12) * l).singular_values();
            assert!(s.min() < 1e-10 * s.max());
        }
    }
}

fn diagonal_pencil(roots: &[(C, C)]) -> PencilMatrices {
    // (λ − p)(λ − q) = λ² − (p + q)λ + pq
    let n = roots.len();
    let d = |f: &dyn Fn(C, C) -> C| DMatrix::from_fn(n, n, |i, j| if i == j { f(roots[i].0, roots[i].1) } else { c(0.0, 0.0) });
    PencilMatrices::new(d(&|p, q| p * q), d(&|p, q| -(p + q)), d(&|_, _| c(1.0, 0.0)), ModelTag::Synthetic).unwrap()
}

fn sorted(mut v: Vec<C>) -> Vec<C> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn companion_roots_of_diagonal_pencil() {
    let roots = [(c(1.0, -0.5), c(-1.0, -0.5)), (c(0.3, -2.0), c(2.5, -0.1)), (c(0.0, -1.0), c(4.0, 0.0))];
    let p = diagonal_pencil(&roots);
    let spec = solve_pencil(&p).unwrap();
    let got = sorted(spec.entries.iter().map(|e| e.lambda).collect());
    let want = sorted(roots.iter().flat_map(|&(a, b)| [a, b]).collect());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).norm() < 1e-12);
    }
    assert!(spec.entries.iter().all(|e| e.residual < 1e-12));
    let (b, cm) = linearize(&p).unwrap();
    assert_eq!((b.nrows(), cm.nrows()), (6, 6));
}

#[test]
fn singular_leading_matrix_is_refused() {
    let z = DMatrix::<C>::zeros(3, 3);
    let i = DMatrix::<C>::identity(3, 3);
    let p = PencilMatrices::new(i.clone(), i.clone(), z, ModelTag::Synthetic).unwrap();
    assert!(matches!(solve_pencil(&p), Err(Error::Linearization(_))));
    assert!(PencilMatrices::new(i.clone(), i, DMatrix::zeros(2, 2), ModelTag::Synthetic).is_err());
}

fn entry(l: C, res: usize) -> SpectrumEntry {
    SpectrumEntry {
        lambda: l,
        residual: 1e-14,
        accepted: false,
        mode_index: 0,
        resolution: res,
        drift: None,
        bc: None,
        zero_mode: l.norm() < ZERO_MODE_TOL,
    }
}

#[test]
fn filter_keeps_persistent_values() {
    let stable = [c(0.5, -0.1), c(-0.5, -0.1), c(1.2, -0.4)];
    let mut low: Vec<SpectrumEntry> = stable.iter().map(|&l| entry(l, 20)).collect();
    let mut high: Vec<SpectrumEntry> = stable.iter().map(|&l| entry(l + c(1e-10, 0.0), 30)).collect();
    low.push(entry(c(3.0, -5.0), 20));
    high.push(entry(c(3.5, -4.0), 30));
    high.push(entry(c(0.0, -8.0), 30));
    let low = Spectrum { entries: low };
    let high = Spectrum { entries: high };
    let out = filter_spectrum(&low, &high, &FilterOptions::default()).unwrap();
    let acc: Vec<C> = out.accepted().map(|e| e.lambda).collect();
    assert_eq!(acc.len(), 3);
    assert!(out.entries.iter().filter(|e| !e.accepted).count() == 2);
    let windowed = FilterOptions { window: Window::strip(0.2), ..Default::default() };
    assert_eq!(filter_spectrum(&low, &high, &windowed).unwrap().accepted().count(), 2);
    assert!(matches!(filter_spectrum(&low, &low, &FilterOptions::default()), Err(Error::Misuse(_))));
}

#[test]
fn split_double_root_is_accepted_as_a_cluster() {
    let z = c(0.0, -1.5);
    let low = Spectrum { entries: vec![entry(z + c(3e-8, 0.0), 20), entry(z - c(3e-8, 0.0), 20)] };
    let high = Spectrum { entries: vec![entry(z + c(0.0, 2e-8), 30), entry(z - c(0.0, 2e-8), 30)] };
    let out = filter_spectrum(&low, &high, &FilterOptions::default()).unwrap();
    assert_eq!(out.accepted().count(), 2);
    assert!(out.accepted().all(|e| (e.lambda - z).norm() < 1e-14));
}

#[test]
fn pairing_reports_missing_mirrors() {
    let mut s = Spectrum {
        entries: vec![entry(c(0.5, -0.1), 30), entry(c(-0.5, -0.1), 30), entry(c(0.7, -0.2), 30), entry(c(0.0, -0.3), 30)],
    };
    s.entries.iter_mut().for_each(|e| e.accepted = true);
    let bad = check_pairing(&s, 1e-8);
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].lambda, c(0.7, -0.2));
}

proptest! {
    #[test]
    fn diagonal_pencils_recover_roots(
        parts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..0.0, -3.0f64..3.0, -3.0f64..0.0), 1..6)
    ) {
        let roots: Vec<(C, C)> = parts.iter().map(|&(a, b, x, y)| (c(a, b), c(x, y))).collect();
        let spec = solve_pencil(&diagonal_pencil(&roots)).unwrap();
        for &(p, q) in &roots {
            for r in [p, q] {
                let best = spec.entries.iter().map(|e| (e.lambda - r).norm()).fold(f64::INFINITY, f64::min);
                // double roots split like sqrt(eps)
                prop_assert!(best < 1e-6);
            }
        }
        let tr: C = spec.entries.iter().map(|e| e.lambda).sum();
        let want: C = roots.iter().map(|&(p, q)| p + q).sum();
        prop_assert!((tr - want).norm() < 1e-10);
    }
}
