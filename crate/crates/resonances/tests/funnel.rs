use resonances::exec::Exec;
use resonances::funnel::*;
use resonances::spectral::{build_grid, Bc};
use resonances::{Complex64, Error};

type C = Complex64;

fn accepted(circ: f64, m_max: i64) -> Vec<(i64, Bc, C)> {
    let fp = FunnelParams { circumference: circ, m_min: 0, m_max, neck_bc: NeckBc::Both };
    let r = compute_funnel_resonances(&FunnelRequest::new(fp), Exec::Parallel).unwrap();
    assert!(r.warnings.is_empty());
    r.spectrum.accepted().map(|e| (e.mode_index, e.bc.unwrap(), e.lambda)).collect()
}

/// Nearest k with λ ≈ ±m/ℓ̃ − i(k + ½).
fn closed_form_gap(z: C, m: i64, circ: f64) -> (u32, f64) {
    let k = (-z.im - 0.5).round().max(0.0);
    let re = m as f64 / circ;
    let w = C::new(re * z.re.signum(), -(k + 0.5));
    let w = if m == 0 { C::new(0.0, w.im) } else { w };
    (k as u32, (z - w).norm())
}

#[test]
fn values_follow_the_closed_form() {
    for circ in [1.0, 2.0, 0.7] {
        let acc = accepted(circ, 2);
        assert!(acc.len() >= 16);
        for &(m, bc, z) in &acc {
            let (k, gap) = closed_form_gap(z, m, circ);
            assert!(gap < 1e-6, "circ {circ} m {m} {z}");
            // even k from Neumann, odd k from Dirichlet
            assert_eq!(k % 2 == 0, bc == Bc::Neumann);
        }
    }
}

#[test]
fn lowest_values_present_with_multiplicity() {
    let acc = accepted(1.0, 1);
    let near = |m: i64, z: C| acc.iter().filter(|a| a.0 == m && (a.2 - z).norm() < 1e-6).count();
    assert_eq!(near(0, C::new(0.0, -0.5)), 2);
    assert_eq!(near(0, C::new(0.0, -1.5)), 2);
    for k in 0..3 {
        let im = -(k as f64 + 0.5);
        assert_eq!(near(1, C::new(1.0, im)), 1);
        assert_eq!(near(1, C::new(-1.0, im)), 1);
    }
}

#[test]
fn pencil_agrees_with_wronskian_oracle() {
    let opts = OracleOptions::default();
    let mut oracle = Vec::new();
    for bc in [Bc::Dirichlet, Bc::Neumann] {
        for r in wronskian_oracle(0, 1.0, bc, Cell { re: (-0.3, 0.3), im: (-3.0, 0.2) }, &opts, Exec::Parallel).unwrap() {
            oracle.extend(std::iter::repeat_n(r.lambda, r.multiplicity));
        }
    }
    oracle.sort_by(|a, b| b.im.total_cmp(&a.im));
    assert!(oracle.len() >= 5);
    let mut pencil: Vec<C> = accepted(1.0, 0).into_iter().map(|a| a.2).collect();
    pencil.sort_by(|a, b| b.im.total_cmp(&a.im));
    for (p, o) in pencil.iter().zip(&oracle).take(5) {
        assert!((p - o).norm() < 1e-6, "{p} vs {o}");
    }
    let m1 = wronskian_oracle(1, 1.0, Bc::Neumann, Cell { re: (0.53, 1.41), im: (-3.03, 0.17) }, &opts, Exec::Parallel).unwrap();
    let count: usize = m1.iter().map(|r| r.multiplicity).sum();
    assert_eq!(count, 2);
    assert!(m1.iter().all(|r| closed_form_gap(r.lambda, 1, 1.0).1 < 1e-6));
}

#[test]
fn routes_agree_near_infinity() {
    let conj = Route::Conjugated(Weight::Compactified);
    for m in 0..4 {
        assert!(compare_routes(conj, Route::PrintedCorrected, m, 1.0, 0.1, 64) < 1e-10);
        assert!(compare_routes(Route::PrintedLiteral, Route::PrintedCorrected, m, 1.0, 0.1, 64) > 1e-3);
    }
}

#[test]
fn invalid_requests() {
    let fp = FunnelParams { circumference: 1.0, m_min: 2, m_max: 1, neck_bc: NeckBc::Both };
    assert!(matches!(compute_funnel_resonances(&FunnelRequest::new(fp), Exec::Sequential), Err(Error::Config(_))));
    let fp = FunnelParams { circumference: -1.0, m_min: 0, m_max: 1, neck_bc: NeckBc::Both };
    assert!(fp.validate().is_err());
    let g = build_grid(12, 0.0, 2.0).unwrap();
    assert!(matches!(build_funnel_pencil(0, 1.0, &g, Bc::Dirichlet), Err(Error::Unsupported(_))));
    let mut req = FunnelRequest::new(FunnelParams { circumference: 1.0, m_min: 0, m_max: 0, neck_bc: NeckBc::Both });
    req.n_high = 24;
    assert!(req.validate().is_err());
}

#[test]
fn sequential_and_parallel_agree() {
    let fp = FunnelParams { circumference: 1.0, m_min: -1, m_max: 1, neck_bc: NeckBc::Both };
    let req = FunnelRequest::new(fp);
    let a = compute_funnel_resonances(&req, Exec::Sequential).unwrap();
    let b = compute_funnel_resonances(&req, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
