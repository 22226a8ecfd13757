use criterion::{criterion_group, criterion_main, Criterion};
use resonances::background::SdSParams;
use resonances::exec::Exec;
use resonances::funnel::{compute_funnel_resonances, FunnelParams, FunnelRequest, NeckBc};
use resonances::sds::{compute_qnm, QnmRequest};

fn sds_sweep(c: &mut Criterion) {
    let req = QnmRequest::new(SdSParams::new(1.0, 0.04).unwrap(), 0, 7);
    let mut g = c.benchmark_group("sds_l0_7");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| compute_qnm(&req, Exec::Sequential).unwrap()));
    g.bench_function("parallel", |b| b.iter(|| compute_qnm(&req, Exec::Parallel).unwrap()));
    g.finish();
}

fn funnel_sweep(c: &mut Criterion) {
    let fp = FunnelParams { circumference: 1.0, m_min: 0, m_max: 12, neck_bc: NeckBc::Both };
    let req = FunnelRequest::new(fp);
    let mut g = c.benchmark_group("funnel_m0_12");
    g.bench_function("sequential", |b| b.iter(|| compute_funnel_resonances(&req, Exec::Sequential).unwrap()));
    g.bench_function("parallel", |b| b.iter(|| compute_funnel_resonances(&req, Exec::Parallel).unwrap()));
    g.finish();
}

criterion_group!(benches, sds_sweep, funnel_sweep);
criterion_main!(benches);
