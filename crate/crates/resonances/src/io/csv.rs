use std::fmt::Write as _;

use num_complex::Complex64;

use crate::counting::{cluster_multiplicities, Resonance, Weighting};
use crate::spectral::{Bc, Spectrum, SpectrumEntry, ZERO_MODE_TOL};
use crate::{Error, Result};

/// Which model a table belongs to; fixes the leading columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Sds,
    Funnel,
}

impl TableKind {
    pub fn header(self) -> &'static str {
        match self {
            TableKind::Sds => "ell,re_lambda,im_lambda,mult,residual,accepted",
            TableKind::Funnel => "m,bc,re_lambda,im_lambda,mult,residual,accepted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub mode_index: i64,
    pub bc: Option<Bc>,
    pub lambda: Complex64,
    pub mult: u32,
    pub residual: f64,
    /// Not stored in CSV.
    pub drift: Option<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub kind: TableKind,
    pub rows: Vec<Row>,
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rows for a filtered spectrum: one row per accepted cluster (centroid and
/// multiplicity), one per zero mode, one per rejected eigenvalue.
pub fn spectrum_rows(spec: &Spectrum, cluster_tol: f64) -> Vec<Row> {
    let mut rows = Vec::new();
    let clustered = cluster_multiplicities(spec, cluster_tol, Weighting::Unit);
    for r in &clustered.resonances {
        let members: Vec<&SpectrumEntry> = spec
            .accepted()
            .filter(|e| e.mode_index == r.mode_index && e.bc == r.bc && !e.zero_mode)
            .filter(|e| (e.lambda - r.lambda).norm() <= cluster_tol * r.lambda.norm().max(1.0) * r.multiplicity as f64)
            .collect();
        let residual = members.iter().map(|e| e.residual).fold(0.0, f64::max);
        let drift = members.iter().filter_map(|e| e.drift).reduce(f64::max);
        rows.push(Row {
            mode_index: r.mode_index,
            bc: r.bc,
            lambda: r.lambda,
            mult: r.multiplicity,
            residual,
            drift,
            accepted: true,
        });
    }
    for e in spec.entries.iter().filter(|e| !e.accepted || e.zero_mode) {
        rows.push(Row {
            mode_index: e.mode_index,
            bc: e.bc,
            lambda: e.lambda,
            mult: 1,
            residual: e.residual,
            drift: e.drift,
            accepted: e.accepted,
        });
    }
    rows.sort_by(|a, b| {
        a.mode_index
            .cmp(&b.mode_index)
            .then(a.bc.cmp(&b.bc))
            .then(b.accepted.cmp(&a.accepted))
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    rows
}

pub fn write_table(table: &Table) -> String {
    let mut s = String::new();
    s.push_str(table.kind.header());
    s.push('\n');
    for r in &table.rows {
        let _ = write!(s, "{}", r.mode_index);
        if table.kind == TableKind::Funnel {
            let _ = write!(s, ",{}", r.bc.map(Bc::label).unwrap_or("none"));
        }
        let _ = writeln!(
            s,
            ",{},{},{},{},{}",
            fmt_f64(r.lambda.re),
            fmt_f64(r.lambda.im),
            r.mult,
            fmt_f64(r.residual),
            r.accepted
        );
    }
    s
}

fn parse_bc(s: &str) -> Result<Option<Bc>> {
    match s {
        "dirichlet" => Ok(Some(Bc::Dirichlet)),
        "neumann" => Ok(Some(Bc::Neumann)),
        "none" => Ok(None),
        other => Err(Error::Config(format!("unknown boundary condition {other:?}"))),
    }
}

pub fn read_table(text: &str) -> Result<Table> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("empty table".into()))?.trim_end_matches('\r');
    let kind = if header == TableKind::Sds.header() {
        TableKind::Sds
    } else if header == TableKind::Funnel.header() {
        TableKind::Funnel
    } else {
        return Err(Error::Config(format!("unrecognized table header {header:?}")));
    };
    let bad = |n: usize, what: &str| Error::Config(format!("line {}: bad {what}", n + 2));
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let off = if kind == TableKind::Funnel { 1 } else { 0 };
        if f.len() != 6 + off {
            return Err(bad(n, "column count"));
        }
        let num = |i: usize, what: &str| f[i].parse::<f64>().map_err(|_| bad(n, what));
        rows.push(Row {
            mode_index: f[0].parse().map_err(|_| bad(n, "mode index"))?,
            bc: if off == 1 { parse_bc(f[1])? } else { None },
            lambda: Complex64::new(num(1 + off, "re_lambda")?, num(2 + off, "im_lambda")?),
            mult: f[3 + off].parse().map_err(|_| bad(n, "mult"))?,
            residual: num(4 + off, "residual")?,
            drift: None,
            accepted: f[5 + off].parse().map_err(|_| bad(n, "accepted"))?,
        });
    }
    Ok(Table { kind, rows })
}

impl Table {
    /// Default degeneracy weighting for the model.
    pub fn weighting(&self) -> Weighting {
        match self.kind {
            TableKind::Sds => Weighting::Sds,
            TableKind::Funnel if self.rows.iter().all(|r| r.mode_index >= 0) => Weighting::FunnelFolded,
            TableKind::Funnel => Weighting::Unit,
        }
    }

    /// Accepted nonzero rows as resonances.
    pub fn resonances(&self, weighting: Weighting) -> Vec<Resonance> {
        self.rows
            .iter()
            .filter(|r| r.accepted && r.lambda.norm() > ZERO_MODE_TOL)
            .map(|r| Resonance {
                lambda: r.lambda,
                multiplicity: r.mult,
                weight: weighting.weight(r.mode_index),
                mode_index: r.mode_index,
                bc: r.bc,
            })
            .collect()
    }

    /// Spectrum with each accepted row repeated `mult` times.
    pub fn to_spectrum(&self) -> Spectrum {
        let mut entries = Vec::new();
        for r in &self.rows {
            for _ in 0..r.mult.max(1) {
                entries.push(SpectrumEntry {
                    lambda: r.lambda,
                    residual: r.residual,
                    accepted: r.accepted,
                    mode_index: r.mode_index,
                    resolution: 0,
                    drift: None,
                    bc: r.bc,
                    zero_mode: r.lambda.norm() <= ZERO_MODE_TOL,
                });
            }
        }
        Spectrum { entries }
    }
}
