//! CSV rendering of aggregate results.

use std::fmt::Write as _;

use crate::harness::{AggregateResult, CellResult};

pub const CSV_HEADER: &str = "config_id,sweep_param,sweep_value,n,k,q,psi,rho,dist_mu,dist_sigma,pr,\
fatigue_kind,compared_problem,compared_screener,runs_total,runs_feasible,mean_rtb,sd_rtb,\
mean_jds,sd_jds,mean_frac_protected,mean_evaluated_count,master_seed";

const NA: &str = "NA";

fn real(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), real)
}

/// One data line (without newline) for a sweep point of `agg`.
pub fn csv_row(agg: &AggregateResult, cell: &CellResult) -> String {
    let c = &cell.config;
    let sweep_param = agg.config.sweep.as_ref().map_or("none".to_string(), |s| s.param.to_string());
    let fields = [
        c.id.clone(),
        sweep_param,
        opt(cell.sweep_value),
        c.n.to_string(),
        c.k.to_string(),
        real(c.q),
        real(c.psi),
        opt(c.iso.rho()),
        real(c.dist.mu),
        real(c.dist.sigma),
        real(c.pr),
        c.compared_fatigue().kind.to_string(),
        c.problem.to_string(),
        c.screener.to_string(),
        cell.runs_total.to_string(),
        cell.runs_feasible.to_string(),
        opt(cell.rtb.mean),
        opt(cell.rtb.sd),
        opt(cell.jds.mean),
        opt(cell.jds.sd),
        opt(cell.mean_frac_protected),
        opt(cell.mean_evaluated_count),
        c.master_seed.to_string(),
    ];
    fields.join(",")
}

/// Header plus one line per sweep point of every result.
pub fn to_csv(results: &[AggregateResult]) -> String {
    let mut out = String::with_capacity(256 * (1 + results.iter().map(|r| r.cells.len()).sum::<usize>()));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for agg in results {
        for cell in &agg.cells {
            let _ = writeln!(out, "{}", csv_row(agg, cell));
        }
    }
    out
}
