use std::fmt::Write as _;
use std::path::Path;

use socnav_core::constraints::{ComplianceParams, PredicateVector};
use socnav_core::metrics::trace_metrics;
use socnav_core::simulator::trace::{read_trace, TraceRecord};

use crate::error::CliError;
use crate::output::write_atomic;

fn pv_bits(pv: PredicateVector) -> String {
    [pv.es, pv.ed, pv.not_ec, pv.et]
        .iter()
        .map(|b| if *b { '1' } else { '0' })
        .collect()
}

fn tick_line(r: &TraceRecord) -> String {
    let mut s = format!(
        "tick {:>4}  t={:>6.2}  {:<9}",
        r.tick,
        r.time,
        r.status.as_str()
    );
    if let Some(a) = &r.action {
        let idx = a.index.map_or("-".to_owned(), |i| format!("a{i}"));
        let _ = write!(s, "  {idx:>4} ({:.2}, {:.2})", a.velocity.x, a.velocity.y);
    }
    if let Some(l) = r.level {
        let _ = write!(s, "  {l}");
    }
    if let Some(pv) = r.predicate_vector {
        let _ = write!(s, "  Es,Ed,!Ec,Et={}", pv_bits(pv));
    }
    if r.forced {
        s.push_str("  FORCED");
    }
    if r.repaired {
        s.push_str("  REPAIRED");
    }
    if r.verified == Some(false) {
        s.push_str("  UNVERIFIED");
    }
    if let Some(e) = &r.chain_error {
        let _ = write!(s, "  chain error: {e}");
    }
    s.trim_end().to_owned()
}

/// Plot-ready polylines: `agent,tick,x,y`, robot first, then humans by id.
pub fn plot_csv(records: &[TraceRecord]) -> String {
    let mut s = String::from("agent,tick,x,y\n");
    for r in records {
        let _ = writeln!(s, "robot,{},{},{}", r.tick, r.robot.p.x, r.robot.p.y);
    }
    let mut ids: Vec<_> = records
        .first()
        .map(|r| r.humans.iter().map(|h| h.id).collect())
        .unwrap_or_default();
    ids.sort();
    for id in ids {
        for r in records {
            if let Some(h) = r.humans.iter().find(|h| h.id == id) {
                let _ = writeln!(s, "{id},{},{},{}", r.tick, h.p.x, h.p.y);
            }
        }
    }
    s
}

pub fn cmd_trace(
    path: &Path,
    params: &ComplianceParams,
    plot: Option<&Path>,
) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let records =
        read_trace(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let m = trace_metrics(0, &records, params).map_err(|e| CliError::Config(e.to_string()))?;

    let mut report = String::new();
    for r in &records {
        report.push_str(&tick_line(r));
        report.push('\n');
    }
    let forced = records.iter().filter(|r| r.forced).count();
    let repaired = records.iter().filter(|r| r.repaired).count();
    let _ = writeln!(
        report,
        "ticks {}  status {}  NP {:.2}  NT {:.2}  UF {}  HA {}  forced {}  repaired {}",
        records.len(),
        m.status,
        m.np,
        m.nt,
        m.uf,
        m.ha,
        forced,
        repaired
    );
    if let Some(p) = plot {
        write_atomic(p, plot_csv(&records).as_bytes())?;
    }
    Ok(report)
}
