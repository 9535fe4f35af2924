//! Human-readable tables and per-run CSV.

use std::fmt::Write as _;

use crate::run::RunReport;
use crate::stats::AggregateStats;

pub const CSV_HEADER: &str = "instance,dynamicity,seed,nv,td_unscaled,feasible_solutions,duration_s";

pub fn emit_csv(reports: &[RunReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.3},{},{:.3}",
            r.instance, r.dynamicity, r.seed, r.nv, r.td_unscaled, r.feasible_solutions, r.duration_s
        );
    }
    s
}

/// Values of one column of a CSV produced by [`emit_csv`].
pub fn csv_column(text: &str, column: &str) -> Result<Vec<f64>, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("empty CSV")?;
    let idx = header
        .split(',')
        .position(|h| h.trim() == column)
        .ok_or_else(|| format!("no `{column}` column"))?;
    lines
        .enumerate()
        .map(|(i, l)| {
            let field = l.split(',').nth(idx).ok_or_else(|| format!("row {}: missing field", i + 2))?;
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("row {}: bad number `{field}`", i + 2))
        })
        .collect()
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.2}"))
}

/// One row per aggregate, columns aligned.
pub fn emit_table(stats: &[AggregateStats]) -> String {
    let header = [
        "instance", "runs", "NV avg", "NV min", "NV max", "NV sd", "TD avg", "TD min", "TD max", "TD sd", "NV inc%",
        "TD inc%",
    ];
    let rows: Vec<Vec<String>> = stats
        .iter()
        .map(|a| {
            vec![
                a.instance.clone(),
                a.runs.to_string(),
                format!("{:.2}", a.nv.mean),
                format!("{}", a.nv.min),
                format!("{}", a.nv.max),
                format!("{:.2}", a.nv.stdev),
                format!("{:.3}", a.td.mean),
                format!("{:.3}", a.td.min),
                format!("{:.3}", a.td.max),
                format!("{:.3}", a.td.stdev),
                pct(a.increase_nv),
                pct(a.increase_td),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    let line = |cells: Vec<&str>, s: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, v)| if c == 0 { format!("{v:<w$}", w = widths[c]) } else { format!("{v:>w$}", w = widths[c]) })
            .collect();
        s.push_str(parts.join("  ").trim_end());
        s.push('\n');
    };
    line(header.to_vec(), &mut s);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(rule.iter().map(String::as_str).collect(), &mut s);
    for r in &rows {
        line(r.iter().map(String::as_str).collect(), &mut s);
    }
    s
}
