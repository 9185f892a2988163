use std::fmt::Write;

use super::config::Format;
use super::run::{ResultRecord, Row};

pub const CSV_HEADER: &str = "problem,algorithm,trials,success_pct,median_t_s,median_i,median_c,seed";

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v}"))
}

fn time(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.problem),
            csv_field(&r.algorithm),
            r.trials,
            r.success_pct,
            time(r.median_t_s),
            cell(r.median_i),
            cell(r.median_c),
            r.seed
        );
    }
    out
}

/// Grid with one line per row label and `% t i c` under each column label,
/// both in first-seen order.
pub fn to_markdown(rows: &[Row]) -> String {
    let mut row_labels: Vec<&str> = Vec::new();
    let mut col_labels: Vec<&str> = Vec::new();
    for r in rows {
        if !row_labels.contains(&r.labels.0.as_str()) {
            row_labels.push(&r.labels.0);
        }
        if !col_labels.contains(&r.labels.1.as_str()) {
            col_labels.push(&r.labels.1);
        }
    }
    let mut out = String::from("| |");
    for c in &col_labels {
        let _ = write!(out, " {c} % | {c} t | {c} i | {c} c |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(4 * col_labels.len()));
    out.push('\n');
    for rl in &row_labels {
        let _ = write!(out, "| {rl} |");
        for cl in &col_labels {
            match rows.iter().find(|r| r.labels.0 == *rl && r.labels.1 == *cl) {
                Some(r) => {
                    let _ = write!(
                        out,
                        " {} | {} | {} | {} |",
                        r.success_pct,
                        time(r.median_t_s),
                        cell(r.median_i),
                        cell(r.median_c)
                    );
                }
                None => out.push_str(" | | | |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn emit_rows(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Markdown => to_markdown(rows),
        Format::Json => serde_json::to_string_pretty(rows).unwrap_or_else(|_| "[]".into()) + "\n",
    }
}

/// Full records as a JSON array.
pub fn records_json(records: &[ResultRecord]) -> String {
    serde_json::to_string_pretty(records).unwrap_or_else(|_| "[]".into()) + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(emit_rows(&[], Format::Json).trim(), "[]");
    }
}
