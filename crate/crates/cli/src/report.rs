//! Rendering experiment output as comparison tables.
//!
//! Rows are grouped by `(cov, dist)`. Inside a group the rows are sample
//! sizes and the columns are `(test, y)` pairs in order of first appearance,
//! or dimensions against `(test, n)` when that fills the table better. A
//! result whose groups all share one `(p, n)` is a `Δ` sweep and becomes a
//! single table ordered by `Δ`.

use crate::failure::Failure;
use hidimtest::harness::{read_csv, CsvRow};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Md,
    Csv,
}

/// Loads rows from a CSV export, or from JSONL when the file name ends in
/// `.jsonl`.
pub fn load_rows(path: &Path) -> Result<Vec<CsvRow>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    let is_jsonl = path.extension().is_some_and(|e| e == "jsonl");
    if is_jsonl {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: CsvRow = serde_json::from_str(line)
                .map_err(|e| Failure::data(format!("schema: line {}: {e}", i + 1)))?;
            rows.push(row);
        }
        Ok(rows)
    } else {
        read_csv(text.as_bytes()).map_err(Failure::from)
    }
}

/// `0.25`, `0.5`, `1`, `20`: shortest form with at most four decimals.
pub fn format_y(y: f64) -> String {
    let s = format!("{y:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn format_rate(row: &CsvRow) -> String {
    if row.replications >= 10_000 {
        format!("{:.4}", row.rate)
    } else {
        format!("{:.3}", row.rate)
    }
}

struct Group<'a> {
    cov: &'a str,
    dist: &'a str,
    rows: Vec<&'a CsvRow>,
}

fn group(rows: &[CsvRow]) -> Vec<Group<'_>> {
    let mut groups: Vec<Group<'_>> = Vec::new();
    for row in rows {
        match groups.iter_mut().find(|g| g.cov == row.cov && g.dist == row.dist) {
            Some(g) => g.rows.push(row),
            None => groups.push(Group {
                cov: &row.cov,
                dist: &row.dist,
                rows: vec![row],
            }),
        }
    }
    groups
}

/// A table layout: row key, column label, and the header of the key column.
struct Layout {
    key: &'static str,
    row_key: fn(&CsvRow) -> usize,
    column: fn(&CsvRow) -> String,
}

const BY_N_AND_Y: Layout = Layout {
    key: "n",
    row_key: |r| r.n,
    column: |r| format!("{} y={}", r.test, format_y(r.y_n)),
};

const BY_P_AND_N: Layout = Layout {
    key: "p",
    row_key: |r| r.p,
    column: |r| format!("{} n={}", r.test, r.n),
};

struct Table {
    key: &'static str,
    keys: BTreeSet<usize>,
    columns: Vec<String>,
}

fn tabulate(rows: &[&CsvRow], layout: &Layout) -> Table {
    let mut columns: Vec<String> = Vec::new();
    let mut keys = BTreeSet::new();
    for r in rows {
        let c = (layout.column)(r);
        if !columns.contains(&c) {
            columns.push(c);
        }
        keys.insert((layout.row_key)(r));
    }
    Table {
        key: layout.key,
        keys,
        columns,
    }
}

/// Rows are sample sizes and columns ratios, unless rows by dimension and
/// columns by sample size leave fewer empty cells.
fn choose_layout(rows: &[&CsvRow]) -> &'static Layout {
    let a = tabulate(rows, &BY_N_AND_Y);
    let b = tabulate(rows, &BY_P_AND_N);
    if b.keys.len() * b.columns.len() < a.keys.len() * a.columns.len() {
        &BY_P_AND_N
    } else {
        &BY_N_AND_Y
    }
}

fn is_sweep(groups: &[Group<'_>]) -> bool {
    let first = (groups[0].rows[0].p, groups[0].rows[0].n);
    groups.len() > 1 && groups.iter().all(|g| g.rows.iter().all(|r| (r.p, r.n) == first))
}

fn render_sweep(rows: &[CsvRow]) -> String {
    let mut sorted: Vec<&CsvRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.test.as_str().cmp(b.test.as_str())));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "### cov = {}, p = {}, n = {}\n",
        sorted[0].cov, sorted[0].p, sorted[0].n
    );
    out.push_str("| delta | dist | test | rate | mc_se |\n|---:|---|---|---:|---:|\n");
    for r in sorted {
        let _ = writeln!(
            out,
            "| {:.4} | {} | {} | {} | {:.4} |",
            r.delta,
            r.dist,
            r.test,
            format_rate(r),
            r.mc_se
        );
    }
    out
}

pub fn render_markdown(rows: &[CsvRow]) -> String {
    let groups = group(rows);
    if groups.is_empty() {
        return String::new();
    }
    if is_sweep(&groups) {
        return render_sweep(rows);
    }
    let mut out = String::new();
    for (gi, g) in groups.iter().enumerate() {
        if gi > 0 {
            out.push('\n');
        }
        let layout = choose_layout(&g.rows);
        let table = tabulate(&g.rows, layout);
        let _ = writeln!(out, "### cov = {}, dist = {}\n", g.cov, g.dist);
        let _ = write!(out, "| {} |", table.key);
        for c in &table.columns {
            let _ = write!(out, " {c} |");
        }
        out.push_str("\n|---:|");
        for _ in &table.columns {
            out.push_str("---:|");
        }
        out.push('\n');
        for &k in &table.keys {
            let _ = write!(out, "| {k} |");
            for c in &table.columns {
                let cell = g
                    .rows
                    .iter()
                    .find(|r| (layout.row_key)(r) == k && (layout.column)(r) == *c)
                    .map(|r| format_rate(r))
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, " {cell} |");
            }
            out.push('\n');
        }
    }
    out
}

/// Long-form CSV sorted by group, test, `n` and `y`, for plotting.
pub fn render_csv(rows: &[CsvRow]) -> Result<String, Failure> {
    let mut sorted: Vec<&CsvRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (a.cov.as_str(), a.dist.as_str(), a.test.as_str(), a.n)
            .cmp(&(b.cov.as_str(), b.dist.as_str(), b.test.as_str(), b.n))
            .then(a.y_n.total_cmp(&b.y_n))
            .then(a.delta.total_cmp(&b.delta))
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::data(e.to_string());
    w.write_record(["cov", "dist", "test", "n", "p", "y_n", "delta", "rate", "mc_se", "replications"])
        .map_err(io)?;
    for r in sorted {
        w.write_record([
            r.cov.clone(),
            r.dist.clone(),
            r.test.to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.y_n.to_string(),
            r.delta.to_string(),
            r.rate.to_string(),
            r.mc_se.to_string(),
            r.replications.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
