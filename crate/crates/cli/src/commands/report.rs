use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::Value;

use super::usage;
use crate::output::{write_atomic, Manifest};
use crate::ReportArgs;

struct Entry {
    row: String,
    column: String,
    dir: PathBuf,
    level: String,
    pooled: Value,
}

fn parse_input(spec: &str) -> Result<(Option<(String, String)>, PathBuf)> {
    let Some((label, dir)) = spec.split_once('=') else {
        return Ok((None, PathBuf::from(spec)));
    };
    let (row, column) = label
        .split_once('/')
        .ok_or_else(|| usage(format!("expected ROW/COLUMN=DIR, got {spec:?}")))?;
    if row.is_empty() || column.is_empty() {
        return Err(usage(format!("empty row or column label in {spec:?}")));
    }
    Ok((Some((row.to_owned(), column.to_owned())), PathBuf::from(dir)))
}

fn load(spec: &str) -> Result<Entry> {
    let (label, dir) = parse_input(spec)?;
    let path = dir.join("metrics.json");
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let level = v["level"]
        .as_str()
        .with_context(|| format!("{}: missing level", path.display()))?
        .to_owned();
    let (row, column) = label.unwrap_or_else(|| {
        let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        (name, level.clone())
    });
    Ok(Entry {
        row,
        column,
        dir,
        level,
        pooled: v["pooled"].clone(),
    })
}

fn num(v: &Value, key: &str) -> String {
    v.get(key).and_then(Value::as_f64).map(|x| x.to_string()).unwrap_or_default()
}

fn cell(e: &Entry) -> String {
    let f = |key: &str| e.pooled.get(key).and_then(Value::as_f64);
    match e.level.as_str() {
        "manifesto" => match f("spearman_r") {
            Some(r) => format!("r={r:.3}"),
            None => "r=n/a".to_owned(),
        },
        _ => format!(
            "{:.3} / {:.3}",
            f("accuracy").unwrap_or(f64::NAN),
            f("weighted_f1").unwrap_or(f64::NAN)
        ),
    }
}

/// Markdown pivot with rows and columns in first-seen order.
fn markdown(entries: &[Entry]) -> String {
    let mut rows: Vec<&str> = Vec::new();
    let mut cols: Vec<&str> = Vec::new();
    let mut cells = BTreeMap::new();
    for e in entries {
        if !rows.contains(&e.row.as_str()) {
            rows.push(&e.row);
        }
        if !cols.contains(&e.column.as_str()) {
            cols.push(&e.column);
        }
        cells.insert((e.row.as_str(), e.column.as_str()), cell(e));
    }
    let mut out = String::from("|   |");
    for c in &cols {
        out.push_str(&format!(" {c} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(cols.len()));
    out.push('\n');
    for r in &rows {
        out.push_str(&format!("| {r} |"));
        for c in &cols {
            let v = cells.get(&(*r, *c)).map(String::as_str).unwrap_or("");
            out.push_str(&format!(" {v} |"));
        }
        out.push('\n');
    }
    out
}

pub fn report(a: &ReportArgs) -> Result<()> {
    let entries = a.input.iter().map(|s| load(s)).collect::<Result<Vec<_>>>()?;
    let mut seen = std::collections::HashSet::new();
    if let Some(e) = entries.iter().find(|e| !seen.insert((e.row.clone(), e.column.clone()))) {
        return Err(usage(format!("duplicate report cell {}/{}", e.row, e.column)));
    }
    crate::output::stdout(markdown(&entries).as_bytes())?;
    let Some(out) = &a.out else {
        return Ok(());
    };
    write_atomic(out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([
            "row", "column", "dir", "level", "n", "accuracy", "weighted_f1", "spearman_r", "mae", "mean_error",
        ])?;
        for e in &entries {
            csv.write_record([
                e.row.clone(),
                e.column.clone(),
                e.dir.display().to_string(),
                e.level.clone(),
                num(&e.pooled, "n"),
                num(&e.pooled, "accuracy"),
                num(&e.pooled, "weighted_f1"),
                num(&e.pooled, "spearman_r"),
                num(&e.pooled, "mae"),
                num(&e.pooled, "mean_error"),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    let mut m = Manifest::new("report", a);
    for e in &entries {
        m.input(&e.dir.join("metrics.json"))?;
    }
    m.output(out);
    m.write_beside(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn labels_parse() {
        let (l, d) = parse_input("linear/xcountry=out/a").unwrap();
        assert_eq!(l, Some(("linear".into(), "xcountry".into())));
        assert_eq!(d, Path::new("out/a"));
        assert!(parse_input("linear=out").is_err());
        assert_eq!(parse_input("out/a").unwrap().0, None);
    }

    #[test]
    fn pivot_layout() {
        let e = |row: &str, column: &str, level: &str, pooled: Value| Entry {
            row: row.into(),
            column: column.into(),
            dir: PathBuf::new(),
            level: level.into(),
            pooled,
        };
        let md = markdown(&[
            e("lin", "xc", "statement", serde_json::json!({"accuracy": 0.5, "weighted_f1": 0.25})),
            e("lin", "xt", "manifesto", serde_json::json!({"spearman_r": 0.8})),
            e("maj", "xt", "manifesto", serde_json::json!({"spearman_r": null})),
        ]);
        assert_eq!(
            md,
            "|   | xc | xt |\n|---|---|---|\n| lin | 0.500 / 0.250 | r=0.800 |\n| maj |  | r=n/a |\n"
        );
    }
}
