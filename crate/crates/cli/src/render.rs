use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub(crate) fn render(report: &Map<String, Value>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("json values serialize");
            out.push('\n');
            out
        }
        Format::Csv => csv(report),
        Format::Text => text(report),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        Value::Object(fields) if fields.len() == 2 && fields.contains_key("lo") && fields.contains_key("hi") => {
            format!("[{}, {}]", scalar(&fields["lo"]), scalar(&fields["hi"]))
        }
        Value::Object(fields) => fields
            .iter()
            .map(|(k, v)| format!("{k}={}", scalar(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn rows(report: &Map<String, Value>) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let Value::Array(rows) = report.get("rows")? else {
        return None;
    };
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(first)) => first.keys().cloned().collect(),
        _ => Vec::new(),
    };
    let body = rows
        .iter()
        .map(|r| header.iter().map(|k| r.get(k).map(scalar).unwrap_or_default()).collect())
        .collect();
    Some((header, body))
}

fn text(report: &Map<String, Value>) -> String {
    let mut out = String::new();
    for (k, v) in report.iter().filter(|(k, _)| *k != "rows") {
        out.push_str(&format!("{k}: {}\n", scalar(v)));
    }
    if let Some((header, body)) = rows(report) {
        let widths: Vec<usize> = header
            .iter()
            .enumerate()
            .map(|(i, h)| body.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            format!("{}\n", padded.join("  ").trim_end())
        };
        out.push_str(&line(&header));
        for r in &body {
            out.push_str(&line(r));
        }
    }
    out
}

fn csv(report: &Map<String, Value>) -> String {
    let mut w = ::csv::Writer::from_writer(Vec::new());
    let result = match rows(report) {
        Some((header, body)) => std::iter::once(header).chain(body).try_for_each(|r| w.write_record(&r)),
        None => std::iter::once(vec!["field".to_string(), "value".to_string()])
            .chain(report.iter().map(|(k, v)| vec![k.clone(), scalar(v)]))
            .try_for_each(|r| w.write_record(&r)),
    };
    result.expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
}
