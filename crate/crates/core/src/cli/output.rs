use serde_json::Value;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_csv_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_csv_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => csv_text(s),
        }
    }
}

/// Fixed-column CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

/// Result of a subcommand: a JSON document and, for tabular commands, the
/// CSV table. Without a table the CSV form lists `field,value` pairs.
pub struct Document {
    pub json: Value,
    pub table: Option<Table>,
}

impl Document {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).unwrap_or_default();
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.to_csv();
        }
        let mut t = Table::new(&["field", "value"]);
        flatten("", &self.json, &mut t.rows);
        t.to_csv()
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<Cell>>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, rows);
            }
        }
        Value::Null => rows.push(vec![Cell::Text(prefix.into()), Cell::Text(String::new())]),
        Value::Bool(b) => rows.push(vec![Cell::Text(prefix.into()), Cell::Text(b.to_string())]),
        Value::String(s) => rows.push(vec![Cell::Text(prefix.into()), Cell::Text(s.clone())]),
        Value::Number(n) => {
            let cell = match (n.as_i64(), n.as_f64()) {
                (Some(i), _) => Cell::Int(i),
                (None, Some(f)) => Cell::Num(f),
                _ => Cell::Text(n.to_string()),
            };
            rows.push(vec![Cell::Text(prefix.into()), cell]);
        }
    }
}
