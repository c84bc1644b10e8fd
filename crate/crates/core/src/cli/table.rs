use std::fmt::Write as _;

/// One output value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Undefined numeric value (written as `NaN` in CSV, `null` in JSON).
    Missing,
    Int(usize),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn opt(value: Option<f64>) -> Self {
        value.map_or(Cell::Missing, Cell::Num)
    }
}

/// Formats a float with 12 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "NaN".to_string()
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| csv_text(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_float(*x),
                    Cell::Missing => "NaN".to_string(),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(s) => csv_text(s),
                    Cell::Bool(b) => b.to_string(),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [{column: value, ...}, ...]}` with the CSV number strings.
    pub fn to_json(&self) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("strings always serialize");
        let mut out = String::from("{\n  \"columns\": [");
        out.push_str(&self.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(", "));
        out.push_str("],\n  \"rows\": [");
        for (k, row) in self.rows.iter().enumerate() {
            out.push_str(if k == 0 { "\n    {" } else { ",\n    {" });
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let value = match cell {
                    Cell::Num(x) if x.is_finite() => format_float(*x),
                    Cell::Num(_) | Cell::Missing => "null".to_string(),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(s) => quote(s),
                    Cell::Bool(b) => b.to_string(),
                };
                let _ = write!(out, "{}: {}", quote(name), value);
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["x", "T_F", "g2", "cutoff", "status"]);
        t.push(vec![Cell::Num(0.25), Cell::Num(-1.5e-7), Cell::Missing, Cell::Int(12), Cell::Text("ok".into())]);
        t
    }

    #[test]
    fn csv_layout() {
        assert_eq!(sample().to_csv(), "x,T_F,g2,cutoff,status\n2.50000000000e-1,-1.50000000000e-7,NaN,12,ok\n");
    }

    #[test]
    fn json_is_valid_and_mirrors_csv() {
        let text = sample().to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"][0]["T_F"].as_f64(), Some(-1.5e-7));
        assert!(v["rows"][0]["g2"].is_null());
        assert!(text.contains("2.50000000000e-1"));
        let empty: serde_json::Value = serde_json::from_str(&Table::new(["a"]).to_json()).unwrap();
        assert_eq!(empty["rows"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn text_with_separators_is_quoted() {
        let mut t = Table::new(["quantity"]);
        t.push(vec![Cell::Text("<a_out,ex>".into())]);
        t.push(vec![Cell::Text("say \"hi\"".into())]);
        assert_eq!(t.to_csv(), "quantity\n\"<a_out,ex>\"\n\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(format_float(f64::NAN), "NaN");
    }
}
