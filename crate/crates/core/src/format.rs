//! Number and table formatting for emitted artifacts.

use serde::Serialize;

/// Shortest scientific representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// `num` for optional values; `None` becomes an empty field.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Header plus string rows, rendered as CSV or as a JSON array of objects.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        debug_assert!(row.iter().all(|f| !f.contains(',') && !f.contains('\n')));
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column. Numeric-looking fields become JSON
    /// numbers, empty fields become `null`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .header
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.clone(), json_field(v)))
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    pub fn parse_csv(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let header = lines.next()?.split(',').map(str::to_string).collect::<Vec<_>>();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        rows.iter().all(|r| r.len() == header.len()).then_some(Self { header, rows })
    }
}

fn json_field(v: &str) -> serde_json::Value {
    if v.is_empty() {
        return serde_json::Value::Null;
    }
    if let Ok(i) = v.parse::<i64>() {
        return i.into();
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => x.into(),
        _ => v.into(),
    }
}

/// Pretty JSON with a trailing newline. Struct fields keep declaration order
/// and maps are sorted, so output is stable.
pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for x in [6328.0, 1.0 / 3.0, 5.2e-7, 0.0, -1.5e300, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(6328.0), "6.328e3");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), num(0.25)]);
        t.push(vec!["x".into(), String::new()]);
        let back = Table::parse_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.column("b").unwrap(), vec!["2.5e-1", ""]);
        let js = t.to_json_value();
        assert_eq!(js[0]["a"], 1);
        assert_eq!(js[0]["b"], 0.25);
        assert!(js[1]["b"].is_null());
    }
}
