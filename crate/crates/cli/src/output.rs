//! CSV and JSON rendering.
//!
//! Every CSV starts with a `# dirac <schema>/<version>` line followed by an
//! optional block of `# key: value` notes; every JSON document is an object
//! `{"schema": ..., "data": ...}`. Floats in CSV use 17 significant digits.

use dirac_core::{LogComplex, C64};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn re_im(z: Option<C64>) -> [String; 2] {
    match z {
        Some(z) => [num(z.re), num(z.im)],
        None => [String::new(), String::new()],
    }
}

/// `ln|x|`, or `-inf` for an exact zero.
pub fn ln_abs(x: &LogComplex) -> String {
    num(x.log_magnitude)
}

pub struct Table {
    schema: &'static str,
    header: Vec<&'static str>,
    notes: Vec<(String, String)>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &'static str, header: &[&'static str]) -> Self {
        Self { schema, header: header.to_vec(), notes: Vec::new(), rows: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width for {}", self.schema);
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# dirac {}\n", self.schema);
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
        out
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'a str,
    data: &'a T,
}

pub fn json<T: Serialize>(schema: &str, data: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { schema, data }).expect("serializable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("demo/1", &["n", "x"]);
        t.note("kind", "test");
        t.push(vec!["1".into(), num(0.5)]);
        t.push(vec!["2".into(), opt(None)]);
        assert_eq!(t.render(), "# dirac demo/1\n# kind: test\nn,x\n1,5.0000000000000000e-1\n2,\n");
    }

    #[test]
    fn json_envelope_maps_infinities_to_null() {
        let s = json("z/1", &LogComplex::ZERO);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema"], "z/1");
        assert!(v["data"]["log_magnitude"].is_null());
    }
}
