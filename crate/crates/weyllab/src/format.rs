//! Number formatting and tabular output.

use serde_json::{Map, Number, Value};

/// 17 significant digits, the round-trip precision of `f64`.
pub fn machine(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    format!("{x:.16e}")
}

/// `digits` significant digits, positional notation when reasonable.
pub fn human_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

/// Six significant digits.
pub fn human(x: f64) -> String {
    human_sig(x, 6)
}

/// JSON number carrying [`machine`] digits; non-finite values become null.
pub fn json_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(machine(x).parse::<Number>().expect("formatted float is a JSON number"))
}

pub fn json_nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| json_num(*x)).collect())
}

/// Object from key/value pairs, keys in the given order.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_owned(), v);
    }
    Value::Object(map)
}

/// Pretty JSON with a trailing newline.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// A cell of a [`Table`].
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => machine(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => json_num(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render)).expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("writing to memory")).expect("cells are UTF-8")
    }

    /// Array of objects keyed by the header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut map = Map::new();
                    for (h, c) in self.header.iter().zip(row) {
                        map.insert(h.clone(), c.to_json());
                    }
                    Value::Object(map)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_digits_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -2.5e-300, 7.0] {
            let s = machine(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
        }
    }

    #[test]
    fn human_formats() {
        assert_eq!(human(78.53981633974483), "78.5398");
        assert_eq!(human_sig(0.018591635788130, 3), "0.0186");
        assert_eq!(human(1.5e-7), "1.50000e-7");
        assert_eq!(human(0.0), "0");
    }

    #[test]
    fn json_numbers_keep_digits() {
        let v = object([("x", json_num(0.1)), ("n", Value::from(3))]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"x":1.0000000000000001e-1,"n":3}"#);
        assert_eq!(json_num(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_quotes_text() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::from(1.5), Cell::from("x,y")]);
        assert_eq!(t.to_csv(), "a,b\n1.5000000000000000e0,\"x,y\"\n");
    }
}
