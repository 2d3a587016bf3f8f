//! CSV tables with a leading manifest comment.

use std::io::Write;

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 15;

/// Rounds to 15 significant digits and prints the shortest decimal that
/// represents the rounded value, in exponent form outside `[1e-5, 1e16)`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("float round-trip");
    if rounded == 0.0 {
        return "0".into();
    }
    if (1e-5..1e16).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File-name suffix when one run writes several tables.
    pub tag: Option<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { tag: None, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, manifest: &str, mut w: W) -> Result<(), CliError> {
        writeln!(w, "# manifest: {manifest}")?;
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::render))?;
        }
        csv.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-7), "6.66666666666667e-8");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn manifest_then_header() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![1.0.into(), "x,y".into()]);
        let mut buf = Vec::new();
        t.write("cmd cfg 0.1.0", &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# manifest: cmd cfg 0.1.0\na,b\n1,\"x,y\"\n");
    }
}
