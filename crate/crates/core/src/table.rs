//! Raw tabular input: a header row and string cells.

use std::io::Read;

use crate::error::{Error, Result};

/// Cell values treated as missing.
const MISSING: &[&str] = &["", "NA", "NaN", "nan", "?"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != headers.len() {
                return Err(Error::config(format!(
                    "row {} has {} cells, header has {}",
                    i + 1,
                    row.len(),
                    headers.len()
                )));
            }
        }
        Ok(Table { headers, rows })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.iter().map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|r| Ok(r?.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>>>()?;
        Table::new(headers, rows)
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::config(format!("no column named {name:?}")))
    }

    /// Cell as text; missing cells are an error naming row (1-based) and column.
    pub fn text(&self, row: usize, col: usize) -> Result<&str> {
        let cell = self.rows[row][col].as_str();
        if MISSING.contains(&cell) {
            return Err(Error::MissingValue {
                row: row + 1,
                column: self.headers[col].clone(),
            });
        }
        Ok(cell)
    }

    pub fn number(&self, row: usize, col: usize) -> Result<f64> {
        let cell = self.text(row, col)?;
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::config(format!(
                "row {}: column {:?} value {cell:?} is not a finite number",
                row + 1,
                self.headers[col]
            ))),
        }
    }

    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.column_index(name)?;
        (0..self.len()).map(|r| self.number(r, col)).collect()
    }

    pub fn text_column(&self, name: &str) -> Result<Vec<String>> {
        let col = self.column_index(name)?;
        (0..self.len())
            .map(|r| self.text(r, col).map(str::to_string))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_reports_missing_cells() {
        let t = Table::from_csv("a,b\n1, x\n?,y\n".as_bytes()).unwrap();
        assert_eq!(t.text(0, 1).unwrap(), "x");
        match t.numeric_column("a") {
            Err(Error::MissingValue { row, column }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "a");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(t.numeric_column("b").is_err());
        assert!(t.column_index("c").is_err());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(Table::new(vec!["a".into()], vec![vec![]]).is_err());
    }
}
