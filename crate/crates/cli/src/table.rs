//! Result tables and their CSV form.
//!
//! ```text
//! # experiment: sweep
//! # config_hash: 3f1a...
//! # units: sigma1 [1], sigma2 [1], product [1], delta_q_over_dx [1]
//! sigma1,sigma2,product,delta_q_over_dx
//! 5.0000000000000000e-1,1.0000000000000001e-1,...
//! ```
//!
//! Numbers carry 17 significant digits so they read back bit for bit.

use std::fmt::Display;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Ordered key/value pairs written as `# key: value` lines.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|(name, unit)| Column {
                    name: name.to_string(),
                    unit: unit.to_string(),
                })
                .collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the schema");
        self.rows.push(row);
    }

    /// Adds or replaces a metadata entry.
    pub fn set_meta(&mut self, key: &str, value: impl Display) {
        let value = value.to_string();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        let units: Vec<String> = self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
        out.push_str(&format!("# units: {}\n", units.join(", ")));
        out.push_str(&self.column_names().join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads back the output of [`ResultTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut metadata = Vec::new();
        let mut units: Vec<String> = Vec::new();
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.next_if(|l| l.starts_with('#')) {
            let (key, value) = line[1..]
                .trim()
                .split_once(": ")
                .ok_or_else(|| format!("malformed metadata line {line:?}"))?;
            if key == "units" {
                units = value
                    .split(", ")
                    .map(|u| u.rsplit_once(" [").map_or("", |(_, unit)| unit.trim_end_matches(']')).to_string())
                    .collect();
            } else {
                metadata.push((key.to_string(), value.to_string()));
            }
        }
        let header = lines.next().ok_or("missing header line")?;
        let names: Vec<&str> = header.split(',').collect();
        units.resize(names.len(), String::new());
        let columns = names
            .iter()
            .zip(units)
            .map(|(name, unit)| Column {
                name: name.to_string(),
                unit,
            })
            .collect();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|line| {
                let row = line
                    .split(',')
                    .map(|cell| cell.parse::<f64>().map_err(|e| format!("{cell:?}: {e}")))
                    .collect::<Result<Vec<f64>, String>>()?;
                if row.len() == names.len() {
                    Ok(row)
                } else {
                    Err(format!("row has {} cells, header has {}", row.len(), names.len()))
                }
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Self { columns, rows, metadata })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(&[("product", "1"), ("delta_q_over_dx", "1")]);
        t.set_meta("experiment", "sweep");
        t.set_meta("predictor", 0.125);
        t.push_row(vec![0.1, 0.48]);
        t.push_row(vec![1.0 / 3.0, -2.5e-300]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment: sweep");
        assert_eq!(lines[1], "# predictor: 0.125");
        assert_eq!(lines[2], "# units: product [1], delta_q_over_dx [1]");
        assert_eq!(lines[3], "product,delta_q_over_dx");
        assert_eq!(lines[4], "1.0000000000000001e-1,4.7999999999999998e-1");
    }

    #[test]
    fn csv_reads_back() {
        let t = sample();
        assert_eq!(ResultTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn metadata_is_replaced_in_place() {
        let mut t = sample();
        t.set_meta("experiment", "magic-root");
        assert_eq!(t.metadata[0], ("experiment".into(), "magic-root".into()));
        assert_eq!(t.meta("predictor"), Some("0.125"));
    }

    proptest! {
        #[test]
        fn numbers_round_trip_through_text(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let text = format!("{v:.16e}");
            prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
