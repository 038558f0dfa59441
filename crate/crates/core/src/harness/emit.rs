//! CSV tables with `# axes:` headers and full-precision values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::walk::EmpiricalDensity;

/// Named columns of `f64` rows plus axis descriptions.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub axes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { axes: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn axis(mut self, description: impl Into<String>) -> Self {
        self.axes.push(description.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column index of `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Serialized form; refuses non-finite values, naming the row's
    /// leading coordinates.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for a in &self.axes {
            writeln!(out, "# axes: {a}").expect("write to String");
        }
        writeln!(out, "{}", self.columns.join(",")).expect("write to String");
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(domain(format!("row {i} has {} values for {} columns", row.len(), self.columns.len())));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                let coords: Vec<String> = self
                    .columns
                    .iter()
                    .zip(row)
                    .take(j.max(1))
                    .map(|(c, v)| format!("{c} = {v}"))
                    .collect();
                return Err(Error::NonFinite {
                    value: row[j],
                    at: format!("column {} of row {i} ({})", self.columns[j], coords.join(", ")),
                });
            }
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(",")).expect("write to String");
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut axes = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => {
                    axes.push(l.trim_start_matches('#').trim().trim_start_matches("axes:").trim().to_string())
                }
                Some(l) => break l,
                None => return Err(domain("CSV has no header row")),
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let row: std::result::Result<Vec<f64>, _> = l.split(',').map(str::parse::<f64>).collect();
            let row = row.map_err(|e| domain(format!("data row {i}: {e}")))?;
            if row.len() != columns.len() {
                return Err(domain(format!("data row {i} has {} fields", row.len())));
            }
            rows.push(row);
        }
        Ok(Self { axes, columns, rows })
    }
}

/// Writes `table` to `path`.
pub fn write_table(table: &Table, path: &Path) -> Result<()> {
    let text = table.to_csv()?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<Table> {
    Table::parse(&fs::read_to_string(path)?)
}

/// Histogram as `bin_lo, bin_hi, density, std_error` rows.
pub fn density_table(h: &EmpiricalDensity, variable: &str) -> Table {
    let mut t = Table::new(&["bin_lo", "bin_hi", "density", "std_error"])
        .axis(format!("{variable} ∈ [{}, {}), {} bins", h.lo, h.hi, h.bins()))
        .axis(format!("samples {}, below {}, above {}", h.total, h.below, h.above));
    for i in 0..h.bins() {
        t.push(vec![h.edge(i), h.edge(i + 1), h.density(i), h.density_std_error(i)]);
    }
    t
}

/// Writes a histogram density.
pub fn emit_density_csv(h: &EmpiricalDensity, variable: &str, path: &Path) -> Result<()> {
    write_table(&density_table(h, variable), path)
}

/// Grid values `v(a_i, b_j)` as `a, b, value` rows, `b` fastest.
pub fn grid_table(names: [&str; 3], a: &[f64], b: &[f64], values: &[f64]) -> Result<Table> {
    if values.len() != a.len() * b.len() {
        return Err(domain("grid values do not match the axes"));
    }
    let describe = |name: &str, v: &[f64]| {
        format!("{name}: {} nodes on [{}, {}]", v.len(), v.first().copied().unwrap_or(0.0), v.last().copied().unwrap_or(0.0))
    };
    let mut t = Table::new(&names).axis(describe(names[0], a)).axis(describe(names[1], b));
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            t.push(vec![ai, bj, values[i * b.len() + j]]);
        }
    }
    Ok(t)
}

/// Hex SHA-256 of a file.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_bin_density_has_two_rows() {
        let mut h = EmpiricalDensity::new(0.0, 1.0, 2).unwrap();
        [0.1, 0.2, 0.7].iter().for_each(|&x| h.add(x));
        let text = density_table(&h, "x").to_csv().unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(data.len(), 2);
        assert!(text.starts_with("# axes: x ∈ [0, 1), 2 bins\n"));
    }

    #[test]
    fn nan_is_refused_with_coordinates() {
        let t = grid_table(["t", "u", "q"], &[0.5, 1.0], &[0.0, 0.1], &[1.0, 2.0, f64::NAN, 4.0]).unwrap();
        let err = t.to_csv().unwrap_err().to_string();
        assert!(err.contains("t = 1") && err.contains("u = 0"), "{err}");
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let t = grid_table(["a", "b", "v"], &[0.1, 0.2], &[1.0 / 3.0], &[1e-300, -2.5e17]).unwrap();
        write_table(&t, &path).unwrap();
        assert_eq!(read_table(&path).unwrap(), t);
        assert_eq!(sha256_file(&path).unwrap().len(), 64);
    }

    proptest! {
        #[test]
        fn values_round_trip_bit_for_bit(v in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 1..20)) {
            let mut t = Table::new(&["x"]).axis("x: test");
            v.iter().for_each(|&x| t.push(vec![x]));
            let back = Table::parse(&t.to_csv().unwrap()).unwrap();
            for (a, b) in back.rows.iter().zip(&v) {
                prop_assert_eq!(a[0].to_bits(), b.to_bits());
            }
        }
    }
}
