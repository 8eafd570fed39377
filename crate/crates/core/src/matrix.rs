//! Small exact integer matrices with named rows and columns.
//!
//! Multiplicities in adjacency matrices are conceptually unbounded; here they
//! are held in `i64` and every arithmetic step is checked, so an overflow
//! surfaces as [`Error::Overflow`] instead of wrapping.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    data: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn zero(row_names: Vec<String>, col_names: Vec<String>) -> Self {
        let data = vec![vec![0; col_names.len()]; row_names.len()];
        IntMatrix {
            row_names,
            col_names,
            data,
        }
    }

    pub fn from_rows(row_names: Vec<String>, col_names: Vec<String>, data: Vec<Vec<i64>>) -> Self {
        assert_eq!(data.len(), row_names.len());
        for row in &data {
            assert_eq!(row.len(), col_names.len());
        }
        IntMatrix {
            row_names,
            col_names,
            data,
        }
    }

    /// Diagonal matrix over one index set.
    pub fn diagonal(names: Vec<String>, entries: Vec<i64>) -> Self {
        assert_eq!(names.len(), entries.len());
        let mut m = IntMatrix::zero(names.clone(), names);
        for (i, d) in entries.into_iter().enumerate() {
            m.data[i][i] = d;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.row_names.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_names.len()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r][c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: i64) -> Result<()> {
        self.data[r][c] = self.data[r][c].checked_add(v).ok_or(Error::Overflow)?;
        Ok(())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.col_names.clone(), self.row_names.clone());
        for r in 0..self.nrows() {
            for c in 0..self.ncols() {
                t.data[c][r] = self.data[r][c];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        assert_eq!(
            self.ncols(),
            rhs.nrows(),
            "matrix dimension mismatch: {}x{} * {}x{}",
            self.nrows(),
            self.ncols(),
            rhs.nrows(),
            rhs.ncols()
        );
        let mut out = IntMatrix::zero(self.row_names.clone(), rhs.col_names.clone());
        for r in 0..self.nrows() {
            for k in 0..self.ncols() {
                let a = self.data[r][k];
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.ncols() {
                    let b = rhs.data[k][c];
                    if b == 0 {
                        continue;
                    }
                    let prod = a.checked_mul(b).ok_or(Error::Overflow)?;
                    out.add_at(r, c, prod)?;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise equality ignoring the names.
    pub fn same_entries(&self, other: &IntMatrix) -> bool {
        self.data == other.data
    }

    /// Reorder rows and columns by the given index permutations
    /// (`rows[i]` = old index placed at new position `i`).
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let row_names = rows.iter().map(|&i| self.row_names[i].clone()).collect();
        let col_names = cols.iter().map(|&j| self.col_names[j].clone()).collect();
        let data = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.data[i][j]).collect())
            .collect();
        IntMatrix {
            row_names,
            col_names,
            data,
        }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.data
    }

    pub fn is_zero_one(&self) -> bool {
        self.data
            .iter()
            .all(|row| row.iter().all(|&v| v == 0 || v == 1))
    }

    pub fn has_zero_row(&self) -> bool {
        self.data.iter().any(|row| row.iter().all(|&v| v == 0))
    }

    pub fn has_zero_col(&self) -> bool {
        (0..self.ncols()).any(|c| self.data.iter().all(|row| row[c] == 0))
    }

    /// Plain integer CSV: header row of column names, then one line per row
    /// with the row name first.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(",{}\n", self.col_names.join(",")));
        for (name, row) in self.row_names.iter().zip(&self.data) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{},{}\n", name, cells.join(",")));
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.data {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_transpose() {
        let a = IntMatrix::from_rows(
            vec!["r0".into(), "r1".into()],
            vec!["c0".into(), "c1".into()],
            vec![vec![1, 2], vec![0, 1]],
        );
        let b = a.transpose();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.rows(), &[vec![5, 2], vec![2, 1]]);
    }

    #[test]
    fn overflow_is_reported() {
        let a = IntMatrix::from_rows(
            vec!["r".into()],
            vec!["c".into()],
            vec![vec![i64::MAX]],
        );
        let b = IntMatrix::from_rows(vec!["c".into()], vec!["d".into()], vec![vec![2]]);
        assert_eq!(a.mul(&b), Err(Error::Overflow));
    }
}
