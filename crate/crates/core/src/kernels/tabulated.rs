//! CSV-backed rate tables for user-supplied kernels.
//!
//! One-dimensional tables are two-column CSV (`x,value`); bivariate tables
//! are three-column CSV (`x,y,value`) whose rows must form a complete
//! Cartesian product.  Mass coordinates must be strictly increasing and
//! positive.  Evaluation is piecewise-linear, clamped to the table hull.

use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Table1<S: Scalar> {
    xs: Vec<S>,
    values: Vec<S>,
}

impl<S: Scalar> Table1<S> {
    pub fn from_columns(xs: Vec<S>, values: Vec<S>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::Table("column lengths differ".into()));
        }
        if xs.len() < 2 {
            return Err(Error::Table("table needs at least two rows".into()));
        }
        check_strictly_increasing(&xs)?;
        for v in values.iter().chain(xs.iter()) {
            if !v.is_finite() {
                return Err(Error::Table("non-finite table entry".into()));
            }
        }
        Ok(Self { xs, values })
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (x, rest) in parse_rows(text, 2)? {
            xs.push(x);
            vals.push(rest[0]);
        }
        Self::from_columns(xs, vals)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn min_value(&self) -> S {
        self.values.iter().copied().fold(S::infinity(), S::min)
    }

    pub fn x_range(&self) -> (S, S) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Piecewise-linear evaluation, constant beyond the table ends.
    pub fn eval(&self, x: S) -> S {
        interp(&self.xs, &self.values, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2<S: Scalar> {
    xs: Vec<S>,
    ys: Vec<S>,
    // row-major: values[ix * ys.len() + iy]
    values: Vec<S>,
}

impl<S: Scalar> Table2<S> {
    pub fn from_grid(xs: Vec<S>, ys: Vec<S>, values: Vec<S>) -> Result<Self> {
        check_strictly_increasing(&xs)?;
        check_strictly_increasing(&ys)?;
        if values.len() != xs.len() * ys.len() {
            return Err(Error::Table(format!(
                "expected {} values for a {}x{} grid, got {}",
                xs.len() * ys.len(),
                xs.len(),
                ys.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite table entry".into()));
        }
        Ok(Self { xs, ys, values })
    }

    /// Parses `x,y,value` rows; the (x, y) pairs must cover a full product
    /// grid but may come in any order.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let rows = parse_rows(text, 3)?;
        let mut xs: Vec<S> = Vec::new();
        let mut ys: Vec<S> = Vec::new();
        for (x, rest) in &rows {
            push_unique(&mut xs, *x);
            push_unique(&mut ys, rest[0]);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut values = vec![S::nan(); xs.len() * ys.len()];
        for (x, rest) in &rows {
            let ix = index_of(&xs, *x);
            let iy = index_of(&ys, rest[0]);
            values[ix * ys.len() + iy] = rest[1];
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Table(
                "rows do not form a complete x/y product grid".into(),
            ));
        }
        Self::from_grid(xs, ys, values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn min_value(&self) -> S {
        self.values.iter().copied().fold(S::infinity(), S::min)
    }

    /// Bilinear evaluation, clamped to the table hull.
    pub fn eval(&self, x: S, y: S) -> S {
        let (i, tx) = bracket(&self.xs, x);
        let (j, ty) = bracket(&self.ys, y);
        let ny = self.ys.len();
        let v00 = self.values[i * ny + j];
        let v01 = self.values[i * ny + j + 1];
        let v10 = self.values[(i + 1) * ny + j];
        let v11 = self.values[(i + 1) * ny + j + 1];
        let one = S::one();
        (one - tx) * ((one - ty) * v00 + ty * v01) + tx * ((one - ty) * v10 + ty * v11)
    }
}

fn check_strictly_increasing<S: Scalar>(xs: &[S]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::Table("coordinate axis needs at least two points".into()));
    }
    if xs[0] <= S::zero() {
        return Err(Error::Table("mass coordinates must be positive".into()));
    }
    for w in xs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Table(format!(
                "mass coordinates must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn parse_rows<S: Scalar>(text: &str, columns: usize) -> Result<Vec<(S, Vec<S>)>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns {
            return Err(Error::Table(format!(
                "line {}: expected {} columns, got {}",
                lineno + 1,
                columns,
                fields.len()
            )));
        }
        let mut parsed = Vec::with_capacity(columns);
        let mut numeric = true;
        for f in &fields {
            match f.parse::<f64>() {
                Ok(v) => parsed.push(S::lit(v)),
                Err(_) => {
                    numeric = false;
                    break;
                }
            }
        }
        if !numeric {
            // allow a single header line
            if rows.is_empty() {
                continue;
            }
            return Err(Error::Table(format!("line {}: non-numeric field", lineno + 1)));
        }
        rows.push((parsed[0], parsed[1..].to_vec()));
    }
    if rows.is_empty() {
        return Err(Error::Table("no data rows".into()));
    }
    Ok(rows)
}

fn push_unique<S: Scalar>(list: &mut Vec<S>, v: S) {
    if !list.iter().any(|&u| u == v) {
        list.push(v);
    }
}

fn index_of<S: Scalar>(sorted: &[S], v: S) -> usize {
    sorted.iter().position(|&u| u == v).expect("value collected above")
}

fn bracket<S: Scalar>(xs: &[S], x: S) -> (usize, S) {
    if x <= xs[0] {
        return (0, S::zero());
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return (last - 1, S::one());
    }
    let mut lo = 0;
    let mut hi = last;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if xs[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo), (x - xs[lo]) / (xs[lo + 1] - xs[lo]))
}

fn interp<S: Scalar>(xs: &[S], vals: &[S], x: S) -> S {
    let (i, t) = bracket(xs, x);
    vals[i] * (S::one() - t) + vals[i + 1] * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_parses_and_interpolates() {
        let t: Table1<f64> = Table1::from_csv_str("x,value\n1.0,2.0\n2.0,4.0\n4.0,0.0\n").unwrap();
        assert_eq!(t.eval(1.5), 3.0);
        assert_eq!(t.eval(0.5), 2.0); // clamped
        assert_eq!(t.eval(8.0), 0.0);
    }

    #[test]
    fn table1_rejects_non_increasing() {
        assert!(Table1::<f64>::from_csv_str("1.0,2.0\n1.0,3.0\n").is_err());
        assert!(Table1::<f64>::from_csv_str("2.0,2.0\n1.0,3.0\n").is_err());
    }

    #[test]
    fn table2_product_grid_any_order() {
        let csv = "2.0,1.0,21.0\n1.0,1.0,11.0\n1.0,2.0,12.0\n2.0,2.0,22.0\n";
        let t: Table2<f64> = Table2::from_csv_str(csv).unwrap();
        assert_eq!(t.eval(1.0, 1.0), 11.0);
        assert_eq!(t.eval(1.5, 1.5), 16.5);
    }

    #[test]
    fn table2_incomplete_grid_rejected() {
        let csv = "1.0,1.0,1.0\n2.0,2.0,4.0\n";
        assert!(Table2::<f64>::from_csv_str(csv).is_err());
    }
}
