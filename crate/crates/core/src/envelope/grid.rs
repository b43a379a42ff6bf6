use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

fn check_knots(name: &str, k: &[f64]) -> Result<()> {
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::Grid(format!("{name} knots must be finite")));
    }
    if k.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!("{name} knots must be strictly increasing")));
    }
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Scalar function sampled on strictly increasing knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Grid1Json", into = "Grid1Json")]
pub struct GridFunction1D {
    knots: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Grid1Json {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<Grid1Json> for GridFunction1D {
    type Error = Error;
    fn try_from(j: Grid1Json) -> Result<Self> {
        GridFunction1D::new(j.knots, j.values)
    }
}

impl From<GridFunction1D> for Grid1Json {
    fn from(g: GridFunction1D) -> Self {
        Grid1Json {
            knots: g.knots,
            values: g.values,
        }
    }
}

impl GridFunction1D {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Grid("empty grid".into()));
        }
        if knots.len() != values.len() {
            return Err(Error::Grid(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        check_knots("x", &knots)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("values must be finite".into()));
        }
        Ok(GridFunction1D { knots, values })
    }

    /// Samples `f` on `n` evenly spaced knots of `[a, b]`.
    pub fn sample<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 || !(b > a) {
            return Err(Error::Grid(format!("bad window [{a}, {b}] with {n} knots")));
        }
        let knots = linspace(a, b, n);
        let values = knots.iter().map(|&x| f(x)).collect();
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Same knots, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.knots.clone(), values)
    }

    /// Piecewise-linear interpolation; constant extension outside the knots.
    pub fn interpolate(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0] {
            return self.values[0];
        }
        if x >= k[k.len() - 1] {
            return self.values[k.len() - 1];
        }
        let i = k.partition_point(|&v| v <= x);
        let (x0, x1) = (k[i - 1], k[i]);
        let w = (x - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - w) + self.values[i] * w
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "value"])?;
        for (x, v) in self.knots.iter().zip(&self.values) {
            wr.write_record([x.to_string(), v.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::Grid("expected header `x,value`".into()));
        }
        let (mut knots, mut values) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            knots.push(parse_field(&rec[0])?);
            values.push(parse_field(&rec[1])?);
        }
        Self::new(knots, values)
    }
}

fn parse_field(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Grid(format!("not a number: {s:?}")))
}

/// Scalar function on a rectangular grid; `value(i, j)` is at `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Grid2Json", into = "Grid2Json")]
pub struct GridFunction2D {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Grid2Json {
    x_knots: Vec<f64>,
    y_knots: Vec<f64>,
    /// One row per x knot.
    values: Vec<Vec<f64>>,
}

impl TryFrom<Grid2Json> for GridFunction2D {
    type Error = Error;
    fn try_from(j: Grid2Json) -> Result<Self> {
        if j.values.len() != j.x_knots.len() || j.values.iter().any(|r| r.len() != j.y_knots.len()) {
            return Err(Error::Grid("values array is not rectangular".into()));
        }
        GridFunction2D::new(j.x_knots, j.y_knots, j.values.concat())
    }
}

impl From<GridFunction2D> for Grid2Json {
    fn from(g: GridFunction2D) -> Self {
        let ny = g.ys.len();
        Grid2Json {
            values: g.values.chunks(ny).map(|c| c.to_vec()).collect(),
            x_knots: g.xs,
            y_knots: g.ys,
        }
    }
}

impl GridFunction2D {
    /// `values` is row-major with one row per x knot.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::Grid("empty grid".into()));
        }
        if values.len() != xs.len() * ys.len() {
            return Err(Error::Grid("values array is not rectangular".into()));
        }
        check_knots("x", &xs)?;
        check_knots("y", &ys)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("values must be finite".into()));
        }
        Ok(GridFunction2D { xs, ys, values })
    }

    pub fn sample<F: Fn(f64, f64) -> f64>(f: F, xw: (f64, f64), yw: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || !(xw.1 > xw.0) || !(yw.1 > yw.0) {
            return Err(Error::Grid("bad 2D window".into()));
        }
        let xs = linspace(xw.0, xw.1, nx);
        let ys = linspace(yw.0, yw.1, ny);
        let mut values = Vec::with_capacity(nx * ny);
        for &x in &xs {
            for &y in &ys {
                values.push(f(x, y));
            }
        }
        Self::new(xs, ys, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    /// Bilinear interpolation inside the grid, clamped outside.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let locate = |k: &[f64], t: f64| -> (usize, f64) {
            if k.len() == 1 || t <= k[0] {
                return (0, 0.0);
            }
            if t >= k[k.len() - 1] {
                return (k.len() - 2, 1.0);
            }
            let i = k.partition_point(|&v| v <= t) - 1;
            (i, (t - k[i]) / (k[i + 1] - k[i]))
        };
        let (nx, ny) = self.shape();
        let (i, wx) = locate(&self.xs, x);
        let (j, wy) = locate(&self.ys, y);
        let v = |a: usize, b: usize| self.value(a.min(nx - 1), b.min(ny - 1));
        let lo = v(i, j) * (1.0 - wy) + v(i, j + 1) * wy;
        let hi = v(i + 1, j) * (1.0 - wy) + v(i + 1, j + 1) * wy;
        lo * (1.0 - wx) + hi * wx
    }

    /// Long-format CSV with header `x,y,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "value"])?;
        for (i, x) in self.xs.iter().enumerate() {
            for (j, y) in self.ys.iter().enumerate() {
                wr.write_record([x.to_string(), y.to_string(), self.value(i, j).to_string()])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "y", "value"] {
            return Err(Error::Grid("expected header `x,y,value`".into()));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            rows.push((parse_field(&rec[0])?, parse_field(&rec[1])?, parse_field(&rec[2])?));
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if xs.len() * ys.len() != rows.len() {
            return Err(Error::Grid("CSV rows do not form a rectangular grid".into()));
        }
        let mut values = vec![f64::NAN; rows.len()];
        for (x, y, v) in rows {
            let i = xs.partition_point(|&k| k < x);
            let j = ys.partition_point(|&k| k < y);
            values[i * ys.len() + j] = v;
        }
        Self::new(xs, ys, values)
    }
}
