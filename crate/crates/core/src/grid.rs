//! Cell-centered sampled fields on uniform grids over boxes.
//!
//! Sample `j` along an axis sits at `a + (j + 1/2) h` with `h = (b - a) / N`.
//! Integrals use the composite midpoint rule. Outside its box a field is
//! treated as zero, which is what cube integrals and convolutions see.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::cubes::CubeSpec;
use crate::expr::FieldExpr;
use crate::sum::pairwise_sum;
use crate::{Error, Result};

/// Axis-aligned box `[a_1, b_1] x ... x [a_n, b_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl GridBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidGrid("box must have dimension >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidGrid(format!(
                "corner dimensions differ ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidGrid(format!(
                    "axis {j}: need finite a < b, got [{a}, {b}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[a, b]^n`.
    pub fn cube(a: f64, b: f64, dim: usize) -> Result<Self> {
        Self::new(vec![a; dim], vec![b; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).collect()
    }

    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }
}

/// Samples of a real scalar field on a uniform cell-centered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    bbox: GridBox,
    counts: Vec<usize>,
    samples: Vec<f64>,
    periodic: bool,
}

impl GridField {
    /// Wraps a sample vector in row-major order (last axis fastest).
    pub fn from_samples(bbox: GridBox, counts: Vec<usize>, samples: Vec<f64>) -> Result<Self> {
        validate_counts(&bbox, &counts)?;
        let total: usize = counts.iter().product();
        if samples.len() != total {
            return Err(Error::InvalidGrid(format!(
                "expected {total} samples for counts {counts:?}, got {}",
                samples.len()
            )));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "sample {j} is not finite ({})",
                samples[j]
            )));
        }
        Ok(Self {
            bbox,
            counts,
            samples,
            periodic: false,
        })
    }

    /// Samples `expr` at every cell center.
    pub fn sample(expr: &FieldExpr, bbox: &GridBox, counts: &[usize]) -> Result<Self> {
        if expr.max_variable() > bbox.dim() {
            return Err(Error::InvalidGrid(format!(
                "expression uses x{} on a {}-dimensional box",
                expr.max_variable(),
                bbox.dim()
            )));
        }
        let expr = expr.compile();
        Self::try_from_fn(bbox, counts, |x| {
            expr.eval(x).map_err(|source| Error::Eval {
                source,
                point: x.to_vec(),
            })
        })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(bbox: &GridBox, counts: &[usize], f: F) -> Result<Self> {
        Self::try_from_fn(bbox, counts, |x| Ok(f(x)))
    }

    pub fn try_from_fn<F>(bbox: &GridBox, counts: &[usize], f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<f64>,
    {
        validate_counts(bbox, counts)?;
        let total: usize = counts.iter().product();
        let mut samples = Vec::with_capacity(total);
        let mut point = vec![0.0; bbox.dim()];
        let mut index = vec![0usize; bbox.dim()];
        for _ in 0..total {
            for (axis, x) in point.iter_mut().enumerate() {
                *x = center_coord(bbox, counts, axis, index[axis]);
            }
            samples.push(f(&point)?);
            increment(&mut index, counts);
        }
        Self::from_samples(bbox.clone(), counts.to_vec(), samples)
    }

    pub fn zeros_like(other: &GridField) -> Self {
        Self {
            samples: vec![0.0; other.samples.len()],
            ..other.clone()
        }
    }

    /// Marks the field as one period of a periodic function on the torus.
    pub fn with_periodic(mut self, periodic: bool) -> Self {
        self.periodic = periodic;
        self
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn bbox(&self) -> &GridBox {
        &self.bbox
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.bbox
            .lengths()
            .iter()
            .zip(&self.counts)
            .map(|(l, &n)| l / n as f64)
            .collect()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing().into_iter().fold(0.0, f64::max)
    }

    /// Volume of one cell, computed as `vol(box) / prod(N)`.
    pub fn cell_volume(&self) -> f64 {
        self.bbox.volume() / self.len() as f64
    }

    /// Row-major strides (last axis has stride 1).
    pub fn strides(&self) -> Vec<usize> {
        strides(&self.counts)
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(self.strides())
            .map(|(i, s)| i * s)
            .sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.dim()];
        for (axis, stride) in self.strides().into_iter().enumerate() {
            index[axis] = flat / stride;
            flat %= stride;
        }
        index
    }

    pub fn center_coord(&self, axis: usize, i: usize) -> f64 {
        center_coord(&self.bbox, &self.counts, axis, i)
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .enumerate()
            .map(|(axis, i)| self.center_coord(axis, i))
            .collect()
    }

    /// Flat index of the cell whose center is closest to `point`.
    pub fn nearest_cell(&self, point: &[f64]) -> usize {
        let spacing = self.spacing();
        let index: Vec<usize> = point
            .iter()
            .enumerate()
            .map(|(axis, &x)| {
                let t = ((x - self.bbox.lower[axis]) / spacing[axis] - 0.5).round();
                t.clamp(0.0, (self.counts[axis] - 1) as f64) as usize
            })
            .collect();
        self.flat_index(&index)
    }

    /// Sample at `index + offset`, or zero if that falls outside the grid.
    /// Periodic fields wrap when `wrap` is set.
    pub fn shifted_value(&self, index: &[usize], offset: &[isize], wrap: bool) -> f64 {
        let mut flat = 0;
        for (axis, stride) in self.strides().into_iter().enumerate() {
            let n = self.counts[axis] as isize;
            let mut i = index[axis] as isize + offset[axis];
            if wrap {
                i = i.rem_euclid(n);
            } else if i < 0 || i >= n {
                return 0.0;
            }
            flat += i as usize * stride;
        }
        self.samples[flat]
    }

    pub fn is_conformable(&self, other: &GridField) -> bool {
        self.bbox == other.bbox && self.counts == other.counts
    }

    pub fn check_conformable(&self, other: &GridField) -> Result<()> {
        if self.is_conformable(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "box {:?}..{:?} counts {:?} vs box {:?}..{:?} counts {:?}",
                self.bbox.lower,
                self.bbox.upper,
                self.counts,
                other.bbox.lower,
                other.bbox.upper,
                other.counts
            )))
        }
    }

    /// Midpoint-rule integral `sum(samples) * vol / prod(N)`.
    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.samples) * self.bbox.volume() / self.len() as f64
    }

    /// `L^p` norm for `p` in `[1, inf]` (`f64::INFINITY` selects the max norm).
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "lp_norm needs p >= 1, got {p}");
        if p.is_infinite() {
            return self.max_abs();
        }
        let powered: Vec<f64> = if p == 1.0 {
            self.samples.iter().map(|v| v.abs()).collect()
        } else if p == 2.0 {
            self.samples.iter().map(|v| v * v).collect()
        } else {
            self.samples.iter().map(|v| v.abs().powf(p)).collect()
        };
        let integral = pairwise_sum(&powered) * self.bbox.volume() / self.len() as f64;
        if p == 1.0 {
            integral
        } else if p == 2.0 {
            integral.sqrt()
        } else {
            integral.powf(1.0 / p)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ 1_cube f` with exact per-cell overlap weights.
    ///
    /// Parts of the cube outside the box contribute nothing. A cube covering
    /// the whole box reproduces [`GridField::integrate`] bit for bit.
    pub fn cube_integral(&self, cube: &CubeSpec) -> f64 {
        assert_eq!(cube.dim(), self.dim(), "cube and field dimensions differ");
        let mut ranges = Vec::with_capacity(self.dim());
        for axis in 0..self.dim() {
            let (lo, hi) = cube.axis_interval(axis);
            match self.axis_overlap(axis, lo, hi) {
                Some(r) => ranges.push(r),
                None => return 0.0,
            }
        }

        let starts: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        let extents: Vec<usize> = ranges.iter().map(|r| r.1.len()).collect();
        let total: usize = extents.iter().product();
        let strides = self.strides();
        let mut terms = Vec::with_capacity(total);
        let mut index = vec![0usize; self.dim()];
        for _ in 0..total {
            let mut flat = 0;
            let mut weight = 1.0;
            for axis in 0..self.dim() {
                flat += (starts[axis] + index[axis]) * strides[axis];
                weight *= ranges[axis].1[index[axis]];
            }
            terms.push(self.samples[flat] * weight);
            increment(&mut index, &extents);
        }
        pairwise_sum(&terms) * self.bbox.volume() / self.len() as f64
    }

    /// First overlapping cell and the overlap fraction of each cell in
    /// `[lo, hi]` along `axis`, or `None` if the interval misses the box.
    fn axis_overlap(&self, axis: usize, lo: f64, hi: f64) -> Option<(usize, Vec<f64>)> {
        let a = self.bbox.lower[axis];
        let b = self.bbox.upper[axis];
        let n = self.counts[axis];
        let h = (b - a) / n as f64;
        if hi <= a || lo >= b {
            return None;
        }
        let edge = |i: usize| a + i as f64 * (b - a) / n as f64;
        let first = (((lo - a) / h).floor().max(0.0) as usize).min(n - 1);
        let last = ((((hi - a) / h).ceil() as usize).min(n)).max(first + 1);
        let fractions: Vec<f64> = (first..last)
            .map(|i| {
                let (cl, ch) = (edge(i), edge(i + 1));
                if lo <= cl && hi >= ch {
                    1.0
                } else {
                    ((hi.min(ch) - lo.max(cl)) / (ch - cl)).max(0.0)
                }
            })
            .collect();
        Some((first, fractions))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridField, f: F) -> Result<Self> {
        self.check_conformable(other)?;
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            periodic: self.periodic && other.periodic,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &GridField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridField) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Writes the field in its CSV form: one header line
    /// `# box=a1:b1,...;counts=N1,...;periodic=0|1`, then one sample per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for v in &self.samples {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }

    pub fn csv_header(&self) -> String {
        let mut line = String::from("# box=");
        for (j, (a, b)) in self.bbox.lower.iter().zip(&self.bbox.upper).enumerate() {
            if j > 0 {
                line.push(',');
            }
            let _ = write!(line, "{a}:{b}");
        }
        line.push_str(";counts=");
        let counts: Vec<String> = self.counts.iter().map(|n| n.to_string()).collect();
        line.push_str(&counts.join(","));
        let _ = write!(line, ";periodic={}", u8::from(self.periodic));
        line
    }

    /// Reads the CSV form written by [`GridField::write_csv`]. Further `#`
    /// comment lines after the header are ignored.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Csv("empty input".into()))??;
        let (bbox, counts, periodic) = parse_header(&header)?;
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Csv(format!("line {}: bad sample {line:?}", lineno + 2)))?;
            samples.push(v);
        }
        Ok(Self::from_samples(bbox, counts, samples)?.with_periodic(periodic))
    }
}

fn parse_header(line: &str) -> Result<(GridBox, Vec<usize>, bool)> {
    let bad = |msg: &str| Error::Csv(format!("bad header {line:?}: {msg}"));
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '#'"))?
        .trim();
    let (mut lower, mut upper, mut counts, mut periodic) = (Vec::new(), Vec::new(), None, None);
    for part in body.split(';') {
        let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        match key.trim() {
            "box" => {
                for axis in value.split(',') {
                    let (a, b) = axis.split_once(':').ok_or_else(|| bad("expected a:b"))?;
                    lower.push(a.trim().parse().map_err(|_| bad("bad box corner"))?);
                    upper.push(b.trim().parse().map_err(|_| bad("bad box corner"))?);
                }
            }
            "counts" => {
                counts = Some(
                    value
                        .split(',')
                        .map(|c| c.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad("bad counts"))?,
                )
            }
            "periodic" => {
                periodic = Some(match value.trim() {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad("periodic must be 0 or 1")),
                })
            }
            other => return Err(bad(&format!("unknown key {other:?}"))),
        }
    }
    let counts = counts.ok_or_else(|| bad("missing counts"))?;
    let periodic = periodic.ok_or_else(|| bad("missing periodic"))?;
    Ok((GridBox::new(lower, upper)?, counts, periodic))
}

fn validate_counts(bbox: &GridBox, counts: &[usize]) -> Result<()> {
    if counts.len() != bbox.dim() {
        return Err(Error::InvalidGrid(format!(
            "{} counts for a {}-dimensional box",
            counts.len(),
            bbox.dim()
        )));
    }
    if let Some(axis) = counts.iter().position(|&n| n < 2) {
        return Err(Error::InvalidGrid(format!(
            "axis {axis} needs at least 2 samples, got {}",
            counts[axis]
        )));
    }
    Ok(())
}

fn center_coord(bbox: &GridBox, counts: &[usize], axis: usize, i: usize) -> f64 {
    let a = bbox.lower[axis];
    let b = bbox.upper[axis];
    a + (i as f64 + 0.5) * (b - a) / counts[axis] as f64
}

pub(crate) fn strides(counts: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; counts.len()];
    for axis in (0..counts.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * counts[axis + 1];
    }
    strides
}

/// Advances a row-major multi-index (last axis fastest).
pub(crate) fn increment(index: &mut [usize], extents: &[usize]) {
    for axis in (0..index.len()).rev() {
        index[axis] += 1;
        if index[axis] < extents[axis] {
            return;
        }
        index[axis] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn field(src: &str, a: f64, b: f64, n: usize) -> GridField {
        let bbox = GridBox::cube(a, b, 1).unwrap();
        GridField::sample(&parse(src, 1).unwrap(), &bbox, &[n]).unwrap()
    }

    #[test]
    fn sampling_uses_cell_centers() {
        assert_eq!(field("1", 0.0, 1.0, 4).samples(), &[1.0; 4]);
        assert_eq!(field("x1", 0.0, 1.0, 2).samples(), &[0.25, 0.75]);
        assert_eq!(field("abs(x1)", -1.0, 1.0, 4).samples(), &[0.75, 0.25, 0.25, 0.75]);
    }

    #[test]
    fn sampling_errors() {
        let bbox = GridBox::cube(0.0, 1.0, 1).unwrap();
        assert!(GridField::sample(&parse("1", 1).unwrap(), &bbox, &[1]).is_err());
        let err = GridField::sample(&parse("1/(x1-0.25)", 1).unwrap(), &bbox, &[2]).unwrap_err();
        match err {
            Error::Eval { point, .. } => assert_eq!(point, vec![0.25]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(GridBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(GridBox::new(vec![], vec![]).is_err());
    }

    #[test]
    fn midpoint_integrals() {
        for n in [3, 7, 49, 100] {
            assert_eq!(field("1", 0.0, 1.0, n).integrate(), 1.0);
            assert!((field("x1", 0.0, 1.0, n).integrate() - 0.5).abs() < 1e-15);
        }
        // Closed form: sum ((i + 1/2)/10)^2 / 10 = 0.3325.
        assert!((field("x1^2", 0.0, 1.0, 10).integrate() - 0.3325).abs() < 1e-15);
    }

    #[test]
    fn midpoint_error_is_second_order() {
        let err = |n| (field("x1^2", 0.0, 1.0, n).integrate() - 1.0 / 3.0).abs();
        for n in [8, 16, 32, 64] {
            let ratio = err(n) / err(2 * n);
            assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio} at n={n}");
        }
    }

    #[test]
    fn lp_norms() {
        assert_eq!(field("1", 0.0, 1.0, 8).lp_norm(2.0), 1.0);
        let s = field("sin(2*pi*x1)", 0.0, 1.0, 256).lp_norm(2.0);
        assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let v = field("-2.5", 0.0, 1.0, 9).lp_norm(p);
            assert!((v - 2.5).abs() < 1e-14, "p={p}: {v}");
        }
    }

    #[test]
    fn cube_integrals() {
        let one = field("1", 0.0, 1.0, 4);
        assert_eq!(one.cube_integral(&CubeSpec::new(vec![0.5], 0.5)), 0.5);
        assert_eq!(one.cube_integral(&CubeSpec::new(vec![3.0], 1.0)), 0.0);
        assert_eq!(one.cube_integral(&CubeSpec::new(vec![-0.5], 1.0)), 0.0);
        // Unaligned cube: [0.1, 0.4] covers 0.3 of the unit interval.
        let v = one.cube_integral(&CubeSpec::new(vec![0.25], 0.3));
        assert!((v - 0.3).abs() < 1e-15);

        let x = field("x1", 0.0, 1.0, 100);
        let v = x.cube_integral(&CubeSpec::new(vec![0.25], 0.5));
        assert!((v - 0.125).abs() < 1e-4);
    }

    #[test]
    fn covering_cube_reproduces_integral_exactly() {
        let bbox = GridBox::new(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap();
        let f = GridField::from_fn(&bbox, &[17, 9], |x| (3.0 * x[0]).sin() + x[1]).unwrap();
        assert_eq!(f.cube_integral(&CubeSpec::new(vec![0.0, 0.0], 4.0)), f.integrate());
    }

    #[test]
    fn two_dimensional_overlap() {
        let bbox = GridBox::cube(0.0, 1.0, 2).unwrap();
        let one = GridField::from_fn(&bbox, &[8, 8], |_| 1.0).unwrap();
        // Cube [0.3, 0.7]^2 minus nothing: area 0.16.
        let v = one.cube_integral(&CubeSpec::new(vec![0.5, 0.5], 0.4));
        assert!((v - 0.16).abs() < 1e-15);
        // Cube hanging over a corner: [-0.25, 0.25]^2 overlaps 0.0625.
        let v = one.cube_integral(&CubeSpec::new(vec![0.0, 0.0], 0.5));
        assert!((v - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn pointwise_arithmetic() {
        let f = field("sin(3*x1)", 0.0, 1.0, 16);
        let zero = f.add(&f.scale(-1.0)).unwrap();
        assert!(zero.samples().iter().all(|&v| v == 0.0));
        assert_eq!(field("1", 0.0, 1.0, 4).scale(2.0).samples(), &[2.0; 4]);
        assert_eq!(
            field("x1", -1.0, 1.0, 4).abs().samples(),
            &[0.75, 0.25, 0.25, 0.75]
        );
        let g = field("1", 0.0, 1.0, 8);
        assert!(matches!(f.add(&g), Err(Error::Shape(_))));
        let h = field("1", 0.0, 2.0, 16);
        assert!(matches!(f.sub(&h), Err(Error::Shape(_))));
    }

    #[test]
    fn csv_round_trip() {
        let bbox = GridBox::new(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap();
        let f = GridField::from_fn(&bbox, &[3, 4], |x| x[0] * 0.1 + x[1].exp())
            .unwrap()
            .with_periodic(true);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# box=-1:1,0:0.5;counts=3,4;periodic=1\n"));
        let back = GridField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(GridField::read_csv("".as_bytes()).is_err());
        assert!(GridField::read_csv("# box=0:1;counts=2\n1\n2\n".as_bytes()).is_err());
        assert!(GridField::read_csv("# box=0:1;counts=2;periodic=0\n1\n".as_bytes()).is_err());
        assert!(GridField::read_csv("# box=0:1;counts=2;periodic=0\n1\nx\n".as_bytes()).is_err());
        let f = GridField::read_csv("# box=0:1;counts=2;periodic=0\n# note\n1\n2\n".as_bytes()).unwrap();
        assert_eq!(f.samples(), &[1.0, 2.0]);
    }

    #[test]
    fn index_helpers() {
        let bbox = GridBox::cube(0.0, 1.0, 3).unwrap();
        let f = GridField::from_fn(&bbox, &[2, 3, 4], |_| 0.0).unwrap();
        assert_eq!(f.strides(), vec![12, 4, 1]);
        for flat in 0..f.len() {
            assert_eq!(f.flat_index(&f.multi_index(flat)), flat);
        }
        assert_eq!(f.nearest_cell(&[0.9, 0.5, 0.1]), f.flat_index(&[1, 1, 0]));
    }
}
