//! Discrete memoryless channels as row-stochastic matrices.
//!
//! A [`Channel`] with `n` inputs and `m` outputs stores `p[i][j]`, the
//! probability of output `j` given input `i`, in dense row-major order.
//! Construction always goes through [`validate`], which accepts entries that
//! are off by at most [`TAU_VAL`] and renormalizes every row so downstream
//! algebra sees rows that sum to one in working precision.
//!
//! Kronecker products use the standard block convention:
//! `(A ⊗ B)[i·nB + k][j·mB + l] = A[i][j]·B[k][l]`. For two 2×2 channels
//!
//! ```text
//! A ⊗ B = | a00·B  a01·B |
//!         | a10·B  a11·B |
//! ```
//!
//! so the mixed-product identity `(R1 K T1) ⊗ (R2 K T2) = (R1 ⊗ R2)(K ⊗ K)(T1 ⊗ T2)`
//! holds entry for entry, and `kron_power(BSC(p), 2)[0][0] = (1-p)²`.

mod io;

pub use io::{parse_csv, parse_json, read_channel, to_json};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validation tolerance for negative entries and row sums.
pub const TAU_VAL: f64 = 1e-9;

/// Largest number of entries `kron_power` is allowed to allocate.
pub const KRON_ENTRY_CAP: u128 = 1 << 26;

/// Row-stochastic matrix describing a DMC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "io::ChannelRepr", into = "io::ChannelRepr")]
pub struct Channel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Checks a dense matrix and turns it into a [`Channel`].
///
/// Entries in `[-TAU_VAL, 0)` are clamped to zero and every row is rescaled to
/// sum to one, provided its sum was within `TAU_VAL` of one.
pub fn validate(raw: &[Vec<f64>]) -> Result<Channel> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::RaggedRow { row: i, found: row.len(), expected: cols });
        }
        data.extend_from_slice(row);
    }
    Channel::from_row_major(rows, cols, data)
}

impl Channel {
    /// Builds a channel from row-major data, applying the same checks as [`validate`].
    pub fn from_row_major(rows: usize, cols: usize, mut data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for i in 0..rows {
            let row = &mut data[i * cols..(i + 1) * cols];
            for (j, v) in row.iter_mut().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if *v < -TAU_VAL {
                    return Err(Error::NegativeEntry { row: i, col: j, value: *v });
                }
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > TAU_VAL {
                return Err(Error::RowSumError { row: i, sum });
            }
            row.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Channel { rows, cols, data })
    }

    /// Caller guarantees the data is already row-stochastic.
    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Channel { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Channel { rows: n, cols: n, data }
    }

    /// Every row is the uniform distribution over `m` outputs.
    pub fn uniform(n: usize, m: usize) -> Self {
        Channel { rows: n, cols: m, data: vec![1.0 / m as f64; n * m] }
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("crossover probability {p}")));
        }
        Ok(Channel { rows: 2, cols: 2, data: vec![1.0 - p, p, p, 1.0 - p] })
    }

    /// Binary erasure channel; the erasure symbol is the middle output.
    pub fn bec(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::OutOfRange(format!("erasure probability {eps}")));
        }
        Ok(Channel { rows: 2, cols: 3, data: vec![1.0 - eps, eps, 0.0, 0.0, eps, 1.0 - eps] })
    }

    /// Circulant channel whose first row is `first_row`.
    pub fn circulant(first_row: &[f64]) -> Result<Self> {
        let n = first_row.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            data.extend((0..n).map(|j| first_row[(j + n - i) % n]));
        }
        Self::from_row_major(n, n, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Column-stacked vectorization: entry `(i, j)` lands at `j·rows + i`.
    pub fn vec_columns(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            out.extend((0..self.rows).map(|i| self.get(i, j)));
        }
        out
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Channel) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(shape_err("compare", self, other));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Square with every column summing to one within [`TAU_VAL`].
    pub fn is_doubly_stochastic(&self) -> bool {
        self.is_square()
            && (0..self.cols).all(|j| {
                let s: f64 = (0..self.rows).map(|i| self.get(i, j)).sum();
                (s - 1.0).abs() <= TAU_VAL
            })
    }

    /// Square and row `i` is the first row shifted right by `i` positions.
    pub fn is_circulant(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let first = self.row(0);
        (1..n).all(|i| (0..n).all(|j| (self.get(i, j) - first[(j + n - i) % n]).abs() <= TAU_VAL))
    }

    /// Rows are permutations of each other and so are columns.
    pub fn is_symmetric_dmc(&self) -> bool {
        let rows: Vec<Vec<f64>> = (0..self.rows).map(|i| sorted(self.row(i).to_vec())).collect();
        let cols: Vec<Vec<f64>> = (0..self.cols).map(|j| sorted(self.column(j))).collect();
        rows.iter().all(|r| multiset_eq(r, &rows[0])) && cols.iter().all(|c| multiset_eq(c, &cols[0]))
    }

    /// Plain matrix product, re-validated as a channel.
    pub fn matmul(&self, rhs: &Channel) -> Result<Channel> {
        if self.cols != rhs.rows {
            return Err(shape_err("multiply", self, rhs));
        }
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut data = vec![0.0; n * m];
        for i in 0..n {
            let out = &mut data[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(rhs.row(l)) {
                    *o += a * b;
                }
            }
        }
        Channel::from_row_major(n, m, data)
    }

    /// Kronecker product in block convention.
    pub fn kron(&self, rhs: &Channel) -> Result<Channel> {
        let rows = self.rows.checked_mul(rhs.rows);
        let cols = self.cols.checked_mul(rhs.cols);
        let (rows, cols) = match (rows, cols) {
            (Some(r), Some(c)) if (r as u128) * (c as u128) <= KRON_ENTRY_CAP => (r, c),
            _ => {
                return Err(Error::SizeOverflow(format!(
                    "{}x{} ⊗ {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                )))
            }
        };
        let mut data = vec![0.0; rows * cols];
        for i in 0..self.rows {
            for k in 0..rhs.rows {
                let out_row = i * rhs.rows + k;
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    let base = out_row * cols + j * rhs.cols;
                    for (l, b) in rhs.row(k).iter().enumerate() {
                        data[base + l] = a * b;
                    }
                }
            }
        }
        Channel::from_row_major(rows, cols, data)
    }
}

/// `R · K · T`, with `R` processing the input and `T` the output.
pub fn compose(r: &Channel, k: &Channel, t: &Channel) -> Result<Channel> {
    r.matmul(k)?.matmul(t)
}

/// `N`-fold Kronecker power of `k`.
pub fn kron_power(k: &Channel, n: usize) -> Result<Channel> {
    if n == 0 {
        return Err(Error::OutOfRange("Kronecker order must be positive".into()));
    }
    let entries = (k.rows as u128).checked_pow(n as u32).zip((k.cols as u128).checked_pow(n as u32));
    match entries {
        Some((r, c)) if r.checked_mul(c).is_some_and(|e| e <= KRON_ENTRY_CAP) => {}
        _ => return Err(Error::SizeOverflow(format!("{}x{} to the power {n}", k.rows, k.cols))),
    }
    let mut out = k.clone();
    for _ in 1..n {
        out = out.kron(k)?;
    }
    Ok(out)
}

fn shape_err(op: &str, a: &Channel, b: &Channel) -> Error {
    Error::ShapeMismatch(format!("cannot {op} {}x{} with {}x{}", a.rows, a.cols, b.rows, b.cols))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn multiset_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TAU_VAL)
}

/// A 0/1 channel stored as the index of the single 1 in each row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureChannel {
    cols: usize,
    map: Vec<usize>,
}

impl PureChannel {
    pub fn new(cols: usize, map: Vec<usize>) -> Result<Self> {
        if cols == 0 || map.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if let Some(&bad) = map.iter().find(|&&c| c >= cols) {
            return Err(Error::IndexOutOfRange { index: bad, len: cols });
        }
        Ok(PureChannel { cols, map })
    }

    pub fn identity(n: usize) -> Self {
        PureChannel { cols: n, map: (0..n).collect() }
    }

    pub fn rows(&self) -> usize {
        self.map.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column holding the 1 in row `i`.
    #[inline]
    pub fn target(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_permutation(&self) -> bool {
        if self.rows() != self.cols {
            return false;
        }
        let mut seen = vec![false; self.cols];
        self.map.iter().all(|&c| !std::mem::replace(&mut seen[c], true))
    }

    pub fn to_channel(&self) -> Channel {
        let mut data = vec![0.0; self.rows() * self.cols];
        for (i, &c) in self.map.iter().enumerate() {
            data[i * self.cols + c] = 1.0;
        }
        Channel::from_parts_unchecked(self.rows(), self.cols, data)
    }

    /// Inverse of a permutation.
    pub fn inverse(&self) -> Option<PureChannel> {
        if !self.is_permutation() {
            return None;
        }
        let mut inv = vec![0; self.cols];
        for (i, &c) in self.map.iter().enumerate() {
            inv[c] = i;
        }
        Some(PureChannel { cols: self.cols, map: inv })
    }

    pub fn kron(&self, rhs: &PureChannel) -> PureChannel {
        let mut map = Vec::with_capacity(self.rows() * rhs.rows());
        for &a in &self.map {
            map.extend(rhs.map.iter().map(|&b| a * rhs.cols + b));
        }
        PureChannel { cols: self.cols * rhs.cols, map }
    }

    /// `R · K` for this `R`: row `i` of the result is row `σ(i)` of `k`.
    pub fn apply_rows(&self, k: &Channel) -> Result<Channel> {
        if self.cols != k.rows() {
            return Err(Error::ShapeMismatch(format!(
                "pure {}x{} times {}x{}",
                self.rows(),
                self.cols,
                k.rows(),
                k.cols()
            )));
        }
        let mut data = Vec::with_capacity(self.rows() * k.cols());
        for &src in &self.map {
            data.extend_from_slice(k.row(src));
        }
        Ok(Channel::from_parts_unchecked(self.rows(), k.cols(), data))
    }

    /// `K · T` for this `T`: input column `b` of `k` is added into output column `σ(b)`.
    pub fn apply_cols(&self, k: &Channel) -> Result<Channel> {
        if k.cols() != self.rows() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times pure {}x{}",
                k.rows(),
                k.cols(),
                self.rows(),
                self.cols
            )));
        }
        let mut data = vec![0.0; k.rows() * self.cols];
        for i in 0..k.rows() {
            for (b, &j) in self.map.iter().enumerate() {
                data[i * self.cols + j] += k.get(i, b);
            }
        }
        Ok(Channel::from_parts_unchecked(k.rows(), self.cols, data))
    }
}

/// Non-negative vector summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(mut w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for (i, v) in w.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: 0, col: i });
            }
            if *v < -TAU_VAL {
                return Err(Error::NegativeEntry { row: 0, col: i, value: *v });
            }
            *v = v.max(0.0);
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > TAU_VAL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(ProbVector(w))
    }

    /// Unit vector `e_k` of dimension `dim`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut w = vec![0.0; dim];
        w[k] = 1.0;
        ProbVector(w)
    }

    pub fn uniform(dim: usize) -> Self {
        ProbVector(vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;
    fn try_from(w: Vec<f64>) -> Result<Self> {
        ProbVector::new(w)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Vec<f64> {
        p.0
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Circular convolution `(v ⊛ x)[k] = Σ_j v[j]·x[(k − j) mod n]`.
pub fn circ_conv(v: &ProbVector, x: &ProbVector) -> Result<ProbVector> {
    let n = v.dim();
    if x.dim() != n {
        return Err(Error::ShapeMismatch(format!("convolving lengths {n} and {}", x.dim())));
    }
    let out = (0..n)
        .map(|k| (0..n).map(|j| v[j] * x[(k + n - j) % n]).sum())
        .collect();
    ProbVector::new(out)
}
