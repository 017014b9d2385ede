//! Thin QR factorization grown one column at a time.
//!
//! Columns are orthogonalized by classical Gram–Schmidt applied twice, which
//! keeps the basis orthonormal to working precision for the handful of
//! columns the greedy solvers select.

use crate::error::{Error, Result};

/// A new column counts as dependent when its orthogonal remainder is below
/// this fraction of its norm.
pub const TAU_RANK: f64 = 1e-10;

#[derive(Clone, Debug)]
pub(crate) struct IncrementalQr {
    p: usize,
    /// Orthonormal basis vectors.
    q: Vec<Vec<f64>>,
    /// Column `k` of the triangular factor, entries `0..=k`.
    r: Vec<Vec<f64>>,
    /// `Qᵀ h`.
    z: Vec<f64>,
}

/// A column orthogonalized against the current basis but not yet committed.
#[derive(Clone, Debug)]
pub(crate) struct Extension {
    q: Vec<f64>,
    rcol: Vec<f64>,
    z: f64,
}

impl IncrementalQr {
    pub fn new(p: usize) -> Self {
        IncrementalQr { p, q: Vec::new(), r: Vec::new(), z: Vec::new() }
    }

    pub fn from_columns<'a>(p: usize, columns: impl IntoIterator<Item = &'a [f64]>, h: &[f64]) -> Result<Self> {
        let mut qr = IncrementalQr::new(p);
        for col in columns {
            let ext = qr.extend(col, h)?;
            qr.push(ext);
        }
        Ok(qr)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn extend(&self, a: &[f64], h: &[f64]) -> Result<Extension> {
        debug_assert_eq!(a.len(), self.p);
        let mut v = a.to_vec();
        let mut coeffs = vec![0.0; self.q.len()];
        for _ in 0..2 {
            for (c, qk) in coeffs.iter_mut().zip(&self.q) {
                let d = dot(qk, &v);
                *c += d;
                v.iter_mut().zip(qk).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        let scale = dot(a, a).sqrt();
        if norm <= TAU_RANK * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient);
        }
        v.iter_mut().for_each(|x| *x /= norm);
        coeffs.push(norm);
        let z = dot(&v, h);
        Ok(Extension { q: v, rcol: coeffs, z })
    }

    pub fn push(&mut self, ext: Extension) {
        self.q.push(ext.q);
        self.r.push(ext.rcol);
        self.z.push(ext.z);
    }

    /// Least-squares coefficients for the committed columns plus `ext`.
    pub fn solve_with(&self, ext: Option<&Extension>) -> Vec<f64> {
        let k = self.len() + ext.is_some() as usize;
        let rcol = |j: usize| -> &[f64] {
            match ext {
                Some(e) if j == self.len() => &e.rcol,
                _ => &self.r[j],
            }
        };
        let mut g: Vec<f64> = (0..k).map(|j| if j < self.len() { self.z[j] } else { ext.map_or(0.0, |e| e.z) }).collect();
        for j in (0..k).rev() {
            let col = rcol(j);
            g[j] /= col[j];
            let gj = g[j];
            for (i, &rij) in col[..j].iter().enumerate() {
                g[i] -= rij * gj;
            }
        }
        g
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_normal_equations() {
        let cols = [vec![1.0, 2.0, 0.5, 0.0], vec![0.0, 1.0, 1.0, 3.0], vec![2.0, 0.0, 1.0, 1.0]];
        let h = vec![1.0, 1.0, 2.0, 0.5];
        let qr = IncrementalQr::from_columns(4, cols.iter().map(Vec::as_slice), &h).unwrap();
        let g = qr.solve_with(None);
        // gradient of the squared residual vanishes
        let r: Vec<f64> = (0..4).map(|i| h[i] - cols.iter().zip(&g).map(|(c, gk)| c[i] * gk).sum::<f64>()).collect();
        for c in &cols {
            assert!(dot(c, &r).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_agrees_with_push() {
        let h = vec![0.3, 0.2, 0.5];
        let mut qr = IncrementalQr::new(3);
        qr.push(qr.extend(&[1.0, 0.0, 1.0], &h).unwrap());
        let ext = qr.extend(&[0.0, 1.0, 1.0], &h).unwrap();
        let tentative = qr.solve_with(Some(&ext));
        qr.push(ext);
        assert_eq!(tentative, qr.solve_with(None));
    }

    #[test]
    fn dependent_column_is_flagged() {
        let h = vec![1.0, 0.0];
        let mut qr = IncrementalQr::new(2);
        qr.push(qr.extend(&[1.0, 1.0], &h).unwrap());
        assert!(matches!(qr.extend(&[2.0, 2.0], &h), Err(Error::RankDeficient)));
    }
}
