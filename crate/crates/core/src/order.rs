//! Structure-based inclusion tests that need no atom enumeration.
//!
//! * majorization of flattened doubly stochastic channels (necessary only),
//! * first-row majorization and circular deconvolution for circulant channels,
//! * reduction of 3×3 and 4×4 symmetric channels to circulant form,
//! * the closed form for BSC/BEC pairs.
//!
//! Every verdict carries its witness so callers can re-verify it.

use nalgebra::{DMatrix, DVector};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use crate::channel::{circ_conv, Channel, ProbVector, PureChannel};
use crate::error::{Error, Result};
use crate::perm::permutations;

/// Tolerance on majorization partial sums and deconvolution residuals.
pub const TAU_MAJ: f64 = 1e-8;

/// DFT coefficients of the first row below this magnitude switch deconvolution to NNLS.
const DFT_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// Smallest 1-based prefix length whose partial-sum inequality fails.
    pub first_violation_k: Option<usize>,
    /// `Σa − Σb`.
    pub sum_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CirculantVerdict {
    pub necessary_holds: bool,
    pub sufficient_holds: bool,
    /// Convolution kernel with `v1 ⊛ x = v2`, present when `sufficient_holds`.
    pub x: Option<ProbVector>,
}

impl CirculantVerdict {
    /// Re-checks the witness: `K1 · X = K2` with `X` the circulant built from `x`.
    pub fn recheck(&self, k1: &Channel, k2: &Channel) -> bool {
        match &self.x {
            Some(x) => degradation_kernel(x)
                .and_then(|xm| k1.matmul(&xm))
                .and_then(|prod| prod.max_abs_diff(k2))
                .is_ok_and(|d| d <= TAU_MAJ),
            None => !self.sufficient_holds,
        }
    }
}

/// Whether `a` majorizes `b` (`a ≻ b`).
pub fn majorizes(a: &[f64], b: &[f64]) -> Result<MajorizationVerdict> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("majorization of lengths {} and {}", a.len(), b.len())));
    }
    let desc = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|x, y| y.total_cmp(x));
        s
    };
    let (a, b) = (desc(a), desc(b));
    let n = a.len();
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut first_violation_k = None;
    for k in 0..n.saturating_sub(1) {
        sa += a[k];
        sb += b[k];
        if sa < sb - TAU_MAJ {
            first_violation_k = Some(k + 1);
            break;
        }
    }
    let sum_gap = a.iter().sum::<f64>() - b.iter().sum::<f64>();
    Ok(MajorizationVerdict {
        holds: first_violation_k.is_none() && sum_gap.abs() <= TAU_MAJ,
        first_violation_k,
        sum_gap,
    })
}

/// Flattened-entry majorization `w2 ≺ w1`, necessary for `K2 ⊆ K1` when both
/// channels are doubly stochastic. `holds = false` refutes inclusion; `true` is inconclusive.
pub fn doubly_stochastic_necessary(k1: &Channel, k2: &Channel) -> Result<MajorizationVerdict> {
    if !k1.is_doubly_stochastic() || !k2.is_doubly_stochastic() {
        return Err(Error::NotDoublyStochastic);
    }
    if k1.shape() != k2.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", k1.shape(), k2.shape())));
    }
    majorizes(k1.as_slice(), k2.as_slice())
}

/// Necessary and sufficient conditions for inclusion between circulant channels.
pub fn circulant_conditions(k1: &Channel, k2: &Channel) -> Result<CirculantVerdict> {
    if !k1.is_circulant() || !k2.is_circulant() {
        return Err(Error::NotCirculant);
    }
    if k1.shape() != k2.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", k1.shape(), k2.shape())));
    }
    let v1 = k1.row(0);
    let v2 = k2.row(0);
    let necessary_holds = majorizes(v1, v2)?.holds;
    let x = deconvolve(v1, v2);
    Ok(CirculantVerdict { necessary_holds, sufficient_holds: x.is_some(), x })
}

/// Finds a probability vector `x` with `v1 ⊛ x = v2`, if one exists.
pub fn deconvolve(v1: &[f64], v2: &[f64]) -> Option<ProbVector> {
    let n = v1.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let to_complex = |v: &[f64]| v.iter().map(|&re| Complex::new(re, 0.0)).collect::<Vec<_>>();
    let mut f1 = to_complex(v1);
    let mut f2 = to_complex(v2);
    fwd.process(&mut f1);
    fwd.process(&mut f2);

    let candidate = if f1.iter().all(|c| c.norm() > DFT_FLOOR) {
        let mut fx: Vec<Complex<f64>> = f2.iter().zip(&f1).map(|(a, b)| a / b).collect();
        inv.process(&mut fx);
        let x: Vec<f64> = fx.iter().map(|c| c.re / n as f64).collect();
        // a unique solution off the simplex means no kernel exists
        if fx.iter().any(|c| (c.im / n as f64).abs() > TAU_MAJ) || x.iter().any(|&v| v < -TAU_MAJ) {
            return None;
        }
        x
    } else {
        let conv = DMatrix::from_fn(n, n, |k, j| v1[(k + n - j) % n]);
        let (x, residual) = crate::nnls::nnls(&conv, &DVector::from_column_slice(v2));
        if residual >= TAU_MAJ {
            return None;
        }
        x.iter().copied().collect()
    };
    let sum: f64 = candidate.iter().sum();
    if (sum - 1.0).abs() > TAU_MAJ {
        return None;
    }
    let x = ProbVector::new(candidate.iter().map(|v| v.max(0.0) / sum).collect()).ok()?;
    let v1p = ProbVector::new(v1.to_vec()).ok()?;
    let back = circ_conv(&v1p, &x).ok()?;
    back.as_slice()
        .iter()
        .zip(v2)
        .all(|(a, b)| (a - b).abs() <= TAU_MAJ)
        .then_some(x)
}

/// Circulant stochastic matrix `X` with `v · X = v ⊛ x`; row `j` is `x` shifted right by `j`.
pub fn degradation_kernel(x: &ProbVector) -> Result<Channel> {
    Channel::circulant(x.as_slice())
}

/// Finds row and column permutations turning a 3×3 or 4×4 symmetric channel circulant.
///
/// Returns `(K', R, T)` with `K' = R · K · T`. Permutations are searched in
/// lexicographic order, rows outermost, so an already circulant input comes
/// back with identity permutations. Symmetric channels with the Klein-group
/// layout `[[a,b,c,d],[b,a,d,c],[c,d,a,b],[d,c,b,a]]` and distinct entries have
/// no circulant form and yield [`Error::NoCirculantForm`].
pub fn symmetric_to_circulant(k: &Channel) -> Result<(Channel, PureChannel, PureChannel)> {
    let n = k.rows();
    if !k.is_square() || !(3..=4).contains(&n) {
        return Err(Error::UnsupportedSize(n));
    }
    if !k.is_symmetric_dmc() {
        return Err(Error::NotSymmetric);
    }
    let perms = permutations(n);
    for rp in &perms {
        let r = PureChannel::new(n, rp.clone())?;
        let rk = r.apply_rows(k)?;
        for cp in &perms {
            let t = PureChannel::new(n, cp.clone())?;
            let out = t.apply_cols(&rk)?;
            if out.is_circulant() {
                return Ok((out, r, t));
            }
        }
    }
    Err(Error::NoCirculantForm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BscBecInclusion {
    pub bsc_in_bec: bool,
    pub bec_in_bsc: bool,
}

/// Closed-form inclusion between BSC(p), `p ≤ 1/2`, and BEC(ε).
pub fn bsc_bec_inclusion(p: f64, eps: f64) -> Result<BscBecInclusion> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfRange(format!("crossover {p} outside [0, 1/2]")));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("erasure {eps} outside [0, 1]")));
    }
    Ok(BscBecInclusion { bsc_in_bec: eps <= 2.0 * p + TAU_MAJ, bec_in_bsc: p.abs() <= TAU_MAJ })
}

/// Recognizes `[[1-p, p], [p, 1-p]]` and returns `p` (folded to `≤ 1/2` only if already so).
pub fn as_bsc(k: &Channel) -> Option<f64> {
    if k.shape() != (2, 2) {
        return None;
    }
    let p = k.get(0, 1);
    ((k.get(1, 0) - p).abs() <= TAU_MAJ).then_some(p)
}

/// Recognizes `[[1-ε, ε, 0], [0, ε, 1-ε]]` and returns `ε`.
pub fn as_bec(k: &Channel) -> Option<f64> {
    if k.shape() != (2, 3) {
        return None;
    }
    let eps = k.get(0, 1);
    (k.get(0, 2).abs() <= TAU_MAJ && k.get(1, 0).abs() <= TAU_MAJ && (k.get(1, 1) - eps).abs() <= TAU_MAJ)
        .then_some(eps)
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n)
    }

    // random doubly stochastic matrix as a convex combination of permutations
    fn doubly_stochastic(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec((0usize..120, 0.01f64..1.0), 1..5).prop_map(move |terms| {
            let perms = permutations(n);
            let total: f64 = terms.iter().map(|t| t.1).sum();
            let mut m = vec![vec![0.0; n]; n];
            for (pi, w) in terms {
                let p = &perms[pi % perms.len()];
                for i in 0..n {
                    m[i][p[i]] += w / total;
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn reflexive_and_permutation_invariant(a in vector(6), seed in 0usize..720) {
            prop_assert!(majorizes(&a, &a).unwrap().holds);
            let p = &permutations(6)[seed];
            let shuffled: Vec<f64> = p.iter().map(|&i| a[i]).collect();
            prop_assert!(majorizes(&a, &shuffled).unwrap().holds);
            prop_assert!(majorizes(&shuffled, &a).unwrap().holds);
        }

        #[test]
        fn doubly_stochastic_map_is_majorized(w in vector(4), p in doubly_stochastic(4)) {
            let pw: Vec<f64> = (0..4).map(|i| (0..4).map(|j| p[i][j] * w[j]).sum()).collect();
            prop_assert!(majorizes(&w, &pw).unwrap().holds);
        }

        #[test]
        fn transitive_on_simplex(a in vector(4), p in doubly_stochastic(4), q in doubly_stochastic(4)) {
            let apply = |m: &Vec<Vec<f64>>, v: &[f64]| -> Vec<f64> {
                (0..4).map(|i| (0..4).map(|j| m[i][j] * v[j]).sum()).collect()
            };
            let b = apply(&p, &a);
            let c = apply(&q, &b);
            prop_assert!(majorizes(&a, &b).unwrap().holds && majorizes(&b, &c).unwrap().holds);
            prop_assert!(majorizes(&a, &c).unwrap().holds);
        }
    }
}
