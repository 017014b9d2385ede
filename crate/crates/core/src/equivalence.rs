//! Channel equivalence: `K2 = R · K1 · T` for permutations `R`, `T`.
//!
//! Sufficiency of the permutation form is unconditional, so an `equivalent`
//! verdict is always sound. Treating `not equivalent` as a proof needs the
//! three assumptions reported by [`check_assumptions`].

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::channel::{Channel, PureChannel};
use crate::error::{Error, Result};

/// Eigenvalue multiset comparison tolerance.
pub const TAU_EIG: f64 = 1e-7;
/// Minimum gap between sorted eigenvalues for the spectrum to count as simple.
pub const TAU_GAP: f64 = 1e-6;
/// Strictness margin for the capacity drop test.
pub const TAU_CAP: f64 = 1e-7;
/// Acceptance threshold on `‖R K1 T − K2‖_∞`.
pub const TAU_EQ: f64 = 1e-7;
/// Largest side length searched exhaustively.
pub const EXHAUSTIVE_CAP: usize = 8;

const BA_MAX_ITERS: usize = 1_000_000;
const BA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Capacity {
    /// Bits per channel use.
    pub capacity: f64,
    pub input_dist: Vec<f64>,
    pub iterations: usize,
}

/// Blahut–Arimoto iteration stopped once the upper and lower capacity bounds
/// agree to within `tol` bits. The reported value is the lower bound.
pub fn blahut_arimoto_capacity(k: &Channel, max_iters: usize, tol: f64) -> Result<Capacity> {
    let (n, m) = k.shape();
    let mut p = vec![1.0 / n as f64; n];
    let mut gain = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for it in 1..=max_iters {
        let mut q = vec![0.0; m];
        for (i, &pi) in p.iter().enumerate() {
            for (qj, w) in q.iter_mut().zip(k.row(i)) {
                *qj += pi * w;
            }
        }
        for (i, g) in gain.iter_mut().enumerate() {
            // exp of the divergence between row i and the output law, in nats
            let d: f64 = k
                .row(i)
                .iter()
                .zip(&q)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &qj)| w * (w / qj).ln())
                .sum();
            *g = d.exp();
        }
        let mean: f64 = p.iter().zip(&gain).map(|(a, b)| a * b).sum();
        let lower = mean.ln();
        let upper = gain.iter().copied().fold(f64::MIN, f64::max).ln();
        gap = (upper - lower) / std::f64::consts::LN_2;
        if gap < tol {
            return Ok(Capacity { capacity: lower / std::f64::consts::LN_2, input_dist: p, iterations: it });
        }
        for (pi, g) in p.iter_mut().zip(&gain) {
            *pi *= g / mean;
        }
    }
    Err(Error::NoConvergence { iterations: max_iters, gap })
}

fn capacity(k: &Channel) -> Result<f64> {
    Ok(blahut_arimoto_capacity(k, BA_MAX_ITERS, BA_TOL)?.capacity)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct As1Report {
    pub holds: bool,
    pub capacity: f64,
    /// Capacity after removing each input row in turn.
    pub row_drop_capacities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnReport {
    pub holds: bool,
    pub offending_pair: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// Capacity-achieving inputs use every symbol.
    pub as1: As1Report,
    /// No zero column and no two proportional columns.
    pub as2: ColumnReport,
    /// Sufficient test for the no-self-symmetry assumption: no column is a
    /// multiple of an entry-permuted copy of another column.
    pub as3_sufficient: ColumnReport,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.as1.holds && self.as2.holds && self.as3_sufficient.holds
    }
}

pub fn check_assumptions(k: &Channel) -> Result<AssumptionReport> {
    let (n, m) = k.shape();
    let cap = capacity(k)?;
    let mut drops = Vec::with_capacity(n);
    for skip in 0..n {
        if n == 1 {
            drops.push(0.0);
            continue;
        }
        let data: Vec<f64> = (0..n).filter(|&i| i != skip).flat_map(|i| k.row(i).to_vec()).collect();
        drops.push(capacity(&Channel::from_parts_unchecked(n - 1, m, data))?);
    }
    let as1 = As1Report { holds: drops.iter().all(|&d| d < cap - TAU_CAP), capacity: cap, row_drop_capacities: drops };

    let cols: Vec<Vec<f64>> = (0..m).map(|j| k.column(j)).collect();
    let zero = cols.iter().position(|c| c.iter().all(|&v| v <= crate::channel::TAU_VAL));
    let as2 = match zero {
        Some(j) => ColumnReport { holds: false, offending_pair: Some((j, j)) },
        None => first_pair(&cols, proportional),
    };
    let sorted: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort_by(f64::total_cmp);
            s
        })
        .collect();
    let as3_sufficient = match zero {
        Some(j) => ColumnReport { holds: false, offending_pair: Some((j, j)) },
        None => first_pair(&sorted, proportional),
    };
    Ok(AssumptionReport { as1, as2, as3_sufficient })
}

fn first_pair(cols: &[Vec<f64>], related: impl Fn(&[f64], &[f64]) -> bool) -> ColumnReport {
    for a in 0..cols.len() {
        for b in a + 1..cols.len() {
            if related(&cols[a], &cols[b]) {
                return ColumnReport { holds: false, offending_pair: Some((a, b)) };
            }
        }
    }
    ColumnReport { holds: true, offending_pair: None }
}

/// `a = c·b` for some `c > 0`.
fn proportional(a: &[f64], b: &[f64]) -> bool {
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if sb <= 0.0 {
        return false;
    }
    let c = sa / sb;
    a.iter().zip(b).all(|(x, y)| (x - c * y).abs() <= crate::channel::TAU_VAL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Eigen,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mismatch {
    Shape,
    RowSpectrum,
    ColumnSpectrum,
    NoPermutation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// Input permutation with `K2 = R · K1 · T`.
    pub r: Option<PureChannel>,
    /// Output permutation with `K2 = R · K1 · T`.
    pub t: Option<PureChannel>,
    pub method: Method,
    /// `‖R K1 T − K2‖_∞` for the returned permutations.
    pub residual: Option<f64>,
    /// Why the pair was rejected.
    pub mismatch: Option<Mismatch>,
}

impl EquivalenceVerdict {
    fn rejected(method: Method, why: Mismatch) -> Self {
        EquivalenceVerdict { equivalent: false, r: None, t: None, method, residual: None, mismatch: Some(why) }
    }
}

struct Spectrum {
    values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    vectors: DMatrix<f64>,
}

impl Spectrum {
    fn of(gram: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = eig.eigenvectors.select_columns(&order);
        for mut col in vectors.column_iter_mut() {
            let pivot = col.iter().copied().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            if pivot < 0.0 {
                col.neg_mut();
            }
        }
        Spectrum { values, vectors }
    }

    fn matches(&self, other: &Spectrum) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| (a - b).abs() <= TAU_EIG)
    }

    fn is_simple(&self) -> bool {
        self.values.windows(2).all(|w| w[0] - w[1] > TAU_GAP)
    }
}

fn to_matrix(k: &Channel) -> DMatrix<f64> {
    DMatrix::from_row_slice(k.rows(), k.cols(), k.as_slice())
}

/// Rounds each row to its argmax; `None` unless the result is a permutation.
fn round_to_permutation(m: &DMatrix<f64>) -> Option<PureChannel> {
    let n = m.nrows();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let row = m.row(i);
            (0..n).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap_or(0)
        })
        .collect();
    let p = PureChannel::new(n, map).ok()?;
    p.is_permutation().then_some(p)
}

/// `‖R K1 T − K2‖_∞` (largest entry difference).
pub fn permutation_residual(k1: &Channel, k2: &Channel, r: &PureChannel, t: &PureChannel) -> Result<f64> {
    t.apply_cols(&r.apply_rows(k1)?)?.max_abs_diff(k2)
}

/// Decides whether `K2 = R · K1 · T` for some permutations `R`, `T`.
pub fn decide_equivalence(k1: &Channel, k2: &Channel) -> Result<EquivalenceVerdict> {
    if k1.shape() != k2.shape() {
        return Ok(EquivalenceVerdict::rejected(Method::Eigen, Mismatch::Shape));
    }
    let (a1, a2) = (to_matrix(k1), to_matrix(k2));
    let rows1 = Spectrum::of(&a1 * a1.transpose());
    let rows2 = Spectrum::of(&a2 * a2.transpose());
    if !rows1.matches(&rows2) {
        return Ok(EquivalenceVerdict::rejected(Method::Eigen, Mismatch::RowSpectrum));
    }
    let cols1 = Spectrum::of(a1.transpose() * &a1);
    let cols2 = Spectrum::of(a2.transpose() * &a2);
    if !cols1.matches(&cols2) {
        return Ok(EquivalenceVerdict::rejected(Method::Eigen, Mismatch::ColumnSpectrum));
    }

    if rows1.is_simple() && rows2.is_simple() && cols1.is_simple() && cols2.is_simple() {
        let r = round_to_permutation(&(&rows2.vectors * rows1.vectors.transpose()));
        // the eigenvector relation gives Tᵀ
        let t = round_to_permutation(&(&cols2.vectors * cols1.vectors.transpose()))
            .and_then(|tt| tt.inverse());
        if let (Some(r), Some(t)) = (r, t) {
            let residual = permutation_residual(k1, k2, &r, &t)?;
            if residual <= TAU_EQ {
                return Ok(EquivalenceVerdict {
                    equivalent: true,
                    r: Some(r),
                    t: Some(t),
                    method: Method::Eigen,
                    residual: Some(residual),
                    mismatch: None,
                });
            }
        }
    }
    exhaustive(k1, k2)
}

/// Permutation search with multiset pruning. The first hit in lexicographic
/// order of the row map, then the column map, is returned.
pub fn exhaustive(k1: &Channel, k2: &Channel) -> Result<EquivalenceVerdict> {
    let (n, m) = k1.shape();
    if k2.shape() != (n, m) {
        return Ok(EquivalenceVerdict::rejected(Method::Exhaustive, Mismatch::Shape));
    }
    if n > EXHAUSTIVE_CAP || m > EXHAUSTIVE_CAP {
        let needed = crate::perm::factorial(n) * crate::perm::factorial(m);
        let cap = crate::perm::factorial(EXHAUSTIVE_CAP).pow(2);
        return Err(Error::SizeLimit { what: "permutation pairs", needed, cap });
    }
    let sorted = |v: Vec<f64>| {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v
    };
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TAU_EQ);
    let rows1: Vec<Vec<f64>> = (0..n).map(|i| sorted(k1.row(i).to_vec())).collect();
    let rows2: Vec<Vec<f64>> = (0..n).map(|i| sorted(k2.row(i).to_vec())).collect();
    // candidates[i]: rows of K1 that may land on row i of K2
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&s| close(&rows1[s], &rows2[i])).collect()).collect();
    let mut col_fp1: Vec<Vec<f64>> = (0..m).map(|j| sorted(k1.column(j))).collect();
    let mut col_fp2: Vec<Vec<f64>> = (0..m).map(|j| sorted(k2.column(j))).collect();
    col_fp1.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    col_fp2.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let fingerprints_agree = col_fp1.iter().zip(&col_fp2).all(|(a, b)| close(a, b));
    if !fingerprints_agree || candidates.iter().any(Vec::is_empty) {
        return Ok(EquivalenceVerdict::rejected(Method::Exhaustive, Mismatch::NoPermutation));
    }

    let mut sigma = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let found = search_rows(k1, k2, &candidates, &mut sigma, &mut used);
    Ok(match found {
        Some((r, t)) => {
            let residual = permutation_residual(k1, k2, &r, &t)?;
            EquivalenceVerdict {
                equivalent: true,
                r: Some(r),
                t: Some(t),
                method: Method::Exhaustive,
                residual: Some(residual),
                mismatch: None,
            }
        }
        None => EquivalenceVerdict::rejected(Method::Exhaustive, Mismatch::NoPermutation),
    })
}

fn search_rows(
    k1: &Channel,
    k2: &Channel,
    candidates: &[Vec<usize>],
    sigma: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<(PureChannel, PureChannel)> {
    let i = sigma.len();
    if i == candidates.len() {
        let r = PureChannel::new(k1.rows(), sigma.clone()).ok()?;
        let rk = r.apply_rows(k1).ok()?;
        let t = match_columns(&rk, k2)?;
        return Some((r, t));
    }
    for &s in &candidates[i] {
        if used[s] {
            continue;
        }
        used[s] = true;
        sigma.push(s);
        if let Some(hit) = search_rows(k1, k2, candidates, sigma, used) {
            return Some(hit);
        }
        sigma.pop();
        used[s] = false;
    }
    None
}

/// Finds a permutation `T` with `rk · T = k2` by matching whole columns.
fn match_columns(rk: &Channel, k2: &Channel) -> Option<PureChannel> {
    let m = rk.cols();
    let cols1: Vec<Vec<f64>> = (0..m).map(|j| rk.column(j)).collect();
    let cols2: Vec<Vec<f64>> = (0..m).map(|j| k2.column(j)).collect();
    let fits: Vec<Vec<usize>> = (0..m)
        .map(|j| {
            (0..m)
                .filter(|&b| cols1[b].iter().zip(&cols2[j]).all(|(x, y)| (x - y).abs() <= TAU_EQ))
                .collect()
        })
        .collect();
    // source[j] = column of rk that becomes column j
    let mut source = Vec::with_capacity(m);
    let mut used = vec![false; m];
    fn assign(fits: &[Vec<usize>], source: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let j = source.len();
        if j == fits.len() {
            return true;
        }
        for &b in &fits[j] {
            if !used[b] {
                used[b] = true;
                source.push(b);
                if assign(fits, source, used) {
                    return true;
                }
                source.pop();
                used[b] = false;
            }
        }
        false
    }
    if !assign(&fits, &mut source, &mut used) {
        return None;
    }
    let mut map = vec![0; m];
    for (j, &b) in source.iter().enumerate() {
        map[b] = j;
    }
    PureChannel::new(m, map).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::validate;
    use crate::perm::permutations;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    fn random_channel(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Channel {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let r: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            })
            .collect();
        validate(&rows).unwrap()
    }

    fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> PureChannel {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, rng.gen_range(0..=i));
        }
        PureChannel::new(n, p).unwrap()
    }

    fn mutual_majorization_pair() -> (Channel, Channel) {
        let f = |rows: [[u32; 5]; 5]| {
            validate(&rows.iter().map(|r| r.iter().map(|&v| v as f64 / 15.0).collect()).collect::<Vec<_>>())
                .unwrap()
        };
        (
            f([[1, 2, 3, 4, 5], [5, 1, 2, 3, 4], [4, 5, 1, 2, 3], [3, 4, 5, 1, 2], [2, 3, 4, 5, 1]]),
            f([[1, 2, 3, 4, 5], [5, 1, 2, 3, 4], [3, 4, 1, 5, 2], [2, 5, 4, 1, 3], [4, 3, 5, 2, 1]]),
        )
    }

    #[test]
    fn capacity_examples() {
        let c = blahut_arimoto_capacity(&Channel::bsc(0.1).unwrap(), 10_000, 1e-12).unwrap();
        assert!((c.capacity - (1.0 - h2(0.1))).abs() < 1e-6);
        assert!((c.capacity - 0.531004).abs() < 1e-6);
        let id = blahut_arimoto_capacity(&Channel::identity(5), 10, 1e-12).unwrap();
        assert!((id.capacity - 5f64.log2()).abs() < 1e-12);
        let u = blahut_arimoto_capacity(&Channel::uniform(3, 4), 10, 1e-12).unwrap();
        assert!(u.capacity.abs() < 1e-12);
    }

    #[test]
    fn capacity_reports_non_convergence() {
        // Z channel: optimum input is not uniform, one iteration is not enough
        let z = validate(&[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(blahut_arimoto_capacity(&z, 1, 1e-12), Err(Error::NoConvergence { .. })));
        let c = blahut_arimoto_capacity(&z, 100_000, 1e-12).unwrap();
        // closed form: log2(1 + 2^{-H(1/2)/(1/2)}) = log2(5/4)
        assert!((c.capacity - (1.25f64).log2()).abs() < 1e-9);
    }

    #[test]
    fn capacity_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let k = random_channel(&mut rng, 3, 4);
            let r = random_perm(&mut rng, 3);
            let t = random_perm(&mut rng, 4);
            let kp = t.apply_cols(&r.apply_rows(&k).unwrap()).unwrap();
            let a = blahut_arimoto_capacity(&k, 1_000_000, 1e-11).unwrap().capacity;
            let b = blahut_arimoto_capacity(&kp, 1_000_000, 1e-11).unwrap().capacity;
            assert!((a - b).abs() < 1e-9);
        }
    }

    /// Brute force over `K = P1 K P2 D`; true iff only the identity triple works.
    fn as3_oracle(k: &Channel) -> bool {
        let (n, m) = k.shape();
        for rp in permutations(n) {
            for cp in permutations(m) {
                let identity = rp.iter().enumerate().all(|(i, &v)| i == v) && cp.iter().enumerate().all(|(i, &v)| i == v);
                // M[i][j] = K[rp[i]][cp[j]]
                let mut d = vec![0.0; m];
                let mut ok = true;
                for j in 0..m {
                    let mcol: Vec<f64> = (0..n).map(|i| k.get(rp[i], cp[j])).collect();
                    let s: f64 = mcol.iter().sum();
                    if s <= 0.0 {
                        ok = false;
                        break;
                    }
                    d[j] = k.column(j).iter().sum::<f64>() / s;
                    ok &= (0..n).all(|i| (k.get(i, j) - d[j] * mcol[i]).abs() <= 1e-12);
                }
                let d_identity = d.iter().all(|&x| (x - 1.0).abs() <= 1e-12);
                if ok && !(identity && d_identity) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn bsc_assumptions() {
        let rep = check_assumptions(&Channel::bsc(0.1).unwrap()).unwrap();
        assert!(rep.as1.holds);
        assert_eq!(rep.as1.row_drop_capacities.len(), 2);
        assert!(rep.as2.holds);
        // swapping both rows and columns maps BSC to itself
        assert!(!rep.as3_sufficient.holds);
        assert_eq!(rep.as3_sufficient.offending_pair, Some((0, 1)));
        assert!(!as3_oracle(&Channel::bsc(0.1).unwrap()));
    }

    #[test]
    fn column_assumption_failures() {
        let dup = validate(&[vec![0.2, 0.2, 0.6], vec![0.3, 0.3, 0.4]]).unwrap();
        let rep = check_assumptions(&dup).unwrap();
        assert!(!rep.as2.holds);
        assert_eq!(rep.as2.offending_pair, Some((0, 1)));
        let zero = validate(&[vec![0.2, 0.8, 0.0], vec![0.7, 0.3, 0.0]]).unwrap();
        let rep = check_assumptions(&zero).unwrap();
        assert!(!rep.as2.holds);
        assert_eq!(rep.as2.offending_pair, Some((2, 2)));
    }

    #[test]
    fn as1_fails_for_a_useless_input() {
        // third input is the mixture of the first two and never helps
        let k = validate(&[vec![0.9, 0.1], vec![0.1, 0.9], vec![0.5, 0.5]]).unwrap();
        let rep = check_assumptions(&k).unwrap();
        assert!(!rep.as1.holds);
        assert!((rep.as1.row_drop_capacities[2] - rep.as1.capacity).abs() < 1e-8);
    }

    #[test]
    fn as3_sufficient_agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..60 {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(2..=4);
            let k = random_channel(&mut rng, n, m);
            if check_assumptions(&k).unwrap().as3_sufficient.holds {
                assert!(as3_oracle(&k));
                checked += 1;
            }
        }
        assert!(checked > 10);
        for k in [Channel::bsc(0.2).unwrap(), Channel::circulant(&[0.5, 0.3, 0.2]).unwrap()] {
            let rep = check_assumptions(&k).unwrap();
            assert!(!rep.as3_sufficient.holds);
            assert!(!as3_oracle(&k));
        }
    }

    #[test]
    fn planted_permutations_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k1 = random_channel(&mut rng, 4, 4);
        let p = random_perm(&mut rng, 4);
        let q = random_perm(&mut rng, 4);
        let k2 = q.apply_cols(&p.apply_rows(&k1).unwrap()).unwrap();
        let v = decide_equivalence(&k1, &k2).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.method, Method::Eigen);
        assert!(v.residual.unwrap() < 1e-9);
        let back = permutation_residual(&k1, &k2, v.r.as_ref().unwrap(), v.t.as_ref().unwrap()).unwrap();
        assert!(back < 1e-9);
    }

    #[test]
    fn mutual_majorization_pair_is_not_equivalent() {
        let (k1, k2) = mutual_majorization_pair();
        let v = decide_equivalence(&k1, &k2).unwrap();
        assert!(!v.equivalent);
        assert_eq!(v.mismatch, Some(Mismatch::RowSpectrum));
        assert!(!decide_equivalence(&k2, &k1).unwrap().equivalent);
    }

    #[test]
    fn self_equivalence_and_degenerate_spectra() {
        let k = Channel::bsc(0.1).unwrap();
        let v = decide_equivalence(&k, &k).unwrap();
        assert!(v.equivalent);
        assert!(v.residual.unwrap() <= TAU_EQ);
        assert_eq!(v.r, Some(PureChannel::identity(2)));
        assert_eq!(v.t, Some(PureChannel::identity(2)));

        let c = Channel::circulant(&[0.6, 0.3, 0.1]).unwrap();
        let shuffled = PureChannel::new(3, vec![2, 0, 1]).unwrap().apply_rows(&c).unwrap();
        // circulant spectra come in repeated pairs
        let v = decide_equivalence(&c, &shuffled).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.method, Method::Exhaustive);
    }

    #[test]
    fn shape_mismatch_is_not_equivalent() {
        let v = decide_equivalence(&Channel::bsc(0.1).unwrap(), &Channel::bec(0.1).unwrap()).unwrap();
        assert!(!v.equivalent);
        assert_eq!(v.mismatch, Some(Mismatch::Shape));
    }

    #[test]
    fn exhaustive_size_limit() {
        let k = Channel::uniform(9, 2);
        assert!(matches!(exhaustive(&k, &k), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn verdict_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.gen_range(2..=4);
            let k1 = random_channel(&mut rng, n, n);
            let k2 = if rng.gen_bool(0.5) {
                let p = random_perm(&mut rng, n);
                let q = random_perm(&mut rng, n);
                q.apply_cols(&p.apply_rows(&k1).unwrap()).unwrap()
            } else {
                random_channel(&mut rng, n, n)
            };
            assert_eq!(
                decide_equivalence(&k1, &k2).unwrap().equivalent,
                decide_equivalence(&k2, &k1).unwrap().equivalent
            );
        }
    }
}
