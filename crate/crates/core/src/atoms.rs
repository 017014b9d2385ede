//! Pure-channel atoms and the measurement system `A·g = h`.
//!
//! Atom `α` is a pair `(R, T)` of pure channels with `R: n2×n1` and
//! `T: m1×m2`. Atoms are indexed `α = r·|T| + t`, with both lists in
//! lexicographic order (row 0 most significant). Column `α` of `A` is the
//! column-stacked `vec(R·K1·T)` and `h = vec(K2)`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, PureChannel};
use crate::error::{Error, Result};

/// Largest atom list or atom count built without sampling.
pub const ENUMERATION_CAP: u128 = 1_000_000;
/// Columns closer than this entrywise are merged by dedup.
pub const DEDUP_TOL: f64 = 1e-12;
/// Tolerance on the weight sum of a certificate.
pub const WEIGHT_SUM_TOL: f64 = 1e-8;

const CACHE_MAGIC: &[u8; 8] = b"CHINCATM";
const CACHE_VERSION: u32 = 1;

/// All `n_to^n_from` pure channels `n_from × n_to`, lexicographic.
pub fn enumerate_pure(n_from: usize, n_to: usize) -> Result<Vec<PureChannel>> {
    let count = (n_to as u128).checked_pow(n_from as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(Error::SizeLimit { what: "pure channels", needed: count, cap: ENUMERATION_CAP });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; n_from];
    loop {
        out.push(PureChannel::new(n_to, digits.clone())?);
        // odometer with the last row least significant
        let mut pos = n_from;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < n_to {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Atom count bound from Carathéodory: `n2(m2−1)+1`, or `(n−1)²+1` for a
/// doubly stochastic `n×n` pair.
pub fn caratheodory_bound(n2: usize, m2: usize, doubly_stochastic: bool) -> Result<usize> {
    if n2 == 0 || m2 == 0 {
        return Err(Error::EmptyMatrix);
    }
    if doubly_stochastic {
        if n2 != m2 {
            return Err(Error::ShapeMismatch(format!("doubly stochastic bound needs a square shape, got {n2}x{m2}")));
        }
        return Ok((n2 - 1) * (n2 - 1) + 1);
    }
    Ok(n2 * (m2 - 1) + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomSystem {
    k1: Channel,
    k2: Channel,
    r_atoms: Vec<PureChannel>,
    t_atoms: Vec<PureChannel>,
    /// Column-major `p × columns`.
    a: Vec<f64>,
    h: Vec<f64>,
    /// Atom index owning each stored column.
    column_atom: Vec<usize>,
    /// Atom index → stored column.
    dedup_map: Vec<usize>,
    dedup: bool,
}

impl AtomSystem {
    /// Full pure-atom system for `K2 ⊆ K1`.
    pub fn build(k1: &Channel, k2: &Channel, dedup: bool) -> Result<Self> {
        let r_atoms = enumerate_pure(k2.rows(), k1.rows())?;
        let t_atoms = enumerate_pure(k1.cols(), k2.cols())?;
        Self::from_lists(k1, k2, r_atoms, t_atoms, dedup)
    }

    /// Atoms restricted to permutation pairs; both channels must be
    /// doubly stochastic of the same size.
    pub fn build_permutation_restricted(k1: &Channel, k2: &Channel, dedup: bool) -> Result<Self> {
        check_doubly_stochastic_pair(k1, k2)?;
        let n = k1.rows();
        let needed = crate::perm::factorial(n).pow(2);
        if needed > ENUMERATION_CAP {
            return Err(Error::SizeLimit { what: "permutation atoms", needed, cap: ENUMERATION_CAP });
        }
        let perms: Vec<PureChannel> =
            crate::perm::permutations(n).into_iter().map(|p| PureChannel::new(n, p)).collect::<Result<_>>()?;
        Self::from_lists(k1, k2, perms.clone(), perms, dedup)
    }

    /// Keeps only the atoms whose `R` and `T` are both permutations.
    pub fn restrict_to_permutations(&self) -> Result<Self> {
        check_doubly_stochastic_pair(&self.k1, &self.k2)?;
        let r = self.r_atoms.iter().filter(|p| p.is_permutation()).cloned().collect();
        let t = self.t_atoms.iter().filter(|p| p.is_permutation()).cloned().collect();
        Self::from_lists(&self.k1, &self.k2, r, t, self.dedup)
    }

    fn from_lists(
        k1: &Channel,
        k2: &Channel,
        r_atoms: Vec<PureChannel>,
        t_atoms: Vec<PureChannel>,
        dedup: bool,
    ) -> Result<Self> {
        let (n1, m1) = k1.shape();
        let (n2, m2) = k2.shape();
        if r_atoms.iter().any(|r| r.rows() != n2 || r.cols() != n1)
            || t_atoms.iter().any(|t| t.rows() != m1 || t.cols() != m2)
        {
            return Err(Error::ShapeMismatch("atom lists do not fit the channel shapes".into()));
        }
        let q = r_atoms.len() as u128 * t_atoms.len() as u128;
        if q > ENUMERATION_CAP {
            return Err(Error::SizeLimit { what: "atoms", needed: q, cap: ENUMERATION_CAP });
        }
        let q = q as usize;
        let p = n2 * m2;
        let mut a: Vec<f64> = Vec::with_capacity(p * q);
        let mut column_atom = Vec::with_capacity(q);
        let mut dedup_map = Vec::with_capacity(q);
        let mut seen: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let k1t: Vec<Channel> = t_atoms.iter().map(|t| t.apply_cols(k1)).collect::<Result<_>>()?;
        let mut col = vec![0.0; p];
        for r in &r_atoms {
            for kt in &k1t {
                for j in 0..m2 {
                    for i in 0..n2 {
                        col[j * n2 + i] = kt.get(r.target(i), j);
                    }
                }
                let alpha = dedup_map.len();
                if dedup {
                    let key: Vec<i64> = col.iter().map(|v| (v / DEDUP_TOL).round() as i64).collect();
                    let bucket = seen.entry(key).or_default();
                    let hit = bucket.iter().copied().find(|&c| {
                        a[c * p..(c + 1) * p].iter().zip(&col).all(|(x, y)| (x - y).abs() <= DEDUP_TOL)
                    });
                    if let Some(c) = hit {
                        dedup_map.push(c);
                        continue;
                    }
                    bucket.push(column_atom.len());
                }
                dedup_map.push(column_atom.len());
                column_atom.push(alpha);
                a.extend_from_slice(&col);
            }
        }
        Ok(AtomSystem {
            k1: k1.clone(),
            k2: k2.clone(),
            r_atoms,
            t_atoms,
            a,
            h: k2.vec_columns(),
            column_atom,
            dedup_map,
            dedup,
        })
    }

    pub fn k1(&self) -> &Channel {
        &self.k1
    }

    pub fn k2(&self) -> &Channel {
        &self.k2
    }

    /// Measurement length `n2·m2`.
    pub fn p(&self) -> usize {
        self.h.len()
    }

    /// Number of atoms before dedup.
    pub fn atom_count(&self) -> usize {
        self.dedup_map.len()
    }

    /// Number of stored columns of `A`.
    pub fn num_columns(&self) -> usize {
        self.column_atom.len()
    }

    pub fn is_deduped(&self) -> bool {
        self.dedup
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Column-major storage of `A`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn column(&self, c: usize) -> &[f64] {
        let p = self.p();
        &self.a[c * p..(c + 1) * p]
    }

    pub fn atom_of_column(&self, c: usize) -> usize {
        self.column_atom[c]
    }

    pub fn column_of_atom(&self, alpha: usize) -> usize {
        self.dedup_map[alpha]
    }

    pub fn dedup_map(&self) -> &[usize] {
        &self.dedup_map
    }

    /// `(R_α, T_α)`.
    pub fn atom(&self, alpha: usize) -> Result<(&PureChannel, &PureChannel)> {
        if alpha >= self.atom_count() {
            return Err(Error::IndexOutOfRange { index: alpha, len: self.atom_count() });
        }
        let nt = self.t_atoms.len();
        Ok((&self.r_atoms[alpha / nt], &self.t_atoms[alpha % nt]))
    }

    /// Same atoms with the stored columns in a seeded random order.
    pub fn shuffled(&self, seed: u64) -> Self {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut order: Vec<usize> = (0..self.num_columns()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let p = self.p();
        let mut out = self.clone();
        let mut position = vec![0; order.len()];
        out.a.clear();
        out.column_atom.clear();
        for (new, &old) in order.iter().enumerate() {
            out.a.extend_from_slice(self.column(old));
            out.column_atom.push(self.column_atom[old]);
            position[old] = new;
        }
        debug_assert_eq!(out.a.len(), p * order.len());
        for c in out.dedup_map.iter_mut() {
            *c = position[*c];
        }
        out
    }

    /// `‖Σ w·col − h‖_∞` over `(column, weight)` pairs.
    pub fn column_residual(&self, columns: &[usize], weights: &[f64]) -> f64 {
        let mut acc = vec![0.0; self.p()];
        for (&c, &w) in columns.iter().zip(weights) {
            for (a, v) in acc.iter_mut().zip(self.column(c)) {
                *a += w * v;
            }
        }
        acc.iter().zip(&self.h).map(|(a, h)| (a - h).abs()).fold(0.0, f64::max)
    }

    /// Certificate over atoms from weights on stored columns.
    pub fn certificate_from_columns(&self, columns: &[usize], weights: &[f64]) -> InclusionCertificate {
        InclusionCertificate {
            atom_indices: columns.iter().map(|&c| self.column_atom[c]).collect(),
            weights: weights.to_vec(),
            residual_inf: self.column_residual(columns, weights),
        }
    }

    /// Certificate from a dense weight vector over stored columns, dropping
    /// weights at or below `floor`.
    pub fn certificate_from_dense(&self, g: &[f64], floor: f64) -> InclusionCertificate {
        let (cols, w): (Vec<usize>, Vec<f64>) =
            g.iter().enumerate().filter(|(_, &v)| v > floor).map(|(c, &v)| (c, v)).unzip();
        self.certificate_from_columns(&cols, &w)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = Vec::new();
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.push(self.dedup as u8);
        for k in [&self.k1, &self.k2] {
            put_usize(&mut out, k.rows());
            put_usize(&mut out, k.cols());
            k.as_slice().iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        }
        for list in [&self.r_atoms, &self.t_atoms] {
            put_usize(&mut out, list.len());
            for atom in list {
                put_usize(&mut out, atom.cols());
                put_usize(&mut out, atom.rows());
                atom.map().iter().for_each(|&c| put_usize(&mut out, c));
            }
        }
        put_usize(&mut out, self.column_atom.len());
        self.column_atom.iter().for_each(|&c| put_usize(&mut out, c));
        self.dedup_map.iter().for_each(|&c| put_usize(&mut out, c));
        self.a.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        std::fs::File::create(path)?.write_all(&out)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(8)? != CACHE_MAGIC {
            return Err(Error::Cache("not an atom cache file".into()));
        }
        let version = u32::from_le_bytes(cur.take(4)?.try_into().expect("4 bytes"));
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("cache version {version}, expected {CACHE_VERSION}")));
        }
        let dedup = cur.take(1)?[0] != 0;
        let channel = |cur: &mut Cursor| -> Result<Channel> {
            let (r, c) = (cur.usize()?, cur.usize()?);
            let data = (0..r * c).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
            Channel::from_row_major(r, c, data)
        };
        let k1 = channel(&mut cur)?;
        let k2 = channel(&mut cur)?;
        let mut lists = Vec::new();
        for _ in 0..2 {
            let len = cur.usize()?;
            let mut list = Vec::with_capacity(len.min(1 << 20));
            for _ in 0..len {
                let (cols, rows) = (cur.usize()?, cur.usize()?);
                let map = (0..rows).map(|_| cur.usize()).collect::<Result<Vec<_>>>()?;
                list.push(PureChannel::new(cols, map)?);
            }
            lists.push(list);
        }
        let t_atoms = lists.pop().expect("two lists");
        let r_atoms = lists.pop().expect("two lists");
        let ncols = cur.usize()?;
        let column_atom = (0..ncols).map(|_| cur.usize()).collect::<Result<Vec<_>>>()?;
        let q = r_atoms.len() * t_atoms.len();
        let dedup_map = (0..q).map(|_| cur.usize()).collect::<Result<Vec<_>>>()?;
        let p = k2.rows() * k2.cols();
        let a = (0..p * ncols).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        if cur.pos != bytes.len() {
            return Err(Error::Cache("trailing bytes".into()));
        }
        let h = k2.vec_columns();
        Ok(AtomSystem { k1, k2, r_atoms, t_atoms, a, h, column_atom, dedup_map, dedup })
    }

    /// Loads `path` when it holds a system for the same channels and dedup
    /// setting, otherwise builds one with `build` and writes it there.
    pub fn load_or_build(
        path: impl AsRef<Path>,
        k1: &Channel,
        k2: &Channel,
        dedup: bool,
        build: impl FnOnce() -> Result<Self>,
    ) -> Result<Self> {
        let path = path.as_ref();
        if path.exists() {
            if let Ok(sys) = Self::load(path) {
                if &sys.k1 == k1 && &sys.k2 == k2 && sys.dedup == dedup {
                    return Ok(sys);
                }
            }
        }
        let sys = build()?;
        sys.save(path)?;
        Ok(sys)
    }
}

fn check_doubly_stochastic_pair(k1: &Channel, k2: &Channel) -> Result<()> {
    if !k1.is_doubly_stochastic() || !k2.is_doubly_stochastic() {
        return Err(Error::NotDoublyStochastic);
    }
    if k1.shape() != k2.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", k1.shape(), k2.shape())));
    }
    Ok(())
}

fn put_usize(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u64).to_le_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Cache("truncated file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn usize(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")) as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Weights over atoms of a specific [`AtomSystem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCertificate {
    pub atom_indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub residual_inf: f64,
}

impl InclusionCertificate {
    pub fn len(&self) -> usize {
        self.atom_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atom_indices.is_empty()
    }

    /// Expands atom indices into explicit `(R, T)` matrices.
    pub fn to_explicit(&self, sys: &AtomSystem) -> Result<ExplicitCertificate> {
        let terms = self
            .atom_indices
            .iter()
            .zip(&self.weights)
            .map(|(&alpha, &weight)| {
                let (r, t) = sys.atom(alpha)?;
                Ok(CertificateTerm { weight, input: r.to_channel(), output: t.to_channel() })
            })
            .collect::<Result<_>>()?;
        Ok(ExplicitCertificate { terms })
    }
}

fn weights_are_probability(weights: &[f64], tol: f64) -> bool {
    let sum: f64 = weights.iter().sum();
    weights.iter().all(|&w| w >= 0.0) && (sum - 1.0).abs() <= tol.max(WEIGHT_SUM_TOL)
}

/// Recomputes the residual of `cert` on `sys` and checks it is at most `tol`
/// with probability weights.
pub fn verify_certificate(sys: &AtomSystem, cert: &InclusionCertificate, tol: f64) -> Result<bool> {
    if cert.atom_indices.len() != cert.weights.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} atoms but {} weights",
            cert.atom_indices.len(),
            cert.weights.len()
        )));
    }
    let cols = cert
        .atom_indices
        .iter()
        .map(|&alpha| {
            if alpha >= sys.atom_count() {
                Err(Error::IndexOutOfRange { index: alpha, len: sys.atom_count() })
            } else {
                Ok(sys.column_of_atom(alpha))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = sys.column_residual(&cols, &cert.weights);
    Ok(weights_are_probability(&cert.weights, tol) && residual <= tol)
}

/// One term `weight · input · K1 · output`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub weight: f64,
    /// Input processing `R` (`n2 × n1`).
    pub input: Channel,
    /// Output processing `T` (`m1 × m2`).
    pub output: Channel,
}

/// Certificate with explicit (not necessarily pure) processing channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitCertificate {
    pub terms: Vec<CertificateTerm>,
}

impl ExplicitCertificate {
    /// `Σ g_α R_α K1 T_α`.
    pub fn combine(&self, k1: &Channel) -> Result<Channel> {
        let first = self.terms.first().ok_or(Error::EmptyMatrix)?;
        let (rows, cols) = (first.input.rows(), first.output.cols());
        let mut acc = vec![0.0; rows * cols];
        for term in &self.terms {
            let m = term.input.matmul(k1)?.matmul(&term.output)?;
            if m.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch("certificate terms disagree on shape".into()));
            }
            for (a, v) in acc.iter_mut().zip(m.as_slice()) {
                *a += term.weight * v;
            }
        }
        Ok(Channel::from_parts_unchecked(rows, cols, acc))
    }

    /// Largest entry of `|Σ g_α R_α K1 T_α − K2|`.
    pub fn residual(&self, k1: &Channel, k2: &Channel) -> Result<f64> {
        self.combine(k1)?.max_abs_diff(k2)
    }

    pub fn verify(&self, k1: &Channel, k2: &Channel, tol: f64) -> Result<bool> {
        let w: Vec<f64> = self.terms.iter().map(|t| t.weight).collect();
        Ok(weights_are_probability(&w, tol) && self.residual(k1, k2)? <= tol)
    }
}

/// Lifts a certificate of `K2 ⊆ K1` to one of `K2^{⊗N} ⊆ K1^{⊗N}` with
/// `β^N` terms, enumerated with the first factor most significant.
pub fn kron_lift_certificate(cert: &ExplicitCertificate, n: usize) -> Result<ExplicitCertificate> {
    if n == 0 {
        return Err(Error::OutOfRange("Kronecker order must be positive".into()));
    }
    let beta = cert.terms.len();
    let count = (beta as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(Error::SizeOverflow(format!("{beta}^{n} lifted terms")));
    }
    let mut terms = cert.terms.clone();
    for _ in 1..n {
        let mut next = Vec::with_capacity(terms.len() * beta);
        for a in &terms {
            for b in &cert.terms {
                next.push(CertificateTerm {
                    weight: a.weight * b.weight,
                    input: a.input.kron(&b.input)?,
                    output: a.output.kron(&b.output)?,
                });
            }
        }
        terms = next;
    }
    Ok(ExplicitCertificate { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{kron_power, validate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_stochastic(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Channel {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let r: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            })
            .collect();
        validate(&rows).unwrap()
    }

    fn planted(rng: &mut ChaCha8Rng, k1: &Channel, n2: usize, m2: usize, beta: usize) -> ExplicitCertificate {
        let g: Vec<f64> = (0..beta).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = g.iter().sum();
        ExplicitCertificate {
            terms: g
                .into_iter()
                .map(|w| CertificateTerm {
                    weight: w / s,
                    input: random_stochastic(rng, n2, k1.rows()),
                    output: random_stochastic(rng, k1.cols(), m2),
                })
                .collect(),
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_pure(2, 2).unwrap().len(), 4);
        assert_eq!(enumerate_pure(1, 5).unwrap().len(), 5);
        let e = enumerate_pure(3, 2).unwrap();
        assert_eq!(e.len(), 8);
        assert_eq!(e[0].map(), &[0, 0, 0]);
        assert_eq!(e[1].map(), &[0, 0, 1]);
        assert_eq!(e[7].map(), &[1, 1, 1]);
        assert!(matches!(enumerate_pure(21, 2), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn caratheodory_examples() {
        assert_eq!(caratheodory_bound(3, 3, false).unwrap(), 7);
        assert_eq!(caratheodory_bound(3, 3, true).unwrap(), 5);
        assert_eq!(caratheodory_bound(4, 3, false).unwrap(), 9);
        assert!(matches!(caratheodory_bound(4, 3, true), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn system_sizes_and_vec_orientation() {
        let bsc = Channel::bsc(0.1).unwrap();
        let sys = AtomSystem::build(&bsc, &bsc, false).unwrap();
        assert_eq!((sys.p(), sys.atom_count(), sys.num_columns()), (4, 16, 16));
        let dedup = AtomSystem::build(&bsc, &bsc, true).unwrap();
        assert!(dedup.num_columns() < 16);
        assert_eq!(dedup.atom_count(), 16);

        let id = AtomSystem::build(&bsc, &Channel::identity(2), false).unwrap();
        assert_eq!(id.h(), &[1.0, 0.0, 0.0, 1.0]);
        let k = validate(&[vec![0.6, 0.3, 0.1], vec![0.2, 0.5, 0.3], vec![0.1, 0.1, 0.8]]).unwrap();
        assert_eq!(AtomSystem::build(&k, &k, false).unwrap().atom_count(), 729);
        let k2 = validate(&[vec![0.7, 0.3], vec![0.6, 0.4]]).unwrap();
        assert_eq!(AtomSystem::build(&k, &k2, false).unwrap().h(), &[0.7, 0.6, 0.3, 0.4]);
    }

    #[test]
    fn columns_match_direct_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k1 = random_stochastic(&mut rng, 3, 2);
        let k2 = random_stochastic(&mut rng, 2, 3);
        let sys = AtomSystem::build(&k1, &k2, false).unwrap();
        assert_eq!(sys.atom_count(), 9 * 9);
        for alpha in [0, 5, 50, sys.atom_count() - 1] {
            let (r, t) = sys.atom(alpha).unwrap();
            let direct = r.to_channel().matmul(&k1).unwrap().matmul(&t.to_channel()).unwrap();
            for (x, y) in direct.vec_columns().iter().zip(sys.column(alpha)) {
                assert!((x - y).abs() < 1e-15);
            }
            // stochasticity fingerprint
            assert!((sys.column(alpha).iter().sum::<f64>() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dedup_map_points_at_equal_columns() {
        let k = Channel::bec(0.3).unwrap();
        let raw = AtomSystem::build(&k, &Channel::bsc(0.1).unwrap(), false).unwrap();
        let dd = AtomSystem::build(&k, &Channel::bsc(0.1).unwrap(), true).unwrap();
        assert!(dd.num_columns() < raw.num_columns());
        for alpha in 0..raw.atom_count() {
            let c = dd.column_of_atom(alpha);
            assert_eq!(raw.column(alpha), dd.column(c));
            assert_eq!(dd.column_of_atom(dd.atom_of_column(c)), c);
        }
    }

    #[test]
    fn permutation_restriction_counts() {
        let c3 = Channel::circulant(&[0.5, 0.3, 0.2]).unwrap();
        let full = AtomSystem::build(&c3, &c3, false).unwrap();
        let restricted = full.restrict_to_permutations().unwrap();
        assert_eq!(restricted.atom_count(), 36);
        assert_eq!(restricted, AtomSystem::build_permutation_restricted(&c3, &c3, false).unwrap());
        let b = Channel::bsc(0.2).unwrap();
        assert_eq!(AtomSystem::build_permutation_restricted(&b, &b, false).unwrap().atom_count(), 4);
        let k = validate(&[vec![0.7, 0.3], vec![0.6, 0.4]]).unwrap();
        assert!(matches!(
            AtomSystem::build_permutation_restricted(&k, &k, false),
            Err(Error::NotDoublyStochastic)
        ));
        let c5 = Channel::circulant(&[0.4, 0.3, 0.1, 0.1, 0.1]).unwrap();
        assert_eq!(AtomSystem::build_permutation_restricted(&c5, &c5, true).unwrap().atom_count(), 14_400);
    }

    #[test]
    fn certificate_checks() {
        let k1 = Channel::bsc(0.1).unwrap();
        let sys = AtomSystem::build(&k1, &k1, false).unwrap();
        // identity pair is atom 1·4 + 1 = 5: R = [0,1], T = [0,1]
        let (r, t) = sys.atom(5).unwrap();
        assert_eq!((r.map(), t.map()), (&[0usize, 1][..], &[0usize, 1][..]));
        let cert = sys.certificate_from_columns(&[5], &[1.0]);
        assert_eq!(cert.residual_inf, 0.0);
        assert!(verify_certificate(&sys, &cert, 1e-8).unwrap());
        let half = InclusionCertificate { weights: vec![0.5], ..cert.clone() };
        assert!(!verify_certificate(&sys, &half, 1e-8).unwrap());
        let bad = InclusionCertificate { atom_indices: vec![16], ..cert };
        assert!(matches!(verify_certificate(&sys, &bad, 1e-8), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn kron_lift_single_and_planted() {
        let k1 = Channel::bsc(0.1).unwrap();
        let swap = PureChannel::new(2, vec![1, 0]).unwrap().to_channel();
        let one = ExplicitCertificate {
            terms: vec![CertificateTerm { weight: 1.0, input: swap.clone(), output: swap.clone() }],
        };
        assert!(one.verify(&k1, &k1, 1e-12).unwrap());
        let lifted = kron_lift_certificate(&one, 2).unwrap();
        assert_eq!(lifted.terms.len(), 1);
        assert_eq!(lifted.terms[0].input, swap.kron(&swap).unwrap());
        let k1sq = kron_power(&k1, 2).unwrap();
        assert!(lifted.residual(&k1sq, &k1sq).unwrap() < 1e-9);
        assert_eq!(kron_lift_certificate(&one, 1).unwrap(), one);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k1 = random_stochastic(&mut rng, 2, 2);
        let cert = planted(&mut rng, &k1, 2, 2, 2);
        let k2 = cert.combine(&k1).unwrap();
        let lifted = kron_lift_certificate(&cert, 2).unwrap();
        assert_eq!(lifted.terms.len(), 4);
        let wsum: f64 = lifted.terms.iter().map(|t| t.weight).sum();
        assert!((wsum - 1.0).abs() < 1e-12);
        let res = lifted.residual(&kron_power(&k1, 2).unwrap(), &kron_power(&k2, 2).unwrap()).unwrap();
        assert!(res < 1e-9);
    }

    #[test]
    fn explicit_from_atoms_matches_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k1 = random_stochastic(&mut rng, 2, 3);
        let k2 = random_stochastic(&mut rng, 2, 2);
        let sys = AtomSystem::build(&k1, &k2, false).unwrap();
        let cert = sys.certificate_from_columns(&[3, 17, 30], &[0.2, 0.3, 0.5]);
        let explicit = cert.to_explicit(&sys).unwrap();
        assert!((explicit.residual(&k1, &k2).unwrap() - cert.residual_inf).abs() < 1e-14);
    }

    #[test]
    fn cache_round_trip_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("atoms.bin");
        let k = Channel::bec(0.2).unwrap();
        let sys = AtomSystem::build(&k, &Channel::bsc(0.1).unwrap(), true).unwrap();
        sys.save(&path).unwrap();
        assert_eq!(AtomSystem::load(&path).unwrap(), sys);

        let other = Channel::bsc(0.2).unwrap();
        let rebuilt = AtomSystem::load_or_build(&path, &k, &other, true, || AtomSystem::build(&k, &other, true)).unwrap();
        assert_eq!(rebuilt.k2(), &other);
        assert_eq!(AtomSystem::load(&path).unwrap(), rebuilt);

        std::fs::write(&path, b"nonsense").unwrap();
        assert!(matches!(AtomSystem::load(&path), Err(Error::Cache(_))));
        let mut bytes = Vec::new();
        sys.save(&path).unwrap();
        std::fs::File::open(&path).unwrap().read_to_end(&mut bytes).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(AtomSystem::load(&path), Err(Error::Cache(_))));
    }

    #[test]
    fn shuffled_keeps_atom_mapping() {
        let k = Channel::bec(0.2).unwrap();
        let sys = AtomSystem::build(&k, &Channel::bsc(0.1).unwrap(), false).unwrap();
        let sh = sys.shuffled(5);
        assert_ne!(sh.a(), sys.a());
        for c in 0..sh.num_columns() {
            let alpha = sh.atom_of_column(c);
            assert_eq!(sh.column(c), sys.column(sys.column_of_atom(alpha)));
            assert_eq!(sh.column_of_atom(alpha), c);
        }
    }
}
