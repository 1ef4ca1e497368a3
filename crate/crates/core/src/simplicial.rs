//! Pure simplicial complexes of closed manifolds with Z2 chains.
//!
//! Simplices are sorted vertex-label sets. For each dimension `k` the
//! k-simplices are kept in one flat, lexicographically sorted array, and a
//! simplex is referred to by its index in that array (its canonical index).
//! There is no orientation data: everything here is mod 2.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::{BitMatrix, BitVector};

mod subdivision;

pub use subdivision::{barycentric_subdivide, SubdivisionMap, NO_CARRIER};

/// A closed pseudomanifold triangulation: every (d−1)-simplex has exactly two cofaces.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    id: u64,
    dim: usize,
    /// `simplices[k]`: flat vertex labels, stride `k + 1`, sorted.
    simplices: Vec<Vec<u32>>,
    /// `faces[k]` (k ≥ 1): stride `k + 1`; entry `j` is the face omitting vertex `j`.
    faces: Vec<Vec<u32>>,
    ridge_cofaces: Vec<[u32; 2]>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.simplices[self.dim] == other.simplices[other.dim]
    }
}

impl Eq for SimplicialComplex {}

fn fnv1a(dim: usize, data: &[u32]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed(dim as u64);
    for &v in data {
        feed(v as u64);
    }
    h
}

/// Sorts fixed-stride records lexicographically and removes duplicates.
fn sort_dedup(flat: &[u32], stride: usize) -> Vec<u32> {
    let n = flat.len() / stride;
    let mut order: Vec<u32> = (0..n as u32).collect();
    let rec = |i: u32| &flat[i as usize * stride..(i as usize + 1) * stride];
    order.sort_unstable_by(|&a, &b| rec(a).cmp(rec(b)));
    order.dedup_by(|a, b| rec(*a) == rec(*b));
    let mut out = Vec::with_capacity(order.len() * stride);
    for i in order {
        out.extend_from_slice(rec(i));
    }
    out
}

fn find_record(flat: &[u32], stride: usize, key: &[u32]) -> Option<usize> {
    let n = flat.len() / stride;
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * stride..(mid + 1) * stride].cmp(key) {
            Ordering::Less => lo = mid + 1,
            Ordering::Greater => hi = mid,
            Ordering::Equal => return Some(mid),
        }
    }
    None
}

impl SimplicialComplex {
    /// Builds the face closure of the given top simplices and validates the
    /// closed-manifold condition.
    pub fn build(top_simplices: &[Vec<u32>]) -> Result<Self> {
        let first = top_simplices
            .first()
            .ok_or_else(|| Error::Input("no simplices given".into()))?;
        let width = first.len();
        if width < 2 {
            return Err(Error::Input("top simplices must have at least 2 vertices".into()));
        }
        let mut flat = Vec::with_capacity(top_simplices.len() * width);
        for (i, s) in top_simplices.iter().enumerate() {
            if s.len() != width {
                return Err(Error::Input(format!(
                    "simplex {i} has {} vertices, expected {width}",
                    s.len()
                )));
            }
            let mut s = s.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Input(format!("simplex {i} repeats a vertex")));
            }
            flat.extend_from_slice(&s);
        }
        let count = flat.len() / width;
        let sorted = sort_dedup(&flat, width);
        if sorted.len() / width != count {
            return Err(Error::Input("duplicate top simplex".into()));
        }
        Self::from_sorted_tops(width - 1, sorted)
    }

    /// `tops` must already be sorted, deduplicated, with sorted rows.
    pub(crate) fn from_sorted_tops(dim: usize, tops: Vec<u32>) -> Result<Self> {
        let mut simplices = vec![Vec::new(); dim + 1];
        simplices[dim] = tops;
        for k in (0..dim).rev() {
            let upper = &simplices[k + 1];
            let ustride = k + 2;
            let mut cand = Vec::with_capacity(upper.len() / ustride * (k + 2) * (k + 1));
            for s in upper.chunks_exact(ustride) {
                for skip in 0..ustride {
                    cand.extend(s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
                }
            }
            simplices[k] = sort_dedup(&cand, k + 1);
        }
        let mut faces = vec![Vec::new(); dim + 1];
        let mut key = Vec::with_capacity(dim + 1);
        for k in 1..=dim {
            let stride = k + 1;
            let mut f = Vec::with_capacity(simplices[k].len());
            for s in simplices[k].chunks_exact(stride) {
                for skip in 0..stride {
                    key.clear();
                    key.extend(s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
                    let idx = find_record(&simplices[k - 1], k, &key).expect("face closure");
                    f.push(idx as u32);
                }
            }
            faces[k] = f;
        }
        let n_ridges = simplices[dim - 1].len() / dim;
        let mut cofaces = vec![[u32::MAX; 2]; n_ridges];
        let mut counts = vec![0usize; n_ridges];
        for (t, fs) in faces[dim].chunks_exact(dim + 1).enumerate() {
            for &f in fs {
                let f = f as usize;
                if counts[f] < 2 {
                    cofaces[f][counts[f]] = t as u32;
                }
                counts[f] += 1;
            }
        }
        if let Some((f, &c)) = counts.iter().enumerate().find(|&(_, &c)| c != 2) {
            return Err(Error::NonManifold {
                face: simplices[dim - 1][f * dim..(f + 1) * dim].to_vec(),
                cofaces: c,
            });
        }
        let id = fnv1a(dim, &simplices[dim]);
        Ok(Self {
            id,
            dim,
            simplices,
            faces,
            ridge_cofaces: cofaces,
        })
    }

    /// Content fingerprint used to match chains and layouts to their complex.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, k: usize) -> usize {
        if k > self.dim {
            return 0;
        }
        self.simplices[k].len() / (k + 1)
    }

    /// Simplex counts `(f_0, …, f_d)`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|k| self.count(k)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[u32] {
        &self.simplices[k][i * (k + 1)..(i + 1) * (k + 1)]
    }

    pub fn simplices(&self, k: usize) -> impl ExactSizeIterator<Item = &[u32]> {
        self.simplices[k].chunks_exact(k + 1)
    }

    /// Canonical index of a k-simplex given by its (sorted) vertex labels.
    pub fn index_of(&self, vertices: &[u32]) -> Option<usize> {
        let k = vertices.len().checked_sub(1)?;
        if k > self.dim {
            return None;
        }
        find_record(&self.simplices[k], k + 1, vertices)
    }

    /// Canonical indices of the (k−1)-faces of k-simplex `i`; entry `j` omits vertex `j`.
    pub fn faces_of(&self, k: usize, i: usize) -> &[u32] {
        assert!(k >= 1 && k <= self.dim);
        &self.faces[k][i * (k + 1)..(i + 1) * (k + 1)]
    }

    /// The two d-simplices sharing (d−1)-simplex `i`.
    pub fn ridge_cofaces(&self, i: usize) -> [usize; 2] {
        let [a, b] = self.ridge_cofaces[i];
        [a as usize, b as usize]
    }

    pub fn vertex_labels(&self) -> &[u32] {
        &self.simplices[0]
    }

    /// Dense ∂_k: rows are (k−1)-simplices, columns k-simplices.
    pub fn boundary_matrix(&self, k: usize) -> Result<BitMatrix> {
        if k == 0 || k > self.dim {
            return Err(Error::Input(format!(
                "boundary degree {k} outside 1..={}",
                self.dim
            )));
        }
        let mut m = BitMatrix::zeros(self.count(k - 1), self.count(k));
        for (c, fs) in self.faces[k].chunks_exact(k + 1).enumerate() {
            for &f in fs {
                m.set(f as usize, c, true);
            }
        }
        Ok(m)
    }

    /// Z2 Betti numbers `b_0, …, b_d` from dense boundary ranks.
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.betti_numbers_with(Exec::default())
    }

    pub fn betti_numbers_with(&self, exec: Exec) -> Vec<usize> {
        let mut ranks = vec![0usize; self.dim + 2];
        for (k, r) in ranks.iter_mut().enumerate().take(self.dim + 1).skip(1) {
            *r = self.boundary_matrix(k).expect("k in range").rank_with(exec);
        }
        (0..=self.dim)
            .map(|k| self.count(k) - ranks[k] - ranks[k + 1])
            .collect()
    }

    /// The chain with every k-simplex as a summand.
    pub fn full_skeleton_chain(&self, k: usize) -> Result<Chain> {
        if k > self.dim {
            return Err(Error::Input(format!("degree {k} exceeds dimension {}", self.dim)));
        }
        Ok(Chain {
            degree: k,
            complex_id: self.id,
            support: BitVector::ones(self.count(k)),
        })
    }

    pub fn zero_chain(&self, k: usize) -> Chain {
        Chain {
            degree: k,
            complex_id: self.id,
            support: BitVector::zeros(self.count(k)),
        }
    }

    pub fn chain(&self, k: usize, support: BitVector) -> Result<Chain> {
        if k > self.dim || support.len() != self.count(k) {
            return Err(Error::Dimension(format!(
                "support of length {} for {}-chains of a complex with {} such simplices",
                support.len(),
                k,
                self.count(k)
            )));
        }
        Ok(Chain {
            degree: k,
            complex_id: self.id,
            support,
        })
    }

    /// ∂c computed from the face table (no dense matrix).
    pub fn boundary(&self, c: &Chain) -> Result<Chain> {
        self.check_chain(c)?;
        if c.degree == 0 {
            return Err(Error::Input("boundary of a 0-chain".into()));
        }
        let k = c.degree;
        let mut out = BitVector::zeros(self.count(k - 1));
        for i in c.support.iter_ones() {
            for &f in self.faces_of(k, i) {
                out.flip(f as usize);
            }
        }
        self.chain(k - 1, out)
    }

    pub(crate) fn check_chain(&self, c: &Chain) -> Result<()> {
        if c.complex_id != self.id || c.support.len() != self.count(c.degree) {
            return Err(Error::Input("chain belongs to a different complex".into()));
        }
        Ok(())
    }

    /// The same complex with vertices relabeled `0..n` in sorted-label order.
    pub fn compact_labels(&self) -> Result<SimplicialComplex> {
        let labels = self.vertex_labels();
        if labels.iter().enumerate().all(|(i, &v)| i as u32 == v) {
            return Ok(self.clone());
        }
        let tops: Vec<Vec<u32>> = self
            .simplices(self.dim)
            .map(|s| {
                s.iter()
                    .map(|v| labels.binary_search(v).expect("vertex present") as u32)
                    .collect()
            })
            .collect();
        SimplicialComplex::build(&tops)
    }
}

/// A Z2 k-chain of a specific complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub(crate) degree: usize,
    pub(crate) complex_id: u64,
    pub(crate) support: BitVector,
}

impl Chain {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn support(&self) -> &BitVector {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.weight()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_zero()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.support.get(i)
    }

    /// Z2 sum; both chains must live in the same group.
    pub fn add(&self, other: &Chain) -> Result<Chain> {
        if self.degree != other.degree || self.complex_id != other.complex_id {
            return Err(Error::Input("adding chains from different groups".into()));
        }
        Ok(Chain {
            degree: self.degree,
            complex_id: self.complex_id,
            support: self.support.xor(&other.support),
        })
    }
}
