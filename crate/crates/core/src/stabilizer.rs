//! Qubit stabilizer codes in the symplectic picture.
//!
//! A Pauli operator on n qubits is a pair of bit vectors `(x, z)`; phases are
//! dropped. A code is a list of pairwise commuting generators, stored as an
//! `m × 2n` matrix with rows `[x | z]`.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::{BitMatrix, BitVector, SpanBasis};

mod models;

pub use models::{
    five_qubit_code, fracton_code, planted_code, repetition_code, stacked_layers,
    surface_code_on_complex, toric_code, FractonModel, CUBIC1_TABLE,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    x: BitVector,
    z: BitVector,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::zeros(n) }
    }

    pub fn new(x: BitVector, z: BitVector) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension(format!("x part has {} bits, z part {}", x.len(), z.len())));
        }
        Ok(Self { x, z })
    }

    pub fn x_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self { x: BitVector::from_indices(n, qubits), z: BitVector::zeros(n) }
    }

    pub fn z_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::from_indices(n, qubits) }
    }

    /// Split a `[x | z]` row of length `2n`.
    pub fn from_symplectic(v: &BitVector) -> Self {
        let n = v.len() / 2;
        let xs: Vec<usize> = (0..n).collect();
        let zs: Vec<usize> = (n..2 * n).collect();
        Self { x: v.select(&xs), z: v.select(&zs) }
    }

    pub fn to_symplectic(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_part(&self) -> &BitVector {
        &self.x
    }

    pub fn z_part(&self) -> &BitVector {
        &self.z
    }

    pub fn support(&self) -> BitVector {
        let mut s = self.x.clone();
        for i in self.z.iter_ones() {
            s.set(i, true);
        }
        s
    }

    pub fn weight(&self) -> usize {
        self.support().weight()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Symplectic form: `true` when the operators anticommute.
    pub fn anticommutes(&self, other: &PauliOp) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    pub fn commutes(&self, other: &PauliOp) -> bool {
        !self.anticommutes(other)
    }

    pub fn mul(&self, other: &PauliOp) -> PauliOp {
        Self { x: self.x.xor(&other.x), z: self.z.xor(&other.z) }
    }

    pub fn letter(&self, i: usize) -> char {
        match (self.x.get(i), self.z.get(i)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    /// Sparse form such as `X0 Z5 Y7`; the identity prints as `I`.
    pub fn to_sparse_string(&self) -> String {
        let parts: Vec<String> = self
            .support()
            .iter_ones()
            .map(|i| format!("{}{}", self.letter(i), i))
            .collect();
        if parts.is_empty() {
            "I".into()
        } else {
            parts.join(" ")
        }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.n()).try_for_each(|i| write!(f, "{}", self.letter(i)))
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl std::str::FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let mut p = PauliOp::identity(n);
        for (i, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.x.set(i, true),
                'Z' => p.z.set(i, true),
                'Y' => {
                    p.x.set(i, true);
                    p.z.set(i, true);
                }
                other => return Err(Error::Input(format!("bad Pauli letter {other:?}"))),
            }
        }
        Ok(p)
    }
}

/// A stabilizer code: commuting generators on `n` qubits. Qubit `i` sits on qudit `i` of its layout.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    generators: Vec<PauliOp>,
    matrix: BitMatrix,
    rank: OnceLock<usize>,
}

impl StabilizerCode {
    /// Validates pairwise commutation.
    pub fn build(n: usize, generators: Vec<PauliOp>) -> Result<Self> {
        Self::build_named("custom", n, generators)
    }

    pub fn build_named(name: impl Into<String>, n: usize, generators: Vec<PauliOp>) -> Result<Self> {
        if let Some(bad) = generators.iter().position(|g| g.n() != n) {
            return Err(Error::Dimension(format!(
                "generator {bad} acts on {} qubits, code has {n}",
                generators[bad].n()
            )));
        }
        let m = generators.len();
        let first_bad = Exec::default().map_range(m, |i| {
            (i + 1..m).find(|&j| generators[i].anticommutes(&generators[j]))
        });
        if let Some((i, j)) = first_bad
            .iter()
            .enumerate()
            .find_map(|(i, j)| j.map(|j| (i, j)))
        {
            return Err(Error::Anticommuting(i, j));
        }
        let rows: Vec<BitVector> = generators.iter().map(PauliOp::to_symplectic).collect();
        let matrix = BitMatrix::from_rows(2 * n, &rows);
        Ok(Self { name: name.into(), n, generators, matrix, rank: OnceLock::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    /// Generator matrix, rows `[x | z]`.
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| self.matrix.rank())
    }

    /// `log₂ D = n − rank`.
    pub fn degeneracy(&self) -> usize {
        self.n - self.rank()
    }

    /// Whether `p` lies in the span of the generators.
    pub fn is_stabilizer(&self, p: &PauliOp) -> bool {
        let rank_with = self
            .matrix
            .stack(&BitMatrix::from_rows(2 * self.n, &[p.to_symplectic()]))
            .expect("same width")
            .rank();
        rank_with == self.rank()
    }

    pub fn commutes_with_all(&self, p: &PauliOp) -> bool {
        self.generators.iter().all(|g| g.commutes(p))
    }

    /// Columns of the generator matrix for the qubits in `region` (x columns then z columns).
    pub fn restrict(&self, region: &BitVector) -> BitMatrix {
        let cols: Vec<usize> = region
            .iter_ones()
            .chain(region.iter_ones().map(|q| q + self.n))
            .collect();
        self.matrix.select_columns(&cols)
    }

    /// A basis of the normalizer modulo the stabilizer group, in symplectic pairs:
    /// `[X̄₁, Z̄₁, X̄₂, Z̄₂, …]` with `X̄ᵢ` anticommuting only with `Z̄ᵢ`.
    pub fn logical_generators(&self) -> Vec<PauliOp> {
        let n = self.n;
        // v commutes with every generator iff  G · swap(v) = 0
        let swapped_cols: Vec<usize> = (n..2 * n).chain(0..n).collect();
        let swapped = self.matrix.select_columns(&swapped_cols);
        let mut span = SpanBasis::new(2 * n);
        for g in &self.generators {
            span.insert(&g.to_symplectic());
        }
        let mut reps: Vec<PauliOp> = Vec::new();
        for v in swapped.nullspace() {
            if span.insert(&v) {
                reps.push(PauliOp::from_symplectic(&v));
            }
        }
        symplectic_gram_schmidt(reps)
    }

    /// Header `n m`, then one generator per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.generators.len());
        for g in &self.generators {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty code file".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: 1, msg: format!("bad header: {e}") })?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse { line: 1, msg: "header must be `n m`".into() });
        };
        let mut gens = Vec::with_capacity(m);
        for (i, line) in lines {
            let p: PauliOp = line.trim().parse().map_err(|e: Error| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if p.n() != n {
                return Err(Error::Parse { line: i + 1, msg: format!("expected {n} letters") });
            }
            gens.push(p);
        }
        if gens.len() != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {m} generators, found {}", gens.len()),
            });
        }
        Self::build(n, gens)
    }
}

fn symplectic_gram_schmidt(mut pool: Vec<PauliOp>) -> Vec<PauliOp> {
    let mut out = Vec::with_capacity(pool.len());
    while let Some(a) = (!pool.is_empty()).then(|| pool.remove(0)) {
        let Some(j) = pool.iter().position(|b| a.anticommutes(b)) else {
            // cannot happen for a complement of the stabilizer inside its normalizer
            continue;
        };
        let b = pool.remove(j);
        for p in pool.iter_mut() {
            let mut q = p.clone();
            if p.anticommutes(&b) {
                q = q.mul(&a);
            }
            if p.anticommutes(&a) {
                q = q.mul(&b);
            }
            *p = q;
        }
        out.push(a);
        out.push(b);
    }
    out
}
