//! Erasure correctability, homogeneity sweeps and the degeneracy certificate.
//!
//! For a stabilizer code, a region `A` is correctable iff no logical operator
//! is supported on it. With `G` the generator matrix and `G|_A` its columns on
//! `A`, the Paulis on `A` that commute with every generator span a space of
//! dimension `2|A| − rank G|_A`, and the stabilizers supported on `A` a space
//! of dimension `rank G − rank G|_{Aᶜ}`. `A` is correctable iff they agree.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bipartition::{abc_partition, verify_cellulation, Cellulation, CellulationReport, Partition};
use crate::entropy::{verify_fact1_chain, EntropyReport};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::{BitMatrix, BitVector, SpanBasis};
use crate::layout::QuditLayout;
use crate::stabilizer::{PauliOp, StabilizerCode};

/// Largest code handled by the dense checker.
pub const DENSE_MAX_QUBITS: usize = 12;
pub const KL_TOLERANCE: f64 = 1e-9;

/// A qudit set with a free-form provenance tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub qudits: BitVector,
    pub tag: String,
}

impl Region {
    pub fn new(qudits: BitVector, tag: impl Into<String>) -> Self {
        Self { qudits, tag: tag.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectabilityVerdict {
    pub correctable: bool,
    /// A logical operator supported on the region, when there is one.
    pub witness: Option<PauliOp>,
    /// `2|A| − rank G|_A`.
    pub normalizer_dim: usize,
    /// `rank G − rank G|_{Aᶜ}`.
    pub stabilizer_dim: usize,
}

fn complement(a: &BitVector) -> BitVector {
    a.xor(&BitVector::ones(a.len()))
}

fn swap_halves(m: &BitMatrix) -> BitMatrix {
    let h = m.cols() / 2;
    let cols: Vec<usize> = (h..2 * h).chain(0..h).collect();
    m.select_columns(&cols)
}

pub fn is_correctable(code: &StabilizerCode, a: &BitVector) -> Result<CorrectabilityVerdict> {
    if a.len() != code.n() {
        return Err(Error::Dimension(format!("region over {} qudits, code has {}", a.len(), code.n())));
    }
    let size = a.weight();
    let ga = code.restrict(a);
    let gac = code.restrict(&complement(a));
    let rank_ac = gac.rank();
    let normalizer_dim = 2 * size - ga.rank();
    let stabilizer_dim = code.rank() - rank_ac;
    let correctable = normalizer_dim == stabilizer_dim;
    let witness = (!correctable).then(|| logical_on(code, a, &ga, &gac));
    Ok(CorrectabilityVerdict { correctable, witness, normalizer_dim, stabilizer_dim })
}

fn logical_on(code: &StabilizerCode, a: &BitVector, ga: &BitMatrix, gac: &BitMatrix) -> PauliOp {
    let qubits: Vec<usize> = a.iter_ones().collect();
    let m = qubits.len();
    let mut span = SpanBasis::new(2 * m);
    for c in gac.transpose().nullspace() {
        // c·G vanishes off A; keep its restriction to A
        let mut v = BitVector::zeros(2 * m);
        for r in c.iter_ones() {
            v.xor_assign(&ga.row(r));
        }
        span.insert(&v);
    }
    let local = swap_halves(ga)
        .nullspace()
        .into_iter()
        .find(|v| !span.contains(v))
        .expect("dimension count promised a logical");
    let n = code.n();
    let x = BitVector::from_indices(n, (0..m).filter(|&t| local.get(t)).map(|t| qubits[t]));
    let z = BitVector::from_indices(n, (0..m).filter(|&t| local.get(m + t)).map(|t| qubits[t]));
    PauliOp::new(x, z).expect("equal lengths")
}

/// Orthonormal basis of a code space as dense complex vectors.
#[derive(Clone, Debug)]
pub struct Codewords {
    n: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl Codewords {
    /// Validates dimensions and orthonormality.
    pub fn new(n: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if n > DENSE_MAX_QUBITS {
            return Err(Error::Input(format!("dense checker is limited to {DENSE_MAX_QUBITS} qubits")));
        }
        let dim = 1usize << n;
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension(format!("codewords must have length {dim}")));
        }
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate() {
                let g: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).norm() > KL_TOLERANCE {
                    return Err(Error::Input(format!("codewords not orthonormal: ⟨{i}|{j}⟩ = {g}")));
                }
            }
        }
        Ok(Self { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }
}

/// `P|b⟩ = i^{|x∧z|} (−1)^{|b∧z|} |b ⊕ x⟩`, the Hermitian Pauli with `Y = iXZ`.
fn apply_pauli(x: usize, z: usize, v: &[Complex64]) -> Vec<Complex64> {
    let phase = Complex64::i().powu((x & z).count_ones());
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, &amp) in v.iter().enumerate() {
        let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ x] = phase * amp * sign;
    }
    out
}

fn pauli_masks(p: &PauliOp) -> (usize, usize) {
    let mask = |v: &BitVector| v.iter_ones().fold(0usize, |m, i| m | 1 << i);
    (mask(p.x_part()), mask(p.z_part()))
}

/// Project basis states with `∏ (I + g)/2` and orthonormalize.
pub fn code_space_basis(code: &StabilizerCode) -> Result<Codewords> {
    let n = code.n();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::Input(format!("dense checker is limited to {DENSE_MAX_QUBITS} qubits")));
    }
    // an independent subset, so no product of generators is −I
    let mut span = SpanBasis::new(2 * n);
    let gens: Vec<(usize, usize)> = code
        .generators()
        .iter()
        .filter(|g| span.insert(&g.to_symplectic()))
        .map(pauli_masks)
        .collect();
    let want = 1usize << code.degeneracy();
    let dim = 1usize << n;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(want);
    for b in 0..dim {
        if basis.len() == want {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[b] = Complex64::new(1.0, 0.0);
        for &(x, z) in &gens {
            let gv = apply_pauli(x, z, &v);
            v.iter_mut().zip(gv).for_each(|(a, g)| *a = (*a + g) * 0.5);
        }
        for u in &basis {
            let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= overlap * b);
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
        }
    }
    Codewords::new(n, basis)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KlVerdict {
    pub consistent: bool,
    /// First Pauli on the region (ordered by x mask, then z mask) with `ΠOΠ ≠ cΠ`.
    pub violator: Option<PauliOp>,
    /// `(O, c(O))` for every Pauli on the region, when consistent and the region has ≤ 4 qubits.
    pub scalars: Vec<(PauliOp, Complex64)>,
    pub max_deviation: f64,
}

/// Checks `Π O Π = c(O) Π` for every Pauli `O` supported on `a`.
///
/// Uses `⟨c_j|O|c_i⟩ = Tr(O M_ij)` with `M_ij = Tr_{Aᶜ} |c_i⟩⟨c_j|`; the condition
/// for every `O` is `M_ij = δ_ij M_00`, since Paulis span all operators.
pub fn knill_laflamme_dense(cw: &Codewords, a: &BitVector) -> Result<KlVerdict> {
    let n = cw.n;
    if a.len() != n {
        return Err(Error::Dimension(format!("region over {} qubits, code has {n}", a.len())));
    }
    let inside: Vec<usize> = a.iter_ones().collect();
    let outside: Vec<usize> = (0..n).filter(|&q| !a.get(q)).collect();
    let (m, dim_a, dim_r) = (inside.len(), 1usize << inside.len(), 1usize << outside.len());
    let gather = |b: usize, qs: &[usize]| qs.iter().enumerate().fold(0usize, |acc, (t, &q)| acc | (b >> q & 1) << t);
    let split: Vec<(usize, usize)> = (0..1usize << n).map(|b| (gather(b, &inside), gather(b, &outside))).collect();
    let kdim = cw.vectors.len();
    let blocks: Vec<Vec<Complex64>> = cw
        .vectors
        .iter()
        .map(|v| {
            let mut c = vec![Complex64::new(0.0, 0.0); dim_a * dim_r];
            for (b, &(ia, ir)) in split.iter().enumerate() {
                c[ia * dim_r + ir] = v[b];
            }
            c
        })
        .collect();
    let reduced = |i: usize, j: usize| -> Vec<Complex64> {
        let (ci, cj) = (&blocks[i], &blocks[j]);
        let mut out = vec![Complex64::new(0.0, 0.0); dim_a * dim_a];
        for x in 0..dim_a {
            for y in 0..dim_a {
                out[x * dim_a + y] = (0..dim_r).map(|r| ci[x * dim_r + r] * cj[y * dim_r + r].conj()).sum();
            }
        }
        out
    };
    let m00 = reduced(0, 0);
    let mut max_dev = 0.0f64;
    let mut worst: Option<Vec<Complex64>> = None;
    for i in 0..kdim {
        for j in 0..kdim {
            if i == 0 && j == 0 {
                continue;
            }
            let mut d = reduced(i, j);
            if i == j {
                d.iter_mut().zip(&m00).for_each(|(x, y)| *x -= y);
            }
            let dev = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if dev > max_dev {
                max_dev = dev;
                if dev > KL_TOLERANCE && worst.is_none() {
                    worst = Some(d);
                }
            }
        }
    }
    let lift = |x: usize, z: usize| {
        let sel = |mask: usize| BitVector::from_indices(n, (0..m).filter(|t| mask >> t & 1 == 1).map(|t| inside[t]));
        PauliOp::new(sel(x), sel(z)).expect("equal lengths")
    };
    // Tr(P D) = i^{|x∧z|} Σ_b (−1)^{b·z} D[b, b⊕x]
    let trace_with = |d: &[Complex64], x: usize, z: usize| -> Complex64 {
        let phase = Complex64::i().powu((x & z).count_ones());
        let s: Complex64 = (0..dim_a)
            .map(|b| {
                let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                d[b * dim_a + (b ^ x)] * sign
            })
            .sum();
        phase * s
    };
    let violator = worst.map(|d| {
        (0..dim_a)
            .flat_map(|x| (0..dim_a).map(move |z| (x, z)))
            .find(|&(x, z)| trace_with(&d, x, z).norm() > KL_TOLERANCE)
            .map(|(x, z)| lift(x, z))
            .expect("a nonzero matrix has a nonzero Pauli coefficient")
    });
    let consistent = violator.is_none();
    let scalars = if consistent && m <= 4 {
        (0..dim_a)
            .flat_map(|x| (0..dim_a).map(move |z| (x, z)))
            .map(|(x, z)| (lift(x, z), trace_with(&m00, x, z)))
            .collect()
    } else {
        Vec::new()
    };
    Ok(KlVerdict { consistent, violator, scalars, max_deviation: max_dev })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub ball_radius: f64,
    pub n_balls: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_retries: usize,
}

impl SweepConfig {
    pub fn new(ball_radius: f64, n_balls: usize, samples: usize, seed: u64) -> Self {
        Self { ball_radius, n_balls, samples, seed, max_retries: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSample {
    pub index: usize,
    pub centers: Vec<usize>,
    pub union_size: usize,
    pub region_size: usize,
    pub trimmed: bool,
    pub correctable: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub code: String,
    pub n: usize,
    pub layout_size: f64,
    pub a: f64,
    pub ball_radius: f64,
    pub n_balls: usize,
    pub samples: usize,
    pub seed: u64,
    pub correctable: usize,
    pub fraction: f64,
    pub trimmed_regions: usize,
    pub counterexamples: Vec<SweepSample>,
}

impl SweepReport {
    pub fn all_correctable(&self) -> bool {
        self.correctable == self.samples
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "homogeneity sweep");
        let _ = writeln!(s, "code: {}", self.code);
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "L: {}", self.layout_size);
        let _ = writeln!(s, "a: {}", self.a);
        let _ = writeln!(s, "ball_radius: {}", self.ball_radius);
        let _ = writeln!(s, "balls: {}", self.n_balls);
        let _ = writeln!(s, "samples: {}", self.samples);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "correctable: {}/{}", self.correctable, self.samples);
        let _ = writeln!(s, "fraction: {:.6}", self.fraction);
        let _ = writeln!(s, "regions_trimmed_by_a_neighborhood: {}", self.trimmed_regions);
        let _ = writeln!(s, "counterexamples: {}", self.counterexamples.len());
        for c in &self.counterexamples {
            let _ = writeln!(
                s,
                "  sample {} centers {:?} |A| {} witness {}",
                c.index,
                c.centers,
                c.region_size,
                c.witness.as_deref().unwrap_or("-")
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Random disjoint metric balls; `A` keeps the qudits whose `a`-neighborhood stays inside their union.
pub fn homogeneous_sweep(code: &StabilizerCode, layout: &QuditLayout, cfg: &SweepConfig) -> Result<SweepReport> {
    homogeneous_sweep_with(code, layout, cfg, Exec::default())
}

pub fn homogeneous_sweep_with(
    code: &StabilizerCode,
    layout: &QuditLayout,
    cfg: &SweepConfig,
    exec: Exec,
) -> Result<SweepReport> {
    let n = layout.n_qudits();
    if code.n() != n {
        return Err(Error::Dimension(format!("code has {} qubits, layout {n} qudits", code.n())));
    }
    if cfg.ball_radius < layout.a() {
        return Err(Error::Input(format!("ball radius {} is below a = {}", cfg.ball_radius, layout.a())));
    }
    if cfg.n_balls == 0 {
        return Err(Error::Input("need at least one ball".into()));
    }
    let balls: Vec<BitVector> = exec.map_range(n, |q| layout.ball(q, cfg.ball_radius));
    let halo: Vec<BitVector> = exec.map_range(n, |q| layout.ball(q, layout.a()));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut placements: Vec<Vec<usize>> = Vec::with_capacity(cfg.samples);
    for index in 0..cfg.samples {
        let mut placed = None;
        for _ in 0..cfg.max_retries {
            let mut union = BitVector::zeros(n);
            let mut centers = Vec::with_capacity(cfg.n_balls);
            for _ in 0..cfg.n_balls {
                let c = rng.random_range(0..n);
                if !balls[c].and(&union).is_zero() {
                    break;
                }
                union.xor_assign(&balls[c]);
                centers.push(c);
            }
            if centers.len() == cfg.n_balls {
                placed = Some(centers);
                break;
            }
        }
        placements.push(placed.ok_or_else(|| {
            Error::Placement(format!(
                "could not place {} disjoint balls of radius {} for sample {index} after {} tries",
                cfg.n_balls, cfg.ball_radius, cfg.max_retries
            ))
        })?);
    }

    let results: Vec<Result<SweepSample>> = exec.map_range(placements.len(), |index| {
        let centers = &placements[index];
        let mut union = BitVector::zeros(n);
        centers.iter().for_each(|&c| union.xor_assign(&balls[c]));
        let region = BitVector::from_indices(n, union.iter_ones().filter(|&q| halo[q].and(&union) == halo[q]));
        let v = is_correctable(code, &region)?;
        Ok(SweepSample {
            index,
            centers: centers.clone(),
            union_size: union.weight(),
            region_size: region.weight(),
            trimmed: region != union,
            correctable: v.correctable,
            witness: v.witness.map(|w| w.to_sparse_string()),
        })
    });
    let results: Vec<SweepSample> = results.into_iter().collect::<Result<_>>()?;
    let correctable = results.iter().filter(|s| s.correctable).count();
    Ok(SweepReport {
        code: code.name().to_string(),
        n,
        layout_size: layout.size(),
        a: layout.a(),
        ball_radius: cfg.ball_radius,
        n_balls: cfg.n_balls,
        samples: cfg.samples,
        seed: cfg.seed,
        correctable,
        fraction: if cfg.samples == 0 { 1.0 } else { correctable as f64 / cfg.samples as f64 },
        trimmed_regions: results.iter().filter(|s| s.trimmed).count(),
        counterexamples: results.into_iter().filter(|s| !s.correctable).collect(),
    })
}

/// Split a mesh layout in two halves by vertex index with `C = ∅`: a qudit goes
/// north when its lower endpoint is in the first half of the vertices.
pub fn hemisphere_partition(layout: &QuditLayout) -> Result<Partition> {
    let m = layout.mesh().ok_or_else(|| Error::Input("hemispheres need a mesh layout".into()))?;
    let n = layout.n_qudits();
    let half = m.n_vertices() / 2;
    let north = BitVector::from_indices(n, (0..n).filter(|&q| m.endpoints(q).iter().min().is_some_and(|&v| v < half)));
    let south = complement(&north);
    Partition::new(north, south, BitVector::zeros(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub code: String,
    pub partition_source: String,
    pub n: usize,
    pub layout_size: f64,
    pub a: f64,
    pub r_skel: Option<f64>,
    pub r_sep: Option<f64>,
    pub a_size: usize,
    pub b_size: usize,
    pub c_size: usize,
    pub log2_degeneracy: usize,
    pub correctable_a: bool,
    pub witness_a: Option<String>,
    pub correctable_b: bool,
    pub witness_b: Option<String>,
    pub verdict: Verdict,
    pub log_base: u32,
    pub log2_degeneracy_per_l: f64,
    pub c_per_l: f64,
    /// `log₂D / |C|`, absent when `C = ∅`.
    pub saturation: Option<f64>,
    pub entropy: EntropyReport,
}

impl BoundCertificate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "degeneracy bound certificate");
        let _ = writeln!(s, "code: {}", self.code);
        let _ = writeln!(s, "partition: {}", self.partition_source);
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "L: {}", self.layout_size);
        let _ = writeln!(s, "a: {}", self.a);
        let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
        let _ = writeln!(s, "r_skel: {}", fmt_opt(self.r_skel));
        let _ = writeln!(s, "r_sep: {}", fmt_opt(self.r_sep));
        let _ = writeln!(s, "|A|: {}", self.a_size);
        let _ = writeln!(s, "|B|: {}", self.b_size);
        let _ = writeln!(s, "|C|: {}", self.c_size);
        let _ = writeln!(s, "log2_D: {}", self.log2_degeneracy);
        let _ = writeln!(s, "D: {}", if self.log2_degeneracy < 64 { (1u64 << self.log2_degeneracy).to_string() } else { format!("2^{}", self.log2_degeneracy) });
        let _ = writeln!(s, "log_base: {}", self.log_base);
        let _ = writeln!(s, "A_correctable: {}", self.correctable_a);
        if let Some(w) = &self.witness_a {
            let _ = writeln!(s, "A_witness: {w}");
        }
        let _ = writeln!(s, "B_correctable: {}", self.correctable_b);
        if let Some(w) = &self.witness_b {
            let _ = writeln!(s, "B_witness: {w}");
        }
        let _ = writeln!(s, "log2_D_per_L: {:.6}", self.log2_degeneracy_per_l);
        let _ = writeln!(s, "C_per_L: {:.6}", self.c_per_l);
        let _ = writeln!(s, "saturation: {}", self.saturation.map_or("-".to_string(), |x| format!("{x:.6}")));
        let bound = format!("{} ≤ |C| = {}", self.log2_degeneracy, self.c_size);
        let _ = writeln!(
            s,
            "verdict: {}",
            match self.verdict {
                Verdict::Holds => format!("holds ({bound})"),
                Verdict::Violated => format!("VIOLATED ({bound} is false)"),
                Verdict::NotApplicable => "bound not applicable (A or B not correctable)".to_string(),
            }
        );
        s.push_str(&self.entropy.to_text());
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Certificate for an explicit partition.
pub fn certify_with_partition(
    code: &StabilizerCode,
    layout: &QuditLayout,
    partition: &Partition,
    source: &str,
    radii: (Option<f64>, Option<f64>),
) -> Result<BoundCertificate> {
    if code.n() != layout.n_qudits() || partition.a.len() != code.n() {
        return Err(Error::Dimension("code, layout and partition disagree on the qudit count".into()));
    }
    let va = is_correctable(code, &partition.a)?;
    let vb = is_correctable(code, &partition.b)?;
    let log2_d = code.degeneracy();
    let (a_size, b_size, c_size) = partition.sizes();
    let verdict = match (va.correctable && vb.correctable, log2_d <= c_size) {
        (false, _) => Verdict::NotApplicable,
        (true, true) => Verdict::Holds,
        (true, false) => Verdict::Violated,
    };
    let entropy = verify_fact1_chain(code, &partition.a, &partition.b, &partition.c)?;
    let l = layout.size();
    Ok(BoundCertificate {
        code: code.name().to_string(),
        partition_source: source.to_string(),
        n: code.n(),
        layout_size: l,
        a: layout.a(),
        r_skel: radii.0,
        r_sep: radii.1,
        a_size,
        b_size,
        c_size,
        log2_degeneracy: log2_d,
        correctable_a: va.correctable,
        witness_a: va.witness.map(|w| w.to_sparse_string()),
        correctable_b: vb.correctable,
        witness_b: vb.witness.map(|w| w.to_sparse_string()),
        verdict,
        log_base: 2,
        log2_degeneracy_per_l: log2_d as f64 / l,
        c_per_l: c_size as f64 / l,
        saturation: (c_size > 0).then(|| log2_d as f64 / c_size as f64),
        entropy,
    })
}

/// Verify the cellulation, take its `A ⊔ B ⊔ C`, and certify.
pub fn certify_degeneracy_bound(
    code: &StabilizerCode,
    layout: &QuditLayout,
    cellulation: &Cellulation,
    r_skel: f64,
    r_sep: f64,
) -> Result<(BoundCertificate, CellulationReport)> {
    let report = verify_cellulation(cellulation, layout, r_skel, r_sep)?;
    let partition = abc_partition(cellulation, layout, r_skel, &report)?;
    let cert = certify_with_partition(code, layout, &partition, &report.base, (Some(r_skel), Some(r_sep)))?;
    Ok((cert, report))
}
