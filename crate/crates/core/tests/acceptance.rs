//! Acceptance criteria 1 through 10, one [PASS]/[FAIL] line each.
//!
//! Every criterion returns a deterministic text report; criterion 10 reruns
//! 1 through 9 and compares those reports byte for byte.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use degbound_core::bipartition::{abc_partition, cellulate_general, torus_checkerboard, verify_cellulation};
use degbound_core::correctability::{
    certify_degeneracy_bound, certify_with_partition, code_space_basis, hemisphere_partition, homogeneous_sweep,
    is_correctable, knill_laflamme_dense, SweepConfig, SweepReport, Verdict,
};
use degbound_core::entropy::approx_bound;
use degbound_core::layout::{layout_from_complex_with_cap, torus_lattice_layout, QuditLayout, SiteKind};
use degbound_core::manifolds::{self, Manifold};
use degbound_core::stabilizer::{
    fracton_code, five_qubit_code, planted_code, repetition_code, stacked_layers, surface_code_on_complex,
    toric_code, FractonModel, PauliOp, StabilizerCode,
};
use degbound_core::{BitMatrix, BitVector};

const MESH_DENSITY_CAP: usize = 1024;
const RUNTIME_BUDGET_SECS: f64 = 300.0;

struct Outcome {
    passed: bool,
    summary: String,
    report: String,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>, report: String) -> Self {
        Self { passed, summary: summary.into(), report }
    }
}

// Plain row reduction on bool rows, kept apart from the bit-packed kernel.
fn naive_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

fn symplectic_rows(code: &StabilizerCode, region: Option<&BitVector>) -> Vec<Vec<bool>> {
    let n = code.n();
    let keep: Vec<usize> = (0..n).filter(|&q| region.is_none_or(|r| r.get(q))).collect();
    code.generators()
        .iter()
        .map(|g| keep.iter().map(|&q| g.x_part().get(q)).chain(keep.iter().map(|&q| g.z_part().get(q))).collect())
        .collect()
}

fn naive_degeneracy(code: &StabilizerCode) -> usize {
    code.n() - naive_rank(symplectic_rows(code, None))
}

fn naive_entropy(code: &StabilizerCode, x: &BitVector) -> usize {
    let outside = x.xor(&BitVector::ones(x.len()));
    let total = naive_rank(symplectic_rows(code, None));
    x.weight() - (total - naive_rank(symplectic_rows(code, Some(&outside))))
}

/// Tr Π with Π the product of `(I + g)/2` over every generator, on a dense state space.
fn projector_trace(code: &StabilizerCode) -> f64 {
    let n = code.n();
    assert!(n <= 12);
    let masks: Vec<(usize, usize)> = code
        .generators()
        .iter()
        .map(|g| (g.x_part().iter_ones().map(|q| 1 << q).sum(), g.z_part().iter_ones().map(|q| 1 << q).sum()))
        .collect();
    let dim = 1usize << n;
    let mut trace = 0.0;
    for b in 0..dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[b] = Complex64::new(1.0, 0.0);
        for &(x, z) in &masks {
            let phase = Complex64::i().powu((x & z).count_ones());
            let mut gv = vec![Complex64::new(0.0, 0.0); dim];
            for (c, &amp) in v.iter().enumerate() {
                let sign = if (c & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                gv[c ^ x] = phase * amp * sign;
            }
            v.iter_mut().zip(gv).for_each(|(a, g)| *a = (*a + g) * 0.5);
        }
        trace += v[b].re;
    }
    trace
}

// 1. General cellulation pipeline on six manifolds.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut report = String::new();
    let mut ok = true;
    for m in [
        Manifold::Sphere,
        Manifold::Torus,
        Manifold::GenusSurface(2),
        Manifold::KleinBottle,
        Manifold::ProjectivePlane,
        Manifold::Torus3,
    ] {
        let k = m.triangulate().expect("built-in triangulation");
        let g = match cellulate_general(&k) {
            Ok(g) => g,
            Err(e) => {
                ok = false;
                let _ = writeln!(report, "{m}: pipeline error {e}");
                continue;
            }
        };
        let d = k.dim();
        // ∂P = N recomputed from the chains
        let dp = g.m2.boundary(&g.coloring.p).expect("same complex");
        let boundary_ok = dp.support() == g.defect.support();
        let perfect = g.matching.is_perfect() && 2 * g.matching.n_pairs() == g.m2.count(d);
        // same-color faces by brute force over every ridge of M''
        let cell = g.cellulation();
        let mut same_color_faces = 0;
        for f in 0..g.m2.count(d - 1) {
            let [s, t] = g.m2.ridge_cofaces(f);
            let (cs, ct) = (cell.cell_of_top(s).expect("covered"), cell.cell_of_top(t).expect("covered"));
            if cs != ct && cell.color(cs) == cell.color(ct) {
                same_color_faces += 1;
            }
        }
        let refine = if d == 2 { 2 } else { 0 };
        let layout = layout_from_complex_with_cap(&g.m2, refine, MESH_DENSITY_CAP).expect("layout");
        let rep = verify_cellulation(cell, &layout, 2.0, 2.0).expect("verification runs");
        let pass = boundary_ok && perfect && same_color_faces == 0 && g.coloring.closure_violations == 0 && rep.passed();
        ok &= pass;
        let _ = writeln!(
            report,
            "{m}: counts_m2 {:?} solver {:?} dP=N {boundary_ok} perfect {perfect} same_color_faces {same_color_faces} \
             refine {refine} qudits {} A {} B {} C {} C_covers_all {} verify {} fingerprint {}",
            g.m2.counts(),
            g.coloring.method,
            layout.n_qudits(),
            rep.a_size,
            rep.b_size,
            rep.c_size,
            rep.c_covers_all,
            if rep.passed() { "pass" } else { "FAIL" },
            rep.fingerprint,
        );
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= RUNTIME_BUDGET_SECS;
    Outcome::new(ok, format!("six manifolds, runtime {secs:.1}s"), report)
}

// 2. Sphere surface code has D = 1 and closes with C = ∅.
fn criterion_2() -> Outcome {
    let k = manifolds::sphere();
    let (code, layout) = surface_code_on_complex(&k).expect("surface code");
    let trace = projector_trace(&code);
    let p = hemisphere_partition(&layout).expect("mesh layout");
    let cert = certify_with_partition(&code, &layout, &p, "hemispheres", (None, None)).expect("certificate");
    let ok = code.degeneracy() == 0
        && naive_degeneracy(&code) == 0
        && (trace - 1.0).abs() < 1e-9
        && cert.c_size == 0
        && cert.correctable_a
        && cert.correctable_b
        && cert.verdict == Verdict::Holds
        && cert.entropy.all_hold();
    let report = format!("Tr Π = {trace:.6}\n{}", cert.to_text());
    Outcome::new(ok, format!("log2 D = {}, |C| = {}, Tr Π = {trace:.0}", cert.log2_degeneracy, cert.c_size), report)
}

// 3. log₂D = 2 for toric codes with |C| independent of L.
fn criterion_3() -> Outcome {
    let mut report = String::new();
    let mut ok = true;
    let mut cs = Vec::new();
    for l in [4, 6, 8] {
        let (code, layout) = toric_code(2, l).expect("toric code");
        let cell = torus_checkerboard(2, 2).expect("checkerboard");
        let (cert, rep) = certify_degeneracy_bound(&code, &layout, &cell, 1.0, 1.0).expect("certificate");
        let naive = naive_degeneracy(&code);
        ok &= cert.log2_degeneracy == 2 && naive == 2 && rep.passed() && cert.verdict == Verdict::Holds;
        ok &= cert.entropy.all_hold() && !rep.c_covers_all;
        cs.push(cert.c_size);
        let _ = writeln!(report, "L={l} log2D={} naive={naive} |A|={} |B|={} |C|={} verdict={:?}", cert.log2_degeneracy, cert.a_size, cert.b_size, cert.c_size, cert.verdict);
    }
    ok &= cs.windows(2).all(|w| w[0] == w[1]);
    Outcome::new(ok, format!("log2 D = 2 for L in {{4,6,8}}, |C| = {:?}", cs), report)
}

fn least_squares_residual(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    xs.iter().zip(ys).map(|(x, y)| (y - (my + slope * (x - mx))).abs()).fold(0.0, f64::max)
}

// 4. Linear degeneracy in 3D and |C| = Θ(L).
fn criterion_4() -> Outcome {
    let mut report = String::new();
    let mut ok = true;
    let build = |name: &str, l: usize| match name {
        "stacked" => stacked_layers(l),
        _ => fracton_code(FractonModel::XCube, l),
    };
    for name in ["stacked", "xcube"] {
        let mut ks = Vec::new();
        for l in [3, 4, 5] {
            let (code, layout) = build(name, l).expect("code");
            let cell = torus_checkerboard(3, 2).expect("checkerboard");
            let (cert, rep) = certify_degeneracy_bound(&code, &layout, &cell, 1.0, 1.0).expect("certificate");
            let naive = naive_degeneracy(&code);
            ok &= naive == cert.log2_degeneracy && rep.passed() && cert.verdict == Verdict::Holds && cert.entropy.all_hold();
            if name == "stacked" {
                ok &= cert.log2_degeneracy == 2 * l;
            }
            ks.push(cert.log2_degeneracy as f64);
            let _ = writeln!(
                report,
                "{name} L={l} n={} log2D={} |A|={} |B|={} |C|={} C_covers_all={} saturation={:.4} verdict={:?}",
                code.n(),
                cert.log2_degeneracy,
                cert.a_size,
                cert.b_size,
                cert.c_size,
                rep.c_covers_all,
                cert.saturation.unwrap_or(0.0),
                cert.verdict
            );
        }
        if name == "xcube" {
            let residual = least_squares_residual(&[3.0, 4.0, 5.0], &ks);
            ok &= ks.windows(2).all(|w| w[1] > w[0]) && residual <= 1.0;
            let _ = writeln!(report, "xcube linear fit residual {residual:.6}");
        }
        // |C| on larger lattices, past the size where C swallows everything
        let mut cs = Vec::new();
        for l in [4, 6, 8] {
            let (code, layout) = build(name, l).expect("code");
            let cell = torus_checkerboard(3, 2).expect("checkerboard");
            let (cert, _) = certify_degeneracy_bound(&code, &layout, &cell, 1.0, 1.0).expect("certificate");
            ok &= cert.verdict == Verdict::Holds;
            cs.push(cert.c_size as i64);
        }
        let linear = cs[2] - cs[1] == cs[1] - cs[0] && cs[1] > cs[0];
        ok &= linear;
        let _ = writeln!(report, "{name} |C| at L=4,6,8: {cs:?} constant increments {linear}");
    }
    Outcome::new(ok, "stacked log2 D = 2L, xcube linear, |C| linear in L", report)
}

// 5. Surface codes of genus g give 2g logical qubits from O(g) simplices.
fn criterion_5() -> Outcome {
    let mut report = String::new();
    let mut ok = true;
    let mut counts = Vec::new();
    for g in 1..=3 {
        let k = manifolds::genus_surface(g).expect("genus surface");
        let (code, _) = surface_code_on_complex(&k).expect("surface code");
        let b1 = k.betti_numbers()[1];
        let naive = naive_degeneracy(&code);
        ok &= code.degeneracy() == 2 * g && b1 == 2 * g && naive == 2 * g;
        counts.push(k.counts());
        let _ = writeln!(report, "g={g} counts {:?} log2D={} b1={b1} naive={naive}", k.counts(), code.degeneracy());
    }
    for dim in 0..3 {
        let c: Vec<i64> = counts.iter().map(|c| c[dim] as i64).collect();
        // growth at most linear: increments do not increase
        ok &= c[2] - c[1] <= c[1] - c[0] && c[2] <= 3 * c[0];
    }
    Outcome::new(ok, "log2 D = 2g for g = 1, 2, 3 with linear simplex counts", report)
}

fn random_local_clifford(p: &PauliOp, maps: &[[[bool; 2]; 2]]) -> PauliOp {
    let n = p.n();
    let mut x = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for (q, m) in maps.iter().enumerate() {
        let (a, b) = (p.x_part().get(q), p.z_part().get(q));
        x.push((m[0][0] & a) ^ (m[0][1] & b));
        z.push((m[1][0] & a) ^ (m[1][1] & b));
    }
    PauliOp::new(BitVector::from_bools(&x), BitVector::from_bools(&z)).expect("lengths")
}

fn random_code(rng: &mut ChaCha8Rng, n: usize) -> StabilizerCode {
    let rx = rng.random_range(1..n / 2 + 1);
    let rows: Vec<BitVector> =
        (0..rx).map(|_| BitVector::from_bools(&(0..n).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>())).collect();
    let hx = BitMatrix::from_rows(n, &rows);
    let null = hx.nullspace();
    let target = n.saturating_sub(hx.rank() + rng.random_range(0..=2));
    let mut z_rows: Vec<BitVector> = Vec::new();
    while z_rows.len() < target && !null.is_empty() {
        let mut v = BitVector::zeros(n);
        for b in &null {
            if rng.random_bool(0.5) {
                v.xor_assign(b);
            }
        }
        z_rows.push(v);
    }
    // one of the six invertible 2×2 maps per qubit keeps commutation
    const MAPS: [[[bool; 2]; 2]; 6] = [
        [[true, false], [false, true]],
        [[false, true], [true, false]],
        [[true, true], [false, true]],
        [[true, false], [true, true]],
        [[false, true], [true, true]],
        [[true, true], [true, false]],
    ];
    let maps: Vec<_> = (0..n).map(|_| MAPS[rng.random_range(0..6)]).collect();
    let gens: Vec<PauliOp> = (0..rx)
        .map(|r| PauliOp::x_on(n, hx.row(r).iter_ones()))
        .chain(z_rows.iter().map(|v| PauliOp::z_on(n, v.iter_ones())))
        .map(|p| random_local_clifford(&p, &maps))
        .collect();
    StabilizerCode::build_named(format!("random{n}"), n, gens).expect("commuting generators")
}

// 6. Cleaning-lemma verdict against dense Knill–Laflamme.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut codes = vec![five_qubit_code(), repetition_code(5)];
    for _ in 0..10 {
        let n = rng.random_range(4..=9);
        codes.push(random_code(&mut rng, n));
    }
    let mut report = String::new();
    let (mut total, mut agree, mut correctable, mut witnesses_ok) = (0, 0, 0, true);
    for code in &codes {
        let n = code.n();
        let cw = code_space_basis(code).expect("dense basis");
        let dim_ok = cw.vectors().len() as f64 == projector_trace(code).round();
        witnesses_ok &= dim_ok;
        let mut line = format!("{} n={n} k={} dense_dim_ok={dim_ok}:", code.name(), code.degeneracy());
        for _ in 0..20 {
            let p = rng.random_range(0.1..0.7);
            let region = BitVector::from_bools(&(0..n).map(|_| rng.random_bool(p)).collect::<Vec<_>>());
            let clean = is_correctable(code, &region).expect("rank test");
            let kl = knill_laflamme_dense(&cw, &region).expect("dense test");
            total += 1;
            if clean.correctable == kl.consistent {
                agree += 1;
            }
            if clean.correctable {
                correctable += 1;
            }
            if let Some(w) = &clean.witness {
                witnesses_ok &= code.commutes_with_all(w) && !code.is_stabilizer(w) && w.support().and(&region) == w.support();
            }
            line.push_str(if clean.correctable { " c" } else { " n" });
        }
        let _ = writeln!(report, "{line}");
    }
    let ok = total >= 200 && agree == total && witnesses_ok && correctable > 0 && correctable < total;
    let _ = writeln!(report, "agree {agree}/{total}, correctable {correctable}");
    Outcome::new(ok, format!("{agree}/{total} regions agree ({correctable} correctable)"), report)
}

// 7. Every step of the entropic argument on toric_code(2,8).
fn criterion_7() -> Outcome {
    let (code, layout) = toric_code(2, 8).expect("toric code");
    let cell = torus_checkerboard(2, 2).expect("checkerboard");
    let rep = verify_cellulation(&cell, &layout, 2.0, 2.0).expect("verify");
    let p = abc_partition(&cell, &layout, 2.0, &rep).expect("partition");
    let cert = certify_with_partition(&code, &layout, &p, &rep.base, (Some(2.0), Some(2.0))).expect("certificate");
    let e = &cert.entropy;
    let mut oracle_ok = true;
    for (name, region) in [
        ("A", p.a.clone()),
        ("B", p.b.clone()),
        ("C", p.c.clone()),
        ("AC", p.a.xor(&p.c)),
        ("BC", p.b.xor(&p.c)),
        ("ABC", layout.full_set()),
    ] {
        oracle_ok &= e.entropy(name) == Some(naive_entropy(&code, &region));
    }
    let named = |s: &str| e.step(s).is_some_and(|st| st.holds == Some(true));
    let ok = rep.passed()
        && oracle_ok
        && e.all_hold()
        && named("I(A:R) = 0")
        && named("I(B:R) = 0")
        && named("S(ABC) ≤ S(C)")
        && cert.verdict == Verdict::Holds;
    let sc = e.entropy("C").unwrap_or(0);
    Outcome::new(ok, format!("{} steps hold, 2 ≤ S(C) = {sc} ≤ |C| = {}", e.steps.len(), cert.c_size), cert.to_text())
}

fn sweep_line(r: &SweepReport) -> String {
    format!("{} fraction {:.4} ({}/{})", r.code, r.fraction, r.correctable, r.samples)
}

// 8. Disjoint-ball sweeps on homogeneous codes and a planted control.
fn criterion_8() -> Outcome {
    let mut report = String::new();
    let mut ok = true;
    let mut lines = Vec::new();
    let runs: [(&str, (StabilizerCode, QuditLayout), SweepConfig); 3] = [
        ("toric2", toric_code(2, 8).expect("code"), SweepConfig::new(2.0, 2, 50, 7)),
        ("toric3", toric_code(3, 4).expect("code"), SweepConfig::new(1.0, 2, 50, 8)),
        ("xcube", fracton_code(FractonModel::XCube, 4).expect("code"), SweepConfig::new(1.0, 1, 50, 9)),
    ];
    for (_, (code, layout), cfg) in &runs {
        let r = homogeneous_sweep(code, layout, cfg).expect("sweep");
        ok &= r.samples >= 50 && r.all_correctable();
        lines.push(sweep_line(&r));
        report.push_str(&r.to_text());
    }
    let layout = torus_lattice_layout(2, 8, SiteKind::Edges).expect("layout");
    let code = planted_code(layout.n_qudits());
    let cfg = SweepConfig::new(2.0, 1, 200, 1);
    let r = homogeneous_sweep(&code, &layout, &cfg).expect("sweep");
    let mut witness_ok = !r.counterexamples.is_empty();
    for c in &r.counterexamples {
        let w = sparse(layout.n_qudits(), c.witness.as_deref().unwrap_or(""));
        let mut union = BitVector::zeros(layout.n_qudits());
        c.centers.iter().for_each(|&q| union.xor_assign(&layout.ball(q, cfg.ball_radius)));
        witness_ok &= !w.is_identity() && code.commutes_with_all(&w) && !code.is_stabilizer(&w) && w.support().and(&union) == w.support();
    }
    ok &= r.fraction < 1.0 && witness_ok;
    lines.push(sweep_line(&r));
    report.push_str(&r.to_text());
    Outcome::new(ok, lines.join("; "), report)
}

/// Parse the sparse form `X0 Z5` into an n-qubit Pauli.
fn sparse(n: usize, s: &str) -> PauliOp {
    let mut p = PauliOp::identity(n);
    for tok in s.split_whitespace() {
        let (letter, idx) = tok.split_at(1);
        let q: usize = idx.parse().expect("qubit index");
        let single = match letter {
            "X" => PauliOp::x_on(n, [q]),
            "Z" => PauliOp::z_on(n, [q]),
            "Y" => PauliOp::x_on(n, [q]).mul(&PauliOp::z_on(n, [q])),
            _ => PauliOp::identity(n),
        };
        p = p.mul(&single);
    }
    p
}

// 9. Approximate bound: δ = 0 reduction, prefactors, regime flag.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exact = true;
    for _ in 0..100 {
        let d = rng.random_range(0..200) as f64;
        let hc = rng.random_range(0..200) as f64;
        let b = approx_bound(0.0, d, hc).expect("valid δ");
        exact &= b.lhs.to_bits() == d.to_bits() && b.holds == (d <= hc) && b.prefactor == 1.0;
    }
    // hand values, 40-digit evaluation of 1 − 27 δ log₂(1/δ)
    let hand = [(1e-3, 0.730_923_824_314_123_65), (1e-2, -0.793_841_171_239_175_67)];
    let mut report = String::new();
    let mut prefactors = true;
    for (delta, want) in hand {
        let b = approx_bound(delta, 100.0, 100.0).expect("valid δ");
        prefactors &= (b.prefactor - want).abs() <= 1e-12;
        let _ = writeln!(report, "delta {delta}: prefactor {:.15} lhs {:.12} vacuous {}", b.prefactor, b.lhs, b.vacuous);
    }
    let flagged = approx_bound(0.1, 2.0, 5.0).expect("valid δ");
    let regime = flagged.outside_stated_regime && flagged.vacuous;
    let _ = writeln!(report, "delta 0.1: prefactor {:.12} outside_stated_regime {} vacuous {}", flagged.prefactor, flagged.outside_stated_regime, flagged.vacuous);
    let _ = writeln!(report, "delta 0 reduction exact on 100 triples: {exact}");
    Outcome::new(exact && prefactors && regime, "δ = 0 exact, prefactors within 1e-12, δ = 0.1 flagged", report)
}

type Criterion = fn() -> Outcome;

const CRITERIA: [(&str, Criterion); 9] = [
    ("cellulation pipeline", criterion_1),
    ("sphere nondegeneracy", criterion_2),
    ("2D constancy", criterion_3),
    ("3D linear scaling", criterion_4),
    ("genus scaling", criterion_5),
    ("oracle equivalence", criterion_6),
    ("entropic chain", criterion_7),
    ("homogeneity sweeps", criterion_8),
    ("approximate bound", criterion_9),
];

fn main() {
    let mut all = true;
    let mut first_reports = Vec::new();
    for (i, (title, f)) in CRITERIA.iter().enumerate() {
        let out = f();
        all &= out.passed;
        println!("[{}] {}. {title}: {}", if out.passed { "PASS" } else { "FAIL" }, i + 1, out.summary);
        if !out.passed {
            println!("{}", out.report);
        }
        first_reports.push(out.report);
    }
    let mut differing = Vec::new();
    for (i, (_, f)) in CRITERIA.iter().enumerate() {
        if f().report != first_reports[i] {
            differing.push(i + 1);
        }
    }
    let det = differing.is_empty();
    all &= det;
    println!(
        "[{}] 10. determinism: {}",
        if det { "PASS" } else { "FAIL" },
        if det { "reports of criteria 1-9 identical on rerun".to_string() } else { format!("reports differ for {differing:?}") }
    );
    if !all {
        std::process::exit(1);
    }
}
