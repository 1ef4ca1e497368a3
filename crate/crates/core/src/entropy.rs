//! Entanglement entropies of the maximally mixed code state, in bits.
//!
//! For a stabilizer code with group `S`, `S(ρ^X) = |X| − dim S_X` where `S_X`
//! is the subgroup supported inside `X`, and `dim S_X = rank G − rank G|_{Xᶜ}`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::stabilizer::{PauliOp, StabilizerCode};

fn check_region(code: &StabilizerCode, x: &BitVector) -> Result<()> {
    if x.len() != code.n() {
        return Err(Error::Dimension(format!("region over {} qubits, code has {}", x.len(), code.n())));
    }
    Ok(())
}

pub fn stabilizer_entropy(code: &StabilizerCode, x: &BitVector) -> Result<usize> {
    check_region(code, x)?;
    let outside = x.xor(&BitVector::ones(x.len()));
    let inside_dim = code.rank() - code.restrict(&outside).rank();
    Ok(x.weight() - inside_dim)
}

/// `I(X:R)` where `R` purifies the code state; uses `S(XR) = S(Xᶜ)`.
pub fn mutual_info_with_reference(code: &StabilizerCode, x: &BitVector) -> Result<usize> {
    let sx = stabilizer_entropy(code, x)?;
    let sxc = stabilizer_entropy(code, &x.xor(&BitVector::ones(x.len())))?;
    Ok(sx + code.degeneracy() - sxc)
}

/// The code state entangled with `k` reference qubits appended after the code qubits.
///
/// Generators are `g ⊗ I` for each stabilizer plus `X̄ⱼ ⊗ X_{Rⱼ}` and `Z̄ⱼ ⊗ Z_{Rⱼ}`.
pub fn purified_code(code: &StabilizerCode) -> Result<StabilizerCode> {
    let n = code.n();
    let k = code.degeneracy();
    let total = n + k;
    let widen = |p: &PauliOp, extra_x: Option<usize>, extra_z: Option<usize>| {
        let x = BitVector::from_indices(total, p.x_part().iter_ones().chain(extra_x));
        let z = BitVector::from_indices(total, p.z_part().iter_ones().chain(extra_z));
        PauliOp::new(x, z).expect("equal lengths")
    };
    let mut gens: Vec<PauliOp> = code.generators().iter().map(|g| widen(g, None, None)).collect();
    let logicals = code.logical_generators();
    debug_assert_eq!(logicals.len(), 2 * k);
    for (j, pair) in logicals.chunks(2).enumerate() {
        gens.push(widen(&pair[0], Some(n + j), None));
        gens.push(widen(&pair[1], None, Some(n + j)));
    }
    StabilizerCode::build_named(format!("{}+R", code.name()), total, gens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Eq,
    Le,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "≤",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub relation: Relation,
    /// `None` when skipped because a hypothesis failed.
    pub holds: Option<bool>,
}

impl Step {
    fn eval(name: &str, lhs: usize, relation: Relation, rhs: usize) -> Self {
        let (lhs, rhs) = (lhs as i64, rhs as i64);
        let holds = match relation {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
        };
        Self { name: name.to_string(), lhs, rhs, relation, holds: Some(holds) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntropyReport {
    pub log_base: u32,
    pub log2_degeneracy: usize,
    pub entropies: Vec<(String, usize)>,
    pub mutual_information: Vec<(String, usize)>,
    pub steps: Vec<Step>,
    /// Which of `A`, `B` failed `I(·:R) = 0`.
    pub failed_hypotheses: Vec<String>,
}

impl EntropyReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.failed_hypotheses.is_empty()
    }

    /// Every evaluated step holds and none was skipped.
    pub fn all_hold(&self) -> bool {
        self.steps.iter().all(|s| s.holds == Some(true))
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn entropy(&self, region: &str) -> Option<usize> {
        self.entropies.iter().find(|(r, _)| r == region).map(|&(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "entropy (log base {})", self.log_base);
        for (r, v) in &self.entropies {
            let _ = writeln!(s, "  S({r}) = {v}");
        }
        for (r, v) in &self.mutual_information {
            let _ = writeln!(s, "  I({r}:R) = {v}");
        }
        for st in &self.steps {
            let mark = match st.holds {
                Some(true) => "ok",
                Some(false) => "FAILED",
                None => "skipped",
            };
            let _ = writeln!(s, "  [{mark}] {}: {} {} {}", st.name, st.lhs, st.relation.symbol(), st.rhs);
        }
        if !self.failed_hypotheses.is_empty() {
            let _ = writeln!(s, "  hypothesis failed: {} not correctable", self.failed_hypotheses.join(", "));
        }
        let _ = writeln!(s, "  entropy_chain: {}", if self.all_hold() { "pass" } else { "FAIL" });
        s
    }
}

/// Evaluates each inequality of the entropic argument for `log₂D ≤ |C|`.
///
/// The purity substitutions are checked against the purified state directly,
/// not through the `S(XR) = S(Xᶜ)` identity.
pub fn verify_fact1_chain(code: &StabilizerCode, a: &BitVector, b: &BitVector, c: &BitVector) -> Result<EntropyReport> {
    let n = code.n();
    for r in [a, b, c] {
        check_region(code, r)?;
    }
    let union = a.xor(b).xor(c);
    if !a.and(b).is_zero() || !a.and(c).is_zero() || !b.and(c).is_zero() || union != BitVector::ones(n) {
        return Err(Error::Input("A, B, C must partition the qubits".into()));
    }
    let k = code.degeneracy();
    let s = |x: &BitVector| stabilizer_entropy(code, x);
    let (sa, sb, sc) = (s(a)?, s(b)?, s(c)?);
    let (sac, sbc, sabc) = (s(&a.xor(c))?, s(&b.xor(c))?, s(&union)?);
    let ia = mutual_info_with_reference(code, a)?;
    let ib = mutual_info_with_reference(code, b)?;

    let pure = purified_code(code)?;
    let with_r = |x: &BitVector| {
        let mut v = BitVector::zeros(n + k);
        x.iter_ones().for_each(|q| v.set(q, true));
        (n..n + k).for_each(|q| v.set(q, true));
        v
    };
    let sar = stabilizer_entropy(&pure, &with_r(a))?;
    let sbr = stabilizer_entropy(&pure, &with_r(b))?;

    let mut steps = vec![
        Step::eval("I(A:R) = 0", ia, Relation::Eq, 0),
        Step::eval("I(B:R) = 0", ib, Relation::Eq, 0),
        Step::eval("S(AR) = S(BC)", sar, Relation::Eq, sbc),
        Step::eval("S(BR) = S(AC)", sbr, Relation::Eq, sac),
        Step::eval("S(AC) + S(BC) ≤ S(A) + S(B) + 2S(C)", sac + sbc, Relation::Le, sa + sb + 2 * sc),
        Step::eval("S(ABC) = log2 D", sabc, Relation::Eq, k),
        Step::eval("S(ABC) ≤ S(C)", sabc, Relation::Le, sc),
        Step::eval("S(C) ≤ |C|", sc, Relation::Le, c.weight()),
    ];
    let mut failed = Vec::new();
    if ia != 0 {
        failed.push("A".to_string());
    }
    if ib != 0 {
        failed.push("B".to_string());
    }
    if !failed.is_empty() {
        // the conclusion needs both hypotheses
        for st in steps.iter_mut().filter(|st| st.name == "S(ABC) ≤ S(C)") {
            st.holds = None;
        }
    }
    Ok(EntropyReport {
        log_base: 2,
        log2_degeneracy: k,
        entropies: vec![
            ("A".into(), sa),
            ("B".into(), sb),
            ("C".into(), sc),
            ("AC".into(), sac),
            ("BC".into(), sbc),
            ("ABC".into(), sabc),
            ("AR".into(), sar),
            ("BR".into(), sbr),
        ],
        mutual_information: vec![("A".into(), ia), ("B".into(), ib)],
        steps,
        failed_hypotheses: failed,
    })
}

/// Above this the stated regime of the approximate bound no longer applies.
pub const APPROX_DELTA_REGIME: f64 = 0.1;
pub const APPROX_CONSTANT: f64 = 27.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxBound {
    pub delta: f64,
    pub prefactor: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `δ ≥ 0.1`.
    pub outside_stated_regime: bool,
    /// Prefactor ≤ 0, so the inequality says nothing.
    pub vacuous: bool,
    pub log_base: u32,
}

/// `(1 − 27 δ log₂(1/δ)) · log2_d ≤ log2_hc`.
pub fn approx_bound(delta: f64, log2_d: f64, log2_hc: f64) -> Result<ApproxBound> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Input(format!("δ = {delta} must lie in [0, 1)")));
    }
    let prefactor = if delta == 0.0 { 1.0 } else { 1.0 - APPROX_CONSTANT * delta * (1.0 / delta).log2() };
    let lhs = prefactor * log2_d;
    Ok(ApproxBound {
        delta,
        prefactor,
        lhs,
        rhs: log2_hc,
        holds: lhs <= log2_hc,
        outside_stated_regime: delta >= APPROX_DELTA_REGIME,
        vacuous: prefactor <= 0.0,
        log_base: 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correctability::is_correctable;
    use crate::stabilizer::toric_code;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bell() -> StabilizerCode {
        StabilizerCode::build(2, vec!["XX".parse().unwrap(), "ZZ".parse().unwrap()]).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(stabilizer_entropy(&bell(), &BitVector::from_indices(2, [1])).unwrap(), 1);
        assert_eq!(stabilizer_entropy(&bell(), &BitVector::zeros(2)).unwrap(), 0);
        let (code, lay) = toric_code(2, 4).unwrap();
        assert_eq!(stabilizer_entropy(&code, &lay.full_set()).unwrap(), 2);
        assert_eq!(mutual_info_with_reference(&code, &lay.full_set()).unwrap(), 4);
        assert_eq!(mutual_info_with_reference(&code, &lay.empty_set()).unwrap(), 0);
    }

    #[test]
    fn purified_state_is_pure_and_consistent() {
        let (code, _) = toric_code(2, 4).unwrap();
        let pure = purified_code(&code).unwrap();
        assert_eq!(pure.n(), 34);
        assert_eq!(pure.degeneracy(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let x = BitVector::from_bools(&(0..32).map(|_| rng.random_bool(0.4)).collect::<Vec<_>>());
            let mut xr = BitVector::zeros(34);
            x.iter_ones().for_each(|q| xr.set(q, true));
            xr.set(32, true);
            xr.set(33, true);
            let xc = x.xor(&BitVector::ones(32));
            assert_eq!(stabilizer_entropy(&pure, &xr).unwrap(), stabilizer_entropy(&code, &xc).unwrap());
            let sx = stabilizer_entropy(&code, &x).unwrap();
            assert!(sx <= x.weight());
            if is_correctable(&code, &x).unwrap().correctable {
                assert_eq!(mutual_info_with_reference(&code, &x).unwrap(), 0);
            }
            // subadditivity on a disjoint pair
            let y = xc.and(&BitVector::from_bools(&(0..32).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>()));
            let sy = stabilizer_entropy(&code, &y).unwrap();
            assert!(stabilizer_entropy(&code, &x.xor(&y)).unwrap() <= sx + sy);
        }
    }

    #[test]
    fn strip_breaks_the_hypothesis() {
        let (code, lay) = toric_code(2, 8).unwrap();
        let n = lay.n_qudits();
        let a = BitVector::from_indices(n, (0..n).filter(|&e| (2..4).contains(&((e / 2) / 8))));
        assert_eq!(mutual_info_with_reference(&code, &a).unwrap(), 2);
        let b = BitVector::from_indices(n, (0..n).filter(|&e| (5..7).contains(&((e / 2) / 8))));
        let c = a.xor(&b).xor(&BitVector::ones(n));
        let r = verify_fact1_chain(&code, &a, &b, &c).unwrap();
        assert_eq!(r.failed_hypotheses, vec!["A", "B"]);
        assert_eq!(r.step("S(ABC) ≤ S(C)").unwrap().holds, None);
        assert!(!r.all_hold());
        assert!(verify_fact1_chain(&code, &a, &a, &c).is_err());
    }

    #[test]
    fn approx_bound_values() {
        let b = approx_bound(0.0, 2.0, 5.0).unwrap();
        assert_eq!((b.prefactor, b.lhs, b.holds), (1.0, 2.0, true));
        let b = approx_bound(0.001, 100.0, 200.0).unwrap();
        assert!((b.lhs - 73.09238243141237).abs() < 1e-9);
        assert!(!b.outside_stated_regime && !b.vacuous);
        let b = approx_bound(0.1, 100.0, 1.0).unwrap();
        assert!(b.outside_stated_regime && b.vacuous && b.holds);
        assert!(approx_bound(1.0, 1.0, 1.0).is_err());
        assert!(approx_bound(-0.1, 1.0, 1.0).is_err());
    }
}
