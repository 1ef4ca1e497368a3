//! Barycentric subdivision and the induced chain map.
//!
//! The child complex has one vertex per simplex of the parent, labeled
//! `offset[k] + i` for the parent k-simplex with canonical index `i`, where
//! offsets grow with `k`. A child simplex is a flag `σ0 ⊂ … ⊂ σj` of parent
//! simplices; because labels are grouped by parent dimension, its largest
//! label is the top element of the flag, which is also its carrier.

use super::{Chain, SimplicialComplex};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Marks child k-simplices whose carrier has dimension greater than k.
pub const NO_CARRIER: u32 = u32::MAX;

/// The chain map from a complex to its barycentric subdivision.
#[derive(Clone, Debug)]
pub struct SubdivisionMap {
    parent_id: u64,
    child_id: u64,
    dim: usize,
    offsets: Vec<u32>,
    /// `carrier[k][j]`: parent k-simplex containing child k-simplex `j`, or [`NO_CARRIER`].
    carrier: Vec<Vec<u32>>,
}

impl SubdivisionMap {
    pub fn parent_id(&self) -> u64 {
        self.parent_id
    }

    pub fn child_id(&self) -> u64 {
        self.child_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The parent simplex `(dimension, index)` whose barycenter is child vertex `label`.
    pub fn parent_of_vertex(&self, label: u32) -> (usize, usize) {
        let k = self.offsets.partition_point(|&o| o <= label) - 1;
        (k, (label - self.offsets[k]) as usize)
    }

    /// Child vertex label of the barycenter of parent simplex `(k, i)`.
    pub fn vertex_of_parent(&self, k: usize, i: usize) -> u32 {
        self.offsets[k] + i as u32
    }

    /// Parent k-simplex carrying child k-simplex `j`, if its carrier has dimension k.
    pub fn carrier(&self, k: usize, j: usize) -> Option<usize> {
        match self.carrier[k][j] {
            NO_CARRIER => None,
            c => Some(c as usize),
        }
    }

    /// Child k-simplices contained in parent k-simplex `i`.
    pub fn carrier_set(&self, k: usize, i: usize) -> Vec<usize> {
        self.carrier[k]
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == i as u32)
            .map(|(j, _)| j)
            .collect()
    }

    /// The chain map: each parent simplex goes to the sum of its carrier set.
    pub fn push_chain(&self, c: &Chain) -> Result<Chain> {
        if c.complex_id != self.parent_id {
            return Err(Error::Input(
                "chain does not belong to the subdivided complex".into(),
            ));
        }
        let k = c.degree;
        let carriers = &self.carrier[k];
        let mut out = BitVector::zeros(carriers.len());
        for (j, &p) in carriers.iter().enumerate() {
            if p != NO_CARRIER && c.support.get(p as usize) {
                out.set(j, true);
            }
        }
        Ok(Chain {
            degree: k,
            complex_id: self.child_id,
            support: out,
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // lexicographic order
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor");
        perm.swap(i, j);
        perm[i + 1..].reverse();
        out.push(perm.clone());
    }
}

/// Barycentric subdivision with its chain map.
pub fn barycentric_subdivide(parent: &SimplicialComplex) -> (SimplicialComplex, SubdivisionMap) {
    let d = parent.dim();
    let mut offsets = Vec::with_capacity(d + 2);
    let mut acc = 0u32;
    for k in 0..=d {
        offsets.push(acc);
        acc += parent.count(k) as u32;
    }
    offsets.push(acc);

    let perms = permutations(d + 1);
    let n_sub = 1usize << (d + 1);
    let mut subset_label = vec![0u32; n_sub];
    let mut scratch = Vec::with_capacity(d + 1);
    let mut tops = Vec::with_capacity(parent.count(d) * perms.len() * (d + 1));
    for top in parent.simplices(d) {
        for (mask, slot) in subset_label.iter_mut().enumerate().skip(1) {
            scratch.clear();
            scratch.extend((0..=d).filter(|b| mask >> b & 1 == 1).map(|b| top[b]));
            let k = scratch.len() - 1;
            let idx = parent.index_of(&scratch).expect("face of a top simplex");
            *slot = offsets[k] + idx as u32;
        }
        for p in &perms {
            let mut mask = 0usize;
            for &b in p {
                mask |= 1 << b;
                tops.push(subset_label[mask]);
            }
        }
    }
    // flags are emitted with increasing labels; sort rows for the canonical order
    let stride = d + 1;
    let n = tops.len() / stride;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| tops[a * stride..(a + 1) * stride].cmp(&tops[b * stride..(b + 1) * stride]));
    let mut sorted = Vec::with_capacity(tops.len());
    for i in order {
        sorted.extend_from_slice(&tops[i * stride..(i + 1) * stride]);
    }
    let child = SimplicialComplex::from_sorted_tops(d, sorted)
        .expect("subdivision of a closed manifold is a closed manifold");

    let mut map = SubdivisionMap {
        parent_id: parent.id(),
        child_id: child.id(),
        dim: d,
        offsets,
        carrier: Vec::with_capacity(d + 1),
    };
    for k in 0..=d {
        let carriers = child
            .simplices(k)
            .map(|s| {
                let (pk, pi) = map.parent_of_vertex(*s.last().expect("nonempty simplex"));
                if pk == k {
                    pi as u32
                } else {
                    NO_CARRIER
                }
            })
            .collect();
        map.carrier.push(carriers);
    }
    (child, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds;
    use proptest::prelude::*;

    /// Boundary of a single 2-simplex is not closed; build the child by hand
    /// from flags to check flag counting on an open simplex.
    #[test]
    fn single_triangle_flag_counts() {
        // vertices 0,1,2; edges 01,02,12; triangle 012: 7 barycenters
        let simplices: Vec<Vec<u32>> = vec![
            vec![0], vec![1], vec![2],
            vec![0, 1], vec![0, 2], vec![1, 2],
            vec![0, 1, 2],
        ];
        let mut tris = std::collections::BTreeSet::new();
        let mut edges = std::collections::BTreeSet::new();
        let id = |s: &Vec<u32>| simplices.iter().position(|t| t == s).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                let (sa, sb) = (&simplices[a], &simplices[b]);
                if sa.len() < sb.len() && sa.iter().all(|v| sb.contains(v)) {
                    edges.insert((id(sa), id(sb)));
                    for c in 0..7 {
                        let sc = &simplices[c];
                        if sb.len() < sc.len() && sb.iter().all(|v| sc.contains(v)) {
                            tris.insert((a, b, c));
                        }
                    }
                }
            }
        }
        assert_eq!(edges.len(), 12);
        assert_eq!(tris.len(), 6);
        assert_eq!(7 - 12 + 6, 1);
    }

    #[test]
    fn top_count_multiplies_by_factorial() {
        for (k, fact) in [(manifolds::sphere(), 6), (manifolds::torus(), 6), (manifolds::torus3(), 24)] {
            let (child, _) = barycentric_subdivide(&k);
            assert_eq!(child.count(k.dim()), k.count(k.dim()) * fact);
            assert_eq!(child.count(0), k.counts().iter().sum::<usize>());
        }
    }

    #[test]
    fn subdivision_preserves_homology() {
        for k in [manifolds::torus(), manifolds::klein_bottle(), manifolds::projective_plane()] {
            let (child, _) = barycentric_subdivide(&k);
            assert_eq!(child.betti_numbers(), k.betti_numbers());
            assert_eq!(child.euler_characteristic(), k.euler_characteristic());
        }
    }

    #[test]
    fn push_zero_and_single_simplex() {
        let t = manifolds::torus();
        let (child, map) = barycentric_subdivide(&t);
        let z = map.push_chain(&t.zero_chain(1)).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.complex_id(), child.id());

        // a parent edge is split into 2 = 1!·2 child edges, exactly its carrier set
        let e = t.chain(1, BitVector::from_indices(21, [4])).unwrap();
        let pushed = map.push_chain(&e).unwrap();
        let carrier = map.carrier_set(1, 4);
        assert_eq!(carrier.len(), 2);
        assert_eq!(pushed.support().iter_ones().collect::<Vec<_>>(), carrier);
        for &j in &carrier {
            let s = child.simplex(1, j);
            assert!(s.contains(&map.vertex_of_parent(1, 4)));
        }
    }

    #[test]
    fn push_rejects_foreign_chain() {
        let t = manifolds::torus();
        let (_, map) = barycentric_subdivide(&t);
        assert!(map.push_chain(&manifolds::sphere().zero_chain(1)).is_err());
    }

    #[test]
    fn parent_vertex_roundtrip() {
        let t = manifolds::torus();
        let (_, map) = barycentric_subdivide(&t);
        for k in 0..=2 {
            for i in 0..t.count(k) {
                assert_eq!(map.parent_of_vertex(map.vertex_of_parent(k, i)), (k, i));
            }
        }
    }

    #[test]
    fn carriers_are_disjoint_and_cover() {
        let t = manifolds::projective_plane();
        let (child, map) = barycentric_subdivide(&t);
        for k in 0..=2 {
            let mut seen = vec![0usize; child.count(k)];
            for i in 0..t.count(k) {
                for j in map.carrier_set(k, i) {
                    seen[j] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c <= 1));
            // child k-simplices with a k-dimensional carrier are all covered
            for (j, &s) in seen.iter().enumerate() {
                assert_eq!(s == 1, map.carrier(k, j).is_some());
            }
        }
    }

    /// Brute-force chain-map check: compare ∂B(c) and B(∂c) through the dense boundary matrices.
    fn chain_map_commutes(k: &SimplicialComplex, deg: usize, support: BitVector) -> bool {
        let (child, map) = barycentric_subdivide(k);
        let c = k.chain(deg, support).unwrap();
        let lhs = child
            .boundary_matrix(deg)
            .unwrap()
            .mul_vec(map.push_chain(&c).unwrap().support())
            .unwrap();
        let dc = k.boundary_matrix(deg).unwrap().mul_vec(c.support()).unwrap();
        let rhs = map
            .push_chain(&k.chain(deg - 1, dc).unwrap())
            .unwrap();
        &lhs == rhs.support()
    }

    #[test]
    fn chain_map_exhaustive_on_sphere() {
        // 14 simplices total; enumerate every 1- and 2-chain
        let s2 = manifolds::sphere();
        for deg in 1..=2 {
            let n = s2.count(deg);
            for mask in 0u32..(1 << n) {
                let v = BitVector::from_indices(n, (0..n).filter(|b| mask >> b & 1 == 1));
                assert!(chain_map_commutes(&s2, deg, v), "deg {deg} mask {mask:b}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn chain_map_commutes_on_random_chains(bits in proptest::collection::vec(any::<bool>(), 21), deg in 1usize..=2) {
            let t = manifolds::torus();
            let n = t.count(deg);
            let v = BitVector::from_bools(&bits[..n]);
            prop_assert!(chain_map_commutes(&t, deg, v));
        }
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
