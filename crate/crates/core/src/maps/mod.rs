//! Rooted combinatorial maps as rotation systems on half-edges.
//!
//! A map on `2E` half-edges is given by the edge involution `inv` and the
//! rotation `rot` (next half-edge clockwise around the same origin). Faces
//! are the cycles of `h ↦ rot[inv[h]]`; with this convention a plane tree
//! has exactly one face.

mod corners;
mod enumerate;
pub(crate) mod explore;
mod labeled;
pub(crate) mod unicellular;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crate::local_time::Mode;
pub use corners::{count_admissible, enumerate_admissible, AdmissibleCorners, Chord, DEFAULT_ADMISSIBLE_CAP};
pub use enumerate::{enumerate_maps, enumerate_maps_via, map_closure, MAP_ENUMERATION_CAP};
pub use explore::{bf_explore, df_explore, explore, explore_contour, insert, insert_unchecked};
pub use labeled::{
    count_connected, count_h, enumerate_h, enumerate_labeled_trees, gamma_diagnostic,
    h_nonempty_count, sbar, sbar_outcomes, sbf, w_one, w_s, w_twice, w_weight, GammaDiagnostic,
    LabeledGraph, Symmetrized, H_ENUMERATION_CAP,
};
pub use unicellular::{
    all_pairings, psi_count, psi_count_bruteforce, psi_count_dp, sg_check, sg_check_with,
    sg_enumerate, sg_size_formula, unicellular_glue, Composition, GlueOutcome,
    PermutationPairing, DEFAULT_GENUS_CAP,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedMap {
    inv: Vec<u32>,
    rot: Vec<u32>,
    root: u32,
}

/// Distances from the root vertex and the ball volumes they induce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootMetric {
    /// Distance of every vertex, indexed by [`RootedMap::vertex_of`] ids.
    pub dist: Vec<u32>,
    pub radius: u32,
    /// `ball[r] = #{v : d(root, v) <= r}` for `r = 0..=radius`.
    pub ball: Vec<u64>,
}

impl RootMetric {
    /// Vertex counts at each distance.
    pub fn profile(&self) -> Vec<u64> {
        let mut z = vec![0u64; self.radius as usize + 1];
        for &d in &self.dist {
            z[d as usize] += 1;
        }
        z
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    n: usize,
    s: usize,
    root: u32,
    involution: Vec<u32>,
    rotation: Vec<Vec<u32>>,
}

impl RootedMap {
    pub fn new(inv: Vec<u32>, rot: Vec<u32>, root: u32) -> Result<Self> {
        let len = inv.len();
        if len == 0 || len % 2 != 0 || rot.len() != len {
            return Err(Error::InvalidMap(format!(
                "need an even, nonzero number of half-edges (inv {len}, rot {})",
                rot.len()
            )));
        }
        for (h, &g) in inv.iter().enumerate() {
            if g as usize >= len || g as usize == h || inv[g as usize] as usize != h {
                return Err(Error::InvalidMap(format!("involution is not fixed-point-free at {h}")));
            }
        }
        let mut seen = vec![false; len];
        for &g in &rot {
            if g as usize >= len || seen[g as usize] {
                return Err(Error::InvalidMap("rotation is not a permutation".into()));
            }
            seen[g as usize] = true;
        }
        if root as usize >= len {
            return Err(Error::InvalidMap(format!("root {root} out of range")));
        }
        if rot[root as usize] != root {
            return Err(Error::InvalidMap("root vertex must have degree one".into()));
        }
        let m = RootedMap { inv, rot, root };
        let mut reached = vec![false; len];
        let mut queue = vec![root];
        reached[root as usize] = true;
        while let Some(h) = queue.pop() {
            for g in [m.inv[h as usize], m.rot[h as usize]] {
                if !reached[g as usize] {
                    reached[g as usize] = true;
                    queue.push(g);
                }
            }
        }
        if reached.iter().any(|&r| !r) {
            return Err(Error::InvalidMap("map is not connected".into()));
        }
        Ok(m)
    }

    pub(crate) fn from_parts_unchecked(inv: Vec<u32>, rot: Vec<u32>, root: u32) -> Self {
        RootedMap { inv, rot, root }
    }

    pub fn inv(&self, h: usize) -> usize {
        self.inv[h] as usize
    }

    pub fn rot(&self, h: usize) -> usize {
        self.rot[h] as usize
    }

    pub fn root(&self) -> usize {
        self.root as usize
    }

    pub fn involution(&self) -> &[u32] {
        &self.inv
    }

    pub fn rotation(&self) -> &[u32] {
        &self.rot
    }

    pub fn num_half_edges(&self) -> usize {
        self.inv.len()
    }

    pub fn num_edges(&self) -> usize {
        self.inv.len() / 2
    }

    /// Vertex id of every half-edge's origin, numbered by first appearance
    /// when scanning half-edges in id order; also returns the vertex count.
    pub fn vertex_of(&self) -> (Vec<u32>, usize) {
        let len = self.inv.len();
        let mut v = vec![u32::MAX; len];
        let mut count = 0u32;
        for h in 0..len {
            if v[h] != u32::MAX {
                continue;
            }
            let mut g = h;
            loop {
                v[g] = count;
                g = self.rot[g] as usize;
                if g == h {
                    break;
                }
            }
            count += 1;
        }
        (v, count as usize)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_of().1
    }

    /// Number of non-root vertices.
    pub fn n(&self) -> usize {
        self.num_vertices() - 1
    }

    /// Surplus `E - V + 1`.
    pub fn s(&self) -> usize {
        self.num_edges() + 1 - self.num_vertices()
    }

    pub fn faces(&self) -> Vec<Vec<u32>> {
        let len = self.inv.len();
        let mut seen = vec![false; len];
        let mut faces = Vec::new();
        for h in 0..len {
            if seen[h] {
                continue;
            }
            let mut face = Vec::new();
            let mut g = h;
            while !seen[g] {
                seen[g] = true;
                face.push(g as u32);
                g = self.rot[self.inv[g] as usize] as usize;
            }
            faces.push(face);
        }
        faces
    }

    pub fn num_faces(&self) -> usize {
        self.faces().len()
    }

    pub fn genus(&self) -> usize {
        let chi = self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64;
        ((2 - chi) / 2) as usize
    }

    pub fn is_unicellular(&self) -> bool {
        self.num_faces() == 1
    }

    /// Graph distances from the origin of `from` (a half-edge id).
    pub fn distances_from(&self, from: usize) -> (Vec<u32>, Vec<u32>) {
        let (vertex, count) = self.vertex_of();
        // one representative half-edge per vertex
        let mut rep = vec![usize::MAX; count];
        for (h, &v) in vertex.iter().enumerate() {
            if rep[v as usize] == usize::MAX {
                rep[v as usize] = h;
            }
        }
        let mut dist = vec![u32::MAX; count];
        let start = vertex[from] as usize;
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let first = rep[v];
            let mut h = first;
            loop {
                let w = vertex[self.inv[h] as usize] as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                h = self.rot[h] as usize;
                if h == first {
                    break;
                }
            }
        }
        (dist, vertex)
    }

    pub fn metric_from_root(&self) -> RootMetric {
        let (dist, _) = self.distances_from(self.root as usize);
        let radius = dist.iter().copied().max().unwrap_or(0);
        let mut ball = vec![0u64; radius as usize + 1];
        for &d in &dist {
            ball[d as usize] += 1;
        }
        for r in 1..ball.len() {
            ball[r] += ball[r - 1];
        }
        RootMetric { dist, radius, ball }
    }

    /// Relabels half-edges in order of discovery from the root (following
    /// `rot` then `inv`), so isomorphic rooted maps become equal.
    pub fn canonical(&self) -> RootedMap {
        let len = self.inv.len();
        let mut label = vec![u32::MAX; len];
        let mut order = Vec::with_capacity(len);
        label[self.root as usize] = 0;
        order.push(self.root as usize);
        let mut head = 0;
        while head < order.len() {
            let h = order[head];
            head += 1;
            for g in [self.rot[h] as usize, self.inv[h] as usize] {
                if label[g] == u32::MAX {
                    label[g] = order.len() as u32;
                    order.push(g);
                }
            }
        }
        let mut inv = vec![0u32; len];
        let mut rot = vec![0u32; len];
        for (new, &old) in order.iter().enumerate() {
            inv[new] = label[self.inv[old] as usize];
            rot[new] = label[self.rot[old] as usize];
        }
        RootedMap { inv, rot, root: 0 }
    }

    /// Rotation cycles, each starting at its smallest half-edge, sorted.
    pub fn rotation_cycles(&self) -> Vec<Vec<u32>> {
        let len = self.rot.len();
        let mut seen = vec![false; len];
        let mut cycles = Vec::new();
        for h in 0..len {
            if seen[h] {
                continue;
            }
            let mut c = Vec::new();
            let mut g = h;
            while !seen[g] {
                seen[g] = true;
                c.push(g as u32);
                g = self.rot[g] as usize;
            }
            cycles.push(c);
        }
        cycles
    }

    pub fn from_rotation_cycles(inv: Vec<u32>, cycles: &[Vec<u32>], root: u32) -> Result<Self> {
        let len = inv.len();
        let mut rot = vec![u32::MAX; len];
        for c in cycles {
            for (k, &h) in c.iter().enumerate() {
                let next = c[(k + 1) % c.len()];
                if h as usize >= len || rot[h as usize] != u32::MAX {
                    return Err(Error::Schema(format!("rotation cycles reuse or exceed half-edge {h}")));
                }
                rot[h as usize] = next;
            }
        }
        if rot.contains(&u32::MAX) {
            return Err(Error::Schema("rotation cycles do not cover every half-edge".into()));
        }
        RootedMap::new(inv, rot, root).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let j = MapJson {
            n: self.n(),
            s: self.s(),
            root: self.root,
            involution: self.inv.clone(),
            rotation: self.rotation_cycles(),
        };
        serde_json::to_string(&j).expect("map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: MapJson = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let m = RootedMap::from_rotation_cycles(j.involution, &j.rotation, j.root)?;
        if m.n() != j.n || m.s() != j.s {
            return Err(Error::Schema(format!(
                "declared (n, s) = ({}, {}) but structure has ({}, {})",
                j.n,
                j.s,
                m.n(),
                m.s()
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_paths::{enumerate_excursions, tree_of_contour};

    #[test]
    fn trees_have_one_face() {
        for n in 1..=6 {
            for f in enumerate_excursions(n).unwrap() {
                let m = insert(&tree_of_contour(&f), &AdmissibleCorners::empty(Mode::Bf)).unwrap();
                assert_eq!(m.num_faces(), 1);
                assert_eq!(m.genus(), 0);
                assert_eq!(m.n(), n);
                assert_eq!(m.metric_from_root().radius, f.max_height());
            }
        }
    }

    #[test]
    fn square_with_pendant_root() {
        // root r - a, square a b c d with edges ab bc cd da, drawn in the plane
        // half-edges: 0/1 root edge, 2/3 ab, 4/5 bc, 6/7 cd, 8/9 da
        let inv = vec![1, 0, 3, 2, 5, 4, 7, 6, 9, 8];
        let cycles = vec![vec![0], vec![1, 2, 9], vec![3, 4], vec![5, 6], vec![7, 8]];
        let m = RootedMap::from_rotation_cycles(inv, &cycles, 0).unwrap();
        assert_eq!(m.num_faces(), 2);
        assert_eq!(m.genus(), 0);
        assert_eq!((m.n(), m.s()), (4, 1));
        let round = RootedMap::from_json(&m.to_json()).unwrap();
        assert_eq!(round, m);
    }

    #[test]
    fn rejects_bad_rotation() {
        assert!(RootedMap::new(vec![1, 0], vec![0, 0], 0).is_err());
        assert!(RootedMap::new(vec![0, 1], vec![0, 1], 0).is_err());
        let bad = r#"{"n":1,"s":0,"root":0,"involution":[1,0],"rotation":[[0],[0]]}"#;
        assert!(matches!(RootedMap::from_json(bad), Err(Error::Schema(_))));
    }
}
