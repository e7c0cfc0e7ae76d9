//! The insertion map `𝓘` and its inverses, the breadth-first and
//! depth-first explorations.
//!
//! Half-edge layout produced by [`insert`]: tree half-edge `d_t` (contour
//! step `t = 1..=2n`, from the vertex at time `t-1` to the vertex at time
//! `t`) has id `t - 1`, so the root half-edge is 0. Chord `j` owns ids
//! `2n + 2j` (at its first corner) and `2n + 2j + 1`. Corner `i` sits between
//! `inv(d_i)` and `d_{i+1}`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::lattice_paths::{contour_of_tree, tree_of_contour, LatticeExcursion, PlaneTree};
use crate::local_time::Mode;

use super::corners::{AdmissibleCorners, Chord};
use super::RootedMap;

/// `𝓘(t, ξ)`, after checking that `ξ` is admissible for `t`.
pub fn insert(t: &PlaneTree, xi: &AdmissibleCorners) -> Result<RootedMap> {
    let f = contour_of_tree(t);
    xi.validate(&f)?;
    Ok(insert_contour(&f, xi))
}

/// Inserts the chords of `xi` checking tags and ordering but not the
/// exploration condition.
pub fn insert_unchecked(t: &PlaneTree, xi: &AdmissibleCorners) -> Result<RootedMap> {
    let f = contour_of_tree(t);
    xi.validate_structure(f.n())?;
    Ok(insert_contour(&f, xi))
}

pub(crate) fn insert_contour(f: &LatticeExcursion, xi: &AdmissibleCorners) -> RootedMap {
    let v = f.values();
    let two_n = v.len() - 1;
    let total = two_n + 2 * xi.s();
    let mut inv = vec![0u32; total];
    let mut rot = vec![0u32; total];
    let mut stack = Vec::with_capacity(two_n / 2);
    for t in 1..=two_n {
        let h = (t - 1) as u32;
        if v[t] > v[t - 1] {
            stack.push(h);
        } else {
            let up = stack.pop().expect("contour is balanced");
            inv[h as usize] = up;
            inv[up as usize] = h;
        }
    }
    for t in 1..=two_n {
        rot[inv[t - 1] as usize] = (t % two_n) as u32;
    }
    let mut at_corner: Vec<Vec<(u32, u32)>> = vec![Vec::new(); two_n];
    for (j, ((i1, k1), (i2, k2))) in xi.chords().into_iter().enumerate() {
        let a = (two_n + 2 * j) as u32;
        let b = a + 1;
        inv[a as usize] = b;
        inv[b as usize] = a;
        at_corner[i1 as usize].push((k1, a));
        at_corner[i2 as usize].push((k2, b));
    }
    for (c, list) in at_corner.iter_mut().enumerate() {
        if list.is_empty() {
            continue;
        }
        list.sort_unstable();
        let mut prev = inv[c - 1] as usize;
        for &(_, h) in list.iter() {
            rot[prev] = h;
            prev = h as usize;
        }
        rot[prev] = c as u32;
    }
    RootedMap::from_parts_unchecked(inv, rot, 0)
}

pub fn bf_explore(m: &RootedMap) -> Result<(PlaneTree, AdmissibleCorners)> {
    explore(m, Mode::Bf)
}

pub fn df_explore(m: &RootedMap) -> Result<(PlaneTree, AdmissibleCorners)> {
    explore(m, Mode::Df)
}

pub fn explore(m: &RootedMap, mode: Mode) -> Result<(PlaneTree, AdmissibleCorners)> {
    let (f, xi) = explore_contour(m, mode)?;
    Ok((tree_of_contour(&f), xi))
}

/// Spanning tree (as its contour) and decoration found by the exploration.
pub fn explore_contour(m: &RootedMap, mode: Mode) -> Result<(LatticeExcursion, AdmissibleCorners)> {
    let r = m.root();
    if m.rot(r) != r {
        return Err(Error::InvalidMap("root vertex must have degree one".into()));
    }
    let (vertex, count) = m.vertex_of();
    let len = m.num_half_edges();
    let mut tree = vec![false; len];
    let mut parent_half = vec![usize::MAX; count];
    let mut discovered = vec![false; count];
    discovered[vertex[r] as usize] = true;
    let first = vertex[m.inv(r)] as usize;
    discovered[first] = true;
    parent_half[first] = m.inv(r);
    tree[r] = true;
    tree[m.inv(r)] = true;
    let n = count - 1;

    match mode {
        Mode::Bf => {
            let mut classified = tree.clone();
            let mut queue = VecDeque::from([first]);
            while let Some(w) = queue.pop_front() {
                let start = parent_half[w];
                let mut h = m.rot(start);
                while h != start {
                    if !classified[h] {
                        let g = m.inv(h);
                        classified[h] = true;
                        classified[g] = true;
                        let x = vertex[g] as usize;
                        if !discovered[x] {
                            discovered[x] = true;
                            parent_half[x] = g;
                            tree[h] = true;
                            tree[g] = true;
                            queue.push_back(x);
                        }
                    }
                    h = m.rot(h);
                }
            }
        }
        Mode::Df => {
            let mut deleted = vec![false; len];
            let mut last = r;
            for _ in 1..2 * n {
                let a = m.inv(last);
                let mut c = m.rot(a);
                loop {
                    if deleted[c] {
                        c = m.rot(c);
                        continue;
                    }
                    if tree[c] {
                        break;
                    }
                    let g = m.inv(c);
                    let x = vertex[g] as usize;
                    if !discovered[x] {
                        discovered[x] = true;
                        parent_half[x] = g;
                        tree[c] = true;
                        tree[g] = true;
                        break;
                    }
                    deleted[c] = true;
                    deleted[g] = true;
                    c = m.rot(c);
                }
                last = c;
            }
        }
    }
    if discovered.iter().any(|&d| !d) {
        return Err(Error::InvalidMap("exploration did not reach every vertex".into()));
    }

    // contour walk of the spanning tree in the map's rotation order
    let mut time = vec![0u32; len];
    let mut values = Vec::with_capacity(2 * n + 1);
    values.push(0u32);
    let mut d = r;
    for t in 1..=2 * n {
        time[d] = t as u32;
        let g = m.inv(d);
        let up = parent_half[vertex[g] as usize] == g;
        let h = *values.last().unwrap();
        values.push(if up { h + 1 } else { h - 1 });
        let mut next = m.rot(g);
        while !tree[next] {
            next = m.rot(next);
        }
        d = next;
    }
    let f = LatticeExcursion::new(values)
        .map_err(|e| Error::InvalidMap(format!("spanning tree contour is malformed: {e}")))?;

    let mut corner_of = vec![(0u32, 0u32); len];
    for a in 0..len {
        if !tree[a] || vertex[a] == vertex[r] {
            continue;
        }
        let i = time[m.inv(a)];
        let mut g = m.rot(a);
        let mut k = 1;
        while !tree[g] {
            corner_of[g] = (i, k);
            k += 1;
            g = m.rot(g);
        }
    }
    let chords: Vec<Chord> = (0..len)
        .filter(|&h| !tree[h] && h < m.inv(h))
        .map(|h| (corner_of[h], corner_of[m.inv(h)]))
        .collect();
    Ok((f, AdmissibleCorners::from_chords(mode, chords)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_paths::enumerate_excursions;
    use crate::maps::corners::{enumerate_admissible, DEFAULT_ADMISSIBLE_CAP};

    #[test]
    fn tree_round_trip() {
        for n in 1..=5 {
            for f in enumerate_excursions(n).unwrap() {
                let t = tree_of_contour(&f);
                for mode in [Mode::Bf, Mode::Df] {
                    let m = insert(&t, &AdmissibleCorners::empty(mode)).unwrap();
                    let (t2, xi) = explore(&m, mode).unwrap();
                    assert_eq!(t2, t);
                    assert_eq!(xi.s(), 0);
                }
            }
        }
    }

    #[test]
    fn decorations_round_trip() {
        for n in 1..=4 {
            for f in enumerate_excursions(n).unwrap() {
                let t = tree_of_contour(&f);
                for mode in [Mode::Bf, Mode::Df] {
                    for s in 1..=2 {
                        for xi in enumerate_admissible(&f, s, mode, DEFAULT_ADMISSIBLE_CAP).unwrap() {
                            let m = insert(&t, &xi).unwrap();
                            let (t2, xi2) = explore(&m, mode).unwrap();
                            assert_eq!((&t2, &xi2), (&t, &xi), "{f} {mode:?}");
                        }
                    }
                }
            }
        }
    }
}
