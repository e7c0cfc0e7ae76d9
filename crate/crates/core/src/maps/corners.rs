//! Admissible corner decorations `ξ = (i₁..i₂ₛ, k₁..k₂ₛ)`.
//!
//! Edge `j` joins corner `i[2j]` (tag `k[2j]`) to corner `i[2j+1]` (tag
//! `k[2j+1]`). Within a corner, the half-edges of inserted edges are placed
//! in increasing tag order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_paths::LatticeExcursion;
use crate::local_time::{in_bf_set, in_df_set, incoming_counts, weights, Mode};

pub const DEFAULT_ADMISSIBLE_CAP: usize = 2_000_000;

/// One inserted edge: `(corner, tag)` at each end, smaller end first.
pub type Chord = ((u32, u32), (u32, u32));

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissibleCorners {
    pub mode: Mode,
    pub i: Vec<u32>,
    pub k: Vec<u32>,
}

impl AdmissibleCorners {
    pub fn empty(mode: Mode) -> Self {
        AdmissibleCorners {
            mode,
            i: Vec::new(),
            k: Vec::new(),
        }
    }

    pub fn s(&self) -> usize {
        self.i.len() / 2
    }

    pub fn chords(&self) -> Vec<Chord> {
        (0..self.s())
            .map(|j| {
                (
                    (self.i[2 * j], self.k[2 * j]),
                    (self.i[2 * j + 1], self.k[2 * j + 1]),
                )
            })
            .collect()
    }

    /// Orients each chord smaller-end first and sorts the chords.
    pub fn from_chords(mode: Mode, mut chords: Vec<Chord>) -> Self {
        for c in chords.iter_mut() {
            if c.1 < c.0 {
                *c = (c.1, c.0);
            }
        }
        chords.sort_by_key(|&((i1, k1), (i2, _))| (i1, i2, k1));
        let mut i = Vec::with_capacity(2 * chords.len());
        let mut k = Vec::with_capacity(2 * chords.len());
        for ((i1, k1), (i2, k2)) in chords {
            i.extend([i1, i2]);
            k.extend([k1, k2]);
        }
        AdmissibleCorners { mode, i, k }
    }

    /// Chords between distinct corners, all tags 1.
    pub fn from_distinct_pairs(mode: Mode, pairs: &[(u32, u32)]) -> Self {
        AdmissibleCorners::from_chords(mode, pairs.iter().map(|&(a, b)| ((a, 1), (b, 1))).collect())
    }

    /// Checks the tag, ordering and exploration conditions against `f`.
    pub fn validate(&self, f: &LatticeExcursion) -> Result<()> {
        self.validate_structure(f.n())?;
        let v = f.values();
        for ((i1, _), (i2, _)) in self.chords() {
            let ok = match self.mode {
                Mode::Bf => in_bf_set(v, i1 as usize, i2 as usize),
                Mode::Df => in_df_set(v, i1 as usize, i2 as usize),
            };
            if !ok {
                return Err(Error::InvalidCorners(format!(
                    "corners ({i1}, {i2}) violate the {} condition",
                    self.mode.as_str()
                )));
            }
        }
        Ok(())
    }

    /// Range, tag-permutation and canonical-order checks, independent of the
    /// exploration mode.
    pub fn validate_structure(&self, n: usize) -> Result<()> {
        if self.i.len() != self.k.len() || self.i.len() % 2 != 0 {
            return Err(Error::InvalidCorners("indices and tags must pair up".into()));
        }
        let top = 2 * n as u32 - 1;
        if let Some(&bad) = self.i.iter().find(|&&c| c == 0 || c > top) {
            return Err(Error::InvalidCorners(format!("corner {bad} outside [1, {top}]")));
        }
        let mut by_corner: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for (&c, &k) in self.i.iter().zip(&self.k) {
            by_corner.entry(c).or_default().push(k);
        }
        for (c, mut tags) in by_corner {
            tags.sort_unstable();
            if tags.iter().enumerate().any(|(p, &k)| k != p as u32 + 1) {
                return Err(Error::InvalidCorners(format!(
                    "tags at corner {c} are {tags:?}, not a permutation of 1..{}",
                    tags.len()
                )));
            }
        }
        let chords = self.chords();
        for &(a, b) in &chords {
            if b <= a {
                return Err(Error::InvalidCorners(format!("chord {a:?}-{b:?} is not oriented")));
            }
        }
        for w in chords.windows(2) {
            let key = |c: &Chord| (c.0 .0, c.1 .0, c.0 .1);
            if key(&w[0]) >= key(&w[1]) {
                return Err(Error::InvalidCorners("chords are not in canonical order".into()));
            }
        }
        Ok(())
    }
}

/// All valid `(i1, i2)` pairs with `i1 <= i2`, in lexicographic order.
pub(crate) fn valid_pairs(f: &LatticeExcursion, mode: Mode) -> Vec<(u32, u32)> {
    let w = weights(f, mode);
    let mut out = Vec::with_capacity(w.total as usize);
    for i in 1..2 * f.n() {
        for j in w.set(i) {
            out.push((i as u32, j as u32));
        }
    }
    out
}

/// Every admissible decoration of the tree with contour `f` carrying `s`
/// chords.
pub fn enumerate_admissible(f: &LatticeExcursion, s: usize, mode: Mode, cap: usize) -> Result<Vec<AdmissibleCorners>> {
    if s == 0 {
        return Ok(vec![AdmissibleCorners::empty(mode)]);
    }
    let pairs = valid_pairs(f, mode);
    let estimate = count_admissible(f, s, mode).unwrap_or(u128::MAX);
    if estimate > cap as u128 {
        return Err(Error::CapExceeded {
            what: "admissible corner enumeration",
            requested: estimate.min(usize::MAX as u128) as usize,
            limit: cap,
        });
    }
    let mut out = BTreeSet::new();
    let mut chosen = Vec::with_capacity(s);
    multisets(&pairs, s, 0, &mut chosen, &mut |pick| {
        for xi in tag_assignments(mode, pick) {
            out.insert(xi);
        }
    });
    Ok(out.into_iter().collect())
}

fn multisets<F: FnMut(&[(u32, u32)])>(pairs: &[(u32, u32)], s: usize, from: usize, chosen: &mut Vec<(u32, u32)>, visit: &mut F) {
    if chosen.len() == s {
        visit(chosen);
        return;
    }
    for p in from..pairs.len() {
        chosen.push(pairs[p]);
        multisets(pairs, s, p, chosen, visit);
        chosen.pop();
    }
}

/// All distinct decorations whose chords have the given corner pairs.
pub(crate) fn tag_assignments(mode: Mode, pick: &[(u32, u32)]) -> BTreeSet<AdmissibleCorners> {
    // slots: (chord, end) in order; corners get tag permutations independently
    let mut corners: Vec<u32> = pick.iter().flat_map(|&(a, b)| [a, b]).collect();
    corners.sort_unstable();
    corners.dedup();
    let slots_at: Vec<Vec<usize>> = corners
        .iter()
        .map(|&c| {
            (0..2 * pick.len())
                .filter(|&slot| {
                    let (a, b) = pick[slot / 2];
                    (if slot % 2 == 0 { a } else { b }) == c
                })
                .collect()
        })
        .collect();
    let mut tags = vec![0u32; 2 * pick.len()];
    let mut out = BTreeSet::new();
    fn rec(
        level: usize,
        slots_at: &[Vec<usize>],
        tags: &mut Vec<u32>,
        pick: &[(u32, u32)],
        mode: Mode,
        out: &mut BTreeSet<AdmissibleCorners>,
    ) {
        if level == slots_at.len() {
            let chords: Vec<Chord> = pick
                .iter()
                .enumerate()
                .map(|(j, &(a, b))| ((a, tags[2 * j]), (b, tags[2 * j + 1])))
                .collect();
            // orienting loops as (c, k) < (c, k') merges the two tag orders
            out.insert(AdmissibleCorners::from_chords(mode, chords));
            return;
        }
        let slots = &slots_at[level];
        let mut perm: Vec<u32> = (1..=slots.len() as u32).collect();
        loop {
            for (p, &slot) in slots.iter().enumerate() {
                tags[slot] = perm[p];
            }
            rec(level + 1, slots_at, tags, pick, mode, out);
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    rec(0, &slots_at, &mut tags, pick, mode, &mut out);
    out
}

pub(crate) fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// `#BFAC(t, s)` or `#DFAC(t, s)` in closed form for `s <= 2`.
///
/// With `P` valid pairs, `m = 2n - 1` loops and `d(x)` the number of
/// non-loop pairs touching corner `x`:
/// `#(s=1) = P` and `#(s=2) = C(P,2) + Σ C(d(x),2) + 6(P - m) + 3m`.
pub fn count_admissible(f: &LatticeExcursion, s: usize, mode: Mode) -> Option<u128> {
    let w = weights(f, mode);
    let p = w.total as u128;
    match s {
        0 => Some(1),
        1 => Some(p),
        2 => {
            let m = (2 * f.n() - 1) as u128;
            let incoming = incoming_counts(f, mode);
            let shared: u128 = (1..2 * f.n())
                .map(|x| {
                    let d = (w.get(x) + incoming[x] - 2) as u128;
                    d * d.saturating_sub(1) / 2
                })
                .sum();
            Some(p * (p - 1) / 2 + shared + 6 * (p - m) + 3 * m)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_paths::enumerate_excursions;

    fn exc(v: &[u32]) -> LatticeExcursion {
        LatticeExcursion::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_listings() {
        let e = exc(&[0, 1, 0]);
        let one = enumerate_admissible(&e, 1, Mode::Bf, 100).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].i, vec![1, 1]);
        assert_eq!(one[0].k, vec![1, 2]);
        assert_eq!(enumerate_admissible(&e, 2, Mode::Bf, 100).unwrap().len(), 3);

        let path = exc(&[0, 1, 2, 1, 0]);
        let bf = enumerate_admissible(&path, 1, Mode::Bf, 100).unwrap();
        let idx: Vec<(u32, u32)> = bf.iter().map(|x| (x.i[0], x.i[1])).collect();
        assert_eq!(idx, vec![(1, 1), (1, 3), (2, 2), (2, 3), (3, 3)]);
        assert_eq!(enumerate_admissible(&path, 1, Mode::Df, 100).unwrap().len(), 5);
        assert_eq!(enumerate_admissible(&path, 2, Mode::Bf, 1000).unwrap().len(), 32);
    }

    #[test]
    fn closed_form_matches_listing() {
        for n in 1..=5 {
            for f in enumerate_excursions(n).unwrap() {
                for mode in [Mode::Bf, Mode::Df] {
                    for s in 1..=2 {
                        let listed = enumerate_admissible(&f, s, mode, DEFAULT_ADMISSIBLE_CAP).unwrap();
                        for xi in &listed {
                            xi.validate(&f).unwrap();
                        }
                        assert_eq!(listed.len() as u128, count_admissible(&f, s, mode).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_tags() {
        let path = exc(&[0, 1, 2, 1, 0]);
        let loop_wrong = AdmissibleCorners {
            mode: Mode::Bf,
            i: vec![1, 1],
            k: vec![2, 1],
        };
        assert!(loop_wrong.validate(&path).is_err());
        let gap = AdmissibleCorners {
            mode: Mode::Bf,
            i: vec![1, 3],
            k: vec![2, 1],
        };
        assert!(gap.validate(&path).is_err());
        let upward = AdmissibleCorners {
            mode: Mode::Bf,
            i: vec![1, 2],
            k: vec![1, 1],
        };
        assert!(upward.validate(&path).is_err());
    }
}
