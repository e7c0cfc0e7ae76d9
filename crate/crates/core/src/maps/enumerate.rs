//! Exhaustive enumeration of `𝕄ₙ,ₛ`.
//!
//! [`map_closure`] builds the family directly from maps: every map with
//! surplus `s >= 1` arises from one with surplus `s - 1` by joining two
//! corners away from the root vertex. It shares no code with the
//! explorations and serves as their oracle. [`enumerate_maps_via`] builds the
//! same family as `𝓘` applied to all decorated trees.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice_paths::enumerate_excursions;
use crate::local_time::Mode;

use super::corners::{enumerate_admissible, AdmissibleCorners, DEFAULT_ADMISSIBLE_CAP};
use super::explore::insert_contour;
use super::RootedMap;

/// Largest `(n, s)` accepted by the exhaustive enumerators.
pub const MAP_ENUMERATION_CAP: (usize, usize) = (6, 3);

fn check_cap(n: usize, s: usize) -> Result<()> {
    if n > MAP_ENUMERATION_CAP.0 {
        return Err(Error::CapExceeded {
            what: "map enumeration (n)",
            requested: n,
            limit: MAP_ENUMERATION_CAP.0,
        });
    }
    if s > MAP_ENUMERATION_CAP.1 {
        return Err(Error::CapExceeded {
            what: "map enumeration (s)",
            requested: s,
            limit: MAP_ENUMERATION_CAP.1,
        });
    }
    Ok(())
}

/// `{𝓘(t, ξ) : (t, ξ) ∈ BFT(n, s)}` in canonical form, sorted.
pub fn enumerate_maps(n: usize, s: usize) -> Result<Vec<RootedMap>> {
    enumerate_maps_via(n, s, Mode::Bf)
}

/// `𝕄ₙ,ₛ` as the image of all decorated trees of the given mode.
pub fn enumerate_maps_via(n: usize, s: usize, mode: Mode) -> Result<Vec<RootedMap>> {
    check_cap(n, s)?;
    let mut out = BTreeSet::new();
    for f in enumerate_excursions(n)? {
        for xi in enumerate_admissible(&f, s, mode, DEFAULT_ADMISSIBLE_CAP)? {
            out.insert(insert_contour(&f, &xi).canonical());
        }
    }
    Ok(out.into_iter().collect())
}

/// `𝕄ₙ,ₛ` by repeatedly adding an edge between two non-root corners.
pub fn map_closure(n: usize, s: usize) -> Result<Vec<RootedMap>> {
    check_cap(n, s)?;
    let mut level: BTreeSet<RootedMap> = enumerate_excursions(n)?
        .iter()
        .map(|f| insert_contour(f, &AdmissibleCorners::empty(Mode::Bf)).canonical())
        .collect();
    for _ in 0..s {
        let mut next = BTreeSet::new();
        for m in &level {
            let len = m.num_half_edges();
            let (vertex, _) = m.vertex_of();
            let root_vertex = vertex[m.root()];
            let corners: Vec<usize> = (0..len).filter(|&h| vertex[h] != root_vertex).collect();
            for (p, &h1) in corners.iter().enumerate() {
                for &h2 in &corners[p..] {
                    next.insert(add_edge(m, h1, h2).canonical());
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

/// Adds an edge whose ends sit right after `h1` and `h2` in rotation order.
fn add_edge(m: &RootedMap, h1: usize, h2: usize) -> RootedMap {
    let mut inv = m.involution().to_vec();
    let mut rot = m.rotation().to_vec();
    let a = inv.len() as u32;
    let b = a + 1;
    inv.extend([b, a]);
    rot.extend([0, 0]);
    if h1 == h2 {
        let old = rot[h1];
        rot[h1] = a;
        rot[a as usize] = b;
        rot[b as usize] = old;
    } else {
        let old1 = rot[h1];
        let old2 = rot[h2];
        rot[h1] = a;
        rot[a as usize] = old1;
        rot[h2] = b;
        rot[b as usize] = old2;
    }
    RootedMap::from_parts_unchecked(inv, rot, m.root() as u32)
}
