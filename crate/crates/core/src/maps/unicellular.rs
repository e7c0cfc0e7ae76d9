//! Pairings of `[4g]`, the classes `𝕊₍g₎`, unicellular gluing of a tree
//! along `4g` corners, and the ψ-counts that tilt the contour.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_paths::{contour_of_tree, LatticeExcursion, PlaneTree};
use crate::local_time::Mode;

use super::corners::AdmissibleCorners;
use super::explore::insert_contour;
use super::RootedMap;

pub const DEFAULT_GENUS_CAP: usize = 3;

/// A fixed-point-free involution of `{1..4g}` written as `2g` transpositions
/// `(a, b)` with `a < b`, sorted by `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PermutationPairing {
    pairs: Vec<(u32, u32)>,
}

impl PermutationPairing {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        let size = 2 * pairs.len();
        if size == 0 || size % 4 != 0 {
            return Err(Error::InvalidPairing(format!(
                "{} transpositions do not cover [4g]",
                pairs.len()
            )));
        }
        let mut seen = vec![false; size + 1];
        let mut norm = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            for x in [a, b] {
                if x == 0 || x as usize > size || seen[x as usize] {
                    return Err(Error::InvalidPairing(format!("element {x} repeated or outside 1..={size}")));
                }
                seen[x as usize] = true;
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(PermutationPairing { pairs: norm })
    }

    pub fn g(&self) -> usize {
        self.pairs.len() / 2
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// `σ(x)` for `x` in `1..=4g`.
    pub fn image(&self, x: u32) -> u32 {
        for &(a, b) in &self.pairs {
            if a == x {
                return b;
            }
            if b == x {
                return a;
            }
        }
        panic!("{x} outside the pairing's support")
    }

    fn as_array(&self) -> Vec<u32> {
        let mut s = vec![0u32; 4 * self.g() + 1];
        for &(a, b) in &self.pairs {
            s[a as usize] = b;
            s[b as usize] = a;
        }
        s
    }
}

impl fmt::Display for PermutationPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            write!(f, "({a},{b})")?;
        }
        Ok(())
    }
}

impl FromStr for PermutationPairing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for chunk in s.split(')') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let body = chunk
                .strip_prefix('(')
                .ok_or_else(|| Error::InvalidPairing(format!("malformed transposition {chunk:?}")))?;
            let parts: Vec<&str> = body.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::InvalidPairing(format!("malformed transposition {chunk:?}")));
            }
            let a = parts[0].parse().map_err(|_| Error::InvalidPairing(format!("bad element {:?}", parts[0])))?;
            let b = parts[1].parse().map_err(|_| Error::InvalidPairing(format!("bad element {:?}", parts[1])))?;
            pairs.push((a, b));
        }
        PermutationPairing::new(pairs)
    }
}

/// Order of composition of `ϱ = (1 2 … 4g)` with `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composition {
    /// `x ↦ ϱ(σ(x))`
    RhoAfterSigma,
    /// `x ↦ σ(ϱ(x))`
    SigmaAfterRho,
}

/// Membership in `𝕊₍g₎`: `ϱσ` is a single `4g`-cycle.
pub fn sg_check(sigma: &PermutationPairing) -> bool {
    sg_check_with(sigma, Composition::RhoAfterSigma)
}

pub fn sg_check_with(sigma: &PermutationPairing, order: Composition) -> bool {
    let size = 4 * sigma.g() as u32;
    let s = sigma.as_array();
    let rho = |x: u32| x % size + 1;
    let step = |x: u32| match order {
        Composition::RhoAfterSigma => rho(s[x as usize]),
        Composition::SigmaAfterRho => s[rho(x) as usize],
    };
    let mut x = step(1);
    let mut len = 1;
    while x != 1 {
        x = step(x);
        len += 1;
    }
    len == size
}

/// All `(4g-1)!!` pairings of `[4g]`.
pub fn all_pairings(g: usize) -> Result<Vec<PermutationPairing>> {
    if g == 0 || g > DEFAULT_GENUS_CAP + 1 {
        return Err(Error::CapExceeded {
            what: "pairing enumeration (g)",
            requested: g,
            limit: DEFAULT_GENUS_CAP + 1,
        });
    }
    let size = 4 * g as u32;
    let mut out = Vec::new();
    let mut used = vec![false; size as usize + 1];
    let mut cur = Vec::with_capacity(2 * g);
    fn rec(size: u32, used: &mut Vec<bool>, cur: &mut Vec<(u32, u32)>, out: &mut Vec<PermutationPairing>) {
        let Some(a) = (1..=size).find(|&x| !used[x as usize]) else {
            out.push(PermutationPairing { pairs: cur.clone() });
            return;
        };
        used[a as usize] = true;
        for b in a + 1..=size {
            if used[b as usize] {
                continue;
            }
            used[b as usize] = true;
            cur.push((a, b));
            rec(size, used, cur, out);
            cur.pop();
            used[b as usize] = false;
        }
        used[a as usize] = false;
    }
    rec(size, &mut used, &mut cur, &mut out);
    Ok(out)
}

/// `𝕊₍g₎` by filtering all pairings; `g <= 3`.
pub fn sg_enumerate(g: usize) -> Result<Vec<PermutationPairing>> {
    if g > DEFAULT_GENUS_CAP {
        return Err(Error::CapExceeded {
            what: "S_g enumeration",
            requested: g,
            limit: DEFAULT_GENUS_CAP,
        });
    }
    Ok(all_pairings(g)?.into_iter().filter(sg_check).collect())
}

/// One-face gluings of a `4g`-gon with one vertex: `(4g)! / (4^g (2g+1)!)`.
pub fn sg_size_formula(g: usize) -> u128 {
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    fact(4 * g) / (4u128.pow(g as u32) * fact(2 * g + 1))
}

#[derive(Clone, Debug)]
pub struct GlueOutcome {
    pub map: RootedMap,
    pub faces: usize,
    pub genus: usize,
    pub unicellular: bool,
    /// Whether every chord satisfies `0 <= C(r_a) - C(r_b) <= 1`.
    pub heights_ok: bool,
}

/// Joins corner `r_a` to corner `r_b` for every transposition `(a, b)`.
///
/// With `strict`, corners violating the height condition are rejected;
/// otherwise the map is built anyway and `heights_ok` reports the failure.
pub fn unicellular_glue(t: &PlaneTree, sigma: &PermutationPairing, r: &[u32], strict: bool) -> Result<GlueOutcome> {
    let f = contour_of_tree(t);
    let size = 4 * sigma.g();
    if r.len() != size {
        return Err(Error::InvalidCorners(format!("need {size} corners, got {}", r.len())));
    }
    if r.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidCorners("corners must be strictly increasing".into()));
    }
    let v = f.values();
    let pairs: Vec<(u32, u32)> = sigma
        .pairs()
        .iter()
        .map(|&(a, b)| (r[a as usize - 1], r[b as usize - 1]))
        .collect();
    let heights_ok = pairs.iter().all(|&(x, y)| {
        let (cx, cy) = (v[x as usize], v[y as usize]);
        cy == cx || cy + 1 == cx
    });
    if strict && !heights_ok {
        return Err(Error::InvalidCorners("corner heights violate 0 <= C(r_a) - C(r_b) <= 1".into()));
    }
    let xi = AdmissibleCorners::from_distinct_pairs(Mode::Bf, &pairs);
    xi.validate_structure(f.n())?;
    let map = insert_contour(&f, &xi);
    let faces = map.num_faces();
    Ok(GlueOutcome {
        genus: map.genus(),
        unicellular: faces == 1,
        faces,
        map,
        heights_ok,
    })
}

/// `Σ_h Σ_{r₁<…<r₄g} Π_j ψ_{C,h_j}(r_{ℓ₂ⱼ₋₁}, r_{ℓ₂ⱼ})`.
///
/// The sum over heights collapses, so this counts increasing `4g`-tuples of
/// corners in `[1, 2n-1]` with `C(r_b) ∈ {C(r_a), C(r_a) - 1}` for each
/// transposition `(a, b)`.
pub fn psi_count(f: &LatticeExcursion, sigma: &PermutationPairing) -> u128 {
    if sigma.pairs() == [(1, 3), (2, 4)] {
        psi_count_genus_one(f)
    } else {
        psi_count_dp(f, sigma)
    }
}

fn psi_count_genus_one(f: &LatticeExcursion) -> u128 {
    let v = f.values();
    let two_n = v.len() - 1;
    let levels = f.max_height() as usize + 2;
    // pre[y]: corners before the current r₂ at level y
    let mut pre = vec![0u128; levels];
    // suf[y]: corners after the current r₃ at level y
    let mut suf = vec![0u128; levels];
    for t in 1..two_n {
        suf[v[t] as usize] += 1;
    }
    // m[y][x] = Σ over placed r₂ at level y of #{r₁ < r₂ : C(r₁) ∈ {x, x+1}}
    let mut m = vec![0u128; levels * levels];
    let mut total = 0u128;
    for t in 1..two_n {
        let c = v[t] as usize;
        suf[c] -= 1;
        // t as r₃: Σ_y #{r₄ > r₃ : C(r₄) ∈ {y, y-1}} · m[y][C(r₃)]
        for y in 1..levels - 1 {
            let q = suf[y] + suf[y - 1];
            if q != 0 {
                total += q * m[y * levels + c];
            }
        }
        // t as r₂
        for x in 0..levels - 1 {
            m[c * levels + x] += pre[x] + pre[x + 1];
        }
        pre[c] += 1;
    }
    total
}

/// Dynamic program over contour time; the state records how many corners
/// are placed and the heights of transpositions still awaiting their
/// second corner.
pub fn psi_count_dp(f: &LatticeExcursion, sigma: &PermutationPairing) -> u128 {
    let plan = SlotPlan::new(sigma);
    let v = f.values();
    let mut layer: HashMap<State, u128> = HashMap::from([(plan.start(), 1u128)]);
    for t in 1..v.len() - 1 {
        let mut next = layer.clone();
        for (state, &w) in &layer {
            if let Some(s2) = plan.place(state, v[t]) {
                *next.entry(s2).or_insert(0) += w;
            }
        }
        layer = next;
    }
    layer.get(&plan.finish()).copied().unwrap_or(0)
}

/// Direct count over all increasing tuples; for tests on small `n`.
pub fn psi_count_bruteforce(f: &LatticeExcursion, sigma: &PermutationPairing) -> u128 {
    let v = f.values();
    let top = v.len() - 1;
    let size = 4 * sigma.g();
    let mut r = Vec::with_capacity(size);
    let mut count = 0u128;
    fn rec(from: usize, top: usize, size: usize, r: &mut Vec<usize>, v: &[u32], sigma: &PermutationPairing, count: &mut u128) {
        if r.len() == size {
            let ok = sigma.pairs().iter().all(|&(a, b)| {
                let (x, y) = (v[r[a as usize - 1]], v[r[b as usize - 1]]);
                y == x || y + 1 == x
            });
            *count += ok as u128;
            return;
        }
        for t in from..top {
            r.push(t);
            rec(t + 1, top, size, r, v, sigma, count);
            r.pop();
        }
    }
    rec(1, top, size, &mut r, v, sigma, &mut count);
    count
}

pub(crate) type State = (u8, Vec<u32>);

/// For slot `p` (0-based), the transposition it belongs to and whether it
/// opens it.
pub(crate) struct SlotPlan {
    slots: Vec<(usize, bool)>,
    width: usize,
}

impl SlotPlan {
    pub(crate) fn new(sigma: &PermutationPairing) -> Self {
        let size = 4 * sigma.g();
        let mut slots = vec![(0, false); size];
        for (j, &(a, b)) in sigma.pairs().iter().enumerate() {
            slots[a as usize - 1] = (j, true);
            slots[b as usize - 1] = (j, false);
        }
        SlotPlan {
            slots,
            width: sigma.pairs().len(),
        }
    }

    pub(crate) fn start(&self) -> State {
        (0, vec![0; self.width])
    }

    pub(crate) fn finish(&self) -> State {
        (self.slots.len() as u8, vec![0; self.width])
    }

    pub(crate) fn size(&self) -> usize {
        self.slots.len()
    }

    /// State after placing the next slot at a corner of height `c`.
    pub(crate) fn place(&self, state: &State, c: u32) -> Option<State> {
        let p = state.0 as usize;
        if p == self.slots.len() {
            return None;
        }
        let (j, opens) = self.slots[p];
        let mut open = state.1.clone();
        if opens {
            open[j] = c;
        } else {
            let h = open[j];
            if !(c == h || c + 1 == h) {
                return None;
            }
            open[j] = 0;
        }
        Some((state.0 + 1, open))
    }

    /// States that lead to `state` by placing slot `state.0 - 1` at height `c`.
    pub(crate) fn predecessors(&self, state: &State, c: u32) -> Vec<State> {
        let p = state.0 as usize;
        if p == 0 {
            return Vec::new();
        }
        let (j, opens) = self.slots[p - 1];
        if opens {
            if state.1[j] != c {
                return Vec::new();
            }
            let mut open = state.1.clone();
            open[j] = 0;
            vec![(state.0 - 1, open)]
        } else {
            [c, c + 1]
                .into_iter()
                .map(|h| {
                    let mut open = state.1.clone();
                    open[j] = h;
                    (state.0 - 1, open)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_paths::{enumerate_excursions, tree_of_contour};

    fn exc(v: &[u32]) -> LatticeExcursion {
        LatticeExcursion::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sg_examples() {
        let s1 = sg_enumerate(1).unwrap();
        assert_eq!(s1, vec!["(1,3)(2,4)".parse().unwrap()]);
        assert!(sg_check(&"(1,7)(2,5)(3,8)(4,6)".parse().unwrap()));
        assert!(sg_check(&"(1,3)(2,4)(5,7)(6,8)".parse().unwrap()));
        assert!(!sg_check(&"(1,2)(3,4)".parse().unwrap()));
        for g in 1..=3 {
            let a = sg_enumerate(g).unwrap();
            let b: Vec<_> = all_pairings(g)
                .unwrap()
                .into_iter()
                .filter(|s| sg_check_with(s, Composition::SigmaAfterRho))
                .collect();
            assert_eq!(a, b);
            assert_eq!(a.len() as u128, sg_size_formula(g));
        }
        assert!("(1,3)(1,4)".parse::<PermutationPairing>().is_err());
    }

    #[test]
    fn psi_examples() {
        let sigma: PermutationPairing = "(1,3)(2,4)".parse().unwrap();
        assert_eq!(psi_count(&exc(&[0, 1, 2, 1, 0]), &sigma), 0);
        assert_eq!(psi_count(&exc(&[0, 1, 2, 3, 2, 1, 0]), &sigma), 0);
        assert_eq!(psi_count(&exc(&[0, 1, 2, 1, 2, 1, 0]), &sigma), 3);
    }

    #[test]
    fn psi_paths_agree() {
        let g1: PermutationPairing = "(1,3)(2,4)".parse().unwrap();
        let g2 = sg_enumerate(2).unwrap();
        for n in 1..=7 {
            for f in enumerate_excursions(n).unwrap() {
                let brute = psi_count_bruteforce(&f, &g1);
                assert_eq!(psi_count(&f, &g1), brute);
                assert_eq!(psi_count_dp(&f, &g1), brute);
                if n <= 5 {
                    for s in &g2 {
                        assert_eq!(psi_count_dp(&f, s), psi_count_bruteforce(&f, s));
                    }
                }
            }
        }
    }

    #[test]
    fn glue_examples() {
        let t = tree_of_contour(&exc(&[0, 1, 2, 1, 2, 1, 0]));
        let sigma: PermutationPairing = "(1,3)(2,4)".parse().unwrap();
        let out = unicellular_glue(&t, &sigma, &[1, 2, 3, 4], true).unwrap();
        assert!(out.unicellular);
        assert_eq!(out.genus, 1);
        assert!(unicellular_glue(&t, &sigma, &[1, 2, 4, 5], true).is_err());
        let other: PermutationPairing = "(1,2)(3,4)".parse().unwrap();
        let out = unicellular_glue(&t, &other, &[1, 3, 4, 5], true).unwrap();
        assert!(!out.unicellular);
    }
}
