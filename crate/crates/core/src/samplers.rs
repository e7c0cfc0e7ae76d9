//! Uniform samplers, tilted excursion laws as weighted ensembles, and the
//! conditional corner samplers that decorate a tree into a map or graph.
//!
//! Every tilted law is represented by self-normalized importance sampling
//! from a uniform proposal: a [`WeightedEnsemble`] holds the proposal draws
//! and their unnormalized weights.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_paths::{binomial, tree_of_contour, vervaat, LabeledTree, LatticeBridge, LatticeExcursion};
use crate::local_time::{df_level_set, weights, Mode};
use crate::maps::unicellular::{SlotPlan, State};
use crate::maps::{
    insert_unchecked, psi_count, sg_enumerate, unicellular_glue, AdmissibleCorners, Chord, GlueOutcome, LabeledGraph,
    PermutationPairing, RootedMap,
};
use crate::rng::{replicate_stream, RngStream};

/// Entries stored by the decoration sampler's forward pass before it gives up.
pub const CRUM_DP_CAP: usize = 20_000_000;

/// Tags separating the random streams of different samplers under one seed.
pub mod tags {
    pub const EXCURSION: u64 = 1;
    pub const TILT_BF: u64 = 2;
    pub const TILT_DF: u64 = 3;
    pub const TILT_UM: u64 = 4;
    pub const MAP: u64 = 5;
    pub const LABELED_TREE: u64 = 6;
    pub const GRAPH: u64 = 7;
    pub const CRUM: u64 = 8;
    pub const SWAP: u64 = 9;
    pub const LEMMA3: u64 = 10;
    pub const TWO_POINT: u64 = 11;
}

/// Draws with nonnegative importance weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedEnsemble<T> {
    pub samples: Vec<T>,
    pub weights: Vec<f64>,
    pub proposal: String,
    pub seed: u64,
}

/// A self-normalized estimate with its delta-method standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub ess: f64,
}

impl<T> WeightedEnsemble<T> {
    pub fn new(samples: Vec<T>, weights: Vec<f64>, proposal: impl Into<String>, seed: u64) -> Result<Self> {
        if samples.len() != weights.len() {
            return Err(Error::Domain(format!(
                "{} samples but {} weights",
                samples.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::DegenerateEnsemble("weights must be finite and nonnegative".into()));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::DegenerateEnsemble(format!("all {} weights are zero", weights.len())));
        }
        Ok(WeightedEnsemble {
            samples,
            weights,
            proposal: proposal.into(),
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(Σw)² / Σw²`.
    pub fn ess(&self) -> f64 {
        let s: f64 = self.weights.iter().sum();
        let s2: f64 = self.weights.iter().map(|w| w * w).sum();
        s * s / s2
    }

    pub fn normalized_weights(&self) -> Vec<f64> {
        let s: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / s).collect()
    }

    pub fn estimate(&self, phi: impl Fn(&T) -> f64) -> Estimate {
        let values: Vec<f64> = self.samples.iter().map(phi).collect();
        self_normalized(&values, &self.weights)
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> WeightedEnsemble<U> {
        WeightedEnsemble {
            samples: self.samples.iter().map(f).collect(),
            weights: self.weights.clone(),
            proposal: self.proposal.clone(),
            seed: self.seed,
        }
    }
}

/// `Σ wφ / Σ w` with `se² = Σ w²(φ - μ)² / (Σ w)²`.
pub fn self_normalized(values: &[f64], weights: &[f64]) -> Estimate {
    let s: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / s;
    let var = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * w * (v - mean) * (v - mean))
        .sum::<f64>()
        / (s * s);
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    Estimate {
        mean,
        se: var.sqrt(),
        ess: s * s / s2,
    }
}

/// Builds the global thread pool from `threads`, falling back to the
/// `SURPLUS_LAB_THREADS` environment variable. Has no effect once a pool
/// exists.
pub fn init_thread_pool(threads: Option<usize>) {
    let from_env = std::env::var("SURPLUS_LAB_THREADS").ok().and_then(|v| v.parse().ok());
    if let Some(t) = threads.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

/// Runs `draw` on replicate streams `0..reps` in parallel and collects the
/// results in replicate order.
pub fn weighted_replicates<T, F>(reps: usize, seed: u64, tag: u64, proposal: &str, draw: F) -> Result<WeightedEnsemble<T>>
where
    T: Send,
    F: Fn(RngStream) -> Result<(T, f64)> + Sync,
{
    if reps == 0 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let out: Vec<Result<(T, f64)>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| draw(replicate_stream(seed, tag, r)))
        .collect();
    let mut samples = Vec::with_capacity(reps);
    let mut weights = Vec::with_capacity(reps);
    for item in out {
        let (x, w) = item?;
        samples.push(x);
        weights.push(w);
    }
    WeightedEnsemble::new(samples, weights, proposal, seed)
}

/// Uniform on `𝔉ₙ`: a uniformly shuffled bridge, rotated at its first
/// minimum, with the root edge prepended.
pub fn sample_uniform_excursion<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LatticeExcursion> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut steps: Vec<i8> = Vec::with_capacity(2 * n - 1);
    steps.extend(std::iter::repeat(1).take(n - 1));
    steps.extend(std::iter::repeat(-1).take(n));
    steps.shuffle(rng);
    let bridge = LatticeBridge::from_steps(&steps)?;
    Ok(vervaat(&bridge).to_contour())
}

/// Uniform over the `n^{n-1}` rooted labeled trees on `1..=n`.
pub fn sample_labeled_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LabeledTree> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let code: Vec<u32> = (0..n.saturating_sub(2)).map(|_| rng.gen_range(1..=n as u32)).collect();
    let root = rng.gen_range(1..=n as u32);
    LabeledTree::from_prufer(n, &code, root)
}

/// The tilt applied to uniform excursions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tilt {
    /// `B(f)^s`
    Bf(usize),
    /// `D(f)^s`
    Df(usize),
    /// `Σ_{σ ∈ 𝕊_g} ψ-count(f, σ)`
    Um(usize),
}

impl Tilt {
    fn tag(&self) -> u64 {
        match self {
            Tilt::Bf(_) => tags::TILT_BF,
            Tilt::Df(_) => tags::TILT_DF,
            Tilt::Um(_) => tags::TILT_UM,
        }
    }

    fn describe(&self) -> String {
        match self {
            Tilt::Bf(s) => format!("uniform excursions, weight B^{s}"),
            Tilt::Df(s) => format!("uniform excursions, weight D^{s}"),
            Tilt::Um(g) => format!("uniform excursions, weight psi-sum genus {g}"),
        }
    }
}

/// Weight of `f` under `tilt`, given `𝕊_g` for the unicellular case.
pub fn tilt_weight(f: &LatticeExcursion, tilt: &Tilt, sg: &[PermutationPairing]) -> f64 {
    match *tilt {
        Tilt::Bf(s) => (weights(f, Mode::Bf).total as f64).powi(s as i32),
        Tilt::Df(s) => (weights(f, Mode::Df).total as f64).powi(s as i32),
        Tilt::Um(_) => sg.iter().map(|sigma| psi_count(f, sigma)).sum::<u128>() as f64,
    }
}

/// Uniform excursions weighted by `tilt`.
pub fn tilted_ensemble(n: usize, tilt: &Tilt, reps: usize, seed: u64) -> Result<WeightedEnsemble<LatticeExcursion>> {
    let sg = match tilt {
        Tilt::Um(g) => sg_enumerate(*g)?,
        _ => Vec::new(),
    };
    weighted_replicates(reps, seed, tilt.tag(), &tilt.describe(), |stream| {
        let f = sample_uniform_excursion(n, &mut stream.rng())?;
        let w = tilt_weight(&f, tilt, &sg);
        Ok((f, w))
    })
}

fn pick_weighted<R: Rng + ?Sized>(w: &[u64], total: u64, rng: &mut R) -> usize {
    let mut u = rng.gen_range(0..total);
    for (i, &x) in w.iter().enumerate() {
        if u < x {
            return i;
        }
        u -= x;
    }
    unreachable!("weights sum to total")
}

/// Gives the chord ends at each corner a uniformly random order.
fn random_tags<R: Rng + ?Sized>(mode: Mode, pairs: &[(u32, u32)], rng: &mut R) -> AdmissibleCorners {
    let mut ends: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for (q, &(a, b)) in pairs.iter().enumerate() {
        ends.entry(a).or_default().push((q, 0));
        ends.entry(b).or_default().push((q, 1));
    }
    let mut tags = vec![[0u32; 2]; pairs.len()];
    let mut corners: Vec<u32> = ends.keys().copied().collect();
    corners.sort_unstable();
    for c in corners {
        let list = &ends[&c];
        let mut perm: Vec<u32> = (1..=list.len() as u32).collect();
        perm.shuffle(rng);
        for (&(q, e), k) in list.iter().zip(perm) {
            tags[q][e] = k;
        }
    }
    let chords: Vec<Chord> = pairs
        .iter()
        .zip(&tags)
        .map(|(&(a, b), t)| ((a, t[0]), (b, t[1])))
        .collect();
    AdmissibleCorners::from_chords(mode, chords)
}

/// `s` independent pairs: the first corner with probability `B(f;i)/B(f)`,
/// the second uniform on the set of the first.
pub fn sample_corner_pairs_bf<R: Rng + ?Sized>(f: &LatticeExcursion, s: usize, rng: &mut R) -> Result<Vec<(u32, u32)>> {
    let cw = weights(f, Mode::Bf);
    if cw.total == 0 {
        return Err(Error::EmptySupport("B(f) = 0".into()));
    }
    Ok((0..s)
        .map(|_| {
            let i = pick_weighted(&cw.weights, cw.total, rng);
            let set = cw.set(i);
            (i as u32, set[rng.gen_range(0..set.len())] as u32)
        })
        .collect())
}

/// The same with `D`, drawing the second corner level by level.
pub fn sample_corner_pairs_df<R: Rng + ?Sized>(f: &LatticeExcursion, s: usize, rng: &mut R) -> Result<Vec<(u32, u32)>> {
    let cw = weights(f, Mode::Df);
    if cw.total == 0 {
        return Err(Error::EmptySupport("D(f) = 0".into()));
    }
    let v = f.values();
    Ok((0..s)
        .map(|_| {
            let i = pick_weighted(&cw.weights, cw.total, rng);
            let levels: Vec<Vec<usize>> = (1..=v[i]).map(|y| df_level_set(f, i, y)).collect();
            let sizes: Vec<u64> = levels.iter().map(|l| l.len() as u64).collect();
            let y = pick_weighted(&sizes, sizes.iter().sum(), rng);
            let set = &levels[y];
            (i as u32, set[rng.gen_range(0..set.len())] as u32)
        })
        .collect())
}

pub fn sample_corners_bf<R: Rng + ?Sized>(f: &LatticeExcursion, s: usize, rng: &mut R) -> Result<AdmissibleCorners> {
    let pairs = sample_corner_pairs_bf(f, s, rng)?;
    Ok(random_tags(Mode::Bf, &pairs, rng))
}

pub fn sample_corners_df<R: Rng + ?Sized>(f: &LatticeExcursion, s: usize, rng: &mut R) -> Result<AdmissibleCorners> {
    let pairs = sample_corner_pairs_df(f, s, rng)?;
    Ok(random_tags(Mode::Df, &pairs, rng))
}

/// Importance weight turning [`sample_corners_bf`] on a uniform tree into
/// the uniform law on decorated trees: `B^s Π j_c! / (2^{loops} s!)`, where
/// `j_c` counts chord ends at corner `c`.
pub fn decoration_weight(total: u64, xi: &AdmissibleCorners) -> f64 {
    let s = xi.s();
    let mut at: HashMap<u32, u32> = HashMap::new();
    let mut loops = 0;
    for ((a, _), (b, _)) in xi.chords() {
        *at.entry(a).or_insert(0) += 1;
        *at.entry(b).or_insert(0) += 1;
        loops += (a == b) as i32;
    }
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    let tags: f64 = at.values().map(|&j| fact(j)).product();
    (total as f64).powi(s as i32) * tags / (2f64.powi(loops) * fact(s as u32))
}

/// One proposal draw for the uniform law on `𝕄ₙ,ₛ`, with its weight.
pub fn sample_uniform_map<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<(RootedMap, f64)> {
    let f = sample_uniform_excursion(n, rng)?;
    let total = weights(&f, Mode::Bf).total;
    let xi = sample_corners_bf(&f, s, rng)?;
    let w = decoration_weight(total, &xi);
    let m = insert_unchecked(&tree_of_contour(&f), &xi)?;
    Ok((m, w))
}

/// One proposal draw for the uniform law on `H_{n,s}`: a uniform rooted
/// labeled tree plus `s` distinct uniform non-edges, weighted by the
/// inverse number of spanning trees.
pub fn sample_h<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<(LabeledGraph, f64)> {
    let pairs = binomial(n as u64, 2);
    if (n as u128).saturating_sub(1) + s as u128 > pairs {
        return Err(Error::EmptySupport(format!("no simple graph on {n} vertices has surplus {s}")));
    }
    let t = sample_labeled_tree(n, rng)?;
    let mut edges = t.edges();
    let mut present: std::collections::HashSet<(u32, u32)> = edges.iter().copied().collect();
    while edges.len() < n - 1 + s {
        let a = rng.gen_range(1..=n as u32);
        let b = rng.gen_range(1..=n as u32);
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if present.insert(e) {
            edges.push(e);
        }
    }
    let g = LabeledGraph::new(n, t.root(), edges)?;
    let w = 1.0 / g.spanning_tree_count() as f64;
    Ok((g, w))
}

/// A decoration drawn for the unicellular tilt: the pairing, the heights of
/// its transpositions and the corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrumDecoration {
    pub sigma: PermutationPairing,
    pub heights: Vec<u32>,
    pub corners: Vec<u32>,
}

/// Forward layers of the placement count, `layers[t]` after times `1..=t`.
fn forward_layers(v: &[u32], plan: &SlotPlan) -> Result<Vec<HashMap<State, u128>>> {
    let mut layers = vec![HashMap::from([(plan.start(), 1u128)])];
    let mut stored = 1usize;
    for &c in &v[1..v.len() - 1] {
        let prev = layers.last().unwrap();
        let mut next = prev.clone();
        for (state, &w) in prev {
            if let Some(s2) = plan.place(state, c) {
                *next.entry(s2).or_insert(0) += w;
            }
        }
        stored += next.len();
        if stored > CRUM_DP_CAP {
            return Err(Error::CapExceeded {
                what: "decoration sampler table entries",
                requested: stored,
                limit: CRUM_DP_CAP,
            });
        }
        layers.push(next);
    }
    Ok(layers)
}

/// Uniform among increasing corner tuples admissible for `sigma`.
fn sample_corners_for<R: Rng + ?Sized>(f: &LatticeExcursion, sigma: &PermutationPairing, rng: &mut R) -> Result<Vec<u32>> {
    let v = f.values();
    let plan = SlotPlan::new(sigma);
    let layers = forward_layers(v, &plan)?;
    let mut state = plan.finish();
    if layers.last().unwrap().get(&state).copied().unwrap_or(0) == 0 {
        return Err(Error::EmptySupport(format!("no admissible corners for {sigma}")));
    }
    let mut corners = Vec::with_capacity(plan.size());
    for t in (1..layers.len()).rev() {
        if state.0 == 0 {
            break;
        }
        let prev = &layers[t - 1];
        let c = v[t];
        let skip = prev.get(&state).copied().unwrap_or(0);
        let options: Vec<(State, u128)> = plan
            .predecessors(&state, c)
            .into_iter()
            .filter(|p| plan.place(p, c).as_ref() == Some(&state))
            .filter_map(|p| prev.get(&p).map(|&w| (p, w)))
            .collect();
        let total = skip + options.iter().map(|o| o.1).sum::<u128>();
        let mut u = rng.gen_range(0..total);
        if u < skip {
            continue;
        }
        u -= skip;
        for (p, w) in options {
            if u < w {
                state = p;
                corners.push(t as u32);
                break;
            }
            u -= w;
        }
    }
    corners.reverse();
    Ok(corners)
}

/// Pairing `σ` with probability proportional to its ψ-count, then corners
/// uniform among the admissible tuples for `σ`; heights are read off the
/// opening corners.
pub fn sample_crum_decorations<R: Rng + ?Sized>(f: &LatticeExcursion, g: usize, rng: &mut R) -> Result<CrumDecoration> {
    let sg = sg_enumerate(g)?;
    let counts: Vec<u128> = sg.iter().map(|sigma| psi_count(f, sigma)).collect();
    let total: u128 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySupport(format!("no genus {g} decoration of {f}")));
    }
    let mut u = rng.gen_range(0..total);
    let mut pick = 0;
    for (k, &c) in counts.iter().enumerate() {
        if u < c {
            pick = k;
            break;
        }
        u -= c;
    }
    let sigma = sg[pick].clone();
    let corners = sample_corners_for(f, &sigma, rng)?;
    let heights = sigma
        .pairs()
        .iter()
        .map(|&(a, _)| f.values()[corners[a as usize - 1] as usize])
        .collect();
    Ok(CrumDecoration { sigma, heights, corners })
}

/// Glues a decoration into its unicellular map.
pub fn glue_crum(f: &LatticeExcursion, d: &CrumDecoration) -> Result<GlueOutcome> {
    unicellular_glue(&tree_of_contour(f), &d.sigma, &d.corners, true)
}
