//! Estimators comparing different routes to the same limit law, and the
//! exact identities and count asymptotics that anchor them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_paths::{binomial, catalan, enumerate_bridges, enumerate_excursions, tree_of_contour, vervaat, LatticeExcursion};
use crate::local_time::{
    area_functional, final_local_time, incoming_counts, inverse_height_functional, sq_localtime_functional, weights, Mode,
};
use crate::maps::explore::explore_contour;
use crate::maps::{
    all_pairings, count_admissible, count_h, enumerate_maps, map_closure, psi_count, sg_check, sg_enumerate,
    unicellular_glue, w_weight, RootedMap, MAP_ENUMERATION_CAP,
};
use crate::rng::replicate_stream;
use crate::samplers::{
    sample_labeled_tree, sample_uniform_excursion, sample_uniform_map, self_normalized, tags, tilt_weight, tilted_ensemble,
    weighted_replicates, Estimate, Tilt, WeightedEnsemble,
};

/// A weighted law on the real line; weights are normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLaw {
    pub label: String,
    /// `(value, weight)` sorted by value.
    points: Vec<(f64, f64)>,
    ess: f64,
}

impl EmpiricalLaw {
    pub fn new(label: impl Into<String>, values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::EmptyLaw);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::EmptyLaw);
        }
        let mut points: Vec<(f64, f64)> = values.iter().zip(weights).map(|(&v, &w)| (v, w / total)).collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let s2: f64 = points.iter().map(|p| p.1 * p.1).sum();
        Ok(EmpiricalLaw {
            label: label.into(),
            points,
            ess: 1.0 / s2,
        })
    }

    pub fn unweighted(label: impl Into<String>, values: &[f64]) -> Result<Self> {
        EmpiricalLaw::new(label, values, &vec![1.0; values.len()])
    }

    pub fn from_ensemble(label: impl Into<String>, e: &WeightedEnsemble<f64>) -> Result<Self> {
        EmpiricalLaw::new(label, &e.samples, &e.weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ess(&self) -> f64 {
        self.ess
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().map(|(v, w)| v * w).sum()
    }

    /// Standard error of the mean, from the effective sample size.
    pub fn mean_se(&self) -> f64 {
        let m = self.mean();
        let var: f64 = self.points.iter().map(|(v, w)| w * (v - m) * (v - m)).sum();
        (var / self.ess).sqrt()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|p| p.0 <= x);
        self.points[..k].iter().map(|p| p.1).sum()
    }
}

/// Supremum distance between the two weighted distribution functions.
pub fn ks_distance(a: &EmpiricalLaw, b: &EmpiricalLaw) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyLaw);
    }
    let (pa, pb) = (a.points(), b.points());
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut d = 0.0f64;
    while i < pa.len() || j < pb.len() {
        let x = match (pa.get(i), pb.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        while i < pa.len() && pa[i].0 <= x {
            fa += pa[i].1;
            i += 1;
        }
        while j < pb.len() && pb[j].0 <= x {
            fb += pb[j].1;
            j += 1;
        }
        d = d.max((fa - fb).abs());
    }
    Ok(d.min(1.0))
}

/// Two-sample critical value `c(α) √((n + m) / (n m))` with effective sizes.
pub fn ks_critical(alpha: f64, n: f64, m: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() * ((n + m) / (n * m)).sqrt()
}

/// `(law A, law B, law C)` of the scaled radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusLaws {
    /// `√(2/n)` times the radius of uniform maps in `𝕄ₙ,ₛ`.
    pub map: EmpiricalLaw,
    /// `2 max f / √(2n)` under the `B^s` tilt.
    pub bf_sup: EmpiricalLaw,
    /// `Σ 1/f(i) / √(2n)` under the `D^s` tilt.
    pub df_inverse: EmpiricalLaw,
    /// Every sampled map had radius equal to its breadth-first tree height.
    pub radius_is_tree_height: bool,
}

pub fn radius_laws(n: usize, s: usize, reps: usize, seed: u64) -> Result<RadiusLaws> {
    let scale = (2.0 / n as f64).sqrt();
    let maps = weighted_replicates(reps, seed, tags::MAP, "uniform maps", |stream| {
        let (m, w) = sample_uniform_map(n, s, &mut stream.rng())?;
        let radius = m.metric_from_root().radius;
        let (f, _) = explore_contour(&m, Mode::Bf)?;
        Ok(((radius as f64 * scale, radius == f.max_height()), w))
    })?;
    let radius_is_tree_height = maps.samples.iter().all(|x| x.1);
    let map = EmpiricalLaw::from_ensemble("map radius", &maps.map(|x| x.0))?;
    let two_n = (2 * n) as f64;
    let bf = tilted_ensemble(n, &Tilt::Bf(s), reps, seed)?;
    let bf_sup = EmpiricalLaw::from_ensemble("BF sup", &bf.map(|f| 2.0 * f.max_height() as f64 / two_n.sqrt()))?;
    let df = tilted_ensemble(n, &Tilt::Df(s), reps, seed)?;
    let df_inverse = EmpiricalLaw::from_ensemble("DF inverse height", &df.map(|f| inverse_height_functional(f).scaled))?;
    Ok(RadiusLaws {
        map,
        bf_sup,
        df_inverse,
        radius_is_tree_height,
    })
}

/// Radius equals the breadth-first tree height and every ball has the
/// same volume in the map and in the tree.
pub fn radius_invariance(m: &RootedMap) -> Result<bool> {
    let metric = m.metric_from_root();
    let (f, _) = explore_contour(m, Mode::Bf)?;
    let t = tree_of_contour(&f);
    let mut ball = vec![0u64; t.height() as usize + 1];
    for &d in t.depths() {
        ball[d as usize] += 1;
    }
    for r in 1..ball.len() {
        ball[r] += ball[r - 1];
    }
    Ok(metric.radius == f.max_height() && metric.ball == ball)
}

/// Distance between two uniform non-root vertices of a uniform map, and
/// `2 f(⌊2nU⌋)/√(2n)` under the `B^s` tilt, both scaled alike.
pub fn two_point_law(n: usize, s: usize, reps: usize, seed: u64) -> Result<(EmpiricalLaw, EmpiricalLaw)> {
    use rand::Rng;
    let scale = (2.0 / n as f64).sqrt();
    let maps = weighted_replicates(reps, seed, tags::TWO_POINT, "uniform maps", |stream| {
        let mut rng = stream.rng();
        let (m, w) = sample_uniform_map(n, s, &mut rng)?;
        let (vertex, count) = m.vertex_of();
        let root = vertex[m.root()] as usize;
        let others: Vec<usize> = (0..count).filter(|&v| v != root).collect();
        let a = others[rng.gen_range(0..others.len())];
        let b = others[rng.gen_range(0..others.len())];
        let h = vertex.iter().position(|&v| v as usize == a).expect("every vertex has a half-edge");
        let (dist, _) = m.distances_from(h);
        Ok((dist[b] as f64 * scale, w))
    })?;
    let two_n = 2 * n;
    let exc = weighted_replicates(reps, seed, tags::TWO_POINT + 100, "uniform excursions, weight B^s", |stream| {
        let mut rng = stream.rng();
        let f = sample_uniform_excursion(n, &mut rng)?;
        let w = tilt_weight(&f, &Tilt::Bf(s), &[]);
        let u: f64 = rng.gen();
        let t = ((two_n as f64 * u).floor() as usize).min(two_n);
        Ok((2.0 * f.values()[t] as f64 / (two_n as f64).sqrt(), w))
    })?;
    Ok((
        EmpiricalLaw::from_ensemble("map two-point", &maps)?,
        EmpiricalLaw::from_ensemble("excursion two-point", &exc)?,
    ))
}

/// Weighted mean of a rescaled profile on a fixed grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanProfile {
    pub label: String,
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub ess: f64,
}

impl MeanProfile {
    fn from_samples(label: &str, grid: &[f64], rows: &[Vec<f64>], weights: &[f64]) -> Result<Self> {
        if rows.is_empty() || !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::DegenerateEnsemble(format!("{label}: all weights are zero")));
        }
        let mut mean = Vec::with_capacity(grid.len());
        let mut se = Vec::with_capacity(grid.len());
        let mut ess = 0.0;
        for g in 0..grid.len() {
            let col: Vec<f64> = rows.iter().map(|r| r[g]).collect();
            let e = self_normalized(&col, weights);
            mean.push(e.mean);
            se.push(e.se);
            ess = e.ess;
        }
        Ok(MeanProfile {
            label: label.into(),
            grid: grid.to_vec(),
            mean,
            se,
            ess,
        })
    }

    pub fn sup_distance(&self, other: &MeanProfile) -> f64 {
        self.mean
            .iter()
            .zip(&other.mean)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `r = 0, step, …, up to max`.
pub fn grid(step: f64, max: f64) -> Vec<f64> {
    let k = (max / step).round() as usize;
    (0..=k).map(|i| i as f64 * step).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileLaws {
    /// `(2n)^{-1/2} Z(⌊r √(n/2)⌋)` over uniform maps.
    pub map: MeanProfile,
    /// `n^{-1/2} Z(⌊r √n⌋)` over uniform labeled trees weighted by `W_s`.
    pub labeled: MeanProfile,
    /// `½ (2n)^{-1/2} L(2n, (r/2)√(2n))` under the `B^s` tilt.
    pub local_time: MeanProfile,
    /// Fraction of labeled-tree draws with `W_s = 0`.
    pub zero_weight_fraction: f64,
}

fn step_profile(z: &[u64], index: impl Fn(f64) -> f64, scale: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&r| {
            let l = index(r).floor() as usize;
            z.get(l).copied().unwrap_or(0) as f64 * scale
        })
        .collect()
}

fn interpolated_local_time(l: &[u64], y: f64) -> f64 {
    let k = y.floor() as usize;
    let frac = y - k as f64;
    let a = l.get(k).copied().unwrap_or(0) as f64;
    let b = l.get(k + 1).copied().unwrap_or(0) as f64;
    a + frac * (b - a)
}

pub fn profile_laws(n: usize, s: usize, reps: usize, seed: u64, grid: &[f64]) -> Result<ProfileLaws> {
    if s == 0 {
        return Err(Error::Domain("the weighted labeled-tree route needs s >= 1".into()));
    }
    let nf = n as f64;
    let two_n = 2.0 * nf;
    let maps = weighted_replicates(reps, seed, tags::MAP + 200, "uniform maps", |stream| {
        let (m, w) = sample_uniform_map(n, s, &mut stream.rng())?;
        let z = m.metric_from_root().profile();
        Ok((step_profile(&z, |r| r * (nf / 2.0).sqrt(), two_n.powf(-0.5), grid), w))
    })?;
    let trees = weighted_replicates(reps, seed, tags::LABELED_TREE, "uniform labeled trees", |stream| {
        let t = sample_labeled_tree(n, &mut stream.rng())?;
        let z = t.height_profile();
        let w = w_weight(&z, s);
        Ok((step_profile(&z.counts, |r| r * nf.sqrt(), nf.powf(-0.5), grid), w))
    })?;
    let zero_weight_fraction = trees.weights.iter().filter(|&&w| w == 0.0).count() as f64 / reps as f64;
    let bf = tilted_ensemble(n, &Tilt::Bf(s), reps, seed ^ 0x9f)?;
    let lt_rows: Vec<Vec<f64>> = bf
        .samples
        .par_iter()
        .map(|f| {
            let l = final_local_time(f);
            grid.iter()
                .map(|&r| 0.5 * two_n.powf(-0.5) * interpolated_local_time(&l, r / 2.0 * two_n.sqrt()))
                .collect()
        })
        .collect();
    Ok(ProfileLaws {
        map: MeanProfile::from_samples("map", grid, &maps.samples, &maps.weights)?,
        labeled: MeanProfile::from_samples("labeled", grid, &trees.samples, &trees.weights)?,
        local_time: MeanProfile::from_samples("local time", grid, &lt_rows, &bf.weights)?,
        zero_weight_fraction,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JeulinReport {
    pub ks: f64,
    /// `(2n)^{-3/2} Σ_y L(2n, y)²`
    pub sq_local_time: EmpiricalLaw,
    /// `2 (2n)^{-3/2} Σ f`
    pub area: EmpiricalLaw,
}

/// Squared local time against twice the area, over independent uniform
/// excursions.
pub fn jeulin_check(n: usize, reps: usize, seed: u64) -> Result<JeulinReport> {
    let sq = weighted_replicates(reps, seed, tags::EXCURSION, "uniform excursions", |stream| {
        let f = sample_uniform_excursion(n, &mut stream.rng())?;
        Ok((sq_localtime_functional(&f).scaled, 1.0))
    })?;
    let area = weighted_replicates(reps, seed, tags::EXCURSION + 100, "uniform excursions", |stream| {
        let f = sample_uniform_excursion(n, &mut stream.rng())?;
        Ok((area_functional(&f).scaled, 1.0))
    })?;
    let sq_local_time = EmpiricalLaw::from_ensemble("sum of squared local times", &sq)?;
    let area = EmpiricalLaw::from_ensemble("twice the area", &area)?;
    Ok(JeulinReport {
        ks: ks_distance(&sq_local_time, &area)?,
        sq_local_time,
        area,
    })
}

/// `s! · #XFAC(f, s) - X(f)^s` and the four-term bound on its size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub gap: i128,
    pub bound: u128,
}

pub fn corner_gap_sample(f: &LatticeExcursion, s: usize, mode: Mode) -> Result<GapSample> {
    let cw = weights(f, mode);
    let p = cw.total as u128;
    let count = count_admissible(f, s, mode).ok_or_else(|| Error::Domain(format!("s = {s} is not supported")))?;
    let out = &cw.weights;
    let inc = incoming_counts(f, mode);
    let m = out.iter().filter(|&&x| x > 0).count() as u128;
    let (gap, a) = match s {
        1 => (count as i128 - p as i128, m),
        2 => {
            let a12 = 2 * m * p - m * m;
            let a13: u128 = out.iter().map(|&x| (x as u128).pow(2)).sum();
            let a14: u128 = 2 * out.iter().zip(&inc).map(|(&o, &i)| o as u128 * i as u128).sum::<u128>() - m;
            let a24: u128 = inc.iter().map(|&x| (x as u128).pow(2)).sum();
            (2 * count as i128 - (p * p) as i128, a12 + a13 + a14 + a24)
        }
        _ => return Err(Error::Domain(format!("s = {s} is not supported"))),
    };
    let fact: u128 = (1..=s as u128).product();
    let bound = fact * ((2 * s) as u128).pow(2 * s as u32) * a;
    Ok(GapSample { gap, bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Row {
    pub n: usize,
    /// `(2n)^{-3s/2} E|s! #XFAC - X^s|`
    pub estimate: f64,
    pub se: f64,
    /// Same scaling applied to the bound.
    pub bound_mean: f64,
    pub bound_violations: usize,
}

/// Monte Carlo estimates of the scaled gap over uniform trees.
pub fn lemma3_gap(n_list: &[usize], s: usize, reps: usize, seed: u64, mode: Mode) -> Result<Vec<Lemma3Row>> {
    n_list
        .iter()
        .map(|&n| {
            let samples: Vec<Result<GapSample>> = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let f = sample_uniform_excursion(n, &mut replicate_stream(seed, tags::LEMMA3, r).rng())?;
                    corner_gap_sample(&f, s, mode)
                })
                .collect();
            let samples: Vec<GapSample> = samples.into_iter().collect::<Result<_>>()?;
            let scale = ((2 * n) as f64).powf(-1.5 * s as f64);
            let vals: Vec<f64> = samples.iter().map(|g| g.gap.unsigned_abs() as f64 * scale).collect();
            let e = self_normalized(&vals, &vec![1.0; vals.len()]);
            let bound_mean = samples.iter().map(|g| g.bound as f64 * scale).sum::<f64>() / reps as f64;
            let bound_violations = samples.iter().filter(|g| g.gap.unsigned_abs() > g.bound).count();
            Ok(Lemma3Row {
                n,
                estimate: e.mean,
                se: e.se,
                bound_mean,
                bound_violations,
            })
        })
        .collect()
}

/// Whether each estimate is at most the previous one plus `k` combined
/// standard errors.
pub fn decreasing_within(rows: &[Lemma3Row], k: f64) -> bool {
    rows.windows(2)
        .all(|w| w[1].estimate <= w[0].estimate + k * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt())
}

/// `ω₁, …, ω_{s_max}` from `ω₁ = 1` and
/// `ω_s = Σ_{k=1}^{s-1} ω_k ω_{s-k} + 2(3s - 4) ω_{s-1}`.
pub fn wright_sequence(s_max: usize) -> Result<Vec<u128>> {
    if s_max > 12 {
        return Err(Error::Domain(format!("s_max = {s_max} exceeds 12")));
    }
    let mut w: Vec<u128> = Vec::with_capacity(s_max);
    for s in 1..=s_max {
        if s == 1 {
            w.push(1);
            continue;
        }
        let conv: u128 = (1..s).map(|k| w[k - 1] * w[s - k - 1]).sum();
        w.push(conv + 2 * (3 * s as u128 - 4) * w[s - 2]);
    }
    Ok(w)
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    let pi = std::f64::consts::PI;
    if k % 2 == 0 {
        (1..k / 2).map(f64::from).product()
    } else {
        // Γ(j + ½) = (2j)! √π / (4^j j!)
        let j = (k - 1) / 2;
        let mut g = pi.sqrt();
        for i in 0..j {
            g *= i as f64 + 0.5;
        }
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `𝔉ₙ`
    Excursions,
    /// `𝕄ₙ,ₛ`
    Maps,
    /// `H_{n,s}`
    Graphs,
    /// Rooted unicellular maps of genus `g`.
    Unicellular,
    /// Unicellular maps whose breadth-first corners are distinct.
    UnicellularStar,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" | "excursions" => Ok(Family::Excursions),
            "m" | "maps" => Ok(Family::Maps),
            "h" | "graphs" => Ok(Family::Graphs),
            "um" | "unicellular" => Ok(Family::Unicellular),
            "um*" | "um-star" | "unicellular-star" => Ok(Family::UnicellularStar),
            other => Err(Error::Domain(format!("unknown family {other:?}"))),
        }
    }
}

/// Leading-order prediction of the family's size.
pub fn count_asymptotics(family: Family, n: usize, param: usize) -> Result<f64> {
    let nf = n as f64;
    let four_n = 4f64.powi(n as i32);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let fact = |m: usize| (1..=m).map(|x| x as f64).product::<f64>();
    match family {
        Family::Excursions => Ok(four_n / 4.0 / (sqrt_pi * nf.powf(1.5))),
        Family::Maps => {
            let s = param;
            if s == 0 {
                return count_asymptotics(Family::Excursions, n, 0);
            }
            let w = *wright_sequence(s)?.last().unwrap() as f64;
            Ok(w * nf.powf(1.5 * (s as f64 - 1.0)) * four_n / (2f64.powi(s as i32) * gamma_half(3 * s as u32 - 1)))
        }
        Family::Graphs => {
            let moment = match param {
                0 => 1.0,
                1 => (std::f64::consts::PI / 8.0).sqrt(),
                2 => 5.0 / 12.0,
                s => return Err(Error::Domain(format!("no area moment recorded for s = {s}"))),
            };
            Ok(nf.powf(nf - 1.0 + 1.5 * param as f64) * moment / fact(param))
        }
        Family::Unicellular => {
            let g = param as i32;
            Ok(4f64.powi(g) * nf.powf(3.0 * g as f64 - 1.5) * four_n / (3f64.powi(g) * fact(param) * sqrt_pi))
        }
        Family::UnicellularStar => {
            let g = param as i32;
            Ok(4f64.powi(g - 1) * nf.powf(3.0 * g as f64 - 1.5) * four_n / (3f64.powi(g) * fact(param) * sqrt_pi))
        }
    }
}

/// `Σ_{f ∈ 𝔉ₙ} Σ_{σ ∈ 𝕊_g} ψ-count(f, σ)`.
pub fn psi_total(n: usize, g: usize) -> Result<u128> {
    let sg = sg_enumerate(g)?;
    Ok(enumerate_excursions(n)?
        .iter()
        .map(|f| sg.iter().map(|sigma| psi_count(f, sigma)).sum::<u128>())
        .sum())
}

/// Exact size of the family where it is computable.
pub fn exact_count(family: Family, n: usize, param: usize) -> Result<u128> {
    match family {
        Family::Excursions => Ok(catalan(n - 1)),
        Family::Maps => {
            if param <= 2 {
                Ok(enumerate_excursions(n)?
                    .iter()
                    .map(|f| count_admissible(f, param, Mode::Bf).unwrap())
                    .sum())
            } else {
                Ok(enumerate_maps(n, param)?.len() as u128)
            }
        }
        Family::Graphs => count_h(n, param),
        Family::UnicellularStar => psi_total(n, param),
        Family::Unicellular => Err(Error::Domain("no exact count implemented for this family".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub family: Family,
    pub n: usize,
    pub param: usize,
    pub exact: Option<u128>,
    pub prediction: f64,
}

pub fn count_table(family: Family, ns: &[usize], param: usize) -> Result<Vec<CountRow>> {
    ns.iter()
        .map(|&n| {
            Ok(CountRow {
                family,
                n,
                param,
                exact: exact_count(family, n, param).ok(),
                prediction: count_asymptotics(family, n, param)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrightTrend {
    /// `(n, #𝕄ₙ,₁ · 2 / 4ⁿ)`
    pub ratios: Vec<(usize, f64)>,
    /// `ω₁` from the recursion's anchor.
    pub anchor: f64,
    /// Extrapolation of the last two ratios assuming an `n^{-1/2}` correction.
    pub extrapolated: f64,
    pub tolerance: f64,
    /// No ratio falls below `(1 - tolerance)` times its predecessor.
    pub increasing: bool,
    /// Every ratio stays below `(1 + tolerance)` times the anchor.
    pub below_anchor: bool,
    /// The extrapolated value is within `tolerance` of the anchor.
    pub extrapolation_ok: bool,
}

impl WrightTrend {
    pub fn passed(&self) -> bool {
        self.increasing && self.below_anchor && self.extrapolation_ok
    }
}

pub fn wright_trend(n_max: usize, tolerance: f64) -> Result<WrightTrend> {
    let anchor = wright_sequence(1)?[0] as f64;
    let prefactor = 2.0 * gamma_half(2);
    let ratios: Vec<(usize, f64)> = (1..=n_max)
        .map(|n| Ok((n, exact_count(Family::Maps, n, 1)? as f64 * prefactor / 4f64.powi(n as i32))))
        .collect::<Result<_>>()?;
    let increasing = ratios.windows(2).all(|w| w[1].1 >= (1.0 - tolerance) * w[0].1);
    let below_anchor = ratios.iter().all(|r| r.1 <= (1.0 + tolerance) * anchor);
    let extrapolated = if ratios.len() >= 2 {
        let (a, b) = (ratios[ratios.len() - 2], ratios[ratios.len() - 1]);
        let (sa, sb) = ((a.0 as f64).sqrt(), (b.0 as f64).sqrt());
        (sb * b.1 - sa * a.1) / (sb - sa)
    } else {
        ratios[0].1
    };
    Ok(WrightTrend {
        extrapolation_ok: (extrapolated - anchor).abs() <= tolerance * anchor,
        ratios,
        anchor,
        extrapolated,
        tolerance,
        increasing,
        below_anchor,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UmIdentity {
    pub n: usize,
    pub g: usize,
    pub psi_side: u128,
    pub map_side: u128,
}

impl UmIdentity {
    pub fn holds(&self) -> bool {
        self.psi_side == self.map_side
    }
}

/// Both sides of `#𝕌𝕄*ₙ,g = Σ_{f ∈ 𝔉ₙ} Σ_σ ψ-count(f, σ)`; the right side
/// filters all maps with surplus `2g` for one face and distinct
/// breadth-first corners.
pub fn um_count_identity(n: usize, g: usize) -> Result<UmIdentity> {
    if 2 * g > MAP_ENUMERATION_CAP.1 || n > 5 {
        return Err(Error::CapExceeded {
            what: "unicellular identity (n <= 5, g = 1)",
            requested: n.max(2 * g),
            limit: 5,
        });
    }
    let psi_side = psi_total(n, g)?;
    let mut map_side = 0u128;
    for m in map_closure(n, 2 * g)? {
        if !m.is_unicellular() {
            continue;
        }
        let (_, xi) = explore_contour(&m, Mode::Bf)?;
        let distinct: BTreeSet<u32> = xi.i.iter().copied().collect();
        map_side += (distinct.len() == xi.i.len()) as u128;
    }
    Ok(UmIdentity {
        n,
        g,
        psi_side,
        map_side,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub cases: u64,
    pub unicellular: u64,
    pub violations: u64,
}

/// Over all trees with `n` edges, all pairings of `[4g]` and all corner
/// tuples meeting the height condition: one face exactly when the pairing
/// lies in `𝕊_g`, and then the genus is `g`.
pub fn gluing_dichotomy(n: usize, g: usize) -> Result<DichotomyReport> {
    let pairings = all_pairings(g)?;
    let mut rep = DichotomyReport::default();
    for f in enumerate_excursions(n)? {
        let t = tree_of_contour(&f);
        let v = f.values();
        let top = v.len() - 1;
        let size = 4 * g;
        if size > top - 1 {
            continue;
        }
        let mut r: Vec<u32> = (1..=size as u32).collect();
        loop {
            for sigma in &pairings {
                let ok = sigma.pairs().iter().all(|&(a, b)| {
                    let (x, y) = (v[r[a as usize - 1] as usize], v[r[b as usize - 1] as usize]);
                    y == x || y + 1 == x
                });
                if !ok {
                    continue;
                }
                let out = unicellular_glue(&t, sigma, &r, true)?;
                rep.cases += 1;
                rep.unicellular += out.unicellular as u64;
                if out.unicellular != sg_check(sigma) || (out.unicellular && out.genus != g) {
                    rep.violations += 1;
                }
            }
            if !next_increasing(&mut r, top as u32) {
                break;
            }
        }
    }
    Ok(rep)
}

/// Advances an increasing tuple with entries in `1..top`.
fn next_increasing(r: &mut [u32], top: u32) -> bool {
    let size = r.len();
    let mut i = size;
    while i > 0 {
        i -= 1;
        if r[i] < top - (size - i) as u32 {
            r[i] += 1;
            for j in i + 1..size {
                r[j] = r[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VervaatReport {
    pub m: usize,
    pub bridges: u128,
    pub shapes: usize,
    pub expected_shapes: u128,
    /// Every excursion has exactly `2m + 1` preimages.
    pub uniform_fibers: bool,
}

/// Pushes every bridge with `2m + 1` steps through the transform.
pub fn vervaat_check(m: usize) -> Result<VervaatReport> {
    let bridges = enumerate_bridges(m, 16)?;
    let mut fibers: BTreeMap<LatticeExcursion, u128> = BTreeMap::new();
    for b in &bridges {
        *fibers.entry(vervaat(b).to_contour()).or_insert(0) += 1;
    }
    let expected_shapes = catalan(m);
    Ok(VervaatReport {
        m,
        bridges: bridges.len() as u128,
        shapes: fibers.len(),
        expected_shapes,
        uniform_fibers: fibers.len() as u128 == expected_shapes
            && fibers.values().all(|&c| c == (2 * m + 1) as u128)
            && bridges.len() as u128 == binomial((2 * m + 1) as u64, m as u64),
    })
}

/// Mean of a functional under a tilt, for quick summaries.
pub fn tilted_mean(
    n: usize,
    tilt: &Tilt,
    reps: usize,
    seed: u64,
    phi: impl Fn(&LatticeExcursion) -> f64,
) -> Result<Estimate> {
    Ok(tilted_ensemble(n, tilt, reps, seed)?.estimate(phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_basics() {
        let a = EmpiricalLaw::unweighted("a", &[0.0]).unwrap();
        let b = EmpiricalLaw::unweighted("b", &[1.0]).unwrap();
        assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_distance(&a, &b).unwrap(), 1.0);
        let c = EmpiricalLaw::unweighted("c", &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let d = EmpiricalLaw::new("d", &[0.0, 1.0, 2.0, 3.0], &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((ks_distance(&c, &d).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(EmpiricalLaw::unweighted("e", &[]), Err(Error::EmptyLaw)));
    }

    #[test]
    fn wright_values() {
        assert_eq!(wright_sequence(4).unwrap()[..3], [1, 5, 60]);
        assert!((gamma_half(1) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((gamma_half(5) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert_eq!(gamma_half(6), 2.0);
    }

    #[test]
    fn corner_gap_path_example() {
        let f = LatticeExcursion::new(vec![0, 1, 2, 1, 0]).unwrap();
        let g = corner_gap_sample(&f, 1, Mode::Bf).unwrap();
        assert_eq!(g.gap, 0);
        assert_eq!(g.bound, 4 * 3);
        let g2 = corner_gap_sample(&f, 2, Mode::Bf).unwrap();
        assert_eq!(g2.gap, 2 * 32 - 25);
        assert!(g2.gap.unsigned_abs() <= g2.bound);
    }

    #[test]
    fn vervaat_small() {
        for m in 0..=4 {
            assert!(vervaat_check(m).unwrap().uniform_fibers);
        }
    }

    #[test]
    fn um_identity_small() {
        assert_eq!(um_count_identity(2, 1).unwrap().psi_side, 0);
        let three = um_count_identity(3, 1).unwrap();
        assert_eq!((three.psi_side, three.map_side), (3, 3));
    }

    #[test]
    fn maps_count_closed_form() {
        for n in 1..=8 {
            let exact = exact_count(Family::Maps, n, 1).unwrap();
            assert_eq!(2 * exact, 4u128.pow(n as u32) - binomial(2 * n as u64, n as u64));
        }
    }
}
