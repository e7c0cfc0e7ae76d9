//! Samplers against exact laws from enumeration. Seeds are fixed, so these
//! are deterministic; thresholds are at the 0.1% level.

use std::collections::BTreeMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use surplus_lab::lattice_paths::enumerate_excursions;
use surplus_lab::local_time::weights;
use surplus_lab::maps::{
    enumerate_h, enumerate_labeled_trees, map_closure, psi_count, sbar, sbar_outcomes, LabeledGraph, Symmetrized,
};
use surplus_lab::rng::replicate_stream;
use surplus_lab::samplers::{
    sample_corner_pairs_bf, sample_corner_pairs_df, sample_crum_decorations, sample_h, sample_labeled_tree,
    sample_uniform_excursion, sample_uniform_map, tilted_ensemble, Tilt,
};
use surplus_lab::{LatticeExcursion, Mode, PermutationPairing};

const ALPHA: f64 = 1e-3;

/// Chi-square p-value of counts against equal expected frequencies over
/// `cells` outcomes.
fn uniform_p_value<K: Ord>(counts: &BTreeMap<K, u64>, cells: usize) -> f64 {
    assert!(counts.len() <= cells, "{} outcomes outside the support", counts.len() - cells);
    let total: u64 = counts.values().sum();
    let expected = total as f64 / cells as f64;
    let mut stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    stat += (cells - counts.len()) as f64 * expected;
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

fn tally<K: Ord + Hash>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, u64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

#[test]
fn excursions_are_uniform() {
    let n = 6;
    let cells = enumerate_excursions(n).unwrap().len();
    let draws = (0..200 * cells as u64)
        .map(|r| sample_uniform_excursion(n, &mut replicate_stream(1, 1, r).rng()).unwrap());
    let p = uniform_p_value(&tally(draws), cells);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn labeled_trees_are_uniform() {
    let n = 4;
    let cells = enumerate_labeled_trees(n).unwrap().len();
    assert_eq!(cells, 64);
    let draws = (0..200 * cells as u64).map(|r| sample_labeled_tree(n, &mut replicate_stream(2, 1, r).rng()).unwrap());
    let p = uniform_p_value(&tally(draws), cells);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn corner_pairs_are_uniform() {
    for steps in ["UUDUDD", "UUUDDUDUDD", "UUDUUDDUDD"] {
        let f = LatticeExcursion::from_steps(steps).unwrap();
        for mode in [Mode::Bf, Mode::Df] {
            let cells = weights(&f, mode).total as usize;
            let draws = (0..300 * cells as u64).map(|r| {
                let mut rng = replicate_stream(3, 1, r).rng();
                match mode {
                    Mode::Bf => sample_corner_pairs_bf(&f, 1, &mut rng),
                    Mode::Df => sample_corner_pairs_df(&f, 1, &mut rng),
                }
                .unwrap()[0]
            });
            let counts = tally(draws);
            let cw = weights(&f, mode);
            assert!(counts.keys().all(|&(i, j)| cw.contains(i as usize, j as usize)));
            let p = uniform_p_value(&counts, cells);
            assert!(p > ALPHA, "{steps} {}: p = {p}", mode.as_str());
        }
    }
}

/// Self-normalized weight of each outcome, with its delta-method standard
/// error, compared with `1/cells`.
fn assert_weighted_uniform<K: Ord + Clone>(draws: &[(K, f64)], cells: usize) {
    let total: f64 = draws.iter().map(|d| d.1).sum();
    let mut mass: BTreeMap<K, f64> = BTreeMap::new();
    for (k, w) in draws {
        *mass.entry(k.clone()).or_insert(0.0) += w;
    }
    assert_eq!(mass.len(), cells, "support size");
    let target = 1.0 / cells as f64;
    let mut worst: f64 = 0.0;
    for (k, m) in &mass {
        let p = m / total;
        let var: f64 = draws
            .iter()
            .map(|(key, w)| {
                let ind = (key == k) as u8 as f64;
                w * w * (ind - p).powi(2)
            })
            .sum::<f64>()
            / (total * total);
        worst = worst.max((p - target).abs() / var.sqrt());
    }
    // Bonferroni over the cells at the 0.1% level
    let z = 3.3 + (cells as f64).ln().sqrt();
    assert!(worst < z, "largest deviation {worst:.2} standard errors");
}

#[test]
fn weighted_maps_are_uniform() {
    for (n, s, reps) in [(3, 1, 30_000u64), (2, 2, 20_000)] {
        let cells = map_closure(n, s).unwrap().len();
        let draws: Vec<_> = (0..reps)
            .map(|r| {
                let (m, w) = sample_uniform_map(n, s, &mut replicate_stream(4, 1, r).rng()).unwrap();
                (m.canonical(), w)
            })
            .collect();
        assert_weighted_uniform(&draws, cells);
    }
}

#[test]
fn weighted_graphs_are_uniform() {
    for (n, s) in [(4, 1), (4, 2), (5, 1)] {
        let cells = enumerate_h(n, s).unwrap().len();
        let draws: Vec<_> = (0..30 * cells as u64)
            .map(|r| {
                let (g, w) = sample_h(n, s, &mut replicate_stream(5, 1, r).rng()).unwrap();
                let mut e = g.edges().to_vec();
                e.sort_unstable();
                ((g.root(), e), w)
            })
            .collect();
        assert_weighted_uniform(&draws, cells);
    }
}

#[test]
fn crum_decorations_are_uniform() {
    let f = LatticeExcursion::from_steps("UUDUDUDUDD").unwrap();
    let sigma: PermutationPairing = "(1,3)(2,4)".parse().unwrap();
    let cells = psi_count(&f, &sigma) as usize;
    assert!(cells > 5);
    let draws = (0..200 * cells as u64).map(|r| {
        let d = sample_crum_decorations(&f, 1, &mut replicate_stream(6, 1, r).rng()).unwrap();
        assert_eq!(d.sigma, sigma);
        d.corners
    });
    let p = uniform_p_value(&tally(draws), cells);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn symmetrized_tree_law() {
    let g = LabeledGraph::new(
        9,
        1,
        vec![(1, 2), (2, 3), (3, 4), (4, 5), (1, 6), (6, 7), (7, 8), (8, 9), (3, 6), (5, 8)],
    ).unwrap();
    let exact = sbar_outcomes(&g);
    let denom: u64 = exact.iter().map(|e| e.1).sum();
    let reps = 20_000u64;
    let counts = tally((0..reps).map(|r| sbar(&g, &mut replicate_stream(7, 1, r).rng())));
    let mut stat = 0.0;
    for (out, w) in &exact {
        let expected = reps as f64 * *w as f64 / denom as f64;
        let c = counts.get(out).copied().unwrap_or(0) as f64;
        stat += (c - expected).powi(2) / expected;
    }
    assert!(counts.keys().all(|k| exact.iter().any(|e| &e.0 == k)));
    let p = 1.0 - ChiSquared::new((exact.len() - 1).max(1) as f64).unwrap().cdf(stat);
    assert!(p > ALPHA, "p = {p}");
    assert_eq!(exact.len(), 4);
    assert!(exact.iter().all(|e| matches!(e.0, Symmetrized::Tree(_))));
}

#[test]
fn tilted_means_match_enumeration() {
    let n = 6;
    let all = enumerate_excursions(n).unwrap();
    for tilt in [Tilt::Bf(1), Tilt::Df(2), Tilt::Um(1)] {
        let weight = |f: &LatticeExcursion| match tilt {
            Tilt::Bf(s) => (weights(f, Mode::Bf).total as f64).powi(s as i32),
            Tilt::Df(s) => (weights(f, Mode::Df).total as f64).powi(s as i32),
            Tilt::Um(_) => psi_count(f, &"(1,3)(2,4)".parse().unwrap()) as f64,
        };
        let z: f64 = all.iter().map(weight).sum();
        let exact: f64 = all.iter().map(|f| weight(f) * f.max_height() as f64).sum::<f64>() / z;
        let e = tilted_ensemble(n, &tilt, 20_000, 8).unwrap();
        let est = e.estimate(|f| f.max_height() as f64);
        assert!(
            (est.mean - exact).abs() < 4.0 * est.se,
            "{tilt:?}: {} ± {} vs {exact}",
            est.mean,
            est.se
        );
        assert!(est.ess > 20_000.0 / 50.0);
    }
}
