//! Discrete local time of a contour function and the corner weights `B` and
//! `D` that drive the breadth-first and depth-first tilts.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_paths::LatticeExcursion;

/// Which exploration a decoration or weight belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bf,
    Df,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bf => "bf",
            Mode::Df => "df",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(Mode::Bf),
            "df" => Ok(Mode::Df),
            other => Err(Error::Domain(format!("unknown mode {other:?}"))),
        }
    }
}

/// `L(f; t, y)` at integer times and levels, stored densely.
#[derive(Clone, Debug)]
pub struct LocalTimeField {
    width: usize,
    counts: Vec<u32>,
    len: usize,
}

impl LocalTimeField {
    pub fn new(f: &LatticeExcursion) -> Self {
        let width = f.max_height() as usize + 1;
        let len = f.values().len();
        let mut counts = vec![0u32; len * width];
        let mut row = vec![0u32; width];
        for (t, &y) in f.values().iter().enumerate() {
            row[y as usize] += 1;
            counts[t * width..(t + 1) * width].copy_from_slice(&row);
        }
        LocalTimeField { width, counts, len }
    }

    /// Integer count; zero for levels outside `[0, max f]`.
    pub fn count(&self, t: usize, y: i64) -> u32 {
        if y < 0 || y as usize >= self.width || t >= self.len {
            return 0;
        }
        self.counts[t * self.width + y as usize]
    }

    pub fn final_row(&self) -> &[u32] {
        let t = self.len - 1;
        &self.counts[t * self.width..(t + 1) * self.width]
    }

    pub fn eval(&self, t: f64, y: f64) -> Result<f64> {
        bilinear(self.len - 1, t, y, |ti, yi| self.count(ti, yi) as f64)
    }

    /// Rows `t,y,L` for every lattice point with `0 <= y <= max f`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,y,L")?;
        for t in 0..self.len {
            for y in 0..self.width {
                writeln!(w, "{t},{y},{}", self.counts[t * self.width + y])?;
            }
        }
        Ok(())
    }
}

fn bilinear(last: usize, t: f64, y: f64, at: impl Fn(usize, i64) -> f64) -> Result<f64> {
    if !(t.is_finite() && y.is_finite()) || t < 0.0 || t > last as f64 {
        return Err(Error::Domain(format!("local time at (t={t}, y={y}) outside [0, {last}]")));
    }
    let t0 = t.floor() as usize;
    let t1 = (t0 + 1).min(last);
    let a = t - t0 as f64;
    let y0 = y.floor() as i64;
    let b = y - y0 as f64;
    let lo = (1.0 - a) * at(t0, y0) + a * at(t1, y0);
    let hi = (1.0 - a) * at(t0, y0 + 1) + a * at(t1, y0 + 1);
    Ok((1.0 - b) * lo + b * hi)
}

/// `L(f; t, y)`: visits to level `y` up to time `t`, blended bilinearly
/// between lattice points.
pub fn local_time(f: &LatticeExcursion, t: f64, y: f64) -> Result<f64> {
    let v = f.values();
    bilinear(v.len() - 1, t, y, |ti, yi| {
        v[..=ti].iter().filter(|&&x| x as i64 == yi).count() as f64
    })
}

/// `L(f; 2n, y)` for `y = 0..=max f`.
pub fn final_local_time(f: &LatticeExcursion) -> Vec<u64> {
    let mut l = vec![0u64; f.max_height() as usize + 1];
    for &y in f.values() {
        l[y as usize] += 1;
    }
    l
}

/// Per-corner weights `B(f; i)` or `D(f; i)` for `i = 0..=2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerWeights {
    pub mode: Mode,
    pub weights: Vec<u64>,
    pub total: u64,
    values: Vec<u32>,
}

impl CornerWeights {
    pub fn get(&self, i: usize) -> u64 {
        self.weights[i]
    }

    /// The index set whose size is `weights[i]`, in increasing order.
    pub fn set(&self, i: usize) -> Vec<usize> {
        match self.mode {
            Mode::Bf => bf_set_of(&self.values, i),
            Mode::Df => df_set_of(&self.values, i),
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        match self.mode {
            Mode::Bf => in_bf_set(&self.values, i, j),
            Mode::Df => in_df_set(&self.values, i, j),
        }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

pub fn weights(f: &LatticeExcursion, mode: Mode) -> CornerWeights {
    match mode {
        Mode::Bf => bf_weights(f),
        Mode::Df => df_weights(f),
    }
}

/// `B(f; i) = #{ j : i∨1 <= j <= 2n-1, f(j) ∈ {f(i), f(i)-1} }`.
pub fn bf_weights(f: &LatticeExcursion) -> CornerWeights {
    let v = f.values();
    let two_n = v.len() - 1;
    let mut cnt = vec![0u64; f.max_height() as usize + 2];
    let mut weights = vec![0u64; two_n + 1];
    for i in (1..two_n).rev() {
        let h = v[i] as usize;
        cnt[h] += 1;
        weights[i] = cnt[h] + cnt[h - 1];
    }
    let total = weights.iter().sum();
    CornerWeights {
        mode: Mode::Bf,
        weights,
        total,
        values: v.to_vec(),
    }
}

/// `D(f; i)`: times `u >= i` with `f(u) >= 1` at which `f` sits at its
/// running minimum over `[i, u]`.
pub fn df_weights(f: &LatticeExcursion) -> CornerWeights {
    let v = f.values();
    let two_n = v.len() - 1;
    let mut cnt = vec![0u64; f.max_height() as usize + 2];
    let mut weights = vec![0u64; two_n + 1];
    let mut running = 0u64;
    for i in (0..=two_n).rev() {
        let h = v[i] as usize;
        running -= cnt[h + 1];
        cnt[h + 1] = 0;
        if h >= 1 {
            cnt[h] += 1;
            running += 1;
        }
        weights[i] = running;
    }
    let total = weights.iter().sum();
    CornerWeights {
        mode: Mode::Df,
        weights,
        total,
        values: v.to_vec(),
    }
}

pub(crate) fn in_bf_set(v: &[u32], i: usize, j: usize) -> bool {
    let two_n = v.len() - 1;
    j >= i.max(1) && j < two_n && (v[j] == v[i] || v[j] + 1 == v[i])
}

pub(crate) fn in_df_set(v: &[u32], i: usize, j: usize) -> bool {
    if j < i || j >= v.len() || v[j] == 0 {
        return false;
    }
    v[i..=j].iter().all(|&x| x >= v[j])
}

fn bf_set_of(v: &[u32], i: usize) -> Vec<usize> {
    let two_n = v.len() - 1;
    (i.max(1)..two_n).filter(|&j| in_bf_set(v, i, j)).collect()
}

fn df_set_of(v: &[u32], i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if v[i] == 0 {
        return out;
    }
    let mut floor = v[i];
    for (j, &x) in v.iter().enumerate().skip(i) {
        if x == 0 {
            break;
        }
        if x <= floor {
            floor = x;
            out.push(j);
        }
    }
    out
}

/// `ℜ(f; i, y)`: visits to level `y` from time `i` on, before the path first
/// drops below `y`.
pub fn df_level_set(f: &LatticeExcursion, i: usize, y: u32) -> Vec<usize> {
    let v = f.values();
    let mut out = Vec::new();
    for (j, &x) in v.iter().enumerate().skip(i) {
        if x < y {
            break;
        }
        if x == y {
            out.push(j);
        }
    }
    out
}

/// `in(x) = #{ a <= x : x belongs to the set of a }`, for `x = 0..=2n`.
pub fn incoming_counts(f: &LatticeExcursion, mode: Mode) -> Vec<u64> {
    let v = f.values();
    let two_n = v.len() - 1;
    let mut out = vec![0u64; two_n + 1];
    match mode {
        Mode::Bf => {
            let mut cnt = vec![0u64; f.max_height() as usize + 2];
            for x in 1..two_n {
                let h = v[x] as usize;
                cnt[h] += 1;
                out[x] = cnt[h] + cnt[h + 1];
            }
        }
        Mode::Df => {
            let mut last = vec![0usize; f.max_height() as usize + 1];
            for x in 0..=two_n {
                let h = v[x] as usize;
                if h >= 1 {
                    out[x] = (x - last[h - 1]) as u64;
                }
                last[h] = x;
            }
        }
    }
    out
}

/// A raw discrete functional together with its scaled value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub raw: f64,
    pub scaled: f64,
}

/// `Σ_y L(f; 2n, y)²`, scaled by `(2n)^{-3/2}`.
pub fn sq_localtime_functional(f: &LatticeExcursion) -> Functional {
    let raw: u64 = final_local_time(f).iter().map(|&l| l * l).sum();
    let two_n = (2 * f.n()) as f64;
    Functional {
        raw: raw as f64,
        scaled: raw as f64 * two_n.powf(-1.5),
    }
}

/// `Σ_{i=1}^{2n-1} 1/f(i)`, scaled by `(2n)^{-1/2}`.
pub fn inverse_height_functional(f: &LatticeExcursion) -> Functional {
    let v = f.values();
    let raw: f64 = v[1..v.len() - 1].iter().map(|&x| 1.0 / x as f64).sum();
    let two_n = (2 * f.n()) as f64;
    Functional {
        raw,
        scaled: raw / two_n.sqrt(),
    }
}

/// Trapezoid area; the scaled value is `2·area·(2n)^{-3/2}`.
pub fn area_functional(f: &LatticeExcursion) -> Functional {
    // trapezoids of a path starting and ending at 0 sum to Σ f(i)
    let raw: u64 = f.values().iter().map(|&x| x as u64).sum();
    let two_n = (2 * f.n()) as f64;
    Functional {
        raw: raw as f64,
        scaled: 2.0 * raw as f64 * two_n.powf(-1.5),
    }
}

/// The local-time form of `B(f)`:
/// `Σ_{i=1}^{2n-1} [L(2n,f(i)) - L(i-1,f(i)) + L(2n,f(i)-1) - L(i-1,f(i)-1)]`.
///
/// It counts time `2n` at level 0 for every `i` with `f(i) = 1`, so it
/// exceeds `B(f)` by `#{i : f(i) = 1}`.
pub fn bf_total_via_local_time(f: &LatticeExcursion) -> u64 {
    let v = f.values();
    let two_n = v.len() - 1;
    let fin = final_local_time(f);
    let mut before = vec![0u64; fin.len()];
    let mut total = 0u64;
    before[0] = 1;
    for i in 1..two_n {
        let h = v[i] as usize;
        total += fin[h] - before[h] + fin[h - 1] - before[h - 1];
        before[h] += 1;
    }
    total
}
