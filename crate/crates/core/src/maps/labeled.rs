//! Rooted, connected, simple graphs on the labels `1..=n`, their
//! breadth-first spanning trees, the symmetrized tree, and the level weights
//! `W_s` that carry the law of the symmetrized tree back to uniform labeled
//! trees.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_paths::{binomial, HeightProfile, LabeledTree};

pub const H_ENUMERATION_CAP: usize = 7;
pub const LABELED_TREE_ENUMERATION_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledGraph {
    n: usize,
    root: u32,
    /// `(min, max)` label pairs, sorted.
    edges: Vec<(u32, u32)>,
}

impl LabeledGraph {
    pub fn new(n: usize, root: u32, edges: Vec<(u32, u32)>) -> Result<Self> {
        if n == 0 || root == 0 || root as usize > n {
            return Err(Error::InvalidGraph(format!("root {root} not in 1..={n}")));
        }
        let mut norm: Vec<(u32, u32)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        norm.sort_unstable();
        for w in norm.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!("multiple edge {:?}", w[0])));
            }
        }
        for &(a, b) in &norm {
            if a == 0 || b as usize > n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) outside 1..={n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at {a}")));
            }
        }
        let g = LabeledGraph { n, root, edges: norm };
        if !connected(n, &g.edges) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn from_tree(t: &LabeledTree) -> Self {
        LabeledGraph {
            n: t.n(),
            root: t.root(),
            edges: t.edges(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn surplus(&self) -> usize {
        self.edges.len() + 1 - self.n
    }

    /// Neighbours of each label in increasing order; index 0 is unused.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Graph distance from the root to every label, indexed by `label - 1`.
    pub fn distances(&self) -> Vec<u32> {
        let adj = self.adjacency();
        let mut dist = vec![u32::MAX; self.n];
        dist[self.root as usize - 1] = 0;
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize - 1];
            for &w in &adj[v as usize] {
                if dist[w as usize - 1] == u32::MAX {
                    dist[w as usize - 1] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Number of spanning trees.
    pub fn spanning_tree_count(&self) -> u128 {
        spanning_tree_count(self.n, &self.edges)
    }
}

fn connected(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

/// Matrix-tree theorem on the 2-core (pendant trees do not change the count).
fn spanning_tree_count(n: usize, edges: &[(u32, u32)]) -> u128 {
    let mut adj = vec![Vec::new(); n + 1];
    for &(a, b) in edges {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; n + 1];
    alive[0] = false;
    let mut stack: Vec<usize> = (1..=n).filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in &adj[v] {
            if alive[w] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    let core: Vec<usize> = (1..=n).filter(|&v| alive[v]).collect();
    if core.len() <= 1 {
        return 1;
    }
    let mut index = vec![usize::MAX; n + 1];
    for (k, &v) in core.iter().enumerate() {
        index[v] = k;
    }
    // reduced Laplacian: drop the last core vertex
    let m = core.len() - 1;
    let mut lap = vec![vec![0i128; m]; m];
    for &v in &core {
        let iv = index[v];
        for &w in &adj[v] {
            if !alive[w] {
                continue;
            }
            if iv < m {
                lap[iv][iv] += 1;
                if index[w] < m {
                    lap[iv][index[w]] -= 1;
                }
            }
        }
    }
    match bareiss(lap.clone()) {
        Some(d) => d as u128,
        None => {
            let f: Vec<Vec<f64>> = lap.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
            gauss_det(f).round() as u128
        }
    }
}

fn bareiss(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let m = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..m {
        if a[k][k] == 0 {
            let swap = (k + 1..m).find(|&r| a[r][k] != 0)?;
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let num = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = num / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[m - 1][m - 1])
}

fn gauss_det(mut a: Vec<Vec<f64>>) -> f64 {
    let m = a.len();
    let mut det = 1.0;
    for k in 0..m {
        let p = (k..m).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..m {
            let r = a[i][k] / a[k][k];
            for j in k..m {
                a[i][j] -= r * a[k][j];
            }
        }
    }
    det
}

/// Every rooted labeled tree on `1..=n`, from all Prüfer codes and roots.
pub fn enumerate_labeled_trees(n: usize) -> Result<Vec<LabeledTree>> {
    if n > LABELED_TREE_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "labeled tree enumeration (n)",
            requested: n,
            limit: LABELED_TREE_ENUMERATION_CAP,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let len = n.saturating_sub(2);
    let mut code = vec![1u32; len];
    let mut out = Vec::new();
    loop {
        for root in 1..=n as u32 {
            out.push(LabeledTree::from_prufer(n, &code, root)?);
        }
        let mut p = 0;
        loop {
            if p == len {
                return Ok(out);
            }
            if code[p] < n as u32 {
                code[p] += 1;
                break;
            }
            code[p] = 1;
            p += 1;
        }
    }
}

/// `H_{n,s}`: rooted connected simple graphs with `n - 1 + s` edges.
pub fn enumerate_h(n: usize, s: usize) -> Result<Vec<LabeledGraph>> {
    if n > H_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "H enumeration (n)",
            requested: n,
            limit: H_ENUMERATION_CAP,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let all: Vec<(u32, u32)> = (1..=n as u32).flat_map(|a| (a + 1..=n as u32).map(move |b| (a, b))).collect();
    let k = n - 1 + s;
    let mut out = Vec::new();
    if k > all.len() {
        return Ok(out);
    }
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let edges: Vec<(u32, u32)> = pick.iter().map(|&p| all[p]).collect();
        if connected(n, &edges) {
            for root in 1..=n as u32 {
                out.push(LabeledGraph {
                    n,
                    root,
                    edges: edges.clone(),
                });
            }
        }
        // next k-combination of 0..all.len()
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if pick[i] < all.len() - k + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Connected labeled graphs on `n` vertices with `k` edges.
pub fn count_connected(n: usize, k: usize) -> Result<u128> {
    let overflow = || Error::CapExceeded {
        what: "connected graph count (u128)",
        requested: n,
        limit: 0,
    };
    // c[m][j] for m <= n, j <= k
    let mut c = vec![vec![0u128; k + 1]; n + 1];
    for m in 1..=n {
        let pairs = (m * (m - 1) / 2) as u64;
        for j in 0..=k {
            let mut val = binomial(pairs, j as u64);
            if j as u64 > pairs {
                val = 0;
            }
            for part in 1..m {
                let ways = binomial((m - 1) as u64, (part - 1) as u64);
                let rest = ((m - part) * (m - part - 1) / 2) as u64;
                let mut inner = 0u128;
                for i in 0..=j {
                    if c[part][i] == 0 || (j - i) as u64 > rest {
                        continue;
                    }
                    let term = c[part][i].checked_mul(binomial(rest, (j - i) as u64)).ok_or_else(overflow)?;
                    inner = inner.checked_add(term).ok_or_else(overflow)?;
                }
                val = val.checked_sub(ways.checked_mul(inner).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
            c[m][j] = val;
        }
    }
    Ok(c[n][k])
}

/// `#H_{n,s} = n · #{connected graphs with n - 1 + s edges}`.
pub fn count_h(n: usize, s: usize) -> Result<u128> {
    if n == 0 {
        return Ok(0);
    }
    Ok(n as u128 * count_connected(n, n - 1 + s)?)
}

/// The breadth-first spanning tree and the surplus pairs `(i, j)`.
///
/// A virtual vertex 0 is attached to the root; neighbours of a vertex are
/// visited in increasing label order, cyclically, starting after the vertex
/// it was discovered from. In each surplus pair `i` is the deeper endpoint,
/// or the smaller label when both sit at the same height.
pub fn sbf(g: &LabeledGraph) -> (LabeledTree, Vec<(u32, u32)>) {
    let adj = g.adjacency();
    let n = g.n;
    let mut parent = vec![u32::MAX; n + 1];
    let mut depth = vec![0u32; n + 1];
    parent[g.root as usize] = 0;
    let mut queue = VecDeque::from([g.root]);
    while let Some(w) = queue.pop_front() {
        let from = parent[w as usize];
        let list = &adj[w as usize];
        let start = list.partition_point(|&x| x <= from);
        for &x in list[start..].iter().chain(&list[..start]) {
            if parent[x as usize] == u32::MAX {
                parent[x as usize] = w;
                depth[x as usize] = depth[w as usize] + 1;
                queue.push_back(x);
            }
        }
    }
    let tree = LabeledTree::new(g.root, parent[1..].to_vec()).expect("breadth-first tree of a connected graph");
    let mut surplus: Vec<(u32, u32)> = g
        .edges
        .iter()
        .filter(|&&(a, b)| parent[a as usize] != b && parent[b as usize] != a)
        .map(|&(a, b)| {
            let (da, db) = (depth[a as usize], depth[b as usize]);
            if da > db || (da == db && a < b) {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    surplus.sort_unstable();
    (tree, surplus)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetrized {
    Empty,
    Tree(LabeledTree),
}

impl Symmetrized {
    pub fn tree(&self) -> Option<&LabeledTree> {
        match self {
            Symmetrized::Tree(t) => Some(t),
            Symmetrized::Empty => None,
        }
    }
}

/// The breadth-first tree, surplus pairs, and whether two surplus pairs
/// collide in height.
fn sbar_setup(g: &LabeledGraph) -> Option<(LabeledTree, Vec<(u32, u32)>)> {
    let (tree, surplus) = sbf(g);
    let depth = tree.depths();
    let d = |v: u32| depth[v as usize - 1] as i64;
    for (k, &(i, _)) in surplus.iter().enumerate() {
        for &(q, _) in &surplus[k + 1..] {
            if (d(i) - d(q)).abs() <= 1 {
                return None;
            }
        }
    }
    let swappable = surplus.into_iter().filter(|&(i, j)| d(i) == d(j) + 1).collect();
    Some((tree, swappable))
}

/// The symmetrized tree: empty on a height collision, otherwise each
/// off-by-one surplus pair `(i, j)` is swapped (parent of `i` becomes `j`)
/// with probability 1/2.
pub fn sbar<R: Rng + ?Sized>(g: &LabeledGraph, rng: &mut R) -> Symmetrized {
    match sbar_setup(g) {
        None => Symmetrized::Empty,
        Some((mut tree, swappable)) => {
            for (i, j) in swappable {
                if rng.gen_bool(0.5) {
                    tree.set_parent(i, j);
                }
            }
            Symmetrized::Tree(tree)
        }
    }
}

/// Every outcome of [`sbar`] with its probability times `2^s`.
pub fn sbar_outcomes(g: &LabeledGraph) -> Vec<(Symmetrized, u64)> {
    let s = g.surplus() as u32;
    match sbar_setup(g) {
        None => vec![(Symmetrized::Empty, 1u64 << s)],
        Some((tree, swappable)) => {
            let k = swappable.len() as u32;
            (0..1u64 << k)
                .map(|mask| {
                    let mut t = tree.clone();
                    for (b, &(i, j)) in swappable.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            t.set_parent(i, j);
                        }
                    }
                    (Symmetrized::Tree(t), 1u64 << (s - k))
                })
                .collect()
        }
    }
}

/// `2 · [C(z_ℓ, 2) + ½ z_ℓ (z_{ℓ-1} - 1)]` for `ℓ = 0..`; zero at `ℓ = 0`.
fn level_terms(z: &HeightProfile) -> Vec<u128> {
    let h = z.height();
    let mut a = vec![0u128; h + 1];
    for (l, slot) in a.iter_mut().enumerate().skip(1) {
        let (c, p) = (z.at(l) as u128, z.at(l - 1) as u128);
        *slot = c * c.saturating_sub(1) + c * p.saturating_sub(1);
    }
    a
}

/// Sum over `ℓ₁ < … < ℓₛ` with gaps at least 2 of `Π a(ℓₖ)`.
fn separated_sum(a: &[u128], s: usize) -> u128 {
    if s == 0 {
        return 1;
    }
    // prev[l]: the sum over one fewer level, all at most l
    let len = a.len();
    let mut prev = vec![1u128; len];
    for k in 0..s {
        let mut cur = vec![0u128; len];
        let mut run = 0u128;
        for l in 0..len {
            let below = match l {
                0 | 1 => u128::from(k == 0),
                _ => prev[l - 2],
            };
            run += a[l] * below;
            cur[l] = run;
        }
        prev = cur;
    }
    *prev.last().unwrap_or(&0)
}

/// `2 W₁`.
pub fn w_twice(z: &HeightProfile) -> u128 {
    level_terms(z).iter().sum()
}

pub fn w_one(z: &HeightProfile) -> f64 {
    w_twice(z) as f64 / 2.0
}

/// `2^s W_s`.
pub fn w_s(z: &HeightProfile, s: usize) -> u128 {
    separated_sum(&level_terms(z), s)
}

/// `W_s`.
pub fn w_weight(z: &HeightProfile, s: usize) -> f64 {
    w_s(z, s) as f64 / 2f64.powi(s as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaDiagnostic {
    /// Tuples of `s` pairs satisfying the height condition with two of
    /// the deeper endpoints within one level of each other.
    pub degenerate: u128,
    /// `c n^{s-1} (max z)^{s+1}` with `c = 3 s (s-1) 2^s`.
    pub gamma: f64,
    /// `W₁^s - s! W_s`.
    pub replacement_gap: f64,
    /// `3 C(s, 2) W₁^{s-1} (max z)^2`.
    pub replacement_bound: f64,
}

impl GammaDiagnostic {
    pub fn holds(&self) -> bool {
        self.degenerate as f64 <= self.gamma * (1.0 + 1e-12)
            && self.replacement_gap >= -1e-9 * self.replacement_bound.max(1.0)
            && self.replacement_gap <= self.replacement_bound * (1.0 + 1e-12)
    }
}

pub fn gamma_diagnostic(z: &HeightProfile, s: usize) -> GammaDiagnostic {
    let h = z.height();
    let n = z.total() as f64;
    let max_z = z.max_width() as f64;
    let mut a = vec![0u128; h + 1];
    for (l, slot) in a.iter_mut().enumerate().skip(1) {
        let (c, p) = (z.at(l) as u128, z.at(l - 1) as u128);
        *slot = c * c.saturating_sub(1) + c * p;
    }
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    let total: u128 = a.iter().sum();
    let degenerate = total.pow(s as u32) - fact(s) * separated_sum(&a, s);
    let c = 3.0 * (s * s.saturating_sub(1)) as f64 * 2f64.powi(s as i32);
    let w1 = w_one(z);
    GammaDiagnostic {
        degenerate,
        gamma: c * n.powi(s as i32 - 1) * max_z.powi(s as i32 + 1),
        replacement_gap: w1.powi(s as i32) - fact(s) as f64 * w_weight(z, s),
        replacement_bound: 3.0 * (s * s.saturating_sub(1) / 2) as f64 * w1.powi(s as i32 - 1) * max_z * max_z,
    }
}

/// `#{G ∈ H_{n,s} : the symmetrized tree is not empty}`.
pub fn h_nonempty_count(n: usize, s: usize) -> Result<u128> {
    Ok(enumerate_h(n, s)?.iter().filter(|g| sbar_setup(g).is_some()).count() as u128)
}
