//! Lattice excursions and bridges, plane trees, labeled trees, and the
//! encodings between them.
//!
//! Contour convention: time `i` of the contour visits the vertex at depth
//! `f(i)`, and corner `i` (for `1 <= i <= 2n-1`) is the corner of that vertex
//! visited at time `i`. The root corner (times `0` and `2n`) is never an
//! insertion site.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

pub const DEFAULT_EXCURSION_CAP: usize = 12;
pub const DEFAULT_BRIDGE_CAP: usize = 8;

const NONE: u32 = u32::MAX;

/// A contour function in `𝔉ₙ`: `f(0) = f(2n) = 0`, `f > 0` inside, ±1 steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeExcursion {
    values: Vec<u32>,
}

impl LatticeExcursion {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let len = values.len();
        if len < 3 || len % 2 == 0 {
            return Err(Error::NotAnExcursion(format!(
                "length {len} is not of the form 2n+1 with n >= 1"
            )));
        }
        if values[0] != 0 || values[len - 1] != 0 {
            return Err(Error::NotAnExcursion("endpoints must be 0".into()));
        }
        if let Some(i) = (1..len - 1).find(|&i| values[i] == 0) {
            return Err(Error::NotAnExcursion(format!("touches 0 at interior time {i}")));
        }
        if let Some(i) = (0..len - 1).find(|&i| values[i].abs_diff(values[i + 1]) != 1) {
            return Err(Error::NotAnExcursion(format!("step {i} -> {} is not ±1", i + 1)));
        }
        Ok(LatticeExcursion { values })
    }

    pub(crate) fn from_values_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(LatticeExcursion::new(values.clone()).is_ok());
        LatticeExcursion { values }
    }

    /// Parses a `U`/`D` step string such as `UUDD`.
    pub fn from_steps(steps: &str) -> Result<Self> {
        let mut values = Vec::with_capacity(steps.len() + 1);
        let mut h: i64 = 0;
        values.push(0u32);
        for (i, c) in steps.trim().chars().enumerate() {
            match c {
                'U' | 'u' => h += 1,
                'D' | 'd' => h -= 1,
                _ => {
                    return Err(Error::NotAnExcursion(format!(
                        "unexpected character {c:?} at step {i}"
                    )))
                }
            }
            if h < 0 {
                return Err(Error::NotAnExcursion(format!("goes negative at step {i}")));
            }
            values.push(h as u32);
        }
        LatticeExcursion::new(values)
    }

    pub fn to_steps(&self) -> String {
        self.values
            .windows(2)
            .map(|w| if w[1] > w[0] { 'U' } else { 'D' })
            .collect()
    }

    /// The half-length `n`; the path has `2n` steps.
    pub fn n(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn max_height(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn single_edge() -> Self {
        LatticeExcursion {
            values: vec![0, 1, 0],
        }
    }
}

impl Index<usize> for LatticeExcursion {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.values[i]
    }
}

impl fmt::Display for LatticeExcursion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_steps())
    }
}

/// A rooted ordered tree with `n + 1` vertices whose root has one child.
///
/// Vertices are numbered in depth-first preorder, the root being 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    parent: Vec<u32>,
    first_child: Vec<u32>,
    next_sibling: Vec<u32>,
    depth: Vec<u32>,
}

impl PlaneTree {
    /// Builds a tree from ordered child lists indexed by vertex, root 0.
    pub fn from_children(children: &[Vec<usize>]) -> Result<Self> {
        let count = children.len();
        if count < 2 {
            return Err(Error::InvalidTree("need at least one edge".into()));
        }
        if children[0].len() != 1 {
            return Err(Error::InvalidTree(format!(
                "root has {} children, expected 1",
                children[0].len()
            )));
        }
        let mut seen = vec![false; count];
        seen[0] = true;
        let mut edges = 0usize;
        for list in children {
            for &c in list {
                if c >= count || seen[c] {
                    return Err(Error::InvalidTree(format!("vertex {c} used twice or out of range")));
                }
                seen[c] = true;
                edges += 1;
            }
        }
        if edges + 1 != count {
            return Err(Error::InvalidTree("vertex count must equal edge count + 1".into()));
        }
        // Preorder walk, emitting the contour.
        let mut values = vec![0u32];
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        let mut visited = 1usize;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < children[v].len() {
                let c = children[v][*next];
                *next += 1;
                values.push(stack.len() as u32);
                stack.push((c, 0));
                visited += 1;
            } else {
                stack.pop();
                if !stack.is_empty() {
                    values.push(stack.len() as u32 - 1);
                }
            }
        }
        if visited != count {
            return Err(Error::InvalidTree("not connected".into()));
        }
        Ok(tree_of_contour(&LatticeExcursion::new(values)?))
    }

    /// Parses a parenthesized word, e.g. `((()()))` for a root edge above a
    /// vertex with two children.
    pub fn from_word(word: &str) -> Result<Self> {
        let w = word.trim();
        let bytes = w.as_bytes();
        if bytes.len() < 4 || bytes[0] != b'(' || bytes[bytes.len() - 1] != b')' {
            return Err(Error::InvalidTree(format!("malformed word {w:?}")));
        }
        let inner = &w[1..w.len() - 1];
        let steps: String = inner
            .chars()
            .map(|c| match c {
                '(' => Ok('U'),
                ')' => Ok('D'),
                other => Err(Error::InvalidTree(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        let f = LatticeExcursion::from_steps(&steps)
            .map_err(|e| Error::InvalidTree(format!("word {w:?}: {e}")))?;
        Ok(tree_of_contour(&f))
    }

    pub fn to_word(&self) -> String {
        let f = contour_of_tree(self);
        let mut s = String::with_capacity(2 * self.num_edges() + 2);
        s.push('(');
        for c in f.to_steps().chars() {
            s.push(if c == 'U' { '(' } else { ')' });
        }
        s.push(')');
        s
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn num_edges(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != NONE).then_some(p as usize)
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn height(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn children(&self, v: usize) -> Children<'_> {
        Children {
            tree: self,
            next: self.first_child[v],
        }
    }

    pub fn num_children(&self, v: usize) -> usize {
        self.children(v).count()
    }

    /// True if `a` is an ancestor of `b` or equal to it.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut v = b;
        while self.depth[v] > self.depth[a] {
            v = self.parent[v] as usize;
        }
        v == a
    }
}

pub struct Children<'a> {
    tree: &'a PlaneTree,
    next: u32,
}

impl Iterator for Children<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.next == NONE {
            return None;
        }
        let v = self.next as usize;
        self.next = self.tree.next_sibling[v];
        Some(v)
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word())
    }
}

pub fn contour_of_tree(t: &PlaneTree) -> LatticeExcursion {
    let n = t.num_edges();
    let mut values = Vec::with_capacity(2 * n + 1);
    values.push(0);
    let mut v = 0usize;
    let mut came_from_child: Option<usize> = None;
    loop {
        let next = match came_from_child {
            None => t.first_child[v],
            Some(c) => t.next_sibling[c],
        };
        if next != NONE {
            v = next as usize;
            came_from_child = None;
            values.push(t.depth[v]);
        } else if v == 0 {
            break;
        } else {
            came_from_child = Some(v);
            v = t.parent[v] as usize;
            values.push(t.depth[v]);
        }
    }
    LatticeExcursion::from_values_unchecked(values)
}

pub fn tree_of_contour(f: &LatticeExcursion) -> PlaneTree {
    let n = f.n();
    let mut parent = vec![NONE; n + 1];
    let mut first_child = vec![NONE; n + 1];
    let mut next_sibling = vec![NONE; n + 1];
    let mut last_child = vec![NONE; n + 1];
    let mut depth = vec![0u32; n + 1];
    let mut current = 0usize;
    let mut next_id = 1usize;
    for w in f.values().windows(2) {
        if w[1] > w[0] {
            let v = next_id;
            next_id += 1;
            parent[v] = current as u32;
            depth[v] = w[1];
            if last_child[current] == NONE {
                first_child[current] = v as u32;
            } else {
                next_sibling[last_child[current] as usize] = v as u32;
            }
            last_child[current] = v as u32;
            current = v;
        } else {
            current = parent[current] as usize;
        }
    }
    PlaneTree {
        parent,
        first_child,
        next_sibling,
        depth,
    }
}

/// The vertex (preorder id) visited at each contour time `0..=2n`.
pub fn contour_vertices(f: &LatticeExcursion) -> Vec<u32> {
    let mut out = Vec::with_capacity(f.values().len());
    let mut stack = vec![0u32];
    let mut next_id = 1u32;
    out.push(0);
    for w in f.values().windows(2) {
        if w[1] > w[0] {
            stack.push(next_id);
            next_id += 1;
        } else {
            stack.pop();
        }
        out.push(*stack.last().unwrap());
    }
    out
}

/// Łukasiewicz path `S(0..=n+1)`: steps are child counts minus one, taken in
/// preorder; `S(n+1) = -1`.
pub fn lukasiewicz_of_tree(t: &PlaneTree) -> Vec<i64> {
    let mut s = Vec::with_capacity(t.num_vertices() + 1);
    let mut acc = 0i64;
    s.push(0);
    for v in 0..t.num_vertices() {
        acc += t.num_children(v) as i64 - 1;
        s.push(acc);
    }
    s
}

/// Number of vertices at each height; `z[0] = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    pub counts: Vec<u64>,
}

impl HeightProfile {
    pub fn from_depths(depths: impl IntoIterator<Item = u32>) -> Self {
        let mut counts: Vec<u64> = Vec::new();
        for d in depths {
            let d = d as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        HeightProfile { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `z(k)`, zero beyond the height.
    pub fn at(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn height(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn max_width(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

pub fn height_profile(t: &PlaneTree) -> HeightProfile {
    HeightProfile::from_depths(t.depths().iter().copied())
}

/// A rooted tree on the labels `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledTree {
    root: u32,
    /// `parent[v - 1]`, with 0 marking the root.
    parent: Vec<u32>,
}

impl LabeledTree {
    pub fn new(root: u32, parent: Vec<u32>) -> Result<Self> {
        let n = parent.len() as u32;
        if n == 0 || root == 0 || root > n {
            return Err(Error::InvalidTree(format!("root {root} not in 1..={n}")));
        }
        if parent[root as usize - 1] != 0 {
            return Err(Error::InvalidTree("root must have no parent".into()));
        }
        for v in 1..=n {
            let p = parent[v as usize - 1];
            if v != root && (p == 0 || p > n || p == v) {
                return Err(Error::InvalidTree(format!("vertex {v} has invalid parent {p}")));
            }
        }
        let tree = LabeledTree { root, parent };
        // Every vertex must reach the root within n steps.
        for v in 1..=n {
            let mut u = v;
            let mut steps = 0;
            while u != root {
                u = tree.parent[u as usize - 1];
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidTree("parent array has a cycle".into()));
                }
            }
        }
        Ok(tree)
    }

    /// Decodes a Prüfer sequence (length `n - 2`, labels in `1..=n`) and roots
    /// the resulting tree at `root`.
    pub fn from_prufer(n: usize, code: &[u32], root: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTree("empty tree".into()));
        }
        if n == 1 {
            return LabeledTree::new(1, vec![0]);
        }
        if code.len() != n - 2 || code.iter().any(|&c| c == 0 || c as usize > n) {
            return Err(Error::InvalidTree("malformed Prüfer code".into()));
        }
        let mut degree = vec![1u32; n + 1];
        for &c in code {
            degree[c as usize] += 1;
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        let mut ptr = 1usize;
        while degree[ptr] != 1 {
            ptr += 1;
        }
        let mut leaf = ptr;
        for &c in code {
            let c = c as usize;
            adj[leaf].push(c as u32);
            adj[c].push(leaf as u32);
            degree[c] -= 1;
            degree[leaf] = 0;
            if degree[c] == 1 && c < ptr {
                leaf = c;
            } else {
                ptr += 1;
                while degree[ptr] != 1 {
                    ptr += 1;
                }
                leaf = ptr;
            }
        }
        let last = (1..=n).filter(|&v| degree[v] == 1 && v != leaf).max().unwrap_or(n);
        adj[leaf].push(last as u32);
        adj[last].push(leaf as u32);
        LabeledTree::from_adjacency(&adj, root)
    }

    pub(crate) fn from_adjacency(adj: &[Vec<u32>], root: u32) -> Result<Self> {
        let n = adj.len() - 1;
        let mut parent = vec![u32::MAX; n];
        parent[root as usize - 1] = 0;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &adj[v as usize] {
                if parent[w as usize - 1] == u32::MAX {
                    parent[w as usize - 1] = v;
                    stack.push(w);
                }
            }
        }
        if parent.contains(&u32::MAX) {
            return Err(Error::InvalidTree("not connected".into()));
        }
        LabeledTree::new(root, parent)
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize - 1];
        (p != 0).then_some(p)
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub(crate) fn set_parent(&mut self, v: u32, p: u32) {
        self.parent[v as usize - 1] = p;
    }

    /// Depth of each label, indexed by `label - 1`.
    pub fn depths(&self) -> Vec<u32> {
        let n = self.n();
        let mut depth = vec![u32::MAX; n];
        depth[self.root as usize - 1] = 0;
        for v in 1..=n as u32 {
            let mut path = Vec::new();
            let mut u = v;
            while depth[u as usize - 1] == u32::MAX {
                path.push(u);
                u = self.parent[u as usize - 1];
            }
            let mut d = depth[u as usize - 1];
            for &w in path.iter().rev() {
                d += 1;
                depth[w as usize - 1] = d;
            }
        }
        depth
    }

    pub fn height_profile(&self) -> HeightProfile {
        HeightProfile::from_depths(self.depths())
    }

    /// Edges as `(min, max)` label pairs, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = (1..=self.n() as u32)
            .filter_map(|v| self.parent(v).map(|p| (v.min(p), v.max(p))))
            .collect();
        e.sort_unstable();
        e
    }
}

/// A ±1 walk of length `2m+1` from 0 to −1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeBridge {
    values: Vec<i64>,
}

impl LatticeBridge {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        let len = values.len();
        if len < 2 || len % 2 != 0 {
            return Err(Error::NotABridge(format!("length {len} is not 2m+2")));
        }
        if values[0] != 0 || values[len - 1] != -1 {
            return Err(Error::NotABridge("must run from 0 to -1".into()));
        }
        if values.windows(2).any(|w| (w[1] - w[0]).abs() != 1) {
            return Err(Error::NotABridge("steps must be ±1".into()));
        }
        Ok(LatticeBridge { values })
    }

    pub fn from_steps(steps: &[i8]) -> Result<Self> {
        let mut values = Vec::with_capacity(steps.len() + 1);
        let mut h = 0i64;
        values.push(0);
        for &s in steps {
            h += s as i64;
            values.push(h);
        }
        LatticeBridge::new(values)
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `m`, where the bridge has `2m + 1` steps.
    pub fn m(&self) -> usize {
        (self.values.len() - 2) / 2
    }

    /// Index of the first global minimum.
    pub fn first_minimum(&self) -> usize {
        let min = *self.values.iter().min().unwrap();
        self.values.iter().position(|&v| v == min).unwrap()
    }
}

/// A walk of length `2m+1`, nonnegative on `[0, 2m]`, ending at −1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcursionWithEndStep {
    values: Vec<i64>,
}

impl ExcursionWithEndStep {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        LatticeBridge::new(values.clone())?;
        let len = values.len();
        if values[..len - 1].iter().any(|&v| v < 0) {
            return Err(Error::NotAnExcursion("negative before the final step".into()));
        }
        Ok(ExcursionWithEndStep { values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// The contour in `𝔉_{m+1}`: `C(0) = 0`, `C(t+1) = S(t) + 1`.
    pub fn to_contour(&self) -> LatticeExcursion {
        let mut v = Vec::with_capacity(self.values.len() + 1);
        v.push(0u32);
        v.extend(self.values.iter().map(|&x| (x + 1) as u32));
        LatticeExcursion::from_values_unchecked(v)
    }

    pub fn from_contour(f: &LatticeExcursion) -> Self {
        ExcursionWithEndStep {
            values: f.values()[1..].iter().map(|&x| x as i64 - 1).collect(),
        }
    }
}

/// Cyclic shift of the bridge started at its first global minimum.
pub fn vervaat(b: &LatticeBridge) -> ExcursionWithEndStep {
    let tau = b.first_minimum();
    let v = b.values();
    let len = v.len() - 1;
    let mut out = Vec::with_capacity(v.len());
    out.push(0);
    let mut h = 0i64;
    for k in 0..len {
        let a = (tau + k) % len;
        h += v[a + 1] - v[a];
        out.push(h);
    }
    ExcursionWithEndStep { values: out }
}

pub fn enumerate_excursions(n: usize) -> Result<Vec<LatticeExcursion>> {
    enumerate_excursions_with_cap(n, DEFAULT_EXCURSION_CAP)
}

/// All of `𝔉ₙ` in lexicographic order of step strings (`D` before `U`
/// reversed: up-steps first).
pub fn enumerate_excursions_with_cap(n: usize, cap: usize) -> Result<Vec<LatticeExcursion>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "excursion enumeration",
            requested: n,
            limit: cap,
        });
    }
    let mut out = Vec::with_capacity(catalan(n - 1) as usize);
    let mut buf = vec![0u32; 2 * n + 1];
    buf[1] = 1;
    fn rec(buf: &mut Vec<u32>, t: usize, n: usize, out: &mut Vec<LatticeExcursion>) {
        let h = buf[t - 1];
        if t == 2 * n {
            if h == 1 {
                buf[t] = 0;
                out.push(LatticeExcursion::from_values_unchecked(buf.clone()));
            }
            return;
        }
        let remaining = 2 * n - t;
        // stay >= 1 strictly inside, and be able to return to 1 by time 2n-1
        if (h + 1) as usize <= remaining {
            buf[t] = h + 1;
            rec(buf, t + 1, n, out);
        }
        if h >= 2 {
            buf[t] = h - 1;
            rec(buf, t + 1, n, out);
        }
    }
    if n == 1 {
        out.push(LatticeExcursion::single_edge());
    } else {
        rec(&mut buf, 2, n, &mut out);
    }
    Ok(out)
}

/// All bridges with `2m + 1` steps (`m` up, `m + 1` down).
pub fn enumerate_bridges(m: usize, cap: usize) -> Result<Vec<LatticeBridge>> {
    if m > cap {
        return Err(Error::CapExceeded {
            what: "bridge enumeration",
            requested: m,
            limit: cap,
        });
    }
    let len = 2 * m + 1;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << len) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let steps: Vec<i8> = (0..len).map(|k| if mask >> k & 1 == 1 { 1 } else { -1 }).collect();
        out.push(LatticeBridge::from_steps(&steps)?);
    }
    Ok(out)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128).expect("binomial overflow") / (i as u128 + 1);
    }
    r
}

/// `Catalan(m) = binom(2m, m) / (m + 1)`; `#𝔉ₙ = Catalan(n − 1)`.
pub fn catalan(m: usize) -> u128 {
    binomial(2 * m as u64, m as u64) / (m as u128 + 1)
}
