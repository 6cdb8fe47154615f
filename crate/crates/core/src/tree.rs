//! Recursively grown trees under uniform and preferential attachment, and
//! correlated pairs that share their history up to a common time.
//!
//! Vertices are labelled by arrival index `0..n`. Seed vertices occupy
//! `0..seed_size`; every later vertex `v` attaches to some `parent < v`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngSpec;

pub(crate) const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("edge list does not form a tree: {0}")]
    NotATree(String),
    #[error("target size {n} is smaller than the seed size {seed_size}")]
    InvalidSize { n: usize, seed_size: usize },
    #[error("t_star = {t_star} must lie in [{seed_size}, {n}]")]
    InvalidTStar {
        t_star: usize,
        seed_size: usize,
        n: usize,
    },
    #[error("preferential attachment needs a seed with at least 2 vertices")]
    SeedTooSmall,
    #[error("{0} requires k >= 2")]
    BadSeedParameter(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Attachment rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GrowthRule {
    /// Each existing vertex is equally likely.
    #[serde(rename = "UA")]
    Uniform,
    /// Probability proportional to degree.
    #[serde(rename = "PA")]
    Preferential,
}

impl fmt::Display for GrowthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthRule::Uniform => "UA",
            GrowthRule::Preferential => "PA",
        })
    }
}

impl FromStr for GrowthRule {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "UA" | "UNIFORM" => Ok(GrowthRule::Uniform),
            "PA" | "PREFERENTIAL" => Ok(GrowthRule::Preferential),
            other => Err(TreeError::Parse(format!("unknown growth rule `{other}`"))),
        }
    }
}

/// Description of a seed tree, as accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedSpec {
    /// The unique tree on two vertices.
    S2,
    Star(usize),
    Path(usize),
    Edges(Vec<(usize, usize)>),
}

impl FromStr for SeedSpec {
    type Err = TreeError;

    /// Accepts `S2`, `star:K`, `path:K` and `edges:a-b,c-d,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("s2") {
            return Ok(SeedSpec::S2);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| TreeError::Parse(format!("bad seed spec `{s}`")))?;
        let parse_k = |a: &str| {
            a.trim()
                .parse::<usize>()
                .map_err(|e| TreeError::Parse(format!("bad seed size `{a}`: {e}")))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "star" => Ok(SeedSpec::Star(parse_k(arg)?)),
            "path" => Ok(SeedSpec::Path(parse_k(arg)?)),
            "edges" => {
                let edges = arg
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|tok| !tok.is_empty())
                    .map(parse_edge)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SeedSpec::Edges(edges))
            }
            other => Err(TreeError::Parse(format!("unknown seed kind `{other}`"))),
        }
    }
}

fn parse_edge(tok: &str) -> Result<(usize, usize), TreeError> {
    let (a, b) = tok
        .split_once('-')
        .ok_or_else(|| TreeError::Parse(format!("bad edge `{tok}`")))?;
    let p = |x: &str| {
        x.parse::<usize>()
            .map_err(|e| TreeError::Parse(format!("bad vertex `{x}`: {e}")))
    };
    Ok((p(a)?, p(b)?))
}

/// A validated seed tree on vertices `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedTree {
    size: usize,
    edges: Vec<(u32, u32)>,
    /// Parent of each seed vertex when rooted at vertex 0.
    parent: Vec<u32>,
    /// Breadth-first order from vertex 0; parents precede children.
    order: Vec<u32>,
}

impl SeedTree {
    pub fn single_vertex() -> Self {
        SeedTree {
            size: 1,
            edges: Vec::new(),
            parent: vec![NO_PARENT],
            order: vec![0],
        }
    }

    pub fn pair() -> Self {
        Self::from_edges(&[(0, 1)]).expect("S2 is a tree")
    }

    /// Star on `k` vertices centred at 0.
    pub fn star(k: usize) -> Result<Self, TreeError> {
        if k < 2 {
            return Err(TreeError::BadSeedParameter("star"));
        }
        Self::from_edges(&(1..k).map(|v| (0, v)).collect::<Vec<_>>())
    }

    /// Path `0 - 1 - ... - (k-1)`.
    pub fn path(k: usize) -> Result<Self, TreeError> {
        if k < 2 {
            return Err(TreeError::BadSeedParameter("path"));
        }
        Self::from_edges(&(1..k).map(|v| (v - 1, v)).collect::<Vec<_>>())
    }

    /// Validate an edge list. The vertex set is `0..=max index` (a single
    /// vertex when the list is empty).
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if edges.is_empty() {
            return Ok(Self::single_vertex());
        }
        let size = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 1;
        if size > NO_PARENT as usize {
            return Err(TreeError::NotATree("too many vertices".into()));
        }
        if edges.len() != size - 1 {
            return Err(TreeError::NotATree(format!(
                "{} edges on {} vertices",
                edges.len(),
                size
            )));
        }
        let mut adj = vec![Vec::new(); size];
        for &(a, b) in edges {
            if a == b {
                return Err(TreeError::NotATree(format!("self-loop at {a}")));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        let mut parent = vec![NO_PARENT; size];
        let mut seen = vec![false; size];
        let mut order = Vec::with_capacity(size);
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &adj[v as usize] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    parent[u as usize] = v;
                    queue.push_back(u);
                }
            }
        }
        if order.len() != size {
            return Err(TreeError::NotATree(format!(
                "disconnected: {} of {} vertices reachable from 0",
                order.len(),
                size
            )));
        }
        Ok(SeedTree {
            size,
            edges: edges.iter().map(|&(a, b)| (a as u32, b as u32)).collect(),
            parent,
            order,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + Clone + '_ {
        self.edges.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.size];
        for (a, b) in self.edges() {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn is_pair(&self) -> bool {
        self.size == 2
    }
}

/// Build the seed described by `spec`.
pub fn make_seed(spec: &SeedSpec) -> Result<SeedTree, TreeError> {
    match spec {
        SeedSpec::S2 => Ok(SeedTree::pair()),
        SeedSpec::Star(k) => SeedTree::star(*k),
        SeedSpec::Path(k) => SeedTree::path(*k),
        SeedSpec::Edges(edges) => SeedTree::from_edges(edges),
    }
}

/// An immutable tree grown from a seed by repeated single-vertex attachment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowingTree {
    rule: GrowthRule,
    seed: SeedTree,
    /// Parent when rooted at vertex 0. For `v >= seed_size` this is the
    /// attachment target; seed entries come from the seed's BFS rooting.
    parent: Vec<u32>,
    degree: Vec<u32>,
}

impl GrowingTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn seed(&self) -> &SeedTree {
        &self.seed
    }

    pub fn seed_size(&self) -> usize {
        self.seed.size
    }

    pub fn rule(&self) -> GrowthRule {
        self.rule
    }

    /// The vertex that `v` attached to, for non-seed vertices.
    pub fn attachment(&self, v: usize) -> Option<usize> {
        (v >= self.seed.size && v < self.n()).then(|| self.parent[v] as usize)
    }

    /// Parent of `v` in the rooting at vertex 0.
    pub fn rooted_parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    pub(crate) fn raw_parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.degree.iter().map(|&d| d as usize)
    }

    /// All `n - 1` edges: seed edges as stored, then `(v, attachment(v))`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + Clone + '_ {
        self.seed
            .edges()
            .chain((self.seed.size..self.n()).map(move |v| (v, self.parent[v] as usize)))
    }

    /// Vertices ordered so that every vertex comes after its rooted parent.
    pub fn topological_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.seed
            .order
            .iter()
            .map(|&v| v as usize)
            .chain(self.seed.size..self.n())
    }

    /// Size at which `v` joined the tree; every seed vertex reports the seed size.
    pub fn timestamp(&self, v: usize) -> usize {
        debug_assert!(v < self.n());
        (v + 1).max(self.seed.size)
    }

    /// The tree as it was when it had `m` vertices.
    pub fn prefix(&self, m: usize) -> Result<GrowingTree, TreeError> {
        if m < self.seed.size || m > self.n() {
            return Err(TreeError::InvalidSize {
                n: m,
                seed_size: self.seed.size,
            });
        }
        let mut degree = self.degree[..m].to_vec();
        for v in m..self.n() {
            let p = self.parent[v] as usize;
            if p < m {
                degree[p] -= 1;
            }
        }
        Ok(GrowingTree {
            rule: self.rule,
            seed: self.seed.clone(),
            parent: self.parent[..m].to_vec(),
            degree,
        })
    }

    /// Continue growing this tree to `n` vertices.
    pub fn extend<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<GrowingTree, TreeError> {
        let mut state = Grower::resume(self);
        state.advance_to(n, rng)?;
        Ok(state.finish())
    }

    /// Compressed adjacency lists.
    pub fn adjacency(&self) -> Adjacency {
        Adjacency::build(self.n(), self.edges())
    }
}

/// CSR adjacency of a tree.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn build(n: usize, edges: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0u32; n + 1];
        for (a, b) in edges.clone() {
            offsets[a + 1] += 1;
            offsets[b + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n] as usize];
        for (a, b) in edges {
            targets[fill[a] as usize] = b as u32;
            fill[a] += 1;
            targets[fill[b] as usize] = a as u32;
            fill[b] += 1;
        }
        Adjacency { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

/// Mutable growth state; cloning it forks a history.
#[derive(Clone)]
struct Grower {
    rule: GrowthRule,
    seed: SeedTree,
    parent: Vec<u32>,
    degree: Vec<u32>,
    /// Both endpoints of every edge; a uniform draw is degree-proportional.
    endpoints: Vec<u32>,
}

impl Grower {
    fn new(seed: &SeedTree, rule: GrowthRule) -> Result<Self, TreeError> {
        if rule == GrowthRule::Preferential && seed.size < 2 {
            return Err(TreeError::SeedTooSmall);
        }
        let mut degree = vec![0u32; seed.size];
        let mut endpoints = Vec::new();
        for &(a, b) in &seed.edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
            if rule == GrowthRule::Preferential {
                endpoints.push(a);
                endpoints.push(b);
            }
        }
        Ok(Grower {
            rule,
            seed: seed.clone(),
            parent: seed.parent.clone(),
            degree,
            endpoints,
        })
    }

    fn resume(tree: &GrowingTree) -> Self {
        let endpoints = match tree.rule {
            GrowthRule::Uniform => Vec::new(),
            GrowthRule::Preferential => tree
                .edges()
                .flat_map(|(a, b)| [a as u32, b as u32])
                .collect(),
        };
        Grower {
            rule: tree.rule,
            seed: tree.seed.clone(),
            parent: tree.parent.clone(),
            degree: tree.degree.clone(),
            endpoints,
        }
    }

    fn advance_to<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<(), TreeError> {
        let current = self.parent.len();
        if n < current {
            return Err(TreeError::InvalidSize {
                n,
                seed_size: current,
            });
        }
        if n >= NO_PARENT as usize {
            return Err(TreeError::InvalidSize {
                n,
                seed_size: current,
            });
        }
        self.parent.reserve(n - current);
        self.degree.reserve(n - current);
        if self.rule == GrowthRule::Preferential {
            self.endpoints.reserve(2 * (n - current));
        }
        for v in current..n {
            let target = match self.rule {
                GrowthRule::Uniform => rng.random_range(0..v as u32),
                GrowthRule::Preferential => {
                    let i = rng.random_range(0..self.endpoints.len());
                    let t = self.endpoints[i];
                    self.endpoints.push(t);
                    self.endpoints.push(v as u32);
                    t
                }
            };
            self.parent.push(target);
            self.degree[target as usize] += 1;
            self.degree.push(1);
        }
        Ok(())
    }

    fn finish(self) -> GrowingTree {
        GrowingTree {
            rule: self.rule,
            seed: self.seed,
            parent: self.parent,
            degree: self.degree,
        }
    }
}

/// Grow `seed` to `n` vertices using an explicit generator.
pub fn grow_with<R: Rng + ?Sized>(
    seed: &SeedTree,
    rule: GrowthRule,
    n: usize,
    rng: &mut R,
) -> Result<GrowingTree, TreeError> {
    if n < seed.size {
        return Err(TreeError::InvalidSize {
            n,
            seed_size: seed.size,
        });
    }
    let mut g = Grower::new(seed, rule)?;
    g.advance_to(n, rng)?;
    Ok(g.finish())
}

/// Grow `seed` to `n` vertices using the stream `rng`.
pub fn grow(
    seed: &SeedTree,
    rule: GrowthRule,
    n: usize,
    rng: &RngSpec,
) -> Result<GrowingTree, TreeError> {
    grow_with(seed, rule, n, &mut rng.rng())
}

/// Two trees that coincide up to `t_star` vertices and grow independently after.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatedPair {
    pub first: GrowingTree,
    pub second: GrowingTree,
    t_star: usize,
}

impl CorrelatedPair {
    /// Pair two existing trees, checking that they share their first `t_star` vertices.
    pub fn from_trees(
        first: GrowingTree,
        second: GrowingTree,
        t_star: usize,
    ) -> Result<Self, TreeError> {
        let n = first.n();
        let s = first.seed_size();
        if second.n() != n {
            return Err(TreeError::Parse(format!(
                "pair sizes differ: {} vs {}",
                n,
                second.n()
            )));
        }
        if t_star < s || t_star > n {
            return Err(TreeError::InvalidTStar {
                t_star,
                seed_size: s,
                n,
            });
        }
        if first.seed != second.seed
            || first.rule != second.rule
            || first.parent[..t_star] != second.parent[..t_star]
        {
            return Err(TreeError::Parse(format!(
                "trees do not share their first {t_star} vertices"
            )));
        }
        Ok(CorrelatedPair {
            first,
            second,
            t_star,
        })
    }

    pub fn t_star(&self) -> usize {
        self.t_star
    }

    pub fn seed_size(&self) -> usize {
        self.first.seed_size()
    }

    pub fn n(&self) -> usize {
        self.first.n()
    }
}

/// Sample from the correlated model: shared growth to `t_star` on substream 0,
/// then independent growth on substreams 1 and 2.
pub fn grow_correlated(
    seed: &SeedTree,
    rule: GrowthRule,
    n: usize,
    t_star: usize,
    rng: &RngSpec,
) -> Result<CorrelatedPair, TreeError> {
    if t_star < seed.size || t_star > n {
        return Err(TreeError::InvalidTStar {
            t_star,
            seed_size: seed.size,
            n,
        });
    }
    let mut shared = Grower::new(seed, rule)?;
    shared.advance_to(t_star, &mut rng.substream(0).rng())?;
    let mut other = shared.clone();
    shared.advance_to(n, &mut rng.substream(1).rng())?;
    other.advance_to(n, &mut rng.substream(2).rng())?;
    Ok(CorrelatedPair {
        first: shared.finish(),
        second: other.finish(),
        t_star,
    })
}

/// Line-based text form: `n seed_size rule`, then seed edges `a-b`, then the
/// attachment targets of vertices `seed_size..n`.
impl fmt::Display for GrowingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.n(), self.seed.size, self.rule)?;
        let mut first = true;
        for (a, b) in self.seed.edges() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{a}-{b}")?;
        }
        f.write_str("\n")?;
        for v in self.seed.size..self.n() {
            if v > self.seed.size {
                f.write_str(" ")?;
            }
            write!(f, "{}", self.parent[v])?;
        }
        f.write_str("\n")
    }
}

impl FromStr for GrowingTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines();
        let header = lines
            .next()
            .ok_or_else(|| TreeError::Parse("empty tree file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [n, seed_size, rule] = fields[..] else {
            return Err(TreeError::Parse(format!("line 1: bad header `{header}`")));
        };
        let n: usize = n
            .parse()
            .map_err(|e| TreeError::Parse(format!("line 1: n: {e}")))?;
        let seed_size: usize = seed_size
            .parse()
            .map_err(|e| TreeError::Parse(format!("line 1: seed_size: {e}")))?;
        let rule: GrowthRule = rule.parse()?;

        let edges = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(parse_edge)
            .collect::<Result<Vec<_>, _>>()?;
        let seed = SeedTree::from_edges(&edges)?;
        if seed.size != seed_size {
            return Err(TreeError::Parse(format!(
                "line 2: seed has {} vertices, header says {seed_size}",
                seed.size
            )));
        }
        let parents = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|e| TreeError::Parse(format!("line 3: `{tok}`: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if n < seed_size || parents.len() != n - seed_size {
            return Err(TreeError::Parse(format!(
                "line 3: expected {} parents, found {}",
                n.saturating_sub(seed_size),
                parents.len()
            )));
        }
        let mut g = Grower::new(&seed, rule)?;
        for (i, &p) in parents.iter().enumerate() {
            let v = seed_size + i;
            if p as usize >= v {
                return Err(TreeError::Parse(format!(
                    "line 3: parent {p} of vertex {v} is not earlier"
                )));
            }
            g.parent.push(p);
            g.degree[p as usize] += 1;
            g.degree.push(1);
        }
        Ok(g.finish())
    }
}
