//! The `N`-percolation picture of the epidemic.
//!
//! Vertices are `(site, particle)` pairs; every pair of vertices whose sites
//! are equal or adjacent is joined by an edge that is open with probability
//! `p = (1 + theta) / (5 N)`. Started from a set `A` of vertices, the number
//! of vertices at graph distance `n` from `A` at each site has the law of
//! `I_n`, and the number at distance at most `n - 1` that of `R_n`.
//!
//! Edges are sampled lazily: each canonical edge id is hashed through the
//! counter-based generator, so repeated queries always agree.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::det::InitialCondition;
use crate::error::{domain, Result};
use crate::field::{CountField, Window};
use crate::params::ModelParams;
use crate::rng::StreamKey;
use crate::stoch::SimState;

/// A vertex `(x, y, particle)`, particles numbered from 0.
pub type Vertex = (i64, i64, u32);

/// Canonical edge id: the lower endpoint, the direction to the other
/// endpoint and its particle index. Direction 0 joins particles of one site,
/// 1 and 2 point to `+x` and `+y`; 3 and 4 are the directed versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    pub x: i64,
    pub y: i64,
    pub i: u32,
    pub dir: u8,
    pub j: u32,
}

impl EdgeKey {
    /// Undirected edge between two vertices on equal or adjacent sites.
    pub fn undirected(a: Vertex, b: Vertex) -> Option<Self> {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let key = |lo: Vertex, dir: u8, hi: Vertex| Self { x: lo.0, y: lo.1, i: lo.2, dir, j: hi.2 };
        match (dx, dy) {
            (0, 0) if a.2 != b.2 => {
                let (lo, hi) = if a.2 < b.2 { (a, b) } else { (b, a) };
                Some(key(lo, 0, hi))
            }
            (1, 0) => Some(key(a, 1, b)),
            (-1, 0) => Some(key(b, 1, a)),
            (0, 1) => Some(key(a, 2, b)),
            (0, -1) => Some(key(b, 2, a)),
            _ => None,
        }
    }

    /// Directed edge from `a` to `b = a + e_1` or `a + e_2`.
    pub fn directed(a: Vertex, b: Vertex) -> Option<Self> {
        match (b.0 - a.0, b.1 - a.1) {
            (1, 0) => Some(Self { x: a.0, y: a.1, i: a.2, dir: 3, j: b.2 }),
            (0, 1) => Some(Self { x: a.0, y: a.1, i: a.2, dir: 4, j: b.2 }),
            _ => None,
        }
    }
}

/// Open/closed state of every edge.
pub trait EdgeOracle {
    fn is_open(&self, edge: EdgeKey) -> bool;
}

/// Independent edges, open with probability `p`, decided by hashing the id.
#[derive(Debug, Clone, Copy)]
pub struct RandomEdges {
    key: StreamKey,
    p: f64,
}

impl RandomEdges {
    pub fn new(params: &ModelParams, seed: u64, replicate: u64) -> Self {
        Self { key: StreamKey::new(seed, replicate), p: params.p_edge() }
    }
}

impl EdgeOracle for RandomEdges {
    fn is_open(&self, e: EdgeKey) -> bool {
        let block = self.key.block([e.x as u32, e.y as u32, e.i, (e.j << 3) | u32::from(e.dir)]);
        let bits = (u64::from(block[1]) << 32 | u64::from(block[0])) >> 11;
        (bits as f64) * (1.0 / (1u64 << 53) as f64) < self.p
    }
}

/// Every edge open or every edge closed.
#[derive(Debug, Clone, Copy)]
pub struct ConstantEdges(pub bool);

impl EdgeOracle for ConstantEdges {
    fn is_open(&self, _: EdgeKey) -> bool {
        self.0
    }
}

/// An explicit set of open edges.
#[derive(Debug, Clone, Default)]
pub struct ListedEdges(pub HashSet<EdgeKey>);

impl EdgeOracle for ListedEdges {
    fn is_open(&self, e: EdgeKey) -> bool {
        self.0.contains(&e)
    }
}

/// The percolation graph restricted to `domain x {0..N-1}`.
#[derive(Debug, Clone)]
pub struct PercolationSample<O> {
    pub domain: Window,
    pub n: u32,
    pub oracle: O,
}

impl<O: EdgeOracle> PercolationSample<O> {
    pub fn new(domain: Window, n: u32, oracle: O) -> Self {
        Self { domain, n, oracle }
    }

    fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.domain.index(v.0, v.1).map(|s| s * self.n as usize + v.2 as usize)
    }

    /// All undirected edges of the graph, in canonical order.
    pub fn edges(&self) -> Vec<EdgeKey> {
        let mut out = Vec::new();
        for (x, y) in self.domain.sites() {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    out.push(EdgeKey { x, y, i, dir: 0, j });
                }
                for (dir, (dx, dy)) in [(1u8, (1, 0)), (2, (0, 1))] {
                    if self.domain.contains(x + dx, y + dy) {
                        for j in 0..self.n {
                            out.push(EdgeKey { x, y, i, dir, j });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Per-site level counts from a breadth-first search.
#[derive(Debug, Clone, PartialEq)]
pub struct Levels {
    /// `infected[n](x)`: vertices at `x` at distance exactly `n`.
    pub infected: Vec<CountField>,
    /// `recovered[n](x)`: vertices at `x` at distance at most `n - 1`.
    pub recovered: Vec<CountField>,
    /// Vertices at `x` connected to the source set.
    pub connected: CountField,
}

impl Levels {
    /// The levels as SIR slices, ending with the first empty level.
    pub fn slices(&self) -> Vec<SimState> {
        self.infected
            .iter()
            .zip(&self.recovered)
            .enumerate()
            .map(|(t, (i, r))| SimState { t, infected: i.clone(), recovered: r.clone() })
            .collect()
    }
}

/// Breadth-first layering from `sources`.
pub fn bfs_levels<O: EdgeOracle>(
    sample: &PercolationSample<O>,
    sources: &[Vertex],
) -> Result<Levels> {
    if sources.is_empty() {
        return domain("the source set is empty");
    }
    let nv = sample.domain.len() * sample.n as usize;
    let mut dist = vec![u32::MAX; nv];
    let mut queue = VecDeque::new();
    for &v in sources {
        let Some(k) = sample.vertex_index(v).filter(|_| v.2 < sample.n) else {
            return domain(format!("source {v:?} is not a vertex of the sample"));
        };
        if dist[k] == u32::MAX {
            dist[k] = 0;
            queue.push_back(v);
        }
    }
    let mut max_level = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[sample.vertex_index(u).unwrap()];
        for (dx, dy) in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (x, y) = (u.0 + dx, u.1 + dy);
            if !sample.domain.contains(x, y) {
                continue;
            }
            for j in 0..sample.n {
                let w = (x, y, j);
                let k = sample.vertex_index(w).unwrap();
                if dist[k] != u32::MAX {
                    continue;
                }
                let Some(edge) = EdgeKey::undirected(u, w) else { continue };
                if sample.oracle.is_open(edge) {
                    dist[k] = du + 1;
                    max_level = max_level.max(du + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    let levels = max_level as usize + 2;
    let mut infected = vec![CountField::zeros(sample.domain); levels];
    let mut connected = CountField::zeros(sample.domain);
    for (k, &d) in dist.iter().enumerate() {
        if d == u32::MAX {
            continue;
        }
        let site = k / sample.n as usize;
        infected[d as usize].values_mut()[site] += 1;
        connected.values_mut()[site] += 1;
    }
    let mut recovered = Vec::with_capacity(levels);
    let mut acc = CountField::zeros(sample.domain);
    for level in &infected {
        recovered.push(acc.clone());
        for (a, b) in acc.values_mut().iter_mut().zip(level.values()) {
            *a += b;
        }
    }
    Ok(Levels { infected, recovered, connected })
}

/// Source set with the lowest-numbered particles infected at each site.
pub fn sources_for(ic: &InitialCondition, n: u32) -> Result<Vec<Vertex>> {
    let counts = ic.count_field(n)?;
    Ok(counts.iter().flat_map(|(x, y, c)| (0..c).map(move |i| (x, y, i))).collect())
}

/// SIR slices read off the percolation levels.
pub fn sir_from_percolation<O: EdgeOracle>(
    sample: &PercolationSample<O>,
    ic: &InitialCondition,
) -> Result<Vec<SimState>> {
    let sources = sources_for(ic, sample.n)?;
    Ok(bfs_levels(sample, &sources)?.slices())
}

/// Number of vertices at each site reachable from a source set on `x + y = 0`
/// through open edges directed up or right.
pub fn oriented_frontier<O: EdgeOracle>(
    sample: &PercolationSample<O>,
    ic: &InitialCondition,
) -> Result<CountField> {
    let counts = ic.count_field(sample.n)?;
    if counts.iter().any(|(x, y, c)| c > 0 && x + y != 0) {
        return domain("oriented sources must lie on the antidiagonal x + y = 0");
    }
    let mut reached = CountField::zeros(sample.domain);
    let mut seen: HashSet<Vertex> = HashSet::new();
    let mut stack: Vec<Vertex> = Vec::new();
    for (x, y, c) in counts.iter() {
        for i in 0..c.min(sample.n) {
            if sample.domain.contains(x, y) && seen.insert((x, y, i)) {
                stack.push((x, y, i));
            }
        }
    }
    while let Some(u) = stack.pop() {
        for (dx, dy) in [(1, 0), (0, 1)] {
            let (x, y) = (u.0 + dx, u.1 + dy);
            if !sample.domain.contains(x, y) {
                continue;
            }
            for j in 0..sample.n {
                let w = (x, y, j);
                if seen.contains(&w) {
                    continue;
                }
                let edge = EdgeKey::directed(u, w).expect("adjacent");
                if sample.oracle.is_open(edge) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
    }
    for &(x, y, _) in &seen {
        let v = reached.get(x, y);
        reached.set(x, y, v + 1);
    }
    Ok(reached)
}

/// A realization summarized by its infected counts per generation, up to
/// and including the first empty generation.
pub type Trajectory = Vec<Vec<u32>>;

/// Exact law of the trajectory on a finite box by enumerating every edge
/// configuration. Limited to 20 edges.
pub fn exact_percolation_law(
    domain_box: Window,
    n: u32,
    p: f64,
    ic: &InitialCondition,
) -> Result<HashMap<Trajectory, f64>> {
    let edges = PercolationSample::new(domain_box, n, ConstantEdges(false)).edges();
    if edges.len() > 20 {
        return domain(format!("{} edges is too many to enumerate", edges.len()));
    }
    let sources = sources_for(ic, n)?;
    let mut law = HashMap::new();
    for mask in 0u32..(1 << edges.len()) {
        let open: HashSet<EdgeKey> =
            edges.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| *e).collect();
        let k = open.len() as i32;
        let weight = p.powi(k) * (1.0 - p).powi(edges.len() as i32 - k);
        let sample = PercolationSample::new(domain_box, n, ListedEdges(open));
        let levels = bfs_levels(&sample, &sources)?;
        let traj: Trajectory = levels.infected.iter().map(|f| f.values().to_vec()).collect();
        *law.entry(traj).or_insert(0.0) += weight;
    }
    Ok(law)
}

/// Exact law of the SIR trajectory on a finite box, by enumerating the
/// binomial outcomes of every generation.
pub fn exact_sir_law(
    params: &ModelParams,
    domain_box: Window,
    ic: &InitialCondition,
) -> Result<HashMap<Trajectory, f64>> {
    let n = params.village_size();
    let start = ic.count_field(n)?.resized(domain_box);
    let mut law = HashMap::new();
    let inf = start.values().to_vec();
    let rec = vec![0; inf.len()];
    let mut budget = 5_000_000usize;
    expand(params, &domain_box, vec![inf.clone()], inf, rec, 1.0, &mut law, &mut budget)?;
    Ok(law)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    params: &ModelParams,
    w: &Window,
    history: Trajectory,
    inf: Vec<u32>,
    rec: Vec<u32>,
    prob: f64,
    law: &mut HashMap<Trajectory, f64>,
    budget: &mut usize,
) -> Result<()> {
    if *budget == 0 {
        return domain("exact SIR enumeration exceeds its budget");
    }
    *budget -= 1;
    if inf.iter().all(|&v| v == 0) {
        *law.entry(history).or_insert(0.0) += prob;
        return Ok(());
    }
    let n = params.village_size();
    // per-site outcome distributions
    let mut options: Vec<Vec<(u32, f64)>> = Vec::with_capacity(inf.len());
    for (k, (x, y)) in w.sites().enumerate() {
        let pressure: u64 = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .filter_map(|(dx, dy)| w.index(x + dx, y + dy))
            .map(|nk| u64::from(inf[nk]))
            .sum();
        let s = n - inf[k] - rec[k];
        let q = params.infection_probability(pressure);
        if s == 0 || q == 0.0 {
            options.push(vec![(0, 1.0)]);
            continue;
        }
        let law_k = (0..=s)
            .map(|j| {
                let c = crate::paths::binomial(u64::from(s), i64::from(j));
                let c = num_traits::ToPrimitive::to_f64(&c).unwrap_or(f64::INFINITY);
                (j, c * q.powi(j as i32) * (1.0 - q).powi((s - j) as i32))
            })
            .collect();
        options.push(law_k);
    }
    let next_rec: Vec<u32> = rec.iter().zip(&inf).map(|(r, i)| r + i).collect();
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut p = prob;
        let mut next = Vec::with_capacity(options.len());
        for (o, &c) in options.iter().zip(&choice) {
            p *= o[c].1;
            next.push(o[c].0);
        }
        if p > 0.0 {
            let mut h = history.clone();
            h.push(next.clone());
            expand(params, w, h, next, next_rec.clone(), p, law, budget)?;
        }
        // odometer over the per-site choices
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(());
            }
            choice[pos] += 1;
            if choice[pos] < options[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
