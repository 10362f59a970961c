//! Undirected geodesics: `t(x, y)`, the minimal hop count of a geodesic and
//! the lexicographically first minimal-hop geodesic.
//!
//! The search runs Dijkstra on the key `(time, hops)`. Every path that is
//! optimal for that key has optimal prefixes, so the optimal paths are
//! exactly the source-to-target paths in the DAG of tight edges
//! `key(u) + (w, 1) = key(v)`. The first one in vertex order is obtained by
//! marking the DAG vertices that reach the target and walking forward from
//! the source, always stepping to the smallest marked tight neighbour.

use std::collections::VecDeque;

use serde::Serialize;

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::lattice::{self_avoiding_paths, BoxLattice, LatticePath, Point};
use crate::queue::{BucketFrontier, Frontier, HeapFrontier};
use crate::weight::Weight;

/// Largest edge weight (in ticks) for which the bucket queue is chosen.
pub const BUCKET_LIMIT: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueueKind {
    BinaryHeap,
    Bucket,
    /// Bucket queue when all finite weights are small integers.
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicResult<W> {
    pub source: Point,
    pub target: Point,
    /// A finite-time path exists inside the box.
    pub reachable: bool,
    pub time: W,
    pub min_hops: usize,
    /// The lexicographically first geodesic with `min_hops` edges.
    pub geodesic: Option<LatticePath>,
    pub touched_boundary: bool,
}

struct Search<W> {
    time: Vec<W>,
    hops: Vec<u32>,
    settled: Vec<bool>,
}

impl<W: Weight> Search<W> {
    #[inline]
    fn tight(&self, u: usize, w: W, v: usize) -> bool {
        self.settled[u] && w.is_finite() && self.hops[u] + 1 == self.hops[v] && self.time[u].plus(w).same(self.time[v])
    }
}

fn pick_queue<W: Weight>(env: &Environment<W>, kind: QueueKind) -> Option<u64> {
    let max_small = || {
        env.edge_weights().filter(|(_, w)| w.is_finite()).try_fold(0u64, |m, (_, w)| w.as_small_int().map(|t| m.max(t)))
    };
    match kind {
        QueueKind::BinaryHeap => None,
        QueueKind::Bucket => Some(max_small().expect("bucket queue needs integer weights")),
        QueueKind::Auto => max_small().filter(|&m| m <= BUCKET_LIMIT),
    }
}

fn run_search<W: Weight>(env: &Environment<W>, source: usize, target: usize, kind: QueueKind) -> Search<W> {
    match pick_queue(env, kind) {
        Some(max_edge) => search_with(env, source, target, BucketFrontier::new(max_edge)),
        None => search_with(env, source, target, HeapFrontier::new()),
    }
}

fn search_with<W: Weight, Q: Frontier<W>>(
    env: &Environment<W>,
    source: usize,
    target: usize,
    mut queue: Q,
) -> Search<W> {
    let lattice = env.lattice();
    let n = lattice.vertex_count();
    let mut s = Search { time: vec![W::INFINITY; n], hops: vec![u32::MAX; n], settled: vec![false; n] };
    s.time[source] = W::ZERO;
    s.hops[source] = 0;
    queue.push(W::ZERO, 0, source as u32);
    while let Some(u) = queue.pop() {
        let u = u as usize;
        if s.settled[u] {
            continue;
        }
        s.settled[u] = true;
        if u == target {
            break;
        }
        let (tu, hu) = (s.time[u], s.hops[u]);
        lattice.for_each_neighbor(u, |v, slot| {
            let w = env.slot(slot);
            if !w.is_finite() || s.settled[v] {
                return;
            }
            let (tv, hv) = (tu.plus(w), hu + 1);
            let better = if tv.same(s.time[v]) { hv < s.hops[v] } else { tv.strictly_less(s.time[v]) };
            if better {
                s.time[v] = tv;
                s.hops[v] = hv;
                queue.push(tv, hv, v as u32);
            }
        });
    }
    s
}

/// `t(source, target)` with its canonical minimal-hop geodesic.
pub fn geodesic_time<W: Weight>(env: &Environment<W>, source: &[i64], target: &[i64]) -> Result<GeodesicResult<W>> {
    geodesic_time_with(env, source, target, QueueKind::Auto)
}

pub fn geodesic_time_with<W: Weight>(
    env: &Environment<W>,
    source: &[i64],
    target: &[i64],
    kind: QueueKind,
) -> Result<GeodesicResult<W>> {
    let lattice = env.lattice();
    let s = lattice.index_of(source).ok_or_else(|| Error::OutsideBox(source.to_vec()))?;
    let t = lattice.index_of(target).ok_or_else(|| Error::OutsideBox(target.to_vec()))?;
    let search = run_search(env, s, t, kind);

    if !search.settled[t] {
        return Ok(GeodesicResult {
            source: source.to_vec(),
            target: target.to_vec(),
            reachable: false,
            time: W::INFINITY,
            min_hops: 0,
            geodesic: None,
            touched_boundary: false,
        });
    }

    // vertices from which the target is reachable along tight edges
    let mut marked = vec![false; lattice.vertex_count()];
    marked[t] = true;
    let mut todo = VecDeque::from([t]);
    while let Some(v) = todo.pop_front() {
        lattice.for_each_neighbor(v, |u, slot| {
            if !marked[u] && search.tight(u, env.slot(slot), v) {
                marked[u] = true;
                todo.push_back(u);
            }
        });
    }

    let mut route = vec![s];
    let mut cur = s;
    while cur != t {
        let mut next = None;
        lattice.for_each_neighbor(cur, |v, slot| {
            if next.is_none() && marked[v] && search.tight(cur, env.slot(slot), v) {
                next = Some(v);
            }
        });
        cur = next.expect("tight DAG reaches the target");
        route.push(cur);
    }

    let touched_boundary = route.iter().any(|&v| lattice.on_boundary(v));
    let path = LatticePath::from_trusted(route.iter().map(|&v| lattice.vertex_at(v)).collect());
    debug_assert_eq!(path.edge_count(), search.hops[t] as usize);
    Ok(GeodesicResult {
        source: source.to_vec(),
        target: target.to_vec(),
        reachable: true,
        time: search.time[t],
        min_hops: search.hops[t] as usize,
        geodesic: Some(path),
        touched_boundary,
    })
}

/// Whether a finite-time path joins the two vertices inside the box.
pub fn reachability<W: Weight>(env: &Environment<W>, source: &[i64], target: &[i64]) -> Result<bool> {
    let lattice = env.lattice();
    let s = lattice.index_of(source).ok_or_else(|| Error::OutsideBox(source.to_vec()))?;
    let t = lattice.index_of(target).ok_or_else(|| Error::OutsideBox(target.to_vec()))?;
    let mut seen = vec![false; lattice.vertex_count()];
    seen[s] = true;
    let mut todo = vec![s];
    while let Some(u) = todo.pop() {
        if u == t {
            return Ok(true);
        }
        lattice.for_each_neighbor(u, |v, slot| {
            if !seen[v] && env.slot(slot).is_finite() {
                seen[v] = true;
                todo.push(v);
            }
        });
    }
    Ok(false)
}

/// All geodesics with the minimal number of edges, found by exhaustive
/// self-avoiding path enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct MinHopGeodesics<W> {
    pub time: W,
    pub min_hops: usize,
    /// Sorted in vertex order; empty when the target is unreachable.
    pub paths: Vec<LatticePath>,
}

/// Brute-force counterpart of [`geodesic_time`] for boxes with at most
/// `max_vertices` vertices.
pub fn geodesic_time_all_minhops<W: Weight>(
    env: &Environment<W>,
    source: &[i64],
    target: &[i64],
    max_vertices: usize,
) -> Result<MinHopGeodesics<W>> {
    let lattice = env.lattice();
    if lattice.vertex_count() > max_vertices {
        return Err(Error::OracleLimit(format!(
            "box has {} vertices, limit is {max_vertices}",
            lattice.vertex_count()
        )));
    }
    let s = lattice.index_of(source).ok_or_else(|| Error::OutsideBox(source.to_vec()))?;
    let t = lattice.index_of(target).ok_or_else(|| Error::OutsideBox(target.to_vec()))?;

    let found: Vec<(W, Vec<usize>)> = self_avoiding_paths(lattice, s, t, usize::MAX)?
        .into_iter()
        .map(|p| (p.windows(2).fold(W::ZERO, |acc, w| acc.plus(env.slot(edge_slot(lattice, w[0], w[1])))), p))
        .filter(|(w, _)| w.is_finite())
        .collect();

    let Some(best) = found.iter().map(|(w, _)| *w).reduce(|a, b| if b.strictly_less(a) { b } else { a }) else {
        return Ok(MinHopGeodesics { time: W::INFINITY, min_hops: 0, paths: vec![] });
    };
    let optimal: Vec<&Vec<usize>> = found.iter().filter(|(w, _)| w.same(best)).map(|(_, p)| p).collect();
    let min_hops = optimal.iter().map(|p| p.len() - 1).min().expect("nonempty");
    let mut paths: Vec<LatticePath> = optimal
        .into_iter()
        .filter(|p| p.len() - 1 == min_hops)
        .map(|p| LatticePath::from_trusted(p.iter().map(|&v| lattice.vertex_at(v)).collect()))
        .collect();
    paths.sort();
    Ok(MinHopGeodesics { time: best, min_hops, paths })
}

fn edge_slot(lattice: &BoxLattice, a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let axis = (0..lattice.dim()).find(|&j| lattice.stride(j) == hi - lo).expect("adjacent vertices");
    lo * lattice.dim() + axis
}
