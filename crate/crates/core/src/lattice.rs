//! Finite boxes of Z^d, edges, and lattice paths.
//!
//! Vertices are addressed by a row-major linear index (last coordinate
//! fastest), so comparing two vertices by index is the same as comparing
//! their coordinate vectors lexicographically. The edge `{z, z + e_j}` lives
//! in slot `index(z) * d + j`; slots whose upper endpoint falls outside the
//! box are holes and never carry a usable weight.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer point of Z^d.
pub type Point = Vec<i64>;

/// The vertex `z` with `x - z` in `[0,1)^d` componentwise.
pub fn floor_map(x: &[f64]) -> Point {
    x.iter().map(|c| c.floor() as i64).collect()
}

pub fn l1_norm(x: &[i64]) -> i64 {
    x.iter().map(|c| c.abs()).sum()
}

pub fn l1_distance(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum()
}

/// Nearest-neighbour edge `{base, base + e_axis}` of Z^d, stored with its
/// lower endpoint so that each undirected edge has one representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub base: Point,
    pub axis: usize,
}

impl Edge {
    pub fn new(base: Point, axis: usize) -> Self {
        Edge { base, axis }
    }

    /// The edge joining two L1-adjacent points, if they are adjacent.
    pub fn between(a: &[i64], b: &[i64]) -> Option<Edge> {
        if a.len() != b.len() {
            return None;
        }
        let mut axis = None;
        for (j, (p, q)) in a.iter().zip(b).enumerate() {
            match (q - p).abs() {
                0 => {}
                1 if axis.is_none() => axis = Some(j),
                _ => return None,
            }
        }
        let axis = axis?;
        let base = if a[axis] < b[axis] { a.to_vec() } else { b.to_vec() };
        Some(Edge { base, axis })
    }

    pub fn upper(&self) -> Point {
        let mut p = self.base.clone();
        p[self.axis] += 1;
        p
    }

    pub fn translate(&self, by: &[i64]) -> Edge {
        Edge { base: self.base.iter().zip(by).map(|(a, b)| a + b).collect(), axis: self.axis }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+e{}", self.base, self.axis + 1)
    }
}

/// The box `{z : lo <= z <= hi}` of Z^d with its nearest-neighbour edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BoxBounds", into = "BoxBounds")]
pub struct BoxLattice {
    lo: Point,
    hi: Point,
    extent: Vec<usize>,
    stride: Vec<usize>,
    vertex_count: usize,
}

#[derive(Serialize, Deserialize)]
struct BoxBounds {
    lo: Point,
    hi: Point,
}

impl TryFrom<BoxBounds> for BoxLattice {
    type Error = Error;
    fn try_from(b: BoxBounds) -> Result<Self> {
        BoxLattice::new(b.lo, b.hi)
    }
}

impl From<BoxLattice> for BoxBounds {
    fn from(b: BoxLattice) -> Self {
        BoxBounds { lo: b.lo, hi: b.hi }
    }
}

impl BoxLattice {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        let d = lo.len();
        if d < 2 {
            return Err(Error::InvalidLattice(format!("dimension {d} < 2")));
        }
        if hi.len() != d {
            return Err(Error::InvalidLattice("lo and hi differ in dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidLattice(format!("lo {lo:?} not <= hi {hi:?}")));
        }
        let extent: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut stride = vec![1usize; d];
        for j in (0..d - 1).rev() {
            stride[j] = stride[j + 1]
                .checked_mul(extent[j + 1])
                .ok_or_else(|| Error::InvalidLattice("box too large".into()))?;
        }
        let vertex_count =
            stride[0].checked_mul(extent[0]).ok_or_else(|| Error::InvalidLattice("box too large".into()))?;
        if vertex_count > u32::MAX as usize {
            return Err(Error::InvalidLattice("box too large".into()));
        }
        Ok(BoxLattice { lo, hi, extent, stride, vertex_count })
    }

    /// `[0, side-1]^d`.
    pub fn cube(d: usize, side: i64) -> Result<Self> {
        BoxLattice::new(vec![0; d], vec![side - 1; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Size of the edge slot array, holes included.
    pub fn edge_slots(&self) -> usize {
        self.vertex_count * self.dim()
    }

    /// Number of genuine edges in the box.
    pub fn edge_count(&self) -> usize {
        (0..self.dim())
            .map(|j| {
                let mut n = self.extent[j] - 1;
                for (k, e) in self.extent.iter().enumerate() {
                    if k != j {
                        n *= e;
                    }
                }
                n
            })
            .sum()
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        z.len() == self.dim() && z.iter().zip(&self.lo).zip(&self.hi).all(|((c, l), h)| l <= c && c <= h)
    }

    pub fn index_of(&self, z: &[i64]) -> Option<usize> {
        if !self.contains(z) {
            return None;
        }
        Some(z.iter().zip(&self.lo).zip(&self.stride).map(|((c, l), s)| (c - l) as usize * s).sum())
    }

    pub fn vertex_at(&self, mut idx: usize) -> Point {
        self.lo
            .iter()
            .zip(&self.stride)
            .map(|(l, s)| {
                let c = l + (idx / s) as i64;
                idx %= s;
                c
            })
            .collect()
    }

    /// Offset of `idx` along axis `j`, counted from `lo[j]`.
    #[inline]
    pub fn offset(&self, idx: usize, j: usize) -> usize {
        (idx / self.stride[j]) % self.extent[j]
    }

    #[inline]
    pub fn stride(&self, j: usize) -> usize {
        self.stride[j]
    }

    pub fn extent(&self, j: usize) -> usize {
        self.extent[j]
    }

    pub fn is_edge_slot(&self, slot: usize) -> bool {
        let d = self.dim();
        slot < self.edge_slots() && self.offset(slot / d, slot % d) + 1 < self.extent[slot % d]
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        if e.axis >= self.dim() {
            return None;
        }
        let v = self.index_of(&e.base)?;
        (self.offset(v, e.axis) + 1 < self.extent[e.axis]).then_some(v * self.dim() + e.axis)
    }

    pub fn edge_at(&self, slot: usize) -> Option<Edge> {
        self.is_edge_slot(slot).then(|| Edge::new(self.vertex_at(slot / self.dim()), slot % self.dim()))
    }

    /// Slots of all genuine edges, ascending.
    pub fn edge_slot_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edge_slots()).filter(move |&s| self.is_edge_slot(s))
    }

    /// Calls `f(neighbour, edge_slot)` for every box neighbour of `v`,
    /// in increasing neighbour index order.
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize, usize)) {
        let d = self.dim();
        // -e_j neighbours have smaller index; visit them from largest stride down
        for j in 0..d {
            if self.offset(v, j) > 0 {
                let u = v - self.stride[j];
                f(u, u * d + j);
            }
        }
        for j in (0..d).rev() {
            if self.offset(v, j) + 1 < self.extent[j] {
                f(v + self.stride[j], v * d + j);
            }
        }
    }

    /// True when `v` lies on a face of the box.
    pub fn on_boundary(&self, v: usize) -> bool {
        (0..self.dim()).any(|j| {
            let o = self.offset(v, j);
            o == 0 || o + 1 == self.extent[j]
        })
    }
}

/// Flags reported by [`validate_path`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PathFlags {
    pub adjacent: bool,
    pub self_avoiding: bool,
    pub directed: bool,
}

/// Checks a vertex sequence. Non-adjacent steps are an error.
pub fn validate_path(vertices: &[Point]) -> Result<PathFlags> {
    let first = vertices.first().ok_or_else(|| Error::MalformedPath("empty vertex sequence".into()))?;
    let d = first.len();
    let mut directed = true;
    for (i, w) in vertices.windows(2).enumerate() {
        if w[1].len() != d {
            return Err(Error::MalformedPath(format!("vertex {} has dimension {}", i + 1, w[1].len())));
        }
        if l1_distance(&w[0], &w[1]) != 1 {
            return Err(Error::MalformedPath(format!("step {i} from {:?} to {:?} is not a unit step", w[0], w[1])));
        }
        if w[0].iter().zip(&w[1]).any(|(a, b)| b < a) {
            directed = false;
        }
    }
    let mut seen = HashSet::with_capacity(vertices.len());
    let self_avoiding = vertices.iter().all(|v| seen.insert(v));
    Ok(PathFlags { adjacent: true, self_avoiding, directed })
}

/// A nearest-neighbour path `(x_0, ..., x_k)`; always nonempty and adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct LatticePath {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for LatticePath {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        LatticePath::new(v)
    }
}

impl From<LatticePath> for Vec<Point> {
    fn from(p: LatticePath) -> Self {
        p.vertices
    }
}

impl LatticePath {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        validate_path(&vertices)?;
        Ok(LatticePath { vertices })
    }

    pub fn single(v: Point) -> Self {
        LatticePath { vertices: vec![v] }
    }

    /// Walks from `start` along the given signed unit steps (`+j` / `-j`,
    /// 1-based axis numbers).
    pub fn from_steps(start: Point, steps: &[i32]) -> Result<Self> {
        let mut vertices = Vec::with_capacity(steps.len() + 1);
        let mut cur = start;
        vertices.push(cur.clone());
        for &s in steps {
            let axis = s.unsigned_abs() as usize;
            if axis == 0 || axis > cur.len() {
                return Err(Error::MalformedPath(format!("bad step {s}")));
            }
            cur[axis - 1] += s.signum() as i64;
            vertices.push(cur.clone());
        }
        Ok(LatticePath { vertices })
    }

    pub(crate) fn from_trusted(vertices: Vec<Point>) -> Self {
        debug_assert!(validate_path(&vertices).is_ok());
        LatticePath { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn start(&self) -> &[i64] {
        &self.vertices[0]
    }

    pub fn end(&self) -> &[i64] {
        self.vertices.last().expect("nonempty")
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// `|pi|_e`.
    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).map(|w| Edge::between(&w[0], &w[1]).expect("validated"))
    }

    pub fn flags(&self) -> PathFlags {
        validate_path(&self.vertices).expect("validated")
    }

    pub fn is_self_avoiding(&self) -> bool {
        self.flags().self_avoiding
    }

    pub fn is_directed(&self) -> bool {
        self.flags().directed
    }

    /// Number of edges taken in each coordinate direction.
    pub fn axis_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim()];
        for e in self.edges() {
            counts[e.axis] += 1;
        }
        counts
    }

    pub fn translate(&self, by: &[i64]) -> LatticePath {
        LatticePath { vertices: self.vertices.iter().map(|v| v.iter().zip(by).map(|(a, b)| a + b).collect()).collect() }
    }

    pub fn reversed(&self) -> LatticePath {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        LatticePath { vertices }
    }
}

/// Number of edges of `path` joining the hyperplanes `{z_axis = level}` and
/// `{z_axis = level + 1}`. `axis` is 0-based.
pub fn slab_crossings(path: &LatticePath, axis: usize, level: i64) -> usize {
    path.edges().filter(|e| e.axis == axis && e.base[axis] == level).count()
}

/// Every self-avoiding path from vertex index `from` to `to` inside the box,
/// as index sequences in vertex order. Fails once more than `max_paths`
/// paths have been found.
pub fn self_avoiding_paths(lattice: &BoxLattice, from: usize, to: usize, max_paths: usize) -> Result<Vec<Vec<usize>>> {
    fn rec(
        lattice: &BoxLattice,
        to: usize,
        stack: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        max_paths: usize,
    ) -> Result<()> {
        let u = *stack.last().expect("nonempty");
        if u == to {
            if out.len() == max_paths {
                return Err(Error::OracleLimit(format!("more than {max_paths} self-avoiding paths")));
            }
            out.push(stack.clone());
            return Ok(());
        }
        let mut next = Vec::with_capacity(2 * lattice.dim());
        lattice.for_each_neighbor(u, |v, _| next.push(v));
        for v in next {
            if on_path[v] {
                continue;
            }
            on_path[v] = true;
            stack.push(v);
            let r = rec(lattice, to, stack, on_path, out, max_paths);
            stack.pop();
            on_path[v] = false;
            r?;
        }
        Ok(())
    }
    let mut on_path = vec![false; lattice.vertex_count()];
    on_path[from] = true;
    let mut out = Vec::new();
    rec(lattice, to, &mut vec![from], &mut on_path, &mut out, max_paths)?;
    Ok(out)
}
