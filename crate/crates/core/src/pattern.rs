//! Local detour patterns.
//!
//! A pattern lives on the ladder `Lambda = {0..l} x {0,1} x {0}^{d-2}` with
//! endpoints `u = 0` and `v = l e_1`. The straight path `pi+` runs along the
//! bottom row; the detour `pi++` climbs one step, crosses the top row and
//! comes back down. The band event `G(delta)` makes `pi++` cheap (weights
//! near `a`) and everything else expensive (weights near `b`), so that the
//! detour is the unique optimum inside the ladder although it is two edges
//! longer. The degenerate variant for laws `{a', inf}` uses the unit square
//! with an infinite bottom edge.
//!
//! An occurrence of a pattern along a path is a contiguous piece of the path
//! equal to a translate of `pi++` (in either direction) whose translated
//! ladder carries the event. Occurrences are collected greedily from the
//! start of the path, keeping them vertex-disjoint. Each occurrence crosses
//! one horizontal slab twice, which is what gives
//! `|pi|_e >= |z2 - z1|_1 + N(pi)`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::distribution::DistributionSpec;
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::lattice::{l1_distance, self_avoiding_paths, BoxLattice, Edge, LatticePath, Point};
use crate::weight::Weight;

/// Cap on self-avoiding paths enumerated inside a ladder.
pub const LADDER_PATH_LIMIT: usize = 1_000_000;
/// Largest ladder edge count for which every corner of `G(delta)` is checked.
pub const FULL_CORNER_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternEvent {
    /// `G(delta)`: detour edges in `[a - delta, a + delta]`, all other ladder
    /// edges in `[b - delta, b + delta]`.
    Bands { a: f64, b: f64, delta: f64 },
    /// Detour edges equal to `a_prime`, the edge `{u, v}` infinite.
    Infinite { a_prime: f64 },
}

/// Ladder geometry shared by every pattern of a given length.
#[derive(Clone, Debug)]
struct Ladder {
    ell: usize,
    dim: usize,
    lattice: BoxLattice,
    /// Edges of the ladder, in slot order.
    edges: Vec<Edge>,
    /// All self-avoiding `u -> v` paths, as lists of edge ids.
    paths: Vec<Vec<usize>>,
    detour_id: usize,
    on_detour: Vec<bool>,
}

impl Ladder {
    fn new(ell: usize, dim: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("pattern length must be positive".into()));
        }
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension {dim} < 2")));
        }
        let mut hi = vec![0; dim];
        hi[0] = ell as i64;
        hi[1] = 1;
        let lattice = BoxLattice::new(vec![0; dim], hi)?;
        let slots: Vec<usize> = lattice.edge_slot_iter().collect();
        let edges: Vec<Edge> = slots.iter().map(|&s| lattice.edge_at(s).expect("genuine")).collect();
        let slot_to_edge: HashMap<usize, usize> = slots.iter().enumerate().map(|(i, &s)| (s, i)).collect();

        let u = 0;
        let mut v_pt = vec![0; dim];
        v_pt[0] = ell as i64;
        let v = lattice.index_of(&v_pt).expect("in ladder");
        let as_edges = |p: &[usize]| -> Vec<usize> {
            p.windows(2)
                .map(|w| {
                    let e = Edge::between(&lattice.vertex_at(w[0]), &lattice.vertex_at(w[1])).expect("adjacent");
                    slot_to_edge[&lattice.edge_index(&e).expect("in ladder")]
                })
                .collect()
        };
        let paths: Vec<Vec<usize>> =
            self_avoiding_paths(&lattice, u, v, LADDER_PATH_LIMIT)?.iter().map(|p| as_edges(p)).collect();

        let detour_edges: Vec<usize> =
            detour_path(ell, dim).edges().map(|e| slot_to_edge[&lattice.edge_index(&e).expect("in ladder")]).collect();
        let detour_id = paths.iter().position(|p| *p == detour_edges).expect("detour enumerated");
        let mut on_detour = vec![false; edges.len()];
        for &e in &detour_edges {
            on_detour[e] = true;
        }
        Ok(Ladder { ell, dim, lattice, edges, paths, detour_id, on_detour })
    }

    /// Whether the detour is the strict unique minimizer of passage time
    /// among ladder paths. `values` is indexed like `edges`.
    fn detour_unique_optimum(&self, values: &[f64]) -> bool {
        let time = |p: &[usize]| p.iter().map(|&e| values[e]).sum::<f64>();
        let best = time(&self.paths[self.detour_id]);
        self.paths.iter().enumerate().all(|(i, p)| i == self.detour_id || best < time(p))
    }

    fn worst_corner(&self, a: f64, b: f64, delta: f64) -> Vec<f64> {
        self.on_detour.iter().map(|&on| if on { a + delta } else { b - delta }).collect()
    }
}

/// `pi++` for a ladder of length `ell`.
pub fn detour_path(ell: usize, dim: usize) -> LatticePath {
    let mut steps = vec![2];
    steps.extend(std::iter::repeat(1).take(ell));
    steps.push(-2);
    LatticePath::from_steps(vec![0; dim], &steps).expect("valid")
}

/// `pi+` for a ladder of length `ell`.
pub fn straight_path(ell: usize, dim: usize) -> LatticePath {
    LatticePath::from_steps(vec![0; dim], &vec![1; ell]).expect("valid")
}

/// Edges of the ladder `{0..ell} x {0,1} x {0}^{d-2}`.
pub fn ladder_edges(ell: usize, dim: usize) -> Result<Vec<Edge>> {
    Ok(Ladder::new(ell, dim)?.edges)
}

/// All self-avoiding `u -> v` paths inside the ladder.
pub fn ladder_paths(ell: usize, dim: usize) -> Result<Vec<LatticePath>> {
    let ladder = Ladder::new(ell, dim)?;
    let lattice = &ladder.lattice;
    let mut v = vec![0; dim];
    v[0] = ell as i64;
    let v = lattice.index_of(&v).expect("in ladder");
    Ok(self_avoiding_paths(lattice, 0, v, LADDER_PATH_LIMIT)?
        .into_iter()
        .map(|p| LatticePath::from_trusted(p.iter().map(|&i| lattice.vertex_at(i)).collect()))
        .collect())
}

/// Passage times on ladder edges, keyed by edge relative to `u = 0`.
pub type Assignment = HashMap<Edge, f64>;

#[derive(Clone, Debug)]
pub struct Pattern {
    ladder: Ladder,
    event: PatternEvent,
}

#[derive(Serialize)]
struct PatternRecord<'a> {
    ell: usize,
    dim: usize,
    event: &'a PatternEvent,
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternRecord { ell: self.ell(), dim: self.dim(), event: &self.event }.serialize(s)
    }
}

impl Pattern {
    /// Band pattern. `ell > 2a/(b-a)` is not enforced here; patterns that
    /// violate it simply fail [`Pattern::in_h`] at `delta = 0`.
    pub fn bands(ell: usize, a: f64, b: f64, delta: f64, dim: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b) {
            return Err(Error::InvalidParameter(format!("need 0 <= a < b < inf, got a={a}, b={b}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("band half-width {delta} must be >= 0")));
        }
        Ok(Pattern { ladder: Ladder::new(ell, dim)?, event: PatternEvent::Bands { a, b, delta } })
    }

    /// The unit-square pattern for laws supported on `{a', inf}`.
    pub fn infinite(a_prime: f64, dim: usize) -> Result<Self> {
        if !(a_prime.is_finite() && a_prime >= 0.0) {
            return Err(Error::InvalidParameter(format!("a' = {a_prime} must be finite and >= 0")));
        }
        Ok(Pattern { ladder: Ladder::new(1, dim)?, event: PatternEvent::Infinite { a_prime } })
    }

    /// Default pattern for a law: the unit-square pattern when the law is
    /// `{a', inf}`; otherwise bands at the two smallest support points
    /// `a < b`, the smallest `ell > 2a/(b-a)` and half the largest safe
    /// `delta`. `None` for laws with a single finite support point and no
    /// mass at infinity.
    pub fn for_law(spec: &DistributionSpec, dim: usize, resolution: f64) -> Result<Option<Self>> {
        let pts = spec.finite_support_points();
        if spec.mass_infinite() > 0.0 && pts.len() == 1 && spec.is_exact() {
            return Pattern::infinite(pts[0], dim).map(Some);
        }
        if pts.len() < 2 {
            return Ok(None);
        }
        let (a, b) = (pts[0], pts[1]);
        let ell = minimal_length(a, b);
        let delta = max_safe_delta(ell, a, b, dim, resolution)?;
        Pattern::bands(ell, a, b, delta / 2.0, dim).map(Some)
    }

    pub fn ell(&self) -> usize {
        self.ladder.ell
    }

    pub fn dim(&self) -> usize {
        self.ladder.dim
    }

    pub fn event(&self) -> &PatternEvent {
        &self.event
    }

    pub fn is_infinite_variant(&self) -> bool {
        matches!(self.event, PatternEvent::Infinite { .. })
    }

    /// `u` and `v` of the ladder.
    pub fn endpoints(&self) -> (Point, Point) {
        let mut v = vec![0; self.dim()];
        v[0] = self.ell() as i64;
        (vec![0; self.dim()], v)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.ladder.edges
    }

    pub fn detour(&self) -> LatticePath {
        detour_path(self.ell(), self.dim())
    }

    pub fn straight(&self) -> LatticePath {
        straight_path(self.ell(), self.dim())
    }

    pub fn satisfies_length_condition(&self) -> bool {
        match self.event {
            PatternEvent::Bands { a, b, .. } => self.ell() as f64 > 2.0 * a / (b - a),
            PatternEvent::Infinite { .. } => true,
        }
    }

    fn values(&self, assignment: &Assignment) -> Result<Vec<f64>> {
        if assignment.len() != self.ladder.edges.len() {
            return Err(Error::InvalidParameter(format!(
                "assignment has {} edges, ladder has {}",
                assignment.len(),
                self.ladder.edges.len()
            )));
        }
        self.ladder
            .edges
            .iter()
            .map(|e| assignment.get(e).copied().ok_or_else(|| Error::InvalidParameter(format!("missing edge {e}"))))
            .collect()
    }

    fn event_holds(&self, values: &[f64]) -> bool {
        let on = &self.ladder.on_detour;
        match self.event {
            PatternEvent::Bands { a, b, delta } => values.iter().zip(on).all(|(&t, &detour)| {
                let c = if detour { a } else { b };
                c - delta <= t && t <= c + delta
            }),
            PatternEvent::Infinite { a_prime } => {
                values.iter().zip(on).all(|(&t, &detour)| if detour { t == a_prime } else { t == f64::INFINITY })
            }
        }
    }

    /// Whether the assignment lies in the pattern's event (`G(delta)` for
    /// band patterns).
    pub fn in_g_delta(&self, assignment: &Assignment) -> Result<bool> {
        Ok(self.event_holds(&self.values(assignment)?))
    }

    /// Whether `pi++` is the unique optimal `u -> v` path inside the ladder.
    pub fn in_h(&self, assignment: &Assignment) -> Result<bool> {
        Ok(self.ladder.detour_unique_optimum(&self.values(assignment)?))
    }

    /// The centre of the event: `a` on the detour, `b` elsewhere (`a'` and
    /// infinity for the unit-square variant).
    pub fn centre_assignment(&self) -> Assignment {
        let (on, off) = match self.event {
            PatternEvent::Bands { a, b, .. } => (a, b),
            PatternEvent::Infinite { a_prime } => (a_prime, f64::INFINITY),
        };
        self.ladder
            .edges
            .iter()
            .zip(&self.ladder.on_detour)
            .map(|(e, &d)| (e.clone(), if d { on } else { off }))
            .collect()
    }

    /// Checks every corner of `G(delta)` against `H`; limited to ladders
    /// with at most [`FULL_CORNER_LIMIT`] edges.
    pub fn audit_all_corners(&self) -> Result<bool> {
        let PatternEvent::Bands { a, b, delta } = self.event else {
            return Ok(self.ladder.detour_unique_optimum(&self.values(&self.centre_assignment())?));
        };
        all_corners_in_h(&self.ladder, a, b, delta)
    }

    /// Occurrences of the pattern along `path` in `env`.
    pub fn count_occurrences<W: Weight>(&self, env: &Environment<W>, path: &LatticePath) -> Occurrences {
        let ell = self.ell();
        let len = ell + 2;
        let verts = path.vertices();
        let mut used: HashSet<&[i64]> = HashSet::new();
        let mut found = Vec::new();
        let mut i = 0;
        while i + len < verts.len() {
            let Some(tau) = self.match_detour(&verts[i..=i + len]) else {
                i += 1;
                continue;
            };
            let disjoint = verts[i..=i + len].iter().all(|v| !used.contains(v.as_slice()));
            if disjoint && self.event_at(env, &tau) {
                used.extend(verts[i..=i + len].iter().map(|v| v.as_slice()));
                found.push(Occurrence { position: i, translate: tau });
                i += len + 1;
            } else {
                i += 1;
            }
        }
        Occurrences { count: found.len(), occurrences: found }
    }

    /// Translate `tau` such that `window` is `pi++ + tau` traversed in
    /// either direction.
    fn match_detour(&self, window: &[Point]) -> Option<Point> {
        let ell = self.ell() as i64;
        let start = &window[0];
        let step = |w: &Point, axis: usize, delta: i64| -> bool {
            w.iter().zip(start).enumerate().all(|(j, (c, s))| *c == s + if j == axis { delta } else { 0 })
        };
        if !(step(&window[1], 1, 1) && window.last().is_some_and(|l| l[1] == start[1])) {
            return None;
        }
        // forward: up, +e1 x ell, down; backward: up, -e1 x ell, down
        let dir = window[2][0] - window[1][0];
        if dir.abs() != 1 {
            return None;
        }
        for (k, w) in window[1..window.len() - 1].iter().enumerate() {
            let mut expect = start.clone();
            expect[1] += 1;
            expect[0] += dir * k as i64;
            if *w != expect {
                return None;
            }
        }
        let mut end = start.clone();
        end[0] += dir * ell;
        if *window.last().expect("nonempty") != end {
            return None;
        }
        let mut tau = start.clone();
        if dir < 0 {
            tau[0] -= ell;
        }
        Some(tau)
    }

    fn event_at<W: Weight>(&self, env: &Environment<W>, tau: &[i64]) -> bool {
        let mut values = Vec::with_capacity(self.ladder.edges.len());
        for e in &self.ladder.edges {
            match env.weight(&e.translate(tau)) {
                Some(w) => values.push(env.value(w)),
                None => return false,
            }
        }
        self.event_holds(&values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Occurrence {
    /// Index in the path of the first vertex of the occurrence.
    pub position: usize,
    /// Translate of the ladder origin.
    pub translate: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Occurrences {
    pub count: usize,
    pub occurrences: Vec<Occurrence>,
}

/// Smallest integer `ell > 2a/(b-a)`.
pub fn minimal_length(a: f64, b: f64) -> usize {
    (2.0 * a / (b - a)).floor() as usize + 1
}

fn all_corners_in_h(ladder: &Ladder, a: f64, b: f64, delta: f64) -> Result<bool> {
    let m = ladder.edges.len();
    if m > FULL_CORNER_LIMIT {
        return Err(Error::OracleLimit(format!("{m} ladder edges, corner audit limit is {FULL_CORNER_LIMIT}")));
    }
    let mut values = vec![0.0; m];
    for mask in 0u32..(1u32 << m) {
        for (k, v) in values.iter_mut().enumerate() {
            let c = if ladder.on_detour[k] { a } else { b };
            *v = if mask >> k & 1 == 1 { c + delta } else { c - delta };
        }
        if !ladder.detour_unique_optimum(&values) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `delta` (to within `resolution`) with `G(delta)` inside `H`.
///
/// Every comparison `T(pi) - T(pi++)` is linear in the weights and
/// decreasing in the detour weights, increasing in the others, so the corner
/// with detour edges at `a + delta` and the rest at `b - delta` is the worst
/// case for every competing path at once. Returns 0 when even `G(0)` fails.
pub fn max_safe_delta(ell: usize, a: f64, b: f64, dim: usize, resolution: f64) -> Result<f64> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(Error::InvalidParameter(format!("resolution {resolution} must be positive")));
    }
    Pattern::bands(ell, a, b, 0.0, dim)?;
    let ladder = Ladder::new(ell, dim)?;
    let ok = |delta: f64| ladder.detour_unique_optimum(&ladder.worst_corner(a, b, delta));
    if !ok(0.0) {
        return Ok(0.0);
    }
    // at (b - a)/2 all weights coincide and pi+ is strictly shorter
    let (mut lo, mut hi) = (0.0, (b - a) / 2.0);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Whether every corner of `G(delta)` lies in `H`.
pub fn certify_delta(ell: usize, a: f64, b: f64, delta: f64, dim: usize) -> Result<bool> {
    let ladder = Ladder::new(ell, dim)?;
    all_corners_in_h(&ladder, a, b, delta)
}

/// `|pi|_e >= |z2 - z1|_1 + count`.
pub fn occurrence_length_bound(path: &LatticePath, count: usize) -> bool {
    path.edge_count() as i64 >= l1_distance(path.start(), path.end()) + count as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::slab_crossings;
    use crate::weight::Ticks;

    fn centre(ell: usize, a: f64, b: f64) -> (Pattern, Assignment) {
        let p = Pattern::bands(ell, a, b, 0.0, 2).unwrap();
        let asg = p.centre_assignment();
        (p, asg)
    }

    #[test]
    fn ladder_shapes() {
        let p = Pattern::bands(3, 1.0, 2.0, 0.0, 2).unwrap();
        assert_eq!(p.edges().len(), 3 * 3 + 1);
        let pp = p.detour();
        assert_eq!(pp.edge_count(), 5);
        assert_eq!(pp.axis_counts(), vec![3, 2]);
        assert_eq!(p.straight().axis_counts(), vec![3, 0]);
        assert_eq!(slab_crossings(&pp, 1, 0), 2);
        let inf = Pattern::infinite(1.0, 3).unwrap();
        assert_eq!(inf.edges().len(), 4);
        assert_eq!(inf.endpoints().1, vec![1, 0, 0]);
    }

    #[test]
    fn g_delta_examples() {
        let (p, asg) = centre(3, 1.0, 2.0);
        assert!(p.in_g_delta(&asg).unwrap());

        let p = Pattern::bands(3, 1.0, 2.0, 0.1, 2).unwrap();
        let mut asg = p.centre_assignment();
        let first = p.detour().edges().next().unwrap();
        asg.insert(first.clone(), 1.0 + 0.2);
        assert!(!p.in_g_delta(&asg).unwrap());

        let det: HashSet<Edge> = p.detour().edges().collect();
        let asg: Assignment =
            p.edges().iter().map(|e| (e.clone(), if det.contains(e) { 1.05 } else { 1.95 })).collect();
        assert!(p.in_g_delta(&asg).unwrap());

        let mut short = asg.clone();
        short.remove(&first);
        assert!(p.in_g_delta(&short).is_err());
    }

    #[test]
    fn h_examples() {
        let (p, asg) = centre(3, 1.0, 2.0);
        assert!(p.in_h(&asg).unwrap());

        let flat: Assignment = p.edges().iter().map(|e| (e.clone(), 1.0)).collect();
        assert!(!p.in_h(&flat).unwrap());

        let (p, asg) = centre(1, 1.0, 2.0);
        assert!(!p.satisfies_length_condition());
        assert!(!p.in_h(&asg).unwrap());
    }

    #[test]
    fn safe_delta_examples() {
        let d = max_safe_delta(3, 1.0, 2.0, 2, 1e-9).unwrap();
        assert!(d > 0.0 && d <= 0.125, "{d}");
        assert!(certify_delta(3, 1.0, 2.0, d, 2).unwrap());
        assert!(!certify_delta(3, 1.0, 2.0, 0.125, 2).unwrap());

        let d = max_safe_delta(1, 0.0, 1.0, 2, 1e-9).unwrap();
        assert!(d > 0.0 && d <= 0.25, "{d}");

        assert_eq!(max_safe_delta(1, 1.0, 2.0, 2, 1e-9).unwrap(), 0.0);
        assert_eq!(max_safe_delta(2, 1.0, 2.0, 2, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn ladder_path_structure() {
        for ell in 1..=5 {
            let paths = ladder_paths(ell, 2).unwrap();
            let straight = straight_path(ell, 2);
            for p in &paths {
                let c = p.axis_counts();
                assert_eq!(c[1] % 2, 0);
                assert!(c[0] >= ell);
                if *p != straight {
                    assert!(c[1] >= 2);
                }
            }
        }
    }

    fn env_for(
        p: &Pattern,
        tau: &[i64],
        lattice: BoxLattice,
        background: u64,
        on: u64,
        off: u64,
    ) -> Environment<Ticks> {
        let mut env = Environment::constant(lattice, 1, Ticks(background));
        let det: HashSet<Edge> = p.detour().edges().collect();
        for e in p.edges() {
            let w = if det.contains(e) { on } else { off };
            env.set_weight(&e.translate(tau), Ticks(w)).unwrap();
        }
        env
    }

    #[test]
    fn occurrence_examples() {
        let p = Pattern::bands(3, 1.0, 2.0, 0.05, 2).unwrap();
        let b = BoxLattice::new(vec![-2, -2], vec![12, 3]).unwrap();
        let env = env_for(&p, &[0, 0], b.clone(), 1, 1, 2);
        assert_eq!(p.count_occurrences(&env, &p.detour()).count, 1);
        assert_eq!(p.count_occurrences(&env, &p.detour().reversed()).count, 1);
        assert_eq!(p.count_occurrences(&env, &p.straight()).count, 0);

        // two detours separated by straight pieces: 0..3 detour, 3..5 straight, 5..8 detour
        let mut env = env_for(&p, &[0, 0], b.clone(), 1, 1, 2);
        let det: HashSet<Edge> = p.detour().edges().collect();
        for e in p.edges() {
            env.set_weight(&e.translate(&[5, 0]), Ticks(if det.contains(e) { 1 } else { 2 })).unwrap();
        }
        let path = LatticePath::from_steps(vec![-1, 0], &[1, 2, 1, 1, 1, -2, 1, 1, 2, 1, 1, 1, -2, 1]).unwrap();
        let occ = p.count_occurrences(&env, &path);
        assert_eq!(occ.count, 2);
        assert_eq!(occ.occurrences[0].translate, vec![0, 0]);
        assert_eq!(occ.occurrences[1].translate, vec![5, 0]);
        assert!(occurrence_length_bound(&path, occ.count));

        // wrong weights: the event fails
        let env = env_for(&p, &[0, 0], b, 1, 2, 2);
        assert_eq!(p.count_occurrences(&env, &p.detour()).count, 0);
    }

    #[test]
    fn infinite_variant_occurrence() {
        let p = Pattern::infinite(1.0, 2).unwrap();
        let b = BoxLattice::new(vec![0, 0], vec![3, 3]).unwrap();
        let mut env = Environment::constant(b, 1, Ticks(1));
        env.set_weight(&Edge::new(vec![1, 1], 0), Ticks::INF).unwrap();
        let path = LatticePath::from_steps(vec![0, 1], &[1, 2, 1, -2, 1]).unwrap();
        assert_eq!(p.count_occurrences(&env, &path).count, 1);
        assert!(p.in_h(&p.centre_assignment()).unwrap());
        assert!(p.in_g_delta(&p.centre_assignment()).unwrap());
    }

    #[test]
    fn occurrence_length_bound_examples() {
        let det = detour_path(3, 2);
        assert!(occurrence_length_bound(&det, 1));
        let straight = straight_path(4, 2);
        assert!(occurrence_length_bound(&straight, 0));
        assert!(!occurrence_length_bound(&straight, 1));
    }

    #[test]
    fn default_patterns() {
        use crate::distribution::AtomValue;
        use num_rational::Ratio;
        let fin = |n| AtomValue::Finite(Ratio::from_integer(n));
        let spec = DistributionSpec::two_point(fin(1), 0.5, fin(2)).unwrap();
        let p = Pattern::for_law(&spec, 2, 1e-6).unwrap().unwrap();
        assert_eq!(p.ell(), 3);
        assert!(p.audit_all_corners().unwrap());

        let spec = DistributionSpec::two_point(fin(1), 0.7, AtomValue::Infinite).unwrap();
        assert!(Pattern::for_law(&spec, 2, 1e-6).unwrap().unwrap().is_infinite_variant());

        let spec = DistributionSpec::point_mass(Ratio::from_integer(1));
        assert!(Pattern::for_law(&spec, 2, 1e-6).unwrap().is_none());
    }
}
