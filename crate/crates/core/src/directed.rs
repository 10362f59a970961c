//! Directed passage times `t(0, x)` over paths whose steps are all `+e_j`.
//!
//! The directed lattice restricted to `[0, x]` is a DAG, and row-major order
//! over the rectangle is a topological order of it, so one sweep computes
//! `V(z) = min_j V(z - e_j) + T({z - e_j, z})`.

use num_rational::Ratio;
use serde::Serialize;

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::lattice::{l1_norm, LatticePath, Point};
use crate::weight::Weight;

/// Default bound on `|x|_1` for exhaustive directed path enumeration.
pub const ENUMERATION_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectedResult<W> {
    pub target: Point,
    pub time: W,
    /// Optimal directed path; backtracking prefers the lowest axis.
    pub geodesic: LatticePath,
}

/// The rectangle `[0, x]` embedded in the environment's box.
struct Rect {
    extent: Vec<usize>,
    lstride: Vec<usize>,
    gstride: Vec<usize>,
    origin: usize,
    cells: usize,
}

impl Rect {
    fn new<W: Weight>(env: &Environment<W>, target: &[i64]) -> Result<Self> {
        let lattice = env.lattice();
        if target.len() != lattice.dim() {
            return Err(Error::InvalidParameter(format!("target {target:?} has wrong dimension")));
        }
        if target.iter().any(|&c| c < 0) {
            return Err(Error::InvalidParameter(format!("target {target:?} has a negative coordinate")));
        }
        let zero = vec![0; target.len()];
        let origin = lattice.index_of(&zero).ok_or(Error::OutsideBox(zero))?;
        if !lattice.contains(target) {
            return Err(Error::OutsideBox(target.to_vec()));
        }
        let d = target.len();
        let extent: Vec<usize> = target.iter().map(|&c| c as usize + 1).collect();
        let mut lstride = vec![1; d];
        for j in (0..d - 1).rev() {
            lstride[j] = lstride[j + 1] * extent[j + 1];
        }
        let gstride = (0..d).map(|j| lattice.stride(j)).collect();
        Ok(Rect { cells: lstride[0] * extent[0], extent, lstride, gstride, origin })
    }

    /// Visits cells in row-major order with their coordinates and global index.
    fn sweep(&self, mut f: impl FnMut(usize, &[usize], usize)) {
        let d = self.extent.len();
        let mut c = vec![0usize; d];
        let mut g = self.origin;
        for i in 0..self.cells {
            f(i, &c, g);
            for j in (0..d).rev() {
                c[j] += 1;
                g += self.gstride[j];
                if c[j] < self.extent[j] {
                    break;
                }
                g -= self.gstride[j] * c[j];
                c[j] = 0;
            }
        }
    }
}

/// `t(0, x)` over directed paths, with the backtracked geodesic.
pub fn directed_time<W: Weight>(env: &Environment<W>, target: &[i64]) -> Result<DirectedResult<W>> {
    let rect = Rect::new(env, target)?;
    let d = target.len();
    let mut value = vec![W::INFINITY; rect.cells];
    rect.sweep(|i, c, g| {
        if i == 0 {
            value[0] = W::ZERO;
            return;
        }
        let mut best = W::INFINITY;
        for j in 0..d {
            if c[j] > 0 {
                let cand = value[i - rect.lstride[j]].plus(env.slot((g - rect.gstride[j]) * d + j));
                if cand.strictly_less(best) {
                    best = cand;
                }
            }
        }
        value[i] = best;
    });

    let mut c: Vec<usize> = target.iter().map(|&v| v as usize).collect();
    let mut i = rect.cells - 1;
    let mut g = rect.origin + (0..d).map(|j| c[j] * rect.gstride[j]).sum::<usize>();
    let mut back = vec![target.to_vec()];
    while i != 0 {
        let j = (0..d)
            .find(|&j| {
                c[j] > 0 && value[i - rect.lstride[j]].plus(env.slot((g - rect.gstride[j]) * d + j)).same(value[i])
            })
            .expect("some predecessor attains the minimum");
        c[j] -= 1;
        i -= rect.lstride[j];
        g -= rect.gstride[j];
        back.push(c.iter().map(|&v| v as i64).collect());
    }
    back.reverse();
    Ok(DirectedResult {
        target: target.to_vec(),
        time: value[rect.cells - 1],
        geodesic: LatticePath::from_trusted(back),
    })
}

/// Same value as [`directed_time`] keeping only two slabs `{z_1 = k-1, k}`
/// of the table, i.e. `O(n^{d-1})` memory.
pub fn directed_time_value<W: Weight>(env: &Environment<W>, target: &[i64]) -> Result<W> {
    let rect = Rect::new(env, target)?;
    let d = target.len();
    let slab = rect.lstride[0];
    let mut prev = vec![W::INFINITY; slab];
    let mut cur = vec![W::INFINITY; slab];
    let mut last_row = 0;
    rect.sweep(|i, c, g| {
        if c[0] != last_row {
            std::mem::swap(&mut prev, &mut cur);
            last_row = c[0];
        }
        let k = i % slab;
        if i == 0 {
            cur[0] = W::ZERO;
            return;
        }
        let mut best = W::INFINITY;
        if c[0] > 0 {
            best = prev[k].plus(env.slot((g - rect.gstride[0]) * d));
        }
        for j in 1..d {
            if c[j] > 0 {
                let cand = cur[k - rect.lstride[j]].plus(env.slot((g - rect.gstride[j]) * d + j));
                if cand.strictly_less(best) {
                    best = cand;
                }
            }
        }
        cur[k] = best;
    });
    Ok(cur[slab - 1])
}

/// Every directed path from `from` to `to`, in vertex order.
pub fn enumerate_directed_paths(from: &[i64], to: &[i64]) -> Vec<LatticePath> {
    fn rec(cur: &mut Point, to: &[i64], acc: &mut Vec<Point>, out: &mut Vec<LatticePath>) {
        if cur.as_slice() == to {
            out.push(LatticePath::from_trusted(acc.clone()));
            return;
        }
        // larger axes first: +e_d leads to the smaller next vertex
        for j in (0..cur.len()).rev() {
            if cur[j] < to[j] {
                cur[j] += 1;
                acc.push(cur.clone());
                rec(cur, to, acc, out);
                acc.pop();
                cur[j] -= 1;
            }
        }
    }
    if from.iter().zip(to).any(|(a, b)| a > b) {
        return vec![];
    }
    let mut out = Vec::new();
    rec(&mut from.to_vec(), to, &mut vec![from.to_vec()], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectedEnumeration<W> {
    pub time: W,
    pub path_count: usize,
    /// Optimal paths, in vertex order.
    pub optimal: Vec<LatticePath>,
}

/// Brute-force minimum over all directed paths from the origin.
pub fn directed_time_enumerate<W: Weight>(
    env: &Environment<W>,
    target: &[i64],
    limit: usize,
) -> Result<DirectedEnumeration<W>> {
    Rect::new(env, target)?;
    let norm = l1_norm(target) as usize;
    if norm > limit {
        return Err(Error::OracleLimit(format!("|x|_1 = {norm} exceeds {limit}")));
    }
    let paths = enumerate_directed_paths(&vec![0; target.len()], target);
    let times: Vec<W> = paths.iter().map(|p| env.path_time(p)).collect::<Result<_>>()?;
    let best = times.iter().copied().reduce(|a, b| if b.strictly_less(a) { b } else { a }).expect("at least one path");
    let optimal = paths.iter().zip(&times).filter(|(_, t)| t.same(best)).map(|(p, _)| p.clone()).collect();
    Ok(DirectedEnumeration { time: best, path_count: paths.len(), optimal })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArgminInvariance {
    pub sets_equal: bool,
    pub value_shift_exact: bool,
    pub optimal_count: usize,
}

impl ArgminInvariance {
    pub fn holds(&self) -> bool {
        self.sets_equal && self.value_shift_exact
    }
}

/// Compares the optimal directed path sets of `env` and `env + delta`, and
/// checks that the optimal value moves by exactly `delta * |x|_1`.
pub fn directed_argmin_invariance_check<W: Weight>(
    env: &Environment<W>,
    delta: Ratio<i64>,
    target: &[i64],
    limit: usize,
) -> Result<ArgminInvariance> {
    let shifted = env.shift(delta)?;
    let base = directed_time_enumerate(env, target, limit)?;
    let moved = directed_time_enumerate(&shifted, target, limit)?;
    let gain = env.encode(delta)?.times(l1_norm(target) as u64);
    Ok(ArgminInvariance {
        sets_equal: base.optimal == moved.optimal,
        value_shift_exact: moved.time.same(base.time.plus(gain)),
        optimal_count: base.optimal.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BoxLattice, Edge};
    use crate::weight::Ticks;

    #[test]
    fn two_path_example() {
        let mut env = Environment::constant(BoxLattice::cube(2, 2).unwrap(), 1, Ticks(0));
        env.set_weight(&Edge::new(vec![0, 0], 0), Ticks(2)).unwrap();
        env.set_weight(&Edge::new(vec![1, 0], 1), Ticks(4)).unwrap();
        env.set_weight(&Edge::new(vec![0, 0], 1), Ticks(3)).unwrap();
        env.set_weight(&Edge::new(vec![0, 1], 0), Ticks(1)).unwrap();
        let r = directed_time(&env, &[1, 1]).unwrap();
        assert_eq!(r.time, Ticks(4));
        assert_eq!(r.geodesic.vertices(), &[vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(directed_time_value(&env, &[1, 1]).unwrap(), Ticks(4));
        let e = directed_time_enumerate(&env, &[1, 1], ENUMERATION_LIMIT).unwrap();
        assert_eq!(e.time, Ticks(4));
        assert_eq!(e.path_count, 2);
    }

    #[test]
    fn constant_weights() {
        let env = Environment::constant(BoxLattice::new(vec![-1, -1, -1], vec![4, 3, 3]).unwrap(), 1, Ticks(3));
        let r = directed_time(&env, &[4, 2, 3]).unwrap();
        assert_eq!(r.time, Ticks(27));
        assert!(r.geodesic.is_directed());
        assert_eq!(r.geodesic.edge_count(), 9);
        assert_eq!(directed_time_value(&env, &[4, 2, 3]).unwrap(), Ticks(27));
    }

    #[test]
    fn origin_target() {
        let env = Environment::constant(BoxLattice::cube(2, 3).unwrap(), 1, Ticks(3));
        let r = directed_time(&env, &[0, 0]).unwrap();
        assert_eq!(r.time, Ticks(0));
        assert_eq!(r.geodesic.edge_count(), 0);
        assert_eq!(directed_time_value(&env, &[0, 0]).unwrap(), Ticks(0));
    }

    #[test]
    fn path_counts() {
        assert_eq!(enumerate_directed_paths(&[0, 0], &[2, 1]).len(), 3);
        assert_eq!(enumerate_directed_paths(&[0, 0], &[3, 3]).len(), 20);
        assert_eq!(enumerate_directed_paths(&[0, 0, 0], &[1, 1, 1]).len(), 6);
        let ps = enumerate_directed_paths(&[0, 0], &[2, 2]);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_targets() {
        let env = Environment::constant(BoxLattice::cube(2, 3).unwrap(), 1, Ticks(1));
        assert!(matches!(directed_time(&env, &[-1, 0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(directed_time(&env, &[3, 0]), Err(Error::OutsideBox(_))));
        let big = Environment::constant(BoxLattice::cube(2, 20).unwrap(), 1, Ticks(1));
        assert!(matches!(directed_time_enumerate(&big, &[9, 8], 16), Err(Error::OracleLimit(_))));
    }

    #[test]
    fn invariance_examples() {
        let env = Environment::constant(BoxLattice::cube(2, 4).unwrap(), 2, Ticks(2));
        let r = directed_argmin_invariance_check(&env, Ratio::new(1, 2), &[2, 2], 16).unwrap();
        assert!(r.holds());
        assert_eq!(r.optimal_count, 6);

        let b = BoxLattice::cube(2, 4).unwrap();
        let ws: Vec<u64> = (0..b.edge_count() as u64).map(|i| 1 + (i * 5 + 1) % 2).collect();
        let env = Environment::from_integers(b, &ws).unwrap();
        let r = directed_argmin_invariance_check(&env, Ratio::from_integer(1), &[3, 3], 16).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn infinite_edges_everywhere() {
        let env = Environment::constant(BoxLattice::cube(2, 3).unwrap(), 1, Ticks::INF);
        let r = directed_time(&env, &[2, 1]).unwrap();
        assert_eq!(r.time, Ticks::INF);
        assert!(r.geodesic.is_directed());
    }
}
