//! Passage-time environments on a box.

use std::io::Write;
use std::sync::Arc;

use num_rational::Ratio;

use crate::distribution::{AtomValue, DistributionSpec};
use crate::error::{Error, Result};
use crate::lattice::{BoxLattice, Edge, LatticePath};
use crate::rng::SlotStream;
use crate::weight::{Ticks, Weight};

/// Maps a pair of uniforms to a draw from the law.
#[derive(Clone, Debug)]
pub struct EdgeSampler<W> {
    cumulative: Vec<f64>,
    outcomes: Vec<Outcome<W>>,
}

#[derive(Clone, Copy, Debug)]
enum Outcome<W> {
    Atom(W),
    Uniform { low: f64, high: f64 },
}

impl<W: Weight> EdgeSampler<W> {
    pub fn new(spec: &DistributionSpec, per_unit: u64) -> Result<Self> {
        let mut cumulative = Vec::new();
        let mut outcomes = Vec::new();
        let mut acc = 0.0;
        for a in spec.atoms().iter().filter(|a| a.prob > 0.0) {
            let w = match a.value {
                AtomValue::Finite(r) => W::from_ratio(r, per_unit)?,
                AtomValue::Infinite => W::INFINITY,
            };
            acc += a.prob;
            cumulative.push(acc);
            outcomes.push(Outcome::Atom(w));
        }
        for u in spec.uniform_pieces().iter().filter(|u| u.prob > 0.0) {
            if W::from_real(u.low).is_none() {
                return Err(Error::InvalidDistribution("uniform pieces need real-valued arithmetic".into()));
            }
            acc += u.prob;
            cumulative.push(acc);
            outcomes.push(Outcome::Uniform { low: u.low, high: u.high });
        }
        // absorb rounding in the last bucket
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        Ok(EdgeSampler { cumulative, outcomes })
    }

    #[inline]
    pub fn draw(&self, pick: f64, position: f64) -> W {
        let k = self.cumulative.partition_point(|&c| c <= pick);
        match self.outcomes[k] {
            Outcome::Atom(w) => w,
            Outcome::Uniform { low, high } => {
                W::from_real(low + (high - low) * position).expect("checked at construction")
            }
        }
    }
}

/// One passage time per edge of a box.
#[derive(Clone, Debug)]
pub struct Environment<W> {
    lattice: BoxLattice,
    weights: Vec<W>,
    per_unit: u64,
    seed: u64,
    trial_id: u64,
    spec: Option<Arc<DistributionSpec>>,
}

impl<W: Weight> Environment<W> {
    /// Draws every edge independently; the weight of slot `s` depends only on
    /// `(seed, trial_id, s)`.
    pub fn sample(
        spec: Arc<DistributionSpec>,
        lattice: BoxLattice,
        per_unit: u64,
        seed: u64,
        trial_id: u64,
    ) -> Result<Self> {
        let sampler = EdgeSampler::<W>::new(&spec, per_unit)?;
        let weights = SlotStream::new(seed, trial_id)
            .sequential()
            .take(lattice.edge_slots())
            .enumerate()
            .map(|(s, (u, v))| if lattice.is_edge_slot(s) { sampler.draw(u, v) } else { W::INFINITY })
            .collect();
        Ok(Environment { lattice, weights, per_unit, seed, trial_id, spec: Some(spec) })
    }

    /// Builds an environment from explicit weights, one per genuine edge in
    /// slot order.
    pub fn from_edge_weights(lattice: BoxLattice, per_unit: u64, edge_weights: &[W]) -> Result<Self> {
        if edge_weights.len() != lattice.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} weights, got {}",
                lattice.edge_count(),
                edge_weights.len()
            )));
        }
        let mut weights = vec![W::INFINITY; lattice.edge_slots()];
        for (slot, &w) in lattice.edge_slot_iter().zip(edge_weights) {
            weights[slot] = w;
        }
        Ok(Environment { lattice, weights, per_unit, seed: 0, trial_id: 0, spec: None })
    }

    /// Every edge gets `w`.
    pub fn constant(lattice: BoxLattice, per_unit: u64, w: W) -> Self {
        let weights = vec![w; lattice.edge_slots()];
        Environment { lattice, weights, per_unit, seed: 0, trial_id: 0, spec: None }
    }

    pub fn lattice(&self) -> &BoxLattice {
        &self.lattice
    }

    pub fn per_unit(&self) -> u64 {
        self.per_unit
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trial_id(&self) -> u64 {
        self.trial_id
    }

    pub fn spec(&self) -> Option<&DistributionSpec> {
        self.spec.as_deref()
    }

    /// Raw slot array; holes hold infinity.
    pub fn slot_weights(&self) -> &[W] {
        &self.weights
    }

    #[inline]
    pub fn slot(&self, slot: usize) -> W {
        self.weights[slot]
    }

    pub fn weight(&self, e: &Edge) -> Option<W> {
        self.lattice.edge_index(e).map(|s| self.weights[s])
    }

    pub fn set_weight(&mut self, e: &Edge, w: W) -> Result<()> {
        let s = self.lattice.edge_index(e).ok_or_else(|| Error::OutsideBox(e.upper()))?;
        self.weights[s] = w;
        Ok(())
    }

    /// Weights of genuine edges in slot order.
    pub fn edge_weights(&self) -> impl Iterator<Item = (usize, W)> + '_ {
        self.lattice.edge_slot_iter().map(|s| (s, self.weights[s]))
    }

    /// Value of a weight in the law's own units.
    pub fn value(&self, w: W) -> f64 {
        w.to_f64(self.per_unit)
    }

    pub fn encode(&self, r: Ratio<i64>) -> Result<W> {
        W::from_ratio(r, self.per_unit)
    }

    /// `T(pi)`; infinite if any edge is.
    pub fn path_time(&self, p: &LatticePath) -> Result<W> {
        let mut t = W::ZERO;
        for e in p.edges() {
            let w = self.weight(&e).ok_or_else(|| Error::OutsideBox(e.upper()))?;
            t = t.plus(w);
        }
        if p.edge_count() == 0 && !self.lattice.contains(p.start()) {
            return Err(Error::OutsideBox(p.start().to_vec()));
        }
        Ok(t)
    }

    /// `T_delta(e) = T(e) + delta` on every finite edge.
    pub fn shift(&self, delta: Ratio<i64>) -> Result<Self> {
        if *delta.numer() <= 0 {
            return Err(Error::InvalidParameter(format!("shift must be positive, got {delta}")));
        }
        let d = W::from_ratio(delta, self.per_unit)?;
        Ok(Environment {
            lattice: self.lattice.clone(),
            weights: self.weights.iter().map(|&w| w.plus(d)).collect(),
            per_unit: self.per_unit,
            seed: self.seed,
            trial_id: self.trial_id,
            spec: self.spec.as_ref().map(|s| Arc::new(s.shifted(delta))),
        })
    }

    /// Adds `delta` only on the slots accepted by `pick`. Not a shift of the
    /// law; useful to build inconsistent fixtures.
    pub fn shift_where(&self, delta: Ratio<i64>, pick: impl Fn(usize) -> bool) -> Result<Self> {
        let d = W::from_ratio(delta, self.per_unit)?;
        let mut out = self.clone();
        for (s, w) in out.weights.iter_mut().enumerate() {
            if pick(s) {
                *w = w.plus(d);
            }
        }
        Ok(out)
    }

    /// The same environment carried by the box translated by `by`.
    pub fn translated(&self, by: &[i64]) -> Result<Self> {
        let lo = self.lattice.lo().iter().zip(by).map(|(a, b)| a + b).collect();
        let hi = self.lattice.hi().iter().zip(by).map(|(a, b)| a + b).collect();
        Ok(Environment { lattice: BoxLattice::new(lo, hi)?, weights: self.weights.clone(), ..self.clone() })
    }

    /// `coord_1,...,coord_d,axis,weight` per genuine edge; axis is 1-based.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let d = self.lattice.dim();
        let header: Vec<String> = (1..=d).map(|j| format!("x{j}")).chain(["axis".into(), "weight".into()]).collect();
        writeln!(out, "{}", header.join(","))?;
        for (slot, w) in self.edge_weights() {
            let e = self.lattice.edge_at(slot).expect("genuine slot");
            let coords: Vec<String> = e.base.iter().map(i64::to_string).collect();
            let value = if w.is_finite() { format!("{}", self.value(w)) } else { "inf".into() };
            writeln!(out, "{},{},{}", coords.join(","), e.axis + 1, value)?;
        }
        Ok(())
    }

    /// Little-endian `f64` per genuine edge in slot order (`+inf` for
    /// infinite edges), preceded by the edge count as `u64`.
    pub fn write_binary(&self, mut out: impl Write) -> Result<()> {
        out.write_all(&(self.lattice.edge_count() as u64).to_le_bytes())?;
        for (_, w) in self.edge_weights() {
            out.write_all(&self.value(w).to_le_bytes())?;
        }
        Ok(())
    }
}

impl Environment<Ticks> {
    /// Handy for tests: integer weights in unit ticks.
    pub fn from_integers(lattice: BoxLattice, edge_weights: &[u64]) -> Result<Self> {
        let w: Vec<Ticks> = edge_weights.iter().map(|&v| Ticks(v)).collect();
        Environment::from_edge_weights(lattice, 1, &w)
    }
}

/// Recomputes the weight of one slot without materializing the box.
pub fn sample_slot<W: Weight>(
    spec: &DistributionSpec,
    per_unit: u64,
    seed: u64,
    trial_id: u64,
    slot: usize,
) -> Result<W> {
    let sampler = EdgeSampler::<W>::new(spec, per_unit)?;
    let (u, v) = SlotStream::new(seed, trial_id).at(slot);
    Ok(sampler.draw(u, v))
}
