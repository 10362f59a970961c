//! The chain of inequalities turning a long geodesic in a shifted
//! environment into a strict gap between `t` and the directed time.
//!
//! With `gamma` the canonical geodesic of `T_delta = T + delta` and
//! `dgamma` the canonical directed geodesic of `T_delta`:
//!
//! 1. `t(0,x) <= T(gamma)`
//! 2. `T(gamma) = T_delta(gamma) - delta |gamma|_e`
//! 3. `T_delta(gamma) <= T_delta(dgamma)`
//! 4. `|dgamma|_e = |x|_1` and `T(dgamma) = T_delta(dgamma) - delta |x|_1`
//! 5. `T(dgamma) = tdir(0,x)`
//!
//! so that `t(0,x) <= tdir(0,x) - delta (|gamma|_e - |x|_1)`, and in
//! particular `t <= tdir - delta h |x|_1` whenever `|gamma|_e >= (1+h)|x|_1`.

use num_rational::Ratio;
use serde::Serialize;

use crate::directed::directed_time;
use crate::distribution::ratio_to_f64;
use crate::environment::Environment;
use crate::error::Result;
use crate::geodesic::geodesic_time;
use crate::lattice::l1_norm;
use crate::weight::{Weight, REAL_TOLERANCE};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkCheck {
    pub link: u8,
    pub relation: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    /// False when the shifted geodesic or the directed time is infinite;
    /// no links are evaluated then.
    pub applicable: bool,
    pub links: Vec<LinkCheck>,
    pub t: f64,
    pub t_dir: f64,
    pub hops_shifted: usize,
    pub norm: usize,
    /// `|gamma|_e >= (1 + h) |x|_1`.
    pub premise: bool,
    /// `t <= tdir - delta h |x|_1`.
    pub conclusion: bool,
    /// `t + delta (|gamma|_e - |x|_1) <= tdir`, checked in the native
    /// arithmetic.
    pub sharp: bool,
}

impl ChainReport {
    pub fn first_failure(&self) -> Option<&LinkCheck> {
        self.links.iter().find(|l| !l.holds)
    }

    /// Every link holds, the sharp bound holds and the premise implies the
    /// conclusion.
    pub fn verified(&self) -> bool {
        !self.applicable || (self.first_failure().is_none() && self.sharp && (!self.premise || self.conclusion))
    }

    /// Name of the first failing step, if any.
    pub fn failure(&self) -> Option<String> {
        if let Some(l) = self.first_failure() {
            return Some(format!("link ({}) {}: lhs {} rhs {}", l.link, l.relation, l.lhs, l.rhs));
        }
        if !self.applicable {
            return None;
        }
        if !self.sharp {
            return Some("sharp bound t + delta (|gamma|_e - |x|_1) <= tdir".into());
        }
        if self.premise && !self.conclusion {
            return Some("conclusion t <= tdir - delta h |x|_1".into());
        }
        None
    }
}

/// Checks the chain for `0 -> target` with `shifted` playing `T + delta`.
/// `shifted` is taken as given, not rebuilt from `env`.
pub fn verify_inequality_chain<W: Weight>(
    env: &Environment<W>,
    shifted: &Environment<W>,
    delta: Ratio<i64>,
    target: &[i64],
    hop_excess: f64,
) -> Result<ChainReport> {
    let origin = vec![0; target.len()];
    let t = geodesic_time(env, &origin, target)?.time;
    let t_dir = directed_time(env, target)?.time;
    chain_with_base(env, shifted, delta, target, hop_excess, t, t_dir)
}

pub(crate) fn chain_with_base<W: Weight>(
    env: &Environment<W>,
    shifted: &Environment<W>,
    delta: Ratio<i64>,
    target: &[i64],
    hop_excess: f64,
    t: W,
    t_dir: W,
) -> Result<ChainReport> {
    let origin = vec![0; target.len()];
    let norm = l1_norm(target) as usize;
    let v = |w: W| env.value(w);
    let shifted_geo = geodesic_time(shifted, &origin, target)?;
    let mut report = ChainReport {
        applicable: false,
        links: vec![],
        t: v(t),
        t_dir: v(t_dir),
        hops_shifted: shifted_geo.min_hops,
        norm,
        premise: false,
        conclusion: false,
        sharp: false,
    };
    let Some(gamma) = shifted_geo.geodesic.filter(|_| t_dir.is_finite()) else {
        return Ok(report);
    };
    report.applicable = true;
    let d = env.encode(delta)?;
    let hops = gamma.edge_count();

    let t_gamma = env.path_time(&gamma)?;
    let td_gamma = shifted.path_time(&gamma)?;
    let dir = directed_time(shifted, target)?.geodesic;
    let td_dir = shifted.path_time(&dir)?;
    let t_of_dir = env.path_time(&dir)?;
    let dir_hops = dir.edge_count();

    let check = |link, relation, holds, lhs: W, rhs: W| LinkCheck { link, relation, holds, lhs: v(lhs), rhs: v(rhs) };
    report.links = vec![
        check(1, "t(0,x) <= T(gamma)", t.at_most(t_gamma), t, t_gamma),
        check(
            2,
            "T(gamma) + delta |gamma|_e = T_delta(gamma)",
            t_gamma.plus(d.times(hops as u64)).same(td_gamma),
            t_gamma.plus(d.times(hops as u64)),
            td_gamma,
        ),
        check(3, "T_delta(gamma) <= T_delta(dgamma)", td_gamma.at_most(td_dir), td_gamma, td_dir),
        check(
            4,
            "|dgamma|_e = |x|_1 and T(dgamma) + delta |x|_1 = T_delta(dgamma)",
            dir_hops == norm && dir.is_directed() && t_of_dir.plus(d.times(norm as u64)).same(td_dir),
            t_of_dir.plus(d.times(norm as u64)),
            td_dir,
        ),
        check(5, "T(dgamma) = tdir(0,x)", t_of_dir.same(t_dir), t_of_dir, t_dir),
    ];

    report.sharp = hops >= norm && t.plus(d.times((hops - norm) as u64)).at_most(t_dir);
    report.premise = hops as f64 >= (1.0 + hop_excess) * norm as f64;
    let rhs = v(t_dir) - ratio_to_f64(delta) * hop_excess * norm as f64;
    report.conclusion = v(t) <= rhs + REAL_TOLERANCE * rhs.abs().max(1.0);
    Ok(report)
}
