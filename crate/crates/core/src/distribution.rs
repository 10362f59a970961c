//! The edge-weight law: finite or infinite atoms plus optional uniform pieces.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROB_TOLERANCE: f64 = 1e-9;

/// An atom location: a nonnegative rational or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomValue {
    Finite(Ratio<i64>),
    Infinite,
}

impl AtomValue {
    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            AtomValue::Finite(r) => Some(*r),
            AtomValue::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            AtomValue::Finite(r) => ratio_to_f64(*r),
            AtomValue::Infinite => f64::INFINITY,
        }
    }
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses `"3"`, `"0.25"`, `"7/4"` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse {s:?} as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 15 {
        return Err(Error::Config(format!("{s:?} has too many decimals for exact arithmetic")));
    }
    let denom = 10i64.pow(frac.len() as u32);
    let digits = format!("{int}{frac}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    Ok(Ratio::new(if neg { -numer } else { numer }, denom))
}

/// Exact rational reading of a decimal float through its shortest repr.
pub fn ratio_from_f64(x: f64) -> Result<Ratio<i64>> {
    if !x.is_finite() {
        return Err(Error::Config(format!("{x} is not finite")));
    }
    parse_ratio(&format!("{x}"))
}

impl FromStr for AtomValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(AtomValue::Infinite),
            _ => parse_ratio(s).map(AtomValue::Finite),
        }
    }
}

impl fmt::Display for AtomValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomValue::Finite(r) => write!(f, "{r}"),
            AtomValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for AtomValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrString {
    Int(i64),
    Float(f64),
    Str(String),
}

impl<'de> Deserialize<'de> for AtomValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match NumberOrString::deserialize(d)? {
            NumberOrString::Int(i) => Ok(AtomValue::Finite(Ratio::from_integer(i))),
            NumberOrString::Float(x) if x.is_infinite() && x > 0.0 => Ok(AtomValue::Infinite),
            NumberOrString::Float(x) => ratio_from_f64(x).map(AtomValue::Finite).map_err(D::Error::custom),
            NumberOrString::Str(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

/// A rational quantity read from config as a number or a string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational(pub Ratio<i64>);

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match AtomValue::deserialize(d)? {
            AtomValue::Finite(r) => Ok(Rational(r)),
            AtomValue::Infinite => Err(D::Error::custom("expected a finite number")),
        }
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_ratio(s).map(Rational)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: AtomValue,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformPiece {
    pub low: f64,
    pub high: f64,
    pub prob: f64,
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    uniform: Vec<UniformPiece>,
}

/// Edge-weight law with support in `[0, inf]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct DistributionSpec {
    atoms: Vec<Atom>,
    uniform: Vec<UniformPiece>,
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        DistributionSpec::new(r.atoms, r.uniform)
    }
}

impl DistributionSpec {
    pub fn new(atoms: Vec<Atom>, uniform: Vec<UniformPiece>) -> Result<Self> {
        let mut total = 0.0;
        for a in &atoms {
            if !(a.prob >= 0.0 && a.prob <= 1.0) {
                return Err(Error::InvalidDistribution(format!("atom probability {} outside [0,1]", a.prob)));
            }
            if let AtomValue::Finite(r) = a.value {
                if *r.numer() < 0 {
                    return Err(Error::InvalidDistribution(format!("negative atom {r}")));
                }
            }
            total += a.prob;
        }
        for u in &uniform {
            if !(u.low.is_finite() && u.high.is_finite() && 0.0 <= u.low && u.low < u.high) {
                return Err(Error::InvalidDistribution(format!("uniform piece [{}, {}] invalid", u.low, u.high)));
            }
            if !(u.prob >= 0.0 && u.prob <= 1.0) {
                return Err(Error::InvalidDistribution(format!("uniform probability {} outside [0,1]", u.prob)));
            }
            total += u.prob;
        }
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DistributionSpec { atoms, uniform })
    }

    pub fn point_mass(value: Ratio<i64>) -> Self {
        DistributionSpec::new(vec![Atom { value: AtomValue::Finite(value), prob: 1.0 }], vec![]).expect("valid")
    }

    /// `P(a) = p`, `P(b) = 1 - p`.
    pub fn two_point(a: AtomValue, p: f64, b: AtomValue) -> Result<Self> {
        DistributionSpec::new(vec![Atom { value: a, prob: p }, Atom { value: b, prob: 1.0 - p }], vec![])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn uniform_pieces(&self) -> &[UniformPiece] {
        &self.uniform
    }

    /// Whether every weight can be carried in exact rational arithmetic.
    pub fn is_exact(&self) -> bool {
        self.uniform.iter().all(|u| u.prob == 0.0)
    }

    /// `r`, the minimum of the support (infimum over uniform pieces);
    /// infinite when all mass sits at infinity.
    pub fn min_support(&self) -> f64 {
        let atoms = self.atoms.iter().filter(|a| a.prob > 0.0).map(|a| a.value.to_f64());
        let pieces = self.uniform.iter().filter(|u| u.prob > 0.0).map(|u| u.low);
        atoms.chain(pieces).fold(f64::INFINITY, f64::min)
    }

    /// `L(r)`.
    pub fn mass_at_min(&self) -> f64 {
        let r = self.min_support();
        self.atoms.iter().filter(|a| a.value.to_f64() == r).map(|a| a.prob).sum()
    }

    /// `L([0, inf))`.
    pub fn mass_finite(&self) -> f64 {
        1.0 - self.mass_infinite()
    }

    /// `L(inf)`.
    pub fn mass_infinite(&self) -> f64 {
        self.atoms.iter().filter(|a| a.value == AtomValue::Infinite).map(|a| a.prob).sum()
    }

    pub fn mean(&self) -> f64 {
        if self.mass_infinite() > 0.0 {
            return f64::INFINITY;
        }
        let atoms: f64 = self.atoms.iter().map(|a| a.prob * a.value.to_f64()).sum();
        let pieces: f64 = self.uniform.iter().map(|u| u.prob * 0.5 * (u.low + u.high)).sum();
        atoms + pieces
    }

    /// `E min(T_1, ..., T_2d) < inf`; recorded, never enforced.
    pub fn moment_condition(&self) -> bool {
        self.mass_infinite() < 1.0
    }

    /// Distinct finite support points: atoms with positive mass and the
    /// endpoints of uniform pieces, ascending.
    pub fn finite_support_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .atoms
            .iter()
            .filter(|a| a.prob > 0.0)
            .filter_map(|a| a.value.finite().map(ratio_to_f64))
            .chain(self.uniform.iter().filter(|u| u.prob > 0.0).flat_map(|u| [u.low, u.high]))
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Finite atoms with positive mass, ascending.
    pub fn finite_atoms(&self) -> Vec<Ratio<i64>> {
        let mut v: Vec<Ratio<i64>> =
            self.atoms.iter().filter(|a| a.prob > 0.0).filter_map(|a| a.value.finite()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Smallest `per_unit` such that every finite atom and every value in
    /// `extra` is an integer multiple of `1/per_unit`.
    pub fn ticks_per_unit(&self, extra: &[Ratio<i64>]) -> Result<u64> {
        let mut l: i64 = 1;
        for r in self.atoms.iter().filter_map(|a| a.value.finite()).chain(extra.iter().copied()) {
            let d = *r.denom();
            let g = l.gcd(&d);
            l = (l / g).checked_mul(d).ok_or_else(|| Error::Overflow("common denominator".into()))?;
        }
        Ok(l as u64)
    }

    /// The law of `T + shift`.
    pub fn shifted(&self, shift: Ratio<i64>) -> DistributionSpec {
        let s = ratio_to_f64(shift);
        DistributionSpec {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    value: match a.value {
                        AtomValue::Finite(r) => AtomValue::Finite(r + shift),
                        AtomValue::Infinite => AtomValue::Infinite,
                    },
                    prob: a.prob,
                })
                .collect(),
            uniform: self
                .uniform
                .iter()
                .map(|u| UniformPiece { low: u.low + s, high: u.high + s, prob: u.prob })
                .collect(),
        }
    }

    /// True if `x` lies in the support (atoms exactly, pieces by range).
    pub fn in_support(&self, x: f64) -> bool {
        self.atoms.iter().any(|a| a.prob > 0.0 && a.value.to_f64() == x)
            || self.uniform.iter().any(|u| u.prob > 0.0 && u.low <= x && x <= u.high)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            distribution: DistributionSpec,
        }
        toml::from_str::<File>(text).map(|f| f.distribution).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Critical probabilities of (oriented) Bernoulli bond percolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub p_c: f64,
    pub p_c_directed: f64,
    #[serde(default)]
    pub note: String,
}

impl CriticalConstants {
    pub fn new(p_c: f64, p_c_directed: f64, note: impl Into<String>) -> Result<Self> {
        if !(0.0 < p_c && p_c <= p_c_directed && p_c_directed < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < p_c <= p_c_directed < 1, got {p_c}, {p_c_directed}"
            )));
        }
        Ok(CriticalConstants { p_c, p_c_directed, note: note.into() })
    }

    /// Literature values. Only `d = 2` has defaults; other dimensions must
    /// be supplied by the caller.
    pub fn for_dimension(d: usize) -> Option<Self> {
        (d == 2).then(|| CriticalConstants {
            p_c: 0.5,
            p_c_directed: 0.6447,
            note: "d=2: p_c = 1/2 exact (Kesten); oriented p_c ~ 0.6447 numerical estimate".into(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UsefulFlags {
    /// `L(r) < p_c`.
    pub useful_pc: bool,
    /// `L(r) < oriented p_c`.
    pub useful_directed_pc: bool,
    /// `L([0, inf)) > p_c`.
    pub finite_mass_supercritical: bool,
    /// `L(r) < p_c` if `r = 0`, `L(r) < oriented p_c` if `r > 0`.
    pub useful: bool,
}

pub fn check_useful(spec: &DistributionSpec, crit: &CriticalConstants) -> UsefulFlags {
    let r = spec.min_support();
    let at_r = spec.mass_at_min();
    let useful_pc = at_r < crit.p_c;
    let useful_directed_pc = at_r < crit.p_c_directed;
    UsefulFlags {
        useful_pc,
        useful_directed_pc,
        finite_mass_supercritical: spec.mass_finite() > crit.p_c,
        useful: if r == 0.0 { useful_pc } else { useful_directed_pc },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(n: i64) -> AtomValue {
        AtomValue::Finite(Ratio::from_integer(n))
    }

    fn d2() -> CriticalConstants {
        CriticalConstants::for_dimension(2).unwrap()
    }

    #[test]
    fn useful_examples() {
        let s = DistributionSpec::two_point(fin(1), 0.4, fin(2)).unwrap();
        let f = check_useful(&s, &d2());
        assert!(f.useful_pc && f.useful_directed_pc && f.finite_mass_supercritical && f.useful);

        let s = DistributionSpec::two_point(fin(0), 0.5, fin(1)).unwrap();
        let f = check_useful(&s, &d2());
        assert!(!f.useful_pc);
        assert!(!f.useful);

        let s = DistributionSpec::two_point(fin(1), 0.7, AtomValue::Infinite).unwrap();
        let f = check_useful(&s, &d2());
        assert!(f.finite_mass_supercritical);
        assert!(!f.useful_directed_pc);
    }

    #[test]
    fn positive_minimum_uses_oriented_threshold() {
        // L(1) = 0.5 fails L(r) < p_c but the law is still useful since r > 0
        let s = DistributionSpec::two_point(fin(1), 0.5, fin(2)).unwrap();
        let f = check_useful(&s, &d2());
        assert!(!f.useful_pc);
        assert!(f.useful);
    }

    #[test]
    fn derived_quantities() {
        let s = DistributionSpec::new(
            vec![Atom { value: fin(3), prob: 0.25 }, Atom { value: AtomValue::Infinite, prob: 0.25 }],
            vec![UniformPiece { low: 0.5, high: 1.5, prob: 0.5 }],
        )
        .unwrap();
        assert_eq!(s.min_support(), 0.5);
        assert_eq!(s.mass_at_min(), 0.0);
        assert_eq!(s.mass_infinite(), 0.25);
        assert_eq!(s.mass_finite(), 0.75);
        assert!(!s.is_exact());
        assert_eq!(s.finite_support_points(), vec![0.5, 1.5, 3.0]);
        assert!(s.in_support(0.7) && !s.in_support(2.0));
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(DistributionSpec::new(vec![Atom { value: fin(1), prob: 0.5 }], vec![]).is_err());
        assert!(DistributionSpec::new(vec![Atom { value: fin(-1), prob: 1.0 }], vec![]).is_err());
        assert!(CriticalConstants::new(0.7, 0.6, "").is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("7/4").unwrap(), Ratio::new(7, 4));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::from_integer(3));
        assert_eq!(ratio_from_f64(0.1).unwrap(), Ratio::new(1, 10));
        assert!(parse_ratio("abc").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert_eq!("inf".parse::<AtomValue>().unwrap(), AtomValue::Infinite);
    }

    #[test]
    fn toml_round() {
        let s = DistributionSpec::from_toml(
            r#"
            [distribution]
            atoms = [ { value = 1, prob = 0.7 }, { value = "inf", prob = 0.3 } ]
            "#,
        )
        .unwrap();
        assert_eq!(s.mass_infinite(), 0.3);
        assert_eq!(s.ticks_per_unit(&[Ratio::new(1, 4)]).unwrap(), 4);
        assert!(DistributionSpec::from_toml("[distribution]\natoms = []").is_err());
    }

    #[test]
    fn shifted_law() {
        let s = DistributionSpec::two_point(fin(0), 0.3, AtomValue::Infinite).unwrap();
        let t = s.shifted(Ratio::new(1, 2));
        assert_eq!(t.min_support(), 0.5);
        assert!((t.mass_infinite() - 0.7).abs() < 1e-12);
    }
}
