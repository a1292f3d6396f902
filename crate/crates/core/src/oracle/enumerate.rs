//! Exhaustive enumeration of a frog system with at most four walkers.
//!
//! The joint law is propagated tick by tick over merged states, using the same
//! conventions as the simulator: every alive active walker dies, steps left or
//! steps right; walkers landing on a dormant site wake it at the end of the
//! tick, and a woken walker first moves on the next tick.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::Serialize;

use super::OracleError;
use crate::model::{Density, ModelSpec, Role};

const MAX_SITES: usize = 4;
/// Step count up to which exact rational arithmetic is used.
pub const EXACT_STEP_LIMIT: u32 = 12;
const MAX_STATES: usize = 2_000_000;

/// Probability weights the enumerator can carry.
pub trait Weight: Clone + Add<Output = Self> + Zero + One {
    fn from_prob(p: f64) -> Self;
    /// Masses of (death, left, right) for a walker with parameters `p`, `l`.
    fn masses(p: f64, l: f64) -> [Self; 3];
    fn mul_ref(&self, other: &Self) -> Self;
    fn as_f64(&self) -> f64;
}

impl Weight for BigRational {
    fn from_prob(p: f64) -> Self {
        // every f64 is a dyadic rational
        BigRational::from_f64(p).expect("finite probability")
    }

    fn masses(p: f64, l: f64) -> [Self; 3] {
        let one = BigRational::one();
        let (p, l) = (Self::from_prob(p), Self::from_prob(l));
        [&one - &p, &p * &l, &p * (&one - &l)]
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// A running sum with a Neumaier compensation term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Add for Compensated {
    type Output = Compensated;

    fn add(self, rhs: Compensated) -> Compensated {
        let x = rhs.value();
        let t = self.sum + x;
        let c = if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        Compensated {
            sum: t,
            comp: self.comp + c,
        }
    }
}

impl Mul for Compensated {
    type Output = Compensated;

    fn mul(self, rhs: Compensated) -> Compensated {
        Compensated {
            sum: self.value() * rhs.value(),
            comp: 0.0,
        }
    }
}

impl Zero for Compensated {
    fn zero() -> Self {
        Compensated {
            sum: 0.0,
            comp: 0.0,
        }
    }

    fn is_zero(&self) -> bool {
        self.value() == 0.0
    }
}

impl One for Compensated {
    fn one() -> Self {
        Compensated {
            sum: 1.0,
            comp: 0.0,
        }
    }
}

impl Weight for Compensated {
    fn from_prob(p: f64) -> Self {
        Compensated { sum: p, comp: 0.0 }
    }

    fn masses(p: f64, l: f64) -> [Self; 3] {
        [1.0 - p, p * l, p * (1.0 - l)].map(Self::from_prob)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        *self * *other
    }

    fn as_f64(&self) -> f64 {
        self.value()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Dormant,
    At(i32),
    Dead,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct State {
    walkers: [Slot; MAX_SITES],
    visits: u32,
}

/// Exact (or compensated) law of the system after `max_steps` ticks.
#[derive(Clone, Debug)]
pub struct Enumeration<W> {
    /// Participating sites, ascending.
    pub sites: Vec<u64>,
    /// Probability of each set of activated sites.
    pub activation: BTreeMap<Vec<u64>, W>,
    /// Probability of each total number of origin visits.
    pub origin_visits: BTreeMap<u32, W>,
    /// Probability that no walker is alive and active at the end.
    pub all_dead: W,
    /// Total mass; one up to the arithmetic used.
    pub total: W,
    pub peak_states: usize,
}

impl<W: Weight> Enumeration<W> {
    /// `P(origin visits ≥ k)`.
    pub fn visits_at_least(&self, k: u32) -> W {
        self.origin_visits
            .range(k..)
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// `P(site is activated)`.
    pub fn site_activated(&self, site: u64) -> W {
        self.activation
            .iter()
            .filter(|(set, _)| set.contains(&site))
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }
}

/// Summary in floating point, whichever arithmetic produced it.
#[derive(Clone, Debug, Serialize)]
pub struct EnumerationReport {
    pub exact: bool,
    pub sites: Vec<u64>,
    pub activation: Vec<(Vec<u64>, f64)>,
    /// Entry `k` is `P(origin visits ≥ k)`.
    pub visits_at_least: Vec<f64>,
    pub all_dead: f64,
    /// `|1 − total mass|`; zero in exact mode.
    pub mass_error: f64,
}

fn enumerate<W: Weight>(spec: &ModelSpec, max_steps: u32) -> Result<Enumeration<W>, OracleError> {
    let Density::Finite(all_sites) = spec.occupied().density() else {
        return Err(OracleError::Invalid(
            "enumeration needs a finite list of occupied sites".into(),
        ));
    };
    let mut sites = Vec::new();
    let mut laws = Vec::new();
    for &s in &all_sites {
        let p = spec.sample(Role::Lifetime, s)?.value;
        let l = spec.sample(Role::Drift, s)?.value;
        if p > 0.0 {
            sites.push(s);
            laws.push(W::masses(p, l));
        }
    }
    if sites.len() > MAX_SITES {
        return Err(OracleError::Invalid(format!(
            "{} participating sites; at most {MAX_SITES} supported",
            sites.len()
        )));
    }
    let site_of = |pos: i32| sites.iter().position(|&s| s as i64 == pos as i64);
    let mut start = State {
        walkers: [Slot::Dead; MAX_SITES],
        visits: 0,
    };
    for (i, w) in start.walkers.iter_mut().enumerate().take(sites.len()) {
        *w = if i == 0 { Slot::At(0) } else { Slot::Dormant };
    }
    let mut layer: HashMap<State, W> = HashMap::new();
    layer.insert(start, W::one());
    let mut peak = 1;
    for _ in 0..max_steps {
        let mut next: HashMap<State, W> = HashMap::new();
        for (state, w) in &layer {
            let movers: Vec<usize> = (0..sites.len())
                .filter(|&i| matches!(state.walkers[i], Slot::At(_)))
                .collect();
            if movers.is_empty() {
                accumulate(&mut next, state.clone(), w.clone());
                continue;
            }
            let combos = 3usize.pow(movers.len() as u32);
            'combo: for mut code in 0..combos {
                let mut s = state.clone();
                let mut weight = w.clone();
                for &i in &movers {
                    let choice = code % 3;
                    code /= 3;
                    let m = &laws[i][choice];
                    if m.is_zero() {
                        continue 'combo;
                    }
                    weight = weight.mul_ref(m);
                    let Slot::At(x) = s.walkers[i] else {
                        unreachable!()
                    };
                    s.walkers[i] = match choice {
                        0 => Slot::Dead,
                        1 => Slot::At(x - 1),
                        _ => Slot::At(x + 1),
                    };
                }
                let mut woken = Vec::new();
                for &i in &movers {
                    if let Slot::At(x) = s.walkers[i] {
                        if x == 0 {
                            s.visits += 1;
                        }
                        if let Some(j) = site_of(x) {
                            if s.walkers[j] == Slot::Dormant {
                                woken.push(j);
                            }
                        }
                    }
                }
                for j in woken {
                    s.walkers[j] = Slot::At(sites[j] as i32);
                }
                accumulate(&mut next, s, weight);
            }
        }
        peak = peak.max(next.len());
        if next.len() > MAX_STATES {
            return Err(OracleError::Resource(format!(
                "more than {MAX_STATES} distinct states"
            )));
        }
        layer = next;
    }
    let mut out = Enumeration {
        sites: sites.clone(),
        activation: BTreeMap::new(),
        origin_visits: BTreeMap::new(),
        all_dead: W::zero(),
        total: W::zero(),
        peak_states: peak,
    };
    for (state, w) in layer {
        let active: Vec<u64> = (0..sites.len())
            .filter(|&i| state.walkers[i] != Slot::Dormant)
            .map(|i| sites[i])
            .collect();
        let entry = out.activation.entry(active).or_insert_with(W::zero);
        *entry = entry.clone() + w.clone();
        let entry = out
            .origin_visits
            .entry(state.visits)
            .or_insert_with(W::zero);
        *entry = entry.clone() + w.clone();
        if !state.walkers.iter().any(|s| matches!(s, Slot::At(_))) {
            out.all_dead = out.all_dead.clone() + w.clone();
        }
        out.total = out.total.clone() + w;
    }
    Ok(out)
}

fn accumulate<W: Weight>(map: &mut HashMap<State, W>, s: State, w: W) {
    match map.get_mut(&s) {
        Some(v) => *v = v.clone() + w,
        None => {
            map.insert(s, w);
        }
    }
}

/// Enumeration in exact rational arithmetic.
pub fn enumerate_exact(
    spec: &ModelSpec,
    max_steps: u32,
) -> Result<Enumeration<BigRational>, OracleError> {
    enumerate(spec, max_steps)
}

/// Enumeration with compensated floating-point sums.
pub fn enumerate_float(
    spec: &ModelSpec,
    max_steps: u32,
) -> Result<Enumeration<Compensated>, OracleError> {
    enumerate(spec, max_steps)
}

/// Exact arithmetic up to [`EXACT_STEP_LIMIT`] ticks, compensated floating
/// point beyond.
pub fn enumerate_small_activation(
    spec: &ModelSpec,
    max_steps: u32,
) -> Result<EnumerationReport, OracleError> {
    if max_steps <= EXACT_STEP_LIMIT {
        let e = enumerate_exact(spec, max_steps)?;
        let one = BigRational::from_integer(BigInt::from(1));
        if e.total != one {
            return Err(OracleError::Resource("exact mass differs from one".into()));
        }
        Ok(report(&e, true, 0.0))
    } else {
        let e = enumerate_float(spec, max_steps)?;
        let err = (1.0 - e.total.as_f64()).abs();
        Ok(report(&e, false, err))
    }
}

fn report<W: Weight>(e: &Enumeration<W>, exact: bool, mass_error: f64) -> EnumerationReport {
    let max_visits = e.origin_visits.keys().max().copied().unwrap_or(0);
    EnumerationReport {
        exact,
        sites: e.sites.clone(),
        activation: e
            .activation
            .iter()
            .map(|(k, v)| (k.clone(), v.as_f64()))
            .collect(),
        visits_at_least: (0..=max_visits)
            .map(|k| e.visits_at_least(k).as_f64())
            .collect(),
        all_dead: e.all_dead.as_f64(),
        mass_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Occupancy, SequenceFamily};

    fn spec(sites: Vec<u64>, p: f64, l: f64) -> ModelSpec {
        ModelSpec::new(
            SequenceFamily::constant(l),
            SequenceFamily::constant(p),
            Occupancy::List { sites },
        )
        .unwrap()
    }

    #[test]
    fn two_sites_by_hand() {
        let e = enumerate_exact(&spec(vec![0, 1], 0.5, 0.5), 4).unwrap();
        assert!(e.total.is_one());
        // reach +1 at tick 1 (R) or tick 3 (L R R)
        let expected = BigRational::new(BigInt::from(17), BigInt::from(64));
        assert_eq!(e.site_activated(1), expected);
    }

    #[test]
    fn lone_walker_lifetime() {
        for t in 1..=8 {
            let e = enumerate_exact(&spec(vec![0], 0.5, 0.3), t).unwrap();
            let expected =
                BigRational::one() - BigRational::new(BigInt::from(1), BigInt::from(1u64 << t));
            assert_eq!(e.all_dead, expected);
        }
    }

    #[test]
    fn float_mode_matches_exact() {
        let s = spec(vec![0, 1, 2], 0.8, 0.4);
        let exact = enumerate_exact(&s, 6).unwrap();
        let float = enumerate_float(&s, 6).unwrap();
        for k in 0..4 {
            let a = exact.visits_at_least(k).as_f64();
            let b = float.visits_at_least(k).as_f64();
            assert!((a - b).abs() < 1e-15);
        }
        assert!((float.total.as_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recurrent_pair_is_rejected_by_the_spec() {
        let s = ModelSpec::new(
            SequenceFamily::constant(0.5),
            SequenceFamily::constant(1.0),
            Occupancy::List { sites: vec![0, 1] },
        );
        assert!(s.is_err());
    }
}
