//! Walkers with geometric lifespans.

use std::cmp::Ordering;

use crate::analytics::{
    classify_sumexp_tail, lifetime_deficit, origin_return_deficit, r_sequence, tilt, SeriesStatus,
};
use crate::asymptotic::{Expansion, Scale};
use crate::model::{BlockPlan, Density, ModelSpec, Role, Tail};

use super::{CriteriaError, GlobalStatus, LocalStatus, Rule, Verdict};

/// Tails of the two sequences with `δ = 1/2 − l` and `Δ = 1 − p`.
struct Tails {
    drift: Tail,
    lifetime: Tail,
    delta: Expansion,
    big: Expansion,
}

impl Tails {
    fn of(spec: &ModelSpec) -> Option<Tails> {
        let drift = spec.drift().tail()?;
        let lifetime = spec.lifetime().tail()?;
        let delta = tilt(&drift);
        let big = lifetime_deficit(&lifetime);
        Some(Tails {
            drift,
            lifetime,
            delta,
            big,
        })
    }

    /// `p_n l_n − 1/2 = −δ − Δ/2 + Δδ`.
    fn left_excess(&self) -> Expansion {
        self.delta
            .neg()
            .sub(&self.big.scale(0.5))
            .add(&self.big.mul(&self.delta))
    }

    /// `p_n (1 − l_n) − 1/2 = δ − Δ/2 − Δδ`.
    fn right_excess(&self) -> Expansion {
        self.delta
            .sub(&self.big.scale(0.5))
            .sub(&self.big.mul(&self.delta))
    }

    /// `Σ_k (1 − p_k)^{L/2} < ∞` and `Σ_{p_k l_k > 1/2} (l_k − 1/2)^L < ∞` over
    /// all occupied sites, which contain every block.
    fn global_blocks(&self, size: usize) -> bool {
        let half = size as f64 / 2.0;
        let lifetime_ok = if self.big.is_zero() {
            true
        } else {
            self.big.powf(half).and_then(|e| e.summable()) == Some(true)
        };
        lifetime_ok
            && eventually_empty_or(&self.left_excess(), || self.delta.neg(), size as f64, 0.0)
    }

    /// `Σ_{p_k(1−l_k) > 1/2} k^L δ_k^L + Σ k^L Δ_k^{L/2} < ∞`.
    fn survival_series(&self, size: usize) -> bool {
        let l = size as f64;
        let lifetime_ok = if self.big.is_zero() {
            true
        } else {
            self.big
                .powf(l / 2.0)
                .map(|e| e.mul_scale(Scale::power(l)))
                .and_then(|e| e.summable())
                == Some(true)
        };
        lifetime_ok && eventually_empty_or(&self.right_excess(), || self.delta.clone(), l, l)
    }

    fn deficit(&self) -> Option<Expansion> {
        origin_return_deficit(&self.drift, &self.lifetime)
    }

    fn r(&self) -> Option<Expansion> {
        r_sequence(&self.delta, &self.big)
    }
}

/// True when `excess ≤ 0` eventually (so a sum restricted to `excess > 0` has
/// finitely many terms), or when `Σ n^k · base^L` converges.
fn eventually_empty_or(
    excess: &Expansion,
    base: impl Fn() -> Expansion,
    power: f64,
    k: f64,
) -> bool {
    match excess.sign() {
        Some(Ordering::Less) | Some(Ordering::Equal) => true,
        _ => {
            let b = base();
            if b.sign() != Some(Ordering::Greater) {
                return false;
            }
            b.powf(power)
                .map(|e| e.mul_scale(Scale::power(k)))
                .and_then(|e| e.summable())
                == Some(true)
        }
    }
}

/// Global pieces that need no block plan.
fn global_without_plan(spec: &ModelSpec, tails: Option<&Tails>, v: &mut Verdict) {
    let prof = spec.profile(Role::Lifetime, 1.0);
    if prof.equal.is_positive() {
        v.global = GlobalStatus::Trivial;
        v.cite(Rule::ImmortalSite);
        if let Some(n) = prof.first_equal {
            v.diag("immortal_site", n);
        }
        return;
    }
    let finite = matches!(spec.occupied().density(), Density::Finite(_));
    let below_one = finite || tails.is_some_and(|t| t.lifetime.limit() < 1.0);
    if prof.equal.is_zero() && below_one {
        v.global = GlobalStatus::Dies;
        v.infinite_activation = LocalStatus::Dies;
        v.cite(if finite {
            Rule::FiniteOccupancy
        } else {
            Rule::BoundedLifetime
        });
        return;
    }
    // every walker drifts left and liminf l_n > 1/2: even immortal walkers
    // activate finitely many sites
    let drift = spec.profile(Role::Drift, 0.5);
    if drift.below.is_zero()
        && drift.equal.is_zero()
        && tails.is_some_and(|t| t.drift.limit() > 0.5)
    {
        v.global = GlobalStatus::Dies;
        v.infinite_activation = LocalStatus::Dies;
        v.cite(Rule::GenerationChain);
        v.cite(Rule::LifetimeMonotonicity);
    }
}

/// Plan-free extinction criteria for the origin.
fn local_extinction(spec: &ModelSpec, tails: Option<&Tails>, v: &mut Verdict) -> SeriesStatus {
    if v.global == GlobalStatus::Dies {
        v.local = LocalStatus::Dies;
        if v.cites(Rule::BoundedLifetime) {
            v.cite(Rule::ExtinctionByLifetime);
        }
        return SeriesStatus::Converges;
    }
    if let Density::Finite(_) = spec.occupied().density() {
        v.local = LocalStatus::Dies;
        v.cite(Rule::FiniteOccupancy);
        return SeriesStatus::Converges;
    }
    let Some(t) = tails else {
        v.note("no tail rules: eventual conditions cannot be checked");
        return SeriesStatus::Inconclusive;
    };
    let head = t.deficit().map(|a| {
        let (s, r) = classify_sumexp_tail(&a);
        v.diag("deficit", a.to_string());
        v.diag("head_series", format!("{s:?} ({})", r.tag()));
        s
    });
    let converges = |a: &Expansion| classify_sumexp_tail(a).0 == SeriesStatus::Converges;
    let drift_part = if t.delta.sign() == Some(Ordering::Greater) {
        t.big
            .add(&t.delta.scale(2.0))
            .sub(&t.big.mul(&t.delta).scale(2.0))
    } else {
        t.big.clone()
    };
    let rule = if converges(&t.big) {
        Some(Rule::ExtinctionByLifetime)
    } else if converges(&drift_part) {
        Some(Rule::ExtinctionByDrift)
    } else if t.drift.limit() <= 0.5 && deficit_above_log(t) {
        Some(Rule::ExtinctionByDeficit)
    } else if head == Some(SeriesStatus::Converges) {
        Some(Rule::HeadSeries)
    } else {
        None
    };
    match rule {
        Some(r) => {
            v.local = LocalStatus::Dies;
            v.cite(r);
            SeriesStatus::Converges
        }
        None => head.unwrap_or(SeriesStatus::Inconclusive),
    }
}

/// `liminf n r_n / ln n > 1`.
fn deficit_above_log(t: &Tails) -> bool {
    let Some(r) = t.r() else { return false };
    let ratio = r.mul_scale(Scale::new(1.0, -1.0, 0.0));
    match ratio.leading() {
        Some(lead) => match lead.scale.growth_cmp(&Scale::ONE) {
            Ordering::Greater => lead.coeff > 0.0,
            Ordering::Equal => lead.coeff > 1.0,
            Ordering::Less => false,
        },
        None => false,
    }
}

/// Which part of the odd-block criterion holds at block size `L`, if any.
fn odd_block_rule(t: &Tails, size: usize) -> Option<Rule> {
    let nr = t.r()?.mul_scale(Scale::N);
    if nr.bounded() == Some(true) {
        return Some(Rule::SurvivalBoundedDeficit);
    }
    let excess = nr.sub(&Expansion::monomial(1.0, Scale::LOG));
    if matches!(excess.sign(), Some(Ordering::Less) | Some(Ordering::Equal)) {
        return Some(Rule::SurvivalDeficitBelowLog);
    }
    t.survival_series(size).then_some(Rule::SurvivalBlockSeries)
}

fn mortal_verdict(spec: &ModelSpec, plans: &[BlockPlan]) -> Verdict {
    let tails = Tails::of(spec);
    let mut v = Verdict::inconclusive();
    global_without_plan(spec, tails.as_ref(), &mut v);
    let head = local_extinction(spec, tails.as_ref(), &mut v);
    if v.global == GlobalStatus::Dies {
        return v.finish();
    }
    let Some(t) = tails.as_ref() else {
        return v.finish();
    };
    if plans.is_empty() && v.local == LocalStatus::Inconclusive {
        v.note("no block plan: occupied sites need bounded gaps for the block criteria");
    }
    let mut global_size = None;
    for plan in plans {
        let size = plan.size();
        if !t.global_blocks(size) {
            continue;
        }
        global_size.get_or_insert(size);
        if v.local != LocalStatus::Inconclusive {
            break;
        }
        if let Some(rule) = odd_block_rule(t, size) {
            debug_assert_ne!(
                head,
                SeriesStatus::Converges,
                "both origin series certified"
            );
            v.local = LocalStatus::SurvivesWP;
            v.cite(rule);
            global_size = Some(size);
            break;
        }
    }
    if let Some(size) = global_size {
        v.diag("block_size", size);
        if v.global != GlobalStatus::Trivial {
            v.global = GlobalStatus::Survives;
        }
        v.infinite_activation = LocalStatus::SurvivesWP;
        v.cite(Rule::GlobalBlocks);
    }
    if v.local == LocalStatus::Inconclusive && head == SeriesStatus::Diverges {
        v.note("the origin series diverges but no block plan certifies local survival");
    }
    v.finish()
}

fn check_plan(spec: &ModelSpec, plan: &BlockPlan) -> Result<(), CriteriaError> {
    if plan.matches(spec) {
        Ok(())
    } else {
        Err(CriteriaError::PlanMismatch)
    }
}

/// Global survival or extinction using `plan` for the block criterion. Local
/// fields are only filled in when they follow from the global answer.
pub fn classify_mortal_global(
    spec: &ModelSpec,
    plan: &BlockPlan,
) -> Result<Verdict, CriteriaError> {
    check_plan(spec, plan)?;
    let tails = Tails::of(spec);
    let mut v = Verdict::inconclusive();
    global_without_plan(spec, tails.as_ref(), &mut v);
    if v.global == GlobalStatus::Dies {
        local_extinction(spec, tails.as_ref(), &mut v);
    } else if let Some(t) = tails.as_ref() {
        if t.global_blocks(plan.size()) {
            if v.global != GlobalStatus::Trivial {
                v.global = GlobalStatus::Survives;
            }
            v.infinite_activation = LocalStatus::SurvivesWP;
            v.cite(Rule::GlobalBlocks);
            v.diag("block_size", plan.size());
        }
    }
    Ok(v.finish())
}

/// Local survival or extinction with a single block plan.
pub fn classify_mortal_local(spec: &ModelSpec, plan: &BlockPlan) -> Result<Verdict, CriteriaError> {
    check_plan(spec, plan)?;
    Ok(mortal_verdict(spec, std::slice::from_ref(plan)))
}

/// Mortal classifier with consecutive-interval plans of size `1..=max_block`,
/// keeping the first size that certifies.
pub fn classify_mortal(spec: &ModelSpec, max_block: usize) -> Result<Verdict, CriteriaError> {
    let plans: Vec<BlockPlan> = (1..=max_block)
        .map_while(|l| BlockPlan::consecutive(spec.occupied(), l).ok())
        .collect();
    Ok(mortal_verdict(spec, &plans))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Occupancy, SequenceFamily};

    fn spec(drift: SequenceFamily, lifetime: SequenceFamily) -> ModelSpec {
        ModelSpec::new(drift, lifetime, Occupancy::All).unwrap()
    }

    #[test]
    fn bounded_lifetime_dies() {
        let s = spec(
            SequenceFamily::constant(0.3),
            SequenceFamily::constant(0.99),
        );
        let v = classify_mortal(&s, 8).unwrap();
        assert_eq!(v.global, GlobalStatus::Dies);
        assert_eq!(v.local, LocalStatus::Dies);
        assert!(v.cites(Rule::BoundedLifetime) && v.cites(Rule::ExtinctionByLifetime));
    }

    #[test]
    fn fast_lifetime_right_drift_survives_globally() {
        let s = spec(
            SequenceFamily::power_below(1.0, 0.25, 0.3),
            SequenceFamily::power_lifetime(3.0, 1.0, 0.9),
        );
        let plan = BlockPlan::consecutive(&Occupancy::All, 1).unwrap();
        let v = classify_mortal_global(&s, &plan).unwrap();
        assert_eq!(v.global, GlobalStatus::Survives);
        assert!(v.cites(Rule::GlobalBlocks));
    }

    #[test]
    fn immortal_site_is_trivial() {
        let mut values = vec![0.5; 8];
        values[7] = 1.0;
        let s = spec(
            SequenceFamily::constant(0.3),
            SequenceFamily::table(values, Some(SequenceFamily::constant(0.5))),
        );
        let v = classify_mortal(&s, 8).unwrap();
        assert_eq!(v.global, GlobalStatus::Trivial);
        assert_eq!(v.diagnostics["immortal_site"], 7);
    }

    #[test]
    fn local_examples() {
        let s = spec(SequenceFamily::constant(0.7), SequenceFamily::constant(0.9));
        let v = classify_mortal(&s, 8).unwrap();
        assert_eq!(v.local, LocalStatus::Dies);
        assert!(v.cites(Rule::ExtinctionByLifetime));

        let s = spec(
            SequenceFamily::power_below(2.0, 0.25, 0.3),
            SequenceFamily::power_lifetime(3.0, 1.0, 0.9),
        );
        let v = classify_mortal(&s, 64).unwrap();
        assert_eq!(v.local, LocalStatus::SurvivesWP);
        assert_eq!(v.global, GlobalStatus::Survives);

        let s = spec(
            SequenceFamily::constant(0.5),
            SequenceFamily::power_lifetime(1.0, 0.5, 0.9),
        );
        let v = classify_mortal(&s, 64).unwrap();
        assert_eq!(v.local, LocalStatus::Dies);
        assert!(v.cites(Rule::ExtinctionByDeficit), "{v:?}");
    }

    #[test]
    fn plan_mismatch() {
        let s = spec(SequenceFamily::constant(0.3), SequenceFamily::constant(0.9));
        let plan = BlockPlan::consecutive(&Occupancy::Arithmetic { step: 2 }, 1).unwrap();
        assert_eq!(
            classify_mortal_local(&s, &plan).unwrap_err(),
            CriteriaError::PlanMismatch
        );
    }
}
