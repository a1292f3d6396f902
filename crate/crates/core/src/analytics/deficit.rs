//! Leading-order behaviour of `1 − P(A_n | B_n)^{1/n}` from tail rules.

use std::cmp::Ordering;

use crate::asymptotic::{Expansion, Scale};
use crate::model::Tail;

use super::first_passage_left_raw;

/// `δ_n = 1/2 − l_n`.
pub fn tilt(drift: &Tail) -> Expansion {
    drift.offset_from(0.5).neg()
}

/// `Δ_n = 1 − p_n`.
pub fn lifetime_deficit(lifetime: &Tail) -> Expansion {
    lifetime.offset_from(1.0).neg()
}

/// `r_n = 2δ_n + √(2Δ_n + 4δ_n²)`, evaluated without cancellation when
/// `δ_n < 0` as `2Δ_n / (√(2Δ_n + 4δ_n²) + 2|δ_n|)`. Leading order only.
pub fn r_sequence(delta: &Expansion, big_delta: &Expansion) -> Option<Expansion> {
    let radicand = big_delta.scale(2.0).add(&delta.mul(delta).scale(4.0));
    let root = if radicand.is_zero() {
        Expansion::zero()
    } else {
        radicand.sqrt()?
    };
    let r = match delta.sign()? {
        Ordering::Less => {
            if big_delta.is_zero() {
                return Some(Expansion::zero());
            }
            let denom = root.add(&delta.neg().scale(2.0));
            big_delta.scale(2.0).div(&denom)?
        }
        _ => delta.scale(2.0).add(&root),
    };
    Some(r.truncate_leading())
}

/// Expansion of `a_n` with `P(A_n | B_n) = (1 − a_n)^n`.
///
/// When `(p_n, l_n)` tends to a point other than `(1, ≥ 1/2)` the deficit tends
/// to a positive constant; otherwise it is asymptotic to `r_n`. Returns `None`
/// when the leading behaviour cannot be determined.
pub fn origin_return_deficit(drift: &Tail, lifetime: &Tail) -> Option<Expansion> {
    let dl = drift.limit();
    let pl = lifetime.limit();
    if pl < 1.0 || dl < 0.5 {
        let a = 1.0 - first_passage_left_raw(pl, dl);
        let exact = matches!(drift, Tail::Constant(_)) && matches!(lifetime, Tail::Constant(_));
        return Some(if exact {
            Expansion::constant(a)
        } else {
            Expansion::leading_only(a, Scale::ONE)
        });
    }
    let delta = tilt(drift);
    let big = lifetime_deficit(lifetime);
    if big.is_zero() {
        return match delta.sign()? {
            Ordering::Greater => Some(delta.truncate_leading().scale(4.0)),
            _ => Some(Expansion::zero()),
        };
    }
    r_sequence(&delta, &big)
}
