//! Symbolic parameter sequences.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::asymptotic::{Expansion, Scale};

/// Which side of the limit a sequence approaches from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Below => -1.0,
            Side::Above => 1.0,
        }
    }

    fn ordering(self) -> Ordering {
        match self {
            Side::Below => Ordering::Less,
            Side::Above => Ordering::Greater,
        }
    }
}

/// Block boundaries of a staircase. Level `j ≥ 1` holds on
/// `[j^m, (j+1)^m)` for `Power`, and on `[b^(j-1), b^j)` for `Exponential`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundaries {
    Power { exponent: u32 },
    Exponential { base: u64 },
}

impl Boundaries {
    /// Level index of site `n ≥ 1`.
    pub fn level(&self, n: u64) -> u64 {
        match *self {
            Boundaries::Power { exponent } => integer_root(n, exponent),
            Boundaries::Exponential { base } => {
                let mut j = 1;
                let mut upper = base as u128;
                while upper <= n as u128 {
                    upper *= base as u128;
                    j += 1;
                }
                j
            }
        }
    }

    /// First site of level `j ≥ 1`, saturating at `u64::MAX`.
    pub fn level_start(&self, j: u64) -> u64 {
        let v = match *self {
            Boundaries::Power { exponent } => (j as u128).checked_pow(exponent),
            Boundaries::Exponential { base } => (base as u128).checked_pow((j - 1) as u32),
        };
        v.map_or(u64::MAX, |v| v.min(u64::MAX as u128) as u64)
    }
}

fn integer_root(n: u64, m: u32) -> u64 {
    if m == 1 {
        return n;
    }
    let mut j = (n as f64).powf(1.0 / m as f64).round() as u64;
    let pow = |j: u64| (j as u128).checked_pow(m).unwrap_or(u128::MAX);
    while j > 0 && pow(j) > n as u128 {
        j -= 1;
    }
    while pow(j + 1) <= n as u128 {
        j += 1;
    }
    j
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: u64,
    /// Exclusive end; `None` means the piece runs to infinity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<u64>,
    pub family: SequenceFamily,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// A parameter sequence indexed by site.
///
/// Power laws are exact for `n ≥ 1`: `1/2 ∓ scale·ln(n)^κ/n^α` (and
/// `1 − scale·ln(n)^κ/n^β` for lifetimes), where `ln` is taken at `max(n, 3)`
/// and `κ = log_power` defaults to 0. Index 0 always takes `at_zero`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceFamily {
    Constant {
        value: f64,
    },
    PowerLawBelow {
        alpha: f64,
        scale: f64,
        at_zero: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        log_power: f64,
    },
    PowerLawAbove {
        alpha: f64,
        scale: f64,
        at_zero: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        log_power: f64,
    },
    PowerLawLifetime {
        beta: f64,
        scale: f64,
        at_zero: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        log_power: f64,
    },
    /// `1/2 ± scale/j^alpha` on level `j` of `boundaries`.
    Staircase {
        side: Side,
        alpha: f64,
        scale: f64,
        boundaries: Boundaries,
        at_zero: f64,
    },
    /// Explicit values for `0..values.len()`, then `tail` (evaluated at the
    /// absolute index).
    Table {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Box<SequenceFamily>>,
    },
    /// The first piece whose range contains `n` decides.
    Piecewise {
        pieces: Vec<Piece>,
    },
}

/// Long-run behaviour of a family.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    /// Eventually equal to the constant.
    Constant(f64),
    /// `limit + side·deviation` with `deviation > 0` decaying to zero.
    Approach {
        limit: f64,
        side: Side,
        deviation: Expansion,
    },
}

impl Tail {
    pub fn limit(&self) -> f64 {
        match self {
            Tail::Constant(v) => *v,
            Tail::Approach { limit, .. } => *limit,
        }
    }

    /// How eventual values compare with `threshold`.
    pub fn relation(&self, threshold: f64) -> Ordering {
        match self {
            Tail::Constant(v) => v.total_cmp(&threshold),
            Tail::Approach { limit, side, .. } => match limit.total_cmp(&threshold) {
                Ordering::Equal => side.ordering(),
                o => o,
            },
        }
    }

    /// `value − threshold` as an expansion; exact constants when the tail is.
    pub fn offset_from(&self, threshold: f64) -> Expansion {
        match self {
            Tail::Constant(v) => Expansion::constant(v - threshold),
            Tail::Approach {
                limit,
                side,
                deviation,
            } => {
                let d = deviation.scale(side.sign());
                if *limit == threshold {
                    d
                } else {
                    Expansion::constant(limit - threshold)
                        .add(&d)
                        .truncate_leading()
                }
            }
        }
    }
}

/// A monotone power-law deviation `c + sign·scale·n^{-e}·L(n)^κ`.
struct PowerLaw {
    center: f64,
    side: Side,
    exponent: f64,
    scale: f64,
    log_power: f64,
}

impl PowerLaw {
    fn deviation(&self, n: u64) -> f64 {
        let x = n as f64;
        let mut d = self.scale * x.powf(-self.exponent);
        if self.log_power != 0.0 {
            d *= x.max(3.0).ln().powf(self.log_power);
        }
        d
    }

    fn value(&self, n: u64) -> f64 {
        self.center + self.side.sign() * self.deviation(n)
    }

    /// First index from which the deviation is decreasing.
    fn monotone_from(&self) -> u64 {
        if self.log_power <= 0.0 {
            1
        } else {
            ((self.log_power / self.exponent).exp().ceil() as u64).max(3)
        }
    }

    fn settle_index(&self, threshold: f64) -> Option<u64> {
        if threshold == self.center
            || self.center.total_cmp(&threshold) != self.side.ordering().reverse()
        {
            return Some(1);
        }
        let gap = (self.center - threshold).abs();
        let mut n = self.monotone_from();
        while self.deviation(n) >= gap {
            n = n.checked_mul(2)?;
        }
        Some(n)
    }
}

pub(crate) const LEVEL_EPS: f64 = 1e-12;

impl SequenceFamily {
    pub fn constant(value: f64) -> Self {
        SequenceFamily::Constant { value }
    }

    /// `l_n = 1/2 − scale/n^alpha`.
    pub fn power_below(alpha: f64, scale: f64, at_zero: f64) -> Self {
        SequenceFamily::PowerLawBelow {
            alpha,
            scale,
            at_zero,
            log_power: 0.0,
        }
    }

    /// `l_n = 1/2 + scale/n^alpha`.
    pub fn power_above(alpha: f64, scale: f64, at_zero: f64) -> Self {
        SequenceFamily::PowerLawAbove {
            alpha,
            scale,
            at_zero,
            log_power: 0.0,
        }
    }

    /// `p_n = 1 − scale/n^beta`.
    pub fn power_lifetime(beta: f64, scale: f64, at_zero: f64) -> Self {
        SequenceFamily::PowerLawLifetime {
            beta,
            scale,
            at_zero,
            log_power: 0.0,
        }
    }

    pub fn table(values: Vec<f64>, tail: Option<SequenceFamily>) -> Self {
        SequenceFamily::Table {
            values,
            tail: tail.map(Box::new),
        }
    }

    fn power_law(&self) -> Option<PowerLaw> {
        let (center, side, exponent, scale, log_power) = match *self {
            SequenceFamily::PowerLawBelow {
                alpha,
                scale,
                log_power,
                ..
            } => (0.5, Side::Below, alpha, scale, log_power),
            SequenceFamily::PowerLawAbove {
                alpha,
                scale,
                log_power,
                ..
            } => (0.5, Side::Above, alpha, scale, log_power),
            SequenceFamily::PowerLawLifetime {
                beta,
                scale,
                log_power,
                ..
            } => (1.0, Side::Below, beta, scale, log_power),
            _ => return None,
        };
        Some(PowerLaw {
            center,
            side,
            exponent,
            scale,
            log_power,
        })
    }

    /// Raw value at `n` and whether it came from a formula (which may need
    /// clipping) rather than an explicit entry. `None` outside the domain.
    pub(crate) fn raw(&self, n: u64) -> Option<(f64, bool)> {
        match self {
            SequenceFamily::Constant { value } => Some((*value, false)),
            SequenceFamily::PowerLawBelow { at_zero, .. }
            | SequenceFamily::PowerLawAbove { at_zero, .. }
            | SequenceFamily::PowerLawLifetime { at_zero, .. }
            | SequenceFamily::Staircase { at_zero, .. }
                if n == 0 =>
            {
                Some((*at_zero, false))
            }
            SequenceFamily::Staircase {
                side,
                alpha,
                scale,
                boundaries,
                ..
            } => {
                let j = boundaries.level(n) as f64;
                Some((0.5 + side.sign() * scale * j.powf(-alpha), true))
            }
            SequenceFamily::Table { values, tail } => match values.get(n as usize) {
                Some(v) => Some((*v, false)),
                None => tail.as_ref()?.raw(n),
            },
            SequenceFamily::Piecewise { pieces } => pieces
                .iter()
                .find(|p| n >= p.start && p.end.is_none_or(|e| n < e))?
                .family
                .raw(n),
            _ => Some((self.power_law()?.value(n), true)),
        }
    }

    /// Long-run behaviour, or `None` when the family has a finite domain.
    pub fn tail(&self) -> Option<Tail> {
        match self {
            SequenceFamily::Constant { value } => Some(Tail::Constant(*value)),
            SequenceFamily::Staircase {
                side,
                alpha,
                scale,
                boundaries,
                ..
            } => {
                let deviation = match *boundaries {
                    Boundaries::Power { exponent } => {
                        Expansion::leading_only(*scale, Scale::power(-alpha / exponent as f64))
                    }
                    Boundaries::Exponential { base } => Expansion::leading_only(
                        scale * (base as f64).ln().powf(*alpha),
                        Scale::new(0.0, -alpha, 0.0),
                    ),
                };
                Some(Tail::Approach {
                    limit: 0.5,
                    side: *side,
                    deviation,
                })
            }
            SequenceFamily::Table { tail, .. } => tail.as_ref()?.tail(),
            SequenceFamily::Piecewise { pieces } => {
                let last = pieces.last()?;
                if last.end.is_some() {
                    return None;
                }
                last.family.tail()
            }
            _ => {
                let pl = self.power_law()?;
                Some(Tail::Approach {
                    limit: pl.center,
                    side: pl.side,
                    deviation: Expansion::monomial(
                        pl.scale,
                        Scale::new(-pl.exponent, pl.log_power, 0.0),
                    ),
                })
            }
        }
    }

    /// An index `N` from which every value relates to `threshold` the same way
    /// the tail does. `None` when no such index is available.
    pub fn settle_index(&self, threshold: f64) -> Option<u64> {
        match self {
            SequenceFamily::Constant { .. } => Some(0),
            SequenceFamily::Staircase {
                side,
                alpha,
                scale,
                boundaries,
                ..
            } => {
                if threshold == 0.5 || 0.5f64.total_cmp(&threshold) != side.ordering().reverse() {
                    return Some(1);
                }
                let gap = (0.5 - threshold).abs();
                let mut j: u64 = 1;
                while scale * (j as f64).powf(-alpha) >= gap {
                    j = j.checked_mul(2)?;
                }
                let start = boundaries.level_start(j);
                (start < u64::MAX).then_some(start)
            }
            SequenceFamily::Table { values, tail } => Some(
                tail.as_ref()?
                    .settle_index(threshold)?
                    .max(values.len() as u64),
            ),
            SequenceFamily::Piecewise { pieces } => {
                let last = pieces.last()?;
                if last.end.is_some() {
                    return None;
                }
                Some(last.family.settle_index(threshold)?.max(last.start))
            }
            _ => self.power_law()?.settle_index(threshold),
        }
    }

    /// One past the last index with a value, for finite-domain families.
    pub fn domain_end(&self) -> Option<u64> {
        match self {
            SequenceFamily::Table { values, tail } => match tail {
                Some(t) => t.domain_end().map(|e| e.max(values.len() as u64)),
                None => Some(values.len() as u64),
            },
            SequenceFamily::Piecewise { pieces } => match pieces.last() {
                None => Some(0),
                Some(p) => match p.end {
                    Some(e) => Some(e),
                    None => p.family.domain_end(),
                },
            },
            _ => None,
        }
    }

    /// Check the structural parameters; returns a field name and reason.
    pub(crate) fn check_parameters(&self) -> Result<(), (String, String)> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err((
                    name.to_string(),
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err((name.to_string(), format!("must be finite, got {v}")))
            }
        };
        match self {
            SequenceFamily::Constant { value } => finite("value", *value),
            SequenceFamily::PowerLawBelow {
                alpha,
                scale,
                at_zero,
                log_power,
            }
            | SequenceFamily::PowerLawAbove {
                alpha,
                scale,
                at_zero,
                log_power,
            } => {
                positive("alpha", *alpha)?;
                positive("scale", *scale)?;
                finite("at_zero", *at_zero)?;
                finite("log_power", *log_power)
            }
            SequenceFamily::PowerLawLifetime {
                beta,
                scale,
                at_zero,
                log_power,
            } => {
                positive("beta", *beta)?;
                positive("scale", *scale)?;
                finite("at_zero", *at_zero)?;
                finite("log_power", *log_power)
            }
            SequenceFamily::Staircase {
                alpha,
                scale,
                boundaries,
                at_zero,
                ..
            } => {
                positive("alpha", *alpha)?;
                positive("scale", *scale)?;
                finite("at_zero", *at_zero)?;
                match boundaries {
                    Boundaries::Power { exponent: 0 } => {
                        Err(("boundaries.exponent".into(), "must be at least 1".into()))
                    }
                    Boundaries::Exponential { base } if *base < 2 => {
                        Err(("boundaries.base".into(), "must be at least 2".into()))
                    }
                    _ => Ok(()),
                }
            }
            SequenceFamily::Table { values, tail } => {
                for (i, v) in values.iter().enumerate() {
                    finite(&format!("values[{i}]"), *v)?;
                }
                match tail {
                    Some(t) => t
                        .check_parameters()
                        .map_err(|(f, r)| (format!("tail.{f}"), r)),
                    None => Ok(()),
                }
            }
            SequenceFamily::Piecewise { pieces } => {
                let mut next = 0;
                for (i, p) in pieces.iter().enumerate() {
                    if p.start != next {
                        return Err((
                            format!("pieces[{i}].start"),
                            format!("pieces must be contiguous from 0; expected {next}"),
                        ));
                    }
                    p.family
                        .check_parameters()
                        .map_err(|(f, r)| (format!("pieces[{i}].family.{f}"), r))?;
                    match p.end {
                        Some(e) if e <= p.start => {
                            return Err((format!("pieces[{i}].end"), "must exceed start".into()))
                        }
                        Some(e) => next = e,
                        None if i + 1 != pieces.len() => {
                            return Err((
                                format!("pieces[{i}].end"),
                                "only the last piece may be open-ended".into(),
                            ))
                        }
                        None => {}
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_levels() {
        let b = Boundaries::Power { exponent: 3 };
        assert_eq!(b.level(1), 1);
        assert_eq!(b.level(7), 1);
        assert_eq!(b.level(8), 2);
        assert_eq!(b.level(26), 2);
        assert_eq!(b.level(27), 3);
        assert_eq!(b.level_start(4), 64);
        let e = Boundaries::Exponential { base: 2 };
        assert_eq!(e.level(1), 1);
        assert_eq!(e.level(2), 2);
        assert_eq!(e.level(3), 2);
        assert_eq!(e.level(4), 3);
        assert_eq!(e.level_start(3), 4);
    }

    #[test]
    fn integer_roots_near_powers() {
        for j in 1u64..2000 {
            let c = j * j * j;
            assert_eq!(integer_root(c, 3), j);
            assert_eq!(integer_root(c - 1, 3), j - 1);
        }
    }

    #[test]
    fn settle_index_for_offset_threshold() {
        // 1 - 1/n^2 exceeds 1/2 from n = 2 on.
        let f = SequenceFamily::power_lifetime(2.0, 1.0, 0.9);
        let n = f.settle_index(0.5).unwrap();
        for k in n..n + 100 {
            assert!(f.raw(k).unwrap().0 > 0.5);
        }
    }
}
