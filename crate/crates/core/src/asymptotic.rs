//! Asymptotic expansions in the scale `n^a (ln n)^b (ln ln n)^c`.
//!
//! Tail rules of parameter sequences are described by an [`Expansion`]: a finite
//! sum of such monomials, either exact for large `n` or valid up to an error
//! that is `o(S)` for a declared scale `S`. Every "eventually" hypothesis the
//! classifiers need reduces to comparing leading terms, so the algebra here
//! only has to track leading behaviour honestly.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The monomial `n^power · (ln n)^log · (ln ln n)^loglog`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub power: f64,
    #[serde(default)]
    pub log: f64,
    #[serde(default)]
    pub loglog: f64,
}

impl Scale {
    pub const ONE: Scale = Scale::new(0.0, 0.0, 0.0);
    pub const LOG: Scale = Scale::new(0.0, 1.0, 0.0);
    pub const LOGLOG: Scale = Scale::new(0.0, 0.0, 1.0);
    /// `n`
    pub const N: Scale = Scale::new(1.0, 0.0, 0.0);

    pub const fn new(power: f64, log: f64, loglog: f64) -> Self {
        Scale { power, log, loglog }
    }

    pub const fn power(power: f64) -> Self {
        Scale::new(power, 0.0, 0.0)
    }

    /// Growth order; lexicographic in (power, log, loglog).
    pub fn growth_cmp(&self, other: &Scale) -> Ordering {
        self.power
            .total_cmp(&other.power)
            .then(self.log.total_cmp(&other.log))
            .then(self.loglog.total_cmp(&other.loglog))
    }

    pub fn mul(&self, other: &Scale) -> Scale {
        Scale::new(
            self.power + other.power,
            self.log + other.log,
            self.loglog + other.loglog,
        )
    }

    pub fn powf(&self, e: f64) -> Scale {
        Scale::new(self.power * e, self.log * e, self.loglog * e)
    }

    /// Whether the monomial stays bounded as `n → ∞`.
    pub fn is_bounded(&self) -> bool {
        self.growth_cmp(&Scale::ONE) != Ordering::Greater
    }

    /// Whether `Σ_n` of the monomial is finite.
    pub fn is_summable(&self) -> bool {
        let m1 = |x: f64| x.total_cmp(&-1.0);
        match m1(self.power) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match m1(self.log) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => self.loglog < -1.0,
            },
        }
    }

    /// Numeric value at `n`; `ln` and `ln ln` are evaluated at `max(n, 16)` so
    /// the monomial is finite and positive everywhere.
    pub fn eval(&self, n: f64) -> f64 {
        let m = n.max(16.0);
        let mut v = n.powf(self.power);
        if self.log != 0.0 {
            v *= m.ln().powf(self.log);
        }
        if self.loglog != 0.0 {
            v *= m.ln().ln().powf(self.loglog);
        }
        v
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.power != 0.0 {
            parts.push(format!("n^{}", self.power));
        }
        if self.log != 0.0 {
            parts.push(format!("ln(n)^{}", self.log));
        }
        if self.loglog != 0.0 {
            parts.push(format!("lnln(n)^{}", self.loglog));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub scale: Scale,
}

impl Term {
    pub fn new(coeff: f64, scale: Scale) -> Self {
        Term { coeff, scale }
    }
}

/// Sum of terms in strictly decreasing growth order, plus an error bound.
///
/// `error == None` means the expansion is exact for all large `n`. Otherwise the
/// remainder is `o(error)` and no stored term is smaller than `error`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    terms: Vec<Term>,
    error: Option<Scale>,
}

impl Expansion {
    pub fn zero() -> Self {
        Expansion {
            terms: Vec::new(),
            error: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Expansion::exact(vec![Term::new(c, Scale::ONE)])
    }

    pub fn monomial(coeff: f64, scale: Scale) -> Self {
        Expansion::exact(vec![Term::new(coeff, scale)])
    }

    pub fn exact(terms: Vec<Term>) -> Self {
        Expansion::normalized(terms, None)
    }

    /// Expansion whose remainder is `o(error)`.
    pub fn with_error(terms: Vec<Term>, error: Scale) -> Self {
        Expansion::normalized(terms, Some(error))
    }

    /// `coeff · scale · (1 + o(1))`.
    pub fn leading_only(coeff: f64, scale: Scale) -> Self {
        Expansion::with_error(vec![Term::new(coeff, scale)], scale)
    }

    fn normalized(mut terms: Vec<Term>, error: Option<Scale>) -> Self {
        terms.sort_by(|a, b| b.scale.growth_cmp(&a.scale));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.scale.growth_cmp(&t.scale) == Ordering::Equal => {
                    last.coeff += t.coeff
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        if let Some(err) = error {
            merged.retain(|t| t.scale.growth_cmp(&err) != Ordering::Less);
        }
        Expansion {
            terms: merged,
            error,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn error(&self) -> Option<Scale> {
        self.error
    }

    pub fn is_exact(&self) -> bool {
        self.error.is_none()
    }

    /// Eventually identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.error.is_none()
    }

    /// Leading term, if one is known. `None` either for zero or when every
    /// term cancelled below the error scale.
    pub fn leading(&self) -> Option<Term> {
        self.terms.first().copied()
    }

    /// Eventual sign: `Some(Greater)` positive, `Some(Less)` negative,
    /// `Some(Equal)` identically zero, `None` undetermined.
    pub fn sign(&self) -> Option<Ordering> {
        match self.leading() {
            Some(t) => Some(t.coeff.total_cmp(&0.0)),
            None if self.is_exact() => Some(Ordering::Equal),
            None => None,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Expansion::zero();
        }
        Expansion {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff * c, t.scale))
                .collect(),
            error: self.error,
        }
    }

    /// Multiply by a monomial, e.g. `n · a_n`.
    pub fn mul_scale(&self, s: Scale) -> Self {
        Expansion {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff, t.scale.mul(&s)))
                .collect(),
            error: self.error.map(|e| e.mul(&s)),
        }
    }

    pub fn add(&self, other: &Expansion) -> Self {
        let error = max_scale(self.error, other.error);
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Expansion::normalized(terms, error)
    }

    pub fn sub(&self, other: &Expansion) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expansion) -> Self {
        if self.is_zero() || other.is_zero() {
            return Expansion::zero();
        }
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term::new(a.coeff * b.coeff, a.scale.mul(&b.scale)));
            }
        }
        let lead_or_err = |e: &Expansion| {
            e.leading()
                .map(|t| t.scale)
                .or(e.error)
                .unwrap_or(Scale::ONE)
        };
        let mut error = None;
        if let Some(eb) = other.error {
            error = max_scale(error, Some(lead_or_err(self).mul(&eb)));
        }
        if let Some(ea) = self.error {
            error = max_scale(error, Some(ea.mul(&lead_or_err(other))));
        }
        Expansion::normalized(terms, error)
    }

    /// `(a_n)^e` for an eventually positive sequence, to leading order. A single
    /// exact term stays exact.
    pub fn powf(&self, e: f64) -> Option<Self> {
        if e == 1.0 {
            return Some(self.clone());
        }
        let lead = self.leading()?;
        if lead.coeff <= 0.0 {
            return None;
        }
        let t = Term::new(lead.coeff.powf(e), lead.scale.powf(e));
        if self.is_exact() && self.terms.len() == 1 {
            Some(Expansion::exact(vec![t]))
        } else {
            Some(Expansion::with_error(vec![t], t.scale))
        }
    }

    pub fn sqrt(&self) -> Option<Self> {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Option<Self> {
        self.powf(-1.0)
    }

    pub fn div(&self, other: &Expansion) -> Option<Self> {
        Some(self.mul(&other.recip()?))
    }

    /// Drop everything below the leading term.
    pub fn truncate_leading(&self) -> Self {
        match self.leading() {
            Some(t) if !(self.is_exact() && self.terms.len() == 1) => {
                Expansion::with_error(vec![t], t.scale)
            }
            _ => self.clone(),
        }
    }

    /// Whether `Σ_n a_n` converges, for an eventually nonnegative sequence.
    /// `None` when the leading behaviour is unknown or negative.
    pub fn summable(&self) -> Option<bool> {
        if self.is_zero() {
            return Some(true);
        }
        let lead = self.leading()?;
        if lead.coeff < 0.0 {
            return None;
        }
        Some(lead.scale.is_summable())
    }

    /// Whether the sequence stays bounded.
    pub fn bounded(&self) -> Option<bool> {
        if self.is_zero() {
            return Some(true);
        }
        Some(self.leading()?.scale.is_bounded())
    }

    /// Numeric value of the known terms at `n`.
    pub fn eval(&self, n: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.scale.eval(n)).sum()
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}", t.coeff, t.scale)?;
        }
        if let Some(e) = self.error {
            write!(f, " + o({e})")?;
        }
        Ok(())
    }
}

fn max_scale(a: Option<Scale>, b: Option<Scale>) -> Option<Scale> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.growth_cmp(&y) == Ordering::Less {
            y
        } else {
            x
        }),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summability_thresholds() {
        assert!(Scale::power(-2.0).is_summable());
        assert!(!Scale::power(-1.0).is_summable());
        assert!(Scale::new(-1.0, -2.0, 0.0).is_summable());
        assert!(!Scale::new(-1.0, -1.0, 0.0).is_summable());
        assert!(Scale::new(-1.0, -1.0, -1.5).is_summable());
        assert!(!Scale::new(-0.5, -9.0, 0.0).is_summable());
    }

    #[test]
    fn cancellation_respects_error_scale() {
        let a = Expansion::exact(vec![
            Term::new(1.0, Scale::LOG),
            Term::new(2.0, Scale::LOGLOG),
        ]);
        let d = a.sub(&Expansion::monomial(1.0, Scale::LOG));
        assert_eq!(d.leading(), Some(Term::new(2.0, Scale::LOGLOG)));
        assert!(d.is_exact());

        let rough = Expansion::leading_only(1.0, Scale::LOG);
        let d = rough.sub(&Expansion::monomial(1.0, Scale::LOG));
        assert_eq!(d.leading(), None);
        assert_eq!(d.sign(), None);
    }

    #[test]
    fn product_error_tracks_leading() {
        let a = Expansion::leading_only(2.0, Scale::power(-1.0));
        let b = Expansion::constant(3.0).add(&Expansion::monomial(1.0, Scale::power(-0.5)));
        let p = a.mul(&b);
        assert_eq!(p.leading(), Some(Term::new(6.0, Scale::power(-1.0))));
        assert_eq!(p.terms().len(), 1);
    }

    #[test]
    fn powers() {
        let a = Expansion::monomial(4.0, Scale::power(-2.0));
        let s = a.sqrt().unwrap();
        assert!(s.is_exact());
        assert_eq!(s.leading(), Some(Term::new(2.0, Scale::power(-1.0))));
        assert!(Expansion::monomial(-1.0, Scale::ONE).sqrt().is_none());
    }
}
