use serde::{Deserialize, Serialize};

/// Initially occupied sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Occupancy {
    /// Every site of ℕ.
    All,
    /// `{0, step, 2·step, …}`.
    Arithmetic { step: u64 },
    /// `{0} ∪ {base^k : k ≥ 0}`; gaps are unbounded.
    Powers { base: u64 },
    /// A finite set containing 0.
    List { sites: Vec<u64> },
}

/// Coarse shape of the occupied set, as the criteria need it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Density {
    /// Infinite with consecutive gaps at most `max_gap`.
    Bounded { max_gap: u64 },
    /// Infinite with unbounded gaps.
    Sparse,
    /// Finitely many sites, sorted.
    Finite(Vec<u64>),
}

impl Occupancy {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            Occupancy::All => true,
            Occupancy::Arithmetic { step } => n % step == 0,
            Occupancy::Powers { base } => {
                if n <= 1 {
                    return true;
                }
                let mut v = *base;
                while v < n {
                    match v.checked_mul(*base) {
                        Some(x) => v = x,
                        None => return false,
                    }
                }
                v == n
            }
            Occupancy::List { sites } => sites.contains(&n),
        }
    }

    /// Occupied sites in `[0, horizon]`, ascending.
    pub fn sites_up_to(&self, horizon: u64) -> Vec<u64> {
        match self {
            Occupancy::All => (0..=horizon).collect(),
            Occupancy::Arithmetic { step } => (0..=horizon / step).map(|k| k * step).collect(),
            Occupancy::Powers { base } => {
                let mut out = vec![0];
                let mut v = 1u64;
                while v <= horizon {
                    out.push(v);
                    match v.checked_mul(*base) {
                        Some(x) => v = x,
                        None => break,
                    }
                }
                out
            }
            Occupancy::List { .. } => {
                let Density::Finite(sites) = self.density() else {
                    unreachable!()
                };
                sites.into_iter().filter(|&s| s <= horizon).collect()
            }
        }
    }

    pub fn density(&self) -> Density {
        match self {
            Occupancy::All => Density::Bounded { max_gap: 1 },
            Occupancy::Arithmetic { step } => Density::Bounded { max_gap: *step },
            Occupancy::Powers { .. } => Density::Sparse,
            Occupancy::List { sites } => {
                let mut s = sites.clone();
                s.sort_unstable();
                s.dedup();
                Density::Finite(s)
            }
        }
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        match self {
            Occupancy::Arithmetic { step: 0 } => Err("arithmetic step must be positive".into()),
            Occupancy::Powers { base } if *base < 2 => Err("powers base must be at least 2".into()),
            Occupancy::List { sites } if !sites.contains(&0) => {
                Err("occupied sites must contain 0".into())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_membership() {
        let o = Occupancy::Powers { base: 2 };
        assert_eq!(o.sites_up_to(20), vec![0, 1, 2, 4, 8, 16]);
        assert!(o.contains(1024));
        assert!(!o.contains(1023));
    }
}
