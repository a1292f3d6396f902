//! Block plans: disjoint runs of `L` consecutive occupied sites.

use super::{Density, ModelError, ModelSpec, Occupancy};

/// Blocks `𝓑_k` made of the occupied sites with rank in `[kL, (k+1)L)`.
///
/// With occupied sites `{0, m, 2m, …}` block `k` is the interval
/// `[kLm, (k+1)Lm − 1]` restricted to the occupied sites, so consecutive
/// blocks are at most `m(2L − 1)` apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    size: usize,
    step: u64,
    occupied: Occupancy,
}

impl BlockPlan {
    /// Consecutive-interval blocks of `size` occupied sites each.
    pub fn consecutive(occupied: &Occupancy, size: usize) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::InvalidParameter {
                field: "L".into(),
                reason: "block size must be positive".into(),
            });
        }
        let step = match occupied.density() {
            Density::Bounded { max_gap } => max_gap,
            Density::Sparse => {
                return Err(ModelError::NotRepresentable(
                    "occupied sites have unbounded gaps".into(),
                ))
            }
            Density::Finite(_) => {
                return Err(ModelError::NotRepresentable(
                    "finitely many occupied sites cannot fill infinitely many blocks".into(),
                ))
            }
        };
        Ok(BlockPlan {
            size,
            step,
            occupied: occupied.clone(),
        })
    }

    /// Number of occupied sites per block (`L`).
    pub fn size(&self) -> usize {
        self.size
    }

    /// Length of the site interval each block spans.
    pub fn span(&self) -> u64 {
        self.size as u64 * self.step
    }

    pub fn occupied(&self) -> &Occupancy {
        &self.occupied
    }

    /// `sup_k (max 𝓑_{k+1} − min 𝓑_k)`.
    pub fn gap_bound(&self) -> u64 {
        self.step * (2 * self.size as u64 - 1)
    }

    pub fn block(&self, k: u64) -> Vec<u64> {
        let first = k * self.size as u64;
        (first..first + self.size as u64)
            .map(|r| r * self.step)
            .collect()
    }

    /// Index of the block containing occupied site `n`.
    pub fn block_of(&self, n: u64) -> Option<u64> {
        if !self.occupied.contains(n) {
            return None;
        }
        Some(n / self.span())
    }

    /// Occupied sites in `[0, horizon]` belonging to even blocks.
    pub fn even_union_up_to(&self, horizon: u64) -> Vec<u64> {
        self.union_up_to(horizon, 0)
    }

    /// Occupied sites in `[0, horizon]` belonging to odd blocks.
    pub fn odd_union_up_to(&self, horizon: u64) -> Vec<u64> {
        self.union_up_to(horizon, 1)
    }

    fn union_up_to(&self, horizon: u64, parity: u64) -> Vec<u64> {
        self.occupied
            .sites_up_to(horizon)
            .into_iter()
            .filter(|&n| n / self.span() % 2 == parity)
            .collect()
    }

    /// Whether this plan was built for `spec`'s occupied set.
    pub fn matches(&self, spec: &ModelSpec) -> bool {
        &self.occupied == spec.occupied()
    }
}
