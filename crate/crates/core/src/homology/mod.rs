//! Homology of chain complex presentations and exact sequence checks.

mod exact;
mod fields;

use std::fmt;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::chains::{ChainComplexPresentation, Ring};
use crate::error::{Error, Result};
use crate::linalg::{int_invariants, modp_rank, IntInvariants};

pub use exact::{
    base_support, check_exactness, excision, mayer_vietoris, pair_sequence, radial_cover,
    support_cover, Cover, ExactnessReport, ExcisionReport, MvAttempt, MvReport, SlotFailure,
};
pub use fields::{field_homology, FieldHomology, FieldHomologyDegree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomologyGroup {
    pub ring: Ring,
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn zero(ring: Ring) -> Self {
        HomologyGroup {
            ring,
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(ring: Ring, rank: usize) -> Self {
        HomologyGroup {
            ring,
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum, with torsion put back in invariant-factor form.
    pub fn direct_sum(&self, other: &HomologyGroup) -> HomologyGroup {
        let mut primes: Vec<u64> = Vec::new();
        for &t in self.torsion.iter().chain(&other.torsion) {
            primes.extend(prime_power_parts(t));
        }
        HomologyGroup {
            ring: self.ring,
            free_rank: self.free_rank + other.free_rank,
            torsion: invariant_form(primes),
        }
    }
}

fn prime_power_parts(mut t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= t {
        if t % d == 0 {
            let mut q = 1;
            while t % d == 0 {
                t /= d;
                q *= d;
            }
            out.push(q);
        }
        d += 1;
    }
    if t > 1 {
        out.push(t);
    }
    out
}

/// Elementary divisors back to invariant factors.
fn invariant_form(parts: Vec<u64>) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for q in parts {
        by_prime.entry(smallest_prime_factor(q)).or_default().push(q);
    }
    let len = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for v in by_prime.values_mut() {
        v.sort_unstable();
        // Largest powers go to the last factors.
        let offset = len - v.len();
        for (i, q) in v.iter().enumerate() {
            out[offset + i] *= q;
        }
    }
    out
}

fn smallest_prime_factor(x: u64) -> u64 {
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return d;
        }
        d += 1;
    }
    x
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let base = match self.ring {
            Ring::Z => "Z".to_string(),
            Ring::Q => "Q".to_string(),
            Ring::Fp(p) => format!("F{p}"),
        };
        match self.free_rank {
            0 => {}
            1 => parts.push(base),
            r => parts.push(format!("{base}^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Homology in every degree of the presentation. With `reduced`, degree 0
/// loses one free summand when the augmentation is a chain map on a nonempty
/// degree 0; otherwise nothing is reduced.
pub fn homology(p: &ChainComplexPresentation, reduced: bool) -> Result<Vec<HomologyGroup>> {
    p.check_dd()?;
    let n = p.degrees.len();
    // Rank and invariants of D_k for k = 0..=n (D_0 and D_{n} are zero maps).
    let mut inv: Vec<IntInvariants> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = match p.degrees.get(k) {
            Some(d) if k > 0 => match p.ring {
                Ring::Z | Ring::Q => int_invariants(&d.images),
                Ring::Fp(q) => IntInvariants {
                    rank: modp_rank(q, &d.images),
                    torsion: Vec::new(),
                },
            },
            _ => IntInvariants {
                rank: 0,
                torsion: Vec::new(),
            },
        };
        inv.push(r);
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let dim = p.degrees[k].basis.len();
        let free = dim
            .checked_sub(inv[k].rank + inv[k + 1].rank)
            .ok_or(Error::InconsistentComplex(k))?;
        let torsion = match p.ring {
            Ring::Z => inv[k + 1]
                .torsion
                .iter()
                .map(|t| t.to_u64().ok_or_else(|| Error::Internal("torsion exceeds 64 bits".into())))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        out.push(HomologyGroup {
            ring: p.ring,
            free_rank: free,
            torsion,
        });
    }
    if reduced && is_augmented(p) {
        out[0].free_rank -= 1;
    }
    Ok(out)
}

/// Degree 0 is nonempty and the augmentation kills boundaries.
pub fn is_augmented(p: &ChainComplexPresentation) -> bool {
    let Some(d0) = p.degrees.first() else {
        return false;
    };
    if d0.basis.is_empty() {
        return false;
    }
    let augmentation_hits = |col: &Vec<(u32, i64)>| -> bool {
        let s: i64 = col.iter().map(|(_, v)| v).sum();
        crate::chains::reduce(p.ring, s) != 0
    };
    // ε must be nonzero on C_0 for H_0 to split off a copy of the ring.
    let nonzero = d0.basis.iter().any(augmentation_hits);
    let closed = p
        .degrees
        .get(1)
        .is_none_or(|d1| !d1.images.cols.iter().any(augmentation_hits));
    nonzero && closed
}

/// Free ranks by degree.
pub fn betti(groups: &[HomologyGroup]) -> Vec<usize> {
    groups.iter().map(|g| g.free_rank).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_of_cyclic_groups() {
        let a = HomologyGroup {
            ring: Ring::Z,
            free_rank: 1,
            torsion: vec![2],
        };
        let b = HomologyGroup {
            ring: Ring::Z,
            free_rank: 0,
            torsion: vec![3, 6],
        };
        let s = a.direct_sum(&b);
        assert_eq!(s.free_rank, 1);
        assert_eq!(s.torsion, vec![6, 6]);
        assert_eq!(HomologyGroup::zero(Ring::Z).direct_sum(&a), a);
        assert_eq!(format!("{s}"), "Z + Z/6 + Z/6");
    }
}
