//! The pseudovariety `U`, the join over primes `p` of `Ab(p) * Ab(p-1)`.
//!
//! A finite group lies in `U` exactly when it is supersolvable, its derived
//! subgroup is abelian of squarefree exponent, and its Sylow subgroups are
//! abelian.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::apd::{closure_ab, closure_apd, status_apd};
use crate::error::Result;
use crate::finitegroup::{Perm, PermGroup};
use crate::numtheory::primes_between;
use crate::stallings::{Automaton, CosetAction, Index, DEFAULT_LATTICE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UMembershipReport {
    pub verdict: bool,
    pub supersolvable: bool,
    /// Derived subgroup abelian of squarefree exponent (a product of groups
    /// of prime order).
    pub derived_in_e: bool,
    /// Derived subgroup elementary abelian for a single prime.
    pub derived_elementary_abelian: bool,
    /// Primes dividing the order of the derived subgroup.
    pub derived_primes: Vec<u64>,
    pub sylow_abelian: BTreeMap<u64, bool>,
}

pub fn is_in_u(g: &PermGroup) -> Result<UMembershipReport> {
    let supersolvable = g.is_supersolvable()?;
    let derived = g.derived_subgroup()?;
    let st = derived.structure_tests()?;
    let mut sylow_abelian = BTreeMap::new();
    for p in g.prime_divisors()? {
        sylow_abelian.insert(p, g.sylow(p)?.is_abelian());
    }
    let verdict = supersolvable && st.squarefree_abelian && sylow_abelian.values().all(|&b| b);
    Ok(UMembershipReport {
        verdict,
        supersolvable,
        derived_in_e: st.squarefree_abelian,
        derived_elementary_abelian: st.elementary_abelian,
        derived_primes: derived.prime_divisors()?,
        sylow_abelian,
    })
}

/// The transition group of a coset action, `F_n / Core(H)`.
pub fn action_group(action: &CosetAction, cap: usize) -> Result<PermGroup> {
    let gens = action.perms.iter().map(|p| Perm::new(p.clone())).collect::<Result<Vec<_>>>()?;
    Ok(PermGroup::new(action.degree, gens)?.with_cap(cap))
}

/// Finite index with `F_n / Core(H)` in `U`.
pub fn is_u_closed(h: &Automaton, cap: usize) -> Result<bool> {
    if !h.is_complete() {
        return Ok(false);
    }
    Ok(is_in_u(&action_group(&h.coset_action()?, cap)?)?.verdict)
}

/// Exact `U`-closure of a finite-index subgroup: the intersection of its
/// `U`-closed overgroups.
pub fn cl_u_finite_index(h: &Automaton, cap: usize) -> Result<Automaton> {
    let mut result = Automaton::whole_group(h.rank())?;
    for k in h.intermediate_subgroups(DEFAULT_LATTICE_CAP.min(cap.max(1)))? {
        if k.contains_subgroup(&result)? {
            continue;
        }
        if is_u_closed(&k, cap)? {
            result = result.intersect(&k)?;
        }
    }
    Ok(result)
}

/// Upper approximation `∩_{p ∈ primes} Cl_{U_p}(H)` of the `U`-closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureApprox {
    pub primes: Vec<u64>,
    pub automaton: Automaton,
    /// Set only when the finite-index route confirms the result.
    pub exact: bool,
}

/// Closure in `U_p = Ab(p) * Ab(p-1)`; `U_2 = Ab(2)`.
pub fn closure_up(h: &Automaton, p: u64, cap: usize) -> Result<Automaton> {
    if p == 2 {
        closure_ab(h, 2, cap)
    } else {
        closure_apd(h, p, p - 1, cap)
    }
}

pub fn cl_u_approx(h: &Automaton, primes: &[u64], cap: usize) -> Result<ClosureApprox> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let mut result = Automaton::whole_group(h.rank())?;
    for &p in &primes {
        result = result.intersect(&closure_up(h, p, cap)?)?;
    }
    let exact = h.is_complete() && cl_u_finite_index(h, cap).map(|c| c == result).unwrap_or(false);
    Ok(ClosureApprox { primes, automaton: result, exact })
}

/// Smallest 1-based `j` with every basis element of `H` having zero
/// exponent sum in generator `j`; the `U`-closure is then not finitely
/// generated.
pub fn not_fg_certificate(h: &Automaton) -> Option<usize> {
    let sums: Vec<Vec<i64>> = h.basis().iter().map(|w| w.abelianization(0).entries).collect();
    (0..h.rank()).find(|&j| sums.iter().all(|s| s[j] == 0)).map(|j| j + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    /// The abelianization of `H` is all of `Z^n`.
    pub necessary_ok: bool,
    pub dense_up_to_bound: bool,
    /// Density in `U_p` for each prime up to the bound.
    pub per_prime: Vec<(u64, bool)>,
}

/// True when the integer row span of `rows` (each of length `n`) is `Z^n`.
pub fn spans_integer_lattice(rows: &[Vec<i64>], n: usize) -> bool {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    for c in 0..n {
        // Euclid on column c among rows r.. until one nonzero entry is left
        loop {
            let nonzero: Vec<usize> = (r..m.len()).filter(|&i| m[i][c] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&i| m[i][c].abs()).expect("non-empty");
            for &i in &nonzero {
                if i != piv {
                    let f = m[i][c] / m[piv][c];
                    let pivot_row = m[piv].clone();
                    for (x, y) in m[i].iter_mut().zip(pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { return false };
        if m[piv][c].abs() != 1 {
            return false;
        }
        m.swap(r, piv);
        r += 1;
    }
    true
}

pub fn u_density_check(h: &Automaton, bound: u64) -> Result<DensityReport> {
    let rows: Vec<Vec<i64>> = h.basis().iter().map(|w| w.abelianization(0).entries).collect();
    let necessary_ok = spans_integer_lattice(&rows, h.rank());
    let mut per_prime = Vec::new();
    for p in primes_between(2, bound) {
        let dense = if p == 2 {
            closure_ab(h, 2, usize::MAX)?.index() == Index::Finite(1)
        } else {
            status_apd(h, p, p - 1)?.dense
        };
        per_prime.push((p, dense));
    }
    let dense_up_to_bound = per_prime.iter().all(|&(_, d)| d);
    Ok(DensityReport { necessary_ok, dense_up_to_bound, per_prime })
}
