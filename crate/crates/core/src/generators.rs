//! Corpus generators: iterated groups, seeded isotopies, twisted
//! compositions and randomized searches.
//!
//! All randomness comes from xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Bounded draws use the multiply-high
//! reduction `(next_u64 * n) >> 64`, and permutations are Fisher–Yates
//! shuffles drawing `i` from `0..=i` for `i` from `n-1` down to 1. Search
//! candidate `i` runs on its own generator seeded with
//! [`candidate_seed`]`(seed, i)`, so results do not depend on thread count.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{compose, reducible_at, Segment};
use crate::group::{catalog, GroupTable};
use crate::perm::Permutation;
use crate::quasigroup::{checked_volume, strides, Isotopy, MultaryQuasigroup};
use crate::recognition::quadrangle_criterion;

pub type Rng = Xoshiro256StarStar;

pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;

/// Backtracking steps allowed per random hypercube attempt.
const HYPERCUBE_STEP_LIMIT: usize = 200_000;

const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_candidates: u64,
    pub seed: u64,
    /// Advisory only; searches stop on `max_candidates`.
    pub time_hint: Option<f64>,
}

impl SearchBudget {
    pub fn new(seed: u64) -> Self {
        SearchBudget { max_candidates: DEFAULT_MAX_CANDIDATES, seed, time_hint: None }
    }

    pub fn with_max_candidates(mut self, max_candidates: u64) -> Self {
        self.max_candidates = max_candidates.max(1);
        self
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of search candidate `index`.
pub fn candidate_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Uniform-ish draw from `0..n` (`n > 0`).
pub fn below(rng: &mut Rng, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

pub fn random_permutation(n: usize, rng: &mut Rng) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(rng, i + 1);
        images.swap(i, j);
    }
    Permutation::new(images).expect("shuffle of the identity")
}

/// `f(x1..xk) = x1 * x2 * .. * xk` in `g`.
pub fn iterated_group(g: &GroupTable, arity: usize) -> Result<MultaryQuasigroup> {
    if arity < 2 {
        return Err(Error::ArityTooSmall { arity, minimum: 2 });
    }
    let n = g.order();
    let volume = checked_volume(n, arity)?;
    // Row-major: the table of arity j+1 is the table of arity j times each element.
    let mut table: Vec<u32> = g.table().to_vec();
    for _ in 2..arity {
        let mut next = Vec::with_capacity(table.len() * n);
        for &p in &table {
            next.extend((0..n).map(|x| g.mul(p as usize, x) as u32));
        }
        table = next;
    }
    debug_assert_eq!(table.len(), volume);
    Ok(MultaryQuasigroup::from_raw(arity, n, table))
}

/// `arity + 1` seeded random bijections.
pub fn random_isotopy(order: usize, arity: usize, seed: u64) -> Isotopy {
    random_isotopy_with(order, arity, &mut rng_from_seed(seed))
}

pub fn random_isotopy_with(order: usize, arity: usize, rng: &mut Rng) -> Isotopy {
    let maps = (0..=arity).map(|_| random_permutation(order, rng)).collect();
    Isotopy::new(maps).expect("maps of equal size")
}

/// `g2(x, beta(g1(y, z)))`-style attachment of a `beta`-relabeled `g1`
/// into `g2` at `position` (1 or 2).
pub fn twisted_composition(
    g1: &GroupTable,
    g2: &GroupTable,
    beta: &Permutation,
    position: usize,
) -> Result<MultaryQuasigroup> {
    if g1.order() != g2.order() {
        return Err(Error::OrderMismatch { left: g1.order(), right: g2.order() });
    }
    if beta.len() != g1.order() {
        return Err(Error::DimensionMismatch {
            reason: format!("bijection on {} points for order {}", beta.len(), g1.order()),
        });
    }
    let n = g1.order();
    let inner = MultaryQuasigroup::from_fn(2, n, |x| beta.apply(g1.mul(x[0], x[1])))?;
    let q = compose(&g2.as_quasigroup(), &inner, position)?;
    debug_assert_eq!(
        crate::recognition::is_iterated_group_isotope(&q).map(|w| w.is_some()),
        crate::recognition::is_pseudoisomorphism(beta, g1, g2)
    );
    Ok(q)
}

/// Randomized backtracking fill of a Latin hypercube, cell by cell in
/// index order. `None` if `step_limit` is exceeded.
pub fn random_latin_hypercube(
    arity: usize,
    order: usize,
    rng: &mut Rng,
    step_limit: usize,
) -> Option<MultaryQuasigroup> {
    assert!((1..=64).contains(&order), "hypercube orders 1..=64");
    let n = order;
    let volume = checked_volume(n, arity).ok()?;
    let stride = strides(arity, n);
    let lines = volume / n;
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let line = |p: usize, idx: usize| (idx / (stride[p] * n)) * stride[p] + idx % stride[p];
    let mut used = vec![0u64; arity * lines];
    let mut table = vec![0u32; volume];
    // Values not yet tried at each filled or current cell.
    let mut remaining = vec![0u64; volume];
    let mut idx = 0;
    let mut fresh = true;
    let mut steps = 0;
    while idx < volume {
        steps += 1;
        if steps > step_limit {
            return None;
        }
        if fresh {
            let mut taken = 0;
            for p in 0..arity {
                taken |= used[p * lines + line(p, idx)];
            }
            remaining[idx] = full & !taken;
        }
        let options = remaining[idx];
        if options == 0 {
            // Backtrack: release the previous cell and retry it.
            if idx == 0 {
                return None;
            }
            idx -= 1;
            let v = table[idx];
            for p in 0..arity {
                used[p * lines + line(p, idx)] &= !(1 << v);
            }
            fresh = false;
            continue;
        }
        let mut pick = below(rng, options.count_ones() as usize);
        let mut bits = options;
        while pick > 0 {
            bits &= bits - 1;
            pick -= 1;
        }
        let v = bits.trailing_zeros();
        remaining[idx] &= !(1 << v);
        table[idx] = v;
        for p in 0..arity {
            used[p * lines + line(p, idx)] |= 1 << v;
        }
        idx += 1;
        fresh = true;
    }
    Some(MultaryQuasigroup::from_raw(arity, n, table))
}

/// Evaluates candidates `0, 1, ..` in parallel batches and returns the
/// accepted candidate with the smallest index.
fn parallel_search<T: Send>(budget: &SearchBudget, candidate: impl Fn(&mut Rng) -> Option<T> + Sync) -> Result<T> {
    let max = budget.max_candidates.max(1);
    let mut start = 0;
    while start < max {
        let end = (start + BATCH).min(max);
        let found = (start..end)
            .into_par_iter()
            .find_map_first(|i| candidate(&mut rng_from_seed(candidate_seed(budget.seed, i))));
        if let Some(hit) = found {
            return Ok(hit);
        }
        start = end;
    }
    Err(Error::BudgetExceeded { budget: max })
}

/// A Latin square of order `order >= 5` failing the quadrangle criterion.
pub fn search_nongroup_binary(order: usize, budget: &SearchBudget) -> Result<MultaryQuasigroup> {
    if order < 5 {
        return Err(Error::precondition(format!("every Latin square of order {order} < 5 is a group isotope")));
    }
    if order > 64 {
        return Err(Error::precondition("orders above 64 are not supported"));
    }
    parallel_search(budget, |rng| {
        let q = random_latin_hypercube(2, order, rng, HYPERCUBE_STEP_LIMIT)?;
        matches!(quadrangle_criterion(&q), Ok(Some(_))).then_some(q)
    })
}

fn is_composite(n: usize) -> bool {
    n >= 4 && (2..n).take_while(|d| d * d <= n).any(|d| n.is_multiple_of(d))
}

/// A quasigroup of arity `arity >= 3` and composite order whose
/// factorization graph has no chords.
pub fn search_irreducible(arity: usize, order: usize, budget: &SearchBudget) -> Result<MultaryQuasigroup> {
    if arity < 3 {
        return Err(Error::precondition(format!("arity {arity} < 3 has no chords to avoid")));
    }
    if !is_composite(order) {
        return Err(Error::precondition(format!("order {order} is not composite")));
    }
    if order > 64 {
        return Err(Error::precondition("orders above 64 are not supported"));
    }
    let segments = Segment::all(arity);
    parallel_search(budget, |rng| {
        let q = random_latin_hypercube(arity, order, rng, HYPERCUBE_STEP_LIMIT)?;
        segments.iter().all(|&s| matches!(reducible_at(&q, s), Ok(None))).then_some(q)
    })
}

fn random_group(order: usize, rng: &mut Rng) -> GroupTable {
    let options: Vec<GroupTable> = catalog().into_iter().filter(|(_, g)| g.order() == order).map(|(_, g)| g).collect();
    if options.is_empty() {
        GroupTable::cyclic(order)
    } else {
        options[below(rng, options.len())].clone()
    }
}

/// A random composition tree of group isotopes, nongroup squares and
/// random hypercubes, flattened to one table.
pub fn random_composition(order: usize, arity: usize, rng: &mut Rng) -> Result<MultaryQuasigroup> {
    random_tree(order, arity, rng, 0)
}

fn random_tree(n: usize, k: usize, rng: &mut Rng, depth: usize) -> Result<MultaryQuasigroup> {
    if k >= 3 && depth < 4 && below(rng, 3) < 2 {
        let outer = 2 + below(rng, k - 2);
        let inner = k - outer + 1;
        let position = 1 + below(rng, outer);
        let g = random_tree(n, outer, rng, depth + 1)?;
        let h = random_tree(n, inner, rng, depth + 1)?;
        return compose(&g, &h, position);
    }
    random_leaf(n, k, rng)
}

fn random_leaf(n: usize, k: usize, rng: &mut Rng) -> Result<MultaryQuasigroup> {
    let small = n.checked_pow(k as u32).is_some_and(|v| v <= 256);
    match below(rng, 3) {
        1 if k == 2 && n >= 5 => {
            let budget = SearchBudget::new(rng.next_u64());
            search_nongroup_binary(n, &budget)
        }
        2 if small => loop {
            if let Some(q) = random_latin_hypercube(k, n, rng, HYPERCUBE_STEP_LIMIT) {
                return Ok(q);
            }
        },
        _ => {
            let g = random_group(n, rng);
            let iso = random_isotopy_with(n, k, rng);
            iterated_group(&g, k)?.apply_isotopy(&iso)
        }
    }
}
