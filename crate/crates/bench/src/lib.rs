//! Inputs shared by the benchmarks.

use mq_core::{iterated_group, random_isotopy, GroupTable, MultaryQuasigroup};

/// A scrambled iterated group of the given arity.
pub fn scrambled_group(g: &GroupTable, arity: usize, seed: u64) -> MultaryQuasigroup {
    iterated_group(g, arity).unwrap().apply_isotopy(&random_isotopy(g.order(), arity, seed)).unwrap()
}
