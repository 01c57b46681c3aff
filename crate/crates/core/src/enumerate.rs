//! Exhaustive generation of all quasigroups of a given arity and order.

use crate::error::{Error, Result};
use crate::quasigroup::{checked_volume, strides, MultaryQuasigroup};

/// Default cap on `order^(arity+1)`.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1_000_000;

/// Streams every k-ary quasigroup of the given order exactly once, in
/// lexicographic order of tables, using the default size guard.
pub fn enumerate_all(arity: usize, order: usize) -> Result<Enumeration> {
    enumerate_all_with_limit(arity, order, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_all_with_limit(arity: usize, order: usize, limit: u64) -> Result<Enumeration> {
    if arity < 2 {
        return Err(Error::ArityTooSmall { arity, minimum: 2 });
    }
    if order == 0 || order > 64 {
        return Err(Error::precondition("enumeration supports orders 1..=64"));
    }
    let size = (order as u64).checked_pow(arity as u32 + 1);
    if size.is_none_or(|s| s > limit) {
        return Err(Error::BudgetExceeded { budget: limit });
    }
    let volume = checked_volume(order, arity)?;
    let lines = volume / order;
    Ok(Enumeration {
        arity,
        order,
        strides: strides(arity, order),
        lines,
        table: vec![0; volume],
        used: vec![0; arity * lines],
        next_try: vec![0; volume + 1],
        pos: 0,
        started: false,
        done: false,
    })
}

/// Backtracking cursor over Latin hypercubes; see [`enumerate_all`].
pub struct Enumeration {
    arity: usize,
    order: usize,
    strides: Vec<usize>,
    lines: usize,
    table: Vec<u32>,
    // One bitmask of used values per (coordinate, line).
    used: Vec<u64>,
    next_try: Vec<u32>,
    pos: usize,
    started: bool,
    done: bool,
}

impl Enumeration {
    #[inline]
    fn line_slots(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.order;
        self.strides.iter().enumerate().map(move |(p, &s)| p * self.lines + (idx / (s * n)) * s + idx % s)
    }

    fn is_free(&self, idx: usize, v: u32) -> bool {
        self.line_slots(idx).all(|slot| self.used[slot] & (1 << v) == 0)
    }

    fn toggle(&mut self, idx: usize, v: u32) {
        let slots: Vec<usize> = self.line_slots(idx).collect();
        for slot in slots {
            self.used[slot] ^= 1 << v;
        }
    }

    fn advance(&mut self) -> bool {
        let volume = self.table.len();
        loop {
            if self.pos == volume {
                return true;
            }
            let pos = self.pos;
            let mut placed = false;
            while (self.next_try[pos] as usize) < self.order {
                let v = self.next_try[pos];
                self.next_try[pos] += 1;
                if self.is_free(pos, v) {
                    self.table[pos] = v;
                    self.toggle(pos, v);
                    self.pos += 1;
                    self.next_try[self.pos] = 0;
                    placed = true;
                    break;
                }
            }
            if placed {
                continue;
            }
            if pos == 0 {
                return false;
            }
            self.pos -= 1;
            let v = self.table[self.pos];
            self.toggle(self.pos, v);
        }
    }
}

impl Iterator for Enumeration {
    type Item = MultaryQuasigroup;

    fn next(&mut self) -> Option<MultaryQuasigroup> {
        if self.done {
            return None;
        }
        if self.started {
            // Step back from the last complete table.
            self.pos -= 1;
            let v = self.table[self.pos];
            self.toggle(self.pos, v);
        }
        self.started = true;
        if self.advance() {
            Some(MultaryQuasigroup::from_raw(self.arity, self.order, self.table.clone()))
        } else {
            self.done = true;
            None
        }
    }
}
