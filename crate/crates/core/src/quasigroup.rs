//! Finite k-ary quasigroups stored as flat operation tables.
//!
//! The table of a k-ary operation `f` on `{0..order-1}` holds `order^k`
//! values. Argument tuples are indexed lexicographically with the first
//! argument most significant, so `index = ((x1*n + x2)*n + ...)*n + xk`.
//! Every other module relies on this layout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A k-ary quasigroup on `{0..order-1}` with `k >= 2`.
///
/// Construction always goes through [`MultaryQuasigroup::new`], so every
/// value of this type satisfies the Latin property in all k coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultaryQuasigroup {
    arity: usize,
    order: usize,
    table: Vec<u32>,
}

impl std::fmt::Debug for MultaryQuasigroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultaryQuasigroup")
            .field("arity", &self.arity)
            .field("order", &self.order)
            .field("table", &self.table)
            .finish()
    }
}

impl<'de> Deserialize<'de> for MultaryQuasigroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            arity: usize,
            order: usize,
            table: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        validate(raw.arity, raw.order, &raw.table).map_err(serde::de::Error::custom)
    }
}

/// Checks an operation table and wraps it as a quasigroup.
///
/// Violations are reported for the first offending cell in table index
/// order; a cell that repeats a value in several lines reports the lowest
/// position.
pub fn validate(arity: usize, order: usize, table: &[usize]) -> Result<MultaryQuasigroup> {
    if arity < 2 {
        return Err(Error::ArityTooSmall { arity, minimum: 2 });
    }
    if order == 0 {
        return Err(Error::precondition("order must be at least 1"));
    }
    let expected = checked_volume(order, arity)?;
    if table.len() != expected {
        return Err(Error::WrongLength { expected, actual: table.len() });
    }
    let strides = strides(arity, order);
    // seen[p * volume + line_start_of(p, idx) + value]: one γ-slot per line.
    let mut seen = vec![false; arity * expected];
    for (idx, &value) in table.iter().enumerate() {
        if value >= order {
            return Err(Error::ValueOutOfRange { index: idx, value, order });
        }
        for (p, &stride) in strides.iter().enumerate() {
            let line = (idx / (stride * order)) * stride + idx % stride;
            let slot = p * expected + line * order + value;
            if seen[slot] {
                let tuple = decode(idx, arity, order);
                let fixed = tuple.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, &x)| x).collect();
                return Err(Error::LatinViolation { position: p + 1, fixed, value });
            }
            seen[slot] = true;
        }
    }
    Ok(MultaryQuasigroup { arity, order, table: table.iter().map(|&v| v as u32).collect() })
}

pub(crate) fn checked_volume(order: usize, arity: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| order.checked_pow(a))
        .filter(|&v| v <= (isize::MAX as usize) / 8)
        .ok_or_else(|| Error::precondition(format!("order^arity = {order}^{arity} does not fit in memory")))
}

/// `strides[p]` is the index distance between tuples differing by one in coordinate p.
pub(crate) fn strides(arity: usize, order: usize) -> Vec<usize> {
    let mut s = vec![1; arity];
    for p in (0..arity.saturating_sub(1)).rev() {
        s[p] = s[p + 1] * order;
    }
    s
}

pub(crate) fn decode(mut idx: usize, arity: usize, order: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for p in (0..arity).rev() {
        out[p] = idx % order;
        idx /= order;
    }
    out
}

pub(crate) fn encode(tuple: &[usize], order: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * order + x)
}

/// Advances `tuple` to its lexicographic successor; false after the last one.
pub(crate) fn next_tuple(tuple: &mut [usize], order: usize) -> bool {
    for x in tuple.iter_mut().rev() {
        *x += 1;
        if *x < order {
            return true;
        }
        *x = 0;
    }
    false
}

impl MultaryQuasigroup {
    /// Same as [`validate`].
    pub fn new(arity: usize, order: usize, table: &[usize]) -> Result<Self> {
        validate(arity, order, table)
    }

    /// Builds the table by evaluating `op` on every tuple and validates it.
    pub fn from_fn(arity: usize, order: usize, mut op: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let volume = checked_volume(order, arity)?;
        let mut table = Vec::with_capacity(volume);
        let mut tuple = vec![0; arity];
        for _ in 0..volume {
            table.push(op(&tuple));
            next_tuple(&mut tuple, order);
        }
        validate(arity, order, &table)
    }

    /// Wraps a table that is Latin by construction. Only checked in debug builds.
    pub(crate) fn from_raw(arity: usize, order: usize, table: Vec<u32>) -> Self {
        debug_assert!(
            validate(arity, order, &table.iter().map(|&v| v as usize).collect::<Vec<_>>()).is_ok(),
            "from_raw given a non-Latin table"
        );
        MultaryQuasigroup { arity, order, table }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn table_usize(&self) -> Vec<usize> {
        self.table.iter().map(|&v| v as usize).collect()
    }

    #[inline]
    pub(crate) fn at(&self, idx: usize) -> usize {
        self.table[idx] as usize
    }

    pub(crate) fn at_tuple(&self, tuple: &[usize]) -> usize {
        self.table[encode(tuple, self.order)] as usize
    }

    fn check_args(&self, args: &[usize], expected: usize) -> Result<()> {
        if args.len() != expected {
            return Err(Error::ArityMismatch { expected, actual: args.len() });
        }
        if let Some(&value) = args.iter().find(|&&x| x >= self.order) {
            return Err(Error::ArgumentOutOfRange { value, order: self.order });
        }
        Ok(())
    }

    /// `f(x1, ..., xk)`.
    pub fn evaluate(&self, args: &[usize]) -> Result<usize> {
        self.check_args(args, self.arity)?;
        Ok(self.at_tuple(args))
    }

    /// The unique `x_position` with `f(..) = target`, given the other k-1 arguments
    /// in coordinate order. `position` is 1-based.
    pub fn solve(&self, position: usize, known: &[usize], target: usize) -> Result<usize> {
        if position == 0 || position > self.arity {
            return Err(Error::PositionOutOfRange { position, arity: self.arity });
        }
        self.check_args(known, self.arity - 1)?;
        if target >= self.order {
            return Err(Error::ArgumentOutOfRange { value: target, order: self.order });
        }
        let p = position - 1;
        let mut tuple = Vec::with_capacity(self.arity);
        tuple.extend_from_slice(&known[..p]);
        tuple.push(0);
        tuple.extend_from_slice(&known[p..]);
        let stride = strides(self.arity, self.order)[p];
        let base = encode(&tuple, self.order);
        (0..self.order)
            .find(|&x| self.at(base + x * stride) == target)
            .ok_or_else(|| Error::internal("Latin line without the target value"))
    }

    /// `g(y1..yk) = a0(f(a1^-1(y1), ..., ak^-1(yk)))`, the image of `self` under `iso`.
    pub fn apply_isotopy(&self, iso: &Isotopy) -> Result<Self> {
        if iso.arity() != self.arity || iso.order() != self.order {
            return Err(Error::DimensionMismatch {
                reason: format!(
                    "isotopy is for arity {} order {}, quasigroup has arity {} order {}",
                    iso.arity(),
                    iso.order(),
                    self.arity,
                    self.order
                ),
            });
        }
        let mut table = vec![0u32; self.table.len()];
        let mut x = vec![0; self.arity];
        let mut y = vec![0; self.arity];
        for idx in 0..self.table.len() {
            for p in 0..self.arity {
                y[p] = iso.maps[p + 1].apply(x[p]);
            }
            table[encode(&y, self.order)] = iso.maps[0].apply(self.at(idx)) as u32;
            next_tuple(&mut x, self.order);
        }
        Ok(Self::from_raw(self.arity, self.order, table))
    }

    /// The operation `g` obtained by circularly permuting the roles of the
    /// k+1 variables `a0 = f(a1..ak)`; see [`Parastrophe`].
    pub fn circular_parastrophe(&self, p: Parastrophe) -> Self {
        let k = self.arity;
        let mut table = vec![0u32; self.table.len()];
        let mut a = vec![0; k + 1];
        let mut b = vec![0; k];
        for idx in 0..self.table.len() {
            a[0] = self.at(idx);
            for j in 1..=k {
                b[j - 1] = a[p.source(j, k)];
            }
            table[encode(&b, self.order)] = a[p.source(0, k)] as u32;
            next_tuple(&mut a[1..], self.order);
        }
        Self::from_raw(k, self.order, table)
    }

    /// Fixes the given arguments (1-based position -> value) and returns the
    /// operation on the remaining ones, in their original order.
    pub fn residual(&self, fixings: &BTreeMap<usize, usize>) -> Result<Self> {
        if fixings.len() + 2 > self.arity {
            return Err(Error::TooManyFixings { fixings: fixings.len(), arity: self.arity });
        }
        for (&pos, &value) in fixings {
            if pos == 0 || pos > self.arity {
                return Err(Error::PositionOutOfRange { position: pos, arity: self.arity });
            }
            if value >= self.order {
                return Err(Error::ArgumentOutOfRange { value, order: self.order });
            }
        }
        let arity = self.arity - fixings.len();
        let free: Vec<usize> = (1..=self.arity).filter(|p| !fixings.contains_key(p)).collect();
        let mut full = vec![0; self.arity];
        for (&pos, &value) in fixings {
            full[pos - 1] = value;
        }
        let volume = checked_volume(self.order, arity)?;
        let mut table = Vec::with_capacity(volume);
        let mut y = vec![0; arity];
        for _ in 0..volume {
            for (slot, &pos) in free.iter().enumerate() {
                full[pos - 1] = y[slot];
            }
            table.push(self.at_tuple(&full) as u32);
            next_tuple(&mut y, self.order);
        }
        Ok(Self::from_raw(arity, self.order, table))
    }

    /// Latin-line view for coordinate p (0-based): `inverse[line * n + value] = x_p`.
    pub(crate) fn line_inverse(&self, p: usize) -> Vec<u32> {
        let n = self.order;
        let stride = strides(self.arity, n)[p];
        let mut inv = vec![0u32; self.table.len()];
        for idx in 0..self.table.len() {
            let line = (idx / (stride * n)) * stride + idx % stride;
            let xp = (idx / stride) % n;
            inv[line * n + self.at(idx)] = xp as u32;
        }
        inv
    }
}

/// k+1 bijections `a0, a1, .., ak` of `{0..order-1}`; `a0` acts on the output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isotopy {
    maps: Vec<Permutation>,
}

impl Isotopy {
    pub fn new(maps: Vec<Permutation>) -> Result<Self> {
        if maps.len() < 3 {
            return Err(Error::DimensionMismatch {
                reason: format!("an isotopy needs at least 3 maps, got {}", maps.len()),
            });
        }
        let n = maps[0].len();
        if maps.iter().any(|m| m.len() != n) {
            return Err(Error::DimensionMismatch { reason: "isotopy maps have different sizes".into() });
        }
        Ok(Isotopy { maps })
    }

    pub fn identity(arity: usize, order: usize) -> Self {
        Isotopy { maps: vec![Permutation::identity(order); arity + 1] }
    }

    pub fn arity(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn order(&self) -> usize {
        self.maps[0].len()
    }

    pub fn maps(&self) -> &[Permutation] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &Permutation {
        &self.maps[i]
    }

    pub fn inverse(&self) -> Self {
        Isotopy { maps: self.maps.iter().map(Permutation::inverse).collect() }
    }

    /// Applying `self` then `next`.
    pub fn then(&self, next: &Isotopy) -> Result<Self> {
        if self.maps.len() != next.maps.len() || self.order() != next.order() {
            return Err(Error::DimensionMismatch { reason: "isotopies of different shape".into() });
        }
        Ok(Isotopy { maps: self.maps.iter().zip(&next.maps).map(|(a, b)| b.after(a)).collect() })
    }
}

/// A circular parastrophe of a k-ary operation.
///
/// Writing the defining relation as the (k+1)-tuple `(a0, a1, .., ak)`
/// with `a0 = f(a1..ak)`, the parastrophe `g` satisfies
/// `b0 = g(b1..bk)` where `b_j = a_{shift + j}` (forward) or
/// `b_j = a_{shift - j}` (reverse), indices mod k+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parastrophe {
    pub shift: usize,
    pub reverse: bool,
}

impl Parastrophe {
    pub const IDENTITY: Parastrophe = Parastrophe { shift: 0, reverse: false };

    pub fn forward(shift: usize) -> Self {
        Parastrophe { shift, reverse: false }
    }

    pub fn backward(shift: usize) -> Self {
        Parastrophe { shift, reverse: true }
    }

    /// Index of the original variable that becomes variable `j` of the parastrophe.
    pub fn source(&self, j: usize, arity: usize) -> usize {
        let m = arity + 1;
        let s = self.shift % m;
        if self.reverse {
            (s + m - j % m) % m
        } else {
            (s + j) % m
        }
    }

    /// Applying `self` and then `next` equals applying the returned parastrophe.
    pub fn then(&self, next: &Parastrophe, arity: usize) -> Self {
        let m = arity + 1;
        // j -> source_self(source_next(j)) = s1 + d1*(s2 + d2*j)
        let s1 = self.shift % m;
        let s2 = next.shift % m;
        let shift = if self.reverse { (s1 + m - s2) % m } else { (s1 + s2) % m };
        Parastrophe { shift, reverse: self.reverse != next.reverse }
    }

    pub fn inverse(&self, arity: usize) -> Self {
        let m = arity + 1;
        let s = self.shift % m;
        if self.reverse {
            *self
        } else {
            Parastrophe { shift: (m - s) % m, reverse: false }
        }
    }

    /// Where node `v'_m` of the parastrophe's factorization graph sits in
    /// the original graph: `v'_m = v_{node_map(m)}`.
    pub fn node_map(&self, node: usize, arity: usize) -> usize {
        let m = arity + 1;
        let s = self.shift % m;
        if self.reverse {
            (s + 2 * m - node % m - 1) % m
        } else {
            (s + node) % m
        }
    }
}
