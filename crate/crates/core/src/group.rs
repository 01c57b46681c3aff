//! Finite group tables, a catalog of small groups and isomorphism search.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::quasigroup::{validate, MultaryQuasigroup};

/// Default ceiling on group order for [`group_isomorphic`].
pub const DEFAULT_ISOMORPHISM_LIMIT: usize = 16;

/// A group on `{0..order-1}`, `table[a * order + b] = a * b`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupTable {
    order: usize,
    table: Vec<u32>,
    identity: usize,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("order", &self.order)
            .field("identity", &self.identity)
            .field("table", &self.table)
            .finish()
    }
}

impl GroupTable {
    /// Checks the Latin property, an identity and associativity.
    pub fn new(order: usize, table: &[usize]) -> Result<Self> {
        let q = validate(2, order, table)?;
        Self::from_binary(&q)
    }

    pub fn from_fn(order: usize, mut op: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let table: Vec<usize> = (0..order * order).map(|i| op(i / order, i % order)).collect();
        Self::new(order, &table)
    }

    /// Reads a binary quasigroup as a group, if it is one.
    pub fn from_binary(q: &MultaryQuasigroup) -> Result<Self> {
        if q.arity() != 2 {
            return Err(Error::NotBinary { arity: q.arity() });
        }
        let n = q.order();
        let t = q.table();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| t[e * n + x] as usize == x && t[x * n + e] as usize == x))
            .ok_or_else(|| Error::precondition("table has no identity element"))?;
        for a in 0..n {
            for b in 0..n {
                let ab = t[a * n + b] as usize;
                for c in 0..n {
                    let bc = t[b * n + c] as usize;
                    if t[ab * n + c] != t[a * n + bc] {
                        return Err(Error::precondition(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                    }
                }
            }
        }
        Ok(GroupTable { order: n, table: t.to_vec(), identity })
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_fn(n, |a, b| (a + b) % n).expect("cyclic group")
    }

    /// `Z2^r` with XOR.
    pub fn elementary_abelian_2(r: u32) -> Self {
        Self::from_fn(1 << r, |a, b| a ^ b).expect("elementary abelian group")
    }

    /// Klein four-group `V4 = Z2 x Z2`.
    pub fn klein() -> Self {
        Self::elementary_abelian_2(2)
    }

    /// Dihedral group of order `2n`: `r^i` is `i`, `s r^i` is `n + i`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_fn(2 * n, |a, b| {
            let (sa, ia) = (a / n, a % n);
            let (sb, ib) = (b / n, b % n);
            // (s^sa r^ia)(s^sb r^ib) = s^(sa+sb) r^(±ia + ib)
            let i = if sb == 1 { (n - ia + ib) % n } else { (ia + ib) % n };
            ((sa + sb) % 2) * n + i
        })
        .expect("dihedral group")
    }

    /// Quaternion group: elements `±1, ±i, ±j, ±k` as `sign * 4 + unit`.
    pub fn quaternion() -> Self {
        // unit products: (sign, unit) for 1,i,j,k
        const MUL: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_fn(8, |a, b| {
            let (s, u) = MUL[a % 4][b % 4];
            ((a / 4 + b / 4 + s) % 2) * 4 + u
        })
        .expect("quaternion group")
    }

    /// Direct product, element `(a, b)` encoded as `a * |h| + b`.
    pub fn product(g: &GroupTable, h: &GroupTable) -> Self {
        let m = h.order;
        Self::from_fn(g.order * m, |x, y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m)).expect("direct product")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order).find(|&b| self.mul(a, b) == self.identity).expect("groups have inverses")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The group transported along `p`: `p(a) * p(b) = p(a * b)`.
    pub fn relabel(&self, p: &Permutation) -> Self {
        let n = self.order;
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[p.apply(a) * n + p.apply(b)] = p.apply(self.mul(a, b)) as u32;
            }
        }
        GroupTable { order: n, table, identity: p.apply(self.identity) }
    }

    pub fn as_quasigroup(&self) -> MultaryQuasigroup {
        MultaryQuasigroup::from_raw(2, self.order, self.table.clone())
    }

    /// Sorted element orders plus commutativity; equal for isomorphic groups.
    pub fn fingerprint(&self) -> (usize, bool, Vec<usize>) {
        let mut orders: Vec<usize> = (0..self.order).map(|a| self.element_order(a)).collect();
        orders.sort_unstable();
        (self.order, self.is_abelian(), orders)
    }

    /// Canonical name from the catalog of groups of order at most 8.
    pub fn catalog_name(&self) -> Option<&'static str> {
        let fp = self.fingerprint();
        catalog()
            .into_iter()
            .filter(|(_, g)| g.order == self.order && g.fingerprint() == fp)
            .find(|(_, g)| matches!(group_isomorphic_with_limit(self, g, usize::MAX), Ok(Some(_))))
            .map(|(name, _)| name)
    }
}

/// Every group of order 1 through 8, one per isomorphism class.
pub fn catalog() -> Vec<(&'static str, GroupTable)> {
    vec![
        ("Z1", GroupTable::cyclic(1)),
        ("Z2", GroupTable::cyclic(2)),
        ("Z3", GroupTable::cyclic(3)),
        ("Z4", GroupTable::cyclic(4)),
        ("V4", GroupTable::klein()),
        ("Z5", GroupTable::cyclic(5)),
        ("Z6", GroupTable::cyclic(6)),
        ("S3", GroupTable::dihedral(3)),
        ("Z7", GroupTable::cyclic(7)),
        ("Z8", GroupTable::cyclic(8)),
        ("Z2xZ4", GroupTable::product(&GroupTable::cyclic(2), &GroupTable::cyclic(4))),
        ("Z2^3", GroupTable::elementary_abelian_2(3)),
        ("D4", GroupTable::dihedral(4)),
        ("Q8", GroupTable::quaternion()),
    ]
}

/// Looks up a catalog group by name.
pub fn catalog_group(name: &str) -> Option<GroupTable> {
    catalog().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}

/// An isomorphism `g1 -> g2` if one exists, for orders up to
/// [`DEFAULT_ISOMORPHISM_LIMIT`].
pub fn group_isomorphic(g1: &GroupTable, g2: &GroupTable) -> Result<Option<Permutation>> {
    group_isomorphic_with_limit(g1, g2, DEFAULT_ISOMORPHISM_LIMIT)
}

pub fn group_isomorphic_with_limit(g1: &GroupTable, g2: &GroupTable, limit: usize) -> Result<Option<Permutation>> {
    if g1.order != g2.order {
        return Err(Error::OrderMismatch { left: g1.order, right: g2.order });
    }
    if g1.order > limit {
        return Err(Error::BudgetExceeded { budget: limit as u64 });
    }
    if g1.fingerprint() != g2.fingerprint() {
        return Ok(None);
    }
    let gens = generators(g1);
    let orders2: Vec<usize> = (0..g2.order).map(|a| g2.element_order(a)).collect();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let o = g1.element_order(s);
            (0..g2.order).filter(|&t| orders2[t] == o).collect()
        })
        .collect();
    let mut images = vec![0; gens.len()];
    Ok(assign(g1, g2, &gens, &candidates, &mut images, 0))
}

fn assign(
    g1: &GroupTable,
    g2: &GroupTable,
    gens: &[usize],
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
    depth: usize,
) -> Option<Permutation> {
    if depth == gens.len() {
        return extend(g1, g2, gens, images);
    }
    for &c in &candidates[depth] {
        images[depth] = c;
        if let Some(p) = assign(g1, g2, gens, candidates, images, depth + 1) {
            return Some(p);
        }
    }
    None
}

/// Extends generator images to a homomorphism by breadth-first closure;
/// returns it if well defined and bijective.
fn extend(g1: &GroupTable, g2: &GroupTable, gens: &[usize], images: &[usize]) -> Option<Permutation> {
    let n = g1.order;
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[g1.identity] = g2.identity;
    used[g2.identity] = true;
    let mut queue = VecDeque::from([g1.identity]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = g1.mul(x, s);
            let fy = g2.mul(map[x], t);
            if map[y] == usize::MAX {
                if used[fy] {
                    return None;
                }
                map[y] = fy;
                used[fy] = true;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    Permutation::new(map).ok()
}

/// A small generating set, chosen greedily in element order.
fn generators(g: &GroupTable) -> Vec<usize> {
    let n = g.order;
    let mut inside = vec![false; n];
    inside[g.identity] = true;
    let mut gens = Vec::new();
    // Prefer high-order elements: fewer generators, fewer candidates.
    let mut elems: Vec<usize> = (0..n).collect();
    elems.sort_by_key(|&a| std::cmp::Reverse(g.element_order(a)));
    for a in elems {
        if inside[a] {
            continue;
        }
        gens.push(a);
        // Closure of the subgroup generated so far.
        let mut members: Vec<usize> = (0..n).filter(|&x| inside[x]).collect();
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &s in &gens {
                let y = g.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
    }
    gens
}
