//! Transversal designs of strength `l - 1` and index 1.
//!
//! Point `c * order + v` is value `v` in class `c`. A quasigroup's design
//! puts argument `x_i` in class `i - 1` and the output in the last class.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::perm::Permutation;
use crate::quasigroup::{next_tuple, MultaryQuasigroup};

pub const TD_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalDesign {
    classes: usize,
    order: usize,
    strength: usize,
    index: usize,
    /// Each block sorted by point id.
    blocks: Vec<Vec<usize>>,
}

impl TransversalDesign {
    /// Blocks are stored sorted; points must lie in `0..classes * order`.
    pub fn new(classes: usize, order: usize, strength: usize, index: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let points = classes * order;
        let mut blocks = blocks;
        for b in &mut blocks {
            if let Some(&p) = b.iter().find(|&&p| p >= points) {
                return Err(Error::DimensionMismatch { reason: format!("point {p} outside 0..{points}") });
            }
            b.sort_unstable();
        }
        Ok(TransversalDesign { classes, order, strength, index, blocks })
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Point ids of each class.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        (0..self.classes).map(|c| (c * self.order..(c + 1) * self.order).collect()).collect()
    }

    pub fn class_of(&self, point: usize) -> usize {
        point / self.order
    }

    /// Blocks in sorted order, for set comparison.
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        out.blocks.sort_unstable();
        out
    }

    /// Whether every block has exactly one point per class, in class order.
    fn is_transversal(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == self.classes && b.iter().enumerate().all(|(c, &p)| self.class_of(p) == c))
    }

    /// Class `c` value of a transversal block.
    fn value(&self, block: &[usize], c: usize) -> usize {
        block[c] - c * self.order
    }

    /// `td l order t lambda` then one block per line.
    pub fn to_td_string(&self) -> String {
        let mut s = format!("td {} {} {} {}\n", self.classes, self.order, self.strength, self.index);
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn parse_td(text: &str) -> Result<Self> {
        let mut header = None;
        let mut blocks = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse { line: no + 1, message };
            if header.is_none() {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 5 || f[0] != "td" {
                    return Err(bad("expected `td <l> <order> <t> <lambda>`".into()));
                }
                let nums = f[1..]
                    .iter()
                    .map(|x| x.parse::<usize>().map_err(|_| bad(format!("bad number `{x}`"))))
                    .collect::<Result<Vec<_>>>()?;
                header = Some((nums[0], nums[1], nums[2], nums[3]));
                continue;
            }
            let block = line
                .split_whitespace()
                .map(|x| x.parse::<usize>().map_err(|_| bad(format!("bad point `{x}`"))))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        let (l, n, t, lambda) = header.ok_or(Error::Parse { line: 0, message: "missing header".into() })?;
        Self::new(l, n, t, lambda, blocks)
    }
}

/// The design of `q`: one block `(x1, .., xk, f(x))` per argument tuple.
pub fn to_design(q: &MultaryQuasigroup) -> TransversalDesign {
    let (k, n) = (q.arity(), q.order());
    let mut x = vec![0; k];
    let blocks = q
        .table()
        .iter()
        .map(|&out| {
            let mut b: Vec<usize> = x.iter().enumerate().map(|(c, &v)| c * n + v).collect();
            b.push(k * n + out as usize);
            next_tuple(&mut x, n);
            b
        })
        .collect();
    TransversalDesign { classes: k + 1, order: n, strength: k, index: 1, blocks }
}

/// Blocks `{x1, .., xl}` with `x1 x2 .. xl = e` in `g`.
pub fn group_design(g: &GroupTable, classes: usize) -> Result<TransversalDesign> {
    if classes < 3 {
        return Err(Error::precondition("designs need at least 3 classes"));
    }
    let q = MultaryQuasigroup::from_fn(classes - 1, g.order(), |x| {
        g.inverse(x.iter().fold(g.identity(), |acc, &v| g.mul(acc, v)))
    })?;
    Ok(to_design(&q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation")]
pub enum DesignViolation {
    /// A block misses a class or meets one twice.
    NotTransversal { block: usize },
    /// A transversal `t`-set lies in `count` blocks instead of `lambda`.
    WrongCount { points: Vec<usize>, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignReport {
    pub valid: bool,
    pub counterexample: Option<DesignViolation>,
}

/// Checks (TD1) and (TD2) for strength `t` and index `lambda`. The
/// counterexample is the lexicographically least bad `t`-set.
pub fn verify_design(d: &TransversalDesign, t: usize, lambda: usize) -> Result<DesignReport> {
    if t >= d.classes || t == 0 {
        return Err(Error::precondition(format!("strength {t} must lie in 1..{}", d.classes)));
    }
    let (l, n) = (d.classes, d.order);
    for (i, b) in d.blocks.iter().enumerate() {
        let mut seen = vec![false; l];
        let ok = b.len() == l && b.iter().all(|&p| !std::mem::replace(&mut seen[d.class_of(p)], true));
        if !ok {
            return Ok(DesignReport {
                valid: false,
                counterexample: Some(DesignViolation::NotTransversal { block: i }),
            });
        }
    }
    let subsets = class_subsets(l, t);
    let cells = n.pow(t as u32);
    let worst = subsets
        .par_iter()
        .filter_map(|cls| {
            let mut counts = vec![0usize; cells];
            for b in &d.blocks {
                let idx = cls.iter().fold(0, |acc, &c| acc * n + d.value(b, c));
                counts[idx] += 1;
            }
            let bad = counts.iter().position(|&c| c != lambda)?;
            let mut rest = bad;
            let mut points = vec![0; t];
            for (slot, &c) in cls.iter().enumerate().rev() {
                points[slot] = c * n + rest % n;
                rest /= n;
            }
            Some((points, counts[bad]))
        })
        .min();
    Ok(match worst {
        None => DesignReport { valid: true, counterexample: None },
        Some((points, count)) => {
            DesignReport { valid: false, counterexample: Some(DesignViolation::WrongCount { points, count }) }
        }
    })
}

/// All `t`-subsets of `0..l` in lexicographic order.
fn class_subsets(l: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..t).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..t).rev().find(|&i| cur[i] < l - t + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..t {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Cyclically renumbers classes: new class `j` is old class `j + shift`.
pub fn rotate_classes(d: &TransversalDesign, shift: usize) -> TransversalDesign {
    let (l, n) = (d.classes, d.order);
    let blocks =
        d.blocks.iter().map(|b| b.iter().map(|&p| ((p / n + l - shift % l) % l) * n + p % n).collect()).collect();
    TransversalDesign::new(l, n, d.strength, d.index, blocks).expect("points stay in range")
}

/// i-composition identifying class `i` (1-based) of `a` with the first
/// class of `b` value by value.
pub fn i_compose(a: &TransversalDesign, b: &TransversalDesign, i: usize) -> Result<TransversalDesign> {
    i_compose_with(a, b, i, &Permutation::identity(a.order))
}

/// i-composition where value `v` of class `i` of `a` is identified with
/// value `ident(v)` of the first class of `b`.
///
/// Result classes: `a`'s classes before `i`, `b`'s classes after its first,
/// then `a`'s classes after `i`. Blocks are `B' + B''` minus the merged point
/// for every pair agreeing on the merged class.
pub fn i_compose_with(
    a: &TransversalDesign,
    b: &TransversalDesign,
    i: usize,
    ident: &Permutation,
) -> Result<TransversalDesign> {
    if a.order != b.order {
        return Err(Error::ClassSizeMismatch { left: a.order, right: b.order });
    }
    for d in [a, b] {
        if d.classes < 3 {
            return Err(Error::precondition("designs need at least 3 classes"));
        }
        if d.index != 1 || d.strength + 1 != d.classes {
            return Err(Error::precondition("i-composition needs index 1 and strength l-1"));
        }
        if !d.is_transversal() {
            return Err(Error::precondition("blocks are not transversal"));
        }
    }
    if i == 0 || i > a.classes {
        return Err(Error::PositionOutOfRange { position: i, arity: a.classes });
    }
    if ident.len() != a.order {
        return Err(Error::DimensionMismatch { reason: "identification bijection has the wrong size".into() });
    }
    let n = a.order;
    let mut by_first: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); n];
    for blk in &b.blocks {
        by_first[b.value(blk, 0)].push(blk);
    }
    let classes = a.classes + b.classes - 2;
    let mut blocks = Vec::new();
    for x in &a.blocks {
        let merged = ident.apply(a.value(x, i - 1));
        for y in &by_first[merged] {
            let values = (0..i - 1)
                .map(|c| a.value(x, c))
                .chain((1..b.classes).map(|c| b.value(y, c)))
                .chain((i..a.classes).map(|c| a.value(x, c)));
            blocks.push(values.enumerate().map(|(c, v)| c * n + v).collect());
        }
    }
    TransversalDesign::new(classes, n, classes - 1, 1, blocks)
}
