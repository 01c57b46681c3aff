//! Consecutive factorizations `f = g(x1..xi, h(x_{i+1}..x_j), x_{j+1}..xk)`
//! and the factorization graph they define.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasigroup::{checked_volume, encode, next_tuple, MultaryQuasigroup};

/// The inner variables `x_{i+1}..x_j` of a consecutive factorization.
///
/// Equivalently the chord `{v_i, v_j}` of the circle `v0 v1 .. vk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub i: usize,
    pub j: usize,
}

impl Segment {
    pub fn new(i: usize, j: usize, arity: usize) -> Result<Self> {
        if i < j && j <= arity && j - i >= 2 && j - i < arity {
            Ok(Segment { i, j })
        } else {
            Err(Error::SegmentOutOfRange { i, j, arity })
        }
    }

    pub fn len(&self) -> usize {
        self.j - self.i
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every chord segment for the given arity, in lexicographic order.
    pub fn all(arity: usize) -> Vec<Segment> {
        let mut out = Vec::new();
        for i in 0..=arity {
            for j in i + 2..=arity {
                if j - i < arity {
                    out.push(Segment { i, j });
                }
            }
        }
        out
    }
}

/// A witnessed factorization: `f = compose(outer, inner, segment.i + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorPair {
    pub outer: MultaryQuasigroup,
    pub inner: MultaryQuasigroup,
    pub segment: Segment,
}

/// Decides whether `q` factors at `seg` and, if so, extracts the factors.
///
/// Inner tuples are grouped by the function they induce on the outer
/// variables; `q` factors exactly when there are `order` groups. The inner
/// factor labels each group by the value of `q` with all outer variables 0,
/// which fixes one representative of the factor pair's isotopy class.
pub fn reducible_at(q: &MultaryQuasigroup, seg: Segment) -> Result<Option<FactorPair>> {
    let k = q.arity();
    let seg = Segment::new(seg.i, seg.j, k)?;
    let n = q.order();
    let m = seg.len();
    let left = seg.i;
    let right = k - seg.j;
    let right_vol = n.pow(right as u32);
    let inner_vol = n.pow(m as u32);
    let left_vol = n.pow(left as u32);
    let left_stride = inner_vol * right_vol;

    // Representative inner tuple (by index) for each label.
    let mut rep: Vec<Option<usize>> = vec![None; n];
    let mut inner_table = Vec::with_capacity(inner_vol);
    for t in 0..inner_vol {
        let base = t * right_vol;
        let label = q.at(base);
        inner_table.push(label as u32);
        match rep[label] {
            None => rep[label] = Some(t),
            Some(r) => {
                let rbase = r * right_vol;
                for l in 0..left_vol {
                    let off = l * left_stride;
                    for o in 0..right_vol {
                        if q.at(off + base + o) != q.at(off + rbase + o) {
                            return Ok(None);
                        }
                    }
                }
            }
        }
    }
    // Each label is hit at least once: lines of q through one inner
    // coordinate already produce n distinct labels.
    let reps: Vec<usize> = rep
        .into_iter()
        .map(|r| r.ok_or_else(|| Error::internal("factor label never realized")))
        .collect::<Result<_>>()?;

    let outer_arity = k - m + 1;
    let mut outer_table = Vec::with_capacity(checked_volume(n, outer_arity)?);
    for l in 0..left_vol {
        for &r in &reps {
            let base = l * left_stride + r * right_vol;
            for o in 0..right_vol {
                outer_table.push(q.at(base + o) as u32);
            }
        }
    }
    Ok(Some(FactorPair {
        outer: MultaryQuasigroup::from_raw(outer_arity, n, outer_table),
        inner: MultaryQuasigroup::from_raw(m, n, inner_table),
        segment: seg,
    }))
}

/// `f(x) = g(x_1..x_{p-1}, h(x_p..x_{p+m-1}), x_{p+m}..)` with `p = insert_at` (1-based).
pub fn compose(g: &MultaryQuasigroup, h: &MultaryQuasigroup, insert_at: usize) -> Result<MultaryQuasigroup> {
    if g.order() != h.order() {
        return Err(Error::OrderMismatch { left: g.order(), right: h.order() });
    }
    if insert_at == 0 || insert_at > g.arity() {
        return Err(Error::PositionOutOfRange { position: insert_at, arity: g.arity() });
    }
    let n = g.order();
    let m = h.arity();
    let k = g.arity() + m - 1;
    let volume = checked_volume(n, k)?;
    let p = insert_at - 1;
    let mut table = Vec::with_capacity(volume);
    let mut x = vec![0; k];
    let mut y = vec![0; g.arity()];
    for _ in 0..volume {
        y[..p].copy_from_slice(&x[..p]);
        y[p] = h.at(encode(&x[p..p + m], n));
        y[p + 1..].copy_from_slice(&x[p + m..]);
        table.push(g.at(encode(&y, n)) as u32);
        next_tuple(&mut x, n);
    }
    Ok(MultaryQuasigroup::from_raw(k, n, table))
}

/// Whether `compose(g, h, i) == compose(g2, h2, j)` table-exactly.
pub fn check_ij_associative(
    g: &MultaryQuasigroup,
    h: &MultaryQuasigroup,
    g2: &MultaryQuasigroup,
    h2: &MultaryQuasigroup,
    i: usize,
    j: usize,
) -> Result<bool> {
    let left = g.arity() + h.arity() - 1;
    let right = g2.arity() + h2.arity() - 1;
    if left != right || g.order() != g2.order() {
        return Err(Error::DimensionMismatch { reason: format!("sides have arity {left} and {right}") });
    }
    Ok(compose(g, h, i)? == compose(g2, h2, j)?)
}

/// The (2k-1)-ary operation obtained by substituting `q` into itself, if
/// every substitution position gives the same table (a k-group).
pub fn multary_group_extension(q: &MultaryQuasigroup) -> Result<Option<MultaryQuasigroup>> {
    let first = compose(q, q, 1)?;
    for i in 2..=q.arity() {
        if compose(q, q, i)? != first {
            return Ok(None);
        }
    }
    Ok(Some(first))
}

/// True iff `q` satisfies all k substitutive associativity identities.
pub fn check_multary_group(q: &MultaryQuasigroup) -> bool {
    matches!(multary_group_extension(q), Ok(Some(_)))
}

/// The circle `v0 v1 .. vk` plus one chord per consecutive factorization.
///
/// Side `e_i = v_{i-1} v_i` carries variable `x_i` and side `v_k v_0` the
/// output. Chords are a bitset over [`Segment::all`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorizationGraph {
    arity: usize,
    bits: Vec<u64>,
}

impl FactorizationGraph {
    /// The bare circle `C_{k+1}`.
    pub fn cycle(arity: usize) -> Self {
        assert!((2..64).contains(&arity), "factorization graphs support arities 2..=63");
        let words = Segment::all(arity).len().div_ceil(64);
        FactorizationGraph { arity, bits: vec![0; words] }
    }

    pub fn with_chords(arity: usize, chords: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::cycle(arity);
        for (a, b) in chords {
            let (i, j) = (a.min(b), a.max(b));
            let seg = Segment::new(i, j, arity)?;
            g.set(seg);
        }
        Ok(g)
    }

    /// The complete graph `K_{k+1}`.
    pub fn complete(arity: usize) -> Self {
        let mut g = Self::cycle(arity);
        for s in Segment::all(arity) {
            g.set(s);
        }
        g
    }

    fn slot(&self, seg: Segment) -> usize {
        // Lexicographic rank among candidates (i, j).
        Segment::all(self.arity).iter().position(|&s| s == seg).expect("valid segment")
    }

    fn set(&mut self, seg: Segment) {
        let s = self.slot(seg);
        self.bits[s / 64] |= 1 << (s % 64);
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn node_count(&self) -> usize {
        self.arity + 1
    }

    pub fn candidate_count(&self) -> usize {
        Segment::all(self.arity).len()
    }

    pub fn has_chord(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        match Segment::new(i, j, self.arity) {
            Ok(seg) => {
                let s = self.slot(seg);
                self.bits[s / 64] & (1 << (s % 64)) != 0
            }
            Err(_) => false,
        }
    }

    pub fn is_side(&self, u: usize, v: usize) -> bool {
        let m = self.node_count();
        u != v && u < m && v < m && ((u + 1) % m == v || (v + 1) % m == u)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.is_side(u, v) || self.has_chord(u, v)
    }

    pub fn chords(&self) -> Vec<(usize, usize)> {
        Segment::all(self.arity)
            .into_iter()
            .enumerate()
            .filter(|(s, _)| self.bits[s / 64] & (1 << (s % 64)) != 0)
            .map(|(_, seg)| (seg.i, seg.j))
            .collect()
    }

    pub fn chord_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.chord_count() == self.candidate_count()
    }

    /// Neighbourhood bitmask of each node.
    pub fn adjacency(&self) -> Vec<u64> {
        let m = self.node_count();
        let mut adj = vec![0u64; m];
        for u in 0..m {
            let v = (u + 1) % m;
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        for (i, j) in self.chords() {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    /// Whether the graph stays connected after deleting any two nodes.
    pub fn is_three_connected(&self) -> bool {
        let m = self.node_count();
        if m < 4 {
            return false;
        }
        let adj = self.adjacency();
        let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        for a in 0..m {
            for b in a + 1..m {
                let alive = full & !(1 << a) & !(1 << b);
                let start = alive.trailing_zeros() as usize;
                let mut seen = 1u64 << start;
                let mut frontier = seen;
                while frontier != 0 {
                    let u = frontier.trailing_zeros() as usize;
                    frontier &= frontier - 1;
                    let fresh = adj[u] & alive & !seen;
                    seen |= fresh;
                    frontier |= fresh;
                }
                if seen != alive {
                    return false;
                }
            }
        }
        true
    }

    /// The same graph with node `v` renamed `map(v)`; `map` must be a
    /// dihedral symmetry of the circle so sides stay sides.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Result<Self> {
        let m = self.node_count();
        for u in 0..m {
            if !self.is_side(map(u), map((u + 1) % m)) {
                return Err(Error::DimensionMismatch { reason: "relabeling does not preserve the circle".into() });
            }
        }
        Self::with_chords(self.arity, self.chords().into_iter().map(|(i, j)| (map(i), map(j))))
    }

    /// `chords: (i,j) (i,j) ...` on one line.
    pub fn chord_line(&self) -> String {
        let mut s = String::from("chords:");
        for (i, j) in self.chords() {
            let _ = write!(s, " ({i},{j})");
        }
        s
    }

    pub fn parse_chord_line(arity: usize, line: &str) -> Result<Self> {
        let rest = line
            .trim()
            .strip_prefix("chords:")
            .ok_or(Error::Parse { line: 1, message: "expected `chords:`".into() })?;
        let mut chords = Vec::new();
        for tok in rest.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or(Error::Parse { line: 1, message: format!("bad chord `{tok}`") })?;
            let (a, b) = inner
                .split_once(',')
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or(Error::Parse { line: 1, message: format!("bad chord `{tok}`") })?;
            chords.push((a, b));
        }
        Self::with_chords(arity, chords)
    }

    /// DOT rendering: sides solid, chords dashed.
    pub fn to_dot(&self) -> String {
        let m = self.node_count();
        let mut s = String::from("graph factorization {\n");
        for v in 0..m {
            let _ = writeln!(s, "  v{v};");
        }
        for i in 1..m {
            let _ = writeln!(s, "  v{} -- v{} [label=\"x{}\"];", i - 1, i, i);
        }
        let _ = writeln!(s, "  v0 -- v{} [label=\"x0\"];", m - 1);
        for (i, j) in self.chords() {
            let _ = writeln!(s, "  v{i} -- v{j} [style=dashed];");
        }
        s.push_str("}\n");
        s
    }
}

impl Serialize for FactorizationGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            arity: usize,
            chords: Vec<(usize, usize)>,
        }
        Repr { arity: self.arity, chords: self.chords() }.serialize(s)
    }
}

/// `Δ(q)`: tests every chord segment (in parallel; the result is order independent).
pub fn factorization_graph(q: &MultaryQuasigroup) -> FactorizationGraph {
    let k = q.arity();
    let present: Vec<(usize, usize)> = Segment::all(k)
        .into_par_iter()
        .filter_map(|seg| match reducible_at(q, seg) {
            Ok(Some(_)) => Some((seg.i, seg.j)),
            _ => None,
        })
        .collect();
    let g = FactorizationGraph::with_chords(k, present).expect("segments come from Segment::all");
    debug_assert!(
        crate::structure::is_theta_complete(&g).complete,
        "factorization graph must be theta-complete: {}",
        g.chord_line()
    );
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zn(n: usize, k: usize) -> MultaryQuasigroup {
        MultaryQuasigroup::from_fn(k, n, |x| x.iter().sum::<usize>() % n).unwrap()
    }

    fn v4() -> MultaryQuasigroup {
        MultaryQuasigroup::from_fn(2, 4, |x| x[0] ^ x[1]).unwrap()
    }

    fn twisted() -> MultaryQuasigroup {
        compose(&v4(), &zn(4, 2), 1).unwrap()
    }

    #[test]
    fn segments() {
        assert_eq!(Segment::all(3), vec![Segment { i: 0, j: 2 }, Segment { i: 1, j: 3 }]);
        assert_eq!(Segment::all(2), vec![]);
        for k in 2..10 {
            assert_eq!(Segment::all(k).len(), (k + 1) * (k - 2) / 2);
        }
        assert!(Segment::new(0, 3, 3).is_err());
        assert!(Segment::new(1, 2, 3).is_err());
    }

    #[test]
    fn iterated_z2_factors_at_front() {
        let q = zn(2, 3);
        let pair = reducible_at(&q, Segment { i: 0, j: 2 }).unwrap().unwrap();
        assert_eq!(pair.inner, zn(2, 2));
        assert_eq!(pair.outer, zn(2, 2));
        assert_eq!(compose(&pair.outer, &pair.inner, 1).unwrap(), q);
    }

    #[test]
    fn twisted_ternary_factors_only_at_front() {
        let q = twisted();
        assert!(reducible_at(&q, Segment { i: 1, j: 3 }).unwrap().is_none());
        assert_eq!(factorization_graph(&q).chords(), vec![(0, 2)]);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(q.evaluate(&[a, b, c]).unwrap(), ((a + b) % 4) ^ c);
                }
            }
        }
    }

    #[test]
    fn segment_out_of_range() {
        assert!(matches!(reducible_at(&zn(2, 3), Segment { i: 0, j: 3 }), Err(Error::SegmentOutOfRange { .. })));
    }

    #[test]
    fn factorization_graph_examples() {
        assert_eq!(factorization_graph(&zn(3, 2)).chords(), vec![]);
        let g = factorization_graph(&zn(3, 3));
        assert!(g.is_complete());
        assert_eq!(g.chords(), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&zn(2, 2), &zn(2, 2), 1).unwrap(), zn(2, 3));
        assert_eq!(compose(&zn(3, 2), &zn(3, 2), 2).unwrap(), zn(3, 3));
        assert!(matches!(compose(&zn(3, 2), &zn(2, 2), 1), Err(Error::OrderMismatch { .. })));
        assert!(matches!(compose(&zn(3, 2), &zn(3, 2), 3), Err(Error::PositionOutOfRange { .. })));
    }

    #[test]
    fn ij_associativity() {
        let z2 = zn(2, 2);
        assert!(check_ij_associative(&z2, &z2, &z2, &z2, 1, 2).unwrap());
        let z6 = zn(6, 2);
        for i in 1..=2 {
            for j in 1..=2 {
                assert!(check_ij_associative(&z6, &z6, &z6, &z6, i, j).unwrap());
            }
        }
        assert!(matches!(check_ij_associative(&z2, &z2, &zn(2, 3), &z2, 1, 1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn multary_groups() {
        assert!(check_multary_group(&zn(3, 3)));
        assert!(check_multary_group(&v4()));
        // x - y mod 3 is not associative.
        let sub = MultaryQuasigroup::from_fn(2, 3, |x| (x[0] + 3 - x[1]) % 3).unwrap();
        assert!(!check_multary_group(&sub));
    }

    #[test]
    fn graph_helpers() {
        let g = FactorizationGraph::with_chords(3, [(2, 0)]).unwrap();
        assert_eq!(g.chord_line(), "chords: (0,2)");
        assert_eq!(FactorizationGraph::parse_chord_line(3, "chords: (0,2)").unwrap(), g);
        assert_eq!(FactorizationGraph::cycle(4).chord_line(), "chords:");
        assert!(g.adjacent(0, 3) && g.adjacent(0, 2) && !g.adjacent(1, 3));
        assert!(FactorizationGraph::complete(3).is_three_connected());
        assert!(!g.is_three_connected());
        assert!(FactorizationGraph::with_chords(3, [(0, 3)]).is_err());
        let dot = g.to_dot();
        assert!(dot.contains("v0 -- v2 [style=dashed]"));
        assert!(dot.contains("v0 -- v3 [label=\"x0\"]"));
    }

    #[test]
    fn relabel_rotates() {
        let g = FactorizationGraph::with_chords(5, [(0, 2)]).unwrap();
        let r = g.relabel(|v| (v + 1) % 6).unwrap();
        assert_eq!(r.chords(), vec![(1, 3)]);
        assert!(g.relabel(|v| if v < 2 { 1 - v } else { v }).is_err());
    }
}
