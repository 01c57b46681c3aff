//! Group recognition: quadrangle criterion, division construction,
//! iterated-group isotopy and twist (pseudoisomorphism) tests.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{factorization_graph, reducible_at, Segment};
use crate::generators::iterated_group;
use crate::group::{group_isomorphic_with_limit, GroupTable};
use crate::perm::Permutation;
use crate::quasigroup::{Isotopy, MultaryQuasigroup};

/// A failing quadrangle: `a(x1,y1) = a(x2,y2)`, `a(x1,y3) = a(x2,y4)`,
/// `a(x3,y1) = a(x4,y2)` but `a(x3,y3) != a(x4,y4)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadrangleWitness {
    pub x: [usize; 4],
    pub y: [usize; 4],
    /// Cells `(x1,y1) (x2,y2) (x1,y3) (x2,y4) (x3,y1) (x4,y2) (x3,y3) (x4,y4)`.
    pub cells: [(usize, usize); 8],
}

/// Checks the quadrangle criterion; `Ok(None)` means it holds.
pub fn quadrangle_criterion(q: &MultaryQuasigroup) -> Result<Option<QuadrangleWitness>> {
    if q.arity() != 2 {
        return Err(Error::NotBinary { arity: q.arity() });
    }
    let n = q.order();
    let a = |x: usize, y: usize| q.at(x * n + y);
    // col_of[x * n + v] = y with a(x, y) = v; row_of[y * n + v] = x with a(x, y) = v.
    let col_of = q.line_inverse(1);
    let row_of = q.line_inverse(0);
    for x1 in 0..n {
        for x2 in 0..n {
            for y1 in 0..n {
                let y2 = col_of[x2 * n + a(x1, y1)] as usize;
                for y3 in 0..n {
                    let y4 = col_of[x2 * n + a(x1, y3)] as usize;
                    for x3 in 0..n {
                        let x4 = row_of[y2 * n + a(x3, y1)] as usize;
                        if a(x3, y3) != a(x4, y4) {
                            return Ok(Some(QuadrangleWitness {
                                x: [x1, x2, x3, x4],
                                y: [y1, y2, y3, y4],
                                cells: [(x1, y1), (x2, y2), (x1, y3), (x2, y4), (x3, y1), (x4, y2), (x3, y3), (x4, y4)],
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The division `a / b` built from a binary factor of a fully reducible
/// quasigroup, with reference element `epsilon = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Division {
    order: usize,
    table: Vec<u32>,
}

/// First counterexample to one of the division axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    /// 1 to 4.
    pub axiom: u8,
    pub args: [usize; 3],
}

impl Division {
    pub const EPSILON: usize = 0;

    /// Builds the division from the binary factor `t`.
    ///
    /// `a / b = u` where `w = t(b, 0)`, `t(a, z) = w` and `t(u, z) = t(0, 0)`.
    pub fn from_binary(t: &MultaryQuasigroup) -> Result<Self> {
        if t.arity() != 2 {
            return Err(Error::NotBinary { arity: t.arity() });
        }
        let n = t.order();
        let col_of = t.line_inverse(1);
        let row_of = t.line_inverse(0);
        let base = t.at(0);
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let w = t.at(b * n);
                let z = col_of[a * n + w] as usize;
                table.push(row_of[z * n + base]);
            }
        }
        Ok(Division { order: n, table })
    }

    /// The division of `q`: `q` itself when binary, otherwise its inner
    /// factor on `x1, x2`.
    pub fn of(q: &MultaryQuasigroup) -> Result<Self> {
        if q.arity() == 2 {
            return Self::from_binary(q);
        }
        let seg = Segment::new(0, 2, q.arity())?;
        let pair = reducible_at(q, seg)?.ok_or(Error::NotFullyReducible {
            chords: factorization_graph(q).chord_count(),
            candidates: Segment::all(q.arity()).len(),
        })?;
        Self::from_binary(&pair.inner)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn div(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    /// Exhaustively checks
    /// (L1) `a/a = e`, (L2) `a/e = a`, (L3) `e/(b/c) = c/b`, (L4) `(a/c)/(b/c) = a/b`.
    pub fn check_axioms(&self) -> std::result::Result<(), AxiomFailure> {
        let n = self.order;
        let e = Self::EPSILON;
        for a in 0..n {
            if self.div(a, a) != e {
                return Err(AxiomFailure { axiom: 1, args: [a, 0, 0] });
            }
            if self.div(a, e) != a {
                return Err(AxiomFailure { axiom: 2, args: [a, 0, 0] });
            }
        }
        for b in 0..n {
            for c in 0..n {
                if self.div(e, self.div(b, c)) != self.div(c, b) {
                    return Err(AxiomFailure { axiom: 3, args: [0, b, c] });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.div(self.div(a, c), self.div(b, c)) != self.div(a, b) {
                        return Err(AxiomFailure { axiom: 4, args: [a, b, c] });
                    }
                }
            }
        }
        Ok(())
    }

    /// `x * y = x / (e / y)`.
    pub fn multiplication(&self) -> Result<GroupTable> {
        let e = Self::EPSILON;
        GroupTable::from_fn(self.order, |x, y| self.div(x, self.div(e, y)))
    }
}

/// A group and an isotopy with
/// `apply_isotopy(iterated_group(group, k), isotopy) == q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupWitness {
    pub group: GroupTable,
    pub name: Option<&'static str>,
    pub isotopy: Isotopy,
}

impl GroupWitness {
    /// Recomputes the witnessed quasigroup.
    pub fn realize(&self) -> Result<MultaryQuasigroup> {
        iterated_group(&self.group, self.isotopy.arity())?.apply_isotopy(&self.isotopy)
    }
}

/// Extracts the group of a fully reducible quasigroup (or a binary one
/// passing the quadrangle criterion) via the division construction.
pub fn extract_group(q: &MultaryQuasigroup) -> Result<GroupWitness> {
    let k = q.arity();
    if k == 2 {
        if let Some(witness) = quadrangle_criterion(q)? {
            return Err(Error::CriterionFailed { witness: Box::new(witness) });
        }
    } else {
        let g = factorization_graph(q);
        if !g.is_complete() {
            return Err(Error::NotFullyReducible { chords: g.chord_count(), candidates: g.candidate_count() });
        }
    }
    let division = Division::of(q)?;
    if let Err(f) = division.check_axioms() {
        return Err(Error::internal(format!("division axiom L{} fails at {:?}", f.axiom, f.args)));
    }
    let group =
        division.multiplication().map_err(|e| Error::internal(format!("division does not yield a group: {e}")))?;
    let isotopy = isotopy_to_iterated(q, &group)?;
    let witness = GroupWitness { name: group.catalog_name(), group, isotopy };
    if witness.realize()? != *q {
        return Err(Error::internal("group witness does not reproduce the quasigroup"));
    }
    Ok(witness)
}

/// For `q` isotopic to an iterated group, `q(x) = R1(x1) * .. * Rk(xk)` in
/// the loop `B(u, v) = q(R1^-1 u, R2^-1 v, 0, ..)`, where `Ri` is `q` with
/// every other argument 0. An isomorphism `phi: B -> group` then gives
/// `a0 = phi^-1` and `ai = (phi Ri)^-1`.
fn isotopy_to_iterated(q: &MultaryQuasigroup, group: &GroupTable) -> Result<Isotopy> {
    let k = q.arity();
    let n = q.order();
    let mut x = vec![0; k];
    let mut r = Vec::with_capacity(k);
    for i in 0..k {
        let images = (0..n)
            .map(|y| {
                x[i] = y;
                let v = q.at_tuple(&x);
                x[i] = 0;
                v
            })
            .collect();
        r.push(Permutation::new(images)?);
    }
    let r1inv = r[0].inverse();
    let r2inv = r[1].inverse();
    let loop_table = GroupTable::from_fn(n, |u, v| {
        x[0] = r1inv.apply(u);
        x[1] = r2inv.apply(v);
        let w = q.at_tuple(&x);
        x[0] = 0;
        x[1] = 0;
        w
    })
    .map_err(|e| Error::internal(format!("principal loop is not a group: {e}")))?;
    let phi = group_isomorphic_with_limit(&loop_table, group, usize::MAX)?
        .ok_or_else(|| Error::internal("principal loop is not isomorphic to the extracted group"))?;
    let mut maps = Vec::with_capacity(k + 1);
    maps.push(phi.inverse());
    for ri in &r {
        maps.push(phi.after(ri).inverse());
    }
    Isotopy::new(maps)
}

/// Decides whether `q` is isotopic to an iterated group.
///
/// Binary quasigroups go through the quadrangle criterion; higher arities
/// through completeness of the factorization graph.
pub fn is_iterated_group_isotope(q: &MultaryQuasigroup) -> Result<Option<GroupWitness>> {
    if q.arity() == 2 {
        return match quadrangle_criterion(q)? {
            None => extract_group(q).map(Some),
            Some(_) => Ok(None),
        };
    }
    let g = factorization_graph(q);
    if g.is_complete() {
        return extract_group(q).map(Some);
    }
    if g.is_three_connected() {
        return Err(Error::internal(format!("factorization graph is 3-connected but incomplete: {}", g.chord_line())));
    }
    Ok(None)
}

/// Whether `g -> beta(g) * beta(e)^-1` is an isomorphism `g1 -> g2`, i.e.
/// `beta` is an isomorphism followed by a right translation.
pub fn is_pseudoisomorphism(beta: &Permutation, g1: &GroupTable, g2: &GroupTable) -> Result<bool> {
    if g1.order() != g2.order() {
        return Err(Error::OrderMismatch { left: g1.order(), right: g2.order() });
    }
    if beta.len() != g1.order() {
        return Err(Error::DimensionMismatch {
            reason: format!("bijection on {} points for groups of order {}", beta.len(), g1.order()),
        });
    }
    let n = g1.order();
    let c_inv = g2.inverse(beta.apply(g1.identity()));
    let psi: Vec<usize> = (0..n).map(|g| g2.mul(beta.apply(g), c_inv)).collect();
    Ok((0..n).all(|a| (0..n).all(|b| psi[g1.mul(a, b)] == g2.mul(psi[a], psi[b]))))
}

/// Every way to fix `k - 3` arguments, in lexicographic order of
/// (positions, values).
fn ternary_fixings(k: usize, n: usize) -> Vec<BTreeMap<usize, usize>> {
    let r = k - 3;
    let mut out = Vec::new();
    let mut positions: Vec<usize> = (1..=r).collect();
    loop {
        let mut values = vec![0; r];
        loop {
            out.push(positions.iter().copied().zip(values.iter().copied()).collect());
            if !crate::quasigroup::next_tuple(&mut values, n) {
                break;
            }
        }
        // next r-subset of 1..=k
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if positions[i] < k - (r - 1 - i) {
                positions[i] += 1;
                for j in i + 1..r {
                    positions[j] = positions[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The first residual ternary quasigroup (by fixing) that is not an
/// iterated group isotope, if any.
pub fn failing_residual_ternary(q: &MultaryQuasigroup) -> Result<Option<BTreeMap<usize, usize>>> {
    let k = q.arity();
    if k < 3 {
        return Err(Error::ArityTooSmall { arity: k, minimum: 3 });
    }
    let fixings = ternary_fixings(k, q.order());
    let verdicts: Vec<Result<bool>> = fixings
        .par_iter()
        .map(|fix| {
            let res = if fix.is_empty() { q.clone() } else { q.residual(fix)? };
            Ok(is_iterated_group_isotope(&res)?.is_some())
        })
        .collect();
    for (fix, verdict) in fixings.into_iter().zip(verdicts) {
        if !verdict? {
            return Ok(Some(fix));
        }
    }
    Ok(None)
}

/// True iff every residual ternary quasigroup is an iterated group
/// isotope. A `true` verdict is cross-checked against full recognition.
pub fn residual_ternary_test(q: &MultaryQuasigroup) -> Result<bool> {
    let ok = failing_residual_ternary(q)?.is_none();
    if ok && is_iterated_group_isotope(q)?.is_none() {
        return Err(Error::internal("all residual ternaries are group isotopes but the quasigroup is not"));
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::compose;
    use crate::group::{group_isomorphic, GroupTable};

    fn twisted() -> MultaryQuasigroup {
        compose(&GroupTable::klein().as_quasigroup(), &GroupTable::cyclic(4).as_quasigroup(), 1).unwrap()
    }

    #[test]
    fn quadrangle_examples() {
        assert_eq!(quadrangle_criterion(&GroupTable::cyclic(5).as_quasigroup()).unwrap(), None);
        assert!(matches!(quadrangle_criterion(&twisted()), Err(Error::NotBinary { arity: 3 })));
    }

    #[test]
    fn quadrangle_witness_is_a_real_failure() {
        // Order-5 square that is not a group isotope.
        #[rustfmt::skip]
        let t = [
            0, 1, 2, 3, 4,
            1, 0, 3, 4, 2,
            2, 3, 4, 0, 1,
            3, 4, 1, 2, 0,
            4, 2, 0, 1, 3,
        ];
        let q = MultaryQuasigroup::new(2, 5, &t).unwrap();
        let w = quadrangle_criterion(&q).unwrap().expect("not a group isotope");
        let v: Vec<usize> = w.cells.iter().map(|&(x, y)| q.evaluate(&[x, y]).unwrap()).collect();
        assert_eq!(v[0], v[1]);
        assert_eq!(v[2], v[3]);
        assert_eq!(v[4], v[5]);
        assert_ne!(v[6], v[7]);
        assert!(is_iterated_group_isotope(&q).unwrap().is_none());
    }

    #[test]
    fn binary_z3_extracts_z3() {
        let w = extract_group(&GroupTable::cyclic(3).as_quasigroup()).unwrap();
        assert_eq!(w.name, Some("Z3"));
    }

    #[test]
    fn ternary_groups_are_distinguished() {
        let v4 = iterated_group(&GroupTable::klein(), 3).unwrap();
        let w = extract_group(&v4).unwrap();
        assert_eq!(w.name, Some("V4"));
        assert!(group_isomorphic(&w.group, &GroupTable::cyclic(4)).unwrap().is_none());
        assert_eq!(w.realize().unwrap(), v4);
    }

    #[test]
    fn division_axioms_hold_for_groups() {
        for (_, g) in crate::group::catalog() {
            let d = Division::of(&iterated_group(&g, 3).unwrap()).unwrap();
            assert_eq!(d.check_axioms(), Ok(()));
        }
    }

    #[test]
    fn extraction_errors() {
        assert!(matches!(extract_group(&twisted()), Err(Error::NotFullyReducible { chords: 1, candidates: 2 })));
        assert!(is_iterated_group_isotope(&twisted()).unwrap().is_none());
    }

    #[test]
    fn pseudoisomorphisms_of_z4() {
        let z4 = GroupTable::cyclic(4);
        assert!(is_pseudoisomorphism(&Permutation::identity(4), &z4, &z4).unwrap());
        assert!(is_pseudoisomorphism(&Permutation::shift(4, 3), &z4, &z4).unwrap());
        let count = Permutation::all(4).iter().filter(|b| is_pseudoisomorphism(b, &z4, &z4).unwrap()).count();
        assert_eq!(count, 8);
        assert!(matches!(
            is_pseudoisomorphism(&Permutation::identity(4), &z4, &GroupTable::cyclic(5)),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn fixings_enumeration() {
        assert_eq!(ternary_fixings(3, 4), vec![BTreeMap::new()]);
        let f = ternary_fixings(4, 2);
        assert_eq!(f.len(), 8);
        assert_eq!(f[0], BTreeMap::from([(1, 0)]));
        assert_eq!(f[7], BTreeMap::from([(4, 1)]));
        assert_eq!(ternary_fixings(5, 2).len(), 10 * 4);
    }

    #[test]
    fn residual_ternary_examples() {
        let z4 = GroupTable::cyclic(4);
        assert!(residual_ternary_test(&iterated_group(&z4, 4).unwrap()).unwrap());
        assert!(residual_ternary_test(&iterated_group(&GroupTable::cyclic(2), 5).unwrap()).unwrap());
        let q = compose(&twisted(), &z4.as_quasigroup(), 3).unwrap();
        assert!(!residual_ternary_test(&q).unwrap());
        let fix = failing_residual_ternary(&q).unwrap().unwrap();
        let res = q.residual(&fix).unwrap();
        assert!(is_iterated_group_isotope(&res).unwrap().is_none());
        assert!(matches!(
            residual_ternary_test(&z4.as_quasigroup()),
            Err(Error::ArityTooSmall { arity: 2, minimum: 3 })
        ));
    }
}
