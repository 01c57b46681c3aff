//! Brute-force oracles shared by the integration tests. None of these use
//! the partition test, the division construction or the block splitter.

#![allow(dead_code)]

use std::collections::HashSet;

use mq_core::{enumerate_all, MultaryQuasigroup, Permutation};

/// Every k-tuple over `0..n` in lexicographic order.
pub fn tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// `q(x) == g(x_1..x_i, h(x_{i+1}..x_j), x_{j+1}..x_k)` for every `x`.
pub fn factors_through(
    q: &MultaryQuasigroup,
    g: &MultaryQuasigroup,
    h: &MultaryQuasigroup,
    i: usize,
    j: usize,
) -> bool {
    tuples(q.arity(), q.order()).iter().all(|x| {
        let inner = h.evaluate(&x[i..j]).unwrap();
        let mut y = x[..i].to_vec();
        y.push(inner);
        y.extend_from_slice(&x[j..]);
        g.evaluate(&y).unwrap() == q.evaluate(x).unwrap()
    })
}

/// Whether some pair (g, h) of quasigroups realizes `q` at segment (i, j),
/// searching every pair.
pub fn pair_search(q: &MultaryQuasigroup, i: usize, j: usize) -> bool {
    let n = q.order();
    let m = j - i;
    let hs: Vec<_> = enumerate_all(m, n).unwrap().collect();
    let gs: Vec<_> = enumerate_all(q.arity() - m + 1, n).unwrap().collect();
    hs.iter().any(|h| gs.iter().any(|g| factors_through(q, g, h, i, j)))
}

/// All chord segments (i, j) of arity k, by definition.
pub fn chord_segments(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 2..=k {
            if !(i == 0 && j == k) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Tables of every isotope of `q`, by applying all `(n!)^(k+1)` isotopies
/// directly: `g(y) = a0(q(a1^-1 y1, .., ak^-1 yk))`.
pub fn isotopy_class(q: &MultaryQuasigroup) -> HashSet<Vec<u32>> {
    let (k, n) = (q.arity(), q.order());
    let perms = Permutation::all(n);
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    let xs = tuples(k, n);
    let mut out = HashSet::new();
    let mut choice = vec![0; k + 1];
    loop {
        let table: Vec<u32> = xs
            .iter()
            .map(|y| {
                let x: Vec<usize> = y.iter().enumerate().map(|(i, &v)| inverses[choice[i + 1]].apply(v)).collect();
                perms[choice[0]].apply(q.evaluate(&x).unwrap()) as u32
            })
            .collect();
        out.insert(table);
        let mut p = 0;
        loop {
            if p > k {
                return out;
            }
            choice[p] += 1;
            if choice[p] < perms.len() {
                break;
            }
            choice[p] = 0;
            p += 1;
        }
    }
}

/// Binary isotopy test by trying every pair of row and column maps.
pub fn binary_isotopic(a: &MultaryQuasigroup, b: &MultaryQuasigroup) -> bool {
    let n = a.order();
    let ev = |q: &MultaryQuasigroup, x: usize, y: usize| q.evaluate(&[x, y]).unwrap();
    let perms = Permutation::all(n);
    for alpha in &perms {
        for beta in &perms {
            // a(x, y) = gamma(b(alpha x, beta y)); gamma is forced cell by cell.
            let mut gamma = vec![usize::MAX; n];
            let ok = (0..n).all(|x| {
                (0..n).all(|y| {
                    let from = ev(b, alpha.apply(x), beta.apply(y));
                    let to = ev(a, x, y);
                    if gamma[from] == usize::MAX {
                        gamma[from] = to;
                    }
                    gamma[from] == to
                })
            });
            if ok {
                return true;
            }
        }
    }
    false
}

/// Cayley table of `x + y mod n`, written out.
pub fn cyclic_square(n: usize) -> MultaryQuasigroup {
    MultaryQuasigroup::from_fn(2, n, |x| (x[0] + x[1]) % n).unwrap()
}

pub fn xor_square() -> MultaryQuasigroup {
    MultaryQuasigroup::from_fn(2, 4, |x| x[0] ^ x[1]).unwrap()
}

/// `sum x_i mod n`, written out.
pub fn cyclic_iterated(n: usize, k: usize) -> MultaryQuasigroup {
    MultaryQuasigroup::from_fn(k, n, |x| x.iter().sum::<usize>() % n).unwrap()
}

/// The order-5 square used for nongroup examples.
pub fn nongroup5() -> MultaryQuasigroup {
    #[rustfmt::skip]
    let t = [
        0, 1, 2, 3, 4,
        1, 0, 3, 4, 2,
        2, 3, 4, 0, 1,
        3, 4, 1, 2, 0,
        4, 2, 0, 1, 3,
    ];
    MultaryQuasigroup::new(2, 5, &t).unwrap()
}

/// `((a + b) mod 4) xor c`, written out.
pub fn twisted_by_hand() -> MultaryQuasigroup {
    MultaryQuasigroup::from_fn(3, 4, |x| ((x[0] + x[1]) % 4) ^ x[2]).unwrap()
}

/// Whether `q` factors at (i, j), trying every inner quasigroup `h`: the
/// outer factor is then forced cell by cell and only needs to be consistent.
/// `hs` must list every quasigroup of arity `j - i` and `q`'s order.
pub fn forced_search(q: &MultaryQuasigroup, hs: &[MultaryQuasigroup], i: usize, j: usize) -> bool {
    let (k, n) = (q.arity(), q.order());
    let right = n.pow((k - j) as u32);
    let inner = n.pow((j - i) as u32);
    let outer_vol = n.pow(i as u32) * n * right;
    let t = q.table();
    hs.iter().any(|h| {
        let ht = h.table();
        let mut g = vec![u32::MAX; outer_vol];
        t.iter().enumerate().all(|(idx, &v)| {
            let r = idx % right;
            let mid = (idx / right) % inner;
            let l = idx / (right * inner);
            let cell = (l * n + ht[mid] as usize) * right + r;
            if g[cell] == u32::MAX {
                g[cell] = v;
            }
            g[cell] == v
        })
    })
}
