//! Theta-completeness, the block tree of a factorization graph, and the
//! decomposition of a quasigroup into group, nongroup-binary and
//! irreducible components.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{compose, factorization_graph, reducible_at, FactorizationGraph, Segment};
use crate::quasigroup::MultaryQuasigroup;
use crate::recognition::{extract_group, quadrangle_criterion, GroupWitness};

/// Two non-adjacent nodes joined by three internally disjoint paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaWitness {
    pub ends: (usize, usize),
    /// Node sequences from `ends.0` to `ends.1`.
    pub paths: [Vec<usize>; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub complete: bool,
    pub witness: Option<ThetaWitness>,
}

/// Whether every pair of nodes joined by three internally disjoint paths
/// is adjacent. The witness uses the lexicographically first bad pair.
pub fn is_theta_complete(g: &FactorizationGraph) -> ThetaReport {
    let adj = g.adjacency();
    let m = g.node_count();
    for a in 0..m {
        for b in a + 1..m {
            if adj[a] & (1 << b) != 0 {
                continue;
            }
            if let Some(paths) = three_disjoint_paths(&adj, a, b) {
                return ThetaReport { complete: false, witness: Some(ThetaWitness { ends: (a, b), paths }) };
            }
        }
    }
    ThetaReport { complete: true, witness: None }
}

/// Unit-capacity max flow with split vertices, stopped at 3.
fn three_disjoint_paths(adj: &[u64], a: usize, b: usize) -> Option<[Vec<usize>; 3]> {
    let m = adj.len();
    let size = 2 * m;
    let (vin, vout) = (|v: usize| 2 * v, |v: usize| 2 * v + 1);
    let mut cap = vec![0i32; size * size];
    for v in 0..m {
        // The ends are never passed through.
        cap[vin(v) * size + vout(v)] = i32::from(v != a && v != b);
        for u in 0..m {
            if adj[v] & (1 << u) != 0 {
                cap[vout(v) * size + vin(u)] = 1;
            }
        }
    }
    let mut flow = vec![0i32; size * size];
    let (source, sink) = (vout(a), vin(b));
    for _ in 0..3 {
        let mut prev = vec![usize::MAX; size];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for y in 0..size {
                if prev[y] == usize::MAX && cap[x * size + y] - flow[x * size + y] > 0 {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return None;
        }
        let mut y = sink;
        while y != source {
            let x = prev[y];
            flow[x * size + y] += 1;
            flow[y * size + x] -= 1;
            y = x;
        }
    }
    let mut paths: [Vec<usize>; 3] = Default::default();
    for path in &mut paths {
        path.push(a);
        let mut x = source;
        loop {
            let y = (0..size).find(|&y| flow[x * size + y] > 0).expect("flow is conserved");
            flow[x * size + y] -= 1;
            path.push(y / 2);
            if y == sink {
                break;
            }
            x = vout(y / 2);
        }
    }
    Some(paths)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockKind {
    /// Complete subgraph on at least 3 nodes.
    Clique,
    /// Chordless circle on at least 4 nodes.
    Circle,
}

/// A block; its nodes in increasing order trace its Hamiltonian circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Block {
    pub nodes: Vec<usize>,
    pub kind: BlockKind,
}

impl Block {
    /// The edge `{first, last}` closing the circle.
    pub fn span(&self) -> (usize, usize) {
        (self.nodes[0], *self.nodes.last().expect("blocks are non-empty"))
    }
}

/// Two blocks sharing the edge `{edge.0, edge.1}`; `parent` is on the side
/// of the output edge `v_k v_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Attachment {
    pub parent: usize,
    pub child: usize,
    pub edge: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockTree {
    pub blocks: Vec<Block>,
    pub attachments: Vec<Attachment>,
    /// The block containing the side `v_k v_0`.
    pub root: usize,
}

/// Splits a theta-complete graph into maximal cliques and chordless
/// circles glued along chords. Blocks are sorted by node list.
pub fn block_decomposition(g: &FactorizationGraph) -> Result<BlockTree> {
    let report = is_theta_complete(g);
    if let Some(witness) = report.witness {
        return Err(Error::NotThetaComplete { witness: Box::new(witness) });
    }
    let adj = g.adjacency();
    let mut pieces = Vec::new();
    split(&adj, (0..g.node_count()).collect(), &mut pieces);
    let mut blocks = pieces
        .into_iter()
        .map(|nodes| {
            let p = nodes.len();
            let clique = (0..p).all(|s| (s + 1..p).all(|t| adj[nodes[s]] & (1 << nodes[t]) != 0));
            let chordless =
                (0..p).all(|s| (s + 2..p).all(|t| (s, t) == (0, p - 1) || adj[nodes[s]] & (1 << nodes[t]) == 0));
            let kind = if clique {
                BlockKind::Clique
            } else if chordless {
                BlockKind::Circle
            } else {
                return Err(Error::internal(format!("piece {nodes:?} is neither a clique nor a chordless circle")));
            };
            Ok(Block { nodes, kind })
        })
        .collect::<Result<Vec<_>>>()?;
    blocks.sort_by(|x, y| x.nodes.cmp(&y.nodes));

    let k = g.arity();
    let root = blocks
        .iter()
        .position(|b| b.span() == (0, k))
        .ok_or_else(|| Error::internal("no block contains the output side"))?;
    let mut attachments = Vec::new();
    for (child, b) in blocks.iter().enumerate() {
        if child == root {
            continue;
        }
        let (s, t) = b.span();
        let parent = blocks
            .iter()
            .enumerate()
            .position(|(i, p)| i != child && p.nodes.windows(2).any(|w| w == [s, t]))
            .ok_or_else(|| Error::internal(format!("block {:?} has no parent", b.nodes)))?;
        attachments.push(Attachment { parent, child, edge: (s, t) });
    }
    Ok(BlockTree { blocks, attachments, root })
}

/// Recursively cuts along chords that no other chord crosses.
fn split(adj: &[u64], nodes: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let p = nodes.len();
    let chord = |s: usize, t: usize| t >= s + 2 && (s, t) != (0, p - 1) && adj[nodes[s]] & (1 << nodes[t]) != 0;
    let mut chords = Vec::new();
    for s in 0..p {
        for t in s + 2..p {
            if chord(s, t) {
                chords.push((s, t));
            }
        }
    }
    let crosses =
        |(s, t): (usize, usize), (u, v): (usize, usize)| (s < u && u < t && t < v) || (u < s && s < v && v < t);
    let separator = chords.iter().copied().find(|&c| chords.iter().all(|&d| !crosses(c, d)));
    match separator {
        None => out.push(nodes),
        Some((s, t)) => {
            let inner = nodes[s..=t].to_vec();
            let outer: Vec<usize> = nodes[..=s].iter().chain(&nodes[t..]).copied().collect();
            split(adj, inner, out);
            split(adj, outer, out);
        }
    }
}

/// The quasigroup attached to one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Component {
    /// Clique of 4+ nodes, or a triangle passing the quadrangle criterion.
    Group(GroupWitness),
    /// Triangle that is not a group isotope.
    NongroupBinary { quasigroup: MultaryQuasigroup },
    /// Chordless circle.
    Irreducible { quasigroup: MultaryQuasigroup },
}

impl Component {
    pub fn arity(&self) -> usize {
        match self {
            Component::Group(w) => w.isotopy.arity(),
            Component::NongroupBinary { quasigroup } | Component::Irreducible { quasigroup } => quasigroup.arity(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Component::Group(w) => w.group.order(),
            Component::NongroupBinary { quasigroup } | Component::Irreducible { quasigroup } => quasigroup.order(),
        }
    }

    pub fn quasigroup(&self) -> Result<MultaryQuasigroup> {
        match self {
            Component::Group(w) => w.realize(),
            Component::NongroupBinary { quasigroup } | Component::Irreducible { quasigroup } => Ok(quasigroup.clone()),
        }
    }

    fn label(&self) -> String {
        match self {
            Component::Group(w) => match w.name {
                Some(name) => format!("group {name}"),
                None => format!("group of order {}", w.group.order()),
            },
            Component::NongroupBinary { .. } => "nongroup binary".into(),
            Component::Irreducible { .. } => "irreducible".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecomposedBlock {
    pub nodes: Vec<usize>,
    pub kind: BlockKind,
    pub component: Component,
}

/// A block attachment plus where the child is substituted: variable
/// `position` (1-based) of the parent's component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeAttachment {
    pub parent: usize,
    pub child: usize,
    pub edge: (usize, usize),
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionTree {
    pub arity: usize,
    pub order: usize,
    pub blocks: Vec<DecomposedBlock>,
    pub attachments: Vec<TreeAttachment>,
    pub root: usize,
}

/// Order in which [`DecompositionTree::recompose_in`] substitutes components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traversal {
    /// Children before parents, siblings right to left.
    PostOrder,
    /// Children before parents, siblings left to right.
    PostOrderLeftToRight,
    /// Parents before children, breadth first.
    TopDown,
}

/// Decomposes `q` along the block tree of its factorization graph.
///
/// Each child block is split off with [`reducible_at`] at its span, so its
/// component carries the canonical factor labeling.
pub fn decompose_quasigroup(q: &MultaryQuasigroup) -> Result<DecompositionTree> {
    let g = factorization_graph(q);
    let tree = block_decomposition(&g).map_err(|e| Error::internal(format!("factorization graph: {e}")))?;
    let mut components: Vec<Option<Component>> = vec![None; tree.blocks.len()];
    let mut attachments = Vec::new();
    extract(&tree, tree.root, q.clone(), 0, &mut components, &mut attachments)?;
    attachments.sort_by_key(|a: &TreeAttachment| (a.parent, a.position));
    let blocks = tree
        .blocks
        .into_iter()
        .zip(components)
        .map(|(b, c)| {
            Ok(DecomposedBlock {
                nodes: b.nodes,
                kind: b.kind,
                component: c.ok_or_else(|| Error::internal("block unreachable from the root"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = DecompositionTree { arity: q.arity(), order: q.order(), blocks, attachments, root: tree.root };
    debug_assert_eq!(out.recompose().as_ref(), Ok(q));
    Ok(out)
}

/// `q` realizes the span of block `b`, with local node `t` = global `base + t`.
fn extract(
    tree: &BlockTree,
    b: usize,
    q: MultaryQuasigroup,
    base: usize,
    components: &mut [Option<Component>],
    attachments: &mut Vec<TreeAttachment>,
) -> Result<()> {
    let block = &tree.blocks[b];
    let mut children: Vec<&Attachment> = tree.attachments.iter().filter(|a| a.parent == b).collect();
    // Right to left keeps the local indices of earlier spans valid.
    children.sort_by_key(|a| std::cmp::Reverse(a.edge.0));
    let mut cur = q;
    for att in children {
        let (s, t) = att.edge;
        let seg = Segment::new(s - base, t - base, cur.arity())?;
        let pair = reducible_at(&cur, seg)?
            .ok_or_else(|| Error::internal(format!("chord ({s},{t}) present but segment does not factor")))?;
        let position = block.nodes.iter().position(|&v| v == s).expect("edge lies on the parent") + 1;
        attachments.push(TreeAttachment { parent: b, child: att.child, edge: att.edge, position });
        extract(tree, att.child, pair.inner, s, components, attachments)?;
        cur = pair.outer;
    }
    if cur.arity() + 1 != block.nodes.len() {
        return Err(Error::internal("component arity does not match its block"));
    }
    let component = match block.kind {
        BlockKind::Circle => Component::Irreducible { quasigroup: cur },
        BlockKind::Clique if cur.arity() == 2 && quadrangle_criterion(&cur)?.is_some() => {
            Component::NongroupBinary { quasigroup: cur }
        }
        BlockKind::Clique => Component::Group(extract_group(&cur)?),
    };
    components[b] = Some(component);
    Ok(())
}

impl DecompositionTree {
    /// Rebuilds the decomposed quasigroup table-exactly.
    pub fn recompose(&self) -> Result<MultaryQuasigroup> {
        self.recompose_in(Traversal::PostOrder)
    }

    pub fn recompose_in(&self, order: Traversal) -> Result<MultaryQuasigroup> {
        let children = self.check()?;
        let q = match order {
            Traversal::PostOrder => self.rebuild(self.root, &children, false)?,
            Traversal::PostOrderLeftToRight => self.rebuild(self.root, &children, true)?,
            Traversal::TopDown => self.rebuild_top_down(&children)?,
        };
        if q.arity() != self.arity {
            return Err(malformed(format!("recomposed arity {} differs from {}", q.arity(), self.arity)));
        }
        Ok(q)
    }

    /// Per-block child attachments sorted by position, after structural checks.
    fn check(&self) -> Result<Vec<Vec<TreeAttachment>>> {
        let n = self.blocks.len();
        if self.root >= n {
            return Err(malformed("root index out of range"));
        }
        let mut children = vec![Vec::new(); n];
        let mut has_parent = vec![false; n];
        for a in &self.attachments {
            if a.parent >= n || a.child >= n || a.child == self.root {
                return Err(malformed(format!("bad attachment {a:?}")));
            }
            if std::mem::replace(&mut has_parent[a.child], true) {
                return Err(malformed(format!("block {} has two parents", a.child)));
            }
            let arity = self.blocks[a.parent].component.arity();
            if a.position == 0 || a.position > arity {
                return Err(malformed(format!("position {} outside parent arity {arity}", a.position)));
            }
            children[a.parent].push(*a);
        }
        for (i, list) in children.iter_mut().enumerate() {
            list.sort_by_key(|a| a.position);
            if list.windows(2).any(|w| w[0].position == w[1].position) {
                return Err(malformed(format!("block {i} has two children at one position")));
            }
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.component.order() != self.order {
                return Err(malformed(format!("block {i} has order {}", b.component.order())));
            }
            if i != self.root && !has_parent[i] {
                return Err(malformed(format!("block {i} is detached")));
            }
        }
        // Reachability from the root rules out cycles.
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        while let Some(b) = stack.pop() {
            if std::mem::replace(&mut seen[b], true) {
                return Err(malformed("attachment cycle"));
            }
            stack.extend(children[b].iter().map(|a| a.child));
        }
        if seen.contains(&false) {
            return Err(malformed("attachments do not form a tree"));
        }
        Ok(children)
    }

    fn rebuild(&self, b: usize, children: &[Vec<TreeAttachment>], left_to_right: bool) -> Result<MultaryQuasigroup> {
        let mut cur = self.blocks[b].component.quasigroup()?;
        if left_to_right {
            let mut offset = 0;
            for a in &children[b] {
                let h = self.rebuild(a.child, children, true)?;
                let grow = h.arity() - 1;
                cur = compose(&cur, &h, a.position + offset)?;
                offset += grow;
            }
        } else {
            for a in children[b].iter().rev() {
                let h = self.rebuild(a.child, children, false)?;
                cur = compose(&cur, &h, a.position)?;
            }
        }
        Ok(cur)
    }

    /// Substitutes bare components breadth first; `slots` tracks which block
    /// variable each current argument belongs to.
    fn rebuild_top_down(&self, children: &[Vec<TreeAttachment>]) -> Result<MultaryQuasigroup> {
        let root = &self.blocks[self.root].component;
        let mut cur = root.quasigroup()?;
        let mut slots: Vec<(usize, usize)> = (1..=root.arity()).map(|p| (self.root, p)).collect();
        let mut queue = VecDeque::from([self.root]);
        while let Some(b) = queue.pop_front() {
            for a in &children[b] {
                let at = slots
                    .iter()
                    .position(|&s| s == (b, a.position))
                    .ok_or_else(|| malformed("attachment slot vanished"))?;
                let comp = &self.blocks[a.child].component;
                cur = compose(&cur, &comp.quasigroup()?, at + 1)?;
                slots.splice(at..=at, (1..=comp.arity()).map(|p| (a.child, p)));
                queue.push_back(a.child);
            }
        }
        Ok(cur)
    }

    /// `(kind, block size, group name)` per block, sorted; isotopy invariant.
    pub fn block_signature(&self) -> Vec<(BlockKind, usize, String)> {
        let mut sig: Vec<_> = self.blocks.iter().map(|b| (b.kind, b.nodes.len(), b.component.label())).collect();
        sig.sort();
        sig
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    /// The attachment tree in DOT.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph decomposition {\n");
        for (i, b) in self.blocks.iter().enumerate() {
            let nodes: Vec<String> = b.nodes.iter().map(|v| format!("v{v}")).collect();
            let kind = match b.kind {
                BlockKind::Clique => "clique",
                BlockKind::Circle => "circle",
            };
            let _ = writeln!(s, "  b{i} [label=\"{kind} {}\\n{}\"];", nodes.join(" "), b.component.label());
        }
        for a in &self.attachments {
            let _ = writeln!(s, "  b{} -- b{} [label=\"v{}v{}\"];", a.parent, a.child, a.edge.0, a.edge.1);
        }
        s.push_str("}\n");
        s
    }
}

fn malformed(reason: impl Into<String>) -> Error {
    Error::MalformedTree { reason: reason.into() }
}
