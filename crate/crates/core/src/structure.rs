//! Digraphs of patterns: strong connectivity, components, AP-irreducibility,
//! ear-style nested sequences, and the red/blue quotient.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::pattern::{b_matrix, positive_part, Sign, SignPattern};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("digraph is not minimally strongly connected")]
    NotMinimallyStronglyConnected,
    #[error("digraph has a loop at vertex {0}")]
    HasLoop(usize),
    #[error("a single vertex has no directed cycle")]
    Trivial,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("pattern is not AP-irreducible")]
    NotApIrreducible,
    #[error("no minimally AP-irreducible subpattern preserving the components was found")]
    ExtractionFailed,
    #[error("components do not match the positive part of the pattern")]
    ComponentMismatch,
    #[error("invalid nested sequence: {0}")]
    InvalidNestedSequence(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Digraph {
    n: usize,
    #[serde(serialize_with = "ser_arcs")]
    succ: Vec<BTreeSet<usize>>,
}

fn ser_arcs<S: serde::Serializer>(succ: &[BTreeSet<usize>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(None)?;
    for (i, out) in succ.iter().enumerate() {
        for &j in out {
            seq.serialize_element(&(i, j))?;
        }
    }
    seq.end()
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            succ: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut d = Digraph::new(n);
        for &(i, j) in arcs {
            d.add_arc(i, j);
        }
        d
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn add_arc(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "arc ({i}, {j}) out of range");
        self.succ[i].insert(j);
    }

    pub fn remove_arc(&mut self, i: usize, j: usize) -> bool {
        self.succ[i].remove(&j)
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.succ[i].contains(&j)
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[i].iter().copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
    }

    pub fn arc_count(&self) -> usize {
        self.succ.iter().map(|s| s.len()).sum()
    }

    pub fn has_loop(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.has_arc(i, i))
    }

    pub fn reverse(&self) -> Digraph {
        let mut r = Digraph::new(self.n);
        for (i, j) in self.arcs() {
            r.add_arc(j, i);
        }
        r
    }

    /// Subgraph induced on `verts`, relabelled to `0..verts.len()` in the given order.
    pub fn induced(&self, verts: &[usize]) -> Digraph {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in verts.iter().enumerate() {
            pos[v] = k;
        }
        let mut d = Digraph::new(verts.len());
        for (k, &v) in verts.iter().enumerate() {
            for w in self.successors(v) {
                if pos[w] != usize::MAX {
                    d.add_arc(k, pos[w]);
                }
            }
        }
        d
    }

    /// Number of arcs with both ends in `verts`.
    pub fn induced_arc_count(&self, verts: &[usize]) -> usize {
        let set: HashSet<usize> = verts.iter().copied().collect();
        verts
            .iter()
            .map(|&v| self.successors(v).filter(|w| set.contains(w)).count())
            .sum()
    }

    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Strongly connected components (Kosaraju), each sorted, ordered by least member.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(s, self.successors(s).collect())];
            while let Some((v, rest)) = stack.last_mut() {
                if let Some(w) = rest.pop() {
                    if !seen[w] {
                        seen[w] = true;
                        let next = self.successors(w).collect();
                        stack.push((w, next));
                    }
                } else {
                    order.push(*v);
                    stack.pop();
                }
            }
        }
        let rev = self.reverse();
        let mut comp = vec![usize::MAX; n];
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut part = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in rev.successors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        part.push(w);
                        stack.push(w);
                    }
                }
            }
            part.sort_unstable();
            parts.push(part);
        }
        parts.sort_by_key(|p| p[0]);
        parts
    }

    /// BFS distances to `target` along arcs (usize::MAX if unreachable).
    fn distances_to(&self, target: usize) -> Vec<usize> {
        let rev = self.reverse();
        let mut dist = vec![usize::MAX; self.n];
        dist[target] = 0;
        let mut q = VecDeque::from([target]);
        while let Some(v) = q.pop_front() {
            for w in rev.successors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }
}

pub fn digraph_of(a: &SignPattern) -> Digraph {
    let mut d = Digraph::new(a.order());
    for (i, j) in a.nonzeros() {
        d.add_arc(i, j);
    }
    d
}

pub fn is_strongly_connected(d: &Digraph) -> bool {
    if d.n == 0 {
        return false;
    }
    d.reachable_from(0).iter().all(|&b| b) && d.reverse().reachable_from(0).iter().all(|&b| b)
}

pub fn is_minimally_strongly_connected(d: &Digraph) -> bool {
    if !is_strongly_connected(d) {
        return false;
    }
    let arcs: Vec<_> = d.arcs().collect();
    let mut g = d.clone();
    for (i, j) in arcs {
        g.remove_arc(i, j);
        let still = is_strongly_connected(&g);
        g.add_arc(i, j);
        if still {
            return false;
        }
    }
    true
}

/// True iff `d` is a single directed cycle through all of its (at least two) vertices.
pub fn is_directed_cycle(d: &Digraph) -> bool {
    d.n >= 2 && d.has_loop().is_none() && (0..d.n).all(|i| d.succ[i].len() == 1) && is_strongly_connected(d)
}

/// Vertices of a directed-cycle digraph in cycle order, rotated so `last` comes last.
pub fn cycle_order_ending_at(d: &Digraph, last: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(d.n);
    let mut v = last;
    for _ in 0..d.n {
        v = d.successors(v).next().expect("cycle vertex has a successor");
        out.push(v);
    }
    debug_assert_eq!(out.last(), Some(&last));
    out
}

/// One expansion step: a directed path of new vertices entered from `from`
/// and leaving to `to` (both already present).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ear {
    pub from: usize,
    pub path: Vec<usize>,
    pub to: usize,
}

/// V₁ ⊊ V₂ ⊊ … with V₁ a directed cycle and each later set adding one ear.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestedSequence {
    /// V₁ in cycle order, starting from the requested vertex.
    pub cycle: Vec<usize>,
    pub ears: Vec<Ear>,
}

impl NestedSequence {
    pub fn sets(&self) -> Vec<Vec<usize>> {
        let mut cur: Vec<usize> = self.cycle.clone();
        let mut out = Vec::new();
        let mut sorted = cur.clone();
        sorted.sort_unstable();
        out.push(sorted);
        for e in &self.ears {
            cur.extend(&e.path);
            let mut s = cur.clone();
            s.sort_unstable();
            out.push(s);
        }
        out
    }

    /// Index of the set V_i (0-based) in which `v` first appears.
    pub fn level_of(&self, v: usize) -> Option<usize> {
        if self.cycle.contains(&v) {
            return Some(0);
        }
        self.ears.iter().position(|e| e.path.contains(&v)).map(|i| i + 1)
    }

    /// Check the cycle/ear properties against `d`, including that every ear is
    /// attached by exactly two arcs and induces a path.
    pub fn validate(&self, d: &Digraph) -> Result<(), StructureError> {
        let bad = |m: &str| Err(StructureError::InvalidNestedSequence(m.to_string()));
        let k = self.cycle.len();
        if k < 2 {
            return bad("initial set must be a cycle of length at least two");
        }
        let mut inside = vec![false; d.n];
        for &v in &self.cycle {
            if v >= d.n || inside[v] {
                return bad("cycle repeats or leaves the vertex range");
            }
            inside[v] = true;
        }
        for i in 0..k {
            if !d.has_arc(self.cycle[i], self.cycle[(i + 1) % k]) {
                return bad("cycle arc missing");
            }
        }
        let mut verts = self.cycle.clone();
        let mut arcs = d.induced_arc_count(&verts);
        if arcs != k {
            return bad("initial set does not induce a bare cycle");
        }
        for e in &self.ears {
            if e.path.is_empty() || !inside[e.from] || !inside[e.to] {
                return bad("ear must have new vertices and attach to the current set");
            }
            for &v in &e.path {
                if v >= d.n || inside[v] {
                    return bad("ear vertex repeated");
                }
                inside[v] = true;
            }
            let mut walk = vec![e.from];
            walk.extend(&e.path);
            walk.push(e.to);
            if walk.windows(2).any(|w| !d.has_arc(w[0], w[1])) {
                return bad("ear arc missing");
            }
            verts.extend(&e.path);
            let now = d.induced_arc_count(&verts);
            if now != arcs + e.path.len() + 1 {
                return bad("ear is not attached by exactly two arcs");
            }
            arcs = now;
        }
        if verts.len() != d.n {
            return bad("nested sequence does not cover every vertex");
        }
        Ok(())
    }
}

/// Nested sequence of a minimally strongly connected loop-free digraph, with
/// the initial cycle through `v`. Choices: lexicographically least shortest
/// cycle through `v`; then repeatedly the lowest vertex with an arc leaving the
/// current set, followed by the shortest return path (ties lexicographic).
pub fn nested_sequence(d: &Digraph, v: usize) -> Result<NestedSequence, StructureError> {
    if v >= d.n {
        return Err(StructureError::VertexOutOfRange(v));
    }
    if let Some(l) = d.has_loop() {
        return Err(StructureError::HasLoop(l));
    }
    if !is_minimally_strongly_connected(d) {
        return Err(StructureError::NotMinimallyStronglyConnected);
    }
    if d.n == 1 {
        return Err(StructureError::Trivial);
    }
    let cycle = shortest_cycle_through(d, v).ok_or(StructureError::NotMinimallyStronglyConnected)?;
    extend_nested_sequence(d, cycle, Vec::new())
}

/// Lexicographically least among the shortest directed cycles through `v`.
pub fn shortest_cycle_through(d: &Digraph, v: usize) -> Option<Vec<usize>> {
    let dist = d.distances_to(v);
    let first = d
        .successors(v)
        .filter(|&w| dist[w] != usize::MAX)
        .min_by_key(|&w| (dist[w], w))?;
    let mut cycle = vec![v];
    let mut cur = first;
    while cur != v {
        cycle.push(cur);
        cur = d.successors(cur).filter(|&w| dist[w] + 1 == dist[cur]).min()?;
    }
    Some(cycle)
}

/// Complete a nested sequence from a given cycle and leading ears using the
/// greedy rule of [`nested_sequence`]; the result is validated.
pub fn extend_nested_sequence(
    d: &Digraph,
    cycle: Vec<usize>,
    mut ears: Vec<Ear>,
) -> Result<NestedSequence, StructureError> {
    let mut inside = vec![false; d.n];
    for &c in &cycle {
        inside[c] = true;
    }
    for e in &ears {
        for &p in &e.path {
            inside[p] = true;
        }
    }
    while inside.iter().any(|&b| !b) {
        ears.push(next_ear(d, &inside).ok_or(StructureError::NotMinimallyStronglyConnected)?);
        for &p in &ears.last().unwrap().path {
            inside[p] = true;
        }
    }
    let ns = NestedSequence { cycle, ears };
    ns.validate(d)?;
    Ok(ns)
}

fn next_ear(d: &Digraph, inside: &[bool]) -> Option<Ear> {
    let n = d.n;
    let x = (0..n).find(|&x| inside[x] && d.successors(x).any(|y| !inside[y]))?;
    // dist[w] = length of the shortest outside path from w to a vertex with an arc back in.
    let mut dist = vec![usize::MAX; n];
    let rev = d.reverse();
    let mut q = VecDeque::new();
    for w in 0..n {
        if !inside[w] && d.successors(w).any(|z| inside[z]) {
            dist[w] = 0;
            q.push_back(w);
        }
    }
    while let Some(w) = q.pop_front() {
        for p in rev.successors(w) {
            if !inside[p] && dist[p] == usize::MAX {
                dist[p] = dist[w] + 1;
                q.push_back(p);
            }
        }
    }
    let y = d
        .successors(x)
        .filter(|&y| !inside[y] && dist[y] != usize::MAX)
        .min_by_key(|&y| (dist[y], y))?;
    let mut path = vec![y];
    let mut cur = y;
    while dist[cur] > 0 {
        cur = d
            .successors(cur)
            .filter(|&w| !inside[w] && dist[w] + 1 == dist[cur])
            .min()?;
        path.push(cur);
    }
    let to = d.successors(cur).find(|&z| inside[z])?;
    Some(Ear { from: x, path, to })
}

/// All simple directed cycles through `v`, shortest first then lexicographic,
/// stopping after `limit` cycles.
pub fn cycles_through(d: &Digraph, v: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = vec![v];
    let mut on = vec![false; d.n];
    on[v] = true;
    fn dfs(d: &Digraph, v: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>, limit: usize) {
        let cur = *path.last().unwrap();
        for w in d.successors(cur) {
            if out.len() >= limit {
                return;
            }
            if w == v && path.len() >= 2 {
                out.push(path.clone());
            } else if !on[w] && w != v {
                on[w] = true;
                path.push(w);
                dfs(d, v, path, on, out, limit);
                path.pop();
                on[w] = false;
            }
        }
    }
    dfs(d, v, &mut path, &mut on, &mut out, limit);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every ear that could extend the set marked by `inside`, with both attach
/// vertices in `attach` and a path inducing exactly two attach arcs.
pub fn candidate_ears(d: &Digraph, inside: &[bool], attach: &[usize], limit: usize) -> Vec<Ear> {
    let inside_verts: Vec<usize> = (0..d.n).filter(|&v| inside[v]).collect();
    let base = d.induced_arc_count(&inside_verts);
    let mut out = Vec::new();
    for &x in attach {
        for y in d.successors(x).filter(|&y| !inside[y]) {
            let mut path = vec![y];
            let mut on = vec![false; d.n];
            on[y] = true;
            ear_dfs(
                d,
                inside,
                attach,
                &mut path,
                &mut on,
                x,
                base,
                &inside_verts,
                &mut out,
                limit,
            );
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn ear_dfs(
    d: &Digraph,
    inside: &[bool],
    attach: &[usize],
    path: &mut Vec<usize>,
    on: &mut [bool],
    from: usize,
    base: usize,
    inside_verts: &[usize],
    out: &mut Vec<Ear>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let cur = *path.last().unwrap();
    for w in d.successors(cur) {
        if inside[w] {
            if attach.contains(&w) {
                let mut verts = inside_verts.to_vec();
                verts.extend(path.iter());
                if d.induced_arc_count(&verts) == base + path.len() + 1 {
                    out.push(Ear {
                        from,
                        path: path.clone(),
                        to: w,
                    });
                }
            }
        } else if !on[w] {
            on[w] = true;
            path.push(w);
            ear_dfs(d, inside, attach, path, on, from, base, inside_verts, out, limit);
            path.pop();
            on[w] = false;
        }
    }
}

/// Partition of `0..n` into components, each sorted, ordered by least member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Components {
    pub parts: Vec<Vec<usize>>,
}

impl Components {
    pub fn normalized(mut parts: Vec<Vec<usize>>) -> Self {
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.retain(|p| !p.is_empty());
        parts.sort_by_key(|p| p[0]);
        Components { parts }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Component index of every vertex.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (c, p) in self.parts.iter().enumerate() {
            for &v in p {
                out[v] = c;
            }
        }
        out
    }
}

/// Strongly connected components of D(A).
pub fn irreducible_components(a: &SignPattern) -> Components {
    Components {
        parts: digraph_of(a).sccs(),
    }
}

pub fn is_irreducible(a: &SignPattern) -> bool {
    is_strongly_connected(&digraph_of(a))
}

fn every_row_and_column_has_plus(a: &SignPattern) -> bool {
    let n = a.order();
    (0..n).all(|i| (0..n).any(|j| a.get(i, j) == Sign::Plus))
        && (0..n).all(|j| (0..n).any(|i| a.get(i, j) == Sign::Plus))
}

pub fn is_ap_irreducible(a: &SignPattern) -> bool {
    is_irreducible(a) && every_row_and_column_has_plus(a) && is_irreducible(&b_matrix(a))
}

pub fn is_minimally_ap_irreducible(a: &SignPattern) -> bool {
    if !is_ap_irreducible(a) {
        return false;
    }
    let mut b = a.clone();
    for (i, j) in a.nonzeros() {
        b.set(i, j, Sign::Zero);
        let still = is_ap_irreducible(&b);
        b.set(i, j, a.get(i, j));
        if still {
            return false;
        }
    }
    true
}

/// A + entry whose ends lie in different components of A₊, if any.
pub fn cross_component_plus(a: &SignPattern) -> Option<(usize, usize)> {
    let comps = irreducible_components(&positive_part(a));
    let lab = comps.labels(a.order());
    a.nonzeros()
        .find(|&(i, j)| a.get(i, j) == Sign::Plus && lab[i] != lab[j])
}

const BACKTRACK_BUDGET: usize = 200_000;

/// A minimally AP-irreducible subpattern with the same components of its
/// positive part: greedy row-major deletion, then a bounded backtracking search.
pub fn minimal_ap_subpattern(a: &SignPattern) -> Result<SignPattern, StructureError> {
    if !is_ap_irreducible(a) {
        return Err(StructureError::NotApIrreducible);
    }
    let target = irreducible_components(&positive_part(a));
    let keeps = |x: &SignPattern| is_ap_irreducible(x) && irreducible_components(&positive_part(x)) == target;
    let mut x = a.clone();
    loop {
        let mut changed = false;
        let nz: Vec<_> = x.nonzeros().collect();
        for (i, j) in nz {
            let cand = x.with_entry(i, j, Sign::Zero);
            if keeps(&cand) {
                x = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if is_minimally_ap_irreducible(&x) {
        return Ok(x);
    }
    // Greedy got stuck at a pattern that is not minimal; search other deletion orders.
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut stack = vec![a.clone()];
    while let Some(x) = stack.pop() {
        if seen.len() >= BACKTRACK_BUDGET {
            break;
        }
        if !seen.insert(x.encoding()) {
            continue;
        }
        if is_minimally_ap_irreducible(&x) {
            return Ok(x);
        }
        let nz: Vec<_> = x.nonzeros().collect();
        for &(i, j) in nz.iter().rev() {
            let cand = x.with_entry(i, j, Sign::Zero);
            if keeps(&cand) && !seen.contains(&cand.encoding()) {
                stack.push(cand);
            }
        }
    }
    Err(StructureError::ExtractionFailed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcColoring {
    pub blue: BTreeSet<(usize, usize)>,
    pub red: BTreeSet<(usize, usize)>,
}

/// Blue: both ends in one component; red otherwise.
pub fn color_arcs(x: &SignPattern, parts: &Components) -> Result<ArcColoring, StructureError> {
    let expected = irreducible_components(&positive_part(x));
    if Components::normalized(parts.parts.clone()) != expected {
        return Err(StructureError::ComponentMismatch);
    }
    let lab = parts.labels(x.order());
    let mut col = ArcColoring {
        blue: BTreeSet::new(),
        red: BTreeSet::new(),
    };
    for (i, j) in x.nonzeros() {
        if lab[i] == lab[j] {
            col.blue.insert((i, j));
        } else {
            col.red.insert((i, j));
        }
    }
    Ok(col)
}

/// D₀: one vertex per component, an arc for every red arc between components.
pub fn quotient_digraph(coloring: &ArcColoring, parts: &Components) -> Digraph {
    let n = parts
        .parts
        .iter()
        .map(|p| p.iter().max().map_or(0, |m| m + 1))
        .max()
        .unwrap_or(0);
    let lab = parts.labels(n);
    let mut d = Digraph::new(parts.len());
    for &(p, q) in &coloring.red {
        if lab[p] != lab[q] {
            d.add_arc(lab[p], lab[q]);
        }
    }
    d
}
