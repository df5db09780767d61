//! Folded subgroup graphs (Stallings graphs) for finitely generated subgroups
//! of free groups, and Schreier coset graphs of kernels of homomorphisms onto
//! finite abelian groups.

use crate::words::{Letter, ReducedWord, WordError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("coset graph would have more than {bound} vertices")]
    CosetBoundExceeded { bound: usize },
    #[error("images live in different finite abelian groups")]
    GroupMismatch,
}

/// Default vertex-count guard for coset graph construction; the index can be
/// as large as |det(L - I)|^r and must fail loudly instead of hanging.
pub const DEFAULT_COSET_BOUND: usize = 1_000_000;

/// A folded core graph. Vertex 0 is the basepoint. For each vertex and each
/// generator there is at most one outgoing and one incoming edge with that
/// label; every non-basepoint vertex has degree >= 2.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    rank: usize,
    // out[v][g] = w  means an edge v --g--> w; inn[w][g] = v is its mirror.
    out: Vec<Vec<Option<usize>>>,
    inn: Vec<Vec<Option<usize>>>,
}

impl SubgroupGraph {
    /// Build the folded core graph of the subgroup generated by `words`.
    pub fn from_basis(words: &[ReducedWord], rank: usize) -> Result<Self, GraphError> {
        for w in words {
            if w.rank() != rank {
                return Err(WordError::RankMismatch(w.rank(), rank).into());
            }
        }
        // Wedge of loops: a fresh path from the basepoint for each word.
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        let mut next_vertex = 1;
        for w in words {
            let mut cur = 0;
            let n = w.len();
            for (pos, &l) in w.letters().iter().enumerate() {
                let dst = if pos + 1 == n { 0 } else { next_vertex };
                if pos + 1 != n {
                    next_vertex += 1;
                }
                if l.positive {
                    edges.push((cur, l.index, dst));
                } else {
                    edges.push((dst, l.index, cur));
                }
                cur = dst;
            }
        }
        Ok(Self::fold(next_vertex, edges, rank))
    }

    /// Fold a multigraph into a deterministic labeled graph, then trim to the
    /// core.
    fn fold(vertex_count: usize, edges: Vec<(usize, usize, usize)>, rank: usize) -> Self {
        // Union-find over vertices.
        let mut parent: Vec<usize> = (0..vertex_count.max(1)).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }

        loop {
            let mut by_src: HashMap<(usize, usize), usize> = HashMap::new();
            let mut by_dst: HashMap<(usize, usize), usize> = HashMap::new();
            let mut merged = false;
            for &(s, g, d) in &edges {
                let s = find(&mut parent, s);
                let d = find(&mut parent, d);
                if let Some(&d0) = by_src.get(&(s, g)) {
                    if d0 != d {
                        let (a, b) = (find(&mut parent, d0), find(&mut parent, d));
                        if a != b {
                            parent[a] = b;
                            merged = true;
                        }
                    }
                } else {
                    by_src.insert((s, g), d);
                }
                if let Some(&s0) = by_dst.get(&(d, g)) {
                    if s0 != s {
                        let (a, b) = (find(&mut parent, s0), find(&mut parent, s));
                        if a != b {
                            parent[a] = b;
                            merged = true;
                        }
                    }
                } else {
                    by_dst.insert((d, g), s);
                }
            }
            if !merged {
                break;
            }
        }

        // Quotient to compact vertex ids, basepoint first.
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let base_root = find(&mut parent, 0);
        ids.insert(base_root, 0);
        let mut dedup: Vec<(usize, usize, usize)> = Vec::new();
        for &(s, g, d) in &edges {
            let s = find(&mut parent, s);
            let d = find(&mut parent, d);
            let next = ids.len();
            let s = *ids.entry(s).or_insert(next);
            let next = ids.len();
            let d = *ids.entry(d).or_insert(next);
            if !dedup.contains(&(s, g, d)) {
                dedup.push((s, g, d));
            }
        }

        let mut out = vec![vec![None; rank]; ids.len().max(1)];
        let mut inn = vec![vec![None; rank]; ids.len().max(1)];
        for (s, g, d) in dedup {
            out[s][g] = Some(d);
            inn[d][g] = Some(s);
        }
        let mut graph = SubgroupGraph { rank, out, inn };
        graph.trim_core();
        graph
    }

    /// Remove non-basepoint vertices of total degree <= 1 until none remain.
    fn trim_core(&mut self) {
        loop {
            let n = self.out.len();
            let mut victim = None;
            for v in 1..n {
                let deg: usize = (0..self.rank)
                    .map(|g| self.out[v][g].is_some() as usize + self.inn[v][g].is_some() as usize)
                    .sum();
                if deg <= 1 {
                    victim = Some(v);
                    break;
                }
            }
            let Some(v) = victim else { break };
            for g in 0..self.rank {
                if let Some(w) = self.out[v][g] {
                    self.inn[w][g] = None;
                }
                if let Some(w) = self.inn[v][g] {
                    self.out[w][g] = None;
                }
            }
            // swap-remove: relabel the last vertex to v
            let last = self.out.len() - 1;
            if v != last {
                self.out.swap(v, last);
                self.inn.swap(v, last);
                for u in 0..last {
                    for g in 0..self.rank {
                        if self.out[u][g] == Some(last) {
                            self.out[u][g] = Some(v);
                        }
                        if self.inn[u][g] == Some(last) {
                            self.inn[u][g] = Some(v);
                        }
                    }
                }
                for g in 0..self.rank {
                    if self.out[v][g] == Some(last) {
                        self.out[v][g] = Some(v);
                    }
                    if self.inn[v][g] == Some(last) {
                        self.inn[v][g] = Some(v);
                    }
                }
            }
            self.out.pop();
            self.inn.pop();
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out
            .iter()
            .map(|slots| slots.iter().filter(|e| e.is_some()).count())
            .sum()
    }

    /// Follow one letter from a vertex, if the edge exists.
    fn step(&self, v: usize, l: Letter) -> Option<usize> {
        if l.positive {
            self.out[v][l.index]
        } else {
            self.inn[v][l.index]
        }
    }

    /// True iff `w` labels a closed path at the basepoint.
    pub fn member(&self, w: &ReducedWord) -> Result<bool, GraphError> {
        if w.rank() != self.rank {
            return Err(WordError::RankMismatch(w.rank(), self.rank).into());
        }
        let mut cur = 0usize;
        for &l in w.letters() {
            match self.step(cur, l) {
                Some(next) => cur = next,
                None => return Ok(false),
            }
        }
        Ok(cur == 0)
    }

    /// Free rank of the subgroup: edges - vertices + 1 for a folded core graph.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Breadth-first spanning tree from the basepoint, edges ordered by
    /// (generator index, sign with positive first). Returns, per vertex, the
    /// path from the basepoint as a word.
    fn spanning_paths(&self) -> Vec<Option<ReducedWord>> {
        let n = self.vertex_count();
        let mut path: Vec<Option<ReducedWord>> = vec![None; n];
        path[0] = Some(ReducedWord::identity(self.rank));
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let base = path[v].clone().expect("visited");
            for g in 0..self.rank {
                for positive in [true, false] {
                    let l = Letter::new(g, positive);
                    if let Some(w) = self.step(v, l) {
                        if path[w].is_none() {
                            let mut letters: Vec<Letter> =
                                base.letters().to_vec();
                            letters.push(l);
                            path[w] =
                                Some(ReducedWord::reduce(letters, self.rank).expect("in range"));
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        path
    }

    /// A free basis of the subgroup: one word per non-tree edge,
    /// `path(src) * edge * path(dst)^-1`.
    pub fn basis(&self) -> Vec<ReducedWord> {
        let paths = self.spanning_paths();
        // Recover which positively-oriented edges are tree edges.
        let mut is_tree = vec![vec![false; self.rank]; self.vertex_count()];
        {
            let mut seen = vec![false; self.vertex_count()];
            seen[0] = true;
            let mut queue = std::collections::VecDeque::from([0usize]);
            while let Some(v) = queue.pop_front() {
                for g in 0..self.rank {
                    for positive in [true, false] {
                        let l = Letter::new(g, positive);
                        if let Some(w) = self.step(v, l) {
                            if !seen[w] {
                                seen[w] = true;
                                if positive {
                                    is_tree[v][g] = true;
                                } else {
                                    is_tree[w][g] = true;
                                }
                                queue.push_back(w);
                            }
                        }
                    }
                }
            }
        }
        let mut basis = Vec::new();
        for v in 0..self.vertex_count() {
            for g in 0..self.rank {
                if let Some(w) = self.out[v][g] {
                    if is_tree[v][g] {
                        continue;
                    }
                    let pv = paths[v].as_ref().expect("core graph is connected");
                    let pw = paths[w].as_ref().expect("core graph is connected");
                    let word = pv
                        .multiply(&ReducedWord::generator(g, self.rank))
                        .and_then(|x| x.multiply(&pw.inverse()))
                        .expect("same rank");
                    basis.push(word);
                }
            }
        }
        basis
    }

    /// Vertex count if the graph is complete (finite index), else `None`.
    pub fn index(&self) -> Option<usize> {
        let complete = (0..self.vertex_count()).all(|v| {
            (0..self.rank).all(|g| self.out[v][g].is_some() && self.inn[v][g].is_some())
        });
        complete.then(|| self.vertex_count())
    }

    /// Debug dump: one `src gen dst` line per edge.
    pub fn dump(&self) -> String {
        let mut lines = Vec::new();
        for v in 0..self.vertex_count() {
            for g in 0..self.rank {
                if let Some(w) = self.out[v][g] {
                    lines.push(format!("{} {} {}", v, g + 1, w));
                }
            }
        }
        lines.join("\n")
    }
}

/// A finite abelian group given by its invariant factors (each >= 2);
/// elements are coordinate tuples reduced mod the factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<BigInt>) -> Self {
        assert!(factors.iter().all(|d| *d > BigInt::one()));
        FiniteAbelianGroup { factors }
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            factors: Vec::new(),
        }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.factors.len()]
    }

    pub fn reduce(&self, coords: &[BigInt]) -> Vec<BigInt> {
        coords
            .iter()
            .zip(&self.factors)
            .map(|(x, d)| x.mod_floor(d))
            .collect()
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((x, y), d)| (x + y).mod_floor(d))
            .collect()
    }

    pub fn neg(&self, a: &[BigInt]) -> Vec<BigInt> {
        a.iter()
            .zip(&self.factors)
            .map(|(x, d)| (-x).mod_floor(d))
            .collect()
    }
}

/// Schreier coset graph of the kernel of the homomorphism `F_r -> A` sending
/// generator `i` to `images[i]`. Vertices are the elements of the subgroup
/// generated by the images (the index equals the image order); the basepoint
/// is 0.
pub fn schreier_kernel_graph(
    rank: usize,
    group: &FiniteAbelianGroup,
    images: &[Vec<BigInt>],
    bound: usize,
) -> Result<SubgroupGraph, GraphError> {
    if images.iter().any(|v| v.len() != group.factors().len()) {
        return Err(GraphError::GroupMismatch);
    }
    let images: Vec<Vec<BigInt>> = images.iter().map(|v| group.reduce(v)).collect();

    // Closure of the image subgroup, breadth-first from 0.
    let mut ids: HashMap<Vec<BigInt>, usize> = HashMap::new();
    let mut elements: Vec<Vec<BigInt>> = vec![group.zero()];
    ids.insert(group.zero(), 0);
    let mut head = 0;
    while head < elements.len() {
        let cur = elements[head].clone();
        head += 1;
        for img in &images {
            let nxt = group.add(&cur, img);
            if !ids.contains_key(&nxt) {
                if elements.len() >= bound {
                    return Err(GraphError::CosetBoundExceeded { bound });
                }
                ids.insert(nxt.clone(), elements.len());
                elements.push(nxt);
            }
        }
    }

    let n = elements.len();
    let mut out = vec![vec![None; rank]; n];
    let mut inn = vec![vec![None; rank]; n];
    for (v, el) in elements.iter().enumerate() {
        for (g, img) in images.iter().enumerate() {
            let w = ids[&group.add(el, img)];
            out[v][g] = Some(w);
            inn[w][g] = Some(v);
        }
    }
    Ok(SubgroupGraph { rank, out, inn })
}
