//! Stallings automata of finitely generated subgroups of `F_n`.
//!
//! Every public constructor folds, trims to the core and renumbers vertices
//! in canonical BFS order from the basepoint (labels visited in the order
//! `a < A < b < B < ...`). The basepoint is always vertex 0, so two automata
//! represent the same subgroup exactly when they compare equal.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeword::{Letter, Word};

/// Default cap on the number of subgroups produced by
/// [`Automaton::intermediate_subgroups`].
pub const DEFAULT_LATTICE_CAP: usize = 200_000;

/// A folded, core, canonically numbered subgroup graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    rank: usize,
    /// `fwd[v][a]`: target of the `a`-edge leaving `v`.
    fwd: Vec<Vec<Option<usize>>>,
    /// `bwd[v][a]`: source of the `a`-edge entering `v`.
    bwd: Vec<Vec<Option<usize>>>,
}

/// Index of a subgroup in `F_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl Index {
    pub fn is_finite(self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

/// Transition permutations of a complete automaton: the action of `F_n` on
/// the cosets of the subgroup, realizing `F_n / Core(H)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    pub degree: usize,
    /// `perms[a][v]` is the coset reached from `v` by reading generator `a`.
    pub perms: Vec<Vec<usize>>,
}

/// Union-find folding of labelled graphs. Slot `2a` holds the `a`-successor,
/// slot `2a + 1` the `a`-predecessor; stored targets may be stale and are
/// resolved through `find`.
struct Folder {
    rank: usize,
    parent: Vec<usize>,
    size: Vec<usize>,
    slots: Vec<Vec<Option<usize>>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new(rank: usize) -> Self {
        Folder { rank, parent: Vec::new(), size: Vec::new(), slots: Vec::new(), pending: Vec::new() }
    }

    fn add_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.size.push(1);
        self.slots.push(vec![None; 2 * self.rank]);
        v
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn attach(&mut self, u: usize, slot: usize, v: usize) {
        let u = self.find(u);
        match self.slots[u][slot] {
            Some(w) => self.pending.push((w, v)),
            None => self.slots[u][slot] = Some(v),
        }
    }

    fn add_edge(&mut self, u: usize, gen: usize, v: usize) {
        self.attach(u, 2 * gen, v);
        self.attach(v, 2 * gen + 1, u);
        self.process();
    }

    fn merge(&mut self, x: usize, y: usize) {
        self.pending.push((x, y));
        self.process();
    }

    fn process(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            let (x, y) = (self.find(x), self.find(y));
            if x == y {
                continue;
            }
            let (keep, gone) = if self.size[x] >= self.size[y] { (x, y) } else { (y, x) };
            self.parent[gone] = keep;
            self.size[keep] += self.size[gone];
            let moved = std::mem::take(&mut self.slots[gone]);
            for (slot, target) in moved.into_iter().enumerate() {
                if let Some(t) = target {
                    match self.slots[keep][slot] {
                        Some(t2) => self.pending.push((t, t2)),
                        None => self.slots[keep][slot] = Some(t),
                    }
                }
            }
        }
    }

    /// Adds the petal spelling `word` as a closed path at `base`.
    fn add_petal(&mut self, base: usize, word: &[Letter]) {
        if word.is_empty() {
            return;
        }
        let mut cur = base;
        for (i, &l) in word.iter().enumerate() {
            let next = if i + 1 == word.len() { base } else { self.add_vertex() };
            if l.is_inverse() {
                self.add_edge(next, l.generator(), cur);
            } else {
                self.add_edge(cur, l.generator(), next);
            }
            cur = next;
        }
    }

    fn finish(mut self, base: usize) -> Automaton {
        let n = self.parent.len();
        let reps: Vec<usize> = (0..n).filter(|&v| self.find(v) == v).collect();
        let id: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut fwd = vec![vec![None; self.rank]; reps.len()];
        for (i, &r) in reps.iter().enumerate() {
            for a in 0..self.rank {
                if let Some(t) = self.slots[r][2 * a] {
                    let t = self.find(t);
                    fwd[i][a] = Some(id[&t]);
                }
            }
        }
        let base = id[&self.find(base)];
        Automaton::from_raw(self.rank, fwd, base)
    }
}

impl Automaton {
    /// Builds an automaton from a deterministic successor table, checking
    /// co-determinism, then trims and canonicalizes it.
    fn from_raw(rank: usize, fwd: Vec<Vec<Option<usize>>>, base: usize) -> Automaton {
        let n = fwd.len();
        let mut bwd = vec![vec![None; rank]; n];
        for (v, row) in fwd.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(t) = *t {
                    debug_assert!(bwd[t][a].is_none(), "automaton is not folded");
                    bwd[t][a] = Some(v);
                }
            }
        }
        let mut aut = Automaton { rank, fwd, bwd };
        aut.trim(base);
        aut.canonicalize(base)
    }

    /// Repeatedly deletes non-base vertices of degree at most one.
    fn trim(&mut self, base: usize) {
        let n = self.fwd.len();
        let degree = |aut: &Automaton, v: usize| {
            aut.fwd[v].iter().filter(|t| t.is_some()).count()
                + aut.bwd[v].iter().filter(|t| t.is_some()).count()
        };
        let mut stack: Vec<usize> = (0..n).filter(|&v| v != base && degree(self, v) <= 1).collect();
        while let Some(v) = stack.pop() {
            if v == base || degree(self, v) > 1 {
                continue;
            }
            for a in 0..self.rank {
                if let Some(t) = self.fwd[v][a].take() {
                    self.bwd[t][a] = None;
                    if t != base && degree(self, t) <= 1 {
                        stack.push(t);
                    }
                }
                if let Some(s) = self.bwd[v][a].take() {
                    self.fwd[s][a] = None;
                    if s != base && degree(self, s) <= 1 {
                        stack.push(s);
                    }
                }
            }
        }
    }

    /// Renumbers the component of `base` in BFS order, dropping the rest.
    fn canonicalize(&self, base: usize) -> Automaton {
        let n = self.fwd.len();
        let mut id = vec![usize::MAX; n];
        let mut order = vec![base];
        id[base] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for a in 0..self.rank {
                for t in [self.fwd[v][a], self.bwd[v][a]].into_iter().flatten() {
                    if id[t] == usize::MAX {
                        id[t] = order.len();
                        order.push(t);
                    }
                }
            }
        }
        let remap = |row: &Vec<Option<usize>>| row.iter().map(|t| t.map(|t| id[t])).collect();
        Automaton {
            rank: self.rank,
            fwd: order.iter().map(|&v| remap(&self.fwd[v])).collect(),
            bwd: order.iter().map(|&v| remap(&self.bwd[v])).collect(),
        }
    }

    /// Stallings automaton of the subgroup generated by `generators`.
    pub fn build(generators: &[Word], rank: usize) -> Result<Automaton> {
        Word::identity(rank)?;
        let mut folder = Folder::new(rank);
        let base = folder.add_vertex();
        for g in generators {
            if g.rank() != rank {
                return Err(Error::RankMismatch { left: rank, right: g.rank() });
            }
            folder.add_petal(base, g.letters());
        }
        Ok(folder.finish(base))
    }

    /// Parses each string as a word of rank `rank` and builds the automaton.
    pub fn from_strs(generators: &[&str], rank: usize) -> Result<Automaton> {
        let words = generators.iter().map(|s| Word::parse(s, rank)).collect::<Result<Vec<_>>>()?;
        Automaton::build(&words, rank)
    }

    /// The whole group `F_n` (one vertex with a loop per generator).
    pub fn whole_group(rank: usize) -> Result<Automaton> {
        let gens = (0..rank).map(|i| Word::generator(rank, i)).collect::<Result<Vec<_>>>()?;
        Automaton::build(&gens, rank)
    }

    /// Folds an arbitrary labelled graph `(src, generator, dst)`.
    pub fn from_edges(rank: usize, vertices: usize, base: usize, edges: &[(usize, usize, usize)]) -> Result<Automaton> {
        Word::identity(rank)?;
        if base >= vertices {
            return Err(Error::invalid(format!("basepoint {base} out of range")));
        }
        let mut folder = Folder::new(rank);
        for _ in 0..vertices {
            folder.add_vertex();
        }
        for &(s, a, t) in edges {
            if s >= vertices || t >= vertices || a >= rank {
                return Err(Error::invalid(format!("edge ({s}, {a}, {t}) out of range")));
            }
            folder.add_edge(s, a, t);
        }
        Ok(folder.finish(base))
    }

    /// Schreier graph of a permutation action, `perms[a][v]` being the image
    /// of point `v` under generator `a`; the orbit of `base` is kept.
    pub fn from_action(perms: &[Vec<usize>], base: usize) -> Result<Automaton> {
        let rank = perms.len();
        let degree = perms.first().map(|p| p.len()).unwrap_or(1);
        for p in perms {
            let mut seen = vec![false; degree];
            if p.len() != degree || p.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::invalid("generator images are not permutations of one point set"));
            }
        }
        let edges: Vec<(usize, usize, usize)> = perms
            .iter()
            .enumerate()
            .flat_map(|(a, p)| p.iter().enumerate().map(move |(v, &t)| (v, a, t)))
            .collect();
        Automaton::from_edges(rank, degree, base, &edges)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.fwd.len()
    }

    pub fn base(&self) -> usize {
        0
    }

    /// Number of positively labelled edges.
    pub fn num_edges(&self) -> usize {
        self.fwd.iter().map(|row| row.iter().filter(|t| t.is_some()).count()).sum()
    }

    pub fn successor(&self, v: usize, letter: Letter) -> Option<usize> {
        if letter.is_inverse() {
            self.bwd[v][letter.generator()]
        } else {
            self.fwd[v][letter.generator()]
        }
    }

    /// Edges `(src, generator, dst)` in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (v, row) in self.fwd.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(t) = *t {
                    out.push((v, a, t));
                }
            }
        }
        out
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if self.rank != rank {
            return Err(Error::RankMismatch { left: self.rank, right: rank });
        }
        Ok(())
    }

    /// Vertex reached by reading `w` from `start`, if the path exists.
    pub fn read(&self, start: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(start, |v, &l| self.successor(v, l))
    }

    pub fn contains(&self, w: &Word) -> Result<bool> {
        self.check_rank(w.rank())?;
        Ok(self.read(0, w) == Some(0))
    }

    pub fn is_complete(&self) -> bool {
        self.fwd.iter().all(|row| row.iter().all(|t| t.is_some()))
    }

    /// Finite exactly when every vertex has an outgoing edge for each
    /// generator, and then the index is the vertex count.
    pub fn index(&self) -> Index {
        if self.is_complete() {
            Index::Finite(self.num_vertices())
        } else {
            Index::Infinite
        }
    }

    /// Words labelling the BFS spanning-tree path from the basepoint to each
    /// vertex.
    pub fn tree_paths(&self) -> Vec<Word> {
        let n = self.num_vertices();
        let mut path: Vec<Option<Vec<Letter>>> = vec![None; n];
        path[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for slot in 0..2 * self.rank {
                let l = Letter::from_slot(slot);
                if let Some(t) = self.successor(v, l) {
                    if path[t].is_none() {
                        let mut p = path[v].clone().expect("visited");
                        p.push(l);
                        path[t] = Some(p);
                        queue.push_back(t);
                    }
                }
            }
        }
        path.into_iter()
            .map(|p| Word::from_letters(&p.expect("connected automaton"), self.rank).expect("in range"))
            .collect()
    }

    /// Free basis read off a spanning tree: one element per non-tree edge.
    pub fn basis(&self) -> Vec<Word> {
        let paths = self.tree_paths();
        let mut tree_edges = HashSet::new();
        for (v, p) in paths.iter().enumerate() {
            if let Some(&last) = p.letters().last() {
                let prev = self.successor(v, last.inverse()).expect("tree edge");
                if last.is_inverse() {
                    tree_edges.insert((v, last.generator(), prev));
                } else {
                    tree_edges.insert((prev, last.generator(), v));
                }
            }
        }
        self.edges()
            .into_iter()
            .filter(|e| !tree_edges.contains(e))
            .map(|(s, a, t)| {
                let g = Word::generator(self.rank, a).expect("in range");
                paths[s].mul(&g).and_then(|x| x.mul(&paths[t].inverse())).expect("same rank")
            })
            .collect()
    }

    pub fn index_and_basis(&self) -> (Index, Vec<Word>) {
        (self.index(), self.basis())
    }

    /// Automaton of the subgroup generated by both subgroups.
    pub fn join(&self, other: &Automaton) -> Result<Automaton> {
        self.check_rank(other.rank)?;
        let mut folder = Folder::new(self.rank);
        let offset = self.num_vertices();
        for _ in 0..offset + other.num_vertices() {
            folder.add_vertex();
        }
        for (s, a, t) in self.edges() {
            folder.add_edge(s, a, t);
        }
        for (s, a, t) in other.edges() {
            folder.add_edge(s + offset, a, t + offset);
        }
        folder.merge(0, offset);
        Ok(folder.finish(0))
    }

    /// Join with the cyclic subgroup generated by `w`.
    pub fn join_word(&self, w: &Word) -> Result<Automaton> {
        self.check_rank(w.rank())?;
        let mut folder = Folder::new(self.rank);
        for _ in 0..self.num_vertices() {
            folder.add_vertex();
        }
        for (s, a, t) in self.edges() {
            folder.add_edge(s, a, t);
        }
        folder.add_petal(0, w.letters());
        Ok(folder.finish(0))
    }

    /// Core of the product automaton at the pair of basepoints.
    pub fn intersect(&self, other: &Automaton) -> Result<Automaton> {
        self.check_rank(other.rank)?;
        let mut id: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(0usize, 0usize)];
        id.insert((0, 0), 0);
        let mut fwd: Vec<Vec<Option<usize>>> = Vec::new();
        let mut head = 0;
        while head < pairs.len() {
            let (x, y) = pairs[head];
            let mut row = vec![None; self.rank];
            for slot in 0..2 * self.rank {
                let l = Letter::from_slot(slot);
                if let (Some(x2), Some(y2)) = (self.successor(x, l), other.successor(y, l)) {
                    let next = *id.entry((x2, y2)).or_insert_with(|| {
                        pairs.push((x2, y2));
                        pairs.len() - 1
                    });
                    if !l.is_inverse() {
                        row[l.generator()] = Some(next);
                    }
                }
            }
            fwd.push(row);
            head += 1;
        }
        Ok(Automaton::from_raw(self.rank, fwd, 0))
    }

    /// True when every generator of `other`'s basis lies in `self`.
    pub fn contains_subgroup(&self, other: &Automaton) -> Result<bool> {
        self.check_rank(other.rank)?;
        for h in other.basis() {
            if !self.contains(&h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn coset_action(&self) -> Result<CosetAction> {
        if !self.is_complete() {
            return Err(Error::NotFiniteIndex);
        }
        let perms = (0..self.rank)
            .map(|a| self.fwd.iter().map(|row| row[a].expect("complete")).collect())
            .collect();
        Ok(CosetAction { degree: self.num_vertices(), perms })
    }

    /// All subgroups `K` with `H <= K <= F_n` for a finite-index `H`.
    pub fn intermediate_subgroups(&self, cap: usize) -> Result<Vec<Automaton>> {
        if !self.is_complete() {
            return Err(Error::NotFiniteIndex);
        }
        // each overgroup is generated by H and the coset representatives it
        // contains, so the join-closure of the atoms H v <rep> is everything
        let atoms: Vec<Automaton> = self
            .tree_paths()
            .iter()
            .skip(1)
            .map(|rep| self.join_word(rep))
            .collect::<Result<_>>()?;
        let mut seen: HashSet<Automaton> = HashSet::new();
        let mut out = vec![self.clone()];
        seen.insert(self.clone());
        let mut head = 0;
        while head < out.len() {
            let cur = out[head].clone();
            head += 1;
            for atom in &atoms {
                let next = cur.join(atom)?;
                if seen.insert(next.clone()) {
                    if out.len() >= cap {
                        return Err(Error::cap("intermediate subgroup count", cap as u64));
                    }
                    out.push(next);
                }
            }
        }
        out.sort_by(|x, y| y.num_vertices().cmp(&x.num_vertices()).then_with(|| x.edges().cmp(&y.edges())));
        Ok(out)
    }

    /// Graphviz rendering; the basepoint is double-circled.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph stallings {\n  rankdir=LR;\n");
        for v in 0..self.num_vertices() {
            let shape = if v == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {v} [shape={shape}];");
        }
        for (src, a, dst) in self.edges() {
            let _ = writeln!(s, "  {src} -> {dst} [label=\"{}\"];", Letter::gen(a).to_char());
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            rank: self.rank,
            vertices: self.num_vertices(),
            base: 0,
            edges: self
                .edges()
                .into_iter()
                .map(|(s, a, t)| (s, Letter::gen(a).to_char().to_string(), t))
                .collect(),
        }
    }

    pub fn from_json(json: &AutomatonJson) -> Result<Automaton> {
        let edges = json
            .edges
            .iter()
            .map(|(s, label, t)| {
                let mut chars = label.chars();
                let l = match (chars.next(), chars.next()) {
                    (Some(c), None) => Letter::from_char(c),
                    _ => None,
                }
                .ok_or_else(|| Error::Parse(format!("bad edge label {label:?}")))?;
                Ok(if l.is_inverse() { (*t, l.generator(), *s) } else { (*s, l.generator(), *t) })
            })
            .collect::<Result<Vec<_>>>()?;
        Automaton::from_edges(json.rank, json.vertices, json.base, &edges)
    }
}

/// Wire format: `{rank, vertices, base, edges: [[src, label, dst], ...]}`;
/// labels are generator letters, an uppercase label reverses the edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub rank: usize,
    pub vertices: usize,
    pub base: usize,
    pub edges: Vec<(usize, String, usize)>,
}
