//! Canonical labeling of vertex-colored graphs.
//!
//! Equitable partition refinement followed by an individualization search
//! tree. The smallest leaf graph (rows of the relabeled adjacency matrix
//! compared lexicographically) is the canonical form. Automorphisms found
//! when two leaves give the same graph prune sibling subtrees by orbit, and
//! the orbits along the first path give the group order.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// An undirected simple graph with an ordered vertex coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

impl ColoredGraph {
    /// `colors[v]` orders the color classes; edges are unordered pairs.
    pub fn new(colors: Vec<u32>, edges: &[(u32, u32)]) -> Result<Self> {
        let n = colors.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == b || a as usize >= n || b as usize >= n {
                return Err(Error::InvalidParameter(format!("bad edge ({a}, {b}) for {n} vertices")));
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            let len = list.len();
            list.dedup();
            if list.len() != len {
                return Err(Error::InvalidParameter("repeated edge".into()));
            }
        }
        Ok(ColoredGraph { colors, adj })
    }

    pub fn order(&self) -> usize {
        self.colors.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// `(color, class size)` in ascending color order.
    pub fn color_classes(&self) -> Vec<(u32, u32)> {
        let mut c = self.colors.clone();
        c.sort_unstable();
        let mut classes: Vec<(u32, u32)> = Vec::new();
        for x in c {
            match classes.last_mut() {
                Some((y, size)) if *y == x => *size += 1,
                _ => classes.push((x, 1)),
            }
        }
        classes
    }

    /// True iff `perm` (vertex -> vertex) preserves colors and adjacency.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        (0..self.order()).all(|v| {
            let pv = perm[v] as usize;
            self.colors[v] == self.colors[pv] && {
                let mut img: Vec<u32> = self.adj[v].iter().map(|&u| perm[u as usize]).collect();
                img.sort_unstable();
                img == self.adj[pv]
            }
        })
    }
}

/// Ordered partition of the vertex set; cells are identified by their start index.
#[derive(Clone)]
struct Partition {
    elems: Vec<u32>,
    pos: Vec<u32>,
    cell_of: Vec<u32>,
    end: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn from_colors(colors: &[u32]) -> Self {
        let n = colors.len();
        let mut elems: Vec<u32> = (0..n as u32).collect();
        elems.sort_by_key(|&v| (colors[v as usize], v));
        let mut p = Partition { elems, pos: vec![0; n], cell_of: vec![0; n], end: vec![0; n], cells: 0 };
        let mut start = 0;
        for i in 0..n {
            if i + 1 == n || colors[p.elems[i] as usize] != colors[p.elems[i + 1] as usize] {
                for j in start..=i {
                    p.cell_of[p.elems[j] as usize] = start as u32;
                }
                p.end[start] = i as u32 + 1;
                p.cells += 1;
                start = i + 1;
            }
        }
        for (i, &v) in p.elems.iter().enumerate() {
            p.pos[v as usize] = i as u32;
        }
        p
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.elems.len()
    }

    fn cell_starts(&self) -> Vec<u32> {
        let mut s = Vec::with_capacity(self.cells);
        let mut i = 0;
        while i < self.elems.len() {
            s.push(i as u32);
            i = self.end[i] as usize;
        }
        s
    }

    /// The first non-singleton cell among those joined non-trivially to the
    /// most non-singleton cells.
    fn target_cell(&self, g: &ColoredGraph, count: &mut [u32]) -> Option<(usize, usize)> {
        let cells: Vec<(usize, usize)> = self
            .cell_starts()
            .into_iter()
            .map(|s| (s as usize, self.end[s as usize] as usize))
            .filter(|&(s, e)| e - s > 1)
            .collect();
        if cells.len() <= 1 {
            return cells.first().copied();
        }
        let mut best: Option<((usize, usize), usize)> = None;
        for &(s, e) in &cells {
            for &u in &g.adj[self.elems[s] as usize] {
                count[self.cell_of[u as usize] as usize] += 1;
            }
            let joins = cells
                .iter()
                .filter(|&&(cs, ce)| count[cs] > 0 && (count[cs] as usize) < ce - cs)
                .count();
            for &u in &g.adj[self.elems[s] as usize] {
                count[self.cell_of[u as usize] as usize] = 0;
            }
            if best.is_none_or(|(_, j)| joins > j) {
                best = Some(((s, e), joins));
            }
        }
        best.map(|(c, _)| c)
    }

    /// Moves `v` to the front of its cell as a new singleton; returns the singleton's start.
    fn individualize(&mut self, v: u32) -> u32 {
        let s = self.cell_of[v as usize] as usize;
        let e = self.end[s];
        let p = self.pos[v as usize] as usize;
        let front = self.elems[s];
        self.elems.swap(s, p);
        self.pos[front as usize] = p as u32;
        self.pos[v as usize] = s as u32;
        self.end[s] = s as u32 + 1;
        self.end[s + 1] = e;
        for i in s + 1..e as usize {
            self.cell_of[self.elems[i] as usize] = s as u32 + 1;
        }
        self.cells += 1;
        s as u32
    }

    /// Refines to the coarsest equitable partition finer than the current
    /// one, processing splitters in a labeling-independent order. Returns a
    /// hash of the splits performed, which is invariant under relabeling.
    fn refine(&mut self, g: &ColoredGraph, initial: &[u32], scratch: &mut Scratch) -> u64 {
        let mut trace = Trace::default();
        let mut queue: VecDeque<u32> = initial.iter().copied().collect();
        let in_queue = &mut scratch.in_queue;
        in_queue.iter_mut().for_each(|x| *x = false);
        for &s in initial {
            in_queue[s as usize] = true;
        }
        let count = &mut scratch.count;
        while let Some(ws) = queue.pop_front() {
            if self.is_discrete() {
                break;
            }
            in_queue[ws as usize] = false;
            let we = self.end[ws as usize] as usize;
            let mut touched: Vec<u32> = Vec::new();
            for idx in ws as usize..we {
                for &u in &g.adj[self.elems[idx] as usize] {
                    if count[u as usize] == 0 {
                        touched.push(u);
                    }
                    count[u as usize] += 1;
                }
            }
            let mut cells: Vec<u32> = touched
                .iter()
                .map(|&u| self.cell_of[u as usize])
                .filter(|&c| self.end[c as usize] - c > 1)
                .collect();
            cells.sort_unstable();
            cells.dedup();
            for c in cells {
                let (s, e) = (c as usize, self.end[c as usize] as usize);
                let seg = &mut self.elems[s..e];
                let first = count[seg[0] as usize];
                if seg.iter().all(|&v| count[v as usize] == first) {
                    continue;
                }
                seg.sort_by_key(|&v| count[v as usize]);
                trace.mix(c as u64);
                for i in s..e {
                    self.pos[self.elems[i] as usize] = i as u32;
                }
                // split into runs of equal count
                let mut pieces: Vec<(usize, usize)> = Vec::new();
                let mut ps = s;
                for i in s + 1..=e {
                    if i == e || count[self.elems[i] as usize] != count[self.elems[ps] as usize] {
                        pieces.push((ps, i));
                        ps = i;
                    }
                }
                for &(ps, pe) in &pieces {
                    trace.mix(((pe - ps) as u64) << 32 | count[self.elems[ps] as usize] as u64);
                    self.end[ps] = pe as u32;
                    for i in ps..pe {
                        self.cell_of[self.elems[i] as usize] = ps as u32;
                    }
                }
                self.cells += pieces.len() - 1;
                if in_queue[s] {
                    for &(ps, _) in &pieces[1..] {
                        in_queue[ps] = true;
                        queue.push_back(ps as u32);
                    }
                } else {
                    let largest = pieces
                        .iter()
                        .enumerate()
                        .max_by(|a, b| (a.1 .1 - a.1 .0).cmp(&(b.1 .1 - b.1 .0)).then(b.0.cmp(&a.0)))
                        .map(|(i, _)| i)
                        .unwrap();
                    for (i, &(ps, _)) in pieces.iter().enumerate() {
                        if i != largest {
                            in_queue[ps] = true;
                            queue.push_back(ps as u32);
                        }
                    }
                }
            }
            for &u in &touched {
                count[u as usize] = 0;
            }
        }
        debug_assert_eq!(self.cell_starts().len(), self.cells);
        trace.mix(self.cells as u64);
        trace.0
    }
}

#[derive(Default)]
struct Trace(u64);

impl Trace {
    fn mix(&mut self, x: u64) {
        self.0 = (self.0 ^ x).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(29) ^ 0x9e37_79b9_7f4a_7c15;
    }
}

struct Scratch {
    in_queue: Vec<bool>,
    count: Vec<u32>,
}

struct Leaf {
    lab: Vec<u32>,
    traces: Vec<u64>,
    rows: Vec<u64>,
    path: Vec<u32>,
}

impl Leaf {
    /// Leaves are ordered by refinement traces, then by graph.
    fn cmp_key(&self, traces: &[u64], rows: &[u64]) -> std::cmp::Ordering {
        traces.cmp(&self.traces).then_with(|| rows.cmp(&self.rows))
    }
}

/// Result of canonical labeling.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<u32>,
    /// Rows of the relabeled adjacency matrix, `words` u64s per row.
    pub rows: Vec<u64>,
    pub words: usize,
    /// Automorphisms discovered (as vertex maps); they generate the group.
    pub generators: Vec<Vec<u32>>,
    pub group_order: u128,
    /// Search tree nodes visited.
    pub nodes: usize,
}

impl CanonicalForm {
    /// Upper triangle of the canonical adjacency matrix, bit-packed row by row.
    pub fn upper_triangle_bytes(&self) -> Vec<u8> {
        let n = self.labeling.len();
        let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                bits.push(self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1);
            }
        }
        bits.chunks(8).map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &x)| acc | (x as u8) << i)).collect()
    }
}

struct Search<'g> {
    g: &'g ColoredGraph,
    words: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<u32>>,
    scratch: Scratch,
    nodes: usize,
}

impl<'g> Search<'g> {
    fn leaf_rows(&self, p: &Partition) -> Vec<u64> {
        let n = self.g.order();
        let mut rows = vec![0u64; n * self.words];
        for (a, &v) in p.elems.iter().enumerate() {
            for &u in &self.g.adj[v as usize] {
                let b = p.pos[u as usize] as usize;
                rows[a * self.words + b / 64] |= 1 << (b % 64);
            }
        }
        rows
    }

    fn record_automorphism(&mut self, from: &[u32], to: &[u32]) {
        let mut perm = vec![0u32; from.len()];
        for (a, &v) in from.iter().enumerate() {
            perm[v as usize] = to[a];
        }
        if perm.iter().enumerate().all(|(i, &x)| i as u32 == x) {
            return;
        }
        debug_assert!(self.g.is_automorphism(&perm));
        self.generators.push(perm);
    }

    /// Union-find orbits under the known generators fixing `path` pointwise.
    fn orbits(&self, path: &[u32]) -> Vec<u32> {
        let n = self.g.order();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for gen in &self.generators {
            if path.iter().any(|&v| gen[v as usize] != v) {
                continue;
            }
            for (v, &w) in gen.iter().enumerate() {
                let (a, b) = (find(&mut parent, v as u32), find(&mut parent, w));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        (0..n as u32).map(|v| find(&mut parent, v)).collect()
    }

    /// Returns `Some(level)` to abandon the search back up to the node at depth `level`.
    fn search(&mut self, p: Partition, path: &mut Vec<u32>, traces: &mut Vec<u64>) -> Option<usize> {
        self.nodes += 1;
        let depth = path.len();
        if let (Some(first), Some(best)) = (&self.first, &self.best) {
            // only subtrees that may hold a better leaf or an image of the first leaf matter
            let on_first = first.traces.get(..depth) == Some(traces.as_slice());
            let vs_best = traces.as_slice().cmp(&best.traces[..depth.min(best.traces.len())]);
            if !on_first && vs_best == std::cmp::Ordering::Greater {
                return None;
            }
        }
        let Some((s, e)) = p.target_cell(self.g, &mut self.scratch.count) else {
            return self.leaf(p, path, traces);
        };
        let mut children: Vec<u32> = p.elems[s..e].to_vec();
        children.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        let mut gens_seen = usize::MAX;
        let mut orbit = Vec::new();
        for w in children {
            if !explored.is_empty() {
                if gens_seen != self.generators.len() {
                    orbit = self.orbits(path);
                    gens_seen = self.generators.len();
                }
                if explored.iter().any(|&x| orbit[x as usize] == orbit[w as usize]) {
                    continue;
                }
            }
            let mut child = p.clone();
            let single = child.individualize(w);
            traces.push(child.refine(self.g, &[single], &mut self.scratch));
            path.push(w);
            let jump = self.search(child, path, traces);
            path.pop();
            traces.pop();
            explored.push(w);
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, p: Partition, path: &[u32], traces: &[u64]) -> Option<usize> {
        let rows = self.leaf_rows(&p);
        let Some(first) = &self.first else {
            let leaf = Leaf { lab: p.elems.clone(), traces: traces.to_vec(), rows: rows.clone(), path: path.to_vec() };
            self.first = Some(leaf);
            self.best = Some(Leaf { lab: p.elems, traces: traces.to_vec(), rows, path: path.to_vec() });
            return None;
        };
        if first.cmp_key(traces, &rows).is_eq() {
            let from = first.lab.clone();
            let level = common_prefix(&first.path, path);
            self.record_automorphism(&from, &p.elems);
            return Some(level);
        }
        let best = self.best.as_ref().unwrap();
        match best.cmp_key(traces, &rows) {
            std::cmp::Ordering::Less => {
                self.best = Some(Leaf { lab: p.elems, traces: traces.to_vec(), rows, path: path.to_vec() });
                None
            }
            std::cmp::Ordering::Equal => {
                let from = best.lab.clone();
                let level = common_prefix(&best.path, path);
                self.record_automorphism(&from, &p.elems);
                Some(level)
            }
            std::cmp::Ordering::Greater => None,
        }
    }
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Canonical form and automorphism group order of `g`.
pub fn canonical_form(g: &ColoredGraph) -> Result<CanonicalForm> {
    let n = g.order();
    let words = n.div_ceil(64).max(1);
    let mut search = Search {
        g,
        words,
        first: None,
        best: None,
        generators: Vec::new(),
        scratch: Scratch { in_queue: vec![false; n], count: vec![0; n] },
        nodes: 0,
    };
    let mut root = Partition::from_colors(&g.colors);
    let starts = root.cell_starts();
    root.refine(g, &starts, &mut search.scratch);
    let mut path = Vec::new();
    search.search(root, &mut path, &mut Vec::new());

    let first = search.first.take().expect("search reaches a leaf");
    let mut order: u128 = 1;
    for i in 0..first.path.len() {
        let orbit = search.orbits(&first.path[..i]);
        let target = orbit[first.path[i] as usize];
        let size = orbit.iter().filter(|&&o| o == target).count() as u128;
        order = order.checked_mul(size).ok_or(Error::GroupOrderOverflow)?;
    }
    let best = search.best.take().unwrap();
    let mut labeling = vec![0u32; n];
    for (a, &v) in best.lab.iter().enumerate() {
        labeling[v as usize] = a as u32;
    }
    Ok(CanonicalForm { labeling, rows: best.rows, words, generators: search.generators, group_order: order, nodes: search.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> ColoredGraph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ColoredGraph::new(vec![0; n as usize], &edges).unwrap()
    }

    fn relabel(g: &ColoredGraph, perm: &[u32]) -> ColoredGraph {
        let mut colors = vec![0; g.order()];
        let mut edges = Vec::new();
        for v in 0..g.order() {
            colors[perm[v] as usize] = g.colors[v];
            for &u in &g.adj[v] {
                if (v as u32) < u {
                    edges.push((perm[v], perm[u as usize]));
                }
            }
        }
        ColoredGraph::new(colors, &edges).unwrap()
    }

    #[test]
    fn cycle_group_orders() {
        for n in 3..9 {
            assert_eq!(canonical_form(&cycle(n)).unwrap().group_order, 2 * n as u128);
        }
    }

    #[test]
    fn complete_and_empty_graphs() {
        let edges: Vec<(u32, u32)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let k5 = ColoredGraph::new(vec![0; 5], &edges).unwrap();
        assert_eq!(canonical_form(&k5).unwrap().group_order, 120);
        let empty = ColoredGraph::new(vec![0; 6], &[]).unwrap();
        assert_eq!(canonical_form(&empty).unwrap().group_order, 720);
        let two_colors = ColoredGraph::new(vec![0, 0, 1, 1, 1], &[]).unwrap();
        assert_eq!(canonical_form(&two_colors).unwrap().group_order, 12);
    }

    #[test]
    fn petersen() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        let g = ColoredGraph::new(vec![0; 10], &edges).unwrap();
        let c = canonical_form(&g).unwrap();
        assert_eq!(c.group_order, 120);
        for gen in &c.generators {
            assert!(g.is_automorphism(gen));
        }
        let h = relabel(&g, &[3, 7, 1, 9, 0, 2, 8, 6, 4, 5]);
        assert_eq!(canonical_form(&h).unwrap().rows, c.rows);
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        // C6 vs two triangles
        let two_tri = ColoredGraph::new(vec![0; 6], &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_ne!(canonical_form(&two_tri).unwrap().rows, canonical_form(&cycle(6)).unwrap().rows);
        assert_eq!(canonical_form(&two_tri).unwrap().group_order, 72);
    }

    #[test]
    fn bad_edges_rejected() {
        assert!(ColoredGraph::new(vec![0; 2], &[(0, 0)]).is_err());
        assert!(ColoredGraph::new(vec![0; 2], &[(0, 2)]).is_err());
        assert!(ColoredGraph::new(vec![0; 2], &[(0, 1), (1, 0)]).is_err());
    }
}
