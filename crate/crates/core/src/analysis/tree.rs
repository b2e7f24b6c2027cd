use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice::{Dir, Edge, Vertex};

/// Finite monotone tree in lifted (non-periodic) coordinates. Every
/// non-root vertex has exactly one incoming tree edge from the level below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneTree {
    root: Vertex,
    edges: BTreeSet<Edge>,
    vertices: BTreeSet<Vertex>,
    cap: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Height {
    Finite(u32),
    /// The tree touched the window cap; the true height is at least this.
    Censored(u32),
}

impl Height {
    pub fn value(self) -> u32 {
        match self {
            Height::Finite(h) | Height::Censored(h) => h,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Height::Censored(_))
    }
}

impl MonotoneTree {
    pub fn new(root: Vertex) -> Self {
        Self { root, edges: BTreeSet::new(), vertices: BTreeSet::from([root]), cap: None }
    }

    /// Marks the tree as living under a height cap; touching it censors the height.
    pub fn with_cap(mut self, cap: i64) -> Self {
        self.cap = Some(cap);
        self
    }

    /// Builds a tree from edges, checking the tree property.
    pub fn from_edges(root: Vertex, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut pending: Vec<Edge> = edges.into_iter().collect();
        pending.sort_by_key(|e| (e.tail.y, e.tail.x, e.dir));
        let mut tree = Self::new(root);
        for e in pending {
            if !tree.vertices.contains(&e.tail) || tree.vertices.contains(&e.head()) {
                return Err(Error::InvalidParameter(format!("edge {e} breaks the tree property")));
            }
            tree.insert_unchecked(e);
        }
        Ok(tree)
    }

    pub(crate) fn insert_unchecked(&mut self, e: Edge) {
        self.vertices.insert(e.head());
        self.edges.insert(e);
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// `|T^m|`: vertices at absolute level `root.y + m`.
    pub fn level_profile(&self, m: i64) -> usize {
        let y = self.root.y + m;
        self.vertices.iter().filter(|v| v.y == y).count()
    }

    /// Sorted x coordinates of the level-`m` slice.
    pub fn level_slice(&self, m: i64) -> Vec<i64> {
        let mut xs: Vec<i64> = self.vertices.iter().filter(|v| v.y == self.root.y + m).map(|v| v.x).collect();
        xs.sort_unstable();
        xs
    }

    pub fn height(&self) -> u32 {
        self.vertices.iter().map(|v| v.y - self.root.y).max().unwrap_or(0) as u32
    }

    pub fn tree_height(&self) -> Height {
        let h = self.height();
        match self.cap {
            Some(cap) if self.root.y + h as i64 >= cap => Height::Censored(h),
            _ => Height::Finite(h),
        }
    }

    /// Outer edge boundary counted by level: edges leaving a tree vertex that
    /// are not tree edges. The head may itself be a tree vertex.
    pub fn shell_profile(&self) -> ShellProfile {
        let mut counts = BTreeMap::new();
        for v in &self.vertices {
            for d in Dir::BOTH {
                if !self.edges.contains(&v.edge(d)) {
                    *counts.entry((v.y - self.root.y + 1) as u32).or_insert(0u64) += 1;
                }
            }
        }
        ShellProfile { counts }
    }

    /// Subtree hanging below `root.step(dir)`, translated back onto the root.
    /// `None` if that edge is not in the tree.
    pub fn child_subtree(&self, dir: Dir) -> Option<MonotoneTree> {
        let first = self.root.edge(dir);
        if !self.edges.contains(&first) {
            return None;
        }
        let child = first.head();
        let (dx, dy) = (child.x - self.root.x, child.y - self.root.y);
        let mut sub = MonotoneTree::new(self.root);
        let mut stack = vec![child];
        while let Some(v) = stack.pop() {
            for d in Dir::BOTH {
                let e = v.edge(d);
                if self.edges.contains(&e) {
                    let moved = Vertex { x: v.x - dx, y: v.y - dy }.edge(d);
                    sub.insert_unchecked(moved);
                    stack.push(e.head());
                }
            }
        }
        Some(sub)
    }
}

/// `|∂S_i|` for each level `i >= 1` (relative to the root).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShellProfile {
    pub counts: BTreeMap<u32, u64>,
}

impl ShellProfile {
    pub fn get(&self, level: u32) -> u64 {
        self.counts.get(&level).copied().unwrap_or(0)
    }

    pub fn max_level(&self) -> u32 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

/// Exhaustive enumeration of monotone trees rooted at the origin with at
/// most `max_edges` edges. Each tree is produced exactly once: every branch
/// commits to the first remaining frontier edge it includes, and frontier
/// edges skipped at a branch are never offered again below it.
pub fn enumerate_monotone_trees(max_edges: usize) -> Result<TreeEnumerator> {
    if max_edges > 12 {
        return Err(Error::EnumerationGuard(max_edges));
    }
    Ok(TreeEnumerator { max_edges, edges: Vec::new(), heads: Vec::new(), stack: Vec::new(), started: false })
}

struct Frame {
    frontier: Vec<Edge>,
    next: usize,
}

pub struct TreeEnumerator {
    max_edges: usize,
    edges: Vec<Edge>,
    heads: Vec<Vertex>,
    stack: Vec<Frame>,
    started: bool,
}

impl TreeEnumerator {
    fn current(&self) -> MonotoneTree {
        let mut t = MonotoneTree::new(Vertex::ORIGIN);
        for e in &self.edges {
            t.insert_unchecked(*e);
        }
        t
    }
}

impl Iterator for TreeEnumerator {
    type Item = MonotoneTree;

    fn next(&mut self) -> Option<MonotoneTree> {
        if !self.started {
            self.started = true;
            let frontier = if self.max_edges == 0 {
                Vec::new()
            } else {
                Dir::BOTH.iter().map(|&d| Vertex::ORIGIN.edge(d)).collect()
            };
            self.stack.push(Frame { frontier, next: 0 });
            return Some(self.current());
        }
        loop {
            let frame = self.stack.last_mut()?;
            while frame.next < frame.frontier.len() {
                let e = frame.frontier[frame.next];
                frame.next += 1;
                let head = e.head();
                if self.heads.contains(&head) {
                    continue;
                }
                let mut frontier = Vec::new();
                if self.edges.len() + 1 < self.max_edges {
                    frontier.extend_from_slice(&frame.frontier[frame.next..]);
                    frontier.extend(Dir::BOTH.iter().map(|&d| head.edge(d)));
                }
                self.edges.push(e);
                self.heads.push(head);
                self.stack.push(Frame { frontier, next: 0 });
                return Some(self.current());
            }
            self.stack.pop();
            if !self.stack.is_empty() {
                self.edges.pop();
                self.heads.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> Vertex {
        Vertex::ORIGIN
    }

    #[test]
    fn shell_examples() {
        let t = MonotoneTree::new(o());
        assert_eq!(t.shell_profile().counts, BTreeMap::from([(1, 2)]));
        let t = MonotoneTree::from_edges(o(), [o().edge(Dir::Left)]).unwrap();
        assert_eq!(t.shell_profile().counts, BTreeMap::from([(1, 1), (2, 2)]));
        let t = MonotoneTree::from_edges(o(), [o().edge(Dir::Left), o().edge(Dir::Right)]).unwrap();
        assert_eq!(t.shell_profile().counts, BTreeMap::from([(2, 4)]));
    }

    #[test]
    fn heights() {
        assert_eq!(MonotoneTree::new(o()).tree_height(), Height::Finite(0));
        let t = MonotoneTree::from_edges(o(), [o().edge(Dir::Left)]).unwrap();
        assert_eq!(t.tree_height(), Height::Finite(1));
        assert_eq!(t.clone().with_cap(1).tree_height(), Height::Censored(1));
    }

    #[test]
    fn from_edges_rejects_non_trees() {
        let a = Vertex::new(-1, 1).unwrap();
        let b = Vertex::new(1, 1).unwrap();
        let both_into_top = [o().edge(Dir::Left), o().edge(Dir::Right), a.edge(Dir::Right), b.edge(Dir::Left)];
        assert!(MonotoneTree::from_edges(o(), both_into_top).is_err());
        assert!(MonotoneTree::from_edges(o(), [a.edge(Dir::Left)]).is_err());
    }

    #[test]
    fn level_profile_counts() {
        let t = MonotoneTree::from_edges(o(), [o().edge(Dir::Left), o().edge(Dir::Right)]).unwrap();
        assert_eq!(t.level_profile(0), 1);
        assert_eq!(t.level_profile(1), 2);
        assert_eq!(t.level_profile(2), 0);
        assert_eq!(t.level_slice(1), vec![-1, 1]);
    }

    #[test]
    fn enumeration_small_counts() {
        assert_eq!(enumerate_monotone_trees(0).unwrap().count(), 1);
        assert_eq!(enumerate_monotone_trees(1).unwrap().count(), 3);
        assert_eq!(enumerate_monotone_trees(2).unwrap().count(), 8);
        assert!(matches!(enumerate_monotone_trees(13), Err(Error::EnumerationGuard(13))));
    }

    #[test]
    fn child_subtree_translates() {
        let a = Vertex::new(1, 1).unwrap();
        let t = MonotoneTree::from_edges(o(), [o().edge(Dir::Right), a.edge(Dir::Left)]).unwrap();
        let s = t.child_subtree(Dir::Right).unwrap();
        assert_eq!(s.edges().iter().copied().collect::<Vec<_>>(), vec![o().edge(Dir::Left)]);
        assert!(t.child_subtree(Dir::Left).is_none());
    }
}
