//! Read-only access shared by the FPP forest and the particle-system state.

use std::collections::BTreeSet;

use crate::analysis::tree::MonotoneTree;
use crate::lattice::{Dir, Edge, Vertex, Window};
use crate::Scalar;

/// A (possibly partial) forest of monotone trees rooted on the boundary of a
/// window, with an arrival time for every covered vertex.
pub trait ForestView<T: Scalar> {
    fn window(&self) -> Window;

    /// Site index of the tree owning `v`, if `v` is covered.
    fn owner(&self, v: Vertex) -> Option<usize>;

    /// Direction of the tree edge entering `v`; `None` on the boundary and
    /// for uncovered vertices.
    fn parent_dir(&self, v: Vertex) -> Option<Dir>;

    /// FPP distance or occupancy time.
    fn arrival(&self, v: Vertex) -> Option<T>;

    fn is_covered(&self) -> bool {
        let w = self.window();
        (w.width() as usize..w.vertex_count()).all(|i| self.owner(w.vertex_at(i)).is_some())
    }

    /// Canonical edge set of the tree rooted at `root`.
    fn tree_edges(&self, root: Vertex) -> BTreeSet<Edge> {
        let w = self.window();
        self.extract_tree(root).edges().iter().map(|e| w.canonical_edge(*e)).collect()
    }

    /// Tree rooted at `root` in lifted coordinates (the root keeps its x).
    fn extract_tree(&self, root: Vertex) -> MonotoneTree {
        let w = self.window();
        let mut tree = MonotoneTree::new(root).with_cap(w.height() as i64);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if v.y >= w.height() as i64 {
                continue;
            }
            for d in Dir::BOTH {
                let c = v.step(d);
                if self.parent_dir(c) == Some(d) {
                    tree.insert_unchecked(v.edge(d));
                    stack.push(c);
                }
            }
        }
        tree
    }

    /// Height of every tree, indexed by site. Heights equal to `M` mean the
    /// tree touches the cap.
    fn root_heights(&self) -> Vec<u32> {
        let w = self.window();
        let mut h = vec![0u32; w.width() as usize];
        for i in w.width() as usize..w.vertex_count() {
            let v = w.vertex_at(i);
            if let Some(r) = self.owner(v) {
                h[r] = h[r].max(v.y as u32);
            }
        }
        h
    }

    fn censored_roots(&self) -> Vec<usize> {
        let m = self.window().height();
        self.root_heights().iter().enumerate().filter(|(_, &h)| h >= m).map(|(i, _)| i).collect()
    }
}
