use super::{NodeIx, RootedTree, TreeError, VertexId};

/// A rooted tree with a distinguished end `γ`, given by the spine ray that
/// descends from the root to the horizon.
///
/// Busemann levels follow the convention that moving toward `γ` lowers the
/// level: the `k`-th spine vertex sits at level `-k`, and a vertex at depth
/// `d` leaving the spine at spine depth `j` sits at level `d - 2j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedTree {
    tree: RootedTree,
    spine: Vec<u32>,
    spine_nodes: Vec<NodeIx>,
    branch_depth: Vec<u32>,
}

impl PointedTree {
    pub fn new(tree: RootedTree, spine: Vec<u32>) -> Result<Self, TreeError> {
        if spine.len() != tree.depth_limit() as usize {
            return Err(TreeError::DepthViolation(format!(
                "spine has length {} but the horizon is at depth {}",
                spine.len(),
                tree.depth_limit()
            )));
        }
        let mut spine_nodes = Vec::with_capacity(spine.len() + 1);
        let mut v = tree.root();
        spine_nodes.push(v);
        for (position, &rank) in spine.iter().enumerate() {
            v = tree
                .child(v, rank)
                .ok_or(TreeError::InvalidSpine { position })?;
            spine_nodes.push(v);
        }

        // preorder visits parents first, so one pass suffices
        let mut branch_depth = vec![0u32; tree.len()];
        let mut on_spine = vec![false; tree.len()];
        for &s in &spine_nodes {
            on_spine[s.index()] = true;
        }
        for i in 1..tree.len() {
            let v = NodeIx(i as u32);
            branch_depth[i] = if on_spine[i] {
                tree.depth(v)
            } else {
                branch_depth[tree.parent(v).expect("non-root").index()]
            };
        }

        Ok(PointedTree {
            tree,
            spine,
            spine_nodes,
            branch_depth,
        })
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn into_tree(self) -> RootedTree {
        self.tree
    }

    /// Child indices of the ray `[o, γ)`.
    pub fn spine(&self) -> &[u32] {
        &self.spine
    }

    /// The `k`-th spine vertex, `k = 0` being the root.
    pub fn spine_vertex(&self, k: u32) -> Option<NodeIx> {
        self.spine_nodes.get(k as usize).copied()
    }

    pub fn is_spine(&self, v: NodeIx) -> bool {
        self.branch_depth[v.index()] == self.tree.depth(v)
    }

    /// Spine depth at which the ray from `v` to `γ` joins the spine.
    pub fn branch_depth(&self, v: NodeIx) -> u32 {
        self.branch_depth[v.index()]
    }

    /// Busemann function `b(v) = β_γ(o, v)`.
    #[inline]
    pub fn level(&self, v: NodeIx) -> i64 {
        i64::from(self.tree.depth(v)) - 2 * i64::from(self.branch_depth[v.index()])
    }

    pub fn busemann_ix(&self, x: NodeIx, y: NodeIx) -> i64 {
        self.level(y) - self.level(x)
    }

    pub fn busemann(&self, x: &VertexId, y: &VertexId) -> Result<i64, TreeError> {
        let xi = self.tree.index_of(x)?;
        let yi = self.tree.index_of(y)?;
        Ok(self.busemann_ix(xi, yi))
    }

    pub fn horosphere_ix(&self, k: i64) -> Vec<NodeIx> {
        (0..self.tree.len() as u32)
            .map(NodeIx)
            .filter(|&v| self.level(v) == k)
            .collect()
    }

    /// Known vertices on the horosphere `H_k`; may be empty near the horizon.
    pub fn horosphere(&self, k: i64) -> Vec<VertexId> {
        self.horosphere_ix(k)
            .into_iter()
            .map(|v| self.tree.address(v))
            .collect()
    }

    /// The neighbor one level lower, i.e. the next vertex on `[v, γ)`.
    ///
    /// `None` only for the last spine vertex, whose successor lies past the
    /// horizon.
    pub fn toward_end(&self, v: NodeIx) -> Option<NodeIx> {
        if self.is_spine(v) {
            self.spine_vertex(self.tree.depth(v) + 1)
        } else {
            self.tree.parent(v)
        }
    }

    /// Known neighbors one level higher.
    pub fn away_from_end(&self, v: NodeIx) -> impl Iterator<Item = NodeIx> + '_ {
        let spine_child = if self.is_spine(v) {
            self.spine_vertex(self.tree.depth(v) + 1)
        } else {
            None
        };
        let up = if self.is_spine(v) {
            self.tree.parent(v)
        } else {
            None
        };
        up.into_iter().chain(
            self.tree
                .children(v)
                .iter()
                .map(|&c| NodeIx(c))
                .filter(move |&c| Some(c) != spine_child),
        )
    }
}
