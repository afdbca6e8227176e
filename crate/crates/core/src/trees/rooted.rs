use std::collections::VecDeque;

use super::{NodeIx, TreeError, VertexId};

/// Largest accepted generation horizon.
pub const MAX_DEPTH_LIMIT: u32 = 1 << 16;

const NO_PARENT: u32 = u32::MAX;

/// How a vertex ends, if it has no expanded children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafKind {
    /// Above the horizon with at least one child.
    Inner,
    /// Above the horizon with no offspring.
    TrueLeaf,
    /// On the horizon: offspring count recorded, children not expanded.
    Truncated,
}

/// Finite truncation of a rooted locally finite tree.
///
/// Stored as the preorder sequence of offspring counts. Vertices on the
/// horizon (`depth == depth_limit`) keep their drawn offspring count but no
/// children, so every degree in the truncation is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    offspring: Vec<u32>,
    depth_limit: u32,
    depth: Vec<u32>,
    parent: Vec<u32>,
    child_rank: Vec<u32>,
    subtree_end: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    generation_sizes: Vec<u64>,
}

impl RootedTree {
    /// Validates a preorder offspring encoding against its horizon.
    pub fn build(offspring: Vec<u32>, depth_limit: u32) -> Result<Self, TreeError> {
        if depth_limit > MAX_DEPTH_LIMIT {
            return Err(TreeError::DepthViolation(format!(
                "depth limit {depth_limit} exceeds maximum {MAX_DEPTH_LIMIT}"
            )));
        }
        if offspring.is_empty() {
            return Err(TreeError::MalformedEncoding {
                position: 0,
                reason: "empty sequence",
            });
        }
        if offspring.len() > NO_PARENT as usize {
            return Err(TreeError::MalformedEncoding {
                position: NO_PARENT as usize,
                reason: "too many vertices",
            });
        }
        let n = offspring.len();
        let mut depth = vec![0u32; n];
        let mut parent = vec![NO_PARENT; n];
        let mut child_rank = vec![0u32; n];
        let mut subtree_end = vec![0u32; n];
        let mut generation_sizes = vec![0u64; depth_limit as usize + 1];

        // (vertex, children still to read)
        let mut stack: Vec<(u32, u32)> = Vec::new();
        let mut next = 0usize;
        loop {
            let v = next;
            next += 1;
            generation_sizes[depth[v] as usize] += 1;
            if depth[v] < depth_limit && offspring[v] > 0 {
                stack.push((v as u32, offspring[v]));
            } else {
                subtree_end[v] = next as u32;
            }
            // close finished subtrees, then open the next child
            loop {
                match stack.last_mut() {
                    None => break,
                    Some((_, 0)) => {
                        let (u, _) = stack.pop().expect("nonempty");
                        subtree_end[u as usize] = next as u32;
                    }
                    Some((u, remaining)) => {
                        let u = *u;
                        let rank = offspring[u as usize] - *remaining + 1;
                        *remaining -= 1;
                        if next >= n {
                            return Err(TreeError::MalformedEncoding {
                                position: n,
                                reason: "sequence ends before all children are listed",
                            });
                        }
                        depth[next] = depth[u as usize] + 1;
                        parent[next] = u;
                        child_rank[next] = rank;
                        break;
                    }
                }
            }
            if stack.is_empty() {
                break;
            }
        }
        if next != n {
            return Err(TreeError::MalformedEncoding {
                position: next,
                reason: "trailing entries after the tree is complete",
            });
        }

        let mut child_start = vec![0u32; n + 1];
        for v in 0..n {
            let expanded = if depth[v] < depth_limit {
                offspring[v]
            } else {
                0
            };
            child_start[v + 1] = child_start[v] + expanded;
        }
        let mut children = vec![0u32; child_start[n] as usize];
        let mut fill = child_start.clone();
        for v in 1..n {
            let p = parent[v] as usize;
            children[fill[p] as usize] = v as u32;
            fill[p] += 1;
        }

        Ok(RootedTree {
            offspring,
            depth_limit,
            depth,
            parent,
            child_rank,
            subtree_end,
            child_start,
            children,
            generation_sizes,
        })
    }

    pub fn len(&self) -> usize {
        self.offspring.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn depth_limit(&self) -> u32 {
        self.depth_limit
    }

    pub fn root(&self) -> NodeIx {
        NodeIx::ROOT
    }

    /// Preorder offspring encoding (horizon entries are recorded counts).
    pub fn offspring_sequence(&self) -> &[u32] {
        &self.offspring
    }

    pub fn offspring(&self, v: NodeIx) -> u32 {
        self.offspring[v.index()]
    }

    pub fn depth(&self, v: NodeIx) -> u32 {
        self.depth[v.index()]
    }

    pub fn parent(&self, v: NodeIx) -> Option<NodeIx> {
        match self.parent[v.index()] {
            NO_PARENT => None,
            p => Some(NodeIx(p)),
        }
    }

    /// Expanded children in index order; empty on the horizon.
    pub fn children(&self, v: NodeIx) -> &[u32] {
        let i = v.index();
        &self.children[self.child_start[i] as usize..self.child_start[i + 1] as usize]
    }

    /// The `rank`-th child (1-based) of `v`, if expanded.
    pub fn child(&self, v: NodeIx, rank: u32) -> Option<NodeIx> {
        if rank == 0 {
            return None;
        }
        self.children(v).get(rank as usize - 1).map(|&c| NodeIx(c))
    }

    pub fn is_horizon(&self, v: NodeIx) -> bool {
        self.depth[v.index()] == self.depth_limit
    }

    pub fn leaf_kind(&self, v: NodeIx) -> LeafKind {
        if self.is_horizon(v) {
            LeafKind::Truncated
        } else if self.offspring(v) == 0 {
            LeafKind::TrueLeaf
        } else {
            LeafKind::Inner
        }
    }

    /// Graph degree, using the recorded offspring count on the horizon.
    pub fn degree(&self, v: NodeIx) -> u32 {
        self.offspring(v) + u32::from(v != NodeIx::ROOT)
    }

    /// Number of vertices at each depth `0..=depth_limit`.
    pub fn generation_sizes(&self) -> &[u64] {
        &self.generation_sizes
    }

    /// One past the last preorder index of the subtree of `v`.
    pub fn subtree_end(&self, v: NodeIx) -> NodeIx {
        NodeIx(self.subtree_end[v.index()])
    }

    pub fn is_ancestor_or_self(&self, a: NodeIx, v: NodeIx) -> bool {
        a <= v && v.0 < self.subtree_end[a.index()]
    }

    pub fn index_of(&self, id: &VertexId) -> Result<NodeIx, TreeError> {
        let mut v = NodeIx::ROOT;
        for &rank in id.path() {
            v = self
                .child(v, rank)
                .ok_or_else(|| TreeError::UnknownVertex(id.clone()))?;
        }
        Ok(v)
    }

    pub fn address(&self, v: NodeIx) -> VertexId {
        let mut path = Vec::with_capacity(self.depth(v) as usize);
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(self.child_rank[cur.index()]);
            cur = p;
        }
        path.reverse();
        VertexId::new(path)
    }

    /// 1-based position of `v` among its siblings; 0 for the root.
    pub fn child_rank(&self, v: NodeIx) -> u32 {
        self.child_rank[v.index()]
    }

    pub fn lca(&self, mut x: NodeIx, mut y: NodeIx) -> NodeIx {
        while self.depth(x) > self.depth(y) {
            x = self.parent(x).expect("deeper vertex has a parent");
        }
        while self.depth(y) > self.depth(x) {
            y = self.parent(y).expect("deeper vertex has a parent");
        }
        while x != y {
            x = self.parent(x).expect("non-root");
            y = self.parent(y).expect("non-root");
        }
        x
    }

    pub fn distance_ix(&self, x: NodeIx, y: NodeIx) -> u32 {
        let c = self.lca(x, y);
        self.depth(x) + self.depth(y) - 2 * self.depth(c)
    }

    pub fn distance(&self, x: &VertexId, y: &VertexId) -> Result<u32, TreeError> {
        let xi = self.index_of(x)?;
        let yi = self.index_of(y)?;
        Ok(self.distance_ix(xi, yi))
    }

    fn check_horizon(&self, requested: u64) -> Result<(), TreeError> {
        if requested > u64::from(self.depth_limit) {
            Err(TreeError::HorizonExceeded {
                requested,
                depth_limit: self.depth_limit,
            })
        } else {
            Ok(())
        }
    }

    /// Vertices at depth `n`, in preorder.
    pub fn sphere_ix(&self, n: u32) -> Result<Vec<NodeIx>, TreeError> {
        self.check_horizon(u64::from(n))?;
        Ok((0..self.len() as u32)
            .filter(|&v| self.depth[v as usize] == n)
            .map(NodeIx)
            .collect())
    }

    pub fn sphere(&self, n: u32) -> Result<Vec<VertexId>, TreeError> {
        Ok(self
            .sphere_ix(n)?
            .into_iter()
            .map(|v| self.address(v))
            .collect())
    }

    pub fn sphere_size(&self, n: u32) -> Result<u64, TreeError> {
        self.check_horizon(u64::from(n))?;
        Ok(self.generation_sizes[n as usize])
    }

    /// Number of depth-`n` vertices in the subtree of `apex`.
    pub fn shadow_sphere_count_ix(&self, apex: NodeIx, n: u32) -> Result<u64, TreeError> {
        self.check_horizon(u64::from(n))?;
        if n < self.depth(apex) {
            return Err(TreeError::HorizonExceeded {
                requested: u64::from(n),
                depth_limit: self.depth(apex),
            });
        }
        let end = self.subtree_end[apex.index()] as usize;
        Ok(self.depth[apex.index()..end]
            .iter()
            .filter(|&&d| d == n)
            .count() as u64)
    }

    pub fn shadow_sphere_count(&self, apex: &VertexId, n: u32) -> Result<u64, TreeError> {
        let a = self.index_of(apex)?;
        self.shadow_sphere_count_ix(a, n)
    }

    /// Graph neighbors known in the truncation: parent first, then children.
    pub fn neighbors(&self, v: NodeIx) -> impl Iterator<Item = NodeIx> + '_ {
        self.parent(v)
            .into_iter()
            .chain(self.children(v).iter().map(|&c| NodeIx(c)))
    }

    /// Breadth-first ball around `center`, with distances.
    ///
    /// Fails if the ball could reach past the horizon.
    pub fn ball_ix(&self, center: NodeIx, radius: u32) -> Result<Vec<(NodeIx, u32)>, TreeError> {
        self.check_horizon(u64::from(self.depth(center)) + u64::from(radius))?;
        let mut out = vec![(center, 0)];
        let mut queue = VecDeque::from([(center, None::<NodeIx>, 0u32)]);
        while let Some((v, from, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for w in self.neighbors(v) {
                if Some(w) != from {
                    out.push((w, d + 1));
                    queue.push_back((w, Some(v), d + 1));
                }
            }
        }
        Ok(out)
    }

    /// Vertices at distance exactly `radius` from `center`.
    pub fn sphere_around_ix(&self, center: NodeIx, radius: u32) -> Result<Vec<NodeIx>, TreeError> {
        Ok(self
            .ball_ix(center, radius)?
            .into_iter()
            .filter(|&(_, d)| d == radius)
            .map(|(v, _)| v)
            .collect())
    }

    /// Edge list with preorder indices, one `parent child` pair per line.
    pub fn edge_list(&self) -> String {
        let mut out = String::with_capacity(self.len() * 8);
        for v in 1..self.len() {
            out.push_str(&format!("{} {}\n", self.parent[v], v));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_binary(depth: u32) -> RootedTree {
        // preorder of a full binary tree: every vertex records 2 offspring
        let n = (1usize << (depth + 1)) - 1;
        RootedTree::build(vec![2; n], depth).unwrap()
    }

    #[test]
    fn smallest_nontrivial_tree() {
        let t = RootedTree::build(vec![2, 0, 0], 1).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.leaf_kind(NodeIx(1)), LeafKind::Truncated);
        assert_eq!(t.leaf_kind(NodeIx(2)), LeafKind::Truncated);
        assert_eq!(t.leaf_kind(NodeIx(0)), LeafKind::Inner);
    }

    #[test]
    fn full_binary_counts() {
        let t = full_binary(3);
        assert_eq!(t.len(), 15);
        assert_eq!(t.sphere_size(3).unwrap(), 8);
        assert_eq!(t.sphere(3).unwrap().len(), 8);
    }

    #[test]
    fn path_tree() {
        let t = RootedTree::build(vec![1; 6], 5).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.depth(NodeIx(5)), 5);
        assert_eq!(t.distance_ix(NodeIx(0), NodeIx(5)), 5);
    }

    #[test]
    fn true_leaves_above_horizon() {
        // root with a leaf child and a child having one truncated child
        let t = RootedTree::build(vec![2, 0, 1, 3], 2).unwrap();
        assert_eq!(t.leaf_kind(NodeIx(1)), LeafKind::TrueLeaf);
        assert_eq!(t.leaf_kind(NodeIx(3)), LeafKind::Truncated);
        assert_eq!(t.degree(NodeIx(3)), 4);
        assert_eq!(t.shadow_sphere_count_ix(NodeIx(1), 2).unwrap(), 0);
    }

    #[test]
    fn malformed_encodings() {
        assert!(matches!(
            RootedTree::build(vec![2, 0], 1),
            Err(TreeError::MalformedEncoding { .. })
        ));
        assert!(matches!(
            RootedTree::build(vec![1, 0, 0], 3),
            Err(TreeError::MalformedEncoding { position: 2, .. })
        ));
        assert!(matches!(
            RootedTree::build(vec![], 0),
            Err(TreeError::MalformedEncoding { .. })
        ));
        assert!(matches!(
            RootedTree::build(vec![0], MAX_DEPTH_LIMIT + 1),
            Err(TreeError::DepthViolation(_))
        ));
    }

    #[test]
    fn depth_zero_records_root_offspring() {
        let t = RootedTree::build(vec![4], 0).unwrap();
        assert_eq!(t.offspring(t.root()), 4);
        assert!(t.children(t.root()).is_empty());
        assert_eq!(t.degree(t.root()), 4);
    }

    #[test]
    fn distance_examples() {
        let t = full_binary(3);
        let root = VertexId::root();
        assert_eq!(t.distance(&root, &root).unwrap(), 0);
        let a = VertexId::new(vec![1]);
        let b = VertexId::new(vec![2]);
        assert_eq!(t.distance(&a, &b).unwrap(), 2);
        let x = VertexId::new(vec![1, 2, 1]);
        let y = VertexId::new(vec![1, 1]);
        assert_eq!(t.distance(&x, &y).unwrap(), 3);
        assert!(matches!(
            t.distance(&root, &VertexId::new(vec![3])),
            Err(TreeError::UnknownVertex(_))
        ));
    }

    #[test]
    fn address_index_bijection() {
        let t = RootedTree::build(vec![3, 1, 2, 0, 1, 0, 2, 1, 1, 0], 3).unwrap();
        for v in 0..t.len() as u32 {
            let id = t.address(NodeIx(v));
            assert_eq!(t.index_of(&id).unwrap(), NodeIx(v));
        }
        // preorder agrees with lexicographic address order
        let addrs: Vec<_> = (0..t.len() as u32).map(|v| t.address(NodeIx(v))).collect();
        let mut sorted = addrs.clone();
        sorted.sort();
        assert_eq!(addrs, sorted);
    }

    #[test]
    fn horizon_errors() {
        let t = full_binary(2);
        assert!(matches!(
            t.sphere(3),
            Err(TreeError::HorizonExceeded { .. })
        ));
        assert!(t.ball_ix(NodeIx(1), 2).is_err());
        assert_eq!(t.ball_ix(NodeIx(1), 1).unwrap().len(), 4);
        assert_eq!(t.shadow_sphere_count_ix(NodeIx(1), 2).unwrap(), 2);
    }

    #[test]
    fn edge_list_format() {
        let t = RootedTree::build(vec![2, 0, 0], 1).unwrap();
        assert_eq!(t.edge_list(), "0 1\n0 2\n");
    }
}
