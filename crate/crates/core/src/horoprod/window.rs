use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::WindowError;
use crate::trees::{canonical::region_code, NodeIx, PointedTree, TreeError, VertexId};

/// A level-matched pair `(x, x')` with `b(x) + b'(x') = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HoroVertex {
    pub left: NodeIx,
    pub right: NodeIx,
    /// `b(left)`, equal to `-b'(right)`.
    pub level: i64,
}

/// Size and shape of a window, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowSummary {
    pub height: u32,
    pub left_depth: u32,
    pub right_depth: u32,
    pub vertices: usize,
    pub edges: usize,
    pub interior: usize,
}

/// Finite window of the horospheric product of two pointed trees: the
/// connected component of the origin `(o, o')` among level-matched pairs with
/// `|level| ≤ H`.
///
/// Vertices are numbered by BFS distance from the origin, ties broken by
/// (left address, right address); the origin is vertex 0. A vertex is
/// interior when neither coordinate sits on its tree's horizon and
/// `|level| < H`, so every product neighbor is present in the window.
#[derive(Debug, Clone)]
pub struct HoroWindow {
    left: Arc<PointedTree>,
    right: Arc<PointedTree>,
    height: u32,
    vertices: Vec<HoroVertex>,
    distance: Vec<u32>,
    index: HashMap<(u32, u32), u32>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
    interior: Vec<bool>,
}

/// Product neighbors of `(x, x')` at `level`, restricted to `|level| ≤ h`.
fn product_neighbors(
    left: &PointedTree,
    right: &PointedTree,
    x: NodeIx,
    xr: NodeIx,
    level: i64,
    h: i64,
    out: &mut Vec<(NodeIx, NodeIx, i64)>,
) {
    out.clear();
    // x moves away from γ while x' moves toward γ'
    if level < h {
        if let Some(yr) = right.toward_end(xr) {
            out.extend(left.away_from_end(x).map(|y| (y, yr, level + 1)));
        }
    }
    if level > -h {
        if let Some(y) = left.toward_end(x) {
            out.extend(right.away_from_end(xr).map(|yr| (y, yr, level - 1)));
        }
    }
}

impl HoroWindow {
    pub fn build(
        left: impl Into<Arc<PointedTree>>,
        right: impl Into<Arc<PointedTree>>,
        height: u32,
    ) -> Result<Self, WindowError> {
        let left = left.into();
        let right = right.into();
        let min_depth = left.tree().depth_limit().min(right.tree().depth_limit());
        if height > min_depth {
            return Err(WindowError::HorizonExceeded {
                height,
                depth: min_depth,
            });
        }
        let h = i64::from(height);

        // breadth-first exploration with provisional ids
        let origin = (left.tree().root(), right.tree().root());
        let mut found: Vec<(HoroVertex, u32)> = vec![(
            HoroVertex {
                left: origin.0,
                right: origin.1,
                level: 0,
            },
            0,
        )];
        let mut provisional: HashMap<(u32, u32), u32> = HashMap::new();
        provisional.insert((origin.0 .0, origin.1 .0), 0);
        let mut queue = VecDeque::from([0u32]);
        let mut buf = Vec::new();
        while let Some(id) = queue.pop_front() {
            let (v, d) = found[id as usize];
            product_neighbors(&left, &right, v.left, v.right, v.level, h, &mut buf);
            for &(y, yr, level) in &buf {
                let key = (y.0, yr.0);
                if !provisional.contains_key(&key) {
                    let nid = found.len() as u32;
                    provisional.insert(key, nid);
                    found.push((
                        HoroVertex {
                            left: y,
                            right: yr,
                            level,
                        },
                        d + 1,
                    ));
                    queue.push_back(nid);
                }
            }
        }
        drop(provisional);

        // canonical numbering; preorder index order equals address order
        let mut order: Vec<u32> = (0..found.len() as u32).collect();
        order.sort_unstable_by_key(|&i| {
            let (v, d) = found[i as usize];
            (d, v.left.0, v.right.0)
        });
        let vertices: Vec<HoroVertex> = order.iter().map(|&i| found[i as usize].0).collect();
        let distance: Vec<u32> = order.iter().map(|&i| found[i as usize].1).collect();
        drop(found);
        let index: HashMap<(u32, u32), u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| ((v.left.0, v.right.0), i as u32))
            .collect();

        let mut adj_start = Vec::with_capacity(vertices.len() + 1);
        let mut adj = Vec::new();
        adj_start.push(0u32);
        for v in &vertices {
            product_neighbors(&left, &right, v.left, v.right, v.level, h, &mut buf);
            let begin = adj.len();
            for &(y, yr, _) in &buf {
                // every legal neighbor was reached by the BFS
                adj.push(index[&(y.0, yr.0)]);
            }
            adj[begin..].sort_unstable();
            adj_start.push(adj.len() as u32);
        }

        let interior = vertices
            .iter()
            .map(|v| {
                !left.tree().is_horizon(v.left)
                    && !right.tree().is_horizon(v.right)
                    && v.level.abs() < h
            })
            .collect();

        Ok(HoroWindow {
            left,
            right,
            height,
            vertices,
            distance,
            index,
            adj_start,
            adj,
            interior,
        })
    }

    pub fn left(&self) -> &PointedTree {
        &self.left
    }

    pub fn right(&self) -> &PointedTree {
        &self.right
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn origin(&self) -> u32 {
        0
    }

    pub fn vertex(&self, id: u32) -> HoroVertex {
        self.vertices[id as usize]
    }

    pub fn vertices(&self) -> &[HoroVertex] {
        &self.vertices
    }

    /// BFS distance from the origin.
    pub fn distance_from_origin(&self, id: u32) -> u32 {
        self.distance[id as usize]
    }

    pub fn find(&self, left: NodeIx, right: NodeIx) -> Option<u32> {
        self.index.get(&(left.0, right.0)).copied()
    }

    pub fn find_by_address(&self, left: &VertexId, right: &VertexId) -> Result<u32, WindowError> {
        let l = self.left.tree().index_of(left)?;
        let r = self.right.tree().index_of(right)?;
        self.find(l, r)
            .ok_or_else(|| WindowError::UnknownVertex(format!("({left}, {right})")))
    }

    /// Sorted neighbor ids.
    #[inline]
    pub fn neighbors(&self, id: u32) -> &[u32] {
        let i = id as usize;
        &self.adj[self.adj_start[i] as usize..self.adj_start[i + 1] as usize]
    }

    #[inline]
    pub fn degree_of(&self, id: u32) -> u32 {
        self.adj_start[id as usize + 1] - self.adj_start[id as usize]
    }

    /// Degree of a window vertex given by its coordinates.
    pub fn degree(&self, v: &HoroVertex) -> Result<u32, WindowError> {
        self.find(v.left, v.right)
            .map(|id| self.degree_of(id))
            .ok_or_else(|| WindowError::UnknownVertex(format!("({}, {})", v.left.0, v.right.0)))
    }

    /// `(deg_T(x) - 1) + (deg_T'(x') - 1)`, the degree in the infinite product.
    pub fn product_degree(&self, id: u32) -> u32 {
        let v = self.vertex(id);
        (self.left.tree().degree(v.left) - 1) + (self.right.tree().degree(v.right) - 1)
    }

    #[inline]
    pub fn is_interior(&self, id: u32) -> bool {
        self.interior[id as usize]
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn summary(&self) -> WindowSummary {
        WindowSummary {
            height: self.height,
            left_depth: self.left.tree().depth_limit(),
            right_depth: self.right.tree().depth_limit(),
            vertices: self.len(),
            edges: self.edge_count(),
            interior: self.interior_count(),
        }
    }

    /// Canonical code of the product of the two pointed `radius`-balls around
    /// the coordinates of `id` (each ball marks the ray toward its end).
    ///
    /// Equal codes imply isomorphic `radius`-balls in the product; it is a
    /// sufficient test, not a complete invariant of the product ball.
    pub fn local_code(&self, id: u32, radius: u32) -> Result<Vec<u8>, WindowError> {
        let v = self.vertex(id);
        let mut code = pointed_ball_code(&self.left, v.left, radius)?;
        code.push(b'|');
        code.extend(pointed_ball_code(&self.right, v.right, radius)?);
        Ok(code)
    }
}

fn pointed_ball_code(pt: &PointedTree, x: NodeIx, radius: u32) -> Result<Vec<u8>, WindowError> {
    let mut marked = Vec::with_capacity(radius as usize);
    let mut cur = x;
    for _ in 0..radius {
        cur = pt.toward_end(cur).ok_or(TreeError::HorizonExceeded {
            requested: u64::from(pt.tree().depth_limit()) + 1,
            depth_limit: pt.tree().depth_limit(),
        })?;
        marked.push(cur);
    }
    Ok(region_code(pt.tree(), &[x], radius, x, &marked)?)
}
