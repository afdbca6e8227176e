//! AHU-style canonical codes for finite rooted balls.
//!
//! A ball is re-rooted at its center and encoded bottom-up: every vertex
//! becomes an opening bracket, the sorted codes of its children, and a closing
//! bracket. Marked vertices use `[`/`]` instead of `(`/`)`. Codes are balanced
//! words, hence prefix-free, so sorting and concatenating child codes is a
//! complete invariant for rooted (and marked) isomorphism.

use std::collections::{HashMap, VecDeque};

use super::{NodeIx, RootedTree, TreeError};

/// Canonical code of the ball of `radius` around `center`, rooted at `center`.
pub fn canonical_code(t: &RootedTree, center: NodeIx, radius: u32) -> Result<Vec<u8>, TreeError> {
    region_code(t, &[center], radius, center, &[])
}

/// Code of the union of the `radius`-balls around `centers`, rooted at `root`,
/// with `marked` vertices distinguished.
///
/// The centers must lie in one connected piece of the union (for instance,
/// two adjacent vertices), and `root` must belong to it.
pub fn region_code(
    t: &RootedTree,
    centers: &[NodeIx],
    radius: u32,
    root: NodeIx,
    marked: &[NodeIx],
) -> Result<Vec<u8>, TreeError> {
    for &c in centers {
        let reach = u64::from(t.depth(c)) + u64::from(radius);
        if reach > u64::from(t.depth_limit()) {
            return Err(TreeError::HorizonExceeded {
                requested: reach,
                depth_limit: t.depth_limit(),
            });
        }
    }

    // multi-source BFS for membership
    let mut dist: HashMap<NodeIx, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    for &c in centers {
        dist.insert(c, 0);
        queue.push_back(c);
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for w in t.neighbors(v) {
            if !dist.contains_key(&w) {
                dist.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    if !dist.contains_key(&root) {
        return Err(TreeError::UnknownVertex(t.address(root)));
    }

    // orient the region away from `root`
    let mut order = vec![root];
    let mut up: HashMap<NodeIx, NodeIx> = HashMap::new();
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for w in t.neighbors(v) {
            if dist.contains_key(&w) && up.get(&v) != Some(&w) && w != root {
                up.insert(w, v);
                order.push(w);
            }
        }
    }

    let mut codes: HashMap<NodeIx, Vec<u8>> = HashMap::with_capacity(order.len());
    let mut kids: HashMap<NodeIx, Vec<Vec<u8>>> = HashMap::new();
    for &v in order.iter().rev() {
        let mut child_codes = kids.remove(&v).unwrap_or_default();
        child_codes.sort_unstable();
        let is_marked = marked.contains(&v);
        let (open, close) = if is_marked {
            (b'[', b']')
        } else {
            (b'(', b')')
        };
        let len = 2 + child_codes.iter().map(Vec::len).sum::<usize>();
        let mut code = Vec::with_capacity(len);
        code.push(open);
        for c in child_codes {
            code.extend_from_slice(&c);
        }
        code.push(close);
        match up.get(&v) {
            Some(&p) => kids.entry(p).or_default().push(code),
            None => {
                codes.insert(v, code);
            }
        }
    }
    Ok(codes.remove(&root).expect("root encoded last"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_encodings_agree() {
        // star with 3 leaves, written with different horizons
        let a = RootedTree::build(vec![3, 0, 0, 0], 1).unwrap();
        let b = RootedTree::build(vec![3, 0, 0, 0], 4).unwrap();
        assert_eq!(
            canonical_code(&a, a.root(), 1).unwrap(),
            canonical_code(&b, b.root(), 1).unwrap()
        );
    }

    #[test]
    fn path_rerooted_at_ends() {
        let t = RootedTree::build(vec![1, 1, 1, 1, 0], 8).unwrap();
        let end = NodeIx(4);
        assert_eq!(
            canonical_code(&t, t.root(), 4).unwrap(),
            canonical_code(&t, end, 4).unwrap()
        );
    }

    #[test]
    fn child_order_does_not_matter() {
        let a = RootedTree::build(vec![2, 0, 2, 0, 0], 3).unwrap();
        let b = RootedTree::build(vec![2, 2, 0, 0, 0], 3).unwrap();
        assert_eq!(
            canonical_code(&a, a.root(), 2).unwrap(),
            canonical_code(&b, b.root(), 2).unwrap()
        );
        let c = RootedTree::build(vec![2, 1, 0, 1, 0], 3).unwrap();
        assert_ne!(
            canonical_code(&a, a.root(), 2).unwrap(),
            canonical_code(&c, c.root(), 2).unwrap()
        );
    }

    #[test]
    fn marks_distinguish_roots() {
        // root with children of 0 and 2 offspring: marking either child differs
        let t = RootedTree::build(vec![2, 0, 2, 0, 0], 3).unwrap();
        let a = region_code(&t, &[NodeIx(0), NodeIx(1)], 1, NodeIx(0), &[NodeIx(1)]).unwrap();
        let b = region_code(&t, &[NodeIx(0), NodeIx(2)], 1, NodeIx(0), &[NodeIx(2)]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn horizon_is_enforced() {
        let t = RootedTree::build(vec![2; 7], 2).unwrap();
        assert!(canonical_code(&t, NodeIx(1), 2).is_err());
        assert!(canonical_code(&t, NodeIx(1), 1).is_ok());
    }
}
