//! Independent oracles shared by the integration tests. Nothing here calls
//! the geometry helpers it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use horoprod_core::horoprod::HoroWindow;
use horoprod_core::{NodeIx, PointedTree, RootedTree, VertexId};

/// Every preorder offspring sequence of an ordered tree with `n` vertices.
pub fn ordered_trees(n: usize) -> Vec<Vec<u32>> {
    fn go(seq: &mut Vec<u32>, open: usize, left: usize, out: &mut Vec<Vec<u32>>) {
        if open == 0 {
            if left == 0 {
                out.push(seq.clone());
            }
            return;
        }
        if left == 0 {
            return;
        }
        // next vertex fills one open slot and opens k new ones
        for k in 0..left {
            if open - 1 + k > left - 1 {
                break;
            }
            seq.push(k as u32);
            go(seq, open - 1 + k, left - 1, out);
            seq.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 1, n, &mut out);
    out
}

/// Undirected adjacency lists of a preorder offspring sequence.
pub fn adjacency(offspring: &[u32]) -> Vec<Vec<usize>> {
    let n = offspring.len();
    let mut adj = vec![Vec::new(); n];
    let mut stack: Vec<(usize, u32)> = Vec::new();
    for (v, &k) in offspring.iter().enumerate() {
        if let Some(top) = stack.last_mut() {
            let p = top.0;
            top.1 -= 1;
            if top.1 == 0 {
                stack.pop();
            }
            adj[p].push(v);
            adj[v].push(p);
        }
        if k > 0 {
            stack.push((v, k));
        }
    }
    adj
}

/// Root-preserving isomorphism by backtracking over vertex bijections.
pub fn isomorphic(a: &[Vec<usize>], ra: usize, b: &[Vec<usize>], rb: usize) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[ra] = rb;
    used[rb] = true;
    let order: Vec<usize> = (0..n).filter(|&v| v != ra).collect();
    fn extend(
        i: usize,
        order: &[usize],
        a: &[Vec<usize>],
        b: &[Vec<usize>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        for w in 0..b.len() {
            if used[w] || a[v].len() != b[w].len() {
                continue;
            }
            let consistent = (0..a.len())
                .all(|u| map[u] == usize::MAX || a[v].contains(&u) == b[w].contains(&map[u]));
            if consistent {
                map[v] = w;
                used[w] = true;
                if extend(i + 1, order, a, b, map, used) {
                    return true;
                }
                map[v] = usize::MAX;
                used[w] = false;
            }
        }
        false
    }
    extend(0, &order, a, b, &mut map, &mut used)
}

/// Distance between two Ulam–Harris addresses.
pub fn address_distance(x: &VertexId, y: &VertexId) -> u32 {
    let lcp = x
        .path()
        .iter()
        .zip(y.path())
        .take_while(|(a, b)| a == b)
        .count();
    (x.depth() + y.depth() - 2 * lcp) as u32
}

/// Address of the `k`-th spine vertex.
pub fn spine_address(pt: &PointedTree, k: usize) -> VertexId {
    VertexId::new(pt.spine()[..k].to_vec())
}

/// `b(x) = d(x, ξ_D) - d(o, ξ_D)` with `ξ_D` the deepest spine vertex.
pub fn level_oracle(pt: &PointedTree, x: &VertexId) -> i64 {
    let far = spine_address(pt, pt.spine().len());
    i64::from(address_distance(x, &far)) - far.depth() as i64
}

/// Breadth-first layers of the explicit edge list.
pub fn bfs_layers(t: &RootedTree) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); t.len()];
    for line in t.edge_list().lines() {
        let mut it = line.split_whitespace().map(|s| s.parse::<usize>().unwrap());
        let (u, v) = (it.next().unwrap(), it.next().unwrap());
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![usize::MAX; t.len()];
    dist[0] = 0;
    let mut q = VecDeque::from([0]);
    let mut layers = vec![0usize; t.depth_limit() as usize + 1];
    while let Some(u) = q.pop_front() {
        layers[dist[u]] += 1;
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    layers
}

/// Window by brute force: all level-matched pairs reachable from the origin
/// through pairs of tree edges with opposite level changes. Returns vertex
/// pairs (preorder indices) and the number of edges.
pub fn brute_window(
    left: &PointedTree,
    right: &PointedTree,
    h: i64,
) -> (BTreeSet<(u32, u32)>, usize) {
    let level = |pt: &PointedTree, v: u32| level_oracle(pt, &pt.tree().address(NodeIx(v)));
    let lv: Vec<i64> = (0..left.tree().len() as u32)
        .map(|v| level(left, v))
        .collect();
    let rv: Vec<i64> = (0..right.tree().len() as u32)
        .map(|v| level(right, v))
        .collect();
    let nbrs = |t: &RootedTree, v: u32| -> Vec<u32> {
        let mut out: Vec<u32> = t.children(NodeIx(v)).to_vec();
        if let Some(p) = t.parent(NodeIx(v)) {
            out.push(p.0);
        }
        out
    };
    let mut seen = BTreeSet::from([(0u32, 0u32)]);
    let mut q = VecDeque::from([(0u32, 0u32)]);
    let mut edges = 0usize;
    while let Some((x, xr)) = q.pop_front() {
        for y in nbrs(left.tree(), x) {
            for yr in nbrs(right.tree(), xr) {
                let (dl, dr) = (
                    lv[y as usize] - lv[x as usize],
                    rv[yr as usize] - rv[xr as usize],
                );
                if dl + dr != 0 || lv[y as usize].abs() > h {
                    continue;
                }
                edges += 1;
                if seen.insert((y, yr)) {
                    q.push_back((y, yr));
                }
            }
        }
    }
    (seen, edges / 2)
}

/// Exact `p_{2k}(o, o)` for the walk killed on non-interior vertices, by
/// pushing the probability vector forward.
pub fn exact_returns(w: &HoroWindow, steps: u32) -> Vec<f64> {
    let n = w.len();
    let mut mass = vec![0.0; n];
    mass[0] = 1.0;
    let mut out = vec![1.0];
    for t in 1..=steps {
        let mut next = vec![0.0; n];
        for v in 0..n {
            if mass[v] == 0.0 || !w.is_interior(v as u32) {
                continue;
            }
            let nb = w.neighbors(v as u32);
            let share = mass[v] / nb.len() as f64;
            for &u in nb {
                next[u as usize] += share;
            }
        }
        mass = next;
        if t % 2 == 0 {
            out.push(mass[0]);
        }
    }
    out
}

/// Top eigenvalue of a small symmetric matrix by Jacobi rotations.
pub fn symmetric_top_eigenvalue(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Killed walk operator `D^{-1/2} A_I D^{-1/2}` on the interior of the
/// origin's interior component.
pub fn killed_operator(w: &HoroWindow) -> Vec<Vec<f64>> {
    let mut comp = BTreeMap::new();
    let mut q = VecDeque::new();
    if w.is_interior(0) {
        comp.insert(0u32, 0usize);
        q.push_back(0u32);
    }
    while let Some(v) = q.pop_front() {
        for &u in w.neighbors(v) {
            if w.is_interior(u) && !comp.contains_key(&u) {
                let k = comp.len();
                comp.insert(u, k);
                q.push_back(u);
            }
        }
    }
    let n = comp.len();
    let mut a = vec![vec![0.0; n]; n];
    for (&v, &i) in &comp {
        for &u in w.neighbors(v) {
            if let Some(&j) = comp.get(&u) {
                a[i][j] = 1.0 / (f64::from(w.degree_of(v)) * f64::from(w.degree_of(u))).sqrt();
            }
        }
    }
    a
}

/// Counts of each key.
pub fn tally<K: Ord>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, u64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

pub fn index_by_address(t: &RootedTree) -> HashMap<VertexId, NodeIx> {
    (0..t.len() as u32)
        .map(|v| (t.address(NodeIx(v)), NodeIx(v)))
        .collect()
}
