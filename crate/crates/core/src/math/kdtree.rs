//! Static 3-d kd-tree for k-nearest-neighbour queries over velocity clouds.

use crate::Vec3;
use alloc::vec::Vec;

#[allow(unused_imports)]
use super::real::Real;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, Copy)]
enum Node {
    /// Split along `axis` at `value`; children at `left` and `left + 1`
    /// in the node arena is not possible with median splits, so both ids
    /// are stored explicitly.
    Split { axis: u8, value: f64, left: u32, right: u32 },
    Leaf { start: u32, end: u32 },
}

/// A balanced kd-tree over a fixed point set. Point indices returned by
/// queries refer to the slice the tree was built from.
#[derive(Debug)]
pub struct KdTree {
    pts: Vec<Vec3>,
    order: Vec<u32>,
    nodes: Vec<Node>,
    root: u32,
}

impl KdTree {
    pub fn build(pts: &[Vec3]) -> KdTree {
        let mut order: Vec<u32> = (0..pts.len() as u32).collect();
        let mut tree = KdTree { pts: pts.to_vec(), order: Vec::new(), nodes: Vec::new(), root: 0 };
        let root = if pts.is_empty() {
            tree.nodes.push(Node::Leaf { start: 0, end: 0 });
            0
        } else {
            let n = pts.len();
            tree.build_rec(&mut order, 0, n)
        };
        tree.order = order;
        tree.root = root;
        tree
    }

    fn build_rec(&mut self, order: &mut [u32], start: usize, end: usize) -> u32 {
        let len = end - start;
        if len <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start: start as u32, end: end as u32 });
            return (self.nodes.len() - 1) as u32;
        }
        // Split along the axis of largest extent at the median point.
        let slice = &mut order[start..end];
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in slice.iter() {
            let p = self.pts[i as usize];
            for (a, c) in [p.x, p.y, p.z].into_iter().enumerate() {
                lo[a] = lo[a].min(c);
                hi[a] = hi[a].max(c);
            }
        }
        let mut axis = 0;
        for a in 1..3 {
            if hi[a] - lo[a] > hi[axis] - lo[axis] {
                axis = a;
            }
        }
        let mid = len / 2;
        let pts = &self.pts;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            let pa = coord(pts[a as usize], axis);
            let pb = coord(pts[b as usize], axis);
            pa.partial_cmp(&pb).unwrap_or(core::cmp::Ordering::Equal)
        });
        let split_value = coord(self.pts[slice[mid] as usize], axis);
        let node_id = self.nodes.len() as u32;
        self.nodes.push(Node::Leaf { start: 0, end: 0 }); // placeholder
        let left = self.build_rec(order, start, start + mid);
        let right = self.build_rec(order, start + mid, end);
        self.nodes[node_id as usize] = Node::Split { axis: axis as u8, value: split_value, left, right };
        node_id
    }

    /// Squared distance to the `k`-th nearest neighbour of `query`,
    /// excluding the point with index `exclude` (pass `u32::MAX` to keep
    /// all points). Returns `None` when fewer than `k` candidates exist.
    pub fn knn_distance_sq(&self, query: Vec3, k: usize, exclude: u32) -> Option<f64> {
        if k == 0 {
            return None;
        }
        let mut best = Best::new(k);
        self.search(self.root, query, exclude, &mut best);
        best.full().then(|| best.worst())
    }

    fn search(&self, node: u32, q: Vec3, exclude: u32, best: &mut Best) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start as usize..end as usize] {
                    if i == exclude {
                        continue;
                    }
                    let d = (self.pts[i as usize] - q).norm_sq();
                    best.offer(d);
                }
            }
            Node::Split { axis, value, left, right } => {
                let qa = coord(q, axis as usize);
                let (near, far) = if qa < value { (left, right) } else { (right, left) };
                self.search(near, q, exclude, best);
                let plane = qa - value;
                if !best.full() || plane * plane < best.worst() {
                    self.search(far, q, exclude, best);
                }
            }
        }
    }
}

fn coord(p: Vec3, axis: usize) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

/// Fixed-capacity max-list of the k smallest squared distances.
struct Best {
    dists: Vec<f64>,
    k: usize,
}

impl Best {
    fn new(k: usize) -> Best {
        Best { dists: Vec::with_capacity(k), k }
    }
    fn full(&self) -> bool {
        self.dists.len() == self.k
    }
    fn worst(&self) -> f64 {
        self.dists[self.dists.len() - 1]
    }
    fn offer(&mut self, d: f64) {
        if self.full() && d >= self.worst() {
            return;
        }
        let pos = self.dists.partition_point(|&x| x < d);
        if self.full() {
            self.dists.pop();
        }
        self.dists.insert(pos, d);
    }
}
