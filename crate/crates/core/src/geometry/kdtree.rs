use nalgebra::Vector3;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static 3D kd-tree over a point list. Query results refer to indices into
/// the slice the tree was built from.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Vector3<f64>>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn build(points: &[Vector3<f64>]) -> Self {
        let mut tree = Self {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build_node(0, points.len());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for &i in &self.order[start..end] {
            lo = lo.inf(&self.points[i]);
            hi = hi.sup(&self.points[i]);
        }
        let axis = (hi - lo).imax();
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][axis].total_cmp(&points[b][axis])
        });
        let value = self.points[self.order[mid]][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Indices of all points within `radius` (inclusive) of `query`, sorted.
    pub fn within(&self, query: &Vector3<f64>, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.is_empty() {
            self.within_node(0, query, radius, radius * radius, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn within_node(&self, id: usize, q: &Vector3<f64>, r: f64, r2: f64, out: &mut Vec<usize>) {
        match self.nodes[id] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if (self.points[i] - q).norm_squared() <= r2 {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                if q[axis] - r <= value {
                    self.within_node(left, q, r, r2, out);
                }
                if q[axis] + r >= value {
                    self.within_node(right, q, r, r2, out);
                }
            }
        }
    }

    /// Closest point to `query` as `(index, squared distance)`; ties go to
    /// the lowest index.
    pub fn nearest(&self, query: &Vector3<f64>) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_node(0, query, &mut best);
        Some(best)
    }

    fn nearest_node(&self, id: usize, q: &Vector3<f64>, best: &mut (usize, f64)) {
        match self.nodes[id] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d2 = (self.points[i] - q).norm_squared();
                    if d2 < best.1 || (d2 == best.1 && i < best.0) {
                        *best = (i, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_node(near, q, best);
                if diff * diff <= best.1 {
                    self.nearest_node(far, q, best);
                }
            }
        }
    }
}
