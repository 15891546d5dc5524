//! CART regression tree: greedy binary splits minimizing total squared
//! error, leaf prediction by mean.
//!
//! Candidate thresholds sit at midpoints of adjacent sorted predictor values.
//! A node splits only if some candidate strictly reduces the summed squared
//! error and leaves at least `min_leaf` rows on each side; ties go to the
//! lowest feature index, then the lowest threshold.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeLimits {
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeLimits {
    fn default() -> Self {
        TreeLimits {
            min_leaf: 5,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
        count: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A fitted regression tree stored as an arena; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    pub limits: TreeLimits,
}

impl TreeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// The root split, if the tree is not a single leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first() {
            Some(TreeNode::Split {
                feature, threshold, ..
            }) => Some((*feature, *threshold)),
            _ => None,
        }
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    sse: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn node_sse(indices: &[usize], y: &[f64]) -> f64 {
    let n = indices.len() as f64;
    let sum: f64 = indices.iter().map(|&i| y[i]).sum();
    let sumsq: f64 = indices.iter().map(|&i| y[i] * y[i]).sum();
    (sumsq - sum * sum / n).max(0.0)
}

fn best_split(indices: &[usize], x: &[Vec<f64>], y: &[f64], min_leaf: usize) -> Option<BestSplit> {
    let n = indices.len();
    if n < 2 * min_leaf {
        return None;
    }
    let p = x[indices[0]].len();
    let parent_sse = node_sse(indices, y);
    let mut best: Option<BestSplit> = None;

    for feature in 0..p {
        let mut order = indices.to_vec();
        order.sort_by(|&a, &b| {
            x[a][feature]
                .partial_cmp(&x[b][feature])
                .unwrap()
                .then(a.cmp(&b))
        });

        // Prefix sums over the sorted order.
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let total_sum: f64 = order.iter().map(|&i| y[i]).sum();
        let total_sumsq: f64 = order.iter().map(|&i| y[i] * y[i]).sum();

        for s in 1..n {
            let prev = order[s - 1];
            sum += y[prev];
            sumsq += y[prev] * y[prev];
            if s < min_leaf || n - s < min_leaf {
                continue;
            }
            let lo = x[prev][feature];
            let hi = x[order[s]][feature];
            if lo == hi {
                continue;
            }
            let nl = s as f64;
            let nr = (n - s) as f64;
            let sse_left = (sumsq - sum * sum / nl).max(0.0);
            let sse_right = ((total_sumsq - sumsq) - (total_sum - sum).powi(2) / nr).max(0.0);
            let sse = sse_left + sse_right;
            if best.as_ref().is_none_or(|b| sse < b.sse) {
                // Midpoint threshold; fall back to the lower value when the
                // midpoint rounds up to `hi`, so `x <= threshold` reproduces
                // the positional split exactly.
                let mid = lo + (hi - lo) * 0.5;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(BestSplit {
                    feature,
                    threshold,
                    sse,
                    left: order[..s].to_vec(),
                    right: order[s..].to_vec(),
                });
            }
        }
    }

    best.filter(|b| b.sse < parent_sse)
}

/// Grow a tree on `n × p` predictors and `n` targets.
pub fn fit_tree(x: &[Vec<f64>], y: &[f64], limits: &TreeLimits) -> Result<TreeModel> {
    let n = y.len();
    if x.len() != n || n == 0 {
        return Err(Error::Fit(format!(
            "predictor rows ({}) and targets ({n}) must agree and be non-empty",
            x.len()
        )));
    }
    if limits.min_leaf == 0 {
        return Err(Error::Fit("min_leaf must be ≥ 1".into()));
    }

    let mut nodes: Vec<TreeNode> = Vec::new();
    // Explicit work stack keeps degenerate chains off the call stack.
    let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    nodes.push(TreeNode::Leaf { value: 0.0, count: 0 });
    stack.push((0, (0..n).collect(), 0));

    while let Some((slot, indices, depth)) = stack.pop() {
        let depth_ok = limits.max_depth.is_none_or(|d| depth < d);
        let split = if depth_ok {
            best_split(&indices, x, y, limits.min_leaf)
        } else {
            None
        };
        match split {
            Some(b) => {
                let left_slot = nodes.len();
                nodes.push(TreeNode::Leaf { value: 0.0, count: 0 });
                let right_slot = nodes.len();
                nodes.push(TreeNode::Leaf { value: 0.0, count: 0 });
                nodes[slot] = TreeNode::Split {
                    feature: b.feature,
                    threshold: b.threshold,
                    left: left_slot,
                    right: right_slot,
                };
                stack.push((right_slot, b.right, depth + 1));
                stack.push((left_slot, b.left, depth + 1));
            }
            None => {
                let count = indices.len();
                let value = indices.iter().map(|&i| y[i]).sum::<f64>() / count as f64;
                nodes[slot] = TreeNode::Leaf { value, count };
            }
        }
    }

    Ok(TreeModel {
        nodes,
        limits: *limits,
    })
}
