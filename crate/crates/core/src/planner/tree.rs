//! Search tree: UCB selection, heuristic expansion and backpropagation.

use rand::Rng;

use crate::kinematics::{ActionSpec, TraversalResult};
use crate::scalar::Scalar;
use crate::scoring::StageSnapshot;

use super::state::{sample_proportional, sampling_weights, Candidate, SimState};

/// UCB value of a child; unvisited children score `+inf`.
pub fn ucb<T: Scalar>(mean: T, visits: u32, parent_visits: u32, c: T) -> T {
    if visits == 0 {
        return T::infinity();
    }
    let ln_parent = T::from_u32(parent_visits.max(1)).unwrap().ln();
    mean + c * (ln_parent / T::from_u32(visits).unwrap()).sqrt()
}

#[derive(Debug, Clone)]
pub struct TreeNode<T> {
    pub state: SimState<T>,
    pub action: Option<ActionSpec>,
    /// Traversal that produced this node from its parent.
    pub traversal: Option<TraversalResult<T>>,
    pub parent: Option<usize>,
    /// Stage-wall snapshots crossed between the search root and this node.
    pub prefix: Vec<StageSnapshot<T>>,
    pub children: Vec<usize>,
    pub visits: u32,
    pub mean: T,
    /// Running mean of the rollouts' final gap closeness.
    pub closeness: T,
    /// Feasible, non-splitting actions not yet expanded, with their `H` values.
    /// `None` until first inspected.
    pub untried: Option<Vec<Candidate<T>>>,
    pub terminal: bool,
}

impl<T: Scalar> TreeNode<T> {
    pub fn new(state: SimState<T>, coverage_target: T) -> Self {
        let terminal = state.coverage() >= coverage_target;
        Self {
            state,
            action: None,
            traversal: None,
            parent: None,
            prefix: Vec::new(),
            children: Vec::new(),
            visits: 0,
            mean: T::zero(),
            closeness: T::zero(),
            untried: None,
            terminal,
        }
    }

    pub fn action_id(&self) -> u8 {
        self.action.map_or(0, |a| a.id)
    }

    /// No candidates were ever available here.
    pub fn is_dead_end(&self) -> bool {
        self.children.is_empty() && self.untried.as_ref().is_some_and(|u| u.is_empty())
    }
}

/// Arena-backed search tree.
#[derive(Debug, Clone)]
pub struct Tree<T> {
    pub nodes: Vec<TreeNode<T>>,
    pub root: usize,
}

impl<T: Scalar> Tree<T> {
    pub fn new(root: TreeNode<T>) -> Self {
        Self { nodes: vec![root], root: 0 }
    }

    pub fn node(&self, id: usize) -> &TreeNode<T> {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: usize) -> &mut TreeNode<T> {
        &mut self.nodes[id]
    }

    /// Child maximizing UCB; ties go to the smallest action id.
    pub fn best_ucb_child(&self, id: usize, c: T) -> Option<usize> {
        let parent_visits = self.nodes[id].visits;
        let mut best: Option<(usize, T)> = None;
        for &ch in &self.nodes[id].children {
            let n = &self.nodes[ch];
            let v = ucb(n.mean, n.visits, parent_visits, c);
            let better = match best {
                None => true,
                Some((b, bv)) => v > bv || (v == bv && n.action_id() < self.nodes[b].action_id()),
            };
            if better {
                best = Some((ch, v));
            }
        }
        best.map(|(ch, _)| ch)
    }

    /// Descends from the root by UCB until a node that still has untried
    /// actions, cannot be expanded, or has no children. `expandable` decides
    /// whether a node may grow and fills its untried set on first visit.
    pub fn select(&mut self, c: T, mut expandable: impl FnMut(&mut TreeNode<T>) -> bool) -> usize {
        let mut id = self.root;
        loop {
            if !expandable(&mut self.nodes[id]) {
                return id;
            }
            if self.nodes[id].untried.as_ref().is_some_and(|u| !u.is_empty()) {
                return id;
            }
            match self.best_ucb_child(id, c) {
                Some(ch) => id = ch,
                None => return id,
            }
        }
    }

    /// Samples one untried action with probability proportional to `H` and
    /// appends the resulting child. `crossings` yields the wall snapshots of
    /// the new edge.
    pub fn expand<R: Rng>(
        &mut self,
        id: usize,
        coverage_target: T,
        rng: &mut R,
        crossings: impl FnOnce(&SimState<T>, &SimState<T>) -> Vec<StageSnapshot<T>>,
    ) -> Option<usize> {
        let untried = self.nodes[id].untried.as_mut()?;
        let weights = sampling_weights(untried);
        let k = sample_proportional(&weights, rng)?;
        let cand = untried.remove(k);
        let mut state = self.nodes[id].state.clone();
        state.apply(&cand.traversal);
        let mut child = TreeNode::new(state, coverage_target);
        child.action = Some(cand.action());
        child.traversal = Some(cand.traversal);
        child.parent = Some(id);
        child.prefix = self.nodes[id].prefix.clone();
        child.prefix.extend(crossings(&self.nodes[id].state, &child.state));
        let cid = self.nodes.len();
        self.nodes.push(child);
        self.nodes[id].children.push(cid);
        Some(cid)
    }

    /// Adds `score` to every node from `leaf` up to the root.
    pub fn backpropagate(&mut self, leaf: usize, score: T, closeness: T) {
        let mut cur = Some(leaf);
        while let Some(id) = cur {
            let n = &mut self.nodes[id];
            n.visits += 1;
            let k = T::from_u32(n.visits).unwrap();
            n.mean = n.mean + (score - n.mean) / k;
            n.closeness = n.closeness + (closeness - n.closeness) / k;
            if id == self.root {
                break;
            }
            cur = n.parent;
        }
    }

    /// Root child with the highest mean score. Ties prefer rollouts that end
    /// closer to uncovered gaps, then more visits, then the smaller action id.
    pub fn best_child(&self) -> Option<usize> {
        let kids = &self.nodes[self.root].children;
        kids.iter().copied().reduce(|a, b| {
            let (na, nb) = (&self.nodes[a], &self.nodes[b]);
            let key = |n: &TreeNode<T>| (n.mean, n.closeness, n.visits);
            let (ka, kb) = (key(na), key(nb));
            let b_better = kb.0 > ka.0
                || (kb.0 == ka.0
                    && (kb.1 > ka.1
                        || (kb.1 == ka.1
                            && (kb.2 > ka.2 || (kb.2 == ka.2 && nb.action_id() < na.action_id())))));
            if b_better {
                b
            } else {
                a
            }
        })
    }

    /// Makes `child` the new root, keeping its subtree and statistics.
    pub fn promote(&mut self, child: usize) {
        self.nodes[child].parent = None;
        self.root = child;
    }
}
