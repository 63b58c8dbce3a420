//! Staged scenario trees.
//!
//! Node probabilities are absolute (unconditional). Stage 0 holds the single root,
//! where investment decisions are taken; operational time steps exist only in
//! stages >= 1.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::validation::ValidationReport;

const PROB_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub stage: usize,
    pub probability: f64,
    /// Label binding the node to its rows in the series table.
    pub data_key: String,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TreeError {
    #[error("branching specification is empty")]
    EmptySpec,
    #[error("conditional probabilities of stage {stage} (branching at node {node}) sum to {sum}")]
    ProbabilityNotNormalized {
        stage: usize,
        node: NodeId,
        sum: f64,
    },
    #[error("conditional probability {value} of stage {stage} is outside (0, 1]")]
    InvalidProbability { stage: usize, value: f64 },
    #[error("node {node} is in stage {node_stage}; no ancestor in stage {stage}")]
    StageOutOfRange {
        node: NodeId,
        node_stage: usize,
        stage: usize,
    },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("malformed tree: {0}")]
    Structure(String),
}

/// Branch counts and conditional probabilities per stage. Every branching point
/// of a stage uses the same conditional distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub stages: Vec<Vec<f64>>,
}

impl BranchSpec {
    pub fn uniform(branches: &[usize]) -> Self {
        BranchSpec {
            stages: branches.iter().map(|&b| vec![1.0 / b as f64; b]).collect(),
        }
    }

    pub fn new(stages: Vec<Vec<f64>>) -> Self {
        BranchSpec { stages }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioTree {
    nodes: Vec<NodeRecord>,
    children: Vec<Vec<NodeId>>,
    stage_count: usize,
    steps_per_stage: usize,
    root: NodeId,
}

impl ScenarioTree {
    /// Assembles a tree from explicit records. Only structural soundness is
    /// checked here (dense ids, existing parents, a single root); probability
    /// invariants are reported by [`validate_tree`].
    pub fn from_nodes(nodes: Vec<NodeRecord>, steps_per_stage: usize) -> Result<Self, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::Structure("no nodes".into()));
        }
        let mut root = None;
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if n.id.0 != i {
                return Err(TreeError::Structure(format!(
                    "node at position {i} has id {}",
                    n.id
                )));
            }
            match n.parent {
                None => {
                    if root.replace(n.id).is_some() {
                        return Err(TreeError::Structure("more than one root".into()));
                    }
                }
                Some(p) => {
                    if p.0 >= nodes.len() || p == n.id {
                        return Err(TreeError::Structure(format!(
                            "node {} has invalid parent {p}",
                            n.id
                        )));
                    }
                    children[p.0].push(n.id);
                }
            }
        }
        let root = root.ok_or_else(|| TreeError::Structure("no root".into()))?;
        let stage_count = nodes.iter().map(|n| n.stage).max().unwrap_or(0) + 1;
        Ok(ScenarioTree {
            nodes,
            children,
            stage_count,
            steps_per_stage,
            root,
        })
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeRecord {
        &self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn stage_count(&self) -> usize {
        self.stage_count
    }

    pub fn steps_per_stage(&self) -> usize {
        self.steps_per_stage
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.0]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.children[id.0].is_empty()
    }

    pub fn nodes_at_stage(&self, stage: usize) -> impl Iterator<Item = &NodeRecord> {
        self.nodes.iter().filter(move |n| n.stage == stage)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &NodeRecord> {
        self.nodes
            .iter()
            .filter(|n| self.children[n.id.0].is_empty())
    }

    /// Probability of `id` given its parent.
    pub fn conditional_probability(&self, id: NodeId) -> f64 {
        match self.parent(id) {
            Some(p) => self.node(id).probability / self.node(p).probability,
            None => self.node(id).probability,
        }
    }

    /// Nodes from the root down to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The unique ancestor of `node` in `stage` (the node itself when the stages match).
    pub fn ancestor_at_stage(&self, node: NodeId, stage: usize) -> Result<NodeId, TreeError> {
        let rec = self.nodes.get(node.0).ok_or(TreeError::UnknownNode(node))?;
        if stage > rec.stage {
            return Err(TreeError::StageOutOfRange {
                node,
                node_stage: rec.stage,
                stage,
            });
        }
        let mut cur = node;
        while self.nodes[cur.0].stage > stage {
            cur = self.nodes[cur.0]
                .parent
                .ok_or_else(|| TreeError::Structure(format!("node {cur} has no parent")))?;
        }
        if self.nodes[cur.0].stage != stage {
            return Err(TreeError::Structure(format!(
                "stages along the path to {node} skip stage {stage}"
            )));
        }
        Ok(cur)
    }

    /// Edge list as delimited text: `node,parent,stage,probability,data_key`.
    pub fn to_edge_table(&self) -> String {
        let mut out = String::from("node,parent,stage,probability,data_key\n");
        for n in &self.nodes {
            let parent = n.parent.map(|p| p.0.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                n.id, parent, n.stage, n.probability, n.data_key
            );
        }
        out
    }
}

/// Builds the full tree for `spec`, numbering nodes stage by stage. Data keys are
/// path labels: `root`, then zero-based branch indices joined by dots (`0`, `0.1`, ...).
pub fn build_tree(spec: &BranchSpec, steps_per_stage: usize) -> Result<ScenarioTree, TreeError> {
    if spec.stages.is_empty() || spec.stages.iter().any(Vec::is_empty) {
        return Err(TreeError::EmptySpec);
    }
    let mut nodes = vec![NodeRecord {
        id: NodeId(0),
        parent: None,
        stage: 0,
        probability: 1.0,
        data_key: "root".into(),
    }];
    let mut frontier = vec![NodeId(0)];
    let mut labels = vec![String::new()];
    for (k, probs) in spec.stages.iter().enumerate() {
        let stage = k + 1;
        for &p in probs {
            if !(p > 0.0 && p <= 1.0) {
                return Err(TreeError::InvalidProbability { stage, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(TreeError::ProbabilityNotNormalized {
                stage,
                node: frontier[0],
                sum,
            });
        }
        let mut next = Vec::with_capacity(frontier.len() * probs.len());
        let mut next_labels = Vec::with_capacity(next.capacity());
        for (parent, label) in frontier.iter().zip(&labels) {
            let base = nodes[parent.0].probability;
            for (b, &p) in probs.iter().enumerate() {
                let id = NodeId(nodes.len());
                let lab = if label.is_empty() {
                    b.to_string()
                } else {
                    format!("{label}.{b}")
                };
                nodes.push(NodeRecord {
                    id,
                    parent: Some(*parent),
                    stage,
                    probability: base * p,
                    data_key: lab.clone(),
                });
                next.push(id);
                next_labels.push(lab);
            }
        }
        frontier = next;
        labels = next_labels;
    }
    ScenarioTree::from_nodes(nodes, steps_per_stage)
}

/// Checks every tree invariant and lists the violations.
pub fn validate_tree(tree: &ScenarioTree) -> ValidationReport {
    let mut report = ValidationReport::new();
    let root = tree.node(tree.root());
    if root.stage != 0 {
        report.push(
            "tree.root_stage",
            format!("root {} is in stage {}", root.id, root.stage),
        );
    }
    for n in tree.nodes() {
        if !(n.probability > 0.0 && n.probability <= 1.0 + PROB_TOL) {
            report.push(
                "tree.probability",
                format!("node {} has probability {}", n.id, n.probability),
            );
        }
        if n.data_key.is_empty() {
            report.push(
                "tree.data_key",
                format!("node {} has an empty data key", n.id),
            );
        }
        if let Some(p) = n.parent {
            let ps = tree.node(p).stage;
            if n.stage != ps + 1 {
                report.push(
                    "tree.stage_gap",
                    format!(
                        "node {} is in stage {} but its parent {p} is in stage {ps}",
                        n.id, n.stage
                    ),
                );
            }
        }
        let kids = tree.children(n.id);
        if kids.is_empty() {
            if n.stage + 1 != tree.stage_count() {
                report.push(
                    "tree.short_leaf",
                    format!(
                        "leaf {} ends in stage {} of {}",
                        n.id,
                        n.stage,
                        tree.stage_count()
                    ),
                );
            }
        } else {
            let sum: f64 = kids.iter().map(|c| tree.node(*c).probability).sum();
            if (sum - n.probability).abs() > PROB_TOL {
                report.push(
                    "tree.parent_sum",
                    format!(
                        "node {} has probability {} but its children sum to {sum}",
                        n.id, n.probability
                    ),
                );
            }
        }
    }
    for s in 0..tree.stage_count() {
        let mut count = 0;
        let sum: f64 = tree
            .nodes_at_stage(s)
            .inspect(|_| count += 1)
            .map(|n| n.probability)
            .sum();
        if count == 0 {
            report.push("tree.empty_stage", format!("stage {s} has no nodes"));
        } else if (sum - 1.0).abs() > PROB_TOL {
            report.push(
                "tree.stage_sum",
                format!("stage {s} probabilities sum to {sum}"),
            );
        }
    }
    report
}
