//! Hypothesis classes: threshold stumps, bounded-depth axis-test decision
//! trees, and single-leaf line trees, together with enumeration, error and
//! distance evaluation on a fixed dataset.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::GridDataset;
use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// Stump h classifies x as 1 iff x >= X_h, with the sentinel X_0 = -inf.
/// `index` lives in {0, ..., n} for a dataset of n sorted points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stump {
    pub index: usize,
}

/// Axis-test tree node. A point routes to `yes` iff threshold <= x[dim].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode {
    Leaf { label: bool },
    Split {
        dim: usize,
        threshold: f64,
        no: Box<TreeNode>,
        yes: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn height(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { no, yes, .. } => 1 + no.height().max(yes.height()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { no, yes, .. } => no.leaf_count() + yes.leaf_count(),
        }
    }

    /// (leaf index in no-first depth-first order, leaf label) for `x`.
    pub fn route(&self, x: &[f64]) -> (usize, bool) {
        let mut node = self;
        let mut base = 0usize;
        loop {
            match node {
                TreeNode::Leaf { label } => return (base, *label),
                TreeNode::Split {
                    dim,
                    threshold,
                    no,
                    yes,
                } => {
                    if *threshold <= x[*dim] {
                        base += no.leaf_count();
                        node = yes;
                    } else {
                        node = no;
                    }
                }
            }
        }
    }

    fn max_dim(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { dim, no, yes, .. } => (*dim + 1).max(no.max_dim()).max(yes.max_dim()),
        }
    }

    /// True when no root-to-leaf path tests the same dimension twice.
    pub fn unique_dims_per_path(&self) -> bool {
        fn rec(node: &TreeNode, used: &mut Vec<usize>) -> bool {
            match node {
                TreeNode::Leaf { .. } => true,
                TreeNode::Split { dim, no, yes, .. } => {
                    if used.contains(dim) {
                        return false;
                    }
                    used.push(*dim);
                    let ok = rec(no, used) && rec(yes, used);
                    used.pop();
                    ok
                }
            }
        }
        rec(self, &mut Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
}

/// Agrees with `base` exactly on points reaching leaf `leaf`, and outputs
/// the opposite of that leaf's label everywhere else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineTree {
    pub base: DecisionTree,
    pub leaf: usize,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hypothesis {
    Stump(Stump),
    Tree(DecisionTree),
    LineTree(LineTree),
}

impl Hypothesis {
    /// Evaluate on an arbitrary point. Stumps resolve their cut value
    /// against the dataset's sorted positions (X_0 = -inf).
    pub fn eval(&self, ds: &GridDataset, x: &[f64]) -> Result<bool> {
        match self {
            Hypothesis::Stump(s) => {
                if x.len() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: x.len(),
                    });
                }
                if s.index > ds.n() {
                    return Err(Error::IndexOutOfRange {
                        index: s.index,
                        len: ds.n() + 1,
                    });
                }
                Ok(s.index == 0 || x[0] >= ds.point(s.index - 1)[0])
            }
            Hypothesis::Tree(t) => {
                if x.len() < t.root.max_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: t.root.max_dim(),
                        got: x.len(),
                    });
                }
                Ok(t.root.route(x).1)
            }
            Hypothesis::LineTree(lt) => {
                if x.len() < lt.base.root.max_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: lt.base.root.max_dim(),
                        got: x.len(),
                    });
                }
                let (leaf, _) = lt.base.root.route(x);
                Ok(if leaf == lt.leaf { lt.label } else { !lt.label })
            }
        }
    }

    /// The labeling this hypothesis induces on every dataset point.
    pub fn labeling(&self, ds: &GridDataset) -> Result<Labeling> {
        // stump fast path: positions >= index are labeled 1
        if let Hypothesis::Stump(s) = self {
            if s.index > ds.n() {
                return Err(Error::IndexOutOfRange {
                    index: s.index,
                    len: ds.n() + 1,
                });
            }
            return Ok(Labeling::from_fn(ds.n(), |i| i + 1 >= s.index));
        }
        let mut l = Labeling::zeros(ds.n());
        for i in 0..ds.n() {
            l.set(i, self.eval(ds, ds.point(i))?);
        }
        Ok(l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassKind {
    Stump,
    Tree { depth: usize, unique_dims: bool },
    LineTree { depth: usize, unique_dims: bool },
}

/// A canonical, deduplicated hypothesis class over a fixed dataset: no two
/// members induce the same labeling.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    kind: ClassKind,
    members: Vec<Hypothesis>,
    labelings: Vec<Labeling>,
    n: usize,
}

impl HypothesisClass {
    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &Hypothesis {
        &self.members[i]
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn labeling(&self, i: usize) -> &Labeling {
        &self.labelings[i]
    }

    pub fn labelings(&self) -> &[Labeling] {
        &self.labelings
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Index of the first member whose labeling is all zeros, if any.
    pub fn all_zero_member(&self) -> Option<usize> {
        self.labelings.iter().position(|l| l.count_ones() == 0)
    }

    /// Debug dump of members as JSON.
    pub fn dump_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.members)?)
    }

    /// Subclass containing only the given member indices, in order.
    pub fn restrict(&self, idxs: &[usize]) -> HypothesisClass {
        HypothesisClass {
            kind: self.kind,
            members: idxs.iter().map(|&i| self.members[i].clone()).collect(),
            labelings: idxs.iter().map(|&i| self.labelings[i].clone()).collect(),
            n: self.n,
        }
    }
}

/// The n+1 stumps {0, ..., n}. Distinct sorted points make every labeling
/// distinct, so no dedup occurs.
pub fn enumerate_stumps(n: usize) -> Result<HypothesisClass> {
    if n < 1 {
        return Err(Error::InvalidParameter("enumerate_stumps requires n >= 1".into()));
    }
    let members: Vec<Hypothesis> = (0..=n)
        .map(|i| Hypothesis::Stump(Stump { index: i }))
        .collect();
    let labelings = (0..=n)
        .map(|h| Labeling::from_fn(n, |i| i + 1 >= h))
        .collect();
    Ok(HypothesisClass {
        kind: ClassKind::Stump,
        members,
        labelings,
        n,
    })
}

/// All labelings realizable by height-<= depth trees over canonical
/// thresholds (realized coordinate values plus one sentinel above the
/// maximum), deduplicated by labeling vector. One representative tree is
/// kept per labeling, members sorted by labeling for a canonical order.
pub fn enumerate_trees(
    ds: &GridDataset,
    depth: usize,
    unique_dims: bool,
    max_members: usize,
) -> Result<HypothesisClass> {
    let idxs: Vec<usize> = (0..ds.n()).collect();
    let mut used = vec![false; ds.dim()];
    let variants = enumerate_sub(ds, &idxs, depth, &mut used, unique_dims, max_members)?;
    let mut pairs: Vec<(Labeling, TreeNode)> = variants.into_iter().map(|(l, t)| (l, t)).collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (labelings, members): (Vec<_>, Vec<_>) = pairs
        .into_iter()
        .map(|(l, t)| (l, Hypothesis::Tree(DecisionTree { root: t })))
        .unzip();
    Ok(HypothesisClass {
        kind: ClassKind::Tree {
            depth,
            unique_dims,
        },
        members,
        labelings,
        n: ds.n(),
    })
}

fn enumerate_sub(
    ds: &GridDataset,
    idxs: &[usize],
    depth: usize,
    used: &mut Vec<bool>,
    unique_dims: bool,
    cap: usize,
) -> Result<HashMap<Labeling, TreeNode>> {
    let mut out: HashMap<Labeling, TreeNode> = HashMap::new();
    let zeros = Labeling::zeros(ds.n());
    let mut ones = Labeling::zeros(ds.n());
    for &i in idxs {
        ones.set(i, true);
    }
    out.insert(zeros, TreeNode::Leaf { label: false });
    out.insert(ones, TreeNode::Leaf { label: true });

    if depth == 0 || idxs.len() <= 1 {
        // splitting a single point cannot produce a new labeling
        return Ok(out);
    }
    for dim in 0..ds.dim() {
        if unique_dims && used[dim] {
            continue;
        }
        let mut thresholds = ds.distinct_values(dim, idxs);
        if let Some(&max) = thresholds.last() {
            thresholds.push(max + 1.0);
        }
        for t in thresholds {
            let (no_idx, yes_idx): (Vec<usize>, Vec<usize>) =
                idxs.iter().partition(|&&i| ds.point(i)[dim] < t);
            used[dim] = true;
            let no_set = enumerate_sub(ds, &no_idx, depth - 1, used, unique_dims, cap);
            let yes_set = no_set
                .and_then(|ns| Ok((ns, enumerate_sub(ds, &yes_idx, depth - 1, used, unique_dims, cap)?)));
            used[dim] = false;
            let (no_set, yes_set) = yes_set?;
            for (nl, nt) in &no_set {
                for (yl, yt) in &yes_set {
                    let mut combined = nl.clone();
                    combined.or_assign(yl);
                    out.entry(combined).or_insert_with(|| TreeNode::Split {
                        dim,
                        threshold: t,
                        no: Box::new(nt.clone()),
                        yes: Box::new(yt.clone()),
                    });
                    if out.len() > cap {
                        return Err(Error::BudgetExceeded(format!(
                            "tree class exceeds member cap {cap}"
                        )));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One line tree per leaf of `tree`, in depth-first leaf order.
pub fn line_trees_of(tree: &DecisionTree) -> Vec<LineTree> {
    fn labels(node: &TreeNode, out: &mut Vec<bool>) {
        match node {
            TreeNode::Leaf { label } => out.push(*label),
            TreeNode::Split { no, yes, .. } => {
                labels(no, out);
                labels(yes, out);
            }
        }
    }
    let mut leaf_labels = Vec::new();
    labels(&tree.root, &mut leaf_labels);
    leaf_labels
        .into_iter()
        .enumerate()
        .map(|(leaf, label)| LineTree {
            base: tree.clone(),
            leaf,
            label,
        })
        .collect()
}

/// Line-tree class induced by the representative trees of a tree class,
/// deduplicated by labeling.
pub fn enumerate_line_trees(
    ds: &GridDataset,
    depth: usize,
    unique_dims: bool,
    max_members: usize,
) -> Result<HypothesisClass> {
    let trees = enumerate_trees(ds, depth, unique_dims, max_members)?;
    let mut seen: HashMap<Labeling, Hypothesis> = HashMap::new();
    for m in trees.members() {
        let Hypothesis::Tree(t) = m else { continue };
        for lt in line_trees_of(t) {
            let h = Hypothesis::LineTree(lt);
            let l = h.labeling(ds)?;
            seen.entry(l).or_insert(h);
            if seen.len() > max_members {
                return Err(Error::BudgetExceeded(format!(
                    "line-tree class exceeds member cap {max_members}"
                )));
            }
        }
    }
    let mut pairs: Vec<(Labeling, Hypothesis)> = seen.into_iter().collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (labelings, members) = pairs.into_iter().unzip();
    Ok(HypothesisClass {
        kind: ClassKind::LineTree {
            depth,
            unique_dims,
        },
        members,
        labelings,
        n: ds.n(),
    })
}

/// Fraction of `subset` (0-based positions) where `h` disagrees with `labels`.
pub fn err(
    h: &Hypothesis,
    ds: &GridDataset,
    subset: &[usize],
    labels: &Labeling,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySet("err over empty subset"));
    }
    let mut wrong = 0usize;
    for &i in subset {
        if h.eval(ds, ds.point(i))? != labels.get(i) {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / subset.len() as f64)
}

/// Fraction of `subset` where two hypotheses disagree.
pub fn distance(
    h1: &Hypothesis,
    h2: &Hypothesis,
    ds: &GridDataset,
    subset: &[usize],
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySet("distance over empty subset"));
    }
    let mut diff = 0usize;
    for &i in subset {
        if h1.eval(ds, ds.point(i))? != h2.eval(ds, ds.point(i))? {
            diff += 1;
        }
    }
    Ok(diff as f64 / subset.len() as f64)
}
