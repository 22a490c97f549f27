//! R-vine structure selection, sequential estimation with truncation, joint
//! log-density, and inverse-Rosenblatt sampling.
//!
//! Structure selection follows the greedy tree-by-tree heuristic: maximum
//! spanning trees under |Kendall's tau| edge weights, restricted by the
//! proximity condition, with pseudo-observations propagated through the
//! h-functions of the trees already fitted. Selection and fitting are
//! interleaved; trees beyond the truncation level keep their selected shape
//! but carry independence copulas.

mod sampling;

pub use sampling::standard_uniform_matrix;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bicop::{self, BivariateCopula, CopulaFamily};
use crate::error::{Error, Result};
use crate::marginals::{fit_marginal, KernelMarginal, UNIT_CLAMP};

/// Empirical Kendall's tau: (concordant - discordant) / (n choose 2), with
/// tied pairs counted as neither.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "kendall_tau inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::DegenerateInput("kendall_tau needs n >= 2".into()));
    }
    let x_const = x.iter().all(|&v| v == x[0]);
    let y_const = y.iter().all(|&v| v == y[0]);
    if x_const || y_const {
        return Err(Error::DegenerateInput(
            "kendall_tau is undefined for a constant column".into(),
        ));
    }
    let (conc, disc) = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut c = 0i64;
            let mut d = 0i64;
            for j in i + 1..n {
                let s = (x[i] - x[j]) * (y[i] - y[j]);
                if s > 0.0 {
                    c += 1;
                } else if s < 0.0 {
                    d += 1;
                }
            }
            (c, d)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((conc - disc) as f64 / (n as f64 * (n as f64 - 1.0) / 2.0))
}

/// One edge of a vine tree: a conditioned pair and its conditioning set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VineEdge {
    /// Conditioned pair, ascending.
    pub conditioned: (usize, usize),
    /// Conditioning set, ascending.
    pub conditioning: Vec<usize>,
    /// Indices into the previous tree's edge list: `parents.0` contains
    /// `conditioned.0` in its complete union, `parents.1` contains
    /// `conditioned.1`. Rebuilt after deserialization.
    #[serde(skip)]
    pub(crate) parents: Option<(usize, usize)>,
}

impl VineEdge {
    /// Complete union: conditioned pair plus conditioning set, sorted.
    pub fn complete_union(&self) -> Vec<usize> {
        let mut n = self.conditioning.clone();
        n.push(self.conditioned.0);
        n.push(self.conditioned.1);
        n.sort_unstable();
        n
    }

    fn contains(&self, var: usize) -> bool {
        self.conditioned.0 == var
            || self.conditioned.1 == var
            || self.conditioning.contains(&var)
    }
}

/// A sequence of d-1 nested trees satisfying the vine conditions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RVineStructure {
    d: usize,
    trees: Vec<Vec<VineEdge>>,
}

/// First violated vine condition, with 1-based tree index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureViolation {
    pub tree: usize,
    pub edge: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.edge {
            Some(e) => write!(f, "tree {} edge {}: {}", self.tree, e, self.message),
            None => write!(f, "tree {}: {}", self.tree, self.message),
        }
    }
}

impl RVineStructure {
    /// Build from explicit trees, checking validity and deriving parent
    /// links.
    pub fn from_trees(d: usize, trees: Vec<Vec<VineEdge>>) -> Result<Self> {
        let mut s = RVineStructure { d, trees };
        if let Err(v) = validate_structure(&s) {
            return Err(Error::Format(format!("invalid vine structure: {v}")));
        }
        s.link_parents()
            .map_err(|v| Error::Format(format!("invalid vine structure: {v}")))?;
        Ok(s)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn trees(&self) -> &[Vec<VineEdge>] {
        &self.trees
    }

    /// Recompute parent links from the conditioned/conditioning sets.
    pub(crate) fn link_parents(&mut self) -> std::result::Result<(), StructureViolation> {
        for m in 1..self.trees.len() {
            let (lower, upper) = self.trees.split_at_mut(m);
            let prev = &lower[m - 1];
            for (ei, edge) in upper[0].iter_mut().enumerate() {
                let union = edge.complete_union();
                let pair = find_parents(prev, &union, &edge.conditioning).ok_or(
                    StructureViolation {
                        tree: m + 1,
                        edge: Some(ei),
                        message: "no parent pair in the previous tree satisfies the proximity condition".into(),
                    },
                )?;
                // Orient so parents.0 contains conditioned.0.
                let (pa, pb) = pair;
                edge.parents = if prev[pa].contains(edge.conditioned.0) {
                    Some((pa, pb))
                } else {
                    Some((pb, pa))
                };
            }
        }
        Ok(())
    }
}

// Find two distinct edges of `prev` whose complete unions intersect exactly
// in `conditioning` and union to `union`.
fn find_parents(
    prev: &[VineEdge],
    union: &[usize],
    conditioning: &[usize],
) -> Option<(usize, usize)> {
    let unions: Vec<Vec<usize>> = prev.iter().map(|e| e.complete_union()).collect();
    for a in 0..prev.len() {
        if !is_subset(&unions[a], union) {
            continue;
        }
        for b in a + 1..prev.len() {
            if !is_subset(&unions[b], union) {
                continue;
            }
            let inter = sorted_intersection(&unions[a], &unions[b]);
            if inter == conditioning && sorted_union(&unions[a], &unions[b]) == union {
                return Some((a, b));
            }
        }
    }
    None
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|v| b.binary_search(v).is_ok()).cloned().collect()
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b.iter()).cloned().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Check the three vine conditions (node sets, tree-ness, proximity).
pub fn validate_structure(s: &RVineStructure) -> std::result::Result<(), StructureViolation> {
    let d = s.d;
    if d < 2 {
        return Err(StructureViolation {
            tree: 1,
            edge: None,
            message: format!("dimension must be at least 2, got {d}"),
        });
    }
    if s.trees.len() != d - 1 {
        return Err(StructureViolation {
            tree: 1,
            edge: None,
            message: format!("expected {} trees, got {}", d - 1, s.trees.len()),
        });
    }

    // Node ids for union-find: variables in tree 1, previous-tree edge
    // indices afterwards.
    let mut prev_endpoints: Vec<(usize, usize)> = Vec::new();
    for (ti, tree) in s.trees.iter().enumerate() {
        let level = ti + 1;
        let expected_edges = d - level;
        if tree.len() != expected_edges {
            return Err(StructureViolation {
                tree: level,
                edge: None,
                message: format!("expected {} edges, got {}", expected_edges, tree.len()),
            });
        }
        let num_nodes = d - level + 1;
        let mut endpoints: Vec<(usize, usize)> = Vec::with_capacity(tree.len());
        for (ei, edge) in tree.iter().enumerate() {
            let (j, k) = edge.conditioned;
            if j >= k {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: format!("conditioned pair ({j},{k}) must be strictly ascending"),
                });
            }
            if k >= d || edge.conditioning.iter().any(|&v| v >= d) {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: "variable index out of range".into(),
                });
            }
            if edge.conditioning.len() != level - 1 {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: format!(
                        "conditioning set has {} entries, expected {}",
                        edge.conditioning.len(),
                        level - 1
                    ),
                });
            }
            if edge.conditioning.windows(2).any(|w| w[0] >= w[1]) {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: "conditioning set must be sorted and duplicate-free".into(),
                });
            }
            if edge.conditioning.contains(&j) || edge.conditioning.contains(&k) {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: "conditioned variables must not appear in the conditioning set".into(),
                });
            }
            if level == 1 {
                endpoints.push((j, k));
            } else {
                let union = edge.complete_union();
                let prev = &s.trees[ti - 1];
                let Some((pa, pb)) = find_parents(prev, &union, &edge.conditioning) else {
                    return Err(StructureViolation {
                        tree: level,
                        edge: Some(ei),
                        message:
                            "proximity violation: no adjacent edge pair in the previous tree yields this edge"
                                .into(),
                    });
                };
                // The parents themselves must share a node in the previous
                // tree.
                if level > 2 {
                    let (a1, a2) = prev_endpoints[pa];
                    let (b1, b2) = prev_endpoints[pb];
                    if a1 != b1 && a1 != b2 && a2 != b1 && a2 != b2 {
                        return Err(StructureViolation {
                            tree: level,
                            edge: Some(ei),
                            message: "proximity violation: parent edges do not share a node".into(),
                        });
                    }
                }
                endpoints.push((pa, pb));
            }
        }

        // Tree-ness: d - level edges over d - level + 1 nodes with no cycle.
        let mut uf: Vec<usize> = (0..num_nodes).collect();
        fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for (ei, &(a, b)) in endpoints.iter().enumerate() {
            if a >= num_nodes || b >= num_nodes {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: "edge endpoint outside the tree's node set".into(),
                });
            }
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra == rb {
                return Err(StructureViolation {
                    tree: level,
                    edge: Some(ei),
                    message: "cycle: edge joins nodes already connected".into(),
                });
            }
            uf[ra] = rb;
        }
        prev_endpoints = endpoints;
    }
    Ok(())
}

/// A fitted vine copula: structure, pair copulas per edge, truncation level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VineModel {
    structure: RVineStructure,
    pair_copulas: Vec<Vec<BivariateCopula>>,
    trunc_level: usize,
}

/// Default truncation level: `min(5, d - 1)`.
pub fn default_trunc_level(d: usize) -> usize {
    5.min(d.saturating_sub(1)).max(1)
}

/// Select an R-vine structure for pseudo-observations (greedy MST per tree).
///
/// Selection interleaves with pair-copula fitting; this convenience wrapper
/// fits nonparametric pairs at full depth and returns the structure alone.
pub fn select_structure(u: &[Vec<f64>]) -> Result<RVineStructure> {
    let d = dim_of(u)?;
    Ok(fit(u, CopulaFamily::TransformationKernel, d - 1)?.structure)
}

fn dim_of(u: &[Vec<f64>]) -> Result<usize> {
    let d = u.first().map(|r| r.len()).unwrap_or(0);
    if d < 2 {
        return Err(Error::DimensionMismatch(
            "vine fitting needs at least 2 columns".into(),
        ));
    }
    if u.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch("ragged input rows".into()));
    }
    Ok(d)
}

fn check_unit_rows(u: &[Vec<f64>]) -> Result<()> {
    for row in u {
        for &v in row {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!(
                    "pseudo-observations must lie strictly in (0,1), got {v}"
                )));
            }
        }
    }
    Ok(())
}

// Selection bookkeeping: a node of the tree under construction.
struct SelNode {
    // Identity of this node: variable id for tree 1, else the edge index it
    // had in the previous tree.
    id: usize,
    // For edge nodes, the node indices the edge joined one level down; used
    // for the proximity check.
    endpoints: (usize, usize),
    union: Vec<usize>,
    conditioned: (usize, usize),
    // Pseudo-observation columns: u_{a | N\a} and u_{b | N\b}.
    col_a: Vec<f64>,
    col_b: Vec<f64>,
}

struct Candidate {
    node_a: usize,
    node_b: usize,
    conditioned: (usize, usize),
    conditioning: Vec<usize>,
    // Column of conditioned.0 given the conditioning set, and likewise .1.
    col_j: Vec<f64>,
    col_k: Vec<f64>,
    weight: f64,
}

/// Fit a vine copula by sequential tree-wise estimation.
pub fn fit(u: &[Vec<f64>], family: CopulaFamily, trunc_level: usize) -> Result<VineModel> {
    let d = dim_of(u)?;
    check_unit_rows(u)?;
    if trunc_level < 1 || trunc_level > d - 1 {
        return Err(Error::Domain(format!(
            "trunc_level must lie in [1, {}], got {trunc_level}",
            d - 1
        )));
    }

    let cols: Vec<Vec<f64>> = (0..d).map(|j| u.iter().map(|r| r[j]).collect()).collect();

    // Current tree's nodes; tree 1 nodes are the variables themselves.
    let mut nodes: Vec<SelNode> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| SelNode {
            id: i,
            endpoints: (i, i),
            union: vec![i],
            conditioned: (i, i),
            col_a: c.clone(),
            col_b: c.clone(),
        })
        .collect();

    let mut trees: Vec<Vec<VineEdge>> = Vec::with_capacity(d - 1);
    let mut copulas: Vec<Vec<BivariateCopula>> = Vec::with_capacity(d - 1);

    for level in 1..d {
        // Enumerate allowed candidate edges.
        let mut candidates: Vec<Candidate> = Vec::new();
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                let cand = if level == 1 {
                    let (j, k) = (nodes[a].id, nodes[b].id);
                    Candidate {
                        node_a: a,
                        node_b: b,
                        conditioned: (j, k),
                        conditioning: Vec::new(),
                        col_j: nodes[a].col_a.clone(),
                        col_k: nodes[b].col_a.clone(),
                        weight: 0.0,
                    }
                } else {
                    // Proximity: the prior edges must share a node.
                    if !share_endpoint(&nodes[a].endpoints, &nodes[b].endpoints) {
                        continue;
                    }
                    let conditioning = sorted_intersection(&nodes[a].union, &nodes[b].union);
                    let fresh_a = fresh_variable(&nodes[a].union, &conditioning);
                    let fresh_b = fresh_variable(&nodes[b].union, &conditioning);
                    let (Some(fa), Some(fb)) = (fresh_a, fresh_b) else {
                        continue;
                    };
                    let col_of = |node: &SelNode, var: usize| {
                        if node.conditioned.0 == var {
                            node.col_a.clone()
                        } else {
                            node.col_b.clone()
                        }
                    };
                    let (conditioned, col_j, col_k) = if fa < fb {
                        ((fa, fb), col_of(&nodes[a], fa), col_of(&nodes[b], fb))
                    } else {
                        ((fb, fa), col_of(&nodes[b], fb), col_of(&nodes[a], fa))
                    };
                    Candidate {
                        node_a: a,
                        node_b: b,
                        conditioned,
                        conditioning,
                        col_j,
                        col_k,
                        weight: 0.0,
                    }
                };
                candidates.push(cand);
            }
        }

        // Dependence weights in parallel; |tau| with ties broken by the
        // lexicographically smallest conditioned pair.
        let weights: Vec<f64> = candidates
            .par_iter()
            .map(|c| kendall_tau(&c.col_j, &c.col_k).map(f64::abs))
            .collect::<Result<Vec<f64>>>()?;
        for (c, w) in candidates.iter_mut().zip(weights) {
            c.weight = w;
        }

        let chosen = maximum_spanning_tree(nodes.len(), &candidates).ok_or_else(|| {
            Error::Numeric(format!("candidate graph disconnected in tree {level}"))
        })?;

        // Fit the chosen edges (in parallel within the tree).
        let fit_this_level = level <= trunc_level;
        let fitted: Vec<BivariateCopula> = chosen
            .par_iter()
            .map(|&ci| {
                let c = &candidates[ci];
                if fit_this_level {
                    bicop::fit(&c.col_j, &c.col_k, family)
                } else {
                    Ok(BivariateCopula::Independence)
                }
            })
            .collect::<Result<Vec<_>>>()?;

        // Materialize edges and next-level nodes.
        let mut edges: Vec<VineEdge> = Vec::with_capacity(chosen.len());
        let mut next_nodes: Vec<SelNode> = Vec::with_capacity(chosen.len());
        for (edge_idx, (&ci, cop)) in chosen.iter().zip(fitted.iter()).enumerate() {
            let c = &candidates[ci];
            let parents = if level == 1 {
                None
            } else {
                // Orient parents to the conditioned pair.
                let a_has_j = nodes[c.node_a].union.binary_search(&c.conditioned.0).is_ok();
                if a_has_j {
                    Some((nodes[c.node_a].id, nodes[c.node_b].id))
                } else {
                    Some((nodes[c.node_b].id, nodes[c.node_a].id))
                }
            };
            edges.push(VineEdge {
                conditioned: c.conditioned,
                conditioning: c.conditioning.clone(),
                parents,
            });

            let more_trees = level < d - 1;
            let (out_a, out_b) = if more_trees {
                h_transform_pair(cop, &c.col_j, &c.col_k)
            } else {
                (Vec::new(), Vec::new())
            };
            next_nodes.push(SelNode {
                id: edge_idx,
                endpoints: (c.node_a, c.node_b),
                union: sorted_union(&nodes[c.node_a].union, &nodes[c.node_b].union),
                conditioned: c.conditioned,
                col_a: out_a,
                col_b: out_b,
            });
        }
        trees.push(edges);
        copulas.push(fitted);
        nodes = next_nodes;
    }

    let structure = RVineStructure { d, trees };
    debug_assert!(validate_structure(&structure).is_ok());
    Ok(VineModel {
        structure,
        pair_copulas: copulas,
        trunc_level,
    })
}

// u_{a|N∪b} and u_{b|N∪a} for every row, clamped into the open unit
// interval.
fn h_transform_pair(
    cop: &BivariateCopula,
    col_j: &[f64],
    col_k: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let clamp = |x: f64| x.clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP);
    let out_a = col_j
        .iter()
        .zip(col_k)
        .map(|(&a, &b)| clamp(cop.hfunc_unchecked(a, b, 2)))
        .collect();
    let out_b = col_j
        .iter()
        .zip(col_k)
        .map(|(&a, &b)| clamp(cop.hfunc_unchecked(a, b, 1)))
        .collect();
    (out_a, out_b)
}

fn share_endpoint(a: &(usize, usize), b: &(usize, usize)) -> bool {
    a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1
}

fn fresh_variable(union: &[usize], conditioning: &[usize]) -> Option<usize> {
    let mut fresh = union.iter().filter(|v| conditioning.binary_search(v).is_err());
    let first = fresh.next();
    if fresh.next().is_some() {
        return None;
    }
    first.copied()
}

// Prim's algorithm for a maximum spanning tree; returns candidate indices.
fn maximum_spanning_tree(num_nodes: usize, candidates: &[Candidate]) -> Option<Vec<usize>> {
    if num_nodes == 1 {
        return Some(Vec::new());
    }
    let mut in_tree = vec![false; num_nodes];
    in_tree[0] = true;
    let mut chosen = Vec::with_capacity(num_nodes - 1);
    for _ in 0..num_nodes - 1 {
        let mut best: Option<usize> = None;
        for (ci, c) in candidates.iter().enumerate() {
            if in_tree[c.node_a] == in_tree[c.node_b] {
                continue;
            }
            best = match best {
                None => Some(ci),
                Some(b) => {
                    let cb = &candidates[b];
                    if c.weight > cb.weight
                        || (c.weight == cb.weight && c.conditioned < cb.conditioned)
                    {
                        Some(ci)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let ci = best?;
        in_tree[candidates[ci].node_a] = true;
        in_tree[candidates[ci].node_b] = true;
        chosen.push(ci);
    }
    Some(chosen)
}

impl VineModel {
    pub fn structure(&self) -> &RVineStructure {
        &self.structure
    }

    pub fn pair_copulas(&self) -> &[Vec<BivariateCopula>] {
        &self.pair_copulas
    }

    pub fn trunc_level(&self) -> usize {
        self.trunc_level
    }

    pub fn dimension(&self) -> usize {
        self.structure.d
    }

    /// Restore parent links after deserialization and check validity.
    pub fn rebuild(&mut self) -> Result<()> {
        if let Err(v) = validate_structure(&self.structure) {
            return Err(Error::Format(format!("invalid vine structure: {v}")));
        }
        self.structure
            .link_parents()
            .map_err(|v| Error::Format(format!("invalid vine structure: {v}")))?;
        Ok(())
    }

    /// Joint copula log-density at one point of the unit hypercube.
    pub fn log_density(&self, u: &[f64]) -> Result<f64> {
        Ok(self.log_density_batch(std::slice::from_ref(&u.to_vec()))?[0])
    }

    /// Joint copula log-density for a batch of points.
    pub fn log_density_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let d = self.structure.d;
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "expected rows of dimension {d}"
            )));
        }
        check_unit_rows(rows)?;
        let mut acc = vec![0.0; rows.len()];
        self.propagate(rows, self.trunc_level, |level, _edge, cop, col_a, col_b| {
            if level <= self.trunc_level {
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += cop.pdf_unchecked(col_a[i], col_b[i]).max(1e-20).ln();
                }
            }
        });
        Ok(acc)
    }

    // Pseudo-observation propagation through the vine. Calls `visit` for
    // every edge of every level up to `depth` with the edge's conditional
    // pair columns.
    fn propagate<F>(&self, rows: &[Vec<f64>], depth: usize, mut visit: F)
    where
        F: FnMut(usize, &VineEdge, &BivariateCopula, &[f64], &[f64]),
    {
        let n = rows.len();
        let clamp = |x: f64| x.clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP);
        // Pair columns for the previous level's edges.
        let mut prev: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for (ti, tree) in self.structure.trees.iter().enumerate() {
            let level = ti + 1;
            if level > depth {
                break;
            }
            let mut current: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(tree.len());
            for (ei, edge) in tree.iter().enumerate() {
                let (col_a, col_b) = if level == 1 {
                    let a: Vec<f64> = (0..n).map(|i| rows[i][edge.conditioned.0]).collect();
                    let b: Vec<f64> = (0..n).map(|i| rows[i][edge.conditioned.1]).collect();
                    (a, b)
                } else {
                    let (pa, pb) = edge.parents.expect("parent links must be built");
                    let prev_tree = &self.structure.trees[ti - 1];
                    let take = |pi: usize, var: usize| -> Vec<f64> {
                        let parent = &prev_tree[pi];
                        let cop = &self.pair_copulas[ti - 1][pi];
                        let (pc_a, pc_b) = &prev[pi];
                        let which = if parent.conditioned.0 == var { 2 } else { 1 };
                        (0..n)
                            .map(|i| clamp(cop.hfunc_unchecked(pc_a[i], pc_b[i], which)))
                            .collect()
                    };
                    (take(pa, edge.conditioned.0), take(pb, edge.conditioned.1))
                };
                visit(level, edge, &self.pair_copulas[ti][ei], &col_a, &col_b);
                current.push((col_a, col_b));
            }
            prev = current;
        }
    }
}

/// A joint distribution model on the natural scale: kernel marginals plus a
/// vine copula on the PIT scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointModel {
    pub marginals: Vec<KernelMarginal>,
    pub vine: VineModel,
}

impl JointModel {
    /// Two-step fit: kernel marginals per column, then a vine on the PIT
    /// pseudo-observations.
    pub fn fit(
        rows: &[Vec<f64>],
        family: CopulaFamily,
        trunc_level: usize,
    ) -> Result<Self> {
        let d = dim_of(rows)?;
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        let marginals: Vec<KernelMarginal> = cols
            .par_iter()
            .map(|c| fit_marginal(c, None))
            .collect::<Result<Vec<_>>>()?;
        let pit_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, &x)| marginals[j].pit(&[x])[0])
                    .collect()
            })
            .collect();
        let vine = fit(&pit_rows, family, trunc_level)?;
        Ok(JointModel { marginals, vine })
    }

    /// Sample on the natural scale: vine sample, then inverse PIT per column.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let u = self.vine.sample(n, seed)?;
        u.into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| Ok(self.marginals[j].inverse_pit(&[v])?[0]))
                    .collect()
            })
            .collect()
    }

    /// Natural-scale log density: copula log-density at the PIT values plus
    /// the marginal log densities.
    pub fn log_density(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.marginals.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected dimension {}, got {}",
                self.marginals.len(),
                row.len()
            )));
        }
        let u: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(j, &x)| self.marginals[j].pit(&[x])[0])
            .collect();
        let copula = self.vine.log_density(&u)?;
        let margins: f64 = row
            .iter()
            .enumerate()
            .map(|(j, &x)| self.marginals[j].log_pdf(x))
            .sum();
        Ok(copula + margins)
    }

    pub fn log_density_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.log_density(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::ContinuousCDF;

    fn edge(j: usize, k: usize, cond: &[usize]) -> VineEdge {
        VineEdge {
            conditioned: (j, k),
            conditioning: cond.to_vec(),
            parents: None,
        }
    }

    // Trivariate Gaussian copula sample with correlation matrix R (lower
    // Cholesky hand-rolled); returns PIT-scale rows.
    fn gaussian_copula_rows(r: &[[f64; 3]; 3], n: usize, seed: u64) -> Vec<Vec<f64>> {
        use rand::{Rng, SeedableRng};
        let mut l = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let mut s = r[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    l[i][j] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        let n01 = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let w: Vec<f64> = (0..3)
                    .map(|_| n01.inverse_cdf(rng.gen_range(1e-12..1.0 - 1e-12)))
                    .collect();
                (0..3)
                    .map(|i| {
                        let z: f64 = (0..=i).map(|k| l[i][k] * w[k]).sum();
                        n01.cdf(z).clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn kendall_tau_known_values() {
        assert_abs_diff_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(),
            -1.0
        );
        // Brute force over the 3 pairs: 2 concordant, 1 discordant.
        assert_abs_diff_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(),
            1.0 / 3.0
        );
        assert!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
        assert!(kendall_tau(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn kendall_tau_ties_count_as_neither() {
        // Pairs with equal x or y contribute zero either way.
        let x = [1.0, 1.0, 2.0, 3.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        // Pairs: (1,2):x tie; (1,3):c; (1,4):c; (2,3):c; (2,4):c; (3,4):c.
        assert_abs_diff_eq!(kendall_tau(&x, &y).unwrap(), 5.0 / 6.0);
    }

    #[test]
    fn validate_example_structure() {
        // Five-dimensional structure: trees 0-1,0-2,2-3,2-4; 1-2|0, 0-3|2,
        // 0-4|2; 1-3|0,2 and 3-4|0,2; 1-4|0,2,3.
        let trees = vec![
            vec![edge(0, 1, &[]), edge(0, 2, &[]), edge(2, 3, &[]), edge(2, 4, &[])],
            vec![edge(1, 2, &[0]), edge(0, 3, &[2]), edge(0, 4, &[2])],
            vec![edge(1, 3, &[0, 2]), edge(3, 4, &[0, 2])],
            vec![edge(1, 4, &[0, 2, 3])],
        ];
        let s = RVineStructure { d: 5, trees };
        assert!(validate_structure(&s).is_ok());
        let total: usize = s.trees.iter().map(|t| t.len()).sum();
        assert_eq!(total, 5 * 4 / 2);
    }

    #[test]
    fn validate_rejects_proximity_violation() {
        // T2 edge joining T1 edges 0-1 and 2-3, which share no node.
        let trees = vec![
            vec![edge(0, 1, &[]), edge(1, 2, &[]), edge(2, 3, &[])],
            vec![edge(0, 2, &[1]), edge(0, 3, &[1])],
            vec![edge(2, 3, &[0, 1])],
        ];
        let s = RVineStructure { d: 4, trees };
        let v = validate_structure(&s).unwrap_err();
        assert_eq!(v.tree, 2);
        assert!(v.message.contains("proximity"));
    }

    #[test]
    fn validate_rejects_cycle() {
        // Tree 1 with a 3-cycle on 4 nodes cannot happen with d-1 edges, so
        // force d edges by lying about the dimension per tree instead: use a
        // cycle among 0,1,2 plus an isolated extra edge count mismatch.
        let trees = vec![
            vec![edge(0, 1, &[]), edge(1, 2, &[]), edge(0, 2, &[])],
            vec![edge(0, 2, &[1]), edge(1, 3, &[2])],
            vec![edge(0, 3, &[1, 2])],
        ];
        let s = RVineStructure { d: 4, trees };
        let v = validate_structure(&s).unwrap_err();
        assert_eq!(v.tree, 1);
        assert!(v.message.contains("cycle"), "{}", v.message);
    }

    #[test]
    fn validate_rejects_wrong_edge_count() {
        let trees = vec![vec![edge(0, 1, &[])]];
        let s = RVineStructure { d: 3, trees };
        assert!(validate_structure(&s).is_err());
    }

    #[test]
    fn select_structure_d2_is_single_edge() {
        let rows = standard_uniform_matrix(200, 2, 3);
        let s = select_structure(&rows).unwrap();
        assert_eq!(s.trees.len(), 1);
        assert_eq!(s.trees[0][0].conditioned, (0, 1));
        assert!(s.trees[0][0].conditioning.is_empty());
    }

    #[test]
    fn select_structure_keeps_strongest_tree() {
        // Three columns where |tau(0,1)| > |tau(1,2)| > |tau(0,2)|. The MST
        // must keep 0-1 and 1-2; brute force over the three spanning trees
        // of K3 confirms.
        use crate::bicop::BivariateCopula;
        let strong = BivariateCopula::Gaussian { rho: 0.95 };
        let mid = BivariateCopula::Gaussian { rho: 0.81 };
        let p01 = strong.simulate_pair(600, 5);
        let p12 = mid.simulate_pair(600, 6);
        let rows: Vec<Vec<f64>> = (0..600)
            .map(|i| {
                // Chain the pairs so column 1 is shared.
                let c1 = p01[i][1];
                let c0 = p01[i][0];
                let c2 = {
                    // Drive column 2 by c1 through the mid copula's h-inverse.
                    mid.hinv_unchecked(p12[i][0], c1, 2)
                };
                vec![c0, c1, c2]
            })
            .collect();
        let cols: Vec<Vec<f64>> = (0..3).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let t01 = kendall_tau(&cols[0], &cols[1]).unwrap().abs();
        let t12 = kendall_tau(&cols[1], &cols[2]).unwrap().abs();
        let t02 = kendall_tau(&cols[0], &cols[2]).unwrap().abs();
        // Brute-force oracle over the three spanning trees of K3.
        let trees = [(t01 + t12, "01+12"), (t01 + t02, "01+02"), (t12 + t02, "12+02")];
        let best = trees
            .iter()
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap()
            .1;
        assert_eq!(best, "01+12", "taus: {t01} {t12} {t02}");

        let s = select_structure(&rows).unwrap();
        let mut t1: Vec<(usize, usize)> = s.trees[0].iter().map(|e| e.conditioned).collect();
        t1.sort_unstable();
        assert_eq!(t1, vec![(0, 1), (1, 2)]);
        assert!(validate_structure(&s).is_ok());
    }

    #[test]
    fn fit_d2_wraps_single_pair() {
        let truth = crate::bicop::BivariateCopula::Gaussian { rho: 0.6 };
        let rows: Vec<Vec<f64>> = truth
            .simulate_pair(500, 7)
            .iter()
            .map(|p| vec![p[0], p[1]])
            .collect();
        let model = fit(&rows, CopulaFamily::Gaussian, 1).unwrap();
        assert_eq!(model.structure().trees().len(), 1);
        match &model.pair_copulas()[0][0] {
            BivariateCopula::Gaussian { rho } => assert!((rho - 0.6).abs() < 0.07),
            other => panic!("expected Gaussian, got {other:?}"),
        }
    }

    #[test]
    fn fit_independent_data_has_near_zero_loglik() {
        let rows = standard_uniform_matrix(3000, 3, 11);
        let model = fit(&rows, CopulaFamily::TransformationKernel, 2).unwrap();
        let ll = model.log_density_batch(&rows).unwrap();
        let per_obs = ll.iter().sum::<f64>() / rows.len() as f64;
        assert!(per_obs.abs() < 0.05, "loglik per obs = {per_obs}");
    }

    #[test]
    fn fit_rejects_bad_trunc_and_domain() {
        let rows = standard_uniform_matrix(100, 3, 1);
        assert!(fit(&rows, CopulaFamily::Gaussian, 0).is_err());
        assert!(fit(&rows, CopulaFamily::Gaussian, 3).is_err());
        let mut bad = rows.clone();
        bad[4][1] = 1.0;
        assert!(matches!(
            fit(&bad, CopulaFamily::Gaussian, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn log_density_closed_forms() {
        // All-independence vine.
        let rows = standard_uniform_matrix(300, 3, 2);
        let indep = fit(&rows, CopulaFamily::Independence, 2).unwrap();
        for u in standard_uniform_matrix(10, 3, 3) {
            assert_abs_diff_eq!(indep.log_density(&u).unwrap(), 0.0);
        }

        // Manual 3-dim Gaussian vine with rho = 0 reduces to independence.
        let structure = RVineStructure::from_trees(
            3,
            vec![
                vec![edge(0, 1, &[]), edge(1, 2, &[])],
                vec![edge(0, 2, &[1])],
            ],
        )
        .unwrap();
        let zero = VineModel {
            structure: structure.clone(),
            pair_copulas: vec![
                vec![
                    BivariateCopula::Gaussian { rho: 0.0 },
                    BivariateCopula::Gaussian { rho: 0.0 },
                ],
                vec![BivariateCopula::Independence],
            ],
            trunc_level: 2,
        };
        for u in standard_uniform_matrix(10, 3, 4) {
            assert!(zero.log_density(&u).unwrap().abs() < 1e-12);
        }

        // T1 Gaussian rho = 0.5 twice, T2 independence, evaluated at the
        // center: twice the log of the pair density at z = (0,0).
        let half = VineModel {
            structure,
            pair_copulas: vec![
                vec![
                    BivariateCopula::Gaussian { rho: 0.5 },
                    BivariateCopula::Gaussian { rho: 0.5 },
                ],
                vec![BivariateCopula::Independence],
            ],
            trunc_level: 2,
        };
        let ld = half.log_density(&[0.5, 0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(ld, 2.0 * (1.0 / 0.75f64.sqrt()).ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(ld, 0.2877, epsilon = 1e-4);
    }

    #[test]
    fn sample_independence_is_uniform() {
        let rows = standard_uniform_matrix(200, 3, 5);
        let model = fit(&rows, CopulaFamily::Independence, 2).unwrap();
        let sample = model.sample(2000, 99).unwrap();
        for j in 0..3 {
            let col: Vec<f64> = sample.iter().map(|r| r[j]).collect();
            let d = crate::stats::ks_statistic_uniform(&col);
            assert!(d < crate::stats::ks_critical_value(2000, 0.01), "col {j}: KS {d}");
        }
    }

    #[test]
    fn sample_d2_gaussian_matches_tau() {
        let structure =
            RVineStructure::from_trees(2, vec![vec![edge(0, 1, &[])]]).unwrap();
        let model = VineModel {
            structure,
            pair_copulas: vec![vec![BivariateCopula::Gaussian { rho: 0.7 }]],
            trunc_level: 1,
        };
        let s = model.sample(10_000, 12).unwrap();
        let a: Vec<f64> = s.iter().map(|r| r[0]).collect();
        let b: Vec<f64> = s.iter().map(|r| r[1]).collect();
        let tau = kendall_tau(&a, &b).unwrap();
        assert!((0.46..=0.52).contains(&tau), "tau = {tau}");
    }

    #[test]
    fn sample_recovers_pairwise_dependence_in_5d() {
        // Fit a Gaussian vine on 5-dimensional data built from chained
        // Gaussian pairs, sample it, and compare all pairwise taus.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let n = 3000;
        let pair = |rho: f64| BivariateCopula::Gaussian { rho };
        let chain = [pair(0.8), pair(-0.6), pair(0.5), pair(0.7)];
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut row = vec![rng.gen_range(1e-9..1.0 - 1e-9)];
                for c in &chain {
                    let w: f64 = rng.gen_range(1e-9..1.0 - 1e-9);
                    let prev = *row.last().unwrap();
                    row.push(c.hinv_unchecked(w, prev, 1));
                }
                row
            })
            .collect();
        let model = fit(&rows, CopulaFamily::Gaussian, 4).unwrap();
        let samp = model.sample(4000, 33).unwrap();
        for i in 0..5 {
            for j in i + 1..5 {
                let xi: Vec<f64> = rows.iter().map(|r| r[i]).collect();
                let xj: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                let si: Vec<f64> = samp.iter().map(|r| r[i]).collect();
                let sj: Vec<f64> = samp.iter().map(|r| r[j]).collect();
                let t_data = kendall_tau(&xi, &xj).unwrap();
                let t_samp = kendall_tau(&si, &sj).unwrap();
                assert!(
                    (t_data - t_samp).abs() < 0.06,
                    "pair ({i},{j}): data tau {t_data}, sample tau {t_samp}"
                );
            }
        }
    }

    #[test]
    fn rosenblatt_is_inverse_of_sampling() {
        let rows = gaussian_copula_rows(&[[1.0, 0.6, 0.5], [0.6, 1.0, 0.7], [0.5, 0.7, 1.0]], 800, 42);
        let model = fit(&rows, CopulaFamily::TransformationKernel, 2).unwrap();
        let w = standard_uniform_matrix(500, 3, 7);
        let u = model.sample_from_uniforms(&w).unwrap();
        let back = model.rosenblatt_residuals(&u).unwrap();
        for (wr, br) in w.iter().zip(back.iter()) {
            for (a, b) in wr.iter().zip(br.iter()) {
                assert!((a - b).abs() < 1e-5, "{a} vs {b}");
            }
        }
        // And the other composition: residuals of arbitrary data map back.
        let data = standard_uniform_matrix(300, 3, 8);
        let res = model.rosenblatt_residuals(&data).unwrap();
        let fwd = model.sample_from_uniforms(&res).unwrap();
        for (dr, fr) in data.iter().zip(fwd.iter()) {
            for (a, b) in dr.iter().zip(fr.iter()) {
                assert!((a - b).abs() < 1e-5, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rosenblatt_identity_for_independence_vine() {
        let rows = standard_uniform_matrix(100, 4, 9);
        let model = fit(&rows, CopulaFamily::Independence, 3).unwrap();
        let res = model.rosenblatt_residuals(&rows).unwrap();
        assert_eq!(res, rows);
    }

    #[test]
    fn rosenblatt_detects_wrong_model() {
        // A strongly dependent model applied to independent data: the
        // second variable's residual column is far from uniform.
        let structure =
            RVineStructure::from_trees(2, vec![vec![edge(0, 1, &[])]]).unwrap();
        let model = VineModel {
            structure,
            pair_copulas: vec![vec![BivariateCopula::Gaussian { rho: 0.9 }]],
            trunc_level: 1,
        };
        let data = standard_uniform_matrix(5000, 2, 10);
        let res = model.rosenblatt_residuals(&data).unwrap();
        let col1: Vec<f64> = res.iter().map(|r| r[1]).collect();
        let d = crate::stats::ks_statistic_uniform(&col1);
        assert!(
            d > crate::stats::ks_critical_value(5000, 0.01),
            "KS should reject, got {d}"
        );
        // The first variable keeps its raw values and stays uniform.
        let col0: Vec<f64> = res.iter().map(|r| r[0]).collect();
        let d0 = crate::stats::ks_statistic_uniform(&col0);
        assert!(d0 < crate::stats::ks_critical_value(5000, 0.01));
    }

    #[test]
    fn gaussian_vine_matches_trivariate_oracle() {
        let r = [[1.0, 0.6, 0.5], [0.6, 1.0, 0.7], [0.5, 0.7, 1.0]];
        let rows = gaussian_copula_rows(&r, 2000, 77);
        let model = fit(&rows, CopulaFamily::Gaussian, 2).unwrap();

        // Closed-form trivariate Gaussian copula log density.
        let det = 1.0 + 2.0 * r[0][1] * r[0][2] * r[1][2]
            - r[0][1] * r[0][1]
            - r[0][2] * r[0][2]
            - r[1][2] * r[1][2];
        let adj = |i: usize, j: usize| -> f64 {
            // Inverse via cofactors for the symmetric 3x3 case.
            let m = &r;
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            let (c, d) = ((j + 1) % 3, (j + 2) % 3);
            (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det
        };
        let n01 = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
        let oracle = |u: &[f64]| -> f64 {
            let z: Vec<f64> = u.iter().map(|&v| n01.inverse_cdf(v)).collect();
            let mut quad = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let inv_ij = adj(j, i);
                    let delta = if i == j { 1.0 } else { 0.0 };
                    quad += z[i] * (inv_ij - delta) * z[j];
                }
            }
            -0.5 * det.ln() - 0.5 * quad
        };

        let eval = gaussian_copula_rows(&r, 500, 78);
        let fitted = model.log_density_batch(&eval).unwrap();
        let mad = eval
            .iter()
            .zip(fitted.iter())
            .map(|(u, f)| (oracle(u) - f).abs())
            .sum::<f64>()
            / eval.len() as f64;
        assert!(mad < 0.05, "mean abs deviation = {mad}");
    }

    #[test]
    fn fitted_kernel_vine_beats_independence_on_training_data() {
        let rows = gaussian_copula_rows(&[[1.0, 0.7, 0.4], [0.7, 1.0, 0.5], [0.4, 0.5, 1.0]], 1500, 31);
        let model = fit(&rows, CopulaFamily::TransformationKernel, 2).unwrap();
        let total: f64 = model.log_density_batch(&rows).unwrap().iter().sum();
        assert!(total >= 0.0, "aggregate loglik = {total}");
    }

    #[test]
    fn truncation_prefix_is_stable() {
        let rows = gaussian_copula_rows(&[[1.0, 0.6, 0.3], [0.6, 1.0, 0.5], [0.3, 0.5, 1.0]], 1000, 55);
        let m1 = fit(&rows, CopulaFamily::Gaussian, 1).unwrap();
        let m2 = fit(&rows, CopulaFamily::Gaussian, 2).unwrap();
        for (e1, e2) in m1.structure().trees()[0].iter().zip(m2.structure().trees()[0].iter()) {
            assert_eq!(e1.conditioned, e2.conditioned);
            assert_eq!(e1.conditioning, e2.conditioning);
        }
        // Same first-tree copulas too.
        for (c1, c2) in m1.pair_copulas()[0].iter().zip(m2.pair_copulas()[0].iter()) {
            match (c1, c2) {
                (BivariateCopula::Gaussian { rho: a }, BivariateCopula::Gaussian { rho: b }) => {
                    assert_eq!(a, b)
                }
                _ => panic!("expected Gaussian pairs"),
            }
        }
        // Above the truncation level everything is independence.
        assert!(matches!(
            m1.pair_copulas()[1][0],
            BivariateCopula::Independence
        ));
    }

    #[test]
    fn structure_edge_counts() {
        let rows = standard_uniform_matrix(200, 5, 60);
        let model = fit(&rows, CopulaFamily::Independence, 4).unwrap();
        let trees = model.structure().trees();
        assert_eq!(trees.len(), 4);
        for (ti, tree) in trees.iter().enumerate() {
            assert_eq!(tree.len(), 5 - (ti + 1));
        }
        let total: usize = trees.iter().map(|t| t.len()).sum();
        assert_eq!(total, 5 * 4 / 2);
    }

    #[test]
    fn joint_model_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        let rows: Vec<Vec<f64>> = (0..800)
            .map(|_| {
                let x: f64 = rng.gen_range(-3.0..3.0);
                let y = x * 0.5 + rng.gen_range(-1.0..1.0);
                vec![x, y]
            })
            .collect();
        let jm = JointModel::fit(&rows, CopulaFamily::TransformationKernel, 1).unwrap();
        let samp = jm.sample(1000, 3).unwrap();
        assert_eq!(samp.len(), 1000);
        // Sampled ranges resemble the data ranges.
        let min0 = samp.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
        let max0 = samp.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
        assert!(min0 > -4.5 && max0 < 4.5, "range [{min0}, {max0}]");
        // Log density is finite on data.
        let ld = jm.log_density_batch(&rows).unwrap();
        assert!(ld.iter().all(|v| v.is_finite()));
    }
}
