//! Inverse-Rosenblatt sampling and forward Rosenblatt residuals.
//!
//! Sampling removes one variable at a time from the top of the vine: the
//! retired variable is always a conditioned variable of the single live edge
//! in the highest live tree, and the edges that mention it form one chain
//! through the levels below. Inverting the h-functions down that chain turns
//! a fresh uniform into the variable's value given everything sampled so
//! far; the forward pass reads the same chain tops off the pseudo-observation
//! propagation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RVineStructure, VineModel};
use crate::error::{Error, Result};
use crate::marginals::UNIT_CLAMP;

/// Seeded n-by-d matrix of uniforms in the open unit interval.
pub fn standard_uniform_matrix(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| rng.gen_range(UNIT_CLAMP..1.0 - UNIT_CLAMP))
                .collect()
        })
        .collect()
}

// Where the conditioning value of a chain link comes from.
enum CondSource {
    // Level-1 edge: the partner variable's raw value.
    Variable(usize),
    // The partner's conditional value, exposed as an h-transform of a
    // lower-tree edge's stored pair.
    Parent {
        tree: usize,
        edge: usize,
        take_first: bool,
    },
}

struct ChainLink {
    tree: usize,
    edge: usize,
    v_is_first: bool,
    cond: CondSource,
}

struct PlanStep {
    var: usize,
    // Ascending tree level; `chain[m]` sits in tree m+1.
    chain: Vec<ChainLink>,
}

pub(super) struct SamplingPlan {
    first_var: usize,
    steps: Vec<PlanStep>,
}

fn not_sampleable(msg: &str) -> Error {
    Error::Numeric(format!("structure is not sampleable: {msg}"))
}

pub(super) fn build_plan(s: &RVineStructure) -> Result<SamplingPlan> {
    let d = s.d;
    let trees = &s.trees;
    let mut live: Vec<Vec<bool>> = trees.iter().map(|t| vec![true; t.len()]).collect();
    let mut active = vec![true; d];
    let mut steps: Vec<PlanStep> = Vec::with_capacity(d - 1);

    for k in (2..=d).rev() {
        let top = k - 2; // 0-based index of the highest live tree
        let live_top: Vec<usize> = (0..trees[top].len()).filter(|&e| live[top][e]).collect();
        if live_top.len() != 1 {
            return Err(not_sampleable(&format!(
                "tree {} has {} live edges, expected 1",
                top + 1,
                live_top.len()
            )));
        }
        let mut cur_edge = live_top[0];
        let v = trees[top][cur_edge].conditioned.1;

        let mut chain_rev: Vec<ChainLink> = Vec::with_capacity(k - 1);
        let mut cur_tree = top;
        loop {
            let e = &trees[cur_tree][cur_edge];
            let v_is_first = if e.conditioned.0 == v {
                true
            } else if e.conditioned.1 == v {
                false
            } else {
                return Err(not_sampleable("chained variable is not conditioned"));
            };
            let partner = if v_is_first {
                e.conditioned.1
            } else {
                e.conditioned.0
            };
            let cond = if cur_tree == 0 {
                CondSource::Variable(partner)
            } else {
                let (pa, pb) = e
                    .parents
                    .ok_or_else(|| not_sampleable("parent links missing"))?;
                let partner_parent = if v_is_first { pb } else { pa };
                let pe = &trees[cur_tree - 1][partner_parent];
                let take_first = if pe.conditioned.0 == partner {
                    true
                } else if pe.conditioned.1 == partner {
                    false
                } else {
                    return Err(not_sampleable("partner is not conditioned in its parent"));
                };
                CondSource::Parent {
                    tree: cur_tree - 1,
                    edge: partner_parent,
                    take_first,
                }
            };
            chain_rev.push(ChainLink {
                tree: cur_tree,
                edge: cur_edge,
                v_is_first,
                cond,
            });
            if cur_tree == 0 {
                break;
            }
            let (pa, pb) = e.parents.unwrap();
            cur_edge = if v_is_first { pa } else { pb };
            cur_tree -= 1;
        }
        chain_rev.reverse();
        steps.push(PlanStep { var: v, chain: chain_rev });

        active[v] = false;
        for (ti, tree) in trees.iter().enumerate() {
            for (ei, e) in tree.iter().enumerate() {
                if live[ti][ei] && e.contains(v) {
                    live[ti][ei] = false;
                }
            }
        }
    }

    let first_var = active
        .iter()
        .position(|&a| a)
        .ok_or_else(|| not_sampleable("no variable left for the first position"))?;
    steps.reverse();
    Ok(SamplingPlan { first_var, steps })
}

impl VineModel {
    /// Draw `n` rows from the vine copula by the inverse Rosenblatt
    /// transform.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let w = standard_uniform_matrix(n, self.structure.d, seed);
        self.sample_from_uniforms(&w)
    }

    /// Inverse Rosenblatt transform of externally supplied uniforms, indexed
    /// by variable. The exact inverse of [`VineModel::rosenblatt_residuals`].
    pub fn sample_from_uniforms(&self, w: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let d = self.structure.d;
        if w.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "expected rows of dimension {d}"
            )));
        }
        super::check_unit_rows(w)?;
        let plan = build_plan(&self.structure)?;
        let clamp = |x: f64| x.clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP);

        // Reusable per-row pair values; every entry read is written first
        // within the same row.
        let mut vals: Vec<Vec<(f64, f64)>> = self
            .structure
            .trees
            .iter()
            .map(|t| vec![(0.0, 0.0); t.len()])
            .collect();
        let mut out = Vec::with_capacity(w.len());
        let mut conds: Vec<f64> = Vec::with_capacity(d);

        for row in w {
            let mut u = vec![0.0; d];
            u[plan.first_var] = row[plan.first_var];
            for step in &plan.steps {
                conds.clear();
                for link in &step.chain {
                    let c = match link.cond {
                        CondSource::Variable(p) => u[p],
                        CondSource::Parent {
                            tree,
                            edge,
                            take_first,
                        } => {
                            let (a, b) = vals[tree][edge];
                            let cop = &self.pair_copulas[tree][edge];
                            clamp(cop.hfunc_unchecked(a, b, if take_first { 2 } else { 1 }))
                        }
                    };
                    conds.push(c);
                }
                let mut z = row[step.var];
                for (idx, link) in step.chain.iter().enumerate().rev() {
                    let cop = &self.pair_copulas[link.tree][link.edge];
                    let c = conds[idx];
                    z = clamp(cop.hinv_unchecked(z, c, if link.v_is_first { 2 } else { 1 }));
                    vals[link.tree][link.edge] = if link.v_is_first { (z, c) } else { (c, z) };
                }
                u[step.var] = z;
            }
            out.push(u);
        }
        Ok(out)
    }

    /// Forward Rosenblatt transform: maps model samples back to iid
    /// uniforms, indexed by variable.
    pub fn rosenblatt_residuals(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let d = self.structure.d;
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "expected rows of dimension {d}"
            )));
        }
        super::check_unit_rows(rows)?;
        let plan = build_plan(&self.structure)?;

        // Conditional pair columns for every edge at full depth.
        let mut pair_cols: Vec<Vec<(Vec<f64>, Vec<f64>)>> =
            self.structure.trees.iter().map(|t| Vec::with_capacity(t.len())).collect();
        self.propagate(rows, d - 1, |level, _edge, _cop, col_a, col_b| {
            pair_cols[level - 1].push((col_a.to_vec(), col_b.to_vec()));
        });

        let clamp = |x: f64| x.clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP);
        let n = rows.len();
        let mut out = vec![vec![0.0; d]; n];
        for i in 0..n {
            out[i][plan.first_var] = rows[i][plan.first_var];
        }
        for step in &plan.steps {
            let link = step.chain.last().expect("chain is never empty");
            let cop = &self.pair_copulas[link.tree][link.edge];
            let (col_a, col_b) = &pair_cols[link.tree][link.edge];
            let which = if link.v_is_first { 2 } else { 1 };
            for i in 0..n {
                out[i][step.var] = clamp(cop.hfunc_unchecked(col_a[i], col_b[i], which));
            }
        }
        Ok(out)
    }
}
