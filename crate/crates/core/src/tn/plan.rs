use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{TensorNetwork, TnError};

/// Binary contraction tree over tensor ids. Serializes as nested pairs,
/// e.g. `[[0, 1], 2]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContractionPlan {
    Leaf(usize),
    Pair(Box<ContractionPlan>, Box<ContractionPlan>),
}

impl ContractionPlan {
    pub fn pair(a: ContractionPlan, b: ContractionPlan) -> Self {
        ContractionPlan::Pair(Box::new(a), Box::new(b))
    }

    /// Left-deep plan `((0·1)·2)·…` over `count` tensors.
    pub fn sequential(count: usize) -> Self {
        assert!(count > 0, "a plan needs at least one tensor");
        (1..count).fold(ContractionPlan::Leaf(0), |acc, i| {
            ContractionPlan::pair(acc, ContractionPlan::Leaf(i))
        })
    }

    /// Leaf ids in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            ContractionPlan::Leaf(id) => out.push(*id),
            ContractionPlan::Pair(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// Number of pairwise contractions.
    pub fn merges(&self) -> usize {
        match self {
            ContractionPlan::Leaf(_) => 0,
            ContractionPlan::Pair(a, b) => 1 + a.merges() + b.merges(),
        }
    }

    /// Checks that the leaves are exactly `0..count`, each once.
    pub fn validate(&self, count: usize) -> Result<(), TnError> {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        if leaves.len() != count || leaves.iter().enumerate().any(|(i, &l)| i != l) {
            return Err(TnError::MalformedPlan(format!(
                "leaves {:?} do not cover tensors 0..{count}",
                self.leaves()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, TnError> {
        serde_json::from_str(s).map_err(|e| TnError::MalformedPlan(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCost {
    /// Scalar multiply-adds over all pairwise contractions.
    pub flops: u128,
    /// Element count of the largest intermediate (or final) tensor.
    pub max_intermediate: u128,
    pub max_rank: usize,
}

/// Sorted `(label id, dim)` list.
type Shape = Vec<(u32, usize)>;

fn shapes(net: &TensorNetwork) -> Vec<Shape> {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    net.tensors()
        .iter()
        .map(|t| {
            let mut s: Shape = t
                .indices()
                .iter()
                .map(|i| {
                    let next = ids.len() as u32;
                    (*ids.entry(i.label.as_str()).or_insert(next), i.dim)
                })
                .collect();
            s.sort_unstable();
            s
        })
        .collect()
}

fn size(s: &Shape) -> u128 {
    s.iter().fold(1u128, |acc, &(_, d)| acc.saturating_mul(d as u128))
}

/// Result shape (symmetric difference) and multiply-add count (size of the
/// union) of contracting `a` with `b`.
fn merge(a: &Shape, b: &Shape) -> (Shape, u128) {
    let (mut i, mut j) = (0, 0);
    let mut result = Vec::with_capacity(a.len() + b.len());
    let mut union = 1u128;
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            result.push(a[i]);
            union = union.saturating_mul(a[i].1 as u128);
            i += 1;
        } else if take_b {
            result.push(b[j]);
            union = union.saturating_mul(b[j].1 as u128);
            j += 1;
        } else {
            union = union.saturating_mul(a[i].1 as u128);
            i += 1;
            j += 1;
        }
    }
    (result, union)
}

/// Shape-only cost of evaluating `plan` on `net`.
pub fn plan_cost(net: &TensorNetwork, plan: &ContractionPlan) -> Result<PlanCost, TnError> {
    plan.validate(net.len())?;
    let shapes = shapes(net);
    let mut cost = PlanCost::default();
    cost_rec(plan, &shapes, &mut cost);
    Ok(cost)
}

fn cost_rec(plan: &ContractionPlan, shapes: &[Shape], cost: &mut PlanCost) -> Shape {
    match plan {
        ContractionPlan::Leaf(id) => shapes[*id].clone(),
        ContractionPlan::Pair(a, b) => {
            let sa = cost_rec(a, shapes, cost);
            let sb = cost_rec(b, shapes, cost);
            let (r, flops) = merge(&sa, &sb);
            cost.flops = cost.flops.saturating_add(flops);
            cost.max_intermediate = cost.max_intermediate.max(size(&r));
            cost.max_rank = cost.max_rank.max(r.len());
            r
        }
    }
}

/// Greedy pairwise planner. Each step contracts the pair minimizing
/// `size(result) − (size(a) + size(b))` among pairs sharing an index (any
/// pair once the remaining tensors are disconnected). Ties go to the
/// smaller result rank, then to the lexicographically smallest id pair.
/// Intermediates get fresh ids counting up from the number of tensors.
pub fn plan_greedy(net: &TensorNetwork) -> Result<ContractionPlan, TnError> {
    if net.is_empty() {
        return Err(TnError::EmptyNetwork);
    }
    let mut active: HashMap<usize, (Shape, ContractionPlan)> = shapes(net)
        .into_iter()
        .enumerate()
        .map(|(id, s)| (id, (s, ContractionPlan::Leaf(id))))
        .collect();
    let mut holders: HashMap<u32, Vec<usize>> = HashMap::new();
    for (&id, (s, _)) in &active {
        for &(l, _) in s {
            holders.entry(l).or_default().push(id);
        }
    }
    let mut next_id = net.len();

    while active.len() > 1 {
        let mut pairs: BTreeSet<(usize, usize)> = holders
            .values()
            .filter(|h| h.len() == 2)
            .map(|h| (h[0].min(h[1]), h[0].max(h[1])))
            .collect();
        if pairs.is_empty() {
            let mut ids: Vec<usize> = active.keys().copied().collect();
            ids.sort_unstable();
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    pairs.insert((a, b));
                }
            }
        }
        let mut best: Option<((i128, usize, usize, usize), Shape)> = None;
        for &(a, b) in &pairs {
            let (sa, sb) = (&active[&a].0, &active[&b].0);
            let (r, _) = merge(sa, sb);
            let delta = size(&r) as i128 - (size(sa) as i128 + size(sb) as i128);
            let key = (delta, r.len(), a, b);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, r));
            }
        }
        let ((_, _, a, b), r) = best.expect("at least one candidate pair");
        let (sa, pa) = active.remove(&a).expect("active tensor");
        let (sb, pb) = active.remove(&b).expect("active tensor");
        for &(l, _) in sa.iter().chain(&sb) {
            if let Some(h) = holders.get_mut(&l) {
                h.retain(|&x| x != a && x != b);
            }
        }
        for &(l, _) in &r {
            holders.entry(l).or_default().push(next_id);
        }
        holders.retain(|_, h| !h.is_empty());
        active.insert(next_id, (r, ContractionPlan::pair(pa, pb)));
        next_id += 1;
    }
    Ok(active.into_values().next().expect("one tensor left").1)
}

pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 12;

/// Optimal plan by dynamic programming over all tensor subsets, minimizing
/// flops, then the largest intermediate. Among equal plans the first split
/// in enumeration order wins. Exponential: refuses more than `max_tensors`
/// tensors.
pub fn plan_exhaustive(net: &TensorNetwork, max_tensors: usize) -> Result<ContractionPlan, TnError> {
    let t = net.len();
    if t == 0 {
        return Err(TnError::EmptyNetwork);
    }
    if t > max_tensors || t > 20 {
        return Err(TnError::TooManyTensors {
            count: t,
            limit: max_tensors.min(20),
        });
    }
    let shapes = shapes(net);
    let full = (1usize << t) - 1;
    let mut result: Vec<Shape> = vec![Vec::new(); full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        result[s] = if rest == 0 {
            shapes[low].clone()
        } else {
            merge(&result[rest], &shapes[low]).0
        };
    }

    // best[s] = (flops, max_intermediate, split)
    let mut best: Vec<(u128, u128, usize)> = vec![(0, 0, 0); full + 1];
    let mut by_size: Vec<usize> = (1..=full).collect();
    by_size.sort_by_key(|s| s.count_ones());
    for s in by_size {
        if s.count_ones() == 1 {
            continue;
        }
        let low = s & s.wrapping_neg();
        let others = s ^ low;
        let mut choice: Option<(u128, u128, usize)> = None;
        // Enumerate left parts containing the lowest tensor.
        let mut sub = others;
        loop {
            let left = sub | low;
            if left != s {
                let right = s ^ left;
                let (_, ops) = merge(&result[left], &result[right]);
                let flops = best[left].0.saturating_add(best[right].0).saturating_add(ops);
                let inter = best[left].1.max(best[right].1).max(size(&result[s]));
                let better = match choice {
                    None => true,
                    Some((f, m, _)) => (flops, inter) < (f, m),
                };
                if better {
                    choice = Some((flops, inter, left));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        best[s] = choice.expect("subset with two or more tensors has a split");
    }
    Ok(build_plan(full, &best))
}

fn build_plan(s: usize, best: &[(u128, u128, usize)]) -> ContractionPlan {
    if s.count_ones() == 1 {
        return ContractionPlan::Leaf(s.trailing_zeros() as usize);
    }
    let left = best[s].2;
    ContractionPlan::pair(build_plan(left, best), build_plan(s ^ left, best))
}
