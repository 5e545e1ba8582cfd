//! Tensor-network contraction of diagrams.
//!
//! Every edge becomes a label shared by the two node tensors it joins. Wires
//! running straight from an input to an output get an explicit delta tensor.
//! Contraction is pairwise; a plan lists the pairs in order, with the result
//! of step `k` receiving id `n + k` where `n` is the number of leaf tensors.

use rand::Rng;

use super::{permute_data, Tensor, TensorError, TensorResult, MAX_ENTRIES};
use crate::diagram::{Diagram, Endpoint};
use crate::C64;

/// Ordered pairwise contraction steps and their estimated cost.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionPlan {
    pub steps: Vec<(usize, usize)>,
    /// Sum over steps of the product of all label dimensions involved.
    pub cost: f64,
}

struct Labelled {
    labels: Vec<usize>,
    data: Vec<C64>,
}

struct Network {
    dims: Vec<usize>,
    leaves: Vec<Labelled>,
    open: Vec<usize>,
    in_shape: Vec<usize>,
    out_shape: Vec<usize>,
}

fn delta(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    v
}

fn build(d: &Diagram) -> TensorResult<Network> {
    let mut dims = Vec::new();
    let mut label_of_edge = std::collections::HashMap::new();
    for e in d.edges() {
        label_of_edge.insert((e.src, e.tgt), dims.len());
        dims.push(e.ty.index_size());
    }
    let label_at = |p: Endpoint| -> usize {
        let e = d.edges().iter().find(|e| e.src == p || e.tgt == p).expect("every port is wired");
        label_of_edge[&(e.src, e.tgt)]
    };
    let mut leaves = Vec::new();
    for (id, g) in d.nodes() {
        let t = g.tensor()?;
        let labels: Vec<usize> = (0..g.inputs().len())
            .map(|k| label_at(Endpoint::In(id, k)))
            .chain((0..g.outputs().len()).map(|k| label_at(Endpoint::Out(id, k))))
            .collect();
        leaves.push(trace_repeats(Labelled { labels, data: t.into_data() }, &dims));
    }
    let mut open: Vec<usize> = (0..d.inputs().len()).map(|i| label_at(Endpoint::Input(i))).collect();
    for j in 0..d.outputs().len() {
        let e = d.edge_to(Endpoint::Output(j)).expect("outputs are wired");
        let l = label_of_edge[&(e.src, e.tgt)];
        if let Endpoint::Input(_) = e.src {
            let fresh = dims.len();
            dims.push(dims[l]);
            leaves.push(Labelled { labels: vec![l, fresh], data: delta(dims[l]) });
            open.push(fresh);
        } else {
            open.push(l);
        }
    }
    let in_shape = d.inputs().iter().map(|w| w.index_size()).collect();
    let out_shape = d.outputs().iter().map(|w| w.index_size()).collect();
    Ok(Network { dims, leaves, open, in_shape, out_shape })
}

/// Sum over repeated labels within one tensor (self-loops).
fn trace_repeats(t: Labelled, dims: &[usize]) -> Labelled {
    let mut repeated = None;
    'outer: for a in 0..t.labels.len() {
        for b in a + 1..t.labels.len() {
            if t.labels[a] == t.labels[b] {
                repeated = Some((a, b));
                break 'outer;
            }
        }
    }
    let Some((a, b)) = repeated else { return t };
    let shape: Vec<usize> = t.labels.iter().map(|&l| dims[l]).collect();
    let keep: Vec<usize> = (0..t.labels.len()).filter(|&k| k != a && k != b).collect();
    let mut perm = keep.clone();
    perm.push(a);
    perm.push(b);
    let moved = permute_data(&t.data, &shape, &perm);
    let n = shape[a];
    let rest: usize = keep.iter().map(|&k| shape[k]).product();
    let data = (0..rest).map(|r| (0..n).map(|i| moved[r * n * n + i * n + i]).sum()).collect();
    let labels = keep.iter().map(|&k| t.labels[k]).collect();
    trace_repeats(Labelled { labels, data }, dims)
}

fn size_of(labels: &[usize], dims: &[usize]) -> f64 { labels.iter().map(|&l| dims[l] as f64).product() }

fn result_labels(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|l| !b.contains(l)).chain(b.iter().filter(|l| !a.contains(l))).copied().collect()
}

fn union_size(a: &[usize], b: &[usize], dims: &[usize]) -> f64 {
    size_of(a, dims) * b.iter().filter(|l| !a.contains(l)).map(|&l| dims[l] as f64).product::<f64>()
}

fn contract_pair(a: &Labelled, b: &Labelled, dims: &[usize]) -> TensorResult<Labelled> {
    let shared: Vec<usize> = a.labels.iter().filter(|l| b.labels.contains(l)).copied().collect();
    let fa: Vec<usize> = a.labels.iter().filter(|l| !shared.contains(l)).copied().collect();
    let fb: Vec<usize> = b.labels.iter().filter(|l| !shared.contains(l)).copied().collect();
    let (na, ns, nb) = (
        fa.iter().map(|&l| dims[l]).product::<usize>(),
        shared.iter().map(|&l| dims[l]).product::<usize>(),
        fb.iter().map(|&l| dims[l]).product::<usize>(),
    );
    if na.saturating_mul(nb) > MAX_ENTRIES {
        return Err(TensorError::TooLarge(na.saturating_mul(nb)));
    }
    let pos = |labels: &[usize], l: usize| labels.iter().position(|&x| x == l).expect("label present");
    let shape_a: Vec<usize> = a.labels.iter().map(|&l| dims[l]).collect();
    let shape_b: Vec<usize> = b.labels.iter().map(|&l| dims[l]).collect();
    let perm_a: Vec<usize> = fa.iter().chain(&shared).map(|&l| pos(&a.labels, l)).collect();
    let perm_b: Vec<usize> = shared.iter().chain(&fb).map(|&l| pos(&b.labels, l)).collect();
    let ma = permute_data(&a.data, &shape_a, &perm_a);
    let mb = permute_data(&b.data, &shape_b, &perm_b);
    let mut out = vec![C64::new(0.0, 0.0); na * nb];
    for i in 0..na {
        let row = &mut out[i * nb..(i + 1) * nb];
        for k in 0..ns {
            let x = ma[i * ns + k];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            let brow = &mb[k * nb..(k + 1) * nb];
            for (o, y) in row.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
    Ok(Labelled { labels: fa.into_iter().chain(fb).collect(), data: out })
}

fn greedy(net: &Network) -> ContractionPlan {
    let mut live: Vec<(usize, Vec<usize>)> = net.leaves.iter().enumerate().map(|(i, t)| (i, t.labels.clone())).collect();
    let leaves = live.len();
    let mut next = leaves;
    let mut steps = Vec::new();
    let mut cost = 0.0;
    while live.len() > 1 {
        // ties go to pairs that extend an existing intermediate, giving a
        // left fold on chains
        let mut best: Option<(bool, f64, f64, bool, usize, usize)> = None;
        for x in 0..live.len() {
            for y in x + 1..live.len() {
                let (la, lb) = (&live[x].1, &live[y].1);
                let connected = la.iter().any(|l| lb.contains(l));
                let res = size_of(&result_labels(la, lb), &net.dims);
                let step = union_size(la, lb, &net.dims);
                let fresh = live[x].0 < leaves && live[y].0 < leaves;
                let key = (!connected, res, step, fresh, x, y);
                let better = match &best {
                    None => true,
                    Some(b) => (key.0, key.1, key.2, key.3) < (b.0, b.1, b.2, b.3),
                };
                if better {
                    best = Some(key);
                }
            }
        }
        let (_, _, step, _, x, y) = best.expect("at least two live tensors");
        cost += step;
        let (ia, la) = live[x].clone();
        let (ib, lb) = live[y].clone();
        steps.push((ia, ib));
        live.remove(y);
        live.remove(x);
        live.push((next, result_labels(&la, &lb)));
        next += 1;
    }
    ContractionPlan { steps, cost }
}

fn run(net: Network, plan: &ContractionPlan) -> TensorResult<Tensor> {
    let n = net.leaves.len();
    if plan.steps.len() != n.saturating_sub(1) {
        return Err(TensorError::InvalidPlan(format!("{} steps for {} tensors", plan.steps.len(), n)));
    }
    let mut slots: Vec<Option<Labelled>> = net.leaves.into_iter().map(Some).collect();
    for &(a, b) in &plan.steps {
        let take = |slots: &mut Vec<Option<Labelled>>, i: usize| {
            slots.get_mut(i).and_then(Option::take).ok_or_else(|| TensorError::InvalidPlan(format!("tensor {i} unavailable")))
        };
        let ta = take(&mut slots, a)?;
        let tb = take(&mut slots, b)?;
        slots.push(Some(contract_pair(&ta, &tb, &net.dims)?));
    }
    let last = match slots.into_iter().flatten().collect::<Vec<_>>().pop() {
        Some(t) => t,
        None => Labelled { labels: Vec::new(), data: vec![C64::new(1.0, 0.0)] },
    };
    let shape: Vec<usize> = last.labels.iter().map(|&l| net.dims[l]).collect();
    let perm: Vec<usize> = net
        .open
        .iter()
        .map(|l| last.labels.iter().position(|x| x == l))
        .collect::<Option<_>>()
        .ok_or_else(|| TensorError::InvalidPlan("open label lost".into()))?;
    let data = permute_data(&last.data, &shape, &perm);
    Tensor::new(&net.in_shape, &net.out_shape, data)
}

/// Greedy plan: repeatedly contract the connected pair with the smallest
/// result, falling back to outer products only when nothing is connected.
pub fn contract_order(d: &Diagram) -> TensorResult<ContractionPlan> { Ok(greedy(&build(d)?)) }

/// A uniformly random pairwise plan, for plan-independence checks.
pub fn random_plan<R: Rng>(d: &Diagram, rng: &mut R) -> TensorResult<ContractionPlan> {
    let net = build(d)?;
    let mut live: Vec<(usize, Vec<usize>)> = net.leaves.iter().enumerate().map(|(i, t)| (i, t.labels.clone())).collect();
    let mut next = live.len();
    let mut steps = Vec::new();
    let mut cost = 0.0;
    while live.len() > 1 {
        let x = rng.random_range(0..live.len());
        let mut y = rng.random_range(0..live.len() - 1);
        if y >= x {
            y += 1;
        }
        let (ia, la) = live[x].clone();
        let (ib, lb) = live[y].clone();
        cost += union_size(&la, &lb, &net.dims);
        steps.push((ia, ib));
        live.remove(x.max(y));
        live.remove(x.min(y));
        live.push((next, result_labels(&la, &lb)));
        next += 1;
    }
    Ok(ContractionPlan { steps, cost })
}

/// Cost of summing the whole network in one go: the product of every label
/// dimension.
pub fn naive_cost(d: &Diagram) -> TensorResult<f64> {
    let net = build(d)?;
    Ok(net.dims.iter().map(|&x| x as f64).product())
}

/// The dense tensor of a diagram, contracted in greedy order.
pub fn evaluate(d: &Diagram) -> TensorResult<Tensor> {
    let net = build(d)?;
    let plan = greedy(&net);
    run(net, &plan)
}

pub fn evaluate_with_plan(d: &Diagram, plan: &ContractionPlan) -> TensorResult<Tensor> { run(build(d)?, plan) }
