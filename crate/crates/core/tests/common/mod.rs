#![allow(dead_code)]

use rand::Rng;
use weakhj::rng::{stream, Stream};
use weakhj::space::{build_example, build_from_graph, ExampleKind};
use weakhj::{CostFunction, MetricSpace};

pub fn rng(seed: u64, index: u64) -> Stream {
    stream(seed, index)
}

/// Random connected weighted graph on `n` vertices: a random tree plus extra edges.
pub fn random_space(n: usize, r: &mut Stream) -> MetricSpace {
    let mut edges = Vec::new();
    for i in 1..n {
        let j = r.random_range(0..i);
        edges.push((i, j, r.random_range(0.5..2.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < 0.3 {
                edges.push((i, j, r.random_range(0.5..2.0)));
            }
        }
    }
    build_from_graph(n, &edges).expect("tree plus extra edges is connected")
}

pub fn random_f(n: usize, amp: f64, r: &mut Stream) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-amp..amp)).collect()
}

pub fn cost_variants() -> Vec<CostFunction> {
    vec![
        CostFunction::quadratic(),
        CostFunction::power(1.5).unwrap(),
        CostFunction::power(3.0).unwrap(),
        CostFunction::quadratic_linear(0.5, 1.0).unwrap(),
    ]
}

pub fn random_qlin(r: &mut Stream) -> CostFunction {
    CostFunction::quadratic_linear(r.random_range(0.2..2.0), r.random_range(0.2..2.0)).unwrap()
}

pub fn sweep_spaces() -> Vec<(ExampleKind, MetricSpace)> {
    [
        ExampleKind::TwoPoint,
        ExampleKind::Path(5),
        ExampleKind::Cycle(6),
        ExampleKind::Complete(4),
        ExampleKind::Hypercube(3),
    ]
    .into_iter()
    .map(|k| (k, build_example(k).unwrap()))
    .collect()
}
