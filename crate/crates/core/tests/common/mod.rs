#![allow(dead_code)]

use itc_core::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Isotropic Gaussian blobs; returns rows and the blob index of each row.
pub fn blobs(rng: &mut ChaCha8Rng, centers: &[Vec<f64>], per_blob: usize, spread: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let noise = Normal::new(0.0, spread).unwrap();
    let mut rows = Vec::new();
    let mut blob = Vec::new();
    for (b, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            rows.push(c.iter().map(|&x| x + noise.sample(rng)).collect());
            blob.push(b);
        }
    }
    (rows, blob)
}

pub fn random_centers(rng: &mut ChaCha8Rng, k: usize, dims: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..dims).map(|_| rng.random_range(0.0..scale)).collect())
        .collect()
}

pub fn d1() -> Dataset {
    Dataset::from_csv_str("num:x,label:truth\n0,A\n1,A\n2,A\n10,B\n11,B\n").unwrap()
}

/// Forest whose tallest tree has height exactly `height`, shuffled so that
/// vertex indices carry no depth information.
pub fn forest_of_height(rng: &mut ChaCha8Rng, height: usize, extra: usize, trees: usize) -> InTree {
    // Build in depth order first: spine 0..=height, then extra vertices hung
    // below random earlier vertices of depth < height, then small trees.
    let mut parent: Vec<usize> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    for d in 0..=height {
        parent.push(d.saturating_sub(1));
        depth.push(d);
    }
    for _ in 0..extra {
        let p = loop {
            let p = rng.random_range(0..parent.len());
            if depth[p] < height {
                break p;
            }
        };
        parent.push(p);
        depth.push(depth[p] + 1);
    }
    for _ in 0..trees {
        let root = parent.len();
        parent.push(root);
        depth.push(0);
        let size = rng.random_range(0..=height.min(20));
        for _ in 0..size {
            let p = loop {
                let p = rng.random_range(root..parent.len());
                if depth[p] < height {
                    break p;
                }
            };
            parent.push(p);
            depth.push(depth[p] + 1);
        }
    }
    let n = parent.len();
    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(rng);
    let mut target = vec![0; n];
    let mut weight = vec![None; n];
    for v in 0..n {
        target[relabel[v]] = relabel[parent[v]];
        if parent[v] != v {
            weight[relabel[v]] = Some(rng.random_range(0.1..10.0));
        }
    }
    InTree::from_parts(target, weight, vec![]).unwrap()
}
