#![allow(dead_code)]

use isoatlas::charts::Spectrum;
use isoatlas::linalg::Permutation;
use proptest::prelude::*;

/// Sorted spectrum with consecutive gaps in `[0.5, 1.5]`.
pub fn spectrum(n: usize) -> impl Strategy<Value = Spectrum> {
    (-3.0..0.0_f64, prop::collection::vec(0.5..1.5_f64, n - 1)).prop_map(|(start, gaps)| {
        let mut v = vec![start];
        for g in gaps {
            v.push(v.last().unwrap() + g);
        }
        Spectrum::new(v).unwrap()
    })
}

pub fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

/// `(Λ, π, β)` with `β ∈ [−r, r]^{n−1}`.
pub fn chart_point(min_n: usize, max_n: usize, r: f64) -> impl Strategy<Value = (Spectrum, Permutation, Vec<f64>)> {
    (min_n..=max_n).prop_flat_map(move |n| (spectrum(n), permutation(n), prop::collection::vec(-r..r, n - 1)))
}
