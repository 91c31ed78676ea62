//! Deterministic summation.
//!
//! The split points depend only on the slice length, so the rounding of the
//! result is fixed no matter how the inputs were produced (serially or by any
//! number of workers).

const LEAF: usize = 8;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
