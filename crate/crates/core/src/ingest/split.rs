//! Greedy iterative stratification for multi-label data.
//!
//! Labels are processed rarest first; each unassigned example carrying the
//! current label goes to the subset that still wants the most positives of
//! that label, with subset capacity enforced so the test set has exactly
//! `round(N · test_fraction)` examples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabelMatrix;
use crate::error::{Error, Result};

const TRAIN: usize = 0;
const TEST: usize = 1;

/// Returns sorted `(train, test)` index sets.
pub fn split(labels: &LabelMatrix, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Contract(format!(
            "test fraction {test_fraction} must lie in (0, 1)"
        )));
    }
    let n = labels.n();
    let m = labels.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fractions = [1.0 - test_fraction, test_fraction];

    let n_test = (n as f64 * test_fraction).round() as usize;
    let mut capacity = [n - n_test, n_test];

    let mut wanted = vec![[0.0f64; 2]; m];
    for (j, w) in wanted.iter_mut().enumerate() {
        let count = labels.column_count(j);
        if count < 2 {
            log::warn!(
                "category {:?} has {count} positive(s); placement is best-effort",
                labels.names()[j]
            );
        }
        *w = [count as f64 * fractions[0], count as f64 * fractions[1]];
    }

    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    loop {
        // rarest label among unassigned examples
        let mut remaining = vec![0usize; m];
        for &i in &order {
            if assigned[i].is_none() {
                for (j, r) in remaining.iter_mut().enumerate() {
                    if labels.get(i, j) {
                        *r += 1;
                    }
                }
            }
        }
        let Some(label) = (0..m)
            .filter(|&j| remaining[j] > 0)
            .min_by_key(|&j| (remaining[j], j))
        else {
            break;
        };

        for &i in &order {
            if assigned[i].is_some() || !labels.get(i, label) {
                continue;
            }
            let subset = choose(&wanted[label], &capacity, &mut rng);
            assigned[i] = Some(subset);
            capacity[subset] -= 1;
            for (j, w) in wanted.iter_mut().enumerate() {
                if labels.get(i, j) {
                    w[subset] -= 1.0;
                }
            }
        }
    }

    // examples with no labels fill the remaining capacity
    for &i in &order {
        if assigned[i].is_none() {
            let subset = if capacity[TEST] as f64 * fractions[TRAIN]
                > capacity[TRAIN] as f64 * fractions[TEST]
            {
                TEST
            } else {
                TRAIN
            };
            let subset = if capacity[subset] == 0 { 1 - subset } else { subset };
            assigned[i] = Some(subset);
            capacity[subset] -= 1;
        }
    }

    let mut train = Vec::with_capacity(n - n_test);
    let mut test = Vec::with_capacity(n_test);
    for (i, a) in assigned.iter().enumerate() {
        match a {
            Some(TEST) => test.push(i),
            _ => train.push(i),
        }
    }
    Ok((train, test))
}

fn choose(wanted: &[f64; 2], capacity: &[usize; 2], rng: &mut ChaCha8Rng) -> usize {
    if capacity[TRAIN] == 0 {
        return TEST;
    }
    if capacity[TEST] == 0 {
        return TRAIN;
    }
    if wanted[TRAIN] > wanted[TEST] {
        TRAIN
    } else if wanted[TEST] > wanted[TRAIN] {
        TEST
    } else if capacity[TRAIN] != capacity[TEST] {
        if capacity[TRAIN] > capacity[TEST] {
            TRAIN
        } else {
            TEST
        }
    } else if rng.random_bool(0.5) {
        TEST
    } else {
        TRAIN
    }
}
