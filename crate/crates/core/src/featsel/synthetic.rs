use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Dataset;

/// Balanced binary labels; feature 0 is the label flipped with probability
/// `flip`, the other `noise` features are fair coins.
pub fn informative_with_noise(rows: usize, noise: usize, flip: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(rows);
    let mut labels = Vec::with_capacity(rows);
    for r in 0..rows {
        let c = (r % 2) as u32;
        let mut row = vec![c ^ rng.gen_bool(flip) as u32];
        row.extend((0..noise).map(|_| rng.gen_range(0..2)));
        data.push(row);
        labels.push(c.to_string());
    }
    Dataset::from_rows(&data, &labels).expect("well-formed rows")
}

/// Three features repeated `copies` times over an 8-row pattern: `d` agrees
/// with the label on 6 rows, feature 2 duplicates `d`, and `e` marks the rows
/// where `d` is wrong. `e` alone carries no information, but `d` and `e`
/// together determine the label.
pub fn duplicated_feature_dataset(copies: usize) -> Dataset {
    const LABEL: [u32; 8] = [0, 0, 0, 0, 1, 1, 1, 1];
    const D: [u32; 8] = [0, 0, 0, 1, 1, 1, 1, 0];
    let mut data = Vec::with_capacity(8 * copies);
    let mut labels = Vec::with_capacity(8 * copies);
    for _ in 0..copies {
        for r in 0..8 {
            data.push(vec![D[r], D[r], D[r] ^ LABEL[r]]);
            labels.push(LABEL[r].to_string());
        }
    }
    Dataset::from_rows(&data, &labels).expect("well-formed rows")
}
