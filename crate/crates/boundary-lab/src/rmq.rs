//! Sparse-table range-minimum index over a fixed array of values.
//!
//! O(n log n) build, O(1) query, returns the argmin so callers can recover
//! the point behind a minimum. Ties break toward the smaller index.

#[derive(Debug, Clone)]
pub struct SparseRmq {
    values: Vec<f64>,
    // table[level][i] = argmin over [i, i + 2^level)
    table: Vec<Vec<u32>>,
}

impl SparseRmq {
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        let levels = if n <= 1 { 1 } else { n.ilog2() as usize + 1 };
        let mut table = Vec::with_capacity(levels);
        table.push((0..n as u32).collect::<Vec<u32>>());
        for lvl in 1..levels {
            let half = 1usize << (lvl - 1);
            let width = 1usize << lvl;
            if n < width {
                break;
            }
            let prev = &table[lvl - 1];
            let mut row = Vec::with_capacity(n - width + 1);
            for i in 0..=(n - width) {
                let a = prev[i];
                let b = prev[i + half];
                row.push(if values[a as usize] <= values[b as usize] { a } else { b });
            }
            table.push(row);
        }
        SparseRmq { values, table }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Argmin over the half-open index range `[lo, hi)`; `None` if empty.
    pub fn argmin(&self, lo: usize, hi: usize) -> Option<usize> {
        if lo >= hi || hi > self.values.len() {
            return None;
        }
        let span = hi - lo;
        let lvl = span.ilog2() as usize;
        let a = self.table[lvl][lo];
        let b = self.table[lvl][hi - (1 << lvl)];
        Some(if self.values[a as usize] <= self.values[b as usize] { a as usize } else { b as usize })
    }

    /// Minimum value over `[lo, hi)`; `None` if empty.
    pub fn min(&self, lo: usize, hi: usize) -> Option<f64> {
        self.argmin(lo, hi).map(|i| self.values[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn matches_linear_scan_on_randomized_queries() {
        let mut rng = crate::rng::seed_rng(42);
        let n = 513;
        let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let rmq = SparseRmq::new(values.clone());
        for _ in 0..10_000 {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..=n);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let brute = (lo..hi).min_by(|&i, &j| values[i].total_cmp(&values[j]));
            assert_eq!(rmq.argmin(lo, hi), brute, "range [{lo},{hi})");
        }
    }

    #[test]
    fn handles_tiny_arrays() {
        let rmq = SparseRmq::new(vec![3.0]);
        assert_eq!(rmq.argmin(0, 1), Some(0));
        assert_eq!(rmq.argmin(1, 1), None);
        let empty = SparseRmq::new(vec![]);
        assert_eq!(empty.argmin(0, 0), None);
    }
}
