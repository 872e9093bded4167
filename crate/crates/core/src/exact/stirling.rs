use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Stirling numbers of the second kind `S(k, l)` for `k <= k_max`, `l <= l_max`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    k_max: usize,
    l_max: usize,
    // rows[k][l], k = 0..=k_max
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    /// Fills the table with `S(k + 1, l) = l S(k, l) + S(k, l - 1)`,
    /// `S(k, 0) = 0` for `k >= 1` and `S(0, 0) = 1`.
    pub fn new(k_max: usize, l_max: usize) -> Self {
        let width = l_max + 1;
        let mut rows = Vec::with_capacity(k_max + 1);
        let mut first = vec![BigUint::zero(); width];
        first[0] = BigUint::one();
        rows.push(first);
        for k in 0..k_max {
            let prev: &Vec<BigUint> = &rows[k];
            let mut row = vec![BigUint::zero(); width];
            for l in 1..width {
                row[l] = &prev[l] * BigUint::from(l) + &prev[l - 1];
            }
            rows.push(row);
        }
        Self { k_max, l_max, rows }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `S(k, l)`; zero outside the tabulated range for `l > k`.
    pub fn get(&self, k: usize, l: usize) -> BigUint {
        if l > k {
            return BigUint::zero();
        }
        assert!(
            k <= self.k_max && l <= self.l_max,
            "S({k}, {l}) outside table"
        );
        self.rows[k][l].clone()
    }
}

/// `S(k, l)` for a single pair.
pub fn stirling2(k: usize, l: usize) -> BigUint {
    if l > k {
        return BigUint::zero();
    }
    StirlingTable::new(k, l).get(k, l)
}
