//! Regular partitions b_t(n) and regular bipartitions B_{u,v}(n).
//!
//! The series path computes B_{u,v} through the same Euler-product engine that
//! every congruence check uses: f_u f_v / f_1^2. The oracle path counts by
//! dynamic programming over allowed part sizes and convolves the two tables,
//! sharing no code with the series engine; it is the independent ground truth
//! for small n.

use serde::{Deserialize, Serialize};

use crate::error::{QlabError, Result};
use crate::series::{QSeries, Ring};

/// Largest n the enumeration oracle accepts.
pub const ORACLE_MAX_N: u64 = 40;

/// The (u, v) pair: parts of the first partition avoid multiples of u,
/// parts of the second avoid multiples of v.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitionParams {
    pub u: u64,
    pub v: u64,
}

impl BipartitionParams {
    pub fn new(u: u64, v: u64) -> Result<Self> {
        if u < 2 || v < 2 {
            return Err(QlabError::InvalidSpec(format!(
                "bipartition parameters must satisfy u, v >= 2 (got {u}, {v})"
            )));
        }
        Ok(BipartitionParams { u, v })
    }
}

/// Generating series of t-regular partition counts: f_t / f_1.
pub fn regular_partition_series(t: u64, ring: Ring, trunc: usize) -> Result<QSeries> {
    assert!(t >= 2, "t must be at least 2");
    let ft = QSeries::euler_product(t, ring, trunc)?;
    let f1 = QSeries::euler_product(1, ring, trunc)?;
    ft.div(&f1)
}

/// Generating series of B_{u,v}(n): f_u f_v / f_1^2.
pub fn bipartition_series(params: BipartitionParams, ring: Ring, trunc: usize) -> Result<QSeries> {
    let fu = QSeries::euler_product(params.u, ring, trunc)?;
    let fv = QSeries::euler_product(params.v, ring, trunc)?;
    let f1 = QSeries::euler_product(1, ring, trunc)?;
    fu.mul(&fv)?.div(&f1)?.div(&f1)
}

/// Count of t-regular partitions of 0..=n by direct DP over allowed parts
/// (parts not divisible by t). Independent of the series engine.
fn regular_partition_table(t: u64, n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut table = vec![0u64; n + 1];
    table[0] = 1;
    for part in 1..=n {
        if part as u64 % t == 0 {
            continue;
        }
        for total in part..=n {
            table[total] += table[total - part];
        }
    }
    table
}

/// B_{u,v}(n) by explicit enumeration: convolution of two independent
/// partition-counting DP tables, guarded to n <= 40.
pub fn bipartition_oracle(params: BipartitionParams, n: u64) -> Result<u64> {
    if n > ORACLE_MAX_N {
        return Err(QlabError::InvalidSpec(format!(
            "oracle accepts n <= {ORACLE_MAX_N} (got {n})"
        )));
    }
    let a = regular_partition_table(params.u, n);
    let b = regular_partition_table(params.v, n);
    Ok((0..=n as usize).map(|j| a[j] * b[n as usize - j]).sum())
}
