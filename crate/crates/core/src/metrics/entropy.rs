use super::contingency::{contingency, ContingencyTable};
use crate::error::Result;
use crate::partition::Partition;

/// `1 − H(truth | pred) / H(truth)`; 1 when `truth` has a single class.
pub fn homogeneity(pred: &Partition, truth: &Partition) -> Result<f64> {
    Ok(homogeneity_from_table(&contingency(pred, truth)?))
}

/// `homogeneity(truth, pred)`.
pub fn completeness(pred: &Partition, truth: &Partition) -> Result<f64> {
    homogeneity(truth, pred)
}

/// Harmonic mean of homogeneity and completeness, 0 when both are 0.
pub fn v_measure(pred: &Partition, truth: &Partition) -> Result<f64> {
    let t = contingency(pred, truth)?;
    let h = homogeneity_from_table(&t);
    let c = homogeneity_from_table(&t.transpose());
    Ok(harmonic(h, c))
}

/// Normalized mutual information, arithmetic-mean normalization; identical
/// to [`v_measure`].
pub fn nmi(pred: &Partition, truth: &Partition) -> Result<f64> {
    v_measure(pred, truth)
}

fn harmonic(h: f64, c: f64) -> f64 {
    if h + c == 0.0 {
        0.0
    } else {
        2.0 * h * c / (h + c)
    }
}

// Rows are the evaluated partition, columns the reference classes.
fn homogeneity_from_table(t: &ContingencyTable) -> f64 {
    let n = t.total() as f64;
    let h_classes = entropy_of_counts(t.col_sums(), n);
    if h_classes == 0.0 {
        return 1.0;
    }
    // H(C|K) = −Σ (n_ij/n) ln(n_ij/a_i); summed in sorted (n_ij, a_i) order.
    let mut cells: Vec<(u64, u64)> = t.nonzero().map(|(i, _, c)| (c, t.row_sums()[i])).collect();
    cells.sort_unstable();
    let h_cond: f64 = -cells
        .iter()
        .map(|&(c, a)| (c as f64 / n) * (c as f64 / a as f64).ln())
        .sum::<f64>();
    (1.0 - h_cond / h_classes).clamp(0.0, 1.0)
}

fn entropy_of_counts(counts: &[u64], n: f64) -> f64 {
    let mut c: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    c.sort_unstable();
    -c.iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}
