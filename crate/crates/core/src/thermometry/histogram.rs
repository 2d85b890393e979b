use crate::annealer::SampleSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub midpoints: Vec<f64>,
    pub total: usize,
}

impl EnergyHistogram {
    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    /// Relative frequency of bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        self.counts[k] as f64 / self.total as f64
    }

    /// Bin holding `energy`, if inside the edges.
    pub fn bin_of(&self, energy: f64) -> Option<usize> {
        locate(&self.bin_edges, energy)
    }
}

/// `K = ⌈√(2R)⌉`.
pub fn bin_count(samples: usize) -> usize {
    let target = 2 * samples;
    let mut k = (target as f64).sqrt().ceil() as usize;
    while k > 0 && (k - 1) * (k - 1) >= target {
        k -= 1;
    }
    while k * k < target {
        k += 1;
    }
    k.max(1)
}

/// `k + 1` equally spaced edges over the pooled range of `sets`. A
/// degenerate range is widened to one unit around the common value.
pub fn pooled_edges(sets: &[&SampleSet], k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::invalid("at least one bin is required"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for set in sets {
        if set.is_empty() {
            return Err(Error::invalid("sample set is empty"));
        }
        for &e in &set.energies {
            lo = lo.min(e);
            hi = hi.max(e);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("energies must be finite"));
    }
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / k as f64;
    let mut edges: Vec<f64> = (0..k).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    Ok(edges)
}

fn locate(edges: &[f64], e: f64) -> Option<usize> {
    let k = edges.len() - 1;
    if e < edges[0] || e > edges[k] {
        return None;
    }
    // first edge strictly greater than e, minus one; the top edge closes the last bin
    let idx = edges.partition_point(|&x| x <= e);
    Some(idx.saturating_sub(1).min(k - 1))
}

/// Count energies in half-open bins `[e_k, e_{k+1})`, the last bin closed.
pub fn bin_energies(samples: &SampleSet, edges: &[f64]) -> Result<EnergyHistogram> {
    if samples.is_empty() {
        return Err(Error::invalid("sample set is empty"));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("bin edges must be strictly increasing"));
    }
    let mut counts = vec![0usize; edges.len() - 1];
    for &e in &samples.energies {
        let k = locate(edges, e).ok_or_else(|| {
            Error::invalid(format!(
                "energy {e} outside bin range [{}, {}]",
                edges[0],
                edges[edges.len() - 1]
            ))
        })?;
        counts[k] += 1;
    }
    let midpoints = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Ok(EnergyHistogram {
        bin_edges: edges.to_vec(),
        counts,
        midpoints,
        total: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn bin_count_rule() {
        assert_eq!(bin_count(1000), 45);
        assert_eq!(bin_count(10_000), 142);
        assert_eq!(bin_count(2), 2);
        assert_eq!(bin_count(8), 4);
    }

    #[test]
    fn degenerate_spectrum_fills_one_bin() {
        let set = SampleSet::energies_only(vec![-3.0; 50], 1.0);
        let edges = pooled_edges(&[&set], 10).unwrap();
        let h = bin_energies(&set, &edges).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 50);
    }

    #[test]
    fn uniform_energies_match_direct_count() {
        let mut rng = crate::seed::rng_from(4);
        let energies: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let set = SampleSet::energies_only(energies.clone(), 1.0);
        let edges: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let h = bin_energies(&set, &edges).unwrap();
        let mut oracle = [0usize; 10];
        for e in energies {
            let mut k = 0;
            while k < 9 && e >= edges[k + 1] {
                k += 1;
            }
            oracle[k] += 1;
        }
        assert_eq!(h.counts, oracle);
        assert_eq!(h.total, 1000);
        for (k, m) in h.midpoints.iter().enumerate() {
            assert_eq!(*m, 0.5 * (edges[k] + edges[k + 1]));
        }
    }

    #[test]
    fn last_bin_is_closed() {
        let set = SampleSet::energies_only(vec![0.0, 1.0, 2.0], 1.0);
        let h = bin_energies(&set, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(h.counts, vec![1, 2]);
    }

    #[test]
    fn empty_and_out_of_range_inputs() {
        let empty = SampleSet::energies_only(vec![], 1.0);
        assert!(bin_energies(&empty, &[0.0, 1.0]).is_err());
        let set = SampleSet::energies_only(vec![3.0], 1.0);
        assert!(bin_energies(&set, &[0.0, 1.0]).is_err());
    }
}
