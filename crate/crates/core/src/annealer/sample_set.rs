use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, ControlParameters, Hamiltonian};

/// Configurations drawn in one programming event, with their energies under
/// the clean, unscaled reference parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    n_units: usize,
    spins: Vec<i8>,
    pub energies: Vec<f64>,
    /// Factor the reference was multiplied by before programming.
    pub scale: f64,
    pub seed: u64,
}

impl SampleSet {
    pub(crate) fn from_spins(
        graph: &Arc<BipartiteGraph>,
        reference: &ControlParameters,
        spins: Vec<i8>,
        scale: f64,
        seed: u64,
    ) -> Self {
        let n_units = graph.num_units();
        let energies = spins
            .chunks_exact(n_units)
            .map(|s| reference.energy_unchecked(graph, s))
            .collect();
        Self {
            n_units,
            spins,
            energies,
            scale,
            seed,
        }
    }

    /// Build a set from explicit configurations and energies.
    pub fn new(
        n_units: usize,
        configurations: Vec<Vec<i8>>,
        energies: Vec<f64>,
        scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if configurations.len() != energies.len() {
            return Err(Error::invalid("one energy per configuration is required"));
        }
        let mut spins = Vec::with_capacity(configurations.len() * n_units);
        for (r, c) in configurations.iter().enumerate() {
            if c.len() != n_units || c.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::invalid(format!("configuration {r} is not a ±1 vector of length {n_units}")));
            }
            spins.extend_from_slice(c);
        }
        Ok(Self {
            n_units,
            spins,
            energies,
            scale,
            seed,
        })
    }

    /// A set carrying only energies (no configurations), for estimators that
    /// look at energies alone.
    pub fn energies_only(energies: Vec<f64>, scale: f64) -> Self {
        Self {
            n_units: 0,
            spins: Vec::new(),
            energies,
            scale,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn num_units(&self) -> usize {
        self.n_units
    }

    pub fn has_configurations(&self) -> bool {
        self.n_units > 0 && self.spins.len() == self.n_units * self.len()
    }

    pub fn configuration(&self, r: usize) -> &[i8] {
        &self.spins[r * self.n_units..(r + 1) * self.n_units]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i8]> + '_ {
        self.spins.chunks_exact(self.n_units.max(1))
    }

    /// Recompute every energy under `reference` and compare exactly.
    pub fn verify_energies(&self, graph: &BipartiteGraph, reference: &ControlParameters) -> bool {
        self.has_configurations()
            && self
                .iter()
                .zip(&self.energies)
                .all(|(s, &e)| reference.energy_unchecked(graph, s) == e)
    }

    /// Same configurations with energies recomputed under other parameters.
    pub fn with_reference(&self, graph: &BipartiteGraph, reference: &ControlParameters) -> Self {
        let mut out = self.clone();
        out.energies = self
            .iter()
            .map(|s| reference.energy_unchecked(graph, s))
            .collect();
        out
    }

    /// `energy,s_0,...,s_{V-1}` header, then one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy");
        for i in 0..self.n_units {
            let _ = write!(out, ",s_{i}");
        }
        out.push('\n');
        for (r, e) in self.energies.iter().enumerate() {
            let _ = write!(out, "{e:?}");
            if self.has_configurations() {
                for s in self.configuration(r) {
                    let _ = write!(out, ",{s}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parse the CSV form. Scale and seed are not part of the format and are
    /// set to 1 and 0.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Format {
            line: 1,
            message: "empty sample file".into(),
        })?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.first() != Some(&"energy") {
            return Err(Error::Format {
                line: 1,
                message: "header must start with `energy`".into(),
            });
        }
        for (i, c) in cols[1..].iter().enumerate() {
            if *c != format!("s_{i}") {
                return Err(Error::Format {
                    line: 1,
                    message: format!("expected column s_{i}, found {c:?}"),
                });
            }
        }
        let n_units = cols.len() - 1;
        let mut spins = Vec::new();
        let mut energies = Vec::new();
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Format {
                line: n + 1,
                message,
            };
            let toks: Vec<&str> = line.split(',').collect();
            if toks.len() != n_units + 1 {
                return Err(bad(format!(
                    "row has {} fields, header has {}",
                    toks.len(),
                    n_units + 1
                )));
            }
            let e: f64 = toks[0]
                .parse()
                .map_err(|_| bad(format!("bad energy {:?}", toks[0])))?;
            energies.push(e);
            for t in &toks[1..] {
                match *t {
                    "1" | "+1" => spins.push(1),
                    "-1" => spins.push(-1),
                    other => return Err(bad(format!("bad spin {other:?}"))),
                }
            }
        }
        Ok(Self {
            n_units,
            spins,
            energies,
            scale: 1.0,
            seed: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let set = SampleSet::new(
            3,
            vec![vec![1, -1, 1], vec![-1, -1, -1]],
            vec![-0.30000000000000004, 1.5],
            1.0,
            0,
        )
        .unwrap();
        let csv = set.to_csv();
        assert!(csv.starts_with("energy,s_0,s_1,s_2\n"));
        assert_eq!(SampleSet::from_csv(&csv).unwrap(), set);
    }

    #[test]
    fn malformed_row_names_the_line() {
        let text = "energy,s_0,s_1\n0.5,1,-1\n0.1,1,2\n";
        match SampleSet::from_csv(text) {
            Err(Error::Format { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("bad spin"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
