use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Rbm, SpinConfiguration};
use crate::seed::rng_from;
use crate::stats::sigmoid;

#[inline]
fn draw(rng: &mut impl Rng, field: f64) -> i8 {
    // P(s = +1) = e^f / (e^f + e^-f)
    if rng.random::<f64>() < sigmoid(2.0 * field) {
        1
    } else {
        -1
    }
}

/// Resample the hidden layer given the visible one, in place.
pub(crate) fn sample_hidden(rbm: &Rbm, state: &mut [i8], fields: &mut [f64], rng: &mut impl Rng) {
    let n = rbm.num_visible();
    let (v, u) = state.split_at_mut(n);
    rbm.fill_hidden_fields(v, fields);
    for (s, &f) in u.iter_mut().zip(fields.iter()) {
        *s = draw(rng, f);
    }
}

pub(crate) fn sample_visible(rbm: &Rbm, state: &mut [i8], fields: &mut [f64], rng: &mut impl Rng) {
    let n = rbm.num_visible();
    let (v, u) = state.split_at_mut(n);
    rbm.fill_visible_fields(u, &mut fields[..n]);
    for (s, &f) in v.iter_mut().zip(fields.iter()) {
        *s = draw(rng, f);
    }
}

/// One block-Gibbs step: hidden layer given visible, then visible given hidden.
pub fn gibbs_sweep(rbm: &Rbm, state: &mut [i8], rng: &mut impl Rng) {
    let mut fields = vec![0.0; rbm.num_visible().max(rbm.num_hidden())];
    sample_hidden(rbm, state, &mut fields[..rbm.num_hidden()], rng);
    sample_visible(rbm, state, &mut fields, rng);
}

/// Run `steps` block-Gibbs steps from `init`.
pub fn gibbs_chain(
    rbm: &Rbm,
    steps: usize,
    init: &SpinConfiguration,
    seed: u64,
) -> Result<SpinConfiguration> {
    if init.len() != rbm.graph.num_units() {
        return Err(Error::invalid(format!(
            "initial state has {} spins, model has {} units",
            init.len(),
            rbm.graph.num_units()
        )));
    }
    let mut state = init.values().to_vec();
    let mut rng = rng_from(seed);
    for _ in 0..steps {
        gibbs_sweep(rbm, &mut state, &mut rng);
    }
    SpinConfiguration::new(state)
}
