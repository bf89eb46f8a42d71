//! Resampling units and the session bootstrap.

use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;

use crate::rng::tagged_stream;

/// Bootstrap settings; units are resampled with replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub seed: u64,
    /// Sessions are cut into equal-count blocks until there are at least
    /// this many resampling units.
    pub min_units: usize,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            replicates: 200,
            seed: 0,
            min_units: 20,
        }
    }
}

/// A block of consecutive events `events` inside the session `session`.
#[derive(Debug, Clone)]
pub(crate) struct Unit {
    pub session: Range<usize>,
    pub events: Range<usize>,
}

pub(crate) fn make_units(sessions: &[Range<usize>], min_units: usize) -> Vec<Unit> {
    let live: Vec<&Range<usize>> = sessions.iter().filter(|s| !s.is_empty()).collect();
    let per = if live.is_empty() { 1 } else { min_units.div_ceil(live.len()).max(1) };
    let mut out = Vec::new();
    for s in live {
        let k = per.min(s.len());
        for b in 0..k {
            let a = s.start + s.len() * b / k;
            let e = s.start + s.len() * (b + 1) / k;
            out.push(Unit {
                session: s.clone(),
                events: a..e,
            });
        }
    }
    out
}

const BOOTSTRAP_TAG: u64 = 0xB0;

/// Multiplicity of each unit in `replicates` resamples, drawn in parallel
/// from per-replicate streams.
pub(crate) fn resample_counts(n_units: usize, opts: &BootstrapOptions) -> Vec<Vec<u32>> {
    (0..opts.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = tagged_stream(opts.seed, BOOTSTRAP_TAG, r as u64);
            let mut counts = vec![0u32; n_units];
            for _ in 0..n_units {
                counts[rng.random_range(0..n_units)] += 1;
            }
            counts
        })
        .collect()
}

/// Sample standard deviation of the finite entries at each position.
pub(crate) fn spread<T: crate::Real>(replicates: &[Vec<Option<T>>], len: usize) -> Vec<Option<T>> {
    (0..len)
        .map(|i| {
            let vals: Vec<T> = replicates.iter().filter_map(|r| r[i]).filter(|v| v.is_finite()).collect();
            if vals.len() < 2 {
                return None;
            }
            let n = T::of_usize(vals.len());
            let mean = vals.iter().copied().sum::<T>() / n;
            let ss = vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>();
            Some((ss / (n - T::one())).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sessions_are_split_to_reach_unit_count() {
        let u = make_units(&[0..100, 100..150], 5);
        assert_eq!(u.len(), 6);
        assert_eq!(u[0].events, 0..33);
        assert_eq!(u[3].events, 100..116);
        assert!(u.iter().all(|x| x.events.start >= x.session.start && x.events.end <= x.session.end));
    }

    #[test]
    fn resampling_is_reproducible() {
        let o = BootstrapOptions { replicates: 3, seed: 9, min_units: 1 };
        let a = resample_counts(10, &o);
        assert_eq!(a, resample_counts(10, &o));
        assert!(a.iter().all(|c| c.iter().sum::<u32>() == 10));
    }
}
