//! Estimated autocorrelation curves and their export formats.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcfKind {
    /// indexed by the number of events between the pair
    Step,
    /// indexed by the physical time between the pair
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcfCurve<T> {
    pub kind: AcfKind,
    /// Integer lags for step curves, geometric bin centres for time curves.
    pub lags: Vec<T>,
    /// `None` where no pair fell in the bin.
    pub values: Vec<Option<T>>,
    pub pair_counts: Vec<u64>,
    pub stderr: Vec<Option<T>>,
    pub normalized: bool,
    /// Bin edges of a time curve (`lags.len() + 1` of them); empty for step curves.
    pub edges: Vec<T>,
    /// Bootstrap replicate curves, same layout as `values`.
    pub replicates: Vec<Vec<Option<T>>>,
}

impl<T: Real> AcfCurve<T> {
    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    pub fn value_at(&self, i: usize) -> Option<T> {
        self.values.get(i).copied().flatten()
    }

    fn select(&self, keep: &[usize]) -> Self {
        let pick = |v: &[Option<T>]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Self {
            kind: self.kind,
            lags: keep.iter().map(|&i| self.lags[i]).collect(),
            values: pick(&self.values),
            pair_counts: keep.iter().map(|&i| self.pair_counts[i]).collect(),
            stderr: pick(&self.stderr),
            normalized: self.normalized,
            edges: Vec::new(),
            replicates: self.replicates.iter().map(|r| pick(r)).collect(),
        }
    }

    /// Keeps the lags closest to a logarithmic grid with `per_decade`
    /// points, so that log-log fits are not dominated by the densely sampled
    /// large lags of a step curve. Lag 0 is kept when present.
    pub fn thinned(&self, per_decade: usize) -> Self {
        let mut keep: Vec<usize> = Vec::new();
        if self.lags.first().is_some_and(|&l| l == T::zero()) {
            keep.push(0);
        }
        let positive: Vec<usize> = (0..self.lags.len()).filter(|&i| self.lags[i] > T::zero()).collect();
        if let (Some(&first), Some(&last)) = (positive.first(), positive.last()) {
            let (lo, hi) = (self.lags[first].log10(), self.lags[last].log10());
            let steps = ((hi - lo) * T::of_usize(per_decade)).ceil().to_usize().unwrap_or(0);
            for k in 0..=steps {
                let target = lo + T::of_usize(k) / T::of_usize(per_decade);
                let pos = positive.partition_point(|&i| self.lags[i].log10() < target);
                let candidates = [pos.checked_sub(1), Some(pos)];
                let best = candidates
                    .into_iter()
                    .flatten()
                    .filter(|&p| p < positive.len())
                    .min_by(|&a, &b| {
                        let da = (self.lags[positive[a]].log10() - target).abs();
                        let db = (self.lags[positive[b]].log10() - target).abs();
                        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
                    });
                if let Some(p) = best {
                    if keep.last() != Some(&positive[p]) {
                        keep.push(positive[p]);
                    }
                }
            }
        }
        self.select(&keep)
    }

    /// CSV with columns `lag,value,stderr,pairs`; missing values are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lag,value,stderr,pairs")?;
        let cell = |v: Option<T>| v.map(|x| x.to_string()).unwrap_or_default();
        for i in 0..self.lags.len() {
            writeln!(
                out,
                "{},{},{},{}",
                self.lags[i],
                cell(self.values[i]),
                cell(self.stderr[i]),
                self.pair_counts[i]
            )?;
        }
        out.flush()?;
        Ok(())
    }
}
