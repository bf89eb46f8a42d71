//! Intraday seasonality of waiting times and its removal.

use std::io::{BufRead, Write};

use crate::error::{CtrwError, Result};
use crate::scalar::Real;
use crate::series::{EventSeries, SessionData};

pub const WEEKDAYS: usize = 5;
pub const DEFAULT_BIN_WIDTH: f64 = 300.0;

/// Mean waiting time per (weekday, time-of-day bin). A waiting interval is
/// assigned to the bin holding the event that ends it, measured from the
/// session's opening time.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalProfile<T> {
    pub bin_width: T,
    /// `means[day][bin]`, `None` where the bin saw no event.
    pub means: Vec<Vec<Option<T>>>,
    pub counts: Vec<Vec<u64>>,
}

impl<T: Real> SeasonalProfile<T> {
    pub fn bins(&self) -> usize {
        self.means.first().map_or(0, |r| r.len())
    }

    fn bin_of(&self, offset: T) -> usize {
        let b = (offset / self.bin_width).floor().to_usize().unwrap_or(0);
        b.min(self.bins().saturating_sub(1))
    }

    pub fn is_flagged(&self, day: usize, bin: usize) -> bool {
        self.means[day][bin].is_none()
    }

    /// Fills undefined bins by linear interpolation between the nearest
    /// defined bins of the same weekday (constant beyond the ends). A weekday
    /// with no data at all borrows the pooled mean over the other weekdays.
    pub fn imputed(&self) -> Result<Vec<Vec<T>>> {
        let bins = self.bins();
        let pooled: Vec<Option<T>> = (0..bins)
            .map(|b| {
                let (mut s, mut c) = (T::zero(), 0u64);
                for d in 0..self.means.len() {
                    if let Some(m) = self.means[d][b] {
                        s += m * T::of_u64(self.counts[d][b]);
                        c += self.counts[d][b];
                    }
                }
                (c > 0).then(|| s / T::of_u64(c))
            })
            .collect();
        if pooled.iter().all(Option::is_none) {
            return Err(CtrwError::InvalidParameter("seasonal profile holds no data".into()));
        }
        let pooled = interpolate(&pooled);
        Ok(self
            .means
            .iter()
            .map(|row| {
                if row.iter().all(Option::is_none) {
                    pooled.clone()
                } else {
                    interpolate(row)
                }
            })
            .collect())
    }

    /// CSV rows `weekday,bin_start_seconds,mean_dt,count`; undefined means
    /// are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "weekday,bin_start_seconds,mean_dt,count")?;
        for (d, row) in self.means.iter().enumerate() {
            for (b, m) in row.iter().enumerate() {
                let start = self.bin_width * T::of_usize(b);
                let mean = m.map(|v| v.to_string()).unwrap_or_default();
                writeln!(out, "{d},{start},{mean},{}", self.counts[d][b])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut rows: Vec<(usize, f64, Option<f64>, u64)> = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("weekday") {
                continue;
            }
            let bad = |msg: &str| CtrwError::Parse {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad("expected weekday,bin_start_seconds,mean_dt,count"));
            }
            let day: usize = f[0].trim().parse().map_err(|_| bad("bad weekday"))?;
            if day >= WEEKDAYS {
                return Err(bad("weekday must be 0-4"));
            }
            let start: f64 = f[1].trim().parse().map_err(|_| bad("bad bin start"))?;
            let mean = match f[2].trim() {
                "" => None,
                v => Some(v.parse::<f64>().map_err(|_| bad("bad mean"))?),
            };
            let count: u64 = f[3].trim().parse().map_err(|_| bad("bad count"))?;
            rows.push((day, start, mean, count));
        }
        let bins = rows.iter().filter(|r| r.0 == 0).count();
        if bins == 0 || rows.len() != bins * WEEKDAYS {
            return Err(CtrwError::Parse {
                line: 0,
                msg: "profile must list the same bins for each of the 5 weekdays".into(),
            });
        }
        let width = if bins > 1 { rows[1].1 - rows[0].1 } else { DEFAULT_BIN_WIDTH };
        let mut means = vec![vec![None; bins]; WEEKDAYS];
        let mut counts = vec![vec![0; bins]; WEEKDAYS];
        for (i, (d, _, m, c)) in rows.into_iter().enumerate() {
            means[d][i % bins] = m.map(T::lit);
            counts[d][i % bins] = c;
        }
        Ok(Self {
            bin_width: T::lit(width),
            means,
            counts,
        })
    }
}

fn interpolate<T: Real>(row: &[Option<T>]) -> Vec<T> {
    let known: Vec<(usize, T)> = row.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    (0..row.len())
        .map(|i| {
            if let Some(v) = row[i] {
                return v;
            }
            let k = known.partition_point(|&(j, _)| j < i);
            match (k.checked_sub(1).map(|p| known[p]), known.get(k)) {
                (Some((a, va)), Some(&(b, vb))) => {
                    let w = T::of_usize(i - a) / T::of_usize(b - a);
                    va + (vb - va) * w
                }
                (Some((_, v)), None) | (None, Some(&(_, v))) => v,
                (None, None) => T::zero(),
            }
        })
        .collect()
}

pub fn build_seasonal_profile<T: Real>(series: &EventSeries<T>, bin_width: T) -> Result<SeasonalProfile<T>> {
    if !(bin_width > T::zero()) {
        return Err(CtrwError::InvalidParameter(format!("bin width must be positive, got {bin_width}")));
    }
    let times = series.times();
    let mut max_offset = T::zero();
    for s in series.sessions() {
        if !s.is_empty() {
            max_offset = max_offset.max(times[s.end - 1] - s.open);
        }
    }
    let bins = (max_offset / bin_width).floor().to_usize().unwrap_or(0) + 1;
    let mut sums = vec![vec![T::zero(); bins]; WEEKDAYS];
    let mut counts = vec![vec![0u64; bins]; WEEKDAYS];
    for s in series.sessions() {
        let d = s.weekday as usize;
        if d >= WEEKDAYS {
            continue;
        }
        for i in s.range() {
            let off = (times[i] - s.open).max(T::zero());
            let b = (off / bin_width).floor().to_usize().unwrap_or(0).min(bins - 1);
            sums[d][b] += series.waits()[i];
            counts[d][b] += 1;
        }
    }
    let means = sums
        .iter()
        .zip(&counts)
        .map(|(s, c)| s.iter().zip(c).map(|(&v, &n)| (n > 0).then(|| v / T::of_u64(n))).collect())
        .collect();
    Ok(SeasonalProfile {
        bin_width,
        means,
        counts,
    })
}

/// Divides each waiting time by the profile mean of its bin and rebuilds
/// event times from the session origins. Increments are untouched.
pub fn stationarize<T: Real>(series: &EventSeries<T>, profile: &SeasonalProfile<T>) -> Result<EventSeries<T>> {
    let table = profile.imputed()?;
    let times = series.times();
    let mut parts = Vec::with_capacity(series.sessions().len());
    for s in series.sessions() {
        let d = (s.weekday as usize).min(WEEKDAYS - 1);
        let waits = s
            .range()
            .map(|i| {
                let b = profile.bin_of((times[i] - s.open).max(T::zero()));
                let m = table[d][b];
                if m > T::zero() {
                    Ok(series.waits()[i] / m)
                } else {
                    Err(CtrwError::Domain(format!("seasonal mean for weekday {d}, bin {b} is not positive")))
                }
            })
            .collect::<Result<Vec<T>>>()?;
        parts.push(SessionData {
            origin: s.origin,
            open: s.open,
            weekday: s.weekday,
            waits,
            increments: series.increments()[s.range()].to_vec(),
        });
    }
    Ok(EventSeries::from_waits(parts)?.with_stationarized(true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joined<T> {
    pub series: EventSeries<T>,
    /// Set when the input had not been stationarized.
    pub warning: Option<String>,
}

/// Concatenates the sessions' waiting times into one session; no
/// inter-session gap is inserted.
pub fn join_sessions<T: Real>(series: &EventSeries<T>) -> Result<Joined<T>> {
    let warning = (!series.is_stationarized())
        .then(|| "joining sessions of a series that was not stationarized".to_string());
    let first = series.sessions().first();
    let part = SessionData {
        origin: first.map_or(T::zero(), |s| s.origin),
        open: first.map_or(T::zero(), |s| s.open),
        weekday: first.map_or(0, |s| s.weekday),
        waits: series.waits().to_vec(),
        increments: series.increments().to_vec(),
    };
    let joined = EventSeries::from_waits(vec![part])?.with_stationarized(series.is_stationarized());
    Ok(Joined { series: joined, warning })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sessions(days: &[u8], waits: &[f64]) -> EventSeries<f64> {
        EventSeries::from_waits(
            days.iter()
                .enumerate()
                .map(|(k, &d)| SessionData {
                    origin: k as f64 * 1e5,
                    open: k as f64 * 1e5,
                    weekday: d,
                    waits: waits.to_vec(),
                    increments: vec![0.5; waits.len()],
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_waits_give_constant_profile() {
        let s = sessions(&[0, 1, 2, 3, 4], &[5.0; 500]);
        let p = build_seasonal_profile(&s, 300.0).unwrap();
        for row in &p.means {
            assert!(row.iter().flatten().all(|&m| (m - 5.0).abs() < 1e-12));
        }
        let st = stationarize(&s, &p).unwrap();
        assert!(st.waits().iter().all(|&w| (w - 1.0).abs() < 1e-12));
        assert!(st.is_stationarized());
        assert_eq!(st.increments(), s.increments());
    }

    #[test]
    fn single_monday_flags_other_days() {
        let s = sessions(&[0], &[10.0; 100]);
        let p = build_seasonal_profile(&s, 300.0).unwrap();
        assert!(p.means[0].iter().all(Option::is_some));
        assert!((1..WEEKDAYS).all(|d| (0..p.bins()).all(|b| p.is_flagged(d, b))));
        let t = p.imputed().unwrap();
        assert_eq!(t[3], t[0]);
    }

    #[test]
    fn gaps_are_interpolated() {
        let row = [Some(1.0), None, None, Some(4.0), None];
        assert_eq!(interpolate(&row), vec![1.0, 2.0, 3.0, 4.0, 4.0]);
    }

    #[test]
    fn csv_round_trip() {
        let s = sessions(&[0, 2], &[7.0, 400.0, 3.0]);
        let p = build_seasonal_profile(&s, 300.0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = SeasonalProfile::<f64>::read_csv(&buf[..]).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn join_concatenates_waits() {
        let s = sessions(&[0, 1], &[1.0, 2.0, 3.0]);
        let j = join_sessions(&s).unwrap();
        assert!(j.warning.is_some());
        assert_eq!(j.series.sessions().len(), 1);
        assert_eq!(j.series.waits(), &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert_eq!(j.series.times().last(), Some(&12.0));
        let one = sessions(&[0], &[1.0, 2.0]).with_stationarized(true);
        let j1 = join_sessions(&one).unwrap();
        assert_eq!(j1.series, one);
        assert!(j1.warning.is_none());
    }
}
