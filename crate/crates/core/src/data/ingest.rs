//! Tick files (`timestamp,price`) to event series.

use std::io::{BufRead, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{CtrwError, Result};
use crate::scalar::Real;
use crate::series::{EventSeries, Session};

const DAY: f64 = 86_400.0;

/// Trading-session clock window, in seconds after local midnight. Local time
/// is UTC shifted by `utc_offset` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionRules {
    pub open: f64,
    pub close: f64,
    pub utc_offset: f64,
    /// Saturday and Sunday ticks are dropped unless set.
    pub weekends: bool,
}

impl Default for SessionRules {
    fn default() -> Self {
        Self {
            open: 9.0 * 3600.0,
            close: 17.0 * 3600.0,
            utc_offset: 0.0,
            weekends: false,
        }
    }
}

impl SessionRules {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=DAY).contains(&self.open) || !(0.0..=DAY).contains(&self.close) || !(self.open < self.close) {
            return Err(CtrwError::InvalidParameter(format!(
                "session window [{}, {}] must lie within one day with open < close",
                self.open, self.close
            )));
        }
        Ok(())
    }

    /// `HH:MM[:SS]` to seconds after midnight.
    pub fn parse_clock(text: &str) -> Result<f64> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let nums: Option<Vec<f64>> = parts.iter().map(|p| p.parse::<f64>().ok()).collect();
        match nums.as_deref() {
            Some([h, m]) => Ok(h * 3600.0 + m * 60.0),
            Some([h, m, s]) => Ok(h * 3600.0 + m * 60.0 + s),
            _ => Err(CtrwError::InvalidParameter(format!("expected HH:MM or HH:MM:SS, got {text:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport<T> {
    pub series: EventSeries<T>,
    pub ticks: usize,
    /// Ticks sharing the previous timestamp, folded into the previous event.
    pub merged_ties: usize,
    pub rejected_prices: usize,
    pub outside_sessions: usize,
}

/// Epoch seconds or ISO-8601 (with or without offset; naive stamps are UTC).
pub fn parse_timestamp(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.timestamp() as f64 + dt.timestamp_subsec_nanos() as f64 * 1e-9);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, fmt) {
            let u = dt.and_utc();
            return Some(u.timestamp() as f64 + u.timestamp_subsec_nanos() as f64 * 1e-9);
        }
    }
    None
}

/// Local day index and weekday (Monday = 0) of an epoch time.
fn local_day(t: f64, rules: &SessionRules) -> (i64, u8) {
    let local = t + rules.utc_offset;
    let day = (local / DAY).floor() as i64;
    // 1970-01-01 was a Thursday
    let weekday = (day + 3).rem_euclid(7) as u8;
    (day, weekday)
}

struct Open<T> {
    day: i64,
    session: Session<T>,
    last_time: f64,
    last_log_price: f64,
    has_event: bool,
}

pub fn ingest_ticks<T: Real>(path: &Path, rules: &SessionRules) -> Result<IngestReport<T>> {
    let file = std::fs::File::open(path)?;
    read_ticks(std::io::BufReader::new(file), rules)
}

/// Returns `Δx_n = ln p_n - ln p_{n-1}` at each tick after the first of its
/// session; the first in-window tick of a day is the session's reference.
pub fn read_ticks<T: Real, R: BufRead>(input: R, rules: &SessionRules) -> Result<IngestReport<T>> {
    rules.validate()?;
    let mut times: Vec<T> = Vec::new();
    let mut increments: Vec<T> = Vec::new();
    let mut sessions: Vec<Session<T>> = Vec::new();
    let mut current: Option<Open<T>> = None;
    let (mut ticks, mut merged, mut rejected, mut outside) = (0, 0, 0, 0);
    let mut previous_time = f64::NEG_INFINITY;

    let finish = |open: Option<Open<T>>, sessions: &mut Vec<Session<T>>, len: usize| {
        if let Some(o) = open {
            if o.has_event {
                let mut s = o.session;
                s.end = len;
                sessions.push(s);
            }
        }
    };

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| CtrwError::Parse {
            line: line_no,
            msg: "expected two comma-separated columns: timestamp,price".into(),
        })?;
        let t = match parse_timestamp(a) {
            Some(t) => t,
            None if idx == 0 => continue,
            None => {
                return Err(CtrwError::Parse {
                    line: line_no,
                    msg: format!("unrecognized timestamp {:?}", a.trim()),
                })
            }
        };
        let price: f64 = b.trim().parse().map_err(|_| CtrwError::Parse {
            line: line_no,
            msg: format!("expected a price, found {:?}", b.trim()),
        })?;
        ticks += 1;
        if t < previous_time {
            return Err(CtrwError::NonMonotonic { line: line_no, timestamp: t });
        }
        previous_time = t;
        if !(price > 0.0) || !price.is_finite() {
            rejected += 1;
            continue;
        }
        let (day, weekday) = local_day(t, rules);
        let clock = t + rules.utc_offset - day as f64 * DAY;
        if clock < rules.open || clock > rules.close || (!rules.weekends && weekday >= 5) {
            outside += 1;
            continue;
        }
        let lp = price.ln();
        match current.as_mut() {
            Some(o) if o.day == day => {
                if t == o.last_time {
                    merged += 1;
                    if o.has_event {
                        let last = increments.len() - 1;
                        increments[last] += T::lit(lp - o.last_log_price);
                    }
                    o.last_log_price = lp;
                    continue;
                }
                times.push(T::lit(t));
                increments.push(T::lit(lp - o.last_log_price));
                o.last_time = t;
                o.last_log_price = lp;
                o.has_event = true;
            }
            _ => {
                finish(current.take(), &mut sessions, times.len());
                let open_time = day as f64 * DAY + rules.open - rules.utc_offset;
                current = Some(Open {
                    day,
                    session: Session {
                        start: times.len(),
                        end: times.len(),
                        origin: T::lit(t),
                        open: T::lit(open_time),
                        weekday,
                    },
                    last_time: t,
                    last_log_price: lp,
                    has_event: false,
                });
            }
        }
    }
    finish(current.take(), &mut sessions, times.len());
    if times.is_empty() {
        return Err(CtrwError::InvalidParameter(
            "no events: the input holds fewer than two in-session ticks".into(),
        ));
    }
    let series = EventSeries::from_times(times, increments, sessions)?;
    Ok(IngestReport {
        series,
        ticks,
        merged_ties: merged,
        rejected_prices: rejected,
        outside_sessions: outside,
    })
}

/// Writes a series as ticks with prices `p0 · exp(Σ Δx)`, restarting from
/// `p0` at each session reference instant.
pub fn write_ticks<T: Real, W: Write>(series: &EventSeries<T>, p0: f64, mut out: W) -> Result<()> {
    writeln!(out, "timestamp,price")?;
    for s in series.sessions() {
        let mut lp = p0.ln();
        writeln!(out, "{},{}", s.origin, p0)?;
        for i in s.range() {
            lp += series.increments()[i].as_f64();
            writeln!(out, "{},{}", series.times()[i], lp.exp())?;
        }
    }
    out.flush()?;
    Ok(())
}
