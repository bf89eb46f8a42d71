//! Event series: irregular event times with per-event increments, split into
//! sessions, and its two-column CSV form.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{CtrwError, Result};
use crate::scalar::Real;

/// One contiguous trading session (or simulated trajectory).
///
/// `origin` is the reference instant preceding the first event, so the first
/// waiting time is `times[start] - origin`. `open` is the clock time the
/// session opened, used for time-of-day bins, and `weekday` counts from
/// Monday = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Session<T> {
    pub start: usize,
    pub end: usize,
    pub origin: T,
    pub open: T,
    pub weekday: u8,
}

impl<T: Copy> Session<T> {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Per-session input when assembling a series from waiting times.
#[derive(Debug, Clone)]
pub struct SessionData<T> {
    pub origin: T,
    pub open: T,
    pub weekday: u8,
    pub waits: Vec<T>,
    pub increments: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries<T> {
    times: Vec<T>,
    waits: Vec<T>,
    increments: Vec<T>,
    sessions: Vec<Session<T>>,
    stationarized: bool,
}

impl<T: Real> EventSeries<T> {
    /// Builds a series from absolute event times. Waiting times are the
    /// differences of consecutive times, the first one measured from the
    /// session origin.
    pub fn from_times(times: Vec<T>, increments: Vec<T>, sessions: Vec<Session<T>>) -> Result<Self> {
        if times.len() != increments.len() {
            return Err(CtrwError::InvalidParameter(format!(
                "{} times but {} increments",
                times.len(),
                increments.len()
            )));
        }
        check_sessions(&sessions, times.len())?;
        let mut waits = Vec::with_capacity(times.len());
        for s in &sessions {
            let mut prev = s.origin;
            for i in s.range() {
                let dt = times[i] - prev;
                if !(dt > T::zero()) {
                    return Err(CtrwError::InvalidParameter(format!(
                        "event {i}: time {} does not follow {prev} within its session",
                        times[i]
                    )));
                }
                waits.push(dt);
                prev = times[i];
            }
        }
        Ok(Self {
            times,
            waits,
            increments,
            sessions,
            stationarized: false,
        })
    }

    /// Builds a series from per-session waiting times; event times are the
    /// session origin plus cumulative sums.
    pub fn from_waits(parts: Vec<SessionData<T>>) -> Result<Self> {
        let total: usize = parts.iter().map(|p| p.waits.len()).sum();
        let mut times = Vec::with_capacity(total);
        let mut waits = Vec::with_capacity(total);
        let mut increments = Vec::with_capacity(total);
        let mut sessions = Vec::with_capacity(parts.len());
        for p in parts {
            if p.waits.len() != p.increments.len() {
                return Err(CtrwError::InvalidParameter(format!(
                    "session has {} waiting times but {} increments",
                    p.waits.len(),
                    p.increments.len()
                )));
            }
            if let Some(bad) = p.waits.iter().find(|w| !(**w > T::zero()) || !w.is_finite()) {
                return Err(CtrwError::InvalidParameter(format!(
                    "waiting times must be finite and positive, found {bad}"
                )));
            }
            let start = times.len();
            let mut t = p.origin;
            for &w in &p.waits {
                t += w;
                times.push(t);
            }
            waits.extend_from_slice(&p.waits);
            increments.extend_from_slice(&p.increments);
            sessions.push(Session {
                start,
                end: times.len(),
                origin: p.origin,
                open: p.open,
                weekday: p.weekday,
            });
        }
        Ok(Self {
            times,
            waits,
            increments,
            sessions,
            stationarized: false,
        })
    }

    /// Sessions as [`SessionData`], ready to be transformed and reassembled.
    pub fn to_parts(&self) -> Vec<SessionData<T>> {
        self.sessions
            .iter()
            .map(|s| SessionData {
                origin: s.origin,
                open: s.open,
                weekday: s.weekday,
                waits: self.waits[s.range()].to_vec(),
                increments: self.increments[s.range()].to_vec(),
            })
            .collect()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn waits(&self) -> &[T] {
        &self.waits
    }

    pub fn increments(&self) -> &[T] {
        &self.increments
    }

    pub fn sessions(&self) -> &[Session<T>] {
        &self.sessions
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_stationarized(&self) -> bool {
        self.stationarized
    }

    pub fn with_stationarized(mut self, flag: bool) -> Self {
        self.stationarized = flag;
        self
    }

    /// Duration of each session from its origin to its last event.
    pub fn session_spans(&self) -> Vec<T> {
        self.sessions
            .iter()
            .map(|s| {
                if s.is_empty() {
                    T::zero()
                } else {
                    self.times[s.end - 1] - s.origin
                }
            })
            .collect()
    }

    /// Writes the two-column event CSV with `# session` markers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "timestamp_seconds,increment")?;
        if self.stationarized {
            writeln!(out, "# stationarized")?;
        }
        let mut buf = String::new();
        for s in &self.sessions {
            writeln!(
                out,
                "# session origin={} open={} weekday={}",
                s.origin, s.open, s.weekday
            )?;
            for i in s.range() {
                buf.clear();
                let _ = writeln!(buf, "{},{}", self.times[i], self.increments[i]);
                out.write_all(buf.as_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`EventSeries::write_csv`]. A session
    /// marker without an `origin=` key (or rows before any marker) makes the
    /// session's first row its reference instant; that row contributes no
    /// event.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut times = Vec::new();
        let mut increments = Vec::new();
        let mut sessions: Vec<Session<T>> = Vec::new();
        let mut stationarized = false;
        let mut pending_origin = false;
        let mut open_session = false;
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if comment == "stationarized" {
                    stationarized = true;
                } else if let Some(rest) = comment.strip_prefix("session") {
                    close_session(&mut sessions, times.len());
                    let mut s = Session {
                        start: times.len(),
                        end: times.len(),
                        origin: T::zero(),
                        open: T::zero(),
                        weekday: 0,
                    };
                    let mut has_origin = false;
                    let mut has_open = false;
                    for kv in rest.split_whitespace() {
                        let (k, v) = kv.split_once('=').ok_or_else(|| CtrwError::Parse {
                            line: line_no,
                            msg: format!("malformed session attribute {kv:?}"),
                        })?;
                        let num = || -> Result<f64> {
                            v.parse::<f64>().map_err(|_| CtrwError::Parse {
                                line: line_no,
                                msg: format!("bad value for {k}: {v:?}"),
                            })
                        };
                        match k {
                            "origin" => {
                                s.origin = T::lit(num()?);
                                has_origin = true;
                            }
                            "open" => {
                                s.open = T::lit(num()?);
                                has_open = true;
                            }
                            "weekday" => s.weekday = num()? as u8,
                            _ => {}
                        }
                    }
                    if has_origin && !has_open {
                        s.open = s.origin;
                    }
                    pending_origin = !has_origin;
                    sessions.push(s);
                    open_session = true;
                }
                continue;
            }
            if line.starts_with("timestamp") {
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| CtrwError::Parse {
                line: line_no,
                msg: "expected two comma-separated columns".into(),
            })?;
            let parse = |f: &str| -> Result<T> {
                f.trim().parse::<f64>().map(T::lit).map_err(|_| CtrwError::Parse {
                    line: line_no,
                    msg: format!("expected a number, found {:?}", f.trim()),
                })
            };
            let (t, x) = (parse(a)?, parse(b)?);
            if !open_session {
                sessions.push(Session {
                    start: times.len(),
                    end: times.len(),
                    origin: T::zero(),
                    open: T::zero(),
                    weekday: 0,
                });
                open_session = true;
                pending_origin = true;
            }
            if pending_origin {
                let s = sessions.last_mut().expect("open session");
                s.origin = t;
                s.open = t;
                pending_origin = false;
                continue;
            }
            let s = sessions.last().expect("open session");
            let prev = if times.len() > s.start { times[times.len() - 1] } else { s.origin };
            if !(t > prev) {
                return Err(CtrwError::NonMonotonic {
                    line: line_no,
                    timestamp: t.as_f64(),
                });
            }
            times.push(t);
            increments.push(x);
        }
        close_session(&mut sessions, times.len());
        sessions.retain(|s| !s.is_empty());
        Ok(Self::from_times(times, increments, sessions)?.with_stationarized(stationarized))
    }
}

fn close_session<T: Copy>(sessions: &mut [Session<T>], end: usize) {
    if let Some(s) = sessions.last_mut() {
        s.end = end;
    }
}

fn check_sessions<T>(sessions: &[Session<T>], len: usize) -> Result<()> {
    let mut expected = 0;
    for s in sessions {
        if s.start != expected || s.end < s.start {
            return Err(CtrwError::InvalidParameter(format!(
                "sessions must tile the events contiguously; session [{}, {}) after index {expected}",
                s.start, s.end
            )));
        }
        expected = s.end;
    }
    if expected != len {
        return Err(CtrwError::InvalidParameter(format!(
            "sessions cover {expected} of {len} events"
        )));
    }
    Ok(())
}
