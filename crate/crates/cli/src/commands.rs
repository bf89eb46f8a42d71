use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use ctrw_core::analytic::stehfest::DEFAULT_ORDER;
use ctrw_core::analytic::{
    asymptotic_moment_exponents, invert_laplace, laplace_moments, measure_coefficients, stehfest_s_grid,
    step_acf_asymptote, step_acf_asymptotic_slope, step_acf_exact, AppendixCoefficients, SumOptions, TailCorrection,
};
use ctrw_core::data::{
    build_seasonal_profile, ingest_ticks, join_sessions, make_surrogate, stationarize, SessionRules, SurrogateKind,
};
use ctrw_core::dist::RepetitionLaw;
use ctrw_core::estim::{
    fit_slope, log_edges, resolvable_until, step_acf_of_waits, time_acf, AcfCurve, BootstrapOptions, MarkKind,
    SlopeFit, StepAcfOptions, TimeAcfOptions,
};
use ctrw_core::series::EventSeries;
use ctrw_core::sim::{log_grid, simulate_sessions, SimConfig, StartMode};

use crate::args::{
    AnalyzeArgs, FormatArg, InputArgs, MarksArg, PredictArgs, ShuffleArgs, SimulateArgs, StartArg, TailArg, TimeArgs,
};
use crate::config::write_manifest;
use crate::spec::{increment_model, waiting_model};

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text).with_context(|| format!("writing {name}"))
}

fn write_curve(dir: &Path, name: &str, curve: &AcfCurve<f64>) -> Result<()> {
    let mut out = create(dir, name)?;
    curve.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = SimConfig {
        repetition: RepetitionLaw::zeta(a.rho)?,
        waiting: waiting_model(&a.psi)?,
        increment: increment_model(&a.h)?,
        n_events: usize::try_from(a.n_events)?,
        n_trajectories: usize::try_from(a.n_trajectories)?,
        seed: a.seed,
        start: match a.start {
            StartArg::Stationary => StartMode::Stationary,
            StartArg::BlockBoundary => StartMode::BlockBoundary,
        },
    };
    cfg.validate()?;
    let dir = &a.common.out_dir;
    prepare_dir(dir)?;
    let series = simulate_sessions(&cfg)?;
    let mut out = create(dir, "events.csv")?;
    series.write_csv(&mut out)?;
    out.flush()?;
    write_manifest(dir, "simulate", a)
}

/// An input file after reading and optional stationarization.
struct Loaded {
    series: EventSeries<f64>,
    ticks: bool,
    stationarized: bool,
    info: Value,
}

fn sniff_ticks(path: &Path) -> Result<bool> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    for line in BufReader::new(f).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        return Ok(!(line.starts_with('#') || line.starts_with("timestamp_seconds")));
    }
    bail!(ctrw_core::CtrwError::InvalidParameter(format!("{} is empty", path.display())))
}

fn load(a: &InputArgs, dir: &Path) -> Result<Loaded> {
    let ticks = match a.format {
        FormatArg::Ticks => true,
        FormatArg::Events => false,
        FormatArg::Auto => sniff_ticks(&a.input)?,
    };
    let (series, mut info) = if ticks {
        let rules = SessionRules {
            open: SessionRules::parse_clock(&a.session_open)?,
            close: SessionRules::parse_clock(&a.session_close)?,
            utc_offset: a.utc_offset * 3600.0,
            weekends: a.weekends,
        };
        rules.validate()?;
        let r = ingest_ticks::<f64>(&a.input, &rules)?;
        let info = json!({
            "format": "ticks",
            "ticks": r.ticks,
            "merged_ties": r.merged_ties,
            "rejected_prices": r.rejected_prices,
            "outside_sessions": r.outside_sessions,
        });
        (r.series, info)
    } else {
        let f = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
        let s = EventSeries::<f64>::read_csv(BufReader::new(f))?;
        (s, json!({ "format": "events" }))
    };
    if series.is_empty() {
        bail!(ctrw_core::CtrwError::InvalidParameter(format!(
            "{} contains no usable events",
            a.input.display()
        )));
    }
    let wanted = resolve(a.stationarize, a.no_stationarize, ticks);
    let series = if wanted && !series.is_stationarized() {
        let profile = build_seasonal_profile(&series, a.bin_width)?;
        let mut out = create(dir, "seasonal_profile.csv")?;
        profile.write_csv(&mut out)?;
        out.flush()?;
        stationarize(&series, &profile)?
    } else {
        series
    };
    info["events"] = json!(series.len());
    info["sessions"] = json!(series.sessions().len());
    info["stationarized"] = json!(series.is_stationarized());
    Ok(Loaded {
        stationarized: series.is_stationarized(),
        series,
        ticks,
        info,
    })
}

/// `--x` / `--no-x` pair with a format-dependent default.
fn resolve(on: bool, off: bool, default: bool) -> bool {
    if on {
        true
    } else if off {
        false
    } else {
        default
    }
}

fn bootstrap(a: &InputArgs) -> Option<BootstrapOptions> {
    (a.bootstrap > 0).then_some(BootstrapOptions {
        replicates: a.bootstrap,
        seed: a.seed,
        min_units: a.min_units,
    })
}

fn time_options(t: &TimeArgs, marks: MarkKind, boot: Option<BootstrapOptions>) -> TimeAcfOptions<f64> {
    TimeAcfOptions {
        edges: log_edges(t.time_min, t.time_max, t.bins_per_decade),
        marks,
        bootstrap: boot,
    }
}

/// Fit over `[lo, hi]`, optionally cut at the noise floor.
fn fit(curve: &AcfCurve<f64>, lo: f64, hi: f64, noise_floor: f64) -> Result<SlopeFit<f64>, String> {
    let hi = if noise_floor > 0.0 {
        resolvable_until(curve, lo, hi, noise_floor)
            .ok_or_else(|| format!("no bin at or above {lo} exceeds {noise_floor} standard errors"))?
    } else {
        hi
    };
    fit_slope(curve, lo, hi).map_err(|e| e.to_string())
}

fn fit_json(name: &str, r: &Result<SlopeFit<f64>, String>, warnings: &mut Vec<String>) -> Value {
    match r {
        Ok(f) => serde_json::to_value(f).unwrap_or(Value::Null),
        Err(e) => {
            let msg = format!("{name} fit: {e}");
            eprintln!("warning: {msg}");
            warnings.push(msg);
            json!({ "error": e })
        }
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let dir = &a.common.out_dir;
    prepare_dir(dir)?;
    let loaded = load(&a.input, dir)?;
    let mut warnings = Vec::new();
    let join = resolve(a.join, a.no_join, loaded.ticks);
    let series = if join {
        let j = join_sessions(&loaded.series)?;
        if let Some(w) = j.warning {
            eprintln!("warning: {w}");
            warnings.push(w);
        }
        j.series
    } else {
        loaded.series
    };
    let boot = bootstrap(&a.input);
    let step = step_acf_of_waits(
        &series,
        &StepAcfOptions {
            max_lag: a.max_lag,
            bootstrap: boot,
        },
    )
    .context("step ACF of waiting times")?;
    write_curve(dir, "step_acf.csv", &step)?;
    let marks = match a.marks {
        MarksArg::Absolute => MarkKind::Absolute,
        MarksArg::Signed => MarkKind::Signed,
    };
    let time = time_acf(&series, &time_options(&a.time, marks, boot)).context("time ACF of increments")?;
    write_curve(dir, "time_acf.csv", &time)?;

    let step_for_fit = if a.fit_per_decade > 0 {
        step.thinned(a.fit_per_decade)
    } else {
        step
    };
    let step_fit = fit(&step_for_fit, a.step_fit_min, a.step_fit_max, a.noise_floor);
    let time_fit = fit(&time, a.time.time_fit_min, a.time.time_fit_max, a.noise_floor);
    let report = json!({
        "input": loaded.info,
        "joined": join,
        "step_acf_dt": fit_json("step", &step_fit, &mut warnings),
        "time_acf_dx": fit_json("time", &time_fit, &mut warnings),
        "warnings": warnings,
    });
    write_json(dir, "fits.json", &report)?;
    let mut resolved = a.clone();
    set_pair(&mut resolved.input.stationarize, &mut resolved.input.no_stationarize, loaded.stationarized);
    set_pair(&mut resolved.join, &mut resolved.no_join, join);
    write_manifest(dir, "analyze", &resolved)
}

fn set_pair(on: &mut bool, off: &mut bool, value: bool) {
    *on = value;
    *off = !value;
}

fn file_suffix(kind: SurrogateKind) -> &'static str {
    match kind {
        SurrogateKind::Original => "original",
        SurrogateKind::ShuffleDt => "dt",
        SurrogateKind::ShuffleDx => "dx",
        SurrogateKind::ShuffleBoth => "both",
    }
}

pub fn shuffle_test(a: &ShuffleArgs) -> Result<()> {
    let dir = &a.common.out_dir;
    prepare_dir(dir)?;
    let loaded = load(&a.input, dir)?;
    let opts = time_options(&a.time, MarkKind::Absolute, bootstrap(&a.input));
    let mut warnings = Vec::new();
    let mut slopes = serde_json::Map::new();
    let mut fits = Vec::new();
    for kind in SurrogateKind::ALL {
        let s = make_surrogate(&loaded.series, kind, a.input.seed)?;
        let curve = time_acf(&s, &opts).with_context(|| format!("time ACF of {kind}"))?;
        write_curve(dir, &format!("time_acf_{}.csv", file_suffix(kind)), &curve)?;
        let f = fit(&curve, a.time.time_fit_min, a.time.time_fit_max, a.noise_floor);
        slopes.insert(kind.name().to_string(), fit_json(kind.name(), &f, &mut warnings));
        fits.push(f.ok());
    }
    // fits follow SurrogateKind::ALL: original, shuffle_dt, shuffle_dx, shuffle_both
    let mut comparison = serde_json::Map::new();
    if let Some(orig) = &fits[0] {
        if let Some(dx) = &fits[2] {
            comparison.insert("shuffle_dx_minus_original".into(), json!(dx.slope - orig.slope));
            comparison.insert("shuffle_dx_agrees".into(), json!(dx.agrees_with(orig)));
        }
        if let Some(dt) = &fits[1] {
            comparison.insert("shuffle_dt_steepening".into(), json!(orig.slope - dt.slope));
        }
    }
    let report = json!({
        "input": loaded.info,
        "slopes": slopes,
        "comparison": comparison,
        "warnings": warnings,
    });
    write_json(dir, "report.json", &report)?;
    let mut resolved = a.clone();
    set_pair(&mut resolved.input.stationarize, &mut resolved.input.no_stationarize, loaded.stationarized);
    write_manifest(dir, "shuffle-test", &resolved)
}

pub fn predict(a: &PredictArgs) -> Result<()> {
    let law = RepetitionLaw::zeta(a.rho)?;
    let waiting = waiting_model(&a.psi)?;
    let increment = increment_model(&a.h)?;
    if !(a.t_min > 0.0 && a.t_max > a.t_min && a.t_per_decade > 0) {
        bail!(ctrw_core::CtrwError::InvalidParameter(
            "need 0 < t-min < t-max and t-per-decade > 0".into()
        ));
    }
    let opts = SumOptions {
        tolerance: a.tolerance,
        nu_max: a.nu_max,
        tail: match a.tail {
            TailArg::PowerLaw => TailCorrection::PowerLaw,
            TailArg::None => TailCorrection::None,
        },
        ..SumOptions::default()
    };
    let dir = &a.common.out_dir;
    prepare_dir(dir)?;

    let slope = step_acf_asymptotic_slope(&law)?;
    let mut out = create(dir, "analytic_step_acf.csv")?;
    writeln!(out, "# asymptotic_slope={slope}")?;
    writeln!(out, "lag,acf,asymptote")?;
    for n in 0..=a.max_lag {
        let exact = step_acf_exact(&law, n)?;
        if n == 0 {
            writeln!(out, "{n},{exact},")?;
        } else {
            writeln!(out, "{n},{exact},{}", step_acf_asymptote(&law, n)?)?;
        }
    }
    out.flush()?;

    let t_grid = log_grid(a.t_min, a.t_max, a.t_per_decade);
    let s_grid = stehfest_s_grid(&t_grid, DEFAULT_ORDER);
    let lm = laplace_moments(&s_grid, &waiting, &increment, &law, &opts)?;
    let rows = invert_laplace(&lm, &t_grid)?;
    let exps = asymptotic_moment_exponents(a.rho, increment.mu1() == 0.0)?;
    let mut out = create(dir, "moments.csv")?;
    writeln!(
        out,
        "# m1_powerlaw_exp={} variance_powerlaw_exp={} acf_exp={} normal_diffusion={}",
        exps.m1_powerlaw_exp,
        exps.variance_powerlaw_exp,
        exps.acf_exp,
        exps.is_normal_diffusion()
    )?;
    writeln!(out, "t,m1,m2,variance,m1_error,m2_error,reliable")?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.t, r.m1, r.m2, r.variance, r.m1_error, r.m2_error, r.reliable
        )?;
    }
    out.flush()?;
    let unreliable = rows.iter().filter(|r| !r.reliable).count();
    if unreliable > 0 {
        eprintln!("warning: {unreliable} of {} moment rows failed the inversion-order check", rows.len());
    }

    let expected = AppendixCoefficients::new(a.rho, waiting.mean())?;
    let measured = measure_coefficients(&waiting, &law, &opts)?;
    let mut out = create(dir, "laplace_check.csv")?;
    writeln!(out, "# C0_0 measured={} expected=1", measured.c0_0)?;
    writeln!(
        out,
        "# C1_0/C0_1 measured={} expected={}",
        measured.ratio_c10_over_c01(),
        expected.ratio_c10_over_c01
    )?;
    writeln!(out, "# D0_0 measured={} expected={}", measured.d0_0, expected.d0_0)?;
    if let (Some(m), Some(e)) = (measured.d1_0, expected.d1_0) {
        writeln!(out, "# D1_0 measured={m} expected={e}")?;
    }
    writeln!(out, "# truncation_nu_max={}", lm.truncation_nu_max)?;
    writeln!(out, "s,m1_tilde,m2_tilde,m1_error,m2_error")?;
    for i in 0..lm.s_grid.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            lm.s_grid[i], lm.m1_tilde[i], lm.m2_tilde[i], lm.m1_error[i], lm.m2_error[i]
        )?;
    }
    out.flush()?;
    write_manifest(dir, "predict", a)
}
