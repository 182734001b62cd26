//! Table layouts of the runner outputs.

use qaud::ExecMode;

use crate::config::ExperimentConfig;
use crate::error::ExpResult;
use crate::runners::{self, gap_seed, AerPoint, Calibration, DemoTrace, SchemeProfile, SnrPoint, TimePoint};
use crate::table::{num, Table};

/// Experiment selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    AerVsK,
    CalibrateK,
    MeanGap,
    AnnealDemo,
    QaerVsSnr,
    QaerVsTime,
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::AerVsK => "aer_vs_k",
            Experiment::CalibrateK => "calibrate_k",
            Experiment::MeanGap => "mean_gap",
            Experiment::AnnealDemo => "anneal_demo",
            Experiment::QaerVsSnr => "qaer_vs_snr",
            Experiment::QaerVsTime => "qaer_vs_time",
        }
    }
}

pub fn run(exp: Experiment, cfg: &ExperimentConfig, mode: ExecMode) -> ExpResult<Table> {
    cfg.validate()?;
    Ok(match exp {
        Experiment::AerVsK => aer_table(&runners::aer_vs_k(cfg, mode)?),
        Experiment::CalibrateK => {
            let cals = cfg
                .scheme
                .iter()
                .map(|&s| runners::calibrate_k(s, cfg.target_aer, cfg, mode))
                .collect::<ExpResult<Vec<_>>>()?;
            calibration_table(&cals)
        }
        Experiment::MeanGap => gap_table(&runners::mean_gap(cfg, mode)?, cfg),
        Experiment::AnnealDemo => demo_table(&runners::anneal_demo(cfg, mode)?),
        Experiment::QaerVsSnr => snr_table(&runners::qaer_vs_snr(cfg, mode)?),
        Experiment::QaerVsTime => {
            let mut t = time_table(&runners::qaer_vs_time(cfg, mode)?);
            t.note("snr_db", num(cfg.time_snr_db));
            t
        }
    })
}

fn note_k(table: &mut Table, pairs: impl IntoIterator<Item = (qaud::PilotScheme, usize)>) {
    let mut seen = Vec::new();
    for (s, k) in pairs {
        if !seen.contains(&s) {
            seen.push(s);
            table.note(format!("k.{s}"), k);
        }
    }
}

pub fn aer_table(points: &[AerPoint]) -> Table {
    let mut t = Table::new("aer_vs_k", &["scheme", "k", "aer_mean", "ci_halfwidth", "n_trials"]);
    t.note("snr_db", "inf");
    for p in points {
        t.push(vec![
            p.scheme.to_string(),
            p.k.to_string(),
            num(p.estimate.mean),
            num(p.estimate.ci_halfwidth),
            p.estimate.n_samples.to_string(),
        ]);
    }
    t
}

pub fn calibration_table(cals: &[Calibration]) -> Table {
    let mut t = Table::new(
        "calibrate_k",
        &["scheme", "target_aer", "k", "aer_mean", "ci_halfwidth", "n_trials", "evaluations"],
    );
    for c in cals {
        t.push(vec![
            c.scheme.to_string(),
            num(c.target),
            c.k.to_string(),
            num(c.estimate.mean),
            num(c.estimate.ci_halfwidth),
            c.estimate.n_samples.to_string(),
            c.visited.len().to_string(),
        ]);
    }
    t
}

pub fn gap_table(profiles: &[SchemeProfile], cfg: &ExperimentConfig) -> Table {
    let mut t = Table::new("mean_gap", &["scheme", "u", "gap_sq_mean", "gap_sq_stderr"]);
    t.note("gap_seed", gap_seed(cfg.master_seed));
    note_k(&mut t, profiles.iter().map(|p| (p.scheme, p.k)));
    for p in profiles {
        t.note(format!("degenerate_events.{}", p.scheme), p.profile.degenerate_events);
        let pr = &p.profile;
        for ((u, g), s) in pr.u_grid().iter().zip(pr.gap_sq()).zip(pr.gap_sq_stderr()) {
            t.push(vec![p.scheme.to_string(), num(*u), num(*g), num(*s)]);
        }
    }
    t
}

pub fn demo_table(traces: &[DemoTrace]) -> Table {
    let mut t = Table::new("anneal_demo", &["scheme", "epsilon", "t", "u", "success_probability"]);
    note_k(&mut t, traces.iter().map(|d| (d.scheme, d.k)));
    for d in traces {
        t.note(format!("annealing_time.{}.{}", d.scheme, num(d.epsilon)), num(d.annealing_time));
        for s in &d.samples {
            t.push(vec![
                d.scheme.to_string(),
                num(d.epsilon),
                num(s.t),
                num(s.u),
                num(s.success_probability),
            ]);
        }
    }
    t
}

pub fn snr_table(points: &[SnrPoint]) -> Table {
    let mut t = Table::new(
        "qaer_vs_snr",
        &["scheme", "estimator", "epsilon", "snr_db", "error_rate_mean", "ci_halfwidth", "n_trials"],
    );
    note_k(&mut t, points.iter().map(|p| (p.scheme, p.k)));
    for p in points {
        t.push(vec![
            p.scheme.to_string(),
            p.estimator.as_str().to_string(),
            p.epsilon.map(num).unwrap_or_default(),
            num(p.snr_db),
            num(p.estimate.mean),
            num(p.estimate.ci_halfwidth),
            p.estimate.n_samples.to_string(),
        ]);
    }
    t
}

pub fn time_table(points: &[TimePoint]) -> Table {
    let mut t = Table::new(
        "qaer_vs_time",
        &["scheme", "epsilon", "annealing_time", "qaer_mean", "ci_halfwidth", "n_trials"],
    );
    note_k(&mut t, points.iter().map(|p| (p.scheme, p.k)));
    for p in points {
        t.push(vec![
            p.scheme.to_string(),
            num(p.epsilon),
            num(p.annealing_time),
            num(p.estimate.mean),
            num(p.estimate.ci_halfwidth),
            p.estimate.n_samples.to_string(),
        ]);
    }
    t
}
