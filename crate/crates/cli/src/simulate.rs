use std::io::Write;
use std::process::ExitCode;

use choreo_core::dynamics::integrate_verlet;
use choreo_core::modes::AnalyticFlow;
use choreo_core::resonance::default_time_step;
use choreo_core::{PhaseState, Scenario};

use crate::error::{write_failed, CliError};
use crate::fmt;
use crate::{Engine, SimulateArgs};

fn header(n: usize, momenta: bool) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=n {
        h.push(format!("x{i}"));
        h.push(format!("y{i}"));
    }
    if momenta {
        for i in 1..=n {
            h.push(format!("px{i}"));
            h.push(format!("py{i}"));
        }
    }
    h
}

fn row(s: &PhaseState, momenta: bool) -> Vec<String> {
    let mut r = vec![s.t.to_string()];
    for p in &s.positions {
        r.push(p.x.to_string());
        r.push(p.y.to_string());
    }
    if momenta {
        for p in &s.momenta {
            r.push(p.x.to_string());
            r.push(p.y.to_string());
        }
    }
    r
}

fn write_csv<W: Write>(out: W, states: &[PhaseState], n: usize, momenta: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(n, momenta))?;
    for s in states {
        w.write_record(row(s, momenta))?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &SimulateArgs) -> Result<ExitCode, CliError> {
    let s = Scenario::load(&args.scenario)?;
    if !(args.t_end.is_finite() && args.t_end >= 0.0) {
        return Err(CliError::Invalid("--t-end must be a finite non-negative time".into()));
    }
    if args.every == 0 {
        return Err(CliError::Invalid("--every must be at least 1".into()));
    }
    let dt = match args.dt {
        Some(dt) if dt.is_finite() && dt > 0.0 => dt,
        Some(_) => return Err(CliError::Invalid("--dt must be positive".into())),
        None => default_time_step(&s.spec, &s.initial)
            .map_err(|e| CliError::Invalid(e.to_string()))?
            .ok_or_else(|| CliError::Invalid("no sector oscillates; pass --dt explicitly".into()))?,
    };
    let steps = if args.t_end == 0.0 { 0 } else { (args.t_end / dt - 1e-9).ceil().max(1.0) as usize };
    let dt = if steps > 0 { args.t_end / steps as f64 } else { dt };
    let mut report = vec![format!("{s}"), format!("{steps} steps of dt = {} to t = {}", fmt::real(dt), fmt::real(args.t_end))];

    let analytic = || -> Result<Vec<PhaseState>, CliError> {
        let flow = AnalyticFlow::new(&s.spec, &s.initial).map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok((0..=steps).map(|k| flow.state_at(s.initial.t + k as f64 * dt)).collect())
    };
    let verlet = || -> Result<Vec<PhaseState>, CliError> {
        if steps == 0 {
            return Ok(vec![s.initial.clone()]);
        }
        integrate_verlet(&s.spec, &s.initial, dt, steps, 1)
            .map(|t| t.states)
            .map_err(|e| CliError::Runtime(e.to_string()))
    };
    let states = match args.engine {
        Engine::Analytic => analytic()?,
        Engine::Verlet => verlet()?,
        Engine::Both => {
            let a = analytic()?;
            let v = verlet()?;
            let dev = a
                .iter()
                .zip(&v)
                .map(|(x, y)| x.max_position_distance(y))
                .fold(0.0, f64::max);
            report.push(format!("max deviation |r_verlet − r_analytic| = {dev:.3e}"));
            a
        }
    };
    let kept: Vec<PhaseState> = states
        .iter()
        .enumerate()
        .filter(|(k, _)| k % args.every == 0 || *k == steps)
        .map(|(_, st)| st.clone())
        .collect();

    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| write_failed(path, e))?;
            write_csv(file, &kept, s.spec.n, args.momenta).map_err(|e| write_failed(path, e))?;
            report.push(format!("wrote {} rows to {path}", kept.len()));
            for line in report {
                println!("{line}");
            }
        }
        None => {
            write_csv(std::io::stdout().lock(), &kept, s.spec.n, args.momenta).map_err(|e| write_failed("standard output", e))?;
            for line in report {
                eprintln!("{line}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
