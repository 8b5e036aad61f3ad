use std::process::ExitCode;

use choreo_core::resonance::ClassifyError;
use choreo_core::{classify, Category, Classification, Scenario, Tolerances};

use crate::error::{write_failed, CliError};
use crate::fmt;
use crate::ClassifyArgs;

pub fn exit_status(category: Category) -> u8 {
    match category {
        Category::EquivariantChoreography => 0,
        Category::EquivariantFragmented => 10,
        Category::PeriodicNotEquivariant => 11,
        Category::Quasiperiodic => 12,
        Category::Unbounded => 13,
    }
}

fn tolerances(args: &ClassifyArgs) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        active_rel: args.active_tol.unwrap_or(d.active_rel),
        max_denominator: args.max_denominator.unwrap_or(d.max_denominator),
        commensurability_rel: args.commensurability_tol.unwrap_or(d.commensurability_rel),
        eps_rel: args.eps,
        samples: args.samples,
    }
}

/// One-line summary such as `EquivariantChoreography, T=2π/√3, shift T/6`.
pub fn headline(c: &Classification, n: usize) -> String {
    let mut parts = vec![c.category.to_string()];
    if let Some(t) = c.period {
        parts.push(format!("T={}", fmt::period(t)));
    }
    if let Some(r) = &c.trace_report {
        if r.single_trace {
            if let Some(step) = r.global_shift_step {
                parts.push(format!("shift {}", fmt::fraction_of_period(step, n)));
            }
        } else {
            let blocks: Vec<String> = r.block_sets().into_iter().map(fmt::set).collect();
            parts.push(format!("blocks {}", blocks.join(" ")));
        }
    }
    parts.join(", ")
}

fn body(c: &Classification) -> Vec<String> {
    let mut out = Vec::new();
    out.push(format!("active sectors: {}", fmt::set(c.active.iter().copied())));
    if c.merged_groups.len() != c.active.len() {
        let groups: Vec<String> = c.merged_groups.iter().map(|g| fmt::set(g.iter().copied())).collect();
        out.push(format!("degenerate groups merged: {}", groups.join(" ")));
    }
    if !c.unbounded_sectors.is_empty() {
        out.push(format!("non-oscillating sectors: {}", fmt::set(c.unbounded_sectors.iter().copied())));
    }
    if let Some(p) = &c.profile {
        if p.commensurate {
            let ratios: Vec<String> = p.integer_ratios.iter().map(u64::to_string).collect();
            let labels: Vec<String> = p.sectors.iter().map(|l| format!("Ω{l}")).collect();
            out.push(format!(
                "frequency ratios: {} = {} (Ω0 = {})",
                labels.join(":"),
                ratios.join(":"),
                fmt::real(p.base_frequency.unwrap_or(0.0))
            ));
        } else {
            let freqs: Vec<String> = p.frequencies.iter().map(|&w| fmt::real(w)).collect();
            out.push(format!("frequencies {} have no common base frequency", fmt::tuple(&freqs, String::clone)));
        }
    }
    if let Some(s) = c.witness_shift {
        out.push(format!("phase matching: witness s = {s}"));
    }
    if !c.failing_sectors.is_empty() {
        out.push(format!("phase matching fails for sectors {}", fmt::set(c.failing_sectors.iter().copied())));
    }
    if c.effective_single_sector {
        out.push("all active sectors share one frequency".into());
    }
    if let Some(r) = &c.trace_report {
        out.push(format!(
            "trace blocks (eps_rel = {}, diameter = {}, {} samples):",
            fmt::real(r.eps_rel),
            fmt::real(r.diameter),
            r.samples
        ));
        for b in &r.blocks {
            let shifts: Vec<String> = b.shift_steps.iter().map(|&s| fmt::fraction_of_period(s, r.samples)).collect();
            out.push(format!(
                "  {}  shifts {}  max residual {}",
                fmt::set(b.members.iter().copied()),
                fmt::tuple(&shifts, String::clone),
                fmt::real(b.max_residual)
            ));
        }
        if r.blocks.len() > 1 {
            let mut min = f64::INFINITY;
            for (a, row) in r.distances.iter().enumerate() {
                for d in &row[a + 1..] {
                    min = min.min(*d);
                }
            }
            let kind = if r.distinct_traces { "distinct curves" } else { "shared curve (phase-split)" };
            out.push(format!("closest pair of block traces: {} ({kind})", fmt::real(min)));
        }
    }
    out
}

pub fn run(args: &ClassifyArgs) -> Result<ExitCode, CliError> {
    let s = Scenario::load(&args.scenario)?;
    let tol = tolerances(args);
    let c = classify(&s.spec, &s.initial, &tol).map_err(|e| match e {
        ClassifyError::NoInternalMotion | ClassifyError::State(_) => CliError::Invalid(e.to_string()),
        ClassifyError::Trace(_) => CliError::Runtime(e.to_string()),
    })?;
    let json = serde_json::to_string_pretty(&c).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{s}");
    println!("{}", headline(&c, s.spec.n));
    for line in body(&c) {
        println!("{line}");
    }
    println!();
    println!("```json");
    println!("{json}");
    println!("```");
    if let Some(path) = &args.json {
        std::fs::write(path, format!("{json}\n")).map_err(|e| write_failed(path, e))?;
    }
    Ok(ExitCode::from(exit_status(c.category)))
}
