use std::process::ExitCode;

use choreo_core::resonance::{design_couplings, DesignError};
use choreo_core::{Convention, Couplings};

use crate::error::CliError;
use crate::fmt;
use crate::DesignArgs;

fn parse_ratios(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(':')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Input(format!("`{text}` is not a ratio list like 1:2:3")))
        })
        .collect()
}

fn values(c: &Couplings) -> Vec<String> {
    match c {
        Couplings::Exact(v) => v.iter().map(fmt::exact).collect(),
        Couplings::Float(v) => v.iter().map(|&x| fmt::real(x)).collect(),
    }
}

/// `κj = r·κi` lines relative to the first nonzero coupling of a one-parameter family.
fn relations(unit: &Couplings) -> Vec<String> {
    let lead = (0..unit.len()).find(|&k| unit.get(k + 1) != 0.0);
    let Some(lead) = lead else { return Vec::new() };
    (0..unit.len())
        .filter(|&k| k != lead)
        .map(|k| {
            let ratio = match unit {
                Couplings::Exact(v) => fmt::exact(&(&v[k] / &v[lead])),
                Couplings::Float(v) => fmt::real(v[k] / v[lead]),
            };
            let coeff = match ratio.as_str() {
                "0" => return format!("κ{} = 0", k + 1),
                "1" => String::new(),
                "−1" => "−".into(),
                r => format!("{r}·"),
            };
            format!("κ{} = {coeff}κ{}", k + 1, lead + 1)
        })
        .collect()
}

pub fn run(args: &DesignArgs) -> Result<ExitCode, CliError> {
    let targets = parse_ratios(&args.ratios)?;
    let convention: Convention = args.convention.into();
    let family = design_couplings(args.n, convention, &targets).map_err(|e| match e {
        DesignError::NTooSmall(_) => CliError::Invalid(e.to_string()),
        _ => CliError::Design(e.to_string()),
    })?;
    let sample = values(&family.sample);
    let mut summary = if family.homogeneous.is_empty() { relations(&family.unit) } else { Vec::new() };
    summary.push(format!("sample {}", fmt::tuple(&sample, String::clone)));
    println!("{}", summary.join("; "));

    let ratios: Vec<String> = targets.iter().map(u64::to_string).collect();
    println!();
    let labels: Vec<String> = (1..=targets.len()).map(|l| format!("Ω{l}")).collect();
    println!("n = {}, {} = {}, {convention} couplings", args.n, labels.join(":"), ratios.join(":"));
    let mut family_line = format!("κ = c·{}", fmt::tuple(&values(&family.unit), String::clone));
    for (i, h) in family.homogeneous.iter().enumerate() {
        family_line.push_str(&format!(" + t{}·{}", i + 1, fmt::tuple(&values(h), String::clone)));
    }
    println!("{family_line}, c > 0 (λℓ = c·mℓ²)");

    let spectrum = family.sample_spec(1.0, 1.0).spectrum();
    let lambdas: Vec<String> = match spectrum.exact_lambdas() {
        Some(v) => v[1..].iter().map(fmt::exact).collect(),
        None => spectrum.lambdas()[1..].iter().map(|&x| fmt::real(x)).collect(),
    };
    println!("sample spectrum: λ = {}", fmt::tuple(&lambdas, String::clone));
    Ok(ExitCode::SUCCESS)
}
