use std::process::ExitCode;

use choreo_core::{Branch, Scenario};

use crate::error::CliError;
use crate::fmt;

pub fn run(path: &str) -> Result<ExitCode, CliError> {
    let s = Scenario::load(path)?;
    let spectrum = s.spec.spectrum();
    println!("{s}");
    println!("mass = {}, ω = {}", fmt::real(s.spec.mass), fmt::real(s.spec.omega));
    println!();
    println!("{:>3}  {:>14}  {:>14}  {:>4}  branch", "ℓ", "λ", "Ω", "mult");
    for m in &spectrum.sectors {
        let lambda = match &m.exact_lambda {
            Some(e) => fmt::exact(e),
            None => fmt::real(m.lambda),
        };
        let freq = match (m.frequency, m.branch) {
            (Some(w), _) => fmt::real(w),
            (None, Branch::Hyperbolic) => format!("i·{}", fmt::real(m.growth_rate(s.spec.omega).unwrap_or(0.0))),
            (None, _) => "-".into(),
        };
        let branch = match m.branch {
            Branch::Oscillatory => "oscillatory",
            Branch::Neutral => "neutral",
            Branch::Hyperbolic => "hyperbolic",
        };
        let tag = if m.ell == 0 { " (center of mass)" } else { "" };
        println!("{:>3}  {:>14}  {:>14}  {:>4}  {branch}{tag}", m.ell, lambda, freq, m.multiplicity);
    }
    let groups: Vec<String> = spectrum.degeneracy_groups.iter().map(|g| fmt::set(g.iter().copied())).collect();
    println!();
    println!("degeneracy groups: {}", groups.join(" "));
    println!("stable: {}", if spectrum.is_stable() { "yes" } else { "no" });
    Ok(ExitCode::SUCCESS)
}
