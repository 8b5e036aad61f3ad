use std::process::ExitCode;

use choreo_core::scan::{run_scan, ScanError, ScanRequest, ScanResult};
use choreo_core::Category;

use crate::error::{write_failed, CliError};

fn write_csv(path: &str, result: &ScanResult) -> Result<(), CliError> {
    let fail = |e: csv::Error| write_failed(path, e);
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    let k = result.request.axes.len();
    let mut header: Vec<String> = vec!["cell".into()];
    header.extend((1..=k).map(|i| format!("kappa{i}")));
    header.push("category".into());
    header.extend(Category::ALL.iter().map(|c| format!("n_{}", c.name())));
    header.extend(["failed", "stable", "commensurate", "ratios"].map(String::from));
    w.write_record(&header).map_err(fail)?;
    for c in &result.cells {
        let mut rec = vec![c.index.to_string()];
        rec.extend(c.couplings.iter().map(f64::to_string));
        rec.push(c.category.map_or("None".into(), |x| x.name().to_string()));
        rec.extend(c.counts.iter().map(usize::to_string));
        rec.push(c.failed.to_string());
        rec.push(c.profile.stable.to_string());
        rec.push(c.profile.commensurate.to_string());
        rec.push(c.profile.integer_ratios.iter().map(u64::to_string).collect::<Vec<_>>().join(":"));
        w.write_record(&rec).map_err(fail)?;
    }
    w.flush().map_err(|e| write_failed(path, e))
}

pub fn run(request_path: &str, out: &str) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(request_path).map_err(|e| CliError::Input(format!("cannot read {request_path}: {e}")))?;
    let request = ScanRequest::from_toml(&text).map_err(|e| CliError::Input(format!("{request_path}: {e}")))?;
    let result = run_scan(&request).map_err(|e: ScanError| CliError::Invalid(e.to_string()))?;
    if out.ends_with(".json") {
        let json = serde_json::to_string_pretty(&result).map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(out, json + "\n").map_err(|e| write_failed(out, e))?;
    } else {
        write_csv(out, &result)?;
    }
    println!("{} cells written to {out}", result.cells.len());
    for cat in Category::ALL {
        let count = result.cells.iter().filter(|c| c.category == Some(cat)).count();
        println!("  {:<24} {count}", cat.name());
    }
    let none = result.cells.iter().filter(|c| c.category.is_none()).count();
    if none > 0 {
        println!("  {:<24} {none}", "unclassified");
    }
    Ok(ExitCode::SUCCESS)
}
