use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn choreo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choreo")).args(args).output().expect("binary runs")
}

fn data_file(dir: &str, name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(dir).join(format!("{name}.toml"));
    p.to_str().unwrap().to_string()
}

fn scenario(name: &str) -> String {
    data_file("scenarios", name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_block(text: &str) -> serde_json::Value {
    let start = text.find("```json").expect("fenced block") + 7;
    let end = start + text[start..].find("```").expect("closing fence");
    serde_json::from_str(&text[start..end]).unwrap()
}

const FOUR_BODY: &str = r#"
n = 4
mass = 1
omega = 1
couplings = [KAPPA]

[[particle]]
id = 1
r = [1, 0]
p = [0, 1.5]

[[particle]]
id = 2
r = [-0.5, 0.5]
p = [-0.5, -1]

[[particle]]
id = 3
r = [0, 0]
p = [0, 0.5]

[[particle]]
id = 4
r = [-0.5, -0.5]
p = [0.5, -1]
"#;

fn four_body(kappa: &str) -> String {
    FOUR_BODY.replace("KAPPA", kappa)
}

#[test]
fn spectrum_lists_exact_eigenvalues() {
    let o = choreo(&["spectrum", &scenario("six_body_2_2_2")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lambdas: Vec<&str> = text
        .lines()
        .filter(|l| l.contains("oscillatory"))
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(lambdas, ["1", "4", "9"]);
}

#[test]
fn spectrum_of_free_particles_is_neutral() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "free.toml", &four_body(r#""0", "0""#));
    let o = choreo(&["spectrum", &path]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("neutral").count(), 3);
    assert!(!text.contains("oscillatory"));
}

#[test]
fn malformed_and_invalid_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let source = four_body(r#""1", "-1/2""#).replace("p = [0, 0.5]", "p = [0, 0.5");
    let broken = write(dir.path(), "broken.toml", &source);
    let o = choreo(&["spectrum", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let negative = write(dir.path(), "negative.toml", &four_body(r#""1", "-1/2""#).replace("mass = 1", "mass = -1"));
    assert_eq!(choreo(&["spectrum", &negative]).status.code(), Some(3));
    assert_eq!(choreo(&["spectrum", "does-not-exist.toml"]).status.code(), Some(2));
}

#[test]
fn classify_reports_choreography() {
    let o = choreo(&["classify", &scenario("six_body_choreography_rescaled")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("EquivariantChoreography, T=2π/√3, shift T/6"), "{text}");
    let json = json_block(&text);
    assert_eq!(json["category"], "EquivariantChoreography");
    assert_eq!(json["trace_report"]["single_trace"], true);
    assert_eq!(json["trace_report"]["blocks"].as_array().unwrap().len(), 1);
    assert_eq!(json["witness_shift"], 1);
}

#[test]
fn classify_reports_fragmentation() {
    let o = choreo(&["classify", &scenario("four_body_2_2")]);
    assert_eq!(o.status.code(), Some(10));
    let text = stdout(&o);
    assert!(text.contains("blocks {1, 3} {2, 4}"), "{text}");
    assert_eq!(json_block(&text)["trace_report"]["distinct_traces"], true);
}

#[test]
fn classify_exit_codes_follow_category() {
    let dir = tempfile::tempdir().unwrap();
    // λ1 = 2κ1 + 2κ2, λ2 = 4κ1.
    let cases = [
        (r#""1", "-1/2""#, 0),
        (r#""1/2", "0""#, 12),
        (r#""4", "-7/2""#, 11),
        (r#""1", "-2""#, 13),
    ];
    for (kappa, code) in cases {
        let path = write(dir.path(), "s.toml", &four_body(kappa));
        assert_eq!(choreo(&["classify", &path]).status.code(), Some(code), "κ = {kappa}");
    }
}

#[test]
fn classify_without_internal_motion_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let rigid = four_body(r#""1", "-1/2""#)
        .replace("r = [1, 0]", "r = [0, 0]")
        .replace("r = [-0.5, 0.5]", "r = [0, 0]")
        .replace("r = [-0.5, -0.5]", "r = [0, 0]")
        .replace("p = [0, 1.5]", "p = [1, 0]")
        .replace("p = [-0.5, -1]", "p = [1, 0]")
        .replace("p = [0, 0.5]", "p = [1, 0]")
        .replace("p = [0.5, -1]", "p = [1, 0]");
    let path = write(dir.path(), "rigid.toml", &rigid);
    assert_eq!(choreo(&["classify", &path]).status.code(), Some(3));
}

#[test]
fn classify_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = choreo(&["classify", &scenario("five_body_2_2_1"), "--json", path_str(&json)]);
    assert_eq!(o.status.code(), Some(10));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v, json_block(&stdout(&o)));
    let blocks: BTreeSet<BTreeSet<u64>> = v["trace_report"]["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["members"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect())
        .collect();
    let expected: BTreeSet<BTreeSet<u64>> = [vec![1, 2], vec![3, 5], vec![4]].into_iter().map(|b| b.into_iter().collect()).collect();
    assert_eq!(blocks, expected);
}

#[test]
fn classify_is_deterministic() {
    let a = choreo(&["classify", &scenario("six_body_2_2_2")]);
    let b = choreo(&["classify", &scenario("six_body_2_2_2")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_engines_agree_over_one_period() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let period = (2.0 * std::f64::consts::PI).to_string();
    let o = choreo(&["simulate", &scenario("four_body_limacon"), "--t-end", &period, "--engine", "both", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o).lines().find(|l| l.starts_with("max deviation")).unwrap().to_string();
    let dev: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(dev <= 1e-6, "{line}");

    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10_001);
    let last_t: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!((last_t - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    // After one period particle 1 is back at its start.
    let x1: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!((x1 - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_zero_length_emits_one_row() {
    let o = choreo(&["simulate", &scenario("five_body_limacon"), "--t-end", "0", "--engine", "verlet", "--momenta"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), 21);
    assert!(lines[1].starts_with("0,0.1,0.24,"), "{}", lines[1]);
}

#[test]
fn simulate_missing_scenario() {
    assert_eq!(choreo(&["simulate", "missing.toml", "--t-end", "1"]).status.code(), Some(2));
}

#[test]
fn design_four_body_line() {
    let o = choreo(&["design", "--n", "4", "--ratios", "1:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "κ2 = −0.5·κ1; sample (1, −0.5)");
}

#[test]
fn design_six_body_family() {
    let o = choreo(&["design", "--n", "6", "--ratios", "1:2:2"]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o).lines().next().unwrap().to_string();
    // (7/2, 1/2, −1) satisfies both relations.
    assert!(first.starts_with("κ2 = 1/7·κ1; κ3 = −2/7·κ1;"), "{first}");
    assert!(stdout(&o).contains("sample spectrum: λ = (1, 4, 4)"));
}

#[test]
fn design_rejects_bad_targets() {
    assert_eq!(choreo(&["design", "--n", "4", "--ratios", "1:0"]).status.code(), Some(4));
    assert_eq!(choreo(&["design", "--n", "6", "--ratios", "1:2"]).status.code(), Some(4));
    assert_eq!(choreo(&["design", "--n", "4", "--ratios", "1:x"]).status.code(), Some(2));
    assert_eq!(choreo(&["design", "--n", "2", "--ratios", "1"]).status.code(), Some(3));
}

#[test]
fn scan_map_marks_the_resonant_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let o = choreo(&["scan", &data_file("scans", "four_body_plane"), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(&out).unwrap();
    let h = r.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|x| x == name).unwrap();
    let (k1, k2, cat) = (col("kappa1"), col("kappa2"), col("category"));
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 51 * 51);
    let mut on_line = 0;
    for row in &rows {
        let a: f64 = row[k1].parse().unwrap();
        let b: f64 = row[k2].parse().unwrap();
        if (b + a / 2.0).abs() < 1e-12 {
            on_line += 1;
            assert!(row[cat].starts_with("Equivariant"), "κ = ({a}, {b}): {}", &row[cat]);
        }
        if b <= -a {
            assert_eq!(&row[cat], "Unbounded");
        }
    }
    assert!(on_line >= 5);
}

#[test]
fn scan_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = choreo(&["scan", &data_file("scans", "six_body_random"), "--out", path_str(p)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 36 * 41 * 2);
}

#[test]
fn scan_rejects_oversized_grid() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data_file("scans", "four_body_plane")).unwrap();
    let req = write(dir.path(), "big.toml", &text.replacen("n = 4", "n = 4\ncell_cap = 100", 1));
    let o = choreo(&["scan", &req, "--out", path_str(&dir.path().join("m.csv"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("2601"));
}

fn stroke_colors(svg: &str) -> BTreeSet<String> {
    svg.lines()
        .filter(|l| l.starts_with("<polyline"))
        .map(|l| l.split("stroke=\"").nth(1).unwrap()[..7].to_string())
        .collect()
}

fn plot_scenario(dir: &Path, name: &str, period: f64) -> String {
    let csv = dir.join(format!("{name}.csv"));
    let report = dir.join(format!("{name}.txt"));
    let svg = dir.join(format!("{name}.svg"));
    let t_end = period.to_string();
    let o = choreo(&["simulate", &scenario(name), "--t-end", &t_end, "--every", "20", "--out", path_str(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&report, choreo(&["classify", &scenario(name)]).stdout).unwrap();
    let o = choreo(&["plot", path_str(&csv), "--partition", path_str(&report), "--out", path_str(&svg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::read_to_string(&svg).unwrap()
}

#[test]
fn plot_colors_follow_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let tau = 2.0 * std::f64::consts::PI;
    let chor = plot_scenario(dir.path(), "six_body_choreography_rescaled", tau / 3f64.sqrt());
    assert_eq!(chor.matches("<polyline").count(), 6);
    assert_eq!(stroke_colors(&chor).len(), 1);
    let frag = plot_scenario(dir.path(), "six_body_2_2_2", tau);
    assert_eq!(stroke_colors(&frag).len(), 3);
    assert!(frag.starts_with("<?xml") && frag.contains(r#"version="1.1""#));
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let tau = 2.0 * std::f64::consts::PI;
    let a = plot_scenario(dir.path(), "four_body_2_2", tau);
    let b = plot_scenario(dir.path(), "four_body_2_2", tau);
    assert_eq!(a, b);
}

#[test]
fn plot_rejects_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.csv", "");
    let header_only = write(dir.path(), "h.csv", "t,x1,y1\n");
    for path in [empty, header_only] {
        let o = choreo(&["plot", &path, "--out", path_str(&dir.path().join("o.svg"))]);
        assert_eq!(o.status.code(), Some(2));
    }
}
