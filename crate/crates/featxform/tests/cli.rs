use std::fs;
use std::path::Path;
use std::process::Command;

use featxform::npy::load_npy;
use featxform::report::parse_rd_csv;
use featxform_core::transform::deserialize_codebook;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn value(&self, key: &str) -> &str {
        self.stdout
            .lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
            .unwrap_or_else(|| panic!("no {key} in {}", self.stdout))
    }
}

fn featxform(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_featxform")).current_dir(dir).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(dir: &Path, args: &[&str]) -> Run {
    let r = featxform(dir, args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r
}

fn gen(dir: &Path, kind: &str, count: &str, seed: &str, out: &str) {
    ok(dir, &["gen", "--kind", kind, "--count", count, "--seed", seed, "--out", out]);
}

#[test]
fn gen_near_uniform_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let r = ok(dir.path(), &["--seed", "1", "gen", "--kind", "near-uniform", "--count", "1000", "--out", "u.npy"]);
    assert_eq!(r.value("elements"), "1000");
    let t = load_npy(dir.path().join("u.npy")).unwrap();
    assert!(t.values().iter().all(|v| (-1.0..=1.0).contains(v)));
    let bad = featxform(dir.path(), &["gen", "--kind", "cauchy", "--count", "10", "--out", "x.npy"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("param-error"));
}

#[test]
fn fit_writes_deterministic_codebooks() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen(d, "peaky", "2000", "3", "p.npy");
    let r = ok(d, &["fit", "--input", "p.npy", "--levels", "4", "--out", "a.dtcb"]);
    ok(d, &["fit", "--input", "p.npy", "--levels", "4", "--out", "b.dtcb"]);
    let a = fs::read(d.join("a.dtcb")).unwrap();
    assert_eq!(a, fs::read(d.join("b.dtcb")).unwrap());
    let cb = deserialize_codebook(&a).unwrap();
    assert_eq!(cb.levels(), 4);
    assert!(cb.centers().windows(2).all(|w| w[0] < w[1]));
    assert!(r.value("final_distortion").parse::<f64>().unwrap() > 0.0);
    assert!(r.value("iterations").parse::<u32>().unwrap() >= 1);

    let bad = featxform(d, &["fit", "--input", "p.npy", "--levels", "1", "--out", "c.dtcb"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("param-error"), "{}", bad.stderr);
    assert!(!d.join("c.dtcb").exists());
}

#[test]
fn fit_draws_k_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let names: Vec<String> = (0..4).map(|i| format!("s{i}.npy")).collect();
    for (i, n) in names.iter().enumerate() {
        gen(d, "heavy-tail", "300", &i.to_string(), n);
    }
    let mut args = vec!["fit", "--mode", "equal-freq", "--levels", "8", "--k-fit", "2", "--out", "k.dtcb", "--input"];
    args.extend(names.iter().map(String::as_str));
    assert_eq!(ok(d, &args).value("fit_elements"), "600");
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen(d, "peaky", "5000", "9", "x.npy");
    ok(d, &["fit", "--input", "x.npy", "--levels", "16", "--mode", "uniform", "--out", "x.dtcb"]);
    let enc = ok(d, &["encode", "--input", "x.npy", "--codebook", "x.dtcb", "--out", "x.dtfc"]);
    let dec = ok(d, &["decode", "--input", "x.dtfc", "--out", "y.npy", "--reference", "x.npy"]);
    let (m1, m2): (f64, f64) = (enc.value("mse").parse().unwrap(), dec.value("mse").parse().unwrap());
    assert!((m1 - m2).abs() <= 1e-12 * m1);
    assert_eq!(enc.value("bpfp"), dec.value("bpfp"));
    assert_eq!(load_npy(d.join("y.npy")).unwrap().shape(), &[5000]);

    let mismatch = featxform(d, &["encode", "--input", "x.npy", "--codebook", "x.dtcb", "--levels", "8", "--out", "z"]);
    assert_eq!(mismatch.code, 1);
    assert!(mismatch.stderr.contains("level-mismatch"));

    let mut bytes = fs::read(d.join("x.dtfc")).unwrap();
    let n = bytes.len();
    bytes[n / 2] ^= 0x40;
    fs::write(d.join("bad.dtfc"), &bytes).unwrap();
    let bad = featxform(d, &["decode", "--input", "bad.dtfc", "--out", "w.npy"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("format-error") || bad.stderr.contains("corrupt-payload"), "{}", bad.stderr);
    fs::write(d.join("short.dtfc"), &bytes[..n - 9]).unwrap();
    let short = featxform(d, &["decode", "--input", "short.dtfc", "--out", "w.npy"]);
    assert_eq!(short.code, 1);
}

#[test]
fn analyze_peaky_histogram_peaks_at_center() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen(d, "peaky", "20000", "42", "peaky.npy");
    gen(d, "near-uniform", "20000", "7", "flat.npy");
    ok(d, &["fit", "--input", "peaky.npy", "--levels", "64", "--out", "p.dtcb"]);
    let r = ok(
        d,
        &["analyze", "--input", "peaky.npy", "flat.npy", "--bins", "128", "--codebook", "p.dtcb", "--out-prefix", "a_"],
    );
    let csv = fs::read_to_string(d.join("a_peaky.hist.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 128);
    let top = rows.iter().max_by_key(|r| r[3].parse::<u64>().unwrap()).unwrap();
    let (lo, hi): (f64, f64) = (top[1].parse().unwrap(), top[2].parse().unwrap());
    assert!(lo <= 0.0 && 0.0 < hi, "max bin [{lo}, {hi})");
    assert_eq!(rows.last().unwrap()[4].parse::<f64>().unwrap(), 1.0);
    for f in ["a_flat.hist.csv", "a_peaky.hist.svg", "a_kl.csv", "a_kl_symbols.csv", "a_widths.csv", "a_flat.symbols.csv"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let kl = fs::read_to_string(d.join("a_kl.csv")).unwrap();
    assert!(kl.starts_with("p\\q,peaky,flat\n"));
    assert!(r.value("peaky.entropy_bits").parse::<f64>().unwrap() < r.value("flat.entropy_bits").parse().unwrap());
}

#[test]
fn sweep_from_flags_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen(d, "peaky", "4000", "1", "f.npy");
    let r = ok(
        d,
        &["sweep", "--fit-input", "f.npy", "--modes", "lloyd-max,uniform", "--levels", "2,8,32", "--restarts", "2",
          "--out", "rd.csv", "--svg", "rd.svg"],
    );
    assert_eq!(r.value("points"), "6");
    let pts = parse_rd_csv(&fs::read_to_string(d.join("rd.csv")).unwrap()).unwrap();
    assert_eq!(pts.len(), 6);
    assert_eq!(fs::read_to_string(d.join("rd.svg")).unwrap().matches("<polyline").count(), 2);

    fs::write(
        d.join("sweep.toml"),
        "fit = [\"f.npy\"]\nmodes = [\"lloyd-max\", \"uniform\"]\nlevels = [2, 8, 32]\nrestarts = 2\n",
    )
    .unwrap();
    ok(d, &["sweep", "--spec", "sweep.toml", "--out", "rd2.csv"]);
    assert_eq!(fs::read(d.join("rd.csv")).unwrap(), fs::read(d.join("rd2.csv")).unwrap());

    let bad = featxform(d, &["sweep", "--fit-input", "f.npy", "--levels", "8,4", "--out", "x.csv"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("param-error"));
}

#[test]
fn cross_matrix_has_zero_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["--seed", "5", "gen", "--kind", "peaky", "--count", "24000", "--rows", "12", "--out", "peaky.npy"]);
    ok(d, &["--seed", "6", "gen", "--kind", "near-uniform", "--count", "24000", "--rows", "12", "--out", "flat.npy"]);
    let r = ok(d, &["cross", "--inputs", "peaky.npy", "flat.npy", "--levels", "64", "--out", "x.csv", "--points", "p.csv"]);
    assert_eq!(r.value("sources"), "2");
    assert_eq!(r.value("diagonal_is_column_min"), "true");
    let csv = fs::read_to_string(d.join("x.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "fit\\eval,peaky,flat");
    for (i, line) in lines[1..].iter().enumerate() {
        let cells: Vec<f64> = line.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[i], 0.0);
        assert!(cells.iter().all(|&c| c >= 0.0));
    }
    let pts = parse_rd_csv(&fs::read_to_string(d.join("p.csv")).unwrap()).unwrap();
    assert_eq!(pts.len(), 4);
    assert_eq!((pts[1].source_tag.as_str(), pts[1].eval_tag.as_str()), ("peaky", "flat"));
}
