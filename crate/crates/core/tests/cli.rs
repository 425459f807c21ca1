use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(config: &Path, out: &Path, jobs: usize) -> Output {
    bin()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", &jobs.to_string()])
        .output()
        .unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn bundled_scenarios_validate() {
    for name in ["fig1b.cfg", "fig1c.cfg", "fig2a.cfg", "fig2b.cfg", "fig2cd.cfg", "engineer.cfg"] {
        let out = bin().args(["validate", scenario(name).to_str().unwrap()]).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn fig2a_summary_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scenario("fig2a.cfg"), dir.path(), 2);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4);
    assert!(stdout.lines().all(|l| l.starts_with("run 00")));

    let summary = fs::read_to_string(dir.path().join("fig2a_summary.csv")).unwrap();
    assert!(summary.starts_with("kappa1,kappa2,T31_0,optimal,half_width_analytic,half_width_numeric\n"));
    let spectrum = fs::read_to_string(dir.path().join("fig2a_run003_spectrum.csv")).unwrap();
    let rows: Vec<&str> = spectrum.lines().collect();
    assert_eq!(rows.len(), 602);
    assert!(rows[1].starts_with("-1.5,"));
    assert!(rows[601].starts_with("1.5,"));
    assert!(!spectrum.contains('\r'));
}

#[test]
fn output_is_byte_identical_across_runs_and_job_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for name in ["fig1b.cfg", "fig2cd.cfg"] {
        assert!(run(&scenario(name), a.path(), 1).status.success());
        assert!(run(&scenario(name), b.path(), 4).status.success());
    }
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert_eq!(fa.len(), 1 + 22 + 1 + 20);
    assert!(fa == fb, "CSV output differs between runs");
}

#[test]
fn fig1b_columns() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&scenario("fig1b.cfg"), dir.path(), 2).status.success());
    let summary = fs::read_to_string(dir.path().join("fig1b_summary.csv")).unwrap();
    let header = summary.lines().next().unwrap();
    assert!(header.starts_with("kappa1,r,F_numeric,F1_analytic,F_analytic,"), "{header}");
    assert_eq!(summary.lines().count(), 23);
}

#[test]
fn config_error_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[scenario]\nkind = convert\n[params]\nkappa_one = 0.1\n").unwrap();
    for args in [vec!["run", cfg.to_str().unwrap()], vec!["validate", cfg.to_str().unwrap()]] {
        let out = bin().args(&args).current_dir(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(1));
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.contains("unknown key kappa_one in [params]"), "{stderr}");
        assert!(out.stdout.is_empty());
    }
    let missing = bin().args(["run", "does/not/exist.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn numeric_error_exits_with_2_and_names_the_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gap.cfg");
    fs::write(
        &cfg,
        "[scenario]\nkind = convert\n[params]\nkappa1 = 0.05\n[schedule]\nkind = piecewise\n\
         breakpoints = 0:0:-5, 0.5:0:0, 1:5:0\n[initial]\nalpha_re = 1\n",
    )
    .unwrap();
    let out = run(&cfg, dir.path(), 1);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("t = 0.5"), "{stderr}");
    assert!(!dir.path().join("convert_summary.csv").exists());
}
