use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn ratnest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratnest"))
        .args(args)
        .env("RATNEST_THREADS", "1")
        .output()
        .expect("run ratnest")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bw_planar_accepts_and_rejects() {
    let k4 = data("k4.gr");
    let yes = ratnest(&["bw-planar", "--k", "3", path_str(&k4)]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).contains("bw ≤ 3"));
    let no = ratnest(&["bw-planar", "--k", "2", path_str(&k4)]);
    assert_eq!(no.status.code(), Some(2));
    assert!(stdout(&no).contains("bw > 2"));
}

#[test]
fn genus_approx_certifies_the_torus_grid() {
    let out = ratnest(&[
        "genus-approx",
        "--k",
        "3",
        path_str(&data("c3c3-torus.emb")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("LB 3 Representativity"));
}

#[test]
fn produced_decompositions_validate() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = data("k4.gr");
    let scd = dir.path().join("k4.scd");
    let bd = dir.path().join("k4.bd");
    assert_eq!(
        ratnest(&["scd", "-o", path_str(&scd), path_str(&k4)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        ratnest(&["bw-planar", "--k", "4", "-o", path_str(&bd), path_str(&k4)])
            .status
            .code(),
        Some(0)
    );
    for artifact in [&scd, &bd] {
        let v = ratnest(&["validate", path_str(&k4), path_str(artifact)]);
        assert_eq!(v.status.code(), Some(0));
        assert!(stdout(&v).starts_with("ok\nwidth 3"));
    }

    let torus = data("c3c3-torus.emb");
    let approx = dir.path().join("torus.bd");
    let out = ratnest(&[
        "genus-approx",
        "--k",
        "4",
        "-o",
        path_str(&approx),
        path_str(&torus),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        ratnest(&["validate", path_str(&torus), path_str(&approx)])
            .status
            .code(),
        Some(0)
    );

    let ren = dir.path().join("v.ren");
    let attached = dir.path().join("v.bd");
    assert_eq!(
        ratnest(&["gen", "planted-vortex", "3", "-o", path_str(&ren)])
            .status
            .code(),
        Some(0)
    );
    let out = ratnest(&["vortex-attach", "-o", path_str(&attached), path_str(&ren)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("bound"));
    assert_eq!(
        ratnest(&["validate", path_str(&ren), path_str(&attached)])
            .status
            .code(),
        Some(0)
    );

    let ne = dir.path().join("n.ne");
    let merged = dir.path().join("n.bd");
    assert_eq!(
        ratnest(&["gen", "near-embedding", "4", "-o", path_str(&ne)])
            .status
            .code(),
        Some(0)
    );
    let out = ratnest(&[
        "pipeline",
        "--k",
        "8",
        "-o",
        path_str(&merged),
        path_str(&ne),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("<= bound"));
    assert_eq!(
        ratnest(&["validate", path_str(&ne), path_str(&merged)])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn broken_decomposition_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.bd");
    std::fs::write(&bad, "b nodes 2\nbn 1 leaf 1\nbn 2 leaf 2\nbe 1 2\n").unwrap();
    let out = ratnest(&["validate", path_str(&data("k4.gr")), path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracles() {
    let bw = ratnest(&["oracle", "bw", path_str(&data("k4.gr"))]);
    assert_eq!(bw.status.code(), Some(0));
    assert!(stdout(&bw).contains("bw 3"));
    let rep = ratnest(&["oracle", "rep", path_str(&data("c3c3-torus.emb"))]);
    assert!(stdout(&rep).contains("rep 3"));
}

#[test]
fn gen_is_seeded() {
    let a = ratnest(&["gen", "toroidal-grid", "9"]);
    let b = ratnest(&["gen", "toroidal-grid", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("c toroidal-grid seed 9"));
}

#[test]
fn errors_exit_with_one() {
    let missing = ratnest(&["bw-planar", "--k", "3", "no-such-file.gr"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error"));
    assert_eq!(
        ratnest(&["bw-planar", path_str(&data("k4.gr"))])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ratnest(&["gen", "hexagonal", "1"]).status.code(), Some(1));
    assert_eq!(
        ratnest(&["bw-planar", "--k", "3", path_str(&data("c3c3-torus.emb"))])
            .status
            .code(),
        Some(1)
    );
}
