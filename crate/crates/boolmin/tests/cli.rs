use std::path::Path;
use std::process::{Command, Output};

fn boolmin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolmin"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let w = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
    w("shared_input.txt", "((In1 & In2) | (In2 & In3))\n");
    w(
        "factored.txt",
        "i1 INPUT In1\ni2 INPUT In2\ni3 INPUT In3\no OR i1 i3\ng AND i2 o\nOUTPUT g\n",
    );
    w("and.txt", "A & B\n");
    w("or.txt", "A | B\n");
    w("opt.txt", "(In2 & (In1 | In3))\n");
    w("bad.txt", "(a & \n");
    let wide = |sep: &str| {
        (0..30)
            .map(|i| format!("(v{i} & w{})", i % 7))
            .collect::<Vec<_>>()
            .join(sep)
    };
    w("wide1.txt", &wide(" | "));
    w("wide2.txt", &format!("{} | (v0 & v1 & w3)", wide(" | ")));
    dir
}

#[test]
fn optimize_shared_input() {
    let dir = setup();
    let o = boolmin(&["optimize", "--alg", "hc", "--check", "shared_input.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.starts_with("(In2 & (In1 | In3))\ncost 4 -> 3 (25.0%) HC check: equivalent"),
        "{out}"
    );
    let o = boolmin(&["optimize", "opt.txt"], dir.path());
    assert!(stdout(&o).contains("cost 3 -> 3 (0.0%)"));
}

#[test]
fn exit_codes() {
    let dir = setup();
    assert_eq!(
        boolmin(&["optimize", "--alg", "nope", "shared_input.txt"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(boolmin(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(
        boolmin(&["optimize", "--params", "t_min=500", "shared_input.txt"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        boolmin(&["optimize", "--params", "bogus=1", "shared_input.txt"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        boolmin(&["optimize", "--params", "seed=3", "shared_input.txt"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        boolmin(&["bench", "--algs", ",", "shared_input.txt"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(boolmin(&["optimize", "missing.txt"], dir.path()).status.code(), Some(2));
    let o = boolmin(&["optimize", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.txt: line 1"));
    assert_eq!(boolmin(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn params_reach_the_optimizer() {
    let dir = setup();
    let o = boolmin(
        &[
            "optimize",
            "--alg",
            "isa",
            "--params",
            "restarts=2,k_max=10,acceptance=literal",
            "shared_input.txt",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_verdicts() {
    let dir = setup();
    assert_eq!(
        stdout(&boolmin(&["verify", "shared_input.txt", "factored.txt"], dir.path())),
        "EQUIVALENT\n"
    );
    assert_eq!(
        stdout(&boolmin(&["verify", "and.txt", "or.txt"], dir.path())),
        "NOT-EQUIVALENT\nwitness: A=1 B=0\n"
    );
    let o = boolmin(
        &["verify", "--mode", "exhaustive", "wide1.txt", "wide2.txt"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sampled"));
    let a = stdout(&boolmin(
        &["verify", "--mode", "sampled", "--seed", "4", "wide1.txt", "wide2.txt"],
        dir.path(),
    ));
    let b = stdout(&boolmin(
        &["verify", "--mode", "sampled", "--seed", "4", "wide1.txt", "wide2.txt"],
        dir.path(),
    ));
    assert_eq!(a, b);
    assert!(
        a.starts_with("UNKNOWN-SAMPLED-OK") || a.starts_with("NOT-EQUIVALENT"),
        "{a}"
    );
}

#[test]
fn verify_lists_and_applies_rewrites() {
    let dir = setup();
    let list = stdout(&boolmin(&["verify", "--sites", "shared_input.txt"], dir.path()));
    assert_eq!(list.lines().count(), 5, "{list}");
    assert!(list.contains("factorization"));
    let applied = stdout(&boolmin(&["verify", "--apply", "1", "shared_input.txt"], dir.path()));
    assert!(applied.contains("cost 4 -> 6 check: equivalent"), "{applied}");
    assert_eq!(
        boolmin(&["verify", "--apply", "9", "shared_input.txt"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn gen_outputs() {
    let dir = setup();
    let o = stdout(&boolmin(
        &["gen", "--family", "comparison", "--bits", "5", "--k", "11"],
        dir.path(),
    ));
    assert_eq!(o.lines().nth(1), Some("(A4 | (A3 & (A2 | (A0 & A1))))"));
    let args = [
        "gen", "--family", "random", "--vars", "20:25", "--lits", "20:40", "-n", "50", "--seed", "3",
    ];
    let a = stdout(&boolmin(&args, dir.path()));
    assert_eq!(a, stdout(&boolmin(&args, dir.path())));
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 50);
    assert!(a.starts_with("# boolmin gen family=random vars=20:25 lits=20:40 seed=3 count=50"));
    let o = boolmin(
        &[
            "gen",
            "--family",
            "random",
            "--vars",
            "3",
            "--lits",
            "100",
            "--max-retries",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("5 attempts"));
}

#[test]
fn bench_toy_dataset() {
    let dir = setup();
    std::fs::write(
        dir.path().join("toy.txt"),
        "# three copies\n((In1 & In2) | (In2 & In3))\n".repeat(3),
    )
    .unwrap();
    let o = boolmin(
        &["bench", "--algs", "hc", "--reps", "4", "--check", "toy.txt"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("HC    | 25.0 %  25.0 %"), "{}", stdout(&o));
}
