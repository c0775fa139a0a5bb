use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn onerel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_onerel"))
        .current_dir(root())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Set `UPDATE_GOLDEN=1` to rewrite the files after an intended format change.
fn golden(name: &str, args: &[&str], code: i32) {
    let (c, out, err) = onerel(args);
    assert_eq!(c, code, "{args:?}: {err}");
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(out, want, "{name} differs");
}

#[test]
fn golden_prefix_member_yes() {
    golden("prefix-member-aba-A.json", &["--json", "prefix-member", "corpus/aba.pres", "A"], 0);
}

#[test]
fn golden_prefix_member_no() {
    golden("prefix-member-baa-a.json", &["--json", "prefix-member", "corpus/baa.pres", "a"], 1);
}

#[test]
fn golden_right_invertible() {
    golden(
        "right-invertible-ohare-ad.json",
        &["--json", "right-invertible", "corpus/ohare.pres", "ad"],
        0,
    );
}

#[test]
fn golden_unsupported() {
    golden(
        "right-invertible-unsupported.json",
        &["--json", "right-invertible", "corpus/aba.pres", "a"],
        2,
    );
}

#[test]
fn golden_pieces() {
    golden("pieces-ohare.json", &["--json", "pieces", "abcdacdadabbcdacd"], 0);
}

#[test]
fn golden_classify() {
    golden("classify-genus2.json", &["--json", "classify", "corpus/genus2.pres"], 0);
}

#[test]
fn golden_munn() {
    golden("munn-eq.json", &["--json", "munn-eq", "--trees", "aAa", "a"], 0);
}

#[test]
fn golden_oracle() {
    golden("oracle-bs23-BA.json", &["--json", "oracle", "corpus/bs23.pres", "BA"], 0);
}

#[test]
fn golden_submonoid_amalgam() {
    golden(
        "submonoid-amalgam.json",
        &[
            "--json",
            "submonoid-member",
            "--amalgam",
            "corpus/surface.amalgam",
            "--gens",
            "corpus/surface.gens",
            "--word",
            "abABdc",
        ],
        0,
    );
}

#[test]
fn pieces_text() {
    let (c, out, _) = onerel(&["pieces", "--algo", "benois", "abcdacdadabbcdacd"]);
    assert_eq!(c, 0);
    assert_eq!(out, "(abcd)(acd)(ad)(abbcd)(acd)\n");
    let (_, out, _) = onerel(&["pieces", "--algo", "adjan", "abcdacdadabbcdacd"]);
    assert_eq!(out, "(abcdacdadabbcdacd)\n");
}

#[test]
fn exit_codes() {
    assert_eq!(onerel(&["prefix-member", "corpus/aba.pres", "a"]).0, 0);
    assert_eq!(onerel(&["prefix-member", "corpus/baa.pres", "B"]).0, 1);
    assert_eq!(onerel(&["right-invertible", "corpus/aba.pres", "a"]).0, 2);
    assert_eq!(onerel(&["--automaton-cap", "1", "prefix-member", "corpus/bs23.pres", "BA"]).0, 3);
    assert_eq!(onerel(&["no-such-command"]).0, 64);
    assert_eq!(onerel(&["classify", "corpus/missing.pres"]).0, 64);
    assert_eq!(onerel(&["prefix-member", "corpus/aba.pres", "z"]).0, 65);
    assert_eq!(onerel(&["munn-eq", "aA", "Aa"]).0, 1);
}

#[test]
fn parse_error_names_the_line() {
    let dir = std::env::temp_dir().join(format!("onerel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("bad.pres");
    std::fs::write(&f, "gens: a b\nrel aba\n").unwrap();
    let (c, _, err) = onerel(&["classify", f.to_str().unwrap()]);
    assert_eq!(c, 65);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn hnn_submonoid() {
    let run = |gens: &str, w: &str| {
        onerel(&[
            "submonoid-member",
            "--hnn",
            "corpus/bs23.hnn",
            "--gens",
            gens,
            "--word",
            w,
        ])
        .0
    };
    assert_eq!(run("corpus/bs23-thmc.gens", "TaaatT"), 0);
    assert_eq!(run("corpus/bs23-pos.gens", "tata"), 0);
    assert_eq!(run("corpus/bs23-pos.gens", "at"), 1);
}

#[test]
fn reduce_fsa_round_trip() {
    let dir = std::env::temp_dir().join(format!("onerel-fsa-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("a.fsa");
    // a·(aA)*: reduces to {a}
    std::fs::write(&f, "fsa states=2 alphabet=a\ninit: 0\nfinal: 1\n0 a 1\n1 a 0\n0 A 1\n").unwrap();
    let (c, out, err) = onerel(&["reduce", "--fsa", f.to_str().unwrap()]);
    assert_eq!(c, 0, "{err}");
    assert!(out.starts_with("fsa states="));
    assert_eq!(onerel(&["reduce", "--word", "aAbBBc"]).1, "Bc\n");
}

#[test]
fn corpus_manifest_passes() {
    let (c, out, _) = onerel(&["corpus", "corpus/manifest.txt"]);
    assert_eq!(c, 0, "{out}");
}

#[test]
fn corpus_wrong_expectation_fails() {
    let dir = std::env::temp_dir().join(format!("onerel-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("aba.pres"), "gens: a b\nrel: aba\n").unwrap();
    std::fs::write(dir.join("m.txt"), "prefix-member aba.pres a yes\nprefix-member aba.pres b no\n").unwrap();
    let (c, out, _) = onerel(&["corpus", dir.join("m.txt").to_str().unwrap()]);
    assert_eq!(c, 1);
    assert!(out.contains("FAIL line   2"), "{out}");
    assert!(out.contains("1/2 passed"));
}
