use std::io::Write;
use std::process::{Command, Output};

use hyperq_cli::{run_command, run_repl, Status};

fn hyperq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&stdout(&hyperq(&a))).expect("valid json")
}

#[test]
fn shadow_of_quotient() {
    let o = hyperq(&["shadow", "(2*w^2+3)/(w^2-w)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2");
    let v = json(&["shadow", "(2*w^2+3)/(w^2-w)"]);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["shadow"], serde_json::json!({"num": "2", "den": "1"}));
    assert_eq!(json(&["shadow", "1 - w^2"])["shadow"], serde_json::json!({"infinity": "-"}));
}

#[test]
fn measure_of_open_interval() {
    let o = hyperq(&["measure", "(1/4,3/4)"]);
    assert_eq!(stdout(&o), "1/2");
    let v = json(&["measure", "(1/4,3/4)"]);
    assert_eq!(v["loeb"], serde_json::json!({"num": "1", "den": "2"}));
    assert_eq!(v["standard"], true);
    assert_eq!(stdout(&hyperq(&["measure", "[0, 1/w] | {1/2}"])), "0");
}

#[test]
fn exit_codes() {
    let o = hyperq(&["eval", "1/0"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("line 1, column 3"), "{err}");
    assert_eq!(hyperq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hyperq(&["shadow"]).status.code(), Some(2));
    assert_eq!(hyperq(&["ext", "1/(1 + M0)"]).status.code(), Some(4));
    assert_eq!(hyperq(&["measure", "--sigma", "/nonexistent/file"]).status.code(), Some(4));
    let v = json(&["eval", "w +"]);
    assert_eq!(v["status"], "error");
    assert_eq!(v["exit_code"], 3);
}

#[test]
fn outputs_are_deterministic() {
    let runs: Vec<_> = (0..3).map(|_| hyperq(&["--json", "hull", "limit", "k/(k+1) + 1/w", "--slope", "1", "--offset", "1"])).collect();
    assert!(runs.windows(2).all(|p| p[0].stdout == p[1].stdout));
    assert!(runs[0].status.success());
}

#[test]
fn plain_and_json_agree() {
    let cases: &[&[&str]] = &[
        &["eval", "(w + 1)^2 - w^2"],
        &["eval", "1/w < 1/1000"],
        &["classify", "3 + 1/w"],
        &["ext", "3 + 1/w + M0"],
        &["ext", "1 + M0", "--compare", "1 + G0"],
        &["hull", "dist", "1/2 + 1/w", "1/3", "--space", "rat"],
        &["hull", "approachable", "w"],
    ];
    for args in cases {
        let r = run_command(std::iter::once("hyperq").chain(args.iter().copied()));
        assert_eq!(r.status, Status::Ok, "{args:?}");
        let v = &r.json;
        let expected = match args[0] {
            "eval" => match v["value"].get("text") {
                Some(t) => t.as_str().unwrap().to_string(),
                None => v["value"].to_string(),
            },
            "classify" => v["class"].as_str().unwrap().to_string(),
            "ext" if args.len() > 2 => v["order"].as_str().unwrap().to_string(),
            "ext" => v["value"]["text"].as_str().unwrap().to_string(),
            _ if args[1] == "dist" => {
                format!("{}/{}", v["distance"]["num"].as_str().unwrap(), v["distance"]["den"].as_str().unwrap())
            }
            _ => v["approachable"].to_string(),
        };
        assert_eq!(r.text, expected, "{args:?}");
    }
}

#[test]
fn sigma_file_and_oracle() {
    let dir = std::env::temp_dir().join(format!("hyperq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dyadic.sigma");
    std::fs::File::create(&path)
        .unwrap()
        .write_all(b"mode: disjoint\ndepth: 10\ninterval: (2^(-k - 1), 2^-k]\n")
        .unwrap();
    let o = hyperq(&["measure", "--sigma", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("limit: 1"), "{}", stdout(&o));
    std::fs::write(&path, "mode: disjoint\ninterval: (1/0, 1]\n").unwrap();
    assert_eq!(hyperq(&["measure", "--sigma", path.to_str().unwrap()]).status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();

    let o = hyperq(&["oracle", "--index-size", "2", "--carrier-size", "2", "--depth", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mismatches: 0"));
}

#[test]
fn repl_is_stateless_and_line_based() {
    let input = b"shadow 1/w\n(w + 1)*(w - 1)\n\nmeasure \"[0, 1/2]\"\neval 1/0\nquit\nshadow 5\n";
    let mut out = Vec::new();
    run_repl(&input[..], &mut out, false, false).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[..3], ["0", "w^2 - 1", "1/2"]);
    assert!(lines[3].starts_with("error: "));
    assert_eq!(lines.len(), 4);
}

fn sample(name: &str) -> String {
    format!("{}/../../docs/samples/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn bundled_samples() {
    let o = hyperq(&["measure", "--sigma", &sample("cantor.sigma"), "--depth", "5"]);
    assert_eq!(stdout(&o).lines().last(), Some("limit: 0"));
    assert!(stdout(&o).contains("k = 5: 32/243"));
    let v = json(&["measure", "--sigma", &sample("shrinking.sigma")]);
    assert_eq!(v["mode"], "increasing");
    assert_eq!(v["limit"], serde_json::json!({"num": "1", "den": "1"}));

    let model = sample("chain.model");
    let o = hyperq(&["oracle", "--index-size", "3", "--carrier-size", "3", "--depth", "1", "--model", &model]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("result: pass"));
    let o = hyperq(&["oracle", "--index-size", "2", "--carrier-size", "3", "--depth", "1", "--model", &model]);
    assert_eq!(o.status.code(), Some(4));
    let dir = std::env::temp_dir().join(format!("hyperq-model-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.model");
    std::fs::write(&bad, "carrier: a b\nmember: a z\nindex: 2\nw: 0\n").unwrap();
    let o = hyperq(&["oracle", "--index-size", "3", "--carrier-size", "3", "--depth", "1", "--model", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}
