use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const CHAIN: &str = r#"{"ambient_rank":2,"supports":[[[0,0],[1,0]],[[0,0],[1,0],[0,1]]]}"#;
const DEPENDENT: &str = r#"{"ambient_rank":1,"supports":[[[0],[1],[2]],[[0],[1]]]}"#;

fn atlas(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_atlas"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().expect("stdin");
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).expect("write stdin");
        }
    }
    child.wait_with_output().expect("process finishes")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn file_with(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn analyze_is_the_default_subcommand() {
    let f = file_with(CHAIN);
    let path = f.path().to_str().unwrap();
    let implicit = atlas(&[path], None);
    let explicit = atlas(&["analyze", path], None);
    assert_eq!(implicit.status.code(), Some(0));
    assert_eq!(implicit.stdout, explicit.stdout);
    let v = json(&implicit);
    assert_eq!(v["classification"]["kind"], "BK");
    assert_eq!(v["mixed_volume"], 1);
    assert_eq!(v["schema_version"], "1");
}

#[test]
fn reads_stdin() {
    let o = atlas(&["mixed-volume", "-"], Some(CHAIN));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["mixed_volume"], 1);
}

#[test]
fn input_errors_exit_with_two() {
    let o = atlas(&["analyze", "-"], Some("[1, 2"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["kind"], "ParseError");

    let o = atlas(&["/definitely/not/here.json"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(json(&o)["error"]["message"].as_str().unwrap().contains("cannot read"));

    let o = atlas(&["decompose", "-"], Some(DEPENDENT));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["kind"], "NotBK");
}

#[test]
fn batches_keep_going() {
    let batch = format!("[{CHAIN}, {{\"ambient_rank\": 0}}, {DEPENDENT}]");
    let o = atlas(&["-"], Some(&batch));
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    assert!(items[1].get("error").is_some());
    assert_eq!(items[2]["classification"]["kind"], "LinearlyDependent");
}

#[test]
fn degrees_can_be_switched_off() {
    let o = atlas(&["analyze", "--degrees", "off", "-"], Some(CHAIN));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["degrees"].is_null());
    let on = json(&atlas(&["-"], Some(CHAIN)));
    assert_eq!(on["degrees"].as_array().unwrap().len(), 4);
}

#[test]
fn degrees_subcommand() {
    let o = atlas(&["degrees", "-"], Some(DEPENDENT));
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&o)["degrees"].as_array().unwrap().clone();
    let a = rows.iter().find(|r| r["report"] == "a_disc").unwrap();
    assert_eq!(a["degree"]["value"], 3);
}

#[test]
fn text_format() {
    let o = atlas(&["--format", "text", "-"], Some(CHAIN));
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("class: BK"), "{text}");
    assert!(text.contains("mixed volume: 1"), "{text}");

    let batch = format!("[{CHAIN}, {CHAIN}]");
    let o = atlas(&["--format", "text", "-"], Some(&batch));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.matches("\n---\n").count(), 1, "{text}");
}

#[test]
fn output_is_deterministic() {
    let runs: Vec<Vec<u8>> = (0..3).map(|_| atlas(&["-"], Some(CHAIN)).stdout).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn selfcheck_passes() {
    let o = atlas(&["selfcheck", "--seed", "3", "--trials", "2", "--random", "2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 3);
}
