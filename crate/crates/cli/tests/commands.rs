use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Command, Stdio};

use mindgames_core::game::{replay, GameOptions, GameTranscript};
use mindgames_core::metrics::{compute_metrics, MetricsOptions};
use mindgames_core::model::{Condition, Instance};
use mindgames_core::protocol::TemplateClassifier;
use mindgames_core::records;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mindgames"))
}

fn ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_samples_and_enumerates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.ndjson");
    ok(bin().args(["gen", "--sample", "7", "--seed", "5", "-o"]).arg(&path));
    let a = records::load_instances(&path).unwrap();
    assert_eq!(a.len(), 7);
    assert!(a.iter().all(|i| i.hidden.len() == 4 && i.reveal.len() == 2));
    ok(bin().args(["gen", "--sample", "7", "--seed", "5", "-o"]).arg(&path));
    assert_eq!(records::load_instances(&path).unwrap(), a);

    let all = ok(bin().args(["gen", "--attributes", "2", "--filters", "none"]));
    let parsed: Vec<Instance> = records::read_ndjson(all.as_bytes(), records::INSTANCES).unwrap();
    assert_eq!(parsed.len(), 288);
    let some = ok(bin().args(["gen", "--attributes", "2", "--filters", "poison"]));
    let some: Vec<Instance> = records::read_ndjson(some.as_bytes(), records::INSTANCES).unwrap();
    assert_eq!(some.len(), 144);
    assert!(some.iter().all(mindgames_core::generator::has_necessary_and_poison_structure));

    let out = bin().args(["gen", "--filters", "bogus"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn tournament_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.ndjson");
    let games = dir.path().join("games.ndjson");
    ok(bin().args(["gen", "--sample", "6", "--seed", "2", "-o"]).arg(&inst));
    let summary = ok(bin()
        .args(["tournament", "--persuader", "scripted_perfect", "--condition", "both", "--instances"])
        .arg(&inst)
        .arg("-o")
        .arg(&games));
    assert!(summary.contains("scripted_perfect hidden default: won 6/6"), "{summary}");
    assert!(summary.contains("scripted_perfect revealed default: won 6/6"), "{summary}");
    ok(bin()
        .args(["tournament", "--persuader", "random", "--condition", "hidden", "--trials", "3", "--instances"])
        .arg(&inst)
        .arg("-o")
        .arg(&games));

    let transcripts = records::load_transcripts(&games).unwrap();
    assert_eq!(transcripts.len(), 12 + 18);
    for t in &transcripts {
        assert_eq!(&replay(t, &TemplateClassifier, &GameOptions::default()).unwrap(), t);
    }

    let json = ok(bin().arg("analyze").arg("--input").arg(&games).args(["--bootstrap", "300", "--json"]));
    let groups: Vec<serde_json::Value> = json.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(groups.len(), 3);
    let hidden_perfect: Vec<GameTranscript> = transcripts
        .iter()
        .filter(|t| t.condition == Condition::Hidden && t.persuader.as_str() == "scripted_perfect")
        .cloned()
        .collect();
    let expected = compute_metrics(&hidden_perfect, &MetricsOptions { resamples: 300, ..Default::default() }).unwrap();
    let g = groups
        .iter()
        .find(|g| g["persuader"] == "scripted_perfect" && g["condition"] == "hidden")
        .unwrap();
    assert_eq!(g["report"], serde_json::to_value(&expected).unwrap());

    let text = ok(bin().arg("analyze").arg("--input").arg(&games).args(["--bootstrap", "300", "--no-inferential"]));
    assert!(text.contains("appeals to all (no inferential)"));
    assert!(text.contains("== random / hidden / default: 18 games =="));
}

#[test]
fn tournament_rejects_bruteforce_in_hidden() {
    let out = bin().args(["tournament", "--persuader", "bruteforce", "--sample", "2"]).output().unwrap();
    assert!(!out.status.success());
    let out = ok(bin().args(["tournament", "--persuader", "bruteforce", "--condition", "revealed", "--sample", "3"]));
    assert!(out.contains("won 3/3"), "{out}");
}

#[test]
fn non_mental_tournament_moves_the_cover_story() {
    let dir = tempfile::tempdir().unwrap();
    let games = dir.path().join("g.ndjson");
    ok(bin()
        .args(["tournament", "--persuader", "scripted_perfect", "--variant", "non_mental", "--sample", "3", "-o"])
        .arg(&games));
    let ts = records::load_transcripts(&games).unwrap();
    assert!(ts.iter().all(|t| t.instance.scenario == "metals"));
}

#[test]
fn baseline_reports() {
    let table = ok(bin().args(["baseline", "--analytic", "--n", "7"]));
    assert!(table.contains("   6  0.075196"), "{table}");
    assert!(table.contains("best n in 0..=50: 6"));
    let mc = ok(bin().args(["baseline", "--n", "6", "--trials", "2000", "--instances", "10"]));
    assert!(mc.contains("analytic p(6) = 0.075196"));
    assert!(mc.contains("monte carlo: "));
}

#[test]
fn play_in_the_terminal() {
    let dir = tempfile::tempdir().unwrap();
    let games = dir.path().join("play.ndjson");
    let mut child = bin()
        .args(["play", "--sample", "1", "--condition", "hidden", "-o"])
        .arg(&games)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let stdin = child.stdin.as_mut().unwrap();
        writeln!(stdin, "hi").unwrap();
        for k in 0..8 {
            writeln!(stdin, "Just making conversation {k}").unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("## High Level Instructions"));
    assert!(text.contains("rejected (message has 2 characters"));
    assert!(text.contains("[8/8] you:"));
    assert!(text.contains("The other player chose"));
    assert!(!text.contains("They like"), "hidden condition shows no target panel");
    let ts = records::load_transcripts(&games).unwrap();
    assert_eq!(ts.len(), 1);
    assert!(ts[0].is_complete());
    assert_eq!(ts[0].turns[0].rejected.len(), 1);
}

#[test]
fn serve_answers_requests() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = bin()
        .args(["serve", "--port", "0", "--sample", "3", "--storage-dir"])
        .arg(dir.path())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(child.stdout.as_mut().unwrap()).read_line(&mut first).unwrap();
    let addr = first.trim().strip_prefix("listening on http://").expect("address line").to_string();

    let body = r#"{"condition":"revealed","persuader":"human"}"#;
    let request = format!(
        "POST /sessions HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let mut stream = TcpStream::connect(&addr).unwrap();
    stream.write_all(request.as_bytes()).unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 201"), "{response}");
    assert!(response.contains("\"target\""));
    assert!(dir.path().join("transcripts.ndjson").exists());
}

#[test]
fn help_lists_every_command() {
    let help = ok(bin().arg("--help"));
    for c in ["gen", "play", "tournament", "analyze", "baseline", "serve"] {
        assert!(help.contains(c), "{c} missing from help");
    }
}
