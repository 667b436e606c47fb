#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn fixture(file: &str) -> String {
    root().join("fixtures").join(file).display().to_string()
}

pub fn reqexec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqexec")).args(args).env_remove("REQEXEC_TOLERANCE").output().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A fresh scratch directory under the system temp dir.
pub fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reqexec-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Feeds the commands of a transcript (its `> ` lines plus comments) to
/// `reqexec run --echo` in `dir` and returns what it printed.
pub fn replay(transcript: &str, dir: &PathBuf) -> String {
    let model = transcript
        .lines()
        .find_map(|l| l.strip_prefix("# model: "))
        .expect("transcript names its model");
    let script: String = transcript
        .lines()
        .filter_map(|l| {
            if let Some(cmd) = l.strip_prefix("> ") {
                Some(format!("{cmd}\n"))
            } else if l.is_empty() || l.starts_with('#') {
                Some(format!("{l}\n"))
            } else {
                None
            }
        })
        .collect();
    let mut child = Command::new(env!("CARGO_BIN_EXE_reqexec"))
        .args(["run", &root().join(model).display().to_string(), "--echo"])
        .current_dir(dir)
        .env_remove("REQEXEC_TOLERANCE")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    stdout(&out)
}

/// A bare HTTP/1.1 request; returns the status code and body.
pub fn http(port: u16, method: &str, path: &str, body: &str) -> (u16, String) {
    let mut s = TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut resp = String::new();
    s.read_to_string(&mut resp).unwrap();
    let status = resp.split_whitespace().nth(1).unwrap().parse().unwrap();
    let body = resp.split_once("\r\n\r\n").map(|(_, b)| b.to_string()).unwrap_or_default();
    (status, body)
}
