#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};
use std::time::Duration;

use futures::StreamExt;
use serde_json::Value;
use tempfile::TempDir;
use workbench::demo;
use workbench::{DataDir, RunningServer, Workspace};

pub const BIN: &str = env!("CARGO_BIN_EXE_workbench");

/// A fresh data directory holding the demo dataset.
pub fn demo_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let data = DataDir::open(dir.path(), false).unwrap();
    demo::write_demo(&data, demo::DEFAULT_SEED, false).unwrap();
    dir
}

pub fn load(path: &Path) -> Workspace {
    let (ws, report) = Workspace::load(DataDir::open(path, false).unwrap(), 500).unwrap();
    assert!(report.graph.rejected.is_empty() && report.corpus.rejected.is_empty());
    ws
}

pub async fn start(ws: Workspace) -> RunningServer {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    RunningServer::start(listener, ws).await.unwrap()
}

pub fn client() -> reqwest::Client {
    reqwest::Client::new()
}

pub async fn get(server: &RunningServer, path: &str) -> (u16, Value) {
    let r = client().get(server.url(path)).send().await.unwrap();
    (r.status().as_u16(), r.json().await.unwrap())
}

pub async fn send(server: &RunningServer, method: reqwest::Method, path: &str, body: &Value) -> (u16, Value) {
    let r = client().request(method, server.url(path)).json(body).send().await.unwrap();
    (r.status().as_u16(), r.json().await.unwrap())
}

pub async fn post(server: &RunningServer, path: &str, body: &Value) -> (u16, Value) {
    send(server, reqwest::Method::POST, path, body).await
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("WORKBENCH_DATA_DIR")
        .env_remove("WORKBENCH_PORT")
        .output()
        .unwrap()
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Minimal reader for a `text/event-stream` response.
pub struct SseStream {
    body: std::pin::Pin<Box<dyn futures::Stream<Item = reqwest::Result<Vec<u8>>> + Send>>,
    buf: String,
}

impl SseStream {
    pub async fn open(server: &RunningServer, scope: &str) -> SseStream {
        let r = client().get(server.url(&format!("/events?scope={scope}"))).send().await.unwrap();
        assert_eq!(r.status().as_u16(), 200);
        SseStream { body: Box::pin(r.bytes_stream().map(|c| c.map(|b| b.to_vec()))), buf: String::new() }
    }

    /// Next event's data as JSON; `None` on timeout or end of stream.
    pub async fn next(&mut self, wait: Duration) -> Option<Value> {
        let deadline = tokio::time::Instant::now() + wait;
        loop {
            if let Some(end) = self.buf.find("\n\n") {
                let block: String = self.buf.drain(..end + 2).collect();
                let data: Vec<&str> = block.lines().filter_map(|l| l.strip_prefix("data:")).map(str::trim_start).collect();
                if data.is_empty() {
                    continue; // keep-alive comment
                }
                return Some(serde_json::from_str(&data.join("\n")).unwrap());
            }
            match tokio::time::timeout_at(deadline, self.body.next()).await {
                Ok(Some(Ok(chunk))) => self.buf.push_str(std::str::from_utf8(&chunk).unwrap()),
                _ => return None,
            }
        }
    }
}
