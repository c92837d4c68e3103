mod common;

use std::time::Duration;

use common::*;
use reqwest::Method;
use serde_json::{json, Value};
use workbench::Workspace;

const WAIT: Duration = Duration::from_secs(3);
const QUIET: Duration = Duration::from_millis(300);

#[tokio::test]
async fn health_counts_and_envelope() {
    let dir = demo_dir();
    let server = start(load(dir.path())).await;
    assert_eq!(get(&server, "/health").await, (200, json!({"status": "ok"})));

    let (status, counts) = get(&server, "/graph/counts").await;
    assert_eq!(status, 200);
    assert_eq!(counts["counts"], json!({"node_count": 1000, "edge_count": 3000}));
    let version = counts["graphVersion"].as_u64().unwrap();

    let (_, faceted) = get(&server, "/graph/faceted").await;
    assert_eq!(faceted["graphVersion"].as_u64(), Some(version));
    let supers = faceted["facetedGraph"]["super_nodes"].as_array().unwrap();
    assert_eq!(supers.len(), 5);
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn read_endpoints_and_errors() {
    let dir = demo_dir();
    let server = start(load(dir.path())).await;

    let (s, body) = post(&server, "/query", &json!({"query": "MATCH (a RETURN a"})).await;
    assert_eq!(s, 400);
    assert_eq!(body["error"]["kind"], "syntax");
    assert_eq!(body["error"]["position"], 9);

    let (s, body) = post(&server, "/query", &json!({"query": "MATCH (a:Skill) RETURN a LIMIT 3"})).await;
    assert_eq!(s, 200);
    assert_eq!(body["resultTable"]["rows"].as_array().unwrap().len(), 3);
    assert_eq!(body["resultTable"]["truncated"], true);

    assert_eq!(get(&server, "/graph/node/nope").await.0, 404);
    assert_eq!(get(&server, "/graph/node/nope/degree").await.0, 404);
    assert_eq!(get(&server, "/graph/node/occ-001/neighborhood?cap=0").await.0, 400);
    assert_eq!(get(&server, "/graph/node/occ-001/neighborhood?depth=x").await.0, 400);

    let (_, node) = get(&server, "/graph/node/occ-001").await;
    assert_eq!(node["node"]["type"], "Occupation");

    let (_, deg) = get(&server, "/graph/node/occ-001/degree").await;
    let rels = deg["degreeProfile"]["relations"].as_array().unwrap();
    let out: u64 = rels.iter().map(|r| r["out_count"].as_u64().unwrap()).sum();
    assert!(out >= 20);

    let (_, nb) = get(&server, "/graph/node/occ-001/neighborhood?depth=2&cap=7&rel=requires_skill").await;
    let sub = &nb["subgraph"];
    assert_eq!(sub["nodes"].as_array().unwrap().len(), 7);
    assert_eq!(sub["truncated"], true);
    assert!(sub["edges"].as_array().unwrap().iter().all(|e| e["rel"] == "requires_skill"));

    let (_, all) = get(&server, "/graph/distribution/relations").await;
    let (_, task) = get(&server, "/graph/distribution/relations?type=Task").await;
    assert_eq!(all["distribution"]["total"], 3000);
    assert_eq!(task["distribution"]["total"], 500 + 900);

    let (_, nodes) = get(&server, "/graph/distribution/nodes").await;
    assert_eq!(nodes["distribution"]["total"], 1000);

    let (s, freq) = get(&server, "/graph/frequency?type=Occupation").await;
    assert_eq!(s, 200);
    assert_eq!(freq["distribution"]["entries"].as_array().unwrap().len(), 100);
    assert_eq!(get(&server, "/graph/frequency").await.0, 400);

    let (_, m) = get(&server, "/corpus/mentions?node=occ-001").await;
    let docs = m["mentions"].as_array().unwrap();
    assert!(!docs.is_empty());
    let doc_id = docs[0]["doc_id"].as_str().unwrap().to_string();
    let span = &docs[0]["spans"][0];
    let (s, ctx) = post(
        &server,
        "/corpus/context",
        &json!({"doc_id": doc_id, "spans": [{"start": span["start"], "end": span["end"]}], "window": 10}),
    )
    .await;
    assert_eq!(s, 200);
    let segs = ctx["context"]["segments"].as_array().unwrap();
    assert!(segs.iter().any(|s| s["highlighted"] == true && s["text"] == span["surface"]));
    assert_eq!(get(&server, "/corpus/mentions").await.0, 400);
    assert_eq!(post(&server, "/corpus/context", &json!({"doc_id": "zz", "spans": [{"start": 0, "end": 1}]})).await.0, 404);
    assert_eq!(get(&server, &format!("/corpus/documents/{doc_id}")).await.0, 200);

    let (s, _) = post(&server, "/query", &json!({"text": "MATCH (a) RETURN a"})).await;
    assert_eq!(s, 400);
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn ingest_persists_across_restart() {
    let dir = tempfile::tempdir().unwrap();
    let server = start(load(dir.path())).await;
    let (s, body) = post(
        &server,
        "/ingest/graph",
        &json!({
            "nodes": [{"id": "a", "type": "Skill", "name": "Welding"}, {"type": "Skill"}, {"id": "a", "type": "Skill"}],
            "edges": [{"src": "a", "dst": "n1", "rel": "near"}, {"src": "a", "dst": "ghost", "rel": "near"}],
        }),
    )
    .await;
    assert_eq!(s, 200);
    let report = &body["report"];
    assert_eq!((report["nodes_added"].as_u64(), report["edges_added"].as_u64()), (Some(2), Some(1)));
    let kinds: Vec<(&str, u64)> = report["rejected"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["kind"].as_str().unwrap(), r["ordinal"].as_u64().unwrap()))
        .collect();
    assert_eq!(kinds, vec![("node", 3), ("edge", 2)]);

    let (s, body) = post(
        &server,
        "/ingest/corpus",
        &json!({"documents": [{"id": "d1", "text": "Welding café", "mentions": [{"start": 0, "end": 7, "surface": "Welding", "node_id": "a"}]}]}),
    )
    .await;
    assert_eq!(s, 200);
    assert_eq!(body["report"]["documents_added"], 1);
    let version_before = get(&server, "/graph/counts").await.1;
    server.shutdown().await.unwrap();

    let server = start(load(dir.path())).await;
    let (_, counts) = get(&server, "/graph/counts").await;
    assert_eq!(counts["counts"], version_before["counts"]);
    let (_, m) = get(&server, "/corpus/mentions?surface=WELDING").await;
    assert_eq!(m["mentions"][0]["doc_id"], "d1");
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn seed_session_flow() {
    let dir = demo_dir();
    let server = start(load(dir.path())).await;
    let (s, created) = post(&server, "/sessions/seeds", &json!({"entity_type": "Skill"})).await;
    assert_eq!(s, 200);
    let id = created["session"]["id"].as_str().unwrap().to_string();
    assert_eq!(post(&server, "/sessions/seeds", &json!({"entity_type": "Planet"})).await.0, 400);

    for node in ["skill-001", "skill-002", "skill-003"] {
        let (s, _) = post(&server, &format!("/sessions/seeds/{id}/seeds"), &json!({"node_id": node})).await;
        assert_eq!(s, 200);
    }
    let (s, _) = post(&server, &format!("/sessions/seeds/{id}/seeds"), &json!({"node_id": "occ-001"})).await;
    assert_eq!(s, 400, "type mismatch");
    let (s, after) = send(&server, Method::DELETE, &format!("/sessions/seeds/{id}/seeds/skill-002"), &json!(null)).await;
    assert_eq!(s, 200);
    assert_eq!(after["session"]["seeds"], json!(["skill-001", "skill-003"]));
    assert!(after["sessionVersion"].as_u64().unwrap() > created["sessionVersion"].as_u64().unwrap());

    let (_, exported) = get(&server, &format!("/sessions/seeds/{id}/export")).await;
    let file = exported["seedFile"].clone();
    let (s, imported) = post(&server, "/sessions/seeds/import", &file).await;
    assert_eq!(s, 200);
    let new_id = imported["session"]["id"].as_str().unwrap();
    let (_, again) = get(&server, &format!("/sessions/seeds/{new_id}/export")).await;
    assert_eq!(again["seedFile"], file);

    let (_, listed) = get(&server, "/sessions/seeds").await;
    assert_eq!(listed["sessions"].as_array().unwrap().len(), 2);
    let (s, sug) = get(&server, "/sessions/seeds/suggest?k=2").await;
    assert_eq!(s, 200);
    assert_eq!(sug["suggestions"].as_array().unwrap().len(), 2);
    assert_eq!(get(&server, "/sessions/seeds/suggest?k=0").await.0, 400);
    assert_eq!(get(&server, "/sessions/seeds/seed-99").await.0, 404);
    server.shutdown().await.unwrap();
}

fn candidate_lines(dir: &std::path::Path) -> Vec<Value> {
    std::fs::read_to_string(dir.join("candidates.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[tokio::test]
async fn verification_flow_and_merge() {
    let dir = demo_dir();
    let cands = candidate_lines(dir.path());
    let server = start(load(dir.path())).await;
    let (s, created) = post(&server, "/sessions/verify", &json!({"candidates": cands})).await;
    assert_eq!(s, 200);
    assert_eq!(created["rejected"], json!([]));
    let sid = created["session"]["id"].as_str().unwrap().to_string();
    let ids: Vec<String> = created["session"]["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["proposed_type"].is_string())
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect();
    assert!(ids.len() >= 3);

    let put = |cid: String, d: &'static str| {
        let path = format!("/sessions/verify/{sid}/candidates/{cid}");
        let server = &server;
        async move { send(server, Method::PUT, &path, &json!({"decision": d})).await }
    };
    assert_eq!(put(ids[0].clone(), "insert").await.0, 200);
    assert_eq!(put(ids[1].clone(), "insert").await.0, 200);
    assert_eq!(put(ids[2].clone(), "defer").await.0, 200);
    assert_eq!(put(ids[2].clone(), "maybe").await.0, 400);
    assert_eq!(put("nope".into(), "insert").await.0, 404);

    let (s, ctx) = get(&server, &format!("/sessions/verify/{sid}/candidates/{}/context?window=15", ids[0])).await;
    assert_eq!(s, 200);
    assert!(!ctx["candidateContext"]["corpus"].as_array().unwrap().is_empty());

    let (_, exported) = get(&server, &format!("/sessions/verify/{sid}/export")).await;
    let before = get(&server, "/graph/counts").await.1["counts"]["node_count"].as_u64().unwrap();
    let (s, merged) = post(&server, &format!("/sessions/verify/{sid}/merge"), &json!(null)).await;
    assert_eq!(s, 200);
    assert_eq!(merged["mergeResult"]["inserted_nodes"], 2);
    let after = get(&server, "/graph/counts").await.1["counts"]["node_count"].as_u64().unwrap();
    assert_eq!(after, before + 2);
    assert_eq!(put(ids[2].clone(), "insert").await.0, 409);
    assert_eq!(post(&server, &format!("/sessions/verify/{sid}/merge"), &json!(null)).await.0, 409);

    // the exported pre-merge decisions come back as a fresh, unmerged session
    let (s, imported) = post(&server, "/sessions/verify/import", &exported["decisionFile"]).await;
    assert_eq!(s, 200);
    assert_eq!(imported["session"]["merged"], false);
    assert_eq!(imported["session"]["candidates"], exported["decisionFile"]["candidates"]);
    server.shutdown().await.unwrap();

    // merged nodes and the frozen session survive a restart
    let server = start(load(dir.path())).await;
    assert_eq!(get(&server, "/graph/counts").await.1["counts"]["node_count"].as_u64(), Some(after));
    let (_, session) = get(&server, &format!("/sessions/verify/{sid}")).await;
    assert_eq!(session["session"]["merged"], true);
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn failed_merge_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let server = start(load(dir.path())).await;
    post(&server, "/ingest/graph", &json!({"nodes": [{"id": "t", "type": "Occupation"}]})).await;
    let cands = json!({"candidates": [
        {"id": "ok", "surface": "Good", "proposed_type": "Skill",
         "proposed_edges": [{"rel": "requires_skill", "target": "t", "dir": "in"}]},
        {"id": "bad", "surface": "Bad", "proposed_type": "Skill",
         "proposed_edges": [{"rel": "requires_skill", "target": "ghost", "dir": "in"}]},
    ]});
    let (_, created) = post(&server, "/sessions/verify", &cands).await;
    let sid = created["session"]["id"].as_str().unwrap().to_string();
    for c in ["ok", "bad"] {
        send(&server, Method::PUT, &format!("/sessions/verify/{sid}/candidates/{c}"), &json!({"decision": "insert"})).await;
    }
    let before = get(&server, "/graph/counts").await.1;
    let (s, body) = post(&server, &format!("/sessions/verify/{sid}/merge"), &json!(null)).await;
    assert_eq!(s, 400, "{body}");
    assert_eq!(get(&server, "/graph/counts").await.1, before);
    let (_, session) = get(&server, &format!("/sessions/verify/{sid}")).await;
    assert_eq!(session["session"]["merged"], false);
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn history_record_and_restore() {
    let dir = demo_dir();
    let server = start(load(dir.path())).await;
    let (s, rec) = post(
        &server,
        "/history",
        &json!({"op_name": "neighborhood", "params": {"node_id": "occ-002", "depth": 1}, "view_hint": {"layout": "radial"}}),
    )
    .await;
    assert_eq!(s, 200);
    let id = rec["state"]["id"].as_str().unwrap().to_string();
    let (s, child) = post(&server, "/history", &json!({"op_name": "faceted_graph", "parent": id})).await;
    assert_eq!(s, 200);
    assert_eq!(child["state"]["parent"], json!(id));

    assert_eq!(post(&server, "/history", &json!({"op_name": "launch_rockets"})).await.0, 400);
    assert_eq!(post(&server, "/history", &json!({"op_name": "counts", "parent": "state-99"})).await.0, 400);
    assert_eq!(post(&server, "/history", &json!({"op_name": "neighborhood", "params": {"bogus": 1}})).await.0, 400);

    let (_, restored) = get(&server, &format!("/history/{id}/restore")).await;
    let (_, direct) = get(&server, "/graph/node/occ-002/neighborhood?depth=1").await;
    assert_eq!(restored["restored"]["result"], direct["subgraph"]);
    assert_eq!(restored["restored"]["state"]["view_hint"], json!({"layout": "radial"}));
    assert_eq!(get(&server, "/history/state-404/restore").await.0, 404);

    let (_, list) = get(&server, "/history").await;
    assert_eq!(list["states"].as_array().unwrap().len(), 2);
    server.shutdown().await.unwrap();

    let server = start(load(dir.path())).await;
    let (_, list) = get(&server, "/history").await;
    assert_eq!(list["states"].as_array().unwrap().len(), 2);
    server.shutdown().await.unwrap();
}

fn selection(scope: &str, node: &str) -> Value {
    json!({"session_scope": scope, "target": {"kind": "node", "id": node}, "origin_view": "table"})
}

#[tokio::test]
async fn events_are_not_replayed_to_late_subscribers() {
    let server = start(Workspace::in_memory(500)).await;
    let (_, r) = post(&server, "/events", &selection("s", "early")).await;
    assert_eq!(r["seq"], 1);
    let mut sub = SseStream::open(&server, "s").await;
    assert!(sub.next(QUIET).await.is_none());
    post(&server, "/events", &selection("s", "late")).await;
    let ev = sub.next(WAIT).await.unwrap();
    assert_eq!((ev["seq"].as_u64(), ev["target"]["id"].as_str()), (Some(2), Some("late")));
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn events_in_order_and_identical_across_subscribers() {
    let server = start(Workspace::in_memory(500)).await;
    let mut a = SseStream::open(&server, "s").await;
    let mut b = SseStream::open(&server, "s").await;
    let mut other = SseStream::open(&server, "t").await;
    for n in ["x", "y", "z"] {
        post(&server, "/events", &selection("s", n)).await;
    }
    let mut seen_a = Vec::new();
    let mut seen_b = Vec::new();
    for _ in 0..3 {
        seen_a.push(a.next(WAIT).await.unwrap());
        seen_b.push(b.next(WAIT).await.unwrap());
    }
    let seqs: Vec<u64> = seen_a.iter().map(|e| e["seq"].as_u64().unwrap()).collect();
    assert_eq!(seqs, vec![1, 2, 3]);
    assert_eq!(seen_a, seen_b);
    assert!(other.next(QUIET).await.is_none());

    let (s, _) = post(&server, "/events", &json!({"session_scope": "s", "target": {"kind": "planet", "id": "x"}, "origin_view": "v"})).await;
    assert_eq!(s, 400);
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn shutdown_ends_event_streams() {
    let server = start(Workspace::in_memory(500)).await;
    let mut sub = SseStream::open(&server, "s").await;
    let done = tokio::time::timeout(Duration::from_secs(5), server.shutdown()).await;
    assert!(done.is_ok(), "graceful shutdown hung on an open stream");
    assert!(sub.next(Duration::from_secs(1)).await.is_none());
}
