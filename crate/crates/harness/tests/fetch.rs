use std::io::{Read, Write};
use std::net::TcpListener;
use std::thread;

use medstack_harness::fetch::{fetch_datasets, source, Origin};
use medstack_harness::HarnessError;

/// Serves `body` with status 200 to up to `requests` connections.
fn serve(body: Vec<u8>, requests: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming().take(requests) {
            let mut s = stream.unwrap();
            let mut buf = [0u8; 4096];
            let _ = s.read(&mut buf);
            let head = format!("HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n", body.len());
            s.write_all(head.as_bytes()).unwrap();
            s.write_all(&body).unwrap();
        }
    });
    format!("http://{addr}")
}

fn names(n: &[&str]) -> Vec<String> {
    n.iter().map(|s| s.to_string()).collect()
}

#[test]
fn downloads_from_mirror_then_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let mirror = serve(source("statlog-heart").unwrap().bundled.to_vec(), 1);
    let got = fetch_datasets(&names(&["statlog-heart"]), dir.path(), Some(&mirror)).unwrap();
    assert_eq!(got[0].origin, Origin::Mirror);
    assert_eq!(std::fs::read(&got[0].path).unwrap(), source("statlog-heart").unwrap().bundled);
    let again = fetch_datasets(&names(&["statlog-heart"]), dir.path(), Some(&mirror)).unwrap();
    assert_eq!(again[0].origin, Origin::Cache);
}

#[test]
fn wrong_bytes_from_mirror_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mirror = serve(b"not,the,file\n".to_vec(), 1);
    let err = fetch_datasets(&names(&["pima"]), dir.path(), Some(&mirror)).unwrap_err();
    assert!(matches!(err, HarnessError::Checksum { .. }), "{err}");
    assert!(!dir.path().join("pima.csv").exists());
}

#[test]
fn corrupted_cache_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    fetch_datasets(&names(&["wdbc"]), dir.path(), None).unwrap();
    let path = dir.path().join("wdbc.csv");
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[10] ^= 1;
    std::fs::write(&path, bytes).unwrap();
    let err = fetch_datasets(&names(&["wdbc"]), dir.path(), None).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, HarnessError::Checksum { .. }));
    assert!(msg.contains(source("wdbc").unwrap().sha256), "{msg}");
}

#[test]
fn unreachable_mirror_explains_manual_placement() {
    let dir = tempfile::tempdir().unwrap();
    // Bind and drop to get a port with nothing listening.
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = fetch_datasets(&names(&["pima"]), dir.path(), Some(&format!("http://127.0.0.1:{port}"))).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, HarnessError::Network { .. }), "{msg}");
    assert!(msg.contains("pima.csv") && msg.contains(source("pima").unwrap().sha256), "{msg}");
}

#[test]
fn bundled_copy_fills_an_empty_cache() {
    let dir = tempfile::tempdir().unwrap();
    let got = fetch_datasets(&names(&["pima", "wdbc", "statlog-heart"]), dir.path(), None).unwrap();
    assert!(got.iter().all(|f| f.origin == Origin::Bundled));
    assert!(fetch_datasets(&names(&["mnist"]), dir.path(), None).is_err());
}
