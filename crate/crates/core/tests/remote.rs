use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use socnav_core::reasoner::{ReasoningBackend, RemoteBackend, RemoteConfig, TransportError};

/// Serves one request with `status` and `body` after `delay`; returns the
/// endpoint URL and a handle yielding the raw request body.
fn serve_once(
    status: u16,
    body: &'static str,
    delay: Duration,
) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!(
        "http://{}/v1/chat/completions",
        listener.local_addr().unwrap()
    );
    let handle = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut length = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
        }
        let mut request = vec![0; length];
        reader.read_exact(&mut request).unwrap();
        thread::sleep(delay);
        let mut stream = stream;
        let _ = write!(
            stream,
            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        String::from_utf8(request).unwrap()
    });
    (url, handle)
}

type Case = (u16, &'static str, fn(&TransportError) -> bool);

fn backend(url: &str, timeout: Duration) -> RemoteBackend {
    let mut cfg = RemoteConfig::new(url, "test-model");
    cfg.timeout = timeout;
    cfg.token_env = "SOCNAV_TEST_TOKEN_UNSET".into();
    RemoteBackend::new(cfg)
}

#[test]
fn reply_content_is_returned() {
    let (url, server) = serve_once(
        200,
        r#"{"choices":[{"message":{"role":"assistant","content":"```action\nvelocity = (1, 0)\nlevel = D1\n```"}}]}"#,
        Duration::ZERO,
    );
    let b = backend(&url, Duration::from_secs(5));
    let reply = b.complete("hello").unwrap();
    assert!(reply.starts_with("```action"));
    let sent: serde_json::Value = serde_json::from_str(&server.join().unwrap()).unwrap();
    assert_eq!(sent["model"], "test-model");
    assert_eq!(sent["messages"][0]["content"], "hello");
}

#[test]
fn failures_map_to_distinct_errors() {
    let cases: [Case; 4] = [
        (401, "{}", |e| matches!(e, TransportError::Auth(401))),
        (403, "{}", |e| matches!(e, TransportError::Auth(403))),
        (503, "{}", |e| matches!(e, TransportError::Status(503))),
        (200, r#"{"choices":[]}"#, |e| {
            matches!(e, TransportError::MalformedBody(_))
        }),
    ];
    for (status, body, expected) in cases {
        let (url, server) = serve_once(status, body, Duration::ZERO);
        let err = backend(&url, Duration::from_secs(5))
            .complete("x")
            .unwrap_err();
        assert!(expected(&err), "status {status}: {err:?}");
        server.join().unwrap();
    }
}

#[test]
fn slow_server_times_out() {
    let (url, _server) = serve_once(200, "{}", Duration::from_secs(3));
    let err = backend(&url, Duration::from_millis(300))
        .complete("x")
        .unwrap_err();
    assert!(matches!(err, TransportError::Timeout), "{err:?}");
}

#[test]
fn probe_checks_reachability() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", listener.local_addr().unwrap());
    backend(&url, Duration::from_secs(1)).probe().unwrap();
    drop(listener);
    assert!(backend(&url, Duration::from_secs(1)).probe().is_err());
}
