//! A minimal in-process chat-completion endpoint for tests and examples.
//!
//! Binds an ephemeral local port, answers the same JSON shape the
//! [`crate::refine`] client expects, and instruments itself: total request
//! count and peak concurrent requests, which is how the bounded-parallelism
//! contract of [`crate::evalrun`] gets observed.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

/// A parsed incoming request.
#[derive(Debug, Clone)]
pub struct MockRequest {
    pub path: String,
    pub body: serde_json::Value,
}

impl MockRequest {
    /// The user-message content of a chat-completion body, if present.
    pub fn prompt(&self) -> Option<&str> {
        self.body
            .pointer("/messages/0/content")
            .and_then(|v| v.as_str())
    }
}

/// What the behavior closure wants sent back.
#[derive(Debug, Clone)]
pub struct MockResponse {
    pub status: u16,
    pub body: String,
}

impl MockResponse {
    /// A 200 chat-completion response carrying `content`.
    pub fn content(content: &str) -> Self {
        MockResponse {
            status: 200,
            body: serde_json::json!({
                "choices": [{"message": {"role": "assistant", "content": content}}]
            })
            .to_string(),
        }
    }

    /// A bare status with an empty JSON object body.
    pub fn status(status: u16) -> Self {
        MockResponse {
            status,
            body: "{}".to_string(),
        }
    }

    /// A 200 response whose body is arbitrary JSON text (for testing
    /// malformed-response handling).
    pub fn raw(body: &str) -> Self {
        MockResponse {
            status: 200,
            body: body.to_string(),
        }
    }
}

type Behavior = dyn Fn(&MockRequest) -> MockResponse + Send + Sync;

/// Handle to a running mock endpoint. Dropping it stops the server.
pub struct MockEndpoint {
    addr: String,
    calls: Arc<AtomicUsize>,
    peak: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
}

impl MockEndpoint {
    /// Start a server whose every request is answered by `behavior`.
    pub fn spawn<F>(behavior: F) -> Self
    where
        F: Fn(&MockRequest) -> MockResponse + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind an ephemeral port");
        let addr = listener.local_addr().expect("local addr").to_string();
        let calls = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let inflight = Arc::new(AtomicUsize::new(0));
        let stop = Arc::new(AtomicBool::new(false));
        let behavior: Arc<Behavior> = Arc::new(behavior);

        let accept_thread = {
            let calls = Arc::clone(&calls);
            let peak = Arc::clone(&peak);
            let stop = Arc::clone(&stop);
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let calls = Arc::clone(&calls);
                    let peak = Arc::clone(&peak);
                    let inflight = Arc::clone(&inflight);
                    let behavior = Arc::clone(&behavior);
                    std::thread::spawn(move || {
                        handle_connection(stream, &calls, &peak, &inflight, &behavior);
                    });
                }
            })
        };

        MockEndpoint {
            addr,
            calls,
            peak,
            stop,
            accept_thread: Some(accept_thread),
        }
    }

    /// An endpoint that echoes each request's prompt back as the
    /// completion content.
    pub fn echo() -> Self {
        Self::spawn(|req| MockResponse::content(req.prompt().unwrap_or("")))
    }

    /// Base URL of the running server.
    pub fn url(&self) -> String {
        format!("http://{}/v1/chat/completions", self.addr)
    }

    /// Requests served so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    /// Highest number of requests that were in flight at the same time.
    pub fn peak_concurrency(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }
}

impl Drop for MockEndpoint {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop so it observes the stop flag.
        let _ = TcpStream::connect(&self.addr);
        if let Some(handle) = self.accept_thread.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(
    mut stream: TcpStream,
    calls: &AtomicUsize,
    peak: &AtomicUsize,
    inflight: &AtomicUsize,
    behavior: &Arc<Behavior>,
) {
    let Some(request) = read_request(&mut stream) else {
        return;
    };
    calls.fetch_add(1, Ordering::SeqCst);
    let now = inflight.fetch_add(1, Ordering::SeqCst) + 1;
    peak.fetch_max(now, Ordering::SeqCst);

    let response = behavior(&request);

    inflight.fetch_sub(1, Ordering::SeqCst);
    let reason = match response.status {
        200 => "OK",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        _ => "Status",
    };
    let payload = format!(
        "HTTP/1.1 {} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        response.status,
        reason,
        response.body.len(),
        response.body
    );
    let _ = stream.write_all(payload.as_bytes());
    let _ = stream.flush();
}

fn read_request(stream: &mut TcpStream) -> Option<MockRequest> {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let header_end;
    loop {
        let n = stream.read(&mut chunk).ok()?;
        if n == 0 {
            return None;
        }
        buf.extend_from_slice(&chunk[..n]);
        if let Some(pos) = find_header_end(&buf) {
            header_end = pos;
            break;
        }
        if buf.len() > 1 << 20 {
            return None;
        }
    }
    let header_text = String::from_utf8_lossy(&buf[..header_end]).to_string();
    let mut lines = header_text.lines();
    let request_line = lines.next()?;
    let path = request_line.split_whitespace().nth(1)?.to_string();
    let content_length = lines
        .filter_map(|l| l.split_once(':'))
        .find(|(k, _)| k.eq_ignore_ascii_case("content-length"))
        .and_then(|(_, v)| v.trim().parse::<usize>().ok())
        .unwrap_or(0);

    let mut body = buf[header_end + 4..].to_vec();
    while body.len() < content_length {
        let n = stream.read(&mut chunk).ok()?;
        if n == 0 {
            break;
        }
        body.extend_from_slice(&chunk[..n]);
    }
    let body_value = serde_json::from_slice(&body[..content_length.min(body.len())])
        .unwrap_or(serde_json::Value::Null);
    Some(MockRequest {
        path,
        body: body_value,
    })
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n")
}
