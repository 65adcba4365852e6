//! Minimal canned-response HTTP/1.1 server for exercising endpoint
//! clients without the network.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

#[derive(Debug, Clone)]
pub struct StubResponse {
    pub status: u16,
    pub body: String,
    pub delay: Duration,
}

impl StubResponse {
    pub fn ok(body: impl Into<String>) -> StubResponse {
        StubResponse {
            status: 200,
            body: body.into(),
            delay: Duration::ZERO,
        }
    }

    pub fn json_completion(text: &str) -> StubResponse {
        StubResponse::ok(serde_json::json!({ "completion": text }).to_string())
    }

    pub fn status(status: u16, body: impl Into<String>) -> StubResponse {
        StubResponse {
            status,
            body: body.into(),
            delay: Duration::ZERO,
        }
    }

    pub fn delayed(mut self, delay: Duration) -> StubResponse {
        self.delay = delay;
        self
    }
}

pub struct StubServer {
    pub url: String,
    hits: Arc<AtomicUsize>,
    requests: Arc<Mutex<Vec<String>>>,
    shutdown: Arc<AtomicUsize>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Serve `responses` in order, repeating the last one once the script
    /// is exhausted.
    pub fn spawn(responses: Vec<StubResponse>) -> StubServer {
        assert!(!responses.is_empty());
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let url = format!("http://{}/complete", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let requests = Arc::new(Mutex::new(Vec::new()));
        let shutdown = Arc::new(AtomicUsize::new(0));

        let thread_hits = hits.clone();
        let thread_requests = requests.clone();
        let thread_shutdown = shutdown.clone();
        listener.set_nonblocking(true).unwrap();
        let handle = std::thread::spawn(move || {
            while thread_shutdown.load(Ordering::SeqCst) == 0 {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let n = thread_hits.fetch_add(1, Ordering::SeqCst);
                        let response = responses.get(n).unwrap_or_else(|| responses.last().unwrap());
                        serve_one(stream, response, &thread_requests);
                    }
                    Err(ref e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                        std::thread::sleep(Duration::from_millis(5));
                    }
                    Err(_) => break,
                }
            }
        });

        StubServer {
            url,
            hits,
            requests,
            shutdown,
            handle: Some(handle),
        }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    /// Request bodies received so far.
    pub fn request_bodies(&self) -> Vec<String> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(1, Ordering::SeqCst);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn serve_one(stream: TcpStream, response: &StubResponse, requests: &Arc<Mutex<Vec<String>>>) {
    stream.set_nonblocking(false).ok();
    stream
        .set_read_timeout(Some(Duration::from_secs(5)))
        .ok();
    let mut reader = BufReader::new(stream);

    let mut content_length = 0usize;
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line).is_err() || line.trim().is_empty() {
            break;
        }
        if let Some(value) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            content_length = value.trim().parse().unwrap_or(0);
        }
    }
    let mut body = vec![0u8; content_length];
    if content_length > 0 && reader.read_exact(&mut body).is_err() {
        return;
    }
    requests
        .lock()
        .unwrap()
        .push(String::from_utf8_lossy(&body).into_owned());

    if !response.delay.is_zero() {
        std::thread::sleep(response.delay);
    }

    let mut stream = reader.into_inner();
    let reason = match response.status {
        200 => "OK",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        _ => "Status",
    };
    let payload = format!(
        "HTTP/1.1 {} {}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
        response.status,
        reason,
        response.body.len(),
        response.body
    );
    let _ = stream.write_all(payload.as_bytes());
}
