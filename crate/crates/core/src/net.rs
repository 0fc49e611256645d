//! Blocking HTTP plumbing shared by the remote diacritizer and synthesizer
//! clients.

use std::io::Read;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use thiserror::Error;

/// Upper bound on a response body (a 10-minute 44.1 kHz mono WAV is ~53 MB).
const MAX_BODY: u64 = 64 << 20;

#[derive(Debug, Error)]
pub enum HttpError {
    #[error("request to {url} timed out after {after:?}")]
    Timeout { url: String, after: Duration },
    #[error("cannot reach {url}: {reason}")]
    Unreachable { url: String, reason: String },
    #[error("{url} answered HTTP {status}: {body}")]
    Status {
        url: String,
        status: u16,
        body: String,
    },
    #[error("reading response from {url}: {reason}")]
    Body { url: String, reason: String },
}

/// Counting semaphore bounding in-flight requests per endpoint.
#[derive(Debug)]
pub struct Limiter {
    max: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

pub struct Permit<'a>(&'a Limiter);

impl Limiter {
    pub fn new(max: usize) -> Self {
        Limiter {
            max: max.max(1),
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.max
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.max {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(self)
    }

    pub fn in_flight(&self) -> usize {
        *self.in_flight.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

pub(crate) fn agent(timeout: Duration) -> ureq::Agent {
    ureq::AgentBuilder::new().timeout(timeout).build()
}

fn is_timeout(t: &ureq::Transport) -> bool {
    let mut source = std::error::Error::source(t);
    while let Some(err) = source {
        if let Some(io) = err.downcast_ref::<std::io::Error>() {
            if matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            ) {
                return true;
            }
        }
        source = err.source();
    }
    t.to_string().contains("timed out")
}

/// POST a JSON body and return the raw response bytes.
pub(crate) fn post_json(
    agent: &ureq::Agent,
    url: &str,
    timeout: Duration,
    body: &serde_json::Value,
) -> Result<Vec<u8>, HttpError> {
    let response = match agent.post(url).send_json(body) {
        Ok(r) => r,
        Err(ureq::Error::Status(status, r)) => {
            let body = r.into_string().unwrap_or_default();
            return Err(HttpError::Status {
                url: url.to_string(),
                status,
                body: body.chars().take(200).collect(),
            });
        }
        Err(ureq::Error::Transport(t)) if is_timeout(&t) => {
            return Err(HttpError::Timeout {
                url: url.to_string(),
                after: timeout,
            })
        }
        Err(ureq::Error::Transport(t)) => {
            return Err(HttpError::Unreachable {
                url: url.to_string(),
                reason: t.to_string(),
            })
        }
    };
    let mut bytes = Vec::new();
    response
        .into_reader()
        .take(MAX_BODY)
        .read_to_end(&mut bytes)
        .map_err(|e| {
            if matches!(
                e.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            ) {
                HttpError::Timeout {
                    url: url.to_string(),
                    after: timeout,
                }
            } else {
                HttpError::Body {
                    url: url.to_string(),
                    reason: e.to_string(),
                }
            }
        })?;
    Ok(bytes)
}

/// Join a base URL and a route, accepting bases that already end in the route.
pub(crate) fn endpoint(base: &str, route: &str) -> String {
    let base = base.trim_end_matches('/');
    if base.ends_with(route) {
        base.to_string()
    } else {
        format!("{base}{route}")
    }
}
