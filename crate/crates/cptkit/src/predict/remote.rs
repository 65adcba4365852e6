//! Blocking client for a remote completion endpoint.
//!
//! Wire shape: HTTP POST of `{model, prompt, temperature, max_tokens}`
//! (plus `images` for the multimodal judge), JSON response with a
//! `completion` text field. Transient failures are retried with
//! exponential backoff; credentials never reach the logs.

use std::time::Duration;

use serde_json::{json, Value};

use crate::error::EndpointError;

/// Connection settings for one endpoint.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    /// Retries after the first attempt.
    pub retries: u32,
    /// First backoff delay; doubles per retry.
    pub backoff_base: Duration,
    pub max_tokens: u32,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> EndpointConfig {
        EndpointConfig {
            url: url.into(),
            api_key: None,
            model: "default".into(),
            timeout: Duration::from_secs(30),
            retries: 3,
            backoff_base: Duration::from_secs(1),
            max_tokens: 2048,
        }
    }

    /// Completion endpoint from `CPTKIT_ENDPOINT` / `CPTKIT_API_KEY`.
    pub fn from_env() -> Result<EndpointConfig, EndpointError> {
        Self::from_env_vars("CPTKIT_ENDPOINT", "CPTKIT_API_KEY")
    }

    /// Judge endpoint from `CPTKIT_JUDGE_ENDPOINT` / `CPTKIT_JUDGE_API_KEY`.
    pub fn judge_from_env() -> Result<EndpointConfig, EndpointError> {
        Self::from_env_vars("CPTKIT_JUDGE_ENDPOINT", "CPTKIT_JUDGE_API_KEY")
    }

    fn from_env_vars(url_var: &str, key_var: &str) -> Result<EndpointConfig, EndpointError> {
        let url = std::env::var(url_var).map_err(|_| EndpointError::MissingConfig {
            var: url_var.to_string(),
        })?;
        let mut cfg = EndpointConfig::new(url);
        cfg.api_key = std::env::var(key_var).ok();
        // Optional shared tuning knobs.
        if let Some(v) = env_u64("CPTKIT_RETRIES") {
            cfg.retries = v as u32;
        }
        if let Some(v) = env_u64("CPTKIT_BACKOFF_MS") {
            cfg.backoff_base = Duration::from_millis(v);
        }
        if let Some(v) = env_u64("CPTKIT_TIMEOUT_MS") {
            cfg.timeout = Duration::from_millis(v);
        }
        if let Ok(v) = std::env::var("CPTKIT_MODEL") {
            cfg.model = v;
        }
        Ok(cfg)
    }

    fn masked_key(&self) -> String {
        match &self.api_key {
            None => "<none>".to_string(),
            Some(k) if k.len() <= 4 => "****".to_string(),
            Some(k) => format!("{}****", &k[..4]),
        }
    }
}

fn env_u64(var: &str) -> Option<u64> {
    std::env::var(var).ok()?.parse().ok()
}

/// The instruction wrapper placed around masked markup before it is sent
/// to the completion endpoint.
pub fn build_prompt(masked_cml: &str) -> String {
    format!(
        "Fill in the masked attribute values in the design markup below. \
         Respond with one line per mask token, in the form `TOKEN: value`, \
         and nothing else.\n\n{masked_cml}\n### OUTPUT:\n"
    )
}

/// Request a completion for `prompt`, retrying transient failures.
pub fn remote_complete(
    prompt: &str,
    temperature: f64,
    cfg: &EndpointConfig,
) -> Result<String, EndpointError> {
    let body = json!({
        "model": cfg.model,
        "prompt": prompt,
        "temperature": temperature,
        "max_tokens": cfg.max_tokens,
    });
    let response = post_json(cfg, &body)?;
    completion_text(&response)
}

/// Extract the completion text field from a response body.
pub(crate) fn completion_text(response: &Value) -> Result<String, EndpointError> {
    response
        .get("completion")
        .or_else(|| response.get("text"))
        .and_then(Value::as_str)
        .map(|s| s.to_string())
        .ok_or_else(|| EndpointError::Malformed {
            detail: "response has no completion text field".into(),
        })
}

/// POST a JSON body with auth, timeout and retry policy applied.
pub(crate) fn post_json(cfg: &EndpointConfig, body: &Value) -> Result<Value, EndpointError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(cfg.timeout)
        .build()
        .map_err(|e| EndpointError::Transport { detail: e.to_string() })?;

    let attempts = cfg.retries + 1;
    let mut last_err = EndpointError::Transport {
        detail: "no attempt made".into(),
    };
    for attempt in 0..attempts {
        if attempt > 0 {
            let delay = cfg.backoff_base * 2u32.pow(attempt - 1);
            log::warn!(
                "endpoint attempt {attempt}/{attempts} failed ({last_err}); retrying in {delay:?}"
            );
            std::thread::sleep(delay);
        }
        log::debug!(
            "POST {} model={} key={}",
            cfg.url,
            cfg.model,
            cfg.masked_key()
        );
        let mut request = client.post(&cfg.url).json(body);
        if let Some(key) = &cfg.api_key {
            request = request.bearer_auth(key);
        }
        match request.send() {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    return response.json::<Value>().map_err(|e| EndpointError::Malformed {
                        detail: format!("response is not JSON: {e}"),
                    });
                }
                let detail = response.text().unwrap_or_default();
                let detail = detail.chars().take(200).collect::<String>();
                let err = EndpointError::Http {
                    status: status.as_u16(),
                    detail,
                };
                // Client errors other than rate limiting will not improve
                // on retry.
                if status.as_u16() == 429 || status.is_server_error() {
                    last_err = err;
                } else {
                    return Err(err);
                }
            }
            Err(e) if e.is_timeout() => {
                last_err = EndpointError::Timeout {
                    detail: format!("{:?}", cfg.timeout),
                };
            }
            Err(e) => {
                last_err = EndpointError::Transport { detail: e.to_string() };
            }
        }
    }
    Err(last_err)
}
