use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::wire::{self, ChatBody, ChatReply, GenerateBody, GenerateReply, HealthReply, NerBody, NerReply};
use super::{BackendConfig, BackendError, BackendKind, ChatRequest, GenerationRequest, ModelBackend, WireSpan};

/// Outcome of one attempt.
enum Failure {
    /// Worth retrying.
    Transient { timeout: bool, message: String },
    Fatal(BackendError),
}

/// Client for the backend HTTP contract, with retry and exponential backoff on
/// transport failures.
pub struct HttpBackend {
    cfg: BackendConfig,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(cfg: BackendConfig) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(cfg.timeout)))
            .http_status_as_error(false)
            .build();
        Self {
            agent: ureq::Agent::new_with_config(config),
            cfg,
        }
    }

    pub fn config(&self) -> &BackendConfig {
        &self.cfg
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.cfg.endpoint.trim_end_matches('/'), path)
    }

    fn require(&self, kind: BackendKind, operation: &'static str) -> Result<(), BackendError> {
        if self.cfg.kind == kind {
            Ok(())
        } else {
            Err(BackendError::Unsupported {
                kind: self.cfg.kind,
                operation,
            })
        }
    }

    fn attempt<T: DeserializeOwned>(&self, url: &str, body: Option<&impl Serialize>) -> Result<T, Failure> {
        let sent = match body {
            Some(b) => self.agent.post(url).send_json(b),
            None => self.agent.get(url).call(),
        };
        let mut resp = sent.map_err(classify)?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(classify)?;
        if status == 429 || (500..600).contains(&status) {
            return Err(Failure::Transient {
                timeout: false,
                message: format!("HTTP {status}"),
            });
        }
        if !(200..300).contains(&status) {
            return Err(Failure::Fatal(BackendError::Protocol(format!("HTTP {status}: {text}"))));
        }
        serde_json::from_str(&text)
            .map_err(|e| Failure::Fatal(BackendError::Protocol(format!("malformed response body from {url}: {e}"))))
    }

    fn call<T: DeserializeOwned>(&self, path: &str, body: Option<&impl Serialize>) -> Result<T, BackendError> {
        let url = self.url(path);
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&url, body) {
                Ok(v) => return Ok(v),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Transient { timeout, message }) => {
                    if attempts > self.cfg.max_retries {
                        return Err(if timeout {
                            BackendError::Timeout {
                                endpoint: url,
                                attempts,
                            }
                        } else {
                            BackendError::Transport {
                                endpoint: url,
                                attempts,
                                message,
                            }
                        });
                    }
                    let backoff = self.cfg.retry_backoff_ms.saturating_mul(1 << (attempts - 1).min(16));
                    thread::sleep(Duration::from_millis(backoff));
                }
            }
        }
    }
}

fn classify(e: ureq::Error) -> Failure {
    use ureq::Error as E;
    match e {
        E::Timeout(_) => Failure::Transient {
            timeout: true,
            message: e.to_string(),
        },
        E::Io(ref io) if io.kind() == std::io::ErrorKind::TimedOut => Failure::Transient {
            timeout: true,
            message: e.to_string(),
        },
        E::Io(_) | E::ConnectionFailed | E::HostNotFound | E::Protocol(_) | E::BodyStalled => Failure::Transient {
            timeout: false,
            message: e.to_string(),
        },
        E::BadUri(_) | E::Http(_) => Failure::Fatal(BackendError::Config(e.to_string())),
        other => Failure::Fatal(BackendError::Protocol(other.to_string())),
    }
}

impl ModelBackend for HttpBackend {
    fn generate(&self, req: &GenerationRequest) -> Result<String, BackendError> {
        self.require(BackendKind::Seq2seq, "generate")?;
        let body = GenerateBody {
            task: req.task,
            input: req.input.clone(),
            max_new_tokens: self.cfg.max_new_tokens,
        };
        let reply: GenerateReply = self.call(wire::GENERATE_PATH, Some(&body))?;
        Ok(reply.output)
    }

    fn chat(&self, req: &ChatRequest) -> Result<String, BackendError> {
        self.require(BackendKind::Chat, "chat")?;
        let body = ChatBody {
            prompt: req.prompt.clone(),
            temperature: self.cfg.temperature,
            max_new_tokens: self.cfg.max_new_tokens,
        };
        let reply: ChatReply = self.call(wire::CHAT_PATH, Some(&body))?;
        Ok(reply.text)
    }

    fn recognize(&self, text: &str) -> Result<Vec<WireSpan>, BackendError> {
        self.require(BackendKind::NerService, "detect_mentions")?;
        let body = NerBody { text: text.to_owned() };
        let reply: NerReply = self.call(wire::NER_PATH, Some(&body))?;
        Ok(reply.spans)
    }

    fn health(&self) -> Result<(), BackendError> {
        let reply: HealthReply = self.call(wire::HEALTH_PATH, None::<&()>)?;
        if reply.status == "ok" {
            Ok(())
        } else {
            Err(BackendError::Protocol(format!("health status {:?}", reply.status)))
        }
    }
}
