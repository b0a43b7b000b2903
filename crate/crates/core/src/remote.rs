//! HTTP adapter for real answering services.
//!
//! Wire protocol: POST the JSON document
//! `{"question": str, "upstream": [{"agent": str, "text": str}]}` to the
//! agent's endpoint; the service replies `{"answer": str}`. Upstream texts
//! are passed verbatim; how the service incorporates them is its business.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::action_space::AgentId;
use crate::agents::{AgentBackend, AgentResponse, InvocationCtx};
use crate::error::{BackendError, Error, Result};

#[derive(Debug, Serialize, Deserialize)]
pub struct RemoteRequest {
    pub question: String,
    pub upstream: Vec<RemoteUpstream>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RemoteUpstream {
    pub agent: String,
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RemoteAnswer {
    pub answer: String,
}

/// Backend that forwards each invocation to a per-agent HTTP endpoint.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    endpoints: BTreeMap<String, String>,
    timeout_s: f64,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(endpoints: BTreeMap<String, String>, timeout_s: f64) -> Result<Self> {
        if endpoints.is_empty() {
            return Err(Error::Config("remote backend needs at least one endpoint".into()));
        }
        if !(timeout_s > 0.0) || !timeout_s.is_finite() {
            return Err(Error::Config(format!(
                "timeout_s must be finite and > 0, got {timeout_s}"
            )));
        }
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(timeout_s)))
            .build();
        Ok(Self {
            endpoints,
            timeout_s,
            agent: config.into(),
        })
    }

    pub fn timeout_s(&self) -> f64 {
        self.timeout_s
    }

    /// Send one question to a service and measure wall-clock latency.
    pub fn remote_answer(
        &self,
        endpoint: &str,
        question: &str,
        upstream: &[(AgentId, String)],
    ) -> Result<AgentResponse, BackendError> {
        let request = RemoteRequest {
            question: question.to_string(),
            upstream: upstream
                .iter()
                .map(|(agent, text)| RemoteUpstream {
                    agent: agent.name.clone(),
                    text: text.clone(),
                })
                .collect(),
        };
        let started = Instant::now();
        let outcome = self
            .agent
            .post(endpoint)
            .send_json(&request)
            .and_then(|mut resp| resp.body_mut().read_json::<RemoteAnswer>());
        let elapsed_s = started.elapsed().as_secs_f64();
        match outcome {
            Ok(parsed) => Ok(AgentResponse {
                text: parsed.answer,
                latency_s: elapsed_s,
                upstream_inputs: upstream.to_vec(),
            }),
            Err(ureq::Error::Timeout(_)) => Err(BackendError::Timeout { elapsed_s }),
            Err(ureq::Error::StatusCode(code)) => Err(BackendError::Protocol {
                message: format!("http status {code}"),
                elapsed_s,
            }),
            Err(ureq::Error::Json(e)) => Err(BackendError::Protocol {
                message: format!("malformed response: {e}"),
                elapsed_s,
            }),
            Err(e) => Err(BackendError::Transport {
                message: e.to_string(),
                elapsed_s,
            }),
        }
    }
}

impl AgentBackend for RemoteBackend {
    fn answer(
        &self,
        agent: &AgentId,
        ctx: &InvocationCtx<'_>,
        upstream: &[(AgentId, String)],
    ) -> Result<AgentResponse, BackendError> {
        let endpoint = self
            .endpoints
            .get(&agent.name)
            .ok_or_else(|| BackendError::NotConfigured(format!("no endpoint for {}", agent.name)))?;
        self.remote_answer(endpoint, ctx.question, upstream)
    }
}
