//! Async HTTP client for the minisim service.

use minisim_core::api::{ErrorBody, RunCreated, RunRequest};
use minisim_core::document::{parse_document, ResultDocument, SimulationDocument};
use minisim_core::FuzzConfig;
use reqwest::{Response, StatusCode};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    /// The service answered with an error payload.
    #[error("server returned {status}: {body}")]
    Api { status: StatusCode, body: ErrorBody },
    #[error("malformed response: {0}")]
    Decode(#[from] serde_json::Error),
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            base: base.into().trim_end_matches('/').to_owned(),
            http: reqwest::Client::new(),
        }
    }

    pub async fn health(&self) -> Result<String, ClientError> {
        let resp = self.http.get(self.url("/healthz")).send().await?;
        Ok(checked(resp).await?.text().await?)
    }

    /// Submits a fuzzing run and returns its run id once it has finished.
    pub async fn submit_run(
        &self,
        source: &str,
        config: &FuzzConfig,
    ) -> Result<String, ClientError> {
        let req = RunRequest {
            source: source.to_owned(),
            config: config.clone(),
        };
        let resp = self
            .http
            .post(self.url("/api/runs"))
            .json(&req)
            .send()
            .await?;
        let created: RunCreated = serde_json::from_slice(&checked(resp).await?.bytes().await?)?;
        Ok(created.run_id)
    }

    /// The result document exactly as the server stores it.
    pub async fn get_run_bytes(&self, run_id: &str) -> Result<Vec<u8>, ClientError> {
        let resp = self
            .http
            .get(self.url(&format!("/api/runs/{run_id}")))
            .send()
            .await?;
        Ok(checked(resp).await?.bytes().await?.to_vec())
    }

    pub async fn get_run(&self, run_id: &str) -> Result<ResultDocument, ClientError> {
        Ok(parse_document(&self.get_run_bytes(run_id).await?)?)
    }

    pub async fn get_simulation(
        &self,
        run_id: &str,
        k: usize,
    ) -> Result<SimulationDocument, ClientError> {
        let url = self.url(&format!("/api/runs/{run_id}/simulations/{k}"));
        let resp = self.http.get(url).send().await?;
        Ok(serde_json::from_slice(
            &checked(resp).await?.bytes().await?,
        )?)
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

async fn checked(resp: Response) -> Result<Response, ClientError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp);
    }
    let text = resp.text().await?;
    let body = serde_json::from_str(&text).unwrap_or_else(|_| ErrorBody::new("http", text));
    Err(ClientError::Api { status, body })
}
