//! The annotation web service.
//!
//! `POST /annotate` takes `{"text": ..., "mode": ...}` (mode optional) and
//! answers `{"annotations": [...], "diagnostics": [...]}`. `GET /health`
//! answers `{"status":"ok"}`. Requests run on the blocking pool and share the
//! dictionary and backend clients read-only.

use std::future::Future;
use std::io::Write;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use linkforge::pipeline::{AnnotationRecord, PipelineError};
use linkforge::{Document, Mode, Pipeline};
use serde::{Deserialize, Serialize};

use crate::args::ServeArgs;
use crate::{load_pipeline, CliError};

/// Id given to every request document.
const REQUEST_DOC_ID: &str = "request";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotateBody {
    text: String,
    #[serde(default)]
    mode: Option<String>,
}

#[derive(Serialize)]
struct AnnotateReply {
    annotations: Vec<AnnotationRecord>,
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct ErrorReply {
    error: String,
    diagnostics: Vec<String>,
}

fn json(status: StatusCode, body: &impl Serialize) -> Response {
    let bytes = serde_json::to_vec(body).expect("serializable");
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    let error = msg.into();
    json(
        status,
        &ErrorReply {
            diagnostics: vec![error.clone()],
            error,
        },
    )
}

fn status_for(e: &PipelineError) -> StatusCode {
    match e {
        PipelineError::BackendUnavailable { .. } => StatusCode::SERVICE_UNAVAILABLE,
        PipelineError::Backend { .. } => StatusCode::BAD_GATEWAY,
        PipelineError::Codec(_) | PipelineError::Text(_) => StatusCode::BAD_REQUEST,
        PipelineError::Config(_) | PipelineError::Dictionary(_) => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

async fn annotate(State(pipeline): State<Pipeline>, body: Bytes) -> Response {
    let req: AnnotateBody = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed body: {e}")),
    };
    let pipeline = match req.mode.as_deref() {
        None => pipeline,
        Some(m) => match m.parse::<Mode>().and_then(|m| pipeline.with_mode(m)) {
            Ok(p) => p,
            Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
        },
    };
    let doc = match Document::new(REQUEST_DOC_ID, req.text) {
        Ok(d) => d,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    match tokio::task::spawn_blocking(move || pipeline.run(&doc)).await {
        Ok(Ok(linked)) => json(
            StatusCode::OK,
            &AnnotateReply {
                annotations: linked.records(),
                diagnostics: linked.diagnostics,
            },
        ),
        Ok(Err(e)) => error(status_for(&e), e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("annotation task failed: {e}")),
    }
}

async fn health() -> Response {
    json(StatusCode::OK, &serde_json::json!({"status": "ok"}))
}

/// Routes for a configured pipeline.
pub fn router(pipeline: Pipeline) -> Router {
    Router::new()
        .route("/annotate", post(annotate))
        .route("/health", get(health))
        .with_state(pipeline)
}

/// Serve `router` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    router: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router).with_graceful_shutdown(shutdown).await
}

/// `serve` subcommand: run until interrupted.
pub fn run(args: &ServeArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (_, pipeline) = load_pipeline(&args.config.config, None)?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io("starting runtime", e))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.listen)
            .await
            .map_err(|e| CliError::Config(format!("cannot listen on {}: {e}", args.listen)))?;
        let addr = listener.local_addr().map_err(|e| CliError::io("listener", e))?;
        let _ = writeln!(stderr, "listening on http://{addr}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        serve(listener, router(pipeline), shutdown)
            .await
            .map_err(|e| CliError::io("service", e))
    })
}
