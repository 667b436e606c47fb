//! HTTP service over a single executor.
//!
//! | method | path                | body                                             |
//! |--------|---------------------|--------------------------------------------------|
//! | GET    | `/model`            |                                                  |
//! | GET    | `/sessions`         |                                                  |
//! | POST   | `/sessions`         | `{"useCase"}`                                    |
//! | DELETE | `/sessions/{id}`    |                                                  |
//! | POST   | `/invoke`           | `{"useCase","operation","args":[..],"sessionId"}` |
//! | GET    | `/state`            |                                                  |
//! | GET    | `/invariants`       |                                                  |
//! | POST   | `/checkpoint/save`  |                                                  |
//! | POST   | `/checkpoint/load`  | a checkpoint document                            |
//!
//! Errors are `{"error": text, "location"?: text}`.

mod engine;
pub mod views;

use std::future::Future;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value as JsonValue};

use reqexec_core::exec::{Executor, InvokeError, SessionId};
use reqexec_core::Value;

pub use engine::Engine;

pub const DEFAULT_PORT: u16 = 7468;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub error: String,
    pub location: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError { status, error: error.into(), location: None }
    }

    fn at(mut self, location: impl Into<String>) -> Self {
        self.location = Some(location.into());
        self
    }

    fn no_model() -> Self {
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no model loaded")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.error });
        if let Some(l) = self.location {
            body["location"] = json!(l);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<InvokeError> for ApiError {
    fn from(e: InvokeError) -> Self {
        let msg = e.to_string();
        match e {
            InvokeError::UnknownSession(_) => ApiError::new(StatusCode::NOT_FOUND, msg).at("sessionId"),
            InvokeError::UnknownUseCase(_) => ApiError::new(StatusCode::NOT_FOUND, msg).at("useCase"),
            InvokeError::UnknownOperation { .. } => ApiError::new(StatusCode::NOT_FOUND, msg).at("operation"),
            InvokeError::ArityMismatch { .. } => ApiError::new(StatusCode::BAD_REQUEST, msg).at("args"),
            InvokeError::TypeMismatch { param, .. } => ApiError::new(StatusCode::BAD_REQUEST, msg).at(param),
        }
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed request body: {e}")))
}

/// Runs `f` against the loaded executor, or answers 503.
async fn with_model<R, F>(engine: &Engine, f: F) -> Result<R, ApiError>
where
    F: FnOnce(&mut Executor) -> Result<R, ApiError> + Send + 'static,
    R: Send + 'static,
{
    engine.run(move |ex| ex.as_mut().map_or_else(|| Err(ApiError::no_model()), f)).await
}

pub fn router(engine: Engine) -> Router {
    Router::new()
        .route("/model", get(get_model))
        .route("/sessions", get(list_sessions).post(open_session))
        .route("/sessions/{id}", delete(close_session))
        .route("/invoke", post(invoke))
        .route("/state", get(get_state))
        .route("/invariants", get(get_invariants))
        .route("/checkpoint/save", post(save_checkpoint))
        .route("/checkpoint/load", post(load_checkpoint))
        .with_state(engine)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    engine: Engine,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(engine)).with_graceful_shutdown(shutdown).await
}

async fn get_model(State(engine): State<Engine>) -> ApiResult {
    let body = with_model(&engine, |ex| Ok(views::model_summary(ex))).await?;
    Ok(Json(body).into_response())
}

async fn list_sessions(State(engine): State<Engine>) -> ApiResult {
    let body = with_model(&engine, |ex| {
        let list: Vec<JsonValue> =
            ex.sessions().map(|(id, s)| json!({ "sessionId": id.0, "useCase": s.use_case })).collect();
        Ok(json!(list))
    })
    .await?;
    Ok(Json(body).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct OpenSession {
    use_case: String,
}

async fn open_session(State(engine): State<Engine>, body: Bytes) -> ApiResult {
    let req: OpenSession = parse(&body)?;
    let body = with_model(&engine, move |ex| {
        let id = ex.open_session(&req.use_case)?;
        Ok(json!({ "sessionId": id.0, "useCase": req.use_case }))
    })
    .await?;
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn close_session(State(engine): State<Engine>, Path(id): Path<u64>) -> ApiResult {
    with_model(&engine, move |ex| {
        if ex.close_session(SessionId(id)) {
            Ok(())
        } else {
            Err(ApiError::from(InvokeError::UnknownSession(id)))
        }
    })
    .await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct InvokeRequest {
    use_case: String,
    operation: String,
    #[serde(default)]
    args: Vec<JsonValue>,
    session_id: u64,
}

async fn invoke(State(engine): State<Engine>, body: Bytes) -> ApiResult {
    let req: InvokeRequest = parse(&body)?;
    let args = req
        .args
        .iter()
        .enumerate()
        .map(|(i, a)| Value::from_json(a).map_err(|m| ApiError::new(StatusCode::BAD_REQUEST, m).at(format!("args[{i}]"))))
        .collect::<Result<Vec<_>, _>>()?;
    let body = with_model(&engine, move |ex| {
        let sid = SessionId(req.session_id);
        let session = ex.session(sid).ok_or(InvokeError::UnknownSession(req.session_id))?;
        if ex.model().model().use_case(&req.use_case).is_none() {
            return Err(InvokeError::UnknownUseCase(req.use_case).into());
        }
        if session.use_case != req.use_case {
            let msg = format!("session {} belongs to use case `{}`", req.session_id, session.use_case);
            return Err(ApiError::new(StatusCode::BAD_REQUEST, msg).at("useCase"));
        }
        let out = ex.invoke(sid, &req.operation, args)?;
        let current = if out.is_ok() { Default::default() } else { ex.check_invariants() };
        Ok(views::outcome(&out, &current))
    })
    .await?;
    Ok(Json(body).into_response())
}

async fn get_state(State(engine): State<Engine>) -> ApiResult {
    let body = with_model(&engine, |ex| Ok(views::state_view(ex))).await?;
    Ok(Json(body).into_response())
}

async fn get_invariants(State(engine): State<Engine>) -> ApiResult {
    let body = with_model(&engine, |ex| Ok(views::invariant_report(&ex.check_invariants()))).await?;
    Ok(Json(body).into_response())
}

async fn save_checkpoint(State(engine): State<Engine>) -> ApiResult {
    let doc = with_model(&engine, |ex| Ok(ex.save_checkpoint())).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], doc).into_response())
}

async fn load_checkpoint(State(engine): State<Engine>, body: Bytes) -> ApiResult {
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "checkpoint is not UTF-8"))?;
    with_model(&engine, move |ex| {
        ex.load_checkpoint(&text).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))
    })
    .await?;
    Ok(Json(json!({ "loaded": true })).into_response())
}
