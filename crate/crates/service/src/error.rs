use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

/// An error response: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.to_string(), message: message.into() }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "E-REQUEST", message)
    }

    pub fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "E-STATUS", message)
    }

    pub fn precondition_failed(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::PRECONDITION_FAILED, "E-REVISION", message)
    }

    pub fn io(err: std::io::Error) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "E-IO", format!("could not persist adoption: {err}"))
    }
}

impl From<vaspi::Error> for ApiError {
    fn from(err: vaspi::Error) -> Self {
        use vaspi::Error::*;
        let status = match &err {
            UnknownPractice(_) | UnknownBenefit(_) | UnknownTarget(_) | PathNotFound { .. } => StatusCode::NOT_FOUND,
            UnreachableTarget(_) => StatusCode::CONFLICT,
            InvalidConfig(_) | InvalidPath { .. } => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, err.code(), err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}
