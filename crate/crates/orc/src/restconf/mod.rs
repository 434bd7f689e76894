//! RESTCONF front-end: URI and method dispatch over the datamap core,
//! plus the CGI entry point and a small HTTP/1.1 listener for testing.

mod cgi;
mod http;

pub use cgi::run_cgi;
pub use http::run_server;

use serde_json::{json, Map, Value};

use crate::datamap::{
    delete_targets, json_to_entries, locate, resolve_body_root, resolve_delete,
    uci_to_json, DatamapError, Located, Mode, ModelSet, ResolvedTarget, Segment,
};
use crate::uci::{ApplyMode, ReadValue, UciError, UciStore};
use crate::validate::{verify_tree, Rule, ValidationError};
use crate::yang::NodeKind;

pub const MEDIA_TYPE: &str = "application/yang-data+json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Options,
    Head,
    Get,
    Post,
    Put,
    Delete,
}

impl Method {
    pub fn from_name(name: &str) -> Option<Method> {
        match name {
            "OPTIONS" => Some(Method::Options),
            "HEAD" => Some(Method::Head),
            "GET" => Some(Method::Get),
            "POST" => Some(Method::Post),
            "PUT" => Some(Method::Put),
            "DELETE" => Some(Method::Delete),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub struct RestconfRequest {
    pub method: Method,
    pub segments: Vec<Segment>,
    pub body: Option<Vec<u8>>,
    pub content_type: Option<String>,
}

#[derive(Debug)]
pub struct RestconfResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Option<Vec<u8>>,
}

impl RestconfResponse {
    fn empty(status: u16) -> Self {
        RestconfResponse {
            status,
            headers: Vec::new(),
            body: None,
        }
    }

    fn json(status: u16, value: &Value) -> Self {
        let mut body = serde_json::to_vec_pretty(value).expect("serializable");
        body.push(b'\n');
        RestconfResponse {
            status,
            headers: vec![("Content-Type".into(), MEDIA_TYPE.into())],
            body: Some(body),
        }
    }

    fn error(status: u16, tag: &str, path: &str, message: &str) -> Self {
        Self::error_with(status, tag, path, message, &[])
    }

    fn error_with(
        status: u16,
        tag: &str,
        path: &str,
        message: &str,
        errors: &[ValidationError],
    ) -> Self {
        let list: Vec<Value> = errors
            .iter()
            .map(|e| {
                json!({
                    "json_path": e.json_path,
                    "rule": e.rule.tag(),
                    "detail": e.detail,
                })
            })
            .collect();
        Self::json(
            status,
            &json!({
                "error": {
                    "tag": tag,
                    "path": path,
                    "message": message,
                    "errors": list,
                }
            }),
        )
    }

    pub fn reason(&self) -> &'static str {
        reason_phrase(self.status)
    }
}

pub fn reason_phrase(status: u16) -> &'static str {
    match status {
        200 => "OK",
        201 => "Created",
        204 => "No Content",
        400 => "Bad Request",
        404 => "Not Found",
        405 => "Method Not Allowed",
        409 => "Conflict",
        415 => "Unsupported Media Type",
        500 => "Internal Server Error",
        _ => "Unknown",
    }
}

/// Parse a request URI path into data-root segments. Accepts the
/// /restconf/data prefix and the bare /data form. `name=key` selectors
/// are split before percent-decoding so keys may contain any character.
pub fn parse_data_path(path: &str) -> Result<Vec<Segment>, String> {
    let path = path.split('?').next().unwrap_or(path);
    let rest = path
        .strip_prefix("/restconf/data")
        .or_else(|| path.strip_prefix("/data"))
        .ok_or_else(|| format!("'{path}' is not under the data root"))?;
    let rest = rest.strip_prefix('/').unwrap_or(rest);
    let rest = rest.strip_suffix('/').unwrap_or(rest);
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    let mut segments = Vec::new();
    for raw in rest.split('/') {
        let (name, key) = match raw.split_once('=') {
            Some((n, k)) => (n, Some(k)),
            None => (raw, None),
        };
        let name = percent_decode(name).ok_or_else(|| format!("bad escape in '{raw}'"))?;
        if name.is_empty() {
            return Err(format!("empty segment in '{path}'"));
        }
        let key = match key {
            Some(k) => Some(percent_decode(k).ok_or_else(|| format!("bad escape in '{raw}'"))?),
            None => None,
        };
        segments.push(Segment { name, key });
    }
    Ok(segments)
}

fn percent_decode(s: &str) -> Option<String> {
    let mut out = Vec::with_capacity(s.len());
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

/// Dispatch one request against the loaded models and the store.
pub fn handle(models: &ModelSet, store: &UciStore, req: &RestconfRequest) -> RestconfResponse {
    let located = match locate(models, store, &req.segments) {
        Ok(l) => l,
        Err(e) => return datamap_error_response(&e, &uri_of(&req.segments)),
    };

    match req.method {
        Method::Options => options_response(&located),
        Method::Get | Method::Head => {
            let mut resp = get_response(models, store, &located, &req.segments);
            if req.method == Method::Head {
                resp.body = None;
            }
            resp
        }
        Method::Post => write_response(models, store, &located, req, false),
        Method::Put => match &located {
            Located::Root => method_not_allowed(&located),
            Located::Node(_) => write_response(models, store, &located, req, true),
        },
        Method::Delete => match &located {
            Located::Root => method_not_allowed(&located),
            Located::Node(target) => delete_response(store, target, &uri_of(&req.segments)),
        },
    }
}

fn uri_of(segments: &[Segment]) -> String {
    let mut out = String::from("/restconf/data");
    for s in segments {
        out.push('/');
        out.push_str(&s.name);
        if let Some(k) = &s.key {
            out.push('=');
            out.push_str(k);
        }
    }
    out
}

fn allow_for(located: &Located) -> &'static str {
    match located {
        Located::Root => "OPTIONS, GET, HEAD, POST",
        Located::Node(target) => match target.node.kind {
            NodeKind::Container => "OPTIONS, GET, HEAD, POST, PUT, DELETE",
            NodeKind::List if target.list_index.is_none() => {
                "OPTIONS, GET, HEAD, POST, PUT, DELETE"
            }
            _ => "OPTIONS, GET, HEAD, PUT, DELETE",
        },
    }
}

fn options_response(located: &Located) -> RestconfResponse {
    let mut resp = RestconfResponse::empty(200);
    resp.headers
        .push(("Allow".into(), allow_for(located).to_string()));
    resp
}

fn method_not_allowed(located: &Located) -> RestconfResponse {
    let mut resp = RestconfResponse::error(
        405,
        "method not allowed",
        &uri_of(&[]),
        "the method does not apply to this resource",
    );
    resp.headers
        .push(("Allow".into(), allow_for(located).to_string()));
    resp
}

fn get_response(
    models: &ModelSet,
    store: &UciStore,
    located: &Located,
    segments: &[Segment],
) -> RestconfResponse {
    match located {
        Located::Root => {
            // the union object over every top-level node of every module
            let mut union = Map::new();
            for module in models.modules() {
                for top in &module.body.children {
                    let fake = [Segment::plain(format!("{}:{}", module.name, top.name))];
                    match locate(models, store, &fake) {
                        Ok(Located::Node(target)) => match uci_to_json(&target, store) {
                            Ok(Some(v)) => {
                                union.insert(format!("{}:{}", module.name, top.name), v);
                            }
                            Ok(None) => {}
                            Err(e) => {
                                return datamap_error_response(&e, &uri_of(segments));
                            }
                        },
                        _ => continue,
                    }
                }
            }
            RestconfResponse::json(200, &Value::Object(union))
        }
        Located::Node(target) => {
            let value = match uci_to_json(target, store) {
                Ok(Some(v)) => v,
                Ok(None) => {
                    return RestconfResponse::error(
                        404,
                        "not found",
                        &uri_of(segments),
                        "the resource has no data",
                    )
                }
                Err(e) => return datamap_error_response(&e, &uri_of(segments)),
            };
            // a keyed list entry is returned as a one-element array
            let value = if target.node.kind == NodeKind::List && target.list_index.is_some() {
                Value::Array(vec![value])
            } else {
                value
            };
            let key = format!("{}:{}", target.module.name, target.node.name);
            RestconfResponse::json(200, &json!({ key: value }))
        }
    }
}

fn delete_response(
    store: &UciStore,
    target: &ResolvedTarget,
    uri: &str,
) -> RestconfResponse {
    let paths = match delete_targets(target) {
        Ok(p) => p,
        Err(e) => return datamap_error_response(&e, uri),
    };
    let removed = store.with_writer_lock(|lock| {
        let mut total = 0usize;
        for path in &paths {
            match store.delete_at(lock, path) {
                Ok(n) => total += n,
                Err(UciError::NotFound(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(total)
    });
    match removed {
        Ok(Ok(0)) => {
            RestconfResponse::error(404, "not found", uri, "nothing to delete at this resource")
        }
        Ok(Ok(_)) => RestconfResponse::empty(204),
        Ok(Err(e)) | Err(e) => uci_error_response(&e, uri),
    }
}

fn write_response(
    models: &ModelSet,
    store: &UciStore,
    located: &Located,
    req: &RestconfRequest,
    replace: bool,
) -> RestconfResponse {
    let uri = uri_of(&req.segments);
    if let Located::Node(target) = located {
        let allowed = match req.method {
            Method::Post => {
                matches!(target.node.kind, NodeKind::Container | NodeKind::List)
                    && target.list_index.is_none()
            }
            _ => true,
        };
        if !allowed {
            return method_not_allowed(located);
        }
    }

    if let Some(ct) = req.content_type.as_deref() {
        let base = ct.split(';').next().unwrap_or(ct).trim();
        if base != MEDIA_TYPE && base != "application/json" {
            return RestconfResponse::error(
                415,
                "unsupported media type",
                &uri,
                &format!("'{base}' is not a supported request media type"),
            );
        }
    }
    let Some(raw) = &req.body else {
        return RestconfResponse::error(400, "malformed-message", &uri, "a request body is required");
    };
    let body: Value = match serde_json::from_slice(raw) {
        Ok(v) => v,
        Err(e) => {
            return RestconfResponse::error(
                400,
                "malformed-message",
                &uri,
                &format!("invalid JSON: {e}"),
            )
        }
    };

    let root = match resolve_body_root(models, located, &body) {
        Ok(r) => r,
        Err(e) => return datamap_error_response(&e, &uri),
    };
    if replace {
        if let Located::Node(target) = located {
            if !std::ptr::eq(root.node, target.node) {
                return RestconfResponse::error(
                    400,
                    "malformed-message",
                    &uri,
                    "a PUT body must describe the target resource itself",
                );
            }
        }
    }
    let mode = if replace {
        Mode::Replace
    } else if root.node.kind == NodeKind::List && root.entry_index.is_none() {
        Mode::Append
    } else {
        Mode::Create
    };

    // verification, deletion, and the commit all happen under one lock
    let outcome = store.with_writer_lock(|lock| {
        let errors = verify_tree(&root, store, mode);
        if !errors.is_empty() {
            let conflict = errors.iter().any(|e| e.rule == Rule::ExistsConflict);
            let status = if conflict { 409 } else { 400 };
            let tag = if conflict {
                "exists-conflict"
            } else {
                errors[0].rule.tag()
            };
            return Ok(RestconfResponse::error_with(
                status,
                tag,
                &uri,
                "the request body failed verification",
                &errors,
            ));
        }

        let mut created = true;
        let apply_mode;
        if replace {
            let target = match located {
                Located::Node(t) => t,
                Located::Root => unreachable!("PUT on root is rejected earlier"),
            };
            match target.node.kind {
                NodeKind::Leaf | NodeKind::LeafList => {
                    let path = resolve_delete(target).map_err(map_err_400(&uri))?;
                    created = matches!(store.read_value(&path)?, ReadValue::Absent);
                    apply_mode = ApplyMode::Replace;
                }
                NodeKind::List if target.list_index.is_some() => {
                    // the keyed entry exists, overwrite it in place
                    created = false;
                    apply_mode = ApplyMode::Replace;
                }
                _ => {
                    let paths = delete_targets(target).map_err(map_err_400(&uri))?;
                    let mut removed = 0usize;
                    for path in &paths {
                        match store.delete_at(lock, path) {
                            Ok(n) => removed += n,
                            Err(UciError::NotFound(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                    created = removed == 0;
                    apply_mode = ApplyMode::Create;
                }
            }
        } else {
            apply_mode = ApplyMode::Create;
        }

        let entries = match json_to_entries(&root, mode, store) {
            Ok(e) => e,
            Err(e) => return Ok(datamap_error_response(&e, &uri)),
        };
        store.apply_changes(lock, &entries, apply_mode)?;
        Ok(RestconfResponse::empty(if created { 201 } else { 204 }))
    });

    match outcome {
        Ok(Ok(resp)) => resp,
        Ok(Err(e)) | Err(e) => uci_error_response(&e, &uri),
    }
}

// PUT path resolution failures inside the lock surface as store errors;
// collapse them to the generic unsupported-value 400 instead
fn map_err_400(_uri: &str) -> impl Fn(DatamapError) -> UciError + '_ {
    move |e| match e {
        DatamapError::Store(inner) => inner,
        other => UciError::UnsupportedValue("request".into(), other.to_string()),
    }
}

fn datamap_error_response(error: &DatamapError, uri: &str) -> RestconfResponse {
    let status = match error {
        DatamapError::UnknownModule(_)
        | DatamapError::UnknownNode(_)
        | DatamapError::UnknownListEntry(_) => 404,
        DatamapError::MissingKey(_)
        | DatamapError::BadSelector(_)
        | DatamapError::RootMismatch(_)
        | DatamapError::NotAnObject(_)
        | DatamapError::NotAnArray(_) => 400,
        DatamapError::Store(e) => return uci_error_response(e, uri),
        DatamapError::IncompletePath(..) | DatamapError::Type(..) => 500,
    };
    let tag = match status {
        404 => "not found",
        400 => "malformed-message",
        _ => "internal error",
    };
    RestconfResponse::error(status, tag, uri, &error.to_string())
}

fn uci_error_response(error: &UciError, uri: &str) -> RestconfResponse {
    let status = match error {
        UciError::NotFound(_) => 404,
        UciError::Conflict(_) => 409,
        UciError::AmbiguousPath(_) | UciError::UnsupportedValue(..) | UciError::Syntax { .. } => 400,
        UciError::Io(_) | UciError::LockTimeout(_) => 500,
    };
    let tag = match error {
        UciError::Conflict(_) => "exists-conflict",
        UciError::NotFound(_) => "not found",
        UciError::LockTimeout(_) => "lock timeout",
        _ => "malformed-message",
    };
    RestconfResponse::error(status, tag, uri, &error.to_string())
}
