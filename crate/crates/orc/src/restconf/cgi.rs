//! The CGI entry point: one process, one exchange. The fronting web
//! server provides the request through environment variables and stdin.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::datamap::ModelSet;
use crate::uci::UciStore;

use super::{
    handle, parse_data_path, reason_phrase, Method, RestconfRequest, RestconfResponse,
};

/// Serve a single CGI exchange. Returns the process exit code: 0 for any
/// completed HTTP exchange (including error responses), 1 when the
/// environment is unusable or the response cannot be written.
pub fn run_cgi(
    env: &HashMap<String, String>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    models: &ModelSet,
    store: &UciStore,
) -> i32 {
    let Some(method_name) = env.get("REQUEST_METHOD") else {
        let _ = write_cgi(
            stdout,
            &RestconfResponse::error(500, "internal error", "", "REQUEST_METHOD is not set"),
        );
        return 1;
    };
    let Some(method) = Method::from_name(method_name) else {
        let resp = RestconfResponse::error(
            405,
            "method not allowed",
            "",
            &format!("'{method_name}' is not a RESTCONF method"),
        );
        return exit_code(write_cgi(stdout, &resp));
    };

    let path_info = env.get("PATH_INFO").map(String::as_str).unwrap_or("");
    let path = if path_info.is_empty() { "/data" } else { path_info };
    let segments = match parse_data_path(path) {
        Ok(s) => s,
        Err(reason) => {
            let resp = RestconfResponse::error(404, "not found", path, &reason);
            return exit_code(write_cgi(stdout, &resp));
        }
    };

    if let Some(q) = env.get("QUERY_STRING") {
        if !q.is_empty() {
            eprintln!("orc: ignoring query string '{q}'");
        }
    }

    let body = match env.get("CONTENT_LENGTH").filter(|v| !v.is_empty()) {
        Some(len) => {
            let Ok(expected) = len.parse::<usize>() else {
                let resp = RestconfResponse::error(
                    400,
                    "malformed-message",
                    path,
                    &format!("invalid CONTENT_LENGTH '{len}'"),
                );
                return exit_code(write_cgi(stdout, &resp));
            };
            let mut buf = vec![0u8; expected];
            match read_exact_len(stdin, &mut buf) {
                Ok(()) => Some(buf),
                Err(_) => {
                    let resp = RestconfResponse::error(
                        400,
                        "malformed-message",
                        path,
                        "the request body is shorter than CONTENT_LENGTH",
                    );
                    return exit_code(write_cgi(stdout, &resp));
                }
            }
        }
        None => None,
    };

    let request = RestconfRequest {
        method,
        segments,
        body,
        content_type: env.get("CONTENT_TYPE").cloned(),
    };
    let response = handle(models, store, &request);
    exit_code(write_cgi(stdout, &response))
}

fn exit_code(result: std::io::Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(_) => 1,
    }
}

fn read_exact_len(stream: &mut dyn Read, buf: &mut [u8]) -> std::io::Result<()> {
    let mut filled = 0;
    while filled < buf.len() {
        let n = stream.read(&mut buf[filled..])?;
        if n == 0 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::UnexpectedEof,
                "short body",
            ));
        }
        filled += n;
    }
    Ok(())
}

fn write_cgi(out: &mut dyn Write, resp: &RestconfResponse) -> std::io::Result<()> {
    write!(out, "Status: {} {}\r\n", resp.status, reason_phrase(resp.status))?;
    for (name, value) in &resp.headers {
        write!(out, "{name}: {value}\r\n")?;
    }
    write!(out, "\r\n")?;
    if let Some(body) = &resp.body {
        out.write_all(body)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yang::{parse_yang, runtime_model};
    use tempfile::TempDir;

    fn fixtures() -> (TempDir, UciStore, ModelSet) {
        let dir = TempDir::new().unwrap();
        let store = UciStore::open(dir.path());
        let module = parse_yang(crate::datamap::tests::EXAMPLE_YANG).unwrap();
        let models = ModelSet::new(vec![runtime_model(&module, &[]).unwrap()]);
        (dir, store, models)
    }

    fn env(pairs: &[(&str, &str)]) -> HashMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn get_exchange_writes_a_status_block() {
        let (_d, store, models) = fixtures();
        let mut out = Vec::new();
        let code = run_cgi(
            &env(&[("REQUEST_METHOD", "GET"), ("PATH_INFO", "/data/example:device")]),
            &mut std::io::empty(),
            &mut out,
            &models,
            &store,
        );
        assert_eq!(code, 0);
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("Status: 200 OK\r\n"), "{text}");
        assert!(text.contains("Content-Type: application/yang-data+json\r\n"));
        assert!(text.contains("\"example:device\""));
    }

    #[test]
    fn missing_request_method_is_a_hard_failure() {
        let (_d, store, models) = fixtures();
        let mut out = Vec::new();
        let code = run_cgi(&env(&[]), &mut std::io::empty(), &mut out, &models, &store);
        assert_eq!(code, 1);
        assert!(String::from_utf8(out).unwrap().starts_with("Status: 500"));
    }

    #[test]
    fn truncated_body_is_rejected() {
        let (_d, store, models) = fixtures();
        let mut out = Vec::new();
        let body = b"{\"example:dev";
        let code = run_cgi(
            &env(&[
                ("REQUEST_METHOD", "POST"),
                ("PATH_INFO", "/data/"),
                ("CONTENT_LENGTH", "1000"),
                ("CONTENT_TYPE", "application/yang-data+json"),
            ]),
            &mut &body[..],
            &mut out,
            &models,
            &store,
        );
        assert_eq!(code, 0);
        assert!(String::from_utf8(out).unwrap().starts_with("Status: 400"));
    }

    #[test]
    fn post_exchange_creates_the_resource() {
        let (_d, store, models) = fixtures();
        let body = br#"{"example:device":{"name":"r1"}}"#;
        let mut out = Vec::new();
        let code = run_cgi(
            &env(&[
                ("REQUEST_METHOD", "POST"),
                ("PATH_INFO", "/data/"),
                ("CONTENT_LENGTH", &body.len().to_string()),
                ("CONTENT_TYPE", "application/yang-data+json"),
                ("GATEWAY_INTERFACE", "CGI/1.1"),
            ]),
            &mut &body[..],
            &mut out,
            &models,
            &store,
        );
        assert_eq!(code, 0);
        assert!(String::from_utf8(out).unwrap().starts_with("Status: 201"));
        assert!(store.root().join("example").exists());
    }
}
