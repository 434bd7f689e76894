//! A minimal sequential HTTP/1.1 listener, mainly for exercising the
//! server without a CGI-capable front end. One request per connection.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};

use crate::datamap::ModelSet;
use crate::uci::UciStore;

use super::{
    handle, parse_data_path, reason_phrase, Method, RestconfRequest, RestconfResponse,
};

/// Accept and serve connections until the process is terminated.
pub fn run_server(listener: TcpListener, models: &ModelSet, store: &UciStore) -> std::io::Result<()> {
    loop {
        let (stream, _) = listener.accept()?;
        // a broken client connection must not take the server down
        let _ = serve_connection(stream, models, store);
    }
}

fn serve_connection(
    stream: TcpStream,
    models: &ModelSet,
    store: &UciStore,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    match read_request(&mut reader) {
        Ok(request) => {
            let response = handle(models, store, &request);
            write_response(&mut writer, &response)
        }
        Err(reason) => {
            let response = RestconfResponse::error(400, "malformed-message", "", &reason);
            write_response(&mut writer, &response)
        }
    }
}

fn read_request(reader: &mut BufReader<TcpStream>) -> Result<RestconfRequest, String> {
    let mut line = String::new();
    reader
        .read_line(&mut line)
        .map_err(|e| format!("read error: {e}"))?;
    let mut parts = line.split_whitespace();
    let method_name = parts.next().ok_or("empty request line")?;
    let uri = parts.next().ok_or("request line lacks a URI")?;
    let version = parts.next().ok_or("request line lacks a version")?;
    if !version.starts_with("HTTP/1.") {
        return Err(format!("unsupported version '{version}'"));
    }
    let method =
        Method::from_name(method_name).ok_or_else(|| format!("unknown method '{method_name}'"))?;

    let mut content_length = 0usize;
    let mut content_type = None;
    loop {
        let mut header = String::new();
        reader
            .read_line(&mut header)
            .map_err(|e| format!("read error: {e}"))?;
        let header = header.trim_end();
        if header.is_empty() {
            break;
        }
        let Some((name, value)) = header.split_once(':') else {
            return Err(format!("malformed header '{header}'"));
        };
        let value = value.trim();
        match name.to_ascii_lowercase().as_str() {
            "content-length" => {
                content_length = value
                    .parse()
                    .map_err(|_| format!("bad content-length '{value}'"))?;
            }
            "content-type" => content_type = Some(value.to_string()),
            _ => {}
        }
    }

    let body = if content_length > 0 {
        let mut buf = vec![0u8; content_length];
        reader
            .read_exact(&mut buf)
            .map_err(|_| "body shorter than content-length".to_string())?;
        Some(buf)
    } else {
        None
    };

    let segments = parse_data_path(uri)?;
    Ok(RestconfRequest {
        method,
        segments,
        body,
        content_type,
    })
}

fn write_response(stream: &mut TcpStream, resp: &RestconfResponse) -> std::io::Result<()> {
    write!(
        stream,
        "HTTP/1.1 {} {}\r\n",
        resp.status,
        reason_phrase(resp.status)
    )?;
    for (name, value) in &resp.headers {
        write!(stream, "{name}: {value}\r\n")?;
    }
    let len = resp.body.as_ref().map(Vec::len).unwrap_or(0);
    write!(stream, "Content-Length: {len}\r\nConnection: close\r\n\r\n")?;
    if let Some(body) = &resp.body {
        stream.write_all(body)?;
    }
    stream.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yang::{parse_yang, runtime_model};
    use std::sync::Arc;
    use tempfile::TempDir;

    fn spawn_server() -> (TempDir, std::net::SocketAddr) {
        let dir = TempDir::new().unwrap();
        let store = UciStore::open(dir.path());
        let module = parse_yang(crate::datamap::tests::EXAMPLE_YANG).unwrap();
        let models = Arc::new(ModelSet::new(vec![runtime_model(&module, &[]).unwrap()]));
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            let _ = run_server(listener, &models, &store);
        });
        (dir, addr)
    }

    fn roundtrip(addr: std::net::SocketAddr, raw: &str) -> String {
        let mut stream = TcpStream::connect(addr).unwrap();
        stream.write_all(raw.as_bytes()).unwrap();
        let mut out = String::new();
        stream.read_to_string(&mut out).unwrap();
        out
    }

    #[test]
    fn serves_the_method_sequence_over_a_socket() {
        let (_d, addr) = spawn_server();
        let get = "GET /restconf/data/example:device HTTP/1.1\r\nHost: x\r\n\r\n";
        assert!(roundtrip(addr, get).starts_with("HTTP/1.1 200 OK"));

        let body = r#"{"example:device":{"name":"r1"}}"#;
        let post = format!(
            "POST /restconf/data/ HTTP/1.1\r\nHost: x\r\nContent-Type: application/yang-data+json\r\nContent-Length: {}\r\n\r\n{}",
            body.len(),
            body
        );
        assert!(roundtrip(addr, &post).starts_with("HTTP/1.1 201 Created"));

        let delete = "DELETE /restconf/data/example:device HTTP/1.1\r\nHost: x\r\n\r\n";
        assert!(roundtrip(addr, delete).starts_with("HTTP/1.1 204 No Content"));
    }

    #[test]
    fn malformed_request_line_is_400() {
        let (_d, addr) = spawn_server();
        let out = roundtrip(addr, "BANANAS\r\n\r\n");
        assert!(out.starts_with("HTTP/1.1 400 Bad Request"), "{out}");
    }
}
