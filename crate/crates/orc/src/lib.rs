//! RESTCONF configuration server that uses OpenWrt-style UCI files as its
//! datastore. YANG modules annotated with UCI mapping extensions are
//! preprocessed into a JSON model format (JIN) by `yang2jin` and loaded at
//! request time by the `orc` binary, which runs either as a CGI program or as
//! a small standalone HTTP listener.

pub mod datamap;
pub mod restconf;
pub mod uci;
pub mod validate;
pub mod yang;
