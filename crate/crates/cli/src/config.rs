//! Output metadata: format version and a hash of the resolved run
//! configuration, stamped into every emitted file.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const OUTPUT_VERSION: u32 = 1;

/// First 16 hex chars of the SHA-256 of the canonical JSON form.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_string(config).expect("serializable config");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// `# key=value` comment header shared by all CSV outputs.
pub fn csv_header(fields: &[(&str, String)]) -> String {
    let mut line = format!("# version={OUTPUT_VERSION}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push('\n');
    line
}
