//! Run manifests: every report embeds the command, its inputs, the resolved
//! options, the tool version, and a content hash, so identical runs produce
//! byte-identical reports up to the timestamp.

use serde::Serialize;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub options: Vec<(String, String)>,
    pub tool_version: String,
    pub content_hash: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[String], options: &[(String, String)]) -> RunManifest {
        let mut hasher = Fnv1a::new();
        hasher.write(command.as_bytes());
        for input in inputs {
            hasher.write(&[0]);
            hasher.write(input.as_bytes());
        }
        let mut options = options.to_vec();
        options.sort();
        for (k, v) in &options {
            hasher.write(&[1]);
            hasher.write(k.as_bytes());
            hasher.write(&[2]);
            hasher.write(v.as_bytes());
        }
        RunManifest {
            command: command.to_string(),
            inputs: inputs.to_vec(),
            options,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            content_hash: format!("{:016x}", hasher.finish()),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// FNV-1a, 64-bit.
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf29ce484222325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_option_order_but_not_values() {
        let a = RunManifest::new(
            "adjoint",
            &["file".into()],
            &[
                ("format".into(), "plain".into()),
                ("seed".into(), "1".into()),
            ],
        );
        let b = RunManifest::new(
            "adjoint",
            &["file".into()],
            &[
                ("seed".into(), "1".into()),
                ("format".into(), "plain".into()),
            ],
        );
        assert_eq!(a.content_hash, b.content_hash);
        let c = RunManifest::new("adjoint", &["file".into()], &[("seed".into(), "2".into())]);
        assert_ne!(a.content_hash, c.content_hash);
    }
}
