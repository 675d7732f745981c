//! Minimal argument handling: positionals plus `--key value` options.

use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Args {
    pub positionals: Vec<String>,
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Plain,
    Latex,
    Json,
}

impl Args {
    pub fn parse(raw: &[String]) -> Result<Args, String> {
        let mut positionals = Vec::new();
        let mut options = BTreeMap::new();
        let mut it = raw.iter();
        while let Some(arg) = it.next() {
            if let Some(key) = arg.strip_prefix("--") {
                let value = it
                    .next()
                    .ok_or_else(|| format!("option --{key} needs a value"))?;
                options.insert(key.to_string(), value.clone());
            } else {
                positionals.push(arg.clone());
            }
        }
        Ok(Args {
            positionals,
            options,
        })
    }

    pub fn format(&self) -> Result<Format, String> {
        match self.options.get("format").map(String::as_str) {
            None | Some("plain") => Ok(Format::Plain),
            Some("latex") => Ok(Format::Latex),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(format!("unknown format `{other}` (plain, latex, json)")),
        }
    }

    pub fn u64_option(&self, key: &str, default: u64) -> Result<u64, String> {
        match self.options.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("--{key} needs an integer")),
        }
    }

    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.get(key).map(String::as_str)
    }

    /// Options as sorted pairs for the manifest.
    pub fn manifest_options(&self) -> Vec<(String, String)> {
        self.options
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}
