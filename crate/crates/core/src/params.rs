//! Shared parsing for `name:key=value,key=value` selector strings.

use crate::error::{Error, Result};

/// Splits `name:k=v,k=v` into the name and its key/value pairs.
pub(crate) fn split_params(s: &str) -> Result<(&str, Vec<(String, String)>)> {
    let (name, rest) = match s.split_once(':') {
        Some((name, rest)) => (name.trim(), Some(rest)),
        None => (s.trim(), None),
    };
    let mut params = Vec::new();
    if let Some(rest) = rest {
        for item in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::config(format!("expected key=value in {s:?}, got {item:?}")))?;
            let key = k.trim().to_string();
            if params.iter().any(|(existing, _)| *existing == key) {
                return Err(Error::config(format!("duplicate parameter {key} in {s:?}")));
            }
            params.push((key, v.trim().to_string()));
        }
    }
    Ok((name, params))
}
