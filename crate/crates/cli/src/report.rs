//! The versioned report envelope and its human rendering.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "mlakit-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub arg: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(arg: &str, content: &[u8]) -> Self {
        let digest = Sha256::digest(content);
        InputDigest {
            arg: arg.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub verdict: Verdict,
    pub payload: Value,
    pub counterexamples: Vec<Value>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail | Verdict::Partial => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text view built from the payload alone.
    pub fn render(&self) -> String {
        let mut out = format!(
            "mlakit {}: {}\n",
            self.command,
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Partial => "PARTIAL",
            }
        );
        if let Value::Object(map) = &self.payload {
            for (key, value) in map {
                match table(value) {
                    Some(rows) => {
                        out.push_str(&format!("  {key}:\n"));
                        for row in rows {
                            out.push_str(&format!("    {row}\n"));
                        }
                    }
                    None => out.push_str(&format!("  {key}: {}\n", compact(value))),
                }
            }
        }
        for c in &self.counterexamples {
            out.push_str(&format!("  counterexample: {}\n", compact(c)));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("value serializes")
}

/// Lays out an array of flat objects sharing one key set as aligned rows.
fn table(v: &Value) -> Option<Vec<String>> {
    let rows = v.as_array()?;
    let first = rows.first()?.as_object()?;
    let keys: Vec<&String> = first.keys().collect();
    let mut cells: Vec<Vec<String>> = vec![keys.iter().map(|k| k.to_string()).collect()];
    for row in rows {
        let obj = row.as_object()?;
        if obj.len() != keys.len() {
            return None;
        }
        let mut line = Vec::new();
        for k in &keys {
            let cell = obj.get(*k)?;
            if cell.is_object() {
                return None;
            }
            line.push(match cell {
                Value::String(s) => s.clone(),
                other => compact(other),
            });
        }
        cells.push(line);
    }
    let widths: Vec<usize> = (0..keys.len())
        .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    Some(
        cells
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report {
            schema: SCHEMA.into(),
            command: "hs".into(),
            inputs: vec![InputDigest::new("catalog:cyclic(4)", b"catalog:cyclic(4)")],
            seed: 0,
            verdict: Verdict::Pass,
            payload: json!({
                "junctions": [
                    {"name": "inflation_injective", "holds": true},
                    {"name": "image_transgression_is_kernel_inflation", "holds": true}
                ],
                "node_orders": [1, 1, 1, 1, 1]
            }),
            counterexamples: vec![],
        }
    }

    #[test]
    fn payload_round_trips() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn digest_is_hex_sha256() {
        let d = InputDigest::new("x", b"");
        assert_eq!(
            d.sha256,
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn object_arrays_render_as_tables() {
        let text = sample().render();
        assert!(text.starts_with("mlakit hs: PASS"));
        assert!(text.contains("holds  name"), "{text}");
        assert!(text.contains("node_orders: [1,1,1,1,1]"));
    }
}
