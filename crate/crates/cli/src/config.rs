//! Optional JSON config file holding the same keys as the long CLI
//! flags; explicit flags always win over config values.

use std::path::Path;

pub struct Config {
    values: serde_json::Map<String, serde_json::Value>,
}

impl Config {
    pub fn empty() -> Self {
        Config {
            values: serde_json::Map::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let values: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| format!("config {} is not valid JSON: {e}", path.display()))?;
        match values {
            serde_json::Value::Object(values) => Ok(Config { values }),
            _ => Err(format!("config {} must be a JSON object", path.display())),
        }
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(|v| v.as_f64())
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.values.get(key).and_then(|v| v.as_u64())
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.values
            .get(key)
            .and_then(|v| v.as_str().map(str::to_string))
    }
}

/// Flag value if present, else config value, else the default.
pub fn merge<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Flag value if present, else config value; `None` means the parameter
/// is genuinely missing (usage error for required parameters).
pub fn merge_opt<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}
