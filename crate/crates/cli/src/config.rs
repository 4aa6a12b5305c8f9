use serde_json::Value;

use dieudonne::fields::{FieldTable, Tower};

use crate::commands::CliError;
use crate::GlobalArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

pub struct Config {
    pub default_precision: u32,
    pub threads: usize,
    pub output: OutputFormat,
    pub tower: Tower,
}

fn invalid(msg: String) -> CliError {
    CliError::Input(msg)
}

impl Config {
    /// Config file first, then command-line flags and the environment.
    pub fn load(args: &GlobalArgs) -> Result<Config, CliError> {
        let file: Value = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {path}: {e}")))?;
                serde_json::from_str(&text).map_err(|e| invalid(format!("config {path}: {e}")))?
            }
            None => Value::Object(Default::default()),
        };
        let obj = file.as_object().ok_or_else(|| invalid("config must be a JSON object".into()))?;
        for key in obj.keys() {
            if !["default_precision", "field_table", "threads", "output"].contains(&key.as_str()) {
                return Err(invalid(format!("unknown config key {key:?}")));
            }
        }
        let default_precision = match obj.get("default_precision") {
            Some(v) => v.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| invalid("default_precision must be an integer".into()))?,
            None => 8,
        };
        if default_precision < 2 {
            return Err(invalid(format!("default_precision must be at least 2, got {default_precision}")));
        }
        let threads = match (args.threads, obj.get("threads")) {
            (Some(t), _) => t,
            (None, Some(v)) => v.as_u64().ok_or_else(|| invalid("threads must be an integer".into()))? as usize,
            (None, None) => 1,
        }
        .max(1);
        let output = match (args.output, obj.get("output").and_then(Value::as_str)) {
            (Some(o), _) => o,
            (None, Some("json")) | (None, None) => OutputFormat::Json,
            (None, Some("table")) => OutputFormat::Table,
            (None, Some(other)) => return Err(invalid(format!("unknown output format {other:?}"))),
        };
        let table_path = args.field_table.clone().or_else(|| obj.get("field_table").and_then(Value::as_str).map(String::from));
        let table = match table_path {
            Some(path) if !path.is_empty() => {
                let text = std::fs::read_to_string(&path).map_err(|e| invalid(format!("cannot read field table {path}: {e}")))?;
                FieldTable::parse(&text)?
            }
            _ => FieldTable::builtin().clone(),
        };
        Ok(Config { default_precision, threads, output, tower: Tower::new(table) })
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push((prefix.to_string(), match other {
            Value::String(s) => s.clone(),
            _ => other.to_string(),
        })),
    }
}

/// One "key  value" line per leaf, keys dotted.
pub fn render_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, x)| format!("{k:width$}  {x}")).collect::<Vec<_>>().join("\n")
}
