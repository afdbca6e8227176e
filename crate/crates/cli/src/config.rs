//! Config documents, law arguments, hashing and report files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use horoprod_core::OffspringLaw;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const CONFIG_FORMAT: &str = "horoprod-config/1";
pub const REPORT_FORMAT: &str = "horoprod-report/1";

/// Fields that name offspring laws; hashed by content, not by spelling.
const LAW_FIELDS: [&str; 3] = ["law", "left", "right"];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("config is for experiment `{found}`, not `{expected}`")]
    WrongExperiment { expected: String, found: String },
    #[error("missing required parameter `{0}`")]
    Missing(&'static str),
}

/// A parsed config document: experiment name plus its parameters.
#[derive(Debug, Clone)]
pub struct ConfigDoc {
    pub path: String,
    pub experiment: String,
    /// Output directory; not part of the config hash.
    pub out: Option<String>,
    pub params: Map<String, Value>,
}

impl ConfigDoc {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let schema = |message: String| ConfigError::Schema {
            path: origin.to_string(),
            message,
        };
        let value: Value = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        let Value::Object(mut params) = value else {
            return Err(schema("expected a JSON object".into()).into());
        };
        match params.remove("format") {
            Some(Value::String(f)) if f == CONFIG_FORMAT => {}
            Some(other) => {
                return Err(schema(format!(
                    "unsupported format {other}, expected \"{CONFIG_FORMAT}\""
                ))
                .into())
            }
            None => return Err(schema(format!("missing \"format\": \"{CONFIG_FORMAT}\"")).into()),
        }
        let experiment = match params.remove("experiment") {
            Some(Value::String(e)) => e,
            _ => return Err(schema("missing string field \"experiment\"".into()).into()),
        };
        let out = match params.remove("out") {
            None => None,
            Some(Value::String(o)) => Some(o),
            Some(_) => return Err(schema("\"out\" must be a string".into()).into()),
        };
        Ok(ConfigDoc {
            path: origin.to_string(),
            experiment,
            out,
            params,
        })
    }
}

/// Parameters of one subcommand; every field is optional so that a config
/// document and command-line flags can be layered.
pub trait Params: Serialize + DeserializeOwned + Default {
    fn fill_defaults(&mut self);
    /// Master seed, after defaults.
    fn seed(&self) -> u64;
}

/// Overlays the flags on the config parameters. Unset flags (`null`, `false`,
/// empty lists) leave the config value in place.
pub fn merge<T: Params>(flags: &T, config: Option<&ConfigDoc>, experiment: &str) -> Result<T> {
    let Some(doc) = config else {
        let mut t = roundtrip(flags)?;
        t.fill_defaults();
        return Ok(t);
    };
    if doc.experiment != experiment {
        return Err(ConfigError::WrongExperiment {
            expected: experiment.to_string(),
            found: doc.experiment.clone(),
        }
        .into());
    }
    let Value::Object(known) = serde_json::to_value(T::default())? else {
        unreachable!("parameter structs serialize to objects")
    };
    for key in doc.params.keys() {
        if !known.contains_key(key) {
            return Err(ConfigError::Schema {
                path: doc.path.clone(),
                message: format!("unknown field `{key}` for experiment `{experiment}`"),
            }
            .into());
        }
    }
    let mut merged = doc.params.clone();
    let Value::Object(flag_values) = serde_json::to_value(flags)? else {
        unreachable!()
    };
    for (k, v) in flag_values {
        let unset = match &v {
            Value::Null | Value::Bool(false) => true,
            Value::Array(a) => a.is_empty(),
            _ => false,
        };
        if !unset {
            merged.insert(k, v);
        }
    }
    let mut t: T =
        serde_json::from_value(Value::Object(merged)).map_err(|e| ConfigError::Schema {
            path: doc.path.clone(),
            message: e.to_string(),
        })?;
    t.fill_defaults();
    Ok(t)
}

fn roundtrip<T: Params>(t: &T) -> Result<T> {
    Ok(serde_json::from_value(serde_json::to_value(t)?)?)
}

/// A law given either as a path to a law document or inline as
/// `k:p,k:p,...`. Inline laws must satisfy the standing assumptions.
pub fn parse_law(spec: &str) -> Result<OffspringLaw> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading law {spec}"))?;
        return OffspringLaw::from_json(&text).with_context(|| format!("law document {spec}"));
    }
    let mut probs = Vec::new();
    for part in spec.split(',') {
        let Some((k, p)) = part.split_once(':') else {
            bail!("law `{spec}` is neither a file nor of the form k:p,k:p");
        };
        let k: u32 = k
            .trim()
            .parse()
            .with_context(|| format!("offspring count in `{part}`"))?;
        let p: f64 = p
            .trim()
            .parse()
            .with_context(|| format!("probability in `{part}`"))?;
        probs.push((k, p));
    }
    OffspringLaw::new(probs).with_context(|| format!("law `{spec}`"))
}

pub fn require<T: Clone>(v: &Option<T>, name: &'static str) -> Result<T> {
    v.clone().ok_or_else(|| ConfigError::Missing(name).into())
}

/// The fully resolved config of a run: defaults filled in and law arguments
/// replaced by their documents.
pub fn resolve<T: Params>(experiment: &str, params: &T) -> Result<Value> {
    let Value::Object(mut map) = serde_json::to_value(params)? else {
        unreachable!()
    };
    for key in LAW_FIELDS {
        let Some(v) = map.get_mut(key) else { continue };
        match v {
            Value::String(s) => *v = law_value(s)?,
            Value::Array(items) => {
                for item in items.iter_mut() {
                    if let Value::String(s) = item {
                        *item = law_value(s)?;
                    }
                }
            }
            _ => {}
        }
    }
    map.insert("format".into(), CONFIG_FORMAT.into());
    map.insert("experiment".into(), experiment.into());
    Ok(Value::Object(map))
}

fn law_value(spec: &str) -> Result<Value> {
    Ok(serde_json::from_str(&parse_law(spec)?.to_json())?)
}

/// Hex SHA-256 of the compact JSON of a resolved config (keys sorted).
pub fn config_hash(resolved: &Value) -> String {
    hex::encode(Sha256::digest(
        serde_json::to_vec(resolved).expect("values serialize"),
    ))
}

/// Where a run writes its files, and what every report must carry.
pub struct Run {
    pub experiment: String,
    pub out: PathBuf,
    pub seed: u64,
    pub config: Value,
    pub hash: String,
}

impl Run {
    pub fn new<T: Params>(experiment: &str, params: &T, seed: u64, out: &Path) -> Result<Self> {
        let config = resolve(experiment, params)?;
        let hash = config_hash(&config);
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Run {
            experiment: experiment.to_string(),
            out: out.to_path_buf(),
            seed,
            config,
            hash,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Writes `<experiment>.json` wrapping `result` with the config, its hash
    /// and the master seed.
    pub fn report(&self, result: &impl Serialize, passed: Option<bool>) -> Result<PathBuf> {
        let mut doc = Map::new();
        doc.insert("format".into(), REPORT_FORMAT.into());
        doc.insert("experiment".into(), self.experiment.clone().into());
        doc.insert("config_hash".into(), self.hash.clone().into());
        doc.insert("seed".into(), self.seed.into());
        doc.insert("config".into(), self.config.clone());
        if let Some(p) = passed {
            doc.insert("passed".into(), p.into());
        }
        doc.insert("result".into(), serde_json::to_value(result)?);
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
        text.push('\n');
        self.write(&format!("{}.json", self.experiment), &text)
    }
}

pub fn is_false(b: &bool) -> bool {
    !*b
}
