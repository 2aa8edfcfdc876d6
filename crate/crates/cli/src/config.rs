use std::fmt;
use std::path::Path;

use chainrec::{parse_rational, Domain, NormKind, OperatorSpec, Rational, SeqVector};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Chains,
    Shadow,
    Mixing,
    L1demo,
    Fhc,
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Chains => "chains",
            Command::Shadow => "shadow",
            Command::Mixing => "mixing",
            Command::L1demo => "l1demo",
            Command::Fhc => "fhc",
            Command::Certify => "certify",
        }
    }

    fn parse(s: &str) -> Option<Command> {
        [Command::Chains, Command::Shadow, Command::Mixing, Command::L1demo, Command::Fhc, Command::Certify]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed experiment. Command-specific parameters stay as JSON and are read on demand.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub operator: OperatorSpec,
    pub norm: NormKind,
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub params: Map<String, Value>,
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

impl ExperimentConfig {
    /// Defaults: the doubling shift with a fixed line on ℓ¹, no seed, no horizon.
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            operator: OperatorSpec::DoublingShiftFixedLine,
            norm: NormKind::One,
            seed: None,
            horizon: None,
            params: Map::new(),
        }
    }

    pub fn from_json(command: Command, v: &Value) -> Result<Self, CliError> {
        let obj = v.as_object().ok_or_else(|| parse_err("config must be a JSON object"))?;
        let mut cfg = ExperimentConfig::new(command);
        for (key, val) in obj {
            match key.as_str() {
                "command" => {
                    let name = val.as_str().ok_or_else(|| parse_err("`command` must be a string"))?;
                    let c = Command::parse(name).ok_or_else(|| parse_err(format!("unknown command `{name}`")))?;
                    if c != command {
                        return Err(CliError::Parse(format!("config is for `{c}` but `{command}` was requested")));
                    }
                }
                "operator" => cfg.operator = OperatorSpec::from_json(val)?,
                "norm" => {
                    let s = match val {
                        Value::String(s) => s.clone(),
                        Value::Number(n) if n.is_u64() => n.to_string(),
                        _ => return Err(parse_err("`norm` must be 1, 2 or \"inf\"")),
                    };
                    cfg.norm = NormKind::parse(&s)?;
                }
                "seed" => cfg.seed = Some(val.as_u64().ok_or_else(|| parse_err("`seed` must be a nonnegative integer"))?),
                "horizon" => cfg.horizon = Some(as_usize(val, "horizon")?),
                _ => {
                    cfg.params.insert(key.clone(), val.clone());
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(command: Command, path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(command, &v)
    }

    pub fn domain(&self) -> Domain {
        self.operator.domain().unwrap_or(Domain::Naturals)
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Parse(format!("`{}` runs a seeded search; pass --seed", self.command)))
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn rational(&self, key: &str, default: Option<&str>) -> Result<Rational, CliError> {
        match (self.params.get(key), default) {
            (Some(v), _) => value_rational(v, key),
            (None, Some(d)) => Ok(parse_rational(d)?),
            (None, None) => Err(parse_err(format!("missing parameter `{key}`"))),
        }
    }

    pub fn rationals(&self, key: &str, default: &[&str]) -> Result<Vec<Rational>, CliError> {
        match self.params.get(key) {
            None => default.iter().map(|d| Ok(parse_rational(d)?)).collect(),
            Some(Value::Array(items)) => items.iter().map(|v| value_rational(v, key)).collect(),
            Some(_) => Err(parse_err(format!("`{key}` must be a list"))),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.params.get(key).map_or(Ok(default), |v| as_usize(v, key))
    }

    pub fn string(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.params.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(parse_err(format!("`{key}` must be a string"))),
        }
    }

    pub fn vector(&self, key: &str, default: Option<&str>) -> Result<SeqVector, CliError> {
        match (self.params.get(key), default) {
            (Some(Value::String(s)), _) => Ok(SeqVector::parse(self.domain(), s)?),
            (Some(_), _) => Err(parse_err(format!("`{key}` must be a vector string like \"{{0:1/2}}\""))),
            (None, Some(d)) => Ok(SeqVector::parse(self.domain(), d)?),
            (None, None) => Err(parse_err(format!("missing parameter `{key}`"))),
        }
    }

    pub fn vectors(&self, key: &str) -> Result<Option<Vec<SeqVector>>, CliError> {
        match self.params.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(SeqVector::parse(self.domain(), s)?),
                    _ => Err(parse_err(format!("`{key}` entries must be vector strings"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(parse_err(format!("`{key}` must be a list of vectors"))),
        }
    }
}

fn as_usize(v: &Value, key: &str) -> Result<usize, CliError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| parse_err(format!("`{key}` must be a nonnegative integer")))
}

/// `"num/den"` strings or JSON integers; decimals are rejected.
pub fn value_rational(v: &Value, key: &str) -> Result<Rational, CliError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| parse_err(format!("`{key}`: {e}"))),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        Value::Number(n) => Err(parse_err(format!("`{key}` = {n}: write rationals as \"num/den\" strings"))),
        _ => Err(parse_err(format!("`{key}` must be a rational"))),
    }
}
