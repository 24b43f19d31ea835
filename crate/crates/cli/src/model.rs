use std::path::Path;

use qmsdeco::matops::serde_rows;
use qmsdeco::{CMatrix, Functionals, Lindbladian, ModelSpec};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitFile {
    #[serde(default = "default_schema")]
    schema: u32,
    dim: usize,
    #[serde(with = "serde_rows")]
    hamiltonian: CMatrix,
    #[serde(with = "serde_rows::many")]
    jumps: Vec<CMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuilderFile {
    #[serde(default = "default_schema")]
    schema: u32,
    builder: ModelSpec,
}

/// A parsed model file.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub spec: Option<ModelSpec>,
    pub gen: Lindbladian,
}

fn check_schema(schema: u32) -> Result<(), CliError> {
    if schema != SCHEMA_VERSION {
        return Err(CliError::Parse(format!("unsupported schema version {schema}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

impl Model {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
        if value.get("builder").is_some() {
            let file: BuilderFile =
                serde_json::from_value(value).map_err(|e| CliError::Parse(format!("invalid builder model: {e}")))?;
            check_schema(file.schema)?;
            return Self::from_spec(file.builder);
        }
        let file: ExplicitFile =
            serde_json::from_value(value).map_err(|e| CliError::Parse(format!("invalid explicit model: {e}")))?;
        check_schema(file.schema)?;
        if file.hamiltonian.nrows() != file.dim {
            return Err(CliError::Parse(format!(
                "dim is {} but the Hamiltonian has {} rows",
                file.dim,
                file.hamiltonian.nrows()
            )));
        }
        let gen = Lindbladian::new(file.hamiltonian, file.jumps)?;
        Ok(Self { name: "explicit".into(), spec: None, gen })
    }

    pub fn from_spec(spec: ModelSpec) -> Result<Self, CliError> {
        let gen = spec.build()?;
        Ok(Self { name: spec.name().into(), spec: Some(spec), gen })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn dim(&self) -> usize {
        self.gen.dim
    }

    /// Full analysis bundle, with the bipartite split attached for factor models.
    pub fn functionals(&self, seed: u64) -> Result<Functionals, CliError> {
        let f = Functionals::from_generator(self.gen.clone(), seed)?;
        match &self.spec {
            Some(ModelSpec::BipartiteFactor { h_a, inner }) => Ok(f.with_bipartite(h_a.nrows(), inner.build()?)?),
            _ => Ok(f),
        }
    }
}
