//! Scenario and representation files. Component indices are 1-based on disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stadesign::{Algebra, Complex, DMatrix, DVector, GeneratorRep, Profile, ScenarioSpec};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub algebra: AlgebraField,
    pub t_f: f64,
    pub h_initial: Vec<f64>,
    pub h_final: Vec<f64>,
    #[serde(default)]
    pub forbidden: Vec<usize>,
    #[serde(default)]
    pub imposed: BTreeMap<String, ProfileField>,
    #[serde(default)]
    pub ansatz_component: Option<usize>,
    #[serde(default = "default_degree")]
    pub ansatz_degree: usize,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default)]
    pub c1: C1Field,
    #[serde(default)]
    pub c2: f64,
}

fn default_degree() -> usize {
    5
}

fn default_grid() -> usize {
    2001
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum AlgebraField {
    Builtin(String),
    Custom(RepFileRef),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFileRef {
    pub rep_file: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileField {
    Linear { from: f64, to: f64 },
    Poly { coeffs: Vec<f64> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
pub enum C1Field {
    #[default]
    #[serde(skip)]
    Auto,
    Value(f64),
    Keyword(String),
}

/// `{dim, generators}` with each generator a row-major list of rows; entries are real numbers
/// or `[re, im]` pairs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub generators: Vec<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex<f64> {
        match self {
            Entry::Real(x) => Complex::new(x, 0.0),
            Entry::Complex([re, im]) => Complex::new(re, im),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(path.to_path_buf(), e.to_string()))
}

pub fn load_rep(path: &Path) -> Result<Algebra, CliError> {
    let file: RepFile = read_json(path)?;
    let bad = |why: String| CliError::Schema(path.to_path_buf(), why);
    let d = file.dim;
    let mut mats = Vec::with_capacity(file.generators.len());
    for (k, g) in file.generators.iter().enumerate() {
        if g.len() != d || g.iter().any(|row| row.len() != d) {
            return Err(bad(format!("generator {} is not {d}×{d}", k + 1)));
        }
        mats.push(DMatrix::from_fn(d, d, |r, c| g[r][c].value()));
    }
    let rep = GeneratorRep::new(d, mats)?;
    let name = file.name.unwrap_or_else(|| stem(path));
    Ok(Algebra::from_rep(&name, rep)?)
}

/// A built-in name or a representation file.
pub fn load_algebra(arg: &str) -> Result<Algebra, CliError> {
    match Algebra::builtin(arg) {
        Ok(a) => Ok(a),
        Err(_) if Path::new(arg).exists() => load_rep(Path::new(arg)),
        Err(e) => Err(e.into()),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into())
}

fn index(path: &Path, one_based: usize, what: &str) -> Result<usize, CliError> {
    one_based
        .checked_sub(1)
        .ok_or_else(|| CliError::Schema(path.to_path_buf(), format!("{what} index 0: components are numbered from 1")))
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioSpec, CliError> {
    let file: ScenarioFile = read_json(path)?;
    let bad = |why: String| CliError::Schema(path.to_path_buf(), why);
    let algebra = match &file.algebra {
        AlgebraField::Builtin(name) => Algebra::builtin(name)?,
        AlgebraField::Custom(r) => {
            let base = path.parent().unwrap_or(Path::new("."));
            load_rep(&base.join(&r.rep_file))?
        }
    };
    let name = file.name.clone().unwrap_or_else(|| stem(path));
    let mut spec = ScenarioSpec::new(&name, algebra, file.t_f, DVector::from_vec(file.h_initial), DVector::from_vec(file.h_final));
    spec.forbidden = file.forbidden.iter().map(|&k| index(path, k, "forbidden")).collect::<Result<_, _>>()?;
    for (key, p) in &file.imposed {
        let k: usize = key.parse().map_err(|_| bad(format!("imposed key `{key}` is not a component index")))?;
        let profile = match p {
            ProfileField::Linear { from, to } => Profile::Linear { from: *from, to: *to },
            ProfileField::Poly { coeffs } => Profile::Poly { coeffs: coeffs.clone() },
        };
        spec.imposed.push((index(path, k, "imposed")?, profile));
    }
    spec.ansatz_component = file.ansatz_component.map(|k| index(path, k, "ansatz")).transpose()?;
    spec.ansatz_degree = file.ansatz_degree;
    spec.grid_points = file.grid_points;
    spec.c1 = match file.c1 {
        C1Field::Auto => None,
        C1Field::Keyword(ref s) if s == "auto" => None,
        C1Field::Keyword(s) => return Err(bad(format!("c1 must be \"auto\" or a number, got \"{s}\""))),
        C1Field::Value(x) => Some(x),
    };
    spec.c2 = file.c2;
    spec.validate()?;
    Ok(spec)
}
