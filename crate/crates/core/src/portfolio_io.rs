//! Portfolio documents in, results documents out.
//!
//! Both are UTF-8 JSON. The field names are documented in `docs/schema.md`.
//! Load errors come in three kinds, each carrying the location of the
//! offending input: `syntax` (line and column), `schema` (a JSON path, for
//! missing fields, wrong types and duplicate ids) and `semantic` (a JSON path,
//! for values the model cannot accept).

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlation::{CorrelationError, CorrelationMatrix};
use crate::costmodel::{BondSpec, PortfolioSpec};
use crate::error::Error as ModelError;
use crate::impact::{calibrated_alpha_inf, DEFAULT_DAY_COUNT};
use crate::optimizer::{OptimizerConfig, StrategyResult};

pub const PORTFOLIO_SCHEMA_VERSION: &str = "1";
pub const RESULTS_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid value at {path}: {message}")]
    Semantic { path: String, message: String },

    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
}

impl LoadError {
    /// Machine-readable category: `syntax`, `schema`, `semantic` or `io`.
    pub fn kind(&self) -> &'static str {
        match self {
            LoadError::Syntax { .. } => "syntax",
            LoadError::Schema { .. } => "schema",
            LoadError::Semantic { .. } => "semantic",
            LoadError::Io(_) => "io",
        }
    }

    /// JSON path of the offending field, when there is one.
    pub fn path(&self) -> Option<&str> {
        match self {
            LoadError::Schema { path, .. } | LoadError::Semantic { path, .. } => Some(path),
            _ => None,
        }
    }

    fn semantic(path: impl Into<String>, message: impl ToString) -> Self {
        LoadError::Semantic {
            path: path.into(),
            message: message.to_string(),
        }
    }

    fn schema(path: impl Into<String>, message: impl ToString) -> Self {
        LoadError::Schema {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("no strategy results to write")]
    Empty,

    #[error("results reference {got} assets but the portfolio has {expected}")]
    Misaligned { expected: usize, got: usize },

    #[error("cannot write results: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlphaKeyword {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum AlphaRepr {
    Keyword(AlphaKeyword),
    Value(f64),
}

/// `alpha_inf` as written in a portfolio document.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "AlphaRepr", into = "AlphaRepr")]
pub enum AlphaSetting {
    /// `6 / gamma^2`.
    #[default]
    Auto,
    Value(f64),
}

impl From<AlphaRepr> for AlphaSetting {
    fn from(r: AlphaRepr) -> Self {
        match r {
            AlphaRepr::Keyword(AlphaKeyword::Auto) => AlphaSetting::Auto,
            AlphaRepr::Value(v) => AlphaSetting::Value(v),
        }
    }
}

impl From<AlphaSetting> for AlphaRepr {
    fn from(a: AlphaSetting) -> Self {
        match a {
            AlphaSetting::Auto => AlphaRepr::Keyword(AlphaKeyword::Auto),
            AlphaSetting::Value(v) => AlphaRepr::Value(v),
        }
    }
}

impl AlphaSetting {
    pub fn resolve(&self, gamma: f64) -> Result<f64, ModelError> {
        match *self {
            AlphaSetting::Auto => calibrated_alpha_inf(gamma),
            AlphaSetting::Value(v) => Ok(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CorrelationKeyword {
    Identity,
}

/// Correlation as written in a portfolio document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrelationSetting {
    Identity(CorrelationKeywordRepr),
    /// One value for every off-diagonal entry.
    Uniform(f64),
    /// Rows of the full matrix.
    Rows(Vec<Vec<f64>>),
    /// The full matrix flattened row by row.
    Flat(Vec<f64>),
}

/// The literal string `"identity"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationKeywordRepr(CorrelationKeyword);

impl CorrelationSetting {
    pub fn identity() -> Self {
        CorrelationSetting::Identity(CorrelationKeywordRepr(CorrelationKeyword::Identity))
    }
}

impl Default for CorrelationSetting {
    fn default() -> Self {
        Self::identity()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondRecord {
    pub id: String,
    /// Price in units where par is 1.
    pub price: f64,
    /// Signed face amount; negative for shorts.
    pub position: f64,
    pub adv: f64,
    pub vol_annual: f64,
    pub min_spread: f64,
}

fn default_day_count() -> u32 {
    DEFAULT_DAY_COUNT as u32
}

/// A portfolio document before semantic validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioDocument {
    pub schema_version: String,
    pub gamma: f64,
    #[serde(default)]
    pub alpha_inf: AlphaSetting,
    #[serde(default = "default_day_count")]
    pub day_count: u32,
    pub bonds: Vec<BondRecord>,
    #[serde(default)]
    pub correlation: CorrelationSetting,
}

impl PortfolioDocument {
    /// Parses a document and checks its structure, without model validation.
    pub fn parse<R: Read>(source: R) -> Result<Self, LoadError> {
        let mut de = serde_json::Deserializer::from_reader(source);
        let doc: PortfolioDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            classify(e.into_inner(), path)
        })?;
        de.end().map_err(|e| classify(e, String::new()))?;
        doc.check_structure()?;
        Ok(doc)
    }

    fn check_structure(&self) -> Result<(), LoadError> {
        if self.schema_version != PORTFOLIO_SCHEMA_VERSION {
            return Err(LoadError::schema(
                "schema_version",
                format!(
                    "unsupported version {:?}, expected {:?}",
                    self.schema_version, PORTFOLIO_SCHEMA_VERSION
                ),
            ));
        }
        if self.bonds.is_empty() {
            return Err(LoadError::schema("bonds", "at least one bond is required"));
        }
        let mut seen = HashSet::new();
        for (i, bond) in self.bonds.iter().enumerate() {
            if !seen.insert(bond.id.as_str()) {
                return Err(LoadError::schema(
                    format!("bonds[{i}].id"),
                    format!("duplicate bond id {:?}", bond.id),
                ));
            }
        }
        let d = self.bonds.len();
        match &self.correlation {
            CorrelationSetting::Rows(rows) => {
                if rows.len() != d {
                    return Err(LoadError::schema(
                        "correlation",
                        format!("expected {d} rows, found {}", rows.len()),
                    ));
                }
                for (r, row) in rows.iter().enumerate() {
                    if row.len() != d {
                        return Err(LoadError::schema(
                            format!("correlation[{r}]"),
                            format!("expected {d} entries, found {}", row.len()),
                        ));
                    }
                }
            }
            CorrelationSetting::Flat(values) if values.len() != d * d => {
                return Err(LoadError::schema(
                    "correlation",
                    format!("expected {} entries, found {}", d * d, values.len()),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Model validation into a [`PortfolioSpec`].
    pub fn to_spec(&self) -> Result<PortfolioSpec<f64>, LoadError> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(LoadError::semantic("gamma", "must be positive"));
        }
        if self.day_count == 0 {
            return Err(LoadError::semantic("day_count", "must be positive"));
        }
        let alpha_inf = self
            .alpha_inf
            .resolve(self.gamma)
            .map_err(|e| LoadError::semantic("alpha_inf", e))?;
        if !(alpha_inf > 0.0) || !alpha_inf.is_finite() {
            return Err(LoadError::semantic("alpha_inf", "must be positive"));
        }

        let bonds = self
            .bonds
            .iter()
            .enumerate()
            .map(|(i, r)| bond_from_record(i, r, f64::from(self.day_count)))
            .collect::<Result<Vec<_>, _>>()?;

        let d = bonds.len();
        let correlation = match &self.correlation {
            CorrelationSetting::Identity(_) => CorrelationMatrix::identity(d),
            CorrelationSetting::Uniform(c) => CorrelationMatrix::uniform(d, *c)
                .map_err(|e| LoadError::semantic("correlation", e))?,
            CorrelationSetting::Rows(rows) => matrix_from_rows(rows)?,
            CorrelationSetting::Flat(values) => {
                let rows: Vec<Vec<f64>> = values.chunks(d).map(<[f64]>::to_vec).collect();
                matrix_from_rows(&rows)?
            }
        };

        PortfolioSpec::new(bonds, correlation, self.gamma, alpha_inf)
            .map_err(|e| LoadError::semantic("", e))
    }

    /// Document describing `spec` with its full correlation matrix.
    pub fn from_spec(spec: &PortfolioSpec<f64>) -> Self {
        let day_count = spec
            .bonds()
            .first()
            .map_or(DEFAULT_DAY_COUNT, |b| b.day_count());
        Self {
            schema_version: PORTFOLIO_SCHEMA_VERSION.to_string(),
            gamma: spec.gamma(),
            alpha_inf: AlphaSetting::Value(spec.alpha_inf()),
            day_count: day_count.round() as u32,
            bonds: spec
                .bonds()
                .iter()
                .map(|b| BondRecord {
                    id: b.id().to_string(),
                    price: b.price(),
                    position: b.position(),
                    adv: b.adv(),
                    vol_annual: b.vol_annual(),
                    min_spread: b.min_spread(),
                })
                .collect(),
            correlation: CorrelationSetting::Rows(spec.correlation().rows()),
        }
    }

    pub fn write<W: Write>(&self, mut sink: W) -> Result<(), WriteError> {
        serde_json::to_writer_pretty(&mut sink, self).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
        Ok(())
    }
}

fn bond_from_record(i: usize, r: &BondRecord, day_count: f64) -> Result<BondSpec<f64>, LoadError> {
    let field = |name: &str| format!("bonds[{i}].{name}");
    let check = |name: &str, ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(LoadError::semantic(field(name), what))
        }
    };
    check(
        "price",
        r.price > 0.0 && r.price.is_finite(),
        "must be positive",
    )?;
    check("position", r.position.is_finite(), "must be finite")?;
    check("adv", r.adv > 0.0 && r.adv.is_finite(), "must be positive")?;
    check(
        "vol_annual",
        r.vol_annual >= 0.0 && r.vol_annual.is_finite(),
        "must be non-negative",
    )?;
    check(
        "vol_annual",
        r.position == 0.0 || r.vol_annual > 0.0,
        "must be positive for a nonzero position",
    )?;
    check(
        "min_spread",
        r.min_spread >= 0.0 && r.min_spread.is_finite(),
        "must be non-negative",
    )?;
    BondSpec::new(
        r.id.clone(),
        r.price,
        r.position,
        r.adv,
        r.vol_annual,
        r.min_spread,
    )
    .and_then(|b| b.with_day_count(day_count))
    .map_err(|e| LoadError::semantic(format!("bonds[{i}]"), e))
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<CorrelationMatrix<f64>, LoadError> {
    CorrelationMatrix::from_rows(rows).map_err(|e| {
        let path = match &e {
            CorrelationError::NotFinite { row, col }
            | CorrelationError::Asymmetric { row, col, .. }
            | CorrelationError::OutOfRange { row, col, .. } => format!("correlation[{row}][{col}]"),
            CorrelationError::Diagonal { index, .. } => format!("correlation[{index}][{index}]"),
            CorrelationError::NotSquare { row, .. } => {
                return LoadError::schema(format!("correlation[{row}]"), &e)
            }
            _ => "correlation".to_string(),
        };
        LoadError::semantic(path, e)
    })
}

fn classify(e: serde_json::Error, path: String) -> LoadError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Io => LoadError::Io(e.into()),
        Category::Syntax | Category::Eof => LoadError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        Category::Data => LoadError::Schema {
            path: if path.is_empty() || path == "." {
                "$".to_string()
            } else {
                path
            },
            message: e.to_string(),
        },
    }
}

/// Reads and validates a portfolio document.
pub fn load_portfolio<R: Read>(source: R) -> Result<PortfolioSpec<f64>, LoadError> {
    PortfolioDocument::parse(source)?.to_spec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEcho {
    pub gamma: f64,
    pub alpha_inf: f64,
    pub day_count: f64,
    pub assets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub deadline: Option<f64>,
    pub t_floor: f64,
    pub rel_tol: f64,
    pub max_outer_iters: usize,
    pub multistart: usize,
    pub horizon_cap: f64,
}

impl From<&OptimizerConfig<f64>> for ConfigEcho {
    fn from(c: &OptimizerConfig<f64>) -> Self {
        Self {
            deadline: c.deadline,
            t_floor: c.t_floor,
            rel_tol: c.rel_tol,
            max_outer_iters: c.max_outer_iters,
            multistart: c.multistart,
            horizon_cap: c.horizon_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetRecord {
    pub id: String,
    /// Liquidation horizon in days.
    pub t: f64,
    pub direct_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyRecord {
    pub strategy: String,
    pub total_cost: f64,
    pub direct_cost: f64,
    pub penalty: f64,
    pub t_median: f64,
    pub t_max: f64,
    pub converged: bool,
    pub stationary: bool,
    pub iterations: usize,
    pub assets: Vec<AssetRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultsFile {
    pub schema_version: String,
    pub model: ModelEcho,
    pub config: ConfigEcho,
    pub strategies: Vec<StrategyRecord>,
}

impl ResultsFile {
    pub fn new(
        spec: &PortfolioSpec<f64>,
        config: &OptimizerConfig<f64>,
        results: &[StrategyResult<f64>],
    ) -> Result<Self, WriteError> {
        if results.is_empty() {
            return Err(WriteError::Empty);
        }
        let strategies = results
            .iter()
            .map(|r| {
                let times = r.schedule.times();
                if times.len() != spec.len() || r.cost.per_asset_direct.len() != spec.len() {
                    return Err(WriteError::Misaligned {
                        expected: spec.len(),
                        got: times.len(),
                    });
                }
                let assets = spec
                    .bonds()
                    .iter()
                    .zip(times)
                    .zip(&r.cost.per_asset_direct)
                    .map(|((b, &t), &direct_cost)| AssetRecord {
                        id: b.id().to_string(),
                        t,
                        direct_cost,
                    })
                    .collect();
                Ok(StrategyRecord {
                    strategy: r.strategy.to_string(),
                    total_cost: r.cost.total,
                    direct_cost: r.cost.direct,
                    penalty: r.cost.penalty,
                    t_median: r.t_median,
                    t_max: r.t_max,
                    converged: r.converged,
                    stationary: r.stationary,
                    iterations: r.iterations,
                    assets,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            schema_version: RESULTS_SCHEMA_VERSION.to_string(),
            model: ModelEcho {
                gamma: spec.gamma(),
                alpha_inf: spec.alpha_inf(),
                day_count: spec.bonds()[0].day_count(),
                assets: spec.len(),
            },
            config: config.into(),
            strategies,
        })
    }

    pub fn write<W: Write>(&self, mut sink: W) -> Result<(), WriteError> {
        // serde_json prints the shortest representation that reads back to
        // the same f64, so values survive a round trip exactly
        serde_json::to_writer_pretty(&mut sink, self).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
        sink.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(source: R) -> Result<Self, LoadError> {
        let mut de = serde_json::Deserializer::from_reader(source);
        let file: ResultsFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            classify(e.into_inner(), path)
        })?;
        de.end().map_err(|e| classify(e, String::new()))?;
        Ok(file)
    }
}

/// Serializes strategy results for `spec` under `config`.
pub fn write_results<W: Write>(
    spec: &PortfolioSpec<f64>,
    config: &OptimizerConfig<f64>,
    results: &[StrategyResult<f64>],
    sink: W,
) -> Result<(), WriteError> {
    ResultsFile::new(spec, config, results)?.write(sink)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "schema_version": "1",
        "gamma": 0.5,
        "alpha_inf": "auto",
        "bonds": [
            {"id": "A", "price": 1.0, "position": 10, "adv": 2, "vol_annual": 0.1, "min_spread": 0.002},
            {"id": "B", "price": 0.9, "position": -5, "adv": 3, "vol_annual": 0.2, "min_spread": 0.002},
            {"id": "C", "price": 1.1, "position": 0, "adv": 1, "vol_annual": 0.0, "min_spread": 0.0}
        ],
        "correlation": 0.25
    }"#;

    fn with(field: &str, value: &str) -> String {
        let mut doc: serde_json::Value = serde_json::from_str(SMALL).unwrap();
        let pointer = format!("/{}", field.replace('.', "/"));
        *doc.pointer_mut(&pointer).unwrap() = serde_json::from_str(value).unwrap();
        doc.to_string()
    }

    #[test]
    fn loads_uniform_document() {
        let spec = load_portfolio(SMALL.as_bytes()).unwrap();
        assert_eq!(spec.len(), 3);
        assert_eq!(spec.alpha_inf(), 24.0);
        assert_eq!(spec.correlation().get(0, 2), 0.25);
        assert_eq!(spec.correlation().get(1, 1), 1.0);
        assert_eq!(spec.bonds()[0].day_count(), 252.0);
    }

    #[test]
    fn alpha_and_correlation_forms() {
        let spec = load_portfolio(with("alpha_inf", "3.5").as_bytes()).unwrap();
        assert_eq!(spec.alpha_inf(), 3.5);
        let spec = load_portfolio(with("correlation", "\"identity\"").as_bytes()).unwrap();
        assert_eq!(spec.correlation().get(0, 1), 0.0);
        let rows = "[[1,0.1,0.2],[0.1,1,0.3],[0.2,0.3,1]]";
        let spec = load_portfolio(with("correlation", rows).as_bytes()).unwrap();
        assert_eq!(spec.correlation().get(2, 1), 0.3);
        let flat = "[1,0.1,0.2,0.1,1,0.3,0.2,0.3,1]";
        let spec = load_portfolio(with("correlation", flat).as_bytes()).unwrap();
        assert_eq!(spec.correlation().get(2, 1), 0.3);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = load_portfolio("{\n  \"gamma\": 0.5,\n  oops\n}".as_bytes()).unwrap_err();
        match err {
            LoadError::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = load_portfolio(format!("{SMALL} trailing").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "syntax");
    }

    #[test]
    fn schema_errors_name_the_field() {
        let mut doc: serde_json::Value = serde_json::from_str(SMALL).unwrap();
        doc["bonds"][1].as_object_mut().unwrap().remove("adv");
        let err = load_portfolio(doc.to_string().as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "schema");
        assert_eq!(err.path(), Some("bonds[1]"));
        assert!(err.to_string().contains("adv"));

        let err = load_portfolio(with("bonds.0.price", "\"par\"").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "schema");
        assert_eq!(err.path(), Some("bonds[0].price"));

        let err = load_portfolio(with("bonds.1.id", "\"A\"").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "schema");
        assert_eq!(err.path(), Some("bonds[1].id"));

        let err = load_portfolio(with("schema_version", "\"9\"").as_bytes()).unwrap_err();
        assert_eq!(err.path(), Some("schema_version"));

        let err = load_portfolio(with("correlation", "[[1,0],[0,1]]").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "schema");
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let err = load_portfolio(with("bonds.1.adv", "-3").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "semantic");
        assert_eq!(err.path(), Some("bonds[1].adv"));

        let err = load_portfolio(with("correlation", "-1").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "semantic");
        assert!(err.to_string().contains("-0.5"), "{err}");

        let err = load_portfolio(with("correlation", "1.5").as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "semantic");

        let bad = "[[1,0.9,-0.9],[0.9,1,0.9],[-0.9,0.9,1]]";
        let err = load_portfolio(with("correlation", bad).as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "semantic");
        assert!(err.to_string().contains("eigenvalue"));

        let asym = "[[1,0.1,0.2],[0.1,1,0.3],[0.2,0.35,1]]";
        let err = load_portfolio(with("correlation", asym).as_bytes()).unwrap_err();
        assert_eq!(err.path(), Some("correlation[1][2]"));

        let err = load_portfolio(with("gamma", "0").as_bytes()).unwrap_err();
        assert_eq!(err.path(), Some("gamma"));
    }

    #[test]
    fn load_serialize_load_is_idempotent() {
        let spec = load_portfolio(SMALL.as_bytes()).unwrap();
        let mut buf = Vec::new();
        PortfolioDocument::from_spec(&spec).write(&mut buf).unwrap();
        let again = load_portfolio(buf.as_slice()).unwrap();
        assert_eq!(spec, again);
        let mut buf2 = Vec::new();
        PortfolioDocument::from_spec(&again)
            .write(&mut buf2)
            .unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn results_round_trip_and_empty_rejected() {
        use crate::optimizer::evaluate_strategies;
        let spec = load_portfolio(SMALL.as_bytes()).unwrap();
        let config = OptimizerConfig::default().with_deadline(100.0);
        let results = evaluate_strategies(&spec, &config).unwrap();

        let mut buf = Vec::new();
        write_results(&spec, &config, &results, &mut buf).unwrap();
        let back = ResultsFile::read(buf.as_slice()).unwrap();
        assert_eq!(back, ResultsFile::new(&spec, &config, &results).unwrap());
        assert_eq!(back.strategies[2].total_cost, results[2].cost.total);
        assert_eq!(back.strategies[2].assets[2].t, 0.0);

        let mut again = Vec::new();
        write_results(&spec, &config, &results, &mut again).unwrap();
        assert_eq!(buf, again);

        assert!(matches!(
            write_results(&spec, &config, &[], Vec::new()),
            Err(WriteError::Empty)
        ));
    }
}
