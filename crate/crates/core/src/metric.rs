//! Expression-valued non-symmetric metrics, their pointwise decomposition and
//! the TOML model-file reader.
//!
//! The file grammar is described in `docs/model-format.md`.

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{EvalError, MathError, ModelError};
use crate::expr::{parse_expression, Expression};
use crate::jet::{Jet1, Jet2, DIM};
use crate::tensor::{Mat4, SymMetricAtPoint};

pub const BUILTIN_EXAMPLE: &str = "paper-example";

/// Coefficients of the five-term curvature family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoeffSet {
    pub u: f64,
    pub u_prime: f64,
    pub v: f64,
    pub v_prime: f64,
    pub w: f64,
}

impl CoeffSet {
    pub fn new(u: f64, u_prime: f64, v: f64, v_prime: f64, w: f64) -> Self {
        Self {
            u,
            u_prime,
            v,
            v_prime,
            w,
        }
    }

    /// The only combination the scalar family depends on.
    pub fn vw(&self) -> f64 {
        self.v_prime + self.w
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.u, self.u_prime, self.v, self.v_prime, self.w]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Frame {
    Comoving,
    /// Components `u^i` as expressions; normalized at evaluation time.
    Explicit(Box<[Expression; DIM]>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricityMode {
    AssumeZero,
    FixedPoint,
}

/// One stored torsion component; `sign` is -1 for entries filled in from
/// their (k, j) partner.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionEntry {
    pub index: [usize; 3],
    pub expr: Expression,
    pub sign: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IzSpec {
    pub torsion: Vec<TorsionEntry>,
    pub mode: MetricityMode,
    pub variation: Vec<([usize; 2], Expression)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatterTermSpec {
    pub label: String,
    pub alpha: f64,
    pub lagrangian: Expression,
    pub variation: Box<[[Expression; DIM]; DIM]>,
}

/// Scalar field driving the non-minimally coupled energy-momentum tensor.
/// `potential` is an expression in the symbol `phi` (and the parameters).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub phi: Expression,
    pub xi: f64,
    pub potential: Expression,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeModel {
    pub name: String,
    pub coords: [String; DIM],
    pub params: Vec<(String, f64)>,
    pub g: Box<[[Expression; DIM]; DIM]>,
    pub coeffs: CoeffSet,
    pub frame: Frame,
    pub reference_point: [f64; DIM],
    /// Nonzero components `v[a,g,b,i,j]` of the torsion variation tensor.
    pub variation: Vec<([usize; 5], f64)>,
    pub matter_terms: Vec<MatterTermSpec>,
    pub iz: Option<IzSpec>,
    pub scalar_field: Option<ScalarField>,
}

/// Metric jets at a point with the symmetric/antisymmetric split.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricAtPoint {
    pub point: [f64; DIM],
    pub g: [[Jet2; DIM]; DIM],
    pub sym_jet: [[Jet2; DIM]; DIM],
    pub antisym_jet: [[Jet2; DIM]; DIM],
    pub sym: SymMetricAtPoint,
    pub antisym: Mat4,
}

impl MetricAtPoint {
    /// Builds the decomposition from the 16 component jets.
    pub fn from_jets(point: [f64; DIM], g: [[Jet2; DIM]; DIM]) -> Result<Self, MathError> {
        let mut sym_jet = [[Jet2::ZERO; DIM]; DIM];
        let mut antisym_jet = [[Jet2::ZERO; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                sym_jet[i][j] = 0.5 * (g[i][j] + g[j][i]);
                if i != j {
                    antisym_jet[i][j] = 0.5 * (g[i][j] - g[j][i]);
                }
            }
        }
        let sym = SymMetricAtPoint::new(sym_jet.map(|row| row.map(|j| j.value)))?;
        let antisym = antisym_jet.map(|row| row.map(|j| j.value));
        Ok(Self {
            point,
            g,
            sym_jet,
            antisym_jet,
            sym,
            antisym,
        })
    }

    /// `g^{ij}` of the symmetric part with first derivatives,
    /// `∂_k g^{ij} = -g^{ia} ∂_k g_{ab} g^{bj}`.
    pub fn inverse_jet(&self) -> [[Jet1; DIM]; DIM] {
        let inv = &self.sym.g_upper;
        let mut out = [[Jet1::ZERO; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[i][j].value = inv[i][j];
                for k in 0..DIM {
                    let mut d = 0.0;
                    for a in 0..DIM {
                        for b in 0..DIM {
                            d -= inv[i][a] * self.sym_jet[a][b].grad[k] * inv[b][j];
                        }
                    }
                    out[i][j].grad[k] = d;
                }
            }
        }
        out
    }
}

impl SpacetimeModel {
    /// A model with default settings from metric component strings.
    pub fn from_components(
        coords: [&str; DIM],
        params: &[(&str, f64)],
        g: [[&str; DIM]; DIM],
    ) -> Result<Self, ModelError> {
        let mut model = Self {
            name: "inline".into(),
            coords: coords.map(String::from),
            params: params.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            g: Box::new(std::array::from_fn(|_| {
                std::array::from_fn(|_| Expression::constant(0.0))
            })),
            coeffs: CoeffSet::default(),
            frame: Frame::Comoving,
            reference_point: [1.0; DIM],
            variation: Vec::new(),
            matter_terms: Vec::new(),
            iz: None,
            scalar_field: None,
        };
        for i in 0..DIM {
            for j in 0..DIM {
                model.g[i][j] = model.parse(g[i][j], &format!("metric.g[{i}][{j}]"))?;
            }
        }
        Ok(model)
    }

    pub fn symbols(&self) -> Vec<&str> {
        self.coords
            .iter()
            .map(String::as_str)
            .chain(self.params.iter().map(|(n, _)| n.as_str()))
            .collect()
    }

    pub fn param_values(&self) -> Vec<f64> {
        self.params.iter().map(|(_, v)| *v).collect()
    }

    /// Parses an expression over the coordinates and parameters.
    pub fn parse(&self, src: &str, location: &str) -> Result<Expression, ModelError> {
        parse_expression(src, &self.symbols()).map_err(|source| ModelError::Expression {
            location: location.to_string(),
            source,
        })
    }

    /// Second-order jet of a coordinate/parameter expression at `point`.
    pub fn eval(&self, e: &Expression, point: [f64; DIM]) -> Result<Jet2, EvalError> {
        crate::expr::evaluate_jet2(e, point, &self.param_values())
    }

    pub fn eval_at(
        &self,
        e: &Expression,
        point: [f64; DIM],
        location: impl FnOnce() -> String,
    ) -> Result<Jet2, MathError> {
        self.eval(e, point).map_err(|source| MathError::Domain {
            location: location(),
            source,
        })
    }

    pub fn is_symmetric_text(&self) -> bool {
        (0..DIM).all(|i| (0..DIM).all(|j| self.g[i][j] == self.g[j][i]))
    }
}

/// Evaluates and decomposes the metric at `point`.
pub fn metric_at(model: &SpacetimeModel, point: [f64; DIM]) -> Result<MetricAtPoint, MathError> {
    let params = model.param_values();
    let mut g = [[Jet2::ZERO; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            g[i][j] = crate::expr::evaluate_jet2(&model.g[i][j], point, &params).map_err(
                |source| MathError::Domain {
                    location: format!("g[{i}][{j}]"),
                    source,
                },
            )?;
        }
    }
    MetricAtPoint::from_jets(point, g)
}

/// Profiles of the built-in example: diagonal symmetric part `s0..s3` and the
/// six independent antisymmetric entries `n0..n5` (above the diagonal, row by
/// row), all as expressions in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleProfiles {
    pub s: [String; 4],
    pub n: [String; 6],
}

impl Default for ExampleProfiles {
    fn default() -> Self {
        Self {
            s: ["1", "1 + t^2", "2 + sin(t)", "exp(t)"].map(String::from),
            n: ["0.5*t", "cos(t)", "t^3/3", "t", "sin(t)", "t^2/2"].map(String::from),
        }
    }
}

/// Slot of `n_k` in the upper triangle.
pub const N_SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn example_model(profiles: &ExampleProfiles) -> Result<SpacetimeModel, ModelError> {
    let mut g: [[String; DIM]; DIM] = std::array::from_fn(|_| std::array::from_fn(|_| "0".into()));
    for i in 0..DIM {
        g[i][i] = profiles.s[i].clone();
    }
    for (k, &(i, j)) in N_SLOTS.iter().enumerate() {
        g[i][j] = profiles.n[k].clone();
        g[j][i] = format!("-({})", profiles.n[k]);
    }
    let refs: [[&str; DIM]; DIM] = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].as_str()));
    let mut model = SpacetimeModel::from_components(["t", "x", "y", "z"], &[], refs)?;
    model.name = BUILTIN_EXAMPLE.into();
    model.coeffs = CoeffSet::new(0.0, 0.0, 0.0, 1.0, 0.0);
    check_reference(&model)?;
    Ok(model)
}

/// Looks up a built-in model by name.
pub fn builtin_model(name: &str) -> Option<SpacetimeModel> {
    (name == BUILTIN_EXAMPLE).then(|| example_model(&ExampleProfiles::default()).ok())?
}

fn check_reference(model: &SpacetimeModel) -> Result<(), ModelError> {
    metric_at(model, model.reference_point)
        .map(|_| ())
        .map_err(|e| ModelError::Reference(Box::new(e)))
}

// ---------------------------------------------------------------- file reader

const TOP_KEYS: &[&str] = &[
    "name",
    "coordinates",
    "params",
    "metric",
    "coefficients",
    "frame",
    "reference_point",
    "variation",
    "matter_term",
    "iz",
    "scalar_field",
];

fn check_keys(table: &Table, allowed: &[&str], prefix: &str) -> Result<(), ModelError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ModelError::UnknownKey(format!("{prefix}{key}")));
        }
    }
    Ok(())
}

fn type_name(v: &Value) -> &'static str {
    v.type_str()
}

fn as_table<'a>(v: &'a Value, location: &str) -> Result<&'a Table, ModelError> {
    v.as_table().ok_or_else(|| ModelError::Shape {
        location: location.into(),
        expected: "table".into(),
        found: type_name(v).into(),
    })
}

fn number(v: &Value, location: &str) -> Result<f64, ModelError> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) => Ok(*f),
        other => Err(ModelError::Shape {
            location: location.into(),
            expected: "number".into(),
            found: type_name(other).into(),
        }),
    }
}

fn array<'a>(v: &'a Value, len: usize, location: &str) -> Result<&'a [Value], ModelError> {
    let arr = v.as_array().ok_or_else(|| ModelError::Shape {
        location: location.into(),
        expected: format!("array of {len}"),
        found: type_name(v).into(),
    })?;
    if arr.len() != len {
        return Err(ModelError::Shape {
            location: location.into(),
            expected: format!("array of {len}"),
            found: format!("array of {}", arr.len()),
        });
    }
    Ok(arr)
}

fn expr_text(v: &Value, location: &str) -> Result<String, ModelError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(format!("{f:?}")),
        other => Err(ModelError::Shape {
            location: location.into(),
            expected: "expression string or number".into(),
            found: type_name(other).into(),
        }),
    }
}

fn matrix(
    model: &SpacetimeModel,
    v: &Value,
    location: &str,
) -> Result<Box<[[Expression; DIM]; DIM]>, ModelError> {
    let rows = array(v, DIM, location)?;
    let mut out: Box<[[Expression; DIM]; DIM]> =
        Box::new(std::array::from_fn(|_| std::array::from_fn(|_| Expression::constant(0.0))));
    for (i, row) in rows.iter().enumerate() {
        let cols = array(row, DIM, &format!("{location}[{i}]"))?;
        for (j, cell) in cols.iter().enumerate() {
            let loc = format!("{location}[{i}][{j}]");
            out[i][j] = model.parse(&expr_text(cell, &loc)?, &loc)?;
        }
    }
    Ok(out)
}

/// Parses `prefix[a,b,...]` into exactly `N` indices below 4.
fn bracket_indices<const N: usize>(key: &str, prefix: &str) -> Option<[usize; N]> {
    let inner = key.strip_prefix(prefix)?.strip_prefix('[')?.strip_suffix(']')?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != N {
        return None;
    }
    let mut out = [0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().ok().filter(|&v: &usize| v < DIM)?;
    }
    Some(out)
}

fn bad_index(key: &str, what: &str) -> ModelError {
    ModelError::Invalid(format!("malformed index key '{key}' (expected {what})"))
}

/// Reads a model document. Expressions are parsed and identifier-checked,
/// defaults applied, and the symmetric part checked at the reference point.
pub fn load_model(document: &str) -> Result<SpacetimeModel, ModelError> {
    let root: Table = document.parse().map_err(|e: toml::de::Error| ModelError::Document {
        message: e.message().to_string(),
        offset: e.span().map(|s| s.start),
    })?;
    check_keys(&root, TOP_KEYS, "")?;

    let name = match root.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(ModelError::Shape {
                location: "name".into(),
                expected: "string".into(),
                found: type_name(other).into(),
            })
        }
        None => "model".into(),
    };

    let mut coords = ["t", "x", "y", "z"].map(String::from);
    if let Some(v) = root.get("coordinates") {
        let t = as_table(v, "coordinates")?;
        check_keys(t, &["names"], "coordinates.")?;
        if let Some(names) = t.get("names") {
            for (slot, n) in coords.iter_mut().zip(array(names, DIM, "coordinates.names")?) {
                *slot = n
                    .as_str()
                    .ok_or_else(|| ModelError::Invalid("coordinate names must be strings".into()))?
                    .to_string();
            }
        }
    }

    let mut params = Vec::new();
    if let Some(v) = root.get("params") {
        for (key, val) in as_table(v, "params")? {
            params.push((key.clone(), number(val, &format!("params.{key}"))?));
        }
    }
    {
        let mut seen: Vec<&str> = coords.iter().map(String::as_str).collect();
        for (n, _) in &params {
            if seen.contains(&n.as_str()) {
                return Err(ModelError::Invalid(format!("symbol '{n}' declared twice")));
            }
            seen.push(n);
        }
        for n in &seen {
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || crate::expr::Func::from_name(n).is_some() {
                return Err(ModelError::Invalid(format!("'{n}' is not a usable symbol name")));
            }
        }
    }

    let mut model = SpacetimeModel::from_components(
        std::array::from_fn(|i| coords[i].as_str()),
        &params.iter().map(|(n, v)| (n.as_str(), *v)).collect::<Vec<_>>(),
        [["0"; DIM]; DIM],
    )?;
    model.name = name;

    let metric = root.get("metric").ok_or(ModelError::MissingSection("metric"))?;
    let metric = as_table(metric, "metric")?;
    check_keys(metric, &["g"], "metric.")?;
    let g = metric.get("g").ok_or(ModelError::MissingSection("metric.g"))?;
    model.g = matrix(&model, g, "metric.g")?;

    if let Some(v) = root.get("coefficients") {
        let t = as_table(v, "coefficients")?;
        check_keys(t, &["u", "u1", "v", "v1", "w"], "coefficients.")?;
        let get = |k: &str| -> Result<f64, ModelError> {
            t.get(k).map_or(Ok(0.0), |v| number(v, &format!("coefficients.{k}")))
        };
        model.coeffs = CoeffSet::new(get("u")?, get("u1")?, get("v")?, get("v1")?, get("w")?);
    }

    if let Some(v) = root.get("frame") {
        let t = as_table(v, "frame")?;
        check_keys(t, &["comoving", "u"], "frame.")?;
        match (t.get("comoving"), t.get("u")) {
            (Some(_), Some(_)) => {
                return Err(ModelError::Invalid("frame: give either comoving or u, not both".into()))
            }
            (Some(Value::Boolean(true)), None) | (None, None) => model.frame = Frame::Comoving,
            (Some(_), None) => {
                return Err(ModelError::Invalid("frame.comoving must be true when present".into()))
            }
            (None, Some(u)) => {
                let cells = array(u, DIM, "frame.u")?;
                let mut comps: [Expression; DIM] = std::array::from_fn(|_| Expression::constant(0.0));
                for (i, c) in cells.iter().enumerate() {
                    let loc = format!("frame.u[{i}]");
                    comps[i] = model.parse(&expr_text(c, &loc)?, &loc)?;
                }
                model.frame = Frame::Explicit(Box::new(comps));
            }
        }
    }

    if let Some(v) = root.get("reference_point") {
        let t = as_table(v, "reference_point")?;
        check_keys(t, &["point"], "reference_point.")?;
        if let Some(p) = t.get("point") {
            for (i, c) in array(p, DIM, "reference_point.point")?.iter().enumerate() {
                model.reference_point[i] = number(c, &format!("reference_point.point[{i}]"))?;
            }
        }
    }

    if let Some(v) = root.get("variation") {
        for (key, val) in as_table(v, "variation")? {
            let idx = bracket_indices::<5>(key, "v").ok_or_else(|| bad_index(key, "v[a,g,b,i,j]"))?;
            model.variation.push((idx, number(val, &format!("variation.{key}"))?));
        }
    }

    if let Some(v) = root.get("matter_term") {
        let terms = v.as_array().ok_or_else(|| ModelError::Shape {
            location: "matter_term".into(),
            expected: "array of tables".into(),
            found: type_name(v).into(),
        })?;
        for (r, term) in terms.iter().enumerate() {
            let loc = format!("matter_term[{r}]");
            let t = as_table(term, &loc)?;
            check_keys(t, &["label", "alpha", "L", "V"], &format!("{loc}."))?;
            let label = t
                .get("label")
                .and_then(Value::as_str)
                .map_or_else(|| format!("term{r}"), String::from);
            let alpha = t.get("alpha").map_or(Ok(1.0), |a| number(a, &format!("{loc}.alpha")))?;
            let l_loc = format!("{loc}.L");
            let l_val = t.get("L").ok_or_else(|| ModelError::Invalid(format!("{l_loc} is required")))?;
            let lagrangian = model.parse(&expr_text(l_val, &l_loc)?, &l_loc)?;
            let v_loc = format!("{loc}.V");
            let variation = match t.get("V") {
                Some(m) => matrix(&model, m, &v_loc)?,
                None => Box::new(std::array::from_fn(|_| std::array::from_fn(|_| Expression::constant(0.0)))),
            };
            model.matter_terms.push(MatterTermSpec {
                label,
                alpha,
                lagrangian,
                variation,
            });
        }
    }

    if let Some(v) = root.get("scalar_field") {
        let t = as_table(v, "scalar_field")?;
        check_keys(t, &["phi", "xi", "potential"], "scalar_field.")?;
        let phi_val = t
            .get("phi")
            .ok_or_else(|| ModelError::Invalid("scalar_field.phi is required".into()))?;
        let phi = model.parse(&expr_text(phi_val, "scalar_field.phi")?, "scalar_field.phi")?;
        let xi = t.get("xi").map_or(Ok(0.0), |x| number(x, "scalar_field.xi"))?;
        let potential = match t.get("potential") {
            Some(p) => {
                let mut syms = vec!["phi"];
                syms.extend(model.params.iter().map(|(n, _)| n.as_str()));
                let src = expr_text(p, "scalar_field.potential")?;
                parse_expression(&src, &syms).map_err(|source| ModelError::Expression {
                    location: "scalar_field.potential".into(),
                    source,
                })?
            }
            None => Expression::constant(0.0),
        };
        model.scalar_field = Some(ScalarField { phi, xi, potential });
    }

    check_reference(&model)?;

    if let Some(v) = root.get("iz") {
        model.iz = Some(read_iz(&model, as_table(v, "iz")?)?);
    }

    Ok(model)
}

fn read_iz(model: &SpacetimeModel, t: &Table) -> Result<IzSpec, ModelError> {
    let mut mode = MetricityMode::AssumeZero;
    let mut variation = Vec::new();
    let mut given: Vec<([usize; 3], Expression)> = Vec::new();
    for (key, val) in t {
        match key.as_str() {
            "metricity_mode" => {
                mode = match val.as_str() {
                    Some("assume_zero") => MetricityMode::AssumeZero,
                    Some("fixed_point") => MetricityMode::FixedPoint,
                    _ => {
                        return Err(ModelError::Invalid(
                            "iz.metricity_mode must be \"assume_zero\" or \"fixed_point\"".into(),
                        ))
                    }
                }
            }
            "variation" => {
                for (vk, vv) in as_table(val, "iz.variation")? {
                    let idx = bracket_indices::<2>(vk, "V").ok_or_else(|| bad_index(vk, "V[i,j]"))?;
                    let loc = format!("iz.variation.{vk}");
                    variation.push((idx, model.parse(&expr_text(vv, &loc)?, &loc)?));
                }
            }
            _ if key.starts_with("T[") => {
                let idx = bracket_indices::<3>(key, "T").ok_or_else(|| bad_index(key, "T[i,j,k]"))?;
                if idx[1] == idx[2] {
                    return Err(ModelError::Invalid(format!(
                        "iz.{key}: torsion must be antisymmetric in its last two indices"
                    )));
                }
                let loc = format!("iz.{key}");
                given.push((idx, model.parse(&expr_text(val, &loc)?, &loc)?));
            }
            _ => return Err(ModelError::UnknownKey(format!("iz.{key}"))),
        }
    }

    let mut torsion: Vec<TorsionEntry> = Vec::new();
    for (idx, expr) in &given {
        let [i, j, k] = *idx;
        torsion.push(TorsionEntry {
            index: *idx,
            expr: expr.clone(),
            sign: 1.0,
        });
        match given.iter().find(|(o, _)| *o == [i, k, j]) {
            None => torsion.push(TorsionEntry {
                index: [i, k, j],
                expr: expr.clone(),
                sign: -1.0,
            }),
            Some((_, partner)) if j < k => {
                let p = model.reference_point;
                let a = model.eval(expr, p).map_err(|source| {
                    ModelError::Reference(Box::new(MathError::Domain {
                        location: format!("iz.T[{i},{j},{k}]"),
                        source,
                    }))
                })?;
                let b = model.eval(partner, p).map_err(|source| {
                    ModelError::Reference(Box::new(MathError::Domain {
                        location: format!("iz.T[{i},{k},{j}]"),
                        source,
                    }))
                })?;
                let scale = a.value.abs().max(b.value.abs()).max(1.0);
                if (a.value + b.value).abs() > 1e-12 * scale {
                    return Err(ModelError::Invalid(format!(
                        "iz.T[{i},{j},{k}] = {} and iz.T[{i},{k},{j}] = {} are not antisymmetric",
                        a.value, b.value
                    )));
                }
            }
            Some(_) => {}
        }
    }
    Ok(IzSpec {
        torsion,
        mode,
        variation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINKOWSKI: &str = r#"
[metric]
g = [["1", "0", "0", "0"],
     ["0", "-1", "0", "0"],
     ["0", "0", "-1", "0"],
     ["0", "0", "0", "-1"]]
"#;

    #[test]
    fn minkowski_document() {
        let m = load_model(MINKOWSKI).unwrap();
        assert_eq!(m.coords, ["t", "x", "y", "z"]);
        assert_eq!(m.coeffs, CoeffSet::default());
        assert_eq!(m.frame, Frame::Comoving);
        let at = metric_at(&m, [0.3, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(at.sym.g_lower[0], [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(at.sym.g_lower[3][3], -1.0);
        assert_eq!(at.sym.det, -1.0);
        assert_eq!(at.antisym, [[0.0; 4]; 4]);
    }

    #[test]
    fn three_by_three_is_a_shape_error() {
        let doc = r#"
[metric]
g = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
"#;
        assert!(matches!(load_model(doc), Err(ModelError::Shape { .. })));
    }

    #[test]
    fn missing_metric_and_unknown_keys() {
        assert!(matches!(load_model("[params]\na = 1\n"), Err(ModelError::MissingSection("metric"))));
        let doc = format!("{MINKOWSKI}\n[coefficients]\nq = 1\n");
        assert!(matches!(load_model(&doc), Err(ModelError::UnknownKey(k)) if k == "coefficients.q"));
        let doc = format!("colour = 3\n{MINKOWSKI}");
        assert!(matches!(load_model(&doc), Err(ModelError::UnknownKey(_))));
    }

    #[test]
    fn syntax_error_carries_offset() {
        let err = load_model("[metric\ng = 1").unwrap_err();
        match err {
            ModelError::Document { offset, .. } => assert!(offset.is_some()),
            other => panic!("unexpected {other:?}"),
        }
        let doc = MINKOWSKI.replace("\"-1\", \"0\", \"0\"]", "\"-1 +\", \"0\", \"0\"]");
        match load_model(&doc).unwrap_err() {
            ModelError::Expression { location, source } => {
                assert_eq!(location, "metric.g[1][1]");
                assert_eq!(source.offset, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_in_metric() {
        let doc = MINKOWSKI.replacen("\"1\"", "\"1 + q\"", 1);
        assert!(matches!(load_model(&doc), Err(ModelError::Expression { .. })));
    }

    #[test]
    fn singular_reference_point() {
        let doc = r#"
[metric]
g = [["t", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]
[reference_point]
point = [0, 0, 0, 0]
"#;
        assert!(matches!(load_model(doc), Err(ModelError::Reference(_))));
        let ok = doc.replace("point = [0, 0, 0, 0]", "point = [2, 0, 0, 0]");
        assert_eq!(load_model(&ok).unwrap().reference_point, [2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn full_document_sections() {
        let doc = r#"
name = "demo"
[coordinates]
names = ["tau", "a", "b", "c"]
[params]
k = 2.5
[metric]
g = [["1", "k*tau", 0, 0], ["-k*tau", "-1", 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
[coefficients]
v1 = 1
w = 0.5
[frame]
u = ["1", "0", "0", "0"]
[variation]
"v[0,1,2,0,0]" = 0.25
[[matter_term]]
label = "dust"
alpha = 2
L = "tau^2"
V = [["1", 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
[scalar_field]
phi = "tau"
xi = 0.1
potential = "phi^2 * k"
[iz]
metricity_mode = "fixed_point"
"T[0,1,2]" = "k"
[iz.variation]
"V[0,0]" = "1"
"#;
        let m = load_model(doc).unwrap();
        assert_eq!(m.name, "demo");
        assert_eq!(m.symbols(), ["tau", "a", "b", "c", "k"]);
        assert_eq!(m.coeffs.vw(), 1.5);
        assert!(matches!(m.frame, Frame::Explicit(_)));
        assert_eq!(m.variation, vec![([0, 1, 2, 0, 0], 0.25)]);
        assert_eq!(m.matter_terms[0].alpha, 2.0);
        let iz = m.iz.as_ref().unwrap();
        assert_eq!(iz.mode, MetricityMode::FixedPoint);
        assert_eq!(iz.torsion.len(), 2);
        assert_eq!(iz.torsion[1].index, [0, 2, 1]);
        assert_eq!(iz.torsion[1].sign, -1.0);
        let at = metric_at(&m, [2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(at.antisym[0][1], 5.0);
        assert_eq!(at.antisym[1][0], -5.0);
    }

    #[test]
    fn torsion_validation() {
        let base = format!("{MINKOWSKI}\n[iz]\n");
        assert!(load_model(&format!("{base}\"T[0,1,1]\" = 1\n")).is_err());
        assert!(load_model(&format!("{base}\"T[0,1,2]\" = 1\n\"T[0,2,1]\" = 1\n")).is_err());
        let ok = load_model(&format!("{base}\"T[0,1,2]\" = 1\n\"T[0,2,1]\" = -1\n")).unwrap();
        assert_eq!(ok.iz.unwrap().torsion.len(), 2);
        assert!(load_model(&format!("{base}\"T[0,1]\" = 1\n")).is_err());
    }

    #[test]
    fn example_decomposition_by_hand() {
        let p = ExampleProfiles {
            s: ["1", "1", "1", "1"].map(String::from),
            n: ["0", "0", "0", "t", "0", "0"].map(String::from),
        };
        let m = example_model(&p).unwrap();
        let at = metric_at(&m, [1.0, 0.0, 0.0, 0.0]).unwrap();
        let id = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        assert_eq!(at.sym.g_lower, id);
        assert_eq!(at.antisym[1][2], 1.0);
        assert_eq!(at.antisym[2][1], -1.0);
        assert_eq!(at.sym.det, 1.0);
        assert_eq!(m.symbols(), ["t", "x", "y", "z"]);
    }

    #[test]
    fn decomposition_is_consistent() {
        let m = builtin_model(BUILTIN_EXAMPLE).unwrap();
        let at = metric_at(&m, [0.7, 0.0, 0.0, 0.0]).unwrap();
        for i in 0..4 {
            assert_eq!(at.antisym[i][i], 0.0);
            for j in 0..4 {
                assert_eq!(at.sym_jet[i][j], at.sym_jet[j][i]);
                assert_eq!(at.antisym_jet[i][j], -at.antisym_jet[j][i]);
                let rebuilt = at.sym_jet[i][j] + at.antisym_jet[i][j];
                assert!((rebuilt.value - at.g[i][j].value).abs() <= 1e-15 * at.g[i][j].value.abs().max(1.0));
                for k in 0..4 {
                    assert!((rebuilt.grad[k] - at.g[i][j].grad[k]).abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn antisymmetric_pair_only() {
        let m = SpacetimeModel::from_components(
            ["t", "x", "y", "z"],
            &[("n", 0.3)],
            [["1", "n", "0", "0"], ["-n", "-1", "0", "0"], ["0", "0", "-1", "0"], ["0", "0", "0", "-1"]],
        )
        .unwrap();
        let at = metric_at(&m, [0.0; 4]).unwrap();
        assert_eq!(at.sym.g_lower[0][1], 0.0);
        assert_eq!(at.antisym[0][1], 0.3);
    }

    #[test]
    fn inverse_jet_matches_difference_quotient() {
        let m = SpacetimeModel::from_components(
            ["t", "x", "y", "z"],
            &[],
            [
                ["1 + t^2", "x", "0", "0"],
                ["x", "-2 - sin(t)", "0", "y"],
                ["0", "0", "-exp(t)", "0"],
                ["0", "y", "0", "-1 - x^2"],
            ],
        )
        .unwrap();
        let p = [0.4, 0.3, -0.2, 0.1];
        let inv = metric_at(&m, p).unwrap().inverse_jet();
        let h = 1e-5;
        for k in 0..4 {
            let mut pp = p;
            let mut pm = p;
            pp[k] += h;
            pm[k] -= h;
            let up = metric_at(&m, pp).unwrap().sym.g_upper;
            let dn = metric_at(&m, pm).unwrap().sym.g_upper;
            for i in 0..4 {
                for j in 0..4 {
                    let fd = (up[i][j] - dn[i][j]) / (2.0 * h);
                    assert!((fd - inv[i][j].grad[k]).abs() < 1e-8, "{i}{j}{k}");
                }
            }
        }
    }
}
