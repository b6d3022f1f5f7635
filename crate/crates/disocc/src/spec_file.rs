//! JSON spec files for spaces and events.
//!
//! A space file looks like
//! `{"factors":[{"elements":["0","1"],"order":[["0","1"]],"weights":{"0":"1/2","1":"1/2"}}]}`
//! and an events file is either a JSON array of event entries or an object
//! with an `"events"` array. Event coordinates are 1-based. A single object
//! carrying both `"factors"` and `"events"` is accepted as either file, which
//! is how counterexamples are written out.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use disocc_core::events::{Event, EventDef};
use disocc_core::rational::{format_rational, parse_rational};
use disocc_core::space::{Factor, Outcome, ProductSpace};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("{source_name}: line {line}, column {column}: {message}")]
    Syntax { source_name: String, line: usize, column: usize, message: String },
    #[error("{source_name}: {path}: {message}")]
    Semantic { source_name: String, path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    pub weights: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub factors: Vec<FactorSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EventSpec {
    Cylinder { coord: usize, values: Vec<String> },
    Upset { generators: Vec<Vec<String>> },
    Downset { generators: Vec<Vec<String>> },
    Explicit { outcomes: Vec<Vec<String>> },
    Not { args: Vec<EventSpec> },
    And { args: Vec<EventSpec> },
    Or { args: Vec<EventSpec> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum EventsFile {
    List(Vec<EventSpec>),
    Object { events: Vec<EventSpec> },
}

/// A space together with a family of events on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub factors: Vec<FactorSpec>,
    pub events: Vec<EventSpec>,
}

fn syntax(source_name: &str, e: serde_json::Error) -> SpecError {
    SpecError::Syntax {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, SpecError> {
    std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })
}

impl SpaceSpec {
    pub fn parse(text: &str, source_name: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| syntax(source_name, e))
    }

    /// Builds and validates the space; every factor must satisfy the order
    /// and weight axioms.
    pub fn build(&self, source_name: &str) -> Result<Arc<ProductSpace>, SpecError> {
        let semantic = |path: String, message: String| SpecError::Semantic {
            source_name: source_name.to_string(),
            path,
            message,
        };
        if self.factors.is_empty() {
            return Err(semantic("factors".into(), "a space needs at least one factor".into()));
        }
        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, f) in self.factors.iter().enumerate() {
            let at = |field: &str| format!("factors[{i}].{field}");
            let index = |label: &str, field: &str| {
                f.elements
                    .iter()
                    .position(|e| e == label)
                    .ok_or_else(|| semantic(at(field), format!("unknown element `{label}`")))
            };
            let order = f
                .order
                .iter()
                .map(|(a, b)| Ok((index(a, "order")?, index(b, "order")?)))
                .collect::<Result<Vec<_>, SpecError>>()?;
            if let Some(extra) = f.weights.keys().find(|k| !f.elements.contains(k)) {
                return Err(semantic(at("weights"), format!("weight given for unknown element `{extra}`")));
            }
            let weights = f
                .elements
                .iter()
                .map(|e| {
                    let text = f
                        .weights
                        .get(e)
                        .ok_or_else(|| semantic(at("weights"), format!("missing weight for element `{e}`")))?;
                    parse_rational(text).map_err(|err| semantic(at("weights"), err.to_string()))
                })
                .collect::<Result<Vec<_>, SpecError>>()?;
            let factor = Factor::new(f.elements.clone(), &order, weights)
                .map_err(|err| semantic(format!("factors[{i}]"), err.to_string()))?;
            let report = factor.validate();
            if !report.is_valid() {
                return Err(semantic(format!("factors[{i}]"), report.to_string()));
            }
            factors.push(factor);
        }
        let space = ProductSpace::new(factors).map_err(|err| semantic("factors".into(), err.to_string()))?;
        Ok(Arc::new(space))
    }

    pub fn load(path: &Path) -> Result<Arc<ProductSpace>, SpecError> {
        let name = path.display().to_string();
        Self::parse(&read(path)?, &name)?.build(&name)
    }

    /// The spec of an existing space. Orders are written as covering pairs.
    pub fn from_space(space: &ProductSpace) -> Self {
        let factors = space
            .factors()
            .iter()
            .map(|f| {
                let m = f.len();
                let covers = |a: usize, b: usize| f.lt(a, b) && !(0..m).any(|c| f.lt(a, c) && f.lt(c, b));
                let order = (0..m)
                    .flat_map(|a| (0..m).map(move |b| (a, b)))
                    .filter(|&(a, b)| covers(a, b))
                    .map(|(a, b)| (f.label(a).to_string(), f.label(b).to_string()))
                    .collect();
                let weights = (0..m).map(|i| (f.label(i).to_string(), format_rational(f.weight(i)))).collect();
                FactorSpec { elements: f.labels().to_vec(), order, weights }
            })
            .collect();
        SpaceSpec { factors }
    }
}

fn outcome_labels(space: &ProductSpace, w: &Outcome) -> Vec<String> {
    w.coords().iter().enumerate().map(|(i, &v)| space.factor(i).label(v).to_string()).collect()
}

impl EventSpec {
    pub fn parse_list(text: &str, source_name: &str) -> Result<Vec<Self>, SpecError> {
        match serde_json::from_str::<EventsFile>(text) {
            Ok(EventsFile::List(v)) | Ok(EventsFile::Object { events: v }) => Ok(v),
            Err(_) => {
                // The untagged wrapper hides the position; re-parse each shape
                // to report the most useful syntax error.
                let value: serde_json::Value = serde_json::from_str(text).map_err(|e| syntax(source_name, e))?;
                let inner = if value.is_array() { value } else { value.get("events").cloned().unwrap_or(value) };
                serde_json::from_value::<Vec<EventSpec>>(inner)
                    .map_err(|e| SpecError::Semantic {
                        source_name: source_name.to_string(),
                        path: "events".into(),
                        message: e.to_string(),
                    })
            }
        }
    }

    pub fn load_list(path: &Path, space: &Arc<ProductSpace>) -> Result<Vec<Event>, SpecError> {
        let name = path.display().to_string();
        let specs = Self::parse_list(&read(path)?, &name)?;
        build_events(&specs, space, &name)
    }

    /// Builds the event; `path` names the entry in error messages.
    pub fn build(&self, space: &Arc<ProductSpace>, source_name: &str, path: &str) -> Result<Event, SpecError> {
        let semantic = |message: String| SpecError::Semantic {
            source_name: source_name.to_string(),
            path: path.to_string(),
            message,
        };
        let outcome = |labels: &[String]| -> Result<Outcome, SpecError> {
            if labels.len() != space.dim() {
                return Err(semantic(format!(
                    "outcome has {} coordinates, the space has {}",
                    labels.len(),
                    space.dim()
                )));
            }
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    space
                        .factor(i)
                        .index_of(l)
                        .ok_or_else(|| semantic(format!("unknown element `{l}` at coordinate {}", i + 1)))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Outcome::new)
        };
        let outcomes = |list: &[Vec<String>]| list.iter().map(|o| outcome(o)).collect::<Result<Vec<_>, _>>();
        let args = |list: &[EventSpec]| {
            list.iter()
                .enumerate()
                .map(|(j, a)| a.build(space, source_name, &format!("{path}.args[{j}]")))
                .collect::<Result<Vec<_>, _>>()
        };
        let core = |r: disocc_core::Result<Event>| r.map_err(|e| semantic(e.to_string()));
        match self {
            EventSpec::Cylinder { coord, values } => {
                if *coord == 0 || *coord > space.dim() {
                    return Err(semantic(format!("coord {coord} is outside 1..={}", space.dim())));
                }
                let factor = space.factor(coord - 1);
                let values = values
                    .iter()
                    .map(|l| factor.index_of(l).ok_or_else(|| semantic(format!("unknown element `{l}` at coordinate {coord}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                core(Event::cylinder(space.clone(), coord - 1, values))
            }
            EventSpec::Upset { generators } => core(Event::up_set(space.clone(), outcomes(generators)?)),
            EventSpec::Downset { generators } => core(Event::down_set(space.clone(), outcomes(generators)?)),
            EventSpec::Explicit { outcomes: list } => core(Event::explicit(space.clone(), outcomes(list)?)),
            EventSpec::Not { args: list } => {
                let [inner] = args(list)?.try_into().map_err(|_| semantic("`not` takes exactly one argument".into()))?;
                core(inner.complement())
            }
            EventSpec::And { args: list } | EventSpec::Or { args: list } => {
                if list.is_empty() {
                    return Err(semantic("boolean combination needs at least one argument".into()));
                }
                let built = args(list)?;
                if matches!(self, EventSpec::And { .. }) {
                    core(Event::intersection(&built))
                } else {
                    core(Event::union(&built))
                }
            }
        }
    }

    /// The spec of an existing event, preserving its definition form where
    /// possible and listing its members otherwise.
    pub fn from_event(event: &Event) -> Self {
        let space = event.space();
        Self::from_def(space, event.definition()).unwrap_or_else(|| {
            let outcomes = event
                .members()
                .ones()
                .map(|i| outcome_labels(space, &space.outcome(i)))
                .collect();
            EventSpec::Explicit { outcomes }
        })
    }

    fn from_def(space: &ProductSpace, def: &EventDef) -> Option<Self> {
        let labels = |list: &[Outcome]| list.iter().map(|w| outcome_labels(space, w)).collect();
        let many = |defs: &[EventDef]| defs.iter().map(|d| Self::from_def(space, d)).collect::<Option<Vec<_>>>();
        Some(match def {
            EventDef::Explicit(list) => EventSpec::Explicit { outcomes: labels(list) },
            EventDef::UpSet(list) => EventSpec::Upset { generators: labels(list) },
            EventDef::DownSet(list) => EventSpec::Downset { generators: labels(list) },
            EventDef::Cylinder { coord, values } => EventSpec::Cylinder {
                coord: coord + 1,
                values: values.iter().map(|&v| space.factor(*coord).label(v).to_string()).collect(),
            },
            EventDef::Not(inner) => EventSpec::Not { args: vec![Self::from_def(space, inner)?] },
            EventDef::And(defs) => EventSpec::And { args: many(defs)? },
            EventDef::Or(defs) => EventSpec::Or { args: many(defs)? },
            EventDef::Members => return None,
        })
    }
}

pub fn build_events(specs: &[EventSpec], space: &Arc<ProductSpace>, source_name: &str) -> Result<Vec<Event>, SpecError> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.build(space, source_name, &format!("events[{i}]")))
        .collect()
}

impl InstanceSpec {
    pub fn from_events(space: &ProductSpace, events: &[Event]) -> Self {
        InstanceSpec {
            factors: SpaceSpec::from_space(space).factors,
            events: events.iter().map(EventSpec::from_event).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance specs always serialize")
    }

    pub fn build(&self, source_name: &str) -> Result<(Arc<ProductSpace>, Vec<Event>), SpecError> {
        let space = SpaceSpec { factors: self.factors.clone() }.build(source_name)?;
        let events = build_events(&self.events, &space, source_name)?;
        Ok((space, events))
    }
}
