//! JSON record for [`VarietySpec`]; polynomials travel as expression strings.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{intersect, Form, VarietySpec};
use crate::algebra::{default_variable_names, parse_poly, Poly};
use crate::cvec;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRecord {
    ambient_dim: usize,
    base_point: Vec<[f64; 2]>,
    form: FormRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FormRecord {
    Implicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        equations: Vec<String>,
    },
    Graph {
        param_dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        components: Vec<String>,
    },
    Parametric {
        param_dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        map: Vec<String>,
    },
    Finite {
        points: Vec<Vec<[f64; 2]>>,
    },
    Intersection {
        parts: Vec<SpecRecord>,
    },
}

fn param_names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("t{i}")).collect()
}

fn parse_all(exprs: &[String], names: &[String], expected_vars: usize) -> Result<Vec<Poly>> {
    if names.len() != expected_vars {
        return Err(Error::dim(expected_vars, names.len()));
    }
    exprs
        .iter()
        .map(|e| parse_poly(e, names).map_err(Error::from))
        .collect()
}

fn print_all(polys: &[Poly], names: &[String]) -> Vec<String> {
    polys.iter().map(|p| p.to_expr(names)).collect()
}

impl TryFrom<SpecRecord> for VarietySpec {
    type Error = Error;
    fn try_from(r: SpecRecord) -> Result<Self> {
        if r.base_point.len() != r.ambient_dim {
            return Err(Error::dim(r.ambient_dim, r.base_point.len()));
        }
        let x0 = cvec::from_pairs(&r.base_point);
        let m = r.ambient_dim;
        match r.form {
            FormRecord::Implicit { variables, equations } => {
                let names = variables.unwrap_or_else(|| default_variable_names(m));
                VarietySpec::implicit(x0, parse_all(&equations, &names, m)?)
            }
            FormRecord::Graph {
                param_dim,
                variables,
                components,
            } => {
                let names = variables.unwrap_or_else(|| default_variable_names(param_dim));
                VarietySpec::graph(x0, param_dim, parse_all(&components, &names, param_dim)?)
            }
            FormRecord::Parametric {
                param_dim,
                variables,
                map,
            } => {
                let names = variables.unwrap_or_else(|| param_names(param_dim));
                VarietySpec::parametric(x0, param_dim, parse_all(&map, &names, param_dim)?)
            }
            FormRecord::Finite { points } => {
                VarietySpec::finite(x0, points.iter().map(|p| cvec::from_pairs(p)).collect())
            }
            FormRecord::Intersection { parts } => {
                let mut acc: Option<VarietySpec> = None;
                for part in parts {
                    let s = VarietySpec::try_from(part)?;
                    acc = Some(match acc {
                        None => s,
                        Some(a) => intersect(&a, &s)?,
                    });
                }
                acc.ok_or_else(|| Error::invalid("intersection needs at least one part"))
            }
        }
    }
}

impl From<&VarietySpec> for SpecRecord {
    fn from(s: &VarietySpec) -> Self {
        let form = match s.form() {
            Form::Implicit { equations } => FormRecord::Implicit {
                variables: None,
                equations: print_all(equations, &default_variable_names(s.ambient_dim())),
            },
            Form::Graph {
                param_dim,
                components,
            } => FormRecord::Graph {
                param_dim: *param_dim,
                variables: None,
                components: print_all(components, &default_variable_names(*param_dim)),
            },
            Form::Parametric { param_dim, map } => FormRecord::Parametric {
                param_dim: *param_dim,
                variables: None,
                map: print_all(map, &param_names(*param_dim)),
            },
            Form::Finite { points } => FormRecord::Finite {
                points: points.iter().map(|p| cvec::to_pairs(p)).collect(),
            },
            Form::Intersection { parts } => FormRecord::Intersection {
                parts: parts.iter().map(SpecRecord::from).collect(),
            },
        };
        SpecRecord {
            ambient_dim: s.ambient_dim(),
            base_point: cvec::to_pairs(s.base_point()),
            form,
        }
    }
}

impl Serialize for VarietySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRecord::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VarietySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let record = SpecRecord::deserialize(deserializer)?;
        VarietySpec::try_from(record).map_err(serde::de::Error::custom)
    }
}
