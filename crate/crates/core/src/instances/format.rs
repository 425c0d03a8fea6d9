//! JSON instance files.
//!
//! ```json
//! {"format_version": 1, "type": "star", "m": 2,
//!  "root_costs": [1, 2], "leaf_costs": [2, "inf"],
//!  "objective": {"kind": "lp_min", "p": 2}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{Edge, GraphInstance, HyperstarInstance, SchedulingInstance, StarInstance};
use crate::objective::Objective;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    u: usize,
    v: usize,
    cost_u: Cost,
    cost_v: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Body {
    Star {
        m: usize,
        root_costs: Vec<Cost>,
        leaf_costs: Vec<Cost>,
    },
    Hyperstar {
        k: usize,
        m: usize,
        root_costs: Vec<Vec<Cost>>,
        leaf_costs: Vec<Cost>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambdas: Option<Vec<f64>>,
    },
    Graph {
        n: usize,
        #[serde(default)]
        multigraph: bool,
        edges: Vec<EdgeRecord>,
    },
}

#[derive(Serialize, Deserialize)]
struct Document {
    format_version: u32,
    #[serde(flatten)]
    body: Body,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<Objective>,
}

/// An instance together with the objective stored next to it, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub instance: SchedulingInstance,
    pub objective: Option<Objective>,
}

fn semantic(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

fn from_serde(e: serde_json::Error) -> Error {
    let text = e.to_string();
    let message = match text.rfind(" at line ") {
        Some(cut) if e.line() > 0 => text[..cut].to_string(),
        _ => text,
    };
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message,
    }
}

fn check_len(what: &str, declared: usize, actual: usize) -> Result<()> {
    if declared != actual {
        return Err(semantic(format!("`{what}` declares {declared} but the data has {actual}")));
    }
    Ok(())
}

impl InstanceFile {
    pub fn new(instance: SchedulingInstance, objective: Option<Objective>) -> Self {
        InstanceFile { instance, objective }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(from_serde)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(semantic(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        let wrap = |e: Error| semantic(e.to_string());
        let instance: SchedulingInstance = match doc.body {
            Body::Star { m, root_costs, leaf_costs } => {
                check_len("m", m, root_costs.len())?;
                StarInstance::new(root_costs, leaf_costs).map_err(wrap)?.into()
            }
            Body::Hyperstar {
                k,
                m,
                root_costs,
                leaf_costs,
                lambdas,
            } => {
                check_len("k", k, root_costs.len())?;
                check_len("m", m, leaf_costs.len())?;
                let lambdas = lambdas.unwrap_or_else(|| vec![1.0; k]);
                HyperstarInstance::with_lambdas(root_costs, leaf_costs, lambdas).map_err(wrap)?.into()
            }
            Body::Graph { n, multigraph, edges } => {
                let edges = edges
                    .into_iter()
                    .map(|e| Edge::new(e.u, e.v, e.cost_u, e.cost_v))
                    .collect();
                GraphInstance::new(n, edges, multigraph).map_err(wrap)?.into()
            }
        };
        let objective = doc.objective.map(|o| o.validate().map_err(wrap)).transpose()?;
        Ok(InstanceFile { instance, objective })
    }

    pub fn to_json(&self) -> String {
        let body = match &self.instance {
            SchedulingInstance::Star(s) => Body::Star {
                m: s.m(),
                root_costs: s.root_costs().to_vec(),
                leaf_costs: s.leaf_costs().to_vec(),
            },
            SchedulingInstance::Hyperstar(h) => Body::Hyperstar {
                k: h.k(),
                m: h.m(),
                root_costs: h.root_costs().to_vec(),
                leaf_costs: h.leaf_costs().to_vec(),
                lambdas: h.lambdas().iter().any(|&l| l != 1.0).then(|| h.lambdas().to_vec()),
            },
            SchedulingInstance::Graph(g) => Body::Graph {
                n: g.n(),
                multigraph: g.is_multigraph(),
                edges: g
                    .edges()
                    .iter()
                    .map(|e| EdgeRecord {
                        u: e.u,
                        v: e.v,
                        cost_u: e.cost_u,
                        cost_v: e.cost_v,
                    })
                    .collect(),
            },
        };
        let doc = Document {
            format_version: FORMAT_VERSION,
            body,
            objective: self.objective,
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("instances always serialize");
        out.push('\n');
        out
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| semantic(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| semantic(format!("cannot write {}: {e}", path.display())))
    }
}

/// Parses `{"assignment": [...]}`.
pub fn parse_allocation(text: &str) -> Result<Allocation> {
    serde_json::from_str(text).map_err(from_serde)
}

pub fn allocation_to_json(alloc: &Allocation) -> String {
    serde_json::to_string(alloc).expect("allocations always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_round_trip_with_infinity() {
        let s = StarInstance::from_f64(&[1.0, 2.5], &[f64::INFINITY, 1.0]).unwrap();
        let f = InstanceFile::new(s.into(), Some(Objective::LpMin(0.5)));
        let text = f.to_json();
        assert!(text.contains("\"inf\""));
        assert!(text.contains("\"lp_min\""));
        assert_eq!(InstanceFile::from_json(&text).unwrap(), f);
    }

    #[test]
    fn hyperstar_and_graph_round_trip() {
        let h = HyperstarInstance::with_lambdas(
            vec![vec![Cost::of(1.0)], vec![Cost::of(2.0)]],
            vec![Cost::of(3.0)],
            vec![1.0, 0.5],
        )
        .unwrap();
        let f = InstanceFile::new(h.into(), None);
        assert_eq!(InstanceFile::from_json(&f.to_json()).unwrap(), f);

        let g = GraphInstance::new(
            2,
            vec![Edge::new(0, 1, Cost::of(1.0), Cost::of(2.0)), Edge::new(1, 0, Cost::of(3.0), Cost::INFINITY)],
            true,
        )
        .unwrap();
        let f = InstanceFile::new(g.into(), Some(Objective::Makespan));
        assert_eq!(InstanceFile::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn errors_carry_locations() {
        let text = "{\n  \"format_version\": 1,\n  \"type\": \"star\",\n  \"m\": 1,\n  \"root_costs\": [1,\n";
        match InstanceFile::from_json(text) {
            Err(Error::Parse { line, .. }) => assert!(line >= 5),
            other => panic!("{other:?}"),
        }
        let bad_cost = r#"{"format_version": 1, "type": "star", "m": 1, "root_costs": [-1], "leaf_costs": [1]}"#;
        assert!(matches!(InstanceFile::from_json(bad_cost), Err(Error::Parse { .. })));
        let mismatch = r#"{"format_version": 1, "type": "star", "m": 2, "root_costs": [1], "leaf_costs": [1]}"#;
        assert!(matches!(InstanceFile::from_json(mismatch), Err(Error::Parse { .. })));
        let version = r#"{"format_version": 2, "type": "star", "m": 1, "root_costs": [1], "leaf_costs": [1]}"#;
        assert!(matches!(InstanceFile::from_json(version), Err(Error::Parse { .. })));
    }

    #[test]
    fn allocations() {
        let a = parse_allocation(r#"{"assignment": [0, 2]}"#).unwrap();
        assert_eq!(a.assignment, vec![0, 2]);
        assert_eq!(allocation_to_json(&a), r#"{"assignment":[0,2]}"#);
    }
}
