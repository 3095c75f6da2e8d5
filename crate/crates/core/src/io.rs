//! JSON documents for instances, grid data and couplings.
//!
//! Rational values are written as JSON numbers when they have a terminating
//! decimal expansion and as `"p/q"` strings otherwise, so every rational
//! instance round-trips exactly.
//!
//! ```json
//! { "dimension": 1,
//!   "domain": { "kind": "torus", "side": 4 },
//!   "atoms": [ { "x": [0.5], "mass": 1 } ],
//!   "grid": { "shape": [8], "values": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5] } }
//! ```
//!
//! Instance `grid.values` are cell masses, row-major with the last axis
//! fastest.

use std::path::Path;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exact::Exact;
use crate::measure::{Atom, AtomicMeasure, Domain, DomainKind, Grid, GridField, GridMeasure, ScalarField};
use crate::transport::{Coupling, CouplingEntry};
use crate::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainDoc {
    pub kind: DomainKind,
    pub side: Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomDoc {
    pub x: Vec<Exact>,
    pub mass: Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub dimension: usize,
    pub domain: DomainDoc,
    #[serde(default)]
    pub atoms: Vec<AtomDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDoc>,
}

/// A scalar grid function, e.g. a potential `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarDoc {
    pub dimension: usize,
    pub domain: DomainDoc,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub dimension: usize,
    pub domain: DomainDoc,
    pub shape: Vec<usize>,
    pub components: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingDoc {
    pub source: InstanceDoc,
    pub target: InstanceDoc,
    /// `[source index, target index, weight]`.
    pub entries: Vec<(usize, usize, Exact)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates_probed: Option<usize>,
}

/// An instance file: atoms, plus an optional grid measure on the same domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub measure: AtomicMeasure,
    pub grid: Option<GridMeasure>,
}

fn domain_doc(domain: &Domain) -> DomainDoc {
    DomainDoc {
        kind: domain.kind(),
        side: Exact(domain.side().clone()),
    }
}

fn domain_from(dimension: usize, doc: &DomainDoc) -> Result<Domain> {
    Domain::new(dimension, doc.kind, doc.side.0.clone())
}

fn grid_from(domain: &Domain, shape: &[usize], len: usize) -> Result<Grid> {
    let grid = Grid::new(domain.clone(), shape.to_vec())?;
    if grid.len() != len {
        return Err(invalid(
            "values",
            format!("shape {shape:?} needs {} values, found {len}", grid.len()),
        ));
    }
    Ok(grid)
}

pub fn instance_doc(nu: &AtomicMeasure, grid: Option<&GridMeasure>) -> InstanceDoc {
    InstanceDoc {
        dimension: nu.dim(),
        domain: domain_doc(nu.domain()),
        atoms: nu
            .atoms()
            .iter()
            .map(|a| AtomDoc {
                x: a.position.iter().cloned().map(Exact).collect(),
                mass: Exact(a.mass.clone()),
            })
            .collect(),
        grid: grid.map(|g| GridDoc {
            shape: g.grid().shape().to_vec(),
            values: g.masses().to_vec(),
        }),
    }
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<Instance> {
        let domain = domain_from(self.dimension, &self.domain)?;
        let atoms = self
            .atoms
            .into_iter()
            .map(|a| Atom::new(a.x.into_iter().map(|e| e.0).collect(), a.mass.0))
            .collect();
        let measure = AtomicMeasure::new(domain.clone(), atoms)?;
        let grid = match self.grid {
            Some(g) => {
                let grid = grid_from(&domain, &g.shape, g.values.len())?;
                Some(GridMeasure::new(grid, g.values)?)
            }
            None => None,
        };
        Ok(Instance { measure, grid })
    }
}

pub fn scalar_doc(u: &ScalarField) -> ScalarDoc {
    let grid = u.grid();
    ScalarDoc {
        dimension: grid.dim(),
        domain: domain_doc(grid.domain()),
        shape: grid.shape().to_vec(),
        values: u.values().to_vec(),
    }
}

impl ScalarDoc {
    pub fn into_field(self) -> Result<ScalarField> {
        let domain = domain_from(self.dimension, &self.domain)?;
        let grid = grid_from(&domain, &self.shape, self.values.len())?;
        ScalarField::new(grid, self.values)
    }
}

pub fn field_doc(v: &GridField) -> FieldDoc {
    let grid = v.grid();
    FieldDoc {
        dimension: grid.dim(),
        domain: domain_doc(grid.domain()),
        shape: grid.shape().to_vec(),
        components: v.components().to_vec(),
    }
}

impl FieldDoc {
    pub fn into_field(self) -> Result<GridField> {
        let domain = domain_from(self.dimension, &self.domain)?;
        let len = self.components.first().map_or(0, Vec::len);
        let grid = grid_from(&domain, &self.shape, len)?;
        GridField::new(grid, self.components)
    }
}

pub fn coupling_doc(gamma: &Coupling, value: Option<Exact>, candidates_probed: Option<usize>) -> CouplingDoc {
    CouplingDoc {
        source: instance_doc(&gamma.source, None),
        target: instance_doc(&gamma.target, None),
        entries: gamma
            .entries
            .iter()
            .map(|e| (e.source, e.target, Exact(e.weight.clone())))
            .collect(),
        value,
        candidates_probed,
    }
}

impl CouplingDoc {
    pub fn into_coupling(self) -> Result<Coupling> {
        let source = self.source.into_instance()?.measure;
        let target = self.target.into_instance()?.measure;
        source.domain().ensure_same(target.domain())?;
        let entries = self
            .entries
            .into_iter()
            .map(|(i, j, w)| {
                if i >= source.len() || j >= target.len() {
                    return Err(invalid("entries", format!("pair ({i}, {j}) out of range")));
                }
                Ok(CouplingEntry {
                    source: i,
                    target: j,
                    weight: w.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Coupling {
            source,
            target,
            entries,
        })
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)?)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let mut text = to_json(doc)?;
    text.push('\n');
    std::fs::write(path, text).map_err(Error::from)
}

/// Reads an instance file.
pub fn read_instance(path: &Path) -> Result<Instance> {
    read_json::<InstanceDoc>(path)?.into_instance()
}

/// Finite `f64` view of an exact value, for reports.
pub fn approx(e: &Exact) -> f64 {
    e.0.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};

    fn sample() -> AtomicMeasure {
        let d = Domain::torus(2, integer(3)).unwrap();
        AtomicMeasure::new(
            d,
            vec![
                Atom::new(vec![rational(1, 3), rational(5, 2)], rational(2, 7)),
                Atom::new(vec![integer(0), rational(3, 10)], integer(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn instance_round_trip_is_exact() {
        let nu = sample();
        let text = to_json(&instance_doc(&nu, None)).unwrap();
        assert!(text.contains("\"1/3\"") && text.contains("0.3"));
        let back = from_json::<InstanceDoc>(&text).unwrap().into_instance().unwrap();
        assert_eq!(back.measure, nu);
        assert!(back.grid.is_none());
    }

    #[test]
    fn grid_payload_round_trip() {
        let nu = sample();
        let g = Grid::cubic(nu.domain().clone(), 4).unwrap();
        let gm = GridMeasure::lebesgue(g);
        let text = to_json(&instance_doc(&nu, Some(&gm))).unwrap();
        let back = from_json::<InstanceDoc>(&text).unwrap().into_instance().unwrap();
        assert_eq!(back.grid.unwrap().masses(), gm.masses());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let text = r#"{"dimension":1,"domain":{"kind":"torus","side":2},"atoms":[],
            "grid":{"shape":[4],"values":[1,2,3]}}"#;
        assert!(from_json::<InstanceDoc>(text).unwrap().into_instance().is_err());
    }

    #[test]
    fn coupling_round_trip() {
        let gamma = Coupling::identity(&sample());
        let doc = coupling_doc(&gamma, Some(Exact(integer(0))), Some(1));
        let back = from_json::<CouplingDoc>(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back.value, Some(Exact(integer(0))));
        assert_eq!(back.into_coupling().unwrap(), gamma);
    }

    #[test]
    fn field_round_trip() {
        let g = Grid::cubic(Domain::torus(2, integer(2)).unwrap(), 4).unwrap();
        let v = GridField::from_fn(g, |x| vec![x[0], -x[1]]);
        let back = from_json::<FieldDoc>(&to_json(&field_doc(&v)).unwrap()).unwrap().into_field().unwrap();
        assert_eq!(back.components(), v.components());
    }
}
