//! JSON instance files and report fragments. Rationals always travel as
//! strings (`"a/b"` or `"a"`), never as JSON numbers.
//!
//! Instance layout:
//!
//! ```json
//! {
//!   "x1_size": 2,
//!   "x2_size": 2,
//!   "mu1": ["1/3", "2/3"],
//!   "mu2": ["1/3", "2/3"],
//!   "group_generators": [{"g1": [1, 0], "g2": [1, 0]}],
//!   "omega": [["0", "1/3"], ["1/3", "1/3"]]
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::{format_rational, parse_rational, ArithError, RatMatrix, Rational};
use crate::coupling::{Coupling, CouplingError, GraphicKind, GraphicVerdict, Marginal};
use crate::enumeration::{BirkhoffReport, SupportBoundsReport, SupportUniquenessReport, VertexSet};
use crate::extremality::ExtremalityVerdict;
use crate::symmetry::{ActionGenerator, OrbitDecomposition, SymmetryError};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Rational {
        field: String,
        #[source]
        source: ArithError,
    },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Marginal(#[from] CouplingError),
    #[error(transparent)]
    Generator(#[from] SymmetryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub g1: Vec<usize>,
    pub g2: Vec<usize>,
}

/// On-disk instance. Field order here is the canonical key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub x1_size: usize,
    pub x2_size: usize,
    pub mu1: Vec<String>,
    pub mu2: Vec<String>,
    #[serde(default)]
    pub group_generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<String>>>,
}

/// Parsed and checked instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub mu1: Marginal,
    pub mu2: Marginal,
    pub generators: Vec<ActionGenerator>,
    pub omega: Option<RatMatrix>,
}

fn parse_vec(field: &str, xs: &[String]) -> Result<Vec<Rational>, InstanceError> {
    xs.iter()
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s).map_err(|source| InstanceError::Rational {
                field: format!("{field}[{i}]"),
                source,
            })
        })
        .collect()
}

pub fn rational_strings(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

pub fn matrix_strings(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| rational_strings(m.row(r))).collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_instance(&self) -> Result<Instance, InstanceError> {
        let (n1, n2) = (self.x1_size, self.x2_size);
        if self.mu1.len() != n1 || self.mu2.len() != n2 {
            return Err(InstanceError::Shape(format!(
                "mu1/mu2 have lengths {}/{}, expected x1_size/x2_size {n1}/{n2}",
                self.mu1.len(),
                self.mu2.len()
            )));
        }
        let mu1 = Marginal::new(parse_vec("mu1", &self.mu1)?)?;
        let mu2 = Marginal::new(parse_vec("mu2", &self.mu2)?)?;
        let generators = self
            .group_generators
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if g.g1.len() != n1 || g.g2.len() != n2 {
                    return Err(InstanceError::Shape(format!(
                        "group_generators[{k}] acts on {}/{} points, expected {n1}/{n2}",
                        g.g1.len(),
                        g.g2.len()
                    )));
                }
                Ok(ActionGenerator::new(g.g1.clone(), g.g2.clone())?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let omega = match &self.omega {
            None => None,
            Some(rows) => {
                if rows.len() != n1 || rows.iter().any(|r| r.len() != n2) {
                    return Err(InstanceError::Shape(format!("omega must be a {n1}x{n2} array")));
                }
                let data = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| parse_vec(&format!("omega[{i}]"), r))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(RatMatrix::from_rows(data).map_err(|e| InstanceError::Shape(e.to_string()))?)
            }
        };
        Ok(Instance {
            mu1,
            mu2,
            generators,
            omega,
        })
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            x1_size: inst.mu1.len(),
            x2_size: inst.mu2.len(),
            mu1: rational_strings(inst.mu1.masses()),
            mu2: rational_strings(inst.mu2.masses()),
            group_generators: inst
                .generators
                .iter()
                .map(|g| GeneratorSpec {
                    g1: g.perm1.clone(),
                    g2: g.perm2.clone(),
                })
                .collect(),
            omega: inst.omega.as_ref().map(matrix_strings),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

impl Instance {
    pub fn trivial_with_coupling(c: &Coupling) -> Self {
        let (mu1, mu2) = crate::coupling::marginals(c);
        Self {
            mu1,
            mu2,
            generators: Vec::new(),
            omega: Some(c.matrix().clone()),
        }
    }

    /// Compact canonical JSON: reduced rationals, fixed key order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&InstanceFile::from_instance(self)).expect("serializable")
    }

    /// Hex SHA-256 of [`Instance::canonical_json`].
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical_json().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn coupling_json(c: &Coupling) -> Value {
    json!(matrix_strings(c.matrix()))
}

pub fn orbits_json(d: &OrbitDecomposition) -> Value {
    json!({
        "m1": d.m1(),
        "m2": d.m2(),
        "m12": d.m12(),
        "orbits1": d.orbits1(),
        "orbits2": d.orbits2(),
        "orbits12": d.orbits12().iter().map(|o| o.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn graphic_json(g: &GraphicVerdict) -> Value {
    let kind = match g.kind {
        GraphicKind::GraphOfMapForward => "forward",
        GraphicKind::GraphOfMapBackward => "backward",
        GraphicKind::Both => "both",
        GraphicKind::Neither => "neither",
    };
    json!({ "kind": kind, "map": g.map })
}

/// `verified` is the outcome of re-checking the certificate independently.
pub fn verdict_json(v: &ExtremalityVerdict, verified: Option<bool>) -> Value {
    let certificate = v.certificate.as_ref().map(|c| {
        json!({
            "zeta": rational_strings(&c.zeta),
            "epsilon": format_rational(&c.epsilon),
            "omega_plus": coupling_json(&c.omega_plus),
            "omega_minus": coupling_json(&c.omega_minus),
            "verified": verified,
        })
    });
    json!({
        "extreme": v.extreme,
        "null_dim": v.null_dim,
        "support_orbits": v.support_orbits,
        "certificate": certificate,
    })
}

pub fn vertex_set_json(vs: &VertexSet) -> Value {
    let vertices: Vec<Value> = vs
        .vertices
        .iter()
        .map(|v| {
            json!({
                "support_orbits": v.support,
                "orbit_masses": rational_strings(&v.orbit_masses),
                "n_orbits": v.orbit_count(),
                "omega": coupling_json(&v.coupling),
            })
        })
        .collect();
    json!({
        "count": vs.len(),
        "subsets_examined": vs.subsets_examined,
        "vertices": vertices,
    })
}

pub fn support_bounds_json(r: &SupportBoundsReport) -> Value {
    json!({
        "lower": r.lower,
        "upper": r.upper,
        "orbit_counts": r.orbit_counts,
        "all_within": r.all_within,
        "vertex_count": r.vertex_count,
        "count_bound": r.count_bound.to_string(),
        "count_within": r.count_within,
        "passed": r.all_within && r.count_within,
    })
}

pub fn support_uniqueness_json(r: &SupportUniquenessReport) -> Value {
    json!({
        "containments": r.containments,
        "passed": r.passed(),
    })
}

pub fn birkhoff_json(r: &BirkhoffReport) -> Value {
    json!({
        "m": r.m,
        "count": r.count,
        "expected_count": r.expected_count.to_string(),
        "all_permutation_type": r.all_permutation_type,
        "missing_permutations": r.missing,
        "passed": r.passed(),
        "vertices": vertex_set_json(&r.vertices)["vertices"],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use proptest::prelude::*;

    const SAMPLE: &str = r#"{
        "x1_size": 2, "x2_size": 2,
        "mu1": ["2/6", "2/3"], "mu2": ["1/3", "4/6"],
        "omega": [["0", "1/3"], ["2/6", "1/3"]]
    }"#;

    #[test]
    fn parses_and_reduces() {
        let inst = InstanceFile::parse(SAMPLE).unwrap().to_instance().unwrap();
        assert_eq!(inst.mu1.masses(), &[ratio(1, 3), ratio(2, 3)]);
        assert!(inst.generators.is_empty());
        assert_eq!(
            inst.canonical_json(),
            r#"{"x1_size":2,"x2_size":2,"mu1":["1/3","2/3"],"mu2":["1/3","2/3"],"group_generators":[],"omega":[["0","1/3"],["1/3","1/3"]]}"#
        );
        assert_eq!(inst.digest().len(), 64);
    }

    #[test]
    fn rejects_malformed_instances() {
        let cases = [
            (r#"{"x1_size": 2}"#, "missing field"),
            (
                r#"{"x1_size":1,"x2_size":1,"mu1":["1"],"mu2":["1"],"extra":0}"#,
                "unknown field",
            ),
            (r#"{"x1_size":1,"x2_size":1,"mu1":[1],"mu2":["1"]}"#, "invalid type"),
        ];
        for (text, needle) in cases {
            let err = InstanceFile::parse(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err}");
        }
        let bad = [
            r#"{"x1_size":2,"x2_size":1,"mu1":["1"],"mu2":["1"]}"#,
            r#"{"x1_size":1,"x2_size":1,"mu1":["1/0"],"mu2":["1"]}"#,
            r#"{"x1_size":1,"x2_size":1,"mu1":["1/2"],"mu2":["1"]}"#,
            r#"{"x1_size":2,"x2_size":2,"mu1":["1/2","1/2"],"mu2":["1/2","1/2"],"group_generators":[{"g1":[0,0],"g2":[0,1]}]}"#,
            r#"{"x1_size":2,"x2_size":2,"mu1":["1/2","1/2"],"mu2":["1/2","1/2"],"group_generators":[{"g1":[0],"g2":[0,1]}]}"#,
            r#"{"x1_size":1,"x2_size":1,"mu1":["1"],"mu2":["1"],"omega":[["1","0"]]}"#,
            r#"{"x1_size":1,"x2_size":1,"mu1":["1"],"mu2":["1"],"omega":[["x"]]}"#,
        ];
        for text in bad {
            assert!(InstanceFile::parse(text).unwrap().to_instance().is_err(), "{text}");
        }
    }

    #[test]
    fn rational_error_names_the_field() {
        let text = r#"{"x1_size":1,"x2_size":1,"mu1":["1"],"mu2":["1"],"omega":[["a/b"]]}"#;
        let err = InstanceFile::parse(text).unwrap().to_instance().unwrap_err();
        assert!(err.to_string().starts_with("omega[0][0]"), "{err}");
    }

    fn instance() -> impl Strategy<Value = Instance> {
        (
            1usize..4,
            1usize..4,
            any::<bool>(),
            proptest::collection::vec(1i64..9, 6),
        )
            .prop_map(|(n1, n2, with_omega, w)| {
                let mk = |n: usize, off: usize| {
                    let total: i64 = w[off..off + n].iter().sum();
                    Marginal::new(w[off..off + n].iter().map(|&x| ratio(x, total)).collect()).unwrap()
                };
                let mu1 = mk(n1, 0);
                let mu2 = mk(n2, 3);
                let omega = with_omega.then(|| {
                    let data = mu1
                        .masses()
                        .iter()
                        .flat_map(|a| mu2.masses().iter().map(move |b| a * b))
                        .collect();
                    RatMatrix::new(n1, n2, data).unwrap()
                });
                let generators = vec![ActionGenerator::identity(n1, n2)];
                Instance {
                    mu1,
                    mu2,
                    generators,
                    omega,
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_parse_roundtrip(inst in instance()) {
            let text = InstanceFile::from_instance(&inst).to_json_pretty();
            let back = InstanceFile::parse(&text).unwrap().to_instance().unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(back.canonical_json(), inst.canonical_json());
        }
    }
}
