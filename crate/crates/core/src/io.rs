//! JSON model files and machine-readable reports (schema version "1").

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::casestudy::{LiebOutcome, SymmetryBreaking};
use crate::error::{Error, Result};
use crate::lattice::{LinkSpec, ModelGraph, SiteSpec, Topology};
use crate::scalar::Real;
use crate::spinor::LinkRotation;
use crate::symmetry::SymmetryReport;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteEntry {
    pub mu: f64,
    #[serde(rename = "U")]
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub i: usize,
    pub j: usize,
    pub t: f64,
    pub theta: f64,
    pub axis: [f64; 3],
}

/// On-disk model description. Indices are 0-based; rotations are
/// axis-angle `exp(i θ/2 n̂·σ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: String,
    pub sites: Vec<SiteEntry>,
    pub links: Vec<LinkEntry>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::validation(
                "format_version",
                format!(
                    "unsupported version {:?}, expected {FORMAT_VERSION:?}",
                    file.format_version
                ),
            ));
        }
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("model file serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_graph<T: Real>(&self) -> Result<ModelGraph<T>> {
        let conv = |x: f64| T::from_f64(x).expect("f64 converts to scalar");
        let sites = self
            .sites
            .iter()
            .map(|s| SiteSpec::new(conv(s.mu), conv(s.u)))
            .collect();
        let mut links = Vec::with_capacity(self.links.len());
        for (k, l) in self.links.iter().enumerate() {
            let rot = LinkRotation::new(conv(l.theta), l.axis.map(conv)).map_err(|e| match e {
                Error::Validation { field, reason } => Error::validation(format!("links[{k}].{field}"), reason),
                other => other,
            })?;
            links.push(LinkSpec::new(l.i, l.j, conv(l.t), rot));
        }
        ModelGraph::new(sites, links)
    }

    /// Model file for a graph whose links are all SU(2) rotations.
    pub fn from_graph<T: Real>(g: &ModelGraph<T>) -> Result<Self> {
        let f = |x: T| x.to_f64().expect("scalar converts to f64");
        let sites = g.sites().iter().map(|s| SiteEntry { mu: f(s.mu), u: f(s.u) }).collect();
        let mut links = Vec::with_capacity(g.links().len());
        for (k, l) in g.links().iter().enumerate() {
            let rot = l
                .axis_angle()
                .ok_or_else(|| Error::validation(format!("links[{k}]"), "link matrix has no axis-angle form"))?;
            links.push(LinkEntry {
                i: l.i,
                j: l.j,
                t: f(l.t),
                theta: f(rot.theta),
                axis: rot.axis.map(f),
            });
        }
        Ok(Self {
            format_version: FORMAT_VERSION.to_string(),
            sites,
            links,
        })
    }
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn num<T: Real>(x: T) -> Value {
    json!(round15(x.to_f64().expect("scalar converts to f64")))
}

pub fn topology_name(t: Topology) -> &'static str {
    match t {
        Topology::SimplyConnected => "simply-connected",
        Topology::MultiConnected => "multi-connected",
    }
}

/// Serializes a symmetry report: sorted keys, 15-digit floats.
pub fn report_json<T: Real>(model: &ModelFile, report: &SymmetryReport<T>) -> Value {
    let norms: BTreeMap<&String, BTreeMap<&String, Value>> = report
        .commutator_norms
        .iter()
        .map(|(op, row)| (op, row.iter().map(|(t, &v)| (t, num(v))).collect()))
        .collect();
    json!({
        "schema_version": FORMAT_VERSION,
        "model_sha256": model.digest(),
        "n_sites": report.n_sites,
        "n_particles": report.n_particles,
        "dim": report.dim,
        "topology": topology_name(report.topology),
        "trivializable": report.trivializable,
        "kramers_ok": report.kramers_ok,
        "algebra_residual": report.algebra_residual.map(num),
        "casimir_gap": report.casimir_gap.map(num),
        "single_particle_spectrum": report.single_particle_spectrum.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "commutator_norms": norms,
        "zero_threshold": num(report.zero_threshold),
        "verdicts": report.verdicts,
    })
}

pub fn spectrum_json<T: Real>(single: &[T], sector: Option<(usize, &[T])>) -> Value {
    let mut v = json!({
        "schema_version": FORMAT_VERSION,
        "single_particle": single.iter().map(|&x| num(x)).collect::<Vec<_>>(),
    });
    if let Some((n, values)) = sector {
        v["sector"] = json!({
            "n_particles": n,
            "eigenvalues": values.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        });
    }
    v
}

pub fn ring_json<T: Real>(n: usize, j: T, u: T, filling: usize, r: &SymmetryBreaking<T>) -> Value {
    json!({
        "schema_version": FORMAT_VERSION,
        "N": n,
        "J": num(j),
        "U": num(u),
        "filling": filling,
        "dim": r.dim,
        "norm_U0": num(r.norm_free),
        "norm_U": num(r.norm_interacting),
        "threshold": num(r.threshold),
        "conserved_U0": r.free_conserved(),
        "conserved_U": r.interacting_conserved(),
    })
}

pub fn lieb_json<T: Real>(r: &LiebOutcome<T>) -> Value {
    json!({
        "schema_version": FORMAT_VERSION,
        "regime": format!("{:?}", r.regime).to_lowercase(),
        "S": r.spin(),
        "expected_S": r.expected_spin(),
        "degeneracy": r.degeneracy,
        "ground_energy": num(r.ground_energy),
        "casimir": num(r.casimir),
        "pass": r.passes(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::symmetry::analyze;
    use proptest::prelude::*;

    const STAR: &str = r#"{
        "format_version": "1",
        "sites": [{"mu": 0.0, "U": 4.0}, {"mu": 0.0, "U": 4.0}, {"mu": 0.5, "U": 4.0}],
        "links": [
            {"i": 0, "j": 1, "t": -1.0, "theta": 0.7, "axis": [0.0, 1.0, 0.0]},
            {"i": 0, "j": 2, "t": -1.0, "theta": 0.0, "axis": [0.0, 0.0, 1.0]}
        ]
    }"#;

    #[test]
    fn parses_and_builds() {
        let f = ModelFile::from_json(STAR).unwrap();
        let g: ModelGraph<f64> = f.to_graph().unwrap();
        assert_eq!(g.n_sites(), 3);
        assert_eq!(g.sites()[2].mu, 0.5);
        assert!(!g.links()[0].is_spin_trivial(1e-9));
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = STAR.replace("\"mu\": 0.5", "\"mu\": 0.5, \"spin\": 1");
        let err = ModelFile::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("spin"), "{err}");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = STAR.replace("[0.0, 1.0, 0.0]", "[0.0, 2.0, 0.0]");
        let err = ModelFile::from_json(&bad).unwrap().to_graph::<f64>().unwrap_err();
        assert!(err.to_string().contains("links[0].axis"), "{err}");
        let bad = STAR.replace("\"j\": 2", "\"j\": 7");
        let err = ModelFile::from_json(&bad).unwrap().to_graph::<f64>().unwrap_err();
        assert!(err.to_string().contains("links[1]"), "{err}");
        let bad = STAR.replace("\"format_version\": \"1\"", "\"format_version\": \"2\"");
        assert!(ModelFile::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("format_version"));
        let missing = STAR.replace("\"t\": -1.0, ", "");
        assert!(ModelFile::from_json(&missing).unwrap_err().to_string().contains("`t`"));
    }

    #[test]
    fn graph_round_trip() {
        let f = ModelFile::from_json(STAR).unwrap();
        let g: ModelGraph<f64> = f.to_graph().unwrap();
        let back = ModelFile::from_graph(&g).unwrap();
        let g2: ModelGraph<f64> = back.to_graph().unwrap();
        for (a, b) in g.links().iter().zip(g2.links()) {
            assert!(a.rotation().max_abs_diff(b.rotation()) < 1e-12);
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round15(0.1 + 0.2), 0.3);
        assert_eq!(round15(-1.0 / 3.0), -0.333333333333333);
        assert_eq!(round15(0.0), 0.0);
    }

    #[test]
    fn report_is_deterministic_with_sorted_keys() {
        let f = ModelFile::from_json(STAR).unwrap();
        let g: ModelGraph<f64> = f.to_graph().unwrap();
        let b = build_basis(3, 3).unwrap();
        let a = to_pretty(&report_json(&f, &analyze(&g, &b).unwrap()));
        let again = to_pretty(&report_json(&f, &analyze(&g, &b).unwrap()));
        assert_eq!(a, again);
        let v: Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["topology"], "simply-connected");
        // Keys appear sorted in the text too.
        let pos = |k: &str| a.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("algebra_residual") < pos("commutator_norms") && pos("commutator_norms") < pos("verdicts"));
    }

    fn entry() -> impl Strategy<Value = (f64, f64)> {
        (-10.0..10.0f64, -10.0..10.0f64)
    }

    proptest! {
        #[test]
        fn model_file_text_round_trip(sites in proptest::collection::vec(entry(), 1..6), t in -3.0..3.0f64, theta in -6.0..6.0f64) {
            let n = sites.len();
            let file = ModelFile {
                format_version: "1".into(),
                sites: sites.iter().map(|&(mu, u)| SiteEntry { mu, u }).collect(),
                links: (1..n).map(|k| LinkEntry { i: k - 1, j: k, t, theta, axis: [0.0, 0.0, 1.0] }).collect(),
            };
            let parsed = ModelFile::from_json(&file.to_json()).unwrap();
            prop_assert_eq!(&parsed, &file);
            prop_assert_eq!(parsed.digest(), file.digest());
        }
    }
}
