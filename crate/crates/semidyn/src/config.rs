//! Experiment configuration: a JSON document naming the generators (as
//! expression strings), the region, classifier knobs, and optional
//! reference data. Complex numbers appear only inside expression strings.
//! Unknown keys are rejected and the seed is mandatory.

use crate::classify::ClassifierConfig;
use crate::gridscan::{Raster, ReferenceSet, Region};
use crate::polyalg::{parse_polynomial, MultiPoly, PolyMap};
use crate::rng::fnv1a64;
use crate::semigroup::Semigroup;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("expression error in {context}: {error}")]
    Expression {
        context: String,
        error: crate::polyalg::ParseError,
    },
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub label: String,
    pub components: Vec<String>,
}

/// Indexed families generated at load time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `f_i(z1, z2) = (T_i(z1), z2^2)` for `i = 0..=truncation`, with the
    /// T_i generated from the Chebyshev recurrence.
    Chebyshev { truncation: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    ModulusPlane {
        low: [f64; 2],
        high: [f64; 2],
        resolution: [usize; 2],
        phase_samples: usize,
    },
    ComplexSlice {
        var: usize,
        low: [f64; 2],
        high: [f64; 2],
        resolution: [usize; 2],
        /// Fixed coordinates as constant expressions, e.g. `"0.5"`.
        fixed: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    Random { count: usize, max_len: usize },
    Exhaustive { length: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub ppm: String,
    pub csv: String,
    pub manifest: String,
    pub report: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            ppm: "raster.ppm".into(),
            csv: "raster.csv".into(),
            manifest: "manifest.json".into(),
            report: "report.json".into(),
        }
    }
}

fn default_band() -> f64 {
    0.05
}

fn default_threshold() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub dimension: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    pub region: RegionSpec,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_tuple: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_tuple_alt: Option<Vec<u32>>,
    #[serde(default = "default_band")]
    pub compare_band: f64,
    #[serde(default = "default_threshold")]
    pub violation_threshold: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse {
                line: e.line(),
                col: e.column(),
                message: e.to_string(),
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dimension != 2 {
            return Err(ConfigError::Invalid(format!(
                "dimension {} unsupported: grid experiments run in dimension 2",
                self.dimension
            )));
        }
        match (!self.generators.is_empty(), self.family.is_some()) {
            (true, true) => {
                return Err(ConfigError::Invalid(
                    "give either explicit generators or a family, not both".into(),
                ))
            }
            (false, false) => {
                return Err(ConfigError::Invalid(
                    "no generators: list them or name a family".into(),
                ))
            }
            _ => {}
        }
        for g in &self.generators {
            if g.components.len() != self.dimension {
                return Err(ConfigError::Invalid(format!(
                    "generator '{}' has {} components for dimension {}",
                    g.label,
                    g.components.len(),
                    self.dimension
                )));
            }
        }
        if let RegionSpec::ComplexSlice { var, fixed, .. } = &self.region {
            if fixed.len() != self.dimension || *var >= self.dimension {
                return Err(ConfigError::Invalid(
                    "complex_slice needs one fixed coordinate per dimension and a valid var".into(),
                ));
            }
        }
        let mut classifier = self.classifier.clone();
        classifier.seed = self.seed;
        classifier.validate().map_err(ConfigError::Invalid)?;
        if let Some(reference) = &self.reference {
            reference.validate().map_err(ConfigError::Invalid)?;
        }
        Ok(())
    }

    /// The classifier configuration with the experiment seed applied.
    pub fn classifier(&self) -> ClassifierConfig {
        let mut cfg = self.classifier.clone();
        cfg.seed = self.seed;
        cfg
    }

    pub fn build_semigroup(&self) -> Result<Semigroup, ConfigError> {
        let generators = if let Some(family) = &self.family {
            match family {
                FamilySpec::Chebyshev { truncation } => chebyshev_family(*truncation),
            }
        } else {
            let mut maps = Vec::with_capacity(self.generators.len());
            for spec in &self.generators {
                let comps = spec
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, src)| {
                        parse_polynomial(src, self.dimension).map_err(|error| {
                            ConfigError::Expression {
                                context: format!("generator '{}' component {}", spec.label, i + 1),
                                error,
                            }
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                maps.push(
                    PolyMap::new(comps, spec.label.clone())
                        .map_err(|e| ConfigError::Invalid(e.to_string()))?,
                );
            }
            maps
        };
        Semigroup::new(generators, self.name.clone())
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn build_region(&self) -> Result<Region, ConfigError> {
        let region = match &self.region {
            RegionSpec::ModulusPlane {
                low,
                high,
                resolution,
                phase_samples,
            } => Region::ModulusPlane {
                low: *low,
                high: *high,
                nx: resolution[0],
                ny: resolution[1],
                phase_samples: *phase_samples,
            },
            RegionSpec::ComplexSlice {
                var,
                low,
                high,
                resolution,
                fixed,
            } => {
                let fixed_values = fixed
                    .iter()
                    .enumerate()
                    .map(|(i, src)| constant_expression(src, self.dimension, i))
                    .collect::<Result<Vec<_>, _>>()?;
                Region::ComplexSlice {
                    var: *var,
                    low: *low,
                    high: *high,
                    nx: resolution[0],
                    ny: resolution[1],
                    fixed: fixed_values,
                }
            }
        };
        region.validate().map_err(ConfigError::Invalid)?;
        Ok(region)
    }

    /// Caveats that must reach the run manifest.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if let Some(FamilySpec::Chebyshev { truncation }) = &self.family {
            notes.push(format!(
                "infinite Chebyshev family truncated to f_0..f_{truncation}; \
                 the reference Julia set describes the full family"
            ));
        }
        notes
    }

    /// Stable content hash of the canonical JSON rendering.
    pub fn fingerprint(&self) -> String {
        format!("{:016x}", fnv1a64(self.to_json().as_bytes()))
    }
}

/// Parse an expression that must reduce to a constant.
pub fn constant_expression(
    src: &str,
    dimension: usize,
    index: usize,
) -> Result<Complex64, ConfigError> {
    let poly = parse_polynomial(src, dimension).map_err(|error| ConfigError::Expression {
        context: format!("fixed coordinate {}", index + 1),
        error,
    })?;
    poly.as_constant().ok_or_else(|| {
        ConfigError::Invalid(format!(
            "fixed coordinate {} ('{src}') is not a constant",
            index + 1
        ))
    })
}

/// Chebyshev polynomials T_0..T_n in z1 (as 2-variable polynomials), from
/// the recurrence T_{n+1} = 2 z T_n - T_{n-1}.
pub fn chebyshev_polys(n: usize) -> Vec<MultiPoly> {
    let one = MultiPoly::constant(2, Complex64::new(1.0, 0.0));
    let z = MultiPoly::variable(2, 0).unwrap();
    let two_z = z.scale(Complex64::new(2.0, 0.0));
    let mut out = vec![one, z];
    while out.len() <= n {
        let len = out.len();
        let next = two_z.mul(&out[len - 1]).sub(&out[len - 2]);
        out.push(next);
    }
    out.truncate(n + 1);
    out
}

/// The truncated Chebyshev semigroup generators `f_i = (T_i(z1), z2^2)`.
pub fn chebyshev_family(truncation: usize) -> Vec<PolyMap> {
    let square = parse_polynomial("z2^2", 2).unwrap();
    chebyshev_polys(truncation)
        .into_iter()
        .enumerate()
        .map(|(i, t)| PolyMap::new(vec![t, square.clone()], format!("f{i}")).unwrap())
        .collect()
}

/// Run manifest: provenance fingerprints for every produced artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_name: String,
    pub seed: u64,
    pub config_fingerprint: String,
    pub generator_fingerprint: String,
    pub outputs: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, raster: Option<&Raster>) -> Self {
        RunManifest {
            tool: "semidyn".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_name: config.name.clone(),
            seed: config.seed,
            config_fingerprint: config.fingerprint(),
            generator_fingerprint: raster
                .map(|r| r.generator_fingerprint.clone())
                .unwrap_or_default(),
            outputs: BTreeMap::new(),
            notes: config.notes(),
        }
    }

    /// Record a produced file by content hash.
    pub fn add_output(&mut self, path: &std::path::Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        self.outputs.insert(
            path.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            format!("{:016x}", fnv1a64(&bytes)),
        );
        Ok(())
    }
}

/// Bundled experiment configurations, one per acceptance scenario.
pub fn bundled_config(name: &str) -> Option<&'static str> {
    match name {
        "example1_a2" => Some(include_str!("../configs/example1_a2.json")),
        "single_squaring" => Some(include_str!("../configs/single_squaring.json")),
        "chebyshev_N4" => Some(include_str!("../configs/chebyshev_N4.json")),
        "recurrent_origin" => Some(include_str!("../configs/recurrent_origin.json")),
        "henon_volume" => Some(include_str!("../configs/henon_volume.json")),
        _ => None,
    }
}

pub const BUNDLED_CONFIG_NAMES: [&str; 5] = [
    "example1_a2",
    "single_squaring",
    "chebyshev_N4",
    "recurrent_origin",
    "henon_volume",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse_and_roundtrip() {
        for name in BUNDLED_CONFIG_NAMES {
            let text = bundled_config(name).unwrap();
            let config = ExperimentConfig::from_json(text)
                .unwrap_or_else(|e| panic!("config {name} failed: {e}"));
            let rendered = config.to_json();
            let reparsed = ExperimentConfig::from_json(&rendered).unwrap();
            assert_eq!(config, reparsed, "round-trip failed for {name}");
            config.build_semigroup().unwrap();
            config.build_region().unwrap();
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"name":"x","dimension":2,"seed":1,"generators":[{"label":"f","components":["z1^2","z2^2"]}],"region":{"mode":"modulus_plane","low":[0,0],"high":[1,1],"resolution":[4,4],"phase_samples":1},"surprise":true}"#;
        assert!(matches!(
            ExperimentConfig::from_json(text),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn seed_is_mandatory() {
        let text = r#"{"name":"x","dimension":2,"generators":[{"label":"f","components":["z1^2","z2^2"]}],"region":{"mode":"modulus_plane","low":[0,0],"high":[1,1],"resolution":[4,4],"phase_samples":1}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn expression_errors_carry_position() {
        let text = r#"{"name":"x","dimension":2,"seed":1,"generators":[{"label":"f","components":["z1^^2","z2^2"]}],"region":{"mode":"modulus_plane","low":[0,0],"high":[1,1],"resolution":[4,4],"phase_samples":1}}"#;
        let config = ExperimentConfig::from_json(text).unwrap();
        match config.build_semigroup() {
            Err(ConfigError::Expression { error, .. }) => {
                assert_eq!(error.line, 1);
                assert_eq!(error.col, 4);
            }
            other => panic!("expected expression error, got {other:?}"),
        }
    }

    #[test]
    fn chebyshev_recurrence_values() {
        let polys = chebyshev_polys(4);
        // T_4 = 8 z^4 - 8 z^2 + 1.
        let expected = parse_polynomial("8*z1^4 - 8*z1^2 + 1", 2).unwrap();
        assert_eq!(polys[4], expected);
        // T_i(1) = 1 for all i.
        let one = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        for t in &polys {
            let v = t.eval(&one).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_family_shape() {
        let family = chebyshev_family(4);
        assert_eq!(family.len(), 5);
        assert_eq!(family[0].label(), "f0");
        // f_0 has constant first coordinate; maximal rank fails there.
        assert!(!family[0].has_maximal_rank().unwrap());
        assert!(family[2].has_maximal_rank().unwrap());
    }

    #[test]
    fn manifest_reproducibility() {
        let text = bundled_config("single_squaring").unwrap();
        let config = ExperimentConfig::from_json(text).unwrap();
        let a = RunManifest::new(&config, None);
        let b = RunManifest::new(&config, None);
        assert_eq!(a.config_fingerprint, b.config_fingerprint);
    }
}
