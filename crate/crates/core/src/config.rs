//! Experiment configuration and the tolerance table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::DiffeoSpec;
use crate::error::{Error, Result};
use crate::gns::{GnsSpace, TruncationBox};
use crate::weyl::WeylElement;

/// Default tolerances, one per verification suite.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("weyl_relations", 1e-14),
    ("star_associativity", 1e-12),
    ("trace_traciality", 1e-12),
    ("basis_gram", 1e-14),
    ("u_kl_basis", 1e-8),
    ("rn_cocycle", 1e-9),
    ("rn_normalization", 1e-9),
    ("tomita", 1e-7),
    ("tomita_rotation", 1e-9),
    ("borel_identity", 1e-9),
    ("parseval", 1e-12),
    ("hausdorff_young", 1e-12),
    ("paren_routes", 1e-7),
    ("classical_limit", 1e-10),
    ("transference_generators", 1e-12),
    ("transference_random", 1e-10),
    ("fejer_ratio", 0.0),
    ("fejer_transference", 1e-9),
    ("abel_decreasing", 0.0),
    ("dirichlet_growth", 0.2),
    ("dirichlet_sup", 1e-9),
    ("dirac_telescoping", 1e-12),
    ("dirac_matrix_elements", 1e-7),
    ("dirac_matrix_elements_rotation", 1e-12),
    ("dirac_self_adjoint", 1e-9),
    ("dirac_resolvent_bound", 1e-6),
    ("dirac_commutator_bound", 1e-6),
    ("dirac_star_map", 1e-8),
];

/// Suite name to tolerance; config entries override the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(
            DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        )
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or_else(|| {
            panic!("no tolerance registered for suite {name}");
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|(k, v)| (k.clone(), v * factor)).collect())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn merged(overrides: BTreeMap<String, f64>) -> Result<Self> {
        let mut t = Self::default();
        for (k, v) in overrides {
            if !t.0.contains_key(&k) {
                return Err(Error::Config(format!("unknown tolerance entry {k:?}")));
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("tolerance {k} must be non-negative, got {v}")));
            }
            t.0.insert(k, v);
        }
        Ok(t)
    }
}

/// Command-specific parameters; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Fejér orders; `min(K, M)/4, min(K, M)/2, min(K, M)` when absent.
    pub fejer_orders: Option<Vec<usize>>,
    pub abel_radii: Vec<f64>,
    pub eta: Vec<f64>,
    /// Index range of the Dirac matrix-element CSV; `min(K, M)/4` when absent.
    pub sweep_range: Option<usize>,
    /// Block range `|n| ≤ dirac_blocks` for resolvent and commutator tables; `K/2` when absent.
    pub dirac_blocks: Option<usize>,
    pub dirichlet_orders: Vec<usize>,
    /// Support radius `(r_k, r_l)` of random elements and vectors.
    pub support_radius: (usize, usize),
    pub element: Option<WeylElement>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            fejer_orders: None,
            abel_radii: vec![0.9, 0.99, 0.999],
            eta: vec![0.0, 0.5, 1.0],
            sweep_range: None,
            dirac_blocks: None,
            dirichlet_orders: vec![0, 1, 2, 5, 10, 20, 50, 100],
            support_radius: (2, 2),
            element: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "DiffeoSpec::benchmark")]
    diffeo: DiffeoSpec,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default = "default_box")]
    truncation: TruncationBox,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    output: Option<PathBuf>,
}

fn default_box() -> TruncationBox {
    TruncationBox::new(16, 16, 256).expect("default box is valid")
}

/// A validated experiment: diffeomorphism, truncation, seed, parameters and tolerances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub diffeo: DiffeoSpec,
    pub truncation: TruncationBox,
    pub seed: u64,
    pub params: Params,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            diffeo: DiffeoSpec::benchmark(),
            truncation: default_box(),
            seed: 0,
            params: Params::default(),
            tolerances: Tolerances::default(),
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let diffeo = match raw.alpha {
            Some(alpha) => DiffeoSpec::new(raw.diffeo.conjugator().clone(), alpha, raw.diffeo.classical_mode())?,
            None => raw.diffeo,
        };
        let t = raw.truncation;
        let truncation = TruncationBox::new(t.k_bound(), t.m_bound(), t.grid_size())?;
        let cfg = Self {
            diffeo,
            truncation,
            seed: raw.seed,
            params: raw.params,
            tolerances: Tolerances::merged(raw.tolerances)?,
            output: raw.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        let cap = self.truncation.k_bound().min(self.truncation.m_bound());
        if let Some(&n) = p.fejer_orders.iter().flatten().find(|&&n| n > cap) {
            return Err(Error::Config(format!("Fejér order {n} exceeds min(K, M) = {cap}")));
        }
        if let Some(&r) = p.abel_radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(Error::Config(format!("Abel radius {r} outside [0, 1)")));
        }
        if let Some(&e) = p.eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::Config(format!("eta {e} outside [0, 1]")));
        }
        if p.sweep_range.is_some_and(|r| r > cap) {
            return Err(Error::Config(format!("sweep range exceeds min(K, M) = {cap}")));
        }
        if p.dirac_blocks.is_some_and(|b| b > self.truncation.k_bound()) {
            return Err(Error::Config("dirac_blocks exceeds K".into()));
        }
        let (rk, rl) = p.support_radius;
        if rk > self.truncation.k_bound() || rl > self.truncation.m_bound() {
            return Err(Error::Config("support radius exceeds the truncation box".into()));
        }
        if let Some(e) = &p.element {
            if e.alpha() != self.diffeo.alpha() {
                return Err(Error::AlphaMismatch(e.alpha(), self.diffeo.alpha()));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<GnsSpace> {
        GnsSpace::new(self.diffeo.clone(), self.truncation)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn sweep_range(&self) -> usize {
        self.params
            .sweep_range
            .unwrap_or(self.truncation.k_bound().min(self.truncation.m_bound()) / 4)
    }

    pub fn fejer_orders(&self) -> Vec<usize> {
        if let Some(o) = &self.params.fejer_orders {
            return o.clone();
        }
        let cap = self.truncation.k_bound().min(self.truncation.m_bound());
        let mut o: Vec<usize> = [cap / 4, cap / 2, cap].into_iter().filter(|&n| n > 0).collect();
        o.dedup();
        o
    }

    pub fn dirac_blocks(&self) -> usize {
        self.params.dirac_blocks.unwrap_or(self.truncation.k_bound() / 2)
    }

    /// The configured element, or a random one of the configured support radius.
    pub fn element(&self, rng: &mut ChaCha8Rng) -> WeylElement {
        match &self.params.element {
            Some(e) => e.clone(),
            None => {
                let (rk, rl) = self.params.support_radius;
                WeylElement::random(self.diffeo.alpha(), (rk as i64, rl as i64), rng)
            }
        }
    }

    /// True when the conjugator is the identity, so every identity holds to rounding.
    pub fn is_rotation(&self) -> bool {
        self.diffeo.conjugator().is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_benchmark() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.sweep_range(), 4);
        assert_eq!(c.tolerances.get("tomita"), 1e-7);
        assert_eq!(c.fejer_orders(), vec![4, 8, 16]);
    }

    #[test]
    fn overrides_and_validation() {
        let c = ExperimentConfig::from_json(
            r#"{"diffeo": {"alpha": 0.3}, "truncation": {"K": 4, "M": 6, "G": 64},
                "seed": 9, "tolerances": {"tomita": 1e-6}, "params": {"fejer_orders": [2, 4]}}"#,
        )
        .unwrap();
        assert!(c.is_rotation());
        assert_eq!(c.truncation.k_bound(), 4);
        assert_eq!(c.tolerances.get("tomita"), 1e-6);
        assert_eq!(c.tolerances.scaled(10.0).get("parseval"), 1e-11);

        let alpha = ExperimentConfig::from_json(r#"{"alpha": 0.2, "diffeo": {"alpha": 0.3}}"#).unwrap();
        assert_eq!(alpha.diffeo.alpha(), 0.2);

        for bad in [
            r#"{"truncation": {"K": 0, "M": 4, "G": 64}}"#,
            r#"{"truncation": {"K": 2, "M": 16, "G": 64}}"#,
            r#"{"diffeo": {"alpha": 0.0}}"#,
            r#"{"tolerances": {"nonsense": 1.0}}"#,
            r#"{"params": {"abel_radii": [1.0]}}"#,
            r#"{"params": {"fejer_orders": [40]}}"#,
            r#"{"bogus": 1}"#,
            "not json",
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{bad}");
        }
        assert!(ExperimentConfig::from_json(r#"{"diffeo": {"alpha": 0.0, "classical_mode": true}}"#).is_ok());
    }
}
