//! Context-set perturbations with provenance-reversible instances.
//!
//! Every attack is a pure function of `(instance, params, seed)`: it returns
//! a [`PoisonedInstance`] whose provenance reconstructs the clean instance
//! exactly. No attack ever touches query labels.

mod grid;
mod instance;
mod pad_inject;
mod poison;
mod spectral;
mod warp;

pub use grid::{run_attack_grid, AttackGridOutput, CellFailure};
pub use instance::{Instance, PoisonedInstance, Provenance};
pub use pad_inject::{centroid_inj, noise_pad};
pub use poison::{boundary_poison, hub_poison};
pub use spectral::{nullspace_pgd, svd_hide, NullspaceOutcome};
pub use warp::{cube_warp_value, mono_warp, rank_warp_column, softexp_warp_value, WarpKind};

/// The attack battery. `Identity` is the diagnostic no-op.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    Identity,
    NoisePad,
    HubPoison,
    CentroidInj,
    BoundaryPoison,
    MonoCube,
    MonoSoftexp,
    MonoRank,
    SvdHide,
    NullspacePgd,
}

impl AttackKind {
    pub const ALL: [AttackKind; 10] = [
        AttackKind::Identity,
        AttackKind::NoisePad,
        AttackKind::HubPoison,
        AttackKind::CentroidInj,
        AttackKind::BoundaryPoison,
        AttackKind::MonoCube,
        AttackKind::MonoSoftexp,
        AttackKind::MonoRank,
        AttackKind::SvdHide,
        AttackKind::NullspacePgd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AttackKind::Identity => "identity",
            AttackKind::NoisePad => "noise_pad",
            AttackKind::HubPoison => "hub_poison",
            AttackKind::CentroidInj => "centroid_inj",
            AttackKind::BoundaryPoison => "boundary_poison",
            AttackKind::MonoCube => "mono_cube",
            AttackKind::MonoSoftexp => "mono_softexp",
            AttackKind::MonoRank => "mono_rank",
            AttackKind::SvdHide => "svd_hide",
            AttackKind::NullspacePgd => "nullspace_pgd",
        }
    }

    pub fn by_name(name: &str) -> Option<AttackKind> {
        AttackKind::ALL.iter().copied().find(|k| k.name() == name)
    }
}

/// Fixed hyperparameters of the battery. The defaults are the published
/// values and are validated on use.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackParams {
    /// noise_pad: Gaussian noise scale in units of the column std.
    pub sigma_mult: f64,
    /// noise_pad: appended rows as a fraction of the context size.
    pub pad_frac: f64,
    /// noise_pad: draw padded labels from the empirical label distribution
    /// instead of uniformly over the label set.
    pub pad_labels_empirical: bool,
    /// hub_poison: fraction of context rows flipped.
    pub hub_frac: f64,
    /// hub_poison: neighborhood size of the centrality score.
    pub hub_k: usize,
    /// centroid_inj: the `max(a, n/b)` floor.
    pub per_class_min: usize,
    /// centroid_inj: the `max(a, n/b)` divisor.
    pub per_class_divisor: usize,
    /// boundary_poison: margin as a fraction of the inter-centroid distance.
    pub margin: f64,
    /// mono_softexp temperature.
    pub tau: f64,
    /// svd_hide: fraction of leading singular values damped.
    pub svd_top_frac: f64,
    /// svd_hide: damp/amplify factor.
    pub svd_damp: f64,
    /// nullspace_pgd: step length in standardized feature units.
    pub pgd_eta: f64,
    pub pgd_steps: usize,
    /// nullspace_pgd: l2 budget in standardized feature units.
    pub pgd_budget: f64,
    /// nullspace_pgd: relative singular-value cutoff for the null space.
    pub pgd_cutoff_rel: f64,
    /// Minimum null-space dimension; below it the instance is excluded.
    pub pgd_min_null_dim: usize,
    /// Ridge regularization used when the grid fits the reference ridge.
    pub ridge_lambda: f64,
}

impl Default for AttackParams {
    fn default() -> Self {
        Self {
            sigma_mult: 4.0,
            pad_frac: 0.2,
            pad_labels_empirical: false,
            hub_frac: 0.15,
            hub_k: 5,
            per_class_min: 3,
            per_class_divisor: 100,
            margin: 0.20,
            tau: 1.0,
            svd_top_frac: 0.25,
            svd_damp: 10.0,
            pgd_eta: 0.01,
            pgd_steps: 200,
            pgd_budget: 1.0,
            pgd_cutoff_rel: 1e-6,
            pgd_min_null_dim: 5,
            ridge_lambda: 1.0,
        }
    }
}

impl AttackParams {
    /// Apply a `key=value` override; unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), AttackError> {
        let bad = |e: std::num::ParseFloatError| AttackError::InvalidParam(e.to_string());
        match key {
            "sigma_mult" => self.sigma_mult = value.parse().map_err(bad)?,
            "pad_frac" => self.pad_frac = value.parse().map_err(bad)?,
            "pad_labels_empirical" => {
                self.pad_labels_empirical = value
                    .parse()
                    .map_err(|e| AttackError::InvalidParam(format!("{e}")))?
            }
            "hub_frac" => self.hub_frac = value.parse().map_err(bad)?,
            "hub_k" => {
                self.hub_k = value
                    .parse()
                    .map_err(|e| AttackError::InvalidParam(format!("{e}")))?
            }
            "per_class_min" => {
                self.per_class_min = value
                    .parse()
                    .map_err(|e| AttackError::InvalidParam(format!("{e}")))?
            }
            "per_class_divisor" => {
                self.per_class_divisor = value
                    .parse()
                    .map_err(|e| AttackError::InvalidParam(format!("{e}")))?
            }
            "margin" => self.margin = value.parse().map_err(bad)?,
            "tau" => self.tau = value.parse().map_err(bad)?,
            "svd_top_frac" => self.svd_top_frac = value.parse().map_err(bad)?,
            "svd_damp" => self.svd_damp = value.parse().map_err(bad)?,
            "pgd_eta" => self.pgd_eta = value.parse().map_err(bad)?,
            "pgd_steps" => {
                self.pgd_steps = value
                    .parse()
                    .map_err(|e| AttackError::InvalidParam(format!("{e}")))?
            }
            "pgd_budget" => self.pgd_budget = value.parse().map_err(bad)?,
            "pgd_cutoff_rel" => self.pgd_cutoff_rel = value.parse().map_err(bad)?,
            "ridge_lambda" => self.ridge_lambda = value.parse().map_err(bad)?,
            other => {
                return Err(AttackError::InvalidParam(format!(
                    "unknown attack parameter {other:?}"
                )))
            }
        }
        Ok(())
    }
}

/// One attack request: kind, parameters, seed.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub params: AttackParams,
    pub seed: u64,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, seed: u64) -> Self {
        Self {
            kind,
            params: AttackParams::default(),
            seed,
        }
    }

    /// Run this attack. The null-space attack fits its reference ridge on
    /// the clean context with `ridge_lambda`; an exclusion (too few null
    /// directions) surfaces as an error carrying the dimension.
    pub fn apply(&self, instance: &Instance) -> Result<PoisonedInstance, AttackError> {
        let p = &self.params;
        match self.kind {
            AttackKind::Identity => Ok(PoisonedInstance {
                context: instance.context.clone(),
                query: instance.query.clone(),
                provenance: Provenance::Identity,
            }),
            AttackKind::NoisePad => {
                noise_pad(instance, p.sigma_mult, p.pad_frac, p.pad_labels_empirical, self.seed)
            }
            AttackKind::HubPoison => hub_poison(instance, p.hub_frac, p.hub_k, self.seed),
            AttackKind::CentroidInj => {
                centroid_inj(instance, p.per_class_min, p.per_class_divisor, self.seed)
            }
            AttackKind::BoundaryPoison => boundary_poison(instance, p.margin, self.seed),
            AttackKind::MonoCube => mono_warp(instance, WarpKind::Cube, p.tau),
            AttackKind::MonoSoftexp => mono_warp(instance, WarpKind::Softexp, p.tau),
            AttackKind::MonoRank => mono_warp(instance, WarpKind::Rank, p.tau),
            AttackKind::SvdHide => svd_hide(instance, p.svd_top_frac, p.svd_damp),
            AttackKind::NullspacePgd => {
                let labels = instance
                    .context
                    .labels()
                    .ok_or(AttackError::NeedsLabels)?;
                let ridge = crate::readout::ridge_fit(
                    instance.context.values(),
                    crate::readout::RidgeTargets::Labels(labels),
                    p.ridge_lambda,
                )?;
                match nullspace_pgd(instance, &ridge, p, self.seed)? {
                    NullspaceOutcome::Applied { poisoned, .. } => Ok(poisoned),
                    NullspaceOutcome::Excluded { null_dim } => {
                        Err(AttackError::NullspaceExcluded { null_dim })
                    }
                }
            }
        }
    }
}

/// Errors raised by the attack battery.
#[derive(Debug, thiserror::Error)]
pub enum AttackError {
    #[error("attack needs a labeled classification context")]
    NeedsLabels,
    #[error("context holds a single class")]
    SingleClassContext,
    #[error("class {0} has no context rows")]
    EmptyClass(usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("instance excluded: null space has {null_dim} directions")]
    NullspaceExcluded { null_dim: usize },
    #[error("readout error: {0}")]
    Readout(#[from] crate::readout::ReadoutError),
    #[error("data error: {0}")]
    Data(#[from] crate::data::DataError),
}
