//! Truthful allocation rules and their payments.
//!
//! Every rule implements [`Mechanism`]: a black-box map from reported bids to an
//! [`Allocation`] plus a [`PaymentVector`]. The Hybrid family shares one framework:
//! the root takes the set `S` minimizing `r(T) + g_T(leaf bids)` for an offset
//! family [`GFunction`]; VCG is the member with additive offsets.

mod gfunc;
mod hybrid;
mod hyperstar;
mod maximize;
mod star_cover;
mod vcg;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use gfunc::{GFunction, TieBreak};
pub use hybrid::{
    critical_value, hybrid_star_allocate, hybrid_star_allocate_exhaustive, hybrid_star_allocate_fast_max,
    hybrid_star_allocate_fast_sum, hybrid_star_root_set, CriticalValue, HybridStar,
};
pub use hyperstar::{hybrid_hyperstar_allocate, HybridHyperstar};
pub use maximize::{
    all_or_nothing_allocate, combined_max_mechanism, hybrid_lp_max_allocate, AllOrNothing, CombinedMax,
    HybridLpMax,
};
pub use star_cover::{star_cover_allocate, DecompositionSource, StarCover};
pub use vcg::{vcg_allocate, Vcg};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::SchedulingInstance;
use crate::objective::Sense;

/// Default cap on the number of tasks for exhaustive subset search (2^22 candidates).
pub const DEFAULT_ENUM_LIMIT: usize = 22;

/// Hard ceiling regardless of configuration.
pub const MAX_ENUM_LIMIT: usize = 32;

/// Environment variable overriding the enumeration cap.
pub const ENUM_LIMIT_VAR: &str = "GBMECH_ENUM_LIMIT";

/// The enumeration cap: `GBMECH_ENUM_LIMIT` if set and valid, else [`DEFAULT_ENUM_LIMIT`].
/// Read once per process.
pub fn default_enum_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(ENUM_LIMIT_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map(|v| v.min(MAX_ENUM_LIMIT))
            .unwrap_or(DEFAULT_ENUM_LIMIT)
    })
}

pub(crate) fn capacity_error(m: usize, limit: usize, what: &str) -> Error {
    Error::Capacity {
        what: format!("{what} over {m} tasks"),
        size: 1u128 << m.min(127),
        limit: 1u128 << limit.min(MAX_ENUM_LIMIT),
    }
}

pub(crate) fn check_enum_capacity(m: usize, limit: usize, what: &str) -> Result<()> {
    if m > limit.min(MAX_ENUM_LIMIT) {
        return Err(capacity_error(m, limit, what));
    }
    Ok(())
}

/// Money per machine.
///
/// Under [`Sense::Minimize`] (procurement) `amounts[i]` is paid *to* player `i` and
/// its utility is payment minus processing time. Under [`Sense::Maximize`]
/// (auctions) `amounts[i]` is charged *to* player `i` and its utility is value
/// minus charge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaymentVector {
    pub sense: Sense,
    pub amounts: Vec<f64>,
}

impl PaymentVector {
    pub fn zeros(sense: Sense, machines: usize) -> Self {
        PaymentVector {
            sense,
            amounts: vec![0.0; machines],
        }
    }

    /// Utility of `player` whose true cost (or value) of its bundle is `bundle`.
    pub fn utility(&self, player: usize, bundle: f64) -> f64 {
        let amount = self.amounts[player];
        let u = match self.sense {
            Sense::Minimize => amount - bundle,
            Sense::Maximize => bundle - amount,
        };
        if u.is_nan() {
            0.0
        } else {
            u
        }
    }
}

/// A deterministic direct-revelation mechanism.
pub trait Mechanism: Send + Sync {
    fn name(&self) -> String;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation>;

    /// Payments for `alloc`, which must be this mechanism's output on `inst`.
    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector>;

    /// Allocation and payments in one call.
    fn run(&self, inst: &SchedulingInstance) -> Result<(Allocation, PaymentVector)> {
        let alloc = self.allocate(inst)?;
        let pay = self.payments(inst, &alloc)?;
        Ok((alloc, pay))
    }
}

pub(crate) fn inapplicable(mechanism: &str, inst: &SchedulingInstance) -> Error {
    Error::Inapplicable {
        mechanism: mechanism.to_string(),
        instance: inst.kind().to_string(),
    }
}

/// Stable mechanism names used by the CLI and reports.
pub const MECHANISM_NAMES: &[&str] = &[
    "vcg",
    "hybrid-max",
    "hybrid-lp",
    "hybrid-lp-max",
    "all-or-nothing",
    "combined-max",
    "star-cover",
    "hyperstar-hybrid",
];

/// Parameters that some named mechanisms need.
#[derive(Clone, Debug)]
pub struct MechanismParams {
    /// Norm parameter for the L^p mechanisms.
    pub p: Option<f64>,
    pub tie: TieBreak,
    /// Decomposition source for `star-cover`.
    pub decomposition: DecompositionSource,
    /// Offset family used inside each star by `star-cover`.
    pub star_cover_g: GFunction,
}

impl Default for MechanismParams {
    fn default() -> Self {
        MechanismParams {
            p: None,
            tie: TieBreak::RootPreferring,
            decomposition: DecompositionSource::Orientation,
            star_cover_g: GFunction::MaxLeaf,
        }
    }
}

/// Looks up a mechanism by its stable name.
pub fn by_name(name: &str, params: &MechanismParams) -> Result<Box<dyn Mechanism>> {
    let need_p = |what: &str| {
        params
            .p
            .ok_or_else(|| Error::InvalidParameter(format!("mechanism `{what}` needs a norm parameter p")))
    };
    Ok(match name {
        "vcg" => Box::new(Vcg),
        "hybrid-max" => Box::new(HybridStar::new(GFunction::MaxLeaf, params.tie)),
        "hybrid-lp" => {
            let p = need_p(name)?;
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidParameter(format!("hybrid-lp needs finite p > 0, got {p}")));
            }
            Box::new(HybridStar::new(GFunction::LpLeaf(p), params.tie))
        }
        "hybrid-lp-max" => Box::new(HybridLpMax::new(need_p(name)?, params.tie)?),
        "all-or-nothing" => Box::new(AllOrNothing::new(need_p(name)?)?),
        "combined-max" => Box::new(CombinedMax::new(need_p(name)?)?),
        "star-cover" => Box::new(StarCover::new(
            params.star_cover_g.clone(),
            params.tie,
            params.decomposition.clone(),
        )),
        "hyperstar-hybrid" => Box::new(HybridHyperstar::new(GFunction::MaxLeaf, params.tie)),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown mechanism `{other}`; expected one of {}",
                MECHANISM_NAMES.join(", ")
            )))
        }
    })
}
