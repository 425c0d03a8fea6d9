use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::cost::Cost;
use crate::error::{invalid, Result};
use crate::instance::SchedulingInstance;

/// Whether the designer minimizes (scheduling) or maximizes (auctions) the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Aggregate of machine loads.
///
/// `Makespan` is kept separate from `LpMin` rather than encoded as `p = inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum Objective {
    Makespan,
    LpMin(f64),
    LpMax(f64),
    SumMin,
}

impl Objective {
    pub fn lp_min(p: f64) -> Result<Objective> {
        if !(p.is_finite() && p > 0.0) {
            return Err(invalid(format!("L^p minimization needs finite p > 0, got {p}")));
        }
        Ok(Objective::LpMin(p))
    }

    pub fn lp_max(p: f64) -> Result<Objective> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(invalid(format!("L^p maximization needs finite p >= 1, got {p}")));
        }
        Ok(Objective::LpMax(p))
    }

    pub fn validate(self) -> Result<Objective> {
        match self {
            Objective::LpMin(p) => Objective::lp_min(p),
            Objective::LpMax(p) => Objective::lp_max(p),
            other => Ok(other),
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            Objective::LpMax(_) => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }

    /// The norm parameter, `None` for makespan.
    pub fn p(self) -> Option<f64> {
        match self {
            Objective::Makespan => None,
            Objective::LpMin(p) | Objective::LpMax(p) => Some(p),
            Objective::SumMin => Some(1.0),
        }
    }

    pub fn evaluate_loads(self, loads: &[Cost]) -> Cost {
        match self {
            Objective::Makespan => loads.iter().copied().max().unwrap_or(Cost::ZERO),
            Objective::SumMin => loads.iter().sum(),
            Objective::LpMin(p) | Objective::LpMax(p) => lp_norm(loads.iter().copied(), p),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::Makespan => f.write_str("makespan"),
            Objective::LpMin(p) => write!(f, "lp-min(p={p})"),
            Objective::LpMax(p) => write!(f, "lp-max(p={p})"),
            Objective::SumMin => f.write_str("sum-min"),
        }
    }
}

/// `(sum x^p)^(1/p)` over nonnegative extended reals, `p > 0`.
pub fn lp_norm(values: impl Iterator<Item = Cost> + Clone, p: f64) -> Cost {
    if p == 1.0 {
        return values.sum();
    }
    let mut acc = 0.0f64;
    for v in values.clone() {
        if v.is_infinite() {
            return Cost::INFINITY;
        }
        acc += v.get().powf(p);
    }
    let top = values.clone().map(Cost::get).fold(0.0, f64::max);
    if top == 0.0 {
        return Cost::ZERO;
    }
    if acc.is_finite() && acc >= f64::MIN_POSITIVE {
        return Cost::of(acc.powf(1.0 / p));
    }
    // powers overflowed or underflowed; rescale by the maximum
    let scaled: f64 = values.map(|v| (v.get() / top).powf(p)).sum();
    Cost::of(scaled.powf(1.0 / p) * top)
}

/// Objective value of `alloc` on `inst`.
pub fn objective_value(inst: &SchedulingInstance, alloc: &Allocation, obj: Objective) -> Result<Cost> {
    let obj = obj.validate()?;
    let loads = alloc.loads(inst)?;
    Ok(obj.evaluate_loads(&loads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::StarInstance;

    fn star(r: &[f64], l: &[f64]) -> SchedulingInstance {
        StarInstance::from_f64(r, l).unwrap().into()
    }

    #[test]
    fn spec_examples() {
        let s = star(&[1.0, 2.0], &[2.0, 4.0]);
        let root_all = Allocation::from_root_set(&[true, true]);
        assert_eq!(objective_value(&s, &root_all, Objective::Makespan).unwrap(), Cost::of(3.0));
        let split = Allocation::from_root_set(&[true, false]);
        assert_eq!(objective_value(&s, &split, Objective::Makespan).unwrap(), Cost::of(4.0));

        let s2 = star(&[3.0, 4.0], &[3.0, 4.0]);
        let leaves = Allocation::from_root_set(&[false, false]);
        let v = objective_value(&s2, &leaves, Objective::LpMin(2.0)).unwrap();
        assert!((v.get() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn infinite_cost_propagates() {
        let s = star(&[1.0, 2.0], &[f64::INFINITY, 1.0]);
        let a = Allocation::from_root_set(&[false, true]);
        for obj in [Objective::Makespan, Objective::LpMin(2.0), Objective::SumMin, Objective::LpMax(3.0)] {
            assert!(objective_value(&s, &a, obj).unwrap().is_infinite());
        }
    }

    #[test]
    fn mismatched_allocation_is_structural() {
        let s = star(&[1.0, 2.0], &[2.0, 4.0]);
        assert!(objective_value(&s, &Allocation::new(vec![0]), Objective::Makespan).is_err());
        assert!(objective_value(&s, &Allocation::new(vec![0, 1]), Objective::Makespan).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(Objective::lp_min(0.0).is_err());
        assert!(Objective::lp_min(0.5).is_ok());
        assert!(Objective::lp_max(0.5).is_err());
        assert!(Objective::lp_max(f64::INFINITY).is_err());
    }

    #[test]
    fn lp_norm_rescales_on_overflow() {
        let v = [Cost::of(1e200), Cost::of(1e200)];
        let n = lp_norm(v.iter().copied(), 4.0);
        assert!((n.get() / 1e200 - 2f64.powf(0.25)).abs() < 1e-12);
    }
}
