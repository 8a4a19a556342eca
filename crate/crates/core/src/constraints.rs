//! Social navigation constraints as predicates over a predicted rollout.
//!
//! Four predicates are evaluated for a candidate action:
//!
//! * `es`  activity awareness: `DIST(R,H) >= Pref(H | a_H) + ρ_R + ρ_H`
//! * `ed`  distance awareness: `DIST(R,H) >= d_min + ρ_R + ρ_H`
//! * `not_ec` collision avoidance: `DIST(R,H) >= ρ_R + ρ_H`
//! * `et`  time constraint: predicted completion time `<= T_max`
//!
//! The distance predicates quantify over every human at every predicted
//! step. Their conjunctions form the compliance levels D1 (strictest)
//! through D4, see [`Level`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::Rollout;
use crate::world_model::{Activity, ObservationFrame};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("no preferred distance configured for activity `{0}`")]
    MissingPreference(Activity),
    #[error("invalid compliance parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceParams {
    /// Universal minimum robot-human gap, meters.
    pub d_min: f64,
    /// Episode time limit, seconds.
    pub t_max: f64,
    /// Preferred gap per activity, meters.
    pub pref: BTreeMap<Activity, f64>,
    /// Control period, seconds.
    pub dt: f64,
    pub max_speed: f64,
}

impl Default for ComplianceParams {
    fn default() -> Self {
        Self {
            d_min: 0.5,
            t_max: 50.0,
            pref: default_pref_table(),
            dt: 0.25,
            max_speed: 1.0,
        }
    }
}

pub fn default_pref_table() -> BTreeMap<Activity, f64> {
    BTreeMap::from([
        (Activity::Talking, 1.2),
        (Activity::Walking, 0.8),
        (Activity::Standing, 0.6),
        (Activity::Sitting, 0.6),
        (Activity::Phone, 0.8),
    ])
}

impl ComplianceParams {
    pub fn validate(&self) -> Result<(), ConstraintError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConstraintError::InvalidParam(format!(
                    "{name} must be > 0, got {v}"
                )))
            }
        };
        positive("d_min", self.d_min)?;
        positive("t_max", self.t_max)?;
        positive("dt", self.dt)?;
        positive("max_speed", self.max_speed)?;
        for activity in Activity::BUILTIN.iter() {
            self.preference(activity)?;
        }
        for (activity, &d) in &self.pref {
            if !(d.is_finite() && d >= 0.0) {
                return Err(ConstraintError::InvalidParam(format!(
                    "pref.{activity} must be >= 0, got {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn preference(&self, activity: &Activity) -> Result<f64, ConstraintError> {
        self.pref
            .get(activity)
            .copied()
            .ok_or_else(|| ConstraintError::MissingPreference(activity.clone()))
    }

    /// True when every preferred distance is at least `d_min`, in which case
    /// activity awareness implies distance awareness.
    pub fn pref_dominates_d_min(&self) -> bool {
        self.pref.values().all(|&p| p >= self.d_min)
    }

    /// The preferred social distance currently in force: the largest
    /// preference among observed activities, or `d_min` with nobody around.
    pub fn social_distance(&self, frame: &ObservationFrame) -> f64 {
        frame
            .humans
            .iter()
            .filter_map(|h| self.pref.get(&h.activity).copied())
            .fold(self.d_min, f64::max)
    }
}

/// Truth values of the four predicates for one candidate action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PredicateVector {
    pub es: bool,
    pub ed: bool,
    pub not_ec: bool,
    pub et: bool,
}

impl PredicateVector {
    pub const ALL_TRUE: PredicateVector = PredicateVector {
        es: true,
        ed: true,
        not_ec: true,
        et: true,
    };

    /// All 16 combinations, `es` as the most significant bit.
    pub fn enumerate() -> impl Iterator<Item = PredicateVector> {
        (0u8..16).map(|bits| PredicateVector {
            es: bits & 0b1000 != 0,
            ed: bits & 0b0100 != 0,
            not_ec: bits & 0b0010 != 0,
            et: bits & 0b0001 != 0,
        })
    }
}

/// Compliance level, D1 strictest. Every level requires `not_ec` and `et`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    D1,
    D2,
    D3,
    D4,
}

impl Level {
    /// In degradation order.
    pub const ALL: [Level; 4] = [Level::D1, Level::D2, Level::D3, Level::D4];

    pub fn holds(self, pv: PredicateVector) -> bool {
        let base = pv.not_ec && pv.et;
        match self {
            Level::D1 => pv.es && pv.ed && base,
            Level::D2 => pv.es && base,
            Level::D3 => pv.ed && base,
            Level::D4 => base,
        }
    }

    pub fn index(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index())
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "D1" | "d1" | "1" => Ok(Level::D1),
            "D2" | "d2" | "2" => Ok(Level::D2),
            "D3" | "d3" | "3" => Ok(Level::D3),
            "D4" | "d4" | "4" => Ok(Level::D4),
            other => Err(format!("unknown level `{other}`")),
        }
    }
}

/// Most stringent level whose conjunction holds, or `None`.
pub fn classify(pv: PredicateVector) -> Option<Level> {
    Level::ALL.into_iter().find(|l| l.holds(pv))
}

fn clearance_holds(rollout: &Rollout, margin: impl Fn(usize) -> f64) -> bool {
    rollout.steps.iter().all(|step| {
        step.humans.iter().enumerate().all(|(i, &p)| {
            let required = margin(i) + rollout.robot_radius + rollout.humans[i].radius;
            step.robot.distance(p) >= required
        })
    })
}

pub fn eval_activity_awareness(
    rollout: &Rollout,
    params: &ComplianceParams,
) -> Result<bool, ConstraintError> {
    let prefs = rollout
        .humans
        .iter()
        .map(|h| params.preference(&h.activity))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(clearance_holds(rollout, |i| prefs[i]))
}

pub fn eval_distance_awareness(rollout: &Rollout, params: &ComplianceParams) -> bool {
    clearance_holds(rollout, |_| params.d_min)
}

pub fn eval_collision_free(rollout: &Rollout) -> bool {
    clearance_holds(rollout, |_| 0.0)
}

/// Optimistic completion estimate: time already spent, plus the rollout,
/// plus straight-line travel at full speed from the rollout's end.
pub fn eval_time_constraint(rollout: &Rollout, elapsed: f64, params: &ComplianceParams) -> bool {
    let remaining = rollout.final_robot().distance(rollout.goal);
    elapsed + rollout.duration + remaining / params.max_speed <= params.t_max
}

pub fn evaluate_predicates(
    rollout: &Rollout,
    elapsed: f64,
    params: &ComplianceParams,
) -> Result<PredicateVector, ConstraintError> {
    Ok(PredicateVector {
        es: eval_activity_awareness(rollout, params)?,
        ed: eval_distance_awareness(rollout, params),
        not_ec: eval_collision_free(rollout),
        et: eval_time_constraint(rollout, elapsed, params),
    })
}

pub fn compliance_level(
    rollout: &Rollout,
    elapsed: f64,
    params: &ComplianceParams,
) -> Result<(Option<Level>, PredicateVector), ConstraintError> {
    let pv = evaluate_predicates(rollout, elapsed, params)?;
    Ok((classify(pv), pv))
}
