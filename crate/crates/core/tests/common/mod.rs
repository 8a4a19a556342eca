#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use socnav_core::constraints::{ComplianceParams, PredicateVector};
use socnav_core::world_model::{Activity, HumanId, HumanVertex, ObservationFrame, RobotVertex};
use socnav_core::Vec2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_vec(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec2 {
    Vec2::new(rng.random_range(lo..hi), rng.random_range(lo..hi))
}

/// A frame with the crowd clustered around the robot so every predicate
/// takes both values across samples.
pub fn random_frame(rng: &mut ChaCha8Rng, max_humans: usize) -> ObservationFrame {
    let robot_p = uniform_vec(rng, -4.0, 4.0);
    let n = rng.random_range(0..=max_humans);
    let humans = (0..n)
        .map(|k| HumanVertex {
            id: HumanId(k as u32 + 1),
            position: robot_p + uniform_vec(rng, -3.0, 3.0),
            velocity: uniform_vec(rng, -1.0, 1.0),
            radius: rng.random_range(0.2..0.4),
            activity: Activity::BUILTIN[rng.random_range(0..Activity::BUILTIN.len())].clone(),
        })
        .collect();
    let elapsed = rng.random_range(0.0..55.0);
    ObservationFrame {
        time: elapsed,
        robot: RobotVertex {
            position: robot_p,
            velocity: uniform_vec(rng, -1.0, 1.0).clamp_norm(1.0),
            radius: 0.3,
            goal: uniform_vec(rng, -6.0, 6.0),
            task: "navigate to the destination".into(),
            elapsed,
        },
        humans,
    }
}

/// Predicate truth by direct scan: every future step, every human, each
/// clearance requirement checked separately.
pub fn scan_predicates(
    frame: &ObservationFrame,
    velocity: Vec2,
    elapsed: f64,
    params: &ComplianceParams,
    horizon_steps: usize,
) -> PredicateVector {
    let mut es = true;
    let mut ed = true;
    let mut clear = true;
    let r = &frame.robot;
    for k in 1..=horizon_steps {
        let t = k as f64 * params.dt;
        let robot = Vec2::new(r.position.x + velocity.x * t, r.position.y + velocity.y * t);
        for h in &frame.humans {
            let hp = Vec2::new(
                h.position.x + h.velocity.x * t,
                h.position.y + h.velocity.y * t,
            );
            let d = ((robot.x - hp.x).powi(2) + (robot.y - hp.y).powi(2)).sqrt();
            let radii = r.radius + h.radius;
            if d < params.pref[&h.activity] + radii {
                es = false;
            }
            if d < params.d_min + radii {
                ed = false;
            }
            if d < radii {
                clear = false;
            }
        }
    }
    let horizon = horizon_steps as f64 * params.dt;
    let end = Vec2::new(
        r.position.x + velocity.x * horizon,
        r.position.y + velocity.y * horizon,
    );
    let remaining = ((end.x - r.goal.x).powi(2) + (end.y - r.goal.y).powi(2)).sqrt();
    PredicateVector {
        es,
        ed,
        not_ec: clear,
        et: elapsed + horizon + remaining / params.max_speed <= params.t_max,
    }
}

/// Level index 1..=4 from the four disjuncts written out by hand; 5 when
/// no disjunct holds.
pub fn brute_level(pv: PredicateVector) -> usize {
    let PredicateVector { es, ed, not_ec, et } = pv;
    if es && ed && not_ec && et {
        1
    } else if es && not_ec && et {
        2
    } else if ed && not_ec && et {
        3
    } else if not_ec && et {
        4
    } else {
        5
    }
}
