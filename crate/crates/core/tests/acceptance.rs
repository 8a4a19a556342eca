//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;

use socnav_core::constraints::{
    classify, compliance_level, ComplianceParams, Level, PredicateVector,
};
use socnav_core::deduction::{
    build_level_tree, check_proof, degrade_and_select, prove_level, Formula, InferenceRule,
    Predicate, ProofTree, ScoredCandidate, Term,
};
use socnav_core::metrics::{aggregate, episode_metrics, trace_metrics};
use socnav_core::planner::CandidateAction;
use socnav_core::simulator::trace::{read_trace, trace_records, trace_to_string};
use socnav_core::simulator::{
    run_batch, run_episode, EpisodeResult, EpisodeStatus, PlannerPolicy, Policy,
    ReasonerBackendKind, ReasonerPolicy,
};
use socnav_core::world_model::{
    build_world_graph, render_observation_prompt, Activity, HumanId, HumanVertex, ObservationFrame,
    RobotVertex,
};
use socnav_core::{ScenarioConfig, Vec2};

use common::{brute_level, random_frame, rng, scan_predicates};

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// 1. Truth table.
fn truth_table() -> Verdict {
    let start = Instant::now();
    let mut agree = 0;
    for pv in PredicateVector::enumerate() {
        let expected = brute_level(pv);
        for (k, level) in Level::ALL.into_iter().enumerate() {
            let disjunct = match k {
                0 => pv.es && pv.ed && pv.not_ec && pv.et,
                1 => pv.es && pv.not_ec && pv.et,
                2 => pv.ed && pv.not_ec && pv.et,
                _ => pv.not_ec && pv.et,
            };
            let classified_ok = (classify(pv) == Some(level)) == (expected == k + 1);
            if level.holds(pv) == disjunct && classified_ok {
                agree += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        agree == 64 && elapsed < Duration::from_secs(1),
        format!("{agree}/64 agreements in {}", secs(elapsed)),
    )
}

// 2. Predicate evaluators against a per-step scan.
fn predicate_oracle() -> Verdict {
    let start = Instant::now();
    let cfg = ScenarioConfig::default();
    let planner = cfg.planner().unwrap();
    let params = &planner.params;
    let mut rng = rng(2);
    let mut agree = [0usize; 4];
    let mut level_agree = 0;
    let mut truths = [0usize; 4];
    const PAIRS: usize = 10_000;
    for _ in 0..PAIRS {
        let frame = random_frame(&mut rng, 8);
        let action = planner.candidates()[rng.random_range(0..planner.candidates().len())];
        let elapsed = frame.robot.elapsed;
        let rollout = planner.rollout(&action, &frame);
        let (level, got) = compliance_level(&rollout, elapsed, params).unwrap();
        let want = scan_predicates(
            &frame,
            action.velocity,
            elapsed,
            params,
            planner.horizon_steps,
        );
        for (k, (g, w)) in [
            (got.es, want.es),
            (got.ed, want.ed),
            (got.not_ec, want.not_ec),
            (got.et, want.et),
        ]
        .into_iter()
        .enumerate()
        {
            agree[k] += (g == w) as usize;
            truths[k] += w as usize;
        }
        let want_level = brute_level(want);
        level_agree += (level.map_or(5, |l| l.index()) == want_level) as usize;
    }
    let elapsed = start.elapsed();
    let all = agree.iter().all(|&a| a == PAIRS) && level_agree == PAIRS;
    let mixed = truths.iter().all(|&t| t > 0 && t < PAIRS);
    verdict(
        all && mixed && elapsed < Duration::from_secs(60),
        format!(
            "Es {}/{PAIRS}, Ed {}/{PAIRS}, not_Ec {}/{PAIRS}, Et {}/{PAIRS}, level {}/{PAIRS}, true counts {:?}, {}",
            agree[0],
            agree[1],
            agree[2],
            agree[3],
            level_agree,
            truths,
            secs(elapsed)
        ),
    )
}

fn retarget(f: &Formula) -> Formula {
    match f {
        Formula::Atom(p, Term::Action(i)) => Formula::Atom(*p, Term::Action(i + 1)),
        Formula::Atom(p, Term::Var(v)) => Formula::Atom(*p, Term::Var(format!("{v}_"))),
        Formula::Not(g) => Formula::negate(retarget(g)),
        Formula::And(gs) => Formula::And(gs.iter().map(retarget).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(retarget).collect()),
        Formula::Implies(a, b) => Formula::implies(retarget(a), retarget(b)),
        Formula::Exists(v, body) => Formula::exists(v, retarget(body)),
    }
}

fn swap_first_predicate(f: &Formula) -> Option<Formula> {
    let next = |p: Predicate| match p {
        Predicate::Es => Predicate::Ed,
        Predicate::Ed => Predicate::Et,
        Predicate::Ec => Predicate::Es,
        Predicate::Et => Predicate::Es,
        Predicate::InActionSpace => Predicate::Es,
    };
    match f {
        Formula::Atom(p, t) => Some(Formula::Atom(next(*p), t.clone())),
        Formula::Not(g) => swap_first_predicate(g).map(Formula::negate),
        Formula::Exists(v, body) => swap_first_predicate(body).map(|b| Formula::exists(v, b)),
        Formula::Implies(a, b) => {
            swap_first_predicate(a).map(|a| Formula::implies(a, (**b).clone()))
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let mut gs = gs.clone();
            gs[0] = swap_first_predicate(&gs[0])?;
            Some(if matches!(f, Formula::And(_)) {
                Formula::And(gs)
            } else {
                Formula::Or(gs)
            })
        }
    }
}

/// Applies mutation `kind` to pre-order node `n`. Returns false when the
/// mutation does not apply there.
fn mutate(tree: &mut ProofTree, n: usize, kind: usize, pick: usize) -> bool {
    let leaf_labels: Vec<u32> = tree.root.nodes().iter().filter_map(|x| x.label).collect();
    let Some(node) = tree.root.node_mut(n) else {
        return false;
    };
    match kind {
        0 => {
            let others: Vec<_> = InferenceRule::ALL
                .into_iter()
                .filter(|r| *r != node.rule)
                .collect();
            node.rule = others[pick % others.len()];
        }
        1 => node.conclusion = Formula::negate(node.conclusion.clone()),
        2 => node.conclusion = retarget(&node.conclusion),
        3 => match swap_first_predicate(&node.conclusion) {
            Some(f) => node.conclusion = f,
            None => return false,
        },
        4 if !node.premises.is_empty() => {
            let at = pick % node.premises.len();
            node.premises.remove(at);
        }
        5 if !node.premises.is_empty() => {
            let dup = node.premises[pick % node.premises.len()].clone();
            node.premises.push(dup);
        }
        6 if node.premises.len() >= 2 => {
            let last = node.premises.len() - 1;
            if node.premises[0].conclusion == node.premises[last].conclusion {
                return false;
            }
            node.premises.swap(0, last);
        }
        7 if !node.discharged.is_empty() => node.discharged.clear(),
        8 => {
            let Some(own) = node.label else { return false };
            let others: Vec<_> = leaf_labels.iter().copied().filter(|l| *l != own).collect();
            node.label = Some(others[pick % others.len()]);
        }
        _ => return false,
    }
    true
}

// 3. Proof round trips and mutation resistance.
fn proof_soundness() -> Verdict {
    let mut round_trips = 0;
    for facts in PredicateVector::enumerate() {
        for level in Level::ALL {
            let action = CandidateAction {
                index: 3,
                velocity: Vec2::new(0.5, 0.0),
            };
            let ok = match prove_level(&action, level, facts) {
                Ok(tree) => level.holds(facts) && check_proof(&tree, facts),
                Err(_) => !level.holds(facts) && !check_proof(&build_level_tree(3, level), facts),
            };
            round_trips += ok as usize;
        }
    }

    let mut rng = rng(3);
    let (mut rejected, mut applied) = (0, 0);
    while applied < 1000 {
        let level = Level::ALL[rng.random_range(0..4)];
        let facts = PredicateVector {
            es: rng.random_bool(0.5) || level == Level::D1 || level == Level::D2,
            ed: rng.random_bool(0.5) || level == Level::D1 || level == Level::D3,
            not_ec: true,
            et: true,
        };
        let subject = rng.random_range(0..49);
        let original = build_level_tree(subject, level);
        assert!(check_proof(&original, facts));
        let mut tree = original.clone();
        let n = rng.random_range(0..tree.root.size());
        if !mutate(
            &mut tree,
            n,
            rng.random_range(0..9),
            rng.random_range(0..64),
        ) || tree == original
        {
            continue;
        }
        applied += 1;
        rejected += !check_proof(&tree, facts) as usize;
    }
    verdict(
        round_trips == 64 && rejected == applied,
        format!("{round_trips}/64 round trips, {rejected}/{applied} mutants rejected"),
    )
}

// 4. Degradation against brute force.
fn degradation() -> Verdict {
    let mut rng = rng(4);
    let (mut agree, mut forced_ok, mut forced_seen) = (0, 0, 0);
    const SETS: usize = 1000;
    for _ in 0..SETS {
        let n = rng.random_range(1..=12);
        let mut indices: Vec<usize> = (0..40).collect();
        for i in 0..n {
            let j = rng.random_range(i..indices.len());
            indices.swap(i, j);
        }
        // Biased toward violations so every level and the forced path occur.
        let cands: Vec<ScoredCandidate> = indices[..n]
            .iter()
            .map(|&index| ScoredCandidate {
                action: CandidateAction {
                    index,
                    velocity: Vec2::new(index as f64 * 0.01, 0.0),
                },
                predicates: PredicateVector {
                    es: rng.random_bool(0.3),
                    ed: rng.random_bool(0.5),
                    not_ec: rng.random_bool(0.7),
                    et: rng.random_bool(0.8),
                },
                score: -(rng.random_range(0..6) as f64) * 0.5,
            })
            .collect();

        let best = cands
            .iter()
            .map(|c| brute_level(c.predicates))
            .min()
            .unwrap();
        let out = degrade_and_select(&cands).unwrap();
        if best == 5 {
            forced_seen += 1;
            let violations = |pv: PredicateVector| (!pv.not_ec) as usize + (!pv.et) as usize;
            let fewest = cands
                .iter()
                .map(|c| violations(c.predicates))
                .min()
                .unwrap();
            forced_ok += (out.forced
                && out.level == Level::D4
                && !out.verified
                && violations(out.predicates) == fewest) as usize;
            agree += out.forced as usize;
            continue;
        }
        let mut want: Option<&ScoredCandidate> = None;
        for c in cands.iter().filter(|c| brute_level(c.predicates) == best) {
            want = match want {
                Some(w)
                    if w.score > c.score
                        || (w.score == c.score && w.action.index < c.action.index) =>
                {
                    Some(w)
                }
                _ => Some(c),
            };
        }
        let want = want.unwrap();
        agree += (!out.forced
            && out.verified
            && out.level.index() == best
            && out.action.index == want.action.index) as usize;
    }
    verdict(
        agree == SETS && forced_ok == forced_seen && forced_seen > 0,
        format!("{agree}/{SETS} selections match, forced path {forced_ok}/{forced_seen}"),
    )
}

fn sample_frames() -> Vec<(ScenarioConfig, ObservationFrame, Option<ObservationFrame>)> {
    let mut out = Vec::new();
    for i in 0..100u64 {
        let n = [0, 5, 10][(i % 3) as usize];
        let cfg = ScenarioConfig::default().with_humans(n).with_seed(1000 + i);
        let r = run_episode(&cfg, &PlannerPolicy::new(cfg.planner().unwrap())).unwrap();
        let tick = (i as usize * 7) % r.trajectory.len();
        let prev = tick.checked_sub(1).map(|p| r.trajectory[p].clone());
        out.push((cfg, r.trajectory[tick].clone(), prev));
    }
    out
}

// 5. Oracle pipeline equals the planner.
fn pipeline_equivalence() -> Verdict {
    let mut agree = 0;
    let frames = sample_frames();
    let mut levels = [0usize; 4];
    for (cfg, frame, prev) in &frames {
        let planner = cfg.planner().unwrap();
        let want = planner
            .plan_step(frame, prev.as_ref(), frame.robot.elapsed)
            .unwrap();
        let policy = ReasonerPolicy::new(cfg, cfg.planner().unwrap(), ReasonerBackendKind::Oracle);
        let got = policy.act(frame, prev.as_ref()).unwrap();
        let out = got.outcome.unwrap();
        levels[want.level.index() - 1] += 1;
        agree += (got.chain_error.is_none()
            && out.action == want.action
            && out.level == want.level
            && got.velocity == want.action.velocity) as usize;
    }
    verdict(
        agree == frames.len(),
        format!(
            "{agree}/{} identical (planner levels D1..D4 {:?})",
            frames.len(),
            levels
        ),
    )
}

struct Golden {
    prev: Option<ObservationFrame>,
    curr: ObservationFrame,
    social: f64,
    expected: &'static str,
}

fn robot_at(p: (f64, f64), v: (f64, f64), goal: (f64, f64), task: &str, time: f64) -> RobotVertex {
    RobotVertex {
        position: Vec2::new(p.0, p.1),
        velocity: Vec2::new(v.0, v.1),
        radius: 0.3,
        goal: Vec2::new(goal.0, goal.1),
        task: task.into(),
        elapsed: time,
    }
}

fn person(id: u32, p: (f64, f64), v: (f64, f64), radius: f64, activity: &str) -> HumanVertex {
    HumanVertex {
        id: HumanId(id),
        position: Vec2::new(p.0, p.1),
        velocity: Vec2::new(v.0, v.1),
        radius,
        activity: Activity::from(activity.to_owned()),
    }
}

fn frame(time: f64, robot: RobotVertex, humans: Vec<HumanVertex>) -> ObservationFrame {
    ObservationFrame {
        time,
        robot,
        humans,
    }
}

const NAV: &str = "navigate to the destination";

fn goldens() -> Vec<Golden> {
    let still = |t| robot_at((0.0, 0.0), (0.0, 0.0), (0.0, 4.0), NAV, t);
    vec![
        Golden {
            prev: None,
            curr: frame(0.0, still(0.0), vec![]),
            social: 0.5,
            expected: "[robot] is located at [(0.00, 0.00)] with velocity [(0.00, 0.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [0.50].",
        },
        Golden {
            prev: None,
            curr: frame(0.0, still(0.0), vec![person(1, (3.0, 4.0), (0.0, 0.0), 0.3, "walking")]),
            social: 0.8,
            expected: "[robot] is located at [(0.00, 0.00)] with velocity [(0.00, 0.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [0.80].
[human_1] is located at [(3.00, 4.00)] with velocity [(0.00, 0.00)] and the collision radius [0.30], performing personal activity [walking].
The relative distance [5.00] between [human_1] and [robot] is observed at the current timestep.",
        },
        Golden {
            prev: Some(frame(0.0, robot_at((0.0, -2.0), (0.0, 1.0), (0.0, 4.0), NAV, 0.0), vec![])),
            curr: frame(0.25, robot_at((0.0, -1.0), (0.0, 1.0), (0.0, 4.0), NAV, 0.25), vec![]),
            social: 0.5,
            expected: "[robot] is located at [(0.00, -1.00)] with velocity [(0.00, 1.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [0.50].
The absolute distance [5.00] between agent [robot] and destination [(0.00, 4.00)] has [decreased], compared to the last timestep with a difference [-1.00].",
        },
        Golden {
            prev: Some(frame(0.0, still(0.0), vec![person(2, (3.0, 0.0), (0.3, 0.4), 0.3, "walking")])),
            curr: frame(0.25, still(0.25), vec![person(2, (3.0, 4.0), (0.6, 0.8), 0.3, "walking")]),
            social: 0.8,
            expected: "[robot] is located at [(0.00, 0.00)] with velocity [(0.00, 0.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [0.80].
[human_2] is located at [(3.00, 4.00)] with velocity [(0.60, 0.80)] and the collision radius [0.30], performing personal activity [walking].
The absolute distance [4.00] between agent [robot] and destination [(0.00, 4.00)] has [unchanged], compared to the last timestep with a difference [0.00].
The velocity [1.00] of agent [human_2] has [increased] compared to the last timestep, with a difference [0.50].
The relative distance [5.00] between [human_2] and [robot] has [increased] compared to the last timestep, with a difference [2.00].",
        },
        Golden {
            prev: None,
            curr: frame(
                0.0,
                still(0.0),
                vec![
                    person(3, (4.0, 3.0), (0.0, 0.0), 0.4, "sitting"),
                    person(1, (0.0, 3.0), (0.0, 0.0), 0.25, "talking"),
                ],
            ),
            social: 1.2,
            expected: "[robot] is located at [(0.00, 0.00)] with velocity [(0.00, 0.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [1.20].
[human_1] is located at [(0.00, 3.00)] with velocity [(0.00, 0.00)] and the collision radius [0.25], performing personal activity [talking].
[human_3] is located at [(4.00, 3.00)] with velocity [(0.00, 0.00)] and the collision radius [0.40], performing personal activity [sitting].
The relative distance [3.00] between [human_1] and [robot] is observed at the current timestep.
The relative distance [5.00] between [human_3] and [robot] is observed at the current timestep.
The relative distance [4.00] between [human_1] and [human_3] is observed at the current timestep.",
        },
        Golden {
            prev: None,
            curr: frame(
                3.0,
                robot_at((1.5, -2.25), (-0.5, 0.75), (-3.0, 2.5), NAV, 3.0),
                vec![person(4, (-1.234, -5.678), (-0.004, 0.126), 0.3, "phone")],
            ),
            social: 0.8,
            expected: "[robot] is located at [(1.50, -2.25)] with velocity [(-0.50, 0.75)] toward the destination [(-3.00, 2.50)], executing task [navigate to the destination] with social distance [0.80].
[human_4] is located at [(-1.23, -5.68)] with velocity [(0.00, 0.13)] and the collision radius [0.30], performing personal activity [phone].
The relative distance [4.38] between [human_4] and [robot] is observed at the current timestep.",
        },
        Golden {
            prev: Some(frame(0.0, still(0.0), vec![person(1, (2.0, 0.0), (0.5, 0.0), 0.3, "standing")])),
            curr: frame(
                0.25,
                robot_at((0.0, 0.0005), (0.0, 0.0), (0.0, 4.0), NAV, 0.25),
                vec![person(1, (1.9992, 0.0), (0.5005, 0.0), 0.3, "standing")],
            ),
            social: 0.6,
            expected: "[robot] is located at [(0.00, 0.00)] with velocity [(0.00, 0.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [0.60].
[human_1] is located at [(2.00, 0.00)] with velocity [(0.50, 0.00)] and the collision radius [0.30], performing personal activity [standing].
The absolute distance [4.00] between agent [robot] and destination [(0.00, 4.00)] has [unchanged], compared to the last timestep with a difference [0.00].
The velocity [0.50] of agent [human_1] has [unchanged] compared to the last timestep, with a difference [0.00].
The relative distance [2.00] between [human_1] and [robot] has [unchanged] compared to the last timestep, with a difference [0.00].",
        },
        Golden {
            prev: None,
            curr: frame(0.0, still(0.0), vec![person(7, (0.0, -2.0), (0.0, 0.0), 0.35, "queueing")]),
            social: 1.0,
            expected: "[robot] is located at [(0.00, 0.00)] with velocity [(0.00, 0.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [1.00].
[human_7] is located at [(0.00, -2.00)] with velocity [(0.00, 0.00)] and the collision radius [0.35], performing personal activity [queueing].
The relative distance [2.00] between [human_7] and [robot] is observed at the current timestep.",
        },
        Golden {
            prev: None,
            curr: frame(
                0.0,
                robot_at((2.0, 1.0), (0.25, 0.0), (5.0, 5.0), "deliver the parcel to room 12", 0.0),
                vec![],
            ),
            social: 0.6,
            expected: "[robot] is located at [(2.00, 1.00)] with velocity [(0.25, 0.00)] toward the destination [(5.00, 5.00)], executing task [deliver the parcel to room 12] with social distance [0.60].",
        },
        Golden {
            prev: Some(frame(
                1.0,
                robot_at((0.0, 0.0), (0.0, 1.0), (0.0, 4.0), NAV, 1.0),
                vec![
                    person(1, (1.0, 0.0), (0.0, 0.0), 0.3, "standing"),
                    person(2, (-2.0, 0.0), (0.0, 0.0), 0.3, "talking"),
                ],
            )),
            curr: frame(
                1.25,
                robot_at((0.0, 0.25), (0.0, 1.0), (0.0, 4.0), NAV, 1.25),
                vec![
                    person(1, (1.0, 0.0), (0.0, 0.0), 0.3, "standing"),
                    person(2, (-2.0, 0.0), (0.0, 0.0), 0.3, "talking"),
                    person(5, (0.0, 2.0), (0.0, 0.0), 0.3, "sitting"),
                ],
            ),
            social: 1.2,
            expected: "[robot] is located at [(0.00, 0.25)] with velocity [(0.00, 1.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [1.20].
[human_1] is located at [(1.00, 0.00)] with velocity [(0.00, 0.00)] and the collision radius [0.30], performing personal activity [standing].
[human_2] is located at [(-2.00, 0.00)] with velocity [(0.00, 0.00)] and the collision radius [0.30], performing personal activity [talking].
[human_5] is located at [(0.00, 2.00)] with velocity [(0.00, 0.00)] and the collision radius [0.30], performing personal activity [sitting].
The absolute distance [3.75] between agent [robot] and destination [(0.00, 4.00)] has [decreased], compared to the last timestep with a difference [-0.25].
The velocity [0.00] of agent [human_1] has [unchanged] compared to the last timestep, with a difference [0.00].
The velocity [0.00] of agent [human_2] has [unchanged] compared to the last timestep, with a difference [0.00].
The relative distance [1.03] between [human_1] and [robot] has [increased] compared to the last timestep, with a difference [0.03].
The relative distance [2.02] between [human_2] and [robot] has [increased] compared to the last timestep, with a difference [0.02].
The relative distance [1.75] between [human_5] and [robot] is observed at the current timestep.
The relative distance [3.00] between [human_1] and [human_2] has [unchanged] compared to the last timestep, with a difference [0.00].
The relative distance [2.24] between [human_1] and [human_5] is observed at the current timestep.
The relative distance [2.83] between [human_2] and [human_5] is observed at the current timestep.",
        },
        Golden {
            prev: Some(frame(
                2.0,
                robot_at((0.0, 0.0), (0.0, 1.0), (0.0, 4.0), NAV, 2.0),
                vec![person(3, (0.0, 2.0), (0.0, -1.0), 0.3, "walking")],
            )),
            curr: frame(
                2.25,
                robot_at((0.0, 0.25), (0.0, 1.0), (0.0, 4.0), NAV, 2.25),
                vec![person(3, (0.0, 1.75), (0.0, -0.6), 0.3, "walking")],
            ),
            social: 0.8,
            expected: "[robot] is located at [(0.00, 0.25)] with velocity [(0.00, 1.00)] toward the destination [(0.00, 4.00)], executing task [navigate to the destination] with social distance [0.80].
[human_3] is located at [(0.00, 1.75)] with velocity [(0.00, -0.60)] and the collision radius [0.30], performing personal activity [walking].
The absolute distance [3.75] between agent [robot] and destination [(0.00, 4.00)] has [decreased], compared to the last timestep with a difference [-0.25].
The velocity [0.60] of agent [human_3] has [decreased] compared to the last timestep, with a difference [-0.40].
The relative distance [1.50] between [human_3] and [robot] has [decreased] compared to the last timestep, with a difference [-0.50].",
        },
    ]
}

// 6. Template fidelity.
fn template_fidelity() -> Verdict {
    let goldens = goldens();
    let mut matched = 0;
    let mut first_diff = String::new();
    for (k, g) in goldens.iter().enumerate() {
        let graph = build_world_graph(g.prev.as_ref(), &g.curr).unwrap();
        let text = render_observation_prompt(&graph, g.social);
        if text == g.expected {
            matched += 1;
        } else if first_diff.is_empty() {
            let line = text
                .lines()
                .zip(g.expected.lines())
                .find(|(a, b)| a != b)
                .map(|(a, b)| format!("got `{a}` want `{b}`"))
                .unwrap_or_else(|| "line count differs".into());
            first_diff = format!("; golden {k}: {line}");
        }
    }
    verdict(
        matched == goldens.len() && goldens.len() >= 10,
        format!(
            "{matched}/{} golden graphs byte-identical{first_diff}",
            goldens.len()
        ),
    )
}

fn path_length(r: &EpisodeResult) -> f64 {
    r.trajectory
        .windows(2)
        .map(|w| w[0].robot.position.distance(w[1].robot.position))
        .sum()
}

// 7. Safety of successful planner episodes; proofs check.
fn safety() -> Verdict {
    let cfg = ScenarioConfig::default().with_humans(5);
    let planner = cfg.planner().unwrap();
    let seeds: Vec<u64> = (0..500).collect();
    let results: Vec<_> = run_batch(&cfg, &PlannerPolicy::new(planner.clone()), &seeds, 0)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    let mut unsafe_success = 0;
    let (mut checked, mut bad_proofs, mut forced) = (0, 0, 0);
    for r in &results {
        if r.status == EpisodeStatus::Success {
            let touched = r.trajectory.iter().any(|f| {
                f.humans
                    .iter()
                    .any(|h| f.robot.position.distance(h.position) < f.robot.radius + h.radius)
            });
            unsafe_success += touched as usize;
        }
        for (tick, d) in r.decisions.iter().enumerate() {
            let o = d.outcome.as_ref().unwrap();
            if o.forced {
                forced += 1;
                continue;
            }
            let frame = &r.trajectory[tick];
            let facts = planner
                .evaluate_action(&o.action, frame, frame.robot.elapsed)
                .unwrap()
                .predicates;
            checked += 1;
            bad_proofs += !(check_proof(&o.tree, facts) && facts == o.predicates) as usize;
        }
    }
    let successes = results
        .iter()
        .filter(|r| r.status == EpisodeStatus::Success)
        .count();
    verdict(
        unsafe_success == 0 && bad_proofs == 0,
        format!(
            "{successes}/500 successes, {unsafe_success} with contact; {checked} proofs checked, {bad_proofs} rejected, {forced} forced"
        ),
    )
}

// 8. Empty crowd efficiency.
fn empty_crowd() -> Verdict {
    let mut rng = rng(8);
    let (mut ok, mut worst_np, mut worst_nt) = (0, 0.0f64, 0.0f64);
    const EPISODES: usize = 100;
    let mut success = 0;
    for seed in 0..EPISODES as u64 {
        let (start, goal) = loop {
            let s = Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let g = Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            if s.distance(g) >= 5.0 {
                break (s, g);
            }
        };
        let mut cfg = ScenarioConfig::default().with_humans(0).with_seed(seed);
        cfg.robot_start = start;
        cfg.robot_goal = goal;
        let policy = ReasonerPolicy::new(&cfg, cfg.planner().unwrap(), ReasonerBackendKind::Oracle);
        let r = run_episode(&cfg, &policy).unwrap();
        let straight = start.distance(goal);
        let ideal_t = straight / cfg.max_speed;
        let np_err = (path_length(&r) - straight).abs() / straight;
        let nt_err = (r.trajectory.last().unwrap().time - ideal_t).abs() / ideal_t;
        worst_np = worst_np.max(np_err);
        worst_nt = worst_nt.max(nt_err);
        success += (r.status == EpisodeStatus::Success) as usize;
        ok += (r.status == EpisodeStatus::Success && np_err <= 0.1 && nt_err <= 0.1) as usize;
    }
    verdict(
        ok == EPISODES,
        format!(
            "SR {}/{EPISODES}, {ok} within 10%; worst NP error {:.1}%, worst NT error {:.1}%",
            success,
            worst_np * 100.0,
            worst_nt * 100.0
        ),
    )
}

// 9. Metric identities.
fn metric_identities() -> Verdict {
    let cfg = ScenarioConfig::default().with_humans(5);
    let params: ComplianceParams = cfg.compliance();
    let policy = ReasonerPolicy::new(&cfg, cfg.planner().unwrap(), ReasonerBackendKind::Oracle);
    let seeds: Vec<u64> = (0..200).collect();
    let (mut nt_exact, mut np_bound, mut literal_np, mut recomputed) = (0, 0, 0, 0);
    let mut successes = 0;
    for r in run_batch(&cfg, &policy, &seeds, 0) {
        let r = r.unwrap();
        let m = episode_metrics(&r, &params).unwrap();
        nt_exact += (m.nt == r.terminal_tick() as f64 * cfg.dt) as usize;

        let start = r.trajectory[0].robot.position;
        let end = r.trajectory.last().unwrap().robot.position;
        let straight = start.distance(cfg.robot_goal);
        let reach = if r.status == EpisodeStatus::Success {
            successes += 1;
            straight - cfg.goal_radius
        } else {
            0.0
        };
        np_bound += (m.np >= start.distance(end) && m.np >= reach) as usize;
        literal_np += (m.np >= straight) as usize;

        let text = trace_to_string(&trace_records(&r, false));
        let back = trace_metrics(r.seed, &read_trace(&text).unwrap(), &params).unwrap();
        recomputed += (back == m && back.np.to_bits() == m.np.to_bits()) as usize;
    }
    let n = seeds.len();
    verdict(
        nt_exact == n && np_bound == n && recomputed == n,
        format!(
            "NT exact {nt_exact}/{n}; NP >= |start - end| and, on success, NP >= |start - goal| - goal_radius {np_bound}/{n}; \
             NP >= |start - goal| literally {literal_np}/{n} ({successes} successes stop inside the goal radius); \
             trace recomputation bit-exact {recomputed}/{n}"
        ),
    )
}

// 10. Densification never helps.
fn densification() -> Verdict {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..500).collect();
    let mut sr = [0.0; 2];
    for (k, n) in [5, 10].into_iter().enumerate() {
        let cfg = ScenarioConfig::default().with_humans(n);
        let policy = ReasonerPolicy::new(&cfg, cfg.planner().unwrap(), ReasonerBackendKind::Oracle);
        let params = cfg.compliance();
        let metrics: Vec<_> = run_batch(&cfg, &policy, &seeds, 0)
            .into_iter()
            .map(|r| episode_metrics(&r.unwrap(), &params).unwrap())
            .collect();
        sr[k] = aggregate(&metrics).unwrap().sr;
    }
    let [p5, p10] = sr;
    let noise = 2.0 * (p5 * (1.0 - p5) / 500.0 + p10 * (1.0 - p10) / 500.0).sqrt();
    let elapsed = start.elapsed();
    verdict(
        p10 <= p5 + noise && elapsed < Duration::from_secs(600),
        format!(
            "SR(5) {p5:.3}, SR(10) {p10:.3}, allowed slack {noise:.3}, {}",
            secs(elapsed)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("constraint truth table", truth_table),
        ("predicate scan oracle", predicate_oracle),
        ("proof soundness and mutation resistance", proof_soundness),
        ("degradation against brute force", degradation),
        ("oracle pipeline equals planner", pipeline_equivalence),
        ("template fidelity", template_fidelity),
        ("safety of successful episodes", safety),
        ("empty-crowd efficiency", empty_crowd),
        ("metric identities", metric_identities),
        ("densification never helps", densification),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failed += !v.pass as usize;
        println!(
            "criterion {:>2} {}: {} ({})",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            v.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
