use tabletop::demo::{all_demos, demo};
use tabletop::report::Report;
use tabletop::{load_scene, parse_library, run_source, RunOutput, ScenarioError};
use tabletop_core::{CapabilityProfile, Outcome};

fn run(condition: &str, task: &str, scene: &str, seed: u64) -> RunOutput {
    let d = demo(condition, task).unwrap();
    let scenario = load_scene(scene).unwrap();
    let lib = parse_library(d.library).unwrap();
    run_source(&scenario, d.tree, &lib, &CapabilityProfile::by_name(condition).unwrap(), seed).unwrap()
}

#[test]
fn every_demo_completes_its_task() {
    for d in all_demos() {
        let out = run(d.condition, d.task, &d.scene(), 0);
        let r = &out.report;
        assert_eq!(r.outcome, "success", "{}", d.file_stem());
        assert_eq!((r.score.n_nodes, r.score.n_errors), (2, 0), "{}", d.file_stem());
        if d.task == "c" {
            assert_eq!(r.score.link_credit, 1.0, "{}", d.file_stem());
        }
        assert!(r.score.t > 0.0 && r.score.t < 0.1, "{}", d.file_stem());
    }
}

#[test]
fn demos_need_their_profile() {
    let d = demo("smartmove", "a").unwrap();
    let scenario = load_scene("task_a").unwrap();
    let lib = parse_library(d.library).unwrap();
    for weaker in ["simple", "motion", "relative"] {
        let err = run_source(&scenario, d.tree, &lib, &CapabilityProfile::by_name(weaker).unwrap(), 0).unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid(_)), "{weaker}");
    }
    let d = demo("relative", "a").unwrap();
    let lib = parse_library(d.library).unwrap();
    let err = run_source(&scenario, d.tree, &lib, &CapabilityProfile::smartmove(), 0).unwrap_err();
    assert!(matches!(err, ScenarioError::Invalid(_)));
}

#[test]
fn missing_symbol_is_a_failure_not_an_error() {
    let d = demo("smartmove", "a").unwrap();
    let scenario = load_scene("task_a").unwrap();
    let mut lib = parse_library(d.library).unwrap();
    lib.remove("place-2");
    let out = run_source(&scenario, d.tree, &lib, &CapabilityProfile::smartmove(), 0).unwrap();
    let r = &out.report;
    assert_eq!(r.outcome, "failure");
    assert_eq!(r.score.t, 1.0);
    assert_eq!(r.score.n_nodes, 1);
    assert_eq!(r.score.total, 1.0);
}

#[test]
fn moved_scene_separates_smartmove_from_relative() {
    let rel = run("relative", "c", "gen_moved", 0);
    assert_eq!(rel.report.score.n_nodes, 1);
    assert!(rel.report.trace.world_events.iter().any(|e| e.ends_with("gripper closed on nothing")));
    let smart = run("smartmove", "c", "gen_moved", 0);
    assert_eq!((smart.report.score.n_nodes, smart.report.score.link_credit), (2, 1.0));
    assert!(smart.report.score.total > rel.report.score.total);
    let motion = run("motion", "c", "gen_moved", 0);
    assert_eq!(motion.report.score.n_nodes, 0);
}

#[test]
fn obstacle_scene_separates_smartmove_from_motion() {
    let smart = run("smartmove", "c", "gen_obstacles", 0);
    assert_eq!(smart.trace.outcome, Outcome::Success);
    assert_eq!(smart.report.trace.knocks, 0);
    let held = &smart.report.trace.world_events;
    assert!(!held.iter().any(|e| e.ends_with("closed on node_1")), "node_1 is blocked by link_2");
    assert!(held.iter().any(|e| e.ends_with("link_3 mated on node_2")), "{held:?}");
    let motion = run("motion", "c", "gen_obstacles", 0);
    assert!(motion.report.trace.world_events.iter().any(|e| e.ends_with("knocked link_2")));
    assert_eq!(motion.report.score.n_errors, 1);
}

#[test]
fn reports_roundtrip_and_rescore() {
    for (c, t, s) in [
        ("smartmove", "c", "task_c"),
        ("relative", "c", "gen_moved"),
        ("motion", "c", "gen_obstacles"),
        ("simple", "a", "task_a"),
    ] {
        let r = run(c, t, s, 5).report;
        let text = r.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
        let s = back.rescore().unwrap();
        assert!((s.total - r.score.total).abs() < 1e-9);
        assert_eq!((s.n_nodes, s.n_errors), (r.score.n_nodes, r.score.n_errors));
    }
}

#[test]
fn budget_limits_the_run() {
    let d = demo("smartmove", "c").unwrap();
    let mut scenario = load_scene("task_c").unwrap();
    scenario.budget_s = 10.0;
    let lib = parse_library(d.library).unwrap();
    let r = run_source(&scenario, d.tree, &lib, &CapabilityProfile::smartmove(), 0).unwrap().report;
    assert_eq!(r.outcome, "budget_exhausted");
    assert!((r.sim_time_s - 10.0).abs() < 1e-9);
    assert_eq!(r.score.t, 1.0);
    assert!(r.objects.iter().all(|o| !o.attached), "halting drops what is held");
}

#[test]
fn seeds_and_noise() {
    let d = demo("smartmove", "a").unwrap();
    let mut scenario = load_scene("task_a").unwrap();
    scenario.perception_noise = 0.002;
    let lib = parse_library(d.library).unwrap();
    let p = CapabilityProfile::smartmove();
    let a = run_source(&scenario, d.tree, &lib, &p, 1).unwrap().report.to_json();
    let b = run_source(&scenario, d.tree, &lib, &p, 1).unwrap().report.to_json();
    assert_eq!(a, b);
    let c = run_source(&scenario, d.tree, &lib, &p, 2).unwrap().report;
    assert_eq!(c.outcome, "success");
}
