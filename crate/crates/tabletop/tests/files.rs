use tabletop::demo::all_demos;
use tabletop::library::{install, library_to_json, parse_library};
use tabletop::profile_file::{load_profile, ProfileJson};
use tabletop::scene::{builtin_scene_names, load_scene, parse_scene, LoadError};
use tabletop_core::{CapabilityProfile, Category, KnowledgeBase, TaskGoal};

#[test]
fn builtin_scenes_load() {
    let names = builtin_scene_names();
    assert_eq!(names, ["task_a", "task_b", "task_c", "gen_obstacles", "gen_moved"]);
    for n in names {
        let s = load_scene(n).unwrap();
        assert_eq!(s.budget_s, 900.0);
        let nodes = s.world.objects.iter().filter(|o| o.category == Category::Node).count();
        assert!(nodes >= 2, "{n}");
        assert!(s.world.objects.iter().all(|o| o.pose.position().y < 0.05), "{n}: objects start right");
    }
    assert_eq!(load_scene("task_b").unwrap().goal, TaskGoal::TaskAB);
    assert_eq!(load_scene("gen_obstacles").unwrap().goal, TaskGoal::TaskC);
}

#[test]
fn scene_file_roundtrip() {
    for n in builtin_scene_names() {
        let s = load_scene(n).unwrap();
        let text = serde_json::to_string(&s.to_file()).unwrap();
        assert_eq!(parse_scene(n, &text).unwrap(), s);
    }
}

#[test]
fn scene_errors() {
    assert!(matches!(load_scene("task_z"), Err(LoadError::Unknown(_))));
    assert!(matches!(load_scene("/nonexistent/scene.json"), Err(LoadError::Io { .. })));
    let bad = r#"{"robot_home":[0,0,0.4,0],"table_z":0,"objects":[{"id":"a","category":"cube","pose":{"xyz":[0.3,0,0.025],"yaw":0},"extents":[0.025,0.025,0.025]}]}"#;
    let err = parse_scene("bad", bad).unwrap_err().to_string();
    assert!(err.contains("cube"), "{err}");
    let dup = r#"{"robot_home":[0,0,0.4,0],"table_z":0,"objects":[
        {"id":"a","category":"node","pose":{"xyz":[0.3,0,0.025],"yaw":0},"extents":[0.025,0.025,0.025]},
        {"id":"a","category":"node","pose":{"xyz":[0.4,0,0.025],"yaw":0},"extents":[0.025,0.025,0.025]}]}"#;
    assert!(parse_scene("dup", dup).unwrap_err().to_string().contains("duplicate"));
    let noisy = r#"{"robot_home":[0,0,0.4,0],"table_z":0,"perception_noise":-1,"objects":[]}"#;
    assert!(parse_scene("noisy", noisy).is_err());
}

#[test]
fn goal_defaults_from_contents() {
    let two = r#"{"robot_home":[0,0,0.4,0],"table_z":0,"objects":[
        {"id":"a","category":"node","pose":{"xyz":[0.3,0,0.025],"yaw":0},"extents":[0.025,0.025,0.025]}]}"#;
    let s = parse_scene("two", two).unwrap();
    assert_eq!(s.goal, TaskGoal::TaskAB);
    assert_eq!(s.world.objects[0].symmetry_order, 4);
}

#[test]
fn libraries_roundtrip_and_install() {
    for d in all_demos() {
        let lib = parse_library(d.library).unwrap();
        let text = library_to_json(&lib);
        assert_eq!(parse_library(&text).unwrap(), lib, "{}", d.file_stem());
        assert_eq!(library_to_json(&parse_library(&text).unwrap()), text);
        let scene = load_scene(&d.scene()).unwrap();
        let mut kb = KnowledgeBase::default();
        install(&mut kb, &scene.world, &lib).unwrap();
        assert_eq!(kb.taught.len(), lib.len());
    }
}

#[test]
fn library_errors() {
    let not_unit = r#"{"g":{"kind":"grasp_spec","grasp":{"xyz":[0,0,0.02],"quat":[1,1,0,0]},"backoff":0.1}}"#;
    assert!(parse_library(not_unit).unwrap_err().to_string().contains("unit"));
    let no_query =
        r#"{"r":{"kind":"release_spec","frame":"object","pose":{"xyz":[0,0,0.05],"quat":[0,1,0,0]},"backoff":0.1}}"#;
    let lib = parse_library(no_query).unwrap();
    let scene = load_scene("task_c").unwrap();
    let (name, _) = install(&mut KnowledgeBase::default(), &scene.world, &lib).unwrap_err();
    assert_eq!(name, "r");
    let bad_query = r#"{"r":{"kind":"release_spec","frame":"object","pose":{"xyz":[0,0,0.05],"quat":[0,1,0,0]},"backoff":0.1,"query":"(is cube)"}}"#;
    assert!(parse_library(bad_query).is_err());
    let limits = r#"{"w":{"kind":"joint_waypoint","joint":[2.0,0,0.3,0]}}"#;
    assert!(parse_library(limits).is_err());
}

#[test]
fn profile_files() {
    for name in ["simple", "motion", "relative", "smartmove"] {
        let p = load_profile(name).unwrap();
        let json = serde_json::to_string(&ProfileJson::from_profile(&p)).unwrap();
        let back: ProfileJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_profile().unwrap(), p);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mine.json");
    let custom = CapabilityProfile::smartmove();
    let mut raw = ProfileJson::from_profile(&custom);
    raw.name = "mine".into();
    std::fs::write(&path, serde_json::to_string(&raw).unwrap()).unwrap();
    assert_eq!(load_profile(path.to_str().unwrap()).unwrap().name, "mine");
    assert!(load_profile("wizard").is_err());
}
