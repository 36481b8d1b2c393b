use vts_bench::episode::{run_episode, EpisodeOptions, EpisodeRecord};
use vts_bench::output::write_csv;
use vts_bench::policy::Scripted;
use vts_bench::render::render_trajectory;
use vts_bench::stats::RunSummary;
use vts_bench::suite::{episode_map, run_one};
use vts_bench::{run_suite, EnvKind, PlannerKind, SuiteConfig};
use vts_core::envs::{FloorConfig, FloorEnv, LightDarkConfig, LightDarkEnv};
use vts_core::{ActionId, EpisodeEnd, FilterParams, ModelSuite, PlannerParams, Rect};

/// A long dark strip: the start is a sliver at the left edge, the goal is
/// twelve east steps away and an optional trap sits five steps in.
fn strip(trap: bool) -> LightDarkEnv {
    let cfg = LightDarkConfig {
        bounds: Rect::new(0.0, 0.0, 3.0, 2.0),
        light: Rect::new(2.7, 0.0, 3.0, 2.0),
        start: Rect::new(0.0, 0.45, 0.001, 0.451),
        goal: Rect::new(2.35, 0.3, 2.6, 0.6),
        fixed_traps: if trap {
            vec![Rect::new(1.0, 0.3, 1.1, 0.6)]
        } else {
            Vec::new()
        },
        trap_strip: Rect::new(1.5, 1.0, 2.0, 2.0),
        ..LightDarkConfig::default()
    };
    LightDarkEnv::new(cfg).unwrap()
}

fn east_forever(env: &LightDarkEnv) -> Scripted {
    Scripted::new(vec![env.spec().action_by_name("E").unwrap()])
}

fn small_suite(env: EnvKind) -> SuiteConfig {
    SuiteConfig {
        env,
        seeds: 2,
        episodes: 3,
        base_seed: 17,
        timing: false,
        pft: PlannerParams {
            iterations: 20,
            ..PlannerParams::default()
        },
        ..SuiteConfig::default()
    }
}

#[test]
fn scripted_episode_reaches_goal_in_twelve_steps() {
    let env = strip(false);
    let r = run_episode(
        &env,
        &env,
        &mut east_forever(&env),
        &FilterParams::default(),
        3,
        0,
        EpisodeOptions::default(),
    )
    .unwrap();
    assert!(r.success);
    assert_eq!(r.end, EpisodeEnd::Success);
    assert_eq!(r.steps, 12);
    assert_eq!(r.reward, 100.0);
    assert_eq!(r.trajectory.len(), 13);
    assert_eq!(r.actions.len(), 12);
    assert_eq!(r.trap_entries, 0);
}

#[test]
fn scripted_episode_through_a_trap_nets_zero() {
    let env = strip(true);
    let r = run_episode(
        &env,
        &env,
        &mut east_forever(&env),
        &FilterParams::default(),
        3,
        0,
        EpisodeOptions::default(),
    )
    .unwrap();
    assert!(r.success);
    assert_eq!(r.steps, 12);
    assert_eq!(r.trap_entries, 1);
    assert_eq!(r.reward, 0.0);
}

#[test]
fn step_limit_is_not_success() {
    let env = strip(false);
    let mut west = Scripted::new(vec![env.spec().action_by_name("W").unwrap()]);
    let r = run_episode(
        &env,
        &env,
        &mut west,
        &FilterParams::default(),
        3,
        0,
        EpisodeOptions::default(),
    )
    .unwrap();
    assert!(!r.success);
    assert_eq!(r.end, EpisodeEnd::StepLimit);
    assert_eq!(r.steps, env.spec().max_steps);
    assert_eq!(r.reward, 0.0);
}

#[test]
fn invalid_filter_aborts_before_any_step() {
    let env = strip(false);
    let bad = FilterParams {
        particles: 0,
        ..FilterParams::default()
    };
    assert!(run_episode(
        &env,
        &env,
        &mut east_forever(&env),
        &bad,
        3,
        0,
        EpisodeOptions::default()
    )
    .is_err());
}

#[test]
fn episodes_replay_byte_for_byte() {
    for env in [EnvKind::Floor, EnvKind::Lightdark, EnvKind::Tiger] {
        let cfg = small_suite(env);
        let a = run_one(&cfg, 99, 1).unwrap();
        let b = run_one(&cfg, 99, 1).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn suite_outputs_are_reproducible() {
    let cfg = small_suite(EnvKind::Lightdark);
    let render = || {
        let out = run_suite(&cfg).unwrap();
        let mut csv = Vec::new();
        write_csv(&out.records, &mut csv).unwrap();
        (csv, serde_json::to_vec(&out.summary).unwrap())
    };
    assert_eq!(render(), render());
}

#[test]
fn csv_has_one_row_per_episode() {
    let cfg = small_suite(EnvKind::Floor);
    let out = run_suite(&cfg).unwrap();
    assert_eq!(out.records.len(), 6);
    let mut buf = Vec::new();
    write_csv(&out.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    for col in [
        "seed",
        "episode",
        "success",
        "steps",
        "reward",
        "mean_particle_distance",
        "mean_plan_time_s",
    ] {
        assert!(header.split(',').any(|c| c == col), "missing column {col}");
    }
    assert_eq!(lines.count(), cfg.seeds * cfg.episodes);
    // Ladder order: all of the first seed's episodes come first.
    let ladder = cfg.seed_ladder();
    assert_eq!(ladder, vec![17, 17 + 1_000_003]);
    assert!(out.records[..3].iter().all(|r| r.seed == ladder[0]));
    assert!(out.records[..3].iter().enumerate().all(|(i, r)| r.episode == i));
}

fn fake(seed: u64, success: bool, steps: usize, reward: f64) -> EpisodeRecord {
    EpisodeRecord {
        seed,
        episode: 0,
        success,
        end: if success {
            EpisodeEnd::Success
        } else {
            EpisodeEnd::StepLimit
        },
        steps,
        reward,
        mean_particle_distance: 0.1,
        mean_plan_time_s: 0.0,
        mean_filter_time_s: 0.0,
        trap_entries: 0,
        degeneracy_events: 0,
        trajectory: Vec::new(),
        belief_means: Vec::new(),
        actions: Vec::new(),
        snapshots: Vec::new(),
        diagnostics: Vec::new(),
    }
}

#[test]
fn summary_is_a_mean_of_seed_means() {
    let mut records: Vec<EpisodeRecord> = (0..5).map(|_| fake(1, true, 10, 100.0)).collect();
    records.extend((0..4).map(|_| fake(2, true, 20, 100.0)));
    records.push(fake(2, false, 200, 0.0));
    let s = RunSummary::of("lightdark", "pft", &[1, 2], &records);
    assert!((s.success_rate.mean - 0.9).abs() < 1e-12);
    assert!((s.success_rate.std_error - 0.1).abs() < 1e-12);
    assert!((s.reward.mean - 90.0).abs() < 1e-12);
    // Steps only count successful episodes: seed means 10 and 20.
    assert!((s.steps.mean - 15.0).abs() < 1e-12);
    assert_eq!(s.episodes, 10);
    assert_eq!(s.successes, 9);
}

#[test]
fn single_episode_summary_has_zero_error() {
    let s = RunSummary::of("floor", "pft", &[4], &[fake(4, true, 31, 100.0)]);
    assert_eq!(s.success_rate.mean, 1.0);
    assert_eq!(s.steps.mean, 31.0);
    assert_eq!(s.reward.mean, 100.0);
    assert_eq!(s.particle_distance.mean, 0.1);
    for m in [s.success_rate, s.steps, s.reward, s.particle_distance] {
        assert_eq!(m.std_error, 0.0);
    }
}

#[test]
fn empty_record_draws_the_map_only() {
    let env = FloorEnv::new(FloorConfig::default()).unwrap();
    let svg = render_trajectory(&fake(0, false, 0, 0.0), env.map());
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<svg").count(), 1);
    assert_eq!(svg.matches("class=\"wall\"").count(), env.map().walls.len());
    assert!(!svg.contains("class=\"traj\""));
    assert!(!svg.contains("class=\"particle\""));
}

#[test]
fn twelve_steps_draw_twelve_segments() {
    let env = strip(false);
    let r = run_episode(
        &env,
        &env,
        &mut east_forever(&env),
        &FilterParams::default(),
        3,
        0,
        EpisodeOptions::default(),
    )
    .unwrap();
    let svg = render_trajectory(&r, env.map());
    assert_eq!(svg.matches("class=\"traj\"").count(), 12);
}

#[test]
fn first_floor_cloud_spans_both_floors() {
    let env = FloorEnv::new(FloorConfig::default()).unwrap();
    let opts = EpisodeOptions {
        snapshots: true,
        ..EpisodeOptions::default()
    };
    let mut policy = Scripted::new(vec![ActionId(0)]);
    let r = run_episode(&env, &env, &mut policy, &FilterParams::default(), 5, 0, opts).unwrap();
    let svg = render_trajectory(&r, env.map());

    let start = svg.find("data-step=\"0\"").expect("step 0 cloud");
    let end = start + svg[start..].find("</g>").unwrap();
    let top = env.map().bounds.max.y;
    let ys: Vec<f64> = svg[start..end]
        .split("cy=\"")
        .skip(1)
        .map(|s| top - s[..s.find('"').unwrap()].parse::<f64>().unwrap() / 400.0)
        .collect();
    assert_eq!(ys.len(), FilterParams::default().particles);
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo < 0.5 && hi > 0.5, "cloud y range [{lo}, {hi}]");
}

#[test]
fn planner_combinations_are_validated() {
    let mut cfg = small_suite(EnvKind::Tiger);
    cfg.planner = PlannerKind::Straight;
    assert!(run_suite(&cfg).unwrap_err().is_config());
    let mut cfg = small_suite(EnvKind::Floor);
    cfg.ablation = vts_bench::Ablation::Traps;
    assert!(run_suite(&cfg).unwrap_err().is_config());
    let mut cfg = small_suite(EnvKind::Floor);
    cfg.seeds = 0;
    assert!(run_suite(&cfg).unwrap_err().is_config());
}

#[test]
fn config_json_round_trips() {
    let cfg = small_suite(EnvKind::Lightdark);
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(SuiteConfig::from_json(&text).unwrap(), cfg);
    assert!(SuiteConfig::from_json("{\"no_such_field\": 1}").is_err());
    let partial = SuiteConfig::from_json("{\"env\": \"tiger\", \"seeds\": 3}").unwrap();
    assert_eq!(partial.env, EnvKind::Tiger);
    assert_eq!(partial.seeds, 3);
    assert_eq!(partial.episodes, SuiteConfig::default().episodes);
}

#[test]
fn trap_episodes_render_their_own_traps() {
    let mut cfg = small_suite(EnvKind::Lightdark);
    cfg.ablation = vts_bench::Ablation::Traps;
    let base = cfg.lightdark_env().unwrap();
    let fixed = base.map().regions_of(vts_core::RegionKind::Trap).count();
    let r0 = run_one(&cfg, 5, 0).unwrap();
    let r1 = run_one(&cfg, 5, 1).unwrap();
    let m0 = episode_map(&cfg, &r0).unwrap().unwrap();
    let m1 = episode_map(&cfg, &r1).unwrap().unwrap();
    let traps = |m: &vts_core::EnvMap| {
        m.regions_of(vts_core::RegionKind::Trap)
            .map(|r| r.rect)
            .collect::<Vec<_>>()
    };
    assert_eq!(traps(&m0).len(), fixed + base.config().trap_count);
    assert_ne!(traps(&m0), traps(&m1));
    assert_eq!(episode_map(&cfg, &r0).unwrap(), Some(m0.clone()));
    let svg = render_trajectory(&r0, &m0);
    assert_eq!(svg.matches("class=\"region trap\"").count(), traps(&m0).len());
}
