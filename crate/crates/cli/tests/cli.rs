//! Command-level behavior of the `icdc` binary: outputs, exit codes, seeds.

use std::path::Path;
use std::process::{Command, Output};

use icdc_core::correspondence::read_csv;
use icdc_core::formats::read_pfm_file;

fn icdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icdc")).args(args).env_remove("ICDC_SEED").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = icdc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty())
}

/// Default synth: one 50-frame straight corridor trajectory.
fn synth_default(dir: &Path) -> std::path::PathBuf {
    let ds = dir.join("ds");
    ok(&["synth", "--out", p(&ds)]);
    ds
}

#[test]
fn synth_writes_fifty_frames_reproducibly() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let pfms = std::fs::read_dir(ds.join("depth")).unwrap().count();
    assert_eq!(pfms, 50);
    let poses = std::fs::read_to_string(ds.join("poses.txt")).unwrap();
    let manifest = std::fs::read_to_string(ds.join("manifest.txt")).unwrap();
    assert!(manifest.contains(&format!("frames={}\n", data_lines(&poses).count())));
    assert!(manifest.lines().any(|l| l.starts_with("file=depth/49.pfm ")));

    let again = tmp.path().join("again");
    ok(&["synth", "--out", p(&again)]);
    for name in ["poses.txt", "map.txt", "intrinsics.txt", "scene.txt", "manifest.txt", "depth/0.pfm", "depth/49.pfm"] {
        assert_eq!(std::fs::read(ds.join(name)).unwrap(), std::fs::read(again.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn manifest_matches_pose_count_for_several_trajectories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        "output = \"out\"\n\
         [[synth.trajectories]]\nlabel = \"a\"\nframes = 7\n\
         [[synth.trajectories]]\nlabel = \"b\"\nkind = \"loop\"\ncenter = [0.0, 0.0, 40.0]\nradius = 5.0\nframes = 6\nloops = 2\n\
         [[synth.trajectories]]\nlabel = \"c\"\nkind = \"out-and-back\"\nframes = 4\n",
    )
    .unwrap();
    ok(&["--config", p(&cfg), "synth"]);
    let out = tmp.path().join("out");
    let poses = std::fs::read_to_string(out.join("poses.txt")).unwrap();
    let n = data_lines(&poses).count();
    assert_eq!(n, 7 + 12 + 8);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains(&format!("frames={n}\n")));
    assert!(manifest.contains("trajectory=b 12\n"));
}

#[test]
fn missing_scene_file_is_a_config_error_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("no_such_scene.txt");
    let out = icdc(&["synth", "--scene", p(&missing), "--out", p(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_scene.txt"));
}

#[test]
fn scene_file_is_used_when_given() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = tmp.path().join("wall.txt");
    std::fs::write(&scene, "scene wall\nplane 0 0 20 0 0 -1 400 400\n").unwrap();
    let ds = tmp.path().join("ds");
    ok(&["synth", "--scene", p(&scene), "--out", p(&ds)]);
    let d = read_pfm_file(&ds.join("depth/0.pfm")).unwrap();
    assert_eq!(d.get(160, 120), Some(20.0));
    assert_eq!(d.valid_count(), 320 * 240);
}

#[test]
fn bad_configs_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    for text in ["unknown_key = 1\n", "[correspond]\nalpha_px = -1.0\n", "[[synth.trajectories]]\nkind = \"spiral\"\n", "[ransac]\nconfidence = 1.0\n"] {
        std::fs::write(&cfg, text).unwrap();
        let out = icdc(&["--config", p(&cfg), "synth", "--out", p(&tmp.path().join("o"))]);
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = icdc(&["--config", p(&tmp.path().join("absent.toml")), "synth"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn correspond_identical_frames_keeps_every_valid_pixel() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let csv = tmp.path().join("same.csv");
    let out = ok(&["correspond", "--dataset", p(&ds), "--reference", "5", "--query", "5", "--stride", "3", "--out", p(&csv)]);
    let depth = read_pfm_file(&ds.join("depth/5.pfm")).unwrap();
    let valid = (0..240).step_by(3).flat_map(|y| (0..320).step_by(3).map(move |x| (x, y))).filter(|(x, y)| depth.get(*x, *y).is_some()).count();
    let rows = read_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), valid);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains(&format!("candidates={valid} survived_loop={valid} survived_depth={valid} rows={valid}")), "{stdout}");
}

#[test]
fn correspond_summary_counts_equal_csv_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    for method in ["icdc", "homography", "sparse-map"] {
        let csv = tmp.path().join(format!("{method}.csv"));
        let out = ok(&["correspond", "--dataset", p(&ds), "--reference", "10", "--query", "13", "--method", method, "--out", p(&csv)]);
        let rows = read_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap().len();
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains(&format!("survived_depth={rows} rows={rows}")), "{method}: {stdout}");
        let meta = std::fs::read_to_string(format!("{}.meta", csv.display())).unwrap();
        assert!(meta.contains(&format!("survived_depth={rows}\n")));
        assert!(meta.contains(&format!("method={method}\n")));
    }
}

#[test]
fn correspond_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let csv = tmp.path().join("c.csv");
    let base = ["correspond", "--dataset", p(&ds), "--reference", "0", "--out", p(&csv)];
    let run = |extra: &[&str]| icdc(&[&base[..], extra].concat()).status.code();
    assert_eq!(run(&["--query", "500"]), Some(3));
    assert_eq!(run(&["--query", "1", "--alpha", "0.0"]), Some(2));
    assert_eq!(run(&["--query", "1", "--beta", "0"]), Some(2));
    assert_eq!(run(&["--query", "1", "--method", "optical-flow"]), Some(2));
    assert_eq!(icdc(&["correspond", "--dataset", p(&tmp.path().join("nothing")), "--reference", "0", "--query", "1", "--out", p(&csv)]).status.code(), Some(3));
}

#[test]
fn zero_survivors_give_an_empty_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    // Same position, opposite heading: every point seen by the first
    // camera is behind the second.
    std::fs::write(
        &cfg,
        "[[synth.trajectories]]\nlabel = \"fwd\"\nframes = 1\n\
         [[synth.trajectories]]\nlabel = \"back\"\nyaw_deg = 180.0\nframes = 1\n",
    )
    .unwrap();
    let ds = tmp.path().join("ds");
    ok(&["--config", p(&cfg), "synth", "--out", p(&ds)]);
    let csv = tmp.path().join("c.csv");
    let out = ok(&["correspond", "--dataset", p(&ds), "--reference", "0", "--query", "1", "--stride", "4", "--out", p(&csv)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("survived_depth=0 rows=0"));
    assert!(read_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap().is_empty());
}

fn summary_values(text: &str, key: &str) -> Vec<f64> {
    text.lines().filter_map(|l| l.strip_prefix(key)).map(|v| v.trim_start_matches(" = ").parse().unwrap()).collect()
}

#[test]
fn relpose_on_noise_free_corridor() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let out_dir = tmp.path().join("rel");
    ok(&["benchmark", "relpose", "--dataset", p(&ds), "--stride", "4", "--out", p(&out_dir)]);
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    let medians = summary_values(&summary, "median_deg");
    assert_eq!(medians.len(), 1);
    assert!(medians[0] < 0.1, "{summary}");
    let (a5, a10, a20) = (summary_values(&summary, "auc@5"), summary_values(&summary, "auc@10"), summary_values(&summary, "auc@20"));
    assert!(a5[0] <= a10[0] && a10[0] <= a20[0]);
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(data_lines(&results).next().unwrap().starts_with("ref_traj,query_traj,ref_frame,query_frame"));
    let curve = std::fs::read_to_string(out_dir.join("curve_default_default.csv")).unwrap();
    let fractions: Vec<f64> = data_lines(&curve).skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(fractions.len(), 201);
    assert!(fractions.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn auc_fields_are_monotone_with_failures_and_noise() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[[synth.trajectories]]\nlabel = \"a\"\nframes = 25\n\
         [[synth.trajectories]]\nlabel = \"b\"\nstart = [0.6, 0.0, 0.4]\nframes = 25\nyaw_deg = 8.0\ndepth_noise_sigma = 0.3\noutlier_fraction = 0.3\noutlier_magnitude_min = 2.0\n\
         [correspond]\nbeta_m = 5.0\nalpha_px = 40.0\n",
    )
    .unwrap();
    let ds = tmp.path().join("ds");
    ok(&["--config", p(&cfg), "synth", "--out", p(&ds)]);
    let out_dir = tmp.path().join("rel");
    ok(&["--config", p(&cfg), "benchmark", "relpose", "--dataset", p(&ds), "--stride", "6", "--out", p(&out_dir)]);
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    let (a5, a10, a20) = (summary_values(&summary, "auc@5"), summary_values(&summary, "auc@10"), summary_values(&summary, "auc@20"));
    assert_eq!(a5.len(), 4);
    for k in 0..4 {
        assert!(a5[k] <= a10[k] && a10[k] <= a20[k], "{summary}");
    }
    assert!(summary.contains("[cross_domain_mean_median_deg]"));
}

#[test]
fn relpose_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let corr = tmp.path().join("corr");
    std::fs::create_dir_all(&corr).unwrap();
    let out_dir = tmp.path().join("rel");
    // A directory source without the needed files.
    let missing = icdc(&["benchmark", "relpose", "--dataset", p(&ds), "--source", p(&corr), "--out", p(&out_dir)]);
    assert_eq!(missing.status.code(), Some(3));
    // Every pair with too few correspondences: estimation fails everywhere.
    let header = "px,py,qx,qy,loop_px,depth_m\n";
    for r in (0..50).step_by(10) {
        for q in 0..50 {
            std::fs::write(corr.join(format!("{r}_{q}.csv")), format!("{header}1,1,2,2,0,0\n")).unwrap();
        }
    }
    let failing = icdc(&["benchmark", "relpose", "--dataset", p(&ds), "--source", p(&corr), "--out", p(&out_dir)]);
    assert_eq!(failing.status.code(), Some(4));
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(data_lines(&results).skip(1).all(|l| l.contains(",inf,failed:too few correspondences: 1 <")), "{results}");
    let unknown = icdc(&["benchmark", "relpose", "--dataset", p(&ds), "--reference-trajectory", "x", "--out", p(&out_dir)]);
    assert_eq!(unknown.status.code(), Some(3));
}

#[test]
fn abspose_with_ground_truth_estimates_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let out_dir = tmp.path().join("abs");
    ok(&["benchmark", "abspose", "--dataset", p(&ds), "--estimates", p(&ds.join("poses.txt")), "--out", p(&out_dir)]);
    let summary = std::fs::read_to_string(out_dir.join("abspose_summary.txt")).unwrap();
    let fractions: Vec<&str> = summary.lines().filter(|l| l.starts_with("within(")).collect();
    assert_eq!(fractions.len(), 3);
    assert!(fractions.iter().all(|l| l.ends_with(" = 1")), "{summary}");
    assert!(summary.contains("images = 50"));

    let missing = icdc(&["benchmark", "abspose", "--dataset", p(&ds), "--estimates", p(&tmp.path().join("none.txt")), "--out", p(&out_dir)]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn blocks_report_and_unknown_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_default(tmp.path());
    let report = tmp.path().join("blocks.txt");
    ok(&["blocks", "--dataset", p(&ds), "--trajectory", "default", "--out", p(&report)]);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("blocks = 1\n"));
    for key in ["members = 0 1 2", "rotation_xyzw = ", "principal_axis = ", "containment@16 = "] {
        assert!(text.contains(key), "{key}");
    }
    let out = icdc(&["blocks", "--dataset", p(&ds), "--trajectory", "nope", "--out", p(&report)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[[synth.trajectories]]\nlabel = \"n\"\nframes = 2\ndepth_noise_sigma = 0.05\n").unwrap();
    let flag = tmp.path().join("flag");
    ok(&["--config", p(&cfg), "--seed", "5", "synth", "--out", p(&flag)]);
    let env = tmp.path().join("env");
    let out = Command::new(env!("CARGO_BIN_EXE_icdc"))
        .args(["--config", p(&cfg), "synth", "--out", p(&env)])
        .env("ICDC_SEED", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["depth/1.pfm", "manifest.txt"] {
        assert_eq!(std::fs::read(flag.join(name)).unwrap(), std::fs::read(env.join(name)).unwrap(), "{name}");
    }
    let manifest = std::fs::read_to_string(env.join("manifest.txt")).unwrap();
    assert!(manifest.contains("# seed=5\n"));
}

#[test]
fn losses_eval_golden_values() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("cos.csv");
    std::fs::write(&input, "s,s_prime\n1,0\n0,1\n").unwrap();
    let out = ok(&["losses", "eval", "--kind", "cosim", "--input", p(&input)]);
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = data_lines(&text).collect();
    assert_eq!(rows, ["quantity,index,value", "loss,,1", "grad_s,0,-0", "grad_s,1,-1", "grad_s_prime,0,-1", "grad_s_prime,1,-0"]);

    let input = tmp.path().join("global.csv");
    std::fs::write(&input, "rep,rel,d,d_prime\n0.25,0.5,day,day\n0.25,0.5,day,night\n").unwrap();
    let out = ok(&["losses", "eval", "--kind", "global", "--input", p(&input)]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("value,0,0.75\n") && text.contains("value,1,0.5\n") && text.contains("repeatability_path,1,closed\n"));

    let input = tmp.path().join("bad.csv");
    std::fs::write(&input, "s,s_prime\n2,0\n").unwrap();
    assert_eq!(icdc(&["losses", "eval", "--kind", "cosim", "--input", p(&input)]).status.code(), Some(3));
    std::fs::write(&input, "s,s_prime\n0,0.5\n0,0.5\n").unwrap();
    assert_eq!(icdc(&["losses", "eval", "--kind", "cosim", "--input", p(&input)]).status.code(), Some(4));
}
