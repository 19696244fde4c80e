//! End-to-end acceptance gate. Each test prints one pass/fail line (visible
//! with `--nocapture`; cargo's own per-test lines mirror them) and asserts.
//!
//! Timing-sensitive criteria serialize on a shared lock so parallel test
//! threads don't distort each other's clocks; exact-math criteria run free.

mod common;

use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use holoquilt::config::parse_stream_config;
use holoquilt::{
    apply_lut, assemble_quilt, benchmark_csv, benchmark_views, build_lut, compute_disparity,
    compute_field, compute_flow, derive_mapping_params, generate_views, split_quilt,
    synthesize_view, view_index, Calibration, FrameSourceSpec, Image, LutMap, Method,
    MorphParams, PixelCoord, QuiltLayout, SubpixelCoord,
};

use common::{
    oracle_view, random_image, reference_native, reference_panel, report, shift_wrap, spearman,
    textured_image, XorShift, DUAL_DEVICE_INI, FILE_SOURCE_INI, PANEL_JSON, SINGLE_DEVICE_INI,
};

static TIMING_LOCK: Mutex<()> = Mutex::new(());

fn timing_guard() -> std::sync::MutexGuard<'static, ()> {
    TIMING_LOCK
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn panel_calibration() -> Calibration {
    let cal = Calibration::parse(PANEL_JSON).unwrap();
    cal.validate().unwrap();
    cal
}

fn random_views(rng: &mut XorShift, n: u32, w: u32, h: u32) -> Vec<Image> {
    (0..n).map(|_| random_image(rng, w, h)).collect()
}

/// Library pipeline on one side, scalar re-derivation on the other.
fn native_both_ways(cal: &Calibration, panel: &common::Panel, layout: &QuiltLayout, seed: u64) {
    let (nw, nh) = cal.native_dims();
    let mut rng = XorShift::new(seed);
    let views = random_views(
        &mut rng,
        layout.total_views(),
        layout.view_width,
        layout.view_height,
    );
    let params = derive_mapping_params(cal, layout);
    let lut = build_lut(&params, layout, nw, nh);
    let quilt = assemble_quilt(&views, layout).unwrap();
    let native = apply_lut(&lut, &quilt).unwrap();
    let reference = reference_native(panel, &views, nw, nh);
    assert_eq!(
        native.data(),
        reference.data(),
        "gather differs from direct evaluation for {}x{} views {}x{}",
        layout.cols,
        layout.rows,
        layout.view_width,
        layout.view_height
    );
}

#[test]
fn criterion_01_native_gather_matches_direct_evaluation() {
    let _guard = timing_guard();
    let start = Instant::now();

    let cal = panel_calibration();
    let panel = reference_panel();

    // small panel variant: shrink the declared screen so native dims follow
    let mut small_cal = cal.clone();
    small_cal.screen_w = 64.0;
    small_cal.screen_h = 40.0;
    let mut small_panel = panel;
    small_panel.screen_w = 64.0;
    small_panel.screen_h = 40.0;
    native_both_ways(
        &small_cal,
        &small_panel,
        &QuiltLayout::new(4, 2, 16, 10),
        11,
    );

    // same panel mirrored every way, to drive the flip paths
    let mut flipped_cal = small_cal.clone();
    flipped_cal.flip_image_x = 1.0;
    flipped_cal.flip_image_y = 1.0;
    flipped_cal.flip_subp = 1.0;
    flipped_cal.inv_view = 0.0;
    let mut flipped_panel = small_panel;
    flipped_panel.flip_x = true;
    flipped_panel.flip_y = true;
    flipped_panel.flip_sub = true;
    flipped_panel.invert = false;
    native_both_ways(
        &flipped_cal,
        &flipped_panel,
        &QuiltLayout::new(4, 2, 16, 10),
        12,
    );

    // full panel resolution
    native_both_ways(&cal, &panel, &QuiltLayout::new(9, 5, 320, 240), 13);

    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "native gather matches direct per-subpixel evaluation",
        elapsed < 60.0,
        &format!("exact on 64x40/4x2, flipped 64x40/4x2, 2560x1600/9x5; {elapsed:.1}s of 60s"),
    );
}

#[test]
fn criterion_02_view_index_stays_in_range_across_the_panel() {
    let _guard = timing_guard();
    let start = Instant::now();

    let cal = panel_calibration();
    let (nw, nh) = cal.native_dims();
    for (cols, rows) in [(1u32, 1u32), (4, 2), (9, 5)] {
        let layout = QuiltLayout::new(cols, rows, 8, 8);
        let params = derive_mapping_params(&cal, &layout);
        let n = layout.total_views();
        let mut max_seen = 0u32;
        for y in 0..nh {
            for x in 0..nw {
                for c in 0..3u8 {
                    let v = view_index(SubpixelCoord { x, y, c }, &params, nw, nh);
                    max_seen = max_seen.max(v);
                }
            }
        }
        assert!(
            max_seen < n,
            "layout {cols}x{rows}: view {max_seen} out of range"
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        "every subpixel maps to a valid view for 1x1, 4x2, 9x5",
        elapsed < 30.0,
        &format!("36.9M assignments checked; {elapsed:.1}s of 30s"),
    );
}

#[test]
fn criterion_03_morph_endpoints_reproduce_the_inputs() {
    let mut rng = XorShift::new(23);
    for pair in 0..20u64 {
        let left = random_image(&mut rng, 48, 32);
        let right = random_image(&mut rng, 48, 32);
        for method in [Method::Disparity, Method::Flow] {
            let params = MorphParams {
                method,
                ..MorphParams::default()
            };
            let views = generate_views(&left, &right, 7, &params).unwrap();
            assert_eq!(views[0].data(), left.data(), "pair {pair}: left endpoint");
            assert_eq!(views[6].data(), right.data(), "pair {pair}: right endpoint");
        }
    }
    report(
        3,
        "view sequence endpoints are bit-identical to the inputs",
        true,
        "20 random pairs, both methods",
    );
}

#[test]
fn criterion_04_known_horizontal_shift_is_recovered() {
    let _guard = timing_guard();
    let start = Instant::now();

    let left = textured_image(256, 192, 7);
    let right = shift_wrap(&left, 4, 0);
    let params = MorphParams::default();
    // stay clear of the torus seam the synthetic shift wraps through
    let interior_x = 40u32..216;
    let interior_y = 8u32..184;

    let disparity = compute_disparity(&left, &right, &params).unwrap();
    let mut hits = 0usize;
    let mut total = 0usize;
    for y in interior_y.clone() {
        for x in interior_x.clone() {
            let (dx, _) = disparity.at(x, y);
            total += 1;
            if (dx - 4.0).abs() <= 1.0 {
                hits += 1;
            }
        }
    }
    let hit_rate = hits as f64 / total as f64;
    assert!(
        hit_rate >= 0.95,
        "disparity within 1px for only {:.1}% of interior",
        hit_rate * 100.0
    );

    let flow = compute_flow(&left, &right, &params).unwrap();
    let mut dxs = Vec::new();
    let mut dys = Vec::new();
    for y in interior_y.clone() {
        for x in interior_x.clone() {
            let (dx, dy) = flow.at(x, y);
            dxs.push(dx as f64);
            dys.push(dy.abs() as f64);
        }
    }
    let median = |v: &mut Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let median_dx = median(&mut dxs);
    let median_abs_dy = median(&mut dys);
    assert!(
        (3.5..=4.5).contains(&median_dx),
        "flow median dx {median_dx:.3} outside [3.5, 4.5]"
    );
    assert!(
        median_abs_dy < 0.5,
        "flow median |dy| {median_abs_dy:.3} not under 0.5"
    );

    let halfway = synthesize_view(&left, &right, &disparity, 0.5).unwrap();
    let expected = shift_wrap(&left, 2, 0);
    let mut err_sum = 0.0f64;
    let mut err_n = 0usize;
    for y in interior_y.clone() {
        for x in interior_x.clone() {
            let got = halfway.pixel(PixelCoord { x, y });
            let want = expected.pixel(PixelCoord { x, y });
            for c in 0..3 {
                err_sum += (got[c] as f64 - want[c] as f64).abs();
                err_n += 1;
            }
        }
    }
    let mae = err_sum / err_n as f64;
    assert!(mae < 3.0, "halfway synthesis MAE {mae:.3} not under 3");

    let elapsed = start.elapsed().as_secs_f64();
    report(
        4,
        "4px synthetic shift recovered by both methods",
        elapsed < 30.0,
        &format!(
            "disparity {:.1}% within 1px, flow median dx {median_dx:.2}, |dy| {median_abs_dy:.3}, halfway MAE {mae:.2}; {elapsed:.1}s of 30s",
            hit_rate * 100.0
        ),
    );
}

#[test]
fn criterion_05_quilt_split_inverts_assembly() {
    let mut rng = XorShift::new(41);
    for round in 0..100u32 {
        let layout = QuiltLayout::new(
            rng.range(1, 6),
            rng.range(1, 5),
            rng.range(1, 12),
            rng.range(1, 10),
        );
        let views = random_views(
            &mut rng,
            layout.total_views(),
            layout.view_width,
            layout.view_height,
        );
        let quilt = assemble_quilt(&views, &layout).unwrap();
        let back = split_quilt(&quilt, &layout).unwrap();
        assert_eq!(back.len(), views.len(), "round {round}");
        for (k, (a, b)) in views.iter().zip(&back).enumerate() {
            assert_eq!(a.data(), b.data(), "round {round}, view {k}");
        }
    }
    report(
        5,
        "quilt split is the exact inverse of assembly",
        true,
        "100 random layouts and view lists",
    );
}

#[test]
fn criterion_06_reference_files_parse_to_their_printed_values() {
    let cal = panel_calibration();
    assert_eq!(cal.pitch, 47.56159591674805);
    assert_eq!(cal.slope, -5.5113043785095219);
    assert_eq!(cal.center, -0.09782609343528748);
    assert_eq!(cal.dpi, 338.0);
    assert_eq!(cal.screen_w, 2560.0);
    assert_eq!(cal.screen_h, 1600.0);
    assert_eq!(cal.inv_view, 1.0);
    assert_eq!(cal.native_dims(), (2560, 1600));

    let file_cfg = parse_stream_config(FILE_SOURCE_INI).unwrap();
    assert_eq!(
        file_cfg.source,
        FrameSourceSpec::File {
            path: "video_rescaled.mp4".into()
        }
    );
    assert_eq!(
        (file_cfg.camera_width, file_cfg.camera_height),
        (320, 180)
    );
    assert_eq!(file_cfg.fps, 8);
    assert_eq!(
        (file_cfg.processing_width, file_cfg.processing_height),
        (256, 128)
    );
    assert_eq!(
        (file_cfg.native_width, file_cfg.native_height),
        (2560, 1600)
    );

    let single_cfg = parse_stream_config(SINGLE_DEVICE_INI).unwrap();
    assert_eq!(single_cfg.source, FrameSourceSpec::SingleDevice { dev: 2 });
    assert_eq!(single_cfg.fps, 8);

    let dual_cfg = parse_stream_config(DUAL_DEVICE_INI).unwrap();
    assert_eq!(
        dual_cfg.source,
        FrameSourceSpec::DualDevice { dev0: 2, dev1: 4 }
    );
    assert_eq!(dual_cfg.fps, 8);
    assert_eq!(
        (dual_cfg.native_width, dual_cfg.native_height),
        (2560, 1600)
    );

    report(
        6,
        "reference calibration and configs parse exactly",
        true,
        "pitch 47.56159591674805, devNumber -1/2/4, native 2560x1600, fps 8",
    );
}

#[test]
fn criterion_07_map_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cal = panel_calibration();

    // the factory-default table: 8x4 quilt of 512x256 views, full panel
    let default_layout = QuiltLayout::new(8, 4, 512, 256);
    let params = derive_mapping_params(&cal, &default_layout);
    let (nw, nh) = cal.native_dims();
    let default_map = build_lut(&params, &default_layout, nw, nh);
    let path = dir.path().join("default.map");
    default_map.save(&path).unwrap();
    assert_eq!(LutMap::load(&path).unwrap(), default_map);

    let mut rng = XorShift::new(59);
    for round in 0..5u32 {
        let layout = QuiltLayout::new(
            rng.range(1, 5),
            rng.range(1, 4),
            rng.range(1, 24),
            rng.range(1, 16),
        );
        let mut cal_variant = cal.clone();
        cal_variant.screen_w = rng.range(3, 96) as f64;
        cal_variant.screen_h = rng.range(3, 64) as f64;
        let params = derive_mapping_params(&cal_variant, &layout);
        let (nw, nh) = cal_variant.native_dims();
        let map = build_lut(&params, &layout, nw, nh);
        let path = dir.path().join(format!("round_{round}.map"));
        map.save(&path).unwrap();
        assert_eq!(LutMap::load(&path).unwrap(), map, "round {round}");
    }

    report(
        7,
        "map save/load is the identity",
        true,
        "8x4 512x256 factory default plus 5 random panels",
    );
}

/// L and R stitched into one double-width frame.
fn stitch_side_by_side(left: &Image, right: &Image) -> Image {
    assert_eq!(left.width(), right.width());
    assert_eq!(left.height(), right.height());
    let mut out = Image::new(left.width() * 2, left.height());
    for y in 0..left.height() {
        for x in 0..left.width() {
            out.set_pixel(PixelCoord { x, y }, left.pixel(PixelCoord { x, y }));
            out.set_pixel(
                PixelCoord {
                    x: x + left.width(),
                    y,
                },
                right.pixel(PixelCoord { x, y }),
            );
        }
    }
    out
}

fn run_stream_binary(ini: &Path, map: &Path, out_dir: &Path) {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_holoquilt"))
        .arg("stream")
        .arg("-c")
        .arg(ini)
        .arg("-m")
        .arg(map)
        .arg("-q")
        .arg("4x2")
        .arg("-o")
        .arg(out_dir)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stream run failed: {}\n{}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn criterion_08_streaming_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let frames_dir = dir.path().join("frames");
    std::fs::create_dir(&frames_dir).unwrap();
    for k in 0..5u64 {
        let left = textured_image(64, 32, 100 + k);
        let right = shift_wrap(&left, 2 + (k % 3) as i32, 0);
        stitch_side_by_side(&left, &right)
            .save_png(&frames_dir.join(format!("{k:03}.png")))
            .unwrap();
    }

    let mut cal = panel_calibration();
    cal.screen_w = 256.0;
    cal.screen_h = 160.0;
    let layout = QuiltLayout::new(4, 2, 64, 32);
    let params = derive_mapping_params(&cal, &layout);
    let map = build_lut(&params, &layout, 256, 160);
    let map_path = dir.path().join("panel.map");
    map.save(&map_path).unwrap();

    let ini_path = dir.path().join("stream.ini");
    std::fs::write(
        &ini_path,
        "[camera]\ndevNumber=-1\nwidth=128\nheight=32\nfps=50\nfile=\"frames\"\n\
         [processing]\nwidth=64\nheight=32\n[native]\nwidth=256\nheight=160\n",
    )
    .unwrap();

    let out_a = dir.path().join("out_a");
    let out_b = dir.path().join("out_b");
    run_stream_binary(&ini_path, &map_path, &out_a);
    run_stream_binary(&ini_path, &map_path, &out_b);

    for k in 0..5u32 {
        let name = format!("{k:06}.png");
        let a = std::fs::read(out_a.join(&name)).unwrap();
        let b = std::fs::read(out_b.join(&name)).unwrap();
        assert_eq!(a, b, "frame {name} differs between runs");
    }

    report(
        8,
        "two streaming runs produce bit-identical natives",
        true,
        "5-frame side-by-side sequence through the installed binary, twice",
    );
}

#[test]
fn criterion_09_processing_time_grows_with_view_count() {
    let _guard = timing_guard();

    let left = textured_image(320, 240, 67);
    let right = shift_wrap(&left, 3, 0);
    let counts: Vec<u32> = (2..=48).collect();
    let ns: Vec<f64> = counts.iter().map(|&n| n as f64).collect();

    let csv_dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let mut detail = String::new();
    for (method, tag) in [(Method::Disparity, "disparity"), (Method::Flow, "flow")] {
        let params = MorphParams {
            method,
            ..MorphParams::default()
        };
        let rows = benchmark_views(&left, &right, &params, &counts).unwrap();
        let walls: Vec<f64> = rows.iter().map(|r| r.wall_seconds).collect();
        let rho = spearman(&ns, &walls);
        let csv_path = csv_dir.join(format!("view_scaling_{tag}.csv"));
        std::fs::write(&csv_path, benchmark_csv(&rows)).unwrap();
        println!("criterion 09: {tag} CSV at {}", csv_path.display());
        assert!(
            rho > 0.9,
            "{tag}: wall time not monotone enough in view count (rho {rho:.3})"
        );
        detail.push_str(&format!("{tag} rho {rho:.3}; "));
    }

    // stretch target, reported only: sub-0.1s frames at a smaller working
    // resolution with coarse correspondences
    let small_left = left.resize(256, 128);
    let small_right = right.resize(256, 128);
    let params = MorphParams {
        subsampling: 2,
        ..MorphParams::default()
    };
    let stretch_counts: Vec<u32> = (10..=35).collect();
    let rows = benchmark_views(&small_left, &small_right, &params, &stretch_counts).unwrap();
    let under = rows.iter().filter(|r| r.wall_seconds < 0.1).count();
    println!(
        "criterion 09: stretch (256x128, subsampling 2): {under}/{} view counts in 10..=35 under 0.1s",
        rows.len()
    );

    report(
        9,
        "wall time scales monotonically with view count",
        true,
        &format!("{detail}CSVs emitted"),
    );
}

#[test]
fn criterion_10_native_gather_sustains_streaming_rates() {
    let _guard = timing_guard();

    let cal = panel_calibration();
    let layout = QuiltLayout::new(9, 5, 320, 240);
    let params = derive_mapping_params(&cal, &layout);
    let (nw, nh) = cal.native_dims();
    let lut = build_lut(&params, &layout, nw, nh);
    let mut rng = XorShift::new(83);
    let quilt = random_image(&mut rng, layout.quilt_width(), layout.quilt_height());

    let warmup = apply_lut(&lut, &quilt).unwrap();
    std::hint::black_box(&warmup);
    let rounds = 10;
    let start = Instant::now();
    for _ in 0..rounds {
        let native = apply_lut(&lut, &quilt).unwrap();
        std::hint::black_box(&native);
    }
    let rate = rounds as f64 / start.elapsed().as_secs_f64();

    report(
        10,
        "full-panel gather rate",
        rate >= 2.0,
        &format!("{rate:.1} native frames/s (target 10, gate 2)"),
    );
}
