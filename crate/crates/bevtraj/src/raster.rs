//! Scene -> BEV occupancy-grid video rendering.
//!
//! Draw order is back-to-front: white background, lane centerlines in
//! light gray, road users as filled oriented rectangles (ego black, others
//! in per-scene sampled colors), traffic lights last as filled discs in
//! the foreground. Rasterization is a coverage test of pixel centers
//! against world-space shapes; no anti-aliasing, so boundaries are crisp
//! and HSV masking is exact.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{
    hsv_to_rgb, rgb_to_hsv, ColorRgb, Hsv, GREEN_HUE_BAND, RED_HUE_BAND, YELLOW_HUE_BAND,
};
use crate::geom::{image_to_world, world_to_image, RasterConfig, Vec2};
use crate::scene::{Scene, Signal};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("agent color sampling region is empty or fully reserved")]
    EmptySamplingRegion,
    #[error("no color assigned for agent {0}")]
    MissingColorAssignment(String),
    #[error("video io: {0}")]
    Io(#[from] std::io::Error),
    #[error("frame decode: {0}")]
    Image(#[from] image::ImageError),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

/// Fixed palette plus the HSV subspace agents are sampled from.
///
/// The sampling region must stay clear of every reserved detection region
/// (lane gray, black ego, white background, the three light hue bands) by
/// at least 10 hue degrees or 20% saturation/value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColorPolicy {
    pub background: ColorRgb,
    pub lane: ColorRgb,
    pub ego: ColorRgb,
    pub light_red: ColorRgb,
    pub light_green: ColorRgb,
    pub light_yellow: ColorRgb,
    /// Hue arcs (degrees) agents may be sampled from.
    pub sample_hue_arcs: Vec<(f64, f64)>,
    pub sample_saturation: (f64, f64),
    pub sample_value: (f64, f64),
}

impl Default for ColorPolicy {
    fn default() -> Self {
        Self {
            background: ColorRgb::WHITE,
            lane: ColorRgb::new(200, 200, 200),
            ego: ColorRgb::BLACK,
            light_red: ColorRgb::new(230, 30, 30),
            light_green: ColorRgb::new(30, 200, 60),
            light_yellow: ColorRgb::new(240, 200, 30),
            sample_hue_arcs: vec![(170.0, 330.0)],
            sample_saturation: (0.55, 0.95),
            sample_value: (0.55, 0.95),
        }
    }
}

impl ColorPolicy {
    /// True when the HSV point keeps the required margin from every
    /// reserved region.
    pub fn clear_of_reserved(&self, hsv: Hsv) -> bool {
        // white background and lane gray live on the low-saturation axis
        if hsv.s < 0.35 {
            return false;
        }
        // black ego is the low-value region
        if hsv.v < 0.40 {
            return false;
        }
        // light hue bands; the saturation/value escape is 20% below the
        // masks' 0.5 thresholds
        for band in [RED_HUE_BAND, GREEN_HUE_BAND, YELLOW_HUE_BAND] {
            if band.distance(hsv.h) < 10.0 && hsv.s > 0.30 && hsv.v > 0.30 {
                return false;
            }
        }
        true
    }
}

/// Draw one agent color from the policy's HSV subspace. Deterministic for
/// a given RNG state; the emitted RGB8 value is re-checked after
/// quantization so it still segments as an agent.
pub fn sample_agent_color<R: Rng>(
    rng: &mut R,
    policy: &ColorPolicy,
) -> Result<ColorRgb, RasterError> {
    let arcs: Vec<(f64, f64)> = policy
        .sample_hue_arcs
        .iter()
        .filter(|(lo, hi)| hi > lo)
        .copied()
        .collect();
    let total_arc: f64 = arcs.iter().map(|(lo, hi)| hi - lo).sum();
    let (s_lo, s_hi) = policy.sample_saturation;
    let (v_lo, v_hi) = policy.sample_value;
    if total_arc <= 0.0 || s_hi < s_lo || v_hi < v_lo {
        return Err(RasterError::EmptySamplingRegion);
    }

    for _ in 0..1000 {
        let mut pick = rng.gen_range(0.0..total_arc);
        let mut h = arcs[0].0;
        for &(lo, hi) in &arcs {
            if pick <= hi - lo {
                h = lo + pick;
                break;
            }
            pick -= hi - lo;
        }
        let hsv = Hsv {
            h: h.rem_euclid(360.0),
            s: rng.gen_range(s_lo..=s_hi),
            v: rng.gen_range(v_lo..=v_hi),
        };
        if !policy.clear_of_reserved(hsv) {
            continue;
        }
        let rgb = hsv_to_rgb(hsv);
        if policy.clear_of_reserved(rgb_to_hsv(rgb)) {
            return Ok(rgb);
        }
    }
    Err(RasterError::EmptySamplingRegion)
}

/// One RGB8 raster frame, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn filled(rows: usize, cols: usize, color: ColorRgb) -> Self {
        let mut pixels = Vec::with_capacity(rows * cols * 3);
        for _ in 0..rows * cols {
            pixels.extend_from_slice(&[color.r, color.g, color.b]);
        }
        Self { rows, cols, pixels }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> ColorRgb {
        let i = (row * self.cols + col) * 3;
        ColorRgb::new(self.pixels[i], self.pixels[i + 1], self.pixels[i + 2])
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, color: ColorRgb) {
        let i = (row * self.cols + col) * 3;
        self.pixels[i] = color.r;
        self.pixels[i + 1] = color.g;
        self.pixels[i + 2] = color.b;
    }

    /// Count pixels equal to the given color.
    pub fn count_color(&self, color: ColorRgb) -> usize {
        (0..self.rows * self.cols)
            .filter(|&i| {
                self.pixels[i * 3] == color.r
                    && self.pixels[i * 3 + 1] == color.g
                    && self.pixels[i * 3 + 2] == color.b
            })
            .count()
    }
}

/// Binds rendered pixels back to meters and seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VideoManifest {
    pub frame_rate_hz: f64,
    /// [window_length, window_width] meters.
    pub window_m: [f64; 2],
    /// [rows, cols] pixels.
    pub frame_px: [usize; 2],
    /// [row scale, col scale] pixels per meter.
    pub scale_px_per_m: [f64; 2],
    pub color_policy: ColorPolicy,
    /// Scene id this video was rasterized from, or "generated".
    pub source: String,
}

impl VideoManifest {
    pub fn new(cfg: &RasterConfig<f64>, frame_rate: f64, policy: &ColorPolicy, source: &str) -> Self {
        Self {
            frame_rate_hz: frame_rate,
            window_m: [cfg.window_length, cfg.window_width],
            frame_px: [cfg.frame_rows, cfg.frame_cols],
            scale_px_per_m: [cfg.scale_row(), cfg.scale_col()],
            color_policy: policy.clone(),
            source: source.to_string(),
        }
    }

    /// Reconstruct the raster geometry this manifest describes.
    pub fn raster_config(&self) -> RasterConfig<f64> {
        RasterConfig {
            window_length: self.window_m[0],
            window_width: self.window_m[1],
            frame_rows: self.frame_px[0],
            frame_cols: self.frame_px[1],
            frame_rate: self.frame_rate_hz,
            ..RasterConfig::default()
        }
    }
}

/// A rendered occupancy-grid video.
#[derive(Clone, Debug)]
pub struct Video {
    pub frames: Vec<Frame>,
    pub manifest: VideoManifest,
}

/// Per-scene agent color assignment, in scene agent order.
pub fn assign_agent_colors(
    scene: &Scene,
    policy: &ColorPolicy,
    seed: u64,
) -> Result<Vec<(String, ColorRgb)>, RasterError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors = Vec::new();
    for agent in &scene.agents {
        if agent.is_ego {
            continue;
        }
        colors.push((agent.agent_id.clone(), sample_agent_color(&mut rng, policy)?));
    }
    Ok(colors)
}

struct PixelWindow {
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
}

fn clip_window(
    center_lo: Vec2<f64>,
    center_hi: Vec2<f64>,
    margin_r: f64,
    margin_c: f64,
    rows: usize,
    cols: usize,
) -> Option<PixelWindow> {
    let r0 = (center_lo.x - margin_r).floor().max(0.0);
    let r1 = (center_hi.x + margin_r).ceil().min(rows as f64 - 1.0);
    let c0 = (center_lo.y - margin_c).floor().max(0.0);
    let c1 = (center_hi.y + margin_c).ceil().min(cols as f64 - 1.0);
    if r0 > r1 || c0 > c1 {
        return None;
    }
    Some(PixelWindow {
        r0: r0 as usize,
        r1: r1 as usize,
        c0: c0 as usize,
        c1: c1 as usize,
    })
}

fn segment_distance(p: Vec2<f64>, a: Vec2<f64>, b: Vec2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab.scale(t))).norm()
}

/// Render one timestep of a validated scene.
///
/// `colors` must assign a color to every non-ego agent present at `t`; the
/// ego is always drawn in the policy's ego color.
pub fn render_frame(
    scene: &Scene,
    t: u32,
    cfg: &RasterConfig<f64>,
    policy: &ColorPolicy,
    colors: &[(String, ColorRgb)],
) -> Result<Frame, RasterError> {
    let ego_pose = scene.ego_pose(t);
    let (rows, cols) = (cfg.frame_rows, cfg.frame_cols);
    let mut frame = Frame::filled(rows, cols, policy.background);

    let world_at = |r: usize, c: usize| {
        image_to_world(
            &ego_pose,
            Vec2::new(r as f64 + 0.5, c as f64 + 0.5),
            cfg,
        )
    };

    // lane centerlines, stroked at lane_thickness
    let half_stroke = cfg.lane_thickness / 2.0;
    let margin_r = half_stroke * cfg.scale_row() + 1.0;
    let margin_c = half_stroke * cfg.scale_col() + 1.0;
    for lane in &scene.lanes {
        for seg in lane.points.windows(2) {
            let a = world_to_image(&ego_pose, seg[0], cfg);
            let b = world_to_image(&ego_pose, seg[1], cfg);
            let lo = Vec2::new(a.x.min(b.x), a.y.min(b.y));
            let hi = Vec2::new(a.x.max(b.x), a.y.max(b.y));
            let Some(w) = clip_window(lo, hi, margin_r, margin_c, rows, cols) else {
                continue;
            };
            for r in w.r0..=w.r1 {
                for c in w.c0..=w.c1 {
                    if segment_distance(world_at(r, c), seg[0], seg[1]) <= half_stroke {
                        frame.set(r, c, policy.lane);
                    }
                }
            }
        }
    }

    // road users: non-ego first (scene order), then ego on top
    let draw_box = |bbox: &crate::geom::OrientedBox<f64>, color: ColorRgb, frame: &mut Frame| {
        let corners = bbox.corners().map(|p| world_to_image(&ego_pose, p, cfg));
        let lo = Vec2::new(
            corners.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
            corners.iter().map(|p| p.y).fold(f64::INFINITY, f64::min),
        );
        let hi = Vec2::new(
            corners.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
            corners.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max),
        );
        let Some(w) = clip_window(lo, hi, 1.0, 1.0, rows, cols) else {
            return;
        };
        for r in w.r0..=w.r1 {
            for c in w.c0..=w.c1 {
                if bbox.contains(world_at(r, c)) {
                    frame.set(r, c, color);
                }
            }
        }
    };

    for agent in scene.agents.iter().filter(|a| !a.is_ego) {
        let Some(state) = agent.state_at(t) else {
            continue;
        };
        let color = colors
            .iter()
            .find(|(id, _)| id == &agent.agent_id)
            .map(|(_, c)| *c)
            .ok_or_else(|| RasterError::MissingColorAssignment(agent.agent_id.clone()))?;
        draw_box(&state.bbox, color, &mut frame);
    }
    let ego_state = scene.ego().state_at(t).expect("ego spans every timestep");
    draw_box(&ego_state.bbox, policy.ego, &mut frame);

    // traffic lights in the foreground
    let radius = cfg.light_diameter / 2.0;
    let light_margin_r = radius * cfg.scale_row() + 1.0;
    let light_margin_c = radius * cfg.scale_col() + 1.0;
    for light in &scene.lights {
        let color = match light.signal_at(t) {
            Some(Signal::Red) => policy.light_red,
            Some(Signal::Green) => policy.light_green,
            Some(Signal::Yellow) => policy.light_yellow,
            Some(Signal::Unknown) | None => continue,
        };
        let center = world_to_image(&ego_pose, light.position, cfg);
        let Some(w) = clip_window(center, center, light_margin_r, light_margin_c, rows, cols)
        else {
            continue;
        };
        for r in w.r0..=w.r1 {
            for c in w.c0..=w.c1 {
                if (world_at(r, c) - light.position).norm() <= radius {
                    frame.set(r, c, color);
                }
            }
        }
    }

    Ok(frame)
}

/// Rasterize a whole validated scene. Each non-ego agent gets one color
/// sampled once per scene, so its identity is stable across frames;
/// deterministic for a given seed.
pub fn rasterize_scene(
    scene: &Scene,
    cfg: &RasterConfig<f64>,
    policy: &ColorPolicy,
    seed: u64,
) -> Result<Video, RasterError> {
    let colors = assign_agent_colors(scene, policy, seed)?;
    let mut frames = Vec::with_capacity(scene.num_timesteps as usize);
    for t in 0..scene.num_timesteps {
        frames.push(render_frame(scene, t, cfg, policy, &colors)?);
    }
    Ok(Video {
        frames,
        manifest: VideoManifest::new(cfg, scene.frame_rate, policy, &scene.scene_id),
    })
}

/// Write a video directory: `manifest.json` plus zero-padded
/// `frame_000000.png` files (8-bit RGB, no alpha).
pub fn write_video_dir(video: &Video, dir: &Path) -> Result<(), RasterError> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&video.manifest)?,
    )?;
    for (i, frame) in video.frames.iter().enumerate() {
        let img = image::RgbImage::from_raw(
            frame.cols as u32,
            frame.rows as u32,
            frame.pixels.clone(),
        )
        .expect("frame buffer matches dimensions");
        img.save(dir.join(format!("frame_{i:06}.png")))?;
    }
    Ok(())
}

/// Read a video directory back. Returns the frames and the manifest when
/// one is present; callers fall back to defaults otherwise.
pub fn read_video_dir(dir: &Path) -> Result<(Vec<Frame>, Option<VideoManifest>), RasterError> {
    let manifest_path = dir.join("manifest.json");
    let manifest = if manifest_path.exists() {
        Some(serde_json::from_str(&fs::read_to_string(manifest_path)?)?)
    } else {
        None
    };
    let mut frame_files: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension().map(|x| x == "png").unwrap_or(false)
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .map(|n| n.starts_with("frame_"))
                    .unwrap_or(false)
        })
        .collect();
    frame_files.sort();
    let mut frames = Vec::with_capacity(frame_files.len());
    for path in frame_files {
        let img = image::open(&path)?.into_rgb8();
        frames.push(Frame {
            rows: img.height() as usize,
            cols: img.width() as usize,
            pixels: img.into_raw(),
        });
    }
    Ok((frames, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{OrientedBox, Pose2D};
    use crate::scene::{AgentState, AgentTrack, LanePolyline, SignalState, TrafficLightTrack};

    fn ego_only_scene(length: f64, width: f64) -> Scene {
        Scene {
            scene_id: "raster-test".into(),
            frame_rate: 10.0,
            num_timesteps: 1,
            lanes: vec![],
            lights: vec![],
            agents: vec![AgentTrack {
                agent_id: "ego".into(),
                is_ego: true,
                states: vec![AgentState {
                    t: 0,
                    bbox: OrientedBox::new(Pose2D::new(0.0, 0.0, 0.0), length, width),
                }],
            }],
        }
    }

    /// Analytic coverage oracle for an axis-aligned rectangle drawn at the
    /// image center: counts rows/cols whose pixel centers fall inside the
    /// half-extent intervals.
    fn axis_aligned_coverage(len_m: f64, wid_m: f64) -> usize {
        let cfg = RasterConfig::<f64>::default();
        let (r_half, c_half) = (len_m / 2.0 * cfg.scale_row(), wid_m / 2.0 * cfg.scale_col());
        let rows = (0..cfg.frame_rows)
            .filter(|&r| (r as f64 + 0.5 - 48.0).abs() <= r_half)
            .count();
        let cols = (0..cfg.frame_cols)
            .filter(|&c| (c as f64 + 0.5 - 27.0).abs() <= c_half)
            .count();
        rows * cols
    }

    #[test]
    fn lone_ego_renders_centered_black_rectangle() {
        let scene = ego_only_scene(4.5, 2.0);
        let cfg = RasterConfig::default();
        let policy = ColorPolicy::default();
        let frame = render_frame(&scene, 0, &cfg, &policy, &[]).unwrap();
        let black = frame.count_color(ColorRgb::BLACK);
        assert_eq!(black, axis_aligned_coverage(4.5, 2.0));
        // approximately length*scale_row x width*scale_col
        let expected = 4.5 * 4.8 * 2.0 * 5.4;
        assert!((black as f64 - expected).abs() / expected < 0.10);
        // everything else is background
        assert_eq!(frame.count_color(ColorRgb::WHITE), 96 * 54 - black);
    }

    #[test]
    fn light_disc_pixel_count_near_ellipse_area() {
        let mut scene = ego_only_scene(4.5, 2.0);
        scene.lights.push(TrafficLightTrack {
            light_id: "l0".into(),
            position: Vec2::new(7.0, 0.0),
            states: vec![SignalState {
                t: 0,
                signal: Signal::Green,
            }],
        });
        let cfg = RasterConfig::default();
        let policy = ColorPolicy::default();
        let frame = render_frame(&scene, 0, &cfg, &policy, &[]).unwrap();
        let green = frame.count_color(policy.light_green);
        // ellipse pixel-count oracle: centers within the scaled disc
        let center = world_to_image(&Pose2D::new(0.0, 0.0, 0.0), Vec2::new(7.0, 0.0), &cfg);
        let mut oracle = 0usize;
        for r in 0..cfg.frame_rows {
            for c in 0..cfg.frame_cols {
                let dr = (r as f64 + 0.5 - center.x) / cfg.scale_row();
                let dc = (c as f64 + 0.5 - center.y) / cfg.scale_col();
                if (dr * dr + dc * dc).sqrt() <= 1.0 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(green, oracle);
        let expected = std::f64::consts::PI * 4.8 * 5.4;
        assert!((green as f64 - expected).abs() / expected < 0.10, "{green}");
    }

    #[test]
    fn light_draws_over_agent() {
        let mut scene = ego_only_scene(4.5, 2.0);
        scene.agents.push(AgentTrack {
            agent_id: "a0".into(),
            is_ego: false,
            states: vec![AgentState {
                t: 0,
                bbox: OrientedBox::new(Pose2D::new(6.0, 0.0, 0.0), 4.5, 2.0),
            }],
        });
        scene.lights.push(TrafficLightTrack {
            light_id: "l0".into(),
            position: Vec2::new(6.0, 0.0),
            states: vec![SignalState {
                t: 0,
                signal: Signal::Red,
            }],
        });
        let cfg = RasterConfig::default();
        let policy = ColorPolicy::default();
        let agent_color = ColorRgb::new(60, 60, 220);
        let frame = render_frame(
            &scene,
            0,
            &cfg,
            &policy,
            &[("a0".into(), agent_color)],
        )
        .unwrap();
        // the pixel at the light center must be the light color
        let center = world_to_image(&Pose2D::new(0.0, 0.0, 0.0), Vec2::new(6.0, 0.0), &cfg);
        let c = frame.get(center.x as usize, center.y as usize);
        assert_eq!(c, policy.light_red);
        // agent still visible around the light
        assert!(frame.count_color(agent_color) > 50);
    }

    #[test]
    fn missing_color_is_an_error() {
        let mut scene = ego_only_scene(4.5, 2.0);
        scene.agents.push(AgentTrack {
            agent_id: "a0".into(),
            is_ego: false,
            states: vec![AgentState {
                t: 0,
                bbox: OrientedBox::new(Pose2D::new(6.0, 0.0, 0.0), 4.5, 2.0),
            }],
        });
        let err = render_frame(
            &scene,
            0,
            &RasterConfig::default(),
            &ColorPolicy::default(),
            &[],
        );
        assert!(matches!(err, Err(RasterError::MissingColorAssignment(_))));
    }

    #[test]
    fn lane_stroke_width_matches_thickness() {
        let mut scene = ego_only_scene(4.5, 2.0);
        // lane crossing the window laterally (constant world x ahead of ego)
        scene.lanes.push(LanePolyline {
            lane_id: "lat".into(),
            points: vec![Vec2::new(5.0, -20.0), Vec2::new(5.0, 20.0)],
        });
        let cfg = RasterConfig::default();
        let policy = ColorPolicy::default();
        let frame = render_frame(&scene, 0, &cfg, &policy, &[]).unwrap();
        // stroke runs along a row band; measure its height in one column
        let col = 5usize;
        let hits: Vec<usize> = (0..cfg.frame_rows)
            .filter(|&r| frame.get(r, col) == policy.lane)
            .collect();
        let thickness_px = hits.len() as f64;
        let expected = 1.5 * cfg.scale_row();
        assert!(
            (thickness_px - expected).abs() <= 1.0,
            "{thickness_px} vs {expected}"
        );
    }

    #[test]
    fn sampled_colors_avoid_reserved_regions() {
        let policy = ColorPolicy::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let c = sample_agent_color(&mut rng, &policy).unwrap();
            let hsv = rgb_to_hsv(c);
            for (band, name) in [
                (RED_HUE_BAND, "red"),
                (GREEN_HUE_BAND, "green"),
                (YELLOW_HUE_BAND, "yellow"),
            ] {
                assert!(
                    band.distance(hsv.h) >= 10.0,
                    "{c:?} too close to {name} band"
                );
            }
            assert!(hsv.s >= 0.35 && hsv.v >= 0.40);
        }
    }

    #[test]
    fn sampling_deterministic_per_seed() {
        let policy = ColorPolicy::default();
        let a = sample_agent_color(&mut ChaCha8Rng::seed_from_u64(3), &policy).unwrap();
        let b = sample_agent_color(&mut ChaCha8Rng::seed_from_u64(3), &policy).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reserved_sampling_region_rejected() {
        let policy = ColorPolicy {
            // squarely inside the green light band
            sample_hue_arcs: vec![(115.0, 145.0)],
            sample_saturation: (0.6, 0.9),
            sample_value: (0.6, 0.9),
            ..ColorPolicy::default()
        };
        let err = sample_agent_color(&mut ChaCha8Rng::seed_from_u64(1), &policy);
        assert!(matches!(err, Err(RasterError::EmptySamplingRegion)));
    }

    #[test]
    fn rasterize_scene_is_deterministic() {
        let mut scene = ego_only_scene(4.5, 2.0);
        scene.num_timesteps = 3;
        scene.agents[0].states = (0..3)
            .map(|t| AgentState {
                t,
                bbox: OrientedBox::new(Pose2D::new(t as f64 * 0.5, 0.0, 0.0), 4.5, 2.0),
            })
            .collect();
        scene.agents.push(AgentTrack {
            agent_id: "a0".into(),
            is_ego: false,
            states: (0..3)
                .map(|t| AgentState {
                    t,
                    bbox: OrientedBox::new(Pose2D::new(5.0 + t as f64, 0.0, 0.0), 4.5, 2.0),
                })
                .collect(),
        });
        let cfg = RasterConfig::default();
        let policy = ColorPolicy::default();
        let v1 = rasterize_scene(&scene, &cfg, &policy, 99).unwrap();
        let v2 = rasterize_scene(&scene, &cfg, &policy, 99).unwrap();
        assert_eq!(v1.frames.len(), 3);
        for (f1, f2) in v1.frames.iter().zip(&v2.frames) {
            assert_eq!(f1.pixels, f2.pixels);
        }
        assert_eq!(v1.manifest, v2.manifest);
        assert_eq!(v1.manifest.scale_px_per_m, [4.8, 5.4]);
    }

    #[test]
    fn video_dir_round_trip() {
        let scene = ego_only_scene(4.5, 2.0);
        let cfg = RasterConfig::default();
        let policy = ColorPolicy::default();
        let video = rasterize_scene(&scene, &cfg, &policy, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_video_dir(&video, dir.path()).unwrap();
        let (frames, manifest) = read_video_dir(dir.path()).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0], video.frames[0]);
        assert_eq!(manifest.unwrap(), video.manifest);
    }
}
