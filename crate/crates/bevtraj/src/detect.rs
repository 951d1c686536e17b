//! Per-frame object detection on occupancy-grid frames.
//!
//! Pipeline per frame: convert to HSV, mask the three traffic-light hue
//! subspaces, inpaint the lights away (nearest non-light pixel), mask the
//! ego and other agents on the inpainted frame, clean every mask with a
//! morphological opening, extract 8-connected components, measure their
//! features, and classify by mask category with an area sanity range —
//! components whose area is inconsistent with their category come out as
//! `unknown`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{rgb_to_hsv, ColorRgb, Hsv, HueBand, GREEN_HUE_BAND, RED_HUE_BAND, YELLOW_HUE_BAND};
use crate::raster::Frame;

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("frame is entirely covered by light masks; nothing to inpaint from")]
    AllPixelsMasked,
    #[error("detections io: {0}")]
    Io(#[from] std::io::Error),
    #[error("detections parse: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Detection class, named after the mask the component came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    LightRed,
    LightGreen,
    LightYellow,
    Ego,
    Agent,
    Unknown,
}

impl Category {
    pub fn is_light(self) -> bool {
        matches!(self, Category::LightRed | Category::LightGreen | Category::LightYellow)
    }

    pub fn is_vehicle(self) -> bool {
        matches!(self, Category::Ego | Category::Agent)
    }
}

/// HSV bands and size gates for the masking pipeline. Bands must be
/// pairwise disjoint so the masks partition the occupied pixels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub red_band: HueBand,
    pub green_band: HueBand,
    pub yellow_band: HueBand,
    /// Lights must be at least this saturated and bright.
    pub light_min_saturation: f64,
    pub light_min_value: f64,
    /// The ego is the dark region: value at or below this, any hue.
    pub ego_max_value: f64,
    pub agent_min_saturation: f64,
    pub agent_min_value: f64,
    /// Square opening kernel side, pixels (odd).
    pub opening_kernel: usize,
    pub min_component_px: usize,
    /// Plausible light footprint, m².
    pub light_area_m2: (f64, f64),
    /// Plausible vehicle footprint (ego or agent), m².
    pub vehicle_area_m2: (f64, f64),
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            red_band: RED_HUE_BAND,
            green_band: GREEN_HUE_BAND,
            yellow_band: YELLOW_HUE_BAND,
            light_min_saturation: 0.5,
            light_min_value: 0.5,
            ego_max_value: 0.2,
            agent_min_saturation: 0.3,
            agent_min_value: 0.3,
            opening_kernel: 3,
            min_component_px: 4,
            light_area_m2: (1.5, 6.0),
            vehicle_area_m2: (4.0, 30.0),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), String> {
        let bands = [self.red_band, self.green_band, self.yellow_band];
        for i in 0..3 {
            for j in i + 1..3 {
                // sample the band edges against each other
                for h in [bands[i].lo, bands[i].hi] {
                    if bands[j].contains(h) {
                        return Err("light hue bands overlap".into());
                    }
                }
            }
        }
        if self.ego_max_value >= self.agent_min_value
            || self.ego_max_value >= self.light_min_value
        {
            return Err("ego value band overlaps agent or light bands".into());
        }
        if self.opening_kernel % 2 == 0 || self.opening_kernel == 0 {
            return Err("opening kernel must be odd and positive".into());
        }
        Ok(())
    }

    fn in_light_band(&self, hsv: Hsv, band: HueBand) -> bool {
        band.contains(hsv.h) && hsv.s >= self.light_min_saturation && hsv.v >= self.light_min_value
    }

    fn in_any_light_hue(&self, h: f64) -> bool {
        self.red_band.contains(h) || self.green_band.contains(h) || self.yellow_band.contains(h)
    }
}

/// Binary occupancy mask matching a frame's dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    pub rows: usize,
    pub cols: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.cols + c] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_disjoint(&self, other: &Mask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !(a && b))
    }
}

/// Frame converted to HSV, row-major.
#[derive(Clone, Debug)]
pub struct HsvFrame {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<Hsv>,
}

impl HsvFrame {
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Hsv {
        self.pixels[r * self.cols + c]
    }
}

/// Standard per-pixel RGB -> HSV conversion.
pub fn to_hsv(frame: &Frame) -> HsvFrame {
    let pixels = (0..frame.rows * frame.cols)
        .map(|i| {
            rgb_to_hsv(ColorRgb::new(
                frame.pixels[i * 3],
                frame.pixels[i * 3 + 1],
                frame.pixels[i * 3 + 2],
            ))
        })
        .collect();
    HsvFrame {
        rows: frame.rows,
        cols: frame.cols,
        pixels,
    }
}

/// Mask the red, green and yellow traffic-light subspaces.
pub fn mask_lights(hsv: &HsvFrame, cfg: &DetectorConfig) -> [Mask; 3] {
    let mut masks = [
        Mask::empty(hsv.rows, hsv.cols),
        Mask::empty(hsv.rows, hsv.cols),
        Mask::empty(hsv.rows, hsv.cols),
    ];
    let bands = [cfg.red_band, cfg.green_band, cfg.yellow_band];
    for i in 0..hsv.rows * hsv.cols {
        let px = hsv.pixels[i];
        for (m, &band) in masks.iter_mut().zip(&bands) {
            if cfg.in_light_band(px, band) {
                m.bits[i] = true;
            }
        }
    }
    masks
}

/// Replace every light pixel with the color of the nearest non-light
/// pixel (Euclidean, ties toward smaller row then smaller column).
/// Non-light pixels pass through untouched, so the operation is
/// idempotent.
pub fn inpaint_lights(frame: &Frame, light_masks: &[Mask; 3]) -> Result<Frame, DetectError> {
    let (rows, cols) = (frame.rows, frame.cols);
    let mut union = Mask::empty(rows, cols);
    for m in light_masks {
        for (u, &b) in union.bits.iter_mut().zip(&m.bits) {
            *u |= b;
        }
    }
    let masked = union.count();
    if masked == 0 {
        return Ok(frame.clone());
    }
    if masked == rows * cols {
        return Err(DetectError::AllPixelsMasked);
    }

    let mut out = frame.clone();
    for r in 0..rows {
        for c in 0..cols {
            if !union.get(r, c) {
                continue;
            }
            // expanding ring search for the nearest unmasked pixel
            let mut best: Option<(u64, usize, usize)> = None; // (dist2, row, col)
            let mut ring = 1usize;
            loop {
                let consider = |rr: i64, cc: i64, best: &mut Option<(u64, usize, usize)>| {
                    if rr < 0 || cc < 0 || rr >= rows as i64 || cc >= cols as i64 {
                        return;
                    }
                    let (rr, cc) = (rr as usize, cc as usize);
                    if union.get(rr, cc) {
                        return;
                    }
                    let dr = rr as i64 - r as i64;
                    let dc = cc as i64 - c as i64;
                    let d2 = (dr * dr + dc * dc) as u64;
                    let better = match *best {
                        None => true,
                        Some((bd2, br, bc)) => {
                            d2 < bd2 || (d2 == bd2 && (rr, cc) < (br, bc))
                        }
                    };
                    if better {
                        *best = Some((d2, rr, cc));
                    }
                };
                let k = ring as i64;
                for d in -k..=k {
                    consider(r as i64 - k, c as i64 + d, &mut best);
                    consider(r as i64 + k, c as i64 + d, &mut best);
                }
                for d in -k + 1..k {
                    consider(r as i64 + d, c as i64 - k, &mut best);
                    consider(r as i64 + d, c as i64 + k, &mut best);
                }
                // a candidate in ring k+1 can only win while (k+1)^2 < best
                if let Some((d2, _, _)) = best {
                    if ((ring + 1) * (ring + 1)) as u64 >= d2 {
                        break;
                    }
                }
                ring += 1;
                if ring > rows + cols {
                    break;
                }
            }
            let (_, br, bc) = best.expect("some unmasked pixel exists");
            out.set(r, c, frame.get(br, bc));
        }
    }
    Ok(out)
}

/// Mask the ego (dark band) and other agents (saturated, bright, hue away
/// from the light bands) on an already-inpainted frame.
pub fn mask_vehicles(hsv: &HsvFrame, cfg: &DetectorConfig) -> (Mask, Mask) {
    let mut ego = Mask::empty(hsv.rows, hsv.cols);
    let mut agents = Mask::empty(hsv.rows, hsv.cols);
    for i in 0..hsv.rows * hsv.cols {
        let px = hsv.pixels[i];
        if px.v <= cfg.ego_max_value {
            ego.bits[i] = true;
        } else if px.s >= cfg.agent_min_saturation
            && px.v >= cfg.agent_min_value
            && !cfg.in_any_light_hue(px.h)
        {
            agents.bits[i] = true;
        }
    }
    (ego, agents)
}

fn erode(mask: &Mask, kernel: usize) -> Mask {
    let k = (kernel / 2) as i64;
    let mut out = Mask::empty(mask.rows, mask.cols);
    for r in 0..mask.rows as i64 {
        'px: for c in 0..mask.cols as i64 {
            for dr in -k..=k {
                for dc in -k..=k {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr < 0
                        || cc < 0
                        || rr >= mask.rows as i64
                        || cc >= mask.cols as i64
                        || !mask.get(rr as usize, cc as usize)
                    {
                        continue 'px;
                    }
                }
            }
            out.set(r as usize, c as usize, true);
        }
    }
    out
}

fn dilate(mask: &Mask, kernel: usize) -> Mask {
    let k = (kernel / 2) as i64;
    let mut out = Mask::empty(mask.rows, mask.cols);
    for r in 0..mask.rows as i64 {
        for c in 0..mask.cols as i64 {
            if !mask.get(r as usize, c as usize) {
                continue;
            }
            for dr in -k..=k {
                for dc in -k..=k {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr >= 0 && cc >= 0 && rr < mask.rows as i64 && cc < mask.cols as i64 {
                        out.set(rr as usize, cc as usize, true);
                    }
                }
            }
        }
    }
    out
}

/// Morphological opening: erosion then dilation with the same square
/// structuring element. Removes speckles smaller than the kernel while
/// preserving shapes that contain it; idempotent.
pub fn morphological_open(mask: &Mask, kernel: usize) -> Mask {
    dilate(&erode(mask, kernel), kernel)
}

/// 8-connected components of at least `min_px` pixels, each sorted
/// row-major, the list ordered by its top-left-most pixel.
pub fn extract_components(mask: &Mask, min_px: usize) -> Vec<Vec<(u16, u16)>> {
    let mut seen = vec![false; mask.rows * mask.cols];
    let mut components = Vec::new();
    for r0 in 0..mask.rows {
        for c0 in 0..mask.cols {
            let idx = r0 * mask.cols + c0;
            if seen[idx] || !mask.bits[idx] {
                continue;
            }
            let mut stack = vec![(r0, c0)];
            seen[idx] = true;
            let mut pixels = Vec::new();
            while let Some((r, c)) = stack.pop() {
                pixels.push((r as u16, c as u16));
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                        if rr < 0 || cc < 0 || rr >= mask.rows as i64 || cc >= mask.cols as i64 {
                            continue;
                        }
                        let (rr, cc) = (rr as usize, cc as usize);
                        let j = rr * mask.cols + cc;
                        if mask.bits[j] && !seen[j] {
                            seen[j] = true;
                            stack.push((rr, cc));
                        }
                    }
                }
            }
            if pixels.len() >= min_px {
                pixels.sort_unstable();
                components.push(pixels);
            }
        }
    }
    components.sort_by_key(|p| p[0]);
    components
}

/// Axis-aligned pixel bounding box, inclusive corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelBox {
    pub r0: u16,
    pub c0: u16,
    pub r1: u16,
    pub c1: u16,
}

impl PixelBox {
    pub fn area(&self) -> usize {
        (self.r1 - self.r0 + 1) as usize * (self.c1 - self.c0 + 1) as usize
    }
}

/// One detected object with its contour-derived features.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectedObject {
    pub frame_index: u32,
    pub category: Category,
    /// (row, col), continuous pixels: mean of covered pixel centers.
    pub centroid: (f64, f64),
    pub area_px: usize,
    pub area_m2: f64,
    pub mean_color: ColorRgb,
    pub bbox: PixelBox,
    /// area_px / bbox area, in (0, 1].
    pub rectangularity: f64,
    /// 4*pi*area / perimeter^2; perimeter counts pixel edges adjacent to
    /// background.
    pub circularity: f64,
    /// Component pixels, row-major; kept for edge-distance metrics.
    pub pixel_set: Vec<(u16, u16)>,
}

/// Measure a component. `color_source` is the frame the mean color is
/// averaged over (original frame for lights, inpainted for vehicles).
pub fn component_features(
    pixels: &[(u16, u16)],
    color_source: &Frame,
    scales: (f64, f64),
    frame_index: u32,
) -> DetectedObject {
    let n = pixels.len();
    let mut sum_r = 0.0;
    let mut sum_c = 0.0;
    let (mut cr, mut cg, mut cb) = (0u64, 0u64, 0u64);
    let (mut r0, mut c0, mut r1, mut c1) = (u16::MAX, u16::MAX, 0u16, 0u16);
    let set: std::collections::HashSet<(u16, u16)> = pixels.iter().copied().collect();
    let mut perimeter = 0usize;
    for &(r, c) in pixels {
        sum_r += r as f64 + 0.5;
        sum_c += c as f64 + 0.5;
        let px = color_source.get(r as usize, c as usize);
        cr += px.r as u64;
        cg += px.g as u64;
        cb += px.b as u64;
        r0 = r0.min(r);
        c0 = c0.min(c);
        r1 = r1.max(r);
        c1 = c1.max(c);
        for (dr, dc) in [(-1i32, 0i32), (1, 0), (0, -1), (0, 1)] {
            let (rr, cc) = (r as i32 + dr, c as i32 + dc);
            if rr < 0
                || cc < 0
                || rr >= color_source.rows as i32
                || cc >= color_source.cols as i32
                || !set.contains(&(rr as u16, cc as u16))
            {
                perimeter += 1;
            }
        }
    }
    let bbox = PixelBox { r0, c0, r1, c1 };
    let nf = n as f64;
    DetectedObject {
        frame_index,
        category: Category::Unknown,
        centroid: (sum_r / nf, sum_c / nf),
        area_px: n,
        area_m2: nf / (scales.0 * scales.1),
        mean_color: ColorRgb::new(
            (cr as f64 / nf).round() as u8,
            (cg as f64 / nf).round() as u8,
            (cb as f64 / nf).round() as u8,
        ),
        bbox,
        rectangularity: nf / bbox.area() as f64,
        circularity: 4.0 * std::f64::consts::PI * nf / (perimeter * perimeter) as f64,
        pixel_set: pixels.to_vec(),
    }
}

/// Assign the source mask's category, or `unknown` when the measured area
/// is inconsistent with that category's expected size range.
pub fn classify(
    mut object: DetectedObject,
    source_category: Category,
    cfg: &DetectorConfig,
) -> DetectedObject {
    let bounds = if source_category.is_light() {
        cfg.light_area_m2
    } else {
        cfg.vehicle_area_m2
    };
    object.category = if object.area_m2 >= bounds.0 && object.area_m2 <= bounds.1 {
        source_category
    } else {
        Category::Unknown
    };
    object
}

/// Full per-frame detection pipeline. Deterministic: detections are
/// ordered red, green, yellow, ego, agent masks, each by top-left pixel.
pub fn detect_frame(
    frame: &Frame,
    cfg: &DetectorConfig,
    scales: (f64, f64),
    frame_index: u32,
) -> Result<Vec<DetectedObject>, DetectError> {
    let hsv = to_hsv(frame);
    let light_masks = mask_lights(&hsv, cfg);
    let inpainted = inpaint_lights(frame, &light_masks)?;
    let hsv_inpainted = to_hsv(&inpainted);
    let (ego_mask, agent_mask) = mask_vehicles(&hsv_inpainted, cfg);

    let sources: [(&Mask, Category, &Frame); 5] = [
        (&light_masks[0], Category::LightRed, frame),
        (&light_masks[1], Category::LightGreen, frame),
        (&light_masks[2], Category::LightYellow, frame),
        (&ego_mask, Category::Ego, &inpainted),
        (&agent_mask, Category::Agent, &inpainted),
    ];

    let mut detections = Vec::new();
    for (mask, category, color_source) in sources {
        let opened = morphological_open(mask, cfg.opening_kernel);
        for pixels in extract_components(&opened, cfg.min_component_px) {
            let object = component_features(&pixels, color_source, scales, frame_index);
            detections.push(classify(object, category, cfg));
        }
    }
    Ok(detections)
}

// --- detections on disk: JSON Lines, one record per detection ---

/// Serialized detection record. Pixel runs are `[row, col_start, col_end]`
/// inclusive spans of the component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame: u32,
    pub category: Category,
    pub centroid_px: (f64, f64),
    pub area_px: usize,
    pub area_m2: f64,
    pub mean_rgb: ColorRgb,
    pub bbox: PixelBox,
    pub rectangularity: f64,
    pub circularity: f64,
    pub pixel_runs: Vec<(u16, u16, u16)>,
}

impl DetectionRecord {
    pub fn from_object(o: &DetectedObject) -> Self {
        let mut runs: Vec<(u16, u16, u16)> = Vec::new();
        for &(r, c) in &o.pixel_set {
            match runs.last_mut() {
                Some(run) if run.0 == r && run.2 + 1 == c => run.2 = c,
                _ => runs.push((r, c, c)),
            }
        }
        Self {
            frame: o.frame_index,
            category: o.category,
            centroid_px: o.centroid,
            area_px: o.area_px,
            area_m2: o.area_m2,
            mean_rgb: o.mean_color,
            bbox: o.bbox,
            rectangularity: o.rectangularity,
            circularity: o.circularity,
            pixel_runs: runs,
        }
    }

    pub fn to_object(&self) -> DetectedObject {
        let mut pixel_set = Vec::with_capacity(self.area_px);
        for &(r, c0, c1) in &self.pixel_runs {
            for c in c0..=c1 {
                pixel_set.push((r, c));
            }
        }
        DetectedObject {
            frame_index: self.frame,
            category: self.category,
            centroid: self.centroid_px,
            area_px: self.area_px,
            area_m2: self.area_m2,
            mean_color: self.mean_rgb,
            bbox: self.bbox,
            rectangularity: self.rectangularity,
            circularity: self.circularity,
            pixel_set,
        }
    }
}

/// Write per-frame detections as JSON Lines.
pub fn write_detections_jsonl(
    per_frame: &[Vec<DetectedObject>],
    path: &Path,
) -> Result<(), DetectError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for frame in per_frame {
        for det in frame {
            serde_json::to_writer(&mut out, &DetectionRecord::from_object(det))?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Read detections back, grouped per frame index (dense up to the max
/// frame present).
pub fn read_detections_jsonl(path: &Path) -> Result<Vec<Vec<DetectedObject>>, DetectError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut per_frame: Vec<Vec<DetectedObject>> = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DetectionRecord = serde_json::from_str(&line)?;
        let idx = record.frame as usize;
        if per_frame.len() <= idx {
            per_frame.resize_with(idx + 1, Vec::new);
        }
        per_frame[idx].push(record.to_object());
    }
    Ok(per_frame)
}
