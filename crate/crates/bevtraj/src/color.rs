//! RGB8 / HSV color model shared by the rasterizer and the detector.
//!
//! Hue is degrees in `[0, 360)`, saturation and value in `[0, 1]`
//! (standard hexcone conversion).

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// 8-bit RGB color, serialized as `[r, g, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ColorRgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl ColorRgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub const WHITE: Self = Self::new(255, 255, 255);
    pub const BLACK: Self = Self::new(0, 0, 0);
}

impl Serialize for ColorRgb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(3)?;
        tup.serialize_element(&self.r)?;
        tup.serialize_element(&self.g)?;
        tup.serialize_element(&self.b)?;
        tup.end()
    }
}

impl<'de> Deserialize<'de> for ColorRgb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ColorRgb;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a [r, g, b] triple")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let r = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let g = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                let b = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(2, &self))?;
                Ok(ColorRgb { r, g, b })
            }
        }
        deserializer.deserialize_tuple(3, V)
    }
}

/// HSV pixel: hue degrees `[0, 360)`, saturation and value `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Standard RGB -> HSV hexcone conversion.
pub fn rgb_to_hsv(c: ColorRgb) -> Hsv {
    let r = c.r as f64 / 255.0;
    let g = c.g as f64 / 255.0;
    let b = c.b as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    Hsv { h, s, v: max }
}

/// HSV -> RGB8, rounding each channel.
pub fn hsv_to_rgb(hsv: Hsv) -> ColorRgb {
    let h = hsv.h.rem_euclid(360.0);
    let c = hsv.v * hsv.s;
    let x = c * (1.0 - ((h / 60.0).rem_euclid(2.0) - 1.0).abs());
    let m = hsv.v - c;
    let (r1, g1, b1) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let to8 = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    ColorRgb::new(to8(r1), to8(g1), to8(b1))
}

/// Circular distance between two hues, degrees in `[0, 180]`.
pub fn hue_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Closed hue interval in degrees; wraps through 0 when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HueBand {
    pub lo: f64,
    pub hi: f64,
}

impl HueBand {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, h: f64) -> bool {
        let h = h.rem_euclid(360.0);
        if self.lo <= self.hi {
            h >= self.lo && h <= self.hi
        } else {
            h >= self.lo || h <= self.hi
        }
    }

    /// Degrees separating `h` from the band; 0 when inside.
    pub fn distance(&self, h: f64) -> f64 {
        if self.contains(h) {
            0.0
        } else {
            hue_distance(h, self.lo).min(hue_distance(h, self.hi))
        }
    }
}

/// Default hue bands where the three traffic-light colors are expected.
/// The rasterizer's reserved palette and the detector's masks both build
/// on these so rendered lights always segment cleanly.
pub const RED_HUE_BAND: HueBand = HueBand::new(346.0, 14.0);
pub const GREEN_HUE_BAND: HueBand = HueBand::new(110.0, 150.0);
pub const YELLOW_HUE_BAND: HueBand = HueBand::new(38.0, 58.0);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_red() {
        let hsv = rgb_to_hsv(ColorRgb::new(255, 0, 0));
        assert_eq!(hsv.h, 0.0);
        assert_eq!(hsv.s, 1.0);
        assert_eq!(hsv.v, 1.0);
    }

    #[test]
    fn white_has_zero_saturation() {
        let hsv = rgb_to_hsv(ColorRgb::WHITE);
        assert_eq!(hsv.s, 0.0);
        assert_eq!(hsv.v, 1.0);
    }

    #[test]
    fn light_red_hand_check() {
        // (230, 30, 30): delta = 200/255, max = 230/255
        let hsv = rgb_to_hsv(ColorRgb::new(230, 30, 30));
        assert_eq!(hsv.h, 0.0);
        assert!((hsv.s - 200.0 / 230.0).abs() < 1e-12);
        assert!((hsv.v - 230.0 / 255.0).abs() < 1e-12);
        assert!((hsv.s - 0.87).abs() < 0.01);
        assert!((hsv.v - 0.90).abs() < 0.01);
    }

    #[test]
    fn round_trip_within_quantization() {
        for (h, s, v) in [(200.0, 0.7, 0.8), (10.0, 0.9, 0.6), (310.0, 0.6, 0.9)] {
            let rgb = hsv_to_rgb(Hsv { h, s, v });
            let back = rgb_to_hsv(rgb);
            assert!(hue_distance(back.h, h) < 2.0, "{h} -> {:?}", back);
            assert!((back.s - s).abs() < 0.02);
            assert!((back.v - v).abs() < 0.02);
        }
    }

    #[test]
    fn hue_distance_wraps() {
        assert_eq!(hue_distance(350.0, 10.0), 20.0);
        assert_eq!(hue_distance(10.0, 350.0), 20.0);
        assert_eq!(hue_distance(0.0, 180.0), 180.0);
    }
}
