//! Planar geometry: poses, oriented boxes, and the world <-> image
//! transforms that anchor rasterization and extraction.
//!
//! Image convention: the frame is portrait with the ego heading "up".
//! Row increases opposite the ego forward axis, column increases to the
//! ego's right. Pixel `(r, c)` covers the continuous rectangle
//! `[r, r+1) x [c, c+1)` with center `(r+0.5, c+0.5)`.

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::num::{real, Real};

/// 2D vector / point in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    /// Unit vector at the given angle from the +x axis.
    pub fn from_angle(angle: T) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    /// Counter-clockwise perpendicular (left of this vector).
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<T: Real> std::ops::Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> std::ops::Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

// Serialized as a bare `[x, y]` pair to match the scene JSON schema.
impl<T: Serialize> Serialize for Vec2<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(&self.x)?;
        tup.serialize_element(&self.y)?;
        tup.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Vec2<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V<T>(std::marker::PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Vec2<T>;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a [x, y] pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let x = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let y = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                Ok(Vec2 { x, y })
            }
        }
        deserializer.deserialize_tuple(2, V(std::marker::PhantomData))
    }
}

/// Normalize an angle into `(-pi, pi]`.
pub fn normalize_angle<T: Real>(angle: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut a = angle % two_pi;
    if a > T::PI() {
        a = a - two_pi;
    } else if a <= -T::PI() {
        a = a + two_pi;
    }
    a
}

/// Position plus heading in the world frame. Heading is radians in
/// `(-pi, pi]`, measured counter-clockwise from the +x axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose2D<T> {
    pub x: T,
    pub y: T,
    pub heading: T,
}

impl<T: Real> Pose2D<T> {
    /// Builds a pose, normalizing the heading into `(-pi, pi]`.
    pub fn new(x: T, y: T, heading: T) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn position(&self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    /// Unit vector along the heading.
    pub fn forward(&self) -> Vec2<T> {
        Vec2::from_angle(self.heading)
    }

    /// Unit vector to the left of the heading.
    pub fn left(&self) -> Vec2<T> {
        self.forward().perp()
    }
}

/// Rectangle with center pose; `length` runs along the heading, `width`
/// across it. Both must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedBox<T> {
    pub center: Pose2D<T>,
    pub length: T,
    pub width: T,
}

impl<T: Real> OrientedBox<T> {
    pub fn new(center: Pose2D<T>, length: T, width: T) -> Self {
        Self {
            center,
            length,
            width,
        }
    }

    /// Corner points in counter-clockwise order starting front-left.
    pub fn corners(&self) -> [Vec2<T>; 4] {
        let half = real::<T>(0.5);
        let f = self.center.forward().scale(self.length * half);
        let l = self.center.left().scale(self.width * half);
        let c = self.center.position();
        [c + f + l, c - f + l, c - f - l, c + f - l]
    }

    /// True when the point lies inside or on the boundary.
    pub fn contains(&self, p: Vec2<T>) -> bool {
        let d = p - self.center.position();
        let half = real::<T>(0.5);
        let lon = d.dot(self.center.forward());
        let lat = d.dot(self.center.left());
        lon.abs() <= self.length * half && lat.abs() <= self.width * half
    }

    /// Euclidean distance from a point to the box (0 when inside).
    pub fn distance_to_point(&self, p: Vec2<T>) -> T {
        let d = p - self.center.position();
        let half = real::<T>(0.5);
        let lon = d.dot(self.center.forward()).abs() - self.length * half;
        let lat = d.dot(self.center.left()).abs() - self.width * half;
        let dl = lon.max(T::zero());
        let dt = lat.max(T::zero());
        (dl * dl + dt * dt).sqrt()
    }

    /// Separating-axis overlap test against another oriented box.
    pub fn overlaps(&self, other: &Self) -> bool {
        let axes = [
            self.center.forward(),
            self.center.left(),
            other.center.forward(),
            other.center.left(),
        ];
        let ca = self.corners();
        let cb = other.corners();
        for axis in axes {
            let (mut amin, mut amax) = (T::infinity(), T::neg_infinity());
            for p in ca {
                let v = p.dot(axis);
                amin = amin.min(v);
                amax = amax.max(v);
            }
            let (mut bmin, mut bmax) = (T::infinity(), T::neg_infinity());
            for p in cb {
                let v = p.dot(axis);
                bmin = bmin.min(v);
                bmax = bmax.max(v);
            }
            if amax < bmin || bmax < amin {
                return false;
            }
        }
        true
    }
}

/// Raster window geometry and rendering dimensions.
///
/// The window is `window_length` meters along the ego heading (mapped to
/// `frame_rows` pixels) by `window_width` meters across it (mapped to
/// `frame_cols` pixels). Each axis carries its own pixel scale; the default
/// 20x10 m window at 96x54 px gives 4.8 and 5.4 px/m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RasterConfig<T> {
    /// Meters covered along the ego heading (row axis).
    pub window_length: T,
    /// Meters covered across the ego heading (column axis).
    pub window_width: T,
    pub frame_rows: usize,
    pub frame_cols: usize,
    /// Frames per second assumed when a video carries no manifest.
    pub frame_rate: T,
    /// Stroke width of lane centerlines, meters.
    pub lane_thickness: T,
    /// Diameter of the traffic-light disc, meters.
    pub light_diameter: T,
}

impl<T: Real> Default for RasterConfig<T> {
    fn default() -> Self {
        Self {
            window_length: real(20.0),
            window_width: real(10.0),
            frame_rows: 96,
            frame_cols: 54,
            frame_rate: real(10.0),
            lane_thickness: real(1.5),
            light_diameter: real(2.0),
        }
    }
}

impl<T: Real> RasterConfig<T> {
    /// Longitudinal scale, pixels per meter along the row axis.
    pub fn scale_row(&self) -> T {
        T::from_usize(self.frame_rows).unwrap() / self.window_length
    }

    /// Lateral scale, pixels per meter along the column axis.
    pub fn scale_col(&self) -> T {
        T::from_usize(self.frame_cols).unwrap() / self.window_width
    }

    /// Continuous image coordinates of the ego anchor (frame center).
    pub fn image_center(&self) -> Vec2<T> {
        let half = real::<T>(0.5);
        Vec2::new(
            T::from_usize(self.frame_rows).unwrap() * half,
            T::from_usize(self.frame_cols).unwrap() * half,
        )
    }

    pub fn validate(&self) -> Result<(), String> {
        let ok = self.window_length > T::zero()
            && self.window_width > T::zero()
            && self.frame_rows > 0
            && self.frame_cols > 0
            && self.frame_rate > T::zero()
            && self.lane_thickness > T::zero()
            && self.light_diameter > T::zero();
        if ok {
            Ok(())
        } else {
            Err("raster config requires positive dimensions, rates and sizes".into())
        }
    }
}

/// World point -> continuous image coordinates `(row, col)` for the given
/// ego pose.
///
/// A rigid transform into the ego frame followed by anisotropic scaling;
/// the ego center lands on the image center and the forward direction maps
/// to decreasing row. Points outside the window map to out-of-range
/// coordinates; callers clip.
pub fn world_to_image<T: Real>(ego: &Pose2D<T>, point: Vec2<T>, cfg: &RasterConfig<T>) -> Vec2<T> {
    let d = point - ego.position();
    let forward = d.dot(ego.forward());
    let left = d.dot(ego.left());
    let center = cfg.image_center();
    Vec2::new(
        center.x - forward * cfg.scale_row(),
        center.y - left * cfg.scale_col(),
    )
}

/// Exact inverse of [`world_to_image`].
pub fn image_to_world<T: Real>(ego: &Pose2D<T>, pixel: Vec2<T>, cfg: &RasterConfig<T>) -> Vec2<T> {
    let center = cfg.image_center();
    let forward = (center.x - pixel.x) / cfg.scale_row();
    let left = (center.y - pixel.y) / cfg.scale_col();
    ego.position() + ego.forward().scale(forward) + ego.left().scale(left)
}
