//! Abstract traffic-scene data model and its JSON schema.
//!
//! A scene is the ground-truth side of the pipeline: lane centerlines,
//! traffic-light tracks and agent tracks with oriented boxes, all indexed
//! by integer timestep. One scene per JSON file; see the repository README
//! for the schema.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{OrientedBox, Pose2D, Vec2};

/// Traffic-light signal state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    Red,
    Green,
    Yellow,
    Unknown,
}

/// One timestep of a light track.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalState {
    pub t: u32,
    pub signal: Signal,
}

/// Static light with a time-varying signal. `states` must cover a
/// contiguous timestep range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficLightTrack {
    pub light_id: String,
    pub position: Vec2<f64>,
    pub states: Vec<SignalState>,
}

impl TrafficLightTrack {
    /// Signal at timestep `t`, or `None` outside the covered range.
    pub fn signal_at(&self, t: u32) -> Option<Signal> {
        let first = self.states.first()?.t;
        if t < first {
            return None;
        }
        self.states.get((t - first) as usize).map(|s| s.signal)
    }
}

/// One timestep of an agent track: a full oriented box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "AgentStateJson", into = "AgentStateJson")]
pub struct AgentState {
    pub t: u32,
    pub bbox: OrientedBox<f64>,
}

/// Flat on-disk layout of an agent state.
#[derive(Serialize, Deserialize)]
struct AgentStateJson {
    t: u32,
    x: f64,
    y: f64,
    heading: f64,
    length: f64,
    width: f64,
}

impl From<AgentStateJson> for AgentState {
    fn from(j: AgentStateJson) -> Self {
        AgentState {
            t: j.t,
            bbox: OrientedBox::new(Pose2D::new(j.x, j.y, j.heading), j.length, j.width),
        }
    }
}

impl From<AgentState> for AgentStateJson {
    fn from(s: AgentState) -> Self {
        AgentStateJson {
            t: s.t,
            x: s.bbox.center.x,
            y: s.bbox.center.y,
            heading: s.bbox.center.heading,
            length: s.bbox.length,
            width: s.bbox.width,
        }
    }
}

/// Time-indexed sequence of oriented boxes for one road user. Timesteps
/// must be strictly increasing; gaps are allowed (the agent enters or
/// leaves the surroundings of the ego).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentTrack {
    pub agent_id: String,
    pub is_ego: bool,
    pub states: Vec<AgentState>,
}

impl AgentTrack {
    /// State at exactly timestep `t`, if present.
    pub fn state_at(&self, t: u32) -> Option<&AgentState> {
        self.states
            .binary_search_by_key(&t, |s| s.t)
            .ok()
            .map(|i| &self.states[i])
    }
}

/// Ordered lane centerline, at least two points, consecutive points
/// distinct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanePolyline {
    pub lane_id: String,
    pub points: Vec<Vec2<f64>>,
}

/// A complete abstract scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub scene_id: String,
    #[serde(rename = "frame_rate_hz")]
    pub frame_rate: f64,
    pub num_timesteps: u32,
    pub lanes: Vec<LanePolyline>,
    pub lights: Vec<TrafficLightTrack>,
    pub agents: Vec<AgentTrack>,
}

impl Scene {
    /// The unique ego track. Panics if the scene was not validated.
    pub fn ego(&self) -> &AgentTrack {
        self.agents
            .iter()
            .find(|a| a.is_ego)
            .expect("validated scene has an ego track")
    }

    /// Ego pose at timestep `t`. Panics outside a validated scene's range.
    pub fn ego_pose(&self, t: u32) -> Pose2D<f64> {
        self.ego()
            .state_at(t)
            .expect("ego spans every timestep")
            .bbox
            .center
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_json_string())
    }

    pub fn load(path: &Path) -> Result<Self, SceneLoadError> {
        let text = fs::read_to_string(path).map_err(|source| SceneLoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|source| SceneLoadError::Parse {
            path: path.display().to_string(),
            source,
        })
    }
}

#[derive(Debug, Error)]
pub enum SceneLoadError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
}

/// A single invariant violation found by [`validate_scene`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneViolation {
    #[error("scene has no ego track")]
    MissingEgo,
    #[error("more than one ego track: {0:?}")]
    MultipleEgo(Vec<String>),
    #[error("ego track {0} does not span every timestep")]
    EgoSpanGap(String),
    #[error("track {0} has non-monotonic timesteps")]
    NonMonotonicTimesteps(String),
    #[error("track {id} references timestep {t} >= num_timesteps")]
    DanglingTimestep { id: String, t: u32 },
    #[error("agent {id} has a degenerate box at timestep {t}")]
    DegenerateBox { id: String, t: u32 },
    #[error("lane {0} is degenerate (fewer than 2 points or repeated consecutive points)")]
    DegenerateLane(String),
    #[error("light {0} moves or has no states")]
    InvalidLightTrack(String),
    #[error("scene has a non-finite value in track {0}")]
    NonFiniteValue(String),
    #[error("scene has no timesteps or non-positive frame rate")]
    InvalidHeader,
}

/// Checks every type invariant and returns the complete list of
/// violations, or `Ok` if the scene is well-formed. Pure: the scene is
/// never mutated.
pub fn validate_scene(scene: &Scene) -> Result<(), Vec<SceneViolation>> {
    let mut errs = Vec::new();

    if scene.num_timesteps == 0 || !(scene.frame_rate > 0.0) {
        errs.push(SceneViolation::InvalidHeader);
    }

    let egos: Vec<&AgentTrack> = scene.agents.iter().filter(|a| a.is_ego).collect();
    match egos.len() {
        0 => errs.push(SceneViolation::MissingEgo),
        1 => {
            let ego = egos[0];
            let spans = ego.states.len() as u32 == scene.num_timesteps
                && ego.states.first().map(|s| s.t) == Some(0)
                && ego
                    .states
                    .last()
                    .map(|s| s.t + 1 == scene.num_timesteps)
                    .unwrap_or(false);
            if !spans {
                errs.push(SceneViolation::EgoSpanGap(ego.agent_id.clone()));
            }
        }
        _ => errs.push(SceneViolation::MultipleEgo(
            egos.iter().map(|a| a.agent_id.clone()).collect(),
        )),
    }

    for agent in &scene.agents {
        let mut monotonic = true;
        for pair in agent.states.windows(2) {
            if pair[1].t <= pair[0].t {
                monotonic = false;
            }
        }
        if !monotonic {
            errs.push(SceneViolation::NonMonotonicTimesteps(
                agent.agent_id.clone(),
            ));
        }
        for state in &agent.states {
            if state.t >= scene.num_timesteps {
                errs.push(SceneViolation::DanglingTimestep {
                    id: agent.agent_id.clone(),
                    t: state.t,
                });
            }
            if !(state.bbox.length > 0.0) || !(state.bbox.width > 0.0) {
                errs.push(SceneViolation::DegenerateBox {
                    id: agent.agent_id.clone(),
                    t: state.t,
                });
            }
            let c = state.bbox.center;
            if !(c.x.is_finite() && c.y.is_finite() && c.heading.is_finite()) {
                errs.push(SceneViolation::NonFiniteValue(agent.agent_id.clone()));
            }
        }
    }

    for lane in &scene.lanes {
        let degenerate = lane.points.len() < 2
            || lane.points.windows(2).any(|w| w[0] == w[1])
            || lane.points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite()));
        if degenerate {
            errs.push(SceneViolation::DegenerateLane(lane.lane_id.clone()));
        }
    }

    for light in &scene.lights {
        if light.states.is_empty() || !light.position.x.is_finite() || !light.position.y.is_finite()
        {
            errs.push(SceneViolation::InvalidLightTrack(light.light_id.clone()));
            continue;
        }
        let first = light.states[0].t;
        let contiguous = light
            .states
            .iter()
            .enumerate()
            .all(|(i, s)| s.t == first + i as u32);
        if !contiguous {
            errs.push(SceneViolation::NonMonotonicTimesteps(
                light.light_id.clone(),
            ));
        }
        if let Some(last) = light.states.last() {
            if last.t >= scene.num_timesteps {
                errs.push(SceneViolation::DanglingTimestep {
                    id: light.light_id.clone(),
                    t: last.t,
                });
            }
        }
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_scene() -> Scene {
        let states = (0..5)
            .map(|t| AgentState {
                t,
                bbox: OrientedBox::new(Pose2D::new(t as f64, 0.0, 0.0), 4.5, 2.0),
            })
            .collect();
        Scene {
            scene_id: "test".into(),
            frame_rate: 10.0,
            num_timesteps: 5,
            lanes: vec![LanePolyline {
                lane_id: "lane0".into(),
                points: vec![Vec2::new(-10.0, 0.0), Vec2::new(10.0, 0.0)],
            }],
            lights: vec![TrafficLightTrack {
                light_id: "light0".into(),
                position: Vec2::new(5.0, 0.0),
                states: (0..5)
                    .map(|t| SignalState {
                        t,
                        signal: Signal::Red,
                    })
                    .collect(),
            }],
            agents: vec![AgentTrack {
                agent_id: "ego".into(),
                is_ego: true,
                states,
            }],
        }
    }

    #[test]
    fn valid_scene_passes() {
        assert!(validate_scene(&minimal_scene()).is_ok());
    }

    #[test]
    fn missing_ego_reported() {
        let mut scene = minimal_scene();
        scene.agents[0].is_ego = false;
        let errs = validate_scene(&scene).unwrap_err();
        assert!(errs.contains(&SceneViolation::MissingEgo));
    }

    #[test]
    fn dangling_timestep_reported() {
        let mut scene = minimal_scene();
        let bbox = scene.agents[0].states[0].bbox;
        scene.agents.push(AgentTrack {
            agent_id: "a1".into(),
            is_ego: false,
            states: vec![AgentState { t: 5, bbox }],
        });
        let errs = validate_scene(&scene).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, SceneViolation::DanglingTimestep { id, t: 5 } if id == "a1")));
    }

    #[test]
    fn all_violations_reported_not_just_first() {
        let mut scene = minimal_scene();
        scene.agents[0].is_ego = false; // MissingEgo
        scene.lanes[0].points.pop(); // DegenerateLane
        let errs = validate_scene(&scene).unwrap_err();
        assert!(errs.len() >= 2);
    }

    #[test]
    fn degenerate_box_reported() {
        let mut scene = minimal_scene();
        scene.agents[0].states[2].bbox.length = 0.0;
        let errs = validate_scene(&scene).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, SceneViolation::DegenerateBox { t: 2, .. })));
    }

    #[test]
    fn json_round_trip_preserves_scene() {
        let scene = minimal_scene();
        let text = scene.to_json_string();
        let back = Scene::from_json_str(&text).unwrap();
        assert_eq!(scene, back);
        // schema spot checks
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["frame_rate_hz"], 10.0);
        assert_eq!(value["agents"][0]["states"][1]["x"], 1.0);
        assert_eq!(value["lights"][0]["position"][0], 5.0);
        assert_eq!(value["lights"][0]["states"][0]["signal"], "red");
        assert_eq!(value["lanes"][0]["points"][0][0], -10.0);
    }

    #[test]
    fn signal_lookup_outside_range_is_none() {
        let scene = minimal_scene();
        assert_eq!(scene.lights[0].signal_at(4), Some(Signal::Red));
        assert_eq!(scene.lights[0].signal_at(5), None);
    }
}
