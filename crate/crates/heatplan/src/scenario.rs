//! Scenario data model and the self-contained JSON on-disk format.
//!
//! A scenario bundles a vector map (drivable area, lane baselines, route,
//! static obstacles), agent tracks with ground-truth futures, the ego start
//! state and the expert future used for imitation targets and metrics.

use crate::geometry::{Polygon, Polyline, Pose2, Trajectory, TrajectoryState};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scenario validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Vehicle,
    Pedestrian,
    Cyclist,
    Static,
}

/// A state sample at an explicit timestamp (seconds relative to the
/// scenario's t = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedState {
    pub t: f64,
    #[serde(flatten)]
    pub state: TrajectoryState,
}

/// One tracked agent: footprint, observed history up to t = 0 and the
/// ground-truth future used by oracles and non-reactive playback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTrack {
    pub id: String,
    pub kind: AgentKind,
    /// Footprint extent along the heading, meters.
    pub length: f64,
    /// Footprint extent across the heading, meters.
    pub width: f64,
    pub history: Vec<TimedState>,
    pub future: Vec<TimedState>,
}

impl AgentTrack {
    /// State at t = 0 (the last history sample).
    pub fn current(&self) -> &TimedState {
        self.history.last().expect("validated history is non-empty")
    }

    /// Ground-truth state at time `t`, interpolated between samples.
    /// `None` before the first history sample or past the last future sample.
    pub fn state_at(&self, t: f64) -> Option<TrajectoryState> {
        let mut prev: Option<&TimedState> = None;
        for s in self.history.iter().chain(self.future.iter()) {
            if s.t >= t {
                return Some(match prev {
                    None if s.t == t => s.state,
                    None => return None,
                    Some(p) => interpolate(p, s, t),
                });
            }
            prev = Some(s);
        }
        None
    }

    /// Like [`AgentTrack::state_at`] but holding the boundary states outside
    /// the covered span.
    pub fn state_at_clamped(&self, t: f64) -> TrajectoryState {
        if let Some(s) = self.state_at(t) {
            return s;
        }
        let first = self.history.first().expect("non-empty history");
        let last = self.future.last().unwrap_or_else(|| self.current());
        if t <= first.t {
            first.state
        } else {
            last.state
        }
    }

    pub fn footprint_at(&self, pose: &Pose2) -> Polygon {
        crate::geometry::rectangle_footprint(pose, self.length, self.width)
    }
}

fn interpolate(a: &TimedState, b: &TimedState, t: f64) -> TrajectoryState {
    let f = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
    TrajectoryState {
        pose: Pose2::new(
            a.state.pose.x + f * (b.state.pose.x - a.state.pose.x),
            a.state.pose.y + f * (b.state.pose.y - a.state.pose.y),
            a.state.pose.heading
                + f * crate::geometry::wrap_angle(b.state.pose.heading - a.state.pose.heading),
        ),
        speed: a.state.speed + f * (b.state.speed - a.state.speed),
    }
}

/// Lane centerline with its speed limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baseline {
    pub id: String,
    pub points: Polyline,
    /// m/s
    pub speed_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMap {
    pub drivable_area: Vec<Polygon>,
    pub baseline_paths: Vec<Baseline>,
    /// Ordered ids of the baselines forming the navigation route.
    pub route: Vec<String>,
    pub static_objects: Vec<Polygon>,
}

impl ScenarioMap {
    pub fn baseline(&self, id: &str) -> Option<&Baseline> {
        self.baseline_paths.iter().find(|b| b.id == id)
    }

    /// Concatenated route centerline, in route order.
    pub fn route_polyline(&self) -> Polyline {
        let mut pts = Vec::new();
        for id in &self.route {
            if let Some(b) = self.baseline(id) {
                for &p in &b.points.points {
                    if pts.last() != Some(&p) {
                        pts.push(p);
                    }
                }
            }
        }
        Polyline::new(pts)
    }

    pub fn drivable_contains(&self, p: crate::geometry::Point2) -> bool {
        self.drivable_area.iter().any(|poly| poly.contains(p))
    }
}

/// A complete planning scene. `expert_future` starts at the ego start state
/// (t = 0) and spans `horizon` states at `dt` seconds apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dt: f64,
    #[serde(rename = "horizon")]
    pub horizon_t: usize,
    pub map: ScenarioMap,
    pub agents: Vec<AgentTrack>,
    #[serde(rename = "ego")]
    pub ego_start: TrajectoryState,
    pub expert_future: Trajectory,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.horizon_t < 2 {
            return Err(invalid(format!(
                "horizon must be at least 2, got {}",
                self.horizon_t
            )));
        }
        if (self.expert_future.dt - self.dt).abs() > 1e-12 {
            return Err(invalid(format!(
                "expert_future.dt ({}) must equal scenario dt ({})",
                self.expert_future.dt, self.dt
            )));
        }
        if self.expert_future.len() != self.horizon_t {
            return Err(invalid(format!(
                "expert_future has {} states, expected horizon {}",
                self.expert_future.len(),
                self.horizon_t
            )));
        }
        for id in &self.map.route {
            if self.map.baseline(id).is_none() {
                return Err(invalid(format!(
                    "route references unknown baseline id `{id}`"
                )));
            }
        }
        for b in &self.map.baseline_paths {
            if b.points.points.len() < 2 {
                return Err(invalid(format!("baseline `{}` needs at least 2 points", b.id)));
            }
            if !(b.speed_limit.is_finite() && b.speed_limit > 0.0) {
                return Err(invalid(format!(
                    "baseline `{}` speed_limit must be positive, got {}",
                    b.id, b.speed_limit
                )));
            }
        }
        for (i, poly) in self.map.drivable_area.iter().enumerate() {
            if !poly.is_simple() {
                return Err(invalid(format!("drivable_area[{i}] is not a simple polygon")));
            }
        }
        for (i, poly) in self.map.static_objects.iter().enumerate() {
            if !poly.is_simple() {
                return Err(invalid(format!("static_objects[{i}] is not a simple polygon")));
            }
        }
        for a in &self.agents {
            if !(a.length > 0.0 && a.width > 0.0) {
                return Err(invalid(format!(
                    "agent `{}` footprint must be positive, got {}x{}",
                    a.id, a.length, a.width
                )));
            }
            if a.history.is_empty() {
                return Err(invalid(format!("agent `{}` has no history", a.id)));
            }
            let mut all = a.history.iter().chain(a.future.iter());
            let mut prev = all.next().expect("non-empty").t;
            for s in all {
                if s.t <= prev {
                    return Err(invalid(format!(
                        "agent `{}` timestamps must be strictly increasing ({} after {})",
                        a.id, s.t, prev
                    )));
                }
                prev = s.t;
            }
            let t0 = a.history.last().expect("non-empty").t;
            if t0.abs() > 1e-9 {
                return Err(invalid(format!(
                    "agent `{}` last history sample must sit at t=0, got t={}",
                    a.id, t0
                )));
            }
            if let Some(f) = a.future.first() {
                if f.t <= 0.0 {
                    return Err(invalid(format!(
                        "agent `{}` future must start after t=0, got t={}",
                        a.id, f.t
                    )));
                }
            }
        }
        Ok(())
    }

    /// Scenario duration in seconds (span of the expert future).
    pub fn duration(&self) -> f64 {
        (self.horizon_t - 1) as f64 * self.dt
    }
}

/// Parse and validate a scenario document.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    let s: Scenario = serde_json::from_slice(bytes)?;
    s.validate()?;
    Ok(s)
}

pub fn load_scenario_file(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    load_scenario(&std::fs::read(path)?)
}

/// Serialize a scenario; output is deterministic for identical inputs.
pub fn save_scenario(s: &Scenario) -> Result<Vec<u8>, ScenarioError> {
    let mut out = serde_json::to_vec_pretty(s)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    pub(crate) fn minimal_scenario() -> Scenario {
        let states: Vec<TrajectoryState> = (0..4)
            .map(|i| TrajectoryState {
                pose: Pose2::new(5.0 * i as f64, 0.0, 0.0),
                speed: 10.0,
            })
            .collect();
        Scenario {
            dt: 0.5,
            horizon_t: 4,
            map: ScenarioMap {
                drivable_area: vec![Polygon::new(vec![
                    Point2::new(-10.0, -5.0),
                    Point2::new(100.0, -5.0),
                    Point2::new(100.0, 5.0),
                    Point2::new(-10.0, 5.0),
                ])],
                baseline_paths: vec![Baseline {
                    id: "lane_0".into(),
                    points: Polyline::new(vec![Point2::new(-10.0, 0.0), Point2::new(100.0, 0.0)]),
                    speed_limit: 13.9,
                }],
                route: vec!["lane_0".into()],
                static_objects: vec![],
            },
            agents: vec![],
            ego_start: states[0],
            expert_future: Trajectory::new(0.5, states).unwrap(),
        }
    }

    #[test]
    fn minimal_document_loads() {
        let s = minimal_scenario();
        let bytes = save_scenario(&s).unwrap();
        let back = load_scenario(&bytes).unwrap();
        assert_eq!(back.agents.len(), 0);
        assert_eq!(back, s);
    }

    #[test]
    fn unknown_route_id_rejected() {
        let mut s = minimal_scenario();
        s.map.route.push("lane_999".into());
        let bytes = serde_json::to_vec(&s).unwrap();
        let err = load_scenario(&bytes).unwrap_err();
        assert!(matches!(err, ScenarioError::Validation(_)));
        assert!(err.to_string().contains("lane_999"));
    }

    #[test]
    fn schema_violation_names_field() {
        let err = load_scenario(br#"{"dt": 0.5}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("horizon") || msg.contains("missing field"), "{msg}");
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let mut s = minimal_scenario();
        s.horizon_t = 7;
        let bytes = serde_json::to_vec(&s).unwrap();
        assert!(load_scenario(&bytes).is_err());
    }

    #[test]
    fn agent_timestamps_validated() {
        let mut s = minimal_scenario();
        s.agents.push(AgentTrack {
            id: "a0".into(),
            kind: AgentKind::Vehicle,
            length: 4.0,
            width: 2.0,
            history: vec![
                TimedState {
                    t: 0.0,
                    state: TrajectoryState {
                        pose: Pose2::new(20.0, 0.0, 0.0),
                        speed: 5.0,
                    },
                },
                TimedState {
                    t: -0.5,
                    state: TrajectoryState {
                        pose: Pose2::new(17.5, 0.0, 0.0),
                        speed: 5.0,
                    },
                },
            ],
            future: vec![],
        });
        let bytes = serde_json::to_vec(&s).unwrap();
        assert!(load_scenario(&bytes).is_err());
    }

    #[test]
    fn agent_state_interpolation() {
        let track = AgentTrack {
            id: "a".into(),
            kind: AgentKind::Vehicle,
            length: 4.0,
            width: 2.0,
            history: vec![TimedState {
                t: 0.0,
                state: TrajectoryState {
                    pose: Pose2::new(0.0, 0.0, 0.0),
                    speed: 4.0,
                },
            }],
            future: vec![TimedState {
                t: 1.0,
                state: TrajectoryState {
                    pose: Pose2::new(4.0, 0.0, 0.0),
                    speed: 4.0,
                },
            }],
        };
        let s = track.state_at(0.25).unwrap();
        assert!((s.pose.x - 1.0).abs() < 1e-12);
        assert!(track.state_at(2.0).is_none());
        assert!((track.state_at_clamped(2.0).pose.x - 4.0).abs() < 1e-12);
    }
}
