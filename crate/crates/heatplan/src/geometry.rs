//! Planar poses, trajectories, grid frames and the kinematic quantities
//! shared by the cost terms, the simulator and the metric suite.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Speed below which curvature falls back from heading-rate/speed to the
/// three-point circumcircle estimate.
pub const EPS_SPEED: f64 = 0.1;

/// Pairwise distance below which the circumcircle curvature is treated as
/// degenerate (curvature 0).
pub const EPS_DEGENERATE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("invalid grid frame: {0}")]
    InvalidFrame(String),
    #[error("kinematics requires at least 4 states, got {0}")]
    TooShort(usize),
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Serialized as a `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for (f64, f64) {
    fn from(p: Point2) -> Self {
        (p.x, p.y)
    }
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Rotate counter-clockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn scaled(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

/// Planar pose. Heading is normalized to `(-pi, pi]` on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose2 {
            x,
            y,
            heading: wrap_angle(heading),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Map a point expressed in this pose's frame into the world frame.
    pub fn transform(&self, local: Point2) -> Point2 {
        self.position() + local.rotated(self.heading)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.heading.is_finite()
    }
}

/// Axle geometry of the controlled vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleGeometry {
    /// Footprint extent along the heading, meters.
    pub length: f64,
    /// Footprint extent across the heading, meters.
    pub width: f64,
    pub wheelbase: f64,
}

impl Default for VehicleGeometry {
    fn default() -> Self {
        VehicleGeometry {
            length: 4.5,
            width: 2.0,
            wheelbase: 2.7,
        }
    }
}

impl VehicleGeometry {
    /// Oriented rectangle footprint centered on `pose`.
    pub fn footprint(&self, pose: &Pose2) -> Polygon {
        rectangle_footprint(pose, self.length, self.width)
    }
}

/// Oriented rectangle centered at `pose`, `length` along the heading.
pub fn rectangle_footprint(pose: &Pose2, length: f64, width: f64) -> Polygon {
    let hl = 0.5 * length;
    let hw = 0.5 * width;
    Polygon::new(
        [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
            .iter()
            .map(|&(lx, ly)| pose.transform(Point2::new(lx, ly)))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    #[serde(flatten)]
    pub pose: Pose2,
    pub speed: f64,
}

/// Fixed-step timestamped sequence of poses with speeds. State 0 is the
/// current state (t = 0); state `i` sits at `i * dt` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<TrajectoryState>,
}

impl Trajectory {
    pub fn new(dt: f64, states: Vec<TrajectoryState>) -> Result<Self, GeometryError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(GeometryError::InvalidTrajectory(format!(
                "dt must be finite and positive, got {dt}"
            )));
        }
        if states.len() < 2 {
            return Err(GeometryError::InvalidTrajectory(format!(
                "need at least 2 states, got {}",
                states.len()
            )));
        }
        for (i, s) in states.iter().enumerate() {
            if !s.pose.is_finite() || !s.speed.is_finite() {
                return Err(GeometryError::InvalidTrajectory(format!(
                    "non-finite state at index {i}"
                )));
            }
        }
        Ok(Trajectory { dt, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn duration(&self) -> f64 {
        (self.states.len() - 1) as f64 * self.dt
    }

    /// Pose and speed at `t` seconds, linearly interpolated between states
    /// (shortest-arc on headings). Clamps outside the covered span.
    pub fn sample(&self, t: f64) -> TrajectoryState {
        let n = self.states.len();
        if t <= 0.0 {
            return self.states[0];
        }
        let u = t / self.dt;
        let i = u.floor() as usize;
        if i + 1 >= n {
            return self.states[n - 1];
        }
        let f = u - i as f64;
        let a = &self.states[i];
        let b = &self.states[i + 1];
        TrajectoryState {
            pose: Pose2::new(
                a.pose.x + f * (b.pose.x - a.pose.x),
                a.pose.y + f * (b.pose.y - a.pose.y),
                a.pose.heading + f * wrap_angle(b.pose.heading - a.pose.heading),
            ),
            speed: a.speed + f * (b.speed - a.speed),
        }
    }

    /// Re-sample a `len`-state window starting at `start_time`, extrapolating
    /// past the stored end at the final state's speed along its heading.
    pub fn resample_window(&self, start_time: f64, len: usize, dt: f64) -> Trajectory {
        let end_time = self.duration();
        let states = (0..len)
            .map(|k| {
                let t = start_time + k as f64 * dt;
                if t <= end_time {
                    self.sample(t)
                } else {
                    let last = self.states[self.states.len() - 1];
                    let over = t - end_time;
                    let d = last.speed * over;
                    TrajectoryState {
                        pose: Pose2::new(
                            last.pose.x + d * last.pose.heading.cos(),
                            last.pose.y + d * last.pose.heading.sin(),
                            last.pose.heading,
                        ),
                        speed: last.speed,
                    }
                }
            })
            .collect();
        Trajectory {
            dt,
            states,
        }
    }
}

/// Geo-referenced pixel grid. `origin` is the world position of the center
/// of pixel (0, 0); grid x runs along the frame's rotated +x axis (column
/// index), grid y along +y (row index).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridFrame {
    pub origin: Point2,
    /// Meters per pixel.
    pub resolution: f64,
    /// Pixels along the frame x axis (columns).
    pub width: usize,
    /// Pixels along the frame y axis (rows).
    pub height: usize,
    /// Rotation of the frame axes relative to the world, radians.
    pub orientation: f64,
}

impl GridFrame {
    pub fn new(
        origin: Point2,
        resolution: f64,
        width: usize,
        height: usize,
        orientation: f64,
    ) -> Result<Self, GeometryError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GeometryError::InvalidFrame(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(GeometryError::InvalidFrame(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(GridFrame {
            origin,
            resolution,
            width,
            height,
            orientation,
        })
    }

    /// Ego-centered frame: +x forward, the ego placed a quarter of the way
    /// along x (three quarters of the extent ahead) and centered in y.
    pub fn ego_centered(
        ego: &Pose2,
        width: usize,
        height: usize,
        resolution: f64,
    ) -> Result<Self, GeometryError> {
        let ego_px = Point2::new(width as f64 / 4.0, height as f64 / 2.0);
        let origin = ego.position() - ego_px.scaled(resolution).rotated(ego.heading);
        GridFrame::new(origin, resolution, width, height, ego.heading)
    }

    /// World point to fractional pixel coordinates (gx = column, gy = row).
    /// Out-of-bounds coordinates are returned as-is; see [`GridFrame::in_bounds`].
    pub fn world_to_grid(&self, p: Point2) -> (f64, f64) {
        let local = (p - self.origin).rotated(-self.orientation);
        (local.x / self.resolution, local.y / self.resolution)
    }

    /// Fractional pixel coordinates to the world point at that location.
    pub fn grid_to_world(&self, gx: f64, gy: f64) -> Point2 {
        self.origin
            + Point2::new(gx * self.resolution, gy * self.resolution).rotated(self.orientation)
    }

    /// True when the nearest pixel center exists in the grid.
    pub fn in_bounds(&self, gx: f64, gy: f64) -> bool {
        gx >= -0.5 && gy >= -0.5 && gx < self.width as f64 - 0.5 && gy < self.height as f64 - 0.5
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

/// Simple polygon, vertices in order (either winding), implicitly closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Self {
        Polygon { vertices }
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut a = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            a += v[i].cross(v[j]);
        }
        0.5 * a
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Even-odd point containment. Points exactly on an edge are not
    /// guaranteed either way.
    pub fn contains(&self, p: Point2) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            if (v[i].y > p.y) != (v[j].y > p.y) {
                let t = (p.y - v[i].y) / (v[j].y - v[i].y);
                let xi = v[i].x + t * (v[j].x - v[i].x);
                if p.x < xi {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// True when no two non-adjacent edges intersect and no vertex repeats.
    pub fn is_simple(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let (a1, a2) = (v[i], v[(i + 1) % n]);
            if a1.distance(a2) < EPS_DEGENERATE {
                return false;
            }
            for j in i + 1..n {
                // skip adjacent edges (shared vertex)
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (v[j], v[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }

    pub fn intersects(&self, other: &Polygon) -> bool {
        let va = &self.vertices;
        let vb = &other.vertices;
        for i in 0..va.len() {
            let (a1, a2) = (va[i], va[(i + 1) % va.len()]);
            for j in 0..vb.len() {
                let (b1, b2) = (vb[j], vb[(j + 1) % vb.len()]);
                if segments_intersect(a1, a2, b1, b2) {
                    return true;
                }
            }
        }
        self.contains(vb[0]) || other.contains(va[0])
    }

    /// Minimum distance from `p` to the boundary; 0 when `p` is inside.
    pub fn distance(&self, p: Point2) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let v = &self.vertices;
        let n = v.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            best = best.min(point_segment_distance(p, v[i], v[(i + 1) % n]));
        }
        best
    }

    pub fn translated(&self, d: Point2) -> Polygon {
        Polygon::new(self.vertices.iter().map(|&v| v + d).collect())
    }
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 < EPS_DEGENERATE * EPS_DEGENERATE {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab.scaled(t))
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Segment intersection including touching endpoints and collinear overlap.
pub fn segments_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |d: f64, p: Point2, q: Point2, r: Point2| {
        d == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(d1, b1, b2, a1) || on(d2, b1, b2, a2) || on(d3, a1, a2, b1) || on(d4, a1, a2, b2)
}

/// Open polyline with arc-length queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polyline {
    pub points: Vec<Point2>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Self {
        Polyline { points }
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .sum()
    }

    /// Arc length of the closest point on the polyline to `p`.
    pub fn project(&self, p: Point2) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        let mut s0 = 0.0;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            let len = ab.norm();
            let t = if len < EPS_DEGENERATE {
                0.0
            } else {
                ((p - a).dot(ab) / (len * len)).clamp(0.0, 1.0)
            };
            let d = p.distance(a + ab.scaled(t));
            if d < best.0 {
                best = (d, s0 + t * len);
            }
            s0 += len;
        }
        best.1
    }

    /// Distance from `p` to the polyline.
    pub fn distance(&self, p: Point2) -> f64 {
        self.points
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn point_at(&self, s: f64) -> Point2 {
        let mut rem = s.max(0.0);
        for w in self.points.windows(2) {
            let len = w[0].distance(w[1]);
            if rem <= len || len < EPS_DEGENERATE {
                if len < EPS_DEGENERATE {
                    return w[0];
                }
                return w[0] + (w[1] - w[0]).scaled(rem / len);
            }
            rem -= len;
        }
        *self.points.last().expect("polyline has points")
    }

    /// Tangent heading of the segment containing arc length `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        let mut rem = s.max(0.0);
        let mut last = 0.0;
        for w in self.points.windows(2) {
            let len = w[0].distance(w[1]);
            if len < EPS_DEGENERATE {
                continue;
            }
            let d = w[1] - w[0];
            last = d.y.atan2(d.x);
            if rem <= len {
                return last;
            }
            rem -= len;
        }
        last
    }
}

/// Per-step kinematic profile derived from positions and headings by finite
/// differences (central in the interior, one-sided at the ends).
#[derive(Debug, Clone, PartialEq)]
pub struct Kinematics {
    pub speed: Vec<f64>,
    pub accel: Vec<f64>,
    pub jerk: Vec<f64>,
    pub heading_rate: Vec<f64>,
    pub curvature: Vec<f64>,
    pub curvature_rate: Vec<f64>,
    pub lateral_accel: Vec<f64>,
    /// atan(wheelbase * curvature), bicycle-model equivalent steering.
    pub steering_angle: Vec<f64>,
}

/// Central difference with one-sided endpoints, same length as the input.
pub fn finite_difference(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    out[0] = (values[1] - values[0]) / dt;
    out[n - 1] = (values[n - 1] - values[n - 2]) / dt;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    }
    out
}

/// Signed circumcircle curvature of the triple (a, b, c); 0 when degenerate.
pub fn circumcircle_curvature(a: Point2, b: Point2, c: Point2) -> f64 {
    let dab = a.distance(b);
    let dac = a.distance(c);
    let dbc = b.distance(c);
    if dab < EPS_DEGENERATE || dac < EPS_DEGENERATE || dbc < EPS_DEGENERATE {
        return 0.0;
    }
    2.0 * (b - a).cross(c - a) / (dab * dac * dbc)
}

/// Speeds from position differences (central interior, one-sided ends).
pub fn speeds_from_positions(positions: &[Point2], dt: f64) -> Vec<f64> {
    let n = positions.len();
    let mut v = vec![0.0; n];
    v[0] = positions[1].distance(positions[0]) / dt;
    v[n - 1] = positions[n - 1].distance(positions[n - 2]) / dt;
    for i in 1..n - 1 {
        v[i] = positions[i + 1].distance(positions[i - 1]) / (2.0 * dt);
    }
    v
}

/// Heading rates with per-step wrapping so jumps across the branch cut do
/// not alias.
pub fn heading_rates(headings: &[f64], dt: f64) -> Vec<f64> {
    let n = headings.len();
    let mut w = vec![0.0; n];
    w[0] = wrap_angle(headings[1] - headings[0]) / dt;
    w[n - 1] = wrap_angle(headings[n - 1] - headings[n - 2]) / dt;
    for i in 1..n - 1 {
        w[i] = (wrap_angle(headings[i + 1] - headings[i])
            + wrap_angle(headings[i] - headings[i - 1]))
            / (2.0 * dt);
    }
    w
}

/// Clamped index triple used for the circumcircle curvature fallback.
pub fn curvature_triple(i: usize, n: usize) -> (usize, usize, usize) {
    if i == 0 {
        (0, 1, 2)
    } else if i == n - 1 {
        (n - 3, n - 2, n - 1)
    } else {
        (i - 1, i, i + 1)
    }
}

/// Full kinematic profile of a trajectory. Needs at least 4 states so jerk
/// has a meaningful stencil.
pub fn trajectory_kinematics(
    traj: &Trajectory,
    wheelbase: f64,
) -> Result<Kinematics, GeometryError> {
    let n = traj.states.len();
    if n < 4 {
        return Err(GeometryError::TooShort(n));
    }
    let dt = traj.dt;
    let positions: Vec<Point2> = traj.states.iter().map(|s| s.pose.position()).collect();
    let headings: Vec<f64> = traj.states.iter().map(|s| s.pose.heading).collect();

    let speed = speeds_from_positions(&positions, dt);
    let accel = finite_difference(&speed, dt);
    let jerk = finite_difference(&accel, dt);
    let heading_rate = heading_rates(&headings, dt);

    let curvature: Vec<f64> = (0..n)
        .map(|i| {
            if speed[i] > EPS_SPEED {
                heading_rate[i] / speed[i]
            } else {
                let (a, b, c) = curvature_triple(i, n);
                circumcircle_curvature(positions[a], positions[b], positions[c])
            }
        })
        .collect();
    let curvature_rate = finite_difference(&curvature, dt);
    let lateral_accel: Vec<f64> = (0..n).map(|i| speed[i] * speed[i] * curvature[i]).collect();
    let steering_angle = curvature.iter().map(|k| (wheelbase * k).atan()).collect();

    Ok(Kinematics {
        speed,
        accel,
        jerk,
        heading_rate,
        curvature,
        curvature_rate,
        lateral_accel,
        steering_angle,
    })
}
