//! Six-channel scene raster and spatial-temporal target renderers
//! (per-timestep Gaussian heatmaps around the expert, hard occupancy
//! grids from agent footprints).

use crate::geometry::{GridFrame, Point2, Polygon, Polyline, Trajectory, VehicleGeometry};
use crate::grid::SpatialTemporalGrid;
use crate::scenario::{AgentTrack, Scenario};
use serde::{Deserialize, Serialize};

/// Gaussian support is rendered out to this many sigmas; beyond it the
/// contribution is below 1e-13 and the plane stays 0.
const HEATMAP_SUPPORT_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RasterConfig {
    pub vehicle: VehicleGeometry,
    /// Speed normalization for the speed plane, m/s.
    pub v_max: f64,
    /// Route channel dilation width, m.
    pub lane_width: f64,
    /// Intensity assigned to the oldest history frame in the agents channel.
    pub history_floor: f64,
}

impl Default for RasterConfig {
    fn default() -> Self {
        RasterConfig {
            vehicle: VehicleGeometry::default(),
            v_max: 15.0,
            lane_width: 3.5,
            history_floor: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterChannel {
    Ego = 0,
    Roadmap = 1,
    Baseline = 2,
    Agents = 3,
    Route = 4,
    Speed = 5,
}

impl RasterChannel {
    pub const ALL: [RasterChannel; 6] = [
        RasterChannel::Ego,
        RasterChannel::Roadmap,
        RasterChannel::Baseline,
        RasterChannel::Agents,
        RasterChannel::Route,
        RasterChannel::Speed,
    ];
}

/// The six named planes of the model input raster.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterStack {
    pub frame: GridFrame,
    planes: Vec<Vec<f64>>,
}

impl RasterStack {
    fn zeros(frame: GridFrame) -> Self {
        RasterStack {
            frame,
            planes: vec![vec![0.0; frame.pixel_count()]; 6],
        }
    }

    pub fn plane(&self, c: RasterChannel) -> &[f64] {
        &self.planes[c as usize]
    }

    pub fn get(&self, c: RasterChannel, row: usize, col: usize) -> f64 {
        self.planes[c as usize][row * self.frame.width + col]
    }

    /// Pack the channels as the planes of a 6-step grid (for serialization).
    pub fn to_grid(&self) -> SpatialTemporalGrid {
        let values = self.planes.concat();
        SpatialTemporalGrid::from_values(self.frame, 6, values)
            .expect("raster planes stay within [0, 1]")
    }
}

/// Set pixels whose centers fall inside `poly` to at least `value`.
pub fn fill_polygon(plane: &mut [f64], frame: &GridFrame, poly: &Polygon, value: f64) {
    if poly.vertices.len() < 3 {
        return;
    }
    // work in grid coordinates; the affine map preserves containment
    let gv: Vec<Point2> = poly
        .vertices
        .iter()
        .map(|&p| {
            let (gx, gy) = frame.world_to_grid(p);
            Point2::new(gx, gy)
        })
        .collect();
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &gv {
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let r0 = y0.ceil().max(0.0) as usize;
    let r1 = y1.floor().min(frame.height as f64 - 1.0);
    if r1 < 0.0 {
        return;
    }
    let mut xs: Vec<f64> = Vec::with_capacity(8);
    for row in r0..=(r1 as usize) {
        let ry = row as f64;
        xs.clear();
        let n = gv.len();
        for i in 0..n {
            let (a, b) = (gv[i], gv[(i + 1) % n]);
            if (a.y <= ry && b.y > ry) || (b.y <= ry && a.y > ry) {
                xs.push(a.x + (ry - a.y) / (b.y - a.y) * (b.x - a.x));
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite intersections"));
        for pair in xs.chunks_exact(2) {
            let c0 = pair[0].ceil().max(0.0) as usize;
            let c1 = pair[1].floor().min(frame.width as f64 - 1.0);
            if c1 < 0.0 {
                continue;
            }
            for col in c0..=(c1 as usize) {
                let idx = row * frame.width + col;
                if plane[idx] < value {
                    plane[idx] = value;
                }
            }
        }
    }
}

/// Rasterize a polyline one pixel wide by marching along the segments.
pub fn draw_polyline(plane: &mut [f64], frame: &GridFrame, line: &Polyline, value: f64) {
    for w in line.points.windows(2) {
        let (ax, ay) = frame.world_to_grid(w[0]);
        let (bx, by) = frame.world_to_grid(w[1]);
        let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
        let steps = (len / 0.25).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let f = k as f64 / steps as f64;
            let gx = ax + f * (bx - ax);
            let gy = ay + f * (by - ay);
            if frame.in_bounds(gx, gy) {
                let idx = gy.round() as usize * frame.width + gx.round() as usize;
                if plane[idx] < value {
                    plane[idx] = value;
                }
            }
        }
    }
}

/// Mark pixels within `width_m / 2` of the polyline.
pub fn draw_polyline_thick(
    plane: &mut [f64],
    frame: &GridFrame,
    line: &Polyline,
    width_m: f64,
    value: f64,
) {
    let half_px = 0.5 * width_m / frame.resolution;
    for w in line.points.windows(2) {
        let (ax, ay) = frame.world_to_grid(w[0]);
        let (bx, by) = frame.world_to_grid(w[1]);
        let a = Point2::new(ax, ay);
        let b = Point2::new(bx, by);
        let r0 = ((ay.min(by) - half_px).floor().max(0.0)) as usize;
        let r1 = ((ay.max(by) + half_px).ceil().min(frame.height as f64 - 1.0)).max(0.0) as usize;
        let c0 = ((ax.min(bx) - half_px).floor().max(0.0)) as usize;
        let c1 = ((ax.max(bx) + half_px).ceil().min(frame.width as f64 - 1.0)).max(0.0) as usize;
        for row in r0..=r1 {
            for col in c0..=c1 {
                let p = Point2::new(col as f64, row as f64);
                if crate::geometry::point_segment_distance(p, a, b) <= half_px {
                    let idx = row * frame.width + col;
                    if plane[idx] < value {
                        plane[idx] = value;
                    }
                }
            }
        }
    }
}

/// Build the six-channel input raster for a scenario.
pub fn rasterize(s: &Scenario, frame: &GridFrame, cfg: &RasterConfig) -> RasterStack {
    let mut stack = RasterStack::zeros(*frame);

    let ego_fp = cfg.vehicle.footprint(&s.ego_start.pose);
    fill_polygon(&mut stack.planes[RasterChannel::Ego as usize], frame, &ego_fp, 1.0);

    for poly in &s.map.drivable_area {
        fill_polygon(&mut stack.planes[RasterChannel::Roadmap as usize], frame, poly, 1.0);
    }

    for b in &s.map.baseline_paths {
        draw_polyline(
            &mut stack.planes[RasterChannel::Baseline as usize],
            frame,
            &b.points,
            1.0,
        );
    }

    // agent footprints over history, intensity fading linearly with age
    for agent in &s.agents {
        let oldest = agent.history.first().map(|h| -h.t).unwrap_or(0.0);
        for h in &agent.history {
            let age = -h.t;
            let intensity = if oldest > 0.0 {
                1.0 + (cfg.history_floor - 1.0) * (age / oldest)
            } else {
                1.0
            };
            let fp = agent.footprint_at(&h.state.pose);
            fill_polygon(
                &mut stack.planes[RasterChannel::Agents as usize],
                frame,
                &fp,
                intensity,
            );
        }
    }

    for id in &s.map.route {
        if let Some(b) = s.map.baseline(id) {
            draw_polyline_thick(
                &mut stack.planes[RasterChannel::Route as usize],
                frame,
                &b.points,
                cfg.lane_width,
                1.0,
            );
        }
    }

    let norm = (s.ego_start.speed / cfg.v_max).clamp(0.0, 1.0);
    stack.planes[RasterChannel::Speed as usize].fill(norm);

    stack
}

/// Heatmap target with the timesteps whose expert position fell outside the
/// frame (those planes are all zero).
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedHeatmap {
    pub grid: SpatialTemporalGrid,
    pub clipped: Vec<usize>,
}

/// Per-timestep Gaussian bumps around the expert positions, peak exactly 1
/// at the pixel center nearest each expert point.
pub fn render_heatmap_target(
    expert: &Trajectory,
    fine_frame: &GridFrame,
    sigma_px: f64,
) -> RenderedHeatmap {
    let t_count = expert.len();
    let mut grid = SpatialTemporalGrid::zeros(*fine_frame, t_count);
    let mut clipped = Vec::new();
    let (w, h) = (fine_frame.width, fine_frame.height);
    let support = (HEATMAP_SUPPORT_SIGMAS * sigma_px).ceil() as i64;
    let inv_two_sigma2 = 1.0 / (2.0 * sigma_px * sigma_px);

    for (t, state) in expert.states.iter().enumerate() {
        let (gx, gy) = fine_frame.world_to_grid(state.pose.position());
        let cx = gx.round();
        let cy = gy.round();
        if !fine_frame.in_bounds(gx, gy) || cx < 0.0 || cy < 0.0 || cx >= w as f64 || cy >= h as f64
        {
            clipped.push(t);
            continue;
        }
        let (ci, cj) = (cx as i64, cy as i64);
        let plane = grid.plane_mut(t);
        for row in (cj - support).max(0)..=(cj + support).min(h as i64 - 1) {
            let dy = row as f64 - cy;
            for col in (ci - support).max(0)..=(ci + support).min(w as i64 - 1) {
                let dx = col as f64 - cx;
                let d2 = dx * dx + dy * dy;
                if d2 <= (support * support) as f64 {
                    plane[row as usize * w + col as usize] = (-d2 * inv_two_sigma2).exp();
                }
            }
        }
    }
    RenderedHeatmap { grid, clipped }
}

/// Hard {0, 1} occupancy targets from ground-truth agent motion; agents
/// whose future does not cover a timestep are omitted from that plane.
pub fn render_occupancy_target(
    agents: &[AgentTrack],
    frame: &GridFrame,
    timesteps: usize,
    dt: f64,
) -> SpatialTemporalGrid {
    let mut grid = SpatialTemporalGrid::zeros(*frame, timesteps);
    for t in 0..timesteps {
        let time = t as f64 * dt;
        let plane = grid.plane_mut(t);
        for agent in agents {
            if let Some(state) = agent.state_at(time) {
                let fp = agent.footprint_at(&state.pose);
                fill_polygon(plane, frame, &fp, 1.0);
            }
        }
    }
    grid
}

/// Rasterize polygons into a single {0, 1} mask plane.
pub fn polygon_mask(frame: &GridFrame, polys: &[Polygon]) -> Vec<f64> {
    let mut plane = vec![0.0; frame.pixel_count()];
    for p in polys {
        fill_polygon(&mut plane, frame, p, 1.0);
    }
    plane
}

/// Default fine-resolution frame covering the same extent as a coarse frame.
pub fn fine_frame_like(coarse: &GridFrame, fine_resolution: f64) -> GridFrame {
    let scale = coarse.resolution / fine_resolution;
    GridFrame::new(
        coarse.origin,
        fine_resolution,
        (coarse.width as f64 * scale).round() as usize,
        (coarse.height as f64 * scale).round() as usize,
        coarse.orientation,
    )
    .expect("scaled frame dimensions remain positive")
}
