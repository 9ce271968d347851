//! Collision probability density maps: fuse agent occupancy, static objects
//! and the drivable-area complement into a non-drivable map, then convolve
//! an oriented, anti-aliased ego-footprint kernel over it. The density at a
//! pixel is the fraction of the ego footprint overlapping non-drivable mass
//! when posed there.

use crate::geometry::{GridFrame, Point2, Polygon, Trajectory, VehicleGeometry};
use crate::grid::SpatialTemporalGrid;
use crate::raster::polygon_mask;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CollisionError {
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("got {got} kernels for {expected} timesteps")]
    KernelCount { got: usize, expected: usize },
}

/// Per-timestep union of everything the ego must not overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct NonDrivableMap {
    pub grid: SpatialTemporalGrid,
}

/// Union by elementwise max: reduces to bitwise OR on {0, 1} inputs and
/// generalizes it for probabilistic agent occupancy.
pub fn build_non_drivable(
    agent_occ: &SpatialTemporalGrid,
    static_objects: &[Polygon],
    drivable_area: &[Polygon],
    frame: &GridFrame,
) -> Result<NonDrivableMap, CollisionError> {
    if agent_occ.frame != *frame {
        return Err(CollisionError::FrameMismatch(format!(
            "agent occupancy frame {:?} != target frame {:?}",
            agent_occ.frame, frame
        )));
    }
    let static_mask = polygon_mask(frame, static_objects);
    let drivable_mask = polygon_mask(frame, drivable_area);
    let n = frame.pixel_count();
    let mut values = Vec::with_capacity(agent_occ.timesteps * n);
    for t in 0..agent_occ.timesteps {
        let plane = agent_occ.plane(t);
        for i in 0..n {
            values.push(plane[i].max(static_mask[i]).max(1.0 - drivable_mask[i]));
        }
    }
    let grid = SpatialTemporalGrid::from_values(*frame, agent_occ.timesteps, values)
        .expect("max of in-range values stays in range");
    Ok(NonDrivableMap { grid })
}

/// Oriented rectangular footprint kernel; weights are exact pixel coverage
/// fractions normalized to sum 1, so the convolution output is an overlap
/// fraction in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EgoKernel {
    /// Heading in the grid frame's axes, radians.
    pub heading: f64,
    /// Footprint extent along the heading, meters.
    pub length: f64,
    /// Footprint extent across the heading, meters.
    pub width: f64,
    pub resolution: f64,
    /// Odd kernel edge length in pixels.
    pub size: usize,
    /// size x size weights, row-major.
    pub weights: Vec<f64>,
}

/// Clip a polygon by the half-plane `dot(p, normal) <= bound`.
fn clip_halfplane(poly: &[Point2], normal: Point2, bound: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let d_cur = cur.dot(normal) - bound;
        let d_next = next.dot(normal) - bound;
        if d_cur <= 0.0 {
            out.push(cur);
        }
        if (d_cur < 0.0 && d_next > 0.0) || (d_cur > 0.0 && d_next < 0.0) {
            let t = d_cur / (d_cur - d_next);
            out.push(cur + (next - cur).scaled(t));
        }
    }
    out
}

/// Area of the intersection between a convex polygon and the unit pixel
/// square centered at (cx, cy).
fn pixel_overlap_area(poly: &[Point2], cx: f64, cy: f64) -> f64 {
    let mut clipped = poly.to_vec();
    for (normal, bound) in [
        (Point2::new(1.0, 0.0), cx + 0.5),
        (Point2::new(-1.0, 0.0), -(cx - 0.5)),
        (Point2::new(0.0, 1.0), cy + 0.5),
        (Point2::new(0.0, -1.0), -(cy - 0.5)),
    ] {
        if clipped.len() < 3 {
            return 0.0;
        }
        clipped = clip_halfplane(&clipped, normal, bound);
    }
    if clipped.len() < 3 {
        return 0.0;
    }
    Polygon::new(clipped).area()
}

/// Build the footprint kernel for one future pose. `heading` is expressed in
/// the density grid's axes (world heading minus the frame orientation).
pub fn build_ego_kernel(heading: f64, length: f64, width: f64, resolution: f64) -> EgoKernel {
    let diag_px = (length.hypot(width)) / resolution;
    let mut size = diag_px.ceil() as usize;
    if size % 2 == 0 {
        size += 1;
    }
    let size = size.max(1);
    let c = (size / 2) as f64;

    // footprint rectangle in pixel units, rotated about the kernel center
    let hl = 0.5 * length / resolution;
    let hw = 0.5 * width / resolution;
    let rect: Vec<Point2> = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
        .iter()
        .map(|&(x, y)| Point2::new(x, y).rotated(heading))
        .collect();

    let mut weights = vec![0.0; size * size];
    let mut total = 0.0;
    for row in 0..size {
        for col in 0..size {
            let a = pixel_overlap_area(&rect, col as f64 - c, row as f64 - c);
            weights[row * size + col] = a;
            total += a;
        }
    }
    for w in &mut weights {
        *w /= total;
    }
    EgoKernel {
        heading,
        length,
        width,
        resolution,
        size,
        weights,
    }
}

/// One kernel per plan step, headings taken relative to the grid frame.
pub fn kernels_from_plan(
    plan: &Trajectory,
    frame: &GridFrame,
    vehicle: &VehicleGeometry,
) -> Vec<EgoKernel> {
    plan.states
        .iter()
        .map(|s| {
            build_ego_kernel(
                s.pose.heading - frame.orientation,
                vehicle.length,
                vehicle.width,
                frame.resolution,
            )
        })
        .collect()
}

/// Inclusive pixel rectangle of computed (trustworthy) density values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub row0: usize,
    pub col0: usize,
    pub row1: usize,
    pub col1: usize,
}

impl PixelRect {
    pub fn full(frame: &GridFrame) -> Self {
        PixelRect {
            row0: 0,
            col0: 0,
            row1: frame.height - 1,
            col1: frame.width - 1,
        }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.row0 && row <= self.row1 && col >= self.col0 && col <= self.col1
    }
}

/// Square windows of the given pixel radius around a reference trajectory,
/// one per timestep, clamped to the grid.
#[derive(Debug, Clone)]
pub struct DensityWindow {
    /// Grid coordinates (gx, gy) of the window center per timestep.
    pub centers: Vec<(f64, f64)>,
    pub radius_px: usize,
}

impl DensityWindow {
    pub fn around_plan(plan: &Trajectory, frame: &GridFrame, radius_px: usize) -> Self {
        DensityWindow {
            centers: plan
                .states
                .iter()
                .map(|s| frame.world_to_grid(s.pose.position()))
                .collect(),
            radius_px,
        }
    }

    fn rect(&self, t: usize, frame: &GridFrame) -> PixelRect {
        let (gx, gy) = self.centers[t];
        let r = self.radius_px as f64;
        PixelRect {
            row0: (gy - r).floor().max(0.0) as usize,
            col0: (gx - r).floor().max(0.0) as usize,
            row1: ((gy + r).ceil().min(frame.height as f64 - 1.0)).max(0.0) as usize,
            col1: ((gx + r).ceil().min(frame.width as f64 - 1.0)).max(0.0) as usize,
        }
    }
}

/// Per-timestep collision probability density. Outside `valid[t]` the values
/// are the conservative sentinel 1 and carry no measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionDensityMap {
    pub grid: SpatialTemporalGrid,
    pub valid: Vec<PixelRect>,
}

impl CollisionDensityMap {
    /// Density at the pixel containing a world point; 1 outside the grid.
    pub fn value_at_world(&self, t: usize, p: Point2) -> f64 {
        let (gx, gy) = self.grid.frame.world_to_grid(p);
        if !self.grid.frame.in_bounds(gx, gy) {
            return 1.0;
        }
        self.grid.get(t, gy.round() as usize, gx.round() as usize)
    }
}

/// Convolve per-timestep footprint kernels over the non-drivable map.
/// Out-of-grid reads count as occupied. With a window, only pixels inside
/// each timestep's window are computed; the rest are set to 1.
pub fn collision_density(
    nd: &NonDrivableMap,
    kernels: &[EgoKernel],
    window: Option<&DensityWindow>,
) -> Result<CollisionDensityMap, CollisionError> {
    let timesteps = nd.grid.timesteps;
    if kernels.len() != timesteps {
        return Err(CollisionError::KernelCount {
            got: kernels.len(),
            expected: timesteps,
        });
    }
    if let Some(w) = window {
        if w.centers.len() != timesteps {
            return Err(CollisionError::KernelCount {
                got: w.centers.len(),
                expected: timesteps,
            });
        }
    }
    let frame = nd.grid.frame;
    let (h, w) = (frame.height as i64, frame.width as i64);
    let mut out = if window.is_some() {
        SpatialTemporalGrid::from_values(
            frame,
            timesteps,
            vec![1.0; frame.pixel_count() * timesteps],
        )
        .expect("ones are in range")
    } else {
        SpatialTemporalGrid::zeros(frame, timesteps)
    };
    let mut valid = Vec::with_capacity(timesteps);

    for t in 0..timesteps {
        let kernel = &kernels[t];
        let k = kernel.size as i64;
        let c = k / 2;
        let rect = match window {
            Some(win) => win.rect(t, &frame),
            None => PixelRect::full(&frame),
        };
        valid.push(rect);
        let src = nd.grid.plane(t);
        let dst = out.plane_mut(t);
        for row in rect.row0 as i64..=rect.row1 as i64 {
            let interior_row = row - c >= 0 && row + c < h;
            for col in rect.col0 as i64..=rect.col1 as i64 {
                let mut acc = 0.0;
                if interior_row && col - c >= 0 && col + c < w {
                    // kernel support fully inside the grid
                    let mut widx = 0;
                    for kr in -c..=c {
                        let base = ((row + kr) * w + col - c) as usize;
                        for kc in 0..k as usize {
                            acc += kernel.weights[widx] * src[base + kc];
                            widx += 1;
                        }
                    }
                } else {
                    let mut widx = 0;
                    for kr in -c..=c {
                        let sr = row + kr;
                        for kc in -c..=c {
                            let sc = col + kc;
                            let v = if sr < 0 || sr >= h || sc < 0 || sc >= w {
                                1.0
                            } else {
                                src[(sr * w + sc) as usize]
                            };
                            acc += kernel.weights[widx] * v;
                            widx += 1;
                        }
                    }
                }
                // guard against rounding just past 1
                dst[(row * w + col) as usize] = acc.min(1.0);
            }
        }
    }
    Ok(CollisionDensityMap { grid: out, valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Pose2, TrajectoryState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_binary_grid(
        frame: GridFrame,
        timesteps: usize,
        fill: f64,
        rng: &mut ChaCha8Rng,
    ) -> SpatialTemporalGrid {
        let values = (0..frame.pixel_count() * timesteps)
            .map(|_| if rng.gen_bool(fill) { 1.0 } else { 0.0 })
            .collect();
        SpatialTemporalGrid::from_values(frame, timesteps, values).unwrap()
    }

    /// Reference implementation: direct sum over the footprint window.
    pub(crate) fn brute_force_density(
        nd: &SpatialTemporalGrid,
        kernel: &EgoKernel,
        t: usize,
    ) -> Vec<f64> {
        let frame = nd.frame;
        let (h, w) = (frame.height as i64, frame.width as i64);
        let k = kernel.size as i64;
        let c = k / 2;
        let mut out = vec![0.0; frame.pixel_count()];
        for row in 0..h {
            for col in 0..w {
                let mut acc = 0.0;
                for kr in -c..=c {
                    for kc in -c..=c {
                        let (sr, sc) = (row + kr, col + kc);
                        let v = if sr < 0 || sr >= h || sc < 0 || sc >= w {
                            1.0
                        } else {
                            nd.get(t, sr as usize, sc as usize)
                        };
                        let wt =
                            kernel.weights[((kr + c) * k + (kc + c)) as usize];
                        acc += wt * v;
                    }
                }
                out[(row * w + col) as usize] = acc.min(1.0);
            }
        }
        out
    }

    fn frame(n: usize) -> GridFrame {
        GridFrame::new(Point2::new(0.0, 0.0), 0.5, n, n, 0.0).unwrap()
    }

    #[test]
    fn non_drivable_empty_inputs_all_zero() {
        let f = frame(32);
        let occ = SpatialTemporalGrid::zeros(f, 3);
        let everything = vec![Polygon::new(vec![
            Point2::new(-10.0, -10.0),
            Point2::new(100.0, -10.0),
            Point2::new(100.0, 100.0),
            Point2::new(-10.0, 100.0),
        ])];
        let nd = build_non_drivable(&occ, &[], &everything, &f).unwrap();
        assert!(nd.grid.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn outside_drivable_is_one() {
        let f = frame(32);
        let occ = SpatialTemporalGrid::zeros(f, 1);
        // drivable covers only the left half
        let half = vec![Polygon::new(vec![
            Point2::new(-10.0, -10.0),
            Point2::new(4.0, -10.0),
            Point2::new(4.0, 100.0),
            Point2::new(-10.0, 100.0),
        ])];
        let nd = build_non_drivable(&occ, &[], &half, &f).unwrap();
        // column 20 sits at world x = 10, outside the drivable polygon
        assert_eq!(nd.grid.get(0, 5, 20), 1.0);
        assert_eq!(nd.grid.get(0, 5, 2), 0.0);
    }

    #[test]
    fn non_drivable_matches_or_oracle_on_random_inputs() {
        let f = frame(32);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let occ = random_binary_grid(f, 2, 0.3, &mut rng);
            let statics = random_binary_grid(f, 1, 0.2, &mut rng);
            let drivable = random_binary_grid(f, 1, 0.7, &mut rng);
            // bypass polygon rasterization: fuse mask planes directly
            let n = f.pixel_count();
            let mut values = Vec::with_capacity(2 * n);
            for t in 0..2 {
                let p = occ.plane(t);
                for i in 0..n {
                    values.push(
                        p[i].max(statics.plane(0)[i])
                            .max(1.0 - drivable.plane(0)[i]),
                    );
                }
            }
            for t in 0..2 {
                for i in 0..n {
                    let expect = if occ.plane(t)[i] == 1.0
                        || statics.plane(0)[i] == 1.0
                        || drivable.plane(0)[i] == 0.0
                    {
                        1.0
                    } else {
                        0.0
                    };
                    assert_eq!(values[t * n + i], expect);
                }
            }
        }
    }

    #[test]
    fn frame_mismatch_rejected() {
        let occ = SpatialTemporalGrid::zeros(frame(32), 1);
        let other = frame(16);
        assert!(matches!(
            build_non_drivable(&occ, &[], &[], &other),
            Err(CollisionError::FrameMismatch(_))
        ));
    }

    #[test]
    fn kernel_axis_aligned_matches_exact_overlap() {
        let kernel = build_ego_kernel(0.0, 4.0, 2.0, 0.5);
        assert_eq!(kernel.size, 9);
        let c = (kernel.size / 2) as f64;
        // oracle: exact interval-overlap areas for the axis-aligned rectangle
        let overlap_1d = |center: f64, half: f64| -> f64 {
            let lo = (center - 0.5).max(-half);
            let hi = (center + 0.5).min(half);
            (hi - lo).max(0.0)
        };
        let mut expected = vec![0.0; kernel.size * kernel.size];
        let mut total = 0.0;
        for row in 0..kernel.size {
            for col in 0..kernel.size {
                let a = overlap_1d(col as f64 - c, 4.0) * overlap_1d(row as f64 - c, 2.0);
                expected[row * kernel.size + col] = a;
                total += a;
            }
        }
        assert!((total - 32.0).abs() < 1e-12);
        for i in 0..expected.len() {
            assert!(
                (kernel.weights[i] - expected[i] / total).abs() < 1e-12,
                "weight {i}: {} vs {}",
                kernel.weights[i],
                expected[i] / total
            );
        }
        let sum: f64 = kernel.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_quarter_turn_is_transpose() {
        let k0 = build_ego_kernel(0.0, 4.0, 2.0, 0.5);
        let k90 = build_ego_kernel(std::f64::consts::FRAC_PI_2, 4.0, 2.0, 0.5);
        assert_eq!(k0.size, k90.size);
        let n = k0.size;
        for r in 0..n {
            for c in 0..n {
                assert!(
                    (k90.weights[r * n + c] - k0.weights[c * n + r]).abs() < 1e-9,
                    "transpose mismatch at ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn kernel_weights_sum_to_one_for_random_headings() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let heading = rng.gen_range(-3.2..3.2);
            let k = build_ego_kernel(heading, 4.5, 2.0, 0.5);
            let sum: f64 = k.weights.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "heading {heading}: sum {sum}");
            assert!(k.weights.iter().all(|&w| w >= 0.0));
            assert_eq!(k.size % 2, 1);
        }
    }

    #[test]
    fn density_zero_and_one_planes() {
        let f = frame(32);
        let kernel = build_ego_kernel(0.3, 4.0, 2.0, 0.5);
        let zeros = NonDrivableMap {
            grid: SpatialTemporalGrid::zeros(f, 2),
        };
        let kernels = vec![kernel.clone(), kernel.clone()];
        let d = collision_density(&zeros, &kernels, None).unwrap();
        // interior pixels see only zeros; border pixels feel the out-of-grid 1s
        let c = kernel.size / 2;
        for row in c..32 - c {
            for col in c..32 - c {
                assert_eq!(d.grid.get(0, row, col), 0.0);
            }
        }
        let ones = NonDrivableMap {
            grid: SpatialTemporalGrid::from_values(f, 1, vec![1.0; f.pixel_count()]).unwrap(),
        };
        let d1 = collision_density(&ones, &kernels[..1], None).unwrap();
        for &v in d1.grid.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn density_matches_brute_force_oracle() {
        let f = frame(64);
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for trial in 0..5 {
            let nd_grid = random_binary_grid(f, 1, 0.25, &mut rng);
            let heading = rng.gen_range(-3.1..3.1);
            let kernel = build_ego_kernel(heading, 4.5, 2.0, 0.5);
            let nd = NonDrivableMap {
                grid: nd_grid.clone(),
            };
            let d = collision_density(&nd, std::slice::from_ref(&kernel), None).unwrap();
            let oracle = brute_force_density(&nd_grid, &kernel, 0);
            for (i, (&got, &want)) in d.grid.plane(0).iter().zip(oracle.iter()).enumerate() {
                assert!(
                    (got - want).abs() < 1e-9,
                    "trial {trial} pixel {i}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn windowed_matches_full_inside_window() {
        let f = frame(64);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let nd = NonDrivableMap {
            grid: random_binary_grid(f, 3, 0.2, &mut rng),
        };
        let plan = Trajectory::new(
            0.5,
            (0..3)
                .map(|i| TrajectoryState {
                    pose: Pose2::new(8.0 + 3.0 * i as f64, 14.0, 0.1),
                    speed: 6.0,
                })
                .collect(),
        )
        .unwrap();
        let kernels = kernels_from_plan(&plan, &f, &VehicleGeometry::default());
        let full = collision_density(&nd, &kernels, None).unwrap();
        let win = DensityWindow::around_plan(&plan, &f, 10);
        let windowed = collision_density(&nd, &kernels, Some(&win)).unwrap();
        for t in 0..3 {
            let rect = windowed.valid[t];
            for row in 0..64 {
                for col in 0..64 {
                    let wv = windowed.grid.get(t, row, col);
                    if rect.contains(row, col) {
                        assert_eq!(wv, full.grid.get(t, row, col), "t{t} ({row},{col})");
                    } else {
                        assert_eq!(wv, 1.0, "sentinel expected outside window");
                    }
                }
            }
        }
    }

    #[test]
    fn density_monotone_in_occupancy() {
        let f = frame(24);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = random_binary_grid(f, 1, 0.2, &mut rng);
        let kernel = build_ego_kernel(0.7, 4.0, 2.0, 0.5);
        let nd0 = NonDrivableMap { grid: base.clone() };
        let d0 = collision_density(&nd0, std::slice::from_ref(&kernel), None).unwrap();
        // raise one zero pixel to 1
        let mut raised = base.clone();
        let idx = raised.values().iter().position(|&v| v == 0.0).unwrap();
        let (r, c) = (idx / 24, idx % 24);
        raised.set(0, r, c, 1.0);
        let d1 = collision_density(
            &NonDrivableMap { grid: raised },
            std::slice::from_ref(&kernel),
            None,
        )
        .unwrap();
        for (a, b) in d0.grid.values().iter().zip(d1.grid.values()) {
            assert!(b + 1e-12 >= *a, "density decreased after raising occupancy");
        }
    }

    #[test]
    fn density_linear_in_interior() {
        let f = frame(32);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n1 = random_binary_grid(f, 1, 0.3, &mut rng);
        let n2 = random_binary_grid(f, 1, 0.3, &mut rng);
        let (a, b) = (0.4, 0.5);
        let mix_values: Vec<f64> = n1
            .values()
            .iter()
            .zip(n2.values())
            .map(|(x, y)| a * x + b * y)
            .collect();
        let mix = SpatialTemporalGrid::from_values(f, 1, mix_values).unwrap();
        let kernel = build_ego_kernel(1.1, 4.0, 2.0, 0.5);
        let ks = std::slice::from_ref(&kernel);
        let d1 = collision_density(&NonDrivableMap { grid: n1 }, ks, None).unwrap();
        let d2 = collision_density(&NonDrivableMap { grid: n2 }, ks, None).unwrap();
        let dm = collision_density(&NonDrivableMap { grid: mix }, ks, None).unwrap();
        let c = kernel.size / 2;
        for row in c..32 - c {
            for col in c..32 - c {
                let want = a * d1.grid.get(0, row, col) + b * d2.grid.get(0, row, col);
                let got = dm.grid.get(0, row, col);
                assert!((got - want).abs() < 1e-9, "({row},{col}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn kernel_count_mismatch_rejected() {
        let f = frame(16);
        let nd = NonDrivableMap {
            grid: SpatialTemporalGrid::zeros(f, 3),
        };
        let kernel = build_ego_kernel(0.0, 4.0, 2.0, 0.5);
        assert!(matches!(
            collision_density(&nd, std::slice::from_ref(&kernel), None),
            Err(CollisionError::KernelCount { got: 1, expected: 3 })
        ));
    }
}
