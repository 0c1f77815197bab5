use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::TriangleMesh;
use crate::raster::cover_triangle;
use crate::vec3::Vec3;

/// Which way a view ray crosses the surface.
///
/// `Enter` sorts before `Exit` so that coincident front/back hits form a
/// zero-length interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// Front-facing surface (normal z < 0), symbol `0`.
    Enter,
    /// Back-facing surface (normal z > 0), symbol `1`.
    Exit,
}

impl Orientation {
    pub fn symbol(self) -> char {
        match self {
            Orientation::Enter => '0',
            Orientation::Exit => '1',
        }
    }
}

/// A surface crossing along one pixel's view ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterEvent {
    pub depth: f64,
    pub orientation: Orientation,
}

impl RasterEvent {
    pub const fn enter(depth: f64) -> Self {
        Self {
            depth,
            orientation: Orientation::Enter,
        }
    }

    pub const fn exit(depth: f64) -> Self {
        Self {
            depth,
            orientation: Orientation::Exit,
        }
    }

    /// Depth first, then `Enter` before `Exit`.
    #[inline]
    pub fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.depth
            .total_cmp(&other.depth)
            .then(self.orientation.cmp(&other.orientation))
    }
}

/// Per-pixel event lists stored contiguously (`offsets` has one entry per
/// pixel plus a terminator).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBuffer {
    height: usize,
    width: usize,
    offsets: Vec<usize>,
    events: Vec<RasterEvent>,
}

impl IntervalBuffer {
    /// Builds a buffer from explicit per-pixel lists in raster order.
    pub fn from_pixels(height: usize, width: usize, pixels: Vec<Vec<RasterEvent>>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::Shape {
                what: "pixel lists",
                expected: height * width,
                actual: pixels.len(),
            });
        }
        let mut offsets = Vec::with_capacity(pixels.len() + 1);
        let mut events = Vec::new();
        offsets.push(0);
        for p in pixels {
            events.extend(p);
            offsets.push(events.len());
        }
        Ok(Self {
            height,
            width,
            offsets,
            events,
        })
    }

    pub(crate) fn from_parts(
        height: usize,
        width: usize,
        offsets: Vec<usize>,
        events: Vec<RasterEvent>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), height * width + 1);
        Self {
            height,
            width,
            offsets,
            events,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    /// Events of the pixel with linear index `y * width + x`.
    #[inline]
    pub fn pixel(&self, index: usize) -> &[RasterEvent] {
        &self.events[self.offsets[index]..self.offsets[index + 1]]
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> &[RasterEvent] {
        self.pixel(y * self.width + x)
    }

    pub fn is_sorted(&self) -> bool {
        (0..self.pixel_count()).all(|p| {
            self.pixel(p)
                .windows(2)
                .all(|w| w[0].sort_key_cmp(&w[1]) != Ordering::Greater)
        })
    }
}

/// Rotates the corners (keeping the winding) to start at the smallest one, so
/// that the rasterized depths do not depend on where a face's index list starts.
fn canonical_rotation(c: [Vec3; 3]) -> [Vec3; 3] {
    let cmp = |p: &Vec3, q: &Vec3| {
        p.x.total_cmp(&q.x)
            .then(p.y.total_cmp(&q.y))
            .then(p.z.total_cmp(&q.z))
    };
    let first = (0..3).min_by(|&i, &j| cmp(&c[i], &c[j])).expect("three corners");
    [c[first], c[(first + 1) % 3], c[(first + 2) % 3]]
}

/// Rasterizes every triangle of `mesh` into per-pixel crossing events sorted
/// by depth. Returns the buffer and the number of skipped triangles (zero
/// projected area, which includes faces parallel to the view direction).
pub fn rasterize_events(mesh: &TriangleMesh, height: usize, width: usize) -> Result<(IntervalBuffer, usize)> {
    if height == 0 || width == 0 {
        return Err(Error::InvalidParameter("raster size must be at least 1x1"));
    }
    let mut raw: Vec<(u32, RasterEvent)> = Vec::new();
    let mut skipped = 0usize;
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = canonical_rotation(mesh.corners(t));
        let area2 = crate::raster::signed_area2([a.x, a.y], [b.x, b.y], [c.x, c.y]);
        // n_z = area2: negative faces the camera (view direction +z)
        let orientation = if area2 < 0.0 {
            Orientation::Enter
        } else {
            Orientation::Exit
        };
        let covered = cover_triangle([[a.x, a.y], [b.x, b.y], [c.x, c.y]], width, height, |x, y, w| {
            let depth = (w[0] * a.z + w[1] * b.z + w[2] * c.z).clamp(-1.0, 1.0);
            raw.push(((y * width + x) as u32, RasterEvent { depth, orientation }));
        });
        if !covered {
            skipped += 1;
        }
    }

    // counting sort by pixel, then depth order within each pixel
    let pixels = height * width;
    let mut offsets = vec![0usize; pixels + 1];
    for &(p, _) in &raw {
        offsets[p as usize + 1] += 1;
    }
    for i in 0..pixels {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut events = vec![RasterEvent::enter(0.0); raw.len()];
    for (p, e) in raw {
        events[cursor[p as usize]] = e;
        cursor[p as usize] += 1;
    }
    for p in 0..pixels {
        events[offsets[p]..offsets[p + 1]].sort_unstable_by(RasterEvent::sort_key_cmp);
    }
    Ok((IntervalBuffer::from_parts(height, width, offsets, events), skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pixel_center;
    use crate::shapes;

    #[test]
    fn single_front_triangle() {
        // CCW in xy means n_z > 0; this one is wound the other way and faces -z
        let mesh = TriangleMesh::new(
            vec![
                Vec3::new(-0.9, -0.9, 0.25),
                Vec3::new(-0.9, 0.9, 0.25),
                Vec3::new(0.9, -0.9, 0.25),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let (buf, skipped) = rasterize_events(&mesh, 4, 4).unwrap();
        assert_eq!(skipped, 0);
        assert_eq!(buf.at(0, 0), &[RasterEvent::enter(0.25)]);
        assert!(buf.at(3, 3).is_empty());
    }

    #[test]
    fn cube_pixels_see_front_then_back() {
        let cube = shapes::cube(0.5);
        let (buf, skipped) = rasterize_events(&cube, 16, 16).unwrap();
        // the four side faces are parallel to the view direction
        assert_eq!(skipped, 8);
        for y in 0..16 {
            for x in 0..16 {
                let (cx, cy) = (pixel_center(x as i64, 16), pixel_center(y as i64, 16));
                let expected: &[RasterEvent] = if cx.abs() < 0.5 && cy.abs() < 0.5 {
                    &[RasterEvent::enter(-0.5), RasterEvent::exit(0.5)]
                } else {
                    &[]
                };
                assert_eq!(buf.at(x, y), expected, "pixel {x},{y}");
            }
        }
    }

    #[test]
    fn quad_diagonal_pixels_are_hit_once() {
        // 4x4 grid: the quad diagonal runs through four pixel centers
        let quad = TriangleMesh::new(
            vec![
                Vec3::new(-1.0, -1.0, 0.1),
                Vec3::new(1.0, -1.0, 0.1),
                Vec3::new(1.0, 1.0, 0.1),
                Vec3::new(-1.0, 1.0, 0.1),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let (buf, _) = rasterize_events(&quad, 4, 4).unwrap();
        for p in 0..16 {
            assert_eq!(buf.pixel(p).len(), 1);
        }
    }

    #[test]
    fn out_of_range_depth_is_clamped() {
        let mesh = TriangleMesh::new(
            vec![
                Vec3::new(-0.9, -0.9, 1.2),
                Vec3::new(0.9, -0.9, 1.2),
                Vec3::new(0.0, 0.9, 1.2),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let (buf, _) = rasterize_events(&mesh, 2, 2).unwrap();
        assert!(buf.pixel(0).iter().chain(buf.pixel(1)).all(|e| e.depth == 1.0));
    }
}
