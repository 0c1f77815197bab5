//! Orthographic triangle coverage on the pixel-center grid.
//!
//! Shared by the mesh-to-FOF rasterizer and the normal-map renderer. A pixel
//! is covered when its center lies inside the xy projection of the triangle.
//! Centers exactly on an edge follow a top-left style ownership rule, so two
//! triangles sharing an edge from opposite sides never both report it.

use crate::geometry::{pixel_center, to_pixel};

/// 2D point in normalized image coordinates.
pub type Point2 = [f64; 2];

#[inline]
fn orient(a: Point2, b: Point2, p: Point2) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// Edge function of the directed edge `a -> b` evaluated at `p`.
///
/// Computed from the lexicographically smaller endpoint so that the reverse
/// edge yields the exact negation, bit for bit.
#[inline]
fn edge(a: Point2, b: Point2, p: Point2) -> f64 {
    if (a[0], a[1]) <= (b[0], b[1]) {
        orient(a, b, p)
    } else {
        -orient(b, a, p)
    }
}

/// Whether the directed edge `a -> b` owns pixel centers lying exactly on it.
#[inline]
fn owns_boundary(a: Point2, b: Point2) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    dy > 0.0 || (dy == 0.0 && dx < 0.0)
}

#[inline]
fn inside(w: f64, owner: bool) -> bool {
    w > 0.0 || (w == 0.0 && owner)
}

/// Twice the signed area of the projected triangle; its sign is the sign of
/// the z component of the geometric normal `(b - a) x (c - a)`.
#[inline]
pub fn signed_area2(a: Point2, b: Point2, c: Point2) -> f64 {
    if (a[0], a[1]) <= (b[0], b[1]) {
        orient(a, b, c)
    } else {
        -orient(b, a, c)
    }
}

/// Calls `visit(x, y, [wa, wb, wc])` for every covered pixel of a
/// `width x height` grid with the barycentric weights of `a`, `b`, `c`.
///
/// Returns `false` (visiting nothing) for triangles with zero projected area.
pub fn cover_triangle(
    [a, b, c]: [Point2; 3],
    width: usize,
    height: usize,
    mut visit: impl FnMut(usize, usize, [f64; 3]),
) -> bool {
    let area = signed_area2(a, b, c);
    if !(area != 0.0) || !area.is_finite() {
        return false;
    }
    // traverse in positive orientation; `flip` remembers the b/c swap
    let flip = area < 0.0;
    let (p0, p1, p2) = if flip { (a, c, b) } else { (a, b, c) };
    let own = [
        owns_boundary(p1, p2),
        owns_boundary(p2, p0),
        owns_boundary(p0, p1),
    ];

    let lo_x = a[0].min(b[0]).min(c[0]);
    let hi_x = a[0].max(b[0]).max(c[0]);
    let lo_y = a[1].min(b[1]).min(c[1]);
    let hi_y = a[1].max(b[1]).max(c[1]);
    let x0 = libm::ceil(to_pixel(lo_x, width)).max(0.0);
    let x1 = libm::floor(to_pixel(hi_x, width)).min(width as f64 - 1.0);
    let y0 = libm::ceil(to_pixel(lo_y, height)).max(0.0);
    let y1 = libm::floor(to_pixel(hi_y, height)).min(height as f64 - 1.0);
    if x0 > x1 || y0 > y1 {
        return true;
    }
    let (x0, x1, y0, y1) = (x0 as usize, x1 as usize, y0 as usize, y1 as usize);

    for py in y0..=y1 {
        let cy = pixel_center(py as i64, height);
        for px in x0..=x1 {
            let p = [pixel_center(px as i64, width), cy];
            let w0 = edge(p1, p2, p);
            if !inside(w0, own[0]) {
                continue;
            }
            let w1 = edge(p2, p0, p);
            if !inside(w1, own[1]) {
                continue;
            }
            let w2 = edge(p0, p1, p);
            if !inside(w2, own[2]) {
                continue;
            }
            let sum = w0 + w1 + w2;
            let (l0, l1, l2) = (w0 / sum, w1 / sum, w2 / sum);
            let weights = if flip { [l0, l2, l1] } else { [l0, l1, l2] };
            visit(px, py, weights);
        }
    }
    true
}
