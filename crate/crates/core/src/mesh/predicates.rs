//! Exact orientation and segment-intersection predicates. The fast path is a
//! filtered f64 determinant with Shewchuk's error bound; ambiguous cases fall
//! back to exact rational arithmetic on the input coordinates.

use crate::Vec2;
use num_rational::BigRational;

/// Sign of the signed area of triangle (a, b, c): +1 counter-clockwise,
/// -1 clockwise, 0 collinear. Exact.
pub fn orient2d(a: Vec2, b: Vec2, c: Vec2) -> i8 {
    let detleft = (b.x - a.x) * (c.y - a.y);
    let detright = (b.y - a.y) * (c.x - a.x);
    let det = detleft - detright;
    let detsum = detleft.abs() + detright.abs();
    // 3u + 16u^2 with u = 2^-53, rounded up.
    const ERRBOUND: f64 = 3.330_669_073_875_472e-16;
    if det.abs() > ERRBOUND * detsum {
        return det.signum() as i8;
    }
    orient2d_exact(a, b, c)
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

fn orient2d_exact(a: Vec2, b: Vec2, c: Vec2) -> i8 {
    let det = (rat(b.x) - rat(a.x)) * (rat(c.y) - rat(a.y))
        - (rat(b.y) - rat(a.y)) * (rat(c.x) - rat(a.x));
    if det > BigRational::from_float(0.0).unwrap() {
        1
    } else if det < BigRational::from_float(0.0).unwrap() {
        -1
    } else {
        0
    }
}

fn in_bounding_box(p: Vec2, a: Vec2, b: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// True when closed segments [a, b] and [c, d] share at least one point.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && in_bounding_box(c, a, b))
        || (o2 == 0 && in_bounding_box(d, a, b))
        || (o3 == 0 && in_bounding_box(a, c, d))
        || (o4 == 0 && in_bounding_box(b, c, d))
}

/// Intersection test for polyline segments that may legitimately share
/// endpoints: returns true only if they meet anywhere beyond the shared
/// endpoint(s).
pub fn segments_intersect_beyond_shared(
    a: Vec2,
    b: Vec2,
    c: Vec2,
    d: Vec2,
    shares_a_c: bool,
    shares_a_d: bool,
    shares_b_c: bool,
    shares_b_d: bool,
) -> bool {
    let any_shared = shares_a_c || shares_a_d || shares_b_c || shares_b_d;
    if !any_shared {
        return segments_intersect(a, b, c, d);
    }
    // With a shared endpoint a proper crossing is impossible; the only
    // illegal contact is collinear overlap or the far endpoint landing on
    // the other segment.
    let point_on_open_segment = |p: Vec2, s0: Vec2, s1: Vec2, is_endpoint: bool| {
        !is_endpoint && orient2d(s0, s1, p) == 0 && in_bounding_box(p, s0, s1)
    };
    point_on_open_segment(c, a, b, shares_a_c || shares_b_c)
        || point_on_open_segment(d, a, b, shares_a_d || shares_b_d)
        || point_on_open_segment(a, c, d, shares_a_c || shares_a_d)
        || point_on_open_segment(b, c, d, shares_b_c || shares_b_d)
}
