//! Small 2-D vector helpers used throughout the crate.

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn perp(a: Vec2) -> Vec2 {
    [-a[1], a[0]]
}

#[inline]
pub fn angle(a: Vec2) -> f64 {
    a[1].atan2(a[0])
}

#[inline]
pub fn from_polar(r: f64, theta: f64) -> Vec2 {
    [r * theta.cos(), r * theta.sin()]
}

/// Rotation sending `dir` (unit) onto the positive y-axis; returns the
/// rotated copy of `v`.  Used to align the imaginary part of a complex
/// momentum with a coordinate axis.
#[inline]
pub fn rotate_to_y(dir: Vec2, v: Vec2) -> Vec2 {
    // rows of the rotation matrix: [dir_y, -dir_x; dir_x, dir_y]
    [dir[1] * v[0] - dir[0] * v[1], dir[0] * v[0] + dir[1] * v[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotate_alignment() {
        let d = [3.0 / 5.0, 4.0 / 5.0];
        let r = rotate_to_y(d, d);
        assert!((r[0]).abs() < 1e-15);
        assert!((r[1] - 1.0).abs() < 1e-15);
        // preserves length
        let v = [0.3, -1.7];
        assert!((norm(rotate_to_y(d, v)) - norm(v)).abs() < 1e-14);
    }
}
