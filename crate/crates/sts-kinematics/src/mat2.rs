/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];
pub type Vec2 = [f64; 2];

pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Inverse, or `None` when the determinant is exactly zero.
pub fn inverse(m: &Mat2) -> Option<Mat2> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

/// Solve `m x = b` by Cramer's rule.
pub fn solve(m: &Mat2, b: Vec2) -> Option<Vec2> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([
        (b[0] * m[1][1] - m[0][1] * b[1]) / d,
        (m[0][0] * b[1] - b[0] * m[1][0]) / d,
    ])
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &Mat2) -> f64 {
    let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
    let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
    let c = m[0][1] * m[0][1] + m[1][1] * m[1][1];
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let s_max = ((tr + disc) / 2.0).sqrt();
    let s_min = ((tr - disc) / 2.0).max(0.0).sqrt();
    if s_min == 0.0 {
        f64::INFINITY
    } else {
        s_max / s_min
    }
}
