use crate::Vec3;

use super::ReprError;

/// Centripetal Catmull-Rom through `points`, end control points duplicated.
///
/// Every input point appears in the output verbatim; the result has
/// `(n - 1) * samples_per_segment + 1` points.
pub fn spline_through(points: &[Vec3], samples_per_segment: usize) -> Result<Vec<Vec3>, ReprError> {
    if points.len() < 2 {
        return Err(ReprError::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if samples_per_segment == 0 {
        return Err(ReprError::InvalidStyle("samples_per_segment must be at least 1".into()));
    }
    let n = points.len();
    let m = samples_per_segment;
    let mut out = Vec::with_capacity((n - 1) * m + 1);
    for s in 0..n - 1 {
        let p0 = points[s.saturating_sub(1)];
        let p1 = points[s];
        let p2 = points[s + 1];
        let p3 = points[(s + 2).min(n - 1)];
        out.push(p1);
        for k in 1..m {
            out.push(barry_goldman(p0, p1, p2, p3, k as f64 / m as f64));
        }
    }
    out.push(points[n - 1]);
    Ok(out)
}

fn knot_step(a: &Vec3, b: &Vec3) -> f64 {
    let d = (b - a).norm().sqrt();
    if d > 0.0 {
        d
    } else {
        1.0
    }
}

// Pyramidal evaluation; `u` in [0, 1) runs over the p1..p2 segment.
fn barry_goldman(p0: Vec3, p1: Vec3, p2: Vec3, p3: Vec3, u: f64) -> Vec3 {
    let t0 = 0.0;
    let t1 = t0 + knot_step(&p0, &p1);
    let t2 = t1 + knot_step(&p1, &p2);
    let t3 = t2 + knot_step(&p2, &p3);
    let t = t1 + (t2 - t1) * u;
    let lerp = |a: &Vec3, b: &Vec3, ta: f64, tb: f64| a * ((tb - t) / (tb - ta)) + b * ((t - ta) / (tb - ta));
    let a1 = lerp(&p0, &p1, t0, t1);
    let a2 = lerp(&p1, &p2, t1, t2);
    let a3 = lerp(&p2, &p3, t2, t3);
    let b1 = lerp(&a1, &a2, t0, t2);
    let b2 = lerp(&a2, &a3, t1, t3);
    lerp(&b1, &b2, t1, t2)
}

/// Orthonormal frame at one spline sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
}

const DEGENERATE: f64 = 1e-9;

/// Tangent/normal/binormal per sample. Normals follow discrete curvature and
/// are kept sign-continuous; straight stretches inherit the previous normal.
pub fn ribbon_frames(points: &[Vec3]) -> Result<Vec<Frame>, ReprError> {
    let n = points.len();
    if n < 3 {
        return Err(ReprError::TooFewPoints { needed: 3, got: n });
    }
    let scale = points
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut tangents: Vec<Option<Vec3>> = (0..n)
        .map(|i| {
            let d = points[(i + 1).min(n - 1)] - points[i.saturating_sub(1)];
            (d.norm() > DEGENERATE * scale).then(|| d.normalize())
        })
        .collect();
    fill_gaps(&mut tangents);
    let tangents: Vec<Vec3> = match tangents[0] {
        Some(_) => tangents.into_iter().map(|t| t.expect("filled")).collect(),
        // all points coincide
        None => vec![Vec3::x(); n],
    };

    // Curvature direction; index 0 and n-1 borrow their neighbour's.
    let curvature: Vec<Option<Vec3>> = (0..n)
        .map(|i| {
            let c = i.clamp(1, n - 2);
            let k = points[c + 1] - points[c] * 2.0 + points[c - 1];
            let k = k - tangents[i] * k.dot(&tangents[i]);
            (k.norm() > DEGENERATE * scale).then(|| k.normalize())
        })
        .collect();

    let seed = match curvature.iter().flatten().next() {
        Some(k) => *k,
        None => any_perpendicular(&tangents[0]),
    };
    let mut frames = Vec::with_capacity(n);
    let mut prev = seed;
    for i in 0..n {
        let t = tangents[i];
        let mut normal = match curvature[i] {
            Some(k) => k,
            None => orthogonalize(&prev, &t).unwrap_or_else(|| any_perpendicular(&t)),
        };
        if normal.dot(&prev) < 0.0 {
            normal = -normal;
        }
        let binormal = t.cross(&normal);
        frames.push(Frame {
            tangent: t,
            normal,
            binormal,
        });
        prev = normal;
    }
    Ok(frames)
}

fn fill_gaps(v: &mut [Option<Vec3>]) {
    let mut last = None;
    for x in v.iter_mut() {
        match x {
            Some(t) => last = Some(*t),
            None => *x = last,
        }
    }
    let mut next = None;
    for x in v.iter_mut().rev() {
        match x {
            Some(t) => next = Some(*t),
            None => *x = next,
        }
    }
}

pub(crate) fn orthogonalize(v: &Vec3, axis: &Vec3) -> Option<Vec3> {
    let w = v - axis * v.dot(axis);
    (w.norm() > 1e-6).then(|| w.normalize())
}

/// Fixed perpendicular, used only when nothing else defines a direction.
pub(crate) fn any_perpendicular(t: &Vec3) -> Vec3 {
    let a = t.abs();
    let e = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    t.cross(&e).normalize()
}
