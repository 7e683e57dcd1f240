//! Covering radius of a finite point set on the unit sphere in `ℝⁿ`:
//! `max_{|x|=1} min_j |x − d_j|`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use super::sobol::{sobol_points_open, MAX_SOBOL_DIM};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed form (fewer than three points, or a zero-dimensional sphere).
    Exact,
    /// Largest angular gap on a circle.
    Circle,
    /// Vertices of the spherical Voronoi diagram on the 2-sphere.
    Voronoi3d,
    /// Best of `M` quasi-random directions after local refinement; a lower
    /// estimate of the covering radius.
    Probe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Circle => "circle",
            Method::Voronoi3d => "voronoi-3d",
            Method::Probe => "probe",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub probes: usize,
    pub seed: u64,
    /// Number of best probes refined by local ascent.
    pub refine: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { probes: 100_000, seed: 0, refine: 32 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveringRadius {
    pub value: f64,
    pub method: Method,
    /// Probe count `M` for [`Method::Probe`].
    pub probes: Option<usize>,
    /// Voronoi vertices found for [`Method::Voronoi3d`].
    pub vertices: Option<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> bool {
    let n = dot(v, v).sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

fn chord_from_dot(t: f64) -> f64 {
    (2.0 - 2.0 * t).max(0.0).sqrt()
}

/// Largest inner product with any point; the covering radius at `x` is
/// `chord_from_dot` of it.
fn nearest_dot(x: &[f64], pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|p| dot(x, p)).fold(f64::NEG_INFINITY, f64::max)
}

/// Pads to `n` coordinates, normalizes and drops duplicates.
fn prepare(points: &[Vec<f64>], n: usize) -> Result<Vec<Vec<f64>>> {
    if points.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if p.len() > n {
            return Err(Error::LengthMismatch { expected: n, got: p.len() });
        }
        let mut v = p.clone();
        v.resize(n, 0.0);
        if !normalize(&mut v) {
            return Err(Error::Unsupported("zero vector in sample set".into()));
        }
        if !out.iter().any(|q| super::embed::euclid(q, &v) < 1e-12) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Covering radius of `points` on the unit sphere of `ℝⁿ` (points with fewer
/// coordinates are zero-padded).
pub fn covering_radius(points: &[Vec<f64>], n: usize, opts: &ProbeOptions) -> Result<CoveringRadius> {
    if n == 0 {
        return Err(Error::Unsupported("zero-dimensional ambient space".into()));
    }
    let pts = prepare(points, n)?;
    let exact = |value| CoveringRadius { value, method: Method::Exact, probes: None, vertices: None };
    if n == 1 {
        let v = [1.0, -1.0].iter().map(|x| chord_from_dot(nearest_dot(&[*x], &pts))).fold(0.0, f64::max);
        return Ok(exact(v));
    }
    if n == 2 {
        return Ok(CoveringRadius { value: circle(&pts), method: Method::Circle, probes: None, vertices: None });
    }
    match pts.len() {
        1 => return Ok(exact(2.0)),
        2 => {
            let s: Vec<f64> = pts[0].iter().zip(&pts[1]).map(|(a, b)| a + b).collect();
            return Ok(exact((2.0 + dot(&s, &s).sqrt()).sqrt()));
        }
        _ => {}
    }
    if n == 3 {
        let (value, vertices) = voronoi_3d(&pts);
        return Ok(CoveringRadius { value, method: Method::Voronoi3d, probes: None, vertices: Some(vertices) });
    }
    Ok(CoveringRadius {
        value: probe(&pts, n, opts)?,
        method: Method::Probe,
        probes: Some(opts.probes),
        vertices: None,
    })
}

fn circle(pts: &[Vec<f64>]) -> f64 {
    let mut ang: Vec<f64> = pts.iter().map(|p| p[1].atan2(p[0])).collect();
    ang.sort_by(f64::total_cmp);
    let tau = std::f64::consts::TAU;
    let mut gap = ang[0] + tau - ang[ang.len() - 1];
    for w in ang.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    2.0 * (gap / 4.0).sin()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Every Voronoi vertex is the centre of an empty spherical cap through three
/// points. Returns the largest chord to such a triple and the vertex count.
fn voronoi_3d(pts: &[Vec<f64>]) -> (f64, usize) {
    let n = pts.len();
    let mut best = 0.0f64;
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let ab: Vec<f64> = (0..3).map(|t| pts[j][t] - pts[i][t]).collect();
            for k in j + 1..n {
                let ac: Vec<f64> = (0..3).map(|t| pts[k][t] - pts[i][t]).collect();
                let mut w = cross(&ab, &ac).to_vec();
                if dot(&w, &w).sqrt() < 1e-12 || !normalize(&mut w) {
                    continue;
                }
                for sign in [1.0, -1.0] {
                    let c: Vec<f64> = w.iter().map(|x| sign * x).collect();
                    let t = dot(&c, &pts[i]);
                    let slack = 1e-12 * (1.0 + t.abs());
                    if pts.iter().all(|p| dot(&c, p) <= t + slack) {
                        best = best.max(chord_from_dot(t));
                        if !vertices.iter().any(|v| super::embed::euclid(v, &c) < 1e-9) {
                            vertices.push(c);
                        }
                    }
                }
            }
        }
    }
    (best, vertices.len())
}

fn probe_directions(n: usize, opts: &ProbeOptions) -> Result<Vec<Vec<f64>>> {
    let mut dirs = if n <= MAX_SOBOL_DIM {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        sobol_points_open(n, opts.probes, Some(opts.seed))?
            .into_iter()
            .map(|u| u.into_iter().map(|x| normal.inverse_cdf(x)).collect())
            .collect::<Vec<Vec<f64>>>()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..opts.probes).map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()
    };
    dirs.retain_mut(|d| normalize(d));
    Ok(dirs)
}

fn probe(pts: &[Vec<f64>], n: usize, opts: &ProbeOptions) -> Result<f64> {
    let mut candidates = probe_directions(n, opts)?;
    candidates.extend(pts.iter().map(|p| p.iter().map(|x| -x).collect::<Vec<f64>>()));
    let mut scored: Vec<(f64, usize)> = candidates.iter().enumerate().map(|(i, x)| (nearest_dot(x, pts), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best = scored.first().map_or(1.0, |s| s.0);
    for &(_, i) in scored.iter().take(opts.refine) {
        best = best.min(refine(candidates[i].clone(), pts));
    }
    Ok(chord_from_dot(best))
}

/// Local descent of `max_j ⟨x, d_j⟩` on the sphere, moving away from the
/// currently nearest points.
fn refine(mut x: Vec<f64>, pts: &[Vec<f64>]) -> f64 {
    let mut f = nearest_dot(&x, pts);
    let mut step: f64 = 0.25;
    for _ in 0..500 {
        if step < 1e-12 {
            break;
        }
        let mut dir = vec![0.0; x.len()];
        for p in pts {
            let t = dot(&x, p);
            if t >= f - 1e-3 * step.max(1e-6) {
                for (d, (pi, xi)) in dir.iter_mut().zip(p.iter().zip(&x)) {
                    *d -= pi - t * xi;
                }
            }
        }
        if !normalize(&mut dir) {
            break;
        }
        let mut y: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
        if !normalize(&mut y) {
            break;
        }
        let fy = nearest_dot(&y, pts);
        if fy < f {
            x = y;
            f = fy;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ProbeOptions {
        ProbeOptions { probes: 4096, seed: 1, refine: 16 }
    }

    #[test]
    fn single_point_is_antipodal() {
        for n in 1..=5 {
            let r = covering_radius(&[vec![1.0]], n, &opts()).unwrap();
            assert!((r.value - 2.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn circle_gap() {
        let pts: Vec<Vec<f64>> = (0..8)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / 8.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let r = covering_radius(&pts, 2, &opts()).unwrap();
        assert_eq!(r.method, Method::Circle);
        assert!((r.value - 2.0 * (std::f64::consts::PI / 16.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn octahedron_vertices() {
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 3];
                v[i] = s;
                pts.push(v);
            }
        }
        let r = covering_radius(&pts, 3, &opts()).unwrap();
        assert_eq!(r.method, Method::Voronoi3d);
        assert_eq!(r.vertices, Some(8));
        let want = chord_from_dot(1.0 / 3f64.sqrt());
        assert!((r.value - want).abs() < 1e-12);
    }

    #[test]
    fn great_circle_in_three_dimensions_has_pole() {
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / 6.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let r = covering_radius(&pts, 3, &opts()).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.vertices, Some(2));
    }

    #[test]
    fn probe_on_cross_polytope() {
        // ±e_i in ℝ⁴: the farthest points are (±1,±1,±1,±1)/2.
        let mut pts = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 4];
                v[i] = s;
                pts.push(v);
            }
        }
        let r = covering_radius(&pts, 4, &opts()).unwrap();
        assert_eq!(r.method, Method::Probe);
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn two_points_closed_form() {
        let r = covering_radius(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 3, &opts()).unwrap();
        assert!((r.value - (2.0 + 2f64.sqrt()).sqrt()).abs() < 1e-14);
        let r = covering_radius(&[vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]], 3, &opts()).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-14);
    }
}
