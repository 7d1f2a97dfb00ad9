//! Small dense-vector helpers. Vectors are plain `[f64]` slices throughout the crate.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `‖v‖_p` for `p ∈ [1, ∞]`.
pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidNorm(p))
    } else {
        Ok(())
    }
}

/// Hölder conjugate `q` with `1/p + 1/q = 1`.
pub fn dual_exponent(p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    })
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s·b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn is_zero(v: &[f64]) -> bool {
    v.iter().all(|x| *x == 0.0)
}

/// Unit vector `v` (w.r.t. `‖·‖_p`) maximizing `⟨w, v⟩`, so that `⟨w, v⟩ = ‖w‖_q`.
///
/// p = 2: `w/‖w‖₂`. p = ∞: `sign(w)` componentwise with zeros mapped to +1.
/// p = 1: `sign(w_j)·e_j` at the largest `|w_j|`, lowest index on ties.
/// Other p use the Hölder equality case.
pub fn dual_maximizer(w: &[f64], p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    if is_zero(w) {
        return Err(Error::ZeroWeight);
    }
    let sgn = |x: f64| if x >= 0.0 { 1.0 } else { -1.0 };
    if p.is_infinite() {
        return Ok(w.iter().map(|x| sgn(*x)).collect());
    }
    if p == 1.0 {
        let mut best = 0;
        for (j, x) in w.iter().enumerate() {
            if x.abs() > w[best].abs() {
                best = j;
            }
        }
        let mut v = vec![0.0; w.len()];
        v[best] = sgn(w[best]);
        return Ok(v);
    }
    if p == 2.0 {
        let n = lp_norm(w, 2.0);
        return Ok(scale(w, 1.0 / n));
    }
    let q = dual_exponent(p)?;
    let raw: Vec<f64> = w.iter().map(|x| sgn(*x) * x.abs().powf(q - 1.0)).collect();
    let n = lp_norm(&raw, p);
    Ok(scale(&raw, 1.0 / n))
}

/// Euclidean projection onto `{‖v‖₁ ≤ radius}` (sort-based).
pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if lp_norm(v, 1.0) <= radius {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - radius) / (i + 1) as f64;
        if *m > t {
            theta = t;
        }
    }
    v.iter()
        .map(|x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}

/// Euclidean projection onto `{‖v‖_q ≤ radius}` for q ∈ {1, 2, ∞}.
pub fn project_lq_ball(v: &[f64], q: f64, radius: f64) -> Result<Vec<f64>> {
    if q == 2.0 {
        let n = lp_norm(v, 2.0);
        Ok(if n > radius { scale(v, radius / n) } else { v.to_vec() })
    } else if q.is_infinite() {
        Ok(v.iter().map(|x| x.clamp(-radius, radius)).collect())
    } else if q == 1.0 {
        Ok(project_l1_ball(v, radius))
    } else {
        Err(Error::InvalidNorm(q))
    }
}
