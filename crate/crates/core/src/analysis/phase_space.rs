use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

/// Axes of a rectangular phase-space grid. Quadratures follow
/// `x = (a + a^dag) / sqrt(2)`, `p = (a - a^dag) / (i sqrt(2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            nx: n,
            p_min: -half_width,
            p_max: half_width,
            np: n,
        }
    }

    /// `[-(|alpha|+4), |alpha|+4]` on both axes with 201 points each.
    pub fn for_alpha(alpha_abs: f64) -> Self {
        Self::square(alpha_abs + 4.0, 201)
    }

    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![(min + max) / 2.0];
        }
        (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Wigner function sampled on a grid; `values[(i, j)]` is `W(x_j, p_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    fn cell(&self) -> f64 {
        let step = |a: &[f64]| if a.len() > 1 { a[1] - a[0] } else { 1.0 };
        step(&self.x_axis) * step(&self.p_axis)
    }

    /// Riemann sum of `W` over the grid.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// CSV text: a header row of x values (after an empty corner cell),
    /// then one row per p value starting with that p.
    pub fn to_csv(&self) -> String {
        let fmt = |v: f64| format!("{v:.11e}");
        let mut out = String::from("p\\x");
        for x in &self.x_axis {
            out.push(',');
            out.push_str(&fmt(*x));
        }
        out.push('\n');
        for (i, p) in self.p_axis.iter().enumerate() {
            out.push_str(&fmt(*p));
            for j in 0..self.x_axis.len() {
                out.push(',');
                out.push_str(&fmt(self.values[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

fn single_mode(rho: &DensityMatrix) -> Result<usize> {
    match rho.space().num_modes() {
        1 => Ok(rho.space().dims()[0]),
        n => Err(Error::MultiModeInput(n)),
    }
}

/// `ln(n!)` for `n = 0..len`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len.max(1)];
    for n in 1..len {
        out[n] = out[n - 1] + (n as f64).ln();
    }
    out
}

/// Wigner function at one phase-space point, summed from the Wigner
/// functions of the Fock outer products:
/// `W_{|n+k><n|}(beta) = (-1)^n / pi * sqrt(n!/(n+k)!) (2 beta*)^k
/// e^{-2|beta|^2} L_n^{(k)}(4|beta|^2)`, `beta = (x + ip)/sqrt(2)`.
fn wigner_point(m: &DMatrix<Complex64>, lnf: &[f64], x: f64, p: f64) -> f64 {
    let d = m.nrows();
    let beta_conj = Complex64::new(x, -p) / 2f64.sqrt();
    let u = 4.0 * beta_conj.norm_sqr();
    let two_b = beta_conj * 2.0;
    let (r, phase) = (two_b.norm(), two_b.arg());
    let mut w = 0.0;
    let mut lag = vec![0.0; d];
    for k in 0..d {
        let len = d - k;
        lag[0] = 1.0;
        if len > 1 {
            lag[1] = 1.0 + k as f64 - u;
        }
        for n in 1..len.saturating_sub(1) {
            let nf = n as f64;
            lag[n + 1] = ((2.0 * nf + 1.0 + k as f64 - u) * lag[n] - (nf + k as f64) * lag[n - 1]) / (nf + 1.0);
        }
        for n in 0..len {
            let rho = m[(n + k, n)];
            if rho.norm_sqr() == 0.0 {
                continue;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let ln_mag = 0.5 * (lnf[n] - lnf[n + k]) + if k > 0 { k as f64 * r.ln() } else { 0.0 } - u / 2.0;
            let radial = sign * ln_mag.exp() * lag[n];
            let angular = Complex64::from_polar(1.0, k as f64 * phase);
            let term = (rho * angular).re * radial;
            w += if k == 0 { term } else { 2.0 * term };
        }
    }
    w / PI
}

/// `W(x, p)` of a single-mode state at one point.
pub fn wigner_at(rho: &DensityMatrix, x: f64, p: f64) -> Result<f64> {
    let d = single_mode(rho)?;
    Ok(wigner_point(rho.matrix(), &ln_factorials(d), x, p))
}

/// Wigner function of a single-mode state, normalized so that it
/// integrates to one. Grid points are evaluated in parallel; the result
/// does not depend on scheduling.
pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    let d = single_mode(rho)?;
    if grid.nx == 0 || grid.np == 0 {
        return Err(Error::Invalid("Wigner grid needs at least one point per axis".into()));
    }
    let lnf = ln_factorials(d);
    let x_axis = GridSpec::axis(grid.x_min, grid.x_max, grid.nx);
    let p_axis = GridSpec::axis(grid.p_min, grid.p_max, grid.np);
    let m = rho.matrix();
    let rows: Vec<Vec<f64>> = p_axis
        .par_iter()
        .map(|&p| x_axis.iter().map(|&x| wigner_point(m, &lnf, x, p)).collect())
        .collect();
    let values = DMatrix::from_fn(p_axis.len(), x_axis.len(), |i, j| rows[i][j]);
    Ok(WignerGrid { x_axis, p_axis, values })
}

/// Grid estimate of `integral max(-W, 0) dx dp`.
pub fn wigner_negative_volume(grid: &WignerGrid) -> f64 {
    grid.values.iter().map(|w| (-w).max(0.0)).sum::<f64>() * grid.cell()
}

/// Hermite functions `psi_n(x) = pi^{-1/4} e^{-x^2/2} H_n(x) / sqrt(2^n n!)`
/// for `n < d`.
fn hermite_functions(x: f64, d: usize) -> Vec<f64> {
    let mut psi = vec![0.0; d];
    psi[0] = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if d > 1 {
        psi[1] = 2f64.sqrt() * x * psi[0];
    }
    for n in 1..d.saturating_sub(1) {
        let nf = n as f64;
        psi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    psi
}

/// Homodyne distribution `p(x | theta) = <x_theta|rho|x_theta>` of the
/// rotated quadrature `x_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2)`.
pub fn quadrature_distribution(rho: &DensityMatrix, theta: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let d = single_mode(rho)?;
    let m = rho.matrix();
    Ok(xs
        .iter()
        .map(|&x| {
            let psi = hermite_functions(x, d);
            let mut total = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let phase = Complex64::from_polar(1.0, -((a as f64) - (b as f64)) * theta);
                    total += (m[(a, b)] * phase).re * psi[a] * psi[b];
                }
            }
            total
        })
        .collect())
}
