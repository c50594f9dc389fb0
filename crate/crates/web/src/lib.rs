//! Browser bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the plain-Rust functions behind them
//! are public so they can be exercised natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use drccp::ambiguity::{modified_risk, AmbiguityParams};
use drccp::experiments::{kde_compare, KdeCompareConfig};
use drccp::gan::GanConfig;
use drccp::kde::{fit_kde, kde_density};
use drccp::scenarios::{inside_mask, missing_data_mixture, MASK_LOWER, MASK_UPPER};
use drccp::seed::derive_seed;
use drccp::stats::{lower_bound_params, upper_confidence, violation_budget};
use drccp::{Dataset, Result};

fn points(d: &Dataset) -> Vec<[f64; 2]> {
    d.iter().map(|r| [r[0], r[1]]).collect()
}

#[derive(Serialize)]
pub struct CompareView {
    pub masked: Vec<[f64; 2]>,
    pub kde: Vec<[f64; 2]>,
    pub gan: Vec<[f64; 2]>,
    pub fraction_original: f64,
    pub fraction_kde: f64,
    pub fraction_gan: f64,
    pub gan_epochs: usize,
    pub mask: [[f64; 2]; 2],
}

pub fn compare(seed: u64, max_epochs: usize) -> Result<CompareView> {
    let cmp = kde_compare(&KdeCompareConfig {
        seed,
        gan: GanConfig {
            max_epochs,
            ..GanConfig::default()
        },
        ..KdeCompareConfig::default()
    })?;
    Ok(CompareView {
        masked: points(&cmp.masked),
        kde: points(&cmp.kde_samples),
        gan: points(&cmp.gan_samples),
        fraction_original: cmp.summary.original,
        fraction_kde: cmp.summary.kde,
        fraction_gan: cmp.summary.gan,
        gan_epochs: cmp.summary.gan_stopped_epoch,
        mask: [MASK_LOWER, MASK_UPPER],
    })
}

#[derive(Serialize)]
pub struct BoundView {
    pub alpha_prime: f64,
    pub gamma: f64,
    pub violation_budget: usize,
    pub theta_n: f64,
    pub l: usize,
    /// Upper confidence limit for an empirical violation rate of `q_hat`.
    pub upper_confidence: f64,
    pub admitted: bool,
}

/// Modified risk level, lower-bound order statistic and the acceptance test
/// for one candidate. `gamma < 0` means "use α'".
#[allow(clippy::too_many_arguments)]
pub fn bounds(
    alpha: f64,
    d: f64,
    gamma: f64,
    n: usize,
    m: usize,
    beta: f64,
    q_hat: f64,
    n_prime: usize,
) -> Result<BoundView> {
    let alpha_prime = modified_risk(&AmbiguityParams::new(alpha, d)?);
    let gamma = if gamma < 0.0 { alpha_prime } else { gamma };
    let (theta_n, l) = lower_bound_params(gamma, n, alpha_prime, m, beta)?;
    let u = upper_confidence(q_hat, n_prime.max(1), beta);
    Ok(BoundView {
        alpha_prime,
        gamma,
        violation_budget: violation_budget(gamma, n),
        theta_n,
        l,
        upper_confidence: u,
        admitted: u <= alpha_prime,
    })
}

#[derive(Serialize)]
pub struct GridView {
    pub nx: usize,
    pub ny: usize,
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// Row-major, `y` outer.
    pub density: Vec<f64>,
    pub bandwidth: Vec<f64>,
}

/// KDE density of the masked mixture data on a regular grid, with the
/// Silverman bandwidth multiplied by `scale`.
pub fn density_grid(seed: u64, scale: f64, nx: usize, ny: usize) -> Result<GridView> {
    let data = missing_data_mixture().sample(200, derive_seed(seed, &[0]))?;
    let masked = data.filter(|r| !inside_mask(r));
    let base = fit_kde(&masked)?;
    let bw: Vec<f64> = base.bandwidth().iter().map(|h| h * scale).collect();
    let model = drccp::kde::KdeModel::new(masked, bw.clone())?;
    let (x, y) = ([0.0, 14.0], [0.0, 14.0]);
    let (nx, ny) = (nx.clamp(2, 200), ny.clamp(2, 200));
    let mut density = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let px = x[0] + (x[1] - x[0]) * i as f64 / (nx - 1) as f64;
            let py = y[0] + (y[1] - y[0]) * j as f64 / (ny - 1) as f64;
            density.push(kde_density(&model, &[px, py])?);
        }
    }
    Ok(GridView {
        nx,
        ny,
        x,
        y,
        density,
        bandwidth: bw,
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsValue> {
    match r {
        Ok(v) => serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string())),
        Err(e) => Err(JsValue::from_str(&e.to_string())),
    }
}

#[wasm_bindgen(js_name = compareKdeGan)]
pub fn compare_kde_gan(seed: u32, max_epochs: u32) -> std::result::Result<String, JsValue> {
    to_js(compare(seed as u64, max_epochs as usize))
}

#[wasm_bindgen(js_name = boundParams)]
#[allow(clippy::too_many_arguments)]
pub fn bound_params(
    alpha: f64,
    d: f64,
    gamma: f64,
    n: u32,
    m: u32,
    beta: f64,
    q_hat: f64,
    n_prime: u32,
) -> std::result::Result<String, JsValue> {
    to_js(bounds(
        alpha,
        d,
        gamma,
        n as usize,
        m as usize,
        beta,
        q_hat,
        n_prime as usize,
    ))
}

#[wasm_bindgen(js_name = kdeDensityGrid)]
pub fn kde_density_grid(
    seed: u32,
    scale: f64,
    nx: u32,
    ny: u32,
) -> std::result::Result<String, JsValue> {
    to_js(density_grid(seed as u64, scale, nx as usize, ny as usize))
}
