use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplyChainInstance {
    #[serde(rename = "I")]
    pub sites: usize,
    #[serde(rename = "J")]
    pub customers: usize,
    #[serde(rename = "K")]
    pub suppliers: usize,
    #[serde(rename = "R")]
    pub levels: usize,
    #[serde(rename = "T")]
    pub periods: usize,
    /// Upper capacity of each level, `pm_1..pm_R`; `pm_0 = 0`.
    pub pm: Vec<f64>,
    /// Reference capital cost at `pm_r`; `cm_0 = 0`.
    pub cm: Vec<f64>,
    /// Unit operating cost per unit of installed capacity, per site.
    pub vv: Vec<f64>,
    /// Raw-material supply limit, `bm[k][t]`.
    pub bm: Vec<Vec<f64>>,
    /// Product transport cost, `c[i][j]` (already multiplied by tortuosity).
    pub c: Vec<Vec<f64>>,
    /// Raw-material procurement plus transport cost, `a[k][i]`.
    pub a: Vec<Vec<f64>>,
    pub pi: f64,
    pub pex: f64,
    pub conversion_rate: f64,
    pub eta: f64,
    #[serde(default = "default_tortuosity")]
    pub tortuosity: f64,
    pub alpha: f64,
    pub d: f64,
}

fn default_tortuosity() -> f64 {
    1.6
}

impl SupplyChainInstance {
    pub fn demand_dim(&self) -> usize {
        self.customers * self.periods
    }

    /// `pm_{r-1}` and `pm_r` for a zero-based level index.
    pub fn bracket(&self, r: usize) -> (f64, f64) {
        let lo = if r == 0 { 0.0 } else { self.pm[r - 1] };
        (lo, self.pm[r])
    }

    pub fn cost_bracket(&self, r: usize) -> (f64, f64) {
        let lo = if r == 0 { 0.0 } else { self.cm[r - 1] };
        (lo, self.cm[r])
    }

    pub fn validate(&self) -> Result<()> {
        let (i, j, k, r, t) = (
            self.sites,
            self.customers,
            self.suppliers,
            self.levels,
            self.periods,
        );
        if i == 0 || j == 0 || k == 0 || r == 0 || t == 0 {
            return Err(Error::invalid(
                "instance counts I, J, K, R, T must be positive",
            ));
        }
        let shape = |name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "instance field {name} has the wrong shape"
                )))
            }
        };
        shape("pm", self.pm.len() == r)?;
        shape("cm", self.cm.len() == r)?;
        shape("vv", self.vv.len() == i)?;
        shape(
            "bm",
            self.bm.len() == k && self.bm.iter().all(|row| row.len() == t),
        )?;
        shape(
            "c",
            self.c.len() == i && self.c.iter().all(|row| row.len() == j),
        )?;
        shape(
            "a",
            self.a.len() == k && self.a.iter().all(|row| row.len() == i),
        )?;
        let mut prev = 0.0;
        for &p in &self.pm {
            if !(p > prev) || !p.is_finite() {
                return Err(Error::invalid(
                    "pm must be strictly increasing from pm_0 = 0",
                ));
            }
            prev = p;
        }
        let mut prev = 0.0;
        for &c in &self.cm {
            if !(c >= prev) || !c.is_finite() {
                return Err(Error::invalid("cm must be non-decreasing from cm_0 = 0"));
            }
            prev = c;
        }
        let costs = self
            .vv
            .iter()
            .chain(self.bm.iter().flatten())
            .chain(self.c.iter().flatten())
            .chain(self.a.iter().flatten())
            .chain([&self.pi, &self.pex]);
        for v in costs {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::invalid(
                    "costs and supplies must be finite and non-negative",
                ));
            }
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::invalid("eta must lie in [0, 1)"));
        }
        if !(self.conversion_rate > 0.0 && self.conversion_rate.is_finite()) {
            return Err(Error::invalid("conversion_rate must be positive"));
        }
        Ok(())
    }

    /// Builds transport costs from planar coordinates: cost per unit of
    /// straight-line distance times `tortuosity`.
    #[allow(clippy::too_many_arguments)]
    pub fn with_geometry(
        site_xy: &[(f64, f64)],
        customer_xy: &[(f64, f64)],
        supplier_xy: &[(f64, f64)],
        product_rate: f64,
        raw_rate: f64,
        raw_price: &[f64],
        tortuosity: f64,
        base: SupplyChainInstance,
    ) -> SupplyChainInstance {
        let dist =
            |p: (f64, f64), q: (f64, f64)| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
        let c = site_xy
            .iter()
            .map(|&s| {
                customer_xy
                    .iter()
                    .map(|&cu| product_rate * tortuosity * dist(s, cu))
                    .collect()
            })
            .collect();
        let a = supplier_xy
            .iter()
            .zip(raw_price)
            .map(|(&k, &price)| {
                site_xy
                    .iter()
                    .map(|&s| price + raw_rate * tortuosity * dist(k, s))
                    .collect()
            })
            .collect();
        SupplyChainInstance {
            sites: site_xy.len(),
            customers: customer_xy.len(),
            suppliers: supplier_xy.len(),
            c,
            a,
            tortuosity,
            ..base
        }
    }
}

/// Bundled desk-scale instance: 3 sites, 4 customers, 3 suppliers, 2
/// capacity levels, 4 periods. Raw material is harvested in periods 1 and 2
/// only; the other periods run on stored inventory.
pub fn desk_instance() -> SupplyChainInstance {
    let base = SupplyChainInstance {
        sites: 0,
        customers: 0,
        suppliers: 0,
        levels: 2,
        periods: 4,
        pm: vec![40.0, 100.0],
        cm: vec![600.0, 1000.0],
        vv: vec![3.0, 3.5, 2.8],
        bm: vec![
            vec![120.0, 90.0, 0.0, 0.0],
            vec![100.0, 80.0, 0.0, 0.0],
            vec![150.0, 120.0, 0.0, 0.0],
        ],
        c: Vec::new(),
        a: Vec::new(),
        pi: 0.3,
        pex: 25.0,
        conversion_rate: 0.8,
        eta: 0.02,
        tortuosity: 1.6,
        alpha: 0.1,
        d: 0.1,
    };
    SupplyChainInstance::with_geometry(
        &[(2.0, 2.0), (6.0, 5.0), (9.0, 1.0)],
        &[(1.0, 6.0), (4.0, 8.0), (8.0, 8.0), (10.0, 4.0)],
        &[(0.0, 0.0), (5.0, 0.0), (10.0, -1.0)],
        0.12,
        0.08,
        &[1.0, 1.1, 0.9],
        1.6,
        base,
    )
}

/// Synthetic demand generator: a per-customer base level scaled by a
/// seasonal profile, a common year factor and idiosyncratic noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProcess {
    pub base: Vec<f64>,
    pub season: Vec<f64>,
    pub year_sd: f64,
    pub noise_sd: f64,
}

impl DemandProcess {
    pub fn desk() -> Self {
        Self {
            base: vec![14.0, 10.0, 18.0, 12.0],
            season: vec![0.9, 1.0, 1.15, 0.95],
            year_sd: 0.12,
            noise_sd: 0.08,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len() * self.season.len()
    }

    pub fn names(&self) -> Vec<String> {
        let t = self.season.len();
        (0..self.dim())
            .map(|c| format!("d_{}_{}", c / t + 1, c % t + 1))
            .collect()
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        let mut rng = rng_from_seed(seed);
        let t = self.season.len();
        let mut out = Matrix::zeros(n, self.dim());
        for r in 0..n {
            let year: f64 = rng.sample::<f64, _>(StandardNormal) * self.year_sd;
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                let e: f64 = rng.sample::<f64, _>(StandardNormal) * self.noise_sd;
                let level = self.base[c / t] * self.season[c % t];
                *v = (level * (1.0 + year + e)).max(0.0);
            }
        }
        Dataset::new(self.names(), out)
    }
}

/// `years` rows of historical demand for the desk instance.
pub fn demand_history(years: usize, seed: u64) -> Result<Dataset> {
    DemandProcess::desk().sample(years, seed)
}
