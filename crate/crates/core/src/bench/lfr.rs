//! Parameter grids for the external LFR generator.
//!
//! Only the rows are produced here; the generator itself runs outside this
//! crate and its community files are read back with
//! [`crate::bench::load_ground_truth`].

use std::io::Write;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub const PAPER_N: [u64; 5] = [100, 250, 500, 1000, 2000];
pub const PAPER_ALPHA: [(u64, u64); 5] = [(1, 20), (1, 15), (1, 10), (1, 5), (1, 3)];
pub const PAPER_BETA: [u64; 3] = [30, 35, 40];
pub const PAPER_MU: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
pub const PAPER_REPLICATES: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct LfrGridRow {
    pub n: u64,
    pub alpha: Ratio<u64>,
    pub beta: Ratio<u64>,
    pub mu: f64,
    /// `round(alpha · n)`.
    pub d_max: u64,
    /// `beta · (alpha · n) · log10(n) / n`, using the unrounded `alpha · n`.
    pub avg_degree: f64,
    /// 1-based replicate index.
    pub replicate: usize,
    pub seed: u64,
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Cartesian product `n × alpha × beta × mu × replicate`, in that nesting
/// order. Row `i` gets seed `base_seed + i`.
pub fn lfr_parameter_grid(
    n_set: &[u64],
    alpha_set: &[Ratio<u64>],
    beta_set: &[Ratio<u64>],
    mu_set: &[f64],
    replicates: usize,
    base_seed: u64,
) -> Result<Vec<LfrGridRow>> {
    if n_set.is_empty() || alpha_set.is_empty() || beta_set.is_empty() || mu_set.is_empty() || replicates == 0 {
        return Err(Error::InvalidParameter("every grid dimension needs at least one value".into()));
    }
    if let Some(mu) = mu_set.iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside [0, 1]")));
    }
    if n_set.iter().any(|&n| n < 2) {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let mut rows = Vec::new();
    for &n in n_set {
        for &alpha in alpha_set {
            for &beta in beta_set {
                for &mu in mu_set {
                    for replicate in 1..=replicates {
                        let scaled = alpha * n;
                        let d_max = scaled.round().to_integer();
                        let avg_degree = ratio_f64(beta) * ratio_f64(scaled) * (n as f64).log10() / n as f64;
                        let seed = base_seed + rows.len() as u64;
                        rows.push(LfrGridRow {
                            n,
                            alpha,
                            beta,
                            mu,
                            d_max,
                            avg_degree,
                            replicate,
                            seed,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// The grid of the original study: 5 sizes, 5 alphas, 3 betas, 5 noise levels
/// and 5 replicates.
pub fn paper_grid(base_seed: u64) -> Vec<LfrGridRow> {
    let alphas: Vec<Ratio<u64>> = PAPER_ALPHA.iter().map(|&(a, b)| Ratio::new(a, b)).collect();
    let betas: Vec<Ratio<u64>> = PAPER_BETA.iter().map(|&b| Ratio::from_integer(b)).collect();
    lfr_parameter_grid(&PAPER_N, &alphas, &betas, &PAPER_MU, PAPER_REPLICATES, base_seed)
        .expect("paper grid is valid")
}

/// Parses `3`, `0.25` or `1/20` as a rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidParameter(format!("not a non-negative rational: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 12 {
            return Err(bad());
        }
        let whole: u64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
        return Ok(Ratio::new(whole, 10u64.pow(digits)));
    }
    s.trim().parse::<u64>().map(Ratio::from_integer).map_err(|_| bad())
}

pub const GRID_COLUMNS: [&str; 6] = ["n", "d_max", "avg_degree", "mu", "replicate", "seed"];

pub fn write_grid_csv<W: Write>(rows: &[LfrGridRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", GRID_COLUMNS.join(","))?;
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.n, r.d_max, r.avg_degree, r.mu, r.replicate, r.seed)?;
    }
    Ok(())
}
