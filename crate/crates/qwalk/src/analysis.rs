//! Decay-rate fits, plateau detection, perturbative predictions, twin
//! probabilities, localization averages and ensemble statistics.

use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::{
    build_hamiltonian, build_transfer, ctqw_survival, ctrw_survival, CurveMeta, SurvivalCurve,
    TimeGrid, WalkKind,
};
use crate::error::{QwalkError, Result};
use crate::graph::{generate_er, place_traps, ErParams, DEFAULT_MAX_ATTEMPTS};
use crate::seeds;
use crate::spectra::RealSpectrum;

/// First-order perturbative prediction for the slowest decay mode: both the
/// classical λ_1 and the quantum γ of the uniform mode equal Γ·M/N to first
/// order. Valid for Γ ≪ 1 on a connected graph.
pub fn perturbative_rate(n: usize, m: usize, gamma: f64) -> f64 {
    gamma * m as f64 / n as f64
}

/// Spectral-gap estimate λ₂⁽⁰⁾ ≈ z̄ − 2σ from the semicircle support edge.
pub fn predicted_gap(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    nf * p - 2.0 * (nf * p * (1.0 - p)).sqrt()
}

/// Window selection for [`fit_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow {
    /// Latest stable-slope window: points with survival above
    /// max(1.5·plateau, 1e−12), preferring the longest suffix whose
    /// half-window slopes agree within 10%, falling back to the last decade.
    Auto,
    Explicit { t_lo: f64, t_hi: f64 },
}

/// Result of a log-linear decay fit, survival ≈ exp(−Γ·Θ·t).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub theta: f64,
    /// Fitted window [t_lo, t_hi], recorded for auditability.
    pub window: (f64, f64),
    /// RMS residual of the straight-line fit in log space.
    pub residual: f64,
    pub plateau_subtracted: bool,
    /// Plateau value subtracted before fitting, when any.
    pub plateau: Option<f64>,
    /// λ₂⁽⁰⁾ ≈ z̄ − 2σ when the ensemble parameters are known.
    pub predicted_gap: Option<f64>,
    /// Measured λ₂ of −T when the caller supplies it.
    pub measured_gap: Option<f64>,
}

impl DecayFit {
    /// Key-value report block.
    pub fn write_report<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta={:.10e}", self.theta)?;
        writeln!(w, "window_lo={:.10e}", self.window.0)?;
        writeln!(w, "window_hi={:.10e}", self.window.1)?;
        writeln!(w, "residual={:.10e}", self.residual)?;
        match self.plateau {
            Some(p) => writeln!(w, "plateau={p:.10e}")?,
            None => writeln!(w, "plateau=none")?,
        }
        if let Some(g) = self.predicted_gap {
            writeln!(w, "predicted_gap={g:.10e}")?;
        }
        if let Some(g) = self.measured_gap {
            writeln!(w, "measured_gap={g:.10e}")?;
        }
        Ok(())
    }
}

const MIN_FIT_POINTS: usize = 10;

fn line_fit(ts: &[f64], logs: &[f64]) -> (f64, f64, f64) {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, y) in ts.iter().zip(logs) {
        sxx += (t - mt) * (t - mt);
        sxy += (t - mt) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    let rms = (ts
        .iter()
        .zip(logs)
        .map(|(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Least-squares line through (t, ln survival) on the window;
/// Θ = |slope| / Γ with Γ taken from the curve metadata. When `plateau` is
/// given, the fit runs on (survival − plateau), matching the exponential
/// form of the decaying component.
pub fn fit_decay(
    curve: &SurvivalCurve,
    window: FitWindow,
    plateau: Option<f64>,
) -> Result<DecayFit> {
    let gamma = curve.meta.gamma;
    if gamma <= 0.0 {
        return Err(QwalkError::Config(
            "fit_decay needs a positive capture strength".into(),
        ));
    }
    let base = plateau.unwrap_or(0.0);
    let floor = (1.5 * base).max(1e-12);

    let valid: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.values)
        .filter(|&(_, &v)| v > floor)
        .map(|(&t, &v)| (t, (v - base).ln()))
        .collect();

    let (ts, logs): (Vec<f64>, Vec<f64>) = match window {
        FitWindow::Explicit { t_lo, t_hi } => {
            let pts: Vec<_> = valid
                .iter()
                .filter(|&&(t, _)| t >= t_lo && t <= t_hi)
                .cloned()
                .collect();
            let in_window = curve
                .times
                .iter()
                .zip(&curve.values)
                .filter(|&(&t, _)| t >= t_lo && t <= t_hi)
                .count();
            if in_window < MIN_FIT_POINTS {
                return Err(QwalkError::WindowTooSmall {
                    points: in_window,
                    min: MIN_FIT_POINTS,
                });
            }
            if pts.len() < in_window {
                return Err(QwalkError::NonPositiveValues);
            }
            pts.into_iter().unzip()
        }
        FitWindow::Auto => {
            if valid.len() < MIN_FIT_POINTS {
                return Err(QwalkError::WindowTooSmall {
                    points: valid.len(),
                    min: MIN_FIT_POINTS,
                });
            }
            auto_window(&valid)
        }
    };

    let (slope, _, rms) = line_fit(&ts, &logs);
    Ok(DecayFit {
        theta: slope.abs() / gamma,
        window: (ts[0], *ts.last().unwrap()),
        residual: rms,
        plateau_subtracted: plateau.is_some(),
        plateau,
        predicted_gap: None,
        measured_gap: None,
    })
}

/// Longest suffix of the valid points whose first- and second-half slopes
/// agree within 10%; falls back to the final decade of time.
fn auto_window(valid: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let n = valid.len();
    let mut best: Option<usize> = None;
    let mut start = 0;
    while n - start >= MIN_FIT_POINTS {
        let win = &valid[start..];
        let mid = win.len() / 2;
        let (ts1, ys1): (Vec<f64>, Vec<f64>) = win[..mid].iter().cloned().unzip();
        let (ts2, ys2): (Vec<f64>, Vec<f64>) = win[mid..].iter().cloned().unzip();
        let (s1, _, _) = line_fit(&ts1, &ys1);
        let (s2, _, _) = line_fit(&ts2, &ys2);
        let scale = s1.abs().max(s2.abs());
        if scale == 0.0 || (s1 - s2).abs() <= 0.1 * scale {
            best = Some(start);
            break;
        }
        start += ((n - start) / 8).max(1);
    }
    let start = best.unwrap_or_else(|| {
        // last decade fallback
        let t_hi = valid[n - 1].0;
        valid
            .iter()
            .position(|&(t, _)| t >= t_hi / 10.0)
            .unwrap_or(0)
            .min(n - MIN_FIT_POINTS)
    });
    valid[start..].iter().cloned().unzip()
}

/// Plateau detection over the final decade of time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauReport {
    /// Mean of the final-decade values when the drift criterion holds.
    pub plateau: Option<f64>,
    /// Relative drift (max − min)/mean over the final decade.
    pub drift: f64,
    pub window: (f64, f64),
}

pub const DEFAULT_PLATEAU_DRIFT: f64 = 0.01;

pub fn detect_plateau(curve: &SurvivalCurve, drift_threshold: f64) -> Result<PlateauReport> {
    let t_hi = *curve.times.last().ok_or(QwalkError::InsufficientHorizon)?;
    let t_lo = t_hi / 10.0;
    let tail: Vec<f64> = curve
        .times
        .iter()
        .zip(&curve.values)
        .filter(|&(&t, _)| t >= t_lo)
        .map(|(_, &v)| v)
        .collect();
    if tail.len() < 4 {
        return Err(QwalkError::InsufficientHorizon);
    }
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    if mean < 1e-12 {
        return Ok(PlateauReport {
            plateau: None,
            drift: f64::INFINITY,
            window: (t_lo, t_hi),
        });
    }
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let drift = (max - min) / mean;
    Ok(PlateauReport {
        plateau: (drift < drift_threshold).then_some(mean),
        drift,
        window: (t_lo, t_hi),
    })
}

/// Structural plateau estimate (1 − M/N)^{2n_F}: disjoint twin pairs times
/// the probability none of their four half-slots holds a trap. Ignores
/// disconnection at high dilution and twin correlations at low dilution.
pub fn plateau_estimate(n: usize, m: usize, n_f: usize) -> f64 {
    (1.0 - m as f64 / n as f64).powi(2 * n_f as i32)
}

/// Probability that a fixed node pair of G(N, p) is a twin pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FariaProbability {
    /// The closed form (1−p)^{2N−4} + [1 − 2(1−p)p]^{N−2} as printed in the
    /// literature. Evaluates to 2 at p = 0, so it cannot be a probability of
    /// a single event; reported verbatim for comparison.
    pub closed_form: f64,
    /// Independently derived per-pair twin probability
    /// [p² + (1−p)²]^{N−2}: every other vertex adjacent to both (p²) or to
    /// neither ((1−p)²). This is the Monte Carlo-validated quantity.
    pub per_pair: f64,
}

pub fn faria_probability(n: usize, p: f64) -> FariaProbability {
    let nm2 = (n as i32) - 2;
    FariaProbability {
        closed_form: (1.0 - p).powi(2 * nm2) + (1.0 - 2.0 * (1.0 - p) * p).powi(nm2),
        per_pair: (p * p + (1.0 - p) * (1.0 - p)).powi(nm2),
    }
}

/// Long-time averaged return probabilities χ_{j,j} and their node average χ̄
/// for trap-free quantum dynamics, computed from the real spectrum:
/// χ_{j,j} = Σ_clusters (Σ_{l∈cluster} |⟨j|Φ_l⟩|²)² with clusters decided by
/// |E_l − E_l'| < tol. The classical analogue is 1/N.
#[derive(Debug, Clone)]
pub struct LocalizationReport {
    pub chi_bar: f64,
    pub per_node: Vec<f64>,
    pub tolerance: f64,
    /// χ̄ recomputed at 10× and 0.1× the tolerance, to surface sensitivity
    /// of the degeneracy decision.
    pub chi_bar_loose: f64,
    pub chi_bar_tight: f64,
}

pub const DEFAULT_DEGENERACY_TOL_FACTOR: f64 = 1e-8;

fn chi_per_node(spectrum: &RealSpectrum, tol: f64) -> Vec<f64> {
    let n = spectrum.len();
    let mut chi = vec![0.0; n];
    let mut lo = 0;
    while lo < n {
        let mut hi = lo + 1;
        while hi < n && (spectrum.eigenvalues[hi] - spectrum.eigenvalues[hi - 1]).abs() < tol {
            hi += 1;
        }
        for (j, c) in chi.iter_mut().enumerate() {
            let weight: f64 = (lo..hi)
                .map(|l| {
                    let v = spectrum.eigenvectors[[j, l]];
                    v * v
                })
                .sum();
            *c += weight * weight;
        }
        lo = hi;
    }
    chi
}

pub fn long_time_average(spectrum: &RealSpectrum, tol_factor: f64) -> LocalizationReport {
    let scale = spectrum
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = tol_factor * scale;
    let per_node = chi_per_node(spectrum, tol);
    let n = per_node.len() as f64;
    let avg = |v: &[f64]| v.iter().sum::<f64>() / n;
    LocalizationReport {
        chi_bar: avg(&per_node),
        chi_bar_loose: avg(&chi_per_node(spectrum, 10.0 * tol)),
        chi_bar_tight: avg(&chi_per_node(spectrum, 0.1 * tol)),
        per_node,
        tolerance: tol,
    }
}

/// Ensemble mean and standard error of survival curves over R independent
/// (graph, trap placement) realizations.
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub kind: WalkKind,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Realizations that actually contributed.
    pub r_effective: usize,
    pub realization_seeds: Vec<u64>,
    pub params: ErParams,
    pub m: usize,
    pub gamma: f64,
    pub base_seed: u64,
}

impl EnsembleStats {
    /// The mean curve, reusable with the fit and plateau machinery.
    pub fn mean_curve(&self) -> SurvivalCurve {
        SurvivalCurve {
            kind: self.kind,
            times: self.times.clone(),
            values: self.mean.clone(),
            meta: CurveMeta {
                n: self.params.n,
                p: Some(self.params.p),
                m: self.m,
                gamma: self.gamma,
                graph_seed: Some(self.base_seed),
                trap_seed: Some(self.base_seed),
                oracle_fallback: false,
            },
        }
    }

    /// CSV: `t, mean, stderr, r_effective` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# kind={} n={} p={} m={} gamma={} base_seed={} r={}",
            self.kind, self.params.n, self.params.p, self.m, self.gamma, self.base_seed,
            self.r_effective,
        )?;
        writeln!(w, "# t, mean, stderr, r_effective")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{:.17e}, {:.17e}, {:.17e}, {}",
                self.times[i], self.mean[i], self.stderr[i], self.r_effective
            )?;
        }
        Ok(())
    }
}

/// Pairwise summation, order-independent regardless of thread count because
/// the inputs are indexed before reduction.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Run R independent realizations of one walk kind. Realization i draws its
/// graph and trap placement from seed(base, i), so classical and quantum
/// ensembles with the same base seed share identical substrates. Fails when
/// more than 10% of the realizations fail.
pub fn run_ensemble(
    params: &ErParams,
    m: usize,
    gamma: f64,
    kind: WalkKind,
    grid: &TimeGrid,
    r: usize,
    base_seed: u64,
) -> Result<EnsembleStats> {
    if r < 1 {
        return Err(QwalkError::Config("R must be >= 1".into()));
    }
    let seeds_vec: Vec<u64> = (0..r as u64)
        .map(|i| seeds::realization(base_seed, 0, i))
        .collect();

    let curves: Vec<Result<SurvivalCurve>> = seeds_vec
        .par_iter()
        .map(|&seed| single_realization(params, m, gamma, kind, grid, seed))
        .collect();

    let ok: Vec<&SurvivalCurve> = curves.iter().filter_map(|c| c.as_ref().ok()).collect();
    let failed = r - ok.len();
    if failed * 10 > r || ok.is_empty() {
        return Err(QwalkError::EnsembleFailure { failed, total: r });
    }

    let nt = grid.len();
    let r_eff = ok.len();
    let mut mean = Vec::with_capacity(nt);
    let mut stderr = Vec::with_capacity(nt);
    let mut scratch = vec![0.0; r_eff];
    for i in 0..nt {
        for (s, c) in scratch.iter_mut().zip(&ok) {
            *s = c.values[i];
        }
        let mu = pairwise_sum(&scratch) / r_eff as f64;
        let dev: Vec<f64> = scratch.iter().map(|v| (v - mu) * (v - mu)).collect();
        let var = pairwise_sum(&dev) / r_eff as f64;
        mean.push(mu);
        stderr.push((var / r_eff as f64).sqrt());
    }

    Ok(EnsembleStats {
        kind,
        times: grid.times().to_vec(),
        mean,
        stderr,
        r_effective: r_eff,
        realization_seeds: seeds_vec,
        params: *params,
        m,
        gamma,
        base_seed,
    })
}

/// One (graph, traps) realization and its survival curve.
pub fn single_realization(
    params: &ErParams,
    m: usize,
    gamma: f64,
    kind: WalkKind,
    grid: &TimeGrid,
    seed: u64,
) -> Result<SurvivalCurve> {
    let realization_params = ErParams::new(params.n, params.p, seed)?;
    let draw = generate_er(&realization_params, true, DEFAULT_MAX_ATTEMPTS)?;
    let traps = place_traps(&draw.graph, m, gamma, seed)?;
    let meta = CurveMeta {
        n: params.n,
        p: Some(params.p),
        m,
        gamma,
        graph_seed: Some(seed),
        trap_seed: Some(seed),
        oracle_fallback: false,
    };
    match kind {
        WalkKind::Classical => ctrw_survival(&build_transfer(&draw.graph, &traps), grid, meta),
        WalkKind::Quantum => ctqw_survival(&build_hamiltonian(&draw.graph, &traps), grid, meta),
    }
}

/// Pointwise ratio ⟨a⟩/⟨b⟩ with propagated standard error.
#[derive(Debug, Clone)]
pub struct RatioCurve {
    pub times: Vec<f64>,
    pub ratio: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Set where the denominator fell below 1e−12; the ratio there is NaN.
    pub near_zero: Vec<bool>,
}

impl RatioCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# t, ratio, stderr, near_zero")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{:.17e}, {:.17e}, {:.17e}, {}",
                self.times[i], self.ratio[i], self.stderr[i], self.near_zero[i] as u8
            )?;
        }
        Ok(())
    }
}

pub fn ratio_curves(a: &EnsembleStats, b: &EnsembleStats) -> Result<RatioCurve> {
    if a.times.len() != b.times.len()
        || a.times.iter().zip(&b.times).any(|(x, y)| x != y)
    {
        return Err(QwalkError::GridMismatch(format!(
            "{} vs {} points",
            a.times.len(),
            b.times.len()
        )));
    }
    let mut ratio = Vec::with_capacity(a.times.len());
    let mut stderr = Vec::with_capacity(a.times.len());
    let mut near_zero = Vec::with_capacity(a.times.len());
    for i in 0..a.times.len() {
        let (ma, sa) = (a.mean[i], a.stderr[i]);
        let (mb, sb) = (b.mean[i], b.stderr[i]);
        if mb.abs() < 1e-12 {
            ratio.push(f64::NAN);
            stderr.push(f64::NAN);
            near_zero.push(true);
        } else {
            let r = ma / mb;
            let rel = ((sa / ma).powi(2) + (sb / mb).powi(2)).sqrt();
            ratio.push(r);
            stderr.push((r * rel).abs());
            near_zero.push(false);
        }
    }
    Ok(RatioCurve {
        times: a.times.clone(),
        ratio,
        stderr,
        near_zero,
    })
}
