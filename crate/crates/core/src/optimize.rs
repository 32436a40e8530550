//! Bounded search over varactor capacitances for maximum Tx to Rx power
//! transfer through the loaded surface.
//!
//! The search runs a box-projected Nelder-Mead simplex from several starts
//! (one phase-compensating seed plus seeded random points), optionally
//! followed by a coordinate-wise golden-section polish and a projected
//! gradient refinement. The best start wins; exact ties go to the lowest
//! start index.

use crate::geometry::{Scenario, Side};
use crate::network::{
    power_transfer, reduce_loaded, reduce_loaded_detail, split_blocks, CMatrix, NetworkError,
    ScatterMatrix,
};
use crate::varactor::{cap_to_gamma, dgamma_dcap, LoadBounds, LoadError, LoadVector, VaractorModel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("unoptimizable: no Tx or Rx coupling")]
    NoCoupling,
    #[error("link matrix has no RIS ports")]
    NoElements,
    #[error("{caps} capacitances for {ports} RIS ports")]
    Length { caps: usize, ports: usize },
    #[error("invalid optimizer options: {0}")]
    Options(String),
}

/// `|S_RxTx|^2` of the link after terminating every RIS port with its varactor.
pub fn objective(
    full: &ScatterMatrix,
    caps: &LoadVector,
    bounds: &LoadBounds,
    model: &VaractorModel,
) -> Result<f64, OptimizeError> {
    check_caps(full, caps, bounds)?;
    let loads = caps.to_reflections(full.freq_hz(), full.z0_ohm(), model)?;
    Ok(power_transfer(&reduce_loaded(full, &loads)?)?)
}

/// Objective value and its gradient with respect to each capacitance (1/F).
pub fn objective_gradient(
    full: &ScatterMatrix,
    caps: &LoadVector,
    bounds: &LoadBounds,
    model: &VaractorModel,
) -> Result<(f64, Vec<f64>), OptimizeError> {
    check_caps(full, caps, bounds)?;
    let (f, z0) = (full.freq_hz(), full.z0_ohm());
    let loads = caps.to_reflections(f, z0, model)?;
    let detail = reduce_loaded_detail(full, &loads)?;
    let s21 = detail.reduced[(1, 0)];
    let (_, s_ei, s_ie, s_ii) = split_blocks(full.entries());
    let n = loads.len();
    let g = loads.as_slice();
    let w = &detail.inv_left;
    // v = W S_ie[:, Tx];  u = S_ei[Rx, :] (I + Gamma W S_ii)
    let v = w * s_ie.column(0);
    let mut gws = w * &s_ii;
    for (k, gk) in g.iter().enumerate() {
        for j in 0..n {
            gws[(k, j)] *= *gk;
        }
    }
    gws += CMatrix::identity(n, n);
    let u = s_ei.row(1) * gws;
    let grad = (0..n)
        .map(|k| {
            let dg = dgamma_dcap(caps.as_slice()[k], f, z0, model);
            2.0 * (s21.conj() * u[k] * v[k] * dg).re
        })
        .collect();
    Ok((s21.norm_sqr(), grad))
}

fn check_caps(full: &ScatterMatrix, caps: &LoadVector, bounds: &LoadBounds) -> Result<(), OptimizeError> {
    let ports = full.ris_port_count();
    if caps.len() != ports {
        return Err(OptimizeError::Length {
            caps: caps.len(),
            ports,
        });
    }
    // re-validate against the caller's bounds
    LoadVector::new(caps.as_slice().to_vec(), bounds)?;
    Ok(())
}

/// Capacitance whose reflection phase is closest (circularly) to `target`.
fn cap_for_phase(target: f64, bounds: &LoadBounds, f: f64, z0: f64, model: &VaractorModel) -> f64 {
    let phase = |c: f64| cap_to_gamma(c, f, z0, model).arg();
    let dist = |a: f64, b: f64| (a - b + PI).rem_euclid(2.0 * PI) - PI;
    let (lo, hi) = (bounds.c_min(), bounds.c_max());
    // phase decreases with C: p(lo) >= p(hi) modulo wrap
    let p_lo = phase(lo);
    let span = dist(p_lo, phase(hi)).rem_euclid(2.0 * PI);
    let offset = dist(p_lo, target).rem_euclid(2.0 * PI);
    if offset > span {
        // outside the reachable arc: snap to the nearer end
        let to_lo = dist(target, p_lo).abs();
        let to_hi = dist(target, phase(hi)).abs();
        return if to_lo <= to_hi { lo } else { hi };
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if dist(p_lo, phase(mid)).rem_euclid(2.0 * PI) < offset {
            a = mid;
        } else {
            b = mid;
        }
    }
    bounds.clamp(0.5 * (a + b))
}

/// Seed loads from the required phase per element. `path_phase[m]` is the
/// phase the element must add; a common offset is chosen to keep as many
/// targets inside the reachable arc as possible.
fn seed_from_targets(
    path_phase: &[f64],
    bounds: &LoadBounds,
    f: f64,
    z0: f64,
    model: &VaractorModel,
) -> Vec<f64> {
    const OFFSETS: usize = 720;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..OFFSETS {
        let offset = 2.0 * PI * k as f64 / OFFSETS as f64;
        let caps: Vec<f64> = path_phase
            .iter()
            .map(|p| cap_for_phase(p + offset, bounds, f, z0, model))
            .collect();
        let cost: f64 = caps
            .iter()
            .zip(path_phase)
            .map(|(&c, p)| 1.0 - (cap_to_gamma(c, f, z0, model).arg() - (p + offset)).cos())
            .sum();
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, caps));
        }
    }
    best.map(|(_, c)| c).unwrap_or_default()
}

/// Phase-compensating initial loads: each element's reflection phase
/// cancels the Tx + Rx path phase `2 pi (d_tx + d_rx) / lambda`.
pub fn phase_gradient_seed(
    scn: &Scenario,
    bounds: &LoadBounds,
    model: &VaractorModel,
    z0_ohm: f64,
) -> LoadVector {
    let k = 2.0 * PI / scn.wavelength_m();
    let phases: Vec<f64> = scn
        .elements()
        .iter()
        .map(|el| k * (scn.distance(el, Side::Tx) + scn.distance(el, Side::Rx)))
        .collect();
    let caps = seed_from_targets(&phases, bounds, scn.freq_hz(), z0_ohm, model);
    LoadVector::new(caps, bounds).expect("seed is clamped to bounds")
}

/// Same idea as [`phase_gradient_seed`] but read off the coupling entries
/// of an assembled or ingested link matrix.
pub fn coupling_phase_seed(
    full: &ScatterMatrix,
    bounds: &LoadBounds,
    model: &VaractorModel,
) -> Result<LoadVector, OptimizeError> {
    if !full.is_link() {
        return Err(NetworkError::Shape {
            expected: "Tx + RIS + Rx link",
            got: format!("{} ports", full.dim()),
        }
        .into());
    }
    let n = full.dim() - 2;
    let phases: Vec<f64> = (1..=n)
        .map(|m| -(full.get(m, 0) * full.get(n + 1, m)).arg())
        .collect();
    let caps = seed_from_targets(&phases, bounds, full.freq_hz(), full.z0_ohm(), model);
    Ok(LoadVector::new(caps, bounds)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub starts: usize,
    /// Nelder-Mead evaluation budget per start.
    pub max_evals: usize,
    pub seed: u64,
    pub polish: bool,
    pub gradient_refine: bool,
    /// Relative objective spread at which a simplex counts as converged.
    pub ftol: f64,
    /// Deterministic first start; derived from the coupling phases if absent.
    pub initial: Option<LoadVector>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            max_evals: 2000,
            seed: 0,
            polish: true,
            gradient_refine: false,
            ftol: 1e-10,
            initial: None,
        }
    }
}

/// One point of the optimization history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub start: usize,
    /// Objective evaluations spent in this start so far.
    pub evaluations: usize,
    /// Best objective within this start.
    pub objective: f64,
    /// Best objective over all starts up to this entry.
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartSummary {
    pub initial_caps: Vec<f64>,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub caps: LoadVector,
    pub objective: f64,
    pub best_start: usize,
    pub starts: Vec<StartSummary>,
    pub trace: Vec<TraceEntry>,
}

/// Objective on the unit box, counting evaluations. Failed evaluations
/// (ill-conditioned loading) score as `-inf`.
struct BoxObjective<'a> {
    full: &'a ScatterMatrix,
    bounds: &'a LoadBounds,
    model: &'a VaractorModel,
    evals: usize,
}

impl BoxObjective<'_> {
    fn caps(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| self.bounds.from_unit(x)).collect()
    }

    fn value(&mut self, u: &[f64]) -> f64 {
        self.evals += 1;
        let caps = LoadVector::new(self.caps(u), self.bounds).expect("from_unit clamps");
        objective(self.full, &caps, self.bounds, self.model).unwrap_or(f64::NEG_INFINITY)
    }

    fn gradient(&mut self, u: &[f64]) -> Option<(f64, Vec<f64>)> {
        self.evals += 1;
        let caps = LoadVector::new(self.caps(u), self.bounds).ok()?;
        let (f, g) = objective_gradient(self.full, &caps, self.bounds, self.model).ok()?;
        let scale = self.bounds.c_max() - self.bounds.c_min();
        Some((f, g.into_iter().map(|x| x * scale).collect()))
    }
}

fn project(u: &mut [f64]) {
    for x in u {
        *x = x.clamp(0.0, 1.0);
    }
}

fn converged(spread: f64, best: f64, ftol: f64) -> bool {
    spread <= ftol * best.abs() || spread == 0.0
}

/// Box-projected Nelder-Mead maximizing `obj`, restarted from the incumbent
/// until a restart no longer improves it or the budget runs out.
fn nelder_mead(
    obj: &mut BoxObjective,
    x0: &[f64],
    f0: f64,
    budget: usize,
    ftol: f64,
    record: &mut impl FnMut(usize, f64),
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let (mut best_x, mut best_f) = (x0.to_vec(), f0);
    let start_evals = obj.evals;
    let spent = |o: &BoxObjective| o.evals - start_evals;
    loop {
        let round_start = best_f;
        // minimize -f
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), -best_f));
        for i in 0..n {
            let mut v = best_x.clone();
            v[i] = if v[i] + 0.1 <= 1.0 { v[i] + 0.1 } else { v[i] - 0.1 };
            let fv = -obj.value(&v);
            simplex.push((v, fv));
        }
        while spent(obj) < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (fb, fw) = (simplex[0].1, simplex[n].1);
            record(obj.evals, -fb);
            if converged(fw - fb, fb, ftol) {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (v, _) in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / n as f64;
                }
            }
            let along = |t: f64, from: &[f64]| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(from)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                project(&mut p);
                p
            };
            let worst = simplex[n].0.clone();
            let xr = along(1.0, &worst);
            let fr = -obj.value(&xr);
            if fr < fb {
                let xe = along(2.0, &worst);
                let fe = -obj.value(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < fw {
                    let xc = along(0.5, &worst);
                    let fc = -obj.value(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-0.5, &worst);
                    let fc = -obj.value(&xc);
                    (xc, fc)
                };
                if fc < fw.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for (v, fv) in simplex.iter_mut().skip(1) {
                        for (x, b) in v.iter_mut().zip(&best) {
                            *x = b + 0.5 * (*x - b);
                        }
                        *fv = -obj.value(v);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if -simplex[0].1 > best_f {
            best_f = -simplex[0].1;
            best_x = simplex[0].0.clone();
        }
        record(obj.evals, best_f);
        let gain = best_f - round_start;
        if spent(obj) >= budget || converged(gain, best_f, ftol) {
            return (best_x, best_f);
        }
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Cyclic coordinate ascent with golden-section line searches over [0, 1],
/// endpoints included.
fn golden_polish(
    obj: &mut BoxObjective,
    x: &mut [f64],
    f: &mut f64,
    ftol: f64,
    record: &mut impl FnMut(usize, f64),
) {
    for _sweep in 0..50 {
        let before = *f;
        for i in 0..x.len() {
            let mut probe = x.to_vec();
            let mut eval = |t: f64, obj: &mut BoxObjective| {
                probe[i] = t;
                obj.value(&probe)
            };
            let (mut a, mut b) = (0.0, 1.0);
            let mut c = b - GOLDEN * (b - a);
            let mut d = a + GOLDEN * (b - a);
            let mut fc = eval(c, obj);
            let mut fd = eval(d, obj);
            while b - a > 1e-10 {
                if fc > fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - GOLDEN * (b - a);
                    fc = eval(c, obj);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + GOLDEN * (b - a);
                    fd = eval(d, obj);
                }
            }
            let candidates = [(c, fc), (d, fd), (0.0, eval(0.0, obj)), (1.0, eval(1.0, obj))];
            for (t, ft) in candidates {
                if ft > *f {
                    *f = ft;
                    x[i] = t;
                }
            }
        }
        record(obj.evals, *f);
        if converged(*f - before, *f, ftol) {
            break;
        }
    }
}

/// Projected gradient ascent with an adaptive step.
fn gradient_refine(obj: &mut BoxObjective, x: &mut Vec<f64>, f: &mut f64, ftol: f64) {
    let Some((_, mut g)) = obj.gradient(x) else {
        return;
    };
    let mut step = 1e-2 / g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    for _ in 0..500 {
        let mut trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi).collect();
        project(&mut trial);
        let ft = obj.value(&trial);
        if ft > *f {
            let gain = ft - *f;
            *x = trial;
            *f = ft;
            step *= 2.0;
            if converged(gain, *f, ftol) {
                break;
            }
            match obj.gradient(x) {
                Some((_, ng)) => g = ng,
                None => break,
            }
        } else {
            step *= 0.5;
            if step < 1e-300 {
                break;
            }
        }
    }
}

struct StartOutcome {
    x: Vec<f64>,
    summary: StartSummary,
    trace: Vec<(usize, f64)>,
}

fn run_start(
    full: &ScatterMatrix,
    bounds: &LoadBounds,
    model: &VaractorModel,
    opts: &OptimizeOptions,
    x0: Vec<f64>,
) -> StartOutcome {
    let mut obj = BoxObjective {
        full,
        bounds,
        model,
        evals: 0,
    };
    let mut trace = Vec::new();
    let f0 = obj.value(&x0);
    let initial_caps = obj.caps(&x0);
    let mut best_trace = f0;
    let mut record = |evals: usize, f: f64| {
        best_trace = best_trace.max(f);
        trace.push((evals, best_trace));
    };
    let (mut x, mut f) = nelder_mead(&mut obj, &x0, f0, opts.max_evals, opts.ftol, &mut record);
    if opts.polish {
        golden_polish(&mut obj, &mut x, &mut f, opts.ftol, &mut record);
    }
    if opts.gradient_refine {
        gradient_refine(&mut obj, &mut x, &mut f, opts.ftol);
    }
    let evaluations = obj.evals;
    record(evaluations, f);
    StartOutcome {
        x,
        summary: StartSummary {
            initial_caps,
            initial_objective: f0,
            final_objective: f,
            evaluations,
        },
        trace,
    }
}

/// Multi-start bounded maximization of [`objective`].
pub fn optimize(
    full: &ScatterMatrix,
    bounds: &LoadBounds,
    model: &VaractorModel,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, OptimizeError> {
    if !full.is_link() {
        return Err(NetworkError::Shape {
            expected: "Tx + RIS + Rx link",
            got: format!("{} ports", full.dim()),
        }
        .into());
    }
    let n = full.dim() - 2;
    if n == 0 {
        return Err(OptimizeError::NoElements);
    }
    if opts.starts == 0 || opts.max_evals == 0 || !(opts.ftol >= 0.0) {
        return Err(OptimizeError::Options(
            "starts and max_evals must be positive, ftol non-negative".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let tx_dead = (1..=n).all(|m| full.get(m, 0) == zero && full.get(0, m) == zero);
    let rx_dead = (1..=n).all(|m| full.get(m, n + 1) == zero && full.get(n + 1, m) == zero);
    if tx_dead || rx_dead {
        return Err(OptimizeError::NoCoupling);
    }

    let seed_caps = match &opts.initial {
        Some(v) => {
            check_caps(full, v, bounds)?;
            v.clone()
        }
        None => coupling_phase_seed(full, bounds, model)?,
    };
    let mut starts: Vec<Vec<f64>> = vec![seed_caps.as_slice().iter().map(|&c| bounds.to_unit(c)).collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 1..opts.starts {
        starts.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }

    let outcomes: Vec<StartOutcome> = run_all(full, bounds, model, opts, starts);

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.summary.final_objective > outcomes[best].summary.final_objective {
            best = i;
        }
    }
    let mut trace = Vec::new();
    let mut global = f64::NEG_INFINITY;
    for (start, o) in outcomes.iter().enumerate() {
        for &(evaluations, objective) in &o.trace {
            global = global.max(objective);
            trace.push(TraceEntry {
                start,
                evaluations,
                objective,
                best_so_far: global,
            });
        }
    }
    let caps: Vec<f64> = outcomes[best].x.iter().map(|&u| bounds.from_unit(u)).collect();
    assert!(caps.iter().all(|&c| bounds.contains(c)), "optimizer left the bounds");
    let caps = LoadVector::new(caps, bounds)?;
    let objective = outcomes[best].summary.final_objective;
    Ok(OptimizeResult {
        caps,
        objective,
        best_start: best,
        starts: outcomes.into_iter().map(|o| o.summary).collect(),
        trace,
    })
}

#[cfg(feature = "parallel")]
fn run_all(
    full: &ScatterMatrix,
    bounds: &LoadBounds,
    model: &VaractorModel,
    opts: &OptimizeOptions,
    starts: Vec<Vec<f64>>,
) -> Vec<StartOutcome> {
    use rayon::prelude::*;
    starts
        .into_par_iter()
        .map(|x0| run_start(full, bounds, model, opts, x0))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(
    full: &ScatterMatrix,
    bounds: &LoadBounds,
    model: &VaractorModel,
    opts: &OptimizeOptions,
    starts: Vec<Vec<f64>>,
) -> Vec<StartOutcome> {
    starts
        .into_iter()
        .map(|x0| run_start(full, bounds, model, opts, x0))
        .collect()
}
