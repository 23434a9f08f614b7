use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::propagate::hermitian_exp;
use super::sequence::{PulseSegment, PulseSequence};
use crate::error::{Error, Result};
use crate::format;
use crate::nmr::{internal_hamiltonian, SpinSystem};
use crate::qstate::{tol, CMatrix, Operator, C64};

/// Default RF amplitude cap, rad/s.
pub const DEFAULT_MAX_AMPLITUDE: f64 = 2.0 * PI * 10e3;

/// How GRAPE seeds its first iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialControls {
    Zero,
    /// Uniform in `±fraction · max_amplitude` from a seeded generator.
    Random { seed: u64, fraction: f64 },
}

#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub target: Operator,
    pub n_segments: usize,
    pub dt: f64,
    pub max_amplitude: f64,
    pub rf_scales: Vec<f64>,
    pub stop_fidelity: f64,
    pub max_iterations: usize,
    pub initial: InitialControls,
    /// Random starts screened before the main run (1 disables screening).
    pub starts: usize,
    pub screen_iterations: usize,
}

impl ControlProblem {
    /// Defaults: 2π·10 kHz cap, scales {0.95, 1, 1.05}, stop at 0.999,
    /// 2000 iterations, best of 4 random starts (seed 1) after 40 iterations.
    pub fn new(target: Operator, n_segments: usize, dt: f64) -> Self {
        ControlProblem {
            target,
            n_segments,
            dt,
            max_amplitude: DEFAULT_MAX_AMPLITUDE,
            rf_scales: vec![0.95, 1.0, 1.05],
            stop_fidelity: 0.999,
            max_iterations: 2000,
            initial: InitialControls::Random { seed: 1, fraction: 1.0 },
            starts: 4,
            screen_iterations: 40,
        }
    }

    pub fn duration(&self) -> f64 {
        self.n_segments as f64 * self.dt
    }

    pub fn validate(&self, sys: &SpinSystem) -> Result<()> {
        if !self.target.is_unitary(tol::STRUCTURAL) {
            return Err(Error::InvalidArgument("GRAPE target must be unitary".into()));
        }
        if self.target.dim() != 1 << sys.n_spins() {
            return Err(Error::DimensionMismatch { expected: 1 << sys.n_spins(), found: self.target.dim() });
        }
        if self.n_segments == 0 {
            return Err(Error::InvalidArgument("GRAPE needs at least one segment".into()));
        }
        if !(self.dt >= 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("segment length {} must be non-negative", self.dt)));
        }
        if !(self.max_amplitude > 0.0) {
            return Err(Error::InvalidArgument("max_amplitude must be positive".into()));
        }
        if self.rf_scales.is_empty() {
            return Err(Error::InvalidArgument("rf_scales must not be empty".into()));
        }
        Ok(())
    }
}

/// Piecewise-constant amplitudes in rad/s, indexed `[segment][spin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    pub dt: f64,
    pub ux: Vec<Vec<f64>>,
    pub uy: Vec<Vec<f64>>,
}

impl ControlField {
    pub fn zeros(n_segments: usize, n_spins: usize, dt: f64) -> Self {
        ControlField { dt, ux: vec![vec![0.0; n_spins]; n_segments], uy: vec![vec![0.0; n_spins]; n_segments] }
    }

    pub fn n_segments(&self) -> usize {
        self.ux.len()
    }

    pub fn n_spins(&self) -> usize {
        self.ux.first().map_or(0, Vec::len)
    }

    /// Channel `c` is spin `c / 2`, x for even and y for odd.
    pub fn get(&self, segment: usize, channel: usize) -> f64 {
        let spin = channel / 2;
        if channel % 2 == 0 {
            self.ux[segment][spin]
        } else {
            self.uy[segment][spin]
        }
    }

    pub fn set(&mut self, segment: usize, channel: usize, value: f64) {
        let spin = channel / 2;
        if channel % 2 == 0 {
            self.ux[segment][spin] = value;
        } else {
            self.uy[segment][spin] = value;
        }
    }

    fn to_flat(&self) -> Vec<f64> {
        let n = self.n_spins();
        let mut out = Vec::with_capacity(self.n_segments() * 2 * n);
        for k in 0..self.n_segments() {
            for c in 0..2 * n {
                out.push(self.get(k, c));
            }
        }
        out
    }

    fn from_flat(flat: &[f64], n_segments: usize, n_spins: usize, dt: f64) -> Self {
        let mut f = ControlField::zeros(n_segments, n_spins, dt);
        for k in 0..n_segments {
            for c in 0..2 * n_spins {
                f.set(k, c, flat[k * 2 * n_spins + c]);
            }
        }
        f
    }

    pub fn to_sequence(&self, sys: &SpinSystem) -> Result<PulseSequence> {
        let mut seq = PulseSequence::new(sys.clone());
        for (ux, uy) in self.ux.iter().zip(&self.uy) {
            seq.push(PulseSegment::RfSlice { duration: self.dt, ux: ux.clone(), uy: uy.clone() })?;
        }
        Ok(seq)
    }

    /// `segment_index,duration_s,channel,u_x,u_y` with one row per segment and spin.
    pub fn to_csv(&self, sys: &SpinSystem) -> Result<String> {
        let labels = sys.labels();
        if labels.len() != self.n_spins() {
            return Err(Error::DimensionMismatch { expected: labels.len(), found: self.n_spins() });
        }
        let rows = (0..self.n_segments()).flat_map(|k| {
            labels.iter().enumerate().map(move |(s, name)| {
                [k.to_string(), format::num(self.dt), name.clone(), format::num(self.ux[k][s]), format::num(self.uy[k][s])]
            })
        });
        format::csv_string(&["segment_index", "duration_s", "channel", "u_x", "u_y"], rows)
    }
}

#[derive(Debug, Clone)]
pub struct GrapeResult {
    pub field: ControlField,
    pub fidelity_per_scale: Vec<f64>,
    /// Scale-averaged objective Φ.
    pub average_fidelity: f64,
    pub worst_fidelity: f64,
    /// Accepted iterations (0 when the start already meets the stop fidelity).
    pub iterations: usize,
    pub converged: bool,
    /// Φ after each accepted iteration, starting with the initial value.
    pub history: Vec<f64>,
}

/// Objective, per-scale fidelities and optional gradient for a control field.
struct Evaluator<'a> {
    h0: CMatrix,
    target_adj: CMatrix,
    problem: &'a ControlProblem,
    n_spins: usize,
}

struct Evaluation {
    per_scale: Vec<f64>,
    grad: Option<Vec<f64>>,
}

impl Evaluation {
    fn average(&self) -> f64 {
        self.per_scale.iter().sum::<f64>() / self.per_scale.len() as f64
    }
}

impl<'a> Evaluator<'a> {
    fn new(problem: &'a ControlProblem, sys: &SpinSystem) -> Self {
        Evaluator {
            h0: internal_hamiltonian(sys).into_matrix(),
            target_adj: problem.target.matrix().adjoint(),
            problem,
            n_spins: sys.n_spins(),
        }
    }

    fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Rows of `I_{x|y,k} · V` without forming the single-spin operator.
    fn apply_control(&self, channel: usize, v: &CMatrix) -> CMatrix {
        let n = self.n_spins;
        let spin = channel / 2;
        let mask = 1 << (n - 1 - spin);
        let mut out = CMatrix::zeros(v.nrows(), v.ncols());
        for r in 0..v.nrows() {
            let src = r ^ mask;
            // ⟨r|I_x|src⟩ = 1/2; ⟨r|I_y|src⟩ = −i/2 if r has bit 0, +i/2 otherwise
            let coeff = if channel % 2 == 0 {
                C64::new(0.5, 0.0)
            } else if r & mask == 0 {
                C64::new(0.0, -0.5)
            } else {
                C64::new(0.0, 0.5)
            };
            for col in 0..v.ncols() {
                out[(r, col)] = coeff * v[(src, col)];
            }
        }
        out
    }

    fn segment_hamiltonian(&self, flat: &[f64], k: usize, scale: f64) -> CMatrix {
        let n = self.n_spins;
        let d = self.dim();
        let mut h = self.h0.clone();
        for spin in 0..n {
            let ux = scale * flat[k * 2 * n + 2 * spin];
            let uy = scale * flat[k * 2 * n + 2 * spin + 1];
            if ux == 0.0 && uy == 0.0 {
                continue;
            }
            let mask = 1 << (n - 1 - spin);
            for r in 0..d {
                if r & mask == 0 {
                    // ⟨r|ux I_x + uy I_y|r⊕mask⟩ with r holding bit 0
                    let z = C64::new(0.5 * ux, -0.5 * uy);
                    h[(r, r | mask)] += z;
                    h[(r | mask, r)] += z.conj();
                }
            }
        }
        h
    }

    fn eval_scale(&self, flat: &[f64], scale: f64, want_grad: bool) -> (f64, Option<Vec<f64>>) {
        let p = self.problem;
        let d = self.dim();
        let dt = p.dt;
        let segs: Vec<_> = (0..p.n_segments).map(|k| hermitian_exp(&self.segment_hamiltonian(flat, k, scale), dt)).collect();
        // forward[k] = U_k … U_1 (forward[0] = 1)
        let mut forward = Vec::with_capacity(p.n_segments + 1);
        forward.push(CMatrix::identity(d, d));
        for s in &segs {
            let next = &s.propagator * forward.last().unwrap();
            forward.push(next);
        }
        let overlap = (&self.target_adj * forward.last().unwrap()).trace();
        let d2 = (d * d) as f64;
        let fid = overlap.norm_sqr() / d2;
        if !want_grad {
            return (fid, None);
        }
        let n_ch = 2 * self.n_spins;
        let mut grad = vec![0.0; p.n_segments * n_ch];
        // back = T† U_N … U_{k+1}
        let mut back = self.target_adj.clone();
        for k in (0..p.n_segments).rev() {
            let seg = &segs[k];
            let v = &seg.vectors;
            let vadj = v.adjoint();
            // Tr(T† X dU P) = Tr(B dU) with B = P · T† X
            let b = &forward[k] * &back;
            let bp = &vadj * b * v;
            let lam = &seg.eigenvalues;
            // Daleckii–Krein kernel of exp(−i λ dt)
            let gamma = CMatrix::from_fn(d, d, |a, c| {
                let (la, lc) = (lam[a], lam[c]);
                let ea = C64::from_polar(1.0, -la * dt);
                if (la - lc).abs() * dt > 1e-8 {
                    (ea - C64::from_polar(1.0, -lc * dt)) / (la - lc)
                } else {
                    // first-order expansion around the midpoint
                    let mid = C64::from_polar(1.0, -0.5 * (la + lc) * dt);
                    mid * C64::new(0.0, -dt)
                }
            });
            // W_ca = B'_ca Γ_ac so that dTr = Σ_ac W_ca Hc'_ac
            let w = CMatrix::from_fn(d, d, |c, a| bp[(c, a)] * gamma[(a, c)]);
            for ch in 0..n_ch {
                let hc = &vadj * self.apply_control(ch, v);
                let mut dtr = C64::default();
                for a in 0..d {
                    for c in 0..d {
                        dtr += w[(c, a)] * hc[(a, c)];
                    }
                }
                dtr *= scale;
                grad[k * n_ch + ch] = 2.0 * (overlap.conj() * dtr).re / d2;
            }
            back = back * &seg.propagator;
        }
        (fid, Some(grad))
    }

    fn evaluate(&self, flat: &[f64], want_grad: bool) -> Evaluation {
        let results: Vec<(f64, Option<Vec<f64>>)> =
            self.problem.rf_scales.par_iter().map(|&s| self.eval_scale(flat, s, want_grad)).collect();
        let m = results.len() as f64;
        let per_scale = results.iter().map(|r| r.0).collect();
        let grad = want_grad.then(|| {
            let mut g = vec![0.0; flat.len()];
            for (_, rg) in &results {
                for (gi, ri) in g.iter_mut().zip(rg.as_ref().unwrap()) {
                    *gi += ri / m;
                }
            }
            g
        });
        Evaluation { per_scale, grad }
    }
}

fn initial_flat(init: InitialControls, max_amplitude: f64, len: usize) -> Vec<f64> {
    match init {
        InitialControls::Zero => vec![0.0; len],
        InitialControls::Random { seed, fraction } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = fraction.abs().min(1.0) * max_amplitude;
            (0..len).map(|_| if a > 0.0 { rng.random_range(-a..=a) } else { 0.0 }).collect()
        }
    }
}

/// Maximizes Φ = mean over scales of `|Tr(T† U_s)|²/d²` with exact
/// gradients. Amplitudes are parametrized as `u = u_max·sin θ`, so the cap
/// holds without clipping. Directions come from limited-memory BFGS over θ
/// and the step length adapts by backtracking: a trial is accepted only when
/// Φ rises by the Armijo margin, so Φ never decreases.
///
/// With random initial controls, `starts` seeds (`seed`, `seed + 1`, …) are
/// each run for `screen_iterations` and the best one is continued.
pub fn grape_optimize(problem: &ControlProblem, sys: &SpinSystem) -> Result<GrapeResult> {
    problem.validate(sys)?;
    let n = sys.n_spins();
    let len = problem.n_segments * 2 * n;
    let eval = Evaluator::new(problem, sys);

    let seeds: Vec<InitialControls> = match problem.initial {
        InitialControls::Zero => vec![InitialControls::Zero],
        InitialControls::Random { seed, fraction } => (0..problem.starts.max(1) as u64)
            .map(|k| InitialControls::Random { seed: seed.wrapping_add(k), fraction })
            .collect(),
    };
    let screen = if seeds.len() > 1 { problem.screen_iterations.min(problem.max_iterations) } else { 0 };
    let mut best: Option<Ascent> = None;
    for init in seeds {
        let mut run = Ascent::new(&eval, initial_flat(init, problem.max_amplitude, len));
        run.advance(&eval, screen);
        if best.as_ref().is_none_or(|b| run.phi > b.phi) {
            best = Some(run);
        }
    }
    let mut run = best.expect("at least one start");
    run.advance(&eval, problem.max_iterations);

    let per_scale = run.cur.per_scale.clone();
    let worst = per_scale.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GrapeResult {
        field: ControlField::from_flat(&run.controls(), problem.n_segments, n, problem.dt),
        fidelity_per_scale: per_scale,
        average_fidelity: run.phi,
        worst_fidelity: worst,
        iterations: run.iterations,
        converged: run.phi >= problem.stop_fidelity,
        history: run.history,
    })
}

/// One ascent trajectory; can be paused and resumed.
struct Ascent {
    theta: Vec<f64>,
    amax: f64,
    stop: f64,
    cur: Evaluation,
    phi: f64,
    grad: Vec<f64>,
    history: Vec<f64>,
    iterations: usize,
    memory: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    stuck: bool,
}

impl Ascent {
    fn new(eval: &Evaluator, u0: Vec<f64>) -> Self {
        let amax = eval.problem.max_amplitude;
        let theta: Vec<f64> = u0.into_iter().map(|u| (u / amax).clamp(-1.0, 1.0).asin()).collect();
        let mut run = Ascent {
            theta,
            amax,
            stop: eval.problem.stop_fidelity,
            cur: Evaluation { per_scale: Vec::new(), grad: None },
            phi: 0.0,
            grad: Vec::new(),
            history: Vec::new(),
            iterations: 0,
            memory: VecDeque::new(),
            stuck: false,
        };
        let (cur, grad) = run.evaluate(eval, &run.theta.clone());
        run.phi = cur.average();
        run.history.push(run.phi);
        run.cur = cur;
        run.grad = grad;
        run
    }

    fn controls_of(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|t| self.amax * t.sin()).collect()
    }

    fn controls(&self) -> Vec<f64> {
        self.controls_of(&self.theta)
    }

    /// Evaluation at θ with the gradient carried through `u = u_max sin θ`.
    fn evaluate(&self, eval: &Evaluator, theta: &[f64]) -> (Evaluation, Vec<f64>) {
        let e = eval.evaluate(&self.controls_of(theta), true);
        let g = theta.iter().zip(e.grad.as_ref().unwrap()).map(|(t, g)| g * self.amax * t.cos()).collect();
        (e, g)
    }

    /// Runs until `limit` accepted iterations, convergence or a stall.
    fn advance(&mut self, eval: &Evaluator, limit: usize) {
        while self.phi < self.stop && self.iterations < limit && !self.stuck {
            self.step(eval);
        }
    }

    fn step(&mut self, eval: &Evaluator) {
        let gnorm = norm(&self.grad);
        if gnorm == 0.0 {
            self.stuck = true;
            return;
        }
        let mut dir = lbfgs_direction(&self.grad, &self.memory);
        let mut slope = dot(&dir, &self.grad);
        if self.memory.is_empty() || slope <= 0.0 {
            self.memory.clear();
            // steepest ascent, moving θ by about 0.1 rad
            dir = self.grad.iter().map(|g| g * 0.1 / gnorm).collect();
            slope = dot(&dir, &self.grad);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = self.theta.iter().zip(&dir).map(|(t, d)| t + alpha * d).collect();
            let value = eval.evaluate(&self.controls_of(&trial), false).average();
            if value > self.phi + 1e-4 * alpha * slope {
                accepted = Some((trial, value));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, value)) = accepted else {
            if self.memory.is_empty() {
                self.stuck = true;
            }
            // otherwise drop stale curvature and retry from steepest ascent
            self.memory.clear();
            return;
        };
        let (next, next_grad) = self.evaluate(eval, &trial);
        // curvature pair for minimizing −Φ
        let s_k: Vec<f64> = trial.iter().zip(&self.theta).map(|(a, b)| a - b).collect();
        let y_k: Vec<f64> = self.grad.iter().zip(&next_grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s_k, &y_k);
        if sy > 1e-12 * norm(&s_k) * norm(&y_k) {
            if self.memory.len() == LBFGS_MEMORY {
                self.memory.pop_front();
            }
            self.memory.push_back((s_k, y_k, 1.0 / sy));
        }
        self.theta = trial;
        self.phi = value;
        self.cur = next;
        self.grad = next_grad;
        self.iterations += 1;
        self.history.push(value);
    }
}

const LBFGS_MEMORY: usize = 12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two-loop recursion; returns an ascent direction for Φ.
fn lbfgs_direction(grad: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q
}

/// Analytic `∂Φ/∂u` for one segment and channel.
pub fn analytic_gradient(problem: &ControlProblem, sys: &SpinSystem, controls: &ControlField, segment: usize, channel: usize) -> Result<f64> {
    check_indices(problem, sys, controls, segment, channel)?;
    let eval = Evaluator::new(problem, sys);
    let flat = controls.to_flat();
    Ok(eval.evaluate(&flat, true).grad.unwrap()[segment * 2 * sys.n_spins() + channel])
}

/// Objective Φ for a given field.
pub fn objective(problem: &ControlProblem, sys: &SpinSystem, controls: &ControlField) -> Result<Vec<f64>> {
    problem.validate(sys)?;
    if controls.n_segments() != problem.n_segments || controls.n_spins() != sys.n_spins() {
        return Err(Error::DimensionMismatch { expected: problem.n_segments, found: controls.n_segments() });
    }
    Ok(Evaluator::new(problem, sys).evaluate(&controls.to_flat(), false).per_scale)
}

fn check_indices(problem: &ControlProblem, sys: &SpinSystem, controls: &ControlField, segment: usize, channel: usize) -> Result<()> {
    problem.validate(sys)?;
    if controls.n_segments() != problem.n_segments || controls.n_spins() != sys.n_spins() {
        return Err(Error::DimensionMismatch { expected: problem.n_segments, found: controls.n_segments() });
    }
    if segment >= problem.n_segments || channel >= 2 * sys.n_spins() {
        return Err(Error::InvalidArgument(format!("segment {segment} / channel {channel} out of range")));
    }
    Ok(())
}

/// Result of comparing the analytic gradient to central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub analytic: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

/// Central-difference check with step `1e−6 · max_amplitude`.
pub fn gradient_check(problem: &ControlProblem, sys: &SpinSystem, controls: &ControlField, segment: usize, channel: usize) -> Result<GradientCheck> {
    gradient_check_with_step(problem, sys, controls, segment, channel, 1e-6)
}

/// As [`gradient_check`] with the step given as a fraction of `max_amplitude`.
pub fn gradient_check_with_step(
    problem: &ControlProblem,
    sys: &SpinSystem,
    controls: &ControlField,
    segment: usize,
    channel: usize,
    fraction: f64,
) -> Result<GradientCheck> {
    check_indices(problem, sys, controls, segment, channel)?;
    let eval = Evaluator::new(problem, sys);
    let mut flat = controls.to_flat();
    let idx = segment * 2 * sys.n_spins() + channel;
    let analytic = eval.evaluate(&flat, true).grad.unwrap()[idx];
    let h = fraction * problem.max_amplitude;
    let base = flat[idx];
    flat[idx] = base + h;
    let up = eval.evaluate(&flat, false).average();
    flat[idx] = base - h;
    let down = eval.evaluate(&flat, false).average();
    let fd = (up - down) / (2.0 * h);
    // below this the difference quotient is pure roundoff
    let floor = 100.0 * f64::EPSILON / h;
    let scale = analytic.abs().max(fd.abs());
    let relative_error = if scale < floor { 0.0 } else { (analytic - fd).abs() / scale };
    Ok(GradientCheck { analytic, finite_difference: fd, relative_error })
}
