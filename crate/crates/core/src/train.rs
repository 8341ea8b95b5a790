//! Adam training of QAOA parameters with parameter-shift gradients.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{build_qaoa, Circuit, ParamBinding};
use crate::encodings::{success_probability, DiagonalCost, EncodingKind, SuccessProbability, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::gates::{GateKind, ShiftRule};
use crate::graph::Graph;
use crate::sim::Statevector;

pub const FINITE_DIFF_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GradientMethod {
    ParamShift,
    FiniteDiff,
}

impl FromStr for GradientMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "paramshift" | "shift" => Ok(GradientMethod::ParamShift),
            "finitediff" | "fd" => Ok(GradientMethod::FiniteDiff),
            _ => Err(Error::UnknownGradientMethod(s.to_string())),
        }
    }
}

/// A scalar function of circuit parameters that knows which gate angles depend
/// on which parameter, so gradients can be taken gate by gate.
pub trait Objective: Sync {
    fn num_params(&self) -> usize;

    fn evaluate(&self, params: &[f64]) -> Result<f64>;

    /// `(gate index, binding, gate kind)` for every parameter-dependent gate.
    fn bound_gates(&self) -> Vec<(usize, ParamBinding, GateKind)> {
        Vec::new()
    }

    /// Objective with `delta` added to the angle of one gate.
    fn evaluate_gate_shift(&self, params: &[f64], _gate: usize, _delta: f64) -> Result<f64> {
        self.evaluate(params)
    }
}

/// Gradient and the number of objective evaluations spent on it.
pub fn gradient(objective: &dyn Objective, params: &[f64], method: GradientMethod) -> Result<(Vec<f64>, usize)> {
    let n = objective.num_params();
    if params.len() != n {
        return Err(Error::ParamCount {
            expected: n,
            found: params.len(),
        });
    }
    match method {
        GradientMethod::ParamShift => {
            let gates = objective.bound_gates();
            let per_gate: Vec<Result<(usize, f64, usize)>> = gates
                .par_iter()
                .map(|&(gate, binding, kind)| {
                    let rule = ShiftRule::for_gate(kind)?;
                    let mut first_err = None;
                    let d = rule.apply(0.0, |s| match objective.evaluate_gate_shift(params, gate, s) {
                        Ok(v) => v,
                        Err(e) => {
                            first_err.get_or_insert(e);
                            f64::NAN
                        }
                    });
                    match first_err {
                        Some(e) => Err(e),
                        None => Ok((binding.index, binding.coefficient * d, rule.terms.len())),
                    }
                })
                .collect();
            // fixed summation order, independent of scheduling
            let mut grad = vec![0.0; n];
            let mut evals = 0;
            for item in per_gate {
                let (idx, contrib, cost) = item?;
                grad[idx] += contrib;
                evals += cost;
            }
            Ok((grad, evals))
        }
        GradientMethod::FiniteDiff => {
            let grad = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut plus = params.to_vec();
                    let mut minus = params.to_vec();
                    plus[i] += FINITE_DIFF_STEP;
                    minus[i] -= FINITE_DIFF_STEP;
                    Ok((objective.evaluate(&plus)? - objective.evaluate(&minus)?) / (2.0 * FINITE_DIFF_STEP))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((grad, 2 * n))
        }
    }
}

/// Expected cost of a QAOA circuit on one graph.
#[derive(Debug, Clone)]
pub struct QaoaObjective {
    graph: Graph,
    encoding: EncodingKind,
    circuit: Circuit,
    cost: DiagonalCost,
}

impl QaoaObjective {
    pub fn new(graph: &Graph, encoding: EncodingKind, layers: usize, alpha: f64) -> Result<Self> {
        Ok(QaoaObjective {
            graph: graph.clone(),
            encoding,
            circuit: build_qaoa(graph, encoding, layers, alpha)?,
            cost: DiagonalCost::new(graph, encoding, alpha)?,
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn cost(&self) -> &DiagonalCost {
        &self.cost
    }

    pub fn state(&self, params: &[f64]) -> Result<Statevector> {
        self.circuit.simulate(params)
    }

    pub fn success(&self, params: &[f64]) -> Result<SuccessProbability> {
        let state = self.state(params)?;
        Ok(success_probability(&self.graph, self.encoding, &state.probabilities()))
    }
}

impl Objective for QaoaObjective {
    fn num_params(&self) -> usize {
        self.circuit.num_params()
    }

    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        self.circuit.simulate(params)?.expectation_diagonal(&self.cost)
    }

    fn bound_gates(&self) -> Vec<(usize, ParamBinding, GateKind)> {
        self.circuit
            .gates()
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g.binding().map(|b| (i, b, g.kind)))
            .collect()
    }

    fn evaluate_gate_shift(&self, params: &[f64], gate: usize, delta: f64) -> Result<f64> {
        self.circuit
            .simulate_shifted(params, Some((gate, delta)))?
            .expectation_diagonal(&self.cost)
    }
}

/// Expected cost of the `layers`-layer QAOA circuit at `params`.
pub fn evaluate_cost(graph: &Graph, encoding: EncodingKind, layers: usize, alpha: f64, params: &[f64]) -> Result<f64> {
    QaoaObjective::new(graph, encoding, layers, alpha)?.evaluate(params)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainConfig {
    pub layers: usize,
    pub encoding: EncodingKind,
    pub alpha: f64,
    pub max_steps: usize,
    /// Convergence is only checked from this step on.
    pub min_steps: usize,
    /// Stop when `|cost_t - cost_{t-1}|` falls below this.
    pub cost_tolerance: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    pub gradient_method: GradientMethod,
    /// Initial parameters are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

impl TrainConfig {
    /// Qutrit profile: at most 50 steps, tolerance 0.01.
    pub fn qutrit(layers: usize) -> Self {
        TrainConfig {
            layers,
            encoding: EncodingKind::Qutrit,
            alpha: DEFAULT_ALPHA,
            max_steps: 50,
            min_steps: 0,
            cost_tolerance: 0.01,
            learning_rate: 0.1,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
            gradient_method: GradientMethod::ParamShift,
            init_scale: 0.1,
        }
    }

    /// Qubit profile: at least 200 steps, tolerance 0.001, capped at 1000.
    pub fn qubit(layers: usize) -> Self {
        TrainConfig {
            encoding: EncodingKind::QubitSpaceEfficient,
            max_steps: 1000,
            min_steps: 200,
            cost_tolerance: 0.001,
            ..Self::qutrit(layers)
        }
    }

    pub fn for_encoding(encoding: EncodingKind, layers: usize) -> Self {
        match encoding {
            EncodingKind::Qutrit => Self::qutrit(layers),
            EncodingKind::QubitSpaceEfficient => Self::qubit(layers),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.layers < 1 {
            return bad("layers must be at least 1");
        }
        if self.min_steps > self.max_steps {
            return bad("min_steps exceeds max_steps");
        }
        if self.cost_tolerance.is_nan() || self.cost_tolerance <= 0.0 {
            return bad("cost tolerance must be positive");
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return bad("Adam epsilon must be positive");
        }
        if !self.alpha.is_finite() {
            return bad("alpha must be finite");
        }
        if !self.init_scale.is_finite() || self.init_scale < 0.0 {
            return bad("init scale must be finite and non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(num_params: usize, learning_rate: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Adam {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bias1 = 1.0 - self.beta1.powi(self.t);
        let bias2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bias1;
            let v_hat = self.v[i] / bias2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// One row of the training trace. Row 0 is the initial evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub cost: f64,
    /// Norm of the gradient that produced this step (0 on row 0).
    pub gradient_norm: f64,
    pub circuit_evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub params: Vec<f64>,
    pub initial_params: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub steps_taken: usize,
    pub converged: bool,
    pub success: SuccessProbability,
    pub wall_time: Duration,
}

impl TrainResult {
    pub fn cost_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.cost).collect()
    }

    pub fn final_cost(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.cost)
    }

    pub fn circuit_evaluations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.circuit_evaluations)
    }

    /// Everything except wall time.
    pub fn same_outcome(&self, other: &TrainResult) -> bool {
        self.params == other.params
            && self.initial_params == other.initial_params
            && self.trace == other.trace
            && self.steps_taken == other.steps_taken
            && self.converged == other.converged
            && self.success == other.success
    }

    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_trace(file).map_err(|e| match e {
            Error::Csv(c) if c.is_io_error() => Error::io(path, std::io::Error::other(c.to_string())),
            other => other,
        })
    }

    pub fn write_trace(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# qcolor trace v1").map_err(|e| Error::io("<trace>", e))?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.trace {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io("<trace>", e))?;
        Ok(())
    }
}

pub fn initial_params(config: &TrainConfig) -> Vec<f64> {
    let n = config.encoding.params_per_layer() * config.layers;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let s = config.init_scale;
    (0..n)
        .map(|_| if s > 0.0 { rng.gen_range(-s..=s) } else { 0.0 })
        .collect()
}

/// Trains the QAOA circuit for `graph` with Adam.
pub fn train(graph: &Graph, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    let start = Instant::now();
    let objective = QaoaObjective::new(graph, config.encoding, config.layers, config.alpha)?;
    let init = initial_params(config);
    let mut params = init.clone();
    let mut adam = Adam::new(
        params.len(),
        config.learning_rate,
        config.adam_beta1,
        config.adam_beta2,
        config.adam_epsilon,
    );

    let mut evaluations = 1;
    let mut cost = objective.evaluate(&params)?;
    if !cost.is_finite() {
        return Err(Error::NonFinite { what: "cost", step: 0 });
    }
    let mut trace = vec![TraceRow {
        step: 0,
        cost,
        gradient_norm: 0.0,
        circuit_evaluations: evaluations,
    }];
    let mut converged = false;
    for step in 1..=config.max_steps {
        let (grad, spent) = gradient(&objective, &params, config.gradient_method)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { what: "gradient", step });
        }
        adam.step(&mut params, &grad);
        let next = objective.evaluate(&params)?;
        if !next.is_finite() {
            return Err(Error::NonFinite { what: "cost", step });
        }
        evaluations += spent + 1;
        trace.push(TraceRow {
            step,
            cost: next,
            gradient_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
            circuit_evaluations: evaluations,
        });
        let delta = (next - cost).abs();
        cost = next;
        if step >= config.min_steps && delta < config.cost_tolerance {
            converged = true;
            break;
        }
    }
    let success = objective.success(&params)?;
    Ok(TrainResult {
        params,
        initial_params: init,
        steps_taken: trace.len() - 1,
        trace,
        converged,
        success,
        wall_time: start.elapsed(),
    })
}
