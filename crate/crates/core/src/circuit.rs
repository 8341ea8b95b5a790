//! Layered QAOA circuits for both encodings, plus depth and gate-count analysis.
//!
//! Parameter layout per layer `l`:
//!
//! | encoding | edge cost | suppression | mixer |
//! |----------|-----------|-------------|-------|
//! | qutrit   | `2l`      |             | `2l+1`|
//! | qubit    | `3l`      | `3l+1`      | `3l+2`|

use std::fmt::Write as _;

use crate::encodings::EncodingKind;
use crate::error::{Error, Result};
use crate::gates::{GateKind, Subspace};
use crate::graph::Graph;
use crate::sim::{SimConfig, Statevector};
use crate::CMatrix;

/// Dense unitaries are only built up to this dimension (five qutrits).
pub const MAX_UNITARY_DIM: usize = 243;

/// Gate angle = `coefficient * params[index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBinding {
    pub index: usize,
    pub coefficient: f64,
}

impl ParamBinding {
    pub fn new(index: usize) -> Self {
        ParamBinding {
            index,
            coefficient: 1.0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        ParamBinding {
            index: self.index,
            coefficient: self.coefficient * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Bound(ParamBinding),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    pub kind: GateKind,
    /// One site, or `(control, target)` for two-site gates.
    pub sites: Vec<usize>,
    pub angle: Option<Angle>,
}

impl GateInstance {
    pub fn fixed(kind: GateKind, sites: &[usize]) -> Self {
        GateInstance {
            kind,
            sites: sites.to_vec(),
            angle: None,
        }
    }

    pub fn bound(kind: GateKind, site: usize, binding: ParamBinding) -> Self {
        GateInstance {
            kind,
            sites: vec![site],
            angle: Some(Angle::Bound(binding)),
        }
    }

    pub fn binding(&self) -> Option<ParamBinding> {
        match self.angle {
            Some(Angle::Bound(b)) => Some(b),
            _ => None,
        }
    }

    pub fn angle_value(&self, params: &[f64]) -> Option<f64> {
        self.angle.map(|a| match a {
            Angle::Fixed(t) => t,
            Angle::Bound(b) => b.coefficient * params[b.index],
        })
    }

    pub fn is_entangling(&self) -> bool {
        self.kind.is_entangling()
    }

    /// True when `self` followed by `other` is the identity.
    fn cancels(&self, other: &GateInstance) -> bool {
        if self.sites != other.sites || self.angle.is_some() || other.angle.is_some() {
            return false;
        }
        matches!(
            (self.kind, other.kind),
            (GateKind::Cnot, GateKind::Cnot) | (GateKind::TAdd, GateKind::TSub) | (GateKind::TSub, GateKind::TAdd)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_sites: usize,
    local_dim: usize,
    gates: Vec<GateInstance>,
    num_params: usize,
}

impl Circuit {
    pub fn new(num_sites: usize, local_dim: usize, gates: Vec<GateInstance>, num_params: usize) -> Result<Self> {
        for (i, g) in gates.iter().enumerate() {
            let bad = |msg: String| Err(Error::InvalidCircuit(format!("gate {i} ({}): {msg}", g.kind)));
            if g.sites.len() != g.kind.arity() {
                return bad(format!("expects {} sites, got {}", g.kind.arity(), g.sites.len()));
            }
            if g.kind.local_dim() != local_dim {
                return bad(format!(
                    "acts on dimension {}, circuit has {local_dim}",
                    g.kind.local_dim()
                ));
            }
            if let Some(&s) = g.sites.iter().find(|&&s| s >= num_sites) {
                return bad(format!("site {s} out of range"));
            }
            if g.sites.len() == 2 && g.sites[0] == g.sites[1] {
                return bad("repeated site".into());
            }
            if g.kind.is_parametrized() != g.angle.is_some() {
                return bad("angle must be given exactly for parametrized gates".into());
            }
            if let Some(b) = g.binding() {
                if b.index >= num_params {
                    return bad(format!("parameter {} out of range", b.index));
                }
                if !b.coefficient.is_finite() || b.coefficient == 0.0 {
                    return bad("binding coefficient must be finite and nonzero".into());
                }
            }
        }
        Ok(Circuit {
            num_sites,
            local_dim,
            gates,
            num_params,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of 2-site gates.
    pub fn entangling_count(&self) -> usize {
        entangling_count(&self.gates)
    }

    pub fn depth(&self) -> usize {
        depth(&self.gates, self.num_sites)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParamCount {
                expected: self.num_params,
                found: params.len(),
            });
        }
        Ok(())
    }

    /// Runs the circuit on `state` in place.
    pub fn apply(&self, state: &mut Statevector, params: &[f64]) -> Result<()> {
        self.apply_shifted(state, params, None)
    }

    /// Like [`apply`](Self::apply) with `delta` added to the angle of gate `shift.0`.
    pub fn apply_shifted(&self, state: &mut Statevector, params: &[f64], shift: Option<(usize, f64)>) -> Result<()> {
        self.check_params(params)?;
        if state.num_sites() != self.num_sites || state.local_dim() != self.local_dim {
            return Err(Error::DimensionMismatch {
                expected: self.num_sites,
                found: state.num_sites(),
            });
        }
        for (i, g) in self.gates.iter().enumerate() {
            let mut angle = g.angle_value(params);
            if let (Some((j, delta)), Some(a)) = (shift, angle.as_mut()) {
                if i == j {
                    *a += delta;
                }
            }
            let m = g.kind.matrix(angle)?;
            match g.sites[..] {
                [s] => state.apply_single(s, &m)?,
                [a, b] => state.apply_two(a, b, &m)?,
                _ => unreachable!("arity checked on construction"),
            }
        }
        Ok(())
    }

    /// Final state from `|0...0>`.
    pub fn simulate(&self, params: &[f64]) -> Result<Statevector> {
        self.simulate_shifted(params, None)
    }

    pub fn simulate_shifted(&self, params: &[f64], shift: Option<(usize, f64)>) -> Result<Statevector> {
        let mut state = Statevector::init_ground_with(self.num_sites, self.local_dim, SimConfig::fast())?;
        self.apply_shifted(&mut state, params, shift)?;
        Ok(state)
    }

    /// Dense unitary, column `j` = circuit applied to basis state `j`.
    pub fn unitary(&self, params: &[f64]) -> Result<CMatrix> {
        self.check_params(params)?;
        let dim = self
            .local_dim
            .checked_pow(self.num_sites as u32)
            .filter(|&d| d <= MAX_UNITARY_DIM)
            .ok_or(Error::UnitaryTooLarge {
                dim: self.local_dim.saturating_pow(self.num_sites as u32),
                cap: MAX_UNITARY_DIM,
            })?;
        let mut u = CMatrix::zeros((dim, dim));
        for j in 0..dim {
            let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); dim];
            amps[j] = num_complex::Complex64::new(1.0, 0.0);
            let mut state = Statevector::from_amplitudes(self.local_dim, self.num_sites, amps)?;
            state.set_config(SimConfig::fast());
            self.apply(&mut state, params)?;
            for (i, a) in state.amplitudes().iter().enumerate() {
                u[[i, j]] = *a;
            }
        }
        Ok(u)
    }

    /// Copy of the circuit with adjacent inverse entangler pairs removed.
    pub fn peephole(&self) -> Circuit {
        Circuit {
            gates: peephole(self.gates.clone()),
            ..self.clone()
        }
    }

    /// One gate per line: `name subspace sites binding`, `-` for absent fields.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# sites={} dim={} params={} gates={}\n",
            self.num_sites,
            self.local_dim,
            self.num_params,
            self.gates.len()
        );
        for g in &self.gates {
            let sub = g.kind.subspace().map_or("-".to_string(), |s| s.to_string());
            let sites = g.sites.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
            let binding = match g.angle {
                None => "-".to_string(),
                Some(Angle::Fixed(t)) => format!("={t}"),
                Some(Angle::Bound(b)) => format!("p{}*{}", b.index, b.coefficient),
            };
            writeln!(out, "{} {} {} {}", g.kind.name(), sub, sites, binding).unwrap();
        }
        out
    }
}

pub fn entangling_count(gates: &[GateInstance]) -> usize {
    gates.iter().filter(|g| g.is_entangling()).count()
}

/// Greedy ASAP layering with all-to-all connectivity: a gate starts one layer
/// after the latest gate on any of its sites.
pub fn depth(gates: &[GateInstance], num_sites: usize) -> usize {
    let mut last = vec![0usize; num_sites];
    let mut total = 0;
    for g in gates {
        let layer = 1 + g.sites.iter().map(|&s| last[s]).max().unwrap_or(0);
        for &s in &g.sites {
            last[s] = layer;
        }
        total = total.max(layer);
    }
    total
}

/// Removes pairs of mutually inverse entangling gates with no gate between
/// them on either site. Cancellations cascade.
pub fn peephole(gates: Vec<GateInstance>) -> Vec<GateInstance> {
    let num_sites = gates
        .iter()
        .flat_map(|g| g.sites.iter().copied())
        .max()
        .map_or(0, |m| m + 1);
    let mut out: Vec<Option<GateInstance>> = Vec::with_capacity(gates.len());
    // live gates per site, in order
    let mut on_site: Vec<Vec<usize>> = vec![Vec::new(); num_sites];
    for g in gates {
        if g.is_entangling() {
            let (a, b) = (g.sites[0], g.sites[1]);
            if let (Some(&i), Some(&j)) = (on_site[a].last(), on_site[b].last()) {
                if i == j && out[i].as_ref().is_some_and(|prev| prev.cancels(&g)) {
                    out[i] = None;
                    on_site[a].pop();
                    on_site[b].pop();
                    continue;
                }
            }
        }
        let idx = out.len();
        for &s in &g.sites {
            on_site[s].push(idx);
        }
        out.push(Some(g));
    }
    out.into_iter().flatten().collect()
}

/// `exp(-i theta (l3 l3 + l8 l8))` on qutrits `control`, `target`.
pub fn build_qutrit_edge_block(control: usize, target: usize, param: ParamBinding) -> Vec<GateInstance> {
    let rot = param.scaled(4.0 / 3.0);
    vec![
        GateInstance::fixed(GateKind::TSub, &[control, target]),
        GateInstance::bound(GateKind::Trz(Subspace::S01), target, rot),
        GateInstance::bound(GateKind::Trz(Subspace::S02), target, rot),
        GateInstance::fixed(GateKind::TAdd, &[control, target]),
    ]
}

/// `exp(-i theta Z_a Z_b)`.
fn zz_gadget(a: usize, b: usize, param: ParamBinding) -> [GateInstance; 3] {
    [
        GateInstance::fixed(GateKind::Cnot, &[a, b]),
        GateInstance::bound(GateKind::Rz, b, param.scaled(2.0)),
        GateInstance::fixed(GateKind::Cnot, &[a, b]),
    ]
}

/// `exp(-i theta (Z_v1 Z_v2 Z_w1 Z_w2 + Z_v1 Z_w1 + Z_v2 Z_w2))`.
///
/// The two ZZ gadgets come first so that the parity tree's final CNOTs sit
/// next to the suppression gadgets of the following layer stage.
pub fn build_qubit_edge_block(v1: usize, v2: usize, w1: usize, w2: usize, param: ParamBinding) -> Vec<GateInstance> {
    let mut gates = Vec::with_capacity(13);
    gates.extend(zz_gadget(v1, w1, param));
    gates.extend(zz_gadget(v2, w2, param));
    let cx = |a, b| GateInstance::fixed(GateKind::Cnot, &[a, b]);
    gates.extend([
        cx(v1, v2),
        cx(w1, w2),
        cx(v2, w2),
        GateInstance::bound(GateKind::Rz, w2, param.scaled(2.0)),
        cx(v2, w2),
        cx(v1, v2),
        cx(w1, w2),
    ]);
    peephole(gates)
}

/// `exp(-i gamma alpha (Z_v1 Z_v2 - Z_v1 - Z_v2))`.
pub fn build_suppression_block(v1: usize, v2: usize, param: ParamBinding, alpha: f64) -> Vec<GateInstance> {
    let mut gates = zz_gadget(v1, v2, param.scaled(alpha)).to_vec();
    gates.push(GateInstance::bound(GateKind::Rz, v1, param.scaled(-2.0 * alpha)));
    gates.push(GateInstance::bound(GateKind::Rz, v2, param.scaled(-2.0 * alpha)));
    gates
}

/// RX on every qubit, or TRX in subspaces (01), (02), (12) on every qutrit.
pub fn build_mixer(encoding: EncodingKind, sites: &[usize], param: ParamBinding) -> Vec<GateInstance> {
    match encoding {
        EncodingKind::QubitSpaceEfficient => sites
            .iter()
            .map(|&s| GateInstance::bound(GateKind::Rx, s, param))
            .collect(),
        EncodingKind::Qutrit => sites
            .iter()
            .flat_map(|&s| {
                [Subspace::S01, Subspace::S02, Subspace::S12]
                    .map(|sub| GateInstance::bound(GateKind::Trx(sub), s, param))
            })
            .collect(),
    }
}

fn hadamard_wall(encoding: EncodingKind, num_sites: usize) -> Vec<GateInstance> {
    let kind = match encoding {
        EncodingKind::QubitSpaceEfficient => GateKind::H,
        EncodingKind::Qutrit => GateKind::Th,
    };
    (0..num_sites).map(|s| GateInstance::fixed(kind, &[s])).collect()
}

/// Gates of one QAOA layer (no initial Hadamard wall).
pub fn build_layer(graph: &Graph, encoding: EncodingKind, layer: usize, alpha: f64) -> Vec<GateInstance> {
    let n = graph.num_nodes();
    let sites: Vec<usize> = (0..encoding.num_sites(n)).collect();
    let mut gates = Vec::new();
    match encoding {
        EncodingKind::Qutrit => {
            let theta = ParamBinding::new(2 * layer);
            let phi = ParamBinding::new(2 * layer + 1);
            for &(u, v) in graph.edges() {
                gates.extend(build_qutrit_edge_block(u, v, theta));
            }
            gates.extend(build_mixer(encoding, &sites, phi));
        }
        EncodingKind::QubitSpaceEfficient => {
            let theta = ParamBinding::new(3 * layer);
            let gamma = ParamBinding::new(3 * layer + 1);
            let phi = ParamBinding::new(3 * layer + 2);
            for &(v, w) in graph.edges() {
                gates.extend(build_qubit_edge_block(2 * v, 2 * v + 1, 2 * w, 2 * w + 1, theta));
            }
            if alpha != 0.0 {
                for v in 0..n {
                    gates.extend(build_suppression_block(2 * v, 2 * v + 1, gamma, alpha));
                }
            }
            gates.extend(build_mixer(encoding, &sites, phi));
        }
    }
    gates
}

/// Hadamard wall followed by `layers` QAOA layers. Qubit circuits get a final
/// peephole pass across block boundaries.
pub fn build_qaoa(graph: &Graph, encoding: EncodingKind, layers: usize, alpha: f64) -> Result<Circuit> {
    if layers < 1 {
        return Err(Error::InvalidArgument("QAOA needs at least one layer".into()));
    }
    if graph.num_nodes() == 0 {
        return Err(Error::InvalidGraph("graph has no nodes".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    let num_sites = encoding.num_sites(graph.num_nodes());
    let mut gates = hadamard_wall(encoding, num_sites);
    for l in 0..layers {
        gates.extend(build_layer(graph, encoding, l, alpha));
    }
    if encoding == EncodingKind::QubitSpaceEfficient {
        gates = peephole(gates);
    }
    Circuit::new(
        num_sites,
        encoding.local_dim(),
        gates,
        encoding.params_per_layer() * layers,
    )
}

/// Depth of a single QAOA layer, Hadamard wall excluded.
pub fn layer_depth(graph: &Graph, encoding: EncodingKind, alpha: f64) -> Result<usize> {
    let c = build_qaoa(graph, encoding, 1, alpha)?;
    // the wall occupies exactly the first layer on every site
    Ok(c.depth() - 1)
}
