//! Qubit and qutrit gate matrices, Gell-Mann observables and parameter-shift rules.
//!
//! All matrices use the computational basis ordering `|0>, |1>, |2>`. Two-site
//! matrices index rows and columns as `d * first + second`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A two-level subspace `{|i>, |j>}` of a qutrit, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    low: u8,
    high: u8,
}

impl Subspace {
    pub const S01: Subspace = Subspace { low: 0, high: 1 };
    pub const S02: Subspace = Subspace { low: 0, high: 2 };
    pub const S12: Subspace = Subspace { low: 1, high: 2 };

    pub fn new(i: usize, j: usize) -> Result<Self> {
        match (i, j) {
            (0, 1) => Ok(Self::S01),
            (0, 2) => Ok(Self::S02),
            (1, 2) => Ok(Self::S12),
            _ => Err(Error::InvalidSubspace(i, j)),
        }
    }

    pub fn levels(self) -> (usize, usize) {
        (self.low as usize, self.high as usize)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.low, self.high)
    }
}

/// Every gate and observable the circuits use.
///
/// Subspace rotations carry their subspace in the variant, so a subspace is
/// present exactly for the `Trx`/`Try`/`Trz` kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Trx(Subspace),
    Try(Subspace),
    Trz(Subspace),
    /// Qutrit Clifford "Hadamard".
    Th,
    TAdd,
    TSub,
    H,
    Rx,
    Rz,
    Cnot,
    /// Gell-Mann observable `lambda^k`, k in 1..=8. Hermitian, not a unitary gate.
    GellMann(u8),
}

impl GateKind {
    pub fn gell_mann(k: usize) -> Result<Self> {
        if (1..=8).contains(&k) {
            Ok(GateKind::GellMann(k as u8))
        } else {
            Err(Error::GellMannIndex(k))
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::TAdd | GateKind::TSub | GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_parametrized(self) -> bool {
        matches!(
            self,
            GateKind::Trx(_) | GateKind::Try(_) | GateKind::Trz(_) | GateKind::Rx | GateKind::Rz
        )
    }

    pub fn is_entangling(self) -> bool {
        self.arity() == 2
    }

    /// Local dimension of the sites this gate acts on.
    pub fn local_dim(self) -> usize {
        match self {
            GateKind::H | GateKind::Rx | GateKind::Rz | GateKind::Cnot => 2,
            _ => 3,
        }
    }

    pub fn subspace(self) -> Option<Subspace> {
        match self {
            GateKind::Trx(s) | GateKind::Try(s) | GateKind::Trz(s) => Some(s),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Trx(_) => "TRX",
            GateKind::Try(_) => "TRY",
            GateKind::Trz(_) => "TRZ",
            GateKind::Th => "TH",
            GateKind::TAdd => "TAdd",
            GateKind::TSub => "TSub",
            GateKind::H => "H",
            GateKind::Rx => "RX",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::GellMann(_) => "GellMann",
        }
    }

    /// Matrix of the gate. `theta` must be given exactly for parametrized kinds.
    pub fn matrix(self, theta: Option<f64>) -> Result<CMatrix> {
        match (self.is_parametrized(), theta) {
            (true, None) => {
                return Err(Error::GateParameter {
                    gate: self.to_string(),
                    reason: "requires an angle",
                })
            }
            (false, Some(_)) => {
                return Err(Error::GateParameter {
                    gate: self.to_string(),
                    reason: "takes no angle",
                })
            }
            _ => {}
        }
        let t = theta.unwrap_or(0.0);
        Ok(match self {
            GateKind::Trx(s) => subspace_rotation(Axis::X, s, t),
            GateKind::Try(s) => subspace_rotation(Axis::Y, s, t),
            GateKind::Trz(s) => subspace_rotation(Axis::Z, s, t),
            GateKind::Th => th(),
            GateKind::TAdd => tadd(),
            GateKind::TSub => tsub(),
            GateKind::H => hadamard(),
            GateKind::Rx => rx(t),
            GateKind::Rz => rz(t),
            GateKind::Cnot => cnot(),
            GateKind::GellMann(k) => gell_mann(k as usize)?,
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::GellMann(k) => write!(f, "GellMann{k}"),
            other => match other.subspace() {
                Some(s) => write!(f, "{}({})", other.name(), s),
                None => f.write_str(other.name()),
            },
        }
    }
}

fn rotation_block(axis: Axis, theta: f64) -> [[Complex64; 2]; 2] {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    match axis {
        Axis::X => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        Axis::Y => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        Axis::Z => [
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ],
    }
}

/// Qubit-like rotation by `theta` inside `subspace`, identity on the third level.
pub fn subspace_rotation(axis: Axis, subspace: Subspace, theta: f64) -> CMatrix {
    let block = rotation_block(axis, theta);
    let (i, j) = subspace.levels();
    let mut m = Array2::eye(3);
    m[[i, i]] = block[0][0];
    m[[i, j]] = block[0][1];
    m[[j, i]] = block[1][0];
    m[[j, j]] = block[1][1];
    m
}

/// Qutrit Clifford Hadamard: `(-i/sqrt 3) [[1,1,1],[1,w,w^2],[1,w^2,w]]`, `w = e^{2 pi i/3}`.
pub fn th() -> CMatrix {
    let pref = Complex64::new(0.0, -1.0 / 3f64.sqrt());
    Array2::from_shape_fn((3, 3), |(r, c)| {
        pref * Complex64::from_polar(1.0, 2.0 * PI * ((r * c) % 3) as f64 / 3.0)
    })
}

/// Standard Gell-Mann matrix `lambda^k`, k in 1..=8.
pub fn gell_mann(k: usize) -> Result<CMatrix> {
    let mut m = Array2::zeros((3, 3));
    match k {
        1 => {
            m[[0, 1]] = ONE;
            m[[1, 0]] = ONE;
        }
        2 => {
            m[[0, 1]] = -I;
            m[[1, 0]] = I;
        }
        3 => {
            m[[0, 0]] = ONE;
            m[[1, 1]] = -ONE;
        }
        4 => {
            m[[0, 2]] = ONE;
            m[[2, 0]] = ONE;
        }
        5 => {
            m[[0, 2]] = -I;
            m[[2, 0]] = I;
        }
        6 => {
            m[[1, 2]] = ONE;
            m[[2, 1]] = ONE;
        }
        7 => {
            m[[1, 2]] = -I;
            m[[2, 1]] = I;
        }
        8 => {
            let f = 1.0 / 3f64.sqrt();
            m[[0, 0]] = Complex64::new(f, 0.0);
            m[[1, 1]] = Complex64::new(f, 0.0);
            m[[2, 2]] = Complex64::new(-2.0 * f, 0.0);
        }
        _ => return Err(Error::GellMannIndex(k)),
    }
    Ok(m)
}

fn controlled_shift(sign: isize) -> CMatrix {
    let mut m = Array2::zeros((9, 9));
    for j in 0..3isize {
        for k in 0..3isize {
            let out = (k + sign * j).rem_euclid(3);
            m[[(3 * j + out) as usize, (3 * j + k) as usize]] = ONE;
        }
    }
    m
}

/// `|j>|k> -> |j>|k + j mod 3>`.
pub fn tadd() -> CMatrix {
    controlled_shift(1)
}

/// `|j>|k> -> |j>|k - j mod 3>`, the adjoint of [`tadd`].
pub fn tsub() -> CMatrix {
    controlled_shift(-1)
}

pub fn hadamard() -> CMatrix {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Array2::from_shape_vec((2, 2), vec![h, h, h, -h]).unwrap()
}

pub fn rx(theta: f64) -> CMatrix {
    let b = rotation_block(Axis::X, theta);
    Array2::from_shape_fn((2, 2), |(r, c)| b[r][c])
}

pub fn rz(theta: f64) -> CMatrix {
    let b = rotation_block(Axis::Z, theta);
    Array2::from_shape_fn((2, 2), |(r, c)| b[r][c])
}

/// CNOT with the first site as control.
pub fn cnot() -> CMatrix {
    let mut m = Array2::zeros((4, 4));
    m[[0, 0]] = ONE;
    m[[1, 1]] = ONE;
    m[[2, 3]] = ONE;
    m[[3, 2]] = ONE;
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftTerm {
    pub shift: f64,
    pub coefficient: f64,
}

/// Derivative rule `f'(theta) = sum_k c_k f(theta + s_k)` for a single gate angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRule {
    pub terms: Vec<ShiftTerm>,
}

impl ShiftRule {
    /// Two-term rule for generators with eigenvalue gap 1 (RX, RZ).
    pub fn two_term() -> Self {
        ShiftRule {
            terms: vec![
                ShiftTerm {
                    shift: FRAC_PI_2,
                    coefficient: 0.5,
                },
                ShiftTerm {
                    shift: -FRAC_PI_2,
                    coefficient: -0.5,
                },
            ],
        }
    }

    /// Four-term rule for subspace rotations, whose generators have gaps 1/2 and 1.
    ///
    /// Both brackets are differences `f(t+s) - f(t-s)`; only this sign pattern
    /// reproduces the derivative of the frequency-1/2 and frequency-1 components.
    /// A sum in the first bracket is sometimes quoted, but it is nonzero for a
    /// constant `f`. Agreement with central finite differences is checked in
    /// the integration tests.
    pub fn four_term() -> Self {
        let c_plus = (2.0 + SQRT_2) / 8.0;
        let c_minus = (2.0 - SQRT_2) / 8.0;
        let s1 = FRAC_PI_2;
        let s3 = 3.0 * FRAC_PI_2;
        ShiftRule {
            terms: vec![
                ShiftTerm {
                    shift: s1,
                    coefficient: c_plus,
                },
                ShiftTerm {
                    shift: -s1,
                    coefficient: -c_plus,
                },
                ShiftTerm {
                    shift: s3,
                    coefficient: -c_minus,
                },
                ShiftTerm {
                    shift: -s3,
                    coefficient: c_minus,
                },
            ],
        }
    }

    pub fn for_gate(kind: GateKind) -> Result<Self> {
        match kind {
            GateKind::Trx(_) | GateKind::Try(_) | GateKind::Trz(_) => Ok(Self::four_term()),
            GateKind::Rx | GateKind::Rz => Ok(Self::two_term()),
            other => Err(Error::NotParametrized(other.to_string())),
        }
    }

    /// Derivative at `theta` of a function of the gate angle.
    pub fn apply(&self, theta: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.terms.iter().map(|t| t.coefficient * f(theta + t.shift)).sum()
    }
}

pub fn shift_rule(kind: GateKind) -> Result<ShiftRule> {
    ShiftRule::for_gate(kind)
}

/// `max |U^dagger U - I|` entrywise.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m.t().mapv(|z| z.conj()).dot(m);
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let expected = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[[r, c]] - expected).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(r, c)| a[[r / br, c / bc]] * b[[r % br, c % bc]])
}
