//! The native parameterized gate set: matrices, derivatives, and embedding.
//!
//! Qubit-ordering convention: qubit 0 is the *most significant* bit of a
//! basis-state index, so for an `n`-qubit register the basis state
//! `|q0 q1 … q(n-1)⟩` has index `q0·2^(n-1) + … + q(n-1)`. A gate matrix's
//! own tensor factors follow the same rule: the first qubit passed to
//! [`embed`] is the high bit of the gate-local index. Under this convention
//! `embed(m, &[0], 2) == kron(m, I₂)`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// Dense complex matrix; unitary for every gate at every angle.
pub type Unitary = Array2<Complex64>;

/// The five native parameterized gates.
///
/// The single-qubit rotations and `Rzz` are the standard half-angle
/// exponentials of their Pauli generators. `Fecr` is a one-parameter
/// entangler with `Fecr(π/2)` equal to the echoed cross-resonance gate;
/// it is self-inverse up to global phase (`M² = −I` for every angle).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rzz,
    Fecr,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Rzz,
        GateKind::Fecr,
    ];

    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Rzz | GateKind::Fecr => 2,
        }
    }

    /// True exactly for the two-qubit gates.
    pub fn is_entangling(self) -> bool {
        self.arity() == 2
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Rzz => "rzz",
            GateKind::Fecr => "fecr",
        }
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The gate's matrix evaluated at `theta` (radians).
pub fn gate_matrix(kind: GateKind, theta: f64) -> Unitary {
    let half = theta / 2.0;
    let (cos, sin) = (half.cos(), half.sin());
    match kind {
        GateKind::Rx => Array2::from_shape_vec(
            (2, 2),
            vec![c(cos, 0.0), c(0.0, -sin), c(0.0, -sin), c(cos, 0.0)],
        )
        .unwrap(),
        GateKind::Ry => Array2::from_shape_vec(
            (2, 2),
            vec![c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)],
        )
        .unwrap(),
        GateKind::Rz => {
            Array2::from_shape_vec((2, 2), vec![c(cos, -sin), ZERO, ZERO, c(cos, sin)]).unwrap()
        }
        GateKind::Rzz => {
            let m = c(cos, -sin);
            let p = c(cos, sin);
            Array2::from_diag(&ndarray::arr1(&[m, p, p, m]))
        }
        GateKind::Fecr => {
            let ic = c(0.0, cos);
            let s = c(sin, 0.0);
            Array2::from_shape_vec(
                (4, 4),
                vec![
                    ZERO, ZERO, ic, -s, //
                    ZERO, ZERO, -s, ic, //
                    ic, s, ZERO, ZERO, //
                    s, ic, ZERO, ZERO,
                ],
            )
            .unwrap()
        }
    }
}

/// Entrywise derivative `dM/dθ` of [`gate_matrix`].
///
/// For the rotation gates this equals `(−i/2)·G·M` with `G` the Pauli
/// generator; for `Fecr` it is the term-by-term derivative of the matrix.
pub fn gate_matrix_derivative(kind: GateKind, theta: f64) -> Unitary {
    let half = theta / 2.0;
    let (cos, sin) = (half.cos(), half.sin());
    let (dcos, dsin) = (-sin / 2.0, cos / 2.0);
    match kind {
        GateKind::Rx => Array2::from_shape_vec(
            (2, 2),
            vec![c(dcos, 0.0), c(0.0, -dsin), c(0.0, -dsin), c(dcos, 0.0)],
        )
        .unwrap(),
        GateKind::Ry => Array2::from_shape_vec(
            (2, 2),
            vec![c(dcos, 0.0), c(-dsin, 0.0), c(dsin, 0.0), c(dcos, 0.0)],
        )
        .unwrap(),
        GateKind::Rz => {
            Array2::from_shape_vec((2, 2), vec![c(dcos, -dsin), ZERO, ZERO, c(dcos, dsin)])
                .unwrap()
        }
        GateKind::Rzz => {
            let m = c(dcos, -dsin);
            let p = c(dcos, dsin);
            Array2::from_diag(&ndarray::arr1(&[m, p, p, m]))
        }
        GateKind::Fecr => {
            let idc = c(0.0, dcos);
            let ds = c(dsin, 0.0);
            Array2::from_shape_vec(
                (4, 4),
                vec![
                    ZERO, ZERO, idc, -ds, //
                    ZERO, ZERO, -ds, idc, //
                    idc, ds, ZERO, ZERO, //
                    ds, idc, ZERO, ZERO,
                ],
            )
            .unwrap()
        }
    }
}

fn check_qubits(qubits: &[usize], n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits: n,
            max: MAX_QUBITS,
        });
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubits {
                indices: qubits.to_vec(),
            });
        }
    }
    Ok(())
}

/// Lifts a gate matrix to the full `2^n × 2^n` register operator, acting as
/// `matrix` on `qubits` and as the identity elsewhere.
pub fn embed(matrix: &Unitary, qubits: &[usize], n: usize) -> Result<Unitary> {
    check_qubits(qubits, n)?;
    let k = qubits.len();
    assert_eq!(matrix.nrows(), 1 << k, "matrix dimension must be 2^arity");
    let d = 1usize << n;
    let mut out = Array2::from_elem((d, d), ZERO);
    for r in 0..d {
        let mut gr = 0usize;
        for &q in qubits {
            gr = (gr << 1) | ((r >> (n - 1 - q)) & 1);
        }
        for gc in 0..(1 << k) {
            let mut col = r;
            for (i, &q) in qubits.iter().enumerate() {
                let bit = (gc >> (k - 1 - i)) & 1;
                let pos = n - 1 - q;
                col = (col & !(1 << pos)) | (bit << pos);
            }
            out[[r, col]] = matrix[[gr, gc]];
        }
    }
    Ok(out)
}

/// Row indices touched when a gate on `qubits` mixes basis state `index`.
fn mixed_indices(index: usize, qubits: &[usize], n: usize) -> [usize; 4] {
    let k = qubits.len();
    let mut out = [0usize; 4];
    for (g, slot) in out.iter_mut().enumerate().take(1 << k) {
        let mut idx = index;
        for (i, &q) in qubits.iter().enumerate() {
            let bit = (g >> (k - 1 - i)) & 1;
            let pos = n - 1 - q;
            idx = (idx & !(1 << pos)) | (bit << pos);
        }
        *slot = idx;
    }
    out
}

/// Computes `embed(matrix) · target` without forming the embedded operator.
pub(crate) fn apply_left(matrix: &Unitary, qubits: &[usize], n: usize, target: &Unitary) -> Unitary {
    let k = qubits.len();
    let span = 1usize << k;
    let d = 1usize << n;
    debug_assert_eq!(target.nrows(), d);
    let mut out = Array2::from_elem((d, d), ZERO);
    let mut done = vec![false; d];
    for r in 0..d {
        if done[r] {
            continue;
        }
        let rows = mixed_indices(r, qubits, n);
        for gr in 0..span {
            done[rows[gr]] = true;
        }
        for gr in 0..span {
            let dst = rows[gr];
            for gc in 0..span {
                let coeff = matrix[[gr, gc]];
                if coeff == ZERO {
                    continue;
                }
                let src = rows[gc];
                for col in 0..d {
                    out[[dst, col]] += coeff * target[[src, col]];
                }
            }
        }
    }
    out
}

/// Computes `target · embed(matrix)` without forming the embedded operator.
pub(crate) fn apply_right(target: &Unitary, matrix: &Unitary, qubits: &[usize], n: usize) -> Unitary {
    let k = qubits.len();
    let span = 1usize << k;
    let d = 1usize << n;
    debug_assert_eq!(target.ncols(), d);
    let mut out = Array2::from_elem((d, d), ZERO);
    let mut done = vec![false; d];
    for col in 0..d {
        if done[col] {
            continue;
        }
        let cols = mixed_indices(col, qubits, n);
        for gc in 0..span {
            done[cols[gc]] = true;
        }
        for gc in 0..span {
            let dst = cols[gc];
            for gr in 0..span {
                let coeff = matrix[[gr, gc]];
                if coeff == ZERO {
                    continue;
                }
                let src = cols[gr];
                for row in 0..d {
                    out[[row, dst]] += target[[row, src]] * coeff;
                }
            }
        }
    }
    out
}
