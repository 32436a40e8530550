//! Scatter-matrix data model and the network algebra used by the rest of
//! the crate: terminated-port reduction, transducer gain, passivity and
//! reciprocity checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Reject `(I - S_ii * Gamma)` when its reciprocal 1-norm condition number
/// drops below this.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// Default passivity tolerance, absorbs round-off from file ingestion.
pub const PASSIVITY_TOL: f64 = 1e-6;

/// Slack on `|gamma| <= 1` for loads computed in floating point.
const GAMMA_SLACK: f64 = 1e-12;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("scatter matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {dim} does not match {roles} port roles")]
    RoleCount { dim: usize, roles: usize },
    #[error("invalid port role layout: {0}")]
    RoleLayout(String),
    #[error("reference impedance must be positive, got {0} ohm")]
    Impedance(f64),
    #[error("frequency must be positive, got {0} Hz")]
    Frequency(f64),
    #[error("expected a {expected} matrix, got {got}")]
    Shape { expected: &'static str, got: String },
    #[error("{got} loads supplied for {expected} RIS ports")]
    LoadCount { expected: usize, got: usize },
    #[error("reflection coefficient {index} has magnitude {magnitude} > 1")]
    ActiveLoad { index: usize, magnitude: f64 },
    #[error("resonant/ill-conditioned loading: rcond(I - S_ii*Gamma) = {rcond:e} < {RCOND_THRESHOLD:e}")]
    IllConditioned { rcond: f64 },
}

/// Role of a port in a link matrix. RIS element numbers are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortRole {
    Tx,
    RisElement(usize),
    Rx,
}

/// Square complex S-matrix at a single frequency.
///
/// A full link matrix has Tx at port 0, RIS elements at 1..=N and Rx at
/// N+1. A RIS-only matrix carries only `RisElement` roles.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMatrix {
    entries: CMatrix,
    freq_hz: f64,
    z0_ohm: f64,
    roles: Vec<PortRole>,
}

impl ScatterMatrix {
    pub fn new(
        entries: CMatrix,
        freq_hz: f64,
        z0_ohm: f64,
        roles: Vec<PortRole>,
    ) -> Result<Self, NetworkError> {
        if !entries.is_square() {
            return Err(NetworkError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() != roles.len() {
            return Err(NetworkError::RoleCount {
                dim: entries.nrows(),
                roles: roles.len(),
            });
        }
        if !(freq_hz > 0.0 && freq_hz.is_finite()) {
            return Err(NetworkError::Frequency(freq_hz));
        }
        if !(z0_ohm > 0.0 && z0_ohm.is_finite()) {
            return Err(NetworkError::Impedance(z0_ohm));
        }
        validate_roles(&roles)?;
        Ok(Self {
            entries,
            freq_hz,
            z0_ohm,
            roles,
        })
    }

    /// RIS-only matrix with elements numbered 1..=N in port order.
    pub fn ris(entries: CMatrix, freq_hz: f64, z0_ohm: f64) -> Result<Self, NetworkError> {
        let roles = (1..=entries.nrows()).map(PortRole::RisElement).collect();
        Self::new(entries, freq_hz, z0_ohm, roles)
    }

    /// Full link matrix: Tx first, N RIS elements, Rx last.
    pub fn link(entries: CMatrix, freq_hz: f64, z0_ohm: f64) -> Result<Self, NetworkError> {
        let p = entries.nrows();
        if p < 2 {
            return Err(NetworkError::RoleLayout(format!(
                "a link matrix needs at least 2 ports, got {p}"
            )));
        }
        let mut roles = Vec::with_capacity(p);
        roles.push(PortRole::Tx);
        roles.extend((1..p - 1).map(PortRole::RisElement));
        roles.push(PortRole::Rx);
        Self::new(entries, freq_hz, z0_ohm, roles)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn freq_hz(&self) -> f64 {
        self.freq_hz
    }

    pub fn z0_ohm(&self) -> f64 {
        self.z0_ohm
    }

    pub fn roles(&self) -> &[PortRole] {
        &self.roles
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// True for the Tx, RIS..., Rx layout.
    pub fn is_link(&self) -> bool {
        self.roles.first() == Some(&PortRole::Tx) && self.roles.last() == Some(&PortRole::Rx)
    }

    pub fn is_ris_only(&self) -> bool {
        self.roles
            .iter()
            .all(|r| matches!(r, PortRole::RisElement(_)))
    }

    /// Number of RIS element ports.
    pub fn ris_port_count(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| matches!(r, PortRole::RisElement(_)))
            .count()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Reinterpret the same entries with the Tx/RIS/Rx link layout.
    pub fn with_link_roles(self) -> Result<Self, NetworkError> {
        Self::link(self.entries, self.freq_hz, self.z0_ohm)
    }
}

fn validate_roles(roles: &[PortRole]) -> Result<(), NetworkError> {
    let tx = roles.iter().filter(|r| **r == PortRole::Tx).count();
    let rx = roles.iter().filter(|r| **r == PortRole::Rx).count();
    match (tx, rx) {
        (0, 0) => {}
        (1, 1) => {
            if roles[0] != PortRole::Tx || roles[roles.len() - 1] != PortRole::Rx {
                return Err(NetworkError::RoleLayout(
                    "Tx must be the first port and Rx the last".into(),
                ));
            }
        }
        _ => {
            return Err(NetworkError::RoleLayout(format!(
                "expected exactly one Tx and one Rx port, got {tx} Tx and {rx} Rx"
            )))
        }
    }
    let mut seen = std::collections::HashSet::new();
    for r in roles {
        if let PortRole::RisElement(m) = r {
            if !seen.insert(*m) {
                return Err(NetworkError::RoleLayout(format!(
                    "RIS element {m} appears twice"
                )));
            }
        }
    }
    Ok(())
}

/// Per-port reflection coefficients terminating the RIS ports.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionVector {
    gammas: Vec<Complex64>,
}

impl ReflectionVector {
    pub fn new(gammas: Vec<Complex64>) -> Result<Self, NetworkError> {
        for (index, g) in gammas.iter().enumerate() {
            let magnitude = g.norm();
            if !(magnitude <= 1.0 + GAMMA_SLACK) {
                return Err(NetworkError::ActiveLoad { index, magnitude });
            }
        }
        Ok(Self { gammas })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            gammas: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

/// Intermediate quantities of a loaded-port reduction, kept around so the
/// objective gradient can reuse the factorization.
pub(crate) struct LoadedReduction {
    /// 2x2 external matrix.
    pub reduced: CMatrix,
    /// `(I - S_ii Gamma)^-1`.
    pub inv_left: CMatrix,
}

/// Rows/cols of the link layout split into external `{Tx, Rx}` and internal
/// RIS blocks.
pub(crate) fn split_blocks(s: &CMatrix) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let p = s.nrows();
    let n = p - 2;
    let ext = [0, p - 1];
    let s_ee = CMatrix::from_fn(2, 2, |i, j| s[(ext[i], ext[j])]);
    let s_ei = CMatrix::from_fn(2, n, |i, j| s[(ext[i], j + 1)]);
    let s_ie = CMatrix::from_fn(n, 2, |i, j| s[(i + 1, ext[j])]);
    let s_ii = s.view((1, 1), (n, n)).into_owned();
    (s_ee, s_ei, s_ie, s_ii)
}

fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Reciprocal condition number in the 1-norm; 0 for a singular matrix.
pub fn rcond(m: &CMatrix) -> (f64, Option<CMatrix>) {
    if m.nrows() == 0 {
        return (1.0, Some(m.clone()));
    }
    match m.clone().try_inverse() {
        Some(inv) => {
            let denom = norm1(m) * norm1(&inv);
            let rc = if denom > 0.0 && denom.is_finite() {
                1.0 / denom
            } else {
                0.0
            };
            (rc, Some(inv))
        }
        None => (0.0, None),
    }
}

fn check_link_and_loads(full: &ScatterMatrix, loads: &ReflectionVector) -> Result<usize, NetworkError> {
    if !full.is_link() {
        return Err(NetworkError::Shape {
            expected: "Tx + RIS + Rx link",
            got: format!("{} ports without Tx/Rx layout", full.dim()),
        });
    }
    let n = full.dim() - 2;
    if loads.len() != n {
        return Err(NetworkError::LoadCount {
            expected: n,
            got: loads.len(),
        });
    }
    Ok(n)
}

pub(crate) fn reduce_loaded_detail(
    full: &ScatterMatrix,
    loads: &ReflectionVector,
) -> Result<LoadedReduction, NetworkError> {
    let n = check_link_and_loads(full, loads)?;
    let (s_ee, s_ei, s_ie, s_ii) = split_blocks(&full.entries);
    let g = loads.as_slice();
    // M = I - S_ii * Gamma, i.e. column j of S_ii scaled by gamma_j.
    let m = CMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        id - s_ii[(i, j)] * g[j]
    });
    let (rc, inv) = rcond(&m);
    let inv = match inv {
        Some(inv) if rc >= RCOND_THRESHOLD => inv,
        _ => return Err(NetworkError::IllConditioned { rcond: rc }),
    };
    // S_ei * Gamma scales column j by gamma_j.
    let mut s_ei_g = s_ei;
    for (j, gj) in g.iter().enumerate() {
        for i in 0..2 {
            s_ei_g[(i, j)] *= *gj;
        }
    }
    let reduced = s_ee + s_ei_g * &inv * s_ie;
    Ok(LoadedReduction {
        reduced,
        inv_left: inv,
    })
}

/// Terminate every RIS port of a link matrix with `loads` and return the
/// 2x2 matrix seen between Tx and Rx:
/// `S_ee + S_ei * Gamma * (I - S_ii * Gamma)^-1 * S_ie`.
pub fn reduce_loaded(
    full: &ScatterMatrix,
    loads: &ReflectionVector,
) -> Result<ScatterMatrix, NetworkError> {
    check_link_and_loads(full, loads)?;
    let reduced = if loads.as_slice().iter().all(|g| *g == Complex64::new(0.0, 0.0)) {
        let p = full.dim();
        let ext = [0, p - 1];
        CMatrix::from_fn(2, 2, |i, j| full.entries[(ext[i], ext[j])])
    } else {
        reduce_loaded_detail(full, loads)?.reduced
    };
    ScatterMatrix::new(
        reduced,
        full.freq_hz,
        full.z0_ohm,
        vec![PortRole::Tx, PortRole::Rx],
    )
}

/// Transducer power gain `|S_RxTx|^2` of a reduced {Tx, Rx} two-port
/// between matched terminations.
pub fn power_transfer(reduced: &ScatterMatrix) -> Result<f64, NetworkError> {
    if reduced.dim() != 2 || reduced.roles != [PortRole::Tx, PortRole::Rx] {
        return Err(NetworkError::Shape {
            expected: "2x2 {Tx, Rx}",
            got: format!("{}x{}", reduced.dim(), reduced.dim()),
        });
    }
    Ok(reduced.entries[(1, 0)].norm_sqr())
}

/// Largest singular value of a complex matrix (0 for an empty one).
pub fn max_singular_value(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// True iff every singular value is at most `1 + tol`.
pub fn check_passivity(s: &ScatterMatrix, tol: f64) -> bool {
    max_singular_value(&s.entries) <= 1.0 + tol
}

/// True iff `max |S_ij - S_ji| <= tol`.
pub fn check_reciprocity(s: &ScatterMatrix, tol: f64) -> bool {
    let m = &s.entries;
    let p = m.nrows();
    (0..p).all(|i| (i + 1..p).all(|j| (m[(i, j)] - m[(j, i)]).norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn three_port() -> ScatterMatrix {
        let mut s = CMatrix::zeros(3, 3);
        s[(1, 1)] = c(0.2, 0.0);
        s[(0, 1)] = c(0.5, 0.0);
        s[(1, 0)] = c(0.5, 0.0);
        s[(1, 2)] = c(0.4, 0.0);
        s[(2, 1)] = c(0.4, 0.0);
        ScatterMatrix::link(s, 3.55e9, 50.0).unwrap()
    }

    #[test]
    fn zero_loads_return_external_block_exactly() {
        let mut s = CMatrix::from_fn(4, 4, |i, j| c(0.1 * i as f64 - 0.03, -0.02 * j as f64));
        s[(0, 3)] = c(-0.0, 0.123456789);
        let full = ScatterMatrix::link(s.clone(), 1e9, 50.0).unwrap();
        let red = reduce_loaded(&full, &ReflectionVector::zeros(2)).unwrap();
        for (i, a) in [0, 3].iter().enumerate() {
            for (j, b) in [0, 3].iter().enumerate() {
                assert_eq!(red.get(i, j).re.to_bits(), s[(*a, *b)].re.to_bits());
                assert_eq!(red.get(i, j).im.to_bits(), s[(*a, *b)].im.to_bits());
            }
        }
    }

    #[test]
    fn three_port_reduction_matches_scalar_formula() {
        let full = three_port();
        let loads = ReflectionVector::new(vec![c(0.9, 0.0)]).unwrap();
        let red = reduce_loaded(&full, &loads).unwrap();
        let expected = 0.5 * 0.9 / (1.0 - 0.2 * 0.9) * 0.4;
        assert!((red.get(1, 0).re - 0.21951219512195122).abs() < 1e-15);
        assert!((red.get(1, 0) - c(expected, 0.0)).norm() < 1e-15);
        let p = power_transfer(&red).unwrap();
        assert!((p - 0.048185603807257574).abs() < 1e-15);
    }

    #[test]
    fn power_transfer_is_phase_independent() {
        let s = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(0.1, std::f64::consts::FRAC_PI_3), c(0.0, 0.0)],
        );
        let red = ScatterMatrix::new(s, 1e9, 50.0, vec![PortRole::Tx, PortRole::Rx]).unwrap();
        assert!((power_transfer(&red).unwrap() - 0.01).abs() < 1e-15);
        let zero = ScatterMatrix::new(CMatrix::zeros(2, 2), 1e9, 50.0, vec![PortRole::Tx, PortRole::Rx]).unwrap();
        assert_eq!(power_transfer(&zero).unwrap(), 0.0);
    }

    #[test]
    fn power_transfer_rejects_wrong_shape() {
        assert!(power_transfer(&three_port()).is_err());
    }

    #[test]
    fn passivity_examples() {
        let z = ScatterMatrix::ris(CMatrix::zeros(3, 3), 1e9, 50.0).unwrap();
        assert!(check_passivity(&z, 0.0));
        let id = ScatterMatrix::ris(CMatrix::identity(3, 3), 1e9, 50.0).unwrap();
        assert!(check_passivity(&id, 1e-9));
        let mut big = CMatrix::zeros(3, 3);
        big[(1, 2)] = c(1.5, 0.0);
        let big = ScatterMatrix::ris(big, 1e9, 50.0).unwrap();
        assert!(!check_passivity(&big, 0.49));
        assert!(check_passivity(&big, 0.51));
    }

    #[test]
    fn reciprocity_examples() {
        let d = ScatterMatrix::ris(
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5)])),
            1e9,
            50.0,
        )
        .unwrap();
        assert!(check_reciprocity(&d, 0.0));
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.3, 0.0), c(0.1, 0.0), c(0.0, 0.0)]);
        let a = ScatterMatrix::ris(a, 1e9, 50.0).unwrap();
        assert!(!check_reciprocity(&a, 0.1));
        assert!(check_reciprocity(&a, 0.2 + 1e-12));
    }

    #[test]
    fn singular_loading_is_rejected() {
        // S_ii = 1 with gamma = 1 makes I - S_ii*Gamma exactly zero.
        let mut s = CMatrix::zeros(3, 3);
        s[(1, 1)] = c(1.0, 0.0);
        let full = ScatterMatrix::link(s, 1e9, 50.0).unwrap();
        let err = reduce_loaded(&full, &ReflectionVector::new(vec![c(1.0, 0.0)]).unwrap()).unwrap_err();
        assert!(matches!(err, NetworkError::IllConditioned { .. }));
    }

    #[test]
    fn load_validation() {
        assert!(ReflectionVector::new(vec![c(1.0, 1e-3)]).is_err());
        assert!(ReflectionVector::new(vec![Complex64::from_polar(1.0, 0.3)]).is_ok());
        let full = three_port();
        assert!(matches!(
            reduce_loaded(&full, &ReflectionVector::zeros(2)),
            Err(NetworkError::LoadCount { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn constructor_invariants() {
        assert!(ScatterMatrix::ris(CMatrix::zeros(2, 3), 1e9, 50.0).is_err());
        assert!(ScatterMatrix::ris(CMatrix::zeros(2, 2), 0.0, 50.0).is_err());
        assert!(ScatterMatrix::ris(CMatrix::zeros(2, 2), 1e9, -50.0).is_err());
        assert!(ScatterMatrix::new(
            CMatrix::zeros(3, 3),
            1e9,
            50.0,
            vec![PortRole::RisElement(1), PortRole::Tx, PortRole::Rx]
        )
        .is_err());
        assert!(ScatterMatrix::new(
            CMatrix::zeros(2, 2),
            1e9,
            50.0,
            vec![PortRole::RisElement(1), PortRole::RisElement(1)]
        )
        .is_err());
        let link = ScatterMatrix::link(CMatrix::zeros(4, 4), 1e9, 50.0).unwrap();
        assert!(link.is_link());
        assert_eq!(link.ris_port_count(), 2);
    }
}
