//! Couplings with fixed marginals that are invariant under the diagonal group
//! action, together with the two constructions that produce extreme ones:
//! graphs of maps and extension by an independent coordinate.
//!
//! Product spaces are indexed x-major: the pair `(x, z)` of `X x Z` has index
//! `x * |Z| + z`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{format_rational, RatMatrix, Rational};
use crate::symmetry::{ActionGenerator, OrbitDecomposition, SymmetryError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CouplingError {
    #[error("invalid marginal: {0}")]
    InvalidMarginal(String),
    #[error("map sends {point} to {image}, outside a space of size {size}")]
    MapOutOfRange { point: usize, image: usize, size: usize },
    #[error("the group action does not preserve the set of positive-mass points")]
    ActionDoesNotStabilizeSupport,
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

/// Probability vector on a finite space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Marginal(Vec<Rational>);

impl Marginal {
    pub fn new(masses: Vec<Rational>) -> Result<Self, CouplingError> {
        if masses.is_empty() {
            return Err(CouplingError::InvalidMarginal("empty space".into()));
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| m.is_negative()) {
            return Err(CouplingError::InvalidMarginal(format!(
                "mass {} at point {i} is negative",
                format_rational(m)
            )));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(CouplingError::InvalidMarginal(format!(
                "masses sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Self(masses))
    }

    pub fn uniform(n: usize) -> Self {
        let m = Rational::new(1.into(), (n as i64).into());
        Self(vec![m; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut v = vec![Rational::zero(); n];
        v[at] = Rational::one();
        Self(v)
    }

    pub fn masses(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(Signed::is_positive)
    }

    /// `self ⊗ other`, x-major.
    pub fn product(&self, other: &Marginal) -> Marginal {
        Marginal(self.0.iter().flat_map(|a| other.0.iter().map(move |b| a * b)).collect())
    }

    /// First orbit on which the masses are not constant.
    fn non_constant_orbit(&self, orbits: &[Vec<usize>]) -> Option<usize> {
        orbits
            .iter()
            .position(|orbit| orbit.iter().any(|&x| self.0[x] != self.0[orbit[0]]))
    }
}

/// A single failed invariant found while validating a candidate coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Dimensions {
        expected: (usize, usize),
        found: (usize, usize),
    },
    MarginalNotInvariant {
        side: u8,
        orbit: Vec<usize>,
    },
    NegativeEntry {
        row: usize,
        col: usize,
        value: Rational,
    },
    RowSum {
        row: usize,
        expected: Rational,
        found: Rational,
    },
    ColumnSum {
        col: usize,
        expected: Rational,
        found: Rational,
    },
    OrbitNotConstant {
        orbit: Vec<(usize, usize)>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimensions { expected, found } => write!(
                f,
                "matrix is {}x{}, marginals require {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::MarginalNotInvariant { side, orbit } => {
                write!(f, "mu{side} is not constant on orbit {orbit:?}")
            }
            Violation::NegativeEntry { row, col, value } => {
                write!(f, "entry ({row},{col}) is negative: {}", format_rational(value))
            }
            Violation::RowSum { row, expected, found } => write!(
                f,
                "row {row} sum mismatch: expected {}, found {}",
                format_rational(expected),
                format_rational(found)
            ),
            Violation::ColumnSum { col, expected, found } => write!(
                f,
                "column {col} sum mismatch: expected {}, found {}",
                format_rational(expected),
                format_rational(found)
            ),
            Violation::OrbitNotConstant { orbit } => {
                write!(f, "mass is not constant on diagonal orbit {orbit:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct Violations(pub Vec<Violation>);

/// A validated element of the invariant coupling set: nonnegative, total mass
/// one, with the declared marginals, constant on diagonal orbits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coupling {
    matrix: RatMatrix,
}

impl Coupling {
    /// Wraps a matrix that is already known to be a coupling of its own
    /// marginals. Callers outside this crate go through [`validate`].
    pub(crate) fn from_trusted(matrix: RatMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn n1(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n2(&self) -> usize {
        self.matrix.cols()
    }

    pub fn mass(&self, cell: (usize, usize)) -> &Rational {
        &self.matrix[cell]
    }

    /// Cells with positive mass, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.n1())
            .flat_map(|i| (0..self.n2()).map(move |j| (i, j)))
            .filter(|&c| self.matrix[c].is_positive())
            .collect()
    }

    /// Indices of the diagonal orbits carrying positive mass, ascending (which
    /// is also the order of their least cells).
    pub fn support_orbits(&self, orbits: &OrbitDecomposition) -> Vec<usize> {
        orbits
            .orbits12()
            .iter()
            .enumerate()
            .filter(|(_, o)| self.matrix[o[0]].is_positive())
            .map(|(k, _)| k)
            .collect()
    }
}

pub fn validate(
    matrix: RatMatrix,
    mu1: &Marginal,
    mu2: &Marginal,
    orbits: &OrbitDecomposition,
) -> Result<Coupling, Violations> {
    let expected = (mu1.len(), mu2.len());
    let found = (matrix.rows(), matrix.cols());
    let mut violations = Vec::new();
    if expected != found || (orbits.n1(), orbits.n2()) != expected {
        violations.push(Violation::Dimensions { expected, found });
        return Err(Violations(violations));
    }
    for (side, mu, parts) in [(1, mu1, orbits.orbits1()), (2, mu2, orbits.orbits2())] {
        if let Some(k) = mu.non_constant_orbit(parts) {
            violations.push(Violation::MarginalNotInvariant {
                side,
                orbit: parts[k].clone(),
            });
        }
    }
    for r in 0..matrix.rows() {
        for c in 0..matrix.cols() {
            if matrix[(r, c)].is_negative() {
                violations.push(Violation::NegativeEntry {
                    row: r,
                    col: c,
                    value: matrix[(r, c)].clone(),
                });
            }
        }
    }
    for (row, (found, expected)) in matrix.row_sums().into_iter().zip(mu1.masses()).enumerate() {
        if &found != expected {
            violations.push(Violation::RowSum {
                row,
                expected: expected.clone(),
                found,
            });
        }
    }
    for (col, (found, expected)) in matrix.col_sums().into_iter().zip(mu2.masses()).enumerate() {
        if &found != expected {
            violations.push(Violation::ColumnSum {
                col,
                expected: expected.clone(),
                found,
            });
        }
    }
    for orbit in orbits.orbits12() {
        let first = &matrix[orbit[0]];
        if orbit.iter().any(|&c| &matrix[c] != first) {
            violations.push(Violation::OrbitNotConstant { orbit: orbit.clone() });
        }
    }
    if violations.is_empty() {
        Ok(Coupling { matrix })
    } else {
        Err(Violations(violations))
    }
}

pub fn marginals(c: &Coupling) -> (Marginal, Marginal) {
    (Marginal(c.matrix.row_sums()), Marginal(c.matrix.col_sums()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GraphicKind {
    GraphOfMapForward,
    GraphOfMapBackward,
    Both,
    Neither,
}

/// Whether the support is the graph of a map `X1 -> X2` (forward), `X2 -> X1`
/// (backward), or a bijection (both). `map` is the forward map when one
/// exists, else the backward map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicVerdict {
    pub kind: GraphicKind,
    pub map: Option<Vec<usize>>,
}

fn single_support(lines: impl Iterator<Item = Vec<usize>>) -> Option<Vec<usize>> {
    lines
        .map(|cells| match cells.as_slice() {
            [only] => Some(*only),
            _ => None,
        })
        .collect()
}

pub fn is_graphic(c: &Coupling) -> GraphicVerdict {
    let m = &c.matrix;
    let forward = single_support((0..m.rows()).map(|r| (0..m.cols()).filter(|&j| m[(r, j)].is_positive()).collect()));
    let backward = single_support((0..m.cols()).map(|j| (0..m.rows()).filter(|&r| m[(r, j)].is_positive()).collect()));
    match (forward, backward) {
        (Some(f), Some(_)) => GraphicVerdict {
            kind: GraphicKind::Both,
            map: Some(f),
        },
        (Some(f), None) => GraphicVerdict {
            kind: GraphicKind::GraphOfMapForward,
            map: Some(f),
        },
        (None, Some(b)) => GraphicVerdict {
            kind: GraphicKind::GraphOfMapBackward,
            map: Some(b),
        },
        (None, None) => GraphicVerdict {
            kind: GraphicKind::Neither,
            map: None,
        },
    }
}

/// Law of `(x, map(x))` with `x ~ mu1`; the second marginal is the pushforward.
pub fn graphic_coupling(map: &[usize], n2: usize, mu1: &Marginal) -> Result<Coupling, CouplingError> {
    if map.len() != mu1.len() {
        return Err(CouplingError::InvalidMarginal(format!(
            "map has {} points but mu1 has {}",
            map.len(),
            mu1.len()
        )));
    }
    let mut m = RatMatrix::zeros(map.len(), n2);
    for (x, &y) in map.iter().enumerate() {
        if y >= n2 {
            return Err(CouplingError::MapOutOfRange {
                point: x,
                image: y,
                size: n2,
            });
        }
        m[(x, y)] = mu1.masses()[x].clone();
    }
    Ok(Coupling { matrix: m })
}

/// Law of `((x, z), (y, z))` where `(x, y) ~ c` and `z ~ nu` independently.
pub fn extend_with_independent(c: &Coupling, nu: &Marginal) -> Coupling {
    let k = nu.len();
    let mut m = RatMatrix::zeros(c.n1() * k, c.n2() * k);
    for (x, y) in c.support() {
        for (z, w) in nu.masses().iter().enumerate() {
            if !w.is_zero() {
                m[(x * k + z, y * k + z)] = c.mass((x, y)) * w;
            }
        }
    }
    Coupling { matrix: m }
}

/// Re-indexing that drops zero-mass points from both spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    n1: usize,
    n2: usize,
    kept1: Vec<usize>,
    kept2: Vec<usize>,
}

/// Result of [`strip_zero_mass`]: the problem restricted to positive-mass
/// points, plus the map back to the original indexing.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub reduction: Reduction,
    pub mu1: Marginal,
    pub mu2: Marginal,
    pub generators: Vec<ActionGenerator>,
}

pub fn strip_zero_mass(
    mu1: &Marginal,
    mu2: &Marginal,
    generators: &[ActionGenerator],
) -> Result<Reduced, CouplingError> {
    let kept = |mu: &Marginal| -> Vec<usize> { (0..mu.len()).filter(|&i| mu.0[i].is_positive()).collect() };
    let kept1 = kept(mu1);
    let kept2 = kept(mu2);
    let new_index = |n: usize, kept: &[usize]| {
        let mut idx = vec![usize::MAX; n];
        for (k, &i) in kept.iter().enumerate() {
            idx[i] = k;
        }
        idx
    };
    let idx1 = new_index(mu1.len(), &kept1);
    let idx2 = new_index(mu2.len(), &kept2);
    let restrict = |perm: &[usize], kept: &[usize], idx: &[usize]| -> Result<Vec<usize>, CouplingError> {
        kept.iter()
            .map(|&i| match idx.get(perm[i]) {
                Some(&k) if k != usize::MAX => Ok(k),
                _ => Err(CouplingError::ActionDoesNotStabilizeSupport),
            })
            .collect()
    };
    let generators = generators
        .iter()
        .map(|g| {
            if g.sizes() != (mu1.len(), mu2.len()) {
                return Err(SymmetryError::SizeMismatch {
                    closure: g.sizes(),
                    given: (mu1.len(), mu2.len()),
                }
                .into());
            }
            let p1 = restrict(&g.perm1, &kept1, &idx1)?;
            let p2 = restrict(&g.perm2, &kept2, &idx2)?;
            Ok(ActionGenerator::new(p1, p2)?)
        })
        .collect::<Result<Vec<_>, CouplingError>>()?;
    let pick = |mu: &Marginal, kept: &[usize]| Marginal(kept.iter().map(|&i| mu.0[i].clone()).collect());
    Ok(Reduced {
        mu1: pick(mu1, &kept1),
        mu2: pick(mu2, &kept2),
        generators,
        reduction: Reduction {
            n1: mu1.len(),
            n2: mu2.len(),
            kept1,
            kept2,
        },
    })
}

impl Reduction {
    pub fn is_identity(&self) -> bool {
        self.kept1.len() == self.n1 && self.kept2.len() == self.n2
    }

    pub fn kept1(&self) -> &[usize] {
        &self.kept1
    }

    pub fn kept2(&self) -> &[usize] {
        &self.kept2
    }

    /// Embeds a reduced coupling back into the original spaces (zero mass on
    /// the stripped points).
    pub fn expand(&self, c: &Coupling) -> Coupling {
        let mut m = RatMatrix::zeros(self.n1, self.n2);
        for (a, &i) in self.kept1.iter().enumerate() {
            for (b, &j) in self.kept2.iter().enumerate() {
                m[(i, j)] = c.matrix[(a, b)].clone();
            }
        }
        Coupling { matrix: m }
    }
}
