//! Extremality of an invariant coupling `w`.
//!
//! `w` is extreme exactly when no nonzero orbit-constant function `z` on the
//! support satisfies, for every `x1` and every `x2`,
//!
//! ```text
//!   sum_{x2} z(x1, x2) w(x1, x2) = 0      sum_{x1} z(x1, x2) w(x1, x2) = 0
//! ```
//!
//! With one unknown per support orbit this is a homogeneous linear system (the
//! [`RegressionSystem`]); its kernel is computed exactly. A kernel vector `z`
//! refutes extremality through the pair `w (1 ± e z)`, which shares the
//! marginals and invariance of `w` and averages back to it.

use num_traits::{Signed, Zero};

use crate::arith::{RatMatrix, Rational};
use crate::coupling::{marginals, validate, Coupling};
use crate::symmetry::OrbitDecomposition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtremalityError {
    #[error("coupling has empty support")]
    EmptySupport,
    #[error("coupling is {coupling:?} but the orbit decomposition is for {orbits:?}")]
    SizeMismatch {
        coupling: (usize, usize),
        orbits: (usize, usize),
    },
    #[error("certificate is identically zero")]
    ZeroCertificate,
    #[error("certificate has {found} entries, expected one per support orbit ({expected})")]
    CertificateLength { expected: usize, found: usize },
    #[error("certificate violates the regression condition at {0}")]
    NotAWitness(String),
}

/// One row per point of `X1`, then one per point of `X2`; one column per
/// support orbit. Entry `(x1, O)` is the mass of `O` in row `x1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegressionSystem {
    pub variables: Vec<usize>,
    pub matrix: RatMatrix,
}

/// Refutation of extremality: `omega_plus` and `omega_minus` are distinct
/// couplings with the same marginals whose midpoint is the tested coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub zeta: Vec<Rational>,
    pub epsilon: Rational,
    pub omega_plus: Coupling,
    pub omega_minus: Coupling,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalityVerdict {
    pub extreme: bool,
    pub null_dim: usize,
    pub support_orbits: Vec<usize>,
    pub certificate: Option<Certificate>,
}

fn check_sizes(c: &Coupling, orbits: &OrbitDecomposition) -> Result<(), ExtremalityError> {
    if (c.n1(), c.n2()) != (orbits.n1(), orbits.n2()) {
        return Err(ExtremalityError::SizeMismatch {
            coupling: (c.n1(), c.n2()),
            orbits: (orbits.n1(), orbits.n2()),
        });
    }
    Ok(())
}

pub fn build_regression_system(
    c: &Coupling,
    orbits: &OrbitDecomposition,
) -> Result<RegressionSystem, ExtremalityError> {
    check_sizes(c, orbits)?;
    let variables = c.support_orbits(orbits);
    if variables.is_empty() {
        return Err(ExtremalityError::EmptySupport);
    }
    let n1 = c.n1();
    let mut matrix = RatMatrix::zeros(n1 + c.n2(), variables.len());
    for (k, &o) in variables.iter().enumerate() {
        for &(x1, x2) in &orbits.orbits12()[o] {
            let w = c.mass((x1, x2));
            matrix[(x1, k)] += w;
            matrix[(n1 + x2, k)] += w;
        }
    }
    Ok(RegressionSystem { variables, matrix })
}

pub fn test_extreme(c: &Coupling, orbits: &OrbitDecomposition) -> Result<ExtremalityVerdict, ExtremalityError> {
    let system = build_regression_system(c, orbits)?;
    let kernel = system.matrix.null_space();
    let certificate = match kernel.first() {
        Some(zeta) => Some(perturbation_pair(c, orbits, &system.variables, zeta)?),
        None => None,
    };
    Ok(ExtremalityVerdict {
        extreme: kernel.is_empty(),
        null_dim: kernel.len(),
        support_orbits: system.variables,
        certificate,
    })
}

/// Builds `w (1 ± e z)` with `e = 1 / (2 max |z|)`. `z` is indexed like
/// `support_orbits` and must satisfy the regression conditions.
pub fn perturbation_pair(
    c: &Coupling,
    orbits: &OrbitDecomposition,
    support_orbits: &[usize],
    zeta: &[Rational],
) -> Result<Certificate, ExtremalityError> {
    check_sizes(c, orbits)?;
    if zeta.len() != support_orbits.len() {
        return Err(ExtremalityError::CertificateLength {
            expected: support_orbits.len(),
            found: zeta.len(),
        });
    }
    let max = zeta.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero);
    if max.is_zero() {
        return Err(ExtremalityError::ZeroCertificate);
    }
    let system = build_regression_system(c, orbits)?;
    if system.variables != support_orbits {
        return Err(ExtremalityError::NotAWitness("support orbits".into()));
    }
    let residual = system.matrix.mul_vec(zeta).expect("lengths checked");
    if let Some(row) = residual.iter().position(|r| !r.is_zero()) {
        let at = if row < c.n1() {
            format!("x1 = {row}")
        } else {
            format!("x2 = {}", row - c.n1())
        };
        return Err(ExtremalityError::NotAWitness(at));
    }

    let epsilon = (max * Rational::from_integer(2.into())).recip();
    let mut plus = c.matrix().clone();
    let mut minus = c.matrix().clone();
    for (&o, z) in support_orbits.iter().zip(zeta) {
        let shift = &epsilon * z;
        for &cell in &orbits.orbits12()[o] {
            let w = c.mass(cell);
            plus[cell] = w + w * &shift;
            minus[cell] = w - w * &shift;
        }
    }
    Ok(Certificate {
        zeta: zeta.to_vec(),
        epsilon,
        omega_plus: Coupling::from_trusted(plus),
        omega_minus: Coupling::from_trusted(minus),
    })
}

impl Certificate {
    /// Re-checks the refutation from scratch: both perturbed couplings pass
    /// validation against the marginals of `c`, they differ, and their
    /// midpoint is `c`.
    pub fn verify(&self, c: &Coupling, orbits: &OrbitDecomposition) -> Result<(), String> {
        let (mu1, mu2) = marginals(c);
        for (name, w) in [("omega_plus", &self.omega_plus), ("omega_minus", &self.omega_minus)] {
            validate(w.matrix().clone(), &mu1, &mu2, orbits).map_err(|v| format!("{name}: {v}"))?;
        }
        if self.omega_plus == self.omega_minus {
            return Err("omega_plus equals omega_minus".into());
        }
        let two = Rational::from_integer(2.into());
        let midpoint = self
            .omega_plus
            .matrix()
            .entries()
            .iter()
            .zip(self.omega_minus.matrix().entries())
            .map(|(a, b)| (a + b) / &two);
        if !midpoint.eq(c.matrix().entries().iter().cloned()) {
            return Err("midpoint differs from the tested coupling".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::coupling::{graphic_coupling, Marginal};
    use crate::symmetry::{close_group, decompose_orbits, ActionGenerator};

    fn trivial_coupling(m: RatMatrix) -> (Coupling, OrbitDecomposition) {
        let orbits = OrbitDecomposition::trivial(m.rows(), m.cols());
        let c = Coupling::from_trusted(m);
        let (a, b) = marginals(&c);
        (validate(c.matrix().clone(), &a, &b, &orbits).unwrap(), orbits)
    }

    fn swap_orbits() -> OrbitDecomposition {
        let g = close_group(2, 2, &[ActionGenerator::new(vec![1, 0], vec![1, 0]).unwrap()], 10).unwrap();
        decompose_orbits(2, 2, &g).unwrap()
    }

    fn quarter() -> RatMatrix {
        RatMatrix::from_ratios(&[&[(1, 4), (1, 4)], &[(1, 4), (1, 4)]])
    }

    #[test]
    fn regression_system_of_two_point_example() {
        let (c, orbits) = trivial_coupling(RatMatrix::from_ratios(&[&[(0, 1), (1, 3)], &[(1, 3), (1, 3)]]));
        let sys = build_regression_system(&c, &orbits).unwrap();
        assert_eq!(sys.variables, vec![1, 2, 3]);
        // columns (0,1), (1,0), (1,1); rows x1=0, x1=1, x2=0, x2=1
        let t = ratio(1, 3);
        let z = int(0);
        let expected = RatMatrix::from_rows(vec![
            vec![t.clone(), z.clone(), z.clone()],
            vec![z.clone(), t.clone(), t.clone()],
            vec![z.clone(), t.clone(), z.clone()],
            vec![t.clone(), z.clone(), t.clone()],
        ])
        .unwrap();
        assert_eq!(sys.matrix, expected);
    }

    #[test]
    fn regression_system_of_permutation() {
        let c = graphic_coupling(&[1, 2, 0], 3, &Marginal::uniform(3)).unwrap();
        let sys = build_regression_system(&c, &OrbitDecomposition::trivial(3, 3)).unwrap();
        assert_eq!((sys.matrix.rows(), sys.matrix.cols()), (6, 3));
        for k in 0..3 {
            let col = sys.matrix.column(k);
            assert_eq!(col.iter().filter(|x| !x.is_zero()).count(), 2);
            assert!(col.iter().all(|x| x.is_zero() || x == &ratio(1, 3)));
        }
    }

    #[test]
    fn regression_system_under_swap() {
        let orbits = swap_orbits();
        let c = validate(quarter(), &Marginal::uniform(2), &Marginal::uniform(2), &orbits).unwrap();
        let sys = build_regression_system(&c, &orbits).unwrap();
        assert_eq!((sys.matrix.rows(), sys.matrix.cols()), (4, 2));
        assert!(sys.matrix.entries().iter().all(|x| x == &ratio(1, 4)));
    }

    #[test]
    fn two_point_example_is_extreme() {
        let (c, orbits) = trivial_coupling(RatMatrix::from_ratios(&[&[(0, 1), (1, 3)], &[(1, 3), (1, 3)]]));
        let v = test_extreme(&c, &orbits).unwrap();
        assert!(v.extreme);
        assert_eq!(v.null_dim, 0);
        assert!(v.certificate.is_none());
    }

    #[test]
    fn uniform_product_is_not_extreme() {
        let (c, orbits) = trivial_coupling(quarter());
        let v = test_extreme(&c, &orbits).unwrap();
        assert!(!v.extreme);
        assert_eq!(v.null_dim, 1);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.zeta, vec![int(1), int(-1), int(-1), int(1)]);
        assert_eq!(cert.epsilon, ratio(1, 2));
        assert_eq!(
            cert.omega_plus.matrix(),
            &RatMatrix::from_ratios(&[&[(3, 8), (1, 8)], &[(1, 8), (3, 8)]])
        );
        assert_eq!(
            cert.omega_minus.matrix(),
            &RatMatrix::from_ratios(&[&[(1, 8), (3, 8)], &[(3, 8), (1, 8)]])
        );
        cert.verify(&c, &orbits).unwrap();
    }

    #[test]
    fn permutations_are_extreme() {
        for map in [[0, 1, 2], [2, 0, 1], [1, 0, 2]] {
            let c = graphic_coupling(&map, 3, &Marginal::uniform(3)).unwrap();
            assert!(test_extreme(&c, &OrbitDecomposition::trivial(3, 3)).unwrap().extreme);
        }
    }

    #[test]
    fn swap_invariant_midpoint_has_two_orbit_certificate() {
        let orbits = swap_orbits();
        let c = validate(quarter(), &Marginal::uniform(2), &Marginal::uniform(2), &orbits).unwrap();
        let v = test_extreme(&c, &orbits).unwrap();
        assert!(!v.extreme);
        assert_eq!(v.support_orbits, vec![0, 1]);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.zeta, vec![int(1), int(-1)]);
        cert.verify(&c, &orbits).unwrap();
    }

    #[test]
    fn single_orbit_support_is_extreme() {
        let orbits = swap_orbits();
        let id = RatMatrix::from_ratios(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 2)]]);
        let c = validate(id, &Marginal::uniform(2), &Marginal::uniform(2), &orbits).unwrap();
        let v = test_extreme(&c, &orbits).unwrap();
        assert!(v.extreme);
        assert_eq!(v.support_orbits, vec![0]);
    }

    #[test]
    fn certificate_is_scale_invariant() {
        let (c, orbits) = trivial_coupling(quarter());
        let vars = vec![0, 1, 2, 3];
        let zeta = vec![int(1), int(-1), int(-1), int(1)];
        let scaled: Vec<Rational> = zeta.iter().map(|z| z * int(7)).collect();
        let a = perturbation_pair(&c, &orbits, &vars, &zeta).unwrap();
        let b = perturbation_pair(&c, &orbits, &vars, &scaled).unwrap();
        assert_eq!(a.omega_plus, b.omega_plus);
        assert_eq!(a.omega_minus, b.omega_minus);
        assert_eq!(b.epsilon, ratio(1, 14));
    }

    #[test]
    fn perturbation_rejects_bad_witnesses() {
        let (c, orbits) = trivial_coupling(quarter());
        let vars = vec![0, 1, 2, 3];
        let zero = vec![int(0); 4];
        assert_eq!(
            perturbation_pair(&c, &orbits, &vars, &zero),
            Err(ExtremalityError::ZeroCertificate)
        );
        let wrong = vec![int(1), int(1), int(-1), int(-1)];
        assert!(matches!(
            perturbation_pair(&c, &orbits, &vars, &wrong),
            Err(ExtremalityError::NotAWitness(_))
        ));
        assert!(matches!(
            perturbation_pair(&c, &orbits, &vars, &zero[..3]),
            Err(ExtremalityError::CertificateLength { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let (c, orbits) = trivial_coupling(quarter());
        let mut cert = test_extreme(&c, &orbits).unwrap().certificate.unwrap();
        cert.omega_minus = cert.omega_plus.clone();
        assert!(cert.verify(&c, &orbits).is_err());
    }

    #[test]
    fn size_mismatch_is_reported() {
        let (c, _) = trivial_coupling(quarter());
        assert!(matches!(
            test_extreme(&c, &OrbitDecomposition::trivial(3, 2)),
            Err(ExtremalityError::SizeMismatch { .. })
        ));
    }
}
