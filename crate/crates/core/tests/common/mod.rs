#![allow(dead_code)]

use extremal_core::arith::{parse_rational, RatMatrix, Rational};
use extremal_core::coupling::Marginal;
use extremal_core::symmetry::{close_group, decompose_orbits, ActionGenerator, OrbitDecomposition, DEFAULT_GROUP_CAP};

pub struct Case {
    pub name: &'static str,
    pub mu1: Marginal,
    pub mu2: Marginal,
    pub orbits: OrbitDecomposition,
    pub generators: Vec<ActionGenerator>,
}

pub fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

pub fn marginal(xs: &[&str]) -> Marginal {
    Marginal::new(xs.iter().map(|s| q(s)).collect()).unwrap()
}

pub fn matrix(rows: &[&[&str]]) -> RatMatrix {
    RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| q(s)).collect()).collect()).unwrap()
}

pub fn generators(gens: &[(&[usize], &[usize])]) -> Vec<ActionGenerator> {
    gens.iter()
        .map(|(a, b)| ActionGenerator::new(a.to_vec(), b.to_vec()).unwrap())
        .collect()
}

pub fn orbits_of(n1: usize, n2: usize, gens: &[ActionGenerator]) -> OrbitDecomposition {
    let closure = close_group(n1, n2, gens, DEFAULT_GROUP_CAP).unwrap();
    decompose_orbits(n1, n2, &closure).unwrap()
}

pub fn orbits(n1: usize, n2: usize, gens: &[(&[usize], &[usize])]) -> OrbitDecomposition {
    orbits_of(n1, n2, &generators(gens))
}

/// Orbits for the action on `(X1 x Z) x (X2 x Z)` that moves the `X` parts
/// and fixes the `k`-point factor `Z`, with `(x, z)` stored at `x * k + z`.
pub fn lifted_orbits(case: &Case, k: usize) -> OrbitDecomposition {
    let lift = |perm: &[usize]| -> Vec<usize> { (0..perm.len() * k).map(|i| perm[i / k] * k + i % k).collect() };
    let gens: Vec<ActionGenerator> = case
        .generators
        .iter()
        .map(|g| ActionGenerator::new(lift(&g.perm1), lift(&g.perm2)).unwrap())
        .collect();
    orbits_of(case.mu1.len() * k, case.mu2.len() * k, &gens)
}

fn case(name: &'static str, mu1: &[&str], mu2: &[&str], gens: &[(&[usize], &[usize])]) -> Case {
    let (mu1, mu2) = (marginal(mu1), marginal(mu2));
    let generators = generators(gens);
    let orbits = orbits_of(mu1.len(), mu2.len(), &generators);
    Case {
        name,
        mu1,
        mu2,
        orbits,
        generators,
    }
}

const SWAP2: &[usize] = &[1, 0];
const CYCLE3: &[usize] = &[1, 2, 0];
const ID2: &[usize] = &[0, 1];
const ID3: &[usize] = &[0, 1, 2];
const PAIRS4: &[usize] = &[1, 0, 3, 2];

/// Instances up to 4x4 under the trivial group, a Z2 swap and a Z3 cycle.
pub fn battery() -> Vec<Case> {
    vec![
        case("uniform 2x2", &["1/2", "1/2"], &["1/2", "1/2"], &[]),
        case("thirds 2x2", &["1/3", "2/3"], &["1/3", "2/3"], &[]),
        case("skew 2x2", &["1/4", "3/4"], &["2/5", "3/5"], &[]),
        case("uniform 3x3", &["1/3", "1/3", "1/3"], &["1/3", "1/3", "1/3"], &[]),
        case("skew 3x2", &["1/6", "1/3", "1/2"], &["1/2", "1/2"], &[]),
        case("skew 3x3", &["1/4", "1/4", "1/2"], &["1/3", "1/3", "1/3"], &[]),
        case("skew 2x4", &["1/3", "2/3"], &["1/10", "1/5", "3/10", "2/5"], &[]),
        case("skew 4x3", &["1/10", "1/5", "3/10", "2/5"], &["1/3", "1/3", "1/3"], &[]),
        case("swap 2x2", &["1/2", "1/2"], &["1/2", "1/2"], &[(SWAP2, SWAP2)]),
        case("swap x1 only 2x2", &["1/2", "1/2"], &["1/4", "3/4"], &[(SWAP2, ID2)]),
        case(
            "cycle 3x3",
            &["1/3", "1/3", "1/3"],
            &["1/3", "1/3", "1/3"],
            &[(CYCLE3, CYCLE3)],
        ),
        case(
            "cycle x1 only 3x2",
            &["1/3", "1/3", "1/3"],
            &["1/4", "3/4"],
            &[(CYCLE3, ID2)],
        ),
        case(
            "cycle x2 only 2x3",
            &["1/5", "4/5"],
            &["1/3", "1/3", "1/3"],
            &[(ID2, CYCLE3)],
        ),
        case(
            "cycle x1 3x3",
            &["1/3", "1/3", "1/3"],
            &["1/6", "1/3", "1/2"],
            &[(CYCLE3, ID3)],
        ),
        case(
            "paired swap 4x4",
            &["1/6", "1/6", "1/3", "1/3"],
            &["1/8", "1/8", "3/8", "3/8"],
            &[(PAIRS4, PAIRS4)],
        ),
        case("paired swap uniform 4x4", &["1/4"; 4], &["1/4"; 4], &[(PAIRS4, PAIRS4)]),
    ]
}
