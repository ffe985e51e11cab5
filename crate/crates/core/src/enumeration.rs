//! Vertex enumeration for the invariant coupling polytope by support search.
//!
//! In orbit-mass coordinates (one unknown per diagonal orbit, the common mass
//! of its cells) the polytope is `{c >= 0 : A c = b}` where `A` has one row per
//! marginal equation. A vertex is determined by its support `S`: the columns
//! `A_S` are independent and `A_S c = b` has a strictly positive solution. An
//! extreme point has between `max(m1, m2)` and `m1 + m2` support orbits, so only
//! subsets in that window are tried.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{RatMatrix, Rational, Solution};
use crate::coupling::{Coupling, Marginal};
use crate::extremality::{test_extreme, ExtremalityError};
use crate::symmetry::OrbitDecomposition;

pub const DEFAULT_BUDGET: u64 = 5_000_000;

const CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("enumeration needs {required} restricted solves but the budget is {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },
    #[error("invalid marginals: {0}")]
    InvalidMarginals(String),
    #[error(transparent)]
    Extremality(#[from] ExtremalityError),
}

/// Marginal equations in orbit-mass coordinates: entry `(row, O)` counts the
/// cells of orbit `O` in that row (`x1` rows first, then `x2` rows).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub matrix: RatMatrix,
    pub rhs: Vec<Rational>,
}

impl ConstraintSystem {
    pub fn new(mu1: &Marginal, mu2: &Marginal, orbits: &OrbitDecomposition) -> Self {
        let n1 = orbits.n1();
        let mut matrix = RatMatrix::zeros(n1 + orbits.n2(), orbits.m12());
        for (k, orbit) in orbits.orbits12().iter().enumerate() {
            for &(x1, x2) in orbit {
                matrix[(x1, k)] += Rational::one();
                matrix[(n1 + x2, k)] += Rational::one();
            }
        }
        let rhs = mu1.masses().iter().chain(mu2.masses()).cloned().collect();
        Self { matrix, rhs }
    }
}

/// Coupling with the given mass on every cell of each listed orbit.
pub fn expand_orbit_masses(orbits: &OrbitDecomposition, support: &[usize], masses: &[Rational]) -> Coupling {
    let mut m = RatMatrix::zeros(orbits.n1(), orbits.n2());
    for (&o, w) in support.iter().zip(masses) {
        for &cell in &orbits.orbits12()[o] {
            m[cell] = w.clone();
        }
    }
    Coupling::from_trusted(m)
}

/// Vertex test through the constraint matrix alone: the support-orbit columns
/// of [`ConstraintSystem`] are linearly independent. Marginal values do not
/// enter, only the incidence structure of the support.
pub fn is_vertex_by_constraints(c: &Coupling, orbits: &OrbitDecomposition) -> bool {
    let (mu1, mu2) = crate::coupling::marginals(c);
    let system = ConstraintSystem::new(&mu1, &mu2, orbits);
    let support = c.support_orbits(orbits);
    system.matrix.select_columns(&support).rank() == support.len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub coupling: Coupling,
    /// Support orbit indices, ascending.
    pub support: Vec<usize>,
    pub orbit_masses: Vec<Rational>,
}

impl Vertex {
    /// Number of diagonal orbits in the support.
    pub fn orbit_count(&self) -> usize {
        self.support.len()
    }
}

/// Orders supports as bitmasks with orbit `k` at bit `k`.
pub fn bitmask_cmp(a: &[usize], b: &[usize]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub vertices: Vec<Vertex>,
    pub subsets_examined: u64,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Inclusive `[max(m1, m2), m1 + m2]`.
pub fn support_window(orbits: &OrbitDecomposition) -> (usize, usize) {
    (orbits.m1().max(orbits.m2()), orbits.m1() + orbits.m2())
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(n - i) / BigUint::from(i + 1)
    })
}

/// `sum_{lo <= r <= hi} C(m12, r)`.
pub fn subset_count(orbits: &OrbitDecomposition) -> BigUint {
    let (lo, hi) = support_window(orbits);
    (lo..=hi).map(|r| binomial(orbits.m12(), r)).sum()
}

fn check_marginals(mu1: &Marginal, mu2: &Marginal, orbits: &OrbitDecomposition) -> Result<(), EnumerationError> {
    if (mu1.len(), mu2.len()) != (orbits.n1(), orbits.n2()) {
        return Err(EnumerationError::InvalidMarginals(format!(
            "marginal sizes {:?} do not match the orbit decomposition {:?}",
            (mu1.len(), mu2.len()),
            (orbits.n1(), orbits.n2())
        )));
    }
    for (side, mu, parts) in [(1, mu1, orbits.orbits1()), (2, mu2, orbits.orbits2())] {
        if !mu.is_strictly_positive() {
            return Err(EnumerationError::InvalidMarginals(format!(
                "mu{side} has a zero-mass point"
            )));
        }
        if let Some(orbit) = parts
            .iter()
            .find(|o| o.iter().any(|&x| mu.masses()[x] != mu.masses()[o[0]]))
        {
            return Err(EnumerationError::InvalidMarginals(format!(
                "mu{side} is not constant on orbit {orbit:?}"
            )));
        }
    }
    Ok(())
}

/// Lexicographic successor of a `k`-subset of `0..n`.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

struct Search<'a> {
    system: &'a ConstraintSystem,
    rows_of: Vec<Vec<usize>>,
    nrows: usize,
}

impl Search<'_> {
    fn try_support(&self, support: &[usize]) -> Option<Vec<Rational>> {
        let mut covered = vec![false; self.nrows];
        for &o in support {
            for &r in &self.rows_of[o] {
                covered[r] = true;
            }
        }
        if covered.contains(&false) {
            return None;
        }
        match self.system.matrix.select_columns(support).solve(&self.system.rhs) {
            Ok(Solution::Unique(x)) if x.iter().all(Signed::is_positive) => Some(x),
            _ => None,
        }
    }
}

pub fn enumerate_extreme(
    mu1: &Marginal,
    mu2: &Marginal,
    orbits: &OrbitDecomposition,
    budget: u64,
) -> Result<VertexSet, EnumerationError> {
    check_marginals(mu1, mu2, orbits)?;
    let required = subset_count(orbits);
    if required > BigUint::from(budget) {
        return Err(EnumerationError::BudgetExceeded { required, budget });
    }
    let system = ConstraintSystem::new(mu1, mu2, orbits);
    let search = Search {
        rows_of: (0..orbits.m12())
            .map(|k| {
                (0..system.matrix.rows())
                    .filter(|&r| !system.matrix[(r, k)].is_zero())
                    .collect()
            })
            .collect(),
        nrows: system.matrix.rows(),
        system: &system,
    };

    let m12 = orbits.m12();
    let (lo, hi) = support_window(orbits);
    let mut found: Vec<(Vec<usize>, Vec<Rational>)> = Vec::new();
    let mut examined = 0u64;
    for r in lo..=hi.min(m12) {
        let mut comb: Vec<usize> = (0..r).collect();
        let mut more = r > 0;
        while more {
            let mut chunk = Vec::with_capacity(CHUNK);
            while more && chunk.len() < CHUNK {
                chunk.push(comb.clone());
                more = next_combination(&mut comb, m12);
            }
            examined += chunk.len() as u64;
            found.par_extend(
                chunk
                    .into_par_iter()
                    .filter_map(|s| search.try_support(&s).map(|x| (s, x))),
            );
        }
    }
    found.sort_by(|a, b| bitmask_cmp(&a.0, &b.0));
    found.dedup_by(|a, b| a.0 == b.0);

    let vertices = found
        .into_iter()
        .map(|(support, orbit_masses)| Vertex {
            coupling: expand_orbit_masses(orbits, &support, &orbit_masses),
            support,
            orbit_masses,
        })
        .collect();
    Ok(VertexSet {
        vertices,
        subsets_examined: examined,
    })
}

/// Outcome of comparing the vertices for uniform marginals on `m` points with
/// the `m!` scaled permutation matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirkhoffReport {
    pub m: usize,
    pub count: usize,
    pub expected_count: BigUint,
    pub all_permutation_type: bool,
    /// Permutations (as `sigma(x)` arrays) with no matching vertex.
    pub missing: Vec<Vec<usize>>,
    pub vertices: VertexSet,
}

impl BirkhoffReport {
    pub fn passed(&self) -> bool {
        self.all_permutation_type && self.missing.is_empty() && BigUint::from(self.count) == self.expected_count
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; m];
    out.push(perm.clone());
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            out.push(perm.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub fn verify_birkhoff(m: usize, budget: u64) -> Result<BirkhoffReport, EnumerationError> {
    if m == 0 {
        return Err(EnumerationError::InvalidMarginals("m must be at least 1".into()));
    }
    let mu = Marginal::uniform(m);
    let orbits = OrbitDecomposition::trivial(m, m);
    let vertices = enumerate_extreme(&mu, &mu, &orbits, budget)?;
    let scale = Rational::new(1.into(), (m as i64).into());
    let as_permutation = |c: &Coupling| -> Option<Vec<usize>> {
        (0..m)
            .map(|x| {
                let row = c.matrix().row(x);
                let mut hits = (0..m).filter(|&y| !row[y].is_zero());
                match (hits.next(), hits.next()) {
                    (Some(y), None) if row[y] == scale => Some(y),
                    _ => None,
                }
            })
            .collect::<Option<Vec<usize>>>()
            .filter(|sigma| {
                let mut seen = vec![false; m];
                sigma.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
            })
    };
    let found: Vec<Option<Vec<usize>>> = vertices.vertices.iter().map(|v| as_permutation(&v.coupling)).collect();
    let missing = permutations(m)
        .into_iter()
        .filter(|sigma| !found.iter().any(|f| f.as_ref() == Some(sigma)))
        .collect();
    Ok(BirkhoffReport {
        m,
        count: vertices.len(),
        expected_count: (1..=m).map(BigUint::from).product(),
        all_permutation_type: found.iter().all(Option::is_some),
        missing,
        vertices,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportBoundsReport {
    pub lower: usize,
    pub upper: usize,
    pub orbit_counts: Vec<usize>,
    pub all_within: bool,
    pub vertex_count: usize,
    pub count_bound: BigUint,
    pub count_within: bool,
}

pub fn check_support_bounds(vs: &VertexSet, orbits: &OrbitDecomposition) -> SupportBoundsReport {
    let (lower, upper) = support_window(orbits);
    let orbit_counts: Vec<usize> = vs.vertices.iter().map(Vertex::orbit_count).collect();
    let count_bound = subset_count(orbits);
    SupportBoundsReport {
        lower,
        upper,
        all_within: orbit_counts.iter().all(|n| (lower..=upper).contains(n)),
        orbit_counts,
        vertex_count: vs.len(),
        count_within: BigUint::from(vs.len()) <= count_bound,
        count_bound,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportUniquenessReport {
    /// `(i, j)` where the support of vertex `i` is contained in that of `j`.
    pub containments: Vec<(usize, usize)>,
}

impl SupportUniquenessReport {
    pub fn passed(&self) -> bool {
        self.containments.is_empty()
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

pub fn check_support_uniqueness(vs: &VertexSet) -> SupportUniquenessReport {
    let v = &vs.vertices;
    let containments = (0..v.len())
        .flat_map(|i| (0..v.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && is_subset(&v[i].support, &v[j].support))
        .collect();
    SupportUniquenessReport { containments }
}

/// Runs the extremality engine on every vertex; returns the indices that fail.
pub fn non_extreme_vertices(vs: &VertexSet, orbits: &OrbitDecomposition) -> Result<Vec<usize>, EnumerationError> {
    let mut bad = Vec::new();
    for (i, v) in vs.vertices.iter().enumerate() {
        if !test_extreme(&v.coupling, orbits)?.extreme {
            bad.push(i);
        }
    }
    Ok(bad)
}
