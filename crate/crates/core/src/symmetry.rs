//! Finite permutation groups acting simultaneously on two finite spaces, and
//! the orbit decomposition of `X1`, `X2` and `X1 x X2` under the diagonal
//! action `g (x1, x2) = (g x1, g x2)`.

use std::collections::{HashSet, VecDeque};

pub const DEFAULT_GROUP_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymmetryError {
    #[error("{side} permutation {perm:?} is not a bijection of 0..{size}")]
    NotAPermutation {
        side: &'static str,
        perm: Vec<usize>,
        size: usize,
    },
    #[error("group closure exceeds the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("closure acts on {closure:?} points but {given:?} were requested")]
    SizeMismatch {
        closure: (usize, usize),
        given: (usize, usize),
    },
}

fn is_bijection(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&x| x < perm.len() && !std::mem::replace(&mut seen[x], true))
}

/// One group element, given by its action on both spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionGenerator {
    pub perm1: Vec<usize>,
    pub perm2: Vec<usize>,
}

impl ActionGenerator {
    pub fn new(perm1: Vec<usize>, perm2: Vec<usize>) -> Result<Self, SymmetryError> {
        for (side, perm) in [("first", &perm1), ("second", &perm2)] {
            if !is_bijection(perm) {
                return Err(SymmetryError::NotAPermutation {
                    side,
                    perm: perm.clone(),
                    size: perm.len(),
                });
            }
        }
        Ok(Self { perm1, perm2 })
    }

    pub fn identity(n1: usize, n2: usize) -> Self {
        Self {
            perm1: (0..n1).collect(),
            perm2: (0..n2).collect(),
        }
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            perm1: other.perm1.iter().map(|&x| self.perm1[x]).collect(),
            perm2: other.perm2.iter().map(|&x| self.perm2[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = |p: &[usize]| {
            let mut out = vec![0; p.len()];
            for (i, &x) in p.iter().enumerate() {
                out[x] = i;
            }
            out
        };
        Self {
            perm1: inv(&self.perm1),
            perm2: inv(&self.perm2),
        }
    }

    pub fn apply_cell(&self, (x1, x2): (usize, usize)) -> (usize, usize) {
        (self.perm1[x1], self.perm2[x2])
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.perm1.len(), self.perm2.len())
    }
}

/// All elements of the group generated by a set of [`ActionGenerator`]s, in
/// breadth-first insertion order starting from the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupClosure {
    n1: usize,
    n2: usize,
    elements: Vec<ActionGenerator>,
}

impl GroupClosure {
    pub fn trivial(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            elements: vec![ActionGenerator::identity(n1, n2)],
        }
    }

    pub fn elements(&self) -> &[ActionGenerator] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }
}

pub fn close_group(
    n1: usize,
    n2: usize,
    generators: &[ActionGenerator],
    cap: usize,
) -> Result<GroupClosure, SymmetryError> {
    for g in generators {
        if g.sizes() != (n1, n2) {
            return Err(SymmetryError::SizeMismatch {
                closure: g.sizes(),
                given: (n1, n2),
            });
        }
    }
    let identity = ActionGenerator::identity(n1, n2);
    let mut seen = HashSet::from([identity.clone()]);
    let mut elements = vec![identity];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let next = g.compose(&elements[i]);
            if seen.insert(next.clone()) {
                if elements.len() == cap {
                    return Err(SymmetryError::CapExceeded { cap });
                }
                elements.push(next);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(GroupClosure { n1, n2, elements })
}

/// Orbits of `X1`, `X2` and `X1 x X2`. Orbits are listed by their least
/// member and members are sorted, so the decomposition depends only on the
/// group, not on how it was generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    n1: usize,
    n2: usize,
    orbits1: Vec<Vec<usize>>,
    orbits2: Vec<Vec<usize>>,
    orbits12: Vec<Vec<(usize, usize)>>,
    orbit_of1: Vec<usize>,
    orbit_of2: Vec<usize>,
    orbit_of12: Vec<usize>,
}

fn partition<T: Copy + Ord>(
    points: &[T],
    images: impl Fn(T) -> Vec<T>,
    index: impl Fn(T) -> usize,
) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut orbit_of = vec![usize::MAX; points.len()];
    let mut orbits = Vec::new();
    for &x in points {
        if orbit_of[index(x)] != usize::MAX {
            continue;
        }
        let mut orbit = images(x);
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            orbit_of[index(y)] = orbits.len();
        }
        orbits.push(orbit);
    }
    (orbits, orbit_of)
}

pub fn decompose_orbits(n1: usize, n2: usize, closure: &GroupClosure) -> Result<OrbitDecomposition, SymmetryError> {
    if closure.sizes() != (n1, n2) {
        return Err(SymmetryError::SizeMismatch {
            closure: closure.sizes(),
            given: (n1, n2),
        });
    }
    let els = closure.elements();
    let xs1: Vec<usize> = (0..n1).collect();
    let xs2: Vec<usize> = (0..n2).collect();
    let cells: Vec<(usize, usize)> = (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    let (orbits1, orbit_of1) = partition(&xs1, |x| els.iter().map(|g| g.perm1[x]).collect(), |x| x);
    let (orbits2, orbit_of2) = partition(&xs2, |x| els.iter().map(|g| g.perm2[x]).collect(), |x| x);
    let (orbits12, orbit_of12) = partition(
        &cells,
        |c| els.iter().map(|g| g.apply_cell(c)).collect(),
        |(i, j)| i * n2 + j,
    );
    Ok(OrbitDecomposition {
        n1,
        n2,
        orbits1,
        orbits2,
        orbits12,
        orbit_of1,
        orbit_of2,
        orbit_of12,
    })
}

impl OrbitDecomposition {
    pub fn trivial(n1: usize, n2: usize) -> Self {
        decompose_orbits(n1, n2, &GroupClosure::trivial(n1, n2)).expect("sizes agree")
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn m1(&self) -> usize {
        self.orbits1.len()
    }

    pub fn m2(&self) -> usize {
        self.orbits2.len()
    }

    pub fn m12(&self) -> usize {
        self.orbits12.len()
    }

    pub fn orbits1(&self) -> &[Vec<usize>] {
        &self.orbits1
    }

    pub fn orbits2(&self) -> &[Vec<usize>] {
        &self.orbits2
    }

    pub fn orbits12(&self) -> &[Vec<(usize, usize)>] {
        &self.orbits12
    }

    pub fn orbit_of1(&self, x: usize) -> usize {
        self.orbit_of1[x]
    }

    pub fn orbit_of2(&self, x: usize) -> usize {
        self.orbit_of2[x]
    }

    pub fn orbit_of_cell(&self, (x1, x2): (usize, usize)) -> usize {
        self.orbit_of12[x1 * self.n2 + x2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn swap2() -> ActionGenerator {
        ActionGenerator::new(vec![1, 0], vec![1, 0]).unwrap()
    }

    fn cycle3() -> ActionGenerator {
        ActionGenerator::new(vec![1, 2, 0], vec![1, 2, 0]).unwrap()
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(ActionGenerator::new(vec![0, 0], vec![0, 1]).is_err());
        assert!(ActionGenerator::new(vec![0, 1], vec![2, 0]).is_err());
    }

    #[test]
    fn closure_sizes() {
        assert_eq!(close_group(3, 4, &[], 10).unwrap().size(), 1);
        assert_eq!(close_group(2, 2, &[swap2()], 10).unwrap().size(), 2);
        let z3 = close_group(3, 3, &[cycle3()], 10).unwrap();
        assert_eq!(z3.size(), 3);
        assert_eq!(z3.elements()[0], ActionGenerator::identity(3, 3));
        assert_eq!(z3.elements()[1], cycle3());
        assert_eq!(z3.elements()[2], cycle3().compose(&cycle3()));
    }

    #[test]
    fn closure_cap() {
        // S_4 on the first space, trivial on a 1-point second space
        let gens = [
            ActionGenerator::new(vec![1, 0, 2, 3], vec![0]).unwrap(),
            ActionGenerator::new(vec![1, 2, 3, 0], vec![0]).unwrap(),
        ];
        assert_eq!(close_group(4, 1, &gens, 24).unwrap().size(), 24);
        assert_eq!(
            close_group(4, 1, &gens, 23),
            Err(SymmetryError::CapExceeded { cap: 23 })
        );
    }

    #[test]
    fn closure_rejects_wrong_sizes() {
        assert!(matches!(
            close_group(3, 3, &[swap2()], 10),
            Err(SymmetryError::SizeMismatch { .. })
        ));
        let g = close_group(2, 2, &[swap2()], 10).unwrap();
        assert!(decompose_orbits(3, 2, &g).is_err());
    }

    #[test]
    fn trivial_orbits() {
        let d = OrbitDecomposition::trivial(3, 3);
        assert_eq!((d.m1(), d.m2(), d.m12()), (3, 3, 9));
        assert_eq!(d.orbit_of_cell((1, 2)), 5);
    }

    #[test]
    fn swap_orbits() {
        let g = close_group(2, 2, &[swap2()], 10).unwrap();
        let d = decompose_orbits(2, 2, &g).unwrap();
        assert_eq!((d.m1(), d.m2(), d.m12()), (1, 1, 2));
        assert_eq!(d.orbits12(), &[vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);
    }

    #[test]
    fn cycle_orbits_by_difference() {
        let g = close_group(3, 3, &[cycle3()], 10).unwrap();
        let d = decompose_orbits(3, 3, &g).unwrap();
        assert_eq!((d.m1(), d.m2(), d.m12()), (1, 1, 3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.orbit_of_cell((i, j)), (j + 3 - i) % 3);
            }
        }
    }

    #[test]
    fn presentation_independent() {
        // <(0 1 2)> and <(0 2 1)> are the same group
        let a = close_group(3, 3, &[cycle3()], 10).unwrap();
        let b = close_group(3, 3, &[cycle3().inverse()], 10).unwrap();
        assert_eq!(decompose_orbits(3, 3, &a).unwrap(), decompose_orbits(3, 3, &b).unwrap());
    }

    fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    fn generators() -> impl Strategy<Value = (usize, usize, Vec<ActionGenerator>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(n1, n2)| {
            let g = (perm(n1), perm(n2)).prop_map(|(a, b)| ActionGenerator::new(a, b).unwrap());
            (Just(n1), Just(n2), proptest::collection::vec(g, 0..3))
        })
    }

    proptest! {
        #[test]
        fn orbits_are_invariant((n1, n2, gens) in generators()) {
            let g = close_group(n1, n2, &gens, DEFAULT_GROUP_CAP).unwrap();
            let d = decompose_orbits(n1, n2, &g).unwrap();
            for el in g.elements() {
                for (k, orbit) in d.orbits12().iter().enumerate() {
                    for &c in orbit {
                        prop_assert_eq!(d.orbit_of_cell(el.apply_cell(c)), k);
                    }
                }
                for x in 0..n1 {
                    prop_assert_eq!(d.orbit_of1(el.perm1[x]), d.orbit_of1(x));
                }
            }
            let cells: usize = d.orbits12().iter().map(Vec::len).sum();
            prop_assert_eq!(cells, n1 * n2);
            prop_assert!(d.m12() >= d.m1().max(d.m2()));
        }

        #[test]
        fn closure_is_a_group((n1, n2, gens) in generators()) {
            let g = close_group(n1, n2, &gens, DEFAULT_GROUP_CAP).unwrap();
            let set: HashSet<_> = g.elements().iter().cloned().collect();
            for a in g.elements() {
                prop_assert!(set.contains(&a.inverse()));
                for b in g.elements() {
                    prop_assert!(set.contains(&a.compose(b)));
                }
            }
        }
    }
}
