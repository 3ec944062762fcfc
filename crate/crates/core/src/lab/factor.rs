use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anf::Polynomial;
use crate::boolfun::{annihilators, MAX_ANNIHILATOR_VARS};

/// Span elements are enumerated up to this annihilator dimension; above it
/// only the basis is used.
const MAX_SPAN_DIM: usize = 12;

/// Nodes above this depth split into two branches, so a tree has at most
/// `2^(BRANCH_DEPTH - 1)` paths.
const BRANCH_DEPTH: usize = 5;

/// A polynomial with the affine factors split off along each branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationTree {
    pub root: Polynomial,
    pub branches: Vec<(Polynomial, FactorizationTree)>,
}

/// One root-to-leaf path of a [`FactorizationTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<Polynomial>,
    pub cofactor: Polynomial,
}

impl Factorization {
    pub fn product(&self) -> Polynomial {
        self.factors.iter().fold(self.cofactor.clone(), |acc, l| acc.mul(l))
    }

    /// Whether some subset of the factors multiplies to the same polynomial
    /// as `set`. Affine factors are only determined up to the constraints
    /// they impose, so `(a+b+1)(b+c+1)` and `(a+b+1)(a+c+1)` count as equal.
    pub fn contains_product_of(&self, set: &[Polynomial]) -> bool {
        let target = Polynomial::product(set);
        let n = self.factors.len();
        (1u32..1 << n).any(|mask| {
            let subset = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &self.factors[i]);
            Polynomial::product(subset) == target
        })
    }
}

impl FactorizationTree {
    pub fn leaf(root: Polynomial) -> Self {
        FactorizationTree { root, branches: Vec::new() }
    }

    pub fn is_leaf(&self) -> bool {
        self.branches.is_empty()
    }

    /// Every branch factor times its subtree's root gives back the node's root.
    pub fn verify(&self) -> bool {
        self.branches
            .iter()
            .all(|(l, sub)| l.mul(&sub.root) == self.root && sub.verify())
    }

    pub fn paths(&self) -> Vec<Factorization> {
        if self.is_leaf() {
            return vec![Factorization { factors: Vec::new(), cofactor: self.root.clone() }];
        }
        let mut out = Vec::new();
        for (l, sub) in &self.branches {
            for mut path in sub.paths() {
                path.factors.insert(0, l.clone());
                out.push(path);
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<&Polynomial> {
        if self.is_leaf() {
            return vec![&self.root];
        }
        self.branches.iter().flat_map(|(_, sub)| sub.leaves()).collect()
    }
}

/// All non-constant affine `l` with `(l + 1) * p = 0`, i.e. `p = l * p`.
pub fn affine_factors(p: &Polynomial) -> Vec<Polynomial> {
    let vars = p.support();
    if vars.is_empty() || vars.len() > MAX_ANNIHILATOR_VARS {
        return Vec::new();
    }
    let space = annihilators(p, &vars, 1).expect("support within limits");
    let span = if space.dimension() <= MAX_SPAN_DIM { space.elements() } else { space.basis };
    span.into_iter().filter(|g| g.degree() == 1).map(|g| g.complement()).collect()
}

fn descend(p: Polynomial, first: Option<Polynomial>, depth: usize, rng: &mut ChaCha8Rng) -> FactorizationTree {
    let chosen: Vec<Polynomial> = match first {
        Some(l) => vec![l],
        None => {
            let width = if depth < BRANCH_DEPTH { 2 } else { 1 };
            affine_factors(&p).choose_multiple(rng, width).cloned().collect()
        }
    };
    let branches = chosen
        .into_iter()
        .map(|l| {
            let pivot = *l.support().choose(rng).expect("non-constant factor");
            let quotient = p.factor_out_at(&l, pivot).expect("candidate divides");
            let sub = descend(quotient, None, depth + 1, rng);
            (l, sub)
        })
        .collect();
    FactorizationTree { root: p, branches }
}

/// Splits off affine factors of `p` at random, up to `max_trees` times.
///
/// Tree `t` starts from the `t`-th affine factor of `p` (cycling once all have
/// been used). Below the root, nodes split on two random factors up to a
/// fixed depth and on one after that; the variable each factor eliminates is
/// random as well. Trees with the same paths are reported once.
pub fn explore_factorizations(p: &Polynomial, max_trees: usize, seed: u64) -> Vec<FactorizationTree> {
    let roots = affine_factors(p);
    if roots.is_empty() {
        return vec![FactorizationTree::leaf(p.clone())];
    }
    let mut trees: Vec<FactorizationTree> = Vec::new();
    for t in 0..max_trees {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let tree = descend(p.clone(), Some(roots[t % roots.len()].clone()), 0, &mut rng);
        if !trees.iter().any(|other| other.paths() == tree.paths()) {
            trees.push(tree);
        }
    }
    trees
}
