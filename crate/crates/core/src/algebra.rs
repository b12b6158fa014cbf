//! Characteristic semigroups, group simplicity, isomorphism search, prime
//! and similar operators, and homomorphisms between semiautomata.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::{distinct_transformations, Alphabet, Automaton, InputFunction, Semiautomaton, Transformation};
use crate::operators::Factorization;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{states} states exceed the cap of {cap}")]
    StateSpaceTooLarge { states: usize, cap: usize },
    #[error("{size} elements exceed the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("semigroup is not a group")]
    NotAGroup,
    #[error("no state maps onto the initial state")]
    NoInitialPreimage,
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(HomFailure),
}

/// Size caps for the brute-force searches. Exceeding one is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// States of a semiautomaton whose semigroup is computed.
    pub states: usize,
    /// Elements of a characteristic semigroup.
    pub elements: usize,
    /// Order of a group tested for simplicity.
    pub group: usize,
    /// Size of the objects in an isomorphism search.
    pub isomorphism: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            states: 8,
            elements: 100_000,
            group: 24,
            isomorphism: 8,
        }
    }
}

/// A finite semigroup of transformations. The product `x . y` applies `x`
/// first, then `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semigroup {
    pub elements: Vec<Transformation>,
    /// `table[i][j]` is the index of `elements[i] . elements[j]`.
    pub table: Vec<Vec<usize>>,
}

impl Semigroup {
    /// The closure of `generators` under composition.
    pub fn generated(generators: &[Transformation], limits: &Limits) -> Result<Self, AlgebraError> {
        let mut elements: Vec<Transformation> = Vec::new();
        for g in generators {
            if !elements.contains(g) {
                elements.push(g.clone());
            }
        }
        let gens = elements.clone();
        let mut seen: std::collections::HashMap<Transformation, usize> =
            elements.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let mut i = 0;
        while i < elements.len() {
            for g in &gens {
                let p = elements[i].then(g);
                if !seen.contains_key(&p) {
                    if elements.len() >= limits.elements {
                        return Err(AlgebraError::TooLarge {
                            size: elements.len() + 1,
                            cap: limits.elements,
                        });
                    }
                    seen.insert(p.clone(), elements.len());
                    elements.push(p);
                }
            }
            i += 1;
        }
        let table = elements
            .iter()
            .map(|x| elements.iter().map(|y| seen[&x.then(y)]).collect())
            .collect();
        Ok(Semigroup { elements, table })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn identity(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&e| (0..n).all(|x| self.table[e][x] == x && self.table[x][e] == x))
    }

    pub fn is_monoid(&self) -> bool {
        self.identity().is_some()
    }

    pub fn inverse(&self, i: usize) -> Option<usize> {
        let e = self.identity()?;
        (0..self.len()).find(|&j| self.table[i][j] == e && self.table[j][i] == e)
    }

    pub fn is_group(&self) -> bool {
        self.is_monoid() && (0..self.len()).all(|i| self.inverse(i).is_some())
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// An identity plus two elements `r`, `s` with `r.s = s`, `s.s = s`,
    /// `r.r = r`, `s.r = r`.
    pub fn is_flip_flop_monoid(&self) -> bool {
        let Some(e) = self.identity() else { return false };
        let others: Vec<usize> = (0..self.len()).filter(|&x| x != e).collect();
        others.len() == 2 && others.iter().all(|&x| others.iter().all(|&y| self.table[x][y] == y))
    }

    /// Element names `s0, s1, ...` in element order.
    pub fn element_names(&self) -> Vec<String> {
        (0..self.len()).map(|i| format!("s{i}")).collect()
    }
}

/// The semigroup generated by the letter transformations of `d`.
pub fn characteristic_semigroup(d: &Semiautomaton, limits: &Limits) -> Result<Semigroup, AlgebraError> {
    if d.n_states() > limits.states {
        return Err(AlgebraError::StateSpaceTooLarge {
            states: d.n_states(),
            cap: limits.states,
        });
    }
    Semigroup::generated(&distinct_transformations(d), limits)
}

/// `A_S`: states `S ∪ {e}`, letters `S`, `delta(x, y) = x . y`. The
/// identity state `e` is added only when `S` has none.
pub fn semiautomaton_of_semigroup(s: &Semigroup) -> Semiautomaton {
    let n = s.len();
    let letters = s.element_names();
    let mut states = letters.clone();
    let mut delta: Vec<Vec<usize>> = s.table.clone();
    if s.identity().is_none() {
        states.push("e".into());
        delta.push((0..n).collect());
    }
    Semiautomaton::new(Alphabet::Named(letters), states, delta).expect("closed table")
}

/// Simple iff the only normal subgroups are `{e}` and `G`. The trivial
/// group is not simple.
pub fn is_simple_group(g: &Semigroup, limits: &Limits) -> Result<bool, AlgebraError> {
    if !g.is_group() {
        return Err(AlgebraError::NotAGroup);
    }
    let n = g.len();
    if n > limits.group {
        return Err(AlgebraError::TooLarge { size: n, cap: limits.group });
    }
    if n == 1 {
        return Ok(false);
    }
    let full: u64 = (1u64 << n) - 1;
    let e = g.identity().expect("group");
    Ok(subgroups(g)
        .into_iter()
        .filter(|&h| h != full && h != 1 << e)
        .all(|h| !is_normal_subgroup(g, h)))
}

fn closure(g: &Semigroup, mut set: u64) -> u64 {
    loop {
        let mut next = set;
        for i in 0..g.len() {
            if set >> i & 1 == 1 {
                for j in 0..g.len() {
                    if set >> j & 1 == 1 {
                        next |= 1 << g.table[i][j];
                    }
                }
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

/// All subgroups as bitsets: cyclic ones, then joins until nothing new appears.
fn subgroups(g: &Semigroup) -> BTreeSet<u64> {
    let mut all: BTreeSet<u64> = (0..g.len()).map(|x| closure(g, 1 << x)).collect();
    loop {
        let current: Vec<u64> = all.iter().copied().collect();
        let mut grew = false;
        for (i, &a) in current.iter().enumerate() {
            for &b in &current[i + 1..] {
                if all.insert(closure(g, a | b)) {
                    grew = true;
                }
            }
        }
        if !grew {
            return all;
        }
    }
}

fn is_normal_subgroup(g: &Semigroup, h: u64) -> bool {
    let members: Vec<usize> = (0..g.len()).filter(|&x| h >> x & 1 == 1).collect();
    (0..g.len()).all(|x| {
        let left: u64 = members.iter().fold(0, |acc, &m| acc | 1 << g.table[x][m]);
        let right: u64 = members.iter().fold(0, |acc, &m| acc | 1 << g.table[m][x]);
        left == right
    })
}

/// A bijection `f` with `f(x . y) = f(x) . f(y)`, if one exists.
pub fn semigroups_isomorphic(s: &Semigroup, t: &Semigroup, limits: &Limits) -> Result<Option<Vec<usize>>, AlgebraError> {
    let n = s.len();
    if n > limits.isomorphism || t.len() > limits.isomorphism {
        return Err(AlgebraError::TooLarge {
            size: n.max(t.len()),
            cap: limits.isomorphism,
        });
    }
    if n != t.len() {
        return Ok(None);
    }
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn consistent(s: &Semigroup, t: &Semigroup, f: &[usize], k: usize) -> bool {
        (0..=k).all(|i| {
            (0..=k).all(|j| {
                let p = s.table[i][j];
                f[p] == usize::MAX || f[p] == t.table[f[i]][f[j]]
            })
        })
    }
    fn search(s: &Semigroup, t: &Semigroup, f: &mut Vec<usize>, used: &mut Vec<bool>, k: usize) -> bool {
        if k == f.len() {
            return true;
        }
        for c in 0..f.len() {
            if used[c] {
                continue;
            }
            f[k] = c;
            used[c] = true;
            if consistent(s, t, f, k) && search(s, t, f, used, k + 1) {
                return true;
            }
            used[c] = false;
            f[k] = usize::MAX;
        }
        false
    }
    Ok(search(s, t, &mut f, &mut used, 0).then_some(f))
}

/// State and letter bijections between two semiautomata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiautomatonIsomorphism {
    pub states: Vec<usize>,
    pub letters: Vec<usize>,
}

/// Bijections `pi` on states and `lambda` on letters with
/// `pi(delta1(q, a)) = delta2(pi(q), lambda(a))`.
pub fn semiautomata_isomorphic(
    d1: &Semiautomaton,
    d2: &Semiautomaton,
    limits: &Limits,
) -> Result<Option<SemiautomatonIsomorphism>, AlgebraError> {
    let n = d1.n_states();
    if n > limits.isomorphism || d2.n_states() > limits.isomorphism {
        return Err(AlgebraError::TooLarge {
            size: n.max(d2.n_states()),
            cap: limits.isomorphism,
        });
    }
    if n != d2.n_states() || d1.n_letters() != d2.n_letters() {
        return Ok(None);
    }
    let t1: Vec<Transformation> = (0..d1.n_letters()).map(|a| d1.transformation(a)).collect();
    let t2: Vec<Transformation> = (0..d2.n_letters()).map(|a| d2.transformation(a)).collect();
    let mut found = None;
    for_each_permutation(n, &mut |pi| {
        // pi . t . pi^-1 in the coordinates of d2
        let mut letters = Vec::with_capacity(t1.len());
        let mut taken = vec![false; t2.len()];
        for t in &t1 {
            let mut image = vec![0; n];
            for q in 0..n {
                image[pi[q]] = pi[t.0[q]];
            }
            let image = Transformation(image);
            match (0..t2.len()).find(|&b| !taken[b] && t2[b] == image) {
                Some(b) => {
                    taken[b] = true;
                    letters.push(b);
                }
                None => return false,
            }
        }
        found = Some(SemiautomatonIsomorphism {
            states: pi.to_vec(),
            letters,
        });
        true
    });
    Ok(found)
}

/// Calls `f` on every permutation of `0..n` until it returns true.
fn for_each_permutation(n: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if k == perm.len() {
            return f(perm);
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if go(perm, k + 1, f) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    go(&mut (0..n).collect(), 0, f)
}

/// One letter per distinct transformation.
pub fn collapse_letters(d: &Semiautomaton) -> Semiautomaton {
    let ts = distinct_transformations(d);
    let names = (0..ts.len()).map(|i| format!("t{i}")).collect();
    let delta = (0..d.n_states()).map(|q| ts.iter().map(|t| t.0[q]).collect()).collect();
    Semiautomaton::new(Alphabet::Named(names), d.states.clone(), delta).expect("well-formed")
}

/// Two states whose transformations are exactly identity and the two constants.
pub fn is_flip_flop_semiautomaton(d: &Semiautomaton) -> bool {
    if d.n_states() != 2 {
        return false;
    }
    let ts: BTreeSet<Transformation> = distinct_transformations(d).into_iter().collect();
    let expected: BTreeSet<Transformation> = [vec![0, 1], vec![0, 0], vec![1, 1]].into_iter().map(Transformation).collect();
    ts == expected
}

/// Isomorphic, after collapsing duplicate letters, to `A_G` for a simple group `G`.
pub fn is_simple_grouplike(d: &Semiautomaton, limits: &Limits) -> Result<bool, AlgebraError> {
    let s = characteristic_semigroup(d, limits)?;
    if !s.is_group() || !is_simple_group(&s, limits)? {
        return Ok(false);
    }
    let a_g = semiautomaton_of_semigroup(&s);
    Ok(semiautomata_isomorphic(&collapse_letters(d), &a_g, limits)?.is_some())
}

pub fn is_prime_semiautomaton(d: &Semiautomaton, limits: &Limits) -> Result<bool, AlgebraError> {
    Ok(is_flip_flop_semiautomaton(d) || is_simple_grouplike(d, limits)?)
}

/// A surjective input function over a prime core.
pub fn is_prime_operator(f: &Factorization, limits: &Limits) -> Result<bool, AlgebraError> {
    Ok(f.phi.is_surjective() && is_prime_semiautomaton(&f.core, limits)?)
}

/// Similar iff the cores are isomorphic.
pub fn operators_similar(f1: &Factorization, f2: &Factorization, limits: &Limits) -> Result<bool, AlgebraError> {
    Ok(semiautomata_isomorphic(&f1.core, &f2.core, limits)?.is_some())
}

/// `psi_1` on letters and `psi_2` on states of a subsemiautomaton of the
/// source; `None` marks letters and states outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomomorphismWitness {
    pub letters: Vec<Option<usize>>,
    pub states: Vec<Option<usize>>,
}

impl HomomorphismWitness {
    pub fn total(letters: Vec<usize>, states: Vec<usize>) -> Self {
        HomomorphismWitness {
            letters: letters.into_iter().map(Some).collect(),
            states: states.into_iter().map(Some).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomFailure {
    #[error("mapping sizes do not match the source")]
    Shape,
    #[error("target index out of range")]
    OutOfRange,
    #[error("the declared subsemiautomaton is empty")]
    EmptyDomain,
    #[error("state {state} leaves the subsemiautomaton on letter {letter}")]
    NotClosed { state: usize, letter: usize },
    #[error("equation fails at state {state}, letter {letter}")]
    Equation { state: usize, letter: usize },
    #[error("target letter {0} has no preimage")]
    LettersNotOnto(usize),
    #[error("target state {0} has no preimage")]
    StatesNotOnto(usize),
}

/// Checks `psi_2(delta(q, a)) = delta'(psi_2(q), psi_1(a))` on the declared
/// subsemiautomaton, its closure, and surjectivity of both maps.
pub fn verify_homomorphism(w: &HomomorphismWitness, d: &Semiautomaton, target: &Semiautomaton) -> Result<(), HomFailure> {
    if w.letters.len() != d.n_letters() || w.states.len() != d.n_states() {
        return Err(HomFailure::Shape);
    }
    if w.letters.iter().flatten().any(|&a| a >= target.n_letters()) || w.states.iter().flatten().any(|&q| q >= target.n_states()) {
        return Err(HomFailure::OutOfRange);
    }
    if w.states.iter().all(Option::is_none) || w.letters.iter().all(Option::is_none) {
        return Err(HomFailure::EmptyDomain);
    }
    for (q, psi_q) in w.states.iter().enumerate() {
        let Some(psi_q) = *psi_q else { continue };
        for (a, psi_a) in w.letters.iter().enumerate() {
            let Some(psi_a) = *psi_a else { continue };
            let next = d.step(q, a);
            match w.states[next] {
                None => return Err(HomFailure::NotClosed { state: q, letter: a }),
                Some(img) if img != target.step(psi_q, psi_a) => {
                    return Err(HomFailure::Equation { state: q, letter: a });
                }
                Some(_) => {}
            }
        }
    }
    if let Some(b) = (0..target.n_letters()).find(|b| !w.letters.contains(&Some(*b))) {
        return Err(HomFailure::LettersNotOnto(b));
    }
    if let Some(p) = (0..target.n_states()).find(|p| !w.states.contains(&Some(*p))) {
        return Err(HomFailure::StatesNotOnto(p));
    }
    Ok(())
}

/// An acceptor built on a representing semiautomaton.
#[derive(Debug, Clone)]
pub struct Transported {
    pub automaton: Automaton,
    /// Target letters to source letters; the new semiautomaton is the
    /// source restricted to the subsemiautomaton, composed with this map.
    pub input_function: InputFunction,
    /// Source index of each state of `automaton`.
    pub source_states: Vec<usize>,
}

/// Moves an automaton on `target` onto the source `d` along `w`.
///
/// With `chi` a section of `psi_1`, the new automaton reads target letters,
/// moves by `delta(q, chi(a))`, outputs `theta_2(psi_2(q), a)` and starts in
/// a preimage of the target's initial state.
pub fn transport_acceptor(w: &HomomorphismWitness, d: &Semiautomaton, a2: &Automaton) -> Result<Transported, AlgebraError> {
    verify_homomorphism(w, d, &a2.semi).map_err(AlgebraError::NotAHomomorphism)?;
    let chi: Vec<usize> = (0..a2.semi.n_letters())
        .map(|b| w.letters.iter().position(|&x| x == Some(b)).expect("onto"))
        .collect();
    let source_states: Vec<usize> = (0..d.n_states()).filter(|&q| w.states[q].is_some()).collect();
    let local = |q: usize| source_states.iter().position(|&s| s == q).expect("closed");
    let init = source_states
        .iter()
        .position(|&q| w.states[q] == Some(a2.init))
        .ok_or(AlgebraError::NoInitialPreimage)?;
    let delta = source_states
        .iter()
        .map(|&q| chi.iter().map(|&a| local(d.step(q, a))).collect())
        .collect();
    let theta = source_states
        .iter()
        .map(|&q| {
            let img = w.states[q].expect("in domain");
            (0..chi.len()).map(|b| a2.theta[img][b]).collect()
        })
        .collect();
    let names = source_states.iter().map(|&q| d.states[q].clone()).collect();
    let semi = Semiautomaton::new(a2.semi.inputs.clone(), names, delta).expect("closed subsemiautomaton");
    let automaton = Automaton::new(semi, init, a2.outputs.clone(), theta).expect("well-formed");
    Ok(Transported {
        automaton,
        input_function: InputFunction::new(chi, d.n_letters()).expect("in range"),
        source_states,
    })
}
