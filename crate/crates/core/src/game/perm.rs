use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// A bijection over player indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayerPermutation(Vec<usize>);

impl PlayerPermutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            ensure!(m < map.len(), "permutation target {m} out of range");
            ensure!(!seen[m], "permutation maps two players to {m}");
            seen[m] = true;
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &m) in self.0.iter().enumerate() {
            inv[m] = i;
        }
        Self(inv)
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&m| self.0[m]).collect())
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut out = Self::identity(self.len());
        for _ in 0..(k % self.order().max(1) as u64) {
            out = self.compose(&out);
        }
        out
    }

    /// Smallest k ≥ 1 with σ^k = identity.
    pub fn order(&self) -> usize {
        if self.0.is_empty() {
            return 1;
        }
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }

    /// True when the powers of the permutation connect every pair of players.
    pub fn is_n_cyclic(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        // The orbit of 0 has size n iff it returns to 0 after exactly n steps.
        let mut len = 1;
        let mut j = self.0[0];
        while j != 0 {
            j = self.0[j];
            len += 1;
        }
        len == n
    }

    /// Every permutation of `n` players, in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self(current.clone()));
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        out
    }
}

/// The rotation i → i+1 mod n.
pub fn cyclic_permutation(n: usize) -> Result<PlayerPermutation> {
    ensure!(n >= 1, "cyclic permutation needs at least one player");
    let p = PlayerPermutation((0..n).map(|i| (i + 1) % n).collect());
    debug_assert!(p.is_n_cyclic());
    Ok(p)
}

/// A relabelling of players, states and actions under which the game is invariant.
///
/// With `g = (ψ, φ_S, φ_A)` and `(a^g)_{ψ(i)} = φ_A(a_i)`, invariance means
/// `P(φ_S(s') | φ_S(s), a^g) = P(s' | s, a)` and
/// `r_{ψ(i)}(φ_S(s), a^g, φ_S(s')) = r_i(s, a, s')`.
/// Grid games need a mirror map here; matrix games use identity maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetry {
    pub players: PlayerPermutation,
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
}

impl Symmetry {
    pub fn identity_maps(players: PlayerPermutation, num_states: usize, num_actions: usize) -> Self {
        Self {
            players,
            states: (0..num_states).collect(),
            actions: (0..num_actions).collect(),
        }
    }

    pub fn inverse_actions(&self) -> Vec<usize> {
        let mut inv = vec![0; self.actions.len()];
        for (a, &b) in self.actions.iter().enumerate() {
            inv[b] = a;
        }
        inv
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Symmetry) -> Symmetry {
        Symmetry {
            players: self.players.compose(&other.players),
            states: other.states.iter().map(|&s| self.states[s]).collect(),
            actions: other.actions.iter().map(|&a| self.actions[a]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_small_cases() {
        assert_eq!(cyclic_permutation(2).unwrap().as_slice(), &[1, 0]);
        assert_eq!(cyclic_permutation(3).unwrap().as_slice(), &[1, 2, 0]);
        assert!(cyclic_permutation(3).unwrap().pow(3).is_identity());
        assert!(cyclic_permutation(0).is_err());
    }

    #[test]
    fn n_cyclic_detection() {
        assert!(PlayerPermutation::new(vec![1, 2, 0]).unwrap().is_n_cyclic());
        assert!(!PlayerPermutation::new(vec![1, 0, 2]).unwrap().is_n_cyclic());
        assert!(!PlayerPermutation::identity(2).is_n_cyclic());
        assert!(PlayerPermutation::identity(1).is_n_cyclic());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(PlayerPermutation::new(vec![0, 0]).is_err());
        assert!(PlayerPermutation::new(vec![0, 2]).is_err());
    }

    #[test]
    fn all_permutations_count() {
        assert_eq!(PlayerPermutation::all(3).len(), 6);
        assert_eq!(PlayerPermutation::all(4).len(), 24);
        assert_eq!(PlayerPermutation::all(1).len(), 1);
    }

    #[test]
    fn orbit_connects_every_pair() {
        for n in 1..7 {
            let sigma = cyclic_permutation(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert!((0..n as u64).any(|k| sigma.pow(k).apply(i) == j));
                }
            }
        }
    }
}
