use serde::{Deserialize, Serialize};

/// One action index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointAction(pub Vec<usize>);

impl JointAction {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Index<usize> for JointAction {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Mixed-radix indexing of joint actions.
///
/// Joint indices are lexicographic with player 0 as the most significant
/// digit, so `(C, D)` precedes `(D, C)` in a 2x2 game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl JointSpace {
    pub fn new(sizes: &[usize]) -> Self {
        let mut strides = vec![1; sizes.len()];
        for k in (0..sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        let len = sizes.iter().product();
        Self {
            sizes: sizes.to_vec(),
            strides,
            len,
        }
    }

    /// Number of joint actions.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_players(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn encode(&self, actions: &[usize]) -> usize {
        actions
            .iter()
            .zip(&self.strides)
            .map(|(a, s)| a * s)
            .sum()
    }

    pub fn decode(&self, mut index: usize) -> JointAction {
        let mut out = vec![0; self.sizes.len()];
        for (k, stride) in self.strides.iter().enumerate() {
            out[k] = index / stride;
            index %= stride;
        }
        JointAction(out)
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (k, stride) in self.strides.iter().enumerate() {
            out[k] = index / stride;
            index %= stride;
        }
    }

    /// Action of `player` inside joint action `index`.
    pub fn component(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.sizes[player]
    }

    /// Same joint action with `player`'s component replaced.
    pub fn with_component(&self, index: usize, player: usize, action: usize) -> usize {
        let old = self.component(index, player);
        index - old * self.strides[player] + action * self.strides[player]
    }

    /// Sub-space of every player except `excluded`, in increasing player order.
    pub fn without(&self, excluded: usize) -> JointSpace {
        let sizes: Vec<usize> = self
            .sizes
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != excluded)
            .map(|(_, &n)| n)
            .collect();
        JointSpace::new(&sizes)
    }

    /// Joint index of the other players' actions when `excluded` is removed.
    pub fn team_index(&self, index: usize, excluded: usize) -> usize {
        let mut team = 0;
        for k in 0..self.sizes.len() {
            if k == excluded {
                continue;
            }
            team = team * self.sizes[k] + self.component(index, k);
        }
        team
    }

    /// Inverse of [`JointSpace::team_index`]: rebuilds a full joint index.
    pub fn join(&self, player: usize, action: usize, team: usize) -> usize {
        let mut rest = team;
        let mut index = 0;
        for k in (0..self.sizes.len()).rev() {
            let a = if k == player {
                action
            } else {
                let n = self.sizes[k];
                let a = rest % n;
                rest /= n;
                a
            };
            index += a * self.strides[k];
        }
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let js = JointSpace::new(&[2, 2]);
        assert_eq!(js.encode(&[0, 1]), 1);
        assert_eq!(js.encode(&[1, 0]), 2);
        assert_eq!(js.decode(3).0, vec![1, 1]);
    }

    #[test]
    fn team_roundtrip() {
        let js = JointSpace::new(&[3, 2, 4]);
        for j in 0..3 {
            let team = js.without(j);
            for idx in 0..js.len() {
                let a = js.component(idx, j);
                let t = js.team_index(idx, j);
                assert!(t < team.len());
                assert_eq!(js.join(j, a, t), idx);
            }
        }
    }

    #[test]
    fn with_component_replaces() {
        let js = JointSpace::new(&[3, 3, 3]);
        let idx = js.encode(&[2, 1, 0]);
        assert_eq!(js.decode(js.with_component(idx, 1, 2)).0, vec![2, 2, 0]);
    }
}
