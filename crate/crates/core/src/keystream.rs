//! Chebyshev-map keystream and the key-dependent material derived from it.
//!
//! States are numbered `K^1..K^count` in the documentation and stored
//! 0-based: `states()[j - 1]` is `K^j`. The seed `K^0` is never stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of components in every keystream state.
pub const STATE_LEN: usize = 6;

pub type State = [f64; STATE_LEN];

/// Seed vector and map degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticKey {
    k0: State,
    degree: u32,
}

impl ChaoticKey {
    /// Keys sitting on a fixed point of the map (for example every
    /// component equal to 1) are accepted; they freeze the stream.
    pub fn new(k0: State, degree: u32) -> Result<Self> {
        if degree < 3 {
            return Err(Error::InvalidKey(format!("degree {degree} must be at least 3")));
        }
        if let Some(bad) = k0.iter().find(|k| !(-1.0..=1.0).contains(*k)) {
            return Err(Error::InvalidKey(format!("component {bad} outside [-1, 1]")));
        }
        Ok(Self { k0, degree })
    }

    pub fn seed(&self) -> &State {
        &self.k0
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// One step of the Chebyshev map, `cos(D * arccos(k))`.
pub fn chebyshev_next(k: f64, degree: u32) -> Result<f64> {
    if !(-1.0..=1.0).contains(&k) {
        return Err(Error::Domain(k));
    }
    Ok((f64::from(degree) * k.acos()).cos().clamp(-1.0, 1.0))
}

fn step(state: &State, degree: u32) -> Result<State> {
    let mut next = [0.0; STATE_LEN];
    for (out, &k) in next.iter_mut().zip(state) {
        *out = chebyshev_next(k, degree)?;
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keystream {
    degree: u32,
    states: Vec<State>,
}

impl Keystream {
    /// Iterates the map `count` times from the key seed.
    pub fn generate(key: &ChaoticKey, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("keystream length must be at least 1".into()));
        }
        let mut states = Vec::with_capacity(count);
        let mut current = key.k0;
        for _ in 0..count {
            current = step(&current, key.degree)?;
            states.push(current);
        }
        Ok(Self { degree: key.degree, states })
    }

    /// Wraps externally supplied states, e.g. a keystream quoted in a
    /// worked example. `degree` is used only when the stream is extended.
    pub fn from_states(states: Vec<State>, degree: u32) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("keystream needs at least one state".into()));
        }
        if degree < 3 {
            return Err(Error::InvalidKey(format!("degree {degree} must be at least 3")));
        }
        for (j, s) in states.iter().enumerate() {
            if s.iter().any(|k| !(-1.0..=1.0).contains(k)) {
                return Err(Error::InvalidKey(format!("state {} has a component outside [-1, 1]", j + 1)));
            }
        }
        Ok(Self { degree, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// State `K^j` for a 1-based `j`.
    pub fn state(&self, j: usize) -> Result<&State> {
        if j == 0 || j > self.states.len() {
            return Err(Error::KeystreamExhausted { needed: j, available: self.states.len() });
        }
        Ok(&self.states[j - 1])
    }

    /// Flattened values of the stream continued past the stored states.
    ///
    /// Value `t` is component `t % 6` of state `len + 1 + t / 6`.
    pub fn tail_values(&self, offset: usize, count: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        let mut state = *self.states.last().expect("keystream is never empty");
        let first_state = offset / STATE_LEN;
        let mut skip = offset % STATE_LEN;
        // Stored states are in range, so stepping cannot fail.
        for _ in 0..=first_state {
            state = step(&state, self.degree).expect("stored states lie in [-1, 1]");
        }
        while out.len() < count {
            out.extend(state.iter().skip(skip).take(count - out.len()));
            skip = 0;
            state = step(&state, self.degree).expect("stored states lie in [-1, 1]");
        }
        out
    }
}

/// Key-dependent permutation of `0..block_len` obtained by rank-sorting
/// `block_len` fresh keystream values starting at `offset` past the
/// stored states. Entry `i` of the result is the rank-`i` value's index.
pub fn derive_permutation(ks: &Keystream, block_len: usize, offset: usize) -> Vec<usize> {
    let values = ks.tail_values(offset, block_len);
    let mut order: Vec<usize> = (0..block_len).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}
