//! Irreducibility and the Frobenius normal form.
//!
//! The digraph of an `n x n` matrix has an edge `i -> j` for every nonzero
//! off-diagonal entry `a_ij`. Strongly connected components are found with
//! an iterative Tarjan pass on the exact-zero pattern.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Strictly increasing list of 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts and deduplicates. Indices must be `< n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::BadIndexSet(format!("index {} out of range 1..={n}", bad + 1)));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self(indices))
    }

    /// Nonempty proper subset of `0..n`, as required for Schur complements.
    pub fn proper(indices: Vec<usize>, n: usize) -> Result<Self> {
        let set = Self::new(indices, n)?;
        if set.is_empty() {
            return Err(Error::BadIndexSet("empty".into()));
        }
        if set.len() == n {
            return Err(Error::BadIndexSet("index set covers every row".into()));
        }
        Ok(set)
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// `<n> - self`, increasing.
    pub fn complement(&self, n: usize) -> Self {
        Self((0..n).filter(|&i| !self.contains(i)).collect())
    }

    /// Parses a 1-based comma separated list such as `3,4`.
    pub fn parse_one_based(s: &str, n: usize) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v: usize = tok.parse().map_err(|_| Error::BadIndexSet(format!("`{tok}` is not an index")))?;
            if v == 0 {
                return Err(Error::BadIndexSet("indices are 1-based".into()));
            }
            out.push(v - 1);
        }
        Self::new(out, n)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// Unbounded-order parse (`n = usize::MAX`), used where the order is not yet known.
impl FromStr for IndexSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_one_based(s, usize::MAX)
    }
}

/// Block upper triangular permutation with irreducible diagonal blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusForm {
    /// Row `i` of `P A P^T` is row `permutation[i]` of `A`.
    pub permutation: Vec<usize>,
    pub blocks: Vec<IndexSet>,
    #[serde(skip)]
    pub block_matrices: Vec<ComplexMatrix>,
}

impl FrobeniusForm {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(IndexSet::len).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.blocks.len() == 1
    }
}

fn adjacency(a: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = a.order();
    (0..n).map(|i| (0..n).filter(|&j| j != i && !a.is_structural_zero(i, j)).collect()).collect()
}

/// Tarjan's algorithm without recursion. Components come out sinks first.
fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0usize;
    // (vertex, next neighbour position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, pos)) = call.last() {
            if pos == 0 && index[v] == UNVISITED {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(pos) {
                call.last_mut().expect("nonempty").1 += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

/// Strong connectivity of the off-diagonal digraph; a `1 x 1` matrix is
/// irreducible exactly when its entry is nonzero.
pub fn is_irreducible(a: &ComplexMatrix) -> bool {
    if a.order() == 1 {
        return !a.is_structural_zero(0, 0);
    }
    strongly_connected_components(&adjacency(a)).len() == 1
}

pub fn frobenius_normal_form(a: &ComplexMatrix) -> FrobeniusForm {
    let n = a.order();
    let mut comps = strongly_connected_components(&adjacency(a));
    // Tarjan emits sink components first; sources first gives upper triangular blocks.
    comps.reverse();
    let blocks: Vec<IndexSet> = comps.into_iter().map(IndexSet).collect();
    let permutation: Vec<usize> = blocks.iter().flat_map(|b| b.as_slice().iter().copied()).collect();
    debug_assert_eq!(permutation.len(), n);
    let block_matrices = blocks.iter().map(|b| a.principal(b)).collect();
    FrobeniusForm { permutation, blocks, block_matrices }
}
